//! Sampled scalar fields on uniform grids over boxes in up to three dimensions.
//!
//! Values are stored row-major (last axis fastest). Nodes are cell-left points
//! `lower[i] + j * dx[i]`, `j = 0..n[i]`, so quadrature is the left-endpoint
//! Riemann sum and commutes exactly with whole-cell shifts.

use crate::error::{check_exponent, invalid, Error, Result};

pub const MAX_DIM: usize = 3;

/// Axis-aligned box `[lower_0, upper_0) x ... x [lower_{d-1}, upper_{d-1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl GridBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(invalid("box", "lower and upper differ in length"));
        }
        if lower.is_empty() {
            return Err(invalid("box", "dimension must be at least 1"));
        }
        if lower.len() > MAX_DIM {
            return Err(Error::DimensionOverflow(lower.len()));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid("box", format!("axis {i}: need lower < upper, got [{lo}, {hi}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[lo, hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; d], vec![hi; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.length(i)).product()
    }

    /// Cartesian product `self x other`.
    pub fn product(&self, other: &GridBox) -> Result<GridBox> {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        lower.extend_from_slice(&other.lower);
        upper.extend_from_slice(&other.upper);
        GridBox::new(lower, upper)
    }

    /// The single-axis box for `axis`.
    pub fn axis_box(&self, axis: usize) -> GridBox {
        GridBox {
            lower: vec![self.lower[axis]],
            upper: vec![self.upper[axis]],
        }
    }
}

/// How a grid function is continued outside its box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extension {
    Zero,
    Periodic,
}

impl std::str::FromStr for Extension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Extension::Zero),
            "periodic" => Ok(Extension::Periodic),
            other => Err(invalid("extension", format!("unknown extension `{other}`"))),
        }
    }
}

/// Values of a real scalar field on a uniform grid. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    domain: GridBox,
    shape: Vec<usize>,
    values: Vec<f64>,
    extension: Extension,
}

impl GridFunction {
    pub fn from_values(
        domain: GridBox,
        shape: Vec<usize>,
        values: Vec<f64>,
        extension: Extension,
    ) -> Result<Self> {
        if shape.len() != domain.dim() {
            return Err(invalid("resolution", "one entry per axis required"));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(invalid("resolution", "every axis needs at least one sample"));
        }
        let len: usize = shape.iter().product();
        if values.len() != len {
            return Err(invalid(
                "values",
                format!("expected {len} samples, got {}", values.len()),
            ));
        }
        let f = Self {
            domain,
            shape,
            values,
            extension,
        };
        if let Some(pos) = f.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                coords: f.node(&f.unravel(pos)),
            });
        }
        Ok(f)
    }

    pub fn zeros(domain: GridBox, shape: Vec<usize>, extension: Extension) -> Result<Self> {
        let len = shape.iter().product();
        Self::from_values(domain, shape, vec![0.0; len], extension)
    }

    /// Samples `expr` at every node.
    pub fn sample<F>(expr: F, domain: GridBox, shape: Vec<usize>, extension: Extension) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut f = Self::zeros(domain, shape, extension)?;
        let mut coords = vec![0.0; f.dim()];
        for pos in 0..f.values.len() {
            let idx = f.unravel(pos);
            for (axis, c) in coords.iter_mut().enumerate() {
                *c = f.coordinate(axis, idx[axis]);
            }
            let v = expr(&coords);
            if !v.is_finite() {
                return Err(Error::NonFinite { coords });
            }
            f.values[pos] = v;
        }
        Ok(f)
    }

    /// Same grid as `self` with new values. Values must already be finite.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> GridFunction {
        debug_assert_eq!(values.len(), self.values.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        GridFunction {
            domain: self.domain.clone(),
            shape: self.shape.clone(),
            values,
            extension: self.extension,
        }
    }

    /// Same grid, checked values.
    pub fn replace_values(&self, values: Vec<f64>) -> Result<GridFunction> {
        Self::from_values(self.domain.clone(), self.shape.clone(), values, self.extension)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        self.replace_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn with_extension(&self, extension: Extension) -> GridFunction {
        GridFunction {
            extension,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn domain(&self) -> &GridBox {
        &self.domain
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.length(axis) / self.shape[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        self.domain.lower[axis] + j as f64 * self.spacing(axis)
    }

    pub fn node(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(axis, &j)| self.coordinate(axis, j))
            .collect()
    }

    /// Distance between consecutive entries along `axis` in the flat array.
    pub fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    pub fn unravel(&self, mut pos: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = pos % self.shape[axis];
            pos /= self.shape[axis];
        }
        idx
    }

    pub fn ravel(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&j, &n)| acc * n + j)
    }

    /// Value at a possibly out-of-range integer index, following the extension rule.
    pub fn at_index(&self, index: &[i64]) -> f64 {
        let mut pos = 0usize;
        for (axis, &j) in index.iter().enumerate() {
            let n = self.shape[axis] as i64;
            let j = match self.extension {
                Extension::Zero if j < 0 || j >= n => return 0.0,
                Extension::Zero => j,
                Extension::Periodic => j.rem_euclid(n),
            };
            pos = pos * self.shape[axis] + j as usize;
        }
        self.values[pos]
    }

    /// Value at the node nearest to `x`; zero extension returns 0 outside the box.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let index: Vec<i64> = x
            .iter()
            .enumerate()
            .map(|(axis, &xi)| ((xi - self.domain.lower[axis]) / self.spacing(axis)).round() as i64)
            .collect();
        self.at_index(&index)
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::GridMismatch { field: "resolution" });
        }
        if self.domain != other.domain {
            return Err(Error::GridMismatch { field: "box" });
        }
        if self.extension != other.extension {
            return Err(Error::GridMismatch { field: "extension" });
        }
        Ok(())
    }

    /// `(sum |u|^p * cell volume)^(1/p)`, or `max |u|` for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent("p", p)?;
        Ok(lp_norm_of(&self.values, self.cell_volume(), p))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn pointwise_multiply(&self, other: &GridFunction) -> Result<GridFunction> {
        self.same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(self.with_values(values))
    }

    /// `(u (x) v)(x, y) = u(x) v(y)` on the product box.
    pub fn tensor_product(&self, other: &GridFunction) -> Result<GridFunction> {
        let d = self.dim() + other.dim();
        if d > MAX_DIM {
            return Err(Error::DimensionOverflow(d));
        }
        if self.extension != other.extension {
            return Err(Error::GridMismatch { field: "extension" });
        }
        let domain = self.domain.product(&other.domain)?;
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&other.shape);
        let mut values = Vec::with_capacity(self.len() * other.len());
        for &a in &self.values {
            values.extend(other.values.iter().map(|&b| a * b));
        }
        GridFunction::from_values(domain, shape, values, self.extension)
    }

    /// `t -> u(2^nlevels t)` on the same box with zero extension.
    ///
    /// Images that land on a node are copied exactly; others are linearly
    /// interpolated between the neighbouring nodes.
    pub fn dyadic_dilate(&self, nlevels: u32) -> Result<GridFunction> {
        if self.dim() != 1 {
            return Err(invalid("u", "dyadic dilation is defined for 1-d functions"));
        }
        if nlevels == 0 {
            return Ok(self.with_extension(Extension::Zero));
        }
        let lambda = (1u64 << nlevels) as f64;
        let n = self.shape[0];
        if let (Some(first), Some(last)) = (
            self.values.iter().position(|&v| v != 0.0),
            self.values.iter().rposition(|&v| v != 0.0),
        ) {
            let cells = (last - first + 1) as f64 / lambda;
            if cells < 8.0 {
                return Err(Error::TooCoarse(format!(
                    "dilated support spans {cells:.2} cells, need at least 8"
                )));
            }
        }
        let lower = self.domain.lower[0];
        let dx = self.spacing(0);
        let get = |k: i64| {
            if k < 0 || k >= n as i64 {
                0.0
            } else {
                self.values[k as usize]
            }
        };
        let values = (0..n)
            .map(|j| {
                let s = (lambda * self.coordinate(0, j) - lower) / dx;
                let k = s.round();
                if (s - k).abs() < 1e-9 {
                    get(k as i64)
                } else {
                    let k0 = s.floor();
                    let w = s - k0;
                    (1.0 - w) * get(k0 as i64) + w * get(k0 as i64 + 1)
                }
            })
            .collect();
        Ok(GridFunction {
            domain: self.domain.clone(),
            shape: self.shape.clone(),
            values,
            extension: Extension::Zero,
        })
    }

    /// `x -> u(x - mu)` for a whole-cell displacement `mu` (in cells per axis).
    pub fn shift_cells(&self, mu: &[i64]) -> Result<GridFunction> {
        if mu.len() != self.dim() {
            return Err(invalid("mu", "one entry per axis required"));
        }
        let mut index = vec![0i64; self.dim()];
        let values = (0..self.len())
            .map(|pos| {
                let idx = self.unravel(pos);
                for axis in 0..self.dim() {
                    index[axis] = idx[axis] as i64 - mu[axis];
                }
                self.at_index(&index)
            })
            .collect();
        Ok(self.with_values(values))
    }

    /// `x -> u(x - mu)` for a displacement in length units; must be whole cells.
    pub fn shift(&self, mu: &[f64]) -> Result<GridFunction> {
        if mu.len() != self.dim() {
            return Err(invalid("mu", "one entry per axis required"));
        }
        let mut cells = Vec::with_capacity(mu.len());
        for (axis, &m) in mu.iter().enumerate() {
            let c = m / self.spacing(axis);
            if (c - c.round()).abs() > 1e-9 {
                return Err(Error::NonIntegralShift { axis, cells: c });
            }
            cells.push(c.round() as i64);
        }
        self.shift_cells(&cells)
    }

    /// Index range `[first, last]` of nonzero samples along `axis`, if any.
    pub fn support_indices(&self, axis: usize) -> Option<(usize, usize)> {
        let stride = self.stride(axis);
        let n = self.shape[axis];
        let mut first = None;
        let mut last = None;
        for (pos, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                let j = (pos / stride) % n;
                first = Some(first.map_or(j, |f: usize| f.min(j)));
                last = Some(last.map_or(j, |l: usize| l.max(j)));
            }
        }
        first.zip(last)
    }
}

/// Starting offsets of every 1-d lane along `axis` for a row-major array of `shape`.
pub(crate) fn lane_starts(shape: &[usize], axis: usize) -> impl Iterator<Item = usize> {
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let block = shape[axis] * inner;
    (0..outer).flat_map(move |o| (0..inner).map(move |i| o * block + i))
}

pub(crate) fn lp_norm_of(values: &[f64], cell_volume: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let sum = if p == 1.0 {
        pairwise_sum_by(values, f64::abs)
    } else if p == 2.0 {
        pairwise_sum_by(values, |v| v * v)
    } else {
        pairwise_sum_by(values, |v| v.abs().powf(p))
    };
    (sum * cell_volume).powf(1.0 / p)
}

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise (cascade) summation; the reduction tree depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values, |v| v)
}

pub fn pairwise_sum_by(values: &[f64], f: impl Fn(f64) -> f64 + Copy) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().map(|&v| f(v)).sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_by(&values[..mid], f) + pairwise_sum_by(&values[mid..], f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit(d: usize) -> GridBox {
        GridBox::cube(d, 0.0, 1.0).unwrap()
    }

    #[test]
    fn sample_constant_and_linear_and_sine() {
        let c = GridFunction::sample(|_| 1.0, unit(1), vec![4], Extension::Zero).unwrap();
        assert_eq!(c.values(), &[1.0, 1.0, 1.0, 1.0]);
        let x = GridFunction::sample(|x| x[0], unit(1), vec![4], Extension::Zero).unwrap();
        assert_eq!(x.values(), &[0.0, 0.25, 0.5, 0.75]);
        let s = GridFunction::sample(|x| (2.0 * PI * x[0]).sin(), unit(1), vec![4], Extension::Zero)
            .unwrap();
        let want = [0.0, 1.0, 0.0, -1.0];
        for (a, b) in s.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sample_rejects_non_finite_with_coordinates() {
        let err = GridFunction::sample(
            |x| if x[0] == 0.5 { f64::NAN } else { 0.0 },
            unit(1),
            vec![4],
            Extension::Zero,
        )
        .unwrap_err();
        assert_eq!(err, Error::NonFinite { coords: vec![0.5] });
    }

    #[test]
    fn box_validation() {
        assert!(GridBox::new(vec![1.0], vec![0.0]).is_err());
        assert!(matches!(
            GridBox::cube(4, 0.0, 1.0),
            Err(Error::DimensionOverflow(4))
        ));
    }

    #[test]
    fn lp_norm_examples() {
        let one = GridFunction::sample(|_| 1.0, unit(2), vec![8, 8], Extension::Zero).unwrap();
        assert_relative_eq!(one.lp_norm(2.0).unwrap(), 1.0, max_relative = 1e-15);
        let x = GridFunction::sample(|x| x[0], unit(1), vec![1024], Extension::Zero).unwrap();
        // analytic integral of x over [0,1] is 1/2
        assert!((x.lp_norm(1.0).unwrap() - 0.5).abs() < 1e-3);
        let v = GridFunction::from_values(unit(1), vec![2], vec![3.0, -4.0], Extension::Zero).unwrap();
        assert_eq!(v.lp_norm(f64::INFINITY).unwrap(), 4.0);
        assert!(v.lp_norm(0.5).is_err());
    }

    #[test]
    fn multiply_identity_and_mismatch() {
        let one = GridFunction::sample(|_| 1.0, unit(1), vec![16], Extension::Zero).unwrap();
        let v = GridFunction::sample(|x| x[0] * x[0] - 0.3, unit(1), vec![16], Extension::Zero).unwrap();
        assert_eq!(one.pointwise_multiply(&v).unwrap(), v);
        let w = GridFunction::sample(|x| x[0], unit(1), vec![8], Extension::Zero).unwrap();
        assert_eq!(
            v.pointwise_multiply(&w).unwrap_err(),
            Error::GridMismatch { field: "resolution" }
        );
        let p = v.with_extension(Extension::Periodic);
        assert_eq!(
            v.pointwise_multiply(&p).unwrap_err(),
            Error::GridMismatch { field: "extension" }
        );
    }

    #[test]
    fn tensor_product_layout_and_overflow() {
        let one = GridFunction::sample(|_| 1.0, unit(1), vec![4], Extension::Zero).unwrap();
        let v = GridFunction::sample(|x| x[0] + 1.0, unit(1), vec![4], Extension::Zero).unwrap();
        let t = one.tensor_product(&v).unwrap();
        assert_eq!(t.shape(), &[4, 4]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(t.values()[t.ravel(&[i, j])], v.values()[j]);
            }
        }
        let sq = GridFunction::sample(|_| 1.0, unit(2), vec![4, 4], Extension::Zero).unwrap();
        assert!(matches!(
            sq.tensor_product(&sq),
            Err(Error::DimensionOverflow(4))
        ));
    }

    #[test]
    fn dilation_identity_and_sup() {
        let b = GridBox::cube(1, -4.0, 4.0).unwrap();
        let u = GridFunction::sample(
            |x| (1.0 - x[0] * x[0]).max(0.0),
            b,
            vec![1024],
            Extension::Zero,
        )
        .unwrap();
        assert_eq!(u.dyadic_dilate(0).unwrap(), u);
        let d3 = u.dyadic_dilate(3).unwrap();
        assert_eq!(d3.sup_norm(), u.sup_norm());
        assert!(matches!(u.dyadic_dilate(6), Err(Error::TooCoarse(_))));
    }

    #[test]
    fn dilation_law_on_matched_blocks() {
        // piecewise constant on aligned blocks of 2^n cells: the subsampled
        // Riemann sum is exact, so the 2^(-n/p) law holds to roundoff
        let n = 3u32;
        let b = GridBox::cube(1, -4.0, 4.0).unwrap();
        let coarse: Vec<f64> = (0..64).map(|i| ((i as f64) * 0.37).sin()).collect();
        let mut vals = vec![0.0; 512];
        for (i, v) in vals.iter_mut().enumerate() {
            if (192..320).contains(&i) {
                *v = coarse[(i - 192) / 8 % 64];
            }
        }
        let u = GridFunction::from_values(b, vec![512], vals, Extension::Zero).unwrap();
        let d = u.dyadic_dilate(n).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let want = 2f64.powf(-(n as f64) / p) * u.lp_norm(p).unwrap();
            assert_relative_eq!(d.lp_norm(p).unwrap(), want, max_relative = 1e-10);
        }
    }

    #[test]
    fn shifts() {
        let u = GridFunction::sample(|x| x[0].sin() + 2.0, unit(1), vec![16], Extension::Periodic)
            .unwrap();
        assert_eq!(u.shift_cells(&[0]).unwrap(), u);
        assert_eq!(u.shift_cells(&[5]).unwrap().shift_cells(&[-5]).unwrap(), u);
        assert_eq!(u.shift(&[0.125]).unwrap(), u.shift_cells(&[2]).unwrap());
        assert!(matches!(
            u.shift(&[0.1]),
            Err(Error::NonIntegralShift { axis: 0, .. })
        ));
        let z = u.with_extension(Extension::Zero);
        let moved = z.shift_cells(&[3]).unwrap();
        assert!(moved.lp_norm(2.0).unwrap() <= z.lp_norm(2.0).unwrap());
        assert_eq!(moved.values()[..3], [0.0; 3]);
    }

    #[test]
    fn zero_extension_outside_box() {
        let u = GridFunction::sample(|_| 1.0, unit(2), vec![4, 4], Extension::Zero).unwrap();
        assert_eq!(u.at_index(&[-1, 0]), 0.0);
        assert_eq!(u.evaluate(&[2.0, 0.5]), 0.0);
        let p = u.with_extension(Extension::Periodic);
        assert_eq!(p.at_index(&[-1, 7]), 1.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }
}
