//! Lattice partitions of unity, uniform norms, localization and the product
//! ratios behind the algebra and Moser-type inequalities.

use rayon::prelude::*;

use crate::differences::besov_norm_diff;
use crate::error::{invalid, Error, Result};
use crate::grid::{pairwise_sum, Extension, GridBox, GridFunction};
use crate::profile::bump;
use crate::tensor::TensorField;

pub use crate::sobolev::Space;

/// Translates `psi_mu(x) = psi(x - mu lambda)` of a tensor-power bump with
/// support width two lattice cells, normalized by its own translate sum.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    domain: GridBox,
    shape: Vec<usize>,
    extension: Extension,
    /// Lattice spacing in grid cells, per axis.
    lattice: Vec<usize>,
    /// `psi` at cell offsets `-(lattice-1) ..= lattice-1`, per axis.
    profile: Vec<Vec<f64>>,
    /// Active lattice indices per axis.
    translates: Vec<Vec<i64>>,
}

/// Builds the partition with lattice spacing `base_width` (in box units) on
/// the grid of `box` at `resolution`. Lattice points sit on the nodes
/// `mu * lambda` counted from the lower corner.
pub fn build_partition(
    base_width: f64,
    domain: &GridBox,
    resolution: &[usize],
    extension: Extension,
) -> Result<PartitionOfUnity> {
    if resolution.len() != domain.dim() {
        return Err(invalid("resolution", "one entry per axis required"));
    }
    if !(base_width > 0.0 && base_width.is_finite()) {
        return Err(invalid("base_width", format!("must be positive, got {base_width}")));
    }
    let mut lattice = Vec::new();
    let mut profile = Vec::new();
    let mut translates = Vec::new();
    for (axis, &n) in resolution.iter().enumerate() {
        let dx = domain.length(axis) / n as f64;
        let cells = base_width / dx;
        let lc = cells.round();
        if (cells - lc).abs() > 1e-9 * cells.max(1.0) || lc < 2.0 {
            return Err(invalid(
                "base_width",
                format!("axis {axis}: lattice spacing must be a whole number of at least 2 cells, got {cells}"),
            ));
        }
        let lc = lc as usize;
        if 2 * lc > n {
            return Err(invalid("base_width", format!("axis {axis}: lattice wider than half the box")));
        }
        if extension == Extension::Periodic && n % lc != 0 {
            return Err(invalid("base_width", format!("axis {axis}: lattice does not tile the period")));
        }
        let raw = |j: i64| bump(j as f64 / lc as f64);
        let mut values = Vec::with_capacity(2 * lc - 1);
        for j in -(lc as i64 - 1)..=(lc as i64 - 1) {
            let total: f64 = (-2..=2).map(|mu| raw(j - mu * lc as i64)).sum();
            if total <= 0.0 {
                return Err(Error::NumericalAnomaly(format!("translate sum vanishes at offset {j}")));
            }
            values.push(raw(j) / total);
        }
        let count = match extension {
            Extension::Periodic => n / lc,
            Extension::Zero => (n - 1) / lc + 2,
        };
        lattice.push(lc);
        profile.push(values);
        translates.push((0..count as i64).collect());
    }
    Ok(PartitionOfUnity {
        domain: domain.clone(),
        shape: resolution.to_vec(),
        extension,
        lattice,
        profile,
        translates,
    })
}

impl PartitionOfUnity {
    pub fn lattice_cells(&self) -> &[usize] {
        &self.lattice
    }

    /// Every active lattice multi-index, row-major.
    pub fn translates(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for axis in &self.translates {
            out = out
                .into_iter()
                .flat_map(|m: Vec<i64>| {
                    axis.iter().map(move |&k| {
                        let mut m = m.clone();
                        m.push(k);
                        m
                    })
                })
                .collect();
        }
        out
    }

    fn axis_values(&self, axis: usize, mu: i64) -> Vec<f64> {
        let n = self.shape[axis] as i64;
        let lc = self.lattice[axis] as i64;
        (0..n)
            .map(|i| {
                let mut off = i - mu * lc;
                if self.extension == Extension::Periodic {
                    off = off.rem_euclid(n);
                    if off > n / 2 {
                        off -= n;
                    }
                }
                if off.abs() < lc {
                    self.profile[axis][(off + lc - 1) as usize]
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// `psi_mu` sampled on the grid.
    pub fn piece(&self, mu: &[i64]) -> Result<GridFunction> {
        if mu.len() != self.shape.len() {
            return Err(invalid("mu", "one lattice index per axis required"));
        }
        let axes: Vec<Vec<f64>> = mu.iter().enumerate().map(|(a, &m)| self.axis_values(a, m)).collect();
        let mut values = vec![1.0];
        for a in &axes {
            values = values.iter().flat_map(|&v| a.iter().map(move |&w| v * w)).collect();
        }
        GridFunction::from_values(self.domain.clone(), self.shape.clone(), values, self.extension)
    }

    /// Number of translates that are nonzero at each node.
    pub fn overlap_counts(&self) -> Result<Vec<usize>> {
        let mut counts = vec![0usize; self.shape.iter().product()];
        for mu in self.translates() {
            for (c, v) in counts.iter_mut().zip(self.piece(&mu)?.values()) {
                if *v > 0.0 {
                    *c += 1;
                }
            }
        }
        Ok(counts)
    }

    /// `sum_mu psi_mu` at every node.
    pub fn sum(&self) -> Result<GridFunction> {
        let mut total = vec![0.0; self.shape.iter().product()];
        for mu in self.translates() {
            for (t, v) in total.iter_mut().zip(self.piece(&mu)?.values()) {
                *t += v;
            }
        }
        GridFunction::from_values(self.domain.clone(), self.shape.clone(), total, self.extension)
    }

    fn check_grid(&self, u: &GridFunction) -> Result<()> {
        if u.shape() != self.shape.as_slice() {
            return Err(Error::GridMismatch { field: "resolution" });
        }
        if u.domain() != &self.domain {
            return Err(Error::GridMismatch { field: "box" });
        }
        if u.extension() != self.extension {
            return Err(Error::GridMismatch { field: "extension" });
        }
        Ok(())
    }

    /// `psi_mu * u` for every active translate, with zero pieces dropped.
    pub fn localize(&self, u: &GridFunction) -> Result<Vec<(Vec<i64>, GridFunction)>> {
        self.check_grid(u)?;
        let mut out = Vec::new();
        for mu in self.translates() {
            let piece = self.piece(&mu)?.pointwise_multiply(u)?;
            if piece.values().iter().any(|&v| v != 0.0) {
                out.push((mu, piece));
            }
        }
        Ok(out)
    }
}

/// `max_mu ||psi_mu u||_space`.
pub fn uniform_norm(u: &GridFunction, space: Space, pou: &PartitionOfUnity) -> Result<f64> {
    let norms = pou
        .localize(u)?
        .par_iter()
        .map(|(_, piece)| space.norm(piece))
        .collect::<Result<Vec<f64>>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// `||u||_B / (sum_mu ||psi_mu u||_B^p)^{1/p}` for the difference norm.
pub fn localization_ratio(u: &GridFunction, r: f64, p: f64, m_diff: u32, pou: &PartitionOfUnity) -> Result<f64> {
    let whole = besov_norm_diff(u, r, p, m_diff)?;
    let norms = pou
        .localize(u)?
        .par_iter()
        .map(|(_, piece)| besov_norm_diff(piece, r, p, m_diff))
        .collect::<Result<Vec<f64>>>()?;
    let aggregate = if p.is_infinite() {
        norms.iter().fold(0.0, |m: f64, &v| m.max(v))
    } else {
        let powered: Vec<f64> = norms.iter().map(|v| v.powf(p)).collect();
        pairwise_sum(&powered).powf(1.0 / p)
    };
    if aggregate == 0.0 {
        return Err(Error::ZeroNorm("localized aggregate"));
    }
    Ok(whole / aggregate)
}

/// Anything the product ratios can be evaluated on.
pub trait Field: Sized {
    fn times(&self, other: &Self) -> Result<Self>;
    fn sup(&self) -> f64;
    fn norm_in(&self, space: Space) -> Result<f64>;
}

impl Field for GridFunction {
    fn times(&self, other: &Self) -> Result<Self> {
        self.pointwise_multiply(other)
    }

    fn sup(&self) -> f64 {
        self.sup_norm()
    }

    fn norm_in(&self, space: Space) -> Result<f64> {
        space.norm(self)
    }
}

impl Field for TensorField {
    fn times(&self, other: &Self) -> Result<Self> {
        self.product(other)
    }

    fn sup(&self) -> f64 {
        self.sup_norm()
    }

    fn norm_in(&self, space: Space) -> Result<f64> {
        self.space_norm(space)
    }
}

/// `||fg|| / (||f|| ||g||)`.
pub fn algebra_ratio<F: Field>(f: &F, g: &F, space: Space) -> Result<f64> {
    let nf = f.norm_in(space)?;
    let ng = g.norm_in(space)?;
    if nf == 0.0 || ng == 0.0 {
        return Err(Error::ZeroNorm("factor norm"));
    }
    Ok(f.times(g)?.norm_in(space)? / (nf * ng))
}

/// `||fg|| / (||f|| ||g||_inf + ||f||_inf ||g||)`.
pub fn moser_ratio<F: Field>(f: &F, g: &F, space: Space) -> Result<f64> {
    let nf = f.norm_in(space)?;
    let ng = g.norm_in(space)?;
    let denom = nf * g.sup() + f.sup() * ng;
    if denom == 0.0 {
        return Err(Error::ZeroNorm("Moser denominator"));
    }
    Ok(f.times(g)?.norm_in(space)? / denom)
}
