//! Derivative-based norms: full and corner-index Sobolev sums, the
//! `C^m_mix` norm, the mixed sup/`L_p` trace functional and embedding ratios.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::differences::besov_norm_diff;
use crate::error::{check_exponent, invalid, Error, Result};
use crate::fourier::DEFAULT_MAX_DERIVATIVE;
use crate::grid::{lp_norm_of, pairwise_sum, GridFunction};
use crate::spectral::Spectrum;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Realization {
    #[default]
    Spectral,
    /// Second-order central stencils.
    CentralDifference,
}

impl std::str::FromStr for Realization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Realization::Spectral),
            "central" | "central-difference" => Ok(Realization::CentralDifference),
            other => Err(invalid("derivative", format!("unknown realization `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeSpec {
    pub alpha: Vec<u32>,
    pub realization: Realization,
}

impl DerivativeSpec {
    pub fn new(alpha: Vec<u32>, realization: Realization) -> Self {
        DerivativeSpec { alpha, realization }
    }

    pub fn spectral(alpha: Vec<u32>) -> Self {
        Self::new(alpha, Realization::Spectral)
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        Ok(derivatives(u, std::slice::from_ref(&self.alpha), self.realization)?.remove(0))
    }
}

/// Multi-indices with `|alpha|_inf <= m`, row-major.
pub fn full_indices(d: usize, m: u32) -> Vec<Vec<u32>> {
    product_indices(d, &(0..=m).collect::<Vec<_>>())
}

/// Corner multi-indices `{0, m}^d`.
pub fn corner_indices(d: usize, m: u32) -> Vec<Vec<u32>> {
    if m == 0 {
        return vec![vec![0; d]];
    }
    product_indices(d, &[0, m])
}

fn product_indices(d: usize, choices: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|a: Vec<u32>| {
                choices.iter().map(move |&c| {
                    let mut a = a.clone();
                    a.push(c);
                    a
                })
            })
            .collect();
    }
    out
}

/// `D^alpha u` for each multi-index, sharing one forward transform.
pub fn derivatives(u: &GridFunction, alphas: &[Vec<u32>], realization: Realization) -> Result<Vec<GridFunction>> {
    for alpha in alphas {
        if alpha.len() != u.dim() {
            return Err(invalid("alpha", "one order per axis required"));
        }
        if let Some(&a) = alpha.iter().find(|&&a| a > DEFAULT_MAX_DERIVATIVE) {
            return Err(invalid("alpha", format!("order {a} exceeds the maximum {DEFAULT_MAX_DERIVATIVE}")));
        }
    }
    match realization {
        Realization::Spectral => {
            let spectrum = Spectrum::forward(u);
            alphas
                .par_iter()
                .map(|alpha| spectral_apply(u, &spectrum, alpha))
                .collect()
        }
        Realization::CentralDifference => {
            for (axis, &n) in u.shape().iter().enumerate() {
                if n < 5 {
                    return Err(Error::TooCoarse(format!(
                        "central stencils need at least 5 cells on axis {axis}, got {n}"
                    )));
                }
            }
            alphas.par_iter().map(|alpha| Ok(central_apply(u, alpha))).collect()
        }
    }
}

fn spectral_apply(u: &GridFunction, spectrum: &Spectrum, alpha: &[u32]) -> Result<GridFunction> {
    if alpha.iter().all(|&a| a == 0) {
        return Ok(u.clone());
    }
    let mut s = spectrum.clone();
    let factors: Vec<Vec<Complex64>> = (0..u.dim())
        .map(|a| {
            let n = u.shape()[a];
            s.frequencies(a)
                .iter()
                .enumerate()
                .map(|(j, &xi)| {
                    if alpha[a] % 2 == 1 && n % 2 == 0 && j == n / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, xi).powu(alpha[a])
                    }
                })
                .collect()
        })
        .collect();
    s.apply_separable(&factors);
    let (re, _) = s.inverse_parts();
    u.replace_values(re)
}

fn central_stencil(order: u32) -> (&'static [f64], f64) {
    match order {
        1 => (&[-0.5, 0.0, 0.5], 1.0),
        2 => (&[1.0, -2.0, 1.0], 2.0),
        3 => (&[-0.5, 1.0, 0.0, -1.0, 0.5], 3.0),
        4 => (&[1.0, -4.0, 6.0, -4.0, 1.0], 4.0),
        _ => (&[1.0], 0.0),
    }
}

fn central_apply(u: &GridFunction, alpha: &[u32]) -> GridFunction {
    let mut cur = u.clone();
    for (axis, &order) in alpha.iter().enumerate() {
        if order == 0 {
            continue;
        }
        let (coeffs, power) = central_stencil(order);
        let half = (coeffs.len() / 2) as i64;
        let scale = u.spacing(axis).powf(-power);
        let mut out = vec![0.0; cur.len()];
        for (pos, slot) in out.iter_mut().enumerate() {
            let idx: Vec<i64> = cur.unravel(pos).iter().map(|&i| i as i64).collect();
            let mut acc = 0.0;
            for (k, &c) in coeffs.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let mut j = idx.clone();
                j[axis] += k as i64 - half;
                acc += c * cur.at_index(&j);
            }
            *slot = acc * scale;
        }
        cur = cur.with_values(out);
    }
    cur
}

fn check_sobolev_exponent(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("Sobolev norms need 1 < p < inf, got {p}")));
    }
    Ok(())
}

fn derivative_norm_sum(u: &GridFunction, alphas: &[Vec<u32>], p: f64, realization: Realization) -> Result<f64> {
    let terms: Vec<f64> = derivatives(u, alphas, realization)?
        .iter()
        .map(|d| lp_norm_of(d.values(), d.cell_volume(), p))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `sum_{|alpha|_inf <= m} ||D^alpha u||_p`.
pub fn sobolev_norm_full(u: &GridFunction, m: u32, p: f64) -> Result<f64> {
    sobolev_norm_full_with(u, m, p, Realization::Spectral)
}

pub fn sobolev_norm_full_with(u: &GridFunction, m: u32, p: f64, realization: Realization) -> Result<f64> {
    check_sobolev_exponent(p)?;
    derivative_norm_sum(u, &full_indices(u.dim(), m), p, realization)
}

/// `sum_{alpha in {0,m}^d} ||D^alpha u||_p`.
pub fn sobolev_norm_reduced(u: &GridFunction, m: u32, p: f64) -> Result<f64> {
    sobolev_norm_reduced_with(u, m, p, Realization::Spectral)
}

pub fn sobolev_norm_reduced_with(u: &GridFunction, m: u32, p: f64, realization: Realization) -> Result<f64> {
    check_sobolev_exponent(p)?;
    derivative_norm_sum(u, &corner_indices(u.dim(), m), p, realization)
}

/// `sum_{|alpha|_inf <= m} max_nodes |D^alpha u|`.
pub fn cmix_norm(u: &GridFunction, m: u32) -> Result<f64> {
    let terms: Vec<f64> = derivatives(u, &full_indices(u.dim(), m), Realization::Spectral)?
        .iter()
        .map(GridFunction::sup_norm)
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `(int over the first n_split axes of max over the rest of |D^beta u|^p)^{1/p}`.
pub fn mixed_sup_lp(u: &GridFunction, beta: &[u32], n_split: usize, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let d = u.dim();
    if n_split < 1 || n_split > d {
        return Err(Error::OutOfRange(format!("split index {n_split} outside 1..={d}")));
    }
    let deriv = DerivativeSpec::spectral(beta.to_vec()).apply(u)?;
    if n_split == d {
        return deriv.lp_norm(p);
    }
    let inner: usize = u.shape()[n_split..].iter().product();
    let slab: Vec<f64> = deriv
        .values()
        .chunks(inner)
        .map(|c| c.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
        .collect();
    let vol: f64 = (0..n_split).map(|a| u.spacing(a)).product();
    Ok(lp_norm_of(&slab, vol, p))
}

/// A function space whose norm can be evaluated on grid functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Space {
    Sobolev { m: u32, p: f64 },
    Besov { r: f64, p: f64, m_diff: u32 },
}

impl Space {
    pub fn norm(&self, u: &GridFunction) -> Result<f64> {
        match *self {
            Space::Sobolev { m, p } => sobolev_norm_full(u, m, p),
            Space::Besov { r, p, m_diff } => besov_norm_diff(u, r, p, m_diff),
        }
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            Space::Sobolev { p, .. } | Space::Besov { p, .. } => p,
        }
    }

    pub fn smoothness(&self) -> f64 {
        match *self {
            Space::Sobolev { m, .. } => m as f64,
            Space::Besov { r, .. } => r,
        }
    }
}

/// `||u||_inf / ||u||_space`.
pub fn embedding_ratio(u: &GridFunction, space: Space) -> Result<f64> {
    let norm = space.norm(u)?;
    if norm == 0.0 {
        return Err(Error::ZeroNorm("space norm"));
    }
    Ok(u.sup_norm() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Extension, GridBox};
    use std::f64::consts::PI;

    fn periodic_2d(n: usize) -> GridFunction {
        GridFunction::sample(
            |x| (2.0 * PI * x[0]).sin() * (1.0 + 0.5 * (2.0 * PI * x[1]).cos()),
            GridBox::cube(2, 0.0, 1.0).unwrap(),
            vec![n, n],
            Extension::Periodic,
        )
        .unwrap()
    }

    #[test]
    fn index_counts() {
        assert_eq!(full_indices(2, 1).len(), 4);
        assert_eq!(full_indices(3, 2).len(), 27);
        assert_eq!(corner_indices(3, 2).len(), 8);
        assert_eq!(
            full_indices(2, 1),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }

    #[test]
    fn order_zero_is_lp_norm() {
        let u = periodic_2d(32);
        let a = sobolev_norm_full(&u, 0, 2.0).unwrap();
        assert_eq!(a, u.lp_norm(2.0).unwrap());
        assert_eq!(cmix_norm(&u, 0).unwrap(), u.sup_norm());
    }

    #[test]
    fn one_dimensional_reduced_norm() {
        let u = GridFunction::sample(
            |x| (2.0 * PI * x[0]).sin(),
            GridBox::cube(1, 0.0, 1.0).unwrap(),
            vec![128],
            Extension::Periodic,
        )
        .unwrap();
        let want = (0.5f64).sqrt() * (1.0 + 2.0 * PI);
        assert!((sobolev_norm_reduced(&u, 1, 2.0).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn reduced_never_exceeds_full() {
        let u = periodic_2d(32);
        for m in 0..3 {
            assert!(sobolev_norm_reduced(&u, m, 2.0).unwrap() <= sobolev_norm_full(&u, m, 2.0).unwrap());
        }
    }

    #[test]
    fn exponent_range_enforced() {
        let u = periodic_2d(16);
        assert!(sobolev_norm_full(&u, 1, 1.0).is_err());
        assert!(sobolev_norm_full(&u, 1, f64::INFINITY).is_err());
    }

    #[test]
    fn constant_has_cmix_norm_of_its_value() {
        let u = GridFunction::sample(|_| -3.0, GridBox::cube(2, 0.0, 1.0).unwrap(), vec![16, 16], Extension::Periodic)
            .unwrap();
        assert!((cmix_norm(&u, 2).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_derivative_of_tensor_is_tensor_of_derivatives() {
        let b = GridBox::cube(1, 0.0, 1.0).unwrap();
        let f = GridFunction::sample(|x| (2.0 * PI * x[0]).sin() + 0.3, b.clone(), vec![32], Extension::Periodic).unwrap();
        let g = GridFunction::sample(|x| (4.0 * PI * x[0]).cos(), b, vec![32], Extension::Periodic).unwrap();
        let fg = f.tensor_product(&g).unwrap();
        let d = DerivativeSpec::spectral(vec![1, 1]).apply(&fg).unwrap();
        let df = DerivativeSpec::spectral(vec![1]).apply(&f).unwrap();
        let dg = DerivativeSpec::spectral(vec![1]).apply(&g).unwrap();
        let want = df.tensor_product(&dg).unwrap();
        for (a, b) in d.values().iter().zip(want.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn central_differences_track_spectral() {
        let u = periodic_2d(256);
        let s = sobolev_norm_full_with(&u, 1, 2.0, Realization::Spectral).unwrap();
        let c = sobolev_norm_full_with(&u, 1, 2.0, Realization::CentralDifference).unwrap();
        assert!((s - c).abs() < 1e-3 * s);
    }

    #[test]
    fn mixed_sup_lp_cases() {
        let u = periodic_2d(32);
        let d = DerivativeSpec::spectral(vec![1, 0]).apply(&u).unwrap();
        assert_eq!(mixed_sup_lp(&u, &[1, 0], 2, 2.0).unwrap(), d.lp_norm(2.0).unwrap());
        assert!(mixed_sup_lp(&u, &[1, 0], 0, 2.0).is_err());
        assert!(mixed_sup_lp(&u, &[1, 0], 3, 2.0).is_err());
        // tensor: ||f'||_2 * sup |g|
        let want = (2.0 * PI) * 0.5f64.sqrt() * 1.5;
        assert!((mixed_sup_lp(&u, &[1, 0], 1, 2.0).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn embedding_ratio_of_zero_is_error() {
        let u = GridFunction::zeros(GridBox::cube(1, 0.0, 1.0).unwrap(), vec![64], Extension::Periodic).unwrap();
        assert!(matches!(
            embedding_ratio(&u, Space::Sobolev { m: 1, p: 2.0 }),
            Err(Error::ZeroNorm(_))
        ));
    }
}
