//! Dyadic frequency decompositions and the Fourier-side norms.
//!
//! Windows act on angular frequency. Level 0 covers `|xi| <= 1` and level `j`
//! the shell around `2^j`; the top level `J` per axis is the smallest with
//! `2^J >= |xi_nyquist|`, so both systems partition every bin of the grid.

use rustfft::num_complex::Complex64;

use crate::differences::{mixed_difference, DirectionSet, MixedOrder, Route};
use crate::error::{check_exponent, invalid, Error, Result};
use crate::grid::{lp_norm_of, pairwise_sum, GridBox, GridFunction};
use crate::profile::smoothed_indicator;
use crate::spectral::{contract, nyquist, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// `phi_0 = 1` on `[-1, 1]`, supported in `[-3/2, 3/2]`;
    /// `phi_j(xi) = phi_0(2^-j xi) - phi_0(2^{1-j} xi)`.
    Smooth,
    /// Indicators of `[-1, 1]` and `[-2^j, -2^{j-1}) u (2^{j-1}, 2^j]`.
    Sharp,
}

impl std::str::FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(SystemKind::Smooth),
            "sharp" => Ok(SystemKind::Sharp),
            other => Err(invalid("system", format!("unknown system `{other}`"))),
        }
    }
}

/// Smooth dyadic profile `phi_0`.
pub fn base_window(xi: f64) -> f64 {
    smoothed_indicator(xi, 1.0, 1.5)
}

#[derive(Clone, Debug)]
pub struct DyadicSystem {
    kind: SystemKind,
    domain: GridBox,
    shape: Vec<usize>,
    levels: Vec<u32>,
    // windows[axis][level][bin]
    windows: Vec<Vec<Vec<f64>>>,
}

impl DyadicSystem {
    pub fn build(kind: SystemKind, domain: &GridBox, shape: &[usize]) -> Result<Self> {
        if shape.len() != domain.dim() {
            return Err(invalid("resolution", "one entry per axis required"));
        }
        let mut levels = Vec::with_capacity(shape.len());
        let mut windows = Vec::with_capacity(shape.len());
        for (axis, &n) in shape.iter().enumerate() {
            if n < 16 {
                return Err(Error::TooCoarse(format!("axis {axis} has {n} samples, need at least 16")));
            }
            if !n.is_power_of_two() {
                return Err(invalid("resolution", format!("axis {axis}: {n} is not a power of two")));
            }
            let length = domain.length(axis);
            let top = nyquist(n, length).log2().ceil().max(0.0) as u32;
            let xi: Vec<f64> = crate::spectral::angular_frequencies(n, length)
                .iter()
                .map(|x| x.abs())
                .collect();
            let per_level = (0..=top)
                .map(|j| xi.iter().map(|&x| window_value(kind, j, x)).collect())
                .collect();
            levels.push(top);
            windows.push(per_level);
        }
        Ok(DyadicSystem {
            kind,
            domain: domain.clone(),
            shape: shape.to_vec(),
            levels,
            windows,
        })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// Top level `J` per axis.
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Window values of `level` on every bin along `axis`.
    pub fn window(&self, axis: usize, level: u32) -> &[f64] {
        &self.windows[axis][level as usize]
    }

    fn check_grid(&self, u: &GridFunction) -> Result<()> {
        if u.shape() != self.shape.as_slice() {
            return Err(Error::GridMismatch { field: "resolution" });
        }
        if u.domain() != &self.domain {
            return Err(Error::GridMismatch { field: "box" });
        }
        Ok(())
    }

    /// Every level multi-index, row-major.
    pub fn multi_indices(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for &top in &self.levels {
            out = out
                .into_iter()
                .flat_map(|k: Vec<u32>| {
                    (0..=top).map(move |j| {
                        let mut k = k.clone();
                        k.push(j);
                        k
                    })
                })
                .collect();
        }
        out
    }

    /// Per-axis `n x (J+1)` matrices of `window^power`.
    fn window_matrices(&self, power: i32) -> Vec<(Vec<f64>, usize)> {
        self.windows
            .iter()
            .map(|per_level| {
                let cols = per_level.len();
                let n = per_level[0].len();
                let mut m = vec![0.0; n * cols];
                for (j, w) in per_level.iter().enumerate() {
                    for (bin, &v) in w.iter().enumerate() {
                        m[bin * cols + j] = v.powi(power);
                    }
                }
                (m, cols)
            })
            .collect()
    }
}

fn window_value(kind: SystemKind, level: u32, xi: f64) -> f64 {
    match kind {
        SystemKind::Smooth => {
            if level == 0 {
                base_window(xi)
            } else {
                let s = 2f64.powi(-(level as i32));
                base_window(s * xi) - base_window(2.0 * s * xi)
            }
        }
        SystemKind::Sharp => {
            let inside = if level == 0 {
                xi <= 1.0
            } else {
                let hi = 2f64.powi(level as i32);
                xi > 0.5 * hi && xi <= hi
            };
            if inside {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Builds a dyadic system for the grid of `box` at `resolution`.
pub fn build_system(kind: SystemKind, domain: &GridBox, resolution: &[usize]) -> Result<DyadicSystem> {
    DyadicSystem::build(kind, domain, resolution)
}

fn windowed(spectrum: &Spectrum, sys: &DyadicSystem, k: &[u32]) -> Spectrum {
    let factors: Vec<Vec<Complex64>> = k
        .iter()
        .enumerate()
        .map(|(a, &j)| sys.window(a, j).iter().map(|&w| Complex64::new(w, 0.0)).collect())
        .collect();
    let mut s = spectrum.clone();
    s.apply_separable(&factors);
    s
}

fn real_inverse(spectrum: &Spectrum, reference: &GridFunction) -> Result<GridFunction> {
    let (re, resid) = spectrum.inverse_parts();
    let scale = reference.sup_norm().max(f64::MIN_POSITIVE);
    if resid > 1e-10 * scale {
        return Err(Error::NumericalAnomaly(format!(
            "imaginary residue {resid:e} exceeds 1e-10 relative to sup norm {scale:e}"
        )));
    }
    reference.replace_values(re)
}

/// `F^{-1}[phi_k F u]` for the level multi-index `k`.
pub fn lp_block(u: &GridFunction, k: &[u32], sys: &DyadicSystem) -> Result<GridFunction> {
    sys.check_grid(u)?;
    if k.len() != u.dim() {
        return Err(invalid("k", "one level per axis required"));
    }
    for (a, (&j, &top)) in k.iter().zip(&sys.levels).enumerate() {
        if j > top {
            return Err(Error::OutOfRange(format!("level {j} on axis {a} exceeds J_max = {top}")));
        }
    }
    real_inverse(&windowed(&Spectrum::forward(u), sys, k), u)
}

/// `(sum_k 2^{r|k|_1 p} ||F^{-1}[phi_k F u]||_p^p)^{1/p}` over every level of
/// the system (max for `p = inf`).
pub fn besov_norm_fourier(u: &GridFunction, r: f64, p: f64, sys: &DyadicSystem) -> Result<f64> {
    besov_norm_fourier_with(u, r, p, sys, Route::Auto)
}

pub fn besov_norm_fourier_with(u: &GridFunction, r: f64, p: f64, sys: &DyadicSystem, route: Route) -> Result<f64> {
    check_exponent("p", p)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid("r", format!("smoothness must be nonnegative, got {r}")));
    }
    sys.check_grid(u)?;
    let norms = block_norms(u, p, sys, route)?;
    let terms: Vec<f64> = sys
        .multi_indices()
        .iter()
        .zip(&norms)
        .map(|(k, &n)| 2f64.powf(r * k.iter().sum::<u32>() as f64) * n)
        .collect();
    Ok(if p.is_infinite() {
        terms.iter().fold(0.0, |m: f64, &t| m.max(t))
    } else {
        let powered: Vec<f64> = terms.iter().map(|t| t.powf(p)).collect();
        pairwise_sum(&powered).powf(1.0 / p)
    })
}

/// `||F^{-1}[phi_k F u]||_p` for every level multi-index, row-major.
fn block_norms(u: &GridFunction, p: f64, sys: &DyadicSystem, route: Route) -> Result<Vec<f64>> {
    let spectrum = Spectrum::forward(u);
    let vol = u.cell_volume();
    let parseval = match route {
        Route::Auto => p == 2.0,
        Route::Direct => false,
        Route::Parseval if p == 2.0 => true,
        Route::Parseval => return Err(invalid("route", "Parseval evaluation needs p = 2")),
    };
    if parseval {
        let mats = sys.window_matrices(2);
        let refs: Vec<Option<(&[f64], usize)>> = mats.iter().map(|(m, c)| Some((m.as_slice(), *c))).collect();
        let (t, _) = contract(&spectrum.power(), u.shape(), &refs);
        return Ok(t.iter().map(|&s| (s.max(0.0) * vol).sqrt()).collect());
    }
    sys.multi_indices()
        .iter()
        .map(|k| {
            let w = windowed(&spectrum, sys, k);
            if w.coeffs().iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                return Ok(0.0);
            }
            let block = real_inverse(&w, u)?;
            Ok(lp_norm_of(block.values(), vol, p))
        })
        .collect()
}

/// `|| (sum_k 2^{2|k|_1 m} |F^{-1}[phi_k F u]|^2)^{1/2} ||_p` for `1 < p < inf`.
pub fn sobolev_norm_fourier(u: &GridFunction, m: u32, p: f64, sys: &DyadicSystem) -> Result<f64> {
    sobolev_norm_fourier_with(u, m, p, sys, Route::Auto)
}

pub fn sobolev_norm_fourier_with(u: &GridFunction, m: u32, p: f64, sys: &DyadicSystem, route: Route) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("square-function norm needs 1 < p < inf, got {p}")));
    }
    sys.check_grid(u)?;
    let indices = sys.multi_indices();
    let weight = |k: &[u32]| 2f64.powf(2.0 * (m * k.iter().sum::<u32>()) as f64);
    let parseval = match route {
        Route::Auto => p == 2.0,
        Route::Direct => false,
        Route::Parseval if p == 2.0 => true,
        Route::Parseval => return Err(invalid("route", "Parseval evaluation needs p = 2")),
    };
    if parseval {
        let norms = block_norms(u, 2.0, sys, Route::Parseval)?;
        let terms: Vec<f64> = indices.iter().zip(&norms).map(|(k, n)| weight(k) * n * n).collect();
        return Ok(pairwise_sum(&terms).sqrt());
    }
    let spectrum = Spectrum::forward(u);
    let mut square = vec![0.0; u.len()];
    for k in &indices {
        let w = windowed(&spectrum, sys, k);
        if w.coeffs().iter().all(|c| c.re == 0.0 && c.im == 0.0) {
            continue;
        }
        let block = real_inverse(&w, u)?;
        let wk = weight(k);
        for (s, v) in square.iter_mut().zip(block.values()) {
            *s += wk * v * v;
        }
    }
    let root: Vec<f64> = square.iter().map(|s| s.sqrt()).collect();
    Ok(lp_norm_of(&root, u.cell_volume(), p))
}

/// Zeroes every bin with `|xi_a| > b_a` on some axis.
pub fn bandlimit(u: &GridFunction, b: &[f64]) -> Result<GridFunction> {
    if b.len() != u.dim() {
        return Err(invalid("b", "one band edge per axis required"));
    }
    if b.iter().any(|&v| !(v > 0.0)) {
        return Err(invalid("b", "band edges must be positive"));
    }
    let mut spectrum = Spectrum::forward(u);
    let factors: Vec<Vec<Complex64>> = (0..u.dim())
        .map(|a| {
            spectrum
                .frequencies(a)
                .iter()
                .map(|xi| Complex64::new(if xi.abs() <= b[a] { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    spectrum.apply_separable(&factors);
    real_inverse(&spectrum, u)
}

/// Relative distance `||u - bandlimit(u, b)||_inf / ||u||_inf`.
pub fn band_excess(u: &GridFunction, b: &[f64]) -> Result<f64> {
    let v = bandlimit(u, b)?;
    let diff = u
        .values()
        .iter()
        .zip(v.values())
        .fold(0.0, |m: f64, (a, c)| m.max((a - c).abs()));
    Ok(diff / u.sup_norm().max(f64::MIN_POSITIVE))
}

const BAND_TOLERANCE: f64 = 1e-8;

fn require_bandlimited(u: &GridFunction, b: &[f64]) -> Result<()> {
    let excess = band_excess(u, b)?;
    if excess > BAND_TOLERANCE {
        return Err(invalid(
            "u",
            format!("not band-limited to {b:?}: relative excess {excess:e}"),
        ));
    }
    Ok(())
}

pub const DEFAULT_MAX_DERIVATIVE: u32 = 4;

/// `D^alpha u` by multiplying the spectrum with `(i xi)^alpha`. Odd orders
/// vanish on the Nyquist bin.
pub fn spectral_derivative(u: &GridFunction, alpha: &[u32]) -> Result<GridFunction> {
    spectral_derivative_with(u, alpha, DEFAULT_MAX_DERIVATIVE)
}

pub fn spectral_derivative_with(u: &GridFunction, alpha: &[u32], max_order: u32) -> Result<GridFunction> {
    if alpha.len() != u.dim() {
        return Err(invalid("alpha", "one order per axis required"));
    }
    if let Some(&a) = alpha.iter().find(|&&a| a > max_order) {
        return Err(invalid("alpha", format!("order {a} exceeds the maximum {max_order}")));
    }
    if alpha.iter().all(|&a| a == 0) {
        return Ok(u.clone());
    }
    let mut spectrum = Spectrum::forward(u);
    let factors: Vec<Vec<Complex64>> = (0..u.dim())
        .map(|a| {
            let n = u.shape()[a];
            spectrum
                .frequencies(a)
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
    spectrum.apply_separable(&factors);
    let (re, _) = spectrum.inverse_parts();
    u.replace_values(re)
}

/// `||D^alpha u||_p / (prod_i b_i^{alpha_i + 1/p0 - 1/p} ||u||_p0)` for `u`
/// band-limited to `prod [-b_i, b_i]`.
pub fn nikolskij_ratio(u: &GridFunction, alpha: &[u32], p0: f64, p: f64, b: &[f64]) -> Result<f64> {
    check_exponent("p0", p0)?;
    check_exponent("p", p)?;
    if p0 > p {
        return Err(invalid("p0", format!("need p0 <= p, got {p0} > {p}")));
    }
    require_bandlimited(u, b)?;
    let base = u.lp_norm(p0)?;
    if base == 0.0 {
        return Err(Error::ZeroNorm("||u||_p0"));
    }
    let deriv = spectral_derivative(u, alpha)?;
    let scale: f64 = alpha
        .iter()
        .zip(b)
        .map(|(&a, &bi)| bi.powf(a as f64 + 1.0 / p0 - 1.0 / p))
        .product();
    Ok(deriv.lp_norm(p)? / (scale * base))
}

/// Peetre maximal function `sup_z |u(x - z)| / prod (1 + |b_i z_i|)^a`, with
/// `z` ranging over whole-cell offsets inside the box (one period for
/// periodic data). The supremum factorizes over axes because the weight does.
pub fn peetre_maximal(u: &GridFunction, b: &[f64], a: f64) -> Result<GridFunction> {
    if !(a > 0.0) {
        return Err(invalid("a", format!("exponent must be positive, got {a}")));
    }
    require_bandlimited(u, b)?;
    Ok(peetre_unchecked(u, b, a))
}

fn peetre_unchecked(u: &GridFunction, b: &[f64], a: f64) -> GridFunction {
    let periodic = u.extension() == crate::grid::Extension::Periodic;
    let mut cur: Vec<f64> = u.values().iter().map(|v| v.abs()).collect();
    let shape = u.shape().to_vec();
    for axis in 0..u.dim() {
        let n = shape[axis];
        let dx = u.spacing(axis);
        let stride: usize = shape[axis + 1..].iter().product();
        let (zmin, zmax) = if periodic {
            (-((n as i64 - 1) / 2), n as i64 / 2)
        } else {
            (-(n as i64 - 1), n as i64 - 1)
        };
        // offsets ordered by |z| so the scan can stop once the weight times the
        // lane maximum cannot beat the current best
        let mut offsets: Vec<i64> = (zmin..=zmax).collect();
        offsets.sort_by_key(|z| (z.abs(), *z));
        let weights: Vec<f64> = offsets
            .iter()
            .map(|&z| (1.0 + (b[axis] * z as f64 * dx).abs()).powf(-a))
            .collect();
        let mut next = vec![0.0; cur.len()];
        let mut lane = vec![0.0; n];
        for start in crate::grid::lane_starts(&shape, axis) {
            for (k, slot) in lane.iter_mut().enumerate() {
                *slot = cur[start + k * stride];
            }
            let top = lane.iter().fold(0.0, |m: f64, &v| m.max(v));
            for i in 0..n {
                let mut best: f64 = 0.0;
                for (&w, &z) in weights.iter().zip(&offsets) {
                    if w * top <= best {
                        break;
                    }
                    let j = i as i64 - z;
                    let j = if periodic {
                        j.rem_euclid(n as i64)
                    } else if j < 0 || j >= n as i64 {
                        continue;
                    } else {
                        j
                    };
                    best = best.max(w * lane[j as usize]);
                }
                next[start + i * stride] = best;
            }
        }
        cur = next;
    }
    u.with_values(cur)
}

/// Largest `|Delta_h^{m,e} u(x)| / (prod_{i in e} max(1, |b_i h_i|^a) min(1, |b_i h_i|^{m_i}) P_{b,a} u(x))`
/// over the nodes, with steps snapped to the grid.
pub fn difference_maximal_check(
    u: &GridFunction,
    e: DirectionSet,
    m: &MixedOrder,
    h: &[f64],
    b: &[f64],
    a: f64,
) -> Result<f64> {
    let maximal = peetre_maximal(u, b, a)?;
    let diff = mixed_difference(u, e, m, h)?;
    if diff.degenerate {
        return Ok(0.0);
    }
    let steps = diff.steps();
    let factor: f64 = e
        .axes()
        .map(|i| {
            let bh = (b[i] * steps[i]).abs();
            bh.powf(a).max(1.0) * bh.powi(m.get(i) as i32).min(1.0)
        })
        .product();
    let mut worst: f64 = 0.0;
    for (pos, (&dv, &pv)) in diff.function.values().iter().zip(maximal.values()).enumerate() {
        let num = dv.abs();
        if pv == 0.0 {
            if num > 0.0 {
                return Err(Error::NumericalAnomaly(format!(
                    "maximal function vanishes at node {:?} where the difference is {num:e}",
                    u.node(&u.unravel(pos))
                )));
            }
            continue;
        }
        worst = worst.max(num / (factor * pv));
    }
    Ok(worst)
}
