//! Mixed differences, moduli of smoothness and the difference characterizations
//! of Besov norms of dominating mixed smoothness.
//!
//! Steps are snapped to whole grid cells. The supremum over steps `|h_i| < t_i`
//! is replaced by a maximum over a fixed probe set per scale (see
//! [`probe_cells`]). Only positive steps are probed: on the line (and on the
//! torus) `||Delta_{-h}^m f||_p = ||Delta_h^m f||_p`, since the two differ by a
//! translation.

use rayon::prelude::*;

use crate::error::{check_exponent, invalid, Error, Result};
use crate::grid::{lp_norm_of, pairwise_sum, Extension, GridFunction};
use crate::spectral::Spectrum;

/// A subset `e` of the axes `{0, .., d-1}`, stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectionSet(u8);

impl DirectionSet {
    pub const EMPTY: DirectionSet = DirectionSet(0);

    pub fn from_axes(axes: &[usize]) -> Result<Self> {
        let mut bits = 0u8;
        for &a in axes {
            if a >= crate::grid::MAX_DIM {
                return Err(invalid("e", format!("axis {a} out of range")));
            }
            bits |= 1 << a;
        }
        Ok(DirectionSet(bits))
    }

    pub fn full(d: usize) -> Self {
        DirectionSet(((1u16 << d) - 1) as u8)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, axis: usize) -> bool {
        axis < 8 && self.0 & (1 << axis) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Axes in ascending order.
    pub fn axes(self) -> impl Iterator<Item = usize> {
        (0..8).filter(move |&a| self.contains(a))
    }

    /// All `2^d` subsets of `{0, .., d-1}`, in bitmask order.
    pub fn subsets(d: usize) -> impl Iterator<Item = DirectionSet> {
        (0..(1u16 << d)).map(|b| DirectionSet(b as u8))
    }

    fn check_dim(self, d: usize) -> Result<()> {
        if self.0 >> d != 0 {
            return Err(invalid("e", format!("{:#b} is not a subset of {d} axes", self.0)));
        }
        Ok(())
    }
}

/// Per-axis difference orders `m = (m_0, .., m_{d-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedOrder(Vec<u32>);

impl MixedOrder {
    pub fn new(m: Vec<u32>) -> Self {
        MixedOrder(m)
    }

    /// The constant vector `(m, .., m)`.
    pub fn uniform(d: usize, m: u32) -> Self {
        MixedOrder(vec![m; d])
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    fn check(&self, d: usize, e: DirectionSet) -> Result<()> {
        if self.0.len() != d {
            return Err(invalid("m", "one order per axis required"));
        }
        if e.axes().any(|a| self.0[a] == 0) {
            return Err(invalid("m", "orders along the directions of e must be at least 1"));
        }
        Ok(())
    }
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(-1)^(m-l) C(m, l)` for `l = 0..=m`.
fn difference_coefficients(order: u32) -> Vec<f64> {
    (0..=order)
        .map(|l| {
            let sign = if (order - l) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(order, l)
        })
        .collect()
}

/// `x -> sum_l (-1)^(order-l) C(order, l) u(x + (offset + l*cells) e_axis)`, in cells.
/// `order = 0` is a pure translation by `offset`.
pub(crate) fn apply_axis(u: &GridFunction, axis: usize, order: u32, cells: i64, offset: i64) -> GridFunction {
    let coeffs = difference_coefficients(order);
    let shape = u.shape();
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let periodic = u.extension() == Extension::Periodic;
    let src = u.values();
    let mut out = vec![0.0; src.len()];
    for o in 0..outer {
        let base = o * n * inner;
        for i in 0..n {
            let dst = &mut out[base + i * inner..base + (i + 1) * inner];
            for (l, &c) in coeffs.iter().enumerate() {
                let j = i as i64 + offset + l as i64 * cells;
                let j = if periodic {
                    j.rem_euclid(n as i64) as usize
                } else if j < 0 || j >= n as i64 {
                    continue;
                } else {
                    j as usize
                };
                let row = &src[base + j * inner..base + (j + 1) * inner];
                for (d, s) in dst.iter_mut().zip(row) {
                    *d += c * s;
                }
            }
        }
    }
    u.with_values(out)
}

fn snap(u: &GridFunction, axis: usize, h: f64) -> i64 {
    (h / u.spacing(axis)).round() as i64
}

/// Result of a difference with snapped steps.
#[derive(Clone, Debug)]
pub struct Difference {
    pub function: GridFunction,
    /// Snapped step per axis in cells (0 on axes outside the direction set).
    pub cells: Vec<i64>,
    /// Some step in the direction set snapped to zero cells.
    pub degenerate: bool,
}

impl Difference {
    pub fn steps(&self) -> Vec<f64> {
        self.cells
            .iter()
            .enumerate()
            .map(|(a, &c)| c as f64 * self.function.spacing(a))
            .collect()
    }
}

/// `m`-th order difference of `u` along `axis` with step `h` (snapped to cells).
pub fn directional_difference(u: &GridFunction, axis: usize, m: u32, h: f64) -> Result<Difference> {
    if axis >= u.dim() {
        return Err(invalid("axis", format!("{axis} out of range for {} axes", u.dim())));
    }
    if m == 0 {
        return Err(invalid("m", "difference order must be at least 1"));
    }
    if !h.is_finite() {
        return Err(invalid("h", "step must be finite"));
    }
    let c = snap(u, axis, h);
    let mut cells = vec![0; u.dim()];
    cells[axis] = c;
    if c == 0 {
        return Ok(Difference {
            function: u.with_values(vec![0.0; u.len()]),
            cells,
            degenerate: true,
        });
    }
    Ok(Difference {
        function: apply_axis(u, axis, m, c, 0),
        cells,
        degenerate: false,
    })
}

/// `Delta_h^{m,e} u`, composed over the axes of `e` in ascending order;
/// `e = {}` returns `u`.
pub fn mixed_difference(u: &GridFunction, e: DirectionSet, m: &MixedOrder, h: &[f64]) -> Result<Difference> {
    e.check_dim(u.dim())?;
    m.check(u.dim(), e)?;
    if h.len() != u.dim() {
        return Err(invalid("h", "one step per axis required"));
    }
    let mut cells = vec![0; u.dim()];
    for a in e.axes() {
        if !h[a].is_finite() {
            return Err(invalid("h", "step must be finite"));
        }
        cells[a] = snap(u, a, h[a]);
    }
    if e.axes().any(|a| cells[a] == 0) {
        return Ok(Difference {
            function: u.with_values(vec![0.0; u.len()]),
            cells,
            degenerate: true,
        });
    }
    Ok(Difference {
        function: mixed_difference_cells(u, e, m.as_slice(), &cells),
        cells,
        degenerate: false,
    })
}

fn mixed_difference_cells(u: &GridFunction, e: DirectionSet, m: &[u32], cells: &[i64]) -> GridFunction {
    let mut axes = e.axes();
    let Some(first) = axes.next() else {
        return u.clone();
    };
    let mut out = apply_axis(u, first, m[first], cells[first], 0);
    for a in axes {
        out = apply_axis(&out, a, m[a], cells[a], 0);
    }
    out
}

/// Positive probe steps (in cells) standing in for the supremum over
/// `0 < h < t`: `c*t` for `c in {1/4, 1/2, 3/4, 1}` snapped to the nearest
/// cell, plus the largest whole-cell step strictly below `t`.
pub fn probe_cells(t: f64, dx: f64) -> Vec<i64> {
    let ratio = t / dx;
    let mut cells: Vec<i64> = [0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|c| (c * ratio).round() as i64)
        .collect();
    let below = if (ratio - ratio.round()).abs() < 1e-9 {
        ratio.round() as i64 - 1
    } else {
        ratio.floor() as i64
    };
    cells.push(below);
    cells.retain(|&c| c > 0);
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// Value of a modulus of smoothness at one scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Modulus {
    pub value: f64,
    /// The probe set was empty on some axis (scale below one cell).
    pub degenerate: bool,
}

/// `omega_m^e(u, t)_p`: the largest `||Delta_h^{m,e} u||_p` over the probe steps of `t`.
pub fn modulus(u: &GridFunction, e: DirectionSet, m: &MixedOrder, t: &[f64], p: f64) -> Result<Modulus> {
    check_exponent("p", p)?;
    e.check_dim(u.dim())?;
    m.check(u.dim(), e)?;
    if t.len() != u.dim() {
        return Err(invalid("t", "one scale per axis required"));
    }
    if e.is_empty() {
        return Ok(Modulus {
            value: u.lp_norm(p)?,
            degenerate: false,
        });
    }
    let mut probes = vec![Vec::new(); u.dim()];
    for a in e.axes() {
        if !(t[a] > 0.0 && t[a] <= 1.0) {
            return Err(invalid("t", format!("scale {} on axis {a} outside (0, 1]", t[a])));
        }
        probes[a] = probe_cells(t[a], u.spacing(a));
        if probes[a].is_empty() {
            return Ok(Modulus {
                value: 0.0,
                degenerate: true,
            });
        }
    }
    let table = norm_table(u, e, m.as_slice(), &probes, p, Route::Direct)?;
    Ok(Modulus {
        value: table.iter().fold(0.0, |acc: f64, &v| acc.max(v)),
        degenerate: false,
    })
}

/// How `||Delta_h^{m,e} u||_p` is evaluated over a batch of steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    /// Parseval when it is exact for the input, stencils otherwise.
    #[default]
    Auto,
    /// Explicit stencils on the grid.
    Direct,
    /// `p = 2` only: weights `|e^{i xi h} - 1|^{2m}` on the discrete spectrum.
    /// Exact for periodic data, and for zero extension when the support
    /// clears the largest stencil reach from the lower edge.
    Parseval,
}

/// Norms `||Delta_h^{m,e} u||_p` for every combination of per-axis probes
/// (`probes[a]` for `a` in `e`), row-major over the axes of `e`.
fn norm_table(
    u: &GridFunction,
    e: DirectionSet,
    m: &[u32],
    probes: &[Vec<i64>],
    p: f64,
    route: Route,
) -> Result<Vec<f64>> {
    let parseval_exact = p == 2.0 && parseval_is_exact(u, e, m, probes);
    let use_parseval = match route {
        Route::Auto => parseval_exact,
        Route::Direct => false,
        Route::Parseval if parseval_exact => true,
        Route::Parseval => {
            return Err(invalid(
                "route",
                "Parseval evaluation needs p = 2 and periodic data or a clear lower margin",
            ))
        }
    };
    if use_parseval {
        Ok(parseval_table(u, e, m, probes))
    } else {
        Ok(direct_table(u, e, m, probes, p))
    }
}

fn parseval_is_exact(u: &GridFunction, e: DirectionSet, m: &[u32], probes: &[Vec<i64>]) -> bool {
    match u.extension() {
        Extension::Periodic => true,
        Extension::Zero => e.axes().all(|a| {
            let reach = m[a] as i64 * probes[a].iter().copied().max().unwrap_or(0);
            match u.support_indices(a) {
                None => true,
                Some((first, _)) => first as i64 >= reach && reach < u.shape()[a] as i64,
            }
        }),
    }
}

fn direct_table(u: &GridFunction, e: DirectionSet, m: &[u32], probes: &[Vec<i64>], p: f64) -> Vec<f64> {
    let axes: Vec<usize> = e.axes().collect();
    let vol = u.cell_volume();
    fn recurse(f: &GridFunction, rest: &[usize], m: &[u32], probes: &[Vec<i64>], p: f64, vol: f64, out: &mut Vec<f64>) {
        match rest.split_first() {
            None => out.push(lp_norm_of(f.values(), vol, p)),
            Some((&a, tail)) => {
                for &c in &probes[a] {
                    let g = apply_axis(f, a, m[a], c, 0);
                    recurse(&g, tail, m, probes, p, vol, out);
                }
            }
        }
    }
    let Some((&first, tail)) = axes.split_first() else {
        return vec![lp_norm_of(u.values(), vol, p)];
    };
    let parts: Vec<Vec<f64>> = probes[first]
        .par_iter()
        .map(|&c| {
            let g = apply_axis(u, first, m[first], c, 0);
            let mut out = Vec::new();
            recurse(&g, tail, m, probes, p, vol, &mut out);
            out
        })
        .collect();
    parts.concat()
}

fn parseval_table(u: &GridFunction, e: DirectionSet, m: &[u32], probes: &[Vec<i64>]) -> Vec<f64> {
    let spectrum = Spectrum::forward(&u.with_extension(Extension::Periodic));
    let power = spectrum.power();
    let mats: Vec<Option<(Vec<f64>, usize)>> = (0..u.dim())
        .map(|a| {
            if !e.contains(a) {
                return None;
            }
            let n = u.shape()[a];
            let cols = probes[a].len();
            let mut w = vec![0.0; n * cols];
            for j in 0..n {
                for (k, &c) in probes[a].iter().enumerate() {
                    let s = (std::f64::consts::PI * j as f64 * c as f64 / n as f64).sin();
                    w[j * cols + k] = (4.0 * s * s).powi(m[a] as i32);
                }
            }
            Some((w, cols))
        })
        .collect();
    let refs: Vec<Option<(&[f64], usize)>> = mats
        .iter()
        .map(|o| o.as_ref().map(|(w, c)| (w.as_slice(), *c)))
        .collect();
    let (t, _) = crate::spectral::contract(&power, u.shape(), &refs);
    let vol = u.cell_volume();
    t.iter().map(|&s| (s.max(0.0) * vol).sqrt()).collect()
}

/// Parameters of the difference characterizations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovParams {
    pub r: f64,
    pub p: f64,
    /// Difference order, must exceed `r`.
    pub m_diff: u32,
    /// Largest scale; dyadic levels are `2^-k * t_max`.
    pub t_max: f64,
    pub route: Route,
}

impl BesovParams {
    pub fn new(r: f64, p: f64, m_diff: u32) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("r", format!("smoothness must be positive, got {r}")));
        }
        check_exponent("p", p)?;
        if (m_diff as f64) <= r {
            return Err(invalid("m_diff", format!("difference order {m_diff} must exceed r = {r}")));
        }
        Ok(BesovParams {
            r,
            p,
            m_diff,
            t_max: 1.0,
            route: Route::Auto,
        })
    }

    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }
}

/// Finest dyadic level per axis: `floor(log2(t_max/dx)) - 1`, so the finest
/// scale spans at least two cells.
pub fn dyadic_levels(u: &GridFunction, t_max: f64) -> Result<Vec<u32>> {
    (0..u.dim())
        .map(|a| {
            let k = (t_max / u.spacing(a)).log2().floor() - 1.0;
            if k < 2.0 {
                return Err(Error::TooCoarse(format!(
                    "axis {a} resolves only {} dyadic levels below t_max = {t_max}",
                    k.max(-1.0) + 1.0
                )));
            }
            Ok(k as u32)
        })
        .collect()
}

/// Row-major multi-indices over the axes of `e` with `0 <= k_a <= levels[a]`.
fn level_indices(e: DirectionSet, levels: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; levels.len()]];
    for a in e.axes() {
        out = out
            .into_iter()
            .flat_map(|k| {
                (0..=levels[a]).map(move |v| {
                    let mut k = k.clone();
                    k[a] = v;
                    k
                })
            })
            .collect();
    }
    out
}

/// Aggregates `(weight * value)` over levels: `l_p` sum, or max for `p = inf`.
fn lp_aggregate(terms: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        terms.iter().fold(0.0, |m: f64, &t| m.max(t))
    } else {
        let powered: Vec<f64> = terms.iter().map(|t| t.powf(p)).collect();
        pairwise_sum(&powered).powf(1.0 / p)
    }
}

/// The per-direction-set contributions of the difference norm, in bitmask order.
pub fn besov_terms(u: &GridFunction, params: &BesovParams) -> Result<Vec<(DirectionSet, f64)>> {
    let levels = dyadic_levels(u, params.t_max)?;
    let d = u.dim();
    let m = vec![params.m_diff; d];
    // probe sets per axis and level, flattened
    let mut flat: Vec<Vec<i64>> = vec![Vec::new(); d];
    let mut slots: Vec<Vec<Vec<usize>>> = vec![Vec::new(); d];
    for a in 0..d {
        for k in 0..=levels[a] {
            let t = params.t_max * 2f64.powi(-(k as i32));
            let mut idx = Vec::new();
            for c in probe_cells(t, u.spacing(a)) {
                let pos = match flat[a].iter().position(|&x| x == c) {
                    Some(pos) => pos,
                    None => {
                        flat[a].push(c);
                        flat[a].len() - 1
                    }
                };
                idx.push(pos);
            }
            slots[a].push(idx);
        }
    }
    let mut out = Vec::with_capacity(1 << d);
    for e in DirectionSet::subsets(d) {
        if e.is_empty() {
            out.push((e, u.lp_norm(params.p)?));
            continue;
        }
        let table = norm_table(u, e, &m, &flat, params.p, params.route)?;
        let e_axes: Vec<usize> = e.axes().collect();
        let terms: Vec<f64> = level_indices(e, &levels)
            .into_iter()
            .map(|k| {
                let omega = max_over_probes(&table, &e_axes, &flat, &slots, &k);
                let weight = 2f64.powf(params.r * k.iter().sum::<u32>() as f64);
                weight * omega
            })
            .collect();
        out.push((e, lp_aggregate(&terms, params.p)));
    }
    Ok(out)
}

fn max_over_probes(table: &[f64], e_axes: &[usize], flat: &[Vec<i64>], slots: &[Vec<Vec<usize>>], k: &[u32]) -> f64 {
    // enumerate the Cartesian product of probe slots for this level multi-index
    let mut best: f64 = 0.0;
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some((depth, offset)) = stack.pop() {
        if depth == e_axes.len() {
            best = best.max(table[offset]);
            continue;
        }
        let a = e_axes[depth];
        let width: usize = e_axes[depth + 1..].iter().map(|&b| flat[b].len()).product();
        for &s in &slots[a][k[a] as usize] {
            stack.push((depth + 1, offset + s * width));
        }
    }
    best
}

/// Difference norm of dominating mixed smoothness:
/// `sum_e (sum_k 2^{r|k|_1 p} omega_{m}^e(u, 2^{-k})_p^p)^{1/p}`, truncated at
/// the finest resolvable level per axis (max over `k` for `p = inf`).
pub fn besov_norm_diff(u: &GridFunction, r: f64, p: f64, m_diff: u32) -> Result<f64> {
    besov_norm_diff_with(u, &BesovParams::new(r, p, m_diff)?)
}

pub fn besov_norm_diff_with(u: &GridFunction, params: &BesovParams) -> Result<f64> {
    Ok(besov_terms(u, params)?.iter().map(|(_, v)| v).sum())
}

/// One-dimensional Besov norm `||u||_p + (sum_j (2^{jr} omega_m(u, 2^{-j}))^p)^{1/p}`.
pub fn isotropic_besov_norm(u: &GridFunction, r: f64, p: f64, m_diff: u32) -> Result<f64> {
    if u.dim() != 1 {
        return Err(invalid("u", "isotropic norm takes a 1-d function"));
    }
    besov_norm_diff(u, r, p, m_diff)
}

/// Integral-form norm `||u||_p + sum_{e != {}} T_e` with
/// `T_e^p = int_{[-1,1]^|e|} prod |h_i|^{-rp} ||Delta_h^{m,e} u||_p^p prod dh_i/|h_i|`,
/// by the midpoint rule on the dyadic panels `[2^{-k-1}, 2^{-k}]` of each
/// axis (both signs folded into a factor 2 per axis).
pub fn besov_norm_integral(u: &GridFunction, r: f64, p: f64, m_diff: u32) -> Result<f64> {
    besov_norm_integral_with(u, &BesovParams::new(r, p, m_diff)?)
}

pub fn besov_norm_integral_with(u: &GridFunction, params: &BesovParams) -> Result<f64> {
    let levels = dyadic_levels(u, params.t_max)?;
    let d = u.dim();
    let m = vec![params.m_diff; d];
    let (r, p) = (params.r, params.p);
    let mut probes: Vec<Vec<i64>> = vec![Vec::new(); d];
    // per axis and panel: the factor multiplying ||Delta||^p (or ||Delta||_inf)
    let mut weights: Vec<Vec<f64>> = vec![Vec::new(); d];
    for a in 0..d {
        let dx = u.spacing(a);
        for k in 0..=levels[a] {
            let hi = params.t_max * 2f64.powi(-(k as i32));
            let cells = ((0.75 * hi) / dx).round().max(1.0) as i64;
            let h = cells as f64 * dx;
            probes[a].push(cells);
            weights[a].push(if p.is_infinite() {
                h.powf(-r)
            } else {
                2.0 * (0.5 * hi) * h.powf(-r * p - 1.0)
            });
        }
    }
    let mut total = u.lp_norm(p)?;
    for e in DirectionSet::subsets(d).filter(|e| !e.is_empty()) {
        let table = norm_table(u, e, &m, &probes, p, params.route)?;
        let terms: Vec<f64> = level_indices(e, &levels)
            .iter()
            .enumerate()
            .map(|(pos, k)| {
                let w: f64 = e.axes().map(|a| weights[a][k[a] as usize]).product();
                if p.is_infinite() {
                    w * table[pos]
                } else {
                    w * table[pos].powf(p)
                }
            })
            .collect();
        total += if p.is_infinite() {
            terms.iter().fold(0.0, |acc: f64, &t| acc.max(t))
        } else {
            pairwise_sum(&terms).powf(1.0 / p)
        };
    }
    Ok(total)
}

/// Right-hand side of the product rule for differences:
/// `sum_{j=0}^m C(m,j) Delta_h^{m-j} psi(. + j h) * Delta_h^j phi(.)` along `axis`.
pub fn leibniz_difference(psi: &GridFunction, phi: &GridFunction, m: u32, h: f64, axis: usize) -> Result<GridFunction> {
    psi.same_grid(phi)?;
    if axis >= psi.dim() {
        return Err(invalid("axis", format!("{axis} out of range for {} axes", psi.dim())));
    }
    if m == 0 {
        return Err(invalid("m", "difference order must be at least 1"));
    }
    let c = snap(psi, axis, h);
    let mut acc = vec![0.0; psi.len()];
    for j in 0..=m {
        let a = apply_axis(psi, axis, m - j, c, j as i64 * c);
        let b = apply_axis(phi, axis, j, c, 0);
        let w = binomial(m, j);
        for ((s, x), y) in acc.iter_mut().zip(a.values()).zip(b.values()) {
            *s += w * x * y;
        }
    }
    Ok(psi.with_values(acc))
}

/// Terms of the mixed product rule for `Delta_h^{2m,e}(f g)`: for every
/// `u` in `N_0^d(e)` with `|u|_inf <= 2m`, the function
/// `C(2m, u) Delta_h^{2m-u,e} f(. + u*h) Delta_h^{u,e} g(.)` where `u*h` is
/// the componentwise product and `C(2m, u) = prod_{i in e} C(2m, u_i)`.
/// Multi-indices are enumerated row-major over the axes of `e`.
pub fn mixed_leibniz_terms(
    f: &GridFunction,
    g: &GridFunction,
    e: DirectionSet,
    m: u32,
    h: &[f64],
) -> Result<Vec<(Vec<u32>, GridFunction)>> {
    f.same_grid(g)?;
    e.check_dim(f.dim())?;
    if h.len() != f.dim() {
        return Err(invalid("h", "one step per axis required"));
    }
    if m == 0 && !e.is_empty() {
        return Err(invalid("m", "difference order must be at least 1"));
    }
    let cells: Vec<i64> = (0..f.dim()).map(|a| snap(f, a, h[a])).collect();
    let terms = level_indices(e, &vec![2 * m; f.dim()])
        .into_iter()
        .map(|u| {
            let mut left = f.clone();
            let mut right = g.clone();
            let mut weight = 1.0;
            for a in e.axes() {
                left = apply_axis(&left, a, 2 * m - u[a], cells[a], u[a] as i64 * cells[a]);
                right = apply_axis(&right, a, u[a], cells[a], 0);
                weight *= binomial(2 * m, u[a]);
            }
            let values = left
                .values()
                .iter()
                .zip(right.values())
                .map(|(x, y)| weight * x * y)
                .collect();
            (u, f.with_values(values))
        })
        .collect();
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridBox;

    fn line(n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::sample(|x| f(x[0]), GridBox::cube(1, 0.0, 1.0).unwrap(), vec![n], Extension::Zero).unwrap()
    }

    #[test]
    fn first_difference_of_linear_is_constant() {
        let u = line(64, |x| x);
        let h = u.spacing(0);
        let d = directional_difference(&u, 0, 1, h).unwrap();
        for v in &d.function.values()[..63] {
            assert!((v - h).abs() < 1e-15);
        }
    }

    #[test]
    fn second_difference_of_square() {
        let u = line(128, |x| x * x);
        let h = 4.0 * u.spacing(0);
        let d = directional_difference(&u, 0, 2, h).unwrap();
        for v in &d.function.values()[..120] {
            assert!((v - 2.0 * h * h).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_step_is_degenerate() {
        let u = line(16, |x| x.sin());
        let d = directional_difference(&u, 0, 1, 0.0).unwrap();
        assert!(d.degenerate);
        assert!(d.function.values().iter().all(|&v| v == 0.0));
        let d = directional_difference(&u, 0, 1, 0.2 * u.spacing(0)).unwrap();
        assert!(d.degenerate);
    }

    #[test]
    fn empty_direction_set_is_identity() {
        let u = line(16, |x| x.cos());
        let d = mixed_difference(&u, DirectionSet::EMPTY, &MixedOrder::uniform(1, 2), &[0.3]).unwrap();
        assert_eq!(d.function, u);
        let w = modulus(&u, DirectionSet::EMPTY, &MixedOrder::uniform(1, 2), &[0.5], 2.0).unwrap();
        assert_eq!(w.value, u.lp_norm(2.0).unwrap());
    }

    #[test]
    fn probe_sets() {
        assert_eq!(probe_cells(1.0, 1.0 / 64.0), vec![16, 32, 48, 63, 64]);
        assert_eq!(probe_cells(2.0 / 64.0, 1.0 / 64.0), vec![1, 2]);
        assert!(probe_cells(0.1, 1.0).is_empty());
    }

    #[test]
    fn modulus_below_one_cell_is_degenerate() {
        let u = line(8, |x| x);
        let w = modulus(&u, DirectionSet::full(1), &MixedOrder::uniform(1, 1), &[0.01], 2.0).unwrap();
        assert_eq!(w, Modulus { value: 0.0, degenerate: true });
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(difference_coefficients(2), vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn besov_params_validation() {
        assert!(BesovParams::new(1.0, 2.0, 1).is_err());
        assert!(BesovParams::new(0.0, 2.0, 1).is_err());
        assert!(BesovParams::new(0.5, 0.5, 1).is_err());
        assert!(BesovParams::new(1.5, 2.0, 2).is_ok());
    }

    #[test]
    fn too_coarse_grid_rejected() {
        let u = line(4, |x| x);
        assert!(matches!(besov_norm_diff(&u, 0.5, 2.0, 1), Err(Error::TooCoarse(_))));
    }

    #[test]
    fn zero_function_norms_vanish() {
        let u = line(256, |_| 0.0);
        assert_eq!(besov_norm_diff(&u, 0.7, 2.0, 1).unwrap(), 0.0);
        assert_eq!(besov_norm_integral(&u, 0.7, 2.0, 1).unwrap(), 0.0);
        assert_eq!(isotropic_besov_norm(&u, 0.7, 2.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn leibniz_with_unit_factor_collapses() {
        let psi = line(64, |x| (5.0 * x).sin());
        let one = line(64, |_| 1.0).with_extension(Extension::Periodic);
        let psi = psi.with_extension(Extension::Periodic);
        let h = 3.0 * psi.spacing(0);
        let lhs = leibniz_difference(&psi, &one, 3, h, 0).unwrap();
        let rhs = directional_difference(&psi, 0, 3, h).unwrap().function;
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mixed_leibniz_term_count_and_empty_set() {
        let b = GridBox::cube(2, 0.0, 1.0).unwrap();
        let f = GridFunction::sample(|x| x[0] + x[1], b.clone(), vec![16, 16], Extension::Zero).unwrap();
        let g = GridFunction::sample(|x| x[0] * x[1], b, vec![16, 16], Extension::Zero).unwrap();
        let h = [2.0 / 16.0, 1.0 / 16.0];
        let terms = mixed_leibniz_terms(&f, &g, DirectionSet::full(2), 2, &h).unwrap();
        assert_eq!(terms.len(), 25);
        let single = mixed_leibniz_terms(&f, &g, DirectionSet::EMPTY, 2, &h).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].1, f.pointwise_multiply(&g).unwrap());
    }

    #[test]
    fn direct_and_parseval_routes_agree() {
        let b = GridBox::cube(2, 0.0, 1.0).unwrap();
        let u = GridFunction::sample(
            |x| (2.0 * std::f64::consts::PI * (3.0 * x[0] + x[1])).sin() + (6.0 * x[1]).cos() * x[0] * (1.0 - x[0]),
            b,
            vec![32, 32],
            Extension::Periodic,
        )
        .unwrap();
        let base = BesovParams::new(1.0, 2.0, 2).unwrap();
        let a = besov_norm_diff_with(&u, &base.with_route(Route::Direct)).unwrap();
        let c = besov_norm_diff_with(&u, &base.with_route(Route::Parseval)).unwrap();
        assert!((a - c).abs() < 1e-10 * a, "{a} vs {c}");
        let a = besov_norm_integral_with(&u, &base.with_route(Route::Direct)).unwrap();
        let c = besov_norm_integral_with(&u, &base.with_route(Route::Parseval)).unwrap();
        assert!((a - c).abs() < 1e-10 * a, "{a} vs {c}");
    }

    #[test]
    fn parseval_refused_without_margin() {
        let u = line(64, |x| x + 1.0);
        let params = BesovParams::new(0.5, 2.0, 1).unwrap().with_route(Route::Parseval);
        assert!(besov_norm_diff_with(&u, &params).is_err());
        let params = BesovParams::new(0.5, 3.0, 1).unwrap().with_route(Route::Parseval);
        assert!(besov_norm_diff_with(&u, &params).is_err());
    }
}
