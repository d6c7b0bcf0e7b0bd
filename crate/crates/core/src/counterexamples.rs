//! Explicit test families with known scaling and slope fitting.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::{Extension, GridBox, GridFunction};
use crate::profile::{cubic_step, smoothed_indicator};
use crate::tensor::TensorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    DilatedBump,
    OscillatoryLinear,
    OscillatorySmooth,
    TensorPair,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dilated" => Ok(FamilyKind::DilatedBump),
            "oscillatory" | "oscillatory-linear" => Ok(FamilyKind::OscillatoryLinear),
            "oscillatory-smooth" => Ok(FamilyKind::OscillatorySmooth),
            "tensor" => Ok(FamilyKind::TensorPair),
            other => Err(invalid("family", format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ramp {
    Linear,
    Smooth,
}

/// Uniform one-dimensional grid shared by every member of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyGrid {
    pub lower: f64,
    pub upper: f64,
    pub resolution: usize,
}

impl FamilyGrid {
    pub fn new(lower: f64, upper: f64, resolution: usize) -> Result<Self> {
        GridBox::new(vec![lower], vec![upper])?;
        if resolution == 0 {
            return Err(invalid("resolution", "must be positive"));
        }
        Ok(FamilyGrid { lower, upper, resolution })
    }

    /// `[-4, 4]` at `2^16` samples: room for the base bump and a companion of
    /// plateau 2.
    pub fn dilated_default() -> Self {
        FamilyGrid { lower: -4.0, upper: 4.0, resolution: 1 << 16 }
    }

    /// `[-1, 3]` at `2^15` samples, enough for `n <= 6` at `eps = 1.6`.
    pub fn oscillatory_default() -> Self {
        FamilyGrid { lower: -1.0, upper: 3.0, resolution: 1 << 15 }
    }

    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / self.resolution as f64
    }

    fn domain(&self) -> GridBox {
        GridBox::new(vec![self.lower], vec![self.upper]).expect("validated on construction")
    }

    fn sample(&self, f: impl Fn(f64) -> f64 + Sync) -> Result<GridFunction> {
        GridFunction::sample(|x| f(x[0]), self.domain(), vec![self.resolution], Extension::Zero)
    }
}

#[derive(Clone, Debug)]
pub struct TestFamily {
    pub kind: FamilyKind,
    pub epsilon: Option<f64>,
    pub grid: FamilyGrid,
    /// `(n, f_n)` in increasing `n`.
    pub members: Vec<(u32, GridFunction)>,
    /// Set when the requested range had to be shortened.
    pub report: Option<String>,
    /// Closed interval containing every member's support.
    pub support: (f64, f64),
}

impl TestFamily {
    pub fn member(&self, n: u32) -> Option<&GridFunction> {
        self.members.iter().find(|(k, _)| *k == n).map(|(_, f)| f)
    }

    pub fn indices(&self) -> Vec<u32> {
        self.members.iter().map(|(n, _)| *n).collect()
    }
}

/// Base profile: 1 on `[-1, 1]`, supported in `[-2, 2]`.
pub fn dilated_base(t: f64) -> f64 {
    smoothed_indicator(t, 1.0, 2.0)
}

/// `f_n(t) = f(2^n t)` for `n = 0..=n_max`.
pub fn dilated_family(n_max: u32, grid: &FamilyGrid) -> Result<TestFamily> {
    let width = 4.0 * 2f64.powi(-(n_max as i32));
    if width / grid.spacing() < 16.0 {
        return Err(Error::TooCoarse(format!(
            "support of member {n_max} spans {:.2} cells, need 16",
            width / grid.spacing()
        )));
    }
    if grid.lower > -2.0 || grid.upper < 2.0 {
        return Err(invalid("box", "must contain [-2, 2]"));
    }
    let members = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let s = 2f64.powi(n as i32);
            grid.sample(|t| dilated_base(s * t)).map(|f| (n, f))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TestFamily {
        kind: FamilyKind::DilatedBump,
        epsilon: None,
        grid: grid.clone(),
        members,
        report: None,
        support: (-2.0, 2.0),
    })
}

/// Cutoff `phi_n`: rises on `[1/(2n), 1/n]`, equals 1 on `[1/n, 1]` and falls
/// on `[1, 3/2]`.
pub fn ramp_profile(n: u32, ramp: Ramp, t: f64) -> f64 {
    let a = 0.5 / n as f64;
    let b = 1.0 / n as f64;
    if t <= a || t >= 1.5 {
        return 0.0;
    }
    let (rise, fall) = match ramp {
        Ramp::Linear => ((t - a) / (b - a), 2.0 * (1.5 - t)),
        Ramp::Smooth => (cubic_step((t - a) / (b - a)), cubic_step(2.0 * (1.5 - t))),
    };
    if t < b {
        rise
    } else if t <= 1.0 {
        1.0
    } else {
        fall
    }
}

/// `phi_n(t) t sin(t^-eps)` for `t > 0`, zero elsewhere.
pub fn oscillatory_value(n: u32, eps: f64, ramp: Ramp, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let phi = ramp_profile(n, ramp, t);
    if phi == 0.0 {
        0.0
    } else {
        phi * t * t.powf(-eps).sin()
    }
}

/// Largest spacing that resolves the oscillation at `t = 1/(2n)`.
pub fn oscillatory_spacing_bound(n: u32, eps: f64) -> f64 {
    (0.5 / n as f64).powf(1.0 + eps) / 8.0
}

/// Advisory for exponents outside the intended range `eps > 1/p`,
/// `eps != 1 + 1/p`.
pub fn epsilon_warning(eps: f64, p: f64) -> Option<String> {
    if eps <= 1.0 / p {
        Some(format!("eps = {eps} does not exceed 1/p = {}", 1.0 / p))
    } else if (eps - 1.0 - 1.0 / p).abs() < 1e-12 {
        Some(format!("eps = {eps} equals the excluded value 1 + 1/p"))
    } else {
        None
    }
}

/// Members `n = 1..=n_max`, truncated to the largest `n` the grid resolves.
pub fn oscillatory_family(n_max: u32, eps: f64, ramp: Ramp, grid: &FamilyGrid) -> Result<TestFamily> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    if n_max == 0 {
        return Err(invalid("n_max", "need at least one member"));
    }
    if grid.lower > 0.0 || grid.upper < 1.5 {
        return Err(invalid("box", "must contain [0, 3/2]"));
    }
    let dx = grid.spacing();
    let resolved = (1..=n_max).take_while(|&n| dx <= oscillatory_spacing_bound(n, eps)).last();
    let top = resolved.ok_or_else(|| {
        Error::TooCoarse(format!(
            "spacing {dx:e} exceeds {:e} needed for n = 1",
            oscillatory_spacing_bound(1, eps)
        ))
    })?;
    let report = (top < n_max).then(|| format!("n_max reduced from {n_max} to {top} by the resolution bound"));
    let members = (1..=top)
        .into_par_iter()
        .map(|n| grid.sample(|t| oscillatory_value(n, eps, ramp, t)).map(|f| (n, f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TestFamily {
        kind: match ramp {
            Ramp::Linear => FamilyKind::OscillatoryLinear,
            Ramp::Smooth => FamilyKind::OscillatorySmooth,
        },
        epsilon: Some(eps),
        grid: grid.clone(),
        members,
        report,
        support: (0.0, 1.5),
    })
}

#[derive(Clone, Debug)]
pub struct PairFamily {
    pub base: FamilyKind,
    pub dim: usize,
    pub companion: GridFunction,
    /// `(n, F_n, G_n)`.
    pub pairs: Vec<(u32, TensorField, TensorField)>,
}

/// `F_n = f_n (x) g (x) ..`, `G_n = g (x) f_n (x) g ..` with a companion `g`
/// centred on the family support, plateau half-width `companion_width` and
/// transition of the same length.
pub fn tensor_pair_family(base: &TestFamily, d: usize, companion_width: f64) -> Result<PairFamily> {
    if !(2..=3).contains(&d) {
        return Err(invalid("d", format!("tensor pairs need d in {{2, 3}}, got {d}")));
    }
    if !(companion_width > 0.0) {
        return Err(invalid("companion_width", "must be positive"));
    }
    let centre = 0.5 * (base.support.0 + base.support.1);
    let g = base
        .grid
        .sample(|t| smoothed_indicator(t - centre, companion_width, 2.0 * companion_width))?;
    for (n, f) in &base.members {
        if f.pointwise_multiply(&g)? != *f {
            return Err(invalid(
                "companion_width",
                format!("plateau does not cover the support of member {n}"),
            ));
        }
    }
    let pairs = base
        .members
        .iter()
        .map(|(n, f)| {
            let mut first = vec![f.clone(), g.clone()];
            let mut second = vec![g.clone(), f.clone()];
            first.resize(d, g.clone());
            second.resize(d, g.clone());
            Ok((*n, TensorField::new(first)?, TensorField::new(second)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PairFamily {
        base: base.kind,
        dim: d,
        companion: g,
        pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateModel {
    /// `value ~ 2^{c n}`.
    Geometric,
    /// `value ~ n^c`.
    Power,
}

impl std::str::FromStr for RateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(RateModel::Geometric),
            "power" => Ok(RateModel::Power),
            other => Err(invalid("model", format!("unknown rate model `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of the fitted line in log space.
    pub residual: f64,
}

/// Least-squares slope of `log2 value` against `n` (geometric) or of
/// `ln value` against `ln n` (power).
pub fn rate_fit(series: &[(f64, f64)], model: RateModel) -> Result<RateFit> {
    if series.len() < 4 {
        return Err(invalid("series", format!("need at least 4 points, got {}", series.len())));
    }
    if let Some((n, v)) = series.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(invalid("series", format!("value {v} at n = {n} is not positive")));
    }
    let points: Vec<(f64, f64)> = match model {
        RateModel::Geometric => series.iter().map(|&(n, v)| (n, v.log2())).collect(),
        RateModel::Power => {
            if series.iter().any(|&(n, _)| n <= 0.0) {
                return Err(invalid("series", "power model needs positive indices"));
            }
            series.iter().map(|&(n, v)| (n.ln(), v.ln())).collect()
        }
    };
    let count = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / count;
    let my = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("series", "indices must not all coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(RateFit { slope, intercept, residual })
}
