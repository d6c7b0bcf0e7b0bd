//! The experiments a configuration can run and the tables they produce.

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use mixnorm::counterexamples::{
    dilated_family, epsilon_warning, oscillatory_family, rate_fit, tensor_pair_family, FamilyGrid, RateModel,
    TestFamily,
};
use mixnorm::differences::{besov_norm_diff, besov_norm_integral, DirectionSet, MixedOrder};
use mixnorm::fourier::{
    besov_norm_fourier, build_system, difference_maximal_check, nikolskij_ratio, peetre_maximal,
    sobolev_norm_fourier,
};
use mixnorm::multipliers::{algebra_ratio, build_partition, localization_ratio, moser_ratio, Field, Space};
use mixnorm::profile::bump;
use mixnorm::random::random_trig_family;
use mixnorm::sobolev::{mixed_sup_lp, sobolev_norm_full, sobolev_norm_reduced};
use mixnorm::{Extension, GridBox, GridFunction};

use crate::config::{ExperimentConfig, Family, SpaceKind, KEYS};
use crate::table::{read_csv, Table, Value};
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Norm,
    Equiv,
    Algebra,
    Moser,
    Localize,
    Nikolskij,
    Peetre,
    Trace,
    Embed,
    Report,
}

pub const ALL: [Experiment; 10] = [
    Experiment::Norm,
    Experiment::Equiv,
    Experiment::Algebra,
    Experiment::Moser,
    Experiment::Localize,
    Experiment::Nikolskij,
    Experiment::Peetre,
    Experiment::Trace,
    Experiment::Embed,
    Experiment::Report,
];

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        ALL.iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::validation("experiment", format!("unknown experiment `{s}`")))
    }
}

const COMMON: [&str; 4] = ["experiment", "params", "member", "n"];

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Norm => "norm",
            Experiment::Equiv => "equiv",
            Experiment::Algebra => "algebra",
            Experiment::Moser => "moser",
            Experiment::Localize => "localize",
            Experiment::Nikolskij => "nikolskij",
            Experiment::Peetre => "peetre",
            Experiment::Trace => "trace",
            Experiment::Embed => "embed",
            Experiment::Report => "report",
        }
    }

    fn summary(self) -> &'static str {
        match self {
            Experiment::Norm => "difference, Fourier and Sobolev norms of every family member",
            Experiment::Equiv => "ratios between equivalent norms on the random family",
            Experiment::Algebra => "||fg|| / (||f|| ||g||) over pairs, with a geometric fit for tensor pairs",
            Experiment::Moser => "||fg|| / (||f|| ||g||_inf + ||f||_inf ||g||), with a geometric fit for tensor pairs",
            Experiment::Localize => "whole norm over the lp-sum of partition-of-unity pieces",
            Experiment::Nikolskij => "Nikol'skij ratio across a sweep of band edges",
            Experiment::Peetre => "Peetre maximal function: Lp ratio and difference bound across bands and steps",
            Experiment::Trace => "mixed sup-Lp trace norm over the full Sobolev norm",
            Experiment::Embed => "||f||_inf / ||f||_space over a 1-d counterexample family, with a geometric fit",
            Experiment::Report => "rate fit of one column of an existing CSV table",
        }
    }

    /// Result columns after the common ones.
    pub fn value_columns(self) -> &'static [&'static str] {
        match self {
            Experiment::Norm => &["diff_norm", "fourier_norm", "sobolev_norm", "sup_norm", "lp_norm"],
            Experiment::Equiv => &[
                "diff_norm",
                "fourier_norm",
                "integral_norm",
                "sobolev_full",
                "sobolev_reduced",
                "sobolev_fourier",
                "diff_over_fourier",
                "diff_over_integral",
                "full_over_reduced",
                "full_over_fourier",
            ],
            Experiment::Algebra | Experiment::Moser => &["ratio", "fit_slope", "fit_residual"],
            Experiment::Localize => &["ratio"],
            Experiment::Nikolskij => &["band", "ratio"],
            Experiment::Peetre => &["band", "step", "maximal_ratio", "difference_ratio"],
            Experiment::Trace => &["trace_norm", "sobolev_full", "ratio"],
            Experiment::Embed => &["sup_norm", "space_norm", "ratio", "fit_slope", "fit_residual"],
            Experiment::Report => &["value", "fitted", "fit_slope", "fit_intercept", "fit_residual"],
        }
    }

    pub fn columns(self) -> Vec<&'static str> {
        COMMON.iter().chain(self.value_columns()).copied().collect()
    }

    /// Keys whose values determine the results for `family`.
    pub fn keys(self, family: Family) -> Vec<&'static str> {
        let family_keys: &[&str] = match family {
            Family::Random => &["count", "seed", "modes", "decay"],
            Family::Dilated => &["n_min", "n_max"],
            Family::Oscillatory => &["n_min", "n_max", "eps", "ramp"],
            Family::Zero | Family::Bump => &[],
        };
        let own: &[&str] = match self {
            Experiment::Norm => &["family", "p", "r", "m", "m_diff", "d", "resolution", "box", "system"],
            Experiment::Equiv => &["family", "p", "r", "m", "m_diff", "d", "resolution", "box", "system"],
            Experiment::Algebra | Experiment::Moser => match family {
                Family::Random => &["family", "space", "p", "r", "m", "m_diff", "d", "resolution", "box"],
                _ => &["family", "space", "p", "r", "m", "m_diff", "d", "resolution", "box", "companion_width"],
            },
            Experiment::Localize => &["family", "p", "r", "m_diff", "d", "resolution", "box", "lattice"],
            Experiment::Nikolskij => &["family", "p", "p0", "alpha", "resolution", "box", "bands"],
            Experiment::Peetre => &["family", "p", "m_diff", "a", "resolution", "box", "bands", "steps"],
            Experiment::Trace => &["family", "p", "m", "d", "resolution", "box", "beta", "split"],
            Experiment::Embed => &["family", "space", "p", "r", "m", "m_diff", "resolution", "box"],
            Experiment::Report => return vec!["input", "column", "index", "model"],
        };
        let mut keys: Vec<&str> = own.iter().chain(family_keys).copied().collect();
        if matches!(self, Experiment::Nikolskij | Experiment::Peetre) {
            keys.retain(|k| *k != "modes");
        }
        keys.sort_unstable();
        keys
    }
}

/// A finished experiment: the table plus data kept out of the result bytes.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: Table,
    /// Wall-clock seconds per row, in row order.
    pub row_seconds: Vec<f64>,
    /// Advisories raised while building the inputs.
    pub notes: Vec<String>,
}

struct Builder<'a> {
    cfg: &'a ExperimentConfig,
    table: Table,
    row_seconds: Vec<f64>,
    notes: Vec<String>,
    clock: Instant,
}

impl<'a> Builder<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Builder {
            cfg,
            table: Table::new(cfg.experiment.columns()),
            row_seconds: Vec::new(),
            notes: Vec::new(),
            clock: Instant::now(),
        }
    }

    fn push(&mut self, member: Value, n: Value, values: Vec<Value>) {
        let mut row = vec![
            Value::Text(self.cfg.experiment.name().into()),
            Value::Text(self.cfg.snapshot.clone()),
            member,
            n,
        ];
        row.extend(values);
        self.table.push(row);
        let now = Instant::now();
        self.row_seconds.push(now.duration_since(self.clock).as_secs_f64());
        self.clock = now;
    }

    fn finish(self) -> Outcome {
        Outcome {
            table: self.table,
            row_seconds: self.row_seconds,
            notes: self.notes,
        }
    }
}

fn cube(cfg: &ExperimentConfig, d: usize) -> CliResult<GridBox> {
    Ok(GridBox::cube(d, cfg.bounds.0, cfg.bounds.1)?)
}

fn random_members(cfg: &ExperimentConfig, count: usize, modes: usize, d: usize) -> CliResult<Vec<GridFunction>> {
    let domain = cube(cfg, d)?;
    let family = random_trig_family(&domain, &vec![modes; d], cfg.decay, cfg.seed, count)?;
    let shape = vec![cfg.resolution; d];
    Ok(family
        .par_iter()
        .map(|poly| poly.sample(&shape))
        .collect::<mixnorm::Result<Vec<_>>>()?)
}

fn base_family(cfg: &ExperimentConfig, notes: &mut Vec<String>) -> CliResult<TestFamily> {
    let grid = FamilyGrid::new(cfg.bounds.0, cfg.bounds.1, cfg.resolution)?;
    let mut family = match cfg.family {
        Family::Dilated => dilated_family(cfg.n_max, &grid)?,
        Family::Oscillatory => {
            if let Some(w) = epsilon_warning(cfg.eps, cfg.p) {
                notes.push(w);
            }
            oscillatory_family(cfg.n_max, cfg.eps, cfg.ramp, &grid)?
        }
        other => unreachable!("{other:?} is not a one-dimensional family"),
    };
    if let Some(report) = family.report.take() {
        notes.push(report);
    }
    family.members.retain(|(n, _)| *n >= cfg.n_min);
    if family.members.is_empty() {
        return Err(CliError::validation("n_min", "no member survives the resolution bound"));
    }
    Ok(family)
}

/// `(member, n, function)` triples for experiments that evaluate single functions.
fn members(cfg: &ExperimentConfig, notes: &mut Vec<String>) -> CliResult<Vec<(i64, i64, GridFunction)>> {
    let indexed = |fs: Vec<GridFunction>| fs.into_iter().enumerate().map(|(i, f)| (i as i64, i as i64, f)).collect();
    match cfg.family {
        Family::Random => Ok(indexed(random_members(cfg, cfg.count, cfg.modes, cfg.d)?)),
        Family::Zero => {
            let f = GridFunction::zeros(cube(cfg, cfg.d)?, vec![cfg.resolution; cfg.d], Extension::Periodic)?;
            Ok(indexed(vec![f]))
        }
        Family::Bump => {
            let f = GridFunction::sample(
                |x| x.iter().map(|&t| bump(t)).product(),
                cube(cfg, cfg.d)?,
                vec![cfg.resolution; cfg.d],
                Extension::Zero,
            )?;
            Ok(indexed(vec![f]))
        }
        Family::Dilated | Family::Oscillatory => Ok(base_family(cfg, notes)?
            .members
            .into_iter()
            .enumerate()
            .map(|(i, (n, f))| (i as i64, n as i64, f))
            .collect()),
    }
}

fn space(cfg: &ExperimentConfig) -> Space {
    match cfg.space {
        SpaceKind::Besov => Space::Besov {
            r: cfg.r,
            p: cfg.p,
            m_diff: cfg.m_diff,
        },
        SpaceKind::Sobolev => Space::Sobolev { m: cfg.m, p: cfg.p },
    }
}

fn sobolev_defined(p: f64) -> bool {
    p > 1.0 && p.is_finite()
}

/// Geometric fit over `(n, value)`; `None` when there are too few points.
fn fit(series: &[(f64, f64)]) -> Option<mixnorm::counterexamples::RateFit> {
    if series.len() < 4 {
        return None;
    }
    rate_fit(series, RateModel::Geometric).ok()
}

fn run_norm(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    let fs = members(cfg, &mut b.notes)?;
    let first = &fs[0].2;
    let sys = build_system(cfg.system, first.domain(), first.shape())?;
    for (i, n, f) in fs {
        let diff = besov_norm_diff(&f, cfg.r, cfg.p, cfg.m_diff)?;
        let fourier = besov_norm_fourier(&f, cfg.r, cfg.p, &sys)?;
        let sobolev = if sobolev_defined(cfg.p) {
            Value::Num(sobolev_norm_full(&f, cfg.m, cfg.p)?)
        } else {
            Value::Missing
        };
        let values = vec![
            diff.into(),
            fourier.into(),
            sobolev,
            f.sup_norm().into(),
            f.lp_norm(cfg.p)?.into(),
        ];
        b.push(Value::Int(i), Value::Int(n), values);
    }
    Ok(())
}

fn run_equiv(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    let fs = random_members(cfg, cfg.count, cfg.modes, cfg.d)?;
    let sys = build_system(cfg.system, fs[0].domain(), fs[0].shape())?;
    for (i, f) in fs.iter().enumerate() {
        let diff = besov_norm_diff(f, cfg.r, cfg.p, cfg.m_diff)?;
        let fourier = besov_norm_fourier(f, cfg.r, cfg.p, &sys)?;
        let integral = besov_norm_integral(f, cfg.r, cfg.p, cfg.m_diff)?;
        let full = sobolev_norm_full(f, cfg.m, cfg.p)?;
        let reduced = sobolev_norm_reduced(f, cfg.m, cfg.p)?;
        let sob_fourier = sobolev_norm_fourier(f, cfg.m, cfg.p, &sys)?;
        let values = vec![
            diff.into(),
            fourier.into(),
            integral.into(),
            full.into(),
            reduced.into(),
            sob_fourier.into(),
            (diff / fourier).into(),
            (diff / integral).into(),
            (full / reduced).into(),
            (full / sob_fourier).into(),
        ];
        b.push(Value::Int(i as i64), Value::Int(i as i64), values);
    }
    Ok(())
}

fn ratio_of<F: Field>(cfg: &ExperimentConfig, f: &F, g: &F) -> CliResult<f64> {
    let sp = space(cfg);
    Ok(match cfg.experiment {
        Experiment::Algebra => algebra_ratio(f, g, sp)?,
        _ => moser_ratio(f, g, sp)?,
    })
}

fn run_products(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    if cfg.family == Family::Random {
        let fs = random_members(cfg, 2 * cfg.count, cfg.modes, cfg.d)?;
        for (i, pair) in fs.chunks_exact(2).enumerate() {
            let ratio = ratio_of(cfg, &pair[0], &pair[1])?;
            b.push(
                Value::Int(i as i64),
                Value::Int(i as i64),
                vec![ratio.into(), Value::Missing, Value::Missing],
            );
        }
        return Ok(());
    }
    let base = base_family(cfg, &mut b.notes)?;
    let pairs = tensor_pair_family(&base, cfg.d, cfg.companion_width)?;
    let mut ratios = Vec::with_capacity(pairs.pairs.len());
    let mut seconds = Vec::with_capacity(pairs.pairs.len());
    for (n, f, g) in &pairs.pairs {
        let start = Instant::now();
        ratios.push((*n as f64, ratio_of(cfg, f, g)?));
        seconds.push(start.elapsed().as_secs_f64());
    }
    push_fitted(b, &ratios, &[]);
    b.row_seconds.truncate(b.row_seconds.len() - seconds.len());
    b.row_seconds.extend(seconds);
    Ok(())
}

/// Rows `(n, value)` followed by the shared geometric fit; `extra` holds
/// leading value columns per row.
fn push_fitted(b: &mut Builder, series: &[(f64, f64)], extra: &[Vec<Value>]) {
    let fitted = fit(series);
    for (i, &(n, v)) in series.iter().enumerate() {
        let mut values = extra.get(i).cloned().unwrap_or_default();
        values.push(v.into());
        values.push(fitted.map(|f| f.slope).into());
        values.push(fitted.map(|f| f.residual).into());
        b.push(Value::Int(i as i64), Value::Int(n as i64), values);
    }
}

fn run_localize(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    let fs = random_members(cfg, cfg.count, cfg.modes, cfg.d)?;
    let pou = build_partition(cfg.lattice, fs[0].domain(), fs[0].shape(), Extension::Periodic)?;
    for (i, f) in fs.iter().enumerate() {
        let ratio = localization_ratio(f, cfg.r, cfg.p, cfg.m_diff, &pou)?;
        b.push(Value::Int(i as i64), Value::Int(i as i64), vec![ratio.into()]);
    }
    Ok(())
}

fn band_modes(cfg: &ExperimentConfig, band: f64) -> usize {
    let length = cfg.bounds.1 - cfg.bounds.0;
    (length * band / (2.0 * std::f64::consts::PI)).floor() as usize
}

fn run_nikolskij(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    for &band in &cfg.bands {
        let fs = random_members(cfg, cfg.count, band_modes(cfg, band), 1)?;
        for (i, f) in fs.iter().enumerate() {
            let ratio = nikolskij_ratio(f, &[cfg.alpha], cfg.p0, cfg.p, &[band])?;
            b.push(Value::Int(i as i64), Value::Int(i as i64), vec![band.into(), ratio.into()]);
        }
    }
    Ok(())
}

fn run_peetre(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    let e = DirectionSet::full(1);
    let order = MixedOrder::uniform(1, cfg.m_diff);
    for &band in &cfg.bands {
        let fs = random_members(cfg, cfg.count, band_modes(cfg, band), 1)?;
        for (i, f) in fs.iter().enumerate() {
            let maximal = peetre_maximal(f, &[band], cfg.a)?;
            let lp = f.lp_norm(cfg.p)?;
            if lp == 0.0 {
                return Err(mixnorm::Error::ZeroNorm("member Lp norm").into());
            }
            let maximal_ratio = maximal.lp_norm(cfg.p)? / lp;
            for &step in &cfg.steps {
                let check = difference_maximal_check(f, e, &order, &[step / band], &[band], cfg.a)?;
                b.push(
                    Value::Int(i as i64),
                    Value::Int(i as i64),
                    vec![band.into(), step.into(), maximal_ratio.into(), check.into()],
                );
            }
        }
    }
    Ok(())
}

fn run_trace(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    let fs = random_members(cfg, cfg.count, cfg.modes, cfg.d)?;
    for (i, f) in fs.iter().enumerate() {
        let trace = mixed_sup_lp(f, &cfg.beta, cfg.split, cfg.p)?;
        let full = sobolev_norm_full(f, cfg.m, cfg.p)?;
        if full == 0.0 {
            return Err(mixnorm::Error::ZeroNorm("Sobolev norm").into());
        }
        b.push(
            Value::Int(i as i64),
            Value::Int(i as i64),
            vec![trace.into(), full.into(), (trace / full).into()],
        );
    }
    Ok(())
}

fn run_embed(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    let family = base_family(cfg, &mut b.notes)?;
    let sp = space(cfg);
    let mut series = Vec::new();
    let mut extra = Vec::new();
    let mut seconds = Vec::new();
    for (n, f) in &family.members {
        let start = Instant::now();
        let norm = sp.norm(f)?;
        if norm == 0.0 {
            return Err(mixnorm::Error::ZeroNorm("space norm").into());
        }
        let sup = f.sup_norm();
        series.push((*n as f64, sup / norm));
        extra.push(vec![sup.into(), norm.into()]);
        seconds.push(start.elapsed().as_secs_f64());
    }
    push_fitted(b, &series, &extra);
    b.row_seconds.truncate(b.row_seconds.len() - seconds.len());
    b.row_seconds.extend(seconds);
    Ok(())
}

fn run_report(b: &mut Builder) -> CliResult<()> {
    let cfg = b.cfg;
    let path = cfg.input.as_deref().expect("checked during validation");
    let (header, rows) = read_csv(path)?;
    let find = |name: &str, field: &'static str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::validation(field, format!("no column `{name}` in {}", path.display())))
    };
    let ci = find(&cfg.column, "column")?;
    let ni = find(&cfg.index, "index")?;
    let mut series = Vec::new();
    for (line, row) in rows.iter().enumerate() {
        let parse = |i: usize, field: &'static str| {
            row[i].parse::<f64>().map_err(|_| {
                CliError::validation(field, format!("row {}: `{}` is not a number", line + 1, row[i]))
            })
        };
        if row[ci].is_empty() {
            continue;
        }
        series.push((parse(ni, "index")?, parse(ci, "column")?));
    }
    let fitted = rate_fit(&series, cfg.model)?;
    for (i, &(n, v)) in series.iter().enumerate() {
        let model = match cfg.model {
            RateModel::Geometric => (fitted.intercept + fitted.slope * n).exp2(),
            RateModel::Power => (fitted.intercept + fitted.slope * n.ln()).exp(),
        };
        let n_value = if n.fract() == 0.0 && n.abs() < 1e15 {
            Value::Int(n as i64)
        } else {
            Value::Num(n)
        };
        b.push(
            Value::Int(i as i64),
            n_value,
            vec![
                v.into(),
                model.into(),
                fitted.slope.into(),
                fitted.intercept.into(),
                fitted.residual.into(),
            ],
        );
    }
    Ok(())
}

/// Evaluates the configured experiment. Rows come out in a fixed order and
/// their values do not depend on the worker count.
pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let mut b = Builder::new(cfg);
    match cfg.experiment {
        Experiment::Norm => run_norm(&mut b)?,
        Experiment::Equiv => run_equiv(&mut b)?,
        Experiment::Algebra | Experiment::Moser => run_products(&mut b)?,
        Experiment::Localize => run_localize(&mut b)?,
        Experiment::Nikolskij => run_nikolskij(&mut b)?,
        Experiment::Peetre => run_peetre(&mut b)?,
        Experiment::Trace => run_trace(&mut b)?,
        Experiment::Embed => run_embed(&mut b)?,
        Experiment::Report => run_report(&mut b)?,
    }
    let outcome = b.finish();
    outcome.table.check_finite()?;
    Ok(outcome)
}

/// Human-readable listing of experiments, their columns and every key.
pub fn describe() -> String {
    let mut out = String::from("usage: mixnorm <experiment> --config <path> [--key value]...\n\nexperiments:\n");
    for e in ALL {
        out.push_str(&format!("  {:<10} {}\n", e.name(), e.summary()));
        out.push_str(&format!("             columns: {}\n", e.columns().join(",")));
    }
    out.push_str("\nkeys:\n");
    for (key, default, help) in KEYS {
        let default = if default.is_empty() { "-" } else { default };
        out.push_str(&format!("  {key:<16} {default:<24} {help}\n"));
    }
    out.push_str(
        "\nenvironment:\n  MIXNORM_WORKERS  worker threads (default: all cores)\n\n\
         exit codes: 0 ok, 2 validation, 3 numerical anomaly, 4 I/O\n",
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    fn outcome(text: &str, exp: &str) -> Outcome {
        let cfg = ExperimentConfig::resolve(&Config::parse_str(text).unwrap(), Some(exp)).unwrap();
        run(&cfg).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for e in ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let out = outcome("family=zero\nresolution=32", "norm");
        let t = &out.table;
        assert_eq!(t.rows.len(), 1);
        for c in ["diff_norm", "fourier_norm", "sobolev_norm", "sup_norm", "lp_norm"] {
            assert_eq!(t.column(c).unwrap()[0], &Value::Num(0.0), "{c}");
        }
    }

    #[test]
    fn rows_carry_the_snapshot() {
        let out = outcome("count=2\nresolution=32", "trace");
        let params = out.table.column("params").unwrap();
        assert!(params.iter().all(|p| matches!(p, Value::Text(s) if s.contains("beta=1,0"))));
        assert_eq!(out.row_seconds.len(), out.table.rows.len());
    }

    #[test]
    fn describe_lists_every_experiment_and_key() {
        let text = describe();
        for e in ALL {
            assert!(text.contains(e.name()));
        }
        for (k, _, _) in KEYS {
            assert!(text.contains(k));
        }
    }
}
