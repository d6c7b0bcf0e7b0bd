//! Flat `key=value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mixnorm::counterexamples::{RateModel, Ramp};
use mixnorm::fourier::SystemKind;

use crate::experiments::Experiment;
use crate::table::Format;
use crate::{CliError, CliResult};

/// Every key a configuration may set, with its default as text (empty when
/// the default depends on other keys) and a one-line description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("experiment", "", "experiment name (the positional argument wins)"),
    ("family", "", "random | dilated | oscillatory | zero | bump"),
    ("space", "besov", "besov | sobolev, for algebra and moser"),
    ("p", "2", "integrability exponent, `inf` allowed"),
    ("r", "1", "Besov smoothness"),
    ("m", "1", "Sobolev derivative order"),
    ("m_diff", "", "difference order, default floor(r) + 1"),
    ("d", "", "dimension, default 2 (1 for nikolskij, peetre, embed)"),
    ("resolution", "", "samples per axis, a power of two >= 16"),
    ("box", "", "lower,upper of every axis"),
    ("n_min", "", "first family index, default 0 (dilated) or 1 (oscillatory)"),
    ("n_max", "", "last family index, default 8 (dilated) or 6 (oscillatory)"),
    ("eps", "1.6", "oscillation exponent of the oscillatory family"),
    ("ramp", "linear", "linear | smooth cutoff of the oscillatory family"),
    ("companion_width", "", "plateau half-width of the tensor companion"),
    ("count", "", "random family size (pairs for algebra and moser)"),
    ("seed", "0", "seed of the random family"),
    ("modes", "", "highest mode per axis, default resolution/8"),
    ("decay", "", "coefficient decay exponent, default 1 (0 for nikolskij, peetre)"),
    ("system", "smooth", "smooth | sharp dyadic system"),
    ("lattice", "0.25", "partition lattice spacing in box units"),
    ("bands", "1,2,4,8,16,32", "band edges b for nikolskij and peetre"),
    ("a", "", "Peetre exponent, default 1/p + 1/2"),
    ("alpha", "1", "derivative order for nikolskij"),
    ("p0", "", "lower exponent for nikolskij, default p"),
    ("steps", "0.0625,0.125,0.25,0.5,1", "values of b*h for the difference check"),
    ("beta", "", "derivative multi-index for trace, default (m,0,..)"),
    ("split", "1", "number of integrated axes for trace"),
    ("input", "", "CSV file read by report"),
    ("column", "", "column fitted by report"),
    ("index", "n", "index column used by report"),
    ("model", "geometric", "geometric | power rate model for report"),
    ("output", "results.csv", "result path; metadata goes to <output>.meta.json"),
    ("format", "", "csv | json, default from the output extension"),
];

/// Raw key/value pairs in the order they were set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse_str(text: &str) -> CliResult<Self> {
        let mut cfg = Config::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::validation(format!("line {}", lineno + 1), format!("expected key=value, got `{line}`"))
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Config::parse_str(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !KEYS.iter().any(|(k, _, _)| *k == key) {
            return Err(CliError::validation(key, "unknown key"));
        }
        self.values.insert(key.to_owned(), value.to_owned());
        Ok(())
    }

    /// Applies `--key value` pairs.
    pub fn apply_overrides(&mut self, args: &[String]) -> CliResult<()> {
        let mut it = args.iter();
        while let Some(flag) = it.next() {
            let key = flag
                .strip_prefix("--")
                .ok_or_else(|| CliError::validation(flag.as_str(), "overrides take the form --key value"))?;
            if let Some((k, v)) = key.split_once('=') {
                self.set(k, v)?;
                continue;
            }
            let value = it
                .next()
                .ok_or_else(|| CliError::validation(key, "missing value"))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Random,
    Dilated,
    Oscillatory,
    Zero,
    Bump,
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "random" => Ok(Family::Random),
            "dilated" => Ok(Family::Dilated),
            "oscillatory" => Ok(Family::Oscillatory),
            "zero" => Ok(Family::Zero),
            "bump" => Ok(Family::Bump),
            other => Err(CliError::validation("family", format!("unknown family `{other}`"))),
        }
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::Dilated => "dilated",
            Family::Oscillatory => "oscillatory",
            Family::Zero => "zero",
            Family::Bump => "bump",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Besov,
    Sobolev,
}

/// A validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub family: Family,
    pub space: SpaceKind,
    pub p: f64,
    pub r: f64,
    pub m: u32,
    pub m_diff: u32,
    pub d: usize,
    pub resolution: usize,
    pub bounds: (f64, f64),
    pub n_min: u32,
    pub n_max: u32,
    pub eps: f64,
    pub ramp: Ramp,
    pub companion_width: f64,
    pub count: usize,
    pub seed: u64,
    pub modes: usize,
    pub decay: f64,
    pub system: SystemKind,
    pub lattice: f64,
    pub bands: Vec<f64>,
    pub a: f64,
    pub alpha: u32,
    pub p0: f64,
    pub steps: Vec<f64>,
    pub beta: Vec<u32>,
    pub split: usize,
    pub input: Option<PathBuf>,
    pub column: String,
    pub index: String,
    pub model: RateModel,
    pub output: PathBuf,
    pub format: Format,
    /// Resolved `key=value` pairs that determine the results.
    pub snapshot: String,
}

fn parse<T: FromStr>(cfg: &Config, key: &'static str, default: &str) -> CliResult<T> {
    let raw = cfg.get(key).unwrap_or(default);
    raw.parse()
        .map_err(|_| CliError::validation(key, format!("cannot parse `{raw}`")))
}

fn parse_exponent(cfg: &Config, key: &'static str, default: &str) -> CliResult<f64> {
    let raw = cfg.get(key).unwrap_or(default);
    let v = match raw {
        "inf" | "infinity" => f64::INFINITY,
        other => other
            .parse::<f64>()
            .map_err(|_| CliError::validation(key, format!("cannot parse `{other}`")))?,
    };
    if v.is_nan() || v < 1.0 {
        return Err(CliError::validation(key, format!("{v} is outside [1, inf]")));
    }
    Ok(v)
}

fn parse_list<T: FromStr>(cfg: &Config, key: &'static str, default: &str) -> CliResult<Vec<T>> {
    let raw = cfg.get(key).unwrap_or(default);
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::validation(key, format!("cannot parse `{s}`")))
        })
        .collect()
}

fn fmt_f(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn fmt_list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn ensure(cond: bool, field: &str, reason: impl Into<String>) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::validation(field, reason))
    }
}

impl ExperimentConfig {
    /// Resolves defaults and checks every precondition the experiment reaches.
    pub fn resolve(cfg: &Config, experiment: Option<&str>) -> CliResult<Self> {
        let name = experiment
            .or(cfg.get("experiment"))
            .ok_or_else(|| CliError::validation("experiment", "no experiment given"))?;
        let experiment: Experiment = name.parse()?;
        use Experiment as X;

        let family: Family = match cfg.get("family") {
            Some(f) => f.parse()?,
            None => match experiment {
                X::Embed | X::Moser | X::Algebra => Family::Dilated,
                _ => Family::Random,
            },
        };
        let allowed: &[Family] = match experiment {
            X::Norm => &[Family::Random, Family::Dilated, Family::Oscillatory, Family::Zero, Family::Bump],
            X::Algebra | X::Moser => &[Family::Random, Family::Dilated, Family::Oscillatory],
            X::Embed => &[Family::Dilated, Family::Oscillatory],
            X::Report => &[Family::Random, Family::Dilated, Family::Oscillatory, Family::Zero, Family::Bump],
            _ => &[Family::Random],
        };
        ensure(
            allowed.contains(&family),
            "family",
            format!("`{}` is not available for {}", family.name(), experiment.name()),
        )?;
        let space = match cfg.get("space").unwrap_or("besov") {
            "besov" => SpaceKind::Besov,
            "sobolev" => SpaceKind::Sobolev,
            other => return Err(CliError::validation("space", format!("unknown space `{other}`"))),
        };

        let p = parse_exponent(cfg, "p", "2")?;
        let r: f64 = parse(cfg, "r", "1")?;
        ensure(r.is_finite() && r > 0.0, "r", "must be positive")?;
        let m: u32 = parse(cfg, "m", "1")?;
        ensure(m <= 4, "m", "derivative orders above 4 are not supported")?;
        let m_diff: u32 = parse(cfg, "m_diff", &format!("{}", r.floor() as u32 + 1))?;
        ensure(m_diff as f64 > r, "m_diff", format!("must exceed r = {r}"))?;
        ensure(m_diff <= 8, "m_diff", "difference orders above 8 are not supported")?;
        let needs_sobolev = matches!(experiment, X::Equiv | X::Trace)
            || (matches!(experiment, X::Algebra | X::Moser) && space == SpaceKind::Sobolev);
        if needs_sobolev {
            ensure(p > 1.0 && p.is_finite(), "p", "Sobolev norms need 1 < p < inf")?;
        }

        let one_d = matches!(experiment, X::Nikolskij | X::Peetre | X::Embed)
            || (experiment == X::Norm && matches!(family, Family::Dilated | Family::Oscillatory));
        let tensor = matches!(experiment, X::Algebra | X::Moser) && family != Family::Random;
        let d: usize = parse(cfg, "d", if one_d { "1" } else { "2" })?;
        ensure((1..=3).contains(&d), "d", "must be 1, 2 or 3")?;
        if one_d {
            ensure(d == 1, "d", format!("{} on this family is one-dimensional", experiment.name()))?;
        }
        if tensor {
            ensure(d >= 2, "d", "tensor pairs need d in {2, 3}")?;
        }
        if experiment == X::Localize {
            ensure(p.is_finite(), "p", "localization aggregates need finite p")?;
        }

        let default_res = match (experiment, family) {
            (X::Nikolskij | X::Peetre, _) => 4096,
            (_, Family::Dilated) => 1 << 16,
            (_, Family::Oscillatory) => 1 << 15,
            _ => 64,
        };
        let resolution: usize = parse(cfg, "resolution", &default_res.to_string())?;
        ensure(
            resolution >= 16 && resolution.is_power_of_two(),
            "resolution",
            "must be a power of two >= 16",
        )?;
        if !one_d && !tensor && experiment != X::Report {
            ensure(
                resolution.pow(d as u32) <= 1 << 22,
                "resolution",
                format!("{resolution}^{d} samples exceed the dense grid limit 2^22"),
            )?;
        }

        let default_box = match (experiment, family) {
            (X::Nikolskij | X::Peetre, _) => "0,64",
            (_, Family::Dilated) => "-4,4",
            (_, Family::Oscillatory) => "-1,3",
            (_, Family::Bump) => "-4,4",
            _ => "0,1",
        };
        let bounds: Vec<f64> = parse_list(cfg, "box", default_box)?;
        ensure(bounds.len() == 2, "box", "expected lower,upper")?;
        ensure(
            bounds[0].is_finite() && bounds[1].is_finite() && bounds[0] < bounds[1],
            "box",
            "need finite lower < upper",
        )?;
        let bounds = (bounds[0], bounds[1]);
        match family {
            Family::Dilated => ensure(bounds.0 <= -2.0 && bounds.1 >= 2.0, "box", "must contain [-2, 2]")?,
            Family::Oscillatory => ensure(bounds.0 <= 0.0 && bounds.1 >= 1.5, "box", "must contain [0, 3/2]")?,
            _ => {}
        }

        let (nmin_default, nmax_default) = match family {
            Family::Oscillatory => ("1", "6"),
            _ => ("0", "8"),
        };
        let n_min: u32 = parse(cfg, "n_min", nmin_default)?;
        let n_max: u32 = parse(cfg, "n_max", nmax_default)?;
        ensure(n_min <= n_max, "n_min", "must not exceed n_max")?;
        if family == Family::Oscillatory {
            ensure(n_min >= 1, "n_min", "oscillatory members start at n = 1")?;
        }
        if family == Family::Dilated {
            let width_cells = 4.0 * 2f64.powi(-(n_max as i32)) * resolution as f64 / (bounds.1 - bounds.0);
            ensure(
                width_cells >= 16.0,
                "n_max",
                format!("member {n_max} spans {width_cells:.2} cells at this resolution, need 16"),
            )?;
        }
        let eps: f64 = parse(cfg, "eps", "1.6")?;
        ensure(eps.is_finite() && eps > 0.0, "eps", "must be positive")?;
        let ramp = match cfg.get("ramp").unwrap_or("linear") {
            "linear" => Ramp::Linear,
            "smooth" => Ramp::Smooth,
            other => return Err(CliError::validation("ramp", format!("unknown ramp `{other}`"))),
        };
        let cw_default = match family {
            Family::Oscillatory => "0.8",
            _ => "2",
        };
        let companion_width: f64 = parse(cfg, "companion_width", cw_default)?;
        ensure(companion_width > 0.0, "companion_width", "must be positive")?;
        if tensor {
            let centre = if family == Family::Oscillatory { 0.75 } else { 0.0 };
            ensure(
                centre - 2.0 * companion_width >= bounds.0 && centre + 2.0 * companion_width <= bounds.1,
                "companion_width",
                "companion support leaves the box",
            )?;
        }

        let count_default = match experiment {
            X::Algebra | X::Moser => 50,
            X::Nikolskij | X::Peetre => 10,
            _ => 30,
        };
        let count: usize = parse(cfg, "count", &count_default.to_string())?;
        ensure(count >= 1, "count", "must be positive")?;
        let seed: u64 = parse(cfg, "seed", "0")?;
        let modes: usize = parse(cfg, "modes", &(resolution / 8).to_string())?;
        ensure(modes >= 1, "modes", "must be positive")?;
        ensure(2 * modes < resolution, "modes", "must lie below the Nyquist index")?;
        let decay_default = if matches!(experiment, X::Nikolskij | X::Peetre) { "0" } else { "1" };
        let decay: f64 = parse(cfg, "decay", decay_default)?;
        ensure(decay.is_finite() && decay >= 0.0, "decay", "must be nonnegative")?;
        let system: SystemKind = parse_with(cfg, "system", "smooth")?;
        let lattice: f64 = parse(cfg, "lattice", "0.25")?;
        ensure(lattice > 0.0, "lattice", "must be positive")?;
        if experiment == X::Localize {
            let cells = lattice * resolution as f64 / (bounds.1 - bounds.0);
            ensure(
                (cells - cells.round()).abs() < 1e-9 && cells >= 2.0 && resolution as f64 % cells.round() == 0.0,
                "lattice",
                format!("spacing of {cells} cells must be whole, at least 2 and divide the resolution"),
            )?;
            ensure(2.0 * cells <= resolution as f64, "lattice", "wider than half the box")?;
        }

        let bands: Vec<f64> = parse_list(cfg, "bands", "1,2,4,8,16,32")?;
        let length = bounds.1 - bounds.0;
        let nyquist = std::f64::consts::PI * resolution as f64 / length;
        for &b in &bands {
            ensure(b > 0.0 && b.is_finite(), "bands", "band edges must be positive")?;
            if matches!(experiment, X::Nikolskij | X::Peetre) {
                ensure(b < nyquist, "bands", format!("band {b} reaches the Nyquist frequency {nyquist}"))?;
                ensure(
                    (length * b / (2.0 * std::f64::consts::PI)).floor() >= 1.0,
                    "bands",
                    format!("band {b} holds no nonzero mode on a box of length {length}"),
                )?;
            }
        }
        let a: f64 = parse(cfg, "a", &fmt_f(if p.is_finite() { 1.0 / p + 0.5 } else { 0.5 }))?;
        ensure(a > 0.0 && a.is_finite(), "a", "must be positive")?;
        let alpha: u32 = parse(cfg, "alpha", "1")?;
        ensure(alpha <= 4, "alpha", "derivative orders above 4 are not supported")?;
        let p0 = parse_exponent(cfg, "p0", &fmt_f(p))?;
        ensure(p0 <= p, "p0", format!("must not exceed p = {p}"))?;
        let steps: Vec<f64> = parse_list(cfg, "steps", "0.0625,0.125,0.25,0.5,1")?;
        ensure(steps.iter().all(|s| *s > 0.0 && s.is_finite()), "steps", "must be positive")?;
        let beta_default = {
            let mut b = vec![0u32; d];
            b[0] = m;
            fmt_list(&b)
        };
        let beta: Vec<u32> = parse_list(cfg, "beta", &beta_default)?;
        if experiment == X::Trace {
            ensure(beta.len() == d, "beta", format!("needs {d} entries"))?;
            ensure(beta.iter().all(|&b| b <= 4), "beta", "orders above 4 are not supported")?;
        }
        let split: usize = parse(cfg, "split", "1")?;
        if experiment == X::Trace {
            ensure((1..=d).contains(&split), "split", format!("must lie in 1..={d}"))?;
        }

        let input = cfg.get("input").map(PathBuf::from);
        let column = cfg.get("column").unwrap_or("").to_owned();
        let index = cfg.get("index").unwrap_or("n").to_owned();
        let model: RateModel = parse_with(cfg, "model", "geometric")?;
        if experiment == X::Report {
            ensure(input.is_some(), "input", "report needs an input table")?;
            ensure(!column.is_empty(), "column", "report needs a column to fit")?;
        }
        let output = PathBuf::from(cfg.get("output").unwrap_or("results.csv"));
        let format = match cfg.get("format") {
            Some(f) => f.parse()?,
            None => Format::from_path(&output),
        };

        let mut resolved = ExperimentConfig {
            experiment,
            family,
            space,
            p,
            r,
            m,
            m_diff,
            d,
            resolution,
            bounds,
            n_min,
            n_max,
            eps,
            ramp,
            companion_width,
            count,
            seed,
            modes,
            decay,
            system,
            lattice,
            bands,
            a,
            alpha,
            p0,
            steps,
            beta,
            split,
            input,
            column,
            index,
            model,
            output,
            format,
            snapshot: String::new(),
        };
        resolved.snapshot = resolved.build_snapshot();
        Ok(resolved)
    }

    fn build_snapshot(&self) -> String {
        let mut kv: Vec<(&str, String)> = vec![("experiment", self.experiment.name().into())];
        for key in self.experiment.keys(self.family) {
            let v = match key {
                "family" => self.family.name().into(),
                "space" => match self.space {
                    SpaceKind::Besov => "besov".into(),
                    SpaceKind::Sobolev => "sobolev".into(),
                },
                "p" => fmt_f(self.p),
                "r" => fmt_f(self.r),
                "m" => self.m.to_string(),
                "m_diff" => self.m_diff.to_string(),
                "d" => self.d.to_string(),
                "resolution" => self.resolution.to_string(),
                "box" => format!("{},{}", fmt_f(self.bounds.0), fmt_f(self.bounds.1)),
                "n_min" => self.n_min.to_string(),
                "n_max" => self.n_max.to_string(),
                "eps" => fmt_f(self.eps),
                "ramp" => match self.ramp {
                    Ramp::Linear => "linear".into(),
                    Ramp::Smooth => "smooth".into(),
                },
                "companion_width" => fmt_f(self.companion_width),
                "count" => self.count.to_string(),
                "seed" => self.seed.to_string(),
                "modes" => self.modes.to_string(),
                "decay" => fmt_f(self.decay),
                "system" => match self.system {
                    SystemKind::Smooth => "smooth".into(),
                    SystemKind::Sharp => "sharp".into(),
                },
                "lattice" => fmt_f(self.lattice),
                "bands" => fmt_list(&self.bands),
                "a" => fmt_f(self.a),
                "alpha" => self.alpha.to_string(),
                "p0" => fmt_f(self.p0),
                "steps" => fmt_list(&self.steps),
                "beta" => fmt_list(&self.beta),
                "split" => self.split.to_string(),
                "input" => self
                    .input
                    .as_deref()
                    .and_then(Path::file_name)
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                "column" => self.column.clone(),
                "index" => self.index.clone(),
                "model" => match self.model {
                    RateModel::Geometric => "geometric".into(),
                    RateModel::Power => "power".into(),
                },
                _ => continue,
            };
            kv.push((key, v));
        }
        kv.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

fn parse_with<T>(cfg: &Config, key: &'static str, default: &str) -> CliResult<T>
where
    T: FromStr<Err = mixnorm::Error>,
{
    cfg.get(key).unwrap_or(default).parse::<T>().map_err(CliError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str, exp: &str) -> CliResult<ExperimentConfig> {
        ExperimentConfig::resolve(&Config::parse_str(text)?, Some(exp))
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let cfg = Config::parse_str("# note\n\np = 3\nr=0.5\n").unwrap();
        assert_eq!(cfg.get("p"), Some("3"));
        assert_eq!(cfg.get("r"), Some("0.5"));
    }

    #[test]
    fn unknown_keys_are_named() {
        match Config::parse_str("q=1") {
            Err(CliError::Validation { field, .. }) => assert_eq!(field, "q"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overrides_win() {
        let mut cfg = Config::parse_str("p=3").unwrap();
        cfg.apply_overrides(&["--p".into(), "4".into(), "--r=0.5".into()]).unwrap();
        assert_eq!(cfg.get("p"), Some("4"));
        assert_eq!(cfg.get("r"), Some("0.5"));
        assert!(cfg.apply_overrides(&["--p".into()]).is_err());
        assert!(cfg.apply_overrides(&["p".into(), "1".into()]).is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let field = |text: &str, exp: &str| match resolve(text, exp) {
            Err(CliError::Validation { field, .. }) => field,
            other => panic!("{text}: {other:?}"),
        };
        assert_eq!(field("p=0.5", "norm"), "p");
        assert_eq!(field("r=2\nm_diff=2", "norm"), "m_diff");
        assert_eq!(field("resolution=100", "norm"), "resolution");
        assert_eq!(field("d=4", "norm"), "d");
        assert_eq!(field("family=dilated\nd=1", "moser"), "d");
        assert_eq!(field("n_min=5\nn_max=2", "embed"), "n_min");
        assert_eq!(field("p=1", "equiv"), "p");
        assert_eq!(field("modes=40", "norm"), "modes");
        assert_eq!(field("lattice=0.3", "localize"), "lattice");
        assert_eq!(field("bands=1000", "nikolskij"), "bands");
        assert_eq!(field("p0=3", "nikolskij"), "p0");
        assert_eq!(field("split=3", "trace"), "split");
        assert_eq!(field("family=dilated", "equiv"), "family");
        assert_eq!(field("n_max=14", "embed"), "n_max");
        assert_eq!(field("", "report"), "input");
        assert_eq!(field("", "bogus"), "experiment");
    }

    #[test]
    fn defaults_fill_the_snapshot() {
        let c = resolve("", "moser").unwrap();
        assert_eq!(c.family, Family::Dilated);
        assert_eq!(c.resolution, 1 << 16);
        assert_eq!(c.m_diff, 2);
        assert!(c.snapshot.starts_with("experiment=moser;"));
        assert!(c.snapshot.contains("r=1;"));
        assert!(!c.snapshot.contains("output"));
    }
}
