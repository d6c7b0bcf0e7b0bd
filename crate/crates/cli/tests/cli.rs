use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn mixnorm(dir: &Path, workers: Option<usize>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mixnorm"));
    cmd.current_dir(dir).args(args);
    match workers {
        Some(n) => cmd.env("MIXNORM_WORKERS", n.to_string()),
        None => cmd.env_remove("MIXNORM_WORKERS"),
    };
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn read_table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    mixnorm_cli::table::read_csv(path).unwrap()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let (header, rows) = read_table(path);
    let i = header.iter().position(|h| h == name).unwrap();
    rows.into_iter().map(|r| r[i].clone()).collect()
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", "# equivalence on a small family\nfamily=random\ncount=4\nresolution=32\nseed=7\n");
    let cfg = cfg.to_str().unwrap();
    let a = mixnorm(dir.path(), Some(1), &["equiv", "--config", cfg, "--output", "a.csv"]);
    let b = mixnorm(dir.path(), Some(3), &["equiv", "--config", cfg, "--output", "b.csv"]);
    assert!(a.status.success() && b.status.success());
    let a_bytes = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a_bytes, std::fs::read(dir.path().join("b.csv")).unwrap());
    assert!(!a_bytes.contains(&b'\r'));
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["workers"], 1);
    assert_eq!(meta["rows"], 4);
    assert_eq!(meta["row_seconds"].as_array().unwrap().len(), 4);
}

#[test]
fn zero_function_has_all_norms_zero() {
    let dir = TempDir::new().unwrap();
    let out = mixnorm(dir.path(), None, &["norm", "--family", "zero", "--resolution", "32", "--output", "z.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for c in ["diff_norm", "fourier_norm", "sobolev_norm", "sup_norm", "lp_norm"] {
        let v = column(&dir.path().join("z.csv"), c);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].parse::<f64>().unwrap(), 0.0, "{c}");
    }
}

#[test]
fn validation_failures_exit_2_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    for (args, field) in [
        (vec!["norm", "--p", "0.5"], "`p`"),
        (vec!["norm", "--r", "2", "--m_diff", "2"], "`m_diff`"),
        (vec!["norm", "--resolution", "48"], "`resolution`"),
        (vec!["moser", "--family", "dilated", "--d", "1"], "`d`"),
        (vec!["norm", "--unknown", "1"], "`unknown`"),
        (vec!["frobnicate"], "`experiment`"),
    ] {
        let mut full = args.clone();
        full.extend(["--output", "never.csv"]);
        let out = mixnorm(dir.path(), None, &full);
        assert_eq!(out.status.code(), Some(mixnorm_cli::EXIT_VALIDATION), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(field), "{args:?}");
        assert!(!dir.path().join("never.csv").exists());
    }
}

#[test]
fn io_failures_exit_4() {
    let dir = TempDir::new().unwrap();
    let out = mixnorm(dir.path(), None, &["norm", "--config", "missing.cfg"]);
    assert_eq!(out.status.code(), Some(mixnorm_cli::EXIT_IO));
    let out = mixnorm(
        dir.path(),
        None,
        &["norm", "--count", "1", "--resolution", "16", "--output", "no/such/dir/x.csv"],
    );
    assert_eq!(out.status.code(), Some(mixnorm_cli::EXIT_IO));
}

#[test]
fn report_with_no_numeric_rows_is_an_error() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("in.csv"), "n,ratio\n1,\n2,\n").unwrap();
    let out = mixnorm(dir.path(), None, &["report", "--input", "in.csv", "--column", "ratio"]);
    assert_eq!(out.status.code(), Some(mixnorm_cli::EXIT_VALIDATION));
    assert!(!dir.path().join("results.csv").exists());
}

#[test]
fn describe_lists_columns() {
    let dir = TempDir::new().unwrap();
    let out = mixnorm(dir.path(), None, &["--describe"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("columns: experiment,params,member,n,ratio,fit_slope,fit_residual"));
    assert!(text.contains("MIXNORM_WORKERS"));
}

#[test]
fn json_and_csv_outputs_agree() {
    let dir = TempDir::new().unwrap();
    let base = ["trace", "--count", "3", "--resolution", "32"];
    let csv_run = mixnorm(dir.path(), None, &[&base[..], &["--output", "t.csv"]].concat());
    let json_run = mixnorm(dir.path(), None, &[&base[..], &["--output", "t.json"]].concat());
    assert!(csv_run.status.success() && json_run.status.success());
    let (header, rows) = read_table(&dir.path().join("t.csv"));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("t.json")).unwrap()).unwrap();
    let objs = json.as_array().unwrap();
    assert_eq!(objs.len(), rows.len());
    for (row, obj) in rows.iter().zip(objs) {
        assert_eq!(obj.as_object().unwrap().len(), header.len());
        for (h, cell) in header.iter().zip(row) {
            match &obj[h] {
                serde_json::Value::Number(n) => assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap()),
                serde_json::Value::String(s) => assert_eq!(cell, s),
                other => panic!("{h}: {other}"),
            }
        }
    }
}

#[test]
fn report_refits_an_emitted_column() {
    let dir = TempDir::new().unwrap();
    let out = mixnorm(
        dir.path(),
        None,
        &["embed", "--r", "0.3", "--resolution", "16384", "--n_max", "6", "--output", "e.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let slope: f64 = column(&dir.path().join("e.csv"), "fit_slope")[0].parse().unwrap();
    let out = mixnorm(dir.path(), None, &["report", "--input", "e.csv", "--column", "ratio", "--output", "r.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let refit: f64 = column(&dir.path().join("r.csv"), "fit_slope")[0].parse().unwrap();
    assert_eq!(slope, refit);
}

#[test]
fn moser_ratio_on_dilated_pairs_grows_at_rate_one_half() {
    let dir = TempDir::new().unwrap();
    let out = mixnorm(
        dir.path(),
        None,
        &["moser", "--family", "dilated", "--r", "1", "--p", "2", "--d", "2", "--output", "m.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.path().join("m.csv");
    assert_eq!(column(&path, "n"), (0..=8).map(|n| n.to_string()).collect::<Vec<_>>());
    let slope: f64 = column(&path, "fit_slope")[0].parse().unwrap();
    assert!((slope - 0.5).abs() <= 0.1, "slope {slope}");
}
