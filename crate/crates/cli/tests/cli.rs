use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spdc_boson_cli::files::{DistributionFile, SampleFile, StatsFile};
use spdc_boson_cli::table::Table;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tempfile::TempDir;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spdc-boson")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn analytic_table(args: &[&str]) -> Table {
    let out = cli(&[&["analytic"], args].concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    Table::parse(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

#[test]
fn saved_config_round_trips_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first.conf");
    let second = dir.path().join("second.conf");
    let out = cli(&[
        "analytic",
        "--preset",
        "fig5",
        "--epsilon-prime",
        "0.85",
        "--format",
        "json",
        "--save-config",
        path_str(&first),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = cli(&["analytic", "--config", path_str(&first), "--save-config", path_str(&second)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let a = fs::read_to_string(&first).unwrap();
    assert_eq!(a, fs::read_to_string(&second).unwrap());
    assert!(a.contains("epsilon-prime = 0.85\n"));
    assert!(a.contains("sweep = r:0.04:2:50\n"));
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# base\nformula = post_select_prob\nn = 3\neta = 0.5\n").unwrap();
    let t = analytic_table(&["--config", path_str(&conf), "--eta-out", "0.9"]);
    assert_eq!(t.rows.len(), 1);
    assert!((t.rows[0][0].as_f64().unwrap() - 0.729).abs() < 1e-15);
}

#[test]
fn preparation_surface_rises_toward_one() {
    let t = analytic_table(&["--preset", "fig2"]);
    assert_eq!(t.rows.len(), 100 * 10);
    assert_eq!(t.header("n"), Some("20"));
    for eta_idx in 0..10 {
        let column: Vec<f64> = (0..100).map(|i| t.rows[i * 10 + eta_idx][2].as_f64().unwrap()).collect();
        assert!(column.windows(2).all(|w| w[1] >= w[0]));
    }
    // At eta = 1 and N = 2000 the farm is effectively certain to deliver.
    assert!(t.rows[999][2].as_f64().unwrap() > 1.0 - 1e-12);
}

#[test]
fn fidelity_limit_curves_fall_toward_epsilon_squared() {
    let t = analytic_table(&["--preset", "fig4"]);
    assert_eq!(t.rows.len(), 4 * 61);
    for (k, eps) in [0.25, 0.5, 0.75, 0.95].into_iter().enumerate() {
        let curve: Vec<f64> = (0..61).map(|i| t.rows[k * 61 + i][2].as_f64().unwrap()).collect();
        assert_eq!(curve[0], 1.0);
        assert!(curve.windows(2).all(|w| w[1] < w[0]), "eps={eps}");
        let floor = eps * eps;
        assert!(curve[60] > floor && curve[60] - floor < 5e-3, "eps={eps} end {}", curve[60]);
    }
}

#[test]
fn fixed_fidelity_sweep_flags_exactly_the_infeasible_cells() {
    let t = analytic_table(&["--preset", "fig5"]);
    assert_eq!(t.rows.len(), 50 * 50);
    let mut flagged = 0;
    for row in &t.rows {
        let r = row[0].as_f64().unwrap();
        let n = row[1].as_int().unwrap() as f64;
        // Required efficiency, recomputed from scratch.
        let coth2 = (r.cosh() / r.sinh()).powi(2);
        let eta = 1.0 + (0.9f64.powf(1.0 / (2.0 * n)) - 1.0) * coth2;
        match &row[2] {
            spdc_boson_cli::table::Cell::Text(s) => {
                assert_eq!(s, "infeasible");
                assert!(eta < 0.0, "r={r} n={n} eta={eta}");
                flagged += 1;
            }
            cell => {
                assert!(eta >= 0.0);
                assert!((cell.as_f64().unwrap() - eta.powf(n)).abs() < 1e-12);
            }
        }
    }
    assert!(flagged > 0 && flagged < 2500);
}

#[test]
fn three_sweeps_and_unknown_axes_are_config_errors() {
    let out = cli(&["analytic", "--sweep", "r:0:1:2", "--sweep", "n:1:2:2", "--sweep", "eta:0:1:2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("sweep"));
    let out = cli(&["analytic", "--formula", "par_prob_limit", "--sweep", "sources:10:20:2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn simulation_agrees_with_closed_forms() {
    let dir = TempDir::new().unwrap();
    let stats = dir.path().join("stats.json");
    let out = cli(&["simulate", "--seed", "1", "--trials", "100000", "--out", path_str(&stats)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let file: StatsFile = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(file.master_seed, 1);
    assert!(file.passed);
    for row in &file.report[..3] {
        assert!(row.z.unwrap().abs() <= 3.0, "{row:?}");
    }
}

#[test]
fn lossless_simulation_is_exact() {
    let out = cli(&["simulate", "--eta", "1", "--sources", "400", "--trials", "2000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let file: StatsFile = serde_json::from_slice(&out.stdout).unwrap();
    for row in &file.report {
        assert_eq!(row.z, Some(0.0), "{row:?}");
    }
    assert_eq!(file.stats.prep_success.rate, 1.0);
    assert_eq!(file.stats.par_correct.rate, 1.0);
    assert_eq!(file.stats.post_select_given_correct.rate, 1.0);
}

#[test]
fn simulation_exit_codes() {
    let out = cli(&["simulate", "--trials", "0"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("'trials'"));
    // One trial has zero standard error, so any mismatch is an infinite z.
    let out = cli(&["simulate", "--trials", "1"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let out = cli(&["simulate", "--eta-herald", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("eta-herald"));
}

#[test]
fn stats_files_do_not_depend_on_workers() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, workers) in [(&a, "1"), (&b, "4")] {
        let out = cli(&["simulate", "--seed", "9", "--trials", "20000", "--workers", workers, "--out", path_str(path)]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn trial_dump_has_one_record_per_trial() {
    let dir = TempDir::new().unwrap();
    let dump = dir.path().join("trials.jsonl");
    let out = cli(&["simulate", "--trials", "500", "--dump-trials", path_str(&dump)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&dump).unwrap();
    assert_eq!(text.lines().count(), 500);
    for line in text.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        let t = rec["herald_counts"].as_array().unwrap();
        let s = rec["true_counts"].as_array().unwrap();
        assert_eq!(t.len(), 40);
        assert!(t.iter().zip(s).all(|(t, s)| t.as_u64() <= s.as_u64()));
    }
    let out = cli(&["analytic", "--dump-trials", "x.jsonl"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn beamsplitter_samples_never_coincide() {
    let dir = TempDir::new().unwrap();
    let out = cli(&["sample", "--preset", "beamsplitter", "--trials", "10000", "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let samples = SampleFile::from_csv(&fs::read_to_string(dir.path().join("samples.csv")).unwrap()).unwrap();
    assert_eq!(samples.samples.len(), 10_000);
    assert!(samples.samples.iter().all(|c| c.occupations() != [1, 1]));
}

#[test]
fn identity_samples_equal_the_input() {
    let dir = TempDir::new().unwrap();
    let out = cli(&[
        "sample",
        "--preset",
        "identity",
        "--n",
        "2",
        "--modes",
        "4",
        "--trials",
        "200",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let samples = SampleFile::from_csv(&fs::read_to_string(dir.path().join("samples.csv")).unwrap()).unwrap();
    assert!(samples.samples.iter().all(|c| c.occupations() == [1, 1, 0, 0]));
}

#[test]
fn samples_fit_the_emitted_distribution() {
    let dir = TempDir::new().unwrap();
    let out = cli(&[
        "sample",
        "--n",
        "2",
        "--modes",
        "4",
        "--seed",
        "3",
        "--trials",
        "100000",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let dist_text = fs::read_to_string(dir.path().join("distribution.csv")).unwrap();
    let dist = DistributionFile::from_csv(&dist_text).unwrap();
    assert_eq!(dist.to_csv(), dist_text);
    assert_eq!(dist.unitary, "haar(modes=4, seed=3)");
    let samples = SampleFile::from_csv(&fs::read_to_string(dir.path().join("samples.csv")).unwrap()).unwrap();

    let entries = dist.distribution.entries();
    let mut counts = vec![0u64; entries.len()];
    for s in &samples.samples {
        counts[entries.iter().position(|(c, _)| c == s).unwrap()] += 1;
    }
    let total = samples.samples.len() as f64;
    let mut stat = 0.0;
    let mut cells = 0;
    for (k, (_, p)) in counts.iter().zip(entries) {
        if *p > 0.0 {
            let e = p * total;
            stat += (*k as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    let chi = ChiSquared::new((cells - 1) as f64).unwrap();
    assert!(chi.sf(stat) > 0.001, "chi2 {stat} on {} dof", cells - 1);
}

#[test]
fn sample_files_reproduce_from_seed() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let out = cli(&[
            "sample",
            "--n",
            "3",
            "--modes",
            "6",
            "--seed",
            "12",
            "--trials",
            "3000",
            "--format",
            "json",
            "--out",
            path_str(dir.path()),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for name in ["distribution.json", "samples.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
    let text = fs::read_to_string(a.path().join("distribution.json")).unwrap();
    assert_eq!(DistributionFile::from_json(&text).unwrap().to_json(), text);
}

#[test]
fn caps_come_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let run = |var: &str, value: &str| {
        Command::new(env!("CARGO_BIN_EXE_spdc-boson"))
            .args(["sample", "--n", "2", "--modes", "4", "--trials", "10", "--out", path_str(dir.path())])
            .env(var, value)
            .output()
            .unwrap()
    };
    let out = run("SPDC_BOSON_ENUMERATION_CAP", "5");
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("10"), "{}", stderr(&out));
    assert_eq!(code(&run("SPDC_BOSON_PERMANENT_CAP", "1")), 2);
    assert_eq!(code(&run("SPDC_BOSON_PERMANENT_CAP", "lots")), 1);
    assert_eq!(code(&run("SPDC_BOSON_ENUMERATION_CAP", "10")), 0);
}

#[test]
fn decomposition_table_is_complete() {
    let out = cli(&["decompose", "--modes", "6", "--seed", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let t = Table::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let rotations: usize = t.header("rotations").unwrap().parse().unwrap();
    assert!(rotations <= 15);
    let err: f64 = t.header("frobenius_error").unwrap().parse().unwrap();
    assert!(err < 1e-10);
    assert_eq!(t.rows.len(), rotations + 6);
    assert_eq!(t.header("unitary"), Some("haar(modes=6, seed=5)"));
}
