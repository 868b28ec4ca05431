use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use spdc_boson::analytic;
use spdc_boson::distribution::{output_distribution, sample_output};
use spdc_boson::parallel::with_workers;
use spdc_boson::unitary::frobenius_distance;
use spdc_boson::{FockConfiguration, Rate, Simulator};

use crate::config::Format;
use crate::error::{config_error, io_error, CliError};
use crate::files::{decomposition_csv, decomposition_json, DistributionFile, ReportRow, SampleFile, StatsFile};
use crate::formula::{run_sweep, Point};
use crate::run_config::RunConfig;

/// `|z|` above this marks a simulated rate as inconsistent with its prediction.
pub const Z_THRESHOLD: f64 = 5.0;

/// What a command printed and whether validation passed.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub validation_failure: Option<String>,
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_error(format!("creating {}", dir.display())))?;
    }
    fs::write(path, text).map_err(io_error(format!("writing {}", path.display())))
}

/// Writes to `--out` when given, else returns the text for stdout.
fn emit(cfg: &RunConfig, text: String, out: &mut Output) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            write_file(path, &text)?;
            out.stderr.push_str(&format!("wrote {}\n", path.display()));
        }
        None => out.stdout.push_str(&text),
    }
    Ok(())
}

pub fn analytic(cfg: &RunConfig) -> Result<Output, CliError> {
    let base = Point {
        n: cfg.n,
        sources: cfg.sources,
        r: cfg.r,
        eta_herald: cfg.eta_herald,
        eta_out: cfg.eta_out,
        epsilon: cfg.epsilon,
        epsilon_prime: cfg.epsilon_prime,
    };
    let result = run_sweep(cfg.formula, base, &cfg.sweep)?;
    let text = match cfg.format {
        Format::Csv => result.to_table().to_csv(),
        Format::Json => result.to_json(),
    };
    let mut out = Output::default();
    emit(cfg, text, &mut out)?;
    Ok(out)
}

fn report_row(quantity: &str, rate: Rate, predicted: f64) -> ReportRow {
    let z = rate.z_score(predicted);
    ReportRow {
        quantity: quantity.to_string(),
        successes: rate.successes,
        trials: rate.trials,
        empirical: rate.rate,
        predicted,
        std_error: rate.std_error,
        z: z.is_finite().then_some(z),
        breach: rate.trials > 0 && z.abs() > Z_THRESHOLD,
    }
}

pub fn simulate(cfg: &RunConfig) -> Result<Output, CliError> {
    let arch = cfg.architecture()?;
    let sim = Simulator::new(arch, cfg.unitary.build()?, cfg.caps)?;
    let stats = match &cfg.dump_trials {
        None => sim.run_ensemble_with_workers(cfg.seed, cfg.trials, cfg.workers)?,
        Some(path) => {
            let (stats, records) = sim.run_ensemble_records(cfg.seed, cfg.trials, cfg.workers)?;
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(io_error(format!("creating {}", dir.display())))?;
            }
            let file = fs::File::create(path).map_err(io_error(format!("writing {}", path.display())))?;
            let mut w = BufWriter::new(file);
            for rec in &records {
                serde_json::to_writer(&mut w, rec).expect("trial record serializes");
                w.write_all(b"\n").map_err(io_error(format!("writing {}", path.display())))?;
            }
            w.flush().map_err(io_error(format!("writing {}", path.display())))?;
            stats
        }
    };
    let n = arch.n;
    let report = vec![
        report_row("prep_success", stats.prep_success, analytic::prep_prob(&arch)),
        report_row("par_correct", stats.par_correct, analytic::par_prob(n, &arch.spdc, &arch.herald_detector)),
        report_row(
            "post_select_given_correct",
            stats.post_select_given_correct,
            analytic::post_select_prob(n, &arch.output_detector),
        ),
        report_row(
            "herald_contamination",
            stats.herald_contamination,
            1.0 - analytic::single_herald_fidelity(&arch.spdc, &arch.herald_detector),
        ),
    ];
    let breaches: Vec<String> = report.iter().filter(|r| r.breach).map(|r| r.quantity.clone()).collect();
    let file = StatsFile {
        master_seed: cfg.seed,
        trials: cfg.trials,
        n,
        sources: cfg.sources,
        modes: cfg.modes,
        r: cfg.r,
        eta_herald: cfg.eta_herald,
        eta_out: cfg.eta_out,
        unitary: cfg.unitary.describe(),
        stats,
        z_threshold: Z_THRESHOLD,
        passed: breaches.is_empty(),
        report,
    };
    let mut out = Output::default();
    let report = file.report_text();
    match &cfg.out {
        Some(path) => {
            write_file(path, &file.to_json())?;
            out.stdout.push_str(&report);
            out.stderr.push_str(&format!("wrote {}\n", path.display()));
        }
        None => {
            out.stdout.push_str(&file.to_json());
            out.stderr.push_str(&report);
        }
    }
    if !breaches.is_empty() {
        out.validation_failure = Some(format!("|z| > {Z_THRESHOLD} for {}", breaches.join(", ")));
    }
    Ok(out)
}

pub fn sample(cfg: &RunConfig) -> Result<Output, CliError> {
    let dir = cfg.out.as_ref().ok_or_else(|| config_error("out", "sample needs an output directory"))?;
    let u = cfg.unitary.build()?;
    let input = FockConfiguration::standard_input(cfg.n as usize, cfg.modes)?;
    let samples_wanted = usize::try_from(cfg.trials).map_err(|_| config_error("trials", "too many samples"))?;
    let dist = with_workers(cfg.workers, || output_distribution(&u, &input, &cfg.caps))?;
    let samples = sample_output(&dist, cfg.seed, samples_wanted);
    let unitary = cfg.unitary.describe();
    let dist_file = DistributionFile { seed: cfg.seed, unitary: unitary.clone(), distribution: dist };
    let sample_file = SampleFile { seed: cfg.seed, unitary, input, samples };
    let (dist_name, sample_name, dist_text, sample_text) = match cfg.format {
        Format::Csv => ("distribution.csv", "samples.csv", dist_file.to_csv(), sample_file.to_csv()),
        Format::Json => ("distribution.json", "samples.json", dist_file.to_json(), sample_file.to_json()),
    };
    let mut out = Output::default();
    for (name, text) in [(dist_name, dist_text), (sample_name, sample_text)] {
        let path = dir.join(name);
        write_file(&path, &text)?;
        out.stderr.push_str(&format!("wrote {}\n", path.display()));
    }
    Ok(out)
}

pub fn decompose(cfg: &RunConfig) -> Result<Output, CliError> {
    let u = cfg.unitary.build()?;
    let d = u.decomposition();
    let err = frobenius_distance(&d.recompose(), u.matrix());
    let unitary = cfg.unitary.describe();
    let text = match cfg.format {
        Format::Csv => decomposition_csv(cfg.seed, &unitary, d, err),
        Format::Json => decomposition_json(cfg.seed, &unitary, d, err),
    };
    let mut out = Output::default();
    emit(cfg, text, &mut out)?;
    Ok(out)
}
