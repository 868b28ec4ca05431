//! Distribution, sample, stats and decomposition files.

use serde::{Deserialize, Serialize};
use spdc_boson::unitary::Decomposition;
use spdc_boson::{EnsembleStats, FockConfiguration, OutputDistribution};

use crate::table::{format_float, Cell, Table};

fn mode_columns(m: usize) -> Vec<String> {
    (0..m).map(|j| format!("mode{j}")).collect()
}

fn parse_config(s: &str) -> Result<FockConfiguration, String> {
    let inner =
        s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(|| format!("bad configuration '{s}'"))?;
    let occ = inner
        .split(',')
        .map(|k| k.trim().parse::<u32>().map_err(|_| format!("bad occupation '{k}' in '{s}'")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FockConfiguration::new(occ))
}

fn row_config(row: &[Cell], m: usize) -> Result<FockConfiguration, String> {
    row[..m]
        .iter()
        .map(|c| c.as_int().and_then(|k| u32::try_from(k).ok()).ok_or_else(|| "occupation is not a count".to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(FockConfiguration::new)
}

/// Exact output distribution plus what is needed to rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub seed: u64,
    pub unitary: String,
    pub distribution: OutputDistribution,
}

impl DistributionFile {
    pub fn to_csv(&self) -> String {
        let d = &self.distribution;
        let m = d.input().modes();
        let mut cols = mode_columns(m);
        cols.push("probability".into());
        let mut t = Table::new(cols);
        t.comment("spdc-boson output distribution");
        t.comment(format!("seed = {}", self.seed));
        t.comment(format!("unitary = {}", self.unitary));
        t.comment(format!("input = {}", d.input()));
        t.comment(format!("entries = {}", d.len()));
        for (c, p) in d.entries() {
            let mut row: Vec<Cell> = c.occupations().iter().map(|&k| Cell::Int(k as i64)).collect();
            row.push(Cell::Float(*p));
            t.rows.push(row);
        }
        t.to_csv()
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let t = Table::parse(text)?;
        let header = |k: &str| t.header(k).ok_or_else(|| format!("missing '{k}' header"));
        let seed = header("seed")?.parse().map_err(|_| "bad seed header".to_string())?;
        let unitary = header("unitary")?.to_string();
        let input = parse_config(header("input")?)?;
        let m = input.modes();
        if t.columns.len() != m + 1 {
            return Err(format!("expected {} columns for {m} modes", m + 1));
        }
        let entries = t
            .rows
            .iter()
            .map(|row| {
                let p = row[m].as_f64().ok_or("probability is not a number")?;
                Ok((row_config(row, m)?, p))
            })
            .collect::<Result<Vec<_>, String>>()?;
        let distribution = OutputDistribution::from_entries(input, entries).map_err(|e| e.to_string())?;
        Ok(Self { seed, unitary, distribution })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("distribution serializes");
        s.push('\n');
        s
    }

    /// Parses and re-validates the entries.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let raw: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let d = raw.distribution;
        let distribution =
            OutputDistribution::from_entries(d.input().clone(), d.entries().to_vec()).map_err(|e| e.to_string())?;
        Ok(Self { distribution, ..raw })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFile {
    pub seed: u64,
    pub unitary: String,
    pub input: FockConfiguration,
    pub samples: Vec<FockConfiguration>,
}

impl SampleFile {
    pub fn to_csv(&self) -> String {
        let mut t = Table::new(mode_columns(self.input.modes()));
        t.comment("spdc-boson output samples");
        t.comment(format!("seed = {}", self.seed));
        t.comment(format!("unitary = {}", self.unitary));
        t.comment(format!("input = {}", self.input));
        t.comment(format!("samples = {}", self.samples.len()));
        for c in &self.samples {
            t.rows.push(c.occupations().iter().map(|&k| Cell::Int(k as i64)).collect());
        }
        t.to_csv()
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let t = Table::parse(text)?;
        let header = |k: &str| t.header(k).ok_or_else(|| format!("missing '{k}' header"));
        let input = parse_config(header("input")?)?;
        let samples = t.rows.iter().map(|r| row_config(r, input.modes())).collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            seed: header("seed")?.parse().map_err(|_| "bad seed header".to_string())?,
            unitary: header("unitary")?.to_string(),
            input,
            samples,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("samples serialize");
        s.push('\n');
        s
    }
}

/// One line of the simulation comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub quantity: String,
    pub successes: u64,
    pub trials: u64,
    pub empirical: f64,
    pub predicted: f64,
    pub std_error: f64,
    /// `None` when there were no trials to compare or the z-score is infinite.
    pub z: Option<f64>,
    pub breach: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsFile {
    pub master_seed: u64,
    pub trials: u64,
    pub n: u32,
    pub sources: u64,
    pub modes: usize,
    pub r: f64,
    pub eta_herald: f64,
    pub eta_out: f64,
    pub unitary: String,
    pub stats: EnsembleStats,
    pub z_threshold: f64,
    pub report: Vec<ReportRow>,
    pub passed: bool,
}

impl StatsFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }

    pub fn report_text(&self) -> String {
        let mut out =
            format!("{:<26} {:>12} {:>12} {:>12} {:>9}\n", "quantity", "empirical", "predicted", "std error", "z");
        for row in &self.report {
            let z = match (row.z, row.trials) {
                (_, 0) => "n/a".to_string(),
                (Some(z), _) => format!("{z:.3}"),
                (None, _) => "inf".to_string(),
            };
            out.push_str(&format!(
                "{:<26} {:>12.6} {:>12.6} {:>12.3e} {:>9}{}\n",
                row.quantity,
                row.empirical,
                row.predicted,
                row.std_error,
                z,
                if row.breach { "  BREACH" } else { "" }
            ));
        }
        out
    }
}

#[derive(Serialize)]
struct DecompositionJson<'a> {
    seed: u64,
    unitary: &'a str,
    frobenius_error: f64,
    decomposition: &'a Decomposition,
}

pub fn decomposition_csv(seed: u64, unitary: &str, d: &Decomposition, frobenius_error: f64) -> String {
    let cols = ["element", "index", "mode", "theta", "phi"].map(String::from).to_vec();
    let mut t = Table::new(cols);
    t.comment("spdc-boson reck decomposition");
    t.comment(format!("seed = {seed}"));
    t.comment(format!("unitary = {unitary}"));
    t.comment(format!("modes = {}", d.modes));
    t.comment(format!("rotations = {}", d.rotations.len()));
    t.comment(format!("frobenius_error = {}", format_float(frobenius_error)));
    t.comment("U = diag(exp(i phi)) T_K ... T_1; T_k mixes modes (mode, mode+1)");
    for (k, rot) in d.rotations.iter().enumerate() {
        t.rows.push(vec![
            Cell::text("rotation"),
            Cell::Int(k as i64 + 1),
            Cell::Int(rot.mode as i64),
            Cell::Float(rot.theta),
            Cell::Float(rot.phi),
        ]);
    }
    for (j, phase) in d.phases.iter().enumerate() {
        t.rows.push(vec![
            Cell::text("phase"),
            Cell::Int(j as i64),
            Cell::Int(j as i64),
            Cell::Empty,
            Cell::Float(*phase),
        ]);
    }
    t.to_csv()
}

pub fn decomposition_json(seed: u64, unitary: &str, d: &Decomposition, frobenius_error: f64) -> String {
    let mut s = serde_json::to_string_pretty(&DecompositionJson { seed, unitary, frobenius_error, decomposition: d })
        .expect("decomposition serializes");
    s.push('\n');
    s
}
