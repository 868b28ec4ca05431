//! Analytic formulas addressable by name, and grid sweeps over them.

use serde::Serialize;
use spdc_boson::analytic::{self, ConfidenceBounds, DetectorModel, SpdcParams};

use crate::config::SweepAxis;
use crate::error::{config_error, CliError};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    PrepProb,
    ParProb,
    ParProbBounded,
    ParProbLimit,
    PostSelectProb,
    PostProbGivenFidelity,
    EtaFromFidelity,
    EtaForPost,
    HeraldProb,
    SingleHeraldFidelity,
    MeanPhotons,
}

const ALL: &[Formula] = &[
    Formula::PrepProb,
    Formula::ParProb,
    Formula::ParProbBounded,
    Formula::ParProbLimit,
    Formula::PostSelectProb,
    Formula::PostProbGivenFidelity,
    Formula::EtaFromFidelity,
    Formula::EtaForPost,
    Formula::HeraldProb,
    Formula::SingleHeraldFidelity,
    Formula::MeanPhotons,
];

/// One grid point: every parameter any formula reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub n: u32,
    pub sources: u64,
    pub r: f64,
    pub eta_herald: f64,
    pub eta_out: f64,
    pub epsilon: f64,
    pub epsilon_prime: f64,
}

impl Point {
    fn get(&self, param: &str) -> Cell {
        match param {
            "n" => Cell::Int(self.n as i64),
            "sources" => Cell::Int(self.sources as i64),
            "r" => Cell::Float(self.r),
            "eta-herald" | "eta" => Cell::Float(self.eta_herald),
            "eta-out" => Cell::Float(self.eta_out),
            "epsilon" => Cell::Float(self.epsilon),
            "epsilon-prime" => Cell::Float(self.epsilon_prime),
            _ => unreachable!("unknown parameter {param}"),
        }
    }

    fn set(&mut self, param: &str, v: f64) -> Result<(), CliError> {
        let integral = |v: f64| -> Result<f64, CliError> {
            let k = v.round();
            if (v - k).abs() > 1e-9 || k < 0.0 {
                return Err(config_error("sweep", format!("{param} takes non-negative integers, got {v}")));
            }
            Ok(k)
        };
        match param {
            "n" => self.n = integral(v)? as u32,
            "sources" => self.sources = integral(v)? as u64,
            "r" => self.r = v,
            "eta" => {
                self.eta_herald = v;
                self.eta_out = v;
            }
            "eta-herald" => self.eta_herald = v,
            "eta-out" => self.eta_out = v,
            "epsilon" => self.epsilon = v,
            "epsilon-prime" => self.epsilon_prime = v,
            _ => return Err(config_error("sweep", format!("unknown parameter {param}"))),
        }
        Ok(())
    }
}

/// One evaluated grid point: a value, or the reason there is none.
pub type Outcome = Result<f64, String>;

impl Formula {
    pub fn name(self) -> &'static str {
        match self {
            Formula::PrepProb => "prep_prob",
            Formula::ParProb => "par_prob",
            Formula::ParProbBounded => "par_prob_bounded",
            Formula::ParProbLimit => "par_prob_limit",
            Formula::PostSelectProb => "post_select_prob",
            Formula::PostProbGivenFidelity => "post_prob_given_fidelity",
            Formula::EtaFromFidelity => "eta_from_fidelity",
            Formula::EtaForPost => "eta_for_post",
            Formula::HeraldProb => "herald_prob",
            Formula::SingleHeraldFidelity => "single_herald_fidelity",
            Formula::MeanPhotons => "mean_photons",
        }
    }

    pub fn names() -> Vec<&'static str> {
        ALL.iter().map(|f| f.name()).collect()
    }

    pub fn from_name(s: &str) -> Option<Self> {
        ALL.iter().copied().find(|f| f.name() == s)
    }

    /// Parameters the formula reads, in header order.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Formula::PrepProb => &["n", "sources", "r", "eta-herald"],
            Formula::ParProb => &["n", "r", "eta-herald"],
            Formula::ParProbBounded => &["n", "r", "epsilon"],
            Formula::ParProbLimit => &["r", "epsilon"],
            Formula::PostSelectProb => &["n", "eta-out"],
            Formula::PostProbGivenFidelity | Formula::EtaFromFidelity => &["n", "r", "epsilon-prime"],
            Formula::EtaForPost => &["n", "epsilon"],
            Formula::HeraldProb | Formula::SingleHeraldFidelity => &["r", "eta-herald"],
            Formula::MeanPhotons => &["r"],
        }
    }

    fn reads(self, param: &str) -> bool {
        let p = self.params();
        match param {
            "eta" => p.contains(&"eta-herald") || p.contains(&"eta-out"),
            other => p.contains(&other),
        }
    }

    pub fn check_axes(self, axes: &[SweepAxis]) -> Result<(), CliError> {
        for axis in axes {
            if !self.reads(&axis.param) {
                return Err(config_error(
                    "sweep",
                    format!(
                        "{} does not depend on '{}' (it reads {})",
                        self.name(),
                        axis.param,
                        self.params().join(", ")
                    ),
                ));
            }
            if axis.is_empty() {
                return Err(config_error("sweep", format!("axis '{}' has no points", axis.param)));
            }
        }
        Ok(())
    }

    /// Evaluates at one point. Points where the required efficiency falls
    /// outside [0, 1] or `coth^2 r` is singular come back as `Err(reason)`;
    /// any other failure is a configuration error.
    pub fn eval(self, p: &Point) -> Result<Outcome, CliError> {
        let spdc = || SpdcParams::new(p.r).map_err(|e| config_error("r", e.to_string()));
        let herald = || DetectorModel::new(p.eta_herald).map_err(|e| config_error("eta-herald", e.to_string()));
        let out = || DetectorModel::new(p.eta_out).map_err(|e| config_error("eta-out", e.to_string()));
        let bounds =
            || ConfidenceBounds::new(p.epsilon, p.epsilon_prime).map_err(|e| config_error("epsilon", e.to_string()));
        let n = || if p.n == 0 { Err(config_error("n", "need at least one photon")) } else { Ok(p.n) };
        let flag = |r: spdc_boson::Result<f64>| -> Result<Outcome, CliError> {
            match r {
                Ok(v) => Ok(Ok(v)),
                Err(spdc_boson::Error::Infeasible { eta }) => {
                    Ok(Err(format!("required detector efficiency {eta:.6e} outside [0 1]")))
                }
                Err(spdc_boson::Error::SingularCoth) => Ok(Err("coth^2 r singular at r = 0".to_string())),
                Err(e) => Err(e.into()),
            }
        };
        Ok(Ok(match self {
            Formula::PrepProb => {
                if p.sources < p.n as u64 {
                    return Err(config_error(
                        "sources",
                        format!("{} sources cannot supply {} photons", p.sources, p.n),
                    ));
                }
                analytic::prep_prob_counts(n()? as u64, p.sources, &spdc()?, &herald()?)?
            }
            Formula::ParProb => analytic::par_prob(n()?, &spdc()?, &herald()?),
            Formula::ParProbBounded => analytic::par_prob_bounded(n()?, &spdc()?, &bounds()?),
            Formula::ParProbLimit => analytic::par_prob_limit(&spdc()?, &bounds()?),
            Formula::PostSelectProb => analytic::post_select_prob(n()?, &out()?),
            Formula::PostProbGivenFidelity => {
                return flag(analytic::post_prob_given_fidelity(n()?, &spdc()?, &bounds()?))
            }
            Formula::EtaFromFidelity => return flag(analytic::eta_from_fidelity(n()?, &spdc()?, &bounds()?)),
            Formula::EtaForPost => analytic::eta_for_post(n()?, &bounds()?),
            Formula::HeraldProb => analytic::herald_prob(&spdc()?, &herald()?, 1),
            Formula::SingleHeraldFidelity => analytic::single_herald_fidelity(&spdc()?, &herald()?),
            Formula::MeanPhotons => spdc()?.mean_photons(),
        }))
    }
}

/// Evaluated grid, first axis slowest.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub formula: Formula,
    pub base: Point,
    pub axes: Vec<SweepAxis>,
    pub rows: Vec<(Point, Outcome)>,
}

pub fn run_sweep(formula: Formula, base: Point, axes: &[SweepAxis]) -> Result<SweepResult, CliError> {
    formula.check_axes(axes)?;
    let mut points = vec![base];
    for axis in axes {
        let values = axis.points();
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for &v in &values {
                let mut q = *p;
                q.set(&axis.param, v)?;
                next.push(q);
            }
        }
        points = next;
    }
    let rows = points.into_iter().map(|p| formula.eval(&p).map(|o| (p, o))).collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult { formula, base, axes: axes.to_vec(), rows })
}

#[derive(Serialize)]
struct JsonRow {
    axes: Vec<f64>,
    value: Option<f64>,
    reason: Option<String>,
}

#[derive(Serialize)]
struct JsonSweep<'a> {
    formula: &'a str,
    fixed: Vec<(String, f64)>,
    axes: Vec<String>,
    rows: Vec<JsonRow>,
}

impl SweepResult {
    fn fixed(&self) -> Vec<&'static str> {
        self.formula
            .params()
            .iter()
            .copied()
            .filter(|p| !self.axes.iter().any(|a| a.param == *p || (a.param == "eta" && p.starts_with("eta"))))
            .collect()
    }

    pub fn to_table(&self) -> Table {
        let name = self.formula.name();
        let mut columns: Vec<String> = self.axes.iter().map(|a| a.param.clone()).collect();
        columns.push(name.to_string());
        columns.push("reason".to_string());
        let mut t = Table::new(columns);
        t.comment("spdc-boson analytic sweep");
        t.comment(format!("formula = {name}"));
        for p in self.fixed() {
            let v = match self.base.get(p) {
                Cell::Int(k) => k.to_string(),
                Cell::Float(x) => x.to_string(),
                _ => unreachable!(),
            };
            t.comment(format!("{p} = {v}"));
        }
        t.comment(format!("rows = {}", self.rows.len()));
        for (p, outcome) in &self.rows {
            let mut row: Vec<Cell> = self.axes.iter().map(|a| p.get(&a.param)).collect();
            match outcome {
                Ok(v) => row.extend([Cell::Float(*v), Cell::Empty]),
                Err(reason) => row.extend([Cell::text("infeasible"), Cell::text(reason.clone())]),
            }
            t.rows.push(row);
        }
        t
    }

    pub fn to_json(&self) -> String {
        let doc = JsonSweep {
            formula: self.formula.name(),
            fixed: self.fixed().iter().map(|p| (p.to_string(), self.base.get(p).as_f64().unwrap())).collect(),
            axes: self.axes.iter().map(|a| a.param.clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|(p, o)| JsonRow {
                    axes: self.axes.iter().map(|a| p.get(&a.param).as_f64().unwrap()).collect(),
                    value: o.as_ref().ok().copied(),
                    reason: o.as_ref().err().cloned(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("sweep serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Point {
        Point { n: 20, sources: 40, r: 0.5, eta_herald: 0.5, eta_out: 0.9, epsilon: 0.5, epsilon_prime: 0.9 }
    }

    #[test]
    fn every_name_round_trips() {
        for name in Formula::names() {
            assert_eq!(Formula::from_name(name).unwrap().name(), name);
        }
    }

    #[test]
    fn grid_has_one_row_per_point() {
        let axes = vec!["sources:20:2000:100".parse().unwrap(), "eta-herald:0.1:1:10".parse().unwrap()];
        let res = run_sweep(Formula::PrepProb, base(), &axes).unwrap();
        assert_eq!(res.rows.len(), 1000);
        assert_eq!(res.rows[999].0.sources, 2000);
        let t = res.to_table();
        assert_eq!(t.rows.len(), 1000);
        assert_eq!(t.columns, ["sources", "eta-herald", "prep_prob", "reason"]);
        assert_eq!(t.header("n"), Some("20"));
        assert_eq!(t.header("r"), Some("0.5"));
    }

    #[test]
    fn infeasible_points_are_flagged() {
        let axes = vec!["r:0:0.2:3".parse().unwrap()];
        let p = Point { n: 1, ..base() };
        let res = run_sweep(Formula::PostProbGivenFidelity, p, &axes).unwrap();
        assert!(res.rows[0].1.as_ref().unwrap_err().contains("singular"));
        assert!(res.rows[1].1.as_ref().unwrap_err().contains("outside"));
        let csv = res.to_table().to_csv();
        assert_eq!(csv.matches(",infeasible,").count(), 3);
    }

    #[test]
    fn unrelated_axis_rejected() {
        let axes = vec!["sources:1:5:5".parse().unwrap()];
        assert!(run_sweep(Formula::ParProbLimit, base(), &axes).is_err());
        let axes = vec!["n:1.5:3:2".parse().unwrap()];
        assert!(run_sweep(Formula::ParProb, base(), &axes).is_err());
    }
}
