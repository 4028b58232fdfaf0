use std::fmt;
use std::str::FromStr;

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

use super::rules::{apply_rules, order_rules, DerivedRule};
use crate::dynamics::{steady_state, DEFAULT_TOL};
use crate::error::{FridgeError, Result};
use crate::models::{ModelParams, ModelTag};
use crate::observables::{heat_currents, temperatures, TemperatureKind};

/// A quantity reported per sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Observable {
    /// Temperature of particle `n` (1-based).
    Temperature(usize),
    /// Heat current into particle `n` (1-based).
    HeatCurrent(usize),
    /// `T1` minus the bath temperature of particle 1.
    ColdShift,
    /// Sum of all heat currents.
    TotalHeat,
    /// Ground population of particle 1.
    GroundPopulation,
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Temperature(n) => write!(f, "T{n}"),
            Observable::HeatCurrent(n) => write!(f, "Q{n}"),
            Observable::ColdShift => f.write_str("T1-Tbath"),
            Observable::TotalHeat => f.write_str("Qsum"),
            Observable::GroundPopulation => f.write_str("r1"),
        }
    }
}

impl FromStr for Observable {
    type Err = FridgeError;
    fn from_str(s: &str) -> Result<Self> {
        let indexed = |rest: &str| rest.parse::<usize>().ok().filter(|n| (1..=3).contains(n));
        match s {
            "T1-Tbath" => Ok(Observable::ColdShift),
            "Qsum" => Ok(Observable::TotalHeat),
            "r1" => Ok(Observable::GroundPopulation),
            _ => {
                if let Some(n) = s.strip_prefix('T').and_then(indexed) {
                    Ok(Observable::Temperature(n))
                } else if let Some(n) = s.strip_prefix('Q').and_then(indexed) {
                    Ok(Observable::HeatCurrent(n))
                } else {
                    Err(FridgeError::InvalidSweep(format!(
                        "unknown observable `{s}` (expected T1..T3, Q1..Q3, T1-Tbath, Qsum, r1)"
                    )))
                }
            }
        }
    }
}

impl TryFrom<String> for Observable {
    type Error = FridgeError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Observable> for String {
    fn from(o: Observable) -> String {
        o.to_string()
    }
}

/// `T1, T2, [T3], Q1, Q2, [Q3]`.
pub fn default_outputs(tag: ModelTag) -> Vec<Observable> {
    let n = if tag == ModelTag::III { 2 } else { 3 };
    (1..=n)
        .map(Observable::Temperature)
        .chain((1..=n).map(Observable::HeatCurrent))
        .collect()
}

/// Ordered sample values of one named parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let axis = Self {
            name: name.into(),
            values,
        };
        axis.validate()?;
        Ok(axis)
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linear(name: impl Into<String>, start: f64, stop: f64, count: usize) -> Result<Self> {
        let values = match count {
            0 => vec![],
            1 => vec![start],
            _ => (0..count)
                .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
                .collect(),
        };
        Self::new(name, values)
    }

    /// `count` log-spaced values from `start` to `stop` inclusive (both > 0).
    pub fn logarithmic(name: impl Into<String>, start: f64, stop: f64, count: usize) -> Result<Self> {
        if !(start > 0.0 && stop > 0.0) {
            return Err(FridgeError::InvalidSweep(
                "logarithmic axis needs positive end points".into(),
            ));
        }
        let (a, b) = (start.log10(), stop.log10());
        let values = match count {
            0 => vec![],
            1 => vec![start],
            _ => (0..count)
                .map(|k| match k {
                    0 => start,
                    k if k == count - 1 => stop,
                    k => 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64),
                })
                .collect(),
        };
        Self::new(name, values)
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(FridgeError::InvalidSweep(format!("axis `{}` has no values", self.name)));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(FridgeError::InvalidSweep(format!(
                "axis `{}` has non-finite values",
                self.name
            )));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(FridgeError::InvalidSweep(format!(
                "axis `{}` must be strictly monotone",
                self.name
            )));
        }
        Ok(())
    }
}

/// One varied parameter on top of a fixed base model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub label: String,
    pub base: ModelParams,
    pub axis: Axis,
    #[serde(default)]
    pub rules: Vec<DerivedRule>,
    pub outputs: Vec<Observable>,
    pub tol: f64,
    /// Free-form provenance stamped into the output metadata.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl SweepConfig {
    pub fn new(base: ModelParams, axis: Axis) -> Self {
        Self {
            label: format!("{}-sweep", axis.name),
            outputs: default_outputs(base.tag()),
            base,
            axis,
            rules: Vec::new(),
            tol: DEFAULT_TOL,
            notes: Vec::new(),
        }
    }

    pub fn with_rule(mut self, rule: &str) -> Result<Self> {
        self.rules.push(rule.parse()?);
        Ok(self)
    }

    pub fn with_outputs(mut self, outputs: Vec<Observable>) -> Self {
        self.outputs = outputs;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Checks the axis, the rules and every referenced name. Returns the rules
    /// in evaluation order.
    pub fn validate(&self) -> Result<Vec<DerivedRule>> {
        self.axis.validate()?;
        if !self.base.accepts(&self.axis.name) {
            return Err(FridgeError::UnknownParameter {
                name: self.axis.name.clone(),
                model: self.base.tag().to_string(),
            });
        }
        let ordered = order_rules(&self.rules)?;
        for rule in &ordered {
            if rule.target == self.axis.name {
                return Err(FridgeError::InvalidSweep(format!(
                    "rule `{rule}` overwrites the swept parameter"
                )));
            }
            if !self.base.accepts(&rule.target) {
                return Err(FridgeError::UnknownParameter {
                    name: rule.target.clone(),
                    model: self.base.tag().to_string(),
                });
            }
        }
        let particles = if self.base.tag() == ModelTag::III { 2 } else { 3 };
        for o in &self.outputs {
            if let Observable::Temperature(n) | Observable::HeatCurrent(n) = o {
                if *n > particles {
                    return Err(FridgeError::InvalidSweep(format!(
                        "observable {o} needs {n} particles, model {} has {particles}",
                        self.base.tag()
                    )));
                }
            }
        }
        let mut probe = self.base;
        probe.set(&self.axis.name, self.axis.values[0])?;
        apply_rules(&mut probe, &ordered)?;
        Ok(ordered)
    }

    /// Parameters at one axis value, after the derived rules.
    pub fn point(&self, value: f64, ordered: &[DerivedRule]) -> Result<ModelParams> {
        let mut p = self.base;
        p.set(&self.axis.name, value)?;
        apply_rules(&mut p, ordered)?;
        Ok(p)
    }

    pub fn columns(&self) -> Vec<String> {
        std::iter::once(self.axis.name.clone())
            .chain(self.outputs.iter().map(ToString::to_string))
            .chain(std::iter::once("residual".to_string()))
            .collect()
    }
}

bitflags! {
    /// Per-row conditions a reader should know about.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct RowFlags: u16 {
        /// Residual above the configured tolerance.
        const UNCONVERGED = 1;
        /// Stationary manifold possibly degenerate.
        const DEGENERATE = 1 << 1;
        const NEGATIVE_TEMPERATURE = 1 << 2;
        const INFINITE_TEMPERATURE = 1 << 3;
        const GROUND_STATE = 1 << 4;
        /// Coupling or rate outside the weak-coupling regime.
        const STRONG_COUPLING = 1 << 5;
        /// The model could not be built or solved; values are NaN.
        const FAILED = 1 << 6;
    }
}

const FLAG_NAMES: [(RowFlags, &str); 7] = [
    (RowFlags::UNCONVERGED, "unconverged"),
    (RowFlags::DEGENERATE, "degenerate"),
    (RowFlags::NEGATIVE_TEMPERATURE, "negative_T"),
    (RowFlags::INFINITE_TEMPERATURE, "infinite_T"),
    (RowFlags::GROUND_STATE, "ground_state"),
    (RowFlags::STRONG_COUPLING, "strong_coupling"),
    (RowFlags::FAILED, "failed"),
];

impl RowFlags {
    /// `;`-separated flag names, empty when clear.
    pub fn label(&self) -> String {
        FLAG_NAMES
            .iter()
            .filter(|(f, _)| self.contains(*f))
            .map(|(_, n)| *n)
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn from_label(s: &str) -> Option<Self> {
        s.split(';')
            .filter(|t| !t.is_empty())
            .try_fold(RowFlags::empty(), |acc, t| {
                FLAG_NAMES
                    .iter()
                    .find(|(_, n)| *n == t)
                    .map(|(f, _)| acc | *f)
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Axis value, the requested observables, then the residual.
    pub values: Vec<f64>,
    pub flags: RowFlags,
    /// Failure message for rows flagged [`RowFlags::FAILED`].
    pub error: Option<String>,
}

/// Evaluates one axis point. Never fails: problems become row flags.
pub fn evaluate_point(config: &SweepConfig, ordered: &[DerivedRule], value: f64) -> SweepRow {
    match try_evaluate(config, ordered, value) {
        Ok(row) => row,
        Err(e) => {
            let mut values = vec![f64::NAN; config.outputs.len() + 2];
            values[0] = value;
            SweepRow {
                values,
                flags: RowFlags::FAILED,
                error: Some(e.to_string()),
            }
        }
    }
}

fn try_evaluate(config: &SweepConfig, ordered: &[DerivedRule], value: f64) -> Result<SweepRow> {
    let params = config.point(value, ordered)?;
    let model = params.build()?;
    let solution = steady_state(&model, config.tol)?;
    let temps = temperatures(&model, &solution.rho)?;
    let currents = heat_currents(&model, &solution.rho)?;

    let mut flags = RowFlags::empty();
    flags.set(RowFlags::UNCONVERGED, !solution.converged);
    flags.set(RowFlags::DEGENERATE, solution.degenerate);
    flags.set(RowFlags::STRONG_COUPLING, !model.warnings().is_empty());
    for t in &temps {
        match t.kind {
            TemperatureKind::Negative => flags |= RowFlags::NEGATIVE_TEMPERATURE,
            TemperatureKind::Infinite => flags |= RowFlags::INFINITE_TEMPERATURE,
            TemperatureKind::Ground => flags |= RowFlags::GROUND_STATE,
            TemperatureKind::Finite => {}
        }
    }

    let mut values = Vec::with_capacity(config.outputs.len() + 2);
    values.push(value);
    for o in &config.outputs {
        values.push(match *o {
            Observable::Temperature(n) => temps[n - 1].value,
            Observable::HeatCurrent(n) => currents.per_particle[n - 1],
            Observable::ColdShift => temps[0].value - params.cold_bath(),
            Observable::TotalHeat => currents.total(),
            Observable::GroundPopulation => {
                crate::tensor::reduced_state(&solution.rho, 0, model.shape())?[(0, 0)].re
            }
        });
    }
    values.push(solution.residual);
    Ok(SweepRow {
        values,
        flags,
        error: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub label: String,
    pub model: ModelTag,
    pub axis: String,
    /// Base parameters before the axis value and rules are applied.
    pub fixed: Vec<(String, f64)>,
    pub rules: Vec<String>,
    pub tol: f64,
    pub code_version: String,
    pub max_residual: f64,
    pub flagged_rows: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepTable {
    pub fn assemble(config: &SweepConfig, rows: Vec<SweepRow>) -> Self {
        let max_residual = rows
            .iter()
            .filter_map(|r| r.values.last().copied())
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        let flagged_rows = rows
            .iter()
            .filter(|r| r.flags.intersects(RowFlags::UNCONVERGED | RowFlags::FAILED))
            .count();
        Self {
            columns: config.columns(),
            metadata: SweepMetadata {
                label: config.label.clone(),
                model: config.base.tag(),
                axis: config.axis.name.clone(),
                fixed: config
                    .base
                    .entries()
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect(),
                rules: config.rules.iter().map(ToString::to_string).collect(),
                tol: config.tol,
                code_version: crate::VERSION.to_string(),
                max_residual,
                flagged_rows,
                notes: config.notes.clone(),
            },
            rows,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[0]).collect()
    }

    /// Every row converged and none failed.
    pub fn all_converged(&self) -> bool {
        self.metadata.flagged_rows == 0
    }
}

/// Runs every axis point; rows come back in axis order whatever the
/// execution strategy.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    #[cfg(feature = "parallel")]
    {
        run_sweep_parallel(config)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sweep_sequential(config)
    }
}

pub fn run_sweep_sequential(config: &SweepConfig) -> Result<SweepTable> {
    let ordered = config.validate()?;
    let rows = config
        .axis
        .values
        .iter()
        .map(|&v| evaluate_point(config, &ordered, v))
        .collect();
    Ok(SweepTable::assemble(config, rows))
}

#[cfg(feature = "parallel")]
pub fn run_sweep_parallel(config: &SweepConfig) -> Result<SweepTable> {
    use rayon::prelude::*;
    let ordered = config.validate()?;
    let rows = config
        .axis
        .values
        .par_iter()
        .map(|&v| evaluate_point(config, &ordered, v))
        .collect();
    Ok(SweepTable::assemble(config, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelIParams;

    fn base() -> ModelParams {
        ModelParams::I(ModelIParams {
            e1: 1.0,
            e2: 3.0,
            tc: 1.0,
            tr: 1.0,
            th: 4.0,
            p1: 1e-3,
            p2: 1e-3,
            p3: 1e-3,
            g: 1e-3,
        })
    }

    #[test]
    fn observables_parse_and_print() {
        for s in ["T1", "T3", "Q2", "T1-Tbath", "Qsum", "r1"] {
            assert_eq!(s.parse::<Observable>().unwrap().to_string(), s);
        }
        assert!("T4".parse::<Observable>().is_err());
        assert!("X".parse::<Observable>().is_err());
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::new("Th", vec![]).is_err());
        assert!(Axis::new("Th", vec![1.0, 1.0]).is_err());
        assert!(Axis::new("Th", vec![1.0, 2.0, 1.5]).is_err());
        assert!(Axis::new("p1", vec![1e-3, 1e-4]).is_ok());
        let log = Axis::logarithmic("p2", 1e-4, 10.0, 6).unwrap();
        assert_eq!(log.values.first(), Some(&1e-4));
        assert_eq!(log.values.last(), Some(&10.0));
        assert!((log.values[2] - 1e-2).abs() < 1e-15);
        let lin = Axis::linear("Th", 1.0, 20.0, 20).unwrap();
        assert_eq!(lin.values[3], 4.0);
    }

    #[test]
    fn flags_round_trip_through_labels() {
        let f = RowFlags::UNCONVERGED | RowFlags::NEGATIVE_TEMPERATURE;
        assert_eq!(f.label(), "unconverged;negative_T");
        assert_eq!(RowFlags::from_label(&f.label()), Some(f));
        assert_eq!(RowFlags::from_label(""), Some(RowFlags::empty()));
        assert_eq!(RowFlags::from_label("bogus"), None);
    }

    #[test]
    fn config_validation_errors() {
        let axis = Axis::linear("Th", 1.0, 2.0, 3).unwrap();
        let bad_axis = SweepConfig::new(base(), Axis::linear("h", 1.0, 2.0, 2).unwrap());
        assert!(matches!(bad_axis.validate(), Err(FridgeError::UnknownParameter { .. })));
        let overwrite = SweepConfig::new(base(), axis.clone()).with_rule("Th = 2*E3").unwrap();
        assert!(overwrite.validate().is_err());
        let cyclic = SweepConfig::new(base(), axis.clone())
            .with_rule("p2 = p3")
            .unwrap()
            .with_rule("p3 = p2")
            .unwrap();
        assert!(matches!(cyclic.validate(), Err(FridgeError::CyclicRules(_))));
        let too_many = SweepConfig::new(
            ModelParams::III(crate::models::ModelIIIParams {
                e1: 1.0,
                e2: 1.0,
                tc: 1.0,
                tr: 1.0,
                th: 2.0,
                p1: 1e-3,
                ph: 1e-3,
                pr: 1e-3,
                g: 1e-3,
            }),
            axis,
        )
        .with_outputs(vec![Observable::Temperature(3)]);
        assert!(too_many.validate().is_err());
    }

    #[test]
    fn equilibrium_single_row() {
        let config = SweepConfig::new(base(), Axis::new("Th", vec![1.0]).unwrap());
        let table = run_sweep_sequential(&config).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!((table.column("T1").unwrap()[0] - 1.0).abs() < 1e-9);
        assert!(table.all_converged());
    }

    #[test]
    fn decoupled_row_sits_at_bath_temperature() {
        let config = SweepConfig::new(base(), Axis::new("g", vec![0.0]).unwrap())
            .with_outputs(vec![Observable::Temperature(1), Observable::ColdShift]);
        let table = run_sweep_sequential(&config).unwrap();
        assert_eq!(table.columns, vec!["g", "T1", "T1-Tbath", "residual"]);
        assert!(table.column("T1-Tbath").unwrap()[0].abs() < 1e-9);
    }

    #[test]
    fn failing_rows_are_flagged_not_dropped() {
        // E2 below E1 cannot be built.
        let config = SweepConfig::new(base(), Axis::new("E2", vec![0.5, 3.0]).unwrap());
        let table = run_sweep_sequential(&config).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(table.rows[0].flags.contains(RowFlags::FAILED));
        assert!(table.rows[0].values[1].is_nan());
        assert!(table.rows[0].error.as_deref().unwrap().contains("E2"));
        assert!(table.rows[1].flags.is_empty());
        assert_eq!(table.metadata.flagged_rows, 1);
    }

    #[test]
    fn rules_apply_per_row() {
        let config = SweepConfig::new(base(), Axis::new("E3", vec![1.0, 2.0]).unwrap())
            .with_rule("Th = 10*E3")
            .unwrap();
        let ordered = config.validate().unwrap();
        let p = config.point(2.0, &ordered).unwrap();
        assert_eq!(p.get("E2").unwrap(), 3.0);
        assert_eq!(p.get("Th").unwrap(), 20.0);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_agree_bit_for_bit() {
        let config = SweepConfig::new(base(), Axis::linear("Th", 1.0, 6.0, 11).unwrap());
        let a = run_sweep_sequential(&config).unwrap();
        let b = run_sweep_parallel(&config).unwrap();
        assert_eq!(a, b);
    }
}
