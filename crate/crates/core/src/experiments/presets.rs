//! Ready-made sweeps for the six standard figures.
//!
//! Parameters the figures leave open come from [`PresetDefaults`] and are
//! written into each table's notes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sweep::{Axis, Observable, SweepConfig};
use crate::error::{FridgeError, Result};
use crate::models::{ModelIIParams, ModelIParams, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }

    pub fn valid_ids() -> String {
        Self::ALL.map(|f| f.as_str()).join(", ")
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = FridgeError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                FridgeError::InvalidSweep(format!(
                    "unknown figure `{s}`; valid ids: {}",
                    Self::valid_ids()
                ))
            })
    }
}

/// Values used where a figure does not pin a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PresetDefaults {
    pub e1: f64,
    pub e2: f64,
    pub tc: f64,
    pub p: f64,
    /// Ratio `g / p`.
    pub g_over_p: f64,
    pub th_min: f64,
    pub th_max: f64,
}

impl Default for PresetDefaults {
    fn default() -> Self {
        Self {
            e1: 1.0,
            e2: 3.0,
            tc: 1.0,
            p: 1e-3,
            g_over_p: 1.0,
            th_min: 1.0,
            th_max: 20.0,
        }
    }
}

impl PresetDefaults {
    fn model_i(&self) -> ModelIParams {
        ModelIParams {
            e1: self.e1,
            e2: self.e2,
            tc: self.tc,
            tr: self.tc,
            th: 4.0 * self.tc,
            p1: self.p,
            p2: self.p,
            p3: self.p,
            g: self.g_over_p * self.p,
        }
    }

    fn note(&self) -> String {
        format!(
            "defaults: E1={}, E2={}, Tc=Tr={}, p={}, g/p={}",
            self.e1, self.e2, self.tc, self.p, self.g_over_p
        )
    }
}

/// Main curve of a figure.
pub fn preset(id: FigureId) -> SweepConfig {
    preset_curves(id).swap_remove(0)
}

/// Every curve of a figure, main curve first. Each config has a distinct
/// label.
pub fn preset_curves(id: FigureId) -> Vec<SweepConfig> {
    let d = PresetDefaults::default();
    let base = d.model_i();
    let th_grid = |lo: f64| Axis::linear("Th", lo, d.th_max, ((d.th_max - lo) * 2.0).round() as usize + 1);
    let stamp = |c: SweepConfig| c.with_note(d.note());

    match id {
        FigureId::Fig1 => [1.0, 0.9, 0.8]
            .into_iter()
            .map(|tc| {
                let base = ModelParams::I(ModelIParams { tc: tc * d.tc, ..base });
                let outputs = vec![Observable::ColdShift, Observable::Temperature(1)];
                stamp(
                    SweepConfig::new(base, ok(th_grid(d.th_min)))
                        .with_outputs(outputs)
                        .with_label(format!("fig1-Tc{}", tc * d.tc)),
                )
                .with_note(format!("Tr={}", d.tc))
            })
            .collect(),
        FigureId::Fig2 => vec![stamp(
            SweepConfig::new(ModelParams::I(base), ok(th_grid(0.5)))
                .with_outputs(vec![
                    Observable::HeatCurrent(1),
                    Observable::Temperature(1),
                    Observable::ColdShift,
                ])
                .with_label("fig2"),
        )],
        FigureId::Fig3 => ["p2", "p3"]
            .into_iter()
            .map(|rate| {
                let axis = ok(Axis::logarithmic(rate, 1e-4 * d.e1, 10.0 * d.e1, 41));
                stamp(
                    SweepConfig::new(ModelParams::I(base), axis)
                        .with_outputs(vec![Observable::Temperature(1), Observable::ColdShift])
                        .with_label(format!("fig3-{rate}")),
                )
                .with_note("Th=4")
            })
            .collect(),
        FigureId::Fig4 => {
            // A warm reference bath keeps both ends of the curve resolvable
            // in double precision.
            let (tc, ratio, p1) = (FIG4_TC, FIG4_E3_OVER_TH, FIG4_P1);
            let base = ModelParams::I(ModelIParams {
                tc,
                tr: tc,
                p1,
                ..base
            });
            let axis = ok(Axis::logarithmic("E2", 1.2 * d.e1, 120.0 * d.e1, 21));
            vec![stamp(
                ok(SweepConfig::new(base, axis)
                    .with_outputs(vec![Observable::Temperature(1), Observable::ColdShift])
                    .with_label("fig4")
                    .with_rule(&format!("Th = {}*E3", 1.0 / ratio))),
            )
            .with_note(format!("Tc=Tr={tc}, E3/Th={ratio}, p1={p1}"))]
        }
        FigureId::Fig5 => [4.0, 8.0, 12.0]
            .into_iter()
            .map(|th| {
                let base = ModelParams::I(ModelIParams { th, ..base });
                let axis = ok(Axis::logarithmic("p1", d.p, 1e-4 * d.p, 9));
                stamp(
                    SweepConfig::new(base, axis)
                        .with_outputs(vec![Observable::Temperature(1)])
                        .with_label(format!("fig5-Th{th}")),
                )
                .with_note(format!("Th={th}"))
            })
            .collect(),
        FigureId::Fig6 => [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)]
            .into_iter()
            .map(|(g_ratio, h_ratio)| {
                let base = ModelParams::II(ModelIIParams {
                    e1: 1.0,
                    e2: 1.0,
                    tc: 1.0,
                    th: 4.0,
                    p1: d.p,
                    p2: d.p,
                    p3: d.p,
                    g: g_ratio * d.p,
                    h: h_ratio * d.p,
                });
                SweepConfig::new(base, ok(th_grid(0.5)))
                    .with_outputs(vec![Observable::Temperature(1), Observable::ColdShift])
                    .with_label(format!("fig6-g{g_ratio}p-h{h_ratio}p"))
                    .with_note(format!("p={}", d.p))
                    .with_note("Tc=1")
                    .with_note("E=1")
                    .with_note(format!("g/p={g_ratio}, h/p={h_ratio}"))
            })
            .collect(),
    }
}

/// Presets are built from constants; a failure here is a bug.
fn ok<T>(r: Result<T>) -> T {
    r.expect("preset is well formed")
}

const FIG4_TC: f64 = 10.0;
const FIG4_E3_OVER_TH: f64 = 0.01;
const FIG4_P1: f64 = 0.0;
