//! Parameter sweeps, figure presets and the derived experiments built on them.

mod extrapolate;
mod output;
mod presets;
mod rules;
mod sweep;
mod zeno;

pub use extrapolate::{decades, extrapolate_p1_limit, P1Extrapolation};
pub use output::parse_csv;
pub use presets::{preset, preset_curves, FigureId, PresetDefaults};
pub use rules::{apply_rules, order_rules, DerivedRule, Term};
pub use sweep::{
    default_outputs, evaluate_point, run_sweep, run_sweep_sequential, Axis, Observable, RowFlags,
    SweepConfig, SweepMetadata, SweepRow, SweepTable,
};
#[cfg(feature = "parallel")]
pub use sweep::run_sweep_parallel;
pub use zeno::{zeno_scan, ZenoScan};
