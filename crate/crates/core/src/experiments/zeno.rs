use serde::{Deserialize, Serialize};

use super::sweep::{run_sweep, Axis, Observable, SweepConfig, SweepTable};
use crate::error::{FridgeError, Result};
use crate::models::ModelParams;

/// Cold-particle temperature against one bath rate of the fridge.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenoScan {
    pub table: SweepTable,
    pub argmin_index: usize,
    pub argmin_rate: f64,
    pub min_t1: f64,
    /// The minimum lies strictly inside the scanned range and both end
    /// points sit above it.
    pub interior: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZenoSummary {
    pub argmin_rate: f64,
    pub min_t1: f64,
    pub interior: bool,
}

/// Scans `rate` (e.g. `p2` or `p3`) and locates the coldest point. A curve
/// whose minimum sits on the boundary is returned with `interior = false`.
pub fn zeno_scan(base: &ModelParams, rate: &str, values: Vec<f64>, tol: f64) -> Result<ZenoScan> {
    let smallest = values
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let largest = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(largest / smallest >= 100.0) {
        return Err(FridgeError::InvalidSweep(format!(
            "a Zeno scan of `{rate}` must span at least two decades"
        )));
    }
    let config = SweepConfig::new(*base, Axis::new(rate, values)?)
        .with_outputs(vec![Observable::Temperature(1), Observable::ColdShift])
        .with_label(format!("zeno-{rate}"))
        .with_tol(tol);
    let table = run_sweep(&config)?;
    let t1 = table.column("T1").expect("T1 column");

    let (argmin_index, min_t1) = t1
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, t)| t.is_finite())
        .fold((0, f64::INFINITY), |best, (i, t)| if t < best.1 { (i, t) } else { best });
    let margin = 1e-12 * min_t1.abs().max(1.0);
    let last = t1.len() - 1;
    let interior = argmin_index != 0
        && argmin_index != last
        && t1[0] > min_t1 + margin
        && t1[last] > min_t1 + margin;

    Ok(ZenoScan {
        argmin_rate: table.rows[argmin_index].values[0],
        table,
        argmin_index,
        min_t1,
        interior,
    })
}

impl ZenoScan {
    pub fn summary(&self) -> ZenoSummary {
        ZenoSummary {
            argmin_rate: self.argmin_rate,
            min_t1: self.min_t1,
            interior: self.interior,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelIParams;

    fn fridge(th: f64) -> ModelParams {
        ModelParams::I(ModelIParams {
            e1: 1.0,
            e2: 3.0,
            tc: 1.0,
            tr: 1.0,
            th,
            p1: 1e-3,
            p2: 1e-3,
            p3: 1e-3,
            g: 1e-3,
        })
    }

    #[test]
    fn interior_minimum_in_p2() {
        let rates = Axis::logarithmic("p2", 1e-4, 10.0, 26).unwrap().values;
        let scan = zeno_scan(&fridge(4.0), "p2", rates, 1e-10).unwrap();
        assert!(scan.interior, "argmin at {}", scan.argmin_rate);
        assert!(scan.min_t1 < 1.0);
    }

    #[test]
    fn disabled_sink_does_not_cool() {
        let mut rates = vec![0.0];
        rates.extend(Axis::logarithmic("p2", 1e-4, 1e-1, 4).unwrap().values);
        let scan = zeno_scan(&fridge(4.0), "p2", rates, 1e-10).unwrap();
        assert!((scan.table.column("T1").unwrap()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flat_curve_is_flagged_as_boundary() {
        let rates = Axis::logarithmic("p3", 1e-4, 1.0, 5).unwrap().values;
        let scan = zeno_scan(&fridge(1.0), "p3", rates, 1e-10).unwrap();
        assert!(!scan.interior);
        for t in scan.table.column("T1").unwrap() {
            assert!((t - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn narrow_range_rejected() {
        assert!(zeno_scan(&fridge(4.0), "p2", vec![1e-3, 2e-3, 5e-3], 1e-10).is_err());
    }
}
