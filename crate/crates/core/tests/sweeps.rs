use qfridge::experiments::{
    decades, extrapolate_p1_limit, preset, preset_curves, run_sweep, run_sweep_sequential, Axis,
    FigureId, RowFlags, SweepConfig,
};
use qfridge::{perfect_insulation_limit, ModelIParams, ModelParams};

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
fn repeated_runs_are_bitwise_identical() {
    let config = SweepConfig::new(base(), Axis::linear("Th", 0.5, 10.0, 20).unwrap());
    let a = run_sweep(&config).unwrap();
    let b = run_sweep(&config).unwrap();
    let c = run_sweep_sequential(&config).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_csv(), c.to_csv());
    assert_eq!(a.to_json_string(), c.to_json_string());
}

#[test]
fn cold_shift_decreases_with_hot_bath() {
    let config = preset(FigureId::Fig1);
    let table = run_sweep(&config).unwrap();
    let shift = table.column("T1-Tbath").unwrap();
    assert!(shift.windows(2).all(|w| w[1] <= w[0]));
    let th = table.axis_values();
    let k = th.iter().position(|&t| t == 1.0).unwrap();
    assert!(shift[k].abs() < 1e-9);
    assert!(shift[k + 1..].iter().all(|&s| s < 0.0));
}

#[test]
fn colder_object_bath_still_cools_for_hot_enough_engine() {
    for config in preset_curves(FigureId::Fig1).into_iter().skip(1) {
        let table = run_sweep(&config).unwrap();
        let shift = table.column("T1-Tbath").unwrap();
        assert!(*shift.last().unwrap() < 0.0, "{}", config.label);
    }
}

#[test]
fn fig5_tails_approach_closed_form() {
    for config in preset_curves(FigureId::Fig5) {
        let th = config.base.get("Th").unwrap();
        let exact = perfect_insulation_limit(1.0, th, 1.0, 2.0).unwrap();
        let t1 = run_sweep(&config).unwrap().column("T1").unwrap();
        assert!(t1.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(((t1.last().unwrap() - exact) / exact).abs() < 5e-3);
        let e = extrapolate_p1_limit(&config.base, &decades(1e-3, 5), 1e-10).unwrap();
        assert!(((e.limit - exact) / exact).abs() < 1e-3);
    }
}

#[test]
fn bad_rows_are_flagged_not_fatal() {
    // E2 below E1 cannot build a model.
    let config = SweepConfig::new(base(), Axis::new("E2", vec![0.5, 3.0]).unwrap());
    let table = run_sweep(&config).unwrap();
    assert!(table.rows[0].flags.contains(RowFlags::FAILED));
    assert!(table.rows[0].error.is_some());
    assert!(table.rows[0].values[1].is_nan());
    assert!(table.rows[1].flags.is_empty());
    assert_eq!(table.metadata.flagged_rows, 1);
}

#[test]
fn unknown_axis_is_rejected() {
    let config = SweepConfig::new(base(), Axis::new("h", vec![1e-3, 2e-3]).unwrap());
    assert!(run_sweep(&config).is_err());
}
