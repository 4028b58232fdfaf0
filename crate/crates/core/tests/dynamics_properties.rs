use num_complex::Complex64;
use proptest::prelude::*;
use qfridge::dynamics::{build_liouvillian, evolve, master_equation_rhs, steady_state};
use qfridge::models::{gibbs_populations, BathChannel, ParticleSpec};
use qfridge::observables::{heat_currents, temperatures};
use qfridge::tensor::{check_density, diag, max_abs, trace, trace_distance, ComplexMatrix};
use qfridge::{FridgeModel, ModelIIIParams, ModelIIParams, ModelIParams, ModelParams, ModelTag};

fn weak_model_i(th: f64, p: f64, g: f64) -> ModelParams {
    ModelParams::I(ModelIParams {
        e1: 1.0,
        e2: 3.0,
        tc: 1.0,
        tr: 1.0,
        th,
        p1: p,
        p2: p,
        p3: p,
        g,
    })
}

fn mixed(n: usize, seed: f64) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(n, n, |i, j| {
        let k = (i * n + j) as f64 + seed;
        Complex64::new(k.sin(), (1.7 * k).cos())
    });
    let rho = &a * a.adjoint();
    let t = trace(&rho);
    rho.map(|z| z / t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_agrees_with_direct_equation(
        th in 0.5f64..20.0, p in 1e-4f64..1e-2, g in 1e-4f64..1e-2, h in 1e-4f64..1e-2, seed in 0.0f64..10.0,
    ) {
        let models = [
            weak_model_i(th, p, g),
            ModelParams::II(ModelIIParams { e1: 1.0, e2: 1.3, tc: 1.0, th, p1: p, p2: p, p3: p, g, h }),
            ModelParams::III(ModelIIIParams { e1: 1.0, e2: 2.5, tc: 1.0, tr: 1.0, th, p1: p, ph: p, pr: p, g }),
        ];
        for params in models {
            let model = params.build().unwrap();
            let rho = mixed(model.dim(), seed);
            let diff = build_liouvillian(&model).apply(&rho) - master_equation_rhs(&model, &rho).unwrap();
            prop_assert!(max_abs(&diff) < 1e-14);
        }
    }

    #[test]
    fn stationary_heat_currents_balance(th in 0.5f64..20.0, p in 1e-4f64..1e-2, g in 1e-4f64..1e-2) {
        let model = weak_model_i(th, p, g).build().unwrap();
        let s = steady_state(&model, 1e-10).unwrap();
        prop_assert!(s.converged);
        prop_assert!(s.diagnostics.is_valid(1e-10));
        prop_assert!(heat_currents(&model, &s.rho).unwrap().total().abs() < 1e-12);
    }

    #[test]
    fn cooling_iff_hot_bath_hotter(th in 0.3f64..20.0) {
        let model = weak_model_i(th, 1e-3, 1e-3).build().unwrap();
        let s = steady_state(&model, 1e-10).unwrap();
        let t1 = temperatures(&model, &s.rho).unwrap()[0].value;
        if th > 1.0 + 1e-6 {
            prop_assert!(t1 < 1.0);
        } else if th < 1.0 - 1e-6 {
            prop_assert!(t1 > 1.0);
        }
    }
}

#[test]
fn trajectory_stays_a_density_matrix() {
    let model = weak_model_i(5.0, 0.05, 0.08).build().unwrap();
    let mut rho0 = ComplexMatrix::zeros(8, 8);
    rho0[(7, 7)] = Complex64::new(1.0, 0.0);
    let traj = evolve(&model, &rho0, 200.0, None, 40).unwrap();
    for rho in &traj.states {
        assert!(check_density(rho).is_valid(1e-12));
    }
    let s = steady_state(&model, 1e-10).unwrap();
    assert!(trace_distance(traj.final_state(), &s.rho) < 1e-3);
}

#[test]
fn thermal_jump_qutrit_relaxes_to_gibbs() {
    let energies = vec![0.0, 1.0, 2.5];
    let t = 0.8;
    let particle = ParticleSpec::new(
        energies.clone(),
        vec![
            BathChannel::transition_jump(0, 1, t, 0.3).unwrap(),
            BathChannel::transition_jump(1, 2, t, 0.2).unwrap(),
        ],
    )
    .unwrap();
    let model = FridgeModel::new(vec![particle], vec![], ModelTag::Custom).unwrap();
    let rho0 = diag(&[0.0, 0.0, 1.0]);
    let traj = evolve(&model, &rho0, 200.0, None, 4).unwrap();
    let gibbs = diag(&gibbs_populations(&energies, t).unwrap());
    assert!(trace_distance(traj.final_state(), &gibbs) < 1e-9);
    let s = steady_state(&model, 1e-12).unwrap();
    assert!(trace_distance(&s.rho, &gibbs) < 1e-12);
}

#[test]
fn model_iii_cools_when_hot_bath_hotter() {
    let params = |th| {
        ModelParams::III(ModelIIIParams {
            e1: 1.0,
            e2: 3.0,
            tc: 1.0,
            tr: 1.0,
            th,
            p1: 1e-3,
            ph: 1e-3,
            pr: 1e-3,
            g: 1e-3,
        })
    };
    let t1 = |th| {
        let m: FridgeModel = ModelParams::build(&params(th)).unwrap();
        let s = steady_state(&m, 1e-10).unwrap();
        temperatures(&m, &s.rho).unwrap()[0].value
    };
    assert!(t1(5.0) < 1.0);
    assert!((t1(1.0) - 1.0).abs() < 1e-9);
}
