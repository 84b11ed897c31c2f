use num_complex::Complex64;
use proptest::prelude::*;
use spin2_gs::projection::project_onto_constraints;
use spin2_gs::{
    build_initial_data, masses, total_energy, Grid, InitialDataSpec, InitialKind, ModelParams, PotentialSpec, Stepper,
    StepperConfig, ELLS,
};

fn coarse_line() -> Grid {
    Grid::line(-6.0, 6.0, 48).unwrap()
}

fn random_data(grid: &Grid, p: &ModelParams, seed: u64) -> spin2_gs::SpinorField {
    let spec = InitialDataSpec {
        kind: InitialKind::Random { seed },
        ..InitialDataSpec::default()
    };
    build_initial_data(&spec, p, grid).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_symmetries(b1 in -10.0..10.0f64, b2 in -30.0..30.0f64, m in 0.0..1.9f64, seed: u64, a in 0.0..6.3f64) {
        let grid = coarse_line();
        let p = ModelParams::new(100.0, b1, b2, m, PotentialSpec::harmonic()).unwrap();
        let phi = random_data(&grid, &p, seed);
        let e = total_energy(&phi, &p);
        let global = phi.scaled(&[Complex64::from_polar(1.0, a); 5]);
        let spin = phi.scaled(&ELLS.map(|l| Complex64::from_polar(1.0, l as f64 * a)));
        for other in [global, spin, phi.mirrored()] {
            let e2 = total_energy(&other, &p);
            prop_assert!((e2 - e).abs() <= 1e-11 * e.abs(), "{e} vs {e2}");
        }
    }

    #[test]
    fn projection_is_idempotent(b1 in -5.0..5.0f64, m in 0.0..1.9f64, seed: u64) {
        let grid = coarse_line();
        let p = ModelParams::new(100.0, b1, 1.0, m, PotentialSpec::harmonic()).unwrap();
        let phi = random_data(&grid, &p, seed).scaled(&[Complex64::new(1.7, 0.0); 5]);
        let (once, _) = project_onto_constraints(&phi, m).unwrap();
        let n = masses(&once);
        prop_assert!((n.total - 1.0).abs() < 1e-12 && (n.magnetization - m).abs() < 1e-12);
        let (twice, sigma) = project_onto_constraints(&once, m).unwrap();
        prop_assert!(sigma.sigma.iter().all(|s| (s - 1.0).abs() < 1e-10), "{:?}", sigma.sigma);
        prop_assert!(twice.max_abs_diff(&once) < 1e-10);
    }

    #[test]
    fn short_runs_keep_constraints(b1 in -2.0..10.0f64, b2 in -20.0..20.0f64, m in 0.0..1.9f64, seed: u64) {
        let grid = coarse_line();
        let p = ModelParams::new(100.0, b1, b2, m, PotentialSpec::harmonic()).unwrap();
        let cfg = StepperConfig { max_iter: 40, ..StepperConfig::with_dt(0.002) };
        let gs = Stepper::new(&grid, &p, cfg).unwrap().run(&random_data(&grid, &p, seed)).unwrap();
        let (dn, dm) = gs.diagnostics.max_constraint_error(m);
        prop_assert!(dn <= 1e-12 && dm <= 1e-12, "{dn} {dm}");
        let first = gs.diagnostics.records.first().unwrap().energy;
        prop_assert!(gs.energy < first);
    }
}

#[test]
fn mirrored_data_runs_mirrored() {
    // the flow commutes with l -> -l when M = 0
    let grid = coarse_line();
    let p = ModelParams::new(100.0, 1.0, -3.0, 0.0, PotentialSpec::harmonic()).unwrap();
    let phi = random_data(&grid, &p, 5);
    let cfg = StepperConfig { max_iter: 30, ..StepperConfig::default() };
    let st = Stepper::new(&grid, &p, cfg).unwrap();
    let a = st.run(&phi).unwrap();
    let b = st.run(&phi.mirrored()).unwrap();
    assert!(a.field.mirrored().max_abs_diff(&b.field) < 1e-12);
    assert!((a.energy - b.energy).abs() < 1e-12);
}
