mod common;

use common::smallest_coupled;
use coulomb_qed::gauge::make_field_grid;
use coulomb_qed::hamiltonian::{
    build_h_a_momentum, build_h_pi_momentum, HamiltonianModel, HamiltonianParams, HamiltonianPieces,
};
use coulomb_qed::lattice::LatticeGeometry;
use coulomb_qed::layout::gauge_register;
use coulomb_qed::linalg::{expm_multiply, hermitian_eigen, norm, pseudo_random_vector, OperatorMatrix};
use coulomb_qed::trotter::{
    evolution_series, exact_evolve, fidelity, log_log_slope, trotter_evolve, trotter_scan, truncation_fidelity,
    verify_suite, CheckStatus, Fault, Propagator, TrotterPlan, VerifyOptions,
};
use coulomb_qed::{Error, C64};

fn gauge_only(dims: [usize; 3], a_max: f64, n: usize) -> HamiltonianParams {
    HamiltonianParams::gauge_only(LatticeGeometry::new(dims).unwrap(), make_field_grid(a_max, n).unwrap()).unwrap()
}

#[test]
fn exact_evolution_basics() {
    let params = smallest_coupled(0.3);
    let model = HamiltonianModel::new(&params).unwrap();
    let psi = pseudo_random_vector(model.dim(), 1);
    assert_eq!(exact_evolve(&model, &psi, 0.0).unwrap(), psi);
    let later = exact_evolve(&model, &psi, 10.0).unwrap();
    assert!((norm(&later) - 1.0).abs() < 1e-10);
}

#[test]
fn eigenstate_only_picks_up_a_phase() {
    let params = HamiltonianParams::fermion_only(LatticeGeometry::new([1, 1, 1]).unwrap(), 0.4, 1.0).unwrap();
    let model = HamiltonianModel::new(&params).unwrap();
    let h = HamiltonianPieces::build(&params).unwrap().total().to_dense().unwrap();
    let (vals, vecs) = hermitian_eigen(&h);
    let v: Vec<C64> = vecs.column(3).iter().copied().collect();
    let t = 1.7;
    let out = exact_evolve(&model, &v, t).unwrap();
    let phase = C64::from_polar(1.0, -vals[3] * t);
    let err = out.iter().zip(&v).map(|(a, b)| (a - phase * b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
}

#[test]
fn oversized_systems_are_refused() {
    let grid = make_field_grid(1.0, 1).unwrap();
    let params =
        HamiltonianParams::new(LatticeGeometry::new([2, 2, 1]).unwrap(), 0.3, 0.5, 1.0, Some(grid), true).unwrap();
    let plan = TrotterPlan::new(&params, 1.0, 4).unwrap();
    assert!(matches!(Propagator::new(&plan), Err(Error::Capability(_))));
}

#[test]
fn slot_exponentials_match_krylov() {
    let params = smallest_coupled(0.3);
    let plan = TrotterPlan::new(&params, 1.0, 1).unwrap();
    let prop = Propagator::new(&plan).unwrap();
    let psi = pseudo_random_vector(prop.dim(), 4);
    for (k, (kind, op)) in prop.slots.iter().enumerate() {
        let mut mine = psi.clone();
        prop.apply_slot(k, &mut mine, 0.37);
        let reference = expm_multiply(op, &psi, 0.37, 1e-13);
        let err = mine.iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{kind:?}: {err}");
        assert!((norm(&mine) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn slots_sum_to_the_independent_build_and_commute_internally() {
    let params = smallest_coupled(0.3);
    let plan = TrotterPlan::new(&params, 1.0, 1).unwrap();
    let prop = Propagator::new(&plan).unwrap();
    let reference = HamiltonianPieces::build(&params).unwrap().total();
    let mut sum = OperatorMatrix::zeros(reference.dim());
    for (_, op) in &prop.slots {
        sum = sum.add(&op.to_matrix().unwrap());
    }
    assert!(sum.max_abs_diff(&reference) < 1e-12);
    let model = &prop.model;
    for slot in &plan.slots {
        let ms: Vec<OperatorMatrix> = slot
            .terms
            .iter()
            .map(|t| model.operator_from_terms(false, false, vec![t.term.clone()]).to_matrix().unwrap())
            .collect();
        for i in 0..ms.len() {
            for j in i + 1..ms.len() {
                assert!(ms[i].commutator(&ms[j]).max_abs() < 1e-12, "{}", slot.label);
            }
        }
    }
}

#[test]
fn commuting_plan_is_exact() {
    // on one site the magnetic energy vanishes and H_Pi is the only piece
    let params = gauge_only([1, 1, 1], 2.0, 2);
    let model = HamiltonianModel::new(&params).unwrap();
    let psi = pseudo_random_vector(model.dim(), 2);
    let plan = TrotterPlan::new(&params, 1.3, 3).unwrap();
    let f = fidelity(&exact_evolve(&model, &psi, 1.3).unwrap(), &trotter_evolve(&psi, &plan).unwrap());
    assert!((1.0 - f).abs() < 1e-10);
}

#[test]
fn first_order_scaling() {
    let params = smallest_coupled(0.3);
    let plan = TrotterPlan::new(&params, 0.5, 1).unwrap();
    let prop = Propagator::new(&plan).unwrap();
    let psi = pseudo_random_vector(prop.dim(), 11);
    let steps = [8, 16, 32, 64];
    let scan = trotter_scan(&prop, &psi, 0.5, &steps).unwrap();
    let n: Vec<f64> = steps.iter().map(|&k| k as f64).collect();
    let slope = log_log_slope(&n, &scan.distance);
    assert!((slope + 1.0).abs() < 0.2, "{slope}");
    for k in 1..steps.len() {
        let r = scan.distance[k] * n[k] / (scan.distance[k - 1] * n[k - 1]);
        assert!((r - 1.0).abs() < 0.2, "{r}");
    }
    assert!(scan.norm_defect < 1e-10);
}

#[test]
fn charge_is_conserved() {
    let params = smallest_coupled(0.3);
    let plan = TrotterPlan::new(&params, 5.0, 100).unwrap();
    let psi = pseudo_random_vector(1 << 14, 5);
    let series = evolution_series(&plan, &psi).unwrap();
    let q0 = series[0].charge;
    let e0 = series[0].energy_exact;
    for r in &series {
        assert!((r.charge - q0).abs() < 1e-8);
        assert!((r.energy_exact - e0).abs() < 1e-8 * (1.0 + e0.abs()));
        assert!((r.norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn zero_time_series_has_one_record() {
    let params = smallest_coupled(0.3);
    let plan = TrotterPlan::new(&params, 0.0, 4).unwrap();
    let series = evolution_series(&plan, &pseudo_random_vector(1 << 14, 5)).unwrap();
    assert_eq!(series.len(), 1);
    assert!((series[0].fidelity - 1.0).abs() < 1e-14);
}

/// Shift of one gauge register by `k` levels. Amplitudes that wrap around
/// the grid change sign, which makes the shift diagonal in the basis of
/// the centered Fourier transform on an even number of levels.
fn shift_register(psi: &[C64], params: &HamiltonianParams, register: usize, k: isize) -> Vec<C64> {
    let layout = params.layout();
    let levels = 1isize << layout.qubits_per_register;
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    for (s, &v) in psi.iter().enumerate() {
        let l = layout.level(s, register) as isize + k;
        let sign = if l.div_euclid(levels) % 2 == 0 { 1.0 } else { -1.0 };
        out[layout.with_level(s, register, l.rem_euclid(levels) as usize)] = v * sign;
    }
    out
}

fn expect(m: &OperatorMatrix, psi: &[C64]) -> f64 {
    m.expectation(psi).re
}

#[test]
fn gradient_offsets_do_not_propagate() {
    // A_x(0) += k, A_x(1) -= k is the gradient of phi = (0, k)
    let params = gauge_only([2, 1, 1], 1.5, 2);
    let h = build_h_a_momentum(&params).unwrap().add(&build_h_pi_momentum(&params).unwrap());
    let layout = params.layout();
    let (r0, r1) = (gauge_register(0, 0), gauge_register(1, 0));
    // keep A_x(0) on levels 0..=1 and A_x(1) on 2..=3 so the offset never wraps
    let raw = pseudo_random_vector(layout.dim().unwrap(), 9);
    let mut psi: Vec<C64> = raw
        .iter()
        .enumerate()
        .map(|(s, &v)| if layout.level(s, r0) <= 1 && layout.level(s, r1) >= 2 { v } else { C64::new(0.0, 0.0) })
        .collect();
    let n = norm(&psi);
    psi.iter_mut().for_each(|v| *v /= n);
    let shifted = shift_register(&shift_register(&psi, &params, r0, 2), &params, r1, -2);
    assert!((expect(&h, &psi) - expect(&h, &shifted)).abs() < 1e-10);
    // a non-gradient offset of A_y at one site is seen by H_A
    let ry = gauge_register(0, 1);
    let moved = shift_register(&psi, &params, ry, 1);
    assert!((expect(&h, &psi) - expect(&h, &moved)).abs() > 1e-3);
}

#[test]
fn electric_energy_is_invariant_under_register_shifts() {
    let params = gauge_only([2, 2, 1], 1.0, 1);
    let h = build_h_pi_momentum(&params).unwrap();
    let psi = pseudo_random_vector(params.layout().dim().unwrap(), 3);
    let e0 = expect(&h, &psi);
    let mut shifted = psi.clone();
    for r in [0, 4, 7, 11] {
        shifted = shift_register(&shifted, &params, r, 1);
    }
    assert!((expect(&h, &shifted) - e0).abs() < 1e-10);
}

#[test]
fn truncation_fidelity_window() {
    let params = gauge_only([1, 1, 1], 2.0, 2);
    let layout = params.layout();
    let grid = params.grid.unwrap();
    let psi = pseudo_random_vector(layout.dim().unwrap(), 6);
    assert!((truncation_fidelity(&psi, &layout, &grid, 2.0).unwrap() - 1.0).abs() < 1e-12);
    let narrow = truncation_fidelity(&psi, &layout, &grid, 0.7).unwrap();
    let wide = truncation_fidelity(&psi, &layout, &grid, 1.0).unwrap();
    assert!(narrow <= wide && wide < 1.0);
    assert!(matches!(truncation_fidelity(&psi, &layout, &grid, 2.5), Err(Error::Domain(_))));
}

#[test]
fn suite_passes_on_small_instances() {
    let opts = VerifyOptions { epsilons: vec![0.1], ..VerifyOptions::default() };
    let r = verify_suite(&smallest_coupled(0.0), &opts).unwrap();
    assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
    let r = verify_suite(&gauge_only([1, 1, 1], 1.0, 1), &opts).unwrap();
    assert!(r.passed);
    assert_eq!(r.check("dispersion").unwrap().status, CheckStatus::Skipped);
    assert!(r.log.iter().any(|l| l.contains("no fermion register")));
}

#[test]
fn injected_fault_is_reported() {
    let opts = VerifyOptions {
        fault: Some(Fault::Hermiticity),
        epsilons: vec![0.1],
        numeric_norms: false,
        ..VerifyOptions::default()
    };
    let r = verify_suite(&smallest_coupled(0.3), &opts).unwrap();
    assert!(!r.passed);
    let failed: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
    assert_eq!(failed, ["hermiticity"]);
    assert!(r.checks.len() > 10);
}
