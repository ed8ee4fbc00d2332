//! Structural checks on a small instance, collected into one report.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{check_normalized, charge_operator, expectation, fidelity, Propagator, TrotterPlan};
use crate::error::Result;
use crate::gauge::make_field_grid;
use crate::hamiltonian::{
    build_h_a, build_h_i, build_h_i_momentum, build_h_pi, build_h_pi_momentum, completed_square,
    current_counterterm, dispersion, electric_kernel, magnetic_energy, quadratic_value, shift_constant,
    timelike_current_check, CommutatorOperator, HamiltonianModel, HamiltonianParams, HamiltonianPieces, Piece,
    PieceOperator,
};
use crate::lattice::momentum_modes;
use crate::layout::gauge_register;
use crate::linalg::{
    expm_multiply, extremal_eigenvalues, hermitian_eigenvalues, inner, norm, pseudo_random_vector, LinearOperator,
};
use crate::resources::{oscillator_surrogate, surrogate_truncation};
use crate::{C64, MAX_DENSE_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported, never fails the suite.
    Info,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    fn bound(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let status = if value <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name: name.into(), status, value: Some(value), tolerance: Some(tolerance), detail: detail.into() }
    }

    fn flag(name: &str, ok: bool, value: Option<f64>, detail: impl Into<String>) -> Self {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name: name.into(), status, value, tolerance: None, detail: detail.into() }
    }

    fn info(name: &str, value: Option<f64>, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: CheckStatus::Info, value, tolerance: None, detail: detail.into() }
    }

    fn skipped(name: &str, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: CheckStatus::Skipped, value: None, tolerance: None, detail: detail.into() }
    }
}

/// Deliberate corruption used to confirm that checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fault {
    /// Adds a non-Hermitian matrix element to one piece.
    Hermiticity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub fault: Option<Fault>,
    /// Infidelity budgets for the truncation checks.
    pub epsilons: Vec<f64>,
    /// Evolution time of the Trotter scaling runs.
    pub trotter_time: f64,
    pub trotter_steps: Vec<usize>,
    /// Compare the measured Trotter error with slot commutator norms.
    pub numeric_norms: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            fault: None,
            epsilons: vec![0.3, 0.1, 0.03],
            trotter_time: 0.5,
            trotter_steps: vec![8, 16, 32, 64],
            numeric_norms: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub slots: usize,
    pub nonempty_slots: usize,
    pub log: Vec<String>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

/// Operator with one extra element `<0|X|1> = 1`, breaking Hermiticity.
struct Skewed<'a>(&'a dyn LinearOperator);

impl LinearOperator for Skewed<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        self.0.apply_into(x, y);
        y[0] += x[1];
    }
}

/// Runs every check that fits the instance. Checks that need explicit
/// matrices or a register that is absent are reported as skipped.
pub fn verify_suite(params: &HamiltonianParams, options: &VerifyOptions) -> Result<VerifyReport> {
    let model = HamiltonianModel::new(params)?;
    let plan = TrotterPlan::new(params, options.trotter_time, 1)?;
    let prop = Propagator::from_model(model.clone(), &plan);
    let explicit = params.explicit_dim().is_ok();
    let has_gauge = params.grid.is_some();
    let mut log = plan.log.clone();
    let mut checks = Vec::new();
    let x = pseudo_random_vector(model.dim(), options.seed);
    let y = pseudo_random_vector(model.dim(), options.seed.wrapping_add(1));

    checks.push(hermiticity(params, &model, options, explicit, &x, &y)?);
    checks.push(partition(&model, &prop, &x));
    checks.push(intra_slot(&model, &plan, &x));

    if params.fermions {
        checks.push(psd_after_shift(params, &model, options.seed)?);
        checks.push(dispersion_match(params, &model)?);
        checks.push(charge_commutes(&model, &x));
        if has_gauge {
            checks.extend(coupled_psd(params, &model, options.seed));
        }
    } else {
        log.push("no fermion register: PSD, dispersion and charge checks skipped".into());
        for name in ["psd_after_shift", "dispersion", "charge_commutes"] {
            checks.push(CheckResult::skipped(name, "no fermion register"));
        }
    }
    if has_gauge {
        checks.push(transversality(params, options.seed));
    } else {
        log.push("no gauge registers: transversality check skipped".into());
        checks.push(CheckResult::skipped("transversality", "no gauge registers"));
    }
    checks.extend(chebyshev_checks(params, options)?);
    if explicit {
        checks.extend(dual_constructions(params)?);
        checks.extend(trotter_checks(&prop, options, &x)?);
    } else {
        log.push(format!("dimension {} above the explicit limit: dual constructions and Trotter runs skipped", model.dim()));
        for name in ["dual_construction", "trotter_slope", "conservation"] {
            checks.push(CheckResult::skipped(name, "dimension above the explicit limit"));
        }
    }
    if params.fermions && params.volume() * 4 <= 20 {
        let r = timelike_current_check(params, 16, options.seed)?;
        checks.push(CheckResult::info(
            "timelike_current",
            Some(r.worst),
            format!("{} of {} sampled states violate |J^0|^2 >= sum_j |J^j|^2", r.violations, r.samples),
        ));
    }
    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(VerifyReport { passed, checks, slots: plan.slot_count(), nonempty_slots: plan.nonempty_count(), log })
}

fn hermiticity(
    params: &HamiltonianParams,
    model: &HamiltonianModel,
    options: &VerifyOptions,
    explicit: bool,
    x: &[C64],
    y: &[C64],
) -> Result<CheckResult> {
    let faulty = if params.fermions { Piece::Fermion } else { Piece::Electric };
    let mut worst: f64 = 0.0;
    let mut worst_piece = "";
    for piece in [Piece::Electric, Piece::Magnetic, Piece::Interaction, Piece::Coulomb, Piece::Fermion] {
        let op = model.piece(piece);
        let skew = Skewed(&op);
        let op: &dyn LinearOperator = if options.fault == Some(Fault::Hermiticity) && piece == faulty {
            &skew
        } else {
            &op
        };
        let d = (inner(x, &op.apply(y)) - inner(&op.apply(x), y)).norm();
        if d > worst {
            worst = d;
            worst_piece = piece.name();
        }
    }
    if explicit {
        let pieces = HamiltonianPieces::build(params)?;
        for (piece, m) in pieces.iter() {
            let m = if options.fault == Some(Fault::Hermiticity) && piece == faulty {
                let mut b = crate::linalg::SparseBuilder::new(m.dim());
                b.add(0, 1, C64::new(1.0, 0.0));
                m.add(&b.build())
            } else {
                m.clone()
            };
            let d = m.hermiticity_defect();
            if d > worst {
                worst = d;
                worst_piece = piece.name();
            }
        }
    }
    let detail = if worst_piece.is_empty() {
        "every piece Hermitian".to_string()
    } else {
        format!("largest defect in {worst_piece}")
    };
    Ok(CheckResult::bound("hermiticity", worst, 1e-10, detail))
}

fn partition(model: &HamiltonianModel, prop: &Propagator, x: &[C64]) -> CheckResult {
    let total = model.total().apply(x);
    let mut sum = vec![C64::new(0.0, 0.0); x.len()];
    for (_, op) in &prop.slots {
        for (s, v) in sum.iter_mut().zip(op.apply(x)) {
            *s += v;
        }
    }
    let err = norm(&sum.iter().zip(&total).map(|(a, b)| a - b).collect::<Vec<_>>()) / norm(&total).max(1.0);
    CheckResult::bound("partition", err, 1e-12, format!("{} nonempty slots summed against H", prop.slots.len()))
}

fn intra_slot(model: &HamiltonianModel, plan: &TrotterPlan, x: &[C64]) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    for slot in &plan.slots {
        let ops: Vec<PieceOperator> = slot
            .terms
            .iter()
            .filter(|t| !t.term.is_diagonal())
            .map(|t| model.operator_from_terms(false, false, vec![t.term.clone()]))
            .collect();
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                let c = CommutatorOperator { a: &ops[i], b: &ops[j] };
                worst = worst.max(norm(&c.apply(x)));
                pairs += 1;
            }
        }
    }
    CheckResult::bound(
        "intra_slot_commutation",
        worst,
        1e-12,
        format!("{pairs} hopping pairs tested; diagonal terms commute by construction"),
    )
}

fn psd_after_shift(params: &HamiltonianParams, model: &HamiltonianModel, seed: u64) -> Result<CheckResult> {
    let shift = shift_constant(params.volume(), params.mass, params.wilson);
    let fermion_only = HamiltonianParams { grid: None, g: 0.0, ..params.clone() };
    let (lowest, method) = if 1usize << (4 * params.volume()) <= MAX_DENSE_DIM {
        let m = HamiltonianPieces::build(&fermion_only)?.fermion.to_dense()?;
        (hermitian_eigenvalues(&m)[0], "dense")
    } else {
        let op = model.piece(Piece::Fermion);
        (extremal_eigenvalues(&op, seed, 150).0, "Lanczos")
    };
    let value = -(lowest + shift);
    Ok(CheckResult::bound(
        "psd_after_shift",
        value,
        1e-8,
        format!("lowest H_f eigenvalue {lowest:.6} ({method}) against shift {shift:.6}"),
    ))
}

/// Lowest eigenvalue of the shifted total Hamiltonian, and of the
/// field-dependent part `H_A + H_I + H_C` on its own.
fn coupled_psd(params: &HamiltonianParams, model: &HamiltonianModel, seed: u64) -> Vec<CheckResult> {
    let shift = shift_constant(params.volume(), params.mass, params.wilson);
    let (lowest, _) = extremal_eigenvalues(&model.total(), seed, 200);
    let quadratic = model.operator(false, true, |t| matches!(t.piece, Piece::Interaction | Piece::Coulomb));
    let (q, _) = extremal_eigenvalues(&quadratic, seed, 200);
    vec![
        CheckResult::bound(
            "psd_total_after_shift",
            -(lowest + shift),
            1e-8,
            format!("lowest H eigenvalue {lowest:.6} (Lanczos) against shift {shift:.6}"),
        ),
        CheckResult::info("gauge_quadratic_lowest", Some(q), "lowest eigenvalue of H_A + H_I + H_C (Lanczos)"),
    ]
}

fn dispersion_match(params: &HamiltonianParams, model: &HamiltonianModel) -> Result<CheckResult> {
    let layout = &model.layout;
    let shift = layout.gauge_qubits();
    let sector: Vec<usize> = (0..layout.fermion_qubits).map(|l| (1usize << (layout.fermion_qubits - 1 - l)) << shift).collect();
    let h = model.piece(Piece::Fermion).restricted_dense(&sector)?;
    let got = hermitian_eigenvalues(&h);
    let mut want: Vec<f64> = momentum_modes(&params.geometry)
        .iter()
        .flat_map(|m| {
            let e = dispersion(m.p, params.mass, params.wilson);
            [e, e, -e, -e]
        })
        .collect();
    want.sort_by(|a, b| a.total_cmp(b));
    let err = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(CheckResult::bound(
        "dispersion",
        err,
        1e-10,
        format!("{} single-particle levels against +-E_p", want.len()),
    ))
}

fn charge_commutes(model: &HamiltonianModel, x: &[C64]) -> CheckResult {
    let h = model.total();
    let q = charge_operator(&model.layout);
    let c = CommutatorOperator { a: &h, b: &q };
    CheckResult::bound("charge_commutes", norm(&c.apply(x)), 1e-10, "|[H, Q] x| on a random vector")
}

/// `H_A` and `H_Pi` vanish on pure-gradient configurations.
fn transversality(params: &HamiltonianParams, seed: u64) -> CheckResult {
    let geom = &params.geometry;
    let v = geom.volume();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let k = electric_kernel(geom);
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let phi: Vec<f64> = (0..v).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let mut grad = vec![0.0; 3 * v];
        for x in geom.sites() {
            for i in 0..3 {
                grad[gauge_register(x, i)] = phi[geom.shift(x, i, 1)] - phi[x];
            }
        }
        worst = worst.max(magnetic_energy(geom, &grad).abs());
        worst = worst.max(quadratic_value(&k, &grad).abs());
    }
    CheckResult::bound("transversality", worst, 1e-10, "H_A and H_Pi energies of random gradient configurations")
}

fn chebyshev_checks(params: &HamiltonianParams, options: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let volume = params.volume() as f64;
    let mut out = Vec::new();
    for &eps in &options.epsilons {
        let kappa = (3.0 * volume / eps).sqrt();
        let grid = make_field_grid(2.0 * (kappa + 1.5), 9)?;
        let surrogate = oscillator_surrogate(1.0, grid)?;
        let r = surrogate_truncation(&surrogate, eps, volume)?;
        let fid = r.truncation_fidelity.unwrap_or(0.0);
        let ok = r.tail < r.budget && r.chebyshev.holds && r.chebyshev.moments_bounded && fid >= 1.0 - r.budget;
        out.push(CheckResult::flag(
            &format!("chebyshev_eps_{eps}"),
            ok,
            Some(r.tail),
            format!(
                "P(|A| > {:.3}) = {:.3e} against budget {:.3e}; Chebyshev tail {:.3e} < {:.3e}; window weight {:.12}",
                r.a_bound, r.tail, r.budget, r.chebyshev.probability, r.chebyshev.bound, fid
            ),
        ));
    }
    Ok(out)
}

fn dual_constructions(params: &HamiltonianParams) -> Result<Vec<CheckResult>> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    if params.grid.is_some() {
        worst = worst.max(build_h_pi(params)?.max_abs_diff(&build_h_pi_momentum(params)?));
        parts.push("H_Pi position vs momentum");
        let coupled = params.fermions && params.g != 0.0;
        if coupled {
            worst = worst.max(build_h_i(params)?.max_abs_diff(&build_h_i_momentum(params)?));
            parts.push("H_I position vs momentum");
            if params.transverse_hi {
                let lhs = build_h_a(params)?.add(&build_h_i(params)?);
                let rhs = completed_square(params)?.sub(&current_counterterm(params)?);
                worst = worst.max(lhs.max_abs_diff(&rhs));
                parts.push("H_A + H_I vs completed square");
            }
        }
    }
    if parts.is_empty() {
        return Ok(vec![CheckResult::skipped("dual_construction", "no gauge registers")]);
    }
    Ok(vec![CheckResult::bound("dual_construction", worst, 1e-10, parts.join("; "))])
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

/// Product-formula error against exact evolution for a list of step counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterScan {
    pub time: f64,
    pub steps: Vec<usize>,
    pub infidelity: Vec<f64>,
    /// `sqrt(1 - F)`, first order in `1/N`.
    pub distance: Vec<f64>,
    /// Largest deviation of a Trotter-evolved norm from 1.
    pub norm_defect: f64,
    /// Largest drift of `<Q>` along the Trotter runs.
    pub charge_drift: f64,
}

pub fn trotter_scan(prop: &Propagator, psi: &[C64], time: f64, steps: &[usize]) -> Result<TrotterScan> {
    check_normalized(psi)?;
    let h = prop.model.total();
    let exact = expm_multiply(&h, psi, time, 1e-13);
    let q = charge_operator(&prop.model.layout);
    let q0 = expectation(&q, psi);
    let mut scan = TrotterScan {
        time,
        steps: steps.to_vec(),
        infidelity: Vec::new(),
        distance: Vec::new(),
        norm_defect: (norm(&exact) - 1.0).abs(),
        charge_drift: 0.0,
    };
    for &n in steps {
        let mut s = psi.to_vec();
        let dt = time / n as f64;
        for _ in 0..n {
            prop.step(&mut s, dt);
        }
        let inf = (1.0 - fidelity(&exact, &s)).max(0.0);
        scan.infidelity.push(inf);
        scan.distance.push(inf.sqrt());
        scan.norm_defect = scan.norm_defect.max((norm(&s) - 1.0).abs());
        scan.charge_drift = scan.charge_drift.max((expectation(&q, &s) - q0).abs());
    }
    Ok(scan)
}

fn trotter_checks(
    prop: &Propagator,
    options: &VerifyOptions,
    psi: &[C64],
) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let t = options.trotter_time;
    let scan = trotter_scan(prop, psi, t, &options.trotter_steps)?;
    let n: Vec<f64> = scan.steps.iter().map(|&k| k as f64).collect();
    if scan.distance.iter().all(|&d| d < 1e-5) {
        out.push(CheckResult::skipped("trotter_slope", "product formula exact to rounding: the slots commute"));
    } else {
        let slope = log_log_slope(&n, &scan.distance);
        let ratios: Vec<f64> = (1..n.len())
            .map(|k| (scan.distance[k] * n[k]) / (scan.distance[k - 1] * n[k - 1]))
            .collect();
        let last = *ratios.last().unwrap_or(&1.0);
        let ok = (-1.2..=-0.8).contains(&slope) && (last - 1.0).abs() <= 0.2;
        out.push(CheckResult::flag(
            "trotter_slope",
            ok,
            Some(slope),
            format!("slope of sqrt(1-F) vs N over {:?}; successive N*sqrt(1-F) ratios {:?}", scan.steps, ratios),
        ));
        out.push(CheckResult::info(
            "trotter_infidelity_slope",
            Some(log_log_slope(&n, &scan.infidelity)),
            "slope of 1-F vs N",
        ));
        if options.numeric_norms {
            let c = prop.commutator_norm_sum(options.seed, 60);
            let measured = scan.distance.iter().zip(&n).map(|(d, k)| d * k / (t * t)).fold(0.0, f64::max);
            out.push(CheckResult::bound(
                "trotter_bound",
                measured,
                c,
                format!("largest N sqrt(1-F) / t^2 against sum_(i<j) |[H_i, H_j]| = {c:.4}"),
            ));
        }
    }
    out.push(CheckResult::bound("unitarity", scan.norm_defect, 1e-10, "norm defect of exact and Trotter evolution"));
    // conservation under exact evolution over a longer window
    let h = prop.model.total();
    let q = charge_operator(&prop.model.layout);
    let long = 5.0;
    let later = expm_multiply(&h, psi, long, 1e-13);
    let dq = (expectation(&q, &later) - expectation(&q, psi)).abs().max(scan.charge_drift);
    let de = (expectation(&h, &later) - expectation(&h, psi)).abs();
    let scale = 1.0 + expectation(&h, psi).abs();
    out.push(CheckResult::bound(
        "conservation",
        dq.max(de / scale),
        1e-8,
        format!("charge drift {dq:.2e}, relative energy drift {:.2e} up to t = {long}", de / scale),
    ));
    Ok(out)
}
