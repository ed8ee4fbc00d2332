//! Exact and Trotterized evolution of state vectors.

use serde::{Deserialize, Serialize};

use super::{SlotKind, TrotterPlan};
use crate::error::{domain, Error, Result};
use crate::gauge::FieldGrid;
use crate::hamiltonian::{
    check_dim, to_conjugate_basis, CommutatorOperator, HamiltonianModel, HamiltonianParams, PieceOperator,
};
use crate::layout::RegisterLayout;
use crate::linalg::{expm_multiply, hermitian_norm, inner, norm, LinearOperator};
use crate::{C64, MAX_EXPLICIT_DIM};

pub type StateVector = Vec<C64>;

/// Tolerance of the Krylov exponential.
const EXACT_TOL: f64 = 1e-12;

/// Slot operators of a plan, ready to be exponentiated.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub model: HamiltonianModel,
    pub slots: Vec<(SlotKind, PieceOperator)>,
}

impl Propagator {
    pub fn new(plan: &TrotterPlan) -> Result<Self> {
        check_dim(&plan.params.layout(), MAX_EXPLICIT_DIM)?;
        Ok(Self::from_model(HamiltonianModel::new(&plan.params)?, plan))
    }

    /// Slot operators over an existing model, without the explicit limit.
    pub fn from_model(model: HamiltonianModel, plan: &TrotterPlan) -> Self {
        let slots = plan
            .slots
            .iter()
            .filter(|s| !s.is_empty(&plan.params))
            .map(|s| {
                let terms = s.terms.iter().map(|t| t.term.clone()).collect();
                let op = model.operator_from_terms(s.kind == SlotKind::Electric, s.kind == SlotKind::Magnetic, terms);
                (s.kind, op)
            })
            .collect();
        Self { model, slots }
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// `psi <- exp(-i H_k dt) psi` for slot `k`.
    pub fn apply_slot(&self, k: usize, psi: &mut [C64], dt: f64) {
        apply_exponential(&self.slots[k].1, psi, dt);
    }

    /// One first-order step through all slots in plan order.
    pub fn step(&self, psi: &mut [C64], dt: f64) {
        for k in 0..self.slots.len() {
            self.apply_slot(k, psi, dt);
        }
    }

    /// `sum_{i<j} ||[H_i, H_j]||` over the nonempty slots, each norm from
    /// Lanczos on `i [H_i, H_j]`.
    pub fn commutator_norm_sum(&self, seed: u64, lanczos_steps: usize) -> f64 {
        let mut total = 0.0;
        for i in 0..self.slots.len() {
            for j in i + 1..self.slots.len() {
                let c = CommutatorOperator { a: &self.slots[i].1, b: &self.slots[j].1 };
                total += hermitian_norm(&c, seed.wrapping_add((i * 64 + j) as u64), lanczos_steps);
            }
        }
        total
    }
}

/// `exp(-i H dt)` for an operator whose terms commute and whose hops act on
/// disjoint mode pairs: diagonal phases, two-level rotations per hop, and
/// the electric piece as a phase in the conjugate basis.
fn apply_exponential(op: &PieceOperator, psi: &mut [C64], dt: f64) {
    if op.diag.iter().any(|&d| d != 0.0) {
        for (v, &d) in psi.iter_mut().zip(&op.diag) {
            *v *= C64::from_polar(1.0, -d * dt);
        }
    }
    for t in &op.hops {
        let (a, b) = t.modes();
        for s in 0..psi.len() {
            if !op.layout.occupied(s, b) || op.layout.occupied(s, a) {
                continue;
            }
            let Some((r, amp)) = t.hop(&op.layout, op.grid.as_ref(), s) else { continue };
            let m = amp.norm();
            if m == 0.0 {
                continue;
            }
            let (sin, cos) = (m * dt).sin_cos();
            let i_sin = C64::new(0.0, -sin / m);
            let (x, y) = (psi[s], psi[r]);
            psi[s] = x * cos + i_sin * amp.conj() * y;
            psi[r] = y * cos + i_sin * amp * x;
        }
    }
    if let Some(e) = &op.electric {
        to_conjugate_basis(psi, &op.layout, e, true);
        let gmask = op.layout.gauge_dim() - 1;
        for (s, v) in psi.iter_mut().enumerate() {
            *v *= C64::from_polar(1.0, -e.conj_diag[s & gmask] * dt);
        }
        to_conjugate_basis(psi, &op.layout, e, false);
    }
}

/// `exp(-i H t) psi` for the full Hamiltonian.
pub fn exact_evolve(model: &HamiltonianModel, psi: &[C64], t: f64) -> Result<StateVector> {
    check_dim(&model.layout, MAX_EXPLICIT_DIM)?;
    check_state(psi, model.dim())?;
    Ok(expm_multiply(&model.total(), psi, t, EXACT_TOL))
}

/// First-order product formula over the plan's slots and schedule.
pub fn trotter_evolve(psi: &[C64], plan: &TrotterPlan) -> Result<StateVector> {
    let prop = Propagator::new(plan)?;
    check_state(psi, prop.dim())?;
    let mut out = psi.to_vec();
    let dt = plan.dt();
    for _ in 0..plan.steps {
        prop.step(&mut out, dt);
    }
    Ok(out)
}

fn check_state(psi: &[C64], dim: usize) -> Result<()> {
    if psi.len() != dim {
        return Err(Error::Config(format!("state has {} amplitudes, the register needs {dim}", psi.len())));
    }
    Ok(())
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr()
}

/// Weight of `psi` on basis states whose every gauge register lies in
/// `[-a_max, a_max]`. The state lives on `grid`, which must span the window.
pub fn truncation_fidelity(psi: &[C64], layout: &RegisterLayout, grid: &FieldGrid, a_max: f64) -> Result<f64> {
    if !(a_max > 0.0) || a_max > grid.a_max * (1.0 + 1e-12) {
        return domain(format!("window {a_max} exceeds the grid span {}", grid.a_max));
    }
    check_normalized(psi)?;
    let inside: Vec<bool> = grid.values().iter().map(|v| v.abs() <= a_max * (1.0 + 1e-12)).collect();
    let weight = psi
        .iter()
        .enumerate()
        .filter(|(s, _)| (0..layout.gauge_registers).all(|r| inside[layout.level(*s, r)]))
        .map(|(_, v)| v.norm_sqr())
        .sum();
    Ok(weight)
}

pub(crate) fn check_normalized(psi: &[C64]) -> Result<()> {
    let n = norm(psi);
    if (n - 1.0).abs() > 1e-8 {
        return domain(format!("state norm {n} is not 1"));
    }
    Ok(())
}

/// One record of an evolution run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub step: usize,
    pub time: f64,
    pub fidelity: f64,
    pub charge: f64,
    pub energy: f64,
    pub energy_exact: f64,
    pub norm: f64,
}

/// Evolves `psi` exactly and by the product formula side by side,
/// recording after every step. `charge` and `energy` refer to the Trotter
/// state, `energy_exact` to the exact one.
pub fn evolution_series(plan: &TrotterPlan, psi: &[C64]) -> Result<Vec<EvolutionRecord>> {
    let prop = Propagator::new(plan)?;
    check_state(psi, prop.dim())?;
    let h = prop.model.total();
    let q = charge_operator(&prop.model.layout);
    let dt = plan.dt();
    let mut exact = psi.to_vec();
    let mut trot = psi.to_vec();
    let record = |step: usize, exact: &[C64], trot: &[C64]| EvolutionRecord {
        step,
        time: step as f64 * dt,
        fidelity: fidelity(exact, trot),
        charge: expectation(&q, trot),
        energy: expectation(&h, trot),
        energy_exact: expectation(&h, exact),
        norm: norm(trot),
    };
    let mut out = vec![record(0, &exact, &trot)];
    if plan.time == 0.0 {
        return Ok(out);
    }
    for step in 1..=plan.steps {
        exact = expm_multiply(&h, &exact, dt, EXACT_TOL);
        prop.step(&mut trot, dt);
        out.push(record(step, &exact, &trot));
    }
    Ok(out)
}

/// `<psi|O|psi>` for Hermitian `O`.
pub fn expectation(op: &dyn LinearOperator, psi: &[C64]) -> f64 {
    inner(psi, &op.apply(psi)).re
}

/// Total fermion number `Q = sum_l n_l` (in units of the charge `g`).
pub fn charge_operator(layout: &RegisterLayout) -> ChargeOperator {
    ChargeOperator { layout: *layout }
}

#[derive(Debug, Clone, Copy)]
pub struct ChargeOperator {
    layout: RegisterLayout,
}

impl LinearOperator for ChargeOperator {
    fn dim(&self) -> usize {
        self.layout.dim().expect("charge operator on an oversized register")
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for (s, (v, &xs)) in y.iter_mut().zip(x).enumerate() {
            *v = xs * self.layout.particle_number(s) as f64;
        }
    }
}

/// Commutator-norm constant `C` of the plan's slots, for `params` with
/// dimension at most [`MAX_EXPLICIT_DIM`].
pub fn numeric_commutator_constant(params: &HamiltonianParams, seed: u64) -> Result<f64> {
    let plan = TrotterPlan::new(params, 1.0, 1)?;
    let prop = Propagator::new(&plan)?;
    Ok(prop.commutator_norm_sum(seed, 60))
}
