//! Truncation bounds, qubit counts, Trotter step counts and gate costs.
//!
//! All bounds take the shifted energy `E' = E + shift_constant`, the
//! lattice volume `V`, the coupling `g` and the infidelity budget `eps`.
//! Asymptotic cost formulas use unit constants throughout.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gauge::{conjugate_function_matrix, make_field_grid, FieldGrid};
use crate::hamiltonian::{shift_constant, HamiltonianParams, Term};
use crate::lattice::LatticeGeometry;
use crate::layout::RegisterLayout;
use crate::linalg::{hermitian_eigen, norm, OperatorMatrix};
use crate::trotter::{numeric_commutator_constant, truncation_fidelity, SlotKind, TrotterPlan};
use crate::{C64, MAX_DENSE_DIM, MAX_EXPLICIT_DIM};

fn check_common(e_prime: f64, volume: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("infidelity budget must lie in (0, 1), got {epsilon}"));
    }
    if !(e_prime > 0.0) || !e_prime.is_finite() {
        return domain(format!("shifted energy must be positive, got {e_prime}"));
    }
    if !(volume > 0.0) || !volume.is_finite() {
        return domain(format!("volume must be positive, got {volume}"));
    }
    Ok(())
}

fn check_coupling(g: f64) -> Result<()> {
    if !(g >= 0.0) || !g.is_finite() {
        return domain(format!("coupling must be finite and nonnegative, got {g}"));
    }
    Ok(())
}

/// `sqrt(3 E' V^{5/3} / (2 pi^2 eps)) + g V^{2/3} / (2 pi^2)`.
pub fn a_max_bound(e_prime: f64, volume: f64, g: f64, epsilon: f64) -> Result<f64> {
    check_common(e_prime, volume, epsilon)?;
    check_coupling(g)?;
    let pi2 = PI * PI;
    Ok((3.0 * e_prime * volume.powf(5.0 / 3.0) / (2.0 * pi2 * epsilon)).sqrt()
        + g * volume.powf(2.0 / 3.0) / (2.0 * pi2))
}

/// `sqrt(6 E' V / eps)`.
pub fn pi_max_bound(e_prime: f64, volume: f64, epsilon: f64) -> Result<f64> {
    check_common(e_prime, volume, epsilon)?;
    Ok((6.0 * e_prime * volume / epsilon).sqrt())
}

/// Register size from the closed-form bound, with the field spacing it
/// implies and a cross-check against the spacing actually needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegisterBound {
    pub n_a: usize,
    /// Argument of the logarithm.
    pub argument: f64,
    /// `pi / pi_max`.
    pub delta_a: f64,
    /// `ceil(log2(2 a_max / delta_a + 1))`, floored at 1.
    pub consistent_n_a: usize,
    /// Whether `2 a_max / delta_a + 1 <= 2^n_a`.
    pub fits: bool,
}

/// `ceil(log2(6 E' V^{4/3} / (pi^2 eps) + sqrt(6) g sqrt(E') V^{5/6} / (pi^3 sqrt(eps))))`,
/// at least 1.
pub fn n_a_bound(e_prime: f64, volume: f64, g: f64, epsilon: f64) -> Result<RegisterBound> {
    let a_max = a_max_bound(e_prime, volume, g, epsilon)?;
    let pi_max = pi_max_bound(e_prime, volume, epsilon)?;
    let argument = 6.0 * e_prime * volume.powf(4.0 / 3.0) / (PI * PI * epsilon)
        + 6f64.sqrt() * g * e_prime.sqrt() * volume.powf(5.0 / 6.0) / (PI.powi(3) * epsilon.sqrt());
    let n_a = ceil_log2(argument);
    let delta_a = PI / pi_max;
    let levels_needed = 2.0 * a_max / delta_a + 1.0;
    Ok(RegisterBound {
        n_a,
        argument,
        delta_a,
        consistent_n_a: ceil_log2(levels_needed),
        fits: levels_needed <= 2f64.powi(n_a as i32) * (1.0 + 1e-12),
    })
}

fn ceil_log2(x: f64) -> usize {
    (x.log2().ceil().max(1.0)) as usize
}

/// `3 n_A V + 4 V`.
pub fn total_qubits(n_a: usize, volume: usize) -> usize {
    3 * n_a * volume + 4 * volume
}

/// Default Chebyshev multiplier `sqrt(3 V / eps)`.
pub fn default_kappa(volume: f64, epsilon: f64) -> f64 {
    (3.0 * volume / epsilon).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// Unit-constant scaling formula.
    #[default]
    Asymptotic,
    /// Spectral norms of the assembled slot commutators.
    Numeric,
}

/// Inputs of the asymptotic commutator constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub volume: f64,
    pub g: f64,
    pub mass: f64,
    pub wilson: f64,
    pub a_max: f64,
    pub pi_max: f64,
}

/// `g^2 V^2 (1+m+r) + g^3 V^2 A + g V A (1+m+r) + g V P + V^{5/3} P A`.
pub fn asymptotic_commutator_constant(c: &CostParams) -> f64 {
    let v = c.volume;
    let fermion = 1.0 + c.mass + c.wilson;
    c.g * c.g * v * v * fermion
        + c.g.powi(3) * v * v * c.a_max
        + c.g * v * c.a_max * fermion
        + c.g * v * c.pi_max
        + v.powf(5.0 / 3.0) * c.pi_max * c.a_max
}

/// `ceil(C t^2 / eps)` and the constant `C` used.
pub fn steps_for_constant(constant: f64, time: f64, epsilon: f64) -> Result<u64> {
    if !(time > 0.0) || !time.is_finite() {
        return domain(format!("evolution time must be positive, got {time}"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("infidelity budget must lie in (0, 1), got {epsilon}"));
    }
    Ok(((constant * time * time / epsilon).ceil() as u64).max(1))
}

/// Trotter steps for `params` in the requested mode. Asymptotic mode takes
/// the cutoffs from `cutoffs`; numeric mode assembles the slots of `params`.
pub fn trotter_steps(
    time: f64,
    epsilon: f64,
    params: &HamiltonianParams,
    cutoffs: (f64, f64),
    mode: NormMode,
    seed: u64,
) -> Result<(u64, f64)> {
    let constant = match mode {
        NormMode::Asymptotic => asymptotic_commutator_constant(&CostParams {
            volume: params.volume() as f64,
            g: params.g,
            mass: params.mass,
            wilson: params.wilson,
            a_max: cutoffs.0,
            pi_max: cutoffs.1,
        }),
        NormMode::Numeric => {
            params.explicit_dim()?;
            numeric_commutator_constant(params, seed)?
        }
    };
    Ok((steps_for_constant(constant, time, epsilon)?, constant))
}

/// One line of the gate-cost model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCost {
    pub item: String,
    pub piece: String,
    pub formula: String,
    /// Cost of one unit (one register, one term, ...).
    pub per_unit: f64,
    pub units: f64,
    /// `per_unit * units`.
    pub count: f64,
}

/// Jordan-Wigner string overhead of the fermion terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringOverhead {
    /// Longest `Z` string of an on-site term.
    pub onsite_max: usize,
    /// Longest `Z` string of a nearest-neighbour term in this lattice.
    pub measured_max: usize,
    /// `L^2` with `L = V^{1/3}`, the worst case on a cubic snake path.
    pub worst_case_scaling: f64,
}

/// Abstract operations per Trotter step, as emitted in circuit form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StructuralCounts {
    pub fourier_blocks: usize,
    pub diagonal_phases: usize,
    pub pauli_exponentials: usize,
}

impl StructuralCounts {
    pub fn total(&self) -> usize {
        self.fourier_blocks + self.diagonal_phases + self.pauli_exponentials
    }

    pub fn of_plan(plan: &TrotterPlan) -> Self {
        let mut c = Self::default();
        for slot in &plan.slots {
            match slot.kind {
                SlotKind::Electric if plan.params.grid.is_some() => {
                    c.fourier_blocks += 2;
                    c.diagonal_phases += 1;
                }
                SlotKind::Magnetic if plan.params.grid.is_some() => c.diagonal_phases += 1,
                _ => c.pauli_exponentials += slot.terms.len(),
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCostReport {
    pub entries: Vec<GateCost>,
    /// Sum of the entry counts.
    pub per_step: f64,
    pub steps: u64,
    /// `per_step * steps`.
    pub total: f64,
    /// Local decomposition of the `H_A` phase into `2^n_A` rotations per
    /// register, as an alternative to phase kickback.
    pub magnetic_local_decomposition: f64,
    pub jordan_wigner: StringOverhead,
    pub structure: StructuralCounts,
}

/// Instantiates the unit-constant gate-cost model for `plan` with `n_a`
/// qubits per register and `steps` Trotter steps.
pub fn gate_cost_report(plan: &TrotterPlan, n_a: usize, steps: u64) -> GateCostReport {
    let params = &plan.params;
    let v = params.volume() as f64;
    let has_gauge = params.grid.is_some();
    let has_fermions = params.fermions;
    let coupled = has_gauge && has_fermions && params.g != 0.0;
    let two_n = 2f64.powi(n_a as i32);
    let mut entries = Vec::new();
    let mut push = |item: &str, piece: &str, formula: &str, per_unit: f64, units: f64| {
        entries.push(GateCost {
            item: item.into(),
            piece: piece.into(),
            formula: formula.into(),
            per_unit,
            units,
            count: per_unit * units,
        });
    };
    if has_gauge {
        let n = n_a as f64;
        push("fourier", "H_Pi", "n_A^2 per register, two transforms on 3V registers", n * n, 2.0 * 3.0 * v);
        push("electric-phase", "H_Pi", "V^2", v * v, 1.0);
        push("magnetic-phase", "H_A", "V", v, 1.0);
    }
    if coupled {
        push("interaction", "H_I", "V 2^n_A", two_n, v);
    }
    if has_fermions {
        if params.g != 0.0 {
            push("coulomb", "H_C", "V^2", v * v, 1.0);
        }
        push("fermion", "H_f", "V^{5/3}", v.powf(5.0 / 3.0), 1.0);
    }
    let per_step: f64 = entries.iter().map(|e| e.count).sum();
    let mut onsite_max = 0;
    let mut measured_max = 0;
    for slot in &plan.slots {
        for t in &slot.terms {
            let (a, b) = t.term.modes();
            let string = a.abs_diff(b).saturating_sub(1);
            match (&t.term, t.hop_axis) {
                (Term::Bilinear { .. }, Some(_)) => measured_max = measured_max.max(string),
                (Term::Bilinear { .. }, None) => onsite_max = onsite_max.max(string),
                _ => {}
            }
        }
    }
    GateCostReport {
        entries,
        per_step,
        steps,
        total: per_step * steps as f64,
        magnetic_local_decomposition: if has_gauge { 3.0 * v * two_n } else { 0.0 },
        jordan_wigner: StringOverhead {
            onsite_max,
            measured_max,
            worst_case_scaling: v.powf(2.0 / 3.0),
        },
        structure: StructuralCounts::of_plan(plan),
    }
}

/// Everything needed to size a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceInputs {
    pub dims: [usize; 3],
    pub g: f64,
    pub mass: f64,
    pub wilson: f64,
    /// State-energy scale `E`.
    pub energy: f64,
    /// `energy` already includes the fermion shift, i.e. it is `E'`.
    pub energy_shifted: bool,
    pub epsilon: f64,
    pub time: f64,
    /// Register size; `None` takes the bound.
    pub n_a: Option<usize>,
    /// Trotter steps; `None` takes the bound.
    pub steps: Option<usize>,
    /// Chebyshev multiplier; `None` takes `sqrt(3V/eps)`.
    pub kappa: Option<f64>,
    pub norm_mode: NormMode,
    pub transverse_hi: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "E_prime")]
    pub e_prime: f64,
    pub epsilon: f64,
    pub volume: usize,
    pub a_max: f64,
    pub pi_max: f64,
    pub delta_a: f64,
    #[serde(rename = "n_A")]
    pub n_a: usize,
    /// Register size from the closed-form bound, before any override.
    #[serde(rename = "n_A_bound")]
    pub n_a_bound: usize,
    /// Register size from `a_max` and `delta_a` directly.
    #[serde(rename = "n_A_consistent")]
    pub n_a_consistent: usize,
    pub total_qubits: usize,
    #[serde(rename = "N_t")]
    pub n_t: u64,
    /// Steps the bound asks for, before any override.
    #[serde(rename = "N_t_bound")]
    pub n_t_bound: u64,
    pub norm_mode: NormMode,
    pub commutator_constant: f64,
    pub kappa: f64,
    pub gate_costs: GateCostReport,
}

impl ResourceInputs {
    pub fn params(&self, grid: Option<FieldGrid>) -> Result<HamiltonianParams> {
        let geom = LatticeGeometry::new(self.dims)?;
        let mut p = HamiltonianParams::new(geom, self.g, self.mass, self.wilson, grid, true)?;
        p.transverse_hi = self.transverse_hi;
        Ok(p)
    }
}

/// Resolves all bounds for `inputs`.
pub fn estimate(inputs: &ResourceInputs) -> Result<ResourceEstimate> {
    if !inputs.energy.is_finite() || inputs.energy < 0.0 {
        return domain(format!("state energy must be finite and nonnegative, got {}", inputs.energy));
    }
    let geom = LatticeGeometry::new(inputs.dims)?;
    let volume = geom.volume();
    let v = volume as f64;
    let e_prime = if inputs.energy_shifted {
        inputs.energy
    } else {
        inputs.energy + shift_constant(volume, inputs.mass, inputs.wilson)
    };
    let a_max = a_max_bound(e_prime, v, inputs.g, inputs.epsilon)?;
    let pi_max = pi_max_bound(e_prime, v, inputs.epsilon)?;
    let reg = n_a_bound(e_prime, v, inputs.g, inputs.epsilon)?;
    let n_a = match inputs.n_a {
        Some(0) => return Err(Error::Config("n_A must be at least 1".into())),
        Some(n) => n,
        None => reg.n_a,
    };
    let kappa = match inputs.kappa {
        Some(k) if !(k > 0.0) || !k.is_finite() => return domain(format!("kappa must be positive, got {k}")),
        Some(k) => k,
        None => default_kappa(v, inputs.epsilon),
    };
    let grid = make_field_grid(a_max, n_a)?;
    let params = inputs.params(Some(grid))?;
    let (n_t_bound, constant) =
        trotter_steps(inputs.time, inputs.epsilon, &params, (a_max, pi_max), inputs.norm_mode, inputs.seed)?;
    let n_t = match inputs.steps {
        Some(0) => return Err(Error::Config("at least one Trotter step is required".into())),
        Some(n) => n as u64,
        None => n_t_bound,
    };
    // only the slot structure enters the cost model
    let plan = TrotterPlan::new(&params, inputs.time, 1)?;
    Ok(ResourceEstimate {
        energy: inputs.energy,
        e_prime,
        epsilon: inputs.epsilon,
        volume,
        a_max,
        pi_max,
        delta_a: reg.delta_a,
        n_a,
        n_a_bound: reg.n_a,
        n_a_consistent: reg.consistent_n_a,
        total_qubits: total_qubits(n_a, volume),
        n_t,
        n_t_bound,
        norm_mode: inputs.norm_mode,
        commutator_constant: constant,
        kappa,
        gate_costs: gate_cost_report(&plan, n_a, n_t),
    })
}

/// Outcome of the Chebyshev tail test for one state and observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevRecord {
    pub mu: f64,
    pub sigma: f64,
    /// `sqrt(<O^2>)`.
    pub rms: f64,
    pub kappa: f64,
    /// `P(|O - mu| > kappa sigma)`.
    pub probability: f64,
    /// `1 / kappa^2`.
    pub bound: f64,
    /// `|mu| <= rms` and `sigma <= rms`.
    pub moments_bounded: bool,
    pub holds: bool,
}

/// Chebyshev tail of the spectral distribution of `observable` in `psi`.
pub fn chebyshev_verifier(psi: &[C64], observable: &OperatorMatrix, kappa: f64) -> Result<ChebyshevRecord> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return domain(format!("kappa must be positive, got {kappa}"));
    }
    if psi.len() != observable.dim() {
        return Err(Error::Config(format!(
            "state has {} amplitudes, the observable acts on {}",
            psi.len(),
            observable.dim()
        )));
    }
    let n = norm(psi);
    if (n - 1.0).abs() > 1e-8 {
        return domain(format!("state norm {n} is not 1"));
    }
    let spectrum: Vec<(f64, f64)> = if observable.is_diagonal() {
        observable.diagonal_entries().iter().zip(psi).map(|(d, a)| (d.re, a.norm_sqr())).collect()
    } else {
        if observable.dim() > MAX_DENSE_DIM {
            return Err(Error::Capability(format!(
                "spectral decomposition limited to dimension {MAX_DENSE_DIM}, got {}",
                observable.dim()
            )));
        }
        let (vals, vecs) = hermitian_eigen(&observable.to_dense()?);
        vals.iter()
            .enumerate()
            .map(|(k, &lam)| {
                let overlap: C64 = (0..psi.len()).map(|s| vecs[(s, k)].conj() * psi[s]).sum();
                (lam, overlap.norm_sqr())
            })
            .collect()
    };
    Ok(chebyshev_from_weights(&spectrum, kappa))
}

fn chebyshev_from_weights(spectrum: &[(f64, f64)], kappa: f64) -> ChebyshevRecord {
    let total: f64 = spectrum.iter().map(|(_, w)| w).sum();
    let mu = spectrum.iter().map(|(x, w)| x * w).sum::<f64>() / total;
    let second = spectrum.iter().map(|(x, w)| x * x * w).sum::<f64>() / total;
    let var = spectrum.iter().map(|(x, w)| (x - mu).powi(2) * w).sum::<f64>() / total;
    let sigma = var.max(0.0).sqrt();
    let rms = second.max(0.0).sqrt();
    let cut = kappa * sigma * (1.0 + 1e-12) + 1e-14 * (1.0 + mu.abs());
    let probability = spectrum.iter().filter(|(x, _)| (x - mu).abs() > cut).map(|(_, w)| w).sum::<f64>() / total;
    let bound = 1.0 / (kappa * kappa);
    let slack = 1e-12 * (1.0 + rms);
    ChebyshevRecord {
        mu,
        sigma,
        rms,
        kappa,
        probability,
        bound,
        moments_bounded: mu.abs() <= rms + slack && sigma <= rms + slack,
        holds: probability < bound,
    }
}

/// Ground state of the single-mode oscillator `Pi^2/2 + omega^2 A^2/2` on
/// a field grid, standing in for one transverse mode.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSurrogate {
    pub grid: FieldGrid,
    pub omega: f64,
    pub energy: f64,
    pub state: Vec<C64>,
}

pub fn oscillator_surrogate(omega: f64, grid: FieldGrid) -> Result<OscillatorSurrogate> {
    if !(omega > 0.0) || !omega.is_finite() {
        return domain(format!("oscillator frequency must be positive, got {omega}"));
    }
    if grid.levels() > MAX_DENSE_DIM {
        return Err(Error::Capability(format!("surrogate grid limited to {MAX_DENSE_DIM} levels")));
    }
    let mut h = conjugate_function_matrix(&grid, |p| 0.5 * p * p);
    for (k, a) in grid.values().into_iter().enumerate() {
        h[(k, k)] += C64::from(0.5 * omega * omega * a * a);
    }
    let h = (h.clone() + h.adjoint()) * C64::from(0.5);
    let (vals, vecs) = hermitian_eigen(&h);
    let state: Vec<C64> = vecs.column(0).iter().copied().collect();
    Ok(OscillatorSurrogate { grid, omega, energy: vals[0], state })
}

/// Truncation test on the surrogate with the per-mode budget `eps / (3V)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateTruncation {
    pub epsilon: f64,
    pub volume: f64,
    pub kappa: f64,
    pub energy: f64,
    /// `(kappa + 1) sqrt(2 E / omega^2)`, which bounds `|mu| + kappa sigma`.
    pub a_bound: f64,
    /// `P(|A| > a_bound)`.
    pub tail: f64,
    /// `eps / (3V)`.
    pub budget: f64,
    pub chebyshev: ChebyshevRecord,
    /// Weight inside `[-a_bound, a_bound]`, when the grid spans the window.
    pub truncation_fidelity: Option<f64>,
}

pub fn surrogate_truncation(surrogate: &OscillatorSurrogate, epsilon: f64, volume: f64) -> Result<SurrogateTruncation> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("infidelity budget must lie in (0, 1), got {epsilon}"));
    }
    let kappa = default_kappa(volume, epsilon);
    let a_bound = (kappa + 1.0) * (2.0 * surrogate.energy / surrogate.omega.powi(2)).sqrt();
    let values = surrogate.grid.values();
    let tail = values
        .iter()
        .zip(&surrogate.state)
        .filter(|(a, _)| a.abs() > a_bound)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    let field = OperatorMatrix::diagonal(&values.iter().map(|&a| C64::from(a)).collect::<Vec<_>>());
    let chebyshev = chebyshev_verifier(&surrogate.state, &field, kappa)?;
    let layout = RegisterLayout::new(0, 1, surrogate.grid.n_qubits);
    let truncation = if a_bound <= surrogate.grid.a_max {
        Some(truncation_fidelity(&surrogate.state, &layout, &surrogate.grid, a_bound)?)
    } else {
        None
    };
    Ok(SurrogateTruncation {
        epsilon,
        volume,
        kappa,
        energy: surrogate.energy,
        a_bound,
        tail,
        budget: epsilon / (3.0 * volume),
        chebyshev,
        truncation_fidelity: truncation,
    })
}

/// Whether the numeric norm mode can assemble `params`.
pub fn numeric_mode_supported(params: &HamiltonianParams) -> bool {
    matches!(params.layout().dim(), Some(d) if d <= MAX_EXPLICIT_DIM)
}
