//! The four subcommands, each producing a serializable report.

use coulomb_qed::circuit::{emit_circuit, Circuit, CircuitOp};
use coulomb_qed::gauge::make_field_grid;
use coulomb_qed::hamiltonian::HamiltonianParams;
use coulomb_qed::linalg::pseudo_random_vector;
use coulomb_qed::resources::{estimate, ResourceEstimate, ResourceInputs, StructuralCounts};
use coulomb_qed::trotter::{evolution_series, EvolutionRecord, TrotterPlan, VerifyOptions, VerifyReport};
use serde::Serialize;

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::CliError;

/// Configuration with every `"auto"` field replaced by its value.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub n_a: usize,
    pub a_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResourcesReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: RunConfig,
    pub estimate: ResourceEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCommandReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: RunConfig,
    pub resolved: Resolved,
    #[serde(flatten)]
    pub report: VerifyReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: RunConfig,
    pub resolved: Resolved,
    pub n_qubits: usize,
    pub dt: f64,
    pub final_infidelity: f64,
    /// `sqrt(1 - F)` at the final time.
    pub final_distance: f64,
    pub max_charge_drift: f64,
    pub max_exact_energy_drift: f64,
    pub records: Vec<EvolutionRecord>,
}

/// First line of a circuit file.
#[derive(Debug, Clone, Serialize)]
pub struct CircuitHeader {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: RunConfig,
    pub resolved: Resolved,
    pub n_qubits: usize,
    pub steps: usize,
    pub dt: f64,
    pub structure: StructuralCounts,
    pub operations: usize,
}

fn inputs(c: &RunConfig) -> ResourceInputs {
    ResourceInputs {
        dims: c.dims,
        g: c.g,
        mass: c.mass,
        wilson: c.wilson,
        energy: c.energy,
        energy_shifted: c.energy_shifted,
        epsilon: c.epsilon,
        time: c.time,
        n_a: c.n_a.value(),
        steps: c.steps.value(),
        kappa: None,
        norm_mode: c.norm_mode,
        transverse_hi: c.transverse_hi,
        seed: c.seed,
    }
}

pub fn resources(c: &RunConfig) -> Result<ResourcesReport, CliError> {
    let estimate = estimate(&inputs(c))?;
    Ok(ResourcesReport { schema_version: SCHEMA_VERSION, command: "resources", config: c.clone(), estimate })
}

/// Fills in `"auto"` fields from the bounds. The estimate is only computed
/// when something is left to resolve.
pub fn resolve(c: &RunConfig) -> Result<(Resolved, HamiltonianParams), CliError> {
    let needs_bounds = c.n_a.value().is_none() || c.a_max.value().is_none() || c.steps.value().is_none();
    let est = if needs_bounds { Some(estimate(&inputs(c))?) } else { None };
    let e = est.as_ref();
    let steps = match (c.steps.value(), e) {
        (Some(n), _) => n,
        (None, Some(e)) => usize::try_from(e.n_t)
            .map_err(|_| CliError::Capability(format!("{} Trotter steps do not fit in memory addressing", e.n_t)))?,
        (None, None) => unreachable!("estimate computed when steps is auto"),
    };
    let resolved = Resolved {
        n_a: c.n_a.value().or_else(|| e.map(|e| e.n_a)).expect("resolved by the estimate"),
        a_max: c.a_max.value().or_else(|| e.map(|e| e.a_max)).expect("resolved by the estimate"),
        steps,
    };
    let grid = make_field_grid(resolved.a_max, resolved.n_a)?;
    let params = inputs(c).params(Some(grid))?;
    Ok((resolved, params))
}

pub fn verify(c: &RunConfig) -> Result<VerifyCommandReport, CliError> {
    let (resolved, params) = resolve(c)?;
    let options = VerifyOptions { seed: c.seed, fault: c.fault, trotter_time: c.time, ..VerifyOptions::default() };
    let report = coulomb_qed::trotter::verify_suite(&params, &options)?;
    Ok(VerifyCommandReport { schema_version: SCHEMA_VERSION, command: "verify", config: c.clone(), resolved, report })
}

pub fn evolve(c: &RunConfig) -> Result<EvolveReport, CliError> {
    let (resolved, params) = resolve(c)?;
    params.explicit_dim()?;
    let plan = TrotterPlan::new(&params, c.time, resolved.steps)?;
    let psi = pseudo_random_vector(params.layout().dim().unwrap_or(0), c.seed);
    let records = evolution_series(&plan, &psi)?;
    let first = &records[0];
    let last = records.last().expect("at least one record");
    let drift = |f: fn(&EvolutionRecord) -> f64| records.iter().map(|r| (f(r) - f(first)).abs()).fold(0.0, f64::max);
    Ok(EvolveReport {
        schema_version: SCHEMA_VERSION,
        command: "evolve",
        config: c.clone(),
        resolved,
        n_qubits: params.layout().n_qubits(),
        dt: plan.dt(),
        final_infidelity: (1.0 - last.fidelity).max(0.0),
        final_distance: (1.0 - last.fidelity).max(0.0).sqrt(),
        max_charge_drift: drift(|r| r.charge),
        max_exact_energy_drift: drift(|r| r.energy_exact),
        records,
    })
}

pub fn circuit(c: &RunConfig) -> Result<(CircuitHeader, Vec<CircuitOp>), CliError> {
    let (resolved, params) = resolve(c)?;
    let plan = TrotterPlan::new(&params, c.time, resolved.steps)?;
    let Circuit { n_qubits, steps, dt, ops } = emit_circuit(&plan);
    let header = CircuitHeader {
        schema_version: SCHEMA_VERSION,
        command: "emit-circuit",
        config: c.clone(),
        resolved,
        n_qubits,
        steps,
        dt,
        structure: StructuralCounts::of_plan(&plan),
        operations: ops.len(),
    };
    Ok((header, ops))
}

/// Header followed by one operation per line.
pub fn circuit_lines(header: &CircuitHeader, ops: &[CircuitOp]) -> Result<String, CliError> {
    let mut out = serde_json::to_string(header).map_err(|e| CliError::Io(e.to_string()))?;
    out.push('\n');
    for op in ops {
        out.push_str(&serde_json::to_string(op).map_err(|e| CliError::Io(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}
