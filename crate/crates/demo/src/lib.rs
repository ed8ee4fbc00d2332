//! Browser demo over `coulomb-qed`: free dispersion curves, resource bounds
//! against the infidelity budget, and Trotter error curves on the smallest
//! coupled lattice. Each export returns a JSON string.

use std::f64::consts::PI;

use coulomb_qed::gauge::make_field_grid;
use coulomb_qed::hamiltonian::{dispersion, dispersion_bound_sq, HamiltonianParams};
use coulomb_qed::lattice::LatticeGeometry;
use coulomb_qed::linalg::pseudo_random_vector;
use coulomb_qed::resources::{estimate, NormMode, ResourceInputs};
use coulomb_qed::trotter::{log_log_slope, trotter_scan, Propagator, TrotterPlan};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Serialize)]
pub struct DispersionCurve {
    /// Momentum `k` in `[-pi, pi]`.
    pub k: Vec<f64>,
    /// `E` at `p = (k, 0, 0)`.
    pub axis: Vec<f64>,
    /// `E` at `p = (k, k, k)`.
    pub diagonal: Vec<f64>,
    /// `sqrt(3 + m^2 + 12 m r + 36 r^2)`.
    pub bound: f64,
}

pub fn dispersion_curve(mass: f64, wilson: f64, points: usize) -> DispersionCurve {
    let n = points.max(2);
    let k: Vec<f64> = (0..n).map(|i| -PI + 2.0 * PI * i as f64 / (n - 1) as f64).collect();
    DispersionCurve {
        axis: k.iter().map(|&q| dispersion([q, 0.0, 0.0], mass, wilson)).collect(),
        diagonal: k.iter().map(|&q| dispersion([q, q, q], mass, wilson)).collect(),
        bound: dispersion_bound_sq(mass, wilson).sqrt(),
        k,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsRow {
    pub epsilon: f64,
    pub a_max: f64,
    pub pi_max: f64,
    pub n_a: usize,
    pub total_qubits: usize,
    pub steps: u64,
    pub commutator_constant: f64,
}

/// Asymptotic bounds on an `L^3` lattice for `points` budgets spaced
/// logarithmically between `eps_min` and `eps_max`.
#[allow(clippy::too_many_arguments)]
pub fn resource_sweep(
    side: usize,
    g: f64,
    mass: f64,
    wilson: f64,
    energy: f64,
    time: f64,
    eps_min: f64,
    eps_max: f64,
    points: usize,
) -> coulomb_qed::Result<Vec<BoundsRow>> {
    let n = points.max(2);
    let (lo, hi) = (eps_min.ln(), eps_max.ln());
    (0..n)
        .map(|i| {
            let epsilon = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
            let e = estimate(&ResourceInputs {
                dims: [side; 3],
                g,
                mass,
                wilson,
                energy,
                energy_shifted: false,
                epsilon,
                time,
                n_a: None,
                steps: None,
                kappa: None,
                norm_mode: NormMode::Asymptotic,
                transverse_hi: true,
                seed: 0,
            })?;
            Ok(BoundsRow {
                epsilon,
                a_max: e.a_max,
                pi_max: e.pi_max,
                n_a: e.n_a,
                total_qubits: e.total_qubits,
                steps: e.n_t,
                commutator_constant: e.commutator_constant,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TrotterCurve {
    pub steps: Vec<usize>,
    /// `sqrt(1 - F)` against exact evolution.
    pub distance: Vec<f64>,
    pub infidelity: Vec<f64>,
    /// Sum of slot commutator norms.
    pub constant: f64,
    /// `C t^2 / N`.
    pub bound: Vec<f64>,
    pub slope: f64,
}

/// Product-formula error on a 2x1x1 lattice with one qubit per gauge
/// register, for a random initial state.
pub fn trotter_curve(g: f64, time: f64, steps: &[usize], seed: u64) -> coulomb_qed::Result<TrotterCurve> {
    let params = HamiltonianParams::new(
        LatticeGeometry::new([2, 1, 1])?,
        g,
        0.5,
        1.0,
        Some(make_field_grid(1.0, 1)?),
        true,
    )?;
    let plan = TrotterPlan::new(&params, time, 1)?;
    let prop = Propagator::new(&plan)?;
    let psi = pseudo_random_vector(prop.dim(), seed);
    let scan = trotter_scan(&prop, &psi, time, steps)?;
    let constant = prop.commutator_norm_sum(seed, 60);
    let n: Vec<f64> = steps.iter().map(|&k| k as f64).collect();
    Ok(TrotterCurve {
        steps: steps.to_vec(),
        slope: log_log_slope(&n, &scan.distance),
        bound: n.iter().map(|k| constant * time * time / k).collect(),
        distance: scan.distance,
        infidelity: scan.infidelity,
        constant,
    })
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = dispersionCurve)]
pub fn dispersion_curve_json(mass: f64, wilson: f64, points: usize) -> Result<String, JsError> {
    to_json(&dispersion_curve(mass, wilson, points))
}

#[wasm_bindgen(js_name = resourceSweep)]
#[allow(clippy::too_many_arguments)]
pub fn resource_sweep_json(
    side: usize,
    g: f64,
    mass: f64,
    wilson: f64,
    energy: f64,
    time: f64,
    eps_min: f64,
    eps_max: f64,
    points: usize,
) -> Result<String, JsError> {
    let rows = resource_sweep(side, g, mass, wilson, energy, time, eps_min, eps_max, points)
        .map_err(|e| JsError::new(&e.to_string()))?;
    to_json(&rows)
}

#[wasm_bindgen(js_name = trotterCurve)]
pub fn trotter_curve_json(g: f64, time: f64, steps: Vec<u32>, seed: u32) -> Result<String, JsError> {
    let steps: Vec<usize> = steps.into_iter().map(|s| s as usize).collect();
    let curve = trotter_curve(g, time, &steps, seed as u64).map_err(|e| JsError::new(&e.to_string()))?;
    to_json(&curve)
}
