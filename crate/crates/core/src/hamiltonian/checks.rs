//! Diagnostics that are reported rather than enforced.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::HamiltonianParams;
use crate::error::{Error, Result};
use crate::fermion::current_density;
use crate::lattice::momentum_modes;
use crate::linalg::{norm, LinearOperator, OperatorMatrix};
use crate::C64;

/// Outcome of testing `<|J^0(p)|^2> - sum_j <|J^j(p)|^2> >= 0` on random
/// occupation-basis states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimelikeReport {
    pub samples: usize,
    pub violations: usize,
    /// Most negative value of the tested difference.
    pub worst: f64,
}

/// Evaluates the timelike-current inequality on `samples` random
/// occupation states per momentum. The inequality is not an operator
/// identity: a single occupied mode already gives `g^2 - 3 g^2` at `V = 1`.
pub fn timelike_current_check(params: &HamiltonianParams, samples: usize, seed: u64) -> Result<TimelikeReport> {
    if !params.fermions {
        return Err(Error::Config("timelike-current check needs fermions".into()));
    }
    let geom = &params.geometry;
    let snake = params.snake();
    let nf = 4 * geom.volume();
    if nf > 20 {
        return Err(Error::Capability(format!("{nf} fermion modes exceed the check's limit of 20")));
    }
    let dim = 1usize << nf;
    let v = geom.volume() as f64;
    let currents: Vec<Vec<OperatorMatrix>> = (0..4)
        .map(|mu| geom.sites().map(|x| current_density(&snake, x, mu, params.g, nf)).collect())
        .collect::<Result<_>>()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = TimelikeReport { samples: 0, violations: 0, worst: f64::INFINITY };
    for mode in momentum_modes(geom) {
        for _ in 0..samples {
            let s = rng.random_range(0..dim);
            let mut basis = vec![C64::new(0.0, 0.0); dim];
            basis[s] = C64::new(1.0, 0.0);
            let mut diff = 0.0;
            for (mu, per_site) in currents.iter().enumerate() {
                let mut jp = vec![C64::new(0.0, 0.0); dim];
                for x in geom.sites() {
                    let ph = mode.phase(geom.coords(x).unwrap()).conj() / v;
                    for (acc, val) in jp.iter_mut().zip(per_site[x].apply(&basis)) {
                        *acc += ph * val;
                    }
                }
                let w = norm(&jp).powi(2);
                diff += if mu == 0 { w } else { -w };
            }
            report.samples += 1;
            if diff < -1e-12 {
                report.violations += 1;
            }
            report.worst = report.worst.min(diff);
        }
    }
    Ok(report)
}
