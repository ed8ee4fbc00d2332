#![allow(dead_code)]

use coulomb_qed::gauge::make_field_grid;
use coulomb_qed::hamiltonian::{dispersion, HamiltonianParams};
use coulomb_qed::lattice::{momentum_modes, LatticeGeometry};
use coulomb_qed::C64;

/// Smallest lattice with both gauge and fermion registers: 2x1x1 sites,
/// one qubit per gauge register, 14 qubits in total.
pub fn smallest_coupled(g: f64) -> HamiltonianParams {
    let geom = LatticeGeometry::new([2, 1, 1]).unwrap();
    let grid = make_field_grid(1.0, 1).unwrap();
    HamiltonianParams::new(geom, g, 0.5, 1.0, Some(grid), true).unwrap()
}

/// Every sum over subsets of `levels`, sorted.
pub fn subset_sums(levels: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0];
    for &e in levels {
        let with: Vec<f64> = sums.iter().map(|s| s + e).collect();
        sums.extend(with);
    }
    sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sums
}

/// Single-particle levels `+-E_p`, each twice, for a free Wilson fermion.
pub fn free_levels(geom: &LatticeGeometry, mass: f64, wilson: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for mode in momentum_modes(geom) {
        let e = dispersion(mode.p, mass, wilson);
        out.extend([e, e, -e, -e]);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Sums over all `n`-element subsets of `levels`, sorted.
pub fn fixed_size_sums(levels: &[f64], n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    fn rec(levels: &[f64], start: usize, left: usize, acc: f64, out: &mut Vec<f64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for k in start..levels.len() {
            rec(levels, k + 1, left - 1, acc + levels[k], out);
        }
    }
    rec(levels, 0, n, 0.0, &mut out);
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn basis(dim: usize, s: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[s] = C64::new(1.0, 0.0);
    v
}
