//! Jordan-Wigner images of the lattice fermion fields.
//!
//! Occupation 0 is the `Z = +1` qubit state. `Pauli::Lower` is `|0><1|`,
//! removing a particle, and `Pauli::Raise` is `|1><0|`. The annihilator of
//! mode `l` is `Z_0 ... Z_{l-1} Lower_l`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::lattice::{SnakePath, SPINOR_COMPONENTS};
use crate::linalg::{OperatorMatrix, SparseBuilder};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// `|1><0| = (X - iY)/2`.
    Raise,
    /// `|0><1| = (X + iY)/2`.
    Lower,
    /// `|1><1| = (I - Z)/2`.
    Number,
}

impl Pauli {
    /// Image of computational state `bit`, as `(new bit, amplitude)`.
    pub fn act(self, bit: bool) -> Option<(bool, C64)> {
        let one = C64::new(1.0, 0.0);
        match (self, bit) {
            (Pauli::X, b) => Some((!b, one)),
            (Pauli::Y, false) => Some((true, C64::new(0.0, 1.0))),
            (Pauli::Y, true) => Some((false, C64::new(0.0, -1.0))),
            (Pauli::Z, false) => Some((false, one)),
            (Pauli::Z, true) => Some((true, -one)),
            (Pauli::Raise, false) => Some((true, one)),
            (Pauli::Lower, true) => Some((false, one)),
            (Pauli::Number, true) => Some((true, one)),
            _ => None,
        }
    }

    pub fn adjoint(self) -> Self {
        match self {
            Pauli::Raise => Pauli::Lower,
            Pauli::Lower => Pauli::Raise,
            p => p,
        }
    }

    /// Decomposition into plain Pauli operators, `None` standing for identity.
    pub fn expand(self) -> Vec<(C64, Option<Pauli>)> {
        let half = C64::new(0.5, 0.0);
        let i_half = C64::new(0.0, 0.5);
        match self {
            Pauli::Raise => vec![(half, Some(Pauli::X)), (-i_half, Some(Pauli::Y))],
            Pauli::Lower => vec![(half, Some(Pauli::X)), (i_half, Some(Pauli::Y))],
            Pauli::Number => vec![(half, None), (-half, Some(Pauli::Z))],
            p => vec![(C64::new(1.0, 0.0), Some(p))],
        }
    }
}

/// Weighted tensor product of single-qubit factors on distinct qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub coefficient: C64,
    factors: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn new(coefficient: C64, mut factors: Vec<(usize, Pauli)>) -> Result<Self> {
        if !coefficient.re.is_finite() || !coefficient.im.is_finite() {
            return domain("Pauli string coefficient must be finite");
        }
        factors.sort_by_key(|f| f.0);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return domain("Pauli string factors must act on distinct qubits");
        }
        Ok(Self { coefficient, factors })
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coefficient: self.coefficient.conj(),
            factors: self.factors.iter().map(|&(q, p)| (q, p.adjoint())).collect(),
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { coefficient: self.coefficient * s, factors: self.factors.clone() }
    }

    pub fn z_count(&self) -> usize {
        self.factors.iter().filter(|f| f.1 == Pauli::Z).count()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.last().map(|f| f.0)
    }

    /// Image of basis state `state` of an `n_qubits` register, where qubit
    /// `q` is bit `n_qubits - 1 - q`.
    pub fn act_on_basis(&self, state: usize, n_qubits: usize) -> Option<(usize, C64)> {
        let mut s = state;
        let mut amp = self.coefficient;
        for &(q, p) in self.factors.iter().rev() {
            let bit = n_qubits - 1 - q;
            let (b, a) = p.act((s >> bit) & 1 == 1)?;
            s = (s & !(1 << bit)) | ((b as usize) << bit);
            amp *= a;
        }
        Some((s, amp))
    }

    /// Expansion into plain Pauli strings (X, Y, Z factors only).
    pub fn expand(&self) -> Vec<PauliString> {
        let mut out = vec![(self.coefficient, Vec::new())];
        for &(q, p) in &self.factors {
            let mut next = Vec::new();
            for (c, f) in &out {
                for (w, plain) in p.expand() {
                    let mut f2: Vec<(usize, Pauli)> = f.clone();
                    if let Some(pp) = plain {
                        f2.push((q, pp));
                    }
                    next.push((c * w, f2));
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|(coefficient, factors)| PauliString { coefficient, factors })
            .collect()
    }

    pub fn to_matrix(&self, n_qubits: usize) -> OperatorMatrix {
        let dim = 1usize << n_qubits;
        let mut b = SparseBuilder::new(dim);
        for col in 0..dim {
            if let Some((row, amp)) = self.act_on_basis(col, n_qubits) {
                b.add(row, col, amp);
            }
        }
        b.build()
    }
}

/// A fermion mode together with its position on the Jordan-Wigner line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermionModeIndex {
    pub site: usize,
    pub alpha: usize,
    pub l: usize,
}

impl FermionModeIndex {
    pub fn new(snake: &SnakePath, site: usize, alpha: usize) -> Self {
        Self { site, alpha, l: snake.jw_position(site, alpha) }
    }
}

fn check_mode(l: usize, total_modes: usize) -> Result<()> {
    if l >= total_modes {
        return domain(format!("mode {l} outside a register of {total_modes} modes"));
    }
    Ok(())
}

/// Annihilator of mode `l`.
pub fn jw_lower(l: usize, total_modes: usize) -> Result<PauliString> {
    check_mode(l, total_modes)?;
    let mut f: Vec<(usize, Pauli)> = (0..l).map(|q| (q, Pauli::Z)).collect();
    f.push((l, Pauli::Lower));
    PauliString::new(C64::new(1.0, 0.0), f)
}

/// Creator of mode `l`.
pub fn jw_raise(l: usize, total_modes: usize) -> Result<PauliString> {
    Ok(jw_lower(l, total_modes)?.adjoint())
}

/// `psi^dagger_a psi_b`.
pub fn bilinear(a: usize, b: usize, total_modes: usize) -> Result<PauliString> {
    check_mode(a, total_modes)?;
    check_mode(b, total_modes)?;
    if a == b {
        return PauliString::new(C64::new(1.0, 0.0), vec![(a, Pauli::Number)]);
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let mut f: Vec<(usize, Pauli)> = (lo + 1..hi).map(|q| (q, Pauli::Z)).collect();
    f.push((a, Pauli::Raise));
    f.push((b, Pauli::Lower));
    PauliString::new(C64::new(1.0, 0.0), f)
}

pub type Spinor4 = [[C64; 4]; 4];

fn zero4() -> Spinor4 {
    [[C64::new(0.0, 0.0); 4]; 4]
}

fn sigma(i: usize) -> [[C64; 2]; 2] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    match i {
        0 => [[o, one], [one, o]],
        1 => [[o, -im], [im, o]],
        2 => [[one, o], [o, -one]],
        _ => panic!("spatial index {i} out of range"),
    }
}

/// Weyl-representation gamma matrices: `gamma^0` has identity off-diagonal
/// blocks, `gamma^i = [[0, sigma^i], [-sigma^i, 0]]` with `i` in `0..3`
/// naming the spatial axis.
pub fn gamma(mu: usize) -> Spinor4 {
    let mut g = zero4();
    if mu == 0 {
        for a in 0..2 {
            g[a][a + 2] = C64::new(1.0, 0.0);
            g[a + 2][a] = C64::new(1.0, 0.0);
        }
        return g;
    }
    let s = sigma(mu - 1);
    for a in 0..2 {
        for b in 0..2 {
            g[a][b + 2] = s[a][b];
            g[a + 2][b] = -s[a][b];
        }
    }
    g
}

pub fn spinor_mul(a: &Spinor4, b: &Spinor4) -> Spinor4 {
    let mut c = zero4();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// `gamma^0 gamma^mu`, the matrix sandwiched between `psi^dagger` and `psi`
/// in the current `J^mu`.
pub fn current_matrix(mu: usize) -> Spinor4 {
    spinor_mul(&gamma(0), &gamma(mu))
}

/// `J^mu` at `site` on an `n_qubits` register (fermion qubits first), as a
/// list of weighted bilinears `(alpha, beta, weight)` with weight `g M[a][b]`.
pub fn current_terms(mu: usize, g: f64) -> Vec<(usize, usize, C64)> {
    let m = current_matrix(mu);
    let mut out = Vec::new();
    for a in 0..SPINOR_COMPONENTS {
        for b in 0..SPINOR_COMPONENTS {
            if m[a][b].norm() > 0.0 {
                out.push((a, b, m[a][b] * g));
            }
        }
    }
    out
}

/// Current density `J^mu(site)` as a matrix on an `n_qubits` register whose
/// first `4V` qubits are the fermion modes.
pub fn current_density(
    snake: &SnakePath,
    site: usize,
    mu: usize,
    g: f64,
    n_qubits: usize,
) -> Result<OperatorMatrix> {
    let total = SPINOR_COMPONENTS * snake.len();
    let dim = 1usize << n_qubits;
    let mut b = SparseBuilder::new(dim);
    for (alpha, beta, w) in current_terms(mu, g) {
        let s = bilinear(snake.jw_position(site, alpha), snake.jw_position(site, beta), total)?;
        for col in 0..dim {
            if let Some((row, amp)) = s.act_on_basis(col, n_qubits) {
                b.add(row, col, amp * w);
            }
        }
    }
    Ok(b.build())
}

/// `J^0(site) = g * (number of particles at site)`.
pub fn charge_density(snake: &SnakePath, site: usize, g: f64, n_qubits: usize) -> Result<OperatorMatrix> {
    current_density(snake, site, 0, g, n_qubits)
}

/// Total charge `Q = sum_x J^0(x)` with unit coupling.
pub fn total_charge(snake: &SnakePath, n_qubits: usize) -> Result<OperatorMatrix> {
    let fermion = SPINOR_COMPONENTS * snake.len();
    let dim = 1usize << n_qubits;
    let d: Vec<C64> = (0..dim)
        .map(|s| C64::from((s >> (n_qubits - fermion)).count_ones() as f64))
        .collect();
    Ok(OperatorMatrix::diagonal(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeGeometry;

    fn mat(p: &PauliString, n: usize) -> OperatorMatrix {
        p.to_matrix(n)
    }

    #[test]
    fn lower_examples() {
        let l0 = jw_lower(0, 4).unwrap();
        assert_eq!(l0.factors(), &[(0, Pauli::Lower)]);
        let l2 = jw_lower(2, 4).unwrap();
        assert_eq!(l2.factors(), &[(0, Pauli::Z), (1, Pauli::Z), (2, Pauli::Lower)]);
        assert!(jw_lower(4, 4).is_err());
    }

    #[test]
    fn anticommutators_on_six_modes() {
        let n = 6;
        let lows: Vec<_> = (0..n).map(|l| mat(&jw_lower(l, n).unwrap(), n)).collect();
        let raises: Vec<_> = (0..n).map(|l| mat(&jw_raise(l, n).unwrap(), n)).collect();
        let id = OperatorMatrix::identity(1 << n);
        let zero = OperatorMatrix::zeros(1 << n);
        for a in 0..n {
            for b in 0..n {
                let ac = lows[a].anticommutator(&raises[b]);
                let want = if a == b { &id } else { &zero };
                assert!(ac.max_abs_diff(want) < 1e-12);
                assert!(lows[a].anticommutator(&lows[b]).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bilinear_matches_product_of_images() {
        let n = 5;
        for a in 0..n {
            for b in 0..n {
                let prod = mat(&jw_raise(a, n).unwrap(), n).matmul(&mat(&jw_lower(b, n).unwrap(), n));
                let bl = bilinear(a, b, n).unwrap();
                assert!(mat(&bl, n).max_abs_diff(&prod) < 1e-14, "({a},{b})");
                if a < b {
                    assert_eq!(bl.z_count(), b - a - 1);
                }
                let swapped = mat(&bilinear(b, a, n).unwrap(), n);
                assert!(mat(&bl, n).adjoint().max_abs_diff(&swapped) < 1e-14);
            }
        }
        assert_eq!(bilinear(1, 2, 4).unwrap().z_count(), 0);
        let num = mat(&bilinear(2, 2, 3).unwrap(), 3);
        for s in 0..8usize {
            let occ = (s & 1) as f64;
            assert_eq!(num.get(s, s).re, occ);
        }
    }

    #[test]
    fn expansion_reproduces_matrix() {
        let n = 4;
        for (a, b) in [(0, 3), (2, 1), (1, 1), (3, 0)] {
            let s = bilinear(a, b, n).unwrap().scaled(C64::new(0.3, -1.1));
            let parts = s.expand();
            let max_terms = 1 << s.factors().iter().filter(|f| f.1 != Pauli::Z).count();
            assert!(parts.len() <= max_terms);
            let mut sum = OperatorMatrix::zeros(1 << n);
            for p in &parts {
                assert!(p.factors().iter().all(|f| matches!(f.1, Pauli::X | Pauli::Y | Pauli::Z)));
                sum = sum.add(&p.to_matrix(n));
            }
            assert!(sum.max_abs_diff(&s.to_matrix(n)) < 1e-14);
        }
    }

    #[test]
    fn string_lengths_across_snake_rows() {
        // worst-case string between lattice neighbours grows with the row length
        for l in [2usize, 3, 4] {
            let geom = LatticeGeometry::new([l, l, 1]).unwrap();
            let snake = SnakePath::new(&geom);
            let total = 4 * geom.volume();
            let mut worst = 0;
            for site in geom.sites() {
                for axis in geom.active_axes() {
                    let nb = geom.shift(site, axis, 1);
                    let s = bilinear(snake.jw_position(site, 0), snake.jw_position(nb, 0), total).unwrap();
                    worst = worst.max(s.z_count());
                }
            }
            assert!(worst >= 4 * l - 1 && worst <= 4 * l * l, "L={l}: {worst}");
        }
    }

    #[test]
    fn number_operators_commute_with_binary_spectrum() {
        let n = 8;
        let nums: Vec<_> = (0..n).map(|l| mat(&bilinear(l, l, n).unwrap(), n)).collect();
        for a in 0..n {
            assert!(nums[a].is_diagonal());
            assert!(nums[a].diagonal_entries().iter().all(|z| z.re == 0.0 || z.re == 1.0));
            for b in 0..n {
                assert!(nums[a].commutator(&nums[b]).max_abs() == 0.0);
            }
        }
    }

    #[test]
    fn weyl_algebra() {
        let eta = [1.0, -1.0, -1.0, -1.0];
        for mu in 0..4 {
            for nu in 0..4 {
                let a = spinor_mul(&gamma(mu), &gamma(nu));
                let b = spinor_mul(&gamma(nu), &gamma(mu));
                for i in 0..4 {
                    for j in 0..4 {
                        let want = if mu == nu && i == j { 2.0 * eta[mu] } else { 0.0 };
                        assert!((a[i][j] + b[i][j] - C64::from(want)).norm() < 1e-15);
                    }
                }
            }
        }
        // gamma^0 gamma^i is Hermitian
        for mu in 0..4 {
            let m = current_matrix(mu);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(m[i][j], m[j][i].conj());
                }
            }
        }
    }

    #[test]
    fn charge_and_axial_examples() {
        let geom = LatticeGeometry::new([1, 1, 1]).unwrap();
        let snake = SnakePath::new(&geom);
        let g = 0.7;
        let j3 = current_density(&snake, 0, 3, g, 4).unwrap();
        assert!(j3.is_diagonal());
        let state = |occ: [u8; 4]| occ.iter().fold(0usize, |s, &o| (s << 1) | o as usize);
        assert_eq!(j3.get(state([0, 0, 0, 0]), state([0, 0, 0, 0])).re, 0.0);
        assert!((j3.get(state([0, 1, 1, 0]), state([0, 1, 1, 0])).re - 2.0 * g).abs() < 1e-15);
        assert!((j3.get(state([1, 0, 0, 1]), state([1, 0, 0, 1])).re + 2.0 * g).abs() < 1e-15);
        let j0 = charge_density(&snake, 0, g, 4).unwrap();
        for s in 0..16usize {
            assert!((j0.get(s, s).re - g * s.count_ones() as f64).abs() < 1e-15);
        }
        let q = total_charge(&snake, 4).unwrap();
        assert!(q.max_abs_diff(&j0.scale(C64::from(1.0 / g))) < 1e-14);
    }
}
