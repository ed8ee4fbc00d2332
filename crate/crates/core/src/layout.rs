//! Qubit register layout.
//!
//! Qubit `q` is the `q`-th most significant bit of a basis-state index.
//! The `4V` fermion qubits come first in Jordan-Wigner order, followed by
//! the `3V` gauge registers ordered by `(site, direction)`, each holding
//! `n_A` qubits with the field level stored big-endian.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub fermion_qubits: usize,
    pub gauge_registers: usize,
    pub qubits_per_register: usize,
}

impl RegisterLayout {
    pub fn new(fermion_qubits: usize, gauge_registers: usize, qubits_per_register: usize) -> Self {
        let qubits_per_register = if gauge_registers == 0 { 0 } else { qubits_per_register };
        Self { fermion_qubits, gauge_registers, qubits_per_register }
    }

    pub fn gauge_qubits(&self) -> usize {
        self.gauge_registers * self.qubits_per_register
    }

    pub fn n_qubits(&self) -> usize {
        self.fermion_qubits + self.gauge_qubits()
    }

    /// Hilbert-space dimension, `None` when it does not fit in a `usize`.
    pub fn dim(&self) -> Option<usize> {
        1usize.checked_shl(self.n_qubits() as u32)
    }

    pub fn fermion_dim(&self) -> usize {
        1 << self.fermion_qubits
    }

    pub fn gauge_dim(&self) -> usize {
        1 << self.gauge_qubits()
    }

    /// Bit of the basis index that stores qubit `q`.
    pub fn bit_of_qubit(&self, q: usize) -> usize {
        self.n_qubits() - 1 - q
    }

    /// Occupation of Jordan-Wigner mode `l` in `state`.
    pub fn occupied(&self, state: usize, l: usize) -> bool {
        (state >> self.bit_of_qubit(l)) & 1 == 1
    }

    /// Number of occupied modes with Jordan-Wigner position strictly between
    /// `a` and `b`.
    pub fn occupied_between(&self, state: usize, a: usize, b: usize) -> u32 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if hi <= lo + 1 {
            return 0;
        }
        // qubits lo+1..hi map to a contiguous run of bits
        let top = self.bit_of_qubit(lo + 1);
        let bottom = self.bit_of_qubit(hi - 1);
        let width = top - bottom + 1;
        ((state >> bottom) & ((1usize << width) - 1)).count_ones()
    }

    /// Total number of occupied fermion modes.
    pub fn particle_number(&self, state: usize) -> u32 {
        (state >> self.gauge_qubits()).count_ones()
    }

    /// Bit position of the least significant qubit of `register`.
    pub fn register_shift(&self, register: usize) -> usize {
        self.gauge_qubits() - (register + 1) * self.qubits_per_register
    }

    /// Field level stored in gauge register `register`.
    pub fn level(&self, state: usize, register: usize) -> usize {
        (state >> self.register_shift(register)) & ((1 << self.qubits_per_register) - 1)
    }

    /// `state` with gauge register `register` overwritten by `level`.
    pub fn with_level(&self, state: usize, register: usize, level: usize) -> usize {
        let shift = self.register_shift(register);
        let mask = ((1 << self.qubits_per_register) - 1) << shift;
        (state & !mask) | (level << shift)
    }

    /// Qubit indices of gauge register `register`, most significant first.
    pub fn register_qubits(&self, register: usize) -> std::ops::Range<usize> {
        let start = self.fermion_qubits + register * self.qubits_per_register;
        start..start + self.qubits_per_register
    }

    /// Basis index from a fermion occupation pattern (bit `l` of
    /// `occupations` is mode `l`) and gauge levels.
    pub fn compose(&self, occupations: &[bool], levels: &[usize]) -> usize {
        let mut s = 0;
        for (l, &o) in occupations.iter().enumerate() {
            if o {
                s |= 1 << self.bit_of_qubit(l);
            }
        }
        for (r, &k) in levels.iter().enumerate() {
            s = self.with_level(s, r, k);
        }
        s
    }
}

/// Gauge register holding `A_direction` at `site`.
pub fn gauge_register(site: usize, direction: usize) -> usize {
    3 * site + direction
}
