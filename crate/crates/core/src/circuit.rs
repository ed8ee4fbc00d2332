//! Abstract circuit layer above gate synthesis.
//!
//! Every Trotter step becomes, slot by slot: a Fourier block, a diagonal
//! phase in the conjugate basis and the inverse block for `H_Pi`; a
//! diagonal phase for `H_A`; one Pauli exponential per fermion term.

use serde::{Deserialize, Serialize};

use crate::hamiltonian::{TaggedTerm, Term};
use crate::layout::RegisterLayout;
use crate::trotter::{SlotKind, TrotterPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    DiagonalPhase,
    FourierBlock,
    PauliExponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitOp {
    pub step: usize,
    pub kind: OpKind,
    /// Hamiltonian piece the operation implements.
    pub piece: String,
    /// Trotter slot within the step.
    pub slot: String,
    pub targets: Vec<usize>,
    /// Rotation angle `|c| dt` for field-independent fermion terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    /// Name of the phase function or transform when no single angle applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_function: Option<String>,
    /// Jordan-Wigner modes `(create, annihilate)` of a fermion term.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<[usize; 2]>,
    /// Complex coefficient `[re, im]` of a fermion term.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub steps: usize,
    pub dt: f64,
    pub ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn count(&self, kind: OpKind) -> usize {
        self.ops.iter().filter(|o| o.kind == kind).count()
    }
}

/// Operations of every step of `plan`, in plan order.
pub fn emit_circuit(plan: &TrotterPlan) -> Circuit {
    let layout = plan.params.layout();
    let dt = plan.dt();
    let gauge: Vec<usize> = (layout.fermion_qubits..layout.n_qubits()).collect();
    let mut one_step = Vec::new();
    for slot in &plan.slots {
        if slot.is_empty(&plan.params) {
            continue;
        }
        let op = |kind, piece: &str, targets: Vec<usize>, phase: &str| CircuitOp {
            step: 0,
            kind,
            piece: piece.into(),
            slot: slot.label.clone(),
            targets,
            angle: None,
            phase_function: Some(phase.into()),
            modes: None,
            coefficient: None,
        };
        match slot.kind {
            SlotKind::Electric => {
                one_step.push(op(OpKind::FourierBlock, "H_Pi", gauge.clone(), "fourier"));
                one_step.push(op(OpKind::DiagonalPhase, "H_Pi", gauge.clone(), "electric-energy"));
                one_step.push(op(OpKind::FourierBlock, "H_Pi", gauge.clone(), "inverse-fourier"));
            }
            SlotKind::Magnetic => {
                one_step.push(op(OpKind::DiagonalPhase, "H_A", gauge.clone(), "magnetic-energy"));
            }
            _ => {
                for t in &slot.terms {
                    one_step.push(fermion_op(&layout, slot.label.clone(), t, dt));
                }
            }
        }
    }
    let mut ops = Vec::with_capacity(one_step.len() * plan.steps);
    for step in 0..plan.steps {
        ops.extend(one_step.iter().cloned().map(|mut o| {
            o.step = step;
            o
        }));
    }
    Circuit { n_qubits: layout.n_qubits(), steps: plan.steps, dt, ops }
}

fn fermion_op(layout: &RegisterLayout, slot: String, t: &TaggedTerm, dt: f64) -> CircuitOp {
    let (a, b) = t.term.modes();
    let mut targets: Vec<usize> = match t.term {
        // the Jordan-Wigner string spans every mode between the two ends
        Term::Bilinear { .. } => (a.min(b)..=a.max(b)).collect(),
        Term::DensityDensity { .. } => vec![a.min(b), a.max(b)],
    };
    let (coeff, field) = match &t.term {
        Term::Bilinear { coeff, field, .. } => (*coeff, field.as_ref()),
        Term::DensityDensity { coeff, .. } => ((*coeff).into(), None),
    };
    let phase_function = field.map(|w| {
        let regs: Vec<usize> = w.iter().map(|&(r, _)| r).collect();
        for &r in &regs {
            targets.extend(layout.register_qubits(r));
        }
        format!("field-weighted:{}", regs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","))
    });
    CircuitOp {
        step: 0,
        kind: OpKind::PauliExponential,
        piece: t.piece.name().into(),
        slot,
        targets,
        angle: if field.is_none() { Some(coeff.norm() * dt) } else { None },
        phase_function,
        modes: Some([a, b]),
        coefficient: Some([coeff.re, coeff.im]),
    }
}
