//! First-order Trotterization.
//!
//! [`TrotterPlan`] splits the Hamiltonian into slots whose terms commute
//! among themselves, in a fixed order: `H_Pi`, `H_A`, the even-parity
//! hops of every active axis and spinor class, the odd-parity hops, the
//! wrap-around hops of odd axes, and the three on-site classes. Each slot
//! is exponentiated exactly by [`Propagator`].

mod evolve;
mod verify;

pub use evolve::*;
pub use verify::*;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{all_terms, HamiltonianParams, Piece, TaggedTerm, Term};

/// Spinor-index class of a bilinear `psi^dagger_alpha psi_beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    /// `alpha == beta`.
    Diagonal,
    /// `{0,1}` or `{2,3}`.
    Adjacent,
    /// `{0,2}` or `{1,3}`.
    Across,
}

impl PairClass {
    pub const ALL: [PairClass; 3] = [PairClass::Diagonal, PairClass::Adjacent, PairClass::Across];

    pub fn of(alpha: usize, beta: usize) -> Option<Self> {
        match alpha ^ beta {
            0 => Some(PairClass::Diagonal),
            1 => Some(PairClass::Adjacent),
            2 => Some(PairClass::Across),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            PairClass::Diagonal => "11",
            PairClass::Adjacent => "12",
            PairClass::Across => "13",
        }
    }
}

/// Which bonds of an axis a hop slot holds, by the coordinate of the
/// creating site. `Wrap` is the bond from `L - 1` back to 0 on odd axes,
/// which would otherwise share a site with the bond leaving 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    Wrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlotKind {
    Electric,
    Magnetic,
    Hop { axis: usize, parity: Parity, class: PairClass },
    OnSite(PairClass),
}

impl SlotKind {
    pub fn label(self) -> String {
        const AXES: [char; 3] = ['x', 'y', 'z'];
        match self {
            SlotKind::Electric => "H_Pi".into(),
            SlotKind::Magnetic => "H_A".into(),
            SlotKind::Hop { axis, parity, class } => {
                let p = match parity {
                    Parity::Even => "even",
                    Parity::Odd => "odd",
                    Parity::Wrap => "wrap",
                };
                format!("hop-{}-{p}-{}", AXES[axis], class.code())
            }
            SlotKind::OnSite(class) => format!("onsite-{}", class.code()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub kind: SlotKind,
    pub label: String,
    /// Fermion terms of the slot; empty for the gauge slots.
    pub terms: Vec<TaggedTerm>,
}

impl Slot {
    /// Whether the slot contributes nothing to the Hamiltonian.
    pub fn is_empty(&self, params: &HamiltonianParams) -> bool {
        match self.kind {
            SlotKind::Electric | SlotKind::Magnetic => params.grid.is_none(),
            _ => self.terms.is_empty(),
        }
    }
}

/// Ordered slots together with the evolution schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub params: HamiltonianParams,
    pub slots: Vec<Slot>,
    pub time: f64,
    pub steps: usize,
    pub log: Vec<String>,
}

impl TrotterPlan {
    /// Partition of the Hamiltonian for `steps` steps up to `time`.
    pub fn new(params: &HamiltonianParams, time: f64, steps: usize) -> Result<Self> {
        params.validate()?;
        if !time.is_finite() || time < 0.0 {
            return Err(Error::Config(format!("evolution time must be finite and nonnegative, got {time}")));
        }
        if steps == 0 {
            return Err(Error::Config("at least one Trotter step is required".into()));
        }
        let geom = &params.geometry;
        let dims = geom.dims();
        let axes = geom.active_axes();
        let mut log = Vec::new();
        let mut kinds = Vec::new();
        if params.grid.is_some() {
            kinds.extend([SlotKind::Electric, SlotKind::Magnetic]);
        } else {
            log.push("no gauge registers: H_Pi and H_A slots omitted".to_string());
        }
        if params.fermions {
            for parity in [Parity::Even, Parity::Odd] {
                for &axis in &axes {
                    for class in PairClass::ALL {
                        kinds.push(SlotKind::Hop { axis, parity, class });
                    }
                }
            }
            for &axis in &axes {
                if dims[axis] % 2 == 1 {
                    log.push(format!("axis {axis} has odd length {}: wrap-around bonds get their own slots", dims[axis]));
                    for class in PairClass::ALL {
                        kinds.push(SlotKind::Hop { axis, parity: Parity::Wrap, class });
                    }
                }
            }
            for class in PairClass::ALL {
                kinds.push(SlotKind::OnSite(class));
            }
            for axis in 0..3 {
                if dims[axis] < 2 {
                    log.push(format!("axis {axis} has length {}: no hop slots", dims[axis]));
                }
            }
        } else {
            log.push("no fermion register: hop and on-site slots omitted".to_string());
        }
        let mut slots: Vec<Slot> =
            kinds.into_iter().map(|kind| Slot { kind, label: kind.label(), terms: Vec::new() }).collect();
        let snake = params.snake();
        for t in all_terms(params) {
            let kind = classify(params, &snake, &t)?;
            let slot = slots
                .iter_mut()
                .find(|s| s.kind == kind)
                .ok_or_else(|| Error::Internal(format!("no slot {} for a {} term", kind.label(), t.piece.name())))?;
            slot.terms.push(t);
        }
        let empty: Vec<&str> =
            slots.iter().filter(|s| s.is_empty(params)).map(|s| s.label.as_str()).collect();
        log.push(format!("{} slots, {} empty", slots.len(), empty.len()));
        if !empty.is_empty() {
            log.push(format!("empty slots act as the identity: {}", empty.join(", ")));
        }
        Ok(Self { params: params.clone(), slots, time, steps, log })
    }

    pub fn dt(&self) -> f64 {
        self.time / self.steps as f64
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn nonempty_count(&self) -> usize {
        self.slots.iter().filter(|s| !s.is_empty(&self.params)).count()
    }

    pub fn with_schedule(&self, time: f64, steps: usize) -> Result<Self> {
        let mut p = self.clone();
        if !time.is_finite() || time < 0.0 || steps == 0 {
            return Err(Error::Config(format!("invalid schedule: time {time}, {steps} steps")));
        }
        p.time = time;
        p.steps = steps;
        Ok(p)
    }
}

fn classify(params: &HamiltonianParams, snake: &crate::lattice::SnakePath, t: &TaggedTerm) -> Result<SlotKind> {
    let (a, b) = t.term.modes();
    let (x, alpha) = snake.mode_at(a);
    let (y, beta) = snake.mode_at(b);
    if let Term::DensityDensity { .. } = t.term {
        return Ok(SlotKind::OnSite(PairClass::Diagonal));
    }
    let class = PairClass::of(alpha, beta)
        .ok_or_else(|| Error::Internal(format!("spinor pair ({alpha}, {beta}) has no slot class")))?;
    match t.hop_axis {
        None => {
            if x != y {
                return Err(Error::Internal(format!("{} term between distinct sites without an axis", t.piece.name())));
            }
            Ok(SlotKind::OnSite(class))
        }
        Some(axis) => {
            let geom = &params.geometry;
            let len = geom.dims()[axis];
            let cx = geom.coords(x)?[axis];
            let parity = if len % 2 == 1 && cx == len - 1 {
                Parity::Wrap
            } else if cx % 2 == 0 {
                Parity::Even
            } else {
                Parity::Odd
            };
            debug_assert_eq!(t.piece, Piece::Fermion);
            Ok(SlotKind::Hop { axis, parity, class })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::make_field_grid;
    use crate::lattice::LatticeGeometry;

    fn coupled(dims: [usize; 3]) -> HamiltonianParams {
        let grid = make_field_grid(1.0, 1).unwrap();
        HamiltonianParams::new(LatticeGeometry::new(dims).unwrap(), 0.3, 0.5, 1.0, Some(grid), true).unwrap()
    }

    #[test]
    fn slot_counts() {
        let p = TrotterPlan::new(&coupled([2, 2, 2]), 1.0, 1).unwrap();
        assert_eq!(p.slot_count(), 23);
        assert_eq!(p.nonempty_count(), 17);
        let p = TrotterPlan::new(&coupled([2, 1, 1]), 1.0, 1).unwrap();
        assert_eq!(p.slot_count(), 11);
        assert_eq!(p.nonempty_count(), 9);
        let p = TrotterPlan::new(&coupled([3, 1, 1]), 1.0, 1).unwrap();
        assert_eq!(p.slot_count(), 14);
    }

    #[test]
    fn every_term_is_placed_once() {
        let params = coupled([2, 2, 1]);
        let plan = TrotterPlan::new(&params, 1.0, 1).unwrap();
        let placed: usize = plan.slots.iter().map(|s| s.terms.len()).sum();
        assert_eq!(placed, all_terms(&params).len());
    }

    #[test]
    fn pair_classes() {
        assert_eq!(PairClass::of(2, 3), Some(PairClass::Adjacent));
        assert_eq!(PairClass::of(3, 1), Some(PairClass::Across));
        assert_eq!(PairClass::of(0, 3), None);
    }
}
