//! Basis state labels and truncated bases.

use std::fmt;

use serde::{Deserialize, Serialize};

/// `|J,N,M⟩`. For a rigid rotor (no electron spin) `N == J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateLabel {
    pub j: i32,
    pub n: i32,
    pub m: i32,
}

impl StateLabel {
    pub const fn rotor(j: i32, m: i32) -> Self {
        StateLabel { j, n: j, m }
    }

    pub const fn case_b(j: i32, n: i32, m: i32) -> Self {
        StateLabel { j, n, m }
    }

    /// Rotational level used for reporting: `J` for a rigid rotor, `N` for case (b).
    pub fn level(&self) -> i32 {
        self.n
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.j == self.n {
            write!(f, "|J={},M={}>", self.j, self.m)
        } else {
            write!(f, "|J={},N={},M={}>", self.j, self.n, self.m)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Closed-shell rigid rotor, states `|J,M⟩`.
    Linear,
    /// Hund's case (b) with `S = 1`, `Λ = 0`, states `|J,N,M⟩`.
    CaseB,
}

/// The sublattice of states reachable from an initial state: couplings only
/// change `M` by 0 or ±2 and, for the rigid rotor, `J` by 0 or ±2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisClass {
    /// `J mod 2` for the rigid rotor; `None` for case (b).
    pub j_parity: Option<i32>,
    pub m_parity: i32,
}

impl BasisClass {
    pub fn of(coupling: Coupling, label: &StateLabel) -> Self {
        let j_parity = match coupling {
            Coupling::Linear => Some(label.j.rem_euclid(2)),
            Coupling::CaseB => None,
        };
        BasisClass {
            j_parity,
            m_parity: label.m.rem_euclid(2),
        }
    }

    /// Truncated basis in this class with rotational level up to `level_max`,
    /// ordered by level, then `J`, then `M`.
    pub fn states(&self, coupling: Coupling, level_max: i32) -> Vec<StateLabel> {
        let mut out = Vec::new();
        match coupling {
            Coupling::Linear => {
                let jp = self.j_parity.unwrap_or(0);
                for j in (jp..=level_max).step_by(2) {
                    for m in -j..=j {
                        if m.rem_euclid(2) == self.m_parity {
                            out.push(StateLabel::rotor(j, m));
                        }
                    }
                }
            }
            Coupling::CaseB => {
                for n in (1..=level_max).step_by(2) {
                    for j in (n - 1)..=(n + 1) {
                        for m in -j..=j {
                            if m.rem_euclid(2) == self.m_parity {
                                out.push(StateLabel::case_b(j, n, m));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}
