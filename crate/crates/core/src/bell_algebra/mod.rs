//! Bell-basis algebra for the purification protocol.
//!
//! Bell states and error flags share one encoding: two bits (phase, amplitude).
//! Applying the Pauli operator with flag bits `(i, j)` to Alice's half of
//! `|Φ⁺⟩` yields the Bell state labelled `(i, j)`:
//!
//! ```text
//! (0,0) Φ⁺   I
//! (0,1) Ψ⁺   X
//! (1,0) Φ⁻   Z
//! (1,1) Ψ⁻   Y
//! ```
//!
//! Coefficient vectors use the order `A, B, C, D = Φ⁺, Ψ⁻, Ψ⁺, Φ⁻`.

mod oracle;
mod table;

use std::fmt;
use std::ops::BitXor;

use serde::Serialize;

pub use oracle::{oracle_protocol_step, RotationConvention};
pub use table::{build_transition_table, Transition, TransitionTable, NOISELESS_RULES};

/// One of the four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BellLabel {
    PhiPlus,
    PsiMinus,
    PsiPlus,
    PhiMinus,
}

impl BellLabel {
    /// Coefficient order `A, B, C, D`.
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PsiMinus,
        BellLabel::PsiPlus,
        BellLabel::PhiMinus,
    ];

    pub const fn index(self) -> usize {
        match self {
            BellLabel::PhiPlus => 0,
            BellLabel::PsiMinus => 1,
            BellLabel::PsiPlus => 2,
            BellLabel::PhiMinus => 3,
        }
    }

    pub const fn from_index(index: usize) -> BellLabel {
        Self::ALL[index]
    }

    pub const fn phase_bit(self) -> bool {
        matches!(self, BellLabel::PsiMinus | BellLabel::PhiMinus)
    }

    pub const fn amplitude_bit(self) -> bool {
        matches!(self, BellLabel::PsiMinus | BellLabel::PsiPlus)
    }

    pub const fn from_bits(phase: bool, amplitude: bool) -> BellLabel {
        match (phase, amplitude) {
            (false, false) => BellLabel::PhiPlus,
            (false, true) => BellLabel::PsiPlus,
            (true, false) => BellLabel::PhiMinus,
            (true, true) => BellLabel::PsiMinus,
        }
    }

    /// The flag value that marks a pair of this state as correctly identified,
    /// i.e. the flag bits equal the Bell bits.
    pub const fn matching_flag(self) -> ErrorFlag {
        ErrorFlag::new(self.phase_bit(), self.amplitude_bit())
    }

    /// Column tag used in CSV schemas.
    pub const fn tag(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "PHIP",
            BellLabel::PsiMinus => "PSIM",
            BellLabel::PsiPlus => "PSIP",
            BellLabel::PhiMinus => "PHIM",
        }
    }

    pub fn from_tag(tag: &str) -> Option<BellLabel> {
        Self::ALL.into_iter().find(|b| b.tag() == tag)
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Two-bit lab-demon flag (phase error, amplitude error).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ErrorFlag {
    pub phase: bool,
    pub amplitude: bool,
}

impl ErrorFlag {
    /// Order `00, 01, 10, 11` (phase bit major).
    pub const ALL: [ErrorFlag; 4] = [
        ErrorFlag::new(false, false),
        ErrorFlag::new(false, true),
        ErrorFlag::new(true, false),
        ErrorFlag::new(true, true),
    ];

    pub const CLEAR: ErrorFlag = ErrorFlag::new(false, false);

    pub const fn new(phase: bool, amplitude: bool) -> ErrorFlag {
        ErrorFlag { phase, amplitude }
    }

    pub const fn index(self) -> usize {
        (self.phase as usize) << 1 | self.amplitude as usize
    }

    pub const fn from_index(index: usize) -> ErrorFlag {
        Self::ALL[index]
    }

    /// The Bell state this flag points to when the pair is correctly flagged.
    pub const fn bell(self) -> BellLabel {
        BellLabel::from_bits(self.phase, self.amplitude)
    }

    pub fn tag(self) -> &'static str {
        ["00", "01", "10", "11"][self.index()]
    }
}

impl BitXor for ErrorFlag {
    type Output = ErrorFlag;

    fn bitxor(self, rhs: ErrorFlag) -> ErrorFlag {
        ErrorFlag::new(self.phase ^ rhs.phase, self.amplitude ^ rhs.amplitude)
    }
}

impl fmt::Display for ErrorFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Single-qubit Pauli operator σ₀..σ₃.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    /// Order σ₀, σ₁, σ₂, σ₃; noise tables are indexed the same way.
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    pub const fn index(self) -> usize {
        match self {
            PauliLabel::I => 0,
            PauliLabel::X => 1,
            PauliLabel::Y => 2,
            PauliLabel::Z => 3,
        }
    }

    pub const fn from_index(index: usize) -> PauliLabel {
        Self::ALL[index]
    }

    pub const fn from_flag_bits(bits: ErrorFlag) -> PauliLabel {
        match (bits.phase, bits.amplitude) {
            (false, false) => PauliLabel::I,
            (false, true) => PauliLabel::X,
            (true, false) => PauliLabel::Z,
            (true, true) => PauliLabel::Y,
        }
    }

    pub fn name(self) -> &'static str {
        ["I", "X", "Y", "Z"][self.index()]
    }

    pub fn from_name(name: &str) -> Option<PauliLabel> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Flag increment the lab demon records when it applies `p`:
/// X flips the amplitude bit, Z the phase bit, Y both.
pub const fn pauli_flag_bits(p: PauliLabel) -> ErrorFlag {
    match p {
        PauliLabel::I => ErrorFlag::new(false, false),
        PauliLabel::X => ErrorFlag::new(false, true),
        PauliLabel::Y => ErrorFlag::new(true, true),
        PauliLabel::Z => ErrorFlag::new(true, false),
    }
}

/// Bell label of `σ_p ⊗ 1 |s⟩`, global phase dropped.
pub fn apply_one_sided_pauli(s: BellLabel, p: PauliLabel) -> BellLabel {
    (s.matching_flag() ^ pauli_flag_bits(p)).bell()
}

// Rows: flag of the source pair, columns: flag of the target pair.
const FLAG_UPDATE: [[u8; 4]; 4] = [
    [0b00, 0b00, 0b00, 0b10],
    [0b00, 0b01, 0b11, 0b00],
    [0b00, 0b11, 0b01, 0b00],
    [0b10, 0b00, 0b00, 0b00],
];

/// Flag of the kept pair as a function of the (post-noise) flags of the
/// source and target pair.
pub fn flag_update(source: ErrorFlag, target: ErrorFlag) -> ErrorFlag {
    ErrorFlag::from_index(FLAG_UPDATE[source.index()][target.index()] as usize)
}

/// One-bit flag update for binary pairs: logical AND.
pub fn binary_flag_update(source: bool, target: bool) -> bool {
    source && target
}
