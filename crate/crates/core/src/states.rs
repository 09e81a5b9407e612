//! Pauli operators, Bell states, the dephased-singlet family `ρ^v`, the
//! ancilla preparations and the tilde (σz-conjugation) transform.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qmat::{tensor, ComplexMatrix, C64};
use crate::{Error, Result};

const STATE_TOL: f64 = 1e-10;
const MIN_EIGENVALUE: f64 = -1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn matrix(self) -> ComplexMatrix {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let data = match self {
            Pauli::I => vec![one, z, z, one],
            Pauli::X => vec![z, one, one, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![one, z, z, -one],
        };
        ComplexMatrix::new(2, data).expect("2x2")
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'i',
            Pauli::X => 'x',
            Pauli::Y => 'y',
            Pauli::Z => 'z',
        }
    }
}

/// `σ_a ⊗ σ_b`.
pub fn pauli_pair(a: Pauli, b: Pauli) -> ComplexMatrix {
    tensor(&a.matrix(), &b.matrix())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Amplitudes over `|HH⟩, |HV⟩, |VH⟩, |VV⟩`.
    pub fn vector(self) -> [C64; 4] {
        let s = FRAC_1_SQRT_2;
        let a = |x: [f64; 4]| x.map(|v| C64::new(v, 0.0));
        match self {
            BellState::PhiPlus => a([s, 0.0, 0.0, s]),
            BellState::PhiMinus => a([s, 0.0, 0.0, -s]),
            BellState::PsiPlus => a([0.0, s, s, 0.0]),
            BellState::PsiMinus => a([0.0, s, -s, 0.0]),
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector())
    }
}

/// A validated two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    matrix: ComplexMatrix,
    label: String,
    physical: bool,
}

impl TwoQubitState {
    /// Requires Hermitian, unit trace and minimum eigenvalue `≥ -1e-9`.
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let state = Self::relaxed(matrix, label)?;
        if !state.physical {
            return Err(Error::InvalidState(format!(
                "{}: negative eigenvalue below {MIN_EIGENVALUE:e}",
                state.label
            )));
        }
        Ok(state)
    }

    /// Checks only Hermiticity and trace; positivity is recorded in
    /// [`is_physical`](Self::is_physical) instead of being enforced.
    pub fn relaxed(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if matrix.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.dim(),
            });
        }
        if !matrix.is_hermitian(STATE_TOL) {
            return Err(Error::InvalidState(format!("{label}: not Hermitian")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("{label}: trace {tr} != 1")));
        }
        let min_eig = matrix
            .eigenvalues()?
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            matrix,
            label,
            physical: min_eig >= MIN_EIGENVALUE,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn apply_local(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Self> {
        let uv = tensor(u, v);
        Self::new(self.matrix.conjugate_by(&uv)?, self.label.clone())
    }

    /// The state after a half-wave plate at 45° on Bob's photon (`H ↔ V`).
    pub fn with_bob_flipped(&self) -> Self {
        let flip = pauli_pair(Pauli::I, Pauli::X);
        Self {
            matrix: self.matrix.conjugate_by(&flip).expect("4x4"),
            label: format!("{} (bob flipped)", self.label),
            physical: self.physical,
        }
    }
}

/// The dephased singlet `(1-v)|Ψ⁻⟩⟨Ψ⁻| + v/2 (|HH⟩⟨HH| + |VV⟩⟨VV|)`.
pub fn rho_v(v: f64) -> Result<TwoQubitState> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange(format!("v = {v} outside [0, 1]")));
    }
    let singlet = BellState::PsiMinus.projector().scale_real(1.0 - v);
    let dephased = ComplexMatrix::from_real_diag(&[v / 2.0, 0.0, 0.0, v / 2.0]);
    TwoQubitState::new(&singlet + &dephased, format!("rho_v({v})"))
}

/// `v = cos²(2θ)` for a selector angle in degrees.
pub fn v_from_theta(theta_deg: f64) -> f64 {
    (2.0 * theta_deg.to_radians()).cos().powi(2)
}

/// Selector angle in `[0°, 45°]` producing `v`.
pub fn theta_from_v(v: f64) -> f64 {
    (v.clamp(0.0, 1.0).sqrt().acos() / 2.0).to_degrees()
}

/// Mixing parameter expressed both as the selector angle and as `v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingAngle {
    pub theta: f64,
    pub v: f64,
}

impl MixingAngle {
    pub fn from_theta(theta: f64) -> Self {
        Self {
            theta,
            v: v_from_theta(theta),
        }
    }

    pub fn from_v(v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange(format!("v = {v} outside [0, 1]")));
        }
        Ok(Self {
            theta: theta_from_v(v),
            v,
        })
    }

    pub fn state(&self) -> Result<TwoQubitState> {
        rho_v(self.v)
    }
}

/// Flips the sign of the off-diagonal entries, `⟨j|τ̃|i⟩ = (-1)^{i+j}⟨j|τ|i⟩`.
pub fn tilde(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = m.clone();
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            if (i + j) % 2 == 1 {
                out[(i, j)] = -out[(i, j)];
            }
        }
    }
    out
}

/// Labels of the ancilla preparations: `0` is `I/2`, `1..=3` are the `+1`
/// eigenstates of σx, σy, σz, `4` points along `(x+y+z)/√3` and `4'`
/// along `(-x-y+z)/√3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AncillaIndex {
    Mixed,
    PlusX,
    PlusY,
    PlusZ,
    Tetra,
    TetraPrime,
}

impl AncillaIndex {
    pub const ALL: [AncillaIndex; 6] = [
        AncillaIndex::Mixed,
        AncillaIndex::PlusX,
        AncillaIndex::PlusY,
        AncillaIndex::PlusZ,
        AncillaIndex::Tetra,
        AncillaIndex::TetraPrime,
    ];

    pub const PAULI_SET: [AncillaIndex; 4] = [
        AncillaIndex::Mixed,
        AncillaIndex::PlusX,
        AncillaIndex::PlusY,
        AncillaIndex::PlusZ,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AncillaIndex::Mixed => "0",
            AncillaIndex::PlusX => "1",
            AncillaIndex::PlusY => "2",
            AncillaIndex::PlusZ => "3",
            AncillaIndex::Tetra => "4",
            AncillaIndex::TetraPrime => "4'",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.label() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown ancilla label {s:?}")))
    }

    /// Bloch vector of the preparation.
    pub fn bloch(self) -> [f64; 3] {
        let k = 1.0 / 3f64.sqrt();
        match self {
            AncillaIndex::Mixed => [0.0, 0.0, 0.0],
            AncillaIndex::PlusX => [1.0, 0.0, 0.0],
            AncillaIndex::PlusY => [0.0, 1.0, 0.0],
            AncillaIndex::PlusZ => [0.0, 0.0, 1.0],
            AncillaIndex::Tetra => [k, k, k],
            AncillaIndex::TetraPrime => [-k, -k, k],
        }
    }

    pub fn state(self) -> AncillaState {
        AncillaState::new(self)
    }
}

impl fmt::Display for AncillaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A single-qubit ancilla preparation `(I + r·σ)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct AncillaState {
    index: AncillaIndex,
    matrix: ComplexMatrix,
}

impl AncillaState {
    pub fn new(index: AncillaIndex) -> Self {
        let [x, y, z] = index.bloch();
        let mut m = Pauli::I.matrix();
        for (r, p) in [(x, Pauli::X), (y, Pauli::Y), (z, Pauli::Z)] {
            m = &m + &p.matrix().scale_real(r);
        }
        Self {
            index,
            matrix: m.scale_real(0.5),
        }
    }

    pub fn index(&self) -> AncillaIndex {
        self.index
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).expect("2x2").re
    }
}

/// Whether the two announced Bell outcomes carry the same sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignClass {
    Same,
    Mixed,
}

/// The six (τ, ω) settings with nonzero β in the sparse decomposition for
/// an outcome class: the four diagonal Pauli settings plus the two settings
/// pairing `I/2` with the tetrahedral state (`4` for same-sign, `4'` for
/// mixed-sign outcomes).
pub fn ancilla_set(class: SignClass) -> Vec<(AncillaState, AncillaState)> {
    let extra = match class {
        SignClass::Same => AncillaIndex::Tetra,
        SignClass::Mixed => AncillaIndex::TetraPrime,
    };
    let mut pairs: Vec<(AncillaIndex, AncillaIndex)> =
        AncillaIndex::PAULI_SET.iter().map(|&a| (a, a)).collect();
    pairs.push((AncillaIndex::Mixed, extra));
    pairs.push((extra, AncillaIndex::Mixed));
    pairs
        .into_iter()
        .map(|(s, t)| (s.state(), t.state()))
        .collect()
}
