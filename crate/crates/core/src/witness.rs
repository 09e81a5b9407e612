//! The conventional witness `W = I/2 − |Ψ⁻⟩⟨Ψ⁻| = ¼ Σᵢ σᵢ⊗σᵢ` and its
//! evaluation from local Pauli correlations.

use serde::{Deserialize, Serialize};

use crate::qmat::{tensor, ComplexMatrix};
use crate::states::{BellState, Pauli, TwoQubitState};
use crate::{Error, Result};

const CORRELATION_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessOperator {
    matrix: ComplexMatrix,
}

impl WitnessOperator {
    /// `I/2 − |Ψ⁻⟩⟨Ψ⁻|`.
    pub fn singlet() -> Self {
        let half = ComplexMatrix::identity(4).scale_real(0.5);
        Self {
            matrix: &half - &BellState::PsiMinus.projector(),
        }
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.dim(),
            });
        }
        if !matrix.is_hermitian(1e-12) {
            return Err(Error::InvalidState("witness must be Hermitian".into()));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Tr[W ρ]`.
    pub fn value(&self, rho: &TwoQubitState) -> f64 {
        self.matrix
            .trace_product(rho.matrix())
            .expect("both operators are 4x4")
            .re
    }
}

/// `Tr[W ρ]` for the singlet witness.
pub fn witness_value_exact(rho: &TwoQubitState) -> f64 {
    WitnessOperator::singlet().value(rho)
}

/// Probabilities of the four joint sign outcomes when both sides measure
/// the same Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointSignProbabilities {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl JointSignProbabilities {
    pub fn as_array(&self) -> [f64; 4] {
        [self.pp, self.pm, self.mp, self.mm]
    }

    pub fn from_array([pp, pm, mp, mm]: [f64; 4]) -> Self {
        Self { pp, pm, mp, mm }
    }

    pub fn total(&self) -> f64 {
        self.pp + self.pm + self.mp + self.mm
    }

    /// `p(+,+) + p(−,−) − p(+,−) − p(−,+)`.
    pub fn correlation(&self) -> f64 {
        self.pp + self.mm - self.pm - self.mp
    }
}

/// Joint sign probabilities `Tr[ρ (P^a ⊗ P^b)]` with `P^± = (I ± σ)/2`.
pub fn joint_sign_probabilities(rho: &TwoQubitState, axis: Pauli) -> JointSignProbabilities {
    let s = axis.matrix();
    let id = Pauli::I.matrix();
    let plus = (&id + &s).scale_real(0.5);
    let minus = (&id - &s).scale_real(0.5);
    let p = |a: &ComplexMatrix, b: &ComplexMatrix| {
        tensor(a, b).trace_product(rho.matrix()).expect("4x4").re
    };
    JointSignProbabilities {
        pp: p(&plus, &plus),
        pm: p(&plus, &minus),
        mp: p(&minus, &plus),
        mm: p(&minus, &minus),
    }
}

/// `⟨σx σx⟩, ⟨σy σy⟩, ⟨σz σz⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCorrelations {
    pub exx: f64,
    pub eyy: f64,
    pub ezz: f64,
}

impl PauliCorrelations {
    pub fn new(exx: f64, eyy: f64, ezz: f64) -> Result<Self> {
        for (name, e) in [("xx", exx), ("yy", eyy), ("zz", ezz)] {
            if !(e.abs() <= 1.0 + CORRELATION_SLACK) {
                return Err(Error::OutOfRange(format!(
                    "<σ{name}> = {e} outside [-1, 1]"
                )));
            }
        }
        Ok(Self { exx, eyy, ezz })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.exx, self.eyy, self.ezz]
    }
}

/// Correlations `Tr[ρ (σᵢ⊗σᵢ)]` along with the per-axis sign probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub correlations: PauliCorrelations,
    /// Indexed x, y, z.
    pub joint: [JointSignProbabilities; 3],
}

pub fn pauli_correlations(rho: &TwoQubitState) -> CorrelationReport {
    let joint = Pauli::AXES.map(|axis| joint_sign_probabilities(rho, axis));
    let [exx, eyy, ezz] = Pauli::AXES.map(|axis| {
        crate::states::pauli_pair(axis, axis)
            .trace_product(rho.matrix())
            .expect("4x4")
            .re
    });
    CorrelationReport {
        correlations: PauliCorrelations { exx, eyy, ezz },
        joint,
    }
}

/// `(1 + ⟨σxσx⟩ + ⟨σyσy⟩ + ⟨σzσz⟩)/4`.
pub fn witness_value_from_correlations(c: &PauliCorrelations) -> f64 {
    (1.0 + c.exx + c.eyy + c.ezz) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::tensor;
    use crate::sampling::{random_product_state, random_two_qubit_state, seeded_rng};
    use crate::states::{pauli_pair, rho_v};

    #[test]
    fn witness_line_at_grid_points() {
        for (v, want) in [(0.0, -0.5), (0.5, 0.0), (1.0, 0.5)] {
            let got = witness_value_exact(&rho_v(v).unwrap());
            assert!((got - want).abs() < 1e-12, "v={v}: {got}");
        }
    }

    #[test]
    fn witness_equals_pauli_expansion() {
        let sum = Pauli::ALL
            .iter()
            .map(|&p| pauli_pair(p, p))
            .fold(ComplexMatrix::zeros(4), |acc, m| &acc + &m)
            .scale_real(0.25);
        assert!(WitnessOperator::singlet().matrix().approx_eq(&sum, 1e-15));
    }

    #[test]
    fn from_correlations_examples() {
        let v =
            |x, y, z| witness_value_from_correlations(&PauliCorrelations::new(x, y, z).unwrap());
        assert!((v(-1.0, -1.0, -1.0) + 0.5).abs() < 1e-15);
        assert!(v(0.0, 0.0, -1.0).abs() < 1e-15);
        assert!((v(1.0, 1.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlations_reject_out_of_range() {
        assert!(PauliCorrelations::new(1.1, 0.0, 0.0).is_err());
        assert!(PauliCorrelations::new(0.0, f64::NAN, 0.0).is_err());
        assert!(PauliCorrelations::new(1.0 + 1e-10, -1.0, 0.0).is_ok());
    }

    #[test]
    fn correlations_of_family_members() {
        let c0 = pauli_correlations(&rho_v(0.0).unwrap()).correlations;
        assert_eq!(
            c0.as_array().map(|x| (x * 1e12).round() / 1e12),
            [-1.0, -1.0, -1.0]
        );
        // fully dephased |HH⟩,|VV⟩ mixture: no xx/yy coherence, perfect zz parity
        let c1 = pauli_correlations(&rho_v(1.0).unwrap()).correlations;
        assert!(c1.exx.abs() < 1e-15 && c1.eyy.abs() < 1e-15);
        assert!((c1.ezz - 1.0).abs() < 1e-15);
        // the attacked experimental state: rho_v(1) after Bob's half-wave plate
        let cf = pauli_correlations(&rho_v(1.0).unwrap().with_bob_flipped()).correlations;
        assert!(cf.exx.abs() < 1e-15 && cf.eyy.abs() < 1e-15);
        assert!((cf.ezz + 1.0).abs() < 1e-15);
        let mixed = TwoQubitState::new(ComplexMatrix::identity(4).scale_real(0.25), "I/4").unwrap();
        let cm = pauli_correlations(&mixed).correlations;
        assert!(cm.as_array().iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn two_evaluation_paths_agree_on_random_states() {
        let mut rng = seeded_rng(101);
        for _ in 0..100 {
            let rho = random_two_qubit_state(&mut rng);
            let report = pauli_correlations(&rho);
            let a = witness_value_from_correlations(&report.correlations);
            let b = witness_value_exact(&rho);
            assert!((a - b).abs() < 1e-12);
            for (j, e) in report.joint.iter().zip(report.correlations.as_array()) {
                assert!((j.correlation() - e).abs() < 1e-12);
                assert!(j.as_array().iter().all(|&p| p >= -1e-15));
                assert!((j.total() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn witness_nonnegative_on_product_states() {
        let mut rng = seeded_rng(202);
        for _ in 0..1000 {
            let s = random_product_state(&mut rng);
            assert!(witness_value_exact(&s) >= -1e-10);
        }
    }

    #[test]
    fn witness_nonnegative_on_computational_products() {
        let h = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let v = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        for a in [&h, &v] {
            for b in [&h, &v] {
                let s = TwoQubitState::new(tensor(a, b), "basis").unwrap();
                assert!(witness_value_exact(&s) >= -1e-15);
            }
        }
    }
}
