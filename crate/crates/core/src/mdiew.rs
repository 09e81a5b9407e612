//! Measurement-device-independent entanglement witness.
//!
//! Alice prepares an ancilla `τ_s`, Bob an ancilla `ω_t`, and an untrusted
//! relay performs a Bell-state measurement on `(τ_s, A)` and on `(B, ω_t)`,
//! announcing `+` for `|Φ⁺⟩` and `−` for `|Φ⁻⟩` (the `Ψ` outcomes are
//! discarded). With coefficients satisfying
//!
//! ```text
//! W = Σ_st β^{ab}_st  T_a(τ_s)ᵀ ⊗ T_b(ω_t)ᵀ,   T_+ = id,  T_− = tilde
//! ```
//!
//! the score `J = Σ_st β^{ab}_st p(a,b|τ_s,ω_t)` equals `Tr[Wρ]/4` for an
//! honest relay and stays nonnegative on separable inputs whatever the
//! relay measures.
//!
//! The 16-dimensional product space is ordered (Alice ancilla, system A,
//! system B, Bob ancilla).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{sample_counts, CountRecord};
use crate::qmat::{tensor, ComplexMatrix};
use crate::sampling::{ginibre, random_separable_state, stream_rng};
use crate::states::{tilde, AncillaIndex, AncillaState, BellState, SignClass, TwoQubitState};
use crate::witness::WitnessOperator;
use crate::{Error, Result};

/// Largest residual accepted from [`solve_beta`].
pub const BETA_RESIDUAL_TOL: f64 = 1e-10;

const POVM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn bell_state(self) -> BellState {
        match self {
            Sign::Plus => BellState::PhiPlus,
            Sign::Minus => BellState::PhiMinus,
        }
    }

    /// Applies the tilde transform for `−` outcomes.
    fn frame(self, m: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Sign::Plus => m.clone(),
            Sign::Minus => tilde(m),
        }
    }
}

/// Which Bell outcome a relay reports, if any.
pub fn announced_sign(outcome: BellState) -> Option<Sign> {
    match outcome {
        BellState::PhiPlus => Some(Sign::Plus),
        BellState::PhiMinus => Some(Sign::Minus),
        BellState::PsiPlus | BellState::PsiMinus => None,
    }
}

/// A recorded pair of Bell-measurement announcements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BsmOutcome {
    pub alice: Sign,
    pub bob: Sign,
}

impl BsmOutcome {
    pub const PLUS_PLUS: Self = Self::new(Sign::Plus, Sign::Plus);
    pub const PLUS_MINUS: Self = Self::new(Sign::Plus, Sign::Minus);
    pub const MINUS_PLUS: Self = Self::new(Sign::Minus, Sign::Plus);
    pub const MINUS_MINUS: Self = Self::new(Sign::Minus, Sign::Minus);

    pub const ALL: [Self; 4] = [
        Self::PLUS_PLUS,
        Self::PLUS_MINUS,
        Self::MINUS_PLUS,
        Self::MINUS_MINUS,
    ];

    pub const fn new(alice: Sign, bob: Sign) -> Self {
        Self { alice, bob }
    }

    pub fn sign_class(self) -> SignClass {
        if self.alice == self.bob {
            SignClass::Same
        } else {
            SignClass::Mixed
        }
    }

    pub fn label(self) -> String {
        format!("{}{}", self.alice.symbol(), self.bob.symbol())
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.label() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown outcome class {s:?}")))
    }
}

impl fmt::Display for BsmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `Tr[(M_a ⊗ M_b)(τ ⊗ ρ ⊗ ω)]` for arbitrary two-qubit effects.
pub fn outcome_probability(
    rho: &ComplexMatrix,
    tau: &ComplexMatrix,
    omega: &ComplexMatrix,
    alice_effect: &ComplexMatrix,
    bob_effect: &ComplexMatrix,
) -> f64 {
    let input = tensor(&tensor(tau, rho), omega);
    let effect = tensor(alice_effect, bob_effect);
    effect.trace_product(&input).expect("16x16").re
}

/// Joint probability of the announced Bell outcomes for an honest relay.
pub fn bsm_probability(
    rho: &TwoQubitState,
    tau: &AncillaState,
    omega: &AncillaState,
    outcome: BsmOutcome,
) -> f64 {
    bell_pair_probability(
        rho,
        tau,
        omega,
        outcome.alice.bell_state(),
        outcome.bob.bell_state(),
    )
}

/// Joint probability of any pair of Bell outcomes, announced or not.
pub fn bell_pair_probability(
    rho: &TwoQubitState,
    tau: &AncillaState,
    omega: &AncillaState,
    alice: BellState,
    bob: BellState,
) -> f64 {
    outcome_probability(
        rho.matrix(),
        tau.matrix(),
        omega.matrix(),
        &alice.projector(),
        &bob.projector(),
    )
}

/// `T_a(τ)ᵀ ⊗ T_b(ω)ᵀ`, the operator whose coefficient is `β^{ab}_st`.
pub fn basis_operator(
    tau: &AncillaState,
    omega: &AncillaState,
    class: BsmOutcome,
) -> ComplexMatrix {
    tensor(
        &class.alice.frame(tau.matrix()).transpose(),
        &class.bob.frame(omega.matrix()).transpose(),
    )
}

/// β coefficients of one outcome class, keyed by `(s, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub class: BsmOutcome,
    pub beta: BTreeMap<(AncillaIndex, AncillaIndex), f64>,
}

impl CoefficientTable {
    pub fn new(class: BsmOutcome) -> Self {
        Self {
            class,
            beta: BTreeMap::new(),
        }
    }

    pub fn get(&self, s: AncillaIndex, t: AncillaIndex) -> f64 {
        self.beta.get(&(s, t)).copied().unwrap_or(0.0)
    }

    /// Settings with `|β| > tol`.
    pub fn support(&self, tol: f64) -> Vec<(AncillaIndex, AncillaIndex)> {
        self.beta
            .iter()
            .filter(|(_, b)| b.abs() > tol)
            .map(|(k, _)| *k)
            .collect()
    }

    /// `Σ β_st T_a(τ_s)ᵀ ⊗ T_b(ω_t)ᵀ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.beta
            .iter()
            .fold(ComplexMatrix::zeros(4), |acc, (&(s, t), &b)| {
                &acc + &basis_operator(&s.state(), &t.state(), self.class).scale_real(b)
            })
    }

    /// Frobenius norm of `reconstruct() − W`.
    pub fn reconstruction_error(&self, w: &WitnessOperator) -> f64 {
        (&self.reconstruct() - w.matrix()).frobenius_norm()
    }
}

fn sqrt3() -> f64 {
    3f64.sqrt()
}

/// The six-setting decomposition using the tetrahedral ancillas.
pub fn sparse_table(class: BsmOutcome) -> CoefficientTable {
    use AncillaIndex::*;
    let r3 = sqrt3();
    let entries: Vec<((AncillaIndex, AncillaIndex), f64)> = match class.sign_class() {
        SignClass::Same => vec![
            ((Mixed, Mixed), 2.0 * r3 - 2.0),
            ((Mixed, Tetra), -r3),
            ((Tetra, Mixed), -r3),
            ((PlusX, PlusX), 1.0),
            ((PlusY, PlusY), 1.0),
            ((PlusZ, PlusZ), 1.0),
        ],
        SignClass::Mixed => vec![
            ((Mixed, Mixed), 2.0 * r3 + 2.0),
            ((Mixed, TetraPrime), -r3),
            ((TetraPrime, Mixed), -r3),
            ((PlusX, PlusX), -1.0),
            ((PlusY, PlusY), -1.0),
            ((PlusZ, PlusZ), 1.0),
        ],
    };
    CoefficientTable {
        class,
        beta: entries.into_iter().collect(),
    }
}

/// The decomposition over the sixteen Pauli-eigenstate settings
/// `{I/2, (I+σx)/2, (I+σy)/2, (I+σz)/2}²`.
pub fn pauli_grid_table(class: BsmOutcome) -> CoefficientTable {
    let m: [[f64; 4]; 4] = match class.sign_class() {
        SignClass::Same => [
            [4.0, -1.0, -1.0, -1.0],
            [-1.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0, 1.0],
        ],
        SignClass::Mixed => [
            [0.0, 1.0, 1.0, -1.0],
            [1.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, -1.0, 0.0],
            [-1.0, 0.0, 0.0, 1.0],
        ],
    };
    let mut table = CoefficientTable::new(class);
    for (i, &s) in AncillaIndex::PAULI_SET.iter().enumerate() {
        for (j, &t) in AncillaIndex::PAULI_SET.iter().enumerate() {
            table.beta.insert((s, t), m[i][j]);
        }
    }
    table
}

pub fn sparse_basis(class: BsmOutcome) -> Vec<(AncillaState, AncillaState)> {
    crate::states::ancilla_set(class.sign_class())
}

pub fn pauli_grid_basis() -> Vec<(AncillaState, AncillaState)> {
    let mut out = Vec::with_capacity(16);
    for s in AncillaIndex::PAULI_SET {
        for t in AncillaIndex::PAULI_SET {
            out.push((s.state(), t.state()));
        }
    }
    out
}

/// Least-squares β for `W` over `basis` in the frame of `class`.
///
/// Columns are the real and imaginary parts of the vectorised basis
/// operators; the system is solved by column-pivoted Householder QR. When
/// the basis is linearly dependent the basic solution (zeros on the
/// dependent columns) is returned.
pub fn solve_beta(
    w: &WitnessOperator,
    basis: &[(AncillaState, AncillaState)],
    class: BsmOutcome,
) -> Result<CoefficientTable> {
    let columns: Vec<Vec<f64>> = basis
        .iter()
        .map(|(tau, omega)| realify(&basis_operator(tau, omega, class)))
        .collect();
    let rhs = realify(w.matrix());
    let (beta, residual) = least_squares(&columns, &rhs);
    if !(residual < BETA_RESIDUAL_TOL) {
        return Err(Error::BasisDoesNotExpressW { residual });
    }
    let mut table = CoefficientTable::new(class);
    for ((tau, omega), b) in basis.iter().zip(beta) {
        *table
            .beta
            .entry((tau.index(), omega.index()))
            .or_insert(0.0) += b;
    }
    Ok(table)
}

fn realify(m: &ComplexMatrix) -> Vec<f64> {
    m.entries()
        .iter()
        .map(|z| z.re)
        .chain(m.entries().iter().map(|z| z.im))
        .collect()
}

/// Solves `min ‖A x − b‖` with `A` given by columns. Returns `(x, residual)`.
fn least_squares(columns: &[Vec<f64>], rhs: &[f64]) -> (Vec<f64>, f64) {
    let n = columns.len();
    let m = rhs.len();
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut b = rhs.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = n.min(m);
    let mut diag = Vec::with_capacity(steps);

    for k in 0..steps {
        let norm_below = |col: &Vec<f64>| col[k..].iter().map(|x| x * x).sum::<f64>();
        let p = (k..n)
            .max_by(|&i, &j| norm_below(&a[i]).total_cmp(&norm_below(&a[j])))
            .expect("k < n");
        a.swap(k, p);
        perm.swap(k, p);

        let xnorm = norm_below(&a[k]).sqrt();
        if xnorm == 0.0 {
            diag.push(0.0);
            break;
        }
        let alpha = if a[k][k] > 0.0 { -xnorm } else { xnorm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let s = 2.0 * v.iter().zip(col.iter()).map(|(p, q)| p * q).sum::<f64>() / vv;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= s * vi;
            }
        };
        for col in a.iter_mut().skip(k) {
            reflect(&mut col[k..]);
        }
        reflect(&mut b[k..]);
        diag.push(a[k][k]);
    }

    let lead = diag.first().map(|d| d.abs()).unwrap_or(0.0);
    let rank = diag
        .iter()
        .take_while(|d| d.abs() > 1e-10 * lead && lead > 0.0)
        .count();

    let mut y = vec![0.0; rank];
    for i in (0..rank).rev() {
        let mut s = b[i];
        for j in (i + 1)..rank {
            s -= a[j][i] * y[j];
        }
        y[i] = s / a[i][i];
    }
    let mut x = vec![0.0; n];
    for (i, yi) in y.into_iter().enumerate() {
        x[perm[i]] = yi;
    }

    let residual = (0..m)
        .map(|r| {
            let ax: f64 = columns.iter().zip(&x).map(|(c, xi)| c[r] * xi).sum();
            (ax - rhs[r]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    (x, residual)
}

/// One coefficient table per outcome class, in `BsmOutcome::ALL` order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdiewTables {
    tables: Vec<CoefficientTable>,
}

impl MdiewTables {
    pub fn new(tables: Vec<CoefficientTable>) -> Result<Self> {
        let classes: Vec<BsmOutcome> = tables.iter().map(|t| t.class).collect();
        if classes != BsmOutcome::ALL {
            return Err(Error::Parse(
                "expected one table per outcome class in ++, +-, -+, -- order".into(),
            ));
        }
        Ok(Self { tables })
    }

    /// The six-setting tables, eight distinct settings overall.
    pub fn sparse() -> Self {
        Self {
            tables: BsmOutcome::ALL.iter().map(|&c| sparse_table(c)).collect(),
        }
    }

    pub fn pauli_grid() -> Self {
        Self {
            tables: BsmOutcome::ALL
                .iter()
                .map(|&c| pauli_grid_table(c))
                .collect(),
        }
    }

    /// Solves all four classes against the six-setting bases.
    pub fn solve_sparse(w: &WitnessOperator) -> Result<Self> {
        let tables = BsmOutcome::ALL
            .iter()
            .map(|&c| solve_beta(w, &sparse_basis(c), c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { tables })
    }

    pub fn table(&self, class: BsmOutcome) -> &CoefficientTable {
        &self.tables[BsmOutcome::ALL
            .iter()
            .position(|&c| c == class)
            .expect("all classes")]
    }

    pub fn tables(&self) -> &[CoefficientTable] {
        &self.tables
    }

    /// Every `(s, t)` setting carrying a nonzero β in some class.
    pub fn settings(&self) -> Vec<(AncillaIndex, AncillaIndex)> {
        let set: BTreeSet<_> = self.tables.iter().flat_map(|t| t.support(0.0)).collect();
        set.into_iter().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JMode {
    /// `Σ_st β^{ab}_st p(a,b|s,t)` for one announced pair.
    Single(BsmOutcome),
    /// `¼ Σ_ab Σ_st β^{ab}_st p(a,b|s,t)`.
    Combined,
}

impl JMode {
    fn classes(self) -> Vec<BsmOutcome> {
        match self {
            JMode::Single(c) => vec![c],
            JMode::Combined => BsmOutcome::ALL.to_vec(),
        }
    }

    fn prefactor(self) -> f64 {
        match self {
            JMode::Single(_) => 1.0,
            JMode::Combined => 0.25,
        }
    }
}

/// Contribution key `(s, t, outcome)`.
pub type ContributionKey = (AncillaIndex, AncillaIndex, BsmOutcome);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdiewResult {
    pub j_value: f64,
    /// Unscaled `β·p` per setting and outcome.
    pub contributions: BTreeMap<ContributionKey, f64>,
    pub std_error: Option<f64>,
    pub mode: JMode,
}

impl MdiewResult {
    pub fn contribution_sum(&self) -> f64 {
        self.mode.prefactor() * self.contributions.values().sum::<f64>()
    }
}

fn evaluate(
    tables: &MdiewTables,
    mode: JMode,
    mut probability: impl FnMut(AncillaIndex, AncillaIndex, BsmOutcome) -> f64,
) -> MdiewResult {
    let mut contributions = BTreeMap::new();
    for class in mode.classes() {
        for (&(s, t), &b) in &tables.table(class).beta {
            if b == 0.0 {
                continue;
            }
            contributions.insert((s, t, class), b * probability(s, t, class));
        }
    }
    let j_value = mode.prefactor() * contributions.values().sum::<f64>();
    MdiewResult {
        j_value,
        contributions,
        std_error: None,
        mode,
    }
}

/// `J` with honest Bell-state measurements.
pub fn j_value_exact(rho: &TwoQubitState, tables: &MdiewTables, mode: JMode) -> MdiewResult {
    evaluate(tables, mode, |s, t, class| {
        bsm_probability(rho, &s.state(), &t.state(), class)
    })
}

/// Probabilities of the four announced pairs for one setting.
pub fn announced_probabilities(
    rho: &TwoQubitState,
    tau: &AncillaState,
    omega: &AncillaState,
) -> BTreeMap<String, f64> {
    BsmOutcome::ALL
        .iter()
        .map(|&o| (o.label(), bsm_probability(rho, tau, omega, o).max(0.0)))
        .collect()
}

/// Simulates `trials` rounds per setting. Each round runs the full
/// four-outcome Bell measurement on both sides; only `Φ±` pairs are
/// announced and counted, the rest are discarded but stay in `trials`.
/// Setting `k` (in sorted order) draws from stream `k` of `seed`.
pub fn simulate_records(
    rho: &TwoQubitState,
    settings: &[(AncillaIndex, AncillaIndex)],
    trials: u64,
    seed: u64,
) -> Result<BTreeMap<(AncillaIndex, AncillaIndex), CountRecord>> {
    let mut sorted = settings.to_vec();
    sorted.sort();
    sorted.dedup();
    let records = sorted
        .par_iter()
        .enumerate()
        .map(|(k, &(s, t))| {
            let probs = announced_probabilities(rho, &s.state(), &t.state());
            let sub_seed: u64 = stream_rng(seed, k as u64).random();
            sample_counts(&probs, &BTreeMap::new(), trials, sub_seed)
                .map(|r| ((s, t), r.with_setting(format!("{s},{t}"))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(records.into_iter().collect())
}

/// `J` estimated from announced counts, `p̂ = count / trials`.
///
/// The standard error uses the multinomial covariance of the four
/// announced frequencies within a setting; settings are independent.
pub fn j_value_from_counts(
    records: &BTreeMap<(AncillaIndex, AncillaIndex), CountRecord>,
    tables: &MdiewTables,
    mode: JMode,
) -> Result<MdiewResult> {
    let mut weights: BTreeMap<(AncillaIndex, AncillaIndex), Vec<(BsmOutcome, f64)>> =
        BTreeMap::new();
    for class in mode.classes() {
        for (&(s, t), &b) in &tables.table(class).beta {
            if b != 0.0 {
                weights.entry((s, t)).or_default().push((class, b));
            }
        }
    }
    for &(s, t) in weights.keys() {
        match records.get(&(s, t)) {
            Some(r) if r.trials > 0 => {}
            _ => return Err(Error::MissingSetting(format!("({s}, {t})"))),
        }
    }

    let p_hat = |s: AncillaIndex, t: AncillaIndex, class: BsmOutcome| {
        let r = &records[&(s, t)];
        r.count(&class.label()) as f64 / r.trials as f64
    };
    let mut result = evaluate(tables, mode, p_hat);

    let scale = mode.prefactor();
    let mut variance = 0.0;
    for (&(s, t), ws) in &weights {
        let n = records[&(s, t)].trials as f64;
        let (mut second, mut first) = (0.0, 0.0);
        for &(class, b) in ws {
            let p = p_hat(s, t, class);
            let c = scale * b;
            second += c * c * p;
            first += c * p;
        }
        variance += (second - first * first).max(0.0) / n;
    }
    result.std_error = Some(variance.sqrt());
    Ok(result)
}

/// A relay's measurement on one side: effects for announcing `+`, `−`,
/// or discarding the round.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    plus: ComplexMatrix,
    minus: ComplexMatrix,
    discard: ComplexMatrix,
}

impl Povm {
    /// Effects must be 4×4, Hermitian, positive semidefinite and sum to `I`
    /// within `1e-9`.
    pub fn new(plus: ComplexMatrix, minus: ComplexMatrix, discard: ComplexMatrix) -> Result<Self> {
        for (name, m) in [("+", &plus), ("-", &minus), ("discard", &discard)] {
            if m.dim() != 4 {
                return Err(Error::InvalidPovm(format!("effect {name} is not 4x4")));
            }
            if !m.is_hermitian(POVM_TOL) {
                return Err(Error::InvalidPovm(format!(
                    "effect {name} is not Hermitian"
                )));
            }
            let min = m
                .eigenvalues()?
                .iter()
                .map(|z| z.re)
                .fold(f64::INFINITY, f64::min);
            if min < -POVM_TOL {
                return Err(Error::InvalidPovm(format!(
                    "effect {name} has eigenvalue {min:e}"
                )));
            }
        }
        let total = &(&plus + &minus) + &discard;
        let err = total.max_abs_diff(&ComplexMatrix::identity(4));
        if err > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {err:e}"
            )));
        }
        Ok(Self {
            plus,
            minus,
            discard,
        })
    }

    /// Bell-state measurement announcing `Φ⁺` / `Φ⁻`.
    pub fn honest() -> Self {
        Self {
            plus: BellState::PhiPlus.projector(),
            minus: BellState::PhiMinus.projector(),
            discard: &BellState::PsiPlus.projector() + &BellState::PsiMinus.projector(),
        }
    }

    /// Announces `sign` every round.
    pub fn constant(sign: Sign) -> Self {
        let (id, zero) = (ComplexMatrix::identity(4), ComplexMatrix::zeros(4));
        match sign {
            Sign::Plus => Self {
                plus: id,
                minus: zero.clone(),
                discard: zero,
            },
            Sign::Minus => Self {
                plus: zero.clone(),
                minus: id,
                discard: zero,
            },
        }
    }

    /// Random three-outcome POVM: `M_k = L⁻¹ G_k G_k† L⁻†` with
    /// `L L† = Σ G_k G_k†` and Gaussian `G_k`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let raw: Vec<ComplexMatrix> = (0..3)
                .map(|_| {
                    let g = ginibre(rng, 4);
                    &g * &g.adjoint()
                })
                .collect();
            let total = raw.iter().fold(ComplexMatrix::zeros(4), |acc, m| &acc + m);
            let Ok(l) = total.cholesky() else { continue };
            let Ok(li) = l.lower_triangular_inverse() else {
                continue;
            };
            let mut effects = raw.iter().map(|m| {
                let e = m.conjugate_by(&li).expect("4x4");
                (&e + &e.adjoint()).scale_real(0.5)
            });
            let (plus, minus, discard) = (
                effects.next().expect("three"),
                effects.next().expect("three"),
                effects.next().expect("three"),
            );
            return Self {
                plus,
                minus,
                discard,
            };
        }
    }

    pub fn effect(&self, sign: Sign) -> &ComplexMatrix {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }

    pub fn discard(&self) -> &ComplexMatrix {
        &self.discard
    }
}

/// `J` when the relay applies `alice_povm` to (Alice ancilla, A) and
/// `bob_povm` to (B, Bob ancilla) instead of Bell-state measurements.
pub fn j_value_adversarial(
    sigma: &TwoQubitState,
    alice_povm: &Povm,
    bob_povm: &Povm,
    tables: &MdiewTables,
    mode: JMode,
) -> Result<MdiewResult> {
    // re-validate: effects may have been built by hand
    for p in [alice_povm, bob_povm] {
        Povm::new(p.plus.clone(), p.minus.clone(), p.discard.clone())?;
    }
    Ok(evaluate(tables, mode, |s, t, class| {
        outcome_probability(
            sigma.matrix(),
            s.state().matrix(),
            t.state().matrix(),
            alice_povm.effect(class.alice),
            bob_povm.effect(class.bob),
        )
    }))
}

/// Smallest `J` values found over a sweep of random separable inputs and
/// random per-side relay POVMs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialSummary {
    pub draws: usize,
    pub min_combined: f64,
    /// Per outcome class in `BsmOutcome::ALL` order.
    pub min_single: [f64; 4],
    pub worst_draw: usize,
}

/// One adversarial draw: `J` per class and combined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialDraw {
    pub index: usize,
    pub single: [f64; 4],
    pub combined: f64,
}

/// Draw `i` uses stream `i` of `seed`; draws run in parallel and are
/// returned in index order.
pub fn adversarial_draws(
    draws: usize,
    seed: u64,
    tables: &MdiewTables,
) -> Result<Vec<AdversarialDraw>> {
    (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let sigma = random_separable_state(&mut rng);
            let alice = Povm::random(&mut rng);
            let bob = Povm::random(&mut rng);
            let mut single = [0.0; 4];
            for (slot, class) in single.iter_mut().zip(BsmOutcome::ALL) {
                *slot = j_value_adversarial(&sigma, &alice, &bob, tables, JMode::Single(class))?
                    .j_value;
            }
            let combined =
                j_value_adversarial(&sigma, &alice, &bob, tables, JMode::Combined)?.j_value;
            Ok(AdversarialDraw {
                index: i,
                single,
                combined,
            })
        })
        .collect()
}

pub fn adversarial_sweep(
    draws: usize,
    seed: u64,
    tables: &MdiewTables,
) -> Result<AdversarialSummary> {
    let results = adversarial_draws(draws, seed, tables)?;
    let mut summary = AdversarialSummary {
        draws,
        min_combined: f64::INFINITY,
        min_single: [f64::INFINITY; 4],
        worst_draw: 0,
    };
    for d in &results {
        if d.combined < summary.min_combined {
            summary.min_combined = d.combined;
            summary.worst_draw = d.index;
        }
        for (m, j) in summary.min_single.iter_mut().zip(d.single) {
            *m = m.min(j);
        }
    }
    Ok(summary)
}

/// Plain-text table: header `class,s,t,beta`, one row per coefficient.
pub fn write_tables(tables: &[CoefficientTable]) -> String {
    let mut out = String::from("class,s,t,beta\n");
    for table in tables {
        for (&(s, t), b) in &table.beta {
            out.push_str(&format!("{},{s},{t},{b:?}\n", table.class));
        }
    }
    out
}

pub fn parse_tables(text: &str) -> Result<Vec<CoefficientTable>> {
    let mut lines = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h.trim() == "class,s,t,beta" => {}
        other => return Err(Error::Parse(format!("bad header {other:?}"))),
    }
    let mut tables: Vec<CoefficientTable> = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let [class, s, t, beta] = fields[..] else {
            return Err(Error::Parse(format!("expected 4 fields in {line:?}")));
        };
        let class = BsmOutcome::parse(class)?;
        let key = (AncillaIndex::parse(s)?, AncillaIndex::parse(t)?);
        let beta: f64 = beta
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("beta {beta:?}: {e}")))?;
        match tables.iter_mut().find(|tb| tb.class == class) {
            Some(tb) => {
                tb.beta.insert(key, beta);
            }
            None => {
                let mut tb = CoefficientTable::new(class);
                tb.beta.insert(key, beta);
                tables.push(tb);
            }
        }
    }
    Ok(tables)
}
