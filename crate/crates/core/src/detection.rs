//! Detector-side model: Gaussian timing jitter behind a hard coincidence
//! gate, the outcome-dependent efficiencies a time shift produces, the
//! closed-form attacked witness, and seeded Monte Carlo count generation.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::sampling::{seeded_rng, stream_rng};
use crate::states::{Pauli, TwoQubitState};
use crate::witness::{
    joint_sign_probabilities, witness_value_from_correlations, PauliCorrelations,
};
use crate::{Error, Result};

/// Jitter (ns) for which a 5.5 ns shift behind a 4 ns gate leaves 10.9% of
/// coincidences. Smaller of the two roots of `coincidence_efficiency(5.5, σ, 4) = 0.109`.
pub const FITTED_JITTER_SIGMA_NS: f64 = 2.051823099841633;

/// Operating point of the demonstrated attack.
pub const ATTACK_DELTA_T_NS: f64 = 5.5;
pub const COINCIDENCE_WINDOW_NS: f64 = 4.0;
pub const SUPPRESSION_FACTOR: f64 = 0.109;

const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackMode {
    Honest,
    TimeShift,
}

/// Timing parameters of the two-detector-per-side setup, in nanoseconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub delta_t: f64,
    pub jitter_sigma: f64,
    pub window: f64,
    pub mode: AttackMode,
}

impl DetectorModel {
    pub fn new(delta_t: f64, jitter_sigma: f64, window: f64, mode: AttackMode) -> Result<Self> {
        if !(window > 0.0) || !window.is_finite() {
            return Err(Error::OutOfRange(format!(
                "window {window} must be positive"
            )));
        }
        if !(jitter_sigma >= 0.0) || !jitter_sigma.is_finite() {
            return Err(Error::OutOfRange(format!(
                "jitter sigma {jitter_sigma} must be nonnegative"
            )));
        }
        if !delta_t.is_finite() {
            return Err(Error::OutOfRange("delta_t must be finite".into()));
        }
        Ok(Self {
            delta_t,
            jitter_sigma,
            window,
            mode,
        })
    }

    pub fn honest() -> Self {
        Self {
            delta_t: 0.0,
            jitter_sigma: FITTED_JITTER_SIGMA_NS,
            window: COINCIDENCE_WINDOW_NS,
            mode: AttackMode::Honest,
        }
    }

    /// The demonstrated operating point: 5.5 ns shift, 4 ns gate, fitted jitter.
    pub fn demonstrated_attack() -> Self {
        Self {
            delta_t: ATTACK_DELTA_T_NS,
            jitter_sigma: FITTED_JITTER_SIGMA_NS,
            window: COINCIDENCE_WINDOW_NS,
            mode: AttackMode::TimeShift,
        }
    }
}

/// Standard normal CDF via `erfc`, accurate in both tails.
fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `P(|T₁ − T₂ + Δt| ≤ window/2)` for independent `T₁, T₂ ~ N(0, σ²)`.
pub fn coincidence_efficiency(delta_t: f64, jitter_sigma: f64, window: f64) -> f64 {
    let half = window / 2.0;
    // symmetric in Δt; evaluate with Δt ≥ 0 so both tails use small erfc arguments
    let d = delta_t.abs();
    if jitter_sigma == 0.0 {
        return if d <= half { 1.0 } else { 0.0 };
    }
    let spread = jitter_sigma * SQRT_2;
    let upper = (half - d) / spread;
    let lower = (-half - d) / spread;
    (normal_cdf(upper) - normal_cdf(lower)).clamp(0.0, 1.0)
}

/// Joint sign outcome of one correlation measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SignPair {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
}

impl SignPair {
    pub const ALL: [SignPair; 4] = [
        SignPair::PlusPlus,
        SignPair::PlusMinus,
        SignPair::MinusPlus,
        SignPair::MinusMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SignPair::PlusPlus => "++",
            SignPair::PlusMinus => "+-",
            SignPair::MinusPlus => "-+",
            SignPair::MinusMinus => "--",
        }
    }

    pub fn is_same_sign(self) -> bool {
        matches!(self, SignPair::PlusPlus | SignPair::MinusMinus)
    }

    /// `+1` for same-sign, `−1` for mixed-sign outcomes.
    pub fn parity(self) -> f64 {
        if self.is_same_sign() {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for SignPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Coincidence acceptance probability per joint sign outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuppressionProfile {
    eta: [f64; 4],
}

impl SuppressionProfile {
    /// Efficiencies in `SignPair::ALL` order.
    pub fn new(eta: [f64; 4]) -> Result<Self> {
        if let Some(bad) = eta.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::OutOfRange(format!(
                "efficiency {bad} outside [0, 1]"
            )));
        }
        Ok(Self { eta })
    }

    pub fn honest() -> Self {
        Self { eta: [1.0; 4] }
    }

    /// Same-sign outcomes kept with probability `f`, mixed-sign untouched.
    pub fn same_sign(f: f64) -> Result<Self> {
        Self::new([f, 1.0, 1.0, f])
    }

    pub fn get(&self, pair: SignPair) -> f64 {
        self.eta[pair as usize]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.eta
    }

    pub fn efficiency_map(&self) -> BTreeMap<String, f64> {
        SignPair::ALL
            .iter()
            .map(|&p| (p.label().to_string(), self.get(p)))
            .collect()
    }
}

/// Honest mode accepts everything. Under the time shift the detectors
/// `d_a1` and `d_b0` are delayed by `Δt`, which moves both same-sign
/// coincidence paths off the gate centre while the mixed-sign paths keep
/// full acceptance.
pub fn suppression_profile(model: &DetectorModel) -> SuppressionProfile {
    match model.mode {
        AttackMode::Honest => SuppressionProfile::honest(),
        AttackMode::TimeShift => {
            let f = coincidence_efficiency(model.delta_t, model.jitter_sigma, model.window);
            SuppressionProfile {
                eta: [f, 1.0, 1.0, f],
            }
        }
    }
}

/// Correlations Alice and Bob infer when coincidences are filtered by `profile`.
pub fn attacked_correlations(
    rho: &TwoQubitState,
    profile: &SuppressionProfile,
) -> Result<PauliCorrelations> {
    let mut e = [0.0; 3];
    for (slot, axis) in e.iter_mut().zip(Pauli::AXES) {
        let p = joint_sign_probabilities(rho, axis).as_array();
        let weighted: Vec<f64> = SignPair::ALL
            .iter()
            .map(|&s| p[s as usize] * profile.get(s))
            .collect();
        let total: f64 = weighted.iter().sum();
        if total <= 0.0 {
            return Err(Error::NoSurvivingCoincidences {
                axis: axis.symbol(),
            });
        }
        *slot = SignPair::ALL
            .iter()
            .zip(&weighted)
            .map(|(s, w)| s.parity() * w)
            .sum::<f64>()
            / total;
    }
    PauliCorrelations::new(e[0], e[1], e[2])
}

/// Witness value `Tr[W′ρ]` reported under the efficiency profile.
pub fn attacked_witness_value(rho: &TwoQubitState, profile: &SuppressionProfile) -> Result<f64> {
    Ok(witness_value_from_correlations(&attacked_correlations(
        rho, profile,
    )?))
}

/// Announced counts for one measurement setting.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting: String,
    pub counts: BTreeMap<String, u64>,
    pub trials: u64,
}

impl CountRecord {
    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn recorded(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn with_setting(mut self, setting: impl Into<String>) -> Self {
        self.setting = setting.into();
        self
    }
}

/// Draws `trials` outcomes from `outcome_probs` (missing mass is an
/// unannounced, discarded trial), keeps each drawn outcome with its
/// efficiency (absent labels default to 1) and counts survivors.
pub fn sample_counts(
    outcome_probs: &BTreeMap<String, f64>,
    efficiencies: &BTreeMap<String, f64>,
    trials: u64,
    seed: u64,
) -> Result<CountRecord> {
    if trials == 0 {
        return Err(Error::InvalidProbabilities(
            "trials must be positive".into(),
        ));
    }
    let mut total = 0.0;
    for (label, &p) in outcome_probs {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidProbabilities(format!("p({label}) = {p}")));
        }
        total += p;
    }
    if total > 1.0 + PROBABILITY_SLACK {
        return Err(Error::InvalidProbabilities(format!(
            "probabilities sum to {total}"
        )));
    }
    for (label, &eta) in efficiencies {
        if !outcome_probs.contains_key(label) {
            return Err(Error::InvalidProbabilities(format!(
                "efficiency given for unknown outcome {label}"
            )));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidProbabilities(format!(
                "efficiency({label}) = {eta}"
            )));
        }
    }

    let labels: Vec<&String> = outcome_probs.keys().collect();
    let mut cumulative = Vec::with_capacity(labels.len());
    let mut acc = 0.0;
    for l in &labels {
        acc += outcome_probs[*l];
        cumulative.push(acc);
    }
    let eta: Vec<f64> = labels
        .iter()
        .map(|l| efficiencies.get(*l).copied().unwrap_or(1.0))
        .collect();

    let mut rng = seeded_rng(seed);
    let mut hits = vec![0u64; labels.len()];
    for _ in 0..trials {
        let u: f64 = rng.random();
        let Some(k) = cumulative.iter().position(|&c| u < c) else {
            continue;
        };
        let keep = match eta[k] {
            e if e >= 1.0 => true,
            e if e <= 0.0 => false,
            e => rng.random::<f64>() < e,
        };
        if keep {
            hits[k] += 1;
        }
    }

    Ok(CountRecord {
        setting: String::new(),
        counts: labels.into_iter().cloned().zip(hits).collect(),
        trials,
    })
}

/// Witness estimate from one count record per axis (x, y, z).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessEstimate {
    pub value: f64,
    pub std_error: f64,
    pub correlations: [f64; 3],
    pub records: Vec<CountRecord>,
}

/// Correlation `(N_same − N_mixed)/N` per axis and the witness
/// `(1 + Σ e)/4`; each correlation has variance `(1 − e²)/N`.
pub fn estimate_witness(records: &[CountRecord]) -> Result<WitnessEstimate> {
    if records.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: records.len(),
        });
    }
    let mut correlations = [0.0; 3];
    let mut variance = 0.0;
    for ((slot, rec), axis) in correlations.iter_mut().zip(records).zip(Pauli::AXES) {
        let n: u64 = SignPair::ALL.iter().map(|p| rec.count(p.label())).sum();
        if n == 0 {
            return Err(Error::NoSurvivingCoincidences {
                axis: axis.symbol(),
            });
        }
        let signed: f64 = SignPair::ALL
            .iter()
            .map(|p| p.parity() * rec.count(p.label()) as f64)
            .sum();
        let e = signed / n as f64;
        *slot = e;
        variance += (1.0 - e * e).max(0.0) / n as f64;
    }
    Ok(WitnessEstimate {
        value: (1.0 + correlations.iter().sum::<f64>()) / 4.0,
        std_error: variance.sqrt() / 4.0,
        correlations,
        records: records.to_vec(),
    })
}

/// Simulates `trials_per_axis` detection events for each of σxσx, σyσy,
/// σzσz behind the given profile. Axis `k` uses stream `k` of `seed`.
pub fn simulate_attack(
    rho: &TwoQubitState,
    profile: &SuppressionProfile,
    trials_per_axis: u64,
    seed: u64,
) -> Result<WitnessEstimate> {
    let eff = profile.efficiency_map();
    let records = Pauli::AXES
        .iter()
        .enumerate()
        .map(|(k, &axis)| {
            let p = joint_sign_probabilities(rho, axis).as_array();
            let probs: BTreeMap<String, f64> = SignPair::ALL
                .iter()
                .map(|&s| (s.label().to_string(), p[s as usize].max(0.0)))
                .collect();
            let axis_seed: u64 = stream_rng(seed, k as u64).random();
            sample_counts(&probs, &eff, trials_per_axis, axis_seed)
                .map(|r| r.with_setting(format!("{0}{0}", axis.symbol())))
        })
        .collect::<Result<Vec<_>>>()?;
    estimate_witness(&records)
}

/// Fraction of `trials` jittered photon pairs whose delayed arrival
/// difference falls inside the gate, with its binomial standard error.
pub fn sample_coincidence_efficiency(
    delta_t: f64,
    jitter_sigma: f64,
    window: f64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be positive".into()));
    }
    let jitter = Normal::new(0.0, jitter_sigma)
        .map_err(|e| Error::OutOfRange(format!("jitter sigma: {e}")))?;
    let mut rng = seeded_rng(seed);
    let half = window / 2.0;
    let mut hits = 0u64;
    for _ in 0..trials {
        let t1 = jitter.sample(&mut rng);
        let t2 = jitter.sample(&mut rng);
        if (t1 - t2 + delta_t).abs() <= half {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_two_qubit_state;
    use crate::states::rho_v;
    use crate::witness::witness_value_exact;
    use proptest::prelude::*;

    /// Acceptance probability by Simpson quadrature of the N(Δt, 2σ²) density
    /// over the gate; independent of the erfc path.
    fn efficiency_by_quadrature(delta_t: f64, sigma: f64, window: f64) -> f64 {
        let s = sigma * SQRT_2;
        let pdf = |x: f64| {
            (-(x - delta_t).powi(2) / (2.0 * s * s)).exp()
                / (s * (2.0 * std::f64::consts::PI).sqrt())
        };
        let n = 20_000;
        let (a, b) = (-window / 2.0, window / 2.0);
        let h = (b - a) / n as f64;
        let mut acc = pdf(a) + pdf(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(x);
        }
        acc * h / 3.0
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn efficiency_examples() {
        assert_eq!(coincidence_efficiency(0.0, 0.0, 4.0), 1.0);
        assert!(coincidence_efficiency(100.0, 1.0, 4.0) < 1e-12);
        assert!(coincidence_efficiency(2.1, 0.0, 4.0) == 0.0);
        assert!(coincidence_efficiency(-2.0, 0.0, 4.0) == 1.0);
    }

    #[test]
    fn fitted_jitter_fixture_reproduces_operating_point() {
        // root of the quadrature oracle on the small-jitter branch
        let root = bisect(|s| efficiency_by_quadrature(5.5, s, 4.0) - 0.109, 0.5, 3.0);
        assert!((root - FITTED_JITTER_SIGMA_NS).abs() < 1e-6, "{root}");
        let eff = coincidence_efficiency(5.5, FITTED_JITTER_SIGMA_NS, 4.0);
        assert!((eff - 0.109).abs() < 1e-12, "{eff}");
    }

    #[test]
    fn erfc_path_matches_quadrature() {
        for &(d, s, w) in &[
            (0.0, 1.0, 4.0),
            (3.0, 0.7, 4.0),
            (-5.5, 2.0, 4.0),
            (1.0, 3.0, 1.0),
        ] {
            let a = coincidence_efficiency(d, s, w);
            let b = efficiency_by_quadrature(d, s, w);
            assert!((a - b).abs() < 1e-10, "({d},{s},{w}): {a} vs {b}");
        }
    }

    #[test]
    fn profile_examples() {
        assert_eq!(
            suppression_profile(&DetectorModel::honest()).as_array(),
            [1.0; 4]
        );
        let p = suppression_profile(&DetectorModel::demonstrated_attack()).as_array();
        assert!((p[0] - 0.109).abs() < 1e-12 && (p[3] - 0.109).abs() < 1e-12);
        assert_eq!((p[1], p[2]), (1.0, 1.0));
        let zero_shift = DetectorModel::new(0.0, 0.0, 4.0, AttackMode::TimeShift).unwrap();
        assert_eq!(suppression_profile(&zero_shift).as_array(), [1.0; 4]);
    }

    #[test]
    fn model_validation() {
        assert!(DetectorModel::new(0.0, 1.0, 0.0, AttackMode::Honest).is_err());
        assert!(DetectorModel::new(0.0, -1.0, 4.0, AttackMode::Honest).is_err());
        assert!(DetectorModel::new(f64::NAN, 1.0, 4.0, AttackMode::Honest).is_err());
        assert!(SuppressionProfile::new([1.2, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn full_suppression_fakes_entanglement() {
        let profile = SuppressionProfile::same_sign(0.0).unwrap();
        let mut rng = seeded_rng(77);
        for _ in 0..100 {
            let rho = random_two_qubit_state(&mut rng);
            let w = attacked_witness_value(&rho, &profile).unwrap();
            assert!((w + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn honest_profile_is_transparent() {
        let mut rng = seeded_rng(78);
        for _ in 0..100 {
            let rho = random_two_qubit_state(&mut rng);
            let w = attacked_witness_value(&rho, &SuppressionProfile::honest()).unwrap();
            assert!((w - witness_value_exact(&rho)).abs() < 1e-12);
        }
    }

    #[test]
    fn operating_point_closed_form() {
        let f = SUPPRESSION_FACTOR;
        let target = rho_v(1.0).unwrap().with_bob_flipped();
        let profile = SuppressionProfile::same_sign(f).unwrap();
        let w = attacked_witness_value(&target, &profile).unwrap();
        let closed = (1.0 + 2.0 * (f - 1.0) / (f + 1.0) - 1.0) / 4.0;
        assert!((w - closed).abs() < 1e-12);
        assert!((w - -0.401_713_255_184_851).abs() < 1e-12);
    }

    #[test]
    fn no_survivors_is_an_error() {
        // |HH⟩ has only same-sign outcomes on z
        let hh = TwoQubitState::new(
            crate::qmat::ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]),
            "HH",
        )
        .unwrap();
        let profile = SuppressionProfile::same_sign(0.0).unwrap();
        assert!(matches!(
            attacked_witness_value(&hh, &profile),
            Err(Error::NoSurvivingCoincidences { axis: 'z' })
        ));
    }

    #[test]
    fn sample_counts_examples() {
        let one: BTreeMap<String, f64> = [("a".to_string(), 1.0)].into();
        let rec = sample_counts(&one, &[("a".to_string(), 1.0)].into(), 100, 1).unwrap();
        assert_eq!(rec.count("a"), 100);

        let n = 10_000;
        let half: BTreeMap<String, f64> = [("a".to_string(), 0.5), ("b".to_string(), 0.5)].into();
        let rec = sample_counts(&half, &[("a".to_string(), 0.0)].into(), n, 2).unwrap();
        assert_eq!(rec.count("a"), 0);
        let b = rec.count("b") as f64;
        let se = (n as f64 * 0.25).sqrt();
        assert!((b - n as f64 / 2.0).abs() < 4.0 * se);
        assert!(rec.recorded() <= rec.trials);
    }

    #[test]
    fn sample_counts_is_deterministic() {
        let probs: BTreeMap<String, f64> = [("x".to_string(), 0.2), ("y".to_string(), 0.3)].into();
        let eff: BTreeMap<String, f64> = [("x".to_string(), 0.5)].into();
        let a = sample_counts(&probs, &eff, 5000, 9).unwrap();
        let b = sample_counts(&probs, &eff, 5000, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_counts(&probs, &eff, 5000, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sample_counts_rejects_invalid_maps() {
        let eff = BTreeMap::new();
        let neg: BTreeMap<String, f64> = [("a".to_string(), -0.1)].into();
        assert!(sample_counts(&neg, &eff, 10, 0).is_err());
        let over: BTreeMap<String, f64> = [("a".to_string(), 0.7), ("b".to_string(), 0.4)].into();
        assert!(sample_counts(&over, &eff, 10, 0).is_err());
        let ok: BTreeMap<String, f64> = [("a".to_string(), 0.5)].into();
        assert!(sample_counts(&ok, &[("zz".to_string(), 0.5)].into(), 10, 0).is_err());
        assert!(sample_counts(&ok, &[("a".to_string(), 1.5)].into(), 10, 0).is_err());
        assert!(sample_counts(&ok, &eff, 0, 0).is_err());
    }

    #[test]
    fn singlet_z_correlation_from_counts() {
        let rho = rho_v(0.0).unwrap();
        let est = simulate_attack(&rho, &SuppressionProfile::honest(), 1_000_000, 42).unwrap();
        let ez = est.correlations[2];
        let n = est.records[2].recorded() as f64;
        let se = ((1.0 - ez * ez).max(0.0) / n).sqrt();
        // singlet z outcomes are always anti-correlated: estimate is exact
        assert!((ez + 1.0).abs() <= 3.0 * se + 1e-15);
    }

    #[test]
    fn monte_carlo_tracks_attack_oracle() {
        let profile = suppression_profile(&DetectorModel::demonstrated_attack());
        for v in [0.0, 0.5, 1.0] {
            let rho = rho_v(v).unwrap();
            let oracle = attacked_witness_value(&rho, &profile).unwrap();
            let est = simulate_attack(&rho, &profile, 1_000_000, 1234).unwrap();
            assert!(
                (est.value - oracle).abs() < 4.0 * est.std_error + 1e-12,
                "v={v}: {} vs {oracle} (se {})",
                est.value,
                est.std_error
            );
        }
    }

    #[test]
    fn coincidence_monte_carlo_matches_cdf() {
        let (p, se) =
            sample_coincidence_efficiency(5.5, FITTED_JITTER_SIGMA_NS, 4.0, 200_000, 3).unwrap();
        assert!((p - 0.109).abs() < 4.0 * se);
    }

    proptest! {
        #[test]
        fn efficiency_monotone_in_delay(d1 in 0.0f64..20.0, d2 in 0.0f64..20.0, s in 0.0f64..5.0, w in 0.1f64..10.0) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(coincidence_efficiency(hi, s, w) <= coincidence_efficiency(lo, s, w) + 1e-15);
            prop_assert!((coincidence_efficiency(-hi, s, w) - coincidence_efficiency(hi, s, w)).abs() < 1e-15);
        }

        #[test]
        fn efficiency_monotone_in_window(d in -20.0f64..20.0, s in 0.0f64..5.0, w1 in 0.1f64..10.0, w2 in 0.1f64..10.0) {
            let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            prop_assert!(coincidence_efficiency(d, s, lo) <= coincidence_efficiency(d, s, hi) + 1e-15);
        }
    }
}
