//! Two-qubit tomography by linear inversion, the per-element `v` fit, and
//! the concurrence/tangle calculator.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::sample_counts;
use crate::qmat::{ComplexMatrix, C64};
use crate::sampling::stream_rng;
use crate::states::{pauli_pair, Pauli, TwoQubitState};
use crate::witness::joint_sign_probabilities;
use crate::{Error, Result};

/// Shots per local basis pair used by the paper-scale runs.
pub const DEFAULT_SHOTS: u64 = 250_000;

const EXPECTATION_SLACK: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-6;
/// Eigenvalues of `R` below this are round-off around a true zero.
const ROUNDOFF_FLOOR: f64 = 1e-13;

/// Estimated `⟨σ_i ⊗ σ_j⟩` for all sixteen Pauli pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyRecord {
    pub expectations: BTreeMap<(Pauli, Pauli), f64>,
    /// Zero for exact records.
    pub shots: u64,
}

impl TomographyRecord {
    pub fn get(&self, a: Pauli, b: Pauli) -> Option<f64> {
        self.expectations.get(&(a, b)).copied()
    }

    pub fn missing(&self) -> Vec<(Pauli, Pauli)> {
        let mut out = Vec::new();
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                if !self.expectations.contains_key(&(a, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// `Tr[ρ σ_i⊗σ_j]` for every pair.
pub fn exact_record(rho: &TwoQubitState) -> TomographyRecord {
    let mut expectations = BTreeMap::new();
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let e = if (a, b) == (Pauli::I, Pauli::I) {
                1.0
            } else {
                pauli_pair(a, b)
                    .trace_product(rho.matrix())
                    .expect("4x4")
                    .re
            };
            expectations.insert((a, b), e);
        }
    }
    TomographyRecord {
        expectations,
        shots: 0,
    }
}

/// Simulated tomography: each of the nine basis pairs `(σ_i, σ_j)`,
/// `i, j ∈ {x, y, z}`, gets `shots` multinomial draws over the four sign
/// outcomes. Single-qubit marginals are averaged over the three bases that
/// measure that axis. Basis `k` (row-major) draws from stream `k` of `seed`.
pub fn sample_record(rho: &TwoQubitState, shots: u64, seed: u64) -> Result<TomographyRecord> {
    let bases: Vec<(Pauli, Pauli)> = Pauli::AXES
        .iter()
        .flat_map(|&a| Pauli::AXES.map(|b| (a, b)))
        .collect();
    let frequencies = bases
        .par_iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let probs = basis_probabilities(rho, a, b);
            let sub_seed: u64 = stream_rng(seed, k as u64).random();
            let rec = sample_counts(&probs, &BTreeMap::new(), shots, sub_seed)?;
            let f = |l: &str| rec.count(l) as f64 / shots as f64;
            Ok(((a, b), [f("++"), f("+-"), f("-+"), f("--")]))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut expectations = BTreeMap::new();
    expectations.insert((Pauli::I, Pauli::I), 1.0);
    let mut alice_marginal: BTreeMap<Pauli, f64> = BTreeMap::new();
    let mut bob_marginal: BTreeMap<Pauli, f64> = BTreeMap::new();
    for ((a, b), [pp, pm, mp, mm]) in frequencies {
        expectations.insert((a, b), pp + mm - pm - mp);
        *alice_marginal.entry(a).or_default() += (pp + pm - mp - mm) / 3.0;
        *bob_marginal.entry(b).or_default() += (pp + mp - pm - mm) / 3.0;
    }
    for (a, e) in alice_marginal {
        expectations.insert((a, Pauli::I), e);
    }
    for (b, e) in bob_marginal {
        expectations.insert((Pauli::I, b), e);
    }
    Ok(TomographyRecord {
        expectations,
        shots,
    })
}

fn basis_probabilities(rho: &TwoQubitState, a: Pauli, b: Pauli) -> BTreeMap<String, f64> {
    if a == b {
        let j = joint_sign_probabilities(rho, a);
        return [("++", j.pp), ("+-", j.pm), ("-+", j.mp), ("--", j.mm)]
            .into_iter()
            .map(|(l, p)| (l.to_string(), p.max(0.0)))
            .collect();
    }
    let id = Pauli::I.matrix();
    let proj = |p: Pauli, sign: f64| (&id + &p.matrix().scale_real(sign)).scale_real(0.5);
    let mut out = BTreeMap::new();
    for (la, sa) in [('+', 1.0), ('-', -1.0)] {
        for (lb, sb) in [('+', 1.0), ('-', -1.0)] {
            let effect = crate::qmat::tensor(&proj(a, sa), &proj(b, sb));
            let p = effect.trace_product(rho.matrix()).expect("4x4").re;
            out.insert(format!("{la}{lb}"), p.max(0.0));
        }
    }
    out
}

/// `¼ Σ_ij e_ij σ_i⊗σ_j`. Positivity is flagged on the returned state,
/// not enforced.
pub fn reconstruct(record: &TomographyRecord) -> Result<TwoQubitState> {
    let missing = record.missing();
    if !missing.is_empty() {
        let names: Vec<String> = missing
            .iter()
            .map(|(a, b)| format!("{}{}", a.symbol(), b.symbol()))
            .collect();
        return Err(Error::IncompleteRecord(names.join(", ")));
    }
    if record.get(Pauli::I, Pauli::I) != Some(1.0) {
        return Err(Error::IncompleteRecord("⟨II⟩ must equal 1".into()));
    }
    let mut m = ComplexMatrix::zeros(4);
    for (&(a, b), &e) in &record.expectations {
        if !(e.abs() <= 1.0 + EXPECTATION_SLACK) {
            return Err(Error::OutOfRange(format!(
                "⟨{}{}⟩ = {e}",
                a.symbol(),
                b.symbol()
            )));
        }
        m = &m + &pauli_pair(a, b).scale_real(e / 4.0);
    }
    TwoQubitState::relaxed(m, "reconstructed")
}

/// The five per-element estimates of `v` and their statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VFit {
    /// `v_ρ11, v_ρ22, v_ρ33, v_ρ44, v_ρ23`.
    pub estimates: [f64; 5],
    pub mean: f64,
    /// Sample standard deviation (n − 1) of the estimates.
    pub spread: f64,
    /// `spread / √5`.
    pub mean_error: f64,
}

pub fn fit_v(rho: &TwoQubitState) -> VFit {
    let r = |i: usize, j: usize| rho.matrix()[(i, j)].re;
    let estimates = [
        2.0 * r(0, 0),
        1.0 - 2.0 * r(1, 1),
        1.0 - 2.0 * r(2, 2),
        2.0 * r(3, 3),
        1.0 + 2.0 * r(1, 2),
    ];
    VFit::from_estimates(estimates)
}

impl VFit {
    pub fn from_estimates(estimates: [f64; 5]) -> Self {
        let n = estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / n;
        let spread = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        Self {
            estimates,
            mean,
            spread,
            mean_error: spread / n.sqrt(),
        }
    }
}

/// `Σ`: antidiagonal `(−1, 1, 1, −1)`, i.e. `−σy⊗σy` up to sign convention.
pub fn spin_flip_matrix() -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(4);
    s[(0, 3)] = C64::new(-1.0, 0.0);
    s[(1, 2)] = C64::new(1.0, 0.0);
    s[(2, 1)] = C64::new(1.0, 0.0);
    s[(3, 0)] = C64::new(-1.0, 0.0);
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangleReport {
    /// Eigenvalues of `R = ρ Σ ρᵀ Σ`, descending.
    pub eigenvalues: [f64; 4],
    pub concurrence: f64,
    pub tangle: f64,
}

/// Concurrence and tangle from `R = ρ Σ ρᵀ Σ`.
///
/// For Hermitian `ρ`, `ρᵀ = ρ*`, so this is Wootters' spin-flip construction.
pub fn tangle(rho: &TwoQubitState) -> Result<TangleReport> {
    let spectrum = spin_flip_spectrum(rho)?;
    let mut eigenvalues = [0.0; 4];
    for (slot, z) in eigenvalues.iter_mut().zip(spectrum) {
        if z.im.abs() > SPECTRUM_TOL || z.re < -SPECTRUM_TOL {
            return Err(Error::InvalidSpectrum { re: z.re, im: z.im });
        }
        *slot = if z.re < ROUNDOFF_FLOOR { 0.0 } else { z.re };
    }
    Ok(report_from(eigenvalues))
}

/// As [`tangle`], but for estimates that may be slightly unphysical:
/// keeps the real parts and clamps negatives to zero instead of failing.
pub fn tangle_of_estimate(rho: &TwoQubitState) -> Result<TangleReport> {
    let spectrum = spin_flip_spectrum(rho)?;
    let mut eigenvalues = [0.0; 4];
    for (slot, z) in eigenvalues.iter_mut().zip(spectrum) {
        *slot = if z.re < ROUNDOFF_FLOOR { 0.0 } else { z.re };
    }
    Ok(report_from(eigenvalues))
}

fn spin_flip_spectrum(rho: &TwoQubitState) -> Result<Vec<C64>> {
    let sigma = spin_flip_matrix();
    let r = rho.matrix() * &(&sigma * &(&rho.matrix().transpose() * &sigma));
    r.eigenvalues()
}

fn report_from(mut eigenvalues: [f64; 4]) -> TangleReport {
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let [l1, l2, l3, l4] = eigenvalues.map(f64::sqrt);
    let concurrence = (l1 - l2 - l3 - l4).max(0.0);
    TangleReport {
        eigenvalues,
        concurrence,
        tangle: concurrence * concurrence,
    }
}

/// Writes the real and imaginary parts as two labelled 4×4 tables.
pub fn write_density_matrix(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for (name, part) in [("real", 0), ("imag", 1)] {
        out.push_str(name);
        out.push('\n');
        for i in 0..m.dim() {
            let row: Vec<String> = (0..m.dim())
                .map(|j| {
                    let z = m[(i, j)];
                    format!("{:.16e}", if part == 0 { z.re } else { z.im })
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

pub fn parse_density_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut parts = Vec::new();
    for name in ["real", "imag"] {
        match lines.next() {
            Some(h) if h == name => {}
            other => return Err(Error::Parse(format!("expected {name:?}, found {other:?}"))),
        }
        let mut rows = Vec::with_capacity(16);
        for _ in 0..4 {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("{name} table has fewer than 4 rows")))?;
            let row = line
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{x:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != 4 {
                return Err(Error::Parse(format!(
                    "row {line:?} has {} entries",
                    row.len()
                )));
            }
            rows.extend(row);
        }
        parts.push(rows);
    }
    let data = parts[0]
        .iter()
        .zip(&parts[1])
        .map(|(&re, &im)| C64::new(re, im))
        .collect();
    ComplexMatrix::new(4, data)
}

/// Trace distance `½ Σ|λ_i(ρ − σ)|`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = a - b;
    let herm = (&diff + &diff.adjoint()).scale_real(0.5);
    Ok(herm.eigenvalues()?.iter().map(|z| z.re.abs()).sum::<f64>() / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_two_qubit_state, random_unitary, seeded_rng};
    use crate::states::{rho_v, v_from_theta};
    use proptest::prelude::*;

    #[test]
    fn exact_inversion_on_family_and_mixed_state() {
        for v in [0.0, 0.25, 1.0] {
            let rho = rho_v(v).unwrap();
            let back = reconstruct(&exact_record(&rho)).unwrap();
            assert!(back.matrix().approx_eq(rho.matrix(), 1e-12));
        }
        let mixed = TwoQubitState::new(ComplexMatrix::identity(4).scale_real(0.25), "I/4").unwrap();
        let back = reconstruct(&exact_record(&mixed)).unwrap();
        assert!(back.matrix().approx_eq(mixed.matrix(), 1e-15));
    }

    #[test]
    fn exact_inversion_on_random_states() {
        let mut rng = seeded_rng(31);
        for _ in 0..100 {
            let rho = random_two_qubit_state(&mut rng);
            let back = reconstruct(&exact_record(&rho)).unwrap();
            assert!(back.matrix().approx_eq(rho.matrix(), 1e-12));
        }
    }

    #[test]
    fn incomplete_record_lists_missing_pairs() {
        let mut rec = exact_record(&rho_v(0.5).unwrap());
        rec.expectations.remove(&(Pauli::X, Pauli::Y));
        rec.expectations.remove(&(Pauli::Z, Pauli::I));
        match reconstruct(&rec) {
            Err(Error::IncompleteRecord(s)) => {
                assert!(s.contains("xy") && s.contains("zi"), "{s}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sampled_record_is_close_and_reproducible() {
        let rho = rho_v(0.5).unwrap();
        let a = sample_record(&rho, DEFAULT_SHOTS, 3).unwrap();
        assert_eq!(a, sample_record(&rho, DEFAULT_SHOTS, 3).unwrap());
        let back = reconstruct(&a).unwrap();
        assert!(trace_distance(back.matrix(), rho.matrix()).unwrap() < 0.02);
    }

    #[test]
    fn fit_v_exact_inputs() {
        let f = fit_v(&rho_v(0.25).unwrap());
        assert!(f.estimates.iter().all(|e| (e - 0.25).abs() < 1e-15));
        assert!(f.spread < 1e-12);
        let f1 = fit_v(&rho_v(1.0).unwrap());
        assert!(f1.estimates.iter().all(|e| (e - 1.0).abs() < 1e-15));
    }

    #[test]
    fn fit_statistics_match_published_row() {
        // per-element estimates and summary columns printed for θ = 45°
        let f = VFit::from_estimates([0.0196, 0.0228, 0.0064, 0.0258, 0.0290]);
        assert!((f.mean - 0.0207).abs() < 5e-5);
        assert!((f.spread - 0.0087).abs() < 5e-5);
        assert!((f.mean_error - 0.0039).abs() < 5e-5);
    }

    #[test]
    fn noisy_thirty_degree_fit() {
        let rho = rho_v(v_from_theta(30.0)).unwrap();
        let back = reconstruct(&sample_record(&rho, DEFAULT_SHOTS, 30).unwrap()).unwrap();
        let f = fit_v(&back);
        assert!((f.mean - 0.25).abs() < 0.01, "{f:?}");
        assert!(f.spread > 0.0);
        let avg = f.estimates.iter().sum::<f64>() / 5.0;
        assert!((f.mean - avg).abs() < 1e-12);
    }

    #[test]
    fn tangle_examples() {
        for (v, want) in [(0.0, 1.0), (0.25, 0.25), (0.75, 0.0)] {
            let t = tangle(&rho_v(v).unwrap()).unwrap();
            assert!((t.tangle - want).abs() < 1e-9, "v={v}: {t:?}");
            assert_eq!(t.tangle, t.concurrence * t.concurrence);
        }
    }

    #[test]
    fn tangle_curve_and_spectrum() {
        for k in 0..=100 {
            let v = k as f64 / 100.0;
            let t = tangle(&rho_v(v).unwrap()).unwrap();
            let want = if v < 0.5 {
                (1.0 - 2.0 * v).powi(2)
            } else {
                0.0
            };
            assert!((t.tangle - want).abs() < 1e-9, "v={v}");
            let mut spectrum = [0.0, (1.0 - v).powi(2), v * v / 4.0, v * v / 4.0];
            spectrum.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in t.eigenvalues.iter().zip(spectrum) {
                assert!((a - b).abs() < 1e-9, "v={v}: {:?}", t.eigenvalues);
            }
        }
    }

    #[test]
    fn density_matrix_text_round_trip() {
        let mut rng = seeded_rng(4);
        let rho = random_two_qubit_state(&mut rng);
        let text = write_density_matrix(rho.matrix());
        let back = parse_density_matrix(&text).unwrap();
        assert!(back.approx_eq(rho.matrix(), 1e-15));
        assert!(parse_density_matrix("real\n1,2\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn tangle_invariant_under_local_unitaries(seed in any::<u64>()) {
            let mut rng = seeded_rng(seed);
            let rho = random_two_qubit_state(&mut rng);
            let u = random_unitary(&mut rng, 2);
            let w = random_unitary(&mut rng, 2);
            let a = tangle(&rho).unwrap().tangle;
            let b = tangle(&rho.apply_local(&u, &w).unwrap()).unwrap().tangle;
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            prop_assert!((a - wootters_tangle(&rho)).abs() < 1e-9);
        }

        #[test]
        fn fit_v_spread_vanishes_on_family(v in 0.0f64..=1.0) {
            let f = fit_v(&rho_v(v).unwrap());
            prop_assert!(f.spread < 1e-12);
            prop_assert!((f.mean - v).abs() < 1e-12);
        }
    }

    /// Standard concurrence with `ρ*` in place of `ρᵀ`, via the same spectrum routine.
    fn wootters_tangle(rho: &TwoQubitState) -> f64 {
        let s = spin_flip_matrix();
        let r = rho.matrix() * &(&s * &(&rho.matrix().conj() * &s));
        let mut l: Vec<f64> = r
            .eigenvalues()
            .unwrap()
            .iter()
            .map(|z| z.re.max(0.0).sqrt())
            .collect();
        l.sort_by(|a, b| b.total_cmp(a));
        let c = (l[0] - l[1] - l[2] - l[3]).max(0.0);
        c * c
    }
}
