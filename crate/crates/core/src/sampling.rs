//! Seeded generators and the random ensembles used by property tests and
//! the adversarial harness.
//!
//! Every stochastic routine takes an explicit 64-bit seed. Independent
//! streams are derived from one base seed with ChaCha's 64-bit stream
//! selector, so `stream_rng(seed, k)` for different `k` never overlap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::qmat::{tensor, ComplexMatrix, C64};
use crate::states::TwoQubitState;

/// The crate-wide generator.
pub type SimRng = ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Generator for sub-stream `stream` of base seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// `dim × dim` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::new(dim, data).expect("square by construction")
}

/// Normalised `A·A†` with Gaussian `A`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let a = ginibre(rng, dim);
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    m.scale_real(1.0 / tr)
}

pub fn random_two_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    TwoQubitState::new(random_density_matrix(rng, 4), "random")
        .expect("Gaussian ensemble yields valid density matrices")
}

/// Normalised Gaussian vector.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_qubit_projector<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::outer(&random_pure_vector(rng, 2))
}

/// `|a⟩⟨a| ⊗ |b⟩⟨b|` with Gaussian-normalised `a`, `b`.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let a = random_qubit_projector(rng);
    let b = random_qubit_projector(rng);
    TwoQubitState::new(tensor(&a, &b), "product").expect("product of pure states")
}

/// Haar-like unitary from the QR of a Ginibre matrix (Gram-Schmidt on columns).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<C64> = (0..dim).map(|i| g[(i, j)]).collect();
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    let mut u = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Flat Dirichlet weights of length `k`.
pub fn dirichlet_uniform<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let gamma = Gamma::new(1.0, 1.0).expect("valid gamma parameters");
    let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|g| g / total).collect()
}

/// Convex mixture of between one and four random product states with
/// Dirichlet-uniform weights.
pub fn random_separable_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let k = rng.random_range(1..=4);
    let weights = dirichlet_uniform(rng, k);
    let mut m = ComplexMatrix::zeros(4);
    for w in weights {
        let p = random_product_state(rng);
        m = &m + &p.matrix().scale_real(w);
    }
    TwoQubitState::new(m, "separable").expect("mixture of product states")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(7, 1).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| stream_rng(7, 1).random()).collect();
        assert_eq!(a, b);
        let mut r1 = stream_rng(7, 1);
        let mut r2 = stream_rng(7, 2);
        assert_ne!(r1.random::<u64>(), r2.random::<u64>());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(3);
        for dim in [2, 4] {
            let u = random_unitary(&mut rng, dim);
            assert!((&u * &u.adjoint()).approx_eq(&ComplexMatrix::identity(dim), 1e-12));
        }
    }

    #[test]
    fn dirichlet_weights_sum_to_one() {
        let mut rng = seeded_rng(5);
        for k in 1..=4 {
            let w = dirichlet_uniform(&mut rng, k);
            assert_eq!(w.len(), k);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn separable_states_are_valid() {
        let mut rng = seeded_rng(11);
        for _ in 0..50 {
            let s = random_separable_state(&mut rng);
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
