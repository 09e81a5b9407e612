//! Dense complex matrices sized for one- and two-qubit operators and the
//! sixteen-dimensional ancilla/system/ancilla products.
//!
//! Basis ordering is fixed: for two qubits the computational basis is
//! `|HH⟩, |HV⟩, |VH⟩, |VV⟩` with `H ↦ 0`, `V ↦ 1`, and [`tensor`] uses the
//! row-major block (Kronecker) convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Iteration cap for the shifted QR eigenvalue solver.
pub const QR_ITERATION_CAP: usize = 10_000;

/// Relative deflation threshold for subdiagonal entries.
const DEFLATION_TOL: f64 = 1e-13;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A square matrix of complex entries stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

/// Which factor of a bipartite space to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange(
                "matrix dimension must be positive".into(),
            ));
        }
        if data.len() != dim * dim {
            return Err(Error::BadEntryCount {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![ONE; dim])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let diag: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&diag)
    }

    /// `|ψ⟩⟨ψ|` for a column vector `ψ`.
    pub fn outer(psi: &[C64]) -> Self {
        let dim = psi.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in psi {
            for b in psi {
                data.push(a * b.conj());
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        self.map_indexed(|m, i, j| m[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        self.map_indexed(|m, i, j| m[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(v.len())?;
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        Ok(acc)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    /// Lower-triangular `L` with `self = L L†` for a Hermitian positive
    /// definite matrix.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.dim;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[(j, j)] = C64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix by forward substitution.
    pub fn lower_triangular_inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut inv = Self::zeros(n);
        for col in 0..n {
            for i in col..n {
                let mut s = if i == col { ONE } else { ZERO };
                for k in col..i {
                    s -= self[(i, k)] * inv[(k, col)];
                }
                let d = self[(i, i)];
                if d == ZERO {
                    return Err(Error::NotPositiveDefinite);
                }
                inv[(i, col)] = s / d;
            }
        }
        Ok(inv)
    }

    /// All eigenvalues (with multiplicity), sorted by real part descending.
    ///
    /// Reduces to upper Hessenberg form with Householder reflections and then
    /// runs Wilkinson-shifted complex QR sweeps with deflation. Works for
    /// non-Hermitian input.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        let mut h = self.clone();
        h.reduce_to_hessenberg();
        let mut eig = h.hessenberg_qr()?;
        eig.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        Ok(eig)
    }

    fn reduce_to_hessenberg(&mut self) {
        let n = self.dim;
        if n < 3 {
            return;
        }
        for k in 0..n - 2 {
            let x: Vec<C64> = ((k + 1)..n).map(|i| self[(i, k)]).collect();
            let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
            if tail == 0.0 {
                continue;
            }
            let norm = (x[0].norm_sqr() + tail).sqrt();
            let phase = if x[0] == ZERO {
                ONE
            } else {
                x[0] / x[0].norm()
            };
            let alpha = -phase * norm;
            let mut v = x;
            v[0] -= alpha;
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= vnorm;
            }
            // A <- (I - 2vv†) A on rows k+1..n
            for j in 0..n {
                let s: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(r, vr)| vr.conj() * self[(k + 1 + r, j)])
                    .sum();
                for (r, vr) in v.iter().enumerate() {
                    self[(k + 1 + r, j)] -= 2.0 * vr * s;
                }
            }
            // A <- A (I - 2vv†) on columns k+1..n
            for i in 0..n {
                let s: C64 = v
                    .iter()
                    .enumerate()
                    .map(|(c, vc)| self[(i, k + 1 + c)] * vc)
                    .sum();
                for (c, vc) in v.iter().enumerate() {
                    self[(i, k + 1 + c)] -= 2.0 * s * vc.conj();
                }
            }
            for i in (k + 2)..n {
                self[(i, k)] = ZERO;
            }
        }
    }

    fn hessenberg_qr(mut self) -> Result<Vec<C64>> {
        let n = self.dim;
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        let mut hi = n - 1;
        let mut iterations = 0usize;
        let mut since_deflation = 0usize;

        while hi > 0 {
            let mut lo = hi;
            while lo > 0 {
                let mut s = self[(lo - 1, lo - 1)].norm() + self[(lo, lo)].norm();
                if s == 0.0 {
                    s = scale;
                }
                if self[(lo, lo - 1)].norm() < DEFLATION_TOL * s {
                    self[(lo, lo - 1)] = ZERO;
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                hi -= 1;
                since_deflation = 0;
                continue;
            }

            iterations += 1;
            since_deflation += 1;
            if iterations > QR_ITERATION_CAP {
                let residual = (1..=hi)
                    .map(|i| self[(i, i - 1)].norm())
                    .fold(0.0, f64::max);
                return Err(Error::NoConvergence {
                    iterations: QR_ITERATION_CAP,
                    residual,
                });
            }

            let shift = if since_deflation % 11 == 10 {
                // exceptional shift to break cycles
                self[(hi, hi)] + C64::new(self[(hi, hi - 1)].norm(), 0.0)
            } else {
                self.wilkinson_shift(hi)
            };
            self.qr_sweep(lo, hi, shift);
        }
        Ok((0..n).map(|i| self[(i, i)]).collect())
    }

    fn wilkinson_shift(&self, hi: usize) -> C64 {
        let a = self[(hi - 1, hi - 1)];
        let b = self[(hi - 1, hi)];
        let c = self[(hi, hi - 1)];
        let d = self[(hi, hi)];
        let half = (a - d) * 0.5;
        let disc = (half * half + b * c).sqrt();
        let mid = (a + d) * 0.5;
        let (m1, m2) = (mid + disc, mid - disc);
        if (m1 - d).norm() <= (m2 - d).norm() {
            m1
        } else {
            m2
        }
    }

    /// One explicit shifted QR step `H - μI = QR`, `H ← RQ + μI` on the
    /// active window `lo..=hi` using Givens rotations.
    fn qr_sweep(&mut self, lo: usize, hi: usize, shift: C64) {
        for k in lo..=hi {
            self[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(self[(k, k)], self[(k + 1, k)]);
            for j in k..=hi {
                let x = self[(k, j)];
                let y = self[(k + 1, j)];
                self[(k, j)] = c * x + s * y;
                self[(k + 1, j)] = -s.conj() * x + c * y;
            }
            self[(k + 1, k)] = ZERO;
            rotations.push((c, s));
        }
        for (offset, (c, s)) in rotations.into_iter().enumerate() {
            let k = lo + offset;
            for i in lo..=(k + 1).min(hi) {
                let x = self[(i, k)];
                let y = self[(i, k + 1)];
                self[(i, k)] = c * x + s.conj() * y;
                self[(i, k + 1)] = -s * x + c * y;
            }
        }
        for k in lo..=hi {
            self[(k, k)] += shift;
        }
    }

    fn map_indexed(&self, f: impl Fn(&Self, usize, usize) -> C64) -> Self {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(self, i, j));
            }
        }
        Self { dim: n, data }
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other,
            })
        }
    }
}

/// Complex Givens rotation `[c s; -s̄ c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let r = (an * an + b.norm_sqr()).sqrt();
    if r == 0.0 {
        (1.0, ZERO)
    } else if an == 0.0 {
        (0.0, ONE)
    } else {
        (an / r, (a / an) * b.conj() / r)
    }
}

/// Kronecker product: entry `(i·dB + k, j·dB + l)` is `a[i,j]·b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.data[(i * db + k) * n + j * db + l] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Tensor product of several factors, left to right.
pub fn tensor_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, f| tensor(&acc, f))
}

/// Reduced operator after tracing out `traced` from `m` on a `dims.0 × dims.1` space.
pub fn partial_trace(
    m: &ComplexMatrix,
    traced: Subsystem,
    dims: (usize, usize),
) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if da * db != m.dim {
        return Err(Error::DimensionMismatch {
            expected: m.dim,
            found: da * db,
        });
    }
    let idx = |i: usize, k: usize| i * db + k;
    let out = match traced {
        Subsystem::B => {
            let mut r = ComplexMatrix::zeros(da);
            for i in 0..da {
                for j in 0..da {
                    r[(i, j)] = (0..db).map(|k| m[(idx(i, k), idx(j, k))]).sum();
                }
            }
            r
        }
        Subsystem::A => {
            let mut r = ComplexMatrix::zeros(db);
            for k in 0..db {
                for l in 0..db {
                    r[(k, l)] = (0..da).map(|i| m[(idx(i, k), idx(i, l))]).sum();
                }
            }
            r
        }
    };
    Ok(out)
}

/// Eigenvalues of a 4×4 matrix sorted by real part descending.
pub fn eigenvalues_4x4(m: &ComplexMatrix) -> Result<[C64; 4]> {
    m.check_dim(4)?;
    let e = m.eigenvalues()?;
    Ok([e[0], e[1], e[2], e[3]])
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix addition");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.dim, rhs.dim,
            "dimension mismatch in matrix subtraction"
        );
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
            .expect("dimension mismatch in matrix product")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
