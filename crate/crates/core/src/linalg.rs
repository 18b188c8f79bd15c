//! Dense complex linear algebra for the 2×2, 4×4 and 16×16 problems that
//! appear in two-qubit open-system calculations.
//!
//! Storage is row-major `Vec<Complex64>`. Decompositions (Hermitian
//! eigenproblems, SVD) are delegated to `nalgebra`; everything structural
//! (Kronecker products, partial traces, Pauli algebra) lives here.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used for Hermiticity checks (max-abs-entry metric).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative singular-value threshold below which a direction counts as kernel.
pub const RANK_TOL: f64 = 1e-8;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// A dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Build from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{rows}x{cols} entries"),
                got: format!("{}", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<const N: usize>(rows: &[[Complex64; N]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self {
            rows: rows.len(),
            cols: N,
            data,
        }
    }

    pub fn from_real_rows<const N: usize>(rows: &[[f64; N]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| re(x))).collect();
        Self {
            rows: rows.len(),
            cols: N,
            data,
        }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        Self::diag(&entries.iter().map(|&x| re(x)).collect::<Vec<_>>())
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    /// `|i⟩⟨j|` in dimension `n`.
    pub fn ket_bra(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Complex64> {
        (i < self.rows && j < self.cols).then(|| self.data[i * self.cols + j])
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced ∞-norm (max absolute row sum); an upper bound on the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest |M - M†| entry; `None` for non-square input.
    pub fn hermitian_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Some(dev)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation().is_some_and(|d| d <= tol)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Column-stacking vectorization: `vec(M)[j·rows + i] = M[i, j]`.
    pub fn vectorize(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`ComplexMatrix::vectorize`] for an `n × n` matrix.
    pub fn devectorize(v: &[Complex64], n: usize) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: format!("vector of length {}", n * n),
                got: format!("{}", v.len()),
            });
        }
        let mut m = Self::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                m[(i, j)] = v[j * n + i];
            }
        }
        Ok(m)
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// A square matrix that passed a Hermiticity check.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` if `‖M − M†‖_max ≤ tol`, and symmetrizes it exactly.
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        match m.hermitian_deviation() {
            None => Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                got: format!("{}x{}", m.rows(), m.cols()),
            }),
            Some(d) if d > tol => Err(Error::NotHermitian { deviation: d }),
            Some(_) => {
                let sym = (&m + &m.adjoint()).scale_real(0.5);
                Ok(Self(sym))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }
}

impl TryFrom<ComplexMatrix> for HermitianMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m, HERMITIAN_TOL)
    }
}

/// Kronecker product with standard block ordering:
/// `kron(A, B)[i·p + k, j·q + l] = A[i, j]·B[k, l]` for `B` of shape `p × q`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.rows(), a.cols());
    let (p, q) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(m * p, n * q);
    for i in 0..m {
        for j in 0..n {
            let aij = a[(i, j)];
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

fn check_two_qubit(rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: "4x4".into(),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(())
}

/// Trace over the first qubit of a 4×4 operator; returns the 2×2 operator on B.
///
/// Accepts non-Hermitian input, e.g. `(A ⊗ 1)·ρ`.
pub fn partial_trace_a(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_two_qubit(rho)?;
    let mut out = ComplexMatrix::zeros(2, 2);
    for k in 0..2 {
        for l in 0..2 {
            out[(k, l)] = rho[(k, l)] + rho[(2 + k, 2 + l)];
        }
    }
    Ok(out)
}

/// Trace over the second qubit of a 4×4 operator.
pub fn partial_trace_b(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_two_qubit(rho)?;
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)];
        }
    }
    Ok(out)
}

/// Partial transpose on the second qubit.
pub fn partial_transpose_b(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_two_qubit(rho)?;
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + l, 2 * j + k)] = rho[(2 * i + k, 2 * j + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let h = HermitianMatrix::new(m.clone(), HERMITIAN_TOL)?;
    let n = h.dim();
    let eig = h.matrix().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    Ok(HermitianEigen { values, vectors })
}

/// Real eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Singular values in descending order together with the right singular vectors.
fn svd_sorted(m: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let svd = m.to_nalgebra().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let n = svd.singular_values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&k| svd.singular_values[k]).collect();
    // rows of V† are conjugated right singular vectors
    let vectors = order
        .iter()
        .map(|&k| v_t.row(k).iter().map(|z| z.conj()).collect())
        .collect();
    (values, vectors)
}

/// Number of singular values below `RANK_TOL · σ_max`.
pub fn kernel_dimension(m: &ComplexMatrix) -> usize {
    let (s, _) = svd_sorted(m);
    let cutoff = RANK_TOL * s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x < cutoff).count() + m.cols().saturating_sub(s.len())
}

/// Unit-norm vector spanning (part of) the numerical kernel of a square matrix.
///
/// Returns [`Error::NoKernel`] when the smallest singular value exceeds
/// `RANK_TOL` times the largest.
pub fn kernel_vector(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let (s, v) = svd_sorted(m);
    let smax = s[0];
    let smin = *s.last().unwrap();
    if smax == 0.0 {
        let mut e = vec![ZERO; m.cols()];
        e[0] = ONE;
        return Ok(e);
    }
    if smin >= RANK_TOL * smax {
        return Err(Error::NoKernel);
    }
    Ok(v.last().unwrap().clone())
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// The Pauli matrices `(σx, σy, σz)` with `σy = ((0, −i), (i, 0))`.
pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
    ]
}

/// Qubit unitary `exp(i μ n·σ)` with `n = (sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn qubit_rotation(mu: f64, theta: f64, phi: f64) -> ComplexMatrix {
    let n = [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ];
    let [sx, sy, sz] = pauli();
    let n_sigma = &(&sx.scale_real(n[0]) + &sy.scale_real(n[1])) + &sz.scale_real(n[2]);
    &ComplexMatrix::identity(2).scale_real(mu.cos()) + &n_sigma.scale(I * mu.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, r: usize, c: usize) -> ComplexMatrix {
        let data = (0..r * c)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::from_vec(r, c, data).unwrap()
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n, n);
        (&a + &a.adjoint()).scale_real(0.5)
    }

    fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        // Gram-Schmidt on the columns of a random matrix
        let a = random_matrix(rng, n, n);
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for j in 0..n {
            let mut v: Vec<Complex64> = (0..n).map(|i| a[(i, j)]).collect();
            for u in &cols {
                let proj: Complex64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
            let nrm = vector_norm(&v);
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
        let mut u = ComplexMatrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                u[(i, j)] = z;
            }
        }
        u
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert!(kron(&i2, &i2).approx_eq(&ComplexMatrix::identity(4), 0.0));
        let [_, _, sz] = pauli();
        let expected = ComplexMatrix::diag_real(&[1.0, 1.0, -1.0, -1.0]);
        assert!(kron(&sz, &i2).approx_eq(&expected, 0.0));
    }

    #[test]
    fn kron_realizes_jump_operator() {
        // |1⟩⟨0| ⊗ 1 maps |00⟩ to |10⟩
        let j_a = kron(
            &ComplexMatrix::ket_bra(2, 1, 0),
            &ComplexMatrix::identity(2),
        );
        let out = j_a.matvec(&[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(out, vec![ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn partial_trace_examples() {
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(partial_trace_a(&mixed)
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-15));

        let ket01 = ComplexMatrix::ket_bra(4, 1, 1);
        assert!(partial_trace_a(&ket01)
            .unwrap()
            .approx_eq(&ComplexMatrix::ket_bra(2, 1, 1), 1e-15));

        let s = 1.0 / 2f64.sqrt();
        let singlet = [ZERO, re(s), re(-s), ZERO];
        let rho = ComplexMatrix::outer(&singlet, &singlet);
        assert!(partial_trace_a(&rho)
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-15));

        assert!(matches!(
            partial_trace_a(&ComplexMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eigenvalue_examples() {
        let d = ComplexMatrix::diag_real(&[3.0, 1.0, 2.0]);
        let ev = hermitian_eigenvalues(&d).unwrap();
        for (a, b) in ev.iter().zip([3.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }

        // Tᵀ·T for the X-form correlation matrix
        let (alpha, delta) = (0.1, 0.3);
        let t = ComplexMatrix::diag_real(&[-2.0 * alpha, -2.0 * alpha, 1.0 - 2.0 * delta]);
        let ev = hermitian_eigenvalues(&(&t.transpose() * &t)).unwrap();
        for (a, b) in ev.iter().zip([0.16, 0.04, 0.04]) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }

        let not_herm = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(
            hermitian_eigenvalues(&not_herm),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigenvalues_of_2x2_match_characteristic_polynomial() {
        // λ = (a + d)/2 ± sqrt(((a − d)/2)² + |b|²)
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let m = random_hermitian(&mut rng, 2);
            let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
            let mean = 0.5 * (a + d);
            let rad = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
            let ev = hermitian_eigenvalues(&m).unwrap();
            assert!((ev[0] - (mean + rad)).abs() < 1e-12);
            assert!((ev[1] - (mean - rad)).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalue_sum_equals_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_hermitian(&mut rng, 4);
            let sum: f64 = hermitian_eigenvalues(&m).unwrap().iter().sum();
            assert!((sum - m.trace().re).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvalues_are_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let m = random_hermitian(&mut rng, 4);
            let u = random_unitary(&mut rng, 4);
            let rotated = &(&u * &m) * &u.adjoint();
            let a = hermitian_eigenvalues(&m).unwrap();
            let b = hermitian_eigenvalues(&rotated).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let m = ComplexMatrix::diag_real(&[1.0, 1.0, 0.0]);
        let v = kernel_vector(&m).unwrap();
        assert!((v[2].norm() - 1.0).abs() < 1e-12);
        assert!(v[0].norm() < 1e-12 && v[1].norm() < 1e-12);

        assert_eq!(
            kernel_vector(&ComplexMatrix::identity(3)),
            Err(Error::NoKernel)
        );
    }

    #[test]
    fn kernel_vector_annihilates_rank_deficient_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 6, 5);
            let b = random_matrix(&mut rng, 5, 6);
            let m = &a * &b; // rank ≤ 5
            let v = kernel_vector(&m).unwrap();
            assert!((vector_norm(&v) - 1.0).abs() < 1e-12);
            let mv = m.matvec(&v);
            assert!(vector_norm(&mv) <= 1e-8 * m.frobenius_norm());
            assert_eq!(kernel_dimension(&m), 1);
        }
    }

    #[test]
    fn vectorization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 4, 4);
        let v = m.vectorize();
        assert_eq!(v[1], m[(1, 0)]);
        assert_eq!(ComplexMatrix::devectorize(&v, 4).unwrap(), m);
    }

    #[test]
    fn qubit_rotation_is_unitary() {
        let u = qubit_rotation(0.7, 1.1, 2.3);
        assert!((&u * &u.adjoint()).approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn partial_transpose_of_product_is_product_of_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_matrix(&mut rng, 2, 2);
        let b = random_matrix(&mut rng, 2, 2);
        let pt = partial_transpose_b(&kron(&a, &b)).unwrap();
        assert!(pt.approx_eq(&kron(&a, &b.transpose()), 1e-14));
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            ComplexMatrix::from_vec(
                n,
                n,
                v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn kron_is_associative(a in small_matrix(2), b in small_matrix(2), c in small_matrix(2)) {
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            prop_assert!(left.approx_eq(&right, 1e-12));
        }

        #[test]
        fn partial_trace_of_product(a in small_matrix(2), b in small_matrix(2)) {
            let pt = partial_trace_a(&kron(&a, &b)).unwrap();
            prop_assert!(pt.approx_eq(&b.scale(a.trace()), 1e-12));
            let pb = partial_trace_b(&kron(&a, &b)).unwrap();
            prop_assert!(pb.approx_eq(&a.scale(b.trace()), 1e-12));
        }
    }
}
