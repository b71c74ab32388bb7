//! Dense complex linear algebra for the small matrices of the receiver
//! (dimensions up to a handful of LNBs and satellites).
//!
//! All tolerances are relative to the Frobenius norm of the input.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // float methods are inherent when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Eigenvalues at or below this fraction of the largest one count as zero
/// when pseudo-inverting.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Relative tolerance used when checking that an input is Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Negative eigenvalues down to `-PSD_TOLERANCE * lambda_max` are treated as
/// round-off of a zero eigenvalue.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Largest condition estimate accepted by [`solve`].
pub const MAX_CONDITION: f64 = 1e12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: "rows * cols entries",
                got: (data.len(), rows * cols),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension {
                expected: "columns of equal length",
                got: (rows, cols),
            });
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in columns {
                data.push(c[r]);
            }
        }
        Self::from_row_major(rows, cols, data)
    }

    /// Rank-one outer product `u vᴴ`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[Complex64]) {
        assert_eq!(values.len(), self.rows);
        for (r, &v) in values.iter().enumerate() {
            self[(r, c)] = v;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Squared Euclidean norm of column `c`.
    pub fn column_norm_sqr(&self, c: usize) -> f64 {
        (0..self.rows).map(|r| self[(r, c)].norm_sqr()).sum()
    }

    /// Largest `|m[i][j] - conj(m[j][i])|`, for square matrices.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_defect() <= rel_tol * self.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `selfᴴ · v` without forming the adjoint.
    pub fn adjoint_mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.rows, "vector length must match row count");
        let mut out = vec![ZERO; self.cols];
        for (r, &vr) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * vr;
            }
        }
        out
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn require_hermitian(&self) -> Result<()> {
        self.require_square()?;
        let defect = self.hermitian_defect();
        if defect > HERMITIAN_TOLERANCE * self.frobenius_norm() {
            return Err(Error::NotHermitian { asymmetry: defect });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape());
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape());
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermEig {
    /// Eigenvalues, largest first.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermEig {
    /// `U · diag(λ) · Uᴴ`.
    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|l| l)
    }

    /// `U · diag(f(λ)) · Uᴴ`.
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        let scaled: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .filter(|&k| scaled[k] != 0.0)
                .map(|k| u[(r, k)] * u[(c, k)].conj() * scaled[k])
                .sum()
        })
    }

    /// Number of eigenvalues above `RANK_TOLERANCE * lambda_max`.
    pub fn rank(&self) -> usize {
        let cutoff = rank_cutoff(&self.values);
        self.values.iter().filter(|&&l| l > cutoff).count()
    }
}

fn rank_cutoff(values: &[f64]) -> f64 {
    RANK_TOLERANCE * values.first().copied().unwrap_or(0.0).max(0.0)
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    m.require_hermitian()?;
    let n = m.rows();
    // Symmetrise so that round-off asymmetry does not leak into the result.
    let mut a = CMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _sweep in 0..64 {
            let off: f64 = (0..n)
                .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
                .map(|(r, c)| a[(r, c)].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.select_columns(&order);
    Ok(HermEig { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q).
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Square root of the Moore-Penrose pseudo-inverse of a Hermitian PSD matrix.
///
/// Returns `S` with `S · S = m†`. Eigenvalues at or below
/// [`RANK_TOLERANCE`] times the largest eigenvalue are treated as zero.
pub fn pinv_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(m)?;
    pinv_sqrt_from_eig(&eig)
}

/// [`pinv_sqrt`] for an already decomposed matrix.
pub fn pinv_sqrt_from_eig(eig: &HermEig) -> Result<CMatrix> {
    check_psd(eig)?;
    let cutoff = rank_cutoff(&eig.values);
    Ok(eig.reconstruct_with(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 }))
}

pub(crate) fn check_psd(eig: &HermEig) -> Result<()> {
    let lmax = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    match eig.values.last() {
        Some(&lmin) if lmin < -PSD_TOLERANCE * lmax || (lmax == 0.0 && lmin < 0.0) => {
            Err(Error::NotPsd { eigenvalue: lmin })
        }
        _ => Ok(()),
    }
}

/// Lower-triangular Cholesky factor `C` with `C · Cᴴ = m`.
pub fn chol(m: &CMatrix) -> Result<CMatrix> {
    m.require_hermitian()?;
    let n = m.rows();
    let scale = m.max_abs();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= f64::EPSILON * scale * n as f64 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `m · x = b` by LU factorisation with partial pivoting.
///
/// Fails when the 1-norm condition estimate exceeds [`MAX_CONDITION`].
pub fn solve(m: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    m.require_square()?;
    if b.rows() != m.rows() {
        return Err(Error::Dimension {
            expected: "right-hand side with as many rows as the system",
            got: b.shape(),
        });
    }
    let lu = Lu::factor(m)?;
    let inv = lu.solve(&CMatrix::identity(m.rows()));
    let condition = m.one_norm() * inv.one_norm();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    Ok(lu.solve(b))
}

struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(m: &CMatrix) -> Result<Self> {
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
                .unwrap_or(k);
            if lu[(pivot, k)].norm() == 0.0 {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            if pivot != k {
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(pivot, c)];
                    lu[(pivot, c)] = tmp;
                }
                perm.swap(k, pivot);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for c in k + 1..n {
                    let u = lu[(k, c)];
                    lu[(i, c)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.rows();
        let mut x = CMatrix::from_fn(n, b.cols(), |r, c| b[(self.perm[r], c)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        x
    }
}

/// Squared Euclidean norm of a complex vector.
#[inline]
pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

/// Inner product `aᴴ b`.
#[inline]
pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        let x = random_matrix(rng, n, n);
        CMatrix::from_fn(n, n, |r, col| (x[(r, col)] + x[(col, r)].conj()) * 0.5)
    }

    fn random_pd(rng: &mut impl Rng, n: usize) -> CMatrix {
        let x = random_matrix(rng, n, n);
        &(&x * &x.adjoint()) + &CMatrix::identity(n).scale(0.5)
    }

    fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert_eq!(CMatrix::from_real(0, 2, &[]), Err(Error::EmptyMatrix));
        assert_eq!(
            CMatrix::from_real(1, 2, &[1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        );
    }

    #[test]
    fn eig_identity() {
        let e = herm_eig(&CMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let gram = &e.vectors.adjoint() * &e.vectors;
        assert!(rel_err(&gram, &CMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn eig_diagonal_is_permutation() {
        let e = herm_eig(&CMatrix::from_diag(&[1.0, 4.0, 0.0])).unwrap();
        assert_eq!(e.values, vec![4.0, 1.0, 0.0]);
        assert_eq!(e.vectors[(1, 0)], c(1.0, 0.0));
        assert_eq!(e.vectors[(0, 1)], c(1.0, 0.0));
        assert_eq!(e.vectors[(2, 2)], c(1.0, 0.0));
    }

    #[test]
    fn eig_trace_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(&mut rng, 3);
        let e = herm_eig(&m).unwrap();
        let sum: f64 = e.values.iter().sum();
        assert!((sum - m.trace().re).abs() <= 1e-10 * m.frobenius_norm());
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(herm_eig(&rect), Err(Error::NotSquare { .. })));
        let skew = CMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(herm_eig(&skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_residual_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            let m = random_hermitian(&mut rng, n);
            let e = herm_eig(&m).unwrap();
            let norm = m.frobenius_norm();
            for (k, &l) in e.values.iter().enumerate() {
                let u = e.vectors.column(k);
                let mu = m.mul_vec(&u);
                let res: f64 = mu.iter().zip(&u).map(|(a, b)| (a - b * l).norm_sqr()).sum();
                assert!(res.sqrt() <= 1e-10 * norm);
            }
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!((&gram - &CMatrix::identity(n)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn eig_thousand_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        for i in 0..1000 {
            let n = 2 + i % 5;
            let m = random_hermitian(&mut rng, n);
            let e = herm_eig(&m).unwrap();
            assert!(rel_err(&e.reconstruct(), &m) < 1e-9);
            let sum: f64 = e.values.iter().sum();
            assert!((sum - m.trace().re).abs() <= 1e-10 * m.frobenius_norm());
        }
    }

    #[test]
    fn pinv_sqrt_diagonal_and_identity() {
        let s = pinv_sqrt(&CMatrix::from_diag(&[4.0, 0.0])).unwrap();
        assert!(rel_err(&s, &CMatrix::from_diag(&[0.5, 0.0])) < 1e-15);
        let s = pinv_sqrt(&CMatrix::identity(4)).unwrap();
        assert!(rel_err(&s, &CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn pinv_sqrt_rank_one_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut v: Vec<Complex64> = (0..4)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let n = norm_sqr(&v).sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        let p = CMatrix::outer(&v, &v);
        let s = pinv_sqrt(&p).unwrap();
        assert!(rel_err(&s, &p) < 1e-10);
    }

    #[test]
    fn pinv_sqrt_rejects_indefinite() {
        let m = CMatrix::from_diag(&[1.0, -0.5]);
        assert!(matches!(pinv_sqrt(&m), Err(Error::NotPsd { .. })));
        // Round-off sized negative eigenvalue is accepted.
        assert!(pinv_sqrt(&CMatrix::from_diag(&[1.0, -1e-14])).is_ok());
    }

    #[test]
    fn chol_examples() {
        assert_eq!(chol(&CMatrix::identity(3)).unwrap(), CMatrix::identity(3));
        let l = chol(&CMatrix::from_diag(&[4.0, 9.0])).unwrap();
        assert_eq!(l, CMatrix::from_diag(&[2.0, 3.0]));
        let k = CMatrix::from_real(3, 3, &[1.0, 0.1, 0.05, 0.1, 1.0, 0.1, 0.05, 0.1, 1.0]).unwrap();
        let l = chol(&k).unwrap();
        assert!(rel_err(&(&l * &l.adjoint()), &k) < 1e-12);
        for r in 0..3 {
            for col in r + 1..3 {
                assert_eq!(l[(r, col)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn chol_rejects_non_pd() {
        let m = CMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(chol(&m), Err(Error::NotPositiveDefinite { pivot: 1, .. })));
    }

    #[test]
    fn solve_examples() {
        let b = CMatrix::from_real(2, 1, &[3.0, -1.0]).unwrap();
        assert_eq!(solve(&CMatrix::identity(2), &b).unwrap(), b);
        let x = solve(
            &CMatrix::from_diag(&[2.0, 4.0]),
            &CMatrix::from_real(2, 1, &[2.0, 4.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(x, CMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_pd(&mut rng, 3);
        let b = random_matrix(&mut rng, 3, 2);
        let x = solve(&m, &b).unwrap();
        assert!((&(&m * &x) - &b).frobenius_norm() / b.frobenius_norm() < 1e-9);
    }

    #[test]
    fn solve_rejects_singular() {
        let m = CMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        let b = CMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        assert!(matches!(solve(&m, &b), Err(Error::Singular { .. })));
        let nearly = CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0 + 1e-14]).unwrap();
        assert!(matches!(solve(&nearly, &b), Err(Error::Singular { .. })));
    }

    fn psd_strategy() -> impl Strategy<Value = CMatrix> {
        (2usize..=6, 1usize..=6, any::<u64>()).prop_map(|(n, rank, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_matrix(&mut rng, n, rank.min(n));
            &x * &x.adjoint()
        })
    }

    proptest! {
        #[test]
        fn pinv_sqrt_is_moore_penrose(m in psd_strategy()) {
            let s = pinv_sqrt(&m).unwrap();
            let pinv = &s * &s;
            let back = &(&m * &pinv) * &m;
            prop_assert!(rel_err(&back, &m) < 1e-9);
            let again = &(&pinv * &m) * &pinv;
            prop_assert!(rel_err(&again, &pinv) < 1e-9);
        }

        #[test]
        fn chol_reconstructs(seed in any::<u64>(), n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_pd(&mut rng, n);
            let l = chol(&m).unwrap();
            prop_assert!(rel_err(&(&l * &l.adjoint()), &m) < 1e-10);
        }
    }
}
