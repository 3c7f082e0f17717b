//! Dense complex matrices, Hermitian eigendecomposition and the matrix
//! exponential.
//!
//! The dimensions involved are tiny (spin operators are at most 13×13 and
//! 4-qubit operators 16×16) so everything is a plain row-major `Vec`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest dimension accepted by [`matrix_exponential`].
pub const MAX_EXP_DIM: usize = 128;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows).map(|i| inner_plain(self.row(i), v)).collect()
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (self - &self.adjoint()).max_abs() <= tol
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_error(&self) -> f64 {
        (&self.adjoint().matmul(self) - &Self::identity(self.cols)).frobenius_norm()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }
}

#[inline]
fn inner_plain(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
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
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Eigen-decomposition `A = V diag(λ) V†` of a Hermitian matrix, eigenvalues
/// ascending, eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let d: Vec<C64> = self.values.iter().map(|&x| re(x)).collect();
        self.vectors
            .matmul(&CMatrix::from_diagonal(&d))
            .matmul(&self.vectors.adjoint())
    }
}

/// Cyclic complex Jacobi eigensolver. The input is symmetrized as
/// `(A + A†)/2` first, so only Hermitian inputs give meaningful results.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut m = (a + &a.adjoint()).scale(re(0.5));
    for i in 0..n {
        m[(i, i)] = re(m[(i, i)].re);
    }
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok(HermitianEigen {
            values: vec![0.0; n],
            vectors: v,
        });
    }

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                // Phase rotation makes the (p,q) entry real, then a real
                // Jacobi rotation annihilates it.
                let phase = apq / b; // e^{iφ}
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * b);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q).
                let g_pp = re(cs);
                let g_pq = re(sn);
                let g_qp = -phase.conj() * sn;
                let g_qq = phase.conj() * cs;
                // A <- A G
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * g_pp + akq * g_qp;
                    m[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A <- G† A
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    m[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                m[(p, q)] = C64::zero();
                m[(q, p)] = C64::zero();
                m[(p, p)] = re(m[(p, p)].re);
                m[(q, q)] = re(m[(q, q)].re);
                // V <- V G
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// `exp(−i t H)` for Hermitian `H`, through its eigendecomposition.
pub fn exp_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(h)?;
    let phases: Vec<C64> = eig
        .values
        .iter()
        .map(|&l| C64::from_polar(1.0, -t * l))
        .collect();
    Ok(eig
        .vectors
        .matmul(&CMatrix::from_diagonal(&phases))
        .matmul(&eig.vectors.adjoint()))
}

/// `exp(A)` for a square complex matrix.
///
/// Skew-Hermitian inputs go through the Hermitian eigensolver (`A = −iH`),
/// which keeps the result unitary to machine precision. Anything else uses
/// Taylor scaling-and-squaring.
pub fn matrix_exponential(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n > MAX_EXP_DIM {
        return Err(Error::TooLarge(n));
    }
    let size = a.max_abs().max(1.0);
    if (a + &a.adjoint()).max_abs() <= 1e-14 * size {
        // A = −iH with H = iA Hermitian.
        let h = a.scale(I);
        return exp_hermitian(&h, 1.0);
    }
    Ok(exp_taylor_scaled(a))
}

fn exp_taylor_scaled(a: &CMatrix) -> CMatrix {
    let n = a.rows;
    let norm = a.norm_one();
    let mut squarings = 0u32;
    let mut s = 1.0;
    while norm / s > 0.5 {
        s *= 2.0;
        squarings += 1;
    }
    let scaled = a.scale(re(1.0 / s));
    let mut result = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=40 {
        term = term.matmul(&scaled).scale(re(1.0 / k as f64));
        result = &result + &term;
        if term.max_abs() <= 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// Solve the 3×3 real system `M x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` for a (numerically) singular matrix.
pub fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[0.0; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..4 {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// Real 3×3 helpers used by the metrology module.
pub mod real3 {
    pub type Mat3 = [[f64; 3]; 3];
    pub type Vec3 = [f64; 3];

    pub fn dot(a: Vec3, b: Vec3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn norm(a: Vec3) -> f64 {
        num_traits::Float::sqrt(dot(a, a))
    }

    pub fn scale(a: Vec3, s: f64) -> Vec3 {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    pub fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }

    pub fn transpose(a: &Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = a[j][i];
            }
        }
        out
    }

    pub fn mat_vec(a: &Mat3, v: Vec3) -> Vec3 {
        [dot(a[0], v), dot(a[1], v), dot(a[2], v)]
    }

    pub fn det(a: &Mat3) -> f64 {
        dot(a[0], cross(a[1], a[2]))
    }

    pub fn identity() -> Mat3 {
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    }

    /// Largest absolute entry of `a − b`.
    pub fn max_diff(a: &Mat3, b: &Mat3) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((a[i][j] - b[i][j]).abs());
            }
        }
        m
    }

    /// Eigenvalues of a real symmetric 3×3 matrix (ascending), closed form.
    pub fn symmetric_eigenvalues(a: &Mat3) -> Vec3 {
        use core::f64::consts::PI;
        #[allow(unused_imports)]
        use num_traits::Float;
        let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        let tr = a[0][0] + a[1][1] + a[2][2];
        if p1 == 0.0 {
            let mut e = [a[0][0], a[1][1], a[2][2]];
            e.sort_by(f64::total_cmp);
            return e;
        }
        let q = tr / 3.0;
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let mut b = *a;
        for (i, row) in b.iter_mut().enumerate() {
            row[i] -= q;
            for x in row.iter_mut() {
                *x /= p;
            }
        }
        let r = (det(&b) / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
        let e2 = 3.0 * q - e1 - e3;
        [e3, e2, e1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
        let d = (a - b).max_abs();
        assert!(d <= tol, "matrices differ by {d:e}");
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = CMatrix::zeros(4, 4);
        assert_close(&matrix_exponential(&z).unwrap(), &CMatrix::identity(4), 1e-15);
    }

    #[test]
    fn exp_of_diagonal_phase() {
        let a = CMatrix::from_diagonal(&[c(0.0, PI), re(0.0)]);
        let e = matrix_exponential(&a).unwrap();
        assert_close(&e, &CMatrix::from_diagonal(&[re(-1.0), re(1.0)]), 1e-14);
    }

    #[test]
    fn exp_rejects_non_square() {
        let a = CMatrix::zeros(2, 3);
        assert_eq!(
            matrix_exponential(&a),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn exp_rejects_oversized() {
        let a = CMatrix::zeros(MAX_EXP_DIM + 1, MAX_EXP_DIM + 1);
        assert_eq!(matrix_exponential(&a), Err(Error::TooLarge(MAX_EXP_DIM + 1)));
    }

    #[test]
    fn non_normal_exponential_uses_taylor_path() {
        // exp([[0, 1], [0, 0]]) = [[1, 1], [0, 1]]
        let a = CMatrix::from_row_major(2, 2, vec![re(0.0), re(1.0), re(0.0), re(0.0)]).unwrap();
        let e = matrix_exponential(&a).unwrap();
        let expected =
            CMatrix::from_row_major(2, 2, vec![re(1.0), re(1.0), re(0.0), re(1.0)]).unwrap();
        assert_close(&e, &expected, 1e-14);
    }

    #[test]
    fn jacobi_handles_degenerate_spectrum() {
        let a = CMatrix::identity(5).scale(re(3.0));
        let eig = hermitian_eigen(&a).unwrap();
        assert!(eig.values.iter().all(|&v| (v - 3.0).abs() < 1e-14));
        assert_close(&eig.reconstruct(), &a, 1e-14);
    }

    #[test]
    fn jacobi_complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let a = CMatrix::from_row_major(2, 2, vec![re(1.0), I, -I, re(1.0)]).unwrap();
        let eig = hermitian_eigen(&a).unwrap();
        assert!((eig.values[0]).abs() < 1e-15);
        assert!((eig.values[1] - 2.0).abs() < 1e-15);
        assert!(eig.vectors.unitarity_error() < 1e-14);
    }

    #[test]
    fn solve3_matches_known_solution() {
        let m = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = [1.0, -2.0, 0.5];
        let b = real3::mat_vec(&m, x);
        let got = solve3(m, b).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-14);
        }
        assert!(solve3([[0.0; 3]; 3], [1.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn symmetric_eigenvalues_closed_form() {
        let m = [[4.0, 1.0, 0.0], [1.0, 4.0, 0.0], [0.0, 0.0, 1.0]];
        let e = real3::symmetric_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
        assert!((e[2] - 5.0).abs() < 1e-12);
    }
}
