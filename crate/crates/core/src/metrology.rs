//! Angular-momentum covariance, Fisher information and the three-parameter
//! quantum Fisher information matrix.

#[allow(unused_imports)]
use num_traits::Float;
use serde::Serialize;

use crate::linalg::real3::{self, Mat3, Vec3};
use crate::linalg::{inner, re, solve3, CMatrix};
use crate::spin::{rotation_unitary, spin_operators, RotationParams, Spin, SpinState};
use crate::{Error, Result};

/// A real symmetric 3×3 matrix such as `𝒥_ij = ½⟨{J_i, J_j}⟩ − ⟨J_i⟩⟨J_j⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CovMatrix(pub Mat3);

impl CovMatrix {
    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// `vᵀ 𝒥 v`.
    pub fn quadratic_form(&self, v: Vec3) -> f64 {
        real3::dot(v, real3::mat_vec(&self.0, v))
    }

    pub fn eigenvalues(&self) -> Vec3 {
        real3::symmetric_eigenvalues(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JExpectations {
    pub mean: Vec3,
    pub cov: CovMatrix,
}

pub fn j_expectations(state: &SpinState) -> JExpectations {
    let ops = spin_operators(state.spin());
    let psi = state.amps();
    let applied = ops.components().map(|op| op.mul_vec(psi));
    let mut mean = [0.0; 3];
    for i in 0..3 {
        mean[i] = inner(psi, &applied[i]).re;
    }
    let mut cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            // Re⟨J_iψ|J_jψ⟩ is the symmetrized second moment.
            let v = inner(&applied[i], &applied[j]).re - mean[i] * mean[j];
            cov[i][j] = v;
            cov[j][i] = v;
        }
    }
    JExpectations {
        mean,
        cov: CovMatrix(cov),
    }
}

fn check_unit(u: Vec3) -> Result<()> {
    let n = real3::norm(u);
    if !((n - 1.0).abs() <= 1e-9) {
        return Err(Error::NonUnitAxis(n));
    }
    Ok(())
}

/// `F = 4 uᵀ𝒥u` for rotations about `u`.
pub fn fisher_single(state: &SpinState, u: Vec3) -> Result<f64> {
    check_unit(u)?;
    let cov = j_expectations(state).cov;
    Ok((4.0 * cov.quadratic_form(u)).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnticoherenceDeviations {
    /// `max |⟨J_i⟩|`
    pub mean: f64,
    /// `max |𝒥_ii − J(J+1)/3|`
    pub diagonal: f64,
    /// `max_{i≠j} |𝒥_ij|`
    pub off_diagonal: f64,
}

impl AnticoherenceDeviations {
    pub fn worst(&self) -> f64 {
        self.mean.max(self.diagonal).max(self.off_diagonal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnticoherenceReport {
    pub pass: bool,
    pub tol: f64,
    pub deviations: AnticoherenceDeviations,
}

pub fn anticoherence_report(state: &SpinState, tol: f64) -> AnticoherenceReport {
    let JExpectations { mean, cov } = j_expectations(state);
    let target = state.spin().casimir() / 3.0;
    let mut dev = AnticoherenceDeviations {
        mean: 0.0,
        diagonal: 0.0,
        off_diagonal: 0.0,
    };
    for i in 0..3 {
        dev.mean = dev.mean.max(mean[i].abs());
        dev.diagonal = dev.diagonal.max((cov.0[i][i] - target).abs());
        for j in 0..3 {
            if i != j {
                dev.off_diagonal = dev.off_diagonal.max(cov.0[i][j].abs());
            }
        }
    }
    AnticoherenceReport {
        pass: dev.worst() <= tol,
        tol,
        deviations: dev,
    }
}

/// Coefficients of the generators `Ĝ_k = g_k·Ĵ = i(∂𝒰/∂θ_k)𝒰†`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneratorCoeffs {
    pub g1: Vec3,
    pub g2: Vec3,
    pub g3: Vec3,
}

impl GeneratorCoeffs {
    /// `g_k` for `k` in 1..=3.
    pub fn get(&self, k: usize) -> Result<Vec3> {
        match k {
            1 => Ok(self.g1),
            2 => Ok(self.g2),
            3 => Ok(self.g3),
            _ => Err(Error::InvalidParameter(k)),
        }
    }

    /// The matrix with rows `g1, g2, g3`.
    pub fn matrix(&self) -> Mat3 {
        [self.g1, self.g2, self.g3]
    }
}

/// `g₁ = u`, and for `k = 2, 3` with `d = ∂u/∂θ_k`:
/// `g_k = sinθ₁ d − (1 − cosθ₁)(d × u)`.
pub fn generator_coeffs(params: &RotationParams) -> GeneratorCoeffs {
    let u = params.axis();
    let (d2, d3) = params.axis_derivatives();
    let (s, c) = params.theta1.sin_cos();
    let g = |d: Vec3| real3::sub(real3::scale(d, s), real3::scale(real3::cross(d, u), 1.0 - c));
    GeneratorCoeffs {
        g1: u,
        g2: g(d2),
        g3: g(d3),
    }
}

/// `Ĝ_k = g_k·Ĵ` in the spin-J irrep.
pub fn generator_matrix(spin: Spin, params: &RotationParams, k: usize) -> Result<CMatrix> {
    let g = generator_coeffs(params).get(k)?;
    Ok(spin_operators(spin).along(g))
}

/// The orthogonal matrix `R` with `𝒰†Ĵ𝒰 = RĴ`, read off from the spin-½
/// representation.
pub fn rotation_matrix_r(params: &RotationParams) -> Mat3 {
    let half = Spin::from_twice(1).expect("spin 1/2");
    let ops = spin_operators(half);
    let u = rotation_unitary(half, params);
    let ud = u.adjoint();
    let comps = ops.components();
    let mut gram = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            gram[a][b] = comps[a].matmul(comps[b]).trace().re;
        }
    }
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        let conj = ud.matmul(comps[i]).matmul(&u);
        let mut rhs = [0.0; 3];
        for b in 0..3 {
            rhs[b] = conj.matmul(comps[b]).trace().re;
        }
        r[i] = solve3(gram, rhs).expect("spin operators are linearly independent");
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct QfiMatrix(pub Mat3);

impl QfiMatrix {
    /// `Q_kk` for `k` in 1..=3.
    pub fn diag(&self, k: usize) -> f64 {
        self.0[k - 1][k - 1]
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        real3::max_diff(&self.0, &other.0)
    }
}

/// `Q = 4 𝔊 R C Rᵀ 𝔊ᵀ` with `C` the covariance of the unrotated state and
/// `𝔊` the matrix whose rows are the generator coefficients.
pub fn qfi_matrix(state: &SpinState, params: &RotationParams) -> QfiMatrix {
    let cov = j_expectations(state).cov.0;
    let g = generator_coeffs(params).matrix();
    let r = rotation_matrix_r(params);
    let rc = real3::matmul(&real3::matmul(&r, &cov), &real3::transpose(&r));
    let m = real3::matmul(&real3::matmul(&g, &rc), &real3::transpose(&g));
    let mut q = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            q[i][j] = 2.0 * (m[i][j] + m[j][i]);
        }
    }
    QfiMatrix(q)
}

/// `Q = (4J(J+1)/3) 𝔊𝔊ᵀ`, valid only for anti-coherent probes.
pub fn qfi_matrix_anticoherent(spin: Spin, params: &RotationParams) -> QfiMatrix {
    let g = generator_coeffs(params).matrix();
    let gg = real3::matmul(&g, &real3::transpose(&g));
    let f = 4.0 * spin.casimir() / 3.0;
    let mut q = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            q[i][j] = f * gg[i][j];
        }
    }
    QfiMatrix(q)
}

/// `4 Var(u·Ĵ)` straight from the amplitudes.
pub fn variance_fisher(state: &SpinState, u: Vec3) -> f64 {
    let op = spin_operators(state.spin()).along(u);
    let v = op.mul_vec(state.amps());
    let mean = inner(state.amps(), &v).re;
    4.0 * (inner(&v, &v).re - mean * mean)
}

/// Largest residual `‖𝒰†J_i𝒰 − Σ_j R_ij J_j‖` over `i`, in the spin-`J` irrep.
pub fn conjugation_residual(spin: Spin, params: &RotationParams, r: &Mat3) -> f64 {
    let ops = spin_operators(spin);
    let u = rotation_unitary(spin, params);
    let ud = u.adjoint();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let lhs = ud.matmul(ops.component(i)).matmul(&u);
        let rhs = ops.along(r[i]);
        worst = worst.max((&lhs - &rhs).max_abs());
    }
    worst
}

/// `i(∂𝒰/∂θ_k)𝒰†` by central differences.
pub fn generator_finite_difference(
    spin: Spin,
    params: &RotationParams,
    k: usize,
    step: f64,
) -> Result<CMatrix> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(k));
    }
    let x = params.get(k);
    let plus = rotation_unitary(spin, &params.with(k, x + step));
    let minus = rotation_unitary(spin, &params.with(k, x - step));
    let du = (&plus - &minus).scale(re(1.0 / (2.0 * step)));
    let u = rotation_unitary(spin, params);
    Ok(du.matmul(&u.adjoint()).scale(crate::linalg::I))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{balance, coherent, tetra1, tetra2};
    use core::f64::consts::PI;

    #[test]
    fn coherent_top_state_moments() {
        let s = coherent(Spin::new(2.0).unwrap());
        let e = j_expectations(&s);
        assert_eq!(e.mean, [0.0, 0.0, 2.0]);
        let expect = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
        assert!(real3::max_diff(&e.cov.0, &expect) < 1e-12);
        assert_eq!(fisher_single(&s, [0.0, 0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn named_state_covariances() {
        for (s, v) in [(tetra2(), 2.0), (balance(), 4.0)] {
            let e = j_expectations(&s);
            let expect = [[v, 0.0, 0.0], [0.0, v, 0.0], [0.0, 0.0, v]];
            assert!(real3::max_diff(&e.cov.0, &expect) < 1e-12);
            assert!(e.mean.iter().all(|m| m.abs() < 1e-12));
        }
    }

    #[test]
    fn fisher_examples() {
        assert!((fisher_single(&tetra2(), [0.0, 0.0, 1.0]).unwrap() - 8.0).abs() < 1e-12);
        let u = real3::scale([1.0, -2.0, 0.5], 1.0 / real3::norm([1.0, -2.0, 0.5]));
        assert!((fisher_single(&balance(), u).unwrap() - 16.0).abs() < 1e-12);
        assert!(matches!(
            fisher_single(&tetra2(), [1.0, 1.0, 0.0]),
            Err(Error::NonUnitAxis(_))
        ));
    }

    #[test]
    fn anticoherence_examples() {
        assert!(anticoherence_report(&tetra1(), 1e-12).pass);
        assert!(anticoherence_report(&tetra2(), 1e-12).pass);
        let r = anticoherence_report(&coherent(Spin::new(3.0).unwrap()), 1e-12);
        assert!(!r.pass);
        assert!((r.deviations.mean - 3.0).abs() < 1e-12);
    }

    #[test]
    fn generator_coeffs_basic() {
        let p = RotationParams::new(0.0, 0.7, -1.3);
        let g = generator_coeffs(&p);
        assert_eq!(g.g1, p.axis());
        assert_eq!(g.g2, [0.0; 3]);
        assert_eq!(g.g3, [0.0; 3]);
        assert!(generator_matrix(Spin::new(1.0).unwrap(), &p, 4).is_err());
    }

    #[test]
    fn g1_along_z_is_jz() {
        let spin = Spin::new(2.0).unwrap();
        let g = generator_matrix(spin, &RotationParams::new(0.4, 0.0, 0.0), 1).unwrap();
        assert!((&g - &spin_operators(spin).z).max_abs() < 1e-15);
    }

    #[test]
    fn r_at_zero_angle_is_identity() {
        let r = rotation_matrix_r(&RotationParams::new(0.0, 1.0, 2.0));
        assert!(real3::max_diff(&r, &real3::identity()) < 1e-12);
    }

    #[test]
    fn r_quarter_turn_about_z() {
        let p = RotationParams::new(PI / 2.0, 0.0, 0.0);
        let r = rotation_matrix_r(&p);
        for twice in [1, 2, 4] {
            let spin = Spin::from_twice(twice).unwrap();
            assert!(conjugation_residual(spin, &p, &r) < 1e-10);
        }
        assert!((r[2][2] - 1.0).abs() < 1e-12);
        assert!(r[0][0].abs() < 1e-12);
    }

    #[test]
    fn qfi_at_zero_angle() {
        let q = qfi_matrix(&tetra2(), &RotationParams::new(0.0, 0.3, 0.9));
        let expect = [[8.0, 0.0, 0.0], [0.0; 3], [0.0; 3]];
        assert!(real3::max_diff(&q.0, &expect) < 1e-12);
    }
}
