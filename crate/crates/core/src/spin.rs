//! Spin-J algebra and the two pictures of an N-photon polarization state.
//!
//! A symmetric N-qubit state is equivalently a spin `J = N/2` state. The
//! collective picture stores `2J+1` amplitudes over `|J, m⟩` (descending
//! `m`); the qubit picture stores `2^N` amplitudes in the computational
//! basis with qubit 0 as the most significant bit.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, exp_hermitian, re, CMatrix, C64, I};
use crate::{Error, Result};

/// A total angular momentum `J`, stored as the integer `2J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    /// Largest `2J` accepted; the qubit picture has `2^(2J)` amplitudes.
    pub const MAX_TWICE: u32 = 24;

    pub fn new(j: f64) -> Result<Self> {
        if !j.is_finite() || j < 0.0 {
            return Err(Error::InvalidSpin(j));
        }
        let twice = 2.0 * j;
        let rounded = twice.round();
        if (twice - rounded).abs() > 1e-9 || rounded > Self::MAX_TWICE as f64 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Self(rounded as u32))
    }

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice > Self::MAX_TWICE {
            return Err(Error::InvalidSpin(twice as f64 / 2.0));
        }
        Ok(Self(twice))
    }

    /// The spin carried by `n` photons (qubits).
    pub fn from_photons(n: usize) -> Result<Self> {
        Self::from_twice(n as u32)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn j(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn photons(self) -> usize {
        self.0 as usize
    }

    /// `J(J+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.j();
        j * (j + 1.0)
    }

    /// `m` of the basis vector at `index` (descending order).
    pub fn m_at(self, index: usize) -> f64 {
        self.j() - index as f64
    }

    pub fn index_of(self, m: f64) -> Result<usize> {
        let k = self.j() - m;
        let kr = k.round();
        if (k - kr).abs() > 1e-9 || kr < 0.0 || kr as usize >= self.dim() {
            return Err(Error::InvalidProjection { j: self.j(), m });
        }
        Ok(kr as usize)
    }
}

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.j())
    }
}

/// A normalized pure state in the `|J, m⟩` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    spin: Spin,
    amps: Vec<C64>,
}

impl SpinState {
    /// Normalizes `amps`; fails on a wrong length or a zero vector.
    pub fn new(spin: Spin, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != spin.dim() {
            return Err(Error::DimensionMismatch {
                expected: spin.dim(),
                found: amps.len(),
            });
        }
        let amps = normalized(amps)?;
        Ok(Self { spin, amps })
    }

    /// `|J, m⟩`.
    pub fn basis(spin: Spin, m: f64) -> Result<Self> {
        let k = spin.index_of(m)?;
        let mut amps = vec![C64::new(0.0, 0.0); spin.dim()];
        amps[k] = re(1.0);
        Ok(Self { spin, amps })
    }

    pub(crate) fn from_normalized(spin: Spin, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), spin.dim());
        Self { spin, amps }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, m: f64) -> Result<C64> {
        Ok(self.amps[self.spin.index_of(m)?])
    }

    pub fn inner(&self, other: &Self) -> C64 {
        linalg::inner(&self.amps, &other.amps)
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amps)
    }

    /// `U|ψ⟩` for a unitary `U`; the result is not renormalized.
    pub fn evolve(&self, u: &CMatrix) -> Self {
        assert_eq!(u.cols(), self.spin.dim(), "operator dimension mismatch");
        Self {
            spin: self.spin,
            amps: u.mul_vec(&self.amps),
        }
    }
}

/// A normalized pure state of an n-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitState {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl QubitState {
    pub const MAX_QUBITS: usize = 24;

    pub fn new(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > Self::MAX_QUBITS {
            return Err(Error::InvalidArgument(alloc::format!(
                "qubit count {n_qubits} outside 1..={}",
                Self::MAX_QUBITS
            )));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                found: amps.len(),
            });
        }
        Ok(Self {
            n_qubits,
            amps: normalized(amps)?,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        if index >= amps.len() {
            return Err(Error::DimensionMismatch {
                expected: amps.len(),
                found: index,
            });
        }
        amps[index] = re(1.0);
        Self::new(n_qubits, amps)
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub(crate) fn from_normalized(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn inner(&self, other: &Self) -> C64 {
        linalg::inner(&self.amps, &other.amps)
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amps)
    }

    /// `|self⟩ ⊗ |other⟩`, `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }

    /// Probabilities of the computational basis outcomes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Apply a 2×2 matrix to `target`, conditioned on every qubit in
    /// `controls` being `|1⟩`. Indices are assumed validated by the caller.
    pub fn apply_single_qubit(&mut self, target: usize, m: &[[C64; 2]; 2], controls: &[usize]) {
        let n = self.n_qubits;
        let tbit = 1usize << (n - 1 - target);
        let cmask = controls
            .iter()
            .fold(0usize, |acc, &q| acc | (1usize << (n - 1 - q)));
        for i in 0..self.amps.len() {
            if i & tbit != 0 || i & cmask != cmask {
                continue;
            }
            let j = i | tbit;
            let a0 = self.amps[i];
            let a1 = self.amps[j];
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Apply the same 2×2 matrix to every qubit.
    pub fn apply_to_all(&mut self, m: &[[C64; 2]; 2]) {
        for q in 0..self.n_qubits {
            self.apply_single_qubit(q, m, &[]);
        }
    }
}

fn normalized(mut amps: Vec<C64>) -> Result<Vec<C64>> {
    let n = linalg::norm_sqr(&amps).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroNorm);
    }
    for a in &mut amps {
        *a /= n;
    }
    Ok(amps)
}

/// Rotation angle `theta1` about the axis with polar angle `theta2` and
/// azimuth `theta3`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RotationParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl RotationParams {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        Self {
            theta1,
            theta2,
            theta3,
        }
    }

    /// Parameters for a rotation by `theta1` about an arbitrary unit axis.
    pub fn from_axis(theta1: f64, u: [f64; 3]) -> Result<Self> {
        let n = linalg::real3::norm(u);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitAxis(n));
        }
        let theta2 = u[2].clamp(-1.0, 1.0).acos();
        let theta3 = u[1].atan2(u[0]);
        Ok(Self::new(theta1, theta2, theta3))
    }

    pub fn axis(&self) -> [f64; 3] {
        axis_from_angles(self.theta2, self.theta3)
    }

    /// `∂u/∂θ₂` and `∂u/∂θ₃`.
    pub fn axis_derivatives(&self) -> ([f64; 3], [f64; 3]) {
        let (s2, c2) = self.theta2.sin_cos();
        let (s3, c3) = self.theta3.sin_cos();
        ([c2 * c3, c2 * s3, -s2], [-s2 * s3, s2 * c3, 0.0])
    }

    pub fn is_finite(&self) -> bool {
        self.theta1.is_finite() && self.theta2.is_finite() && self.theta3.is_finite()
    }

    /// Replace parameter `k` (1, 2 or 3).
    pub fn with(&self, k: usize, value: f64) -> Self {
        let mut p = *self;
        match k {
            1 => p.theta1 = value,
            2 => p.theta2 = value,
            3 => p.theta3 = value,
            _ => panic!("parameter index {k} out of range"),
        }
        p
    }

    pub fn get(&self, k: usize) -> f64 {
        match k {
            1 => self.theta1,
            2 => self.theta2,
            3 => self.theta3,
            _ => panic!("parameter index {k} out of range"),
        }
    }
}

/// `u = (sinθ₂ cosθ₃, sinθ₂ sinθ₃, cosθ₂)`.
pub fn axis_from_angles(theta2: f64, theta3: f64) -> [f64; 3] {
    let (s2, c2) = theta2.sin_cos();
    let (s3, c3) = theta3.sin_cos();
    [s2 * c3, s2 * s3, c2]
}

/// `Jx`, `Jy`, `Jz` in the spin-J irrep.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl SpinOperators {
    /// `J_i` for `i` in 0..3.
    pub fn component(&self, i: usize) -> &CMatrix {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("spin component {i} out of range"),
        }
    }

    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// `v·Ĵ`.
    pub fn along(&self, v: [f64; 3]) -> CMatrix {
        let mut m = self.x.scale(re(v[0]));
        m = &m + &self.y.scale(re(v[1]));
        &m + &self.z.scale(re(v[2]))
    }

    /// `Jx² + Jy² + Jz²`.
    pub fn casimir(&self) -> CMatrix {
        let xx = self.x.matmul(&self.x);
        let yy = self.y.matmul(&self.y);
        let zz = self.z.matmul(&self.z);
        &(&xx + &yy) + &zz
    }
}

/// Ladder-operator construction: `J₊|J,m⟩ = √(J(J+1) − m(m+1)) |J,m+1⟩`,
/// `Jx = (J₊ + J₋)/2`, `Jy = (J₊ − J₋)/2i`.
pub fn spin_operators(spin: Spin) -> SpinOperators {
    let d = spin.dim();
    let cas = spin.casimir();
    let mut raise = CMatrix::zeros(d, d);
    for k in 1..d {
        let m = spin.m_at(k);
        raise[(k - 1, k)] = re((cas - m * (m + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    let x = (&raise + &lower).scale(re(0.5));
    let y = (&raise - &lower).scale(c(0.0, -0.5));
    let z = CMatrix::from_diagonal(&(0..d).map(|k| re(spin.m_at(k))).collect::<Vec<_>>());
    SpinOperators { x, y, z }
}

/// `exp(−iθ₁ u·Ĵ)`.
pub fn rotation_unitary(spin: Spin, params: &RotationParams) -> CMatrix {
    let ops = spin_operators(spin);
    let generator = ops.along(params.axis());
    exp_hermitian(&generator, params.theta1).expect("generator is square")
}

/// The single-qubit factor `exp(−i(θ₁/2) u·σ)` whose N-fold tensor power is
/// the collective rotation.
pub fn local_rotation(params: &RotationParams) -> [[C64; 2]; 2] {
    let u = params.axis();
    let (s, co) = (params.theta1 / 2.0).sin_cos();
    // cos·I − i sin (ux σx + uy σy + uz σz)
    [
        [c(co, -s * u[2]), -I * s * c(u[0], -u[1])],
        [-I * s * c(u[0], u[1]), c(co, s * u[2])],
    ]
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expand `|J, m⟩` amplitudes into the symmetric qubit state: `|J, J−k⟩` is
/// the normalized sum of all strings with `k` ones (V photons).
pub fn dicke_to_qubit(state: &SpinState) -> Result<QubitState> {
    let n = state.spin().photons();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "J = 0 has no qubit representation".into(),
        ));
    }
    let weights: Vec<C64> = state
        .amps()
        .iter()
        .enumerate()
        .map(|(k, a)| a / binomial(n, k).sqrt())
        .collect();
    let amps = (0..1usize << n)
        .map(|i| weights[i.count_ones() as usize])
        .collect();
    Ok(QubitState::from_normalized(n, amps))
}

/// Projection of a qubit state onto the maximal-J symmetric subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeProjection {
    pub state: SpinState,
    /// Squared weight outside the symmetric subspace.
    pub lost_weight: f64,
}

pub fn qubit_to_dicke(state: &QubitState) -> Result<DickeProjection> {
    let n = state.n_qubits();
    let spin = Spin::from_photons(n)?;
    let mut sums = vec![C64::new(0.0, 0.0); n + 1];
    for (i, a) in state.amps().iter().enumerate() {
        sums[i.count_ones() as usize] += a;
    }
    let amps: Vec<C64> = sums
        .into_iter()
        .enumerate()
        .map(|(k, s)| s / binomial(n, k).sqrt())
        .collect();
    let weight = linalg::norm_sqr(&amps);
    if weight < 1e-12 {
        return Err(Error::NoSymmetricComponent(weight));
    }
    let total = state.norm_sqr();
    let lost_weight = ((total - weight) / total).max(0.0);
    Ok(DickeProjection {
        state: SpinState::new(spin, amps)?,
        lost_weight,
    })
}
