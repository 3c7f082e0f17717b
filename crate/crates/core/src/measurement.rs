//! The four-projector measurement built from an anti-coherent probe and the
//! outcome statistics it induces.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::Serialize;

use crate::linalg::{inner, norm_sqr, re, C64};
use crate::linalg::real3::{self, Vec3};
use crate::metrology::{anticoherence_report, qfi_matrix};
use crate::spin::{rotation_unitary, spin_operators, RotationParams, Spin, SpinState};
use crate::{Error, Result};

/// Tolerance for certifying a probe before building its basis.
pub const ANTICOHERENCE_TOL: f64 = 1e-10;

/// Number of outcome categories: the four projectors plus everything else.
pub const CATEGORIES: usize = 5;

/// `[φ₀, J₁φ₀/c, J₂φ₀/c, J₃φ₀/c]` with `c = √(J(J+1)/3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorBasis {
    spin: Spin,
    states: [SpinState; 4],
}

impl ProjectorBasis {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn states(&self) -> &[SpinState; 4] {
        &self.states
    }

    pub fn state(&self, mu: usize) -> &SpinState {
        &self.states[mu]
    }

    /// `max |⟨ψ_μ|ψ_ν⟩ − δ_μν|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let d = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((self.states[a].inner(&self.states[b]) - re(d)).norm());
            }
        }
        worst
    }
}

pub fn optimal_basis(phi0: &SpinState) -> Result<ProjectorBasis> {
    let spin = phi0.spin();
    if spin.dim() < 4 {
        return Err(Error::InvalidArgument(format!(
            "J = {} has fewer than four basis states",
            spin.j()
        )));
    }
    let report = anticoherence_report(phi0, ANTICOHERENCE_TOL);
    if !report.pass {
        return Err(Error::NotAntiCoherent(report.deviations.worst()));
    }
    let ops = spin_operators(spin);
    let scale = 1.0 / (spin.casimir() / 3.0).sqrt();
    let make = |i: usize| {
        let v: Vec<C64> = ops
            .component(i)
            .mul_vec(phi0.amps())
            .into_iter()
            .map(|a| a * scale)
            .collect();
        SpinState::from_normalized(spin, v)
    };
    Ok(ProjectorBasis {
        spin,
        states: [phi0.clone(), make(0), make(1), make(2)],
    })
}

/// `[P₀, P₁, P₂, P₃, P_rest]` at the given rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub p: [f64; CATEGORIES],
    pub params: RotationParams,
}

impl OutcomeDistribution {
    /// Validates a user-supplied distribution; round-off negatives are
    /// clipped to zero.
    pub fn new(p: [f64; CATEGORIES], params: RotationParams) -> Result<Self> {
        let mut q = p;
        for x in &mut q {
            if !x.is_finite() || *x < -1e-12 || *x > 1.0 + 1e-12 {
                return Err(Error::InvalidDistribution(format!("entry {x} outside [0, 1]")));
            }
            *x = x.clamp(0.0, 1.0);
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self { p: q, params })
    }

    /// `[P₀, P₁, P₂, P₃]`.
    pub fn projectors(&self) -> [f64; 4] {
        [self.p[0], self.p[1], self.p[2], self.p[3]]
    }

    pub fn rest(&self) -> f64 {
        self.p[4]
    }

    pub fn max_gap(&self, other: &Self) -> f64 {
        (0..CATEGORIES).fold(0.0, |m, i| m.max((self.p[i] - other.p[i]).abs()))
    }
}

/// `P_μ = |⟨ψ_μ|𝒰|φ₀⟩|²`; `P_rest` is the squared norm of the part of
/// `𝒰|φ₀⟩` outside the four projectors.
pub fn exact_probabilities(
    phi0: &SpinState,
    basis: &ProjectorBasis,
    params: &RotationParams,
) -> Result<OutcomeDistribution> {
    if phi0.spin() != basis.spin() {
        return Err(Error::DimensionMismatch {
            expected: basis.spin().dim(),
            found: phi0.spin().dim(),
        });
    }
    let rotated = rotation_unitary(phi0.spin(), params).mul_vec(phi0.amps());
    Ok(probabilities_of(&rotated, basis, *params))
}

pub(crate) fn probabilities_of(
    rotated: &[C64],
    basis: &ProjectorBasis,
    params: RotationParams,
) -> OutcomeDistribution {
    let mut p = [0.0; CATEGORIES];
    let mut residual = rotated.to_vec();
    for (mu, psi) in basis.states.iter().enumerate() {
        let a = inner(psi.amps(), rotated);
        p[mu] = a.norm_sqr();
        for (r, b) in residual.iter_mut().zip(psi.amps()) {
            *r -= a * b;
        }
    }
    p[4] = norm_sqr(&residual);
    OutcomeDistribution { p, params }
}

/// `P₀ = 1 − θ₁²J(J+1)/3`, `P_i = θ₁²u_i²J(J+1)/3`, `P_rest = 0`.
pub fn small_angle_probabilities(spin: Spin, theta1: f64, u: Vec3) -> Result<OutcomeDistribution> {
    let n = real3::norm(u);
    if !((n - 1.0).abs() <= 1e-9) {
        return Err(Error::NonUnitAxis(n));
    }
    let x = theta1 * theta1 * spin.casimir() / 3.0;
    if !x.is_finite() || x > 1.0 {
        return Err(Error::SmallAngleOutOfRange(x));
    }
    let p = [1.0 - x, x * u[0] * u[0], x * u[1] * u[1], x * u[2] * u[2], 0.0];
    Ok(OutcomeDistribution {
        p,
        params: RotationParams::from_axis(theta1, u)?,
    })
}

/// Central-difference step for [`classical_fisher`].
pub const FISHER_STEP: f64 = 1e-5;
/// Outcomes below this probability are left out of the Fisher sum.
pub const FISHER_FLOOR: f64 = 1e-15;

/// `Σ_μ (∂P_μ/∂θ_k)² / P_μ` over the five outcome categories.
pub fn classical_fisher(
    phi0: &SpinState,
    basis: &ProjectorBasis,
    params: &RotationParams,
    k: usize,
) -> Result<f64> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidParameter(k));
    }
    let x = params.get(k);
    let center = exact_probabilities(phi0, basis, params)?;
    let plus = exact_probabilities(phi0, basis, &params.with(k, x + FISHER_STEP))?;
    let minus = exact_probabilities(phi0, basis, &params.with(k, x - FISHER_STEP))?;
    let mut f = 0.0;
    for mu in 0..CATEGORIES {
        let p = center.p[mu];
        if p > FISHER_FLOOR {
            let d = (plus.p[mu] - minus.p[mu]) / (2.0 * FISHER_STEP);
            f += d * d / p;
        }
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaturationEntry {
    pub k: usize,
    pub classical: f64,
    pub quantum: f64,
    pub ratio: f64,
    pub relative_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaturationReport {
    pub params: RotationParams,
    pub entries: Vec<SaturationEntry>,
}

impl SaturationReport {
    pub fn max_relative_deviation(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, e| m.max(e.relative_deviation))
    }
}

/// Compares the classical Fisher information of the optimal measurement with
/// the diagonal of the quantum Fisher matrix for all three parameters.
pub fn multiparam_saturation_check(
    phi0: &SpinState,
    params: &RotationParams,
) -> Result<SaturationReport> {
    let basis = optimal_basis(phi0)?;
    let q = qfi_matrix(phi0, params);
    let mut entries = Vec::with_capacity(3);
    for k in 1..=3 {
        let classical = classical_fisher(phi0, &basis, params, k)?;
        let quantum = q.diag(k);
        let ratio = classical / quantum;
        entries.push(SaturationEntry {
            k,
            classical,
            quantum,
            ratio,
            relative_deviation: (ratio - 1.0).abs(),
        });
    }
    Ok(SaturationReport {
        params: *params,
        entries,
    })
}
