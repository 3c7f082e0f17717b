//! Multinomial sampling, parameter extraction and Cramér-Rao statistics.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::bell::{bell_decompose, category_table, Pairing, REST};
use crate::measurement::{
    optimal_basis, probabilities_of, small_angle_probabilities, OutcomeDistribution, ProjectorBasis,
    CATEGORIES,
};
use crate::metrology::qfi_matrix;
use crate::spin::{dicke_to_qubit, rotation_unitary, RotationParams, Spin, SpinState};
use crate::{Error, Result};

/// Generator for trial `trial` of a run seeded with `seed`: the seed picks
/// the key and the trial picks the stream, so trials are independent of
/// execution order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Inverse-CDF sampler on 64-bit integer thresholds.
#[derive(Clone, Debug)]
pub struct CategoricalSampler {
    thresholds: Vec<u64>,
    fallback: usize,
}

impl CategoricalSampler {
    pub fn new(p: &[f64]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("no categories".into()));
        }
        if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {x} is not a probability")));
        }
        let total: f64 = p.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("all entries are zero".into()));
        }
        let scale = 18_446_744_073_709_551_616.0 / total;
        let mut acc = 0.0;
        let thresholds = p
            .iter()
            .map(|x| {
                acc += x;
                // `as` saturates at u64::MAX.
                (acc * scale) as u64
            })
            .collect();
        let fallback = p.iter().rposition(|x| *x > 0.0).expect("positive total");
        Ok(Self {
            thresholds,
            fallback,
        })
    }

    pub fn categories(&self) -> usize {
        self.thresholds.len()
    }

    #[inline]
    pub fn draw<R: RngCore>(&self, rng: &mut R) -> usize {
        let r = rng.next_u64();
        self.thresholds
            .iter()
            .position(|&t| r < t)
            .unwrap_or(self.fallback)
    }

    /// Counts of `n` independent draws.
    pub fn sample<R: RngCore>(&self, rng: &mut R, n: u64) -> Vec<u64> {
        let mut counts = vec![0u64; self.thresholds.len()];
        for _ in 0..n {
            counts[self.draw(rng)] += 1;
        }
        counts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    /// `[χ₀, χ₁, χ₂, χ₃, χ_rest]`
    pub counts: [u64; CATEGORIES],
    pub n: u64,
    pub seed: u64,
}

impl OutcomeCounts {
    pub fn new(counts: [u64; CATEGORIES], seed: u64) -> Result<Self> {
        let n = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidArgument("no outcomes recorded".into()));
        }
        Ok(Self { counts, n, seed })
    }

    pub fn frequencies(&self) -> [f64; CATEGORIES] {
        self.counts.map(|c| c as f64 / self.n as f64)
    }
}

pub fn sample_outcomes(dist: &OutcomeDistribution, n: u64, seed: u64) -> Result<OutcomeCounts> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let sampler = CategoricalSampler::new(&dist.p)?;
    let c = sampler.sample(&mut trial_rng(seed, 0), n);
    Ok(OutcomeCounts {
        counts: [c[0], c[1], c[2], c[3], c[4]],
        n,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub theta1_hat: f64,
    /// `None` when no count left the `P₀` category.
    pub u_hat_abs: Option<[f64; 3]>,
    pub n: u64,
    pub j: f64,
    /// Whether `1 − P̂₀` had to be clamped at zero.
    pub clamped: bool,
}

/// `|θ̂₁| = √((1 − P̂₀)·3/(J(J+1)))`, `|û_i| = √(P̂_i/(1 − P̂₀))`, with the
/// rest category folded into `P̂₀`.
pub fn estimate_params(counts: &OutcomeCounts, spin: Spin) -> Result<EstimateReport> {
    let c = &counts.counts;
    let n = counts.n;
    if n == 0 || c.iter().sum::<u64>() != n {
        return Err(Error::InvalidArgument("counts do not sum to n".into()));
    }
    let off = c[1] + c[2] + c[3];
    let p0 = (c[0] + c[REST]) as f64 / n as f64;
    let mut report = from_p0(1.0 - p0, spin, n)?;
    if off > 0 {
        let o = off as f64;
        report.u_hat_abs = Some([1, 2, 3].map(|i| (c[i] as f64 / o).sqrt()));
    }
    Ok(report)
}

fn from_p0(one_minus_p0: f64, spin: Spin, n: u64) -> Result<EstimateReport> {
    let cas = spin.casimir();
    if cas == 0.0 {
        return Err(Error::InvalidSpin(spin.j()));
    }
    let clamped = one_minus_p0 < 0.0;
    let x = one_minus_p0.max(0.0);
    Ok(EstimateReport {
        theta1_hat: (x * 3.0 / cas).sqrt(),
        u_hat_abs: None,
        n,
        j: spin.j(),
        clamped,
    })
}

/// Same estimator on given frequencies `[P̂₀, P̂₁, P̂₂, P̂₃, P̂_rest]`.
pub fn estimate_from_frequencies(p: [f64; CATEGORIES], spin: Spin, n: u64) -> Result<EstimateReport> {
    let off = p[1] + p[2] + p[3];
    let mut report = from_p0(1.0 - p[0] - p[REST], spin, n)?;
    if off > 0.0 {
        report.u_hat_abs = Some([1, 2, 3].map(|i| (p[i].max(0.0) / off).sqrt()));
    }
    Ok(report)
}

/// Moments of a multinomial `(χ_1, …, χ_k)` with `n` trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultinomialStats {
    pub n: u64,
    pub p: Vec<f64>,
    /// `Var(χ_i) = nP_i(1 − P_i)`
    pub var: Vec<f64>,
    /// `Cov(χ_i, χ_j) = −nP_iP_j` off the diagonal, `Var(χ_i)` on it.
    pub cov: Vec<Vec<f64>>,
}

pub fn multinomial_stats(p: &[f64], n: u64) -> MultinomialStats {
    let nf = n as f64;
    let var: Vec<f64> = p.iter().map(|&x| nf * x * (1.0 - x)).collect();
    let cov = (0..p.len())
        .map(|i| {
            (0..p.len())
                .map(|j| if i == j { var[i] } else { -nf * p[i] * p[j] })
                .collect()
        })
        .collect();
    MultinomialStats {
        n,
        p: p.to_vec(),
        var,
        cov,
    }
}

impl MultinomialStats {
    /// `Var(Σ a_i χ_i) = Σ a_i a_j Cov(χ_i, χ_j)`.
    pub fn linear_combination_variance(&self, a: &[f64]) -> f64 {
        let mut v = 0.0;
        for (i, ai) in a.iter().enumerate() {
            for (j, aj) in a.iter().enumerate() {
                v += ai * aj * self.cov[i][j];
            }
        }
        v
    }

    /// `Var(Σ_{i∈S} χ_i) = n(Σ P_i)(1 − Σ P_i)`.
    pub fn sum_variance(&self, indices: &[usize]) -> f64 {
        let s: f64 = indices.iter().map(|&i| self.p[i]).sum();
        self.n as f64 * s * (1.0 - s)
    }
}

/// Recursive pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Mean and unbiased variance.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, pairwise_sum(&sq) / (n - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    /// Direct projection onto the optimal basis.
    Optimal,
    /// Bell-pair measurements aggregated into the optimal-basis categories.
    Bell,
}

impl core::str::FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(Self::Optimal),
            "bell" => Ok(Self::Bell),
            other => Err(Error::InvalidArgument(format!("unknown pipeline `{other}`"))),
        }
    }
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::Bell => "bell",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub theta1_hat: f64,
    /// Zero when the axis is undefined for this trial.
    pub u_hat_abs: [f64; 3],
    pub degenerate: bool,
    pub counts: [u64; CATEGORIES],
}

/// Everything one trial needs, prepared once per experiment.
#[derive(Clone, Debug)]
pub struct QcrbPlan {
    spin: Spin,
    params: RotationParams,
    n: u64,
    pipeline: Pipeline,
    exact: OutcomeDistribution,
    sampler: CategoricalSampler,
    /// Aggregation category of every sampler outcome.
    category: Vec<usize>,
    fisher: f64,
}

impl QcrbPlan {
    pub fn new(phi0: &SpinState, params: &RotationParams, n: u64, pipeline: Pipeline) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !params.is_finite() {
            return Err(Error::InvalidArgument("rotation parameters must be finite".into()));
        }
        let spin = phi0.spin();
        let basis: ProjectorBasis = optimal_basis(phi0)?;
        let rotated = rotation_unitary(spin, params).mul_vec(phi0.amps());
        let exact = probabilities_of(&rotated, &basis, *params);
        let (sampler, category) = match pipeline {
            Pipeline::Optimal => (CategoricalSampler::new(&exact.p)?, (0..CATEGORIES).collect()),
            Pipeline::Bell => {
                let photons = spin.photons();
                let table = category_table(photons)?;
                let q = dicke_to_qubit(&SpinState::new(spin, rotated)?)?;
                let bp = bell_decompose(&q, &Pairing::adjacent(photons)?)?;
                // Order outcomes by category so that both pipelines map the
                // same uniform draws to matching categories.
                let mut order: Vec<usize> = (0..table.len()).collect();
                order.sort_by_key(|&t| (table[t], t));
                let p: Vec<f64> = order.iter().map(|&t| bp.amps()[t].norm_sqr()).collect();
                let category = order.iter().map(|&t| table[t]).collect();
                (CategoricalSampler::new(&p)?, category)
            }
        };
        let fisher = qfi_matrix(phi0, params).diag(1);
        Ok(Self {
            spin,
            params: *params,
            n,
            pipeline,
            exact,
            sampler,
            category,
            fisher,
        })
    }

    pub fn exact(&self) -> &OutcomeDistribution {
        &self.exact
    }

    pub fn counts(&self, seed: u64, trial: u64) -> OutcomeCounts {
        let raw = self.sampler.sample(&mut trial_rng(seed, trial), self.n);
        let mut counts = [0u64; CATEGORIES];
        for (k, c) in raw.iter().enumerate() {
            counts[self.category[k]] += c;
        }
        OutcomeCounts {
            counts,
            n: self.n,
            seed,
        }
    }

    pub fn run_trial(&self, seed: u64, trial: u64) -> TrialRecord {
        let counts = self.counts(seed, trial);
        let est = estimate_params(&counts, self.spin).expect("counts sum to n");
        TrialRecord {
            trial,
            theta1_hat: est.theta1_hat,
            u_hat_abs: est.u_hat_abs.unwrap_or([0.0; 3]),
            degenerate: est.u_hat_abs.is_none(),
            counts: counts.counts,
        }
    }

    /// Statistics over `records`, which must be in trial order for the
    /// summation order to be reproducible.
    pub fn summarize(&self, records: &[TrialRecord], seed: u64) -> Result<QcrbReport> {
        let thetas: Vec<f64> = records.iter().map(|r| r.theta1_hat).collect();
        let (mean_theta, var_theta) = mean_and_variance(&thetas);
        let sigma_emp = var_theta.sqrt();
        let sigma_pred = 1.0 / (self.n as f64 * self.fisher).sqrt();
        let usable: Vec<&TrialRecord> = records.iter().filter(|r| !r.degenerate).collect();
        let mut mean_u = [0.0; 3];
        let mut sigma_u = [0.0; 3];
        for i in 0..3 {
            let xs: Vec<f64> = usable.iter().map(|r| r.u_hat_abs[i]).collect();
            let (m, v) = mean_and_variance(&xs);
            mean_u[i] = m;
            sigma_u[i] = v.sqrt();
        }
        let u = self.params.axis();
        let off: f64 = self.exact.p[1] + self.exact.p[2] + self.exact.p[3];
        let sigma_u_pred = [0, 1, 2].map(|i| {
            let q = self.exact.p[i + 1] / off;
            if q > 0.0 && off > 0.0 {
                Some(((1.0 - q) / (4.0 * self.n as f64 * off)).sqrt())
            } else {
                None
            }
        });
        let small = small_angle_probabilities(self.spin, self.params.theta1, u).ok();
        Ok(QcrbReport {
            pipeline: self.pipeline,
            j: self.spin.j(),
            n: self.n,
            trials: records.len() as u64,
            seed,
            params: self.params,
            fisher: self.fisher,
            theta1_true: self.params.theta1.abs(),
            mean_theta1_hat: mean_theta,
            sigma_emp,
            sigma_pred,
            ratio: sigma_emp / sigma_pred,
            u_true_abs: u.map(f64::abs),
            mean_u_hat_abs: mean_u,
            sigma_u_hat: sigma_u,
            sigma_u_pred,
            degenerate_trials: (records.len() - usable.len()) as u64,
            clamp_count: 0,
            exact_probabilities: self.exact.p,
            small_angle_probabilities: small.map(|d| d.p),
            max_exact_vs_approx_gap: small.map(|d| d.max_gap(&self.exact)),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QcrbReport {
    pub pipeline: Pipeline,
    pub j: f64,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub params: RotationParams,
    /// `Q₁₁`, the quantum Fisher information for `θ₁`.
    pub fisher: f64,
    pub theta1_true: f64,
    pub mean_theta1_hat: f64,
    pub sigma_emp: f64,
    /// `1/√(n Q₁₁)`
    pub sigma_pred: f64,
    pub ratio: f64,
    pub u_true_abs: [f64; 3],
    pub mean_u_hat_abs: [f64; 3],
    pub sigma_u_hat: [f64; 3],
    /// Delta-method prediction; absent for components with zero weight.
    pub sigma_u_pred: [Option<f64>; 3],
    pub degenerate_trials: u64,
    /// Always zero for count data; kept for frequency-based callers.
    pub clamp_count: u64,
    pub exact_probabilities: [f64; CATEGORIES],
    pub small_angle_probabilities: Option<[f64; CATEGORIES]>,
    pub max_exact_vs_approx_gap: Option<f64>,
}

/// Sequential experiment; see [`QcrbPlan`] for running trials elsewhere.
pub fn qcrb_experiment(
    phi0: &SpinState,
    params: &RotationParams,
    n: u64,
    trials: u64,
    seed: u64,
    pipeline: Pipeline,
) -> Result<QcrbReport> {
    if trials < 2 {
        return Err(Error::InvalidArgument("at least two trials are needed".into()));
    }
    let plan = QcrbPlan::new(phi0, params, n, pipeline)?;
    let records: Vec<TrialRecord> = (0..trials).map(|t| plan.run_trial(seed, t)).collect();
    plan.summarize(&records, seed)
}
