use rotosense_core::estimation::{
    estimate_params, mean_and_variance, multinomial_stats, qcrb_experiment, sample_outcomes,
    trial_rng, CategoricalSampler, Pipeline,
};
use rotosense_core::measurement::{exact_probabilities, optimal_basis, OutcomeDistribution};
use rotosense_core::states::{balance, tetra2};
use rotosense_core::{RotationParams, Spin};

fn dist(p: [f64; 5]) -> OutcomeDistribution {
    OutcomeDistribution::new(p, RotationParams::default()).unwrap()
}

#[test]
fn fair_coin_concentrates() {
    for seed in 0..5 {
        let c = sample_outcomes(&dist([0.5, 0.5, 0.0, 0.0, 0.0]), 1_000_000, seed).unwrap();
        let f = c.counts[0] as f64 / 1e6;
        assert!((0.498..=0.502).contains(&f), "seed {seed}: {f}");
        assert_eq!(c.counts[2] + c.counts[3] + c.counts[4], 0);
    }
}

#[test]
fn frequencies_within_five_sigma() {
    let s = tetra2();
    let b = optimal_basis(&s).unwrap();
    let d = exact_probabilities(&s, &b, &RotationParams::from_axis(0.05, [0.48, 0.6, 0.64]).unwrap())
        .unwrap();
    let n = 1_000_000u64;
    for seed in [1, 2, 3] {
        let c = sample_outcomes(&d, n, seed).unwrap();
        for (k, &p) in d.p.iter().enumerate() {
            let f = c.counts[k] as f64 / n as f64;
            let tol = 5.0 * (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() <= tol.max(1e-12), "seed {seed} k {k}: {f} vs {p}");
        }
    }
}

/// Empirical moments of 1000 repetitions with `n` draws each.
fn empirical_moments(p: &[f64], n: u64, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let sampler = CategoricalSampler::new(p).unwrap();
    let reps: Vec<Vec<f64>> = (0..1000)
        .map(|r| {
            sampler
                .sample(&mut trial_rng(seed, r), n)
                .into_iter()
                .map(|c| c as f64)
                .collect()
        })
        .collect();
    let k = p.len();
    let means: Vec<f64> = (0..k)
        .map(|i| mean_and_variance(&reps.iter().map(|r| r[i]).collect::<Vec<_>>()).0)
        .collect();
    let mut cov = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let s: f64 = reps.iter().map(|r| (r[i] - means[i]) * (r[j] - means[j])).sum();
            cov[i][j] = s / (reps.len() - 1) as f64;
        }
    }
    (means, cov)
}

#[test]
fn empirical_moments_match_multinomial_formulas() {
    let settings: [(&[f64], u64); 3] = [
        (&[0.98, 0.02, 0.0, 0.0, 0.0], 1000),
        (&[0.5, 0.3, 0.2, 0.0, 0.0], 500),
        (&[0.4, 0.2, 0.2, 0.1, 0.1], 2000),
    ];
    for (seed, (p, n)) in settings.into_iter().enumerate() {
        let stats = multinomial_stats(p, n);
        let (_, cov) = empirical_moments(p, n, seed as u64);
        for i in 0..p.len() {
            if p[i] > 0.0 {
                assert!((cov[i][i] / stats.var[i] - 1.0).abs() <= 0.15, "{p:?} var {i}");
            }
            for j in 0..p.len() {
                // Only well-resolved covariances are compared.
                if i != j && p[i] * p[j] >= 0.04 {
                    assert!((cov[i][j] / stats.cov[i][j] - 1.0).abs() <= 0.15, "{p:?} cov {i},{j}");
                }
            }
        }
        assert!((stats.var[0] - stats.sum_variance(&[1, 2, 3, 4])).abs() < 1e-9);
    }
}

#[test]
fn analytic_variance_examples() {
    let s = multinomial_stats(&[0.98, 0.02, 0.0, 0.0, 0.0], 1000);
    assert!((s.var[0] - 19.6).abs() < 1e-9);
    let b = optimal_basis(&tetra2()).unwrap();
    let t: f64 = 0.05;
    let n = 1_000_000;
    let d = exact_probabilities(&tetra2(), &b, &RotationParams::new(t, 0.0, 0.0)).unwrap();
    let v = multinomial_stats(&d.p, n).sum_variance(&[0, 4]);
    assert!((v / n as f64 - 2.0 * t * t).abs() <= 10.0 * t.powi(3));
}

#[test]
fn estimator_recovers_rotation() {
    let u = [0.48, 0.6, 0.64];
    for (s, seed) in [(tetra2(), 5u64), (balance(), 6)] {
        let p = RotationParams::from_axis(0.05, u).unwrap();
        let r = qcrb_experiment(&s, &p, 1_000_000, 100, seed, Pipeline::Optimal).unwrap();
        assert!((r.mean_theta1_hat / 0.05 - 1.0).abs() <= 0.02, "{}", r.mean_theta1_hat);
        for i in 0..3 {
            assert!((r.mean_u_hat_abs[i] - u[i]).abs() <= 0.02, "{:?}", r.mean_u_hat_abs);
        }
        assert_eq!(r.degenerate_trials, 0);
    }
}

#[test]
fn estimator_on_sampled_counts() {
    let b = optimal_basis(&balance()).unwrap();
    let d = exact_probabilities(&balance(), &b, &RotationParams::new(0.05, 1.2, 0.3)).unwrap();
    let c = sample_outcomes(&d, 1_000_000, 9).unwrap();
    let e = estimate_params(&c, Spin::new(3.0).unwrap()).unwrap();
    let u = e.u_hat_abs.unwrap();
    let norm: f64 = u.iter().map(|x| x * x).sum();
    assert!((norm - 1.0).abs() < 1e-12);
    assert!((e.theta1_hat - 0.05).abs() < 0.005);
}
