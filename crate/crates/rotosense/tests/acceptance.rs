//! Acceptance criteria 1–11. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;
use rotosense::runner::{qcrb_parallel, run_trials, threads_from_env};
use rotosense_core::bell::{
    aggregate_with_rest, decompose_spin_state, verify_tabulated_decompositions, FIDELITY_SLACK,
};
use rotosense_core::circuit::{analyze_bell_analyzer, gate_identity_checks, verify_prep_circuits};
use rotosense_core::estimation::{multinomial_stats, trial_rng, CategoricalSampler, Pipeline, QcrbPlan};
use rotosense_core::measurement::{
    classical_fisher, exact_probabilities, multiparam_saturation_check, optimal_basis,
    small_angle_probabilities,
};
use rotosense_core::metrology::{anticoherence_report, fisher_single, qfi_matrix};
use rotosense_core::spin::rotation_unitary;
use rotosense_core::states::{balance, tetra1, tetra2};
use rotosense_core::{RotationParams, Spin, SpinState, C64};

const SEED: u64 = 20_240_601;

// Pinned tolerances.
const FISHER_TOL: f64 = 1e-9;
const ANTICOHERENCE_TOL: f64 = 1e-12;
const MIN_SLOPE: f64 = 2.8;
/// Constant `C` of every `C·θ₁³` bound.
const CUBIC_C: f64 = 10.0;
const CLASSICAL_FISHER_REL: f64 = 0.01;
const SATURATION_BAND: (f64, f64) = (0.95, 1.05);
const COEFF_TOL: f64 = 1e-10;
const SINGLET_TOL: f64 = 1e-10;
const SIGMA_BAND: (f64, f64) = (0.9, 1.1);
const PIPELINE_REL: f64 = 0.05;
const MOMENT_REL: f64 = 0.15;
const IDENTITY_TOL: f64 = 1e-12;
const DISJOINT_TV_TOL: f64 = 1e-10;

struct Verdict {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict {
        pass,
        detail,
        notes: Vec::new(),
    }
}

fn run(id: u32, title: &str, limit: Duration, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let (pass, detail, notes) = match result {
        Ok(v) => (v.pass, v.detail, v.notes),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("panicked: {msg}"), Vec::new())
        }
    };
    let in_time = elapsed <= limit;
    let ok = pass && in_time;
    println!(
        "{} criterion {id:>2}: {title}: {detail} [{:.2} s, limit {} s{}]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", too slow" },
    );
    for n in notes {
        println!("    {n}");
    }
    ok
}

struct Rng(ChaCha8Rng);

impl Rng {
    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn unit_vector(&mut self) -> [f64; 3] {
        let z = 2.0 * self.uniform() - 1.0;
        let phi = 2.0 * std::f64::consts::PI * self.uniform();
        let r = (1.0 - z * z).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    }

    fn params(&mut self) -> RotationParams {
        let u = self.unit_vector();
        let t = (2.0 * self.uniform() - 1.0) * std::f64::consts::PI;
        RotationParams::from_axis(t, u).unwrap()
    }
}

fn rng(stream: u64) -> Rng {
    Rng(trial_rng(SEED, stream))
}

/// 20 log-spaced angles from 1e-3 to 5e-2.
fn grid() -> Vec<f64> {
    (0..20)
        .map(|i| 1e-3 * (50f64).powf(i as f64 / 19.0))
        .collect()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn rotated(s: &SpinState, p: &RotationParams) -> SpinState {
    s.evolve(&rotation_unitary(s.spin(), p))
}

fn fisher_bound(state: SpinState, target: f64, stream: u64) -> Verdict {
    let mut r = rng(stream);
    let mut worst_single = 0.0f64;
    let mut worst_q = 0.0f64;
    for _ in 0..50 {
        let p = r.params();
        worst_single = worst_single.max((fisher_single(&state, p.axis()).unwrap() - target).abs());
        worst_q = worst_q.max((qfi_matrix(&state, &p).diag(1) - target).abs());
    }
    verdict(
        worst_single <= FISHER_TOL && worst_q <= FISHER_TOL,
        format!("max |F − {target}| = {worst_single:.1e}, max |Q₁₁ − {target}| = {worst_q:.1e} over 50 axes (tol {FISHER_TOL:.0e})"),
    )
}

fn c1() -> Verdict {
    fisher_bound(tetra2(), 8.0, 1)
}

fn c2() -> Verdict {
    fisher_bound(balance(), 16.0, 2)
}

fn c3() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, s) in [("tetra1", tetra1()), ("tetra2", tetra2()), ("balance", balance())] {
        let r = anticoherence_report(&s, ANTICOHERENCE_TOL);
        ok &= r.pass;
        parts.push(format!("{name} {} ({:.1e})", if r.pass { "pass" } else { "fail" }, r.deviations.worst()));
    }
    for (name, j, m) in [("|2,2⟩", 2.0, 2.0), ("|3,3⟩", 3.0, 3.0)] {
        let s = SpinState::basis(Spin::new(j).unwrap(), m).unwrap();
        let r = anticoherence_report(&s, ANTICOHERENCE_TOL);
        ok &= !r.pass;
        parts.push(format!("{name} {}", if r.pass { "pass" } else { "fail" }));
    }
    verdict(ok, parts.join(", "))
}

/// Per state: worst-case gap to the small-angle law at every grid angle,
/// for each of `P₀…P₃`, over 20 axes.
fn small_angle_gaps(state: &SpinState, axes: &[[f64; 3]]) -> [Vec<f64>; 4] {
    let b = optimal_basis(state).unwrap();
    let thetas = grid();
    let mut gaps: [Vec<f64>; 4] = Default::default();
    for g in gaps.iter_mut() {
        *g = vec![0.0; thetas.len()];
    }
    for (ti, &t) in thetas.iter().enumerate() {
        for u in axes {
            let exact = exact_probabilities(state, &b, &RotationParams::from_axis(t, *u).unwrap()).unwrap();
            let approx = small_angle_probabilities(state.spin(), t, *u).unwrap();
            for mu in 0..4 {
                gaps[mu][ti] = f64::max(gaps[mu][ti], (exact.p[mu] - approx.p[mu]).abs());
            }
        }
    }
    gaps
}

fn axes() -> Vec<[f64; 3]> {
    let mut r = rng(4);
    (0..20).map(|_| r.unit_vector()).collect()
}

fn c4() -> Verdict {
    let thetas = grid();
    let axes = axes();
    let mut ok = true;
    let mut notes = Vec::new();
    let mut min_slope = f64::INFINITY;
    let mut max_c = 0.0f64;
    for (name, s) in [("tetra2", tetra2()), ("balance", balance()), ("tetra1", tetra1())] {
        let gaps = small_angle_gaps(&s, &axes);
        let mut line = format!("{name}:");
        for (mu, g) in gaps.iter().enumerate() {
            let k = slope(&thetas, g);
            let c = thetas.iter().zip(g).map(|(t, x)| x / t.powi(3)).fold(0.0, f64::max);
            ok &= k >= MIN_SLOPE;
            min_slope = min_slope.min(k);
            max_c = max_c.max(c);
            line.push_str(&format!(" P{mu} slope {k:.3} C {c:.3};"));
        }
        notes.push(line);
    }
    Verdict {
        pass: ok,
        detail: format!("min log-log slope {min_slope:.3} (≥ {MIN_SLOPE}), max gap/θ₁³ {max_c:.3}, 20 angles × 20 axes"),
        notes,
    }
}

fn c5() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, s, target) in [("tetra2", tetra2(), 8.0), ("balance", balance(), 16.0)] {
        let b = optimal_basis(&s).unwrap();
        let f = classical_fisher(&s, &b, &RotationParams::new(1e-3, 0.0, 0.0), 1).unwrap();
        let rel = (f / target - 1.0).abs();
        ok &= rel <= CLASSICAL_FISHER_REL;
        parts.push(format!("{name} F = {f:.4}"));
        let r = multiparam_saturation_check(&s, &RotationParams::new(0.02, 1.0, 0.5)).unwrap();
        let ratios: Vec<String> = r.entries.iter().map(|e| format!("{:.4}", e.ratio)).collect();
        ok &= r
            .entries
            .iter()
            .all(|e| (SATURATION_BAND.0..=SATURATION_BAND.1).contains(&e.ratio));
        parts.push(format!("F/Q [{}]", ratios.join(", ")));
    }
    verdict(ok, parts.join(", "))
}

fn c6() -> Verdict {
    let bp = decompose_spin_state(&tetra2()).unwrap();
    let s3 = 1.0 / 3f64.sqrt();
    let expected = [
        ([0u8, 0], C64::new(0.5, 0.5 * s3)),
        ([3, 3], C64::new(-0.5, 0.5 * s3)),
        ([1, 1], C64::new(0.0, -s3)),
    ];
    let mut worst = 0.0f64;
    for (labels, a) in bp.iter() {
        let e = expected
            .iter()
            .find(|(l, _)| l[..] == labels[..])
            .map(|(_, a)| *a)
            .unwrap_or(C64::new(0.0, 0.0));
        worst = worst.max((a - e).norm());
    }
    let report = verify_tabulated_decompositions().unwrap();
    let n4 = report.all_pass_for(4);
    let min4 = report
        .entries
        .iter()
        .filter(|e| e.n_photons == 4)
        .map(|e| e.fidelity)
        .fold(1.0, f64::min);
    let mut notes = Vec::new();
    for e in report.failures() {
        let coeffs: Vec<String> = e
            .recomputed
            .as_ref()
            .map(|v| {
                v.iter()
                    .map(|c| format!("{} {:+.4}{:+.4}i", c.tuple, c.re, c.im))
                    .collect()
            })
            .unwrap_or_default();
        notes.push(format!(
            "N={} ψ{}: tabulated fidelity {:.4} against {}; oracle coefficients: {}",
            e.n_photons,
            e.index,
            e.fidelity,
            e.reference,
            coeffs.join(", ")
        ));
    }
    let itemized = report.failures().all(|e| e.n_photons == 6 && e.recomputed.is_some());
    Verdict {
        pass: worst <= COEFF_TOL && n4 && itemized,
        detail: format!(
            "tetra2 max coefficient error {worst:.1e}; N=4 min fidelity {min4:.12} (≥ 1 − {FIDELITY_SLACK:.0e}); {} N=6 discrepancies itemized",
            report.failures().count()
        ),
        notes,
    }
}

fn c7() -> Verdict {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for s in [tetra2(), balance()] {
        for _ in 0..100 {
            let bp = decompose_spin_state(&rotated(&s, &r.params())).unwrap();
            worst = worst.max(bp.singlet_weight());
        }
    }
    verdict(
        worst <= SINGLET_TOL,
        format!("max singlet weight {worst:.1e} over 200 rotations (tol {SINGLET_TOL:.0e})"),
    )
}

fn c8() -> Verdict {
    let axes = axes();
    let mut worst_c = 0.0f64;
    for s in [tetra2(), balance()] {
        let b = optimal_basis(&s).unwrap();
        let n = s.spin().photons();
        for &t in &grid() {
            for u in &axes {
                let p = RotationParams::from_axis(t, *u).unwrap();
                let exact = exact_probabilities(&s, &b, &p).unwrap();
                let agg = aggregate_with_rest(&decompose_spin_state(&rotated(&s, &p)).unwrap(), n).unwrap();
                for mu in 0..4 {
                    worst_c = worst_c.max((agg[mu] - exact.p[mu]).abs() / t.powi(3));
                }
            }
        }
    }
    verdict(
        worst_c <= CUBIC_C,
        format!("max |P_bell − P_exact|/θ₁³ = {worst_c:.1e} (C = {CUBIC_C}) for tetra2 and balance"),
    )
}

fn c9() -> Verdict {
    let threads = threads_from_env().unwrap();
    let n = 1_000_000u64;
    let u = [0.48, 0.6, 0.64];
    let p = RotationParams::from_axis(0.05, u).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    for (name, s, pred) in [
        ("N=4", tetra2(), 1.0 / (2.0 * (2.0 * n as f64).sqrt())),
        ("N=6", balance(), 1.0 / (4.0 * (n as f64).sqrt())),
    ] {
        let opt = qcrb_parallel(&s, &p, n, 200, SEED, Pipeline::Optimal, threads).unwrap().report;
        let bell = qcrb_parallel(&s, &p, n, 200, SEED, Pipeline::Bell, threads).unwrap().report;
        let ratio = opt.sigma_emp / pred;
        let agree = (bell.sigma_emp / opt.sigma_emp - 1.0).abs();
        ok &= (SIGMA_BAND.0..=SIGMA_BAND.1).contains(&ratio) && agree <= PIPELINE_REL;
        ok &= (bell.sigma_emp / pred >= SIGMA_BAND.0) && (bell.sigma_emp / pred <= SIGMA_BAND.1);
        parts.push(format!("{name} σ/σ_pred {ratio:.4}, bell/optimal − 1 = {agree:.1e}"));
        notes.push(format!(
            "{name}: mean θ̂₁ {:.5}, σ_emp {:.4e} (optimal) {:.4e} (bell), σ_pred {pred:.4e}, mean |û| [{:.4}, {:.4}, {:.4}]",
            opt.mean_theta1_hat, opt.sigma_emp, bell.sigma_emp, opt.mean_u_hat_abs[0], opt.mean_u_hat_abs[1], opt.mean_u_hat_abs[2]
        ));
    }
    Verdict {
        pass: ok,
        detail: parts.join("; "),
        notes,
    }
}

/// Sample covariance matrix of the count vectors.
fn sample_cov(reps: &[Vec<u64>]) -> Vec<Vec<f64>> {
    let k = reps[0].len();
    let m = reps.len() as f64;
    let mean: Vec<f64> = (0..k)
        .map(|i| reps.iter().map(|r| r[i] as f64).sum::<f64>() / m)
        .collect();
    let mut cov = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            cov[i][j] = reps
                .iter()
                .map(|r| (r[i] as f64 - mean[i]) * (r[j] as f64 - mean[j]))
                .sum::<f64>()
                / (m - 1.0);
        }
    }
    cov
}

fn c10() -> Verdict {
    let u = [0.48, 0.6, 0.64];
    let p = RotationParams::from_axis(0.05, u).unwrap();
    let d4 = exact_probabilities(&tetra2(), &optimal_basis(&tetra2()).unwrap(), &p).unwrap();
    let d6 = exact_probabilities(&balance(), &optimal_basis(&balance()).unwrap(), &p).unwrap();
    let settings: Vec<(String, Vec<f64>, u64)> = vec![
        ("tetra2 θ₁=0.05".into(), d4.p.to_vec(), 10_000),
        ("balance θ₁=0.05".into(), d6.p.to_vec(), 10_000),
        ("(0.5, 0.3, 0.2)".into(), vec![0.5, 0.3, 0.2, 0.0, 0.0], 500),
    ];
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut compared = 0;
    let mut notes = Vec::new();
    for (si, (name, probs, n)) in settings.iter().enumerate() {
        let stats = multinomial_stats(probs, *n);
        let sampler = CategoricalSampler::new(probs).unwrap();
        let reps: Vec<Vec<u64>> = (0..1000)
            .map(|r| sampler.sample(&mut trial_rng(SEED + 10 + si as u64, r), *n))
            .collect();
        let cov = sample_cov(&reps);
        let mut local = 0.0f64;
        for i in 0..probs.len() {
            // Only moments with at least ten expected events per repetition are resolved.
            if stats.var[i] >= 10.0 {
                local = local.max((cov[i][i] / stats.var[i] - 1.0).abs());
                compared += 1;
            }
            for j in 0..probs.len() {
                let corr = stats.cov[i][j] / (stats.var[i] * stats.var[j]).sqrt();
                if i != j && stats.var[i] >= 10.0 && stats.var[j] >= 10.0 && corr.abs() >= 0.2 {
                    local = local.max((cov[i][j] / stats.cov[i][j] - 1.0).abs());
                    compared += 1;
                }
            }
        }
        // Var(χ₀ + χ_rest) through the linear-combination formula.
        let a: Vec<f64> = (0..probs.len()).map(|i| if i == 0 || i == 4 { 1.0 } else { 0.0 }).collect();
        let analytic = stats.linear_combination_variance(&a);
        let emp: f64 = (0..probs.len())
            .flat_map(|i| (0..probs.len()).map(move |j| (i, j)))
            .map(|(i, j)| a[i] * a[j] * cov[i][j])
            .sum();
        local = local.max((emp / analytic - 1.0).abs());
        ok &= local <= MOMENT_REL;
        worst = worst.max(local);
        notes.push(format!("{name}, n={n}: worst relative moment error {local:.3}"));
    }

    // Var(χ₀₀ + χ₃₃ + χ₁₁) ≈ 2nθ₁² for tetra2 about z, analytic on the grid.
    let z = RotationParams::new(0.0, 0.0, 0.0);
    let mut chain_c = 0.0f64;
    for &t in &grid() {
        let q = RotationParams::new(t, z.theta2, z.theta3);
        let agg = aggregate_with_rest(&decompose_spin_state(&rotated(&tetra2(), &q)).unwrap(), 4).unwrap();
        let v = multinomial_stats(&agg, 1).sum_variance(&[0, 4]);
        chain_c = chain_c.max((v - 2.0 * t * t).abs() / t.powi(3));
    }
    ok &= chain_c <= CUBIC_C;

    // The same aggregate from sampled Bell-pair counts at θ₁ = 0.05.
    let n = 10_000u64;
    let q = RotationParams::new(0.05, 0.0, 0.0);
    let plan = QcrbPlan::new(&tetra2(), &q, n, Pipeline::Bell).unwrap();
    let records = run_trials(&plan, 1000, SEED + 20, threads_from_env().unwrap()).unwrap();
    let sums: Vec<f64> = records.iter().map(|r| (r.counts[0] + r.counts[4]) as f64).collect();
    let m = sums.iter().sum::<f64>() / sums.len() as f64;
    let emp = sums.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (sums.len() - 1) as f64;
    let target = 2.0 * n as f64 * 0.05f64.powi(2);
    let chain_rel = (emp / target - 1.0).abs();
    ok &= chain_rel <= MOMENT_REL;
    notes.push(format!(
        "Bell aggregate at θ₁=0.05, n={n}: empirical Var {emp:.2} vs 2nθ₁² = {target:.2}"
    ));
    Verdict {
        pass: ok,
        detail: format!(
            "{compared} moments, worst relative error {worst:.3} (≤ {MOMENT_REL}); |Var/n − 2θ₁²|/θ₁³ ≤ {chain_c:.2} (C = {CUBIC_C}); sampled chain error {chain_rel:.3}"
        ),
        notes,
    }
}

fn c11() -> Verdict {
    let ids = gate_identity_checks();
    let worst_id = ids.iter().map(|c| c.error).fold(0.0, f64::max);
    let mut notes = Vec::new();
    for p in verify_prep_circuits().unwrap() {
        notes.push(format!(
            "prep {}{}: {} gates, fidelity {:.6}{}",
            p.name,
            p.reading.map(|r| format!(" ({r:?})")).unwrap_or_default(),
            p.gate_count,
            p.fidelity,
            if p.erratum { " [erratum]" } else { "" }
        ));
    }
    let a = analyze_bell_analyzer().unwrap();
    for r in &a.rows {
        let support: Vec<String> = r.support.iter().map(|o| format!("{o:04b}")).collect();
        notes.push(format!(
            "analyzer {}φ{} → {{{}}}",
            if r.x_mapped { "X·" } else { "" },
            r.label,
            support.join(", ")
        ));
    }
    let tv_ok = a
        .symmetric_pairs
        .iter()
        .all(|p| (p.total_variation - 1.0).abs() <= DISJOINT_TV_TOL);
    let pass = worst_id <= IDENTITY_TOL && a.symmetric_disjoint && tv_ok && a.singlet_disjoint;
    Verdict {
        pass,
        detail: format!(
            "worst identity error {worst_id:.1e}; symmetric inputs disjoint: {}; singlet disjoint: {}",
            a.symmetric_disjoint, a.singlet_disjoint
        ),
        notes,
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "Fisher bound N=4", s(1), c1),
        run(2, "Fisher bound N=6", s(1), c2),
        run(3, "anti-coherence certification", s(1), c3),
        run(4, "small-angle law", s(5), c4),
        run(5, "classical Fisher saturation", s(5), c5),
        run(6, "Bell decomposition exactness", s(5), c6),
        run(7, "singlet exclusion", s(10), c7),
        run(8, "aggregation equivalence", s(10), c8),
        run(9, "Monte Carlo Cramér-Rao bound", s(60), c9),
        run(10, "multinomial algebra", s(30), c10),
        run(11, "circuit diagnostics", s(5), c11),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
