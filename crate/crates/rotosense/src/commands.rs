//! One report type and one function per CLI command.

use anyhow::{Context, Result};
use rotosense_core::bell::{
    aggregate_with_rest, decompose_spin_state, grouping_leakage, verify_tabulated_decompositions,
    BellProductAmplitudes, DecompositionReport,
};
use rotosense_core::circuit::{
    analyze_bell_analyzer, fidelity, gate_identity_checks, outcome_distribution, run_circuit,
    verify_prep_circuits, AnalyzerReport, IdentityCheck, PrepReport,
};
use rotosense_core::estimation::{Pipeline, QcrbReport, TrialRecord};
use rotosense_core::measurement::{
    exact_probabilities, optimal_basis, small_angle_probabilities, ANTICOHERENCE_TOL, CATEGORIES,
};
use rotosense_core::metrology::{
    anticoherence_report, fisher_single, j_expectations, qfi_matrix, qfi_matrix_anticoherent,
    AnticoherenceReport, JExpectations, QfiMatrix,
};
use rotosense_core::spin::{dicke_to_qubit, rotation_unitary};
use rotosense_core::{QubitState, RotationParams, SpinState};
use serde::Serialize;

use crate::config::{Command, Format, PipelineChoice, RunConfig};
use crate::formats::{csv_string, load_circuit, load_state, num, opt_num, CircuitFile, StateFile};
use crate::runner::{qcrb_parallel, threads_from_env};

/// Tolerance of the anti-coherence flag in `fisher` reports.
pub const FISHER_ANTICOHERENCE_TOL: f64 = ANTICOHERENCE_TOL;

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct FisherReport {
    pub state: String,
    pub j: f64,
    pub params: RotationParams,
    pub axis: [f64; 3],
    pub fisher_single: f64,
    pub qfi: QfiMatrix,
    /// `4J(J+1)/3 · 𝔊𝔊ᵀ`, only meaningful for anti-coherent states.
    pub qfi_anticoherent_formula: QfiMatrix,
    pub expectations: JExpectations,
    pub anticoherence: AnticoherenceReport,
}

pub fn fisher(cfg: &RunConfig) -> Result<FisherReport> {
    let sel = cfg.state_or_default();
    let s = load_state(&sel)?;
    let p = cfg.params();
    Ok(FisherReport {
        state: sel.to_string(),
        j: s.spin().j(),
        params: p,
        axis: p.axis(),
        fisher_single: fisher_single(&s, p.axis())?,
        qfi: qfi_matrix(&s, &p),
        qfi_anticoherent_formula: qfi_matrix_anticoherent(s.spin(), &p),
        expectations: j_expectations(&s),
        anticoherence: anticoherence_report(&s, FISHER_ANTICOHERENCE_TOL),
    })
}

impl FisherReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut rows = vec![
            ("J".to_string(), num(self.j)),
            ("fisher_single".to_string(), num(self.fisher_single)),
        ];
        for i in 0..3 {
            for j in 0..3 {
                rows.push((format!("Q{}{}", i + 1, j + 1), num(self.qfi.0[i][j])));
            }
        }
        rows.push(("anticoherent".into(), self.anticoherence.pass.to_string()));
        rows.push(("anticoherence_deviation".into(), num(self.anticoherence.deviations.worst())));
        csv_string(&["quantity", "value"], rows.into_iter().map(|(a, b)| [a, b]))
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ProbabilityRow {
    pub theta1: f64,
    /// `[P₀, P₁, P₂, P₃, P_rest]`
    pub exact: [f64; CATEGORIES],
    pub small_angle: [f64; CATEGORIES],
    /// Bell-pair outcomes aggregated into the same categories.
    pub bell: Option<[f64; CATEGORIES]>,
    /// Largest `|exact − small_angle|` over the categories.
    pub gap: f64,
    pub bell_gap: Option<f64>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ProbabilityReport {
    pub state: String,
    pub j: f64,
    pub axis: [f64; 3],
    /// Largest weight of the projectors outside their Bell grouping;
    /// absent when the photon number has no grouping.
    pub grouping_leakage: Option<f64>,
    pub rows: Vec<ProbabilityRow>,
}

/// `points` angles evenly spaced from 0 to θ₁.
pub fn sweep(theta1: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![theta1];
    }
    (0..points)
        .map(|i| theta1 * i as f64 / (points - 1) as f64)
        .collect()
}

pub fn probabilities(cfg: &RunConfig) -> Result<ProbabilityReport> {
    let sel = cfg.state_or_default();
    let s = load_state(&sel)?;
    let basis = optimal_basis(&s).context("probabilities need an anti-coherent state")?;
    let p = cfg.params();
    let u = p.axis();
    let photons = s.spin().photons();
    let grouped = matches!(photons, 4 | 6);
    let mut rows = Vec::with_capacity(cfg.points);
    for t in sweep(p.theta1, cfg.points) {
        let q = RotationParams::new(t, p.theta2, p.theta3);
        let exact = exact_probabilities(&s, &basis, &q)?;
        let small = small_angle_probabilities(s.spin(), t, u)?;
        let bell = if grouped {
            let rotated = s.evolve(&rotation_unitary(s.spin(), &q));
            Some(aggregate_with_rest(&decompose_spin_state(&rotated)?, photons)?)
        } else {
            None
        };
        let bell_gap = bell.map(|b| (0..CATEGORIES).fold(0.0, |m, i| f64::max(m, (b[i] - exact.p[i]).abs())));
        rows.push(ProbabilityRow {
            theta1: t,
            exact: exact.p,
            small_angle: small.p,
            bell,
            gap: exact.max_gap(&small),
            bell_gap,
        });
    }
    Ok(ProbabilityReport {
        state: sel.to_string(),
        j: s.spin().j(),
        axis: u,
        grouping_leakage: if grouped { Some(grouping_leakage(&s)?) } else { None },
        rows,
    })
}

impl ProbabilityReport {
    pub fn to_csv(&self) -> Result<String> {
        let header = [
            "theta1", "p0", "p1", "p2", "p3", "p_rest", "sa_p0", "sa_p1", "sa_p2", "sa_p3", "sa_p_rest",
            "bell_p0", "bell_p1", "bell_p2", "bell_p3", "bell_p_rest", "gap", "bell_gap",
        ];
        let rows = self.rows.iter().map(|r| {
            let mut v = vec![num(r.theta1)];
            v.extend(r.exact.iter().map(|&x| num(x)));
            v.extend(r.small_angle.iter().map(|&x| num(x)));
            v.extend((0..CATEGORIES).map(|i| opt_num(r.bell.map(|b| b[i]))));
            v.push(num(r.gap));
            v.push(opt_num(r.bell_gap));
            v
        });
        csv_string(&header, rows)
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct BuiltinCircuitReport {
    pub identities: Vec<IdentityCheck>,
    pub identities_pass: bool,
    pub preparation: Vec<PrepReport>,
    pub analyzer: AnalyzerReport,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct UserCircuitReport {
    pub circuit: CircuitFile,
    pub gate_count: usize,
    /// Output state on `|0…0⟩`.
    pub output: Vec<[f64; 2]>,
    /// Distribution over the measured qubits.
    pub probabilities: Vec<f64>,
    pub norm_error: f64,
    /// Against the Dicke encoding of `--state`, when given.
    pub target: Option<String>,
    pub fidelity: Option<f64>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum CircuitReport {
    Builtin(BuiltinCircuitReport),
    User(UserCircuitReport),
}

/// Gate identities hold to this accuracy.
pub const IDENTITY_TOL: f64 = 1e-12;

pub fn circuit_verify(cfg: &RunConfig) -> Result<CircuitReport> {
    let Some(path) = &cfg.circuit else {
        let identities = gate_identity_checks();
        return Ok(CircuitReport::Builtin(BuiltinCircuitReport {
            identities_pass: identities.iter().all(|c| c.error <= IDENTITY_TOL),
            identities,
            preparation: verify_prep_circuits()?,
            analyzer: analyze_bell_analyzer()?,
        }));
    };
    let circuit = load_circuit(path)?;
    let out = run_circuit(&circuit, &QubitState::zero(circuit.n_qubits())?)?;
    let (target, fid) = match &cfg.state {
        Some(sel) => {
            let t = dicke_to_qubit(&load_state(sel)?)?;
            (Some(sel.to_string()), Some(fidelity(&out, &t).context("target and circuit sizes differ")?))
        }
        None => (None, None),
    };
    Ok(CircuitReport::User(UserCircuitReport {
        circuit: CircuitFile::from_circuit(&circuit),
        gate_count: circuit.gate_count(),
        output: out.amps().iter().map(|a| [a.re, a.im]).collect(),
        probabilities: outcome_distribution(&circuit, &out),
        norm_error: (out.norm_sqr() - 1.0).abs(),
        target,
        fidelity: fid,
    }))
}

impl CircuitReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut rows: Vec<[String; 3]> = Vec::new();
        match self {
            Self::Builtin(b) => {
                for c in &b.identities {
                    rows.push(["identity".into(), c.name.clone(), num(c.error)]);
                }
                for p in &b.preparation {
                    let name = match p.reading {
                        Some(r) => format!("{} {:?}", p.name, r),
                        None => p.name.clone(),
                    };
                    rows.push(["fidelity".into(), name, num(p.fidelity)]);
                }
                for r in &b.analyzer.rows {
                    let name = format!("{}phi{}", if r.x_mapped { "X·" } else { "" }, r.label);
                    let support: Vec<String> = r.support.iter().map(|o| format!("{o:04b}")).collect();
                    rows.push(["support".into(), name, support.join(" ")]);
                }
                for p in b.analyzer.symmetric_pairs.iter().chain(&b.analyzer.singlet_pairs) {
                    rows.push(["total_variation".into(), format!("{} | {}", p.a, p.b), num(p.total_variation)]);
                }
            }
            Self::User(u) => {
                for (i, p) in u.probabilities.iter().enumerate() {
                    rows.push(["probability".into(), i.to_string(), num(*p)]);
                }
                if let Some(f) = u.fidelity {
                    rows.push(["fidelity".into(), u.target.clone().unwrap_or_default(), num(f)]);
                }
            }
        }
        csv_string(&["section", "item", "value"], rows)
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub report: QcrbReport,
    pub records: Vec<TrialRecord>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct EstimateOutput {
    pub state: String,
    pub runs: Vec<PipelineRun>,
    /// `σ_emp(bell)/σ_emp(optimal)` when both pipelines ran.
    pub bell_over_optimal: Option<f64>,
}

pub fn estimate(cfg: &RunConfig) -> Result<EstimateOutput> {
    let sel = cfg.state_or_default();
    let s = load_state(&sel)?;
    estimate_state(&s, sel.to_string(), cfg)
}

pub fn estimate_state(s: &SpinState, name: String, cfg: &RunConfig) -> Result<EstimateOutput> {
    let pipelines: &[Pipeline] = match cfg.pipeline {
        PipelineChoice::Optimal => &[Pipeline::Optimal],
        PipelineChoice::Bell => &[Pipeline::Bell],
        PipelineChoice::Both => &[Pipeline::Optimal, Pipeline::Bell],
    };
    let threads = threads_from_env()?;
    let p = cfg.params();
    let mut runs = Vec::new();
    for &pl in pipelines {
        let run = qcrb_parallel(s, &p, cfg.n, cfg.trials, cfg.seed, pl, threads)
            .with_context(|| format!("{} pipeline", pl.name()))?;
        runs.push(PipelineRun {
            report: run.report,
            records: run.records,
        });
    }
    let bell_over_optimal = match runs.as_slice() {
        [a, b] => Some(b.report.sigma_emp / a.report.sigma_emp),
        _ => None,
    };
    Ok(EstimateOutput {
        state: name,
        runs,
        bell_over_optimal,
    })
}

impl EstimateOutput {
    /// Per-trial rows; a leading `pipeline` column appears when more than
    /// one pipeline ran.
    pub fn to_csv(&self) -> Result<String> {
        let multi = self.runs.len() > 1;
        let mut header = vec!["trial", "theta1_hat", "u1_hat", "u2_hat", "u3_hat"];
        if multi {
            header.insert(0, "pipeline");
        }
        let rows = self.runs.iter().flat_map(|run| {
            run.records.iter().map(move |r| {
                let mut v = Vec::with_capacity(6);
                if multi {
                    v.push(run.report.pipeline.name().to_string());
                }
                v.push(r.trial.to_string());
                v.push(num(r.theta1_hat));
                v.extend(r.u_hat_abs.iter().map(|&x| if r.degenerate { String::new() } else { num(x) }));
                v
            })
        });
        csv_string(&header, rows)
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct DecomposeReport {
    pub state: String,
    pub params: RotationParams,
    /// The rotated state that was expanded.
    pub rotated: StateFile,
    pub bell: BellProductAmplitudes,
    pub singlet_weight: f64,
    pub aggregated: Option<[f64; CATEGORIES]>,
    pub tabulated: DecompositionReport,
}

pub fn decompose(cfg: &RunConfig) -> Result<DecomposeReport> {
    let sel = cfg.state_or_default();
    let s = load_state(&sel)?;
    let p = cfg.params();
    let rotated = s.evolve(&rotation_unitary(s.spin(), &p));
    let bell = decompose_spin_state(&rotated)?;
    let photons = s.spin().photons();
    let aggregated = if matches!(photons, 4 | 6) {
        Some(aggregate_with_rest(&bell, photons)?)
    } else {
        None
    };
    Ok(DecomposeReport {
        state: sel.to_string(),
        params: p,
        rotated: StateFile::from_spin_state(&rotated),
        singlet_weight: bell.singlet_weight(),
        bell,
        aggregated,
        tabulated: verify_tabulated_decompositions()?,
    })
}

impl DecomposeReport {
    pub fn to_csv(&self) -> Result<String> {
        let rows = self.bell.iter().map(|(labels, a)| {
            [
                rotosense_core::bell::tuple_key(&labels),
                num(a.re),
                num(a.im),
                num(a.norm_sqr()),
            ]
        });
        csv_string(&["tuple", "re", "im", "probability"], rows)
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Runs the configured command and renders its report.
pub fn execute(cfg: &RunConfig) -> Result<String> {
    let csv = cfg.format == Format::Csv;
    match cfg.command {
        Command::Fisher => {
            let r = fisher(cfg)?;
            if csv { r.to_csv() } else { json(&r) }
        }
        Command::Probabilities => {
            let r = probabilities(cfg)?;
            if csv { r.to_csv() } else { json(&r) }
        }
        Command::CircuitVerify => {
            let r = circuit_verify(cfg)?;
            if csv { r.to_csv() } else { json(&r) }
        }
        Command::Estimate => {
            let r = estimate(cfg)?;
            if csv { r.to_csv() } else { json(&r) }
        }
        Command::Decompose => {
            let r = decompose(cfg)?;
            if csv { r.to_csv() } else { json(&r) }
        }
    }
}
