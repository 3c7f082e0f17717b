//! A statevector simulator for small registers and the preparation and
//! Bell-analysis circuits.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::Serialize;

use crate::bell::bell_states;
use crate::linalg::{c, re, CMatrix, C64};
use crate::spin::{dicke_to_qubit, QubitState};
use crate::states::{balance, tetra2};
use crate::{Error, Result};

pub type Matrix2 = [[C64; 2]; 2];

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 12;

/// Tolerance on `‖M†M − I‖` for custom gates.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    H,
    X,
    Z,
    S,
    Custom(Matrix2),
}

impl GateOp {
    pub fn matrix(&self) -> Matrix2 {
        let z = re(0.0);
        let o = re(1.0);
        match self {
            Self::H => {
                let h = re(core::f64::consts::FRAC_1_SQRT_2);
                [[h, h], [h, -h]]
            }
            Self::X => [[z, o], [o, z]],
            Self::Z => [[o, z], [z, -o]],
            Self::S => [[o, z], [z, c(0.0, 1.0)]],
            Self::Custom(m) => *m,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::H => "H",
            Self::X => "X",
            Self::Z => "Z",
            Self::S => "S",
            Self::Custom(_) => "CUSTOM",
        }
    }
}

fn unitarity_error(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let v = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
            let d = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - re(d)).norm());
        }
    }
    worst
}

/// A 2×2 operation on `target`, conditioned on all `controls` being `|1⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    op: GateOp,
    target: usize,
    controls: Vec<usize>,
}

impl Gate {
    pub fn new(op: GateOp, target: usize, controls: Vec<usize>) -> Result<Self> {
        if let GateOp::Custom(m) = &op {
            let err = unitarity_error(m);
            if !(err <= UNITARITY_TOL) {
                return Err(Error::NonUnitaryGate(err));
            }
        }
        if controls.contains(&target) {
            return Err(Error::OverlappingControls(target));
        }
        for (i, q) in controls.iter().enumerate() {
            if controls[..i].contains(q) {
                return Err(Error::InvalidArgument(format!("control {q} listed twice")));
            }
        }
        Ok(Self {
            op,
            target,
            controls,
        })
    }

    pub fn single(op: GateOp, target: usize) -> Self {
        Self::new(op, target, Vec::new()).expect("uncontrolled standard gate")
    }

    pub fn controlled(op: GateOp, controls: &[usize], target: usize) -> Self {
        Self::new(op, target, controls.to_vec()).expect("valid controlled gate")
    }

    pub fn op(&self) -> &GateOp {
        &self.op
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    fn max_qubit(&self) -> usize {
        self.controls.iter().copied().fold(self.target, usize::max)
    }

    /// Short label such as `CCX(2,3→1)`.
    pub fn label(&self) -> String {
        let mut s = String::new();
        for _ in 0..self.controls.len().min(2) {
            s.push('C');
        }
        if self.controls.len() > 2 {
            s = format!("C{}", self.controls.len());
        }
        s.push_str(self.op.name());
        if self.controls.is_empty() {
            format!("{s}({})", self.target)
        } else {
            let cs: Vec<String> = self.controls.iter().map(|q| format!("{q}")).collect();
            format!("{s}({}→{})", cs.join(","), self.target)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    measure: Option<Vec<usize>>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "register size {n_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        for g in &gates {
            let q = g.max_qubit();
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        Ok(Self {
            n_qubits,
            gates,
            measure: None,
        })
    }

    /// Restrict the reported measurement to these qubits.
    pub fn with_measure(mut self, qubits: Vec<usize>) -> Result<Self> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        self.measure = Some(qubits);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measure(&self) -> Option<&[usize]> {
        self.measure.as_deref()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

pub fn run_circuit(circuit: &Circuit, input: &QubitState) -> Result<QubitState> {
    if input.n_qubits() != circuit.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits,
            found: input.n_qubits(),
        });
    }
    let mut s = input.clone();
    for g in &circuit.gates {
        s.apply_single_qubit(g.target, &g.op.matrix(), &g.controls);
    }
    Ok(s)
}

/// The full unitary, column `j` being the image of `|j⟩`.
pub fn circuit_unitary(circuit: &Circuit) -> CMatrix {
    let d = 1usize << circuit.n_qubits;
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        let e = QubitState::basis(circuit.n_qubits, j).expect("index in range");
        let out = run_circuit(circuit, &e).expect("matching size");
        for (i, a) in out.amps().iter().enumerate() {
            m[(i, j)] = *a;
        }
    }
    m
}

/// Outcome probabilities over the measured qubits (all qubits by default),
/// indexed with the first measured qubit as the most significant bit.
pub fn outcome_distribution(circuit: &Circuit, output: &QubitState) -> Vec<f64> {
    let n = output.n_qubits();
    match circuit.measure() {
        None => output.probabilities(),
        Some(qs) => {
            let mut p = vec![0.0; 1 << qs.len()];
            for (i, a) in output.amps().iter().enumerate() {
                let k = qs
                    .iter()
                    .fold(0, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1));
                p[k] += a.norm_sqr();
            }
            p
        }
    }
}

pub fn fidelity(a: &QubitState, b: &QubitState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.inner(b).norm_sqr().min(1.0))
}

/// `U1`, `U2`, `U` and `S` as used by the circuits below.
pub fn named_gate(name: &str) -> Result<GateOp> {
    let r2 = 2f64.sqrt();
    let r3 = 3f64.sqrt();
    let op = match name {
        "S" => GateOp::S,
        "U1" => {
            let k = 1.0 / r3;
            GateOp::Custom([[c(0.0, k), re(-r2 * k)], [re(r2 * k), c(0.0, -k)]])
        }
        "U2" => {
            let k = 1.0 / (2.0 * r2);
            GateOp::Custom([
                [c(r3 * k, k), c(-r3 * k, -k)],
                [c(r3 * k, -k), c(r3 * k, -k)],
            ])
        }
        "U" => {
            let k = 1.0 / r3;
            GateOp::Custom([[re(k), re(-r2 * k)], [re(r2 * k), re(k)]])
        }
        other => return Err(Error::UnknownGate(String::from(other))),
    };
    if let GateOp::Custom(m) = &op {
        let err = unitarity_error(m);
        if !(err <= UNITARITY_TOL) {
            return Err(Error::NonUnitaryGate(err));
        }
    }
    Ok(op)
}

fn g(op: GateOp, t: usize) -> Gate {
    Gate::single(op, t)
}

fn cg(op: GateOp, controls: &[usize], t: usize) -> Gate {
    Gate::controlled(op, controls, t)
}

fn named(name: &str) -> GateOp {
    named_gate(name).expect("built-in gate")
}

pub const TETRA_PREP_GATE_COUNT: usize = 11;

/// Four-qubit circuit preparing the symmetric expansion of `tetra2`.
pub fn circuit_tetra_prep() -> Circuit {
    use GateOp::*;
    let gates = vec![
        g(H, 0),
        g(named("U1"), 2),
        cg(X, &[0], 1),
        cg(named("U2"), &[2], 3),
        cg(Z, &[2, 3], 1),
        g(X, 2),
        g(X, 3),
        cg(X, &[2, 3], 1),
        g(X, 3),
        g(H, 3),
        cg(X, &[3], 2),
    ];
    Circuit::new(4, gates).expect("static circuit")
}

/// Readings of the two crowded columns of the six-qubit preparation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum N6Reading {
    /// `CCX(4,5→2)`, `H(3)`
    A,
    /// `CCX(4,5→2)`, `CCH(4,5→3)`, `C3X(3,4,5→2)`
    C,
    /// `CCX(4,5→2)`, `H(3)`, `C3X(3,4,5→2)`
    D,
    /// `CCH(4,5→3)`, `C3X(3,4,5→2)`
    E,
}

impl N6Reading {
    pub const ALL: [N6Reading; 4] = [Self::A, Self::C, Self::D, Self::E];

    fn gates(self) -> Vec<Gate> {
        use GateOp::*;
        match self {
            Self::A => vec![cg(X, &[4, 5], 2), g(H, 3)],
            Self::C => vec![cg(X, &[4, 5], 2), cg(H, &[4, 5], 3), cg(X, &[3, 4, 5], 2)],
            Self::D => vec![cg(X, &[4, 5], 2), g(H, 3), cg(X, &[3, 4, 5], 2)],
            Self::E => vec![cg(H, &[4, 5], 3), cg(X, &[3, 4, 5], 2)],
        }
    }
}

/// Six-qubit preparation targeting the symmetric expansion of `balance`,
/// using the reading with the highest fidelity.
pub fn circuit_n6_prep() -> Circuit {
    circuit_n6_prep_with(N6Reading::C)
}

pub fn circuit_n6_prep_with(reading: N6Reading) -> Circuit {
    use GateOp::*;
    let u = named("U");
    let mut gates = vec![
        g(H, 0),
        g(H, 2),
        g(u, 4),
        cg(X, &[0], 1),
        cg(X, &[2], 3),
        cg(H, &[4], 5),
        cg(X, &[2, 4, 5], 1),
        cg(X, &[2, 4, 5], 3),
    ];
    gates.extend(reading.gates());
    gates.extend([
        g(X, 4),
        cg(Z, &[2, 4, 5], 1),
        cg(X, &[2, 4, 5], 3),
        cg(H, &[4, 5], 2),
        cg(X, &[2, 4, 5], 3),
        g(X, 4),
        g(X, 5),
        cg(X, &[2, 4, 5], 1),
        cg(X, &[4, 5], 2),
        cg(Z, &[2, 4, 5], 1),
        cg(H, &[4, 5], 3),
        cg(X, &[3, 4, 5], 2),
        g(X, 4),
        g(H, 5),
        cg(X, &[5], 4),
    ]);
    Circuit::new(6, gates).expect("static circuit")
}

/// Polarization qubits 0, 1 and path qubits 2, 3 (`|u⟩ = |0⟩`,
/// `|d⟩ = |1⟩`).
pub fn circuit_bell_analyzer() -> Circuit {
    use GateOp::*;
    let gates = vec![
        cg(X, &[0], 1),
        g(H, 2),
        g(X, 3),
        g(H, 0),
        cg(X, &[2], 3),
        cg(S, &[0], 1),
        cg(X, &[0], 2),
        cg(Z, &[1], 3),
        g(X, 1),
        cg(H, &[1], 0),
        g(X, 1),
        cg(X, &[0], 1),
    ];
    Circuit::new(4, gates).expect("static circuit")
}

/// `φ_l ⊗ |ud⟩`, optionally with `X` applied to the first polarization
/// qubit beforehand.
pub fn bell_analyzer_input(label: u8, x_mapped: bool) -> Result<QubitState> {
    let mut pol = bell_states()
        .get(label as usize)
        .cloned()
        .ok_or_else(|| Error::InvalidArgument(format!("Bell label {label} out of range")))?;
    if x_mapped {
        pol.apply_single_qubit(0, &GateOp::X.matrix(), &[]);
    }
    let ud = QubitState::basis(2, 0b01)?;
    Ok(pol.tensor(&ud))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepReport {
    pub name: String,
    pub n_qubits: usize,
    pub gate_count: usize,
    pub fidelity: f64,
    pub norm_error: f64,
    pub reading: Option<N6Reading>,
    pub erratum: bool,
}

/// Fidelity of every preparation circuit against its analytic target.
pub fn verify_prep_circuits() -> Result<Vec<PrepReport>> {
    let mut out = Vec::new();
    let mut push = |name: &str, circuit: Circuit, target: QubitState, reading| -> Result<()> {
        let output = run_circuit(&circuit, &QubitState::zero(circuit.n_qubits())?)?;
        let f = fidelity(&output, &target)?;
        out.push(PrepReport {
            name: String::from(name),
            n_qubits: circuit.n_qubits(),
            gate_count: circuit.gate_count(),
            fidelity: f,
            norm_error: (output.norm_sqr() - 1.0).abs(),
            reading,
            erratum: f < 1.0 - 1e-9,
        });
        Ok(())
    };
    push("tetra_prep", circuit_tetra_prep(), dicke_to_qubit(&tetra2())?, None)?;
    let target = dicke_to_qubit(&balance())?;
    for r in N6Reading::ALL {
        push("n6_prep", circuit_n6_prep_with(r), target.clone(), Some(r))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzerRow {
    pub label: u8,
    pub x_mapped: bool,
    /// Outcomes with probability above `1e-10`, as 4-bit indices.
    pub support: Vec<usize>,
    pub probabilities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzerPair {
    pub a: String,
    pub b: String,
    pub total_variation: f64,
    pub shared_outcomes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzerReport {
    pub rows: Vec<AnalyzerRow>,
    /// Pairwise comparisons among the X-mapped symmetric inputs.
    pub symmetric_pairs: Vec<AnalyzerPair>,
    /// The singlet against each unmapped symmetric input.
    pub singlet_pairs: Vec<AnalyzerPair>,
    pub symmetric_disjoint: bool,
    pub singlet_disjoint: bool,
}

pub const SUPPORT_FLOOR: f64 = 1e-10;

fn row_name(r: &AnalyzerRow) -> String {
    if r.x_mapped {
        format!("X·φ{}", r.label)
    } else {
        format!("φ{}", r.label)
    }
}

fn compare(a: &AnalyzerRow, b: &AnalyzerRow) -> AnalyzerPair {
    let tv = 0.5
        * a.probabilities
            .iter()
            .zip(&b.probabilities)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>();
    AnalyzerPair {
        a: row_name(a),
        b: row_name(b),
        total_variation: tv,
        shared_outcomes: a
            .support
            .iter()
            .copied()
            .filter(|o| b.support.contains(o))
            .collect(),
    }
}

/// Outcome table of the Bell analyzer for every Bell input, raw and
/// X-mapped, with the disjointness checks.
pub fn analyze_bell_analyzer() -> Result<AnalyzerReport> {
    let circuit = circuit_bell_analyzer();
    let mut rows = Vec::new();
    for x_mapped in [false, true] {
        for label in 0..4u8 {
            let out = run_circuit(&circuit, &bell_analyzer_input(label, x_mapped)?)?;
            let probabilities = outcome_distribution(&circuit, &out);
            let support = probabilities
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > SUPPORT_FLOOR)
                .map(|(i, _)| i)
                .collect();
            rows.push(AnalyzerRow {
                label,
                x_mapped,
                support,
                probabilities,
            });
        }
    }
    let find = |label: u8, mapped: bool| {
        rows.iter()
            .find(|r| r.label == label && r.x_mapped == mapped)
            .expect("row present")
    };
    let sym = [0u8, 1, 3];
    let mut symmetric_pairs = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            symmetric_pairs.push(compare(find(sym[i], true), find(sym[j], true)));
        }
    }
    let singlet_pairs: Vec<AnalyzerPair> = sym
        .iter()
        .map(|&l| compare(find(2, false), find(l, false)))
        .collect();
    let disjoint = |ps: &[AnalyzerPair]| ps.iter().all(|p| p.shared_outcomes.is_empty());
    Ok(AnalyzerReport {
        symmetric_disjoint: disjoint(&symmetric_pairs),
        singlet_disjoint: disjoint(&singlet_pairs),
        rows,
        symmetric_pairs,
        singlet_pairs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub error: f64,
}

/// `H² = X² = Z² = I`, `S² = Z`, `CNOT² = I`, measured as the largest entry
/// of the difference of full unitaries.
pub fn gate_identity_checks() -> Vec<IdentityCheck> {
    use GateOp::*;
    let unitary = |n: usize, gates: Vec<Gate>| circuit_unitary(&Circuit::new(n, gates).expect("small"));
    let id1 = CMatrix::identity(2);
    let id2 = CMatrix::identity(4);
    let mut out = Vec::new();
    for op in [H, X, Z] {
        let m = unitary(1, vec![g(op, 0), g(op, 0)]);
        out.push(IdentityCheck {
            name: format!("{}^2 = I", op.name()),
            error: (&m - &id1).max_abs(),
        });
    }
    let ss = unitary(1, vec![g(S, 0), g(S, 0)]);
    let z = unitary(1, vec![g(Z, 0)]);
    out.push(IdentityCheck {
        name: String::from("S^2 = Z"),
        error: (&ss - &z).max_abs(),
    });
    let cc = unitary(2, vec![cg(X, &[0], 1), cg(X, &[0], 1)]);
    out.push(IdentityCheck {
        name: String::from("CNOT^2 = I"),
        error: (&cc - &id2).max_abs(),
    });
    out
}
