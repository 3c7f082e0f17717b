//! JSON state and circuit files, and CSV output.

use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use rotosense_core::circuit::{named_gate, Circuit, Gate, GateOp, Matrix2};
use rotosense_core::spin::qubit_to_dicke;
use rotosense_core::{QubitState, Spin, SpinState, C64};
use serde::{Deserialize, Serialize};

use crate::config::StateSelector;

/// Symmetric-subspace weight a qubit state file may lose on conversion.
pub const SYMMETRIC_TOL: f64 = 1e-10;

/// `{"J": 2, "amps": [[re, im], …]}` in descending `m`, or
/// `{"n_qubits": 4, "amps": [[re, im], …]}` in computational order.
#[derive(Deserialize, Serialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum StateFile {
    Spin {
        #[serde(rename = "J")]
        j: f64,
        amps: Vec<[f64; 2]>,
    },
    Qubits {
        n_qubits: usize,
        amps: Vec<[f64; 2]>,
    },
}

fn complex(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

impl StateFile {
    pub fn from_spin_state(s: &SpinState) -> Self {
        Self::Spin {
            j: s.spin().j(),
            amps: s.amps().iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    /// Normalized spin state; qubit states must be permutation symmetric.
    pub fn to_spin_state(&self) -> Result<SpinState> {
        match self {
            Self::Spin { j, amps } => Ok(SpinState::new(Spin::new(*j)?, complex(amps))?),
            Self::Qubits { n_qubits, amps } => {
                let q = QubitState::new(*n_qubits, complex(amps))?;
                let proj = qubit_to_dicke(&q)?;
                ensure!(
                    proj.lost_weight <= SYMMETRIC_TOL,
                    "qubit state is not permutation symmetric (weight {:.3e} outside the symmetric subspace)",
                    proj.lost_weight
                );
                Ok(proj.state)
            }
        }
    }
}

pub fn load_state_file(path: &Path) -> Result<SpinState> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read state file {}", path.display()))?;
    let file: StateFile = serde_json::from_str(&text).with_context(|| {
        format!("state file {} must hold {{\"J\", \"amps\"}} or {{\"n_qubits\", \"amps\"}}", path.display())
    })?;
    file.to_spin_state()
        .with_context(|| format!("invalid state in {}", path.display()))
}

pub fn load_state(sel: &StateSelector) -> Result<SpinState> {
    match sel {
        StateSelector::Named(n) => Ok(n.state()),
        StateSelector::File(p) => load_state_file(p),
    }
}

#[derive(Deserialize, Serialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub kind: String,
    pub targets: Vec<usize>,
    #[serde(default)]
    pub controls: Vec<usize>,
    /// Row-major 2×2 matrix of `[re, im]` pairs, for `CUSTOM` gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[[f64; 2]; 2]; 2]>,
}

#[derive(Deserialize, Serialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub n_qubits: usize,
    pub gates: Vec<GateSpec>,
    /// Qubits read out at the end; all of them when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<usize>>,
}

impl GateSpec {
    fn ops(&self) -> Result<Vec<Gate>> {
        let kind = self.kind.to_ascii_uppercase();
        let (op, needs) = match kind.as_str() {
            "H" => (GateOp::H, None),
            "X" => (GateOp::X, None),
            "Z" => (GateOp::Z, None),
            "S" => (GateOp::S, None),
            "CNOT" | "CX" => (GateOp::X, Some(1)),
            "CZ" => (GateOp::Z, Some(1)),
            "MCX" => (GateOp::X, None),
            "CUSTOM" => {
                let m = self
                    .matrix
                    .ok_or_else(|| anyhow!("CUSTOM gate needs a `matrix`"))?;
                let m: Matrix2 = m.map(|row| row.map(|[re, im]| C64::new(re, im)));
                (GateOp::Custom(m), None)
            }
            _ => (named_gate(&self.kind).map_err(|_| anyhow!("unknown gate kind `{}`", self.kind))?, None),
        };
        if let Some(k) = needs {
            ensure!(self.controls.len() == k, "{kind} needs exactly {k} control");
        }
        if kind == "MCX" {
            ensure!(!self.controls.is_empty(), "MCX needs at least one control");
        }
        if self.matrix.is_some() && kind != "CUSTOM" {
            bail!("`matrix` is only allowed on CUSTOM gates");
        }
        ensure!(!self.targets.is_empty(), "{kind} gate has no targets");
        self.targets
            .iter()
            .map(|&t| Gate::new(op, t, self.controls.clone()).map_err(Into::into))
            .collect()
    }
}

impl CircuitFile {
    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            gates.extend(g.ops().with_context(|| format!("gate {i}"))?);
        }
        let c = Circuit::new(self.n_qubits, gates)?;
        Ok(match &self.measure {
            Some(m) => c.with_measure(m.clone())?,
            None => c,
        })
    }

    /// File form of a built circuit; each gate becomes one entry.
    pub fn from_circuit(c: &Circuit) -> Self {
        let gates = c
            .gates()
            .iter()
            .map(|g| {
                let (kind, matrix) = match g.op() {
                    GateOp::Custom(m) => ("CUSTOM", Some(m.map(|row| row.map(|z| [z.re, z.im])))),
                    op => (op.name(), None),
                };
                GateSpec {
                    kind: kind.to_string(),
                    targets: vec![g.target()],
                    controls: g.controls().to_vec(),
                    matrix,
                }
            })
            .collect();
        Self {
            n_qubits: c.n_qubits(),
            gates,
            measure: c.measure().map(<[usize]>::to_vec),
        }
    }
}

pub fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read circuit file {}", path.display()))?;
    let file: CircuitFile =
        serde_json::from_str(&text).with_context(|| format!("invalid circuit file {}", path.display()))?;
    file.to_circuit()
        .with_context(|| format!("invalid circuit in {}", path.display()))
}

/// CSV text with a header row.
pub fn csv_string<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow!("{}", e.error()))?;
    Ok(String::from_utf8(bytes)?)
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
