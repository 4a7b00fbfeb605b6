use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CircuitDescription, Gate};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// QASM-like listing: `qreg q[N];`, one `// q[i]: label` comment per
/// qubit, then one gate per line. Angles use the shortest decimal that
/// parses back to the same value.
pub fn serialize_circuit<T: Real>(circuit: &CircuitDescription<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits());
    for (i, label) in circuit.labels().iter().enumerate() {
        let _ = writeln!(out, "// q[{i}]: {label}");
    }
    for gate in circuit.gates() {
        let _ = match *gate {
            Gate::Ry { theta, target } => writeln!(out, "ry({theta}) q[{target}];"),
            Gate::CCRy {
                theta,
                controls,
                target,
            } => writeln!(
                out,
                "ccry({theta}) q[{}],q[{}],q[{target}];",
                controls[0], controls[1]
            ),
            Gate::Measure { target } => writeln!(out, "measure q[{target}];"),
        };
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_qubit(text: &str, line: usize) -> Result<usize> {
    text.trim()
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected `q[i]`, found `{}`", text.trim())))
}

fn parse_qubits(text: &str, line: usize) -> Result<Vec<usize>> {
    text.split(',').map(|q| parse_qubit(q, line)).collect()
}

/// Splits `name(theta) args` into `(theta, args)`.
fn parse_rotation<T: Real>(rest: &str, line: usize) -> Result<(T, &str)> {
    let inner = rest
        .strip_prefix('(')
        .ok_or_else(|| parse_err(line, "expected `(` after gate name"))?;
    let close = inner
        .find(')')
        .ok_or_else(|| parse_err(line, "unclosed angle"))?;
    let theta = inner[..close]
        .trim()
        .parse::<T>()
        .map_err(|_| parse_err(line, format!("bad angle `{}`", &inner[..close])))?;
    Ok((theta, &inner[close + 1..]))
}

/// Inverse of [`serialize_circuit`]. Qubits without a label comment get
/// `q{i}`; other `//` comments and blank lines are ignored.
pub fn parse_circuit<T: Real>(text: &str) -> Result<CircuitDescription<T>> {
    let mut qubits: Option<usize> = None;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix("//") {
            let comment = comment.trim();
            if let Some((q, label)) = comment.split_once(':') {
                if let (Ok(q), Some(n)) = (parse_qubit(q, line_no), qubits) {
                    if q >= n {
                        return Err(parse_err(line_no, format!("label for qubit {q} of {n}")));
                    }
                    labels[q] = Some(label.trim().to_string());
                }
            }
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| parse_err(line_no, "missing `;`"))?
            .trim();
        if let Some(rest) = stmt.strip_prefix("qreg") {
            if qubits.is_some() {
                return Err(parse_err(line_no, "second `qreg`"));
            }
            let n = parse_qubit(rest, line_no)?;
            qubits = Some(n);
            labels = vec![None; n];
            continue;
        }
        if qubits.is_none() {
            return Err(parse_err(line_no, "gate before `qreg`"));
        }
        let gate = if let Some(rest) = stmt.strip_prefix("ccry") {
            let (theta, args) = parse_rotation::<T>(rest, line_no)?;
            match parse_qubits(args, line_no)?[..] {
                [a, b, target] => Gate::CCRy {
                    theta,
                    controls: [a, b],
                    target,
                },
                _ => return Err(parse_err(line_no, "ccry takes three qubits")),
            }
        } else if let Some(rest) = stmt.strip_prefix("ry") {
            let (theta, args) = parse_rotation::<T>(rest, line_no)?;
            Gate::Ry {
                theta,
                target: parse_qubit(args, line_no)?,
            }
        } else if let Some(rest) = stmt.strip_prefix("measure") {
            Gate::Measure {
                target: parse_qubit(rest, line_no)?,
            }
        } else {
            return Err(parse_err(line_no, format!("unknown statement `{stmt}`")));
        };
        gates.push(gate);
    }
    let n = qubits.ok_or_else(|| parse_err(0, "missing `qreg`"))?;
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.unwrap_or_else(|| format!("q{i}")))
        .collect();
    CircuitDescription::new(n, labels, gates)
}

#[derive(Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
struct GateRecord<T> {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<T>,
    qubits: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
struct CircuitRecord<T> {
    qubits: usize,
    labels: Vec<String>,
    gates: Vec<GateRecord<T>>,
}

/// `{qubits, labels, gates: [{kind, theta, qubits}]}`.
pub fn serialize_circuit_json<T: Real>(circuit: &CircuitDescription<T>) -> Result<String> {
    let record = CircuitRecord {
        qubits: circuit.num_qubits(),
        labels: circuit.labels().to_vec(),
        gates: circuit
            .gates()
            .iter()
            .map(|g| GateRecord {
                kind: g.kind().to_string(),
                theta: g.theta(),
                qubits: g.qubits(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&record)?)
}

pub fn parse_circuit_json<T: Real>(text: &str) -> Result<CircuitDescription<T>> {
    let record: CircuitRecord<T> = serde_json::from_str(text)?;
    let gates = record
        .gates
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let bad = || Error::InvalidCircuit(format!("gate {i}: malformed `{}`", g.kind));
            match (g.kind.as_str(), g.theta, &g.qubits[..]) {
                ("ry", Some(theta), &[target]) => Ok(Gate::Ry { theta, target }),
                ("ccry", Some(theta), &[a, b, target]) => Ok(Gate::CCRy {
                    theta,
                    controls: [a, b],
                    target,
                }),
                ("measure", None, &[target]) => Ok(Gate::Measure { target }),
                _ => Err(bad()),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CircuitDescription::new(record.qubits, record.labels, gates)
}
