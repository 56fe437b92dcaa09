//! Line-oriented circuit text format. See `docs/circuit-format.md`.

use super::circuit::Circuit;
use super::gate::Gate;
use crate::error::{Error, Result};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Looks up a gate by its text-format name (case-insensitive).
pub fn gate_by_name(name: &str, param: Option<f64>) -> Option<Gate> {
    let upper = name.to_ascii_uppercase();
    let g = match (upper.as_str(), param) {
        ("X", None) => Gate::x(),
        ("Y", None) => Gate::y(),
        ("Z", None) => Gate::z(),
        ("H", None) => Gate::h(),
        ("S", None) => Gate::s(),
        ("SDG", None) => Gate::sdg(),
        ("T", None) => Gate::t(),
        ("TDG", None) => Gate::tdg(),
        ("V", None) => Gate::v(),
        ("VDG", None) => Gate::vdg(),
        ("CNOT" | "CX", None) => Gate::cnot(),
        ("CZ", None) => Gate::cz(),
        ("SWAP", None) => Gate::swap(),
        ("TOFFOLI" | "CCX", None) => Gate::toffoli(),
        ("CCZ", None) => Gate::ccz(),
        ("CSWAP" | "FREDKIN", None) => Gate::fredkin(),
        ("PHASE", Some(t)) => Gate::phase(t),
        ("RX", Some(t)) => Gate::rx(t),
        ("RY", Some(t)) => Gate::ry(t),
        ("RZ", Some(t)) => Gate::rz(t),
        _ => return None,
    };
    Some(g)
}

/// Whitespace-separated tokens with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, t)| (line[..s].chars().count() + 1, t))
        .collect()
}

fn parse_gate_token(tok: &str, line: usize, col: usize) -> Result<Gate> {
    let (name, param) = match tok.find('(') {
        Some(open) => {
            if !tok.ends_with(')') {
                return Err(parse_err(line, col + tok.len(), "expected ')'"));
            }
            let inner = &tok[open + 1..tok.len() - 1];
            let value: f64 = inner
                .parse()
                .map_err(|_| parse_err(line, col + open + 1, format!("invalid angle '{inner}'")))?;
            if !value.is_finite() {
                return Err(parse_err(line, col + open + 1, "angle must be finite"));
            }
            (&tok[..open], Some(value))
        }
        None => (tok, None),
    };
    gate_by_name(name, param).ok_or_else(|| {
        let hint = if param.is_some() {
            "unknown parametrized gate"
        } else {
            "unknown gate"
        };
        parse_err(line, col, format!("{hint} '{tok}'"))
    })
}

fn parse_uint(tok: &str, line: usize, col: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, col, format!("expected {what}, found '{tok}'")))
}

/// Parses a circuit. The qubit count comes from an `init` or `qubits` header.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    let mut last_time = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks = tokens(body);
        let Some(&(col0, first)) = toks.first() else {
            continue;
        };
        match first {
            "init" => {
                if circuit.is_some() {
                    return Err(parse_err(
                        line_no,
                        col0,
                        "header must come before any step and appear once",
                    ));
                }
                let (col, bits) = match toks.as_slice() {
                    [_, b] => *b,
                    _ => return Err(parse_err(line_no, col0, "expected 'init <bits>'")),
                };
                let mut labels = Vec::with_capacity(bits.len());
                for (i, ch) in bits.chars().enumerate() {
                    match ch {
                        '0' => labels.push(false),
                        '1' => labels.push(true),
                        _ => {
                            return Err(parse_err(
                                line_no,
                                col + i,
                                format!("expected 0 or 1, found '{ch}'"),
                            ))
                        }
                    }
                }
                circuit = Some(Circuit::with_labels(&labels));
            }
            "qubits" => {
                if circuit.is_some() {
                    return Err(parse_err(
                        line_no,
                        col0,
                        "header must come before any step and appear once",
                    ));
                }
                let (col, n) = match toks.as_slice() {
                    [_, n] => *n,
                    _ => return Err(parse_err(line_no, col0, "expected 'qubits <count>'")),
                };
                let n = parse_uint(n, line_no, col, "qubit count")?;
                if n == 0 {
                    return Err(parse_err(line_no, col, "qubit count must be positive"));
                }
                circuit = Some(Circuit::new(n));
            }
            _ => {
                let Some(c) = circuit.as_mut() else {
                    return Err(parse_err(
                        line_no,
                        col0,
                        "missing 'init' or 'qubits' header",
                    ));
                };
                if toks.len() < 3 {
                    return Err(parse_err(
                        line_no,
                        col0,
                        "expected '<time> <GATE> <qubits...>'",
                    ));
                }
                let time = parse_uint(first, line_no, col0, "time index")?;
                if time < last_time {
                    return Err(parse_err(
                        line_no,
                        col0,
                        format!("time {time} is before {last_time}"),
                    ));
                }
                let (gcol, gtok) = toks[1];
                let gate = parse_gate_token(gtok, line_no, gcol)?;
                let mut targets = Vec::new();
                for &(col, tok) in &toks[2..] {
                    let q = parse_uint(tok, line_no, col, "qubit index")?;
                    if q >= c.num_qubits() {
                        return Err(parse_err(
                            line_no,
                            col,
                            format!("qubit {q} out of range for {} qubits", c.num_qubits()),
                        ));
                    }
                    if targets.contains(&q) {
                        return Err(parse_err(line_no, col, format!("duplicate qubit {q}")));
                    }
                    targets.push(q);
                }
                if targets.len() != gate.arity() {
                    return Err(parse_err(
                        line_no,
                        toks[2].0,
                        format!(
                            "{} takes {} qubits, found {}",
                            gate.name(),
                            gate.arity(),
                            targets.len()
                        ),
                    ));
                }
                c.push_at(time, gate, &targets)
                    .map_err(|e| parse_err(line_no, col0, e.to_string()))?;
                last_time = time;
            }
        }
    }
    circuit.ok_or_else(|| parse_err(1, 1, "missing 'init' or 'qubits' header"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_steps_and_comments() {
        let text = "# demo\ninit 010\n0 H 0   # first\n1 CNOT 0 1\n1 RY(0.5) 2\n\n2 ccx 0 1 2\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.num_qubits(), 3);
        assert_eq!(c.input_labels(), &[false, true, false]);
        assert_eq!(c.len(), 4);
        assert_eq!(c.depth(), 3);
    }

    #[test]
    fn reports_line_and_column() {
        let text = "qubits 2\n0 H 0\n1 FOO 1\n";
        match parse_circuit(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
        let text = "qubits 2\n0 CNOT 0 5\n";
        assert!(matches!(
            parse_circuit(text),
            Err(Error::Parse {
                line: 2,
                column: 10,
                ..
            })
        ));
    }

    #[test]
    fn rejects_structural_errors() {
        for bad in [
            "0 H 0\n",
            "qubits 2\n1 H 0\n0 H 1\n",
            "qubits 2\n0 CNOT 0\n",
            "qubits 2\n0 H 0\n0 X 0\n",
            "init 01x\n",
            "qubits 1\n0 RY(abc) 0\n",
            "qubits 1\n0 PHASE 0\n",
            "",
        ] {
            assert!(
                matches!(parse_circuit(bad), Err(Error::Parse { .. })),
                "{bad:?}"
            );
        }
    }
}
