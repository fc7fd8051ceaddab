//! Line-oriented circuit files.
//!
//! ```text
//! field Fp 7
//! var x y
//! g1 = input x
//! g2 = mul g1 g1
//! output g2
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{valid_ident, Circuit, Gate, Op};
use crate::error::{Error, Result};
use crate::field::Field;

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, message: message.into() }
}

/// Parses a `field ...` line body into a field handle.
pub(crate) fn parse_field_line(rest: &[&str], line: usize) -> Result<Field> {
    match rest {
        ["Q"] => Ok(Field::rationals()),
        ["Fp", p] => {
            let p: u64 = p.parse().map_err(|_| syntax(line, format!("bad modulus `{p}`")))?;
            Field::prime(p)
        }
        _ => Err(syntax(line, "expected `field Q` or `field Fp <prime>`")),
    }
}

pub(crate) fn field_line(field: Field) -> String {
    match field.modulus() {
        None => "field Q".to_string(),
        Some(p) => format!("field Fp {p}"),
    }
}

/// Strips comments and blank lines, keeping 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut field: Option<Field> = None;
    let mut vars: Vec<String> = Vec::new();
    let mut var_index: HashMap<String, usize> = HashMap::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut gate_index: HashMap<String, usize> = HashMap::new();
    let mut outputs: Option<Vec<usize>> = None;

    for (line, toks) in content_lines(text) {
        match toks[0] {
            "field" => {
                if field.is_some() {
                    return Err(syntax(line, "duplicate field line"));
                }
                field = Some(parse_field_line(&toks[1..], line)?);
            }
            "var" => {
                if toks.len() < 2 {
                    return Err(syntax(line, "`var` needs at least one name"));
                }
                for &name in &toks[1..] {
                    if !valid_ident(name) {
                        return Err(syntax(line, format!("bad variable name `{name}`")));
                    }
                    if var_index.contains_key(name) {
                        return Err(syntax(line, format!("variable `{name}` declared twice")));
                    }
                    var_index.insert(name.to_string(), vars.len());
                    vars.push(name.to_string());
                }
            }
            "output" => {
                if outputs.is_some() {
                    return Err(syntax(line, "duplicate output line"));
                }
                if toks.len() < 2 {
                    return Err(syntax(line, "`output` needs at least one gate"));
                }
                let mut outs = Vec::new();
                for &g in &toks[1..] {
                    let id = *gate_index
                        .get(g)
                        .ok_or_else(|| Error::UnknownGateRef { line, gate: g.to_string() })?;
                    outs.push(id);
                }
                outputs = Some(outs);
            }
            name => {
                let field = field.ok_or_else(|| syntax(line, "gate before `field` line"))?;
                if toks.len() < 3 || toks[1] != "=" {
                    return Err(syntax(line, "expected `<gate> = <kind> ...`"));
                }
                if !valid_ident(name) {
                    return Err(syntax(line, format!("bad gate id `{name}`")));
                }
                if gate_index.contains_key(name) {
                    return Err(Error::DuplicateGateId { line, gate: name.to_string() });
                }
                let child = |g: &str| -> Result<usize> {
                    if g == name {
                        return Err(Error::CycleDetected { line, gate: name.to_string() });
                    }
                    gate_index.get(g).copied().ok_or_else(|| Error::UnknownGateRef { line, gate: g.to_string() })
                };
                let op = match (toks[2], &toks[3..]) {
                    ("input", [v]) => {
                        Op::Input(*var_index.get(*v).ok_or_else(|| Error::UnknownVariable(v.to_string()))?)
                    }
                    ("const", [lit]) => Op::Const(field.parse_literal(lit)?),
                    ("add", [a, b]) => Op::Add(child(a)?, child(b)?),
                    ("mul", [a, b]) => Op::Mul(child(a)?, child(b)?),
                    (kind, _) => return Err(syntax(line, format!("malformed `{kind}` gate"))),
                };
                gate_index.insert(name.to_string(), gates.len());
                gates.push(Gate { name: name.to_string(), op });
            }
        }
    }
    let field = field.ok_or_else(|| syntax(0, "missing `field` line"))?;
    let outputs = outputs.ok_or_else(|| syntax(0, "missing `output` line"))?;
    Circuit::new(field, vars, gates, outputs)
}

pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&field_line(c.field()));
    out.push('\n');
    if !c.vars().is_empty() {
        writeln!(out, "var {}", c.vars().join(" ")).unwrap();
    }
    for g in c.gates() {
        let name = |i: usize| c.gate(i).name.as_str();
        match &g.op {
            Op::Input(v) => writeln!(out, "{} = input {}", g.name, c.vars()[*v]),
            Op::Const(k) => writeln!(out, "{} = const {}", g.name, k),
            Op::Add(a, b) => writeln!(out, "{} = add {} {}", g.name, name(*a), name(*b)),
            Op::Mul(a, b) => writeln!(out, "{} = mul {} {}", g.name, name(*a), name(*b)),
        }
        .unwrap();
    }
    let outs: Vec<&str> = c.outputs().iter().map(|&o| c.gate(o).name.as_str()).collect();
    writeln!(out, "output {}", outs.join(" ")).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples;

    #[test]
    fn parses_small_file() {
        let c = parse_circuit("field Fp 7\nvar x\ng1 = input x\ng2 = mul g1 g1\noutput g2").unwrap();
        assert_eq!(c.size(), 1);
        assert_eq!(c.outputs().len(), 1);
        assert_eq!(c.field().characteristic(), 7);
    }

    #[test]
    fn reports_errors() {
        let e = parse_circuit("field Q\nvar x\ng1 = input x\ng2 = add g1 g9\noutput g2").unwrap_err();
        assert_eq!(e, Error::UnknownGateRef { line: 4, gate: "g9".into() });
        let e = parse_circuit("field Q\ng1 = add g1 g1\noutput g1").unwrap_err();
        assert!(matches!(e, Error::CycleDetected { line: 2, .. }));
        let e = parse_circuit("field Q\nvar x\ng1 = input x\ng1 = input x\noutput g1").unwrap_err();
        assert!(matches!(e, Error::DuplicateGateId { line: 4, .. }));
        let e = parse_circuit("field Fp 7\ng1 = const 1/7\noutput g1").unwrap_err();
        assert!(matches!(e, Error::RationalOverPrimeField(..)));
        let e = parse_circuit("field Q\ng1 = const 1.5\noutput g1").unwrap_err();
        assert!(matches!(e, Error::FieldLiteralInvalid(_)));
        let e = parse_circuit("field Q\ng1 = sub a b\noutput g1").unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 2, .. }));
        assert_eq!(parse_circuit("field Fp 8\n").unwrap_err(), Error::NotPrime(8));
    }

    #[test]
    fn comments_and_negative_constants() {
        let text = "# header\nfield Q\nvar x  # one variable\nc = const -3/6\nx1 = input x\np = mul c x1\noutput p\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(serialize_circuit(&c), "field Q\nvar x\nc = const -1/2\nx1 = input x\np = mul c x1\noutput p\n");
    }

    #[test]
    fn round_trip_is_identity_and_deterministic() {
        let c = samples::cubic(Field::rationals());
        let s1 = serialize_circuit(&c);
        let s2 = serialize_circuit(&c);
        assert_eq!(s1, s2);
        assert_eq!(parse_circuit(&s1).unwrap(), c);
    }
}
