//! Gate-by-gate expansion into sparse polynomials and pointwise evaluation.

use std::collections::HashMap;
use std::sync::Arc;

use crate::circuit::{Circuit, GateId, Op};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::poly::SparsePolynomial;

/// Default cap on the number of terms any intermediate polynomial may have.
pub const DEFAULT_TERM_BUDGET: u128 = 1_000_000;

/// Number of monomials of total degree at most `d` in `n` variables,
/// saturating at `u128::MAX`.
pub fn monomial_count(n: u64, d: u64) -> u128 {
    let (n, d) = (n.min(d) as u128, n.max(d) as u128);
    let mut c: u128 = 1;
    for i in 1..=n {
        c = match c.checked_mul(d + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    c
}

/// Upper estimate of the term count of every gate, combining the naive
/// sum/product bound with the dense monomial count for the formal degree.
pub fn estimate_terms(c: &Circuit) -> Vec<u128> {
    let degree = c.metrics().gate_degree;
    let n = c.vars().len() as u64;
    let mut est = vec![0u128; c.len()];
    for (i, g) in c.gates().iter().enumerate() {
        let naive = match g.op {
            Op::Input(_) | Op::Const(_) => 1,
            Op::Add(a, b) => est[a].saturating_add(est[b]),
            Op::Mul(a, b) => est[a].saturating_mul(est[b]),
        };
        est[i] = naive.min(monomial_count(n, degree[i]));
    }
    est
}

fn live_below(c: &Circuit, roots: &[GateId]) -> Vec<bool> {
    let mut live = vec![false; c.len()];
    for &r in roots {
        live[r] = true;
    }
    for i in (0..c.len()).rev() {
        if live[i] {
            if let Some((a, b)) = c.gate(i).op.children() {
                live[a] = true;
                live[b] = true;
            }
        }
    }
    live
}

/// Expands the requested gates; other gates' polynomials are dropped as soon
/// as their last reader has been processed unless `keep_all` is set.
fn expand_impl(c: &Circuit, roots: &[GateId], budget: u128, keep_all: bool) -> Result<Vec<Option<SparsePolynomial>>> {
    let live = live_below(c, roots);
    let est = estimate_terms(c);
    if let Some(&worst) = (0..c.len()).filter(|&i| live[i]).map(|i| &est[i]).max() {
        if worst > budget {
            return Err(Error::BudgetExceeded { estimated: worst, limit: budget });
        }
    }
    let field = c.field();
    let vars: Arc<[String]> = c.vars().to_vec().into();
    let mut remaining = vec![0u32; c.len()];
    for (i, g) in c.gates().iter().enumerate() {
        if live[i] {
            if let Some((a, b)) = g.op.children() {
                remaining[a] += 1;
                remaining[b] += 1;
            }
        }
    }
    let mut keep = vec![keep_all; c.len()];
    for &r in roots {
        keep[r] = true;
    }
    let mut polys: Vec<Option<SparsePolynomial>> = vec![None; c.len()];
    for (i, g) in c.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        let p = match &g.op {
            Op::Input(v) => SparsePolynomial::variable(field, vars.clone(), *v),
            Op::Const(k) => SparsePolynomial::constant(field, vars.clone(), k.clone()),
            Op::Add(a, b) => polys[*a].as_ref().expect("child").add(polys[*b].as_ref().expect("child")),
            Op::Mul(a, b) => polys[*a].as_ref().expect("child").mul(polys[*b].as_ref().expect("child")),
        };
        if p.num_terms() as u128 > budget {
            return Err(Error::BudgetExceeded { estimated: p.num_terms() as u128, limit: budget });
        }
        polys[i] = Some(p);
        if let Some((a, b)) = g.op.children() {
            for ch in [a, b] {
                remaining[ch] -= 1;
                if remaining[ch] == 0 && !keep[ch] {
                    polys[ch] = None;
                }
            }
        }
    }
    Ok(polys)
}

/// The polynomial computed at the first output.
pub fn expand(c: &Circuit) -> Result<SparsePolynomial> {
    expand_gate_with_budget(c, c.output(), DEFAULT_TERM_BUDGET)
}

pub fn expand_with_budget(c: &Circuit, budget: u128) -> Result<SparsePolynomial> {
    expand_gate_with_budget(c, c.output(), budget)
}

pub fn expand_gate(c: &Circuit, gate: GateId) -> Result<SparsePolynomial> {
    expand_gate_with_budget(c, gate, DEFAULT_TERM_BUDGET)
}

pub fn expand_gate_with_budget(c: &Circuit, gate: GateId, budget: u128) -> Result<SparsePolynomial> {
    let mut polys = expand_impl(c, &[gate], budget, false)?;
    Ok(polys[gate].take().expect("root expanded"))
}

/// One polynomial per output, in output order.
pub fn expand_outputs(c: &Circuit, budget: u128) -> Result<Vec<SparsePolynomial>> {
    let polys = expand_impl(c, c.outputs(), budget, false)?;
    Ok(c.outputs().iter().map(|&o| polys[o].clone().expect("output expanded")).collect())
}

/// The polynomial at every gate reachable from an output.
pub fn expand_all_gates(c: &Circuit, budget: u128) -> Result<Vec<Option<SparsePolynomial>>> {
    expand_impl(c, c.outputs(), budget, true)
}

/// Values of all gates given values of the variables in circuit order.
pub fn evaluate_gates(c: &Circuit, vals: &[FieldElement]) -> Vec<FieldElement> {
    let mut out: Vec<FieldElement> = Vec::with_capacity(c.len());
    for g in c.gates() {
        let v = match &g.op {
            Op::Input(v) => vals[*v].clone(),
            Op::Const(k) => k.clone(),
            Op::Add(a, b) => &out[*a] + &out[*b],
            Op::Mul(a, b) => &out[*a] * &out[*b],
        };
        out.push(v);
    }
    out
}

/// Output values given variable values in circuit order.
pub fn evaluate_dense(c: &Circuit, vals: &[FieldElement]) -> Vec<FieldElement> {
    let all = evaluate_gates(c, vals);
    c.outputs().iter().map(|&o| all[o].clone()).collect()
}

/// Output values at a named point; every variable read by an input gate
/// must be assigned.
pub fn evaluate(c: &Circuit, point: &HashMap<String, FieldElement>) -> Result<Vec<FieldElement>> {
    let mut used = vec![false; c.vars().len()];
    for g in c.gates() {
        if let Op::Input(v) = g.op {
            used[v] = true;
        }
    }
    let mut vals = Vec::with_capacity(c.vars().len());
    for (i, name) in c.vars().iter().enumerate() {
        match point.get(name) {
            Some(x) if x.field() != c.field() => return Err(Error::FieldMismatch),
            Some(x) => vals.push(x.clone()),
            None if !used[i] => vals.push(c.field().zero()),
            None => return Err(Error::MissingAssignment(name.clone())),
        }
    }
    Ok(evaluate_dense(c, &vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples;
    use crate::field::Field;
    use crate::poly::parse_polynomial;

    fn q() -> Field {
        Field::rationals()
    }

    #[test]
    fn expansions_of_samples() {
        let c = samples::binomial_square(q());
        assert_eq!(expand(&c).unwrap(), parse_polynomial("x^2\n2 * x * y\ny^2", q()).unwrap());
        let c = samples::cubic(q());
        assert_eq!(expand(&c).unwrap(), parse_polynomial("-1 * x^3\nx * y\ny^2\n-1", q()).unwrap());
        let c = samples::squarings(q(), 3);
        assert_eq!(expand(&c).unwrap(), parse_polynomial("x^8", q()).unwrap());
    }

    #[test]
    fn evaluation_examples() {
        let c = samples::binomial_square(q());
        let pt = HashMap::from([("x".to_string(), q().int(2)), ("y".to_string(), q().int(3))]);
        assert_eq!(evaluate(&c, &pt).unwrap(), vec![q().int(25)]);
        let c = samples::cubic(q());
        let pt = HashMap::from([("x".to_string(), q().int(1)), ("y".to_string(), q().int(1))]);
        assert_eq!(evaluate(&c, &pt).unwrap(), vec![q().int(0)]);
        let pt = HashMap::from([("x".to_string(), q().int(1))]);
        assert_eq!(evaluate(&c, &pt), Err(Error::MissingAssignment("y".into())));
    }

    #[test]
    fn budget_is_a_hard_error() {
        let mut b = crate::circuit::CircuitBuilder::new(q());
        let xs: Vec<_> = (0..12).map(|i| b.input(&format!("x{i}"))).collect();
        let ys: Vec<_> = (0..12).map(|i| b.input(&format!("y{i}"))).collect();
        let sx = b.sum(&xs);
        let sy = b.sum(&ys);
        let p = b.mul(sx, sy);
        let c = b.finish(vec![p]).unwrap();
        assert!(matches!(expand_with_budget(&c, 100), Err(Error::BudgetExceeded { estimated: 144, limit: 100 })));
        assert_eq!(expand(&c).unwrap().num_terms(), 144);
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomial_count(2, 2), 6);
        assert_eq!(monomial_count(1, 1024), 1025);
        assert_eq!(monomial_count(0, 5), 1);
        assert_eq!(monomial_count(400, 400), u128::MAX);
    }
}
