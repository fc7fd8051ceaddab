use std::collections::HashMap;

use crate::circuit::{Circuit, CircuitBuilder, GateId, Op};
use crate::error::{Error, Result};
use crate::field::FieldElement;

/// Largest number of `(gate, degree, position)` triples explored.
pub const DISJOINT_BUDGET: u128 = 4_000_000;

struct Splitter<'a> {
    c: &'a Circuit,
    degree: Vec<u64>,
    constant_term: Vec<FieldElement>,
    top: u64,
    b: CircuitBuilder,
    memo: HashMap<(GateId, u64, u64), Option<GateId>>,
}

impl Splitter<'_> {
    /// Degree-`i` component of gate `v`, built from gates whose monomial
    /// positions lie in `[j, j + i)`. Positions keep the two factors of every
    /// product apart; constant components are fresh constant gates.
    fn part(&mut self, v: GateId, i: u64, j: u64) -> Option<GateId> {
        if i == 0 {
            let k = self.constant_term[v].clone();
            return (!k.is_zero()).then(|| self.b.constant(k));
        }
        if i > self.degree[v] || j + i - 1 > self.top {
            return None;
        }
        if let Some(&g) = self.memo.get(&(v, i, j)) {
            return g;
        }
        let out = match &self.c.gate(v).op {
            Op::Input(x) => (i == 1).then(|| self.b.input(&self.c.vars()[*x])),
            Op::Const(_) => None,
            &Op::Add(a, b) => {
                let pa = self.part(a, i, j);
                let pb = self.part(b, i, j);
                match (pa, pb) {
                    (Some(p), Some(q)) => Some(self.b.add(p, q)),
                    (p, q) => p.or(q),
                }
            }
            &Op::Mul(a, b) => {
                let mut acc = None;
                for k in 0..=i {
                    if k > self.degree[a] || i - k > self.degree[b] {
                        continue;
                    }
                    let Some(p) = self.part(a, k, j) else { continue };
                    let Some(q) = self.part(b, i - k, j + k) else { continue };
                    let m = self.b.mul(p, q);
                    acc = Some(match acc {
                        Some(s) => self.b.add(s, m),
                        None => m,
                    });
                }
                acc
            }
        };
        self.memo.insert((v, i, j), out);
        out
    }
}

/// Equivalent multiplicatively disjoint circuit (first output). Circuits that
/// already are mult-disjoint are returned unchanged.
pub fn make_mult_disjoint(c: &Circuit) -> Result<Circuit> {
    let c = c.with_outputs(vec![c.output()])?.pruned();
    if c.is_mult_disjoint() {
        return Ok(c);
    }
    let degree = c.metrics().gate_degree;
    let top = degree[c.output()];
    let work = (c.len() as u128).saturating_mul(top as u128).saturating_mul(top as u128);
    if work > DISJOINT_BUDGET {
        return Err(Error::BudgetExceeded { estimated: work, limit: DISJOINT_BUDGET });
    }
    let field = c.field();
    let zeros = vec![field.zero(); c.vars().len()];
    let mut b = CircuitBuilder::new(field);
    for v in c.vars() {
        b.declare_var(v);
    }
    let mut s = Splitter {
        constant_term: crate::eval::evaluate_gates(&c, &zeros),
        c: &c,
        degree,
        top,
        b,
        memo: HashMap::new(),
    };
    let parts: Vec<GateId> = (0..=top).filter_map(|i| s.part(c.output(), i, 1)).collect();
    let mut b = s.b;
    let out = if parts.is_empty() { b.int(0) } else { b.sum(&parts) };
    b.finish(vec![out])
}
