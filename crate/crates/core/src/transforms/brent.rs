use crate::circuit::{Circuit, CircuitBuilder, GateId, Op};
use crate::error::{Error, Result};
use crate::field::FieldElement;

/// Depth constant the balancer guarantees: depth <= kappa * log2(s + 2).
pub const BALANCE_KAPPA: f64 = 10.0;

/// Formulas at most this large are left as they are.
const LEAF_SIZE: usize = 4;

#[derive(Clone, Debug)]
enum Tree {
    Var(usize),
    Const(FieldElement),
    Add(Box<Tree>, Box<Tree>, usize),
    Mul(Box<Tree>, Box<Tree>, usize),
}

impl Tree {
    fn size(&self) -> usize {
        match self {
            Tree::Var(_) | Tree::Const(_) => 1,
            Tree::Add(.., n) | Tree::Mul(.., n) => *n,
        }
    }

    fn add(a: Tree, b: Tree) -> Tree {
        let n = a.size() + b.size() + 1;
        Tree::Add(Box::new(a), Box::new(b), n)
    }

    fn mul(a: Tree, b: Tree) -> Tree {
        let n = a.size() + b.size() + 1;
        Tree::Mul(Box::new(a), Box::new(b), n)
    }

    fn from_circuit(c: &Circuit, g: GateId) -> Tree {
        match &c.gate(g).op {
            Op::Input(v) => Tree::Var(*v),
            Op::Const(k) => Tree::Const(k.clone()),
            &Op::Add(a, b) => Tree::add(Tree::from_circuit(c, a), Tree::from_circuit(c, b)),
            &Op::Mul(a, b) => Tree::mul(Tree::from_circuit(c, a), Tree::from_circuit(c, b)),
        }
    }

    fn emit(&self, c: &Circuit, b: &mut CircuitBuilder) -> GateId {
        match self {
            Tree::Var(v) => b.input(&c.vars()[*v]),
            Tree::Const(k) => b.constant(k.clone()),
            Tree::Add(x, y, _) => {
                let (x, y) = (x.emit(c, b), y.emit(c, b));
                b.add(x, y)
            }
            Tree::Mul(x, y, _) => {
                let (x, y) = (x.emit(c, b), y.emit(c, b));
                b.mul(x, y)
            }
        }
    }

    fn children(&self) -> Option<(&Tree, &Tree)> {
        match self {
            Tree::Add(a, b, _) | Tree::Mul(a, b, _) => Some((a, b)),
            _ => None,
        }
    }
}

/// The tree with the subtree at `path` (child indices from the root) cut
/// out, written as `f = A * g + B`. `None` stands for the constants 1
/// (for `A`) and 0 (for `B`).
fn split(t: &Tree, path: &[usize]) -> (Option<Tree>, Option<Tree>) {
    let Some((&step, rest)) = path.split_first() else {
        return (None, None);
    };
    let (l, r) = t.children().expect("path follows internal nodes");
    let (down, side) = if step == 0 { (l, r) } else { (r, l) };
    let (a, b) = split(down, rest);
    match t {
        Tree::Add(..) => {
            let b = Some(match b {
                Some(b) => Tree::add(b, side.clone()),
                None => side.clone(),
            });
            (a, b)
        }
        _ => {
            let a = Some(match a {
                Some(a) => Tree::mul(a, side.clone()),
                None => side.clone(),
            });
            (a, b.map(|b| Tree::mul(b, side.clone())))
        }
    }
}

fn balance(t: Tree) -> Tree {
    let n = t.size();
    if n <= LEAF_SIZE {
        return t;
    }
    let mut path = Vec::new();
    let mut cur = &t;
    while cur.size() * 3 > 2 * n {
        let (l, r) = cur.children().expect("large subtree is internal");
        let step = usize::from(r.size() > l.size());
        path.push(step);
        cur = if step == 0 { l } else { r };
    }
    let g = balance(cur.clone());
    let (a, b) = split(&t, &path);
    let ag = match a {
        Some(a) => Tree::mul(balance(a), g),
        None => g,
    };
    match b {
        Some(b) => Tree::add(ag, balance(b)),
        None => ag,
    }
}

/// Brent-style depth reduction of a formula: pick a subtree `g` holding
/// between a third and two thirds of the gates, write `f = A * g + B`, and
/// recurse on `A`, `g` and `B`.
pub fn balance_formula(c: &Circuit) -> Result<Circuit> {
    let c = c.with_outputs(vec![c.output()])?.pruned();
    if !c.is_formula() {
        return Err(Error::NotAFormula);
    }
    let t = balance(Tree::from_circuit(&c, c.output()));
    let mut b = CircuitBuilder::new(c.field());
    for v in c.vars() {
        b.declare_var(v);
    }
    let out = t.emit(&c, &mut b);
    b.finish(vec![out])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples;
    use crate::eval::expand;
    use crate::field::Field;

    fn depth_ok(c: &Circuit, out: &Circuit) -> bool {
        out.metrics().depth as f64 <= BALANCE_KAPPA * ((c.size() + 2) as f64).log2()
    }

    #[test]
    fn combs() {
        let q = Field::rationals();
        for (n, mul) in [(8, false), (32, true)] {
            let c = samples::comb(q, n, mul);
            let out = balance_formula(&c).unwrap();
            assert!(out.is_formula());
            assert!(depth_ok(&c, &out));
            assert!(out.metrics().depth < c.metrics().depth);
            assert_eq!(expand(&out).unwrap(), expand(&c).unwrap());
        }
    }

    #[test]
    fn single_gate_and_non_formula() {
        let q = Field::rationals();
        let c = samples::comb(q, 2, true);
        assert_eq!(balance_formula(&c).unwrap().metrics().depth, 1);
        assert_eq!(balance_formula(&samples::binomial_square(q)).unwrap_err(), Error::NotAFormula);
    }
}
