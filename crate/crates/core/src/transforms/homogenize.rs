use crate::circuit::{Circuit, CircuitBuilder, GateId, Op};
use crate::error::{Error, Result};
use crate::eval::expand;

/// Splits every gate `v` into gates `(v, 0..=d)` computing its homogeneous
/// components. The result has `d + 1` outputs, component `i` at index `i`.
pub fn homogenize(c: &Circuit, d: u64) -> Result<Circuit> {
    if d == 0 {
        return Err(Error::ParamOutOfRange("degree bound must be at least 1".into()));
    }
    let c = c.with_outputs(vec![c.output()])?.pruned();
    let formal = c.metrics().gate_degree[c.output()];
    if formal > d {
        let degree = expand(&c)?.total_degree();
        if degree > d {
            return Err(Error::DegreeBoundTooSmall { bound: d, degree });
        }
    }
    let d = d as usize;
    let mut b = CircuitBuilder::new(c.field());
    for v in c.vars() {
        b.declare_var(v);
    }
    let mut comp: Vec<Vec<Option<GateId>>> = Vec::with_capacity(c.len());
    for g in c.gates() {
        let mut row = vec![None; d + 1];
        match &g.op {
            Op::Input(v) => row[1] = Some(b.input(&c.vars()[*v])),
            Op::Const(k) => {
                if !k.is_zero() {
                    row[0] = Some(b.constant(k.clone()));
                }
            }
            &Op::Add(x, y) => {
                for i in 0..=d {
                    row[i] = match (comp[x][i], comp[y][i]) {
                        (Some(p), Some(q)) => Some(b.add(p, q)),
                        (p, q) => p.or(q),
                    };
                }
            }
            &Op::Mul(x, y) => {
                for i in 0..=d {
                    for j in 0..=d - i {
                        if let (Some(p), Some(q)) = (comp[x][i], comp[y][j]) {
                            let m = b.mul(p, q);
                            row[i + j] = Some(match row[i + j] {
                                Some(acc) => b.add(acc, m),
                                None => m,
                            });
                        }
                    }
                }
            }
        }
        comp.push(row);
    }
    let mut zero = None;
    let outputs = comp[c.output()]
        .iter()
        .map(|g| match g {
            Some(g) => *g,
            None => *zero.get_or_insert_with(|| b.int(0)),
        })
        .collect();
    b.finish(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples;
    use crate::eval::expand_all_gates;
    use crate::field::Field;
    use crate::poly::parse_polynomial;

    fn components(c: &Circuit) -> Vec<String> {
        c.outputs().iter().map(|&o| crate::eval::expand_gate(c, o).unwrap().to_string()).collect()
    }

    #[test]
    fn binomial_components() {
        let q = Field::rationals();
        let mut b = CircuitBuilder::new(q);
        let x = b.input("x");
        let one = b.int(1);
        let s = b.add(x, one);
        let sq = b.mul(s, s);
        let c = b.finish(vec![sq]).unwrap();
        let h = homogenize(&c, 2).unwrap();
        assert_eq!(h.outputs().len(), 3);
        let want = ["1", "2 * x", "x^2"].map(|s| parse_polynomial(s, q).unwrap());
        for (i, &o) in h.outputs().iter().enumerate() {
            assert_eq!(crate::eval::expand_gate(&h, o).unwrap(), want[i]);
        }
        for p in expand_all_gates(&h, 1000).unwrap().into_iter().flatten() {
            assert!(p.is_homogeneous());
        }
    }

    #[test]
    fn homogeneous_input_and_cubic() {
        let q = Field::rationals();
        let h = homogenize(&samples::comb(q, 2, true), 2).unwrap();
        let comps = components(&h);
        assert_eq!(comps[0], "0");
        assert_eq!(comps[1], "0");
        let h = homogenize(&samples::cubic(q), 3).unwrap();
        assert_eq!(crate::eval::expand_gate(&h, h.outputs()[3]).unwrap(), parse_polynomial("-1 * x^3", q).unwrap());
    }

    #[test]
    fn bound_too_small() {
        let q = Field::rationals();
        let err = homogenize(&samples::cubic(q), 2).unwrap_err();
        assert_eq!(err, Error::DegreeBoundTooSmall { bound: 2, degree: 3 });
    }
}
