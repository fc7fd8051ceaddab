//! The determinant side: ABP to determinant projection via cycle covers,
//! division-free determinant circuits, and the Newton-identity
//! characteristic polynomial.

use crate::abp::{weakly_skew_to_abp, Abp, Weight};
use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::{Affine, SymMatrix};
use crate::projection::{Identity, ProjectionMatrix};

/// Adjacency matrix of the ABP after negating every weight, gluing the sink
/// onto the source (row/column 0) and putting loops of weight one on every
/// other node. Its determinant is `-SW(G)`. `side` pads with isolated
/// looped nodes.
pub fn negated_cycle_matrix(a: &Abp, side: usize) -> SymMatrix {
    let field = a.field();
    let order = a.topological_order().expect("acyclic");
    let mut index = vec![usize::MAX; a.node_count()];
    index[a.source()] = 0;
    index[a.sink()] = 0;
    let mut next = 1;
    for v in order {
        if v != a.source() && v != a.sink() {
            index[v] = next;
            next += 1;
        }
    }
    let n = side.max(next);
    let mut m = SymMatrix::zeros(field, n);
    for i in 1..n {
        m.set(i, i, Affine::constant(field.one()));
    }
    for e in a.edges() {
        if e.to == a.source() || e.from == a.sink() {
            continue;
        }
        let w = match &e.weight {
            Weight::Const(c) => Affine::constant(-c),
            Weight::Var(v) => Affine::scaled_var(field.neg_one(), v),
        };
        let (i, j) = (index[e.from], index[e.to]);
        let cur = m.get(i, j).add(&w);
        m.set(i, j, cur);
    }
    m
}

/// Matrix whose determinant equals the value of the ABP. The sign left by
/// the cycle-cover expansion is removed by negating column 0.
pub fn abp_to_det_projection(a: &Abp) -> ProjectionMatrix {
    abp_to_det_projection_padded(a, 0)
}

/// As [`abp_to_det_projection`], padded with isolated looped nodes up to
/// `side` when the ABP is smaller.
pub fn abp_to_det_projection_padded(a: &Abp, side: usize) -> ProjectionMatrix {
    let mut m = negated_cycle_matrix(a, side);
    for i in 0..m.side() {
        let flipped = m.get(i, 0).neg();
        m.set(i, 0, flipped);
    }
    let n = m.side();
    ProjectionMatrix {
        matrix: m,
        identity: Identity::Det,
        target: a.expand(),
        trace: vec![
            format!("abp nodes={} edges={}", a.node_count(), a.edge_count()),
            "negate weights, glue sink to source, unit loops elsewhere".into(),
            format!("negate column 0, side {n}"),
        ],
    }
}

/// Weakly-skew circuit to determinant projection of side `|c| + 1`.
pub fn circuit_to_det_projection(c: &Circuit) -> Result<ProjectionMatrix> {
    let a = weakly_skew_to_abp(c)?;
    let m = c.size();
    let mut pm = abp_to_det_projection_padded(&a, m + 1);
    pm.trace.insert(0, format!("weakly-skew circuit, {m} operation gates"));
    Ok(pm)
}

/// `[[a, -b], [c, d]]`, whose determinant `ad + bc` is the 2x2 permanent.
pub fn per2_sign_trick(field: Field) -> ProjectionMatrix {
    let v = |n: &str| Affine::var(field, n);
    let m = SymMatrix::new(field, vec![vec![v("a"), v("b").neg()], vec![v("c"), v("d")]]).expect("square");
    let mut generic = SymMatrix::zeros(field, 2);
    for (i, row) in [["a", "b"], ["c", "d"]].iter().enumerate() {
        for (j, name) in row.iter().enumerate() {
            generic.set(i, j, v(name));
        }
    }
    let target = crate::matrix::brute_per(&generic).expect("2x2 permanent");
    ProjectionMatrix { matrix: m, identity: Identity::Det, target, trace: vec!["negate one off-diagonal entry".into()] }
}

/// Upper bound on the determinantal complexity of a formula's polynomial:
/// the side of its determinant projection, `size + 1`, after the projection
/// has been checked symbolically.
pub fn dc_upper_bound(c: &Circuit) -> Result<(usize, ProjectionMatrix)> {
    let c = c.with_outputs(vec![c.output()])?.pruned();
    if !c.is_formula() {
        return Err(Error::NotAFormula);
    }
    let pm = circuit_to_det_projection(&c)?;
    let report = crate::projection::verify_projection(&pm, 0, 20)?;
    if !report.passed {
        return Err(Error::Invalid("determinant projection failed verification".into()));
    }
    Ok((pm.side(), pm))
}

/// A matrix entry inside a determinant circuit; zero entries are skipped.
pub type EntryFn<'a> = dyn FnMut(&mut CircuitBuilder, usize, usize) -> Option<GateId> + 'a;

#[derive(Clone, Copy)]
enum Val {
    Zero,
    One,
    Gate(GateId),
}

fn vmul(b: &mut CircuitBuilder, fresh: Option<GateId>, v: Val) -> Val {
    match (fresh, v) {
        (None, _) | (_, Val::Zero) => Val::Zero,
        (Some(f), Val::One) => Val::Gate(f),
        (Some(f), Val::Gate(g)) => Val::Gate(b.mul(f, g)),
    }
}

fn vadd(b: &mut CircuitBuilder, x: Val, y: Val) -> Val {
    match (x, y) {
        (Val::Zero, v) | (v, Val::Zero) => v,
        (x, y) => {
            let gx = materialize(b, x);
            let gy = materialize(b, y);
            Val::Gate(b.add(gx, gy))
        }
    }
}

fn materialize(b: &mut CircuitBuilder, v: Val) -> GateId {
    match v {
        Val::Zero => b.int(0),
        Val::One => b.int(1),
        Val::Gate(g) => g,
    }
}

fn vneg(b: &mut CircuitBuilder, v: Val) -> Val {
    let m = b.int(-1);
    vmul(b, Some(m), v)
}

/// Division-free determinant of an `n x n` matrix in the Samuelson-Berkowitz
/// style: characteristic polynomials of the trailing principal submatrices
/// are built up one border at a time. Every product has a freshly created
/// entry (or constant) as one factor, so with entries that are inputs the
/// circuit is skew.
pub fn berkowitz_into(b: &mut CircuitBuilder, n: usize, entry: &mut EntryFn<'_>) -> GateId {
    // coefficients q[i] of t^(r-i) in det(tI - A_r), trailing block A_r
    let mut q: Vec<Val> = vec![Val::One];
    for r in 1..=n {
        let top = n - r;
        let inner: Vec<usize> = (top + 1..n).collect();
        let mut p: Vec<Val> = Vec::with_capacity(r + 1);
        // w_i for i >= 2: w_2 = C q_0, w_i = C q_{i-2} + M w_{i-1}
        let mut w: Vec<Val> = vec![Val::Zero; inner.len()];
        for i in 0..=r {
            let qi = q.get(i).copied().unwrap_or(Val::Zero);
            let mut corr = Val::Zero;
            if i >= 1 {
                let a = entry(b, top, top);
                corr = vmul(b, a, q[i - 1]);
            }
            if i >= 2 && !inner.is_empty() {
                let mut nw = Vec::with_capacity(inner.len());
                for &j in &inner {
                    let c = entry(b, j, top);
                    let mut acc = vmul(b, c, q[i - 2]);
                    if i >= 3 {
                        for (k, &col) in inner.iter().enumerate() {
                            let mjk = entry(b, j, col);
                            let t = vmul(b, mjk, w[k]);
                            acc = vadd(b, acc, t);
                        }
                    }
                    nw.push(acc);
                }
                w = nw;
                for (k, &col) in inner.iter().enumerate() {
                    let rk = entry(b, top, col);
                    let t = vmul(b, rk, w[k]);
                    corr = vadd(b, corr, t);
                }
            }
            let neg = vneg(b, corr);
            p.push(vadd(b, qi, neg));
        }
        q = p;
    }
    let cn = q[n];
    let det = if n % 2 == 1 { vneg(b, cn) } else { cn };
    materialize(b, det)
}

/// Constant-free weakly-skew circuit for the generic `n x n` determinant in
/// variables `x_i_j`.
pub fn berkowitz_det_circuit(field: Field, n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::ParamOutOfRange("n must be at least 1".into()));
    }
    let mut b = CircuitBuilder::new(field);
    for i in 1..=n {
        for j in 1..=n {
            b.declare_var(&format!("x_{i}_{j}"));
        }
    }
    let out = berkowitz_into(&mut b, n, &mut |b, i, j| Some(b.input(&format!("x_{}_{}", i + 1, j + 1))));
    b.finish(vec![out])
}

fn mat_mul(field: Field, a: &[Vec<FieldElement>], b: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(field.zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
                .collect()
        })
        .collect()
}

/// Inverse of a lower-triangular matrix by recursive 2x2 block inversion.
fn invert_lower_triangular(field: Field, l: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
    let n = l.len();
    if n == 1 {
        return Ok(vec![vec![l[0][0].inv()?]]);
    }
    let h = n / 2;
    let block = |r0: usize, r1: usize, c0: usize, c1: usize| -> Vec<Vec<FieldElement>> {
        (r0..r1).map(|i| l[i][c0..c1].to_vec()).collect()
    };
    let a_inv = invert_lower_triangular(field, &block(0, h, 0, h))?;
    let c_inv = invert_lower_triangular(field, &block(h, n, h, n))?;
    let b = block(h, n, 0, h);
    // lower-left block of the inverse is -C^-1 B A^-1
    let cb = {
        let rows = n - h;
        (0..rows)
            .map(|i| (0..h).map(|j| (0..rows).fold(field.zero(), |acc, k| &acc + &(&c_inv[i][k] * &b[k][j]))).collect())
            .collect::<Vec<Vec<FieldElement>>>()
    };
    let lower: Vec<Vec<FieldElement>> = (0..n - h)
        .map(|i| (0..h).map(|j| -(0..h).fold(field.zero(), |acc, k| &acc + &(&cb[i][k] * &a_inv[k][j]))).collect())
        .collect();
    let mut out = vec![vec![field.zero(); n]; n];
    for i in 0..h {
        out[i][..h].clone_from_slice(&a_inv[i]);
    }
    for i in 0..n - h {
        out[h + i][..h].clone_from_slice(&lower[i]);
        out[h + i][h..].clone_from_slice(&c_inv[i]);
    }
    Ok(out)
}

/// Coefficients `c_1..c_n` with `det(tI - A) = t^n - c_1 t^(n-1) - ... - c_n`,
/// from the power traces `s_k = tr(A^k)` and the Newton relations
/// `s_k = c_1 s_(k-1) + ... + c_(k-1) s_1 + k c_k`.
pub fn csanky_charpoly(field: Field, a: &[Vec<FieldElement>]) -> Result<Vec<FieldElement>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("matrix is not square".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if let Some(p) = field.modulus() {
        if p <= n as u64 {
            return Err(Error::CharacteristicTooSmall { p, n });
        }
    }
    let mut power = a.to_vec();
    let mut s = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            power = mat_mul(field, &power, a);
        }
        s.push((0..n).fold(field.zero(), |acc, i| &acc + &power[i][i]));
    }
    let newton: Vec<Vec<FieldElement>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| match i.cmp(&k) {
                    std::cmp::Ordering::Equal => field.int(k as i64 + 1),
                    std::cmp::Ordering::Less => s[k - i - 1].clone(),
                    std::cmp::Ordering::Greater => field.zero(),
                })
                .collect()
        })
        .collect();
    let inv = invert_lower_triangular(field, &newton)?;
    Ok((0..n).map(|i| (0..n).fold(field.zero(), |acc, j| &acc + &(&inv[i][j] * &s[j]))).collect())
}

/// `t^n - c_1 t^(n-1) - ... - c_n` at a point.
pub fn charpoly_eval(field: Field, c: &[FieldElement], t: &FieldElement) -> FieldElement {
    let mut acc = field.one();
    for ci in c {
        acc = &(&acc * t) - ci;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abp::AbpEdge;
    use crate::circuit::samples;
    use crate::eval::{evaluate_dense, expand};
    use crate::matrix::{bareiss_det, symbolic_det};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::rationals()
    }

    #[test]
    fn sign_bookkeeping() {
        let c = samples::xy_plus_z(q());
        let a = weakly_skew_to_abp(&c).unwrap();
        let neg = negated_cycle_matrix(&a, 0);
        assert_eq!(symbolic_det(&neg).unwrap(), expand(&c).unwrap().neg());
        let pm = abp_to_det_projection(&a);
        assert_eq!(pm.side(), 2);
        assert!(pm.matrix.nonzero_off_diagonal() <= 3);
        assert_eq!(symbolic_det(&pm.matrix).unwrap(), expand(&c).unwrap());
    }

    #[test]
    fn single_edge_gives_one_by_one() {
        let a = Abp::new(
            q(),
            vec!["s".into(), "t".into()],
            vec![AbpEdge { from: 0, to: 1, weight: Weight::Var("x".into()) }],
            0,
            1,
        )
        .unwrap();
        let pm = abp_to_det_projection(&a);
        assert_eq!(pm.side(), 1);
        assert_eq!(pm.matrix.get(0, 0), &Affine::var(q(), "x"));
    }

    #[test]
    fn padded_to_circuit_size() {
        let c = samples::comb(q(), 4, true);
        let pm = circuit_to_det_projection(&c).unwrap();
        assert_eq!(pm.side(), 4);
        assert_eq!(symbolic_det(&pm.matrix).unwrap(), expand(&c).unwrap());
        assert!(pm.diagonal_is_zero_one());
    }

    #[test]
    fn per2_and_dc() {
        let pm = per2_sign_trick(q());
        assert_eq!(pm.evaluate_symbolic().unwrap(), pm.target);
        let c = samples::xy_plus_z(q());
        assert_eq!(dc_upper_bound(&c).unwrap().0, 3);
        assert_eq!(dc_upper_bound(&samples::binomial_square(q())).unwrap_err(), Error::NotAFormula);
    }

    #[test]
    fn berkowitz_small_sides() {
        for n in 1..=4 {
            let c = berkowitz_det_circuit(q(), n).unwrap();
            let f = c.classify();
            assert!(f.is_weakly_skew && f.is_constant_free && f.is_skew);
            assert_eq!(expand(&c).unwrap(), symbolic_det(&SymMatrix::generic(q(), n, "x")).unwrap(), "n = {n}");
        }
        let c = berkowitz_det_circuit(q(), 1).unwrap();
        assert_eq!(expand(&c).unwrap(), crate::SparsePolynomial::var(q(), "x_1_1"));
    }

    #[test]
    fn berkowitz_matches_elimination_over_f2() {
        let f2 = Field::prime(2).unwrap();
        let c = berkowitz_det_circuit(f2, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let vals: Vec<FieldElement> = (0..36).map(|_| f2.sample(&mut rng, 0)).collect();
            let m: Vec<Vec<FieldElement>> = (0..6).map(|i| vals[6 * i..6 * i + 6].to_vec()).collect();
            assert_eq!(evaluate_dense(&c, &vals)[0], bareiss_det(f2, &m));
        }
    }

    #[test]
    fn csanky_examples() {
        let d = vec![vec![q().int(2), q().int(0)], vec![q().int(0), q().int(3)]];
        assert_eq!(csanky_charpoly(q(), &d).unwrap(), vec![q().int(5), q().int(-6)]);
        let z = vec![vec![q().zero(); 3]; 3];
        assert!(csanky_charpoly(q(), &z).unwrap().iter().all(FieldElement::is_zero));
        let f5 = Field::prime(5).unwrap();
        let m = vec![vec![f5.one(); 6]; 6];
        assert_eq!(csanky_charpoly(f5, &m), Err(Error::CharacteristicTooSmall { p: 5, n: 6 }));
    }

    #[test]
    fn csanky_against_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = q();
        let n = 5;
        let a: Vec<Vec<FieldElement>> = (0..n).map(|_| (0..n).map(|_| f.int(rng.gen_range(-5..=5))).collect()).collect();
        let c = csanky_charpoly(f, &a).unwrap();
        let t = f.int(7);
        let shifted: Vec<Vec<FieldElement>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { &t - &a[i][j] } else { -&a[i][j] }).collect()).collect();
        assert_eq!(charpoly_eval(f, &c, &t), bareiss_det(f, &shifted));
    }
}
