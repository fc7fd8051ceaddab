//! Named polynomial families, each with a circuit construction and an
//! independent enumeration oracle.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::circuit::{Circuit, CircuitBuilder, CircuitMetrics, GateId};
use crate::det::{berkowitz_det_circuit, berkowitz_into};
use crate::error::{Error, Result};
use crate::eval::{estimate_terms, expand, DEFAULT_TERM_BUDGET};
use crate::field::{Field, FieldElement};
use crate::matrix::{brute_per, symbolic_det, SymMatrix};
use crate::poly::{var_list, SparsePolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyName {
    Det,
    Per,
    Hc,
    Imm,
    Esym,
    Cut,
    Trees,
}

impl FamilyName {
    pub const ALL: [FamilyName; 7] =
        [FamilyName::Det, FamilyName::Per, FamilyName::Hc, FamilyName::Imm, FamilyName::Esym, FamilyName::Cut, FamilyName::Trees];

    pub fn name(self) -> &'static str {
        match self {
            FamilyName::Det => "det",
            FamilyName::Per => "per",
            FamilyName::Hc => "hc",
            FamilyName::Imm => "imm",
            FamilyName::Esym => "esym",
            FamilyName::Cut => "cut",
            FamilyName::Trees => "trees",
        }
    }

    /// Structural class the construction is built to have.
    pub fn declared_class(self) -> &'static str {
        match self {
            FamilyName::Det | FamilyName::Trees => "weakly-skew",
            FamilyName::Imm => "skew",
            FamilyName::Per | FamilyName::Hc | FamilyName::Esym | FamilyName::Cut => "formula",
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyName> {
        FamilyName::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::ParamOutOfRange(format!("unknown family `{s}`")))
    }
}

/// `n` is the main size parameter; `d` is the degree for `imm` and `esym`;
/// `q` the field order for `cut`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub n: usize,
    pub d: Option<usize>,
    pub q: Option<u64>,
}

impl FamilyParams {
    pub fn n(n: usize) -> FamilyParams {
        FamilyParams { n, d: None, q: None }
    }

    pub fn with_d(n: usize, d: usize) -> FamilyParams {
        FamilyParams { n, d: Some(d), q: None }
    }

    fn need_d(&self) -> Result<usize> {
        self.d.ok_or_else(|| Error::ParamOutOfRange("parameter d is required".into()))
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.n)?;
        if let Some(d) = self.d {
            write!(f, " d={d}")?;
        }
        if let Some(q) = self.q {
            write!(f, " q={q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FamilyDescriptor {
    pub name: FamilyName,
    pub params: FamilyParams,
    pub construction: Circuit,
    pub metrics: CircuitMetrics,
}

impl FamilyDescriptor {
    pub fn declared_class(&self) -> &'static str {
        self.name.declared_class()
    }

    /// Whether the construction has its declared structural class.
    pub fn class_holds(&self) -> bool {
        let c = &self.construction;
        match self.declared_class() {
            "formula" => c.is_formula(),
            "skew" => c.is_skew(),
            _ => c.is_weakly_skew(),
        }
    }

    /// Compares the construction with the oracle; `None` when either side
    /// is beyond its budget.
    pub fn verify(&self) -> Result<Option<bool>> {
        if estimate_terms(&self.construction)[self.construction.output()] > DEFAULT_TERM_BUDGET {
            return Ok(None);
        }
        let oracle = match family_oracle(self.construction.field(), self.name, self.params) {
            Ok(p) => p,
            Err(Error::BudgetExceeded { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        Ok(Some(expand(&self.construction)? == oracle))
    }

    /// Metadata written next to a generated circuit file.
    pub fn sidecar(&self, verified: Option<bool>) -> String {
        let mut s = String::new();
        writeln!(s, "family {}", self.name).unwrap();
        writeln!(s, "params {}", self.params).unwrap();
        writeln!(s, "field {}", self.construction.field()).unwrap();
        writeln!(s, "class {}", self.declared_class()).unwrap();
        writeln!(s, "size {}", self.metrics.size).unwrap();
        writeln!(s, "depth {}", self.metrics.depth).unwrap();
        writeln!(s, "degree {}", self.metrics.degree).unwrap();
        let v = match verified {
            Some(true) => "true",
            Some(false) => "false",
            None => "skipped",
        };
        writeln!(s, "oracle-verified {v}").unwrap();
        s
    }
}

fn x(i: usize, j: usize) -> String {
    format!("x_{i}_{j}")
}

/// Symmetric edge variable with the smaller index first.
fn edge_var(i: usize, j: usize) -> String {
    x(i.min(j), i.max(j))
}

fn imm_var(k: usize, i: usize, j: usize) -> String {
    format!("{}_{i}_{j}", (b'a' + k as u8) as char)
}

fn check_range(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange(msg.into()))
    }
}

fn declare_square(b: &mut CircuitBuilder, n: usize, skip_diagonal: bool) {
    for i in 1..=n {
        for j in 1..=n {
            if !(skip_diagonal && i == j) {
                b.declare_var(&x(i, j));
            }
        }
    }
}

fn cut_order(field: Field, params: FamilyParams) -> Result<u64> {
    let Some(p) = field.modulus() else {
        return Err(Error::ParamOutOfRange("cut needs a prime field F_q".into()));
    };
    let q = params.q.unwrap_or(p);
    check_range(q == p, "cut parameter q must equal the field order")?;
    Ok(q)
}

pub fn gen_family(field: Field, name: FamilyName, params: FamilyParams) -> Result<FamilyDescriptor> {
    let n = params.n;
    let construction = match name {
        FamilyName::Det => {
            check_range(n >= 1, "det needs n >= 1")?;
            berkowitz_det_circuit(field, n)?
        }
        FamilyName::Per => ryser_formula(field, n)?,
        FamilyName::Hc => hc_formula(field, n)?,
        FamilyName::Imm => imm_circuit(field, n, params.need_d()?)?,
        FamilyName::Esym => esym_formula(field, n, params.need_d()?)?,
        FamilyName::Cut => cut_formula(field, n, cut_order(field, params)?)?,
        FamilyName::Trees => kirchhoff_circuit(field, n)?,
    };
    let metrics = construction.metrics();
    Ok(FamilyDescriptor { name, params, construction, metrics })
}

/// `(-1)^n * sum over nonempty column sets S of (-1)^|S| prod_i sum_{j in S} x_ij`.
fn ryser_formula(field: Field, n: usize) -> Result<Circuit> {
    check_range((1..=12).contains(&n), "per needs 1 <= n <= 12")?;
    let mut b = CircuitBuilder::new(field);
    declare_square(&mut b, n, false);
    let mut terms = Vec::new();
    for s in 1u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|j| s >> j & 1 == 1).collect();
        let rows: Vec<GateId> = (1..=n)
            .map(|i| {
                let ins: Vec<GateId> = cols.iter().map(|&j| b.input(&x(i, j + 1))).collect();
                b.sum(&ins)
            })
            .collect();
        let prod = b.product(&rows);
        let term = if (n + cols.len()) % 2 == 1 {
            let m = b.int(-1);
            b.mul(m, prod)
        } else {
            prod
        };
        terms.push(term);
    }
    let out = b.sum(&terms);
    b.finish(vec![out])
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Sum over directed Hamilton cycles `1 -> v_2 -> ... -> v_n -> 1`.
fn hc_formula(field: Field, n: usize) -> Result<Circuit> {
    check_range((2..=8).contains(&n), "hc needs 2 <= n <= 8")?;
    let mut b = CircuitBuilder::new(field);
    declare_square(&mut b, n, true);
    let mut rest: Vec<usize> = (2..=n).collect();
    let mut terms = Vec::new();
    loop {
        let mut tour = vec![1];
        tour.extend(&rest);
        let edges: Vec<GateId> = (0..n).map(|k| b.input(&x(tour[k], tour[(k + 1) % n]))).collect();
        terms.push(b.product(&edges));
        if !next_permutation(&mut rest) {
            break;
        }
    }
    let out = b.sum(&terms);
    b.finish(vec![out])
}

/// Trace of `A_1 ... A_d` for generic `n x n` matrices named `a`, `b`, ...,
/// as a skew circuit propagating a row vector through the product.
fn imm_circuit(field: Field, n: usize, d: usize) -> Result<Circuit> {
    check_range(n >= 1 && (1..=26).contains(&d), "imm needs n >= 1 and 1 <= d <= 26")?;
    let mut b = CircuitBuilder::new(field);
    for k in 0..d {
        for i in 1..=n {
            for j in 1..=n {
                b.declare_var(&imm_var(k, i, j));
            }
        }
    }
    let mut diag = Vec::with_capacity(n);
    for i in 1..=n {
        if d == 1 {
            diag.push(b.input(&imm_var(0, i, i)));
            continue;
        }
        let mut row: Vec<GateId> = (1..=n).map(|j| b.input(&imm_var(0, i, j))).collect();
        for k in 1..d {
            let cols: Vec<usize> = if k + 1 == d { vec![i] } else { (1..=n).collect() };
            row = cols
                .iter()
                .map(|&j| {
                    let parts: Vec<GateId> = (1..=n)
                        .map(|l| {
                            let a = b.input(&imm_var(k, l, j));
                            b.mul(a, row[l - 1])
                        })
                        .collect();
                    b.sum(&parts)
                })
                .collect();
        }
        diag.push(row[0]);
    }
    let out = b.sum(&diag);
    b.finish(vec![out])
}

fn invert(field: Field, m: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
    let n = m.len();
    let mut a: Vec<Vec<FieldElement>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::DivisionByZero)?;
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        a[col] = a[col].iter().map(|v| v * &inv).collect();
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (v, p) in a[r].iter_mut().zip(&pivot_row) {
                    *v = &*v - &(&f * p);
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `e_d(x_1..x_n)` by interpolating `prod_i (1 + t x_i)` at `t = 0..n`.
fn esym_formula(field: Field, n: usize, d: usize) -> Result<Circuit> {
    check_range(n >= 1 && d <= n, "esym needs n >= 1 and d <= n")?;
    if let Some(p) = field.modulus() {
        if p < n as u64 + 1 {
            return Err(Error::FieldTooSmall { size: p, degree: n as u64 });
        }
    }
    let nodes: Vec<FieldElement> = (0..=n).map(|t| field.int(t as i64)).collect();
    let vander: Vec<Vec<FieldElement>> = nodes.iter().map(|t| (0..=n).map(|k| t.pow(k as u64)).collect()).collect();
    let weights = &invert(field, &vander)?[d];
    let mut b = CircuitBuilder::new(field);
    for i in 1..=n {
        b.declare_var(&format!("x{i}"));
    }
    let mut terms = Vec::new();
    for (t, w) in nodes.iter().zip(weights) {
        if w.is_zero() {
            continue;
        }
        let factors: Vec<GateId> = (1..=n)
            .map(|i| {
                let one = b.constant(field.one());
                let xi = b.input(&format!("x{i}"));
                let tx = if t.is_one() {
                    xi
                } else {
                    let tc = b.constant(t.clone());
                    b.mul(tc, xi)
                };
                b.add(one, tx)
            })
            .collect();
        let p = b.product(&factors);
        let wc = b.constant(w.clone());
        terms.push(b.mul(wc, p));
    }
    let out = if terms.is_empty() { b.int(0) } else { b.sum(&terms) };
    b.finish(vec![out])
}

/// Sum over unordered cuts `{A, B}` (both parts nonempty) of
/// `prod_{i in A, j in B} x_ij^(q-1)`.
fn cut_formula(field: Field, n: usize, q: u64) -> Result<Circuit> {
    check_range((2..=10).contains(&n), "cut needs 2 <= n <= 10")?;
    let mut b = CircuitBuilder::new(field);
    for i in 1..=n {
        for j in i + 1..=n {
            b.declare_var(&x(i, j));
        }
    }
    let mut terms = Vec::new();
    for mask in 1u32..(1 << (n - 1)) {
        let mut factors = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let (ai, aj) = (i < n && mask >> (i - 1) & 1 == 1, j < n && mask >> (j - 1) & 1 == 1);
                if ai != aj {
                    for _ in 0..q - 1 {
                        factors.push(b.input(&x(i, j)));
                    }
                }
            }
        }
        terms.push(b.product(&factors));
    }
    let out = b.sum(&terms);
    b.finish(vec![out])
}

/// Spanning-tree generating function of `K_n` as the determinant of the
/// Laplacian with the last row and column deleted, via the division-free
/// determinant circuit.
fn kirchhoff_circuit(field: Field, n: usize) -> Result<Circuit> {
    check_range(n >= 2, "trees needs n >= 2")?;
    let mut b = CircuitBuilder::new(field);
    for i in 1..=n {
        for j in i + 1..=n {
            b.declare_var(&x(i, j));
        }
    }
    let out = berkowitz_into(&mut b, n - 1, &mut |b, i, j| {
        let (i, j) = (i + 1, j + 1);
        if i == j {
            let ins: Vec<GateId> = (1..=n).filter(|&l| l != i).map(|l| b.input(&edge_var(i, l))).collect();
            Some(b.sum(&ins))
        } else {
            let m = b.int(-1);
            let v = b.input(&edge_var(i, j));
            Some(b.mul(m, v))
        }
    });
    b.finish(vec![out])
}

fn monomial(field: Field, vars: &std::sync::Arc<[String]>, names: &[String]) -> SparsePolynomial {
    let mut e = vec![0u32; vars.len()];
    for n in names {
        e[vars.iter().position(|v| v == n).expect("declared")] += 1;
    }
    SparsePolynomial::from_terms(field, vars.clone(), [(e, field.one())])
}

fn budget(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::BudgetExceeded { estimated: n as u128, limit: limit as u128 });
    }
    Ok(())
}

/// The defining polynomial of a family, by direct enumeration.
pub fn family_oracle(field: Field, name: FamilyName, params: FamilyParams) -> Result<SparsePolynomial> {
    let n = params.n;
    match name {
        FamilyName::Det => {
            budget(n, 7)?;
            symbolic_det(&SymMatrix::generic(field, n, "x"))
        }
        FamilyName::Per => {
            budget(n, 7)?;
            brute_per(&SymMatrix::generic(field, n, "x"))
        }
        FamilyName::Hc => {
            budget(n, 8)?;
            check_range(n >= 2, "hc needs n >= 2")?;
            let names: Vec<String> = (1..=n).flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| x(i, j))).collect();
            let vars = var_list(&names);
            let mut acc = SparsePolynomial::zero(field, vars.clone());
            let mut p: Vec<usize> = (0..n).collect();
            loop {
                let mut len = 1;
                let mut v = p[0];
                while v != 0 {
                    v = p[v];
                    len += 1;
                }
                if len == n {
                    let edges: Vec<String> = (0..n).map(|i| x(i + 1, p[i] + 1)).collect();
                    acc = acc.add(&monomial(field, &vars, &edges));
                }
                if !next_permutation(&mut p) {
                    break;
                }
            }
            Ok(acc)
        }
        FamilyName::Imm => {
            let d = params.need_d()?;
            budget(n.pow(d as u32), 1 << 16)?;
            let names: Vec<String> =
                (0..d).flat_map(|k| (1..=n).flat_map(move |i| (1..=n).map(move |j| imm_var(k, i, j)))).collect();
            let vars = var_list(&names);
            let mut acc = SparsePolynomial::zero(field, vars.clone());
            let mut idx = vec![1usize; d];
            loop {
                let factors: Vec<String> = (0..d).map(|k| imm_var(k, idx[k], idx[(k + 1) % d])).collect();
                acc = acc.add(&monomial(field, &vars, &factors));
                let Some(pos) = (0..d).rev().find(|&k| idx[k] < n) else { break };
                idx[pos] += 1;
                idx[pos + 1..].iter_mut().for_each(|v| *v = 1);
            }
            Ok(acc)
        }
        FamilyName::Esym => {
            let d = params.need_d()?;
            budget(n, 20)?;
            let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            let vars = var_list(&names);
            let mut acc = SparsePolynomial::zero(field, vars.clone());
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize == d {
                    let chosen: Vec<String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| names[i].clone()).collect();
                    acc = acc.add(&monomial(field, &vars, &chosen));
                }
            }
            Ok(acc)
        }
        FamilyName::Cut => {
            let q = cut_order(field, params)?;
            budget(n, 12)?;
            let names: Vec<String> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| x(i, j))).collect();
            let vars = var_list(&names);
            let mut acc = SparsePolynomial::zero(field, vars.clone());
            // parts containing node 1, other than the whole set
            for mask in 0u32..(1 << n) {
                if mask & 1 == 0 || mask == (1 << n) - 1 {
                    continue;
                }
                let mut crossing = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if mask >> i & 1 == 1 && mask >> j & 1 == 0 {
                            for _ in 0..q - 1 {
                                crossing.push(edge_var(i + 1, j + 1));
                            }
                        }
                    }
                }
                acc = acc.add(&monomial(field, &vars, &crossing));
            }
            Ok(acc)
        }
        FamilyName::Trees => {
            budget(n, 7)?;
            check_range(n >= 2, "trees needs n >= 2")?;
            let edges: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
            let names: Vec<String> = edges.iter().map(|&(i, j)| x(i, j)).collect();
            let vars = var_list(&names);
            let mut acc = SparsePolynomial::zero(field, vars.clone());
            let mut pick: Vec<usize> = (0..n - 1).collect();
            loop {
                let mut parent: Vec<usize> = (0..=n).collect();
                fn find(p: &mut [usize], v: usize) -> usize {
                    let mut r = v;
                    while p[r] != r {
                        r = p[r];
                    }
                    p[v] = r;
                    r
                }
                let acyclic = pick.iter().all(|&e| {
                    let (a, b) = edges[e];
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                    ra != rb
                });
                if acyclic {
                    let chosen: Vec<String> = pick.iter().map(|&e| names[e].clone()).collect();
                    acc = acc.add(&monomial(field, &vars, &chosen));
                }
                let k = pick.len();
                let Some(pos) = (0..k).rev().find(|&i| pick[i] < edges.len() - k + i) else { break };
                pick[pos] += 1;
                for i in pos + 1..k {
                    pick[i] = pick[i - 1] + 1;
                }
            }
            Ok(acc)
        }
    }
}

/// Generating function of the perfect matchings of `K_{n,n}`, edge `(i, j)`
/// weighted `x_i_j`, by enumerating all `n`-edge subsets.
pub fn perfect_matching_gf(field: Field, n: usize) -> Result<SparsePolynomial> {
    budget(n, 5)?;
    let names: Vec<String> = (1..=n).flat_map(|i| (1..=n).map(move |j| x(i, j))).collect();
    let vars = var_list(&names);
    let mut acc = SparsePolynomial::zero(field, vars.clone());
    let total = n * n;
    for mask in 0u64..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let (mut rows, mut cols) = (0u32, 0u32);
        for e in 0..total {
            if mask >> e & 1 == 1 {
                rows |= 1 << (e / n);
                cols |= 1 << (e % n);
            }
        }
        if rows.count_ones() as usize == n && cols.count_ones() as usize == n {
            let chosen: Vec<String> = (0..total).filter(|e| mask >> e & 1 == 1).map(|e| names[e].clone()).collect();
            acc = acc.add(&monomial(field, &vars, &chosen));
        }
    }
    Ok(acc)
}

/// Largest number of summed variables accepted by [`exponential_sum`].
pub const MAX_SUMMED_VARS: usize = 20;

/// `sum over e in {0,1}^k of g(x, e)` for the listed variables.
pub fn exponential_sum(g: &Circuit, summed: &[&str]) -> Result<SparsePolynomial> {
    if summed.len() > MAX_SUMMED_VARS {
        return Err(Error::BudgetExceeded { estimated: 1 << summed.len(), limit: 1 << MAX_SUMMED_VARS });
    }
    for y in summed {
        if g.var_index(y).is_none() {
            return Err(Error::UnknownVariable(y.to_string()));
        }
    }
    Ok(expand(g)?.sum_over_cube(summed))
}

/// `sum over e in {0,1}^n of phi(e) x_1^e_1 ... x_n^e_n`, the generating
/// polynomial of a Boolean property.
pub fn criterion_sum(field: Field, n: usize, phi: impl Fn(&[bool]) -> bool) -> Result<SparsePolynomial> {
    budget(n, MAX_SUMMED_VARS)?;
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let vars = var_list(&names);
    let mut acc = SparsePolynomial::zero(field, vars.clone());
    for mask in 0u32..(1 << n) {
        let e: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if phi(&e) {
            acc.add_term(e.iter().map(|&b| u32::from(b)).collect(), field.one());
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate_dense;
    use crate::poly::parse_polynomial;

    fn q() -> Field {
        Field::rationals()
    }

    fn at_ones(c: &Circuit) -> FieldElement {
        evaluate_dense(c, &vec![c.field().one(); c.vars().len()])[0].clone()
    }

    #[test]
    fn constructions_match_oracles() {
        for (name, params) in [
            (FamilyName::Det, FamilyParams::n(3)),
            (FamilyName::Per, FamilyParams::n(3)),
            (FamilyName::Hc, FamilyParams::n(4)),
            (FamilyName::Imm, FamilyParams::with_d(2, 3)),
            (FamilyName::Esym, FamilyParams::with_d(4, 2)),
            (FamilyName::Trees, FamilyParams::n(4)),
        ] {
            let d = gen_family(q(), name, params).unwrap();
            assert!(d.class_holds(), "{name}");
            assert_eq!(d.verify().unwrap(), Some(true), "{name}");
        }
    }

    #[test]
    fn worked_examples() {
        let hc = gen_family(q(), FamilyName::Hc, FamilyParams::n(4)).unwrap();
        assert_eq!(at_ones(&hc.construction), q().int(6));
        let es = gen_family(q(), FamilyName::Esym, FamilyParams::with_d(3, 2)).unwrap();
        let pt = [1, 2, 3].map(|v| q().int(v));
        assert_eq!(evaluate_dense(&es.construction, &pt)[0], q().int(11));
        let f3 = Field::prime(3).unwrap();
        let cut = gen_family(f3, FamilyName::Cut, FamilyParams::n(3)).unwrap();
        let want = parse_polynomial("x_1_2^2 * x_1_3^2\nx_1_2^2 * x_2_3^2\nx_1_3^2 * x_2_3^2", f3).unwrap();
        assert_eq!(expand(&cut.construction).unwrap(), want);
        assert_eq!(family_oracle(f3, FamilyName::Cut, FamilyParams::n(3)).unwrap(), want);
        let trees = gen_family(q(), FamilyName::Trees, FamilyParams::n(3)).unwrap();
        assert_eq!(at_ones(&trees.construction), q().int(3));
        let imm = family_oracle(q(), FamilyName::Imm, FamilyParams::with_d(2, 2)).unwrap();
        let want = parse_polynomial("a_1_1 * b_1_1\na_1_2 * b_2_1\na_2_1 * b_1_2\na_2_2 * b_2_2", q()).unwrap();
        assert_eq!(imm, want);
    }

    #[test]
    fn matchings_are_the_permanent() {
        for n in 1..=3 {
            assert_eq!(perfect_matching_gf(q(), n).unwrap(), family_oracle(q(), FamilyName::Per, FamilyParams::n(n)).unwrap());
        }
    }

    #[test]
    fn parameter_errors() {
        let f3 = Field::prime(3).unwrap();
        assert!(matches!(gen_family(f3, FamilyName::Esym, FamilyParams::with_d(4, 2)), Err(Error::FieldTooSmall { .. })));
        assert!(matches!(gen_family(q(), FamilyName::Cut, FamilyParams::n(3)), Err(Error::ParamOutOfRange(_))));
        assert!(matches!(gen_family(q(), FamilyName::Imm, FamilyParams::n(3)), Err(Error::ParamOutOfRange(_))));
        assert!("nope".parse::<FamilyName>().is_err());
    }

    #[test]
    fn sums() {
        let mut b = CircuitBuilder::new(q());
        let y = b.input("y1");
        let xx = b.input("x");
        let p = b.mul(y, xx);
        let g = b.finish(vec![p]).unwrap();
        assert_eq!(exponential_sum(&g, &["y1"]).unwrap(), SparsePolynomial::var(q(), "x"));
        assert_eq!(exponential_sum(&g, &[]).unwrap(), expand(&g).unwrap());
        assert!(matches!(exponential_sum(&g, &["z"]), Err(Error::UnknownVariable(_))));
        let both = criterion_sum(q(), 2, |e| e[0] && e[1]).unwrap();
        assert_eq!(both, parse_polynomial("x1 * x2", q()).unwrap());
    }
}
