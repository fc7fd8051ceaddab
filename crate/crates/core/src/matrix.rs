//! Square matrices with affine-linear entries, and the determinant and
//! permanent routines used as oracles: Leibniz, cycle covers, Bareiss,
//! Ryser and a row-by-row sparse permanent.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::circuit::valid_ident;
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::poly::{var_list, SparsePolynomial};

/// `constant + Σ coeff·var`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub constant: FieldElement,
    pub coeffs: BTreeMap<String, FieldElement>,
}

impl Affine {
    pub fn zero(field: Field) -> Affine {
        Affine::constant(field.zero())
    }

    pub fn constant(c: FieldElement) -> Affine {
        Affine { constant: c, coeffs: BTreeMap::new() }
    }

    pub fn var(field: Field, name: &str) -> Affine {
        Affine::scaled_var(field.one(), name)
    }

    pub fn scaled_var(c: FieldElement, name: &str) -> Affine {
        let field = c.field();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(name.to_string(), c);
        }
        Affine { constant: field.zero(), coeffs }
    }

    pub fn field(&self) -> Field {
        self.constant.field()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// A constant, or a single variable with coefficient one.
    pub fn is_projection_entry(&self) -> bool {
        self.coeffs.is_empty()
            || (self.constant.is_zero() && self.coeffs.len() == 1 && self.coeffs.values().all(|c| c.is_one()))
    }

    pub fn add(&self, other: &Affine) -> Affine {
        let mut out = self.clone();
        out.constant = &out.constant + &other.constant;
        for (v, c) in &other.coeffs {
            let s = match out.coeffs.get(v) {
                Some(a) => a + c,
                None => c.clone(),
            };
            if s.is_zero() {
                out.coeffs.remove(v);
            } else {
                out.coeffs.insert(v.clone(), s);
            }
        }
        out
    }

    pub fn scale(&self, k: &FieldElement) -> Affine {
        if k.is_zero() {
            return Affine::zero(self.field());
        }
        Affine {
            constant: &self.constant * k,
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
        }
    }

    pub fn neg(&self) -> Affine {
        self.scale(&self.field().neg_one())
    }

    pub fn to_poly(&self, vars: &Arc<[String]>) -> SparsePolynomial {
        let field = self.field();
        let mut p = SparsePolynomial::constant(field, vars.clone(), self.constant.clone());
        for (v, c) in &self.coeffs {
            let idx = vars.iter().position(|w| w == v).expect("variable listed");
            let mut e = vec![0; vars.len()];
            e[idx] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn eval(&self, point: &HashMap<String, FieldElement>) -> Result<FieldElement> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            let x = point.get(v).ok_or_else(|| Error::MissingAssignment(v.clone()))?;
            acc = &acc + &(c * x);
        }
        Ok(acc)
    }

    /// Parses `x+y-1`, `-x`, `2*x`, `1/2`, `0` (no spaces).
    pub fn parse(text: &str, field: Field) -> Result<Affine> {
        let bad = || Error::FieldLiteralInvalid(text.to_string());
        if text.is_empty() {
            return Err(bad());
        }
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, ch) in text.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 {
                pieces.push(&text[start..i]);
                start = i;
            }
        }
        pieces.push(&text[start..]);
        let mut out = Affine::zero(field);
        for piece in pieces {
            let (neg, body) = match piece.as_bytes().first() {
                Some(b'-') => (true, &piece[1..]),
                Some(b'+') => (false, &piece[1..]),
                _ => (false, piece),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let term = match body.split_once('*') {
                Some((c, v)) if valid_ident(v) => Affine::scaled_var(field.parse_literal(c)?, v),
                Some(_) => return Err(bad()),
                None if valid_ident(body) => Affine::var(field, body),
                None => Affine::constant(field.parse_literal(body)?),
            };
            out = out.add(&if neg { term.neg() } else { term });
        }
        Ok(out)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let s = if c.is_one() {
                v.clone()
            } else if (-c).is_one() {
                format!("-{v}")
            } else {
                format!("{c}*{v}")
            };
            if !first && !s.starts_with('-') {
                f.write_str("+")?;
            }
            f.write_str(&s)?;
            first = false;
        }
        if first || !self.constant.is_zero() {
            let s = self.constant.to_string();
            if !first && !s.starts_with('-') {
                f.write_str("+")?;
            }
            f.write_str(&s)?;
        }
        Ok(())
    }
}

/// Square matrix over affine-linear forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    field: Field,
    rows: Vec<Vec<Affine>>,
}

impl SymMatrix {
    pub fn new(field: Field, rows: Vec<Vec<Affine>>) -> Result<SymMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix is not square".into()));
        }
        if rows.iter().flatten().any(|a| a.field() != field || a.coeffs.values().any(|c| c.field() != field)) {
            return Err(Error::FieldMismatch);
        }
        Ok(SymMatrix { field, rows })
    }

    pub fn zeros(field: Field, n: usize) -> SymMatrix {
        SymMatrix { field, rows: vec![vec![Affine::zero(field); n]; n] }
    }

    pub fn from_constants(field: Field, m: &[Vec<FieldElement>]) -> SymMatrix {
        SymMatrix { field, rows: m.iter().map(|r| r.iter().cloned().map(Affine::constant).collect()).collect() }
    }

    /// Generic matrix of distinct variables `prefix_i_j` (1-based).
    pub fn generic(field: Field, n: usize, prefix: &str) -> SymMatrix {
        let rows = (1..=n)
            .map(|i| (1..=n).map(|j| Affine::var(field, &format!("{prefix}_{i}_{j}"))).collect())
            .collect();
        SymMatrix { field, rows }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn side(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Affine>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Affine {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, a: Affine) {
        self.rows[i][j] = a;
    }

    /// Variables in order of first appearance (row-major).
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for a in self.rows.iter().flatten() {
            for v in a.coeffs.keys() {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    pub fn nonzero_off_diagonal(&self) -> usize {
        let n = self.side();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| i != j && !self.rows[i][j].is_zero()).count()
    }

    pub fn is_projection(&self) -> bool {
        self.rows.iter().flatten().all(Affine::is_projection_entry)
    }

    pub fn transpose(&self) -> SymMatrix {
        let n = self.side();
        SymMatrix { field: self.field, rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect()).collect() }
    }

    pub fn permuted(&self, perm: &[usize]) -> SymMatrix {
        let n = self.side();
        SymMatrix {
            field: self.field,
            rows: (0..n).map(|i| (0..n).map(|j| self.rows[perm[i]][perm[j]].clone()).collect()).collect(),
        }
    }

    pub fn eval(&self, point: &HashMap<String, FieldElement>) -> Result<Vec<Vec<FieldElement>>> {
        self.rows.iter().map(|r| r.iter().map(|a| a.eval(point)).collect()).collect()
    }

    fn entry_polys(&self) -> (Arc<[String]>, Vec<Vec<Option<SparsePolynomial>>>) {
        let vars = var_list(&self.variables());
        let polys = self
            .rows
            .iter()
            .map(|r| r.iter().map(|a| (!a.is_zero()).then(|| a.to_poly(&vars))).collect())
            .collect();
        (vars, polys)
    }
}

fn product_budget_check(side: usize, limit: usize) -> Result<()> {
    if side > limit {
        let est = (1..=side as u128).product::<u128>();
        let lim = (1..=limit as u128).product::<u128>();
        return Err(Error::BudgetExceeded { estimated: est, limit: lim });
    }
    Ok(())
}

/// Largest side accepted by the permutation-sum oracles.
pub const LEIBNIZ_MAX_SIDE: usize = 9;

/// Determinant as a signed sum over permutations (zero entries pruned).
pub fn symbolic_det(m: &SymMatrix) -> Result<SparsePolynomial> {
    product_budget_check(m.side(), LEIBNIZ_MAX_SIDE)?;
    Ok(permutation_sum(m, true))
}

/// Permanent as an unsigned sum over permutations.
pub fn brute_per(m: &SymMatrix) -> Result<SparsePolynomial> {
    product_budget_check(m.side(), 7)?;
    Ok(permutation_sum(m, false))
}

fn permutation_sum(m: &SymMatrix, signed: bool) -> SparsePolynomial {
    let n = m.side();
    let (vars, polys) = m.entry_polys();
    let field = m.field();
    let mut total = SparsePolynomial::zero(field, vars.clone());
    let one = SparsePolynomial::constant(field, vars.clone(), field.one());
    let mut used = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    fn rec(
        row: usize,
        n: usize,
        polys: &[Vec<Option<SparsePolynomial>>],
        used: &mut [bool],
        perm: &mut Vec<usize>,
        acc: &SparsePolynomial,
        signed: bool,
        total: &mut SparsePolynomial,
    ) {
        if row == n {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
            let term = if signed && inversions % 2 == 1 { acc.neg() } else { acc.clone() };
            *total = total.add(&term);
            return;
        }
        for col in 0..n {
            if used[col] {
                continue;
            }
            let Some(p) = &polys[row][col] else { continue };
            used[col] = true;
            perm.push(col);
            let next = acc.mul(p);
            rec(row + 1, n, polys, used, perm, &next, signed, total);
            perm.pop();
            used[col] = false;
        }
    }
    rec(0, n, &polys, &mut used, &mut perm, &one, signed, &mut total);
    total
}

/// Determinant as a sum over cycle covers of the weighted digraph of `m`,
/// each cover signed by `(-1)^(n - #cycles)`.
pub fn cycle_cover_det(m: &SymMatrix) -> Result<SparsePolynomial> {
    product_budget_check(m.side(), LEIBNIZ_MAX_SIDE)?;
    let n = m.side();
    let (vars, polys) = m.entry_polys();
    let field = m.field();
    let mut total = SparsePolynomial::zero(field, vars.clone());
    let one = SparsePolynomial::constant(field, vars.clone(), field.one());
    let mut covered = vec![false; n];

    // Walk: `start` is the first node of the open cycle, `cur` its current end.
    #[allow(clippy::too_many_arguments)]
    fn rec(
        n: usize,
        polys: &[Vec<Option<SparsePolynomial>>],
        covered: &mut [bool],
        open: Option<(usize, usize)>,
        cycles: usize,
        acc: &SparsePolynomial,
        total: &mut SparsePolynomial,
    ) {
        match open {
            None => {
                let Some(start) = (0..n).find(|&i| !covered[i]) else {
                    let term = if (n - cycles) % 2 == 1 { acc.neg() } else { acc.clone() };
                    *total = total.add(&term);
                    return;
                };
                covered[start] = true;
                rec(n, polys, covered, Some((start, start)), cycles, acc, total);
                covered[start] = false;
            }
            Some((start, cur)) => {
                if let Some(p) = &polys[cur][start] {
                    rec(n, polys, covered, None, cycles + 1, &acc.mul(p), total);
                }
                for next in 0..n {
                    if covered[next] {
                        continue;
                    }
                    let Some(p) = &polys[cur][next] else { continue };
                    covered[next] = true;
                    rec(n, polys, covered, Some((start, next)), cycles, &acc.mul(p), total);
                    covered[next] = false;
                }
            }
        }
    }
    rec(n, &polys, &mut covered, None, 0, &one, &mut total);
    Ok(total)
}

/// Fraction-free (Bareiss) determinant of a constant matrix.
pub fn bareiss_det(field: Field, m: &[Vec<FieldElement>]) -> FieldElement {
    let n = m.len();
    if n == 0 {
        return field.one();
    }
    let mut a: Vec<Vec<FieldElement>> = m.to_vec();
    let mut sign_flip = false;
    let mut prev = field.one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return field.zero(),
            }
        }
        let inv_prev = prev.inv().expect("nonzero previous pivot");
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = &num * &inv_prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign_flip {
        -d
    } else {
        d
    }
}

/// Ryser's inclusion-exclusion formula with Gray-code updates.
pub fn ryser(field: Field, m: &[Vec<FieldElement>]) -> Result<FieldElement> {
    let n = m.len();
    if n == 0 {
        return Ok(field.one());
    }
    if n > 30 {
        return Err(Error::BudgetExceeded { estimated: 1u128 << n, limit: 1 << 30 });
    }
    if let Some(p) = field.modulus() {
        let a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|x| x.residue().expect("residue")).collect()).collect();
        return Ok(FieldElement::Residue { value: ryser_mod(&a, p), modulus: p });
    }
    // Σ over column subsets S of (-1)^(n-|S|) Π_i Σ_{j∈S} a_ij.
    let mut row_sums = vec![field.zero(); n];
    let mut total = field.zero();
    let mut in_set = vec![false; n];
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        in_set[j] = !in_set[j];
        for (i, s) in row_sums.iter_mut().enumerate() {
            *s = if in_set[j] { &*s + &m[i][j] } else { &*s - &m[i][j] };
        }
        let gray = k ^ (k >> 1);
        let mut prod = field.one();
        for s in &row_sums {
            if s.is_zero() {
                prod = field.zero();
                break;
            }
            prod = &prod * s;
        }
        if (n as u32 - gray.count_ones()) % 2 == 1 {
            total = &total - &prod;
        } else {
            total = &total + &prod;
        }
    }
    Ok(total)
}

fn ryser_mod(a: &[Vec<u64>], p: u64) -> u64 {
    let n = a.len();
    let mut row_sums = vec![0u64; n];
    let mut total: u64 = 0;
    let mut in_set = vec![false; n];
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        in_set[j] = !in_set[j];
        for i in 0..n {
            row_sums[i] = if in_set[j] { (row_sums[i] + a[i][j]) % p } else { (row_sums[i] + p - a[i][j]) % p };
        }
        let gray = k ^ (k >> 1);
        let mut prod = 1u64;
        for &s in &row_sums {
            prod = ((prod as u128 * s as u128) % p as u128) as u64;
            if prod == 0 {
                break;
            }
        }
        if (n as u32 - gray.count_ones()) % 2 == 1 {
            total = (total + p - prod) % p;
        } else {
            total = (total + prod) % p;
        }
    }
    total
}

/// Ryser's formula over polynomial entries; the work is `2^n` products of
/// `n` row sums, so `2^n` is charged against `budget`.
pub fn ryser_symbolic(m: &SymMatrix, budget: u128) -> Result<SparsePolynomial> {
    let n = m.side();
    let cost = 1u128.checked_shl(n as u32).unwrap_or(u128::MAX);
    if cost > budget {
        return Err(Error::BudgetExceeded { estimated: cost, limit: budget });
    }
    let (vars, polys) = m.entry_polys();
    let field = m.field();
    let zero = SparsePolynomial::zero(field, vars.clone());
    let mut total = zero.clone();
    for s in 1u64..(1u64 << n) {
        let mut prod = SparsePolynomial::constant(field, vars.clone(), field.one());
        for row in polys.iter().take(n) {
            let mut rs = zero.clone();
            for (j, entry) in row.iter().enumerate() {
                if s >> j & 1 == 1 {
                    if let Some(p) = entry {
                        rs = rs.add(p);
                    }
                }
            }
            prod = prod.mul(&rs);
            if prod.is_zero() {
                break;
            }
        }
        if (n as u32 - s.count_ones()) % 2 == 1 {
            total = total.sub(&prod);
        } else {
            total = total.add(&prod);
        }
    }
    Ok(total)
}

/// Row order that introduces as few new columns as possible at each step.
fn greedy_row_order(support: &[Vec<usize>], ncols: usize) -> Vec<usize> {
    let n = support.len();
    let mut done = vec![false; n];
    let mut seen = vec![false; ncols];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let best = (0..n)
            .filter(|&r| !done[r])
            .min_by_key(|&r| (support[r].iter().filter(|&&c| !seen[c]).count(), r))
            .expect("row left");
        done[best] = true;
        for &c in &support[best] {
            seen[c] = true;
        }
        order.push(best);
    }
    order
}

/// Permanent of a sparse matrix by dynamic programming over the set of
/// columns used so far; columns that no remaining row can reach are
/// dropped from the state. `entries[i]` lists the nonzero `(column, value)`
/// pairs of row `i`.
pub fn sparse_permanent<V: Clone>(
    entries: &[Vec<(usize, V)>],
    one: V,
    add: impl Fn(&V, &V) -> V,
    mul: impl Fn(&V, &V) -> V,
    state_budget: usize,
) -> Result<Option<V>> {
    let n = entries.len();
    if n == 0 {
        return Ok(Some(one));
    }
    if n > 64 {
        return Err(Error::BudgetExceeded { estimated: n as u128, limit: 64 });
    }
    let support: Vec<Vec<usize>> = entries.iter().map(|r| r.iter().map(|(c, _)| *c).collect()).collect();
    let order = greedy_row_order(&support, n);
    let mut last_row = vec![usize::MAX; n];
    for (step, &r) in order.iter().enumerate() {
        for &c in &support[r] {
            last_row[c] = step;
        }
    }
    if last_row.contains(&usize::MAX) {
        return Ok(None);
    }
    let mut states: HashMap<u64, V> = HashMap::from([(0u64, one)]);
    for (step, &r) in order.iter().enumerate() {
        let retire: u64 = (0..n).filter(|&c| last_row[c] == step).fold(0, |m, c| m | 1 << c);
        let mut next: HashMap<u64, V> = HashMap::with_capacity(states.len() * 2);
        for (mask, val) in &states {
            for (c, w) in &entries[r] {
                let bit = 1u64 << c;
                if mask & bit != 0 {
                    continue;
                }
                let used = mask | bit;
                if used & retire != retire {
                    continue;
                }
                let key = used & !retire;
                let v = mul(val, w);
                match next.get_mut(&key) {
                    Some(acc) => *acc = add(acc, &v),
                    None => {
                        next.insert(key, v);
                    }
                }
            }
        }
        if next.len() > state_budget {
            return Err(Error::BudgetExceeded { estimated: next.len() as u128, limit: state_budget as u128 });
        }
        states = next;
        if states.is_empty() {
            return Ok(None);
        }
    }
    Ok(states.remove(&0))
}

/// Exact permanent polynomial of a sparse symbolic matrix.
pub fn sparse_per_symbolic(m: &SymMatrix) -> Result<SparsePolynomial> {
    let (vars, polys) = m.entry_polys();
    let field = m.field();
    let entries: Vec<Vec<(usize, SparsePolynomial)>> = polys
        .into_iter()
        .map(|r| r.into_iter().enumerate().filter_map(|(j, p)| p.map(|p| (j, p))).collect())
        .collect();
    let one = SparsePolynomial::constant(field, vars.clone(), field.one());
    let out = sparse_permanent(&entries, one, |a, b| a.add(b), |a, b| a.mul(b), 1 << 22)?;
    Ok(out.unwrap_or_else(|| SparsePolynomial::zero(field, vars)))
}

/// Exact permanent of a sparse constant matrix.
pub fn sparse_per_numeric(field: Field, m: &[Vec<FieldElement>]) -> Result<FieldElement> {
    let entries: Vec<Vec<(usize, FieldElement)>> =
        m.iter().map(|r| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect()).collect();
    let out = sparse_permanent(&entries, field.one(), |a, b| a + b, |a, b| a * b, 1 << 22)?;
    Ok(out.unwrap_or_else(|| field.zero()))
}

/// Permanent of a constant matrix: Ryser for small sides, the sparse
/// dynamic program beyond.
pub fn permanent(field: Field, m: &[Vec<FieldElement>]) -> Result<FieldElement> {
    if m.len() <= 20 {
        ryser(field, m)
    } else {
        sparse_per_numeric(field, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::rationals()
    }

    fn abcd() -> SymMatrix {
        let f = q();
        SymMatrix::new(f, vec![vec![Affine::var(f, "a"), Affine::var(f, "b")], vec![Affine::var(f, "c"), Affine::var(f, "d")]])
            .unwrap()
    }

    #[test]
    fn two_by_two() {
        let m = abcd();
        assert_eq!(symbolic_det(&m).unwrap(), parse_polynomial("a * d\n-1 * b * c", q()).unwrap());
        assert_eq!(brute_per(&m).unwrap(), parse_polynomial("a * d\nb * c", q()).unwrap());
        assert_eq!(cycle_cover_det(&m).unwrap(), symbolic_det(&m).unwrap());
        assert_eq!(ryser_symbolic(&m, 1 << 20).unwrap(), brute_per(&m).unwrap());
        assert_eq!(sparse_per_symbolic(&m).unwrap(), brute_per(&m).unwrap());
    }

    #[test]
    fn generic_three_by_three() {
        let m = SymMatrix::generic(q(), 3, "x");
        let d = symbolic_det(&m).unwrap();
        assert_eq!(d.num_terms(), 6);
        assert_eq!(d.total_degree(), 3);
        assert_eq!(d.coefficient(&[("x_1_2", 1), ("x_2_1", 1), ("x_3_3", 1)]), q().int(-1));
        assert_eq!(cycle_cover_det(&m).unwrap(), d);
    }

    #[test]
    fn affine_text_round_trip() {
        let f = q();
        for s in ["x+y-1", "-x", "2*x", "1/2", "0", "-1/2*x+3", "x"] {
            let a = Affine::parse(s, f).unwrap();
            assert_eq!(Affine::parse(&a.to_string(), f).unwrap(), a, "{s}");
        }
        assert_eq!(Affine::parse("x+y-1", f).unwrap().to_string(), "x+y-1");
        assert_eq!(Affine::parse("x-x", f).unwrap().to_string(), "0");
        assert!(Affine::parse("x+", f).is_err());
        assert!(Affine::parse("2*3", f).is_err());
    }

    fn random_constant(f: Field, rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<FieldElement>> {
        (0..n).map(|_| (0..n).map(|_| f.int(rng.gen_range(-4..=4))).collect()).collect()
    }

    #[test]
    fn dual_oracles_agree_on_mixed_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = q();
        for _ in 0..100 {
            let rows = (0..4)
                .map(|_| {
                    (0..4)
                        .map(|_| match rng.gen_range(0..4) {
                            0 => Affine::zero(f),
                            1 => Affine::constant(f.int(rng.gen_range(-3..=3))),
                            _ => Affine::var(f, ["a", "b", "c"][rng.gen_range(0..3)]),
                        })
                        .collect()
                })
                .collect();
            let m = SymMatrix::new(f, rows).unwrap();
            assert_eq!(symbolic_det(&m).unwrap(), cycle_cover_det(&m).unwrap());
            let per = brute_per(&m).unwrap();
            assert_eq!(ryser_symbolic(&m, 1 << 20).unwrap(), per);
            assert_eq!(sparse_per_symbolic(&m).unwrap(), per);
        }
    }

    #[test]
    fn numeric_determinants_and_permanents() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for f in [q(), Field::prime(101).unwrap(), Field::prime(2).unwrap()] {
            for n in 1..=5 {
                for _ in 0..20 {
                    let a = random_constant(f, &mut rng, n);
                    let sm = SymMatrix::from_constants(f, &a);
                    let det = symbolic_det(&sm).unwrap().eval_dense(&[]);
                    assert_eq!(bareiss_det(f, &a), det);
                    let per = brute_per(&sm).unwrap().eval_dense(&[]);
                    assert_eq!(ryser(f, &a).unwrap(), per);
                    assert_eq!(sparse_per_numeric(f, &a).unwrap(), per);
                }
            }
        }
    }

    #[test]
    fn classic_permanents() {
        let f = q();
        let ones = |n: usize| vec![vec![f.one(); n]; n];
        assert_eq!(ryser(f, &ones(4)).unwrap(), f.int(24));
        assert_eq!(ryser(f, &ones(3)).unwrap(), f.int(6));
        let id: Vec<Vec<FieldElement>> =
            (0..5).map(|i| (0..5).map(|j| if i == j { f.one() } else { f.zero() }).collect()).collect();
        assert_eq!(ryser(f, &id).unwrap(), f.one());
        assert_eq!(sparse_per_numeric(f, &id).unwrap(), f.one());
    }

    #[test]
    fn empty_column_means_zero_permanent() {
        let f = q();
        let a = vec![vec![f.one(), f.zero()], vec![f.one(), f.zero()]];
        assert_eq!(sparse_per_numeric(f, &a).unwrap(), f.zero());
        assert_eq!(ryser(f, &a).unwrap(), f.zero());
    }

    #[test]
    fn per2_sign_trick() {
        let f = q();
        let m = SymMatrix::new(
            f,
            vec![vec![Affine::var(f, "a"), Affine::var(f, "b").neg()], vec![Affine::var(f, "c"), Affine::var(f, "d")]],
        )
        .unwrap();
        assert_eq!(symbolic_det(&m).unwrap(), brute_per(&abcd()).unwrap());
    }
}
