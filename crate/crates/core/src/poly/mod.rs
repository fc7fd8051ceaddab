//! Exact sparse multivariate polynomials.
//!
//! Terms are stored in a `BTreeMap` keyed by dense exponent vectors over the
//! polynomial's variable list. Two polynomials over different variable lists
//! are compared and combined after aligning both to the union of the lists,
//! so `p` and `p + 0*z` are equal.

mod pd_rank;
mod text;

pub use pd_rank::{pd_matrix_rank, rank, PdMatrix};
pub use text::{format_polynomial, parse_polynomial};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug)]
pub struct SparsePolynomial {
    field: Field,
    vars: Arc<[String]>,
    terms: BTreeMap<Exponents, FieldElement>,
}

/// Builds a shared variable list.
pub fn var_list<S: AsRef<str>>(names: &[S]) -> Arc<[String]> {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

fn union_vars(a: &Arc<[String]>, b: &Arc<[String]>) -> Arc<[String]> {
    if Arc::ptr_eq(a, b) || a[..] == b[..] {
        return a.clone();
    }
    let mut out: Vec<String> = a.to_vec();
    for v in b.iter() {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out.into()
}

impl SparsePolynomial {
    pub fn zero(field: Field, vars: Arc<[String]>) -> Self {
        SparsePolynomial { field, vars, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, vars: Arc<[String]>, c: FieldElement) -> Self {
        let mut p = Self::zero(field, vars);
        let n = p.vars.len();
        p.insert_term(vec![0; n], c);
        p
    }

    /// The variable at position `idx` of `vars`.
    pub fn variable(field: Field, vars: Arc<[String]>, idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero(field, vars);
        p.insert_term(e, field.one());
        p
    }

    /// A single variable by name; the variable list is just that name.
    pub fn var(field: Field, name: &str) -> Self {
        Self::variable(field, var_list(&[name]), 0)
    }

    pub fn from_terms(field: Field, vars: Arc<[String]>, terms: impl IntoIterator<Item = (Exponents, FieldElement)>) -> Self {
        let mut p = Self::zero(field, vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, FieldElement> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_term(&mut self, e: Exponents, c: FieldElement) {
        if !c.is_zero() {
            self.terms.insert(e, c);
        }
    }

    /// Adds `c * x^e` in place.
    pub fn add_term(&mut self, e: Exponents, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Re-expresses the polynomial over a variable list containing every
    /// variable that actually occurs.
    pub fn with_vars(&self, vars: &Arc<[String]>) -> Result<Self> {
        if Arc::ptr_eq(&self.vars, vars) || self.vars[..] == vars[..] {
            return Ok(SparsePolynomial { field: self.field, vars: vars.clone(), terms: self.terms.clone() });
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            let pos = vars.iter().position(|w| w == v);
            if pos.is_none() && self.terms.keys().any(|e| e[i] != 0) {
                return Err(Error::UnknownVariable(v.clone()));
            }
            map.push(pos);
        }
        let mut out = Self::zero(self.field, vars.clone());
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    ne[j] = k;
                }
            }
            out.terms.insert(ne, c.clone());
        }
        Ok(out)
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.field, other.field, "field mismatch between polynomials");
        let u = union_vars(&self.vars, &other.vars);
        (self.with_vars(&u).expect("superset"), other.with_vars(&u).expect("superset"))
    }

    /// Drops variables that do not occur in any term.
    pub fn trimmed(&self) -> Self {
        let used: Vec<usize> =
            (0..self.vars.len()).filter(|&i| self.terms.keys().any(|e| e[i] != 0)).collect();
        let vars: Arc<[String]> = used.iter().map(|&i| self.vars[i].clone()).collect::<Vec<_>>().into();
        let terms = self.terms.iter().map(|(e, c)| (used.iter().map(|&i| e[i]).collect(), c.clone())).collect();
        SparsePolynomial { field: self.field, vars, terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.align(other);
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        SparsePolynomial { field: self.field, vars: self.vars.clone(), terms }
    }

    pub fn scale(&self, k: &FieldElement) -> Self {
        let mut out = Self::zero(self.field, self.vars.clone());
        for (e, c) in &self.terms {
            out.insert_term(e.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        if a.is_zero() || b.is_zero() {
            return Self::zero(a.field, a.vars);
        }
        let mut acc: HashMap<Exponents, FieldElement> = HashMap::with_capacity(a.terms.len() * b.terms.len());
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let p = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v = &*v + &p,
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        SparsePolynomial { field: a.field, vars: a.vars, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.field, self.vars.clone(), self.field.one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|e| e.iter().map(|&k| k as u64).sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.vars.iter().position(|v| v == var) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k <= 1))
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().map(|&k| k as u64).sum::<u64>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn homogeneous_component(&self, d: u64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().map(|&k| k as u64).sum::<u64>() == d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        SparsePolynomial { field: self.field, vars: self.vars.clone(), terms }
    }

    /// Coefficient of a monomial given as `(variable, exponent)` pairs.
    pub fn coefficient(&self, monomial: &[(&str, u32)]) -> FieldElement {
        let mut e = vec![0u32; self.vars.len()];
        for &(v, k) in monomial {
            if k == 0 {
                continue;
            }
            match self.vars.iter().position(|w| w == v) {
                Some(i) => e[i] += k,
                None => return self.field.zero(),
            }
        }
        self.terms.get(&e).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Coefficient of `m`, read as a polynomial in the variables of `m`
    /// that are listed in `block`; the result lives in the remaining ones.
    pub fn coefficient_in(&self, block: &[&str], monomial: &[(&str, u32)]) -> Self {
        let idx: Vec<Option<usize>> = block.iter().map(|b| self.vars.iter().position(|v| v == b)).collect();
        let mut out = Self::zero(self.field, self.vars.clone());
        'terms: for (e, c) in &self.terms {
            let mut rest = e.clone();
            for (bi, b) in block.iter().enumerate() {
                let want = monomial.iter().filter(|(v, _)| v == b).map(|(_, k)| *k).sum::<u32>();
                let have = idx[bi].map(|i| e[i]).unwrap_or(0);
                if want != have {
                    continue 'terms;
                }
                if let Some(i) = idx[bi] {
                    rest[i] = 0;
                }
            }
            out.add_term(rest, c.clone());
        }
        out.trimmed()
    }

    /// Sum of absolute values of the (integral, rational) coefficients.
    pub fn weight(&self) -> Result<BigInt> {
        let mut w = BigInt::zero();
        for c in self.terms.values() {
            match c {
                FieldElement::Rational(q) if q.is_integer() => w += q.numer().abs(),
                _ => return Err(Error::NonIntegerCoefficients),
            }
        }
        Ok(w)
    }

    /// Evaluates at a point given by variable name; every occurring variable
    /// must be assigned.
    pub fn eval(&self, point: &HashMap<String, FieldElement>) -> Result<FieldElement> {
        let mut vals = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match point.get(v) {
                Some(x) => vals.push(Some(x.clone())),
                None if self.terms.keys().all(|e| e[i] == 0) => vals.push(None),
                None => return Err(Error::MissingAssignment(v.clone())),
            }
        }
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &vals[i].as_ref().expect("checked").pow(k as u64);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Evaluates with values listed in variable order.
    pub fn eval_dense(&self, vals: &[FieldElement]) -> FieldElement {
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &vals[i].pow(k as u64);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitutes a constant for one variable.
    pub fn substitute(&self, var: &str, value: &FieldElement) -> Self {
        let Some(i) = self.vars.iter().position(|v| v == var) else {
            return self.clone();
        };
        let mut out = Self::zero(self.field, self.vars.clone());
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[i];
            ne[i] = 0;
            out.add_term(ne, c * &value.pow(k as u64));
        }
        out
    }

    /// Sum over all 0/1 values of the listed variables; they are then
    /// dropped from the variable list.
    pub fn sum_over_cube(&self, vars: &[&str]) -> Self {
        let field = self.field;
        let mut acc = self.clone();
        for v in vars {
            acc = acc.substitute(v, &field.zero()).add(&acc.substitute(v, &field.one()));
        }
        let keep: Vec<String> = acc.vars.iter().filter(|v| !vars.contains(&v.as_str())).cloned().collect();
        acc.with_vars(&var_list(&keep)).expect("summed variables no longer occur")
    }

    /// Maps every coefficient through `f` (e.g. to change fields).
    pub fn map_coefficients(&self, field: Field, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        let mut out = Self::zero(field, self.vars.clone());
        for (e, c) in &self.terms {
            out.insert_term(e.clone(), f(c));
        }
        out
    }
}

/// Exact equality; errors when the fields differ.
pub fn poly_equal(p: &SparsePolynomial, q: &SparsePolynomial) -> Result<bool> {
    if p.field != q.field {
        return Err(Error::FieldMismatch);
    }
    Ok(p == q)
}

impl PartialEq for SparsePolynomial {
    fn eq(&self, other: &Self) -> bool {
        if self.field != other.field || self.terms.len() != other.terms.len() {
            return false;
        }
        if self.vars[..] == other.vars[..] {
            return self.terms == other.terms;
        }
        let (a, b) = self.align(other);
        a.terms == b.terms
    }
}

impl Eq for SparsePolynomial {}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_polynomial(self).trim_end().replace('\n', " + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> Field {
        Field::rationals()
    }

    fn xy() -> (SparsePolynomial, SparsePolynomial) {
        (SparsePolynomial::var(q(), "x"), SparsePolynomial::var(q(), "y"))
    }

    #[test]
    fn binomial_square() {
        let (x, y) = xy();
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.coefficient(&[("x", 1), ("y", 1)]), q().int(2));
        assert_eq!(sq.coefficient(&[("x", 5)]), q().zero());
        let expected = x.mul(&x).add(&x.mul(&y).scale(&q().int(2))).add(&y.mul(&y));
        assert_eq!(sq, expected);
    }

    #[test]
    fn zero_padding_is_invisible() {
        let (x, y) = xy();
        let p = x.mul(&y);
        let z = SparsePolynomial::var(q(), "z");
        let padded = p.add(&z.scale(&q().zero()));
        assert_eq!(padded.vars().len(), 3);
        assert_eq!(p, padded);
    }

    #[test]
    fn polynomial_is_not_its_function() {
        let f2 = Field::prime(2).unwrap();
        let x = SparsePolynomial::var(f2, "x");
        let p = x.mul(&x).sub(&x);
        assert!(!p.is_zero());
        for v in 0..2 {
            let pt = HashMap::from([("x".to_string(), f2.int(v))]);
            assert!(p.eval(&pt).unwrap().is_zero());
        }
        assert_eq!(poly_equal(&p, &SparsePolynomial::zero(f2, p.vars().clone())), Ok(false));
        assert_eq!(poly_equal(&p, &SparsePolynomial::var(q(), "x")), Err(Error::FieldMismatch));
    }

    #[test]
    fn weight_examples() {
        let (x, _) = xy();
        let p = x.mul(&x).scale(&q().int(3)).sub(&x.scale(&q().int(2))).add(&SparsePolynomial::constant(
            q(),
            x.vars().clone(),
            q().one(),
        ));
        assert_eq!(p.weight().unwrap(), BigInt::from(6));
        assert_eq!(SparsePolynomial::zero(q(), x.vars().clone()).weight().unwrap(), BigInt::from(0));
        let half = x.scale(&q().half().unwrap());
        assert_eq!(half.weight(), Err(Error::NonIntegerCoefficients));
    }

    fn random_poly(rng: &mut ChaCha8Rng, vars: &Arc<[String]>) -> SparsePolynomial {
        let mut p = SparsePolynomial::zero(q(), vars.clone());
        for _ in 0..rng.gen_range(0..6) {
            let e: Exponents = (0..vars.len()).map(|_| rng.gen_range(0..3)).collect();
            p.add_term(e, q().int(rng.gen_range(-5..=5)));
        }
        p
    }

    #[test]
    fn ring_laws_and_weight_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vars = var_list(&["a", "b", "c"]);
        for _ in 0..500 {
            let (p, r, s) = (random_poly(&mut rng, &vars), random_poly(&mut rng, &vars), random_poly(&mut rng, &vars));
            assert_eq!(p.add(&r).add(&s), p.add(&r.add(&s)));
            assert_eq!(p.mul(&r).mul(&s), p.mul(&r.mul(&s)));
            assert_eq!(p.mul(&r.add(&s)), p.mul(&r).add(&p.mul(&s)));
            assert_eq!(p.mul(&r), r.mul(&p));
            let (wp, wr) = (p.weight().unwrap(), r.weight().unwrap());
            assert!(p.add(&r).weight().unwrap() <= &wp + &wr);
            assert!(p.mul(&r).weight().unwrap() <= &wp * &wr);
        }
    }

    #[test]
    fn coefficient_extraction_in_block() {
        // (x11 y1 + x12 y2)(x21 y1 + x22 y2): coefficient of y1 y2 is per_2.
        let f = q();
        let v = |n: &str| SparsePolynomial::var(f, n);
        let r1 = v("x11").mul(&v("y1")).add(&v("x12").mul(&v("y2")));
        let r2 = v("x21").mul(&v("y1")).add(&v("x22").mul(&v("y2")));
        let c = r1.mul(&r2).coefficient_in(&["y1", "y2"], &[("y1", 1), ("y2", 1)]);
        let per = v("x11").mul(&v("x22")).add(&v("x12").mul(&v("x21")));
        assert_eq!(c, per);
    }

    #[test]
    fn substitution_and_components() {
        let (x, y) = xy();
        let one = SparsePolynomial::constant(q(), x.vars().clone(), q().one());
        let p = x.add(&one).pow(2).mul(&y);
        assert_eq!(p.substitute("y", &q().int(0)), SparsePolynomial::zero(q(), p.vars().clone()));
        assert_eq!(p.homogeneous_component(3), x.mul(&x).mul(&y));
        assert!(!p.is_homogeneous());
        assert!(p.homogeneous_component(2).is_homogeneous());
        assert_eq!(p.total_degree(), 3);
        assert_eq!(p.degree_in("x"), 2);
    }
}
