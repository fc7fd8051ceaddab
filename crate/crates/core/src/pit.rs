//! Identity testing: seeded Schwartz-Zippel equivalence, symbolic
//! determinant pencils, deterministic grid testing and exact zero testing of
//! variable-free constant-free circuits by Chinese remaindering.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abp::Abp;
use crate::circuit::{Circuit, Op};
use crate::det::{abp_to_det_projection, circuit_to_det_projection};
use crate::error::{Error, Result};
use crate::eval::evaluate_dense;
use crate::field::{is_prime, Field, FieldElement, MAX_MODULUS};
use crate::matrix::bareiss_det;
use crate::projection::ProjectionMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Zero,
    NonZero,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Zero => "zero",
            Verdict::NonZero => "nonzero",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PitVerdict {
    pub verdict: Verdict,
    /// Upper bound on the probability that a `Zero` verdict is wrong; zero
    /// for deterministic tests and for `NonZero`.
    pub error_bound: BigRational,
    pub witness: Option<Vec<(String, FieldElement)>>,
    pub method: &'static str,
}

impl PitVerdict {
    fn zero(method: &'static str, error_bound: BigRational) -> PitVerdict {
        PitVerdict { verdict: Verdict::Zero, error_bound, witness: None, method }
    }

    fn nonzero(method: &'static str, witness: Vec<(String, FieldElement)>) -> PitVerdict {
        PitVerdict { verdict: Verdict::NonZero, error_bound: BigRational::zero(), witness: Some(witness), method }
    }

    pub fn is_zero(&self) -> bool {
        self.verdict == Verdict::Zero
    }
}

impl fmt::Display for PitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict {}", self.verdict)?;
        writeln!(f, "method {}", self.method)?;
        writeln!(f, "error-bound {}", self.error_bound)?;
        if let Some(w) = &self.witness {
            let parts: Vec<String> = w.iter().map(|(v, x)| format!("{v}={x}")).collect();
            writeln!(f, "witness {}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Sample set size for a Schwartz-Zippel test of degree `d`.
fn sample_set(field: Field, d: u64) -> Result<u64> {
    match field.modulus() {
        Some(p) if p <= d => Err(Error::FieldTooSmall { size: p, degree: d }),
        Some(p) => Ok(p),
        None => Ok(2 * d + 1),
    }
}

fn bound(d: u64, s: u64, trials: u32) -> BigRational {
    BigRational::new(BigInt::from(d), BigInt::from(s)).pow(trials as i32)
}

fn check_trials(trials: u32) -> Result<()> {
    if trials == 0 {
        return Err(Error::ParamOutOfRange("trials must be at least 1".into()));
    }
    Ok(())
}

fn dense_at(c: &Circuit, point: &HashMap<String, FieldElement>) -> Vec<FieldElement> {
    c.vars().iter().map(|v| point[v].clone()).collect()
}

/// Randomized test of `c1 = c2` on the union of their variables.
pub fn pit_random(c1: &Circuit, c2: &Circuit, trials: u32, seed: u64) -> Result<PitVerdict> {
    check_trials(trials)?;
    let field = c1.field();
    if c2.field() != field {
        return Err(Error::FieldMismatch);
    }
    let mut vars: Vec<String> = c1.vars().to_vec();
    for v in c2.vars() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    let d = c1.metrics().gate_degree[c1.output()].max(c2.metrics().gate_degree[c2.output()]);
    let s = sample_set(field, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let point: HashMap<String, FieldElement> = vars.iter().map(|v| (v.clone(), field.sample(&mut rng, s))).collect();
        let a = &evaluate_dense(c1, &dense_at(c1, &point))[0];
        let b = &evaluate_dense(c2, &dense_at(c2, &point))[0];
        if a != b {
            let witness = vars.iter().map(|v| (v.clone(), point[v].clone())).collect();
            return Ok(PitVerdict::nonzero("schwartz-zippel", witness));
        }
    }
    Ok(PitVerdict::zero("schwartz-zippel", bound(d, s, trials)))
}

/// Pencil `x_1 A_1 + ... + x_m A_m` of square matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SditInstance {
    pub field: Field,
    pub vars: Vec<String>,
    pub matrices: Vec<Vec<Vec<FieldElement>>>,
    /// How the pencil determinant relates to the source polynomial.
    pub relation: String,
}

impl SditInstance {
    pub fn new(field: Field, vars: Vec<String>, matrices: Vec<Vec<Vec<FieldElement>>>) -> Result<SditInstance> {
        if vars.len() != matrices.len() {
            return Err(Error::Invalid("one variable per matrix is required".into()));
        }
        let n = matrices.first().map_or(0, |m| m.len());
        for m in &matrices {
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err(Error::Invalid("pencil matrices must be square of equal side".into()));
            }
            if m.iter().flatten().any(|x| x.field() != field) {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(SditInstance { field, vars, matrices, relation: "det(pencil) given directly".into() })
    }

    pub fn side(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.len())
    }

    pub fn at(&self, vals: &[FieldElement]) -> Vec<Vec<FieldElement>> {
        let n = self.side();
        let mut out = vec![vec![self.field.zero(); n]; n];
        for (x, m) in vals.iter().zip(&self.matrices) {
            for i in 0..n {
                for j in 0..n {
                    if !m[i][j].is_zero() {
                        out[i][j] = &out[i][j] + &(x * &m[i][j]);
                    }
                }
            }
        }
        out
    }
}

fn pencil_from_projection(pm: &ProjectionMatrix) -> SditInstance {
    let field = pm.matrix.field();
    let n = pm.side();
    let mut vars = pm.matrix.variables();
    vars.sort();
    let mut t = String::from("t");
    while vars.contains(&t) {
        t.push('_');
    }
    let index: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut matrices = vec![vec![vec![field.zero(); n]; n]; vars.len() + 1];
    for i in 0..n {
        for j in 0..n {
            let a = pm.matrix.get(i, j);
            matrices[vars.len()][i][j] = a.constant.clone();
            for (v, k) in &a.coeffs {
                matrices[index[v.as_str()]][i][j] = k.clone();
            }
        }
    }
    let relation = format!("det(pencil) = {t}^{n} * f(x1/{t}, ..., xk/{t})");
    vars.push(t);
    SditInstance { field, vars, matrices, relation }
}

/// Homogenized determinant pencil of a weakly-skew circuit: the affine
/// projection `A_0 + sum x_i A_i` becomes `t A_0 + sum x_i A_i`.
pub fn sdit_build(c: &Circuit) -> Result<SditInstance> {
    Ok(pencil_from_projection(&circuit_to_det_projection(c)?))
}

pub fn sdit_build_abp(a: &Abp) -> SditInstance {
    pencil_from_projection(&abp_to_det_projection(a))
}

/// Randomized decision whether `det(sum x_i A_i)` vanishes identically.
pub fn sdit_decide(inst: &SditInstance, trials: u32, seed: u64) -> Result<PitVerdict> {
    check_trials(trials)?;
    let field = inst.field;
    let d = inst.side() as u64;
    let s = sample_set(field, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let vals: Vec<FieldElement> = inst.vars.iter().map(|_| field.sample(&mut rng, s)).collect();
        if !bareiss_det(field, &inst.at(&vals)).is_zero() {
            return Ok(PitVerdict::nonzero("sdit", inst.vars.iter().cloned().zip(vals).collect()));
        }
    }
    Ok(PitVerdict::zero("sdit", bound(d, s, trials)))
}

pub const GRID_MAX_VARS: usize = 4;
pub const GRID_BUDGET: u64 = 1 << 22;

/// Deterministic test on the box `{0..D}^k`; exact when every variable has
/// degree at most `D`, which the formal degree guarantees.
pub fn grid_zero_test(c: &Circuit, degree_bound: u64) -> Result<PitVerdict> {
    let k = c.vars().len();
    if k > GRID_MAX_VARS {
        return Err(Error::TooManyVariables { count: k, limit: GRID_MAX_VARS });
    }
    let field = c.field();
    if let Some(p) = field.modulus() {
        if p <= degree_bound {
            return Err(Error::FieldTooSmall { size: p, degree: degree_bound });
        }
    }
    let formal = c.metrics().gate_degree[c.output()];
    if formal > degree_bound {
        return Err(Error::DegreeBoundTooSmall { bound: degree_bound, degree: formal });
    }
    let side = degree_bound + 1;
    let points = (side as u128).pow(k as u32);
    if points > GRID_BUDGET as u128 {
        return Err(Error::BudgetExceeded { estimated: points, limit: GRID_BUDGET as u128 });
    }
    let mut idx = vec![0u64; k];
    loop {
        let vals: Vec<FieldElement> = idx.iter().map(|&v| field.int(v as i64)).collect();
        if !evaluate_dense(c, &vals)[0].is_zero() {
            return Ok(PitVerdict::nonzero("grid", c.vars().iter().cloned().zip(vals).collect()));
        }
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < degree_bound) else { break };
        idx[pos] += 1;
        idx[pos + 1..].iter_mut().for_each(|v| *v = 0);
    }
    Ok(PitVerdict::zero("grid", BigRational::zero()))
}

fn residue_of(x: &FieldElement, p: u64) -> Result<u64> {
    let v = x.to_integer().ok_or(Error::NotConstantFree)?;
    let r = v % BigInt::from(p);
    let r = if r < BigInt::zero() { r + BigInt::from(p) } else { r };
    Ok(u64::try_from(r).expect("reduced residue"))
}

fn eval_mod(c: &Circuit, p: u64) -> Result<u64> {
    let mut vals: Vec<u64> = Vec::with_capacity(c.len());
    for g in c.gates() {
        let v = match &g.op {
            Op::Input(_) => unreachable!("variable-free circuit"),
            Op::Const(k) => residue_of(k, p)?,
            Op::Add(a, b) => ((vals[*a] as u128 + vals[*b] as u128) % p as u128) as u64,
            Op::Mul(a, b) => ((vals[*a] as u128 * vals[*b] as u128) % p as u128) as u64,
        };
        vals.push(v);
    }
    Ok(vals[c.output()])
}

/// Primes below `2^61`, largest first, whose product exceeds `2^bits`.
pub fn crt_primes(bits: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut covered = 0u64;
    let mut p = MAX_MODULUS - 1;
    while covered <= bits {
        if is_prime(p) {
            primes.push(p);
            covered += 60;
        }
        p -= 2;
    }
    primes
}

/// Exact zero test of a variable-free, constant-free, multiplicatively
/// disjoint circuit. Its value is bounded by `2^(size + degree)` in
/// absolute value, so residues modulo primes with product above twice that
/// bound decide it.
pub fn equ_slp(c: &Circuit) -> Result<Verdict> {
    if !c.vars().is_empty() {
        return Err(Error::TooManyVariables { count: c.vars().len(), limit: 0 });
    }
    if !c.is_constant_free() {
        return Err(Error::NotConstantFree);
    }
    if !c.is_mult_disjoint() {
        return Err(Error::NotMultDisjoint);
    }
    let pruned = c.with_outputs(vec![c.output()])?.pruned();
    let bits = pruned.size() as u64 + pruned.metrics().gate_degree[pruned.output()] + 1;
    for p in crt_primes(bits) {
        if eval_mod(&pruned, p)? != 0 {
            return Ok(Verdict::NonZero);
        }
    }
    Ok(Verdict::Zero)
}

/// Exact zero test of any variable-free constant-free circuit, using the
/// magnitude bound propagated gate by gate (`|a + b| <= |a| + |b|`,
/// `|ab| = |a||b|`) instead of the size-plus-degree bound.
pub fn equ_slp_general(c: &Circuit) -> Result<Verdict> {
    if !c.vars().is_empty() {
        return Err(Error::TooManyVariables { count: c.vars().len(), limit: 0 });
    }
    if !c.is_constant_free() {
        return Err(Error::NotConstantFree);
    }
    let pruned = c.with_outputs(vec![c.output()])?.pruned();
    let mut log2: Vec<f64> = Vec::with_capacity(pruned.len());
    for g in pruned.gates() {
        let v = match g.op {
            Op::Add(a, b) => log2[a].max(log2[b]) + 1.0,
            Op::Mul(a, b) => log2[a] + log2[b],
            _ => 0.0,
        };
        log2.push(v);
    }
    let bits = log2[pruned.output()].ceil();
    if bits > 1e7 {
        return Err(Error::BudgetExceeded { estimated: bits as u128, limit: 10_000_000 });
    }
    for p in crt_primes(bits as u64 + 1) {
        if eval_mod(&pruned, p)? != 0 {
            return Ok(Verdict::NonZero);
        }
    }
    Ok(Verdict::Zero)
}

/// Exact value of a variable-free circuit with integer constants.
pub fn exact_value(c: &Circuit) -> Result<BigInt> {
    let mut vals: Vec<BigInt> = Vec::with_capacity(c.len());
    for g in c.gates() {
        let v = match &g.op {
            Op::Input(_) => return Err(Error::TooManyVariables { count: c.vars().len(), limit: 0 }),
            Op::Const(k) => k.to_integer().ok_or(Error::NotConstantFree)?,
            Op::Add(a, b) => &vals[*a] + &vals[*b],
            Op::Mul(a, b) => &vals[*a] * &vals[*b],
        };
        vals.push(v);
    }
    Ok(vals[c.output()].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::eval::expand;
    use crate::random::random_weakly_skew;

    fn circuit(field: Field, f: impl FnOnce(&mut CircuitBuilder) -> usize) -> Circuit {
        let mut b = CircuitBuilder::new(field);
        let out = f(&mut b);
        b.finish(vec![out]).unwrap()
    }

    #[test]
    fn random_equivalence() {
        let f = Field::prime(101).unwrap();
        let sq = crate::circuit::samples::binomial_square(f);
        let expanded = circuit(f, |b| {
            let (x, y) = (b.input("x"), b.input("y"));
            let (xx, yy, xy) = (b.mul(x, x), b.mul(y, y), b.mul(x, y));
            let two = b.int(2);
            let t = b.mul(two, xy);
            b.sum(&[xx, t, yy])
        });
        for seed in 0..20 {
            assert!(pit_random(&sq, &expanded, 5, seed).unwrap().is_zero());
        }
        let x = circuit(f, |b| b.input("x"));
        let y = circuit(f, |b| b.input("y"));
        let v = pit_random(&x, &y, 20, 7).unwrap();
        assert_eq!(v.verdict, Verdict::NonZero);
        let w: HashMap<String, FieldElement> = v.witness.unwrap().into_iter().collect();
        assert_ne!(w["x"], w["y"]);
    }

    #[test]
    fn field_too_small() {
        let f2 = Field::prime(2).unwrap();
        let c = circuit(f2, |b| {
            let x = b.input("x");
            let sq = b.mul(x, x);
            b.sub(sq, x)
        });
        let z = circuit(f2, |b| b.int(0));
        assert!(matches!(pit_random(&c, &z, 3, 0), Err(Error::FieldTooSmall { size: 2, degree: 2 })));
    }

    #[test]
    fn bound_is_exact() {
        let q = Field::rationals();
        let a = crate::circuit::samples::binomial_square(q);
        let v = pit_random(&a, &a, 3, 1).unwrap();
        assert_eq!(v.error_bound, BigRational::new(8.into(), 125.into()));
    }

    #[test]
    fn pencils() {
        let q = Field::rationals();
        let e = |i: usize, j: usize| {
            let mut m = vec![vec![q.zero(); 2]; 2];
            m[i][j] = q.one();
            m
        };
        let ident = vec![vec![q.one(), q.zero()], vec![q.zero(), q.one()]];
        let inst = SditInstance::new(q, vec!["x1".into()], vec![ident]).unwrap();
        assert_eq!(sdit_decide(&inst, 5, 0).unwrap().verdict, Verdict::NonZero);
        let inst = SditInstance::new(q, vec!["x1".into(), "x2".into()], vec![e(0, 0), e(0, 1)]).unwrap();
        assert_eq!(sdit_decide(&inst, 5, 0).unwrap().verdict, Verdict::Zero);

        let x = circuit(q, |b| b.input("x"));
        let inst = sdit_build(&x).unwrap();
        assert_eq!(sdit_decide(&inst, 5, 0).unwrap().verdict, Verdict::NonZero);
        let zero = circuit(q, |b| {
            let x = b.input("x");
            b.sub(x, x)
        });
        assert_eq!(sdit_decide(&sdit_build(&zero).unwrap(), 5, 0).unwrap().verdict, Verdict::Zero);
    }

    #[test]
    fn pencils_agree_with_expansion() {
        let f = Field::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..40 {
            let c = random_weakly_skew(f, &mut rng, 6, 2);
            let zero = expand(&c).unwrap().is_zero();
            let v = sdit_decide(&sdit_build(&c).unwrap(), 10, i).unwrap();
            assert_eq!(v.is_zero(), zero);
        }
    }

    #[test]
    fn grid() {
        let q = Field::rationals();
        let c = circuit(q, |b| {
            let x = b.input("x");
            let (m1, m2) = (b.int(-1), b.int(-2));
            let (a, bb) = (b.add(x, m1), b.add(x, m2));
            b.mul(a, bb)
        });
        let v = grid_zero_test(&c, 2).unwrap();
        assert_eq!(v.verdict, Verdict::NonZero);
        assert_eq!(v.witness.unwrap()[0].1, q.int(0));
        let z = circuit(q, |b| b.int(0));
        assert!(grid_zero_test(&z, 3).unwrap().is_zero());
        let many = circuit(q, |b| {
            let v: Vec<usize> = (0..5).map(|i| b.input(&format!("x{i}"))).collect();
            b.sum(&v)
        });
        assert!(matches!(grid_zero_test(&many, 1), Err(Error::TooManyVariables { .. })));
    }

    fn ones(b: &mut CircuitBuilder, k: usize, sign: i64) -> usize {
        let v: Vec<usize> = (0..k).map(|_| b.int(sign)).collect();
        b.sum(&v)
    }

    /// `2^10 + (-1) * ... ` with `2^10` built by squaring and one extra product.
    fn power_minus(k: usize) -> Circuit {
        circuit(Field::rationals(), |b| {
            let mut p = ones(b, 2, 1);
            for _ in 0..3 {
                p = b.mul(p, p);
            }
            let four = ones(b, 4, 1);
            let p = b.mul(p, four);
            let m = ones(b, k, -1);
            b.add(p, m)
        })
    }

    #[test]
    fn slp() {
        let c = circuit(Field::rationals(), |b| {
            let (three, five) = (ones(b, 3, 1), ones(b, 5, 1));
            let p = b.mul(three, five);
            let m = ones(b, 15, -1);
            b.add(p, m)
        });
        assert_eq!(exact_value(&c).unwrap(), BigInt::zero());
        assert_eq!(equ_slp(&c).unwrap(), Verdict::Zero);

        let zero = power_minus(1024);
        assert!(matches!(equ_slp(&zero), Err(Error::NotMultDisjoint)));
        assert_eq!(equ_slp_general(&zero).unwrap(), Verdict::Zero);
        assert_eq!(equ_slp_general(&power_minus(1023)).unwrap(), Verdict::NonZero);
        let three = circuit(Field::rationals(), |b| b.int(3));
        assert!(matches!(equ_slp(&three), Err(Error::NotConstantFree)));
    }
}
