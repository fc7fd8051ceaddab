//! Seeded generators of random circuits in each structural class, used by
//! the tests, examples and the CLI.

use rand::Rng;

use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::field::Field;

fn var_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("x{i}")).collect()
}

fn leaf<R: Rng + ?Sized>(b: &mut CircuitBuilder, rng: &mut R, vars: &[String], const_prob: f64) -> GateId {
    if vars.is_empty() || rng.gen_bool(const_prob) {
        let k = rng.gen_range(-3..=3);
        b.int(k)
    } else {
        b.input(&vars[rng.gen_range(0..vars.len())])
    }
}

fn random_op<R: Rng + ?Sized>(b: &mut CircuitBuilder, rng: &mut R, x: GateId, y: GateId) -> GateId {
    if rng.gen_bool(0.5) {
        b.add(x, y)
    } else {
        b.mul(x, y)
    }
}

fn builder(field: Field, vars: &[String]) -> CircuitBuilder {
    let mut b = CircuitBuilder::new(field);
    for v in vars {
        b.declare_var(v);
    }
    b
}

/// A formula with exactly `ops` operation gates over the given variables.
pub fn random_formula_over<R: Rng + ?Sized>(field: Field, rng: &mut R, ops: usize, vars: &[String], const_prob: f64) -> Circuit {
    let mut b = builder(field, vars);
    let mut pool: Vec<GateId> = (0..=ops).map(|_| leaf(&mut b, rng, vars, const_prob)).collect();
    while pool.len() > 1 {
        let x = pool.swap_remove(rng.gen_range(0..pool.len()));
        let y = pool.swap_remove(rng.gen_range(0..pool.len()));
        let g = random_op(&mut b, rng, x, y);
        pool.push(g);
    }
    b.finish(vec![pool[0]]).expect("valid formula")
}

/// A formula with exactly `ops` operation gates in variables `x1..xn`.
pub fn random_formula<R: Rng + ?Sized>(field: Field, rng: &mut R, ops: usize, nvars: usize) -> Circuit {
    random_formula_over(field, rng, ops, &var_names(nvars), 0.2)
}

/// An arbitrary circuit: every operation gate reads two earlier gates.
pub fn random_circuit<R: Rng + ?Sized>(field: Field, rng: &mut R, ops: usize, nvars: usize) -> Circuit {
    let vars = var_names(nvars);
    let mut b = builder(field, &vars);
    let mut pool: Vec<GateId> = vars.iter().map(|v| b.input(v)).collect();
    pool.push(b.int(rng.gen_range(-2..=2)));
    for _ in 0..ops {
        let x = pool[rng.gen_range(0..pool.len())];
        let y = pool[rng.gen_range(0..pool.len())];
        let g = random_op(&mut b, rng, x, y);
        pool.push(g);
    }
    let out = *pool.last().expect("nonempty");
    b.finish(vec![out]).expect("valid circuit")
}

/// A weakly-skew circuit with exactly `ops` operation gates: one factor of
/// every product is a private formula, while sums may read any shared gate.
pub fn random_weakly_skew<R: Rng + ?Sized>(field: Field, rng: &mut R, ops: usize, nvars: usize) -> Circuit {
    let vars = var_names(nvars);
    let mut b = builder(field, &vars);
    let mut shared: Vec<GateId> = vec![leaf(&mut b, rng, &vars, 0.2)];
    let mut left = ops;
    while left > 0 {
        let x = shared[rng.gen_range(0..shared.len())];
        let g = if rng.gen_bool(0.5) {
            let y = shared[rng.gen_range(0..shared.len())];
            let y = if y == x { leaf(&mut b, rng, &vars, 0.2) } else { y };
            left -= 1;
            b.add(x, y)
        } else {
            let private_ops = rng.gen_range(0..left.min(3));
            let mut pool: Vec<GateId> = (0..=private_ops).map(|_| leaf(&mut b, rng, &vars, 0.2)).collect();
            while pool.len() > 1 {
                let p = pool.swap_remove(rng.gen_range(0..pool.len()));
                let q = pool.swap_remove(rng.gen_range(0..pool.len()));
                let g = random_op(&mut b, rng, p, q);
                pool.push(g);
            }
            left -= private_ops + 1;
            if rng.gen_bool(0.5) {
                b.mul(x, pool[0])
            } else {
                b.mul(pool[0], x)
            }
        };
        shared.push(g);
    }
    let out = *shared.last().expect("nonempty");
    b.finish(vec![out]).expect("valid circuit")
}

/// A multiplicatively disjoint circuit with constants from {-1, 0, 1}: the
/// factors of each product are built from disjoint gate pools.
pub fn random_constant_free_mult_disjoint<R: Rng + ?Sized>(field: Field, rng: &mut R, ops: usize, nvars: usize) -> Circuit {
    fn grow<R: Rng + ?Sized>(b: &mut CircuitBuilder, rng: &mut R, ops: usize, vars: &[String]) -> GateId {
        if ops == 0 {
            return if !vars.is_empty() && rng.gen_bool(0.8) {
                b.input(&vars[rng.gen_range(0..vars.len())])
            } else {
                b.int(rng.gen_range(-1..=1))
            };
        }
        if rng.gen_bool(0.5) {
            let l = rng.gen_range(0..ops);
            let x = grow(b, rng, l, vars);
            let y = grow(b, rng, ops - 1 - l, vars);
            b.mul(x, y)
        } else {
            // a sum over a small shared pool
            let l = rng.gen_range(0..ops);
            let x = grow(b, rng, l, vars);
            let rest = ops - 1 - l;
            if rest > 0 && rng.gen_bool(0.5) {
                let y = grow(b, rng, rest - 1, vars);
                let s = b.add(x, y);
                b.add(s, x)
            } else {
                let y = grow(b, rng, rest, vars);
                b.add(x, y)
            }
        }
    }
    let vars = var_names(nvars);
    let mut b = builder(field, &vars);
    let out = grow(&mut b, rng, ops, &vars);
    b.finish(vec![out]).expect("valid circuit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_class() {
        let q = Field::rationals();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ops in 1..12 {
            let f = random_formula(q, &mut rng, ops, 3);
            assert!(f.is_formula());
            assert_eq!(f.size(), ops);
            let w = random_weakly_skew(q, &mut rng, ops, 3);
            assert!(w.is_weakly_skew(), "{}", crate::circuit::text::serialize_circuit(&w));
            assert_eq!(w.size(), ops);
            let m = random_constant_free_mult_disjoint(q, &mut rng, ops, 2);
            assert!(m.is_mult_disjoint() && m.is_constant_free());
            let c = random_circuit(q, &mut rng, ops, 2);
            assert_eq!(c.size(), ops);
        }
    }
}
