use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use valiant::abp::{parse_abp, serialize_abp, weakly_skew_to_abp};
use valiant::circuit::{parse_circuit, serialize_circuit};
use valiant::det::circuit_to_det_projection;
use valiant::eval::{expand, expand_gate};
use valiant::matrix::{brute_per, SymMatrix};
use valiant::pit::{pit_random, sdit_build, sdit_decide};
use valiant::poly::pd_matrix_rank;
use valiant::poly::{format_polynomial, parse_polynomial, poly_equal};
use valiant::projection::{parse_projection, serialize_projection};
use valiant::random::{random_circuit, random_constant_free_mult_disjoint, random_formula, random_weakly_skew};
use valiant::transforms::{balance_formula, homogenize, make_mult_disjoint};
use valiant::{Field, FieldElement, SparsePolynomial};

fn fields() -> [Field; 3] {
    [Field::rationals(), Field::prime(101).unwrap(), Field::prime((1 << 61) - 1).unwrap()]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn field_of(k: u8) -> Field {
    fields()[k as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(k in 0u8..3, a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000) {
        let f = field_of(k);
        let (a, b, c) = (f.int(a), f.int(b), f.int(c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn characteristic_sums_vanish(p in prop::sample::select(vec![2u64, 3, 5, 7, 101, 65537])) {
        let f = Field::prime(p).unwrap();
        let mut acc = f.zero();
        for _ in 0..p {
            acc = &acc + &f.one();
        }
        prop_assert!(acc.is_zero());
    }

    #[test]
    fn class_implications(seed in any::<u64>(), ops in 0usize..12) {
        let c = random_circuit(Field::rationals(), &mut rng(seed), ops, 3);
        let flags = c.classify();
        prop_assert!(!flags.is_formula || flags.is_weakly_skew);
        prop_assert!(!flags.is_weakly_skew || flags.is_mult_disjoint);
    }

    #[test]
    fn formal_degree_bounds_true_degree(seed in any::<u64>(), ops in 0usize..10) {
        let c = random_circuit(Field::prime(101).unwrap(), &mut rng(seed), ops, 3);
        let m = c.metrics();
        for v in 0..c.len() {
            prop_assert!(expand_gate(&c, v).unwrap().total_degree() <= m.gate_degree[v]);
        }
    }

    #[test]
    fn formula_size_and_depth(seed in any::<u64>(), ops in 0usize..40) {
        let f = random_formula(Field::rationals(), &mut rng(seed), ops, 4);
        let m = f.metrics();
        prop_assert!((f.size() as u64) < (1u64 << m.depth));
    }

    #[test]
    fn mult_disjoint_degree_bound(seed in any::<u64>(), ops in 0usize..20) {
        let c = random_constant_free_mult_disjoint(Field::rationals(), &mut rng(seed), ops, 2);
        prop_assert!(c.is_mult_disjoint());
        let m = c.metrics();
        for v in 0..c.len() {
            let phi = c.subcircuit(v).iter().filter(|&&g| c.gate(g).op.children().is_some()).count() as u64;
            prop_assert!(m.gate_degree[v] <= phi + 1);
        }
    }

    #[test]
    fn polynomial_ring_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = Field::prime(101).unwrap();
        let mut p = || expand(&random_formula(f, &mut r, 5, 3)).unwrap();
        let (a, b, c) = (p(), p(), p());
        prop_assert!(poly_equal(&a.add(&b).add(&c), &a.add(&b.add(&c))).unwrap());
        prop_assert!(poly_equal(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))).unwrap());
        prop_assert!(poly_equal(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))).unwrap());
    }

    #[test]
    fn weight_is_sub_additive_and_multiplicative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = Field::rationals();
        let a = expand(&random_constant_free_mult_disjoint(q, &mut r, 6, 2)).unwrap();
        let b = expand(&random_constant_free_mult_disjoint(q, &mut r, 6, 2)).unwrap();
        let (wa, wb) = (a.weight().unwrap(), b.weight().unwrap());
        prop_assert!(a.add(&b).weight().unwrap() <= &wa + &wb);
        prop_assert!(a.mul(&b).weight().unwrap() <= &wa * &wb);
    }

    #[test]
    fn pd_rank_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = Field::prime(101).unwrap();
        let names = ["y1", "y2", "z1", "z2"];
        let vars = valiant::poly::var_list(&names);
        let mut p = SparsePolynomial::zero(f, vars);
        for _ in 0..6 {
            let e: Vec<u32> = (0..4).map(|_| r.gen_range(0..=1)).collect();
            p.add_term(e, f.int(r.gen_range(1..100)));
        }
        let a = pd_matrix_rank(&p, &["y1", "y2"], &["z1", "z2"]).unwrap();
        let b = pd_matrix_rank(&p, &["z1", "z2"], &["y1", "y2"]).unwrap();
        prop_assert_eq!(a.rank, b.rank);
    }

    #[test]
    fn abp_dynamic_program_matches_paths(seed in any::<u64>(), ops in 0usize..8) {
        let c = random_weakly_skew(Field::prime(101).unwrap(), &mut rng(seed), ops, 3);
        let a = weakly_skew_to_abp(&c).unwrap();
        prop_assert!(poly_equal(&a.expand(), &a.path_sum()).unwrap());
        prop_assert!(poly_equal(&a.expand(), &expand(&c).unwrap()).unwrap());
    }

    #[test]
    fn abp_composition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = Field::prime(101).unwrap();
        let c1 = random_formula(f, &mut r, 4, 2);
        let c2 = random_formula(f, &mut r, 4, 2);
        let (a1, a2) = (weakly_skew_to_abp(&c1).unwrap(), weakly_skew_to_abp(&c2).unwrap());
        let (p1, p2) = (a1.expand(), a2.expand());
        prop_assert!(poly_equal(&a1.series(&a2).unwrap().expand(), &p1.mul(&p2)).unwrap());
        prop_assert!(poly_equal(&a1.parallel(&a2).unwrap().expand(), &p1.add(&p2)).unwrap());
    }

    #[test]
    fn permanent_is_node_order_invariant(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let q = Field::rationals();
        let m = SymMatrix::generic(q, n, "x");
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, r.gen_range(0..=i));
        }
        prop_assert_eq!(brute_per(&m.permuted(&perm)).unwrap(), brute_per(&m).unwrap());
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>(), k in 0u8..3) {
        let mut r = rng(seed);
        let f = field_of(k);
        let c = random_weakly_skew(f, &mut r, 6, 3);
        let back = parse_circuit(&serialize_circuit(&c)).unwrap();
        prop_assert_eq!(&back, &c);
        let p = expand(&c).unwrap();
        prop_assert!(poly_equal(&parse_polynomial(&format_polynomial(&p), f).unwrap(), &p).unwrap());
        let a = weakly_skew_to_abp(&c).unwrap();
        prop_assert_eq!(parse_abp(&serialize_abp(&a)).unwrap().expand(), a.expand());
        let pm = circuit_to_det_projection(&c).unwrap();
        let file = parse_projection(&serialize_projection(&pm)).unwrap();
        prop_assert_eq!(&file.projection.matrix, &pm.matrix);
        prop_assert!(file.verify(seed, 5).unwrap().passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn transforms_preserve_semantics(seed in any::<u64>(), ops in 1usize..8) {
        let mut r = rng(seed);
        let f = Field::prime(101).unwrap();
        let c = random_circuit(f, &mut r, ops, 2);
        let want = expand(&c).unwrap();
        let md = make_mult_disjoint(&c).unwrap();
        prop_assert!(md.is_mult_disjoint());
        prop_assert!(poly_equal(&expand(&md).unwrap(), &want).unwrap());
        let d = c.metrics().degree.max(1);
        let h = homogenize(&c, d).unwrap();
        let mut sum = SparsePolynomial::zero(f, valiant::poly::var_list(h.vars()));
        for &o in h.outputs() {
            sum = sum.add(&expand_gate(&h, o).unwrap());
        }
        prop_assert!(poly_equal(&sum, &want).unwrap());
        let g = random_formula(f, &mut r, ops * 3, 3);
        let b = balance_formula(&g).unwrap();
        prop_assert!(b.is_formula());
        prop_assert!(poly_equal(&expand(&b).unwrap(), &expand(&g).unwrap()).unwrap());
    }

    #[test]
    fn pit_never_rejects_equal_circuits(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_formula(Field::prime(101).unwrap(), &mut r, 10, 3);
        let b = balance_formula(&g).unwrap();
        prop_assert!(pit_random(&g, &b, 3, seed).unwrap().is_zero());
    }

    #[test]
    fn sdit_agrees_with_expansion(seed in any::<u64>(), ops in 0usize..=8) {
        let c = random_weakly_skew(Field::prime(101).unwrap(), &mut rng(seed), ops, 2);
        let zero = expand(&c).unwrap().is_zero();
        let v = sdit_decide(&sdit_build(&c).unwrap(), 20, seed).unwrap();
        prop_assert_eq!(v.is_zero(), zero);
    }
}

#[test]
fn field_element_display_round_trips() {
    for f in fields() {
        for v in [-7i64, 0, 1, 42] {
            let x: FieldElement = f.int(v);
            assert_eq!(f.parse_literal(&x.to_string()).unwrap(), x);
        }
    }
}
