//! Randomized and deterministic zero tests: Schwartz-Zippel on circuit
//! pairs, the symbolic determinant pencil, grid testing, and exact
//! equality of constant-free straight-line programs.

use valiant::circuit::{parse_circuit, samples};
use valiant::pit::{equ_slp_general, exact_value, grid_zero_test, pit_random, sdit_build, sdit_decide};
use valiant::{CircuitBuilder, Field};

fn main() -> valiant::Result<()> {
    let f = Field::prime(1_000_003)?;
    let a = samples::binomial_square(f);
    let b = parse_circuit(
        "field Fp 1000003\nvar x y\ng1 = input x\ng2 = input y\ng3 = mul g1 g1\ng4 = mul g2 g2\ng5 = mul g1 g2\ng6 = add g5 g5\ng7 = add g3 g4\ng8 = add g7 g6\noutput g8\n",
    )?;
    let v = pit_random(&a, &b, 5, 1)?;
    println!("(x+y)^2 vs x^2+y^2+2xy: {} via {}, error <= {}", v.verdict, v.method, v.error_bound);
    let v = pit_random(&a, &samples::cubic(f), 5, 1)?;
    let witness: Vec<String> = v.witness.unwrap_or_default().iter().map(|(x, a)| format!("{x}={a}")).collect();
    println!("(x+y)^2 vs cubic: {} at {}", v.verdict, witness.join(" "));

    let c = samples::xy_plus_z(f);
    let inst = sdit_build(&c)?;
    println!("pencil side {}: {}", inst.side(), sdit_decide(&inst, 10, 3)?.verdict);

    let g = grid_zero_test(&samples::cubic(f), 3)?;
    println!("grid test on cubic: {}", g.verdict);

    // 2^(2^10) by ten squarings, compared with the square of 2^(2^9).
    let mut b = CircuitBuilder::new(Field::rationals());
    let one = b.int(1);
    let mut v = b.add(one, one);
    let mut half = v;
    for k in 0..10 {
        if k == 9 {
            half = v;
        }
        v = b.mul(v, v);
    }
    let half_sq = b.mul(half, half);
    let diff = b.sub(v, half_sq);
    let off_by_one = b.sub(v, one);
    let c = b.finish(vec![diff])?;
    println!("2^1024 - (2^512)^2: {}", equ_slp_general(&c)?);
    let c = c.with_outputs(vec![off_by_one])?;
    println!("2^1024 - 1: {} ({} bits)", equ_slp_general(&c)?, exact_value(&c)?.bits());
    Ok(())
}
