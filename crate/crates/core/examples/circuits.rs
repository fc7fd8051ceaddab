//! Build a circuit, inspect its metrics and structure, expand it and
//! write it back out in the text format.

use valiant::circuit::{parse_circuit, samples, serialize_circuit};
use valiant::eval::expand;
use valiant::{CircuitBuilder, Field};

fn main() -> valiant::Result<()> {
    let q = Field::rationals();
    let c = samples::cubic(q);
    let m = c.metrics();
    println!("cubic: size {} depth {} degree {}", m.size, m.depth, m.degree);
    let flags = c.classify();
    println!(
        "formula {} skew {} weakly-skew {} mult-disjoint {} constant-free {}",
        flags.is_formula, flags.is_skew, flags.is_weakly_skew, flags.is_mult_disjoint, flags.is_constant_free
    );
    println!("{}", expand(&c)?);

    // (x + y)^2 with the sum shared: mult-disjoint fails, weakly-skew fails.
    let sq = samples::binomial_square(q);
    println!("shared square: weakly-skew {} mult-disjoint {}", sq.is_weakly_skew(), sq.is_mult_disjoint());

    let mut b = CircuitBuilder::new(q);
    let x = b.input("x");
    let y = b.input("y");
    let two = b.int(2);
    let xy = b.mul(x, y);
    let t = b.mul(two, xy);
    let out = b.add(t, x);
    let c = b.finish(vec![out])?;
    let text = serialize_circuit(&c);
    print!("{text}");
    assert_eq!(parse_circuit(&text)?, c);
    println!("{}", expand(&c)?);
    Ok(())
}
