//! Homogenization, multiplicative disjointness and formula balancing, each
//! checked against the input circuit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use valiant::circuit::samples;
use valiant::random::random_formula;
use valiant::transforms::run_transform;
use valiant::Field;

fn main() -> valiant::Result<()> {
    let f = Field::prime(101)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let (_, rep) = run_transform("homogenize", &samples::cubic(f), Some(3))?;
    println!("{rep}");

    let (md, rep) = run_transform("mult-disjoint", &samples::squarings(f, 4), None)?;
    print!("{rep}");
    println!("mult-disjoint now {}\n", md.is_mult_disjoint());

    let chain = samples::comb(f, 64, false);
    let (_, rep) = run_transform("balance", &chain, None)?;
    println!("comb of 64: depth {} -> {}", rep.input.depth, rep.output.depth);

    let g = random_formula(f, &mut rng, 200, 6);
    let (_, rep) = run_transform("balance", &g, None)?;
    println!("random formula: size {} depth {} -> size {} depth {}", rep.input.size, rep.input.depth, rep.output.size, rep.output.depth);
    Ok(())
}
