//! Permanent side: the coupling gadget identities, rosettes, and an
//! exponential sum over a formula realised as a permanent projection.

use valiant::circuit::parse_circuit;
use valiant::families::exponential_sum;
use valiant::matrix::{ryser, sparse_per_symbolic};
use valiant::perm::{build_rosette, k_identities, valiant_sum_to_per};
use valiant::Field;

fn main() -> valiant::Result<()> {
    let f = Field::prime(101)?;
    for (rows, cols, got, want) in k_identities(f)? {
        println!("per K[-{rows:?},-{cols:?}] = {got} (expected {want})");
    }
    for mu in 1..=4 {
        let r = build_rosette(f, mu)?;
        println!("rosette R({mu}): {} nodes, {} cycle covers", r.graph.node_count(), r.graph.cycle_covers()?.len());
    }

    let g = parse_circuit("field Fp 101\nvar x e1 e2\ng1 = input x\ng2 = input e1\ng3 = input e2\ng4 = mul g1 g2\ng5 = add g4 g3\noutput g5\n")?;
    let (pm, rep) = valiant_sum_to_per(&g, &["e1", "e2"], g.size() + 1)?;
    println!("side {} (bound {}), formula nodes {}", rep.side, rep.bound, rep.formula_nodes);
    let want = exponential_sum(&g, &["e1", "e2"])?;
    let got = sparse_per_symbolic(&pm.matrix)?;
    println!("sum = {}", want);
    println!("per matches: {}", got == want);

    let m: Vec<Vec<_>> = (0..5).map(|i| (0..5).map(|j| f.int(((i * 5 + j) % 7) as i64)).collect()).collect();
    println!("ryser 5x5 over F_101: {}", ryser(f, &m)?);
    Ok(())
}
