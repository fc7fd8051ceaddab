//! Weakly-skew circuit to branching program to determinant projection,
//! plus the division-free determinant circuit and the 2x2 sign trick.

use valiant::abp::{serialize_abp, weakly_skew_to_abp};
use valiant::circuit::samples;
use valiant::det::{abp_to_det_projection, berkowitz_det_circuit, dc_upper_bound, per2_sign_trick};
use valiant::matrix::symbolic_det;
use valiant::projection::{serialize_projection, verify_projection};
use valiant::Field;

fn main() -> valiant::Result<()> {
    let q = Field::rationals();
    let c = samples::xy_plus_z(q);
    let a = weakly_skew_to_abp(&c)?;
    println!("abp: {} nodes, {} edges", a.node_count(), a.edge_count());
    print!("{}", serialize_abp(&a));

    let pm = abp_to_det_projection(&a);
    print!("{}", serialize_projection(&pm));
    println!("det = {}", symbolic_det(&pm.matrix)?);
    let report = verify_projection(&pm, 1, 20)?;
    println!("verified {}", report.passed);

    let (dc, _) = dc_upper_bound(&samples::comb(q, 5, false))?;
    println!("x1+...+x5: dc <= {dc}");

    let sign = per2_sign_trick(q);
    println!("per_2 as det_2: {}", verify_projection(&sign, 1, 20)?.passed);

    for n in 1..=6 {
        let b = berkowitz_det_circuit(q, n)?;
        let size = b.size();
        println!("berkowitz n={n}: size {size}, size/n^4 {:.3}, weakly-skew {}", size as f64 / (n as f64).powi(4), b.is_weakly_skew());
    }
    Ok(())
}
