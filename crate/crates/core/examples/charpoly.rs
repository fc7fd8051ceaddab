//! Characteristic polynomials three ways: the division-free circuit,
//! Newton identities over a field, and fraction-free elimination.

use std::collections::HashMap;

use valiant::det::{berkowitz_det_circuit, charpoly_eval, csanky_charpoly};
use valiant::eval::evaluate;
use valiant::matrix::bareiss_det;
use valiant::Field;

fn main() -> valiant::Result<()> {
    let f = Field::prime(10_007)?;
    let n = 5;
    let a: Vec<Vec<_>> = (0..n).map(|i| (0..n).map(|j| f.int(((3 * i * i + 7 * j + 2 * i * j + 1) % 13) as i64 - 6)).collect()).collect();

    let circuit = berkowitz_det_circuit(f, n)?;
    let mut point = HashMap::new();
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            point.insert(format!("x_{}_{}", i + 1, j + 1), v.clone());
        }
    }
    let by_circuit = evaluate(&circuit, &point)?[0].clone();
    let by_elimination = bareiss_det(f, &a);
    let c = csanky_charpoly(f, &a)?;
    let by_newton = {
        let at_zero = charpoly_eval(f, &c, &f.zero());
        if n % 2 == 0 { at_zero } else { -at_zero }
    };
    println!("det: circuit {by_circuit}, elimination {by_elimination}, newton {by_newton}");
    println!("charpoly coefficients: {}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
    Ok(())
}
