//! Generate the polynomial families, check their constructions against
//! the combinatorial oracles, and print their sidecars.

use valiant::families::{gen_family, FamilyName, FamilyParams};
use valiant::Field;

fn main() -> valiant::Result<()> {
    let f = Field::prime(101)?;
    let jobs = [
        (FamilyName::Det, FamilyParams::n(4)),
        (FamilyName::Per, FamilyParams::n(4)),
        (FamilyName::Hc, FamilyParams::n(4)),
        (FamilyName::Imm, FamilyParams::with_d(2, 3)),
        (FamilyName::Esym, FamilyParams::with_d(6, 3)),
        (FamilyName::Trees, FamilyParams::n(4)),
    ];
    for (name, params) in jobs {
        let d = gen_family(f, name, params)?;
        let verified = d.verify()?;
        print!("{}", d.sidecar(verified));
        println!();
    }
    let cut = gen_family(Field::prime(3)?, FamilyName::Cut, FamilyParams { n: 4, d: None, q: Some(3) })?;
    print!("{}", cut.sidecar(cut.verify()?));
    Ok(())
}
