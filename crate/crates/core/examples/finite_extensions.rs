//! Finite central extensions: section cocycles, their ℤ_n class, and the
//! vanishing of the real class.

use std::error::Error;

use ddverify::discrete::{is_coboundary, real_vanishing, CoboundaryVerdict};
use ddverify::models;
use ddverify::report::to_text;

fn main() -> Result<(), Box<dyn Error>> {
    for name in ["z4_over_z2", "q8_over_v4", "split_v4"] {
        let ext = models::finite(name)?;
        let c = ext.section_cocycle()?;
        println!(
            "{name}: |Ĝ| = {}, |G| = {}, n = {}, c = {:?}",
            ext.hat().order(),
            ext.base().order(),
            ext.modulus(),
            c.values()
        );
        match is_coboundary(&c, ext.base())? {
            CoboundaryVerdict::Trivial(b) => println!("  c = δb with b = {:?}", b.values()),
            CoboundaryVerdict::Nontrivial => println!("  c is not a ℤ_{} coboundary", ext.modulus()),
        }
        print!("{}", to_text(&[real_vanishing(&ext)?]));
    }
    Ok(())
}
