//! Run a machine inside red triangles of growing generation and decide
//! whether the tiling gets blocked.

use heptatile::triangles::trilateral;
use heptatile::turing::{parse_data, parse_tm, simulate_in_triangle, tiling_decision, DEFAULT_MAX_GEN};

const MACHINE: &str = "TM v1
states: a b c d H
initial: a
halt: H
letters: _ 1
blank: _
rule a 1 -> 1 R b
rule b _ -> 1 R c
rule c _ -> 1 L d
rule d 1 -> _ R H
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tm = parse_tm(MACHINE)?;
    let data = parse_data(&tm, "1")?;
    for g in [1, 3, 5] {
        let out = simulate_in_triangle(&tm, &data, &trilateral(g, 0))?;
        println!("g={g}: {:?} after {} steps", out.verdict, out.trace.len());
    }
    println!("{}", tiling_decision(&tm, &data, DEFAULT_MAX_GEN));
    Ok(())
}
