//! Meta-tiles of a small machine, grouped by role.

use heptatile::turing::{compile, parse_data, parse_tm, MetaRole};

const MACHINE: &str = "TM v1
states: q0 q1 qH
initial: q0
halt: qH
letters: _ 1
blank: _
rule q0 1 -> 1 R q0
rule q0 _ -> 1 L q1
rule q1 1 -> 1 R qH
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tm = parse_tm(MACHINE)?;
    let data = parse_data(&tm, "111")?;
    let report = compile(&tm, &data);
    print!("{}", report.summary());
    for role in MetaRole::ALL {
        println!("{:<16} {}", role.name(), report.role_count(role));
    }
    Ok(())
}
