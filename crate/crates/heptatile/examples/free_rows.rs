//! Free rows of the first red triangles: the rows a machine computes on.

use heptatile::triangles::{free_row_formula, free_rows, trilateral};

fn main() {
    for g in (1..=9).step_by(2) {
        let r = free_rows(&trilateral(g, 0)).expect("red triangle");
        println!(
            "g={g}: {} free rows (formula {}), first ones {:?}",
            r.count,
            free_row_formula(g),
            &r.rows[..r.rows.len().min(6)]
        );
    }
}
