//! The first generations of trilaterals along a wire of length 32.

use heptatile::triangles::{construct_generations, mid_line_phantoms, trilaterals_csv};

fn main() {
    let ts = construct_generations(3, 32);
    print!("{}", trilaterals_csv(&ts));
    for t in ts.iter().filter(|t| t.is_triangle() && t.generation == 3) {
        let ph = mid_line_phantoms(t).expect("a triangle");
        println!(
            "g3 triangle at {} crosses {} phantoms on its mid-line",
            t.vertex,
            ph.len()
        );
    }
}
