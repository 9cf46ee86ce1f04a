//! The one-dimensional triangle construction with its signals, as SVG.

use heptatile::render::render_schematic;
use heptatile::triangles::{construct_generations, signals};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let len = 64;
    let ts = construct_generations(4, len);
    let sl = signals(&ts, len);
    print!("{}", sl.to_csv());
    let path = std::env::args().nth(1).unwrap_or_else(|| "schematic.svg".into());
    std::fs::write(&path, render_schematic(&ts, &sl))?;
    eprintln!("wrote {path}");
    Ok(())
}
