//! A wire of seeds four isoclines apart, climbed upward a few steps, and
//! the distance from every tile to its nearest active seed.

use heptatile::heptagrid::{grow_tree, TileAddress, TileStatus};
use heptatile::isoclines::{build_wire, density_scan, Phase};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let patch = grow_tree(TileStatus::R, 12);
    let wire = build_wire(&patch, &TileAddress::apex(), 3, 2, Phase::default())?;
    for s in wire.seeds() {
        println!(
            "abscissa {:>2}  isocline {:>3}  {}",
            s.abscissa, s.isocline.0, s.address
        );
    }
    let report = density_scan(&patch, Phase::default())?;
    println!(
        "density: {} tiles evaluated, {} too close to the rim, max distance {}",
        report.evaluated, report.excluded, report.max_distance
    );
    for (d, n) in report.histogram.iter().enumerate() {
        println!("  d={d}: {n}");
    }
    Ok(())
}
