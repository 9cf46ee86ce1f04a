//! Write a decorated patch in the Poincaré disc to `disc.svg`.

use std::collections::BTreeSet;

use heptatile::decorate::{build_decorated, BuildConfig};
use heptatile::render::{max_shared_side_gap, place, render_svg, Layer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (dp, _) = build_decorated(BuildConfig::new(5, 2))?;
    let pl = place(dp.patch(), 5)?;
    println!(
        "{} tiles placed, worst side gap {:.1e}",
        pl.tiles.len(),
        max_shared_side_gap(&pl)
    );
    let layers: BTreeSet<Layer> = Layer::ALL.into_iter().collect();
    let path = std::env::args().nth(1).unwrap_or_else(|| "disc.svg".into());
    std::fs::write(&path, render_svg(&dp, &layers, 5)?)?;
    println!("wrote {path}");
    Ok(())
}
