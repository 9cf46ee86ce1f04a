//! Prototile catalog over every wire anchor, at two depths, with the
//! per-category reconciliation against 29/128/75.

use heptatile::decorate::{anchored_catalog, Category, BASE_TARGET};
use heptatile::heptagrid::TileStatus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = anchored_catalog(TileStatus::G, 12, 0)?;
    let b = anchored_catalog(TileStatus::G, 14, 0)?;
    println!("depth 12: {} prototiles, depth 14: {}", a.len(), b.len());
    let added = b.keys().filter(|k| !a.contains_key(*k)).count();
    println!("added between the two depths: {added}");
    let mut base = 0;
    for c in Category::ALL {
        let n = b.values().filter(|(_, cat)| *cat == c).count();
        if let Some(t) = c.target() {
            base += n;
            println!("{:<16} {n:>4} (target {t})", c.name());
        }
    }
    println!("base {base} (target {BASE_TARGET})");
    Ok(())
}
