//! The seven neighbors of a few tiles, with the side each one sees back.

use heptatile::heptagrid::{grow_tree, side_role, Neighbor, TileAddress, TileStatus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let patch = grow_tree(TileStatus::R, 5);
    for text in ["1", "3.1", "3.1.2"] {
        let addr: TileAddress = text.parse()?;
        let status = patch.status_of(&addr).ok_or("outside the patch")?;
        println!("{addr} ({status})");
        for side in 1..=7 {
            let role = side_role(status, side);
            match patch.neighbor(&addr, side)? {
                Neighbor::Tile(n, back) => {
                    let ns = patch.status_of(&n).ok_or("outside the patch")?;
                    println!("  side {side} {role:?}: {n} ({ns}) side {back}");
                }
                Neighbor::Boundary => println!("  side {side} {role:?}: boundary"),
            }
        }
    }
    Ok(())
}
