//! Level sizes of a Fibonacci tree and the statuses on its first levels.

use heptatile::heptagrid::{grow_tree, TileStatus};

fn main() {
    let patch = grow_tree(TileStatus::G, 12);
    for m in 0..=12 {
        println!("level {m:>2}: {:>7} tiles", patch.level_len(m));
    }
    for m in 0..=3 {
        let row: String = patch
            .level(m)
            .iter()
            .map(|a| patch.status_of(a).unwrap().letter())
            .collect();
        println!("{m}: {row}");
    }
}
