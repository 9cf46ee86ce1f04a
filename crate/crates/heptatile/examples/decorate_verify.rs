//! Decorate a patch, verify it, then break one side and verify again.

use heptatile::decorate::{build_decorated, verify, BuildConfig, Component};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (mut dp, ts) = build_decorated(BuildConfig::new(8, 3))?;
    println!("{} trilaterals, {} distinct prototiles", ts.len(), dp.pool().len());
    println!("violations: {}", verify(&dp).len());
    let id = dp
        .layout()
        .ids()
        .find(|&id| dp.layout().is_interior(id) && id.level > 3)
        .ok_or("no interior tile")?;
    dp.mutate(id, 2, Component::IsoclineBand, 0);
    for v in verify(&dp) {
        println!("{v}");
    }
    Ok(())
}
