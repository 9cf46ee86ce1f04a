//! Levels as isoclines: level marks, isocline colours, wires of seeds and
//! seed-density queries.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::heptagrid::{
    side_of_role, HeptaError, Layout, Neighbor, SideRole, Skeleton, TileAddress, TileId, TileStatus, TreePatch,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MarkKind {
    W,
    B,
}

/// The segment a tile contributes to its isocline, joining the midpoints of
/// its left and right sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelMark {
    pub kind: MarkKind,
    pub join: (u8, u8),
}

impl LevelMark {
    pub fn is_w(&self) -> bool {
        self.kind == MarkKind::W
    }
}

pub fn mark_for(status: TileStatus) -> LevelMark {
    let kind = match status {
        TileStatus::Y | TileStatus::G => MarkKind::B,
        _ => MarkKind::W,
    };
    let left = side_of_role(status, SideRole::Left).expect("left side");
    let right = side_of_role(status, SideRole::Right).expect("right side");
    LevelMark {
        kind,
        join: (left, right),
    }
}

pub fn assign_marks(patch: &TreePatch) -> Result<BTreeMap<TileAddress, LevelMark>, HeptaError> {
    let layout = Layout::new(patch)?;
    Ok(layout
        .ids()
        .map(|id| (layout.address(id), mark_for(layout.status(id))))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IsoColour {
    Green,
    Orange,
    Blue,
}

impl IsoColour {
    pub fn letter(self) -> char {
        match self {
            IsoColour::Green => 'g',
            IsoColour::Orange => 'o',
            IsoColour::Blue => 'b',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IsoColour::Green => "green",
            IsoColour::Orange => "orange",
            IsoColour::Blue => "blue",
        }
    }

    pub fn is_active(self) -> bool {
        self != IsoColour::Blue
    }
}

/// Which isocline residue mod 8 is green. Isocline 0 is the original root's
/// level, so phase 0 makes the root's isocline green.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Phase(u8);

impl Phase {
    pub fn new(p: u8) -> Option<Phase> {
        (p < 8).then_some(Phase(p))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoclineIndex(pub i64);

impl IsoclineIndex {
    pub fn colour(self, phase: Phase) -> IsoColour {
        match (self.0 - phase.0 as i64).rem_euclid(8) {
            0 => IsoColour::Green,
            4 => IsoColour::Orange,
            _ => IsoColour::Blue,
        }
    }
}

/// Isocline of a tile: its depth below the apex minus the number of upward
/// extensions, so the original root sits on isocline 0.
pub fn isocline_of(patch: &TreePatch, addr: &TileAddress) -> IsoclineIndex {
    IsoclineIndex(level_isocline(patch, addr.len()))
}

pub fn level_isocline(patch: &TreePatch, level: usize) -> i64 {
    level as i64 - patch.up_extensions().len() as i64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub address: TileAddress,
    pub isocline: IsoclineIndex,
    pub active: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireSeed {
    pub abscissa: i64,
    pub address: TileAddress,
    pub isocline: IsoclineIndex,
}

/// Seeds joined by the Y, G, M, R pattern, four isoclines apart, together
/// with the patch they live in (upward steps may have extended it).
#[derive(Clone, Debug)]
pub struct Wire {
    seeds: Vec<WireSeed>,
    patch: TreePatch,
    phase: Phase,
    origin: i64,
    anchor: i64,
}

/// Slots of the Y-son, its G-son, that tile's M-son and the R-son below it.
pub const WIRE_STEP: [u8; 4] = [1, 3, 2, 2];
/// Fathers applied, nearest first, when a wire climbs by one seed.
pub const WIRE_FATHERS: [TileStatus; 4] = [TileStatus::M, TileStatus::G, TileStatus::Y, TileStatus::R];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WireError {
    #[error("the wire pattern is unavailable at {0}")]
    PatternUnavailable(TileAddress),
    #[error("{0} is not an R-tile on a green isocline")]
    NotAGreenSeed(TileAddress),
    #[error("wire origin abscissa must be even, got {0}")]
    OddOrigin(i64),
    #[error(transparent)]
    Grid(#[from] HeptaError),
}

pub fn build_wire(
    patch: &TreePatch,
    start: &TileAddress,
    down_steps: usize,
    up_steps: usize,
    phase: Phase,
) -> Result<Wire, WireError> {
    let status = patch
        .status_of(start)
        .ok_or_else(|| HeptaError::NotInPatch(start.clone()))?;
    if status != TileStatus::R || isocline_of(patch, start).colour(phase) != IsoColour::Green {
        return Err(WireError::NotAGreenSeed(start.clone()));
    }
    let mut patch = patch.clone();
    let mut seeds = vec![WireSeed {
        abscissa: 0,
        address: start.clone(),
        isocline: isocline_of(&patch, start),
    }];
    let mut cur = start.clone();
    for i in 1..=down_steps as i64 {
        let mut next = cur.clone();
        for slot in WIRE_STEP {
            next = next.child(slot);
        }
        if !patch.contains(&next) {
            return Err(WireError::PatternUnavailable(cur));
        }
        seeds.push(WireSeed {
            abscissa: i,
            isocline: isocline_of(&patch, &next),
            address: next.clone(),
        });
        cur = next;
    }
    for i in 1..=up_steps as i64 {
        let mut top = seeds[0].address.clone();
        for father in WIRE_FATHERS {
            match top.parent() {
                Some(p) => {
                    if patch.status_of(&p) != Some(father) {
                        return Err(WireError::PatternUnavailable(top));
                    }
                    top = p;
                }
                None => {
                    let slot = crate::heptagrid::slot_of(father, patch.apex_status())
                        .ok_or_else(|| WireError::PatternUnavailable(top.clone()))?;
                    patch = patch.extend_upward(father)?;
                    for s in seeds.iter_mut() {
                        s.address = s.address.prefixed(slot);
                    }
                    top = TileAddress::apex();
                }
            }
        }
        seeds.insert(
            0,
            WireSeed {
                abscissa: -i,
                isocline: isocline_of(&patch, &top),
                address: top,
            },
        );
    }
    for s in seeds.iter_mut() {
        s.isocline = isocline_of(&patch, &s.address);
    }
    let anchor = seeds[0].isocline.0 - 4 * seeds[0].abscissa;
    Ok(Wire {
        seeds,
        patch,
        phase,
        origin: 0,
        anchor,
    })
}

impl Wire {
    pub fn seeds(&self) -> &[WireSeed] {
        &self.seeds
    }

    pub fn patch(&self) -> &TreePatch {
        &self.patch
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Relabel the seeds so that the starting seed has abscissa `origin`.
    pub fn rebase(mut self, origin: i64) -> Result<Wire, WireError> {
        if origin.rem_euclid(2) != 0 {
            return Err(WireError::OddOrigin(origin));
        }
        let shift = origin - self.origin;
        self.origin = origin;
        self.anchor -= 4 * shift;
        for s in self.seeds.iter_mut() {
            s.abscissa += shift;
        }
        Ok(self)
    }

    /// Abscissa of the seed the wire was started from.
    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn seed_at(&self, abscissa: i64) -> Option<&WireSeed> {
        self.seeds.iter().find(|s| s.abscissa == abscissa)
    }

    /// Isocline on which abscissa 0 lies, extrapolated along the wire.
    pub fn anchor_isocline(&self) -> i64 {
        self.anchor
    }

    /// The same wire seen in the top `depth` levels of its patch; seeds
    /// below are dropped but the abscissas of the isoclines are kept.
    pub fn truncated(&self, depth: usize) -> Wire {
        let ups = self.patch.up_extensions().len();
        let root = self.patch.status_of(self.patch.origin()).expect("origin in patch");
        let base = depth.min(self.patch.depth()).max(ups) - ups;
        let patch = self
            .patch
            .up_extensions()
            .iter()
            .try_fold(TreePatch::grow(root, base), |p, &f| p.extend_upward(f))
            .expect("extensions already applied once");
        let seeds = self
            .seeds
            .iter()
            .filter(|s| patch.contains(&s.address))
            .cloned()
            .collect();
        Wire {
            seeds,
            patch,
            ..self.clone()
        }
    }

    /// Abscissa carried by isocline `iso`, if it is a green or orange one.
    pub fn abscissa_of_isocline(&self, iso: i64) -> Option<i64> {
        let d = iso - self.anchor_isocline();
        (d.rem_euclid(4) == 0).then_some(d.div_euclid(4))
    }
}

/// Every R-tile of the patch, with its isocline and activity.
pub fn seeds(patch: &TreePatch, phase: Phase) -> Result<Vec<Seed>, HeptaError> {
    let layout = Layout::new(patch)?;
    Ok(layout
        .ids()
        .filter(|&id| layout.status(id) == TileStatus::R)
        .map(|id| {
            let iso = IsoclineIndex(level_isocline(patch, id.level));
            Seed {
                address: layout.address(id),
                isocline: iso,
                active: iso.colour(phase).is_active(),
            }
        })
        .collect())
}

pub fn seeds_on_isoclines(
    patch: &TreePatch,
    from: IsoclineIndex,
    to: IsoclineIndex,
    phase: Phase,
) -> Result<BTreeMap<IsoclineIndex, Vec<Seed>>, HeptaError> {
    let mut out: BTreeMap<IsoclineIndex, Vec<Seed>> = (from.0..=to.0).map(|i| (IsoclineIndex(i), Vec::new())).collect();
    for s in seeds(patch, phase)? {
        if let Some(v) = out.get_mut(&s.isocline) {
            v.push(s);
        }
    }
    Ok(out)
}

/// Relative levels below `root` (1..=depth) that hold an R-tile of T(root).
pub fn seed_levels_below(patch: &TreePatch, root: &TileAddress, depth: usize) -> Vec<bool> {
    let mut level = vec![root.clone()];
    let mut out = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for a in &level {
            let s = patch.status_of(a).expect("inside patch");
            for slot in 1..=s.arity() as u8 {
                let c = a.child(slot);
                if patch.contains(&c) {
                    next.push(c);
                }
            }
        }
        out.push(next.iter().any(|a| patch.status_of(a) == Some(TileStatus::R)));
        level = next;
    }
    out
}

pub const SUPERDENSITY_RADIUS: u32 = 12;
pub const DENSITY_CLAIM: u32 = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeedError {
    #[error("the patch margin around {0} is too small")]
    InsufficientMargin(TileAddress),
    #[error("no active seed within {SUPERDENSITY_RADIUS} of {0}")]
    NoSeed(TileAddress),
    #[error(transparent)]
    Grid(#[from] HeptaError),
}

/// Closest active seed by breadth-first search over shared sides. The
/// answer is exact: no tile closer than the seed touches the patch boundary.
pub fn nearest_active_seed(patch: &TreePatch, addr: &TileAddress, phase: Phase) -> Result<(Seed, u32), SeedError> {
    let start = patch.id_of(addr).ok_or_else(|| HeptaError::NotInPatch(addr.clone()))?;
    let mut dist: BTreeMap<TileId, u32> = BTreeMap::new();
    dist.insert(start, 0);
    let mut queue = VecDeque::from([start]);
    let mut boundary_at: Option<u32> = None;
    while let Some(id) = queue.pop_front() {
        let d = dist[&id];
        let a = patch.address_of(id).expect("in patch");
        let iso = IsoclineIndex(level_isocline(patch, id.level));
        if patch.status_at(id) == Some(TileStatus::R) && iso.colour(phase).is_active() {
            if boundary_at.is_some_and(|b| b + 2 <= d) {
                return Err(SeedError::InsufficientMargin(addr.clone()));
            }
            return Ok((
                Seed {
                    address: a,
                    isocline: iso,
                    active: true,
                },
                d,
            ));
        }
        if d >= SUPERDENSITY_RADIUS {
            continue;
        }
        for s in 1..=7 {
            match patch.neighbor(&a, s)? {
                Neighbor::Tile(n, _) => {
                    let nid = patch.id_of(&n).expect("in patch");
                    if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(nid) {
                        e.insert(d + 1);
                        queue.push_back(nid);
                    }
                }
                Neighbor::Boundary => {
                    boundary_at.get_or_insert(d);
                }
            }
        }
    }
    if boundary_at.is_some() {
        Err(SeedError::InsufficientMargin(addr.clone()))
    } else {
        Err(SeedError::NoSeed(addr.clone()))
    }
}

/// Outcome of a whole-patch density scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    /// Tiles whose in-patch distance is certified exact.
    pub evaluated: usize,
    pub excluded: usize,
    pub max_distance: u32,
    /// `histogram[d]`: evaluated tiles at distance d.
    pub histogram: Vec<usize>,
}

fn multi_source_bfs(layout: &Layout, sources: impl Iterator<Item = TileId>) -> Vec<Vec<u32>> {
    let mut dist: Vec<Vec<u32>> = (0..=layout.depth())
        .map(|l| vec![u32::MAX; layout.level_len(l) as usize])
        .collect();
    let mut queue = VecDeque::new();
    for s in sources {
        dist[s.level][s.index as usize] = 0;
        queue.push_back(s);
    }
    while let Some(id) = queue.pop_front() {
        let d = dist[id.level][id.index as usize];
        for s in 1..=7 {
            if let Some((n, _)) = layout.neighbor(id, s) {
                let slot = &mut dist[n.level][n.index as usize];
                if *slot == u32::MAX {
                    *slot = d + 1;
                    queue.push_back(n);
                }
            }
        }
    }
    dist
}

/// Distance from every tile to the nearest active seed. A tile is evaluated
/// when every tile within distance d−2 of it (d its in-patch distance) lies
/// strictly inside the patch, which makes d the true distance.
pub fn density_scan(patch: &TreePatch, phase: Phase) -> Result<DensityReport, HeptaError> {
    let layout = Layout::new(patch)?;
    let seeds = layout.ids().filter(|&id| {
        layout.status(id) == TileStatus::R && IsoclineIndex(level_isocline(patch, id.level)).colour(phase).is_active()
    });
    let to_seed = multi_source_bfs(&layout, seeds);
    let rims = layout.ids().filter(|&id| !layout.is_interior(id));
    let margin = multi_source_bfs(&layout, rims);
    let mut report = DensityReport {
        evaluated: 0,
        excluded: 0,
        max_distance: 0,
        histogram: Vec::new(),
    };
    for id in layout.ids() {
        let d = to_seed[id.level][id.index as usize];
        let m = margin[id.level][id.index as usize];
        if d == u32::MAX || m.saturating_add(1) < d {
            report.excluded += 1;
            continue;
        }
        report.evaluated += 1;
        report.max_distance = report.max_distance.max(d);
        if report.histogram.len() <= d as usize {
            report.histogram.resize(d as usize + 1, 0);
        }
        report.histogram[d as usize] += 1;
    }
    Ok(report)
}
