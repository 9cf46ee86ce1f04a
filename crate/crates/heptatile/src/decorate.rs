//! Side decorations, prototile catalogs and matching verification.
//!
//! Every shared side gets one decoration computed from the edge itself, so
//! both tiles see the same value. The decoration has four parts: the tree
//! link with the statuses on both ends, the isocline band crossing the side,
//! the level-mark endpoint, and the set of signals running across it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::heptagrid::{
    parse_patch, side_role, sons, write_patch, HeptaError, Layout, NeighborTable, Ruleset, SideRole, Skeleton,
    TileAddress, TileId, TileStatus, TreePatch,
};
use crate::isoclines::{build_wire, level_isocline, mark_for, IsoColour, IsoclineIndex, Phase, Wire, WireError};
use crate::triangles::{
    construct_generations, signals as signal_layer, Attribute, Colour, SignalKind, SignalLayer, Trilateral,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkKind {
    /// Father above, son below.
    Tree,
    /// Left and right tiles of one level.
    Level,
    /// Upper and lower tiles of a diagonal contact.
    Diagonal,
}

/// Statuses on both ends of a side; `None` where the far tile is unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeLink {
    pub kind: LinkKind,
    pub a: Option<TileStatus>,
    pub b: Option<TileStatus>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hue {
    Dark,
    Light,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Laterality {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeSignal {
    Leg {
        colour: Colour,
        attribute: Attribute,
        hue: Hue,
        side: Laterality,
    },
    Basis {
        colour: Colour,
        attribute: Attribute,
    },
    Row(SignalKind),
    /// Carried only by the halting meta-tiles; nothing else matches it.
    Halt,
    /// Machine-specific sign of a meta-tile.
    Meta(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeDecoration {
    pub link: EdgeLink,
    pub band: Option<IsoColour>,
    pub mark: bool,
    pub signals: Vec<EdgeSignal>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    TreeEdge,
    IsoclineBand,
    MarkEnd,
    SignalSet,
    Status,
}

impl Component {
    pub const SIDE: [Component; 4] = [
        Component::TreeEdge,
        Component::IsoclineBand,
        Component::MarkEnd,
        Component::SignalSet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::TreeEdge => "treeEdge",
            Component::IsoclineBand => "isoclineBand",
            Component::MarkEnd => "markEnd",
            Component::SignalSet => "signalSet",
            Component::Status => "status",
        }
    }
}

impl EdgeDecoration {
    /// Components on which two decorations differ.
    pub fn mismatches(&self, other: &EdgeDecoration) -> Vec<Component> {
        let mut out = Vec::new();
        if self.link != other.link {
            out.push(Component::TreeEdge);
        }
        if self.band != other.band {
            out.push(Component::IsoclineBand);
        }
        if self.mark != other.mark {
            out.push(Component::MarkEnd);
        }
        if self.signals != other.signals {
            out.push(Component::SignalSet);
        }
        out
    }

    /// The same decoration with `component` changed to a different value.
    pub fn mutated(&self, component: Component, choice: usize) -> EdgeDecoration {
        let mut d = self.clone();
        match component {
            Component::TreeEdge => {
                let cur = d.link.b;
                let options: Vec<Option<TileStatus>> = TileStatus::ALL
                    .iter()
                    .map(|&s| Some(s))
                    .chain([None])
                    .filter(|&s| s != cur)
                    .collect();
                d.link.b = options[choice % options.len()];
            }
            Component::IsoclineBand => {
                let options: Vec<Option<IsoColour>> = [
                    None,
                    Some(IsoColour::Green),
                    Some(IsoColour::Orange),
                    Some(IsoColour::Blue),
                ]
                .into_iter()
                .filter(|&c| c != d.band)
                .collect();
                d.band = options[choice % options.len()];
            }
            Component::MarkEnd => d.mark = !d.mark,
            Component::SignalSet | Component::Status => {
                let extra = EdgeSignal::Row(SignalKind::ALL[choice % SignalKind::ALL.len()]);
                match d.signals.iter().position(|&s| s == extra) {
                    Some(p) => {
                        d.signals.remove(p);
                    }
                    None => {
                        d.signals.push(extra);
                        d.signals.sort();
                    }
                }
            }
        }
        d
    }
}

fn status_token(s: Option<TileStatus>) -> char {
    s.map_or('?', TileStatus::letter)
}

impl fmt::Display for EdgeSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let attr = |a: Attribute| match a {
            Attribute::Triangle => "tri",
            Attribute::Phantom => "ph",
        };
        match *self {
            EdgeSignal::Leg {
                colour,
                attribute,
                hue,
                side,
            } => write!(
                f,
                "{}.{}.{}.{}",
                match hue {
                    Hue::Dark => "legDark",
                    Hue::Light => "legLight",
                },
                colour.name(),
                attr(attribute),
                match side {
                    Laterality::Left => "L",
                    Laterality::Right => "R",
                }
            ),
            EdgeSignal::Basis { colour, attribute } => {
                write!(f, "basis.{}.{}", colour.name(), attr(attribute))
            }
            EdgeSignal::Row(k) => write!(f, "{}", k.name()),
            EdgeSignal::Halt => write!(f, "halt"),
            EdgeSignal::Meta(n) => write!(f, "meta.{n}"),
        }
    }
}

fn parse_signal(tok: &str) -> Option<EdgeSignal> {
    if tok == "halt" {
        return Some(EdgeSignal::Halt);
    }
    if let Some(k) = SignalKind::parse(tok) {
        return Some(EdgeSignal::Row(k));
    }
    let parts: Vec<&str> = tok.split('.').collect();
    let colour = |s: &str| match s {
        "red" => Some(Colour::Red),
        "blue" => Some(Colour::Blue),
        _ => None,
    };
    let attribute = |s: &str| match s {
        "tri" => Some(Attribute::Triangle),
        "ph" => Some(Attribute::Phantom),
        _ => None,
    };
    match parts.as_slice() {
        ["meta", n] => n.parse().ok().map(EdgeSignal::Meta),
        ["basis", c, a] => Some(EdgeSignal::Basis {
            colour: colour(c)?,
            attribute: attribute(a)?,
        }),
        [h, c, a, s] => Some(EdgeSignal::Leg {
            hue: match *h {
                "legDark" => Hue::Dark,
                "legLight" => Hue::Light,
                _ => return None,
            },
            colour: colour(c)?,
            attribute: attribute(a)?,
            side: match *s {
                "L" => Laterality::Left,
                "R" => Laterality::Right,
                _ => return None,
            },
        }),
        _ => None,
    }
}

impl fmt::Display for EdgeDecoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = match self.link.kind {
            LinkKind::Tree => '-',
            LinkKind::Level => '=',
            LinkKind::Diagonal => '/',
        };
        let sigs: Vec<String> = self.signals.iter().map(ToString::to_string).collect();
        write!(
            f,
            "tree:{}{}{}|iso:{}|mark:{}|sig:{}",
            status_token(self.link.a),
            sep,
            status_token(self.link.b),
            self.band.map_or('-', IsoColour::letter),
            u8::from(self.mark),
            sigs.join(",")
        )
    }
}

impl std::str::FromStr for EdgeDecoration {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut fields = s.split('|');
        let mut field = |name: &str| {
            fields
                .next()
                .and_then(|f| f.strip_prefix(name))
                .ok_or_else(|| format!("missing `{name}` in `{s}`"))
        };
        let tree: Vec<char> = field("tree:")?.chars().collect();
        if tree.len() != 3 {
            return Err(format!("bad link in `{s}`"));
        }
        let status = |c: char| -> Result<Option<TileStatus>, String> {
            if c == '?' {
                Ok(None)
            } else {
                TileStatus::from_letter(c).map(Some).ok_or(format!("bad status `{c}`"))
            }
        };
        let kind = match tree[1] {
            '-' => LinkKind::Tree,
            '=' => LinkKind::Level,
            '/' => LinkKind::Diagonal,
            _ => return Err(format!("bad link separator in `{s}`")),
        };
        let link = EdgeLink {
            kind,
            a: status(tree[0])?,
            b: status(tree[2])?,
        };
        let band = match field("iso:")? {
            "-" => None,
            "g" => Some(IsoColour::Green),
            "o" => Some(IsoColour::Orange),
            "b" => Some(IsoColour::Blue),
            other => return Err(format!("bad band `{other}`")),
        };
        let mark = match field("mark:")? {
            "0" => false,
            "1" => true,
            other => return Err(format!("bad mark `{other}`")),
        };
        let sig = field("sig:")?;
        let mut signals = Vec::new();
        for tok in sig.split(',').filter(|t| !t.is_empty()) {
            signals.push(parse_signal(tok).ok_or_else(|| format!("bad signal `{tok}`"))?);
        }
        signals.sort();
        Ok(EdgeDecoration {
            link,
            band,
            mark,
            signals,
        })
    }
}

/// A tile status with its seven side decorations; side 1 faces the father.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prototile {
    pub status: TileStatus,
    pub sides: [EdgeDecoration; 7],
}

impl Prototile {
    pub fn serialize(&self, id: usize) -> String {
        let mut out = format!("proto {id} {}", self.status);
        for (i, d) in self.sides.iter().enumerate() {
            let _ = write!(out, " side{}={d}", i + 1);
        }
        out
    }

    pub fn category(&self) -> Category {
        let sigs = self.sides.iter().flat_map(|d| d.signals.iter());
        let mut cat = Category::IsoclineCore;
        for s in sigs {
            match s {
                EdgeSignal::Halt | EdgeSignal::Meta(_) => return Category::Meta,
                EdgeSignal::Row(_) => cat = Category::FreeRowSignal,
                EdgeSignal::Leg { .. } | EdgeSignal::Basis { .. } => {
                    if cat == Category::IsoclineCore {
                        cat = Category::Trilateral;
                    }
                }
            }
        }
        cat
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    IsoclineCore,
    Trilateral,
    FreeRowSignal,
    Meta,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::IsoclineCore,
        Category::Trilateral,
        Category::FreeRowSignal,
        Category::Meta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::IsoclineCore => "isocline-core",
            Category::Trilateral => "trilateral",
            Category::FreeRowSignal => "free-row-signal",
            Category::Meta => "meta",
        }
    }

    /// Count announced for the category; the machine-dependent meta-tiles
    /// have no fixed target.
    pub fn target(self) -> Option<usize> {
        match self {
            Category::IsoclineCore => Some(29),
            Category::Trilateral => Some(128),
            Category::FreeRowSignal => Some(75),
            Category::Meta => None,
        }
    }
}

pub const BASE_TARGET: usize = 232;

#[derive(Debug, Error)]
pub enum DecorateError {
    #[error("the wire does not live in this patch")]
    WireOutOfPatch,
    #[error(transparent)]
    Grid(#[from] HeptaError),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("no wire start on a green isocline within depth {0}")]
    NoWireStart(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Generation and index of the trilateral a decoration came from.
pub type Source = (u32, u64);

/// A patch whose tiles carry prototiles drawn from an interned pool.
#[derive(Clone, Debug)]
pub struct DecoratedPatch {
    patch: TreePatch,
    layout: Layout,
    phase: Phase,
    anchor: Option<i64>,
    pool: Vec<Prototile>,
    index: HashMap<Prototile, u32>,
    tiles: Vec<Vec<u32>>,
    provenance: HashMap<(TileId, u8), Vec<Source>>,
    basis_sources: HashMap<usize, Vec<Option<Source>>>,
}

type SideSignals = HashMap<(TileId, u8), Vec<(EdgeSignal, Source)>>;

pub fn decorate(
    patch: &TreePatch,
    wire: &Wire,
    trilaterals: &[Trilateral],
    signals: &SignalLayer,
) -> Result<DecoratedPatch, DecorateError> {
    if wire.patch() != patch || wire.seeds().iter().any(|s| !patch.contains(&s.address)) {
        return Err(DecorateError::WireOutOfPatch);
    }
    let layout = Layout::new(patch)?;
    let phase = wire.phase();
    let by_vertex: HashMap<u64, &Trilateral> = trilaterals.iter().map(|t| (t.vertex, t)).collect();
    let depth = layout.depth();
    let level_abscissa = |l: usize| -> Option<i64> { wire.abscissa_of_isocline(level_isocline(patch, l)) };
    let level_of_abscissa =
        |a: u64| -> i64 { wire.anchor_isocline() + 4 * a as i64 + patch.up_extensions().len() as i64 };

    let mut side_sigs: SideSignals = HashMap::new();
    let mut add = |key: (TileId, u8), sig: EdgeSignal, src: Source| {
        side_sigs.entry(key).or_default().push((sig, src));
    };

    // Legs follow the two borders of the vertex seed's tree.
    for l in 0..=depth {
        let Some(a) = level_abscissa(l).filter(|&a| a >= 0) else {
            continue;
        };
        let Some(t) = by_vertex.get(&(a as u64)) else {
            continue;
        };
        let src = (t.generation, t.index);
        let span = 4 * t.height as usize;
        for x in 0..layout.level_len(l) {
            let seed = TileId::new(l, x);
            if layout.status(seed) != TileStatus::R {
                continue;
            }
            for side in [Laterality::Left, Laterality::Right] {
                let mut cur = seed;
                for k in 0..span {
                    let status = layout.status(cur);
                    let slot = match side {
                        Laterality::Left => 1,
                        Laterality::Right => status.arity() as u8,
                    };
                    let hue = if k < span / 2 { Hue::Dark } else { Hue::Light };
                    let sig = EdgeSignal::Leg {
                        colour: t.colour,
                        attribute: t.attribute,
                        hue,
                        side,
                    };
                    let son_side = crate::heptagrid::son_sides(status)[slot as usize - 1];
                    add((cur, son_side), sig, src);
                    if cur.level == depth {
                        break;
                    }
                    let child = TileId::new(cur.level + 1, layout.first_child(cur) + slot as u64 - 1);
                    add((child, 1), sig, src);
                    cur = child;
                }
            }
        }
    }

    // Bases run along the basis level between the two legs.
    let mut basis_edges: HashMap<usize, Vec<Option<(EdgeSignal, Source)>>> = HashMap::new();
    for t in trilaterals {
        let lb = level_of_abscissa(t.basis);
        if lb < 0 || lb > depth as i64 {
            continue;
        }
        let lb = lb as usize;
        let lv = level_of_abscissa(t.vertex);
        let sig = EdgeSignal::Basis {
            colour: t.colour,
            attribute: t.attribute,
        };
        let src = (t.generation, t.index);
        let len = layout.level_len(lb) as usize;
        let edges = basis_edges.entry(lb).or_insert_with(|| vec![None; len + 1]);
        if lv < 0 {
            // The vertex seed is above the patch, whose whole level lies
            // between the legs.
            for e in edges.iter_mut() {
                *e = Some((sig, src));
            }
            continue;
        }
        let lv = lv as usize;
        for x in 0..layout.level_len(lv) {
            let seed = TileId::new(lv, x);
            if layout.status(seed) != TileStatus::R {
                continue;
            }
            let (mut lo, mut hi) = (seed, seed);
            while lo.level < lb {
                lo = TileId::new(lo.level + 1, layout.first_child(lo));
                hi = TileId::new(
                    hi.level + 1,
                    layout.first_child(hi) + layout.status(hi).arity() as u64 - 1,
                );
            }
            for e in lo.index + 1..=hi.index {
                edges[e as usize] = Some((sig, src));
            }
        }
    }

    let mut provenance: HashMap<(TileId, u8), Vec<Source>> = HashMap::new();
    let mut overlays: HashMap<TileId, [Vec<EdgeSignal>; 7]> = HashMap::new();
    for ((id, s), v) in side_sigs {
        let sides = overlays.entry(id).or_default();
        for (sig, src) in v {
            sides[s as usize - 1].push(sig);
            provenance.entry((id, s)).or_default().push(src);
        }
    }
    let mut dp = DecoratedPatch {
        patch: patch.clone(),
        phase,
        anchor: Some(wire.anchor_isocline()),
        pool: Vec::new(),
        index: HashMap::new(),
        tiles: Vec::new(),
        provenance,
        basis_sources: basis_edges
            .iter()
            .map(|(&l, v)| (l, v.iter().map(|e| e.map(|(_, src)| src)).collect()))
            .collect(),
        layout,
    };
    let mut tiles = Vec::with_capacity(depth + 1);
    for l in 0..=depth {
        let iso = IsoclineIndex(level_isocline(patch, l));
        let colour = iso.colour(phase);
        let rows: Vec<EdgeSignal> = level_abscissa(l)
            .filter(|&a| a >= 0)
            .map(|a| signals.kinds_at(a as u64).into_iter().map(EdgeSignal::Row).collect())
            .unwrap_or_default();
        let basis: Option<Vec<Option<EdgeSignal>>> = basis_edges
            .get(&l)
            .map(|v| v.iter().map(|e| e.map(|(sig, _)| sig)).collect());
        // Without overlays a prototile depends only on the statuses around
        // the tile and the basis on its two level edges.
        let mut cache: HashMap<(u32, Option<EdgeSignal>, Option<EdgeSignal>), u32> = HashMap::new();
        let mut row = Vec::with_capacity(dp.layout.level_len(l) as usize);
        for x in 0..dp.layout.level_len(l) {
            let id = TileId::new(l, x);
            let status = dp.layout.status(id);
            let far: [Option<TileStatus>; 7] =
                std::array::from_fn(|i| dp.layout.neighbor(id, i as u8 + 1).map(|(n, _)| dp.layout.status(n)));
            let edge = |e: u64| basis.as_ref().and_then(|b| b[e as usize]);
            let (bl, br) = (edge(x), edge(x + 1));
            let build = |extra: Option<&[Vec<EdgeSignal>; 7]>| {
                let sides: [EdgeDecoration; 7] = std::array::from_fn(|i| {
                    let s = i as u8 + 1;
                    let role = side_role(status, s);
                    let level_edge = matches!(role, SideRole::Left | SideRole::Right);
                    let mut sigs: Vec<EdgeSignal> = extra.map(|e| e[i].clone()).unwrap_or_default();
                    if level_edge {
                        sigs.extend(rows.iter().copied());
                        sigs.extend(if role == SideRole::Left { bl } else { br });
                    }
                    sigs.sort();
                    sigs.dedup();
                    EdgeDecoration {
                        link: link_for(status, far[i], role),
                        band: level_edge.then_some(colour),
                        mark: level_edge,
                        signals: sigs,
                    }
                });
                Prototile { status, sides }
            };
            let pid = match overlays.get(&id) {
                Some(extra) => {
                    let p = build(Some(extra));
                    dp.intern(p)
                }
                None => {
                    let key = far
                        .iter()
                        .fold(status.index() as u32, |k, f| k * 8 + f.map_or(7, |s| s.index() as u32));
                    match cache.get(&(key, bl, br)) {
                        Some(&pid) => pid,
                        None => {
                            let pid = dp.intern(build(None));
                            cache.insert((key, bl, br), pid);
                            pid
                        }
                    }
                }
            };
            row.push(pid);
        }
        tiles.push(row);
    }
    dp.tiles = tiles;
    Ok(dp)
}

/// Inputs of the standard pipeline: a tree patch, a wire descending
/// from the first green R-son of an M-tile, and every trilateral up to
/// `max_gen` along it.
#[derive(Clone, Copy, Debug)]
pub struct BuildConfig {
    pub apex: TileStatus,
    pub depth: usize,
    pub max_gen: u32,
    pub phase: Phase,
    /// Abscissa given to the wire's starting seed; must be even.
    pub origin: i64,
}

impl BuildConfig {
    pub fn new(depth: usize, max_gen: u32) -> Self {
        BuildConfig {
            apex: TileStatus::R,
            depth,
            max_gen,
            phase: Phase::default(),
            origin: 0,
        }
    }
}

/// Starting seed for a wire: the apex when its isocline is green, otherwise
/// the leftmost R-son of an M-tile on the first green level that has one,
/// otherwise the leftmost R-tile on a green level.
pub fn wire_start(patch: &TreePatch, phase: Phase) -> Option<TileAddress> {
    let first = usize::from(phase.value());
    if first == 0 && patch.apex_status() == TileStatus::R {
        return Some(TileAddress::apex());
    }
    let green = || (if first == 0 { 8 } else { first }..=patch.depth()).step_by(8);
    let level_r = |l: usize| {
        (0..patch.level_len(l))
            .map(move |i| TileId::new(l, i))
            .filter(|&id| patch.status_at(id) == Some(TileStatus::R))
    };
    green()
        .find_map(|l| level_r(l).find(|&id| Skeleton::status(patch, Skeleton::parent(patch, id).0) == TileStatus::M))
        .or_else(|| green().find_map(|l| level_r(l).next()))
        .and_then(|id| patch.address_of(id))
}

pub fn build_decorated(cfg: BuildConfig) -> Result<(DecoratedPatch, Vec<Trilateral>), DecorateError> {
    let patch = crate::heptagrid::grow_tree(cfg.apex, cfg.depth);
    // Shallow green levels of an R-tree may hold no R-tile; the wire is
    // then started lower down and cut back to the patch.
    let deep = crate::heptagrid::grow_tree(cfg.apex, cfg.depth.max(16));
    let start = wire_start(&deep, cfg.phase).ok_or(DecorateError::NoWireStart(deep.depth()))?;
    let down = deep.depth().saturating_sub(start.len()) / 4;
    let wire = build_wire(&deep, &start, down, 0, cfg.phase)?
        .rebase(cfg.origin)?
        .truncated(cfg.depth);
    // Abscissas reach one past the deepest isocline of the patch.
    let length = ((cfg.depth as i64 - wire.anchor_isocline()).div_euclid(4) + 1).max(0) as u64;
    let ts = construct_generations(cfg.max_gen, length);
    let sl = signal_layer(&ts, length);
    Ok((decorate(&patch, &wire, &ts, &sl)?, ts))
}

fn link_for(status: TileStatus, far: Option<TileStatus>, role: SideRole) -> EdgeLink {
    let (kind, a, b) = match role {
        SideRole::Father => (LinkKind::Tree, far, Some(status)),
        SideRole::Son(k) => (
            LinkKind::Tree,
            Some(status),
            Some(sons(status, Ruleset::R1)[k as usize - 1]),
        ),
        SideRole::Left => (LinkKind::Level, far, Some(status)),
        SideRole::Right => (LinkKind::Level, Some(status), far),
        SideRole::UpLeft | SideRole::UpRight => (LinkKind::Diagonal, far, Some(status)),
        SideRole::DownLeft | SideRole::DownRight => (LinkKind::Diagonal, Some(status), far),
    };
    EdgeLink { kind, a, b }
}

/// One mismatching side pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub a: TileAddress,
    pub side_a: u8,
    pub b: TileAddress,
    pub side_b: u8,
    pub component: Component,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "violation {} side {} / {} side {}: {}",
            self.a,
            self.side_a,
            self.b,
            self.side_b,
            self.component.name()
        )
    }
}

impl DecoratedPatch {
    fn intern(&mut self, p: Prototile) -> u32 {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        let i = self.pool.len() as u32;
        self.index.insert(p.clone(), i);
        self.pool.push(p);
        i
    }

    pub fn patch(&self) -> &TreePatch {
        &self.patch
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn prototile(&self, id: TileId) -> &Prototile {
        &self.pool[self.tiles[id.level][id.index as usize] as usize]
    }

    pub fn prototile_id(&self, id: TileId) -> u32 {
        self.tiles[id.level][id.index as usize]
    }

    pub fn pool(&self) -> &[Prototile] {
        &self.pool
    }

    pub fn side(&self, id: TileId, side: u8) -> &EdgeDecoration {
        &self.prototile(id).sides[side as usize - 1]
    }

    /// Trilaterals whose legs or basis decorate this side.
    pub fn provenance(&self, id: TileId, side: u8) -> Vec<Source> {
        let mut out = self.provenance.get(&(id, side)).cloned().unwrap_or_default();
        let edge = match side_role(self.layout.status(id), side) {
            SideRole::Left => Some(id.index),
            SideRole::Right => Some(id.index + 1),
            _ => None,
        };
        if let Some(e) = edge {
            out.extend(self.basis_sources.get(&id.level).and_then(|v| v[e as usize]));
        }
        out
    }

    pub fn isocline_colour(&self, id: TileId) -> IsoColour {
        IsoclineIndex(level_isocline(&self.patch, id.level)).colour(self.phase)
    }

    /// Isocline of abscissa 0 for the wire used, if any.
    pub fn anchor_isocline(&self) -> Option<i64> {
        self.anchor
    }

    /// Replace the prototile of one tile.
    pub fn set_prototile(&mut self, id: TileId, p: Prototile) {
        let i = self.intern(p);
        self.tiles[id.level][id.index as usize] = i;
    }

    /// Change one component of one side of one tile.
    pub fn mutate(&mut self, id: TileId, side: u8, component: Component, choice: usize) {
        let mut p = self.prototile(id).clone();
        if component == Component::Status {
            let cur = p.status;
            let others: Vec<TileStatus> = TileStatus::ALL.into_iter().filter(|&s| s != cur).collect();
            p.status = others[choice % others.len()];
        } else {
            let i = side as usize - 1;
            p.sides[i] = p.sides[i].mutated(component, choice);
        }
        self.set_prototile(id, p);
    }

    pub fn write_patch(&self) -> String {
        write_patch(&self.patch, |addr| {
            let id = self.layout.id_of(addr).expect("in patch");
            let status = self.layout.status(id);
            let m = mark_for(status);
            let colour = self.isocline_colour(id);
            format!(
                "iso {} {} mark {} {},{} proto {}",
                level_isocline(&self.patch, id.level),
                colour.name(),
                if m.is_w() { 'w' } else { 'b' },
                m.join.0,
                m.join.1,
                self.prototile_id(id)
            )
        })
    }

    pub fn write_tileset(&self) -> String {
        write_tileset(self.pool.iter().enumerate())
    }

    /// Rebuild a decorated patch from a patch file carrying `proto <id>`
    /// fields and a tileset file.
    pub fn from_files(patch_text: &str, tileset_text: &str) -> Result<DecoratedPatch, DecorateError> {
        let tiles_by_id = parse_tileset(tileset_text)?;
        let pf = parse_patch(patch_text)?;
        let layout = Layout::new(&pf.patch)?;
        let mut dp = DecoratedPatch {
            phase: Phase::default(),
            anchor: None,
            pool: Vec::new(),
            index: HashMap::new(),
            tiles: (0..=layout.depth())
                .map(|l| vec![u32::MAX; layout.level_len(l) as usize])
                .collect(),
            provenance: HashMap::new(),
            basis_sources: HashMap::new(),
            patch: pf.patch.clone(),
            layout,
        };
        for (n, (addr, status, fields)) in pf.tiles.iter().enumerate() {
            let line = n + 5;
            let perr = |msg: String| DecorateError::Parse { line, msg };
            let id = dp
                .layout
                .id_of(addr)
                .ok_or_else(|| perr(format!("address {addr} outside the patch")))?;
            if dp.layout.status(id) != *status {
                return Err(perr(format!("status of {addr} contradicts the rules")));
            }
            let pos = fields
                .iter()
                .position(|f| f == "proto")
                .ok_or_else(|| perr("missing `proto <id>`".into()))?;
            let pid: usize = fields
                .get(pos + 1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| perr("bad proto id".into()))?;
            let proto = tiles_by_id
                .get(&pid)
                .ok_or_else(|| perr(format!("unknown prototile {pid}")))?
                .clone();
            dp.set_prototile(id, proto);
        }
        if dp.tiles.iter().flatten().any(|&i| i == u32::MAX) {
            return Err(DecorateError::Parse {
                line: 0,
                msg: "some tiles have no prototile".into(),
            });
        }
        Ok(dp)
    }
}

pub fn write_tileset<'a>(protos: impl Iterator<Item = (usize, &'a Prototile)>) -> String {
    let mut out = String::from("HEPTATILESET v1\n");
    for (i, p) in protos {
        out.push_str(&p.serialize(i));
        out.push('\n');
    }
    out
}

pub fn parse_tileset(text: &str) -> Result<BTreeMap<usize, Prototile>, DecorateError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == "HEPTATILESET v1" => {}
        _ => {
            return Err(DecorateError::Parse {
                line: 1,
                msg: "expected `HEPTATILESET v1`".into(),
            })
        }
    }
    let mut out = BTreeMap::new();
    for (n, l) in lines {
        let perr = |msg: String| DecorateError::Parse { line: n + 1, msg };
        let mut parts = l.split_whitespace();
        if parts.next() != Some("proto") {
            return Err(perr("expected `proto`".into()));
        }
        let id: usize = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| perr("bad id".into()))?;
        let status: TileStatus = parts
            .next()
            .ok_or_else(|| perr("missing status".into()))?
            .parse()
            .map_err(|e: HeptaError| perr(e.to_string()))?;
        let mut sides = Vec::new();
        for (k, p) in parts.enumerate() {
            let prefix = format!("side{}=", k + 1);
            let d = p
                .strip_prefix(&prefix)
                .ok_or_else(|| perr(format!("expected `{prefix}`")))?;
            sides.push(d.parse::<EdgeDecoration>().map_err(perr)?);
        }
        let sides: [EdgeDecoration; 7] = sides
            .try_into()
            .map_err(|_| perr("a prototile has exactly seven sides".into()))?;
        out.insert(id, Prototile { status, sides });
    }
    Ok(out)
}

/// Every mismatch across interior shared sides, plus status disagreements
/// between a tile and its prototile.
pub fn verify(dp: &DecoratedPatch) -> Vec<Violation> {
    verify_where(dp, |_| true)
}

/// Verification restricted to the edges whose lower-ordered tile satisfies `keep`.
pub fn verify_where<F: Fn(TileId) -> bool>(dp: &DecoratedPatch, keep: F) -> Vec<Violation> {
    let layout = &dp.layout;
    let mut out = Vec::new();
    for id in layout.ids() {
        let p = dp.prototile(id);
        if keep(id) && p.status != layout.status(id) {
            let a = layout.address(id);
            out.push(Violation {
                b: a.clone(),
                a,
                side_a: 0,
                side_b: 0,
                component: Component::Status,
            });
        }
        for s in 1..=7u8 {
            let Some((n, ns)) = layout.neighbor(id, s) else {
                continue;
            };
            if n < id || !keep(id) {
                continue;
            }
            let q = dp.prototile(n);
            for c in p.sides[s as usize - 1].mismatches(&q.sides[ns as usize - 1]) {
                out.push(Violation {
                    a: layout.address(id),
                    side_a: s,
                    b: layout.address(n),
                    side_b: ns,
                    component: c,
                });
            }
        }
    }
    out.sort();
    out
}

/// Verification of the edges of a single tile.
pub fn verify_tile(dp: &DecoratedPatch, id: TileId) -> Vec<Violation> {
    let layout = &dp.layout;
    let p = dp.prototile(id);
    let mut out = Vec::new();
    if p.status != layout.status(id) {
        let a = layout.address(id);
        out.push(Violation {
            b: a.clone(),
            a,
            side_a: 0,
            side_b: 0,
            component: Component::Status,
        });
    }
    for s in 1..=7u8 {
        if let Some((n, ns)) = layout.neighbor(id, s) {
            for c in p.sides[s as usize - 1].mismatches(&dp.prototile(n).sides[ns as usize - 1]) {
                out.push(Violation {
                    a: layout.address(id),
                    side_a: s,
                    b: layout.address(n),
                    side_b: ns,
                    component: c,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub prototile: Prototile,
    pub count: usize,
    pub category: Category,
}

#[derive(Clone, Debug)]
pub struct CatalogReport {
    pub entries: Vec<CatalogEntry>,
}

impl CatalogReport {
    pub fn count(&self, c: Category) -> usize {
        self.entries.iter().filter(|e| e.category == c).count()
    }

    pub fn prototiles(&self) -> Vec<Prototile> {
        self.entries.iter().map(|e| e.prototile.clone()).collect()
    }

    pub fn with_extra(mut self, extra: impl IntoIterator<Item = Prototile>) -> CatalogReport {
        for p in extra {
            let category = p.category();
            self.entries.push(CatalogEntry {
                prototile: p,
                count: 0,
                category,
            });
        }
        self
    }

    /// Per-category counts next to the announced targets.
    pub fn reconciliation(&self) -> String {
        let mut out = String::new();
        let mut base = 0;
        for c in Category::ALL {
            let n = self.count(c);
            match c.target() {
                Some(t) => {
                    base += n;
                    let _ = writeln!(
                        out,
                        "{:<16} found {:>6}  target {:>4}  diff {:>+7}",
                        c.name(),
                        n,
                        t,
                        n as i64 - t as i64
                    );
                }
                None => {
                    let _ = writeln!(out, "{:<16} found {:>6}", c.name(), n);
                }
            }
        }
        let _ = writeln!(
            out,
            "{:<16} found {:>6}  target {:>4}  diff {:>+7}",
            "base total",
            base,
            BASE_TARGET,
            base as i64 - BASE_TARGET as i64
        );
        out
    }

    pub fn tileset(&self) -> String {
        write_tileset(self.entries.iter().map(|e| &e.prototile).enumerate())
    }
}

/// Distinct prototiles of the fully surrounded tiles, sorted by their
/// serialization so the order is deterministic.
pub fn catalog(dp: &DecoratedPatch) -> CatalogReport {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for id in dp.layout.ids() {
        if dp.layout.is_interior(id) {
            *counts.entry(dp.prototile_id(id)).or_default() += 1;
        }
    }
    let mut entries: Vec<(String, CatalogEntry)> = counts
        .into_iter()
        .map(|(i, count)| {
            let p = dp.pool[i as usize].clone();
            let key = p.serialize(0);
            let category = p.category();
            (
                key,
                CatalogEntry {
                    prototile: p,
                    count,
                    category,
                },
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    CatalogReport {
        entries: entries.into_iter().map(|(_, e)| e).collect(),
    }
}

/// Prototiles used by the interior of a depth-`depth` patch under every
/// wire anchor: all eight phases and every even origin of one full period
/// of the generations up to `max_gen`. Origins start one period in, clear
/// of the start of the wire. Keys are the serializations.
pub fn anchored_catalog(
    apex: TileStatus,
    depth: usize,
    max_gen: u32,
) -> Result<BTreeMap<String, (Prototile, Category)>, DecorateError> {
    let period = 1i64 << (max_gen + 2);
    let mut out = BTreeMap::new();
    for p in 0..8 {
        for origin in (period..2 * period).step_by(2) {
            let cfg = BuildConfig {
                apex,
                origin,
                phase: Phase::new(p).expect("phase below 8"),
                ..BuildConfig::new(depth, max_gen)
            };
            let (dp, _) = build_decorated(cfg)?;
            for e in catalog(&dp).entries {
                out.entry(e.prototile.serialize(0)).or_insert((e.prototile, e.category));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockVerdict {
    Extendable,
    Blocked,
}

/// A fixed side that a candidate tile must match: the candidate's side
/// `side` must carry `decoration`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub side: u8,
    pub decoration: EdgeDecoration,
}

/// Blocked iff no prototile of the catalog satisfies every constraint.
pub fn blocking_check(catalog: &[Prototile], constraints: &[Constraint]) -> BlockVerdict {
    if constraints.is_empty() {
        return BlockVerdict::Extendable;
    }
    let fits = catalog
        .iter()
        .any(|p| constraints.iter().all(|c| p.sides[c.side as usize - 1] == c.decoration));
    if fits {
        BlockVerdict::Extendable
    } else {
        BlockVerdict::Blocked
    }
}

/// Whether every side of `tile` can be abutted by some prototile of the
/// catalog at a position allowed by the neighbor table.
pub fn abuttable(catalog: &[Prototile], tile: &Prototile) -> BlockVerdict {
    let table = NeighborTable::get();
    for s in 1..=7u8 {
        let d = &tile.sides[s as usize - 1];
        let ok = catalog
            .iter()
            .any(|q| (1..=7u8).any(|t| table.allows(tile.status, s, q.status, t) && q.sides[t as usize - 1] == *d));
        if !ok {
            return BlockVerdict::Blocked;
        }
    }
    BlockVerdict::Extendable
}
