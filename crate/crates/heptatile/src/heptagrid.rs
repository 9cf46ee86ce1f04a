//! Combinatorial skeleton of the heptagrid: tile statuses, substitution
//! rules, apex-relative addresses, neighbor resolution and subtree relations.
//!
//! A [`TreePatch`] is implicit. It stores the apex status, the depth and the
//! list of upward extensions, and answers every query by arithmetic on the
//! per-status level counts. Patches far too large to enumerate (an extended
//! depth-32 tree has about 10^13 tiles) stay cheap. [`Layout`] is the explicit
//! counterpart for bulk traversals.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

/// Largest depth a patch may reach; level counts stay inside `u64`.
pub const MAX_DEPTH: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TileStatus {
    G,
    Y,
    B,
    O,
    M,
    R,
}

use TileStatus::*;

impl TileStatus {
    pub const ALL: [TileStatus; 6] = [G, Y, B, O, M, R];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            G => 'G',
            Y => 'Y',
            B => 'B',
            O => 'O',
            M => 'M',
            R => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<TileStatus> {
        match c.to_ascii_uppercase() {
            'G' => Some(G),
            'Y' => Some(Y),
            'B' => Some(B),
            'O' => Some(O),
            'M' => Some(M),
            'R' => Some(R),
            _ => None,
        }
    }

    /// Status used for neighbor geometry: mauve tiles are shaped like blue
    /// ones and red tiles like orange ones.
    pub fn geometric(self) -> TileStatus {
        match self {
            M => B,
            R => O,
            s => s,
        }
    }

    /// Trees of the heptagrid are rooted at non-blue tiles only.
    pub fn is_tree_root(self) -> bool {
        !matches!(self.geometric(), B)
    }

    pub fn arity(self) -> usize {
        son_sides(self).len()
    }
}

impl fmt::Display for TileStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for TileStatus {
    type Err = HeptaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => TileStatus::from_letter(c).ok_or_else(|| HeptaError::UnknownStatus(s.to_string())),
            _ => Err(HeptaError::UnknownStatus(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ruleset {
    R0,
    R1,
}

/// Right-hand side of the substitution rule for `status`, left to right.
pub fn sons(status: TileStatus, ruleset: Ruleset) -> &'static [TileStatus] {
    match (ruleset, status) {
        (Ruleset::R1, G) => &[Y, M, G],
        (Ruleset::R1, M) => &[B, R],
        (Ruleset::R1, R) => &[Y, B, O],
        (Ruleset::R0, G) => &[Y, B, G],
        (Ruleset::R0, M) => &[B, O],
        (Ruleset::R0, R) => &[Y, B, O],
        (_, B) => &[B, O],
        (_, Y) => &[Y, B, G],
        (_, O) => &[Y, B, O],
    }
}

/// Side numbers carrying the sons, in slot order.
pub fn son_sides(status: TileStatus) -> &'static [u8] {
    match status.geometric() {
        G | O => &[3, 4, 5],
        Y => &[4, 5, 6],
        _ => &[4, 5],
    }
}

/// Slot (1-based) of `child` among the sons of `father` under rules (R1).
pub fn slot_of(father: TileStatus, child: TileStatus) -> Option<u8> {
    sons(father, Ruleset::R1)
        .iter()
        .position(|&s| s == child)
        .map(|p| p as u8 + 1)
}

/// What a side of a tile faces, relative to the tree and its levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideRole {
    Father,
    Son(u8),
    Left,
    Right,
    UpLeft,
    UpRight,
    DownLeft,
    DownRight,
}

pub fn side_role(status: TileStatus, side: u8) -> SideRole {
    use SideRole::*;
    assert!((1..=7).contains(&side), "side {side} out of range");
    if side == 1 {
        return Father;
    }
    if let Some(p) = son_sides(status).iter().position(|&s| s == side) {
        return Son(p as u8 + 1);
    }
    match (status.geometric(), side) {
        (G, 2) => Left,
        (G, 6) => Right,
        (G, 7) => UpRight,
        (Y, 2) => UpLeft,
        (Y, 3) => Left,
        (Y, 7) => Right,
        (B, 2) => Left,
        (B, 3) => DownLeft,
        (B, 6) => DownRight,
        (B, 7) => Right,
        (O, 2) => Left,
        (O, 6) => DownRight,
        (O, 7) => Right,
        _ => unreachable!("every side has a role"),
    }
}

pub fn side_of_role(status: TileStatus, role: SideRole) -> Option<u8> {
    (1..=7).find(|&s| side_role(status, s) == role)
}

/// Table (N): for each geometric status and side, the side number in the
/// neighbor and the statuses the neighbor may have.
pub struct NeighborTable {
    rows: [[&'static [(u8, TileStatus)]; 7]; 4],
}

const TABLE_N: [[&[(u8, TileStatus)]; 7]; 4] = [
    // G
    [
        &[(6, Y), (5, G)],
        &[(7, B)],
        &[(1, Y)],
        &[(1, B)],
        &[(1, G)],
        &[(2, B)],
        &[(3, B)],
    ],
    // Y
    [
        &[(4, Y), (3, G), (3, O)],
        &[(6, O), (6, B)],
        &[(7, O)],
        &[(1, Y)],
        &[(1, B)],
        &[(1, G)],
        &[(2, B)],
    ],
    // B
    [
        &[(5, Y), (4, G), (4, B), (4, O)],
        &[(7, Y), (6, G)],
        &[(7, G)],
        &[(1, B)],
        &[(1, O)],
        &[(2, Y)],
        &[(2, G), (2, O)],
    ],
    // O
    [
        &[(5, B), (5, O)],
        &[(7, B)],
        &[(1, Y)],
        &[(1, B)],
        &[(1, O)],
        &[(2, Y)],
        &[(3, Y)],
    ],
];

impl NeighborTable {
    /// The transcribed table, checked for symmetry on first use.
    pub fn get() -> &'static NeighborTable {
        static TABLE: OnceLock<NeighborTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let t = NeighborTable { rows: TABLE_N };
            if let Err(e) = t.check_symmetry() {
                panic!("neighbor table transcription error: {e}");
            }
            t
        })
    }

    fn row(status: TileStatus) -> usize {
        match status.geometric() {
            G => 0,
            Y => 1,
            B => 2,
            _ => 3,
        }
    }

    pub fn entries(&self, status: TileStatus, side: u8) -> &'static [(u8, TileStatus)] {
        self.rows[Self::row(status)][side as usize - 1]
    }

    /// Whether side `a` of a `tau` tile may be glued to side `b` of a `nu` tile.
    pub fn allows(&self, tau: TileStatus, a: u8, nu: TileStatus, b: u8) -> bool {
        self.entries(tau, a)
            .iter()
            .any(|&(s, st)| s == b && st == nu.geometric())
    }

    pub fn check_symmetry(&self) -> Result<(), String> {
        for tau in [G, Y, B, O] {
            for a in 1..=7u8 {
                for &(b, nu) in self.rows[Self::row(tau)][a as usize - 1] {
                    let back = self.rows[Self::row(nu)][b as usize - 1];
                    if !back.contains(&(a, tau)) {
                        return Err(format!("side {a} of {tau} maps to side {b} of {nu}, but not back"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Fibonacci numbers with f_0 = f_1 = 1.
#[derive(Clone, Debug)]
pub struct FibonacciTable {
    pub f: Vec<u64>,
}

impl FibonacciTable {
    pub fn new(len: usize) -> Self {
        let mut f = vec![1u64, 1];
        while f.len() < len {
            let n = f.len();
            f.push(f[n - 1] + f[n - 2]);
        }
        f.truncate(len.max(1));
        FibonacciTable { f }
    }
}

pub fn fib(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

/// Path of son slots from the apex; the empty path is the apex itself.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileAddress(pub Vec<u8>);

impl TileAddress {
    pub fn apex() -> Self {
        TileAddress(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, slot: u8) -> TileAddress {
        let mut v = self.0.clone();
        v.push(slot);
        TileAddress(v)
    }

    pub fn parent(&self) -> Option<TileAddress> {
        let (_, rest) = self.0.split_last()?;
        Some(TileAddress(rest.to_vec()))
    }

    pub fn is_prefix_of(&self, other: &TileAddress) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn prefixed(&self, slot: u8) -> TileAddress {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(slot);
        v.extend_from_slice(&self.0);
        TileAddress(v)
    }

    pub fn concat(&self, tail: &TileAddress) -> TileAddress {
        let mut v = self.0.clone();
        v.extend_from_slice(&tail.0);
        TileAddress(v)
    }
}

impl fmt::Display for TileAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for TileAddress {
    type Err = HeptaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "-" {
            return Ok(TileAddress::apex());
        }
        s.split('.')
            .map(|p| match p.parse::<u8>() {
                Ok(v) if (1..=3).contains(&v) => Ok(v),
                _ => Err(HeptaError::BadAddress(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(TileAddress)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeptaError {
    #[error("{root} cannot be a son of {father}")]
    IncompatibleFather { father: TileStatus, root: TileStatus },
    #[error("tiles are on different levels ({0} and {1})")]
    DifferentLevels(usize, usize),
    #[error("no tree of the heptagrid is rooted at a {0} tile")]
    InvalidRoot(TileStatus),
    #[error("address {0} is not in the patch")]
    NotInPatch(TileAddress),
    #[error("depth {0} exceeds the supported maximum")]
    DepthLimit(usize),
    #[error("unknown status `{0}`")]
    UnknownStatus(String),
    #[error("malformed address `{0}`")]
    BadAddress(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Result of resolving one side of a tile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Neighbor {
    Tile(TileAddress, u8),
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubtreeRelation {
    Contains,
    ContainedIn,
    Disjoint,
    Equal,
}

/// Position of a tile inside its level list: `index` counts from the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileId {
    pub level: usize,
    pub index: u64,
}

impl TileId {
    pub fn new(level: usize, index: u64) -> Self {
        TileId { level, index }
    }
}

/// `counts[k][s]`: number of tiles on relative level k below an `s` tile.
fn level_counts(depth: usize) -> Vec<[u64; 6]> {
    let mut counts = vec![[1u64; 6]];
    for k in 1..=depth {
        let prev = counts[k - 1];
        let mut row = [0u64; 6];
        for s in TileStatus::ALL {
            row[s.index()] = sons(s, Ruleset::R1).iter().map(|c| prev[c.index()]).sum();
        }
        counts.push(row);
    }
    counts
}

/// A finite apex tree grown by rules (R1), possibly extended upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePatch {
    apex_status: TileStatus,
    depth: usize,
    up_extensions: Vec<TileStatus>,
    origin: TileAddress,
    counts: Vec<[u64; 6]>,
}

pub fn grow_tree(apex: TileStatus, depth: usize) -> TreePatch {
    TreePatch::grow(apex, depth)
}

pub fn extend_upward(patch: &TreePatch, father: TileStatus) -> Result<TreePatch, HeptaError> {
    patch.extend_upward(father)
}

impl TreePatch {
    /// Panics if `depth` exceeds [`MAX_DEPTH`].
    pub fn grow(apex: TileStatus, depth: usize) -> TreePatch {
        assert!(depth <= MAX_DEPTH, "depth {depth} exceeds {MAX_DEPTH}");
        TreePatch {
            apex_status: apex,
            depth,
            up_extensions: Vec::new(),
            origin: TileAddress::apex(),
            counts: level_counts(depth),
        }
    }

    pub fn apex_status(&self) -> TileStatus {
        self.apex_status
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Fathers applied above the original root, oldest first.
    pub fn up_extensions(&self) -> &[TileStatus] {
        &self.up_extensions
    }

    /// Address of the original root in the current addressing.
    pub fn origin(&self) -> &TileAddress {
        &self.origin
    }

    /// Put `father` above the current apex. The old apex becomes its unique
    /// son of matching status and sibling subtrees grow down to the same
    /// bottom level, so the depth increases by one.
    pub fn extend_upward(&self, father: TileStatus) -> Result<TreePatch, HeptaError> {
        let slot = slot_of(father, self.apex_status).ok_or(HeptaError::IncompatibleFather {
            father,
            root: self.apex_status,
        })?;
        if self.depth + 1 > MAX_DEPTH {
            return Err(HeptaError::DepthLimit(self.depth + 1));
        }
        let mut up = self.up_extensions.clone();
        up.push(father);
        Ok(TreePatch {
            apex_status: father,
            depth: self.depth + 1,
            up_extensions: up,
            origin: self.origin.prefixed(slot),
            counts: level_counts(self.depth + 1),
        })
    }

    /// Number of tiles on level `m` (relative to the current apex).
    pub fn level_len(&self, m: usize) -> u64 {
        if m > self.depth {
            0
        } else {
            self.counts[m][self.apex_status.index()]
        }
    }

    pub fn tile_count(&self) -> u64 {
        (0..=self.depth).map(|m| self.level_len(m)).sum()
    }

    /// Number of level-`k` descendants of a `status` tile, `k` ≤ depth.
    pub fn descendants_at(&self, status: TileStatus, k: usize) -> u64 {
        self.counts[k][status.index()]
    }

    pub fn status_of(&self, addr: &TileAddress) -> Option<TileStatus> {
        if addr.len() > self.depth {
            return None;
        }
        let mut s = self.apex_status;
        for &slot in &addr.0 {
            s = *sons(s, Ruleset::R1).get((slot as usize).checked_sub(1)?)?;
        }
        Some(s)
    }

    pub fn contains(&self, addr: &TileAddress) -> bool {
        self.status_of(addr).is_some()
    }

    pub fn id_of(&self, addr: &TileAddress) -> Option<TileId> {
        self.status_of(addr)?;
        let k = addr.len();
        let mut s = self.apex_status;
        let mut index = 0u64;
        for (t, &slot) in addr.0.iter().enumerate() {
            let row = &self.counts[k - t - 1];
            let ss = sons(s, Ruleset::R1);
            index += ss[..slot as usize - 1].iter().map(|c| row[c.index()]).sum::<u64>();
            s = ss[slot as usize - 1];
        }
        Some(TileId::new(k, index))
    }

    pub fn address_of(&self, id: TileId) -> Option<TileAddress> {
        if id.index >= self.level_len(id.level) {
            return None;
        }
        let k = id.level;
        let mut s = self.apex_status;
        let mut x = id.index;
        let mut slots = Vec::with_capacity(k);
        for t in 0..k {
            let row = &self.counts[k - t - 1];
            for (i, &c) in sons(s, Ruleset::R1).iter().enumerate() {
                let n = row[c.index()];
                if x < n {
                    slots.push(i as u8 + 1);
                    s = c;
                    break;
                }
                x -= n;
            }
        }
        Some(TileAddress(slots))
    }

    pub fn status_at(&self, id: TileId) -> Option<TileStatus> {
        self.status_of(&self.address_of(id)?)
    }

    pub fn left_border(&self, m: usize) -> Option<TileAddress> {
        self.address_of(TileId::new(m, 0))
    }

    pub fn right_border(&self, m: usize) -> Option<TileAddress> {
        let n = self.level_len(m);
        if n == 0 {
            return None;
        }
        self.address_of(TileId::new(m, n - 1))
    }

    /// Addresses of level `m`, left to right. Meant for small levels.
    pub fn level(&self, m: usize) -> Vec<TileAddress> {
        let mut out = vec![TileAddress::apex()];
        for _ in 0..m.min(self.depth + 1) {
            let mut next = Vec::new();
            for a in &out {
                let s = self.status_of(a).expect("address in patch");
                for slot in 1..=s.arity() as u8 {
                    next.push(a.child(slot));
                }
            }
            out = next;
        }
        if m > self.depth {
            Vec::new()
        } else {
            out
        }
    }

    pub fn neighbor(&self, addr: &TileAddress, side: u8) -> Result<Neighbor, HeptaError> {
        let id = self.id_of(addr).ok_or_else(|| HeptaError::NotInPatch(addr.clone()))?;
        Ok(match resolve_neighbor(self, id, side) {
            Some((nid, ns)) => Neighbor::Tile(self.address_of(nid).expect("resolved in patch"), ns),
            None => Neighbor::Boundary,
        })
    }

    /// Steps along the level between two tiles of the same level.
    pub fn appartness(&self, a: &TileAddress, b: &TileAddress) -> Result<u64, HeptaError> {
        let ia = self.id_of(a).ok_or_else(|| HeptaError::NotInPatch(a.clone()))?;
        let ib = self.id_of(b).ok_or_else(|| HeptaError::NotInPatch(b.clone()))?;
        if ia.level != ib.level {
            return Err(HeptaError::DifferentLevels(ia.level, ib.level));
        }
        Ok(ia.index.abs_diff(ib.index))
    }

    /// Relation between T(mu) and T(nu). A tree of the heptagrid is the
    /// closure of its root under the son lists, so the relation reduces to a
    /// prefix test on addresses.
    pub fn subtree_relation(&self, mu: &TileAddress, nu: &TileAddress) -> Result<SubtreeRelation, HeptaError> {
        for a in [mu, nu] {
            let s = self.status_of(a).ok_or_else(|| HeptaError::NotInPatch(a.clone()))?;
            if !s.is_tree_root() {
                return Err(HeptaError::InvalidRoot(s));
            }
        }
        Ok(if mu == nu {
            SubtreeRelation::Equal
        } else if mu.is_prefix_of(nu) {
            SubtreeRelation::Contains
        } else if nu.is_prefix_of(mu) {
            SubtreeRelation::ContainedIn
        } else {
            SubtreeRelation::Disjoint
        })
    }

    /// Index range of T(root) on absolute level `m`, if that level is in the patch.
    pub fn subtree_span(&self, root: &TileAddress, m: usize) -> Option<(u64, u64)> {
        let rid = self.id_of(root)?;
        if m < rid.level || m > self.depth {
            return None;
        }
        let mut lo = root.clone();
        let mut hi = root.clone();
        while lo.len() < m {
            lo = lo.child(1);
            let s = self.status_of(&hi)?;
            hi = hi.child(s.arity() as u8);
        }
        Some((self.id_of(&lo)?.index, self.id_of(&hi)?.index))
    }

    pub fn to_text(&self) -> String {
        write_patch(self, |_| String::new())
    }
}

/// Read access to a level-ordered tree, shared by the implicit patch and the
/// explicit layout so neighbor resolution is written once.
pub trait Skeleton {
    fn depth(&self) -> usize;
    fn level_len(&self, level: usize) -> u64;
    fn status(&self, id: TileId) -> TileStatus;
    /// Parent id and the slot of `id` among its siblings; `id.level` > 0.
    fn parent(&self, id: TileId) -> (TileId, u8);
    /// Index of the first son on the next level; `id.level` < depth.
    fn first_child(&self, id: TileId) -> u64;
}

impl Skeleton for TreePatch {
    fn depth(&self) -> usize {
        self.depth
    }

    fn level_len(&self, level: usize) -> u64 {
        TreePatch::level_len(self, level)
    }

    fn status(&self, id: TileId) -> TileStatus {
        self.status_at(id).expect("id in patch")
    }

    fn parent(&self, id: TileId) -> (TileId, u8) {
        let addr = self.address_of(id).expect("id in patch");
        let slot = *addr.0.last().expect("not the apex");
        let p = addr.parent().expect("not the apex");
        (self.id_of(&p).expect("parent in patch"), slot)
    }

    fn first_child(&self, id: TileId) -> u64 {
        let addr = self.address_of(id).expect("id in patch");
        self.id_of(&addr.child(1)).expect("child in patch").index
    }
}

/// Resolve side `side` of tile `id`: the neighbor's id and the number it
/// gives to the shared side, or `None` when the neighbor is outside.
pub fn resolve_neighbor<S: Skeleton + ?Sized>(t: &S, id: TileId, side: u8) -> Option<(TileId, u8)> {
    use SideRole::*;
    let status = t.status(id);
    let across = |nid: TileId, role: SideRole| {
        let ns = t.status(nid);
        let side = side_of_role(ns, role).unwrap_or_else(|| panic!("{ns} tile has no {role:?} side facing {status}"));
        Some((nid, side))
    };
    match side_role(status, side) {
        Father => {
            if id.level == 0 {
                return None;
            }
            let (p, slot) = t.parent(id);
            let ps = t.status(p);
            Some((p, son_sides(ps)[slot as usize - 1]))
        }
        Son(k) => {
            if id.level >= t.depth() {
                return None;
            }
            let c = t.first_child(id) + k as u64 - 1;
            Some((TileId::new(id.level + 1, c), 1))
        }
        Left => {
            if id.index == 0 {
                return None;
            }
            across(TileId::new(id.level, id.index - 1), Right)
        }
        Right => {
            if id.index + 1 >= t.level_len(id.level) {
                return None;
            }
            across(TileId::new(id.level, id.index + 1), Left)
        }
        UpLeft => {
            if id.level == 0 {
                return None;
            }
            let (p, _) = t.parent(id);
            if p.index == 0 {
                return None;
            }
            across(TileId::new(p.level, p.index - 1), DownRight)
        }
        UpRight => {
            if id.level == 0 {
                return None;
            }
            let (p, _) = t.parent(id);
            if p.index + 1 >= t.level_len(p.level) {
                return None;
            }
            across(TileId::new(p.level, p.index + 1), DownLeft)
        }
        DownLeft => {
            if id.level >= t.depth() {
                return None;
            }
            let f = t.first_child(id);
            if f == 0 {
                return None;
            }
            across(TileId::new(id.level + 1, f - 1), UpRight)
        }
        DownRight => {
            if id.level >= t.depth() {
                return None;
            }
            let last = t.first_child(id) + status.arity() as u64 - 1;
            if last + 1 >= t.level_len(id.level + 1) {
                return None;
            }
            across(TileId::new(id.level + 1, last + 1), UpLeft)
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    status: TileStatus,
    slot: u8,
    parent: u32,
    first_child: u32,
}

/// Explicit level lists of a patch, for traversals over every tile.
#[derive(Clone, Debug)]
pub struct Layout {
    levels: Vec<Vec<Node>>,
}

/// Upper bound on the number of tiles a [`Layout`] will materialize.
pub const LAYOUT_LIMIT: u64 = 8_000_000;

impl Layout {
    pub fn new(patch: &TreePatch) -> Result<Layout, HeptaError> {
        if patch.tile_count() > LAYOUT_LIMIT {
            return Err(HeptaError::DepthLimit(patch.depth()));
        }
        let mut levels = vec![vec![Node {
            status: patch.apex_status(),
            slot: 0,
            parent: 0,
            first_child: 0,
        }]];
        for _ in 0..patch.depth() {
            let cur = levels.last_mut().expect("non-empty");
            let mut next = Vec::new();
            for (i, node) in cur.iter_mut().enumerate() {
                node.first_child = next.len() as u32;
                for (k, &c) in sons(node.status, Ruleset::R1).iter().enumerate() {
                    next.push(Node {
                        status: c,
                        slot: k as u8 + 1,
                        parent: i as u32,
                        first_child: 0,
                    });
                }
            }
            levels.push(next);
        }
        Ok(Layout { levels })
    }

    pub fn ids(&self) -> impl Iterator<Item = TileId> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(l, v)| (0..v.len() as u64).map(move |i| TileId::new(l, i)))
    }

    pub fn tile_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn address(&self, id: TileId) -> TileAddress {
        let mut slots = vec![0u8; id.level];
        let mut cur = id;
        while cur.level > 0 {
            let n = self.levels[cur.level][cur.index as usize];
            slots[cur.level - 1] = n.slot;
            cur = TileId::new(cur.level - 1, n.parent as u64);
        }
        TileAddress(slots)
    }

    pub fn id_of(&self, addr: &TileAddress) -> Option<TileId> {
        let mut cur = TileId::new(0, 0);
        for &slot in &addr.0 {
            if cur.level >= self.depth() {
                return None;
            }
            let n = self.levels[cur.level][cur.index as usize];
            if slot == 0 || slot as usize > n.status.arity() {
                return None;
            }
            cur = TileId::new(cur.level + 1, n.first_child as u64 + slot as u64 - 1);
        }
        Some(cur)
    }

    pub fn neighbor(&self, id: TileId, side: u8) -> Option<(TileId, u8)> {
        resolve_neighbor(self, id, side)
    }

    /// True when all seven neighbors are inside the patch.
    pub fn is_interior(&self, id: TileId) -> bool {
        (1..=7).all(|s| self.neighbor(id, s).is_some())
    }
}

impl Skeleton for Layout {
    fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    fn level_len(&self, level: usize) -> u64 {
        self.levels.get(level).map_or(0, |v| v.len() as u64)
    }

    fn status(&self, id: TileId) -> TileStatus {
        self.levels[id.level][id.index as usize].status
    }

    fn parent(&self, id: TileId) -> (TileId, u8) {
        let n = self.levels[id.level][id.index as usize];
        (TileId::new(id.level - 1, n.parent as u64), n.slot)
    }

    fn first_child(&self, id: TileId) -> u64 {
        self.levels[id.level][id.index as usize].first_child as u64
    }
}

/// Serialize a patch; `extra` appends per-tile fields after the status.
pub fn write_patch<F: FnMut(&TileAddress) -> String>(patch: &TreePatch, mut extra: F) -> String {
    let mut out = String::new();
    out.push_str("HEPTAPATCH v1\n");
    out.push_str(&format!("apex_status {}\n", patch.apex_status()));
    out.push_str(&format!("depth {}\n", patch.depth()));
    // Newest extension first, oldest last; the origin pins the original root.
    let up: Vec<String> = patch.up_extensions().iter().rev().map(|s| s.to_string()).collect();
    if up.is_empty() {
        out.push_str("up -\n");
    } else {
        out.push_str(&format!("up {} origin {}\n", up.join(","), patch.origin()));
    }
    let layout = Layout::new(patch).expect("patch small enough to serialize");
    for id in layout.ids() {
        let addr = layout.address(id);
        let fields = extra(&addr);
        let status = layout.status(id);
        if fields.is_empty() {
            out.push_str(&format!("tile {addr} {status}\n"));
        } else {
            out.push_str(&format!("tile {addr} {status} {fields}\n"));
        }
    }
    out
}

/// A parsed patch file: the patch header plus the raw per-tile lines.
#[derive(Clone, Debug)]
pub struct PatchFile {
    pub patch: TreePatch,
    pub tiles: Vec<(TileAddress, TileStatus, Vec<String>)>,
}

pub fn parse_patch(text: &str) -> Result<PatchFile, HeptaError> {
    let perr = |line: usize, msg: &str| HeptaError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut next = |what: &str| {
        lines
            .by_ref()
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| perr(0, &format!("missing {what}")))
    };
    let (n, l) = next("header")?;
    if l != "HEPTAPATCH v1" {
        return Err(perr(n, "expected `HEPTAPATCH v1`"));
    }
    let (n, l) = next("apex_status")?;
    let apex = l
        .strip_prefix("apex_status ")
        .ok_or_else(|| perr(n, "expected `apex_status`"))?
        .parse::<TileStatus>()
        .map_err(|e| perr(n, &e.to_string()))?;
    let (n, l) = next("depth")?;
    let depth: usize = l
        .strip_prefix("depth ")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| perr(n, "expected `depth <int>`"))?;
    let (n, l) = next("up")?;
    let rest = l
        .strip_prefix("up")
        .ok_or_else(|| perr(n, "expected `up <list>`"))?
        .trim();
    let (ups, origin) = match rest.split_once(" origin ") {
        Some((u, o)) => (u.trim(), Some(o.trim())),
        None => (rest, None),
    };
    let mut up: Vec<TileStatus> = if ups.is_empty() || ups == "-" {
        Vec::new()
    } else {
        ups.split(',')
            .map(|s| s.parse::<TileStatus>().map_err(|e| perr(n, &e.to_string())))
            .collect::<Result<_, _>>()?
    };
    up.reverse();
    if depth < up.len() || depth > MAX_DEPTH {
        return Err(perr(n, "depth inconsistent with up extensions"));
    }
    let root = match origin {
        None if up.is_empty() => apex,
        None => return Err(perr(n, "extended patch needs `origin <address>`")),
        Some(o) => {
            let origin: TileAddress = o.parse().map_err(|e: HeptaError| perr(n, &e.to_string()))?;
            TreePatch::grow(apex, depth)
                .status_of(&origin)
                .ok_or_else(|| perr(n, "origin outside the patch"))?
        }
    };
    let mut patch = TreePatch::grow(root, depth - up.len());
    for &f in &up {
        patch = patch.extend_upward(f).map_err(|e| perr(n, &e.to_string()))?;
    }
    if patch.apex_status() != apex {
        return Err(perr(n, "up extensions do not end at the apex status"));
    }
    if let Some(o) = origin {
        if o.parse::<TileAddress>().ok().as_ref() != Some(patch.origin()) {
            return Err(perr(n, "origin does not match the up extensions"));
        }
    }
    let mut tiles = Vec::new();
    for (n, l) in lines {
        if l.is_empty() {
            continue;
        }
        let mut parts = l.split_whitespace();
        if parts.next() != Some("tile") {
            return Err(perr(n, "expected `tile`"));
        }
        let addr: TileAddress = parts
            .next()
            .ok_or_else(|| perr(n, "missing address"))?
            .parse()
            .map_err(|e: HeptaError| perr(n, &e.to_string()))?;
        let status: TileStatus = parts
            .next()
            .ok_or_else(|| perr(n, "missing status"))?
            .parse()
            .map_err(|e: HeptaError| perr(n, &e.to_string()))?;
        tiles.push((addr, status, parts.map(str::to_string).collect()));
    }
    Ok(PatchFile { patch, tiles })
}
