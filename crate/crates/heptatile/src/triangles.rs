//! The interwoven triangles on a single wire.
//!
//! Abscissas count seeds along the wire; abscissa `a` sits on isocline `4a`,
//! green when `a` is even and orange when it is odd.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::isoclines::Wire;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Colour {
    Blue,
    Red,
}

impl Colour {
    pub fn name(self) -> &'static str {
        match self {
            Colour::Blue => "blue",
            Colour::Red => "red",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attribute {
    Triangle,
    Phantom,
}

impl Attribute {
    pub fn name(self) -> &'static str {
        match self {
            Attribute::Triangle => "triangle",
            Attribute::Phantom => "phantom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trilateral {
    pub generation: u32,
    pub index: u64,
    pub colour: Colour,
    pub attribute: Attribute,
    pub vertex: u64,
    pub height: u64,
    pub mid: u64,
    pub basis: u64,
}

impl Trilateral {
    pub fn is_triangle(&self) -> bool {
        self.attribute == Attribute::Triangle
    }

    pub fn is_red_triangle(&self) -> bool {
        self.colour == Colour::Red && self.is_triangle()
    }

    /// Closed span [vertex, basis].
    pub fn span(&self) -> (u64, u64) {
        (self.vertex, self.basis)
    }

    pub fn contains_span(&self, other: &Trilateral) -> bool {
        self.vertex <= other.vertex && other.basis <= self.basis
    }
}

pub fn trilateral(n: u32, m: u64) -> Trilateral {
    let h = 1u64 << (n + 1);
    let vertex = (1u64 << n) - 1 + m * h;
    Trilateral {
        generation: n,
        index: m,
        colour: if n % 2 == 1 { Colour::Red } else { Colour::Blue },
        attribute: if m.is_multiple_of(2) {
            Attribute::Triangle
        } else {
            Attribute::Phantom
        },
        vertex,
        height: h,
        mid: (m + 1) * h - 1,
        basis: vertex + h,
    }
}

/// The trilateral whose vertex is at abscissa `a`. Every non-negative
/// abscissa is the vertex of exactly one: a + 1 = 2^n (2m + 1).
pub fn trilateral_at_vertex(a: u64) -> Trilateral {
    let n = (a + 1).trailing_zeros();
    let m = ((a + 1) >> n) / 2;
    trilateral(n, m)
}

/// Run the generation-by-generation construction on the wire and keep the
/// trilaterals whose vertex lies before `wire_length`.
///
/// Generation 0 alternates triangle and phantom from every even seed; each
/// later generation raises a vertex at every triangle mid-point, and that
/// trilateral's basis is the next triangle mid-point, where the mauve signal
/// travelling along it is stopped.
pub fn construct_generations(max_gen: u32, wire_length: u64) -> Vec<Trilateral> {
    let mut out = Vec::new();
    if wire_length == 0 {
        return out;
    }
    // The construction needs the stream of each generation past the end of
    // the reported window, since bases may lie beyond it.
    let reach = 2 * wire_length + (1u64 << (max_gen + 2));
    let mut current: Vec<Trilateral> = Vec::new();
    let mut a = 0u64;
    let mut attribute = Attribute::Triangle;
    while a + 2 <= reach {
        current.push(Trilateral {
            generation: 0,
            index: current.len() as u64,
            colour: Colour::Blue,
            attribute,
            vertex: a,
            height: 2,
            mid: a + 1,
            basis: a + 2,
        });
        attribute = flip(attribute);
        a += 2;
    }
    for generation in 0..=max_gen {
        out.extend(current.iter().filter(|t| t.vertex < wire_length).copied());
        if generation == max_gen {
            break;
        }
        let mids: Vec<u64> = current
            .iter()
            .filter(|t| t.attribute == Attribute::Triangle)
            .map(|t| t.mid)
            .collect();
        let colour = match current[0].colour {
            Colour::Blue => Colour::Red,
            Colour::Red => Colour::Blue,
        };
        let mut next = Vec::new();
        let mut attribute = Attribute::Triangle;
        for w in mids.windows(2) {
            let (vertex, basis) = (w[0], w[1]);
            next.push(Trilateral {
                generation: generation + 1,
                index: next.len() as u64,
                colour,
                attribute,
                vertex,
                height: basis - vertex,
                mid: (vertex + basis) / 2,
                basis,
            });
            attribute = flip(attribute);
        }
        current = next;
    }
    out
}

fn flip(a: Attribute) -> Attribute {
    match a {
        Attribute::Triangle => Attribute::Phantom,
        Attribute::Phantom => Attribute::Triangle,
    }
}

/// Closed-form enumeration with the same window rule as the construction.
pub fn closed_form_generations(max_gen: u32, wire_length: u64) -> Vec<Trilateral> {
    let mut out = Vec::new();
    for n in 0..=max_gen {
        let mut m = 0;
        loop {
            let t = trilateral(n, m);
            if t.vertex >= wire_length {
                break;
            }
            out.push(t);
            m += 1;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nesting {
    /// Includes equality.
    Contains,
    ContainedIn,
    Disjoint,
    SharesBoundary,
    /// The open spans overlap without either containing the other.
    Crossing,
}

/// Relation of the closed spans [vertex, basis].
pub fn nesting(a: &Trilateral, b: &Trilateral) -> Nesting {
    if a.contains_span(b) {
        Nesting::Contains
    } else if b.contains_span(a) {
        Nesting::ContainedIn
    } else if a.basis == b.vertex || b.basis == a.vertex {
        Nesting::SharesBoundary
    } else if a.basis < b.vertex || b.basis < a.vertex {
        Nesting::Disjoint
    } else {
        Nesting::Crossing
    }
}

/// Whether the legs of two trilaterals share a tile. Legs run down the
/// borders of the tree of the vertex seed; trees of distinct seeds on one
/// wire are nested with disjoint borders, so legs can only meet when the
/// two vertices coincide and the latitudes overlap.
pub fn legs_cross(a: &Trilateral, b: &Trilateral) -> bool {
    a != b && a.vertex == b.vertex && a.vertex.max(b.vertex) < a.basis.min(b.basis)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TriangleError {
    #[error("generation {0} index {1} is a phantom, not a triangle")]
    NotATriangle(u32, u64),
    #[error("generation {0} index {1} is not a red triangle")]
    NotRedTriangle(u32, u64),
}

/// The phantoms of earlier generations sharing the mid-line of `t`.
pub fn mid_line_phantoms(t: &Trilateral) -> Result<Vec<Trilateral>, TriangleError> {
    if !t.is_triangle() {
        return Err(TriangleError::NotATriangle(t.generation, t.index));
    }
    let mut out = Vec::new();
    for g in (0..t.generation).rev() {
        let h = 1u64 << (g + 1);
        if !(t.mid + 1).is_multiple_of(h) {
            continue;
        }
        let m = (t.mid + 1) / h - 1;
        let p = trilateral(g, m);
        if p.attribute == Attribute::Phantom && t.contains_span(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeRowReport {
    pub triangle: Trilateral,
    pub rows: Vec<u64>,
    pub count: usize,
}

/// Abscissas strictly inside a red triangle and outside the closed span of
/// every red triangle nested in it.
pub fn free_rows(t: &Trilateral) -> Result<FreeRowReport, TriangleError> {
    if !t.is_red_triangle() {
        return Err(TriangleError::NotRedTriangle(t.generation, t.index));
    }
    let mut blocked = vec![false; (t.basis - t.vertex + 1) as usize];
    for g in (1..t.generation).step_by(2) {
        let h = 1u64 << (g + 1);
        let first = (t.vertex + 1).saturating_sub((1u64 << g) - 1) / h;
        let mut m = first.saturating_sub(1);
        loop {
            let n = trilateral(g, m);
            if n.vertex > t.basis {
                break;
            }
            if n.is_triangle() && t.contains_span(&n) && n != *t {
                for a in n.vertex..=n.basis {
                    blocked[(a - t.vertex) as usize] = true;
                }
            }
            m += 1;
        }
    }
    let rows: Vec<u64> = (t.vertex + 1..t.basis)
        .filter(|&a| !blocked[(a - t.vertex) as usize])
        .collect();
    Ok(FreeRowReport {
        triangle: *t,
        count: rows.len(),
        rows,
    })
}

/// Free-row count predicted for a red triangle of generation `g` (odd).
pub fn free_row_formula(g: u32) -> u64 {
    (1u64 << g.div_ceil(2)) + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignalKind {
    Mauve,
    Silver,
    BlueSig,
    RedLeft,
    RedRight,
    Yellow,
}

impl SignalKind {
    pub const ALL: [SignalKind; 6] = [
        SignalKind::Mauve,
        SignalKind::Silver,
        SignalKind::BlueSig,
        SignalKind::RedLeft,
        SignalKind::RedRight,
        SignalKind::Yellow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SignalKind::Mauve => "mauve",
            SignalKind::Silver => "silver",
            SignalKind::BlueSig => "blueSig",
            SignalKind::RedLeft => "redLeft",
            SignalKind::RedRight => "redRight",
            SignalKind::Yellow => "yellow",
        }
    }

    pub fn parse(s: &str) -> Option<SignalKind> {
        SignalKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignalEntry {
    pub abscissa: u64,
    pub kind: SignalKind,
    pub extent_lo: u64,
    pub extent_hi: u64,
}

/// One-dimensional signals along the wire; each entry's extent is the span
/// of the trilateral that bounds it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignalLayer {
    pub entries: Vec<SignalEntry>,
}

impl SignalLayer {
    pub fn kinds_at(&self, a: u64) -> BTreeSet<SignalKind> {
        let lo = self.entries.partition_point(|e| e.abscissa < a);
        self.entries[lo..]
            .iter()
            .take_while(|e| e.abscissa == a)
            .map(|e| e.kind)
            .collect()
    }

    pub fn at(&self, a: u64) -> &[SignalEntry] {
        let lo = self.entries.partition_point(|e| e.abscissa < a);
        let hi = self.entries.partition_point(|e| e.abscissa <= a);
        &self.entries[lo..hi]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("abscissa,signal,extent_lo,extent_hi\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{}", e.abscissa, e.kind.name(), e.extent_lo, e.extent_hi);
        }
        out
    }
}

/// First triangle whose mid-line is abscissa `a` (odd): it stops the mauve
/// signal emitted there.
pub fn mauve_stopper(a: u64) -> Trilateral {
    let n = (a + 1).trailing_zeros() - 1;
    trilateral(n, (a + 1) / (1u64 << (n + 1)) - 1)
}

pub fn signals(trilaterals: &[Trilateral], wire_length: u64) -> SignalLayer {
    let mut entries = Vec::new();
    let mut push = |a: u64, kind, t: &Trilateral| {
        if a < wire_length {
            entries.push(SignalEntry {
                abscissa: a,
                kind,
                extent_lo: t.vertex,
                extent_hi: t.basis,
            });
        }
    };
    for t in trilaterals.iter().filter(|t| t.generation == 0) {
        let s = mauve_stopper(t.mid);
        push(t.mid, SignalKind::Mauve, &s);
    }
    for t in trilaterals {
        match t.colour {
            Colour::Blue => {
                push(t.vertex, SignalKind::BlueSig, t);
                push(t.basis, SignalKind::BlueSig, t);
            }
            Colour::Red if t.is_triangle() => {
                push(t.vertex, SignalKind::Silver, t);
                for a in t.vertex..=t.basis {
                    push(a, SignalKind::RedLeft, t);
                    push(a, SignalKind::RedRight, t);
                }
                if let Ok(rep) = free_rows(t) {
                    for a in rep.rows {
                        push(a, SignalKind::Yellow, t);
                    }
                }
            }
            Colour::Red => {}
        }
    }
    entries.sort();
    entries.dedup();
    SignalLayer { entries }
}

/// Isocline interval from a trilateral's vertex to its basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Latitude {
    pub top: i64,
    pub bottom: i64,
}

pub fn latitude(t: &Trilateral, anchor_isocline: i64) -> Latitude {
    Latitude {
        top: anchor_isocline + 4 * t.vertex as i64,
        bottom: anchor_isocline + 4 * t.basis as i64,
    }
}

/// Whether every trilateral up to `max_gen` (first eight indices) has the
/// same latitude on both wires.
pub fn latitudes_synchronized(w1: &Wire, w2: &Wire, max_gen: u32) -> bool {
    let (a1, a2) = (w1.anchor_isocline(), w2.anchor_isocline());
    (0..=max_gen).all(|n| (0..8).all(|m| latitude(&trilateral(n, m), a1) == latitude(&trilateral(n, m), a2)))
}

pub fn trilaterals_csv(ts: &[Trilateral]) -> String {
    let mut out = String::from("generation,index,colour,attribute,vertex,mid,basis\n");
    for t in ts {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            t.generation,
            t.index,
            t.colour.name(),
            t.attribute.name(),
            t.vertex,
            t.mid,
            t.basis
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let t = trilateral(0, 0);
        assert_eq!((t.vertex, t.height, t.mid), (0, 2, 1));
        assert_eq!((t.colour, t.attribute), (Colour::Blue, Attribute::Triangle));
        let t = trilateral(1, 0);
        assert_eq!((t.vertex, t.height, t.colour), (1, 4, Colour::Red));
        let t = trilateral(3, 0);
        assert_eq!((t.vertex, t.mid, t.basis), (7, 15, 23));
    }

    #[test]
    fn construction_examples() {
        let v = |g: u32, len| -> Vec<u64> {
            construct_generations(g, len)
                .into_iter()
                .filter(|t| t.generation == g)
                .map(|t| t.vertex)
                .collect()
        };
        assert_eq!(v(0, 8), vec![0, 2, 4, 6]);
        assert_eq!(v(1, 8), vec![1, 5]);
        assert_eq!(v(2, 16), vec![3, 11]);
        assert_eq!(construct_generations(1, 8).len(), 6);
        assert_eq!(construct_generations(0, 2).len(), 1);
        assert!(construct_generations(3, 0).is_empty());
    }

    #[test]
    fn construction_matches_closed_form() {
        assert_eq!(construct_generations(6, 300), closed_form_generations(6, 300));
    }

    #[test]
    fn nesting_examples() {
        let p = trilateral(0, 1);
        assert_eq!(nesting(&trilateral(1, 0), &p), Nesting::Contains);
        assert_eq!(nesting(&trilateral(1, 0), &trilateral(1, 1)), Nesting::SharesBoundary);
        assert_eq!(nesting(&p, &p), Nesting::Contains);
        assert_eq!(nesting(&trilateral(0, 0), &trilateral(1, 0)), Nesting::Crossing);
    }

    #[test]
    fn vertex_lookup() {
        for a in 0..500 {
            assert_eq!(trilateral_at_vertex(a).vertex, a);
        }
    }

    #[test]
    fn mid_lines() {
        assert_eq!(mid_line_phantoms(&trilateral(1, 0)).unwrap().len(), 1);
        let ps = mid_line_phantoms(&trilateral(3, 0)).unwrap();
        assert_eq!(ps.iter().map(|p| p.generation).collect::<Vec<_>>(), vec![2, 1, 0]);
        assert!(ps.iter().all(|p| p.mid == 15));
        assert_eq!(mid_line_phantoms(&trilateral(2, 0)).unwrap().len(), 2);
        assert!(mid_line_phantoms(&trilateral(2, 1)).is_err());
    }

    #[test]
    fn free_row_examples() {
        assert_eq!(free_rows(&trilateral(1, 0)).unwrap().count, 3);
        assert_eq!(free_rows(&trilateral(3, 0)).unwrap().rows, vec![8, 14, 15, 16, 22]);
        assert_eq!(free_rows(&trilateral(5, 0)).unwrap().count, 9);
        assert!(free_rows(&trilateral(2, 0)).is_err());
        assert!(free_rows(&trilateral(1, 1)).is_err());
    }

    #[test]
    fn signal_examples() {
        let ts = construct_generations(3, 64);
        let layer = signals(&ts, 64);
        assert!(layer.kinds_at(1).contains(&SignalKind::Silver));
        for a in [1, 3, 5, 7] {
            assert!(layer.kinds_at(a).contains(&SignalKind::Mauve));
        }
        assert!(layer.kinds_at(15).contains(&SignalKind::Yellow));
        assert!(!layer.kinds_at(2).contains(&SignalKind::Mauve));
    }
}
