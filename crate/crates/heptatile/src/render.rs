//! Poincaré-disc placement and SVG output.
//!
//! The apex heptagon is centred at the origin; every other tile is the
//! mirror image of its father across their shared side. Sides are numbered
//! counter-clockwise, side `k` joining vertices `k-1` and `k`.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::decorate::{DecoratedPatch, EdgeSignal, Hue};
use crate::heptagrid::{side_of_role, son_sides, Layout, SideRole, Skeleton, TileId, TileStatus, TreePatch};
use crate::isoclines::{mark_for, IsoColour};
use crate::triangles::{Attribute, Colour, SignalKind, SignalLayer, Trilateral};

pub const TOLERANCE: f64 = 1e-9;
pub const DEFAULT_RENDER_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscPoint {
    pub x: f64,
    pub y: f64,
}

impl DiscPoint {
    fn c(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    fn from_c(z: Complex64) -> Self {
        DiscPoint { x: z.re, y: z.im }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: DiscPoint) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn mid(self, o: DiscPoint) -> DiscPoint {
        DiscPoint {
            x: (self.x + o.x) / 2.0,
            y: (self.y + o.y) / 2.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TileGeometry {
    pub vertices: [DiscPoint; 7],
    pub center: DiscPoint,
}

impl TileGeometry {
    /// Endpoints of side `side` (1..=7).
    pub fn side(&self, side: u8) -> (DiscPoint, DiscPoint) {
        let k = side as usize;
        (self.vertices[k - 1], self.vertices[k % 7])
    }

    pub fn side_mid(&self, side: u8) -> DiscPoint {
        let (a, b) = self.side(side);
        a.mid(b)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("depth {depth} exceeds the render limit {limit}")]
    DepthTooLarge { depth: usize, limit: usize },
}

/// Hyperbolic circumradius R of the {7,3} heptagon: cosh R = cot(π/7)·cot(π/3).
pub fn hyperbolic_circumradius() -> f64 {
    let c = 1.0 / (PI / 7.0).tan() / (PI / 3.0).tan();
    c.acosh()
}

/// Euclidean circumradius of the apex heptagon in the disc, tanh(R/2).
pub fn disc_circumradius() -> f64 {
    (hyperbolic_circumradius() / 2.0).tanh()
}

/// Reflection across the geodesic through `a` and `b`.
fn reflect(a: Complex64, b: Complex64, z: Complex64) -> Complex64 {
    let cross = a.re * b.im - a.im * b.re;
    if cross.abs() < 1e-14 {
        // The geodesic is a diameter.
        let d = if a.norm() > b.norm() { a } else { b };
        let u = d / d.norm();
        return u * u * z.conj();
    }
    // Circle through a, b and the inverse of a in the unit circle.
    let a_inv = a / a.norm_sqr();
    let c = circumcenter(a, b, a_inv);
    let r2 = c.norm_sqr() - 1.0;
    c + r2 / (z - c).conj()
}

fn circumcenter(a: Complex64, b: Complex64, c: Complex64) -> Complex64 {
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    let (a2, b2, c2) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (a2 * (b.im - c.im) + b2 * (c.im - a.im) + c2 * (a.im - b.im)) / d;
    let uy = (a2 * (c.re - b.re) + b2 * (a.re - c.re) + c2 * (b.re - a.re)) / d;
    Complex64::new(ux, uy)
}

fn apex_geometry() -> TileGeometry {
    let r = disc_circumradius();
    let mut vertices = [DiscPoint { x: 0.0, y: 0.0 }; 7];
    for (k, v) in vertices.iter_mut().enumerate() {
        // Side 1 faces straight down.
        let t = -PI / 2.0 - PI / 7.0 + 2.0 * PI * k as f64 / 7.0;
        *v = DiscPoint {
            x: r * t.cos(),
            y: r * t.sin(),
        };
    }
    TileGeometry {
        vertices,
        center: DiscPoint { x: 0.0, y: 0.0 },
    }
}

/// Image of `parent` across its side `side`, renumbered so that the shared
/// side becomes side 1 and the numbering stays counter-clockwise.
fn son_geometry(parent: &TileGeometry, side: u8) -> TileGeometry {
    let s = side as usize;
    let (a, b) = parent.side(side);
    let (ac, bc) = (a.c(), b.c());
    let mirrored: Vec<Complex64> = parent.vertices.iter().map(|v| reflect(ac, bc, v.c())).collect();
    let mut vertices = [DiscPoint { x: 0.0, y: 0.0 }; 7];
    for (j, v) in vertices.iter_mut().enumerate() {
        *v = DiscPoint::from_c(mirrored[(s + 7 - j) % 7]);
    }
    // The shared side is copied exactly rather than recomputed.
    vertices[0] = parent.vertices[s % 7];
    vertices[1] = parent.vertices[s - 1];
    let center = DiscPoint::from_c(reflect(ac, bc, parent.center.c()));
    TileGeometry { vertices, center }
}

/// Placed tiles of a patch, in level order.
pub struct Placement {
    pub layout: Layout,
    pub tiles: HashMap<TileId, TileGeometry>,
}

pub fn place(patch: &TreePatch, limit: usize) -> Result<Placement, RenderError> {
    if patch.depth() > limit {
        return Err(RenderError::DepthTooLarge {
            depth: patch.depth(),
            limit,
        });
    }
    let layout = Layout::new(patch).map_err(|_| RenderError::DepthTooLarge {
        depth: patch.depth(),
        limit,
    })?;
    let mut tiles = HashMap::new();
    tiles.insert(TileId::new(0, 0), apex_geometry());
    for id in layout.ids().filter(|id| id.level > 0) {
        let (p, slot) = layout.parent(id);
        let side = son_sides(layout.status(p))[slot as usize - 1];
        let g = son_geometry(&tiles[&p], side);
        tiles.insert(id, g);
    }
    Ok(Placement { layout, tiles })
}

/// Largest distance between the endpoints of a shared side as seen from
/// its two tiles, over every interior adjacency.
pub fn max_shared_side_gap(pl: &Placement) -> f64 {
    let mut worst: f64 = 0.0;
    for id in pl.layout.ids() {
        for s in 1..=7 {
            if let Some((n, ns)) = pl.layout.neighbor(id, s) {
                let (a, b) = pl.tiles[&id].side(s);
                let (c, d) = pl.tiles[&n].side(ns);
                worst = worst.max(a.dist(d)).max(b.dist(c));
            }
        }
    }
    worst
}

/// Layers understood by [`render_svg`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Status,
    Isoclines,
    Marks,
    Trilaterals,
    Signals,
}

impl Layer {
    pub const ALL: [Layer; 5] = [
        Layer::Status,
        Layer::Isoclines,
        Layer::Marks,
        Layer::Trilaterals,
        Layer::Signals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Layer::Status => "status",
            Layer::Isoclines => "isoclines",
            Layer::Marks => "marks",
            Layer::Trilaterals => "trilaterals",
            Layer::Signals => "signals",
        }
    }

    pub fn parse(s: &str) -> Option<Layer> {
        Layer::ALL.into_iter().find(|l| l.name() == s.trim())
    }
}

const SIZE: f64 = 800.0;

fn px(p: DiscPoint) -> (f64, f64) {
    (
        SIZE / 2.0 + p.x * SIZE / 2.0 * 0.98,
        SIZE / 2.0 - p.y * SIZE / 2.0 * 0.98,
    )
}

fn status_fill(s: TileStatus) -> &'static str {
    match s {
        TileStatus::G => "#7fc97f",
        TileStatus::Y => "#ffe066",
        TileStatus::B => "#80b1d3",
        TileStatus::O => "#fdb462",
        TileStatus::M => "#c9a0dc",
        TileStatus::R => "#e7484f",
    }
}

fn iso_stroke(c: IsoColour) -> &'static str {
    match c {
        IsoColour::Green => "#1b9e3a",
        IsoColour::Orange => "#f07f00",
        IsoColour::Blue => "#3b6fd6",
    }
}

fn line(out: &mut String, a: DiscPoint, b: DiscPoint, stroke: &str, width: f64) {
    let (x1, y1) = px(a);
    let (x2, y2) = px(b);
    let _ = writeln!(
        out,
        r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="{width}"/>"#
    );
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let c = SIZE / 2.0;
    let _ = writeln!(
        out,
        r#"<circle cx="{c}" cy="{c}" r="{:.3}" fill="white" stroke="black" stroke-width="1"/>"#,
        SIZE / 2.0 * 0.98
    );
}

/// SVG picture of a decorated patch with the chosen layers, one group each.
pub fn render_svg(dp: &DecoratedPatch, layers: &BTreeSet<Layer>, limit: usize) -> Result<String, RenderError> {
    let pl = place(dp.patch(), limit)?;
    let mut out = String::new();
    header(&mut out);
    for &layer in layers {
        let _ = writeln!(out, r#"<g id="layer-{}">"#, layer.name());
        for id in pl.layout.ids() {
            let g = &pl.tiles[&id];
            let status = pl.layout.status(id);
            match layer {
                Layer::Status => {
                    let pts: Vec<String> = g
                        .vertices
                        .iter()
                        .map(|&v| {
                            let (x, y) = px(v);
                            format!("{x:.3},{y:.3}")
                        })
                        .collect();
                    let _ = writeln!(
                        out,
                        r##"<polygon points="{}" fill="{}" stroke="#333" stroke-width="0.4"/>"##,
                        pts.join(" "),
                        status_fill(status)
                    );
                }
                Layer::Isoclines => {
                    let m = mark_for(status);
                    let colour = dp.isocline_colour(id);
                    line(
                        &mut out,
                        g.side_mid(m.join.0),
                        g.side_mid(m.join.1),
                        iso_stroke(colour),
                        1.2,
                    );
                }
                Layer::Marks => {
                    let m = mark_for(status);
                    let (a, b) = (g.side_mid(m.join.0), g.side_mid(m.join.1));
                    let c = g.center;
                    let stroke = if m.is_w() { "#555" } else { "#000" };
                    line(&mut out, a, c.mid(a), stroke, 0.6);
                    line(&mut out, c.mid(b), b, stroke, 0.6);
                }
                Layer::Trilaterals => {
                    for s in 1..=7u8 {
                        for sig in dp.side(id, s).signals.iter() {
                            let stroke = match *sig {
                                EdgeSignal::Leg { colour, hue, .. } => leg_stroke(colour, hue),
                                EdgeSignal::Basis { colour, attribute } => basis_stroke(colour, attribute),
                                _ => continue,
                            };
                            line(&mut out, g.center, g.side_mid(s), stroke, 2.0);
                        }
                    }
                }
                Layer::Signals => {
                    for s in 1..=7u8 {
                        for sig in dp.side(id, s).signals.iter() {
                            if let EdgeSignal::Row(kind) = *sig {
                                line(&mut out, g.center, g.side_mid(s), signal_stroke(kind), 0.8);
                            }
                        }
                    }
                }
            }
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn leg_stroke(colour: Colour, hue: Hue) -> &'static str {
    match (colour, hue) {
        (Colour::Red, Hue::Dark) => "#a50f15",
        (Colour::Red, Hue::Light) => "#fb6a4a",
        (Colour::Blue, Hue::Dark) => "#08306b",
        (Colour::Blue, Hue::Light) => "#6baed6",
    }
}

fn basis_stroke(colour: Colour, attribute: Attribute) -> &'static str {
    match (colour, attribute) {
        (Colour::Red, Attribute::Triangle) => "#cb181d",
        (Colour::Red, Attribute::Phantom) => "#fcbba1",
        (Colour::Blue, Attribute::Triangle) => "#2171b5",
        (Colour::Blue, Attribute::Phantom) => "#c6dbef",
    }
}

fn signal_stroke(kind: SignalKind) -> &'static str {
    match kind {
        SignalKind::Mauve => "#b05cc8",
        SignalKind::Silver => "#9e9e9e",
        SignalKind::BlueSig => "#1f4e9c",
        SignalKind::RedLeft | SignalKind::RedRight => "#d62728",
        SignalKind::Yellow => "#f2c200",
    }
}

/// Euclidean schematic of the interwoven triangles: abscissa runs downward,
/// each trilateral is an isosceles glyph from its vertex to its basis.
pub fn render_schematic(trilaterals: &[Trilateral], signals: &SignalLayer) -> String {
    let mut out = String::new();
    let max_basis = trilaterals.iter().map(|t| t.basis).max().unwrap_or(0);
    let unit = 12.0;
    let width = 640.0;
    let height = (max_basis as f64 + 2.0) * unit;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    if trilaterals.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let cx = width / 2.0;
    let y = |a: u64| (a as f64 + 1.0) * unit;
    let _ = writeln!(out, r#"<g id="trilaterals">"#);
    for t in trilaterals {
        let half = (t.height as f64) * unit * 0.5 * (0.6 + 0.4 / (t.generation as f64 + 1.0));
        let stroke = match t.colour {
            Colour::Red => "#d62728",
            Colour::Blue => "#1f77b4",
        };
        let dash = match t.attribute {
            Attribute::Triangle => "",
            Attribute::Phantom => r#" stroke-dasharray="4 3""#,
        };
        let _ = writeln!(
            out,
            r#"<polygon data-gen="{}" data-index="{}" points="{cx:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="{stroke}"{dash}/>"#,
            t.generation,
            t.index,
            y(t.vertex),
            cx - half,
            y(t.basis),
            cx + half,
            y(t.basis),
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="signals">"#);
    let mut seen = BTreeSet::new();
    for e in &signals.entries {
        if e.abscissa > max_basis || !seen.insert((e.abscissa, e.kind)) {
            continue;
        }
        let x = 10.0 + 8.0 * e.kind as u8 as f64;
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.1}" cy="{:.2}" r="2.5" fill="{}"/>"#,
            y(e.abscissa),
            signal_stroke(e.kind)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

/// Side of `status` carrying the level mark endpoint to the left.
pub fn left_side(status: TileStatus) -> u8 {
    side_of_role(status, SideRole::Left).expect("every status has a left side")
}
