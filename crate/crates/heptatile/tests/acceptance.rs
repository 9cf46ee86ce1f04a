//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Every expected value below comes from a test-local oracle.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use heptatile::decorate::{
    anchored_catalog, build_decorated, verify, verify_tile, BuildConfig, Category, Component, BASE_TARGET,
};
use heptatile::heptagrid::{grow_tree, side_role, SideRole, Skeleton, TileAddress, TileId, TileStatus};
use heptatile::isoclines::{build_wire, density_scan, Phase, DENSITY_CLAIM, SUPERDENSITY_RADIUS};
use heptatile::render::{disc_circumradius, max_shared_side_gap, place};
use heptatile::triangles::{
    construct_generations, free_rows, legs_cross, mid_line_phantoms, nesting, Attribute, Colour, Nesting, Trilateral,
};
use heptatile::turing::{
    compile, parse_data, parse_tm, simulate_in_triangle, tiling_decision, Decision, Instruction, Move, TapeData,
    TuringMachine, Verdict,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

// ---------------------------------------------------------------- oracles

/// Fibonacci numbers indexed so that f_1 = 1 and f_2 = 2.
fn fibonacci(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

/// Level sizes by iterating the substitution on status counts.
fn substitution_levels(apex: usize, depth: usize) -> Vec<u64> {
    // G, B, Y, O, M, R rewritten by the rules of the tree.
    const RULES: [&[usize]; 6] = [&[2, 4, 0], &[1, 3], &[2, 1, 0], &[2, 1, 3], &[1, 5], &[2, 1, 3]];
    let mut v = [0u64; 6];
    v[apex] = 1;
    let mut out = vec![1];
    for _ in 0..depth {
        let mut next = [0u64; 6];
        for (s, &n) in v.iter().enumerate() {
            for &t in RULES[s] {
                next[t] += n;
            }
        }
        v = next;
        out.push(v.iter().sum());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Tri {
    n: u32,
    m: u64,
    vertex: u64,
    mid: u64,
    basis: u64,
    red: bool,
    triangle: bool,
}

fn tri(n: u32, m: u64) -> Tri {
    let h = 1u64 << (n + 1);
    let vertex = (1u64 << n) - 1 + m * h;
    Tri {
        n,
        m,
        vertex,
        mid: (m + 1) * h - 1,
        basis: vertex + h,
        red: n % 2 == 1,
        triangle: m.is_multiple_of(2),
    }
}

fn closed_form(max_gen: u32, len: u64) -> Vec<Tri> {
    let mut out = Vec::new();
    for n in 0..=max_gen {
        let mut m = 0;
        while tri(n, m).vertex < len {
            out.push(tri(n, m));
            m += 1;
        }
    }
    out
}

fn matches_oracle(t: &Trilateral, o: &Tri) -> bool {
    t.generation == o.n
        && t.index == o.m
        && t.vertex == o.vertex
        && t.mid == o.mid
        && t.basis == o.basis
        && t.height == o.basis - o.vertex
        && (t.colour == Colour::Red) == o.red
        && (t.attribute == Attribute::Triangle) == o.triangle
}

fn inside(inner: &Tri, outer: &Tri) -> bool {
    outer.vertex <= inner.vertex && inner.basis <= outer.basis
}

/// Tape-unbounded interpreter: returns (state, read, written, move, head)
/// per step and the final state.
type FlatStep = (usize, usize, usize, Move, i64);

fn flat_run(tm: &TuringMachine, data: &TapeData, max_steps: usize) -> (Vec<FlatStep>, usize) {
    let mut tape: HashMap<i64, usize> = data.letters.iter().enumerate().map(|(i, &a)| (i as i64, a)).collect();
    let (mut q, mut head) = (tm.initial, 0i64);
    let mut steps = Vec::new();
    while q != tm.halt && steps.len() < max_steps {
        let read = *tape.get(&head).unwrap_or(&tm.blank);
        let Some(r) = tm.rules.get(&(q, read)) else { break };
        tape.insert(head, r.write);
        steps.push((q, read, r.write, r.mv, head));
        head += match r.mv {
            Move::L => -1,
            Move::R => 1,
        };
        q = r.next;
    }
    (steps, q)
}

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

// ---------------------------------------------------------------- criteria

fn fibonacci_levels() -> Outcome {
    let start = Instant::now();
    let patch = grow_tree(TileStatus::G, 14);
    let subst = substitution_levels(0, 14);
    let mut bad = Vec::new();
    for (m, &by_substitution) in subst.iter().enumerate() {
        let expect = fibonacci(2 * m + 1);
        if patch.level_len(m) != expect || by_substitution != expect {
            bad.push(m);
        }
    }
    // Statuses actually assigned on the shallow levels add up as well.
    for m in 0..=10 {
        let n = (0..patch.level_len(m))
            .filter(|&i| patch.status_at(TileId::new(m, i)).is_some())
            .count() as u64;
        if n != fibonacci(2 * m + 1) {
            bad.push(m);
        }
    }
    let t = start.elapsed();
    outcome(
        bad.is_empty() && t < Duration::from_secs(10),
        format!("levels 0..14 = f_(2m+1), mismatches {bad:?}, {}", secs(t)),
    )
}

fn trilateral_closed_forms() -> Outcome {
    let start = Instant::now();
    let len = 1u64 << 14;
    let built = construct_generations(12, len);
    let oracle = closed_form(12, len);
    let same = built.len() == oracle.len() && built.iter().zip(&oracle).all(|(t, o)| matches_oracle(t, o));
    let t = start.elapsed();
    outcome(
        same && t < Duration::from_secs(5),
        format!("{} trilaterals, element-wise equal: {same}, {}", built.len(), secs(t)),
    )
}

fn inter_generation_nesting() -> Outcome {
    let len = 1u64 << 13;
    let all = closed_form(10, len);
    let by_gen: Vec<Vec<Tri>> = (0..=10)
        .map(|n| all.iter().copied().filter(|t| t.n == n).collect())
        .collect();
    let (mut checked, mut bad) = (0usize, Vec::new());
    for n in 0..10u32 {
        let lower = &by_gen[n as usize];
        for t in by_gen[n as usize + 1].iter().filter(|t| t.basis < len) {
            checked += 1;
            let inner: Vec<&Tri> = lower.iter().filter(|s| inside(s, t)).collect();
            let ok = inner.len() == 1 && !inner[0].triangle && inner[0].mid == t.mid;
            if !ok {
                bad.push((t.n, t.m));
            }
        }
        if n + 2 > 10 {
            continue;
        }
        for t in by_gen[n as usize + 2].iter().filter(|t| t.basis < len) {
            checked += 1;
            let inner: Vec<&Tri> = lower.iter().filter(|s| inside(s, t)).collect();
            let triangles = inner.iter().filter(|s| s.triangle).count();
            let phantoms: Vec<&&Tri> = inner.iter().filter(|s| !s.triangle).collect();
            let ok = triangles == 2 && phantoms.len() == 1 && phantoms[0].mid == t.mid;
            if !ok {
                bad.push((t.n, t.m));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} trilaterals checked, {} failures", bad.len()),
    )
}

fn no_crossing() -> Outcome {
    let len = 1u64 << 12;
    let ts = construct_generations(10, len);
    let (mut pairs, mut leg_hits, mut same_colour_bad, mut literal) = (0u64, 0u64, 0u64, 0u64);
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            pairs += 1;
            if legs_cross(a, b) {
                leg_hits += 1;
            }
            let rel = nesting(a, b);
            if rel == Nesting::Crossing {
                literal += 1;
            }
            if a.colour == b.colour
                && a.is_triangle()
                && b.is_triangle()
                && matches!(rel, Nesting::Crossing | Nesting::SharesBoundary)
            {
                same_colour_bad += 1;
            }
        }
    }
    // In decorated patches no tree edge carries legs of two trilaterals.
    let mut shared_edges = 0usize;
    let mut edges = 0usize;
    for (phase, origin) in [(0u8, 0i64), (0, 8), (2, 4), (5, 12)] {
        let cfg = BuildConfig {
            phase: Phase::new(phase).unwrap(),
            origin,
            ..BuildConfig::new(10, 5)
        };
        let (dp, _) = build_decorated(cfg).expect("build");
        for id in dp.layout().ids() {
            let status = dp.layout().status(id);
            for s in 1..=7u8 {
                if !matches!(side_role(status, s), SideRole::Father | SideRole::Son(_)) {
                    continue;
                }
                let mut src = dp.provenance(id, s);
                src.sort();
                src.dedup();
                if !src.is_empty() {
                    edges += 1;
                }
                if src.len() > 1 {
                    shared_edges += 1;
                }
            }
        }
    }
    outcome(
        leg_hits == 0 && same_colour_bad == 0 && shared_edges == 0,
        format!(
            "{pairs} pairs: crossing legs {leg_hits}, same-colour triangle overlaps {same_colour_bad}, \
             shared leg edges {shared_edges}/{edges}; informational: open-span overlaps {literal}"
        ),
    )
}

fn mid_lines() -> Outcome {
    let len = 1u64 << 12;
    let all = closed_form(10, len);
    let mut by_mid: HashMap<u64, Vec<Tri>> = HashMap::new();
    for t in all.iter().filter(|t| !t.triangle) {
        by_mid.entry(t.mid).or_default().push(*t);
    }
    let (mut checked, mut bad) = (0usize, 0usize);
    for t in all.iter().filter(|t| t.triangle) {
        checked += 1;
        let brute = by_mid
            .get(&t.mid)
            .map_or(0, |v| v.iter().filter(|p| p.n < t.n && inside(p, t)).count());
        let lib = mid_line_phantoms(&heptatile::triangles::trilateral(t.n, t.m)).expect("triangle");
        let lib_ok = lib.len() == brute && lib.iter().all(|p| p.mid == t.mid && p.attribute == Attribute::Phantom);
        if brute != t.n as usize || !lib_ok {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{checked} triangles of generation <= 10, {bad} failures"),
    )
}

fn free_row_counts() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in 0..=5u32 {
        let g = 2 * n + 1;
        for m in (0..6).step_by(2) {
            let t = tri(g, m);
            // Abscissas strictly inside, avoiding every nested red triangle.
            let nested: Vec<Tri> = (1..g)
                .step_by(2)
                .flat_map(|k| (0..).map(move |j| tri(k, j)).take_while(move |s| s.vertex <= t.basis))
                .filter(|s| s.triangle && inside(s, &t))
                .collect();
            let brute = (t.vertex + 1..t.basis)
                .filter(|&a| !nested.iter().any(|s| s.vertex <= a && a <= s.basis))
                .count() as u64;
            let lib = free_rows(&heptatile::triangles::trilateral(g, m)).expect("red triangle");
            let expect = (1u64 << (n + 1)) + 1;
            if brute != expect || lib.count as u64 != brute {
                ok = false;
            }
            if m == 0 {
                lines.push(format!("g={g}:{brute}"));
            }
        }
    }
    outcome(ok, format!("free rows {}", lines.join(" ")))
}

fn seed_density() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut worst = 0;
    for apex in [TileStatus::R, TileStatus::G] {
        let r = density_scan(&grow_tree(apex, 12), Phase::default()).expect("scan");
        ok &= r.evaluated > 0 && r.max_distance <= SUPERDENSITY_RADIUS;
        worst = worst.max(r.max_distance);
        parts.push(format!(
            "{apex:?}: {} tiles evaluated, max {}",
            r.evaluated, r.max_distance
        ));
    }
    outcome(
        ok,
        format!(
            "{}; bound {SUPERDENSITY_RADIUS}; radius-{DENSITY_CLAIM} claim {}",
            parts.join(", "),
            if worst <= DENSITY_CLAIM { "holds" } else { "exceeded" }
        ),
    )
}

fn verifier_soundness() -> Outcome {
    let start = Instant::now();
    let mut builds = 0;
    let mut dirty = Vec::new();
    for depth in [4usize, 6, 8, 10] {
        for max_gen in 0..=5u32 {
            for (phase, origin) in [(0u8, 0i64), (4, 2)] {
                let cfg = BuildConfig {
                    phase: Phase::new(phase).unwrap(),
                    origin,
                    ..BuildConfig::new(depth, max_gen)
                };
                let (dp, _) = build_decorated(cfg).expect("build");
                builds += 1;
                let v = verify(&dp);
                if !v.is_empty() {
                    dirty.push((depth, max_gen, phase, v.len()));
                }
            }
        }
    }
    let (mut dp, _) = build_decorated(BuildConfig::new(10, 5)).expect("build");
    let interior: Vec<TileId> = dp.layout().ids().filter(|&id| dp.layout().is_interior(id)).collect();
    let components = [
        Component::TreeEdge,
        Component::IsoclineBand,
        Component::MarkEnd,
        Component::SignalSet,
        Component::Status,
    ];
    let mut rng = StdRng::seed_from_u64(0x7e3);
    let mut missed = 0;
    for _ in 0..1000 {
        let id = interior[rng.gen_range(0..interior.len())];
        let side = rng.gen_range(1..=7u8);
        let component = components[rng.gen_range(0..components.len())];
        let original = dp.prototile(id).clone();
        dp.mutate(id, side, component, rng.gen_range(0..64));
        if verify_tile(&dp, id).is_empty() {
            missed += 1;
        }
        dp.set_prototile(id, original);
    }
    let t = start.elapsed();
    outcome(
        dirty.is_empty() && missed == 0 && t < Duration::from_secs(60),
        format!(
            "{builds} builds, unclean {dirty:?}; 1000 mutations, undetected {missed}; {}",
            secs(t)
        ),
    )
}

fn catalog_stability() -> Outcome {
    let start = Instant::now();
    let a = anchored_catalog(TileStatus::G, 12, 0).expect("catalog");
    let b = anchored_catalog(TileStatus::G, 14, 0).expect("catalog");
    let new: Vec<&String> = b.keys().filter(|k| !a.contains_key(*k)).collect();
    let gone: Vec<&String> = a.keys().filter(|k| !b.contains_key(*k)).collect();
    let mut counts: BTreeMap<Category, usize> = BTreeMap::new();
    for (_, c) in b.values() {
        *counts.entry(*c).or_default() += 1;
    }
    let diffs: Vec<String> = Category::ALL
        .iter()
        .filter_map(|c| {
            let n = counts.get(c).copied().unwrap_or(0);
            c.target()
                .map(|t| format!("{} {n}/{t} ({:+})", c.name(), n as i64 - t as i64))
        })
        .collect();
    let base: usize = Category::ALL
        .iter()
        .filter(|c| c.target().is_some())
        .map(|c| counts.get(c).copied().unwrap_or(0))
        .sum();
    outcome(
        new.is_empty() && gone.is_empty(),
        format!(
            "depth 12: {}, depth 14: {}, new {}, vanished {}; {}; base {base}/{BASE_TARGET} ({:+}); {}",
            a.len(),
            b.len(),
            new.len(),
            gone.len(),
            diffs.join(", "),
            base as i64 - BASE_TARGET as i64,
            secs(start.elapsed())
        ),
    )
}

/// Every machine with up to four states (halting one included) and four
/// letters, every set of defined (state, letter) keys, data lengths 1..=8.
fn meta_tile_count() -> Outcome {
    let (mut machines, mut bad) = (0usize, 0usize);
    for s in 2..=4usize {
        for l in 1..=4usize {
            let keys: Vec<(usize, usize)> = (0..s - 1).flat_map(|q| (0..l).map(move |a| (q, a))).collect();
            for mask in 0u32..(1 << keys.len()) {
                let rules: BTreeMap<(usize, usize), Instruction> = keys
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(i, &k)| {
                        let ins = Instruction {
                            write: i % l,
                            mv: if i % 2 == 0 { Move::R } else { Move::L },
                            next: (k.0 + 1) % s,
                        };
                        (k, ins)
                    })
                    .collect();
                let tm = TuringMachine {
                    states: (0..s)
                        .map(|q| if q == s - 1 { "qH".into() } else { format!("q{q}") })
                        .collect(),
                    initial: 0,
                    halt: s - 1,
                    letters: (0..l)
                        .map(|a| if a == 0 { "_".into() } else { a.to_string() })
                        .collect(),
                    blank: 0,
                    rules,
                };
                let instructions = mask.count_ones() as usize;
                for d in 1..=8usize {
                    let data = TapeData {
                        letters: (0..d).map(|i| i % l).collect(),
                    };
                    let r = compile(&tm, &data);
                    machines += 1;
                    let expect = 7 * instructions + 12 * l + d + 8;
                    if r.meta_count != expect || r.metas.len() != expect || r.total_prototiles - r.meta_count != 232 {
                        bad += 1;
                    }
                }
            }
        }
    }
    outcome(
        bad == 0,
        format!("{machines} machine/data pairs, {bad} count mismatches"),
    )
}

fn reduction_behaviour() -> Outcome {
    let halt = parse_tm(&fixture("halt4.tm")).expect("halt4");
    let halt_data = parse_data(&halt, &fixture("halt4.data")).expect("data");
    let lp = parse_tm(&fixture("loop.tm")).expect("loop");
    let lp_data = parse_data(&lp, &fixture("loop.data")).expect("data");
    let incr = parse_tm(&fixture("unary_incr.tm")).expect("incr");
    let incr_data = parse_data(&incr, &fixture("unary_incr.data")).expect("data");
    let d_halt = tiling_decision(&halt, &halt_data, 9);
    let d_loop = tiling_decision(&lp, &lp_data, 9);

    let mut replays = 0;
    let mut diverged = 0;
    for (tm, data) in [(&halt, &halt_data), (&lp, &lp_data), (&incr, &incr_data)] {
        for g in (1..=9).step_by(2) {
            let out = simulate_in_triangle(tm, data, &heptatile::triangles::trilateral(g, 0)).expect("sim");
            let Verdict::Halted(k) = out.verdict else { continue };
            replays += 1;
            let (flat, q) = flat_run(tm, data, k + 1);
            let same = flat.len() == k
                && q == tm.halt
                && out.final_state == q
                && out.trace.len() == k
                && out
                    .trace
                    .iter()
                    .zip(&flat)
                    .all(|(s, f)| (s.state, s.read, s.written, s.mv, s.column as i64) == (f.0, f.1, f.2, f.3, f.4));
            if !same {
                diverged += 1;
            }
        }
    }
    outcome(
        d_halt == Decision::Blocked(3) && d_loop == Decision::ExtensibleUpTo(9) && replays > 0 && diverged == 0,
        format!("halt4: {d_halt}; loop: {d_loop}; {replays} halted traces replayed, {diverged} diverged"),
    )
}

fn renderer_geometry() -> Outcome {
    let a = PI / 7.0;
    let b = PI / 3.0;
    // tanh(R/2) with cosh R = cot a cot b simplifies to this ratio.
    let oracle = ((a + b).cos() / (a - b).cos()).sqrt();
    let radius_err = (disc_circumradius() - oracle).abs();
    let mut worst_norm: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut apex_err: f64 = 0.0;
    let mut tiles = 0;
    for apex in [TileStatus::R, TileStatus::G] {
        let pl = place(&grow_tree(apex, 6), 6).expect("place");
        tiles += pl.tiles.len();
        for g in pl.tiles.values() {
            for v in g.vertices {
                worst_norm = worst_norm.max(v.norm());
            }
        }
        for v in pl.tiles[&TileId::new(0, 0)].vertices {
            apex_err = apex_err.max((v.norm() - oracle).abs());
        }
        worst_gap = worst_gap.max(max_shared_side_gap(&pl));
    }
    outcome(
        worst_norm < 1.0 && worst_gap <= 1e-9 && radius_err <= 1e-12 && apex_err <= 1e-12,
        format!(
            "{tiles} tiles, max |z| {worst_norm:.12}, max side gap {worst_gap:.2e}, radius error {radius_err:.2e}, apex vertex error {apex_err:.2e}"
        ),
    )
}

fn coverage() -> Outcome {
    let base = grow_tree(TileStatus::R, 8);
    let originals: Vec<TileAddress> = (0..=8).flat_map(|m| base.level(m)).collect();
    let mut fails = Vec::new();
    for k in 0..=6usize {
        let wire = match build_wire(&base, &TileAddress::apex(), 0, k, Phase::default()) {
            Ok(w) => w,
            Err(e) => {
                fails.push(format!("k={k}: {e}"));
                continue;
            }
        };
        let patch = wire.patch();
        let top = &wire.seeds()[0].address;
        let origin = patch.origin();
        let mut missing = 0;
        for a in &originals {
            let lifted = origin.concat(a);
            if !top.is_prefix_of(&lifted) || !patch.contains(&lifted) {
                missing += 1;
            }
        }
        // The original bottom level sits inside the index span of T(top).
        let bottom = origin.len() + 8;
        let span = patch.subtree_span(top, bottom);
        let lo = patch.id_of(&origin.concat(&base.level(8)[0])).map(|i| i.index);
        let hi = patch
            .id_of(&origin.concat(base.level(8).last().unwrap()))
            .map(|i| i.index);
        let span_ok = matches!((span, lo, hi), (Some((s, e)), Some(l), Some(h)) if s <= l && h <= e);
        if missing > 0 || !span_ok || wire.seeds()[0].abscissa != -(k as i64) {
            fails.push(format!("k={k}: missing {missing}, span ok {span_ok}"));
        }
    }
    outcome(
        fails.is_empty(),
        format!("{} original tiles, k = 0..6, failures {fails:?}", originals.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("Fibonacci level sizes", fibonacci_levels),
        ("trilateral closed forms", trilateral_closed_forms),
        ("inter-generation nesting", inter_generation_nesting),
        ("no crossing", no_crossing),
        ("mid-line phantoms", mid_lines),
        ("free rows", free_row_counts),
        ("seed density", seed_density),
        ("verifier soundness and sensitivity", verifier_soundness),
        ("catalog stability", catalog_stability),
        ("meta-tile count", meta_tile_count),
        ("reduction behaviour", reduction_behaviour),
        ("renderer geometry", renderer_geometry),
        ("coverage by the climbing wire", coverage),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
