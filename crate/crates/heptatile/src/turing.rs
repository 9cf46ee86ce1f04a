//! Turing machines, their meta-tiles and their runs inside red triangles.
//!
//! A run executes one instruction per free row of the hosting triangle,
//! on a tape laid along the right leg. When the halting state is reached
//! on a free row the halting meta-tile appears, and that tile cannot abut
//! anything, so the tiling is blocked.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::decorate::{
    abuttable, BlockVerdict, EdgeDecoration, EdgeLink, EdgeSignal, LinkKind, Prototile, BASE_TARGET,
};
use crate::heptagrid::{side_role, son_sides, sons, Ruleset, SideRole, TileAddress, TileStatus, TreePatch};
use crate::triangles::{free_rows, trilateral, TriangleError, Trilateral};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    L,
    R,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Instruction {
    pub write: usize,
    pub mv: Move,
    pub next: usize,
}

/// States and letters are indices into the name lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub initial: usize,
    pub halt: usize,
    pub letters: Vec<String>,
    pub blank: usize,
    pub rules: BTreeMap<(usize, usize), Instruction>,
}

impl TuringMachine {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    pub fn instruction_count(&self) -> usize {
        self.rules.len()
    }

    pub fn rule(&self, state: usize, letter: usize) -> Option<&Instruction> {
        self.rules.get(&(state, letter))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("TM v1\n");
        out += &format!("states: {}\n", self.states.join(" "));
        out += &format!("initial: {}\n", self.states[self.initial]);
        out += &format!("halt: {}\n", self.states[self.halt]);
        out += &format!("letters: {}\n", self.letters.join(" "));
        out += &format!("blank: {}\n", self.letters[self.blank]);
        for (&(q, a), r) in &self.rules {
            out += &format!(
                "rule {} {} -> {} {} {}\n",
                self.states[q], self.letters[a], self.letters[r.write], r.mv, self.states[r.next]
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeData {
    pub letters: Vec<usize>,
}

impl TapeData {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TuringError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: second instruction for ({state}, {letter})")]
    DuplicateInstruction { line: usize, state: String, letter: String },
    #[error("line {line}: unknown symbol `{symbol}`")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("data must hold at least one letter")]
    EmptyData,
    #[error(transparent)]
    Triangle(#[from] TriangleError),
}

fn lookup(names: &[String], sym: &str, line: usize) -> Result<usize, TuringError> {
    names
        .iter()
        .position(|n| n == sym)
        .ok_or_else(|| TuringError::UnknownSymbol {
            line,
            symbol: sym.to_string(),
        })
}

pub fn parse_tm(text: &str) -> Result<TuringMachine, TuringError> {
    let perr = |line: usize, msg: &str| TuringError::Parse {
        line,
        msg: msg.to_string(),
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, "TM v1")) => {}
        Some((n, _)) => return Err(perr(n, "expected `TM v1`")),
        None => return Err(perr(1, "empty machine file")),
    }
    let mut header = |key: &str| -> Result<(usize, Vec<String>), TuringError> {
        let (n, l) = it.next().ok_or_else(|| perr(0, &format!("missing `{key}`")))?;
        let rest = l
            .strip_prefix(key)
            .ok_or_else(|| perr(n, &format!("expected `{key}`")))?;
        let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if words.is_empty() {
            return Err(perr(n, &format!("`{key}` needs a value")));
        }
        Ok((n, words))
    };
    let (_, states) = header("states:")?;
    let (ni, initial) = header("initial:")?;
    let (nh, halt) = header("halt:")?;
    let (_, letters) = header("letters:")?;
    let (nb, blank) = header("blank:")?;
    let initial = lookup(&states, &initial[0], ni)?;
    let halt = lookup(&states, &halt[0], nh)?;
    let blank = lookup(&letters, &blank[0], nb)?;
    let mut rules = BTreeMap::new();
    for (n, l) in it {
        let w: Vec<&str> = l.split_whitespace().collect();
        if w.len() != 7 || w[0] != "rule" || w[3] != "->" {
            return Err(perr(n, "expected `rule <state> <letter> -> <letter> <L|R> <state>`"));
        }
        let q = lookup(&states, w[1], n)?;
        let a = lookup(&letters, w[2], n)?;
        let write = lookup(&letters, w[4], n)?;
        let mv = match w[5] {
            "L" => Move::L,
            "R" => Move::R,
            _ => return Err(perr(n, "move must be L or R")),
        };
        let next = lookup(&states, w[6], n)?;
        if q == halt {
            return Err(perr(n, "the halting state has no instruction"));
        }
        if rules.insert((q, a), Instruction { write, mv, next }).is_some() {
            return Err(TuringError::DuplicateInstruction {
                line: n,
                state: w[1].to_string(),
                letter: w[2].to_string(),
            });
        }
    }
    Ok(TuringMachine {
        states,
        initial,
        halt,
        letters,
        blank,
        rules,
    })
}

/// Letters separated by whitespace, or a single word of one-character letters.
pub fn parse_data(tm: &TuringMachine, text: &str) -> Result<TapeData, TuringError> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let symbols: Vec<String> = match words.as_slice() {
        [w] if lookup(&tm.letters, w, 1).is_err() => w.chars().map(String::from).collect(),
        _ => words.iter().map(|w| w.to_string()).collect(),
    };
    if symbols.is_empty() {
        return Err(TuringError::EmptyData);
    }
    let letters = symbols
        .iter()
        .map(|s| lookup(&tm.letters, s, 1))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TapeData { letters })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaRole {
    Seed,
    Junction,
    Leg,
    FreeRowTravel,
    Instruction,
    YPathCrossing,
    BasisStop,
    Halt,
    Data,
}

impl MetaRole {
    pub const ALL: [MetaRole; 9] = [
        MetaRole::Seed,
        MetaRole::Junction,
        MetaRole::Leg,
        MetaRole::FreeRowTravel,
        MetaRole::Instruction,
        MetaRole::YPathCrossing,
        MetaRole::BasisStop,
        MetaRole::Halt,
        MetaRole::Data,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetaRole::Seed => "seed",
            MetaRole::Junction => "junction",
            MetaRole::Leg => "leg",
            MetaRole::FreeRowTravel => "free-row-travel",
            MetaRole::Instruction => "instruction",
            MetaRole::YPathCrossing => "y-path-crossing",
            MetaRole::BasisStop => "basis-stop",
            MetaRole::Halt => "halt",
            MetaRole::Data => "data",
        }
    }

    fn status(self) -> TileStatus {
        match self {
            MetaRole::Seed | MetaRole::Junction => TileStatus::R,
            MetaRole::Leg => TileStatus::O,
            MetaRole::FreeRowTravel | MetaRole::BasisStop => TileStatus::B,
            MetaRole::Instruction | MetaRole::YPathCrossing | MetaRole::Halt | MetaRole::Data => TileStatus::Y,
        }
    }
}

/// One machine-dependent prototile. `shape` numbers the tile shapes 1 to 24;
/// data tiles have shape 0.
#[derive(Clone, Debug)]
pub struct MetaTile {
    pub shape: u8,
    pub role: MetaRole,
    pub label: String,
    pub prototile: Prototile,
}

#[derive(Clone, Debug)]
pub struct CompileReport {
    pub metas: Vec<MetaTile>,
    pub meta_count: usize,
    pub total_prototiles: usize,
    pub instructions: usize,
    pub letters: usize,
    pub data_length: usize,
    pub notes: Vec<String>,
}

impl CompileReport {
    pub fn role_count(&self, role: MetaRole) -> usize {
        self.metas.iter().filter(|m| m.role == role).count()
    }

    pub fn prototiles(&self) -> Vec<Prototile> {
        self.metas.iter().map(|m| m.prototile.clone()).collect()
    }

    pub fn halt_tiles(&self) -> impl Iterator<Item = &MetaTile> {
        self.metas.iter().filter(|m| m.role == MetaRole::Halt)
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "I={} letters={} D={}\nmetaCount={} (7*{} + 12*{} + {} + 8)\ntotalPrototiles={} (base {} + meta {})\n",
            self.instructions,
            self.letters,
            self.data_length,
            self.meta_count,
            self.instructions,
            self.letters,
            self.data_length,
            self.total_prototiles,
            BASE_TARGET,
            self.meta_count
        );
        for r in MetaRole::ALL {
            out += &format!("role {:<16} {}\n", r.name(), self.role_count(r));
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out
    }
}

fn meta_prototile(status: TileStatus, code: u32, halt: bool) -> Prototile {
    let sides = std::array::from_fn(|i| {
        let s = i as u8 + 1;
        let role = side_role(status, s);
        let kind = match role {
            SideRole::Father | SideRole::Son(_) => LinkKind::Tree,
            SideRole::Left | SideRole::Right => LinkKind::Level,
            _ => LinkKind::Diagonal,
        };
        let far = match role {
            SideRole::Son(k) => Some(sons(status, Ruleset::R1)[k as usize - 1]),
            _ => None,
        };
        let mut signals = vec![EdgeSignal::Meta(code * 8 + u32::from(s))];
        if halt {
            signals.push(EdgeSignal::Halt);
        }
        signals.sort();
        EdgeDecoration {
            link: EdgeLink {
                kind,
                a: Some(status),
                b: far,
            },
            band: None,
            mark: matches!(role, SideRole::Left | SideRole::Right),
            signals,
        }
    });
    Prototile { status, sides }
}

/// Lower the machine and its data to meta-tiles, group by group.
pub fn compile(tm: &TuringMachine, data: &TapeData) -> CompileReport {
    let mut metas = Vec::new();
    let mut push = |shape: u8, role: MetaRole, label: String| {
        let code = metas.len() as u32;
        let prototile = meta_prototile(role.status(), code, role == MetaRole::Halt);
        metas.push(MetaTile {
            shape,
            role,
            label,
            prototile,
        });
    };
    push(1, MetaRole::Seed, "vertex".into());
    for f in 2..=5 {
        push(f, MetaRole::Junction, format!("junction{f}"));
    }
    // Shapes 6 to 11: each letter along the leg, on either isocline colour.
    for f in 6..=11u8 {
        for iso in ["green", "orange"] {
            for a in &tm.letters {
                push(f, MetaRole::Leg, format!("leg{f}:{iso}:{a}"));
            }
        }
    }
    let rules: Vec<String> = tm
        .rules
        .iter()
        .map(|(&(q, a), _)| format!("{}/{}", tm.states[q], tm.letters[a]))
        .collect();
    for (figs, role) in [
        (12..=13u8, MetaRole::FreeRowTravel),
        (16..=18, MetaRole::Instruction),
        (20..=21, MetaRole::YPathCrossing),
    ] {
        for f in figs {
            for r in &rules {
                push(f, role, format!("{}{f}:{r}", role.name()));
            }
        }
    }
    push(22, MetaRole::BasisStop, "basis".into());
    push(23, MetaRole::Halt, "halt-left".into());
    push(24, MetaRole::Halt, "halt-right".into());
    for (i, &a) in data.letters.iter().enumerate() {
        push(0, MetaRole::Data, format!("data{i}:{}", tm.letters[a]));
    }
    let meta_count = metas.len();
    CompileReport {
        metas,
        meta_count,
        total_prototiles: BASE_TARGET + meta_count,
        instructions: tm.instruction_count(),
        letters: tm.letter_count(),
        data_length: data.len(),
        notes: vec![format!(
            "the leg group is counted with the {} letters although its description speaks of states ({} here)",
            tm.letter_count(),
            tm.state_count()
        )],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncationReason {
    /// The computing signal met the basis before halting.
    BasisReached,
    /// The head left the columns along the right leg.
    TapeOverflow,
    /// The data does not fit along the right leg.
    DataTooWide,
    /// No instruction for the current state and letter.
    NoInstruction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Halted(usize),
    Truncated(TruncationReason),
}

/// Side of the yellow mark on which the signal leaves the Y-path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// Abscissa of the free row where the step is executed.
    pub row: u64,
    pub column: usize,
    pub state: usize,
    pub read: usize,
    pub written: usize,
    pub mv: Move,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationOutcome {
    pub verdict: Verdict,
    pub trace: Vec<TraceStep>,
    pub tape: Vec<usize>,
    pub final_state: usize,
    pub head: usize,
}

/// Number of tape columns in a host: one per right-leg tile.
pub fn column_capacity(host: &Trilateral) -> usize {
    4 * host.height as usize
}

pub fn simulate_in_triangle(
    tm: &TuringMachine,
    data: &TapeData,
    host: &Trilateral,
) -> Result<SimulationOutcome, TuringError> {
    let rows = free_rows(host)?.rows;
    let capacity = column_capacity(host);
    let mut out = SimulationOutcome {
        verdict: Verdict::Truncated(TruncationReason::BasisReached),
        trace: Vec::new(),
        tape: Vec::new(),
        final_state: tm.initial,
        head: 0,
    };
    if data.len() > capacity {
        out.verdict = Verdict::Truncated(TruncationReason::DataTooWide);
        return Ok(out);
    }
    out.tape = vec![tm.blank; capacity];
    out.tape[..data.len()].copy_from_slice(&data.letters);
    for (k, &row) in rows.iter().enumerate() {
        let state = out.final_state;
        if state == tm.halt {
            out.verdict = Verdict::Halted(k);
            return Ok(out);
        }
        let read = out.tape[out.head];
        let Some(r) = tm.rule(state, read) else {
            out.verdict = Verdict::Truncated(TruncationReason::NoInstruction);
            return Ok(out);
        };
        out.tape[out.head] = r.write;
        out.trace.push(TraceStep {
            row,
            column: out.head,
            state,
            read,
            written: r.write,
            mv: r.mv,
            direction: match r.mv {
                Move::L => Direction::Left,
                Move::R => Direction::Right,
            },
        });
        out.final_state = r.next;
        let next = match r.mv {
            Move::L => out.head.checked_sub(1),
            Move::R => Some(out.head + 1).filter(|&h| h < capacity),
        };
        match next {
            Some(h) => out.head = h,
            None => {
                out.verdict = Verdict::Truncated(TruncationReason::TapeOverflow);
                return Ok(out);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Blocked(u32),
    ExtensibleUpTo(u32),
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Blocked(g) => write!(f, "BLOCKED g={g}"),
            Decision::ExtensibleUpTo(n) => write!(f, "EXTENSIBLE upto={n}"),
        }
    }
}

pub const DEFAULT_MAX_GEN: u32 = 9;

/// The least odd generation whose red triangle lets the run halt, confirmed
/// by the halting meta-tile having no possible neighbor.
pub fn tiling_decision(tm: &TuringMachine, data: &TapeData, max_generation: u32) -> Decision {
    let report = compile(tm, data);
    let protos = report.prototiles();
    for g in (1..=max_generation).step_by(2) {
        let host = trilateral(g, 0);
        let Ok(outcome) = simulate_in_triangle(tm, data, &host) else {
            continue;
        };
        if let Verdict::Halted(_) = outcome.verdict {
            let blocked = report
                .halt_tiles()
                .all(|h| abuttable(&protos, &h.prototile) == BlockVerdict::Blocked);
            if blocked {
                return Decision::Blocked(g);
            }
        }
    }
    Decision::ExtensibleUpTo(max_generation)
}

/// A Y-path: the chain of Y-sons below a right-leg tile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YPath {
    pub source: TileAddress,
    pub chain: Vec<TileAddress>,
}

/// Follow Y-sons from `source` for at most `len` levels, staying in the patch.
pub fn y_path(patch: &TreePatch, source: &TileAddress, len: usize) -> Option<YPath> {
    let mut status = patch.status_of(source)?;
    let mut cur = source.clone();
    let mut chain = Vec::new();
    while chain.len() < len {
        let Some(slot) = sons(status, Ruleset::R1).iter().position(|&s| s == TileStatus::Y) else {
            break;
        };
        let next = cur.child(slot as u8 + 1);
        if !patch.contains(&next) {
            break;
        }
        debug_assert!(son_sides(status).len() > slot);
        chain.push(next.clone());
        cur = next;
        status = TileStatus::Y;
    }
    Some(YPath {
        source: source.clone(),
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    const HALT4: &str = include_str!("../fixtures/halt4.tm");
    const LOOP: &str = include_str!("../fixtures/loop.tm");
    const INCR: &str = include_str!("../fixtures/unary_incr.tm");

    /// Plain interpreter on an unbounded tape.
    fn flat_run(tm: &TuringMachine, data: &TapeData, steps: usize) -> (Vec<(usize, usize, Move)>, usize) {
        let mut tape: HashMap<i64, usize> = data.letters.iter().enumerate().map(|(i, &a)| (i as i64, a)).collect();
        let (mut q, mut h) = (tm.initial, 0i64);
        let mut out = Vec::new();
        for _ in 0..steps {
            if q == tm.halt {
                break;
            }
            let a = *tape.get(&h).unwrap_or(&tm.blank);
            let r = tm.rule(q, a).unwrap();
            tape.insert(h, r.write);
            out.push((q, r.write, r.mv));
            h += if r.mv == Move::R { 1 } else { -1 };
            q = r.next;
        }
        (out, q)
    }

    #[test]
    fn parsing() {
        let tm = parse_tm(INCR).unwrap();
        assert_eq!(tm.instruction_count(), 3);
        assert_eq!(parse_tm(&tm.to_text()).unwrap(), tm);
        assert!(matches!(parse_tm(""), Err(TuringError::Parse { .. })));
        let dup = format!("{}rule q0 1 -> 1 R q1\n", INCR);
        assert!(matches!(parse_tm(&dup), Err(TuringError::DuplicateInstruction { .. })));
        let unknown = format!("{}rule q0 z -> 1 R q1\n", INCR);
        assert!(matches!(parse_tm(&unknown), Err(TuringError::UnknownSymbol { .. })));
        assert_eq!(parse_data(&tm, "111").unwrap().len(), 3);
        assert_eq!(parse_data(&tm, "1 1 _").unwrap().len(), 3);
        assert_eq!(parse_data(&tm, "  "), Err(TuringError::EmptyData));
    }

    #[test]
    fn meta_counts() {
        let tm = parse_tm(INCR).unwrap();
        let one_rule = TuringMachine {
            rules: tm.rules.iter().take(1).map(|(k, v)| (*k, *v)).collect(),
            ..tm.clone()
        };
        let d1 = TapeData { letters: vec![0] };
        assert_eq!(compile(&one_rule, &d1).meta_count, 40);
        let d4 = TapeData { letters: vec![0; 4] };
        let r = compile(&tm, &d4);
        assert_eq!(r.meta_count, 57);
        assert_eq!(r.total_prototiles - r.meta_count, 232);
        assert_eq!(r.role_count(MetaRole::Seed) + r.role_count(MetaRole::Junction), 5);
        assert_eq!(r.role_count(MetaRole::FreeRowTravel), 2 * 3);
        assert_eq!(r.role_count(MetaRole::BasisStop) + r.role_count(MetaRole::Halt), 3);
    }

    #[test]
    fn halting_machine() {
        let tm = parse_tm(HALT4).unwrap();
        let data = parse_data(&tm, "1").unwrap();
        let g3 = simulate_in_triangle(&tm, &data, &trilateral(3, 0)).unwrap();
        assert_eq!(g3.verdict, Verdict::Halted(4));
        let (oracle, q) = flat_run(&tm, &data, 100);
        let got: Vec<_> = g3.trace.iter().map(|s| (s.state, s.written, s.mv)).collect();
        assert_eq!(got, oracle);
        assert_eq!(q, g3.final_state);
        let g1 = simulate_in_triangle(&tm, &data, &trilateral(1, 0)).unwrap();
        assert_eq!(g1.verdict, Verdict::Truncated(TruncationReason::BasisReached));
        assert_eq!(tiling_decision(&tm, &data, 9), Decision::Blocked(3));
        assert_eq!(tiling_decision(&tm, &data, 1), Decision::ExtensibleUpTo(1));
    }

    #[test]
    fn immediate_halt_and_loop() {
        let mut tm = parse_tm(HALT4).unwrap();
        let data = parse_data(&tm, "1").unwrap();
        tm.initial = tm.halt;
        let out = simulate_in_triangle(&tm, &data, &trilateral(1, 0)).unwrap();
        assert_eq!(out.verdict, Verdict::Halted(0));
        let lp = parse_tm(LOOP).unwrap();
        let data = parse_data(&lp, "_").unwrap();
        assert_eq!(tiling_decision(&lp, &data, 9), Decision::ExtensibleUpTo(9));
    }

    #[test]
    fn data_too_wide() {
        let tm = parse_tm(INCR).unwrap();
        let data = TapeData { letters: vec![1; 17] };
        let out = simulate_in_triangle(&tm, &data, &trilateral(1, 0)).unwrap();
        assert_eq!(out.verdict, Verdict::Truncated(TruncationReason::DataTooWide));
        assert!(simulate_in_triangle(&tm, &data, &trilateral(1, 1)).is_err());
    }

    #[test]
    fn y_paths_follow_y_sons() {
        let patch = crate::heptagrid::grow_tree(TileStatus::R, 6);
        let p = y_path(&patch, &"3".parse().unwrap(), 10).unwrap();
        assert_eq!(p.chain.len(), 5);
        assert!(p.chain.iter().all(|a| patch.status_of(a) == Some(TileStatus::Y)));
    }
}
