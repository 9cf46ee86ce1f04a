//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when verification finds violations, 2 on
//! usage, input or parse errors.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::decorate::{build_decorated, catalog, verify, BuildConfig, DecoratedPatch};
use crate::heptagrid::{grow_tree, write_patch, TileStatus};
use crate::isoclines::{isocline_of, Phase};
use crate::render::{render_schematic, render_svg, Layer, DEFAULT_RENDER_DEPTH};
use crate::triangles::{construct_generations, signals, trilateral, trilaterals_csv};
use crate::turing::{compile, parse_data, parse_tm, simulate_in_triangle, tiling_decision, Verdict, DEFAULT_MAX_GEN};

#[derive(Debug, Parser)]
#[command(name = "heptatile", version, about = "Heptagrid {7,3} tiling engine")]
pub struct Cli {
    /// Residue mod 8 of the green isoclines.
    #[arg(long, global = true, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..8))]
    pub phase: u8,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long = "max-gen", global = true)]
    pub max_gen: Option<u32>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated render layers: status, isoclines, marks, trilaterals, signals.
    #[arg(long, global = true, value_delimiter = ',')]
    pub layers: Option<Vec<String>>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow a Fibonacci tree patch.
    Patch {
        #[arg(long, default_value = "G")]
        apex: TileStatus,
        /// Fathers added above the apex, nearest first.
        #[arg(long, value_delimiter = ',')]
        up: Vec<TileStatus>,
    },
    /// Dump the trilaterals of the interwoven-triangles construction as CSV.
    Triangles {
        #[arg(long, default_value_t = 32)]
        length: u64,
    },
    /// Decorate a patch; writes the patch and its tileset.
    Decorate {
        #[command(flatten)]
        build: BuildArgs,
        /// Tileset file; defaults to `<out>.tileset`.
        #[arg(long)]
        tileset: Option<PathBuf>,
    },
    /// Distinct prototiles of a decorated patch with category counts.
    Catalog {
        #[command(flatten)]
        build: BuildArgs,
    },
    /// Check matching across every interior shared side.
    Verify { patch: PathBuf, tileset: PathBuf },
    /// Count and list the meta-tiles of a machine.
    CompileTm { tm: PathBuf, data: PathBuf },
    /// Run a machine inside the red triangle of one generation.
    Simulate {
        tm: PathBuf,
        data: PathBuf,
        #[arg(long, default_value_t = 3)]
        generation: u32,
    },
    /// Decide whether the machine's tiling gets blocked.
    Reduce { tm: PathBuf, data: PathBuf },
    /// Draw a decorated patch in the Poincaré disc as SVG.
    Render {
        #[command(flatten)]
        build: BuildArgs,
    },
    /// Draw the one-dimensional triangle construction as SVG.
    Schematic {
        #[arg(long, default_value_t = 32)]
        length: u64,
    },
}

#[derive(Debug, clap::Args)]
pub struct BuildArgs {
    #[arg(long, default_value = "R")]
    pub apex: TileStatus,
    /// Even abscissa of the wire's starting seed.
    #[arg(long, default_value_t = 0)]
    pub origin: i64,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

impl Cli {
    fn phase(&self) -> Phase {
        Phase::new(self.phase).expect("range checked by the parser")
    }

    fn build(&self, b: &BuildArgs, default_depth: usize) -> Result<DecoratedPatch, Failure> {
        let cfg = BuildConfig {
            apex: b.apex,
            depth: self.depth.unwrap_or(default_depth),
            max_gen: self.max_gen.unwrap_or(3),
            phase: self.phase(),
            origin: b.origin,
        };
        Ok(build_decorated(cfg)?.0)
    }
}

/// Run a parsed command line and return the exit code.
pub fn run(cli: &Cli) -> u8 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Patch { apex, up } => {
            let mut patch = grow_tree(*apex, cli.depth.unwrap_or(4));
            for &f in up {
                patch = patch.extend_upward(f)?;
            }
            let phase = cli.phase();
            let text = write_patch(&patch, |a| {
                let iso = isocline_of(&patch, a);
                format!("iso {} {}", iso.0, iso.colour(phase).name())
            });
            emit(&cli.out, &text)?;
        }
        Command::Triangles { length } => {
            let ts = construct_generations(cli.max_gen.unwrap_or(3), *length);
            emit(&cli.out, &trilaterals_csv(&ts))?;
        }
        Command::Decorate { build, tileset } => {
            let dp = cli.build(build, 6)?;
            emit(&cli.out, &dp.write_patch())?;
            let ts_path = tileset.clone().or_else(|| {
                cli.out.as_ref().map(|p| {
                    let mut s = p.as_os_str().to_owned();
                    s.push(".tileset");
                    PathBuf::from(s)
                })
            });
            emit(&ts_path, &dp.write_tileset())?;
        }
        Command::Catalog { build } => {
            let dp = cli.build(build, 8)?;
            let report = catalog(&dp);
            let mut text = report.reconciliation();
            for (i, e) in report.entries.iter().enumerate() {
                text += &format!(
                    "{:>6} {:<16} {}\n",
                    e.count,
                    e.category.name(),
                    e.prototile.serialize(i)
                );
            }
            emit(&cli.out, &text)?;
        }
        Command::Verify { patch, tileset } => {
            let dp = DecoratedPatch::from_files(&read(patch)?, &read(tileset)?)?;
            let violations = verify(&dp);
            let mut text = String::new();
            for v in &violations {
                text += &format!("{v}\n");
            }
            if violations.is_empty() {
                text += "OK\n";
            } else {
                text += &format!("{} violations\n", violations.len());
            }
            emit(&cli.out, &text)?;
            return Ok(u8::from(!violations.is_empty()));
        }
        Command::CompileTm { tm, data } => {
            let tm = parse_tm(&read(tm)?)?;
            let data = parse_data(&tm, &read(data)?)?;
            let report = compile(&tm, &data);
            let mut text = report.summary();
            for m in &report.metas {
                text += &format!("meta {:>2} {:<16} {}\n", m.shape, m.role.name(), m.label);
            }
            emit(&cli.out, &text)?;
        }
        Command::Simulate { tm, data, generation } => {
            let tm = parse_tm(&read(tm)?)?;
            let data = parse_data(&tm, &read(data)?)?;
            let host = trilateral(*generation, 0);
            let out = simulate_in_triangle(&tm, &data, &host)?;
            let mut text = String::from("row,column,state,read,written,move\n");
            for s in &out.trace {
                text += &format!(
                    "{},{},{},{},{},{}\n",
                    s.row, s.column, tm.states[s.state], tm.letters[s.read], tm.letters[s.written], s.mv
                );
            }
            text += &match out.verdict {
                Verdict::Halted(k) => format!("HALTED steps={k}\n"),
                Verdict::Truncated(r) => format!("TRUNCATED {r:?}\n"),
            };
            emit(&cli.out, &text)?;
        }
        Command::Reduce { tm, data } => {
            let tm = parse_tm(&read(tm)?)?;
            let data = parse_data(&tm, &read(data)?)?;
            let d = tiling_decision(&tm, &data, cli.max_gen.unwrap_or(DEFAULT_MAX_GEN));
            emit(&cli.out, &format!("{d}\n"))?;
        }
        Command::Render { build } => {
            let layers: BTreeSet<Layer> = match &cli.layers {
                None => Layer::ALL.into_iter().collect(),
                Some(names) => names
                    .iter()
                    .filter(|n| !n.is_empty())
                    .map(|n| Layer::parse(n).ok_or_else(|| Failure(format!("unknown layer `{n}`"))))
                    .collect::<Result<_, _>>()?,
            };
            let dp = cli.build(build, 5)?;
            let svg = render_svg(&dp, &layers, DEFAULT_RENDER_DEPTH.max(dp.patch().depth()))?;
            emit(&cli.out, &svg)?;
        }
        Command::Schematic { length } => {
            let ts = construct_generations(cli.max_gen.unwrap_or(4), *length);
            let sl = signals(&ts, *length);
            emit(&cli.out, &render_schematic(&ts, &sl))?;
        }
    }
    Ok(0)
}

/// Parse `std::env::args`, run, and map the result to an exit code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&cli))
}
