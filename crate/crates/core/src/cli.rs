//! Command-line front end: argument parsing, dispatch and exit codes.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::census::{census, line_sweep, CensusOptions, LineSweep};
use crate::error::{Error, Result};
use crate::geometry::{detect_configurations, QuarticSurface};
use crate::io::{lines_csv, load_model, load_surface, parse_place, LineRecord};
use crate::lattice::GramLattice;
use crate::pencil::ResidualPencil;
use crate::sample::{self, DEFAULT_SEED};
use crate::segre::{checked_divisibility_audit, line_dossier, segre_resultant};
use crate::tate::{enumerate_fiber_configs, tate_all_places, tate_classify, Preset};
use crate::verify;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "QUARTIC_LINES_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "quartic-lines", version, about = "Lines on quartic surfaces over binary fields")]
pub struct Cli {
    /// worker threads (default: all cores, or the QUARTIC_LINES_THREADS variable)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Line census over GF(q^m), m = 1..=ext
    Lines {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 4)]
        ext: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Per-line dossiers (kind, ramification, valency, R, audits)
    Classify {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 4)]
        ext: u32,
        #[arg(long)]
        line: Option<usize>,
        #[arg(long, default_value_t = 1)]
        fiber_ext: u32,
    },
    /// Singular fibers and ramification of the residual pencil of one line
    Fibers {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        line: usize,
        #[arg(long, default_value_t = 4)]
        ext: u32,
        #[arg(long, default_value_t = 1)]
        fiber_ext: u32,
    },
    /// Intersection graph summary and configuration case
    Graph {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 4)]
        ext: u32,
    },
    /// Rank and span discriminant of the line lattice
    Lattice {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 4)]
        ext: u32,
    },
    /// Full census report with smoothness certificate and audits
    Census {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 4)]
        ext: u32,
        #[arg(long, default_value_t = 6)]
        singular_ext: u32,
        #[arg(long, default_value_t = 1)]
        fiber_ext: u32,
    },
    /// Tate's algorithm at a place ("inf", "0x3", "0x3@4") or at all places
    Tate {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "all")]
        place: String,
    },
    /// Fiber configurations with at least the given number of fiber lines
    Configs {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 0)]
        min_lines: u32,
        #[arg(long)]
        budget: Option<u32>,
    },
    /// Divisibility audits on seeded random smooth quartics containing a line
    Audit {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        /// singular point search depth used to accept a sample as smooth
        #[arg(long, default_value_t = 2)]
        smooth_ext: u32,
    },
    /// Built-in verification target
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(verify::TARGETS))]
        id: String,
    },
}

/// Outcome of a command: the report text and whether its checks passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

fn json_out<T: Serialize>(v: &T, passed: bool) -> Result<Outcome> {
    Ok(Outcome { text: serde_json::to_string_pretty(v)? + "\n", passed })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_)
        | Error::Parse(_)
        | Error::Capability(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Degenerate(_)
        | Error::NotElliptic(_) => EXIT_INPUT,
        _ => EXIT_FAIL,
    }
}

fn thread_count(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok())).filter(|&n| n > 0)
}

fn lines_of(s: &QuarticSurface, ext: u32) -> Result<(LineSweep, serde_json::Value)> {
    let ls = line_sweep(s, ext)?;
    let meta = json!({ "surface": s.label(), "sweep": ls.sweep, "sufficient_ext": ls.sufficient_ext });
    Ok((ls, meta))
}

fn line_at(ls: &LineSweep, i: usize) -> Result<crate::geometry::Line> {
    ls.graph.lines.get(i).copied().ok_or_else(|| Error::Usage(format!("no line {i} among {}", ls.graph.len())))
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Lines { surface, ext, format } => {
            let s = load_surface(surface)?;
            let (ls, mut meta) = lines_of(&s, *ext)?;
            let graph = ls.graph;
            let records: Vec<LineRecord> = graph.lines.iter().enumerate().map(|(i, l)| LineRecord::of(i, l)).collect();
            match format {
                Format::Csv => Ok(Outcome { text: lines_csv(&records), passed: true }),
                Format::Json => {
                    meta["lines"] = serde_json::to_value(&records)?;
                    json_out(&meta, true)
                }
            }
        }
        Command::Classify { surface, ext, line, fiber_ext } => {
            let s = load_surface(surface)?;
            match line {
                None => {
                    let opts = CensusOptions { ext: *ext, fiber_ext: *fiber_ext, lattice: false, ..Default::default() };
                    let r = census(&s, &opts)?;
                    json_out(&json!({ "surface": r.surface, "dossiers": r.dossiers, "audits": r.audits }), r.passed())
                }
                Some(i) => {
                    let (ls, _) = lines_of(&s, *ext)?;
                    let l = line_at(&ls, *i)?;
                    let se = s.base_change(&ls.field)?;
                    let d = line_dossier(&se, &l, Some(ls.graph.valency(*i)), *fiber_ext)?;
                    let ok = d.valency_within_bounds();
                    json_out(&json!({ "surface": s.label(), "line-id": i, "dossier": d }), ok)
                }
            }
        }
        Command::Fibers { surface, line, ext, fiber_ext } => {
            let s = load_surface(surface)?;
            let (ls, _) = lines_of(&s, *ext)?;
            let l = line_at(&ls, *line)?;
            let se = s.base_change(&ls.field)?;
            let p = ResidualPencil::new(&se, &l)?;
            let fibers = p.singular_fibers(*fiber_ext)?;
            let ram = p.ramification().ok();
            let r = segre_resultant(&p)?;
            let audit = if r.is_empty() { None } else { Some(checked_divisibility_audit(&p, &r, ram.as_ref(), &fibers)) };
            let passed = !matches!(audit, Some(Err(_)));
            json_out(&json!({ "surface": s.label(), "line-id": line, "fibers": fibers, "ramification": ram }), passed)
        }
        Command::Graph { surface, ext } => {
            let s = load_surface(surface)?;
            let (ls, mut meta) = lines_of(&s, *ext)?;
            let graph = ls.graph;
            let conf = detect_configurations(&graph);
            meta["valencies"] = json!(graph.valencies());
            meta["adjacency"] = json!(graph
                .adjacency
                .iter()
                .map(|r| r.iter().map(|&b| b as u8).collect::<Vec<_>>())
                .collect::<Vec<_>>());
            meta["case"] = serde_json::to_value(conf.case)?;
            meta["triangles"] = json!(conf.triangles);
            meta["stars"] = json!(conf.stars);
            meta["squares"] = json!(conf.squares.len());
            json_out(&meta, true)
        }
        Command::Lattice { surface, ext } => {
            let s = load_surface(surface)?;
            let (ls, mut meta) = lines_of(&s, *ext)?;
            let inv = GramLattice::from_graph(&ls.graph).invariants()?;
            meta["lattice"] = serde_json::to_value(&inv)?;
            json_out(&meta, true)
        }
        Command::Census { surface, ext, singular_ext, fiber_ext } => {
            let s = load_surface(surface)?;
            let opts = CensusOptions { ext: *ext, singular_ext: *singular_ext, fiber_ext: *fiber_ext, ..Default::default() };
            let r = census(&s, &opts)?;
            json_out(&r, r.passed())
        }
        Command::Tate { model, place } => {
            let m = load_model(model)?;
            if place == "all" {
                json_out(&tate_all_places(&m)?, true)
            } else {
                let p = parse_place(m.field(), place)?;
                json_out(&tate_classify(&m, p)?, true)
            }
        }
        Command::Configs { preset, min_lines, budget } => {
            let mut p = Preset::by_name(preset)?;
            if let Some(b) = budget {
                p = p.with_budget(*b);
            }
            let rows = enumerate_fiber_configs(&p, *min_lines)?;
            let table: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| json!({ "configuration": r.label(), "lines": r.lines, "euler": r.euler, "line_bearing": r.line_bearing }))
                .collect();
            json_out(&json!({ "preset": p.name, "budget": p.budget, "min_lines": min_lines, "rows": table }), true)
        }
        Command::Audit { seed, count, degree, smooth_ext } => {
            let f = crate::field::Field::standard(*degree)?;
            let mut rng = sample::rng(*seed);
            let mut entries = Vec::new();
            let mut passed = true;
            for i in 0..*count {
                let (s, l) = sample::random_smooth_quartic_with_line(&f, *smooth_ext, &mut rng)?;
                let p = ResidualPencil::new(&s, &l)?;
                let r = segre_resultant(&p)?;
                if r.is_empty() {
                    entries.push(json!({ "sample": i, "kind": "second" }));
                    continue;
                }
                let fibers = p.singular_fibers(1)?;
                let ram = p.ramification().ok();
                match checked_divisibility_audit(&p, &r, ram.as_ref(), &fibers) {
                    Ok((records, bound)) => {
                        entries.push(json!({ "sample": i, "kind": "first", "audits": records, "valency_bound": bound }))
                    }
                    Err(e) => {
                        passed = false;
                        entries.push(json!({ "sample": i, "kind": "first", "error": e.to_string() }));
                    }
                }
            }
            json_out(&json!({ "seed": seed, "field_degree": degree, "samples": entries }), passed)
        }
        Command::Verify { id } => {
            let r = verify::run(id)?;
            json_out(&r, r.passed)
        }
    }
}

/// Parse arguments, run, write the report; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let result = match thread_count(cli.threads) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::Internal(e.to_string())),
        },
        None => execute(&cli.command),
    };
    match result {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &out.text).map_err(Error::from),
                None => stdout.write_all(out.text.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INPUT;
            }
            if out.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
