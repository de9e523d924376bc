//! Command-line front end. `run` parses arguments, dispatches, and returns
//! the process exit code: 0 on success, 1 on a domain error, 2 on a usage
//! error.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify;
use crate::codec::{parse_intersigned, parse_link, parse_signed, parse_word, AnyCode, CodeKind, GaussWord, Sign};
use crate::error::{Error, Result};
use crate::isomorphism;
use crate::moves::{self, MoveInstance};
use crate::oracle;
use crate::topology;

/// One line of `--json` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<String>,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_agrees: Option<bool>,
}

#[derive(Parser, Debug)]
#[command(name = "gausslab", version, about = "Intersigned Gauss codes: surfaces, colorings, isomorphism and moves")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Print one JSON report per line instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Read further inputs from a file, one per line ('#' starts a comment).
    #[arg(long, global = true, value_name = "PATH")]
    file: Option<String>,
    /// Cross-check against the brute-force oracles.
    #[arg(long, global = true)]
    oracle: bool,
    /// Worker threads for per-input work.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Rotation / generator seed (defaults to GAUSSLAB_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that codes parse and satisfy double occurrence.
    Validate {
        codes: Vec<String>,
        #[arg(long, value_enum)]
        kind: Option<InputKind>,
    },
    /// Canonical form of each code.
    Canon {
        codes: Vec<String>,
        /// Use the oriented group (no component reversal).
        #[arg(long)]
        oriented: bool,
    },
    /// Decide whether two codes are isomorphic.
    Iso {
        a: String,
        b: String,
        #[arg(long)]
        oriented: bool,
    },
    /// Surface, orientability and two-colorability of intersigned codes.
    Classify { codes: Vec<String> },
    /// Two-colorability of intersigned codes.
    TwoColor { codes: Vec<String> },
    /// Interlacement graph of a one-component word.
    Interlace { words: Vec<String> },
    /// Whether some sign sequence realizes the word on the sphere.
    Planar { words: Vec<String> },
    /// Every surface realized by sign sequences on the word.
    Spectrum {
        words: Vec<String>,
        #[arg(long, default_value_t = classify::DEFAULT_SPECTRUM_BOUND)]
        bound: usize,
    },
    /// Signed (Carter) code to intersigned code.
    ConvertSigned { codes: Vec<String> },
    /// Intersigned code plus writhes to link code, or back with --inverse.
    Complement {
        code: String,
        /// Writhes as "+-+" for symbols 1..n, or "1:+,2:-".
        #[arg(long)]
        writhes: Option<String>,
        #[arg(long)]
        inverse: bool,
    },
    /// Reidemeister moves on link codes.
    Moves {
        #[command(subcommand)]
        action: MovesAction,
    },
    /// Random codes.
    Random {
        #[arg(long, value_enum, default_value_t = InputKind::Intersigned)]
        kind: InputKind,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        components: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MovesAction {
    /// Every move instance that applies.
    List { code: String },
    /// Apply a move given by list index or as a JSON instance.
    Apply {
        code: String,
        #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
        index: Option<usize>,
        #[arg(long)]
        instance: Option<String>,
    },
    /// Bounded search for a move path between two codes.
    Search {
        a: String,
        b: String,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        /// Defaults to the larger crossing count plus 4.
        #[arg(long)]
        max_crossings: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InputKind {
    Intersigned,
    Signed,
    Link,
    Word,
}

struct Out {
    report: Report,
    text: String,
}

fn report(command: &str, input: &str, canonical: Option<String>, result: Value, text: String) -> Out {
    let report = Report { command: command.into(), input: input.into(), canonical, result, oracle_agrees: None };
    Out { report, text }
}

fn bits(c: &crate::gf2::BitVec) -> String {
    c.to_string()
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn canon_intersigned(code: &crate::IntersignedGaussCode) -> Option<String> {
    Some(isomorphism::canonical_intersigned(code, false).text)
}

fn classify_one(input: &str, seed: u64, check: bool) -> Result<Out> {
    let code = parse_intersigned(input)?;
    let scheme = topology::scheme_from_code(&code, seed);
    let surface = topology::trace_faces(&scheme)?;
    let o = classify::orientability_with_seed(&code, seed);
    let t = classify::two_colorability(&code);
    let text = format!("{code}: {surface}, {}", if t.two_colorable { "two-colorable" } else { "not two-colorable" });
    let result = json!({
        "surface": surface,
        "orientable": o.orientable,
        "w1": bits(&o.w1_rep.0),
        "orientation_witness": o.witness.as_ref().map(|w| bits(&w.0)),
        "two_colorable": t.two_colorable,
        "dual": bits(&t.dual_rep.0),
        "coloring_witness": t.witness.as_ref().map(|w| bits(&w.0)),
    });
    let mut out = report("classify", input, canon_intersigned(&code), result, text);
    if check {
        let agrees = oracle::face_trace_orientable(&scheme) == o.orientable
            && surface.orientable == o.orientable
            && classify::two_color_oracle(&scheme) == t.two_colorable;
        out.report.oracle_agrees = Some(agrees);
        out.text.push_str(if agrees { " [oracle agrees]" } else { " [ORACLE DISAGREES]" });
    }
    Ok(out)
}

fn two_color_one(input: &str, seed: u64, check: bool) -> Result<Out> {
    let code = parse_intersigned(input)?;
    let t = classify::two_colorability(&code);
    let text = (if t.two_colorable { "two-colorable" } else { "not two-colorable" }).to_string();
    let result = json!({
        "two_colorable": t.two_colorable,
        "dual": bits(&t.dual_rep.0),
        "witness": t.witness.as_ref().map(|w| bits(&w.0)),
    });
    let mut out = report("two-color", input, canon_intersigned(&code), result, text);
    if check {
        let agrees = classify::two_color_oracle(&topology::scheme_from_code(&code, seed)) == t.two_colorable;
        out.report.oracle_agrees = Some(agrees);
        out.text.push_str(if agrees { " [oracle agrees]" } else { " [ORACLE DISAGREES]" });
    }
    Ok(out)
}

fn validate_one(input: &str, kind: Option<InputKind>) -> Result<Out> {
    if kind == Some(InputKind::Word) {
        let w = parse_word(input)?;
        return Ok(report(
            "validate",
            input,
            None,
            json!({"kind": "word", "code": w.components()}),
            format!("valid word {w}"),
        ));
    }
    let code = match kind {
        None => AnyCode::detect(input)?,
        Some(InputKind::Intersigned) => AnyCode::parse(CodeKind::Intersigned, input)?,
        Some(InputKind::Signed) => AnyCode::parse(CodeKind::Signed, input)?,
        Some(_) => AnyCode::parse(CodeKind::Link, input)?,
    };
    let canonical = Some(isomorphism::canonical(&code, false).text);
    let text = format!("valid {} {code}", code.kind());
    Ok(report("validate", input, canonical, json!({"kind": code.kind(), "code": code.to_json()}), text))
}

fn canon_one(input: &str, oriented: bool) -> Result<Out> {
    let code = AnyCode::detect(input)?;
    let c = isomorphism::canonical(&code, oriented);
    let result = json!({"kind": c.kind, "oriented": c.oriented, "canonical": c.text});
    Ok(report("canon", input, Some(c.text.clone()), result, c.text))
}

fn word_one(input: &str) -> Result<GaussWord> {
    parse_word(input)
}

fn interlace_one(input: &str) -> Result<Out> {
    let w = word_one(input)?;
    let g = classify::interlacement(&w)?;
    let even = classify::lins_orientable_criterion(&w)?;
    let edges: Vec<String> = g.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    let degrees: Vec<String> = g.degrees().iter().map(|(v, d)| format!("{v}:{d}")).collect();
    let text = format!("edges [{}] degrees [{}] even-valent: {}", edges.join(" "), degrees.join(" "), yes(even));
    let result = json!({"graph": g, "degrees": g.degrees(), "even_valent": even});
    Ok(report("interlace", input, None, result, text))
}

fn planar_one(input: &str) -> Result<Out> {
    let w = word_one(input)?;
    let planar = classify::is_planar(&w)?;
    let text = (if planar { "planar" } else { "non-planar" }).to_string();
    Ok(report("planar", input, None, json!({"planar": planar}), text))
}

fn spectrum_one(input: &str, bound: usize) -> Result<Out> {
    let w = word_one(input)?;
    let reals = classify::realizations(&w, bound)?;
    let mut counts: BTreeMap<topology::SurfaceSummary, usize> = BTreeMap::new();
    for r in &reals {
        *counts.entry(r.surface.clone()).or_default() += 1;
    }
    let text = counts.iter().map(|(s, k)| format!("{k:>6}  {s}")).collect::<Vec<_>>().join("\n");
    let result = json!({
        "spectrum": counts.iter().map(|(s, k)| json!({"surface": s, "realizations": k})).collect::<Vec<_>>(),
        "realizations": reals,
    });
    Ok(report("spectrum", input, None, result, text))
}

fn convert_one(input: &str) -> Result<Out> {
    let s = parse_signed(input)?;
    let code = classify::from_signed(&s);
    let text = code.to_string();
    Ok(report("convert-signed", input, canon_intersigned(&code), json!({"code": code.to_json()}), text))
}

fn parse_writhes(spec: &str, n: usize) -> Result<BTreeMap<u32, Sign>> {
    let sign = |c: &str| match c {
        "+" => Ok(Sign::Plus),
        "-" | "\u{2212}" => Ok(Sign::Minus),
        other => Err(Error::Validation(format!("bad writhe '{other}'"))),
    };
    if spec.contains(':') {
        spec.split(',')
            .map(|pair| {
                let (s, w) = pair.split_once(':').ok_or_else(|| Error::Validation(format!("bad writhe '{pair}'")))?;
                let s = s.trim().parse::<u32>().map_err(|_| Error::Validation(format!("bad symbol '{s}'")))?;
                Ok((s, sign(w.trim())?))
            })
            .collect()
    } else {
        let chars: Vec<String> = spec.chars().map(String::from).collect();
        if chars.len() > n {
            return Err(Error::Validation(format!("{} writhes for {n} symbols", chars.len())));
        }
        chars.iter().enumerate().map(|(i, c)| Ok((i as u32 + 1, sign(c)?))).collect()
    }
}

fn complement_cmd(input: &str, writhes: Option<&str>, inverse: bool) -> Result<Out> {
    if inverse {
        let link = parse_link(input)?;
        let (code, w) = moves::uncomplement(&link)?;
        let ws: String = w.values().map(|s| s.as_char()).collect();
        let text = format!("{code} writhes {ws}");
        return Ok(report(
            "complement",
            input,
            canon_intersigned(&code),
            json!({"code": code.to_json(), "writhes": w}),
            text,
        ));
    }
    let code = parse_intersigned(input)?;
    let w = parse_writhes(writhes.unwrap_or(""), code.n())?;
    let link = moves::complement(&code, &w)?;
    let canonical = Some(isomorphism::canonical_link(&link).text);
    Ok(report("complement", input, canonical, json!({"code": link.to_json()}), link.to_string()))
}

fn moves_cmd(action: &MovesAction) -> Result<Out> {
    match action {
        MovesAction::List { code } => {
            let link = parse_link(code)?;
            let list = moves::enumerate_moves(&link);
            let mut lines = Vec::new();
            for (i, m) in list.iter().enumerate() {
                lines.push(format!("{i:>4}  {m}  ->  {}", moves::apply_move(&link, m)?));
            }
            let canonical = Some(isomorphism::canonical_link(&link).text);
            Ok(report("moves list", code, canonical, json!({"moves": list}), lines.join("\n")))
        }
        MovesAction::Apply { code, index, instance } => {
            let link = parse_link(code)?;
            let m: MoveInstance = match (index, instance) {
                (Some(i), _) => {
                    let list = moves::enumerate_moves(&link);
                    let count = list.len();
                    list.into_iter().nth(*i).ok_or(Error::IndexOutOfRange { index: *i, count })?
                }
                (None, Some(j)) => serde_json::from_str(j).map_err(|e| Error::InvalidInstance(e.to_string()))?,
                (None, None) => return Err(Error::InvalidInstance("no move given".into())),
            };
            let (next, inv) = moves::apply_with_inverse(&link, &m)?;
            let canonical = Some(isomorphism::canonical_link(&next).text);
            let result = json!({"move": m, "result": next.to_json(), "inverse": inv});
            Ok(report("moves apply", code, canonical, result, next.to_string()))
        }
        MovesAction::Search { a, b, max_depth, max_crossings } => {
            let (x, y) = (parse_link(a)?, parse_link(b)?);
            let cap = max_crossings.unwrap_or(x.n().max(y.n()) + 4);
            let path = moves::reidemeister_equivalent(&x, &y, *max_depth, cap);
            let text = match &path {
                Some(p) => {
                    let mut lines = vec![format!("path of length {}", p.len())];
                    lines.extend(p.iter().map(|s| format!("  {}  --{}-->  {}", s.before, s.step, s.after)));
                    lines.join("\n")
                }
                None => format!("no path within depth {max_depth} and {cap} crossings"),
            };
            let moves: Option<Vec<&MoveInstance>> = path.as_ref().map(|p| p.iter().map(|s| &s.step).collect());
            let result = json!({"found": path.is_some(), "moves": moves, "path": path, "max_depth": max_depth, "max_crossings": cap});
            Ok(report("moves search", &format!("{a} {b}"), None, result, text))
        }
    }
}

fn random_cmd(kind: InputKind, n: usize, components: usize, count: usize, seed: u64) -> Result<Vec<Out>> {
    if n == 0 && kind != InputKind::Link {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    Ok((0..count as u64)
        .map(|i| {
            let s = seed.wrapping_add(i);
            let (text, value) = match kind {
                InputKind::Intersigned => {
                    let c = oracle::random_code(n, components, s);
                    (c.to_string(), serde_json::to_value(c.to_json()))
                }
                InputKind::Signed => {
                    let c = oracle::random_signed(n, components, s);
                    (c.to_string(), serde_json::to_value(c.to_json()))
                }
                InputKind::Link => {
                    let c = oracle::random_link(n, components, 0, s);
                    (c.to_string(), serde_json::to_value(c.to_json()))
                }
                InputKind::Word => {
                    let c = oracle::random_code(n, components, s).word();
                    (c.to_string(), Ok(json!(c.components())))
                }
            };
            report("random", &s.to_string(), None, json!({"code": value.expect("code JSON serializes")}), text)
        })
        .collect())
}

fn read_inputs(args: &[String], file: Option<&str>) -> Result<Vec<String>> {
    let mut inputs = args.to_vec();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {path}: {e}")))?;
        inputs.extend(
            text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()).map(String::from),
        );
    }
    Ok(inputs)
}

// Sequential unless --jobs asked for a pool; order is kept either way.
fn each(inputs: Vec<String>, parallel: bool, f: impl Fn(&str) -> Result<Out> + Sync) -> Vec<Result<Out>> {
    if parallel {
        inputs.par_iter().map(|s| f(s)).collect()
    } else {
        inputs.iter().map(|s| f(s)).collect()
    }
}

fn dispatch(cli: &Cli, seed: u64) -> Result<Vec<Result<Out>>> {
    let g = &cli.global;
    let file = g.file.as_deref();
    let par = g.jobs.is_some();
    Ok(match &cli.command {
        Command::Validate { codes, kind } => each(read_inputs(codes, file)?, par, |s| validate_one(s, *kind)),
        Command::Canon { codes, oriented } => each(read_inputs(codes, file)?, par, |s| canon_one(s, *oriented)),
        Command::Iso { a, b, oriented } => {
            let (x, y) = (AnyCode::detect(a)?, AnyCode::detect(b)?);
            let same = isomorphism::is_isomorphic(&x, &y, *oriented)?;
            let text = (if same { "isomorphic" } else { "not isomorphic" }).to_string();
            let canonical = Some(isomorphism::canonical(&x, *oriented).text);
            let result = json!({"isomorphic": same, "oriented": oriented, "canonical_b": isomorphism::canonical(&y, *oriented).text});
            let mut out = report("iso", &format!("{a} {b}"), canonical, result, text);
            if g.oracle {
                let orbit = oracle::orbit_enumerate(&x, *oriented)?;
                let agrees = orbit.contains(&y.to_string()) == same;
                out.report.oracle_agrees = Some(agrees);
                out.text.push_str(if agrees { " [oracle agrees]" } else { " [ORACLE DISAGREES]" });
            }
            vec![Ok(out)]
        }
        Command::Classify { codes } => each(read_inputs(codes, file)?, par, |s| classify_one(s, seed, g.oracle)),
        Command::TwoColor { codes } => each(read_inputs(codes, file)?, par, |s| two_color_one(s, seed, g.oracle)),
        Command::Interlace { words } => each(read_inputs(words, file)?, par, interlace_one),
        Command::Planar { words } => each(read_inputs(words, file)?, par, planar_one),
        Command::Spectrum { words, bound } => each(read_inputs(words, file)?, par, |s| spectrum_one(s, *bound)),
        Command::ConvertSigned { codes } => each(read_inputs(codes, file)?, par, convert_one),
        Command::Complement { code, writhes, inverse } => vec![complement_cmd(code, writhes.as_deref(), *inverse)],
        Command::Moves { action } => vec![moves_cmd(action)],
        Command::Random { kind, n, components, count } => {
            random_cmd(*kind, *n, *components, *count, seed)?.into_iter().map(Ok).collect()
        }
    })
}

/// Runs the CLI on `args` (including the program name), writing to the
/// given streams.
pub fn run_with(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    if let Some(n) = cli.global.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let seed = cli
        .global
        .seed
        .or_else(|| std::env::var("GAUSSLAB_SEED").ok().and_then(|s| s.trim().parse().ok()))
        .unwrap_or(0);
    let results = match dispatch(&cli, seed) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    if results.is_empty() {
        let _ = writeln!(err, "error: no input given");
        return 2;
    }
    let mut status = 0;
    for r in results {
        match r {
            Ok(o) if cli.global.json => {
                let _ = writeln!(out, "{}", serde_json::to_string(&o.report).expect("report serializes"));
            }
            Ok(o) => {
                let _ = writeln!(out, "{}", o.text);
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                status = 1;
            }
        }
    }
    status
}

pub fn run(args: Vec<String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
