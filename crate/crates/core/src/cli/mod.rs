//! Command-line front end: instance parsing, the five commands, reports and
//! DOT output.

mod instance;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::cyclic_quotient::{
    gorenstein_index, is_corollary43_type, resolve, CyclicQuotientType, ResolutionChain,
};
use crate::error::{Error, Result};
use crate::flip_engine::{
    curve_self_intersection, curve_witness, default_max_steps, excess_e, exclusion_sweep, k_dot_c,
    monte_carlo, post_blowup_k_dot_c, random_state, run_sequence, CurveCase, CurveConfig,
    FlipState, RandomStateParams,
};
use crate::numbers::Rat;
use crate::terminal3fold::{standard_blowup, surface_germ_types, TerminalPoint};

pub use instance::{parse_instance, serialize, FlipStateInput, Instance};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "mmp",
    version,
    about = "Exact computations for semistable threefold flips"
)]
struct Cli {
    /// Emit JSON instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal resolution of a quotient germ.
    Resolve {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Also write the dual graph in DOT format.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Invariants of a quotient germ, terminal point or curve configuration.
    Classify {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
    /// Standard weighted blowup of a terminal point.
    Blowup {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
    /// Run flips to termination, from a file or from random seeded states.
    FlipRun {
        #[arg(long, value_name = "FILE", conflicts_with = "seed")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
        /// Number of random states (with --seed).
        #[arg(long, value_name = "N", default_value_t = 1, requires = "seed")]
        count: u64,
        #[arg(long, value_name = "N")]
        max_steps: Option<usize>,
    },
    /// Sweep the interior-meeting configurations.
    Exclusion {
        #[arg(long, value_name = "N", default_value_t = 50)]
        lmax: u32,
    },
}

/// Header, body and a one-line summary with exact fractions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub command: &'static str,
    pub digest: String,
    pub body: Vec<String>,
    pub summary: String,
    pub data: Value,
}

impl Report {
    fn new(command: &'static str, digest_input: &[u8]) -> Self {
        Report {
            command,
            digest: hex::encode(Sha256::digest(digest_input)),
            body: Vec::new(),
            summary: String::new(),
            data: Value::Object(Map::new()),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.body.push(s.into());
    }

    fn set(&mut self, key: &str, value: Value) {
        if let Value::Object(m) = &mut self.data {
            m.insert(key.to_string(), value);
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "# mmp {VERSION} input-sha256={}\n# command={}\n",
            self.digest, self.command
        );
        for l in &self.body {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str("# summary ");
        out.push_str(&self.summary);
        out.push('\n');
        out
    }

    pub fn render_json(&self) -> String {
        let v = json!({
            "tool": "mmp",
            "version": VERSION,
            "input_sha256": self.digest,
            "command": self.command,
            "result": self.data,
            "summary": self.summary,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
        s.push('\n');
        s
    }
}

fn s<T: ToString>(x: T) -> Value {
    Value::String(x.to_string())
}

/// DOT dual graph of a resolution chain.
pub fn emit_dot(chain: &ResolutionChain) -> String {
    let mut out = String::from("digraph resolution {\n");
    out.push_str(&format!("  // germ {}\n", chain.germ));
    if chain.is_empty() {
        out.push_str("  // empty chain: the germ is smooth\n");
    }
    for (j, (b, a)) in chain.entries().iter().zip(&chain.discrepancies).enumerate() {
        out.push_str(&format!(
            "  F{0} [label=\"F{0} (-{1})\", discrepancy=\"{2}\"];\n",
            j + 1,
            b,
            a
        ));
    }
    for j in 1..chain.len() {
        out.push_str(&format!("  F{} -> F{} [dir=none];\n", j, j + 1));
    }
    out.push_str("}\n");
    out
}

fn read_instance(path: &Path) -> Result<(Vec<u8>, Instance)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse {
        line: 0,
        column: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Parse {
        line: 0,
        column: 0,
        message: format!("{} is not UTF-8", path.display()),
    })?;
    Ok((bytes, parse_instance(&text)?))
}

fn wrong_kind(expected: &str, got: &Instance) -> Error {
    Error::Parse {
        line: 1,
        column: 1,
        message: format!("expected kind {expected}, found {}", got.kind()),
    }
}

pub fn cmd_resolve(bytes: &[u8], inst: &Instance) -> Result<(Report, String)> {
    let Instance::Quotient(t) = inst else {
        return Err(wrong_kind("quotient", inst));
    };
    let res = resolve(t)?;
    let mut r = Report::new("resolve", bytes);
    r.line(format!("germ {t}"));
    r.line(format!(
        "chain {}",
        res.self_intersections
            .as_ref()
            .map_or_else(|| "[]".to_string(), ToString::to_string)
    ));
    for (j, (b, a)) in res.entries().iter().zip(&res.discrepancies).enumerate() {
        r.line(format!(
            "F{} self_intersection=-{} discrepancy={}",
            j + 1,
            b,
            a
        ));
    }
    let total: Rat = res.discrepancies.iter().sum();
    let min = res
        .discrepancies
        .iter()
        .min()
        .cloned()
        .unwrap_or_else(Rat::zero);
    r.set("germ", s(t));
    r.set("chain", Value::Array(res.entries().iter().map(s).collect()));
    r.set(
        "discrepancies",
        Value::Array(res.discrepancies.iter().map(s).collect()),
    );
    r.summary = format!(
        "length={} discrepancy_sum={total} min_discrepancy={min}",
        res.len()
    );
    Ok((r, emit_dot(&res)))
}

fn classify_quotient(r: &mut Report, t: &CyclicQuotientType) -> Result<()> {
    let idx = gorenstein_index(t);
    let family = is_corollary43_type(t);
    let res = resolve(t)?;
    r.line(format!("germ {t}"));
    r.line(format!("gorenstein_index {idx}"));
    r.line(format!("rdp {}", t.is_rdp()));
    r.line(format!(
        "family {}",
        family
            .as_ref()
            .map_or_else(|| "-".to_string(), ToString::to_string)
    ));
    let end = res.discrepancies.first().cloned().unwrap_or_else(Rat::zero);
    r.set("germ", s(t));
    r.set("gorenstein_index", s(&idx));
    r.set(
        "family",
        family.as_ref().map_or(
            Value::Null,
            |f| json!({"h": s(&f.h), "r": s(&f.r), "b": s(&f.b)}),
        ),
    );
    r.summary = format!("gorenstein_index={idx} end_discrepancy={end}");
    Ok(())
}

fn classify_point(r: &mut Report, p: &TerminalPoint) -> Result<()> {
    let st = p.simple_type();
    r.line(format!("point r={} a={} g={}", p.r(), p.a(), p.g()));
    r.line(format!("index {}", p.index()));
    let n = p.axial_multiplicity();
    r.line(format!(
        "axial_multiplicity {}",
        n.as_ref()
            .map_or_else(|_| "inf".to_string(), ToString::to_string)
    ));
    r.line(format!("simple {}", st.is_simple));
    r.line(format!(
        "h {}",
        st.h.map_or_else(|| "-".to_string(), |h| h.to_string())
    ));
    r.line(format!("f_weight {}", p.f_weight()));
    let off = surface_germ_types(p, false).ok();
    let on = surface_germ_types(p, true)?;
    r.line(format!(
        "surface_germ_off_double_curve {}",
        off.as_ref()
            .map_or_else(|| "-".to_string(), ToString::to_string)
    ));
    r.line(format!("surface_germ_on_double_curve {on}"));
    r.set("index", s(p.index()));
    r.set("simple", Value::Bool(st.is_simple));
    r.set("f_weight", s(p.f_weight()));
    r.set("surface_germ_on_double_curve", s(&on));
    r.summary = format!("index={} f_weight={}", p.index(), p.f_weight());
    Ok(())
}

fn classify_curve(r: &mut Report, cfg: &CurveConfig) -> Result<()> {
    r.line(format!("case {}", cfg.case()));
    if let Some(b) = cfg.boundary() {
        r.line(format!("boundary {b}"));
    }
    for p in cfg.points() {
        r.line(format!("point {p}"));
    }
    r.set("case", s(cfg.case()));
    if cfg.case() == CurveCase::DoubleCurve {
        let post = post_blowup_k_dot_c(cfg)?;
        r.line(format!(
            "post_blowup_k_dot_c {} branch={:?}",
            post.k_dot_c, post.branch
        ));
        r.set("post_blowup_k_dot_c", s(&post.k_dot_c));
        r.summary = format!("post_blowup_k_dot_c={}", post.k_dot_c);
        return Ok(());
    }
    let c2 = curve_self_intersection(cfg)?;
    let k = k_dot_c(cfg)?;
    r.line(format!("self_intersection {c2}"));
    r.line(format!("k_dot_c {k}"));
    r.set("self_intersection", s(&c2));
    r.set("k_dot_c", s(&k));
    if let Ok(e) = excess_e(cfg) {
        r.line(format!("e {e}"));
        r.set("e", s(&e));
    }
    if let Ok(w) = curve_witness(cfg) {
        r.line(format!("a1 {} c1 {}", w.a1, w.c1));
    }
    let post = if k.is_negative() {
        match post_blowup_k_dot_c(cfg) {
            Ok(p) => Some(p),
            Err(Error::ExcludedSubcase) => {
                r.line("post_blowup excluded");
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        r.line("post_blowup - (not flipping)");
        None
    };
    match post {
        Some(p) => {
            r.line(format!(
                "post_blowup_k_dot_c {} branch={:?} new_germ={}",
                p.k_dot_c, p.branch, p.new_germ
            ));
            r.set("post_blowup_k_dot_c", s(&p.k_dot_c));
            r.set("new_germ", s(&p.new_germ));
            r.summary = format!(
                "self_intersection={c2} k_dot_c={k} post_blowup_k_dot_c={}",
                p.k_dot_c
            );
        }
        None => r.summary = format!("self_intersection={c2} k_dot_c={k}"),
    }
    Ok(())
}

pub fn cmd_classify(bytes: &[u8], inst: &Instance) -> Result<Report> {
    let mut r = Report::new("classify", bytes);
    r.set("kind", s(inst.kind()));
    match inst {
        Instance::Quotient(t) => classify_quotient(&mut r, t)?,
        Instance::TerminalPoint(p) => classify_point(&mut r, p)?,
        Instance::CurveConfig(cfg) => classify_curve(&mut r, cfg)?,
        Instance::FlipState(_) => {
            return Err(wrong_kind("quotient, terminal_point or curve_config", inst))
        }
    }
    Ok(r)
}

pub fn cmd_blowup(bytes: &[u8], inst: &Instance) -> Result<Report> {
    let Instance::TerminalPoint(p) = inst else {
        return Err(wrong_kind("terminal_point", inst));
    };
    let res = standard_blowup(p)?;
    let mut r = Report::new("blowup", bytes);
    r.line(format!("point r={} a={} g={}", p.r(), p.a(), p.g()));
    r.line(format!(
        "weights {}",
        p.blowup_weights().map(|w| w.to_string()).join(" ")
    ));
    r.line(format!("discrepancy {}", res.discrepancy));
    let mut children = Vec::new();
    for c in &res.children {
        let n = c.point.axial_multiplicity()?;
        r.line(format!(
            "child chart={} r={} a={} n={} g={}",
            c.chart,
            c.point.r(),
            c.point.a(),
            n,
            c.point.g()
        ));
        children.push(json!({
            "chart": c.chart.to_string(),
            "r": s(c.point.r()),
            "a": s(c.point.a()),
            "n": s(n),
        }));
    }
    r.set("discrepancy", s(&res.discrepancy));
    r.set("children", Value::Array(children));
    r.summary = format!(
        "discrepancy={} children={}",
        res.discrepancy,
        res.children.len()
    );
    Ok(r)
}

fn run_state(r: &mut Report, state: &FlipState, max_steps: Option<usize>) -> Result<()> {
    let budget = max_steps.unwrap_or_else(|| default_max_steps(state));
    r.line(format!(
        "initial {} measure={}",
        state.describe(),
        state.measure()
    ));
    let out = run_sequence(state, budget)?;
    let mut steps = Vec::new();
    for step in out.trace() {
        r.line(step.to_string());
        steps.push(s(step));
    }
    let total: Rat = out.trace().iter().map(|s| &s.kc_post).sum();
    r.line(format!("end {} measure={}", out.end, out.state.measure()));
    r.set("initial", s(state.describe()));
    r.set("trace", Value::Array(steps));
    r.set("end", s(out.end));
    r.summary = format!(
        "flips={} flops={} final_measure={} kc_post_total={total}",
        out.flips(),
        out.flops(),
        out.state.measure()
    );
    Ok(())
}

pub fn cmd_flip_run_instance(
    bytes: &[u8],
    inst: &Instance,
    max_steps: Option<usize>,
) -> Result<Report> {
    let Instance::FlipState(input) = inst else {
        return Err(wrong_kind("flip_state", inst));
    };
    let state = input.build()?;
    let mut r = Report::new("flip-run", bytes);
    run_state(&mut r, &state, max_steps)?;
    Ok(r)
}

pub fn cmd_flip_run_random(seed: u64, count: u64, max_steps: Option<usize>) -> Result<Report> {
    let params = RandomStateParams::default();
    let digest = format!("flip-run seed={seed} count={count} max-steps={max_steps:?}");
    let mut r = Report::new("flip-run", digest.as_bytes());
    if count == 0 {
        return Err(Error::InvalidConfig("--count must be positive".into()));
    }
    if count == 1 {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let state = random_state(&mut rng, &params);
        run_state(&mut r, &state, max_steps)?;
        return Ok(r);
    }
    if max_steps.is_some() {
        return Err(Error::InvalidConfig(
            "--max-steps applies to single runs".into(),
        ));
    }
    let runs = monte_carlo(seed, count, &params)?;
    let flips: usize = runs.iter().map(|x| x.flips).sum();
    let flops: usize = runs.iter().map(|x| x.flops).sum();
    for run in &runs {
        r.line(run.to_string());
    }
    r.set("runs", Value::Array(runs.iter().map(s).collect()));
    let mean = Rat::new(flips as i64, count as i64);
    r.summary = format!("runs={count} flips={flips} flops={flops} mean_flips={mean}");
    Ok(r)
}

pub fn cmd_exclusion(lmax: u32) -> Result<Report> {
    let report = exclusion_sweep(lmax)?;
    let mut r = Report::new("exclusion", format!("exclusion lmax={lmax}").as_bytes());
    for l in report.render().lines() {
        r.line(l);
    }
    let survivors = report.survivors();
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|row| {
            json!({
                "case": row.case,
                "ell": row.ell.map_or(Value::Null, s),
                "filter": row.passes_filter,
                "k_dot_c": row.k_dot_c.as_ref().map_or(Value::Null, s),
                "verdict": row.verdict.to_string(),
            })
        })
        .collect();
    r.set("rows", Value::Array(rows));
    let list: Vec<String> = survivors
        .iter()
        .map(|(c, l, k)| format!("{c}:{l}:{k}"))
        .collect();
    r.summary = format!(
        "rows={} survivors={} all_excluded={}",
        report.rows.len(),
        list.join(","),
        report.all_excluded()
    );
    Ok(r)
}

fn dispatch(cli: &Cli) -> Result<(Report, Option<(PathBuf, String)>)> {
    match &cli.command {
        Command::Resolve { input, dot } => {
            let (bytes, inst) = read_instance(input)?;
            let (r, dot_text) = cmd_resolve(&bytes, &inst)?;
            Ok((r, dot.clone().map(|p| (p, dot_text))))
        }
        Command::Classify { input } => {
            let (bytes, inst) = read_instance(input)?;
            Ok((cmd_classify(&bytes, &inst)?, None))
        }
        Command::Blowup { input } => {
            let (bytes, inst) = read_instance(input)?;
            Ok((cmd_blowup(&bytes, &inst)?, None))
        }
        Command::FlipRun {
            input,
            seed,
            count,
            max_steps,
        } => match (input, seed) {
            (Some(path), _) => {
                let (bytes, inst) = read_instance(path)?;
                Ok((cmd_flip_run_instance(&bytes, &inst, *max_steps)?, None))
            }
            (None, Some(seed)) => Ok((cmd_flip_run_random(*seed, *count, *max_steps)?, None)),
            (None, None) => Err(Error::InvalidConfig(
                "flip-run needs --input or --seed".into(),
            )),
        },
        Command::Exclusion { lmax } => Ok((cmd_exclusion(*lmax)?, None)),
    }
}

/// Runs the tool; returns the exit status (0 ok, 1 invalid input, 2 broken
/// invariant).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = out.write_all(text.as_bytes());
                0
            } else {
                let _ = err.write_all(text.as_bytes());
                1
            };
        }
    };
    match dispatch(&cli) {
        Ok((report, dot)) => {
            if let Some((path, text)) = dot {
                if let Err(e) = std::fs::write(&path, text) {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    return 1;
                }
            }
            let text = if cli.json {
                report.render_json()
            } else {
                report.render_text()
            };
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_invariant_violation() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::HJChain;

    #[test]
    fn dot_examples() {
        let one = resolve(&CyclicQuotientType::new(3, 1).unwrap()).unwrap();
        let dot = emit_dot(&one);
        assert!(dot.contains("F1 [label=\"F1 (-3)\""));
        assert!(!dot.contains("->"));

        let three = resolve(&CyclicQuotientType::new(8, 5).unwrap()).unwrap();
        let dot = emit_dot(&three);
        assert_eq!(dot.matches("[label=").count(), 3);
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.starts_with("digraph"));
        assert_eq!(
            three.self_intersections,
            Some(HJChain::from_small(&[2, 3, 2]).unwrap())
        );

        let empty = resolve(&CyclicQuotientType::smooth()).unwrap();
        let dot = emit_dot(&empty);
        assert!(dot.contains("// empty chain"));
        assert!(!dot.contains("label"));
    }

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, out, err) = run_str(&["mmp", "frobnicate"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(!err.is_empty());
        assert_eq!(run_str(&["mmp", "exclusion", "--lmax", "3"]).0, 1);
    }

    #[test]
    fn exclusion_report_is_deterministic() {
        let (code, a, err) = run_str(&["mmp", "exclusion", "--lmax", "10"]);
        assert_eq!(code, 0);
        assert!(err.is_empty());
        assert_eq!(a, run_str(&["mmp", "exclusion", "--lmax", "10"]).1);
        assert!(a.starts_with("# mmp "));
        assert!(a.contains("survivors=3b3:5:3/10,3b4:3:1/6,3b7:6:5/14"));
    }
}
