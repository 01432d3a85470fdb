//! The `momentkit` command line: Bruhat graphs, GKM audits, canonical
//! sheaves, KL tables and verification suites.

pub mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use momentkit::bmp::{build_bmp, DegreePolicy};
use momentkit::graph::{bruhat_graph, bruhat_lower_graph, MomentGraph};
use momentkit::kl::KazhdanLusztig;
use momentkit::verify::{SuiteReport, Verifier, SUITES};
use momentkit::{with_field, CoefficientField, Elem, Field, WeylGroup};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "momentkit", version, about = "Moment graphs, canonical sheaves and Kazhdan-Lusztig polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the Bruhat moment graph of W^J, or its lower set below --w.
    Graph(Opts),
    /// Audit labels over a field: nonvanishing and pairwise independence.
    Gkm(Opts),
    /// Build the canonical sheaf on {x <= w} and print its graded ranks.
    Bmp(BmpOpts),
    /// Table of Kazhdan-Lusztig polynomials, parabolic when --J is given.
    Kl(Opts),
    /// Pull canonical sheaves back along inversion and right multiplication.
    Pullback(Opts),
    /// Run verification suites.
    Verify(VerifyOpts),
}

#[derive(Args, Debug, Clone, Default)]
struct Opts {
    /// Cartan type: A1-A4, B2, B3, C2, C3, D4, G2.
    #[arg(long = "type", value_name = "TYPE")]
    cartan: Option<String>,
    /// Comma-separated simple indices generating W_J.
    #[arg(long = "J", value_name = "LIST")]
    j: Option<String>,
    /// Element as a word in the simple indices; "" or "e" is the identity.
    #[arg(long, value_name = "WORD")]
    w: Option<String>,
    /// Q, F<p> or Fp:<p> for an odd prime p.
    #[arg(long, value_name = "FIELD")]
    field: Option<String>,
    /// Degrees searched beyond the default generator cap.
    #[arg(long = "dmax-slack", value_name = "N")]
    dmax_slack: Option<u32>,
    /// json, csv, dot or text.
    #[arg(long, value_name = "FMT")]
    fmt: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// key = value file supplying defaults for the flags above.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Include wall-clock times in the output.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug, Clone)]
struct BmpOpts {
    #[command(flatten)]
    opts: Opts,
    /// Also write the sheaf itself as JSON.
    #[arg(long, value_name = "PATH")]
    sheaf: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct VerifyOpts {
    #[command(flatten)]
    opts: Opts,
    /// `all` or a comma-separated list of suite names.
    #[arg(long, value_name = "LIST")]
    suite: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fmt {
    Json,
    Csv,
    Dot,
    Text,
}

impl Fmt {
    fn parse(s: &str) -> Result<Fmt> {
        Ok(match s {
            "json" => Fmt::Json,
            "csv" => Fmt::Csv,
            "dot" => Fmt::Dot,
            "text" => Fmt::Text,
            _ => bail!("unknown format {s:?}; expected json, csv, dot or text"),
        })
    }
}

/// Flags merged with the config file.
struct Settings {
    type_label: String,
    group: WeylGroup,
    j: Option<Vec<usize>>,
    w: Option<String>,
    field: CoefficientField,
    policy: DegreePolicy,
    fmt: Option<Fmt>,
    out: Option<PathBuf>,
    timings: bool,
    suite: Option<String>,
}

impl Settings {
    fn resolve(opts: &Opts, suite: Option<&String>) -> Result<Settings> {
        let file = match &opts.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                config::parse(&text)?
            }
            None => BTreeMap::new(),
        };
        let pick = |flag: Option<&String>, key: &str| flag.cloned().or_else(|| file.get(key).cloned());
        let type_label = pick(opts.cartan.as_ref(), "type").ok_or_else(|| anyhow!("--type is required"))?;
        let group = WeylGroup::parse_type(&type_label)?;
        let j = pick(opts.j.as_ref(), "J").map(|s| parse_j(&s, group.rank())).transpose()?;
        let field: CoefficientField = pick(opts.field.as_ref(), "field").unwrap_or_else(|| "Q".into()).parse()?;
        let slack = match opts.dmax_slack {
            Some(v) => v,
            None => match file.get("dmax-slack") {
                Some(v) => v.parse().with_context(|| format!("dmax-slack {v:?} is not a nonnegative integer"))?,
                None => 0,
            },
        };
        let fmt = pick(opts.fmt.as_ref(), "fmt").map(|s| Fmt::parse(&s)).transpose()?;
        let out = opts.out.clone().or_else(|| file.get("out").map(PathBuf::from));
        let timings = opts.timings
            || match file.get("timings") {
                Some(v) => config::parse_bool(v).ok_or_else(|| anyhow!("timings {v:?} is not a boolean"))?,
                None => false,
            };
        Ok(Settings {
            type_label: group.cartan_type().to_string(),
            group,
            j,
            w: pick(opts.w.as_ref(), "w"),
            field,
            policy: DegreePolicy { slack },
            fmt,
            out,
            timings,
            suite: pick(suite, "suite"),
        })
    }

    fn j_or_empty(&self) -> Vec<usize> {
        self.j.clone().unwrap_or_default()
    }

    fn element(&self, word: &str) -> Result<Elem> {
        let word = word.trim();
        if word == "e" {
            return Ok(self.group.identity());
        }
        Ok(self.group.parse_word(word)?)
    }

    /// `--w` as a minimal representative of `W^J`.
    fn top(&self) -> Result<Option<Elem>> {
        let Some(word) = &self.w else { return Ok(None) };
        let w = self.element(word)?;
        let j = self.j_or_empty();
        if !self.group.is_min_rep(w, &j) {
            bail!("{} is not a minimal coset representative for J = {}", self.group.word_or_e(w), fmt_j(&j));
        }
        Ok(Some(w))
    }

    fn fmt(&self, default: Fmt, allowed: &[Fmt]) -> Result<Fmt> {
        let f = self.fmt.unwrap_or(default);
        if !allowed.contains(&f) {
            bail!("format {f:?} is not available for this command");
        }
        Ok(f)
    }
}

fn parse_j(s: &str, rank: usize) -> Result<Vec<usize>> {
    let body = s.trim().trim_start_matches('{').trim_end_matches('}');
    let mut j = Vec::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part.parse().map_err(|_| anyhow!("J entry {part:?} is not an index"))?;
        if i == 0 || i > rank {
            bail!("J entry {i} is outside 1..={rank}");
        }
        j.push(i - 1);
    }
    j.sort_unstable();
    j.dedup();
    Ok(j)
}

fn fmt_j(j: &[usize]) -> String {
    let v: Vec<String> = j.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn j_json(j: &[usize]) -> Vec<usize> {
    j.iter().map(|i| i + 1).collect()
}

/// Runs the command line and returns the exit code: 0 on success, 1 when a
/// verification fails, 2 on usage or input errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli.command, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            2
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut dyn Write) -> Result<bool> {
    let (settings, passed, text) = match cmd {
        Command::Graph(o) => {
            let s = Settings::resolve(o, None)?;
            let t = graph_cmd(&s)?;
            (s, true, t)
        }
        Command::Gkm(o) => {
            let s = Settings::resolve(o, None)?;
            let t = with_field!(s.field, |f| gkm_cmd(&s, &f))?;
            (s, true, t)
        }
        Command::Bmp(b) => {
            let s = Settings::resolve(&b.opts, None)?;
            let t = with_field!(s.field, |f| bmp_cmd(&s, f, b.sheaf.as_deref()))?;
            (s, true, t)
        }
        Command::Kl(o) => {
            let s = Settings::resolve(o, None)?;
            let t = kl_cmd(&s)?;
            (s, true, t)
        }
        Command::Pullback(o) => {
            let s = Settings::resolve(o, None)?;
            let (ok, t) = with_field!(s.field, |f| pullback_cmd(&s, f))?;
            (s, ok, t)
        }
        Command::Verify(v) => {
            let s = Settings::resolve(&v.opts, v.suite.as_ref())?;
            let (ok, t) = with_field!(s.field, |f| verify_cmd(&s, f))?;
            (s, ok, t)
        }
    };
    match &settings.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(passed)
}

fn build_graph(s: &Settings) -> Result<MomentGraph> {
    let j = s.j_or_empty();
    Ok(match s.top()? {
        Some(w) => bruhat_lower_graph(&s.group, &j, w)?,
        None => bruhat_graph(&s.group, &j)?,
    })
}

fn display_word(word: &str) -> &str {
    if word.is_empty() {
        "e"
    } else {
        word
    }
}

fn fmt_label(l: &[i64]) -> String {
    let v: Vec<String> = l.iter().map(|x| x.to_string()).collect();
    format!("({})", v.join(","))
}

fn graph_cmd(s: &Settings) -> Result<String> {
    let g = build_graph(s)?;
    Ok(match s.fmt(Fmt::Dot, &[Fmt::Dot, Fmt::Json, Fmt::Text])? {
        Fmt::Dot => g.to_dot(),
        Fmt::Json => g.to_json(),
        _ => {
            let mut t = format!("{} J={}: {} vertices, {} edges\n", s.type_label, fmt_j(&s.j_or_empty()), g.num_vertices(), g.edges().len());
            for e in g.edges() {
                t += &format!(
                    "{} -> {} {}\n",
                    display_word(&g.vertex(e.tail).word),
                    display_word(&g.vertex(e.head).word),
                    fmt_label(&e.label)
                );
            }
            t
        }
    })
}

fn edge_json(g: &MomentGraph, e: usize) -> serde_json::Value {
    let edge = g.edge(e);
    json!({ "tail": g.vertex(edge.tail).word, "head": g.vertex(edge.head).word, "label": edge.label })
}

fn edge_text(g: &MomentGraph, e: usize) -> String {
    let edge = g.edge(e);
    format!("{} -> {} {}", display_word(&g.vertex(edge.tail).word), display_word(&g.vertex(edge.head).word), fmt_label(&edge.label))
}

fn gkm_cmd<F: Field>(s: &Settings, field: &F) -> Result<String> {
    let g = build_graph(s)?;
    let report = g.gkm_report(field);
    let k_moment = report.vanishing_labels.is_empty();
    Ok(match s.fmt(Fmt::Text, &[Fmt::Text, Fmt::Json])? {
        Fmt::Json => {
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "type": s.type_label,
                "J": j_json(&s.j_or_empty()),
                "w": s.top()?.map(|w| s.group.word(w)),
                "field": s.field.to_string(),
                "vertices": g.num_vertices(),
                "edges": g.edges().len(),
                "k_moment_graph": k_moment,
                "gkm": report.is_gkm(),
                "vanishing_labels": report.vanishing_labels.iter().map(|&e| edge_json(&g, e)).collect::<Vec<_>>(),
                "violations": report.violations.iter().map(|v| json!({
                    "vertex": g.vertex(v.vertex).word,
                    "edges": [edge_json(&g, v.edges.0), edge_json(&g, v.edges.1)],
                })).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        _ => {
            let yn = |b: bool| if b { "yes" } else { "no" };
            let mut t = format!(
                "{} J={} over {}: {} vertices, {} edges\nk-moment graph: {}\nGKM pair: {}\n",
                s.type_label,
                fmt_j(&s.j_or_empty()),
                s.field,
                g.num_vertices(),
                g.edges().len(),
                yn(k_moment),
                yn(report.is_gkm())
            );
            for &e in &report.vanishing_labels {
                t += &format!("vanishing label: {}\n", edge_text(&g, e));
            }
            for v in &report.violations {
                t += &format!(
                    "dependent at {}: {} and {}\n",
                    display_word(&g.vertex(v.vertex).word),
                    edge_text(&g, v.edges.0),
                    edge_text(&g, v.edges.1)
                );
            }
            t
        }
    })
}

#[derive(Serialize)]
struct RankRow {
    w: String,
    y: String,
    field: String,
    rank: String,
    coeffs: Vec<u64>,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<u128>,
}

fn coeff_list<T: ToString>(c: &[T]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn bmp_cmd<F: Field>(s: &Settings, field: F, sheaf_out: Option<&Path>) -> Result<String> {
    let j = s.j_or_empty();
    let w = match s.top()? {
        Some(w) => w,
        None => *s.group.min_coset_reps(&j)?.min_reps.last().expect("W^J is nonempty"),
    };
    let fmt = s.fmt(Fmt::Text, &[Fmt::Text, Fmt::Csv, Fmt::Json])?;
    let graph = Arc::new(bruhat_lower_graph(&s.group, &j, w)?);
    let start = Instant::now();
    let b = build_bmp(graph, field, s.policy)?;
    let wall = s.timings.then(|| start.elapsed().as_millis());
    if let Some(p) = sheaf_out {
        std::fs::write(p, b.sheaf.to_json()?).with_context(|| format!("writing {}", p.display()))?;
    }
    let g = b.graph();
    let mut order: Vec<usize> = (0..g.num_vertices()).collect();
    order.sort_by(|&a, &c| (g.vertex(a).length, &g.vertex(a).word).cmp(&(g.vertex(c).length, &g.vertex(c).word)));
    let rows: Vec<RankRow> = order
        .iter()
        .map(|&v| {
            let r = b.graded_rank(v);
            RankRow {
                w: s.group.word(w),
                y: g.vertex(v).word.clone(),
                field: s.field.to_string(),
                rank: r.to_string(),
                coeffs: r.coeffs.clone(),
                converged: b.converged[v],
                wall_ms: wall,
            }
        })
        .collect();
    Ok(match fmt {
        Fmt::Json => {
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "type": s.type_label,
                "J": j_json(&j),
                "w": s.group.word(w),
                "field": s.field.to_string(),
                "dmax_slack": s.policy.slack,
                "converged": b.all_converged(),
                "rows": rows,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Fmt::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["w", "y", "field", "rank", "coeffs", "converged"];
            if s.timings {
                header.push("wall_ms");
            }
            wtr.write_record(&header)?;
            for r in &rows {
                let mut rec = vec![r.w.clone(), r.y.clone(), r.field.clone(), r.rank.clone(), coeff_list(&r.coeffs), r.converged.to_string()];
                if let Some(ms) = r.wall_ms {
                    rec.push(ms.to_string());
                }
                wtr.write_record(&rec)?;
            }
            String::from_utf8(wtr.into_inner()?)?
        }
        _ => {
            let mut t = format!("B_w for w = {} ({} J={}) over {}\n", display_word(&s.group.word(w)), s.type_label, fmt_j(&j), s.field);
            let width = rows.iter().map(|r| display_word(&r.y).len()).max().unwrap_or(1).max(1);
            for r in &rows {
                let flag = if r.converged { "" } else { "  (unconverged)" };
                t += &format!("  {:<width$}  {}{}\n", display_word(&r.y), r.rank, flag);
            }
            if let Some(ms) = wall {
                t += &format!("built in {ms} ms\n");
            }
            t
        }
    })
}

fn kl_cmd(s: &Settings) -> Result<String> {
    let g = &s.group;
    let kl = KazhdanLusztig::new(g);
    let j = s.j_or_empty();
    let reps = g.min_coset_reps(&j)?.min_reps;
    let tops: Vec<Elem> = match s.top()? {
        Some(w) => vec![w],
        None => reps.clone(),
    };
    let mut rows = Vec::new();
    for &w in &tops {
        for &y in reps.iter().filter(|&&y| g.bruhat_leq(y, w)) {
            let p = if j.is_empty() { kl.kl(y, w) } else { kl.parabolic_kl(&j, y, w)? };
            rows.push((g.word(w), g.word(y), p));
        }
    }
    Ok(match s.fmt(Fmt::Text, &[Fmt::Text, Fmt::Csv, Fmt::Json])? {
        Fmt::Json => {
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "type": s.type_label,
                "J": j_json(&j),
                "rows": rows.iter().map(|(w, y, p)| json!({ "w": w, "y": y, "P": p.to_string(), "coeffs": p.coeffs })).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Fmt::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["w", "y", "P", "coeffs"])?;
            for (w, y, p) in &rows {
                wtr.write_record([w.as_str(), y.as_str(), &p.to_string(), &coeff_list(&p.coeffs)])?;
            }
            String::from_utf8(wtr.into_inner()?)?
        }
        _ => {
            let mut t = String::new();
            for (w, y, p) in &rows {
                t += &format!("P({}, {}) = {}\n", display_word(y), display_word(w), p);
            }
            t
        }
    })
}

#[derive(Serialize)]
struct TimedReport<'a> {
    #[serde(flatten)]
    report: &'a SuiteReport,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<u128>,
}

fn render_reports(s: &Settings, title: &str, reports: &[(SuiteReport, u128)]) -> Result<String> {
    let passed = reports.iter().all(|(r, _)| r.passed());
    Ok(match s.fmt(Fmt::Text, &[Fmt::Text, Fmt::Json])? {
        Fmt::Json => {
            let suites: Vec<TimedReport> = reports
                .iter()
                .map(|(r, ms)| TimedReport { report: r, passed: r.passed(), wall_ms: s.timings.then_some(*ms) })
                .collect();
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "type": s.type_label,
                "field": s.field.to_string(),
                "J": s.j.as_ref().map(|j| j_json(j)),
                "dmax_slack": s.policy.slack,
                "passed": passed,
                "suites": suites,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        _ => {
            let mut t = format!("{title} {} over {}\n", s.type_label, s.field);
            for (r, ms) in reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                t += &format!("{status} {}: checked {}, skipped {}", r.suite, r.checked, r.skipped);
                if s.timings {
                    t += &format!(", {ms} ms");
                }
                t += &format!("\n  {}\n", r.statement);
                for f in &r.failures {
                    t += &format!("  failure: {f}\n");
                }
                for n in &r.notes {
                    t += &format!("  note: {n}\n");
                }
            }
            t += if passed { "all passed\n" } else { "FAILED\n" };
            t
        }
    })
}

fn pullback_cmd<F: Field>(s: &Settings, field: F) -> Result<(bool, String)> {
    let v = Verifier::new(&s.group, field, s.policy, None)?;
    let ws: Vec<Elem> = match &s.w {
        Some(word) => vec![s.element(word)?],
        None => s.group.elements().to_vec(),
    };
    let start = Instant::now();
    v.atlas().prefetch(&ws.iter().flat_map(|&w| [w, s.group.inv(w)]).collect::<Vec<_>>())?;
    let r = v.pullbacks_at(&ws)?;
    let ms = start.elapsed().as_millis();
    let ok = r.passed();
    Ok((ok, render_reports(s, "pullback", &[(r, ms)])?))
}

fn verify_cmd<F: Field>(s: &Settings, field: F) -> Result<(bool, String)> {
    let list = s.suite.clone().unwrap_or_else(|| "all".into());
    let names: Vec<String> = if list.trim() == "all" {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        list.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
    };
    if names.is_empty() {
        bail!("no suites selected");
    }
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
        bail!("unknown suite {bad:?}; available: all, {}", SUITES.join(", "));
    }
    let v = Verifier::new(&s.group, field, s.policy, s.j.clone())?;
    let mut reports = Vec::new();
    for n in &names {
        let start = Instant::now();
        let r = v.run(n)?;
        reports.push((r, start.elapsed().as_millis()));
    }
    let ok = reports.iter().all(|(r, _)| r.passed());
    Ok((ok, render_reports(s, "verify", &reports)?))
}
