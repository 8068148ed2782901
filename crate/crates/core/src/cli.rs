//! Batch command-line front end.
//!
//! Exit codes: 0 success or a positive answer, 1 a well-formed negative
//! answer, 2 a usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::carriers::shipped;
use crate::cores::{compare_cores, compute_core, is_pattern, isominimal, longest_chain2, CoreComparison, PatternDecision};
use crate::covering::{search_coverings, test_cofinal_validity, Budget, Constraints, Verdict};
use crate::dot::{export_dot, DotSource};
use crate::format::{self, FormatError};
use crate::hierarchy::{build_hierarchy_with, GameBounds, Hierarchy};
use crate::ordinal::{parse_term, OrdinalTerm};
use crate::pattern::{validate_pattern, Pattern};

#[derive(Parser, Debug)]
#[command(name = "patternforge", version, about = "Patterns of resemblance over finite ordinal carriers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output style.
    #[arg(long, value_enum, default_value_t = OutputFormat::Human, global = true)]
    format: OutputFormat,
    /// Print ordinals with numerals and `w` shorthand (human output only).
    #[arg(long, global = true)]
    sugar: bool,
    /// Accepted for scripting compatibility; nothing is random.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a pattern file; with --host, also look for a covering.
    Validate {
        pattern: PathBuf,
        #[arg(long)]
        host: Option<PathBuf>,
    },
    /// Build a hierarchy on a carrier.
    Build {
        /// Carrier file, one ordinal per line.
        #[arg(long, conflicts_with = "shipped", required_unless_present = "shipped")]
        carrier: Option<PathBuf>,
        /// Name of a built-in carrier; its top is used unless --top is given.
        #[arg(long)]
        shipped: Option<String>,
        #[arg(long, required_unless_present = "shipped")]
        top: Option<String>,
        #[arg(long, default_value_t = GameBounds::default().moves)]
        moves: usize,
        #[arg(long, default_value_t = GameBounds::default().replies)]
        replies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the structural axioms of a hierarchy file.
    Axioms {
        hierarchy: PathBuf,
        #[arg(long, default_value_t = 1)]
        window: usize,
    },
    /// List coverings of a pattern in a hierarchy.
    Cover {
        pattern: PathBuf,
        hierarchy: PathBuf,
        /// Print at most this many.
        #[arg(long, default_value_t = 20)]
        limit: usize,
        /// Write the first covering here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pointwise-minimal realization of a pattern.
    Isominimal {
        pattern: PathBuf,
        hierarchy: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Core of a hierarchy up to a bound on indecomposables.
    Core {
        hierarchy: PathBuf,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two cores member by member.
    Compare {
        first: PathBuf,
        second: PathBuf,
        /// Hierarchy the second core was computed from.
        #[arg(long)]
        host: Option<PathBuf>,
    },
    /// Longest strict le2 chain.
    Chains { hierarchy: PathBuf },
    /// Test a rule instance for cofinal validity.
    RuleTest {
        rule: PathBuf,
        hierarchy: PathBuf,
        #[arg(long, default_value_t = Budget::default().max_coverings)]
        max_coverings: usize,
        #[arg(long, default_value_t = Budget::default().max_phis)]
        max_phis: usize,
    },
    /// Render a pattern, hierarchy or core file as Graphviz text.
    ExportDot {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure that maps to exit code 2.
struct InputError(String);

impl From<FormatError> for InputError {
    fn from(e: FormatError) -> Self {
        InputError(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, FormatError>) -> Result<T, InputError> {
    parse(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

struct Out<'a> {
    w: &'a mut dyn Write,
    global: &'a Global,
}

impl Out<'_> {
    fn term(&self, t: &OrdinalTerm) -> String {
        if self.global.sugar && self.global.format == OutputFormat::Human {
            t.sugar().to_string()
        } else {
            t.to_string()
        }
    }

    fn terms(&self, ts: &[OrdinalTerm]) -> String {
        ts.iter().map(|t| self.term(t)).collect::<Vec<_>>().join(", ")
    }

    fn json(&self) -> bool {
        self.global.format == OutputFormat::Json
    }

    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.w, "{}", s.as_ref());
    }

    fn value(&mut self, v: &Value) {
        let _ = writeln!(self.w, "{}", serde_json::to_string_pretty(v).expect("json values print"));
    }

    fn pattern(&mut self, p: &Pattern) {
        let u = self.terms(p.universe());
        self.line(format!("universe: {u}"));
        for k in 1..=2u8 {
            let pairs: Vec<String> = p
                .strict_pairs(k)
                .iter()
                .map(|(a, b)| format!("{} < {}", self.term(a), self.term(b)))
                .collect();
            self.line(format!("le{k}: {}", if pairs.is_empty() { "-".to_string() } else { pairs.join(", ") }));
        }
    }
}

fn strs(ts: &[OrdinalTerm]) -> Vec<String> {
    ts.iter().map(|t| t.to_string()).collect()
}

fn map_json<'a>(m: impl IntoIterator<Item = (&'a OrdinalTerm, &'a OrdinalTerm)>) -> Value {
    Value::Array(m.into_iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect())
}

fn pattern_json(p: &Pattern) -> Value {
    let pairs = |k| -> Value { map_json(p.strict_pairs(k).iter().map(|(a, b)| (a, b))) };
    json!({"universe": strs(p.universe()), "le1": pairs(1), "le2": pairs(2)})
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("usage error");
            let _ = writeln!(stderr, "{first}");
            return 2;
        }
    };
    let mut out = Out {
        w: stdout,
        global: &cli.global,
    };
    match execute(&cli.command, &mut out) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}

fn execute(cmd: &Command, out: &mut Out<'_>) -> Result<i32, InputError> {
    match cmd {
        Command::Validate { pattern, host } => validate(pattern, host.as_deref(), out),
        Command::Build {
            carrier,
            shipped: name,
            top,
            moves,
            replies,
            out: dest,
        } => {
            let (set, top) = match name {
                Some(name) => {
                    let c = shipped(name).ok_or_else(|| InputError(format!("no shipped carrier named {name:?}")))?;
                    let top = match top {
                        Some(t) => term_arg(t)?,
                        None => c.top_term(),
                    };
                    (c.carrier(), top)
                }
                None => (
                    load(carrier.as_deref().expect("clap enforces"), format::read_carrier)?,
                    term_arg(top.as_deref().expect("clap enforces"))?,
                ),
            };
            let bounds = GameBounds {
                moves: *moves,
                replies: *replies,
            };
            let h = build_hierarchy_with(&set, &top, bounds).map_err(|e| InputError(e.to_string()))?;
            let text = format::write_hierarchy(&h);
            let hash = format::hierarchy_digest(&h);
            match dest {
                Some(path) => {
                    write_file(path, &text)?;
                    if out.json() {
                        out.value(&json!({"elements": h.terms().len(), "rounds": h.build_log().rounds.len(), "sha256": hash}));
                    } else {
                        out.line(format!(
                            "built {} elements in {} rounds, sha256 {hash}",
                            h.terms().len(),
                            h.build_log().rounds.len()
                        ));
                    }
                }
                None => {
                    let _ = write!(out.w, "{text}");
                }
            }
            Ok(0)
        }
        Command::Axioms { hierarchy, window } => {
            let h = load(hierarchy, format::read_hierarchy)?;
            let r = h.check_axioms(*window);
            if out.json() {
                let v = |xs: &[crate::pattern::Violation]| -> Vec<String> { xs.iter().map(|x| x.to_string()).collect() };
                out.value(&json!({
                    "exact_ok": r.exact_ok(),
                    "orders": v(&r.orders),
                    "respect": v(&r.respect),
                    "arithmetic": r.arithmetic,
                    "window": r.window,
                    "cofinal": r.cofinal.iter().map(|(k, a, b)| json!([k, a.to_string(), b.to_string()])).collect::<Vec<_>>(),
                    "continuity": r.continuity.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>(),
                }));
            } else {
                let status = |ok: bool| if ok { "ok" } else { "FAILED" };
                out.line(format!("(b) orders: {}", status(r.orders.is_empty())));
                for x in &r.orders {
                    out.line(format!("  {x}"));
                }
                out.line(format!("(c) respect: {}", status(r.respect.is_empty())));
                for x in &r.respect {
                    out.line(format!("  {x}"));
                }
                out.line(format!("(d) arithmetic: {}", status(r.arithmetic.is_empty())));
                for x in &r.arithmetic {
                    out.line(format!("  {x}"));
                }
                out.line(format!("(a) cofinal failures (window {}): {}", r.window, r.cofinal.len()));
                for (k, a, b) in &r.cofinal {
                    let (a, b) = (out.term(a), out.term(b));
                    out.line(format!("  le{k}: {a} < {b}"));
                }
                out.line(format!("continuity diagnostics: {}", r.continuity.len()));
                for (a, b) in &r.continuity {
                    let (a, b) = (out.term(a), out.term(b));
                    out.line(format!("  {a} below {b}"));
                }
            }
            Ok(if r.exact_ok() { 0 } else { 1 })
        }
        Command::Cover {
            pattern,
            hierarchy,
            limit,
            out: dest,
        } => {
            let p = load(pattern, format::read_pattern)?;
            let h = load(hierarchy, format::read_hierarchy)?;
            let all = search_coverings(&p, &h, &Constraints::default());
            if let (Some(path), Some(first)) = (dest, all.first()) {
                write_file(path, &format::write_covering(first))?;
            }
            if out.json() {
                out.value(&json!({
                    "count": all.len(),
                    "coverings": all.iter().take(*limit).map(|c| map_json(c.assignment())).collect::<Vec<_>>(),
                }));
            } else {
                out.line(format!("{} covering(s)", all.len()));
                for c in all.iter().take(*limit) {
                    let parts: Vec<String> = c
                        .assignment()
                        .iter()
                        .map(|(a, b)| format!("{} -> {}", out.term(a), out.term(b)))
                        .collect();
                    out.line(format!("  {}", parts.join(", ")));
                }
            }
            Ok(if all.is_empty() { 1 } else { 0 })
        }
        Command::Isominimal {
            pattern,
            hierarchy,
            out: dest,
        } => {
            let p = load(pattern, format::read_pattern)?;
            let h = load(hierarchy, format::read_hierarchy)?;
            let Some(r) = isominimal(&p, &h) else {
                if out.json() {
                    out.value(&json!({"covered": false}));
                } else {
                    out.line("not covered");
                }
                return Ok(1);
            };
            if let Some(path) = dest {
                write_file(path, &format::write_pattern(&r.realization))?;
            }
            if out.json() {
                out.value(&json!({
                    "covered": true,
                    "realization": pattern_json(&r.realization),
                    "assignment": map_json(&r.assignment),
                    "unique_minimum": r.unique_minimum,
                    "below_every_cover": r.below_every_cover,
                    "isomorphic": r.isomorphic,
                    "cover_count": r.cover_count,
                }));
            } else {
                out.pattern(&r.realization);
                out.line(format!("covers: {}", r.cover_count));
                out.line(format!("unique minimum: {}", r.unique_minimum));
                out.line(format!("below every cover: {}", r.below_every_cover));
                out.line(format!("isomorphic to the pattern: {}", r.isomorphic));
            }
            Ok(0)
        }
        Command::Core {
            hierarchy,
            bound,
            out: dest,
        } => {
            if *bound == 0 {
                return Err(InputError("--bound must be at least 1".into()));
            }
            let h = load(hierarchy, format::read_hierarchy)?;
            let c = compute_core(&h, *bound);
            let text = format::write_core(&c);
            match dest {
                Some(path) => {
                    write_file(path, &text)?;
                    if out.json() {
                        out.value(&json!({"members": strs(&c.members), "patterns": c.patterns.len()}));
                    } else {
                        out.line(format!("{} members: {}", c.members.len(), out.terms(&c.members)));
                        out.line(format!("{} realizations", c.patterns.len()));
                    }
                }
                None => {
                    let _ = write!(out.w, "{text}");
                }
            }
            Ok(0)
        }
        Command::Compare { first, second, host } => {
            let c1 = load(first, format::read_core)?;
            let c2 = load(second, format::read_core)?;
            let h2 = host.as_deref().map(|p| load(p, format::read_hierarchy)).transpose()?;
            if let Some(h2) = &h2 {
                if format::hierarchy_digest(h2) != c2.host {
                    return Err(InputError("--host does not match the second core's host".into()));
                }
            }
            let cmp = compare_cores(&c1, &c2, h2.as_ref()).map_err(|e| InputError(e.to_string()))?;
            let machine = match &cmp {
                CoreComparison::Embedding(e) => json!({
                    "result": "embedding",
                    "initial_segment_flag": e.initial_segment_flag,
                    "host_checked": h2.is_some(),
                    "map": map_json(e.map.iter().map(|(a, b)| (a, b))),
                }),
                CoreComparison::Mismatch(m) => json!({
                    "result": "mismatch",
                    "position": m.position,
                    "left": m.left.as_ref().map(pattern_json),
                    "right": m.right.as_ref().map(pattern_json),
                }),
            };
            if out.json() {
                out.value(&machine);
            } else {
                match &cmp {
                    CoreComparison::Embedding(e) => {
                        out.line(format!(
                            "embedding of {} members, initial segment: {}",
                            e.map.len(),
                            e.initial_segment_flag
                        ));
                        if h2.is_none() {
                            out.line("host not given: realizations were matched by witness type only");
                        }
                        for (a, b) in &e.map {
                            let (a, b) = (out.term(a), out.term(b));
                            out.line(format!("  {a} -> {b}"));
                        }
                    }
                    CoreComparison::Mismatch(m) => {
                        out.line(format!("mismatch at member {}", m.position));
                        for (side, p) in [("first", &m.left), ("second", &m.right)] {
                            match p {
                                Some(p) => {
                                    out.line(format!("{side} witness:"));
                                    out.pattern(p);
                                }
                                None => out.line(format!("{side} core has no member here")),
                            }
                        }
                    }
                }
                out.line("--- machine-readable ---");
                out.value(&machine);
            }
            Ok(match cmp {
                CoreComparison::Embedding(e) if e.initial_segment_flag => 0,
                _ => 1,
            })
        }
        Command::Chains { hierarchy } => {
            let h = load(hierarchy, format::read_hierarchy)?;
            let chain = longest_chain2(&h);
            if out.json() {
                out.value(&json!({"length": chain.len(), "chain": strs(&chain)}));
            } else if chain.is_empty() {
                out.line("no strict le2 pairs");
            } else {
                let parts: Vec<String> = chain.iter().map(|t| out.term(t)).collect();
                out.line(format!("length {}: {}", chain.len(), parts.join(" <2 ")));
            }
            Ok(0)
        }
        Command::RuleTest {
            rule,
            hierarchy,
            max_coverings,
            max_phis,
        } => {
            let r = load(rule, format::read_rule)?;
            let h = load(hierarchy, format::read_hierarchy)?;
            let budget = Budget {
                max_coverings: *max_coverings,
                max_phis: *max_phis,
            };
            let v = test_cofinal_validity(r.premise(), r.conclusion(), &h, budget).map_err(|e| InputError(e.to_string()))?;
            if out.json() {
                let _ = writeln!(out.w, "{}", format::verdict_json(&v));
            } else {
                match &v {
                    Verdict::ValidOnSample { coverings, phis } => {
                        out.line(format!("valid on sample: {coverings} covering(s), {phis} bound map(s) tried"))
                    }
                    Verdict::Counterexample { covering, phi } => {
                        out.line(format!("counterexample ({} rule)", r.kind()));
                        let h_parts: Vec<String> = covering
                            .assignment()
                            .iter()
                            .map(|(a, b)| format!("{} -> {}", out.term(a), out.term(b)))
                            .collect();
                        out.line(format!("  covering: {}", h_parts.join(", ")));
                        let phi_parts: Vec<String> = phi
                            .bounds()
                            .iter()
                            .map(|(a, b)| format!("{} -> {}", out.term(a), out.term(b)))
                            .collect();
                        out.line(format!("  bounds: {}", phi_parts.join(", ")));
                    }
                }
            }
            Ok(if v.is_valid() { 0 } else { 1 })
        }
        Command::ExportDot { input, out: dest } => {
            let text = read(input)?;
            let sugar = out.global.sugar;
            let dot = if let Ok(p) = format::read_pattern(&text) {
                export_dot(DotSource::Pattern(&p), sugar)
            } else if let Ok(h) = format::read_hierarchy(&text) {
                export_dot(DotSource::Hierarchy(&h), sugar)
            } else {
                let c = format::read_core(&text)
                    .map_err(|_| InputError(format!("{}: not a pattern, hierarchy or core file", input.display())))?;
                export_dot(DotSource::Core(&c), sugar)
            };
            match dest {
                Some(path) => write_file(path, &dot)?,
                None => {
                    let _ = write!(out.w, "{dot}");
                }
            }
            Ok(0)
        }
    }
}

fn term_arg(s: &str) -> Result<OrdinalTerm, InputError> {
    parse_term(s).map_err(|e| InputError(format!("bad ordinal {s:?}: {e}")))
}

fn validate(path: &Path, host: Option<&Path>, out: &mut Out<'_>) -> Result<i32, InputError> {
    let s = load(path, format::read_structure)?;
    let Some(host) = host else {
        let violations = validate_pattern(&s);
        if out.json() {
            out.value(&json!({
                "valid": violations.is_empty(),
                "violations": violations.iter().map(|v| json!({"clause": v.clause(), "message": v.to_string()})).collect::<Vec<_>>(),
            }));
        } else if violations.is_empty() {
            out.line("ok");
        } else {
            for v in &violations {
                out.line(format!("({}) {v}", v.clause()));
            }
        }
        return Ok(if violations.is_empty() { 0 } else { 1 });
    };
    let h: Hierarchy = load(host, format::read_hierarchy)?;
    let d = is_pattern(&s, &h);
    if out.json() {
        let mut v = json!({"pattern": d.holds(), "reason": d.reason()});
        if let PatternDecision::Covered(c) = &d {
            v["covering"] = map_json(c.assignment());
        }
        out.value(&v);
    } else {
        out.line(d.reason());
    }
    Ok(if d.holds() { 0 } else { 1 })
}
