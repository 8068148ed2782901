//! Versioned text formats: a header line followed by pretty JSON.
//!
//! Ordinals are written in canonical sugar-free notation and relations as
//! sorted lists of strict pairs; reflexive pairs are implicit.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cores::Core;
use crate::covering::{Covering, RegressiveMap, Verdict};
use crate::hierarchy::{BuildLog, GameBounds, Hierarchy, RoundLog};
use crate::ordinal::{parse_term, ClosedSet, OrdinalTerm};
use crate::pattern::{Pattern, Structure};
use crate::relation::Relation;
use crate::rules::{make_with_kind, RuleInstance, RuleKind};

pub const HEADER: &str = "patternforge-v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("missing header line {HEADER:?}")]
    MissingHeader,
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad ordinal {text:?}: {msg}")]
    Term { text: String, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("hash mismatch: file says {stored}, contents give {computed}")]
    HashMismatch { stored: String, computed: String },
}

fn term(text: &str) -> Result<OrdinalTerm, FormatError> {
    parse_term(text).map_err(|e| FormatError::Term {
        text: text.to_string(),
        msg: e.to_string(),
    })
}

fn terms(texts: &[String]) -> Result<Vec<OrdinalTerm>, FormatError> {
    texts.iter().map(|s| term(s)).collect()
}

fn body(text: &str) -> Result<&str, FormatError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    if first.trim() != HEADER {
        return Err(FormatError::MissingHeader);
    }
    Ok(rest)
}

fn emit<T: Serialize>(value: &T) -> String {
    format!("{HEADER}\n{}\n", serde_json::to_string_pretty(value).expect("plain data serializes"))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    universe: Vec<String>,
    le1: Vec<[String; 2]>,
    le2: Vec<[String; 2]>,
}

fn pair_strings(pairs: Vec<(OrdinalTerm, OrdinalTerm)>) -> Vec<[String; 2]> {
    let mut pairs = pairs;
    pairs.sort();
    pairs.into_iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect()
}

impl PatternDoc {
    fn of(p: &Pattern) -> PatternDoc {
        PatternDoc {
            universe: p.universe().iter().map(|t| t.to_string()).collect(),
            le1: pair_strings(p.strict_pairs(1)),
            le2: pair_strings(p.strict_pairs(2)),
        }
    }

    fn structure(&self) -> Result<Structure, FormatError> {
        let pairs = |ps: &[[String; 2]]| -> Result<BTreeSet<(OrdinalTerm, OrdinalTerm)>, FormatError> {
            ps.iter().map(|[a, b]| Ok((term(a)?, term(b)?))).collect()
        };
        Ok(Structure {
            universe: terms(&self.universe)?.into_iter().collect(),
            le1: pairs(&self.le1)?,
            le2: pairs(&self.le2)?,
        }
        .with_reflexive())
    }

    fn pattern(&self) -> Result<Pattern, FormatError> {
        Pattern::new(&self.structure()?).map_err(|v| {
            FormatError::Invalid(format!(
                "invalid pattern: {}",
                v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
            ))
        })
    }
}

pub fn write_pattern(p: &Pattern) -> String {
    emit(&PatternDoc::of(p))
}

/// Reads a pattern file without validating it, reflexive pairs added.
pub fn read_structure(text: &str) -> Result<Structure, FormatError> {
    serde_json::from_str::<PatternDoc>(body(text)?)?.structure()
}

pub fn read_pattern(text: &str) -> Result<Pattern, FormatError> {
    serde_json::from_str::<PatternDoc>(body(text)?)?.pattern()
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct BoundsDoc {
    moves: usize,
    replies: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct RoundDoc {
    round: usize,
    pruned_le1: usize,
    pruned_le2: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct HierarchyBody {
    carrier: Vec<String>,
    top: String,
    bounds: BoundsDoc,
    le1: Vec<[String; 2]>,
    le2: Vec<[String; 2]>,
    build_log: Vec<RoundDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct HierarchyDoc {
    carrier: Vec<String>,
    top: String,
    bounds: BoundsDoc,
    le1: Vec<[String; 2]>,
    le2: Vec<[String; 2]>,
    build_log: Vec<RoundDoc>,
    sha256: String,
}

fn strict_term_pairs(h: &Hierarchy, k: u8) -> Vec<(OrdinalTerm, OrdinalTerm)> {
    h.relation(k)
        .strict_pairs()
        .map(|(i, j)| (h.terms()[i].clone(), h.terms()[j].clone()))
        .collect()
}

impl HierarchyBody {
    fn of(h: &Hierarchy) -> HierarchyBody {
        HierarchyBody {
            carrier: h.terms().iter().map(|t| t.to_string()).collect(),
            top: h.top().to_string(),
            bounds: BoundsDoc {
                moves: h.bounds().moves,
                replies: h.bounds().replies,
            },
            le1: pair_strings(strict_term_pairs(h, 1)),
            le2: pair_strings(strict_term_pairs(h, 2)),
            build_log: h
                .build_log()
                .rounds
                .iter()
                .map(|r| RoundDoc {
                    round: r.round,
                    pruned_le1: r.pruned_le1,
                    pruned_le2: r.pruned_le2,
                })
                .collect(),
        }
    }

    fn digest(&self) -> String {
        let compact = serde_json::to_string(self).expect("plain data serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }
}

/// SHA-256 of the compact JSON of a hierarchy's contents, hex encoded.
pub fn hierarchy_digest(h: &Hierarchy) -> String {
    HierarchyBody::of(h).digest()
}

pub fn write_hierarchy(h: &Hierarchy) -> String {
    let b = HierarchyBody::of(h);
    let sha256 = b.digest();
    emit(&HierarchyDoc {
        carrier: b.carrier,
        top: b.top,
        bounds: b.bounds,
        le1: b.le1,
        le2: b.le2,
        build_log: b.build_log,
        sha256,
    })
}

/// Reads a hierarchy file, checking the stored hash and that the relations
/// live on the carrier. The axioms themselves are left to
/// [`Hierarchy::check_axioms`].
pub fn read_hierarchy(text: &str) -> Result<Hierarchy, FormatError> {
    let doc: HierarchyDoc = serde_json::from_str(body(text)?)?;
    let b = HierarchyBody {
        carrier: doc.carrier,
        top: doc.top,
        bounds: doc.bounds,
        le1: doc.le1,
        le2: doc.le2,
        build_log: doc.build_log,
    };
    let computed = b.digest();
    if computed != doc.sha256 {
        return Err(FormatError::HashMismatch {
            stored: doc.sha256,
            computed,
        });
    }
    let carrier = closed(terms(&b.carrier)?)?;
    let elems = carrier.to_vec();
    let n = elems.len();
    let relation = |pairs: &[[String; 2]]| -> Result<Relation, FormatError> {
        let mut r = Relation::identity(n);
        for [a, c] in pairs {
            let pos = |s: &str| -> Result<usize, FormatError> {
                let t = term(s)?;
                elems
                    .binary_search(&t)
                    .map_err(|_| FormatError::Invalid(format!("{s} is not in the carrier")))
            };
            r.set(pos(a)?, pos(c)?, true);
        }
        Ok(r)
    };
    Ok(Hierarchy::from_parts(
        &carrier,
        term(&b.top)?,
        GameBounds {
            moves: b.bounds.moves,
            replies: b.bounds.replies,
        },
        relation(&b.le1)?,
        relation(&b.le2)?,
        BuildLog {
            rounds: b
                .build_log
                .into_iter()
                .map(|r| RoundLog {
                    round: r.round,
                    pruned_le1: r.pruned_le1,
                    pruned_le2: r.pruned_le2,
                })
                .collect(),
        },
    ))
}

fn closed(ts: Vec<OrdinalTerm>) -> Result<ClosedSet, FormatError> {
    ClosedSet::new(ts.into_iter().collect())
        .map_err(|m| FormatError::Invalid(format!("set is not closed: missing {m}")))
}

/// Carrier files: one ordinal per line, optional header, blank lines and
/// `#` comments ignored. The set must be closed.
pub fn read_carrier(text: &str) -> Result<ClosedSet, FormatError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == HEADER {
            continue;
        }
        out.push(term(line)?);
    }
    closed(out)
}

pub fn write_carrier(c: &ClosedSet) -> String {
    let mut out = format!("{HEADER}\n");
    for t in c.iter() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct CoreDoc {
    host: String,
    size_bound: usize,
    members: Vec<String>,
    patterns: Vec<PatternDoc>,
    witness: Vec<(String, usize)>,
}

pub fn write_core(c: &Core) -> String {
    emit(&CoreDoc {
        host: c.host.clone(),
        size_bound: c.size_bound,
        members: c.members.iter().map(|t| t.to_string()).collect(),
        patterns: c.patterns.iter().map(PatternDoc::of).collect(),
        witness: c.witness.iter().map(|(t, i)| (t.to_string(), *i)).collect(),
    })
}

pub fn read_core(text: &str) -> Result<Core, FormatError> {
    let doc: CoreDoc = serde_json::from_str(body(text)?)?;
    let patterns = doc.patterns.iter().map(PatternDoc::pattern).collect::<Result<Vec<_>, _>>()?;
    let mut witness = BTreeMap::new();
    for (t, i) in &doc.witness {
        if *i >= patterns.len() {
            return Err(FormatError::Invalid(format!("witness index {i} out of range")));
        }
        witness.insert(term(t)?, *i);
    }
    let members = terms(&doc.members)?;
    if members.iter().ne(witness.keys()) {
        return Err(FormatError::Invalid("members and witnesses disagree".into()));
    }
    Ok(Core {
        host: doc.host,
        size_bound: doc.size_bound,
        members,
        patterns,
        witness,
    })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct CoveringDoc {
    pattern: PatternDoc,
    assignment: Vec<[String; 2]>,
}

fn assignment_strings(m: &BTreeMap<OrdinalTerm, OrdinalTerm>) -> Vec<[String; 2]> {
    m.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect()
}

pub fn write_covering(c: &Covering) -> String {
    emit(&CoveringDoc {
        pattern: PatternDoc::of(c.source()),
        assignment: assignment_strings(c.assignment()),
    })
}

/// Reads a covering file into its pattern and assignment; checking it
/// against a hierarchy is up to the caller.
pub fn read_covering(text: &str) -> Result<(Pattern, BTreeMap<OrdinalTerm, OrdinalTerm>), FormatError> {
    let doc: CoveringDoc = serde_json::from_str(body(text)?)?;
    let p = doc.pattern.pattern()?;
    let mut m = BTreeMap::new();
    for [a, b] in &doc.assignment {
        m.insert(term(a)?, term(b)?);
    }
    Ok((p, m))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    premise: PatternDoc,
    conclusion: PatternDoc,
    kind: String,
}

pub fn write_rule(r: &RuleInstance) -> String {
    emit(&RuleDoc {
        premise: PatternDoc::of(r.premise()),
        conclusion: PatternDoc::of(r.conclusion()),
        kind: r.kind().to_string(),
    })
}

pub fn read_rule(text: &str) -> Result<RuleInstance, FormatError> {
    let doc: RuleDoc = serde_json::from_str(body(text)?)?;
    let kind: RuleKind = doc.kind.parse().map_err(FormatError::Invalid)?;
    make_with_kind(&doc.premise.pattern()?, &doc.conclusion.pattern()?, kind).map_err(|e| FormatError::Invalid(e.to_string()))
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
enum VerdictDoc {
    ValidOnSample {
        coverings: usize,
        phis: usize,
    },
    Counterexample {
        assignment: Vec<[String; 2]>,
        phi: Vec<[String; 2]>,
    },
}

fn phi_strings(phi: &RegressiveMap) -> Vec<[String; 2]> {
    assignment_strings(phi.bounds())
}

/// JSON body (no header) describing a verdict.
pub fn verdict_json(v: &Verdict) -> String {
    let doc = match v {
        Verdict::ValidOnSample { coverings, phis } => VerdictDoc::ValidOnSample {
            coverings: *coverings,
            phis: *phis,
        },
        Verdict::Counterexample { covering, phi } => VerdictDoc::Counterexample {
            assignment: assignment_strings(covering.assignment()),
            phi: phi_strings(phi),
        },
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}
