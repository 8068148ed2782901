//! Ordinals below ε₀ in Cantor normal form, with `0` and `+`.
//!
//! A term `ω^γ₁ + … + ω^γₖ` is stored as its exponent sequence `⟨γ₁, …, γₖ⟩`
//! in non-increasing order. With that representation the derived
//! lexicographic ordering on the sequence is exactly the ordinal order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// An ordinal below ε₀ in Cantor normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrdinalTerm {
    exps: Vec<OrdinalTerm>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("summands not in non-increasing order: `{0}`")]
    NonCanonical(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("indecomposable {0} of the domain has no image")]
    MissingIndecomposable(OrdinalTerm),
    #[error("image {image} of {source_term} is not indecomposable")]
    ImageNotIndecomposable {
        source_term: OrdinalTerm,
        image: OrdinalTerm,
    },
    #[error("map is not strictly order-preserving at {lower} < {upper}")]
    NotOrderPreserving {
        lower: OrdinalTerm,
        upper: OrdinalTerm,
    },
    #[error("image of {0} is not in Cantor normal form")]
    NonCanonicalImage(OrdinalTerm),
}

impl OrdinalTerm {
    pub fn zero() -> Self {
        OrdinalTerm { exps: Vec::new() }
    }

    pub fn one() -> Self {
        Self::omega_pow(Self::zero())
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^e`.
    pub fn omega_pow(e: OrdinalTerm) -> Self {
        OrdinalTerm { exps: vec![e] }
    }

    /// The natural number `n` as `1 + … + 1`.
    pub fn natural(n: usize) -> Self {
        OrdinalTerm {
            exps: vec![Self::zero(); n],
        }
    }

    /// Builds a term from its exponents, which must be non-increasing.
    pub fn from_exponents(exps: Vec<OrdinalTerm>) -> Option<Self> {
        if exps.windows(2).all(|w| w[0] >= w[1]) {
            Some(OrdinalTerm { exps })
        } else {
            None
        }
    }

    pub fn exponents(&self) -> &[OrdinalTerm] {
        &self.exps
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    /// True iff the term is `ω^γ` for some `γ`. Zero is not indecomposable.
    pub fn is_indecomposable(&self) -> bool {
        self.exps.len() == 1
    }

    /// Nonzero and not a successor.
    pub fn is_limit(&self) -> bool {
        self.exps.last().is_some_and(|e| !e.is_zero())
    }

    pub fn summand_count(&self) -> usize {
        self.exps.len()
    }

    /// The indecomposable summands, largest first.
    pub fn summands(&self) -> impl Iterator<Item = OrdinalTerm> + '_ {
        self.exps.iter().cloned().map(OrdinalTerm::omega_pow)
    }

    /// Splits `α = ρ + ω^γ` into `(ρ, ω^γ)`; `None` for zero.
    pub fn split_last(&self) -> Option<(OrdinalTerm, OrdinalTerm)> {
        let (last, rest) = self.exps.split_last()?;
        Some((
            OrdinalTerm {
                exps: rest.to_vec(),
            },
            OrdinalTerm::omega_pow(last.clone()),
        ))
    }

    /// Ordinal addition. Summands of `self` below the leading summand of
    /// `rhs` are absorbed.
    pub fn add(&self, rhs: &OrdinalTerm) -> OrdinalTerm {
        let Some(lead) = rhs.exps.first() else {
            return self.clone();
        };
        let mut exps: Vec<OrdinalTerm> =
            self.exps.iter().take_while(|e| *e >= lead).cloned().collect();
        exps.extend(rhs.exps.iter().cloned());
        OrdinalTerm { exps }
    }

    /// Renders with the `w` and numeral abbreviations.
    pub fn sugar(&self) -> Sugared<'_> {
        Sugared(self)
    }

    /// `Some(n)` when the term is the natural number `n`.
    pub fn as_natural(&self) -> Option<usize> {
        self.exps.iter().all(|e| e.is_zero()).then_some(self.exps.len())
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, sugar: bool) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("0");
        }
        if sugar {
            let finite = self.exps.iter().rev().take_while(|e| e.is_zero()).count();
            let infinite = &self.exps[..self.exps.len() - finite];
            for (i, e) in infinite.iter().enumerate() {
                if i > 0 {
                    f.write_str("+")?;
                }
                match e.as_natural() {
                    Some(1) => f.write_str("w")?,
                    Some(n) => write!(f, "w^({n})")?,
                    None => {
                        f.write_str("w^(")?;
                        e.write(f, true)?;
                        f.write_str(")")?;
                    }
                }
            }
            if finite > 0 {
                if !infinite.is_empty() {
                    f.write_str("+")?;
                }
                write!(f, "{finite}")?;
            }
            return Ok(());
        }
        for (i, e) in self.exps.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            f.write_str("w^(")?;
            e.write(f, false)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for OrdinalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, false)
    }
}

pub struct Sugared<'a>(&'a OrdinalTerm);

impl fmt::Display for Sugared<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, true)
    }
}

impl FromStr for OrdinalTerm {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

/// Parses `T ::= "0" | S ("+" S)*`, `S ::= "w^(" T ")" | "1" | "w" | digits`.
///
/// Summands must already be in non-increasing order; `1+w` is rejected
/// rather than normalized. A decimal numeral `n ≥ 1` abbreviates `1+…+1`.
pub fn parse_term(text: &str) -> Result<OrdinalTerm, ParseError> {
    let stripped: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser {
        src: stripped.as_bytes(),
        pos: 0,
    };
    let t = p.term()?;
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<OrdinalTerm, ParseError> {
        let start = self.pos;
        if self.peek() == Some(b'0') {
            self.pos += 1;
            return Ok(OrdinalTerm::zero());
        }
        let mut exps = self.summand()?;
        while self.eat("+") {
            exps.extend(self.summand()?);
        }
        OrdinalTerm::from_exponents(exps).ok_or_else(|| {
            ParseError::NonCanonical(String::from_utf8_lossy(&self.src[start..self.pos]).into())
        })
    }

    fn summand(&mut self) -> Result<Vec<OrdinalTerm>, ParseError> {
        if self.eat("w^(") {
            let e = self.term()?;
            if !self.eat(")") {
                return Err(self.err("expected `)`"));
            }
            return Ok(vec![e]);
        }
        if self.eat("w") {
            return Ok(vec![OrdinalTerm::one()]);
        }
        match self.peek() {
            Some(b'1'..=b'9') => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let n: usize = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| self.err("numeral too large"))?;
                Ok(vec![OrdinalTerm::zero(); n])
            }
            _ => Err(self.err("expected `w^(`, `w`, or a numeral")),
        }
    }
}

/// A finite set of terms containing 0 and closed under splitting off the
/// last summand: for `α = ρ + ω^γ` both `ρ` and `ω^γ` are members.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ClosedSet {
    elems: BTreeSet<OrdinalTerm>,
}

impl ClosedSet {
    /// Checks closedness; returns the first missing term on failure.
    pub fn new(elems: BTreeSet<OrdinalTerm>) -> Result<Self, OrdinalTerm> {
        if let Some(missing) = first_missing(&elems) {
            return Err(missing);
        }
        Ok(ClosedSet { elems })
    }

    pub fn contains(&self, t: &OrdinalTerm) -> bool {
        self.elems.contains(t)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &OrdinalTerm> + ExactSizeIterator {
        self.elems.iter()
    }

    pub fn as_set(&self) -> &BTreeSet<OrdinalTerm> {
        &self.elems
    }

    pub fn to_vec(&self) -> Vec<OrdinalTerm> {
        self.elems.iter().cloned().collect()
    }

    pub fn indecomposables(&self) -> impl Iterator<Item = &OrdinalTerm> {
        self.elems.iter().filter(|t| t.is_indecomposable())
    }

    pub fn max(&self) -> &OrdinalTerm {
        self.elems.iter().next_back().expect("closed sets contain 0")
    }
}

/// First term required by the closure condition but absent, if any.
pub fn first_missing(elems: &BTreeSet<OrdinalTerm>) -> Option<OrdinalTerm> {
    if !elems.contains(&OrdinalTerm::zero()) {
        return Some(OrdinalTerm::zero());
    }
    for t in elems {
        if t.summand_count() >= 2 {
            let (rest, last) = t.split_last().unwrap();
            if !elems.contains(&rest) {
                return Some(rest);
            }
            if !elems.contains(&last) {
                return Some(last);
            }
        }
    }
    None
}

/// The least closed superset of `xs`.
pub fn closure<'a>(xs: impl IntoIterator<Item = &'a OrdinalTerm>) -> ClosedSet {
    let mut elems = BTreeSet::new();
    elems.insert(OrdinalTerm::zero());
    for x in xs {
        let mut cur = x.clone();
        while !cur.is_zero() && elems.insert(cur.clone()) {
            let (rest, last) = cur.split_last().unwrap();
            elems.insert(last);
            cur = rest;
        }
    }
    ClosedSet { elems }
}

/// Extends a map on indecomposables to the unique `+`-homomorphism on `domain`.
pub fn induced_embedding(
    indec_map: &BTreeMap<OrdinalTerm, OrdinalTerm>,
    domain: &ClosedSet,
) -> Result<BTreeMap<OrdinalTerm, OrdinalTerm>, EmbeddingError> {
    let mut prev: Option<(&OrdinalTerm, &OrdinalTerm)> = None;
    for a in domain.indecomposables() {
        let img = indec_map
            .get(a)
            .ok_or_else(|| EmbeddingError::MissingIndecomposable(a.clone()))?;
        if !img.is_indecomposable() {
            return Err(EmbeddingError::ImageNotIndecomposable {
                source_term: a.clone(),
                image: img.clone(),
            });
        }
        if let Some((pa, pimg)) = prev {
            if pimg >= img {
                return Err(EmbeddingError::NotOrderPreserving {
                    lower: pa.clone(),
                    upper: a.clone(),
                });
            }
        }
        prev = Some((a, img));
    }
    let mut out = BTreeMap::new();
    for x in domain.iter() {
        let exps: Vec<OrdinalTerm> = x
            .summands()
            .map(|s| indec_map[&s].exps[0].clone())
            .collect();
        let img = OrdinalTerm::from_exponents(exps)
            .ok_or_else(|| EmbeddingError::NonCanonicalImage(x.clone()))?;
        out.insert(x.clone(), img);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> OrdinalTerm {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        assert!(t("0").exponents().is_empty());
        let w1 = t("w^(1)+1");
        assert_eq!(w1.exponents(), &[OrdinalTerm::one(), OrdinalTerm::zero()]);
        assert_eq!(w1, OrdinalTerm::omega().add(&OrdinalTerm::one()));
        assert!(matches!(parse_term("1+w"), Err(ParseError::NonCanonical(_))));
        assert!(matches!(parse_term("w^(1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_term(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_term("0+1"), Err(ParseError::Syntax { .. })));
        assert_eq!(t("w^(2)"), t("w^(1+1)"));
        assert_eq!(t("3"), OrdinalTerm::natural(3));
    }

    #[test]
    fn printing() {
        let x = t("w^(w)+w+1");
        assert_eq!(x.to_string(), "w^(w^(w^(0)))+w^(w^(0))+w^(0)");
        assert_eq!(x.sugar().to_string(), "w^(w)+w+1");
        assert_eq!(t("0").to_string(), "0");
        assert_eq!(t("w^(2)").sugar().to_string(), "w^(2)");
        assert_eq!(t("w^(w+1)+w+w+3").sugar().to_string(), "w^(w+1)+w+w+3");
        assert_eq!(t("1").sugar().to_string(), "1");
    }

    #[test]
    fn compare_examples() {
        use std::cmp::Ordering::*;
        assert_eq!(t("0").cmp(&t("1")), Less);
        assert_eq!(t("w").cmp(&t("w")), Equal);
        assert_eq!(t("w+1").cmp(&t("w+w")), Less);
        assert_eq!(t("w^(w)").cmp(&t("w^(5)+w^(4)")), Greater);
    }

    #[test]
    fn add_examples() {
        assert_eq!(t("0").add(&t("w")), t("w"));
        assert_eq!(t("1").add(&t("w")), t("w"));
        assert_eq!(t("w").add(&t("1")), t("w+1"));
        assert_eq!(t("w^(2)+w+1").add(&t("w+w")), t("w^(2)+w+w+w"));
    }

    #[test]
    fn indecomposability() {
        assert!(t("w").is_indecomposable());
        assert!(t("1").is_indecomposable());
        assert!(!t("w+1").is_indecomposable());
        assert!(!t("0").is_indecomposable());
    }

    #[test]
    fn closure_examples() {
        assert_eq!(closure([]).to_vec(), vec![t("0")]);
        assert_eq!(
            closure([&t("w+1")]).to_vec(),
            vec![t("0"), t("1"), t("w"), t("w+1")]
        );
        assert_eq!(
            closure([&t("w+w")]).to_vec(),
            vec![t("0"), t("w"), t("w+w")]
        );
        assert_eq!(closure([&t("w^(2)")]).to_vec(), vec![t("0"), t("w^(2)")]);
        let bad: BTreeSet<_> = [t("0"), t("w+1")].into_iter().collect();
        assert_eq!(ClosedSet::new(bad), Err(t("w")));
    }

    #[test]
    fn induced_embedding_examples() {
        let x = closure([&t("w+1")]);
        let id: BTreeMap<_, _> = [(t("1"), t("1")), (t("w"), t("w"))].into();
        let m = induced_embedding(&id, &x).unwrap();
        assert!(m.iter().all(|(a, b)| a == b));

        let f: BTreeMap<_, _> = [(t("1"), t("1")), (t("w"), t("w^(2)"))].into();
        let m = induced_embedding(&f, &x).unwrap();
        let expected: BTreeMap<_, _> = [
            (t("0"), t("0")),
            (t("1"), t("1")),
            (t("w"), t("w^(2)")),
            (t("w+1"), t("w^(2)+1")),
        ]
        .into();
        assert_eq!(m, expected);

        let swap: BTreeMap<_, _> = [(t("1"), t("w")), (t("w"), t("1"))].into();
        assert!(matches!(
            induced_embedding(&swap, &x),
            Err(EmbeddingError::NotOrderPreserving { .. })
        ));
        let dec: BTreeMap<_, _> = [(t("1"), t("1")), (t("w"), t("w+1"))].into();
        assert!(matches!(
            induced_embedding(&dec, &x),
            Err(EmbeddingError::ImageNotIndecomposable { .. })
        ));
        let partial: BTreeMap<_, _> = [(t("1"), t("1"))].into();
        assert_eq!(
            induced_embedding(&partial, &x),
            Err(EmbeddingError::MissingIndecomposable(t("w")))
        );
    }
}
