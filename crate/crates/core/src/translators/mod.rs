//! Translations into LDQL from property-path patterns under context-based
//! semantics, from NautiLOD expressions, and from reachability-based SPARQL.
//!
//! Each translation has a matching brute-force evaluator in
//! [`crate::reference`]; the pairs are checked for extensional equality.

mod nautilod;
mod pp;
mod reach;
mod surface;

pub use nautilod::{trans_n, translate_nautilod};
pub use pp::translate_pp;
pub use reach::{reach_lpe, translate_reachability};
pub use surface::{parse_nautilod, parse_pp_pattern};

use crate::rdf::{Literal, RdfTerm, Uri};
use crate::sparql::{GraphPattern, TermPattern, Variable};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PpExpr {
    Pred(Uri),
    /// `!(u1|...|uk)`; never empty.
    NegSet(Vec<Uri>),
    Seq(Box<PpExpr>, Box<PpExpr>),
    Alt(Box<PpExpr>, Box<PpExpr>),
    Star(Box<PpExpr>),
}

impl PpExpr {
    pub fn pred(u: &str) -> Self {
        PpExpr::Pred(Uri::new(u))
    }

    /// `None` for an empty set.
    pub fn neg_set(us: impl IntoIterator<Item = Uri>) -> Option<Self> {
        let us: Vec<Uri> = us.into_iter().collect();
        (!us.is_empty()).then_some(PpExpr::NegSet(us))
    }

    pub fn seq(a: PpExpr, b: PpExpr) -> Self {
        PpExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn alt(a: PpExpr, b: PpExpr) -> Self {
        PpExpr::Alt(Box::new(a), Box::new(b))
    }

    pub fn star(a: PpExpr) -> Self {
        PpExpr::Star(Box::new(a))
    }

    fn precedence(&self) -> u8 {
        match self {
            PpExpr::Alt(..) => 0,
            PpExpr::Seq(..) => 1,
            PpExpr::Star(..) => 2,
            PpExpr::Pred(_) | PpExpr::NegSet(_) => 3,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(0, f)?;
            return f.write_str(")");
        }
        match self {
            PpExpr::Pred(u) => write!(f, "{u}"),
            PpExpr::NegSet(us) => {
                f.write_str("!(")?;
                for (i, u) in us.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{u}")?;
                }
                f.write_str(")")
            }
            PpExpr::Seq(a, b) => {
                a.fmt_at(1, f)?;
                f.write_str("/")?;
                b.fmt_at(2, f)
            }
            PpExpr::Alt(a, b) => {
                a.fmt_at(0, f)?;
                f.write_str("|")?;
                b.fmt_at(1, f)
            }
            PpExpr::Star(a) => {
                a.fmt_at(3, f)?;
                f.write_str("*")
            }
        }
    }
}

impl fmt::Display for PpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PpEndpoint {
    Uri(Uri),
    Literal(Literal),
    Var(Variable),
}

impl PpEndpoint {
    pub fn var(name: &str) -> Self {
        PpEndpoint::Var(Variable::new(name))
    }

    pub fn uri(u: &str) -> Self {
        PpEndpoint::Uri(Uri::new(u))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            PpEndpoint::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_term(&self) -> Option<RdfTerm> {
        match self {
            PpEndpoint::Uri(u) => Some(RdfTerm::Uri(u.clone())),
            PpEndpoint::Literal(l) => Some(RdfTerm::Literal(l.clone())),
            PpEndpoint::Var(_) => None,
        }
    }

    pub fn to_term_pattern(&self) -> TermPattern {
        match self {
            PpEndpoint::Var(v) => TermPattern::Var(v.clone()),
            _ => TermPattern::Term(self.as_term().expect("constant endpoint")),
        }
    }
}

impl fmt::Display for PpEndpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PpEndpoint::Uri(u) => write!(f, "{u}"),
            PpEndpoint::Literal(l) => write!(f, "{l}"),
            PpEndpoint::Var(v) => write!(f, "{v}"),
        }
    }
}

/// `(alpha, pp, beta)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PpPattern {
    pub alpha: PpEndpoint,
    pub pp: PpExpr,
    pub beta: PpEndpoint,
}

impl PpPattern {
    pub fn new(alpha: PpEndpoint, pp: PpExpr, beta: PpEndpoint) -> Self {
        PpPattern { alpha, pp, beta }
    }

    /// `{alpha, beta} ∩ V`, the domain of every solution.
    pub fn vars(&self) -> std::collections::BTreeSet<Variable> {
        [&self.alpha, &self.beta].into_iter().filter_map(|e| e.as_var().cloned()).collect()
    }

    pub fn uris(&self) -> std::collections::BTreeSet<Uri> {
        let mut out = std::collections::BTreeSet::new();
        for e in [&self.alpha, &self.beta] {
            if let PpEndpoint::Uri(u) = e {
                out.insert(u.clone());
            }
        }
        collect_pp_uris(&self.pp, &mut out);
        out
    }
}

fn collect_pp_uris(e: &PpExpr, out: &mut std::collections::BTreeSet<Uri>) {
    match e {
        PpExpr::Pred(u) => {
            out.insert(u.clone());
        }
        PpExpr::NegSet(us) => out.extend(us.iter().cloned()),
        PpExpr::Seq(a, b) | PpExpr::Alt(a, b) => {
            collect_pp_uris(a, out);
            collect_pp_uris(b, out);
        }
        PpExpr::Star(a) => collect_pp_uris(a, out),
    }
}

impl fmt::Display for PpPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.alpha, self.pp, self.beta)
    }
}

impl FromStr for PpPattern {
    type Err = crate::lang::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pp_pattern(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NautilodExpr {
    /// `p`
    Fwd(Uri),
    /// `p^`
    Bwd(Uri),
    /// `<_>`, any outgoing triple of the current URI.
    AnyFwd,
    Seq(Box<NautilodExpr>, Box<NautilodExpr>),
    Alt(Box<NautilodExpr>, Box<NautilodExpr>),
    Star(Box<NautilodExpr>),
    /// `n[ASK P]`
    AskTest(Box<NautilodExpr>, GraphPattern),
}

impl NautilodExpr {
    pub fn fwd(u: &str) -> Self {
        NautilodExpr::Fwd(Uri::new(u))
    }

    pub fn bwd(u: &str) -> Self {
        NautilodExpr::Bwd(Uri::new(u))
    }

    pub fn seq(a: NautilodExpr, b: NautilodExpr) -> Self {
        NautilodExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn alt(a: NautilodExpr, b: NautilodExpr) -> Self {
        NautilodExpr::Alt(Box::new(a), Box::new(b))
    }

    pub fn star(a: NautilodExpr) -> Self {
        NautilodExpr::Star(Box::new(a))
    }

    pub fn ask(a: NautilodExpr, p: GraphPattern) -> Self {
        NautilodExpr::AskTest(Box::new(a), p)
    }

    /// Whether `u ∈ ⟦n⟧u` for every retrievable `u`.
    pub fn nullable(&self) -> bool {
        match self {
            NautilodExpr::Fwd(_) | NautilodExpr::Bwd(_) | NautilodExpr::AnyFwd | NautilodExpr::AskTest(..) => false,
            NautilodExpr::Seq(a, b) => a.nullable() && b.nullable(),
            NautilodExpr::Alt(a, b) => a.nullable() || b.nullable(),
            NautilodExpr::Star(_) => true,
        }
    }

    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<Variable>) {
        match self {
            NautilodExpr::Fwd(_) | NautilodExpr::Bwd(_) | NautilodExpr::AnyFwd => {}
            NautilodExpr::Seq(a, b) | NautilodExpr::Alt(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            NautilodExpr::Star(a) => a.collect_vars(out),
            NautilodExpr::AskTest(a, p) => {
                a.collect_vars(out);
                p.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            NautilodExpr::Alt(..) => 0,
            NautilodExpr::Seq(..) => 1,
            NautilodExpr::Star(..) | NautilodExpr::AskTest(..) => 2,
            NautilodExpr::Fwd(_) | NautilodExpr::Bwd(_) | NautilodExpr::AnyFwd => 3,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(0, f)?;
            return f.write_str(")");
        }
        match self {
            NautilodExpr::Fwd(u) => write!(f, "{u}"),
            NautilodExpr::Bwd(u) => write!(f, "{u}^"),
            NautilodExpr::AnyFwd => f.write_str("<>"),
            NautilodExpr::Seq(a, b) => {
                a.fmt_at(1, f)?;
                f.write_str("/")?;
                b.fmt_at(2, f)
            }
            NautilodExpr::Alt(a, b) => {
                a.fmt_at(0, f)?;
                f.write_str("|")?;
                b.fmt_at(1, f)
            }
            NautilodExpr::Star(a) => {
                a.fmt_at(2, f)?;
                f.write_str("*")
            }
            NautilodExpr::AskTest(a, p) => {
                a.fmt_at(2, f)?;
                write!(f, "[ASK {p}]")
            }
        }
    }
}

impl fmt::Display for NautilodExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}

impl FromStr for NautilodExpr {
    type Err = crate::lang::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_nautilod(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ReachCriterion {
    /// Follow every data link.
    All,
    /// Follow no data link.
    None,
    /// Follow links whose triple matches some triple pattern of the query.
    Match,
}

impl fmt::Display for ReachCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReachCriterion::All => "all",
            ReachCriterion::None => "none",
            ReachCriterion::Match => "match",
        })
    }
}

impl FromStr for ReachCriterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(ReachCriterion::All),
            "none" => Ok(ReachCriterion::None),
            "match" => Ok(ReachCriterion::Match),
            other => Err(format!("unknown reachability criterion '{other}' (expected all, none or match)")),
        }
    }
}
