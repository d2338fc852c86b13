//! The SPARQL graph-pattern fragment used inside basic LDQL queries:
//! BGPs combined with AND, OPT, UNION, FILTER, GRAPH and BIND, under set semantics.

mod eval;

pub use eval::{eval_expr, eval_pattern, ExprValue};

use crate::rdf::{RdfTerm, Uri};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// A query variable, stored without the `?` sigil.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl AsRef<str>) -> Self {
        let name = name.as_ref();
        assert!(!name.is_empty(), "empty variable name");
        Variable(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// Serialized with its `?` sigil.
impl serde::Serialize for Variable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Variable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        match text.strip_prefix('?').unwrap_or(&text) {
            "" => Err(serde::de::Error::custom("empty variable name")),
            name => Ok(Variable::new(name)),
        }
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TermPattern {
    Var(Variable),
    Term(RdfTerm),
}

impl TermPattern {
    pub fn var(name: &str) -> Self {
        TermPattern::Var(Variable::new(name))
    }

    pub fn uri(s: &str) -> Self {
        TermPattern::Term(RdfTerm::uri(s))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            TermPattern::Var(v) => Some(v),
            TermPattern::Term(_) => None,
        }
    }
}

impl From<Variable> for TermPattern {
    fn from(v: Variable) -> Self {
        TermPattern::Var(v)
    }
}

impl From<RdfTerm> for TermPattern {
    fn from(t: RdfTerm) -> Self {
        TermPattern::Term(t)
    }
}

impl From<Uri> for TermPattern {
    fn from(u: Uri) -> Self {
        TermPattern::Term(RdfTerm::Uri(u))
    }
}

impl fmt::Display for TermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPattern::Var(v) => write!(f, "{v}"),
            TermPattern::Term(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TriplePattern {
    pub s: TermPattern,
    pub p: TermPattern,
    pub o: TermPattern,
}

impl TriplePattern {
    pub fn new(s: impl Into<TermPattern>, p: impl Into<TermPattern>, o: impl Into<TermPattern>) -> Self {
        TriplePattern { s: s.into(), p: p.into(), o: o.into() }
    }

    pub fn positions(&self) -> [&TermPattern; 3] {
        [&self.s, &self.p, &self.o]
    }

    pub fn vars(&self) -> impl Iterator<Item = &Variable> {
        self.positions().into_iter().filter_map(TermPattern::as_var)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.s, self.p, self.o)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GraphTarget {
    Uri(Uri),
    Var(Variable),
}

impl fmt::Display for GraphTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphTarget::Uri(u) => write!(f, "{u}"),
            GraphTarget::Var(v) => write!(f, "{v}"),
        }
    }
}

/// Filter and BIND expressions: equality and boolean connectives only.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Expr {
    Eq(Box<Expr>, Box<Expr>),
    Neq(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Const(RdfTerm),
    Var(Variable),
}

impl Expr {
    pub fn eq(a: Expr, b: Expr) -> Self {
        Expr::Eq(Box::new(a), Box::new(b))
    }

    pub fn neq(a: Expr, b: Expr) -> Self {
        Expr::Neq(Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Self {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Self {
        Expr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Expr) -> Self {
        Expr::Not(Box::new(a))
    }

    pub fn term(t: &TermPattern) -> Self {
        match t {
            TermPattern::Var(v) => Expr::Var(v.clone()),
            TermPattern::Term(t) => Expr::Const(t.clone()),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Expr::Eq(a, b) | Expr::Neq(a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Not(a) => a.collect_vars(out),
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Eq(a, b) => write!(f, "({a} = {b})"),
            Expr::Neq(a, b) => write!(f, "({a} != {b})"),
            Expr::And(a, b) => write!(f, "({a} && {b})"),
            Expr::Or(a, b) => write!(f, "({a} || {b})"),
            Expr::Not(a) => write!(f, "!{a}"),
            Expr::Const(t) => write!(f, "{t}"),
            Expr::Var(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GraphPattern {
    /// Evaluated as a set; the order only matters for printing.
    Bgp(Vec<TriplePattern>),
    And(Box<GraphPattern>, Box<GraphPattern>),
    Opt(Box<GraphPattern>, Box<GraphPattern>),
    Union(Box<GraphPattern>, Box<GraphPattern>),
    Filter(Box<GraphPattern>, Expr),
    Graph(GraphTarget, Box<GraphPattern>),
    Bind(Box<GraphPattern>, Expr, Variable),
}

impl GraphPattern {
    pub fn empty() -> Self {
        GraphPattern::Bgp(Vec::new())
    }

    pub fn triple(s: impl Into<TermPattern>, p: impl Into<TermPattern>, o: impl Into<TermPattern>) -> Self {
        GraphPattern::Bgp(vec![TriplePattern::new(s, p, o)])
    }

    pub fn and(a: GraphPattern, b: GraphPattern) -> Self {
        GraphPattern::And(Box::new(a), Box::new(b))
    }

    pub fn opt(a: GraphPattern, b: GraphPattern) -> Self {
        GraphPattern::Opt(Box::new(a), Box::new(b))
    }

    pub fn union(a: GraphPattern, b: GraphPattern) -> Self {
        GraphPattern::Union(Box::new(a), Box::new(b))
    }

    pub fn filter(a: GraphPattern, e: Expr) -> Self {
        GraphPattern::Filter(Box::new(a), e)
    }

    pub fn graph(g: GraphTarget, a: GraphPattern) -> Self {
        GraphPattern::Graph(g, Box::new(a))
    }

    pub fn graph_var(v: &Variable, a: GraphPattern) -> Self {
        GraphPattern::Graph(GraphTarget::Var(v.clone()), Box::new(a))
    }

    pub fn bind(a: GraphPattern, e: Expr, v: Variable) -> Self {
        GraphPattern::Bind(Box::new(a), e, v)
    }

    /// Every variable mentioned anywhere, including FILTER and BIND.
    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            GraphPattern::Bgp(tps) => out.extend(tps.iter().flat_map(|t| t.vars().cloned())),
            GraphPattern::And(a, b) | GraphPattern::Opt(a, b) | GraphPattern::Union(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            GraphPattern::Filter(a, e) => {
                a.collect_vars(out);
                e.collect_vars(out);
            }
            GraphPattern::Graph(g, a) => {
                if let GraphTarget::Var(v) = g {
                    out.insert(v.clone());
                }
                a.collect_vars(out);
            }
            GraphPattern::Bind(a, e, v) => {
                a.collect_vars(out);
                e.collect_vars(out);
                out.insert(v.clone());
            }
        }
    }

    /// Every triple pattern, in order of appearance.
    pub fn triple_patterns(&self) -> Vec<&TriplePattern> {
        let mut out = Vec::new();
        self.walk_triples(&mut out);
        out
    }

    fn walk_triples<'a>(&'a self, out: &mut Vec<&'a TriplePattern>) {
        match self {
            GraphPattern::Bgp(tps) => out.extend(tps.iter()),
            GraphPattern::And(a, b) | GraphPattern::Opt(a, b) | GraphPattern::Union(a, b) => {
                a.walk_triples(out);
                b.walk_triples(out);
            }
            GraphPattern::Filter(a, _) | GraphPattern::Graph(_, a) | GraphPattern::Bind(a, _, _) => a.walk_triples(out),
        }
    }

    pub fn mentions_graph(&self) -> bool {
        match self {
            GraphPattern::Bgp(_) => false,
            GraphPattern::Graph(..) => true,
            GraphPattern::And(a, b) | GraphPattern::Opt(a, b) | GraphPattern::Union(a, b) => {
                a.mentions_graph() || b.mentions_graph()
            }
            GraphPattern::Filter(a, _) | GraphPattern::Bind(a, _, _) => a.mentions_graph(),
        }
    }

    /// Every URI constant in triple patterns, GRAPH targets and expressions.
    pub fn collect_uris(&self, out: &mut BTreeSet<Uri>) {
        fn expr_uris(e: &Expr, out: &mut BTreeSet<Uri>) {
            match e {
                Expr::Eq(a, b) | Expr::Neq(a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                    expr_uris(a, out);
                    expr_uris(b, out);
                }
                Expr::Not(a) => expr_uris(a, out),
                Expr::Const(RdfTerm::Uri(u)) => {
                    out.insert(u.clone());
                }
                Expr::Const(_) | Expr::Var(_) => {}
            }
        }
        match self {
            GraphPattern::Bgp(tps) => {
                for tp in tps {
                    for t in tp.positions() {
                        if let TermPattern::Term(RdfTerm::Uri(u)) = t {
                            out.insert(u.clone());
                        }
                    }
                }
            }
            GraphPattern::And(a, b) | GraphPattern::Opt(a, b) | GraphPattern::Union(a, b) => {
                a.collect_uris(out);
                b.collect_uris(out);
            }
            GraphPattern::Filter(a, e) => {
                a.collect_uris(out);
                expr_uris(e, out);
            }
            GraphPattern::Graph(g, a) => {
                if let GraphTarget::Uri(u) = g {
                    out.insert(u.clone());
                }
                a.collect_uris(out);
            }
            GraphPattern::Bind(a, e, _) => {
                a.collect_uris(out);
                expr_uris(e, out);
            }
        }
    }
}

/// A partial map from variables to terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SolutionMapping(BTreeMap<Variable, RdfTerm>);

impl SolutionMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Variable) -> Option<&RdfTerm> {
        self.0.get(v)
    }

    /// Returns the previous binding, if any.
    pub fn insert(&mut self, v: Variable, t: RdfTerm) -> Option<RdfTerm> {
        self.0.insert(v, t)
    }

    pub fn with(mut self, v: &str, t: RdfTerm) -> Self {
        self.0.insert(Variable::new(v), t);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &RdfTerm)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Variable> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn restrict(&self, vars: &BTreeSet<Variable>) -> Self {
        SolutionMapping(self.0.iter().filter(|(k, _)| vars.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect())
    }

    pub fn merge(&self, other: &SolutionMapping) -> Option<SolutionMapping> {
        if !compatible(self, other) {
            return None;
        }
        let mut m = self.clone();
        m.0.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        Some(m)
    }
}

impl FromIterator<(Variable, RdfTerm)> for SolutionMapping {
    fn from_iter<I: IntoIterator<Item = (Variable, RdfTerm)>>(iter: I) -> Self {
        SolutionMapping(iter.into_iter().collect())
    }
}

/// Variables sorted by name: `?w=<uC> ?x=<uA>`.
impl fmt::Display for SolutionMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SolutionMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

pub fn compatible(m1: &SolutionMapping, m2: &SolutionMapping) -> bool {
    let (small, large) = if m1.len() <= m2.len() { (m1, m2) } else { (m2, m1) };
    small.0.iter().all(|(k, v)| large.0.get(k).is_none_or(|w| w == v))
}

/// A set of solution mappings.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SolutionSet(BTreeSet<SolutionMapping>);

impl SolutionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{{}}`, the identity of join.
    pub fn unit() -> Self {
        SolutionSet(BTreeSet::from([SolutionMapping::new()]))
    }

    pub fn insert(&mut self, m: SolutionMapping) -> bool {
        self.0.insert(m)
    }

    pub fn contains(&self, m: &SolutionMapping) -> bool {
        self.0.contains(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SolutionMapping> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(mut self, other: SolutionSet) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn project(&self, vars: &BTreeSet<Variable>) -> Self {
        self.iter().map(|m| m.restrict(vars)).collect()
    }

    /// One mapping per line, lines sorted lexicographically.
    pub fn to_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.iter().map(|m| m.to_string()).collect();
        lines.sort();
        lines
    }
}

impl FromIterator<SolutionMapping> for SolutionSet {
    fn from_iter<I: IntoIterator<Item = SolutionMapping>>(iter: I) -> Self {
        SolutionSet(iter.into_iter().collect())
    }
}

impl IntoIterator for SolutionSet {
    type Item = SolutionMapping;
    type IntoIter = std::collections::btree_set::IntoIter<SolutionMapping>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl fmt::Debug for SolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

pub fn join(a: &SolutionSet, b: &SolutionSet) -> SolutionSet {
    let mut out = SolutionSet::new();
    for m1 in a.iter() {
        for m2 in b.iter() {
            if let Some(m) = m1.merge(m2) {
                out.insert(m);
            }
        }
    }
    out
}

/// Variables bound in every solution of `p`, over any graph and dataset.
pub fn sbvars_pattern(p: &GraphPattern) -> BTreeSet<Variable> {
    match p {
        GraphPattern::Bgp(tps) => tps.iter().flat_map(|t| t.vars().cloned()).collect(),
        GraphPattern::And(a, b) => &sbvars_pattern(a) | &sbvars_pattern(b),
        GraphPattern::Union(a, b) => &sbvars_pattern(a) & &sbvars_pattern(b),
        GraphPattern::Opt(a, _) => sbvars_pattern(a),
        GraphPattern::Filter(a, _) => sbvars_pattern(a),
        GraphPattern::Graph(g, a) => {
            let mut s = sbvars_pattern(a);
            if let GraphTarget::Var(v) = g {
                s.insert(v.clone());
            }
            s
        }
        GraphPattern::Bind(a, _, _) => sbvars_pattern(a),
    }
}
