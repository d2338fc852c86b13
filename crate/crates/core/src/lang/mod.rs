//! LDQL abstract syntax: link path expressions and queries, with the
//! strongly-bound-variable analysis, variable renaming and fresh-name supply
//! shared by desugaring, normal forms and the translators.

mod desugar;
mod lexer;
mod normal;
mod syntax;

pub use desugar::{desugar, desugar_query};
pub use normal::{
    and_atoms, is_union_free_normal_form, is_union_normal_form, rewrite_union_normal_form,
    rewrite_union_normal_form_with, union_branches, NormalFormError, DEFAULT_NODE_GUARD,
};
pub use syntax::{parse_lpe, parse_pattern, parse_query, parse_query_with, serialize_query, ParseError, ParseOptions};

pub(crate) use lexer::{Lexer, Pos, Tok};
pub(crate) use syntax::Parser;

use crate::rdf::{LinkPattern, LinkTerm, Uri};
use crate::sparql::{sbvars_pattern, Expr, GraphPattern, GraphTarget, TermPattern, TriplePattern, Variable};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Lpe {
    Epsilon,
    Pattern(LinkPattern),
    Concat(Box<Lpe>, Box<Lpe>),
    Alt(Box<Lpe>, Box<Lpe>),
    Star(Box<Lpe>),
    Test(Box<Lpe>),
    NavSub(Variable, Box<LdqlQuery>),
}

impl Lpe {
    /// Panics on a literal in subject or predicate position.
    pub fn lp(s: LinkTerm, p: LinkTerm, o: LinkTerm) -> Self {
        Lpe::Pattern(LinkPattern::new(s, p, o).expect("literal in subject or predicate of a link pattern"))
    }

    pub fn concat(a: Lpe, b: Lpe) -> Self {
        Lpe::Concat(Box::new(a), Box::new(b))
    }

    pub fn alt(a: Lpe, b: Lpe) -> Self {
        Lpe::Alt(Box::new(a), Box::new(b))
    }

    pub fn star(a: Lpe) -> Self {
        Lpe::Star(Box::new(a))
    }

    pub fn test(a: Lpe) -> Self {
        Lpe::Test(Box::new(a))
    }

    pub fn nav(v: Variable, q: LdqlQuery) -> Self {
        Lpe::NavSub(v, Box::new(q))
    }

    /// Only ε, `(?v : q)` and `*` occur, here and in every nested query.
    pub fn is_core(&self) -> bool {
        match self {
            Lpe::Epsilon => true,
            Lpe::Star(a) => a.is_core(),
            Lpe::NavSub(_, q) => q.lpes().iter().all(|l| l.is_core()),
            Lpe::Pattern(_) | Lpe::Concat(..) | Lpe::Alt(..) | Lpe::Test(_) => false,
        }
    }

    /// The queries of `(?v : q)` subexpressions, in preorder; nested queries are not entered.
    pub fn subqueries(&self) -> Vec<&LdqlQuery> {
        fn walk<'a>(l: &'a Lpe, out: &mut Vec<&'a LdqlQuery>) {
            match l {
                Lpe::Epsilon | Lpe::Pattern(_) => {}
                Lpe::Concat(a, b) | Lpe::Alt(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Lpe::Star(a) | Lpe::Test(a) => walk(a, out),
                Lpe::NavSub(_, q) => out.push(q),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Lpe::Epsilon | Lpe::Pattern(_) => 1,
            Lpe::Concat(a, b) | Lpe::Alt(a, b) => 1 + a.size() + b.size(),
            Lpe::Star(a) | Lpe::Test(a) => 1 + a.size(),
            Lpe::NavSub(_, q) => 1 + q.size(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        if let Lpe::NavSub(v, _) = self {
            out.insert(v.clone());
        }
        match self {
            Lpe::Epsilon | Lpe::Pattern(_) => {}
            Lpe::Concat(a, b) | Lpe::Alt(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Lpe::Star(a) | Lpe::Test(a) => a.collect_vars(out),
            Lpe::NavSub(_, q) => q.collect_vars(out),
        }
    }

    pub fn collect_uris(&self, out: &mut BTreeSet<Uri>) {
        match self {
            Lpe::Epsilon => {}
            Lpe::Pattern(lp) => {
                for t in lp.positions() {
                    if let LinkTerm::Uri(u) = t {
                        out.insert(u.clone());
                    }
                }
            }
            Lpe::Concat(a, b) | Lpe::Alt(a, b) => {
                a.collect_uris(out);
                b.collect_uris(out);
            }
            Lpe::Star(a) | Lpe::Test(a) => a.collect_uris(out),
            Lpe::NavSub(_, q) => q.collect_uris(out),
        }
    }

    pub fn rename(&self, m: &BTreeMap<Variable, Variable>) -> Lpe {
        match self {
            Lpe::Epsilon | Lpe::Pattern(_) => self.clone(),
            Lpe::Concat(a, b) => Lpe::concat(a.rename(m), b.rename(m)),
            Lpe::Alt(a, b) => Lpe::alt(a.rename(m), b.rename(m)),
            Lpe::Star(a) => Lpe::star(a.rename(m)),
            Lpe::Test(a) => Lpe::test(a.rename(m)),
            Lpe::NavSub(v, q) => Lpe::nav(rename_var(v, m), q.rename(m)),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LdqlQuery {
    Basic(Lpe, GraphPattern),
    SeedUris(BTreeSet<Uri>, Box<LdqlQuery>),
    SeedVar(Variable, Box<LdqlQuery>),
    And(Box<LdqlQuery>, Box<LdqlQuery>),
    Union(Box<LdqlQuery>, Box<LdqlQuery>),
    Project(BTreeSet<Variable>, Box<LdqlQuery>),
}

/// Strongly bound variables of a query.
pub type SbVarSet = BTreeSet<Variable>;

impl LdqlQuery {
    pub fn basic(l: Lpe, p: GraphPattern) -> Self {
        LdqlQuery::Basic(l, p)
    }

    pub fn seed_uris(us: impl IntoIterator<Item = Uri>, q: LdqlQuery) -> Self {
        LdqlQuery::SeedUris(us.into_iter().collect(), Box::new(q))
    }

    pub fn seed_var(v: Variable, q: LdqlQuery) -> Self {
        LdqlQuery::SeedVar(v, Box::new(q))
    }

    pub fn and(a: LdqlQuery, b: LdqlQuery) -> Self {
        LdqlQuery::And(Box::new(a), Box::new(b))
    }

    pub fn union(a: LdqlQuery, b: LdqlQuery) -> Self {
        LdqlQuery::Union(Box::new(a), Box::new(b))
    }

    pub fn project(vs: impl IntoIterator<Item = Variable>, q: LdqlQuery) -> Self {
        LdqlQuery::Project(vs.into_iter().collect(), Box::new(q))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn and_all(qs: impl IntoIterator<Item = LdqlQuery>) -> Option<Self> {
        qs.into_iter().reduce(LdqlQuery::and)
    }

    /// Left-nested union; `None` for an empty list.
    pub fn union_all(qs: impl IntoIterator<Item = LdqlQuery>) -> Option<Self> {
        qs.into_iter().reduce(LdqlQuery::union)
    }

    pub fn sbvars(&self) -> SbVarSet {
        match self {
            LdqlQuery::Basic(_, p) => sbvars_pattern(p),
            LdqlQuery::And(a, b) => &a.sbvars() | &b.sbvars(),
            LdqlQuery::Union(a, b) => &a.sbvars() & &b.sbvars(),
            LdqlQuery::Project(vs, q) => &q.sbvars() & vs,
            LdqlQuery::SeedUris(_, q) => q.sbvars(),
            LdqlQuery::SeedVar(v, q) => {
                let mut s = q.sbvars();
                s.insert(v.clone());
                s
            }
        }
    }

    /// Every LPE of a basic subquery at this level, not entering `(?v : q)`.
    pub fn lpes(&self) -> Vec<&Lpe> {
        fn walk<'a>(q: &'a LdqlQuery, out: &mut Vec<&'a Lpe>) {
            match q {
                LdqlQuery::Basic(l, _) => out.push(l),
                LdqlQuery::And(a, b) | LdqlQuery::Union(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                LdqlQuery::SeedUris(_, q) | LdqlQuery::SeedVar(_, q) | LdqlQuery::Project(_, q) => walk(q, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            LdqlQuery::Basic(l, _) => 1 + l.size(),
            LdqlQuery::And(a, b) | LdqlQuery::Union(a, b) => 1 + a.size() + b.size(),
            LdqlQuery::SeedUris(_, q) | LdqlQuery::SeedVar(_, q) | LdqlQuery::Project(_, q) => 1 + q.size(),
        }
    }

    /// Nesting depth of query and LPE operators.
    pub fn depth(&self) -> usize {
        fn lpe_depth(l: &Lpe) -> usize {
            match l {
                Lpe::Epsilon | Lpe::Pattern(_) => 0,
                Lpe::Concat(a, b) | Lpe::Alt(a, b) => 1 + lpe_depth(a).max(lpe_depth(b)),
                Lpe::Star(a) | Lpe::Test(a) => 1 + lpe_depth(a),
                Lpe::NavSub(_, q) => 1 + q.depth(),
            }
        }
        match self {
            LdqlQuery::Basic(l, _) => lpe_depth(l),
            LdqlQuery::And(a, b) | LdqlQuery::Union(a, b) => 1 + a.depth().max(b.depth()),
            LdqlQuery::SeedUris(_, q) | LdqlQuery::SeedVar(_, q) | LdqlQuery::Project(_, q) => 1 + q.depth(),
        }
    }

    /// Every variable anywhere, including nested queries.
    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            LdqlQuery::Basic(l, p) => {
                l.collect_vars(out);
                p.collect_vars(out);
            }
            LdqlQuery::And(a, b) | LdqlQuery::Union(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            LdqlQuery::SeedUris(_, q) => q.collect_vars(out),
            LdqlQuery::SeedVar(v, q) => {
                out.insert(v.clone());
                q.collect_vars(out);
            }
            LdqlQuery::Project(vs, q) => {
                out.extend(vs.iter().cloned());
                q.collect_vars(out);
            }
        }
    }

    /// Every URI mentioned anywhere, including nested queries and SEED sets.
    pub fn uris(&self) -> BTreeSet<Uri> {
        let mut out = BTreeSet::new();
        self.collect_uris(&mut out);
        out
    }

    pub fn collect_uris(&self, out: &mut BTreeSet<Uri>) {
        match self {
            LdqlQuery::Basic(l, p) => {
                l.collect_uris(out);
                p.collect_uris(out);
            }
            LdqlQuery::And(a, b) | LdqlQuery::Union(a, b) => {
                a.collect_uris(out);
                b.collect_uris(out);
            }
            LdqlQuery::SeedUris(us, q) => {
                out.extend(us.iter().cloned());
                q.collect_uris(out);
            }
            LdqlQuery::SeedVar(_, q) | LdqlQuery::Project(_, q) => q.collect_uris(out),
        }
    }

    /// Applies `m` to every variable occurrence; unmapped variables stay.
    pub fn rename(&self, m: &BTreeMap<Variable, Variable>) -> LdqlQuery {
        match self {
            LdqlQuery::Basic(l, p) => LdqlQuery::Basic(l.rename(m), rename_pattern(p, m)),
            LdqlQuery::And(a, b) => LdqlQuery::and(a.rename(m), b.rename(m)),
            LdqlQuery::Union(a, b) => LdqlQuery::union(a.rename(m), b.rename(m)),
            LdqlQuery::SeedUris(us, q) => LdqlQuery::SeedUris(us.clone(), Box::new(q.rename(m))),
            LdqlQuery::SeedVar(v, q) => LdqlQuery::seed_var(rename_var(v, m), q.rename(m)),
            LdqlQuery::Project(vs, q) => LdqlQuery::project(vs.iter().map(|v| rename_var(v, m)), q.rename(m)),
        }
    }
}

pub fn sbvars_query(q: &LdqlQuery) -> SbVarSet {
    q.sbvars()
}

fn rename_var(v: &Variable, m: &BTreeMap<Variable, Variable>) -> Variable {
    m.get(v).cloned().unwrap_or_else(|| v.clone())
}

fn rename_term(t: &TermPattern, m: &BTreeMap<Variable, Variable>) -> TermPattern {
    match t {
        TermPattern::Var(v) => TermPattern::Var(rename_var(v, m)),
        TermPattern::Term(_) => t.clone(),
    }
}

fn rename_expr(e: &Expr, m: &BTreeMap<Variable, Variable>) -> Expr {
    match e {
        Expr::Eq(a, b) => Expr::eq(rename_expr(a, m), rename_expr(b, m)),
        Expr::Neq(a, b) => Expr::neq(rename_expr(a, m), rename_expr(b, m)),
        Expr::And(a, b) => Expr::and(rename_expr(a, m), rename_expr(b, m)),
        Expr::Or(a, b) => Expr::or(rename_expr(a, m), rename_expr(b, m)),
        Expr::Not(a) => Expr::not(rename_expr(a, m)),
        Expr::Const(_) => e.clone(),
        Expr::Var(v) => Expr::Var(rename_var(v, m)),
    }
}

pub fn rename_pattern(p: &GraphPattern, m: &BTreeMap<Variable, Variable>) -> GraphPattern {
    match p {
        GraphPattern::Bgp(tps) => GraphPattern::Bgp(
            tps.iter()
                .map(|t| TriplePattern { s: rename_term(&t.s, m), p: rename_term(&t.p, m), o: rename_term(&t.o, m) })
                .collect(),
        ),
        GraphPattern::And(a, b) => GraphPattern::and(rename_pattern(a, m), rename_pattern(b, m)),
        GraphPattern::Opt(a, b) => GraphPattern::opt(rename_pattern(a, m), rename_pattern(b, m)),
        GraphPattern::Union(a, b) => GraphPattern::union(rename_pattern(a, m), rename_pattern(b, m)),
        GraphPattern::Filter(a, e) => GraphPattern::filter(rename_pattern(a, m), rename_expr(e, m)),
        GraphPattern::Graph(g, a) => {
            let g = match g {
                GraphTarget::Var(v) => GraphTarget::Var(rename_var(v, m)),
                GraphTarget::Uri(_) => g.clone(),
            };
            GraphPattern::graph(g, rename_pattern(a, m))
        }
        GraphPattern::Bind(a, e, v) => GraphPattern::bind(rename_pattern(a, m), rename_expr(e, m), rename_var(v, m)),
    }
}

/// Names of the form `_gN` are reserved for generated variables.
pub fn is_reserved(name: &str) -> bool {
    name.strip_prefix("_g").is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Supply of reserved variables `?_gN` above every index already in use.
#[derive(Clone, Debug, Default)]
pub struct FreshVars {
    next: u64,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars::default()
    }

    pub fn avoiding<'a>(vars: impl IntoIterator<Item = &'a Variable>) -> Self {
        let mut f = FreshVars::new();
        f.reserve(vars);
        f
    }

    pub fn for_query(q: &LdqlQuery) -> Self {
        FreshVars::avoiding(&q.vars())
    }

    pub fn reserve<'a>(&mut self, vars: impl IntoIterator<Item = &'a Variable>) {
        for v in vars {
            if is_reserved(v.name()) {
                if let Ok(n) = v.name()[2..].parse::<u64>() {
                    self.next = self.next.max(n + 1);
                }
            }
        }
    }

    pub fn var(&mut self) -> Variable {
        let v = Variable::new(format!("_g{}", self.next));
        self.next += 1;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_ex() -> LdqlQuery {
        parse_query("SEED ?x << eps , { ?x <p1> ?w } >>").unwrap()
    }

    fn q_ex1() -> LdqlQuery {
        parse_query("<< {_ <p1> _}* / [ {_ <p2> _} ] , { ?x <p1> ?y . ?x <p2> ?z } >>").unwrap()
    }

    fn names(s: &SbVarSet) -> Vec<&str> {
        s.iter().map(|v| v.name()).collect()
    }

    #[test]
    fn sbvars_follow_the_six_rules() {
        assert_eq!(names(&sbvars_query(&q_ex())), ["w", "x"]);
        assert_eq!(names(&sbvars_query(&q_ex1())), ["x", "y", "z"]);
        let u = LdqlQuery::union(q_ex1(), parse_query("<< eps , { ?x <p1> ?y } >>").unwrap());
        assert_eq!(names(&sbvars_query(&u)), ["x", "y"]);
        let p = LdqlQuery::project([Variable::new("y"), Variable::new("q")], q_ex1());
        assert_eq!(names(&sbvars_query(&p)), ["y"]);
    }

    #[test]
    fn fresh_variables_skip_used_reserved_indices() {
        let q = parse_query_with("<< eps , { ?_g7 <p> ?a } >>", ParseOptions { allow_reserved: true }).unwrap();
        let mut f = FreshVars::for_query(&q);
        assert_eq!(f.var().name(), "_g8");
        assert_eq!(f.var().name(), "_g9");
    }

    #[test]
    fn reserved_names() {
        assert!(is_reserved("_g0"));
        assert!(is_reserved("_g12"));
        assert!(!is_reserved("_g"));
        assert!(!is_reserved("_gx"));
        assert!(!is_reserved("g1"));
    }

    #[test]
    fn rename_reaches_nested_queries() {
        let q = parse_query("<< (?w : << eps , { ?w <p> ?x } >>) , { ?x <p> ?w } >>").unwrap();
        let m = BTreeMap::from([(Variable::new("w"), Variable::new("o"))]);
        let r = q.rename(&m);
        assert_eq!(serialize_query(&r), "<< (?o : << eps , { ?o <p> ?x } >>) , { ?x <p> ?o } >>");
    }

    #[test]
    fn core_detection() {
        assert!(!q_ex1().lpes()[0].is_core());
        assert!(parse_lpe("(?v : << eps* , { } >>)*").unwrap().is_core());
        assert!(!parse_lpe("(?v : << {+ _ _} , { } >>)").unwrap().is_core());
    }
}
