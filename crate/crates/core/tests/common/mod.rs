//! Seeded random generators shared by the property and acceptance tests.
#![allow(dead_code)]

use ldql::lang::{LdqlQuery, Lpe};
use ldql::rdf::{BlankNode, DocId, Document, Graph, LinkTerm, RdfTerm, RdfTriple, Uri, WebOfLinkedData};
use ldql::sparql::{Expr, GraphPattern, GraphTarget, TermPattern, TriplePattern, Variable};
use ldql::translators::{NautilodExpr, PpEndpoint, PpExpr, PpPattern};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const URIS: [&str; 6] = ["u0", "u1", "u2", "u3", "u4", "u5"];
pub const LITERALS: [&str; 2] = ["l0", "l1"];
pub const VARS: [&str; 4] = ["x", "y", "z", "w"];

pub fn uri(r: &mut TestRng) -> Uri {
    Uri::new(URIS.choose(r).unwrap())
}

pub fn literal(r: &mut TestRng) -> RdfTerm {
    RdfTerm::literal(LITERALS.choose(r).unwrap())
}

pub fn var(r: &mut TestRng) -> Variable {
    Variable::new(VARS.choose(r).unwrap())
}

fn node(r: &mut TestRng, doc: &DocId, object: bool) -> RdfTerm {
    let k = r.gen_range(0..10);
    if k == 0 {
        RdfTerm::Blank(BlankNode { label: format!("b{}", doc.as_str()).into(), scope: doc.clone() })
    } else if object && k <= 2 {
        literal(r)
    } else {
        RdfTerm::Uri(uri(r))
    }
}

/// At most 5 documents with at most 4 triples each, over the 6-URI/2-literal pool.
pub fn web(r: &mut TestRng) -> WebOfLinkedData {
    let n = r.gen_range(1..=5);
    let ids: Vec<DocId> = (0..n).map(|i| DocId::new(format!("d{i}"))).collect();
    let mut adoc = BTreeMap::new();
    let mut pool: Vec<Uri> = URIS.iter().map(Uri::new).collect();
    pool.shuffle(r);
    for (i, id) in ids.iter().enumerate() {
        adoc.insert(pool[i].clone(), id.clone());
    }
    for u in &pool[n..] {
        if r.gen_bool(0.5) {
            adoc.insert(u.clone(), ids.choose(r).unwrap().clone());
        }
    }
    let docs = ids.iter().map(|id| {
        let k = r.gen_range(0..=4);
        let data: Graph = (0..k)
            .map(|_| {
                let s = node(r, id, false);
                RdfTriple::new(s, uri(r), node(r, id, true)).unwrap()
            })
            .collect();
        Document { id: id.clone(), data }
    });
    WebOfLinkedData::new(docs.collect::<Vec<_>>(), adoc).unwrap()
}

pub fn seeds(r: &mut TestRng) -> BTreeSet<Uri> {
    let k = r.gen_range(0..=2);
    (0..k).map(|_| uri(r)).collect()
}

pub fn retrievable(w: &WebOfLinkedData) -> Vec<Uri> {
    w.dom().cloned().collect()
}

fn term_pattern(r: &mut TestRng, literal_ok: bool) -> TermPattern {
    match r.gen_range(0..10) {
        0..=5 => TermPattern::Var(var(r)),
        6 if literal_ok => TermPattern::Term(literal(r)),
        _ => TermPattern::Term(RdfTerm::Uri(uri(r))),
    }
}

fn triple_pattern(r: &mut TestRng) -> TriplePattern {
    TriplePattern::new(term_pattern(r, false), term_pattern(r, false), term_pattern(r, true))
}

fn expr(r: &mut TestRng, vars: &BTreeSet<Variable>) -> Expr {
    let operand = |r: &mut TestRng| match vars.iter().collect::<Vec<_>>().choose(r) {
        Some(v) if r.gen_bool(0.7) => Expr::Var((*v).clone()),
        _ if r.gen_bool(0.8) => Expr::Const(RdfTerm::Uri(uri(r))),
        _ => Expr::Const(literal(r)),
    };
    let a = operand(r);
    let b = operand(r);
    let e = if r.gen_bool(0.5) { Expr::eq(a, b) } else { Expr::neq(a, b) };
    match r.gen_range(0..6) {
        0 => Expr::not(e),
        1 => {
            let c = operand(r);
            let d = operand(r);
            Expr::or(e, Expr::eq(c, d))
        }
        _ => e,
    }
}

/// Random SPARQL pattern; `graphs` enables GRAPH subpatterns.
pub fn pattern(r: &mut TestRng, depth: u32, graphs: bool) -> GraphPattern {
    if depth == 0 || r.gen_bool(0.4) {
        let k = r.gen_range(0..=2);
        return GraphPattern::Bgp((0..k).map(|_| triple_pattern(r)).collect());
    }
    let d = depth - 1;
    match r.gen_range(0..if graphs { 6 } else { 5 }) {
        0 => GraphPattern::and(pattern(r, d, graphs), pattern(r, d, graphs)),
        1 => GraphPattern::opt(pattern(r, d, graphs), pattern(r, d, graphs)),
        2 => GraphPattern::union(pattern(r, d, graphs), pattern(r, d, graphs)),
        3 => {
            let p = pattern(r, d, graphs);
            let e = expr(r, &p.vars());
            GraphPattern::filter(p, e)
        }
        4 => {
            let p = pattern(r, d, graphs);
            let vs = p.vars();
            let free: Vec<&str> = VARS.iter().copied().filter(|v| !vs.contains(&Variable::new(v))).collect();
            match free.choose(r) {
                Some(v) => {
                    let e = match vs.iter().collect::<Vec<_>>().choose(r) {
                        Some(x) if r.gen_bool(0.5) => Expr::Var((*x).clone()),
                        _ => Expr::Const(RdfTerm::Uri(uri(r))),
                    };
                    GraphPattern::bind(p, e, Variable::new(v))
                }
                None => p,
            }
        }
        _ => {
            let g = if r.gen_bool(0.6) { GraphTarget::Var(var(r)) } else { GraphTarget::Uri(uri(r)) };
            GraphPattern::graph(g, pattern(r, d, graphs))
        }
    }
}

fn link_term(r: &mut TestRng, pos: usize) -> LinkTerm {
    match r.gen_range(0..10) {
        0..=3 => LinkTerm::Wildcard,
        4..=5 => LinkTerm::Context,
        6 if pos == 2 => LinkTerm::Literal(ldql::rdf::Literal::new(LITERALS.choose(r).unwrap())),
        _ => LinkTerm::Uri(uri(r)),
    }
}

pub fn lpe(r: &mut TestRng, depth: u32) -> Lpe {
    if depth == 0 || r.gen_bool(0.35) {
        if r.gen_bool(0.15) {
            return Lpe::Epsilon;
        }
        return Lpe::lp(link_term(r, 0), link_term(r, 1), link_term(r, 2));
    }
    let d = depth - 1;
    match r.gen_range(0..6) {
        0 => Lpe::concat(lpe(r, d), lpe(r, d)),
        1 => Lpe::alt(lpe(r, d), lpe(r, d)),
        2 => Lpe::star(lpe(r, d)),
        3 => Lpe::test(lpe(r, d)),
        _ => Lpe::nav(var(r), query(r, d)),
    }
}

/// Random LDQL query of AST depth at most `depth`.
pub fn query(r: &mut TestRng, depth: u32) -> LdqlQuery {
    if depth == 0 || r.gen_bool(0.3) {
        return LdqlQuery::basic(lpe(r, depth.min(1)), pattern(r, depth.min(2), true));
    }
    let d = depth - 1;
    match r.gen_range(0..6) {
        0 => LdqlQuery::seed_uris((0..r.gen_range(1..=2)).map(|_| uri(r)).collect::<Vec<_>>(), query(r, d)),
        1 => LdqlQuery::seed_var(var(r), query(r, d)),
        2 => LdqlQuery::and(query(r, d), query(r, d)),
        3 => LdqlQuery::union(query(r, d), query(r, d)),
        4 => {
            let q = query(r, d);
            let vs: Vec<Variable> = q.vars().into_iter().filter(|_| r.gen_bool(0.6)).collect();
            LdqlQuery::project(vs, q)
        }
        _ => LdqlQuery::basic(lpe(r, d), pattern(r, d, true)),
    }
}

pub fn pp_expr(r: &mut TestRng, depth: u32) -> PpExpr {
    if depth == 0 || r.gen_bool(0.3) {
        if r.gen_bool(0.2) {
            let k = r.gen_range(1..=2);
            return PpExpr::NegSet((0..k).map(|_| uri(r)).collect());
        }
        return PpExpr::Pred(uri(r));
    }
    let d = depth - 1;
    match r.gen_range(0..3) {
        0 => PpExpr::seq(pp_expr(r, d), pp_expr(r, d)),
        1 => PpExpr::alt(pp_expr(r, d), pp_expr(r, d)),
        _ => PpExpr::star(pp_expr(r, d)),
    }
}

fn endpoint(r: &mut TestRng) -> PpEndpoint {
    match r.gen_range(0..10) {
        0..=5 => PpEndpoint::Var(Variable::new(["x", "y"].choose(r).unwrap())),
        6 => PpEndpoint::Literal(ldql::rdf::Literal::new(LITERALS.choose(r).unwrap())),
        _ => PpEndpoint::Uri(uri(r)),
    }
}

pub fn pp_pattern(r: &mut TestRng, depth: u32) -> PpPattern {
    PpPattern::new(endpoint(r), pp_expr(r, depth), endpoint(r))
}

/// Random NautiLOD expression; ASK patterns have no GRAPH.
pub fn nautilod(r: &mut TestRng, depth: u32) -> NautilodExpr {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..5) {
            0..=1 => NautilodExpr::Fwd(uri(r)),
            2..=3 => NautilodExpr::Bwd(uri(r)),
            _ => NautilodExpr::AnyFwd,
        };
    }
    let d = depth - 1;
    match r.gen_range(0..5) {
        0 => NautilodExpr::seq(nautilod(r, d), nautilod(r, d)),
        1 => NautilodExpr::alt(nautilod(r, d), nautilod(r, d)),
        2 => NautilodExpr::star(nautilod(r, d)),
        3 => NautilodExpr::ask(nautilod(r, d), pattern(r, 1, false)),
        _ => NautilodExpr::seq(nautilod(r, d), NautilodExpr::star(nautilod(r, d))),
    }
}
