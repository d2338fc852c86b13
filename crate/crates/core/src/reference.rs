//! Brute-force evaluators for the three formalisms that LDQL is compared
//! against: property paths under context-based semantics, NautiLOD, and
//! reachability-based SPARQL. They share nothing with the LDQL evaluator
//! beyond graph-pattern evaluation.

use crate::rdf::{DocId, Graph, RdfDataset, RdfTerm, RdfTriple, Uri, WebOfLinkedData};
use crate::sparql::{eval_pattern, GraphPattern, SolutionMapping, SolutionSet, TermPattern, TriplePattern};
use crate::translators::{NautilodExpr, PpEndpoint, PpExpr, PpPattern, ReachCriterion};
use std::collections::BTreeSet;

/// `C(a)`: the triples of `data(adoc(a))` with subject `a`; empty off `dom(adoc)`.
pub struct ContextSelector<'w> {
    w: &'w WebOfLinkedData,
}

impl<'w> ContextSelector<'w> {
    pub fn new(w: &'w WebOfLinkedData) -> Self {
        ContextSelector { w }
    }

    pub fn select(&self, a: &RdfTerm) -> BTreeSet<&'w RdfTriple> {
        let Some(u) = a.as_uri() else { return BTreeSet::new() };
        match self.w.data_of(u) {
            Some(g) => g.iter().filter(|t| t.subject() == a).collect(),
            None => BTreeSet::new(),
        }
    }

    /// Every non-empty `C(u)`, keyed by `u`.
    pub fn table(&self) -> Vec<(Uri, BTreeSet<&'w RdfTriple>)> {
        self.w.dom().map(|u| (u.clone(), self.select(&RdfTerm::Uri(u.clone())))).filter(|(_, c)| !c.is_empty()).collect()
    }
}

type Pairs = BTreeSet<(RdfTerm, RdfTerm)>;

fn compose(a: &Pairs, b: &Pairs) -> Pairs {
    let mut out = Pairs::new();
    for (x, y) in a {
        for (y2, z) in b {
            if y == y2 {
                out.insert((x.clone(), z.clone()));
            }
        }
    }
    out
}

/// `{(μ[α], μ[β])}` over all solutions of `(?α, r, ?β)`.
fn pp_pairs(r: &PpExpr, w: &WebOfLinkedData, terms: &BTreeSet<RdfTerm>) -> Pairs {
    let sel = ContextSelector::new(w);
    match r {
        PpExpr::Pred(p) => w
            .dom()
            .flat_map(|u| sel.select(&RdfTerm::Uri(u.clone())))
            .filter(|t| t.predicate() == p)
            .map(|t| (t.subject().clone(), t.object().clone()))
            .collect(),
        PpExpr::NegSet(us) => w
            .dom()
            .flat_map(|u| sel.select(&RdfTerm::Uri(u.clone())))
            .filter(|t| !us.contains(t.predicate()))
            .map(|t| (t.subject().clone(), t.object().clone()))
            .collect(),
        PpExpr::Seq(a, b) => compose(&pp_pairs(a, w, terms), &pp_pairs(b, w, terms)),
        PpExpr::Alt(a, b) => {
            let mut out = pp_pairs(a, w, terms);
            out.extend(pp_pairs(b, w, terms));
            out
        }
        PpExpr::Star(a) => {
            let one = pp_pairs(a, w, terms);
            let mut out: Pairs = terms.iter().map(|t| (t.clone(), t.clone())).collect();
            let mut power = one.clone();
            for _ in 0..terms.len().max(1) {
                if power.is_empty() {
                    break;
                }
                out.extend(power.iter().cloned());
                power = compose(&power, &one);
            }
            out
        }
    }
}

fn bind_endpoint(m: &mut SolutionMapping, e: &PpEndpoint, t: &RdfTerm) -> bool {
    match e {
        PpEndpoint::Var(v) => match m.get(v) {
            Some(x) => x == t,
            None => {
                m.insert(v.clone(), t.clone());
                true
            }
        },
        _ => e.as_term().as_ref() == Some(t),
    }
}

/// `⟦p⟧ctxt_W`.
pub fn eval_pp_ctxt(p: &PpPattern, w: &WebOfLinkedData) -> SolutionSet {
    let terms = w.terms();
    let mut out = SolutionSet::new();
    for (a, b) in pp_pairs(&p.pp, w, &terms) {
        let mut m = SolutionMapping::new();
        if bind_endpoint(&mut m, &p.alpha, &a) && bind_endpoint(&mut m, &p.beta, &b) {
            out.insert(m);
        }
    }
    out
}

/// `⟦n⟧u` over `W`; `u` should be in `dom(adoc)`.
pub fn eval_nautilod(n: &NautilodExpr, w: &WebOfLinkedData, u: &Uri) -> BTreeSet<RdfTerm> {
    let here = RdfTerm::Uri(u.clone());
    let data = || w.data_of(u).into_iter().flatten();
    match n {
        NautilodExpr::Fwd(p) => {
            data().filter(|t| t.subject() == &here && t.predicate() == p).map(|t| t.object().clone()).collect()
        }
        NautilodExpr::Bwd(p) => {
            data().filter(|t| t.object() == &here && t.predicate() == p).map(|t| t.subject().clone()).collect()
        }
        NautilodExpr::AnyFwd => data().filter(|t| t.subject() == &here).map(|t| t.object().clone()).collect(),
        NautilodExpr::Seq(a, b) => {
            let mut out = BTreeSet::new();
            for mid in eval_nautilod(a, w, u) {
                if let Some(m) = retrievable(w, &mid) {
                    out.extend(eval_nautilod(b, w, m));
                }
            }
            out
        }
        NautilodExpr::Alt(a, b) => {
            let mut out = eval_nautilod(a, w, u);
            out.extend(eval_nautilod(b, w, u));
            out
        }
        NautilodExpr::Star(a) => {
            // {u} ∪ ⟦a⟧u ∪ ⟦a/a⟧u ∪ ...; level k+1 continues from the retrievable part of level k.
            let mut out = BTreeSet::from([here]);
            let mut level = eval_nautilod(a, w, u);
            let mut expanded: BTreeSet<Uri> = BTreeSet::new();
            while !level.is_empty() {
                out.extend(level.iter().cloned());
                let mut next = BTreeSet::new();
                for t in &level {
                    if let Some(m) = retrievable(w, t) {
                        if expanded.insert(m.clone()) {
                            next.extend(eval_nautilod(a, w, m));
                        }
                    }
                }
                level = next;
            }
            out
        }
        NautilodExpr::AskTest(a, pat) => eval_nautilod(a, w, u)
            .into_iter()
            .filter(|t| retrievable(w, t).is_some_and(|m| ask(pat, w.data_of(m).expect("retrievable"))))
            .collect(),
    }
}

fn retrievable<'t>(w: &WebOfLinkedData, t: &'t RdfTerm) -> Option<&'t Uri> {
    t.as_uri().filter(|u| w.in_dom(u))
}

/// Non-emptiness of `⟦P⟧` over `g`, with no named graphs.
fn ask(p: &GraphPattern, g: &Graph) -> bool {
    !eval_pattern(p, g, &RdfDataset::default()).is_empty()
}

/// The documents that are `(c, S, P)`-reachable, with what produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachableDocSet {
    pub docs: BTreeSet<DocId>,
    pub criterion: ReachCriterion,
    pub seeds: BTreeSet<Uri>,
    pub pattern: GraphPattern,
}

impl ReachableDocSet {
    pub fn graph(&self, w: &WebOfLinkedData) -> Graph {
        self.docs.iter().filter_map(|d| w.doc(d)).flat_map(|d| d.data.iter().cloned()).collect()
    }
}

/// `c(t, u, P)`: whether the data link `(t, u)` is followed.
pub fn criterion_holds(c: ReachCriterion, t: &RdfTriple, p: &GraphPattern) -> bool {
    match c {
        ReachCriterion::All => true,
        ReachCriterion::None => false,
        ReachCriterion::Match => p.triple_patterns().into_iter().any(|tp| matches_triple(tp, t)),
    }
}

/// Whether `μ[tp] = t` for some `μ`.
fn matches_triple(tp: &TriplePattern, t: &RdfTriple) -> bool {
    let mut m = SolutionMapping::new();
    tp.positions().into_iter().zip(t.positions()).all(|(p, x)| match p {
        TermPattern::Term(c) => *c == x,
        TermPattern::Var(v) => match m.get(v) {
            Some(b) => *b == x,
            None => {
                m.insert(v.clone(), x);
                true
            }
        },
    })
}

/// Least set closed under: `adoc(u)` for seeds `u`; `adoc(u)` for every `u`
/// in a followed triple of a reached document.
pub fn reachable_docs(c: ReachCriterion, seeds: &BTreeSet<Uri>, p: &GraphPattern, w: &WebOfLinkedData) -> ReachableDocSet {
    let mut docs: BTreeSet<DocId> = seeds.iter().filter_map(|u| w.adoc(u)).map(|d| d.id.clone()).collect();
    loop {
        let mut next = docs.clone();
        for d in &docs {
            let doc = w.doc(d).expect("reached document exists");
            for t in doc.data.iter().filter(|t| criterion_holds(c, t, p)) {
                for x in t.positions() {
                    if let Some(target) = x.as_uri().and_then(|u| w.adoc(u)) {
                        next.insert(target.id.clone());
                    }
                }
            }
        }
        if next == docs {
            break;
        }
        docs = next;
    }
    ReachableDocSet { docs, criterion: c, seeds: seeds.clone(), pattern: p.clone() }
}

/// `⟦P⟧` over the union of all reachable documents, with no named graphs.
pub fn eval_reach(p: &GraphPattern, c: ReachCriterion, seeds: &BTreeSet<Uri>, w: &WebOfLinkedData) -> SolutionSet {
    let g = reachable_docs(c, seeds, p, w).graph(w);
    eval_pattern(p, &g, &RdfDataset::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_pattern;
    use crate::rdf::load_web;
    use crate::sparql::Variable;
    use crate::translators::{parse_nautilod, parse_pp_pattern};

    fn wex() -> WebOfLinkedData {
        load_web(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wex.ldw")).unwrap()
    }

    fn thm1() -> WebOfLinkedData {
        crate::rdf::parse_web("#doc d\n<u> <p> <u2> .\n#doc d2\n<u2> <p> <u> .\n<u> <u> <u> .\n#adoc\n<u> d\n<u2> d2\n")
            .unwrap()
    }

    fn uris(xs: &[&str]) -> BTreeSet<RdfTerm> {
        xs.iter().map(RdfTerm::uri).collect()
    }

    fn m(pairs: &[(&str, &str)]) -> SolutionMapping {
        pairs.iter().map(|(v, u)| (Variable::new(v), RdfTerm::uri(u))).collect()
    }

    #[test]
    fn context_selector_ignores_non_authoritative_triples() {
        let w = thm1();
        let sel = ContextSelector::new(&w);
        assert_eq!(sel.select(&RdfTerm::uri("u")).len(), 1);
        assert_eq!(sel.select(&RdfTerm::uri("u2")).len(), 1);
        assert!(sel.select(&RdfTerm::literal("u")).is_empty());
        let got = eval_pp_ctxt(&parse_pp_pattern("?x <p> ?y").unwrap(), &w);
        let want: SolutionSet = [m(&[("x", "u"), ("y", "u2")]), m(&[("x", "u2"), ("y", "u")])].into_iter().collect();
        assert_eq!(got, want);
        let via_u = eval_pp_ctxt(&parse_pp_pattern("?x <u> ?y").unwrap(), &w);
        assert!(via_u.is_empty());
    }

    #[test]
    fn star_is_reflexive_on_terms_only() {
        let w = thm1();
        let got = eval_pp_ctxt(&parse_pp_pattern("<u> <p>* ?y").unwrap(), &w);
        let want: SolutionSet = [m(&[("y", "u")]), m(&[("y", "u2")])].into_iter().collect();
        assert_eq!(got, want);
        assert!(eval_pp_ctxt(&parse_pp_pattern("<zz> <p>* ?y").unwrap(), &w).is_empty());
        let lit = eval_pp_ctxt(&parse_pp_pattern("\"zz\" <p>* \"zz\"").unwrap(), &w);
        assert!(lit.is_empty());
    }

    #[test]
    fn nautilod_on_the_running_example() {
        let w = wex();
        let at = |n: &str, u: &str| eval_nautilod(&parse_nautilod(n).unwrap(), &w, &Uri::new(u));
        assert_eq!(at("<p1>", "uA"), uris(&["uB"]));
        assert_eq!(at("<p1>^", "uB"), BTreeSet::new());
        assert_eq!(at("<p1>[ASK { ?s <p2> ?o }]", "uA"), BTreeSet::new());
        assert_eq!(at("<p1>[ASK { ?s <p1> ?o }]", "uA"), uris(&["uB"]));
        assert_eq!(at("<p1>*", "uA"), uris(&["uA", "uB", "uC"]));
        assert_eq!(at("<>", "uA"), uris(&["uB"]));
        assert_eq!(at("<p1>/<p2>", "uA"), BTreeSet::new());
    }

    #[test]
    fn reachability_on_the_running_example() {
        let w = wex();
        let any = parse_pattern("{ ?x <p1> ?y }").unwrap();
        let s = BTreeSet::from([Uri::new("uA")]);
        let ids = |xs: &[&str]| xs.iter().map(DocId::new).collect::<BTreeSet<_>>();
        assert_eq!(reachable_docs(ReachCriterion::None, &s, &any, &w).docs, ids(&["dA"]));
        assert_eq!(reachable_docs(ReachCriterion::All, &s, &any, &w).docs, ids(&["dA", "dB", "dC"]));
        assert_eq!(reachable_docs(ReachCriterion::Match, &s, &any, &w).docs, ids(&["dA", "dB", "dC"]));
        let p2 = parse_pattern("{ ?x <p2> ?z }").unwrap();
        assert_eq!(reachable_docs(ReachCriterion::Match, &s, &p2, &w).docs, ids(&["dA", "dB", "dC"]));
        let from_b = BTreeSet::from([Uri::new("uB")]);
        assert_eq!(reachable_docs(ReachCriterion::Match, &from_b, &p2, &w).docs, ids(&["dB"]));
        assert_eq!(reachable_docs(ReachCriterion::Match, &from_b, &any, &w).docs, ids(&["dA", "dB", "dC"]));
        let all = eval_reach(&any, ReachCriterion::All, &s, &w);
        let want: SolutionSet = [m(&[("x", "uA"), ("y", "uB")]), m(&[("x", "uB"), ("y", "uC")])].into_iter().collect();
        assert_eq!(all, want);
        assert!(eval_reach(&any, ReachCriterion::None, &BTreeSet::new(), &w).is_empty());
        let c = eval_reach(&p2, ReachCriterion::None, &BTreeSet::from([Uri::new("uC")]), &w);
        assert_eq!(c, [m(&[("x", "uA"), ("z", "uC")])].into_iter().collect());
    }
}
