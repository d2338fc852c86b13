//! Reachability-based SPARQL as a single basic LDQL query `⟨lpe^c, P⟩`.

use super::ReachCriterion;
use crate::lang::{FreshVars, LdqlQuery, Lpe};
use crate::rdf::LinkTerm;
use crate::sparql::{Expr, GraphPattern, TermPattern, TriplePattern};

/// Equivalent to `P` under `c`-semantics for every seed set, when `P` has no GRAPH.
pub fn translate_reachability(c: ReachCriterion, p: &GraphPattern) -> LdqlQuery {
    LdqlQuery::basic(reach_lpe(c, p), p.clone())
}

/// The LPE that visits exactly the `(c, S, P)`-reachable documents.
pub fn reach_lpe(c: ReachCriterion, p: &GraphPattern) -> Lpe {
    match c {
        ReachCriterion::All => Lpe::star(Lpe::lp(LinkTerm::Wildcard, LinkTerm::Wildcard, LinkTerm::Wildcard)),
        ReachCriterion::None => Lpe::Epsilon,
        ReachCriterion::Match => match_lpe(p),
    }
}

fn match_lpe(p: &GraphPattern) -> Lpe {
    let mut fresh = FreshVars::avoiding(&p.vars());
    let (s, pv, o) = (fresh.var(), fresh.var(), fresh.var());
    let mut tps: Vec<&TriplePattern> = p.triple_patterns();
    tps.sort();
    tps.dedup();
    let mut arms = Vec::new();
    for tp in tps {
        let slots = [&s, &pv, &o];
        let mut conds = Vec::new();
        for (i, t) in tp.positions().into_iter().enumerate() {
            match t {
                TermPattern::Term(c) => conds.push(Expr::eq(Expr::Var(slots[i].clone()), Expr::Const(c.clone()))),
                // A repeated variable forces equal positions.
                TermPattern::Var(v) => {
                    if let Some(j) = tp.positions()[..i].iter().position(|e| e.as_var() == Some(v)) {
                        conds.push(Expr::eq(Expr::Var(slots[j].clone()), Expr::Var(slots[i].clone())));
                    }
                }
            }
        }
        let base = GraphPattern::triple(s.clone(), pv.clone(), o.clone());
        let pk = match conds.into_iter().reduce(Expr::and) {
            Some(e) => GraphPattern::filter(base, e),
            None => base,
        };
        let qk = LdqlQuery::basic(Lpe::Epsilon, pk);
        for v in slots {
            arms.push(Lpe::nav(v.clone(), qk.clone()));
        }
    }
    match arms.into_iter().reduce(Lpe::alt) {
        Some(a) => Lpe::star(a),
        None => Lpe::Epsilon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_pattern, parse_query, ParseOptions};

    #[test]
    fn none_and_all() {
        let p = parse_pattern("{ ?x <p1> ?y }").unwrap();
        assert_eq!(translate_reachability(ReachCriterion::None, &p), parse_query("<< eps , { ?x <p1> ?y } >>").unwrap());
        assert_eq!(translate_reachability(ReachCriterion::All, &p), parse_query("<< {_ _ _}* , { ?x <p1> ?y } >>").unwrap());
    }

    #[test]
    fn match_filters_constants_and_repeated_variables() {
        let p = parse_pattern("{ ?a <p1> ?a }").unwrap();
        let arm = |v: &str| {
            format!("(?{v} : << eps , ({{ ?_g0 ?_g1 ?_g2 }} FILTER (?_g1 = <p1> && ?_g0 = ?_g2)) >>)")
        };
        let text = format!("({} | {} | {})*", arm("_g0"), arm("_g1"), arm("_g2"));
        let mut parser = crate::lang::Parser::new(&text, ParseOptions { allow_reserved: true }).unwrap();
        let want = parser.lpe().unwrap();
        assert_eq!(reach_lpe(ReachCriterion::Match, &p), want);
    }
}
