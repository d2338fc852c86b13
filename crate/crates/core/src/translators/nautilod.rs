//! NautiLOD expressions as LDQL queries with the single free variable `?x`.
//!
//! `trans_n` is exact on retrievable targets only. The result of the last
//! step may be any term, so each expression is factored into branches
//! `prefix / last` and the last step is read off with a GRAPH pattern.

use super::NautilodExpr;
use crate::lang::{FreshVars, LdqlQuery, Lpe};
use crate::rdf::{LinkTerm, Uri};
use crate::sparql::{GraphPattern, GraphTarget, Variable};
use std::collections::BTreeSet;

/// The LPE of a NautiLOD expression; agrees with it on targets in `dom(adoc)`.
pub fn trans_n(n: &NautilodExpr) -> Lpe {
    let mut fresh = fresh_for(n);
    trans(n, &mut fresh)
}

/// `q(?x)` with `u' ∈ ⟦n⟧u ⇔ {?x→u'} ∈ eval_query(q, W, {u})` for `u ∈ dom(adoc)`.
pub fn translate_nautilod(n: &NautilodExpr) -> LdqlQuery {
    let mut fresh = fresh_for(n);
    let x = Variable::new("x");
    let mut branches = Vec::new();
    if n.nullable() {
        branches.push(LdqlQuery::basic(Lpe::Epsilon, graph_of(&x, GraphPattern::empty())));
    }
    for (prefix, last) in factor(n) {
        let pre = prefix.map(|p| trans(&p, &mut fresh));
        let q = if let Last::Dom(m) = &last {
            let l = trans(m, &mut fresh);
            let l = match pre {
                Some(p) => Lpe::concat(p, l),
                None => l,
            };
            LdqlQuery::basic(l, graph_of(&x, GraphPattern::empty()))
        } else {
            let u = fresh.var();
            let tp = match last {
                Last::Fwd(p) => GraphPattern::triple(u.clone(), p, x.clone()),
                Last::Bwd(p) => GraphPattern::triple(x.clone(), p, u.clone()),
                Last::AnyFwd => GraphPattern::triple(u.clone(), fresh.var(), x.clone()),
                Last::Dom(_) => unreachable!(),
            };
            LdqlQuery::project([x.clone()], LdqlQuery::basic(pre.unwrap_or(Lpe::Epsilon), graph_of(&u, tp)))
        };
        branches.push(q);
    }
    LdqlQuery::union_all(branches).expect("every expression has a last step")
}

fn fresh_for(n: &NautilodExpr) -> FreshVars {
    let mut vs = BTreeSet::new();
    n.collect_vars(&mut vs);
    vs.insert(Variable::new("x"));
    FreshVars::avoiding(&vs)
}

fn graph_of(v: &Variable, p: GraphPattern) -> GraphPattern {
    GraphPattern::graph(GraphTarget::Var(v.clone()), p)
}

fn trans(n: &NautilodExpr, fresh: &mut FreshVars) -> Lpe {
    match n {
        NautilodExpr::Fwd(p) => Lpe::lp(LinkTerm::Context, LinkTerm::Uri(p.clone()), LinkTerm::Wildcard),
        NautilodExpr::Bwd(p) => Lpe::lp(LinkTerm::Wildcard, LinkTerm::Uri(p.clone()), LinkTerm::Context),
        NautilodExpr::AnyFwd => {
            let (x, u, p) = (fresh.var(), fresh.var(), fresh.var());
            let body = graph_of(&u, GraphPattern::triple(u.clone(), p, x.clone()));
            Lpe::nav(x, LdqlQuery::basic(Lpe::Epsilon, body))
        }
        NautilodExpr::Seq(a, b) => Lpe::concat(trans(a, fresh), trans(b, fresh)),
        NautilodExpr::Alt(a, b) => Lpe::alt(trans(a, fresh), trans(b, fresh)),
        NautilodExpr::Star(a) => Lpe::star(trans(a, fresh)),
        NautilodExpr::AskTest(a, pat) => {
            let t = fresh.var();
            let check = Lpe::nav(t.clone(), LdqlQuery::basic(Lpe::Epsilon, graph_of(&t, pat.clone())));
            Lpe::concat(trans(a, fresh), Lpe::test(check))
        }
    }
}

/// Final step of a branch.
#[derive(Clone, Debug)]
enum Last {
    Fwd(Uri),
    Bwd(Uri),
    AnyFwd,
    /// Results of the expression restricted to `dom(adoc)`.
    Dom(NautilodExpr),
}

fn then(a: &NautilodExpr, pre: Option<NautilodExpr>) -> NautilodExpr {
    match pre {
        Some(p) => NautilodExpr::seq(a.clone(), p),
        None => a.clone(),
    }
}

/// Branches `(prefix, last)` whose union, plus `{u}` when `n` is nullable, is `⟦n⟧u`.
fn factor(n: &NautilodExpr) -> Vec<(Option<NautilodExpr>, Last)> {
    match n {
        NautilodExpr::Fwd(p) => vec![(None, Last::Fwd(p.clone()))],
        NautilodExpr::Bwd(p) => vec![(None, Last::Bwd(p.clone()))],
        NautilodExpr::AnyFwd => vec![(None, Last::AnyFwd)],
        NautilodExpr::AskTest(..) => vec![(None, Last::Dom(n.clone()))],
        NautilodExpr::Alt(a, b) => {
            let mut out = factor(a);
            out.extend(factor(b));
            out
        }
        NautilodExpr::Seq(a, b) => {
            let mut out: Vec<_> = factor(b).into_iter().map(|(pre, l)| (Some(then(a, pre)), l)).collect();
            if b.nullable() {
                out.push((None, Last::Dom((**a).clone())));
            }
            out
        }
        NautilodExpr::Star(a) => factor(a).into_iter().map(|(pre, l)| (Some(then(n, pre)), l)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_lpe, parse_query_with, ParseOptions};
    use crate::translators::parse_nautilod;

    fn reserved(s: &str) -> LdqlQuery {
        parse_query_with(s, ParseOptions { allow_reserved: true }).unwrap()
    }

    #[test]
    fn first_stage_maps_predicates_to_link_patterns() {
        let n = parse_nautilod("<p1>/<p2>*").unwrap();
        assert_eq!(trans_n(&n), parse_lpe("{+ <p1> _} / {+ <p2> _}*").unwrap());
    }

    #[test]
    fn forward_step_reads_the_last_triple_from_a_named_graph() {
        let q = translate_nautilod(&parse_nautilod("<p>").unwrap());
        assert_eq!(q, reserved("PROJECT { ?x } (<< eps , (GRAPH ?_g0 { ?_g0 <p> ?x }) >>)"));
    }

    #[test]
    fn nullable_expressions_keep_the_start() {
        let q = translate_nautilod(&parse_nautilod("<p>*").unwrap());
        let want = reserved(
            "(<< eps , (GRAPH ?x { }) >> UNION PROJECT { ?x } (<< {+ <p> _}* , (GRAPH ?_g0 { ?_g0 <p> ?x }) >>))",
        );
        assert_eq!(q, want);
    }
}
