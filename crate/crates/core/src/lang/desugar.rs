//! Elimination of link patterns, concatenation, alternation and tests in favour
//! of ε, `(?v : q)` and `*`.
//!
//! A non-core `r` becomes `(?o : E(r, ?o))`, where `E(r, ?o)` evaluated from
//! seeds `{u}` yields exactly `{ {?o -> v} | v in [[r]]u }`, including results
//! outside `dom(adoc)` (observable through `[...]` and at the top level).

use super::{FreshVars, LdqlQuery, Lpe};
use crate::rdf::{LinkTerm, RdfTerm};
use crate::sparql::{Expr, GraphPattern, GraphTarget, TermPattern, TriplePattern, Variable};
use std::collections::{BTreeMap, BTreeSet};

pub fn desugar(l: &Lpe) -> Lpe {
    let mut vs = BTreeSet::new();
    l.collect_vars(&mut vs);
    Desugar { fresh: FreshVars::avoiding(&vs) }.lpe(l)
}

pub fn desugar_query(q: &LdqlQuery) -> LdqlQuery {
    Desugar { fresh: FreshVars::for_query(q) }.query(q)
}

struct Desugar {
    fresh: FreshVars,
}

fn eps_graph(v: &Variable) -> LdqlQuery {
    LdqlQuery::basic(Lpe::Epsilon, GraphPattern::graph_var(v, GraphPattern::empty()))
}

/// A query with no solutions under any seeds.
fn never(v: &Variable) -> LdqlQuery {
    LdqlQuery::basic(Lpe::Epsilon, GraphPattern::filter(GraphPattern::empty(), Expr::eq(Expr::Var(v.clone()), Expr::Var(v.clone()))))
}

/// Keeps the solutions of `q` that bind `w`.
fn bound_only(q: &LdqlQuery, w: &Variable) -> LdqlQuery {
    match q {
        LdqlQuery::Basic(l, p) => {
            LdqlQuery::basic(l.clone(), GraphPattern::filter(p.clone(), Expr::eq(Expr::Var(w.clone()), Expr::Var(w.clone()))))
        }
        LdqlQuery::Union(a, b) => LdqlQuery::union(bound_only(a, w), bound_only(b, w)),
        LdqlQuery::And(a, b) => LdqlQuery::union(
            LdqlQuery::and(bound_only(a, w), (**b).clone()),
            LdqlQuery::and((**a).clone(), bound_only(b, w)),
        ),
        LdqlQuery::Project(vs, inner) if vs.contains(w) => LdqlQuery::Project(vs.clone(), Box::new(bound_only(inner, w))),
        LdqlQuery::Project(..) => never(w),
        LdqlQuery::SeedUris(us, inner) => LdqlQuery::SeedUris(us.clone(), Box::new(bound_only(inner, w))),
        LdqlQuery::SeedVar(v, _) if v == w => q.clone(),
        LdqlQuery::SeedVar(v, inner) => LdqlQuery::seed_var(v.clone(), bound_only(inner, w)),
    }
}

impl Desugar {
    fn lpe(&mut self, l: &Lpe) -> Lpe {
        match l {
            Lpe::Epsilon => Lpe::Epsilon,
            Lpe::Star(a) => Lpe::star(self.lpe(a)),
            Lpe::NavSub(w, q) => Lpe::nav(w.clone(), self.query(q)),
            _ => {
                let o = self.fresh.var();
                let e = self.enc(l, &o);
                Lpe::nav(o, e)
            }
        }
    }

    fn query(&mut self, q: &LdqlQuery) -> LdqlQuery {
        match q {
            LdqlQuery::Basic(l, p) => LdqlQuery::basic(self.lpe(l), p.clone()),
            LdqlQuery::SeedUris(us, q) => LdqlQuery::SeedUris(us.clone(), Box::new(self.query(q))),
            LdqlQuery::SeedVar(v, q) => LdqlQuery::seed_var(v.clone(), self.query(q)),
            LdqlQuery::And(a, b) => LdqlQuery::and(self.query(a), self.query(b)),
            LdqlQuery::Union(a, b) => LdqlQuery::union(self.query(a), self.query(b)),
            LdqlQuery::Project(vs, q) => LdqlQuery::Project(vs.clone(), Box::new(self.query(q))),
        }
    }

    /// `E(r, o)`: every solution has domain exactly `{o}`.
    fn enc(&mut self, r: &Lpe, o: &Variable) -> LdqlQuery {
        match r {
            Lpe::Epsilon => eps_graph(o),
            Lpe::Pattern(lp) => {
                let u = self.fresh.var();
                let ys = lp.positions();
                let mut branches = Vec::new();
                for i in (0..3).filter(|&i| matches!(ys[i], LinkTerm::Wildcard)) {
                    let mut ts: Vec<TermPattern> = Vec::with_capacity(3);
                    for (j, y) in ys.iter().enumerate() {
                        ts.push(match y {
                            _ if j == i => TermPattern::Var(o.clone()),
                            LinkTerm::Context => TermPattern::Var(u.clone()),
                            LinkTerm::Wildcard => TermPattern::Var(self.fresh.var()),
                            LinkTerm::Uri(x) => TermPattern::from(x.clone()),
                            LinkTerm::Literal(x) => TermPattern::Term(RdfTerm::Literal(x.clone())),
                        });
                    }
                    let [s, p, ob]: [TermPattern; 3] = ts.try_into().expect("three positions");
                    let tp = GraphPattern::Bgp(vec![TriplePattern { s, p, o: ob }]);
                    branches.push(LdqlQuery::basic(Lpe::Epsilon, GraphPattern::graph(GraphTarget::Var(u.clone()), tp)));
                }
                let Some(found) = LdqlQuery::union_all(branches) else {
                    return LdqlQuery::basic(
                        Lpe::Epsilon,
                        GraphPattern::filter(
                            GraphPattern::graph_var(o, GraphPattern::empty()),
                            Expr::neq(Expr::Var(o.clone()), Expr::Var(o.clone())),
                        ),
                    );
                };
                LdqlQuery::project([o.clone()], LdqlQuery::and(found, LdqlQuery::seed_var(o.clone(), eps_graph(o))))
            }
            Lpe::NavSub(w, q) => {
                let dq = bound_only(&self.query(q), w);
                let renamed = dq.rename(&BTreeMap::from([(w.clone(), o.clone())]));
                let any_uri = LdqlQuery::seed_var(o.clone(), LdqlQuery::basic(Lpe::Epsilon, GraphPattern::empty()));
                let c = self.fresh.var();
                LdqlQuery::project([o.clone()], LdqlQuery::and(LdqlQuery::and(renamed, any_uri), eps_graph(&c)))
            }
            Lpe::Concat(a, b) => {
                let x = self.fresh.var();
                let first = self.enc(a, &x);
                let rest = self.enc(b, o);
                LdqlQuery::project([o.clone()], LdqlQuery::and(first, LdqlQuery::seed_var(x, rest)))
            }
            Lpe::Alt(a, b) => LdqlQuery::union(self.enc(a, o), self.enc(b, o)),
            Lpe::Star(a) => {
                let x = self.fresh.var();
                let reach = LdqlQuery::basic(Lpe::star(self.lpe(a)), GraphPattern::graph_var(&x, GraphPattern::empty()));
                let step = self.enc(a, o);
                LdqlQuery::union(eps_graph(o), LdqlQuery::project([o.clone()], LdqlQuery::and(reach, LdqlQuery::seed_var(x, step))))
            }
            Lpe::Test(a) => {
                let x = self.fresh.var();
                let inner = self.enc(a, &x);
                LdqlQuery::and(eps_graph(o), LdqlQuery::project(std::iter::empty(), inner))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_lpe;

    #[test]
    fn epsilon_is_kept() {
        assert_eq!(desugar(&Lpe::Epsilon), Lpe::Epsilon);
    }

    #[test]
    fn output_is_core() {
        for s in [
            "{+ <p> _}",
            "{_ <p1> _}* / [ {_ <p2> _} ]",
            "(eps | {+ _ _}) / (?v : << {_ <p> +} , { ?v <q> ?w } >>)",
            "{<a> <b> <c>}",
        ] {
            let d = desugar(&parse_lpe(s).unwrap());
            assert!(d.is_core(), "{s} -> {d}");
        }
    }

    #[test]
    fn link_pattern_encoding_reads_the_context_graph() {
        let d = desugar(&parse_lpe("{+ <p> _}").unwrap());
        let s = d.to_string();
        assert!(s.contains("(GRAPH ?_g1 { ?_g1 <p> ?_g0 })"), "{s}");
    }

    #[test]
    fn generated_names_avoid_existing_reserved_ones() {
        let l = Lpe::nav(Variable::new("_g4"), LdqlQuery::basic(Lpe::lp(LinkTerm::Context, LinkTerm::Wildcard, LinkTerm::Wildcard), GraphPattern::empty()));
        let d = desugar(&l);
        let mut vs = BTreeSet::new();
        d.collect_vars(&mut vs);
        assert!(vs.contains(&Variable::new("_g5")));
        assert!(!vs.iter().any(|v| v.name() == "_g0"));
    }
}
