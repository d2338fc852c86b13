//! Property-path patterns under context-based semantics, evaluated with the
//! empty seed set.

use super::{PpExpr, PpPattern};
use crate::lang::{FreshVars, LdqlQuery, Lpe};
use crate::rdf::RdfTerm;
use crate::sparql::{Expr, GraphPattern, GraphTarget, TermPattern, TriplePattern, Variable};
use std::collections::BTreeSet;

/// An LDQL query `q` with `eval_query(q, W, ∅) = ⟦p⟧ctxt_W` for every `W`.
pub fn translate_pp(p: &PpPattern) -> LdqlQuery {
    let mut fresh = FreshVars::avoiding(&p.vars());
    Builder { fresh: &mut fresh }.path(&p.alpha.to_term_pattern(), &p.pp, &p.beta.to_term_pattern())
}

struct Builder<'a> {
    fresh: &'a mut FreshVars,
}

fn vars_of(ends: [&TermPattern; 2]) -> BTreeSet<Variable> {
    ends.into_iter().filter_map(|t| t.as_var().cloned()).collect()
}

fn eps(p: GraphPattern) -> LdqlQuery {
    LdqlQuery::basic(Lpe::Epsilon, p)
}

fn seeded(alpha: &TermPattern, q: LdqlQuery) -> LdqlQuery {
    match alpha {
        TermPattern::Var(x) => LdqlQuery::seed_var(x.clone(), q),
        TermPattern::Term(RdfTerm::Uri(u)) => LdqlQuery::seed_uris([u.clone()], q),
        TermPattern::Term(_) => unreachable!("literal start handled by the caller"),
    }
}

fn is_literal(t: &TermPattern) -> bool {
    matches!(t, TermPattern::Term(RdfTerm::Literal(_)))
}

impl Builder<'_> {
    fn var(&mut self) -> Variable {
        self.fresh.var()
    }

    fn path(&mut self, a: &TermPattern, r: &PpExpr, b: &TermPattern) -> LdqlQuery {
        let out = vars_of([a, b]);
        match r {
            PpExpr::Pred(u) => {
                if let TermPattern::Term(l @ RdfTerm::Literal(_)) = a {
                    return self.unsatisfiable(l);
                }
                seeded(a, eps(GraphPattern::triple(a.clone(), u.clone(), b.clone())))
            }
            PpExpr::NegSet(us) => {
                if let TermPattern::Term(l @ RdfTerm::Literal(_)) = a {
                    return self.unsatisfiable(l);
                }
                let p = self.var();
                let cond = us
                    .iter()
                    .map(|u| Expr::neq(Expr::Var(p.clone()), Expr::Const(RdfTerm::Uri(u.clone()))))
                    .reduce(Expr::and)
                    .expect("non-empty negated set");
                let body = GraphPattern::filter(GraphPattern::triple(a.clone(), p, b.clone()), cond);
                LdqlQuery::project(out, seeded(a, eps(body)))
            }
            PpExpr::Seq(r1, r2) => {
                let z = TermPattern::Var(self.var());
                let l = self.path(a, r1, &z);
                let rr = self.path(&z, r2, b);
                LdqlQuery::project(out, LdqlQuery::and(l, rr))
            }
            PpExpr::Alt(r1, r2) => LdqlQuery::union(self.path(a, r1, b), self.path(a, r2, b)),
            PpExpr::Star(r1) => {
                let refl = self.reflexive(a, b);
                if is_literal(a) {
                    return refl;
                }
                let steps = self.steps(a, r1, b);
                LdqlQuery::union(refl, steps)
            }
        }
    }

    /// `FILTER(?x ≠ ?y)` over twin BINDs of the literal: always empty.
    fn unsatisfiable(&mut self, l: &RdfTerm) -> LdqlQuery {
        let (x, y) = (self.var(), self.var());
        let twin = GraphPattern::bind(GraphPattern::bind(GraphPattern::empty(), Expr::Const(l.clone()), x.clone()), Expr::Const(l.clone()), y.clone());
        eps(GraphPattern::filter(twin, Expr::neq(Expr::Var(x), Expr::Var(y))))
    }

    /// Mappings with `μ[α] = μ[β] ∈ terms(W)`.
    fn reflexive(&mut self, a: &TermPattern, b: &TermPattern) -> LdqlQuery {
        let out = vars_of([a, b]);
        let body = match (a, b) {
            (TermPattern::Var(x), TermPattern::Var(y)) if x != y => {
                let (p, o, s) = (self.var(), self.var(), self.var());
                let same = Expr::eq(Expr::Var(x.clone()), Expr::Var(y.clone()));
                let at = |t1: [&Variable; 3], t2: [&Variable; 3]| {
                    GraphPattern::filter(
                        GraphPattern::Bgp(vec![
                            TriplePattern::new(t1[0].clone(), t1[1].clone(), t1[2].clone()),
                            TriplePattern::new(t2[0].clone(), t2[1].clone(), t2[2].clone()),
                        ]),
                        same.clone(),
                    )
                };
                GraphPattern::union(
                    GraphPattern::union(at([x, &p, &o], [y, &p, &o]), at([&s, x, &o], [&s, y, &o])),
                    at([&s, &p, x], [&s, &p, y]),
                )
            }
            (TermPattern::Var(x), TermPattern::Var(_)) => self.occurs(x),
            (TermPattern::Var(v), TermPattern::Term(c)) | (TermPattern::Term(c), TermPattern::Var(v)) => {
                GraphPattern::filter(self.occurs(v), Expr::eq(Expr::Var(v.clone()), Expr::Const(c.clone())))
            }
            (TermPattern::Term(c1), TermPattern::Term(c2)) => {
                if c1 != c2 {
                    return self.unsatisfiable(c1);
                }
                let t = self.var();
                GraphPattern::filter(self.occurs(&t), Expr::eq(Expr::Var(t), Expr::Const(c1.clone())))
            }
        };
        let f = self.var();
        LdqlQuery::project(out, LdqlQuery::seed_var(f, eps(body)))
    }

    /// `?t` ranges over the terms of the current document.
    fn occurs(&mut self, t: &Variable) -> GraphPattern {
        let (s, p, o) = (self.var(), self.var(), self.var());
        GraphPattern::union(
            GraphPattern::union(GraphPattern::triple(t.clone(), p.clone(), o.clone()), GraphPattern::triple(s.clone(), t.clone(), o)),
            GraphPattern::triple(s, p, t.clone()),
        )
    }

    /// One or more `r1` steps; every intermediate node is retrievable.
    fn steps(&mut self, a: &TermPattern, r1: &PpExpr, b: &TermPattern) -> LdqlQuery {
        let out = vars_of([a, b]);
        let (v, w, z) = (self.var(), self.var(), self.var());
        let hop = LdqlQuery::and(
            eps(GraphPattern::graph(GraphTarget::Var(w.clone()), GraphPattern::empty())),
            self.path(&TermPattern::Var(w), r1, &TermPattern::Var(v.clone())),
        );
        let reach = LdqlQuery::basic(
            Lpe::star(Lpe::nav(v, hop)),
            GraphPattern::graph(GraphTarget::Var(z.clone()), GraphPattern::empty()),
        );
        let last = self.path(&TermPattern::Var(z), r1, b);
        LdqlQuery::project(out, LdqlQuery::and(seeded(a, reach), last))
    }
}
