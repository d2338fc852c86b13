use super::{join, Expr, GraphPattern, GraphTarget, SolutionMapping, SolutionSet, TermPattern, TriplePattern};
use crate::rdf::{Graph, RdfDataset, RdfTerm, RdfTriple};

/// Value of an expression: a term, or a boolean produced by a comparison or connective.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExprValue {
    Term(RdfTerm),
    Bool(bool),
}

/// `None` is an evaluation error (unbound variable, non-boolean operand of a connective).
pub fn eval_expr(e: &Expr, m: &SolutionMapping) -> Option<ExprValue> {
    match e {
        Expr::Const(t) => Some(ExprValue::Term(t.clone())),
        Expr::Var(v) => m.get(v).cloned().map(ExprValue::Term),
        Expr::Eq(a, b) => Some(ExprValue::Bool(eval_expr(a, m)? == eval_expr(b, m)?)),
        Expr::Neq(a, b) => Some(ExprValue::Bool(eval_expr(a, m)? != eval_expr(b, m)?)),
        Expr::Not(a) => Some(ExprValue::Bool(!ebv(eval_expr(a, m))?)),
        Expr::And(a, b) => match (ebv(eval_expr(a, m)), ebv(eval_expr(b, m))) {
            (Some(false), _) | (_, Some(false)) => Some(ExprValue::Bool(false)),
            (Some(true), Some(true)) => Some(ExprValue::Bool(true)),
            _ => None,
        },
        Expr::Or(a, b) => match (ebv(eval_expr(a, m)), ebv(eval_expr(b, m))) {
            (Some(true), _) | (_, Some(true)) => Some(ExprValue::Bool(true)),
            (Some(false), Some(false)) => Some(ExprValue::Bool(false)),
            _ => None,
        },
    }
}

fn ebv(v: Option<ExprValue>) -> Option<bool> {
    match v? {
        ExprValue::Bool(b) => Some(b),
        ExprValue::Term(_) => None,
    }
}

fn bind_position(m: &mut SolutionMapping, tp: &TermPattern, x: &RdfTerm) -> bool {
    match tp {
        TermPattern::Term(c) => c == x,
        TermPattern::Var(v) => match m.get(v) {
            Some(bound) => bound == x,
            None => {
                m.insert(v.clone(), x.clone());
                true
            }
        },
    }
}

fn extend(m: &SolutionMapping, tp: &TriplePattern, t: &RdfTriple) -> Option<SolutionMapping> {
    let mut out = m.clone();
    let xs = t.positions();
    for (p, x) in tp.positions().into_iter().zip(xs.iter()) {
        if !bind_position(&mut out, p, x) {
            return None;
        }
    }
    Some(out)
}

/// Set-semantics evaluation of `p` with `active` as the active graph.
///
/// `GRAPH u P` with a URI that names no graph in `ds` yields no solutions.
pub fn eval_pattern(p: &GraphPattern, active: &Graph, ds: &RdfDataset) -> SolutionSet {
    match p {
        GraphPattern::Bgp(tps) => {
            let mut cur = SolutionSet::unit();
            for tp in tps {
                let mut next = SolutionSet::new();
                for m in cur.iter() {
                    for t in active {
                        if let Some(m2) = extend(m, tp, t) {
                            next.insert(m2);
                        }
                    }
                }
                cur = next;
            }
            cur
        }
        GraphPattern::And(a, b) => join(&eval_pattern(a, active, ds), &eval_pattern(b, active, ds)),
        GraphPattern::Union(a, b) => eval_pattern(a, active, ds).union(eval_pattern(b, active, ds)),
        GraphPattern::Opt(a, b) => {
            let left = eval_pattern(a, active, ds);
            let right = eval_pattern(b, active, ds);
            let mut out = SolutionSet::new();
            for m1 in left.iter() {
                let mut extended = false;
                for m2 in right.iter() {
                    if let Some(m) = m1.merge(m2) {
                        out.insert(m);
                        extended = true;
                    }
                }
                if !extended {
                    out.insert(m1.clone());
                }
            }
            out
        }
        GraphPattern::Filter(a, e) => eval_pattern(a, active, ds)
            .into_iter()
            .filter(|m| eval_expr(e, m) == Some(ExprValue::Bool(true)))
            .collect(),
        GraphPattern::Graph(GraphTarget::Uri(u), a) => match ds.named.get(u) {
            Some(g) => eval_pattern(a, g, ds),
            None => SolutionSet::new(),
        },
        GraphPattern::Graph(GraphTarget::Var(v), a) => {
            let mut out = SolutionSet::new();
            for (name, g) in &ds.named {
                let tag: SolutionSet = [SolutionMapping::new().with(v.name(), RdfTerm::Uri(name.clone()))].into_iter().collect();
                out = out.union(join(&eval_pattern(a, g, ds), &tag));
            }
            out
        }
        GraphPattern::Bind(a, e, v) => eval_pattern(a, active, ds)
            .into_iter()
            .map(|mut m| {
                if m.get(v).is_none() {
                    match eval_expr(e, &m) {
                        Some(ExprValue::Term(t)) => {
                            m.insert(v.clone(), t);
                        }
                        Some(ExprValue::Bool(b)) => {
                            m.insert(v.clone(), RdfTerm::literal(if b { "true" } else { "false" }));
                        }
                        None => {}
                    }
                }
                m
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{build_dataset, parse_web, Uri};
    use crate::sparql::Variable;

    fn wex() -> crate::rdf::WebOfLinkedData {
        parse_web("#doc dA\n<uA> <p1> <uB> .\n<uB> <p2> <uC> .\n#doc dB\n<uB> <p1> <uC> .\n#doc dC\n<uA> <p2> <uC> .\n#adoc\n<uA> dA\n<uB> dB\n<uC> dC\n<p1> dA\n").unwrap()
    }

    fn v(n: &str) -> TermPattern {
        TermPattern::var(n)
    }

    #[test]
    fn empty_bgp_yields_the_empty_mapping() {
        assert_eq!(eval_pattern(&GraphPattern::empty(), &Graph::new(), &RdfDataset::default()), SolutionSet::unit());
    }

    #[test]
    fn graph_variable_enumerates_named_graphs() {
        let w = wex();
        let ds = build_dataset(&w, [&Uri::new("uA"), &Uri::new("uC")]);
        let got = eval_pattern(&GraphPattern::graph_var(&Variable::new("v"), GraphPattern::empty()), &ds.default, &ds);
        assert_eq!(got.to_lines(), ["?v=<uA>", "?v=<uC>"]);
    }

    #[test]
    fn filter_on_predicate_over_single_document() {
        let w = wex();
        let g = w.data_of(&Uri::new("uA")).unwrap().clone();
        let p = GraphPattern::filter(
            GraphPattern::triple(v("x"), v("p"), v("y")),
            Expr::neq(Expr::Var(Variable::new("p")), Expr::Const(RdfTerm::uri("p1"))),
        );
        let got = eval_pattern(&p, &g, &RdfDataset::default());
        assert_eq!(got.to_lines(), ["?p=<p2> ?x=<uB> ?y=<uC>"]);
    }

    #[test]
    fn bind_error_keeps_mapping_without_binding() {
        let p = GraphPattern::bind(GraphPattern::empty(), Expr::Var(Variable::new("nope")), Variable::new("z"));
        assert_eq!(eval_pattern(&p, &Graph::new(), &RdfDataset::default()), SolutionSet::unit());
    }

    #[test]
    fn graph_with_unknown_uri_is_empty() {
        let p = GraphPattern::graph(GraphTarget::Uri(Uri::new("nowhere")), GraphPattern::empty());
        assert!(eval_pattern(&p, &Graph::new(), &RdfDataset::default()).is_empty());
    }

    #[test]
    fn opt_keeps_unextended_left_mappings() {
        let w = wex();
        let g = w.data_of(&Uri::new("uA")).unwrap().clone();
        let p = GraphPattern::opt(
            GraphPattern::triple(v("x"), TermPattern::uri("p1"), v("y")),
            GraphPattern::triple(v("y"), TermPattern::uri("p1"), v("z")),
        );
        assert_eq!(eval_pattern(&p, &g, &RdfDataset::default()).to_lines(), ["?x=<uA> ?y=<uB>"]);
    }
}
