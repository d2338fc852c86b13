//! Reachability-based SPARQL under the three criteria, as plain LDQL queries.

use ldql::lang::parse_pattern;
use ldql::rdf::{load_web, Uri};
use ldql::reference::{eval_reach, reachable_docs};
use ldql::semantics::eval_query;
use ldql::translators::{translate_reachability, ReachCriterion};
use std::collections::BTreeSet;

fn main() {
    let w = load_web(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wex.ldw")).unwrap();
    let p = parse_pattern("{ ?x <p1> ?y }").unwrap();
    let seeds = BTreeSet::from([Uri::new("uB")]);
    for c in [ReachCriterion::All, ReachCriterion::None, ReachCriterion::Match] {
        let docs = reachable_docs(c, &seeds, &p, &w).docs;
        let q = translate_reachability(c, &p);
        let got = eval_query(&q, &w, &seeds).unwrap();
        assert_eq!(got, eval_reach(&p, c, &seeds, &w));
        println!("{c}: documents {docs:?}\n  {q}\n  {:?}", got.to_lines());
    }
}
