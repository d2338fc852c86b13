//! Property path patterns under context-based semantics, and their LDQL translation.

use ldql::rdf::load_web;
use ldql::reference::{eval_pp_ctxt, ContextSelector};
use ldql::semantics::eval_query;
use ldql::translators::{parse_pp_pattern, translate_pp};
use std::collections::BTreeSet;

fn main() {
    let w = load_web(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wex.ldw")).unwrap();
    for (u, triples) in ContextSelector::new(&w).table() {
        println!("C({u}) = {triples:?}");
    }
    for text in ["<uA> (<p1>|<p2>)* ?y", "?x <p1>/<p2> ?y", "?x !(<p1>) ?y"] {
        let p = parse_pp_pattern(text).unwrap();
        let q = translate_pp(&p);
        let want = eval_pp_ctxt(&p, &w);
        let got = eval_query(&q, &w, &BTreeSet::new()).unwrap();
        println!("{p}\n  oracle {:?}\n  ldql   {:?}", want.to_lines(), got.to_lines());
        assert_eq!(want, got);
    }
}
