//! A query that reads a non-authoritative triple, which context-based
//! property paths cannot see.

use ldql::lang::parse_query;
use ldql::rdf::load_web;
use ldql::reference::eval_pp_ctxt;
use ldql::semantics::eval_query;
use ldql::translators::parse_pp_pattern;
use std::collections::BTreeSet;

fn main() {
    let fixture = |name: &str| load_web(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
    let q = parse_query("SEED { <u> } << {+ <p> _} , { ?x ?x ?x } >>").unwrap();
    for name in ["separation.ldw", "w1.ldw", "w2.ldw"] {
        println!("{name}: {:?}", eval_query(&q, &fixture(name), &BTreeSet::new()).unwrap().to_lines());
    }
    let (w1, w2) = (fixture("w1.ldw"), fixture("w2.ldw"));
    for text in ["<u> <p> ?y", "?x <p>/<p> ?y", "?x !(<p>) ?y", "?x <p>* ?y"] {
        let p = parse_pp_pattern(text).unwrap();
        let (a, b) = (eval_pp_ctxt(&p, &w1), eval_pp_ctxt(&p, &w2));
        println!("{p}: {}", if a == b { "same on W1 and W2".to_string() } else { format!("{:?} vs {:?}", a.to_lines(), b.to_lines()) });
    }
}
