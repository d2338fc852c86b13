//! NautiLOD expressions and their single-variable LDQL translation.

use ldql::rdf::load_web;
use ldql::reference::eval_nautilod;
use ldql::semantics::eval_query;
use ldql::sparql::Variable;
use ldql::translators::{parse_nautilod, trans_n, translate_nautilod};
use std::collections::BTreeSet;

fn main() {
    let w = load_web(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wex.ldw")).unwrap();
    let x = Variable::new("x");
    for text in ["<p1>*", "<p1>/<p2>^", "<>[ASK { ?s <p2> ?o }]"] {
        let n = parse_nautilod(text).unwrap();
        println!("{n}\n  navigation: {}\n  query:      {}", trans_n(&n), translate_nautilod(&n));
        for u in w.dom() {
            let want = eval_nautilod(&n, &w, u);
            let got: BTreeSet<_> = eval_query(&translate_nautilod(&n), &w, &BTreeSet::from([u.clone()]))
                .unwrap()
                .iter()
                .filter_map(|m| m.get(&x).cloned())
                .collect();
            assert_eq!(want, got);
            println!("  from {u}: {}", want.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "));
        }
    }
}
