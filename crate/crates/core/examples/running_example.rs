//! Link graph, datasets, LPE evaluation and the running-example queries.

use ldql::lang::{parse_lpe, parse_query};
use ldql::rdf::{build_dataset, link_graph, load_web, Uri};
use ldql::semantics::{eval_lpe, eval_query};
use std::collections::BTreeSet;

fn main() {
    let w = load_web(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wex.ldw")).unwrap();

    println!("link graph:");
    for e in link_graph(&w) {
        println!("  {} --({}, {})--> {}", e.src, e.triple, e.via, e.tgt);
    }

    let ds = build_dataset(&w, &[Uri::new("uA"), Uri::new("uC")]);
    println!("dataset({{uA, uC}}) default graph:");
    for t in &ds.default {
        println!("  {t}");
    }
    for (name, g) in &ds.named {
        println!("named graph {name}: {} triples", g.len());
    }

    let lpe = parse_lpe("{_ <p1> _}* / [ {_ <p2> _} ]").unwrap();
    println!("lpe from uA reaches {:?}", eval_lpe(&lpe, &w, &Uri::new("uA")).unwrap());

    let seeds = BTreeSet::from([Uri::new("uA")]);
    for text in [
        "<< {_ <p1> _}* / [ {_ <p2> _} ] , { ?x <p1> ?y . ?x <p2> ?z } >>",
        "(SEED ?x << eps , { ?x <p1> ?w } >> AND << {_ <p1> _}* / [ {_ <p2> _} ] , { ?x <p1> ?y . ?x <p2> ?z } >>)",
    ] {
        let q = parse_query(text).unwrap();
        println!("{q}");
        for line in eval_query(&q, &w, &seeds).unwrap().to_lines() {
            println!("  {line}");
        }
    }
}
