//! SPARQL graph patterns over an RDF dataset, with set semantics.

use ldql::lang::parse_pattern;
use ldql::rdf::{build_dataset, load_web, Uri};
use ldql::sparql::{eval_pattern, sbvars_pattern};

fn main() {
    let w = load_web(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wex.ldw")).unwrap();
    let ds = build_dataset(&w, &[Uri::new("uA"), Uri::new("uB"), Uri::new("uC")]);
    for text in [
        "{ ?x <p1> ?y }",
        "({ ?x <p1> ?y } OPT { ?y <p2> ?z })",
        "(GRAPH ?g { ?x <p2> ?y })",
        "(({ ?x ?p ?y } FILTER (?p != <p1>)) BIND (?x AS ?s))",
    ] {
        let p = parse_pattern(text).unwrap();
        println!("{p}  sbvars {:?}", sbvars_pattern(&p));
        for line in eval_pattern(&p, &ds.default, &ds).to_lines() {
            println!("  {line}");
        }
    }
}
