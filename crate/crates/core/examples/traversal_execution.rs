//! Executing a certified query by dereferencing URIs one lookup at a time.
//!
//! Pass `--http <seed-uri>` to run a query against live N-Triples documents.

use ldql::executor::{exec_query_traced, ChaosBackend, FixtureBackend, HttpBackend, LookupService};
use ldql::lang::parse_query;
use ldql::rdf::{load_web, Uri};
use ldql::semantics::eval_query;
use std::collections::BTreeSet;
use std::time::Duration;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if let [_, flag, seed] = args.as_slice() {
        if flag == "--http" {
            let lk = LookupService::new(HttpBackend::new(Duration::from_secs(10), Some(Duration::from_millis(200))).unwrap());
            let q = parse_query("<< {+ _ _} , { ?s ?p ?o } >>").unwrap();
            let (out, trace) = exec_query_traced(&q, &BTreeSet::from([Uri::new(seed)]), &lk).unwrap();
            println!("{} mappings", out.len());
            print!("{}", trace.to_text());
            return;
        }
    }

    let w = load_web(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wex.ldw")).unwrap();
    let q = parse_query(
        "(SEED ?x << eps , { ?x <p1> ?w } >> AND << {_ <p1> _}* / [ {_ <p2> _} ] , { ?x <p1> ?y . ?x <p2> ?z } >>)",
    )
    .unwrap();
    let seeds = BTreeSet::from([Uri::new("uA")]);

    // Random per-lookup delays reorder completions but not results.
    let lk = LookupService::new(ChaosBackend::new(FixtureBackend::new(w.clone()), 7, Duration::from_millis(3)));
    let (out, trace) = exec_query_traced(&q, &seeds, &lk).unwrap();
    for line in out.to_lines() {
        println!("{line}");
    }
    print!("{}", trace.to_text());
    assert_eq!(out, eval_query(&q, &w, &seeds).unwrap());
}
