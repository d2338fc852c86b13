mod common;

use common::*;
use ldql::lang::parse_query;
use ldql::rdf::{parse_web, RdfTerm, Uri, WebOfLinkedData};
use ldql::reference::{eval_nautilod, eval_pp_ctxt, eval_reach};
use ldql::semantics::eval_query;
use ldql::sparql::{SolutionMapping, SolutionSet, Variable};
use ldql::translators::*;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn pp_agrees(p: &PpPattern, w: &WebOfLinkedData) -> Result<(), String> {
    let want = eval_pp_ctxt(p, w);
    let q = translate_pp(p);
    let got = eval_query(&q, w, &BTreeSet::new()).map_err(|e| format!("{p}: {e}"))?;
    if got == want {
        Ok(())
    } else {
        Err(format!("{p}\nquery {q}\noracle {:?}\nldql   {:?}", want.to_lines(), got.to_lines()))
    }
}

fn nautilod_agrees(n: &NautilodExpr, w: &WebOfLinkedData) -> Result<(), String> {
    let q = translate_nautilod(n);
    let x = Variable::new("x");
    for u in w.dom() {
        let want = eval_nautilod(n, w, u);
        let res = eval_query(&q, w, &BTreeSet::from([u.clone()])).map_err(|e| format!("{n}: {e}"))?;
        let got: BTreeSet<RdfTerm> = res.iter().filter_map(|m| m.get(&x).cloned()).collect();
        if res.iter().any(|m| m.len() != 1) || got != want {
            return Err(format!("{n} from {u}\nquery {q}\noracle {want:?}\nldql   {:?}", res.to_lines()));
        }
    }
    Ok(())
}

fn reach_agrees(c: ReachCriterion, p: &ldql::sparql::GraphPattern, s: &BTreeSet<Uri>, w: &WebOfLinkedData) -> Result<(), String> {
    let want = eval_reach(p, c, s, w);
    let q = translate_reachability(c, p);
    let got = eval_query(&q, w, s).map_err(|e| format!("{p}: {e}"))?;
    if got == want {
        Ok(())
    } else {
        Err(format!("{c} {p} seeds {s:?}\noracle {:?}\nldql   {:?}", want.to_lines(), got.to_lines()))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pp_translation_matches_context_semantics(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = web(&mut r);
        let p = pp_pattern(&mut r, 3);
        prop_assert!(pp_agrees(&p, &w).is_ok(), "{}", pp_agrees(&p, &w).unwrap_err());
    }

    #[test]
    fn nautilod_translation_matches_nautilod_semantics(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = web(&mut r);
        let n = nautilod(&mut r, 3);
        prop_assert!(nautilod_agrees(&n, &w).is_ok(), "{}", nautilod_agrees(&n, &w).unwrap_err());
    }

    #[test]
    fn reach_translation_matches_reachability_semantics(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = web(&mut r);
        let p = pattern(&mut r, 2, false);
        let s = seeds(&mut r);
        for c in [ReachCriterion::All, ReachCriterion::None, ReachCriterion::Match] {
            prop_assert!(reach_agrees(c, &p, &s, &w).is_ok(), "{}", reach_agrees(c, &p, &s, &w).unwrap_err());
        }
    }

    #[test]
    fn pp_surface_syntax_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = pp_pattern(&mut r, 3);
        prop_assert_eq!(parse_pp_pattern(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn nautilod_surface_syntax_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = nautilod(&mut r, 3);
        prop_assert_eq!(parse_nautilod(&n.to_string()).unwrap(), n);
    }

    #[test]
    fn translations_serialize_and_reparse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = translate_pp(&pp_pattern(&mut r, 2));
        let opts = ldql::lang::ParseOptions { allow_reserved: true };
        prop_assert_eq!(ldql::lang::parse_query_with(&q.to_string(), opts).unwrap(), q);
        let q = translate_nautilod(&nautilod(&mut r, 2));
        prop_assert_eq!(ldql::lang::parse_query_with(&q.to_string(), opts).unwrap(), q);
    }
}

fn wex() -> WebOfLinkedData {
    ldql::rdf::load_web(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wex.ldw")).unwrap()
}

#[test]
fn pp_examples_on_the_running_example() {
    let w = wex();
    for text in [
        "?x <p1> ?y",
        "?x <p1>* ?y",
        "<uA> (<p1>|<p2>)* ?y",
        "?x !(<p1>) ?y",
        "?x <p1>/<p1> <uC>",
        "<uC> <p1>* <uC>",
        "\"l\" <p1>* ?y",
        "?x <p1>* ?x",
    ] {
        pp_agrees(&parse_pp_pattern(text).unwrap(), &w).unwrap();
    }
}

#[test]
fn pp_star_with_unknown_constant_start_is_empty() {
    // u9 is neither retrievable nor a term: the reflexive clause does not apply.
    let w = wex();
    let p = parse_pp_pattern("<u9> <p1>* ?y").unwrap();
    assert!(eval_pp_ctxt(&p, &w).is_empty());
    pp_agrees(&p, &w).unwrap();
}

#[test]
fn nautilod_examples_on_the_running_example() {
    let w = wex();
    for text in ["<p1>", "<p1>^", "<>", "<p1>*", "<p1>/<p2>*", "<p1>[ASK { ?s <p1> ?o }]", "(<p1>|<p2>^)*/<>", "<p2>*/<p1>*"] {
        nautilod_agrees(&parse_nautilod(text).unwrap(), &w).unwrap();
    }
}

#[test]
fn nautilod_nullable_suffix_keeps_only_retrievable_midpoints() {
    // <> from a reaches the literal, which is not retrievable, so <>/<p>* must drop it.
    let w = parse_web("#doc d\n<a> <p> \"v\" .\n<a> <q> <b> .\n#adoc\n<a> d\n").unwrap();
    let n = parse_nautilod("<>/<p>*").unwrap();
    assert_eq!(eval_nautilod(&n, &w, &Uri::new("a")), BTreeSet::new());
    nautilod_agrees(&n, &w).unwrap();
    let m = parse_nautilod("<>").unwrap();
    assert_eq!(eval_nautilod(&m, &w, &Uri::new("a")), BTreeSet::from([RdfTerm::literal("v"), RdfTerm::uri("b")]));
    nautilod_agrees(&m, &w).unwrap();
}

#[test]
fn reach_none_on_a_pattern() {
    let p = ldql::lang::parse_pattern("{ ?x <p1> ?y }").unwrap();
    assert_eq!(translate_reachability(ReachCriterion::None, &p).to_string(), "<< eps , { ?x <p1> ?y } >>");
}

#[test]
fn reach_match_respects_repeated_variables() {
    // (a p b) does not match (?v p ?v), so d2 is not reachable.
    let w = parse_web("#doc d1\n<a> <p> <b> .\n#doc d2\n<b> <p> <b> .\n#adoc\n<a> d1\n<b> d2\n").unwrap();
    let p = ldql::lang::parse_pattern("{ ?v <p> ?v }").unwrap();
    let s = BTreeSet::from([Uri::new("a")]);
    assert!(eval_reach(&p, ReachCriterion::Match, &s, &w).is_empty());
    reach_agrees(ReachCriterion::Match, &p, &s, &w).unwrap();
}

#[test]
fn separating_query_sees_non_authoritative_triples() {
    let w = parse_web("#doc d\n<u> <p> <u2> .\n#doc d2\n<u2> <p> <u> .\n<u> <u> <u> .\n#adoc\n<u> d\n<u2> d2\n").unwrap();
    let q = parse_query("SEED { <u> } << {+ <p> _} , { ?x ?x ?x } >>").unwrap();
    let got = eval_query(&q, &w, &BTreeSet::new()).unwrap();
    let want: SolutionSet = [SolutionMapping::new().with("x", RdfTerm::uri("u"))].into_iter().collect();
    assert_eq!(got, want);
    // (u,u,u) sits in adoc(u2), so no context selector exposes it.
    assert!(eval_pp_ctxt(&parse_pp_pattern("?x <u> ?y").unwrap(), &w).is_empty());
    assert!(eval_pp_ctxt(&parse_pp_pattern("<u> !(<p>) ?y").unwrap(), &w).is_empty());
}
