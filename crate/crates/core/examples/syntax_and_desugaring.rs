//! Parsing, canonical printing, UNION normal form and the core-LPE rewriting.

use ldql::lang::{desugar, parse_lpe, parse_query, rewrite_union_normal_form};

fn main() {
    let q = parse_query("(<< eps , { ?x <p> ?y } >> AND (<< {+ _ _} , { ?a <q> ?b } >> UNION SEED ?x << eps , { ?x <r> ?w } >>))").unwrap();
    println!("query:       {q}");
    println!("normal form: {}", rewrite_union_normal_form(&q).unwrap());
    println!("sbvars:      {:?}", q.sbvars());

    let l = parse_lpe("{+ <p1> _} / [ {_ <p2> _} ]").unwrap();
    let core = desugar(&l);
    println!("lpe:         {l}");
    println!("core lpe:    {core}");
    assert!(core.is_core());

    match parse_query("<< eps , { ?x <p> } >>") {
        Ok(_) => unreachable!(),
        Err(e) => println!("error:       {e}"),
    }
}
