//! Deciding the syntactic Web-safeness condition and reading the certificate.

use ldql::lang::parse_query;
use ldql::safeness::{find_order, is_websafe_syntactic, validate_certificate};

fn main() {
    let q_ex = "SEED ?x << eps , { ?x <p1> ?w } >>";
    let q_ex1 = "<< {_ <p1> _}* / [ {_ <p2> _} ] , { ?x <p1> ?y . ?x <p2> ?z } >>";

    let refused = is_websafe_syntactic(&parse_query(q_ex).unwrap()).unwrap();
    print!("{}", refused.to_text());

    let q = parse_query(&format!("({q_ex} AND {q_ex1})")).unwrap();
    let report = is_websafe_syntactic(&q).unwrap();
    print!("{}", report.to_text());
    let cert = report.certificate.as_ref().unwrap();
    println!("certificate re-validates: {}", validate_certificate(&q, cert));

    let ops = [parse_query(q_ex).unwrap(), parse_query(q_ex1).unwrap()];
    println!("find_order: {:?}", find_order(&ops));
}
