//! Surface syntaxes, sharing the LDQL lexer.
//!
//! ```text
//! pp-pattern := endpoint pp endpoint        endpoint := <uri> | ?var | "lit"
//! pp         := seq ("|" seq)*              seq := post ("/" post)*
//! post       := atom "*"*                   atom := <uri> | "!" <uri> | "!(" <uri> ("|" <uri>)* ")" | "(" pp ")"
//!
//! nautilod   := seq ("|" seq)*              seq := post ("/" post)*
//! post       := atom ("*" | "[" "ASK" pattern "]")*
//! atom       := <uri> | <uri> "^" | "<>" | "(" nautilod ")"
//! ```

use super::{NautilodExpr, PpEndpoint, PpExpr, PpPattern};
use crate::lang::{ParseError, ParseOptions, Parser, Tok};
use crate::rdf::{Literal, Uri};

pub fn parse_pp_pattern(text: &str) -> Result<PpPattern, ParseError> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let alpha = endpoint(&mut p)?;
    let pp = pp_alt(&mut p)?;
    let beta = endpoint(&mut p)?;
    p.end()?;
    Ok(PpPattern { alpha, pp, beta })
}

fn endpoint(p: &mut Parser) -> Result<PpEndpoint, ParseError> {
    match p.peek().clone() {
        Tok::Var(_) => Ok(PpEndpoint::Var(p.var()?)),
        Tok::Iri(_) => Ok(PpEndpoint::Uri(p.iri()?)),
        Tok::Lit(s) => {
            p.bump();
            Ok(PpEndpoint::Literal(Literal::new(s)))
        }
        other => Err(p.error(format!("expected a variable, IRI or literal endpoint, found {other}"))),
    }
}

fn pp_alt(p: &mut Parser) -> Result<PpExpr, ParseError> {
    let mut acc = pp_seq(p)?;
    while p.eat_sym("|") {
        acc = PpExpr::alt(acc, pp_seq(p)?);
    }
    Ok(acc)
}

fn pp_seq(p: &mut Parser) -> Result<PpExpr, ParseError> {
    let mut acc = pp_post(p)?;
    while p.eat_sym("/") {
        acc = PpExpr::seq(acc, pp_post(p)?);
    }
    Ok(acc)
}

fn pp_post(p: &mut Parser) -> Result<PpExpr, ParseError> {
    let mut acc = pp_atom(p)?;
    while p.eat_sym("*") {
        acc = PpExpr::star(acc);
    }
    Ok(acc)
}

fn pp_atom(p: &mut Parser) -> Result<PpExpr, ParseError> {
    if p.eat_sym("(") {
        let e = pp_alt(p)?;
        p.expect_sym(")")?;
        return Ok(e);
    }
    if p.eat_sym("!") {
        if !p.eat_sym("(") {
            return Ok(PpExpr::NegSet(vec![p.iri()?]));
        }
        let mut us: Vec<Uri> = vec![p.iri()?];
        while p.eat_sym("|") {
            us.push(p.iri()?);
        }
        p.expect_sym(")")?;
        return Ok(PpExpr::NegSet(us));
    }
    Ok(PpExpr::Pred(p.iri()?))
}

pub fn parse_nautilod(text: &str) -> Result<NautilodExpr, ParseError> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let n = n_alt(&mut p)?;
    p.end()?;
    Ok(n)
}

fn n_alt(p: &mut Parser) -> Result<NautilodExpr, ParseError> {
    let mut acc = n_seq(p)?;
    while p.eat_sym("|") {
        acc = NautilodExpr::alt(acc, n_seq(p)?);
    }
    Ok(acc)
}

fn n_seq(p: &mut Parser) -> Result<NautilodExpr, ParseError> {
    let mut acc = n_post(p)?;
    while p.eat_sym("/") {
        acc = NautilodExpr::seq(acc, n_post(p)?);
    }
    Ok(acc)
}

fn n_post(p: &mut Parser) -> Result<NautilodExpr, ParseError> {
    let mut acc = n_atom(p)?;
    loop {
        if p.eat_sym("*") {
            acc = NautilodExpr::star(acc);
        } else if p.is_sym("[") && matches!(p.peek_at(1), Tok::Word(w) if w == "ASK") {
            p.bump();
            p.bump();
            let pat = p.pattern()?;
            p.expect_sym("]")?;
            acc = NautilodExpr::ask(acc, pat);
        } else {
            return Ok(acc);
        }
    }
}

fn n_atom(p: &mut Parser) -> Result<NautilodExpr, ParseError> {
    if p.eat_sym("(") {
        let e = n_alt(p)?;
        p.expect_sym(")")?;
        return Ok(e);
    }
    if matches!(p.peek(), Tok::Iri(s) if s.is_empty()) {
        p.bump();
        return Ok(NautilodExpr::AnyFwd);
    }
    let u = p.iri()?;
    if p.eat_sym("^") {
        Ok(NautilodExpr::Bwd(u))
    } else {
        Ok(NautilodExpr::Fwd(u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_pattern;

    #[test]
    fn pp_precedence_and_round_trip() {
        let p = parse_pp_pattern("?x <p>/<q>*|!(<a>|<b>) \"lit\"").unwrap();
        let want = PpExpr::alt(
            PpExpr::seq(PpExpr::pred("p"), PpExpr::star(PpExpr::pred("q"))),
            PpExpr::NegSet(vec![Uri::new("a"), Uri::new("b")]),
        );
        assert_eq!(p.pp, want);
        assert_eq!(p.beta, PpEndpoint::Literal(Literal::new("lit")));
        assert_eq!(parse_pp_pattern(&p.to_string()).unwrap(), p);
        let nested = parse_pp_pattern("<u> (<p>|<q>)/(<r>/<s>)* ?y").unwrap();
        assert_eq!(parse_pp_pattern(&nested.to_string()).unwrap(), nested);
    }

    #[test]
    fn pp_endpoint_followed_by_iri_is_not_part_of_the_path() {
        let p = parse_pp_pattern("?x <p> <u>").unwrap();
        assert_eq!(p.pp, PpExpr::pred("p"));
        assert_eq!(p.beta, PpEndpoint::uri("u"));
        assert!(parse_pp_pattern("?x ?y").is_err());
        assert!(parse_pp_pattern("?x !() ?y").is_err());
    }

    #[test]
    fn nautilod_forms() {
        let n = parse_nautilod("<p1>/<p2>^* | <>[ASK { ?s <p2> ?o }]").unwrap();
        let want = NautilodExpr::alt(
            NautilodExpr::seq(NautilodExpr::fwd("p1"), NautilodExpr::star(NautilodExpr::bwd("p2"))),
            NautilodExpr::ask(NautilodExpr::AnyFwd, parse_pattern("{ ?s <p2> ?o }").unwrap()),
        );
        assert_eq!(n, want);
        assert_eq!(parse_nautilod(&n.to_string()).unwrap(), n);
        let m = parse_nautilod("(<a>|<b>)*[ASK {}]/(<c>/<d>)").unwrap();
        assert_eq!(parse_nautilod(&m.to_string()).unwrap(), m);
    }
}
