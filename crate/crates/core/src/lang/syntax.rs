//! Concrete syntax for LDQL.
//!
//! ```text
//! query   := basic | "SEED" ("{" iri* "}" | iri | var) query
//!          | "(" query (("AND" query)+ | ("UNION" query)+) ")"
//!          | "PROJECT" "{" var* "}" "(" query ")"
//! basic   := "<<" lpe "," pattern ">>"
//! lpe     := cat ("|" cat)*        cat := post ("/" post)*       post := atom "*"*
//! atom    := "eps" | "{" lterm lterm lterm "}" | "[" lpe "]" | "(" var ":" query ")" | "(" lpe ")"
//! lterm   := "+" | "_" | iri | literal
//! pattern := "{" (triple ("." triple)* "."?)? "}"
//!          | "(" pattern ("AND" | "OPT" | "UNION") pattern ")"
//!          | "(" pattern "FILTER" expr ")" | "(" pattern "BIND" "(" expr "AS" var ")" ")"
//!          | "(" "GRAPH" (iri | var) pattern ")"
//! expr    := and ("||" and)*      and := unary ("&&" unary)*     unary := "!" unary | cmp
//! cmp     := eatom (("=" | "!=") eatom)?                          eatom := "(" expr ")" | var | iri | literal
//! ```
//!
//! `%` starts a comment that runs to the end of the line.

use super::{is_reserved, LdqlQuery, Lexer, Lpe, Pos, Tok};
use crate::rdf::{LinkPattern, LinkTerm, Literal, RdfTerm, Uri};
use crate::sparql::{Expr, GraphPattern, GraphTarget, TermPattern, TriplePattern, Variable};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept variables in the generated `?_gN` namespace.
    pub allow_reserved: bool,
}

pub fn parse_query(text: &str) -> Result<LdqlQuery, ParseError> {
    parse_query_with(text, ParseOptions::default())
}

pub fn parse_query_with(text: &str, opts: ParseOptions) -> Result<LdqlQuery, ParseError> {
    let mut p = Parser::new(text, opts)?;
    let q = p.query()?;
    p.end()?;
    Ok(q)
}

pub fn parse_lpe(text: &str) -> Result<Lpe, ParseError> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let l = p.lpe()?;
    p.end()?;
    Ok(l)
}

pub fn parse_pattern(text: &str) -> Result<GraphPattern, ParseError> {
    let mut p = Parser::new(text, ParseOptions::default())?;
    let g = p.pattern()?;
    p.end()?;
    Ok(g)
}

pub fn serialize_query(q: &LdqlQuery) -> String {
    q.to_string()
}

/// Recursive-descent parser over a token vector; shared with the surface syntaxes of the translators.
pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    opts: ParseOptions,
}

impl Parser {
    pub(crate) fn new(text: &str, opts: ParseOptions) -> Result<Self, ParseError> {
        let toks = Lexer::tokenize(text).map_err(|(pos, message)| ParseError { line: pos.line, col: pos.col, message })?;
        Ok(Parser { toks, i: 0, opts })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        let pos = self.toks[self.i].1;
        ParseError { line: pos.line, col: pos.col, message: message.into() }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    pub(crate) fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub(crate) fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{s}'")))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{w}'")))
        }
    }

    pub(crate) fn end(&mut self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub(crate) fn iri(&mut self) -> Result<Uri, ParseError> {
        match self.peek().clone() {
            Tok::Iri(s) if !s.is_empty() => {
                self.bump();
                Ok(Uri::new(s))
            }
            Tok::Iri(_) => Err(self.error("empty IRI")),
            _ => Err(self.unexpected("an IRI")),
        }
    }

    pub(crate) fn var(&mut self) -> Result<Variable, ParseError> {
        match self.peek().clone() {
            Tok::Var(name) => {
                if is_reserved(&name) && !self.opts.allow_reserved {
                    return Err(self.error(format!("?{name} is in the reserved namespace for generated variables")));
                }
                self.bump();
                Ok(Variable::new(name))
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    // ---- queries ----

    pub(crate) fn query(&mut self) -> Result<LdqlQuery, ParseError> {
        match self.peek().clone() {
            Tok::LtLt => {
                self.bump();
                let l = self.lpe()?;
                self.expect_sym(",")?;
                let p = self.pattern()?;
                if !matches!(self.peek(), Tok::GtGt) {
                    return Err(self.unexpected("'>>'"));
                }
                self.bump();
                Ok(LdqlQuery::Basic(l, p))
            }
            Tok::Word(w) if w == "SEED" => {
                self.bump();
                match self.peek().clone() {
                    Tok::Var(_) => {
                        let v = self.var()?;
                        Ok(LdqlQuery::seed_var(v, self.query()?))
                    }
                    Tok::Iri(_) => {
                        let u = self.iri()?;
                        Ok(LdqlQuery::seed_uris([u], self.query()?))
                    }
                    Tok::Sym("{") => {
                        self.bump();
                        let mut us = BTreeSet::new();
                        while !self.eat_sym("}") {
                            us.insert(self.iri()?);
                        }
                        Ok(LdqlQuery::SeedUris(us, Box::new(self.query()?)))
                    }
                    _ => Err(self.unexpected("a URI set or a variable after SEED")),
                }
            }
            Tok::Word(w) if w == "PROJECT" => {
                self.bump();
                self.expect_sym("{")?;
                let mut vs = BTreeSet::new();
                while !self.eat_sym("}") {
                    vs.insert(self.var()?);
                }
                self.expect_sym("(")?;
                let q = self.query()?;
                self.expect_sym(")")?;
                Ok(LdqlQuery::Project(vs, Box::new(q)))
            }
            Tok::Sym("(") => {
                self.bump();
                let mut acc = self.query()?;
                let op = match self.peek() {
                    Tok::Word(w) if w == "AND" || w == "UNION" => w.clone(),
                    _ => return Err(self.unexpected("'AND' or 'UNION'")),
                };
                while self.is_word(&op) {
                    self.bump();
                    let rhs = self.query()?;
                    acc = if op == "AND" { LdqlQuery::and(acc, rhs) } else { LdqlQuery::union(acc, rhs) };
                }
                if self.is_word("AND") || self.is_word("UNION") {
                    return Err(self.error("mixing AND and UNION needs parentheses"));
                }
                self.expect_sym(")")?;
                Ok(acc)
            }
            _ => Err(self.unexpected("a query")),
        }
    }

    // ---- link path expressions ----

    pub(crate) fn lpe(&mut self) -> Result<Lpe, ParseError> {
        let mut acc = self.lpe_cat()?;
        while self.eat_sym("|") {
            acc = Lpe::alt(acc, self.lpe_cat()?);
        }
        Ok(acc)
    }

    fn lpe_cat(&mut self) -> Result<Lpe, ParseError> {
        let mut acc = self.lpe_post()?;
        while self.eat_sym("/") {
            acc = Lpe::concat(acc, self.lpe_post()?);
        }
        Ok(acc)
    }

    fn lpe_post(&mut self) -> Result<Lpe, ParseError> {
        let mut acc = self.lpe_atom()?;
        while self.eat_sym("*") {
            acc = Lpe::star(acc);
        }
        Ok(acc)
    }

    fn lpe_atom(&mut self) -> Result<Lpe, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) if w == "eps" => {
                self.bump();
                Ok(Lpe::Epsilon)
            }
            Tok::Sym("{") => {
                self.bump();
                let s = self.link_term()?;
                let p = self.link_term()?;
                let o = self.link_term()?;
                let lp = LinkPattern::new(s, p, o).ok_or_else(|| self.error("literal in subject or predicate of a link pattern"))?;
                self.expect_sym("}")?;
                Ok(Lpe::Pattern(lp))
            }
            Tok::Sym("[") => {
                self.bump();
                let l = self.lpe()?;
                self.expect_sym("]")?;
                Ok(Lpe::test(l))
            }
            Tok::Sym("(") => {
                self.bump();
                if matches!(self.peek(), Tok::Var(_)) {
                    let v = self.var()?;
                    self.expect_sym(":")?;
                    let q = self.query()?;
                    self.expect_sym(")")?;
                    Ok(Lpe::nav(v, q))
                } else {
                    let l = self.lpe()?;
                    self.expect_sym(")")?;
                    Ok(l)
                }
            }
            _ => Err(self.unexpected("a link path expression")),
        }
    }

    fn link_term(&mut self) -> Result<LinkTerm, ParseError> {
        match self.peek().clone() {
            Tok::Sym("+") => {
                self.bump();
                Ok(LinkTerm::Context)
            }
            Tok::Sym("_") => {
                self.bump();
                Ok(LinkTerm::Wildcard)
            }
            Tok::Iri(_) => Ok(LinkTerm::Uri(self.iri()?)),
            Tok::Lit(s) => {
                self.bump();
                Ok(LinkTerm::Literal(Literal::new(s)))
            }
            _ => Err(self.unexpected("'+', '_', an IRI or a literal")),
        }
    }

    // ---- graph patterns ----

    pub(crate) fn pattern(&mut self) -> Result<GraphPattern, ParseError> {
        if self.eat_sym("{") {
            let mut tps = Vec::new();
            if !self.eat_sym("}") {
                loop {
                    let s = self.term_pattern()?;
                    let p = self.term_pattern()?;
                    let o = self.term_pattern()?;
                    tps.push(TriplePattern { s, p, o });
                    if self.eat_sym("}") {
                        break;
                    }
                    self.expect_sym(".")?;
                    if self.eat_sym("}") {
                        break;
                    }
                }
            }
            return Ok(GraphPattern::Bgp(tps));
        }
        self.expect_sym("(")?;
        if self.is_word("GRAPH") {
            self.bump();
            let g = match self.peek() {
                Tok::Var(_) => GraphTarget::Var(self.var()?),
                _ => GraphTarget::Uri(self.iri()?),
            };
            let inner = self.pattern()?;
            self.expect_sym(")")?;
            return Ok(GraphPattern::graph(g, inner));
        }
        let lhs = self.pattern()?;
        let op = match self.peek() {
            Tok::Word(w) => w.clone(),
            _ => return Err(self.unexpected("'AND', 'OPT', 'UNION', 'FILTER' or 'BIND'")),
        };
        self.bump();
        let out = match op.as_str() {
            "AND" => GraphPattern::and(lhs, self.pattern()?),
            "OPT" => GraphPattern::opt(lhs, self.pattern()?),
            "UNION" => GraphPattern::union(lhs, self.pattern()?),
            "FILTER" => GraphPattern::filter(lhs, self.expr()?),
            "BIND" => {
                self.expect_sym("(")?;
                let e = self.expr()?;
                self.expect_word("AS")?;
                let v = self.var()?;
                self.expect_sym(")")?;
                if lhs.vars().contains(&v) {
                    return Err(self.error(format!("BIND target {v} already occurs in the pattern")));
                }
                GraphPattern::bind(lhs, e, v)
            }
            other => return Err(self.error(format!("unknown pattern operator '{other}'"))),
        };
        self.expect_sym(")")?;
        Ok(out)
    }

    fn term_pattern(&mut self) -> Result<TermPattern, ParseError> {
        match self.peek().clone() {
            Tok::Var(_) => Ok(TermPattern::Var(self.var()?)),
            Tok::Iri(_) => Ok(TermPattern::from(self.iri()?)),
            Tok::Lit(s) => {
                self.bump();
                Ok(TermPattern::Term(RdfTerm::literal(s)))
            }
            _ => Err(self.unexpected("a variable, IRI or literal")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.expr_and()?;
        while self.eat_sym("||") {
            acc = Expr::or(acc, self.expr_and()?);
        }
        Ok(acc)
    }

    fn expr_and(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.expr_unary()?;
        while self.eat_sym("&&") {
            acc = Expr::and(acc, self.expr_unary()?);
        }
        Ok(acc)
    }

    fn expr_unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_sym("!") {
            return Ok(Expr::not(self.expr_unary()?));
        }
        let a = self.expr_atom()?;
        if self.eat_sym("=") {
            return Ok(Expr::eq(a, self.expr_atom()?));
        }
        if self.eat_sym("!=") {
            return Ok(Expr::neq(a, self.expr_atom()?));
        }
        Ok(a)
    }

    fn expr_atom(&mut self) -> Result<Expr, ParseError> {
        if self.eat_sym("(") {
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        Ok(Expr::term(&self.term_pattern()?))
    }
}

// ---- serialization ----

impl fmt::Display for LdqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LdqlQuery::Basic(l, p) => write!(f, "<< {l} , {p} >>"),
            LdqlQuery::SeedUris(us, q) => {
                f.write_str("SEED {")?;
                for u in us {
                    write!(f, " {u}")?;
                }
                write!(f, " }} {q}")
            }
            LdqlQuery::SeedVar(v, q) => write!(f, "SEED {v} {q}"),
            LdqlQuery::And(a, b) => write!(f, "({a} AND {b})"),
            LdqlQuery::Union(a, b) => write!(f, "({a} UNION {b})"),
            LdqlQuery::Project(vs, q) => {
                f.write_str("PROJECT {")?;
                for v in vs {
                    write!(f, " {v}")?;
                }
                write!(f, " }} ( {q} )")
            }
        }
    }
}

impl Lpe {
    fn precedence(&self) -> u8 {
        match self {
            Lpe::Alt(..) => 0,
            Lpe::Concat(..) => 1,
            Lpe::Star(_) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(0, f)?;
            return f.write_str(")");
        }
        match self {
            Lpe::Epsilon => f.write_str("eps"),
            Lpe::Pattern(lp) => write!(f, "{lp}"),
            Lpe::Alt(a, b) => {
                a.fmt_at(0, f)?;
                f.write_str(" | ")?;
                b.fmt_at(1, f)
            }
            Lpe::Concat(a, b) => {
                a.fmt_at(1, f)?;
                f.write_str(" / ")?;
                b.fmt_at(2, f)
            }
            Lpe::Star(a) => {
                a.fmt_at(2, f)?;
                f.write_str("*")
            }
            Lpe::Test(a) => {
                f.write_str("[ ")?;
                a.fmt_at(0, f)?;
                f.write_str(" ]")
            }
            Lpe::NavSub(v, q) => write!(f, "({v} : {q})"),
        }
    }
}

impl fmt::Display for Lpe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}

impl fmt::Display for GraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphPattern::Bgp(tps) if tps.is_empty() => f.write_str("{ }"),
            GraphPattern::Bgp(tps) => {
                f.write_str("{ ")?;
                for (i, t) in tps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" . ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(" }")
            }
            GraphPattern::And(a, b) => write!(f, "({a} AND {b})"),
            GraphPattern::Opt(a, b) => write!(f, "({a} OPT {b})"),
            GraphPattern::Union(a, b) => write!(f, "({a} UNION {b})"),
            GraphPattern::Filter(a, e) => write!(f, "({a} FILTER {e})"),
            GraphPattern::Graph(g, a) => write!(f, "(GRAPH {g} {a})"),
            GraphPattern::Bind(a, e, v) => write!(f, "({a} BIND ({e} AS {v}))"),
        }
    }
}

/// Serialized as canonical text; reserved variables are accepted on the way back.
impl serde::Serialize for LdqlQuery {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for LdqlQuery {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_query_with(&text, ParseOptions { allow_reserved: true }).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_ex_parses_to_expected_ast() {
        let q = parse_query("SEED ?x << eps , { ?x <p1> ?w } >>").unwrap();
        let want = LdqlQuery::seed_var(
            Variable::new("x"),
            LdqlQuery::basic(Lpe::Epsilon, GraphPattern::triple(TermPattern::var("x"), TermPattern::uri("p1"), TermPattern::var("w"))),
        );
        assert_eq!(q, want);
    }

    #[test]
    fn lpe_ex_structure() {
        let q = parse_query("<< {_ <p1> _}* / [ {_ <p2> _} ] , { ?x <p1> ?y . ?x <p2> ?z } >>").unwrap();
        let LdqlQuery::Basic(Lpe::Concat(a, b), GraphPattern::Bgp(tps)) = &q else { panic!("{q:?}") };
        assert!(matches!(**a, Lpe::Star(_)));
        assert!(matches!(**b, Lpe::Test(_)));
        assert_eq!(tps.len(), 2);
    }

    #[test]
    fn explicit_parentheses_are_kept() {
        let a = "<< eps , { } >>";
        let q = parse_query(&format!("({a} AND ({a} AND {a}))")).unwrap();
        let LdqlQuery::And(_, r) = &q else { panic!() };
        assert!(matches!(**r, LdqlQuery::And(..)));
        let chain = parse_query(&format!("({a} UNION {a} UNION {a})")).unwrap();
        let LdqlQuery::Union(l, _) = &chain else { panic!() };
        assert!(matches!(**l, LdqlQuery::Union(..)));
    }

    #[test]
    fn empty_basic_serializes_canonically() {
        assert_eq!(serialize_query(&LdqlQuery::basic(Lpe::Epsilon, GraphPattern::empty())), "<< eps , { } >>");
    }

    #[test]
    fn lpe_precedence_round_trips() {
        for s in ["eps | eps / eps*", "(eps | eps) / eps", "eps / (eps / eps)", "(eps / eps)*", "eps**", "[ eps | {+ _ \"l\"} ]"] {
            let l = parse_lpe(s).unwrap();
            assert_eq!(parse_lpe(&l.to_string()).unwrap(), l, "{s}");
        }
        assert_eq!(parse_lpe("eps | eps / eps*").unwrap().to_string(), "eps | eps / eps*");
    }

    #[test]
    fn patterns_round_trip() {
        let s = "((GRAPH ?g { ?s ?p \"x\" }) OPT (({ ?s <p> ?o } FILTER (!(?o = <a>) || (?s != ?o))) BIND (<a> AS ?z)))";
        let p = parse_pattern(s).unwrap();
        assert_eq!(parse_pattern(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_query("SEED ?x\n  << eps , { ?x <p1> } >>").unwrap_err();
        assert_eq!((e.line, e.col), (2, 22));
        let e = parse_query("(<< eps , { } >> AND << eps , { } >>").unwrap_err();
        assert!(e.message.contains("')'"), "{e}");
    }

    #[test]
    fn reserved_variables_need_opt_in() {
        assert!(parse_query("<< eps , { ?_g1 <p> ?x } >>").is_err());
        assert!(parse_query_with("<< eps , { ?_g1 <p> ?x } >>", ParseOptions { allow_reserved: true }).is_ok());
    }

    #[test]
    fn literal_subject_in_link_pattern_is_rejected() {
        assert!(parse_lpe("{\"a\" <p> _}").is_err());
    }

    #[test]
    fn bind_target_must_be_new() {
        assert!(parse_pattern("({ ?x <p> ?y } BIND (<a> AS ?x))").is_err());
    }
}
