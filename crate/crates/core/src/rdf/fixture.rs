//! Line-oriented fixture format for webs.
//!
//! ```text
//! % comment
//! #doc dA
//! <http://ex/uA> <http://ex/p1> <http://ex/uB> .
//! #adoc
//! <http://ex/uA> dA
//! ```

use super::{BlankNode, DocId, Document, Graph, Literal, RdfTerm, RdfTriple, Uri, WebError, WebOfLinkedData};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("blank node _:{label} occurs in documents {first} and {second}")]
    SharedBlankNode { label: String, first: DocId, second: DocId },
    #[error(transparent)]
    Web(#[from] WebError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

enum Section {
    None,
    Doc(DocId),
    Adoc,
}

pub fn load_web(path: impl AsRef<Path>) -> Result<WebOfLinkedData, FixtureError> {
    parse_web(&std::fs::read_to_string(path)?)
}

pub fn parse_web(text: &str) -> Result<WebOfLinkedData, FixtureError> {
    let mut docs: BTreeMap<DocId, Graph> = BTreeMap::new();
    let mut adoc: BTreeMap<Uri, DocId> = BTreeMap::new();
    let mut blank_home: HashMap<String, DocId> = HashMap::new();
    let mut section = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| FixtureError::Syntax { line: line_no, message };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#doc") {
            let id = rest.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(err(format!("bad document id {id:?}")));
            }
            let id = DocId::new(id);
            if docs.insert(id.clone(), Graph::new()).is_some() {
                return Err(err(format!("document {id} declared twice")));
            }
            section = Section::Doc(id);
            continue;
        }
        if line == "#adoc" {
            section = Section::Adoc;
            continue;
        }
        match &section {
            Section::None => return Err(err("content before any #doc or #adoc section".into())),
            Section::Doc(id) => {
                let mut cur = Cursor { s: line, pos: 0 };
                let t = parse_triple(&mut cur, id).map_err(err)?;
                for x in [t.subject(), t.object()] {
                    if let RdfTerm::Blank(b) = x {
                        let home = blank_home.entry(b.label.to_string()).or_insert_with(|| id.clone());
                        if home != id {
                            return Err(FixtureError::SharedBlankNode {
                                label: b.label.to_string(),
                                first: home.clone(),
                                second: id.clone(),
                            });
                        }
                    }
                }
                docs.get_mut(id).expect("section doc exists").insert(t);
            }
            Section::Adoc => {
                let mut cur = Cursor { s: line, pos: 0 };
                let u = cur.iri().map_err(err)?;
                cur.skip_ws();
                let id = cur.rest().trim();
                if id.is_empty() || id.contains(char::is_whitespace) {
                    return Err(err(format!("bad document id {id:?}")));
                }
                let id = DocId::new(id);
                if let Some(prev) = adoc.insert(u.clone(), id.clone()) {
                    if prev != id {
                        return Err(err(format!("{u} mapped to both {prev} and {id}")));
                    }
                }
            }
        }
    }
    let docs = docs.into_iter().map(|(id, data)| Document { id, data });
    Ok(WebOfLinkedData::new(docs, adoc)?)
}

pub fn serialize_web(w: &WebOfLinkedData) -> String {
    let mut out = String::new();
    for d in w.docs() {
        let _ = writeln!(out, "#doc {}", d.id);
        for t in &d.data {
            let _ = writeln!(out, "{t}");
        }
    }
    out.push_str("#adoc\n");
    for (u, d) in w.adoc_map() {
        let _ = writeln!(out, "{u} {d}");
    }
    out
}

/// Parses an N-Triples document; blank nodes are scoped to `scope`.
pub fn parse_ntriples(text: &str, scope: &DocId) -> Result<Graph, FixtureError> {
    let mut g = Graph::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(t) = parse_ntriples_line(line, scope).map_err(|message| FixtureError::Syntax { line: i + 1, message })? {
            g.insert(t);
        }
    }
    Ok(g)
}

/// Parses one N-Triples-style statement; blank nodes are scoped to `scope`.
fn parse_ntriples_line(line: &str, scope: &DocId) -> Result<Option<RdfTriple>, String> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let mut cur = Cursor { s: line, pos: 0 };
    parse_triple(&mut cur, scope).map(Some)
}

fn parse_triple(cur: &mut Cursor<'_>, scope: &DocId) -> Result<RdfTriple, String> {
    let s = cur.term(scope)?;
    let p = match cur.term(scope)? {
        RdfTerm::Uri(u) => u,
        other => return Err(format!("predicate must be a URI, found {other}")),
    };
    let o = cur.term(scope)?;
    cur.skip_ws();
    if !cur.eat('.') {
        return Err("expected '.' after object".into());
    }
    cur.skip_ws();
    if !cur.rest().is_empty() && !cur.rest().starts_with('#') {
        return Err(format!("trailing content {:?}", cur.rest()));
    }
    RdfTriple::new(s, p, o).ok_or_else(|| "literal in subject position".to_string())
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn eat(&mut self, c: char) -> bool {
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn iri(&mut self) -> Result<Uri, String> {
        self.skip_ws();
        if !self.eat('<') {
            return Err(format!("expected '<' at {:?}", self.rest()));
        }
        let r = self.rest();
        let end = r.find('>').ok_or("unterminated IRI")?;
        let body = &r[..end];
        if body.is_empty() || body.contains(char::is_whitespace) {
            return Err(format!("bad IRI <{body}>"));
        }
        self.pos += end + 1;
        Ok(Uri::new(body))
    }

    fn term(&mut self, scope: &DocId) -> Result<RdfTerm, String> {
        self.skip_ws();
        let r = self.rest();
        if r.starts_with('<') {
            return self.iri().map(RdfTerm::Uri);
        }
        if let Some(after) = r.strip_prefix("_:") {
            let len = after.find(|c: char| c.is_whitespace()).unwrap_or(after.len());
            let label = &after[..len];
            if label.is_empty() {
                return Err("empty blank node label".into());
            }
            self.pos += 2 + len;
            return Ok(RdfTerm::Blank(BlankNode { label: label.into(), scope: scope.clone() }));
        }
        if r.starts_with('"') {
            self.pos += 1;
            let mut lex = String::new();
            let mut chars = self.rest().char_indices();
            while let Some((i, c)) = chars.next() {
                match c {
                    '"' => {
                        self.pos += i + 1;
                        return Ok(RdfTerm::Literal(Literal::new(lex)));
                    }
                    '\\' => match chars.next() {
                        Some((_, 'n')) => lex.push('\n'),
                        Some((_, 'r')) => lex.push('\r'),
                        Some((_, 't')) => lex.push('\t'),
                        Some((_, '"')) => lex.push('"'),
                        Some((_, '\\')) => lex.push('\\'),
                        other => return Err(format!("bad escape {other:?}")),
                    },
                    c => lex.push(c),
                }
            }
            return Err("unterminated literal".into());
        }
        Err(format!("expected a term at {r:?}"))
    }
}
