//! RDF terms, documents, and Webs of Linked Data.
//!
//! A [`WebOfLinkedData`] is a finite set of documents together with a partial,
//! surjective map `adoc` from URIs to documents. Everything downstream (the
//! link graph, link-pattern matching, dataset construction) is defined here.

mod fixture;

pub use fixture::{load_web, parse_ntriples, parse_web, serialize_web, FixtureError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// A URI. Compared by exact string equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uri(Arc<str>);

impl Uri {
    /// Panics on an empty string; URIs are never empty.
    pub fn new(s: impl AsRef<str>) -> Self {
        let s = s.as_ref();
        assert!(!s.is_empty(), "empty URI");
        Uri(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Uri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Debug for Uri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Opaque document identifier chosen by whoever built the web.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DocId(Arc<str>);

impl DocId {
    pub fn new(s: impl AsRef<str>) -> Self {
        DocId(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "doc:{}", self.0)
    }
}

/// A blank node. Its scope is the single document it occurs in.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BlankNode {
    pub label: Arc<str>,
    pub scope: DocId,
}

/// A plain literal; equality is lexical.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(Arc<str>);

impl Literal {
    pub fn new(s: impl AsRef<str>) -> Self {
        Literal(Arc::from(s.as_ref()))
    }

    pub fn lexical(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        for c in self.0.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                '\t' => f.write_str("\\t")?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("\"")
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RdfTerm {
    Uri(Uri),
    Blank(BlankNode),
    Literal(Literal),
}

impl RdfTerm {
    pub fn uri(s: impl AsRef<str>) -> Self {
        RdfTerm::Uri(Uri::new(s))
    }

    pub fn literal(s: impl AsRef<str>) -> Self {
        RdfTerm::Literal(Literal::new(s))
    }

    pub fn as_uri(&self) -> Option<&Uri> {
        match self {
            RdfTerm::Uri(u) => Some(u),
            _ => None,
        }
    }
}

impl From<Uri> for RdfTerm {
    fn from(u: Uri) -> Self {
        RdfTerm::Uri(u)
    }
}

impl From<Literal> for RdfTerm {
    fn from(l: Literal) -> Self {
        RdfTerm::Literal(l)
    }
}

impl fmt::Display for RdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdfTerm::Uri(u) => write!(f, "{u}"),
            RdfTerm::Blank(b) => write!(f, "_:{}", b.label),
            RdfTerm::Literal(l) => write!(f, "{l}"),
        }
    }
}

impl fmt::Debug for RdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An RDF triple: subject is never a literal, predicate is always a URI.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RdfTriple {
    s: RdfTerm,
    p: Uri,
    o: RdfTerm,
}

impl RdfTriple {
    /// `None` if the subject is a literal.
    pub fn new(s: RdfTerm, p: Uri, o: RdfTerm) -> Option<Self> {
        if matches!(s, RdfTerm::Literal(_)) {
            return None;
        }
        Some(RdfTriple { s, p, o })
    }

    /// Shorthand for an all-URI triple.
    pub fn uris(s: &str, p: &str, o: &str) -> Self {
        RdfTriple { s: RdfTerm::uri(s), p: Uri::new(p), o: RdfTerm::uri(o) }
    }

    pub fn subject(&self) -> &RdfTerm {
        &self.s
    }

    pub fn predicate(&self) -> &Uri {
        &self.p
    }

    pub fn object(&self) -> &RdfTerm {
        &self.o
    }

    /// The three positions as terms, in order.
    pub fn positions(&self) -> [RdfTerm; 3] {
        [self.s.clone(), RdfTerm::Uri(self.p.clone()), self.o.clone()]
    }
}

impl fmt::Display for RdfTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.s, self.p, self.o)
    }
}

impl fmt::Debug for RdfTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?}, {:?})", self.s, self.p, self.o)
    }
}

/// Every URI in any position, deduplicated.
pub fn uris_of(t: &RdfTriple) -> BTreeSet<Uri> {
    t.positions().iter().filter_map(|x| x.as_uri().cloned()).collect()
}

pub type Graph = BTreeSet<RdfTriple>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Document {
    pub id: DocId,
    pub data: Graph,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WebError {
    #[error("adoc maps {uri} to unknown document {doc}")]
    UnknownDocument { uri: Uri, doc: DocId },
    #[error("document {0} is not the image of any URI")]
    Unreachable(DocId),
    #[error("blank node _:{label} in document {doc} is scoped to {scope}")]
    ForeignBlankNode { label: String, doc: DocId, scope: DocId },
    #[error("document {doc} is registered under id {key}")]
    IdMismatch { key: DocId, doc: DocId },
}

/// A Web of Linked Data: finite documents plus a surjective partial `adoc`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WebOfLinkedData {
    docs: BTreeMap<DocId, Document>,
    adoc: BTreeMap<Uri, DocId>,
}

impl WebOfLinkedData {
    pub fn new(docs: impl IntoIterator<Item = Document>, adoc: BTreeMap<Uri, DocId>) -> Result<Self, WebError> {
        let docs: BTreeMap<DocId, Document> = docs.into_iter().map(|d| (d.id.clone(), d)).collect();
        for (u, d) in &adoc {
            if !docs.contains_key(d) {
                return Err(WebError::UnknownDocument { uri: u.clone(), doc: d.clone() });
            }
        }
        let images: BTreeSet<&DocId> = adoc.values().collect();
        for (id, doc) in &docs {
            if &doc.id != id {
                return Err(WebError::IdMismatch { key: id.clone(), doc: doc.id.clone() });
            }
            if !images.contains(id) {
                return Err(WebError::Unreachable(id.clone()));
            }
            for t in &doc.data {
                for x in [&t.s, &t.o] {
                    if let RdfTerm::Blank(b) = x {
                        if &b.scope != id {
                            return Err(WebError::ForeignBlankNode {
                                label: b.label.to_string(),
                                doc: id.clone(),
                                scope: b.scope.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(WebOfLinkedData { docs, adoc })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn docs(&self) -> impl Iterator<Item = &Document> {
        self.docs.values()
    }

    pub fn doc(&self, id: &DocId) -> Option<&Document> {
        self.docs.get(id)
    }

    pub fn adoc(&self, u: &Uri) -> Option<&Document> {
        self.adoc.get(u).map(|d| &self.docs[d])
    }

    pub fn adoc_map(&self) -> &BTreeMap<Uri, DocId> {
        &self.adoc
    }

    pub fn in_dom(&self, u: &Uri) -> bool {
        self.adoc.contains_key(u)
    }

    pub fn dom(&self) -> impl Iterator<Item = &Uri> {
        self.adoc.keys()
    }

    /// `data(adoc(u))`, empty when `u` is outside `dom(adoc)`.
    pub fn data_of(&self, u: &Uri) -> Option<&Graph> {
        self.adoc(u).map(|d| &d.data)
    }

    /// All terms occurring in any triple of any document.
    pub fn terms(&self) -> BTreeSet<RdfTerm> {
        self.docs.values().flat_map(|d| d.data.iter().flat_map(|t| t.positions())).collect()
    }

    /// URIs in `dom(adoc)` or in any triple.
    pub fn mentioned_uris(&self) -> BTreeSet<Uri> {
        let mut out: BTreeSet<Uri> = self.adoc.keys().cloned().collect();
        for d in self.docs.values() {
            for t in &d.data {
                out.extend(uris_of(t));
            }
        }
        out
    }
}

/// An edge of the link graph: `triple` in `src` mentions `via`, and `adoc(via) = tgt`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinkGraphEdge {
    pub src: DocId,
    pub triple: RdfTriple,
    pub via: Uri,
    pub tgt: DocId,
}

pub fn link_graph(w: &WebOfLinkedData) -> BTreeSet<LinkGraphEdge> {
    let mut out = BTreeSet::new();
    for d in w.docs() {
        for t in &d.data {
            for u in uris_of(t) {
                if let Some(tgt) = w.adoc_map().get(&u) {
                    out.insert(LinkGraphEdge { src: d.id.clone(), triple: t.clone(), via: u, tgt: tgt.clone() });
                }
            }
        }
    }
    out
}

/// One position of a link pattern.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LinkTerm {
    /// `+`, stands for the context URI.
    Context,
    /// `_`, matches anything and marks a traversal direction.
    Wildcard,
    Uri(Uri),
    /// Only legal in object position.
    Literal(Literal),
}

impl fmt::Display for LinkTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkTerm::Context => f.write_str("+"),
            LinkTerm::Wildcard => f.write_str("_"),
            LinkTerm::Uri(u) => write!(f, "{u}"),
            LinkTerm::Literal(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinkPattern {
    s: LinkTerm,
    p: LinkTerm,
    o: LinkTerm,
}

impl LinkPattern {
    /// `None` if a literal appears in subject or predicate position.
    pub fn new(s: LinkTerm, p: LinkTerm, o: LinkTerm) -> Option<Self> {
        if matches!(s, LinkTerm::Literal(_)) || matches!(p, LinkTerm::Literal(_)) {
            return None;
        }
        Some(LinkPattern { s, p, o })
    }

    pub fn positions(&self) -> [&LinkTerm; 3] {
        [&self.s, &self.p, &self.o]
    }

    pub fn has_wildcard(&self) -> bool {
        self.positions().iter().any(|t| matches!(t, LinkTerm::Wildcard))
    }
}

impl fmt::Display for LinkPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} {} {}}}", self.s, self.p, self.o)
    }
}

fn link_term_admits(y: &LinkTerm, x: &RdfTerm, ctx: &Uri) -> bool {
    match y {
        LinkTerm::Wildcard => true,
        LinkTerm::Context => x.as_uri() == Some(ctx),
        LinkTerm::Uri(u) => x.as_uri() == Some(u),
        LinkTerm::Literal(l) => matches!(x, RdfTerm::Literal(m) if m == l),
    }
}

/// Whether the edge label `(t, via)` matches `lp` under context `ctx`.
pub fn matches(label: (&RdfTriple, &Uri), lp: &LinkPattern, ctx: &Uri) -> bool {
    let (t, via) = label;
    let xs = t.positions();
    let ys = lp.positions();
    let selects = (0..3).any(|i| matches!(ys[i], LinkTerm::Wildcard) && xs[i].as_uri() == Some(via));
    selects && (0..3).all(|i| link_term_admits(ys[i], &xs[i], ctx))
}

/// An RDF dataset: a default graph plus URI-named graphs.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RdfDataset {
    pub default: Graph,
    pub named: BTreeMap<Uri, Graph>,
}

/// `dataset_W(U)`: default graph is the union of `data(adoc(u))`, one named graph per `u`.
pub fn build_dataset<'a>(w: &WebOfLinkedData, u_set: impl IntoIterator<Item = &'a Uri>) -> RdfDataset {
    let mut ds = RdfDataset::default();
    for u in u_set {
        if let Some(g) = w.data_of(u) {
            ds.default.extend(g.iter().cloned());
            ds.named.insert(u.clone(), g.clone());
        }
    }
    ds
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, p: &str, o: &str) -> RdfTriple {
        RdfTriple::uris(s, p, o)
    }

    #[test]
    fn uris_of_collapses_duplicates_and_skips_non_uris() {
        assert_eq!(uris_of(&t("uA", "p2", "uA")).len(), 2);
        let b = RdfTerm::Blank(BlankNode { label: "b1".into(), scope: DocId::new("d") });
        let tr = RdfTriple::new(b, Uri::new("p1"), RdfTerm::literal("lit")).unwrap();
        assert_eq!(uris_of(&tr), BTreeSet::from([Uri::new("p1")]));
    }

    #[test]
    fn literal_subject_is_rejected() {
        assert!(RdfTriple::new(RdfTerm::literal("x"), Uri::new("p"), RdfTerm::uri("o")).is_none());
    }

    #[test]
    fn pattern_without_wildcard_matches_nothing() {
        let lp = LinkPattern::new(LinkTerm::Context, LinkTerm::Uri(Uri::new("p1")), LinkTerm::Uri(Uri::new("uB"))).unwrap();
        let tr = t("uA", "p1", "uB");
        for via in ["uA", "p1", "uB"] {
            assert!(!matches((&tr, &Uri::new(via)), &lp, &Uri::new("uA")));
        }
    }

    #[test]
    fn web_rejects_unreachable_document() {
        let d = Document { id: DocId::new("d"), data: Graph::new() };
        assert_eq!(WebOfLinkedData::new([d], BTreeMap::new()), Err(WebError::Unreachable(DocId::new("d"))));
    }
}
