//! Denotational evaluation of LDQL over a fully materialized Web.
//!
//! `SEED ?v q` unions over every URI. URIs are split into a finite relevant
//! set `R` (adoc's domain, URIs in the Web's triples, URIs in the query, seeds)
//! and the rest. Every `u` outside `R` is outside `dom(adoc)` and unknown to the
//! query, so it evaluates `q` exactly like the empty seed set. The whole
//! complement is then represented by a single placeholder value `Fresh(k)`,
//! which stands for any URI outside `R`.
//!
//! Placeholders are local to one mapping. Two placeholders may denote the same
//! URI. A placeholder never equals a term. A result that still holds a
//! placeholder at the top level is infinite, and evaluation refuses it.

use crate::lang::{LdqlQuery, Lpe};
use crate::rdf::{build_dataset, LinkTerm, RdfTerm, Uri, WebOfLinkedData};
use crate::sparql::{eval_pattern, SolutionMapping, SolutionSet, Variable};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonEnumerableResult {
    /// A variable bound to infinitely many URIs; `None` for an LPE result.
    pub var: Option<Variable>,
}

impl fmt::Display for NonEnumerableResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.var {
            Some(v) => write!(f, "result is not finitely enumerable: {v} ranges over infinitely many URIs"),
            None => f.write_str("result is not finitely enumerable: the LPE selects infinitely many URIs"),
        }
    }
}

impl std::error::Error for NonEnumerableResult {}

pub fn eval_query(q: &LdqlQuery, w: &WebOfLinkedData, seeds: &BTreeSet<Uri>) -> Result<SolutionSet, NonEnumerableResult> {
    let mut relevant = q.uris();
    relevant.extend(seeds.iter().cloned());
    let mut ev = Evaluator::new(w, relevant);
    let out = ev.query(q, seeds);
    concretize(&out)
}

pub fn eval_lpe(l: &Lpe, w: &WebOfLinkedData, ctx: &Uri) -> Result<BTreeSet<Uri>, NonEnumerableResult> {
    let mut relevant = BTreeSet::new();
    l.collect_uris(&mut relevant);
    relevant.insert(ctx.clone());
    let mut ev = Evaluator::new(w, relevant);
    let (set, fresh) = ev.lpe(l, ctx);
    if fresh {
        return Err(NonEnumerableResult { var: None });
    }
    Ok(set)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
enum SymValue {
    Term(RdfTerm),
    Fresh(u32),
}

type SymMapping = BTreeMap<Variable, SymValue>;
type SymSet = BTreeSet<SymMapping>;

fn max_fresh(m: &SymMapping) -> Option<u32> {
    m.values().filter_map(|v| if let SymValue::Fresh(k) = v { Some(*k) } else { None }).max()
}

/// Renumbers placeholders in order of first occurrence.
fn canonical(m: SymMapping) -> SymMapping {
    let mut ren: HashMap<u32, u32> = HashMap::new();
    m.into_iter()
        .map(|(k, v)| match v {
            SymValue::Fresh(i) => {
                let n = ren.len() as u32;
                (k, SymValue::Fresh(*ren.entry(i).or_insert(n)))
            }
            t => (k, t),
        })
        .collect()
}

fn find(uf: &mut HashMap<u32, u32>, x: u32) -> u32 {
    let p = *uf.get(&x).unwrap_or(&x);
    if p == x {
        return x;
    }
    let r = find(uf, p);
    uf.insert(x, r);
    r
}

fn merge(a: &SymMapping, b: &SymMapping) -> Option<SymMapping> {
    let shift = max_fresh(a).map_or(0, |k| k + 1);
    let b: SymMapping = b
        .iter()
        .map(|(k, v)| match v {
            SymValue::Fresh(i) => (k.clone(), SymValue::Fresh(i + shift)),
            t => (k.clone(), t.clone()),
        })
        .collect();
    let mut uf: HashMap<u32, u32> = HashMap::new();
    let mut out = a.clone();
    for (k, vb) in b {
        match out.get(&k) {
            None => {
                out.insert(k, vb);
            }
            Some(va) => match (va, &vb) {
                (SymValue::Term(x), SymValue::Term(y)) if x != y => return None,
                (SymValue::Term(_), SymValue::Term(_)) => {}
                (SymValue::Fresh(x), SymValue::Fresh(y)) => {
                    let (rx, ry) = (find(&mut uf, *x), find(&mut uf, *y));
                    if rx != ry {
                        uf.insert(rx.max(ry), rx.min(ry));
                    }
                }
                _ => return None,
            },
        }
    }
    let out = out
        .into_iter()
        .map(|(k, v)| match v {
            SymValue::Fresh(i) => (k, SymValue::Fresh(find(&mut uf, i))),
            t => (k, t),
        })
        .collect();
    Some(canonical(out))
}

fn sym_join(a: &SymSet, b: &SymSet) -> SymSet {
    let mut out = SymSet::new();
    for x in a {
        for y in b {
            if let Some(m) = merge(x, y) {
                out.insert(m);
            }
        }
    }
    out
}

fn lift(s: SolutionSet) -> SymSet {
    s.into_iter().map(|m| m.iter().map(|(k, v)| (k.clone(), SymValue::Term(v.clone()))).collect()).collect()
}

fn concretize(s: &SymSet) -> Result<SolutionSet, NonEnumerableResult> {
    let mut out = SolutionSet::new();
    for m in s {
        let mut c = SolutionMapping::new();
        for (k, v) in m {
            match v {
                SymValue::Term(t) => {
                    c.insert(k.clone(), t.clone());
                }
                SymValue::Fresh(_) => return Err(NonEnumerableResult { var: Some(k.clone()) }),
            }
        }
        out.insert(c);
    }
    Ok(out)
}

/// True when some basic subquery is reachable without passing a SEED.
fn depends_on_seeds(q: &LdqlQuery) -> bool {
    match q {
        LdqlQuery::Basic(..) => true,
        LdqlQuery::And(a, b) | LdqlQuery::Union(a, b) => depends_on_seeds(a) || depends_on_seeds(b),
        LdqlQuery::Project(_, q) => depends_on_seeds(q),
        LdqlQuery::SeedUris(..) | LdqlQuery::SeedVar(..) => false,
    }
}

struct Evaluator<'a> {
    w: &'a WebOfLinkedData,
    /// URIs of `R` inside `dom(adoc)`.
    relevant_dom: Vec<Uri>,
    /// URIs of `R` outside `dom(adoc)`.
    relevant_rest: Vec<Uri>,
    qmemo: HashMap<(usize, BTreeSet<Uri>), SymSet>,
    lmemo: HashMap<(usize, Uri), (BTreeSet<Uri>, bool)>,
}

impl<'a> Evaluator<'a> {
    fn new(w: &'a WebOfLinkedData, extra: BTreeSet<Uri>) -> Self {
        let mut r = w.mentioned_uris();
        r.extend(extra);
        let (relevant_dom, relevant_rest) = r.into_iter().partition(|u| w.in_dom(u));
        Evaluator { w, relevant_dom, relevant_rest, qmemo: HashMap::new(), lmemo: HashMap::new() }
    }

    fn query(&mut self, q: &LdqlQuery, seeds: &BTreeSet<Uri>) -> SymSet {
        // Only seeds inside dom(adoc) are observable.
        let key_seeds: BTreeSet<Uri> =
            if depends_on_seeds(q) { seeds.iter().filter(|u| self.w.in_dom(u)).cloned().collect() } else { BTreeSet::new() };
        let key = (q as *const LdqlQuery as usize, key_seeds);
        if let Some(r) = self.qmemo.get(&key) {
            return r.clone();
        }
        let out = self.query_uncached(q, &key.1);
        self.qmemo.insert(key, out.clone());
        out
    }

    fn query_uncached(&mut self, q: &LdqlQuery, seeds: &BTreeSet<Uri>) -> SymSet {
        match q {
            LdqlQuery::Basic(l, p) => {
                let mut targets = BTreeSet::new();
                for u in seeds {
                    targets.extend(self.lpe(l, u).0);
                }
                let ds = build_dataset(self.w, &targets);
                lift(eval_pattern(p, &ds.default, &ds))
            }
            LdqlQuery::SeedUris(us, inner) => self.query(inner, us),
            LdqlQuery::And(a, b) => {
                let x = self.query(a, seeds);
                let y = self.query(b, seeds);
                sym_join(&x, &y)
            }
            LdqlQuery::Union(a, b) => {
                let mut x = self.query(a, seeds);
                x.extend(self.query(b, seeds));
                x
            }
            LdqlQuery::Project(vs, inner) => self
                .query(inner, seeds)
                .into_iter()
                .map(|m| canonical(m.into_iter().filter(|(k, _)| vs.contains(k)).collect()))
                .collect(),
            LdqlQuery::SeedVar(v, inner) => {
                let mut out = SymSet::new();
                for u in self.relevant_dom.clone() {
                    let r = self.query(inner, &BTreeSet::from([u.clone()]));
                    out.extend(bind_seed(&r, v, &u));
                }
                let base = self.query(inner, &BTreeSet::new());
                for u in &self.relevant_rest {
                    out.extend(bind_seed(&base, v, u));
                }
                for m in base {
                    match m.get(v) {
                        None => {
                            let k = max_fresh(&m).map_or(0, |k| k + 1);
                            let mut m = m;
                            m.insert(v.clone(), SymValue::Fresh(k));
                            out.insert(canonical(m));
                        }
                        Some(SymValue::Fresh(_)) => {
                            out.insert(m);
                        }
                        Some(SymValue::Term(_)) => {}
                    }
                }
                out
            }
        }
    }

    /// Concrete URIs selected from `ctx`, and whether any URI outside `R` is also selected.
    fn lpe(&mut self, l: &Lpe, ctx: &Uri) -> (BTreeSet<Uri>, bool) {
        if !self.w.in_dom(ctx) {
            return (BTreeSet::new(), false);
        }
        let key = (l as *const Lpe as usize, ctx.clone());
        if let Some(r) = self.lmemo.get(&key) {
            return r.clone();
        }
        let out = self.lpe_uncached(l, ctx);
        self.lmemo.insert(key, out.clone());
        out
    }

    fn lpe_uncached(&mut self, l: &Lpe, ctx: &Uri) -> (BTreeSet<Uri>, bool) {
        match l {
            Lpe::Epsilon => (BTreeSet::from([ctx.clone()]), false),
            Lpe::Pattern(lp) => {
                let ys = lp.positions();
                let mut out = BTreeSet::new();
                let data = self.w.data_of(ctx).expect("ctx in dom");
                for t in data {
                    let xs = t.positions();
                    let admits = (0..3).all(|i| match ys[i] {
                        LinkTerm::Wildcard => true,
                        LinkTerm::Context => xs[i].as_uri() == Some(ctx),
                        LinkTerm::Uri(u) => xs[i].as_uri() == Some(u),
                        LinkTerm::Literal(x) => matches!(&xs[i], RdfTerm::Literal(y) if y == x),
                    });
                    if !admits {
                        continue;
                    }
                    for i in 0..3 {
                        if let (LinkTerm::Wildcard, Some(u)) = (ys[i], xs[i].as_uri()) {
                            if self.w.in_dom(u) {
                                out.insert(u.clone());
                            }
                        }
                    }
                }
                (out, false)
            }
            Lpe::Concat(a, b) => {
                let (mids, _) = self.lpe(a, ctx);
                let mut out = BTreeSet::new();
                let mut fresh = false;
                for m in mids {
                    let (s, f) = self.lpe(b, &m);
                    out.extend(s);
                    fresh |= f;
                }
                (out, fresh)
            }
            Lpe::Alt(a, b) => {
                let (mut s, f) = self.lpe(a, ctx);
                let (t, g) = self.lpe(b, ctx);
                s.extend(t);
                (s, f || g)
            }
            Lpe::Star(a) => {
                let mut seen = BTreeSet::from([ctx.clone()]);
                let mut queue = VecDeque::from([ctx.clone()]);
                let mut fresh = false;
                while let Some(x) = queue.pop_front() {
                    let (s, f) = self.lpe(a, &x);
                    fresh |= f;
                    for y in s {
                        if seen.insert(y.clone()) {
                            queue.push_back(y);
                        }
                    }
                }
                (seen, fresh)
            }
            Lpe::Test(a) => {
                let (s, f) = self.lpe(a, ctx);
                if s.is_empty() && !f {
                    (BTreeSet::new(), false)
                } else {
                    (BTreeSet::from([ctx.clone()]), false)
                }
            }
            Lpe::NavSub(v, q) => {
                let r = self.query(q, &BTreeSet::from([ctx.clone()]));
                let mut out = BTreeSet::new();
                let mut fresh = false;
                for m in &r {
                    match m.get(v) {
                        Some(SymValue::Term(RdfTerm::Uri(u))) => {
                            out.insert(u.clone());
                        }
                        Some(SymValue::Fresh(_)) => fresh = true,
                        _ => {}
                    }
                }
                (out, fresh)
            }
        }
    }
}

fn bind_seed<'r>(r: &'r SymSet, v: &Variable, u: &Uri) -> impl Iterator<Item = SymMapping> + 'r {
    let t = SymValue::Term(RdfTerm::Uri(u.clone()));
    let v = v.clone();
    r.iter().filter_map(move |m| match m.get(&v) {
        None => {
            let mut m = m.clone();
            m.insert(v.clone(), t.clone());
            Some(m)
        }
        Some(x) if *x == t => Some(m.clone()),
        Some(_) => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_lpe, parse_query};
    use crate::rdf::parse_web;

    fn wex() -> WebOfLinkedData {
        parse_web(include_str!("../fixtures/wex.ldw")).unwrap()
    }

    fn seeds(us: &[&str]) -> BTreeSet<Uri> {
        us.iter().map(Uri::new).collect()
    }

    fn m(pairs: &[(&str, &str)]) -> SolutionMapping {
        pairs.iter().map(|(k, v)| (Variable::new(k), RdfTerm::uri(v))).collect()
    }

    fn eval(q: &str, s: &[&str]) -> Result<SolutionSet, NonEnumerableResult> {
        eval_query(&parse_query(q).unwrap(), &wex(), &seeds(s))
    }

    const LPE_EX: &str = "{_ <p1> _}* / [ {_ <p2> _} ]";

    #[test]
    fn running_example_lpe() {
        let got = eval_lpe(&parse_lpe(LPE_EX).unwrap(), &wex(), &Uri::new("uA")).unwrap();
        assert_eq!(got, seeds(&["uA", "uC"]));
        let got = eval_lpe(&parse_lpe("{+ <p1> _}").unwrap(), &wex(), &Uri::new("uA")).unwrap();
        assert_eq!(got, seeds(&["uB"]));
    }

    #[test]
    fn context_outside_dom_selects_nothing() {
        for l in ["eps", "eps*", LPE_EX] {
            assert!(eval_lpe(&parse_lpe(l).unwrap(), &wex(), &Uri::new("p2")).unwrap().is_empty());
        }
    }

    #[test]
    fn running_example_queries() {
        let q1 = format!("<< {LPE_EX} , {{ ?x <p1> ?y . ?x <p2> ?z }} >>");
        assert_eq!(eval(&q1, &["uA"]).unwrap(), [m(&[("x", "uA"), ("y", "uB"), ("z", "uC")])].into_iter().collect());
        let q = "SEED ?x << eps , { ?x <p1> ?w } >>";
        let want: SolutionSet = [m(&[("x", "uA"), ("w", "uB")]), m(&[("x", "uB"), ("w", "uC")])].into_iter().collect();
        assert_eq!(eval(q, &["uA"]).unwrap(), want);
        let both = format!("({q} AND {q1})");
        let want: SolutionSet = [m(&[("x", "uA"), ("w", "uB"), ("y", "uB"), ("z", "uC")])].into_iter().collect();
        assert_eq!(eval(&both, &["uA"]).unwrap(), want);
    }

    #[test]
    fn unbounded_seed_variable_is_refused() {
        let e = eval("SEED ?x SEED { <uA> } << eps , { } >>", &[]).unwrap_err();
        assert_eq!(e.var, Some(Variable::new("x")));
    }

    #[test]
    fn placeholders_vanish_under_projection_and_join() {
        let q = "PROJECT { ?w } (SEED ?x SEED { <uA> } << eps , { <uA> <p1> ?w } >>)";
        assert_eq!(eval(q, &[]).unwrap(), [m(&[("w", "uB")])].into_iter().collect());
        let any = "SEED ?x SEED { <uA> } << eps , { } >>";
        let q = format!("({any} AND << eps , {{ ?x <p1> ?w }} >>)");
        assert_eq!(eval(&q, &["uA"]).unwrap(), [m(&[("x", "uA"), ("w", "uB")])].into_iter().collect());
        let q = format!("PROJECT {{ }} (({any} AND {any}))");
        assert_eq!(eval(&q, &[]).unwrap(), SolutionSet::unit());
    }

    #[test]
    fn seed_variable_ranges_over_uris_outside_dom() {
        // p2 is mentioned but has no document; the inner query ignores its seeds.
        let q = "SEED ?x SEED { <uA> } << eps , { <uB> ?x ?o } >>";
        assert_eq!(eval(q, &[]).unwrap(), [m(&[("x", "p2"), ("o", "uC")])].into_iter().collect());
    }

    #[test]
    fn navigation_to_unbounded_results_is_refused() {
        let l = parse_lpe("(?v : SEED ?v SEED { <uA> } << eps , { } >>)").unwrap();
        assert_eq!(eval_lpe(&l, &wex(), &Uri::new("uA")), Err(NonEnumerableResult { var: None }));
        // A test only asks for nonemptiness.
        let l = parse_lpe("[ (?v : SEED ?v SEED { <uA> } << eps , { } >>) ]").unwrap();
        assert_eq!(eval_lpe(&l, &wex(), &Uri::new("uA")).unwrap(), seeds(&["uA"]));
    }
}
