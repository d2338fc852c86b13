//! Lookup-driven execution of certified queries.
//!
//! Documents are only ever obtained through a [`LookupService`]. Basic queries
//! collect the URIs selected by their LPE and evaluate the pattern over the
//! retrieved documents. A UNION-free conjunction runs its operands in
//! certificate order and joins as it goes. `SEED ?v q` is run once per URI
//! that earlier operands bound to `?v`.

mod backend;

pub use backend::{
    ChaosBackend, FixtureBackend, HttpBackend, LookupBackend, LookupService, LookupStats, DEFAULT_HTTP_TIMEOUT,
};

use crate::lang::{and_atoms, union_branches, LdqlQuery, Lpe, NormalFormError};
use crate::rdf::{LinkTerm, RdfDataset, RdfTerm, Uri};
use crate::safeness::{
    is_websafe_syntactic, validate_certificate, validate_conjunct, ConjunctCertificate, Justification, SafenessCertificate,
    SafenessReport, SubqueryCertificate,
};
use crate::sparql::{eval_pattern, join, GraphPattern, SolutionMapping, SolutionSet};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error("query is not certified Web-safe; refusing to execute\n{}", .0.to_text())]
    NotCertified(Box<SafenessReport>),
    #[error(transparent)]
    Guard(#[from] NormalFormError),
    #[error("certificate does not match the query")]
    CertificateMismatch,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub basic: usize,
    pub lpe: usize,
    pub conjunct: usize,
    pub seed_runs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    /// Every URI the lookup service has dereferenced so far.
    pub attempted: BTreeSet<Uri>,
    pub successes: usize,
    pub failures: usize,
    pub elapsed: Duration,
    pub steps: StepCounts,
}

impl ExecutionTrace {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lookups: {} attempted, {} retrieved, {} not retrievable", self.attempted.len(), self.successes, self.failures);
        for u in &self.attempted {
            let _ = writeln!(out, "  {u}");
        }
        let s = &self.steps;
        let _ = writeln!(
            out,
            "steps: basic={} lpe={} conjunct={} seed_runs={}",
            s.basic, s.lpe, s.conjunct, s.seed_runs
        );
        let _ = writeln!(out, "elapsed: {:.3} ms", self.elapsed.as_secs_f64() * 1000.0);
        out
    }
}

fn certificate_for(q: &LdqlQuery) -> Result<SafenessCertificate, ExecError> {
    let report = is_websafe_syntactic(q)?;
    match report.certificate {
        Some(c) => Ok(c),
        None => Err(ExecError::NotCertified(Box::new(report))),
    }
}

/// Certifies `q`, then executes it. Uncertified queries are refused.
pub fn exec_query(q: &LdqlQuery, seeds: &BTreeSet<Uri>, lk: &LookupService) -> Result<SolutionSet, ExecError> {
    exec_query_traced(q, seeds, lk).map(|(s, _)| s)
}

pub fn exec_query_traced(
    q: &LdqlQuery,
    seeds: &BTreeSet<Uri>,
    lk: &LookupService,
) -> Result<(SolutionSet, ExecutionTrace), ExecError> {
    let cert = certificate_for(q)?;
    Ok(traced(lk, |run| run.certified(&cert, seeds)))
}

/// Executes with a caller-supplied certificate after re-validating it.
pub fn exec_with_certificate(
    q: &LdqlQuery,
    cert: &SafenessCertificate,
    seeds: &BTreeSet<Uri>,
    lk: &LookupService,
) -> Result<SolutionSet, ExecError> {
    if !validate_certificate(q, cert) {
        return Err(ExecError::CertificateMismatch);
    }
    Ok(Run::new(lk).certified(cert, seeds))
}

/// Runs a UNION-free conjunction in the order of `cc`.
pub fn exec_union_free(
    c: &LdqlQuery,
    cc: &ConjunctCertificate,
    seeds: &BTreeSet<Uri>,
    lk: &LookupService,
) -> Result<SolutionSet, ExecError> {
    if !validate_conjunct(c, cc) {
        return Err(ExecError::CertificateMismatch);
    }
    Ok(Run::new(lk).conjunct(c, cc, seeds))
}

pub fn exec_basic(l: &Lpe, p: &GraphPattern, seeds: &BTreeSet<Uri>, lk: &LookupService) -> Result<SolutionSet, ExecError> {
    let navsubs = navsub_certificates(l)?;
    Ok(Run::new(lk).basic(l, p, &navsubs, seeds))
}

pub fn exec_lpe(l: &Lpe, ctx: &Uri, lk: &LookupService) -> Result<BTreeSet<Uri>, ExecError> {
    let navsubs = navsub_certificates(l)?;
    let certs = cert_index(l, &navsubs);
    Ok(Run::new(lk).lpe(l, ctx, &certs))
}

fn navsub_certificates(l: &Lpe) -> Result<Vec<SafenessCertificate>, ExecError> {
    l.subqueries().into_iter().map(certificate_for).collect()
}

type CertIndex<'c> = HashMap<usize, &'c SafenessCertificate>;

fn cert_index<'c>(l: &Lpe, navsubs: &'c [SafenessCertificate]) -> CertIndex<'c> {
    l.subqueries().into_iter().zip(navsubs).map(|(q, c)| (q as *const LdqlQuery as usize, c)).collect()
}

fn traced<T>(lk: &LookupService, f: impl FnOnce(&mut Run<'_>) -> T) -> (T, ExecutionTrace) {
    let start = Instant::now();
    let mut run = Run::new(lk);
    let out = f(&mut run);
    let stats = lk.stats();
    let trace = ExecutionTrace {
        attempted: lk.attempted(),
        successes: stats.successes,
        failures: stats.failures(),
        elapsed: start.elapsed(),
        steps: run.steps,
    };
    (out, trace)
}

struct Run<'s> {
    lk: &'s LookupService,
    steps: StepCounts,
}

impl<'s> Run<'s> {
    fn new(lk: &'s LookupService) -> Self {
        Run { lk, steps: StepCounts::default() }
    }

    fn certified(&mut self, cert: &SafenessCertificate, seeds: &BTreeSet<Uri>) -> SolutionSet {
        let mut out = SolutionSet::new();
        for (b, cc) in union_branches(&cert.normal_form).into_iter().zip(&cert.conjuncts) {
            out = out.union(self.conjunct(b, cc, seeds));
        }
        out
    }

    fn conjunct(&mut self, c: &LdqlQuery, cc: &ConjunctCertificate, seeds: &BTreeSet<Uri>) -> SolutionSet {
        self.steps.conjunct += 1;
        let atoms = and_atoms(c);
        let mut omega = SolutionSet::unit();
        for (&j, step) in cc.order.iter().zip(&cc.steps) {
            let r = match (atoms[j], step) {
                (a, Justification::Safe { sub }) => self.atom(a, sub, seeds),
                (LdqlQuery::SeedVar(v, q), Justification::SeedVarBound { inner, .. }) => {
                    let harvested: BTreeSet<Uri> =
                        omega.iter().filter_map(|m| m.get(v).and_then(RdfTerm::as_uri)).cloned().collect();
                    let mut r = SolutionSet::new();
                    for u in harvested {
                        self.steps.seed_runs += 1;
                        let tag: SolutionSet =
                            [SolutionMapping::new().with(v.name(), RdfTerm::Uri(u.clone()))].into_iter().collect();
                        let part = self.conjunct(q, inner, &BTreeSet::from([u]));
                        r = r.union(join(&part, &tag));
                    }
                    r
                }
                _ => unreachable!("certificate validated against the query"),
            };
            omega = join(&omega, &r);
            if omega.is_empty() {
                break;
            }
        }
        omega
    }

    fn atom(&mut self, a: &LdqlQuery, sub: &SubqueryCertificate, seeds: &BTreeSet<Uri>) -> SolutionSet {
        match (a, sub) {
            (LdqlQuery::Basic(l, p), SubqueryCertificate::Basic { navsubs }) => self.basic(l, p, navsubs, seeds),
            (LdqlQuery::Project(vs, inner), SubqueryCertificate::Project { inner: cc }) => {
                self.conjunct(inner, cc, seeds).project(vs)
            }
            (LdqlQuery::SeedUris(us, inner), SubqueryCertificate::SeedUris { inner: cc }) => self.conjunct(inner, cc, us),
            _ => unreachable!("certificate validated against the query"),
        }
    }

    fn basic(&mut self, l: &Lpe, p: &GraphPattern, navsubs: &[SafenessCertificate], seeds: &BTreeSet<Uri>) -> SolutionSet {
        self.steps.basic += 1;
        let certs = cert_index(l, navsubs);
        let mut targets = BTreeSet::new();
        for u in seeds {
            targets.extend(self.lpe(l, u, &certs));
        }
        let mut ds = RdfDataset::default();
        for u in targets {
            if let Some(g) = self.lk.lookup(&u) {
                ds.default.extend(g.iter().cloned());
                ds.named.insert(u, (*g).clone());
            }
        }
        eval_pattern(p, &ds.default, &ds)
    }

    fn lpe(&mut self, l: &Lpe, ctx: &Uri, certs: &CertIndex<'_>) -> BTreeSet<Uri> {
        self.steps.lpe += 1;
        let Some(data) = self.lk.lookup(ctx) else {
            return BTreeSet::new();
        };
        match l {
            Lpe::Epsilon => BTreeSet::from([ctx.clone()]),
            Lpe::Pattern(lp) => {
                let ys = lp.positions();
                let mut out = BTreeSet::new();
                for t in data.iter() {
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
                            if !out.contains(u) && self.lk.lookup(u).is_some() {
                                out.insert(u.clone());
                            }
                        }
                    }
                }
                out
            }
            Lpe::Concat(a, b) => {
                let mut out = BTreeSet::new();
                for m in self.lpe(a, ctx, certs) {
                    out.extend(self.lpe(b, &m, certs));
                }
                out
            }
            Lpe::Alt(a, b) => {
                let mut out = self.lpe(a, ctx, certs);
                out.extend(self.lpe(b, ctx, certs));
                out
            }
            Lpe::Star(a) => {
                let mut seen = BTreeSet::from([ctx.clone()]);
                let mut queue = VecDeque::from([ctx.clone()]);
                while let Some(x) = queue.pop_front() {
                    for y in self.lpe(a, &x, certs) {
                        if seen.insert(y.clone()) {
                            queue.push_back(y);
                        }
                    }
                }
                seen
            }
            Lpe::Test(a) => {
                if self.lpe(a, ctx, certs).is_empty() {
                    BTreeSet::new()
                } else {
                    BTreeSet::from([ctx.clone()])
                }
            }
            Lpe::NavSub(v, q) => {
                let cert = certs.get(&(&**q as *const LdqlQuery as usize)).expect("every navigation subquery is certified");
                let r = self.certified(cert, &BTreeSet::from([ctx.clone()]));
                r.iter().filter_map(|m| m.get(v).and_then(RdfTerm::as_uri)).cloned().collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_lpe, parse_pattern, parse_query};
    use crate::rdf::parse_web;
    use crate::sparql::Variable;

    fn lk() -> LookupService {
        LookupService::fixture(parse_web(include_str!("../../fixtures/wex.ldw")).unwrap())
    }

    fn uris(us: &[&str]) -> BTreeSet<Uri> {
        us.iter().map(Uri::new).collect()
    }

    fn m(pairs: &[(&str, &str)]) -> SolutionMapping {
        pairs.iter().map(|(k, v)| (Variable::new(k), RdfTerm::uri(v))).collect()
    }

    const Q_EX: &str = "SEED ?x << eps , { ?x <p1> ?w } >>";
    const Q_EX1: &str = "<< {_ <p1> _}* / [ {_ <p2> _} ] , { ?x <p1> ?y . ?x <p2> ?z } >>";

    #[test]
    fn running_example_lpe_lookups() {
        let svc = lk();
        let got = exec_lpe(&parse_lpe("{_ <p1> _}* / [ {_ <p2> _} ]").unwrap(), &Uri::new("uA"), &svc).unwrap();
        assert_eq!(got, uris(&["uA", "uC"]));
        assert!(svc.attempted().is_subset(&uris(&["uA", "uB", "uC", "p1"])));
    }

    #[test]
    fn epsilon_needs_exactly_one_lookup() {
        let svc = lk();
        assert_eq!(exec_lpe(&Lpe::Epsilon, &Uri::new("uA"), &svc).unwrap(), uris(&["uA"]));
        assert_eq!(svc.stats().attempts, 1);
        let svc = lk();
        assert!(exec_lpe(&parse_lpe("{+ _ _}*").unwrap(), &Uri::new("p2"), &svc).unwrap().is_empty());
    }

    #[test]
    fn basic_query_over_named_graphs() {
        let p = parse_pattern("(GRAPH ?v { })").unwrap();
        let got = exec_basic(&Lpe::Epsilon, &p, &uris(&["uA", "uC"]), &lk()).unwrap();
        assert_eq!(got, [m(&[("v", "uA")]), m(&[("v", "uC")])].into_iter().collect());
        let got = exec_basic(&Lpe::Epsilon, &p, &BTreeSet::new(), &lk()).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn running_example_conjunction() {
        let svc = lk();
        let q = parse_query(&format!("({Q_EX} AND {Q_EX1})")).unwrap();
        let (got, trace) = exec_query_traced(&q, &uris(&["uA"]), &svc).unwrap();
        assert_eq!(got, [m(&[("x", "uA"), ("w", "uB"), ("y", "uB"), ("z", "uC")])].into_iter().collect());
        assert!(trace.attempted.len() <= 4, "{}", trace.to_text());
        assert_eq!(trace.steps.seed_runs, 1);
    }

    #[test]
    fn uncertified_query_is_refused() {
        match exec_query(&parse_query(Q_EX).unwrap(), &uris(&["uA"]), &lk()) {
            Err(ExecError::NotCertified(r)) => assert_eq!(r.refusals[0].missing, Some(Variable::new("x"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let q = parse_query(&format!("({Q_EX} AND {Q_EX1})")).unwrap();
        let mut cert = is_websafe_syntactic(&q).unwrap().certificate.unwrap();
        cert.conjuncts[0].order.reverse();
        cert.conjuncts[0].steps.reverse();
        assert!(matches!(exec_with_certificate(&q, &cert, &uris(&["uA"]), &lk()), Err(ExecError::CertificateMismatch)));
    }
}
