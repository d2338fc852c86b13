//! A sufficient syntactic condition for Web-safeness, with checkable certificates.
//!
//! The query is rewritten to UNION normal form. Each UNION-free conjunct is an
//! AND of atoms and needs an order in which every atom is either safe on its
//! own, or is `SEED ?v q` with `q` safe and `?v` strongly bound by some earlier
//! atom. Atoms are safe on their own as follows:
//! - a basic query when every `(?v : q)` in its LPE has a safe `q`
//! - `PROJECT` and `SEED {..}` when their conjunct is safe
//!
//! `SEED ?v q` is never safe on its own.
//!
//! Failing the condition means "not certified", not "unsafe".

use crate::lang::{and_atoms, rewrite_union_normal_form, union_branches, LdqlQuery, NormalFormError, SbVarSet};
use crate::sparql::Variable;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafenessCertificate {
    pub normal_form: LdqlQuery,
    /// One entry per UNION branch of `normal_form`, in order.
    pub conjuncts: Vec<ConjunctCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjunctCertificate {
    /// Branch position among the UNION branches; 0 for nested conjuncts.
    pub index: usize,
    /// A permutation of the conjunct's AND operands.
    pub order: Vec<usize>,
    /// `steps[p]` justifies the operand `order[p]`.
    pub steps: Vec<Justification>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Justification {
    Safe { sub: SubqueryCertificate },
    /// `providers` are earlier step positions whose operand strongly binds `var`.
    SeedVarBound { var: Variable, providers: Vec<usize>, inner: ConjunctCertificate },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubqueryCertificate {
    /// One certificate per `(?v : q)` of the LPE, in preorder.
    Basic { navsubs: Vec<SafenessCertificate> },
    Project { inner: ConjunctCertificate },
    SeedUris { inner: ConjunctCertificate },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotCertified,
}

/// Why a conjunct admits no order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refusal {
    /// UNION branch of the top-level normal form.
    pub conjunct: usize,
    /// The innermost operand that could not be placed.
    pub subquery: LdqlQuery,
    /// The SEED variable that nothing earlier binds, if that is the cause.
    pub missing: Option<Variable>,
}

impl fmt::Display for Refusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conjunct {}: cannot place {}", self.conjunct, self.subquery)?;
        if let Some(v) = &self.missing {
            write!(f, ": {v} is not strongly bound by any operand that can precede it")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafenessReport {
    pub verdict: Verdict,
    pub certificate: Option<SafenessCertificate>,
    pub refusals: Vec<Refusal>,
}

impl SafenessReport {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.certificate {
            Some(c) => {
                out.push_str("verdict: certified\n");
                let _ = writeln!(out, "normal form: {}", c.normal_form);
                for cc in &c.conjuncts {
                    write_conjunct(&mut out, cc, &c.normal_form, 0);
                }
            }
            None => {
                out.push_str("verdict: not certified (the sufficient condition does not apply)\n");
                for r in &self.refusals {
                    let _ = writeln!(out, "{r}");
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn write_conjunct(out: &mut String, cc: &ConjunctCertificate, nf: &LdqlQuery, depth: usize) {
    let pad = "  ".repeat(depth);
    let branch = if depth == 0 { union_branches(nf).get(cc.index).copied() } else { Some(nf) };
    let atoms = branch.map(and_atoms).unwrap_or_default();
    let _ = writeln!(out, "{pad}conjunct {}: order {:?}", cc.index, cc.order);
    for (p, (j, step)) in cc.order.iter().zip(&cc.steps).enumerate() {
        let text = atoms.get(*j).map(|a| a.to_string()).unwrap_or_default();
        match step {
            Justification::Safe { .. } => {
                let _ = writeln!(out, "{pad}  step {p}: operand {j} is safe: {text}");
            }
            Justification::SeedVarBound { var, providers, .. } => {
                let _ = writeln!(out, "{pad}  step {p}: operand {j} seeds {var} bound by steps {providers:?}: {text}");
            }
        }
    }
}

pub fn is_websafe_syntactic(q: &LdqlQuery) -> Result<SafenessReport, NormalFormError> {
    match certify(q) {
        Ok(c) => Ok(SafenessReport { verdict: Verdict::Certified, certificate: Some(c), refusals: Vec::new() }),
        Err(Fail::Refused(r)) => Ok(SafenessReport { verdict: Verdict::NotCertified, certificate: None, refusals: r }),
        Err(Fail::Guard(e)) => Err(e),
    }
}

/// An order of `subqueries` meeting the AND condition, or `None`.
///
/// Placing an operand only grows the set of strongly bound variables, so an
/// operand that is admissible stays admissible; taking any admissible operand
/// first therefore never blocks an order that exists.
pub fn find_order(subqueries: &[LdqlQuery]) -> Option<Vec<usize>> {
    let sb: Vec<SbVarSet> = subqueries.iter().map(LdqlQuery::sbvars).collect();
    let own: Vec<bool> = subqueries.iter().map(|a| certify(a).is_ok()).collect();
    let seeded: Vec<Option<Variable>> = subqueries
        .iter()
        .map(|a| match a {
            LdqlQuery::SeedVar(v, inner) if certify(inner).is_ok() => Some(v.clone()),
            _ => None,
        })
        .collect();
    greedy(&sb, |j, bound| own[j] || seeded[j].as_ref().is_some_and(|v| bound.contains(v))).ok()
}

fn greedy(sb: &[SbVarSet], admissible: impl Fn(usize, &SbVarSet) -> bool) -> Result<Vec<usize>, Vec<usize>> {
    let mut order = Vec::with_capacity(sb.len());
    let mut placed = vec![false; sb.len()];
    let mut bound = SbVarSet::new();
    while order.len() < sb.len() {
        let next = (0..sb.len()).find(|&j| !placed[j] && admissible(j, &bound));
        match next {
            Some(j) => {
                placed[j] = true;
                order.push(j);
                bound.extend(sb[j].iter().cloned());
            }
            None => return Err((0..sb.len()).filter(|&j| !placed[j]).collect()),
        }
    }
    Ok(order)
}

enum Fail {
    Refused(Vec<Refusal>),
    Guard(NormalFormError),
}

fn certify(q: &LdqlQuery) -> Result<SafenessCertificate, Fail> {
    let nf = rewrite_union_normal_form(q).map_err(Fail::Guard)?;
    let mut conjuncts = Vec::new();
    let mut refusals = Vec::new();
    for (i, b) in union_branches(&nf).into_iter().enumerate() {
        match conjunct(b, i) {
            Ok(c) => conjuncts.push(c),
            Err(Fail::Refused(rs)) => {
                refusals.extend(rs.into_iter().map(|r| Refusal { conjunct: i, ..r }));
            }
            Err(e) => return Err(e),
        }
    }
    if refusals.is_empty() {
        Ok(SafenessCertificate { normal_form: nf, conjuncts })
    } else {
        Err(Fail::Refused(refusals))
    }
}

fn conjunct(c: &LdqlQuery, index: usize) -> Result<ConjunctCertificate, Fail> {
    let atoms = and_atoms(c);
    let sb: Vec<SbVarSet> = atoms.iter().map(|a| a.sbvars()).collect();
    let mut own = Vec::with_capacity(atoms.len());
    for a in &atoms {
        match atom_safe(a, index) {
            Ok(s) => own.push(Ok(s)),
            Err(Fail::Guard(e)) => return Err(Fail::Guard(e)),
            Err(Fail::Refused(r)) => own.push(Err(r)),
        }
    }
    let mut seeded = Vec::with_capacity(atoms.len());
    for a in &atoms {
        seeded.push(match a {
            LdqlQuery::SeedVar(v, inner) => match conjunct(inner, 0) {
                Ok(cc) => Some(Ok((v.clone(), cc))),
                Err(Fail::Guard(e)) => return Err(Fail::Guard(e)),
                Err(Fail::Refused(r)) => Some(Err(r)),
            },
            _ => None,
        });
    }
    let admissible = |j: usize, bound: &SbVarSet| {
        own[j].is_ok() || matches!(&seeded[j], Some(Ok((v, _))) if bound.contains(v))
    };
    match greedy(&sb, admissible) {
        Ok(order) => {
            let mut steps = Vec::with_capacity(order.len());
            for (p, &j) in order.iter().enumerate() {
                steps.push(match (&own[j], &seeded[j]) {
                    (Ok(sub), _) => Justification::Safe { sub: sub.clone() },
                    (_, Some(Ok((v, inner)))) => Justification::SeedVarBound {
                        var: v.clone(),
                        providers: (0..p).filter(|&pp| sb[order[pp]].contains(v)).collect(),
                        inner: inner.clone(),
                    },
                    _ => unreachable!("placed operands are admissible"),
                });
            }
            Ok(ConjunctCertificate { index, order, steps })
        }
        Err(stuck) => {
            let mut out = Vec::new();
            for j in stuck {
                match &seeded[j] {
                    Some(Ok((v, _))) => {
                        out.push(Refusal { conjunct: index, subquery: atoms[j].clone(), missing: Some(v.clone()) })
                    }
                    Some(Err(r)) => out.extend(r.iter().cloned()),
                    None => out.extend(own[j].as_ref().err().into_iter().flatten().cloned()),
                }
            }
            Err(Fail::Refused(out))
        }
    }
}

fn atom_safe(a: &LdqlQuery, index: usize) -> Result<SubqueryCertificate, Fail> {
    match a {
        LdqlQuery::Basic(l, _) => {
            let mut navsubs = Vec::new();
            let mut refusals = Vec::new();
            for q in l.subqueries() {
                match certify(q) {
                    Ok(c) => navsubs.push(c),
                    Err(Fail::Refused(r)) => refusals.extend(r),
                    Err(e) => return Err(e),
                }
            }
            if refusals.is_empty() {
                Ok(SubqueryCertificate::Basic { navsubs })
            } else {
                Err(Fail::Refused(refusals))
            }
        }
        LdqlQuery::Project(_, inner) => Ok(SubqueryCertificate::Project { inner: conjunct(inner, 0)? }),
        LdqlQuery::SeedUris(_, inner) => Ok(SubqueryCertificate::SeedUris { inner: conjunct(inner, 0)? }),
        LdqlQuery::SeedVar(v, _) => {
            Err(Fail::Refused(vec![Refusal { conjunct: index, subquery: a.clone(), missing: Some(v.clone()) }]))
        }
        LdqlQuery::And(..) | LdqlQuery::Union(..) => unreachable!("operands of a normal-form conjunct"),
    }
}

/// Re-checks every obligation of `c` against `q` from scratch.
pub fn validate_certificate(q: &LdqlQuery, c: &SafenessCertificate) -> bool {
    match rewrite_union_normal_form(q) {
        Ok(nf) if nf == c.normal_form => {}
        _ => return false,
    }
    let branches = union_branches(&c.normal_form);
    branches.len() == c.conjuncts.len()
        && branches.iter().zip(&c.conjuncts).enumerate().all(|(i, (b, cc))| cc.index == i && validate_conjunct(b, cc))
}

/// Re-checks a certificate for one UNION-free conjunct.
pub fn validate_conjunct(c: &LdqlQuery, cc: &ConjunctCertificate) -> bool {
    let atoms = and_atoms(c);
    let n = atoms.len();
    let distinct: BTreeSet<usize> = cc.order.iter().copied().collect();
    if cc.order.len() != n || cc.steps.len() != n || distinct.len() != n || cc.order.iter().any(|&j| j >= n) {
        return false;
    }
    cc.order.iter().zip(&cc.steps).enumerate().all(|(p, (&j, step))| match (atoms[j], step) {
        (a, Justification::Safe { sub }) => valid_sub(a, sub),
        (LdqlQuery::SeedVar(v, inner), Justification::SeedVarBound { var, providers, inner: ic }) => {
            v == var
                && !providers.is_empty()
                && providers.iter().all(|&pp| pp < p && atoms[cc.order[pp]].sbvars().contains(v))
                && validate_conjunct(inner, ic)
        }
        _ => false,
    })
}

fn valid_sub(a: &LdqlQuery, sub: &SubqueryCertificate) -> bool {
    match (a, sub) {
        (LdqlQuery::Basic(l, _), SubqueryCertificate::Basic { navsubs }) => {
            let qs = l.subqueries();
            qs.len() == navsubs.len() && qs.iter().zip(navsubs).all(|(q, c)| validate_certificate(q, c))
        }
        (LdqlQuery::Project(_, inner), SubqueryCertificate::Project { inner: cc })
        | (LdqlQuery::SeedUris(_, inner), SubqueryCertificate::SeedUris { inner: cc }) => validate_conjunct(inner, cc),
        _ => false,
    }
}
