//! UNION normal form: a UNION of conjunctions whose operands are basic queries
//! or PROJECT/SEED over a UNION-free conjunction. Reached by distributing AND,
//! PROJECT and both SEED forms over UNION; LPEs are left untouched.

use super::LdqlQuery;

pub const DEFAULT_NODE_GUARD: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalFormError {
    #[error("UNION normal form exceeds {limit} query nodes")]
    TooLarge { limit: usize },
}

pub fn rewrite_union_normal_form(q: &LdqlQuery) -> Result<LdqlQuery, NormalFormError> {
    rewrite_union_normal_form_with(q, DEFAULT_NODE_GUARD)
}

/// Returns `q` itself when already normal; otherwise the distributed form,
/// aborting once the result would exceed `guard` query nodes.
pub fn rewrite_union_normal_form_with(q: &LdqlQuery, guard: usize) -> Result<LdqlQuery, NormalFormError> {
    if is_union_normal_form(q) {
        return Ok(q.clone());
    }
    let branches = Rewriter { guard }.branches(q)?;
    let conj = branches.into_iter().map(|atoms| LdqlQuery::and_all(atoms).expect("conjunction has an operand"));
    Ok(LdqlQuery::union_all(conj).expect("at least one branch"))
}

struct Rewriter {
    guard: usize,
}

type Branches = Vec<Vec<LdqlQuery>>;

fn weight(b: &Branches) -> usize {
    b.iter().map(|c| c.iter().map(LdqlQuery::size).sum::<usize>() + c.len()).sum::<usize>() + b.len()
}

impl Rewriter {
    fn check(&self, n: usize) -> Result<(), NormalFormError> {
        if n > self.guard {
            Err(NormalFormError::TooLarge { limit: self.guard })
        } else {
            Ok(())
        }
    }

    fn branches(&self, q: &LdqlQuery) -> Result<Branches, NormalFormError> {
        let out = match q {
            LdqlQuery::Basic(..) => vec![vec![q.clone()]],
            LdqlQuery::Union(a, b) => {
                let mut l = self.branches(a)?;
                l.extend(self.branches(b)?);
                l
            }
            LdqlQuery::And(a, b) => {
                let l = self.branches(a)?;
                let r = self.branches(b)?;
                self.check(l.len().saturating_mul(r.len()))?;
                self.check(weight(&l).saturating_mul(r.len()).saturating_add(weight(&r).saturating_mul(l.len())))?;
                let mut out = Vec::with_capacity(l.len() * r.len());
                for x in &l {
                    for y in &r {
                        out.push(x.iter().chain(y.iter()).cloned().collect());
                    }
                }
                out
            }
            LdqlQuery::Project(vs, inner) => self.wrap(inner, |c| LdqlQuery::Project(vs.clone(), Box::new(c)))?,
            LdqlQuery::SeedUris(us, inner) => self.wrap(inner, |c| LdqlQuery::SeedUris(us.clone(), Box::new(c)))?,
            LdqlQuery::SeedVar(v, inner) => self.wrap(inner, |c| LdqlQuery::seed_var(v.clone(), c))?,
        };
        self.check(weight(&out))?;
        Ok(out)
    }

    fn wrap(&self, inner: &LdqlQuery, f: impl Fn(LdqlQuery) -> LdqlQuery) -> Result<Branches, NormalFormError> {
        Ok(self
            .branches(inner)?
            .into_iter()
            .map(|atoms| vec![f(LdqlQuery::and_all(atoms).expect("conjunction has an operand"))])
            .collect())
    }
}

/// Operands of a top-level UNION spine, left to right.
pub fn union_branches(q: &LdqlQuery) -> Vec<&LdqlQuery> {
    match q {
        LdqlQuery::Union(a, b) => {
            let mut out = union_branches(a);
            out.extend(union_branches(b));
            out
        }
        _ => vec![q],
    }
}

/// Operands of a top-level AND spine, left to right.
pub fn and_atoms(q: &LdqlQuery) -> Vec<&LdqlQuery> {
    match q {
        LdqlQuery::And(a, b) => {
            let mut out = and_atoms(a);
            out.extend(and_atoms(b));
            out
        }
        _ => vec![q],
    }
}

pub fn is_union_free_normal_form(q: &LdqlQuery) -> bool {
    and_atoms(q).into_iter().all(|a| match a {
        LdqlQuery::Basic(..) => true,
        LdqlQuery::Project(_, inner) | LdqlQuery::SeedUris(_, inner) | LdqlQuery::SeedVar(_, inner) => {
            is_union_free_normal_form(inner)
        }
        LdqlQuery::Union(..) | LdqlQuery::And(..) => false,
    })
}

pub fn is_union_normal_form(q: &LdqlQuery) -> bool {
    union_branches(q).into_iter().all(is_union_free_normal_form)
}
