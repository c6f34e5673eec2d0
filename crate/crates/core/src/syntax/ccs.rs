use std::collections::BTreeSet;
use std::fmt;

use super::{level_var, prune_restriction, reduce_restriction, Label, SyntaxError, Term, VarId};

/// CCS terms, extended with the CCSTau operators `|_T` and `\_T`.
///
/// Plain CCS never contains `TPar` or `THide`; CCSTau never contains `Par`
/// once `c2ccstau` has run. Both share one type so every pass can be
/// written once.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CcsProc {
    Nil,
    Prefix(Label, Box<CcsProc>),
    Sum(Box<CcsProc>, Box<CcsProc>),
    Par(Box<CcsProc>, Box<CcsProc>),
    TPar(Box<CcsProc>, Box<CcsProc>),
    Restrict(Box<CcsProc>, BTreeSet<Label>),
    THide(Box<CcsProc>, BTreeSet<Label>),
    Rec(VarId, Box<CcsProc>),
    Var(VarId),
}

pub type CcsTauProc = CcsProc;

impl CcsProc {
    pub fn prefix(label: Label, p: CcsProc) -> Self {
        CcsProc::Prefix(label, Box::new(p))
    }

    pub fn sum(p: CcsProc, q: CcsProc) -> Self {
        CcsProc::Sum(Box::new(p), Box::new(q))
    }

    pub fn par(p: CcsProc, q: CcsProc) -> Self {
        CcsProc::Par(Box::new(p), Box::new(q))
    }

    pub fn tpar(p: CcsProc, q: CcsProc) -> Self {
        CcsProc::TPar(Box::new(p), Box::new(q))
    }

    pub fn restrict<I: IntoIterator<Item = Label>>(p: CcsProc, set: I) -> Self {
        CcsProc::Restrict(Box::new(p), set.into_iter().collect())
    }

    pub fn thide<I: IntoIterator<Item = Label>>(p: CcsProc, set: I) -> Self {
        CcsProc::THide(Box::new(p), set.into_iter().collect())
    }

    pub fn rec(var: impl Into<VarId>, body: CcsProc) -> Self {
        CcsProc::Rec(var.into(), Box::new(body))
    }

    pub fn var(var: impl Into<VarId>) -> Self {
        CcsProc::Var(var.into())
    }

    /// Right-nested sum of `branches` in the given order; `0` when empty.
    pub fn sum_of(branches: Vec<CcsProc>) -> Self {
        let mut it = branches.into_iter().rev();
        match it.next() {
            None => CcsProc::Nil,
            Some(last) => it.fold(last, |acc, b| CcsProc::sum(b, acc)),
        }
    }

    /// Syntactic sort: every visible prefix label, collected through binders.
    pub fn sort(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect_sort(&mut out);
        out
    }

    fn collect_sort(&self, out: &mut BTreeSet<Label>) {
        match self {
            CcsProc::Nil | CcsProc::Var(_) => {}
            CcsProc::Prefix(l, p) => {
                if !l.is_tau() {
                    out.insert(l.clone());
                }
                p.collect_sort(out);
            }
            CcsProc::Sum(p, q) | CcsProc::Par(p, q) | CcsProc::TPar(p, q) => {
                p.collect_sort(out);
                q.collect_sort(out);
            }
            CcsProc::Restrict(p, _) | CcsProc::THide(p, _) | CcsProc::Rec(_, p) => p.collect_sort(out),
        }
    }

    pub fn has_parallel(&self) -> bool {
        match self {
            CcsProc::Par(..) | CcsProc::TPar(..) => true,
            CcsProc::Nil | CcsProc::Var(_) => false,
            CcsProc::Prefix(_, p) | CcsProc::Restrict(p, _) | CcsProc::THide(p, _) | CcsProc::Rec(_, p) => {
                p.has_parallel()
            }
            CcsProc::Sum(p, q) => p.has_parallel() || q.has_parallel(),
        }
    }

    /// True when some recursion body contains a parallel composition.
    pub fn has_parallel_under_rec(&self) -> bool {
        match self {
            CcsProc::Rec(_, body) => body.has_parallel(),
            CcsProc::Nil | CcsProc::Var(_) => false,
            CcsProc::Prefix(_, p) | CcsProc::Restrict(p, _) | CcsProc::THide(p, _) => p.has_parallel_under_rec(),
            CcsProc::Sum(p, q) | CcsProc::Par(p, q) | CcsProc::TPar(p, q) => {
                p.has_parallel_under_rec() || q.has_parallel_under_rec()
            }
        }
    }

    pub fn is_plain_ccs(&self) -> bool {
        match self {
            CcsProc::TPar(..) | CcsProc::THide(..) => false,
            CcsProc::Prefix(l, p) => matches!(l, Label::Tau | Label::Name(_) | Label::CoName(_)) && p.is_plain_ccs(),
            CcsProc::Nil | CcsProc::Var(_) => true,
            CcsProc::Restrict(p, _) | CcsProc::Rec(_, p) => p.is_plain_ccs(),
            CcsProc::Sum(p, q) | CcsProc::Par(p, q) => p.is_plain_ccs() && q.is_plain_ccs(),
        }
    }

    /// Replaces free occurrences of `var` by `by`.
    pub fn substitute(&self, var: &str, by: &CcsProc) -> CcsProc {
        match self {
            CcsProc::Var(x) if x == var => by.clone(),
            CcsProc::Var(_) | CcsProc::Nil => self.clone(),
            CcsProc::Rec(x, _) if x == var => self.clone(),
            CcsProc::Rec(x, b) => CcsProc::rec(x.clone(), b.substitute(var, by)),
            CcsProc::Prefix(l, p) => CcsProc::prefix(l.clone(), p.substitute(var, by)),
            CcsProc::Sum(p, q) => CcsProc::sum(p.substitute(var, by), q.substitute(var, by)),
            CcsProc::Par(p, q) => CcsProc::par(p.substitute(var, by), q.substitute(var, by)),
            CcsProc::TPar(p, q) => CcsProc::tpar(p.substitute(var, by), q.substitute(var, by)),
            CcsProc::Restrict(p, b) => CcsProc::Restrict(Box::new(p.substitute(var, by)), b.clone()),
            CcsProc::THide(p, b) => CcsProc::THide(Box::new(p.substitute(var, by)), b.clone()),
        }
    }

    /// One unfolding of a top-level `rec`; other terms are returned as is.
    pub fn unfold(&self) -> CcsProc {
        match self {
            CcsProc::Rec(x, body) => body.substitute(x, self),
            other => other.clone(),
        }
    }

    fn sum_branches(&self, out: &mut Vec<CcsProc>) {
        match self {
            CcsProc::Sum(p, q) => {
                p.sum_branches(out);
                q.sum_branches(out);
            }
            other => out.push(other.clone()),
        }
    }

    fn canon(&self, env: &mut Vec<(VarId, VarId)>) -> CcsProc {
        match self {
            CcsProc::Nil => CcsProc::Nil,
            CcsProc::Prefix(l, p) => CcsProc::prefix(l.clone(), p.canon(env)),
            CcsProc::Sum(..) => {
                let mut raw = Vec::new();
                self.sum_branches(&mut raw);
                let mut branches = Vec::new();
                for b in raw {
                    b.canon(env).sum_branches(&mut branches);
                }
                branches.sort();
                branches.dedup();
                CcsProc::sum_of(branches)
            }
            CcsProc::Par(p, q) => CcsProc::par(p.canon(env), q.canon(env)),
            CcsProc::TPar(p, q) => CcsProc::tpar(p.canon(env), q.canon(env)),
            CcsProc::Restrict(p, b) => {
                let inner = p.canon(env);
                let labels = inner.well_formed().is_ok().then(|| inner.sort());
                let set = prune_restriction(reduce_restriction(b), labels);
                if set.is_empty() {
                    return inner;
                }
                CcsProc::Restrict(Box::new(inner), set)
            }
            CcsProc::THide(p, b) => {
                let inner = p.canon(env);
                if b.is_empty() {
                    return inner;
                }
                match inner {
                    CcsProc::THide(r, c) => CcsProc::THide(r, c.union(b).cloned().collect()),
                    other => CcsProc::THide(Box::new(other), b.clone()),
                }
            }
            CcsProc::Rec(x, body) => {
                let fresh = level_var(env.len());
                env.push((x.clone(), fresh.clone()));
                let body = body.canon(env);
                env.pop();
                CcsProc::rec(fresh, body)
            }
            CcsProc::Var(x) => match env.iter().rev().find(|(orig, _)| orig == x) {
                Some((_, fresh)) => CcsProc::Var(fresh.clone()),
                None => CcsProc::Var(x.clone()),
            },
        }
    }

    fn check(&self, bound: &mut Vec<VarId>, unguarded: &mut Vec<VarId>) -> Result<(), SyntaxError> {
        match self {
            CcsProc::Nil => Ok(()),
            CcsProc::Var(x) => {
                if !bound.contains(x) {
                    Err(SyntaxError::UnboundVariable(x.clone()))
                } else if unguarded.contains(x) {
                    Err(SyntaxError::Unguarded(x.clone()))
                } else {
                    Ok(())
                }
            }
            CcsProc::Prefix(_, p) => {
                let mut none = Vec::new();
                p.check(bound, &mut none)
            }
            CcsProc::Sum(p, q) | CcsProc::Par(p, q) | CcsProc::TPar(p, q) => {
                p.check(bound, unguarded)?;
                q.check(bound, unguarded)
            }
            CcsProc::Restrict(p, _) | CcsProc::THide(p, _) => p.check(bound, unguarded),
            CcsProc::Rec(x, body) => {
                bound.push(x.clone());
                unguarded.push(x.clone());
                let r = body.check(bound, unguarded);
                bound.pop();
                unguarded.pop();
                r
            }
        }
    }
}

impl Term for CcsProc {
    fn canonicalise(&self) -> Self {
        self.canon(&mut Vec::new())
    }

    fn well_formed(&self) -> Result<(), SyntaxError> {
        self.check(&mut Vec::new(), &mut Vec::new())
    }
}

impl fmt::Display for CcsProc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::io::print_ccs(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Label {
        Label::name("a")
    }
    fn abar() -> Label {
        Label::coname("a")
    }

    #[test]
    fn sort_of_parallel_pair() {
        let p = CcsProc::par(CcsProc::prefix(a(), CcsProc::Nil), CcsProc::prefix(abar(), CcsProc::Nil));
        assert_eq!(p.sort(), [a(), abar()].into_iter().collect());
        assert!(CcsProc::Nil.sort().is_empty());
    }

    #[test]
    fn sort_through_recursion_matches_unfoldings() {
        let p = CcsProc::rec(
            "X",
            CcsProc::par(CcsProc::prefix(a(), CcsProc::Nil), CcsProc::prefix(abar(), CcsProc::var("X"))),
        );
        // Oracle: labels of three successive unfoldings agree with the syntactic sort.
        let mut unfolded = p.clone();
        for _ in 0..3 {
            unfolded = match unfolded {
                CcsProc::Rec(..) => unfolded.unfold(),
                other => other.substitute("X", &p),
            };
            assert_eq!(unfolded.sort(), p.sort());
        }
        assert_eq!(p.sort(), [a(), abar()].into_iter().collect());
    }

    #[test]
    fn canonical_sum_is_order_insensitive() {
        let b = Label::name("b");
        let p = CcsProc::sum(CcsProc::prefix(a(), CcsProc::Nil), CcsProc::prefix(b.clone(), CcsProc::Nil));
        let q = CcsProc::sum(CcsProc::prefix(b, CcsProc::Nil), CcsProc::prefix(a(), CcsProc::Nil));
        assert_eq!(p.canonicalise(), q.canonicalise());
    }

    #[test]
    fn canonical_alpha_equivalence() {
        let p = CcsProc::rec("X", CcsProc::prefix(a(), CcsProc::var("X")));
        let q = CcsProc::rec("Y", CcsProc::prefix(a(), CcsProc::var("Y")));
        assert_eq!(p.canonicalise(), q.canonicalise());
    }

    #[test]
    fn canonical_keeps_nil_summand() {
        let p = CcsProc::prefix(a(), CcsProc::Nil);
        let q = CcsProc::sum(p.clone(), CcsProc::Nil);
        assert_ne!(p.canonicalise(), q.canonicalise());
    }

    #[test]
    fn well_formedness() {
        assert!(CcsProc::var("X").well_formed().is_err());
        assert!(CcsProc::rec("X", CcsProc::var("X")).well_formed().is_err());
        assert!(CcsProc::rec("X", CcsProc::sum(CcsProc::var("X"), CcsProc::Nil)).well_formed().is_err());
        assert!(CcsProc::rec("X", CcsProc::prefix(a(), CcsProc::var("X"))).well_formed().is_ok());
    }
}
