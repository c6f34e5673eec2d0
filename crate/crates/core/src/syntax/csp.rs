use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{level_var, prune_restriction, reduce_restriction, Interface, Label, SyntaxError, Term, VarId};

/// Relational renaming: each label maps to a set of images. Labels outside
/// the domain are left unchanged.
pub type RenamingMap = BTreeMap<Label, BTreeSet<Label>>;

/// CSP terms with `a#m` clauses on parallel interfaces (CSPmn).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CspProc {
    Stop,
    Skip,
    Prefix(Label, Box<CspProc>),
    ExtChoice(Box<CspProc>, Box<CspProc>),
    IntChoice(Box<CspProc>, Box<CspProc>),
    Par(Box<CspProc>, Box<CspProc>, Interface),
    Hide(Box<CspProc>, BTreeSet<Label>),
    Rename(Box<CspProc>, RenamingMap),
    /// Blocks the listed labels and their complements at the boundary;
    /// completed multi-party synchronisations pass.
    Restrict(Box<CspProc>, BTreeSet<Label>),
    Rec(VarId, Box<CspProc>),
    Var(VarId),
}

impl CspProc {
    pub fn prefix(label: Label, p: CspProc) -> Self {
        CspProc::Prefix(label, Box::new(p))
    }

    pub fn ext(p: CspProc, q: CspProc) -> Self {
        CspProc::ExtChoice(Box::new(p), Box::new(q))
    }

    pub fn int(p: CspProc, q: CspProc) -> Self {
        CspProc::IntChoice(Box::new(p), Box::new(q))
    }

    pub fn par(p: CspProc, q: CspProc, iface: Interface) -> Self {
        CspProc::Par(Box::new(p), Box::new(q), iface)
    }

    pub fn hide<I: IntoIterator<Item = Label>>(p: CspProc, set: I) -> Self {
        CspProc::Hide(Box::new(p), set.into_iter().collect())
    }

    pub fn restrict<I: IntoIterator<Item = Label>>(p: CspProc, set: I) -> Self {
        CspProc::Restrict(Box::new(p), set.into_iter().collect())
    }

    pub fn rename(p: CspProc, map: RenamingMap) -> Self {
        CspProc::Rename(Box::new(p), map)
    }

    pub fn rec(var: impl Into<VarId>, body: CspProc) -> Self {
        CspProc::Rec(var.into(), Box::new(body))
    }

    pub fn var(var: impl Into<VarId>) -> Self {
        CspProc::Var(var.into())
    }

    /// Right-nested external choice; `STOP` when empty.
    pub fn ext_of(branches: Vec<CspProc>) -> Self {
        let mut it = branches.into_iter().rev();
        match it.next() {
            None => CspProc::Stop,
            Some(last) => it.fold(last, |acc, b| CspProc::ext(b, acc)),
        }
    }

    /// Events the term may perform: prefix events with renaming images
    /// applied and hidden events removed. Excludes `τ` and `✓`.
    pub fn alphabet(&self) -> BTreeSet<Label> {
        match self {
            CspProc::Stop | CspProc::Skip | CspProc::Var(_) => BTreeSet::new(),
            CspProc::Prefix(l, p) => {
                let mut a = p.alphabet();
                if !matches!(l, Label::Tau | Label::Tick) {
                    a.insert(l.clone());
                }
                a
            }
            CspProc::ExtChoice(p, q) | CspProc::IntChoice(p, q) | CspProc::Par(p, q, _) => {
                let mut a = p.alphabet();
                a.extend(q.alphabet());
                a
            }
            CspProc::Hide(p, b) => p.alphabet().into_iter().filter(|l| !b.contains(l)).collect(),
            CspProc::Rename(p, map) => p
                .alphabet()
                .into_iter()
                .flat_map(|l| match map.get(&l) {
                    Some(images) => images.iter().cloned().collect::<Vec<_>>(),
                    None => vec![l],
                })
                .collect(),
            CspProc::Restrict(p, _) | CspProc::Rec(_, p) => p.alphabet(),
        }
    }

    pub fn has_parallel(&self) -> bool {
        match self {
            CspProc::Par(..) => true,
            CspProc::Stop | CspProc::Skip | CspProc::Var(_) => false,
            CspProc::Prefix(_, p)
            | CspProc::Hide(p, _)
            | CspProc::Rename(p, _)
            | CspProc::Restrict(p, _)
            | CspProc::Rec(_, p) => p.has_parallel(),
            CspProc::ExtChoice(p, q) | CspProc::IntChoice(p, q) => p.has_parallel() || q.has_parallel(),
        }
    }

    pub fn has_parallel_under_rec(&self) -> bool {
        match self {
            CspProc::Rec(_, body) => body.has_parallel(),
            CspProc::Stop | CspProc::Skip | CspProc::Var(_) => false,
            CspProc::Prefix(_, p) | CspProc::Hide(p, _) | CspProc::Rename(p, _) | CspProc::Restrict(p, _) => {
                p.has_parallel_under_rec()
            }
            CspProc::ExtChoice(p, q) | CspProc::IntChoice(p, q) | CspProc::Par(p, q, _) => {
                p.has_parallel_under_rec() || q.has_parallel_under_rec()
            }
        }
    }

    /// Applies `f` to every interface, bottom-up.
    pub fn map_interfaces(&self, f: &impl Fn(&Interface) -> Interface) -> CspProc {
        self.map_children(&|c| c.map_interfaces(f), &|p, q, i| CspProc::par(p, q, f(i)))
    }

    /// Rebuilds the node with `child` applied to every sub-term; parallel
    /// nodes are rebuilt through `par`.
    pub(crate) fn map_children(
        &self,
        child: &impl Fn(&CspProc) -> CspProc,
        par: &impl Fn(CspProc, CspProc, &Interface) -> CspProc,
    ) -> CspProc {
        match self {
            CspProc::Stop | CspProc::Skip | CspProc::Var(_) => self.clone(),
            CspProc::Prefix(l, p) => CspProc::prefix(l.clone(), child(p)),
            CspProc::ExtChoice(p, q) => CspProc::ext(child(p), child(q)),
            CspProc::IntChoice(p, q) => CspProc::int(child(p), child(q)),
            CspProc::Par(p, q, i) => par(child(p), child(q), i),
            CspProc::Hide(p, b) => CspProc::Hide(Box::new(child(p)), b.clone()),
            CspProc::Rename(p, m) => CspProc::Rename(Box::new(child(p)), m.clone()),
            CspProc::Restrict(p, b) => CspProc::Restrict(Box::new(child(p)), b.clone()),
            CspProc::Rec(x, p) => CspProc::rec(x.clone(), child(p)),
        }
    }

    pub fn substitute(&self, var: &str, by: &CspProc) -> CspProc {
        match self {
            CspProc::Var(x) if x == var => by.clone(),
            CspProc::Rec(x, _) if x == var => self.clone(),
            _ => self.map_children(&|c| c.substitute(var, by), &|p, q, i| CspProc::par(p, q, i.clone())),
        }
    }

    pub fn unfold(&self) -> CspProc {
        match self {
            CspProc::Rec(x, body) => body.substitute(x, self),
            other => other.clone(),
        }
    }

    fn resolves_choice(&self) -> bool {
        matches!(self, CspProc::Stop | CspProc::Skip | CspProc::Prefix(..))
    }

    fn choice_branches(&self, out: &mut Vec<CspProc>) {
        match self {
            CspProc::ExtChoice(p, q) => {
                p.choice_branches(out);
                q.choice_branches(out);
            }
            other => out.push(other.clone()),
        }
    }

    fn canon(&self, env: &mut Vec<(VarId, VarId)>) -> CspProc {
        match self {
            CspProc::ExtChoice(..) => {
                let mut raw = Vec::new();
                self.choice_branches(&mut raw);
                let mut branches = Vec::new();
                for b in raw {
                    b.canon(env).choice_branches(&mut branches);
                }
                branches.sort();
                // Branches with internal moves keep the choice open.
                branches.dedup_by(|a, b| a == b && a.resolves_choice());
                CspProc::ext_of(branches)
            }
            CspProc::Hide(p, b) => {
                let inner = p.canon(env);
                if b.is_empty() {
                    return inner;
                }
                match inner {
                    CspProc::Hide(r, c) => CspProc::Hide(r, c.union(b).cloned().collect()),
                    other => CspProc::Hide(Box::new(other), b.clone()),
                }
            }
            CspProc::Rec(x, body) => {
                let fresh = level_var(env.len());
                env.push((x.clone(), fresh.clone()));
                let body = body.canon(env);
                env.pop();
                CspProc::rec(fresh, body)
            }
            CspProc::Var(x) => match env.iter().rev().find(|(orig, _)| orig == x) {
                Some((_, fresh)) => CspProc::Var(fresh.clone()),
                None => self.clone(),
            },
            CspProc::Stop | CspProc::Skip => self.clone(),
            CspProc::Prefix(l, p) => CspProc::prefix(l.clone(), p.canon(env)),
            CspProc::IntChoice(p, q) => {
                let p = p.canon(env);
                CspProc::int(p, q.canon(env))
            }
            CspProc::Par(p, q, i) => {
                let p = p.canon(env);
                CspProc::par(p, q.canon(env), i.clone())
            }
            CspProc::Rename(p, m) => CspProc::Rename(Box::new(p.canon(env)), m.clone()),
            CspProc::Restrict(p, b) => {
                let inner = p.canon(env);
                let labels = inner.well_formed().is_ok().then(|| inner.alphabet());
                let set = prune_restriction(reduce_restriction(b), labels);
                if set.is_empty() {
                    return inner;
                }
                CspProc::Restrict(Box::new(inner), set)
            }
        }
    }

    fn check(&self, bound: &mut Vec<VarId>, unguarded: &mut Vec<VarId>) -> Result<(), SyntaxError> {
        match self {
            CspProc::Stop | CspProc::Skip => Ok(()),
            CspProc::Var(x) => {
                if !bound.contains(x) {
                    Err(SyntaxError::UnboundVariable(x.clone()))
                } else if unguarded.contains(x) {
                    Err(SyntaxError::Unguarded(x.clone()))
                } else {
                    Ok(())
                }
            }
            CspProc::Prefix(_, p) => p.check(bound, &mut Vec::new()),
            CspProc::ExtChoice(p, q) | CspProc::IntChoice(p, q) | CspProc::Par(p, q, _) => {
                p.check(bound, unguarded)?;
                q.check(bound, unguarded)
            }
            CspProc::Hide(p, _) | CspProc::Rename(p, _) | CspProc::Restrict(p, _) => p.check(bound, unguarded),
            CspProc::Rec(x, body) => {
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

impl Term for CspProc {
    fn canonicalise(&self) -> Self {
        self.canon(&mut Vec::new())
    }

    fn well_formed(&self) -> Result<(), SyntaxError> {
        self.check(&mut Vec::new(), &mut Vec::new())
    }
}

impl fmt::Display for CspProc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::io::print_csp(self))
    }
}
