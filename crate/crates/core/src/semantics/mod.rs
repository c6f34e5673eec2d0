//! Structural operational semantics and bounded LTS construction.

mod ccs;
mod csp;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::syntax::{CcsProc, CspProc, Label, Term};

pub use ccs::{ccs_step, ccstau_step};
pub use csp::cspmn_step;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("event `{0}` cannot appear in a synchronisation interface")]
    UnsynchronisableEvent(Label),
    #[error("multiplicity {1} on `{0}` is below 2")]
    MultiplicityTooSmall(Label, u32),
    #[error("clause `{event}#{m}` governs only {arity} components")]
    MultiplicityExceedsArity { event: Label, m: u32, arity: usize },
}

/// Limits for LTS exploration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationBudget {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for ExplorationBudget {
    fn default() -> Self {
        ExplorationBudget { max_states: 10_000, max_depth: 64 }
    }
}

impl ExplorationBudget {
    pub fn new(max_states: usize, max_depth: usize) -> Self {
        ExplorationBudget { max_states: max_states.max(1), max_depth: max_depth.max(1) }
    }
}

/// A transition system's step function.
pub trait Semantics {
    type Proc: Term;
    fn step(&self, p: &Self::Proc) -> Result<Vec<(Label, Self::Proc)>, SemanticsError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Ccs;

#[derive(Debug, Clone, Copy, Default)]
pub struct CcsTau;

#[derive(Debug, Clone, Copy, Default)]
pub struct CspMn {
    pub strict_premise: bool,
}

impl Semantics for Ccs {
    type Proc = CcsProc;
    fn step(&self, p: &CcsProc) -> Result<Vec<(Label, CcsProc)>, SemanticsError> {
        Ok(ccs_step(p))
    }
}

impl Semantics for CcsTau {
    type Proc = CcsProc;
    fn step(&self, p: &CcsProc) -> Result<Vec<(Label, CcsProc)>, SemanticsError> {
        Ok(ccstau_step(p))
    }
}

impl Semantics for CspMn {
    type Proc = CspProc;
    fn step(&self, p: &CspProc) -> Result<Vec<(Label, CspProc)>, SemanticsError> {
        cspmn_step(p, self.strict_premise)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub source: usize,
    pub label: Label,
    pub target: usize,
}

/// A finite labelled transition system. States are indices into `states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts<P> {
    pub initial: usize,
    pub states: Vec<P>,
    pub transitions: Vec<Transition>,
    /// False when exploration stopped at a budget limit.
    pub complete: bool,
}

impl<P> Lts<P> {
    pub fn successors(&self, s: usize) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.source == s)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }
}

/// Stable id of a term: a prefix of the SHA-256 of its printed canonical form.
pub fn state_id<P: Term>(p: &P) -> String {
    let digest = Sha256::digest(p.canonicalise().to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Breadth-first closure of `sem` from `canonicalise(p)`.
pub fn build_lts<S: Semantics>(
    p: &S::Proc,
    sem: &S,
    budget: ExplorationBudget,
) -> Result<Lts<S::Proc>, SemanticsError> {
    let start = p.canonicalise();
    let mut index: HashMap<S::Proc, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    let mut depth = vec![0usize];
    index.insert(start, 0);
    let mut transitions = Vec::new();
    let mut complete = true;
    let mut queue = VecDeque::from([0usize]);

    while let Some(s) = queue.pop_front() {
        let succ = sem.step(&states[s])?;
        if succ.is_empty() {
            continue;
        }
        if depth[s] >= budget.max_depth {
            complete = false;
            continue;
        }
        for (label, q) in succ {
            let q = q.canonicalise();
            let t = match index.get(&q) {
                Some(&t) => t,
                None => {
                    if states.len() >= budget.max_states {
                        complete = false;
                        continue;
                    }
                    let t = states.len();
                    index.insert(q.clone(), t);
                    states.push(q);
                    depth.push(depth[s] + 1);
                    queue.push_back(t);
                    t
                }
            };
            transitions.push(Transition { source: s, label, target: t });
        }
    }
    transitions.sort();
    transitions.dedup();
    Ok(Lts { initial: 0, states, transitions, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_ccs;

    #[test]
    fn prefix_lts() {
        let l = build_lts(&parse_ccs("a.0").unwrap(), &Ccs, ExplorationBudget::default()).unwrap();
        assert_eq!((l.states.len(), l.transitions.len(), l.complete), (2, 1, true));
    }

    #[test]
    fn self_loop() {
        let l = build_lts(&parse_ccs("rec X. a.X").unwrap(), &Ccs, ExplorationBudget::default()).unwrap();
        assert_eq!((l.states.len(), l.transitions.len(), l.complete), (1, 1, true));
    }

    #[test]
    fn spawning_term_is_cut_off() {
        let p = parse_ccs("rec X. (a.0 | 'a.X)").unwrap();
        let l = build_lts(&p, &Ccs, ExplorationBudget::new(50, 64)).unwrap();
        assert!(!l.complete);
        assert_eq!(l.states.len(), 50);
    }
}
