//! Abstract syntax shared by the three calculi: names, the unified label
//! alphabet, synchronisation clauses, and the CCS / CSPmn term types.

mod ccs;
mod csp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ccs::{CcsProc, CcsTauProc};
pub use csp::{CspProc, RenamingMap};

/// Identifier of a recursion variable.
pub type VarId = String;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("invalid name `{0}`: {1}")]
    InvalidName(String, &'static str),
    #[error("label `{0}` has no complement")]
    NoComplement(Label),
    #[error("index sequence {0:?} must be non-empty and strictly increasing")]
    BadIndices(Vec<u32>),
    #[error("unbound variable `{0}`")]
    UnboundVariable(VarId),
    #[error("recursion on `{0}` is unguarded")]
    Unguarded(VarId),
    #[error("multiplicity {0} is below 2")]
    MultiplicityTooSmall(u32),
}

/// A base action name: a letter followed by letters, digits or underscores.
///
/// Suffixes used by synthesised labels (`_S`, a trailing `_` before an index
/// block) and the literal `tau` are rejected so printed labels reparse
/// unambiguously.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Name(String);

impl Name {
    pub fn new(text: impl Into<String>) -> Result<Self, SyntaxError> {
        let text = text.into();
        let mut chars = text.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return Err(SyntaxError::InvalidName(text, "must start with a letter")),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(SyntaxError::InvalidName(text, "only letters, digits and `_` allowed"));
        }
        if text.ends_with("_S") {
            return Err(SyntaxError::InvalidName(text, "the `_S` suffix is reserved"));
        }
        if text.ends_with('_') {
            return Err(SyntaxError::InvalidName(text, "a trailing `_` is reserved for indices"));
        }
        if matches!(text.as_str(), "tau" | "tick" | "rec" | "STOP" | "SKIP") {
            return Err(SyntaxError::InvalidName(text, "reserved word"));
        }
        Ok(Name(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Name {
    type Error = SyntaxError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Name::new(value)
    }
}

impl From<Name> for String {
    fn from(n: Name) -> String {
        n.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The unified action alphabet of CCS, CCSTau and CSPmn.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    /// The silent action.
    Tau,
    Name(Name),
    CoName(Name),
    /// `τ[a|ā]`, the visible synchronisation action of CCSTau.
    TauPair(Name),
    /// `a_S`, the synchronisation twin of `a`.
    SyncName(Name),
    CoSyncName(Name),
    /// `a_i`, `a_{i,j}`, `a_{i1..im}`.
    Indexed(Name, Vec<u32>),
    CoIndexed(Name, Vec<u32>),
    /// `a_S_{i..}`: an indexed synchronisation name, produced when CSPmn
    /// terms mentioning `a_S` are elaborated.
    SyncIndexed(Name, Vec<u32>),
    /// The visible CSP event `tau`; it never synchronises.
    TauEvent,
    Tick,
}

fn check_indices(idx: &[u32]) -> Result<(), SyntaxError> {
    if idx.is_empty() || idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SyntaxError::BadIndices(idx.to_vec()));
    }
    Ok(())
}

/// Polarity-and-kind of an indexable label, used to group indexed variants
/// of the same event.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum EventKind {
    Name,
    CoName,
    Sync,
}

impl Label {
    pub fn name(text: &str) -> Self {
        Label::Name(Name::new(text).expect("valid name"))
    }

    pub fn coname(text: &str) -> Self {
        Label::CoName(Name::new(text).expect("valid name"))
    }

    pub fn sync(text: &str) -> Self {
        Label::SyncName(Name::new(text).expect("valid name"))
    }

    pub fn indexed(base: Name, idx: Vec<u32>) -> Result<Self, SyntaxError> {
        check_indices(&idx)?;
        Ok(Label::Indexed(base, idx))
    }

    pub fn co_indexed(base: Name, idx: Vec<u32>) -> Result<Self, SyntaxError> {
        check_indices(&idx)?;
        Ok(Label::CoIndexed(base, idx))
    }

    /// Builds an indexed label of the given kind. Indices are sorted and
    /// deduplicated first.
    pub fn with_indices(kind: EventKind, base: Name, mut idx: Vec<u32>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        match kind {
            EventKind::Name => Label::Indexed(base, idx),
            EventKind::CoName => Label::CoIndexed(base, idx),
            EventKind::Sync => Label::SyncIndexed(base, idx),
        }
    }

    pub fn complement(&self) -> Result<Label, SyntaxError> {
        Ok(match self {
            Label::Name(n) => Label::CoName(n.clone()),
            Label::CoName(n) => Label::Name(n.clone()),
            Label::SyncName(n) => Label::CoSyncName(n.clone()),
            Label::CoSyncName(n) => Label::SyncName(n.clone()),
            Label::Indexed(n, i) => Label::CoIndexed(n.clone(), i.clone()),
            Label::CoIndexed(n, i) => Label::Indexed(n.clone(), i.clone()),
            other => return Err(SyntaxError::NoComplement(other.clone())),
        })
    }

    pub fn base(&self) -> Option<&Name> {
        match self {
            Label::Name(n)
            | Label::CoName(n)
            | Label::TauPair(n)
            | Label::SyncName(n)
            | Label::CoSyncName(n)
            | Label::Indexed(n, _)
            | Label::CoIndexed(n, _)
            | Label::SyncIndexed(n, _) => Some(n),
            Label::Tau | Label::TauEvent | Label::Tick => None,
        }
    }

    pub fn indices(&self) -> Option<&[u32]> {
        match self {
            Label::Indexed(_, i) | Label::CoIndexed(_, i) | Label::SyncIndexed(_, i) => Some(i),
            _ => None,
        }
    }

    /// Kind and base for labels that can be (or already are) indexed.
    pub fn event_kind(&self) -> Option<(EventKind, &Name)> {
        match self {
            Label::Name(n) | Label::Indexed(n, _) => Some((EventKind::Name, n)),
            Label::CoName(n) | Label::CoIndexed(n, _) => Some((EventKind::CoName, n)),
            Label::SyncName(n) | Label::SyncIndexed(n, _) => Some((EventKind::Sync, n)),
            _ => None,
        }
    }

    /// Drops any index block: `a_{1,2}` becomes `a`, `'a_{3}` becomes `'a`,
    /// `a_S_{1}` becomes `a_S`.
    pub fn erase_indices(&self) -> Label {
        match self {
            Label::Indexed(n, _) => Label::Name(n.clone()),
            Label::CoIndexed(n, _) => Label::CoName(n.clone()),
            Label::SyncIndexed(n, _) => Label::SyncName(n.clone()),
            other => other.clone(),
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    /// Source-syntax spelling. `Tau` and `TauEvent` both print as `tau`;
    /// which one is meant follows from the calculus being printed.
    pub fn to_source(&self) -> String {
        fn idx(i: &[u32]) -> String {
            let parts: Vec<String> = i.iter().map(|x| x.to_string()).collect();
            parts.join(",")
        }
        match self {
            Label::Tau | Label::TauEvent => "tau".into(),
            Label::Tick => "tick".into(),
            Label::Name(n) => n.to_string(),
            Label::CoName(n) => format!("'{n}"),
            Label::TauPair(n) => format!("tau[{n}|'{n}]"),
            Label::SyncName(n) => format!("{n}_S"),
            Label::CoSyncName(n) => format!("'{n}_S"),
            Label::Indexed(n, i) => format!("{n}_{{{}}}", idx(i)),
            Label::CoIndexed(n, i) => format!("'{n}_{{{}}}", idx(i)),
            Label::SyncIndexed(n, i) => format!("{n}_S_{{{}}}", idx(i)),
        }
    }
}

/// Display distinguishes the silent action (`τ`) from the CSP event `tau`;
/// it is the spelling used in LTS exports.
impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => f.write_str("τ"),
            Label::Tick => f.write_str("✓"),
            other => f.write_str(&other.to_source()),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Closes a label set under complement where complement is defined.
pub fn complement_closure(set: &BTreeSet<Label>) -> BTreeSet<Label> {
    let mut out = set.clone();
    for l in set {
        if let Ok(c) = l.complement() {
            out.insert(c);
        }
    }
    out
}

/// Restriction blocks a label together with its complement, so every
/// co-polarity member is written as its positive twin.
pub(crate) fn reduce_restriction(set: &BTreeSet<Label>) -> BTreeSet<Label> {
    set.iter()
        .map(|l| match l {
            Label::CoName(_) | Label::CoSyncName(_) | Label::CoIndexed(..) => {
                l.complement().unwrap_or_else(|_| l.clone())
            }
            _ => l.clone(),
        })
        .collect()
}

/// Drops restricted labels that a closed body can never perform, given the
/// body's labels; `None` when the body has free variables.
pub(crate) fn prune_restriction(set: BTreeSet<Label>, body: Option<BTreeSet<Label>>) -> BTreeSet<Label> {
    match body {
        Some(labels) => set
            .into_iter()
            .filter(|l| labels.contains(l) || l.complement().is_ok_and(|c| labels.contains(&c)))
            .collect(),
        None => set,
    }
}

/// Number of processes that must take part in a synchronisation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Multiplicity {
    /// Omitted `#m`: every component of the parallel composition.
    Default,
    Explicit(u32),
}

/// An interface event with its `#m` annotation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct SyncClause {
    pub event: Label,
    pub multiplicity: Multiplicity,
}

impl SyncClause {
    pub fn new(event: Label, multiplicity: Multiplicity) -> Result<Self, SyntaxError> {
        if let Multiplicity::Explicit(m) = multiplicity {
            if m < 2 {
                return Err(SyntaxError::MultiplicityTooSmall(m));
            }
        }
        Ok(SyncClause { event, multiplicity })
    }
}

/// The clause set of a parallel composition; one multiplicity per event.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug, Serialize, Deserialize)]
pub struct Interface(BTreeMap<Label, Multiplicity>);

impl Interface {
    pub fn new() -> Self {
        Interface(BTreeMap::new())
    }

    /// Interface where every event uses the default (all-party) multiplicity.
    pub fn plain<I: IntoIterator<Item = Label>>(events: I) -> Self {
        Interface(events.into_iter().map(|e| (e, Multiplicity::Default)).collect())
    }

    pub fn with_multiplicity<I: IntoIterator<Item = Label>>(events: I, m: u32) -> Self {
        Interface(events.into_iter().map(|e| (e, Multiplicity::Explicit(m))).collect())
    }

    pub fn insert(&mut self, clause: SyncClause) {
        self.0.insert(clause.event, clause.multiplicity);
    }

    pub fn get(&self, event: &Label) -> Option<Multiplicity> {
        self.0.get(event).copied()
    }

    pub fn contains(&self, event: &Label) -> bool {
        self.0.contains_key(event)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn events(&self) -> impl Iterator<Item = &Label> {
        self.0.keys()
    }

    pub fn clauses(&self) -> impl Iterator<Item = SyncClause> + '_ {
        self.0.iter().map(|(e, m)| SyncClause { event: e.clone(), multiplicity: *m })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Multiplicity)> {
        self.0.iter()
    }

    /// True when no clause carries an explicit multiplicity.
    pub fn is_plain(&self) -> bool {
        self.0.values().all(|m| *m == Multiplicity::Default)
    }

    pub fn map_multiplicities(&self, f: impl Fn(&Label, Multiplicity) -> Multiplicity) -> Self {
        Interface(self.0.iter().map(|(e, m)| (e.clone(), f(e, *m))).collect())
    }
}

impl FromIterator<SyncClause> for Interface {
    fn from_iter<T: IntoIterator<Item = SyncClause>>(iter: T) -> Self {
        Interface(iter.into_iter().map(|c| (c.event, c.multiplicity)).collect())
    }
}

/// Canonical name of the recursion variable bound at nesting level `level`.
pub(crate) fn level_var(level: usize) -> VarId {
    format!("X{level}")
}

/// Operations every term language provides.
pub trait Term: Clone + Ord + Eq + std::hash::Hash + fmt::Debug + fmt::Display {
    /// Deterministic normal form used as the LTS state key.
    fn canonicalise(&self) -> Self;
    /// Checks closedness and guardedness of recursion.
    fn well_formed(&self) -> Result<(), SyntaxError>;
}
