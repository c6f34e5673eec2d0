//! Random terms for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{CcsProc, CspProc, Interface, Label, Multiplicity, SyncClause};

#[derive(Debug, Clone)]
pub struct CcsShape {
    pub max_depth: usize,
    pub max_components: usize,
    pub names: Vec<String>,
    pub recursion: bool,
}

impl Default for CcsShape {
    fn default() -> Self {
        CcsShape { max_depth: 6, max_components: 4, names: vec!["a".into(), "b".into()], recursion: true }
    }
}

fn action<R: Rng>(rng: &mut R, names: &[String]) -> Label {
    let n = names.choose(rng).expect("at least one name");
    match rng.gen_range(0..7) {
        0 => Label::Tau,
        1..=3 => Label::name(n),
        _ => Label::coname(n),
    }
}

fn sequential<R: Rng>(rng: &mut R, shape: &CcsShape, depth: usize, bound: &mut Vec<String>, guarded: bool) -> CcsProc {
    if depth == 0 {
        return match bound.last() {
            Some(x) if guarded && rng.gen_bool(0.5) => CcsProc::var(x.clone()),
            _ => CcsProc::Nil,
        };
    }
    match rng.gen_range(0..10) {
        0 => CcsProc::Nil,
        1 if guarded && !bound.is_empty() => CcsProc::var(bound.choose(rng).expect("non-empty").clone()),
        2 | 3 => {
            let l = sequential(rng, shape, depth - 1, bound, guarded);
            CcsProc::sum(l, sequential(rng, shape, depth - 1, bound, guarded))
        }
        4 if shape.recursion && bound.len() < 2 => {
            let x = format!("X{}", bound.len());
            bound.push(x.clone());
            let l = action(rng, &shape.names);
            let body = CcsProc::prefix(l, sequential(rng, shape, depth - 1, bound, true));
            bound.pop();
            CcsProc::rec(x, body)
        }
        _ => CcsProc::prefix(action(rng, &shape.names), sequential(rng, shape, depth - 1, bound, true)),
    }
}

fn restricted<R: Rng>(rng: &mut R, names: &[String], p: CcsProc) -> CcsProc {
    if rng.gen_bool(0.25) {
        CcsProc::restrict(p, [Label::name(names.choose(rng).expect("at least one name"))])
    } else {
        p
    }
}

/// A parallel composition of at most `max_components` sequential terms,
/// with occasional restrictions. Recursion never encloses a parallel.
pub fn random_ccs<R: Rng>(rng: &mut R, shape: &CcsShape) -> CcsProc {
    let n = rng.gen_range(1..=shape.max_components.max(1));
    let depth = shape.max_depth.saturating_sub(n.div_ceil(2));
    let mut acc = sequential(rng, shape, depth, &mut Vec::new(), false);
    for _ in 1..n {
        let next = sequential(rng, shape, depth, &mut Vec::new(), false);
        let next = restricted(rng, &shape.names, next);
        acc = CcsProc::par(acc, next);
    }
    restricted(rng, &shape.names, acc)
}

fn csp_sequential<R: Rng>(rng: &mut R, names: &[String], depth: usize, rec: bool) -> CspProc {
    let event = |rng: &mut R| Label::name(names.choose(rng).expect("at least one name"));
    if depth == 0 {
        return if rng.gen_bool(0.8) { CspProc::Stop } else { CspProc::Skip };
    }
    match rng.gen_range(0..10) {
        0 => CspProc::Stop,
        1 => CspProc::ext(csp_sequential(rng, names, depth - 1, false), csp_sequential(rng, names, depth - 1, false)),
        2 => CspProc::int(csp_sequential(rng, names, depth - 1, false), csp_sequential(rng, names, depth - 1, false)),
        3 if rec => {
            let e = event(rng);
            let alt = csp_sequential(rng, names, depth - 1, false);
            CspProc::rec("X", CspProc::ext(CspProc::prefix(e, CspProc::var("X")), alt))
        }
        _ => {
            let e = event(rng);
            CspProc::prefix(e, csp_sequential(rng, names, depth - 1, rec))
        }
    }
}

/// A left-nested chain of `2..=max_components` sequential components with
/// the same interface at every node: each name is synchronised with the
/// default clause, an explicit `m` in `2..=arity`, or not at all.
pub fn random_cspmn<R: Rng>(rng: &mut R, names: &[String], max_components: usize, depth: usize) -> CspProc {
    let n = rng.gen_range(2..=max_components.max(2));
    let mut iface = Interface::new();
    for name in names {
        let multiplicity = match rng.gen_range(0..3) {
            0 => continue,
            1 => Multiplicity::Default,
            _ => Multiplicity::Explicit(rng.gen_range(2..=n as u32)),
        };
        iface.insert(SyncClause { event: Label::name(name), multiplicity });
    }
    let mut acc = csp_sequential(rng, names, depth, true);
    for _ in 1..n {
        acc = CspProc::par(acc, csp_sequential(rng, names, depth, true), iface.clone());
    }
    if rng.gen_bool(0.2) {
        acc = CspProc::hide(acc, [Label::name(names.choose(rng).expect("at least one name"))]);
    }
    acc
}

/// The same chain shape with default clauses only.
pub fn random_cspmn_default<R: Rng>(rng: &mut R, names: &[String], max_components: usize, depth: usize) -> CspProc {
    random_cspmn(rng, names, max_components, depth)
        .map_interfaces(&|i| i.map_multiplicities(|_, _| Multiplicity::Default))
}

/// `a -> STOP` composed `n` times under `a#m`.
pub fn nary_sync(n: usize, m: u32) -> CspProc {
    let leaf = || CspProc::prefix(Label::name("a"), CspProc::Stop);
    (1..n).fold(leaf(), |acc, _| CspProc::par(acc, leaf(), Interface::with_multiplicity([Label::name("a")], m)))
}
