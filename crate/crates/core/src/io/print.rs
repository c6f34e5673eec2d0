use std::collections::BTreeSet;

use crate::syntax::{CcsProc, CspProc, Interface, Label, Multiplicity};

pub(crate) fn label_set(set: &BTreeSet<Label>) -> String {
    let parts: Vec<String> = set.iter().map(Label::to_source).collect();
    format!("{{{}}}", parts.join(", "))
}

pub(crate) fn interface(iface: &Interface) -> String {
    let parts: Vec<String> = iface
        .iter()
        .map(|(e, m)| match m {
            Multiplicity::Default => e.to_source(),
            Multiplicity::Explicit(k) => format!("{}#{k}", e.to_source()),
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn wrap(s: (String, i8), min: i8) -> String {
    if s.1 < min {
        format!("({})", s.0)
    } else {
        s.0
    }
}

// Levels: rec -1, par 0, sum 1, prefix 2, restriction 3, atom 4.
fn ccs(p: &CcsProc) -> (String, i8) {
    match p {
        CcsProc::Nil => ("0".into(), 4),
        CcsProc::Var(x) => (x.clone(), 4),
        CcsProc::Prefix(l, q) => (format!("{}.{}", l.to_source(), wrap(ccs(q), 2)), 2),
        CcsProc::Sum(a, b) => (format!("{} + {}", wrap(ccs(a), 1), wrap(ccs(b), 2)), 1),
        CcsProc::Par(a, b) => (format!("{} | {}", wrap(ccs(a), 0), wrap(ccs(b), 1)), 0),
        CcsProc::TPar(a, b) => (format!("{} |_T {}", wrap(ccs(a), 0), wrap(ccs(b), 1)), 0),
        CcsProc::Restrict(q, s) => (format!("{} \\ {}", wrap(ccs(q), 3), label_set(s)), 3),
        CcsProc::THide(q, s) => (format!("{} \\_T {}", wrap(ccs(q), 3), label_set(s)), 3),
        CcsProc::Rec(x, body) => (format!("rec {x}. {}", ccs(body).0), -1),
    }
}

// Levels: rec -1, par 0, |~| 1, [] 2, prefix 3, postfix 4, atom 5.
fn csp(p: &CspProc) -> (String, i8) {
    match p {
        CspProc::Stop => ("STOP".into(), 5),
        CspProc::Skip => ("SKIP".into(), 5),
        CspProc::Var(x) => (x.clone(), 5),
        CspProc::Prefix(l, q) => (format!("{} -> {}", l.to_source(), wrap(csp(q), 3)), 3),
        CspProc::ExtChoice(a, b) => (format!("{} [] {}", wrap(csp(a), 2), wrap(csp(b), 3)), 2),
        CspProc::IntChoice(a, b) => (format!("{} |~| {}", wrap(csp(a), 1), wrap(csp(b), 2)), 1),
        CspProc::Par(a, b, i) => (format!("{} [| {} |] {}", wrap(csp(a), 0), interface(i), wrap(csp(b), 1)), 0),
        CspProc::Hide(q, s) => (format!("{} \\ {}", wrap(csp(q), 4), label_set(s)), 4),
        CspProc::Restrict(q, s) => (format!("{} |> {}", wrap(csp(q), 4), label_set(s)), 4),
        CspProc::Rename(q, m) => {
            let pairs: Vec<String> = m
                .iter()
                .flat_map(|(from, tos)| tos.iter().map(move |to| format!("{} <- {}", from.to_source(), to.to_source())))
                .collect();
            (format!("{} [[{}]]", wrap(csp(q), 4), pairs.join(", ")), 4)
        }
        CspProc::Rec(x, body) => (format!("rec {x}. {}", csp(body).0), -1),
    }
}

pub fn print_ccs(p: &CcsProc) -> String {
    ccs(p).0
}

pub fn print_csp(p: &CspProc) -> String {
    csp(p).0
}
