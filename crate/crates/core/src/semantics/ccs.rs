use std::collections::BTreeSet;

use crate::syntax::{complement_closure, CcsProc, Label};

/// One-step transitions of a CCS or CCSTau term.
///
/// `|` synchronises complementary actions into `τ`, `|_T` into the visible
/// `τ[a|'a]`. Restriction always lets `τ` and `τ[a|'a]` through; `\_T`
/// turns the listed labels into `τ`.
pub fn ccs_step(p: &CcsProc) -> Vec<(Label, CcsProc)> {
    let mut out = BTreeSet::new();
    step_into(p, &mut out);
    out.into_iter().collect()
}

/// Same rules as [`ccs_step`]; the two calculi share one AST.
pub fn ccstau_step(p: &CcsProc) -> Vec<(Label, CcsProc)> {
    ccs_step(p)
}

fn step_into(p: &CcsProc, out: &mut BTreeSet<(Label, CcsProc)>) {
    match p {
        CcsProc::Nil | CcsProc::Var(_) => {}
        CcsProc::Prefix(l, q) => {
            out.insert((l.clone(), (**q).clone()));
        }
        CcsProc::Sum(a, b) => {
            step_into(a, out);
            step_into(b, out);
        }
        CcsProc::Par(a, b) | CcsProc::TPar(a, b) => {
            let timed = matches!(p, CcsProc::TPar(..));
            let rebuild = |x: CcsProc, y: CcsProc| if timed { CcsProc::tpar(x, y) } else { CcsProc::par(x, y) };
            let left = ccs_step(a);
            let right = ccs_step(b);
            for (l, a2) in &left {
                out.insert((l.clone(), rebuild(a2.clone(), (**b).clone())));
            }
            for (l, b2) in &right {
                out.insert((l.clone(), rebuild((**a).clone(), b2.clone())));
            }
            for (l, a2) in &left {
                let Ok(co) = l.complement() else { continue };
                for (r, b2) in &right {
                    if *r == co {
                        let sync = if timed {
                            Label::TauPair(l.base().expect("complementable labels have a base").clone())
                        } else {
                            Label::Tau
                        };
                        out.insert((sync, rebuild(a2.clone(), b2.clone())));
                    }
                }
            }
        }
        CcsProc::Restrict(q, set) => {
            let blocked = complement_closure(set);
            for (l, q2) in ccs_step(q) {
                if matches!(l, Label::Tau | Label::TauPair(_)) || !blocked.contains(&l) {
                    out.insert((l, CcsProc::Restrict(Box::new(q2), set.clone())));
                }
            }
        }
        CcsProc::THide(q, set) => {
            let hidden = complement_closure(set);
            for (l, q2) in ccs_step(q) {
                let l = if hidden.contains(&l) { Label::Tau } else { l };
                out.insert((l, CcsProc::THide(Box::new(q2), set.clone())));
            }
        }
        CcsProc::Rec(..) => step_into(&p.unfold(), out),
    }
}
