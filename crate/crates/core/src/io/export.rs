use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::parse::parse_event;
use crate::semantics::{state_id, Lts, Transition};
use crate::syntax::{CspProc, Label, Multiplicity, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtsFormat {
    Dot,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("explicit multiplicity in `{0}`: elaborate with mn2csp first")]
    ExplicitMultiplicity(String),
    #[error("restriction has no CSPm counterpart: `{0}`")]
    Restriction(String),
    #[error("label `{label}` cannot be exported in `{term}`")]
    Label { label: String, term: String },
    #[error("malformed LTS JSON: {0}")]
    Json(String),
}

#[derive(Serialize, Deserialize)]
struct JsonState {
    id: String,
    term: String,
}

#[derive(Serialize, Deserialize)]
struct JsonLts {
    initial: String,
    complete: bool,
    states: Vec<JsonState>,
    transitions: Vec<(String, String, String)>,
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Serialises an LTS. State ids are hashes of the canonical terms.
pub fn export_lts<P: Term>(lts: &Lts<P>, format: LtsFormat) -> String {
    let ids: Vec<String> = lts.states.iter().map(state_id).collect();
    match format {
        LtsFormat::Dot => {
            let mut out = String::from("digraph lts {\n  __start [shape=point];\n");
            let _ = writeln!(out, "  __start -> \"{}\";", ids[lts.initial]);
            for (id, p) in ids.iter().zip(&lts.states) {
                let _ = writeln!(out, "  \"{id}\"; // {p}");
            }
            for t in &lts.transitions {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\"];",
                    ids[t.source],
                    ids[t.target],
                    dot_escape(&t.label.to_string())
                );
            }
            out.push_str("}\n");
            out
        }
        LtsFormat::Json => {
            let doc = JsonLts {
                initial: ids[lts.initial].clone(),
                complete: lts.complete,
                states: ids
                    .iter()
                    .zip(&lts.states)
                    .map(|(id, p)| JsonState { id: id.clone(), term: p.to_string() })
                    .collect(),
                transitions: lts
                    .transitions
                    .iter()
                    .map(|t| (ids[t.source].clone(), t.label.to_string(), ids[t.target].clone()))
                    .collect(),
            };
            serde_json::to_string_pretty(&doc).expect("LTS serialises")
        }
    }
}

fn label_from_export(text: &str) -> Result<Label, ExportError> {
    match text {
        "τ" => Ok(Label::Tau),
        "✓" => Ok(Label::Tick),
        other => parse_event(other).map_err(|e| ExportError::Json(e.to_string())),
    }
}

/// Reads back a JSON export. States are the printed terms.
pub fn import_lts_json(text: &str) -> Result<Lts<String>, ExportError> {
    let doc: JsonLts = serde_json::from_str(text).map_err(|e| ExportError::Json(e.to_string()))?;
    let pos = |id: &str| {
        doc.states.iter().position(|s| s.id == id).ok_or_else(|| ExportError::Json(format!("unknown state `{id}`")))
    };
    let mut transitions = Vec::new();
    for (s, l, t) in &doc.transitions {
        transitions.push(Transition { source: pos(s)?, label: label_from_export(l)?, target: pos(t)? });
    }
    Ok(Lts {
        initial: pos(&doc.initial)?,
        states: doc.states.iter().map(|s| s.term.clone()).collect(),
        transitions,
        complete: doc.complete,
    })
}

fn mangle_base(text: &str) -> String {
    text.replace('_', "__")
}

fn join_idx(idx: &[u32]) -> String {
    idx.iter().map(|i| format!("_{i}")).collect()
}

/// CSPm identifier of an event. Underscores in base names are doubled, so
/// the single-underscore suffixes below never collide.
fn mangle(l: &Label) -> Option<String> {
    Some(match l {
        Label::Name(n) => mangle_base(n.as_str()),
        Label::CoName(n) => format!("{}_bar", mangle_base(n.as_str())),
        Label::SyncName(n) => format!("{}_S", mangle_base(n.as_str())),
        Label::CoSyncName(n) => format!("{}_S_bar", mangle_base(n.as_str())),
        Label::Indexed(n, i) => format!("{}{}", mangle_base(n.as_str()), join_idx(i)),
        Label::CoIndexed(n, i) => format!("{}{}_bar", mangle_base(n.as_str()), join_idx(i)),
        Label::SyncIndexed(n, i) => format!("{}_S{}", mangle_base(n.as_str()), join_idx(i)),
        Label::TauEvent => "tau".into(),
        Label::Tau | Label::Tick | Label::TauPair(_) => return None,
    })
}

struct CspmWriter {
    equations: Vec<String>,
    events: BTreeSet<String>,
    next: usize,
}

impl CspmWriter {
    fn event(&mut self, l: &Label, term: &CspProc) -> Result<String, ExportError> {
        let m = mangle(l).ok_or_else(|| ExportError::Label { label: l.to_string(), term: term.to_string() })?;
        self.events.insert(m.clone());
        Ok(m)
    }

    fn set(&mut self, set: &BTreeSet<Label>, term: &CspProc) -> Result<String, ExportError> {
        let mut parts = Vec::new();
        for l in set {
            parts.push(self.event(l, term)?);
        }
        Ok(format!("{{{}}}", parts.join(", ")))
    }

    fn proc_(&mut self, p: &CspProc, vars: &mut Vec<(String, String)>) -> Result<String, ExportError> {
        Ok(match p {
            CspProc::Stop => "STOP".into(),
            CspProc::Skip => "SKIP".into(),
            CspProc::Var(x) => match vars.iter().rev().find(|(v, _)| v == x) {
                Some((_, name)) => name.clone(),
                None => x.clone(),
            },
            CspProc::Prefix(l, q) => {
                let e = self.event(l, p)?;
                format!("{e} -> {}", self.proc_(q, vars)?)
            }
            CspProc::ExtChoice(a, b) => format!("({} [] {})", self.proc_(a, vars)?, self.proc_(b, vars)?),
            CspProc::IntChoice(a, b) => format!("({} |~| {})", self.proc_(a, vars)?, self.proc_(b, vars)?),
            CspProc::Par(a, b, iface) => {
                if iface.iter().any(|(_, m)| *m != Multiplicity::Default) {
                    return Err(ExportError::ExplicitMultiplicity(p.to_string()));
                }
                let events: BTreeSet<Label> = iface.events().cloned().collect();
                let l = self.proc_(a, vars)?;
                let r = self.proc_(b, vars)?;
                if events.is_empty() {
                    format!("({l} ||| {r})")
                } else {
                    format!("({l} [| {} |] {r})", self.set(&events, p)?)
                }
            }
            CspProc::Hide(q, set) => {
                let inner = self.proc_(q, vars)?;
                format!("({inner} \\ {})", self.set(set, p)?)
            }
            CspProc::Rename(q, map) => {
                let inner = self.proc_(q, vars)?;
                let mut pairs = Vec::new();
                for (from, tos) in map {
                    for to in tos {
                        pairs.push(format!("{} <- {}", self.event(from, p)?, self.event(to, p)?));
                    }
                }
                format!("{inner}[[{}]]", pairs.join(", "))
            }
            CspProc::Restrict(..) => return Err(ExportError::Restriction(p.to_string())),
            CspProc::Rec(x, body) => {
                let name = format!("P{}", self.next);
                self.next += 1;
                vars.push((x.clone(), name.clone()));
                let rhs = self.proc_(body, vars);
                vars.pop();
                self.equations.push(format!("{name} = {}", rhs?));
                name
            }
        })
    }
}

/// Renders a plain CSP term as machine-readable CSPm with a `MAIN` process.
pub fn export_cspm(p: &CspProc) -> Result<String, ExportError> {
    let mut w = CspmWriter { equations: Vec::new(), events: BTreeSet::new(), next: 0 };
    let main = w.proc_(p, &mut Vec::new())?;
    let mut out = String::new();
    if !w.events.is_empty() {
        let names: Vec<&str> = w.events.iter().map(String::as_str).collect();
        let _ = writeln!(out, "channel {}", names.join(", "));
    }
    for eq in &w.equations {
        let _ = writeln!(out, "{eq}");
    }
    let _ = write!(out, "MAIN = {main}");
    Ok(out)
}
