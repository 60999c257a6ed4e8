//! Dependency graphs of traces, rendered as DOT or JSON.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::execution::{EventKind, Trace};
use crate::frontend::IMPLICIT_ACTIONS;
use crate::property::{atom_patterns, is_relevant, Formula};
use crate::term::Term;
use crate::theory::{Fact, Reserved};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Rule,
    Fresh,
    AdvReceive,
    AdvConstruct,
    AdvSend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    FactFlow,
    PersistentOrKnowledge,
    OutToAdversary,
    Temporal,
}

impl EdgeKind {
    pub fn dot_attrs(self) -> &'static str {
        match self {
            EdgeKind::FactFlow => "color=black",
            EdgeKind::PersistentOrKnowledge => "color=gray50",
            EdgeKind::OutToAdversary => "color=red",
            EdgeKind::Temporal => "style=dashed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    /// The event's timepoint.
    pub id: usize,
    pub kind: NodeKind,
    /// Rule name, or the term for adversary and fresh nodes.
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conclusions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from_slot: Option<usize>,
    pub to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_slot: Option<usize>,
    #[serde(rename = "type")]
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("event #{0} consumes `{1}` but no earlier event produced it")]
    MissingProducer(usize, String),
}

impl DepGraph {
    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn count_nodes(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    pub fn node(&self, id: usize) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

/// Build the dependency graph of a trace. With a formula, consecutive events
/// carrying facts relevant to it are linked by temporal edges when the
/// formula constrains event order.
pub fn build_graph(trace: &Trace, formula: Option<&Formula>) -> Result<DepGraph, GraphError> {
    let mut g = DepGraph::default();
    // linear facts waiting to be consumed, oldest producer first
    let mut linear: BTreeMap<Fact, VecDeque<(usize, usize)>> = BTreeMap::new();
    let mut persistent: BTreeMap<Fact, (usize, usize)> = BTreeMap::new();
    // where each known term became available to the adversary
    let mut knowledge: BTreeMap<Term, usize> = BTreeMap::new();
    // sends not yet consumed by an In premise
    let mut sends: BTreeMap<Term, VecDeque<usize>> = BTreeMap::new();
    let mut last_outputs: Vec<(usize, usize, Term)> = Vec::new();

    for e in &trace.events {
        let id = e.timepoint;
        match &e.kind {
            EventKind::Fresh { name } => {
                let fr = Fact::new("Fr", vec![name.clone()]);
                linear.entry(fr.clone()).or_default().push_back((id, 0));
                g.nodes.push(Node {
                    id,
                    kind: NodeKind::Fresh,
                    label: name.to_string(),
                    premises: Vec::new(),
                    actions: Vec::new(),
                    conclusions: vec![fr.to_string()],
                });
            }
            EventKind::AdvConstruct { term } => {
                if let Term::App(_, args) = term {
                    for a in args {
                        if let Some(&src) = knowledge.get(a) {
                            g.edges.push(edge(src, None, id, None, EdgeKind::PersistentOrKnowledge));
                        }
                    }
                }
                knowledge.entry(term.clone()).or_insert(id);
                g.nodes.push(adv_node(id, NodeKind::AdvConstruct, format!("!KU( {term} )")));
            }
            EventKind::AdvSend { term } => {
                if let Some(&src) = knowledge.get(term) {
                    g.edges.push(edge(src, None, id, None, EdgeKind::PersistentOrKnowledge));
                }
                sends.entry(term.clone()).or_default().push_back(id);
                g.nodes.push(adv_node(id, NodeKind::AdvSend, "isend".to_string()));
            }
            EventKind::AdvReceive { term } => {
                // the capture comes from the Out conclusion of the rule just fired
                if let Some((src, slot, _)) = last_outputs.iter().find(|(_, _, t)| t == term) {
                    g.edges.push(edge(*src, Some(*slot), id, None, EdgeKind::OutToAdversary));
                }
                for a in &e.actions {
                    knowledge.entry(a.args[0].clone()).or_insert(id);
                }
                g.nodes.push(adv_node(id, NodeKind::AdvReceive, term.to_string()));
            }
            EventKind::Rule { rule, premises, conclusions, .. } => {
                for (slot, p) in premises.iter().enumerate() {
                    match p.reserved() {
                        Some(Reserved::In) => {
                            let src = sends
                                .get_mut(&p.args[0])
                                .and_then(|q| q.pop_front())
                                .ok_or_else(|| GraphError::MissingProducer(id, p.to_string()))?;
                            g.edges.push(edge(src, None, id, Some(slot), EdgeKind::FactFlow));
                        }
                        _ if p.persistent => {
                            let &(src, s) =
                                persistent.get(p).ok_or_else(|| GraphError::MissingProducer(id, p.to_string()))?;
                            g.edges.push(edge(src, Some(s), id, Some(slot), EdgeKind::PersistentOrKnowledge));
                        }
                        _ => {
                            let (src, s) = linear
                                .get_mut(p)
                                .and_then(|q| q.pop_front())
                                .ok_or_else(|| GraphError::MissingProducer(id, p.to_string()))?;
                            g.edges.push(edge(src, Some(s), id, Some(slot), EdgeKind::FactFlow));
                        }
                    }
                }
                last_outputs.clear();
                for (slot, c) in conclusions.iter().enumerate() {
                    match c.reserved() {
                        Some(Reserved::Out) => last_outputs.push((id, slot, c.args[0].clone())),
                        _ if c.persistent => {
                            persistent.entry(c.clone()).or_insert((id, slot));
                        }
                        _ => linear.entry(c.clone()).or_default().push_back((id, slot)),
                    }
                }
                g.nodes.push(Node {
                    id,
                    kind: NodeKind::Rule,
                    label: rule.to_string(),
                    premises: premises.iter().map(|f| f.to_string()).collect(),
                    actions: e
                        .actions
                        .iter()
                        .filter(|a| !IMPLICIT_ACTIONS.contains(&&*a.name))
                        .map(|f| f.to_string())
                        .collect(),
                    conclusions: conclusions.iter().map(|f| f.to_string()).collect(),
                });
            }
        }
    }

    if let Some(f) = formula.filter(|f| f.uses_order()) {
        let patterns = atom_patterns(f);
        let relevant: Vec<usize> = trace
            .events
            .iter()
            .filter(|e| e.actions.iter().any(|a| is_relevant(&patterns, a)))
            .map(|e| e.timepoint)
            .collect();
        for w in relevant.windows(2) {
            g.edges.push(edge(w[0], None, w[1], None, EdgeKind::Temporal));
        }
    }
    Ok(g)
}

fn edge(from: usize, from_slot: Option<usize>, to: usize, to_slot: Option<usize>, kind: EdgeKind) -> Edge {
    Edge { from, from_slot, to, to_slot, kind }
}

fn adv_node(id: usize, kind: NodeKind, label: String) -> Node {
    Node { id, kind, label, premises: Vec::new(), actions: Vec::new(), conclusions: Vec::new() }
}

const GREENS: [&str; 6] = ["#e0f3db", "#ccebc5", "#a8ddb5", "#c7e9c0", "#a1d99b", "#d9f0a3"];

/// Stable shade for a rule name (FNV-1a).
pub fn rule_color(name: &str) -> &'static str {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    GREENS[(h % GREENS.len() as u64) as usize]
}

fn escape_record(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if matches!(c, '{' | '}' | '|' | '<' | '>' | '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn escape_string(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn ports(prefix: char, items: &[String]) -> String {
    if items.is_empty() {
        return "{ }".to_string();
    }
    let fields: Vec<String> =
        items.iter().enumerate().map(|(i, s)| format!("<{prefix}{i}> {}", escape_record(s))).collect();
    format!("{{ {} }}", fields.join(" | "))
}

/// Render as Graphviz DOT. Output depends only on the graph.
pub fn emit_dot(g: &DepGraph, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{}\" {{", escape_string(name));
    s.push_str("  rankdir=TB;\n");
    s.push_str("  node [fontname=\"Helvetica\", fontsize=10];\n");
    s.push_str("  edge [fontname=\"Helvetica\", fontsize=9];\n");
    for n in &g.nodes {
        let attrs = match n.kind {
            NodeKind::Rule => {
                let title = format!("#{} : {}[{}]", n.id, n.label, n.actions.join(", "));
                format!(
                    "shape=record, style=filled, fillcolor=\"{}\", label=\"{{ {} | {} | {} }}\"",
                    rule_color(&n.label),
                    ports('p', &n.premises),
                    escape_record(&title),
                    ports('c', &n.conclusions)
                )
            }
            NodeKind::Fresh => format!(
                "shape=record, label=\"{{ {} | {} }}\"",
                escape_record(&format!("#{} : Fresh", n.id)),
                ports('c', &n.conclusions)
            ),
            NodeKind::AdvConstruct => {
                format!("shape=ellipse, color=gray50, fontcolor=gray50, label=\"{}\"", escape_string(&n.label))
            }
            NodeKind::AdvReceive | NodeKind::AdvSend => {
                format!("shape=ellipse, color=black, label=\"{}\"", escape_string(&n.label))
            }
        };
        let _ = writeln!(s, "  n{} [{attrs}];", n.id);
    }
    for e in &g.edges {
        let end = |id: usize, slot: Option<usize>, p: char| match slot {
            Some(k) => format!("n{id}:{p}{k}"),
            None => format!("n{id}"),
        };
        let _ = writeln!(s, "  {} -> {} [{}];", end(e.from, e.from_slot, 'c'), end(e.to, e.to_slot, 'p'), e.kind.dot_attrs());
    }
    s.push_str("}\n");
    s
}

pub fn emit_json(g: &DepGraph) -> String {
    serde_json::to_string(g).expect("graph serializes")
}

pub fn read_json(s: &str) -> Result<DepGraph, serde_json::Error> {
    serde_json::from_str(s)
}
