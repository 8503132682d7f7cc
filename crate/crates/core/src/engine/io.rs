//! JSON reading and writing of graphs, rules, matches and traces; DOT export.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{Host, Match, RewriteDomain, RewriteTrace, Rule, Side};
use crate::attr::AttrGraph;
use crate::graph::{validate_graph, EdgeId, Elem, Graph, GraphError, NodeId};
use crate::morphism::{GraphMorphism, MorphismError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("malformed input at {path}: {msg}")]
    Shape { path: String, msg: String },
    #[error("attribute of {elem} at {path}: {msg}")]
    Attribute { path: String, elem: Elem, msg: String },
    #[error("attribute object at {path}: {msg}")]
    Object { path: String, msg: String },
    #[error("{path}: invalid graph: {}", join(.errors))]
    Graph { path: String, errors: Vec<GraphError> },
    #[error("{path}: invalid morphism: {}", join(.errors))]
    Morphism { path: String, errors: Vec<MorphismError> },
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl IoError {
    /// Structural problems of well-formed input, as opposed to input that
    /// could not be read at all.
    pub fn is_validation(&self) -> bool {
        matches!(self, IoError::Graph { .. } | IoError::Morphism { .. })
    }
}

fn shape(path: &str, msg: impl Into<String>) -> IoError {
    IoError::Shape {
        path: path.to_string(),
        msg: msg.into(),
    }
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, IoError> {
    v.get(key).ok_or_else(|| shape(path, format!("missing field {key:?}")))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str, IoError> {
    v.as_str().ok_or_else(|| shape(path, "expected a string"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| shape(path, "expected an array"))
}

/// The `domain` field of a graph or rule document, if present.
pub fn domain_name(v: &Value) -> Option<&str> {
    v.get("domain").and_then(Value::as_str)
}

pub fn read_graph<D: RewriteDomain>(
    domain: &D,
    obj: &D::Object,
    v: &Value,
    path: &str,
) -> Result<AttrGraph<D::Value>, IoError> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut raw_attrs = Vec::new();
    for (i, n) in array(field(v, "nodes", path)?, path)?.iter().enumerate() {
        let p = format!("{path}.nodes[{i}]");
        let (id, attr) = match n {
            Value::String(s) => (s.as_str(), None),
            Value::Object(o) => (
                string(o.get("id").ok_or_else(|| shape(&p, "missing field \"id\""))?, &p)?,
                o.get("attr").filter(|a| !a.is_null()),
            ),
            _ => return Err(shape(&p, "expected a node id or object")),
        };
        nodes.push(NodeId::new(id));
        if let Some(a) = attr {
            raw_attrs.push((p, Elem::Node(NodeId::new(id)), a));
        }
    }
    if let Some(es) = v.get("edges") {
        for (i, e) in array(es, path)?.iter().enumerate() {
            let p = format!("{path}.edges[{i}]");
            let id = string(field(e, "id", &p)?, &p)?;
            let src = string(field(e, "src", &p)?, &p)?;
            let tgt = string(field(e, "tgt", &p)?, &p)?;
            edges.push((EdgeId::new(id), NodeId::new(src), NodeId::new(tgt)));
            if let Some(a) = e.get("attr").filter(|a| !a.is_null()) {
                raw_attrs.push((p, Elem::Edge(EdgeId::new(id)), a));
            }
        }
    }
    let graph = validate_graph(nodes, edges).map_err(|errors| IoError::Graph {
        path: path.to_string(),
        errors,
    })?;
    let mut att = BTreeMap::new();
    for (p, elem, a) in raw_attrs {
        let value = domain.parse_value(obj, a).map_err(|msg| IoError::Attribute {
            path: p,
            elem: elem.clone(),
            msg,
        })?;
        att.insert(elem, value);
    }
    Ok(AttrGraph::new(Arc::new(graph), att).expect("attributes name elements of the graph"))
}

/// Reads a leg `K -> X`; elements without an entry map to the element of the
/// same name.
fn read_leg(v: Option<&Value>, k: &Arc<Graph>, x: &Arc<Graph>, path: &str) -> Result<GraphMorphism, IoError> {
    let mut nodes: BTreeMap<NodeId, NodeId> = k.nodes().map(|n| (n.clone(), n.clone())).collect();
    let mut edges: BTreeMap<EdgeId, EdgeId> = k.edges().map(|(e, _)| (e.clone(), e.clone())).collect();
    if let Some(v) = v.filter(|v| !v.is_null()) {
        for (key, target) in [("nodes", true), ("edges", false)] {
            let Some(m) = v.get(key) else { continue };
            let p = format!("{path}.{key}");
            let m = m.as_object().ok_or_else(|| shape(&p, "expected an object"))?;
            for (from, to) in m {
                let to = string(to, &format!("{p}.{from}"))?;
                if target {
                    nodes.insert(NodeId::new(from.as_str()), NodeId::new(to));
                } else {
                    edges.insert(EdgeId::new(from.as_str()), EdgeId::new(to));
                }
            }
        }
    }
    GraphMorphism::new(k.clone(), x.clone(), nodes, edges).map_err(|errors| IoError::Morphism {
        path: path.to_string(),
        errors,
    })
}

fn read_object<D: RewriteDomain>(domain: &D, v: &Value, path: &str) -> Result<D::Object, IoError> {
    domain
        .parse_object(v.get("attr_object"))
        .map_err(|msg| IoError::Object {
            path: format!("{path}.attr_object"),
            msg,
        })
}

pub fn read_host<D: RewriteDomain>(domain: &D, v: &Value) -> Result<Host<D>, IoError> {
    let object = read_object(domain, v, "graph")?;
    let graph = read_graph(domain, &object, v, "graph")?;
    Ok(Host { object, graph })
}

pub fn read_rule<D: RewriteDomain>(domain: &D, v: &Value, path: &str) -> Result<Rule<D>, IoError> {
    let object = read_object(domain, v, path)?;
    let name = match v.get("name") {
        Some(n) => string(n, &format!("{path}.name"))?.to_string(),
        None => path.to_string(),
    };
    let lhs = read_graph(domain, &object, field(v, "L", path)?, &format!("{path}.L"))?;
    let interface = read_graph(domain, &object, field(v, "K", path)?, &format!("{path}.K"))?;
    let rhs = read_graph(domain, &object, field(v, "R", path)?, &format!("{path}.R"))?;
    let l = read_leg(v.get("l"), &interface.graph, &lhs.graph, &format!("{path}.l"))?;
    let r = read_leg(v.get("r"), &interface.graph, &rhs.graph, &format!("{path}.r"))?;
    let mut guards = Vec::new();
    if let Some(gs) = v.get("guards") {
        for (i, g) in array(gs, &format!("{path}.guards"))?.iter().enumerate() {
            let p = format!("{path}.guards[{i}]");
            guards.push(domain.parse_value(&object, g).map_err(|msg| shape(&p, msg))?);
        }
    }
    Ok(Rule {
        name,
        object,
        lhs,
        interface,
        rhs,
        l,
        r,
        guards,
    })
}

/// The rule documents of a rules file: a single rule, an array of rules, or
/// `{"rules": [...]}`.
pub fn rule_documents(v: &Value) -> Result<Vec<&Value>, IoError> {
    match v {
        Value::Array(rs) => Ok(rs.iter().collect()),
        Value::Object(o) => match o.get("rules") {
            Some(rs) => Ok(array(rs, "rules")?.iter().collect()),
            None => Ok(vec![v]),
        },
        _ => Err(shape(
            "rules",
            "expected a rule, an array of rules or {\"rules\": [...]}",
        )),
    }
}

pub fn graph_to_json<D: RewriteDomain>(domain: &D, g: &AttrGraph<D::Value>) -> Value {
    let attr = |x: Elem| g.get(&x).map(|v| domain.value_to_json(v));
    let nodes: Vec<Value> = g
        .graph
        .nodes()
        .map(|n| {
            let mut o = Map::new();
            o.insert("id".into(), json!(n.as_str()));
            if let Some(a) = attr(Elem::Node(n.clone())) {
                o.insert("attr".into(), a);
            }
            Value::Object(o)
        })
        .collect();
    let edges: Vec<Value> = g
        .graph
        .edges()
        .map(|(e, edge)| {
            let mut o = Map::new();
            o.insert("id".into(), json!(e.as_str()));
            o.insert("src".into(), json!(edge.src.as_str()));
            o.insert("tgt".into(), json!(edge.tgt.as_str()));
            if let Some(a) = attr(Elem::Edge(e.clone())) {
                o.insert("attr".into(), a);
            }
            Value::Object(o)
        })
        .collect();
    json!({ "nodes": nodes, "edges": edges })
}

pub fn host_to_json<D: RewriteDomain>(domain: &D, object: &D::Object, g: &AttrGraph<D::Value>) -> Value {
    let mut out = Map::new();
    out.insert("domain".into(), json!(domain.name()));
    out.insert("attr_object".into(), domain.object_to_json(object));
    if let Value::Object(body) = graph_to_json(domain, g) {
        out.extend(body);
    }
    Value::Object(out)
}

pub fn morphism_to_json(m: &GraphMorphism) -> Value {
    let nodes: Map<String, Value> = m
        .node_map()
        .iter()
        .map(|(a, b)| (a.0.clone(), json!(b.as_str())))
        .collect();
    let edges: Map<String, Value> = m
        .edge_map()
        .iter()
        .map(|(a, b)| (a.0.clone(), json!(b.as_str())))
        .collect();
    json!({ "nodes": nodes, "edges": edges })
}

pub fn match_to_json<D: RewriteDomain>(domain: &D, rule: &str, index: usize, m: &Match<D::Map>) -> Value {
    let mut out = Map::new();
    out.insert("rule".into(), json!(rule));
    out.insert("index".into(), json!(index));
    if let Value::Object(body) = morphism_to_json(&m.morphism) {
        out.extend(body);
    }
    out.insert("attr".into(), domain.map_to_json(&m.attr));
    Value::Object(out)
}

pub fn trace_to_json<D: RewriteDomain>(domain: &D, t: &RewriteTrace<D>) -> Value {
    let cases: Map<String, Value> = t
        .cases
        .iter()
        .map(|(x, tag)| (x.to_string(), json!(tag.to_string())))
        .collect();
    let mut m = morphism_to_json(&t.matching.morphism);
    m["attr"] = domain.map_to_json(&t.matching.attr);
    json!({
        "rule": t.rule,
        "match": m,
        "D": graph_to_json(domain, t.d()),
        "H": graph_to_json(domain, t.h()),
        "cases": cases,
    })
}

pub fn rule_to_json<D: RewriteDomain>(domain: &D, rule: &Rule<D>) -> Value {
    json!({
        "name": rule.name,
        "domain": domain.name(),
        "attr_object": domain.object_to_json(&rule.object),
        "L": graph_to_json(domain, &rule.lhs),
        "K": graph_to_json(domain, &rule.interface),
        "R": graph_to_json(domain, &rule.rhs),
        "l": morphism_to_json(&rule.l),
        "r": morphism_to_json(&rule.r),
        "guards": rule.guards.iter().map(|g| domain.value_to_json(g)).collect::<Vec<_>>(),
    })
}

/// Which graph of a rule a side names, for messages.
pub fn side_graph<D: RewriteDomain>(rule: &Rule<D>, side: Side) -> &AttrGraph<D::Value> {
    match side {
        Side::Left => &rule.lhs,
        Side::Interface => &rule.interface,
        Side::Right => &rule.rhs,
    }
}

fn dot_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// Graphviz text: one statement per node and per edge, labelled `id:attr`
/// or `id:⊥`.
pub fn to_dot<V: std::fmt::Display>(name: &str, g: &AttrGraph<V>) -> String {
    let label = |id: &str, x: Elem| match g.get(&x) {
        Some(v) => format!("{id}:{v}"),
        None => format!("{id}:⊥"),
    };
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", dot_escape(name)).unwrap();
    for n in g.graph.nodes() {
        writeln!(
            out,
            "  \"{}\" [label=\"{}\"];",
            dot_escape(n.as_str()),
            dot_escape(&label(n.as_str(), Elem::Node(n.clone())))
        )
        .unwrap();
    }
    for (e, edge) in g.graph.edges() {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [id=\"{}\", label=\"{}\"];",
            dot_escape(edge.src.as_str()),
            dot_escape(edge.tgt.as_str()),
            dot_escape(e.as_str()),
            dot_escape(&label(e.as_str(), Elem::Edge(e.clone())))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
