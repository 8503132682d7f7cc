//! Domain-erased access to the engine: a registry of attribute domains,
//! each able to load a graph and rules from JSON into a [`Workspace`].

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::io::{self, IoError};
use super::{
    apply_rewrite, attr_isomorphic, find_matches, rename_graph, transport_match, validate_host, validate_rule,
    verify_trace, AlgebraDomain, EngineError, Host, LambdaDomain, RewriteDomain, Rule, StepCheck, Strategy,
};
use crate::algebra::Signature;
use crate::graph::Elem;
use crate::morphism::EnumBound;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadStage {
    /// The input could not be read.
    Parse,
    /// The input was read but violates a structural invariant.
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadFailure {
    pub stage: LoadStage,
    pub messages: Vec<String>,
}

impl LoadFailure {
    fn parse(msg: impl Into<String>) -> Self {
        Self {
            stage: LoadStage::Parse,
            messages: vec![msg.into()],
        }
    }
}

impl From<IoError> for LoadFailure {
    fn from(e: IoError) -> Self {
        Self {
            stage: if e.is_validation() {
                LoadStage::Invalid
            } else {
                LoadStage::Parse
            },
            messages: vec![e.to_string()],
        }
    }
}

impl fmt::Display for LoadFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.messages.join("\n"))
    }
}

/// Oracle results for one applied step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub check: StepCheck,
    /// The step on a randomly renamed host gives an isomorphic result.
    pub renaming: bool,
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        self.check.ok() && self.renaming
    }

    pub fn to_json(&self) -> Value {
        let c = &self.check;
        json!({
            "ok": self.ok(),
            "fpbc": c.fpbc,
            "pushout": c.pushout.ok(),
            "pushout_cocones_checked": c.pushout.cocones_checked,
            "fiber_in_interface": c.fiber_in_interface,
            "match_strict": c.match_strict,
            "complement_strict": c.complement_strict,
            "cases": c.cases,
            "renaming": self.renaming,
        })
    }
}

#[derive(Clone, Debug)]
pub struct StepOutput {
    pub trace: Value,
    pub d: Value,
    pub h: Value,
    pub d_dot: String,
    pub h_dot: String,
    pub verify: Option<VerifyOutcome>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub traces: Vec<Value>,
    pub summary: Value,
    pub final_graph: Value,
    pub final_dot: String,
}

/// A host graph and rules over one attribute domain.
pub trait Workspace {
    fn domain(&self) -> &'static str;
    fn rule_names(&self) -> Vec<String>;
    /// Every validation problem of the host and the rules.
    fn validate(&self) -> Vec<String>;
    /// Matches of the named rule, or of every rule.
    fn matches(&self, rule: Option<&str>) -> Result<Vec<Value>, EngineError>;
    /// Applies the `index`th match of `rule`. With `verify`, runs the oracles
    /// and a renaming check driven by `seed`.
    fn apply(&self, rule: &str, index: usize, verify: bool, seed: u64) -> Result<StepOutput, EngineError>;
    fn run(&self, strategy: &dyn Strategy, max_steps: usize) -> Result<RunOutput, EngineError>;
    fn graph_json(&self) -> Value;
    fn graph_dot(&self, name: &str) -> String;
}

struct Loaded<D: RewriteDomain> {
    domain: D,
    host: Host<D>,
    rules: Vec<Rule<D>>,
}

fn load<D: RewriteDomain + 'static>(
    domain: D,
    graph: &Value,
    rules: &[&Value],
) -> Result<Box<dyn Workspace>, LoadFailure> {
    let host = io::read_host(&domain, graph)?;
    let mut parsed = Vec::new();
    let mut failures: Vec<IoError> = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        match io::read_rule(&domain, r, &format!("rules[{i}]")) {
            Ok(rule) => parsed.push(rule),
            Err(e) => failures.push(e),
        }
    }
    if !failures.is_empty() {
        let stage = if failures.iter().all(IoError::is_validation) {
            LoadStage::Invalid
        } else {
            LoadStage::Parse
        };
        return Err(LoadFailure {
            stage,
            messages: failures.iter().map(|e| e.to_string()).collect(),
        });
    }
    Ok(Box::new(Loaded {
        domain,
        host,
        rules: parsed,
    }))
}

impl<D: RewriteDomain> Loaded<D> {
    fn rule(&self, name: &str) -> Result<&Rule<D>, EngineError> {
        self.rules
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| EngineError::UnknownRule(name.to_string()))
    }

    fn renaming_check(
        &self,
        rule: &Rule<D>,
        m: &super::Match<D::Map>,
        h: &crate::attr::AttrGraph<D::Value>,
        seed: u64,
    ) -> Result<bool, EngineError> {
        let g = &self.host.graph;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes: Vec<usize> = (0..g.graph.node_count()).collect();
        let mut edges: Vec<usize> = (0..g.graph.edge_count()).collect();
        nodes.shuffle(&mut rng);
        edges.shuffle(&mut rng);
        let node_ix: BTreeMap<_, _> = g.graph.nodes().cloned().zip(nodes).collect();
        let edge_ix: BTreeMap<_, _> = g.graph.edges().map(|(e, _)| e.clone()).zip(edges).collect();
        let (renamed, iso) = rename_graph(g, |x| match x {
            Elem::Node(n) => format!("v{}", node_ix[n]),
            Elem::Edge(e) => format!("a{}", edge_ix[e]),
        });
        let moved = transport_match(m, &iso);
        let renamed = Host::<D> {
            object: self.host.object.clone(),
            graph: renamed,
        };
        let again = apply_rewrite(&self.domain, &renamed, rule, &moved)?;
        Ok(attr_isomorphic(again.h(), h).is_some())
    }
}

impl<D: RewriteDomain> Workspace for Loaded<D> {
    fn domain(&self) -> &'static str {
        self.domain.name()
    }

    fn rule_names(&self) -> Vec<String> {
        self.rules.iter().map(|r| r.name.clone()).collect()
    }

    fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(es) = validate_host(&self.domain, &self.host) {
            out.extend(es.into_iter().map(|e| format!("graph: {e}")));
        }
        for r in &self.rules {
            if let Err(es) = validate_rule(&self.domain, r) {
                out.extend(es.into_iter().map(|e| format!("rule {}: {e}", r.name)));
            }
        }
        out
    }

    fn matches(&self, rule: Option<&str>) -> Result<Vec<Value>, EngineError> {
        let selected: Vec<&Rule<D>> = match rule {
            Some(name) => vec![self.rule(name)?],
            None => self.rules.iter().collect(),
        };
        let mut out = Vec::new();
        for r in selected {
            for (i, m) in find_matches(&self.domain, &self.host, r)?.iter().enumerate() {
                out.push(io::match_to_json(&self.domain, &r.name, i, m));
            }
        }
        Ok(out)
    }

    fn apply(&self, rule: &str, index: usize, verify: bool, seed: u64) -> Result<StepOutput, EngineError> {
        let r = self.rule(rule)?;
        let ms = find_matches(&self.domain, &self.host, r)?;
        let m = ms
            .get(index)
            .ok_or(EngineError::IndexOutOfRange { index, count: ms.len() })?;
        let trace = apply_rewrite(&self.domain, &self.host, r, m)?;
        let verify = if verify {
            let check = verify_trace(&self.domain, r, &trace, EnumBound::oracle())?;
            let renaming = self.renaming_check(r, m, trace.h(), seed)?;
            Some(VerifyOutcome { check, renaming })
        } else {
            None
        };
        Ok(StepOutput {
            trace: io::trace_to_json(&self.domain, &trace),
            d: io::host_to_json(&self.domain, &self.host.object, trace.d()),
            h: io::host_to_json(&self.domain, &self.host.object, trace.h()),
            d_dot: io::to_dot("D", trace.d()),
            h_dot: io::to_dot("H", trace.h()),
            verify,
        })
    }

    fn run(&self, strategy: &dyn Strategy, max_steps: usize) -> Result<RunOutput, EngineError> {
        let (traces, summary) = super::run_strategy(&self.domain, &self.host, &self.rules, strategy, max_steps)?;
        let steps: Vec<Value> = traces
            .iter()
            .enumerate()
            .map(|(i, t)| {
                json!({
                    "step": i + 1,
                    "rule": t.rule,
                    "nodes": t.h().graph.node_count(),
                    "edges": t.h().graph.edge_count(),
                })
            })
            .collect();
        let last = traces.last().map(|t| t.h()).unwrap_or(&self.host.graph);
        Ok(RunOutput {
            traces: traces.iter().map(|t| io::trace_to_json(&self.domain, t)).collect(),
            summary: json!({
                "strategy": strategy.name(),
                "max_steps": max_steps,
                "steps": summary.steps,
                "exhausted": summary.exhausted,
                "initial": {
                    "nodes": self.host.graph.graph.node_count(),
                    "edges": self.host.graph.graph.edge_count(),
                },
                "trace": steps,
            }),
            final_graph: io::host_to_json(&self.domain, &self.host.object, last),
            final_dot: io::to_dot("H", last),
        })
    }

    fn graph_json(&self) -> Value {
        io::host_to_json(&self.domain, &self.host.object, &self.host.graph)
    }

    fn graph_dot(&self, name: &str) -> String {
        io::to_dot(name, &self.host.graph)
    }
}

/// Loads inputs for one attribute domain.
pub trait DomainDriver: Send + Sync {
    fn name(&self) -> &'static str;
    fn open(&self, graph: &Value, rules: &[&Value]) -> Result<Box<dyn Workspace>, LoadFailure>;
}

struct LambdaDriver;

impl DomainDriver for LambdaDriver {
    fn name(&self) -> &'static str {
        "lambda"
    }

    fn open(&self, graph: &Value, rules: &[&Value]) -> Result<Box<dyn Workspace>, LoadFailure> {
        load(LambdaDomain::default(), graph, rules)
    }
}

struct AlgebraDriver;

/// Reads `{"name": ..., "args": [...], "result": ...}` declarations from the
/// `constructors` field of every attribute object.
fn extend_signature(sig: &mut Signature, docs: &[&Value]) -> Result<(), LoadFailure> {
    let mut seen: BTreeMap<String, (Vec<String>, String)> = BTreeMap::new();
    for doc in docs {
        let Some(cs) = doc.get("attr_object").and_then(|o| o.get("constructors")) else {
            continue;
        };
        let cs = cs
            .as_array()
            .ok_or_else(|| LoadFailure::parse("constructors must be an array"))?;
        for c in cs {
            let name = c
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| LoadFailure::parse("constructor without a name"))?;
            let args: Vec<String> = match c.get("args") {
                None => Vec::new(),
                Some(a) => a
                    .as_array()
                    .and_then(|a| a.iter().map(|s| s.as_str().map(str::to_string)).collect())
                    .ok_or_else(|| LoadFailure::parse(format!("constructor {name}: args must be sort names")))?,
            };
            let result = c
                .get("result")
                .and_then(Value::as_str)
                .ok_or_else(|| LoadFailure::parse(format!("constructor {name}: missing result sort")))?
                .to_string();
            match seen.get(name) {
                Some(prev) if *prev == (args.clone(), result.clone()) => continue,
                Some(_) => {
                    return Err(LoadFailure::parse(format!(
                        "constructor {name} declared twice differently"
                    )))
                }
                None => {}
            }
            let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
            sig.add_constructor(name, &arg_refs, &result)
                .map_err(|e| LoadFailure::parse(e.to_string()))?;
            seen.insert(name.to_string(), (args, result));
        }
    }
    Ok(())
}

impl DomainDriver for AlgebraDriver {
    fn name(&self) -> &'static str {
        "algebra"
    }

    fn open(&self, graph: &Value, rules: &[&Value]) -> Result<Box<dyn Workspace>, LoadFailure> {
        let mut sig = Signature::cloud();
        let docs: Vec<&Value> = std::iter::once(graph).chain(rules.iter().copied()).collect();
        extend_signature(&mut sig, &docs)?;
        load(AlgebraDomain::new(sig), graph, rules)
    }
}

/// Attribute domains by name.
pub struct DomainRegistry {
    drivers: BTreeMap<&'static str, Box<dyn DomainDriver>>,
}

impl DomainRegistry {
    pub fn empty() -> Self {
        Self {
            drivers: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(LambdaDriver));
        reg.register(Box::new(AlgebraDriver));
        reg
    }

    pub fn register(&mut self, d: Box<dyn DomainDriver>) {
        self.drivers.insert(d.name(), d);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.drivers.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn DomainDriver> {
        self.drivers.get(name).map(|d| d.as_ref())
    }

    /// Picks the domain named by the documents, which must agree, and loads
    /// them. `rules` is the parsed rules file.
    pub fn open(&self, graph: &Value, rules: Option<&Value>) -> Result<Box<dyn Workspace>, LoadFailure> {
        let rule_docs = match rules {
            Some(r) => io::rule_documents(r)?,
            None => Vec::new(),
        };
        let mut named: Vec<&str> = Vec::new();
        for doc in std::iter::once(graph).chain(rule_docs.iter().copied()) {
            if let Some(n) = io::domain_name(doc) {
                if !named.contains(&n) {
                    named.push(n);
                }
            }
        }
        let name = match named.as_slice() {
            [] => return Err(LoadFailure::parse("no document names its attribute domain")),
            [one] => *one,
            many => {
                return Err(LoadFailure::parse(format!(
                    "documents name different domains: {}",
                    many.join(", ")
                )))
            }
        };
        let driver = self
            .get(name)
            .ok_or_else(|| LoadFailure::parse(format!("unknown domain {name}; known: {}", self.names().join(", "))))?;
        driver.open(graph, &rule_docs)
    }
}
