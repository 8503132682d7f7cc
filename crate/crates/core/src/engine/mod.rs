//! Rules, matching and sesqui-pushout rewriting steps over an attribute
//! domain.

mod algebra_domain;
mod driver;
pub mod io;
mod lambda_domain;
mod strategy;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

use crate::attr::{
    check_attr_morphism, classify_elements, lift_fpbc, lift_pushout, match_fiber_in_interface, strictness_violations,
    AttrDomain, AttrGraph, AttrMap, AttrMorphism, CaseTag, CaseViolation, LiftError, LiftedFpbc, LiftedPushout,
    StepView,
};
use crate::categorical::{
    fpbc_graphs, pushout_graphs, verify_fpbc, verify_pushout_report, ConstructionError, FpbcSquare, PushoutReport,
    PushoutSquare,
};
use crate::graph::{EdgeId, Elem, Graph, NodeId};
use crate::morphism::{is_injective, EnumBound, EnumError, GraphMorphism, HomSearch};

pub use algebra_domain::{AlgObject, AlgebraDomain};
pub use driver::{
    DomainDriver, DomainRegistry, LoadFailure, LoadStage, RunOutput, StepOutput, VerifyOutcome, Workspace,
};
pub use lambda_domain::LambdaDomain;
pub use strategy::{
    run_strategy, AllMatchesSequential, FirstMatch, Fixpoint, RewriteSystem, RunSummary, Session, Strategy,
    StrategyRegistry,
};

/// The three graphs of a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Left,
    Interface,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "L",
            Side::Interface => "K",
            Side::Right => "R",
        })
    }
}

/// Outcome of matching one rule attribute against a host attribute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttrMatch {
    /// Consistent; the map may have been extended.
    Bound,
    Mismatch,
    /// Decidable only once every anchored variable is bound.
    Deferred,
}

/// An attribute domain usable by the engine.
pub trait RewriteDomain: AttrDomain + Send + Sync {
    /// The attribute object: what rule and host attributes are written over.
    type Object: Clone + Debug + PartialEq;

    fn name(&self) -> &'static str;

    fn parse_object(&self, json: Option<&Value>) -> Result<Self::Object, String>;
    fn object_to_json(&self, obj: &Self::Object) -> Value;
    fn parse_value(&self, obj: &Self::Object, json: &Value) -> Result<Self::Value, String>;
    fn value_to_json(&self, v: &Self::Value) -> Value;
    fn map_to_json(&self, map: &Self::Map) -> Value;

    /// A legal attribute of a host graph.
    fn check_host_value(&self, obj: &Self::Object, v: &Self::Value) -> Result<(), String>;
    /// A legal attribute of a rule graph.
    fn check_rule_value(&self, obj: &Self::Object, side: Side, v: &Self::Value) -> Result<(), String>;
    fn check_guard(&self, obj: &Self::Object, g: &Self::Value) -> Result<(), String>;

    fn vars(&self, v: &Self::Value) -> BTreeSet<String>;
    /// Variables determined by matching this left-hand attribute.
    fn anchored_vars(&self, v: &Self::Value) -> BTreeSet<String>;

    fn empty_map(&self) -> Self::Map;
    /// Matches a rule attribute written over `objs.0` against a host
    /// attribute written over `objs.1`.
    fn match_attr(
        &self,
        objs: (&Self::Object, &Self::Object),
        pattern: &Self::Value,
        value: &Self::Value,
        map: &mut Self::Map,
    ) -> Result<AttrMatch, String>;
    fn check_deferred(
        &self,
        objs: (&Self::Object, &Self::Object),
        pattern: &Self::Value,
        value: &Self::Value,
        map: &Self::Map,
    ) -> Result<bool, String>;
    fn guards_hold(&self, guards: &[Self::Value], map: &Self::Map) -> Result<bool, String>;
}

/// A span `L <-l- K -r-> R` of attributed graphs over one object.
#[derive(Debug)]
pub struct Rule<D: RewriteDomain> {
    pub name: String,
    pub object: D::Object,
    pub lhs: AttrGraph<D::Value>,
    pub interface: AttrGraph<D::Value>,
    pub rhs: AttrGraph<D::Value>,
    pub l: GraphMorphism,
    pub r: GraphMorphism,
    pub guards: Vec<D::Value>,
}

/// A host graph with its attribute object.
#[derive(Debug)]
pub struct Host<D: RewriteDomain> {
    pub object: D::Object,
    pub graph: AttrGraph<D::Value>,
}

impl<D: RewriteDomain> Clone for Host<D> {
    fn clone(&self) -> Self {
        Self {
            object: self.object.clone(),
            graph: self.graph.clone(),
        }
    }
}

impl<D: RewriteDomain> Clone for Rule<D> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            object: self.object.clone(),
            lhs: self.lhs.clone(),
            interface: self.interface.clone(),
            rhs: self.rhs.clone(),
            l: self.l.clone(),
            r: self.r.clone(),
            guards: self.guards.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Match<M> {
    pub morphism: GraphMorphism,
    pub attr: M,
}

#[derive(Debug)]
pub struct RewriteTrace<D: RewriteDomain> {
    pub rule: String,
    pub input: AttrGraph<D::Value>,
    pub matching: Match<D::Map>,
    pub complement: LiftedFpbc<D::Value, D::Map>,
    pub result: LiftedPushout<D::Value, D::Map>,
    pub cases: BTreeMap<Elem, CaseTag>,
}

impl<D: RewriteDomain> RewriteTrace<D> {
    pub fn d(&self) -> &AttrGraph<D::Value> {
        &self.complement.d
    }

    pub fn h(&self) -> &AttrGraph<D::Value> {
        &self.result.h
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{side}: {elem} is unattributed")]
    Unattributed { side: Side, elem: Elem },
    #[error("{side}: {elem} carries an attribute but the domain attributes no such elements")]
    Overattributed { side: Side, elem: Elem },
    #[error("leg {leg} is not attribute-preserving on {elem}: {detail}")]
    NotPreserving {
        leg: &'static str,
        elem: Elem,
        detail: String,
    },
    #[error("leg {leg} does not go from K to {side}")]
    LegEndpoints { leg: &'static str, side: Side },
    #[error("{side}: attribute of {elem}: {reason}")]
    BadAttribute { side: Side, elem: Elem, reason: String },
    #[error("guard {index}: {reason}")]
    BadGuard { index: usize, reason: String },
    #[error("variable {0} is not anchored by a left-hand attribute")]
    Unanchored(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HostError {
    #[error("{elem} is unattributed")]
    Unattributed { elem: Elem },
    #[error("{elem} carries an attribute but the domain attributes no such elements")]
    Overattributed { elem: Elem },
    #[error("attribute of {elem}: {reason}")]
    BadAttribute { elem: Elem, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("match is not an injective morphism from the left-hand side into the host")]
    BadMatch,
    #[error("attribute evaluation failed at {elem}: {reason}")]
    Attribute { elem: Elem, reason: String },
    #[error("guard evaluation failed: {0}")]
    Guard(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error("case table violated: {0:?}")]
    Cases(Vec<CaseViolation>),
    #[error("result is not totally attributed")]
    ResultNotTotal,
    #[error("result attributes are ill-formed: {}", .0.join("; "))]
    IllFormedResult(Vec<String>),
    #[error("match index {index} out of range ({count} matches)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("no rule named {0}")]
    UnknownRule(String),
    #[error(transparent)]
    Enum(#[from] EnumError),
}

fn attribution_shape<D: RewriteDomain>(domain: &D, g: &AttrGraph<D::Value>) -> (Vec<Elem>, Vec<Elem>) {
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    for x in g.graph.elems() {
        match (domain.attributable(&x), g.get(&x).is_some()) {
            (true, false) => missing.push(x),
            (false, true) => extra.push(x),
            _ => {}
        }
    }
    (missing, extra)
}

/// Totality and well-formedness of every attribute of a host graph.
pub fn validate_host<D: RewriteDomain>(domain: &D, host: &Host<D>) -> Result<(), Vec<HostError>> {
    let (missing, extra) = attribution_shape(domain, &host.graph);
    let mut errs: Vec<HostError> = missing
        .into_iter()
        .map(|elem| HostError::Unattributed { elem })
        .collect();
    errs.extend(extra.into_iter().map(|elem| HostError::Overattributed { elem }));
    for (x, v) in host.graph.attribution() {
        if let Err(reason) = domain.check_host_value(&host.object, v) {
            errs.push(HostError::BadAttribute {
                elem: x.clone(),
                reason,
            });
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

pub fn validate_rule<D: RewriteDomain>(domain: &D, rule: &Rule<D>) -> Result<(), Vec<RuleError>> {
    let mut errs = Vec::new();
    for (side, g) in [(Side::Left, &rule.lhs), (Side::Right, &rule.rhs)] {
        let (missing, extra) = attribution_shape(domain, g);
        errs.extend(missing.into_iter().map(|elem| RuleError::Unattributed { side, elem }));
        errs.extend(extra.into_iter().map(|elem| RuleError::Overattributed { side, elem }));
    }
    let (_, extra) = attribution_shape(domain, &rule.interface);
    errs.extend(extra.into_iter().map(|elem| RuleError::Overattributed {
        side: Side::Interface,
        elem,
    }));

    let mut legs_ok = true;
    for (leg, side, m, g) in [
        ("l", Side::Left, &rule.l, &rule.lhs),
        ("r", Side::Right, &rule.r, &rule.rhs),
    ] {
        if **m.source() != *rule.interface.graph || **m.target() != *g.graph {
            errs.push(RuleError::LegEndpoints { leg, side });
            legs_ok = false;
        }
    }
    if legs_ok {
        for (leg, m, g) in [("l", &rule.l, &rule.lhs), ("r", &rule.r, &rule.rhs)] {
            let f = AttrMorphism::<D::Map>::preserving(m.clone());
            if let Err(vs) = check_attr_morphism(domain, &rule.interface, g, &f) {
                for v in vs {
                    let elem = match &v {
                        crate::attr::AttrViolation::UnattributedImage { elem, .. }
                        | crate::attr::AttrViolation::ValueMismatch { elem, .. }
                        | crate::attr::AttrViolation::MapFailed { elem, .. }
                        | crate::attr::AttrViolation::NotStrict { elem, .. } => elem.clone(),
                    };
                    errs.push(RuleError::NotPreserving {
                        leg,
                        elem,
                        detail: v.to_string(),
                    });
                }
            }
        }
    }

    for (side, g) in [
        (Side::Left, &rule.lhs),
        (Side::Interface, &rule.interface),
        (Side::Right, &rule.rhs),
    ] {
        for (x, v) in g.attribution() {
            if let Err(reason) = domain.check_rule_value(&rule.object, side, v) {
                errs.push(RuleError::BadAttribute {
                    side,
                    elem: x.clone(),
                    reason,
                });
            }
        }
    }
    for (index, g) in rule.guards.iter().enumerate() {
        if let Err(reason) = domain.check_guard(&rule.object, g) {
            errs.push(RuleError::BadGuard { index, reason });
        }
    }

    let anchored: BTreeSet<String> = rule
        .lhs
        .attribution()
        .values()
        .flat_map(|v| domain.anchored_vars(v))
        .collect();
    let mut used = BTreeSet::new();
    for g in [&rule.lhs, &rule.interface, &rule.rhs] {
        for v in g.attribution().values() {
            used.extend(domain.vars(v));
        }
    }
    for g in &rule.guards {
        used.extend(domain.vars(g));
    }
    for v in used.difference(&anchored) {
        errs.push(RuleError::Unanchored(v.clone()));
    }

    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// Instantiates the attribute map along a structural match, or `None` when
/// attributes or guards rule it out.
fn instantiate<D: RewriteDomain>(
    domain: &D,
    host: &Host<D>,
    rule: &Rule<D>,
    m: &GraphMorphism,
) -> Result<Option<D::Map>, EngineError> {
    let objs = (&rule.object, &host.object);
    let host = &host.graph;
    let mut map = domain.empty_map();
    let mut deferred = Vec::new();
    for (x, pattern) in rule.lhs.attribution() {
        let gx = m.apply(x);
        let Some(value) = host.get(&gx) else {
            return Ok(None);
        };
        match domain
            .match_attr(objs, pattern, value, &mut map)
            .map_err(|reason| EngineError::Attribute {
                elem: gx.clone(),
                reason,
            })? {
            AttrMatch::Bound => {}
            AttrMatch::Mismatch => return Ok(None),
            AttrMatch::Deferred => deferred.push((pattern, value, gx)),
        }
    }
    for (pattern, value, gx) in deferred {
        if !domain
            .check_deferred(objs, pattern, value, &map)
            .map_err(|reason| EngineError::Attribute { elem: gx, reason })?
        {
            return Ok(None);
        }
    }
    // unattributed rule elements must meet unattributed host elements
    for x in rule.lhs.graph.elems() {
        if rule.lhs.get(&x).is_none() && host.get(&m.apply(&x)).is_some() {
            return Ok(None);
        }
    }
    if !domain.guards_hold(&rule.guards, &map).map_err(EngineError::Guard)? {
        return Ok(None);
    }
    Ok(Some(map))
}

/// All matches of `rule` in `host`, ordered by the images of the left-hand
/// nodes and then edges.
pub fn find_matches<D: RewriteDomain>(
    domain: &D,
    host: &Host<D>,
    rule: &Rule<D>,
) -> Result<Vec<Match<D::Map>>, EngineError> {
    search(domain, host, rule, usize::MAX)
}

/// The first match, without computing the rest.
pub fn first_match<D: RewriteDomain>(
    domain: &D,
    host: &Host<D>,
    rule: &Rule<D>,
) -> Result<Option<Match<D::Map>>, EngineError> {
    Ok(search(domain, host, rule, 1)?.pop())
}

fn search<D: RewriteDomain>(
    domain: &D,
    host: &Host<D>,
    rule: &Rule<D>,
    limit: usize,
) -> Result<Vec<Match<D::Map>>, EngineError> {
    let objs = (&rule.object, &host.object);
    let lg = &rule.lhs.graph;
    let hg = &host.graph.graph;
    // a rule element's own pattern must match in isolation
    let compatible = |lx: Elem, gx: Elem| -> bool {
        match (rule.lhs.get(&lx), host.graph.get(&gx)) {
            (Some(p), Some(v)) => {
                let mut scratch = domain.empty_map();
                !matches!(domain.match_attr(objs, p, v, &mut scratch), Ok(AttrMatch::Mismatch))
            }
            (None, None) => true,
            _ => false,
        }
    };
    let node_ok = |a: &NodeId, b: &NodeId| compatible(Elem::Node(a.clone()), Elem::Node(b.clone()));
    let edge_ok = |a: &EdgeId, b: &EdgeId| compatible(Elem::Edge(a.clone()), Elem::Edge(b.clone()));
    let mut out = Vec::new();
    let mut failure = None;
    HomSearch::new(lg, hg)
        .injective(true)
        .nodes_where(&node_ok)
        .edges_where(&edge_ok)
        .for_each(|nodes, edges| {
            let m = GraphMorphism::new_unchecked(lg.clone(), hg.clone(), nodes.clone(), edges.clone());
            match instantiate(domain, host, rule, &m) {
                Ok(Some(attr)) => out.push(Match { morphism: m, attr }),
                Ok(None) => {}
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
            if out.len() >= limit {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// One sesqui-pushout step: the final pullback complement of the match
/// along `l`, then the pushout along `r`, both with attributes.
pub fn apply_rewrite<D: RewriteDomain>(
    domain: &D,
    host: &Host<D>,
    rule: &Rule<D>,
    m: &Match<D::Map>,
) -> Result<RewriteTrace<D>, EngineError> {
    let object = &host.object;
    let host = &host.graph;
    let mm = &m.morphism;
    if **mm.source() != *rule.lhs.graph || **mm.target() != *host.graph || !is_injective(mm) {
        return Err(EngineError::BadMatch);
    }
    // rebind so the squares share the host's allocation
    let mm = GraphMorphism::new_unchecked(
        rule.lhs.graph.clone(),
        host.graph.clone(),
        mm.node_map().clone(),
        mm.edge_map().clone(),
    );
    let a = AttrMap::Via(m.attr.clone());
    let matching = AttrMorphism {
        structure: mm.clone(),
        attr: a.clone(),
    };
    let plain = fpbc_graphs(&mm, &rule.l)?;
    let complement = lift_fpbc(
        domain,
        &rule.interface,
        &rule.lhs,
        host,
        &AttrMorphism::preserving(rule.l.clone()),
        &matching,
        &plain,
    )?;
    let po = pushout_graphs(&complement.m_k.structure, &rule.r)?;
    let result = lift_pushout(
        domain,
        &rule.interface,
        &rule.rhs,
        &complement.d,
        &AttrMorphism::preserving(rule.r.clone()),
        &complement.m_k,
        &po,
    )?;
    if !result.h.total_over(domain).total {
        return Err(EngineError::ResultNotTotal);
    }
    let produced = Host::<D> {
        object: object.clone(),
        graph: result.h.clone(),
    };
    if let Err(errs) = validate_host(domain, &produced) {
        return Err(EngineError::IllFormedResult(
            errs.iter().map(|e| e.to_string()).collect(),
        ));
    }
    let view = StepView {
        lhs: &rule.lhs,
        interface: &rule.interface,
        rhs: &rule.rhs,
        host,
        complement: &complement.d,
        result: &result.h,
        l: &rule.l,
        r: &rule.r,
        m_l: &mm,
        m_k: &complement.m_k.structure,
        l1: &complement.l1.structure,
        r1: &result.r1.structure,
        a: &a,
    };
    let cases = classify_elements(domain, &view).map_err(EngineError::Cases)?;
    Ok(RewriteTrace {
        rule: rule.name.clone(),
        input: host.clone(),
        matching: m.clone(),
        complement,
        result,
        cases,
    })
}

/// Oracle checks of one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub fpbc: bool,
    pub pushout: PushoutReport,
    pub fiber_in_interface: bool,
    pub match_strict: bool,
    pub complement_strict: bool,
    pub cases: bool,
}

impl StepCheck {
    pub fn ok(&self) -> bool {
        self.fpbc
            && self.pushout.ok()
            && self.fiber_in_interface
            && self.match_strict
            && self.complement_strict
            && self.cases
    }
}

pub fn verify_trace<D: RewriteDomain>(
    domain: &D,
    rule: &Rule<D>,
    trace: &RewriteTrace<D>,
    bound: EnumBound,
) -> Result<StepCheck, EngineError> {
    let m_l = &trace.matching.morphism;
    let m_k = &trace.complement.m_k.structure;
    let l1 = &trace.complement.l1.structure;
    let fpbc = verify_fpbc(
        FpbcSquare {
            m_l,
            l: &rule.l,
            m_k,
            l1,
        },
        bound,
    )?;
    let pushout = verify_pushout_report(
        PushoutSquare {
            m_k,
            r: &rule.r,
            m_r: &trace.result.m_r.structure,
            r1: &trace.result.r1.structure,
        },
        bound,
    )?;
    let matching = AttrMorphism {
        structure: m_l.clone(),
        attr: AttrMap::Via(trace.matching.attr.clone()),
    };
    let match_strict = check_attr_morphism(domain, &rule.lhs, &trace.input, &matching).is_ok()
        && strictness_violations(&rule.lhs, &trace.input, &matching).is_empty();
    let complement_strict = check_attr_morphism(domain, &rule.interface, trace.d(), &trace.complement.m_k).is_ok()
        && strictness_violations(&rule.interface, trace.d(), &trace.complement.m_k).is_empty();
    let view = StepView {
        lhs: &rule.lhs,
        interface: &rule.interface,
        rhs: &rule.rhs,
        host: &trace.input,
        complement: trace.d(),
        result: trace.h(),
        l: &rule.l,
        r: &rule.r,
        m_l,
        m_k,
        l1,
        r1: &trace.result.r1.structure,
        a: &matching.attr,
    };
    let cases = classify_elements(domain, &view).is_ok_and(|c| c == trace.cases);
    Ok(StepCheck {
        fpbc,
        pushout,
        fiber_in_interface: match_fiber_in_interface(m_l, m_k, l1),
        match_strict,
        complement_strict,
        cases,
    })
}

/// An isomorphism of the underlying graphs that also carries attributes
/// onto equal attributes.
pub fn attr_isomorphic<V: PartialEq>(g: &AttrGraph<V>, h: &AttrGraph<V>) -> Option<GraphMorphism> {
    if g.graph.node_count() != h.graph.node_count() || g.graph.edge_count() != h.graph.edge_count() {
        return None;
    }
    let node_ok = |a: &NodeId, b: &NodeId| g.get(&Elem::Node(a.clone())) == h.get(&Elem::Node(b.clone()));
    let edge_ok = |a: &EdgeId, b: &EdgeId| g.get(&Elem::Edge(a.clone())) == h.get(&Elem::Edge(b.clone()));
    HomSearch::new(&g.graph, &h.graph)
        .bijective(true)
        .nodes_where(&node_ok)
        .edges_where(&edge_ok)
        .first(&g.graph, &h.graph)
}

/// Renames every element of `g`; `name` must be injective per kind.
/// Returns the renamed graph and the renaming as an isomorphism.
pub fn rename_graph<V: Clone>(
    g: &AttrGraph<V>,
    mut name: impl FnMut(&Elem) -> String,
) -> (AttrGraph<V>, GraphMorphism) {
    let nodes: BTreeMap<NodeId, NodeId> = g
        .graph
        .nodes()
        .map(|n| (n.clone(), NodeId(name(&Elem::Node(n.clone())))))
        .collect();
    let edges: BTreeMap<EdgeId, EdgeId> = g
        .graph
        .edges()
        .map(|(e, _)| (e.clone(), EdgeId(name(&Elem::Edge(e.clone())))))
        .collect();
    let mut out = Graph::new();
    for n in nodes.values() {
        out.add_node(n.clone()).expect("renaming is injective on nodes");
    }
    for (e, edge) in g.graph.edges() {
        out.add_edge(edges[e].clone(), nodes[&edge.src].clone(), nodes[&edge.tgt].clone())
            .expect("renaming is injective on edges");
    }
    let out = Arc::new(out);
    let iso = GraphMorphism::new_unchecked(g.graph.clone(), out.clone(), nodes, edges);
    let att = g.attribution().iter().map(|(x, v)| (iso.apply(x), v.clone())).collect();
    (AttrGraph::new(out, att).expect("renamed elements exist"), iso)
}

/// Transports a match along a renaming of its host.
pub fn transport_match<M: Clone>(m: &Match<M>, iso: &GraphMorphism) -> Match<M> {
    let f = crate::morphism::compose(&m.morphism, iso).expect("match lands in the renamed host");
    Match {
        morphism: f,
        attr: m.attr.clone(),
    }
}

/// Number of matches for each rule, in order.
pub fn match_counts<D: RewriteDomain>(
    domain: &D,
    host: &Host<D>,
    rules: &[Rule<D>],
) -> Result<Vec<usize>, EngineError> {
    rules.iter().map(|r| Ok(find_matches(domain, host, r)?.len())).collect()
}
