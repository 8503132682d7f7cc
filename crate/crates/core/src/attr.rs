//! Partially attributed graphs and the lifting of a rewriting step to them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug, Display};
use std::sync::Arc;

use thiserror::Error;

use crate::categorical::{Fpbc, Pushout};
use crate::graph::{Elem, Graph};
use crate::morphism::GraphMorphism;

/// An attribute domain: values and the maps between attribute objects
/// acting on them (substitutions, valuations).
pub trait AttrDomain {
    type Value: Clone + PartialEq + Debug + Display;
    type Map: Clone + Debug;

    /// `T(a)` applied to one value.
    fn apply(&self, map: &Self::Map, value: &Self::Value) -> Result<Self::Value, String>;

    /// Whether elements of this kind carry attributes at all. Totality is
    /// required only of attributable elements.
    fn attributable(&self, x: &Elem) -> bool {
        let _ = x;
        true
    }
}

/// The attribute component of a morphism.
#[derive(Clone, Debug, PartialEq)]
pub enum AttrMap<M> {
    Identity,
    Via(M),
}

impl<M> AttrMap<M> {
    pub fn is_identity(&self) -> bool {
        matches!(self, AttrMap::Identity)
    }

    pub fn apply<D>(&self, domain: &D, v: &D::Value) -> Result<D::Value, String>
    where
        D: AttrDomain<Map = M>,
    {
        match self {
            AttrMap::Identity => Ok(v.clone()),
            AttrMap::Via(m) => domain.apply(m, v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AttrError {
    #[error("{0} is not an element of the graph")]
    UnknownElement(Elem),
}

/// A graph with a partial attribution of its nodes and edges. Absence from
/// `att` is `⊥`.
#[derive(Clone, PartialEq)]
pub struct AttrGraph<V> {
    pub graph: Arc<Graph>,
    att: BTreeMap<Elem, V>,
}

impl<V: Debug> Debug for AttrGraph<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for x in self.graph.elems() {
            match self.att.get(&x) {
                Some(v) => m.entry(&x, v),
                None => m.entry(&x, &"⊥"),
            };
        }
        m.finish()
    }
}

/// Whether every element carries an attribute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TotalityWitness {
    pub total: bool,
}

impl<V> AttrGraph<V> {
    pub fn new(graph: Arc<Graph>, att: BTreeMap<Elem, V>) -> Result<Self, AttrError> {
        if let Some(x) = att.keys().find(|x| !graph.has_elem(x)) {
            return Err(AttrError::UnknownElement(x.clone()));
        }
        Ok(Self { graph, att })
    }

    /// Every element unattributed.
    pub fn bare(graph: Arc<Graph>) -> Self {
        Self {
            graph,
            att: BTreeMap::new(),
        }
    }

    pub fn get(&self, x: &Elem) -> Option<&V> {
        self.att.get(x)
    }

    pub fn attribution(&self) -> &BTreeMap<Elem, V> {
        &self.att
    }

    pub fn set(&mut self, x: Elem, v: V) -> Result<(), AttrError> {
        if !self.graph.has_elem(&x) {
            return Err(AttrError::UnknownElement(x));
        }
        self.att.insert(x, v);
        Ok(())
    }

    pub fn unattributed(&self) -> Vec<Elem> {
        self.graph.elems().filter(|x| !self.att.contains_key(x)).collect()
    }

    pub fn totality(&self) -> TotalityWitness {
        TotalityWitness {
            total: self.att.len() == self.graph.node_count() + self.graph.edge_count(),
        }
    }

    pub fn is_total(&self) -> bool {
        self.totality().total
    }

    /// Total on the elements `domain` attributes, and `⊥` elsewhere.
    pub fn total_over<D: AttrDomain>(&self, domain: &D) -> TotalityWitness {
        TotalityWitness {
            total: self
                .graph
                .elems()
                .all(|x| domain.attributable(&x) == self.att.contains_key(&x)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AttrMorphism<M> {
    pub structure: GraphMorphism,
    pub attr: AttrMap<M>,
}

impl<M> AttrMorphism<M> {
    pub fn preserving(structure: GraphMorphism) -> Self {
        Self {
            structure,
            attr: AttrMap::Identity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AttrViolation {
    #[error("{elem} is attributed but its image {image} is not")]
    UnattributedImage { elem: Elem, image: Elem },
    #[error("{elem} maps to {image}: expected {expected}, found {found}")]
    ValueMismatch {
        elem: Elem,
        image: Elem,
        expected: String,
        found: String,
    },
    #[error("cannot map the attribute of {elem}: {reason}")]
    MapFailed { elem: Elem, reason: String },
    #[error("{elem} is unattributed but its image {image} is attributed")]
    NotStrict { elem: Elem, image: Elem },
}

/// Laxity: every attributed `x` has an attributed image carrying `a(att(x))`.
pub fn check_attr_morphism<D: AttrDomain>(
    domain: &D,
    src: &AttrGraph<D::Value>,
    tgt: &AttrGraph<D::Value>,
    f: &AttrMorphism<D::Map>,
) -> Result<(), Vec<AttrViolation>> {
    let mut errs = Vec::new();
    for (x, v) in src.attribution() {
        let image = f.structure.apply(x);
        let expected = match f.attr.apply(domain, v) {
            Ok(e) => e,
            Err(reason) => {
                errs.push(AttrViolation::MapFailed {
                    elem: x.clone(),
                    reason,
                });
                continue;
            }
        };
        match tgt.get(&image) {
            None => errs.push(AttrViolation::UnattributedImage { elem: x.clone(), image }),
            Some(found) if *found != expected => errs.push(AttrViolation::ValueMismatch {
                elem: x.clone(),
                image,
                expected: expected.to_string(),
                found: found.to_string(),
            }),
            Some(_) => {}
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// The ⊥-reflection half of strictness.
pub fn strictness_violations<V, M>(src: &AttrGraph<V>, tgt: &AttrGraph<V>, f: &AttrMorphism<M>) -> Vec<AttrViolation> {
    src.unattributed()
        .into_iter()
        .filter_map(|x| {
            let image = f.structure.apply(&x);
            tgt.get(&image).map(|_| AttrViolation::NotStrict { elem: x, image })
        })
        .collect()
}

/// Lax, and unattributed elements have unattributed images.
pub fn check_strict<D: AttrDomain>(
    domain: &D,
    src: &AttrGraph<D::Value>,
    tgt: &AttrGraph<D::Value>,
    f: &AttrMorphism<D::Map>,
) -> bool {
    check_attr_morphism(domain, src, tgt, f).is_ok() && strictness_violations(src, tgt, f).is_empty()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("rule leg does not act as the identity on attributes")]
    LegNotPreserving,
    #[error("rule leg violates attribution: {0:?}")]
    Leg(Vec<AttrViolation>),
    #[error("match is not a strict morphism: {0:?}")]
    MatchNotStrict(Vec<AttrViolation>),
    #[error("left-hand side is not totally attributed")]
    LeftNotTotal,
    #[error("right-hand side is not totally attributed")]
    RightNotTotal,
    #[error("attribute of {elem} cannot be mapped: {reason}")]
    Map { elem: Elem, reason: String },
}

fn leg_ok<D: AttrDomain>(
    domain: &D,
    src: &AttrGraph<D::Value>,
    tgt: &AttrGraph<D::Value>,
    leg: &AttrMorphism<D::Map>,
) -> Result<(), LiftError> {
    if !leg.attr.is_identity() {
        return Err(LiftError::LegNotPreserving);
    }
    check_attr_morphism(domain, src, tgt, leg).map_err(LiftError::Leg)
}

fn strict_ok<D: AttrDomain>(
    domain: &D,
    src: &AttrGraph<D::Value>,
    tgt: &AttrGraph<D::Value>,
    f: &AttrMorphism<D::Map>,
) -> Result<(), LiftError> {
    let mut errs = match check_attr_morphism(domain, src, tgt, f) {
        Ok(()) => Vec::new(),
        Err(e) => e,
    };
    errs.extend(strictness_violations(src, tgt, f));
    if errs.is_empty() {
        Ok(())
    } else {
        Err(LiftError::MatchNotStrict(errs))
    }
}

#[derive(Clone, Debug)]
pub struct LiftedFpbc<V, M> {
    pub d: AttrGraph<V>,
    pub m_k: AttrMorphism<M>,
    pub l1: AttrMorphism<M>,
}

/// Attributes the complement: `a(att_K)` on the copy of `K` (keeping `⊥`),
/// `att_G ∘ l1` on context elements and clones.
pub fn lift_fpbc<D: AttrDomain>(
    domain: &D,
    k: &AttrGraph<D::Value>,
    l_graph: &AttrGraph<D::Value>,
    g: &AttrGraph<D::Value>,
    left: &AttrMorphism<D::Map>,
    matching: &AttrMorphism<D::Map>,
    plain: &Fpbc,
) -> Result<LiftedFpbc<D::Value, D::Map>, LiftError> {
    leg_ok(domain, k, l_graph, left)?;
    if !l_graph.total_over(domain).total {
        return Err(LiftError::LeftNotTotal);
    }
    strict_ok(domain, l_graph, g, matching)?;

    let mut att = BTreeMap::new();
    let mut in_k = BTreeSet::new();
    for x in k.graph.elems() {
        let dx = plain.m_k.apply(&x);
        in_k.insert(dx.clone());
        if let Some(v) = k.get(&x) {
            let mapped = matching.attr.apply(domain, v).map_err(|reason| LiftError::Map {
                elem: x.clone(),
                reason,
            })?;
            att.insert(dx, mapped);
        }
    }
    for x in plain.d.elems() {
        if in_k.contains(&x) {
            continue;
        }
        if let Some(v) = g.get(&plain.l1.apply(&x)) {
            att.insert(x, v.clone());
        }
    }
    Ok(LiftedFpbc {
        d: AttrGraph {
            graph: plain.d.clone(),
            att,
        },
        m_k: AttrMorphism {
            structure: plain.m_k.clone(),
            attr: matching.attr.clone(),
        },
        l1: AttrMorphism::preserving(plain.l1.clone()),
    })
}

#[derive(Clone, Debug)]
pub struct LiftedPushout<V, M> {
    pub h: AttrGraph<V>,
    pub m_r: AttrMorphism<M>,
    pub r1: AttrMorphism<M>,
}

/// Attributes the result: `a(att_R)` on the image of `R`, `att_D` on the
/// context.
pub fn lift_pushout<D: AttrDomain>(
    domain: &D,
    k: &AttrGraph<D::Value>,
    r_graph: &AttrGraph<D::Value>,
    d: &AttrGraph<D::Value>,
    right: &AttrMorphism<D::Map>,
    matching: &AttrMorphism<D::Map>,
    plain: &Pushout,
) -> Result<LiftedPushout<D::Value, D::Map>, LiftError> {
    leg_ok(domain, k, r_graph, right)?;
    if !r_graph.total_over(domain).total {
        return Err(LiftError::RightNotTotal);
    }
    strict_ok(domain, k, d, matching)?;

    let mut att = BTreeMap::new();
    let mut from_r = BTreeSet::new();
    for x in r_graph.graph.elems() {
        let hx = plain.m_r.apply(&x);
        from_r.insert(hx.clone());
        let Some(v) = r_graph.get(&x) else {
            continue;
        };
        let mapped = matching.attr.apply(domain, v).map_err(|reason| LiftError::Map {
            elem: x.clone(),
            reason,
        })?;
        att.insert(hx, mapped);
    }
    for x in d.graph.elems() {
        let hx = plain.r1.apply(&x);
        if from_r.contains(&hx) {
            continue;
        }
        if let Some(v) = d.get(&x) {
            att.insert(hx, v.clone());
        }
    }
    Ok(LiftedPushout {
        h: AttrGraph {
            graph: plain.h.clone(),
            att,
        },
        m_r: AttrMorphism {
            structure: plain.m_r.clone(),
            attr: matching.attr.clone(),
        },
        r1: AttrMorphism::preserving(plain.r1.clone()),
    })
}

/// What happens to one element of `D` across a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CaseTag {
    /// Outside the interface; carries its host attribute through unchanged.
    Context,
    /// In the interface with a defined attribute, kept throughout.
    Preserved,
    /// In the interface with `⊥`; the attribute is rewritten.
    Reassigned,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::Context => "context",
            CaseTag::Preserved => "preserved",
            CaseTag::Reassigned => "reassigned",
        })
    }
}

/// Every piece of an attributed rewriting step.
#[derive(Clone, Copy, Debug)]
pub struct StepView<'a, V, M> {
    pub lhs: &'a AttrGraph<V>,
    pub interface: &'a AttrGraph<V>,
    pub rhs: &'a AttrGraph<V>,
    pub host: &'a AttrGraph<V>,
    pub complement: &'a AttrGraph<V>,
    pub result: &'a AttrGraph<V>,
    pub l: &'a GraphMorphism,
    pub r: &'a GraphMorphism,
    pub m_l: &'a GraphMorphism,
    pub m_k: &'a GraphMorphism,
    pub l1: &'a GraphMorphism,
    pub r1: &'a GraphMorphism,
    pub a: &'a AttrMap<M>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{elem} satisfies {matched} case configurations")]
pub struct CaseViolation {
    pub elem: Elem,
    pub matched: usize,
}

/// Tags every element of `D` with the single case configuration it
/// satisfies; elements satisfying none or several are reported.
pub fn classify_elements<D: AttrDomain>(
    domain: &D,
    step: &StepView<'_, D::Value, D::Map>,
) -> Result<BTreeMap<Elem, CaseTag>, Vec<CaseViolation>> {
    let k_of: BTreeMap<Elem, Elem> = step.interface.graph.elems().map(|k| (step.m_k.apply(&k), k)).collect();
    let mapped = |v: Option<&D::Value>| -> Option<D::Value> { v.and_then(|v| step.a.apply(domain, v).ok()) };

    let mut tags = BTreeMap::new();
    let mut errs = Vec::new();
    for x in step.complement.graph.elems() {
        let at_g = step.host.get(&step.l1.apply(&x));
        let at_d = step.complement.get(&x);
        let at_h = step.result.get(&step.r1.apply(&x));
        let mut hits = Vec::new();

        let k = k_of.get(&x);
        let carries = domain.attributable(&x);
        // context: x:t1 in G, D and H alike
        if k.is_none() && at_g.is_some() == carries && at_g == at_d && at_d == at_h {
            hits.push(CaseTag::Context);
        }
        if let Some(k) = k {
            let at_k = step.interface.get(k);
            let at_l = step.lhs.get(&step.l.apply(k));
            let at_r = step.rhs.get(&step.r.apply(k));
            if let Some(t) = at_k {
                let at = mapped(Some(t));
                if at.is_some()
                    && at_l == Some(t)
                    && at_r == Some(t)
                    && at_g == at.as_ref()
                    && at_d == at.as_ref()
                    && at_h == at.as_ref()
                {
                    hits.push(CaseTag::Preserved);
                }
            } else if at_d.is_none() && at_l.is_some() == carries && at_r.is_some() == carries {
                let from_l = mapped(at_l);
                let from_r = mapped(at_r);
                if from_l.is_some() == carries
                    && from_r.is_some() == carries
                    && at_g == from_l.as_ref()
                    && at_h == from_r.as_ref()
                {
                    hits.push(CaseTag::Reassigned);
                }
            }
        }
        if hits.len() == 1 {
            tags.insert(x, hits[0]);
        } else {
            errs.push(CaseViolation {
                elem: x,
                matched: hits.len(),
            });
        }
    }
    if errs.is_empty() {
        Ok(tags)
    } else {
        Err(errs)
    }
}

/// Every element of `D` sent by `l1` into the match image comes from `K`.
pub fn match_fiber_in_interface(m_l: &GraphMorphism, m_k: &GraphMorphism, l1: &GraphMorphism) -> bool {
    let matched: BTreeSet<Elem> = m_l.source().elems().map(|x| m_l.apply(&x)).collect();
    let from_k: BTreeSet<Elem> = m_k.source().elems().map(|x| m_k.apply(&x)).collect();
    l1.source()
        .elems()
        .filter(|x| matched.contains(&l1.apply(x)))
        .all(|x| from_k.contains(&x))
}
