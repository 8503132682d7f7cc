//! Executable universal-property checks.
//!
//! Pullbacks and final pullback complements are tested against the two
//! representable graphs (a point and an arrow) placed over every element of
//! the base: every object is a colimit of those, and both sides of each
//! universal property turn colimits into limits, so agreement on
//! representables is agreement everywhere. Pushouts are compared with an
//! independently computed quotient of `R + D`, and, while small enough,
//! against the node and edge cogenerators.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use super::arc;
use super::pullback::pullback_graphs;
use crate::graph::{EdgeId, Graph, NodeId};
use crate::morphism::{compose, enumerate_morphisms, EnumBound, EnumError, GraphMorphism, HomSearch};

/// Pushout cocone checks against the cogenerators run only while every
/// graph of the square has at most this many nodes and edges.
pub const COGENERATOR_LIMIT: usize = 12;

/// The left square of a rewriting step: `l: K -> L`, `m_L: L -> G`,
/// `m_K: K -> D`, `l1: D -> G`.
#[derive(Clone, Copy, Debug)]
pub struct FpbcSquare<'a> {
    pub m_l: &'a GraphMorphism,
    pub l: &'a GraphMorphism,
    pub m_k: &'a GraphMorphism,
    pub l1: &'a GraphMorphism,
}

/// The right square: `r: K -> R`, `m_K: K -> D`, `m_R: R -> H`, `r1: D -> H`.
#[derive(Clone, Copy, Debug)]
pub struct PushoutSquare<'a> {
    pub m_k: &'a GraphMorphism,
    pub r: &'a GraphMorphism,
    pub m_r: &'a GraphMorphism,
    pub r1: &'a GraphMorphism,
}

type Key = (Vec<NodeId>, Vec<EdgeId>);

fn key(m: &GraphMorphism) -> Key {
    (
        m.node_map().values().cloned().collect(),
        m.edge_map().values().cloned().collect(),
    )
}

fn same_maps(a: &GraphMorphism, b: &GraphMorphism) -> bool {
    a.node_map() == b.node_map() && a.edge_map() == b.edge_map()
}

fn commutes(a1: &GraphMorphism, a2: &GraphMorphism, b1: &GraphMorphism, b2: &GraphMorphism) -> bool {
    match (compose(a1, a2), compose(b1, b2)) {
        (Ok(x), Ok(y)) => same_maps(&x, &y),
        _ => false,
    }
}

fn point() -> Arc<Graph> {
    arc(Graph::from_lists(&["*"], &[]))
}

fn arrow() -> Arc<Graph> {
    arc(Graph::from_lists(&["s", "t"], &[("a", "s", "t")]))
}

/// The representable graphs over every node and edge of `base`.
fn representables_over(base: &Arc<Graph>) -> Vec<GraphMorphism> {
    let pt = point();
    let ar = arrow();
    let mut out = Vec::new();
    for v in base.nodes() {
        out.push(GraphMorphism::new_unchecked(
            pt.clone(),
            base.clone(),
            [("*".into(), v.clone())].into(),
            BTreeMap::new(),
        ));
    }
    for (id, e) in base.edges() {
        out.push(GraphMorphism::new_unchecked(
            ar.clone(),
            base.clone(),
            [("s".into(), e.src.clone()), ("t".into(), e.tgt.clone())].into(),
            [("a".into(), id.clone())].into(),
        ));
    }
    out
}

/// Checks that `X <-p1- P -p2-> Y` is a pullback of `X -f-> Z <-g- Y`.
pub fn verify_pullback(
    p1: &GraphMorphism,
    p2: &GraphMorphism,
    f: &GraphMorphism,
    g: &GraphMorphism,
    bound: EnumBound,
) -> Result<bool, EnumError> {
    if !commutes(p1, f, p2, g) {
        return Ok(false);
    }
    let apex = p1.source();
    for t in [point(), arrow()] {
        let into_apex = enumerate_morphisms(&t, apex, bound)?;
        let into_x = enumerate_morphisms(&t, f.source(), bound)?;
        let into_y = enumerate_morphisms(&t, g.source(), bound)?;
        let mut y_by_base: BTreeMap<Key, Vec<Key>> = BTreeMap::new();
        for b in &into_y {
            y_by_base
                .entry(key(&compose(b, g).expect("composable")))
                .or_default()
                .push(key(b));
        }
        let mut cone_count = 0usize;
        for a in &into_x {
            let base = key(&compose(a, f).expect("composable"));
            cone_count += y_by_base.get(&base).map_or(0, Vec::len);
        }
        let mut induced = std::collections::BTreeSet::new();
        for h in &into_apex {
            let pair = (
                key(&compose(h, p1).expect("composable")),
                key(&compose(h, p2).expect("composable")),
            );
            if !induced.insert(pair) {
                return Ok(false);
            }
        }
        if induced.len() != cone_count {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that the square is a final pullback complement of `m_L` along `l`.
pub fn verify_fpbc(sq: FpbcSquare<'_>, bound: EnumBound) -> Result<bool, EnumError> {
    let competitors = representables_over(sq.m_l.target());
    verify_fpbc_against(sq, &competitors, bound)
}

/// The finality half of [`verify_fpbc`] against explicit competitors
/// `t: D' -> G`, preceded by the pullback check.
///
/// For each competitor the pullback `K'` of `m_L` and `t` is formed; every
/// `f: K' -> K` over `L` must extend to exactly one `f1: D' -> D` over `G`.
pub fn verify_fpbc_against(
    sq: FpbcSquare<'_>,
    competitors: &[GraphMorphism],
    bound: EnumBound,
) -> Result<bool, EnumError> {
    let FpbcSquare { m_l, l, m_k, l1 } = sq;
    if !commutes(l, m_l, m_k, l1) {
        return Ok(false);
    }
    if !verify_pullback(l, m_k, m_l, l1, bound)? {
        return Ok(false);
    }
    let k = l.source();
    let d = l1.source();
    for t in competitors {
        let pb = pullback_graphs(m_l, t).expect("competitor lies over the host");
        let (l_prime, m_prime) = (&pb.left_leg, &pb.right_leg);
        let fs: Vec<GraphMorphism> = enumerate_morphisms(&pb.apex, k, bound)?
            .into_iter()
            .filter(|f| same_maps(&compose(f, l).expect("composable"), l_prime))
            .collect();
        let hs: Vec<GraphMorphism> = enumerate_morphisms(t.source(), d, bound)?
            .into_iter()
            .filter(|h| same_maps(&compose(h, l1).expect("composable"), t))
            .collect();
        for f in &fs {
            let want = compose(f, m_k).expect("composable");
            let mediating = hs
                .iter()
                .filter(|h| same_maps(&compose(m_prime, h).expect("composable"), &want))
                .count();
            if mediating != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PushoutReport {
    pub commutes: bool,
    /// The comparison from the quotient of `R + D` to `H` is bijective.
    pub canonical_iso: bool,
    /// Whether the cogenerator cocone check ran (size limited).
    pub cocones_checked: bool,
    pub cocones_ok: bool,
}

impl PushoutReport {
    pub fn ok(&self) -> bool {
        self.commutes && self.canonical_iso && self.cocones_ok
    }
}

pub fn verify_pushout(sq: PushoutSquare<'_>, bound: EnumBound) -> Result<bool, EnumError> {
    Ok(verify_pushout_report(sq, bound)?.ok())
}

pub fn verify_pushout_report(sq: PushoutSquare<'_>, bound: EnumBound) -> Result<PushoutReport, EnumError> {
    let PushoutSquare { m_k, r, m_r, r1 } = sq;
    let _ = bound;
    let commutes = commutes(r, m_r, m_k, r1);
    if !commutes {
        return Ok(PushoutReport {
            commutes,
            canonical_iso: false,
            cocones_checked: false,
            cocones_ok: false,
        });
    }
    let canonical_iso = canonical_pushout_iso(sq);
    let small = [m_k.source(), r.target(), m_k.target(), m_r.target()]
        .iter()
        .all(|g| g.node_count() <= COGENERATOR_LIMIT && g.edge_count() <= COGENERATOR_LIMIT);
    let cocones_ok = if small {
        let node_cogen = arc(Graph::from_lists(
            &["0", "1"],
            &[("00", "0", "0"), ("01", "0", "1"), ("10", "1", "0"), ("11", "1", "1")],
        ));
        let edge_cogen = arc(Graph::from_lists(&["*"], &[("0", "*", "*"), ("1", "*", "*")]));
        cocones_against(sq, &node_cogen) && cocones_against(sq, &edge_cogen)
    } else {
        true
    };
    Ok(PushoutReport {
        commutes,
        canonical_iso,
        cocones_checked: small,
        cocones_ok,
    })
}

/// Positions of the images of `f`, in the iteration order of its source,
/// among the nodes and edges of its target.
fn positions(f: &GraphMorphism) -> (Vec<usize>, Vec<usize>) {
    let t = f.target();
    let nodes: BTreeMap<&NodeId, usize> = t.nodes().enumerate().map(|(i, n)| (n, i)).collect();
    let edges: BTreeMap<&EdgeId, usize> = t.edges().enumerate().map(|(i, (e, _))| (e, i)).collect();
    (
        f.node_map().values().map(|n| nodes[n]).collect(),
        f.edge_map().values().map(|e| edges[e]).collect(),
    )
}

type IndexKey = (Vec<usize>, Vec<usize>);

fn then(f: &(Vec<usize>, Vec<usize>), nodes: &[usize], edges: &[usize]) -> IndexKey {
    (
        f.0.iter().map(|&i| nodes[i]).collect(),
        f.1.iter().map(|&i| edges[i]).collect(),
    )
}

/// Every cocone into `t` factors uniquely through `H`.
fn cocones_against(sq: PushoutSquare<'_>, t: &Arc<Graph>) -> bool {
    let PushoutSquare { m_k, r, m_r, r1 } = sq;
    let (r_pos, m_k_pos, m_r_pos, r1_pos) = (positions(r), positions(m_k), positions(m_r), positions(r1));
    let mut from_r: BTreeMap<IndexKey, usize> = BTreeMap::new();
    HomSearch::new(r.target(), t).for_each_indexed(|nodes, edges| {
        *from_r.entry(then(&r_pos, nodes, edges)).or_default() += 1;
        ControlFlow::Continue(())
    });
    let mut cocones = 0usize;
    HomSearch::new(m_k.target(), t).for_each_indexed(|nodes, edges| {
        cocones += from_r.get(&then(&m_k_pos, nodes, edges)).copied().unwrap_or(0);
        ControlFlow::Continue(())
    });
    let mut induced = std::collections::BTreeSet::new();
    let mut ok = true;
    HomSearch::new(m_r.target(), t).for_each_indexed(|nodes, edges| {
        let pair = (then(&m_r_pos, nodes, edges), then(&r1_pos, nodes, edges));
        if !induced.insert(pair) {
            ok = false;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    ok && induced.len() == cocones
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Quotients `R + D` by `r(k) ~ m_K(k)` and checks that the induced map to
/// `H` is a bijection on nodes and on edges. Does not assume `m_K` injective.
pub fn canonical_pushout_iso(sq: PushoutSquare<'_>) -> bool {
    let PushoutSquare { m_k, r, m_r, r1 } = sq;
    let rg = r.target();
    let d = m_k.target();
    let h = m_r.target();

    fn classes<T: Ord + Clone, U: Ord + Clone>(
        r_elems: Vec<T>,
        d_elems: Vec<T>,
        glue: Vec<(T, T)>,
        to_h_r: impl Fn(&T) -> U,
        to_h_d: impl Fn(&T) -> U,
        h_elems: Vec<U>,
    ) -> bool {
        let n_r = r_elems.len();
        let r_idx: BTreeMap<&T, usize> = r_elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let d_idx: BTreeMap<&T, usize> = d_elems.iter().enumerate().map(|(i, x)| (x, n_r + i)).collect();
        let mut uf = UnionFind::new(n_r + d_elems.len());
        for (a, b) in &glue {
            uf.union(r_idx[a], d_idx[b]);
        }
        let mut class_image: BTreeMap<usize, U> = BTreeMap::new();
        let images = r_elems
            .iter()
            .map(|x| (r_idx[x], to_h_r(x)))
            .chain(d_elems.iter().map(|x| (d_idx[x], to_h_d(x))));
        for (i, img) in images {
            let c = uf.find(i);
            match class_image.get(&c) {
                Some(prev) if *prev != img => return false,
                Some(_) => {}
                None => {
                    class_image.insert(c, img);
                }
            }
        }
        let mut hit: Vec<U> = class_image.into_values().collect();
        let n = hit.len();
        hit.sort();
        hit.dedup();
        let mut all = h_elems;
        all.sort();
        hit.len() == n && hit == all
    }

    let nodes_ok = classes(
        rg.nodes().cloned().collect(),
        d.nodes().cloned().collect(),
        m_k.node_map()
            .iter()
            .map(|(k, dk)| (r.node(k).clone(), dk.clone()))
            .collect(),
        |x| m_r.node(x).clone(),
        |x| r1.node(x).clone(),
        h.nodes().cloned().collect(),
    );
    let edges_ok = classes(
        rg.edges().map(|(e, _)| e.clone()).collect(),
        d.edges().map(|(e, _)| e.clone()).collect(),
        m_k.edge_map()
            .iter()
            .map(|(k, dk)| (r.edge(k).clone(), dk.clone()))
            .collect(),
        |x| m_r.edge(x).clone(),
        |x| r1.edge(x).clone(),
        h.edges().map(|(e, _)| e.clone()).collect(),
    );
    nodes_ok && edges_ok
}
