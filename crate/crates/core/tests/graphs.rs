use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqpo::categorical::{
    fpbc_graphs, pullback_graphs, pushout_graphs, verify_fpbc, verify_pullback, verify_pushout, FpbcSquare,
    PushoutSquare,
};
use sqpo::gen;
use sqpo::graph::validate_graph;
use sqpo::morphism::{enumerate_morphisms, is_injective, is_isomorphic, validate_morphism};
use sqpo::{compose, EdgeId, EnumBound, Graph, GraphError, GraphMorphism, MorphismError, NodeId};

fn arc(g: Graph) -> Arc<Graph> {
    Arc::new(g)
}

fn lambda_g() -> Arc<Graph> {
    arc(Graph::from_lists(
        &["n", "m", "p"],
        &[("np", "n", "p"), ("mn", "m", "n"), ("pm", "p", "m")],
    ))
}

fn step_l() -> Arc<Graph> {
    arc(Graph::from_lists(&["n", "m", "p"], &[("np", "n", "p")]))
}

fn step_k() -> Arc<Graph> {
    arc(Graph::from_lists(&["n", "m", "m'", "p"], &[]))
}

fn step_legs() -> (GraphMorphism, GraphMorphism) {
    let l = GraphMorphism::from_pairs(
        &step_k(),
        &step_l(),
        &[("n", "n"), ("m", "m"), ("m'", "m"), ("p", "p")],
        &[],
    );
    let m_l = GraphMorphism::from_pairs(
        &step_l(),
        &lambda_g(),
        &[("n", "n"), ("m", "m"), ("p", "p")],
        &[("np", "np")],
    );
    (l, m_l)
}

/// Head-to-tail pairs of the edges, as node names.
fn shape(g: &Graph) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = g.edges().map(|(_, e)| (e.src.to_string(), e.tgt.to_string())).collect();
    v.sort();
    v
}

#[test]
fn graph_validation() {
    assert!(validate_graph(Vec::<NodeId>::new(), Vec::new()).is_ok());
    let ok = validate_graph(
        ["n", "m", "p"].map(NodeId::new),
        [("np", "n", "p"), ("mn", "m", "n"), ("pm", "p", "m")]
            .map(|(e, s, t)| (EdgeId::new(e), NodeId::new(s), NodeId::new(t))),
    );
    assert!(ok.is_ok());
    let errs = validate_graph(
        [NodeId::new("n"), NodeId::new("n")],
        [(EdgeId::new("e"), NodeId::new("x"), NodeId::new("n"))],
    )
    .unwrap_err();
    assert!(errs.contains(&GraphError::DuplicateNode(NodeId::new("n"))));
    assert!(errs
        .iter()
        .any(|e| matches!(e, GraphError::DanglingEndpoint { node, .. } if node.as_str() == "x")));
}

#[test]
fn morphism_validation() {
    let g = lambda_g();
    let id = GraphMorphism::identity(&g);
    assert!(validate_morphism(&g, &g, id.node_map(), id.edge_map()).is_ok());
    let (l, _) = step_legs();
    assert!(!is_injective(&l));

    // n->p sent to m->n: the source of the image is m, not n
    let bad_nodes: BTreeMap<NodeId, NodeId> = [("n", "n"), ("m", "m"), ("p", "p")]
        .map(|(a, b)| (NodeId::new(a), NodeId::new(b)))
        .into();
    let bad_edges: BTreeMap<EdgeId, EdgeId> = [(EdgeId::new("np"), EdgeId::new("mn"))].into();
    let errs = validate_morphism(&step_l(), &g, &bad_nodes, &bad_edges).unwrap_err();
    assert!(errs
        .iter()
        .any(|e| matches!(e, MorphismError::IncidenceViolation { .. })));
    let errs = validate_morphism(&step_l(), &g, &BTreeMap::new(), &bad_edges).unwrap_err();
    assert!(errs.iter().any(|e| matches!(e, MorphismError::MissingMapping(_))));
}

#[test]
fn composition_of_the_step() {
    let (l, m_l) = step_legs();
    let diag = compose(&l, &m_l).unwrap();
    assert_eq!(diag.node(&NodeId::new("m'")), &NodeId::new("m"));
    assert!(validate_morphism(diag.source(), diag.target(), diag.node_map(), diag.edge_map()).is_ok());
    assert_eq!(compose(&GraphMorphism::identity(l.source()), &l).unwrap(), l);
    assert!(is_injective(&m_l));
    assert!(compose(&m_l, &l).is_err());
}

#[test]
fn composition_is_associative_and_unital() {
    let graphs: Vec<Arc<Graph>> = gen::all_graphs(2, 1).into_iter().map(arc).collect();
    let bound = EnumBound::default();
    let mut triples = 0;
    for a in &graphs {
        for b in &graphs {
            for c in &graphs {
                for f in enumerate_morphisms(a, b, bound).unwrap() {
                    let ida = GraphMorphism::identity(a);
                    assert_eq!(compose(&ida, &f).unwrap(), f);
                    assert_eq!(compose(&f, &GraphMorphism::identity(b)).unwrap(), f);
                    for g in enumerate_morphisms(b, c, bound).unwrap() {
                        let fg = compose(&f, &g).unwrap();
                        for h in enumerate_morphisms(c, a, bound).unwrap() {
                            let left = compose(&fg, &h).unwrap();
                            let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
                            assert_eq!(left, right);
                            triples += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(triples > 100);
}

/// Every assignment of nodes and edges, kept if incidence is preserved.
fn naive_hom_count(g: &Graph, h: &Graph) -> usize {
    let gn: Vec<&NodeId> = g.nodes().collect();
    let hn: Vec<&NodeId> = h.nodes().collect();
    let ge: Vec<_> = g.edges().collect();
    let he: Vec<_> = h.edges().collect();
    let node_maps = hn.len().pow(gn.len() as u32);
    let edge_maps = he.len().pow(ge.len() as u32);
    let mut count = 0;
    for nm in 0..node_maps {
        let mut x = nm;
        let img: BTreeMap<&NodeId, &NodeId> = gn
            .iter()
            .map(|n| {
                let t = hn[x % hn.len()];
                x /= hn.len();
                (*n, t)
            })
            .collect();
        for em in 0..edge_maps {
            let mut y = em;
            let ok = ge.iter().all(|(_, e)| {
                let (_, t) = he[y % he.len()];
                y /= he.len();
                img[&e.src] == &t.src && img[&e.tgt] == &t.tgt
            });
            if ok {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn enumeration_examples() {
    let bound = EnumBound::default();
    let one = arc(Graph::from_lists(&["v"], &[]));
    let two = arc(Graph::from_lists(&["a", "b"], &[]));
    let loop1 = arc(Graph::from_lists(&["v"], &[("e", "v", "v")]));
    assert_eq!(enumerate_morphisms(&one, &two, bound).unwrap().len(), 2);
    assert_eq!(enumerate_morphisms(&loop1, &lambda_g(), bound).unwrap().len(), 0);
    assert_eq!(enumerate_morphisms(&loop1, &loop1, bound).unwrap().len(), 1);
    let big = arc(gen::all_graphs(5, 0).pop().unwrap());
    assert!(enumerate_morphisms(&big, &big, bound).is_err());
}

#[test]
fn enumeration_is_ordered() {
    let g = arc(Graph::from_lists(&["x", "y"], &[]));
    let h = arc(Graph::from_lists(&["a", "b"], &[]));
    let images: Vec<Vec<String>> = enumerate_morphisms(&g, &h, EnumBound::default())
        .unwrap()
        .iter()
        .map(|f| f.node_map().values().map(|n| n.to_string()).collect())
        .collect();
    assert_eq!(images, [["a", "a"], ["a", "b"], ["b", "a"], ["b", "b"]]);
}

#[test]
fn enumeration_matches_naive_count() {
    let graphs = gen::all_graphs(2, 2);
    for g in &graphs {
        for h in &graphs {
            let (ga, ha) = (arc(g.clone()), arc(h.clone()));
            let n = enumerate_morphisms(&ga, &ha, EnumBound::default()).unwrap().len();
            assert_eq!(n, naive_hom_count(g, h), "{g:?} -> {h:?}");
        }
    }
}

#[test]
fn isomorphism_examples() {
    let b = EnumBound::oracle();
    let g = lambda_g();
    assert_eq!(is_isomorphic(&g, &g, b).unwrap().unwrap(), GraphMorphism::identity(&g));
    let renamed = arc(Graph::from_lists(
        &["a", "b", "c"],
        &[("x", "a", "c"), ("y", "b", "a"), ("z", "c", "b")],
    ));
    assert!(is_isomorphic(&g, &renamed, b).unwrap().is_some());
    let (l, m_l) = step_legs();
    let d = fpbc_graphs(&m_l, &l).unwrap().d;
    assert!(is_isomorphic(&g, &d, b).unwrap().is_none());
}

#[test]
fn fpbc_of_identity_is_the_host() {
    let g = lambda_g();
    let l = step_l();
    let (_, m_l) = step_legs();
    let c = fpbc_graphs(&m_l, &GraphMorphism::identity(&l)).unwrap();
    let iso = is_isomorphic(&c.d, &g, EnumBound::oracle()).unwrap();
    assert!(iso.is_some());
    assert_eq!(shape(&c.d), shape(&g));
}

#[test]
fn fpbc_of_the_lambda_step() {
    let (l, m_l) = step_legs();
    let c = fpbc_graphs(&m_l, &l).unwrap();
    assert_eq!(
        shape(&c.d),
        [("m", "n"), ("m'", "n"), ("p", "m"), ("p", "m'")].map(|(a, b)| (a.to_string(), b.to_string()))
    );
    assert!(is_injective(&c.m_k));
    let sq = FpbcSquare {
        m_l: &m_l,
        l: &l,
        m_k: &c.m_k,
        l1: &c.l1,
    };
    assert!(verify_fpbc(sq, EnumBound::oracle()).unwrap());
}

#[test]
fn cloning_a_loop_gives_four_loops() {
    let g = arc(Graph::from_lists(&["v"], &[("e", "v", "v")]));
    let l = arc(Graph::from_lists(&["v"], &[]));
    let k = arc(Graph::from_lists(&["v1", "v2"], &[]));
    let leg = GraphMorphism::from_pairs(&k, &l, &[("v1", "v"), ("v2", "v")], &[]);
    let m = GraphMorphism::from_pairs(&l, &g, &[("v", "v")], &[]);
    let c = fpbc_graphs(&m, &leg).unwrap();
    assert_eq!((c.d.node_count(), c.d.edge_count()), (2, 4));
    let bound = EnumBound::oracle();
    assert!(verify_fpbc(
        FpbcSquare {
            m_l: &m,
            l: &leg,
            m_k: &c.m_k,
            l1: &c.l1
        },
        bound
    )
    .unwrap());
}

#[test]
fn dropping_a_cloned_edge_breaks_finality() {
    let (l, m_l) = step_legs();
    let c = fpbc_graphs(&m_l, &l).unwrap();
    let clone =
        c.d.edges()
            .find(|(_, e)| e.src.as_str() == "p" && e.tgt.as_str() == "m'")
            .map(|(id, _)| id.clone())
            .unwrap();
    let mut thin = Graph::new();
    for n in c.d.nodes() {
        thin.add_node(n.clone()).unwrap();
    }
    for (id, e) in c.d.edges().filter(|(id, _)| **id != clone) {
        thin.add_edge(id.clone(), e.src.clone(), e.tgt.clone()).unwrap();
    }
    let thin = arc(thin);
    let m_k = GraphMorphism::new(
        c.m_k.source().clone(),
        thin.clone(),
        c.m_k.node_map().clone(),
        BTreeMap::new(),
    )
    .unwrap();
    let mut edges = c.l1.edge_map().clone();
    edges.remove(&clone);
    let l1 = GraphMorphism::new(thin, c.l1.target().clone(), c.l1.node_map().clone(), edges).unwrap();
    let sq = FpbcSquare {
        m_l: &m_l,
        l: &l,
        m_k: &m_k,
        l1: &l1,
    };
    assert!(!verify_fpbc(sq, EnumBound::oracle()).unwrap());
}

#[test]
fn non_injective_match_is_rejected() {
    let l = arc(Graph::from_lists(&["a", "b"], &[]));
    let g = arc(Graph::from_lists(&["v"], &[]));
    let m = GraphMorphism::from_pairs(&l, &g, &[("a", "v"), ("b", "v")], &[]);
    assert!(fpbc_graphs(&m, &GraphMorphism::identity(&l)).is_err());
    assert!(pushout_graphs(&m, &GraphMorphism::identity(&l)).is_err());
}

#[test]
fn pushout_of_the_lambda_step() {
    let (l, m_l) = step_legs();
    let c = fpbc_graphs(&m_l, &l).unwrap();
    let r = GraphMorphism::identity(&step_k());
    let p = pushout_graphs(&c.m_k, &r).unwrap();
    assert_eq!(shape(&p.h), shape(&c.d));
    assert!(is_isomorphic(&p.h, &c.d, EnumBound::oracle()).unwrap().is_some());
    let sq = PushoutSquare {
        m_k: &c.m_k,
        r: &r,
        m_r: &p.m_r,
        r1: &p.r1,
    };
    assert!(verify_pushout(sq, EnumBound::oracle()).unwrap());
}

#[test]
fn pushout_merges() {
    let k = arc(Graph::from_lists(&["k1", "k2"], &[]));
    let d = arc(Graph::from_lists(
        &["k1", "k2", "c"],
        &[("x", "k1", "c"), ("y", "c", "k2")],
    ));
    let rg = arc(Graph::from_lists(&["rho"], &[]));
    let m_k = GraphMorphism::from_pairs(&k, &d, &[("k1", "k1"), ("k2", "k2")], &[]);
    let r = GraphMorphism::from_pairs(&k, &rg, &[("k1", "rho"), ("k2", "rho")], &[]);
    let p = pushout_graphs(&m_k, &r).unwrap();
    assert_eq!(p.h.node_count(), 2);
    let rho = p.m_r.node(&NodeId::new("rho")).to_string();
    assert_eq!(shape(&p.h), [("c".to_string(), rho.clone()), (rho, "c".to_string())]);
    let sq = PushoutSquare {
        m_k: &m_k,
        r: &r,
        m_r: &p.m_r,
        r1: &p.r1,
    };
    assert!(verify_pushout(sq, EnumBound::oracle()).unwrap());

    // everything squashed onto one loop commutes but is not initial
    let squashed = arc(Graph::from_lists(&["rho"], &[("z", "rho", "rho")]));
    let m_r = GraphMorphism::from_pairs(&rg, &squashed, &[("rho", "rho")], &[]);
    let r1 = GraphMorphism::from_pairs(
        &d,
        &squashed,
        &[("k1", "rho"), ("k2", "rho"), ("c", "rho")],
        &[("x", "z"), ("y", "z")],
    );
    assert!(!verify_pushout(
        PushoutSquare {
            m_k: &m_k,
            r: &r,
            m_r: &m_r,
            r1: &r1
        },
        EnumBound::oracle()
    )
    .unwrap());
}

#[test]
fn pullback_examples() {
    let b = EnumBound::oracle();
    let g = lambda_g();
    let (l, m_l) = step_legs();
    let id = GraphMorphism::identity(&g);
    let pb = pullback_graphs(&m_l, &id).unwrap();
    assert!(is_isomorphic(&pb.apex, m_l.source(), b).unwrap().is_some());
    assert!(verify_pullback(&pb.left_leg, &pb.right_leg, &m_l, &id, b).unwrap());

    let pt = arc(Graph::from_lists(&["*"], &[]));
    let two = arc(Graph::from_lists(&["a", "b"], &[]));
    let f = GraphMorphism::from_pairs(&pt, &two, &[("*", "a")], &[]);
    let pb = pullback_graphs(&f, &f).unwrap();
    assert_eq!((pb.apex.node_count(), pb.apex.edge_count()), (1, 0));

    let c = fpbc_graphs(&m_l, &l).unwrap();
    let pb = pullback_graphs(&m_l, &c.l1).unwrap();
    assert!(is_isomorphic(&pb.apex, l.source(), b).unwrap().is_some());
    assert!(verify_pullback(&pb.left_leg, &pb.right_leg, &m_l, &c.l1, b).unwrap());
}

#[test]
fn match_fiber_lies_in_interface() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let s = gen::random_plain_step(&mut rng, 4, 4);
        let c = fpbc_graphs(&s.m, &s.l).unwrap();
        assert!(is_injective(&c.m_k));
        let matched: std::collections::BTreeSet<_> = s.m.source().elems().map(|x| s.m.apply(&x)).collect();
        let in_k: std::collections::BTreeSet<_> = c.m_k.source().elems().map(|x| c.m_k.apply(&x)).collect();
        for x in c.d.elems() {
            if matched.contains(&c.l1.apply(&x)) {
                assert!(in_k.contains(&x), "{x} lies over the match but outside K");
            }
        }
    }
}

/// The same node and edge sets listed in another order.
fn reorder(g: &Graph, seed: u64) -> Graph {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<NodeId> = g.nodes().cloned().collect();
    let mut edges: Vec<(EdgeId, NodeId, NodeId)> = g
        .edges()
        .map(|(id, e)| (id.clone(), e.src.clone(), e.tgt.clone()))
        .collect();
    nodes.shuffle(&mut rng);
    edges.shuffle(&mut rng);
    validate_graph(nodes, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_squares_satisfy_the_oracles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gen::random_plain_step(&mut rng, 4, 4);
        let bound = EnumBound::oracle();
        let c = fpbc_graphs(&s.m, &s.l).unwrap();
        let sq = FpbcSquare { m_l: &s.m, l: &s.l, m_k: &c.m_k, l1: &c.l1 };
        prop_assert!(verify_fpbc(sq, bound).unwrap());
        let p = pushout_graphs(&c.m_k, &s.r).unwrap();
        let sq = PushoutSquare { m_k: &c.m_k, r: &s.r, m_r: &p.m_r, r1: &p.r1 };
        prop_assert!(verify_pushout(sq, bound).unwrap());
    }

    #[test]
    fn pushout_is_stable_under_reordering(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = gen::random_plain_step(&mut rng, 4, 4);
        let c = fpbc_graphs(&s.m, &s.l).unwrap();
        let p = pushout_graphs(&c.m_k, &s.r).unwrap();
        let d2 = arc(reorder(&c.d, seed));
        let r2 = s.r.with_target(arc(reorder(s.r.target(), seed ^ 1)));
        let p2 = pushout_graphs(&c.m_k.with_target(d2), &r2).unwrap();
        prop_assert!(is_isomorphic(&p.h, &p2.h, EnumBound::oracle()).unwrap().is_some());
        prop_assert_eq!(&*p.h, &*p2.h);
    }

    #[test]
    fn clone_count_law(p in 0usize..4, q in 0usize..4) {
        // an edge a->b with a cloned p times and b cloned q times
        let g = arc(Graph::from_lists(&["a", "b"], &[("e", "a", "b")]));
        let l = arc(Graph::from_lists(&["a", "b"], &[]));
        let leg = gen::left_leg(&l, |n| if n.as_str() == "a" { p } else { q }, |_, _, _| true);
        let m = GraphMorphism::from_pairs(&l, &g, &[("a", "a"), ("b", "b")], &[]);
        let c = fpbc_graphs(&m, &leg).unwrap();
        prop_assert_eq!(c.d.edge_count(), p * q);
        let l_one = arc(Graph::from_lists(&["a"], &[]));
        let leg = gen::left_leg(&l_one, |_| p, |_, _, _| true);
        let m = GraphMorphism::from_pairs(&l_one, &g, &[("a", "a")], &[]);
        prop_assert_eq!(fpbc_graphs(&m, &leg).unwrap().d.edge_count(), p);
    }
}
