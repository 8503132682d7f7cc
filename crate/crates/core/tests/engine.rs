use serde_json::{json, Value};
use sqpo::attr::AttrGraph;
use sqpo::engine::io::{read_host, read_rule, rule_documents};
use sqpo::engine::{
    apply_rewrite, attr_isomorphic, find_matches, first_match, rename_graph, run_strategy, transport_match,
    validate_rule, verify_trace, AlgebraDomain, EngineError, Host, LambdaDomain, RewriteDomain, Rule, RuleError,
    StrategyRegistry,
};
use sqpo::graph::{Elem, NodeId};
use sqpo::morphism::EnumBound;

const LAMBDA_GRAPH: &str = include_str!("../../cli/demos/lambda/graph.json");
const LAMBDA_RULE: &str = include_str!("../../cli/demos/lambda/rule.json");
const LAMBDA_D: &str = include_str!("../../cli/demos/lambda/expected_D.json");
const LAMBDA_H: &str = include_str!("../../cli/demos/lambda/expected_H.json");
const G1: &str = include_str!("../../cli/demos/cloud/g1.json");
const CREATE_VM: &str = include_str!("../../cli/demos/cloud/create_vm.json");
const CLOUD_RULES: &str = include_str!("../../cli/demos/cloud/rules.json");

fn parse(src: &str) -> Value {
    serde_json::from_str(src).unwrap()
}

fn host<D: RewriteDomain>(d: &D, v: Value) -> Host<D> {
    read_host(d, &v).unwrap()
}

fn rule<D: RewriteDomain>(d: &D, v: Value) -> Rule<D> {
    read_rule(d, &v, "rule").unwrap()
}

fn lambda() -> (LambdaDomain, Host<LambdaDomain>, Rule<LambdaDomain>) {
    let d = LambdaDomain::default();
    let h = host(&d, parse(LAMBDA_GRAPH));
    let r = rule(&d, parse(LAMBDA_RULE));
    (d, h, r)
}

/// The one-node rule `n:x`, keeping `n` unchanged or deleting it.
fn single_node(k: bool) -> Value {
    let kn = if k { json!([{ "id": "n" }]) } else { json!([]) };
    let rn = if k {
        json!([{ "id": "n", "attr": "x" }])
    } else {
        json!([])
    };
    json!({
        "name": "single",
        "domain": "lambda",
        "attr_object": { "vars": { "x": "i" } },
        "L": { "nodes": [{ "id": "n", "attr": "x" }], "edges": [] },
        "K": { "nodes": kn, "edges": [] },
        "R": { "nodes": rn, "edges": [] },
        "l": {},
        "r": {}
    })
}

fn base_points(names: &[&str]) -> Value {
    let vars: serde_json::Map<String, Value> = names.iter().map(|n| (n.to_string(), json!("i"))).collect();
    let mut nodes: Vec<Value> = names
        .iter()
        .map(|n| json!({ "id": format!("v{n}"), "attr": n }))
        .collect();
    nodes.push(json!({ "id": "id", "attr": "\\u:i. u" }));
    let edges: Vec<Value> = names
        .iter()
        .map(|n| json!({ "id": format!("e{n}"), "src": "id", "tgt": format!("v{n}") }))
        .collect();
    json!({ "domain": "lambda", "attr_object": { "vars": vars }, "nodes": nodes, "edges": edges })
}

#[test]
fn demo_rules_validate() {
    let (d, _, r) = lambda();
    validate_rule(&d, &r).unwrap();
    let a = AlgebraDomain::cloud();
    validate_rule(&a, &rule(&a, parse(CREATE_VM))).unwrap();
    let all = parse(CLOUD_RULES);
    for (i, doc) in rule_documents(&all).unwrap().into_iter().enumerate() {
        let r = read_rule(&a, doc, &format!("rules[{i}]")).unwrap();
        validate_rule(&a, &r).unwrap_or_else(|e| panic!("{}: {e:?}", r.name));
    }
}

#[test]
fn interface_attribute_must_survive() {
    let d = LambdaDomain::default();
    let mut v = parse(LAMBDA_RULE);
    v["K"]["nodes"][0] = json!({ "id": "n", "attr": "x" });
    let r = rule(&d, v);
    let errs = validate_rule(&d, &r).unwrap_err();
    assert!(
        errs.iter()
            .any(|e| matches!(e, RuleError::NotPreserving { leg: "r", elem: Elem::Node(n), .. } if n.0 == "n")),
        "{errs:?}"
    );
}

#[test]
fn unanchored_right_variable() {
    let d = LambdaDomain::default();
    let mut v = single_node(true);
    v["attr_object"]["vars"]["z"] = json!("i");
    v["R"]["nodes"][0]["attr"] = json!("z");
    let errs = validate_rule(&d, &rule(&d, v)).unwrap_err();
    assert!(errs.contains(&RuleError::Unanchored("z".into())), "{errs:?}");
}

#[test]
fn lambda_match_and_substitution() {
    let (d, h, r) = lambda();
    let ms = find_matches(&d, &h, &r).unwrap();
    assert_eq!(ms.len(), 1);
    let m = &ms[0];
    for n in ["n", "m", "p"] {
        assert_eq!(m.morphism.node(&NodeId::new(n)), &NodeId::new(n));
    }
    let sigma = d.map_to_json(&m.attr);
    assert_eq!(sigma["x"], json!("w"));
    assert_eq!(d.map_to_json(&m.attr).as_object().unwrap().len(), 3);
}

#[test]
fn match_counts_follow_occurrences() {
    let d = LambdaDomain::default();
    let r = rule(&d, single_node(true));
    for names in [vec![], vec!["w"], vec!["v", "w"], vec!["a", "b", "c"]] {
        let h = host(&d, base_points(&names));
        // the identity node is not of base type
        assert_eq!(find_matches(&d, &h, &r).unwrap().len(), names.len());
    }
}

#[test]
fn missing_edge_blocks_match() {
    let (d, _, r) = lambda();
    let mut g = parse(LAMBDA_GRAPH);
    g["edges"].as_array_mut().unwrap().retain(|e| e["id"] != "np");
    let h = host(&d, g);
    assert!(find_matches(&d, &h, &r).unwrap().is_empty());
    assert!(first_match(&d, &h, &r).unwrap().is_none());
}

#[test]
fn golden_step_complement_and_result() {
    let (d, h, r) = lambda();
    let m = first_match(&d, &h, &r).unwrap().unwrap();
    let trace = apply_rewrite(&d, &h, &r, &m).unwrap();
    let want_d = host(&d, parse(LAMBDA_D)).graph;
    let want_h = host(&d, parse(LAMBDA_H)).graph;
    // D carries attributes only where K does
    assert_eq!(trace.d().graph.node_count(), want_d.graph.node_count());
    assert_eq!(trace.d().graph.edge_count(), want_d.graph.edge_count());
    assert!(attr_isomorphic(trace.h(), &want_h).is_some());
    assert!(verify_trace(&d, &r, &trace, EnumBound::oracle()).unwrap().ok());
}

#[test]
fn identity_rule_leaves_host_unchanged() {
    let d = LambdaDomain::default();
    let r = rule(&d, single_node(true));
    let h = host(&d, base_points(&["v", "w"]));
    for m in find_matches(&d, &h, &r).unwrap() {
        let trace = apply_rewrite(&d, &h, &r, &m).unwrap();
        assert!(attr_isomorphic(trace.h(), &h.graph).is_some());
    }
}

#[test]
fn deletion_removes_dangling_edges() {
    let d = LambdaDomain::default();
    let r = rule(&d, single_node(false));
    let h = host(&d, base_points(&["v", "w"]));
    let ms = find_matches(&d, &h, &r).unwrap();
    let m = ms
        .iter()
        .find(|m| m.morphism.node(&NodeId::new("n")).0 == "vw")
        .unwrap();
    let trace = apply_rewrite(&d, &h, &r, m).unwrap();
    let out = &trace.h().graph;
    assert_eq!(out.node_count(), 2);
    assert_eq!(out.edge_count(), 1);
    assert!(!out.has_node(&NodeId::new("vw")));
    assert!(verify_trace(&d, &r, &trace, EnumBound::oracle()).unwrap().ok());
}

#[test]
fn cloning_copies_incident_edges() {
    let d = LambdaDomain::default();
    let r = rule(
        &d,
        json!({
            "name": "clone",
            "domain": "lambda",
            "attr_object": { "vars": { "x": "i" } },
            "L": { "nodes": [{ "id": "n", "attr": "x" }], "edges": [] },
            "K": { "nodes": [{ "id": "n" }, { "id": "n2" }], "edges": [] },
            "R": { "nodes": [{ "id": "n", "attr": "x" }, { "id": "n2", "attr": "x" }], "edges": [] },
            "l": { "nodes": { "n2": "n" } },
            "r": {}
        }),
    );
    validate_rule(&d, &r).unwrap();
    let h = host(&d, base_points(&["w"]));
    let m = first_match(&d, &h, &r).unwrap().unwrap();
    let trace = apply_rewrite(&d, &h, &r, &m).unwrap();
    let out = trace.h();
    assert_eq!(out.graph.node_count(), 3);
    assert_eq!(out.graph.edge_count(), 2);
    for (_, e) in out.graph.edges() {
        assert_eq!(e.src, NodeId::new("id"));
        assert_eq!(out.get(&Elem::Node(e.tgt.clone())).unwrap().to_string(), "w");
    }
}

fn name_of(prefix: &str, x: &Elem) -> String {
    match x {
        Elem::Node(n) => format!("{prefix}{}", n.0),
        Elem::Edge(e) => format!("{prefix}{}", e.0),
    }
}

#[test]
fn result_is_unique_up_to_renaming() {
    let (d, h, r) = lambda();
    let m = first_match(&d, &h, &r).unwrap().unwrap();
    let direct = apply_rewrite(&d, &h, &r, &m).unwrap();
    let (renamed, iso) = rename_graph(&h.graph, |x| name_of("z_", x));
    let h2 = Host {
        object: h.object.clone(),
        graph: renamed,
    };
    let m2 = transport_match(&m, &iso);
    let moved = apply_rewrite(&d, &h2, &r, &m2).unwrap();
    assert!(attr_isomorphic(direct.h(), moved.h()).is_some());
    assert!(attr_isomorphic(direct.d(), moved.d()).is_some());
    assert_eq!(find_matches(&d, &h2, &r).unwrap().len(), 1);
}

#[test]
fn foreign_match_is_rejected() {
    let (d, h, r) = lambda();
    let m = first_match(&d, &h, &r).unwrap().unwrap();
    let (renamed, _) = rename_graph(&h.graph, |x| name_of("q", x));
    let other = Host {
        object: h.object.clone(),
        graph: renamed,
    };
    assert!(matches!(apply_rewrite(&d, &other, &r, &m), Err(EngineError::BadMatch)));
}

#[test]
fn strategies() {
    let a = AlgebraDomain::cloud();
    let g1 = host(&a, parse(G1));
    let rules = vec![rule(&a, parse(CREATE_VM))];
    let reg = StrategyRegistry::standard();
    for name in ["first-match", "all-matches-sequential", "fixpoint"] {
        let s = reg.get(name).unwrap();
        let (traces, summary) = run_strategy(&a, &g1, &rules, s.as_ref(), 10).unwrap();
        assert_eq!(summary.steps, 2, "{name}");
        assert_eq!(traces.len(), 2);
        assert!(!summary.exhausted);
        let last = traces.last().unwrap().h();
        assert!(find_matches(
            &a,
            &Host {
                object: g1.object.clone(),
                graph: last.clone()
            },
            &rules[0]
        )
        .unwrap()
        .is_empty());

        let (traces, summary) = run_strategy(&a, &g1, &rules, s.as_ref(), 0).unwrap();
        assert!(traces.is_empty());
        assert_eq!(summary.steps, 0);
        assert!(summary.exhausted);
    }
    assert!(reg.get("nonsense").is_none());
}

#[test]
fn strategy_without_matches() {
    let d = LambdaDomain::default();
    let rules = vec![rule(&d, single_node(false))];
    let h = host(&d, base_points(&[]));
    let s = StrategyRegistry::standard().get("fixpoint").unwrap();
    let (traces, summary) = run_strategy(&d, &h, &rules, s.as_ref(), 5).unwrap();
    assert!(traces.is_empty());
    assert_eq!(summary.steps, 0);
}

#[test]
fn deleting_strategy_runs_to_empty() {
    let d = LambdaDomain::default();
    let rules = vec![rule(&d, single_node(false))];
    let h = host(&d, base_points(&["a", "b", "c"]));
    let s = StrategyRegistry::standard().get("first-match").unwrap();
    let (traces, summary) = run_strategy(&d, &h, &rules, s.as_ref(), 2).unwrap();
    assert_eq!(summary.steps, 2);
    assert!(summary.exhausted);
    let (traces_all, summary) = run_strategy(&d, &h, &rules, s.as_ref(), 10).unwrap();
    assert_eq!(summary.steps, 3);
    let last: &AttrGraph<_> = traces_all.last().unwrap().h();
    assert_eq!(last.graph.node_count(), 1);
    assert_eq!(last.graph.edge_count(), 0);
    assert_eq!(traces[1].h().graph.node_count(), 2);
}
