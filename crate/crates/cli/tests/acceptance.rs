//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sqpo::algebra::{AlgTerm, CloudConfig};
use sqpo::attr::AttrGraph;
use sqpo::categorical::{fpbc_graphs, pushout_graphs, verify_fpbc, verify_pushout, FpbcSquare, PushoutSquare};
use sqpo::engine::io::{read_host, read_rule};
use sqpo::engine::{
    apply_rewrite, attr_isomorphic, find_matches, verify_trace, AlgebraDomain, Host, LambdaDomain, RewriteDomain, Rule,
};
use sqpo::gen;
use sqpo::graph::{EdgeId, Elem, Graph, NodeId};
use sqpo::lambda::{normalize, parse_term, Term};
use sqpo::morphism::{EnumBound, GraphMorphism};
use sqpo_cli::demos;

type Outcome = Result<String, String>;

fn demo(path: &str) -> Value {
    serde_json::from_str(demos::get(path).unwrap_or_else(|| panic!("missing demo {path}"))).expect("demo is JSON")
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn lambda_graph(nodes: &[(&str, Option<&str>)], edges: &[(&str, &str, &str)]) -> AttrGraph<Term> {
    let names: Vec<&str> = nodes.iter().map(|(n, _)| *n).collect();
    let g = Arc::new(Graph::from_lists(&names, edges));
    let att = nodes
        .iter()
        .filter_map(|(n, t)| t.map(|t| (Elem::Node(NodeId::new(*n)), parse_term(t).expect("term"))))
        .collect();
    AttrGraph::new(g, att).expect("attribution")
}

fn golden_step() -> Outcome {
    let d = LambdaDomain::default();
    let host = read_host(&d, &demo("lambda/graph.json")).map_err(|e| e.to_string())?;
    let rule = read_rule(&d, &demo("lambda/rule.json"), "rule").map_err(|e| e.to_string())?;
    let ms = find_matches(&d, &host, &rule).map_err(|e| e.to_string())?;
    ensure(ms.len() == 1, || format!("{} matches, expected 1", ms.len()))?;
    let trace = apply_rewrite(&d, &host, &rule, &ms[0]).map_err(|e| e.to_string())?;
    let want_d = lambda_graph(
        &[
            ("n", None),
            ("m", Some("\\u:i. u")),
            ("p", Some("\\s:i. \\t:i. s")),
            ("m'", None),
        ],
        &[("a", "m", "n"), ("b", "m'", "n"), ("c", "p", "m"), ("d", "p", "m'")],
    );
    let want_h = lambda_graph(
        &[
            ("n", Some("w")),
            ("m", Some("\\u:i. u")),
            ("p", Some("\\s:i. \\t:i. s")),
            ("m'", Some("\\s:i. \\t:i. s")),
        ],
        &[("a", "m", "n"), ("b", "m'", "n"), ("c", "p", "m"), ("d", "p", "m'")],
    );
    ensure(attr_isomorphic(trace.d(), &want_d).is_some(), || {
        "D is not isomorphic to the expected complement".into()
    })?;
    ensure(attr_isomorphic(trace.h(), &want_h).is_some(), || {
        "H is not isomorphic to the expected result".into()
    })?;
    Ok("D and H match up to isomorphism".into())
}

fn normal_form() -> Outcome {
    let t = parse_term("(\\s:i. \\t:i. s) w (\\u:i. u)").map_err(|e| e.to_string())?;
    let start = Instant::now();
    let nf = normalize(&t).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(nf == Term::var("w"), || format!("normal form {nf}, expected w"))?;
    ensure(took < Duration::from_millis(1), || format!("took {took:?}"))?;
    Ok(format!("w in {took:?}"))
}

fn plain_square(m_l: &GraphMorphism, l: &GraphMorphism, r: &GraphMorphism) -> Result<(), String> {
    let bound = EnumBound::oracle();
    let c = fpbc_graphs(m_l, l).map_err(|e| e.to_string())?;
    let fpbc = verify_fpbc(
        FpbcSquare {
            m_l,
            l,
            m_k: &c.m_k,
            l1: &c.l1,
        },
        bound,
    )
    .map_err(|e| e.to_string())?;
    ensure(fpbc, || "FPBC oracle failed".into())?;
    let p = pushout_graphs(&c.m_k, r).map_err(|e| e.to_string())?;
    let po = verify_pushout(
        PushoutSquare {
            m_k: &c.m_k,
            r,
            m_r: &p.m_r,
            r1: &p.r1,
        },
        bound,
    )
    .map_err(|e| e.to_string())?;
    ensure(po, || "pushout oracle failed".into())
}

fn universal_properties() -> Outcome {
    let hosts = gen::all_graphs(3, 3);
    let lhss: Vec<Arc<Graph>> = gen::all_graphs(2, 2).into_iter().map(Arc::new).collect();
    let spans: Vec<_> = lhss.iter().map(|l| (l.clone(), gen::span_catalogue(l))).collect();
    let mut squares = 0usize;
    for g in hosts {
        let g = Arc::new(g);
        for (l, legs) in &spans {
            for m in gen::injections(l, &g) {
                for (ll, rr) in legs {
                    plain_square(&m, ll, rr).map_err(|e| format!("{e} on host {g:?} with leg {ll:?}"))?;
                    squares += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let s = gen::random_plain_step(&mut rng, 4, 4);
        plain_square(&s.m, &s.l, &s.r).map_err(|e| format!("{e} on {:?}", s.m))?;
        squares += 1;
    }
    Ok(format!("{squares} squares"))
}

/// Host with node `v`, `i` in-edges and `o` out-edges from and to other
/// nodes, `loops` loops on `v`, plus some unrelated edges.
fn star<R: Rng>(rng: &mut R, i: usize, o: usize, loops: usize) -> (Arc<Graph>, usize) {
    let mut g = Graph::new();
    g.add_node(NodeId::new("v")).expect("fresh");
    let others = rng.gen_range(1..=3);
    for j in 0..others {
        g.add_node(NodeId(format!("u{j}"))).expect("fresh");
    }
    let pick = |rng: &mut R| NodeId(format!("u{}", rng.gen_range(0..others)));
    for j in 0..i {
        g.add_edge(EdgeId(format!("in{j}")), pick(rng), NodeId::new("v"))
            .expect("fresh");
    }
    for j in 0..o {
        g.add_edge(EdgeId(format!("out{j}")), NodeId::new("v"), pick(rng))
            .expect("fresh");
    }
    for j in 0..loops {
        g.add_edge(EdgeId(format!("loop{j}")), NodeId::new("v"), NodeId::new("v"))
            .expect("fresh");
    }
    let extra = rng.gen_range(0..3);
    for j in 0..extra {
        let (a, b) = (pick(rng), pick(rng));
        g.add_edge(EdgeId(format!("x{j}")), a, b).expect("fresh");
    }
    (Arc::new(g), extra)
}

fn at_v(single: &Arc<Graph>, g: &Arc<Graph>) -> GraphMorphism {
    GraphMorphism::new(
        single.clone(),
        g.clone(),
        [(NodeId::new("v"), NodeId::new("v"))].into(),
        BTreeMap::new(),
    )
    .expect("v is a node of the host")
}

fn counting_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let single = Arc::new(Graph::from_lists(&["v"], &[]));
    let mut checked = 0;
    for _ in 0..3 {
        for i in 0..=3 {
            for o in 0..=3 {
                for k in 0..=3 {
                    let l = gen::left_leg(&single, |_| k, |_, _, _| true);
                    let (g, extra) = star(&mut rng, i, o, 0);
                    let m = at_v(&single, &g);
                    let c = fpbc_graphs(&m, &l).map_err(|e| e.to_string())?;
                    let linking = c.d.edge_count() - extra;
                    ensure(linking == k * (i + o), || {
                        format!("i={i} o={o} k={k}: {linking} linking edges")
                    })?;
                    ensure(c.d.node_count() == g.node_count() - 1 + k, || {
                        format!("k={k}: wrong node count")
                    })?;

                    let (g, extra) = star(&mut rng, i, o, 1);
                    let m = at_v(&single, &g);
                    let c = fpbc_graphs(&m, &l).map_err(|e| e.to_string())?;
                    let loops = c.l1.edge_map().values().filter(|e| e.0.starts_with("loop")).count();
                    let linking = c.d.edge_count() - extra - loops;
                    ensure(linking == k * (i + o), || {
                        format!("i={i} o={o} k={k} with a loop: {linking} linking edges")
                    })?;
                    ensure(loops == k * k, || format!("k={k}: {loops} loop clones"))?;

                    let del = gen::left_leg(&single, |_| 0, |_, _, _| true);
                    let loops = rng.gen_range(0..2);
                    let (g, extra) = star(&mut rng, i, o, loops);
                    let m = at_v(&single, &g);
                    let c = fpbc_graphs(&m, &del).map_err(|e| e.to_string())?;
                    ensure(
                        c.d.edge_count() == extra && c.d.node_count() == g.node_count() - 1,
                        || format!("deleting v kept {} edges", c.d.edge_count() - extra),
                    )?;
                    checked += 3;
                }
            }
        }
    }
    Ok(format!("{checked} instances"))
}

fn lambda_application(d: &LambdaDomain, rng: &mut ChaCha8Rng) -> Option<Result<(), String>> {
    let s = gen::random_lambda_step(rng, 4, 4);
    conformance(d, &s.host, &s.rule)
}

fn algebra_application(d: &AlgebraDomain, rng: &mut ChaCha8Rng) -> Option<Result<(), String>> {
    let s = gen::random_algebra_step(rng, 4, 4);
    conformance(d, &s.host, &s.rule)
}

/// `None` when the rule has no match in the host.
fn conformance<D: RewriteDomain>(d: &D, host: &Host<D>, rule: &Rule<D>) -> Option<Result<(), String>> {
    let ms = match find_matches(d, host, rule) {
        Ok(ms) => ms,
        Err(e) => return Some(Err(e.to_string())),
    };
    let m = ms.first()?;
    Some((|| {
        let trace = apply_rewrite(d, host, rule, m).map_err(|e| e.to_string())?;
        let check = verify_trace(d, rule, &trace, EnumBound::oracle()).map_err(|e| e.to_string())?;
        ensure(
            check.cases && check.fiber_in_interface && check.match_strict && check.complement_strict,
            || format!("{} on {:?}: {check:?}", d.name(), host.graph.graph),
        )
    })())
}

fn case_table() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ld = LambdaDomain::default();
    let ad = AlgebraDomain::cloud();
    let (mut lambda, mut algebra) = (0, 0);
    while lambda < 250 {
        if let Some(r) = lambda_application(&ld, &mut rng) {
            r?;
            lambda += 1;
        }
    }
    while algebra < 250 {
        if let Some(r) = algebra_application(&ad, &mut rng) {
            r?;
            algebra += 1;
        }
    }
    Ok(format!("{lambda} lambda and {algebra} algebra applications"))
}

fn config_of(h: &AttrGraph<AlgTerm>, admin: &str) -> Result<CloudConfig, String> {
    match h.get(&Elem::Node(NodeId::new(admin))) {
        Some(AlgTerm::Config(c)) => Ok((**c).clone()),
        other => Err(format!("admin {admin} carries {other:?}")),
    }
}

fn nat(t: &AlgTerm) -> u64 {
    match t {
        AlgTerm::Nat(n) => n.try_into().expect("small natural"),
        other => panic!("{other} is not a natural"),
    }
}

/// Fields of a constructor application such as `(mch 1 100 70)`.
fn fields<'a>(t: &'a AlgTerm, ctor: &str) -> Option<&'a [AlgTerm]> {
    match t {
        AlgTerm::App(op, args) if op == ctor => Some(args),
        _ => None,
    }
}

fn label(h: &AttrGraph<AlgTerm>, e: &EdgeId) -> String {
    h.get(&Elem::Edge(e.clone())).map(|t| t.to_string()).unwrap_or_default()
}

/// Requests `(type, id)` whose image is stored, fits on some machine and
/// carries a fresh id: computed directly from the host.
fn satisfiable_requests(h: &AttrGraph<AlgTerm>) -> Result<usize, String> {
    let c = config_of(h, "a")?;
    let mut stored = Vec::new();
    for (e, edge) in h.graph.edges() {
        if label(h, e) == "stores" {
            if let Some(f) = h.get(&Elem::Node(edge.tgt.clone())).and_then(|t| fields(t, "vm")) {
                stored.push((nat(&f[1]), f[2].to_string()));
            }
        }
    }
    let machines: Vec<u64> = h
        .graph
        .nodes()
        .filter_map(|n| {
            h.get(&Elem::Node(n.clone()))
                .and_then(|t| fields(t, "mch"))
                .map(|f| nat(&f[2]))
        })
        .collect();
    let mut count = 0;
    for (e, _) in h.graph.edges() {
        let Some(AlgTerm::App(op, args)) = h.get(&Elem::Edge(e.clone())) else {
            continue;
        };
        if op != "req" {
            continue;
        }
        let (ty, id) = (args[0].to_string(), nat(&args[1]));
        let fresh = c.new_id(&id.into());
        let fits = stored
            .iter()
            .filter(|(_, t)| *t == ty)
            .any(|(size, _)| machines.iter().any(|free| size <= free));
        if fresh && fits {
            count += 1;
        }
    }
    Ok(count)
}

fn algebra_rule(d: &AlgebraDomain, path: &str) -> Result<Rule<AlgebraDomain>, String> {
    read_rule(d, &demo(path), path).map_err(|e| e.to_string())
}

fn cloud_properties() -> Outcome {
    let d = AlgebraDomain::cloud();
    let g1 = read_host(&d, &demo("cloud/g1.json")).map_err(|e| e.to_string())?;
    let create = algebra_rule(&d, "cloud/create_vm.json")?;
    let pending = satisfiable_requests(&g1.graph)?;
    ensure(pending == 2, || format!("{pending} satisfiable requests in G1"))?;
    let mut host = g1.clone();
    let mut steps = 0;
    while let Some(m) = find_matches(&d, &host, &create)
        .map_err(|e| e.to_string())?
        .into_iter()
        .next()
    {
        let before = config_of(&host.graph, "a")?;
        let id = nat(&m.attr["idVM"]);
        let size = nat(&m.attr["nVM"]);
        let mid = m.morphism.node(&NodeId::new("mch")).clone();
        let free_before =
            nat(&fields(host.graph.get(&Elem::Node(mid.clone())).expect("machine"), "mch").expect("mch")[2]);
        ensure(before.new_id(&id.into()), || format!("id {id} not fresh before"))?;
        let trace = apply_rewrite(&d, &host, &create, &m).map_err(|e| e.to_string())?;
        let after_graph = trace.h().clone();
        let after = config_of(&after_graph, "a")?;
        ensure(!after.new_id(&id.into()), || format!("id {id} still fresh after"))?;
        let free_after =
            nat(&fields(after_graph.get(&Elem::Node(mid.clone())).expect("machine"), "mch").expect("mch")[2]);
        ensure(free_after + size == free_before, || {
            format!("free {free_before} -> {free_after} for size {size}")
        })?;
        let cfg_free = |c: &CloudConfig| {
            c.machines
                .values()
                .map(|m| nat(&AlgTerm::Nat(m.free.clone())))
                .sum::<u64>()
        };
        ensure(cfg_free(&after) + size == cfg_free(&before), || {
            "configuration free space".into()
        })?;
        host = Host {
            object: host.object.clone(),
            graph: after_graph,
        };
        steps += 1;
        ensure(steps <= pending, || {
            "CreateVM applies more often than there are requests".into()
        })?;
    }
    ensure(steps == pending, || {
        format!("CreateVM applied {steps} times for {pending} requests")
    })?;

    let adm = algebra_rule(&d, "cloud/replicate_adm.json")?;
    let ms = find_matches(&d, &host, &adm).map_err(|e| e.to_string())?;
    let m = ms.first().ok_or("replicateAdm does not apply after CreateVM")?;
    let a = m.morphism.node(&NodeId::new("a")).clone();
    let trace = apply_rewrite(&d, &host, &adm, m).map_err(|e| e.to_string())?;
    let h = trace.h();
    let copy = trace.result.m_r.structure.node(&NodeId::new("a'")).clone();
    let keep = trace.result.m_r.structure.node(&NodeId::new("a")).clone();
    let r1 = &trace.result.r1.structure;
    let l1 = &trace.complement.l1.structure;
    let profile = |h: &AttrGraph<AlgTerm>, x: &NodeId, other: &dyn Fn(&NodeId) -> NodeId| {
        let mut v: Vec<(bool, NodeId, String)> = h
            .graph
            .edges()
            .filter(|(_, e)| e.src == *x || e.tgt == *x)
            .map(|(id, e)| {
                let out = e.src == *x;
                let far = if out { &e.tgt } else { &e.src };
                let far = if far == x { x.clone() } else { other(far) };
                (out, far, label(h, id))
            })
            .collect();
        v.sort();
        v
    };
    let g_side = profile(&host.graph, &a, &|n| n.clone());
    let back = |n: &NodeId| -> NodeId {
        let dn = r1.node_preimage(n).next().expect("context node").clone();
        l1.node(&dn).clone()
    };
    let mapped = |x: &NodeId| -> Vec<(bool, NodeId, String)> {
        let mut v = profile(h, x, &back);
        for t in &mut v {
            if t.1 == *x {
                t.1 = a.clone();
            }
        }
        v.sort();
        v
    };
    ensure(mapped(&copy) == g_side && mapped(&keep) == g_side, || {
        format!(
            "admin edges {g_side:?} copy {:?} original {:?}",
            mapped(&copy),
            mapped(&keep)
        )
    })?;

    let g2 = read_host(&d, &demo("cloud/g2.json")).map_err(|e| e.to_string())?;
    let off = algebra_rule(&d, "cloud/turn_off_machine.json")?;
    let ms = find_matches(&d, &g2, &off).map_err(|e| e.to_string())?;
    let m = ms.first().ok_or("TurnOffMachine does not apply to G2")?;
    let gone = m.morphism.node(&NodeId::new("m1")).clone();
    let stays = m.morphism.node(&NodeId::new("m2")).clone();
    let trace = apply_rewrite(&d, &g2, &off, m).map_err(|e| e.to_string())?;
    let h = trace.h();
    let machines = |g: &AttrGraph<AlgTerm>| {
        g.graph
            .nodes()
            .filter(|n| {
                g.get(&Elem::Node((*n).clone()))
                    .and_then(|t| fields(t, "mch"))
                    .is_some()
            })
            .count()
    };
    ensure(machines(h) + 1 == machines(&g2.graph), || {
        format!("{} machines after, {} before", machines(h), machines(&g2.graph))
    })?;
    let merged = trace.result.m_r.structure.node(&NodeId::new("m2")).clone();
    let hosted = |g: &AttrGraph<AlgTerm>, from: &[&NodeId]| -> Vec<String> {
        let mut v: Vec<String> = g
            .graph
            .edges()
            .filter(|(id, e)| label(g, id) == "hosts" && from.contains(&&e.src))
            .map(|(_, e)| {
                g.get(&Elem::Node(e.tgt.clone()))
                    .map(|t| t.to_string())
                    .unwrap_or_default()
            })
            .collect();
        v.sort();
        v
    };
    let before = hosted(&g2.graph, &[&gone, &stays]);
    let after = hosted(h, &[&merged]);
    ensure(!before.is_empty() && before == after, || {
        format!("hosted {before:?} before, {after:?} after")
    })?;
    let all_hosts = |g: &AttrGraph<AlgTerm>| g.graph.edges().filter(|(id, _)| label(g, id) == "hosts").count();
    ensure(all_hosts(h) == all_hosts(&g2.graph), || "hosts edges lost".into())?;
    Ok(format!("CreateVM x{steps}, replicateAdm, TurnOffMachine"))
}

fn run_twice(dir: &Path, args: &[&str]) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_sqpo");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.join(format!("run{i}"));
        let status = Command::new(bin)
            .args(args)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("{args:?} exited with {status}"))?;
        let mut files = BTreeMap::new();
        for f in ["trace.json", "summary.json", "final.json"] {
            files.insert(f, std::fs::read(out.join(f)).map_err(|e| format!("{f}: {e}"))?);
        }
        outputs.push(files);
    }
    ensure(outputs[0] == outputs[1], || {
        format!("{args:?} produced different files")
    })
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    for (path, content) in demos::FILES {
        let target = root.join(path);
        std::fs::create_dir_all(target.parent().expect("demo paths have a directory")).map_err(|e| e.to_string())?;
        std::fs::write(target, content).map_err(|e| e.to_string())?;
    }
    let p = |f: &str| root.join(f).to_string_lossy().into_owned();
    let (g1, rules, lg, lr) = (
        p("cloud/g1.json"),
        p("cloud/rules.json"),
        p("lambda/graph.json"),
        p("lambda/rule.json"),
    );
    let runs: [Vec<&str>; 3] = [
        vec![
            "run",
            "--graph",
            &g1,
            "--rules",
            &rules,
            "--strategy",
            "fixpoint",
            "--max-steps",
            "6",
            "--seed",
            "9",
        ],
        vec![
            "run",
            "--graph",
            &g1,
            "--rules",
            &rules,
            "--strategy",
            "all-matches-sequential",
            "--max-steps",
            "6",
        ],
        vec!["run", "--graph", &lg, "--rules", &lr],
    ];
    for (i, args) in runs.iter().enumerate() {
        run_twice(&root.join(format!("case{i}")), args)?;
    }
    Ok(format!("{} runs repeated byte for byte", runs.len()))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 golden lambda step", golden_step, Duration::from_secs(1)),
        ("2 normalization oracle", normal_form, Duration::from_secs(1)),
        ("3 universal properties", universal_properties, Duration::from_secs(300)),
        ("4 counting laws", counting_laws, Duration::from_secs(30)),
        ("5 case table", case_table, Duration::from_secs(60)),
        ("6 cloud properties", cloud_properties, Duration::from_secs(10)),
        ("7 determinism", determinism, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let result = result.and_then(|msg| {
            if took > limit {
                Err(format!("{msg}, but took {took:.2?} (limit {limit:?})"))
            } else {
                Ok(msg)
            }
        });
        match result {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{took:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{took:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
