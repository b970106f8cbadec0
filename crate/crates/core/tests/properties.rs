mod common;

use common::{to_graph, to_store};
use graphwm_core::catalog;
use graphwm_core::toolset;
use graphwm_core::{
    edit_distance, gec, parse_any, render, sample_subgraph, BiasParams, Edge, GecConfig, Graph, NodeId,
    Predicate, Representation, TokenUsage,
};
use graphwm_oracles::{self as oracle, Triple};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn graph_params(max_n: usize) -> impl Strategy<Value = (usize, bool, Vec<Triple>)> {
    (2..=max_n, any::<bool>(), 0.05f64..0.9, any::<u64>()).prop_map(|(n, directed, p, seed)| {
        (n, directed, oracle::random_graph(seed, n, p, directed, true))
    })
}

fn representations() -> Vec<Representation> {
    let mut reps = vec![Representation::ADJACENCY, Representation::SYMBOLIC];
    reps.extend(Predicate::ALL.iter().map(|&p| Representation::linguistic(p)));
    reps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(320))]

    #[test]
    fn render_parse_round_trip((n, directed, edges) in graph_params(25), weighted in any::<bool>()) {
        prop_assume!(!edges.is_empty());
        let g = to_graph(n, directed, weighted, &edges);
        let list = g.edge_list();
        for rep in representations() {
            let chunk = render(&list, rep).unwrap();
            prop_assert_eq!(chunk.edge_count, list.len());
            let back = parse_any(&chunk.text, rep).unwrap();
            let h = Graph::with_nodes(0..n as NodeId, back, directed).unwrap();
            prop_assert_eq!(&h, &g, "{}", rep);
        }
    }

    #[test]
    fn edit_distance_is_a_metric(
        (n, directed, a) in graph_params(14),
        s1 in any::<u64>(),
        s2 in any::<u64>(),
    ) {
        let b = oracle::random_graph(s1, n, 0.3, directed, false);
        let c = oracle::random_graph(s2, n, 0.3, directed, false);
        let (ga, gb, gc) = (
            to_graph(n, directed, false, &a),
            to_graph(n, directed, false, &b),
            to_graph(n, directed, false, &c),
        );
        let ab = edit_distance(&ga, &gb).unwrap();
        let ba = edit_distance(&gb, &ga).unwrap();
        prop_assert_eq!(ab.total, ba.total);
        prop_assert_eq!(ab.added, ba.removed);
        prop_assert_eq!(edit_distance(&ga, &ga).unwrap().total, 0);
        let ac = edit_distance(&ga, &gc).unwrap().total;
        let bc = edit_distance(&gb, &gc).unwrap().total;
        prop_assert!(ac <= ab.total + bc);
    }

    #[test]
    fn weights_do_not_count_toward_edit_distance((n, directed, edges) in graph_params(14)) {
        let g = to_graph(n, directed, true, &edges);
        let h = g.with_weights(|e| e.w.unwrap_or(1.0) + 1.0).unwrap();
        prop_assert_eq!(edit_distance(&g, &h).unwrap().total, 0);
    }

    #[test]
    fn gec_is_monotone(
        total in 0usize..500,
        extra in 0usize..50,
        usages in prop::collection::vec((0u64..5000, 0u64..5000), 0..8),
        more in (0u64..5000, 0u64..5000),
    ) {
        let cfg = GecConfig::default();
        let mk = |t: usize| graphwm_core::EditDistance { added: t, removed: 0, total: t };
        let mut u: Vec<TokenUsage> = usages.iter().map(|&(i, o)| TokenUsage::new(i, o)).collect();
        let base = gec(&mk(total), &u, &cfg);
        prop_assert!(base >= 0.0);
        prop_assert!(gec(&mk(total + extra), &u, &cfg) >= base);
        u.push(TokenUsage::new(more.0, more.1));
        prop_assert!(gec(&mk(total), &u, &cfg) >= base);
    }

    #[test]
    fn sample_is_an_induced_subgraph(
        n in 5usize..120,
        m in 1usize..4,
        directed in any::<bool>(),
        frac in 0.05f64..1.0,
        seed in any::<u64>(),
    ) {
        let source = graphwm_core::synthetic::preferential_attachment(n, m, directed, seed);
        let target = ((n as f64 * frac) as usize).clamp(1, n);
        let s = sample_subgraph(&source, target, &BiasParams::default(), seed ^ 7).unwrap();
        prop_assert!(s.graph.node_count() <= target);
        if s.complete {
            prop_assert_eq!(s.graph.node_count(), target);
        }
        let ids: Vec<NodeId> = s.graph.nodes().collect();
        prop_assert_eq!(ids, (0..s.graph.node_count() as NodeId).collect::<Vec<_>>());
        for e in s.graph.edges() {
            prop_assert!(source.contains_edge(s.relabel[&e.u], s.relabel[&e.v]));
        }
        // induced: every source edge between sampled nodes survives
        let back: BTreeMap<NodeId, NodeId> = s.relabel.iter().map(|(&k, &v)| (v, k)).collect();
        for e in source.edges() {
            if let (Some(&a), Some(&b)) = (back.get(&e.u), back.get(&e.v)) {
                prop_assert!(s.graph.contains_edge(a, b));
            }
        }
        // relabeling preserves source order
        let olds: Vec<NodeId> = s.relabel.values().copied().collect();
        prop_assert!(olds.windows(2).all(|w| w[0] < w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn store_views_agree((n, directed, edges) in graph_params(30), weighted in any::<bool>()) {
        let s = to_store(n, directed, weighted, &edges);
        let g = s.canonical();
        let topo = s.topology();
        let m = s.matrix();
        let ei = s.edge_index();
        prop_assert_eq!(topo.edge_count(), g.edge_count());
        let arcs = if directed { g.edge_count() } else { 2 * g.edge_count() };
        prop_assert_eq!(ei.len(), arcs);
        prop_assert_eq!(m.dims(), [n, n]);
        prop_assert_eq!(m.nonzero_count(), arcs);
        for e in g.edges() {
            let w = e.w.unwrap_or(1.0);
            let (i, j) = (topo.position(e.u).unwrap(), topo.position(e.v).unwrap());
            prop_assert_eq!(topo.edge_weight(i, j), Some(w));
            prop_assert_eq!(m.get(i, j), w);
            if !directed {
                prop_assert_eq!(m.get(j, i), w);
            }
        }
        for k in 0..ei.len() {
            prop_assert!(g.contains_edge(ei.sources[k], ei.targets[k]));
        }
        for pos in 0..n {
            let x = topo.id(pos) as usize;
            prop_assert_eq!(topo.degree(pos), oracle::degree(&edges, x));
        }
    }

    #[test]
    fn triangles_survive_relabeling((n, directed, edges) in graph_params(14), shift in 1u32..1000) {
        let g = to_graph(n, directed, false, &edges);
        let map: BTreeMap<NodeId, NodeId> = g.nodes().map(|x| (x, (n as NodeId - 1 - x) * 3 + shift)).collect();
        let a = toolset::triangle_count(&graphwm_core::GraphStore::build(g.clone(), None).unwrap());
        let b = toolset::triangle_count(&graphwm_core::GraphStore::build(g.relabel(&map), None).unwrap());
        prop_assert_eq!(a.triangles, b.triangles);
    }

    #[test]
    fn cycles_persist_under_edge_addition(
        (n, directed, edges) in graph_params(14),
        u in 0usize..14,
        v in 0usize..14,
    ) {
        let (u, v) = (u % n, v % n);
        prop_assume!(u != v);
        let before = toolset::cycle_detection(&to_store(n, directed, false, &edges));
        let mut more = edges.clone();
        more.push((u, v, 1.0));
        let after = toolset::cycle_detection(&to_store(n, directed, false, &more));
        prop_assert!(!before || after);
    }

    #[test]
    fn shortest_path_beats_walks((n, directed, edges) in graph_params(14), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let s = to_store(n, directed, true, &edges);
        let w = oracle::weights(n, directed, &edges);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let start = rng.gen_range(0..n);
        let mut at = start;
        let mut cost = 0.0;
        for _ in 0..20 {
            let next: Vec<usize> = (0..n).filter(|&x| x != at && w[at][x].is_finite()).collect();
            if next.is_empty() {
                break;
            }
            let x = next[rng.gen_range(0..next.len())];
            cost += w[at][x];
            at = x;
            let sp = toolset::shortest_path(&s, start as NodeId, at as NodeId).unwrap();
            let sp = sp.expect("walk endpoint is reachable");
            prop_assert!(sp.distance <= cost);
        }
    }

    #[test]
    fn catalog_bounds((n, directed, edges) in graph_params(16)) {
        let s = to_store(n, directed, true, &edges);
        let g = s.canonical();
        let max_deg = (0..n).map(|x| oracle::common_neighbors(n, false, &edges, x, x)).max().unwrap_or(0);
        prop_assert!(catalog::max_core(&s) <= max_deg);
        for x in 0..n as NodeId {
            let c = catalog::clustering_coefficient(&s, x).unwrap();
            prop_assert!((0.0..=1.0).contains(&c));
        }
        if let Some(d) = catalog::diameter(&s) {
            for a in 0..n as NodeId {
                for b in 0..n as NodeId {
                    let sp = toolset::shortest_path(&s, a, b).unwrap().unwrap();
                    prop_assert!(sp.distance <= d);
                }
            }
        }
        if !directed && n >= 2 {
            let f = catalog::max_flow(&s, 0, n as NodeId - 1).unwrap();
            let r = catalog::max_flow(&s, n as NodeId - 1, 0).unwrap();
            prop_assert_eq!(f, r);
        }
        prop_assert_eq!(g.node_count(), n);
    }
}

#[test]
fn round_trip_unweighted_single_edge() {
    let g = Graph::build([Edge::new(3, 9)], true).unwrap();
    for rep in representations() {
        let text = render(&g.edge_list(), rep).unwrap().text;
        assert_eq!(parse_any(&text, rep).unwrap(), g.edge_list());
    }
}
