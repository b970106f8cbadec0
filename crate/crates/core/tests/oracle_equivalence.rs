//! Production solvers against brute-force references on small random graphs.

mod common;

use common::{shape, to_graph, to_store};
use graphwm_core::catalog::{self, NeighborDirection};
use graphwm_core::toolset::{self, DegreeDirection, StructuralKind};
use graphwm_core::{edit_distance, Answer, NodeId};
use graphwm_oracles as oracle;

#[test]
fn edit_distance_matches_set_difference() {
    for i in 0..1000u64 {
        let (n, p, directed) = shape(i, 20);
        let g = oracle::random_graph(2 * i, n, p, directed, false);
        let h = oracle::random_graph(2 * i + 1, n, p, directed, false);
        let d = edit_distance(&to_graph(n, directed, false, &g), &to_graph(n, directed, false, &h)).unwrap();
        let (added, removed) = oracle::edit_distance(n, directed, &g, &h);
        assert_eq!((d.added, d.removed, d.total), (added, removed, added + removed), "case {i}");
    }
}

#[test]
fn structural_queries_match_linear_scan() {
    for i in 0..500u64 {
        let (n, p, directed) = shape(i, 12);
        let edges = oracle::random_graph(i, n, p, directed, false);
        let s = to_store(n, directed, false, &edges);
        let q = |k, args: &[NodeId]| toolset::structural_query(&s, k, args, DegreeDirection::Total).unwrap();
        assert_eq!(q(StructuralKind::EdgeCount, &[]), Answer::Count(edges.len() as u64));
        assert_eq!(q(StructuralKind::NodeCount, &[]), Answer::Count(n as u64));
        for u in 0..n + 1 {
            assert_eq!(q(StructuralKind::NodeExistence, &[u as NodeId]), Answer::Bool(u < n));
        }
        for u in 0..n {
            assert_eq!(
                q(StructuralKind::DegreeCount, &[u as NodeId]),
                Answer::Count(oracle::degree(&edges, u) as u64)
            );
            for v in 0..n {
                assert_eq!(
                    q(StructuralKind::EdgeExistence, &[u as NodeId, v as NodeId]),
                    Answer::Bool(oracle::edge_exists(directed, &edges, u, v)),
                    "case {i} edge {u}-{v}"
                );
            }
        }
    }
}

#[test]
fn cycle_detection_matches_union_find_and_closure() {
    for i in 0..500u64 {
        let (n, p, _) = shape(i, 12);
        let p = p * 0.5;
        let und = oracle::random_graph(i, n, p, false, false);
        assert_eq!(
            toolset::cycle_detection(&to_store(n, false, false, &und)),
            oracle::has_cycle_undirected(n, &und),
            "undirected case {i}"
        );
        let dir = oracle::random_graph(i + 10_000, n, p, true, false);
        assert_eq!(
            toolset::cycle_detection(&to_store(n, true, false, &dir)),
            oracle::has_cycle_directed(n, &dir),
            "directed case {i}"
        );
    }
}

#[test]
fn triangle_count_matches_triple_enumeration() {
    for i in 0..500u64 {
        let (n, p, directed) = shape(i, 12);
        let edges = oracle::random_graph(i, n, p, directed, false);
        let got = toolset::triangle_count(&to_store(n, directed, false, &edges));
        assert_eq!(got.triangles as usize, oracle::triangle_count(n, &edges), "case {i}");
    }
}

#[test]
fn path_existence_matches_transitive_closure() {
    for i in 0..500u64 {
        let (n, p, directed) = shape(i, 12);
        let edges = oracle::random_graph(i, n, p * 0.4, directed, false);
        let s = to_store(n, directed, false, &edges);
        let reach = oracle::closure(n, directed, &edges);
        for u in 0..n {
            for v in 0..n {
                assert_eq!(
                    toolset::path_existence(&s, u as NodeId, v as NodeId).unwrap(),
                    reach[u][v],
                    "case {i} {u}->{v}"
                );
            }
        }
    }
}

#[test]
fn shortest_path_matches_floyd_warshall() {
    for i in 0..500u64 {
        let (n, p, directed) = shape(i, 12);
        let edges = oracle::random_graph(i, n, p * 0.5, directed, true);
        let s = to_store(n, directed, true, &edges);
        let all = oracle::floyd_warshall(n, directed, &edges);
        let w = oracle::weights(n, directed, &edges);
        for u in 0..n {
            for v in 0..n {
                match toolset::shortest_path(&s, u as NodeId, v as NodeId).unwrap() {
                    None => assert!(all[u][v].is_infinite(), "case {i} {u}->{v}"),
                    Some(sp) => {
                        assert_eq!(sp.distance, all[u][v], "case {i} {u}->{v}");
                        let recost: f64 = sp.path.windows(2).map(|p| w[p[0] as usize][p[1] as usize]).sum();
                        assert_eq!(recost, sp.distance);
                        assert_eq!(sp.path.first(), Some(&(u as NodeId)));
                        assert_eq!(sp.path.last(), Some(&(v as NodeId)));
                    }
                }
            }
        }
    }
}

#[test]
fn max_flow_matches_min_cut_enumeration() {
    for i in 0..200u64 {
        let (n, p, directed) = shape(i, 10);
        let n = n.max(2);
        let edges = oracle::random_graph(i, n, p, directed, true);
        let s = to_store(n, directed, true, &edges);
        let (src, dst) = (0, n - 1);
        assert_eq!(
            catalog::max_flow(&s, src as NodeId, dst as NodeId).unwrap(),
            oracle::min_cut(n, directed, &edges, src, dst),
            "case {i}"
        );
    }
}

#[test]
fn pagerank_matches_linear_solve() {
    for i in 0..100u64 {
        let (n, p, directed) = shape(i, 10);
        let edges = oracle::random_graph(i, n, p, directed, false);
        let s = to_store(n, directed, false, &edges);
        let pr = catalog::pagerank(&s, 0.85, 1e-12, 1000).unwrap();
        assert!(pr.converged);
        let exact = oracle::pagerank_linear(n, directed, &edges, 0.85);
        for (k, &(_, score)) in pr.scores.iter().enumerate() {
            assert!((score - exact[k]).abs() <= 1e-8, "case {i} node {k}: {score} vs {}", exact[k]);
        }
    }
}

#[test]
fn diameter_matches_per_source_search() {
    let mut checked = 0;
    for i in 0..2000u64 {
        let (n, p, _) = shape(i, 12);
        let edges = oracle::random_graph(i, n, (p + 0.3).min(0.9), false, true);
        if oracle::component_count(n, &edges) != 1 {
            continue;
        }
        let s = to_store(n, false, true, &edges);
        assert_eq!(catalog::diameter(&s), oracle::diameter(n, false, &edges), "case {i}");
        checked += 1;
        if checked == 300 {
            break;
        }
    }
    assert_eq!(checked, 300);
}

#[test]
fn cores_components_neighbors_clustering() {
    for i in 0..500u64 {
        let (n, p, directed) = shape(i, 12);
        let edges = oracle::random_graph(i, n, p * 0.6, directed, false);
        let s = to_store(n, directed, false, &edges);
        if i < 300 {
            assert_eq!(catalog::max_core(&s), oracle::max_core(n, &edges), "core case {i}");
        }
        assert_eq!(catalog::connected_components(&s), oracle::component_count(n, &edges), "case {i}");
        for u in 0..n {
            let cc = catalog::clustering_coefficient(&s, u as NodeId).unwrap();
            assert!((cc - oracle::clustering(n, &edges, u)).abs() < 1e-12, "case {i} node {u}");
            for v in 0..n {
                let und = catalog::common_neighbors(&s, u as NodeId, v as NodeId, NeighborDirection::Undirected).unwrap();
                assert_eq!(und, oracle::common_neighbors(n, false, &edges, u, v));
                let out = catalog::common_neighbors(&s, u as NodeId, v as NodeId, NeighborDirection::Out).unwrap();
                assert_eq!(out, oracle::common_neighbors(n, directed, &edges, u, v));
            }
        }
    }
}
