#![allow(dead_code)]

use cheeger_core::WeightedGraph;
use proptest::prelude::*;

/// Connected weighted graphs: a random-weight spanning path plus random chords.
pub fn connected_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                prop::collection::vec(0.1f64..5.0, n - 1),
                prop::collection::vec(prop::option::weighted(0.4, 0.1f64..5.0), pairs),
            )
        })
        .prop_map(|(n, path, chords)| {
            let mut edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, path[i])).collect();
            let mut idx = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if v > u + 1 {
                        if let Some(w) = chords[idx] {
                            edges.push((u, v, w));
                        }
                    }
                    idx += 1;
                }
            }
            WeightedGraph::new(n, edges).unwrap()
        })
}

/// Connected bipartite graphs with sides {even ids} and {odd ids}.
pub fn bipartite_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    connected_graph(max_n).prop_map(|g| {
        let edges: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .filter(|e| (e.u + e.v) % 2 == 1)
            .map(|e| (e.u, e.v, e.w))
            .collect();
        WeightedGraph::new(g.n(), edges).unwrap()
    })
}

/// A graph with a vector of n values drawn from the given range.
pub fn graph_and_values(max_n: usize, lo: f64, hi: f64) -> impl Strategy<Value = (WeightedGraph, Vec<f64>)> {
    connected_graph(max_n).prop_flat_map(move |g| {
        let n = g.n();
        (Just(g), prop::collection::vec(lo..hi, n))
    })
}

/// A graph with a vector of n labels in 0..m.
pub fn graph_and_labels(max_n: usize, m: usize) -> impl Strategy<Value = (WeightedGraph, Vec<usize>)> {
    connected_graph(max_n).prop_flat_map(move |g| {
        let n = g.n();
        (Just(g), prop::collection::vec(0..m, n))
    })
}

/// Zero out vertices in index order until the support volume is at most half.
pub fn small_support(g: &WeightedGraph, mut f: Vec<f64>) -> Vec<f64> {
    let half = g.total_volume() / 2.0;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| f[b].total_cmp(&f[a]).then(a.cmp(&b)));
    let mut vol = 0.0;
    for (i, &v) in order.iter().enumerate() {
        if i == 0 || vol + g.degree(v) <= half {
            vol += g.degree(v);
        } else {
            f[v] = 0.0;
        }
    }
    f
}
