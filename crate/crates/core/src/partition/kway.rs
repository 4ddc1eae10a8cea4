use crate::error::{domain, Result};
use crate::graph::{induced_subgraph, phi_k_of_partition, VertexSet, WeightedGraph};
use crate::spectral::{dense_spectrum, split_from_spectrum, Operator};
use crate::sweep::sweep_conductance;

#[derive(Debug, Clone)]
pub struct KwayResult {
    pub parts: Vec<VertexSet>,
    pub phi_k: f64,
}

/// Split the largest-volume part by its spectral sweep, k − 1 times.
pub fn recursive_kway(g: &WeightedGraph, k: usize) -> Result<KwayResult> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(domain(format!("k must be in 2..={n}, got {k}")));
    }
    let mut parts: Vec<Vec<usize>> = vec![(0..n).collect()];
    for _ in 1..k {
        let vol = |p: &Vec<usize>| p.iter().map(|&v| g.degree(v)).sum::<f64>();
        let idx = (0..parts.len())
            .filter(|&i| parts[i].len() >= 2)
            .max_by(|&a, &b| vol(&parts[a]).total_cmp(&vol(&parts[b])).then(b.cmp(&a)))
            .ok_or_else(|| domain("no part left to split"))?;
        let part = parts[idx].clone();
        let (h, to_parent) = induced_subgraph(g, &VertexSet::from_vertices(g, part.iter().copied())?)?;
        let inside: Vec<usize> = match (0..h.n()).find(|&i| h.degree(i) <= 0.0) {
            Some(i) => vec![i],
            None => {
                let f = split_from_spectrum(&h, &dense_spectrum(&h, Operator::Laplacian)?)?;
                sweep_conductance(&h, &f)?.set.vertices()
            }
        };
        let mut taken = vec![false; h.n()];
        for &i in &inside {
            taken[i] = true;
        }
        let a: Vec<usize> = (0..h.n()).filter(|&i| taken[i]).map(|i| to_parent[i]).collect();
        let b: Vec<usize> = (0..h.n()).filter(|&i| !taken[i]).map(|i| to_parent[i]).collect();
        if a.is_empty() || b.is_empty() {
            return Err(domain("sweep produced a trivial split"));
        }
        parts[idx] = a;
        parts.insert(idx + 1, b);
    }
    let sets = parts
        .into_iter()
        .map(|p| VertexSet::from_vertices(g, p))
        .collect::<Result<Vec<_>>>()?;
    let phi_k = phi_k_of_partition(g, &sets)?;
    Ok(KwayResult { parts: sets, phi_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::conductance;
    use crate::instances::{gen_cycle, gen_path, two_cliques_bridge};
    use crate::sweep::sweep_conductance;

    #[test]
    fn two_way_matches_sweep() {
        let g = gen_cycle(10, 1.0).unwrap();
        let r = recursive_kway(&g, 2).unwrap();
        let f = split_from_spectrum(&g, &dense_spectrum(&g, Operator::Laplacian).unwrap()).unwrap();
        let s = sweep_conductance(&g, &f).unwrap();
        assert_eq!(r.parts[0], s.set);
        assert_eq!(r.phi_k, conductance(&g, &s.set).unwrap());
    }

    #[test]
    fn path_into_four_pairs() {
        let g = gen_path(8).unwrap();
        let r = recursive_kway(&g, 4).unwrap();
        let parts: Vec<Vec<usize>> = r.parts.iter().map(|p| p.vertices()).collect();
        assert_eq!(parts, vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]);
        assert_eq!(r.phi_k, 0.5);
    }

    #[test]
    fn cycle_parts_cover() {
        let g = gen_cycle(8, 1.0).unwrap();
        let r = recursive_kway(&g, 4).unwrap();
        let mut all: Vec<usize> = r.parts.iter().flat_map(|p| p.vertices()).collect();
        all.sort();
        assert_eq!(all, (0..8).collect::<Vec<_>>());
        let worst = r.parts.iter().map(|p| conductance(&g, p).unwrap()).fold(0.0, f64::max);
        assert_eq!(r.phi_k, worst);
    }

    #[test]
    fn barbell_bridge_cut() {
        let g = two_cliques_bridge(4, 1.0).unwrap();
        let r = recursive_kway(&g, 2).unwrap();
        let a = r.parts[0].vertices();
        assert!(a == vec![0, 1, 2, 3] || a == vec![4, 5, 6, 7]);
    }

    #[test]
    fn k_too_large() {
        let g = gen_cycle(4, 1.0).unwrap();
        assert!(recursive_kway(&g, 5).is_err());
    }
}
