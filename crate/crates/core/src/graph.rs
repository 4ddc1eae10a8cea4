use std::collections::HashSet;

use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected graph with strictly positive edge weights.
///
/// Edges keep their insertion order; degrees are accumulated in that order so
/// they can be recomputed bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
    total_volume: f64,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(domain(format!("edge ({u}, {v}) has an endpoint outside 0..{n}")));
            }
            if u == v {
                return Err(domain(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(domain(format!("edge ({u}, {v}) has nonpositive weight {w}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(domain(format!("duplicate edge ({u}, {v})")));
            }
            list.push(Edge { u, v, w });
        }
        Ok(Self::from_validated(n, list))
    }

    fn from_validated(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut degree = vec![0.0; n];
        for e in &edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
            degree[e.u] += e.w;
            degree[e.v] += e.w;
        }
        let total_volume = degree.iter().sum();
        if let Some(v) = degree.iter().position(|&d| d < 1.0) {
            log::warn!("vertex {v} has weighted degree {} below 1", degree[v]);
        }
        WeightedGraph {
            n,
            edges,
            adj,
            degree,
            total_volume,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    /// vol(V), the sum of all weighted degrees.
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Sum of edge weights, each edge counted once.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn volume_of(&self, mask: &[bool]) -> f64 {
        mask.iter()
            .zip(&self.degree)
            .filter(|(&m, _)| m)
            .map(|(_, d)| d)
            .sum()
    }

    /// w(E(S, S̄)) for the set given by `mask`.
    pub fn boundary_of(&self, mask: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|e| mask[e.u] != mask[e.v])
            .map(|e| e.w)
            .sum()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![s];
            label[s] = id;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &(y, _) in &self.adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = id;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// A vertex subset together with its volume and boundary weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexSet {
    #[serde(skip)]
    members: Vec<bool>,
    volume: f64,
    boundary_weight: f64,
}

impl VertexSet {
    pub fn from_mask(g: &WeightedGraph, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != g.n() {
            return Err(domain(format!(
                "membership has length {}, graph has {} vertices",
                mask.len(),
                g.n()
            )));
        }
        let volume = g.volume_of(&mask);
        let boundary_weight = g.boundary_of(&mask);
        Ok(VertexSet {
            members: mask,
            volume,
            boundary_weight,
        })
    }

    pub fn from_vertices(g: &WeightedGraph, vs: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; g.n()];
        for v in vs {
            if v >= g.n() {
                return Err(domain(format!("vertex {v} outside 0..{}", g.n())));
            }
            mask[v] = true;
        }
        Self::from_mask(g, mask)
    }

    pub fn empty(g: &WeightedGraph) -> Self {
        VertexSet {
            members: vec![false; g.n()],
            volume: 0.0,
            boundary_weight: 0.0,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&v| self.members[v]).collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&m| m)
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn boundary_weight(&self) -> f64 {
        self.boundary_weight
    }

    pub fn complement(&self, g: &WeightedGraph) -> Self {
        let mask = self.members.iter().map(|&m| !m).collect();
        Self::from_mask(g, mask).expect("complement has matching length")
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !(a && b))
    }
}

/// A pair of disjoint vertex sets (L, R); vertices in neither are outside the cut.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedCut {
    pub left: VertexSet,
    pub right: VertexSet,
}

impl InducedCut {
    pub fn new(left: VertexSet, right: VertexSet) -> Result<Self> {
        if left.members.len() != right.members.len() {
            return Err(domain("cut sides belong to different graphs"));
        }
        if !left.is_disjoint(&right) {
            return Err(domain("cut sides overlap"));
        }
        Ok(InducedCut { left, right })
    }

    pub fn from_vertices(
        g: &WeightedGraph,
        left: impl IntoIterator<Item = usize>,
        right: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        Self::new(
            VertexSet::from_vertices(g, left)?,
            VertexSet::from_vertices(g, right)?,
        )
    }

    /// +1 for L, −1 for R, 0 outside.
    pub fn signs(&self) -> Vec<i8> {
        self.left
            .members
            .iter()
            .zip(&self.right.members)
            .map(|(&l, &r)| if l { 1 } else if r { -1 } else { 0 })
            .collect()
    }

    pub fn swapped(&self) -> Self {
        InducedCut {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}

/// Edge-weight tallies of a signed assignment (+1 L, −1 R, 0 outside).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct CutTally {
    pub internal: f64,
    pub crossing: f64,
    pub outward: f64,
    pub volume: f64,
}

pub(crate) fn cut_tally(g: &WeightedGraph, signs: &[i8]) -> CutTally {
    let mut t = CutTally::default();
    for e in g.edges() {
        let (a, b) = (signs[e.u], signs[e.v]);
        if a == 0 && b == 0 {
            continue;
        }
        if a == 0 || b == 0 {
            t.outward += e.w;
        } else if a == b {
            t.internal += e.w;
        } else {
            t.crossing += e.w;
        }
    }
    t.volume = signs
        .iter()
        .zip(g.degrees())
        .filter(|(&s, _)| s != 0)
        .map(|(_, d)| d)
        .sum();
    t
}

/// (vol S, vol S̄), both summed directly so φ(S) = φ(S̄) holds exactly.
pub(crate) fn split_volumes(g: &WeightedGraph, mask: &[bool]) -> (f64, f64) {
    let (mut inside, mut outside) = (0.0, 0.0);
    for (&m, &d) in mask.iter().zip(g.degrees()) {
        if m {
            inside += d;
        } else {
            outside += d;
        }
    }
    (inside, outside)
}

pub(crate) fn conductance_of_mask(g: &WeightedGraph, mask: &[bool]) -> Option<f64> {
    let (vin, vout) = split_volumes(g, mask);
    let denom = vin.min(vout);
    if denom <= 0.0 {
        return None;
    }
    Some(g.boundary_of(mask) / denom)
}

/// φ(S) = w(E(S, S̄)) / min(vol S, vol S̄).
pub fn conductance(g: &WeightedGraph, s: &VertexSet) -> Result<f64> {
    if s.is_empty() || s.is_full() {
        return Err(domain("conductance needs a proper nonempty subset"));
    }
    let (vin, vout) = split_volumes(g, &s.members);
    let denom = vin.min(vout);
    if denom <= 0.0 {
        return Err(domain("conductance undefined: one side has zero volume"));
    }
    Ok(s.boundary_weight / denom)
}

/// β(L, R) = (2w(E(L)) + 2w(E(R)) + w(E(L∪R, outside))) / vol(L∪R).
pub fn bipartiteness_ratio(g: &WeightedGraph, cut: &InducedCut) -> Result<f64> {
    let t = cut_tally(g, &cut.signs());
    if cut.left.is_empty() && cut.right.is_empty() {
        return Err(domain("bipartiteness ratio of an empty cut"));
    }
    if t.volume <= 0.0 {
        return Err(domain("bipartiteness ratio undefined: L ∪ R has zero volume"));
    }
    Ok((2.0 * t.internal + t.outward) / t.volume)
}

/// γ(L, R) = w(E(L)) + w(E(R)) + w(E(L∪R, outside)).
pub fn uncutness(g: &WeightedGraph, cut: &InducedCut) -> f64 {
    let t = cut_tally(g, &cut.signs());
    t.internal + t.outward
}

/// Subgraph induced by `u`, with the map from new ids to original ids.
pub fn induced_subgraph(g: &WeightedGraph, u: &VertexSet) -> Result<(WeightedGraph, Vec<usize>)> {
    if u.is_empty() {
        return Err(domain("induced subgraph of an empty set"));
    }
    let to_parent = u.vertices();
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in to_parent.iter().enumerate() {
        index[v] = i;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| u.contains(e.u) && u.contains(e.v))
        .map(|e| Edge {
            u: index[e.u],
            v: index[e.v],
            w: e.w,
        })
        .collect();
    Ok((WeightedGraph::from_validated(to_parent.len(), edges), to_parent))
}

/// max_i φ(S_i) over pairwise disjoint nonempty sets.
pub fn phi_k_of_partition(g: &WeightedGraph, sets: &[VertexSet]) -> Result<f64> {
    if sets.is_empty() {
        return Err(domain("partition has no parts"));
    }
    let mut seen = vec![false; g.n()];
    let mut worst = 0.0f64;
    for s in sets {
        if s.is_empty() {
            return Err(domain("partition has an empty part"));
        }
        for v in s.vertices() {
            if seen[v] {
                return Err(domain(format!("vertex {v} appears in two parts")));
            }
            seen[v] = true;
        }
        worst = worst.max(conductance(g, s)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_complete, gen_cycle, two_cliques_bridge};

    fn k2() -> WeightedGraph {
        WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraph::new(2, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, 0.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, -1.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn conductance_examples() {
        let g = k2();
        let s = VertexSet::from_vertices(&g, [0]).unwrap();
        assert_eq!(conductance(&g, &s).unwrap(), 1.0);

        let c4 = gen_cycle(4, 1.0).unwrap();
        let s = VertexSet::from_vertices(&c4, [0, 1]).unwrap();
        assert_eq!(conductance(&c4, &s).unwrap(), 0.5);

        let c8 = gen_cycle(8, 1.0).unwrap();
        let s = VertexSet::from_vertices(&c8, [2, 3, 4, 5]).unwrap();
        assert_eq!(conductance(&c8, &s).unwrap(), 0.25);

        assert!(conductance(&g, &VertexSet::empty(&g)).is_err());
        assert!(conductance(&g, &VertexSet::from_vertices(&g, [0, 1]).unwrap()).is_err());
    }

    #[test]
    fn bipartiteness_and_uncutness_examples() {
        let g = k2();
        let cut = InducedCut::from_vertices(&g, [0], [1]).unwrap();
        assert_eq!(bipartiteness_ratio(&g, &cut).unwrap(), 0.0);
        assert_eq!(uncutness(&g, &cut), 0.0);

        let k3 = gen_complete(3).unwrap();
        let cut = InducedCut::from_vertices(&k3, [0], [1, 2]).unwrap();
        assert!((bipartiteness_ratio(&k3, &cut).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let cut = InducedCut::from_vertices(&k3, [0], [1]).unwrap();
        assert_eq!(bipartiteness_ratio(&k3, &cut).unwrap(), 0.5);

        let empty = InducedCut::from_vertices(&k3, [], []).unwrap();
        assert_eq!(uncutness(&k3, &empty), 0.0);
        assert!(bipartiteness_ratio(&k3, &empty).is_err());
        assert!(InducedCut::from_vertices(&k3, [0], [0]).is_err());
    }

    #[test]
    fn triangle_uncutness_counts_outward_edges() {
        // L={0}, R={1}: edges 0-2 and 1-2 leave L∪R, 0-1 is cut.
        let k3 = gen_complete(3).unwrap();
        let cut = InducedCut::from_vertices(&k3, [0], [1]).unwrap();
        assert_eq!(uncutness(&k3, &cut), 2.0);
    }

    #[test]
    fn induced_subgraph_examples() {
        let c4 = gen_cycle(4, 1.0).unwrap();
        let all = VertexSet::from_vertices(&c4, 0..4).unwrap();
        let (h, map) = induced_subgraph(&c4, &all).unwrap();
        assert_eq!(h, c4);
        assert_eq!(map, vec![0, 1, 2, 3]);

        let three = VertexSet::from_vertices(&c4, [0, 1, 2]).unwrap();
        let (h, _) = induced_subgraph(&c4, &three).unwrap();
        assert_eq!(h.num_edges(), 2);
        assert_eq!(h.degrees(), &[1.0, 2.0, 1.0]);

        let bb = two_cliques_bridge(4, 1.0).unwrap();
        let side = VertexSet::from_vertices(&bb, 0..4).unwrap();
        let (h, _) = induced_subgraph(&bb, &side).unwrap();
        assert_eq!(h.num_edges(), 6);
        assert!(h.degrees().iter().all(|&d| d == 3.0));

        assert!(induced_subgraph(&c4, &VertexSet::empty(&c4)).is_err());
    }

    #[test]
    fn phi_k_examples() {
        let c4 = gen_cycle(4, 1.0).unwrap();
        let a = VertexSet::from_vertices(&c4, [0, 2]).unwrap();
        let b = VertexSet::from_vertices(&c4, [1, 3]).unwrap();
        assert_eq!(phi_k_of_partition(&c4, &[a.clone(), b]).unwrap(), 1.0);
        assert!(phi_k_of_partition(&c4, &[a.clone(), a]).is_err());

        let c8 = gen_cycle(8, 1.0).unwrap();
        let a = VertexSet::from_vertices(&c8, 0..4).unwrap();
        let b = VertexSet::from_vertices(&c8, 4..8).unwrap();
        assert_eq!(phi_k_of_partition(&c8, &[a.clone(), b]).unwrap(), 0.25);
        assert_eq!(
            phi_k_of_partition(&c8, &[a.clone()]).unwrap(),
            conductance(&c8, &a).unwrap()
        );
    }

    #[test]
    fn components_of_disjoint_edges() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2, 3]]);
        assert!(!g.is_connected());
    }
}
