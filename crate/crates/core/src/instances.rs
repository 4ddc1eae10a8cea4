//! Deterministic and seeded graph generators, plus the stability probe.
//!
//! Randomness comes from SplitMix64. A random decision is a pure function of
//! (seed, stream tag, index): `mix(mix(seed ^ tag) ^ index)`, where `mix` is
//! the SplitMix64 finalizer. Edge presence in the planted model uses the pair
//! index u·n + v, so it does not depend on iteration order. Uniform reals take
//! the top 53 bits of a draw.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::WeightedGraph;
use crate::oracle::all_conductances;
use crate::oracle::brute_force_phi;
use crate::spectral::{dense_spectrum, normalize_w, Operator};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

const STREAM_PLANTED: u64 = 0x706c_616e_7465_6400;
const STREAM_EXPANDER: u64 = 0x6578_7061_6e64_6572;
const STREAM_BRIDGE: u64 = 0x6272_6964_6765_0000;

/// SplitMix64 output function.
pub fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, tag: u64, index: u64) -> u64 {
    mix(mix(seed ^ tag) ^ index)
}

/// Uniform in [0, 1).
pub fn unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = mix(self.state);
        self.state = self.state.wrapping_add(GOLDEN);
        out
    }

    /// Uniform in 0..bound by rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

pub fn gen_cycle(n: usize, weight: f64) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(domain(format!("cycle needs n ≥ 3, got {n}")));
    }
    WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, weight)))
}

pub fn gen_complete(n: usize) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(domain(format!("complete graph needs n ≥ 2, got {n}")));
    }
    WeightedGraph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1.0))))
}

pub fn gen_path(n: usize) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(domain(format!("path needs n ≥ 2, got {n}")));
    }
    WeightedGraph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0)))
}

pub fn gen_hypercube(d: usize) -> Result<WeightedGraph> {
    if d == 0 || d > 20 {
        return Err(domain(format!("hypercube dimension must be in 1..=20, got {d}")));
    }
    let n = 1usize << d;
    let edges = (0..n).flat_map(|v| {
        (0..d)
            .map(move |b| (v, v ^ (1 << b)))
            .filter(|&(v, u)| v < u)
            .map(|(v, u)| (v, u, 1.0))
    });
    WeightedGraph::new(n, edges)
}

/// C_n with the w-normalized positive part of cos(2πv/n). For n divisible by 4
/// this is the nonnegative split of a λ₂ eigenfunction, available at sizes
/// far beyond the dense eigensolver.
pub fn cycle_cosine_split(n: usize) -> Result<(WeightedGraph, Vec<f64>)> {
    let g = gen_cycle(n, 1.0)?;
    let raw: Vec<f64> = (0..n)
        .map(|v| (2.0 * std::f64::consts::PI * v as f64 / n as f64).cos().max(0.0))
        .collect();
    let f = normalize_w(&g, &raw)?;
    Ok((g, f))
}

/// Two copies of K_m joined by one edge (m−1, m) of weight `w_bridge`.
pub fn two_cliques_bridge(m: usize, w_bridge: f64) -> Result<WeightedGraph> {
    if m < 2 {
        return Err(domain(format!("clique size must be ≥ 2, got {m}")));
    }
    let clique = |off: usize| (0..m).flat_map(move |u| (u + 1..m).map(move |v| (u + off, v + off, 1.0)));
    let edges = clique(0).chain(clique(m)).chain(std::iter::once((m - 1, m, w_bridge)));
    WeightedGraph::new(2 * m, edges)
}

#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: WeightedGraph,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

/// Planted bisection: X = first n/2 vertices, Y = the rest; a pair within a
/// side is an edge with probability p, a crossing pair with probability q.
pub fn gen_planted_bisection(n: usize, p: f64, q: f64, seed: u64) -> Result<PlantedInstance> {
    if n % 2 == 1 || n == 0 {
        return Err(domain(format!("planted bisection needs positive even n, got {n}")));
    }
    if !(0.0 <= q && q <= p && p <= 1.0) {
        return Err(domain(format!("need 0 ≤ q ≤ p ≤ 1, got p={p}, q={q}")));
    }
    let half = n / 2;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let prob = if (u < half) == (v < half) { p } else { q };
            let r = unit(derive(seed, STREAM_PLANTED, (u * n + v) as u64));
            if r < prob {
                edges.push((u, v, 1.0));
            }
        }
    }
    Ok(PlantedInstance {
        graph: WeightedGraph::new(n, edges)?,
        x: (0..half).collect(),
        y: (half..n).collect(),
    })
}

/// Edges of a 4-regular graph on m vertices as two edge-disjoint random
/// Hamiltonian cycles; K_m when m ≤ 5.
fn regular_side(m: usize, rng: &mut SplitMix64) -> Result<Vec<(usize, usize)>> {
    if m <= 5 {
        return Ok((0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v))).collect());
    }
    let cycle = |perm: &[usize]| -> Vec<(usize, usize)> {
        (0..m)
            .map(|i| {
                let (a, b) = (perm[i], perm[(i + 1) % m]);
                (a.min(b), a.max(b))
            })
            .collect()
    };
    let mut perm: Vec<usize> = (0..m).collect();
    rng.shuffle(&mut perm);
    let first = cycle(&perm);
    let used: std::collections::HashSet<(usize, usize)> = first.iter().copied().collect();
    for _ in 0..10_000 {
        rng.shuffle(&mut perm);
        let second = cycle(&perm);
        if second.iter().all(|e| !used.contains(e)) {
            return Ok(first.into_iter().chain(second).collect());
        }
    }
    Err(domain(format!("could not draw two edge-disjoint Hamiltonian cycles on {m} vertices")))
}

/// Two seeded 4-regular expander surrogates on m vertices each (vertices
/// 0..m and m..2m), joined by a seeded matching of `d_bridge` edges of weight
/// `w_bridge`.
pub fn gen_joined_expanders(m: usize, d_bridge: usize, w_bridge: f64, seed: u64) -> Result<WeightedGraph> {
    if m < 4 {
        return Err(domain(format!("expander side needs m ≥ 4, got {m}")));
    }
    if d_bridge > m {
        return Err(domain(format!("cannot place {d_bridge} matching edges between sides of size {m}")));
    }
    let mut rng_a = SplitMix64::new(derive(seed, STREAM_EXPANDER, 0));
    let mut rng_b = SplitMix64::new(derive(seed, STREAM_EXPANDER, 1));
    let side_a = regular_side(m, &mut rng_a)?;
    let side_b = regular_side(m, &mut rng_b)?;
    let mut rng = SplitMix64::new(derive(seed, STREAM_BRIDGE, 0));
    let mut ends_a: Vec<usize> = (0..m).collect();
    let mut ends_b: Vec<usize> = (0..m).collect();
    rng.shuffle(&mut ends_a);
    rng.shuffle(&mut ends_b);
    let edges = side_a
        .into_iter()
        .map(|(u, v)| (u, v, 1.0))
        .chain(side_b.into_iter().map(|(u, v)| (u + m, v + m, 1.0)))
        .chain((0..d_bridge).map(|i| (ends_a[i], ends_b[i] + m, w_bridge)));
    WeightedGraph::new(2 * m, edges)
}

/// 2n vertices: a unit cycle on even ids, a unit cycle on odd ids, and rungs
/// (2i, 2i+1) of weight c/n². Id v corresponds to label v+1 of the
/// construction with cycles 1-3-5-… and 2-4-6-….
pub fn gen_stable_gadget(n: usize, c: f64) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(domain(format!("stable gadget needs n ≥ 3, got {n}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(domain(format!("rung constant must be positive, got {c}")));
    }
    let rung = c / (n * n) as f64;
    let ring = |parity: usize| (0..n).map(move |i| (2 * i + parity, 2 * ((i + 1) % n) + parity, 1.0));
    let edges = ring(0).chain(ring(1)).chain((0..n).map(|i| (2 * i, 2 * i + 1, rung)));
    WeightedGraph::new(2 * n, edges)
}

pub const STABILITY_MAX_N: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub c: f64,
    pub phi_opt: f64,
    pub optimal_cuts: usize,
    pub approximate_cuts: usize,
    /// max over c-approximate S and optimal T of min(δ, 1−δ), δ = vol(S Δ T)/vol(V).
    pub delta_star: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// c·λ₂/λ₃^{3/2}, the order of the stability radius.
    pub spectral_scale: f64,
}

/// Enumerate every c-approximate sparsest cut and measure its distance from
/// the optimal ones. Report only; the hidden constant is not quantified.
pub fn stability_probe(g: &WeightedGraph, c: f64) -> Result<StabilityReport> {
    if g.n() > STABILITY_MAX_N {
        return Err(Error::Capacity {
            what: "vertices for stability_probe",
            value: g.n(),
            limit: STABILITY_MAX_N,
        });
    }
    if !(c >= 1.0) {
        return Err(domain(format!("approximation factor must be ≥ 1, got {c}")));
    }
    let (phi_opt, _) = brute_force_phi(g)?;
    let all = all_conductances(g)?;
    let tol = 1e-12 * phi_opt.max(1e-300);
    let optimal: Vec<u64> = all.iter().filter(|p| p.1 <= phi_opt + tol).map(|p| p.0).collect();
    let approx: Vec<u64> = all
        .iter()
        .filter(|p| p.1 <= c * phi_opt + tol)
        .map(|p| p.0)
        .collect();
    let total = g.total_volume();
    let vol_of = |mask: u64| -> f64 {
        (0..g.n())
            .filter(|&v| (mask >> v) & 1 == 1)
            .map(|v| g.degree(v))
            .sum()
    };
    let mut delta_star = 0.0f64;
    for &s in &approx {
        for &t in &optimal {
            let d = vol_of(s ^ t) / total;
            delta_star = delta_star.max(d.min(1.0 - d));
        }
    }
    let (lambda2, lambda3) = if g.n() >= 3 && g.degrees().iter().all(|&d| d > 0.0) {
        let s = dense_spectrum(g, Operator::Laplacian)?;
        (s.eigenvalue(2), s.eigenvalue(3))
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(StabilityReport {
        c,
        phi_opt,
        optimal_cuts: optimal.len(),
        approximate_cuts: approx.len(),
        delta_star,
        lambda2,
        lambda3,
        spectral_scale: c * lambda2 / lambda3.powf(1.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{conductance, VertexSet};
    use crate::oracle::brute_force_phi;
    use approx::assert_abs_diff_eq;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of SplitMix64 seeded with 0.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn small_families() {
        let (c3, k3) = (gen_cycle(3, 1.0).unwrap(), gen_complete(3).unwrap());
        assert_eq!((c3.num_edges(), c3.degrees()), (k3.num_edges(), k3.degrees()));
        assert!(gen_cycle(2, 1.0).is_err());
        assert_eq!(gen_path(2).unwrap(), WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap());
        let q2 = gen_hypercube(2).unwrap();
        assert_eq!(q2.num_edges(), 4);
        assert!(q2.degrees().iter().all(|&d| d == 2.0));
        assert!(q2.is_connected());
        assert_eq!(gen_hypercube(3).unwrap().num_edges(), 12);
    }

    #[test]
    fn cycle_spectra() {
        let s = dense_spectrum(&gen_cycle(8, 1.0).unwrap(), Operator::Laplacian).unwrap();
        assert_abs_diff_eq!(s.eigenvalue(2), 1.0 - (std::f64::consts::PI / 4.0).cos(), epsilon = 1e-12);
        let s = dense_spectrum(&gen_cycle(4, 1.0).unwrap(), Operator::Laplacian).unwrap();
        for (a, b) in s.eigenvalues.iter().zip([0.0, 1.0, 1.0, 2.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn complete_graph_facts() {
        let k4 = gen_complete(4).unwrap();
        let s = dense_spectrum(&k4, Operator::Laplacian).unwrap();
        assert_abs_diff_eq!(s.eigenvalue(2), 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(brute_force_phi(&k4).unwrap().0, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn planted_extremes() {
        let inst = gen_planted_bisection(4, 1.0, 0.0, 7).unwrap();
        assert_eq!(inst.graph, WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap());
        assert_eq!((inst.x.clone(), inst.y.clone()), (vec![0, 1], vec![2, 3]));
        let full = gen_planted_bisection(10, 1.0, 1.0, 3).unwrap();
        assert_eq!(full.graph, gen_complete(10).unwrap());
        assert!(gen_planted_bisection(5, 0.5, 0.1, 1).is_err());
        assert!(gen_planted_bisection(6, 0.1, 0.5, 1).is_err());
    }

    #[test]
    fn planted_is_reproducible() {
        let a = gen_planted_bisection(32, 0.5, 0.1, 1).unwrap();
        let b = gen_planted_bisection(32, 0.5, 0.1, 1).unwrap();
        assert_eq!(a.graph, b.graph);
        let c = gen_planted_bisection(32, 0.5, 0.1, 2).unwrap();
        assert_ne!(a.graph, c.graph);
        let x = VertexSet::from_vertices(&a.graph, a.x.clone()).unwrap();
        assert!(conductance(&a.graph, &x).unwrap() < 0.5);
    }

    #[test]
    fn joined_expanders() {
        let bb = gen_joined_expanders(4, 1, 1.0, 1).unwrap();
        assert_eq!(bb.num_edges(), 13);
        let (phi, _) = brute_force_phi(&bb).unwrap();
        assert_eq!(phi, 1.0 / 13.0);

        let g = gen_joined_expanders(8, 2, 1.0, 1).unwrap();
        assert_eq!(g.num_edges(), 16 + 16 + 2);
        let side = VertexSet::from_vertices(&g, 0..8).unwrap();
        assert_eq!(side.boundary_weight(), 2.0);
        assert_eq!(conductance(&g, &side).unwrap(), 2.0 / side.volume());
        assert_eq!(g, gen_joined_expanders(8, 2, 1.0, 1).unwrap());
        assert!(gen_joined_expanders(8, 9, 1.0, 1).is_err());

        let g = gen_joined_expanders(16, 1, 1.0, 2).unwrap();
        let s = dense_spectrum(&g, Operator::Laplacian).unwrap();
        assert!(s.eigenvalue(3) > 5.0 * s.eigenvalue(2));
    }

    #[test]
    fn stable_gadget_counts() {
        let g = gen_stable_gadget(3, 9.0).unwrap();
        assert_eq!((g.n(), g.num_edges()), (6, 9));
        assert!(g.edges().iter().all(|e| e.w == 1.0));

        let n = 8;
        let g = gen_stable_gadget(n, 1.0).unwrap();
        assert_eq!(g.num_edges(), 3 * n);
        let odd_labels = VertexSet::from_vertices(&g, (0..n).map(|i| 2 * i)).unwrap();
        assert_eq!(odd_labels.boundary_weight(), 1.0 / n as f64);

        for n in [8, 16] {
            let g = gen_stable_gadget(n, 1.0).unwrap();
            let s = dense_spectrum(&g, Operator::Laplacian).unwrap();
            let scale = 1.0 / (n * n) as f64;
            assert!(s.eigenvalue(2) < 20.0 * scale && s.eigenvalue(3) < 20.0 * scale);
        }
    }

    #[test]
    fn stability_probe_examples() {
        let k2 = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(stability_probe(&k2, 1.0).unwrap().delta_star, 0.0);

        let c8 = gen_cycle(8, 1.0).unwrap();
        let r = stability_probe(&c8, 1.0).unwrap();
        assert_eq!(r.optimal_cuts, 8);
        assert!(r.delta_star > 0.0);

        let a = stability_probe(&gen_stable_gadget(6, 2.0).unwrap(), 2.0).unwrap();
        let b = stability_probe(&gen_stable_gadget(6, 2.0).unwrap(), 2.0).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(stability_probe(&gen_cycle(17, 1.0).unwrap(), 1.0).is_err());
    }
}
