//! Exhaustive oracles for small graphs.
//!
//! Subsets are walked in Gray-code order with incremental cut updates. When
//! every weight is a dyadic rational whose common scaling fits in 62 bits the
//! walk runs in exact `i128` arithmetic; otherwise it falls back to `f64`.
//! Ties go to the lexicographically smallest sorted vertex list, and reported
//! values are recomputed directly from the winning set.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use crate::error::{domain, Error, Result};
use crate::graph::{bipartiteness_ratio, conductance, InducedCut, VertexSet, WeightedGraph};

pub const PHI_MAX_N: usize = 24;
pub const BETA_MAX_N: usize = 14;
pub const MAXCUT_MAX_N: usize = 24;
pub const BISECTION_MAX_N: usize = 20;

trait Scalar: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    const ZERO: Self;
    fn two() -> Self;
}

impl Scalar for i128 {
    const ZERO: Self = 0;
    fn two() -> Self {
        2
    }
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    fn two() -> Self {
        2.0
    }
}

struct Weights<T> {
    adj: Vec<Vec<(usize, T)>>,
    degree: Vec<T>,
    total: T,
}

fn float_weights(g: &WeightedGraph) -> Weights<f64> {
    let adj = (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect();
    Weights {
        adj,
        degree: g.degrees().to_vec(),
        total: g.total_volume(),
    }
}

/// (odd mantissa, binary exponent) with w = m · 2^e.
fn dyadic(w: f64) -> (u64, i32) {
    let bits = w.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    (m, e)
}

fn exact_weights(g: &WeightedGraph) -> Option<Weights<i128>> {
    const LIMIT: i128 = 1 << 62;
    if g.num_edges() == 0 {
        return Some(Weights {
            adj: vec![Vec::new(); g.n()],
            degree: vec![0; g.n()],
            total: 0,
        });
    }
    let parts: Vec<(u64, i32)> = g.edges().iter().map(|e| dyadic(e.w)).collect();
    let e_min = parts.iter().map(|p| p.1).min()?;
    let mut scaled = Vec::with_capacity(parts.len());
    for &(m, e) in &parts {
        let shift = (e - e_min) as u32;
        if shift >= 62 || (64 - m.leading_zeros()) + shift > 62 {
            return None;
        }
        scaled.push((m as i128) << shift);
    }
    let mut adj = vec![Vec::new(); g.n()];
    let mut degree = vec![0i128; g.n()];
    let mut total = 0i128;
    for (e, &w) in g.edges().iter().zip(&scaled) {
        adj[e.u].push((e.v, w));
        adj[e.v].push((e.u, w));
        degree[e.u] += w;
        degree[e.v] += w;
        total = total.checked_add(2 * w)?;
        if total > LIMIT {
            return None;
        }
    }
    Some(Weights { adj, degree, total })
}

/// Is the sorted vertex list of `a` lexicographically smaller than that of `b`?
fn lex_less(a: u64, b: u64) -> bool {
    let x = a ^ b;
    if x == 0 {
        return false;
    }
    let p = x.trailing_zeros();
    let a_has = (a >> p) & 1 == 1;
    // The set lacking p wins only if it has run out of elements (prefix).
    let lacking = if a_has { b } else { a };
    let lacking_continues = (lacking >> p) != 0;
    a_has == lacking_continues
}

fn lex_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        Ordering::Equal
    } else if lex_less(a, b) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Cut weight change when vertex `v` toggles membership; `mask` is the state before.
fn toggle_delta<T: Scalar>(w: &Weights<T>, mask: u64, v: usize) -> T {
    let mut inside = T::ZERO;
    for &(u, x) in &w.adj[v] {
        if (mask >> u) & 1 == 1 {
            inside = inside + x;
        }
    }
    // Adding v: cut gains edges to the outside and loses edges into S.
    // Removing v: the reverse, with `inside` counting S ∖ {v}.
    if (mask >> v) & 1 == 0 {
        w.degree[v] - T::two() * inside
    } else {
        T::two() * inside - w.degree[v]
    }
}

/// Walk all masks over `bits` vertices in Gray order, calling `visit(mask, cut, vol)`.
fn gray_walk<T: Scalar>(w: &Weights<T>, bits: usize, mut visit: impl FnMut(u64, T, T)) {
    let mut mask = 0u64;
    let mut cut = T::ZERO;
    let mut vol = T::ZERO;
    visit(mask, cut, vol);
    for i in 1u64..(1u64 << bits) {
        let v = i.trailing_zeros() as usize;
        cut = cut + toggle_delta(w, mask, v);
        if (mask >> v) & 1 == 0 {
            vol = vol + w.degree[v];
        } else {
            vol = vol - w.degree[v];
        }
        mask ^= 1 << v;
        visit(mask, cut, vol);
    }
}

fn mask_to_set(g: &WeightedGraph, mask: u64) -> VertexSet {
    VertexSet::from_vertices(g, (0..g.n()).filter(|&v| (mask >> v) & 1 == 1))
        .expect("mask within range")
}

fn check_cap(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Capacity {
            what,
            value: n,
            limit,
        });
    }
    Ok(())
}

fn min_conductance_mask<T: Scalar>(w: &Weights<T>, n: usize, balanced_only: bool) -> Option<u64> {
    let full = (1u64 << n) - 1;
    let mut best: Option<(u64, T, T)> = None;
    gray_walk(w, n, |mask, cut, vol| {
        if mask == 0 || mask == full {
            return;
        }
        let other = w.total - vol;
        if balanced_only && !(vol + vol == w.total) {
            return;
        }
        let denom = if vol < other { vol } else { other };
        if !(denom > T::ZERO) {
            return;
        }
        let better = match best {
            None => true,
            Some((bm, bc, bd)) => {
                let lhs = cut * bd;
                let rhs = bc * denom;
                lhs < rhs || (!(lhs > rhs) && lex_less(mask, bm))
            }
        };
        if better {
            best = Some((mask, cut, denom));
        }
    });
    best.map(|b| b.0)
}

/// φ(G) by exhaustive search over all proper subsets, with an argmin.
pub fn brute_force_phi(g: &WeightedGraph) -> Result<(f64, VertexSet)> {
    check_cap("vertices for brute_force_phi", g.n(), PHI_MAX_N)?;
    let mask = match exact_weights(g) {
        Some(w) => min_conductance_mask(&w, g.n(), false),
        None => min_conductance_mask(&float_weights(g), g.n(), false),
    }
    .ok_or_else(|| domain("no proper subset with positive volume on both sides"))?;
    let set = mask_to_set(g, mask);
    Ok((conductance(g, &set)?, set))
}

/// min φ(S) over sets with vol(S) = vol(V)/2, or `None` when no such set exists.
///
/// In the floating-point fallback the balance test is exact equality, which
/// only matches sets whose volumes sum without rounding.
pub fn brute_force_bisection(g: &WeightedGraph) -> Result<Option<(f64, VertexSet)>> {
    check_cap("vertices for brute_force_bisection", g.n(), BISECTION_MAX_N)?;
    let mask = match exact_weights(g) {
        Some(w) => min_conductance_mask(&w, g.n(), true),
        None => min_conductance_mask(&float_weights(g), g.n(), true),
    };
    match mask {
        None => Ok(None),
        Some(m) => {
            let set = mask_to_set(g, m);
            Ok(Some((conductance(g, &set)?, set)))
        }
    }
}

fn max_cut_mask<T: Scalar>(w: &Weights<T>, n: usize) -> u64 {
    // Vertex n−1 stays outside S: every cut is visited once.
    let bits = n.saturating_sub(1);
    let mut best: Option<(u64, T)> = None;
    gray_walk(w, bits, |mask, cut, _| {
        let better = match best {
            None => true,
            Some((bm, bc)) => cut > bc || (!(cut < bc) && lex_less(mask, bm)),
        };
        if better {
            best = Some((mask, cut));
        }
    });
    best.map(|b| b.0).unwrap_or(0)
}

/// Maximum cut: (cut weight, cut fraction w(E(S,S̄))/w(E), S).
pub fn brute_force_maxcut(g: &WeightedGraph) -> Result<(f64, f64, VertexSet)> {
    check_cap("vertices for brute_force_maxcut", g.n(), MAXCUT_MAX_N)?;
    if g.num_edges() == 0 {
        return Err(domain("max cut of an edgeless graph"));
    }
    let mask = match exact_weights(g) {
        Some(w) => max_cut_mask(&w, g.n()),
        None => max_cut_mask(&float_weights(g), g.n()),
    };
    let set = mask_to_set(g, mask);
    let cut = set.boundary_weight();
    Ok((cut, cut / g.total_weight(), set))
}

/// Contribution of one edge to 2w(E(L))+2w(E(R))+w(E(L∪R, outside)).
fn beta_edge<T: Scalar>(a: u8, b: u8, w: T) -> T {
    match (a, b) {
        (0, 0) => T::ZERO,
        (0, _) | (_, 0) => w,
        (x, y) if x == y => T::two() * w,
        _ => T::ZERO,
    }
}

fn min_beta_masks<T: Scalar>(w: &Weights<T>, n: usize) -> Option<(u64, u64)> {
    // Reflected mixed-radix Gray code over states 0 (outside), 1 (L), 2 (R).
    let mut state = vec![0u8; n];
    let mut dir = vec![1i8; n];
    let (mut lmask, mut rmask) = (0u64, 0u64);
    let mut num = T::ZERO;
    let mut vol = T::ZERO;
    let mut best: Option<(u64, u64, T, T)> = None;
    loop {
        if vol > T::ZERO {
            let better = match best {
                None => true,
                Some((bl, br, bn, bv)) => {
                    let lhs = num * bv;
                    let rhs = bn * vol;
                    lhs < rhs
                        || (!(lhs > rhs)
                            && lex_cmp(lmask, bl).then(lex_cmp(rmask, br)) == Ordering::Less)
                }
            };
            if better {
                best = Some((lmask, rmask, num, vol));
            }
        }
        let mut j = 0;
        while j < n {
            let next = state[j] as i8 + dir[j];
            if (0..=2).contains(&next) {
                break;
            }
            dir[j] = -dir[j];
            j += 1;
        }
        if j == n {
            break;
        }
        let old = state[j];
        let new = (old as i8 + dir[j]) as u8;
        for &(u, x) in &w.adj[j] {
            num = num + beta_edge(new, state[u], x) - beta_edge(old, state[u], x);
        }
        if old == 0 {
            vol = vol + w.degree[j];
        } else if new == 0 {
            vol = vol - w.degree[j];
        }
        let bit = 1u64 << j;
        lmask &= !bit;
        rmask &= !bit;
        match new {
            1 => lmask |= bit,
            2 => rmask |= bit,
            _ => {}
        }
        state[j] = new;
    }
    best.map(|b| (b.0, b.1))
}

/// β(G) by exhaustive search over all induced cuts, with an argmin.
pub fn brute_force_beta(g: &WeightedGraph) -> Result<(f64, InducedCut)> {
    check_cap("vertices for brute_force_beta", g.n(), BETA_MAX_N)?;
    let (l, r) = match exact_weights(g) {
        Some(w) => min_beta_masks(&w, g.n()),
        None => min_beta_masks(&float_weights(g), g.n()),
    }
    .ok_or_else(|| domain("every induced cut has zero volume"))?;
    let cut = InducedCut::new(mask_to_set(g, l), mask_to_set(g, r))?;
    Ok((bipartiteness_ratio(g, &cut)?, cut))
}

/// Every proper subset with positive volume on both sides, as (mask, φ), in Gray order.
pub(crate) fn all_conductances(g: &WeightedGraph) -> Result<Vec<(u64, f64)>> {
    check_cap("vertices for exhaustive cut enumeration", g.n(), PHI_MAX_N)?;
    let w = float_weights(g);
    let full = (1u64 << g.n()) - 1;
    let mut out = Vec::new();
    gray_walk(&w, g.n(), |mask, _, _| {
        if mask == 0 || mask == full {
            return;
        }
        let set: Vec<bool> = (0..g.n()).map(|v| (mask >> v) & 1 == 1).collect();
        if let Some(phi) = crate::graph::conductance_of_mask(g, &set) {
            out.push((mask, phi));
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_complete, gen_cycle, two_cliques_bridge};

    #[test]
    fn lex_order_on_sorted_lists() {
        // {0} < {0,1} < {0,2} < {1}
        assert!(lex_less(0b001, 0b011));
        assert!(lex_less(0b011, 0b101));
        assert!(lex_less(0b101, 0b010));
        assert!(!lex_less(0b010, 0b001));
        assert!(!lex_less(0b011, 0b011));
    }

    #[test]
    fn dyadic_decoding() {
        assert_eq!(dyadic(1.0), (1, 0));
        assert_eq!(dyadic(0.375), (3, -3));
        assert_eq!(dyadic(6.0), (3, 1));
    }

    #[test]
    fn phi_examples() {
        let k2 = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(brute_force_phi(&k2).unwrap().0, 1.0);
        let (phi, set) = brute_force_phi(&gen_cycle(8, 1.0).unwrap()).unwrap();
        assert_eq!(phi, 0.25);
        assert_eq!(set.len(), 4);
        let (phi, _) = brute_force_phi(&two_cliques_bridge(4, 1.0).unwrap()).unwrap();
        assert_eq!(phi, 1.0 / 13.0);
    }

    #[test]
    fn phi_tie_takes_lex_smallest() {
        let (_, set) = brute_force_phi(&gen_cycle(4, 1.0).unwrap()).unwrap();
        assert_eq!(set.vertices(), vec![0, 1]);
    }

    #[test]
    fn float_fallback_agrees() {
        let g = WeightedGraph::new(4, [(0, 1, 0.1), (1, 2, 1e-12), (2, 3, 3.0), (3, 0, 0.7)]).unwrap();
        assert!(exact_weights(&g).is_none());
        let (phi, set) = brute_force_phi(&g).unwrap();
        let mut best = f64::INFINITY;
        for m in 1u64..15 {
            let s = mask_to_set(&g, m);
            best = best.min(conductance(&g, &s).unwrap());
        }
        assert!((phi - best).abs() < 1e-15);
        assert_eq!(conductance(&g, &set).unwrap(), phi);
    }

    #[test]
    fn beta_examples() {
        assert_eq!(brute_force_beta(&gen_cycle(6, 1.0).unwrap()).unwrap().0, 0.0);
        let (b, _) = brute_force_beta(&gen_complete(3).unwrap()).unwrap();
        assert!((b - 1.0 / 3.0).abs() < 1e-15);
        let (b, _) = brute_force_beta(&gen_cycle(5, 1.0).unwrap()).unwrap();
        assert!((b - 0.2).abs() < 1e-15);
    }

    #[test]
    fn beta_matches_naive_enumeration() {
        let g = WeightedGraph::new(
            5,
            [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5), (2, 3, 1.0), (3, 4, 1.5), (4, 0, 1.0)],
        )
        .unwrap();
        let mut best = f64::INFINITY;
        for code in 1..3usize.pow(5) {
            let mut c = code;
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for v in 0..5 {
                match c % 3 {
                    1 => l.push(v),
                    2 => r.push(v),
                    _ => {}
                }
                c /= 3;
            }
            let cut = InducedCut::from_vertices(&g, l, r).unwrap();
            best = best.min(bipartiteness_ratio(&g, &cut).unwrap());
        }
        let (b, _) = brute_force_beta(&g).unwrap();
        assert!((b - best).abs() < 1e-15);
    }

    #[test]
    fn maxcut_and_bisection() {
        let (cut, frac, _) = brute_force_maxcut(&gen_complete(3).unwrap()).unwrap();
        assert_eq!((cut, frac), (2.0, 2.0 / 3.0));
        let (_, frac, _) = brute_force_maxcut(&gen_cycle(6, 1.0).unwrap()).unwrap();
        assert_eq!(frac, 1.0);
        let (eps, set) = brute_force_bisection(&gen_cycle(8, 1.0).unwrap()).unwrap().unwrap();
        assert_eq!(eps, 0.25);
        assert_eq!(set.volume(), 8.0);
        assert!(brute_force_bisection(&gen_complete(3).unwrap()).unwrap().is_none());
    }

    #[test]
    fn capacity_guards() {
        let g = gen_cycle(25, 1.0).unwrap();
        assert!(matches!(brute_force_phi(&g), Err(Error::Capacity { .. })));
        let g = gen_cycle(15, 1.0).unwrap();
        assert!(matches!(brute_force_beta(&g), Err(Error::Capacity { .. })));
    }
}
