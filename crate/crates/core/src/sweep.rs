use serde::Serialize;

use crate::error::{domain, Result};
use crate::graph::{conductance_of_mask, cut_tally, split_volumes, InducedCut, VertexSet, WeightedGraph};
use crate::spectral::support_volume;

/// Best threshold set (or threshold cut) of a function.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub threshold: f64,
    /// For conductance sweeps, the smaller-volume side of V_f(t_opt).
    pub set: VertexSet,
    /// For bipartiteness sweeps, (L_f(t_opt), R_f(t_opt)).
    pub cut: Option<InducedCut>,
    pub value: f64,
    pub trace: Option<Vec<(f64, f64)>>,
}

/// Values within this relative distance of the incremental minimum are
/// re-evaluated from scratch before choosing the winner.
const REFINE_REL: f64 = 1e-9;

fn check_len(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() != g.n() {
        return Err(domain(format!(
            "function has {} values, graph has {} vertices",
            f.len(),
            g.n()
        )));
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(domain("function has non-finite values"));
    }
    Ok(())
}

/// Vertex indices grouped by equal key, in descending key order.
fn descending_groups(keys: &[f64], include: impl Fn(usize) -> bool) -> Vec<(f64, Vec<usize>)> {
    let mut order: Vec<usize> = (0..keys.len()).filter(|&v| include(v)).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for v in order {
        match groups.last_mut() {
            Some((t, vs)) if *t == keys[v] => vs.push(v),
            _ => groups.push((keys[v], vec![v])),
        }
    }
    groups
}

/// Pick the minimum of exact re-evaluations among near-minimal candidates;
/// ties go to the smaller threshold. `values` are in descending-threshold order.
fn refine_min(values: &[(f64, f64)], exact: impl Fn(usize) -> f64) -> Option<(usize, f64)> {
    let approx_min = values
        .iter()
        .map(|p| p.1)
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    if !approx_min.is_finite() {
        return None;
    }
    let cutoff = approx_min + REFINE_REL * approx_min.abs().max(1e-300) + 1e-300;
    let mut best: Option<(usize, f64)> = None;
    for (i, &(_, v)) in values.iter().enumerate() {
        if !(v <= cutoff) {
            continue;
        }
        let x = exact(i);
        if best.map_or(true, |(_, b)| x <= b) {
            best = Some((i, x));
        }
    }
    best
}

/// φ(f): minimum conductance over threshold sets V_f(t) = {v : f(v) ≥ t}.
pub fn sweep_conductance(g: &WeightedGraph, f: &[f64]) -> Result<SweepResult> {
    sweep_conductance_impl(g, f, false)
}

pub fn sweep_conductance_traced(g: &WeightedGraph, f: &[f64]) -> Result<SweepResult> {
    sweep_conductance_impl(g, f, true)
}

fn threshold_mask(f: &[f64], t: f64) -> Vec<bool> {
    f.iter().map(|&x| x >= t).collect()
}

fn sweep_conductance_impl(g: &WeightedGraph, f: &[f64], keep_trace: bool) -> Result<SweepResult> {
    check_len(g, f)?;
    let groups = descending_groups(f, |_| true);
    if groups.len() < 2 {
        return Err(domain("sweep of a constant function"));
    }
    let total = g.total_volume();
    let mut inside = vec![false; g.n()];
    let (mut cut, mut vol) = (0.0, 0.0);
    let mut values = Vec::with_capacity(groups.len() - 1);
    // The minimum value gives V itself and is not a candidate.
    for (t, vs) in &groups[..groups.len() - 1] {
        for &v in vs {
            let into: f64 = g
                .neighbors(v)
                .iter()
                .filter(|(u, _)| inside[*u])
                .map(|(_, w)| w)
                .sum();
            cut += g.degree(v) - 2.0 * into;
            vol += g.degree(v);
            inside[v] = true;
        }
        let denom = vol.min(total - vol);
        let value = if denom > 0.0 { cut.max(0.0) / denom } else { f64::INFINITY };
        values.push((*t, value));
    }
    let (i, value) = refine_min(&values, |i| {
        conductance_of_mask(g, &threshold_mask(f, values[i].0)).unwrap_or(f64::INFINITY)
    })
    .ok_or_else(|| domain("no threshold set has positive volume on both sides"))?;
    let threshold = values[i].0;
    let mask = threshold_mask(f, threshold);
    let (vin, vout) = split_volumes(g, &mask);
    let mask = if vin > vout { mask.iter().map(|m| !m).collect() } else { mask };
    let set = VertexSet::from_mask(g, mask)?;
    Ok(SweepResult {
        threshold,
        set,
        cut: None,
        value,
        trace: keep_trace.then_some(values),
    })
}

fn beta_edge(a: i8, b: i8, w: f64) -> f64 {
    match (a, b) {
        (0, 0) => 0.0,
        (0, _) | (_, 0) => w,
        (x, y) if x == y => 2.0 * w,
        _ => 0.0,
    }
}

fn threshold_signs(f: &[f64], t: f64) -> Vec<i8> {
    f.iter()
        .map(|&x| {
            if x <= -t {
                -1
            } else if x >= t {
                1
            } else {
                0
            }
        })
        .collect()
}

fn beta_of_signs(g: &WeightedGraph, signs: &[i8]) -> f64 {
    let t = cut_tally(g, signs);
    if t.volume > 0.0 {
        (2.0 * t.internal + t.outward) / t.volume
    } else {
        f64::INFINITY
    }
}

/// β(f): minimum bipartiteness ratio over threshold cuts
/// L_f(t) = {f ≤ −t}, R_f(t) = {f ≥ t}, t ∈ {|f(v)| : f(v) ≠ 0}.
pub fn sweep_bipartiteness(g: &WeightedGraph, f: &[f64]) -> Result<SweepResult> {
    sweep_bipartiteness_impl(g, f, false)
}

pub fn sweep_bipartiteness_traced(g: &WeightedGraph, f: &[f64]) -> Result<SweepResult> {
    sweep_bipartiteness_impl(g, f, true)
}

fn sweep_bipartiteness_impl(g: &WeightedGraph, f: &[f64], keep_trace: bool) -> Result<SweepResult> {
    check_len(g, f)?;
    let abs: Vec<f64> = f.iter().map(|x| x.abs()).collect();
    let groups = descending_groups(&abs, |v| f[v] != 0.0);
    if groups.is_empty() {
        return Err(domain("bipartiteness sweep of a zero function"));
    }
    let mut sign = vec![0i8; g.n()];
    let (mut num, mut vol) = (0.0, 0.0);
    let mut values = Vec::with_capacity(groups.len());
    for (t, vs) in &groups {
        for &v in vs {
            let s = if f[v] > 0.0 { 1 } else { -1 };
            for &(u, w) in g.neighbors(v) {
                num += beta_edge(s, sign[u], w) - beta_edge(0, sign[u], w);
            }
            sign[v] = s;
            vol += g.degree(v);
        }
        let value = if vol > 0.0 { num.max(0.0) / vol } else { f64::INFINITY };
        values.push((*t, value));
    }
    let (i, value) = refine_min(&values, |i| beta_of_signs(g, &threshold_signs(f, values[i].0)))
        .ok_or_else(|| domain("every threshold cut has zero volume"))?;
    let threshold = values[i].0;
    let signs = threshold_signs(f, threshold);
    let left = VertexSet::from_mask(g, signs.iter().map(|&s| s == -1).collect())?;
    let right = VertexSet::from_mask(g, signs.iter().map(|&s| s == 1).collect())?;
    let union = VertexSet::from_mask(g, signs.iter().map(|&s| s != 0).collect())?;
    Ok(SweepResult {
        threshold,
        set: union,
        cut: Some(InducedCut::new(left, right)?),
        value,
        trace: keep_trace.then_some(values),
    })
}

/// Direct re-evaluation of every conductance threshold candidate.
pub fn exhaustive_threshold_conductance(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    check_len(g, f)?;
    let groups = descending_groups(f, |_| true);
    if groups.len() < 2 {
        return Err(domain("sweep of a constant function"));
    }
    Ok(groups[..groups.len() - 1]
        .iter()
        .filter_map(|(t, _)| conductance_of_mask(g, &threshold_mask(f, *t)))
        .fold(f64::INFINITY, f64::min))
}

/// Direct re-evaluation of every bipartiteness threshold candidate.
pub fn exhaustive_threshold_bipartiteness(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    check_len(g, f)?;
    let abs: Vec<f64> = f.iter().map(|x| x.abs()).collect();
    let groups = descending_groups(&abs, |v| f[v] != 0.0);
    if groups.is_empty() {
        return Err(domain("bipartiteness sweep of a zero function"));
    }
    Ok(groups
        .iter()
        .map(|(t, _)| beta_of_signs(g, &threshold_signs(f, *t)))
        .fold(f64::INFINITY, f64::min))
}

fn check_small_nonneg(g: &WeightedGraph, h: &[f64]) -> Result<()> {
    check_len(g, h)?;
    if h.iter().any(|&x| x < 0.0) {
        return Err(domain("function has negative entries"));
    }
    if h.iter().all(|&x| x == 0.0) {
        return Err(domain("function is zero"));
    }
    if support_volume(g, h) > g.total_volume() / 2.0 * (1.0 + 1e-12) {
        return Err(domain("support volume exceeds vol(V)/2"));
    }
    Ok(())
}

/// Σ w(u,v)|h(u) − h(v)| / Σ w(v)h(v), an upper bound on φ(h).
pub fn dirichlet_bound(g: &WeightedGraph, h: &[f64]) -> Result<f64> {
    check_small_nonneg(g, h)?;
    let num: f64 = g.edges().iter().map(|e| e.w * (h[e.u] - h[e.v]).abs()).sum();
    let den: f64 = h.iter().zip(g.degrees()).map(|(x, d)| d * x).sum();
    Ok(num / den)
}

/// Σ w(u,v)|h(u) + h(v)| / Σ w(v)|h(v)|, an upper bound on β(h).
pub fn trevisan_bound(g: &WeightedGraph, h: &[f64]) -> Result<f64> {
    check_len(g, h)?;
    let den: f64 = h.iter().zip(g.degrees()).map(|(x, d)| d * x.abs()).sum();
    if den <= 0.0 {
        return Err(domain("function is zero"));
    }
    let num: f64 = g.edges().iter().map(|e| e.w * (h[e.u] + h[e.v]).abs()).sum();
    Ok(num / den)
}

/// The set {x : min(a,b) < x ≤ max(a,b)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        Interval { a, b }
    }

    pub fn lo(&self) -> f64 {
        self.a.min(self.b)
    }

    pub fn hi(&self) -> f64 {
        self.a.max(self.b)
    }

    pub fn len(&self) -> f64 {
        (self.a - self.b).abs()
    }

    pub fn is_empty(&self) -> bool {
        self.a == self.b
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() < x && x <= self.hi()
    }

    /// len(I ∩ [x, y]) for the segment between two values.
    pub fn overlap(&self, x: f64, y: f64) -> f64 {
        let lo = self.lo().max(x.min(y));
        let hi = self.hi().min(x.max(y));
        (hi - lo).max(0.0)
    }
}

/// E_f(I) = Σ w(u,v) len(I ∩ [f(u), f(v)])².
pub fn restricted_energy(g: &WeightedGraph, f: &[f64], i: Interval) -> f64 {
    g.edges()
        .iter()
        .map(|e| e.w * i.overlap(f[e.u], f[e.v]).powi(2))
        .sum()
}

/// vol_f(I) = vol({v : f(v) ∈ I}).
pub fn interval_volume(g: &WeightedGraph, f: &[f64], i: Interval) -> f64 {
    f.iter()
        .zip(g.degrees())
        .filter(|(x, _)| i.contains(**x))
        .map(|(_, d)| d)
        .sum()
}

/// vol_f(t) = vol({v : f(v) ≥ t}).
pub fn level_volume(g: &WeightedGraph, f: &[f64], t: f64) -> f64 {
    f.iter()
        .zip(g.degrees())
        .filter(|(x, _)| **x >= t)
        .map(|(_, d)| d)
        .sum()
}

/// φ²·vol_f(a)²·len(I)² / (φ·vol_f(a) + vol_f(I)) for I with endpoints a > b ≥ 0,
/// a lower bound on E_f(I).
pub fn energy_drop_lower_bound(g: &WeightedGraph, f: &[f64], i: Interval, phi_f: f64) -> Result<f64> {
    check_small_nonneg(g, f)?;
    if !(i.b >= 0.0 && i.a >= i.b) {
        return Err(domain("interval must satisfy a ≥ b ≥ 0"));
    }
    if !(phi_f >= 0.0) {
        return Err(domain("φ(f) must be nonnegative"));
    }
    let len = i.len();
    if len == 0.0 {
        return Ok(0.0);
    }
    let va = level_volume(g, f, i.a);
    let vi = interval_volume(g, f, i);
    let den = phi_f * va + vi;
    if den <= 0.0 {
        return Ok(0.0);
    }
    Ok((phi_f * va * len).powi(2) / den)
}
