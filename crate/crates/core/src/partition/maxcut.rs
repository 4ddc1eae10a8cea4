use serde_json::{json, Value};

use super::{descending_levels, Branch};
use crate::certificate::Certificate;
use crate::error::{domain, Result};
use crate::graph::{bipartiteness_ratio, induced_subgraph, uncutness, InducedCut, VertexSet, WeightedGraph};
use crate::io::num17;
use crate::oracle::brute_force_maxcut;
use crate::spectral::{dense_spectrum, signless_rayleigh, Operator};
use crate::step::{band_functions, symmetric_step_approximation};
use crate::sweep::sweep_bipartiteness;

/// ε is taken from the exhaustive oracle up to this many vertices.
pub const EXACT_EPSILON_MAX_N: usize = 14;

#[derive(Debug, Clone)]
pub struct MaxCutStep {
    pub iteration: usize,
    /// w(E(U))/w(E) before the step.
    pub rho: f64,
    pub branch: Branch,
    pub alpha1_h: f64,
    /// β_H of the removed induced cut.
    pub beta_removed: f64,
    pub removed_left: Vec<usize>,
    pub removed_right: Vec<usize>,
    pub uncutness_before: f64,
    pub uncutness_after: f64,
}

impl MaxCutStep {
    pub fn to_json(&self) -> Value {
        json!({
            "iteration": self.iteration,
            "rho": num17(self.rho),
            "branch": self.branch,
            "alpha1_h": num17(self.alpha1_h),
            "beta_removed": num17(self.beta_removed),
            "removed_left": self.removed_left,
            "removed_right": self.removed_right,
            "uncutness_before": num17(self.uncutness_before),
            "uncutness_after": num17(self.uncutness_after),
        })
    }
}

#[derive(Debug, Clone)]
pub struct MaxCutResult {
    pub cut: InducedCut,
    pub cut_weight: f64,
    pub cut_fraction: f64,
    pub alpha_k: Option<f64>,
    /// 1 − optimal cut fraction, when small enough to enumerate.
    pub epsilon: Option<f64>,
    /// Evaluated lower bound on the cut fraction; `None` when only the trivial bound applies.
    pub guarantee: Option<f64>,
    pub iterations: usize,
    pub trace: Vec<MaxCutStep>,
}

impl MaxCutResult {
    pub fn trace_json(&self) -> Vec<Value> {
        self.trace.iter().map(MaxCutStep::to_json).collect()
    }
}

/// 1 − (600kε/α_k)(1 + ln(α_k/(600kε))) when 600kε < α_k.
pub fn maxcut_guarantee(k: usize, epsilon: f64, alpha_k: f64) -> Option<f64> {
    if !(alpha_k > 0.0) || epsilon < 0.0 {
        return None;
    }
    let x = 600.0 * k as f64 * epsilon / alpha_k;
    if x >= 1.0 {
        None
    } else if x == 0.0 {
        Some(1.0)
    } else {
        Some(1.0 - x * (1.0 + (1.0 / x).ln()))
    }
}

fn signs_of(n: usize, left: &[usize], right: &[usize]) -> Vec<i8> {
    let mut s = vec![0i8; n];
    for &v in left {
        s[v] = 1;
    }
    for &v in right {
        s[v] = -1;
    }
    s
}

fn cut_of(g: &WeightedGraph, signs: &[i8]) -> Result<InducedCut> {
    InducedCut::new(
        VertexSet::from_mask(g, signs.iter().map(|&s| s == 1).collect())?,
        VertexSet::from_mask(g, signs.iter().map(|&s| s == -1).collect())?,
    )
}

fn gamma(g: &WeightedGraph, signs: &[i8]) -> Result<f64> {
    Ok(uncutness(g, &cut_of(g, signs)?))
}

/// Threshold cut of h at t in H ids: (L′, R′) = ({h ≤ −t}, {h ≥ t}).
fn threshold_cut(h: &[f64], t: f64) -> (Vec<usize>, Vec<usize>) {
    let left = (0..h.len()).filter(|&i| h[i] <= -t).collect();
    let right = (0..h.len()).filter(|&i| h[i] >= t).collect();
    (left, right)
}

struct Found {
    left: Vec<usize>,
    right: Vec<usize>,
    beta_h: f64,
}

/// First threshold cut of a family member whose merge, in the better
/// orientation, does not raise γ. Returns H ids with the orientation applied.
fn enlargement_cut(
    g: &WeightedGraph,
    h: &WeightedGraph,
    to_parent: &[usize],
    signs: &[i8],
    families: &[Vec<f64>],
) -> Result<Option<Found>> {
    let before = gamma(g, signs)?;
    for fam in families {
        for t in descending_levels(fam) {
            let (l, r) = threshold_cut(fam, t);
            let mut straight = signs.to_vec();
            let mut flipped = signs.to_vec();
            for &i in &l {
                straight[to_parent[i]] = 1;
                flipped[to_parent[i]] = -1;
            }
            for &i in &r {
                straight[to_parent[i]] = -1;
                flipped[to_parent[i]] = 1;
            }
            let (gs, gf) = (gamma(g, &straight)?, gamma(g, &flipped)?);
            if gs.min(gf) <= before {
                let (left, right) = if gs <= gf { (l, r) } else { (r, l) };
                let beta_h = bipartiteness_ratio(h, &cut_of(h, &signs_of(h.n(), &left, &right))?)?;
                return Ok(Some(Found { left, right, beta_h }));
            }
        }
    }
    Ok(None)
}

/// The k band functions with smallest signless quotient from a failed
/// symmetric step approximation of f; empty when the approximation succeeds.
fn band_family(h: &WeightedGraph, f: &[f64], k: usize, beta: f64) -> Result<Vec<Vec<f64>>> {
    let approx = symmetric_step_approximation(h, f, k, beta)?;
    if approx.succeeded {
        return Ok(Vec::new());
    }
    let mut scored = Vec::new();
    for (i, b) in band_functions(f, &approx)?.into_iter().enumerate() {
        if b.iter().any(|&x| x != 0.0) {
            scored.push((signless_rayleigh(h, &b)?, i, b));
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    scored.sort_by_key(|s| s.1);
    Ok(scored.into_iter().map(|s| s.2).collect())
}

pub fn spectral_maxcut(g: &WeightedGraph, k: usize) -> Result<MaxCutResult> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(domain(format!("k must be in 2..={n}, got {k}")));
    }
    if g.num_edges() == 0 {
        return Err(domain("max cut of an edgeless graph"));
    }
    let alpha_k = if g.degrees().iter().all(|&d| d > 0.0) {
        Some(dense_spectrum(g, Operator::Signless)?.eigenvalue(k))
    } else {
        None
    };
    let total = g.total_weight();
    let mut signs = vec![0i8; n];
    let mut trace = Vec::new();

    loop {
        // U minus vertices with no edge inside U.
        let mut active = vec![false; n];
        let mut inside_weight = 0.0;
        for e in g.edges() {
            if signs[e.u] == 0 && signs[e.v] == 0 {
                active[e.u] = true;
                active[e.v] = true;
                inside_weight += e.w;
            }
        }
        if inside_weight == 0.0 {
            break;
        }
        let (h, to_parent) = induced_subgraph(g, &VertexSet::from_mask(g, active)?)?;
        let spectrum = dense_spectrum(&h, Operator::Signless)?;
        let f = spectrum.eigenfunction(1).to_vec();
        let sweep = sweep_bipartiteness(&h, &f)?;
        let families = band_family(&h, &f, k, sweep.value)?;
        let before = gamma(g, &signs)?;
        let (branch, found) = match enlargement_cut(g, &h, &to_parent, &signs, &families)? {
            Some(found) => (Branch::Enlarge, found),
            None => {
                let cut = sweep.cut.as_ref().expect("bipartiteness sweep returns a cut");
                (
                    Branch::Sweep,
                    Found {
                        left: cut.left.vertices(),
                        right: cut.right.vertices(),
                        beta_h: sweep.value,
                    },
                )
            }
        };
        let removed_left: Vec<usize> = found.left.iter().map(|&i| to_parent[i]).collect();
        let removed_right: Vec<usize> = found.right.iter().map(|&i| to_parent[i]).collect();
        if removed_left.is_empty() && removed_right.is_empty() {
            return Err(domain("max-cut iteration removed no vertices"));
        }
        for &v in &removed_left {
            signs[v] = 1;
        }
        for &v in &removed_right {
            signs[v] = -1;
        }
        trace.push(MaxCutStep {
            iteration: trace.len() + 1,
            rho: inside_weight / total,
            branch,
            alpha1_h: spectrum.eigenvalue(1),
            beta_removed: found.beta_h,
            removed_left,
            removed_right,
            uncutness_before: before,
            uncutness_after: gamma(g, &signs)?,
        });
    }

    // Leftover vertices have no edges among themselves; each joins the side
    // opposite to more of its weight.
    for v in 0..n {
        if signs[v] != 0 {
            continue;
        }
        let (mut to_left, mut to_right) = (0.0, 0.0);
        for &(u, w) in g.neighbors(v) {
            match signs[u] {
                1 => to_left += w,
                -1 => to_right += w,
                _ => {}
            }
        }
        signs[v] = if to_right >= to_left { 1 } else { -1 };
    }
    let cut = cut_of(g, &signs)?;
    let cut_weight: f64 = g.edges().iter().filter(|e| signs[e.u] != signs[e.v]).map(|e| e.w).sum();
    let epsilon = if n <= EXACT_EPSILON_MAX_N {
        Some(1.0 - brute_force_maxcut(g)?.1)
    } else {
        None
    };
    let guarantee = match (epsilon, alpha_k) {
        (Some(e), Some(a)) => maxcut_guarantee(k, e, a),
        _ => None,
    };
    Ok(MaxCutResult {
        cut,
        cut_weight,
        cut_fraction: cut_weight / total,
        alpha_k,
        epsilon,
        guarantee,
        iterations: trace.len(),
        trace,
    })
}

/// √(72ℛ_H(f)) ≥ ℛ_G(f) in signless form, when every threshold cut of f
/// satisfies ½w(E(L_t∪R_t, Ū)) ≤ 2w(E(L_t)) + 2w(E(R_t)) + w(E(L_t∪R_t, U∖(L_t∪R_t))).
pub fn maxcut_enlargement_check(
    g: &WeightedGraph,
    u: &VertexSet,
    partial: &InducedCut,
    f: &[f64],
) -> Result<Certificate> {
    if f.len() != g.n() {
        return Err(domain(format!("function has {} values, graph has {} vertices", f.len(), g.n())));
    }
    if let Some(v) = (0..g.n()).find(|&v| f[v] != 0.0 && !u.contains(v)) {
        return Err(domain(format!("vertex {v} is outside U but f({v}) ≠ 0")));
    }
    for v in 0..g.n() {
        let covered = partial.left.contains(v) || partial.right.contains(v);
        if covered == u.contains(v) {
            return Err(domain("the partial cut must partition the complement of U"));
        }
    }
    let (h, to_parent) = induced_subgraph(g, u)?;
    let fh: Vec<f64> = to_parent.iter().map(|&v| f[v]).collect();
    let r_g = signless_rayleigh(g, f)?;
    let r_h = signless_rayleigh(&h, &fh)?;

    let base = partial.signs();
    let gamma_base = uncutness(g, partial);
    let mut weaker = true;
    let mut invariant = true;
    for t in descending_levels(f) {
        let (mut internal, mut to_u, mut to_rest) = (0.0, 0.0, 0.0);
        let side = |x: f64| -> i8 {
            if x >= t {
                1
            } else if x <= -t {
                -1
            } else {
                0
            }
        };
        for e in g.edges() {
            let (a, b) = (side(f[e.u]), side(f[e.v]));
            if a == 0 && b == 0 {
                continue;
            }
            if a != 0 && b != 0 {
                if a == b {
                    internal += e.w;
                }
                continue;
            }
            let other = if a == 0 { e.u } else { e.v };
            if u.contains(other) {
                to_u += e.w;
            } else {
                to_rest += e.w;
            }
        }
        if 0.5 * to_rest > 2.0 * internal + to_u {
            weaker = false;
        }
        let mut straight = base.clone();
        let mut flipped = base.clone();
        for v in 0..g.n() {
            match side(f[v]) {
                -1 => {
                    straight[v] = 1;
                    flipped[v] = -1;
                }
                1 => {
                    straight[v] = -1;
                    flipped[v] = 1;
                }
                _ => {}
            }
        }
        if gamma(g, &straight)?.min(gamma(g, &flipped)?) <= gamma_base {
            invariant = false;
        }
    }
    let cert = Certificate::new("maxcut_enlargement", r_g, (72.0 * r_h).sqrt())
        .with_constant("rayleigh_g", r_g)
        .with_constant("rayleigh_h", r_h)
        .with_constant("strict_invariant", if invariant { 1.0 } else { 0.0 });
    Ok(if weaker {
        cert
    } else {
        cert.not_applicable("some threshold cut sends too much weight out of U")
    })
}
