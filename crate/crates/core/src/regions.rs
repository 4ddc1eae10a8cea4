//! Dyadic decompositions of a nonnegative function's range, dense
//! well-separated regions, and the smooth/localized dichotomy built on them.
//!
//! Level i is the interval (α^{i+1}, α^i] with α = 1/2, split into 12k equal
//! subintervals; subinterval j of level i is
//! (α^i(1 − (j+1)s), α^i(1 − js)] with s = (1 − α)/(12k). Vertex membership is
//! computed once per vertex so masses, flags and restrictions agree exactly.

use serde_json::{json, Value};

use crate::certificate::{Certificate, Witness};
use crate::error::{domain, Error, Result};
use crate::graph::WeightedGraph;
use crate::io::{num17, nums17};
use crate::spectral::{energy, norm_w_sq, rayleigh, support_volume};
use crate::sweep::{energy_drop_lower_bound, restricted_energy, sweep_conductance, Interval};

pub const ALPHA: f64 = 0.5;
/// α⁶(1 − α)²/96.
pub const C_HEAVY: f64 = 1.0 / 24576.0;
pub const SMOOTH_FACTOR: f64 = 1e4;
pub const LOCALIZED_FACTOR: f64 = 1e8;

/// The constant of the dyadic Cheeger argument: α = (√17 − 1)/4.
pub fn cheeger_alpha() -> f64 {
    (17f64.sqrt() - 1.0) / 4.0
}

/// Index i with α^{i+1} < x ≤ α^i, for x > 0.
fn level_of(x: f64, alpha: f64) -> i32 {
    let mut i = (x.ln() / alpha.ln()).floor() as i32;
    while x > alpha.powi(i) {
        i -= 1;
    }
    while x <= alpha.powi(i + 1) {
        i += 1;
    }
    i
}

#[derive(Debug, Clone)]
pub struct Level {
    pub index: i32,
    /// ℓ_i.
    pub mass: f64,
    /// ℓ_{i−1}, the mass of the level just above.
    pub prev_mass: f64,
    pub sub_masses: Vec<f64>,
    pub heavy: Vec<bool>,
    pub balanced: bool,
}

impl Level {
    pub fn top(&self) -> f64 {
        ALPHA.powi(self.index)
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.top(), ALPHA.powi(self.index + 1))
    }

    pub fn heavy_count(&self) -> usize {
        self.heavy.iter().filter(|&&h| h).count()
    }
}

#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    pub k: usize,
    pub phi: f64,
    pub rayleigh: f64,
    /// δ = φ(f)²/ℛ(f).
    pub delta: f64,
    /// Levels from the one holding max f down to the first level below min f > 0.
    pub levels: Vec<Level>,
    /// (position in `levels`, subinterval) per vertex, `None` off the support.
    pub cells: Vec<Option<(usize, usize)>>,
}

impl DyadicDecomposition {
    pub fn subintervals(&self) -> usize {
        12 * self.k
    }

    /// s = (1 − α)/(12k), also the separation radius ε.
    pub fn step(&self) -> f64 {
        (1.0 - ALPHA) / self.subintervals() as f64
    }

    /// I_{i,j} as an interval with a = upper end.
    pub fn subinterval(&self, level: usize, j: usize) -> Interval {
        let top = self.levels[level].top();
        let s = self.step();
        Interval::new(top * (1.0 - j as f64 * s), top * (1.0 - (j + 1) as f64 * s))
    }

    /// Δ = Σ_{I_i balanced} ℓ_{i−1}.
    pub fn delta_mass(&self) -> f64 {
        self.levels.iter().filter(|l| l.balanced).map(|l| l.prev_mass).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.levels.iter().map(|l| l.mass).sum()
    }

    pub fn heavy_threshold(&self, level: &Level) -> f64 {
        C_HEAVY * self.delta * level.prev_mass / self.k as f64
    }
}

fn check_len(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() != g.n() {
        return Err(domain(format!("function has {} values, graph has {} vertices", f.len(), g.n())));
    }
    Ok(())
}

fn check_input(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    check_len(g, f)?;
    if f.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(domain("function must be finite and nonnegative"));
    }
    if f.iter().all(|&x| x == 0.0) {
        return Err(domain("function has no positive values"));
    }
    let n2 = norm_w_sq(g, f);
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(domain(format!("function must have unit w-norm, has ‖f‖² = {n2}")));
    }
    if support_volume(g, f) > g.total_volume() / 2.0 * (1.0 + 1e-12) {
        return Err(domain("support volume exceeds vol(V)/2"));
    }
    Ok(())
}

fn phi_and_rayleigh(g: &WeightedGraph, f: &[f64]) -> Result<(f64, f64)> {
    Ok((sweep_conductance(g, f)?.value, rayleigh(g, f)?))
}

fn ratio_delta(phi: f64, r: f64) -> f64 {
    if phi == 0.0 {
        0.0
    } else {
        phi * phi / r
    }
}

pub fn dyadic_decompose(g: &WeightedGraph, f: &[f64], k: usize) -> Result<DyadicDecomposition> {
    check_input(g, f)?;
    if k < 2 {
        return Err(domain(format!("k must be at least 2, got {k}")));
    }
    let (phi, r) = phi_and_rayleigh(g, f)?;
    decompose_with(g, f, k, phi, r)
}

fn decompose_with(g: &WeightedGraph, f: &[f64], k: usize, phi: f64, r: f64) -> Result<DyadicDecomposition> {
    let delta = ratio_delta(phi, r);
    let parts = 12 * k;
    let s = (1.0 - ALPHA) / parts as f64;
    let positive = f.iter().copied().filter(|&x| x > 0.0);
    let max = positive.clone().fold(0.0f64, f64::max);
    let min = positive.fold(f64::INFINITY, f64::min);
    let top = level_of(max, ALPHA);
    let bottom = level_of(min, ALPHA) + 1;
    let count = (bottom - top + 1) as usize;
    let mut levels: Vec<Level> = (0..count)
        .map(|p| Level {
            index: top + p as i32,
            mass: 0.0,
            prev_mass: 0.0,
            sub_masses: vec![0.0; parts],
            heavy: vec![false; parts],
            balanced: false,
        })
        .collect();
    let mut cells = vec![None; f.len()];
    for (v, &x) in f.iter().enumerate() {
        if x <= 0.0 {
            continue;
        }
        let p = (level_of(x, ALPHA) - top) as usize;
        let u = (1.0 - x / levels[p].top()) / s;
        let j = (u.floor().max(0.0) as usize).min(parts - 1);
        let m = g.degree(v) * x * x;
        levels[p].mass += m;
        levels[p].sub_masses[j] += m;
        cells[v] = Some((p, j));
    }
    for p in 0..count {
        let prev = if p == 0 { 0.0 } else { levels[p - 1].mass };
        let threshold = C_HEAVY * delta * prev / k as f64;
        let level = &mut levels[p];
        level.prev_mass = prev;
        level.heavy = level.sub_masses.iter().map(|&m| m >= threshold).collect();
        level.balanced = level.heavy_count() >= 6 * k;
    }
    Ok(DyadicDecomposition {
        k,
        phi,
        rayleigh: r,
        delta,
        levels,
        cells,
    })
}

pub fn decomposition_json(dd: &DyadicDecomposition) -> Value {
    let levels: Vec<Value> = dd
        .levels
        .iter()
        .map(|l| {
            json!({
                "index": l.index,
                "mass": num17(l.mass),
                "prev_mass": num17(l.prev_mass),
                "sub_masses": nums17(&l.sub_masses),
                "heavy": l.heavy,
                "balanced": l.balanced,
            })
        })
        .collect();
    json!({
        "alpha": num17(ALPHA),
        "c": num17(C_HEAVY),
        "k": dd.k,
        "phi": num17(dd.phi),
        "rayleigh": num17(dd.rayleigh),
        "delta": num17(dd.delta),
        "delta_mass": num17(dd.delta_mass()),
        "levels": levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    /// Position in `DyadicDecomposition::levels`.
    pub level: usize,
    pub sub: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Piece {
    /// Relative distance inf_{y∈[lo,hi]} |x − y|/y.
    pub fn dist(&self, x: f64) -> f64 {
        if x < self.lo {
            (self.lo - x) / self.lo
        } else if x > self.hi {
            (x - self.hi) / self.hi
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct Region {
    pub pieces: Vec<Piece>,
    /// ℓ(R) over the closed pieces.
    pub mass: f64,
    pub epsilon: f64,
}

impl Region {
    pub fn dist(&self, x: f64) -> f64 {
        self.pieces.iter().map(|p| p.dist(x)).fold(f64::INFINITY, f64::min)
    }
}

/// 2k regions; region a (1-based) takes the (3a−1)-th heavy subinterval of
/// every balanced level, counting heavy subintervals by increasing j.
pub fn build_regions(g: &WeightedGraph, f: &[f64], dd: &DyadicDecomposition) -> Result<Vec<Region>> {
    check_len(g, f)?;
    if dd.cells.len() != f.len() {
        return Err(domain("decomposition does not match the function"));
    }
    let eps = dd.step();
    let mut regions: Vec<Region> = (0..2 * dd.k)
        .map(|_| Region {
            pieces: Vec::new(),
            mass: 0.0,
            epsilon: eps,
        })
        .collect();
    for (p, level) in dd.levels.iter().enumerate() {
        if !level.balanced {
            continue;
        }
        let heavy: Vec<usize> = (0..dd.subintervals()).filter(|&j| level.heavy[j]).collect();
        for (a, region) in regions.iter_mut().enumerate() {
            let j = heavy[3 * (a + 1) - 2];
            let iv = dd.subinterval(p, j);
            region.pieces.push(Piece {
                level: p,
                sub: j,
                lo: iv.lo(),
                hi: iv.hi(),
            });
        }
    }
    for region in &mut regions {
        region.mass = f
            .iter()
            .zip(g.degrees())
            .filter(|(x, _)| **x > 0.0 && region.dist(**x) == 0.0)
            .map(|(x, d)| d * x * x)
            .sum();
    }
    Ok(regions)
}

/// Largest overlap of ε-neighborhoods between pieces of different regions,
/// measured as hi(1+ε) − lo'(1−ε) for the lower piece against the upper one;
/// nonpositive means the regions are ε-well-separated.
pub fn separation_violation(regions: &[Region]) -> f64 {
    let mut tagged: Vec<(usize, Piece)> = regions
        .iter()
        .enumerate()
        .flat_map(|(a, r)| r.pieces.iter().map(move |p| (a, *p)))
        .collect();
    tagged.sort_by(|x, y| x.1.lo.total_cmp(&y.1.lo));
    let mut worst = f64::NEG_INFINITY;
    for (i, (a, p)) in tagged.iter().enumerate() {
        let eps = regions[*a].epsilon;
        for (b, q) in &tagged[i + 1..] {
            if a == b {
                continue;
            }
            let gap = p.hi * (1.0 + eps) - q.lo * (1.0 - eps);
            worst = worst.max(gap);
        }
    }
    worst
}

/// f_a(v) = f(v)·max{0, 1 − dist(f(v), R_a)/ε} for each region.
pub fn region_functions(f: &[f64], regions: &[Region]) -> Result<Vec<Vec<f64>>> {
    if let Some(a) = regions.iter().position(|r| r.pieces.is_empty() || r.mass <= 0.0) {
        return Err(domain(format!("region {} is empty", a + 1)));
    }
    Ok(regions
        .iter()
        .map(|r| {
            f.iter()
                .map(|&x| {
                    if x <= 0.0 {
                        return 0.0;
                    }
                    x * (1.0 - r.dist(x) / r.epsilon).max(0.0)
                })
                .collect()
        })
        .collect())
}

/// Indices of the k region functions with the smallest energy (ties by index).
pub fn select_low_energy(g: &WeightedGraph, fs: &[Vec<f64>], k: usize) -> Vec<usize> {
    let energies: Vec<f64> = fs.iter().map(|h| energy(g, h)).collect();
    let mut order: Vec<usize> = (0..fs.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// ℛ(f_i) ≤ 2ℛ(f)/(kε²W) for the k selected region functions, W the least region mass.
pub fn region_function_certificate(
    g: &WeightedGraph,
    f: &[f64],
    dd: &DyadicDecomposition,
    regions: &[Region],
) -> Result<(Certificate, Vec<Vec<f64>>)> {
    let fs = region_functions(f, regions)?;
    let chosen = select_low_energy(g, &fs, dd.k);
    let w_min = regions.iter().map(|r| r.mass).fold(f64::INFINITY, f64::min);
    let eps = dd.step();
    let rhs = 2.0 * dd.rayleigh / (dd.k as f64 * eps * eps * w_min);
    let selected: Vec<Vec<f64>> = chosen.iter().map(|&i| fs[i].clone()).collect();
    let mut lhs = 0.0f64;
    for h in &selected {
        lhs = lhs.max(rayleigh(g, h)?);
    }
    let sep = separation_violation(regions);
    let cert = Certificate::new("dense_well_separated", lhs, rhs)
        .with_constant("k", dd.k as f64)
        .with_constant("epsilon", eps)
        .with_constant("min_region_mass", w_min)
        .with_constant("rayleigh", dd.rayleigh)
        .with_auxiliary(Certificate::new("well_separated", sep.max(0.0) - 1e-12, 0.0).with_constant("overlap", sep));
    Ok((cert, selected))
}

#[derive(Debug, Clone)]
pub struct Localized {
    pub functions: Vec<Vec<f64>>,
    /// Support interval of each function, a = upper end.
    pub supports: Vec<Interval>,
    pub levels: Vec<i32>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone)]
pub enum Dichotomy {
    /// φ(f) ≤ 10⁴kℛ(f).
    Smooth(Certificate),
    /// k disjoint functions on single subintervals with ℛ(f_i) ≤ 10⁸k²ℛ(f)²/φ(f)².
    Localized(Localized),
}

impl Dichotomy {
    pub fn certificate(&self) -> &Certificate {
        match self {
            Dichotomy::Smooth(c) => c,
            Dichotomy::Localized(l) => &l.certificate,
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, Dichotomy::Smooth(_))
    }
}

pub fn main_func_dichotomy(g: &WeightedGraph, f: &[f64], k: usize) -> Result<Dichotomy> {
    check_input(g, f)?;
    if k < 2 {
        return Err(domain(format!("k must be at least 2, got {k}")));
    }
    let (phi, r) = phi_and_rayleigh(g, f)?;
    let smooth_rhs = SMOOTH_FACTOR * k as f64 * r;
    if phi <= smooth_rhs {
        return Ok(Dichotomy::Smooth(
            Certificate::new("main_func_smooth", phi, smooth_rhs)
                .with_constant("k", k as f64)
                .with_constant("rayleigh", r)
                .with_witness(Witness::new("f", f.to_vec())),
        ));
    }
    let dd = decompose_with(g, f, k, phi, r)?;
    let regions = build_regions(g, f, &dd)?;
    let fs = region_functions(f, &regions)
        .map_err(|e| Error::Numerical(format!("region construction failed with φ(f) > 10⁴kℛ(f): {e}")))?;
    let chosen = select_low_energy(g, &fs, k);

    let eps = dd.step();
    let mut functions = Vec::with_capacity(k);
    let mut supports = Vec::with_capacity(k);
    let mut levels = Vec::with_capacity(k);
    let mut worst = 0.0f64;
    let mut worst_len_err = 0.0f64;
    for &a in &chosen {
        let mut best: Option<(f64, Vec<f64>, Piece)> = None;
        for piece in &regions[a].pieces {
            let h: Vec<f64> = f
                .iter()
                .zip(&dd.cells)
                .map(|(&x, c)| if *c == Some((piece.level, piece.sub)) { x } else { 0.0 })
                .collect();
            if norm_w_sq(g, &h) <= 0.0 {
                continue;
            }
            let rq = rayleigh(g, &h)?;
            if best.as_ref().map_or(true, |b| rq < b.0) {
                best = Some((rq, h, *piece));
            }
        }
        let (rq, h, piece) =
            best.ok_or_else(|| Error::Numerical(format!("region {} has no subinterval with positive mass", a + 1)))?;
        let index = dd.levels[piece.level].index;
        let expected = ALPHA.powi(index) * eps;
        worst_len_err = worst_len_err.max(((piece.hi - piece.lo) - expected).abs() / expected);
        worst = worst.max(rq);
        functions.push(h);
        supports.push(Interval::new(piece.hi, piece.lo));
        levels.push(index);
    }
    let bound = LOCALIZED_FACTOR * (k * k) as f64 * r * r / (phi * phi);
    let delta_mass = dd.delta_mass();
    let sep = separation_violation(&regions);
    let mut certificate = Certificate::new("main_func_localized", worst, bound)
        .with_constant("k", k as f64)
        .with_constant("phi", phi)
        .with_constant("rayleigh", r)
        .with_constant("delta", dd.delta)
        .with_witness(Witness::new("f", f.to_vec()))
        .with_auxiliary(Certificate::new("density", 0.5, delta_mass).with_constant("delta_mass", delta_mass))
        .with_auxiliary(Certificate::new("well_separated", sep.max(0.0) - 1e-12, 0.0).with_constant("overlap", sep))
        .with_auxiliary(Certificate::new("support_length", worst_len_err, 1e-12));
    for (i, h) in functions.iter().enumerate() {
        certificate = certificate.with_witness(Witness::new(format!("f_{}", i + 1), h.clone()));
    }
    Ok(Dichotomy::Localized(Localized {
        functions,
        supports,
        levels,
        certificate,
    }))
}

/// The certificate with the least slack among (bound, energy) pairs; lhs = bound, rhs = energy.
fn tightest(name: &str, pairs: impl IntoIterator<Item = (f64, f64)>) -> Certificate {
    let mut worst: Option<(f64, f64)> = None;
    let mut count = 0usize;
    for (bound, e) in pairs {
        count += 1;
        if worst.map_or(true, |(b, w)| e - bound < w - b) {
            worst = Some((bound, e));
        }
    }
    let (lhs, rhs) = worst.unwrap_or((0.0, 0.0));
    Certificate::new(name, lhs, rhs).with_constant("checked", count as f64)
}

fn light_bound(dd: &DyadicDecomposition, prev_mass: f64, denominator: f64) -> f64 {
    let k = dd.k as f64;
    let a = ALPHA;
    a.powi(6) * dd.phi * dd.phi * prev_mass * (1.0 - a).powi(2)
        / (denominator * (k * a.powi(4) * dd.phi + C_HEAVY * dd.delta))
}

/// E(I_{i,j}) ≥ α⁶φ²ℓ_{i−1}(1−α)²/(144k(kα⁴φ + cδ)) for every light subinterval.
pub fn light_subinterval_certificate(g: &WeightedGraph, f: &[f64], dd: &DyadicDecomposition) -> Result<Certificate> {
    check_len(g, f)?;
    let denom = 144.0 * dd.k as f64;
    let mut pairs = Vec::new();
    for (p, level) in dd.levels.iter().enumerate() {
        for j in (0..dd.subintervals()).filter(|&j| !level.heavy[j]) {
            let e = restricted_energy(g, f, dd.subinterval(p, j));
            pairs.push((light_bound(dd, level.prev_mass, denom), e));
        }
    }
    Ok(tightest("light_subinterval_energy", pairs))
}

/// E(I_i) ≥ α⁶φ²ℓ_{i−1}(1−α)²/(24(kα⁴φ + cδ)) for every unbalanced level.
pub fn unbalanced_interval_certificate(g: &WeightedGraph, f: &[f64], dd: &DyadicDecomposition) -> Result<Certificate> {
    check_len(g, f)?;
    let pairs: Vec<(f64, f64)> = dd
        .levels
        .iter()
        .filter(|l| !l.balanced)
        .map(|l| (light_bound(dd, l.prev_mass, 24.0), restricted_energy(g, f, l.interval())))
        .collect();
    Ok(tightest("unbalanced_interval_energy", pairs))
}

/// φ(f) ≤ 4.68√ℛ(f), with the energy chain E_f ≥ φ²α⁴(1−α)/(1+α) and the
/// per-level drop bounds for α = (√17 − 1)/4.
pub fn appendix_a_certificate(g: &WeightedGraph, f: &[f64]) -> Result<Certificate> {
    check_input(g, f)?;
    let (phi, r) = phi_and_rayleigh(g, f)?;
    let e = energy(g, f);
    let a = cheeger_alpha();
    let chain = phi * phi * a.powi(4) * (1.0 - a) / (1.0 + a);

    let positive = f.iter().copied().filter(|&x| x > 0.0);
    let top = level_of(positive.clone().fold(0.0f64, f64::max), a);
    let bottom = level_of(positive.fold(f64::INFINITY, f64::min), a);
    let mut drop_sum = 0.0;
    let mut level_energy = 0.0;
    for i in top..=bottom {
        let iv = Interval::new(a.powi(i), a.powi(i + 1));
        drop_sum += energy_drop_lower_bound(g, f, iv, phi)?;
        level_energy += restricted_energy(g, f, iv);
    }
    Ok(Certificate::new("cheeger_dyadic", phi, 4.68 * r.sqrt())
        .with_constant("alpha", a)
        .with_constant("rayleigh", r)
        .with_witness(Witness::new("f", f.to_vec()))
        .with_auxiliary(Certificate::new("energy_chain", chain, e))
        .with_auxiliary(Certificate::new("level_drop_sum", drop_sum, level_energy))
        .with_auxiliary(Certificate::new("level_additivity", level_energy, e)))
}
