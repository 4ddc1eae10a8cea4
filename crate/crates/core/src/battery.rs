//! The acceptance battery: every certified inequality, run over the suite.
//!
//! Each criterion collects checks of the form lhs ≤ rhs + 1e-9. A criterion
//! passes when it ran at least one check and none failed. The JSON report is
//! a pure function of the seed, which only drives the random energy probes.

use serde_json::{json, Value};

use crate::certificate::{Certificate, TOLERANCE};
use crate::error::Result;
use crate::graph::{conductance, WeightedGraph};
use crate::instances::{cycle_cosine_split, derive, two_cliques_bridge, unit, SplitMix64};
use crate::io::num17;
use crate::oracle::{brute_force_beta, brute_force_maxcut, brute_force_phi};
use crate::partition::{balanced_separator, spectral_maxcut};
use crate::regions::{
    appendix_a_certificate, build_regions, dyadic_decompose, light_subinterval_certificate, main_func_dichotomy,
    region_functions, unbalanced_interval_certificate, Dichotomy, ALPHA,
};
use crate::spectral::{
    dense_spectrum, energy, lambda_bound_from_disjoint, signless_rayleigh, split_from_spectrum, support_volume,
    Operator, Spectrum,
};
use crate::step::{
    appendix_b_diagnostics, band_functions, build_step_approximation, improved_bipartiteness_from,
    improved_cheeger_from, step_outcome_certificate, symmetric_step_approximation, ZERO_EIGENVALUE,
};
use crate::suite::{is_bipartite, suite, SuiteInstance};
use crate::sweep::{
    energy_drop_lower_bound, exhaustive_threshold_bipartiteness, exhaustive_threshold_conductance, restricted_energy,
    sweep_bipartiteness, sweep_conductance, Interval,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const PROBES_PER_GRAPH: usize = 1000;
/// Cycle length for the localized-case probe, beyond the dense eigensolver.
pub const LOCALIZED_CYCLE: usize = 1 << 19;
const MAX_RECORDED_FAILURES: usize = 25;
const STREAM_PROBE: u64 = 0x7072_6f62_6573_0000;

#[derive(Debug, Clone)]
pub struct Failure {
    pub instance: String,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: usize,
    pub skipped: usize,
    pub failed: usize,
    pub failures: Vec<Failure>,
    /// max(lhs − rhs) over all checks; negative means slack everywhere.
    pub worst_margin: f64,
    pub observations: Vec<Value>,
}

impl CriterionReport {
    fn new(id: u8, title: &'static str) -> Self {
        CriterionReport {
            id,
            title,
            checks: 0,
            skipped: 0,
            failed: 0,
            failures: Vec::new(),
            worst_margin: f64::NEG_INFINITY,
            observations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks > 0 && self.failed == 0
    }

    fn fail(&mut self, instance: &str, check: String, lhs: f64, rhs: f64) {
        self.failed += 1;
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(Failure {
                instance: instance.to_string(),
                check,
                lhs,
                rhs,
            });
        }
    }

    fn check(&mut self, instance: &str, check: impl Into<String>, lhs: f64, rhs: f64) -> bool {
        self.checks += 1;
        let margin = lhs - rhs;
        if margin.is_nan() || margin > self.worst_margin {
            self.worst_margin = if margin.is_nan() { f64::INFINITY } else { margin };
        }
        let ok = lhs <= rhs + TOLERANCE;
        if !ok {
            self.fail(instance, check.into(), lhs, rhs);
        }
        ok
    }

    /// An exact predicate with no tolerance.
    fn require(&mut self, instance: &str, check: impl Into<String>, ok: bool) -> bool {
        self.checks += 1;
        if !ok {
            self.fail(instance, check.into(), f64::NAN, f64::NAN);
        }
        ok
    }

    /// The certificate and every auxiliary that applies must hold.
    fn certificate(&mut self, instance: &str, context: &str, c: &Certificate) {
        if !c.applicable {
            self.skipped += 1;
            return;
        }
        self.check(instance, format!("{context}{}", c.name), c.lhs, c.rhs);
        for a in &c.auxiliary {
            self.certificate(instance, &format!("{context}{}/", c.name), a);
        }
    }

    fn error(&mut self, instance: &str, what: &str, e: crate::Error) {
        self.checks += 1;
        self.fail(instance, format!("{what}: {e}"), f64::NAN, f64::NAN);
    }

    pub fn to_json(&self) -> Value {
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| json!({"instance": f.instance, "check": f.check, "lhs": num17(f.lhs), "rhs": num17(f.rhs)}))
            .collect();
        json!({
            "id": self.id,
            "title": self.title,
            "passed": self.passed(),
            "checks": self.checks,
            "skipped": self.skipped,
            "failed": self.failed,
            "worst_margin": num17(self.worst_margin),
            "failures": failures,
            "observations": self.observations,
        })
    }

    pub fn summary_line(&self) -> String {
        let margin = if self.worst_margin.is_finite() {
            format!("{:.3e}", self.worst_margin)
        } else {
            "n/a".to_string()
        };
        format!(
            "criterion {:>2} {} {} (checks {}, skipped {}, failed {}, worst margin {})",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checks,
            self.skipped,
            self.failed,
            margin
        )
    }
}

#[derive(Debug, Clone)]
pub struct BatteryReport {
    pub seed: u64,
    pub instances: Vec<(String, usize, usize)>,
    pub criteria: Vec<CriterionReport>,
}

impl BatteryReport {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(CriterionReport::passed)
    }

    pub fn criterion(&self, id: u8) -> Option<&CriterionReport> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "suite": self.instances.iter().map(|(name, n, m)| json!({"name": name, "n": n, "edges": m})).collect::<Vec<_>>(),
            "criteria": self.criteria.iter().map(CriterionReport::to_json).collect::<Vec<_>>(),
            "all_pass": self.all_pass(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes") + "\n"
    }
}

/// Spectral data shared by several criteria.
struct Prepared<'a> {
    inst: &'a SuiteInstance,
    lap: Spectrum,
    f2: Vec<f64>,
    phi_f2: f64,
    signless: Spectrum,
}

impl Prepared<'_> {
    fn g(&self) -> &WeightedGraph {
        &self.inst.graph
    }

    fn name(&self) -> &str {
        &self.inst.name
    }

    fn f_alpha(&self) -> &[f64] {
        self.signless.eigenfunction(1)
    }
}

fn prepare(inst: &SuiteInstance) -> Result<Prepared<'_>> {
    let lap = dense_spectrum(&inst.graph, Operator::Laplacian)?;
    let f2 = split_from_spectrum(&inst.graph, &lap)?;
    let phi_f2 = sweep_conductance(&inst.graph, &f2)?.value;
    let signless = dense_spectrum(&inst.graph, Operator::Signless)?;
    Ok(Prepared {
        inst,
        lap,
        f2,
        phi_f2,
        signless,
    })
}

/// λ_j of C_n in closed form, j 1-based.
fn cycle_eigenvalue(n: usize, j: usize) -> f64 {
    1.0 - (2.0 * std::f64::consts::PI * (j / 2) as f64 / n as f64).cos()
}

fn nonzero(fs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    fs.into_iter().filter(|b| b.iter().any(|&x| x != 0.0)).collect()
}

/// λ_j ≤ 2 max ℛ(f_i) for a disjoint family of size j.
fn disjoint_family(rep: &mut CriterionReport, name: &str, what: &str, g: &WeightedGraph, fs: &[Vec<f64>], eig: impl Fn(usize) -> f64, op: Operator) {
    if fs.is_empty() {
        rep.skipped += 1;
        return;
    }
    match lambda_bound_from_disjoint(g, fs, op) {
        Ok(bound) => {
            rep.check(name, format!("{what} (j = {})", fs.len()), eig(fs.len()), bound);
        }
        Err(e) => rep.error(name, what, e),
    }
}

fn criterion1(prep: &[Prepared]) -> CriterionReport {
    let mut rep = CriterionReport::new(1, "classical Cheeger");
    for p in prep {
        let l2 = p.lap.eigenvalue(2);
        rep.check(p.name(), "lambda2/2 <= phi(f2)", l2 / 2.0, p.phi_f2);
        rep.check(p.name(), "phi(f2) <= sqrt(2 lambda2)", p.phi_f2, (2.0 * l2).sqrt());
    }
    rep
}

fn criterion2(prep: &[Prepared]) -> CriterionReport {
    let mut rep = CriterionReport::new(2, "improved Cheeger");
    for p in prep {
        for k in 2..=p.g().n().min(12) {
            match improved_cheeger_from(p.g(), &p.f2, k, p.lap.eigenvalue(k)) {
                Ok(c) => rep.certificate(p.name(), &format!("k={k}/"), &c),
                Err(e) => rep.error(p.name(), &format!("k={k}"), e),
            }
        }
    }
    rep
}

fn criterion3(prep: &[Prepared]) -> CriterionReport {
    let mut rep = CriterionReport::new(3, "cycle tightness");
    for p in prep.iter().filter(|p| p.name().starts_with("cycle-")) {
        let n = p.g().n();
        if n < 32 {
            continue;
        }
        // Every arc of n/2 vertices is optimal: cut 2, volume n.
        let phi = 2.0 / n as f64;
        let l2 = p.lap.eigenvalue(2);
        let mut ratios = Vec::new();
        for k in 2..=8 {
            let ratio = phi * p.lap.eigenvalue(k).sqrt() / (k as f64 * l2);
            rep.check(p.name(), format!("k={k}: 0.05 <= ratio"), 0.05, ratio);
            rep.check(p.name(), format!("k={k}: ratio <= 10"), ratio, 10.0);
            ratios.push(num17(ratio));
        }
        rep.observations.push(json!({"instance": p.name(), "ratios_k2_to_k8": ratios}));
    }
    rep.observations.push(json!({"large_n_ratio_k2": num17(1.0 / (std::f64::consts::SQRT_2 * std::f64::consts::PI))}));
    rep
}

/// Criteria 4 and 5 share the step approximations.
fn criteria4_5(prep: &[Prepared], c5: &mut CriterionReport) -> CriterionReport {
    let mut rep = CriterionReport::new(4, "step approximation");
    for p in prep {
        for k in 2..=p.g().n().min(8) {
            let lk = p.lap.eigenvalue(k);
            if lk <= ZERO_EIGENVALUE {
                rep.skipped += 1;
                continue;
            }
            let approx = match build_step_approximation(p.g(), &p.f2, k, lk) {
                Ok(a) => a,
                Err(e) => {
                    rep.error(p.name(), &format!("k={k}"), e);
                    continue;
                }
            };
            match step_outcome_certificate(p.g(), &p.f2, &approx) {
                Ok(c) => rep.certificate(p.name(), &format!("k={k}/"), &c),
                Err(e) => rep.error(p.name(), &format!("k={k}"), e),
            }
            match band_functions(&p.f2, &approx) {
                Ok(bands) => disjoint_family(
                    c5,
                    p.name(),
                    &format!("laplacian bands k={k}"),
                    p.g(),
                    &nonzero(bands),
                    |j| p.lap.eigenvalue(j),
                    Operator::Laplacian,
                ),
                Err(e) => c5.error(p.name(), "laplacian bands", e),
            }
        }
    }
    rep
}

/// Region functions and localized witnesses; the suite graphs are checked
/// against their dense spectra, the large cycle against its closed form.
fn criterion5_regions(prep: &[Prepared], big: &(WeightedGraph, Vec<f64>), rep: &mut CriterionReport) {
    for p in prep {
        for k in [2, 4] {
            if k > p.g().n() {
                continue;
            }
            let fs = dyadic_decompose(p.g(), &p.f2, k)
                .and_then(|dd| build_regions(p.g(), &p.f2, &dd))
                .and_then(|regions| region_functions(&p.f2, &regions));
            match fs {
                Ok(fs) => disjoint_family(
                    rep,
                    p.name(),
                    &format!("region functions k={k}"),
                    p.g(),
                    &fs,
                    |j| p.lap.eigenvalue(j),
                    Operator::Laplacian,
                ),
                // No dense level: the construction has nothing to offer.
                Err(_) => rep.skipped += 1,
            }
            if let Ok(Dichotomy::Localized(l)) = main_func_dichotomy(p.g(), &p.f2, k) {
                disjoint_family(rep, p.name(), &format!("localized witnesses k={k}"), p.g(), &l.functions, |j| p.lap.eigenvalue(j), Operator::Laplacian);
            }
        }
    }
    let (g, f) = big;
    let name = format!("cycle-{LOCALIZED_CYCLE}");
    let n = g.n();
    for k in [2, 4] {
        match dyadic_decompose(g, f, k)
            .and_then(|dd| build_regions(g, f, &dd))
            .and_then(|regions| region_functions(f, &regions))
        {
            Ok(fs) => disjoint_family(rep, &name, &format!("region functions k={k}"), g, &fs, |j| cycle_eigenvalue(n, j), Operator::Laplacian),
            Err(e) => rep.error(&name, "region functions", e),
        }
        match main_func_dichotomy(g, f, k) {
            Ok(Dichotomy::Localized(l)) => disjoint_family(rep, &name, &format!("localized witnesses k={k}"), g, &l.functions, |j| cycle_eigenvalue(n, j), Operator::Laplacian),
            Ok(Dichotomy::Smooth(_)) => rep.skipped += 1,
            Err(e) => rep.error(&name, "dichotomy", e),
        }
    }
}

/// Signless band families of the first max-cut iteration (H = G on the suite).
fn criterion5_signless(prep: &[Prepared], rep: &mut CriterionReport) {
    for p in prep {
        let beta = match sweep_bipartiteness(p.g(), p.f_alpha()) {
            Ok(s) => s.value,
            Err(e) => {
                rep.error(p.name(), "bipartiteness sweep", e);
                continue;
            }
        };
        for k in 2..=p.g().n().min(6) {
            let bands = symmetric_step_approximation(p.g(), p.f_alpha(), k, beta)
                .and_then(|a| band_functions(p.f_alpha(), &a));
            match bands {
                Ok(b) => disjoint_family(
                    rep,
                    p.name(),
                    &format!("signless bands k={k}"),
                    p.g(),
                    &nonzero(b),
                    |j| p.signless.eigenvalue(j),
                    Operator::Signless,
                ),
                Err(e) => rep.error(p.name(), "signless bands", e),
            }
        }
    }
}

/// A random nonnegative function whose support has at most half the volume.
fn random_small_function(g: &WeightedGraph, rng: &mut SplitMix64) -> Vec<f64> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let half = g.total_volume() / 2.0;
    // A coarse grid some of the time, so ties and empty intervals occur.
    let grid = if rng.below(3) == 0 { Some(1 + rng.below(4)) } else { None };
    let mut f = vec![0.0; n];
    let mut vol = 0.0;
    for (i, &v) in order.iter().enumerate() {
        if i > 0 && vol + g.degree(v) > half {
            continue;
        }
        vol += g.degree(v);
        let x = unit(rng.next_u64());
        f[v] = match grid {
            Some(m) => (1.0 + (x * m as f64).floor()) / m as f64,
            None => x + f64::MIN_POSITIVE,
        };
        if vol >= half {
            break;
        }
    }
    debug_assert!(support_volume(g, &f) <= half);
    f
}

fn random_intervals(top: f64, rng: &mut SplitMix64) -> Vec<Interval> {
    let m = 1 + rng.below(4) as usize;
    let mut pts: Vec<f64> = (0..2 * m).map(|_| unit(rng.next_u64()) * top * 1.1).collect();
    pts.sort_by(f64::total_cmp);
    pts.chunks(2).map(|c| Interval::new(c[1], c[0])).collect()
}

fn criterion6(prep: &[Prepared], seed: u64) -> CriterionReport {
    let mut rep = CriterionReport::new(6, "energy lemmas");
    for (gi, p) in prep.iter().enumerate() {
        let g = p.g();
        for probe in 0..PROBES_PER_GRAPH {
            let mut rng = SplitMix64::new(derive(seed, STREAM_PROBE, (gi * PROBES_PER_GRAPH + probe) as u64));
            let f = random_small_function(g, &mut rng);
            let phi = match sweep_conductance(g, &f) {
                Ok(s) => s.value,
                Err(e) => {
                    rep.error(p.name(), "probe sweep", e);
                    continue;
                }
            };
            let top = f.iter().fold(0.0f64, |a, &x| a.max(x));
            let family = random_intervals(top, &mut rng);
            let parts: f64 = family.iter().map(|&i| restricted_energy(g, &f, i)).sum();
            rep.check(p.name(), format!("probe {probe}: additivity"), parts, energy(g, &f));
            for &i in &family {
                match energy_drop_lower_bound(g, &f, i, phi) {
                    Ok(b) => {
                        rep.check(p.name(), format!("probe {probe}: drop"), b, restricted_energy(g, &f, i));
                    }
                    Err(e) => rep.error(p.name(), "drop bound", e),
                }
            }
        }
        for k in [2, 4] {
            if k > g.n() {
                continue;
            }
            let certs = dyadic_decompose(g, &p.f2, k).and_then(|dd| {
                Ok((
                    light_subinterval_certificate(g, &p.f2, &dd)?,
                    unbalanced_interval_certificate(g, &p.f2, &dd)?,
                ))
            });
            match certs {
                Ok((a, b)) => {
                    rep.certificate(p.name(), &format!("k={k}/"), &a);
                    rep.certificate(p.name(), &format!("k={k}/"), &b);
                }
                Err(e) => rep.error(p.name(), "dyadic energy certificates", e),
            }
        }
    }
    rep
}

fn dichotomy_checks(rep: &mut CriterionReport, name: &str, g: &WeightedGraph, f: &[f64], k: usize, expect_localized: bool) -> Option<bool> {
    let d = match main_func_dichotomy(g, f, k) {
        Ok(d) => d,
        Err(e) => {
            rep.error(name, &format!("k={k}"), e);
            return None;
        }
    };
    rep.certificate(name, &format!("k={k}/"), d.certificate());
    if let Dichotomy::Localized(l) = &d {
        rep.require(name, format!("k={k}: {} witnesses", l.functions.len()), l.functions.len() == k);
        for (s, &i) in l.supports.iter().zip(&l.levels) {
            let expected = ALPHA.powi(i) * (1.0 - ALPHA) / (12 * k) as f64;
            rep.check(name, format!("k={k}: support length at level {i}"), (s.len() - expected).abs(), 1e-12 * expected);
        }
    }
    if expect_localized {
        rep.require(name, format!("k={k}: localized case"), !d.is_smooth());
    }
    Some(d.is_smooth())
}

fn criterion7(prep: &[Prepared], big: &(WeightedGraph, Vec<f64>)) -> CriterionReport {
    let mut rep = CriterionReport::new(7, "main function dichotomy");
    let (mut smooth, mut localized) = (0usize, 0usize);
    for p in prep {
        for k in [2, 4] {
            if k > p.g().n() {
                continue;
            }
            match dichotomy_checks(&mut rep, p.name(), p.g(), &p.f2, k, false) {
                Some(true) => smooth += 1,
                Some(false) => localized += 1,
                None => {}
            }
        }
    }
    let name = format!("cycle-{LOCALIZED_CYCLE}");
    for k in [2, 4] {
        if dichotomy_checks(&mut rep, &name, &big.0, &big.1, k, true) == Some(false) {
            localized += 1;
        }
    }
    rep.observations.push(json!({"smooth": smooth, "localized": localized}));
    rep
}

fn criterion8(prep: &[Prepared]) -> CriterionReport {
    let mut rep = CriterionReport::new(8, "dyadic Cheeger constant and energy diagnostics");
    for p in prep {
        match appendix_a_certificate(p.g(), &p.f2) {
            Ok(c) => rep.certificate(p.name(), "", &c),
            Err(e) => rep.error(p.name(), "cheeger_dyadic", e),
        }
        for k in 2..=p.g().n().min(8) {
            let lk = p.lap.eigenvalue(k);
            if lk <= ZERO_EIGENVALUE {
                rep.skipped += 1;
                continue;
            }
            let diag = build_step_approximation(p.g(), &p.f2, k, lk).and_then(|a| {
                let res = a.residual;
                appendix_b_diagnostics(p.g(), &p.f2, &a).map(|d| (res, d))
            });
            match diag {
                Ok((res, (norm, jump))) => {
                    rep.certificate(p.name(), &format!("k={k}/"), &norm);
                    if res > 0.0 {
                        rep.check(p.name(), format!("k={k}/energy_lower_64k"), jump.lhs, jump.rhs);
                    } else {
                        rep.skipped += 1;
                    }
                }
                Err(e) => rep.error(p.name(), &format!("k={k}"), e),
            }
        }
    }
    rep
}

fn criterion9(prep: &[Prepared]) -> CriterionReport {
    let mut rep = CriterionReport::new(9, "balanced separator");
    for p in prep {
        match balanced_separator(p.g(), 2) {
            Ok(r) => {
                let (vol, total) = (r.set.volume(), p.g().total_volume());
                rep.check(p.name(), "vol(V)/5 <= vol(S)", total / 5.0, vol);
                rep.check(p.name(), "vol(S) <= 4vol(V)/5", vol, 0.8 * total);
                rep.certificate(p.name(), "", &r.merge_certificate);
                if let Some((x, _)) = &p.inst.planted {
                    if let Ok(planted) = conductance(p.g(), x) {
                        rep.observations.push(json!({
                            "instance": p.name(),
                            "separator_phi": num17(r.conductance),
                            "planted_phi": num17(planted),
                        }));
                    }
                }
            }
            Err(e) => rep.error(p.name(), "separator", e),
        }
    }
    for m in 3..=10 {
        let name = format!("two-cliques-{m}");
        let run = two_cliques_bridge(m, 1.0).and_then(|g| {
            let r = balanced_separator(&g, 2)?;
            let (opt, _) = brute_force_phi(&g)?;
            Ok((r.conductance, opt))
        });
        match run {
            Ok((phi, opt)) => {
                rep.check(&name, "phi(S) <= 3 phi(G)", phi, 3.0 * opt);
            }
            Err(e) => rep.error(&name, "separator", e),
        }
    }
    rep
}

fn criterion10(prep: &[Prepared]) -> CriterionReport {
    let mut rep = CriterionReport::new(10, "spectral max cut");
    for p in prep {
        let g = p.g();
        match spectral_maxcut(g, 2) {
            Ok(r) => {
                if is_bipartite(g) {
                    rep.require(p.name(), format!("bipartite: fraction {} = 1", r.cut_fraction), r.cut_fraction == 1.0);
                }
                if p.name() == "complete-3" {
                    rep.require(p.name(), format!("K3 cuts {} >= 2/3", r.cut_fraction), r.cut_fraction >= 2.0 / 3.0 - 1e-12);
                }
            }
            Err(e) => rep.error(p.name(), "maxcut", e),
        }
        if g.n() > crate::partition::EXACT_EPSILON_MAX_N {
            rep.skipped += 1;
            continue;
        }
        let eps = match brute_force_maxcut(g) {
            Ok((_, frac, _)) => 1.0 - frac,
            Err(e) => {
                rep.error(p.name(), "exhaustive max cut", e);
                continue;
            }
        };
        for k in 2..=g.n().min(6) {
            let ak = p.signless.eigenvalue(k);
            if !(600.0 * k as f64 * eps < ak) {
                rep.skipped += 1;
                continue;
            }
            match spectral_maxcut(g, k) {
                Ok(r) => match r.guarantee {
                    Some(bound) => {
                        rep.check(p.name(), format!("k={k}: guarantee"), bound, r.cut_fraction);
                    }
                    None => {
                        rep.require(p.name(), format!("k={k}: guarantee evaluates"), false);
                    }
                },
                Err(e) => rep.error(p.name(), &format!("k={k}"), e),
            }
        }
    }
    rep
}

fn criterion11(prep: &[Prepared]) -> CriterionReport {
    let mut rep = CriterionReport::new(11, "bipartiteness sandwich");
    for p in prep {
        let a1 = p.signless.eigenvalue(1);
        let beta = match sweep_bipartiteness(p.g(), p.f_alpha()) {
            Ok(s) => s.value,
            Err(e) => {
                rep.error(p.name(), "bipartiteness sweep", e);
                continue;
            }
        };
        rep.check(p.name(), "alpha1/2 <= beta(f)", a1 / 2.0, beta);
        rep.check(p.name(), "beta(f) <= sqrt(2 alpha1)", beta, (2.0 * a1).sqrt());
        for k in 2..=p.g().n().min(6) {
            match improved_bipartiteness_from(p.g(), p.f_alpha(), k, p.signless.eigenvalue(k)) {
                Ok(c) => rep.certificate(p.name(), &format!("k={k}/"), &c),
                Err(e) => rep.error(p.name(), &format!("k={k}"), e),
            }
        }
        if let Ok(r) = signless_rayleigh(p.g(), p.f_alpha()) {
            rep.check(p.name(), "signless quotient of f equals alpha1", (r - a1).abs(), 1e-9);
        }
    }
    rep
}

fn criterion12(prep: &[Prepared]) -> CriterionReport {
    let mut rep = CriterionReport::new(12, "oracle agreement");
    for p in prep {
        let g = p.g();
        if g.n() <= 10 {
            match brute_force_phi(g) {
                Ok((opt, _)) => {
                    rep.check(p.name(), "brute force phi <= phi(f2)", opt, p.phi_f2);
                }
                Err(e) => rep.error(p.name(), "brute force phi", e),
            }
            match (brute_force_beta(g), sweep_bipartiteness(g, p.f_alpha())) {
                (Ok((opt, _)), Ok(s)) => {
                    rep.check(p.name(), "brute force beta <= beta(f)", opt, s.value);
                }
                (Err(e), _) | (_, Err(e)) => rep.error(p.name(), "brute force beta", e),
            }
        }
        match exhaustive_threshold_conductance(g, &p.f2) {
            Ok(x) => {
                rep.require(p.name(), format!("conductance sweep {} vs exhaustive {x}", p.phi_f2), x.to_bits() == p.phi_f2.to_bits());
            }
            Err(e) => rep.error(p.name(), "exhaustive conductance", e),
        }
        match (exhaustive_threshold_bipartiteness(g, p.f_alpha()), sweep_bipartiteness(g, p.f_alpha())) {
            (Ok(x), Ok(s)) => {
                rep.require(p.name(), format!("bipartiteness sweep {} vs exhaustive {x}", s.value), x.to_bits() == s.value.to_bits());
            }
            (Err(e), _) | (_, Err(e)) => rep.error(p.name(), "exhaustive bipartiteness", e),
        }
    }
    rep
}

/// Criteria 1 through 12.
pub fn run_battery(seed: u64) -> Result<BatteryReport> {
    let instances = suite()?;
    let prep = instances.iter().map(prepare).collect::<Result<Vec<_>>>()?;
    let big = cycle_cosine_split(LOCALIZED_CYCLE)?;

    let mut c5 = CriterionReport::new(5, "disjoint support bound");
    let c4 = criteria4_5(&prep, &mut c5);
    criterion5_regions(&prep, &big, &mut c5);
    criterion5_signless(&prep, &mut c5);

    let criteria = vec![
        criterion1(&prep),
        criterion2(&prep),
        criterion3(&prep),
        c4,
        c5,
        criterion6(&prep, seed),
        criterion7(&prep, &big),
        criterion8(&prep),
        criterion9(&prep),
        criterion10(&prep),
        criterion11(&prep),
        criterion12(&prep),
    ];
    Ok(BatteryReport {
        seed,
        instances: instances
            .iter()
            .map(|i| (i.name.clone(), i.graph.n(), i.graph.num_edges()))
            .collect(),
        criteria,
    })
}

/// The full battery, twice; criterion 13 compares the two JSON renderings
/// byte for byte. Returns the second run.
pub fn verify_suite(seed: u64) -> Result<BatteryReport> {
    let first = run_battery(seed)?.to_json_string();
    let mut report = run_battery(seed)?;
    let second = report.to_json_string();
    let mut c13 = CriterionReport::new(13, "determinism");
    c13.require("battery", "two runs render identical JSON", first == second);
    c13.observations.push(json!({"bytes": second.len()}));
    report.criteria.push(c13);
    Ok(report)
}
