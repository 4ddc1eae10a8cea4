use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::WeightedGraph;

pub const DEFAULT_SPECTRAL_CAP: usize = 4096;

/// Vertex cap for dense eigensolves; `SPECTRAL_CAP` overrides the default.
pub fn spectral_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("SPECTRAL_CAP")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_SPECTRAL_CAP)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    /// ℒ = I − D^{−1/2} A D^{−1/2}
    Laplacian,
    /// ℳ = I + D^{−1/2} A D^{−1/2}
    Signless,
}

/// Ascending eigenvalues with w-orthonormal eigenfunctions f = D^{−1/2} g.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub which: Operator,
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<Vec<f64>>,
}

impl Spectrum {
    /// λ_k (or α_k), 1-based.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k - 1]
    }

    /// Eigenfunction for λ_k, 1-based.
    pub fn eigenfunction(&self, k: usize) -> &[f64] {
        &self.eigenfunctions[k - 1]
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

fn operator_matrix(g: &WeightedGraph, which: Operator) -> DMatrix<f64> {
    let n = g.n();
    let sign = match which {
        Operator::Laplacian => -1.0,
        Operator::Signless => 1.0,
    };
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut m = DMatrix::identity(n, n);
    for e in g.edges() {
        let x = sign * e.w * inv_sqrt[e.u] * inv_sqrt[e.v];
        m[(e.u, e.v)] = x;
        m[(e.v, e.u)] = x;
    }
    m
}

/// Apply the operator to a g-convention vector without forming the matrix.
fn apply_operator(g: &WeightedGraph, which: Operator, x: &[f64]) -> Vec<f64> {
    let sign = match which {
        Operator::Laplacian => -1.0,
        Operator::Signless => 1.0,
    };
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut y = x.to_vec();
    for e in g.edges() {
        let a = sign * e.w * inv_sqrt[e.u] * inv_sqrt[e.v];
        y[e.u] += a * x[e.v];
        y[e.v] += a * x[e.u];
    }
    y
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn residual(g: &WeightedGraph, which: Operator, x: &[f64], mu: f64) -> f64 {
    apply_operator(g, which, x)
        .iter()
        .zip(x)
        .map(|(a, b)| (a - mu * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn dense_spectrum(g: &WeightedGraph, which: Operator) -> Result<Spectrum> {
    dense_spectrum_with_cap(g, which, spectral_cap())
}

pub fn dense_spectrum_with_cap(g: &WeightedGraph, which: Operator, cap: usize) -> Result<Spectrum> {
    let n = g.n();
    if n == 0 {
        return Err(domain("spectrum of an empty graph"));
    }
    if n > cap {
        return Err(Error::Capacity {
            what: "vertices for dense_spectrum",
            value: n,
            limit: cap,
        });
    }
    if let Some(v) = g.degrees().iter().position(|&d| d <= 0.0) {
        return Err(domain(format!("vertex {v} has degree 0")));
    }
    let eig = operator_matrix(g, which).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let sqrt_d: Vec<f64> = g.degrees().iter().map(|d| d.sqrt()).collect();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenfunctions = Vec::with_capacity(n);
    for &i in &order {
        // Roundoff can push values just outside the true range [0, 2].
        let mu = eig.eigenvalues[i].clamp(0.0, 2.0);
        let mut gv: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        let scale = norm(&gv);
        gv.iter_mut().for_each(|x| *x /= scale);
        if let Some(&first) = gv.iter().find(|x| x.abs() > 1e-10) {
            if first < 0.0 {
                gv.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let r = residual(g, which, &gv, mu);
        if r > 1e-8 {
            return Err(Error::Numerical(format!(
                "eigenpair residual {r:e} exceeds 1e-8 for eigenvalue {mu}"
            )));
        }
        eigenvalues.push(mu);
        eigenfunctions.push(gv.iter().zip(&sqrt_d).map(|(x, s)| x / s).collect());
    }
    Ok(Spectrum {
        which,
        eigenvalues,
        eigenfunctions,
    })
}

/// ‖f‖²_w = Σ_v w(v) f(v)².
pub fn norm_w_sq(g: &WeightedGraph, f: &[f64]) -> f64 {
    f.iter().zip(g.degrees()).map(|(x, d)| d * x * x).sum()
}

pub fn inner_w(g: &WeightedGraph, f: &[f64], h: &[f64]) -> f64 {
    f.iter()
        .zip(h)
        .zip(g.degrees())
        .map(|((a, b), d)| d * a * b)
        .sum()
}

/// E_f = Σ_{u∼v} w(u,v)(f(u) − f(v))².
pub fn energy(g: &WeightedGraph, f: &[f64]) -> f64 {
    g.edges()
        .iter()
        .map(|e| e.w * (f[e.u] - f[e.v]).powi(2))
        .sum()
}

/// Σ_{u∼v} w(u,v)(f(u) + f(v))².
pub fn signless_energy(g: &WeightedGraph, f: &[f64]) -> f64 {
    g.edges()
        .iter()
        .map(|e| e.w * (f[e.u] + f[e.v]).powi(2))
        .sum()
}

fn checked_len(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() != g.n() {
        return Err(domain(format!(
            "function has {} values, graph has {} vertices",
            f.len(),
            g.n()
        )));
    }
    Ok(())
}

fn nonzero_norm(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    checked_len(g, f)?;
    let den = norm_w_sq(g, f);
    if den <= 0.0 {
        return Err(domain("Rayleigh quotient of a zero function"));
    }
    Ok(den)
}

pub fn rayleigh(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    let den = nonzero_norm(g, f)?;
    Ok(energy(g, f) / den)
}

pub fn signless_rayleigh(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    let den = nonzero_norm(g, f)?;
    Ok(signless_energy(g, f) / den)
}

pub fn rayleigh_for(g: &WeightedGraph, f: &[f64], which: Operator) -> Result<f64> {
    match which {
        Operator::Laplacian => rayleigh(g, f),
        Operator::Signless => signless_rayleigh(g, f),
    }
}

pub fn normalize_w(g: &WeightedGraph, f: &[f64]) -> Result<Vec<f64>> {
    let n = nonzero_norm(g, f)?.sqrt();
    Ok(f.iter().map(|x| x / n).collect())
}

/// Support volume vol(supp f).
pub fn support_volume(g: &WeightedGraph, f: &[f64]) -> f64 {
    f.iter()
        .zip(g.degrees())
        .filter(|(x, _)| **x != 0.0)
        .map(|(_, d)| d)
        .sum()
}

/// Split a λ₂ eigenfunction (g-convention, unit) into a nonnegative f with
/// ℛ(f) ≤ λ₂ and vol(supp f) ≤ vol(V)/2, normalized in ℓ²(V,w).
pub fn nonneg_split(g: &WeightedGraph, g2: &[f64], lam2: f64) -> Result<Vec<f64>> {
    checked_len(g, g2)?;
    if let Some(v) = g.degrees().iter().position(|&d| d <= 0.0) {
        return Err(domain(format!("vertex {v} has degree 0")));
    }
    let gn = norm(g2);
    if gn == 0.0 {
        return Err(domain("zero eigenfunction"));
    }
    let r = residual(g, Operator::Laplacian, g2, lam2);
    if r > 1e-7 * gn {
        return Err(domain(format!(
            "not an eigenfunction for {lam2}: residual {r:e}"
        )));
    }
    let f: Vec<f64> = g2
        .iter()
        .zip(g.degrees())
        .map(|(x, d)| x / d.sqrt())
        .collect();
    let pos: Vec<f64> = f.iter().map(|&x| x.max(0.0)).collect();
    let neg: Vec<f64> = f.iter().map(|&x| (-x).max(0.0)).collect();
    let (vp, vn) = (support_volume(g, &pos), support_volume(g, &neg));
    let chosen = if vp == 0.0 || vn == 0.0 {
        // Only possible inside a degenerate λ = 0 eigenspace.
        smallest_component_indicator(g)
    } else if vp < vn {
        pos
    } else if vn < vp {
        neg
    } else {
        let first = f.iter().position(|&x| x != 0.0).unwrap_or(0);
        if f[first] > 0.0 {
            pos
        } else {
            neg
        }
    };
    normalize_w(g, &chosen)
}

/// nonneg_split applied to the λ₂ eigenfunction of a Laplacian spectrum.
pub fn split_from_spectrum(g: &WeightedGraph, spectrum: &Spectrum) -> Result<Vec<f64>> {
    if spectrum.which != Operator::Laplacian || spectrum.len() < 2 {
        return Err(domain("need a Laplacian spectrum with at least two eigenvalues"));
    }
    let g2: Vec<f64> = spectrum
        .eigenfunction(2)
        .iter()
        .zip(g.degrees())
        .map(|(x, d)| x * d.sqrt())
        .collect();
    nonneg_split(g, &g2, spectrum.eigenvalue(2))
}

fn smallest_component_indicator(g: &WeightedGraph) -> Vec<f64> {
    let comps = g.components();
    let vol = |c: &Vec<usize>| c.iter().map(|&v| g.degree(v)).sum::<f64>();
    let best = comps
        .iter()
        .min_by(|a, b| vol(a).total_cmp(&vol(b)))
        .expect("graph has a vertex");
    let mut f = vec![0.0; g.n()];
    for &v in best {
        f[v] = 1.0;
    }
    f
}

/// 2 · max_i ℛ(f_i) for pairwise disjointly supported nonzero functions; an
/// upper bound on λ_k (or α_k) with k = |fs|.
pub fn lambda_bound_from_disjoint<F: AsRef<[f64]>>(
    g: &WeightedGraph,
    fs: &[F],
    which: Operator,
) -> Result<f64> {
    let mut owner = vec![usize::MAX; g.n()];
    let mut worst = 0.0f64;
    for (i, f) in fs.iter().enumerate() {
        let f = f.as_ref();
        checked_len(g, f)?;
        for (v, &x) in f.iter().enumerate() {
            if x != 0.0 {
                if owner[v] != usize::MAX {
                    return Err(domain(format!(
                        "functions {} and {i} share vertex {v}",
                        owner[v]
                    )));
                }
                owner[v] = i;
            }
        }
        worst = worst.max(rayleigh_for(g, f, which)?);
    }
    Ok(2.0 * worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_complete, gen_cycle};
    use approx::assert_abs_diff_eq;

    #[test]
    fn k2_laplacian() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let s = dense_spectrum(&g, Operator::Laplacian).unwrap();
        assert_abs_diff_eq!(s.eigenvalue(1), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eigenvalue(2), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn c8_laplacian_closed_form() {
        let g = gen_cycle(8, 1.0).unwrap();
        let s = dense_spectrum(&g, Operator::Laplacian).unwrap();
        let mut expect: Vec<f64> = (0..8)
            .map(|j| 1.0 - (2.0 * std::f64::consts::PI * j as f64 / 8.0).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues.iter().zip(&expect) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s.eigenvalue(2), 0.2928932188134524, epsilon = 1e-12);
    }

    #[test]
    fn k3_signless() {
        let g = gen_complete(3).unwrap();
        let s = dense_spectrum(&g, Operator::Signless).unwrap();
        for (a, b) in s.eigenvalues.iter().zip([0.5, 0.5, 2.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigenfunctions_are_w_orthonormal() {
        let g = gen_cycle(8, 1.0).unwrap();
        let s = dense_spectrum(&g, Operator::Laplacian).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let ip = inner_w(&g, &s.eigenfunctions[i], &s.eigenfunctions[j]);
                assert_abs_diff_eq!(ip, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn errors() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(dense_spectrum(&g, Operator::Laplacian), Err(Error::Domain(_))));
        let g = gen_cycle(8, 1.0).unwrap();
        assert!(matches!(
            dense_spectrum_with_cap(&g, Operator::Laplacian, 4),
            Err(Error::Capacity { .. })
        ));
        assert!(rayleigh(&g, &[0.0; 8]).is_err());
    }

    #[test]
    fn rayleigh_examples() {
        let c4 = gen_cycle(4, 1.0).unwrap();
        assert_eq!(rayleigh(&c4, &[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(rayleigh(&c4, &[1.0, 1.0, 0.0, 0.0]).unwrap(), 0.5);
        let k2 = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(rayleigh(&k2, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(signless_rayleigh(&k2, &[1.0, -1.0]).unwrap(), 0.0);
        assert_eq!(signless_rayleigh(&k2, &[1.0, 1.0]).unwrap(), 2.0);
        let k3 = gen_complete(3).unwrap();
        assert_eq!(signless_rayleigh(&k3, &[1.0, -1.0, 0.0]).unwrap(), 0.5);
    }

    #[test]
    fn nonneg_split_examples() {
        let k2 = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = nonneg_split(&k2, &[h, -h], 2.0).unwrap();
        assert_abs_diff_eq!(f[0], 1.0, epsilon = 1e-15);
        assert_eq!(f[1], 0.0);
        assert_abs_diff_eq!(rayleigh(&k2, &f).unwrap(), 1.0, epsilon = 1e-15);

        let two = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let f = nonneg_split(&two, &[0.5, 0.5, -0.5, -0.5], 0.0).unwrap();
        assert_eq!(rayleigh(&two, &f).unwrap(), 0.0);
        assert_eq!(f[2], 0.0);
        assert_eq!(support_volume(&two, &f), 2.0);

        let c4 = gen_cycle(4, 1.0).unwrap();
        let f = nonneg_split(&c4, &[h, 0.0, -h, 0.0], 1.0).unwrap();
        assert!(f[0] > 0.0);
        assert_eq!(support_volume(&c4, &f), 2.0);

        assert!(nonneg_split(&c4, &[1.0, 0.0, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn nonneg_split_degenerate_eigenspace_falls_back() {
        let two = WeightedGraph::new(5, [(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap();
        // A λ = 0 eigenvector that is positive everywhere.
        let g2: Vec<f64> = two.degrees().iter().map(|d| d.sqrt()).collect();
        let f = nonneg_split(&two, &g2, 0.0).unwrap();
        assert_eq!(rayleigh(&two, &f).unwrap(), 0.0);
        assert!(support_volume(&two, &f) <= two.total_volume() / 2.0);
    }

    #[test]
    fn disjoint_bound_examples() {
        let two = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let fs = [vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]];
        assert_eq!(lambda_bound_from_disjoint(&two, &fs, Operator::Laplacian).unwrap(), 0.0);

        let c8 = gen_cycle(8, 1.0).unwrap();
        let mut a = vec![0.0; 8];
        let mut b = vec![0.0; 8];
        a[0] = 1.0;
        b[4] = 1.0;
        assert_eq!(lambda_bound_from_disjoint(&c8, &[a.clone(), b], Operator::Laplacian).unwrap(), 2.0);
        assert!(lambda_bound_from_disjoint(&c8, &[a.clone(), a], Operator::Laplacian).is_err());

        let k2 = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let fs = [vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(lambda_bound_from_disjoint(&k2, &fs, Operator::Laplacian).unwrap(), 2.0);
    }
}
