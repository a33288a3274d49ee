//! Bergman kernels of the disk and the ball, Berezin transforms, Toeplitz
//! operators and Carleson-measure experiments.
//!
//! Lebesgue measure `nu` is not normalized, so `nu(B^n) = pi^n / n!`, and
//! `delta(z) = 1 - |z|` is the Euclidean distance to the boundary.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cvec::{CVec, C64};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::geometry::{gamma, kobayashi_ball_disk_params, kobayashi_distance, one_minus_norm_sq};
use crate::quadrature::{
    ball2_rule, domain_rule, euclidean_disk_rule, halton_ball_rule, Estimate, QuadratureSpec,
    Rule, DOUBLING_TOL,
};

/// Fitted slopes at or above this value count as bounded.
pub const CARLESON_SLOPE: f64 = -0.05;
/// Fitted slopes below this value count as unbounded.
pub const NOT_CARLESON_SLOPE: f64 = -0.10;
/// Allowed distance between a fitted and a predicted power-law exponent.
pub const SLOPE_TOL: f64 = 0.1;

/// `(1 - 2^-k) e_1` for `k = 2..=12`: boundary distances from 1/4 down to
/// 1/4096.
pub fn default_centers(d: &DomainSpec) -> Result<Vec<CVec>> {
    let n = ball_dim(d)?;
    Ok((2..=12)
        .map(|k| CVec::basis(n, 0).scale_re(1.0 - 0.5f64.powi(k)))
        .collect())
}

fn ball_dim(d: &DomainSpec) -> Result<usize> {
    match d {
        DomainSpec::UnitDisk => Ok(1),
        DomainSpec::UnitBall { n } if *n >= 1 => Ok(*n),
        _ => Err(Error::Unsupported(format!(
            "Bergman-space operations are available on the disk and the ball, not on the {}",
            d.name()
        ))),
    }
}

/// `n! / pi^n`.
fn kernel_constant(n: usize) -> f64 {
    (1..=n).map(|k| k as f64 / PI).product()
}

fn kernel(n: usize, z: &CVec, w: &CVec) -> C64 {
    let one = C64::new(1.0, 0.0);
    kernel_constant(n) / (one - z.inner(w)).powi(n as i32 + 1)
}

fn kernel_diag(n: usize, z: &CVec) -> f64 {
    kernel_constant(n) / one_minus_norm_sq(z).powi(n as i32 + 1)
}

fn delta(w: &CVec) -> f64 {
    one_minus_norm_sq(w) / (1.0 + w.norm())
}

/// `gamma_z(u)` and its boundary distance, using
/// `1 - |gamma_z(u)|^2 = (1 - |z|^2)(1 - |u|^2) / |1 - <u, z>|^2`.
fn pushed(z: &CVec, omz: f64, u: &CVec) -> (CVec, f64, f64) {
    let w = gamma(z, u);
    let den = (C64::new(1.0, 0.0) - u.inner(z)).norm_sqr();
    let jac = omz / den;
    let dw = jac * one_minus_norm_sq(u) / (1.0 + w.norm());
    (w, dw, jac)
}

/// Bergman kernel `K(z, w)` of the disk or the ball.
pub fn bergman_kernel(d: &DomainSpec, z: &CVec, w: &CVec) -> Result<C64> {
    let n = ball_dim(d)?;
    d.require_interior(z, "z")?;
    d.require_interior(w, "w")?;
    Ok(kernel(n, z, w))
}

/// `k_w(z) = K(z, w) / sqrt(K(w, w))`.
pub fn normalized_kernel(d: &DomainSpec, w: &CVec, z: &CVec) -> Result<C64> {
    let n = ball_dim(d)?;
    d.require_interior(z, "z")?;
    d.require_interior(w, "w")?;
    Ok(kernel(n, z, w) / kernel_diag(n, w).sqrt())
}

/// Extra factor in a weighted Lebesgue measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Density {
    Constant { value: f64 },
    /// `|z|^exponent`.
    NormPower { exponent: f64 },
}

impl Density {
    fn validate(&self) -> Result<()> {
        match self {
            Density::Constant { value } if !(*value > 0.0) || !value.is_finite() => {
                Err(Error::argument("density constant must be positive"))
            }
            Density::NormPower { exponent } if !(*exponent >= 0.0) || !exponent.is_finite() => {
                Err(Error::argument("density exponent must be nonnegative"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, z: &CVec) -> f64 {
        match self {
            Density::Constant { value } => *value,
            Density::NormPower { exponent } => z.norm().powf(*exponent),
        }
    }
}

/// A finite positive measure on the disk or the ball.
///
/// JSON: `{"kind":"weighted_lebesgue","beta":1.0,"domain":{"kind":"disk"}}`
/// or `{"kind":"dirac","points":[[[0.5,0]]],"weights":[1.0]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    /// `delta^beta * density * nu`.
    WeightedLebesgue {
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<Density>,
        domain: DomainSpec,
    },
    #[serde(rename = "dirac")]
    DiracSum { points: Vec<CVec>, weights: Vec<f64> },
}

impl MeasureSpec {
    pub fn lebesgue(d: DomainSpec) -> Self {
        MeasureSpec::weighted(d, 0.0)
    }

    pub fn weighted(d: DomainSpec, beta: f64) -> Self {
        MeasureSpec::WeightedLebesgue {
            beta,
            density: None,
            domain: d,
        }
    }

    pub fn dirac(points: Vec<CVec>, weights: Vec<f64>) -> Self {
        MeasureSpec::DiracSum { points, weights }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Check the measure against the domain it is used on.
    pub fn validate(&self, d: &DomainSpec) -> Result<()> {
        let n = ball_dim(d)?;
        match self {
            MeasureSpec::WeightedLebesgue {
                beta,
                density,
                domain,
            } => {
                if ball_dim(domain)? != n {
                    return Err(Error::argument(format!(
                        "measure lives on the {} but the domain is the {}",
                        domain.name(),
                        d.name()
                    )));
                }
                if !(*beta > -1.0) || !beta.is_finite() {
                    return Err(Error::argument("beta must be > -1 for a finite measure"));
                }
                if let Some(f) = density {
                    f.validate()?;
                }
                Ok(())
            }
            MeasureSpec::DiracSum { points, weights } => {
                if points.len() != weights.len() {
                    return Err(Error::argument("points and weights differ in length"));
                }
                if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
                    return Err(Error::argument("Dirac weights must be positive"));
                }
                for p in points {
                    d.require_interior(p, "Dirac point")?;
                }
                Ok(())
            }
        }
    }

    /// Density of a weighted measure with respect to `nu`, given `delta(w)`.
    fn density(&self, w: &CVec, dw: f64) -> f64 {
        match self {
            MeasureSpec::WeightedLebesgue { beta, density, .. } => {
                let base = if *beta == 0.0 { 1.0 } else { dw.powf(*beta) };
                density.as_ref().map_or(base, |f| base * f.eval(w))
            }
            MeasureSpec::DiracSum { .. } => 0.0,
        }
    }
}

/// Evaluate `f` on the rule for `q` and on its refinement.
fn doubled(
    d: &DomainSpec,
    n: usize,
    q: &QuadratureSpec,
    focus: Option<&CVec>,
    f: impl Fn(&Rule) -> f64,
) -> Result<Estimate> {
    let coarse = f(&domain_rule(d, q, focus)?);
    let fine = f(&domain_rule(d, &q.refined(n), focus)?);
    Ok(Estimate::new(coarse, fine))
}

/// `B mu(z) = int |k_z(w)|^2 d mu(w)`.
///
/// Weighted measures are integrated after the change of variables
/// `w = gamma_z(u)`, under which `|k_z|^2 d nu` becomes `(n!/pi^n) d nu`.
pub fn berezin_transform(
    d: &DomainSpec,
    mu: &MeasureSpec,
    z: &CVec,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let n = ball_dim(d)?;
    d.require_interior(z, "z")?;
    mu.validate(d)?;
    match mu {
        MeasureSpec::DiracSum { points, weights } => {
            let kd = kernel_diag(n, z);
            let v = points
                .iter()
                .zip(weights)
                .map(|(p, c)| c * kernel(n, p, z).norm_sqr() / kd)
                .sum();
            Ok(Estimate::exact(v))
        }
        MeasureSpec::WeightedLebesgue { .. } => {
            let omz = one_minus_norm_sq(z);
            let c = kernel_constant(n);
            doubled(d, n, q, Some(z), |rule| {
                c * rule.integrate(|u| {
                    let (w, dw, _) = pushed(z, omz, u);
                    mu.density(&w, dw)
                })
            })
        }
    }
}

/// Complex counterpart of [`Estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub value: C64,
    pub coarse: C64,
    pub converged: bool,
}

impl ComplexEstimate {
    fn new(coarse: C64, value: C64) -> Self {
        let scale = value.norm().max(f64::MIN_POSITIVE);
        ComplexEstimate {
            value,
            coarse,
            converged: (value - coarse).norm() <= DOUBLING_TOL * scale,
        }
    }
}

/// `T_mu f(z) = int K(z, w) f(w) d mu(w)`.
pub fn toeplitz_apply(
    d: &DomainSpec,
    mu: &MeasureSpec,
    f: &(dyn Fn(&CVec) -> C64 + Sync),
    z: &CVec,
    q: &QuadratureSpec,
) -> Result<ComplexEstimate> {
    let n = ball_dim(d)?;
    d.require_interior(z, "z")?;
    mu.validate(d)?;
    match mu {
        MeasureSpec::DiracSum { points, weights } => {
            let v = points
                .iter()
                .zip(weights)
                .map(|(p, c)| kernel(n, z, p) * f(p) * *c)
                .sum();
            Ok(ComplexEstimate::new(v, v))
        }
        MeasureSpec::WeightedLebesgue { .. } => {
            let focus = Some(z);
            let eval = |rule: &Rule| {
                rule.integrate_complex(|w| kernel(n, z, w) * f(w) * mu.density(w, delta(w)))
            };
            let coarse = eval(&domain_rule(d, q, focus)?);
            let fine = eval(&domain_rule(d, &q.refined(n), focus)?);
            Ok(ComplexEstimate::new(coarse, fine))
        }
    }
}

/// `int (T_mu k_z)(w) conj(k_z(w)) d nu(w)` by nested quadrature, which
/// equals `B mu(z)` by Fubini and the reproducing property.
///
/// On the disk the inner rule at each outer node `w` is graded toward `w`,
/// where `K(w, .)` peaks. The cost is the product of the node counts.
pub fn berezin_via_toeplitz(
    d: &DomainSpec,
    mu: &MeasureSpec,
    z: &CVec,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let n = ball_dim(d)?;
    d.require_interior(z, "z")?;
    mu.validate(d)?;
    let norm = kernel_diag(n, z).sqrt();
    let kz = |v: &CVec| kernel(n, v, z) / norm;
    let toeplitz_kz = |w: &CVec, inner: &QuadratureSpec| -> Result<C64> {
        Ok(match mu {
            MeasureSpec::DiracSum { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(v, c)| kernel(n, w, v) * kz(v) * *c)
                .sum(),
            MeasureSpec::WeightedLebesgue { .. } => {
                let rule = domain_rule(d, inner, (n == 1).then_some(w))?;
                rule.points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(v, a)| kernel(n, w, v) * kz(v) * (a * mu.density(v, delta(v))))
                    .sum()
            }
        })
    };
    let nested = |q: &QuadratureSpec| -> Result<f64> {
        let outer = domain_rule(d, q, (n == 1).then_some(z))?;
        let terms: Vec<f64> = outer
            .points
            .par_iter()
            .zip(&outer.weights)
            .map(|(w, b)| Ok(b * (toeplitz_kz(w, q)? * kz(w).conj()).re))
            .collect::<Result<_>>()?;
        Ok(terms.iter().sum())
    };
    Ok(Estimate::new(nested(q)?, nested(&q.refined(n))?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Carleson,
    NotCarleson,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonRow {
    pub center: CVec,
    pub delta: f64,
    pub mu: f64,
    pub nu: f64,
    /// `mu(B) / nu(B)^theta`.
    pub ratio: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub theta: f64,
    pub r: f64,
    pub rows: Vec<CarlesonRow>,
    pub sup_ratio: f64,
    /// Least-squares slope of `log ratio` against `log delta`.
    pub trend_exponent: Option<f64>,
    pub verdict: Verdict,
}

/// One CSV line of a [`CarlesonReport`].
#[derive(Debug, Clone, Serialize)]
pub struct CarlesonCsvRow {
    pub delta: f64,
    pub mu: f64,
    pub nu: f64,
    pub ratio: f64,
    pub log_ratio: f64,
    pub converged: bool,
    pub theta: f64,
    pub r: f64,
    pub trend_exponent: Option<f64>,
    pub verdict: Verdict,
}

impl CarlesonReport {
    pub fn csv_rows(&self) -> Vec<CarlesonCsvRow> {
        self.rows
            .iter()
            .map(|row| CarlesonCsvRow {
                delta: row.delta,
                mu: row.mu,
                nu: row.nu,
                ratio: row.ratio,
                log_ratio: row.ratio.ln(),
                converged: row.converged,
                theta: self.theta,
                r: self.r,
                trend_exponent: self.trend_exponent,
                verdict: self.verdict,
            })
            .collect()
    }
}

/// Least-squares slope of `ys` against `xs`.
fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn slope_verdict(slope: f64) -> Verdict {
    if slope >= CARLESON_SLOPE {
        Verdict::Carleson
    } else if slope < NOT_CARLESON_SLOPE {
        Verdict::NotCarleson
    } else {
        Verdict::Inconclusive
    }
}

/// Verdict from quantities that should stay bounded as `delta -> 0`.
/// Zero values mean the measure misses the test region and are left out
/// of the fit.
fn trend(deltas: &[f64], values: &[f64], converged: bool) -> (Option<f64>, Verdict) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = deltas
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(d, v)| (d.ln(), v.ln()))
        .unzip();
    if xs.is_empty() {
        return (None, if converged { Verdict::Carleson } else { Verdict::Inconclusive });
    }
    if xs.len() < 3 {
        return (None, Verdict::Inconclusive);
    }
    let s = fit_slope(&xs, &ys);
    let v = if converged && values.iter().all(|v| v.is_finite()) {
        slope_verdict(s)
    } else {
        Verdict::Inconclusive
    };
    (Some(s), v)
}

/// Boundary distances of the centers; they must be interior, at least
/// three, and span `decades` orders of magnitude.
fn center_deltas(d: &DomainSpec, centers: &[CVec], decades: f64) -> Result<Vec<f64>> {
    if centers.len() < 3 {
        return Err(Error::argument("need at least 3 centers"));
    }
    let mut out = Vec::with_capacity(centers.len());
    for z in centers {
        d.require_interior(z, "center")?;
        out.push(delta(z));
    }
    let hi = out.iter().cloned().fold(0.0, f64::max);
    let lo = out.iter().cloned().fold(f64::INFINITY, f64::min);
    if (hi / lo).log10() < decades - 1e-9 {
        return Err(Error::argument(format!(
            "centers must span at least {decades} decades of boundary distance"
        )));
    }
    Ok(out)
}

/// Unit-ball rule at resolution `level` for integrals over Kobayashi balls.
fn small_ball_rule(n: usize, level: u32) -> Result<Rule> {
    match n {
        2 => Ok(ball2_rule(12 << level)),
        _ => halton_ball_rule(n, 1 << (14 + 2 * level), 0),
    }
}

/// `(mu(B), nu(B))` for the Kobayashi ball `B(z0, r)`.
fn ball_masses(
    d: &DomainSpec,
    n: usize,
    mu: &MeasureSpec,
    z0: &CVec,
    r: f64,
    level: u32,
) -> Result<(f64, f64)> {
    let dirac = |nu: f64| -> Result<(f64, f64)> {
        let MeasureSpec::DiracSum { points, weights } = mu else {
            unreachable!()
        };
        let mut m = 0.0;
        for (p, c) in points.iter().zip(weights) {
            if kobayashi_distance(d, z0, p)?.value() < r {
                m += c;
            }
        }
        Ok((m, nu))
    };
    if n == 1 {
        let (c, rho) = kobayashi_ball_disk_params(z0[0], r)?;
        let nu = PI * rho * rho;
        return match mu {
            MeasureSpec::DiracSum { .. } => dirac(nu),
            MeasureSpec::WeightedLebesgue { .. } => {
                let rule = euclidean_disk_rule(c, rho, 24 << level, 48 << level);
                Ok((rule.integrate(|w| mu.density(w, delta(w))), nu))
            }
        };
    }
    let t = r.tanh();
    let base = small_ball_rule(n, level)?.affine(&CVec::zeros(n), t);
    let omz = one_minus_norm_sq(z0);
    let jac_power = n as i32 + 1;
    let terms: Vec<(f64, f64)> = base
        .points
        .par_iter()
        .zip(&base.weights)
        .map(|(u, wt)| {
            let (w, dw, jac) = pushed(z0, omz, u);
            let vol = wt * jac.powi(jac_power);
            (vol * mu.density(&w, dw), vol)
        })
        .collect();
    let nu = terms.iter().map(|t| t.1).sum();
    match mu {
        MeasureSpec::DiracSum { .. } => dirac(nu),
        MeasureSpec::WeightedLebesgue { .. } => Ok((terms.iter().map(|t| t.0).sum(), nu)),
    }
}

fn relative_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= DOUBLING_TOL * b.abs().max(f64::MIN_POSITIVE)
}

/// Compare `mu(B(z0, r))` with `nu(B(z0, r))^theta` along the centers.
///
/// The verdict is read off the fitted slope of `log ratio` against
/// `log delta`: at least `-0.05` is Carleson, below `-0.10` is not, and
/// anything in between, or any unconverged quadrature, is inconclusive.
pub fn theta_carleson_test(
    d: &DomainSpec,
    mu: &MeasureSpec,
    theta: f64,
    r: f64,
    centers: &[CVec],
    _q: &QuadratureSpec,
) -> Result<CarlesonReport> {
    let n = ball_dim(d)?;
    mu.validate(d)?;
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::argument("theta must be positive"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::argument("r must be positive"));
    }
    let deltas = center_deltas(d, centers, 3.0)?;
    let mut rows = Vec::with_capacity(centers.len());
    for (z0, &dz) in centers.iter().zip(&deltas) {
        let (m0, v0) = ball_masses(d, n, mu, z0, r, 0)?;
        let (m1, v1) = ball_masses(d, n, mu, z0, r, 1)?;
        rows.push(CarlesonRow {
            center: z0.clone(),
            delta: dz,
            mu: m1,
            nu: v1,
            ratio: m1 / v1.powf(theta),
            converged: relative_close(m0, m1) && relative_close(v0, v1),
        });
    }
    let converged = rows.iter().all(|r| r.converged);
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let (trend_exponent, verdict) = trend(&deltas, &ratios, converged);
    Ok(CarlesonReport {
        theta,
        r,
        sup_ratio: ratios.iter().cloned().fold(0.0, f64::max),
        rows,
        trend_exponent,
        verdict,
    })
}

/// `delta^{(n+1)(1-theta)} B mu` along a sequence of centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerezinScaling {
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: Option<f64>,
    pub converged: bool,
    pub verdict: Verdict,
}

/// Boundedness test for `delta^{(n+1)(1-theta)} B mu`, the Berezin-side
/// characterization of theta-Carleson measures.
pub fn berezin_scaling(
    d: &DomainSpec,
    mu: &MeasureSpec,
    theta: f64,
    centers: &[CVec],
    q: &QuadratureSpec,
) -> Result<BerezinScaling> {
    let n = ball_dim(d)?;
    let deltas = center_deltas(d, centers, 2.0)?;
    let mut values = Vec::with_capacity(centers.len());
    let mut converged = true;
    for (z0, &dz) in centers.iter().zip(&deltas) {
        let b = berezin_transform(d, mu, z0, q)?;
        converged &= b.converged;
        values.push(dz.powf((n + 1) as f64 * (1.0 - theta)) * b.value);
    }
    let (slope, verdict) = trend(&deltas, &values, converged);
    Ok(BerezinScaling {
        deltas,
        values,
        slope,
        converged,
        verdict,
    })
}

/// `int |K(w, z0)|^s rho(w) d nu(w)` with `rho` given in terms of `w` and
/// `delta(w)`.
fn kernel_moment(
    d: &DomainSpec,
    n: usize,
    z0: &CVec,
    s: f64,
    rho: &(dyn Fn(&CVec, f64) -> f64 + Sync),
    q: &QuadratureSpec,
) -> Result<Estimate> {
    doubled(d, n, q, Some(z0), |rule| {
        rule.integrate(|w| kernel(n, w, z0).norm().powf(s) * rho(w, delta(w)))
    })
}

/// Kernel testing of the embedding `A^p(D, (n+1)(theta-1)) -> L^p(mu)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTest {
    pub p: f64,
    pub deltas: Vec<f64>,
    /// `int |k_z0|^{2p} d mu / int |k_z0|^{2p} delta^{(n+1)(theta-1)} d nu`.
    pub ratios: Vec<f64>,
    pub slope: Option<f64>,
    pub converged: bool,
    pub verdict: Verdict,
}

/// Test the embedding on the family `k_z0^2`, which is extremal for it.
/// Needs `1 - 1/(n+1) < theta < 2` and `p > 1`.
pub fn kernel_embedding_test(
    d: &DomainSpec,
    mu: &MeasureSpec,
    theta: f64,
    p: f64,
    centers: &[CVec],
    q: &QuadratureSpec,
) -> Result<EmbeddingTest> {
    let n = ball_dim(d)?;
    mu.validate(d)?;
    let lo = 1.0 - 1.0 / (n + 1) as f64;
    if !(theta > lo && theta < 2.0) {
        return Err(Error::argument(format!("theta must lie in ({lo}, 2)")));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::argument("p must be > 1"));
    }
    let deltas = center_deltas(d, centers, 2.0)?;
    let gamma_w = (n + 1) as f64 * (theta - 1.0);
    let reference = |_: &CVec, dw: f64| dw.powf(gamma_w);
    let mut ratios = Vec::with_capacity(centers.len());
    let mut converged = true;
    for z0 in centers {
        let num = match mu {
            MeasureSpec::DiracSum { points, weights } => Estimate::exact(
                points
                    .iter()
                    .zip(weights)
                    .map(|(x, c)| c * kernel(n, x, z0).norm().powf(2.0 * p))
                    .sum(),
            ),
            MeasureSpec::WeightedLebesgue { .. } => {
                kernel_moment(d, n, z0, 2.0 * p, &|w, dw| mu.density(w, dw), q)?
            }
        };
        let den = kernel_moment(d, n, z0, 2.0 * p, &reference, q)?;
        converged &= num.converged && den.converged;
        ratios.push(num.value / den.value);
    }
    let (slope, verdict) = trend(&deltas, &ratios, converged);
    Ok(EmbeddingTest {
        p,
        deltas,
        ratios,
        slope,
        converged,
        verdict,
    })
}

/// A norm with a node-doubling diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub coarse: f64,
    pub converged: bool,
    /// Doubling the nodes increased the value beyond tolerance, as for an
    /// integrand that is not integrable.
    pub divergent: bool,
}

/// `||f||_{p,beta} = (int |f|^p delta^beta d nu)^{1/p}`; `focus` grades
/// the disk rule toward a point where `f` is peaked.
pub fn weighted_bergman_norm(
    d: &DomainSpec,
    f: &(dyn Fn(&CVec) -> C64 + Sync),
    p: f64,
    beta: f64,
    q: &QuadratureSpec,
    focus: Option<&CVec>,
) -> Result<NormEstimate> {
    let n = ball_dim(d)?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::argument("p must lie in [1, inf)"));
    }
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::argument("beta must be > -1"));
    }
    if let Some(z) = focus {
        d.require_interior(z, "focus")?;
    }
    let e = doubled(d, n, q, focus, |rule| {
        rule.integrate(|w| f(w).norm().powf(p) * delta(w).powf(beta))
    })?;
    Ok(NormEstimate {
        value: e.value.powf(1.0 / p),
        coarse: e.coarse.powf(1.0 / p),
        converged: e.converged,
        divergent: !e.converged && e.value > e.coarse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Growth like `delta^{beta - (n+1)(p-1)}`.
    Power,
    /// Growth like `|log delta|`.
    Log,
    Bounded,
    Inconclusive,
}

/// Regime of `int |K(w, z0)|^p delta^beta d nu` as `z0 -> boundary`.
pub fn predicted_regime(n: usize, p: f64, beta: f64) -> Regime {
    let critical = (n + 1) as f64 * (p - 1.0);
    if (beta - critical).abs() < 1e-12 {
        Regime::Log
    } else if beta < critical {
        Regime::Power
    } else {
        Regime::Bounded
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub p: f64,
    pub beta: f64,
    pub deltas: Vec<f64>,
    pub integrals: Vec<f64>,
    pub converged: bool,
    /// Slope of `log integral` against `log delta` over the last half of
    /// the centers.
    pub slope: f64,
    /// `beta - (n+1)(p-1)`.
    pub power_exponent: f64,
    /// Median ratio of successive increments over the last half.
    pub increment_ratio: f64,
    pub regime: Regime,
}

/// Fit the growth of `int |K(w, z0)|^p delta(w)^beta d nu(w)` along the
/// centers, which should approach the boundary with `delta` halving.
///
/// Successive increments grow by `2^{(n+1)(p-1) - beta}` in the power
/// regime, stay constant in the log regime and shrink geometrically when
/// the integrals are bounded; the power regime is only reported when the
/// fitted slope is within 0.1 of the predicted exponent.
pub fn kernel_integral_scaling(
    d: &DomainSpec,
    p: f64,
    beta: f64,
    centers: &[CVec],
    q: &QuadratureSpec,
) -> Result<ScalingReport> {
    let n = ball_dim(d)?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::argument("p must lie in [1, inf)"));
    }
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::argument("beta must be > -1"));
    }
    if centers.len() < 4 {
        return Err(Error::argument("need at least 4 centers"));
    }
    let deltas = center_deltas(d, centers, 1.0)?;
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::argument(
            "centers must approach the boundary monotonically",
        ));
    }
    let weight = |_: &CVec, dw: f64| dw.powf(beta);
    let mut integrals = Vec::with_capacity(centers.len());
    let mut converged = true;
    for z0 in centers {
        let e = kernel_moment(d, n, z0, p, &weight, q)?;
        converged &= e.converged;
        integrals.push(e.value);
    }
    let tail = centers.len() / 2;
    let xs: Vec<f64> = deltas[tail..].iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = integrals[tail..].iter().map(|v| v.ln()).collect();
    let slope = fit_slope(&xs, &ys);
    let mut ratios: Vec<f64> = (tail.max(1)..integrals.len() - 1)
        .map(|k| (integrals[k + 1] - integrals[k]) / (integrals[k] - integrals[k - 1]))
        .collect();
    ratios.sort_by(f64::total_cmp);
    let increment_ratio = ratios[ratios.len() / 2];
    let power_exponent = beta - (n + 1) as f64 * (p - 1.0);
    let regime = if !converged || !increment_ratio.is_finite() {
        Regime::Inconclusive
    } else if increment_ratio > 1.25 {
        if (slope - power_exponent).abs() <= SLOPE_TOL {
            Regime::Power
        } else {
            Regime::Inconclusive
        }
    } else if increment_ratio >= 0.8 {
        Regime::Log
    } else if increment_ratio >= 0.0 {
        Regime::Bounded
    } else {
        Regime::Inconclusive
    };
    Ok(ScalingReport {
        p,
        beta,
        deltas,
        integrals,
        converged,
        slope,
        power_exponent,
        increment_ratio,
        regime,
    })
}

/// Separation data of a point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discreteness {
    /// Minimum pairwise Kobayashi distance.
    pub separation: f64,
    pub uniformly_discrete: bool,
    /// Index classes, each separated by `class_separation`.
    pub classes: Vec<Vec<usize>>,
    pub class_separation: f64,
}

/// Minimum pairwise separation, and when points repeat, a greedy split into
/// classes separated by the smallest positive pairwise distance.
pub fn uniform_discreteness(d: &DomainSpec, points: &[CVec]) -> Result<Discreteness> {
    if !d.has_exact_distance() {
        return Err(Error::Unsupported(
            "uniform discreteness needs a closed-form distance".into(),
        ));
    }
    if points.len() > 10_000 {
        return Err(Error::argument("at most 10^4 points"));
    }
    for p in points {
        d.require_interior(p, "point")?;
    }
    let m = points.len();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        f64::INFINITY
                    } else {
                        kobayashi_distance(d, &points[i], &points[j])
                            .map(|h| h.value())
                            .unwrap_or(f64::NAN)
                    }
                })
                .collect()
        })
        .collect();
    if rows.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::numerical("pairwise distance failed"));
    }
    let separation = rows.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    if separation > 0.0 {
        return Ok(Discreteness {
            separation,
            uniformly_discrete: true,
            classes: vec![(0..m).collect()],
            class_separation: separation,
        });
    }
    let eps = rows
        .iter()
        .flatten()
        .cloned()
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        match classes
            .iter_mut()
            .find(|c| c.iter().all(|&j| rows[i][j] >= eps))
        {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(Discreteness {
        separation,
        uniformly_discrete: false,
        classes,
        class_separation: eps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallVolume {
    pub volume: Estimate,
    pub delta: f64,
    /// `volume / delta^{n+1}`.
    pub ratio: f64,
}

/// `nu(B(z0, R))`: exact on the disk, quadrature over the image of a
/// Poincaré ball under `gamma_z0` on the ball.
pub fn kobayashi_ball_volume(
    d: &DomainSpec,
    z0: &CVec,
    radius: f64,
    _q: &QuadratureSpec,
) -> Result<BallVolume> {
    let n = ball_dim(d)?;
    d.require_interior(z0, "center")?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::argument("radius must be positive"));
    }
    let lebesgue = MeasureSpec::lebesgue(d.clone());
    let volume = if n == 1 {
        let (_, rho) = kobayashi_ball_disk_params(z0[0], radius)?;
        Estimate::exact(PI * rho * rho)
    } else {
        let (_, v0) = ball_masses(d, n, &lebesgue, z0, radius, 0)?;
        let (_, v1) = ball_masses(d, n, &lebesgue, z0, radius, 1)?;
        Estimate::new(v0, v1)
    };
    let dz = delta(z0);
    Ok(BallVolume {
        volume,
        delta: dz,
        ratio: volume.value / dz.powi(n as i32 + 1),
    })
}
