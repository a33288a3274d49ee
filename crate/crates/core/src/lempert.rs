//! Two-sided bounds for the Kobayashi distance of bounded convex domains.
//!
//! On a convex domain the Kobayashi distance equals the Lempert function,
//! the infimum of `k_disk(0, t)` over holomorphic discs `phi` with
//! `phi(0) = z` and `phi(t) = w`. Any admissible disc therefore gives an
//! upper bound. Lower bounds come from supporting half-planes: a complex
//! supporting functional `L` at a boundary point maps the domain into a
//! half-plane, and holomorphic maps do not increase the distance.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex::{exit_along, ConvexDomain};
use crate::cvec::{CVec, C64};
use crate::error::{Error, Result};
use crate::geometry::{disk_dist, HyperbolicLength};
use crate::optim::bfgs;

/// Boundary samples used while optimizing a disc.
pub const OPT_SAMPLES: usize = 128;
/// Boundary samples used to certify a disc.
pub const CERT_SAMPLES: usize = 1024;
/// Required clearance of the optimized disc from the boundary.
pub const SAFETY_MARGIN: f64 = 1e-6;
/// Directions used to trace the planar slice through two points.
pub const SLICE_DIRECTIONS: usize = 256;

/// Disc `phi(zeta) = P(m(zeta))` with `P(lambda) = sum_k coeffs[k] lambda^k`
/// and the disk automorphism `m(zeta) = (turn zeta + shift) / (1 + conj(shift) turn zeta)`,
/// normalized so that `phi(0) = z` and `phi(t) = w`.
///
/// Since `m` permutes the unit circle, admissibility only depends on `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDisc {
    pub degree: usize,
    pub coeffs: Vec<CVec>,
    pub t: f64,
    #[serde(default)]
    pub shift: C64,
    #[serde(default = "unit")]
    pub turn: C64,
    /// `min` over certification samples of `-rho_i(P(e^{i theta}))`.
    pub margin: f64,
}

fn unit() -> C64 {
    C64::new(1.0, 0.0)
}

fn mobius(shift: C64, turn: C64, zeta: C64) -> C64 {
    let u = turn * zeta;
    (u + shift) / (unit() + shift.conj() * u)
}

impl AnalyticDisc {
    /// The polynomial part `P`.
    pub fn poly(&self, lambda: C64) -> CVec {
        let n = self.coeffs[0].dim();
        let mut acc = CVec::zeros(n);
        for a in self.coeffs.iter().rev() {
            for j in 0..n {
                acc[j] = acc[j] * lambda + a[j];
            }
        }
        acc
    }

    pub fn eval(&self, zeta: C64) -> CVec {
        self.poly(mobius(self.shift, self.turn, zeta))
    }

    /// Affine disc `z + (w - z) zeta / t`.
    pub fn affine(z: &CVec, w: &CVec, t: f64) -> Self {
        AnalyticDisc {
            degree: 1,
            coeffs: vec![z.clone(), (w - z).scale_re(1.0 / t)],
            t,
            shift: C64::new(0.0, 0.0),
            turn: unit(),
            margin: f64::NAN,
        }
    }

    /// Largest interpolation residual `max(|phi(0) - z|, |phi(t) - w|)`.
    pub fn interpolation_residual(&self, z: &CVec, w: &CVec) -> f64 {
        let r0 = self.eval(C64::new(0.0, 0.0)).dist(z);
        let rt = self.eval(C64::new(self.t, 0.0)).dist(w);
        r0.max(rt)
    }

    /// `min_k -max_i rho_i(P(e^{2 pi i k / samples}))`.
    pub fn boundary_margin(&self, d: &ConvexDomain, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let lambda = C64::from_polar(1.0, TAU * k as f64 / samples as f64);
                -d.max_value(&self.poly(lambda))
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Complex supporting functional `L(z) = <z, n>` at a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportData {
    pub point: CVec,
    pub functional: CVec,
    /// More than one constraint is active at the point, so the supporting
    /// functional need not be unique.
    pub nonunique: bool,
}

impl SupportData {
    pub fn apply(&self, z: &CVec) -> C64 {
        z.inner(&self.functional)
    }

    /// Weak peak function `1 / (1 - (L(z) - L(x)))`.
    pub fn peak(&self, z: &CVec) -> C64 {
        let lx = self.apply(&self.point);
        C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - (self.apply(z) - lx))
    }
}

/// Points counted as interior checks when building supporting data.
const SUPPORT_CHECK_SAMPLES: usize = 100;

/// Supporting functional at a boundary point: the unit complex gradient of
/// the active constraint.
pub fn supporting_functional(d: &ConvexDomain, x: &CVec) -> Result<SupportData> {
    x.check_dim(d.dim(), "boundary point")?;
    let vals = d.values(x);
    let i = d.most_active(x);
    if vals[i].abs() >= 1e-10 {
        return Err(Error::domain(format!(
            "point is not on the boundary (max rho = {:.3e})",
            vals[i]
        )));
    }
    let nonunique = vals
        .iter()
        .enumerate()
        .any(|(j, v)| j != i && v.abs() < 1e-10);
    let g = d.constraints[i].gradient(x);
    let gn = g.norm();
    if gn == 0.0 {
        return Err(Error::numerical("vanishing gradient at boundary point"));
    }
    let s = SupportData {
        point: x.clone(),
        functional: g.scale_re(1.0 / gn),
        nonunique,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5u64);
    let lx = s.apply(x).re;
    let dom = crate::domain::DomainSpec::Convex(d.clone());
    for _ in 0..SUPPORT_CHECK_SAMPLES {
        let z = crate::maps::sample_interior(&dom, &mut rng)?;
        if !(s.apply(&z).re < lx) || !(s.peak(&z).norm() < 1.0) {
            return Err(Error::numerical(
                "supporting functional fails on an interior sample",
            ));
        }
    }
    Ok(s)
}

/// Distance between `L(z)` and `L(w)` in the half-plane `Re < Re L(x)`.
fn halfplane_value(s: &SupportData, z: &CVec, w: &CVec) -> f64 {
    let b = s.apply(&s.point).re;
    let m1 = C64::new(b, 0.0) - s.apply(z);
    let m2 = C64::new(b, 0.0) - s.apply(w);
    if m1 == m2 {
        return 0.0;
    }
    let den = (m1 + m2.conj()).norm();
    let m = ((m1 - m2).norm() / den).min(1.0);
    let omm = 4.0 * m1.re * m2.re / (den * den);
    (m.ln_1p() - 0.5 * omm.ln()).max(0.0)
}

/// Default candidate boundary points for the half-plane bound: the exits
/// of the real line through `z` and `w` in both directions, and 16 points
/// on the boundary of the complex line through them.
pub fn default_candidates(d: &ConvexDomain, z: &CVec, w: &CVec) -> Result<Vec<CVec>> {
    let u = w - z;
    if u.norm() == 0.0 {
        return Ok(vec![]);
    }
    let mut pts = Vec::new();
    let exit = |p: &CVec, dir: &CVec| -> Result<CVec> {
        let t = d.ray_exit(p, dir)?;
        Ok(p + &dir.scale_re(t / dir.norm()))
    };
    pts.push(exit(w, &u)?);
    pts.push(exit(z, &u.scale_re(-1.0))?);
    let mid = (z + w).scale_re(0.5);
    for k in 0..16 {
        let dir = u.scale(C64::from_polar(1.0, TAU * k as f64 / 16.0));
        pts.push(exit(&mid, &dir)?);
    }
    Ok(pts)
}

/// Max over the candidates of the half-plane distance of the projections.
pub fn halfplane_lower_bound_with(
    d: &ConvexDomain,
    z: &CVec,
    w: &CVec,
    candidates: &[CVec],
) -> Result<HyperbolicLength> {
    let mut best = 0.0f64;
    for x in candidates {
        let s = support_unchecked(d, x)?;
        best = best.max(halfplane_value(&s, z, w));
    }
    Ok(HyperbolicLength::clamp(best))
}

fn support_unchecked(d: &ConvexDomain, x: &CVec) -> Result<SupportData> {
    let i = d.most_active(x);
    let g = d.constraints[i].gradient(x);
    let gn = g.norm();
    if gn == 0.0 {
        return Err(Error::numerical("vanishing gradient at boundary point"));
    }
    Ok(SupportData {
        point: x.clone(),
        functional: g.scale_re(1.0 / gn),
        nonunique: false,
    })
}

/// Lower bound for `k_D(z, w)` from supporting half-planes.
pub fn halfplane_lower_bound(d: &ConvexDomain, z: &CVec, w: &CVec) -> Result<HyperbolicLength> {
    check_pair(d, z, w)?;
    let cands = default_candidates(d, z, w)?;
    halfplane_lower_bound_with(d, z, w, &cands)
}

fn check_pair(d: &ConvexDomain, z: &CVec, w: &CVec) -> Result<()> {
    z.check_dim(d.dim(), "first point")?;
    w.check_dim(d.dim(), "second point")?;
    if !d.contains(z) || !d.contains(w) {
        return Err(Error::domain("points must be interior to the convex domain"));
    }
    Ok(())
}

/// Inscribed disk in the planar slice, with the resulting distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceDisk {
    pub center: C64,
    pub radius: f64,
    pub distance: f64,
}

/// Upper bound from a Euclidean disk inside the slice
/// `{ lambda : (1 - lambda) z + lambda w in D }` containing 0 and 1.
pub fn slice_upper_bound(d: &ConvexDomain, z: &CVec, w: &CVec) -> Result<HyperbolicLength> {
    Ok(HyperbolicLength::clamp(slice_disk(d, z, w)?.distance))
}

/// The slice polygon traced from `lambda = 1/2`, in angular order.
pub fn slice_polygon(d: &ConvexDomain, z: &CVec, w: &CVec) -> Result<Vec<C64>> {
    let u = w - z;
    let un = u.norm();
    let mid = (z + w).scale_re(0.5);
    let mut poly = Vec::with_capacity(SLICE_DIRECTIONS);
    for k in 0..SLICE_DIRECTIONS {
        let e = C64::from_polar(1.0, TAU * k as f64 / SLICE_DIRECTIONS as f64);
        let s = exit_along(|p| d.max_value(p), &mid, &u.scale(e)).map_err(|err| {
            Error::numerical(format!("slice search failed in direction {k}: {err}"))
        })?;
        poly.push(C64::new(0.5, 0.0) + e * (s / un));
    }
    Ok(poly)
}

fn inradius(poly: &[C64], c: C64) -> f64 {
    let n = poly.len();
    let mut r = f64::INFINITY;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = b - a;
        // signed distance, polygon is counterclockwise
        let cross = e.re * (c - a).im - e.im * (c - a).re;
        r = r.min(cross / e.norm());
    }
    r
}

fn slice_value(poly: &[C64], c: C64) -> Option<(f64, f64)> {
    let r = inradius(poly, c);
    if !(r > 0.0) {
        return None;
    }
    let a = -c / r;
    let b = (C64::new(1.0, 0.0) - c) / r;
    if a.norm() >= 1.0 || b.norm() >= 1.0 {
        return None;
    }
    Some((disk_dist(a, b), r))
}

pub fn slice_disk(d: &ConvexDomain, z: &CVec, w: &CVec) -> Result<SliceDisk> {
    check_pair(d, z, w)?;
    if z == w {
        return Ok(SliceDisk {
            center: C64::new(0.0, 0.0),
            radius: 0.0,
            distance: 0.0,
        });
    }
    let poly = slice_polygon(d, z, w)?;
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &poly {
        lo_re = lo_re.min(p.re);
        hi_re = hi_re.max(p.re);
        lo_im = lo_im.min(p.im);
        hi_im = hi_im.max(p.im);
    }
    let mut best: Option<(f64, C64, f64)> = None;
    let grid = 48;
    for i in 0..=grid {
        for j in 0..=grid {
            let c = C64::new(
                lo_re + (hi_re - lo_re) * i as f64 / grid as f64,
                lo_im + (hi_im - lo_im) * j as f64 / grid as f64,
            );
            if let Some((v, r)) = slice_value(&poly, c) {
                if best.map_or(true, |b| v < b.0) {
                    best = Some((v, c, r));
                }
            }
        }
    }
    let Some((mut val, mut c, mut r)) = best else {
        return Err(Error::numerical(
            "slice search failed: no inscribed disk contains both points",
        ));
    };
    // compass search refinement
    let mut h = ((hi_re - lo_re).max(hi_im - lo_im)) / grid as f64;
    while h > 1e-12 {
        let mut moved = false;
        for dir in [
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
        ] {
            let cand = c + dir * h;
            if let Some((v, rr)) = slice_value(&poly, cand) {
                if v < val {
                    val = v;
                    c = cand;
                    r = rr;
                    moved = true;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Ok(SliceDisk {
        center: c,
        radius: r,
        distance: val,
    })
}

/// Two-sided estimate of the Kobayashi distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LempertEstimate {
    pub lower: HyperbolicLength,
    pub upper: HyperbolicLength,
    pub witness: AnalyticDisc,
    pub iterations: usize,
    /// The upper bound came from the slice disk because no admissible
    /// polynomial disc was found.
    pub fallback: bool,
    /// Upper bound after each degree stage `1..=degree`.
    #[serde(default)]
    pub ladder: Vec<f64>,
}

impl LempertEstimate {
    pub fn gap(&self) -> f64 {
        self.upper.value() - self.lower.value()
    }
}

/// Tuning knobs of [`estimate_lempert_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LempertOptions {
    pub degree: usize,
    /// Quasi-Newton iterations per sharpness level of the inner solve.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Stop bisecting once the distance bracket on `t` is this narrow.
    pub tolerance: f64,
}

impl LempertOptions {
    pub fn new(degree: usize, budget: usize) -> Self {
        LempertOptions {
            degree,
            budget,
            restarts: 4,
            seed: 0,
            tolerance: 1e-7,
        }
    }
}

/// Disc family `P(lambda) = z + (w - z) (lambda - alpha) / (beta - alpha)
/// + sum_{k>=2} b_k (lambda - alpha)(lambda - beta) lambda^{k-2}` with
/// `alpha = m(0)`, `beta = m(t)`; the `b_k` are the free coefficients.
struct DiscProblem<'a> {
    d: &'a ConvexDomain,
    z: &'a CVec,
    w: &'a CVec,
    n: usize,
    degree: usize,
    shift: C64,
    turn: C64,
}

impl DiscProblem<'_> {
    fn free_len(&self) -> usize {
        2 * self.n * (self.degree - 1)
    }

    fn nodes(&self, t: f64) -> (C64, C64) {
        (self.shift, mobius(self.shift, self.turn, C64::new(t, 0.0)))
    }

    fn basis(alpha: C64, beta: C64, k: usize, lambda: C64) -> C64 {
        (lambda - alpha) * (lambda - beta) * lambda.powu(k as u32 - 2)
    }

    fn disc(&self, x: &[f64], t: f64) -> AnalyticDisc {
        let n = self.n;
        let (alpha, beta) = self.nodes(t);
        let slope = (self.w - self.z).scale(unit() / (beta - alpha));
        let mut coeffs = vec![CVec::zeros(n); self.degree + 1];
        coeffs[0] = self.z - &slope.scale(alpha);
        coeffs[1] = slope;
        for k in 2..=self.degree {
            let off = 2 * n * (k - 2);
            let b = CVec::from_real(&x[off..off + 2 * n]);
            // lambda^k - (alpha + beta) lambda^{k-1} + alpha beta lambda^{k-2}
            coeffs[k] = &coeffs[k] + &b;
            coeffs[k - 1] = &coeffs[k - 1] - &b.scale(alpha + beta);
            coeffs[k - 2] = &coeffs[k - 2] + &b.scale(alpha * beta);
        }
        AnalyticDisc {
            degree: self.degree,
            coeffs,
            t,
            shift: self.shift,
            turn: self.turn,
            margin: f64::NAN,
        }
    }

    /// Soft maximum of the constraints over the boundary samples and its
    /// gradient in the free coefficients.
    fn soft_max(&self, x: &[f64], t: f64, sharp: f64, roots: &[C64]) -> (f64, Vec<f64>) {
        let disc = self.disc(x, t);
        let (alpha, beta) = self.nodes(t);
        let n = self.n;
        let m = self.free_len();
        let ncons = self.d.constraints.len();
        let mut vals = Vec::with_capacity(roots.len() * ncons);
        let mut pts = Vec::with_capacity(roots.len());
        for &zeta in roots {
            let p = disc.poly(zeta);
            for c in &self.d.constraints {
                vals.push(c.value(&p));
            }
            pts.push(p);
        }
        let vmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = vals.iter().map(|v| (sharp * (v - vmax)).exp()).collect();
        let total: f64 = weights.iter().sum();
        for wgt in weights.iter_mut() {
            *wgt /= total;
        }
        let value = vmax + total.ln() / sharp;
        let mut grad = vec![0.0; m];
        for (s, &zeta) in roots.iter().enumerate() {
            for (ci, c) in self.d.constraints.iter().enumerate() {
                let wgt = weights[s * ncons + ci];
                if wgt < 1e-300 {
                    continue;
                }
                let g = c.gradient(&pts[s]);
                for k in 2..=self.degree {
                    let b = Self::basis(alpha, beta, k, zeta);
                    let off = 2 * n * (k - 2);
                    for j in 0..n {
                        // d rho / d conj(a_kj) = g_j conj(b); real gradient is twice that
                        let dv = g[j] * b.conj() * (2.0 * wgt);
                        grad[off + 2 * j] += dv.re;
                        grad[off + 2 * j + 1] += dv.im;
                    }
                }
            }
        }
        (value, grad)
    }

    fn max_violation(&self, x: &[f64], t: f64, roots: &[C64]) -> f64 {
        let disc = self.disc(x, t);
        roots
            .iter()
            .map(|&zeta| self.d.max_value(&disc.poly(zeta)))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn roots_of_unity(k: usize) -> Vec<C64> {
    (0..k)
        .map(|j| C64::from_polar(1.0, TAU * j as f64 / k as f64))
        .collect()
}

const SHARPNESS: [f64; 5] = [1e1, 1e2, 1e3, 1e4, 1e5];

/// Search for free coefficients making the disc admissible at `t`.
/// Returns certified coefficients on success.
fn feasible_at(
    prob: &DiscProblem,
    t: f64,
    starts: &[Vec<f64>],
    budget: usize,
    iterations: &mut usize,
) -> Option<(Vec<f64>, f64)> {
    let opt_roots = roots_of_unity(OPT_SAMPLES);
    let cert_roots = roots_of_unity(CERT_SAMPLES);
    let certify = |x: &[f64]| {
        let v = prob.max_violation(x, t, &cert_roots);
        (v < 0.0).then_some(-v)
    };
    for x0 in starts {
        if prob.max_violation(x0, t, &opt_roots) < -SAFETY_MARGIN {
            if let Some(m) = certify(x0) {
                return Some((x0.clone(), m));
            }
        }
        if prob.free_len() == 0 {
            continue;
        }
        let mut x = x0.clone();
        for &sharp in &SHARPNESS {
            let res = bfgs(
                |y| prob.soft_max(y, t, sharp, &opt_roots),
                &x,
                budget,
                |y, _| prob.max_violation(y, t, &opt_roots) < -SAFETY_MARGIN,
            );
            *iterations += res.iterations;
            x = res.x;
            if prob.max_violation(&x, t, &opt_roots) < -SAFETY_MARGIN {
                if let Some(m) = certify(&x) {
                    return Some((x, m));
                }
            }
        }
    }
    None
}

/// Upper and lower bounds for `k_D(z, w)` with default options.
pub fn estimate_lempert(
    d: &ConvexDomain,
    z: &CVec,
    w: &CVec,
    degree: usize,
    budget: usize,
) -> Result<LempertEstimate> {
    estimate_lempert_with(d, z, w, LempertOptions::new(degree, budget))
}

/// Upper bound from certified polynomial discs, lower bound from
/// supporting half-planes.
///
/// Degrees `1..=degree` are run in turn, each bisecting on `t` below the
/// best certified value so far, so the upper bound never increases with
/// the degree.
pub fn estimate_lempert_with(
    d: &ConvexDomain,
    z: &CVec,
    w: &CVec,
    opts: LempertOptions,
) -> Result<LempertEstimate> {
    check_pair(d, z, w)?;
    if opts.degree < 1 {
        return Err(Error::argument("degree must be >= 1"));
    }
    if opts.budget < 1 {
        return Err(Error::argument("budget must be >= 1"));
    }
    let n = d.dim();
    if z == w {
        let mut coeffs = vec![z.clone()];
        coeffs.extend((0..opts.degree).map(|_| CVec::zeros(n)));
        return Ok(LempertEstimate {
            lower: HyperbolicLength::ZERO,
            upper: HyperbolicLength::ZERO,
            witness: AnalyticDisc {
                degree: opts.degree,
                coeffs,
                t: 0.0,
                shift: C64::new(0.0, 0.0),
                turn: unit(),
                margin: -d.max_value(z),
            },
            iterations: 0,
            fallback: false,
            ladder: vec![0.0; opts.degree],
        });
    }
    let lower = halfplane_lower_bound(d, z, w)?;
    // the slice disk fixes the automorphism; its affine disc is admissible
    let sd = slice_disk(d, z, w)?;
    let shift = -sd.center / sd.radius;
    let beta = (unit() - sd.center) / sd.radius;
    let tau = (beta - shift) / (unit() - shift.conj() * beta);
    let turn = tau / tau.norm();
    let t_slice = tau.norm();
    let t_floor = lower.value().tanh();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut iterations = 0;
    let mut best: Option<(AnalyticDisc, Vec<f64>)> = None;
    let mut ladder = Vec::with_capacity(opts.degree);
    let scale = (w - z).norm();

    for degree in 1..=opts.degree {
        let prob = DiscProblem {
            d,
            z,
            w,
            n,
            degree,
            shift,
            turn,
        };
        let m = prob.free_len();
        // warm start: previous best coefficients padded with zeros
        let mut warm = vec![0.0; m];
        if let Some((_, x)) = &best {
            warm[..x.len()].copy_from_slice(x);
        }
        let mut starts = vec![warm.clone()];
        for _ in 0..opts.restarts.min(if m == 0 { 0 } else { opts.restarts }) {
            starts.push((0..m).map(|_| scale * 0.1 * (rng.gen::<f64>() - 0.5)).collect());
        }
        let mut hi = match &best {
            Some((disc, _)) => disc.t,
            None => t_slice,
        };
        let mut hi_x: Option<(Vec<f64>, f64)> = None;
        if best.is_none() {
            // back off from the slice value until the margin is met
            let mut step = 1e-6;
            while hi_x.is_none() && hi < 1.0 {
                hi_x = feasible_at(&prob, hi, &starts, opts.budget, &mut iterations);
                if hi_x.is_none() {
                    hi = (t_slice.atanh() + step).tanh();
                    step *= 4.0;
                }
            }
            if hi_x.is_none() {
                ladder.push(sd.distance);
                continue;
            }
        }
        let mut lo = t_floor.min(hi);
        while hi.atanh() - lo.atanh() > opts.tolerance {
            let mid = 0.5 * (lo + hi);
            let mut local = vec![match &hi_x {
                Some((x, _)) => x.clone(),
                None => warm.clone(),
            }];
            if hi_x.is_none() {
                local.extend(starts.iter().skip(1).cloned());
            }
            match feasible_at(&prob, mid, &local, opts.budget, &mut iterations) {
                Some(found) => {
                    hi = mid;
                    hi_x = Some(found);
                }
                None => lo = mid,
            }
        }
        if let Some((x, margin)) = hi_x {
            let mut disc = prob.disc(&x, hi);
            disc.margin = margin;
            if best.as_ref().map_or(true, |(b, _)| disc.t <= b.t) {
                best = Some((disc, x));
            }
        }
        ladder.push(best.as_ref().map_or(sd.distance, |(b, _)| b.t.atanh()));
    }

    let (witness, upper, fallback) = match best {
        Some((disc, _)) => {
            let up = disc.t.atanh();
            (disc, up, false)
        }
        None => {
            let t = (sd.distance).tanh();
            (AnalyticDisc::affine(z, w, t.max(1e-300)), sd.distance, true)
        }
    };
    if upper < lower.value() - 1e-7 {
        return Err(Error::numerical(format!(
            "inconsistent bounds: upper {upper} < lower {}; feasibility verification bug",
            lower.value()
        )));
    }
    Ok(LempertEstimate {
        lower,
        upper: HyperbolicLength::clamp(upper.max(lower.value())),
        witness,
        iterations,
        fallback,
        ladder,
    })
}

/// Points certified inside and outside a Kobayashi ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSample {
    pub inside: Vec<CVec>,
    pub outside: Vec<CVec>,
    /// Fewer than `count` points of some kind were certified within the
    /// attempt budget.
    pub partial: bool,
}

/// Sample points whose distance bounds place them certainly inside
/// (`upper < r`) or outside (`lower > r`) of `B(z0, r)`.
pub fn kobayashi_ball_sample(
    d: &ConvexDomain,
    z0: &CVec,
    r: f64,
    count: usize,
    seed: u64,
) -> Result<BallSample> {
    if !(r > 0.0) {
        return Err(Error::argument("radius must be positive"));
    }
    if !d.contains(z0) {
        return Err(Error::domain("center must be interior"));
    }
    let dom = crate::domain::DomainSpec::Convex(d.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = d.boundary_distance(z0)?.value;
    // Kobayashi balls of small radius sit inside a Euclidean neighborhood
    // of size about delta * tanh(r); sample there as well as globally
    let local = (4.0 * delta * r.tanh()).max(1e-12);
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    let max_attempts = 200 * count.max(1);
    for attempt in 0..max_attempts {
        if inside.len() >= count && outside.len() >= count {
            break;
        }
        let p = if attempt % 2 == 0 {
            crate::maps::sample_interior(&dom, &mut rng)?
        } else {
            let dir = crate::maps::sample_interior(&crate::domain::DomainSpec::UnitBall { n: d.dim() }, &mut rng)?;
            z0 + &dir.scale_re(local)
        };
        if !d.contains(&p) || &p == z0 {
            continue;
        }
        if inside.len() < count {
            let up = slice_upper_bound(d, z0, &p)?.value();
            if up < r {
                inside.push(p);
                continue;
            }
        }
        if outside.len() < count {
            let lo = halfplane_lower_bound(d, z0, &p)?.value();
            if lo > r {
                outside.push(p);
            }
        }
    }
    let partial = inside.len() < count || outside.len() < count;
    Ok(BallSample {
        inside,
        outside,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::c;

    fn half_ln3() -> f64 {
        0.5 * 3f64.ln()
    }

    #[test]
    fn support_on_ball() {
        let d = ConvexDomain::unit_ball(2);
        let e1 = CVec::from_reals(&[1.0, 0.0]);
        let s = supporting_functional(&d, &e1).unwrap();
        assert!(s.functional.dist(&e1) < 1e-15);
        assert!((s.peak(&e1) - c(1.0, 0.0)).norm() < 1e-15);
        let z = CVec::from_reals(&[0.3, 0.2]);
        let expected = c(1.0, 0.0) / (c(1.0, 0.0) - (c(0.3, 0.0) - c(1.0, 0.0)));
        assert!((s.peak(&z) - expected).norm() < 1e-15);
        assert!(!s.nonunique);
    }

    #[test]
    fn support_on_ellipsoid_and_errors() {
        let d = ConvexDomain::ellipsoid(vec![1.0, 4.0], vec![1, 1]).unwrap();
        let x = CVec::from_reals(&[0.0, 0.5]);
        let s = supporting_functional(&d, &x).unwrap();
        assert!(s.functional.dist(&CVec::from_reals(&[0.0, 1.0])) < 1e-15);
        assert!(matches!(
            supporting_functional(&d, &CVec::from_reals(&[0.0, 0.3])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn nonunique_flag_at_corner() {
        let d = ConvexDomain::unit_ball(2)
            .with_halfspace(CVec::from_reals(&[0.0, 1.0]), 0.6)
            .unwrap();
        let x = CVec::from_reals(&[0.8, 0.6]);
        let s = supporting_functional(&d, &x).unwrap();
        assert!(s.nonunique);
    }

    #[test]
    fn slice_bound_on_ball() {
        let d = ConvexDomain::unit_ball(2);
        let up = slice_upper_bound(&d, &CVec::zeros(2), &CVec::from_reals(&[0.5, 0.0]))
            .unwrap()
            .value();
        assert!(up >= half_ln3() - 1e-12 && up - half_ln3() < 1e-3, "{up}");
        let z = CVec::from_reals(&[0.1, 0.2]);
        assert_eq!(slice_upper_bound(&d, &z, &z).unwrap().value(), 0.0);
    }

    #[test]
    fn halfplane_bound_on_ball() {
        let d = ConvexDomain::unit_ball(2);
        let o = CVec::zeros(2);
        let w = CVec::from_reals(&[0.5, 0.0]);
        let e1 = CVec::from_reals(&[1.0, 0.0]);
        let lo = halfplane_lower_bound_with(&d, &o, &w, &[e1.clone()]).unwrap().value();
        // L = z1 maps into Re < 1; distance from 0 to 1/2 there is 1/2 ln 2
        assert!((lo - 0.5 * 2f64.ln()).abs() < 1e-14);
        assert!(lo > 0.0 && lo <= half_ln3());
        let more = halfplane_lower_bound_with(
            &d,
            &o,
            &w,
            &[e1, CVec::from_reals(&[0.0, 1.0])],
        )
        .unwrap()
        .value();
        assert!(more >= lo);
        assert_eq!(halfplane_lower_bound(&d, &w, &w).unwrap().value(), 0.0);
    }

    #[test]
    fn degree_one_on_ball_is_tight() {
        let d = ConvexDomain::unit_ball(2);
        let est = estimate_lempert(&d, &CVec::zeros(2), &CVec::from_reals(&[0.5, 0.0]), 1, 100)
            .unwrap();
        assert!((est.upper.value() - half_ln3()).abs() < 1e-4, "{est:?}");
        assert!(est.lower.value() <= half_ln3());
        assert!(est.witness.margin > 0.0);
        assert!(
            est.witness
                .interpolation_residual(&CVec::zeros(2), &CVec::from_reals(&[0.5, 0.0]))
                < 1e-12
        );
    }

    #[test]
    fn equal_points() {
        let d = ConvexDomain::unit_ball(2);
        let z = CVec::from_reals(&[0.1, 0.1]);
        let est = estimate_lempert(&d, &z, &z, 3, 10).unwrap();
        assert_eq!(est.upper.value(), 0.0);
        assert_eq!(est.lower.value(), 0.0);
    }

    #[test]
    fn degree_monotone_on_ellipsoid() {
        let d = ConvexDomain::ellipsoid(vec![1.0, 4.0], vec![1, 1]).unwrap();
        let z = CVec::zeros(2);
        let w = CVec::from_reals(&[0.4, 0.2]);
        let e1 = estimate_lempert(&d, &z, &w, 1, 100).unwrap();
        let e6 = estimate_lempert(&d, &z, &w, 6, 100).unwrap();
        assert!(e6.upper.value() <= e1.upper.value() + 1e-9);
        assert!(e6.lower.value() <= e6.upper.value());
        let slice = slice_upper_bound(&d, &z, &w).unwrap().value();
        assert!(slice >= e6.lower.value());
    }
}
