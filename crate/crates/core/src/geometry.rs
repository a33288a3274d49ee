//! Exact invariant distances, automorphisms, Kobayashi balls and geodesics
//! on the model domains, plus boundary-distance estimates.
//!
//! Lengths use the curvature `-4` normalization throughout, so
//! `k(0, r) = 1/2 log((1 + r) / (1 - r)) = atanh(r)` on the unit disk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::convex::BoundaryDistance;
use crate::cvec::{CVec, TangentVector, C64};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};

/// Default slack for closed-form identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Default slack for geometric envelope comparisons.
pub const ENVELOPE_TOL: f64 = 1e-6;

/// A nonnegative hyperbolic length in natural-log units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HyperbolicLength(f64);

impl HyperbolicLength {
    pub const ZERO: HyperbolicLength = HyperbolicLength(0.0);

    pub fn new(v: f64) -> Result<Self> {
        if !(v >= 0.0) {
            return Err(Error::numerical(format!("negative or NaN length {v}")));
        }
        Ok(HyperbolicLength(v))
    }

    pub(crate) fn clamp(v: f64) -> Self {
        HyperbolicLength(v.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<HyperbolicLength> for f64 {
    fn from(h: HyperbolicLength) -> f64 {
        h.0
    }
}

/// `1 - |z|^2` without cancellation for `|z|` close to 1.
pub(crate) fn one_minus_abs_sq(z: C64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

pub(crate) fn one_minus_norm_sq(z: &CVec) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// `1/2 log((1+m)/(1-m))` given `m` and `1 - m^2` computed independently.
fn half_log_ratio(m: f64, one_minus_m2: f64) -> f64 {
    (m.ln_1p() - 0.5 * one_minus_m2.ln()).max(0.0)
}

/// Poincaré distance on the unit disk; inputs assumed interior.
pub(crate) fn disk_dist(a: C64, b: C64) -> f64 {
    if a == b {
        return 0.0;
    }
    let den = (C64::new(1.0, 0.0) - a.conj() * b).norm();
    let m = ((a - b).norm() / den).min(1.0);
    let omm = one_minus_abs_sq(a) * one_minus_abs_sq(b) / (den * den);
    half_log_ratio(m, omm)
}

/// Kobayashi distance of the unit ball; inputs assumed interior.
pub(crate) fn ball_dist(z: &CVec, w: &CVec) -> f64 {
    if z == w {
        return 0.0;
    }
    let g = gamma(z, w);
    let den = (C64::new(1.0, 0.0) - w.inner(z)).norm();
    let m = g.norm().min(1.0);
    let omm = one_minus_norm_sq(z) * one_minus_norm_sq(w) / (den * den);
    half_log_ratio(m, omm)
}

fn polydisk_dist(z: &CVec, w: &CVec) -> f64 {
    z.iter()
        .zip(w.iter())
        .map(|(a, b)| disk_dist(*a, *b))
        .fold(0.0, f64::max)
}

/// Distance in the right half-plane `Re mu > 0`.
fn right_halfplane_dist(m1: C64, m2: C64) -> f64 {
    if m1 == m2 {
        return 0.0;
    }
    let den = (m1 + m2.conj()).norm();
    let m = ((m1 - m2).norm() / den).min(1.0);
    let omm = 4.0 * m1.re * m2.re / (den * den);
    half_log_ratio(m, omm)
}

fn require_disk_point(z: C64, what: &str) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::domain(format!("{what} = {z} is not in the unit disk")));
    }
    Ok(())
}

fn key(z: &[C64]) -> Vec<(f64, f64)> {
    z.iter().map(|c| (c.re, c.im)).collect()
}

/// Poincaré distance `k(z1, z2)` on the unit disk.
pub fn poincare_distance(z1: C64, z2: C64) -> Result<HyperbolicLength> {
    require_disk_point(z1, "first point")?;
    require_disk_point(z2, "second point")?;
    let (a, b) = if key(&[z2]) < key(&[z1]) { (z2, z1) } else { (z1, z2) };
    Ok(HyperbolicLength::clamp(disk_dist(a, b)))
}

/// Poincaré norm `|v| / (1 - |z|^2)` of a tangent vector of the disk.
pub fn poincare_metric_norm(t: &TangentVector) -> Result<f64> {
    t.base.check_dim(1, "tangent base")?;
    let z = t.base[0];
    require_disk_point(z, "tangent base")?;
    Ok(t.direction[0].norm() / one_minus_abs_sq(z))
}

/// Closed-form Kobayashi distance on the exact model domains.
///
/// Defining-function domains are served by [`crate::lempert`].
pub fn kobayashi_distance(d: &DomainSpec, z: &CVec, w: &CVec) -> Result<HyperbolicLength> {
    if let DomainSpec::Convex(_) = d {
        return Err(Error::Unsupported(
            "no closed form on defining-function domains; use lempert::estimate_lempert"
                .into(),
        ));
    }
    d.require_interior(z, "first point")?;
    d.require_interior(w, "second point")?;
    // evaluate on a canonical order so symmetry is exact in floating point
    let (z, w) = if key(&w.0) < key(&z.0) { (w, z) } else { (z, w) };
    let v = match d {
        DomainSpec::UnitDisk => disk_dist(z[0], w[0]),
        DomainSpec::UnitBall { .. } => ball_dist(z, w),
        DomainSpec::Polydisk { .. } => polydisk_dist(z, w),
        DomainSpec::EuclideanBall { center, radius } => {
            let zz = (z - center).scale_re(1.0 / radius);
            let ww = (w - center).scale_re(1.0 / radius);
            ball_dist(&zz, &ww)
        }
        DomainSpec::HalfPlane { functional, offset } => {
            // biholomorphic to {Re lambda < offset} x C^(n-1); the C factor
            // contributes nothing, so only the projection matters
            let m1 = C64::new(*offset, 0.0) - z.inner(functional);
            let m2 = C64::new(*offset, 0.0) - w.inner(functional);
            right_halfplane_dist(m1, m2)
        }
        DomainSpec::Convex(_) => unreachable!(),
    };
    Ok(HyperbolicLength::clamp(v))
}

/// Disk automorphism `e^{i theta} (z - pole) / (1 - conj(pole) z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskAutomorphism {
    pub theta: f64,
    pub pole: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutomorphismKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: AutomorphismKind,
    /// Fixed points in the closed disk; empty for the identity.
    pub fixed_points: Vec<C64>,
}

impl DiskAutomorphism {
    pub fn new(theta: f64, pole: C64) -> Result<Self> {
        require_disk_point(pole, "automorphism pole")?;
        Ok(Self { theta, pole })
    }

    pub fn rotation(theta: f64) -> Self {
        Self {
            theta,
            pole: C64::new(0.0, 0.0),
        }
    }

    pub fn apply(&self, z: C64) -> C64 {
        let e = C64::from_polar(1.0, self.theta);
        e * (z - self.pole) / (C64::new(1.0, 0.0) - self.pole.conj() * z)
    }

    /// Coefficients `(a, b, c, d)` of `(a z + b) / (c z + d)`.
    pub fn coefficients(&self) -> [C64; 4] {
        let e = C64::from_polar(1.0, self.theta);
        [e, -e * self.pole, -self.pole.conj(), C64::new(1.0, 0.0)]
    }

    pub fn inverse(&self) -> DiskAutomorphism {
        // gamma^{-1}(w) = e^{-i theta}(w + e^{i theta} p) / (1 + conj(p) e^{-i theta} w)
        let e = C64::from_polar(1.0, self.theta);
        DiskAutomorphism {
            theta: -self.theta,
            pole: -e * self.pole,
        }
    }

    /// Classify by the normalized trace and locate the fixed points.
    pub fn classify(&self) -> Classification {
        let one = C64::new(1.0, 0.0);
        let e = C64::from_polar(1.0, self.theta);
        let p = self.pole;
        let is_rot_identity = (e - one).norm() < 1e-15;
        if p.norm() < 1e-300 {
            return if is_rot_identity {
                Classification {
                    kind: AutomorphismKind::Identity,
                    fixed_points: vec![],
                }
            } else {
                Classification {
                    kind: AutomorphismKind::Elliptic,
                    fixed_points: vec![C64::new(0.0, 0.0)],
                }
            };
        }
        // conj(p) z^2 + (e - 1) z - e p = 0
        let a = p.conj();
        let b = e - one;
        let cc = -e * p;
        let disc = b * b - 4.0 * a * cc;
        let sq = disc.sqrt();
        let r1 = (-b + sq) / (2.0 * a);
        let r2 = (-b - sq) / (2.0 * a);
        let trace = 2.0 * (self.theta / 2.0).cos().abs() / one_minus_abs_sq(p).sqrt();
        let gap = trace - 2.0;
        if gap.abs() < 1e-12 {
            let fp = -b / (2.0 * a);
            let fp = fp / fp.norm();
            Classification {
                kind: AutomorphismKind::Parabolic,
                fixed_points: vec![fp],
            }
        } else if gap > 0.0 {
            Classification {
                kind: AutomorphismKind::Hyperbolic,
                fixed_points: vec![r1 / r1.norm(), r2 / r2.norm()],
            }
        } else {
            let inside = if r1.norm() < r2.norm() { r1 } else { r2 };
            Classification {
                kind: AutomorphismKind::Elliptic,
                fixed_points: vec![inside],
            }
        }
    }
}

/// Ball automorphism `gamma_z` swapping `z` and the origin, without
/// interior checks.
pub(crate) fn gamma(z: &CVec, w: &CVec) -> CVec {
    let zz = z.norm_sqr();
    if zz == 0.0 {
        return w.clone();
    }
    let wz = w.inner(z);
    let proj = z.scale(wz / zz);
    let s = one_minus_norm_sq(z).sqrt();
    let num = &(z - &proj) - &(w - &proj).scale_re(s);
    num.scale(C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - wz))
}

/// Involutive automorphism of `B^n` with `gamma_z(z) = O`.
pub fn ball_automorphism_apply(z: &CVec, w: &CVec) -> Result<CVec> {
    w.check_dim(z.dim(), "argument")?;
    if !(z.norm_sqr() < 1.0) || !(w.norm_sqr() < 1.0) {
        return Err(Error::domain("ball automorphism needs points of the open unit ball"));
    }
    Ok(gamma(z, w))
}

/// Euclidean center and radius of the Kobayashi ball `B(z0, r)` of the disk.
pub fn kobayashi_ball_disk_params(z0: C64, r: f64) -> Result<(C64, f64)> {
    require_disk_point(z0, "ball center")?;
    if !(r > 0.0) {
        return Err(Error::argument("ball radius must be positive"));
    }
    let t = r.tanh();
    let a2 = z0.norm_sqr();
    let den = 1.0 - t * t * a2;
    let center = z0 * ((1.0 - t * t) / den);
    let radius = one_minus_abs_sq(z0) * t / den;
    Ok((center, radius))
}

/// Point at hyperbolic distance `|t|` from 0 along the ray of angle `theta`.
pub fn geodesic_point(theta: f64, t: f64) -> C64 {
    C64::from_polar(t.tanh(), theta)
}

/// Euclidean distance to the boundary; certified bracket for convex domains.
pub fn boundary_distance(d: &DomainSpec, z: &CVec) -> Result<BoundaryDistance> {
    if let DomainSpec::Convex(c) = d {
        return c.boundary_distance(z);
    }
    d.require_interior(z, "point")?;
    let v = match d {
        DomainSpec::UnitDisk => 1.0 - z[0].norm(),
        DomainSpec::UnitBall { .. } => 1.0 - z.norm(),
        DomainSpec::Polydisk { .. } => 1.0 - z.sup_norm(),
        DomainSpec::EuclideanBall { center, radius } => radius - z.dist(center),
        DomainSpec::HalfPlane { functional, offset } => {
            (offset - z.inner(functional).re) / functional.norm()
        }
        DomainSpec::Convex(_) => unreachable!(),
    };
    Ok(BoundaryDistance::exact(v))
}

/// `(1/2 log rho - 1/2 log delta, 1/2 log(2 rho) - 1/2 log delta)` for the
/// Euclidean ball of radius `rho` about the origin.
pub fn ball_log_bounds(rho: f64, z: &CVec) -> Result<(f64, f64)> {
    if !(rho > 0.0) {
        return Err(Error::argument("radius must be positive"));
    }
    let delta = rho - z.norm();
    if !(delta > 0.0) {
        return Err(Error::domain("point outside the ball"));
    }
    let h = 0.5 * delta.ln();
    Ok((0.5 * rho.ln() - h, 0.5 * (2.0 * rho).ln() - h))
}

/// Empirical constants `c2 <= k(z0, z) + 1/2 log delta(z) <= c1` on a
/// sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimateConstants {
    pub c1: f64,
    pub c2: f64,
    pub radius: f64,
    pub empirical: bool,
}

impl BoundaryEstimateConstants {
    /// Check the sandwich at one point, with slack.
    pub fn sandwiches(&self, k: f64, delta: f64, tol: f64) -> bool {
        let h = -0.5 * delta.ln();
        self.c2 + h <= k + tol && k <= self.c1 + h + tol
    }
}

pub fn fit_boundary_constants(
    d: &DomainSpec,
    z0: &CVec,
    samples: &[CVec],
) -> Result<BoundaryEstimateConstants> {
    let radius = match d {
        DomainSpec::UnitBall { .. } | DomainSpec::UnitDisk => 1.0,
        DomainSpec::EuclideanBall { radius, .. } => *radius,
        _ => {
            return Err(Error::Unsupported(
                "boundary constants are fitted on balls only".into(),
            ))
        }
    };
    if samples.len() < 2 {
        return Err(Error::argument("need at least 2 samples"));
    }
    let mut c1 = f64::NEG_INFINITY;
    let mut c2 = f64::INFINITY;
    for z in samples {
        let k = kobayashi_distance(d, z0, z)?.value();
        let delta = boundary_distance(d, z)?.value;
        let s = k + 0.5 * delta.ln();
        c1 = c1.max(s);
        c2 = c2.min(s);
    }
    Ok(BoundaryEstimateConstants {
        c1,
        c2,
        radius,
        empirical: true,
    })
}

/// Boundary point of the Euclidean disk `(center, radius)` at angle `2 pi k / n`.
pub fn circle_point(center: C64, radius: f64, k: usize, n: usize) -> C64 {
    center + C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::c;

    fn half_ln3() -> f64 {
        0.5 * 3f64.ln()
    }

    #[test]
    fn radial_disk_distance() {
        let k = poincare_distance(c(0.0, 0.0), c(0.5, 0.0)).unwrap().value();
        assert!((k - half_ln3()).abs() < 1e-15);
        assert_eq!(poincare_distance(c(0.2, 0.3), c(0.2, 0.3)).unwrap().value(), 0.0);
    }

    #[test]
    fn disk_distance_conjugated_to_origin() {
        // move 0.3 to 0 with an automorphism, then use the radial formula
        let a = DiskAutomorphism::new(0.0, c(0.3, 0.0)).unwrap();
        let eta = a.apply(c(0.0, 0.3));
        assert!(a.apply(c(0.3, 0.0)).norm() < 1e-16);
        let r = eta.norm();
        let expected = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
        let k = poincare_distance(c(0.3, 0.0), c(0.0, 0.3)).unwrap().value();
        assert!((k - expected).abs() < 1e-14);
    }

    #[test]
    fn outside_disk_is_domain_error() {
        assert!(matches!(
            poincare_distance(c(1.0, 0.0), c(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn metric_norm() {
        let t = |z: f64, v: C64| TangentVector::new(CVec::from_reals(&[z]), CVec::scalar(v)).unwrap();
        assert_eq!(poincare_metric_norm(&t(0.0, c(1.0, 0.0))).unwrap(), 1.0);
        assert!((poincare_metric_norm(&t(0.5, c(1.0, 0.0))).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((poincare_metric_norm(&t(0.5, c(0.0, 2.0))).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!(poincare_metric_norm(&t(1.5, c(1.0, 0.0))).is_err());
    }

    #[test]
    fn closed_form_domains() {
        let ball = DomainSpec::UnitBall { n: 2 };
        let k = kobayashi_distance(&ball, &CVec::zeros(2), &CVec::from_reals(&[0.5, 0.0]))
            .unwrap()
            .value();
        assert!((k - half_ln3()).abs() < 1e-14);

        let poly = DomainSpec::Polydisk { n: 2 };
        let k = kobayashi_distance(&poly, &CVec::zeros(2), &CVec::from_reals(&[0.5, 1f64.tanh()]))
            .unwrap()
            .value();
        assert!((k - 1.0).abs() < 1e-14);

        let eb = DomainSpec::EuclideanBall {
            center: CVec::zeros(1),
            radius: 2.0,
        };
        let k = kobayashi_distance(&eb, &CVec::zeros(1), &CVec::from_reals(&[1.0]))
            .unwrap()
            .value();
        assert!((k - half_ln3()).abs() < 1e-14);
    }

    #[test]
    fn halfplane_matches_cayley_image() {
        // Re z < 1 is mapped onto the disk by z -> z / (2 - z)
        let h = DomainSpec::HalfPlane {
            functional: CVec::from_reals(&[1.0]),
            offset: 1.0,
        };
        let a = c(0.2, 0.7);
        let b = c(-3.0, -1.0);
        let k = kobayashi_distance(&h, &CVec::scalar(a), &CVec::scalar(b)).unwrap().value();
        let cay = |z: C64| z / (c(2.0, 0.0) - z);
        let kd = poincare_distance(cay(a), cay(b)).unwrap().value();
        assert!((k - kd).abs() < 1e-12, "{k} vs {kd}");
    }

    #[test]
    fn convex_rejected_with_pointer() {
        let d = DomainSpec::Convex(crate::convex::ConvexDomain::unit_ball(2));
        let e = kobayashi_distance(&d, &CVec::zeros(2), &CVec::zeros(2)).unwrap_err();
        assert!(matches!(e, Error::Unsupported(ref m) if m.contains("lempert")));
    }

    #[test]
    fn automorphism_examples() {
        let a = DiskAutomorphism::new(0.0, c(0.5, 0.0)).unwrap();
        assert!(a.apply(c(0.5, 0.0)).norm() < 1e-16);
        assert!((a.apply(c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        let r = DiskAutomorphism::rotation(PI);
        assert!((r.apply(c(0.3, 0.0)) - c(-0.3, 0.0)).norm() < 1e-15);
        let inv = a.inverse();
        let z = c(0.1, -0.4);
        assert!((inv.apply(a.apply(z)) - z).norm() < 1e-15);
    }

    #[test]
    fn classification_examples() {
        let e = DiskAutomorphism::rotation(PI / 3.0).classify();
        assert_eq!(e.kind, AutomorphismKind::Elliptic);
        assert!(e.fixed_points[0].norm() < 1e-15);

        // (z + 1/2) / (1 + z/2)
        let h = DiskAutomorphism::new(0.0, c(-0.5, 0.0)).unwrap();
        assert!((h.apply(c(0.3, 0.0)) - c(0.8 / 1.15, 0.0)).norm() < 1e-15);
        let cl = h.classify();
        assert_eq!(cl.kind, AutomorphismKind::Hyperbolic);
        let mut re: Vec<f64> = cl.fixed_points.iter().map(|p| p.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-14 && (re[1] - 1.0).abs() < 1e-14);

        assert_eq!(
            DiskAutomorphism::rotation(0.0).classify().kind,
            AutomorphismKind::Identity
        );
    }

    #[test]
    fn parabolic_classification() {
        // z -> (1 + (2i - 1) z) / ((1 + 2i) - z), the conjugate of u -> u + 1
        // on the upper half-plane; e^{i theta} = (3 + 4i)/5, pole (1 + 2i)/5
        let aut = DiskAutomorphism::new(4f64.atan2(3.0), c(0.2, 0.4)).unwrap();
        let z = c(0.3, -0.2);
        let direct = (c(1.0, 0.0) + c(-1.0, 2.0) * z) / (c(1.0, 2.0) - z);
        assert!((aut.apply(z) - direct).norm() < 1e-15);
        let cl = aut.classify();
        assert_eq!(cl.kind, AutomorphismKind::Parabolic);
        assert!((cl.fixed_points[0] - c(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn ball_automorphism_identities() {
        let z = CVec::from_reals(&[0.5, 0.0]);
        let w = CVec::from_reals(&[0.25, 0.0]);
        assert!(ball_automorphism_apply(&z, &z).unwrap().norm() < 1e-15);
        assert_eq!(ball_automorphism_apply(&CVec::zeros(2), &w).unwrap(), w);
        let g = ball_automorphism_apply(&z, &w).unwrap();
        let lhs = 1.0 - g.norm_sqr();
        let rhs = 0.75 * 0.9375 / (0.875 * 0.875);
        assert!((lhs - rhs).abs() < 1e-15);
        assert!((rhs - 0.918367).abs() < 1e-6);
        assert!(ball_automorphism_apply(&CVec::from_reals(&[1.0, 0.0]), &w).is_err());
    }

    #[test]
    fn kobayashi_ball_params() {
        let (c0, r0) = kobayashi_ball_disk_params(c(0.5, 0.0), half_ln3()).unwrap();
        assert!((c0 - c(0.4, 0.0)).norm() < 1e-15 && (r0 - 0.4).abs() < 1e-15);
        for k in 0..64 {
            let p = circle_point(c0, r0, k, 64);
            let d = poincare_distance(c(0.5, 0.0), p).unwrap().value();
            assert!((d - half_ln3()).abs() < 1e-10);
        }
        let (c1, r1) = kobayashi_ball_disk_params(c(0.0, 0.0), 0.7).unwrap();
        assert_eq!(c1, c(0.0, 0.0));
        assert!((r1 - 0.7f64.tanh()).abs() < 1e-16);
    }

    #[test]
    fn geodesic_examples() {
        assert!((geodesic_point(0.0, 1.0) - c(0.7615941559557649, 0.0)).norm() < 1e-15);
        assert_eq!(geodesic_point(1.3, 0.0).norm(), 0.0);
        let p = geodesic_point(PI / 2.0, 0.549306);
        assert!((p - c(0.0, 0.5)).norm() < 1e-6);
        let k = poincare_distance(c(0.0, 0.0), p).unwrap().value();
        assert!((k - 0.549306).abs() < 1e-12);
    }

    #[test]
    fn boundary_distances() {
        let b = boundary_distance(&DomainSpec::UnitBall { n: 2 }, &CVec::from_reals(&[0.5, 0.0]))
            .unwrap();
        assert_eq!(b.value, 0.5);
        let p = boundary_distance(
            &DomainSpec::Polydisk { n: 2 },
            &CVec::from_reals(&[0.5, 0.25]),
        )
        .unwrap();
        assert_eq!(p.value, 0.5);
    }

    #[test]
    fn log_bounds() {
        let (lo, hi) = ball_log_bounds(1.0, &CVec::from_reals(&[0.5, 0.0])).unwrap();
        assert!((lo - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((hi - 0.5 * 4f64.ln()).abs() < 1e-15);
        assert!(lo <= half_ln3() && half_ln3() <= hi);
        let (lo, hi) = ball_log_bounds(1.0, &CVec::zeros(2)).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.5 * 2f64.ln()).abs() < 1e-15);
        let z = CVec::from_reals(&[1.9]);
        let (lo, hi) = ball_log_bounds(2.0, &z).unwrap();
        let eb = DomainSpec::EuclideanBall {
            center: CVec::zeros(1),
            radius: 2.0,
        };
        let k = kobayashi_distance(&eb, &CVec::zeros(1), &z).unwrap().value();
        assert!(lo <= k && k <= hi);
    }

    #[test]
    fn boundary_constants() {
        let d = DomainSpec::UnitBall { n: 1 };
        let samples: Vec<CVec> = (1..30)
            .map(|j| CVec::from_reals(&[1.0 - 0.5f64.powi(j)]))
            .collect();
        let fit = fit_boundary_constants(&d, &CVec::zeros(1), &samples).unwrap();
        assert!(fit.c1 <= 0.5 * 2f64.ln() + 1e-12);
        assert!(fit.c2 >= -1e-12);
        assert!(fit.empirical);
        for z in &samples {
            let k = kobayashi_distance(&d, &CVec::zeros(1), z).unwrap().value();
            assert!(fit.sandwiches(k, 1.0 - z.norm(), 1e-12));
        }
        assert!(fit_boundary_constants(&d, &CVec::zeros(1), &samples[..1]).is_err());
    }
}
