//! Bounded convex domains cut out by smooth convex defining functions.
//!
//! A domain is `{ z : rho_i(z) < 0 for all i }` where each `rho_i` is one
//! of the builtin constraint families. Gradients are reported in complex
//! form `g_j = d rho / d conj(z_j)`; the real gradient in `R^{2n}` is `2g`.

use serde::{Deserialize, Serialize};

use crate::cvec::{CVec, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraint {
    /// Complex ellipsoid `sum_j c_j |z_j|^(2 m_j) < 1`.
    Ellipsoid { coeffs: Vec<f64>, exponents: Vec<u32> },
    /// Affine half-space `Re <z, normal> < offset`.
    Halfspace { normal: CVec, offset: f64 },
}

impl Constraint {
    fn dim(&self) -> usize {
        match self {
            Constraint::Ellipsoid { coeffs, .. } => coeffs.len(),
            Constraint::Halfspace { normal, .. } => normal.dim(),
        }
    }

    pub fn value(&self, z: &CVec) -> f64 {
        match self {
            Constraint::Ellipsoid { coeffs, exponents } => {
                let mut s = -1.0;
                for ((c, &m), zj) in coeffs.iter().zip(exponents).zip(z.iter()) {
                    s += c * zj.norm_sqr().powi(m as i32);
                }
                s
            }
            Constraint::Halfspace { normal, offset } => z.inner(normal).re - offset,
        }
    }

    /// Complex gradient `d rho / d conj(z)`.
    pub fn gradient(&self, z: &CVec) -> CVec {
        match self {
            Constraint::Ellipsoid { coeffs, exponents } => CVec(
                coeffs
                    .iter()
                    .zip(exponents)
                    .zip(z.iter())
                    .map(|((c, &m), zj)| {
                        let m = m as i32;
                        zj * (c * m as f64 * zj.norm_sqr().powi(m - 1))
                    })
                    .collect(),
            ),
            Constraint::Halfspace { normal, .. } => normal.scale_re(0.5),
        }
    }

    /// Upper bound for the real Hessian operator norm on the box
    /// `|z_j| <= radii[j]`.
    fn hessian_bound(&self, radii: &[f64]) -> f64 {
        match self {
            Constraint::Ellipsoid { coeffs, exponents } => coeffs
                .iter()
                .zip(exponents)
                .zip(radii)
                .map(|((c, &m), r)| {
                    let m = m as f64;
                    c * 2.0 * m * (2.0 * m - 1.0) * r.powf(2.0 * m - 2.0)
                })
                .fold(0.0, f64::max),
            Constraint::Halfspace { .. } => 0.0,
        }
    }
}

/// A bounded convex domain given by defining functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexDomain {
    pub constraints: Vec<Constraint>,
    /// Declared interior base point; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<CVec>,
    /// Per-coordinate modulus bounds; derived from ellipsoid constraints
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<Vec<f64>>,
}

/// Boundary distance together with a certified bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDistance {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BoundaryDistance {
    pub fn exact(v: f64) -> Self {
        Self {
            value: v,
            lower: v,
            upper: v,
        }
    }
}

impl ConvexDomain {
    pub fn new(constraints: Vec<Constraint>) -> Result<Self> {
        let d = ConvexDomain {
            constraints,
            base: None,
            bbox: None,
        };
        d.validate()?;
        Ok(d)
    }

    /// `sum_j c_j |z_j|^(2 m_j) < 1`.
    pub fn ellipsoid(coeffs: Vec<f64>, exponents: Vec<u32>) -> Result<Self> {
        Self::new(vec![Constraint::Ellipsoid { coeffs, exponents }])
    }

    /// The unit ball of `C^n` written as a defining-function domain.
    pub fn unit_ball(n: usize) -> Self {
        Self::ellipsoid(vec![1.0; n], vec![1; n]).expect("unit ball is valid")
    }

    pub fn with_halfspace(mut self, normal: CVec, offset: f64) -> Result<Self> {
        self.constraints.push(Constraint::Halfspace { normal, offset });
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.constraints.first().map_or(0, Constraint::dim)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::argument("convex domain needs at least one constraint"));
        }
        for c in &self.constraints {
            if c.dim() != n {
                return Err(Error::argument("constraint dimensions disagree"));
            }
            match c {
                Constraint::Ellipsoid { coeffs, exponents } => {
                    if exponents.len() != n {
                        return Err(Error::argument("ellipsoid exponents length mismatch"));
                    }
                    if coeffs.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
                        return Err(Error::argument("ellipsoid coefficients must be >= 0"));
                    }
                    if exponents.iter().any(|&m| m == 0) {
                        return Err(Error::argument("ellipsoid exponents must be >= 1"));
                    }
                }
                Constraint::Halfspace { normal, offset } => {
                    if normal.norm() == 0.0 || !offset.is_finite() {
                        return Err(Error::argument("half-space normal must be nonzero"));
                    }
                }
            }
        }
        self.box_radii()?;
        let base = self.base_point();
        base.check_dim(n, "base point")?;
        if !self.contains(&base) {
            return Err(Error::domain("declared base point is not interior"));
        }
        Ok(())
    }

    pub fn base_point(&self) -> CVec {
        self.base.clone().unwrap_or_else(|| CVec::zeros(self.dim()))
    }

    /// Per-coordinate modulus bound of the domain.
    pub fn box_radii(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut radii = self.bbox.clone().unwrap_or_else(|| vec![f64::INFINITY; n]);
        if radii.len() != n {
            return Err(Error::argument("bbox length mismatch"));
        }
        for c in &self.constraints {
            if let Constraint::Ellipsoid { coeffs, exponents } = c {
                for j in 0..n {
                    if coeffs[j] > 0.0 {
                        let r = coeffs[j].powf(-1.0 / (2.0 * exponents[j] as f64));
                        radii[j] = radii[j].min(r);
                    }
                }
            }
        }
        if radii.iter().any(|r| !r.is_finite()) {
            return Err(Error::argument(
                "convex domain is not bounded by its constraints; supply bbox",
            ));
        }
        Ok(radii)
    }

    pub fn values(&self, z: &CVec) -> Vec<f64> {
        self.constraints.iter().map(|c| c.value(z)).collect()
    }

    pub fn max_value(&self, z: &CVec) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.value(z))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, z: &CVec) -> bool {
        z.dim() == self.dim() && z.is_finite() && self.max_value(z) < 0.0
    }

    /// Distance `t > 0` at which the ray `z + t u` leaves the domain.
    pub fn ray_exit(&self, z: &CVec, u: &CVec) -> Result<f64> {
        exit_along(|p| self.max_value(p), z, u)
    }

    /// Euclidean distance from an interior point to the boundary.
    ///
    /// Half-spaces are exact. Each ellipsoid constraint is handled by
    /// minimizing the ray exit length over unit directions with projected
    /// gradient steps from 8 starting directions. The lower end of the
    /// bracket comes from a second-order Taylor bound of the constraint.
    pub fn boundary_distance(&self, z: &CVec) -> Result<BoundaryDistance> {
        z.check_dim(self.dim(), "point")?;
        if !self.contains(z) {
            return Err(Error::domain("point is not interior to the convex domain"));
        }
        let radii = self.box_radii()?;
        let mut best = BoundaryDistance {
            value: f64::INFINITY,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
        };
        for c in &self.constraints {
            let b = match c {
                Constraint::Halfspace { normal, offset } => {
                    BoundaryDistance::exact((offset - z.inner(normal).re) / normal.norm())
                }
                Constraint::Ellipsoid { .. } => {
                    let upper = min_exit_distance(c, z)?;
                    let rho = c.value(z);
                    let g = 2.0 * c.gradient(z).norm();
                    let m = c.hessian_bound(&radii);
                    let lower = if m > 0.0 {
                        (-g + (g * g - 2.0 * m * rho).sqrt()) / m
                    } else {
                        -rho / g
                    };
                    BoundaryDistance {
                        value: upper,
                        lower: lower.min(upper),
                        upper,
                    }
                }
            };
            best.value = best.value.min(b.value);
            best.lower = best.lower.min(b.lower);
            best.upper = best.upper.min(b.upper);
        }
        Ok(best)
    }

    /// Index of the constraint with the largest value at `z`.
    pub fn most_active(&self, z: &CVec) -> usize {
        let vals = self.values(z);
        let mut best = 0;
        for (i, v) in vals.iter().enumerate() {
            if *v > vals[best] {
                best = i;
            }
        }
        best
    }
}

/// Exit length of a ray from a point where `f < 0`, for convex `f`.
pub(crate) fn exit_along(f: impl Fn(&CVec) -> f64, z: &CVec, u: &CVec) -> Result<f64> {
    let un = u.norm();
    if un == 0.0 {
        return Err(Error::argument("zero ray direction"));
    }
    let at = |t: f64| {
        let p = CVec(z.iter().zip(u.iter()).map(|(a, b)| a + b * (t / un)).collect());
        f(&p)
    };
    if at(0.0) >= 0.0 {
        return Err(Error::domain("ray origin is not interior"));
    }
    let mut hi = 1.0;
    let mut tries = 0;
    while at(hi) < 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::numerical("ray never leaves the domain"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn start_directions(n: usize) -> Vec<CVec> {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut dirs = Vec::new();
    for k in 0..n {
        for s in [one, -one, i, -i] {
            let mut v = CVec::zeros(n);
            v[k] = s;
            dirs.push(v);
        }
    }
    let mut k = 0;
    while dirs.len() < 8 {
        let mut v = CVec::zeros(n);
        let phase = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * (2 * k + 1) as f64);
        v[k % n] = phase;
        dirs.push(v);
        k += 1;
    }
    dirs.truncate(8);
    dirs
}

/// Minimum over unit directions of the exit length through one constraint.
fn min_exit_distance(c: &Constraint, z: &CVec) -> Result<f64> {
    let n = z.dim();
    let exit = |u: &CVec| exit_along(|p| c.value(p), z, u);
    let mut best = f64::INFINITY;
    for start in start_directions(n) {
        let mut u = start;
        let mut t = exit(&u)?;
        let mut step = 0.5;
        for _ in 0..200 {
            // d t / d u = -t grad / (grad . u), real inner products in R^{2n}
            let x = CVec(z.iter().zip(u.iter()).map(|(a, b)| a + b * t).collect());
            let g = c.gradient(&x).scale_re(2.0);
            let gu = g.inner(&u).re;
            if gu <= 0.0 {
                break;
            }
            let dt = g.scale_re(-t / gu);
            let radial = dt.inner(&u).re;
            let tangent = &dt - &u.scale_re(radial);
            let tn = tangent.norm();
            if tn < 1e-14 {
                break;
            }
            let mut improved = false;
            while step > 1e-12 {
                let cand = &u - &tangent.scale_re(step / tn);
                let cand = cand.scale_re(1.0 / cand.norm());
                let tc = exit(&cand)?;
                if tc < t {
                    u = cand;
                    t = tc;
                    step *= 1.5;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.min(t);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipsoid_boundary_distance_at_origin() {
        let d = ConvexDomain::ellipsoid(vec![1.0, 4.0], vec![1, 1]).unwrap();
        let b = d.boundary_distance(&CVec::zeros(2)).unwrap();
        assert!((b.value - 0.5).abs() < 1e-9, "{b:?}");
        assert!(b.lower <= 0.5 + 1e-12 && b.upper >= 0.5 - 1e-9);
    }

    #[test]
    fn ellipsoid_off_center_matches_brute_force() {
        let d = ConvexDomain::ellipsoid(vec![1.0, 4.0], vec![1, 1]).unwrap();
        let z = CVec::from_reals(&[0.3, 0.1]);
        let b = d.boundary_distance(&z).unwrap();
        // brute force over a dense set of real boundary directions in the
        // (Re z1, Re z2) plane plus the complex rotations of each
        let mut brute = f64::INFINITY;
        for k in 0..20000 {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 20000.0;
            let u = CVec(vec![C64::new(a.cos(), 0.0), C64::new(a.sin(), 0.0)]);
            brute = brute.min(d.ray_exit(&z, &u).unwrap());
        }
        assert!(b.value <= brute + 1e-8, "{} vs {}", b.value, brute);
        assert!(b.lower <= b.value);
    }

    #[test]
    fn halfspace_distance_exact() {
        let d = ConvexDomain::unit_ball(2)
            .with_halfspace(CVec::from_reals(&[1.0, 0.0]), 0.5)
            .unwrap();
        let b = d.boundary_distance(&CVec::zeros(2)).unwrap();
        assert!((b.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unbounded_rejected() {
        let d = ConvexDomain::new(vec![Constraint::Halfspace {
            normal: CVec::from_reals(&[1.0]),
            offset: 1.0,
        }]);
        assert!(d.is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"constraints":[{"type":"ellipsoid","coeffs":[1,4],"exponents":[1,1]}]}"#;
        let d: ConvexDomain = serde_json::from_str(s).unwrap();
        d.validate().unwrap();
        let back: ConvexDomain =
            serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(d, back);
    }
}
