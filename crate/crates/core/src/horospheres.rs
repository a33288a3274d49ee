//! Horospheres: sublevel sets of `k_D(z, w) - k_D(z0, w)` as `w` tends to
//! a boundary point.
//!
//! On the ball and the polydisk with pole at the origin the sets have
//! closed forms; elsewhere membership is decided from the functional
//! evaluated along an approach sequence, with a band of width equal to the
//! observed oscillation where no answer is claimed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cvec::{CVec, C64};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::geometry::{kobayashi_distance, one_minus_abs_sq, one_minus_norm_sq};
use crate::maps::{sample_interior, SelfMap};

/// Default length of the radial approach sequence.
pub const DEFAULT_SEQUENCE_LEN: usize = 40;
/// Oscillation allowed on the tail in `limit` mode.
pub const LIMIT_TOL: f64 = 1e-6;
/// Oscillation allowed on the tail of the `alpha` weights.
pub const ALPHA_TOL: f64 = 1e-8;
/// Coordinates this close to modulus one count as unimodular.
const UNIMODULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SequenceGenerator {
    /// `x_nu = c + (1 - 2^{-nu}) (x - c)`, `nu = 1..=len`, where `c` is the
    /// center of the domain.
    Radial { len: usize },
    Custom { points: Vec<CVec> },
}

impl Default for SequenceGenerator {
    fn default() -> Self {
        SequenceGenerator::Radial {
            len: DEFAULT_SEQUENCE_LEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachSequence {
    pub target: CVec,
    pub generator: SequenceGenerator,
}

fn center_of(d: &DomainSpec) -> Result<CVec> {
    match d {
        DomainSpec::UnitDisk | DomainSpec::UnitBall { .. } | DomainSpec::Polydisk { .. } => {
            Ok(CVec::zeros(d.dim()))
        }
        DomainSpec::EuclideanBall { center, .. } => Ok(center.clone()),
        DomainSpec::Convex(c) => Ok(c.base_point()),
        DomainSpec::HalfPlane { .. } => Err(Error::Unsupported(
            "horospheres need a bounded domain".into(),
        )),
    }
}

impl ApproachSequence {
    pub fn radial(target: CVec, len: usize) -> Self {
        ApproachSequence {
            target,
            generator: SequenceGenerator::Radial { len },
        }
    }

    pub fn len(&self) -> usize {
        match &self.generator {
            SequenceGenerator::Radial { len } => *len,
            SequenceGenerator::Custom { points } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The points of the sequence, checked to be interior.
    pub fn points(&self, d: &DomainSpec) -> Result<Vec<CVec>> {
        self.target.check_dim(d.dim(), "sequence target")?;
        let pts = match &self.generator {
            SequenceGenerator::Radial { len } => {
                if *len > 52 {
                    return Err(Error::argument(
                        "radial sequences longer than 52 are not representable",
                    ));
                }
                let c = center_of(d)?;
                let v = &self.target - &c;
                (1..=*len)
                    .map(|nu| &c + &v.scale_re(1.0 - 0.5f64.powi(nu as i32)))
                    .collect()
            }
            SequenceGenerator::Custom { points } => points.clone(),
        };
        if pts.len() < 4 {
            return Err(Error::argument("approach sequence needs at least 4 points"));
        }
        for p in &pts {
            d.require_interior(p, "sequence point")?;
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitMode {
    Limsup,
    Liminf,
    Limit,
}

/// Tail statistics of `k_D(z, x_nu) - k_D(z0, x_nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoroValue {
    pub value: f64,
    pub limsup: f64,
    pub liminf: f64,
    pub oscillation: f64,
    pub tail_len: usize,
}

/// Evaluate the horosphere functional along `s`; the tail is the last
/// quarter of the sequence.
pub fn horo_functional(
    d: &DomainSpec,
    z: &CVec,
    z0: &CVec,
    s: &ApproachSequence,
    mode: LimitMode,
) -> Result<HoroValue> {
    if !d.has_exact_distance() {
        return Err(Error::Unsupported(
            "horosphere functional needs a closed-form distance".into(),
        ));
    }
    d.require_interior(z, "point")?;
    d.require_interior(z0, "pole")?;
    let pts = s.points(d)?;
    let tail_len = (pts.len() / 4).max(2);
    let bound = kobayashi_distance(d, z0, z)?.value();
    let mut vals = Vec::with_capacity(tail_len);
    for w in &pts[pts.len() - tail_len..] {
        let v = kobayashi_distance(d, z, w)?.value() - kobayashi_distance(d, z0, w)?.value();
        vals.push(v.clamp(-bound, bound));
    }
    let limsup = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let liminf = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let oscillation = limsup - liminf;
    let value = match mode {
        LimitMode::Limsup => limsup,
        LimitMode::Liminf => liminf,
        LimitMode::Limit => {
            if oscillation > LIMIT_TOL {
                return Err(Error::numerical(format!(
                    "limit did not stabilize (oscillation {oscillation:.3e})"
                )));
            }
            *vals.last().unwrap()
        }
    };
    Ok(HoroValue {
        value,
        limsup,
        liminf,
        oscillation,
        tail_len,
    })
}

/// Ellipsoid `|P_x z - (1 - r) x|^2 / r^2 + |z - P_x z|^2 / r < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoroEllipsoid {
    pub center: CVec,
    /// Semi-axis along `x`.
    pub normal_axis: f64,
    /// Semi-axis in the directions orthogonal to `x`.
    pub tangent_axis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallHorosphere {
    pub member: bool,
    pub index: f64,
    pub ellipsoid: HoroEllipsoid,
}

/// `|1 - <z, x>|^2 / (1 - |z|^2)`.
pub fn ball_index(x: &CVec, z: &CVec) -> f64 {
    (C64::new(1.0, 0.0) - z.inner(x)).norm_sqr() / one_minus_norm_sq(z)
}

fn check_sphere(x: &CVec) -> Result<()> {
    if (x.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "horosphere center must lie on the unit sphere (|x| = {})",
            x.norm()
        )));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::argument("horosphere radius R must be positive"));
    }
    Ok(())
}

/// Horosphere of the unit ball with pole at the origin.
pub fn ball_horosphere(x: &CVec, big_r: f64, z: &CVec) -> Result<BallHorosphere> {
    check_sphere(x)?;
    check_radius(big_r)?;
    z.check_dim(x.dim(), "point")?;
    if !(z.norm() < 1.0) {
        return Err(Error::domain("point is not inside the unit ball"));
    }
    let index = ball_index(x, z);
    let r = big_r / (1.0 + big_r);
    Ok(BallHorosphere {
        member: index < big_r,
        index,
        ellipsoid: HoroEllipsoid {
            center: x.scale_re(1.0 - r),
            normal_axis: r,
            tangent_axis: r.sqrt(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolydiskHorospheres {
    pub small_member: bool,
    pub large_member: bool,
    /// `|x_j - z_j|^2 / (1 - |z_j|^2)` for unimodular `x_j`, absent otherwise.
    pub indices: Vec<Option<f64>>,
}

fn unimodular(x: &CVec) -> Result<Vec<bool>> {
    if x.sup_norm() > 1.0 + UNIMODULAR_TOL {
        return Err(Error::domain("center lies outside the closed polydisk"));
    }
    let u: Vec<bool> = x.iter().map(|v| v.norm() > 1.0 - UNIMODULAR_TOL).collect();
    if !u.iter().any(|&b| b) {
        return Err(Error::domain("center has no unimodular coordinate"));
    }
    Ok(u)
}

fn disk_index(x: C64, z: C64) -> f64 {
    (x - z).norm_sqr() / one_minus_abs_sq(z)
}

/// Small (max) and large (min) horospheres of the polydisk, pole at the
/// origin.
pub fn polydisk_horospheres(x: &CVec, big_r: f64, z: &CVec) -> Result<PolydiskHorospheres> {
    check_radius(big_r)?;
    z.check_dim(x.dim(), "point")?;
    if !(z.sup_norm() < 1.0) {
        return Err(Error::domain("point is not inside the polydisk"));
    }
    let u = unimodular(x)?;
    let indices: Vec<Option<f64>> = (0..x.dim())
        .map(|j| u[j].then(|| disk_index(x[j], z[j])))
        .collect();
    let present = indices.iter().flatten();
    let mx = present.clone().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mn = present.cloned().fold(f64::INFINITY, f64::min);
    Ok(PolydiskHorospheres {
        small_member: mx < big_r,
        large_member: mn < big_r,
        indices,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceHorosphere {
    pub member: bool,
    /// Weight `alpha_j` for unimodular coordinates of the limit.
    pub alpha: Vec<Option<f64>>,
    /// Radius `R / alpha_j` of the horocycle factor; absent where the
    /// factor is the whole disk.
    pub factor_radii: Vec<Option<f64>>,
    pub max_index: f64,
}

/// Weights `alpha_j = lim min_h (1 - |x_h|^2) / (1 - |x_j|^2)` of a
/// sequence in the polydisk.
pub fn sequence_weights(s: &ApproachSequence) -> Result<Vec<Option<f64>>> {
    let n = s.target.dim();
    let d = DomainSpec::Polydisk { n };
    let pts = s.points(&d)?;
    let u = unimodular(&s.target)?;
    let tail = &pts[pts.len() - (pts.len() / 4).max(2)..];
    let mut alpha = Vec::with_capacity(n);
    for j in 0..n {
        if !u[j] {
            alpha.push(None);
            continue;
        }
        let vals: Vec<f64> = tail
            .iter()
            .map(|p| {
                let gj = one_minus_abs_sq(p[j]);
                p.iter()
                    .map(|v| one_minus_abs_sq(*v) / gj)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if hi - lo > ALPHA_TOL {
            return Err(Error::numerical(format!(
                "not a horosphere sequence along this tail (alpha_{j} oscillates by {:.3e})",
                hi - lo
            )));
        }
        alpha.push(Some(*vals.last().unwrap()));
    }
    Ok(alpha)
}

/// Sequence horosphere of the polydisk with pole at the origin.
pub fn sequence_horosphere_polydisk(
    s: &ApproachSequence,
    big_r: f64,
    z: &CVec,
) -> Result<SequenceHorosphere> {
    check_radius(big_r)?;
    z.check_dim(s.target.dim(), "point")?;
    if !(z.sup_norm() < 1.0) {
        return Err(Error::domain("point is not inside the polydisk"));
    }
    let alpha = sequence_weights(s)?;
    let mut max_index = f64::NEG_INFINITY;
    for (j, a) in alpha.iter().enumerate() {
        if let Some(a) = a {
            max_index = max_index.max(a * disk_index(s.target[j], z[j]));
        }
    }
    let factor_radii = alpha.iter().map(|a| a.map(|a| big_r / a)).collect();
    Ok(SequenceHorosphere {
        member: max_index < big_r,
        alpha,
        factor_radii,
        max_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HoroKind {
    Small,
    Large,
    Sequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorosphereSpec {
    pub kind: HoroKind,
    pub center: CVec,
    pub pole: CVec,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceGenerator>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
    /// Within the numerical oscillation of the threshold.
    Band,
}

/// Membership verdict with margin `1/2 log R - value` (positive inside).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipTest {
    pub membership: Membership,
    pub margin: f64,
}

impl HorosphereSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn with_kind(&self, kind: HoroKind) -> Self {
        HorosphereSpec {
            kind,
            ..self.clone()
        }
    }

    pub fn approach(&self) -> ApproachSequence {
        ApproachSequence {
            target: self.center.clone(),
            generator: self.sequence.clone().unwrap_or_default(),
        }
    }

    pub fn validate(&self, d: &DomainSpec) -> Result<()> {
        check_radius(self.radius)?;
        self.center.check_dim(d.dim(), "center")?;
        d.require_interior(&self.pole, "pole")?;
        let on_boundary = match d {
            DomainSpec::UnitDisk | DomainSpec::UnitBall { .. } => {
                (self.center.norm() - 1.0).abs() <= UNIMODULAR_TOL
            }
            DomainSpec::Polydisk { .. } => unimodular(&self.center).is_ok(),
            DomainSpec::EuclideanBall { center, radius } => {
                (self.center.dist(center) - radius).abs() <= UNIMODULAR_TOL * radius
            }
            _ => {
                return Err(Error::Unsupported(
                    "horospheres are available on disk, ball, polydisk and Euclidean ball".into(),
                ))
            }
        };
        if !on_boundary {
            return Err(Error::domain("horosphere center must be a boundary point"));
        }
        if self.kind == HoroKind::Sequence && !matches!(d, DomainSpec::UnitDisk | DomainSpec::UnitBall { .. })
            && self.sequence.is_none()
        {
            return Err(Error::argument("sequence horospheres need an approach sequence"));
        }
        Ok(())
    }

    /// Decide whether `z` lies in the horosphere.
    pub fn test(&self, d: &DomainSpec, z: &CVec) -> Result<MembershipTest> {
        d.require_interior(z, "point")?;
        let half_log_r = 0.5 * self.radius.ln();
        let exact = |idx: f64| MembershipTest {
            membership: if idx < self.radius {
                Membership::In
            } else {
                Membership::Out
            },
            margin: half_log_r - 0.5 * idx.ln(),
        };
        let pole_at_origin = self.pole.norm() == 0.0;
        match d {
            // small, large and sequence horospheres coincide on the ball
            DomainSpec::UnitDisk | DomainSpec::UnitBall { .. } => {
                let idx = ball_index(&self.center, z) / ball_index(&self.center, &self.pole);
                return Ok(exact(idx));
            }
            DomainSpec::Polydisk { .. } if pole_at_origin => {
                let idx = match self.kind {
                    HoroKind::Sequence => {
                        sequence_horosphere_polydisk(&self.approach(), self.radius, z)?.max_index
                    }
                    kind => {
                        let p = polydisk_horospheres(&self.center, self.radius, z)?;
                        let vals = p.indices.iter().flatten().cloned();
                        if kind == HoroKind::Small {
                            vals.fold(f64::NEG_INFINITY, f64::max)
                        } else {
                            vals.fold(f64::INFINITY, f64::min)
                        }
                    }
                };
                return Ok(exact(idx));
            }
            _ => {}
        }
        let mode = match self.kind {
            HoroKind::Small => LimitMode::Limsup,
            HoroKind::Large => LimitMode::Liminf,
            HoroKind::Sequence => LimitMode::Limit,
        };
        let v = horo_functional(d, z, &self.pole, &self.approach(), mode)?;
        let margin = half_log_r - v.value;
        let membership = if margin.abs() <= v.oscillation {
            Membership::Band
        } else if margin > 0.0 {
            Membership::In
        } else {
            Membership::Out
        };
        Ok(MembershipTest { membership, margin })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub violations: usize,
    /// Smallest margin of an image point in the target horosphere.
    pub worst_margin: f64,
    pub samples: usize,
}

/// Margin below which an image point counts as a violation.
const INVARIANCE_SLACK: f64 = 1e-9;

/// Sample points of the horosphere, map them, and test membership of the
/// images: small into small on the disk, small into large elsewhere,
/// sequence into sequence.
pub fn invariance_check(
    m: &SelfMap,
    h: &HorosphereSpec,
    samples: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    let d = &m.domain;
    h.validate(d)?;
    let target = match (h.kind, d) {
        (HoroKind::Small, DomainSpec::UnitDisk) => h.clone(),
        (HoroKind::Small, _) => h.with_kind(HoroKind::Large),
        _ => h.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let max_attempts = 1000 * samples.max(1);
    for _ in 0..max_attempts {
        if found == samples {
            break;
        }
        let z = sample_interior(d, &mut rng)?;
        if h.test(d, &z)?.membership != Membership::In {
            continue;
        }
        found += 1;
        let w = m.eval(&z);
        if !d.contains(&w) {
            violations += 1;
            worst = f64::NEG_INFINITY;
            continue;
        }
        let t = target.test(d, &w)?;
        worst = worst.min(t.margin);
        if t.margin < -INVARIANCE_SLACK {
            violations += 1;
        }
    }
    if found < samples / 10 || found == 0 {
        return Err(Error::numerical(format!(
            "horosphere sampling found only {found} of {samples} points"
        )));
    }
    Ok(InvarianceReport {
        violations,
        worst_margin: worst,
        samples: found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::c;
    use crate::maps::{Component, MapSpec};

    fn third() -> f64 {
        0.5 * (1.0f64 / 3.0).ln()
    }

    #[test]
    fn ball_functional_matches_index() {
        let d = DomainSpec::UnitBall { n: 2 };
        let e1 = CVec::basis(2, 0);
        let s = ApproachSequence::radial(e1.clone(), 40);
        let z = CVec::from_reals(&[0.5, 0.0]);
        let v = horo_functional(&d, &z, &CVec::zeros(2), &s, LimitMode::Limit).unwrap();
        assert!((v.value - third()).abs() < 1e-6, "{v:?}");
        let z = CVec(vec![c(0.2, 0.3), c(-0.1, 0.4)]);
        let v = horo_functional(&d, &z, &CVec::zeros(2), &s, LimitMode::Limit).unwrap();
        assert!((v.value - 0.5 * ball_index(&e1, &z).ln()).abs() < 1e-6);
        let v = horo_functional(&d, &z, &z, &s, LimitMode::Limit).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn polydisk_functional_matches_max_formula() {
        let d = DomainSpec::Polydisk { n: 2 };
        let s = ApproachSequence::radial(CVec::from_reals(&[1.0, 0.0]), 40);
        let z = CVec::from_reals(&[0.5, 0.0]);
        let v = horo_functional(&d, &z, &CVec::zeros(2), &s, LimitMode::Limsup).unwrap();
        assert!((v.value - third()).abs() < 1e-6);
    }

    #[test]
    fn ball_formula_examples() {
        let e1 = CVec::basis(2, 0);
        let h = ball_horosphere(&e1, 1.0, &CVec::from_reals(&[0.5, 0.0])).unwrap();
        assert!((h.index - 1.0 / 3.0).abs() < 1e-15 && h.member);
        let o = ball_horosphere(&e1, 1.0, &CVec::zeros(2)).unwrap();
        assert_eq!(o.index, 1.0);
        assert!(!o.member);
        assert!(ball_horosphere(&e1, 1.0 + 1e-12, &CVec::zeros(2)).unwrap().member);
        let disk = ball_horosphere(&CVec::basis(1, 0), 1.0, &CVec::zeros(1)).unwrap();
        assert_eq!(disk.ellipsoid.normal_axis, 0.5);
        assert_eq!(disk.ellipsoid.center[0], c(0.5, 0.0));
        assert!(matches!(
            ball_horosphere(&CVec::from_reals(&[0.5, 0.0]), 1.0, &CVec::zeros(2)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ball_ellipsoid_agrees_with_index() {
        let x = CVec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let z = sample_interior(&DomainSpec::UnitBall { n: 2 }, &mut rng).unwrap();
            let h = ball_horosphere(&x, 0.7, &z).unwrap();
            let e = &h.ellipsoid;
            let along = z.inner(&x);
            let perp = &z - &x.scale(along);
            let q = (along - C64::new(1.0 - e.normal_axis, 0.0)).norm_sqr() / e.normal_axis.powi(2)
                + perp.norm_sqr() / e.tangent_axis.powi(2);
            if (q - 1.0).abs() > 1e-9 {
                assert_eq!(q < 1.0, h.member);
            }
        }
    }

    #[test]
    fn polydisk_formula_examples() {
        let p = polydisk_horospheres(
            &CVec::from_reals(&[1.0, 1.0]),
            1.0,
            &CVec::from_reals(&[0.5, 0.0]),
        )
        .unwrap();
        assert!((p.indices[0].unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.indices[1], Some(1.0));
        assert!(!p.small_member && p.large_member);
        let q = polydisk_horospheres(&CVec::from_reals(&[1.0, 0.3]), 1.0, &CVec::from_reals(&[0.5, 0.9]))
            .unwrap();
        assert_eq!(q.indices[1], None);
        assert!(q.small_member && q.large_member);
        assert!(polydisk_horospheres(&CVec::from_reals(&[0.5, 0.3]), 1.0, &CVec::zeros(2)).is_err());
    }

    #[test]
    fn sequence_examples() {
        let s = ApproachSequence::radial(CVec::from_reals(&[1.0, 0.0]), 40);
        let g = sequence_horosphere_polydisk(&s, 1.0, &CVec::from_reals(&[0.5, 0.95])).unwrap();
        assert_eq!(g.alpha, vec![Some(1.0), None]);
        assert!(g.member);
        let s = ApproachSequence::radial(CVec::from_reals(&[1.0, 1.0]), 40);
        let g = sequence_horosphere_polydisk(&s, 1.0, &CVec::from_reals(&[0.5, 0.0])).unwrap();
        assert_eq!(g.alpha, vec![Some(1.0), Some(1.0)]);
        assert!(!g.member);
        let g = sequence_horosphere_polydisk(&s, 1.0 + 1e-9, &CVec::zeros(2)).unwrap();
        assert!(g.member);
    }

    #[test]
    fn oscillating_weights_rejected() {
        // the second coordinate alternates between two approach rates
        let pts: Vec<CVec> = (1..=40)
            .map(|k| {
                let t = 1.0 - 0.5f64.powi(k);
                let u = if k % 2 == 0 { t } else { 1.0 - 0.5f64.powi(k + 1) };
                CVec::from_reals(&[t, u])
            })
            .collect();
        let s = ApproachSequence {
            target: CVec::from_reals(&[1.0, 1.0]),
            generator: SequenceGenerator::Custom { points: pts },
        };
        assert!(matches!(sequence_weights(&s), Err(Error::Numerical(_))));
    }

    #[test]
    fn spec_json() {
        let h = HorosphereSpec::from_json(
            r#"{"kind":"sequence","center":[[1,0],[0,0]],"pole":[[0,0],[0,0]],"R":1.0,"sequence":{"type":"radial","len":40}}"#,
        )
        .unwrap();
        assert_eq!(h.kind, HoroKind::Sequence);
        assert_eq!(h.approach().len(), 40);
    }

    #[test]
    fn wolff_invariance_on_disk() {
        let m = SelfMap::new(
            MapSpec::mobius(c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0)),
            DomainSpec::UnitDisk,
        )
        .unwrap();
        for r in [0.5, 1.0, 2.0] {
            let h = HorosphereSpec {
                kind: HoroKind::Small,
                center: CVec::from_reals(&[1.0]),
                pole: CVec::zeros(1),
                radius: r,
                sequence: None,
            };
            let rep = invariance_check(&m, &h, 500, 1).unwrap();
            assert_eq!(rep.violations, 0);
            assert_eq!(rep.samples, 500);
        }
        let id = SelfMap::new(MapSpec::Identity, DomainSpec::UnitDisk).unwrap();
        let h = HorosphereSpec {
            kind: HoroKind::Small,
            center: CVec::scalar(c(0.0, 1.0)),
            pole: CVec::zeros(1),
            radius: 1.0,
            sequence: None,
        };
        assert_eq!(invariance_check(&id, &h, 200, 2).unwrap().violations, 0);
    }

    #[test]
    fn sequence_invariance_on_bidisk() {
        let f = MapSpec::Product {
            components: vec![
                Component::new(MapSpec::mobius(c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0))),
                Component::new(MapSpec::Identity),
            ],
        };
        let m = SelfMap::new(f, DomainSpec::Polydisk { n: 2 }).unwrap();
        let h = HorosphereSpec {
            kind: HoroKind::Sequence,
            center: CVec::from_reals(&[1.0, 0.0]),
            pole: CVec::zeros(2),
            radius: 1.0,
            sequence: Some(SequenceGenerator::default()),
        };
        assert_eq!(invariance_check(&m, &h, 300, 4).unwrap().violations, 0);
    }

    #[test]
    fn functional_membership_off_origin_pole() {
        // pole away from the origin on the polydisk goes through the functional
        let d = DomainSpec::Polydisk { n: 2 };
        let h = HorosphereSpec {
            kind: HoroKind::Small,
            center: CVec::from_reals(&[1.0, 0.0]),
            pole: CVec::from_reals(&[0.2, 0.1]),
            radius: 1.0,
            sequence: None,
        };
        let t = h.test(&d, &CVec::from_reals(&[0.9, 0.0])).unwrap();
        assert_eq!(t.membership, Membership::In);
        let t = h.test(&d, &CVec::from_reals(&[-0.9, 0.0])).unwrap();
        assert_eq!(t.membership, Membership::Out);
    }
}
