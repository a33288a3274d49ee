//! Cubature rules on the unit disk, the unit ball and Euclidean disks.
//!
//! Rules are plain lists of weighted nodes. Radial directions use
//! composite Gauss–Legendre on panels that shrink geometrically toward the
//! boundary; angles use the trapezoid rule, or graded Gauss panels when a
//! kernel is peaked near one boundary point.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cvec::{CVec, C64};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::geometry::{gamma, one_minus_norm_sq};

/// Gauss–Legendre nodes per radial panel.
const PANEL_NODES: usize = 16;
/// Relative change under node doubling tolerated by [`Estimate`].
pub const DOUBLING_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Radial × angular product rule (disk, and ball of dimension 2).
    Tensor,
    /// Halton points mapped to the ball.
    Halton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    /// Approximate total node count.
    pub nodes: usize,
    /// Offset into the Halton sequence; tensor rules ignore it.
    #[serde(default)]
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn tensor(nodes: usize) -> Self {
        QuadratureSpec {
            scheme: Scheme::Tensor,
            nodes,
            seed: 0,
        }
    }

    /// 256 × 256 on the disk, `16^4` product nodes on the ball of `C^2`
    /// and `2^18` Halton nodes in higher dimension.
    pub fn default_for(d: &DomainSpec) -> Self {
        match d {
            DomainSpec::UnitBall { n: 2 } => QuadratureSpec::tensor(1 << 16),
            DomainSpec::UnitBall { n } if *n > 2 => QuadratureSpec {
                scheme: Scheme::Halton,
                nodes: 1 << 18,
                seed: 0,
            },
            _ => QuadratureSpec::tensor(1 << 16),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 64 {
            return Err(Error::argument("quadrature needs at least 64 nodes"));
        }
        Ok(())
    }

    /// The same rule with (roughly) twice the resolution in every direction
    /// of `C^dim`.
    pub fn refined(&self, dim: usize) -> Self {
        let factor = match self.scheme {
            Scheme::Tensor => 1usize << (2 * dim),
            Scheme::Halton => 4,
        };
        QuadratureSpec {
            nodes: self.nodes * factor,
            ..*self
        }
    }
}

/// Weighted nodes; `sum w_i f(x_i)` approximates the integral of `f`.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub points: Vec<CVec>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&CVec) -> f64 + Sync) -> f64 {
        let vals: Vec<f64> = self
            .points
            .par_iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .collect();
        vals.iter().sum()
    }

    pub fn integrate_complex(&self, f: impl Fn(&CVec) -> C64 + Sync) -> C64 {
        let vals: Vec<C64> = self
            .points
            .par_iter()
            .zip(&self.weights)
            .map(|(p, w)| f(p) * w)
            .collect();
        vals.iter().sum()
    }

    /// Push the rule forward under the involution `gamma_a` of the ball,
    /// multiplying weights by the real Jacobian.
    pub fn pushed_forward(&self, a: &CVec) -> Rule {
        let n = a.dim() as i32;
        let oma = one_minus_norm_sq(a);
        let one = C64::new(1.0, 0.0);
        let mut out = Rule::default();
        for (u, w) in self.points.iter().zip(&self.weights) {
            let den = (one - u.inner(a)).norm_sqr();
            out.points.push(gamma(a, u));
            out.weights.push(w * (oma / den).powi(n + 1));
        }
        out
    }

    /// Rule for the ball of radius `s` about `c` from one on the unit ball.
    pub fn affine(&self, c: &CVec, s: f64) -> Rule {
        let n = c.dim() as i32;
        Rule {
            points: self.points.iter().map(|p| c + &p.scale_re(s)).collect(),
            weights: self.weights.iter().map(|w| w * s.powi(2 * n)).collect(),
        }
    }
}

fn gauss_legendre(k: usize) -> Vec<(f64, f64)> {
    let k = NonZeroUsize::new(k.max(1)).expect("positive");
    GaussLegendre::new(k)
        .iter()
        .map(|(x, w)| (*x, *w))
        .collect()
}

/// Composite Gauss–Legendre on `[0, 1]` with panels `[1 - 2^-j, 1 - 2^-(j+1)]`
/// and a last panel ending at 1; returns `(r, weight)`.
fn radial_nodes(per_panel: usize, panels: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(per_panel);
    let mut out = Vec::with_capacity(per_panel * panels);
    for j in 0..panels {
        let a = 1.0 - 0.5f64.powi(j as i32);
        let b = if j + 1 == panels {
            1.0
        } else {
            1.0 - 0.5f64.powi(j as i32 + 1)
        };
        let h = 0.5 * (b - a);
        for &(x, w) in &gl {
            out.push((a + h * (1.0 + x), h * w));
        }
    }
    out
}

/// Trapezoid nodes on the circle.
fn angular_nodes(m: usize) -> Vec<(f64, f64)> {
    let h = TAU / m as f64;
    (0..m).map(|k| (h * k as f64, h)).collect()
}

/// Composite Gauss–Legendre in the angle on panels that halve toward
/// `alpha` until they are narrower than `min_width`.
fn graded_angular_nodes(alpha: f64, min_width: f64, per: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(per);
    let mut offsets = vec![PI];
    while offsets[offsets.len() - 1] > min_width {
        offsets.push(0.5 * offsets[offsets.len() - 1]);
    }
    let mut panels = Vec::with_capacity(2 * offsets.len());
    for w in offsets.windows(2) {
        panels.push((w[1], w[0]));
        panels.push((-w[0], -w[1]));
    }
    let last = offsets[offsets.len() - 1];
    panels.push((-last, last));
    let mut out = Vec::with_capacity(panels.len() * per);
    for (a, b) in panels {
        let h = 0.5 * (b - a);
        for &(x, w) in &gl {
            out.push((alpha + a + h * (1.0 + x), h * w));
        }
    }
    out
}

/// Product rule on the unit disk with `radial` Gauss nodes (in panels of
/// 16) and `angular` trapezoid nodes.
///
/// With `focus = Some(a)` and `a` within 1/4 of the circle, both directions
/// are graded toward the boundary point `a / |a|` down to the scale
/// `1 - |a|`, which resolves kernels peaked at `a` or at `a / |a|`.
pub fn disk_rule(radial: usize, angular: usize, focus: Option<C64>) -> Rule {
    let gap = focus.map_or(1.0, |a| 1.0 - a.norm());
    let (rs, phis) = if gap < 0.25 && gap > 0.0 {
        let levels = (4.0 * PI / gap).log2().ceil() as usize;
        let per_angle = (angular / (2 * levels + 1)).max(8);
        let panels = (radial / PANEL_NODES).max((1.0 / gap).log2().ceil() as usize + 6);
        let per = (radial / panels).max(8);
        let alpha = focus.map_or(0.0, |a| a.arg());
        (
            radial_nodes(per, panels),
            graded_angular_nodes(alpha, 0.25 * gap, per_angle),
        )
    } else {
        let panels = (radial / PANEL_NODES).max(1);
        (
            radial_nodes(radial.div_ceil(panels), panels),
            angular_nodes(angular),
        )
    };
    let mut rule = Rule::default();
    for &(r, wr) in &rs {
        for &(phi, wp) in &phis {
            rule.points.push(CVec::scalar(C64::from_polar(r, phi)));
            rule.weights.push(r * wr * wp);
        }
    }
    rule
}

/// Polar rule on a Euclidean disk (no boundary grading).
pub fn euclidean_disk_rule(center: C64, radius: f64, radial: usize, angular: usize) -> Rule {
    let gl = gauss_legendre(radial);
    let h = TAU / angular as f64;
    let mut rule = Rule::default();
    for &(x, w) in &gl {
        let r = 0.5 * radius * (1.0 + x);
        let wr = 0.5 * radius * w;
        for k in 0..angular {
            let phi = h * k as f64;
            rule.points.push(CVec::scalar(center + C64::from_polar(r, phi)));
            rule.weights.push(r * wr * h);
        }
    }
    rule
}

/// Product rule on the unit ball of `C^2`: `z = rho (sqrt(1-t) e^{i a}, sqrt(t) e^{i b})`
/// with `dV = rho^3 d rho (dt / 2) da db`.
pub fn ball2_rule(k: usize) -> Rule {
    let panels = (k / 8).max(1);
    let rs = radial_nodes(k.div_ceil(panels), panels);
    let ts: Vec<(f64, f64)> = gauss_legendre(k)
        .into_iter()
        .map(|(x, w)| (0.5 * (1.0 + x), 0.5 * w))
        .collect();
    let h = TAU / k as f64;
    let mut rule = Rule::default();
    for &(r, wr) in &rs {
        for &(t, wt) in &ts {
            let (a1, a2) = (r * (1.0 - t).sqrt(), r * t.sqrt());
            for i in 0..k {
                for j in 0..k {
                    rule.points.push(CVec(vec![
                        C64::from_polar(a1, h * i as f64),
                        C64::from_polar(a2, h * j as f64),
                    ]));
                    rule.weights.push(r.powi(3) * wr * 0.5 * wt * h * h);
                }
            }
        }
    }
    rule
}

/// Nodes per direction of the fiber rule in [`ball2_focused_rule`].
const FIBER_NODES: usize = 8;

/// Rule on the unit ball of `C^2` adapted to kernels peaked at `focus`.
///
/// In coordinates `(u1, u2)` with `u1` along `focus`, the ball fibers as
/// `u1` in the disk and `u2` in the disk of radius `sqrt(1 - |u1|^2)`; the
/// `u1` factor is [`disk_rule`] focused at `|focus|`.
pub fn ball2_focused_rule(focus: &CVec, side: usize) -> Rule {
    let a = focus.norm();
    let (e1, e2) = if a > 0.0 {
        let e1 = focus.scale_re(1.0 / a);
        let e2 = CVec(vec![-e1[1].conj(), e1[0].conj()]);
        (e1, e2)
    } else {
        (CVec::from_reals(&[1.0, 0.0]), CVec::from_reals(&[0.0, 1.0]))
    };
    let base = disk_rule(side, side, Some(C64::new(a, 0.0)));
    let fiber = euclidean_disk_rule(C64::new(0.0, 0.0), 1.0, FIBER_NODES, FIBER_NODES);
    let mut rule = Rule::default();
    for (p, wp) in base.points.iter().zip(&base.weights) {
        let u1 = p[0];
        let s2 = (1.0 - u1.norm_sqr()).max(0.0);
        let s = s2.sqrt();
        for (f, wf) in fiber.points.iter().zip(&fiber.weights) {
            let u2 = f[0] * s;
            rule.points
                .push(CVec(vec![u1 * e1[0] + u2 * e2[0], u1 * e1[1] + u2 * e2[1]]));
            rule.weights.push(wp * wf * s2);
        }
    }
    rule
}

const HALTON_BASES: [u8; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Equal-weight rule from Halton points mapped uniformly onto `B^n`.
pub fn halton_ball_rule(n: usize, count: usize, seed: u64) -> Result<Rule> {
    if 2 * n > HALTON_BASES.len() {
        return Err(Error::Unsupported(format!(
            "Halton rule supports dimension up to {}",
            HALTON_BASES.len() / 2
        )));
    }
    let vol = PI.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
    let w = vol / count as f64;
    let mut rule = Rule::default();
    for i in 0..count {
        let idx = i + 1 + seed as usize;
        let coord = |d: usize| halton::number(HALTON_BASES[d], idx);
        // |z_j|^2 / |z|^2 are uniform spacings on the simplex
        let mut cuts: Vec<f64> = (0..n - 1).map(coord).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.insert(0, 0.0);
        cuts.push(1.0);
        let rho = coord(n - 1).powf(1.0 / (2 * n) as f64);
        let z: Vec<C64> = (0..n)
            .map(|j| {
                let s = cuts[j + 1] - cuts[j];
                C64::from_polar(rho * s.sqrt(), TAU * coord(n + j))
            })
            .collect();
        rule.points.push(CVec(z));
        rule.weights.push(w);
    }
    Ok(rule)
}

/// Rule on the unit disk or ball following `q`.
///
/// `focus` grades the rule on the disk and on the tensor rule of `B^2`;
/// it is ignored elsewhere.
pub fn domain_rule(d: &DomainSpec, q: &QuadratureSpec, focus: Option<&CVec>) -> Result<Rule> {
    q.validate()?;
    let disk_focus = focus.filter(|z| z.dim() == 1).map(|z| z[0]);
    match d {
        DomainSpec::UnitDisk => {
            let side = (q.nodes as f64).sqrt().round() as usize;
            Ok(disk_rule(side, side, disk_focus))
        }
        DomainSpec::UnitBall { n } => match (q.scheme, n) {
            (Scheme::Tensor, 1) => {
                let side = (q.nodes as f64).sqrt().round() as usize;
                Ok(disk_rule(side, side, disk_focus))
            }
            (Scheme::Tensor, 2) => Ok(match focus {
                Some(z) if z.dim() == 2 => ball2_focused_rule(
                    z,
                    ((q.nodes / (FIBER_NODES * FIBER_NODES)) as f64).sqrt().round() as usize,
                ),
                _ => ball2_rule((q.nodes as f64).powf(0.25).round() as usize),
            }),
            (Scheme::Tensor, _) => Err(Error::Unsupported(
                "tensor rules are available on the disk and the ball of C^2; use the halton scheme"
                    .into(),
            )),
            (Scheme::Halton, _) => halton_ball_rule(*n, q.nodes, q.seed),
        },
        _ => Err(Error::Unsupported(format!(
            "quadrature is available on the disk and the ball, not on the {}",
            d.name()
        ))),
    }
}

/// A quadrature value at doubled resolution, with the value it refines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub coarse: f64,
    pub converged: bool,
}

impl Estimate {
    pub fn new(coarse: f64, value: f64) -> Self {
        let scale = value.abs().max(f64::MIN_POSITIVE);
        Estimate {
            value,
            coarse,
            converged: (value - coarse).abs() <= DOUBLING_TOL * scale,
        }
    }

    pub fn exact(v: f64) -> Self {
        Estimate {
            value: v,
            coarse: v,
            converged: true,
        }
    }
}
