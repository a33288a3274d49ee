//! Iteration of holomorphic self-maps: orbits, fixed and Wolff points,
//! divergence and target sets, and the bidisk classification of
//! fixed-point-free maps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use crate::angles::{limit_invariants, period, rank, AngleTuple, LimitInvariants};
use crate::cvec::{CVec, C64};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::geometry::{boundary_distance, kobayashi_distance};
use crate::maps::{sample_interior, Component, MapSpec, SelfMap};

/// Orbits stop once the boundary gap falls below this.
pub const ESCAPE_GAP: f64 = 1e-14;
/// Largest `nu` in the schedule `2, 4, ..., 2^20` for the maps `f_nu`.
pub const NU_MAX_EXP: u32 = 20;
/// Boundary gap below which a fixed-point path counts as escaping.
pub const INTERIOR_GAP: f64 = 1e-6;
/// Finite-difference step of the Newton polish.
pub const FD_STEP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: CVec,
    /// `f^k(z0)` for `k = 0..=K` (fewer when truncated).
    pub points: Vec<CVec>,
    /// `k_D(f^k(z0), f^{k+1}(z0))`, one entry per step; absent on domains
    /// without a closed-form distance.
    pub kob_steps: Option<Vec<f64>>,
    /// `k_D(z0, f^k(z0))`, aligned with `points`.
    pub kob_from_start: Option<Vec<f64>>,
    /// Euclidean boundary distance of each point.
    pub boundary_gaps: Vec<f64>,
    /// The orbit came within [`ESCAPE_GAP`] of the boundary and was cut.
    pub overflow: bool,
}

impl OrbitRecord {
    pub fn last(&self) -> &CVec {
        self.points.last().expect("orbit has a start point")
    }

    /// Steps where `k(f^{k+1}, f^{k+2}) > k(f^k, f^{k+1}) + tol`.
    ///
    /// Near the boundary a single rounding of `f` moves the point by about
    /// `eps / delta` in the metric, so that amount is added to `tol`.
    pub fn step_increases(&self, tol: f64) -> Vec<usize> {
        let Some(s) = &self.kob_steps else {
            return Vec::new();
        };
        (0..s.len().saturating_sub(1))
            .filter(|&k| {
                let gap = self.boundary_gaps[k..k + 3]
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                s[k + 1] - s[k] > tol + 8.0 * f64::EPSILON / gap
            })
            .collect()
    }
}

/// Iterate `m` from `z0` for `k` steps.
pub fn iterate(m: &SelfMap, z0: &CVec, k: usize) -> Result<OrbitRecord> {
    if k < 1 {
        return Err(Error::argument("number of iterations must be >= 1"));
    }
    let d = &m.domain;
    d.require_interior(z0, "start point")?;
    let exact = d.has_exact_distance();
    let mut points = vec![z0.clone()];
    let mut gaps = vec![boundary_distance(d, z0)?.value];
    let mut steps = Vec::new();
    let mut from_start = vec![0.0];
    let mut overflow = false;
    for _ in 0..k {
        let z = points.last().unwrap();
        let w = m.eval(z);
        if !d.contains(&w) {
            overflow = true;
            break;
        }
        let gap = boundary_distance(d, &w)?.value;
        if gap < ESCAPE_GAP {
            overflow = true;
            break;
        }
        if exact {
            steps.push(kobayashi_distance(d, z, &w)?.value());
            from_start.push(kobayashi_distance(d, z0, &w)?.value());
        }
        gaps.push(gap);
        points.push(w);
    }
    Ok(OrbitRecord {
        start: z0.clone(),
        points,
        kob_steps: exact.then_some(steps),
        kob_from_start: exact.then_some(from_start),
        boundary_gaps: gaps,
        overflow,
    })
}

/// Interior point toward which `f_nu` contracts.
fn anchor(d: &DomainSpec) -> Result<CVec> {
    match d {
        DomainSpec::UnitDisk | DomainSpec::UnitBall { .. } | DomainSpec::Polydisk { .. } => {
            Ok(CVec::zeros(d.dim()))
        }
        DomainSpec::EuclideanBall { center, .. } => Ok(center.clone()),
        DomainSpec::Convex(c) => Ok(c.base_point()),
        DomainSpec::HalfPlane { .. } => Err(Error::Unsupported(
            "fixed-point search needs a bounded convex domain".into(),
        )),
    }
}

/// Solve the real linear system `a x = b` (row-major `n x n`).
fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i * n + col].abs().total_cmp(&a[j * n + col].abs())
        })?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            b.swap(piv, col);
        }
        for i in col + 1..n {
            let f = a[i * n + col] / a[col * n + col];
            for j in col..n {
                a[i * n + j] -= f * a[col * n + j];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i * n + i];
    }
    Some(x)
}

/// Newton on `g(z) - z` with a forward-difference Jacobian, staying inside
/// `d`. Returns the root when the residual drops below `tol`.
fn newton(g: impl Fn(&CVec) -> CVec, d: &DomainSpec, z0: &CVec, tol: f64) -> Option<CVec> {
    let mut z = z0.clone();
    let n2 = 2 * z.dim();
    for _ in 0..60 {
        let r = (&g(&z) - &z).to_real();
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rn < tol {
            return Some(z);
        }
        let x = z.to_real();
        let mut jac = vec![0.0; n2 * n2];
        for j in 0..n2 {
            let mut xp = x.clone();
            xp[j] += FD_STEP;
            let zp = CVec::from_real(&xp);
            let rp = (&g(&zp) - &zp).to_real();
            for i in 0..n2 {
                jac[i * n2 + j] = (rp[i] - r[i]) / FD_STEP;
            }
        }
        let step = solve(jac, r.iter().map(|v| -v).collect())?;
        let mut lambda = 1.0;
        let mut next = None;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            let zn = CVec::from_real(&xn);
            if d.contains(&zn) {
                let rn2 = (&g(&zn) - &zn).norm();
                if rn2 < rn {
                    next = Some(zn);
                    break;
                }
            }
            lambda *= 0.5;
        }
        z = next?;
    }
    let r = (&g(&z) - &z).norm();
    (r < tol).then_some(z)
}

/// Fixed point of `f_nu = c + (1 - 1/nu)(f - c)` by Picard iteration,
/// with Newton acceleration when Picard is slow.
fn contraction_fixed_point(m: &SelfMap, c: &CVec, nu: f64, start: &CVec) -> Result<CVec> {
    let s = 1.0 - 1.0 / nu;
    let f_nu = |z: &CVec| c + &(&m.eval(z) - c).scale_re(s);
    let tol = 1e-12;
    let mut z = start.clone();
    for _ in 0..200 {
        let w = f_nu(&z);
        let dz = w.dist(&z);
        z = w;
        if dz < tol {
            return Ok(z);
        }
    }
    if let Some(r) = newton(&f_nu, &m.domain, &z, tol) {
        return Ok(r);
    }
    for _ in 0..1_000_000 {
        let w = f_nu(&z);
        let dz = w.dist(&z);
        z = w;
        if dz < tol {
            return Ok(z);
        }
    }
    Err(Error::numerical(format!(
        "no fixed point for the contraction at nu = {nu}"
    )))
}

/// Fixed points `w_nu` of `f_nu` for `nu = 2, 4, ..., 2^20`.
pub fn fixed_point_path(m: &SelfMap) -> Result<Vec<CVec>> {
    let c = anchor(&m.domain)?;
    let mut path = Vec::new();
    let mut z = c.clone();
    for e in 1..=NU_MAX_EXP {
        z = contraction_fixed_point(m, &c, 2f64.powi(e as i32), &z)?;
        path.push(z.clone());
    }
    Ok(path)
}

/// Interior fixed point of `m`, or `None` when the fixed points of the
/// contractions `f_nu` run off to the boundary.
pub fn find_fixed_point(m: &SelfMap) -> Result<Option<CVec>> {
    let path = fixed_point_path(m)?;
    find_fixed_point_on(m, &path)
}

fn find_fixed_point_on(m: &SelfMap, path: &[CVec]) -> Result<Option<CVec>> {
    let d = &m.domain;
    let gaps: Vec<f64> = path
        .iter()
        .map(|w| boundary_distance(d, w).map(|b| b.value))
        .collect::<Result<_>>()?;
    let n = gaps.len();
    let last = gaps[n - 1];
    // interior limit: the gap settles; boundary limit: it keeps shrinking
    // by a fixed ratio per doubling of nu
    let settled = last >= INTERIOR_GAP && last / gaps[n - 2] > 0.9;
    if !settled {
        return Ok(None);
    }
    match newton(|z| m.eval(z), d, &path[n - 1], 1e-13) {
        Some(p) if d.contains(&p) => Ok(Some(p)),
        _ => Err(Error::numerical(
            "Newton polish diverged after the contractions converged; the map may not be a self-map",
        )),
    }
}

/// Boundary point attracting the fixed points of `f_nu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WolffEstimate {
    pub point: CVec,
    /// Diameter of the last extrapolated values.
    pub residual: f64,
    /// Raw path `w_nu`, `nu = 2, 4, ..., 2^20`.
    pub path: Vec<CVec>,
}

fn aitken(a: &CVec, b: &CVec, c: &CVec) -> CVec {
    CVec(
        (0..a.dim())
            .map(|j| {
                let d1 = b[j] - a[j];
                let d2 = c[j] - b[j];
                let den = d2 - d1;
                if den.norm() < 1e-300 {
                    c[j]
                } else {
                    c[j] - d2 * d2 / den
                }
            })
            .collect(),
    )
}

/// Push an extrapolated point onto the boundary of a model domain.
fn onto_boundary(d: &DomainSpec, p: &CVec) -> CVec {
    match d {
        DomainSpec::UnitDisk | DomainSpec::UnitBall { .. } => p.scale_re(1.0 / p.norm()),
        DomainSpec::EuclideanBall { center, radius } => {
            let v = p - center;
            center + &v.scale_re(radius / v.norm())
        }
        DomainSpec::Polydisk { .. } => {
            let k = (0..p.dim())
                .max_by(|&i, &j| p[i].norm().total_cmp(&p[j].norm()))
                .unwrap_or(0);
            CVec(
                p.iter()
                    .enumerate()
                    .map(|(j, v)| if j == k || v.norm() > 1.0 { v / v.norm() } else { *v })
                    .collect(),
            )
        }
        _ => p.clone(),
    }
}

/// Wolff point of a fixed-point-free self-map.
pub fn wolff_point(m: &SelfMap) -> Result<WolffEstimate> {
    let path = fixed_point_path(m)?;
    if find_fixed_point_on(m, &path)?.is_some() {
        return Err(Error::domain("the map has an interior fixed point"));
    }
    let extrap: Vec<CVec> = path.windows(3).map(|w| aitken(&w[0], &w[1], &w[2])).collect();
    let tail = &extrap[extrap.len() - 4..];
    let mut residual = 0.0f64;
    for a in tail {
        for b in tail {
            residual = residual.max(a.dist(b));
        }
    }
    if !(residual <= 1e-3) {
        return Err(Error::numerical(format!(
            "no stable Wolff candidate (tail diameter {residual:.3e})"
        )));
    }
    let point = onto_boundary(&m.domain, tail.last().unwrap());
    Ok(WolffEstimate {
        point,
        residual,
        path,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceVerdict {
    InteriorAttracted,
    CompactlyDivergent,
    Undecided,
}

/// Three-way guess at whether the orbit of `z0` is relatively compact.
pub fn divergence_probe(m: &SelfMap, z0: &CVec, k: usize) -> Result<DivergenceVerdict> {
    if k < 100 {
        return Err(Error::argument("divergence probe needs at least 100 steps"));
    }
    let orbit = iterate(m, z0, k)?;
    Ok(classify_orbit(&orbit))
}

fn classify_orbit(orbit: &OrbitRecord) -> DivergenceVerdict {
    let gaps = &orbit.boundary_gaps;
    let len = gaps.len();
    let tail_start = len - (len / 10).max(2).min(len);
    if let Some(ks) = &orbit.kob_from_start {
        let mut running = Vec::with_capacity(ks.len());
        let mut mx = 0.0f64;
        for v in ks {
            mx = mx.max(*v);
            running.push(mx);
        }
        if !orbit.overflow && running[len - 1] - running[tail_start] < 1e-6 {
            return DivergenceVerdict::InteriorAttracted;
        }
        // k(z0, z) grows like c - 1/2 log delta(z) near the boundary
        let offsets: Vec<f64> = ks[tail_start..]
            .iter()
            .zip(&gaps[tail_start..])
            .map(|(k, g)| k + 0.5 * g.ln())
            .collect();
        let lo = offsets.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = offsets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let monotone = gaps[tail_start..].windows(2).all(|w| w[1] <= w[0]);
        if monotone && gaps[len - 1] < 1e-6 && hi - lo < 1.0 {
            return DivergenceVerdict::CompactlyDivergent;
        }
        return DivergenceVerdict::Undecided;
    }
    let monotone = gaps[tail_start..].windows(2).all(|w| w[1] <= w[0]);
    if monotone && gaps[len - 1] < 1e-6 {
        return DivergenceVerdict::CompactlyDivergent;
    }
    let tail = &orbit.points[tail_start..];
    let moved = tail.windows(2).map(|w| w[0].dist(&w[1])).fold(0.0, f64::max);
    if !orbit.overflow && moved < 1e-6 {
        DivergenceVerdict::InteriorAttracted
    } else {
        DivergenceVerdict::Undecided
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetCluster {
    pub point: CVec,
    pub multiplicity: usize,
    pub boundary_gap: f64,
    /// Indices of the starts contributing to the cluster.
    pub starts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSetEstimate {
    pub clusters: Vec<TargetCluster>,
    /// Last 10% of each orbit (empty for excluded starts).
    pub terminal: Vec<Vec<CVec>>,
    /// Starts whose orbit was not found compactly divergent.
    pub excluded: Vec<usize>,
    pub resolution: f64,
}

/// Cluster the terminal iterates of several starts at resolution `eps`.
pub fn target_set_probe(
    m: &SelfMap,
    starts: &[CVec],
    k: usize,
    eps: f64,
) -> Result<TargetSetEstimate> {
    if !(eps > 0.0) {
        return Err(Error::argument("resolution must be positive"));
    }
    let mut terminal = Vec::with_capacity(starts.len());
    let mut excluded = Vec::new();
    let mut clusters: Vec<TargetCluster> = Vec::new();
    for (i, z0) in starts.iter().enumerate() {
        let orbit = iterate(m, z0, k.max(100))?;
        if classify_orbit(&orbit) != DivergenceVerdict::CompactlyDivergent {
            excluded.push(i);
            terminal.push(Vec::new());
            continue;
        }
        let len = orbit.points.len();
        let seg = orbit.points[len - (len / 10).max(1)..].to_vec();
        for p in &seg {
            match clusters.iter_mut().find(|c| c.point.dist(p) < eps) {
                Some(c) => {
                    c.multiplicity += 1;
                    if c.starts.last() != Some(&i) {
                        c.starts.push(i);
                    }
                }
                None => clusters.push(TargetCluster {
                    point: p.clone(),
                    multiplicity: 1,
                    boundary_gap: boundary_distance(&m.domain, p)?.value,
                    starts: vec![i],
                }),
            }
        }
        terminal.push(seg);
    }
    Ok(TargetSetEstimate {
        clusters,
        terminal,
        excluded,
        resolution: eps,
    })
}

/// Number of slice parameters per factor in [`herve_classify`].
pub const HERVE_SLICES: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HerveCase {
    I,
    Ii,
    Iii,
    Iv,
}

/// One slice map and what the fixed-point search found for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceResult {
    pub parameter: C64,
    pub fixed_point: Option<C64>,
    pub wolff: Option<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HerveReport {
    pub case: HerveCase,
    /// The roles of the two factors are exchanged ("respectively" form).
    pub swapped: bool,
    pub sigma: Option<C64>,
    pub tau: Option<C64>,
    pub f_slices: Vec<SliceResult>,
    pub g_slices: Vec<SliceResult>,
}

/// Split `F: Δ² → Δ²` into its two coordinate functions.
pub fn split_bidisk(map: &MapSpec) -> Result<(MapSpec, MapSpec)> {
    if map.output_dim(2)? != 2 {
        return Err(Error::argument("expected a map of the bidisk"));
    }
    let proj = |k: usize| MapSpec::Product {
        components: vec![Component::wired(vec![k], MapSpec::Identity)],
    };
    Ok((
        MapSpec::compose(proj(0), map.clone()),
        MapSpec::compose(proj(1), map.clone()),
    ))
}

fn join(f: &MapSpec, g: &MapSpec) -> MapSpec {
    MapSpec::Product {
        components: vec![
            Component::wired(vec![0, 1], f.clone()),
            Component::wired(vec![0, 1], g.clone()),
        ],
    }
}

/// `zeta -> h(zeta, p)` (slot 0) or `zeta -> h(p, zeta)` (slot 1).
fn slice(h: &MapSpec, p: C64, slot: usize) -> MapSpec {
    let free = Component::wired(vec![0], MapSpec::Identity);
    let fixed = Component::wired(
        vec![0],
        MapSpec::Const {
            point: CVec::scalar(p),
        },
    );
    let components = if slot == 0 { vec![free, fixed] } else { vec![fixed, free] };
    MapSpec::compose(h.clone(), MapSpec::Product { components })
}

fn chebyshev_params() -> Vec<C64> {
    (0..HERVE_SLICES)
        .map(|k| {
            let x = (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * HERVE_SLICES) as f64).cos();
            C64::new(0.95 * x, 0.0)
        })
        .collect()
}

fn coordinate_identity(h: &MapSpec, k: usize) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e7);
    let d = DomainSpec::Polydisk { n: 2 };
    for _ in 0..200 {
        let z = sample_interior(&d, &mut rng)?;
        if (h.eval(&z)[0] - z[k]).norm() > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn slice_family(h: &MapSpec, slot: usize) -> Result<Vec<SliceResult>> {
    chebyshev_params()
        .into_iter()
        .map(|p| {
            let sm = SelfMap::trusted(slice(h, p, slot), DomainSpec::UnitDisk);
            let fixed = find_fixed_point(&sm)?;
            let wolff = match fixed {
                Some(_) => None,
                None => Some(wolff_point(&sm)?.point[0]),
            };
            Ok(SliceResult {
                parameter: p,
                fixed_point: fixed.map(|v| v[0]),
                wolff,
            })
        })
        .collect()
}

/// Common Wolff point of a family of fixed-point-free slices.
fn common_wolff(slices: &[SliceResult]) -> Result<C64> {
    let w0 = slices[0].wolff.expect("fixed-point-free slices");
    for s in slices {
        let w = s.wolff.expect("fixed-point-free slices");
        if (w - w0).norm() > 1e-4 {
            return Err(Error::numerical(format!(
                "slice Wolff points disagree: {w0} vs {w}"
            )));
        }
    }
    Ok(w0)
}

/// Classify a fixed-point-free self-map `F = (f, g)` of the bidisk.
pub fn herve_classify(f: &MapSpec, g: &MapSpec) -> Result<HerveReport> {
    for (name, h) in [("f", f), ("g", g)] {
        if h.output_dim(2)? != 1 {
            return Err(Error::argument(format!("{name} must map the bidisk to C")));
        }
    }
    let whole = SelfMap::new(join(f, g), DomainSpec::Polydisk { n: 2 })?;
    if let Some(p) = find_fixed_point(&whole)? {
        return Err(Error::domain(format!(
            "F has an interior fixed point {:?}",
            p.0
        )));
    }
    let g_trivial = coordinate_identity(g, 1)?;
    let f_trivial = !g_trivial && coordinate_identity(f, 0)?;
    let f_slices = if f_trivial { Vec::new() } else { slice_family(f, 0)? };
    let g_slices = if g_trivial { Vec::new() } else { slice_family(g, 1)? };
    let all_free = |s: &[SliceResult]| s.iter().all(|r| r.fixed_point.is_none());
    let all_fixed = |s: &[SliceResult]| s.iter().all(|r| r.fixed_point.is_some());

    let report = |case, swapped, sigma, tau, f_slices, g_slices| HerveReport {
        case,
        swapped,
        sigma,
        tau,
        f_slices,
        g_slices,
    };
    if g_trivial {
        if !all_free(&f_slices) {
            return Err(inconclusive(&f_slices, &g_slices));
        }
        let sigma = common_wolff(&f_slices)?;
        return Ok(report(HerveCase::I, false, Some(sigma), None, f_slices, g_slices));
    }
    if f_trivial {
        if !all_free(&g_slices) {
            return Err(inconclusive(&f_slices, &g_slices));
        }
        let tau = common_wolff(&g_slices)?;
        return Ok(report(HerveCase::I, true, None, Some(tau), f_slices, g_slices));
    }
    let (f_free, f_fixed) = (all_free(&f_slices), all_fixed(&f_slices));
    let (g_free, g_fixed) = (all_free(&g_slices), all_fixed(&g_slices));
    if f_free && g_fixed {
        let sigma = common_wolff(&f_slices)?;
        Ok(report(HerveCase::Ii, false, Some(sigma), None, f_slices, g_slices))
    } else if f_fixed && g_free {
        let tau = common_wolff(&g_slices)?;
        Ok(report(HerveCase::Ii, true, None, Some(tau), f_slices, g_slices))
    } else if f_free && g_free {
        let sigma = common_wolff(&f_slices)?;
        let tau = common_wolff(&g_slices)?;
        Ok(report(HerveCase::Iii, false, Some(sigma), Some(tau), f_slices, g_slices))
    } else if f_fixed && g_fixed {
        Ok(report(HerveCase::Iv, false, None, None, f_slices, g_slices))
    } else {
        Err(inconclusive(&f_slices, &g_slices))
    }
}

fn inconclusive(f: &[SliceResult], g: &[SliceResult]) -> Error {
    let raw = serde_json::json!({ "f_slices": f, "g_slices": g });
    Error::numerical(format!("slice sampling inconclusive: {raw}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::c;
    use crate::geometry::DiskAutomorphism;

    fn hyperbolic() -> MapSpec {
        MapSpec::mobius(c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0))
    }

    fn disk(m: MapSpec) -> SelfMap {
        SelfMap::new(m, DomainSpec::UnitDisk).unwrap()
    }

    fn bidisk(f: MapSpec, g: MapSpec) -> SelfMap {
        SelfMap::new(MapSpec::product(vec![f, g]), DomainSpec::Polydisk { n: 2 }).unwrap()
    }

    fn half() -> MapSpec {
        MapSpec::scale(0.5, MapSpec::Identity)
    }

    #[test]
    fn identity_orbit_is_constant() {
        let o = iterate(&disk(MapSpec::Identity), &CVec::scalar(c(0.3, 0.1)), 10).unwrap();
        assert_eq!(o.points.len(), 11);
        assert!(o.kob_steps.unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hyperbolic_orbit_increases_to_one() {
        let o = iterate(&disk(hyperbolic()), &CVec::scalar(c(0.0, 0.0)), 50).unwrap();
        assert!(o.overflow);
        for w in o.points.windows(2) {
            assert!(w[1][0].re > w[0][0].re && w[1][0].im == 0.0);
        }
        assert!(o.step_increases(1e-9).is_empty());
        assert!(*o.boundary_gaps.last().unwrap() < 1e-13);
    }

    #[test]
    fn third_turn_rotation_has_period_three() {
        let rot = MapSpec::from_automorphism(&DiskAutomorphism::rotation(std::f64::consts::TAU / 3.0));
        let o = iterate(&disk(rot), &CVec::scalar(c(0.5, 0.0)), 6).unwrap();
        assert!(o.points[3].dist(&o.points[0]) < 1e-15);
        assert!(o.points[1].dist(&o.points[0]) > 0.1);
    }

    #[test]
    fn fixed_points() {
        let rot = MapSpec::from_automorphism(&DiskAutomorphism::rotation(1.0));
        let p = find_fixed_point(&disk(rot)).unwrap().unwrap();
        assert!(p.norm() < 1e-12);
        assert!(find_fixed_point(&disk(hyperbolic())).unwrap().is_none());
        assert!(find_fixed_point(&bidisk(hyperbolic(), half())).unwrap().is_none());
        // elliptic automorphism fixing 0.3: conjugate a rotation
        let a = DiskAutomorphism::new(0.0, c(0.3, 0.0)).unwrap();
        let conj = MapSpec::compose(
            MapSpec::from_automorphism(&a.inverse()),
            MapSpec::compose(
                MapSpec::from_automorphism(&DiskAutomorphism::rotation(2.0)),
                MapSpec::from_automorphism(&a),
            ),
        );
        let p = find_fixed_point(&disk(conj)).unwrap().unwrap();
        assert!((p[0] - c(0.3, 0.0)).norm() < 1e-10, "{p:?}");
    }

    #[test]
    fn wolff_points() {
        let w = wolff_point(&disk(hyperbolic())).unwrap();
        assert!((w.point[0] - c(1.0, 0.0)).norm() < 1e-6 && w.residual < 1e-6, "{w:?}");
        // parabolic automorphism with boundary fixed point 1
        let theta = 4f64.atan2(3.0);
        let par = MapSpec::DiskAut {
            theta,
            pole: c(0.2, 0.4),
        };
        let w = wolff_point(&disk(par)).unwrap();
        assert!((w.point[0] - c(1.0, 0.0)).norm() < 1e-4, "{w:?}");
        let w = wolff_point(&bidisk(hyperbolic(), MapSpec::Identity)).unwrap();
        assert!((w.point[0] - c(1.0, 0.0)).norm() < 1e-6);
        assert!(matches!(
            wolff_point(&disk(half())),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn divergence_verdicts() {
        let z0 = CVec::scalar(c(0.2, 0.1));
        let rot = MapSpec::from_automorphism(&DiskAutomorphism::rotation(1.0));
        assert_eq!(
            divergence_probe(&disk(rot), &z0, 200).unwrap(),
            DivergenceVerdict::InteriorAttracted
        );
        assert_eq!(
            divergence_probe(&disk(half()), &z0, 200).unwrap(),
            DivergenceVerdict::InteriorAttracted
        );
        assert_eq!(
            divergence_probe(&disk(hyperbolic()), &z0, 200).unwrap(),
            DivergenceVerdict::CompactlyDivergent
        );
    }

    #[test]
    fn target_sets() {
        let starts: Vec<CVec> = (0..20)
            .map(|k| CVec::scalar(C64::from_polar(0.5, k as f64)))
            .collect();
        let t = target_set_probe(&disk(hyperbolic()), &starts, 500, 1e-6).unwrap();
        assert_eq!(t.clusters.len(), 1);
        assert!((t.clusters[0].point[0] - c(1.0, 0.0)).norm() < 1e-6);

        let starts: Vec<CVec> = [0.0, 0.3, -0.4]
            .iter()
            .map(|&w| CVec(vec![c(0.1, 0.0), c(w, 0.2)]))
            .collect();
        let t = target_set_probe(&bidisk(hyperbolic(), MapSpec::Identity), &starts, 500, 1e-6)
            .unwrap();
        assert_eq!(t.clusters.len(), 3);
        for cl in &t.clusters {
            assert!(1.0 - cl.point[0].norm() < 1e-6);
        }
    }

    #[test]
    fn herve_cases() {
        let lift0 = |m: MapSpec| MapSpec::Product {
            components: vec![Component::wired(vec![0], m)],
        };
        let lift1 = |m: MapSpec| MapSpec::Product {
            components: vec![Component::wired(vec![1], m)],
        };
        let r = herve_classify(&lift0(hyperbolic()), &lift1(MapSpec::Identity)).unwrap();
        assert_eq!(r.case, HerveCase::I);
        assert!((r.sigma.unwrap() - c(1.0, 0.0)).norm() < 1e-6);

        let r = herve_classify(&lift0(hyperbolic()), &lift1(half())).unwrap();
        assert_eq!(r.case, HerveCase::Ii);
        assert!(!r.swapped);

        let r = herve_classify(&lift0(hyperbolic()), &lift1(hyperbolic())).unwrap();
        assert_eq!(r.case, HerveCase::Iii);
        assert!((r.tau.unwrap() - c(1.0, 0.0)).norm() < 1e-6);

        let rot = MapSpec::from_automorphism(&DiskAutomorphism::rotation(1.0));
        assert!(matches!(
            herve_classify(&lift0(rot), &lift1(half())),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn split_recovers_components() {
        let f = MapSpec::product(vec![hyperbolic(), half()]);
        let (a, b) = split_bidisk(&f).unwrap();
        let z = CVec(vec![c(0.2, 0.1), c(-0.3, 0.4)]);
        let w = f.eval(&z);
        assert_eq!(a.eval(&z)[0], w[0]);
        assert_eq!(b.eval(&z)[0], w[1]);
    }
}
