//! Poincaré-disk operations exported to the browser demo in `www/`.
//!
//! Points cross the boundary as `(x, y)` pairs and polylines as flat
//! `[x0, y0, x1, y1, ...]` arrays. Points outside the open disk yield NaN
//! or an empty array.

use koblab::geometry::{
    kobayashi_ball_disk_params, poincare_distance, AutomorphismKind, DiskAutomorphism,
};
use koblab::C64;
use wasm_bindgen::prelude::*;

fn inside(z: C64) -> bool {
    z.norm() < 1.0
}

/// Kobayashi (Poincaré) distance between two points of the disk.
#[wasm_bindgen]
pub fn distance(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    poincare_distance(C64::new(ax, ay), C64::new(bx, by)).map_or(f64::NAN, |k| k.value())
}

/// The geodesic arc from `a` to `b` sampled at `n + 1` points.
///
/// The automorphism sending `a` to 0 straightens the arc into a segment.
#[wasm_bindgen]
pub fn geodesic(ax: f64, ay: f64, bx: f64, by: f64, n: usize) -> Vec<f64> {
    let (a, b) = (C64::new(ax, ay), C64::new(bx, by));
    if !inside(a) || !inside(b) {
        return Vec::new();
    }
    let Ok(to_origin) = DiskAutomorphism::new(0.0, a) else {
        return Vec::new();
    };
    let back = to_origin.inverse();
    let end = to_origin.apply(b);
    let n = n.max(1);
    let mut out = Vec::with_capacity(2 * (n + 1));
    for k in 0..=n {
        // uniform in hyperbolic arclength along the straightened segment
        let s = k as f64 / n as f64;
        let r = (s * end.norm().atanh()).tanh();
        let p = back.apply(C64::from_polar(r, end.arg()));
        out.extend([p.re, p.im]);
    }
    out
}

/// `[cx, cy, radius]` of the Euclidean disk equal to the Kobayashi ball
/// `B(z0, r)`.
#[wasm_bindgen]
pub fn kobayashi_ball(x: f64, y: f64, r: f64) -> Vec<f64> {
    match kobayashi_ball_disk_params(C64::new(x, y), r) {
        Ok((c, rho)) => vec![c.re, c.im, rho],
        Err(_) => Vec::new(),
    }
}

fn translation(ax: f64, ay: f64) -> Option<DiskAutomorphism> {
    // (z + a) / (1 + conj(a) z)
    DiskAutomorphism::new(0.0, -C64::new(ax, ay)).ok()
}

/// Orbit of `z` under `(z + a) / (1 + conj(a) z)`, `steps + 1` points.
#[wasm_bindgen]
pub fn orbit(ax: f64, ay: f64, zx: f64, zy: f64, steps: usize) -> Vec<f64> {
    let (Some(f), z) = (translation(ax, ay), C64::new(zx, zy)) else {
        return Vec::new();
    };
    if !inside(z) {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(2 * (steps + 1));
    let mut w = z;
    for _ in 0..=steps {
        out.extend([w.re, w.im]);
        w = f.apply(w);
    }
    out
}

/// The Wolff point of `(z + a) / (1 + conj(a) z)`: the boundary fixed point
/// where the derivative has modulus at most 1. Empty when `a = 0`.
#[wasm_bindgen]
pub fn wolff_point(ax: f64, ay: f64) -> Vec<f64> {
    let Some(f) = translation(ax, ay) else {
        return Vec::new();
    };
    let a = C64::new(ax, ay);
    let one = C64::new(1.0, 0.0);
    let c = f.classify();
    if c.kind == AutomorphismKind::Identity {
        return Vec::new();
    }
    c.fixed_points
        .iter()
        .filter(|p| (p.norm() - 1.0).abs() < 1e-9)
        .min_by(|p, q| {
            let d = |z: &C64| (1.0 - a.norm_sqr()) / (one + a.conj() * z).norm_sqr();
            d(p).total_cmp(&d(q))
        })
        .map_or_else(Vec::new, |p| vec![p.re, p.im])
}

/// `identity`, `elliptic`, `parabolic` or `hyperbolic`.
#[wasm_bindgen]
pub fn map_kind(ax: f64, ay: f64) -> String {
    match translation(ax, ay).map(|f| f.classify().kind) {
        Some(AutomorphismKind::Identity) => "identity",
        Some(AutomorphismKind::Elliptic) => "elliptic",
        Some(AutomorphismKind::Parabolic) => "parabolic",
        Some(AutomorphismKind::Hyperbolic) => "hyperbolic",
        None => "invalid",
    }
    .into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geodesic_ends_and_length() {
        let g = geodesic(-0.3, 0.4, 0.6, 0.1, 16);
        assert!((g[0] + 0.3).abs() < 1e-12 && (g[1] - 0.4).abs() < 1e-12);
        assert!((g[32] - 0.6).abs() < 1e-12 && (g[33] - 0.1).abs() < 1e-12);
        let total = distance(-0.3, 0.4, 0.6, 0.1);
        let pieces: f64 = g
            .chunks(2)
            .zip(g.chunks(2).skip(1))
            .map(|(p, q)| distance(p[0], p[1], q[0], q[1]))
            .sum();
        assert!((pieces - total).abs() < 1e-10);
    }

    #[test]
    fn ball_and_outside_points() {
        let b = kobayashi_ball(0.5, 0.0, 0.5 * 3f64.ln());
        assert!((b[0] - 0.4).abs() < 1e-12 && (b[2] - 0.4).abs() < 1e-12);
        assert!(distance(1.2, 0.0, 0.0, 0.0).is_nan());
        assert!(orbit(0.5, 0.0, 1.5, 0.0, 3).is_empty());
    }

    #[test]
    fn orbit_tends_to_wolff_point() {
        let o = orbit(0.5, 0.0, 0.0, 0.3, 60);
        let w = wolff_point(0.5, 0.0);
        let n = o.len();
        assert!((o[n - 2] - w[0]).abs() < 1e-9 && (o[n - 1] - w[1]).abs() < 1e-9);
        assert_eq!(map_kind(0.5, 0.0), "hyperbolic");
        assert!(wolff_point(0.0, 0.0).is_empty());
    }
}
