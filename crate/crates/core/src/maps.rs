//! Holomorphic self-maps described as expression trees.
//!
//! JSON is tagged by `op`, for example
//! `{"op":"mobius","a":[1,0],"b":[0.5,0],"c":[0.5,0],"d":[1,0]}` or
//! `{"op":"product","components":[{"op":"identity"},{"op":"scale","s":0.5,"inner":{"op":"identity"}}]}`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cvec::{CVec, C64};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::geometry::{gamma, DiskAutomorphism};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    /// `(a z + b) / (c z + d)` on one coordinate.
    Mobius { a: C64, b: C64, c: C64, d: C64 },
    DiskAut { theta: f64, pole: C64 },
    /// `z -> z^k` on one coordinate.
    Power { k: u32 },
    /// `w -> U gamma_point(w)` on the unit ball; `U` row-major, identity
    /// when absent.
    BallAut {
        point: CVec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<Vec<Vec<C64>>>,
    },
    /// `s * inner(z)`.
    Scale { s: f64, inner: Box<MapSpec> },
    /// Concatenation of component outputs; each component reads the listed
    /// input coordinates (coordinate `i` for component `i` by default).
    Product { components: Vec<Component> },
    /// `outer(inner(z))`.
    Compose { outer: Box<MapSpec>, inner: Box<MapSpec> },
    Const { point: CVec },
    /// Exchange coordinates `i` and `j`.
    Swap {
        #[serde(default)]
        i: usize,
        #[serde(default = "one")]
        j: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ComponentRepr", into = "ComponentRepr")]
pub struct Component {
    pub inputs: Option<Vec<usize>>,
    pub map: MapSpec,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ComponentRepr {
    Wired { inputs: Vec<usize>, map: MapSpec },
    Bare(MapSpec),
}

impl From<ComponentRepr> for Component {
    fn from(r: ComponentRepr) -> Self {
        match r {
            ComponentRepr::Wired { inputs, map } => Component {
                inputs: Some(inputs),
                map,
            },
            ComponentRepr::Bare(map) => Component { inputs: None, map },
        }
    }
}

impl From<Component> for ComponentRepr {
    fn from(c: Component) -> Self {
        match c.inputs {
            Some(inputs) => ComponentRepr::Wired { inputs, map: c.map },
            None => ComponentRepr::Bare(c.map),
        }
    }
}

impl Component {
    pub fn new(map: MapSpec) -> Self {
        Component { inputs: None, map }
    }

    pub fn wired(inputs: Vec<usize>, map: MapSpec) -> Self {
        Component {
            inputs: Some(inputs),
            map,
        }
    }

    fn inputs(&self, index: usize) -> Vec<usize> {
        self.inputs.clone().unwrap_or_else(|| vec![index])
    }
}

impl MapSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn mobius(a: C64, b: C64, c: C64, d: C64) -> Self {
        MapSpec::Mobius { a, b, c, d }
    }

    pub fn from_automorphism(a: &DiskAutomorphism) -> Self {
        MapSpec::DiskAut {
            theta: a.theta,
            pole: a.pole,
        }
    }

    pub fn scale(s: f64, inner: MapSpec) -> Self {
        MapSpec::Scale {
            s,
            inner: Box::new(inner),
        }
    }

    pub fn compose(outer: MapSpec, inner: MapSpec) -> Self {
        MapSpec::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    /// Coordinatewise product `(f_1(z_1), ..., f_n(z_n))`.
    pub fn product(maps: Vec<MapSpec>) -> Self {
        MapSpec::Product {
            components: maps.into_iter().map(Component::new).collect(),
        }
    }

    /// Output dimension for an input of dimension `n`.
    pub fn output_dim(&self, n: usize) -> Result<usize> {
        let one_d = |what: &str| {
            if n == 1 {
                Ok(1)
            } else {
                Err(Error::argument(format!("{what} acts on one coordinate, got {n}")))
            }
        };
        match self {
            MapSpec::Identity | MapSpec::Scale { .. } if n == 0 => {
                Err(Error::argument("empty input"))
            }
            MapSpec::Identity => Ok(n),
            MapSpec::Mobius { .. } => one_d("mobius"),
            MapSpec::DiskAut { .. } => one_d("disk_aut"),
            MapSpec::Power { .. } => one_d("power"),
            MapSpec::BallAut { point, unitary } => {
                if point.dim() != n {
                    return Err(Error::argument("ball_aut point dimension mismatch"));
                }
                if let Some(u) = unitary {
                    if u.len() != n || u.iter().any(|r| r.len() != n) {
                        return Err(Error::argument("unitary must be n x n"));
                    }
                }
                Ok(n)
            }
            MapSpec::Scale { inner, .. } => inner.output_dim(n),
            MapSpec::Product { components } => {
                let mut out = 0;
                for (i, c) in components.iter().enumerate() {
                    let ins = c.inputs(i);
                    if ins.iter().any(|&j| j >= n) {
                        return Err(Error::argument("product wiring out of range"));
                    }
                    out += c.map.output_dim(ins.len())?;
                }
                Ok(out)
            }
            MapSpec::Compose { outer, inner } => outer.output_dim(inner.output_dim(n)?),
            MapSpec::Const { point } => Ok(point.dim()),
            MapSpec::Swap { i, j } => {
                if *i >= n || *j >= n {
                    Err(Error::argument("swap index out of range"))
                } else {
                    Ok(n)
                }
            }
        }
    }

    /// Evaluate; dimensions are assumed checked with [`MapSpec::output_dim`].
    pub fn eval(&self, z: &CVec) -> CVec {
        match self {
            MapSpec::Identity => z.clone(),
            MapSpec::Mobius { a, b, c, d } => CVec::scalar((a * z[0] + b) / (c * z[0] + d)),
            MapSpec::DiskAut { theta, pole } => CVec::scalar(
                DiskAutomorphism {
                    theta: *theta,
                    pole: *pole,
                }
                .apply(z[0]),
            ),
            MapSpec::Power { k } => CVec::scalar(z[0].powu(*k)),
            MapSpec::BallAut { point, unitary } => {
                let g = gamma(point, z);
                match unitary {
                    None => g,
                    Some(u) => CVec(
                        u.iter()
                            .map(|row| row.iter().zip(g.iter()).map(|(a, b)| a * b).sum())
                            .collect(),
                    ),
                }
            }
            MapSpec::Scale { s, inner } => inner.eval(z).scale_re(*s),
            MapSpec::Product { components } => {
                let mut out = Vec::new();
                for (i, c) in components.iter().enumerate() {
                    let sub = CVec(c.inputs(i).iter().map(|&j| z[j]).collect());
                    out.extend(c.map.eval(&sub).0);
                }
                CVec(out)
            }
            MapSpec::Compose { outer, inner } => outer.eval(&inner.eval(z)),
            MapSpec::Const { point } => point.clone(),
            MapSpec::Swap { i, j } => {
                let mut w = z.clone();
                w.0.swap(*i, *j);
                w
            }
        }
    }
}

/// A map together with the domain it is declared to preserve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfMap {
    pub map: MapSpec,
    pub domain: DomainSpec,
}

/// Number of interior samples used to verify the self-map property.
pub const SELF_MAP_SAMPLES: usize = 500;

impl SelfMap {
    /// Build and verify `f(D) ⊆ D` on a seeded sample of the domain.
    pub fn new(map: MapSpec, domain: DomainSpec) -> Result<Self> {
        domain.validate()?;
        let n = domain.dim();
        if map.output_dim(n)? != n {
            return Err(Error::argument("map does not preserve the dimension"));
        }
        let sm = SelfMap { map, domain };
        sm.verify(SELF_MAP_SAMPLES, 0x5e1f)?;
        Ok(sm)
    }

    /// Build without sampling; used when the caller constructs maps
    /// known to be self-maps.
    pub fn trusted(map: MapSpec, domain: DomainSpec) -> Self {
        SelfMap { map, domain }
    }

    pub fn eval(&self, z: &CVec) -> CVec {
        self.map.eval(z)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn verify(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let z = sample_interior(&self.domain, &mut rng)?;
            let w = self.eval(&z);
            if !w.is_finite() || !within_slack(&self.domain, &w, 1e-12) {
                return Err(Error::domain(format!(
                    "map sends {:?} outside the domain (image {:?})",
                    z.0, w.0
                )));
            }
        }
        Ok(())
    }
}

fn within_slack(d: &DomainSpec, w: &CVec, slack: f64) -> bool {
    match d {
        DomainSpec::UnitDisk => w[0].norm() < 1.0 + slack,
        DomainSpec::UnitBall { .. } => w.norm() < 1.0 + slack,
        DomainSpec::Polydisk { .. } => w.sup_norm() < 1.0 + slack,
        DomainSpec::EuclideanBall { center, radius } => w.dist(center) < radius + slack,
        DomainSpec::HalfPlane { functional, offset } => {
            w.inner(functional).re < offset + slack
        }
        DomainSpec::Convex(c) => c.max_value(w) < slack,
    }
}

fn unit_disk_sample<R: Rng>(rng: &mut R) -> C64 {
    let r = rng.gen::<f64>().sqrt();
    C64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn unit_ball_sample<R: Rng>(n: usize, rng: &mut R) -> CVec {
    let g: Vec<C64> = (0..n)
        .map(|_| C64::new(gaussian(rng), gaussian(rng)))
        .collect();
    let g = CVec(g);
    let r = rng.gen::<f64>().powf(1.0 / (2.0 * n as f64));
    g.scale_re(r / g.norm())
}

/// Uniformly distributed interior point (a box near the offset for
/// half-planes, rejection from the bounding box for convex domains).
pub fn sample_interior<R: Rng>(d: &DomainSpec, rng: &mut R) -> Result<CVec> {
    Ok(match d {
        DomainSpec::UnitDisk => CVec::scalar(unit_disk_sample(rng)),
        DomainSpec::UnitBall { n } => unit_ball_sample(*n, rng),
        DomainSpec::Polydisk { n } => CVec((0..*n).map(|_| unit_disk_sample(rng)).collect()),
        DomainSpec::EuclideanBall { center, radius } => {
            let u = unit_ball_sample(center.dim(), rng);
            &u.scale_re(*radius) + center
        }
        DomainSpec::HalfPlane { functional, offset } => {
            let n = functional.dim();
            let unit = functional.scale_re(1.0 / functional.norm());
            let depth = offset / functional.norm();
            let base = unit.scale_re(depth);
            let jitter = CVec((0..n).map(|_| C64::new(gaussian(rng), gaussian(rng))).collect());
            let along = jitter.inner(&unit);
            let tangential = &jitter - &unit.scale(along);
            let back = unit.scale_re(-4.0 * rng.gen::<f64>());
            let p = &(&base + &tangential) + &back;
            if d.contains(&p) {
                p
            } else {
                &base + &unit.scale_re(-1.0)
            }
        }
        DomainSpec::Convex(c) => {
            let radii = c.box_radii()?;
            for _ in 0..100_000 {
                let p = CVec(
                    radii
                        .iter()
                        .map(|r| unit_disk_sample(rng) * *r)
                        .collect(),
                );
                if c.contains(&p) {
                    return Ok(p);
                }
            }
            return Err(Error::numerical("rejection sampling found no interior point"));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::c;

    #[test]
    fn mobius_json() {
        let m = MapSpec::from_json(r#"{"op":"mobius","a":[1,0],"b":[0.5,0],"c":[0.5,0],"d":[1,0]}"#)
            .unwrap();
        let w = m.eval(&CVec::from_reals(&[0.0]));
        assert!((w[0] - c(0.5, 0.0)).norm() < 1e-16);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(MapSpec::from_json(&s).unwrap(), m);
    }

    #[test]
    fn product_wiring_and_dims() {
        let m = MapSpec::from_json(
            r#"{"op":"product","components":[{"op":"identity"},{"inputs":[0],"map":{"op":"power","k":2}}]}"#,
        )
        .unwrap();
        assert_eq!(m.output_dim(2).unwrap(), 2);
        let w = m.eval(&CVec(vec![c(0.5, 0.0), c(0.1, 0.0)]));
        assert!((w[1] - c(0.25, 0.0)).norm() < 1e-16);
        assert!(MapSpec::Power { k: 2 }.output_dim(2).is_err());
    }

    #[test]
    fn self_map_verification() {
        let hyp = MapSpec::mobius(c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0));
        assert!(SelfMap::new(hyp, DomainSpec::UnitDisk).is_ok());
        let bad = MapSpec::scale(2.0, MapSpec::Identity);
        assert!(matches!(
            SelfMap::new(bad, DomainSpec::UnitDisk),
            Err(Error::Domain(_))
        ));
        let swap = MapSpec::Swap { i: 0, j: 1 };
        assert!(SelfMap::new(swap, DomainSpec::Polydisk { n: 2 }).is_ok());
    }

    #[test]
    fn ball_aut_is_involution() {
        let p = CVec(vec![c(0.3, 0.1), c(-0.2, 0.4)]);
        let m = MapSpec::BallAut {
            point: p.clone(),
            unitary: None,
        };
        let sm = SelfMap::new(m, DomainSpec::UnitBall { n: 2 }).unwrap();
        let w = CVec(vec![c(0.1, 0.0), c(0.0, -0.5)]);
        let back = sm.eval(&sm.eval(&w));
        assert!(back.dist(&w) < 1e-14);
        assert!(sm.eval(&p).norm() < 1e-15);
    }

    #[test]
    fn samples_are_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [
            DomainSpec::UnitDisk,
            DomainSpec::UnitBall { n: 3 },
            DomainSpec::Polydisk { n: 2 },
            DomainSpec::HalfPlane {
                functional: CVec::from_reals(&[1.0, 1.0]),
                offset: 0.5,
            },
            DomainSpec::Convex(crate::convex::ConvexDomain::ellipsoid(vec![1.0, 4.0], vec![1, 2]).unwrap()),
        ] {
            for _ in 0..200 {
                let z = sample_interior(&d, &mut rng).unwrap();
                assert!(d.contains(&z), "{d:?} {z:?}");
            }
        }
    }
}
