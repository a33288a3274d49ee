//! Model domains and their JSON representation.

use serde::{Deserialize, Serialize};

use crate::convex::ConvexDomain;
use crate::cvec::CVec;
use crate::error::{Error, Result};

/// A model domain in `C^n`.
///
/// JSON form is tagged by `kind`, e.g. `{"kind":"ball","n":2}` or
/// `{"kind":"euclidean_ball","center":[[0,0]],"radius":2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    #[serde(rename = "disk")]
    UnitDisk,
    #[serde(rename = "ball")]
    UnitBall { n: usize },
    Polydisk { n: usize },
    EuclideanBall { center: CVec, radius: f64 },
    /// `{ z : Re <z, functional> < offset }`.
    #[serde(rename = "halfplane")]
    HalfPlane { functional: CVec, offset: f64 },
    Convex(ConvexDomain),
}

impl DomainSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let d: DomainSpec = serde_json::from_str(s)?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::UnitBall { n } | DomainSpec::Polydisk { n } if *n == 0 => {
                Err(Error::argument("dimension must be >= 1"))
            }
            DomainSpec::EuclideanBall { center, radius } => {
                if center.dim() == 0 {
                    return Err(Error::argument("ball center must have dimension >= 1"));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::argument("ball radius must be positive"));
                }
                Ok(())
            }
            DomainSpec::HalfPlane { functional, offset } => {
                if functional.dim() == 0 || functional.norm() == 0.0 || !offset.is_finite() {
                    return Err(Error::argument("half-plane needs a nonzero functional"));
                }
                Ok(())
            }
            DomainSpec::Convex(c) => c.validate(),
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::UnitDisk => 1,
            DomainSpec::UnitBall { n } | DomainSpec::Polydisk { n } => *n,
            DomainSpec::EuclideanBall { center, .. } => center.dim(),
            DomainSpec::HalfPlane { functional, .. } => functional.dim(),
            DomainSpec::Convex(c) => c.dim(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DomainSpec::UnitDisk => "disk",
            DomainSpec::UnitBall { .. } => "ball",
            DomainSpec::Polydisk { .. } => "polydisk",
            DomainSpec::EuclideanBall { .. } => "euclidean_ball",
            DomainSpec::HalfPlane { .. } => "halfplane",
            DomainSpec::Convex(_) => "convex",
        }
    }

    /// Strict membership test.
    pub fn contains(&self, z: &CVec) -> bool {
        if z.dim() != self.dim() || !z.is_finite() {
            return false;
        }
        match self {
            DomainSpec::UnitDisk => z[0].norm() < 1.0,
            DomainSpec::UnitBall { .. } => z.norm_sqr() < 1.0,
            DomainSpec::Polydisk { .. } => z.sup_norm() < 1.0,
            DomainSpec::EuclideanBall { center, radius } => z.dist(center) < *radius,
            DomainSpec::HalfPlane { functional, offset } => z.inner(functional).re < *offset,
            DomainSpec::Convex(c) => c.contains(z),
        }
    }

    pub(crate) fn require_interior(&self, z: &CVec, what: &str) -> Result<()> {
        z.check_dim(self.dim(), what)?;
        if !self.contains(z) {
            return Err(Error::domain(format!(
                "{what} is not an interior point of the {}",
                self.name()
            )));
        }
        Ok(())
    }

    /// Whether the Kobayashi distance is available in closed form.
    pub fn has_exact_distance(&self) -> bool {
        !matches!(self, DomainSpec::Convex(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms_parse() {
        assert_eq!(
            DomainSpec::from_json(r#"{"kind":"ball","n":2}"#).unwrap(),
            DomainSpec::UnitBall { n: 2 }
        );
        assert_eq!(
            DomainSpec::from_json(r#"{"kind":"disk"}"#).unwrap(),
            DomainSpec::UnitDisk
        );
        let e = DomainSpec::from_json(
            r#"{"kind":"euclidean_ball","center":[[0,0],[1,0]],"radius":2}"#,
        )
        .unwrap();
        assert_eq!(e.dim(), 2);
        let h = DomainSpec::from_json(r#"{"kind":"halfplane","functional":[[1,0]],"offset":1}"#)
            .unwrap();
        assert!(h.contains(&CVec::from_reals(&[0.5])));
        assert!(!h.contains(&CVec::from_reals(&[1.5])));
    }

    #[test]
    fn bad_radius_rejected() {
        assert!(DomainSpec::from_json(
            r#"{"kind":"euclidean_ball","center":[[0,0]],"radius":-1}"#
        )
        .is_err());
        assert!(DomainSpec::from_json(r#"{"kind":"ball","n":0}"#).is_err());
    }
}
