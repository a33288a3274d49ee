//! Exact angle arithmetic for the limit period and rank of a tuple of
//! unimodular eigenvalues `e^{2 pi i theta_j}`.
//!
//! An angle is `q_0 + sum_k q_k s_k` with rational `q`'s. The symbol
//! `s<k>` stands for the fractional part of the square root of the `k`-th
//! prime (`s1 = sqrt 2 - 1`, `s2 = sqrt 3 - 1`, ...), so `1, s1, s2, ...`
//! are linearly independent over the rationals and every rationality test
//! reduces to exact comparisons of coefficient vectors. Floating point is
//! used only to locate integer parts when reducing mod 1.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

/// Numeric value of the basis symbol `s<k>`.
pub fn symbol_value(name: &str) -> Result<f64> {
    let k: usize = name
        .strip_prefix('s')
        .and_then(|r| r.parse().ok())
        .filter(|&k| k >= 1 && k <= PRIMES.len())
        .ok_or_else(|| {
            Error::argument(format!(
                "unknown irrational symbol {name:?}; use s1..s{}",
                PRIMES.len()
            ))
        })?;
    let r = (PRIMES[k - 1] as f64).sqrt();
    Ok(r - r.floor())
}

fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

fn rational_to_string(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One exact angle `rational + sum irrational[s] * s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Angle {
    pub rational: Rational,
    /// Nonzero coefficients of the irrational basis symbols.
    pub irrational: BTreeMap<String, Rational>,
}

impl Angle {
    pub fn rational(r: Rational) -> Self {
        Angle {
            rational: r,
            irrational: BTreeMap::new(),
        }
    }

    pub fn new(rational: Rational, irrational: BTreeMap<String, Rational>) -> Result<Self> {
        for name in irrational.keys() {
            symbol_value(name)?;
        }
        let irrational = irrational
            .into_iter()
            .filter(|(_, q)| *q != Rational::from_integer(0))
            .collect();
        Ok(Angle {
            rational,
            irrational,
        })
    }

    pub fn is_rational(&self) -> bool {
        self.irrational.is_empty()
    }

    pub fn approx(&self) -> f64 {
        let mut v = *self.rational.numer() as f64 / *self.rational.denom() as f64;
        for (s, q) in &self.irrational {
            v += symbol_value(s).unwrap() * (*q.numer() as f64 / *q.denom() as f64);
        }
        v
    }

    fn scaled(&self, k: i128) -> Angle {
        let k = Rational::from_integer(k);
        Angle {
            rational: self.rational * k,
            irrational: self
                .irrational
                .iter()
                .map(|(s, q)| (s.clone(), q * k))
                .filter(|(_, q)| *q != Rational::from_integer(0))
                .collect(),
        }
    }

    fn minus(&self, other: &Angle) -> Angle {
        let mut irr = self.irrational.clone();
        for (s, q) in &other.irrational {
            let e = irr.entry(s.clone()).or_insert_with(|| Rational::from_integer(0));
            *e -= q;
        }
        irr.retain(|_, q| *q != Rational::from_integer(0));
        Angle {
            rational: self.rational - other.rational,
            irrational: irr,
        }
    }

    /// Reduce into `[0, 1)`.
    pub fn reduced(&self) -> Result<Angle> {
        if self.is_rational() {
            let fl = self.rational.floor();
            return Ok(Angle::rational(self.rational - fl));
        }
        let v = self.approx();
        let fl = v.floor();
        if (v - fl) < 1e-9 || (fl + 1.0 - v) < 1e-9 {
            return Err(Error::numerical(format!(
                "angle {self} is within 1e-9 of an integer; cannot reduce mod 1 reliably"
            )));
        }
        Ok(Angle {
            rational: self.rational - Rational::from_integer(fl as i128),
            irrational: self.irrational.clone(),
        })
    }

    /// Whether `self / other` is rational, for angles with nonzero
    /// irrational part.
    fn ratio_is_rational(&self, other: &Angle) -> bool {
        if self.irrational.keys().ne(other.irrational.keys()) {
            return false;
        }
        let (s, q) = self.irrational.iter().next().expect("irrational angle");
        let lambda = q / other.irrational[s];
        self.irrational
            .iter()
            .all(|(s, q)| *q == lambda * other.irrational[s])
            && self.rational == lambda * other.rational
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", rational_to_string(&self.rational))?;
        for (s, q) in &self.irrational {
            write!(f, " + {}*{}", rational_to_string(q), s)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct AngleRepr {
    #[serde(default)]
    rational: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    irrational: BTreeMap<String, String>,
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        AngleRepr {
            rational: Some(rational_to_string(&self.rational)),
            irrational: self
                .irrational
                .iter()
                .map(|(s, q)| (s.clone(), rational_to_string(q)))
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = AngleRepr::deserialize(de)?;
        let rational = match r.rational {
            Some(s) => parse_rational(&s).map_err(D::Error::custom)?,
            None => Rational::from_integer(0),
        };
        let mut irr = BTreeMap::new();
        for (s, q) in r.irrational {
            irr.insert(s, parse_rational(&q).map_err(D::Error::custom)?);
        }
        Angle::new(rational, irr).map_err(D::Error::custom)
    }
}

/// A tuple of angles, each reduced into `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct AngleTuple(Vec<Angle>);

impl<'de> Deserialize<'de> for AngleTuple {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = Vec::<Angle>::deserialize(de)?;
        AngleTuple::new(v).map_err(D::Error::custom)
    }
}

impl AngleTuple {
    pub fn new(angles: Vec<Angle>) -> Result<Self> {
        let reduced = angles.iter().map(Angle::reduced).collect::<Result<Vec<_>>>()?;
        Ok(AngleTuple(reduced))
    }

    pub fn rationals(rs: &[Rational]) -> Result<Self> {
        Self::new(rs.iter().map(|r| Angle::rational(*r)).collect())
    }

    pub fn angles(&self) -> &[Angle] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Limit multiplicity, period and rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitInvariants {
    pub m: usize,
    pub q: u64,
    pub r: usize,
}

/// Period `q(Theta)`: lcm of the denominators of the rational angles and of
/// the rational differences between irrational angles.
pub fn period(theta: &AngleTuple) -> u64 {
    let mut q: i128 = 1;
    let angles = theta.angles();
    for a in angles.iter().filter(|a| a.is_rational()) {
        q = q.lcm(a.rational.denom());
    }
    let irr: Vec<&Angle> = angles.iter().filter(|a| !a.is_rational()).collect();
    for i in 0..irr.len() {
        for j in (i + 1)..irr.len() {
            let d = irr[i].minus(irr[j]);
            if d.is_rational() {
                q = q.lcm(d.rational.denom());
            }
        }
    }
    q as u64
}

/// Rank `r(Theta)`: number of classes of the reduced irrational angles
/// `q(Theta) theta_j mod 1` under rational proportionality.
pub fn rank(theta: &AngleTuple) -> Result<usize> {
    let q = period(theta) as i128;
    let mut distinct: Vec<Angle> = Vec::new();
    for a in theta.angles().iter().filter(|a| !a.is_rational()) {
        let t = a.scaled(q).reduced()?;
        if !distinct.contains(&t) {
            distinct.push(t);
        }
    }
    let mut reps: Vec<&Angle> = Vec::new();
    for t in &distinct {
        if !reps.iter().any(|r| r.ratio_is_rational(t)) {
            reps.push(t);
        }
    }
    Ok(reps.len())
}

/// `(m, p q(Theta), r(Theta))` from the eigenvalue moduli (sorted in
/// nonincreasing order) and the exact angles of the unimodular ones.
pub fn limit_invariants(moduli: &[f64], theta: &AngleTuple, p: u64) -> Result<LimitInvariants> {
    if p == 0 {
        return Err(Error::argument("period p must be >= 1"));
    }
    if moduli.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::argument("moduli must be sorted in nonincreasing order"));
    }
    if moduli.iter().any(|&m| !(0.0..=1.0 + 1e-12).contains(&m)) {
        return Err(Error::domain("eigenvalue moduli must lie in [0, 1]"));
    }
    let m = moduli.iter().filter(|&&x| (x - 1.0).abs() <= 1e-12).count();
    if m != theta.len() {
        return Err(Error::argument(format!(
            "{m} unimodular eigenvalues but {} angles supplied",
            theta.len()
        )));
    }
    Ok(LimitInvariants {
        m,
        q: p * period(theta),
        r: rank(theta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn irr(q0: Rational, terms: &[(&str, Rational)]) -> Angle {
        Angle::new(
            q0,
            terms.iter().map(|(s, q)| (s.to_string(), *q)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn worked_examples() {
        let t = AngleTuple::rationals(&[r(1, 2), r(1, 3)]).unwrap();
        assert_eq!(
            limit_invariants(&[1.0, 1.0], &t, 1).unwrap(),
            LimitInvariants { m: 2, q: 6, r: 0 }
        );

        let t = AngleTuple::new(vec![irr(r(0, 1), &[("s1", r(1, 1))])]).unwrap();
        assert_eq!(
            limit_invariants(&[1.0], &t, 1).unwrap(),
            LimitInvariants { m: 1, q: 1, r: 1 }
        );

        let t = AngleTuple::new(vec![
            irr(r(0, 1), &[("s1", r(1, 1))]),
            irr(r(1, 2), &[("s1", r(1, 1))]),
        ])
        .unwrap();
        assert_eq!(period(&t), 2);
        assert_eq!(
            limit_invariants(&[1.0, 1.0], &t, 2).unwrap(),
            LimitInvariants { m: 2, q: 4, r: 1 }
        );
    }

    #[test]
    fn reduction_mod_one_uses_integer_part() {
        // 2 s1 = 0.828..., 3 s1 = 1.242... -> 3 s1 - 1
        let a = irr(r(0, 1), &[("s1", r(3, 1))]).reduced().unwrap();
        assert_eq!(a.rational, r(-1, 1));
        // s1 and 3 s1 - 1 are not rationally proportional
        let t = AngleTuple::new(vec![
            irr(r(0, 1), &[("s1", r(1, 1))]),
            irr(r(0, 1), &[("s1", r(3, 1))]),
        ])
        .unwrap();
        assert_eq!(rank(&t).unwrap(), 2);
        // s1 and 2 s1 are proportional
        let t = AngleTuple::new(vec![
            irr(r(0, 1), &[("s1", r(1, 1))]),
            irr(r(0, 1), &[("s1", r(2, 1))]),
        ])
        .unwrap();
        assert_eq!(rank(&t).unwrap(), 1);
    }

    #[test]
    fn independent_symbols_give_separate_classes() {
        let t = AngleTuple::new(vec![
            irr(r(0, 1), &[("s1", r(1, 1))]),
            irr(r(0, 1), &[("s2", r(1, 1))]),
            irr(r(1, 3), &[]),
        ])
        .unwrap();
        let li = limit_invariants(&[1.0, 1.0, 1.0, 0.5], &t, 1).unwrap();
        assert_eq!(li, LimitInvariants { m: 3, q: 3, r: 2 });
    }

    #[test]
    fn json_form() {
        let a: Angle = serde_json::from_str(r#"{"rational":"1/3","irrational":{"s1":"1/2"}}"#)
            .unwrap();
        assert_eq!(a.rational, r(1, 3));
        assert_eq!(a.irrational["s1"], r(1, 2));
        let bad: std::result::Result<Angle, _> =
            serde_json::from_str(r#"{"rational":"1/3","irrational":{"pi":"1"}}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn errors() {
        let t = AngleTuple::rationals(&[r(1, 2)]).unwrap();
        assert!(limit_invariants(&[1.0, 1.0], &t, 1).is_err());
        assert!(limit_invariants(&[0.5, 1.0], &t, 1).is_err());
        assert!(limit_invariants(&[1.0], &t, 0).is_err());
    }
}
