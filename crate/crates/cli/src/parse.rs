//! Parsers for the spec arguments: JSON, `@file`, or a short form.

use std::fs;

use koblab::angles::AngleTuple;
use koblab::bergman::MeasureSpec;
use koblab::horospheres::HorosphereSpec;
use koblab::maps::MapSpec;
use koblab::{CVec, DomainSpec, C64};
use serde::de::DeserializeOwned;

pub type ParseResult<T> = Result<T, String>;

/// The argument itself, or the contents of the file after `@`.
fn source(s: &str) -> ParseResult<String> {
    match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
        None => Ok(s.to_string()),
    }
}

fn json<T: DeserializeOwned>(s: &str, what: &str) -> ParseResult<T> {
    serde_json::from_str(s).map_err(|e| format!("bad {what} JSON: {e}"))
}

fn looks_like_json(s: &str) -> bool {
    matches!(s.trim_start().chars().next(), Some('{') | Some('['))
}

/// A real number, possibly written as a fraction `p/q`.
pub fn number(s: &str) -> ParseResult<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
            p / q
        }
        None => s.parse().map_err(|_| format!("bad number {s:?}"))?,
    };
    if !v.is_finite() {
        return Err(format!("number {s:?} is not finite"));
    }
    Ok(v)
}

/// `x`, `yi`, `x+yi`, `x-yi`, `i`, `-i`.
pub fn complex(s: &str) -> ParseResult<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(number(&s)?, 0.0));
    };
    // split before the sign of the imaginary part, skipping exponent signs
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => number(t)?,
    };
    Ok(C64::new(number(re)?, im))
}

pub fn domain(s: &str) -> ParseResult<DomainSpec> {
    let s = source(s)?;
    let t = s.trim();
    let d = match t {
        "disk" => DomainSpec::UnitDisk,
        "ball" => DomainSpec::UnitBall { n: 2 },
        "bidisk" => DomainSpec::Polydisk { n: 2 },
        _ if looks_like_json(t) => json(t, "domain")?,
        _ => {
            let (kind, n) = t
                .split_once(':')
                .ok_or_else(|| format!("unknown domain {t:?}"))?;
            let n: usize = n.parse().map_err(|_| format!("bad dimension in {t:?}"))?;
            match kind {
                "ball" => DomainSpec::UnitBall { n },
                "polydisk" => DomainSpec::Polydisk { n },
                _ => return Err(format!("unknown domain {t:?}")),
            }
        }
    };
    d.validate().map_err(|e| e.to_string())?;
    Ok(d)
}

/// `O` for the origin, `(a, b, ...)` with complex entries, or a JSON point.
pub fn point(s: &str, dim: usize) -> ParseResult<CVec> {
    let t = s.trim();
    if t == "O" || t == "0" {
        return Ok(CVec::zeros(dim));
    }
    if t.starts_with("[") {
        let p: CVec = json(t, "point")?;
        return check_dim(p, dim);
    }
    let inner = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(t);
    let coords = inner
        .split(',')
        .map(complex)
        .collect::<ParseResult<Vec<_>>>()?;
    check_dim(CVec(coords), dim)
}

fn check_dim(p: CVec, dim: usize) -> ParseResult<CVec> {
    if p.dim() != dim {
        return Err(format!("point has {} coordinates, the domain needs {dim}", p.dim()));
    }
    Ok(p)
}

fn call<'a>(t: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let args = t.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(args.split(',').map(str::trim).collect())
}

/// JSON, or one of `identity`, `mobius(a)` for `(z + a) / (1 + conj(a) z)`,
/// `mobius(a,b,c,d)`, `aut(theta,pole)`, `power(k)`, `scale(s)`.
pub fn map(s: &str) -> ParseResult<MapSpec> {
    let s = source(s)?;
    let t = s.trim();
    if looks_like_json(t) {
        return json(t, "map");
    }
    let one = C64::new(1.0, 0.0);
    if t == "identity" {
        return Ok(MapSpec::Identity);
    }
    if let Some(args) = call(t, "mobius") {
        return match args.as_slice() {
            [a] => {
                let a = complex(a)?;
                Ok(MapSpec::mobius(one, a, a.conj(), one))
            }
            [a, b, c, d] => Ok(MapSpec::mobius(
                complex(a)?,
                complex(b)?,
                complex(c)?,
                complex(d)?,
            )),
            _ => Err(format!("mobius takes 1 or 4 arguments: {t:?}")),
        };
    }
    if let Some(args) = call(t, "aut") {
        if let [theta, pole] = args.as_slice() {
            return Ok(MapSpec::DiskAut {
                theta: number(theta)?,
                pole: complex(pole)?,
            });
        }
    }
    if let Some(args) = call(t, "power") {
        if let [k] = args.as_slice() {
            let k = k.parse().map_err(|_| format!("bad exponent in {t:?}"))?;
            return Ok(MapSpec::Power { k });
        }
    }
    if let Some(args) = call(t, "scale") {
        if let [s] = args.as_slice() {
            return Ok(MapSpec::scale(number(s)?, MapSpec::Identity));
        }
    }
    Err(format!("unknown map {t:?}"))
}

/// JSON, `lebesgue`, or `beta:<b>` for `delta^b dnu` on `d`.
pub fn measure(s: &str, d: &DomainSpec) -> ParseResult<MeasureSpec> {
    let s = source(s)?;
    let t = s.trim();
    let mu = if t == "lebesgue" {
        MeasureSpec::lebesgue(d.clone())
    } else if let Some(b) = t.strip_prefix("beta:") {
        MeasureSpec::weighted(d.clone(), number(b)?)
    } else if looks_like_json(t) {
        json(t, "measure")?
    } else {
        return Err(format!("unknown measure {t:?}"));
    };
    mu.validate(d).map_err(|e| e.to_string())?;
    Ok(mu)
}

pub fn horosphere(s: &str) -> ParseResult<HorosphereSpec> {
    json(&source(s)?, "horosphere")
}

/// JSON angle tuple, or a comma list of rationals such as `1/2,1/3`.
pub fn angles(s: &str) -> ParseResult<AngleTuple> {
    let s = source(s)?;
    let t = s.trim();
    if looks_like_json(t) {
        return json(t, "angle tuple");
    }
    let items: Vec<String> = t
        .split(',')
        .map(|r| format!(r#"{{"rational":"{}"}}"#, r.trim()))
        .collect();
    json(&format!("[{}]", items.join(",")), "angle tuple")
}

pub fn reals(s: &str) -> ParseResult<Vec<f64>> {
    s.split(',').map(number).collect()
}
