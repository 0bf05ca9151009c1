//! JSON formats for matrices, surfaces with named curves, representations
//! and perturbations.
//!
//! Matrices are row-major arrays of `[re, im]` pairs. Words use `a1 b1 A1 B1`
//! with capitals for inverses.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::chen::Perturbation;
use crate::error::{Error, Result};
use crate::liealg::{AlgebraElement, GroupElement, GroupSpec};
use crate::linalg::CMat;
use crate::surface::{Letter, Representation, SurfacePresentation, Word, WordKind};

/// Significant digits of every number written by this crate.
pub const SIG_DIGITS: usize = 12;

/// Rounds to [`SIG_DIGITS`] significant digits, so that printing is stable
/// across platforms and last-bit noise.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float")
}

/// A JSON number rounded with [`round_sig`]; non-finite values become strings.
pub fn num(x: f64) -> Value {
    let r = round_sig(x);
    serde_json::Number::from_f64(r).map_or_else(|| Value::String(format!("{x}")), Value::Number)
}

pub fn matrix_to_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| Value::Array(vec![num(m[(i, j)].re), num(m[(i, j)].im)]))
                        .collect(),
                )
            })
            .collect(),
    )
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

/// Parses a square or rectangular matrix. Entries may be `[re, im]` pairs or
/// plain reals.
pub fn matrix_from_json(v: &Value) -> Result<CMat> {
    let rows: Vec<Vec<Entry>> =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("matrix: {e}")))?;
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse("matrix rows must be nonempty and of equal length".into()));
    }
    let mut m = DMatrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = match *e {
                Entry::Pair([re, im]) => Complex64::new(re, im),
                Entry::Real(re) => Complex64::new(re, 0.0),
            };
        }
    }
    Ok(m)
}

/// `{"genus": g, "curves": {"name": "a1 b1 A1 B1", ...}}`. Curve order is kept.
#[derive(Clone, Debug)]
pub struct SurfaceInput {
    pub presentation: SurfacePresentation,
    pub curves: Vec<(String, Word)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    genus: usize,
    curves: Map<String, Value>,
}

impl SurfaceInput {
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawSurface = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let presentation = SurfacePresentation::new(raw.genus)?;
        let curves = raw
            .curves
            .into_iter()
            .map(|(name, v)| {
                let text = v
                    .as_str()
                    .ok_or_else(|| Error::Parse(format!("curve {name:?} must be a string")))?;
                let w = presentation.parse_word(text, WordKind::Cyclic)?;
                Ok((name, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SurfaceInput { presentation, curves })
    }

    pub fn curve(&self, name: &str) -> Result<&Word> {
        self.curves
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| w)
            .ok_or_else(|| Error::Parse(format!("no curve named {name:?}")))
    }
}

fn generator_names(pres: &SurfacePresentation) -> Vec<String> {
    pres.generators().into_iter().map(Letter::name).collect()
}

/// `{"group": GroupSpec, "images": {"a1": matrix, ...}}`. The genus is read
/// off the image names.
pub fn representation_from_json(s: &str) -> Result<Representation> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        group: GroupSpec,
        images: Map<String, Value>,
    }
    let raw: Raw = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.images.is_empty() || !raw.images.len().is_multiple_of(2) {
        return Err(Error::Parse("images must list a_i and b_i for every handle".into()));
    }
    let pres = SurfacePresentation::new(raw.images.len() / 2)?;
    let images = generator_names(&pres)
        .iter()
        .map(|name| {
            let v = raw
                .images
                .get(name)
                .ok_or_else(|| Error::Parse(format!("missing image for {name}")))?;
            GroupElement::new(raw.group, matrix_from_json(v)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Representation::new(raw.group, pres, images)
}

pub fn representation_to_json(rho: &Representation) -> Value {
    let mut images = Map::new();
    for (name, g) in generator_names(rho.presentation()).into_iter().zip(rho.images()) {
        images.insert(name, matrix_to_json(g.matrix()));
    }
    let mut out = Map::new();
    out.insert("group".into(), serde_json::to_value(rho.spec()).expect("spec serializes"));
    out.insert("images".into(), Value::Object(images));
    Value::Object(out)
}

/// `{"a1": matrix, ...}`: the integral of the 1-form over each generator's
/// arc. Missing generators get zero.
pub fn perturbation_from_json(s: &str, rho: &Representation) -> Result<Perturbation> {
    let raw: Map<String, Value> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let pres = rho.presentation();
    let mut entries = Vec::new();
    for (name, v) in raw {
        let letter = Letter::parse(&name)?;
        if letter.is_inverse() || letter.handle() > pres.genus() {
            return Err(Error::Parse(format!("perturbation key {name:?} is not a generator")));
        }
        entries.push((letter, AlgebraElement::new(*rho.spec(), matrix_from_json(&v)?)?));
    }
    Perturbation::new(rho.spec().n(), pres.num_generators(), entries)
}

/// One JSON value per line, keys in insertion order.
pub fn json_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable report")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_diag;

    #[test]
    fn rounding_is_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(6.0 + 1.0 / 6.0), 6.16666666667);
        assert_eq!(round_sig(-2.5e-17), -2.5e-17);
        assert_eq!(num(f64::NAN), Value::String("NaN".into()));
        assert_eq!(num(0.1 + 0.2).to_string(), "0.3");
    }

    #[test]
    fn matrix_roundtrip() {
        let m = from_real_diag(&[2.0, 0.5]);
        let v = matrix_to_json(&m);
        assert_eq!(v.to_string(), "[[[2.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]");
        assert_eq!(matrix_from_json(&v).unwrap(), m);
        let plain: Value = serde_json::from_str("[[1, 2], [3, 4]]").unwrap();
        assert_eq!(matrix_from_json(&plain).unwrap()[(1, 0)].re, 3.0);
        let ragged: Value = serde_json::from_str("[[1, 2], [3]]").unwrap();
        assert!(matrix_from_json(&ragged).is_err());
    }

    #[test]
    fn surface_input() {
        let s = SurfaceInput::from_json(r#"{"genus": 1, "curves": {"b": "b1", "a": "a1"}}"#).unwrap();
        assert_eq!(s.curves[0].0, "b");
        assert_eq!(s.curve("a").unwrap().to_string(), "a1");
        assert!(SurfaceInput::from_json(r#"{"genus": 1, "curves": {"x": "a2"}}"#).is_err());
        assert!(SurfaceInput::from_json(r#"{"genus": 1}"#).is_err());
    }

    #[test]
    fn representation_roundtrip() {
        let json = r#"{"group": {"kind": "GL_R", "n": 2},
            "images": {"a1": [[2, 0], [0, 0.5]], "b1": [[3, 0], [0, 0.3333333333333333]]}}"#;
        let rho = representation_from_json(json).unwrap();
        let w = Word::parse("a1 b1", WordKind::Cyclic).unwrap();
        assert!((rho.trace_function(&w) - (6.0 + 1.0 / 6.0)).abs() < 1e-14);
        let back = representation_from_json(&representation_to_json(&rho).to_string()).unwrap();
        assert!((back.trace_function(&w) - rho.trace_function(&w)).abs() < 1e-10);

        let theta = perturbation_from_json(r#"{"b1": [[0.1, 0], [0, 0]]}"#, &rho).unwrap();
        assert_eq!(theta.value(Letter::b(1))[(0, 0)].re, 0.1);
        assert!(theta.value(Letter::a(1)).iter().all(|z| z.norm() == 0.0));
        assert!(perturbation_from_json(r#"{"A1": [[0.1, 0], [0, 0]]}"#, &rho).is_err());
    }
}
