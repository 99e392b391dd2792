//! JSON formats for triples, states and distance results.
//!
//! Complex numbers are `[re, im]` pairs (a bare number is read as real).
//! A matrix is either a list of rows or an object `{"re": rows, "im": rows}`.
//! Parse errors name the offending field as a JSON pointer.
//!
//! ```
//! use ncgdist::io::{parse_state, parse_triple};
//! use serde_json::json;
//!
//! let t = parse_triple(&json!({
//!     "algebra": {"blocks": [1, 1]},
//!     "representation": {"kind": "diagonal"},
//!     "dirac": {"re": [[0, 2], [2, 0]]}
//! })).unwrap();
//! let s = parse_state(&json!({"type": "pure", "block": 0, "vector": [[1, 0]]}), t.algebra()).unwrap();
//! assert!(s.is_pure());
//! ```

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::algebra::{Algebra, AlgebraElement, State};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64};
use crate::solver::{DistanceResult, Outcome};
use crate::triple::{Representation, SpectralTriple};

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("at {path}: {msg}"))
}

fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| at(&format!("{path}/{key}"), "missing field"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| at(path, "expected a number"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| at(path, "expected a nonnegative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| at(path, "expected an array"))
}

/// A number or a `[re, im]` pair.
pub fn parse_complex(v: &Value, path: &str) -> Result<C64> {
    if let Some(x) = v.as_f64() {
        return Ok(c(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(c(as_f64(re, &format!("{path}/0"))?, as_f64(im, &format!("{path}/1"))?)),
        _ => Err(at(path, "expected a number or a [re, im] pair")),
    }
}

fn parse_real_rows(v: &Value, path: &str) -> Result<Vec<Vec<f64>>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = format!("{path}/{i}");
            as_array(row, &rp)?
                .iter()
                .enumerate()
                .map(|(j, x)| as_f64(x, &format!("{rp}/{j}")))
                .collect()
        })
        .collect()
}

/// Square complex matrix in either accepted layout.
pub fn parse_matrix(v: &Value, path: &str) -> Result<CMat> {
    if let Some(obj) = v.as_object() {
        let re = parse_real_rows(field(v, path, "re")?, &format!("{path}/re"))?;
        let n = re.len();
        let im = match obj.get("im") {
            Some(iv) => parse_real_rows(iv, &format!("{path}/im"))?,
            None => vec![vec![0.0; n]; n],
        };
        if re.iter().chain(&im).any(|r| r.len() != n) || im.len() != n {
            return Err(at(path, "re and im must be square of equal size"));
        }
        return Ok(CMat::from_fn(n, n, |i, j| c(re[i][j], im[i][j])));
    }
    let rows = as_array(v, path)?;
    let n = rows.len();
    let mut m = CMat::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}/{i}");
        let row = as_array(row, &rp)?;
        if row.len() != n {
            return Err(at(&rp, format!("expected {n} entries, found {}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(x, &format!("{rp}/{j}"))?;
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

pub fn parse_algebra(v: &Value, path: &str) -> Result<Algebra> {
    let blocks = as_array(field(v, path, "blocks")?, &format!("{path}/blocks"))?
        .iter()
        .enumerate()
        .map(|(i, b)| as_usize(b, &format!("{path}/blocks/{i}")))
        .collect::<Result<Vec<_>>>()?;
    Algebra::new(blocks).map_err(|e| at(&format!("{path}/blocks"), e))
}

/// Triple from `{"algebra", "representation", "dirac", "grading"?}`.
pub fn parse_triple(v: &Value) -> Result<SpectralTriple> {
    let alg = parse_algebra(field(v, "", "algebra")?, "/algebra")?;
    let rv = field(v, "", "representation")?;
    let kind = field(rv, "/representation", "kind")?
        .as_str()
        .ok_or_else(|| at("/representation/kind", "expected a string"))?;
    let rep = match kind {
        "diagonal" => Representation::diagonal(&alg).map_err(|e| at("/representation", e))?,
        "defining" => Representation::defining(&alg),
        "left_mult_tensor" => {
            let k = as_usize(
                field(rv, "/representation", "tensor_copies")?,
                "/representation/tensor_copies",
            )?;
            Representation::left_mult_tensor(&alg, k).map_err(|e| at("/representation", e))?
        }
        "custom" => {
            let images = as_array(field(rv, "/representation", "images")?, "/representation/images")?
                .iter()
                .enumerate()
                .map(|(i, m)| parse_matrix(m, &format!("/representation/images/{i}")))
                .collect::<Result<Vec<_>>>()?;
            Representation::from_hermitian_images(&alg, &images).map_err(|e| at("/representation/images", e))?
        }
        other => return Err(at("/representation/kind", format!("unknown kind {other:?}"))),
    };
    let dirac = parse_matrix(field(v, "", "dirac")?, "/dirac")?;
    let grading = match v.get("grading") {
        None | Some(Value::Null) => None,
        Some(g) => Some(parse_matrix(g, "/grading")?),
    };
    SpectralTriple::new(alg, rep, dirac, grading)
}

/// Triple as JSON, with the representation written as custom images.
pub fn triple_to_json(t: &SpectralTriple) -> Value {
    let alg = t.algebra();
    let mut obj = Map::new();
    obj.insert("algebra".into(), json!({ "blocks": alg.blocks() }));
    obj.insert(
        "representation".into(),
        json!({
            "kind": "custom",
            "images": t.representation().hermitian_images(alg).iter().map(matrix_to_json).collect::<Vec<_>>(),
        }),
    );
    obj.insert("dirac".into(), matrix_to_json(t.dirac()));
    if let Some(g) = t.grading() {
        obj.insert("grading".into(), matrix_to_json(g));
    }
    Value::Object(obj)
}

/// State from `{"type": "pure", "block", "vector"}` or
/// `{"type": "mixed", "weights", "densities"}`.
pub fn parse_state(v: &Value, alg: &Algebra) -> Result<State> {
    let kind = field(v, "", "type")?
        .as_str()
        .ok_or_else(|| at("/type", "expected a string"))?;
    match kind {
        "pure" => {
            let block = as_usize(field(v, "", "block")?, "/block")?;
            let vector = as_array(field(v, "", "vector")?, "/vector")?
                .iter()
                .enumerate()
                .map(|(i, x)| parse_complex(x, &format!("/vector/{i}")))
                .collect::<Result<Vec<_>>>()?;
            State::pure(alg, block, &vector).map_err(|e| at("/vector", e))
        }
        "mixed" => {
            let weights = as_array(field(v, "", "weights")?, "/weights")?
                .iter()
                .enumerate()
                .map(|(i, x)| as_f64(x, &format!("/weights/{i}")))
                .collect::<Result<Vec<_>>>()?;
            let densities = as_array(field(v, "", "densities")?, "/densities")?
                .iter()
                .enumerate()
                .map(|(i, m)| parse_matrix(m, &format!("/densities/{i}")))
                .collect::<Result<Vec<_>>>()?;
            State::new(alg, weights, densities).map_err(|e| at("/densities", e))
        }
        other => Err(at("/type", format!("unknown state type {other:?}"))),
    }
}

pub fn state_to_json(s: &State) -> Value {
    if let Some((block, vector)) = s.vector() {
        return json!({
            "type": "pure",
            "block": block,
            "vector": vector.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
        });
    }
    json!({
        "type": "mixed",
        "weights": s.weights(),
        "densities": s.densities().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn element_to_json(a: &AlgebraElement) -> Value {
    Value::Array(a.blocks().iter().map(matrix_to_json).collect())
}

/// `{"outcome", "value", "optimal_element", "witness", "iterations", "gap", ...}`.
/// Infinity is the string `"infinite"` in `outcome`, never a number.
pub fn result_to_json(r: &DistanceResult) -> Value {
    let opt = |x: Option<f64>| x.map_or(Value::Null, |v| json!(v));
    match r.outcome {
        Outcome::Finite(v) => json!({
            "outcome": "finite",
            "value": v,
            "upper_bound": opt(r.upper_bound),
            "gap": opt(r.gap_estimate),
            "optimal_element": r.optimal_element.as_ref().map_or(Value::Null, element_to_json),
            "witness": Value::Null,
            "iterations": r.iterations,
        }),
        Outcome::Infinite => json!({
            "outcome": "infinite",
            "value": Value::Null,
            "gap": Value::Null,
            "optimal_element": Value::Null,
            "witness": r.witness.as_ref().map_or(Value::Null, element_to_json),
            "witness_gap": opt(r.witness_gap),
            "iterations": r.iterations,
        }),
    }
}

pub fn outcome_to_json(o: Outcome) -> Value {
    match o {
        Outcome::Finite(v) => json!({"outcome": "finite", "value": v}),
        Outcome::Infinite => json!({"outcome": "infinite", "value": Value::Null}),
    }
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{spectral_distance, SolverOptions};
    use crate::triple::truncated_moyal_triple;

    #[test]
    fn triple_round_trip() {
        let t = truncated_moyal_triple(2, 2.0).unwrap();
        let back = parse_triple(&triple_to_json(&t)).unwrap();
        assert_eq!(back.dirac(), t.dirac());
        let s = State::pure(t.algebra(), 0, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let n = State::pure(t.algebra(), 0, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let d1 = spectral_distance(&t, &s, &n, &SolverOptions::default()).unwrap();
        let d2 = spectral_distance(&back, &s, &n, &SolverOptions::default()).unwrap();
        assert!((d1.value().unwrap() - d2.value().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn state_round_trip() {
        let alg = Algebra::new(vec![2, 1]).unwrap();
        let s = State::new(
            &alg,
            vec![0.25, 0.75],
            vec![CMat::identity(2, 2) * c(0.5, 0.0), CMat::identity(1, 1)],
        )
        .unwrap();
        let back = parse_state(&state_to_json(&s), &alg).unwrap();
        assert_eq!(back.weights(), s.weights());
        let p = State::pure(&alg, 0, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let q = parse_state(&state_to_json(&p), &alg).unwrap();
        assert!(q.is_pure());
    }

    #[test]
    fn errors_name_the_field() {
        let v = json!({"algebra": {"blocks": [1, 1]}, "representation": {"kind": "diagonal"}, "dirac": [[0, 1], [1, "x"]]});
        let e = parse_triple(&v).unwrap_err().to_string();
        assert!(e.contains("/dirac/1/1"), "{e}");
        let e = parse_triple(&json!({"algebra": {}})).unwrap_err().to_string();
        assert!(e.contains("/algebra/blocks"), "{e}");
    }

    #[test]
    fn infinite_is_a_string() {
        let o = outcome_to_json(Outcome::Infinite);
        assert_eq!(o["outcome"], "infinite");
    }
}
