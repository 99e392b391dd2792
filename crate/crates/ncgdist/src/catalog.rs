//! Registry of closed-form formulas, evaluated from JSON parameter records.
//!
//! ```
//! let v = ncgdist::catalog::eval("three_point", &serde_json::json!({"d12": 1, "d13": 1, "d23": 1})).unwrap();
//! assert!((v["d12"].as_f64().unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
//! ```

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::algebra::BlochPoint;
use crate::bundle::{
    far_classes, fiber_distance_general, fiber_distance_n2, horizontal_fiber_distance, torus_distance_n2,
    torus_equatorial_distance, CircleBundleParams, TorusParams,
};
use crate::closed_forms::{
    complete_graph_distance, cut_link_distance, four_point_special, graph_geodesic_length, m2_eigen_distance,
    moyal_ball_distance, pythagoras_bounds, realize_metric, sphere_point_distance, star_resistances,
    star_to_triangle, three_point_distance, three_point_inverse, triangle_resistances, FourPointParams,
    ThreePointParams,
};
use crate::error::{invalid, Error, Result};
use crate::io::outcome_to_json;
use crate::linalg::{c, C64};
use crate::moyal::{
    doubled_plane_distance, eigenstate_modified_length, modified_quantum_length, moyal_eigenstate_distance,
    quantum_sq_length, translation_distance, QuantumLengthParams,
};

/// A named closed-form formula.
pub struct CatalogEntry {
    pub id: &'static str,
    /// Short description of the formula.
    pub formula_ref: &'static str,
    /// Parameter record layout.
    pub params: &'static str,
    /// Builder producing a triple on which the formula can be checked, if any.
    pub realized_by: Option<&'static str>,
    eval: fn(&Value) -> Result<Value>,
}

impl CatalogEntry {
    pub fn eval(&self, params: &Value) -> Result<Value> {
        (self.eval)(params)
    }
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("id", &self.id)
            .field("formula_ref", &self.formula_ref)
            .finish()
    }
}

fn parse<T: DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|source| Error::Json {
        context: "catalog parameters".into(),
        source,
    })
}

fn cx(z: [f64; 2]) -> C64 {
    c(z[0], z[1])
}

fn cvec(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().copied().map(cx).collect()
}

fn bloch(p: [f64; 3]) -> BlochPoint {
    BlochPoint::new(p[0], p[1], p[2])
}

#[derive(Deserialize)]
struct Coupling {
    m: [f64; 2],
}

#[derive(Deserialize)]
struct Couplings3 {
    d12: f64,
    d13: f64,
    d23: f64,
}

#[derive(Deserialize)]
struct Lengths3 {
    a: f64,
    b: f64,
    c: f64,
}

#[derive(Deserialize)]
struct Cycle4 {
    d1: f64,
    d3: f64,
    d4: f64,
    d6: f64,
}

#[derive(Deserialize)]
struct Complete {
    n: usize,
    k: f64,
}

#[derive(Deserialize)]
struct Geodesic {
    weights: Vec<Vec<f64>>,
    i: usize,
    j: usize,
}

#[derive(Deserialize)]
struct M2Eigen {
    d1: f64,
    d2: f64,
    p: [f64; 3],
    q: [f64; 3],
}

#[derive(Deserialize)]
struct MoyalBall {
    theta: f64,
    p: [f64; 3],
    q: [f64; 3],
}

#[derive(Deserialize)]
struct SpherePoint {
    v: Vec<[f64; 2]>,
    xi: Vec<[f64; 2]>,
    zeta: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct Pair {
    d1: f64,
    d2: f64,
}

#[derive(Deserialize)]
struct Holonomies {
    thetas: Vec<f64>,
    #[serde(default = "default_phase_tol")]
    tol: f64,
}

fn default_phase_tol() -> f64 {
    crate::bundle::PHASE_TOL
}

#[derive(Deserialize)]
struct FiberN2 {
    r: f64,
    omega: f64,
    xi: f64,
}

#[derive(Deserialize)]
struct Winding {
    k: u64,
}

#[derive(Deserialize)]
struct FiberGeneral {
    r: Vec<f64>,
    omega: Vec<f64>,
    phi: Vec<f64>,
    k: i64,
}

#[derive(Deserialize)]
struct Torus {
    r1: f64,
    r2: f64,
    omega: f64,
    k: i64,
    tau0: f64,
    phi: f64,
}

impl Torus {
    fn params(&self) -> Result<TorusParams> {
        TorusParams::from_weights(self.r1, self.r2, self.omega, self.k, self.tau0, self.phi)
    }
}

#[derive(Deserialize)]
struct Eigen {
    theta: f64,
    m: u64,
    n: u64,
}

#[derive(Deserialize)]
struct Translation {
    kappa: [f64; 2],
}

#[derive(Deserialize)]
struct QuantumPair {
    lambda_p: f64,
    m: u64,
    n: u64,
    #[serde(default)]
    kappa: [f64; 2],
    #[serde(default)]
    kappa_tilde: [f64; 2],
}

impl QuantumPair {
    fn params(&self) -> QuantumLengthParams {
        QuantumLengthParams {
            lambda_p: self.lambda_p,
            m: self.m,
            n: self.n,
            kappa: cx(self.kappa),
            kappa_tilde: cx(self.kappa_tilde),
        }
    }
}

#[derive(Deserialize)]
struct EigenLength {
    lambda_p: f64,
    m: u64,
    n: u64,
}

#[derive(Deserialize)]
struct Doubled {
    kappa: [f64; 2],
    lambda: [f64; 2],
}

#[derive(Deserialize)]
struct Metric {
    distances: Vec<Vec<f64>>,
}

static ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        id: "two_point",
        formula_ref: "two-point space: d = 1/|m|",
        params: r#"{"m": [re, im]}"#,
        realized_by: Some("two_point_triple"),
        eval: |v| {
            let p: Coupling = parse(v)?;
            let m = cx(p.m).norm();
            if m == 0.0 {
                return Ok(outcome_to_json(crate::solver::Outcome::Infinite));
            }
            Ok(json!({"value": 1.0 / m}))
        },
    },
    CatalogEntry {
        id: "three_point",
        formula_ref: "three-point space: distances from the three couplings",
        params: r#"{"d12", "d13", "d23"}"#,
        realized_by: Some("graph_triple"),
        eval: |v| {
            let p: Couplings3 = parse(v)?;
            let (a, b, cc) = three_point_distance(&ThreePointParams::new(p.d12, p.d13, p.d23)?)?;
            Ok(json!({"d12": a, "d13": b, "d23": cc}))
        },
    },
    CatalogEntry {
        id: "three_point_inverse",
        formula_ref: "three-point space: couplings realizing given distances",
        params: r#"{"a": d12, "b": d13, "c": d23}"#,
        realized_by: Some("graph_triple"),
        eval: |v| {
            let p: Lengths3 = parse(v)?;
            let q = three_point_inverse(p.a, p.b, p.c)?;
            Ok(json!({"D12": q.d12, "D13": q.d13, "D23": q.d23}))
        },
    },
    CatalogEntry {
        id: "star_triangle",
        formula_ref: "three-point space: star and triangle resistances",
        params: r#"{"a", "b", "c"}"#,
        realized_by: None,
        eval: |v| {
            let p: Lengths3 = parse(v)?;
            let r = star_resistances(p.a, p.b, p.c);
            let tri = star_to_triangle(r);
            let direct = triangle_resistances(&three_point_inverse(p.a, p.b, p.c)?);
            Ok(json!({"star": r, "triangle": tri, "inverse_squared_couplings": direct}))
        },
    },
    CatalogEntry {
        id: "four_point_cycle",
        formula_ref: "four-point cycle (D13 = D24 = 0): piecewise d(1,2) and d(1,3)",
        params: r#"{"d1", "d3", "d4", "d6"}"#,
        realized_by: Some("graph_triple"),
        eval: |v| {
            let p: Cycle4 = parse(v)?;
            let r = four_point_special(&FourPointParams::cycle(p.d1, p.d3, p.d4, p.d6)?)?;
            Ok(json!({
                "d12": r.d12, "d13": r.d13,
                "case12": format!("{:?}", r.case12), "case13": format!("{:?}", r.case13),
            }))
        },
    },
    CatalogEntry {
        id: "complete_graph",
        formula_ref: "complete graph: (1/|k|) sqrt(2/N)",
        params: r#"{"n", "k"}"#,
        realized_by: Some("graph_triple"),
        eval: |v| {
            let p: Complete = parse(v)?;
            Ok(json!({"value": complete_graph_distance(p.n, p.k)?}))
        },
    },
    CatalogEntry {
        id: "cut_link",
        formula_ref: "complete graph with the measured link cut: (1/|k|) sqrt(2/(N-2))",
        params: r#"{"n", "k"}"#,
        realized_by: Some("graph_triple"),
        eval: |v| {
            let p: Complete = parse(v)?;
            Ok(json!({"value": cut_link_distance(p.n, p.k)?}))
        },
    },
    CatalogEntry {
        id: "graph_geodesic",
        formula_ref: "graph: shortest path with edge length 1/|D|",
        params: r#"{"weights": [[...]], "i", "j"}"#,
        realized_by: Some("graph_triple"),
        eval: |v| {
            let p: Geodesic = parse(v)?;
            let l = graph_geodesic_length(&p.weights, p.i, p.j)?;
            Ok(if l.is_finite() {
                json!({"value": l})
            } else {
                outcome_to_json(crate::solver::Outcome::Infinite)
            })
        },
    },
    CatalogEntry {
        id: "m2_eigen",
        formula_ref: "M2 with diagonal D: chord distance at equal height, else infinite",
        params: r#"{"d1", "d2", "p": [x, y, z], "q": [x, y, z]}"#,
        realized_by: Some("m2_diagonal_triple"),
        eval: |v| {
            let p: M2Eigen = parse(v)?;
            Ok(outcome_to_json(m2_eigen_distance(p.d1, p.d2, &bloch(p.p), &bloch(p.q))))
        },
    },
    CatalogEntry {
        id: "moyal_ball",
        formula_ref: "truncated Moyal N=2: piecewise distance on the 3-ball",
        params: r#"{"theta", "p": [x, y, z], "q": [x, y, z]}"#,
        realized_by: Some("truncated_moyal_triple"),
        eval: |v| {
            let p: MoyalBall = parse(v)?;
            Ok(json!({"value": moyal_ball_distance(p.theta, &bloch(p.p), &bloch(p.q))?}))
        },
    },
    CatalogEntry {
        id: "sphere_point",
        formula_ref: "sphere plus point: (2/|v|) sqrt(1 - |<xi,zeta>|^2) and 1/|v|",
        params: r#"{"v": [[re, im], ...], "xi": [...], "zeta": [...]}"#,
        realized_by: Some("sphere_point_triple"),
        eval: |v| {
            let p: SpherePoint = parse(v)?;
            let r = sphere_point_distance(&cvec(&p.v), &cvec(&p.xi), &cvec(&p.zeta))?;
            Ok(json!({
                "pure_pair": outcome_to_json(r.pure_pair),
                "isolated_to_first": outcome_to_json(r.isolated_to_first),
            }))
        },
    },
    CatalogEntry {
        id: "pythagoras_bounds",
        formula_ref: "product triple: sqrt(d1^2 + d2^2) <= d <= d1 + d2",
        params: r#"{"d1", "d2"}"#,
        realized_by: Some("product_triples"),
        eval: |v| {
            let p: Pair = parse(v)?;
            let (lo, hi) = pythagoras_bounds(p.d1, p.d2)?;
            Ok(json!({"lower": lo, "upper": hi}))
        },
    },
    CatalogEntry {
        id: "far_classes",
        formula_ref: "circle bundle: classes of equal holonomy phase",
        params: r#"{"thetas": [...], "tol"?}"#,
        realized_by: None,
        eval: |v| {
            let p: Holonomies = parse(v)?;
            let f = far_classes(&p.thetas, p.tol);
            Ok(json!({"classes": f.classes, "count": f.count()}))
        },
    },
    CatalogEntry {
        id: "fiber_n2",
        formula_ref: "circle bundle n=2: fiber chord distance (2 pi R/|sin omega pi|) sin(Xi/2)",
        params: r#"{"r", "omega", "xi"}"#,
        realized_by: None,
        eval: |v| {
            let p: FiberN2 = parse(v)?;
            Ok(json!({"value": fiber_distance_n2(p.r, p.omega, p.xi)?}))
        },
    },
    CatalogEntry {
        id: "horizontal_fiber",
        formula_ref: "circle bundle: horizontal distance 2 k pi to the k-th accessible point",
        params: r#"{"k"}"#,
        realized_by: None,
        eval: |v| {
            let p: Winding = parse(v)?;
            Ok(json!({"value": horizontal_fiber_distance(p.k)}))
        },
    },
    CatalogEntry {
        id: "fiber_general",
        formula_ref: "circle bundle: fiber distance pi Tr|S_k|",
        params: r#"{"r": [...], "omega": [...], "phi": [...], "k"}"#,
        realized_by: None,
        eval: |v| {
            let p: FiberGeneral = parse(v)?;
            let q = CircleBundleParams {
                r: p.r,
                omega: p.omega,
                phi: p.phi,
                k: p.k,
                tau0: 0.0,
            };
            Ok(outcome_to_json(fiber_distance_general(&q)?))
        },
    },
    CatalogEntry {
        id: "torus_n2",
        formula_ref: "circle bundle n=2: torus distance, maximum of H over a triangle",
        params: r#"{"r1", "r2", "omega", "k", "tau0", "phi"}"#,
        realized_by: None,
        eval: |v| {
            let p: Torus = parse(v)?;
            Ok(outcome_to_json(torus_distance_n2(&p.params()?)?))
        },
    },
    CatalogEntry {
        id: "torus_equatorial",
        formula_ref: "circle bundle n=2: equatorial torus distance R W_(k+1) tau0 + R W_k (2 pi - tau0)",
        params: r#"{"r1", "r2", "omega", "k", "tau0", "phi"}"#,
        realized_by: None,
        eval: |v| {
            let p: Torus = parse(v)?;
            Ok(json!({"value": torus_equatorial_distance(&p.params()?)?}))
        },
    },
    CatalogEntry {
        id: "moyal_eigen",
        formula_ref: "Moyal plane: eigenstate distance sqrt(theta/2) sum 1/sqrt(k)",
        params: r#"{"theta", "m", "n"}"#,
        realized_by: Some("truncated_moyal_triple"),
        eval: |v| {
            let p: Eigen = parse(v)?;
            Ok(json!({"value": moyal_eigenstate_distance(p.theta, p.m, p.n)?}))
        },
    },
    CatalogEntry {
        id: "translation",
        formula_ref: "Moyal plane: translation distance |kappa|",
        params: r#"{"kappa": [re, im]}"#,
        realized_by: None,
        eval: |v| {
            let p: Translation = parse(v)?;
            Ok(json!({"value": translation_distance(cx(p.kappa))}))
        },
    },
    CatalogEntry {
        id: "quantum_sq_length",
        formula_ref: "Moyal plane: quantum square length 2E_m + 2E_n + |dkappa|^2",
        params: r#"{"lambda_p", "m", "n", "kappa"?, "kappa_tilde"?}"#,
        realized_by: None,
        eval: |v| {
            let p: QuantumPair = parse(v)?;
            Ok(json!({"value": quantum_sq_length(&p.params())?}))
        },
    },
    CatalogEntry {
        id: "modified_quantum_length",
        formula_ref: "Moyal plane: modified quantum length sqrt|d_L2 - Lambda^-2|",
        params: r#"{"lambda_p", "m", "n", "kappa"?, "kappa_tilde"?}"#,
        realized_by: None,
        eval: |v| {
            let p: QuantumPair = parse(v)?;
            Ok(json!({"value": modified_quantum_length(&p.params())?}))
        },
    },
    CatalogEntry {
        id: "eigenstate_modified_length",
        formula_ref: "Moyal plane: eigenstate modified length lambda_P (sqrt(2n+1) - sqrt(2m+1))",
        params: r#"{"lambda_p", "m", "n"}"#,
        realized_by: None,
        eval: |v| {
            let p: EigenLength = parse(v)?;
            Ok(json!({"value": eigenstate_modified_length(p.lambda_p, p.m, p.n)?}))
        },
    },
    CatalogEntry {
        id: "doubled_plane",
        formula_ref: "doubled Moyal plane: sqrt(|kappa|^2 + 1/|Lambda|^2)",
        params: r#"{"kappa": [re, im], "lambda": [re, im]}"#,
        realized_by: Some("product_triples"),
        eval: |v| {
            let p: Doubled = parse(v)?;
            Ok(json!({"value": doubled_plane_distance(cx(p.kappa), cx(p.lambda))?}))
        },
    },
    CatalogEntry {
        id: "n_point_realization",
        formula_ref: "N-point metric realized on a larger Hilbert space (existence only)",
        params: r#"{"distances": [[...]]}"#,
        realized_by: None,
        eval: |v| {
            let p: Metric = parse(v)?;
            realize_metric(&p.distances).map(|_| Value::Null)
        },
    },
];

/// All registered formulas, in a fixed order.
pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn find(id: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.id == id)
}

/// Evaluates the formula `id` on a parameter record.
pub fn eval(id: &str, params: &Value) -> Result<Value> {
    find(id)
        .ok_or_else(|| invalid(format!("unknown catalog id {id:?}")))?
        .eval(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_large_and_unique() {
        assert!(entries().len() >= 15);
        let mut ids: Vec<_> = entries().iter().map(|e| e.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), entries().len());
    }

    #[test]
    fn evaluations() {
        let v = eval("two_point", &json!({"m": [2.0, 0.0]})).unwrap();
        assert_eq!(v["value"], 0.5);
        let v = eval("moyal_ball", &json!({"theta": 2.0, "p": [0, 0, 1], "q": [0, 0, -1]})).unwrap();
        assert_eq!(v["value"], 1.0);
        let v = eval("m2_eigen", &json!({"d1": 1, "d2": 0, "p": [0, 0, 1], "q": [0, 0, -1]})).unwrap();
        assert_eq!(v["outcome"], "infinite");
        assert!(eval("nope", &json!({})).is_err());
        assert!(matches!(
            eval("n_point_realization", &json!({"distances": [[0.0]]})),
            Err(Error::Unsupported(_))
        ));
        assert!(eval("three_point", &json!({"d12": 1})).is_err());
    }
}
