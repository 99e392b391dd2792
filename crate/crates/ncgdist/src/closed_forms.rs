//! Closed-form distances on discrete spaces, graphs, `M₂` triples and products.
//!
//! Each evaluator has a companion builder producing the spectral triple it
//! describes, so the formulas can be checked against the numerical solver.

use petgraph::algo::dijkstra;
use petgraph::graph::UnGraph;

use crate::algebra::BlochPoint;
use crate::error::{invalid, Error, Result};
use crate::linalg::C64;
use crate::solver::Outcome;
use crate::triple::{graph_triple, SpectralTriple};

/// Tolerance for the equality guards of the four-point formula and the
/// same-latitude test of the `M₂` formula.
pub const GUARD_TOL: f64 = 1e-10;

/// Couplings `D₁₂, D₁₃, D₂₃` of a three-point space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreePointParams {
    pub d12: f64,
    pub d13: f64,
    pub d23: f64,
}

impl ThreePointParams {
    pub fn new(d12: f64, d13: f64, d23: f64) -> Result<Self> {
        for (name, v) in [("D12", d12), ("D13", d13), ("D23", d23)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("coupling {name} must be positive, got {v}")));
            }
        }
        Ok(Self { d12, d13, d23 })
    }

    /// Symmetric weight matrix realizing these couplings on `ℂ³`.
    pub fn weights(&self) -> Vec<Vec<f64>> {
        vec![
            vec![0.0, self.d12, self.d13],
            vec![self.d12, 0.0, self.d23],
            vec![self.d13, self.d23, 0.0],
        ]
    }

    pub fn triple(&self) -> Result<SpectralTriple> {
        graph_triple(&self.weights())
    }
}

fn three_point_leg(opposite: f64, a: f64, b: f64) -> f64 {
    let (o2, a2, b2) = (opposite * opposite, a * a, b * b);
    ((a2 + b2) / (o2 * a2 + o2 * b2 + a2 * b2)).sqrt()
}

/// Distances `(d(1,2), d(1,3), d(2,3))` between the three pure states.
pub fn three_point_distance(p: &ThreePointParams) -> Result<(f64, f64, f64)> {
    ThreePointParams::new(p.d12, p.d13, p.d23)?;
    Ok((
        three_point_leg(p.d12, p.d13, p.d23),
        three_point_leg(p.d13, p.d12, p.d23),
        three_point_leg(p.d23, p.d12, p.d13),
    ))
}

/// Whether three lengths satisfy the triangle inequality on their squares,
/// up to `tol` (relative to the largest square).
pub fn squared_triangle_holds(a: f64, b: f64, c: f64, tol: f64) -> bool {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let scale = a2.max(b2).max(c2);
    a2 + b2 >= c2 - tol * scale && b2 + c2 >= a2 - tol * scale && a2 + c2 >= b2 - tol * scale
}

/// Couplings whose three-point distances are `d(1,2) = a`, `d(1,3) = b`, `d(2,3) = c`.
pub fn three_point_inverse(a: f64, b: f64, c: f64) -> Result<ThreePointParams> {
    for v in [a, b, c] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("distances must be positive, got {v}")));
        }
    }
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let margins = [b2 + c2 - a2, a2 + c2 - b2, a2 + b2 - c2];
    if margins.iter().any(|&m| m < 0.0) {
        return Err(invalid("distances violate the squared triangle inequality"));
    }
    if margins.contains(&0.0) {
        return Err(invalid("infinite coupling: squared triangle inequality is an equality"));
    }
    let p = (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c);
    let coupling = |m: f64| (2.0 * m / p).sqrt();
    ThreePointParams::new(coupling(margins[0]), coupling(margins[1]), coupling(margins[2]))
}

/// Star resistances `(r₁, r₂, r₃)` whose pairwise series sums are the squared
/// distances: `r₁ + r₂ = a²`, `r₁ + r₃ = b²`, `r₂ + r₃ = c²`.
pub fn star_resistances(a: f64, b: f64, c: f64) -> [f64; 3] {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    [(a2 + b2 - c2) / 2.0, (a2 + c2 - b2) / 2.0, (b2 + c2 - a2) / 2.0]
}

/// Triangle resistances `(R₁₂, R₁₃, R₂₃)` equivalent to a star `(r₁, r₂, r₃)`.
pub fn star_to_triangle(r: [f64; 3]) -> [f64; 3] {
    let s = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
    [s / r[2], s / r[1], s / r[0]]
}

/// `R_ij = D_ij⁻²` for the given couplings.
pub fn triangle_resistances(p: &ThreePointParams) -> [f64; 3] {
    [p.d12.powi(-2), p.d13.powi(-2), p.d23.powi(-2)]
}

/// Four-point parameters `d₁..d₆`, the inverse couplings of
/// `D₁₂, D₁₃, D₁₄, D₂₃, D₂₄, D₃₄`. `None` stands for an infinite entry,
/// i.e. a missing link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourPointParams {
    pub d: [Option<f64>; 6],
}

impl FourPointParams {
    /// The case with `D₁₃ = D₂₄ = 0`: the cycle `1-2-3-4-1` with link lengths
    /// `d₁ (1-2)`, `d₄ (2-3)`, `d₆ (3-4)`, `d₃ (1-4)`.
    pub fn cycle(d1: f64, d3: f64, d4: f64, d6: f64) -> Result<Self> {
        let p = Self {
            d: [Some(d1), None, Some(d3), Some(d4), None, Some(d6)],
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        for (i, v) in self.d.iter().enumerate() {
            if let Some(v) = v {
                if !(*v > 0.0) || !v.is_finite() {
                    return Err(invalid(format!("d{} must be positive, got {v}", i + 1)));
                }
            }
        }
        Ok(())
    }

    /// Weight matrix with `D_ij = 1/d` and `0` for infinite entries.
    pub fn weights(&self) -> Vec<Vec<f64>> {
        const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut w = vec![vec![0.0; 4]; 4];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            let v = self.d[k].map_or(0.0, |d| 1.0 / d);
            w[i][j] = v;
            w[j][i] = v;
        }
        w
    }

    pub fn triple(&self) -> Result<SpectralTriple> {
        self.validate()?;
        graph_triple(&self.weights())
    }
}

/// Branch of the piecewise four-point formulas that produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FourPointCase {
    /// `d(1,2)`: `d₁² ≤ d₆²`.
    ShortDirect,
    /// `d(1,2)`: `d₁d₆ = d₃d₄`.
    Balanced,
    /// `d(1,2)`: `C ≤ 0`.
    NegativeC,
    /// `d(1,3)`: `d₃² + d₆² ≤ (d₁d₆ − d₃d₄)²`.
    ViaFour,
    /// `d(1,3)`: `d₁² + d₄² ≤ (d₁d₆ − d₃d₄)²`.
    ViaTwo,
    /// Remaining case of either formula: maximum of two candidates.
    Otherwise,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourPointValues {
    pub d12: f64,
    pub d13: f64,
    pub case12: FourPointCase,
    pub case13: FourPointCase,
}

/// The auxiliary quantity `C` deciding the third case of `d(1,2)`.
pub fn four_point_c(d1: f64, d3: f64, d4: f64, d6: f64) -> f64 {
    ((d3 + d4).powi(2) * d6 + (d1 - d6) * (d3 * d4 - d6 * d6))
        * ((d3 - d4).powi(2) * d6 + (d1 + d6) * (d3 * d4 + d6 * d6))
}

/// `√x`, or `None` when the radicand is negative (the candidate is not real).
fn real_sqrt(x: f64) -> Option<f64> {
    (x >= 0.0).then(|| x.sqrt())
}

fn max_real(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Distances `d(1,2)` and `d(1,3)` on the four-cycle (`D₁₃ = D₂₄ = 0`).
/// Cases are tried in the listed order and the first satisfied guard wins.
pub fn four_point_special(p: &FourPointParams) -> Result<FourPointValues> {
    p.validate()?;
    let [Some(d1), None, Some(d3), Some(d4), None, Some(d6)] = p.d else {
        return Err(invalid("only the case d2 = d5 = infinity with finite d1, d3, d4, d6 is supported"));
    };
    let (d12, case12) = if d1 * d1 <= d6 * d6 {
        (d1, FourPointCase::ShortDirect)
    } else if (d1 * d6 - d3 * d4).abs() <= GUARD_TOL * d1 * d6 {
        let v = d1 * (d3 * d3 + d1 * d6).abs() / ((d1 * d1 * d3 * d3).sqrt() * (d3 * d3 + d6 * d6).sqrt());
        (v, FourPointCase::Balanced)
    } else if four_point_c(d1, d3, d4, d6) <= 0.0 {
        let v = (d1 * d1 * (d3 * d3 + d6 * d6) * (d4 * d4 + d6 * d6) / (d3 * d4 - d1 * d6).powi(2)).sqrt();
        (v, FourPointCase::NegativeC)
    } else {
        let first = real_sqrt(d1 * d1 * (d3 * d3 + d4 * d4) / ((d3 + d4).powi(2) + (d1 - d6).powi(2)));
        let second = real_sqrt(d1 * d1 * (d3 * d3 - d4 * d4) / ((d3 - d4).powi(2) + (d1 + d6).powi(2)));
        let v = max_real(first, second).ok_or_else(|| Error::Precondition("no real candidate for d(1,2)".into()))?;
        (v, FourPointCase::Otherwise)
    };
    let cross = (d1 * d6 - d3 * d4).powi(2);
    let (d13, case13) = if d3 * d3 + d6 * d6 <= cross {
        ((d3 * d3 + d6 * d6).sqrt(), FourPointCase::ViaFour)
    } else if d1 * d1 + d4 * d4 <= cross {
        ((d1 * d1 + d4 * d4).sqrt(), FourPointCase::ViaTwo)
    } else {
        let num = (d1 * d3 + d4 * d6).abs();
        let first = num / ((d3 + d4).powi(2) + (d1 - d6).powi(2)).sqrt();
        let second = num / ((d3 - d4).powi(2) + (d1 + d6).powi(2)).sqrt();
        (first.max(second), FourPointCase::Otherwise)
    };
    Ok(FourPointValues {
        d12,
        d13,
        case12,
        case13,
    })
}

/// Complete graph on `n` points with every coupling `k`: `(1/|k|)√(2/n)`.
pub fn complete_graph_distance(n: usize, k: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("complete graph needs at least 2 points"));
    }
    if k == 0.0 || !k.is_finite() {
        return Err(invalid("coupling must be nonzero"));
    }
    Ok((2.0 / n as f64).sqrt() / k.abs())
}

/// Complete graph with the link between the two measured points removed:
/// `(1/|k|)√(2/(n−2))`.
pub fn cut_link_distance(n: usize, k: f64) -> Result<f64> {
    if n < 3 {
        return Err(invalid("cut-link graph needs at least 3 points"));
    }
    if k == 0.0 || !k.is_finite() {
        return Err(invalid("coupling must be nonzero"));
    }
    Ok((2.0 / (n - 2) as f64).sqrt() / k.abs())
}

/// Weights of the complete graph on `n` points, optionally without the link `0-1`.
pub fn complete_graph_weights(n: usize, k: f64, cut_first_link: bool) -> Vec<Vec<f64>> {
    let mut w = vec![vec![k; n]; n];
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    if cut_first_link && n >= 2 {
        w[0][1] = 0.0;
        w[1][0] = 0.0;
    }
    w
}

/// Shortest-path length from `i` to `j` with edge cost `1/|D_pq|` over the
/// nonzero weights; infinite when the points are disconnected.
pub fn graph_geodesic_length(weights: &[Vec<f64>], i: usize, j: usize) -> Result<f64> {
    let n = weights.len();
    if weights.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("weights must be square".into()));
    }
    if i >= n || j >= n {
        return Err(invalid(format!("point index out of range for {n} points")));
    }
    let mut g = UnGraph::<(), f64>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for p in 0..n {
        for q in p + 1..n {
            if weights[p][q] != 0.0 {
                g.add_edge(nodes[p], nodes[q], 1.0 / weights[p][q].abs());
            }
        }
    }
    let dist = dijkstra(&g, nodes[i], Some(nodes[j]), |e| *e.weight());
    Ok(dist.get(&nodes[j]).copied().unwrap_or(f64::INFINITY))
}

/// Distance for `M₂` acting on `ℂ²` with `D = diag(d₁, d₂)`: infinite between
/// points at different heights, otherwise the equatorial chord over `|d₁ − d₂|`.
pub fn m2_eigen_distance(d1: f64, d2: f64, p: &BlochPoint, q: &BlochPoint) -> Outcome {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    if d1 == d2 {
        // every commutator vanishes
        return if dx == 0.0 && dy == 0.0 && dz == 0.0 {
            Outcome::Finite(0.0)
        } else {
            Outcome::Infinite
        };
    }
    if dz.abs() > GUARD_TOL {
        return Outcome::Infinite;
    }
    Outcome::Finite(dx.hypot(dy) / (d1 - d2).abs())
}

/// Distance on the 3-ball for the `N = 2` truncated Moyal triple.
pub fn moyal_ball_distance(theta: f64, p: &BlochPoint, q: &BlochPoint) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(invalid("theta must be positive"));
    }
    for b in [p, q] {
        if b.norm() > 1.0 + 1e-10 {
            return Err(invalid("Bloch point outside the unit ball"));
        }
    }
    let d_eq = (p.x - q.x).hypot(p.y - q.y);
    let dz = (p.z - q.z).abs();
    let scale = (theta / 2.0).sqrt();
    if dz <= d_eq {
        Ok(scale * d_eq)
    } else {
        let d_ec2 = d_eq * d_eq + dz * dz;
        Ok(scale * d_ec2 / (2.0 * dz))
    }
}

/// Pure-state distances for `M_n ⊕ ℂ` with coupling vector `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePointDistances {
    /// `d(ω_ξ, ω_ζ)`.
    pub pure_pair: Outcome,
    /// `d(ω_c, ω_ξ)` with `ω_c` the state of the `ℂ` summand.
    pub isolated_to_first: Outcome,
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn unit_check(name: &str, v: &[C64]) -> Result<()> {
    let n = inner(v, v).re.sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("{name} must be a unit vector, norm is {n}")));
    }
    Ok(())
}

/// Component of `x` orthogonal to the unit vector `u`.
fn orthogonal_part(x: &[C64], u: &[C64]) -> Vec<C64> {
    let s = inner(u, x);
    x.iter().zip(u).map(|(xi, ui)| xi - ui * s).collect()
}

/// Whether `a = e^{iα} b` for some phase, within `tol`.
fn equal_up_to_phase(a: &[C64], b: &[C64], tol: f64) -> bool {
    let s = inner(b, a);
    if s.norm() <= tol {
        return a.iter().chain(b).all(|x| x.norm() <= tol);
    }
    let phase = s / s.norm();
    a.iter().zip(b).all(|(x, y)| (x - y * phase).norm() <= tol)
}

/// Distances for pure states of `M_n ⊕ ℂ` acting on `ℂⁿ ⊕ ℂ` with
/// `D = [[0, v], [v†, 0]]`. Two states of `M_n` are at finite distance iff their
/// components orthogonal to `v` agree up to a phase; the isolated point is only
/// at finite distance from the state of `v`.
pub fn sphere_point_distance(v: &[C64], xi: &[C64], zeta: &[C64]) -> Result<SpherePointDistances> {
    let n = v.len();
    let vn = inner(v, v).re.sqrt();
    if n == 0 || vn == 0.0 {
        return Err(invalid("coupling vector must be nonzero"));
    }
    if xi.len() != n || zeta.len() != n {
        return Err(Error::Shape("state vectors must match the coupling dimension".into()));
    }
    unit_check("xi", xi)?;
    unit_check("zeta", zeta)?;
    let u: Vec<C64> = v.iter().map(|x| x / vn).collect();
    let aligned = equal_up_to_phase(&orthogonal_part(xi, &u), &orthogonal_part(zeta, &u), 1e-10);
    let pure_pair = if aligned {
        let overlap = inner(xi, zeta).norm_sqr().min(1.0);
        Outcome::Finite(2.0 / vn * (1.0 - overlap).sqrt())
    } else {
        Outcome::Infinite
    };
    let isolated_to_first = if inner(&u, xi).norm() >= 1.0 - 1e-10 {
        Outcome::Finite(1.0 / vn)
    } else {
        Outcome::Infinite
    };
    Ok(SpherePointDistances {
        pure_pair,
        isolated_to_first,
    })
}

/// Bounds `(√(d₁² + d₂²), d₁ + d₂)` on the product distance between separable
/// states whose factor distances are `d₁` and `d₂`.
pub fn pythagoras_bounds(d1: f64, d2: f64) -> Result<(f64, f64)> {
    if !(d1 >= 0.0) || !(d2 >= 0.0) {
        return Err(invalid("factor distances must be nonnegative"));
    }
    Ok((d1.hypot(d2), d1 + d2))
}

/// Realizing an arbitrary finite metric on `N` points by a spectral triple on
/// `ℂᴺ` with a larger Hilbert space. Only existence is known; no construction
/// is provided.
pub fn realize_metric(_distances: &[Vec<f64>]) -> Result<SpectralTriple> {
    Err(Error::Unsupported(
        "explicit N-point realization is not implemented: only existence is known".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn three_point_examples() {
        let p = ThreePointParams::new(1.0, 1.0, 1.0).unwrap();
        let (a, b, cc) = three_point_distance(&p).unwrap();
        for v in [a, b, cc] {
            assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        }
        let q = ThreePointParams::new(1.0, 1.0, 1e-9).unwrap();
        assert!((three_point_distance(&q).unwrap().0 - 1.0).abs() < 1e-8);
        assert!(ThreePointParams::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn inverse_round_trip_and_scaling() {
        let p = three_point_inverse(1.0, 1.0, 1.0).unwrap();
        assert!((p.d12 - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
        let (a, b, cc) = three_point_distance(&three_point_inverse(1.2, 1.5, 1.1).unwrap()).unwrap();
        assert!((a - 1.2).abs() < 1e-12 && (b - 1.5).abs() < 1e-12 && (cc - 1.1).abs() < 1e-12);
        let s = three_point_inverse(3.0, 3.0, 3.0).unwrap();
        assert!((s.d12 * 3.0 - p.d12).abs() < 1e-14);
        assert!(three_point_inverse(1.0, 1.0, 3.0).is_err());
        let e = three_point_inverse(3.0, 4.0, 5.0).unwrap_err();
        assert!(e.to_string().contains("infinite coupling"));
    }

    #[test]
    fn star_triangle_identities() {
        let (a, b, cc) = (1.3, 1.1, 0.9);
        let r = star_resistances(a, b, cc);
        assert!((r[0] + r[1] - a * a).abs() < 1e-14);
        assert!((r[0] + r[2] - b * b).abs() < 1e-14);
        assert!((r[1] + r[2] - cc * cc).abs() < 1e-14);
        let tri = star_to_triangle(r);
        let direct = triangle_resistances(&three_point_inverse(a, b, cc).unwrap());
        for k in 0..3 {
            assert!((tri[k] - direct[k]).abs() < 1e-12 * direct[k]);
        }
    }

    #[test]
    fn four_point_examples() {
        let v = four_point_special(&FourPointParams::cycle(1.0, 1.0, 1.0, 2.0).unwrap()).unwrap();
        assert_eq!((v.d12, v.case12), (1.0, FourPointCase::ShortDirect));
        let w = four_point_special(&FourPointParams::cycle(3.0, 1.0, 0.1, 1.0).unwrap()).unwrap();
        assert_eq!(w.case13, FourPointCase::ViaFour);
        assert!((w.d13 - 2f64.sqrt()).abs() < 1e-15);
        let ones = four_point_special(&FourPointParams::cycle(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(ones.d12, 1.0);
        let bad = FourPointParams {
            d: [Some(1.0); 6],
        };
        assert!(four_point_special(&bad).is_err());
    }

    #[test]
    fn complete_graph_values() {
        assert!((complete_graph_distance(4, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((cut_link_distance(4, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((complete_graph_distance(3, 2.0).unwrap() - 0.5 * (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(cut_link_distance(2, 1.0).is_err());
    }

    #[test]
    fn geodesics() {
        let two = vec![vec![0.0, 4.0], vec![4.0, 0.0]];
        assert_eq!(graph_geodesic_length(&two, 0, 1).unwrap(), 0.25);
        let chain = vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]];
        assert_eq!(graph_geodesic_length(&chain, 0, 2).unwrap(), 2.0);
        let split = vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]];
        assert!(graph_geodesic_length(&split, 0, 2).unwrap().is_infinite());
    }

    #[test]
    fn m2_and_ball_formulas() {
        let p = BlochPoint::new(0.3, 0.4, 0.1);
        let q = BlochPoint::new(-0.3, -0.4, 0.1);
        assert_eq!(m2_eigen_distance(2.0, 1.0, &p, &q), Outcome::Finite(1.0));
        assert_eq!(m2_eigen_distance(2.0, 1.0, &p, &p), Outcome::Finite(0.0));
        assert_eq!(m2_eigen_distance(2.0, 1.0, &p, &BlochPoint::new(0.3, 0.4, 0.2)), Outcome::Infinite);
        let e = |x, z| BlochPoint::new(x, 0.0, z);
        assert!((moyal_ball_distance(2.0, &e(1.0, 0.0), &e(-1.0, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!((moyal_ball_distance(2.0, &e(0.0, 1.0), &e(0.0, -1.0)).unwrap() - 1.0).abs() < 1e-15);
        // both branches agree when |Δz| = d_eq
        let a = moyal_ball_distance(2.0, &e(0.0, 0.0), &e(0.5, 0.5)).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sphere_point_values() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = [c(1.0, 0.0), c(0.0, 0.0)];
        let r = sphere_point_distance(&v, &[c(h, 0.0), c(h, 0.0)], &[c(-h, 0.0), c(h, 0.0)]).unwrap();
        match r.pure_pair {
            Outcome::Finite(d) => assert!((d - 2.0).abs() < 1e-12),
            Outcome::Infinite => panic!("expected finite"),
        }
        assert_eq!(r.isolated_to_first, Outcome::Infinite);
        let v2 = [c(2.0, 0.0), c(0.0, 0.0)];
        let north = [c(1.0, 0.0), c(0.0, 0.0)];
        let s = sphere_point_distance(&v2, &north, &north).unwrap();
        assert_eq!(s.pure_pair, Outcome::Finite(0.0));
        assert_eq!(s.isolated_to_first, Outcome::Finite(0.5));
        let far = sphere_point_distance(&v, &[c(h, 0.0), c(h, 0.0)], &[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        assert_eq!(far.pure_pair, Outcome::Infinite);
    }

    #[test]
    fn pythagoras_and_stub() {
        assert_eq!(pythagoras_bounds(3.0, 4.0).unwrap(), (5.0, 7.0));
        assert_eq!(pythagoras_bounds(2.0, 0.0).unwrap(), (2.0, 2.0));
        let e = realize_metric(&[vec![0.0]]).unwrap_err();
        assert!(matches!(e, Error::Unsupported(_)));
    }
}
