//! Closed forms for pure states of a circle bundle with fiber `ℂⁿ`: connected
//! components, distances along a fiber and on the 2-torus of states above a
//! circle.

use std::f64::consts::PI;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;

use crate::error::{invalid, Error, Result};
use crate::linalg::{real_trace_norm, RMat};
use crate::solver::Outcome;

const TWO_PI: f64 = 2.0 * PI;

/// Phases closer than this (mod 2π) are treated as equal.
pub const PHASE_TOL: f64 = 1e-10;

/// Distance of `x` to the nearest multiple of `period`.
fn distance_to_lattice(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    r.min(period - r)
}

fn is_integer(x: f64) -> bool {
    distance_to_lattice(x, 1.0) <= 1e-12
}

/// Partition of fiber directions into classes of equal holonomy phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarClasses {
    /// Classes of 0-based direction indices, ordered by their smallest member.
    pub classes: Vec<Vec<usize>>,
}

impl FarClasses {
    /// Number of classes; the connected component is a torus of this dimension.
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&i))
    }
}

/// Groups directions whose holonomy phases `Θ_j(2π)` agree mod 2π within `tol`.
pub fn far_classes(thetas: &[f64], tol: f64) -> FarClasses {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, &t) in thetas.iter().enumerate() {
        match classes
            .iter_mut()
            .find(|c| distance_to_lattice(thetas[c[0]] - t, TWO_PI) <= tol)
        {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    FarClasses { classes }
}

/// Fiber coordinate `Ξ = 2kωπ + φ` reduced to `[0, 2π)`.
pub fn fiber_coordinate(k: i64, omega: f64, phi: f64) -> f64 {
    (2.0 * k as f64 * omega * PI + phi).rem_euclid(TWO_PI)
}

/// Spectral distance on a fiber of the `n = 2` bundle between the reference
/// point and the point of coordinate `Ξ ∈ [0, 2π]`: `(2πR/|sin ωπ|) sin(Ξ/2)`.
pub fn fiber_distance_n2(r: f64, omega: f64, xi: f64) -> Result<f64> {
    if is_integer(omega) {
        return Err(invalid("holonomy ratio must not be an integer"));
    }
    if !(0.0..=TWO_PI).contains(&xi) {
        return Err(invalid(format!("fiber coordinate {xi} outside [0, 2π]")));
    }
    if !(r >= 0.0) {
        return Err(invalid("radius must be nonnegative"));
    }
    Ok(TWO_PI * r / (omega * PI).sin().abs() * (xi / 2.0).sin())
}

/// Horizontal (Carnot-Carathéodory) distance from the reference point to the
/// accessible point `Ξ_k = 2kωπ`.
pub fn horizontal_fiber_distance(k: u64) -> f64 {
    TWO_PI * k as f64
}

/// Pure state `(k, τ₀, φ_j)` of the `n`-torus above a point of the base.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleBundleParams {
    /// Weights `R_j ≥ 0` with `Σ R_j = 2`.
    pub r: Vec<f64>,
    /// Holonomy ratios `ω_j`, with `ω₁ = 0`.
    pub omega: Vec<f64>,
    /// Relative phases `φ_j`, with `φ₁ = 0`.
    pub phi: Vec<f64>,
    pub k: i64,
    pub tau0: f64,
}

impl CircleBundleParams {
    pub fn validate(&self) -> Result<()> {
        let n = self.r.len();
        if n == 0 || self.omega.len() != n || self.phi.len() != n {
            return Err(Error::Shape("r, omega and phi must have the same nonzero length".into()));
        }
        if self.r.iter().any(|&x| !(x >= 0.0)) {
            return Err(invalid("weights R_j must be nonnegative"));
        }
        let s: f64 = self.r.iter().sum();
        if (s - 2.0).abs() > 1e-10 {
            return Err(invalid(format!("weights R_j must sum to 2, got {s}")));
        }
        if self.omega[0] != 0.0 || self.phi[0] != 0.0 {
            return Err(invalid("first direction is the reference: omega_1 = phi_1 = 0"));
        }
        if !(0.0..=TWO_PI).contains(&self.tau0) {
            return Err(invalid("tau0 must lie in [0, 2π]"));
        }
        Ok(())
    }

    /// Holonomy phases `Θ_j(2π)` relative to direction 1, up to the common offset.
    pub fn holonomy_phases(&self) -> Vec<f64> {
        self.omega.iter().map(|w| -TWO_PI * w).collect()
    }
}

/// The matrix `S_k` with entries
/// `√(R_iR_j) sin(kπ(ω_j−ω_i) + (φ_j−φ_i)/2) / sin(π(ω_j−ω_i))` and zero diagonal.
pub fn fiber_matrix(p: &CircleBundleParams) -> Result<RMat> {
    p.validate()?;
    let n = p.r.len();
    let mut s = RMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dw = p.omega[j] - p.omega[i];
            if is_integer(dw) {
                return Err(invalid(format!(
                    "directions {} and {} have an integer holonomy difference",
                    i + 1,
                    j + 1
                )));
            }
            let num = (p.k as f64 * PI * dw + (p.phi[j] - p.phi[i]) / 2.0).sin();
            s[(i, j)] = (p.r[i] * p.r[j]).sqrt() * num / (PI * dw).sin();
        }
    }
    Ok(s)
}

/// Distance between the reference point and the point `(k, 0, φ_j)` of the
/// same fiber: `π Tr|S_k|` when the point lies in the connected component,
/// infinite otherwise.
pub fn fiber_distance_general(p: &CircleBundleParams) -> Result<Outcome> {
    p.validate()?;
    if p.tau0.abs() > 1e-12 {
        return Err(invalid("fiber distance requires tau0 = 0"));
    }
    let classes = far_classes(&p.holonomy_phases(), 1e-12);
    for class in &classes.classes {
        let base = p.phi[class[0]];
        if class.iter().any(|&j| distance_to_lattice(p.phi[j] - base, TWO_PI) > PHASE_TOL) {
            return Ok(Outcome::Infinite);
        }
    }
    if classes.count() < p.r.len() {
        return Err(invalid(
            "degenerate holonomy: directions in the same class make S_k undefined",
        ));
    }
    Ok(Outcome::Finite(PI * real_trace_norm(&fiber_matrix(p)?)))
}

/// Pure state of the 2-torus above the base circle for the `n = 2` bundle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusParams {
    /// Radius `R = √(R₁R₂)` of the latitude circle.
    pub r: f64,
    /// Height `z_ξ = (R₁ − R₂)/2`.
    pub z: f64,
    pub omega: f64,
    pub k: i64,
    pub tau0: f64,
    pub phi: f64,
}

impl TorusParams {
    /// Parameters from the weights `R₁ + R₂ = 2`.
    pub fn from_weights(r1: f64, r2: f64, omega: f64, k: i64, tau0: f64, phi: f64) -> Result<Self> {
        if !(r1 >= 0.0 && r2 >= 0.0) || ((r1 + r2) - 2.0).abs() > 1e-10 {
            return Err(invalid("weights must be nonnegative and sum to 2"));
        }
        Ok(Self {
            r: (r1 * r2).sqrt(),
            z: (r1 - r2) / 2.0,
            omega,
            k,
            tau0,
            phi,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0) || (self.r * self.r + self.z * self.z - 1.0).abs() > 1e-9 {
            return Err(invalid("R and z must satisfy R² + z² = 1"));
        }
        if !(0.0..=TWO_PI).contains(&self.tau0) {
            return Err(invalid("tau0 must lie in [0, 2π]"));
        }
        if !self.omega.is_finite() || !self.phi.is_finite() {
            return Err(invalid("omega and phi must be finite"));
        }
        Ok(())
    }

    /// `W_k = |sin(kωπ + φ/2)| / |sin ωπ|`.
    pub fn w(&self, k: i64) -> f64 {
        (k as f64 * self.omega * PI + self.phi / 2.0).sin().abs() / (self.omega * PI).sin().abs()
    }

    /// `H(T, Δ) = T + zΔ + R W_{k+1} √((τ₀−T)² − Δ²) + R W_k √((2π−τ₀−T)² − Δ²)`.
    pub fn h(&self, t: f64, delta: f64) -> f64 {
        let root = |a: f64| {
            let x = a * a - delta * delta;
            if x >= -1e-12 {
                x.max(0.0).sqrt()
            } else {
                f64::NAN
            }
        };
        t + self.z * delta
            + self.r * self.w(self.k + 1) * root(self.tau0 - t)
            + self.r * self.w(self.k) * root(TWO_PI - self.tau0 - t)
    }
}

/// `H(0, 0) = R W_{k+1} τ₀ + R W_k (2π − τ₀)`, the distance for an equatorial
/// reference state.
pub fn torus_equatorial_distance(p: &TorusParams) -> Result<f64> {
    p.validate()?;
    if is_integer(p.omega) {
        return Err(invalid("holonomy ratio must not be an integer"));
    }
    Ok(p.r * p.w(p.k + 1) * p.tau0 + p.r * p.w(p.k) * (TWO_PI - p.tau0))
}

/// `-H` on the triangle, parametrized by the unit square.
struct TriangleObjective<'a> {
    p: &'a TorusParams,
    side: f64,
    sign: f64,
}

impl TriangleObjective<'_> {
    fn point(&self, u: f64, v: f64) -> (f64, f64) {
        let t = u.clamp(0.0, 1.0) * self.side;
        (t, self.sign * v.clamp(0.0, 1.0) * (self.side - t))
    }

    fn value(&self, u: f64, v: f64) -> f64 {
        let (t, d) = self.point(u, v);
        self.p.h(t, d)
    }
}

impl CostFunction for TriangleObjective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(-self.value(x[0], x[1]))
    }
}

/// Distance between the reference state and `(k, τ₀, φ)` on the 2-torus.
///
/// Far directions (integer `ω`) give `min(τ₀, 2π − τ₀)` when `φ = 0` and
/// infinity otherwise. Close directions give the maximum of `H` over the
/// triangle `T ≥ 0`, `T ± Δ ≤ min(τ₀, 2π − τ₀)` on the side of `sign(z)`,
/// found by a 256×256 grid followed by a Nelder-Mead refinement.
pub fn torus_distance_n2(p: &TorusParams) -> Result<Outcome> {
    p.validate()?;
    let side = p.tau0.min(TWO_PI - p.tau0);
    if is_integer(p.omega) {
        return Ok(if distance_to_lattice(p.phi, TWO_PI) <= PHASE_TOL {
            Outcome::Finite(side)
        } else {
            Outcome::Infinite
        });
    }
    let obj = TriangleObjective {
        p,
        side,
        sign: if p.z >= 0.0 { 1.0 } else { -1.0 },
    };
    const GRID: usize = 256;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=GRID {
        for j in 0..=GRID {
            let (u, v) = (i as f64 / GRID as f64, j as f64 / GRID as f64);
            let h = obj.value(u, v);
            if h > best.0 {
                best = (h, u, v);
            }
        }
    }
    let step = 1.0 / GRID as f64;
    let (u0, v0) = (best.1, best.2);
    let simplex = vec![
        vec![u0, v0],
        vec![(u0 + step).min(1.0).max(u0 - step), v0],
        vec![u0, (v0 + step).min(1.0).max(v0 - step)],
    ];
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-12)
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let refined = Executor::new(obj, solver)
        .configure(|s| s.max_iters(400))
        .run()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let state = refined.state();
    let value = state
        .best_param
        .as_ref()
        .map(|_| -state.best_cost)
        .filter(|v| v.is_finite())
        .unwrap_or(best.0);
    Ok(Outcome::Finite(value.max(best.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes() {
        let f = far_classes(&[0.0, TWO_PI, PI], 1e-12);
        assert_eq!(f.classes, vec![vec![0, 1], vec![2]]);
        assert_eq!(far_classes(&[1.0, 1.0, 1.0], 1e-12).count(), 1);
        assert_eq!(far_classes(&[0.0, 2f64.sqrt(), 3f64.sqrt()], 1e-12).count(), 3);
    }

    #[test]
    fn fiber_n2_values() {
        assert!((fiber_distance_n2(1.0, 0.5, PI).unwrap() - TWO_PI).abs() < 1e-12);
        assert_eq!(fiber_distance_n2(1.0, 0.3, 0.0).unwrap(), 0.0);
        let a = fiber_distance_n2(0.7, 0.3, 1.1).unwrap();
        let b = fiber_distance_n2(0.7, 0.3, TWO_PI - 1.1).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(fiber_distance_n2(1.0, 2.0, 1.0).is_err());
        assert_eq!(horizontal_fiber_distance(3), 6.0 * PI);
    }

    #[test]
    fn general_fiber_reduces_to_n2() {
        let (r1, omega, phi, k) = (0.6, 0.37, 1.3, 2);
        let p = CircleBundleParams {
            r: vec![r1, 2.0 - r1],
            omega: vec![0.0, omega],
            phi: vec![0.0, phi],
            k,
            tau0: 0.0,
        };
        let Outcome::Finite(d) = fiber_distance_general(&p).unwrap() else {
            panic!("expected finite")
        };
        let r = (r1 * (2.0 - r1)).sqrt();
        let expected = fiber_distance_n2(r, omega, fiber_coordinate(k, omega, phi)).unwrap();
        assert!((d - expected).abs() < 1e-10);
    }

    #[test]
    fn general_fiber_connectivity() {
        let mut p = CircleBundleParams {
            r: vec![1.0, 0.5, 0.5],
            omega: vec![0.0, 1.0, 0.3],
            phi: vec![0.0, 0.4, 0.0],
            k: 1,
            tau0: 0.0,
        };
        assert_eq!(fiber_distance_general(&p).unwrap(), Outcome::Infinite);
        p.phi[1] = 0.0;
        assert!(fiber_distance_general(&p).is_err());
        p.omega[1] = 0.45;
        p.k = 0;
        p.phi = vec![0.0; 3];
        assert_eq!(fiber_distance_general(&p).unwrap(), Outcome::Finite(0.0));
    }

    #[test]
    fn torus_cases() {
        let eq = TorusParams::from_weights(1.0, 1.0, 0.3, 1, 1.2, 0.5).unwrap();
        let Outcome::Finite(d) = torus_distance_n2(&eq).unwrap() else {
            panic!("expected finite")
        };
        assert!((d - torus_equatorial_distance(&eq).unwrap()).abs() < 1e-9);
        let far = TorusParams::from_weights(1.5, 0.5, 2.0, 0, PI / 2.0, 0.0).unwrap();
        assert_eq!(torus_distance_n2(&far).unwrap(), Outcome::Finite(PI / 2.0));
        let far_phase = TorusParams { phi: 0.2, ..far };
        assert_eq!(torus_distance_n2(&far_phase).unwrap(), Outcome::Infinite);
    }

    #[test]
    fn torus_at_tau0_zero_matches_fiber() {
        let (r1, omega, phi, k) = (1.4, 0.21, 0.8, 1);
        let p = TorusParams::from_weights(r1, 2.0 - r1, omega, k, 0.0, phi).unwrap();
        let Outcome::Finite(d) = torus_distance_n2(&p).unwrap() else {
            panic!("expected finite")
        };
        let expected = fiber_distance_n2(p.r, omega, fiber_coordinate(k, omega, phi)).unwrap();
        assert!((d - expected).abs() < 1e-5, "{d} vs {expected}");
    }
}
