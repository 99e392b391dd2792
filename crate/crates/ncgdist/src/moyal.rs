//! Closed forms on the Moyal plane: distances between harmonic oscillator
//! eigenstates and translated states, and the quantum (square) length.

use crate::error::{invalid, Result};
use crate::linalg::C64;

/// `√(θ/2) Σ_{k=m+1}^{n} 1/√k`, the distance between the eigenstates `ω_m`
/// and `ω_n`. The order of `m` and `n` does not matter.
pub fn moyal_eigenstate_distance(theta: f64, m: u64, n: u64) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(invalid("theta must be positive"));
    }
    let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
    let sum: f64 = (lo + 1..=hi).map(|k| 1.0 / (k as f64).sqrt()).sum();
    Ok((theta / 2.0).sqrt() * sum)
}

/// Distance between a state and its translate by `κ`: `|κ|`.
pub fn translation_distance(kappa: C64) -> f64 {
    kappa.norm()
}

/// Pair of translated eigenstates `α_κ ω_m` and `α_κ̃ ω_n` with Planck length `λ_P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumLengthParams {
    pub lambda_p: f64,
    pub m: u64,
    pub n: u64,
    pub kappa: C64,
    pub kappa_tilde: C64,
}

impl QuantumLengthParams {
    fn validate(&self) -> Result<()> {
        if !(self.lambda_p > 0.0) || !self.lambda_p.is_finite() {
            return Err(invalid("Planck length must be positive"));
        }
        Ok(())
    }

    /// `E_m = λ_P² (m + 1/2)`.
    pub fn energy(&self, m: u64) -> f64 {
        self.lambda_p * self.lambda_p * (m as f64 + 0.5)
    }
}

/// `2E_m + 2E_n + |κ − κ̃|²`.
pub fn quantum_sq_length(q: &QuantumLengthParams) -> Result<f64> {
    q.validate()?;
    Ok(2.0 * q.energy(q.m) + 2.0 * q.energy(q.n) + (q.kappa - q.kappa_tilde).norm_sqr())
}

/// `√|d_{L²} − Λ⁻²|` with `Λ⁻² = √(d_{L²}(φ,φ) d_{L²}(φ̃,φ̃)) = 4√(E_m E_n)`.
pub fn modified_quantum_length(q: &QuantumLengthParams) -> Result<f64> {
    let sq = quantum_sq_length(q)?;
    let self_m = 4.0 * q.energy(q.m);
    let self_n = 4.0 * q.energy(q.n);
    Ok((sq - (self_m * self_n).sqrt()).abs().sqrt())
}

/// `λ_P (√(2n+1) − √(2m+1))`, the modified quantum length between eigenstates.
pub fn eigenstate_modified_length(lambda_p: f64, m: u64, n: u64) -> Result<f64> {
    if !(lambda_p > 0.0) || !lambda_p.is_finite() {
        return Err(invalid("Planck length must be positive"));
    }
    let f = |k: u64| (2.0 * k as f64 + 1.0).sqrt();
    Ok(lambda_p * (f(n) - f(m)).abs())
}

/// Relative gap `(d'_L − d)/d'_L` between the eigenstate modified length and
/// the spectral distance at `θ = λ_P²`.
pub fn eigenstate_relative_gap(lambda_p: f64, m: u64, n: u64) -> Result<f64> {
    let ql = eigenstate_modified_length(lambda_p, m, n)?;
    let d = moyal_eigenstate_distance(lambda_p * lambda_p, m, n)?;
    if ql == 0.0 {
        return Ok(0.0);
    }
    Ok((ql - d).abs() / ql)
}

/// Distance between `(φ, δ¹)` and `(φ_κ, δ²)` on two copies of the plane
/// joined by a two-point space of coupling `Λ`: `√(|κ|² + 1/|Λ|²)`.
pub fn doubled_plane_distance(kappa: C64, lambda: C64) -> Result<f64> {
    if lambda.norm() == 0.0 {
        return Err(invalid("sheet coupling must be nonzero"));
    }
    Ok(translation_distance(kappa).hypot(1.0 / lambda.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn pair(lambda_p: f64, m: u64, n: u64, k: C64, kt: C64) -> QuantumLengthParams {
        QuantumLengthParams {
            lambda_p,
            m,
            n,
            kappa: k,
            kappa_tilde: kt,
        }
    }

    #[test]
    fn eigenstate_distances() {
        assert_eq!(moyal_eigenstate_distance(2.0, 0, 1).unwrap(), 1.0);
        let d02 = moyal_eigenstate_distance(2.0, 0, 2).unwrap();
        assert!((d02 - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
        assert_eq!(moyal_eigenstate_distance(2.0, 3, 3).unwrap(), 0.0);
        assert_eq!(moyal_eigenstate_distance(2.0, 2, 0).unwrap(), d02);
    }

    #[test]
    fn translations() {
        assert_eq!(translation_distance(c(3.0, 4.0)), 5.0);
        assert_eq!(translation_distance(c(0.0, 0.0)), 0.0);
        let rot = c(3.0, 4.0) * C64::from_polar(1.0, 0.7);
        assert!((translation_distance(rot) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn quantum_lengths() {
        let z = c(0.0, 0.0);
        assert_eq!(quantum_sq_length(&pair(1.0, 0, 0, z, z)).unwrap(), 2.0);
        let a = quantum_sq_length(&pair(1.0, 1, 2, c(1.0, 2.0), c(-1.0, 0.5))).unwrap();
        let b = quantum_sq_length(&pair(1.0, 1, 2, c(4.0, 2.0), c(2.0, 0.5))).unwrap();
        assert_eq!(a, b);
        let coh = modified_quantum_length(&pair(1.0, 0, 0, z, c(0.3, -0.4))).unwrap();
        assert!((coh - 0.5).abs() < 1e-15);
        let e = modified_quantum_length(&pair(1.0, 0, 3, z, z)).unwrap();
        assert!((e - (7f64.sqrt() - 1.0)).abs() < 1e-14);
        assert!((eigenstate_modified_length(1.0, 0, 3).unwrap() - e).abs() < 1e-14);
        assert!(eigenstate_relative_gap(1.0, 0, 100).unwrap() < 0.01);
        assert_eq!(doubled_plane_distance(c(3.0, 0.0), c(0.25, 0.0)).unwrap(), 5.0);
    }
}
