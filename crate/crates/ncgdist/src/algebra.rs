//! Finite-dimensional C*-algebras `⊕_b M_{n_b}(ℂ)`, their states and the Bloch map on `M₂`.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, max_abs_diff, CMat, CVec, C64, I, ONE};

const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;

/// Kind of a Hermitian basis element inside its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// `e_pp`.
    Diagonal,
    /// `(e_pq + e_qp)/√2`.
    Symmetric,
    /// `i(e_pq - e_qp)/√2`.
    Antisymmetric,
}

/// One element of the fixed Hermitian coordinate basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisLabel {
    pub block: usize,
    pub p: usize,
    pub q: usize,
    pub kind: BasisKind,
}

impl BasisLabel {
    /// Expansion in matrix units as `(unit index within block, coefficient)`.
    fn unit_terms(&self, n: usize) -> Vec<(usize, C64)> {
        let (p, q) = (self.p, self.q);
        match self.kind {
            BasisKind::Diagonal => vec![(p * n + p, ONE)],
            BasisKind::Symmetric => vec![
                (p * n + q, c(FRAC_1_SQRT_2, 0.0)),
                (q * n + p, c(FRAC_1_SQRT_2, 0.0)),
            ],
            BasisKind::Antisymmetric => vec![
                (p * n + q, c(0.0, FRAC_1_SQRT_2)),
                (q * n + p, c(0.0, -FRAC_1_SQRT_2)),
            ],
        }
    }
}

/// Direct sum of full complex matrix blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    blocks: Vec<usize>,
    offsets: Vec<usize>,
    basis: Vec<BasisLabel>,
}

impl Algebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(invalid("algebra needs at least one block"));
        }
        if blocks.contains(&0) {
            return Err(invalid("block dimensions must be positive"));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut basis = Vec::new();
        let mut off = 0;
        for (b, &n) in blocks.iter().enumerate() {
            offsets.push(off);
            off += n * n;
            for p in 0..n {
                basis.push(BasisLabel {
                    block: b,
                    p,
                    q: p,
                    kind: BasisKind::Diagonal,
                });
            }
            for p in 0..n {
                for q in p + 1..n {
                    for kind in [BasisKind::Symmetric, BasisKind::Antisymmetric] {
                        basis.push(BasisLabel { block: b, p, q, kind });
                    }
                }
            }
        }
        Ok(Self {
            blocks,
            offsets,
            basis,
        })
    }

    /// `ℂᴺ` as `N` one-dimensional blocks.
    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Real dimension of the Hermitian part, `Σ n_b²`.
    pub fn herm_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_labels(&self) -> &[BasisLabel] {
        &self.basis
    }

    /// Global index of the matrix unit `e_pq` of block `b`.
    pub fn unit_index(&self, b: usize, p: usize, q: usize) -> usize {
        self.offsets[b] + p * self.blocks[b] + q
    }

    /// `(block, p, q)` of a global matrix-unit index.
    pub fn unit_position(&self, idx: usize) -> (usize, usize, usize) {
        let b = self.offsets.partition_point(|&o| o <= idx) - 1;
        let n = self.blocks[b];
        let r = idx - self.offsets[b];
        (b, r / n, r % n)
    }

    /// Expansion of Hermitian basis element `k` in global matrix-unit indices.
    pub fn basis_unit_terms(&self, k: usize) -> Vec<(usize, C64)> {
        let l = self.basis[k];
        let off = self.offsets[l.block];
        l.unit_terms(self.blocks[l.block])
            .into_iter()
            .map(|(u, t)| (off + u, t))
            .collect()
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.blocks.iter().map(|&n| CMat::zeros(n, n)).collect(),
        }
    }

    pub fn identity(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.blocks.iter().map(|&n| CMat::identity(n, n)).collect(),
        }
    }

    /// Hermitian element `Σ x_k h_k`.
    pub fn element_from_coords(&self, x: &[f64]) -> Result<AlgebraElement> {
        if x.len() != self.herm_dim() {
            return Err(Error::Shape(format!(
                "expected {} Hermitian coordinates, got {}",
                self.herm_dim(),
                x.len()
            )));
        }
        let mut a = self.zero();
        for (k, &xk) in x.iter().enumerate() {
            let l = self.basis[k];
            let n = self.blocks[l.block];
            for (u, t) in l.unit_terms(n) {
                a.blocks[l.block][(u / n, u % n)] += t * xk;
            }
        }
        Ok(a)
    }

    /// Coordinates `Re Tr(h_k a)`; exact for Hermitian `a`.
    pub fn coords_of(&self, a: &AlgebraElement) -> Result<Vec<f64>> {
        self.check_element(a)?;
        Ok((0..self.herm_dim())
            .map(|k| {
                let l = self.basis[k];
                let n = self.blocks[l.block];
                l.unit_terms(n)
                    .into_iter()
                    .map(|(u, t)| (t * a.blocks[l.block][(u % n, u / n)]).re)
                    .sum()
            })
            .collect())
    }

    /// Complex coefficients of `a` on the global matrix units.
    pub fn unit_coefficients(&self, a: &AlgebraElement) -> Vec<C64> {
        a.blocks
            .iter()
            .flat_map(|m| m.transpose().iter().copied().collect::<Vec<_>>())
            .collect()
    }

    pub fn check_element(&self, a: &AlgebraElement) -> Result<()> {
        if a.blocks.len() != self.blocks.len()
            || a.blocks
                .iter()
                .zip(&self.blocks)
                .any(|(m, &n)| m.nrows() != n || m.ncols() != n)
        {
            return Err(Error::Shape(format!(
                "element does not match algebra blocks {:?}",
                self.blocks
            )));
        }
        Ok(())
    }

    pub fn check_state(&self, s: &State) -> Result<()> {
        if s.densities.len() != self.blocks.len()
            || s.densities
                .iter()
                .zip(&self.blocks)
                .any(|(m, &n)| m.nrows() != n)
        {
            return Err(Error::Shape(format!(
                "state does not match algebra blocks {:?}",
                self.blocks
            )));
        }
        Ok(())
    }

    /// Blockwise tensor product; block `(i, j)` sits at index `i·B₂ + j`.
    pub fn tensor(&self, other: &Algebra) -> Algebra {
        let blocks = self
            .blocks
            .iter()
            .flat_map(|&n| other.blocks.iter().map(move |&m| n * m))
            .collect();
        Algebra::new(blocks).expect("tensor of valid algebras")
    }
}

/// The Hermitian coordinate basis, orthonormal for the summed Frobenius product.
pub fn hermitian_basis(algebra: &Algebra) -> Vec<AlgebraElement> {
    (0..algebra.herm_dim())
        .map(|k| {
            let mut x = vec![0.0; algebra.herm_dim()];
            x[k] = 1.0;
            algebra.element_from_coords(&x).expect("sized coordinates")
        })
        .collect()
}

/// Element of a block algebra, stored as one complex matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    blocks: Vec<CMat>,
}

impl AlgebraElement {
    pub fn new(algebra: &Algebra, blocks: Vec<CMat>) -> Result<Self> {
        let a = Self { blocks };
        algebra.check_element(&a)?;
        Ok(a)
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    /// Diagonal element `(z₁, …, z_N)` of a commutative algebra.
    pub fn diagonal(algebra: &Algebra, z: &[C64]) -> Result<Self> {
        if algebra.blocks().iter().any(|&n| n != 1) || z.len() != algebra.num_blocks() {
            return Err(Error::Shape("diagonal element needs ℂᴺ and N values".into()));
        }
        Ok(Self {
            blocks: z.iter().map(|&v| CMat::from_element(1, 1, v)).collect(),
        })
    }

    pub fn is_hermitian(&self) -> bool {
        self.blocks
            .iter()
            .all(|m| max_abs_diff(m, &m.adjoint()) <= HERMITIAN_TOL)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|m| m * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| m.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }
}

/// Positive normalized functional `a ↦ Σ_b w_b Tr(ρ_b a_b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    weights: Vec<f64>,
    densities: Vec<CMat>,
    vector: Option<(usize, CVec)>,
}

impl State {
    pub fn new(algebra: &Algebra, weights: Vec<f64>, densities: Vec<CMat>) -> Result<Self> {
        if weights.len() != algebra.num_blocks() {
            return Err(Error::Shape("one weight per block required".into()));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(invalid("weights must be nonnegative"));
        }
        if (weights.iter().sum::<f64>() - 1.0).abs() > TRACE_TOL {
            return Err(invalid("weights must sum to 1"));
        }
        let s = Self {
            weights,
            densities,
            vector: None,
        };
        algebra.check_state(&s)?;
        for (b, rho) in s.densities.iter().enumerate() {
            if max_abs_diff(rho, &rho.adjoint()) > HERMITIAN_TOL {
                return Err(invalid(format!("density of block {b} is not Hermitian")));
            }
            if (rho.trace().re - 1.0).abs() > TRACE_TOL {
                return Err(invalid(format!("density of block {b} must have unit trace")));
            }
            if hermitian_eigenvalues(rho).first().copied().unwrap_or(0.0) < -PSD_TOL {
                return Err(invalid(format!("density of block {b} is not positive")));
            }
        }
        Ok(s)
    }

    /// Vector state `a ↦ ⟨ξ, a_b ξ⟩ / ⟨ξ, ξ⟩` supported on block `b`.
    pub fn pure(algebra: &Algebra, block: usize, vector: &[C64]) -> Result<Self> {
        if block >= algebra.num_blocks() {
            return Err(invalid(format!("block {block} out of range")));
        }
        let n = algebra.blocks()[block];
        if vector.len() != n {
            return Err(Error::Shape(format!(
                "vector of length {} for block of size {n}",
                vector.len()
            )));
        }
        let norm = vector.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("pure state vector must be nonzero"));
        }
        let mut xi = CVec::from_iterator(n, vector.iter().map(|v| v / norm));
        if let Some(first) = xi.iter().find(|v| v.norm() > 1e-15).copied() {
            let phase = first.conj() / first.norm();
            xi *= phase;
        }
        let weights = (0..algebra.num_blocks())
            .map(|b| if b == block { 1.0 } else { 0.0 })
            .collect();
        let densities = algebra
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, &m)| {
                if b == block {
                    &xi * xi.adjoint()
                } else {
                    CMat::identity(m, m) * c(1.0 / m as f64, 0.0)
                }
            })
            .collect();
        Ok(Self {
            weights,
            densities,
            vector: Some((block, xi)),
        })
    }

    /// Point evaluation `δ_i` on a block of size one.
    pub fn point(algebra: &Algebra, i: usize) -> Result<Self> {
        if algebra.blocks().get(i) != Some(&1) {
            return Err(invalid(format!("block {i} is not one-dimensional")));
        }
        Self::pure(algebra, i, &[ONE])
    }

    /// Probability vector on `ℂᴺ`.
    pub fn distribution(algebra: &Algebra, p: &[f64]) -> Result<Self> {
        if algebra.blocks().iter().any(|&n| n != 1) {
            return Err(invalid("distribution states need a commutative algebra"));
        }
        Self::new(
            algebra,
            p.to_vec(),
            p.iter().map(|_| CMat::from_element(1, 1, ONE)).collect(),
        )
    }

    /// Rebuilds a state from its values on the global matrix units.
    pub fn from_unit_values(algebra: &Algebra, values: &[C64]) -> Result<Self> {
        if values.len() != algebra.herm_dim() {
            return Err(Error::Shape("one value per matrix unit required".into()));
        }
        let mut weights = Vec::new();
        let mut densities = Vec::new();
        for (b, &n) in algebra.blocks().iter().enumerate() {
            let m = CMat::from_fn(n, n, |r, col| values[algebra.unit_index(b, col, r)]);
            let m = (&m + m.adjoint()) * c(0.5, 0.0);
            let w = m.trace().re;
            if w > 1e-14 {
                weights.push(w);
                densities.push(m / c(w, 0.0));
            } else {
                weights.push(0.0);
                densities.push(CMat::identity(n, n) * c(1.0 / n as f64, 0.0));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("functional has total weight {total}, not 1")));
        }
        for w in &mut weights {
            *w /= total;
        }
        Self::new(algebra, weights, densities)
    }

    /// Normalized Gaussian vector in `block`.
    pub fn random_pure<R: Rng + ?Sized>(algebra: &Algebra, block: usize, rng: &mut R) -> Self {
        let n = algebra.blocks()[block];
        let v = random_vector(n, rng);
        Self::pure(algebra, block, &v).expect("nonzero Gaussian vector")
    }

    /// Random weights and full-rank densities `G G† / Tr`.
    pub fn random_mixed<R: Rng + ?Sized>(algebra: &Algebra, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..algebra.num_blocks())
            .map(|_| rng.random::<f64>() + 0.05)
            .collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let drift = 1.0 - weights.iter().sum::<f64>();
        weights[0] += drift;
        let densities = algebra
            .blocks()
            .iter()
            .map(|&n| {
                let g = CMat::from_fn(n, n, |_, _| gaussian_c(rng));
                let m = &g * g.adjoint();
                let t = m.trace().re;
                m / c(t, 0.0)
            })
            .collect();
        Self::new(algebra, weights, densities).expect("random state is valid")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn densities(&self) -> &[CMat] {
        &self.densities
    }

    /// Block and phase-normalized vector of a pure vector state.
    pub fn vector(&self) -> Option<(usize, &CVec)> {
        self.vector.as_ref().map(|(b, v)| (*b, v))
    }

    pub fn is_pure(&self) -> bool {
        let support: Vec<usize> = (0..self.weights.len())
            .filter(|&b| self.weights[b] > TRACE_TOL)
            .collect();
        if support.len() != 1 || (self.weights[support[0]] - 1.0).abs() > TRACE_TOL {
            return false;
        }
        let ev = hermitian_eigenvalues(&self.densities[support[0]]);
        ev.last().is_some_and(|&top| (top - 1.0).abs() < 1e-9)
    }

    pub fn eval(&self, a: &AlgebraElement) -> Result<C64> {
        if a.blocks.len() != self.densities.len()
            || a.blocks
                .iter()
                .zip(&self.densities)
                .any(|(x, r)| x.nrows() != r.nrows() || x.ncols() != r.ncols())
        {
            return Err(Error::Shape("state and element shapes differ".into()));
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.densities)
            .zip(&a.blocks)
            .map(|((&w, rho), x)| (rho * x).trace() * w)
            .sum())
    }

    /// Values `φ(e_pq)` on the global matrix units.
    pub fn unit_values(&self) -> Vec<C64> {
        self.weights
            .iter()
            .zip(&self.densities)
            .flat_map(|(&w, rho)| {
                let n = rho.nrows();
                (0..n * n).map(move |u| rho[(u % n, u / n)] * w)
            })
            .collect()
    }

    /// Values `φ(h_k)` on the Hermitian basis.
    pub fn functional(&self, algebra: &Algebra) -> Result<Vec<f64>> {
        algebra.check_state(self)?;
        let uv = self.unit_values();
        Ok((0..algebra.herm_dim())
            .map(|k| {
                algebra
                    .basis_unit_terms(k)
                    .into_iter()
                    .map(|(u, t)| (t * uv[u]).re)
                    .sum()
            })
            .collect())
    }

    /// Product state on the tensor algebra (block order of [`Algebra::tensor`]).
    pub fn tensor(&self, other: &State) -> State {
        let mut weights = Vec::new();
        let mut densities = Vec::new();
        for (w1, r1) in self.weights.iter().zip(&self.densities) {
            for (w2, r2) in other.weights.iter().zip(&other.densities) {
                weights.push(w1 * w2);
                densities.push(r1.kronecker(r2));
            }
        }
        let vector = match (&self.vector, &other.vector) {
            (Some((b1, v1)), Some((b2, v2))) => {
                Some((b1 * other.weights.len() + b2, v1.kronecker(v2)))
            }
            _ => None,
        };
        State {
            weights,
            densities,
            vector,
        }
    }

    /// Pullback `a ↦ φ(u a u*)` by an inner automorphism.
    pub fn pullback_by_unitary(&self, u: &AlgebraElement) -> Result<State> {
        if u.blocks.len() != self.densities.len() {
            return Err(Error::Shape("unitary and state shapes differ".into()));
        }
        let densities = self
            .densities
            .iter()
            .zip(&u.blocks)
            .map(|(rho, ub)| ub.adjoint() * rho * ub)
            .collect();
        let vector = self
            .vector
            .as_ref()
            .map(|(b, v)| (*b, u.blocks[*b].adjoint() * v));
        Ok(State {
            weights: self.weights.clone(),
            densities,
            vector,
        })
    }
}

/// `λ·s0 + (1-λ)·s1`.
pub fn mix_states(s0: &State, s1: &State, lambda: f64) -> Result<State> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid(format!("mixing parameter {lambda} outside [0, 1]")));
    }
    if s0.densities.len() != s1.densities.len()
        || s0
            .densities
            .iter()
            .zip(&s1.densities)
            .any(|(a, b)| a.nrows() != b.nrows())
    {
        return Err(Error::Shape("states live on different algebras".into()));
    }
    if lambda == 1.0 {
        return Ok(s0.clone());
    }
    if lambda == 0.0 {
        return Ok(s1.clone());
    }
    let mut weights = Vec::new();
    let mut densities = Vec::new();
    for b in 0..s0.weights.len() {
        let w = lambda * s0.weights[b] + (1.0 - lambda) * s1.weights[b];
        let n = s0.densities[b].nrows();
        if w > 0.0 {
            let m = &s0.densities[b] * c(lambda * s0.weights[b], 0.0)
                + &s1.densities[b] * c((1.0 - lambda) * s1.weights[b], 0.0);
            densities.push(m / c(w, 0.0));
        } else {
            densities.push(CMat::identity(n, n) * c(1.0 / n as f64, 0.0));
        }
        weights.push(w);
    }
    Ok(State {
        weights,
        densities,
        vector: None,
    })
}

/// Point of the closed unit ball of `ℝ³`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Radius of the projection on the equatorial plane.
    pub fn r(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Phase `Ξ` with `r e^{iΞ} = x + iy`.
    pub fn phase(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Pauli expectations `(Tr ρσ₁, Tr ρσ₂, Tr ρσ₃)` of a state of `M₂`.
pub fn bloch_of_state(state: &State) -> Result<BlochPoint> {
    if state.densities.len() != 1 || state.densities[0].nrows() != 2 {
        return Err(invalid("Bloch coordinates need a state of M₂"));
    }
    let rho = &state.densities[0];
    Ok(BlochPoint {
        x: 2.0 * rho[(0, 1)].re,
        y: -2.0 * rho[(0, 1)].im,
        z: (rho[(0, 0)] - rho[(1, 1)]).re,
    })
}

/// `ρ = ½(I + xσ₁ + yσ₂ + zσ₃)`.
pub fn state_of_bloch(p: BlochPoint) -> Result<State> {
    let norm = p.norm();
    if norm > 1.0 + 1e-10 || !norm.is_finite() {
        return Err(invalid(format!("Bloch point of norm {norm} outside the ball")));
    }
    let rho = CMat::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + p.z), 0.0),
            c(0.5 * p.x, -0.5 * p.y),
            c(0.5 * p.x, 0.5 * p.y),
            c(0.5 * (1.0 - p.z), 0.0),
        ],
    );
    let algebra = Algebra::new(vec![2])?;
    let mut s = State {
        weights: vec![1.0],
        densities: vec![rho],
        vector: None,
    };
    if (norm - 1.0).abs() <= 1e-12 {
        // pure: pick the eigenvector of eigenvalue one
        let theta = p.z.clamp(-1.0, 1.0).acos();
        let v = [
            c((theta / 2.0).cos(), 0.0),
            (I * p.phase()).exp() * (theta / 2.0).sin(),
        ];
        let pure = State::pure(&algebra, 0, &v)?;
        s.vector = pure.vector;
    }
    Ok(s)
}

pub(crate) fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// Gaussian complex vector, rejecting the null vector.
pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gaussian_c(rng)).collect();
        if v.iter().any(|x| x.norm() > 1e-12) {
            return v;
        }
    }
}

/// `Σ w_b ρ_b` pulled back to a plain value `φ(a)` for Hermitian `a` given in coordinates.
pub fn eval_coords(functional: &[f64], x: &[f64]) -> f64 {
    functional.iter().zip(x).map(|(f, v)| f * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frob_inner(a: &AlgebraElement, b: &AlgebraElement) -> C64 {
        a.blocks
            .iter()
            .zip(&b.blocks)
            .map(|(x, y)| (x.adjoint() * y).trace())
            .sum()
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(hermitian_basis(&Algebra::new(vec![1, 1]).unwrap()).len(), 2);
        assert_eq!(hermitian_basis(&Algebra::new(vec![2]).unwrap()).len(), 4);
        assert_eq!(Algebra::new(vec![2, 1]).unwrap().herm_dim(), 5);
        let b = hermitian_basis(&Algebra::new(vec![1, 1]).unwrap());
        assert_eq!(b[0].blocks()[0][(0, 0)], ONE);
        assert_eq!(b[0].blocks()[1][(0, 0)], ZERO);
    }

    #[test]
    fn basis_is_orthonormal_and_hermitian() {
        let alg = Algebra::new(vec![3, 1, 2]).unwrap();
        let basis = hermitian_basis(&alg);
        for (i, a) in basis.iter().enumerate() {
            assert!(a.is_hermitian());
            for (j, b) in basis.iter().enumerate() {
                let g = frob_inner(a, b);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let alg = Algebra::new(vec![2, 3]).unwrap();
        let x: Vec<f64> = (0..alg.herm_dim()).map(|k| (k as f64).sin()).collect();
        let a = alg.element_from_coords(&x).unwrap();
        let back = alg.coords_of(&a).unwrap();
        for (u, v) in x.iter().zip(&back) {
            assert!((u - v).abs() < 1e-12);
        }
        let units = alg.unit_coefficients(&a);
        let (b, p, q) = alg.unit_position(7);
        assert_eq!(units[7], a.blocks()[b][(p, q)]);
    }

    #[test]
    fn evaluations() {
        let m2 = Algebra::new(vec![2]).unwrap();
        let xi = State::pure(&m2, 0, &[ONE, ZERO]).unwrap();
        let mut e11 = m2.zero();
        e11.blocks[0][(0, 0)] = ONE;
        assert!((xi.eval(&e11).unwrap() - ONE).norm() < 1e-15);
        let mixed = State::new(&m2, vec![1.0], vec![CMat::identity(2, 2) * c(0.5, 0.0)]).unwrap();
        assert!((mixed.eval(&e11).unwrap().re - 0.5).abs() < 1e-15);
        let c2 = Algebra::commutative(2).unwrap();
        let a = AlgebraElement::diagonal(&c2, &[c(3.0, 0.0), c(7.0, 0.0)]).unwrap();
        let d1 = State::point(&c2, 0).unwrap();
        assert_eq!(d1.eval(&a).unwrap(), c(3.0, 0.0));
        assert!(xi.is_pure());
        assert!(!mixed.is_pure());
    }

    #[test]
    fn mixing() {
        let c2 = Algebra::commutative(2).unwrap();
        let d1 = State::point(&c2, 0).unwrap();
        let d2 = State::point(&c2, 1).unwrap();
        assert_eq!(mix_states(&d1, &d2, 1.0).unwrap(), d1);
        let a = AlgebraElement::diagonal(&c2, &[c(3.0, 0.0), c(7.0, 0.0)]).unwrap();
        let mid = mix_states(&d1, &d2, 0.5).unwrap();
        assert!((mid.eval(&a).unwrap().re - 5.0).abs() < 1e-14);
        assert!(mix_states(&d1, &d2, 1.5).is_err());
        let m2 = Algebra::new(vec![2]).unwrap();
        let up = State::pure(&m2, 0, &[ONE, ZERO]).unwrap();
        let down = State::pure(&m2, 0, &[ZERO, ONE]).unwrap();
        let half = mix_states(&up, &down, 0.5).unwrap();
        let target = CMat::identity(2, 2) * c(0.5, 0.0);
        assert!(max_abs_diff(&half.densities()[0], &target) < 1e-15);
    }

    #[test]
    fn bloch_examples() {
        let m2 = Algebra::new(vec![2]).unwrap();
        let north = State::pure(&m2, 0, &[ONE, ZERO]).unwrap();
        let p = bloch_of_state(&north).unwrap();
        assert!((p.z - 1.0).abs() < 1e-15 && p.x.abs() < 1e-15);
        let h = FRAC_1_SQRT_2;
        let eq = State::pure(&m2, 0, &[c(h, 0.0), c(h, 0.0)]).unwrap();
        let p = bloch_of_state(&eq).unwrap();
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15 && p.z.abs() < 1e-15);
        let centre = state_of_bloch(BlochPoint::new(0.0, 0.0, 0.0)).unwrap();
        let p = bloch_of_state(&centre).unwrap();
        assert!(p.norm() < 1e-15);
        assert!(state_of_bloch(BlochPoint::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn bloch_round_trip_on_pure_states() {
        let m2 = Algebra::new(vec![2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = State::random_pure(&m2, 0, &mut rng);
            let p = bloch_of_state(&s).unwrap();
            assert!((p.norm() - 1.0).abs() < 1e-12);
            let back = state_of_bloch(p).unwrap();
            let f0 = s.functional(&m2).unwrap();
            let f1 = back.functional(&m2).unwrap();
            for (a, b) in f0.iter().zip(&f1) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!(back.is_pure());
        }
    }

    #[test]
    fn unit_values_rebuild_state() {
        let alg = Algebra::new(vec![2, 1, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = State::random_mixed(&alg, &mut rng);
        let back = State::from_unit_values(&alg, &s.unit_values()).unwrap();
        for (a, b) in s.densities().iter().zip(back.densities()) {
            assert!(max_abs_diff(a, b) < 1e-12);
        }
    }

    #[test]
    fn invalid_states_rejected() {
        let c2 = Algebra::commutative(2).unwrap();
        assert!(State::distribution(&c2, &[0.7, 0.7]).is_err());
        assert!(State::distribution(&c2, &[1.2, -0.2]).is_err());
        assert!(State::pure(&c2, 0, &[ZERO]).is_err());
        assert!(Algebra::new(vec![]).is_err());
        assert!(Algebra::new(vec![2, 0]).is_err());
    }
}
