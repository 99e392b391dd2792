//! Finiteness test and the supremum `sup { φ(a) - φ'(a) : ‖[D, π(a)]‖ ≤ 1 }`.
//!
//! The supremum is computed on the quotient of the Hermitian coordinates by
//! `Ker L_D`, where `L_D` is a norm, by a log-barrier method on the linear
//! matrix inequalities `I ∓ i[D, π(a)] ⪰ 0` (one of them suffices when a
//! grading is present). Each run returns a feasible element (lower bound) and a
//! dual matrix `Y` with `‖Y‖₁` as upper bound.

use nalgebra::Cholesky;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{mix_states, AlgebraElement, State};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, hermitian_trace_norm, CMat, RMat, RVec};
use crate::sdp::{follow_central_path, newton_direction, Barrier, Control, PathOptions};
use crate::triple::{kernel_split, KernelSplit, LipschitzMap, SpectralTriple, DEFAULT_KERNEL_TOL};

/// Tunables for [`spectral_distance`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Target `(upper - lower)/lower` of the certificate.
    pub rel_tolerance: f64,
    /// Restart count for randomized searches; the barrier path is deterministic.
    pub multistarts: usize,
    /// Budget of Newton steps.
    pub max_iterations: usize,
    pub seed: u64,
    /// Relative singular-value threshold defining `Ker L_D`.
    pub kernel_tolerance: f64,
    /// Largest `|φ(k) - φ'(k)|` on a unit kernel element still counted as equal.
    pub finiteness_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-6,
            multistarts: 16,
            max_iterations: 5000,
            seed: 0,
            kernel_tolerance: DEFAULT_KERNEL_TOL,
            finiteness_tolerance: 1e-9,
        }
    }
}

impl SolverOptions {
    pub fn with_rel_tolerance(mut self, tol: f64) -> Self {
        self.rel_tolerance = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = self.rel_tolerance > 0.0
            && self.multistarts > 0
            && self.max_iterations > 0
            && self.kernel_tolerance > 0.0
            && self.finiteness_tolerance > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("solver options must be positive".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    Finite(f64),
    Infinite,
}

/// Outcome of a distance computation with its certificate.
#[derive(Clone, Debug)]
pub struct DistanceResult {
    pub outcome: Outcome,
    /// Hermitian element with `L_D ≤ 1` attaining `attained` (finite case).
    pub optimal_element: Option<AlgebraElement>,
    /// `φ(a) - φ'(a)` for the optimal element; equals the reported value.
    pub attained: Option<f64>,
    /// Dual upper bound on the supremum.
    pub upper_bound: Option<f64>,
    /// `upper_bound - attained`.
    pub gap_estimate: Option<f64>,
    /// Kernel element separating the states (infinite case).
    pub witness: Option<AlgebraElement>,
    /// `|φ(k) - φ'(k)|` for the witness.
    pub witness_gap: Option<f64>,
    /// Newton steps taken.
    pub iterations: usize,
}

impl DistanceResult {
    pub fn value(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Finite(v) => Some(v),
            Outcome::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.outcome, Outcome::Infinite)
    }

    fn finite(value: f64, element: AlgebraElement, upper: f64, iterations: usize) -> Self {
        Self {
            outcome: Outcome::Finite(value),
            optimal_element: Some(element),
            attained: Some(value),
            upper_bound: Some(upper),
            gap_estimate: Some((upper - value).max(0.0)),
            witness: None,
            witness_gap: None,
            iterations,
        }
    }
}

/// Verdict of the kernel test.
#[derive(Clone, Debug)]
pub struct Finiteness {
    pub finite: bool,
    /// Unit kernel element with the largest `|φ(k) - φ'(k)|`.
    pub witness: Option<AlgebraElement>,
    pub witness_gap: f64,
}

/// `d(φ, φ') < ∞` iff `φ` and `φ'` agree on `Ker L_D` (within `tol`).
pub fn is_finite(t: &SpectralTriple, phi: &State, phi2: &State, tol: f64) -> Result<Finiteness> {
    let solver = DistanceSolver::new(t, SolverOptions {
        finiteness_tolerance: tol,
        ..SolverOptions::default()
    })?;
    solver.finiteness(phi, phi2)
}

/// Spectral distance between two states.
pub fn spectral_distance(
    t: &SpectralTriple,
    phi: &State,
    phi2: &State,
    opts: &SolverOptions,
) -> Result<DistanceResult> {
    DistanceSolver::new(t, opts.clone())?.distance(phi, phi2)
}

/// Distance engine with the kernel split of one triple cached.
pub struct DistanceSolver<'a> {
    triple: &'a SpectralTriple,
    map: LipschitzMap<'a>,
    split: KernelSplit,
    opts: SolverOptions,
}

impl<'a> DistanceSolver<'a> {
    pub fn new(triple: &'a SpectralTriple, opts: SolverOptions) -> Result<Self> {
        opts.validate()?;
        let split = kernel_split(triple, opts.kernel_tolerance);
        Ok(Self {
            triple,
            map: LipschitzMap::new(triple),
            split,
            opts,
        })
    }

    pub fn triple(&self) -> &SpectralTriple {
        self.triple
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    /// Dimension of `Ker L_D`.
    pub fn kernel_rank(&self) -> usize {
        self.split.kernel.ncols()
    }

    pub(crate) fn functional(&self, phi: &State, phi2: &State) -> Result<RVec> {
        let alg = self.triple.algebra();
        let f1 = phi.functional(alg)?;
        let f2 = phi2.functional(alg)?;
        Ok(RVec::from_iterator(
            f1.len(),
            f1.iter().zip(&f2).map(|(a, b)| a - b),
        ))
    }

    pub fn finiteness(&self, phi: &State, phi2: &State) -> Result<Finiteness> {
        let f = self.functional(phi, phi2)?;
        Ok(self.finiteness_of(&f))
    }

    fn finiteness_of(&self, f: &RVec) -> Finiteness {
        let proj = self.split.kernel.transpose() * f;
        if proj.is_empty() {
            return Finiteness {
                finite: true,
                witness: None,
                witness_gap: 0.0,
            };
        }
        let best = proj.iamax();
        let gap = proj[best].abs();
        let k = self.split.kernel.column(best);
        let element = self
            .triple
            .algebra()
            .element_from_coords(k.as_slice())
            .expect("sized coordinates");
        Finiteness {
            finite: gap <= self.opts.finiteness_tolerance,
            witness: Some(element),
            witness_gap: gap,
        }
    }

    pub fn distance(&self, phi: &State, phi2: &State) -> Result<DistanceResult> {
        let f = self.functional(phi, phi2)?;
        self.distance_for_functional(&f)
    }

    /// Distance for the functional `a ↦ Σ f_k x_k(a)` on Hermitian coordinates.
    pub fn distance_for_functional(&self, f: &RVec) -> Result<DistanceResult> {
        let fin = self.finiteness_of(f);
        if !fin.finite {
            return Ok(DistanceResult {
                outcome: Outcome::Infinite,
                optimal_element: None,
                attained: None,
                upper_bound: None,
                gap_estimate: None,
                witness: fin.witness,
                witness_gap: Some(fin.witness_gap),
                iterations: 0,
            });
        }
        let q = &self.split.complement;
        let cvec = q.transpose() * f;
        let alg = self.triple.algebra();
        if cvec.norm() <= 1e-14 * (1.0 + f.norm()) || q.ncols() == 0 {
            return Ok(DistanceResult::finite(0.0, alg.zero(), 0.0, 0));
        }
        let graded = self.triple.grading().is_some();
        let barrier = LmiBarrier {
            map: &self.map,
            basis: q,
            signs: if graded { vec![1.0] } else { vec![1.0, -1.0] },
        };
        let nu = barrier.nu();
        // initial scale from the direction of c
        let x0 = q * &cvec;
        let l0 = op_norm_herm(&self.map.apply(x0.as_slice()));
        let v0 = cvec.norm_squared() / l0;
        let tol = self.opts.rel_tolerance;
        let path_opts = PathOptions {
            t0: nu / v0,
            mu: 10.0,
            max_newton: self.opts.max_iterations,
            centering_tol: 1e-9,
        };
        let mut best: Option<(f64, RVec, f64)> = None; // (lower, y/L, upper)
        let mut best_upper = f64::INFINITY;
        let mut best_lower = 0.0;
        let result = follow_central_path(&barrier, &cvec, path_opts, |y, t| {
            let cy = cvec.dot(y);
            if cy <= 0.0 || nu / t > 0.5 * tol * cy {
                return Control::Continue;
            }
            let x = q * y;
            let l = op_norm_herm(&self.map.apply(x.as_slice()));
            let lower = cy / l;
            let upper = self.dual_bound(&barrier, y, t, &cvec);
            if lower > best_lower {
                best_lower = lower;
                best = Some((lower, y / l, upper.min(best_upper)));
            }
            best_upper = best_upper.min(upper);
            if let Some(b) = best.as_mut() {
                b.2 = best_upper;
            }
            if best_upper - best_lower <= tol * best_lower {
                Control::Stop
            } else {
                Control::Continue
            }
        });
        match best {
            Some((lower, y, upper)) if upper - lower <= tol * lower => {
                let x = q * y;
                let element = alg.element_from_coords(x.as_slice())?;
                let attained = f.dot(&x);
                Ok(DistanceResult::finite(
                    attained,
                    element,
                    upper.max(attained),
                    result.newton_steps,
                ))
            }
            _ => Err(Error::NonConvergence {
                iterations: result.newton_steps,
                lower: best_lower,
                upper: best_upper,
            }),
        }
    }

    /// Trace norm of a dual matrix built from the central point: the inverse
    /// slacks corrected by one Newton step satisfy `M*(Y) = c` up to rounding,
    /// which a least-squares correction then removes.
    fn dual_bound(&self, barrier: &LmiBarrier, y: &RVec, t: f64, cvec: &RVec) -> f64 {
        let q = barrier.basis;
        let m = barrier.slack(y);
        let size = m.nrows();
        let (g, h) = barrier.derivatives(y);
        let grad = &g - cvec * t;
        let step = match newton_direction(&h, &grad) {
            Some(d) => d,
            None => return f64::INFINITY,
        };
        let delta = self.map.apply((q * step).as_slice());
        let mut dual = CMat::zeros(size, size);
        for &s in &barrier.signs {
            let z = CMat::identity(size, size) - &m * c(s, 0.0);
            let w = match Cholesky::new(z) {
                Some(ch) => ch.inverse(),
                None => return f64::INFINITY,
            };
            let part = &w + &w * &delta * &w * c(s, 0.0);
            dual += part * c(s / t, 0.0);
        }
        let norms = &self.split.complement_norms;
        for _ in 0..2 {
            let resid = cvec - q.transpose() * self.map.adjoint(&dual);
            let w = RVec::from_iterator(
                resid.len(),
                resid.iter().zip(norms).map(|(r, s)| r / (s * s)),
            );
            dual += self.map.apply((q * w).as_slice());
        }
        hermitian_trace_norm(&dual)
    }
}

fn op_norm_herm(m: &CMat) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// `-Σ_s log det(I - s·M(Qy))`.
struct LmiBarrier<'a, 'b> {
    map: &'b LipschitzMap<'a>,
    basis: &'b RMat,
    signs: Vec<f64>,
}

impl LmiBarrier<'_, '_> {
    fn slack(&self, y: &RVec) -> CMat {
        let x = self.basis * y;
        self.map.apply(x.as_slice())
    }
}

impl Barrier for LmiBarrier<'_, '_> {
    fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn nu(&self) -> f64 {
        (self.signs.len() * self.map.size()) as f64
    }

    fn value(&self, y: &RVec) -> Option<f64> {
        let m = self.slack(y);
        let size = m.nrows();
        let mut v = 0.0;
        for &s in &self.signs {
            let z = CMat::identity(size, size) - &m * c(s, 0.0);
            let ch = Cholesky::new(z)?;
            let l = ch.l_dirty();
            for i in 0..size {
                let d = l[(i, i)].re;
                if !(d > 0.0) {
                    return None;
                }
                v -= 2.0 * d.ln();
            }
        }
        Some(v)
    }

    fn derivatives(&self, y: &RVec) -> (RVec, RMat) {
        let m = self.slack(y);
        let size = m.nrows();
        let n = self.map.dim();
        let mut g = RVec::zeros(n);
        let mut h = RMat::zeros(n, n);
        for &s in &self.signs {
            let z = CMat::identity(size, size) - &m * c(s, 0.0);
            let w = Cholesky::new(z).expect("interior point").inverse();
            g += self.map.adjoint(&w) * s;
            h += self.map.hessian(&w);
        }
        let qt = self.basis.transpose();
        (&qt * g, &qt * h * self.basis)
    }
}

/// Best ratio `f(a)/L_D(a)` over random Hermitian directions in the kernel
/// complement, refined by coordinate hill climbing. Returns the certified
/// lower bound and an element with `L_D = 1`.
pub fn oracle_lower_bound(
    t: &SpectralTriple,
    phi: &State,
    phi2: &State,
    samples: usize,
    seed: u64,
) -> Result<(f64, AlgebraElement)> {
    let solver = DistanceSolver::new(t, SolverOptions::default())?;
    let f = solver.functional(phi, phi2)?;
    if !solver.finiteness_of(&f).finite {
        return Err(Error::Precondition("states are at infinite distance".into()));
    }
    let q = &solver.split.complement;
    let alg = t.algebra();
    let cvec = q.transpose() * &f;
    let r = q.ncols();
    if r == 0 || cvec.norm() <= 1e-14 {
        return Ok((0.0, alg.zero()));
    }
    let ratio = |y: &RVec| -> f64 {
        let l = op_norm_herm(&solver.map.apply((q * y).as_slice()));
        if l > 0.0 {
            cvec.dot(y) / l
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_y = RVec::zeros(r);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples.max(1) {
        let mut y = RVec::from_fn(r, |_, _| StandardNormal.sample(&mut rng));
        let norm = y.norm();
        if norm == 0.0 {
            continue;
        }
        y /= norm;
        if cvec.dot(&y) < 0.0 {
            y = -y;
        }
        let v = ratio(&y);
        if v > best {
            best = v;
            best_y = y;
        }
    }
    let mut step = 0.25;
    let mut evals = 0;
    let budget = 20 * samples.max(50);
    while step > 1e-7 && evals < budget {
        let mut improved = false;
        for j in 0..r {
            for sign in [1.0, -1.0] {
                let mut y = best_y.clone();
                y[j] += sign * step;
                let n = y.norm();
                if n == 0.0 {
                    continue;
                }
                y /= n;
                let v = ratio(&y);
                evals += 1;
                if v > best {
                    best = v;
                    best_y = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let l = op_norm_herm(&solver.map.apply((q * &best_y).as_slice()));
    let x = q * (&best_y / l);
    let value = f.dot(&x);
    Ok((value, alg.element_from_coords(x.as_slice())?))
}

/// Distances along a segment of states compared with `|s - t|·d(φ₀, φ₁)`.
#[derive(Clone, Debug)]
pub struct SegmentReport {
    pub base_distance: f64,
    /// `(s, t, d(φ_s, φ_t))` for all grid pairs `s ≤ t`.
    pub pairs: Vec<(f64, f64, f64)>,
    pub max_deviation: f64,
}

/// Checks `d(φ_s, φ_t) = |s - t| d(φ₀, φ₁)` with `φ_s = s φ₀ + (1-s) φ₁`.
pub fn segment_check(
    t: &SpectralTriple,
    phi0: &State,
    phi1: &State,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<SegmentReport> {
    let solver = DistanceSolver::new(t, opts.clone())?;
    let base = solver
        .distance(phi0, phi1)?
        .value()
        .ok_or_else(|| Error::Precondition("segment endpoints are at infinite distance".into()))?;
    let states = grid
        .iter()
        .map(|&s| mix_states(phi0, phi1, s))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    let mut dev: f64 = 0.0;
    for i in 0..grid.len() {
        for j in i..grid.len() {
            let d = solver
                .distance(&states[i], &states[j])?
                .value()
                .ok_or_else(|| Error::Precondition("segment left the connected component".into()))?;
            dev = dev.max((d - (grid[i] - grid[j]).abs() * base).abs());
            pairs.push((grid[i], grid[j], d));
        }
    }
    Ok(SegmentReport {
        base_distance: base,
        pairs,
        max_deviation: dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::state_of_bloch;
    use crate::algebra::BlochPoint;
    use crate::linalg::{ONE, ZERO};
    use crate::triple::{graph_triple, m2_diagonal_triple, truncated_moyal_triple, two_point_triple};

    fn complete(n: usize, k: f64) -> SpectralTriple {
        let w: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { k }).collect())
            .collect();
        graph_triple(&w).unwrap()
    }

    #[test]
    fn two_point_value() {
        let t = two_point_triple(c(2.0, 0.0));
        let a = State::point(t.algebra(), 0).unwrap();
        let b = State::point(t.algebra(), 1).unwrap();
        let r = spectral_distance(&t, &a, &b, &SolverOptions::default()).unwrap();
        assert!((r.value().unwrap() - 0.5).abs() < 1e-6);
        let el = r.optimal_element.unwrap();
        assert!(crate::triple::seminorm(&t, &el).unwrap() <= 1.0 + 1e-8);
    }

    #[test]
    fn complete_graph_value() {
        let t = complete(4, 1.0);
        let a = State::point(t.algebra(), 0).unwrap();
        let b = State::point(t.algebra(), 2).unwrap();
        let r = spectral_distance(&t, &a, &b, &SolverOptions::default()).unwrap();
        assert!((r.value().unwrap() - 0.5f64.sqrt()).abs() < 1e-6, "{:?}", r.value());
        assert!(r.gap_estimate.unwrap() <= 1e-6 * r.value().unwrap());
    }

    #[test]
    fn infinite_verdicts() {
        let t = two_point_triple(ZERO);
        let a = State::point(t.algebra(), 0).unwrap();
        let b = State::point(t.algebra(), 1).unwrap();
        let r = spectral_distance(&t, &a, &b, &SolverOptions::default()).unwrap();
        assert!(r.is_infinite());
        assert!(r.witness_gap.unwrap() > 0.5);
        assert!(!is_finite(&t, &a, &b, 1e-9).unwrap().finite);
        let m2 = m2_diagonal_triple(1.0, 2.0);
        let p = state_of_bloch(BlochPoint::new(0.6, 0.0, 0.8)).unwrap();
        let q = state_of_bloch(BlochPoint::new(0.0, 0.6, -0.8)).unwrap();
        assert!(!is_finite(&m2, &p, &q, 1e-9).unwrap().finite);
    }

    #[test]
    fn moyal_poles() {
        let t = truncated_moyal_triple(2, 2.0).unwrap();
        let alg = t.algebra();
        let n = State::pure(alg, 0, &[ONE, ZERO]).unwrap();
        let s = State::pure(alg, 0, &[ZERO, ONE]).unwrap();
        let r = spectral_distance(&t, &n, &s, &SolverOptions::default()).unwrap();
        assert!((r.value().unwrap() - 1.0).abs() < 1e-6, "{:?}", r.value());
    }

    #[test]
    fn oracle_examples() {
        let t = two_point_triple(ONE);
        let a = State::point(t.algebra(), 0).unwrap();
        let b = State::point(t.algebra(), 1).unwrap();
        let (v, _) = oracle_lower_bound(&t, &a, &b, 2000, 1).unwrap();
        assert!((0.999..=1.0 + 1e-9).contains(&v));
        let (z, _) = oracle_lower_bound(&t, &a, &a, 100, 1).unwrap();
        assert_eq!(z, 0.0);
        let t3 = complete(3, 1.0);
        let a = State::point(t3.algebra(), 0).unwrap();
        let b = State::point(t3.algebra(), 1).unwrap();
        let (v, _) = oracle_lower_bound(&t3, &a, &b, 5000, 2).unwrap();
        assert!(v >= 0.999 * (2.0f64 / 3.0).sqrt());
    }

    #[test]
    fn segment_examples() {
        let t = two_point_triple(ONE);
        let a = State::point(t.algebra(), 0).unwrap();
        let b = State::point(t.algebra(), 1).unwrap();
        let rep = segment_check(&t, &a, &b, &[0.0, 0.5], &SolverOptions::default()).unwrap();
        assert!(rep.max_deviation < 1e-6);
        let half = rep.pairs.iter().find(|p| p.0 == 0.0 && p.1 == 0.5).unwrap();
        assert!((half.2 - 0.5).abs() < 1e-6);
    }
}
