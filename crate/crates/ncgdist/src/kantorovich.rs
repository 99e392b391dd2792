//! Outer approximation of the Monge-Kantorovich functional
//! `W_D(φ, φ') = sup { |φ(a) − φ'(a)| : |ω₁(a) − ω₂(a)| ≤ d_D(ω₁, ω₂) for all pure ω₁, ω₂ }`
//! by a finite sample of pure-state pairs.
//!
//! Each sampled pair contributes the two linear constraints `±g·x ≤ b` on the
//! Hermitian coordinates `x`. The supremum over the resulting polyhedron is an
//! upper bound on `W_D`, which in turn bounds the spectral distance from above.

use nalgebra::Cholesky;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::State;
use crate::error::{invalid, Error, Result};
use crate::linalg::{RMat, RVec};
use crate::sdp::{follow_central_path, Barrier, Control, PathOptions};
use crate::solver::{DistanceSolver, Outcome, SolverOptions};
use crate::triple::SpectralTriple;

/// Two pure states and their spectral distance.
#[derive(Clone, Debug)]
pub struct PurePairConstraint {
    pub first: State,
    pub second: State,
    pub bound: f64,
}

/// Functionals closer than this are treated as equal when deduplicating.
const SAME_FUNCTIONAL_TOL: f64 = 1e-12;

fn difference(solver: &DistanceSolver, a: &State, b: &State) -> Result<RVec> {
    solver.functional(a, b)
}

/// Constraint for a pair, or `None` when the pair is at infinite distance.
pub fn pair_constraint(
    t: &SpectralTriple,
    first: State,
    second: State,
    opts: &SolverOptions,
) -> Result<Option<PurePairConstraint>> {
    let solver = DistanceSolver::new(t, opts.clone())?;
    let r = solver.distance(&first, &second)?;
    Ok(match r.outcome {
        Outcome::Finite(_) => Some(PurePairConstraint {
            bound: r.upper_bound.unwrap_or(r.attained.unwrap_or(0.0)),
            first,
            second,
        }),
        Outcome::Infinite => None,
    })
}

/// Draws pure states (a uniformly chosen block, then a normalized Gaussian
/// vector), pairs them, and keeps up to `count` distinct pairs at finite
/// nonzero distance. Pairs are generated sequentially from `seed`; their
/// distances are computed in parallel.
pub fn sample_pure_pairs(
    t: &SpectralTriple,
    count: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<Vec<PurePairConstraint>> {
    if count == 0 {
        return Err(invalid("pair count must be at least 1"));
    }
    let alg = t.algebra();
    let solver = DistanceSolver::new(t, opts.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = 10 * count;
    let mut candidates: Vec<(State, State)> = Vec::new();
    let mut seen: Vec<RVec> = Vec::new();
    for _ in 0..attempts {
        if candidates.len() == count {
            break;
        }
        let b1 = rng.random_range(0..alg.num_blocks());
        let b2 = rng.random_range(0..alg.num_blocks());
        let s1 = State::random_pure(alg, b1, &mut rng);
        let s2 = State::random_pure(alg, b2, &mut rng);
        let g = difference(&solver, &s1, &s2)?;
        if g.norm() <= SAME_FUNCTIONAL_TOL {
            continue;
        }
        if seen
            .iter()
            .any(|h| (h - &g).norm() <= SAME_FUNCTIONAL_TOL || (h + &g).norm() <= SAME_FUNCTIONAL_TOL)
        {
            continue;
        }
        if !solver.finiteness(&s1, &s2)?.finite {
            continue;
        }
        seen.push(g);
        candidates.push((s1, s2));
    }
    if candidates.is_empty() {
        return Err(Error::Precondition(format!(
            "no pair of pure states at finite distance found in {attempts} draws"
        )));
    }
    let computed: Vec<Result<Option<PurePairConstraint>>> = candidates
        .into_par_iter()
        .map(|(a, b)| pair_constraint(t, a, b, opts))
        .collect();
    let mut out = Vec::with_capacity(computed.len());
    for c in computed {
        if let Some(c) = c? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Bracket on `W_D` from a finite constraint set.
#[derive(Clone, Debug)]
pub struct KantorovichBound {
    /// Upper bound on the supremum over the constraint polyhedron, or infinite
    /// when the functional is unbounded there.
    pub upper: Outcome,
    /// Objective at the best feasible point found.
    pub feasible_value: Option<f64>,
    /// `upper − feasible_value`.
    pub gap: Option<f64>,
    /// Hermitian coordinates of the best feasible element.
    pub element: Option<Vec<f64>>,
    pub constraints_used: usize,
}

/// `-Σ log(b_i − a_i·y) − Σ log(b_i + a_i·y)`.
struct SlabBarrier<'a> {
    a: &'a RMat,
    b: &'a RVec,
}

impl SlabBarrier<'_> {
    fn slacks(&self, y: &RVec) -> (RVec, RVec) {
        let ay = self.a * y;
        (self.b - &ay, self.b + &ay)
    }
}

impl Barrier for SlabBarrier<'_> {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn nu(&self) -> f64 {
        2.0 * self.a.nrows() as f64
    }

    fn value(&self, y: &RVec) -> Option<f64> {
        let (lo, hi) = self.slacks(y);
        let mut v = 0.0;
        for s in lo.iter().chain(hi.iter()) {
            if !(*s > 0.0) {
                return None;
            }
            v -= s.ln();
        }
        Some(v)
    }

    fn derivatives(&self, y: &RVec) -> (RVec, RMat) {
        let (lo, hi) = self.slacks(y);
        let w = RVec::from_fn(lo.len(), |i, _| 1.0 / lo[i] - 1.0 / hi[i]);
        let h2 = RVec::from_fn(lo.len(), |i, _| lo[i].powi(-2) + hi[i].powi(-2));
        let g = self.a.transpose() * w;
        let mut scaled = self.a.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= h2[i];
        }
        (g, self.a.transpose() * scaled)
    }
}

/// Supremum of `φ(a) − φ'(a)` over Hermitian `a` obeying every constraint.
/// `must_include` adds one explicit pair whose distance is computed here.
pub fn wasserstein_upper(
    t: &SpectralTriple,
    phi: &State,
    phi2: &State,
    constraints: &[PurePairConstraint],
    must_include: Option<(&State, &State)>,
    opts: &SolverOptions,
) -> Result<KantorovichBound> {
    let mut all: Vec<PurePairConstraint> = constraints.to_vec();
    if let Some((a, b)) = must_include {
        if let Some(c) = pair_constraint(t, a.clone(), b.clone(), opts)? {
            all.push(c);
        }
    }
    if all.is_empty() {
        return Err(invalid("at least one finite constraint is required"));
    }
    let solver = DistanceSolver::new(t, opts.clone())?;
    let f = solver.functional(phi, phi2)?;
    let h = f.len();
    let mut rows: Vec<RVec> = Vec::new();
    let mut bounds: Vec<f64> = Vec::new();
    for c in &all {
        let g = solver.functional(&c.first, &c.second)?;
        if g.norm() <= SAME_FUNCTIONAL_TOL {
            continue;
        }
        if !(c.bound > 0.0) {
            return Err(invalid("distinct pure states must have a positive bound"));
        }
        rows.push(g);
        bounds.push(c.bound);
    }
    let used = rows.len();
    if f.norm() <= SAME_FUNCTIONAL_TOL {
        return Ok(KantorovichBound {
            upper: Outcome::Finite(0.0),
            feasible_value: Some(0.0),
            gap: Some(0.0),
            element: Some(vec![0.0; h]),
            constraints_used: used,
        });
    }
    let unbounded = KantorovichBound {
        upper: Outcome::Infinite,
        feasible_value: None,
        gap: None,
        element: None,
        constraints_used: used,
    };
    if rows.is_empty() {
        return Ok(unbounded);
    }
    // orthonormal basis V of span{g_i}; the objective is bounded iff f lies in it
    let g = RMat::from_fn(rows.len(), h, |i, j| rows[i][j]);
    let svd = g.clone().svd(false, true);
    let vt = svd.v_t.as_ref().expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * smax)
        .collect();
    let v = RMat::from_fn(h, keep.len(), |r, k| vt[(keep[k], r)]);
    let cvec = v.transpose() * &f;
    if (&f - &v * &cvec).norm() > 1e-9 * (1.0 + f.norm()) {
        return Ok(unbounded);
    }
    let a = &g * &v;
    let b = RVec::from_vec(bounds);
    let barrier = SlabBarrier { a: &a, b: &b };
    let nu = barrier.nu();
    let tol = 1e-10;
    // largest step along c that stays feasible sets the initial scale
    let ac = &a * &cvec;
    let reach = (0..b.len())
        .filter(|&i| ac[i] != 0.0)
        .map(|i| b[i] / ac[i].abs())
        .fold(f64::INFINITY, f64::min);
    let v0 = cvec.norm_squared() * reach;
    let path_opts = PathOptions {
        t0: nu / v0.max(1e-300),
        mu: 10.0,
        max_newton: opts.max_iterations,
        centering_tol: 1e-10,
    };
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_y = RVec::zeros(a.ncols());
    let mut best_upper = f64::INFINITY;
    follow_central_path(&barrier, &cvec, path_opts, |y, t| {
        let lower = cvec.dot(y);
        if lower > best_lower {
            best_lower = lower;
            best_y = y.clone();
        }
        if let Some(u) = slab_dual_bound(&barrier, y, t, &cvec) {
            best_upper = best_upper.min(u);
        }
        if best_upper - best_lower <= tol * best_lower.abs().max(1e-300) {
            Control::Stop
        } else {
            Control::Continue
        }
    });
    if !best_upper.is_finite() || best_upper - best_lower > 1e-6 * best_lower.abs().max(1e-12) {
        return Err(Error::NonConvergence {
            iterations: opts.max_iterations,
            lower: best_lower,
            upper: best_upper,
        });
    }
    let x = &v * &best_y;
    Ok(KantorovichBound {
        upper: Outcome::Finite(best_upper),
        feasible_value: Some(best_lower),
        gap: Some(best_upper - best_lower),
        element: Some(x.iter().copied().collect()),
        constraints_used: used,
    })
}

/// `Σ b_i |λ_i|` for multipliers with `Aᵀλ = c`, built from the slack
/// reciprocals corrected by one Newton step.
fn slab_dual_bound(barrier: &SlabBarrier, y: &RVec, t: f64, c: &RVec) -> Option<f64> {
    let (g, h) = barrier.derivatives(y);
    let grad = &g - c * t;
    let ch = Cholesky::new(h.clone())?;
    let d = -ch.solve(&grad);
    let (lo, hi) = barrier.slacks(y);
    let ad = barrier.a * &d;
    let mut lambda = RVec::from_fn(lo.len(), |i, _| {
        let plus = 1.0 / lo[i] + ad[i] / (lo[i] * lo[i]);
        let minus = 1.0 / hi[i] - ad[i] / (hi[i] * hi[i]);
        (plus - minus) / t
    });
    // remove rounding residual in the least-norm direction
    let gram = barrier.a.transpose() * barrier.a;
    if let Some(gc) = Cholesky::new(gram) {
        for _ in 0..2 {
            let resid = c - barrier.a.transpose() * &lambda;
            lambda += barrier.a * gc.solve(&resid);
        }
    }
    Some(lambda.iter().zip(barrier.b.iter()).map(|(l, b)| l.abs() * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::mix_states;
    use crate::linalg::c;
    use crate::triple::{truncated_moyal_triple, two_point_triple};

    fn opts() -> SolverOptions {
        SolverOptions::default().with_rel_tolerance(1e-9)
    }

    #[test]
    fn two_point_is_exact() {
        let t = two_point_triple(c(2.0, 0.0));
        let pairs = sample_pure_pairs(&t, 4, 1, &opts()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].bound - 0.5).abs() < 1e-9);
        let alg = t.algebra();
        let p = State::distribution(alg, &[0.7, 0.3]).unwrap();
        let q = State::distribution(alg, &[0.2, 0.8]).unwrap();
        let w = wasserstein_upper(&t, &p, &q, &pairs, None, &opts()).unwrap();
        let Outcome::Finite(v) = w.upper else { panic!("finite") };
        assert!((v - 0.25).abs() < 1e-9, "{v}");
    }

    #[test]
    fn segment_with_generating_pair() {
        let t = truncated_moyal_triple(2, 2.0).unwrap();
        let alg = t.algebra();
        let w1 = State::pure(alg, 0, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let w2 = State::pure(alg, 0, &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let a = mix_states(&w1, &w2, 0.8).unwrap();
        let b = mix_states(&w1, &w2, 0.3).unwrap();
        let pair = pair_constraint(&t, w1.clone(), w2.clone(), &opts()).unwrap().unwrap();
        let r = wasserstein_upper(&t, &a, &b, &[], Some((&w1, &w2)), &opts()).unwrap();
        let Outcome::Finite(v) = r.upper else { panic!("finite") };
        assert!((v - 0.5 * pair.bound).abs() < 1e-8, "{v} vs {}", 0.5 * pair.bound);
    }

    #[test]
    fn unbounded_without_spanning_constraints() {
        let t = truncated_moyal_triple(2, 2.0).unwrap();
        let alg = t.algebra();
        let w1 = State::pure(alg, 0, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let w2 = State::pure(alg, 0, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let w3 = State::pure(alg, 0, &[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let only = pair_constraint(&t, w1.clone(), w2, &opts()).unwrap().unwrap();
        let r = wasserstein_upper(&t, &w1, &w3, &[only], None, &opts()).unwrap();
        assert_eq!(r.upper, Outcome::Infinite);
    }
}
