//! Log-barrier path following for `max c·y` over a convex set given by a
//! self-concordant barrier.

use nalgebra::Cholesky;

use crate::linalg::{RMat, RVec};

/// Self-concordant barrier `ψ` of a convex set with nonempty interior containing 0.
pub(crate) trait Barrier {
    fn dim(&self) -> usize;
    /// Barrier parameter `ν`; the duality gap on the central path is `ν/t`.
    fn nu(&self) -> f64;
    /// `ψ(y)`, or `None` outside the interior.
    fn value(&self, y: &RVec) -> Option<f64>;
    /// Gradient and Hessian of `ψ` at an interior point.
    fn derivatives(&self, y: &RVec) -> (RVec, RMat);
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PathOptions {
    pub t0: f64,
    pub mu: f64,
    pub max_newton: usize,
    pub centering_tol: f64,
}

/// What the caller decides after each centering step.
pub(crate) enum Control {
    Continue,
    Stop,
}

pub(crate) struct PathResult {
    #[cfg_attr(not(test), allow(dead_code))]
    pub y: RVec,
    pub newton_steps: usize,
    /// `false` when the Newton budget ran out or the line search stalled.
    #[cfg_attr(not(test), allow(dead_code))]
    pub completed: bool,
}

/// Minimizes `-t c·y + ψ(y)` for increasing `t`, handing each centered
/// point to `check`.
pub(crate) fn follow_central_path<B: Barrier>(
    barrier: &B,
    c: &RVec,
    opts: PathOptions,
    mut check: impl FnMut(&RVec, f64) -> Control,
) -> PathResult {
    let mut y = RVec::zeros(barrier.dim());
    let mut t = opts.t0;
    let mut steps = 0;
    if barrier.value(&y).is_none() {
        return PathResult {
            y,
            newton_steps: 0,
            completed: false,
        };
    }
    loop {
        // centering
        let mut stalled = false;
        let mut prev_dec2 = f64::INFINITY;
        let mut slow = 0;
        loop {
            if steps >= opts.max_newton {
                return PathResult {
                    y,
                    newton_steps: steps,
                    completed: false,
                };
            }
            let (g, h) = barrier.derivatives(&y);
            let grad = &g - c * t;
            let dir = match newton_direction(&h, &grad) {
                Some(d) => d,
                None => {
                    stalled = true;
                    break;
                }
            };
            steps += 1;
            let slope = grad.dot(&dir);
            let dec2 = -slope;
            if dec2 / 2.0 <= opts.centering_tol {
                break;
            }
            // rounding floor: the decrement stopped shrinking near the target
            if dec2 < 1e-5 && dec2 > 0.5 * prev_dec2 {
                slow += 1;
                if slow >= 5 {
                    break;
                }
            } else {
                slow = 0;
            }
            prev_dec2 = dec2;
            // damped Newton step; stays inside the Dikin ellipsoid
            let dec = dec2.sqrt();
            let mut s = if dec < 0.25 { 1.0 } else { 1.0 / (1.0 + dec) };
            let mut accepted = false;
            while s > 1e-14 {
                let trial = &y + &dir * s;
                if barrier.value(&trial).is_some() {
                    y = trial;
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if !accepted {
                stalled = true;
                break;
            }
        }
        if let Control::Stop = check(&y, t) {
            return PathResult {
                y,
                newton_steps: steps,
                completed: true,
            };
        }
        if stalled {
            return PathResult {
                y,
                newton_steps: steps,
                completed: false,
            };
        }
        t *= opts.mu;
    }
}

/// Solves `H d = -g`, adding a small ridge if `H` is numerically singular.
pub(crate) fn newton_direction(h: &RMat, g: &RVec) -> Option<RVec> {
    let scale = (0..h.nrows()).map(|i| h[(i, i)].abs()).fold(0.0, f64::max);
    let mut ridge = 0.0;
    for _ in 0..6 {
        let mut hr = h.clone();
        for i in 0..hr.nrows() {
            hr[(i, i)] += ridge;
        }
        if let Some(ch) = Cholesky::new(hr) {
            let d = -ch.solve(g);
            if d.iter().all(|x| x.is_finite()) {
                return Some(d);
            }
        }
        ridge = if ridge == 0.0 { 1e-14 * scale.max(1e-300) } else { ridge * 100.0 };
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Box `|y_i| < 1`.
    struct BoxBarrier(usize);

    impl Barrier for BoxBarrier {
        fn dim(&self) -> usize {
            self.0
        }
        fn nu(&self) -> f64 {
            2.0 * self.0 as f64
        }
        fn value(&self, y: &RVec) -> Option<f64> {
            let mut v = 0.0;
            for &x in y.iter() {
                if x.abs() >= 1.0 {
                    return None;
                }
                v -= (1.0 - x).ln() + (1.0 + x).ln();
            }
            Some(v)
        }
        fn derivatives(&self, y: &RVec) -> (RVec, RMat) {
            let g = y.map(|x| 1.0 / (1.0 - x) - 1.0 / (1.0 + x));
            let h = RMat::from_diagonal(&y.map(|x| 1.0 / (1.0 - x).powi(2) + 1.0 / (1.0 + x).powi(2)));
            (g, h)
        }
    }

    #[test]
    fn box_linear_program() {
        let b = BoxBarrier(3);
        let c = RVec::from_vec(vec![1.0, -2.0, 0.5]);
        let opts = PathOptions {
            t0: 1.0,
            mu: 10.0,
            max_newton: 500,
            centering_tol: 1e-10,
        };
        let res = follow_central_path(&b, &c, opts, |_, t| {
            if b.nu() / t < 1e-9 {
                Control::Stop
            } else {
                Control::Continue
            }
        });
        assert!(res.completed);
        assert!((c.dot(&res.y) - 3.5).abs() < 1e-8);
    }
}
