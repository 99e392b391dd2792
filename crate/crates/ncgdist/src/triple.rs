//! Finite spectral triples `(A, H, D)` and their builders.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{Algebra, AlgebraElement};
use crate::error::{invalid, Error, Result};
use crate::linalg::{
    c, frobenius, hermitian_op_norm, max_abs_diff, op_norm, symmetric_eigen, CMat, RMat, RVec,
    Sparse, C64, I, ONE, ZERO,
};

const DIRAC_HERMITIAN_TOL: f64 = 1e-12;
const GRADING_TOL: f64 = 1e-10;
const REP_TOL: f64 = 1e-9;
const PROJECTION_TOL: f64 = 1e-10;
/// Default relative threshold for the kernel of the Lipschitz seminorm.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-9;

/// Linear map `A → B(H)`, stored by its images of the matrix units.
#[derive(Clone, Debug)]
pub struct Representation {
    hilbert_dim: usize,
    units: Vec<Sparse>,
}

impl Representation {
    /// Block-diagonal direct sum of the defining representations, `H = ℂ^{Σ n_b}`.
    pub fn defining(algebra: &Algebra) -> Self {
        let dim: usize = algebra.blocks().iter().sum();
        let mut units = Vec::with_capacity(algebra.herm_dim());
        let mut off = 0;
        for &n in algebra.blocks() {
            for p in 0..n {
                for q in 0..n {
                    units.push(Sparse::new(dim, dim, vec![(off + p, off + q, ONE)]));
                }
            }
            off += n;
        }
        Self {
            hilbert_dim: dim,
            units,
        }
    }

    /// `ℂᴺ` acting diagonally on `ℂᴺ`.
    pub fn diagonal(algebra: &Algebra) -> Result<Self> {
        if algebra.blocks().iter().any(|&n| n != 1) {
            return Err(invalid("diagonal representation needs one-dimensional blocks"));
        }
        Ok(Self::defining(algebra))
    }

    /// Left multiplication on `⊕_b ℂᵏ ⊗ M_{n_b}`, matrices vectorized row-major,
    /// copy index outermost: `π(a) = ⊕_b I_k ⊗ a_b ⊗ I_{n_b}`.
    pub fn left_mult_tensor(algebra: &Algebra, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(invalid("tensor_copies must be positive"));
        }
        let dim: usize = algebra.blocks().iter().map(|n| copies * n * n).sum();
        let mut units = Vec::with_capacity(algebra.herm_dim());
        let mut off = 0;
        for &n in algebra.blocks() {
            for p in 0..n {
                for q in 0..n {
                    let mut entries = Vec::with_capacity(copies * n);
                    for s in 0..copies {
                        for j in 0..n {
                            let base = off + s * n * n;
                            entries.push((base + p * n + j, base + q * n + j, ONE));
                        }
                    }
                    units.push(Sparse::new(dim, dim, entries));
                }
            }
            off += copies * n * n;
        }
        Ok(Self {
            hilbert_dim: dim,
            units,
        })
    }

    /// Representation given by the images of the Hermitian basis elements.
    pub fn from_hermitian_images(algebra: &Algebra, images: &[CMat]) -> Result<Self> {
        if images.len() != algebra.herm_dim() {
            return Err(Error::Shape(format!(
                "expected {} images, got {}",
                algebra.herm_dim(),
                images.len()
            )));
        }
        let dim = images[0].nrows();
        if images.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::Shape("images must be square of equal size".into()));
        }
        // e_pp = h_pp; e_pq = (S - iA)/√2; e_qp = (S + iA)/√2
        let mut units = vec![CMat::zeros(dim, dim); algebra.herm_dim()];
        let labels = algebra.basis_labels();
        let mut k = 0;
        while k < labels.len() {
            let l = labels[k];
            let upq = algebra.unit_index(l.block, l.p, l.q);
            if l.p == l.q {
                units[upq] = images[k].clone();
                k += 1;
            } else {
                let uqp = algebra.unit_index(l.block, l.q, l.p);
                let s = &images[k];
                let a = &images[k + 1];
                let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                units[upq] = (s - a * I) * h;
                units[uqp] = (s + a * I) * h;
                k += 2;
            }
        }
        Ok(Self {
            hilbert_dim: dim,
            units: units.iter().map(|m| Sparse::from_dense(m, 0.0)).collect(),
        })
    }

    pub(crate) fn from_units(hilbert_dim: usize, units: Vec<Sparse>) -> Self {
        Self { hilbert_dim, units }
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// Images of the global matrix units.
    pub fn unit_images(&self) -> &[Sparse] {
        &self.units
    }

    /// Dense images of the Hermitian basis elements.
    pub fn hermitian_images(&self, algebra: &Algebra) -> Vec<CMat> {
        (0..algebra.herm_dim())
            .map(|k| {
                let mut m = CMat::zeros(self.hilbert_dim, self.hilbert_dim);
                for (u, t) in algebra.basis_unit_terms(k) {
                    self.units[u].add_to_dense(t, &mut m);
                }
                m
            })
            .collect()
    }

    /// `π(Σ z_α e_α)` for unit coefficients `z`.
    pub fn apply_units(&self, z: &[C64]) -> CMat {
        let mut m = CMat::zeros(self.hilbert_dim, self.hilbert_dim);
        for (u, &zu) in self.units.iter().zip(z) {
            if zu != ZERO {
                u.add_to_dense(zu, &mut m);
            }
        }
        m
    }

    pub fn apply(&self, algebra: &Algebra, a: &AlgebraElement) -> Result<CMat> {
        algebra.check_element(a)?;
        Ok(self.apply_units(&algebra.unit_coefficients(a)))
    }

    /// Checks `π(e_pq)† = π(e_qp)`, `Σ π(e_pp) = I` and `π(e_pq)π(e_rs) = δ_qr π(e_ps)`
    /// on a seeded sample of unit pairs.
    fn check_homomorphism(&self, algebra: &Algebra) -> Result<()> {
        let nu = algebra.herm_dim();
        if self.units.len() != nu {
            return Err(Error::Shape("one image per basis element required".into()));
        }
        let dim = self.hilbert_dim;
        if self.units.iter().any(|u| u.nrows() != dim || u.ncols() != dim) {
            return Err(Error::Shape("images must act on the Hilbert space".into()));
        }
        let close = |a: &Sparse, b: &Sparse| {
            let diff = Sparse::combination(dim, dim, &[(ONE, a), (-ONE, b)]);
            diff.entries().iter().all(|e| e.2.norm() <= REP_TOL)
        };
        let mut diagonal = Vec::new();
        for idx in 0..nu {
            let (b, p, q) = algebra.unit_position(idx);
            if !close(&self.units[idx].adjoint(), &self.units[algebra.unit_index(b, q, p)]) {
                return Err(invalid("representation does not preserve adjoints"));
            }
            if p == q {
                diagonal.push((ONE, &self.units[idx]));
            }
        }
        if !close(&Sparse::combination(dim, dim, &diagonal), &Sparse::identity(dim)) {
            return Err(invalid("representation does not map the unit to the identity"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let exhaustive = nu * nu <= 64;
        for k in 0..(nu * nu).min(64) {
            let (i, j) = if exhaustive {
                (k / nu, k % nu)
            } else {
                (rng.random_range(0..nu), rng.random_range(0..nu))
            };
            let (bi, p, q) = algebra.unit_position(i);
            let (bj, r, s) = algebra.unit_position(j);
            let prod = self.units[i].mul_sparse(&self.units[j]);
            let want = if bi == bj && q == r {
                self.units[algebra.unit_index(bi, p, s)].clone()
            } else {
                Sparse::zeros(dim, dim)
            };
            if !close(&prod, &want) {
                return Err(invalid("representation is not multiplicative"));
            }
        }
        Ok(())
    }
}

/// Algebra, representation, Hermitian Dirac operator and optional grading.
#[derive(Clone, Debug)]
pub struct SpectralTriple {
    algebra: Algebra,
    rep: Representation,
    dirac: CMat,
    dirac_sparse: Sparse,
    grading: Option<CMat>,
}

impl SpectralTriple {
    pub fn new(
        algebra: Algebra,
        rep: Representation,
        dirac: CMat,
        grading: Option<CMat>,
    ) -> Result<Self> {
        rep.check_homomorphism(&algebra)?;
        Self::assemble(algebra, rep, dirac, grading)
    }

    /// Skips the homomorphism check; used for compressions `eπ(·)e`.
    fn assemble(
        algebra: Algebra,
        rep: Representation,
        dirac: CMat,
        grading: Option<CMat>,
    ) -> Result<Self> {
        let m = rep.hilbert_dim();
        if dirac.nrows() != m || dirac.ncols() != m {
            return Err(Error::Shape(format!(
                "Dirac operator must be {m}x{m}, got {}x{}",
                dirac.nrows(),
                dirac.ncols()
            )));
        }
        if max_abs_diff(&dirac, &dirac.adjoint()) > DIRAC_HERMITIAN_TOL {
            return Err(invalid("Dirac operator is not Hermitian"));
        }
        if let Some(g) = &grading {
            if g.nrows() != m || g.ncols() != m {
                return Err(Error::Shape("grading has the wrong size".into()));
            }
            let gs = Sparse::from_dense(g, 0.0);
            let square = gs.mul_sparse(&gs).to_dense();
            if max_abs_diff(g, &g.adjoint()) > GRADING_TOL
                || max_abs_diff(&square, &CMat::identity(m, m)) > GRADING_TOL
            {
                return Err(invalid("grading is not a Hermitian involution"));
            }
            if max_abs_diff(&gs.mul_dense(&dirac), &(-gs.dense_mul(&dirac))) > GRADING_TOL {
                return Err(invalid("grading does not anticommute with the Dirac operator"));
            }
            for u in rep.unit_images() {
                let (gu, ug) = (gs.mul_sparse(u), u.mul_sparse(&gs));
                let comm = Sparse::combination(m, m, &[(ONE, &gu), (-ONE, &ug)]);
                if comm.entries().iter().any(|e| e.2.norm() > GRADING_TOL) {
                    return Err(invalid("grading does not commute with the representation"));
                }
            }
        }
        let dirac_sparse = Sparse::from_dense(&dirac, 0.0);
        Ok(Self {
            algebra,
            rep,
            dirac,
            dirac_sparse,
            grading,
        })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn dirac(&self) -> &CMat {
        &self.dirac
    }

    pub fn grading(&self) -> Option<&CMat> {
        self.grading.as_ref()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.rep.hilbert_dim()
    }

    /// `[D, π(a)]`.
    pub fn commutator(&self, a: &AlgebraElement) -> Result<CMat> {
        let p = self.rep.apply(&self.algebra, a)?;
        Ok(self.dirac_sparse.mul_dense(&p) - self.dirac_sparse.dense_mul(&p))
    }

    /// Vector state `a ↦ ⟨ψ, π(a) ψ⟩` pulled back to the algebra.
    pub fn vector_state(&self, psi: &[C64]) -> Result<crate::algebra::State> {
        if psi.len() != self.hilbert_dim() {
            return Err(Error::Shape("vector does not match the Hilbert space".into()));
        }
        let norm2: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
        if !(norm2 > 0.0) {
            return Err(invalid("vector must be nonzero"));
        }
        let values: Vec<C64> = self
            .rep
            .unit_images()
            .iter()
            .map(|u| {
                u.entries()
                    .iter()
                    .map(|&(r, col, v)| psi[r].conj() * v * psi[col])
                    .sum::<C64>()
                    / norm2
            })
            .collect();
        crate::algebra::State::from_unit_values(&self.algebra, &values)
    }
}

/// `L_D(a) = ‖[D, π(a)]‖`.
pub fn seminorm(t: &SpectralTriple, a: &AlgebraElement) -> Result<f64> {
    let comm = t.commutator(a)?;
    if a.is_hermitian() {
        Ok(hermitian_op_norm(&(comm * I)))
    } else {
        Ok(op_norm(&comm))
    }
}

/// Orthonormal basis of `Ker L_D` in Hermitian coordinates.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub elements: Vec<AlgebraElement>,
    pub coords: Vec<Vec<f64>>,
    pub rank: usize,
    pub tolerance: f64,
}

/// Split of the Hermitian coordinates into `Ker L_D` and its complement.
#[derive(Clone, Debug)]
pub(crate) struct KernelSplit {
    /// Columns span the kernel.
    pub kernel: RMat,
    /// Columns span the orthogonal complement.
    pub complement: RMat,
    /// `‖i[D, π(q)]‖_F` for each complement column `q`.
    pub complement_norms: Vec<f64>,
}

pub(crate) fn kernel_split(t: &SpectralTriple, tol: f64) -> KernelSplit {
    let map = LipschitzMap::new(t);
    let n = t.algebra.herm_dim();
    let gram = map.gram();
    let (_, vecs) = symmetric_eigen(&gram);
    let norms: Vec<f64> = (0..n)
        .map(|k| frobenius(&map.apply(vecs.column(k).as_slice())))
        .collect();
    let smax = norms.iter().copied().fold(0.0, f64::max);
    let (mut ker, mut comp) = (Vec::new(), Vec::new());
    for (k, &s) in norms.iter().enumerate() {
        if s <= tol * smax || smax == 0.0 {
            ker.push(k);
        } else {
            comp.push(k);
        }
    }
    let pick = |idx: &[usize]| RMat::from_fn(n, idx.len(), |r, j| vecs[(r, idx[j])]);
    KernelSplit {
        kernel: pick(&ker),
        complement: pick(&comp),
        complement_norms: comp.iter().map(|&k| norms[k]).collect(),
    }
}

/// Null space of `a ↦ [D, π(a)]` on Hermitian elements, thresholded at
/// `tol` times the largest singular value.
pub fn seminorm_kernel(t: &SpectralTriple, tol: f64) -> KernelBasis {
    let split = kernel_split(t, tol);
    let coords: Vec<Vec<f64>> = (0..split.kernel.ncols())
        .map(|j| split.kernel.column(j).iter().copied().collect())
        .collect();
    let elements = coords
        .iter()
        .map(|x| t.algebra.element_from_coords(x).expect("sized coordinates"))
        .collect();
    KernelBasis {
        elements,
        rank: coords.len(),
        coords,
        tolerance: tol,
    }
}

/// The real-linear map `x ↦ i[D, π(Σ x_k h_k)]` with its adjoint and the
/// Hessian of `log det` barriers built on it.
pub(crate) struct LipschitzMap<'a> {
    triple: &'a SpectralTriple,
    terms: Vec<Vec<(usize, C64)>>,
}

impl<'a> LipschitzMap<'a> {
    pub fn new(triple: &'a SpectralTriple) -> Self {
        let alg = &triple.algebra;
        let terms = (0..alg.herm_dim()).map(|k| alg.basis_unit_terms(k)).collect();
        Self { triple, terms }
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn size(&self) -> usize {
        self.triple.hilbert_dim()
    }

    fn unit_coeffs(&self, x: &[f64]) -> Vec<C64> {
        let mut z = vec![ZERO; self.triple.algebra.herm_dim()];
        for (terms, &xk) in self.terms.iter().zip(x) {
            if xk != 0.0 {
                for &(u, t) in terms {
                    z[u] += t * xk;
                }
            }
        }
        z
    }

    /// `i[D, π(a(x))]`, Hermitian.
    pub fn apply(&self, x: &[f64]) -> CMat {
        let p = self.triple.rep.apply_units(&self.unit_coeffs(x));
        let d = &self.triple.dirac_sparse;
        (d.mul_dense(&p) - d.dense_mul(&p)) * I
    }

    /// `(Re Tr(Y M_k))_k` for Hermitian `Y`.
    pub fn adjoint(&self, y: &CMat) -> RVec {
        let d = &self.triple.dirac_sparse;
        let comm = d.dense_mul(y) - d.mul_dense(y);
        let per_unit: Vec<C64> = self
            .triple
            .rep
            .unit_images()
            .iter()
            .map(|u| u.trace_with(&comm) * I)
            .collect();
        RVec::from_iterator(
            self.dim(),
            self.terms
                .iter()
                .map(|terms| terms.iter().map(|&(u, t)| (t * per_unit[u]).re).sum::<f64>()),
        )
    }

    /// `(Re Tr(M_k M_l))_{kl}`.
    pub fn gram(&self) -> RMat {
        let m = self.size();
        self.hessian(&CMat::identity(m, m))
    }

    /// `(Re Tr(W M_k W M_l))_{kl}` for Hermitian `W`.
    pub fn hessian(&self, w: &CMat) -> RMat {
        let d = &self.triple.dirac_sparse;
        let a = d.dense_mul(w); // W D
        let b = d.mul_dense(w); // D W
        let e = d.mul_dense(&a); // D W D
        let m = w.nrows();
        let (ws, as_, bs, es) = (w.as_slice(), a.as_slice(), b.as_slice(), e.as_slice());
        let units = self.triple.rep.unit_images();
        let nu = units.len();
        let rows: Vec<Vec<C64>> = (0..nu)
            .into_par_iter()
            .map(|al| {
                let ea = units[al].entries();
                (al..nu)
                    .map(|be| {
                        let eb = units[be].entries();
                        let mut acc = ZERO;
                        for &(ra, cb, u) in ea {
                            let mut inner = ZERO;
                            for &(rc, cd, v) in eb {
                                // X_bc Y_da with column-major index r + col·m
                                let bc = cb + rc * m;
                                let da = cd + ra * m;
                                let t = as_[bc] * as_[da] - ws[bc] * es[da] - es[bc] * ws[da]
                                    + bs[bc] * bs[da];
                                inner += v * t;
                            }
                            acc += u * inner;
                        }
                        -acc
                    })
                    .collect()
            })
            .collect();
        let mut k = vec![ZERO; nu * nu];
        for (al, row) in rows.iter().enumerate() {
            for (off, &v) in row.iter().enumerate() {
                let be = al + off;
                k[al * nu + be] = v;
                k[be * nu + al] = v;
            }
        }
        let n = self.dim();
        let mut h = RMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = ZERO;
                for &(u, tu) in &self.terms[i] {
                    for &(v, tv) in &self.terms[j] {
                        s += tu * tv * k[u * nu + v];
                    }
                }
                h[(i, j)] = s.re;
                h[(j, i)] = s.re;
            }
        }
        h
    }
}

fn two_point_grading() -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, -ONE]))
}

/// `ℂ²` on `ℂ²` with `D = [[0, m], [m̄, 0]]` and grading `diag(1, -1)`.
pub fn two_point_triple(m: C64) -> SpectralTriple {
    let alg = Algebra::commutative(2).expect("two blocks");
    let rep = Representation::defining(&alg);
    let d = CMat::from_row_slice(2, 2, &[ZERO, m, m.conj(), ZERO]);
    SpectralTriple::new(alg, rep, d, Some(two_point_grading())).expect("valid two-point triple")
}

/// `ℂᴺ` acting diagonally with Dirac operator given by a symmetric real weight matrix.
pub fn graph_triple(weights: &[Vec<f64>]) -> Result<SpectralTriple> {
    let n = weights.len();
    if n == 0 || weights.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("weights must be a nonempty square matrix".into()));
    }
    for i in 0..n {
        if weights[i][i] != 0.0 {
            return Err(invalid("weights must have a zero diagonal"));
        }
        for j in 0..n {
            if !weights[i][j].is_finite() {
                return Err(invalid("weights must be finite"));
            }
            if weights[i][j] != weights[j][i] {
                return Err(invalid(format!("weights not symmetric at ({i}, {j})")));
            }
        }
    }
    let alg = Algebra::commutative(n)?;
    let rep = Representation::diagonal(&alg)?;
    let d = CMat::from_fn(n, n, |i, j| c(weights[i][j], 0.0));
    SpectralTriple::new(alg, rep, d, None)
}

/// `M₂` in its defining representation with `D = diag(d₁, d₂)`.
pub fn m2_diagonal_triple(d1: f64, d2: f64) -> SpectralTriple {
    let alg = Algebra::new(vec![2]).expect("one block");
    let rep = Representation::defining(&alg);
    let d = CMat::from_row_slice(2, 2, &[c(d1, 0.0), ZERO, ZERO, c(d2, 0.0)]);
    SpectralTriple::new(alg, rep, d, None).expect("valid M2 triple")
}

/// `M_n ⊕ ℂ` on `ℂⁿ ⊕ ℂ` with `D = [[0, v], [v†, 0]]` and grading `diag(I_n, -1)`.
pub fn sphere_point_triple(v: &[C64]) -> Result<SpectralTriple> {
    let n = v.len();
    if n == 0 || v.iter().all(|x| x.norm() == 0.0) {
        return Err(invalid("coupling vector must be nonzero"));
    }
    let alg = Algebra::new(vec![n, 1])?;
    let rep = Representation::defining(&alg);
    let mut d = CMat::zeros(n + 1, n + 1);
    for (i, &vi) in v.iter().enumerate() {
        d[(i, n)] = vi;
        d[(n, i)] = vi.conj();
    }
    let g = CMat::from_fn(n + 1, n + 1, |r, col| match (r == col, r < n) {
        (true, true) => ONE,
        (true, false) => -ONE,
        _ => ZERO,
    });
    SpectralTriple::new(alg, rep, d, Some(g))
}

/// Lowering matrix `X_{m+1,m} = √(m+1)/√θ`.
pub fn moyal_lowering(n: usize, theta: f64) -> CMat {
    let mut x = CMat::zeros(n, n);
    for m in 0..n.saturating_sub(1) {
        x[(m + 1, m)] = c(((m + 1) as f64).sqrt() / theta.sqrt(), 0.0);
    }
    x
}

/// `M_N` acting on `ℂ² ⊗ M_N` by left multiplication, with
/// `D = -i√2 [[0, [X†,·]], [-[X,·], 0]]` and grading `diag(I, -I)`.
pub fn truncated_moyal_triple(n: usize, theta: f64) -> Result<SpectralTriple> {
    if n < 2 {
        return Err(invalid("truncation size must be at least 2"));
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(invalid("theta must be positive"));
    }
    let alg = Algebra::new(vec![n])?;
    let rep = Representation::left_mult_tensor(&alg, 2)?;
    let x = moyal_lowering(n, theta);
    let id = CMat::identity(n, n);
    let ad_x = x.kronecker(&id) - id.kronecker(&x.transpose());
    let xd = x.adjoint();
    let ad_xd = xd.kronecker(&id) - id.kronecker(&xd.transpose());
    let nn = n * n;
    let mut d = CMat::zeros(2 * nn, 2 * nn);
    let s = c(0.0, -SQRT_2);
    d.view_mut((0, nn), (nn, nn)).copy_from(&(ad_xd * s));
    d.view_mut((nn, 0), (nn, nn)).copy_from(&(ad_x * (-s)));
    let g = CMat::from_fn(2 * nn, 2 * nn, |r, col| match (r == col, r < nn) {
        (true, true) => ONE,
        (true, false) => -ONE,
        _ => ZERO,
    });
    SpectralTriple::new(alg, rep, d, Some(g))
}

/// Product `(A₁ ⊗ A₂, H₁ ⊗ H₂, D₁ ⊗ I + Γ₁ ⊗ D₂)`.
pub fn product_triples(t1: &SpectralTriple, t2: &SpectralTriple) -> Result<SpectralTriple> {
    let g1 = t1
        .grading()
        .ok_or_else(|| Error::Precondition("first factor must carry a grading".into()))?;
    let a1 = t1.algebra();
    let a2 = t2.algebra();
    let alg = a1.tensor(a2);
    let (m1, m2) = (t1.hilbert_dim(), t2.hilbert_dim());
    let mut units = vec![Sparse::zeros(m1 * m2, m1 * m2); alg.herm_dim()];
    for (i, &n) in a1.blocks().iter().enumerate() {
        for (j, &m) in a2.blocks().iter().enumerate() {
            let b = i * a2.num_blocks() + j;
            for p in 0..n {
                for q in 0..n {
                    let u1 = &t1.rep.units[a1.unit_index(i, p, q)];
                    for r in 0..m {
                        for s in 0..m {
                            let u2 = &t2.rep.units[a2.unit_index(j, r, s)];
                            units[alg.unit_index(b, p * m + r, q * m + s)] = u1.kron(u2);
                        }
                    }
                }
            }
        }
    }
    let rep = Representation::from_units(m1 * m2, units);
    let id2 = CMat::identity(m2, m2);
    let d = t1.dirac().kronecker(&id2) + g1.kronecker(t2.dirac());
    let g = t2.grading().map(|g2| g1.kronecker(g2));
    SpectralTriple::new(alg, rep, d, g)
}

/// Compression `(α_e(A), eH, eDe)` by a projection commuting with `D`.
pub fn project_triple(t: &SpectralTriple, e: &CMat) -> Result<SpectralTriple> {
    let m = t.hilbert_dim();
    if e.nrows() != m || e.ncols() != m {
        return Err(Error::Shape("projection has the wrong size".into()));
    }
    if max_abs_diff(e, &e.adjoint()) > PROJECTION_TOL || max_abs_diff(&(e * e), e) > PROJECTION_TOL
    {
        return Err(Error::Precondition("e must satisfy e = e* = e²".into()));
    }
    if max_abs_diff(&(e * t.dirac()), &(t.dirac() * e)) > PROJECTION_TOL {
        return Err(Error::Precondition(
            "projection must commute with the Dirac operator".into(),
        ));
    }
    let range = projection_range(e);
    if range.ncols() == 0 {
        return Err(Error::Precondition("projection must be nonzero".into()));
    }
    let vd = range.adjoint();
    let units = t
        .rep
        .units
        .iter()
        .map(|u| Sparse::from_dense(&(&vd * u.mul_dense(&range)), 1e-15))
        .collect();
    let rep = Representation::from_units(range.ncols(), units);
    let d = &vd * t.dirac() * &range;
    let d = (&d + d.adjoint()) * c(0.5, 0.0);
    let grading = t.grading().and_then(|g| {
        if max_abs_diff(&(g * e), &(e * g)) <= PROJECTION_TOL {
            Some(&vd * g * &range)
        } else {
            None
        }
    });
    SpectralTriple::assemble(t.algebra.clone(), rep, d, grading)
}

/// Orthonormal basis of the range of a projection, as columns.
fn projection_range(e: &CMat) -> CMat {
    let m = e.nrows();
    let diagonal = (0..m).all(|r| (0..m).all(|col| r == col || e[(r, col)].norm() <= PROJECTION_TOL));
    if diagonal {
        let idx: Vec<usize> = (0..m).filter(|&i| e[(i, i)].re > 0.5).collect();
        return CMat::from_fn(m, idx.len(), |r, j| if r == idx[j] { ONE } else { ZERO });
    }
    let (vals, vecs) = crate::linalg::hermitian_eigen(e);
    let idx: Vec<usize> = (0..m).filter(|&i| vals[i] > 0.5).collect();
    CMat::from_fn(m, idx.len(), |r, j| vecs[(r, idx[j])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::hermitian_basis;
    use crate::linalg::hermitian_eigenvalues;

    #[test]
    fn two_point_seminorm() {
        let t = two_point_triple(c(0.0, 3.0));
        let a = AlgebraElement::diagonal(t.algebra(), &[ONE, ZERO]).unwrap();
        assert!((seminorm(&t, &a).unwrap() - 3.0).abs() < 1e-12);
        assert!(seminorm(&t, &t.algebra().identity()).unwrap() < 1e-14);
    }

    #[test]
    fn m2_offdiagonal_seminorm() {
        let t = m2_diagonal_triple(0.5, 2.0);
        let mut blocks = vec![CMat::zeros(2, 2)];
        blocks[0][(0, 1)] = c(1.5, -2.0);
        let a = AlgebraElement::new(t.algebra(), blocks).unwrap();
        assert!((seminorm(&t, &a).unwrap() - 2.5 * 1.5).abs() < 1e-12);
    }

    #[test]
    fn kernel_examples() {
        let full = graph_triple(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 3.0],
            vec![2.0, 3.0, 0.0],
        ])
        .unwrap();
        let k = seminorm_kernel(&full, DEFAULT_KERNEL_TOL);
        assert_eq!(k.rank, 1);
        let v = &k.coords[0];
        assert!((v[0].abs() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let cut = graph_triple(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let k = seminorm_kernel(&cut, DEFAULT_KERNEL_TOL);
        assert_eq!(k.rank, 2);
        // diag(0,0,1) lies in the span
        let resid: f64 = 1.0 - k.coords.iter().map(|v| v[2] * v[2]).sum::<f64>();
        assert!(resid.abs() < 1e-12);
        let m2 = m2_diagonal_triple(1.0, -1.0);
        let k = seminorm_kernel(&m2, DEFAULT_KERNEL_TOL);
        assert_eq!(k.rank, 2);
        for e in &k.elements {
            assert!(e.blocks()[0][(0, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn hessian_matches_dense_definition() {
        let t = truncated_moyal_triple(3, 0.7).unwrap();
        let map = LipschitzMap::new(&t);
        let m = t.hilbert_dim();
        let g = CMat::from_fn(m, m, |r, col| c(((r * 7 + col * 3) % 5) as f64 - 2.0, (r as f64 - col as f64) * 0.1));
        let w = &g * g.adjoint();
        let h = map.hessian(&w);
        let n = map.dim();
        let ms: Vec<CMat> = (0..n)
            .map(|k| {
                let mut x = vec![0.0; n];
                x[k] = 1.0;
                map.apply(&x)
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                let want = (&w * &ms[i] * &w * &ms[j]).trace().re;
                assert!((h[(i, j)] - want).abs() < 1e-9 * (1.0 + want.abs()), "{i} {j}");
            }
        }
        let y = &w * c(0.3, 0.0);
        let adj = map.adjoint(&y);
        for k in 0..n {
            let want = (&y * &ms[k]).trace().re;
            assert!((adj[k] - want).abs() < 1e-9 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn product_spectrum() {
        let t1 = two_point_triple(c(3.0, 0.0));
        let t2 = two_point_triple(c(0.0, 4.0));
        let p = product_triples(&t1, &t2).unwrap();
        assert_eq!(p.hilbert_dim(), 4);
        assert_eq!(p.algebra().blocks(), &[1, 1, 1, 1]);
        let ev = hermitian_eigenvalues(p.dirac());
        for (v, want) in ev.iter().zip([-5.0, -5.0, 5.0, 5.0]) {
            assert!((v - want).abs() < 1e-12);
        }
        let g2 = graph_triple(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(product_triples(&g2, &t1).is_err());
    }

    #[test]
    fn custom_images_round_trip() {
        let alg = Algebra::new(vec![2, 1]).unwrap();
        let rep = Representation::defining(&alg);
        let images = rep.hermitian_images(&alg);
        let again = Representation::from_hermitian_images(&alg, &images).unwrap();
        for (a, b) in rep.unit_images().iter().zip(again.unit_images()) {
            assert!(max_abs_diff(&a.to_dense(), &b.to_dense()) < 1e-15);
        }
        let basis = hermitian_basis(&alg);
        for (h, img) in basis.iter().zip(&images) {
            assert!(max_abs_diff(&rep.apply(&alg, h).unwrap(), img) < 1e-15);
        }
    }

    #[test]
    fn moyal_n2_structure() {
        let theta = 0.5;
        let x = moyal_lowering(2, theta);
        assert!((x[(1, 0)].re - 1.0 / theta.sqrt()).abs() < 1e-15);
        assert_eq!(x[(0, 1)], ZERO);
        let t = truncated_moyal_triple(2, theta).unwrap();
        assert_eq!(t.hilbert_dim(), 8);
        assert!(truncated_moyal_triple(1, 1.0).is_err());
    }

    #[test]
    fn projection_checks() {
        let t = graph_triple(&[
            vec![0.0, 2.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let e = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ONE, ZERO]));
        let p = project_triple(&t, &e).unwrap();
        assert_eq!(p.hilbert_dim(), 2);
        assert!((p.dirac()[(0, 1)].re - 2.0).abs() < 1e-15);
        let id = CMat::identity(3, 3);
        let same = project_triple(&t, &id).unwrap();
        assert!(max_abs_diff(same.dirac(), t.dirac()) < 1e-15);
        let bad = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ZERO, ZERO]));
        match project_triple(&t, &bad) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("commute")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(graph_triple(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        let alg = Algebra::commutative(2).unwrap();
        let rep = Representation::defining(&alg);
        let d = CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(SpectralTriple::new(alg, rep, d, None).is_err());
    }
}
