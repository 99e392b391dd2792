//! Spectral distance on states of finite-dimensional spectral triples.
//!
//! The crate is organised in layers:
//!
//! * [`algebra`]: block matrix algebras, Hermitian coordinates, states and the Bloch map.
//! * [`triple`]: spectral triples, the Lipschitz seminorm and its kernel, and builders
//!   (graphs, products, projections, truncated Moyal).
//! * [`solver`]: finiteness test and the supremum over the Lipschitz ball, with a
//!   dual certificate and an independent random-search oracle.
//! * [`closed_forms`], [`bundle`], [`moyal`]: closed-form distance formulas used as oracles.
//! * [`kantorovich`]: sampled outer approximation of the Monge-Kantorovich functional.
//! * [`catalog`], [`verify`], [`io`]: formula registry, verification suites and JSON formats.
//!
//! ```
//! use ncgdist::prelude::*;
//!
//! let t = graph_triple(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
//! let a = State::point(t.algebra(), 0).unwrap();
//! let b = State::point(t.algebra(), 1).unwrap();
//! let r = spectral_distance(&t, &a, &b, &SolverOptions::default()).unwrap();
//! assert!((r.value().unwrap() - 0.5).abs() < 1e-6);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod bundle;
pub mod catalog;
pub mod closed_forms;
pub mod error;
pub mod io;
pub mod kantorovich;
pub mod linalg;
pub mod moyal;
mod sdp;
pub mod solver;
pub mod triple;
pub mod verify;

pub use error::{Error, Result};

/// Common imports for downstream code and tests.
pub mod prelude {
    pub use crate::algebra::{
        bloch_of_state, hermitian_basis, mix_states, state_of_bloch, Algebra, AlgebraElement,
        BlochPoint, State,
    };
    pub use crate::error::{Error, Result};
    pub use crate::linalg::{CMat, C64};
    pub use crate::solver::{
        is_finite, oracle_lower_bound, segment_check, spectral_distance, DistanceResult,
        Finiteness, Outcome, SolverOptions,
    };
    pub use crate::triple::{
        graph_triple, m2_diagonal_triple, product_triples, project_triple, seminorm,
        seminorm_kernel, sphere_point_triple, truncated_moyal_triple, two_point_triple,
        Representation, SpectralTriple,
    };
}
