use ncgdist::closed_forms::{
    squared_triangle_holds, three_point_distance, three_point_inverse, ThreePointParams,
};
use ncgdist::kantorovich::{sample_pure_pairs, wasserstein_upper};
use ncgdist::moyal::moyal_eigenstate_distance;
use ncgdist::prelude::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frob_inner(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    let s = a.add(b).frobenius_norm().powi(2);
    (s - a.frobenius_norm().powi(2) - b.frobenius_norm().powi(2)) / 2.0
}

fn distance(t: &SpectralTriple, a: &State, b: &State) -> Option<f64> {
    spectral_distance(t, a, b, &SolverOptions::default()).unwrap().value()
}

fn random_element(alg: &Algebra, seed: u64) -> AlgebraElement {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..alg.herm_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    alg.element_from_coords(&x).unwrap()
}

fn block_list() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=3)
}

/// Connected weighted graph on `n` vertices: a path plus random extra links.
fn connected_graph() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (3usize..=5).prop_flat_map(|n| {
        (
            prop::collection::vec(0.2f64..3.0, n - 1),
            prop::collection::vec(prop::option::of(0.2f64..3.0), n * n),
        )
            .prop_map(move |(path, extra)| {
                let mut w = vec![vec![0.0; n]; n];
                for i in 0..n - 1 {
                    w[i][i + 1] = path[i];
                    w[i + 1][i] = path[i];
                }
                for i in 0..n {
                    for j in i + 2..n {
                        if let Some(x) = extra[i * n + j] {
                            w[i][j] = x;
                            w[j][i] = x;
                        }
                    }
                }
                w
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hermitian_basis_is_orthonormal(blocks in block_list()) {
        let alg = Algebra::new(blocks).unwrap();
        let basis = hermitian_basis(&alg);
        prop_assert_eq!(basis.len(), alg.herm_dim());
        for (i, a) in basis.iter().enumerate() {
            prop_assert!(a.is_hermitian());
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((frob_inner(a, b) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coordinates_round_trip(blocks in block_list(), seed in any::<u64>()) {
        let alg = Algebra::new(blocks).unwrap();
        let a = random_element(&alg, seed);
        let back = alg.element_from_coords(&alg.coords_of(&a).unwrap()).unwrap();
        prop_assert!(a.add(&back.scale(C64::new(-1.0, 0.0))).frobenius_norm() < 1e-12);
    }

    #[test]
    fn states_are_affine(blocks in block_list(), seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let alg = Algebra::new(blocks).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s0 = State::random_mixed(&alg, &mut rng);
        let s1 = State::random_mixed(&alg, &mut rng);
        let mix = mix_states(&s0, &s1, lambda).unwrap();
        let a = random_element(&alg, seed ^ 0x5a5a);
        let lhs = mix.eval(&a).unwrap();
        let rhs = s0.eval(&a).unwrap() * lambda + s1.eval(&a).unwrap() * (1.0 - lambda);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((mix.eval(&alg.identity()).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bloch_map_round_trips(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        let n = (x * x + y * y + z * z).sqrt();
        let s = if n > 1.0 { 1.0 / n } else { 1.0 };
        let p = BlochPoint::new(x * s, y * s, z * s);
        let q = bloch_of_state(&state_of_bloch(p).unwrap()).unwrap();
        prop_assert!((p.x - q.x).abs() < 1e-12);
        prop_assert!((p.y - q.y).abs() < 1e-12);
        prop_assert!((p.z - q.z).abs() < 1e-12);
    }

    #[test]
    fn seminorm_is_a_seminorm(w in connected_graph(), s1 in any::<u64>(), s2 in any::<u64>(), k in -3.0f64..3.0) {
        let t = graph_triple(&w).unwrap();
        let alg = t.algebra();
        let a = random_element(alg, s1);
        let b = random_element(alg, s2);
        let la = seminorm(&t, &a).unwrap();
        let lb = seminorm(&t, &b).unwrap();
        prop_assert!(seminorm(&t, &alg.identity()).unwrap() < 1e-12);
        prop_assert!((seminorm(&t, &a.scale(C64::new(k, 0.0))).unwrap() - k.abs() * la).abs() < 1e-10 * (1.0 + la));
        prop_assert!(seminorm(&t, &a.add(&b)).unwrap() <= la + lb + 1e-10);
    }

    #[test]
    fn three_point_closed_form_obeys_squared_triangle(d12 in 0.1f64..5.0, d13 in 0.1f64..5.0, d23 in 0.1f64..5.0) {
        let (a, b, c) = three_point_distance(&ThreePointParams::new(d12, d13, d23).unwrap()).unwrap();
        prop_assert!(squared_triangle_holds(a, b, c, 1e-9));
        let back = three_point_inverse(a, b, c).unwrap();
        let (a2, b2, c2) = three_point_distance(&back).unwrap();
        prop_assert!((a - a2).abs() <= 1e-9 * a);
        prop_assert!((b - b2).abs() <= 1e-9 * b);
        prop_assert!((c - c2).abs() <= 1e-9 * c);
    }

    #[test]
    fn moyal_eigen_distances_add_along_the_ladder(theta in 0.1f64..5.0, m in 0u64..40, dn in 0u64..40, dp in 0u64..40) {
        let (n, p) = (m + dn, m + dn + dp);
        let lhs = moyal_eigenstate_distance(theta, m, n).unwrap() + moyal_eigenstate_distance(theta, n, p).unwrap();
        let rhs = moyal_eigenstate_distance(theta, m, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        prop_assert_eq!(moyal_eigenstate_distance(theta, p, m).unwrap(), rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn distance_is_a_metric_on_graph_states(w in connected_graph(), seed in any::<u64>()) {
        let t = graph_triple(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<State> = (0..3).map(|_| State::random_mixed(t.algebra(), &mut rng)).collect();
        let d01 = distance(&t, &s[0], &s[1]).unwrap();
        let d10 = distance(&t, &s[1], &s[0]).unwrap();
        let d12 = distance(&t, &s[1], &s[2]).unwrap();
        let d02 = distance(&t, &s[0], &s[2]).unwrap();
        prop_assert!(distance(&t, &s[0], &s[0]).unwrap() < 1e-9);
        prop_assert!((d01 - d10).abs() <= 1e-5 * d01.max(1e-9));
        prop_assert!(d02 <= d01 + d12 + 1e-5 * (d01 + d12));
    }

    #[test]
    fn random_search_never_beats_the_solver(w in connected_graph(), seed in any::<u64>()) {
        let t = graph_triple(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = State::random_mixed(t.algebra(), &mut rng);
        let b = State::random_mixed(t.algebra(), &mut rng);
        let d = distance(&t, &a, &b).unwrap();
        let (lower, element) = oracle_lower_bound(&t, &a, &b, 64, seed).unwrap();
        prop_assert!(lower <= d * (1.0 + 1e-6) + 1e-12);
        prop_assert!((seminorm(&t, &element).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_point_distance_is_inverse_coupling(re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let m = C64::new(re, im);
        prop_assume!(m.norm() > 0.1);
        let t = two_point_triple(m);
        let a = State::point(t.algebra(), 0).unwrap();
        let b = State::point(t.algebra(), 1).unwrap();
        let d = distance(&t, &a, &b).unwrap();
        prop_assert!((d - 1.0 / m.norm()).abs() <= 1e-6 / m.norm());
    }
}

#[test]
fn zero_coupling_gives_infinite_distance() {
    let t = two_point_triple(C64::new(0.0, 0.0));
    let a = State::point(t.algebra(), 0).unwrap();
    let b = State::point(t.algebra(), 1).unwrap();
    let r = spectral_distance(&t, &a, &b, &SolverOptions::default()).unwrap();
    assert!(r.is_infinite());
    assert!(r.witness_gap.unwrap() > 0.5);
    assert!(!is_finite(&t, &a, &b, 1e-9).unwrap().finite);
}

#[test]
fn disconnected_graph_separates_components() {
    let w = vec![
        vec![0.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 2.0],
        vec![0.0, 0.0, 2.0, 0.0],
    ];
    let t = graph_triple(&w).unwrap();
    let p: Vec<State> = (0..4).map(|i| State::point(t.algebra(), i).unwrap()).collect();
    assert!((distance(&t, &p[0], &p[1]).unwrap() - 1.0).abs() < 1e-6);
    assert!((distance(&t, &p[2], &p[3]).unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(distance(&t, &p[0], &p[2]), None);
    assert_eq!(distance(&t, &p[1], &p[3]), None);
}

#[test]
fn kantorovich_bound_tightens_with_more_constraints() {
    let t = truncated_moyal_triple(2, 2.0).unwrap();
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = State::random_pure(t.algebra(), 0, &mut rng);
    let b = State::random_pure(t.algebra(), 0, &mut rng);
    let pairs = sample_pure_pairs(&t, 24, 11, &opts).unwrap();
    let d = distance(&t, &a, &b);
    let mut previous = f64::INFINITY;
    for k in [4, 8, 16, 24] {
        let bound = wasserstein_upper(&t, &a, &b, &pairs[..k.min(pairs.len())], None, &opts).unwrap();
        let upper = match bound.upper {
            Outcome::Finite(v) => v,
            Outcome::Infinite => f64::INFINITY,
        };
        assert!(upper <= previous + 1e-9, "{upper} after {previous}");
        if let Some(d) = d {
            assert!(d <= upper + 1e-6);
        }
        previous = upper;
    }
}
