//! Catalog-versus-solver verification suites.
//!
//! Every suite is a list of named groups; a group draws its cases from a
//! generator seeded by `(seed, group, case index)`, so the report does not
//! depend on thread count or execution order. Rows are sorted by `case_id`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{mix_states, random_vector, state_of_bloch, Algebra, BlochPoint, State};
use crate::bundle::{
    fiber_coordinate, fiber_distance_general, fiber_distance_n2, torus_distance_n2, torus_equatorial_distance,
    CircleBundleParams, TorusParams,
};
use crate::catalog;
use crate::closed_forms::{
    complete_graph_distance, complete_graph_weights, cut_link_distance, four_point_special, graph_geodesic_length,
    m2_eigen_distance, moyal_ball_distance, sphere_point_distance, three_point_distance, three_point_inverse,
    FourPointCase, FourPointParams, ThreePointParams,
};
use crate::error::{invalid, Result};
use crate::kantorovich::{sample_pure_pairs, wasserstein_upper};
use crate::linalg::{c, CMat, C64, ONE, ZERO};
use crate::moyal::{
    eigenstate_modified_length, eigenstate_relative_gap, modified_quantum_length, moyal_eigenstate_distance,
    quantum_sq_length, QuantumLengthParams,
};
use crate::solver::{is_finite, segment_check, DistanceSolver, Outcome, SolverOptions};
use crate::triple::{
    graph_triple, m2_diagonal_triple, product_triples, project_triple, sphere_point_triple, truncated_moyal_triple,
    two_point_triple, Representation, SpectralTriple,
};

/// Named collection of verification groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Discrete,
    Graphs,
    Ball,
    Products,
    Bundle,
    Moyal,
    Kantorovich,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "all",
        "discrete",
        "graphs",
        "ball",
        "products",
        "bundle",
        "moyal",
        "kantorovich",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Discrete => "discrete",
            Suite::Graphs => "graphs",
            Suite::Ball => "ball",
            Suite::Products => "products",
            Suite::Bundle => "bundle",
            Suite::Moyal => "moyal",
            Suite::Kantorovich => "kantorovich",
            Suite::All => "all",
        }
    }

    fn contains(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "discrete" => Suite::Discrete,
            "graphs" => Suite::Graphs,
            "ball" => Suite::Ball,
            "products" => Suite::Products,
            "bundle" => Suite::Bundle,
            "moyal" => Suite::Moyal,
            "kantorovich" => Suite::Kantorovich,
            "all" => Suite::All,
            _ => return Err(invalid(format!("unknown suite {s:?}; expected one of {:?}", Self::NAMES))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A reference or computed quantity in a report row.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Value(f64),
    Infinite,
    /// Finite, value not recorded.
    Finite,
    /// The computation failed.
    Failed(String),
}

impl Quantity {
    fn of(o: Outcome) -> Self {
        match o {
            Outcome::Finite(v) => Quantity::Value(v),
            Outcome::Infinite => Quantity::Infinite,
        }
    }

    fn of_result(r: Result<Outcome>) -> Self {
        match r {
            Ok(o) => Self::of(o),
            Err(e) => Quantity::Failed(e.to_string()),
        }
    }

    fn of_value(r: Result<f64>) -> Self {
        match r {
            Ok(v) => Quantity::Value(v),
            Err(e) => Quantity::Failed(e.to_string()),
        }
    }

    fn value(&self) -> Option<f64> {
        match self {
            Quantity::Value(v) => Some(*v),
            _ => None,
        }
    }

    fn is_finite_kind(&self) -> bool {
        matches!(self, Quantity::Value(_) | Quantity::Finite)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Value(v) => write!(f, "{v:e}"),
            Quantity::Infinite => f.write_str("infinite"),
            Quantity::Finite => f.write_str("finite"),
            Quantity::Failed(msg) => write!(f, "error: {msg}"),
        }
    }
}

/// Comparison applied to a row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    /// `|c − e| ≤ tol·|e|`, or `|c − e| ≤ tol` when `e = 0`; infinities must agree.
    Rel(f64),
    /// `|c − e| ≤ tol`; infinities must agree.
    Abs(f64),
    /// `c ≤ e + tol`; any computed value passes an infinite reference.
    AtMost(f64),
    /// `c ≥ e − tol`; an infinite computed value always passes.
    AtLeast(f64),
    /// Only finiteness has to agree.
    Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseRow {
    pub case_id: String,
    pub formula_ref: String,
    pub expected: Quantity,
    pub computed: Quantity,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub status: Status,
    pub runtime_ms: Option<f64>,
}

impl CaseRow {
    pub fn new(case_id: String, formula_ref: &str, expected: Quantity, computed: Quantity, check: Check) -> Self {
        let (abs_err, rel_err, pass) = judge(&expected, &computed, check);
        Self {
            case_id,
            formula_ref: formula_ref.to_string(),
            expected,
            computed,
            abs_err,
            rel_err,
            status: if pass { Status::Pass } else { Status::Fail },
            runtime_ms: None,
        }
    }
}

fn judge(e: &Quantity, c: &Quantity, check: Check) -> (Option<f64>, Option<f64>, bool) {
    if matches!(e, Quantity::Failed(_)) || matches!(c, Quantity::Failed(_)) {
        return (None, None, false);
    }
    let rel = |a: f64, e: f64| if e == 0.0 { a } else { a / e.abs() };
    match check {
        Check::Verdict => (None, None, e.is_finite_kind() == c.is_finite_kind()),
        Check::Rel(tol) | Check::Abs(tol) => match (e, c) {
            (Quantity::Value(x), Quantity::Value(y)) => {
                let a = (y - x).abs();
                let r = rel(a, *x);
                let pass = match check {
                    Check::Rel(_) if *x != 0.0 => r <= tol,
                    _ => a <= tol,
                };
                (Some(a), Some(r), pass)
            }
            (Quantity::Infinite, Quantity::Infinite) => (Some(0.0), Some(0.0), true),
            _ => (None, None, false),
        },
        Check::AtMost(tol) => match (e, c) {
            (Quantity::Infinite, _) => (Some(0.0), Some(0.0), true),
            (Quantity::Value(x), Quantity::Value(y)) => {
                let a = (y - x).max(0.0);
                (Some(a), Some(rel(a, *x)), a <= tol)
            }
            _ => (None, None, false),
        },
        Check::AtLeast(tol) => match (e, c) {
            (_, Quantity::Infinite) => (Some(0.0), Some(0.0), true),
            (Quantity::Value(x), Quantity::Value(y)) => {
                let a = (x - y).max(0.0);
                (Some(a), Some(rel(a, *x)), a <= tol)
            }
            _ => (None, None, false),
        },
    }
}

/// Settings shared by all groups of a run.
#[derive(Clone, Debug)]
#[derive(Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Record per-case wall time in `runtime_ms`.
    pub timings: bool,
    pub solver: SolverOptions,
}


/// Result of a verification run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<CaseRow>,
}

impl Report {
    pub const HEADER: [&'static str; 8] = [
        "case_id",
        "formula_ref",
        "expected",
        "computed",
        "abs_err",
        "rel_err",
        "status",
        "runtime_ms",
    ];

    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Pass).count()
    }

    pub fn failed(&self) -> usize {
        self.rows.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRow> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::HEADER)?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for r in &self.rows {
            out.write_record([
                r.case_id.clone(),
                r.formula_ref.clone(),
                r.expected.to_string(),
                r.computed.to_string(),
                opt(r.abs_err),
                opt(r.rel_err),
                r.status.to_string(),
                opt(r.runtime_ms),
            ])?;
        }
        out.flush().map_err(|e| crate::Error::Io {
            path: "csv output".into(),
            source: e,
        })?;
        Ok(())
    }
}

/// Case generator of one group: `(context, case index, rng) → rows`.
type CaseFn = fn(&Ctx, usize, &mut ChaCha8Rng) -> Vec<CaseRow>;

enum Plan {
    /// `n` independent cases.
    Cases(usize, CaseFn),
    /// A whole-group routine for groups whose cases are selected jointly.
    Whole(fn(&Ctx) -> Vec<CaseRow>),
}

/// A named group of checks belonging to one suite.
pub struct Group {
    pub name: &'static str,
    pub suite: Suite,
    plan: Plan,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("suite", &self.suite)
            .finish()
    }
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    group: &'static str,
    suite: Suite,
}

impl Ctx<'_> {
    fn id(&self, tail: impl fmt::Display) -> String {
        format!("{}/{}/{}", self.suite, self.group, tail)
    }

    fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.opts.seed);
        r.set_stream(fnv1a(self.group).wrapping_add(index));
        r
    }

    fn solver<'t>(&self, t: &'t SpectralTriple) -> Result<DistanceSolver<'t>> {
        DistanceSolver::new(t, self.opts.solver.clone())
    }

    fn distance(&self, t: &SpectralTriple, a: &State, b: &State) -> Quantity {
        Quantity::of_result(self.solver(t).and_then(|s| s.distance(a, b)).map(|r| r.outcome))
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn fref(id: &str) -> &'static str {
    catalog::find(id).map(|e| e.formula_ref).expect("registered catalog id")
}

fn failed_rows(ctx: &Ctx, tail: impl fmt::Display, reference: &str, err: crate::Error) -> Vec<CaseRow> {
    vec![CaseRow::new(
        ctx.id(tail),
        reference,
        Quantity::Finite,
        Quantity::Failed(err.to_string()),
        Check::Verdict,
    )]
}

macro_rules! tri {
    ($ctx:expr, $tail:expr, $reference:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return failed_rows($ctx, $tail, $reference, err),
        }
    };
}

/// All groups, in a fixed order.
pub fn groups() -> &'static [Group] {
    static GROUPS: &[Group] = &[
        Group { name: "two_point", suite: Suite::Discrete, plan: Plan::Cases(20, case_two_point) },
        Group { name: "three_point", suite: Suite::Discrete, plan: Plan::Cases(50, case_three_point) },
        Group { name: "three_point_inverse", suite: Suite::Discrete, plan: Plan::Cases(50, case_three_point_inverse) },
        Group { name: "four_point", suite: Suite::Discrete, plan: Plan::Whole(group_four_point) },
        Group { name: "segment", suite: Suite::Discrete, plan: Plan::Cases(20, case_segment) },
        Group { name: "convexity", suite: Suite::Discrete, plan: Plan::Cases(20, case_convexity) },
        Group { name: "isometry", suite: Suite::Discrete, plan: Plan::Cases(20, case_isometry) },
        Group { name: "projection", suite: Suite::Discrete, plan: Plan::Cases(20, case_projection) },
        Group { name: "complete_graph", suite: Suite::Graphs, plan: Plan::Whole(group_complete_graph) },
        Group { name: "graph_properties", suite: Suite::Graphs, plan: Plan::Cases(20, case_graph_properties) },
        Group { name: "m2_eigen", suite: Suite::Ball, plan: Plan::Cases(120, case_m2_eigen) },
        Group { name: "moyal_ball", suite: Suite::Ball, plan: Plan::Cases(100, case_moyal_ball) },
        Group { name: "sphere_point", suite: Suite::Ball, plan: Plan::Cases(30, case_sphere_point) },
        Group { name: "pythagoras", suite: Suite::Products, plan: Plan::Cases(50, case_pythagoras) },
        Group { name: "fiber_reduction", suite: Suite::Bundle, plan: Plan::Cases(1000, case_fiber_reduction) },
        Group { name: "torus_equatorial", suite: Suite::Bundle, plan: Plan::Cases(200, case_torus_equatorial) },
        Group { name: "torus_far", suite: Suite::Bundle, plan: Plan::Cases(40, case_torus_far) },
        Group { name: "moyal_convergence", suite: Suite::Moyal, plan: Plan::Whole(group_moyal_convergence) },
        Group { name: "eigen_additivity", suite: Suite::Moyal, plan: Plan::Cases(50, case_eigen_additivity) },
        Group { name: "quantum_length", suite: Suite::Moyal, plan: Plan::Whole(group_quantum_length) },
        Group { name: "kantorovich", suite: Suite::Kantorovich, plan: Plan::Cases(20, case_kantorovich) },
    ];
    GROUPS
}

pub fn find_group(name: &str) -> Option<&'static Group> {
    groups().iter().find(|g| g.name == name)
}

/// Runs one group.
pub fn run_group(group: &Group, opts: &VerifyOptions) -> Report {
    let ctx = Ctx {
        opts,
        group: group.name,
        suite: group.suite,
    };
    let mut rows = match &group.plan {
        Plan::Cases(n, f) => (0..*n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut rng = ctx.rng(i as u64);
                let start = Instant::now();
                let mut rows = f(&ctx, i, &mut rng);
                let ms = start.elapsed().as_secs_f64() * 1e3;
                if opts.timings {
                    for r in &mut rows {
                        r.runtime_ms = Some(ms);
                    }
                }
                rows
            })
            .collect::<Vec<_>>(),
        Plan::Whole(f) => {
            let start = Instant::now();
            let mut rows = f(&ctx);
            if opts.timings {
                let ms = start.elapsed().as_secs_f64() * 1e3;
                for r in &mut rows {
                    r.runtime_ms.get_or_insert(ms);
                }
            }
            rows
        }
    };
    if !opts.timings {
        for r in &mut rows {
            r.runtime_ms = None;
        }
    }
    rows.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    Report { rows }
}

/// Runs every group of `suite`.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Report {
    let mut rows: Vec<CaseRow> = groups()
        .iter()
        .filter(|g| suite.contains(g.suite))
        .flat_map(|g| run_group(g, opts).rows)
        .collect();
    rows.sort_by(|a, b| a.case_id.cmp(&b.case_id));
    Report { rows }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn unit(v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| c(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)));
    (&g + g.adjoint()) * c(0.5, 0.0)
}

fn random_phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, uniform(rng, 0.0, 2.0 * PI))
}

/// Point of the Bloch ball with height `z`, on the sphere when `pure`.
fn bloch_at_height(z: f64, pure: bool, rng: &mut ChaCha8Rng) -> BlochPoint {
    let rmax = (1.0 - z * z).max(0.0).sqrt();
    let r = if pure { rmax } else { rmax * uniform(rng, 0.0, 1.0) };
    let a = uniform(rng, 0.0, 2.0 * PI);
    BlochPoint::new(r * a.cos(), r * a.sin(), z)
}

fn random_bloch(pure: bool, rng: &mut ChaCha8Rng) -> BlochPoint {
    let z = uniform(rng, -1.0, 1.0);
    let p = bloch_at_height(z, true, rng);
    let s = if pure { 1.0 } else { uniform(rng, 0.0, 1.0).cbrt() };
    BlochPoint::new(s * p.x, s * p.y, s * p.z)
}

fn bloch_state(p: BlochPoint) -> State {
    state_of_bloch(p).expect("point inside the ball")
}

fn two_point_states(p: f64, q: f64) -> (State, State) {
    let alg = Algebra::commutative(2).expect("two points");
    (
        State::distribution(&alg, &[p, 1.0 - p]).expect("distribution"),
        State::distribution(&alg, &[q, 1.0 - q]).expect("distribution"),
    )
}

// ---- discrete ----

fn case_two_point(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let m = uniform(rng, 0.1, 10.0) * random_phase(rng);
    let t = two_point_triple(m);
    let a = State::point(t.algebra(), 0).expect("point");
    let b = State::point(t.algebra(), 1).expect("point");
    vec![CaseRow::new(
        ctx.id(format!("{i:04}")),
        fref("two_point"),
        Quantity::Value(1.0 / m.norm()),
        ctx.distance(&t, &a, &b),
        Check::Rel(1e-6),
    )]
}

const PAIR_NAMES: [&str; 3] = ["d12", "d13", "d23"];
const PAIR_INDICES: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn three_point_solver_rows(
    ctx: &Ctx,
    i: usize,
    reference: &str,
    t: &SpectralTriple,
    expected: [f64; 3],
    tol: f64,
) -> (Vec<CaseRow>, Vec<Option<f64>>) {
    let mut rows = Vec::new();
    let mut got = Vec::new();
    for (k, &(a, b)) in PAIR_INDICES.iter().enumerate() {
        let sa = State::point(t.algebra(), a).expect("point");
        let sb = State::point(t.algebra(), b).expect("point");
        let d = ctx.distance(t, &sa, &sb);
        got.push(d.value());
        rows.push(CaseRow::new(
            ctx.id(format!("{i:04}/{}", PAIR_NAMES[k])),
            reference,
            Quantity::Value(expected[k]),
            d,
            Check::Rel(tol),
        ));
    }
    (rows, got)
}

fn case_three_point(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("three_point");
    let id = format!("{i:04}");
    let p = tri!(
        ctx,
        &id,
        reference,
        ThreePointParams::new(uniform(rng, 0.2, 5.0), uniform(rng, 0.2, 5.0), uniform(rng, 0.2, 5.0))
    );
    let (e12, e13, e23) = tri!(ctx, &id, reference, three_point_distance(&p));
    let t = tri!(ctx, &id, reference, p.triple());
    let (mut rows, got) = three_point_solver_rows(ctx, i, reference, &t, [e12, e13, e23], 1e-5);
    if let [Some(a), Some(b), Some(cc)] = got[..] {
        // squared triangle inequality on the solver outputs: largest² ≤ sum of the other two²
        let mut sq = [a * a, b * b, cc * cc];
        sq.sort_by(f64::total_cmp);
        let bound = sq[0] + sq[1];
        rows.push(CaseRow::new(
            ctx.id(format!("{i:04}/squared_triangle")),
            "three-point space: squared triangle inequality",
            Quantity::Value(bound),
            Quantity::Value(sq[2]),
            Check::AtMost(1e-9 * bound),
        ));
    }
    rows
}

fn case_three_point_inverse(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("three_point_inverse");
    let (a, b, cc) = loop {
        let (a, b, cc) = (uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0));
        let (a2, b2, c2) = (a * a, b * b, cc * cc);
        let margin = 0.9;
        if a2 < margin * (b2 + c2) && b2 < margin * (a2 + c2) && c2 < margin * (a2 + b2) {
            break (a, b, cc);
        }
    };
    let id = format!("{i:04}");
    let p = tri!(ctx, &id, reference, three_point_inverse(a, b, cc));
    let t = tri!(ctx, &id, reference, p.triple());
    three_point_solver_rows(ctx, i, reference, &t, [a, b, cc], 1e-4).0
}

fn four_point_region_name(case: FourPointCase, second: bool) -> &'static str {
    match (case, second) {
        (FourPointCase::ShortDirect, _) => "d12_short_direct",
        (FourPointCase::Balanced, _) => "d12_balanced",
        (FourPointCase::NegativeC, _) => "d12_negative_c",
        (FourPointCase::Otherwise, false) => "d12_otherwise",
        (FourPointCase::ViaFour, _) => "d13_via_four",
        (FourPointCase::ViaTwo, _) => "d13_via_two",
        (FourPointCase::Otherwise, true) => "d13_otherwise",
    }
}

const FOUR_POINT_PER_REGION: usize = 50;

fn group_four_point(ctx: &Ctx) -> Vec<CaseRow> {
    let reference = fref("four_point_cycle");
    let mut rng = ctx.rng(0);
    // (region, pair index into (d12, d13), params)
    let mut picked: Vec<(&'static str, bool, [f64; 4])> = Vec::new();
    let mut count = std::collections::BTreeMap::<&'static str, usize>::new();
    let full = |count: &std::collections::BTreeMap<&str, usize>, r: &str| {
        count.get(r).copied().unwrap_or(0) >= FOUR_POINT_PER_REGION
    };
    let mut draws = 0;
    while draws < 2_000_000 && (count.len() < 7 || count.values().any(|&v| v < FOUR_POINT_PER_REGION)) {
        draws += 1;
        let mut d = [0.0; 4];
        for x in &mut d {
            *x = uniform(&mut rng, 0.3, 3.0);
        }
        // the balanced guard has measure zero: force it on every other draw
        if draws % 2 == 0 {
            d[2] = d[0] * d[3] / d[1];
        }
        let Ok(p) = FourPointParams::cycle(d[0], d[1], d[2], d[3]) else { continue };
        let Ok(v) = four_point_special(&p) else { continue };
        for (case, second) in [(v.case12, false), (v.case13, true)] {
            let r = four_point_region_name(case, second);
            if !full(&count, r) {
                *count.entry(r).or_default() += 1;
                picked.push((r, second, d));
            }
        }
    }
    let mut numbered: Vec<(String, bool, [f64; 4])> = Vec::new();
    let mut seen = std::collections::BTreeMap::<&'static str, usize>::new();
    for (r, second, d) in picked {
        let k = seen.entry(r).or_default();
        numbered.push((format!("{r}/{k:04}"), second, d));
        *k += 1;
    }
    let mut rows: Vec<CaseRow> = numbered
        .into_par_iter()
        .flat_map_iter(|(tail, second, d)| {
            let p = FourPointParams::cycle(d[0], d[1], d[2], d[3]).expect("validated");
            let v = four_point_special(&p).expect("validated");
            let t = tri!(ctx, &tail, reference, p.triple());
            let (target, expected) = if second { (2, v.d13) } else { (1, v.d12) };
            let a = State::point(t.algebra(), 0).expect("point");
            let b = State::point(t.algebra(), target).expect("point");
            vec![CaseRow::new(
                ctx.id(tail),
                reference,
                Quantity::Value(expected),
                ctx.distance(&t, &a, &b),
                Check::Rel(1e-4),
            )]
        })
        .collect();
    for r in ["d12_short_direct", "d12_balanced", "d12_negative_c", "d12_otherwise", "d13_via_four", "d13_via_two", "d13_otherwise"] {
        let n = count.get(r).copied().unwrap_or(0);
        if n < FOUR_POINT_PER_REGION {
            rows.push(CaseRow::new(
                ctx.id(format!("{r}/coverage")),
                "four-point cycle: sampled cases per region",
                Quantity::Value(FOUR_POINT_PER_REGION as f64),
                Quantity::Value(n as f64),
                Check::Abs(0.0),
            ));
        }
    }
    let p = FourPointParams::cycle(1.0, 1.0, 1.0, 1.0).expect("unit cycle");
    let t = graph_triple(&p.weights()).expect("unit cycle");
    let a = State::point(t.algebra(), 0).expect("point");
    let b = State::point(t.algebra(), 1).expect("point");
    rows.push(CaseRow::new(
        ctx.id("unit_cycle"),
        reference,
        Quantity::Value(1.0),
        ctx.distance(&t, &a, &b),
        Check::Rel(1e-4),
    ));
    rows
}

/// A random triple with two states at finite distance.
fn random_connected_case(i: usize, rng: &mut ChaCha8Rng) -> (SpectralTriple, State, State) {
    match i % 3 {
        0 => {
            let n = rng.random_range(3..=5);
            let mut w = vec![vec![0.0; n]; n];
            for a in 0..n {
                for b in a + 1..n {
                    let x = uniform(rng, 0.3, 3.0);
                    w[a][b] = x;
                    w[b][a] = x;
                }
            }
            let t = graph_triple(&w).expect("weights");
            let a = State::random_mixed(t.algebra(), rng);
            let b = State::random_mixed(t.algebra(), rng);
            (t, a, b)
        }
        1 => {
            let t = m2_diagonal_triple(uniform(rng, -2.0, 2.0), uniform(rng, 2.5, 4.0));
            let z = uniform(rng, -0.9, 0.9);
            let a = bloch_state(bloch_at_height(z, false, rng));
            let b = bloch_state(bloch_at_height(z, true, rng));
            (t, a, b)
        }
        _ => {
            let t = truncated_moyal_triple(2, uniform(rng, 0.5, 4.0)).expect("theta");
            let a = bloch_state(random_bloch(false, rng));
            let b = bloch_state(random_bloch(true, rng));
            (t, a, b)
        }
    }
}

const GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn case_segment(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = "segment: d(φ_s, φ_t) = |s − t| d(φ₀, φ₁)";
    let (t, a, b) = random_connected_case(i, rng);
    let id = format!("{i:04}");
    let rep = tri!(ctx, &id, reference, segment_check(&t, &a, &b, &GRID, &ctx.opts.solver));
    vec![CaseRow::new(
        ctx.id(id),
        reference,
        Quantity::Value(0.0),
        Quantity::Value(rep.max_deviation),
        Check::Abs(1e-5),
    )]
}

fn case_convexity(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = "connected component: mixtures of states at finite distance stay at finite distance";
    // triples with a nontrivial kernel: M2 with diagonal D, or two disjoint graphs
    let (t, phi, phi0, phi1) = if i.is_multiple_of(2) {
        let t = m2_diagonal_triple(uniform(rng, -2.0, 2.0), uniform(rng, 2.5, 4.0));
        let z = uniform(rng, -0.9, 0.9);
        let s = [0, 1, 2].map(|k| bloch_state(bloch_at_height(z, k == 1, rng)));
        let [a, b, cc] = s;
        (t, a, b, cc)
    } else {
        let mut w = vec![vec![0.0; 4]; 4];
        for (a, b) in [(0, 1), (2, 3)] {
            let x = uniform(rng, 0.3, 3.0);
            w[a][b] = x;
            w[b][a] = x;
        }
        let t = graph_triple(&w).expect("weights");
        let mass = uniform(rng, 0.1, 0.9);
        let mut dist = || {
            let u = uniform(rng, 0.0, 1.0);
            let v = uniform(rng, 0.0, 1.0);
            State::distribution(t.algebra(), &[mass * u, mass * (1.0 - u), (1.0 - mass) * v, (1.0 - mass) * (1.0 - v)])
                .expect("distribution")
        };
        let (a, b, cc) = (dist(), dist(), dist());
        (t, a, b, cc)
    };
    let tol = ctx.opts.solver.finiteness_tolerance;
    let mut rows = Vec::new();
    for (k, &s) in GRID.iter().enumerate() {
        let id = format!("{i:04}/s{k}");
        let mixed = tri!(ctx, &id, reference, mix_states(&phi0, &phi1, s));
        let verdict = match is_finite(&t, &phi, &mixed, tol) {
            Ok(f) if f.finite => Quantity::Finite,
            Ok(_) => Quantity::Infinite,
            Err(e) => Quantity::Failed(e.to_string()),
        };
        rows.push(CaseRow::new(ctx.id(id), reference, Quantity::Finite, verdict, Check::Verdict));
    }
    rows
}

fn case_isometry(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = "isometry: pullback by a unitary commuting with D preserves distances";
    let id = format!("{i:04}");
    // M2 acting as a ⊗ I on ℂ² ⊗ ℂ², D = E₁₁ ⊗ D_a + E₂₂ ⊗ D_b commutes with diagonal unitaries
    let alg = tri!(ctx, &id, reference, Algebra::new(vec![2]));
    let rep = tri!(ctx, &id, reference, Representation::left_mult_tensor(&alg, 1));
    let (da, db) = (random_hermitian(2, rng), random_hermitian(2, rng));
    let mut d = CMat::zeros(4, 4);
    d.view_mut((0, 0), (2, 2)).copy_from(&da);
    d.view_mut((2, 2), (2, 2)).copy_from(&db);
    let t = tri!(ctx, &id, reference, SpectralTriple::new(alg.clone(), rep, d, None));
    let u = tri!(
        ctx,
        &id,
        reference,
        crate::algebra::AlgebraElement::new(
            &alg,
            vec![CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![random_phase(rng), random_phase(rng)]))]
        )
    );
    let z = uniform(rng, -0.9, 0.9);
    let za = if i % 4 == 3 { uniform(rng, -0.9, 0.9) } else { z };
    let a = bloch_state(bloch_at_height(z, i.is_multiple_of(2), rng));
    let b = bloch_state(bloch_at_height(za, false, rng));
    let ua = tri!(ctx, &id, reference, a.pullback_by_unitary(&u));
    let ub = tri!(ctx, &id, reference, b.pullback_by_unitary(&u));
    vec![CaseRow::new(
        ctx.id(id),
        reference,
        ctx.distance(&t, &a, &b),
        ctx.distance(&t, &ua, &ub),
        Check::Rel(1e-5),
    )]
}

fn case_projection(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = "projection: compression by a projection commuting with D preserves distances";
    let id = format!("{i:04}");
    // M2 acting as I₂ ⊗ a ⊗ I₂; D = (V ⊗ I)(E₁₁ ⊗ D₀ + E₂₂ ⊗ s D₀)(V ⊗ I)* with s < 1
    // and e = V E₁₁ V* ⊗ I commute with D and with the representation.
    let alg = tri!(ctx, &id, reference, Algebra::new(vec![2]));
    let rep = tri!(ctx, &id, reference, Representation::left_mult_tensor(&alg, 2));
    let d0 = random_hermitian(4, rng);
    let s = uniform(rng, 0.1, 0.9);
    let col = unit(random_vector(2, rng));
    let v = CMat::from_row_slice(2, 2, &[col[0], -col[1].conj(), col[1], col[0].conj()]);
    let e11 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
    let e22 = CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
    let inner = e11.kronecker(&d0) + e22.kronecker(&(&d0 * c(s, 0.0)));
    let w = v.kronecker(&CMat::identity(4, 4));
    let d = &w * inner * w.adjoint();
    let d = (&d + d.adjoint()) * c(0.5, 0.0);
    let e = (&v * &e11 * v.adjoint()).kronecker(&CMat::identity(4, 4));
    let t = tri!(ctx, &id, reference, SpectralTriple::new(alg.clone(), rep, d, None));
    let te = tri!(ctx, &id, reference, project_triple(&t, &e));
    let a = State::random_mixed(&alg, rng);
    let b = if i.is_multiple_of(2) {
        State::random_pure(&alg, 0, rng)
    } else {
        State::random_mixed(&alg, rng)
    };
    vec![CaseRow::new(
        ctx.id(id),
        reference,
        ctx.distance(&t, &a, &b),
        ctx.distance(&te, &a, &b),
        Check::Rel(1e-5),
    )]
}

// ---- graphs ----

fn group_complete_graph(ctx: &Ctx) -> Vec<CaseRow> {
    let mut jobs = Vec::new();
    for n in 3..=8usize {
        for k in [1.0, 2.5] {
            jobs.push((n, k, false));
            jobs.push((n, k, true));
        }
    }
    jobs.into_par_iter()
        .flat_map_iter(|(n, k, cut)| {
            let tag = format!("n{n}_k{k}{}", if cut { "_cut" } else { "" });
            let (reference, expected) = if cut {
                (fref("cut_link"), cut_link_distance(n, k))
            } else {
                (fref("complete_graph"), complete_graph_distance(n, k))
            };
            let expected = Quantity::of_value(expected);
            let t = tri!(ctx, &tag, reference, graph_triple(&complete_graph_weights(n, k, cut)));
            let solver = tri!(ctx, &tag, reference, ctx.solver(&t));
            let pairs: Vec<(usize, usize)> = if cut {
                vec![(0, 1)]
            } else {
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
            };
            pairs
                .into_iter()
                .map(|(i, j)| {
                    let a = State::point(t.algebra(), i).expect("point");
                    let b = State::point(t.algebra(), j).expect("point");
                    let got = Quantity::of_result(solver.distance(&a, &b).map(|r| r.outcome));
                    CaseRow::new(ctx.id(format!("{tag}/{i}_{j}")), reference, expected.clone(), got, Check::Rel(1e-5))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn case_graph_properties(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("graph_geodesic");
    let n = rng.random_range(3..=7);
    let mut w = vec![vec![0.0; n]; n];
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < 0.45 {
                let x = uniform(rng, 0.3, 3.0);
                w[a][b] = x;
                w[b][a] = x;
                edges.push((a, b));
            }
        }
    }
    let id = format!("{i:04}");
    let t = tri!(ctx, &id, reference, graph_triple(&w));
    let solver = tri!(ctx, &id, reference, ctx.solver(&t));
    let mut reduced = w.clone();
    if !edges.is_empty() {
        let (a, b) = edges[rng.random_range(0..edges.len())];
        reduced[a][b] = 0.0;
        reduced[b][a] = 0.0;
    }
    let t2 = tri!(ctx, &id, reference, graph_triple(&reduced));
    let solver2 = tri!(ctx, &id, reference, ctx.solver(&t2));
    let mut rows = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let tail = format!("{i:04}/{a}_{b}");
            let sa = State::point(t.algebra(), a).expect("point");
            let sb = State::point(t.algebra(), b).expect("point");
            let d = Quantity::of_result(solver.distance(&sa, &sb).map(|r| r.outcome));
            let d2 = Quantity::of_result(solver2.distance(&sa, &sb).map(|r| r.outcome));
            let geo = match graph_geodesic_length(&w, a, b) {
                Ok(g) if g.is_finite() => Quantity::Value(g),
                Ok(_) => Quantity::Infinite,
                Err(e) => Quantity::Failed(e.to_string()),
            };
            rows.push(CaseRow::new(
                ctx.id(format!("{tail}/geodesic_bound")),
                reference,
                geo.clone(),
                d.clone(),
                Check::AtMost(1e-8),
            ));
            let connected = if geo.is_finite_kind() { Quantity::Finite } else { Quantity::Infinite };
            rows.push(CaseRow::new(
                ctx.id(format!("{tail}/connectivity")),
                "graph: infinite distance iff no connecting path",
                connected,
                d.clone(),
                Check::Verdict,
            ));
            let tol = 1e-6 * d.value().unwrap_or(0.0);
            rows.push(CaseRow::new(
                ctx.id(format!("{tail}/line_deletion")),
                "graph: deleting a line does not decrease distances",
                d,
                d2,
                Check::AtLeast(tol),
            ));
        }
    }
    rows
}

// ---- ball ----

fn case_m2_eigen(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let (d1, d2) = (uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0));
    let (d1, d2) = if (d1 - d2).abs() < 0.2 { (d1, d1 + 1.0) } else { (d1, d2) };
    let t = m2_diagonal_triple(d1, d2);
    let (p, q) = if i < 100 {
        let z = uniform(rng, -0.95, 0.95);
        (bloch_at_height(z, i.is_multiple_of(2), rng), bloch_at_height(z, i.is_multiple_of(3), rng))
    } else {
        let z1 = uniform(rng, -0.95, 0.0);
        let z2 = uniform(rng, 0.05, 0.95);
        (bloch_at_height(z1, i.is_multiple_of(2), rng), bloch_at_height(z2, false, rng))
    };
    vec![CaseRow::new(
        ctx.id(format!("{i:04}")),
        fref("m2_eigen"),
        Quantity::of(m2_eigen_distance(d1, d2, &p, &q)),
        ctx.distance(&t, &bloch_state(p), &bloch_state(q)),
        Check::Rel(1e-5),
    )]
}

fn case_moyal_ball(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let theta = uniform(rng, 0.5, 4.0);
    let p = random_bloch(i.is_multiple_of(2), rng);
    let q = random_bloch(i % 4 < 2, rng);
    let reference = fref("moyal_ball");
    let id = format!("{i:04}");
    let t = tri!(ctx, &id, reference, truncated_moyal_triple(2, theta));
    vec![CaseRow::new(
        ctx.id(id),
        reference,
        Quantity::of_value(moyal_ball_distance(theta, &p, &q)),
        ctx.distance(&t, &bloch_state(p), &bloch_state(q)),
        Check::Rel(1e-5),
    )]
}

fn case_sphere_point(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("sphere_point");
    let n = 2 + i % 2;
    let id = format!("{i:04}");
    let v: Vec<C64> = random_vector(n, rng).into_iter().map(|x| x * uniform(rng, 0.5, 2.0)).collect();
    let vn = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let u: Vec<C64> = v.iter().map(|x| x / vn).collect();
    let project_out = |x: Vec<C64>| -> Vec<C64> {
        let s: C64 = u.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
        x.iter().zip(&u).map(|(xi, ui)| xi - ui * s).collect()
    };
    // aligned pair: ξ = a u + w, ζ = b u + e^{iα} w with |a| = |b|
    let w = project_out(random_vector(n, rng));
    let wn = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let scale = uniform(rng, 0.1, 0.95) / wn;
    let w: Vec<C64> = w.iter().map(|x| x * scale).collect();
    let a = (1.0 - w.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt();
    let (pa, pb, pw) = (random_phase(rng), random_phase(rng), random_phase(rng));
    let xi: Vec<C64> = u.iter().zip(&w).map(|(ui, wi)| ui * a * pa + wi).collect();
    let zeta: Vec<C64> = if i < 20 {
        u.iter().zip(&w).map(|(ui, wi)| ui * a * pb + wi * pw).collect()
    } else {
        unit(random_vector(n, rng))
    };
    let t = tri!(ctx, &id, reference, sphere_point_triple(&v));
    let alg = t.algebra();
    let sx = tri!(ctx, &id, reference, State::pure(alg, 0, &xi));
    let sz = tri!(ctx, &id, reference, State::pure(alg, 0, &zeta));
    let su = tri!(ctx, &id, reference, State::pure(alg, 0, &u));
    let sc = tri!(ctx, &id, reference, State::pure(alg, 1, &[ONE]));
    let pair = tri!(ctx, &id, reference, sphere_point_distance(&v, &xi, &zeta));
    let iso = tri!(ctx, &id, reference, sphere_point_distance(&v, &u, &xi));
    let iso_x = tri!(ctx, &id, reference, sphere_point_distance(&v, &xi, &u));
    vec![
        CaseRow::new(
            ctx.id(format!("{id}/pure_pair")),
            reference,
            Quantity::of(pair.pure_pair),
            ctx.distance(&t, &sx, &sz),
            Check::Rel(1e-5),
        ),
        CaseRow::new(
            ctx.id(format!("{id}/isolated_to_v")),
            reference,
            Quantity::of(iso.isolated_to_first),
            ctx.distance(&t, &sc, &su),
            Check::Rel(1e-5),
        ),
        CaseRow::new(
            ctx.id(format!("{id}/isolated_to_xi")),
            reference,
            Quantity::of(iso_x.isolated_to_first),
            ctx.distance(&t, &sc, &sx),
            Check::Rel(1e-5),
        ),
    ]
}

// ---- products ----

fn case_pythagoras(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("pythagoras_bounds");
    let id = format!("{i:04}");
    let (m1, m2) = (uniform(rng, 0.5, 3.0) * random_phase(rng), uniform(rng, 0.5, 3.0) * random_phase(rng));
    let (t1, t2) = (two_point_triple(m1), two_point_triple(m2));
    let t = tri!(ctx, &id, reference, product_triples(&t1, &t2));
    let (p1, q1) = two_point_states(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0));
    let (p2, q2) = two_point_states(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0));
    let d1 = (p1.weights()[0] - q1.weights()[0]).abs() / m1.norm();
    let d2 = (p2.weights()[0] - q2.weights()[0]).abs() / m2.norm();
    let solver = tri!(ctx, &id, reference, ctx.solver(&t));
    let dist = |a: &State, b: &State| Quantity::of_result(solver.distance(a, b).map(|r| r.outcome));
    let d = dist(&p1.tensor(&p2), &q1.tensor(&q2));
    let lower = d1.hypot(d2);
    let upper = (d1 + d2).min(SQRT_2 * lower);
    let mut rows = vec![
        CaseRow::new(ctx.id(format!("{id}/lower")), reference, Quantity::Value(lower), d.clone(), Check::AtLeast(1e-5)),
        CaseRow::new(ctx.id(format!("{id}/upper")), reference, Quantity::Value(upper), d, Check::AtMost(1e-5)),
        CaseRow::new(
            ctx.id(format!("{id}/first_factor")),
            "product triple: states differing in one factor",
            Quantity::Value(d1),
            dist(&p1.tensor(&p2), &q1.tensor(&p2)),
            Check::Abs(1e-6),
        ),
        CaseRow::new(
            ctx.id(format!("{id}/second_factor")),
            "product triple: states differing in one factor",
            Quantity::Value(d2),
            dist(&p1.tensor(&p2), &p1.tensor(&q2)),
            Check::Abs(1e-6),
        ),
    ];
    let (x, y) = two_point_states(1.0, 0.0);
    let pure = dist(&x.tensor(&x), &y.tensor(&y));
    let e1 = 1.0 / m1.norm();
    let e2 = 1.0 / m2.norm();
    rows.push(CaseRow::new(
        ctx.id(format!("{id}/pure_points")),
        "product of two-point spaces: d² = d₁² + d₂²",
        Quantity::Value(e1 * e1 + e2 * e2),
        match pure {
            Quantity::Value(v) => Quantity::Value(v * v),
            other => other,
        },
        Check::Rel(1e-5),
    ));
    rows
}

// ---- bundle ----

/// Holonomy ratio at least `0.05` away from every integer.
fn non_integer(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let w = uniform(rng, -3.0, 3.0);
        let frac = w - w.round();
        if frac.abs() >= 0.05 {
            return w;
        }
    }
}

fn case_fiber_reduction(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("fiber_general");
    let r1 = uniform(rng, 0.0, 2.0);
    let omega = non_integer(rng);
    let phi = uniform(rng, 0.0, 2.0 * PI);
    let k = rng.random_range(-5..=5);
    let p = CircleBundleParams {
        r: vec![r1, 2.0 - r1],
        omega: vec![0.0, omega],
        phi: vec![0.0, phi],
        k,
        tau0: 0.0,
    };
    let r = (r1 * (2.0 - r1)).sqrt();
    vec![CaseRow::new(
        ctx.id(format!("{i:04}")),
        reference,
        Quantity::of_value(fiber_distance_n2(r, omega, fiber_coordinate(k, omega, phi))),
        Quantity::of_result(fiber_distance_general(&p)),
        Check::Abs(1e-10),
    )]
}

fn case_torus_equatorial(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("torus_equatorial");
    let omega = non_integer(rng);
    let k = rng.random_range(0..=4);
    let tau0 = uniform(rng, 0.0, 2.0 * PI);
    let phi = uniform(rng, 0.0, 2.0 * PI);
    let id = format!("{i:04}");
    let p = tri!(ctx, &id, reference, TorusParams::from_weights(1.0, 1.0, omega, k, tau0, phi));
    vec![CaseRow::new(
        ctx.id(id),
        reference,
        Quantity::of_value(torus_equatorial_distance(&p)),
        Quantity::of_result(torus_distance_n2(&p)),
        Check::Abs(1e-6),
    )]
}

fn case_torus_far(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("torus_n2");
    let omega = rng.random_range(-2..=2) as f64;
    let r1 = uniform(rng, 0.0, 2.0);
    let tau0 = uniform(rng, 0.0, 2.0 * PI);
    let phi = if i.is_multiple_of(2) { 0.0 } else { uniform(rng, 0.1, 2.0 * PI - 0.1) };
    let k = rng.random_range(0..=3);
    let id = format!("{i:04}");
    let p = tri!(ctx, &id, reference, TorusParams::from_weights(r1, 2.0 - r1, omega, k, tau0, phi));
    let expected = if phi == 0.0 {
        Quantity::Value(tau0.min(2.0 * PI - tau0))
    } else {
        Quantity::Infinite
    };
    vec![CaseRow::new(ctx.id(id), reference, expected, Quantity::of_result(torus_distance_n2(&p)), Check::Abs(1e-12))]
}

// ---- moyal ----

const MOYAL_SIZES: [usize; 4] = [4, 8, 12, 16];

fn group_moyal_convergence(ctx: &Ctx) -> Vec<CaseRow> {
    let reference = fref("moyal_eigen");
    let values: Vec<Quantity> = MOYAL_SIZES
        .par_iter()
        .map(|&n| {
            let t = match truncated_moyal_triple(n, 2.0) {
                Ok(t) => t,
                Err(e) => return Quantity::Failed(e.to_string()),
            };
            let mut e0 = vec![ZERO; n];
            e0[0] = ONE;
            let mut e1 = vec![ZERO; n];
            e1[1] = ONE;
            let a = State::pure(t.algebra(), 0, &e0).expect("unit vector");
            let b = State::pure(t.algebra(), 0, &e1).expect("unit vector");
            ctx.distance(&t, &a, &b)
        })
        .collect();
    let limit = moyal_eigenstate_distance(2.0, 0, 1).expect("theta");
    let err = |q: &Quantity| match q {
        Quantity::Value(v) => Quantity::Value((v - limit).abs()),
        other => other.clone(),
    };
    let mut rows = Vec::new();
    for (k, (&n, v)) in MOYAL_SIZES.iter().zip(&values).enumerate() {
        let check = if n == 16 { Check::Rel(0.02) } else { Check::Verdict };
        rows.push(CaseRow::new(ctx.id(format!("n{n:02}")), reference, Quantity::Value(limit), v.clone(), check));
        if k > 0 {
            rows.push(CaseRow::new(
                ctx.id(format!("n{n:02}/monotone")),
                "truncated Moyal: |d_N − d| non-increasing in N",
                err(&values[k - 1]),
                err(v),
                Check::AtMost(1e-6),
            ));
        }
    }
    rows
}

fn case_eigen_additivity(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = fref("moyal_eigen");
    let theta = uniform(rng, 0.1, 5.0);
    let m: u64 = rng.random_range(0..30);
    let k: u64 = rng.random_range(m..60);
    let n: u64 = rng.random_range(k..100);
    let d = |a, b| moyal_eigenstate_distance(theta, a, b);
    let id = format!("{i:04}");
    let (dmk, dkn, dmn) = (tri!(ctx, &id, reference, d(m, k)), tri!(ctx, &id, reference, d(k, n)), tri!(ctx, &id, reference, d(m, n)));
    let dmn1 = tri!(ctx, &id, reference, d(m, n + 1));
    // Σ_{j=m+1}^{n} 1/√(2j) between ∫_m^n and ∫_{m+1}^{n+1} of 1/√(2x)
    let sum: f64 = (m + 1..=n).map(|j| 1.0 / (2.0 * j as f64).sqrt()).sum();
    let integral = |a: f64, b: f64| SQRT_2 * (b.sqrt() - a.sqrt());
    vec![
        CaseRow::new(ctx.id(format!("{id}/additivity")), reference, Quantity::Value(dmn), Quantity::Value(dmk + dkn), Check::Rel(1e-14)),
        CaseRow::new(ctx.id(format!("{id}/monotone")), reference, Quantity::Value(dmn), Quantity::Value(dmn1), Check::AtLeast(0.0)),
        CaseRow::new(
            ctx.id(format!("{id}/riemann_upper")),
            "eigenstate sum bounded by the left integral",
            Quantity::Value(integral(m as f64, n as f64)),
            Quantity::Value(sum),
            Check::AtMost(1e-12),
        ),
        CaseRow::new(
            ctx.id(format!("{id}/riemann_lower")),
            "eigenstate sum bounded by the right integral",
            Quantity::Value(integral(m as f64 + 1.0, n as f64 + 1.0)),
            Quantity::Value(sum),
            Check::AtLeast(1e-12),
        ),
    ]
}

/// Dyadic value `j/64` in `[-4, 4)`: sums and differences stay exact.
fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-256i32..256) as f64 / 64.0
}

fn group_quantum_length(ctx: &Ctx) -> Vec<CaseRow> {
    let mut rng = ctx.rng(0);
    let mut rows = Vec::new();
    let sq = fref("quantum_sq_length");
    let ml = fref("modified_quantum_length");
    for i in 0..20 {
        let q = QuantumLengthParams {
            lambda_p: [0.5, 1.0, 2.0][i % 3],
            m: rng.random_range(0..10),
            n: rng.random_range(0..10),
            kappa: c(dyadic(&mut rng), dyadic(&mut rng)),
            kappa_tilde: c(dyadic(&mut rng), dyadic(&mut rng)),
        };
        let shift = c(dyadic(&mut rng), dyadic(&mut rng));
        let moved = QuantumLengthParams {
            kappa: q.kappa + shift,
            kappa_tilde: q.kappa_tilde + shift,
            ..q
        };
        rows.push(CaseRow::new(
            ctx.id(format!("translation/{i:04}")),
            sq,
            Quantity::of_value(quantum_sq_length(&q)),
            Quantity::of_value(quantum_sq_length(&moved)),
            Check::Abs(0.0),
        ));
    }
    rows.push(CaseRow::new(
        ctx.id("ground_pair"),
        sq,
        Quantity::Value(2.0),
        Quantity::of_value(quantum_sq_length(&QuantumLengthParams {
            lambda_p: 1.0,
            m: 0,
            n: 0,
            kappa: ZERO,
            kappa_tilde: ZERO,
        })),
        Check::Abs(0.0),
    ));
    for i in 0..20 {
        let lambda_p = uniform(&mut rng, 0.2, 3.0);
        let m = rng.random_range(0..50);
        let n = rng.random_range(0..50);
        let q = QuantumLengthParams {
            lambda_p,
            m,
            n,
            kappa: ZERO,
            kappa_tilde: ZERO,
        };
        rows.push(CaseRow::new(
            ctx.id(format!("eigenstates/{i:04}")),
            fref("eigenstate_modified_length"),
            Quantity::of_value(eigenstate_modified_length(lambda_p, m, n)),
            Quantity::of_value(modified_quantum_length(&q)),
            Check::Rel(1e-12),
        ));
    }
    rows.push(CaseRow::new(
        ctx.id("eigenstates/m0_n3"),
        fref("eigenstate_modified_length"),
        Quantity::Value(7f64.sqrt() - 1.0),
        Quantity::of_value(eigenstate_modified_length(1.0, 0, 3)),
        Check::Abs(0.0),
    ));
    // Pythagorean triples scaled by powers of two keep |Δκ| exact
    let triples = [(3.0, 4.0, 5.0), (5.0, 12.0, 13.0), (8.0, 15.0, 17.0), (7.0, 24.0, 25.0)];
    for i in 0..12 {
        let (a, b, h) = triples[i % 4];
        let s = 2f64.powi(-(rng.random_range(1..6)));
        let base = c(dyadic(&mut rng), dyadic(&mut rng));
        let q = QuantumLengthParams {
            lambda_p: 1.0,
            m: 0,
            n: 0,
            kappa: base,
            kappa_tilde: base + c(a * s, b * s),
        };
        rows.push(CaseRow::new(
            ctx.id(format!("coherent/{i:04}")),
            ml,
            Quantity::Value(h * s),
            Quantity::of_value(modified_quantum_length(&q)),
            Check::Abs(0.0),
        ));
    }
    let ns = [10u64, 20, 50, 100];
    let gaps: Vec<Quantity> = ns.iter().map(|&n| Quantity::of_value(eigenstate_relative_gap(1.0, 0, n))).collect();
    rows.push(CaseRow::new(
        ctx.id("relative_gap/n100"),
        "eigenstate modified length versus spectral distance: relative gap",
        Quantity::Value(0.01),
        gaps[3].clone(),
        Check::AtMost(0.0),
    ));
    for k in 1..ns.len() {
        rows.push(CaseRow::new(
            ctx.id(format!("relative_gap/monotone_n{:03}", ns[k])),
            "eigenstate modified length versus spectral distance: relative gap",
            gaps[k - 1].clone(),
            gaps[k].clone(),
            Check::AtMost(0.0),
        ));
    }
    rows
}

// ---- kantorovich ----

fn case_kantorovich(ctx: &Ctx, i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRow> {
    let reference = "Monge-Kantorovich: d_D ≤ W_D ≤ sampled upper bound";
    let id = format!("{i:04}");
    let two_point = i.is_multiple_of(2);
    // exactness on two points is checked at 1e-8, below the default certificate gap
    let tight = ctx.opts.solver.clone().with_rel_tolerance(ctx.opts.solver.rel_tolerance.min(1e-10));
    let opts = if two_point { &tight } else { &ctx.opts.solver };
    let t = if two_point {
        two_point_triple(uniform(rng, 0.3, 3.0) * random_phase(rng))
    } else {
        tri!(ctx, &id, reference, truncated_moyal_triple(2, uniform(rng, 0.5, 4.0)))
    };
    let count = if two_point { 1 } else { 24 };
    let pairs = tri!(ctx, &id, reference, sample_pure_pairs(&t, count, rng.random(), opts));
    let (a, b) = if two_point {
        two_point_states(uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0))
    } else {
        (bloch_state(random_bloch(false, rng)), bloch_state(random_bloch(i % 4 == 1, rng)))
    };
    let d = Quantity::of_result(DistanceSolver::new(&t, opts.clone()).and_then(|s| s.distance(&a, &b)).map(|r| r.outcome));
    let w = wasserstein_upper(&t, &a, &b, &pairs, None, opts).map(|k| k.upper);
    let w = Quantity::of_result(w);
    let mut rows = vec![CaseRow::new(ctx.id(format!("{id}/sandwich")), reference, d.clone(), w.clone(), Check::AtLeast(1e-6))];
    if two_point {
        rows.push(CaseRow::new(
            ctx.id(format!("{id}/two_point_exact")),
            "Monge-Kantorovich on two points: W_D = d_D",
            d,
            w,
            Check::Abs(1e-8),
        ));
    }
    // segment between two pure states, with the generating pair included
    let alg = t.algebra().clone();
    let (w1, w2) = if two_point {
        (State::point(&alg, 0).expect("point"), State::point(&alg, 1).expect("point"))
    } else {
        (State::random_pure(&alg, 0, rng), State::random_pure(&alg, 0, rng))
    };
    let (l, mu) = (uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0));
    let fl = tri!(ctx, &id, reference, mix_states(&w1, &w2, l));
    let fm = tri!(ctx, &id, reference, mix_states(&w1, &w2, mu));
    let base = Quantity::of_result(DistanceSolver::new(&t, opts.clone()).and_then(|s| s.distance(&w1, &w2)).map(|r| r.outcome));
    let expected = match base {
        Quantity::Value(v) => Quantity::Value((l - mu).abs() * v),
        other => other,
    };
    let got = Quantity::of_result(wasserstein_upper(&t, &fl, &fm, &pairs, Some((&w1, &w2)), opts).map(|k| k.upper));
    rows.push(CaseRow::new(
        ctx.id(format!("{id}/segment")),
        "Monge-Kantorovich: W_D(φ_λ, φ_μ) = |λ − μ| d_D(ω₁, ω₂)",
        expected,
        got,
        Check::Abs(1e-6),
    ));
    rows
}
