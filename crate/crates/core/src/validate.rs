//! Seeded cross-check suites: every library operation against an
//! independent brute-force or closed-form oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    approximant, cluster_set, distance_to_ideal_convergent, extract_limit_point,
    is_ideal_convergent, AnalysisError, Convergence,
};
use crate::ideal::{IdealModel, Verdict};
use crate::lab::{
    charge_of, choquet, choquet_riemann, decompose_difference, decomposition_uniqueness_probe,
    functional_of, lattice_inf, lattice_sup, norm_identity_check, representation_check,
    sl_diameter, sl_membership, value_range, FiniteCapacity, FiniteFunctional, GroundSet,
    LabError, Uniqueness, ALGEBRAIC_TOL, ENUMERATION_TOL,
};
use crate::seqset::{SequenceSpec, SetSpec};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_HORIZON: u64 = 1_000_000;
/// Membership tolerance used by the sequence suites.
pub const SUITE_TOLERANCE: f64 = 1e-2;
/// Grid spacing used by the cluster and convergence suites.
pub const SUITE_EPSILON: f64 = 0.1;
const RANDOM_CASES: usize = 1_000;
const RIEMANN_STEP: f64 = 1e-4;
const RIEMANN_TOL: f64 = 1e-3;
const DISTANCE_TOL: f64 = 1e-3;
const APPROXIMANT_SLACK: f64 = 1e-6;
const APPROXIMANTS: u32 = 10;
const EXTRACTION_STAGES: u32 = 20;
const MIN_EXTRACTION_STAGES: u32 = 5;
const MAX_FAILURES_KEPT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest observed deviation from the oracle, where one applies.
    pub max_error: f64,
    pub pass: bool,
    /// The first few failing cases.
    pub failed_cases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateReport {
    pub seed: u64,
    pub horizon: u64,
    pub tolerance: f64,
    pub epsilon: f64,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

struct Suite {
    name: &'static str,
    cases: usize,
    failures: usize,
    max_error: f64,
    failed_cases: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: 0,
            max_error: 0.0,
            failed_cases: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.failed_cases.len() < MAX_FAILURES_KEPT {
                self.failed_cases.push(describe());
            }
        }
    }

    fn error(&mut self, err: f64) {
        if err.is_nan() {
            self.max_error = f64::INFINITY;
        } else {
            self.max_error = self.max_error.max(err);
        }
    }

    fn fail(&mut self, describe: String) {
        self.check(false, || describe);
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            max_error: self.max_error,
            pass: self.failures == 0 && self.cases > 0,
            failed_cases: self.failed_cases,
        }
    }
}

/// Runs every suite. Randomized suites draw from a ChaCha8 stream seeded
/// with `seed`, one independent stream per suite.
pub fn run_all(seed: u64, horizon: u64) -> ValidateReport {
    let rng = |stream: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    };
    let suites = vec![
        choquet_riemann_suite(&mut rng(1)),
        choquet_additive_suite(&mut rng(2)),
        choquet_properties_suite(&mut rng(3)),
        norm_identity_suite(&mut rng(4)),
        duality_suite(&mut rng(5)),
        lattice_suite(&mut rng(6)),
        decomposition_suite(&mut rng(7)),
        diameter_suite(),
        value_range_suite(&mut rng(8)),
        representation_suite(&mut rng(9)),
        distance_suite(horizon),
        extraction_suite(horizon),
        convergence_suite(horizon),
    ];
    ValidateReport {
        seed,
        horizon,
        tolerance: SUITE_TOLERANCE,
        epsilon: SUITE_EPSILON,
        pass: suites.iter().all(|s| s.pass),
        suites,
    }
}

pub fn random_capacity(rng: &mut impl Rng, k: usize) -> FiniteCapacity {
    let mut values = vec![0.0f64; 1 << k];
    for mask in 1usize..1 << k {
        let floor = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| values[mask & !(1 << i)])
            .fold(0.0, f64::max);
        values[mask] = floor + rng.gen_range(0.0..0.5);
    }
    let total = values[(1 << k) - 1];
    for v in &mut values {
        *v /= total;
    }
    FiniteCapacity::new(k, values).expect("monotone by construction")
}

fn random_vector(rng: &mut impl Rng, k: usize, half_width: f64) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

/// A null mask leaving at least one support coordinate.
fn random_ground(rng: &mut impl Rng, k: usize) -> GroundSet {
    loop {
        let mask = rng.gen_range(0u32..1 << k);
        if let Ok(g) = GroundSet::from_mask(k, mask) {
            return g;
        }
    }
}

fn random_sl_member(rng: &mut impl Rng, ground: &GroundSet) -> FiniteFunctional {
    let mut w = vec![0.0; ground.size()];
    for i in ground.support() {
        w[i] = rng.gen_range(0.0..1.0);
    }
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        w[ground.support()[0]] = 1.0;
        return FiniteFunctional::new(w);
    }
    FiniteFunctional::new(w.into_iter().map(|v| v / total).collect())
}

/// Direct dot product in index order.
fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn lab_err(e: LabError) -> String {
    e.to_string()
}

fn choquet_riemann_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("choquet-riemann");
    for case in 0..RANDOM_CASES {
        let k = rng.gen_range(1..=8);
        let nu = random_capacity(rng, k);
        let x = random_vector(rng, k, 2.0);
        match (choquet(&x, &nu), choquet_riemann(&x, &nu, RIEMANN_STEP)) {
            (Ok(a), Ok(b)) => {
                let err = (a - b).abs();
                s.error(err);
                s.check(err <= RIEMANN_TOL, || format!("case {case}: |{a} - {b}| = {err}"));
            }
            (a, b) => s.fail(format!("case {case}: {a:?} / {b:?}")),
        }
    }
    s.finish()
}

fn choquet_additive_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("choquet-additive");
    for case in 0..RANDOM_CASES {
        let k = rng.gen_range(1..=8);
        let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let x = random_vector(rng, k, 2.0);
        match FiniteCapacity::additive(&w).and_then(|nu| choquet(&x, &nu)) {
            Ok(c) => {
                let err = (c - dot(&w, &x)).abs();
                s.error(err);
                s.check(err <= ALGEBRAIC_TOL, || format!("case {case}: error {err}"));
            }
            Err(e) => s.fail(format!("case {case}: {}", lab_err(e))),
        }
    }
    s.finish()
}

fn choquet_properties_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("choquet-properties");
    for case in 0..RANDOM_CASES {
        let k = rng.gen_range(1..=8);
        let nu = random_capacity(rng, k);
        let x = random_vector(rng, k, 2.0);
        let y: Vec<f64> = x.iter().map(|v| v + rng.gen_range(0.0..1.0)).collect();
        let a = rng.gen_range(0.0..3.0);
        let c = rng.gen_range(-2.0..2.0);
        let ax: Vec<f64> = x.iter().map(|v| a * v).collect();
        let xc: Vec<f64> = x.iter().map(|v| v + c).collect();
        let run = || -> Result<(f64, f64, f64, f64), LabError> {
            Ok((choquet(&x, &nu)?, choquet(&y, &nu)?, choquet(&ax, &nu)?, choquet(&xc, &nu)?))
        };
        match run() {
            Ok((cx, cy, cax, cxc)) => {
                let scale = 1.0 + cx.abs();
                let homogeneity = (cax - a * cx).abs() / scale;
                let translation = (cxc - cx - c * nu.total()).abs() / scale;
                s.error(homogeneity.max(translation));
                s.check(cx <= cy + ALGEBRAIC_TOL, || format!("case {case}: monotonicity {cx} > {cy}"));
                s.check(homogeneity <= 1e-12, || format!("case {case}: homogeneity error {homogeneity}"));
                s.check(translation <= 1e-12, || format!("case {case}: translation error {translation}"));
            }
            Err(e) => s.fail(format!("case {case}: {}", lab_err(e))),
        }
    }
    s.finish()
}

fn zero_sum_functional(rng: &mut ChaCha8Rng, k: usize) -> FiniteFunctional {
    let w = random_vector(rng, k, 1.0);
    let mean = w.iter().sum::<f64>() / k as f64;
    FiniteFunctional::new(w.into_iter().map(|v| v - mean).collect())
}

fn norm_identity_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("norm-identity");
    for case in 0..RANDOM_CASES {
        let k = rng.gen_range(2..=12);
        let f = zero_sum_functional(rng, k);
        match norm_identity_check(&f) {
            Ok(r) => {
                let err = (r.lhs - r.rhs).abs();
                s.error(err);
                s.check(r.pass && err <= ENUMERATION_TOL, || {
                    format!("case {case}: ‖f‖ = {} vs 2 sup = {}", r.lhs, r.rhs)
                });
            }
            Err(e) => s.fail(format!("case {case}: {}", lab_err(e))),
        }
    }
    s.finish()
}

fn duality_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("duality");
    for case in 0..RANDOM_CASES {
        let k = rng.gen_range(1..=8);
        let f = FiniteFunctional::new(random_vector(rng, k, 2.0));
        let mu = charge_of(&f);
        s.check(functional_of(&mu) == f, || format!("case {case}: round trip changed f"));
        let worst = (0u32..1 << k)
            .map(|a| (mu.measure(a) - f.on_indicator(a)).abs())
            .fold(0.0, f64::max);
        s.error(worst);
        s.check(worst <= ALGEBRAIC_TOL, || format!("case {case}: T(f)(A) off by {worst}"));
    }
    s.finish()
}

/// `sup`/`inf` over splits `1_A = 1_B + 1_{A∖B}` of `f(1_B) + g(1_{A∖B})`.
fn split_extremes(f: &FiniteFunctional, g: &FiniteFunctional, a: u32) -> (f64, f64) {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    let mut b = a;
    loop {
        let v = f.on_indicator(b) + g.on_indicator(a & !b);
        hi = hi.max(v);
        lo = lo.min(v);
        if b == 0 {
            return (hi, lo);
        }
        b = (b - 1) & a;
    }
}

fn lattice_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("lattice-split-enumeration");
    for case in 0..100 {
        let k = rng.gen_range(1..=10);
        let f = FiniteFunctional::new(random_vector(rng, k, 1.0));
        let g = FiniteFunctional::new(random_vector(rng, k, 1.0));
        let (sup, inf) = match (lattice_sup(&f, &g), lattice_inf(&f, &g)) {
            (Ok(a), Ok(b)) => (a, b),
            (a, b) => {
                s.fail(format!("case {case}: {a:?} / {b:?}"));
                continue;
            }
        };
        let mut worst = 0.0f64;
        for a in 0u32..1 << k {
            let (hi, lo) = split_extremes(&f, &g, a);
            worst = worst
                .max((sup.on_indicator(a) - hi).abs())
                .max((inf.on_indicator(a) - lo).abs());
        }
        s.error(worst);
        s.check(worst <= ENUMERATION_TOL, || format!("case {case}: k = {k}, off by {worst}"));
    }
    s.finish()
}

/// A random `f` satisfying `f(e) = 0`, `‖f‖ ≤ 2`, and `f = 0` on the null
/// part. A quarter of the draws sit exactly on `‖f‖ = 2`.
pub fn random_decomposable(rng: &mut impl Rng, ground: &GroundSet) -> FiniteFunctional {
    let support = ground.support();
    let mut w = vec![0.0; ground.size()];
    if support.len() < 2 {
        return FiniteFunctional::new(w);
    }
    let target = if rng.gen_bool(0.25) {
        2.0
    } else {
        2.0 * rng.gen_range(0.0..0.999)
    };
    for &i in &support {
        w[i] = rng.gen_range(-1.0..1.0);
    }
    let mean = support.iter().map(|&i| w[i]).sum::<f64>() / support.len() as f64;
    for &i in &support {
        w[i] -= mean;
    }
    let norm: f64 = w.iter().map(|v| v.abs()).sum();
    if norm == 0.0 {
        return FiniteFunctional::new(w);
    }
    FiniteFunctional::new(w.into_iter().map(|v| v * target / norm).collect())
}

fn decomposition_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("difference-decomposition");
    for case in 0..RANDOM_CASES {
        let k = rng.gen_range(2..=8);
        let ground = random_ground(rng, k);
        let f = random_decomposable(rng, &ground);
        let d = match decompose_difference(&f, &ground, None) {
            Ok(d) => d,
            Err(e) => {
                s.fail(format!("case {case}: {}", lab_err(e)));
                continue;
            }
        };
        let err = d.g.sub(&d.h).max_abs_diff(&f);
        s.error(err);
        s.check(
            sl_membership(&d.g, &ground) && sl_membership(&d.h, &ground) && err <= ALGEBRAIC_TOL,
            || format!("case {case}: g or h outside SL, or g - h off by {err}"),
        );
        let rigid = (f.norm() - 2.0).abs() <= ENUMERATION_TOL;
        let expect_unique = rigid || ground.support().len() == 1;
        match decomposition_uniqueness_probe(&f, &ground) {
            Ok(Uniqueness::Unique {
                decomposition,
                disjoint,
            }) => {
                s.check(expect_unique, || format!("case {case}: Unique with ‖f‖ = {}", f.norm()));
                if rigid {
                    s.check(
                        disjoint
                            && decomposition.g == f.positive_part()
                            && decomposition.h == f.negative_part(),
                        || format!("case {case}: ‖f‖ = 2 but (g, h) ≠ (f⁺, f⁻)"),
                    );
                }
            }
            Ok(Uniqueness::Multiple { first, second, .. }) => {
                s.check(!expect_unique, || format!("case {case}: Multiple with ‖f‖ = {}", f.norm()));
                let gap = first.g.max_abs_diff(&second.g);
                s.check(gap >= 1e-6, || format!("case {case}: witnesses differ by only {gap}"));
            }
            Err(e) => s.fail(format!("case {case}: {}", lab_err(e))),
        }
    }
    s.finish()
}

fn diameter_suite() -> SuiteReport {
    let mut s = Suite::new("diameter-dichotomy");
    for k in 2..=8usize {
        for mask in 0u32..(1 << k) - 1 {
            let ground = GroundSet::from_mask(k, mask).expect("proper null part");
            let expected = if ground.support().len() >= 2 { 2.0 } else { 0.0 };
            let d = sl_diameter(&ground);
            s.check(d == expected, || format!("k = {k}, Z0 = {mask:#b}: diameter {d}"));
        }
    }
    s.finish()
}

fn value_range_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("value-range");
    for case in 0..100 {
        let k = rng.gen_range(2..=8);
        let ground = random_ground(rng, k);
        let x = random_vector(rng, k, 5.0);
        let r = match value_range(&x, &ground) {
            Ok(r) => r,
            Err(e) => {
                s.fail(format!("case {case}: {}", lab_err(e)));
                continue;
            }
        };
        let support = ground.support();
        let lo = support.iter().map(|&i| x[i]).fold(f64::INFINITY, f64::min);
        let hi = support.iter().map(|&i| x[i]).fold(f64::NEG_INFINITY, f64::max);
        let at = |i: usize| FiniteFunctional::point_evaluation(k, i).apply(&x).ok();
        s.check(
            r.lo == lo && r.hi == hi && at(r.argmin) == Some(lo) && at(r.argmax) == Some(hi),
            || format!("case {case}: endpoints [{}, {}] vs oracle [{lo}, {hi}]", r.lo, r.hi),
        );
        for _ in 0..100 {
            let f = random_sl_member(rng, &ground);
            let v = dot(&f.weights, &x);
            let excess = (lo - v).max(v - hi).max(0.0);
            s.error(excess);
            s.check(excess <= ALGEBRAIC_TOL, || format!("case {case}: f(x) = {v} outside [{lo}, {hi}]"));
        }
    }
    s.finish()
}

fn representation_suite(rng: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = Suite::new("representation");
    for case in 0..RANDOM_CASES {
        let k = rng.gen_range(2..=8);
        let ground = random_ground(rng, k);
        let f = random_sl_member(rng, &ground);
        let x = random_vector(rng, k, 3.0);
        match representation_check(&f, &x, &ground) {
            Ok(r) => {
                let err = (r.choquet_avg - dot(&f.weights, &x)).abs();
                s.error(err);
                s.check(r.pass && err <= ALGEBRAIC_TOL, || format!("case {case}: off by {err}"));
            }
            Err(e) => s.fail(format!("case {case}: {}", lab_err(e))),
        }
    }
    s.finish()
}

struct CorpusEntry {
    label: &'static str,
    sequence: SequenceSpec,
    ideal: IdealModel,
}

fn entry(label: &'static str, sequence: SequenceSpec, ideal: IdealModel) -> CorpusEntry {
    CorpusEntry {
        label,
        sequence,
        ideal,
    }
}

fn evens() -> SequenceSpec {
    SequenceSpec::indicator(&SetSpec::evens())
}

fn squares() -> SequenceSpec {
    SequenceSpec::indicator(&SetSpec::squares())
}

fn periodic012() -> SequenceSpec {
    SequenceSpec::periodic([0.0, 1.0, 2.0]).expect("finite values")
}

fn distance_suite(horizon: u64) -> SuiteReport {
    let mut s = Suite::new("distance-formula");
    let corpus = [
        (entry("evens/density", evens(), IdealModel::density()), 0.5),
        (entry("periodic(0,1,2)/density", periodic012(), IdealModel::density()), 1.0),
        (entry("alternating-decay/fin", SequenceSpec::alternating_decay(), IdealModel::fin()), 1.0),
        (entry("squares/density", squares(), IdealModel::density()), 0.0),
    ];
    for (e, expected) in &corpus {
        let mut run = || -> Result<(), AnalysisError> {
            let d = distance_to_ideal_convergent(&e.sequence, &e.ideal, horizon, SUITE_TOLERANCE)?;
            let got = d.distance.point();
            let err = got.map_or(f64::INFINITY, |v| (v - expected).abs());
            s.error(err);
            s.check(err <= DISTANCE_TOL, || format!("{}: distance {got:?}, expected {expected}", e.label));
            if got.is_none() {
                return Ok(());
            }
            for k in 1..=APPROXIMANTS {
                let a = approximant(&e.sequence, &e.ideal, k, &d, horizon, SUITE_TOLERANCE)?;
                s.check(
                    a.achieved <= a.envelope + APPROXIMANT_SLACK && a.evidence.verdict == Verdict::In,
                    || format!("{} k = {k}: achieved {} vs {}, A_k {:?}", e.label, a.achieved, a.envelope, a.evidence.verdict),
                );
            }
            Ok(())
        };
        if let Err(err) = run() {
            s.fail(format!("{}: {err}", e.label));
        }
    }
    s.finish()
}

fn extraction_suite(horizon: u64) -> SuiteReport {
    let mut s = Suite::new("f-sigma-extraction");
    let fin = IdealModel::fin;
    let harmonic = IdealModel::summable_harmonic;
    let alt = SequenceSpec::alternating_decay;
    let clusters: Vec<(CorpusEntry, Vec<f64>, Vec<f64>)> = vec![
        (entry("evens/fin", evens(), fin()), vec![0.0, 1.0], vec![0.5]),
        (entry("periodic(0,1,2)/fin", periodic012(), fin()), vec![0.0, 1.0, 2.0], vec![0.5]),
        (entry("alternating-decay/fin", alt(), fin()), vec![-1.0, 1.0], vec![0.0]),
        (entry("squares/fin", squares(), fin()), vec![0.0, 1.0], vec![0.5]),
        (entry("evens/summable", evens(), harmonic()), vec![0.0, 1.0], vec![0.5]),
        (entry("periodic(0,1,2)/summable", periodic012(), harmonic()), vec![0.0, 1.0, 2.0], vec![1.5]),
        (entry("alternating-decay/summable", alt(), harmonic()), vec![-1.0, 1.0], vec![0.0]),
        (entry("squares/summable", squares(), harmonic()), vec![0.0], vec![1.0]),
    ];
    for (e, cluster_points, strays) in &clusters {
        for &eta in cluster_points {
            match extract_limit_point(&e.sequence, &e.ideal, eta, horizon, EXTRACTION_STAGES) {
                Ok(r) => {
                    let growth = r.stages.iter().all(|st| {
                        st.cumulative_mass / e.ideal.stage_level(1).unwrap_or(1.0) > f64::from(st.k)
                    });
                    s.check(
                        r.completed_stages >= MIN_EXTRACTION_STAGES && r.certified() && growth,
                        || format!("{} η = {eta}: {} stages, certified {}", e.label, r.completed_stages, r.certified()),
                    );
                }
                Err(err) => s.fail(format!("{} η = {eta}: {err}", e.label)),
            }
        }
        for &eta in strays {
            match extract_limit_point(&e.sequence, &e.ideal, eta, horizon, EXTRACTION_STAGES) {
                Ok(r) => s.check(r.stall.is_some_and(|k| k <= 3), || {
                    format!("{} stray η = {eta}: stall {:?}", e.label, r.stall)
                }),
                Err(err) => s.fail(format!("{} stray η = {eta}: {err}", e.label)),
            }
        }
    }
    match extract_limit_point(&evens(), &IdealModel::density(), 1.0, horizon, 1) {
        Err(AnalysisError::Ideal(_)) => s.check(true, String::new),
        other => s.fail(format!("density extraction was not rejected: {other:?}")),
    }
    s.finish()
}

fn convergence_suite(horizon: u64) -> SuiteReport {
    let mut s = Suite::new("convergence-diagnostic");
    let corpus = [
        (entry("evens/density", evens(), IdealModel::density()), false),
        (entry("periodic(0,1,2)/density", periodic012(), IdealModel::density()), false),
        (entry("alternating-decay/fin", SequenceSpec::alternating_decay(), IdealModel::fin()), false),
        (entry("squares/density", squares(), IdealModel::density()), true),
        (entry("squares/fin", squares(), IdealModel::fin()), false),
        (entry("harmonic(1)/fin", SequenceSpec::harmonic(1.0).expect("finite"), IdealModel::fin()), true),
        (entry("constant(0.25)/fin", SequenceSpec::constant(0.25).expect("finite"), IdealModel::fin()), true),
    ];
    for (e, single) in &corpus {
        let mut run = || -> Result<(), String> {
            let r = is_ideal_convergent(&e.sequence, &e.ideal, horizon, SUITE_EPSILON, SUITE_TOLERANCE)
                .map_err(|err| err.to_string())?;
            let yes = matches!(r.convergence, Convergence::Yes { .. });
            s.check(yes == *single, || format!("{}: {:?}", e.label, r.convergence));
            let spread = finite_stage_spread(&r.clusters.candidates, e.sequence.eval(0))?;
            s.check((spread == 0.0) == yes, || format!("{}: finite-stage value range width {spread}", e.label));
            Ok(())
        };
        if let Err(err) = run() {
            s.fail(format!("{}: {err}", e.label));
        }
    }
    let c = cluster_set(&evens(), &IdealModel::fin(), horizon, SUITE_EPSILON, SUITE_TOLERANCE);
    match c {
        Ok(c) => {
            let near = c.candidates.len() == 2
                && (c.candidates[0] - 0.0).abs() <= SUITE_EPSILON
                && (c.candidates[1] - 1.0).abs() <= SUITE_EPSILON;
            s.check(near, || format!("evens/fin clusters {:?}", c.candidates))
        }
        Err(err) => s.fail(format!("evens/fin clusters: {err}")),
    }
    s.finish()
}

/// Width of `{f(x) : f ∈ SL}` on the finite stage whose support points are
/// the cluster candidates and whose one null point carries `stray`.
pub fn finite_stage_spread(candidates: &[f64], stray: f64) -> Result<f64, String> {
    if candidates.is_empty() || candidates.len() >= crate::lab::MAX_GROUND_SIZE {
        return Err(format!("{} candidates do not fit a finite stage", candidates.len()));
    }
    let mut x = candidates.to_vec();
    x.push(stray);
    let ground = GroundSet::new(x.len(), &[candidates.len()]).map_err(lab_err)?;
    let r = value_range(&x, &ground).map_err(lab_err)?;
    Ok(r.hi - r.lo)
}
