//! Finite-dimensional functional lab.
//!
//! A ground set `{0..k-1}` with a null part `Z0` stands in for `(ω, I)`:
//! the ideal is `{A : A ⊆ Z0}` and point evaluations at the coordinates
//! outside `Z0` play the role of ultrafilter limits. Everything here is
//! small enough (`k ≤ 16`) to be checked against subset enumeration.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

pub const MAX_GROUND_SIZE: usize = 16;
/// Absolute tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Absolute tolerance for suprema computed by enumeration.
pub const ENUMERATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("ground set size must lie in 2..={MAX_GROUND_SIZE}, got {0}")]
    GroundSize(usize),
    #[error("null index {index} outside ground set of size {size}")]
    NullOutOfRange { index: usize, size: usize },
    #[error("null part covers the whole ground set")]
    NullCoversAll,
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("capacity of the empty set must be 0, got {0}")]
    NonzeroEmpty(f64),
    #[error("capacity is not monotone: ν({subset:#b}) = {lower} > ν({superset:#b}) = {upper}")]
    NotMonotone {
        subset: u32,
        superset: u32,
        lower: f64,
        upper: f64,
    },
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("capacity table is missing subset {0:#b}")]
    MissingSubset(u32),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("decomposition conditions violated: {0:?}")]
    ConditionViolation(Vec<Condition>),
    #[error("{0} is not a member of SL")]
    NotInSl(&'static str),
    #[error("scale {scale} is below ‖f‖/2 = {half_norm}")]
    ScaleTooSmall { scale: f64, half_norm: f64 },
    #[error("Riemann step must be positive and finite, got {0}")]
    BadStep(f64),
}

/// `{0..size-1}` with a null part `Z0`, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroundSet {
    size: usize,
    null_mask: u32,
}

impl GroundSet {
    pub fn new(size: usize, null: &[usize]) -> Result<Self, LabError> {
        if !(2..=MAX_GROUND_SIZE).contains(&size) {
            return Err(LabError::GroundSize(size));
        }
        let mut null_mask = 0u32;
        for &i in null {
            if i >= size {
                return Err(LabError::NullOutOfRange { index: i, size });
            }
            null_mask |= 1 << i;
        }
        Self::from_mask(size, null_mask)
    }

    pub fn from_mask(size: usize, null_mask: u32) -> Result<Self, LabError> {
        if !(2..=MAX_GROUND_SIZE).contains(&size) {
            return Err(LabError::GroundSize(size));
        }
        let full = full_mask(size);
        if null_mask & !full != 0 {
            return Err(LabError::NullOutOfRange {
                index: (32 - null_mask.leading_zeros() - 1) as usize,
                size,
            });
        }
        if null_mask == full {
            return Err(LabError::NullCoversAll);
        }
        Ok(Self { size, null_mask })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn null_mask(&self) -> u32 {
        self.null_mask
    }

    pub fn is_null(&self, i: usize) -> bool {
        self.null_mask >> i & 1 == 1
    }

    /// `F = {0..k-1} ∖ Z0`, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.size).filter(|&i| !self.is_null(i)).collect()
    }

    /// Finite analogue of a maximal ideal: a single non-null coordinate.
    pub fn is_maximal(&self) -> bool {
        self.support().len() == 1
    }
}

fn full_mask(size: usize) -> u32 {
    if size >= 32 {
        u32::MAX
    } else {
        (1u32 << size) - 1
    }
}

/// Monotone set function with `ν(∅) = 0`, stored on all `2^k` subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCapacity {
    size: usize,
    values: Vec<f64>,
}

impl FiniteCapacity {
    /// Values indexed by subset bitmask.
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self, LabError> {
        if size == 0 || size > MAX_GROUND_SIZE {
            return Err(LabError::GroundSize(size));
        }
        let expected = 1usize << size;
        if values.len() != expected {
            return Err(LabError::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(LabError::NonFinite(v));
        }
        if values[0] != 0.0 {
            return Err(LabError::NonzeroEmpty(values[0]));
        }
        for mask in 0..expected as u32 {
            for i in 0..size {
                let sup = mask | 1 << i;
                if sup != mask && values[mask as usize] > values[sup as usize] {
                    return Err(LabError::NotMonotone {
                        subset: mask,
                        superset: sup,
                        lower: values[mask as usize],
                        upper: values[sup as usize],
                    });
                }
            }
        }
        Ok(Self { size, values })
    }

    /// Build from a `{bitmask: value}` table that lists every subset.
    pub fn from_table(size: usize, table: &BTreeMap<u32, f64>) -> Result<Self, LabError> {
        if size == 0 || size > MAX_GROUND_SIZE {
            return Err(LabError::GroundSize(size));
        }
        let values = (0..1u32 << size)
            .map(|m| table.get(&m).copied().ok_or(LabError::MissingSubset(m)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(size, values)
    }

    /// `A ↦ Σ_{i∈A} w_i` for nonnegative atom weights.
    pub fn additive(weights: &[f64]) -> Result<Self, LabError> {
        let size = weights.len();
        let values = subset_sums(weights);
        Self::new(size, values)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn value(&self, mask: u32) -> f64 {
        self.values[mask as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `ν(S)`.
    pub fn total(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn is_normalized(&self) -> bool {
        (self.total() - 1.0).abs() <= ALGEBRAIC_TOL
    }

    /// Additive up to [`ALGEBRAIC_TOL`]: `ν(A) = Σ_{i∈A} ν({i})`.
    pub fn is_additive(&self) -> bool {
        let atoms: Vec<f64> = (0..self.size).map(|i| self.value(1 << i)).collect();
        subset_sums(&atoms)
            .iter()
            .zip(&self.values)
            .all(|(a, b)| (a - b).abs() <= ALGEBRAIC_TOL)
    }
}

impl Serialize for FiniteCapacity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.values.len()))?;
        for (mask, v) in self.values.iter().enumerate() {
            map.serialize_entry(&mask.to_string(), v)?;
        }
        map.end()
    }
}

/// `sums[mask] = Σ_{i ∈ mask} w_i`, each built from `mask` minus its lowest bit.
fn subset_sums(weights: &[f64]) -> Vec<f64> {
    let n = 1usize << weights.len();
    let mut sums = vec![0.0; n];
    for mask in 1..n {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + weights[low];
    }
    sums
}

/// Atom weights of a finitely additive signed set function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteCharge {
    pub weights: Vec<f64>,
}

impl FiniteCharge {
    pub fn measure(&self, mask: u32) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }
}

/// `f(x) = Σ w_i x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteFunctional {
    pub weights: Vec<f64>,
}

impl FiniteFunctional {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn zero(size: usize) -> Self {
        Self::new(vec![0.0; size])
    }

    /// Point evaluation `x ↦ x_i`.
    pub fn point_evaluation(size: usize, i: usize) -> Self {
        let mut w = vec![0.0; size];
        w[i] = 1.0;
        Self::new(w)
    }

    /// Uniform distribution on the support of `ground`.
    pub fn uniform_on_support(ground: &GroundSet) -> Self {
        let support = ground.support();
        let share = 1.0 / support.len() as f64;
        let mut w = vec![0.0; ground.size()];
        for i in support {
            w[i] = share;
        }
        Self::new(w)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Result<f64, LabError> {
        check_len(self.len(), x.len())?;
        Ok(self.weights.iter().zip(x).map(|(w, v)| w * v).sum())
    }

    /// `f(1_A)` for the subset encoded by `mask`.
    pub fn on_indicator(&self, mask: u32) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    /// Dual norm `Σ |w_i|`.
    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// `f(e)`.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn positive_part(&self) -> Self {
        Self::new(self.weights.iter().map(|w| w.max(0.0)).collect())
    }

    pub fn negative_part(&self) -> Self {
        Self::new(self.weights.iter().map(|w| (-w).max(0.0)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.weights.iter().map(|w| c * w).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `max_i |w_i - v_i|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), LabError> {
    if expected == got {
        Ok(())
    } else {
        Err(LabError::DimensionMismatch { expected, got })
    }
}

/// Choquet integral by telescoping over the decreasing rearrangement:
/// `x_(k) ν(S) + Σ_{i<k} (x_(i) − x_(i+1)) ν({x ≥ x_(i)})`.
pub fn choquet(x: &[f64], nu: &FiniteCapacity) -> Result<f64, LabError> {
    check_len(nu.size(), x.len())?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let last = x[order[order.len() - 1]];
    let mut total = last * nu.total();
    let mut mask = 0u32;
    for w in order.windows(2) {
        mask |= 1 << w[0];
        total += (x[w[0]] - x[w[1]]) * nu.value(mask);
    }
    Ok(total)
}

/// Left Riemann sums of `t ↦ ν(x ≥ t)` on `[0, max x]` and of
/// `t ↦ ν(x ≥ t) − ν(S)` on `[min x ∧ 0, 0]`.
pub fn choquet_riemann(x: &[f64], nu: &FiniteCapacity, step: f64) -> Result<f64, LabError> {
    check_len(nu.size(), x.len())?;
    if !(step.is_finite() && step > 0.0) {
        return Err(LabError::BadStep(step));
    }
    let superlevel = |t: f64| -> f64 {
        let mask = x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= t)
            .fold(0u32, |m, (i, _)| m | 1 << i);
        nu.value(mask)
    };
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let mut total = 0.0;
    if max > 0.0 {
        let steps = (max / step).ceil() as u64;
        for j in 0..steps {
            let t = j as f64 * step;
            total += (max - t).min(step) * superlevel(t);
        }
    }
    if min < 0.0 {
        let whole = nu.total();
        let steps = (-min / step).ceil() as u64;
        for j in 0..steps {
            let t = min + j as f64 * step;
            total += (-t).min(step) * (superlevel(t) - whole);
        }
    }
    Ok(total)
}

/// `T(f)(A) = f(1_A)`.
pub fn charge_of(f: &FiniteFunctional) -> FiniteCharge {
    FiniteCharge {
        weights: f.weights.clone(),
    }
}

/// `x ↦ ∫ x dμ`.
pub fn functional_of(mu: &FiniteCharge) -> FiniteFunctional {
    FiniteFunctional::new(mu.weights.clone())
}

/// `f ∨ g`: atom-wise maximum of the weights.
pub fn lattice_sup(f: &FiniteFunctional, g: &FiniteFunctional) -> Result<FiniteFunctional, LabError> {
    check_len(f.len(), g.len())?;
    Ok(FiniteFunctional::new(
        f.weights.iter().zip(&g.weights).map(|(a, b)| a.max(*b)).collect(),
    ))
}

/// `f ∧ g`: atom-wise minimum of the weights.
pub fn lattice_inf(f: &FiniteFunctional, g: &FiniteFunctional) -> Result<FiniteFunctional, LabError> {
    check_len(f.len(), g.len())?;
    Ok(FiniteFunctional::new(
        f.weights.iter().zip(&g.weights).map(|(a, b)| a.min(*b)).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormIdentity {
    /// `‖f‖ = Σ |w_i|`.
    pub lhs: f64,
    /// `2 max_A f(1_A)`.
    pub rhs: f64,
    pub pass: bool,
}

/// `‖f‖ = 2 sup{f(1_A)}` for `f(e) = 0`, by enumerating all subsets.
pub fn norm_identity_check(f: &FiniteFunctional) -> Result<NormIdentity, LabError> {
    if f.len() > MAX_GROUND_SIZE {
        return Err(LabError::GroundSize(f.len()));
    }
    let total = f.total();
    if total.abs() > ALGEBRAIC_TOL {
        return Err(LabError::Precondition(format!(
            "norm identity needs f(e) = 0, got {total}"
        )));
    }
    let lhs = f.norm();
    let best = subset_sums(&f.weights)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let rhs = 2.0 * best;
    Ok(NormIdentity {
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= ENUMERATION_TOL,
    })
}

/// Nonnegative, normalized, and zero on the null part.
pub fn sl_membership(f: &FiniteFunctional, ground: &GroundSet) -> bool {
    f.len() == ground.size()
        && f.weights.iter().all(|&w| w >= -ALGEBRAIC_TOL)
        && (f.total() - 1.0).abs() <= ALGEBRAIC_TOL
        && f
            .weights
            .iter()
            .enumerate()
            .all(|(i, &w)| !ground.is_null(i) || w.abs() <= ALGEBRAIC_TOL)
}

/// Extreme points of SL: point evaluations on the support.
pub fn sl_vertices(ground: &GroundSet) -> Vec<FiniteFunctional> {
    ground
        .support()
        .into_iter()
        .map(|i| FiniteFunctional::point_evaluation(ground.size(), i))
        .collect()
}

/// Convex coefficients of an SL member over [`sl_vertices`] (the weights
/// on the support themselves).
pub fn vertex_coefficients(f: &FiniteFunctional, ground: &GroundSet) -> Option<Vec<f64>> {
    sl_membership(f, ground).then(|| ground.support().iter().map(|&i| f.weights[i]).collect())
}

/// `max ‖f − g‖` over pairs of vertices.
pub fn sl_diameter(ground: &GroundSet) -> f64 {
    let vertices = sl_vertices(ground);
    let mut best = 0.0f64;
    for (a, f) in vertices.iter().enumerate() {
        for g in &vertices[a + 1..] {
            best = best.max(f.sub(g).norm());
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// (a) `f(e) = 0`.
    ZeroTotal,
    /// (b) `‖f‖ ≤ 2`.
    NormAtMostTwo,
    /// (c) `f(1_A) = 0` for every null `A`.
    VanishesOnNull,
}

fn violated_conditions(f: &FiniteFunctional, ground: &GroundSet, check_norm: bool) -> Vec<Condition> {
    let mut failed = Vec::new();
    if f.total().abs() > ALGEBRAIC_TOL {
        failed.push(Condition::ZeroTotal);
    }
    if check_norm && f.norm() > 2.0 + ALGEBRAIC_TOL {
        failed.push(Condition::NormAtMostTwo);
    }
    if f
        .weights
        .iter()
        .enumerate()
        .any(|(i, &w)| ground.is_null(i) && w.abs() > ALGEBRAIC_TOL)
    {
        failed.push(Condition::VanishesOnNull);
    }
    failed
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub g: FiniteFunctional,
    pub h: FiniteFunctional,
}

/// `f = g − h` with `g = f⁺ + (1 − ‖f‖/2) f0` and `h = f⁻ + (1 − ‖f‖/2) f0`.
///
/// `f0` defaults to the uniform distribution on the support.
pub fn decompose_difference(
    f: &FiniteFunctional,
    ground: &GroundSet,
    f0: Option<&FiniteFunctional>,
) -> Result<Decomposition, LabError> {
    check_len(ground.size(), f.len())?;
    let failed = violated_conditions(f, ground, true);
    if !failed.is_empty() {
        return Err(LabError::ConditionViolation(failed));
    }
    let default;
    let f0 = match f0 {
        Some(f0) => f0,
        None => {
            default = FiniteFunctional::uniform_on_support(ground);
            &default
        }
    };
    if !sl_membership(f0, ground) {
        return Err(LabError::NotInSl("f0"));
    }
    let slack = (1.0 - f.norm() / 2.0).max(0.0);
    let filler = f0.scaled(slack);
    Ok(Decomposition {
        g: f.positive_part().add(&filler),
        h: f.negative_part().add(&filler),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Uniqueness {
    Unique {
        decomposition: Decomposition,
        /// `g ∧ h = 0`; certified whenever `‖f‖ = 2`.
        disjoint: bool,
    },
    Multiple {
        first: Decomposition,
        second: Decomposition,
        vertices: (usize, usize),
    },
}

/// Unique exactly when `‖f‖ = 2` or the ground set is maximal.
pub fn decomposition_uniqueness_probe(
    f: &FiniteFunctional,
    ground: &GroundSet,
) -> Result<Uniqueness, LabError> {
    check_len(ground.size(), f.len())?;
    let failed = violated_conditions(f, ground, true);
    if !failed.is_empty() {
        return Err(LabError::ConditionViolation(failed));
    }
    let support = ground.support();
    if (f.norm() - 2.0).abs() <= ENUMERATION_TOL {
        let decomposition = Decomposition {
            g: f.positive_part(),
            h: f.negative_part(),
        };
        let meet = lattice_inf(&decomposition.g, &decomposition.h)?;
        let disjoint = meet.weights.iter().all(|w| w.abs() <= ALGEBRAIC_TOL);
        return Ok(Uniqueness::Unique {
            decomposition,
            disjoint,
        });
    }
    if support.len() == 1 {
        let decomposition = decompose_difference(f, ground, None)?;
        let meet = lattice_inf(&decomposition.g, &decomposition.h)?;
        let disjoint = meet.weights.iter().all(|w| w.abs() <= ALGEBRAIC_TOL);
        return Ok(Uniqueness::Unique {
            decomposition,
            disjoint,
        });
    }
    let (a, b) = (support[0], support[1]);
    let first = decompose_difference(
        f,
        ground,
        Some(&FiniteFunctional::point_evaluation(ground.size(), a)),
    )?;
    let second = decompose_difference(
        f,
        ground,
        Some(&FiniteFunctional::point_evaluation(ground.size(), b)),
    )?;
    Ok(Uniqueness::Multiple {
        first,
        second,
        vertices: (a, b),
    })
}

/// `f = κ (g − h)` with `g, h ∈ SL`, for any `κ ≥ ‖f‖/2`.
pub fn scaled_decomposition(
    f: &FiniteFunctional,
    ground: &GroundSet,
    scale: f64,
) -> Result<Decomposition, LabError> {
    check_len(ground.size(), f.len())?;
    let failed = violated_conditions(f, ground, false);
    if !failed.is_empty() {
        return Err(LabError::ConditionViolation(failed));
    }
    let half_norm = f.norm() / 2.0;
    if !(scale > 0.0 && scale.is_finite()) || scale < half_norm - ALGEBRAIC_TOL {
        return Err(LabError::ScaleTooSmall { scale, half_norm });
    }
    decompose_difference(&f.scaled(1.0 / scale), ground, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Representation {
    pub direct: f64,
    pub choquet_avg: f64,
    pub pass: bool,
}

/// `f(x)` directly and as the Choquet integral of `i ↦ x_i` over the
/// additive capacity that `f` induces on the support.
pub fn representation_check(
    f: &FiniteFunctional,
    x: &[f64],
    ground: &GroundSet,
) -> Result<Representation, LabError> {
    check_len(ground.size(), x.len())?;
    if !sl_membership(f, ground) {
        return Err(LabError::NotInSl("f"));
    }
    let support = ground.support();
    // Clamp the ≥ -1e-12 round-off that sl_membership tolerates.
    let rho_weights: Vec<f64> = support.iter().map(|&i| f.weights[i].max(0.0)).collect();
    let rho = FiniteCapacity::additive(&rho_weights)?;
    let evaluations: Vec<f64> = support.iter().map(|&i| x[i]).collect();
    let choquet_avg = choquet(&evaluations, &rho)?;
    let direct = f.apply(x)?;
    Ok(Representation {
        direct,
        choquet_avg,
        pass: (direct - choquet_avg).abs() <= ALGEBRAIC_TOL,
    })
}

/// Functional `x ↦ ∫ (i ↦ x_i) dρ` over a capacity `ρ` on the support.
/// Monotone and normalized for any normalized `ρ`; linear only when `ρ` is
/// additive.
pub fn choquet_average(
    rho: &FiniteCapacity,
    x: &[f64],
    ground: &GroundSet,
) -> Result<f64, LabError> {
    check_len(ground.size(), x.len())?;
    let support = ground.support();
    check_len(support.len(), rho.size())?;
    let evaluations: Vec<f64> = support.iter().map(|&i| x[i]).collect();
    choquet(&evaluations, rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
    pub argmin: usize,
    pub argmax: usize,
}

/// `{f(x) : f ∈ SL} = [min_F x, max_F x]`.
pub fn value_range(x: &[f64], ground: &GroundSet) -> Result<ValueRange, LabError> {
    check_len(ground.size(), x.len())?;
    let support = ground.support();
    let mut r = ValueRange {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
        argmin: support[0],
        argmax: support[0],
    };
    for i in support {
        if x[i] < r.lo {
            r.lo = x[i];
            r.argmin = i;
        }
        if x[i] > r.hi {
            r.hi = x[i];
            r.argmax = i;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn three_atom_capacity() -> FiniteCapacity {
        // singletons 0.2, pairs 0.5, whole set 1
        let values = (0u32..8)
            .map(|m| match m.count_ones() {
                0 => 0.0,
                1 => 0.2,
                2 => 0.5,
                _ => 1.0,
            })
            .collect();
        FiniteCapacity::new(3, values).unwrap()
    }

    #[test]
    fn ground_set_validation() {
        assert_eq!(GroundSet::new(1, &[]), Err(LabError::GroundSize(1)));
        assert_eq!(GroundSet::new(17, &[]), Err(LabError::GroundSize(17)));
        assert_eq!(GroundSet::new(2, &[0, 1]), Err(LabError::NullCoversAll));
        assert!(matches!(
            GroundSet::new(3, &[3]),
            Err(LabError::NullOutOfRange { index: 3, size: 3 })
        ));
        let g = GroundSet::new(4, &[1, 3]).unwrap();
        assert_eq!(g.support(), vec![0, 2]);
    }

    #[test]
    fn capacity_validation() {
        assert!(matches!(
            FiniteCapacity::new(2, vec![0.0, 0.5, 0.3, 0.4]),
            Err(LabError::NotMonotone { .. })
        ));
        assert_eq!(
            FiniteCapacity::new(2, vec![0.1, 0.5, 0.5, 1.0]),
            Err(LabError::NonzeroEmpty(0.1))
        );
        assert!(matches!(
            FiniteCapacity::new(2, vec![0.0, 1.0]),
            Err(LabError::DimensionMismatch { .. })
        ));
        let mut table = BTreeMap::new();
        table.insert(0, 0.0);
        table.insert(1, 0.5);
        table.insert(2, 0.5);
        assert_eq!(
            FiniteCapacity::from_table(2, &table),
            Err(LabError::MissingSubset(3))
        );
        table.insert(3, 1.0);
        assert!(FiniteCapacity::from_table(2, &table).unwrap().is_additive());
    }

    #[test]
    fn choquet_examples() {
        let uniform = FiniteCapacity::additive(&[0.5, 0.5]).unwrap();
        assert_eq!(choquet(&[0.0, 1.0], &uniform).unwrap(), 0.5);
        assert!(close(choquet(&[-2.5, -2.5], &uniform).unwrap(), -2.5, 1e-15));
        let nu = three_atom_capacity();
        assert!(close(choquet(&[3.0, 1.0, 2.0], &nu).unwrap(), 1.7, 1e-12));
        assert!(choquet(&[1.0], &nu).is_err());
    }

    #[test]
    fn riemann_examples() {
        let uniform = FiniteCapacity::additive(&[0.5, 0.5]).unwrap();
        let r = choquet_riemann(&[0.0, 1.0], &uniform, 1e-4).unwrap();
        assert!(close(r, 0.5, 1e-3));
        let nu = three_atom_capacity();
        let r = choquet_riemann(&[3.0, 1.0, 2.0], &nu, 1e-4).unwrap();
        assert!(close(r, 1.7, 1e-3), "{r}");
        let r = choquet_riemann(&[-0.8, -0.8, -0.8], &nu, 1e-4).unwrap();
        assert!(close(r, -0.8, 1e-4 + 1e-12), "{r}");
        assert_eq!(
            choquet_riemann(&[0.0, 1.0], &uniform, 0.0),
            Err(LabError::BadStep(0.0))
        );
    }

    #[test]
    fn duality_examples() {
        let zero = FiniteFunctional::zero(4);
        assert!(charge_of(&zero).weights.iter().all(|&w| w == 0.0));
        let e0 = FiniteFunctional::point_evaluation(3, 0);
        let mu = charge_of(&e0);
        assert_eq!(mu.measure(0b001), 1.0);
        assert_eq!(mu.measure(0b110), 0.0);
        let f = FiniteFunctional::new(vec![0.3, -1.2, 0.45, 2.0]);
        assert_eq!(charge_of(&f).measure(0b0101), 0.3 + 0.45);
        assert_eq!(functional_of(&charge_of(&f)), f);
    }

    #[test]
    fn lattice_examples() {
        let f = FiniteFunctional::new(vec![1.0, -1.0]);
        assert_eq!(
            lattice_sup(&f, &FiniteFunctional::zero(2)).unwrap().weights,
            vec![1.0, 0.0]
        );
        assert_eq!(lattice_sup(&f, &f).unwrap(), f);
        let a = FiniteFunctional::new(vec![0.3, -0.5, 0.2]);
        let b = FiniteFunctional::new(vec![-0.1, 0.4, 0.2]);
        assert_eq!(lattice_sup(&a, &b).unwrap().weights, vec![0.3, 0.4, 0.2]);
        assert_eq!(lattice_inf(&a, &b).unwrap().weights, vec![-0.1, -0.5, 0.2]);
    }

    #[test]
    fn norm_identity_examples() {
        let r = norm_identity_check(&FiniteFunctional::zero(3)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.pass), (0.0, 0.0, true));
        let r = norm_identity_check(&FiniteFunctional::new(vec![1.0, -1.0])).unwrap();
        assert_eq!((r.lhs, r.rhs, r.pass), (2.0, 2.0, true));
        let r = norm_identity_check(&FiniteFunctional::new(vec![0.3, 0.2, -0.5])).unwrap();
        assert!(close(r.lhs, 1.0, 1e-15) && close(r.rhs, 1.0, 1e-15) && r.pass);
        assert!(matches!(
            norm_identity_check(&FiniteFunctional::new(vec![1.0, 0.0])),
            Err(LabError::Precondition(_))
        ));
    }

    #[test]
    fn sl_examples() {
        let g = GroundSet::new(3, &[2]).unwrap();
        assert!(sl_membership(&FiniteFunctional::point_evaluation(3, 0), &g));
        assert!(!sl_membership(&FiniteFunctional::point_evaluation(3, 2), &g));
        assert!(sl_membership(&FiniteFunctional::uniform_on_support(&g), &g));
        assert!(!sl_membership(&FiniteFunctional::new(vec![1.5, -0.5, 0.0]), &g));

        assert_eq!(
            sl_vertices(&g),
            vec![
                FiniteFunctional::point_evaluation(3, 0),
                FiniteFunctional::point_evaluation(3, 1)
            ]
        );
        assert_eq!(sl_vertices(&GroundSet::new(2, &[1]).unwrap()).len(), 1);
        assert_eq!(sl_vertices(&GroundSet::new(4, &[]).unwrap()).len(), 4);
        let f = FiniteFunctional::new(vec![0.25, 0.75, 0.0]);
        assert_eq!(vertex_coefficients(&f, &g), Some(vec![0.25, 0.75]));
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(sl_diameter(&GroundSet::new(3, &[0, 1]).unwrap()), 0.0);
        assert_eq!(sl_diameter(&GroundSet::new(3, &[2]).unwrap()), 2.0);
        assert_eq!(sl_diameter(&GroundSet::new(7, &[0, 3]).unwrap()), 2.0);
    }

    #[test]
    fn decomposition_examples() {
        let g3 = GroundSet::new(3, &[2]).unwrap();
        let e0 = FiniteFunctional::point_evaluation(3, 0);
        let d = decompose_difference(&FiniteFunctional::zero(3), &g3, Some(&e0)).unwrap();
        assert_eq!((d.g.clone(), d.h.clone()), (e0.clone(), e0.clone()));

        let f = FiniteFunctional::new(vec![1.0, -1.0, 0.0]);
        let d = decompose_difference(&f, &g3, None).unwrap();
        assert_eq!(d.g.weights, vec![1.0, 0.0, 0.0]);
        assert_eq!(d.h.weights, vec![0.0, 1.0, 0.0]);

        let f = FiniteFunctional::new(vec![0.5, -0.5, 0.0]);
        let d = decompose_difference(&f, &g3, Some(&e0)).unwrap();
        assert_eq!(d.g.weights, vec![1.0, 0.0, 0.0]);
        assert_eq!(d.h.weights, vec![0.5, 0.5, 0.0]);
        let d = decompose_difference(&f, &g3, None).unwrap();
        assert_eq!(d.g.weights, vec![0.75, 0.25, 0.0]);
    }

    #[test]
    fn decomposition_conditions() {
        let g3 = GroundSet::new(3, &[2]).unwrap();
        let err = decompose_difference(&FiniteFunctional::new(vec![1.0, 0.0, 0.0]), &g3, None)
            .unwrap_err();
        assert_eq!(err, LabError::ConditionViolation(vec![Condition::ZeroTotal]));
        let err = decompose_difference(&FiniteFunctional::new(vec![1.5, -1.5, 0.0]), &g3, None)
            .unwrap_err();
        assert_eq!(
            err,
            LabError::ConditionViolation(vec![Condition::NormAtMostTwo])
        );
        let err = decompose_difference(&FiniteFunctional::new(vec![0.5, 0.0, -0.5]), &g3, None)
            .unwrap_err();
        assert_eq!(
            err,
            LabError::ConditionViolation(vec![Condition::VanishesOnNull])
        );
        let err = decompose_difference(
            &FiniteFunctional::zero(3),
            &g3,
            Some(&FiniteFunctional::point_evaluation(3, 2)),
        )
        .unwrap_err();
        assert_eq!(err, LabError::NotInSl("f0"));
    }

    #[test]
    fn uniqueness_examples() {
        let g3 = GroundSet::new(3, &[2]).unwrap();
        match decomposition_uniqueness_probe(&FiniteFunctional::new(vec![1.0, -1.0, 0.0]), &g3)
            .unwrap()
        {
            Uniqueness::Unique {
                decomposition,
                disjoint,
            } => {
                assert!(disjoint);
                assert_eq!(decomposition.g.weights, vec![1.0, 0.0, 0.0]);
                assert_eq!(decomposition.h.weights, vec![0.0, 1.0, 0.0]);
            }
            other => panic!("{other:?}"),
        }
        match decomposition_uniqueness_probe(&FiniteFunctional::new(vec![0.5, -0.5, 0.0]), &g3)
            .unwrap()
        {
            Uniqueness::Multiple { first, second, .. } => {
                assert_eq!(first.g.weights, vec![1.0, 0.0, 0.0]);
                assert_eq!(second.g.weights, vec![0.5, 0.5, 0.0]);
            }
            other => panic!("{other:?}"),
        }
        let maximal = GroundSet::new(3, &[0, 2]).unwrap();
        assert!(matches!(
            decomposition_uniqueness_probe(&FiniteFunctional::zero(3), &maximal).unwrap(),
            Uniqueness::Unique { .. }
        ));
    }

    #[test]
    fn scaled_examples() {
        let g3 = GroundSet::new(3, &[2]).unwrap();
        let d = scaled_decomposition(&FiniteFunctional::zero(3), &g3, 0.7).unwrap();
        assert_eq!(d.g, d.h);
        let f = FiniteFunctional::new(vec![1.0, -1.0, 0.0]);
        let d1 = scaled_decomposition(&f, &g3, 1.0).unwrap();
        assert_eq!(d1, decompose_difference(&f, &g3, None).unwrap());
        let d2 = scaled_decomposition(&f, &g3, 2.0).unwrap();
        let half = FiniteFunctional::new(vec![0.5, -0.5, 0.0]);
        assert_eq!(d2, decompose_difference(&half, &g3, None).unwrap());
        assert!(d2.g.sub(&d2.h).scaled(2.0).max_abs_diff(&f) <= ALGEBRAIC_TOL);
        assert!(matches!(
            scaled_decomposition(&f, &g3, 0.5),
            Err(LabError::ScaleTooSmall { .. })
        ));
    }

    #[test]
    fn representation_examples() {
        let g = GroundSet::new(4, &[1]).unwrap();
        let x = [0.3, -7.0, 2.5, -1.25];
        let e2 = FiniteFunctional::point_evaluation(4, 2);
        let r = representation_check(&e2, &x, &g).unwrap();
        assert!(r.pass && r.direct == 2.5 && close(r.choquet_avg, 2.5, 1e-12));
        let u = FiniteFunctional::uniform_on_support(&g);
        let ind = [1.0, 0.0, 1.0, 1.0];
        let r = representation_check(&u, &ind, &g).unwrap();
        assert!(r.pass && close(r.direct, 1.0, 1e-15));
        assert_eq!(
            representation_check(&FiniteFunctional::point_evaluation(4, 1), &x, &g),
            Err(LabError::NotInSl("f"))
        );
    }

    #[test]
    fn non_additive_average_is_monotone_and_normalized() {
        let g = GroundSet::new(4, &[3]).unwrap();
        let rho = three_atom_capacity();
        assert!(!rho.is_additive());
        let e = [1.0; 4];
        assert!(close(choquet_average(&rho, &e, &g).unwrap(), 1.0, 1e-15));
        let x = [0.1, 0.5, -0.3, 9.0];
        let y = [0.2, 0.5, 0.4, -9.0];
        assert!(choquet_average(&rho, &x, &g).unwrap() <= choquet_average(&rho, &y, &g).unwrap());
        // Not linear: the sum of integrals differs from the integral of the sum.
        let a = [1.0, 0.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0, 0.0];
        let ab = [1.0, 1.0, 0.0, 0.0];
        let lhs = choquet_average(&rho, &ab, &g).unwrap();
        let rhs = choquet_average(&rho, &a, &g).unwrap() + choquet_average(&rho, &b, &g).unwrap();
        assert!((lhs - rhs).abs() > 0.05);
    }

    #[test]
    fn value_range_examples() {
        let g = GroundSet::new(3, &[]).unwrap();
        let r = value_range(&[4.0, 4.0, 4.0], &g).unwrap();
        assert_eq!((r.lo, r.hi), (4.0, 4.0));
        let g2 = GroundSet::new(3, &[2]).unwrap();
        let r = value_range(&[0.0, 1.0, 5.0], &g2).unwrap();
        assert_eq!((r.lo, r.hi), (0.0, 1.0));
        let r = value_range(&[3.0, 1.0, 2.0], &g).unwrap();
        assert_eq!((r.lo, r.hi, r.argmin, r.argmax), (1.0, 3.0, 1, 0));
    }

    #[test]
    fn capacity_serializes_as_bitmask_table() {
        let nu = FiniteCapacity::additive(&[0.25, 0.75]).unwrap();
        let json = serde_json::to_string(&nu).unwrap();
        assert_eq!(json, r#"{"0":0.0,"1":0.25,"2":0.75,"3":1.0}"#);
    }
}
