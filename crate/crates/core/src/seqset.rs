//! Intensional subsets of ω and bounded real sequences.
//!
//! Both kinds of object are rules, never materialized beyond the window a
//! caller asks for. Membership and evaluation are pure, so specs can be
//! shared freely across threads.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Number of leading indices checked when a declared bound is attached.
pub const BOUND_AUDIT_WINDOW: u64 = 10_000;

/// Block starts are audited up to this index when a block rule is built.
const BLOCK_AUDIT_LIMIT: u64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("explicit set must not contain duplicates (saw {0} twice)")]
    DuplicateElement(u64),
    #[error("arithmetic step must be at least 1")]
    ZeroStep,
    #[error("block rule: {0}")]
    InvalidBlocks(String),
    #[error("block {k} ends at {end} but block {next} starts at {next_start}")]
    BlockOverlap {
        k: u64,
        end: u64,
        next: u64,
        next_start: u64,
    },
    #[error("periodic sequence needs at least one value")]
    EmptyPeriod,
    #[error("non-finite value {0} in sequence rule")]
    NonFinite(f64),
    #[error("declared bound {bound} is violated at n = {index} (|x_n| = {value})")]
    BoundViolation { bound: f64, index: u64, value: f64 },
    #[error("declared bound must be finite and nonnegative, got {0}")]
    InvalidBound(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Comparator {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<")]
    Lt,
}

impl Comparator {
    #[inline]
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Ge => value >= threshold,
            Comparator::Le => value <= threshold,
            Comparator::Gt => value > threshold,
            Comparator::Lt => value < threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Ge => ">=",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Lt => "<",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            ">=" => Some(Comparator::Ge),
            "<=" => Some(Comparator::Le),
            ">" => Some(Comparator::Gt),
            "<" => Some(Comparator::Lt),
            _ => None,
        }
    }
}

/// Rule producing the k-th block `[a_k, b_k)` of a [`SetRule::Blocks`] set.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockRule {
    /// `[offset + k*period, offset + k*period + len)`.
    Periodic { offset: u64, period: u64, len: u64 },
    /// `[base^k, base^k + ceil(base^k * num / den))`.
    Exponential { base: u64, num: u64, den: u64 },
}

impl BlockRule {
    /// Block `k` as a half-open interval, or `None` once the start overflows.
    pub fn block(&self, k: u64) -> Option<(u64, u64)> {
        match *self {
            BlockRule::Periodic {
                offset,
                period,
                len,
            } => {
                let start = offset.checked_add(k.checked_mul(period)?)?;
                Some((start, start.checked_add(len)?))
            }
            BlockRule::Exponential { base, num, den } => {
                let start = base.checked_pow(u32::try_from(k).ok()?)?;
                Some((start, start.checked_add(exp_width(start, num, den)?)?))
            }
        }
    }

    fn contains(&self, n: u64) -> bool {
        match *self {
            BlockRule::Periodic {
                offset,
                period,
                len,
            } => n >= offset && (n - offset) % period < len,
            BlockRule::Exponential { base, num, den } => {
                if n == 0 {
                    return false;
                }
                let mut start = 1u64;
                while let Some(next) = start.checked_mul(base) {
                    if next > n {
                        break;
                    }
                    start = next;
                }
                match exp_width(start, num, den) {
                    Some(w) => n - start < w,
                    None => true,
                }
            }
        }
    }

    fn validate(&self) -> Result<(), SpecError> {
        match *self {
            BlockRule::Periodic {
                offset,
                period,
                len,
            } => {
                if period == 0 {
                    return Err(SpecError::InvalidBlocks("period must be at least 1".into()));
                }
                if len == 0 {
                    return Err(SpecError::InvalidBlocks("blocks must be nonempty".into()));
                }
                // Every gap is identical, so block 0 decides the whole rule.
                if len > period {
                    return Err(SpecError::BlockOverlap {
                        k: 0,
                        end: offset + len,
                        next: 1,
                        next_start: offset + period,
                    });
                }
                return Ok(());
            }
            BlockRule::Exponential { base, num, den } => {
                if base < 2 {
                    return Err(SpecError::InvalidBlocks("base must be at least 2".into()));
                }
                if num == 0 || den == 0 {
                    return Err(SpecError::InvalidBlocks(
                        "width fraction must be positive".into(),
                    ));
                }
            }
        }
        // b_k <= a_{k+1}, audited until the starts leave the audit range.
        let mut k = 0u64;
        while let (Some((_, end)), Some((next_start, _))) = (self.block(k), self.block(k + 1)) {
            if end > next_start {
                return Err(SpecError::BlockOverlap {
                    k,
                    end,
                    next: k + 1,
                    next_start,
                });
            }
            if next_start > BLOCK_AUDIT_LIMIT {
                break;
            }
            k += 1;
        }
        Ok(())
    }
}

fn exp_width(start: u64, num: u64, den: u64) -> Option<u64> {
    let prod = u128::from(start) * u128::from(num);
    let w = prod.div_ceil(u128::from(den));
    u64::try_from(w).ok()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetRule {
    ExplicitFinite(Vec<u64>),
    Arithmetic { first: u64, step: u64 },
    Squares,
    Blocks(BlockRule),
    Complement(SetSpec),
    Union(SetSpec, SetSpec),
    Intersection(SetSpec, SetSpec),
    LevelSet {
        sequence: SequenceSpec,
        cmp: Comparator,
        threshold: f64,
    },
}

/// A finitely described subset of ω.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSpec {
    rule: Arc<SetRule>,
}

impl SetSpec {
    fn from_rule(rule: SetRule) -> Self {
        Self {
            rule: Arc::new(rule),
        }
    }

    pub fn rule(&self) -> &SetRule {
        &self.rule
    }

    /// Finite set; elements are sorted, duplicates rejected.
    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Result<Self, SpecError> {
        let mut v: Vec<u64> = elements.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(SpecError::DuplicateElement(w[0]));
        }
        Ok(Self::from_rule(SetRule::ExplicitFinite(v)))
    }

    pub fn empty() -> Self {
        Self::from_rule(SetRule::ExplicitFinite(Vec::new()))
    }

    pub fn arithmetic(first: u64, step: u64) -> Result<Self, SpecError> {
        if step == 0 {
            return Err(SpecError::ZeroStep);
        }
        Ok(Self::from_rule(SetRule::Arithmetic { first, step }))
    }

    pub fn evens() -> Self {
        Self::from_rule(SetRule::Arithmetic { first: 0, step: 2 })
    }

    pub fn odds() -> Self {
        Self::from_rule(SetRule::Arithmetic { first: 1, step: 2 })
    }

    /// ω itself.
    pub fn all() -> Self {
        Self::from_rule(SetRule::Arithmetic { first: 0, step: 1 })
    }

    /// `[start, ∞)`.
    pub fn from_index(start: u64) -> Self {
        Self::from_rule(SetRule::Arithmetic {
            first: start,
            step: 1,
        })
    }

    /// `[start, end)` expressed with the basic rules.
    pub fn interval(start: u64, end: u64) -> Self {
        Self::from_index(start).intersect(&Self::from_index(end).complement())
    }

    pub fn squares() -> Self {
        Self::from_rule(SetRule::Squares)
    }

    pub fn blocks(rule: BlockRule) -> Result<Self, SpecError> {
        rule.validate()?;
        Ok(Self::from_rule(SetRule::Blocks(rule)))
    }

    pub fn complement(&self) -> Self {
        Self::from_rule(SetRule::Complement(self.clone()))
    }

    pub fn union(&self, other: &SetSpec) -> Self {
        Self::from_rule(SetRule::Union(self.clone(), other.clone()))
    }

    pub fn intersect(&self, other: &SetSpec) -> Self {
        Self::from_rule(SetRule::Intersection(self.clone(), other.clone()))
    }

    /// `{n : x_n cmp threshold}`, compared exactly.
    pub fn level(sequence: &SequenceSpec, cmp: Comparator, threshold: f64) -> Self {
        Self::from_rule(SetRule::LevelSet {
            sequence: sequence.clone(),
            cmp,
            threshold,
        })
    }

    /// `{n : |x_n - center| <= radius}`.
    pub fn closed_ball(sequence: &SequenceSpec, center: f64, radius: f64) -> Self {
        Self::level(sequence, Comparator::Ge, center - radius).intersect(&Self::level(
            sequence,
            Comparator::Le,
            center + radius,
        ))
    }

    /// `{n : |x_n - center| < radius}`.
    pub fn open_ball(sequence: &SequenceSpec, center: f64, radius: f64) -> Self {
        Self::level(sequence, Comparator::Gt, center - radius).intersect(&Self::level(
            sequence,
            Comparator::Lt,
            center + radius,
        ))
    }

    /// `{n : |x_n - center| >= radius}`.
    pub fn far_from(sequence: &SequenceSpec, center: f64, radius: f64) -> Self {
        Self::level(sequence, Comparator::Le, center - radius).union(&Self::level(
            sequence,
            Comparator::Ge,
            center + radius,
        ))
    }

    /// `{n : |x_n - center| > radius}`.
    pub fn strictly_far_from(sequence: &SequenceSpec, center: f64, radius: f64) -> Self {
        Self::level(sequence, Comparator::Lt, center - radius).union(&Self::level(
            sequence,
            Comparator::Gt,
            center + radius,
        ))
    }

    pub fn member(&self, n: u64) -> bool {
        match &*self.rule {
            SetRule::ExplicitFinite(v) => v.binary_search(&n).is_ok(),
            SetRule::Arithmetic { first, step } => n >= *first && (n - first) % step == 0,
            SetRule::Squares => {
                let r = isqrt(n);
                r * r == n
            }
            SetRule::Blocks(rule) => rule.contains(n),
            SetRule::Complement(s) => !s.member(n),
            SetRule::Union(a, b) => a.member(n) || b.member(n),
            SetRule::Intersection(a, b) => a.member(n) && b.member(n),
            SetRule::LevelSet {
                sequence,
                cmp,
                threshold,
            } => cmp.holds(sequence.eval(n), *threshold),
        }
    }

    /// Members of the set in `[m, n)`, ascending.
    pub fn enumerate_window(&self, m: u64, n: u64) -> Vec<u64> {
        assert!(m <= n, "window start {m} exceeds end {n}");
        match &*self.rule {
            SetRule::ExplicitFinite(v) => {
                let lo = v.partition_point(|&e| e < m);
                let hi = v.partition_point(|&e| e < n);
                v[lo..hi].to_vec()
            }
            SetRule::Arithmetic { first, step } => {
                let start = if m <= *first {
                    *first
                } else {
                    first + (m - first).div_ceil(*step) * step
                };
                (start..n).step_by(*step as usize).collect()
            }
            SetRule::Squares => {
                let mut r = isqrt(m);
                if r * r < m {
                    r += 1;
                }
                std::iter::successors(Some(r), |r| Some(r + 1))
                    .map(|r| r * r)
                    .take_while(|&sq| sq < n)
                    .collect()
            }
            _ => (m..n).filter(|&i| self.member(i)).collect(),
        }
    }

    /// `|A ∩ [m, n)|`.
    pub fn count_window(&self, m: u64, n: u64) -> u64 {
        match &*self.rule {
            SetRule::ExplicitFinite(_) | SetRule::Arithmetic { .. } | SetRule::Squares => {
                self.enumerate_window(m, n).len() as u64
            }
            _ => (m..n).filter(|&i| self.member(i)).count() as u64,
        }
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.rule {
            SetRule::ExplicitFinite(v) => {
                write!(f, "finite(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            SetRule::Arithmetic { first, step } => write!(f, "arith({first},{step})"),
            SetRule::Squares => write!(f, "squares"),
            SetRule::Blocks(BlockRule::Periodic {
                offset,
                period,
                len,
            }) => write!(f, "blocks(periodic,{offset},{period},{len})"),
            SetRule::Blocks(BlockRule::Exponential { base, num, den }) => {
                write!(f, "blocks(exp,{base},{num},{den})")
            }
            SetRule::Complement(s) => write!(f, "not({s})"),
            SetRule::Union(a, b) => write!(f, "union({a},{b})"),
            SetRule::Intersection(a, b) => write!(f, "inter({a},{b})"),
            SetRule::LevelSet {
                sequence,
                cmp,
                threshold,
            } => write!(f, "level({sequence},{},{threshold:?})", cmp.symbol()),
        }
    }
}

impl Serialize for SetSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeqRule {
    Constant(f64),
    Indicator(SetSpec),
    Periodic(Vec<f64>),
    /// `x_n = scale / (n + 1)`.
    Harmonic(f64),
    /// `x_n = (-1)^n (1 + 1/(n+1))`.
    AlternatingDecay,
    Sum(SequenceSpec, SequenceSpec),
    Scale(f64, SequenceSpec),
    Piecewise {
        on: SetSpec,
        inside: SequenceSpec,
        outside: SequenceSpec,
    },
}

/// A bounded real sequence with a declared sup bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    rule: Arc<SeqRule>,
    bound: f64,
    declared: bool,
}

fn check_finite(v: f64) -> Result<f64, SpecError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SpecError::NonFinite(v))
    }
}

impl SequenceSpec {
    fn from_rule(rule: SeqRule, bound: f64) -> Self {
        Self {
            rule: Arc::new(rule),
            bound,
            declared: false,
        }
    }

    pub fn rule(&self) -> &SeqRule {
        &self.rule
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Whether the bound was declared explicitly rather than derived from the rule.
    pub fn has_declared_bound(&self) -> bool {
        self.declared
    }

    pub fn constant(c: f64) -> Result<Self, SpecError> {
        Ok(Self::from_rule(SeqRule::Constant(check_finite(c)?), c.abs()))
    }

    /// The unit sequence `e = (1, 1, ...)`.
    pub fn unit() -> Self {
        Self::from_rule(SeqRule::Constant(1.0), 1.0)
    }

    pub fn indicator(set: &SetSpec) -> Self {
        Self::from_rule(SeqRule::Indicator(set.clone()), 1.0)
    }

    pub fn periodic(values: impl IntoIterator<Item = f64>) -> Result<Self, SpecError> {
        let values: Vec<f64> = values.into_iter().collect();
        if values.is_empty() {
            return Err(SpecError::EmptyPeriod);
        }
        for &v in &values {
            check_finite(v)?;
        }
        let bound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self::from_rule(SeqRule::Periodic(values), bound))
    }

    pub fn harmonic(scale: f64) -> Result<Self, SpecError> {
        Ok(Self::from_rule(
            SeqRule::Harmonic(check_finite(scale)?),
            scale.abs(),
        ))
    }

    pub fn alternating_decay() -> Self {
        Self::from_rule(SeqRule::AlternatingDecay, 2.0)
    }

    pub fn sum(a: &SequenceSpec, b: &SequenceSpec) -> Self {
        Self::from_rule(SeqRule::Sum(a.clone(), b.clone()), a.bound + b.bound)
    }

    pub fn scale(factor: f64, x: &SequenceSpec) -> Result<Self, SpecError> {
        Ok(Self::from_rule(
            SeqRule::Scale(check_finite(factor)?, x.clone()),
            factor.abs() * x.bound,
        ))
    }

    pub fn piecewise(on: &SetSpec, inside: &SequenceSpec, outside: &SequenceSpec) -> Self {
        Self::from_rule(
            SeqRule::Piecewise {
                on: on.clone(),
                inside: inside.clone(),
                outside: outside.clone(),
            },
            inside.bound.max(outside.bound),
        )
    }

    /// Replace the derived bound with a declared one, audited on the first
    /// [`BOUND_AUDIT_WINDOW`] indices.
    pub fn with_bound(mut self, bound: f64) -> Result<Self, SpecError> {
        if !bound.is_finite() || bound < 0.0 {
            return Err(SpecError::InvalidBound(bound));
        }
        if let Some(index) = (0..BOUND_AUDIT_WINDOW).find(|&n| self.eval(n).abs() > bound) {
            return Err(SpecError::BoundViolation {
                bound,
                index,
                value: self.eval(index).abs(),
            });
        }
        self.bound = bound;
        self.declared = true;
        Ok(self)
    }

    pub fn eval(&self, n: u64) -> f64 {
        match &*self.rule {
            SeqRule::Constant(c) => *c,
            SeqRule::Indicator(s) => {
                if s.member(n) {
                    1.0
                } else {
                    0.0
                }
            }
            SeqRule::Periodic(v) => v[(n % v.len() as u64) as usize],
            SeqRule::Harmonic(s) => s / (n as f64 + 1.0),
            SeqRule::AlternatingDecay => {
                let mag = 1.0 + 1.0 / (n as f64 + 1.0);
                if n % 2 == 0 {
                    mag
                } else {
                    -mag
                }
            }
            SeqRule::Sum(a, b) => a.eval(n) + b.eval(n),
            SeqRule::Scale(c, x) => c * x.eval(n),
            SeqRule::Piecewise {
                on,
                inside,
                outside,
            } => {
                if on.member(n) {
                    inside.eval(n)
                } else {
                    outside.eval(n)
                }
            }
        }
    }

    /// Values on `[m, n)`.
    pub fn sample(&self, m: u64, n: u64) -> Vec<f64> {
        (m..n).map(|i| self.eval(i)).collect()
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.rule {
            SeqRule::Constant(c) => write!(f, "constant({c:?})"),
            SeqRule::Indicator(s) => write!(f, "indicator({s})"),
            SeqRule::Periodic(v) => {
                write!(f, "periodic(")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e:?}")?;
                }
                write!(f, ")")
            }
            SeqRule::Harmonic(s) => write!(f, "harmonic({s:?})"),
            SeqRule::AlternatingDecay => write!(f, "alternating-decay"),
            SeqRule::Sum(a, b) => write!(f, "sum({a},{b})"),
            SeqRule::Scale(c, x) => write!(f, "scale({c:?},{x})"),
            SeqRule::Piecewise {
                on,
                inside,
                outside,
            } => write!(f, "piecewise({on},{inside},{outside})"),
        }
    }
}

impl Serialize for SequenceSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn member_examples() {
        let evens = SetSpec::arithmetic(0, 2).unwrap();
        assert!(evens.member(4));
        assert!(!evens.complement().member(4));
        let lvl = SetSpec::level(&SequenceSpec::indicator(&evens), Comparator::Ge, 0.5);
        // x_3 = 0 < 0.5
        assert!(!lvl.member(3));
        assert!(lvl.member(2));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(SetSpec::squares().enumerate_window(0, 10), vec![0, 1, 4, 9]);
        assert_eq!(
            SetSpec::arithmetic(1, 2).unwrap().enumerate_window(0, 6),
            vec![1, 3, 5]
        );
        let u = SetSpec::squares().union(&SetSpec::arithmetic(0, 4).unwrap());
        let brute: Vec<u64> = (0..10)
            .filter(|&n| {
                let r = (0..=n).find(|r| r * r >= n).unwrap();
                r * r == n || n % 4 == 0
            })
            .collect();
        assert_eq!(brute, vec![0, 1, 4, 8, 9]);
        assert_eq!(u.enumerate_window(0, 10), brute);
    }

    #[test]
    fn enumerate_fast_paths_match_filter() {
        let specs = [
            SetSpec::finite([3, 5, 17, 40]).unwrap(),
            SetSpec::arithmetic(7, 3).unwrap(),
            SetSpec::squares(),
        ];
        for s in &specs {
            for (m, n) in [(0, 0), (0, 50), (5, 6), (4, 41), (17, 18), (10, 200)] {
                let slow: Vec<u64> = (m..n).filter(|&i| s.member(i)).collect();
                assert_eq!(s.enumerate_window(m, n), slow, "{s} on [{m},{n})");
                assert_eq!(s.count_window(m, n), slow.len() as u64);
            }
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(SequenceSpec::constant(3.0).unwrap().eval(17), 3.0);
        assert_eq!(SequenceSpec::indicator(&SetSpec::evens()).eval(5), 0.0);
        assert_eq!(SequenceSpec::alternating_decay().eval(0), 2.0);
        assert_eq!(SequenceSpec::alternating_decay().eval(1), -1.5);
        assert_eq!(SequenceSpec::harmonic(2.0).unwrap().eval(3), 0.5);
        assert_eq!(
            SequenceSpec::periodic([0.0, 1.0, 2.0]).unwrap().eval(8),
            2.0
        );
    }

    #[test]
    fn blocks_membership() {
        let b = SetSpec::blocks(BlockRule::Periodic {
            offset: 2,
            period: 5,
            len: 2,
        })
        .unwrap();
        assert_eq!(b.enumerate_window(0, 15), vec![2, 3, 7, 8, 12, 13]);
        let e = SetSpec::blocks(BlockRule::Exponential {
            base: 4,
            num: 1,
            den: 2,
        })
        .unwrap();
        // [1,2), [4,6), [16,24), [64,96)
        assert_eq!(
            e.enumerate_window(0, 100),
            [1u64, 4, 5]
                .into_iter()
                .chain(16..24)
                .chain(64..96)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn overlapping_blocks_rejected() {
        let err = SetSpec::blocks(BlockRule::Periodic {
            offset: 0,
            period: 3,
            len: 4,
        })
        .unwrap_err();
        assert!(matches!(err, SpecError::BlockOverlap { k: 0, .. }));
        let err = SetSpec::blocks(BlockRule::Exponential {
            base: 2,
            num: 3,
            den: 2,
        })
        .unwrap_err();
        assert!(matches!(err, SpecError::BlockOverlap { .. }));
    }

    #[test]
    fn declared_bound_is_audited() {
        let x = SequenceSpec::sum(
            &SequenceSpec::indicator(&SetSpec::evens()),
            &SequenceSpec::indicator(&SetSpec::odds()),
        );
        assert_eq!(x.bound(), 2.0);
        let tight = x.clone().with_bound(1.0).unwrap();
        assert_eq!(tight.bound(), 1.0);
        let err = x.with_bound(0.5).unwrap_err();
        assert!(matches!(err, SpecError::BoundViolation { index: 0, .. }));
        let s = SequenceSpec::scale(3.0, &SequenceSpec::harmonic(1.0).unwrap()).unwrap();
        assert!(s.with_bound(2.0).is_err());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(SetSpec::arithmetic(0, 0), Err(SpecError::ZeroStep));
        assert_eq!(
            SetSpec::finite([1, 2, 2]),
            Err(SpecError::DuplicateElement(2))
        );
        assert_eq!(SequenceSpec::periodic([]), Err(SpecError::EmptyPeriod));
        assert!(SequenceSpec::constant(f64::NAN).is_err());
    }

    #[test]
    fn interval_helper() {
        assert_eq!(SetSpec::interval(3, 7).enumerate_window(0, 20), vec![3, 4, 5, 6]);
        assert!(SetSpec::interval(5, 5).enumerate_window(0, 20).is_empty());
    }

    #[test]
    fn display_is_canonical() {
        let x = SequenceSpec::piecewise(
            &SetSpec::squares().complement(),
            &SequenceSpec::alternating_decay(),
            &SequenceSpec::constant(0.5).unwrap(),
        );
        assert_eq!(
            x.to_string(),
            "piecewise(not(squares),alternating-decay,constant(0.5))"
        );
        let l = SetSpec::level(&SequenceSpec::unit(), Comparator::Lt, 1.0);
        assert_eq!(l.to_string(), "level(constant(1.0),<,1.0)");
    }
}
