//! Concrete ideals on ω with a three-valued membership test.
//!
//! Membership in an ideal is a limit statement, so every decision is made
//! from a trace of scores at dyadic checkpoints below a working horizon and
//! may come back [`Verdict::Undecided`].

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::seqset::SetSpec;

/// Smallest checkpoint that is ever scored.
pub const MIN_CHECKPOINT: u64 = 64;
/// Maximum number of dyadic checkpoints `horizon / 2^j` in a trace.
pub const MAX_CHECKPOINTS: usize = 8;
/// Ratio between the `NotIn` threshold and the membership tolerance.
pub const NOT_IN_FACTOR: f64 = 10.0;
/// Level unit for summable ideals: stage `k` of the F_σ extraction asks
/// for blocks of mass above `k * SUMMABLE_LEVEL_UNIT`.
pub const SUMMABLE_LEVEL_UNIT: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdealError {
    #[error("horizon must be at least {MIN_CHECKPOINT}, got {0}")]
    HorizonTooSmall(u64),
    #[error("tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),
    #[error("empty window [{0}, {1})")]
    EmptyWindow(u64, u64),
    #[error("{0} has no F_sigma submeasure representation")]
    NotFSigma(String),
    #[error("index list must be strictly increasing")]
    UnsortedIndices,
    #[error("unknown ideal name {0:?}")]
    UnknownName(String),
    #[error("weight exponent must lie in (0, 1] for a divergent series, got {0}")]
    ConvergentWeights(f64),
    #[error("level unit must be positive and finite, got {0}")]
    BadLevelUnit(f64),
}

/// Positive weights `w_n` with divergent partial sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "exponent", rename_all = "kebab-case")]
pub enum WeightRule {
    /// `1 / (n + 1)`.
    Harmonic,
    /// `(n + 1)^(-p)` with `0 < p <= 1`.
    Power(f64),
    /// Constant `1`.
    Unit,
}

impl WeightRule {
    pub fn power(p: f64) -> Result<Self, IdealError> {
        if p > 0.0 && p <= 1.0 {
            Ok(WeightRule::Power(p))
        } else {
            Err(IdealError::ConvergentWeights(p))
        }
    }

    #[inline]
    pub fn weight(self, n: u64) -> f64 {
        match self {
            WeightRule::Harmonic => 1.0 / (n as f64 + 1.0),
            WeightRule::Power(p) => (n as f64 + 1.0).powf(-p),
            WeightRule::Unit => 1.0,
        }
    }

    /// `Σ_{n ∈ [m, n)} w_n`, summed in ascending index order.
    pub fn partial_sum(self, m: u64, n: u64) -> f64 {
        (m..n).map(|i| self.weight(i)).sum()
    }

    fn parse(s: &str) -> Result<Self, IdealError> {
        match s {
            "harmonic" => Ok(WeightRule::Harmonic),
            "unit" => Ok(WeightRule::Unit),
            _ => {
                let p = s
                    .strip_prefix("power:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| IdealError::UnknownName(s.to_string()))?;
                WeightRule::power(p)
            }
        }
    }
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Harmonic => write!(f, "harmonic"),
            WeightRule::Power(p) => write!(f, "power:{p}"),
            WeightRule::Unit => write!(f, "unit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IdealKind {
    /// Finite sets.
    Fin,
    /// `{A : Σ_{n∈A} w_n < ∞}`.
    Summable { weights: WeightRule, level_unit: f64 },
    /// Sets of asymptotic density zero.
    Density,
    /// Sets whose `w`-weighted density tends to zero.
    WeightedDensity { weights: WeightRule },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    In,
    NotIn,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipEvidence {
    pub verdict: Verdict,
    /// `(checkpoint, score)` pairs, checkpoints strictly increasing.
    pub score_trace: Vec<(u64, f64)>,
    pub tolerance: f64,
}

impl MembershipEvidence {
    pub fn final_score(&self) -> f64 {
        self.score_trace.last().map_or(0.0, |&(_, s)| s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealModel {
    pub name: String,
    pub kind: IdealKind,
}

impl IdealModel {
    pub fn fin() -> Self {
        Self {
            name: "fin".into(),
            kind: IdealKind::Fin,
        }
    }

    pub fn density() -> Self {
        Self {
            name: "density".into(),
            kind: IdealKind::Density,
        }
    }

    pub fn summable(weights: WeightRule) -> Self {
        Self {
            name: format!("summable:{weights}"),
            kind: IdealKind::Summable {
                weights,
                level_unit: SUMMABLE_LEVEL_UNIT,
            },
        }
    }

    /// The summable ideal of the harmonic weights `1/(n+1)`.
    pub fn summable_harmonic() -> Self {
        Self::summable(WeightRule::Harmonic)
    }

    pub fn weighted_density(weights: WeightRule) -> Self {
        Self {
            name: format!("weighted-density:{weights}"),
            kind: IdealKind::WeightedDensity { weights },
        }
    }

    /// Override the F_σ level unit of a summable ideal.
    pub fn with_level_unit(mut self, unit: f64) -> Result<Self, IdealError> {
        if !(unit.is_finite() && unit > 0.0) {
            return Err(IdealError::BadLevelUnit(unit));
        }
        if let IdealKind::Summable { level_unit, .. } = &mut self.kind {
            *level_unit = unit;
        }
        Ok(self)
    }

    /// Parse a canonical name: `fin`, `density`, `summable:<w>`,
    /// `weighted-density:<w>` with `<w>` one of `harmonic`, `unit`, `power:<p>`.
    pub fn from_name(name: &str) -> Result<Self, IdealError> {
        match name {
            "fin" => Ok(Self::fin()),
            "density" => Ok(Self::density()),
            _ => {
                if let Some(w) = name.strip_prefix("summable:") {
                    Ok(Self::summable(WeightRule::parse(w)?))
                } else if let Some(w) = name.strip_prefix("weighted-density:") {
                    Ok(Self::weighted_density(WeightRule::parse(w)?))
                } else {
                    Err(IdealError::UnknownName(name.to_string()))
                }
            }
        }
    }

    pub fn is_f_sigma(&self) -> bool {
        matches!(self.kind, IdealKind::Fin | IdealKind::Summable { .. })
    }

    /// Upper level of the closed set `F_k = {φ <= level}` used at stage `k`.
    pub fn stage_level(&self, k: u32) -> Result<f64, IdealError> {
        match self.kind {
            IdealKind::Fin => Ok(f64::from(k)),
            IdealKind::Summable { level_unit, .. } => Ok(f64::from(k) * level_unit),
            _ => Err(IdealError::NotFSigma(self.name.clone())),
        }
    }

    fn uses_prefix_scores(&self) -> bool {
        matches!(
            self.kind,
            IdealKind::Density | IdealKind::WeightedDensity { .. }
        )
    }

    /// Kind-specific evidence score of `A` on `[m, n)`.
    ///
    /// Density kinds score the prefix `[0, n)` and ignore `m`; the others
    /// score the window itself.
    pub fn score(&self, set: &SetSpec, m: u64, n: u64) -> Result<f64, IdealError> {
        if m >= n {
            return Err(IdealError::EmptyWindow(m, n));
        }
        Ok(match self.kind {
            IdealKind::Fin => set.count_window(m, n) as f64,
            IdealKind::Summable { weights, .. } => (m..n)
                .filter(|&i| set.member(i))
                .map(|i| weights.weight(i))
                .sum(),
            IdealKind::Density => set.count_window(0, n) as f64 / n as f64,
            IdealKind::WeightedDensity { weights } => {
                let mass: f64 = (0..n)
                    .filter(|&i| set.member(i))
                    .map(|i| weights.weight(i))
                    .sum();
                mass / weights.partial_sum(0, n)
            }
        })
    }

    /// Decide `A ∈ I` at `horizon` with tolerance `tol`.
    pub fn decide_membership(
        &self,
        set: &SetSpec,
        horizon: u64,
        tol: f64,
    ) -> Result<MembershipEvidence, IdealError> {
        self.decide_with(|n| set.member(n), horizon, tol)
    }

    /// Same decision procedure with membership supplied as a predicate.
    pub fn decide_with<P>(
        &self,
        member: P,
        horizon: u64,
        tol: f64,
    ) -> Result<MembershipEvidence, IdealError>
    where
        P: Fn(u64) -> bool,
    {
        if horizon < MIN_CHECKPOINT {
            return Err(IdealError::HorizonTooSmall(horizon));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(IdealError::BadTolerance(tol));
        }
        let checkpoints = checkpoints(horizon);
        let score_trace = self.trace(&member, &checkpoints);
        let verdict = self.verdict(&score_trace, tol);
        Ok(MembershipEvidence {
            verdict,
            score_trace,
            tolerance: tol,
        })
    }

    fn trace<P: Fn(u64) -> bool>(&self, member: &P, checkpoints: &[u64]) -> Vec<(u64, f64)> {
        let weight = |n: u64| match self.kind {
            IdealKind::Fin | IdealKind::Density => 1.0,
            IdealKind::Summable { weights, .. } | IdealKind::WeightedDensity { weights } => {
                weights.weight(n)
            }
        };
        let mut trace = Vec::with_capacity(checkpoints.len());
        if self.uses_prefix_scores() {
            let mut mass = 0.0;
            let mut total = 0.0;
            let mut n = 0u64;
            for &c in checkpoints {
                while n < c {
                    let w = weight(n);
                    total += w;
                    if member(n) {
                        mass += w;
                    }
                    n += 1;
                }
                trace.push((c, mass / total));
            }
        } else {
            // Tail windows [c/2, c) of consecutive checkpoints are adjacent.
            for &c in checkpoints {
                let tail: f64 = (c / 2..c).filter(|&i| member(i)).map(weight).sum();
                trace.push((c, tail));
            }
        }
        trace
    }

    fn verdict(&self, trace: &[(u64, f64)], tol: f64) -> Verdict {
        let last = trace.last().map_or(0.0, |&(_, s)| s);
        let not_in = NOT_IN_FACTOR * tol;
        match self.kind {
            IdealKind::Density | IdealKind::WeightedDensity { .. } => {
                let tail = &trace[trace.len().saturating_sub(3)..];
                let settling = tail.windows(2).all(|w| w[1].1 <= w[0].1);
                if last < tol && settling {
                    Verdict::In
                } else if last > not_in {
                    Verdict::NotIn
                } else {
                    Verdict::Undecided
                }
            }
            IdealKind::Summable { .. } | IdealKind::Fin => {
                let in_ = match self.kind {
                    IdealKind::Fin => last == 0.0,
                    _ => last < tol,
                };
                if in_ {
                    Verdict::In
                } else if trace.iter().all(|&(_, s)| s > not_in) {
                    Verdict::NotIn
                } else {
                    Verdict::Undecided
                }
            }
        }
    }

    /// The submeasure φ on a finite set of indices (F_σ kinds only).
    pub fn submeasure(&self, indices: &[u64]) -> Result<f64, IdealError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IdealError::UnsortedIndices);
        }
        match self.kind {
            IdealKind::Fin => Ok(indices.len() as f64),
            IdealKind::Summable { weights, .. } => {
                Ok(indices.iter().map(|&n| weights.weight(n)).sum())
            }
            _ => Err(IdealError::NotFSigma(self.name.clone())),
        }
    }

    /// φ-weight of a single index (F_σ kinds only).
    pub fn point_mass(&self, n: u64) -> Result<f64, IdealError> {
        match self.kind {
            IdealKind::Fin => Ok(1.0),
            IdealKind::Summable { weights, .. } => Ok(weights.weight(n)),
            _ => Err(IdealError::NotFSigma(self.name.clone())),
        }
    }
}

impl fmt::Display for IdealModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Dyadic checkpoints `horizon / 2^j`, ascending, at most
/// [`MAX_CHECKPOINTS`] of them and none below [`MIN_CHECKPOINT`].
pub fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut cps: Vec<u64> = (0..MAX_CHECKPOINTS)
        .map(|j| horizon >> j)
        .take_while(|&c| c >= MIN_CHECKPOINT)
        .collect();
    cps.dedup();
    cps.reverse();
    cps
}
