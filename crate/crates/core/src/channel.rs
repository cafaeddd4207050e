//! Amplitude damping on multimode Fock states.
//!
//! A single-mode effect removing `k` photons acts as
//! `A_k |n⟩ = √C(n,k) · γ^(k/2) · (1−γ)^((n−k)/2) |n−k⟩`, and the multimode
//! effect for a pattern `k̃ = (k₁, …, k_m)` is the product of per-mode effects.
//! A damped pure state is the tensor sum of the unnormalized branches
//! `A_k̃ |ψ⟩`, one per pattern.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::algebra::{binomial, GammaPolynomial, RadicalSum};
use crate::error::{Error, Result};
use crate::fock::{enumerate_qcs, OccupationVector};

/// Per-mode photon losses `k̃`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ErrorPattern(Vec<u32>);

impl ErrorPattern {
    pub fn new(losses: Vec<u32>) -> Self {
        Self(losses)
    }

    pub fn losses(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// Total number of photons lost, `s = Σ kⱼ`.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl<const M: usize> From<[u32; M]> for ErrorPattern {
    fn from(v: [u32; M]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Debug for ErrorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ErrorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, k) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// All patterns of weight exactly `s` on `m` modes, lexicographic order.
pub fn enumerate_error_patterns(m: usize, s: u32) -> Vec<ErrorPattern> {
    enumerate_qcs(s, m)
        .members
        .into_iter()
        .map(|v| ErrorPattern(v.occupations().to_vec()))
        .collect()
}

/// All patterns with weight at most `t`, ordered by weight then lexicographically.
pub fn patterns_up_to(m: usize, t: u32) -> Vec<ErrorPattern> {
    (0..=t).flat_map(|s| enumerate_error_patterns(m, s)).collect()
}

/// Unnormalized pure state: QCS with polynomial amplitudes.
///
/// Amplitudes are real; the sign lives in the coefficients.
#[derive(Clone, Default, PartialEq)]
pub struct PureState {
    terms: BTreeMap<OccupationVector, GammaPolynomial>,
}

impl PureState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(qcs: OccupationVector) -> Self {
        let mut s = Self::new();
        s.add(qcs, GammaPolynomial::one());
        s
    }

    /// Adds `amplitude · |qcs⟩`, combining with an existing term.
    pub fn add(&mut self, qcs: OccupationVector, amplitude: GammaPolynomial) {
        if amplitude.is_structurally_zero() {
            return;
        }
        let slot = self.terms.entry(qcs.clone()).or_default();
        *slot += &amplitude;
        if slot.is_structurally_zero() {
            self.terms.remove(&qcs);
        }
    }

    pub fn add_constant(&mut self, qcs: OccupationVector, amplitude: RadicalSum) {
        self.add(qcs, GammaPolynomial::constant(amplitude));
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn modes(&self) -> Option<usize> {
        self.terms.keys().next().map(OccupationVector::modes)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, &GammaPolynomial)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &OccupationVector> {
        self.terms.keys()
    }

    pub fn amplitude(&self, qcs: &OccupationVector) -> Option<&GammaPolynomial> {
        self.terms.get(qcs)
    }

    pub fn scaled(&self, factor: &RadicalSum) -> Self {
        let f = GammaPolynomial::constant(factor.clone());
        let mut out = Self::new();
        for (q, a) in &self.terms {
            out.add(q.clone(), a * &f);
        }
        out
    }

    /// `⟨self|other⟩` for real amplitudes.
    pub fn inner(&self, other: &PureState) -> GammaPolynomial {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc = GammaPolynomial::zero();
        for (q, a) in &small.terms {
            if let Some(b) = large.terms.get(q) {
                acc += &(a * b);
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> GammaPolynomial {
        self.inner(self)
    }

    /// True when the supports share no QCS, so the inner product vanishes.
    pub fn disjoint_from(&self, other: &PureState) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.terms.keys().all(|q| !large.terms.contains_key(q))
    }

    /// Exact proportionality on identical supports.
    pub fn proportional_to(&self, other: &PureState) -> bool {
        if self.len() != other.len() || !self.terms.keys().eq(other.terms.keys()) {
            return false;
        }
        let Some((q0, x0)) = self.terms.iter().next() else {
            return true;
        };
        let y0 = &other.terms[q0];
        self.terms
            .iter()
            .skip(1)
            .all(|(q, x)| (&(x0 * &other.terms[q]) - &(x * y0)).is_zero())
    }

    fn max_occupations(&self) -> Vec<u32> {
        let m = self.modes().unwrap_or(0);
        let mut out = vec![0; m];
        for q in self.terms.keys() {
            for (j, slot) in out.iter_mut().enumerate() {
                *slot = (*slot).max(q[j]);
            }
        }
        out
    }
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (q, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{a}]{q}")?;
        }
        Ok(())
    }
}

/// `√(Πⱼ C(nⱼ, kⱼ)) · γ^(s/2) · (1−γ)^((RS−s)/2)` for one QCS, or `None` when
/// some `kⱼ > nⱼ`.
pub fn kraus_factor(qcs: &OccupationVector, pattern: &ErrorPattern) -> Result<Option<GammaPolynomial>> {
    if qcs.modes() != pattern.modes() {
        return Err(Error::LengthMismatch { left: qcs.modes(), right: pattern.modes() });
    }
    let mut multiplicity = BigUint::one();
    for (&n, &k) in qcs.occupations().iter().zip(pattern.losses()) {
        if k > n {
            return Ok(None);
        }
        multiplicity *= binomial(n as u64, k as u64);
    }
    let s = pattern.weight();
    let coeff = RadicalSum::sqrt_integer(&multiplicity)?;
    Ok(Some(GammaPolynomial::monomial(s, qcs.row_sum() - s, coeff)))
}

/// `A_k̃ |ψ⟩`. Terms that lose more photons than a mode holds vanish, so the
/// result may be empty.
pub fn kraus_apply(input: &PureState, pattern: &ErrorPattern) -> Result<PureState> {
    let mut out = PureState::new();
    for (q, amp) in input.terms() {
        if let Some(factor) = kraus_factor(q, pattern)? {
            let damaged: Vec<u32> = q
                .occupations()
                .iter()
                .zip(pattern.losses())
                .map(|(n, k)| n - k)
                .collect();
            out.add(OccupationVector::new(damaged), amp * &factor);
        }
    }
    Ok(out)
}

/// One alternative history of a damped state.
///
/// `state` is the branch for the first pattern in `patterns`; when several
/// proportional branches are merged it stays a representative of the common
/// direction and `probability` carries the summed squared norm.
#[derive(Clone, Debug)]
pub struct Branch {
    pub patterns: Vec<ErrorPattern>,
    pub state: PureState,
    pub probability: GammaPolynomial,
}

#[derive(Clone, Debug, Default)]
pub struct MixedState {
    pub branches: Vec<Branch>,
}

impl MixedState {
    pub fn total_probability(&self) -> GammaPolynomial {
        let mut acc = GammaPolynomial::zero();
        for b in &self.branches {
            acc += &b.probability;
        }
        acc
    }

    pub fn branch_for(&self, pattern: &ErrorPattern) -> Option<&Branch> {
        self.branches.iter().find(|b| b.patterns.contains(pattern))
    }

    fn push_merging(&mut self, pattern: ErrorPattern, state: PureState) {
        let probability = state.norm_sq();
        if let Some(existing) = self.branches.iter_mut().find(|b| b.state.proportional_to(&state)) {
            existing.patterns.push(pattern);
            existing.probability += &probability;
            return;
        }
        self.branches.push(Branch { patterns: vec![pattern], state, probability });
    }
}

/// Damps `input`, keeping every pattern of weight up to `max_loss` (or up to
/// the largest row sum when `None`). Empty branches are dropped and
/// proportional branches with identical support are merged.
pub fn damp(input: &PureState, max_loss: Option<u32>) -> Result<MixedState> {
    let mut mixed = MixedState::default();
    let Some(m) = input.modes() else {
        return Ok(mixed);
    };
    let ceiling = input.support().map(OccupationVector::row_sum).max().unwrap_or(0);
    let max_s = max_loss.map_or(ceiling, |s| s.min(ceiling));
    let caps = input.max_occupations();
    for s in 0..=max_s {
        for pattern in enumerate_error_patterns(m, s) {
            if pattern.losses().iter().zip(&caps).any(|(k, cap)| k > cap) {
                continue;
            }
            let branch = kraus_apply(input, &pattern)?;
            if !branch.is_empty() {
                mixed.push_merging(pattern, branch);
            }
        }
    }
    Ok(mixed)
}
