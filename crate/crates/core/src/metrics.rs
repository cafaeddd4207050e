//! Rates, fidelities, and the optimal number of correctable losses.

use num_bigint::{BigInt, BigUint};

use crate::algebra::{binomial, GammaPolynomial, Rational};
use crate::code::Code;
use crate::error::{Error, Result};
use crate::fock::partition_count;

#[derive(Clone, Debug, PartialEq)]
pub struct RateResult {
    /// Encoded qubits, `log₂` of the codeword count.
    pub k: f64,
    /// `m · log₂(N + 1)`.
    pub denominator: f64,
    pub rate: f64,
}

/// `r = log₂(#codewords) / (m · log₂(N + 1))`.
pub fn rate(code: &Code) -> RateResult {
    let k = (code.codewords().len() as f64).log2();
    let denominator = code.modes() as f64 * (f64::from(code.total_photons()) + 1.0).log2();
    let rate = if denominator > 0.0 { k / denominator } else { 0.0 };
    RateResult { k, denominator, rate }
}

/// `P(n, m) / m`, the orbit count when every orbit has full size.
pub fn codeword_count_estimate(n: u64, m: u64) -> Result<Rational> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    Ok(Rational::new(BigInt::from(partition_count(n, m)), BigInt::from(m)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityResult {
    pub n: u32,
    pub t: u32,
    /// `Σ_{s=0}^{t} C(N,s) γ^s (1−γ)^(N−s)`.
    pub polynomial: GammaPolynomial,
    /// Expanded coefficients of `γ⁰, γ¹, …`.
    pub coefficients: Vec<Rational>,
    /// `C(N, t+1)`: `F = 1 − C(N,t+1) γ^(t+1) + O(γ^(t+2))`.
    pub leading_deficit: BigUint,
}

/// Probability that at most `t` of `N` photons are lost.
pub fn fidelity_poly(n: u32, t: u32) -> Result<FidelityResult> {
    if t >= n {
        return Err(Error::InvalidParameter(format!("t = {t} must be below N = {n}")));
    }
    let mut polynomial = GammaPolynomial::zero();
    for s in 0..=t {
        let c = Rational::from_integer(BigInt::from(binomial(u64::from(n), u64::from(s))));
        polynomial += &GammaPolynomial::integer_monomial(s, n - s, c);
    }
    let coefficients = polynomial.expand()?;
    Ok(FidelityResult {
        n,
        t,
        polynomial,
        coefficients,
        leading_deficit: binomial(u64::from(n), u64::from(t) + 1),
    })
}

/// Same sum as [`fidelity_poly`], in floating point, for large `N`.
pub fn fidelity_f64(n: u64, t: u64, gamma: f64) -> f64 {
    if gamma <= 0.0 {
        return 1.0;
    }
    if gamma >= 1.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    // Binomial pmf in log space to stay finite for large N.
    let ln_q = (1.0 - gamma).ln();
    let ratio = (gamma / (1.0 - gamma)).ln();
    let mut ln_p = n as f64 * ln_q;
    let mut total = 0.0;
    for s in 0..=t.min(n) {
        total += ln_p.exp();
        ln_p += ((n - s) as f64).ln() - ((s + 1) as f64).ln() + ratio;
    }
    total.min(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalT {
    /// `(e^(−α) / (γ f l_o))^(1/(α−1))`.
    pub estimate: f64,
    /// `(t, N = round(f·l_o·t^α), F)` for the integers around the estimate.
    pub neighbors: Vec<(u32, u64, f64)>,
}

/// Closed-form optimum when the photon count needed to correct `t` losses
/// grows like `N ≈ f·l_o·t^α`.
pub fn optimal_t(gamma: f64, f: f64, alpha: f64, l_o: f64) -> Result<OptimalT> {
    if alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed 1")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::GammaOutOfRange(gamma.to_string()));
    }
    if f <= 0.0 || l_o < 1.0 {
        return Err(Error::InvalidParameter("f must be positive and l_o at least 1".into()));
    }
    let estimate = ((-alpha).exp() / (gamma * f * l_o)).powf(1.0 / (alpha - 1.0));
    let lo = estimate.floor().max(1.0) as u32;
    let neighbors = [lo.saturating_sub(1).max(1), lo, lo + 1, lo + 2]
        .into_iter()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|t| {
            let n = (f * l_o * f64::from(t).powf(alpha)).round().max(1.0) as u64;
            (t, n, fidelity_f64(n, u64::from(t), gamma))
        })
        .collect();
    Ok(OptimalT { estimate, neighbors })
}
