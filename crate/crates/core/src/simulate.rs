//! Recovery after damping and seeded Monte Carlo estimates of the fidelity.
//!
//! When the code satisfies both conditions at `t`, measuring which pattern
//! `k̃` occurred (weight ≤ `t`) projects onto `span{A_k̃|c_l⟩}`, and
//! `⟨c_l|A†_k̃ A_k̃|c_l′⟩ = g_k̃ δ_ll′` lets a unitary map `A_k̃|c_l⟩/√g_k̃`
//! back to `|c_l⟩` for every `l` at once. A shot therefore succeeds exactly
//! when the realized loss pattern has weight at most `t`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{GammaPolynomial, RadicalSum, Rational};
use crate::channel::{enumerate_error_patterns, kraus_apply, ErrorPattern, PureState};
use crate::code::Code;
use crate::criteria::{check_code, damaged_codewords};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Syndrome {
    pub pattern: ErrorPattern,
    /// `A_k̃|c_l⟩` per codeword, unnormalized; dividing by `√norm` gives the
    /// states the recovery maps back to `|c_l⟩`.
    pub damaged: Vec<PureState>,
    /// `g_k̃`, common to all codewords.
    pub norm: GammaPolynomial,
}

#[derive(Clone, Debug)]
pub struct RecoveryMap {
    pub t: u32,
    pub syndromes: Vec<Syndrome>,
}

impl RecoveryMap {
    pub fn syndrome(&self, pattern: &ErrorPattern) -> Option<&Syndrome> {
        self.syndromes.iter().find(|s| &s.pattern == pattern)
    }

    /// Logical coefficients recovered from a damaged branch, scaled by
    /// `g_k̃`: the components `⟨A_k̃ c_l | branch⟩`. For the branch
    /// `A_k̃ Σ a_l|c_l⟩` this is `g_k̃ · (a_l)`.
    pub fn recover(&self, pattern: &ErrorPattern, branch: &PureState) -> Option<Vec<GammaPolynomial>> {
        let syndrome = self.syndrome(pattern)?;
        Some(syndrome.damaged.iter().map(|d| d.inner(branch)).collect())
    }

    /// `Σ_k̃ g_k̃`, the probability that recovery succeeds.
    pub fn success_polynomial(&self) -> GammaPolynomial {
        let mut acc = GammaPolynomial::zero();
        for s in &self.syndromes {
            acc += &s.norm;
        }
        acc
    }
}

/// Syndrome table for every pattern of weight ≤ `t`. Fails when the code
/// does not satisfy both conditions.
pub fn build_recovery(code: &Code, t: u32) -> Result<RecoveryMap> {
    let (orth, nondef) = check_code(code, t)?;
    if let Some(v) = orth.violations.first().or(nondef.violations.first()) {
        return Err(Error::CriteriaViolated(v.to_string()));
    }
    let damaged = damaged_codewords(code, t)?;
    let syndromes = damaged
        .patterns
        .iter()
        .enumerate()
        .zip(nondef.common_values)
        .map(|((k, pattern), (_, norm))| Syndrome {
            pattern: pattern.clone(),
            damaged: damaged.states.iter().map(|row| row[k].clone()).collect(),
            norm,
        })
        .collect();
    Ok(RecoveryMap { t, syndromes })
}

/// Probability that at most `t` photons are lost from an encoded state,
/// which is the same for every logical input.
pub fn exact_success_probability(code: &Code, t: u32, gamma: &Rational) -> Result<Rational> {
    build_recovery(code, t)?.success_polynomial().eval(gamma)
}

/// `Σ_l a_l |c_l⟩`. The coefficients must satisfy `Σ a_l² = 1`.
pub fn encode(code: &Code, coeffs: &[RadicalSum]) -> Result<PureState> {
    let words = code.codewords();
    if coeffs.len() != words.len() {
        return Err(Error::InvalidParameter(format!(
            "{} coefficients for {} codewords",
            coeffs.len(),
            words.len()
        )));
    }
    let norm: RadicalSum = coeffs.iter().fold(RadicalSum::zero(), |acc, a| &acc + &(a * a));
    if !norm.is_one() {
        return Err(Error::NotNormalized(norm.to_string()));
    }
    let mut psi = PureState::new();
    for (a, c) in coeffs.iter().zip(words) {
        if a.is_zero() {
            continue;
        }
        for (q, amp) in c.state()?.terms() {
            psi.add(q.clone(), amp * &GammaPolynomial::constant(a.clone()));
        }
    }
    Ok(psi)
}

/// `‖A_k̃|ψ⟩‖²` for every pattern that can occur, in order of weight.
pub fn branch_probabilities(psi: &PureState) -> Result<Vec<(ErrorPattern, GammaPolynomial)>> {
    let Some(m) = psi.modes() else {
        return Ok(Vec::new());
    };
    let max = psi.support().map(|q| q.row_sum()).max().unwrap_or(0);
    let patterns: Vec<ErrorPattern> = (0..=max).flat_map(|s| enumerate_error_patterns(m, s)).collect();
    patterns
        .into_par_iter()
        .map(|k| {
            let branch = kraus_apply(psi, &k)?;
            Ok((k, branch.norm_sq()))
        })
        .filter(|r: &Result<(ErrorPattern, GammaPolynomial)>| r.as_ref().map_or(true, |(_, p)| !p.is_structurally_zero()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    pub shots: u64,
    pub successes: u64,
    pub estimated_fidelity: f64,
    pub exact_fidelity: Rational,
    pub seed: u64,
}

impl SimulationResult {
    pub fn sigma(&self) -> f64 {
        let f = crate::algebra::rational_to_f64(&self.exact_fidelity);
        (f * (1.0 - f) / self.shots as f64).sqrt()
    }

    /// `(estimate − exact) / σ`, zero when both agree and `σ = 0`.
    pub fn z_score(&self) -> f64 {
        let diff = self.estimated_fidelity - crate::algebra::rational_to_f64(&self.exact_fidelity);
        let sigma = self.sigma();
        if sigma == 0.0 {
            if diff == 0.0 { 0.0 } else { f64::INFINITY.copysign(diff) }
        } else {
            diff / sigma
        }
    }
}

/// Samples loss patterns of the encoded input from their exact distribution
/// at `gamma` and counts shots with at most `t` losses.
///
/// Shot `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so the result
/// does not depend on how shots are scheduled across threads.
pub fn run_monte_carlo(
    code: &Code,
    t: u32,
    coeffs: &[RadicalSum],
    gamma: &Rational,
    shots: u64,
    seed: u64,
) -> Result<SimulationResult> {
    crate::algebra::check_gamma(gamma)?;
    let recovery = build_recovery(code, t)?;
    let exact_fidelity = recovery.success_polynomial().eval(gamma)?;
    let psi = encode(code, coeffs)?;
    let probs = branch_probabilities(&psi)?;

    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for (_, p) in &probs {
        acc += p.eval_radical(gamma)?.to_f64().max(0.0);
        cumulative.push(acc);
    }
    let weights: Vec<u32> = probs.iter().map(|(k, _)| k.weight()).collect();
    let total = acc;

    let base = ChaCha8Rng::seed_from_u64(seed);
    let successes = (0..shots)
        .into_par_iter()
        .map_init(
            || base.clone(),
            |rng, shot| {
                rng.set_stream(shot);
                rng.set_word_pos(0);
                let u: f64 = rng.random::<f64>() * total;
                let idx = cumulative.partition_point(|&c| c <= u).min(weights.len() - 1);
                u64::from(weights[idx] <= t)
            },
        )
        .sum::<u64>();

    Ok(SimulationResult {
        shots,
        successes,
        estimated_fidelity: if shots == 0 { 0.0 } else { successes as f64 / shots as f64 },
        exact_fidelity,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{integer, rational};
    use crate::code::Codeword;
    use crate::fock::OccupationVector;
    use crate::metrics::fidelity_poly;

    fn ov<const M: usize>(v: [u32; M]) -> OccupationVector {
        v.into()
    }

    fn example1() -> Code {
        let c0 = Codeword::uniform(0, [ov([4, 0]), ov([0, 4])]).unwrap();
        let c1 = Codeword::uniform(1, [ov([2, 2])]).unwrap();
        Code::new("ex1", 1, vec![c0, c1]).unwrap()
    }

    fn r(n: i64, d: i64) -> RadicalSum {
        RadicalSum::from_rational(rational(n, d))
    }

    #[test]
    fn example1_syndromes() {
        let rec = build_recovery(&example1(), 1).unwrap();
        let pats: Vec<_> = rec.syndromes.iter().map(|s| s.pattern.clone()).collect();
        assert_eq!(pats, vec![ErrorPattern::from([0, 0]), ErrorPattern::from([0, 1]), ErrorPattern::from([1, 0])]);
        assert_eq!(rec.success_polynomial(), fidelity_poly(4, 1).unwrap().polynomial);
    }

    #[test]
    fn deforming_code_has_no_recovery() {
        let c0 = Codeword::uniform(0, [ov([1, 1])]).unwrap();
        let c1 = Codeword::uniform(1, [ov([2, 2])]).unwrap();
        let code = Code::new("bad", 0, vec![c0, c1]).unwrap();
        assert!(matches!(build_recovery(&code, 0), Err(Error::CriteriaViolated(_))));
    }

    #[test]
    fn success_probability_examples() {
        let code = example1();
        assert_eq!(exact_success_probability(&code, 1, &rational(1, 20)).unwrap(), rational(98_598_125, 100_000_000));
        assert_eq!(exact_success_probability(&code, 1, &integer(0)).unwrap(), integer(1));
    }

    #[test]
    fn recovery_restores_coefficients() {
        let code = example1();
        let rec = build_recovery(&code, 1).unwrap();
        let coeffs = [r(3, 5), r(4, 5)];
        let psi = encode(&code, &coeffs).unwrap();
        for s in &rec.syndromes {
            let branch = kraus_apply(&psi, &s.pattern).unwrap();
            let got = rec.recover(&s.pattern, &branch).unwrap();
            for (g, a) in got.iter().zip(&coeffs) {
                assert_eq!(*g, &s.norm * &GammaPolynomial::constant(a.clone()));
            }
        }
    }

    #[test]
    fn syndrome_probabilities_ignore_input() {
        let code = example1();
        let half = RadicalSum::sqrt(&rational(1, 2)).unwrap();
        let a = branch_probabilities(&encode(&code, &[half.clone(), half]).unwrap()).unwrap();
        let b = branch_probabilities(&encode(&code, &[r(1, 1), r(0, 1)]).unwrap()).unwrap();
        let low = |v: &[(ErrorPattern, GammaPolynomial)]| -> Vec<(ErrorPattern, GammaPolynomial)> {
            v.iter().filter(|(k, _)| k.weight() <= 1).cloned().collect()
        };
        assert_eq!(low(&a), low(&b));
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        assert!(matches!(encode(&example1(), &[r(1, 1), r(1, 1)]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn no_loss_means_every_shot_succeeds() {
        let res = run_monte_carlo(&example1(), 1, &[r(1, 1), r(0, 1)], &integer(0), 1000, 7).unwrap();
        assert_eq!(res.successes, 1000);
        assert_eq!(res.estimated_fidelity, 1.0);
        assert_eq!(res.z_score(), 0.0);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let code = example1();
        let run = |seed| run_monte_carlo(&code, 1, &[r(1, 1), r(0, 1)], &rational(1, 10), 20_000, seed).unwrap();
        assert_eq!(run(3), run(3));
        assert_ne!(run(3).successes, run(4).successes);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        assert_eq!(pool.install(|| run(3)), run(3));
    }
}
