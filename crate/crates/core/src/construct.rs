//! Code construction: equal-weight cyclic orbits, forward/reverse orbit pairs,
//! exact weight solving for unbalanced codes, and the counting bound on `N`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;
use crate::code::{Code, Codeword, Row, Sign};
use crate::criteria::column_multisets;
use crate::error::{Error, Result};
use crate::fock::{cyclic_orbit, enumerate_qcs, l1_distance, partition_count, OccupationVector};
use crate::linsolve::{maximize, solve_linear, LinearSolution, LpOutcome, SolutionSpace};

/// Largest denominator tried when looking for a simple positive weight vector.
pub const MAX_WEIGHT_DENOMINATOR: u64 = 10_000;

/// One equal-weight codeword per cyclic orbit of `Q(n, m)`, scaled by `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCodeFamily {
    pub n: u32,
    pub m: usize,
    pub d: u32,
    pub code: Code,
}

/// Codewords are the orbits of `Q(n, m)` in order of their smallest member,
/// each QCS multiplied by `d`, with weight `1/p` for an orbit of size `p`.
pub fn build_t1_family(n: u32, m: usize, d: u32) -> Result<OrbitCodeFamily> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d = {d}: correcting one loss needs d >= 2")));
    }
    let codewords = enumerate_qcs(n, m)
        .orbits()
        .into_iter()
        .enumerate()
        .map(|(i, orbit)| Codeword::uniform(i, orbit.iter().map(|x| x.scale(d))))
        .collect::<Result<Vec<_>>>()?;
    let code = Code::new(format!("t1-n{n}-m{m}-d{d}"), 1, codewords)?;
    Ok(OrbitCodeFamily { n, m, d, code })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T2Pair {
    pub code: Code,
    pub warnings: Vec<String>,
}

/// Two codewords: the cyclic shifts of `d·x` and of `d·reverse(x)`.
///
/// With `d ≥ 3` the pair corrects two losses. Smaller `d` is accepted with a
/// warning, and the design `t` drops to what the QCS distance guarantees.
pub fn build_t2_pair(x: &OccupationVector, d: u32) -> Result<T2Pair> {
    let m = x.modes();
    if m <= 2 {
        return Err(Error::InvalidParameter(format!("forward/reverse pairs need m > 2, got m = {m}")));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let forward = cyclic_orbit(x);
    let rev = x.reversed();
    if forward.contains(&rev) {
        return Err(Error::Palindrome(x.clone()));
    }
    let backward = cyclic_orbit(&rev);
    let c0 = Codeword::uniform(0, forward.iter().map(|q| q.scale(d)))?;
    let c1 = Codeword::uniform(1, backward.iter().map(|q| q.scale(d)))?;
    let mut code = Code::new(format!("t2-{}-d{d}", join(x.occupations())), 2, vec![c0, c1])?;
    let mut warnings = Vec::new();
    if d < 3 {
        let dist = code.min_distance().unwrap_or_else(Rational::zero);
        let guaranteed = (dist.to_integer() - BigInt::one()).max(BigInt::zero());
        let t = guaranteed.min(BigInt::from(2)).try_into().unwrap_or(0u32);
        code.design_t = t;
        warnings.push(format!("d = {d} < 3: design t lowered to {t} (minimum QCS distance {dist})"));
    }
    Ok(T2Pair { code, warnings })
}

fn join(v: &[u32]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightStatus {
    /// The constraints pin the weights down uniquely and they are positive.
    Solved,
    /// Several solutions exist; one with all weights positive was selected.
    UnderdeterminedResolved,
    Infeasible,
}

impl fmt::Display for WeightStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightStatus::Solved => "solved",
            WeightStatus::UnderdeterminedResolved => "underdetermined_resolved",
            WeightStatus::Infeasible => "infeasible",
        })
    }
}

/// One equation of the weight system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Moment of `codeword` over `columns` (0-based) equals codeword 0's.
    Moment { codeword: usize, columns: Vec<usize> },
    /// Weights of `codeword` sum to 1.
    Normalization { codeword: usize },
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Moment { codeword, columns } => {
                let c: Vec<String> = columns.iter().map(|j| (j + 1).to_string()).collect();
                write!(f, "moment {{{}}} of codeword {codeword} equals codeword 0", c.join(","))
            }
            Constraint::Normalization { codeword } => write!(f, "weights of codeword {codeword} sum to 1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSolveResult {
    pub status: WeightStatus,
    /// Per codeword, in support order. Empty when infeasible.
    pub weights: Vec<Vec<Rational>>,
    /// Rank of the constraint system.
    pub residual_constraints: usize,
    /// Equations that are jointly contradictory, when the linear system
    /// itself has no solution.
    pub failing_constraints: Vec<Constraint>,
    pub warnings: Vec<String>,
}

impl WeightSolveResult {
    pub fn to_code(&self, supports: &[Vec<OccupationVector>], name: &str, t: u32) -> Result<Code> {
        if self.status == WeightStatus::Infeasible {
            return Err(Error::InvalidParameter("weight system is infeasible".into()));
        }
        let codewords = supports
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(|(i, (qs, mus))| {
                let rows = qs.iter().zip(mus).map(|(q, mu)| Row::new(mu.clone(), Sign::Plus, q.clone())).collect();
                Codeword::new(i, rows)
            })
            .collect::<Result<Vec<_>>>()?;
        Code::new(name, t, codewords)
    }
}

/// Finds positive weights on fixed supports so that every column moment of
/// order ≤ `t` agrees across codewords and each codeword is normalized.
///
/// All QCS must share one row sum, which makes moment equality equivalent to
/// non-deformation. When the system has many solutions the free weights are
/// first set to zero; if that leaves a weight nonpositive, an exact linear
/// program finds the largest achievable minimum weight, and the free weights
/// of that point are rounded to the coarsest grid `k/D` (`D ≤ 10⁴`) that keeps
/// every weight positive.
pub fn solve_unbalanced_weights(supports: &[Vec<OccupationVector>], t: u32) -> Result<WeightSolveResult> {
    let first = supports.iter().flatten().next().ok_or(Error::EmptyCode)?;
    let m = first.modes();
    let rs = first.row_sum();
    for (i, s) in supports.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptyCodeword(i));
        }
        for q in s {
            if q.modes() != m {
                return Err(Error::LengthMismatch { left: m, right: q.modes() });
            }
            if q.row_sum() != rs {
                return Err(Error::InvalidParameter(format!(
                    "supports must share one row sum: {q} has {} photons, expected {rs}",
                    q.row_sum()
                )));
            }
        }
        let mut sorted = s.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQcs { codeword: i, qcs: w[0].clone() });
        }
    }

    let mut warnings = Vec::new();
    if let Some((u, v, d)) = closest_pair(supports) {
        if d <= 2 * t as u64 {
            warnings.push(format!(
                "QCS {u} and {v} are at distance {}, not more than t = {t}; orthogonality is not guaranteed",
                Rational::new(BigInt::from(d), BigInt::from(2))
            ));
        }
    }

    let offsets: Vec<usize> = supports
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.len();
            Some(o)
        })
        .collect();
    let unknowns = offsets.last().unwrap() + supports.last().unwrap().len();

    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    let mut labels: Vec<Constraint> = Vec::new();
    let moment = |q: &OccupationVector, cols: &[usize]| -> Rational {
        Rational::from_integer(cols.iter().map(|&j| BigInt::from(q[j])).product())
    };
    for size in 1..=t as usize {
        for cols in column_multisets(m, size) {
            for l in 1..supports.len() {
                let mut row = vec![Rational::zero(); unknowns];
                for (i, q) in supports[0].iter().enumerate() {
                    row[offsets[0] + i] = moment(q, &cols);
                }
                for (i, q) in supports[l].iter().enumerate() {
                    row[offsets[l] + i] = -moment(q, &cols);
                }
                a.push(row);
                b.push(Rational::zero());
                labels.push(Constraint::Moment { codeword: l, columns: cols.clone() });
            }
        }
    }
    for (l, s) in supports.iter().enumerate() {
        let mut row = vec![Rational::zero(); unknowns];
        for i in 0..s.len() {
            row[offsets[l] + i] = Rational::one();
        }
        a.push(row);
        b.push(Rational::one());
        labels.push(Constraint::Normalization { codeword: l });
    }

    let space = match solve_linear(&a, &b) {
        LinearSolution::Inconsistent { constraints } => {
            return Ok(WeightSolveResult {
                status: WeightStatus::Infeasible,
                weights: Vec::new(),
                residual_constraints: rank_of(&a),
                failing_constraints: constraints.into_iter().map(|i| labels[i].clone()).collect(),
                warnings,
            });
        }
        LinearSolution::Solved(space) => space,
    };
    let split = |mu: Vec<Rational>| -> Vec<Vec<Rational>> {
        supports.iter().zip(&offsets).map(|(s, &o)| mu[o..o + s.len()].to_vec()).collect()
    };
    let done = |status, mu: Vec<Rational>, warnings| WeightSolveResult {
        status,
        weights: split(mu),
        residual_constraints: space.rank,
        failing_constraints: Vec::new(),
        warnings,
    };

    if all_positive(&space.particular) {
        let status = if space.is_unique() { WeightStatus::Solved } else { WeightStatus::UnderdeterminedResolved };
        return Ok(done(status, space.particular.clone(), warnings));
    }
    if space.is_unique() {
        warnings.push("the unique solution has a nonpositive weight".into());
        return Ok(WeightSolveResult {
            status: WeightStatus::Infeasible,
            weights: Vec::new(),
            residual_constraints: space.rank,
            failing_constraints: Vec::new(),
            warnings,
        });
    }
    match max_min_weight(&a, &b, unknowns) {
        Some(best) => {
            let mu = round_free(&space, &best).unwrap_or(best);
            Ok(done(WeightStatus::UnderdeterminedResolved, mu, warnings))
        }
        None => {
            warnings.push("no solution has all weights positive".into());
            Ok(WeightSolveResult {
                status: WeightStatus::Infeasible,
                weights: Vec::new(),
                residual_constraints: space.rank,
                failing_constraints: Vec::new(),
                warnings,
            })
        }
    }
}

fn all_positive(x: &[Rational]) -> bool {
    x.iter().all(Signed::is_positive)
}

fn rank_of(a: &[Vec<Rational>]) -> usize {
    let zeros = vec![Rational::zero(); a.len()];
    match solve_linear(a, &zeros) {
        LinearSolution::Solved(s) => s.rank,
        LinearSolution::Inconsistent { .. } => unreachable!("homogeneous systems are consistent"),
    }
}

/// Maximizes `s` over `μ = s·1 + w`, `w ≥ 0`, `Aμ = b`. Returns `μ` when the
/// optimum is positive.
fn max_min_weight(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Option<Vec<Rational>> {
    let lifted: Vec<Vec<Rational>> = a
        .iter()
        .map(|row| {
            let mut r = Vec::with_capacity(n + 1);
            r.push(row.iter().sum());
            r.extend(row.iter().cloned());
            r
        })
        .collect();
    let mut c = vec![Rational::zero(); n + 1];
    c[0] = Rational::one();
    match maximize(&c, &lifted, b) {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            Some(x[1..].iter().map(|w| w + &x[0]).collect())
        }
        _ => None,
    }
}

fn round_free(space: &SolutionSpace, target: &[Rational]) -> Option<Vec<Rational>> {
    let z: Vec<&Rational> = space.free.iter().map(|&f| &target[f]).collect();
    (1..=MAX_WEIGHT_DENOMINATOR).find_map(|d| {
        let den = BigInt::from(d);
        let rounded: Vec<Rational> = z
            .iter()
            .map(|v| Rational::new((*v * Rational::from_integer(den.clone())).round().to_integer(), den.clone()))
            .collect();
        let mu = space.at(&rounded);
        all_positive(&mu).then_some(mu)
    })
}

fn closest_pair(supports: &[Vec<OccupationVector>]) -> Option<(OccupationVector, OccupationVector, u64)> {
    let all: Vec<&OccupationVector> = supports.iter().flatten().collect();
    let mut best: Option<(OccupationVector, OccupationVector, u64)> = None;
    for (i, u) in all.iter().enumerate() {
        for v in &all[i + 1..] {
            let d = l1_distance(u, v);
            if best.as_ref().is_none_or(|b| d < b.2) {
                best = Some(((*u).clone(), (*v).clone(), d));
            }
        }
    }
    best
}

/// Smallest `N`, a multiple of `t+1`, with
/// `1 + l_o + l_o·Σ_{s≤t} P(s, m) ≤ P(N/(t+1), m)`.
pub fn existence_min_n(l_o: u64, t: u32, m: u64) -> Result<u64> {
    if l_o == 0 || m == 0 {
        return Err(Error::InvalidParameter("l_o and m must be at least 1".into()));
    }
    if m == 1 {
        // P(q, 1) = 1 never reaches the requirement.
        return Err(Error::InvalidParameter("a single mode admits no such N".into()));
    }
    let lo = BigUint::from(l_o);
    let needed: BigUint = BigUint::one()
        + &lo
        + &lo * (0..=t as u64).map(|s| partition_count(s, m)).sum::<BigUint>();
    let step = t as u64 + 1;
    let mut q = 0u64;
    while partition_count(q, m) < needed {
        q += 1;
    }
    Ok(q * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::criteria::{check_moments, verify};
    use std::collections::BTreeSet;

    fn ov<const M: usize>(v: [u32; M]) -> OccupationVector {
        v.into()
    }

    fn supports(code: &Code) -> BTreeSet<BTreeSet<OccupationVector>> {
        code.codewords().iter().map(|c| c.support().cloned().collect()).collect()
    }

    fn set(words: &[&[OccupationVector]]) -> BTreeSet<BTreeSet<OccupationVector>> {
        words.iter().map(|w| w.iter().cloned().collect()).collect()
    }

    #[test]
    fn t1_family_reproduces_small_examples() {
        let f = build_t1_family(2, 2, 2).unwrap();
        assert_eq!(supports(&f.code), set(&[&[ov([4, 0]), ov([0, 4])], &[ov([2, 2])]]));
        let f = build_t1_family(3, 3, 2).unwrap();
        assert_eq!(
            supports(&f.code),
            set(&[
                &[ov([6, 0, 0]), ov([0, 6, 0]), ov([0, 0, 6])],
                &[ov([4, 2, 0]), ov([2, 0, 4]), ov([0, 4, 2])],
                &[ov([2, 4, 0]), ov([4, 0, 2]), ov([0, 2, 4])],
                &[ov([2, 2, 2])],
            ])
        );
        assert_eq!(build_t1_family(6, 3, 2).unwrap().code.codewords().len(), 10);
        assert!(build_t1_family(2, 2, 1).is_err());
    }

    #[test]
    fn t2_pair_examples() {
        let p = build_t2_pair(&ov([1, 0, 2]), 3).unwrap();
        assert!(p.warnings.is_empty());
        assert_eq!(p.code.design_t, 2);
        assert_eq!(
            supports(&p.code),
            set(&[&[ov([3, 0, 6]), ov([0, 6, 3]), ov([6, 3, 0])], &[ov([0, 3, 6]), ov([3, 6, 0]), ov([6, 0, 3])]])
        );
        let p = build_t2_pair(&ov([0, 1, 2, 3]), 1).unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.code.design_t, 1);
        assert!(verify(&p.code, 1).unwrap().corrects());
        assert!(matches!(build_t2_pair(&ov([1, 1, 1]), 3), Err(Error::Palindrome(_))));
        assert!(matches!(build_t2_pair(&ov([1, 2]), 3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn orbit_counts_for_coprime_n() {
        for (n, m) in [(1u32, 3usize), (2, 3), (4, 3), (5, 3), (1, 4), (3, 4), (5, 4), (7, 2)] {
            let count = build_t1_family(n, m, 2).unwrap().code.codewords().len();
            assert_eq!(BigUint::from(count * m), partition_count(n as u64, m as u64), "n={n} m={m}");
        }
    }

    #[test]
    fn t1_families_correct_one_loss() {
        for n in 0..=4 {
            for m in 1..=3 {
                let f = build_t1_family(n, m, 2).unwrap();
                let v = verify(&f.code, 1).unwrap();
                assert!(v.corrects() && v.passed(), "n={n} m={m}");
                assert!(check_moments(&f.code, 1).passed());
            }
        }
    }

    #[test]
    fn solver_recovers_example_weights() {
        let s7 = vec![vec![ov([9, 0]), ov([3, 6])], vec![ov([0, 9]), ov([6, 3])]];
        let r = solve_unbalanced_weights(&s7, 2).unwrap();
        assert_eq!(r.status, WeightStatus::Solved);
        assert_eq!(r.weights, vec![vec![rational(1, 4), rational(3, 4)]; 2]);

        let s9 = vec![vec![ov([0, 16]), ov([16, 0]), ov([8, 8])], vec![ov([4, 12]), ov([12, 4])]];
        let r = solve_unbalanced_weights(&s9, 3).unwrap();
        assert_eq!(r.status, WeightStatus::Solved);
        assert_eq!(
            r.weights,
            vec![vec![rational(1, 8), rational(1, 8), rational(3, 4)], vec![rational(1, 2), rational(1, 2)]]
        );
        let code = r.to_code(&s9, "ex9", 3).unwrap();
        assert!(verify(&code, 3).unwrap().corrects());
    }

    #[test]
    fn solver_reports_contradictions() {
        // Column 1 is 0 in one codeword and 4 in the other.
        let s = vec![vec![ov([0, 4])], vec![ov([4, 0])]];
        let r = solve_unbalanced_weights(&s, 1).unwrap();
        assert_eq!(r.status, WeightStatus::Infeasible);
        assert!(!r.failing_constraints.is_empty());
        assert!(r.failing_constraints.contains(&Constraint::Normalization { codeword: 0 }));
    }

    #[test]
    fn solver_resolves_underdetermined_systems() {
        // Three balanced-looking rows against one; one moment equation, two
        // normalizations, four unknowns.
        let s = vec![vec![ov([0, 6]), ov([6, 0]), ov([2, 4])], vec![ov([3, 3])]];
        let r = solve_unbalanced_weights(&s, 1).unwrap();
        assert_eq!(r.status, WeightStatus::UnderdeterminedResolved);
        let code = r.to_code(&s, "u", 1).unwrap();
        assert!(check_moments(&code, 1).passed());
        assert!(r.weights.iter().flatten().all(Signed::is_positive));
    }

    #[test]
    fn solver_rejects_mixed_row_sums() {
        let s = vec![vec![ov([0, 6])], vec![ov([3, 2])]];
        assert!(solve_unbalanced_weights(&s, 1).is_err());
    }

    #[test]
    fn existence_examples() {
        assert_eq!(existence_min_n(1, 1, 2).unwrap(), 8);
        assert_eq!(existence_min_n(1, 2, 2).unwrap(), 21);
        assert_eq!(existence_min_n(1, 0, 2).unwrap(), 2);
    }

    #[test]
    fn existence_tracks_cubic_scaling_for_larger_t() {
        // N ≈ t³·l_o/2 for m = 2; the ratio approaches the prediction from
        // above and is within a factor of 2 once t ≥ 6.
        let mut prev = f64::INFINITY;
        for t in 3..=10u32 {
            let n = existence_min_n(1, t, 2).unwrap() as f64;
            let ratio = n / (f64::from(t).powi(3) / 2.0);
            assert!(ratio < prev, "t={t}");
            if t >= 6 {
                assert!(ratio <= 2.0, "t={t} ratio={ratio}");
            }
            prev = ratio;
        }
    }
}
