//! Error-correction conditions for amplitude damping.
//!
//! For every pair of patterns `k̃, k̃′` of weight at most `t` and codewords
//! `c_l`, `c_l′`:
//!
//! - orthogonality: `⟨c_l|A†_k̃ A_k̃′|c_l′⟩ = 0` unless `(l, k̃) = (l′, k̃′)`;
//! - non-deformation: `g_k̃ = ⟨c_l|A†_k̃ A_k̃|c_l⟩` is the same for every `l`.
//!
//! Both are checked exactly, as identities in `γ`. Two cheaper sufficient
//! conditions are offered as well: equality of weighted column moments (for
//! equal row sums) and a minimum-distance test (for nonnegative amplitudes).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{GammaPolynomial, Rational};
use crate::channel::{kraus_apply, patterns_up_to, ErrorPattern, PureState};
use crate::code::Code;
use crate::error::Result;
use crate::fock::l1_distance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    Orthogonality,
    Nondeformation,
    Moments,
    Distance,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Orthogonality => "orthogonality",
            CheckKind::Nondeformation => "nondeformation",
            CheckKind::Moments => "moments",
            CheckKind::Distance => "distance",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The check's hypotheses do not hold for this code.
    NotApplicable(String),
}

/// The offending value behind a violation.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// A value that should vanish.
    Nonzero(GammaPolynomial),
    /// A value that should match codeword 0's.
    Mismatch { reference: GammaPolynomial, found: GammaPolynomial },
    MomentMismatch { reference: Rational, found: Rational },
    /// A QCS pair closer than allowed.
    Distance { u: crate::fock::OccupationVector, v: crate::fock::OccupationVector, distance: Rational },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Nonzero(p) => write!(f, "value {p}"),
            Witness::Mismatch { reference, found } => write!(f, "{found} vs {reference}"),
            Witness::MomentMismatch { reference, found } => write!(f, "{found} vs {reference}"),
            Witness::Distance { u, v, distance } => write!(f, "D({u}, {v}) = {distance}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: CheckKind,
    pub codewords: Vec<usize>,
    pub patterns: Vec<ErrorPattern>,
    /// Column multiset (0-based) for moment violations.
    pub columns: Vec<usize>,
    pub witness: Witness,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: codewords {:?}", self.kind, self.codewords)?;
        if !self.patterns.is_empty() {
            let p: Vec<String> = self.patterns.iter().map(ToString::to_string).collect();
            write!(f, " patterns {}", p.join(" "))?;
        }
        if !self.columns.is_empty() {
            let c: Vec<String> = self.columns.iter().map(|j| (j + 1).to_string()).collect();
            write!(f, " columns {{{}}}", c.join(","))?;
        }
        write!(f, ": {}", self.witness)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaReport {
    pub check: CheckKind,
    pub t: u32,
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    /// `g_k̃` per pattern, filled by the non-deformation check when it passes.
    pub common_values: Vec<(ErrorPattern, GammaPolynomial)>,
    /// Smallest cross-codeword QCS distance, filled by the distance check.
    pub min_distance: Option<Rational>,
}

impl CriteriaReport {
    fn new(check: CheckKind, t: u32, violations: Vec<Violation>) -> Self {
        let verdict = if violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
        Self { check, t, verdict, violations, common_values: Vec::new(), min_distance: None }
    }

    fn not_applicable(check: CheckKind, t: u32, reason: impl Into<String>) -> Self {
        Self {
            check,
            t,
            verdict: Verdict::NotApplicable(reason.into()),
            violations: Vec::new(),
            common_values: Vec::new(),
            min_distance: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// `A_k̃|c_l⟩` for every codeword and every pattern of weight ≤ t.
#[derive(Clone, Debug)]
pub struct DamagedCodewords {
    pub patterns: Vec<ErrorPattern>,
    /// Indexed `[codeword][pattern]`.
    pub states: Vec<Vec<PureState>>,
}

pub fn damaged_codewords(code: &Code, t: u32) -> Result<DamagedCodewords> {
    let patterns = patterns_up_to(code.modes(), t);
    let states = code
        .codewords()
        .par_iter()
        .map(|c| {
            let psi = c.state()?;
            patterns.iter().map(|k| kraus_apply(&psi, k)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DamagedCodewords { patterns, states })
}

/// Checks that damaged codewords for distinct `(l, k̃)` are orthogonal.
pub fn check_orthogonality(code: &Code, t: u32) -> Result<CriteriaReport> {
    let damaged = damaged_codewords(code, t)?;
    Ok(orthogonality_from(&damaged, t))
}

fn orthogonality_from(damaged: &DamagedCodewords, t: u32) -> CriteriaReport {
    let np = damaged.patterns.len();
    let flat: Vec<(usize, usize)> =
        (0..damaged.states.len()).flat_map(|l| (0..np).map(move |k| (l, k))).collect();
    let pairs: Vec<(usize, usize)> =
        (0..flat.len()).flat_map(|i| (i + 1..flat.len()).map(move |j| (i, j))).collect();
    let violations = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (l1, k1) = flat[i];
            let (l2, k2) = flat[j];
            let a = &damaged.states[l1][k1];
            let b = &damaged.states[l2][k2];
            if a.disjoint_from(b) {
                return None;
            }
            let overlap = a.inner(b);
            if overlap.is_zero() {
                return None;
            }
            Some(Violation {
                kind: CheckKind::Orthogonality,
                codewords: vec![l1, l2],
                patterns: vec![damaged.patterns[k1].clone(), damaged.patterns[k2].clone()],
                columns: Vec::new(),
                witness: Witness::Nonzero(overlap),
            })
        })
        .collect();
    CriteriaReport::new(CheckKind::Orthogonality, t, violations)
}

/// Checks that `g_k̃` is the same polynomial for every codeword.
pub fn check_nondeformation(code: &Code, t: u32) -> Result<CriteriaReport> {
    let damaged = damaged_codewords(code, t)?;
    Ok(nondeformation_from(&damaged, t))
}

fn nondeformation_from(damaged: &DamagedCodewords, t: u32) -> CriteriaReport {
    let norms: Vec<Vec<GammaPolynomial>> = damaged
        .states
        .par_iter()
        .map(|row| row.iter().map(PureState::norm_sq).collect())
        .collect();
    let mut violations = Vec::new();
    for (k, pattern) in damaged.patterns.iter().enumerate() {
        let reference = &norms[0][k];
        for (l, row) in norms.iter().enumerate().skip(1) {
            if &row[k] != reference {
                violations.push(Violation {
                    kind: CheckKind::Nondeformation,
                    codewords: vec![0, l],
                    patterns: vec![pattern.clone()],
                    columns: Vec::new(),
                    witness: Witness::Mismatch { reference: reference.clone(), found: row[k].clone() },
                });
            }
        }
    }
    let mut report = CriteriaReport::new(CheckKind::Nondeformation, t, violations);
    if report.passed() {
        report.common_values =
            damaged.patterns.iter().cloned().zip(norms[0].iter().cloned()).collect();
    }
    report
}

/// Both defining conditions from a single set of damaged codewords.
pub fn check_code(code: &Code, t: u32) -> Result<(CriteriaReport, CriteriaReport)> {
    let damaged = damaged_codewords(code, t)?;
    let (orth, nondef) =
        rayon::join(|| orthogonality_from(&damaged, t), || nondeformation_from(&damaged, t));
    Ok((orth, nondef))
}

/// Non-decreasing column index sequences of length `size` over `m` columns.
pub fn column_multisets(m: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(m: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for j in start..m {
            cur.push(j);
            rec(m, size, j, cur, out);
            cur.pop();
        }
    }
    rec(m, size, 0, &mut cur, &mut out);
    out
}

/// `Σᵢ μᵢ Π_{j∈J} n_ij` for each codeword and each column multiset `J` with
/// `|J| ≤ t`. Columns are 0-based; the empty multiset comes first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTable {
    pub t: u32,
    pub multisets: Vec<Vec<usize>>,
    /// Indexed `[codeword][multiset]`.
    pub values: Vec<Vec<Rational>>,
}

impl MomentTable {
    pub fn value(&self, codeword: usize, columns: &[usize]) -> Option<&Rational> {
        let mut key = columns.to_vec();
        key.sort_unstable();
        let idx = self.multisets.iter().position(|j| *j == key)?;
        self.values.get(codeword).map(|row| &row[idx])
    }
}

pub fn moment_table(code: &Code, t: u32) -> MomentTable {
    let m = code.modes();
    let multisets: Vec<Vec<usize>> =
        (0..=t as usize).flat_map(|size| column_multisets(m, size)).collect();
    let values = code
        .codewords()
        .iter()
        .map(|c| {
            multisets
                .iter()
                .map(|cols| {
                    c.rows()
                        .iter()
                        .map(|r| {
                            let prod: BigInt = cols.iter().map(|&j| BigInt::from(r.qcs[j])).product();
                            &r.mu * Rational::from_integer(prod)
                        })
                        .fold(Rational::zero(), |acc, x| acc + x)
                })
                .collect()
        })
        .collect();
    MomentTable { t, multisets, values }
}

/// Sufficient condition: all column moments up to order `t` agree across
/// codewords. Requires equal row sums.
pub fn check_moments(code: &Code, t: u32) -> CriteriaReport {
    if !code.has_equal_row_sums() {
        return CriteriaReport::not_applicable(CheckKind::Moments, t, "row sums differ");
    }
    let table = moment_table(code, t);
    let mut violations = Vec::new();
    for (idx, cols) in table.multisets.iter().enumerate() {
        let reference = &table.values[0][idx];
        for (l, row) in table.values.iter().enumerate().skip(1) {
            if &row[idx] != reference {
                violations.push(Violation {
                    kind: CheckKind::Moments,
                    codewords: vec![0, l],
                    patterns: Vec::new(),
                    columns: cols.clone(),
                    witness: Witness::MomentMismatch { reference: reference.clone(), found: row[idx].clone() },
                });
            }
        }
    }
    CriteriaReport::new(CheckKind::Moments, t, violations)
}

/// Sufficient condition for orthogonality with nonnegative amplitudes: every
/// two distinct QCS in the code are more than `t` apart. Pairs inside one
/// codeword matter too, since `A_k̃|c⟩` and `A_k̃′|c⟩` must not overlap.
pub fn distance_check(code: &Code, t: u32) -> CriteriaReport {
    if code.has_negative_amplitudes() {
        return CriteriaReport::not_applicable(CheckKind::Distance, t, "negative amplitudes present");
    }
    let limit = 2 * t as u64;
    let mut violations = Vec::new();
    let words = code.codewords();
    for (l1, a) in words.iter().enumerate() {
        for (l2, b) in words.iter().enumerate().skip(l1) {
            for (i, u) in a.support().enumerate() {
                let skip = if l1 == l2 { i + 1 } else { 0 };
                for v in b.support().skip(skip) {
                    let d = l1_distance(u, v);
                    if d <= limit {
                        violations.push(Violation {
                            kind: CheckKind::Distance,
                            codewords: vec![l1, l2],
                            patterns: Vec::new(),
                            columns: Vec::new(),
                            witness: Witness::Distance {
                                u: u.clone(),
                                v: v.clone(),
                                distance: Rational::new(BigInt::from(d), BigInt::from(2)),
                            },
                        });
                    }
                }
            }
        }
    }
    let mut report = CriteriaReport::new(CheckKind::Distance, t, violations);
    report.min_distance = code.min_distance();
    report
}

/// All four checks at `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub t: u32,
    pub orthogonality: CriteriaReport,
    pub nondeformation: CriteriaReport,
    pub moments: CriteriaReport,
    pub distance: CriteriaReport,
}

impl Verification {
    pub fn reports(&self) -> [&CriteriaReport; 4] {
        [&self.orthogonality, &self.nondeformation, &self.moments, &self.distance]
    }

    /// The code corrects `t` losses.
    pub fn corrects(&self) -> bool {
        self.orthogonality.passed() && self.nondeformation.passed()
    }

    /// No check failed (inapplicable checks are ignored).
    pub fn passed(&self) -> bool {
        self.reports().iter().all(|r| !r.failed())
    }
}

pub fn verify(code: &Code, t: u32) -> Result<Verification> {
    let (orthogonality, nondeformation) = check_code(code, t)?;
    Ok(Verification {
        t,
        orthogonality,
        nondeformation,
        moments: check_moments(code, t),
        distance: distance_check(code, t),
    })
}

/// Floating-point cross-check at a fixed `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericVerification {
    pub gamma: f64,
    pub tolerance: f64,
    /// Largest `|⟨A_k̃ c_l | A_k̃′ c_l′⟩|` over distinct pairs.
    pub max_overlap: f64,
    /// Largest `|g_k̃(l) − g_k̃(0)|` over patterns and codewords.
    pub max_norm_spread: f64,
}

impl NumericVerification {
    pub fn passed(&self) -> bool {
        self.max_overlap <= self.tolerance && self.max_norm_spread <= self.tolerance
    }
}

pub fn verify_numeric(code: &Code, t: u32, gamma: f64, tolerance: f64) -> Result<NumericVerification> {
    let damaged = damaged_codewords(code, t)?;
    let flat: Vec<&PureState> = damaged.states.iter().flatten().collect();
    let max_overlap = (0..flat.len())
        .into_par_iter()
        .map(|i| {
            flat[i + 1..]
                .iter()
                .filter(|b| !flat[i].disjoint_from(b))
                .map(|b| flat[i].inner(b).eval_f64(gamma).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let mut max_norm_spread: f64 = 0.0;
    for k in 0..damaged.patterns.len() {
        let g0 = damaged.states[0][k].norm_sq().eval_f64(gamma);
        for row in &damaged.states[1..] {
            max_norm_spread = max_norm_spread.max((row[k].norm_sq().eval_f64(gamma) - g0).abs());
        }
    }
    Ok(NumericVerification { gamma, tolerance, max_overlap, max_norm_spread })
}

/// `Σ_{k̃∈K(s)} Πⱼ C(n_j, k_j)` for one QCS; equals `C(Σ n_j, s)`.
pub fn pattern_multiplicity_sum(qcs: &crate::fock::OccupationVector, s: u32) -> num_bigint::BigUint {
    crate::channel::enumerate_error_patterns(qcs.modes(), s)
        .iter()
        .map(|k| {
            qcs.occupations()
                .iter()
                .zip(k.losses())
                .map(|(&n, &kj)| crate::algebra::binomial(n as u64, kj as u64))
                .fold(num_bigint::BigUint::one(), |acc, c| acc * c)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{integer, rational};
    use crate::code::{Codeword, Row, Sign};
    use crate::fock::OccupationVector;

    fn ov<const M: usize>(v: [u32; M]) -> OccupationVector {
        v.into()
    }

    fn uniform(words: &[&[&[u32]]]) -> Code {
        let cws = words
            .iter()
            .enumerate()
            .map(|(i, rows)| Codeword::uniform(i, rows.iter().map(|r| OccupationVector::new(r.to_vec()))).unwrap())
            .collect();
        Code::new("test", 1, cws).unwrap()
    }

    fn example1() -> Code {
        uniform(&[&[&[4, 0], &[0, 4]], &[&[2, 2]]])
    }

    fn example9() -> Code {
        let c0 = Codeword::new(
            0,
            vec![
                Row::new(rational(1, 8), Sign::Plus, [0, 16]),
                Row::new(rational(1, 8), Sign::Plus, [16, 0]),
                Row::new(rational(6, 8), Sign::Plus, [8, 8]),
            ],
        )
        .unwrap();
        let c1 = Codeword::uniform(1, [ov([4, 12]), ov([12, 4])]).unwrap();
        Code::new("ex9", 3, vec![c0, c1]).unwrap()
    }

    #[test]
    fn example1_passes_at_t1() {
        let v = verify(&example1(), 1).unwrap();
        assert!(v.corrects() && v.passed());
        let g00 = &v.nondeformation.common_values[0];
        assert_eq!(g00.0, ErrorPattern::from([0, 0]));
        assert_eq!(g00.1, GammaPolynomial::integer_monomial(0, 4, integer(1)));
        assert_eq!(v.distance.min_distance, Some(integer(2)));
    }

    #[test]
    fn example1_fails_distance_at_t2() {
        let r = distance_check(&example1(), 2);
        assert!(r.failed());
        assert!(!verify(&example1(), 2).unwrap().corrects());
    }

    #[test]
    fn duplicated_codeword_is_not_orthogonal() {
        let code = uniform(&[&[&[1, 1]], &[&[1, 1]]]);
        let r = check_orthogonality(&code, 0).unwrap();
        assert!(r.failed());
        assert_eq!(r.violations[0].codewords, vec![0, 1]);
        assert_eq!(r.violations[0].witness, Witness::Nonzero(GammaPolynomial::integer_monomial(0, 2, integer(1))));
    }

    #[test]
    fn unequal_photon_numbers_deform() {
        let code = uniform(&[&[&[1, 1]], &[&[2, 2]]]);
        let r = check_nondeformation(&code, 0).unwrap();
        assert!(r.failed());
        let Witness::Mismatch { reference, found } = &r.violations[0].witness else { panic!() };
        assert_eq!(reference.expand().unwrap(), vec![integer(1), integer(-2), integer(1)]);
        assert_eq!(found.expand().unwrap().len(), 5);
        assert!(check_orthogonality(&code, 0).unwrap().passed());
        assert!(matches!(check_moments(&code, 0).verdict, Verdict::NotApplicable(_)));
    }

    #[test]
    fn moment_examples() {
        let table = moment_table(&example9(), 3);
        assert_eq!(table.value(0, &[0, 0, 0]), Some(&integer(896)));
        assert_eq!(table.value(1, &[0, 0, 0]), Some(&integer(896)));
        assert_eq!(table.value(0, &[]), Some(&integer(1)));
        assert!(check_moments(&example9(), 3).passed());
        assert!(check_moments(&example9(), 4).failed());

        let ex4 = uniform(&[&[&[3, 0, 6], &[0, 6, 3], &[6, 3, 0]], &[&[0, 3, 6], &[3, 6, 0], &[6, 0, 3]]]);
        let t4 = moment_table(&ex4, 2);
        assert_eq!(t4.value(0, &[0, 1]), Some(&integer(6)));
        assert_eq!(t4.value(1, &[1, 0]), Some(&integer(6)));
    }

    #[test]
    fn example6_moments() {
        let code = uniform(&[&[&[7, 0], &[1, 6]], &[&[5, 2], &[3, 4]]]);
        let r = check_moments(&code, 1);
        assert!(r.passed());
        let t = moment_table(&code, 1);
        assert_eq!(t.value(0, &[0]), Some(&integer(4)));
        assert_eq!(t.value(1, &[1]), Some(&integer(3)));
    }

    #[test]
    fn intra_codeword_overlap_is_caught() {
        // |20⟩+|11⟩ loses one photon onto |10⟩ from both rows.
        let code = uniform(&[&[&[2, 0], &[1, 1]]]);
        assert!(check_orthogonality(&code, 1).unwrap().failed());
        assert!(distance_check(&code, 1).failed());
    }

    #[test]
    fn signed_codes_skip_distance_test() {
        let c0 = Codeword::new(
            0,
            vec![Row::new(rational(1, 2), Sign::Plus, [1, 0]), Row::new(rational(1, 2), Sign::Minus, [0, 1])],
        )
        .unwrap();
        let code = Code::new("signed", 0, vec![c0]).unwrap();
        assert!(matches!(distance_check(&code, 0).verdict, Verdict::NotApplicable(_)));
    }

    #[test]
    fn numeric_agrees_with_exact() {
        let n = verify_numeric(&example1(), 1, 0.05, 1e-12).unwrap();
        assert!(n.passed());
        let bad = verify_numeric(&uniform(&[&[&[1, 1]], &[&[2, 2]]]), 0, 0.05, 1e-12).unwrap();
        assert!(!bad.passed());
    }

    #[test]
    fn multisets_count() {
        // C(m+s-1, s)
        assert_eq!(column_multisets(3, 2).len(), 6);
        assert_eq!(column_multisets(2, 3).len(), 4);
        assert_eq!(column_multisets(4, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn multiplicity_identity() {
        for q in [ov([4, 0]), ov([3, 2, 1]), ov([0, 5, 1, 2])] {
            for s in 0..=6 {
                assert_eq!(pattern_multiplicity_sum(&q, s), crate::algebra::binomial(q.row_sum() as u64, s as u64));
            }
        }
    }
}
