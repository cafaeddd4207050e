use std::collections::BTreeSet;

use boscode_core::algebra::{integer, rational};
use boscode_core::catalog::catalog;
use boscode_core::channel::{kraus_apply, ErrorPattern};
use boscode_core::construct::{build_t1_family, build_t2_pair, solve_unbalanced_weights, WeightStatus};
use boscode_core::criteria::{
    check_moments, check_nondeformation, check_orthogonality, moment_table, distance_check, verify, Witness,
};
use boscode_core::fock::{cyclic_orbit, enumerate_qcs};
use boscode_core::metrics::{fidelity_poly, rate};
use boscode_core::simulate::{branch_probabilities, build_recovery, encode, exact_success_probability, run_monte_carlo};
use boscode_core::{Code, Codeword, GammaPolynomial, OccupationVector, RadicalSum, Rational, Row, Sign};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn catalog_codes() -> Vec<Code> {
    catalog().into_iter().filter_map(|e| e.code().ok()).collect()
}

/// Codes built from a random selection of cyclic orbits at a random scale.
fn random_orbit_codes(count: usize, seed: u64) -> Vec<Code> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let m = rng.random_range(2..=4usize);
        let n = rng.random_range(1..=5u32);
        let d = rng.random_range(1..=3u32);
        let orbits = enumerate_qcs(n, m).orbits();
        let chosen: Vec<_> = orbits.into_iter().filter(|_| rng.random_bool(0.6)).collect();
        if chosen.len() < 2 {
            continue;
        }
        let words = chosen
            .iter()
            .enumerate()
            .map(|(i, o)| Codeword::uniform(i, o.iter().map(|x| x.scale(d))).unwrap())
            .collect();
        out.push(Code::new(format!("random-{}", out.len()), 1, words).unwrap());
    }
    out
}

#[test]
fn distance_test_implies_orthogonality() {
    let mut codes = catalog_codes();
    codes.extend(random_orbit_codes(30, 1));
    for x in enumerate_qcs(4, 3).members.iter().chain(&enumerate_qcs(3, 4).members) {
        if let Ok(pair) = build_t2_pair(x, 3) {
            codes.push(pair.code);
        }
    }
    let mut exercised = 0;
    for code in &codes {
        for t in 0..=3 {
            if distance_check(code, t).passed() {
                exercised += 1;
                assert!(check_orthogonality(code, t).unwrap().passed(), "{} t={t}", code.name);
            }
        }
    }
    assert!(exercised > 50);
}

#[test]
fn equal_moments_imply_nondeformation() {
    let mut codes = catalog_codes();
    codes.extend(random_orbit_codes(50, 2));
    let mut exercised = 0;
    for code in codes.iter().filter(|c| c.has_equal_row_sums()) {
        for t in 0..=3 {
            let moments = check_moments(code, t);
            let nondef = check_nondeformation(code, t).unwrap();
            if moments.passed() {
                exercised += 1;
                assert!(nondef.passed(), "{} t={t}", code.name);
            }
            // With one row sum the two are in fact equivalent.
            assert_eq!(moments.passed(), nondef.passed(), "{} t={t}", code.name);
        }
    }
    assert!(exercised > 50);
}

#[test]
fn second_order_witnesses_match_column_pair_sums() {
    // A one-loss code checked at t = 2 violates non-deformation only through
    // second moments; each witness must equal γ²(1−γ)^(N−2) times the moment
    // Σ μ n_j1 n_j2 (or Σ μ C(n_j, 2) for a repeated column).
    let mut seen = 0;
    for id in [2u32, 3, 6] {
        let code = boscode_core::catalog_entry(id).unwrap().code().unwrap();
        let n = code.total_photons();
        let report = check_nondeformation(&code, 2).unwrap();
        assert!(report.failed(), "example {id}");
        for v in report.violations.iter().filter(|v| v.patterns[0].weight() == 2) {
            let k = v.patterns[0].losses();
            let cols: Vec<usize> = (0..k.len()).flat_map(|j| std::iter::repeat_n(j, k[j] as usize)).collect();
            let expected = |l: usize| -> GammaPolynomial {
                let c = &code.codewords()[l];
                let sum: Rational = c
                    .rows()
                    .iter()
                    .map(|r| {
                        let (a, b) = (r.qcs[cols[0]] as i64, r.qcs[cols[1]] as i64);
                        let prod = if cols[0] == cols[1] { a * (a - 1) / 2 } else { a * b };
                        &r.mu * integer(prod)
                    })
                    .sum();
                GammaPolynomial::integer_monomial(2, n - 2, sum)
            };
            let Witness::Mismatch { reference, found } = &v.witness else { panic!("wrong witness kind") };
            assert_eq!(reference, &expected(v.codewords[0]));
            assert_eq!(found, &expected(v.codewords[1]));
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn common_values_have_closed_form() {
    for code in catalog_codes().iter().filter(|c| c.has_equal_row_sums()) {
        let n = code.total_photons();
        let Ok(report) = check_nondeformation(code, code.design_t) else { continue };
        if !report.passed() {
            continue;
        }
        let c0 = &code.codewords()[0];
        for (k, g) in &report.common_values {
            let s = k.weight();
            let constant: Rational = c0
                .rows()
                .iter()
                .map(|r| {
                    let mult: num_bigint::BigUint = r
                        .qcs
                        .occupations()
                        .iter()
                        .zip(k.losses())
                        .map(|(&nj, &kj)| boscode_core::algebra::binomial(nj.into(), kj.into()))
                        .product();
                    &r.mu * Rational::from_integer(BigInt::from(mult))
                })
                .sum();
            assert_eq!(g, &GammaPolynomial::integer_monomial(s, n - s, constant), "{} {k}", code.name);
        }
    }
}

#[test]
fn recovered_success_matches_fidelity_polynomial() {
    for code in catalog_codes() {
        let Ok(recovery) = build_recovery(&code, code.design_t) else {
            assert_eq!(code.name, "example-10", "only the unrepaired entry lacks a recovery");
            continue;
        };
        let f = fidelity_poly(code.total_photons(), code.design_t).unwrap();
        assert_eq!(recovery.success_polynomial(), f.polynomial, "{}", code.name);
        let gamma = rational(1, 20);
        assert_eq!(
            exact_success_probability(&code, code.design_t, &gamma).unwrap(),
            f.polynomial.eval(&gamma).unwrap()
        );
    }
}

#[test]
fn recovery_is_proportional_on_every_syndrome() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for code in catalog_codes().into_iter().filter(|c| c.codewords().len() == 2 && c.total_photons() <= 16) {
        let Ok(recovery) = build_recovery(&code, code.design_t) else { continue };
        let p = rng.random_range(1..20i64);
        let coeffs = [RadicalSum::sqrt(&rational(p, 20)).unwrap(), -RadicalSum::sqrt(&rational(20 - p, 20)).unwrap()];
        let psi = encode(&code, &coeffs).unwrap();
        for s in &recovery.syndromes {
            let branch = kraus_apply(&psi, &s.pattern).unwrap();
            let got = recovery.recover(&s.pattern, &branch).unwrap();
            for (g, a) in got.iter().zip(&coeffs) {
                assert_eq!(*g, &s.norm * &GammaPolynomial::constant(a.clone()), "{} {}", code.name, s.pattern);
            }
        }
    }
}

#[test]
fn syndrome_statistics_do_not_depend_on_the_input() {
    let code = boscode_core::catalog_entry(4).unwrap().code().unwrap();
    let t = code.design_t;
    let low = |coeffs: &[RadicalSum]| -> Vec<(ErrorPattern, GammaPolynomial)> {
        branch_probabilities(&encode(&code, coeffs).unwrap())
            .unwrap()
            .into_iter()
            .filter(|(k, _)| k.weight() <= t)
            .collect()
    };
    let reference = low(&[RadicalSum::one(), RadicalSum::zero()]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = rng.random_range(0..=100i64);
        let sign = if rng.random_bool(0.5) { 1 } else { -1 };
        let a = RadicalSum::sqrt(&rational(p, 100)).unwrap();
        let b = RadicalSum::sqrt(&rational(100 - p, 100)).unwrap().scale(&integer(sign));
        assert_eq!(low(&[a, b]), reference);
    }
}

#[test]
fn monte_carlo_estimates_cover_the_exact_value() {
    let code = boscode_core::catalog_entry(1).unwrap().code().unwrap();
    let coeffs = [RadicalSum::sqrt(&rational(1, 2)).unwrap(), RadicalSum::sqrt(&rational(1, 2)).unwrap()];
    let gamma = rational(1, 20);
    let inside = (0..30u64)
        .filter(|&seed| {
            let r = run_monte_carlo(&code, 1, &coeffs, &gamma, 20_000, 1000 + seed).unwrap();
            r.z_score().abs() <= 2.576
        })
        .count();
    assert!(inside >= 27, "{inside}/30 within the 99% band");
}

#[test]
fn rate_ignores_signs_and_row_order() {
    for code in catalog_codes() {
        let flipped: Vec<Codeword> = code
            .codewords()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut rows: Vec<Row> = c.rows().to_vec();
                rows.reverse();
                if let Some(r) = rows.first_mut() {
                    r.sign = Sign::Minus;
                }
                Codeword::new(i, rows).unwrap()
            })
            .collect();
        let other = Code::new("flipped", code.design_t, flipped).unwrap();
        assert_eq!(rate(&code), rate(&other));
    }
}

#[test]
fn solver_outputs_satisfy_nondeformation() {
    let cases: Vec<(Vec<Vec<OccupationVector>>, u32)> = vec![
        (vec![vec![[9, 0].into(), [3, 6].into()], vec![[0, 9].into(), [6, 3].into()]], 2),
        (
            vec![vec![[0, 16].into(), [16, 0].into(), [8, 8].into()], vec![[4, 12].into(), [12, 4].into()]],
            3,
        ),
        (boscode_core::catalog_entry(11).unwrap().supports(), 4),
        (boscode_core::catalog_entry(8).unwrap().supports(), 2),
    ];
    for (supports, t) in cases {
        let res = solve_unbalanced_weights(&supports, t).unwrap();
        assert_ne!(res.status, WeightStatus::Infeasible);
        let code = res.to_code(&supports, "solved", t).unwrap();
        assert!(check_nondeformation(&code, t).unwrap().passed());
        assert!(verify(&code, t).unwrap().corrects());
    }
}

#[test]
fn orbit_families_correct_one_loss() {
    for n in 0..=6 {
        for m in 1..=4 {
            let family = build_t1_family(n, m, 2).unwrap();
            let v = verify(&family.code, 1).unwrap();
            assert!(v.corrects(), "n={n} m={m}");
            for c in family.code.codewords() {
                let p = c.rows().len() as i64;
                assert!(c.rows().iter().all(|r| r.mu == rational(1, p) && r.qcs.row_sum() == 2 * n));
            }
        }
    }
}

#[test]
fn orbit_families_reach_t_equal_d_minus_one_by_distance() {
    for (n, m, d) in [(2u32, 2usize, 3u32), (3, 3, 3), (2, 3, 4)] {
        let family = build_t1_family(n, m, d).unwrap();
        assert!(distance_check(&family.code, d - 1).passed(), "n={n} m={m} d={d}");
    }
}

#[test]
fn t2_pairs_pass_both_conditions() {
    for m in [3usize, 4] {
        for n in 1..=4 {
            for x in enumerate_qcs(n, m).members {
                let Ok(pair) = build_t2_pair(&x, 3) else { continue };
                assert!(verify(&pair.code, 2).unwrap().corrects(), "x = {x}");
                assert!(distance_check(&pair.code, 2).passed());
            }
        }
    }
}

#[test]
fn moment_table_is_complete() {
    let code = boscode_core::catalog_entry(5).unwrap().code().unwrap();
    let table = moment_table(&code, 3);
    // C(m + s − 1, s) multisets of each size s ≤ 3 on m = 4 columns.
    assert_eq!(table.multisets.len(), 1 + 4 + 10 + 20);
    let sets: BTreeSet<_> = table.multisets.iter().collect();
    assert_eq!(sets.len(), table.multisets.len());
    assert!(table.values.iter().all(|row| row.len() == table.multisets.len()));
}

#[test]
fn orbit_sizes_divide_mode_count() {
    for x in enumerate_qcs(6, 4).members {
        assert_eq!(4 % cyclic_orbit(&x).len(), 0);
    }
}
