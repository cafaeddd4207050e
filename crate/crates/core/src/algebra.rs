//! Exact scalars for amplitudes and probabilities.
//!
//! Three layers:
//!
//! - [`Rational`]: arbitrary-precision fractions, always in lowest terms.
//! - [`RadicalSum`]: finite sums `Σ c_k √k` with rational `c_k` and distinct
//!   squarefree kernels `k`. The squarefree basis makes the representation
//!   unique, so the zero test is structural.
//! - [`GammaPolynomial`]: sums of `c · γ^(a/2) · (1−γ)^(b/2)` with
//!   [`RadicalSum`] coefficients. Exponents are kept in half-powers so that
//!   Kraus amplitudes (`√γ`, `√(1−γ)`) and their squared norms live in the same
//!   type.
//!
//! The monomial form is not unique (`γ = γ(1−γ) + γ²`), so equality and the
//! zero test go through the expanded form: a polynomial in `γ` for each parity
//! class of the half-exponents. The four classes `1, √γ, √(1−γ), √(γ(1−γ))`
//! are linearly independent over polynomials in `γ`, so comparing class by
//! class is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use num_rational::BigRational as Rational;

/// Largest trial divisor used when splitting a radicand into square and
/// squarefree parts.
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Splits `n = root² · kernel` with `kernel` squarefree.
pub fn squarefree_split(n: &BigUint, bound: u64) -> Result<(BigUint, BigUint)> {
    if n.is_zero() {
        return Ok((BigUint::zero(), BigUint::one()));
    }
    if let Some(small) = n.to_u128() {
        return split_u128(small, bound).map(|(r, k)| (BigUint::from(r), BigUint::from(k)));
    }
    let mut rem = n.clone();
    let mut root = BigUint::one();
    let mut kernel = BigUint::one();
    let mut p: u64 = 2;
    loop {
        if let Some(small) = rem.to_u128() {
            let (r, k) = split_u128_from(small, p, bound).ok_or_else(|| Error::FactorBound {
                value: n.to_string(),
                bound,
            })?;
            return Ok((root * r, kernel * k));
        }
        if p > bound {
            // Nothing below the bound divides `rem`; a perfect square is still
            // recognizable without factoring.
            let s = rem.sqrt();
            if &s * &s == rem {
                return Ok((root * s, kernel));
            }
            return Err(Error::FactorBound { value: n.to_string(), bound });
        }
        let mut e = 0u32;
        while (&rem % p).is_zero() {
            rem /= p;
            e += 1;
        }
        if e > 0 {
            root *= BigUint::from(p).pow(e / 2);
            if e % 2 == 1 {
                kernel *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
}

fn split_u128(n: u128, bound: u64) -> Result<(u128, u128)> {
    split_u128_from(n, 2, bound).ok_or_else(|| Error::FactorBound { value: n.to_string(), bound })
}

// Trial division starting at `start`, assuming smaller primes are already gone.
fn split_u128_from(mut rem: u128, start: u64, bound: u64) -> Option<(u128, u128)> {
    let mut root: u128 = 1;
    let mut kernel: u128 = 1;
    let mut p = start as u128;
    while p * p <= rem {
        if p > bound as u128 {
            let s = rem.sqrt();
            if s * s == rem {
                return Some((root * s, kernel));
            }
            return None;
        }
        let mut e = 0u32;
        while rem.is_multiple_of(p) {
            rem /= p;
            e += 1;
        }
        if e > 0 {
            root *= p.pow(e / 2);
            if e % 2 == 1 {
                kernel *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        kernel *= rem;
    }
    Some((root, kernel))
}

/// Exact sum of rational multiples of square roots of squarefree integers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RadicalSum {
    terms: BTreeMap<BigUint, Rational>,
}

impl RadicalSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(BigUint::one(), r);
        }
        Self { terms }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(integer(n))
    }

    /// `√r` for a nonnegative rational.
    pub fn sqrt(r: &Rational) -> Result<Self> {
        Self::sqrt_with_bound(r, DEFAULT_TRIAL_BOUND)
    }

    pub fn sqrt_with_bound(r: &Rational, bound: u64) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::NegativeRadicand(r.to_string()));
        }
        if r.is_zero() {
            return Ok(Self::zero());
        }
        // √(p/q) = √(p·q) / q, and p, q are coprime so they split independently.
        let p = r.numer().magnitude();
        let q = r.denom().magnitude();
        let (rp, kp) = squarefree_split(p, bound)?;
        let (rq, kq) = squarefree_split(q, bound)?;
        let coeff = Rational::new(BigInt::from(rp * rq), BigInt::from(q.clone()));
        let mut terms = BTreeMap::new();
        terms.insert(kp * kq, coeff);
        Ok(Self { terms })
    }

    /// `√n` for a nonnegative integer.
    pub fn sqrt_integer(n: &BigUint) -> Result<Self> {
        Self::sqrt(&Rational::from_integer(BigInt::from(n.clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    /// The value as a rational, if every kernel is 1.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| rational_to_f64(c) * k.to_f64().unwrap_or(f64::INFINITY).sqrt())
            .sum()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, c)| (k.clone(), c * r)).collect() }
    }

    fn add_term(&mut self, kernel: BigUint, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(kernel) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles huge numerators/denominators without overflow.
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Debug for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if k.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "sqrt({k})")?;
            } else {
                write!(f, "{mag}*sqrt({k})")?;
            }
        }
        Ok(())
    }
}

/// Parses `p/q`, a decimal such as `0.6`, or `sqrt(p/q)`, each optionally
/// negated.
impl FromStr for RadicalSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, s.strip_prefix('+').unwrap_or(s).trim()),
        };
        let value = if let Some(inner) = body.strip_prefix("sqrt(").and_then(|b| b.strip_suffix(')')) {
            RadicalSum::sqrt(&parse_rational(inner)?)?
        } else {
            RadicalSum::from_rational(parse_rational(body)?)
        };
        Ok(if neg { -value } else { value })
    }
}

/// Parses `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

impl Neg for RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        RadicalSum { terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect() }
    }
}

impl Neg for &RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        -self.clone()
    }
}

impl AddAssign<&RadicalSum> for RadicalSum {
    fn add_assign(&mut self, rhs: &RadicalSum) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), c.clone());
        }
    }
}

impl Add<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn add(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn sub(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl Mul<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn mul(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = RadicalSum::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                // √a·√b = g·√((a/g)(b/g)) with g = gcd(a, b); the cofactor is
                // squarefree because a and b are.
                let g = ka.gcd(kb);
                let kernel = (ka / &g) * (kb / &g);
                let coeff = ca * cb * Rational::from_integer(BigInt::from_biguint(Sign::Plus, g));
                out.add_term(kernel, coeff);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident :: $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
    )*};
}

forward_owned!(RadicalSum, Add::add, Sub::sub, Mul::mul);

/// One term `coeff · γ^(a/2) · (1−γ)^(b/2)`; `a` and `b` count half-powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaMonomial {
    pub a: u32,
    pub b: u32,
    pub coeff: RadicalSum,
}

/// Polynomial in `γ` and `1−γ` with half-integer exponents allowed.
#[derive(Clone, Default)]
pub struct GammaPolynomial {
    terms: BTreeMap<(u32, u32), RadicalSum>,
}

impl GammaPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(RadicalSum::one())
    }

    pub fn constant(c: RadicalSum) -> Self {
        Self::monomial(0, 0, c)
    }

    /// `c · γ^(a/2) · (1−γ)^(b/2)`, exponents in half-powers.
    pub fn monomial(a: u32, b: u32, c: RadicalSum) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        Self { terms }
    }

    /// `c · γ^a · (1−γ)^b` with integer exponents.
    pub fn integer_monomial(a: u32, b: u32, c: Rational) -> Self {
        Self::monomial(2 * a, 2 * b, RadicalSum::from_rational(c))
    }

    /// Polynomial `Σ c_j γ^j` from its coefficient list.
    pub fn from_coefficients(coeffs: &[Rational]) -> Self {
        let mut out = Self::zero();
        for (j, c) in coeffs.iter().enumerate() {
            out.add_term((2 * j as u32, 0), RadicalSum::from_rational(c.clone()));
        }
        out
    }

    pub fn monomials(&self) -> impl Iterator<Item = GammaMonomial> + '_ {
        self.terms.iter().map(|(&(a, b), c)| GammaMonomial { a, b, coeff: c.clone() })
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.terms.keys().all(|&(a, b)| a % 2 == 0 && b % 2 == 0)
    }

    fn add_term(&mut self, key: (u32, u32), c: RadicalSum) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Expanded coefficients of `γ^j`, one list per parity class of the
    /// half-exponents `(a mod 2, b mod 2)`. Trailing zeros are trimmed.
    pub fn expand_classes(&self) -> BTreeMap<(u32, u32), Vec<RadicalSum>> {
        let mut classes: BTreeMap<(u32, u32), Vec<RadicalSum>> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            let (ga, gb) = (a / 2, b / 2);
            let coeffs = classes.entry((a % 2, b % 2)).or_default();
            let needed = (ga + gb) as usize + 1;
            if coeffs.len() < needed {
                coeffs.resize(needed, RadicalSum::zero());
            }
            // γ^ga (1−γ)^gb = Σ_j C(gb, j) (−1)^j γ^(ga+j)
            for j in 0..=gb {
                let binom = Rational::from_integer(BigInt::from(binomial(gb as u64, j as u64)));
                let signed = if j % 2 == 1 { -binom } else { binom };
                coeffs[(ga + j) as usize] += &c.scale(&signed);
            }
        }
        for coeffs in classes.values_mut() {
            while coeffs.last().is_some_and(RadicalSum::is_zero) {
                coeffs.pop();
            }
        }
        classes.retain(|_, v| !v.is_empty());
        classes
    }

    /// Exact test against the zero function of `γ`.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.expand_classes().is_empty()
    }

    /// Coefficients of `γ^0, γ^1, …` for a polynomial with integer exponents
    /// and rational coefficients. Trailing zeros are trimmed; the zero
    /// polynomial expands to `[0]`.
    pub fn expand(&self) -> Result<Vec<Rational>> {
        self.expand_rational().ok_or_else(|| Error::NonRational(self.monomial_form()))
    }

    fn expand_rational(&self) -> Option<Vec<Rational>> {
        let mut classes = self.expand_classes();
        if classes.keys().any(|&k| k != (0, 0)) {
            return None;
        }
        let coeffs = classes.remove(&(0, 0)).unwrap_or_default();
        if coeffs.is_empty() {
            return Some(vec![Rational::zero()]);
        }
        coeffs.iter().map(RadicalSum::as_rational).collect()
    }

    /// Monomial form with half-powers, e.g. `(sqrt(2))·γ^(1/2)·(1-γ)^(3/2)`.
    pub fn monomial_form(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&format!("({c})"));
            if a > 0 {
                out.push_str(&format!("·γ^({a}/2)"));
            }
            if b > 0 {
                out.push_str(&format!("·(1-γ)^({b}/2)"));
            }
        }
        out
    }

    /// Exact value at rational `γ ∈ [0, 1]`; integer exponents required.
    pub fn eval_radical(&self, gamma: &Rational) -> Result<RadicalSum> {
        check_gamma(gamma)?;
        if !self.has_integer_exponents() {
            return Err(Error::NonRational(self.monomial_form()));
        }
        let keep = Rational::one() - gamma;
        let mut out = RadicalSum::zero();
        for (&(a, b), c) in &self.terms {
            let w = num_traits::pow(gamma.clone(), (a / 2) as usize)
                * num_traits::pow(keep.clone(), (b / 2) as usize);
            out += &c.scale(&w);
        }
        Ok(out)
    }

    /// Exact rational value at `γ ∈ [0, 1]`.
    pub fn eval(&self, gamma: &Rational) -> Result<Rational> {
        self.eval_radical(gamma)?
            .as_rational()
            .ok_or_else(|| Error::NonRational(self.monomial_form()))
    }

    pub fn eval_f64(&self, gamma: f64) -> f64 {
        let (sg, sk) = (gamma.sqrt(), (1.0 - gamma).sqrt());
        self.terms
            .iter()
            .map(|(&(a, b), c)| c.to_f64() * sg.powi(a as i32) * sk.powi(b as i32))
            .sum()
    }
}

pub(crate) fn check_gamma(gamma: &Rational) -> Result<()> {
    if gamma.is_negative() || gamma > &Rational::one() {
        return Err(Error::GammaOutOfRange(gamma.to_string()));
    }
    Ok(())
}

/// Expands a polynomial given in monomial form; see [`GammaPolynomial::expand`].
pub fn poly_expand(p: &GammaPolynomial) -> Result<Vec<Rational>> {
    p.expand()
}

/// Exact evaluation at rational `γ ∈ [0, 1]`.
pub fn poly_eval(p: &GammaPolynomial, gamma: &Rational) -> Result<Rational> {
    p.eval(gamma)
}

/// Evaluates `Σ c_j γ^j` from an expanded coefficient list.
pub fn eval_coefficients(coeffs: &[Rational], gamma: &Rational) -> Result<Rational> {
    check_gamma(gamma)?;
    Ok(coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * gamma + c))
}

pub fn radical_mul(x: &RadicalSum, y: &RadicalSum) -> RadicalSum {
    x * y
}

pub fn radical_is_zero(x: &RadicalSum) -> bool {
    x.is_zero()
}

impl PartialEq for GammaPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms || (self - other).is_zero()
    }
}

impl fmt::Debug for GammaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Expanded `γ` form when the polynomial is rational with integer exponents,
/// otherwise the monomial form with half-powers.
impl fmt::Display for GammaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expand_rational() {
            Some(coeffs) => write!(f, "{}", format_coefficients(&coeffs)),
            None => write!(f, "{}", self.monomial_form()),
        }
    }
}

/// Renders `[1, 0, -6]` as `1 - 6γ^2`.
pub fn format_coefficients(coeffs: &[Rational]) -> String {
    let mut out = String::new();
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let power = match j {
            0 => String::new(),
            1 => "γ".to_string(),
            _ => format!("γ^{j}"),
        };
        if j == 0 || !mag.is_one() {
            out.push_str(&mag.to_string());
        }
        out.push_str(&power);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl Neg for &GammaPolynomial {
    type Output = GammaPolynomial;
    fn neg(self) -> GammaPolynomial {
        GammaPolynomial { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl AddAssign<&GammaPolynomial> for GammaPolynomial {
    fn add_assign(&mut self, rhs: &GammaPolynomial) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, c.clone());
        }
    }
}

impl Add<&GammaPolynomial> for &GammaPolynomial {
    type Output = GammaPolynomial;
    fn add(self, rhs: &GammaPolynomial) -> GammaPolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&GammaPolynomial> for &GammaPolynomial {
    type Output = GammaPolynomial;
    fn sub(self, rhs: &GammaPolynomial) -> GammaPolynomial {
        let mut out = self.clone();
        out += &(-rhs);
        out
    }
}

impl Mul<&GammaPolynomial> for &GammaPolynomial {
    type Output = GammaPolynomial;
    fn mul(self, rhs: &GammaPolynomial) -> GammaPolynomial {
        let mut out = GammaPolynomial::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

forward_owned!(GammaPolynomial, Add::add, Sub::sub, Mul::mul);
