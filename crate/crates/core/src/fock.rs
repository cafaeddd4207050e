//! Quasi-classical states (multimode Fock states) and their combinatorics.

use std::fmt;
use std::ops::Index;

use num_bigint::{BigInt, BigUint};

use crate::algebra::{binomial, Rational};
use crate::error::{Error, Result};

/// Photon counts `|n₁ … n_m⟩` of a quasi-classical state.
///
/// Ordered lexicographically, which is the canonical enumeration and
/// serialization order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn row_sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// `(x₁, …, x_m) → (x₂, …, x_m, x₁)`.
    pub fn rotated(&self) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            v.rotate_left(1);
        }
        Self(v)
    }

    /// Each occupation multiplied by `d`.
    pub fn scale(&self, d: u32) -> Self {
        Self(self.0.iter().map(|n| n * d).collect())
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const M: usize> From<[u32; M]> for OccupationVector {
    fn from(v: [u32; M]) -> Self {
        Self(v.to_vec())
    }
}

impl Index<usize> for OccupationVector {
    type Output = u32;
    fn index(&self, j: usize) -> &u32 {
        &self.0[j]
    }
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (j, n) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// All QCS with `m` modes and total photon number `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcsSpace {
    pub n: u32,
    pub m: usize,
    pub members: Vec<OccupationVector>,
}

impl QcsSpace {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Cyclic-shift orbits, ordered by their lexicographically smallest member.
    pub fn orbits(&self) -> Vec<Vec<OccupationVector>> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for x in &self.members {
            if seen.contains(x) {
                continue;
            }
            let orbit = cyclic_orbit(x);
            seen.extend(orbit.iter().cloned());
            out.push(orbit);
        }
        out
    }
}

/// `P(n, m) = C(n+m−1, m−1)`, the number of ordered partitions of `n` into
/// `m` nonnegative parts.
pub fn partition_count(n: u64, m: u64) -> BigUint {
    assert!(m >= 1, "partition_count needs at least one part");
    binomial(n + m - 1, m - 1)
}

/// Every partition of `n` into `m` ordered parts, lexicographically ascending.
pub fn enumerate_qcs(n: u32, m: usize) -> QcsSpace {
    assert!(m >= 1, "enumerate_qcs needs at least one mode");
    let mut members = Vec::new();
    let mut current = vec![0u32; m];
    fill(&mut current, 0, n, &mut members);
    QcsSpace { n, m, members }
}

fn fill(current: &mut Vec<u32>, j: usize, remaining: u32, out: &mut Vec<OccupationVector>) {
    if j + 1 == current.len() {
        current[j] = remaining;
        out.push(OccupationVector(current.clone()));
        return;
    }
    for v in 0..=remaining {
        current[j] = v;
        fill(current, j + 1, remaining - v, out);
    }
}

/// `D(u, v) = ½ Σ |uᵢ − vᵢ|`.
pub fn distance(u: &OccupationVector, v: &OccupationVector) -> Result<Rational> {
    if u.modes() != v.modes() {
        return Err(Error::LengthMismatch { left: u.modes(), right: v.modes() });
    }
    Ok(Rational::new(BigInt::from(l1_distance(u, v)), BigInt::from(2)))
}

/// `Σ |uᵢ − vᵢ|`, i.e. twice [`distance`]. Lengths must match.
pub(crate) fn l1_distance(u: &OccupationVector, v: &OccupationVector) -> u64 {
    u.0.iter().zip(&v.0).map(|(&a, &b)| a.abs_diff(b) as u64).sum()
}

/// Distinct cyclic shifts of `x`, starting from `x` itself.
pub fn cyclic_orbit(x: &OccupationVector) -> Vec<OccupationVector> {
    let mut orbit = vec![x.clone()];
    let mut next = x.rotated();
    while &next != x {
        orbit.push(next.clone());
        next = next.rotated();
    }
    orbit
}

pub fn scale(x: &OccupationVector, d: u32) -> OccupationVector {
    x.scale(d)
}
