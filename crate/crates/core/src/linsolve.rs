//! Exact linear algebra over the rationals: reduced row echelon form and a
//! small simplex solver for `max cᵀx` subject to `Ax = b, x ≥ 0`.

use num_traits::{Signed, Zero};

use crate::algebra::Rational;

/// Outcome of Gaussian elimination on `Ax = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// The system has no solution. `constraints` lists original equations
    /// whose combination yields `0 = c ≠ 0`.
    Inconsistent { constraints: Vec<usize> },
    Solved(SolutionSpace),
}

/// `x = particular + Σ_f z_f · null_basis[f]`, with one basis vector per free
/// column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSpace {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    pub particular: Vec<Rational>,
    pub null_basis: Vec<Vec<Rational>>,
}

impl SolutionSpace {
    pub fn is_unique(&self) -> bool {
        self.free.is_empty()
    }

    /// The solution with the given values for the free columns.
    pub fn at(&self, free_values: &[Rational]) -> Vec<Rational> {
        let mut x = self.particular.clone();
        for (z, basis) in free_values.iter().zip(&self.null_basis) {
            for (xi, bi) in x.iter_mut().zip(basis) {
                *xi += z * bi;
            }
        }
        x
    }
}

/// Solves `Ax = b` exactly. Pivots are chosen left to right, so free
/// variables are the rightmost non-pivot columns.
pub fn solve_linear(a: &[Vec<Rational>], b: &[Rational]) -> LinearSolution {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    // [A | b | I]: the identity block tracks which original equations each
    // reduced row is built from.
    let mut t: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i].clone());
            row.extend((0..rows).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !t[i][c].is_zero()) else {
            continue;
        };
        t.swap(r, p);
        let inv = t[r][c].recip();
        for v in t[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !t[i][c].is_zero() {
                let f = t[i][c].clone();
                let (pivot_row, row) = if i < r {
                    let (lo, hi) = t.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = t.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if let Some(bad) = t[r..].iter().find(|row| !row[cols].is_zero()) {
        let constraints = bad[cols + 1..]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, _)| k)
            .collect();
        return LinearSolution::Inconsistent { constraints };
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut particular = vec![Rational::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        particular[p] = t[i][cols].clone();
    }
    let null_basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::from_integer(1.into());
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -t[i][f].clone();
            }
            v
        })
        .collect();
    LinearSolution::Solved(SolutionSpace { rank: pivots.len(), pivots, free, particular, null_basis })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// Maximizes `cᵀx` subject to `Ax = b`, `x ≥ 0`, exactly. Two-phase simplex
/// with Bland's rule, so it terminates on degenerate problems.
pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let one = Rational::from_integer(1.into());
    // Tableau columns: x (n), artificials (m), rhs.
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let mut row: Vec<Rational> = a[i].iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
            row.extend((0..m).map(|k| if k == i { one.clone() } else { Rational::zero() }));
            row.push(if flip { -b[i].clone() } else { b[i].clone() });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    let phase1: Vec<Rational> = (0..n + m).map(|j| if j < n { Rational::zero() } else { -one.clone() }).collect();
    if run_simplex(&mut t, &mut basis, &phase1, n + m).is_err() {
        return LpOutcome::Infeasible;
    }
    let infeasibility: Rational = basis
        .iter()
        .zip(&t)
        .filter(|(&j, _)| j >= n)
        .map(|(_, row)| row[n + m].clone())
        .sum();
    if !infeasibility.is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining (zero-level) artificials out, dropping redundant rows.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
            } else {
                t.remove(i);
                basis.remove(i);
                continue;
            }
        }
        i += 1;
    }
    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    if run_simplex(&mut t, &mut basis, &cost, n).is_err() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &j) in t.iter().zip(&basis) {
        x[j] = row[n + m].clone();
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

struct Unbounded;

// Columns at or beyond `allowed` never enter the basis.
fn run_simplex(
    t: &mut [Vec<Rational>],
    basis: &mut [usize],
    cost: &[Rational],
    allowed: usize,
) -> Result<(), Unbounded> {
    let rhs = t.first().map_or(0, |r| r.len() - 1);
    loop {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut reduced = cost[j].clone();
            for (row, &bj) in t.iter().zip(basis.iter()) {
                reduced -= &cost[bj] * &row[j];
            }
            reduced.is_positive()
        });
        let Some(j) = entering else {
            return Ok(());
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[j].is_positive() {
                let ratio = &row[rhs] / &row[j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(Unbounded);
        };
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for v in t[r].iter_mut() {
        *v *= &inv;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
    }
    basis[r] = c;
}
