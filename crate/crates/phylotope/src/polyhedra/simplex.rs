//! Exact rational two-phase simplex with Bland's anti-cycling rule.
//!
//! Solves min (or max) c.x subject to A x = b, x >= 0, entirely over
//! `BigRational`. No floating point enters the decision path, so optima
//! and feasibility verdicts are exact. Instances here are tiny (tens of
//! rows and columns); a dense tableau is the right tool.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: BigRational,
        solution: Vec<BigRational>,
    },
    Infeasible,
    Unbounded,
}

/// Minimizes (or maximizes) `c.x` over `{ A x = b, x >= 0 }`.
pub fn solve(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    c: &[BigRational],
    maximize: bool,
) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Phase 1 tableau: structural columns, one artificial per row, rhs.
    let mut tableau: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (row, rhs) in a.iter().zip(b) {
        let flip = rhs.is_negative();
        let mut t: Vec<BigRational> = Vec::with_capacity(n + m + 1);
        for v in row {
            t.push(if flip { -v } else { v.clone() });
        }
        t.extend(std::iter::repeat_with(BigRational::zero).take(m));
        t.push(if flip { -rhs } else { rhs.clone() });
        tableau.push(t);
    }
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for (i, row) in tableau.iter_mut().enumerate() {
        row[n + i] = BigRational::one();
        basis.push(n + i);
    }

    // Phase 1 objective: minimize the sum of artificials. Start from the
    // raw costs (1 on artificials) and zero out the basic columns.
    let mut obj = vec![BigRational::zero(); n + m + 1];
    for slot in &mut obj[n..n + m] {
        *slot = BigRational::one();
    }
    for row in &tableau {
        for (o, t) in obj.iter_mut().zip(row) {
            *o -= t;
        }
    }
    if !run_simplex(&mut tableau, &mut basis, &mut obj) {
        // Sum of non-negative artificials cannot be unbounded below.
        unreachable!("phase 1 cannot be unbounded");
    }
    // obj holds the negated objective value at the rhs position.
    let phase1_value = -obj.last().expect("rhs present").clone();
    if !phase1_value.is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive leftover artificial variables out of the basis; rows that
    // cannot pivot are redundant and dropped.
    let mut r = 0usize;
    while r < tableau.len() {
        if basis[r] >= n {
            match (0..n).find(|&j| !tableau[r][j].is_zero()) {
                Some(j) => pivot(&mut tableau, &mut basis, &mut obj, r, j),
                None => {
                    tableau.remove(r);
                    basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2: drop artificial columns and install the real objective.
    for row in &mut tableau {
        row.drain(n..n + m);
    }
    let mut cost: Vec<BigRational> = c.to_vec();
    if maximize {
        for v in &mut cost {
            *v = -v.clone();
        }
    }
    let mut obj: Vec<BigRational> = cost.clone();
    obj.push(BigRational::zero());
    let snapshot = obj.clone();
    for (i, &bj) in basis.iter().enumerate() {
        let scale = snapshot[bj].clone();
        if scale.is_zero() {
            continue;
        }
        for (o, t) in obj.iter_mut().zip(&tableau[i]) {
            *o -= &scale * t;
        }
    }
    if !run_simplex(&mut tableau, &mut basis, &mut obj) {
        return LpOutcome::Unbounded;
    }

    let mut solution = vec![BigRational::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        solution[bj] = tableau[i].last().expect("rhs present").clone();
    }
    let mut value: BigRational = cost.iter().zip(&solution).map(|(ci, xi)| ci * xi).sum();
    if maximize {
        value = -value;
    }
    LpOutcome::Optimal { value, solution }
}

/// Bland-rule minimization loop. Returns false on unboundedness.
fn run_simplex(
    tableau: &mut [Vec<BigRational>],
    basis: &mut [usize],
    obj: &mut [BigRational],
) -> bool {
    let width = obj.len();
    loop {
        // Entering variable: the lowest index with a negative reduced cost.
        let Some(entering) = (0..width - 1).find(|&j| obj[j].is_negative()) else {
            return true;
        };
        // Leaving row: minimum ratio, ties broken by the lowest basic
        // variable index.
        let mut leaving: Option<(usize, BigRational)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[entering].is_positive() {
                let ratio = row.last().expect("rhs present") / &row[entering];
                let better = match &leaving {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && basis[i] < basis[*li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leaving else {
            return false;
        };
        pivot(tableau, basis, obj, row, entering);
    }
}

fn pivot(
    tableau: &mut [Vec<BigRational>],
    basis: &mut [usize],
    obj: &mut [BigRational],
    row: usize,
    col: usize,
) {
    let inv = tableau[row][col].clone();
    for v in &mut tableau[row] {
        *v = &*v / &inv;
    }
    let pivot_row = tableau[row].clone();
    for (i, r) in tableau.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let scale = r[col].clone();
        for (v, p) in r.iter_mut().zip(&pivot_row) {
            *v -= &scale * p;
        }
    }
    if !obj[col].is_zero() {
        let scale = obj[col].clone();
        for (v, p) in obj.iter_mut().zip(&pivot_row) {
            *v -= &scale * p;
        }
    }
    basis[row] = col;
}
