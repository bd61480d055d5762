//! Integer-lattice algebra: Hermite normal form, the lattice generated by
//! polytope vertices, and coordinate transforms between the ambient space
//! and lattice coordinates.
//!
//! Row-style HNF with Euclidean pivoting: pivot columns strictly increase,
//! pivots are positive, entries above a pivot are reduced into [0, pivot),
//! entries below are zero. All arithmetic is arbitrary precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A dense rows x cols matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(IntegerMatrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let addend = a * other.get(k, j);
                    let cell = &mut out.data[i * other.cols + j];
                    *cell += addend;
                }
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let cell = &mut self.data[r * self.cols + c];
            *cell = -std::mem::take(cell);
        }
    }

    /// row_j -= q * row_i
    fn sub_multiple(&mut self, j: usize, i: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let sub = q * self.get(i, c);
            let cell = &mut self.data[j * self.cols + c];
            *cell -= sub;
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        Ok(sign * m.get(n - 1, n - 1).clone())
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

fn hnf_inner(a: &IntegerMatrix, track: bool) -> (IntegerMatrix, Option<IntegerMatrix>, Vec<usize>) {
    let mut h = a.clone();
    let mut u = track.then(|| IntegerMatrix::identity(a.rows));
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for col in 0..h.cols {
        if r == h.rows {
            break;
        }
        loop {
            // Bring the smallest nonzero entry of this column (at or below
            // row r) into the pivot position.
            let best = (r..h.rows)
                .filter(|&i| !h.get(i, col).is_zero())
                .min_by_key(|&i| (h.get(i, col).abs(), i));
            let Some(best) = best else { break };
            h.swap_rows(r, best);
            if let Some(u) = u.as_mut() {
                u.swap_rows(r, best);
            }
            if h.get(r, col).is_negative() {
                h.negate_row(r);
                if let Some(u) = u.as_mut() {
                    u.negate_row(r);
                }
            }
            let pivot = h.get(r, col).clone();
            let mut clean = true;
            for i in r + 1..h.rows {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = h.get(i, col).div_floor(&pivot);
                h.sub_multiple(i, r, &q);
                if let Some(u) = u.as_mut() {
                    u.sub_multiple(i, r, &q);
                }
                if !h.get(i, col).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !h.get(r, col).is_zero() {
            // Reduce the entries above the pivot into [0, pivot).
            let pivot = h.get(r, col).clone();
            for i in 0..r {
                let q = h.get(i, col).div_floor(&pivot);
                h.sub_multiple(i, r, &q);
                if let Some(u) = u.as_mut() {
                    u.sub_multiple(i, r, &q);
                }
            }
            pivots.push(col);
            r += 1;
        }
    }
    (h, u, pivots)
}

/// Row-style Hermite normal form with its unimodular transform:
/// `U * A = H`.
pub fn hnf(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let (h, u, _) = hnf_inner(a, true);
    (h, u.expect("transform requested"))
}

/// A lattice given by an HNF basis of full row rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    basis: IntegerMatrix,
    pivots: Vec<usize>,
    ambient: usize,
    provenance: Option<String>,
}

impl LatticeBasis {
    pub fn rank(&self) -> usize {
        self.basis.num_rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Pivot column of each basis row.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        self.basis.row(i)
    }

    pub fn basis(&self) -> &IntegerMatrix {
        &self.basis
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }

    /// Solves `y * basis = x` over the integers. `None` means `x` is not a
    /// lattice point.
    pub fn to_lattice_coords(&self, x: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if x.len() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient dimension {}",
                x.len(),
                self.ambient
            )));
        }
        let mut rem = x.to_vec();
        let mut y = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let p = self.pivots[i];
            let pivot = self.basis.get(i, p);
            let (q, s) = rem[p].div_rem(pivot);
            if !s.is_zero() {
                return Ok(None);
            }
            for (c, slot) in rem.iter_mut().enumerate() {
                *slot -= &q * self.basis.get(i, c);
            }
            y.push(q);
        }
        if rem.iter().any(|v| !v.is_zero()) {
            return Ok(None);
        }
        Ok(Some(y))
    }

    /// The ambient vector `y * basis`.
    pub fn from_lattice_coords(&self, y: &[BigInt]) -> Result<Vec<BigInt>> {
        if y.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a rank-{} lattice",
                y.len(),
                self.rank()
            )));
        }
        let mut x = vec![BigInt::zero(); self.ambient];
        for (i, q) in y.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (c, slot) in x.iter_mut().enumerate() {
                *slot += q * self.basis.get(i, c);
            }
        }
        Ok(x)
    }
}

/// The lattice generated by the given vectors themselves (not their
/// differences): the nonzero rows of their HNF.
pub fn lattice_from_vertices<I, V>(vectors: I) -> Result<LatticeBasis>
where
    I: IntoIterator<Item = V>,
    V: IntoIterator<Item = BigInt>,
{
    let rows: Vec<Vec<BigInt>> = vectors
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect();
    if rows.is_empty() {
        return Err(Error::DimensionMismatch("no generating vectors".into()));
    }
    let matrix = IntegerMatrix::from_rows(rows)?;
    let ambient = matrix.num_cols();
    let (h, _, pivots) = hnf_inner(&matrix, false);
    let basis = IntegerMatrix::from_rows((0..pivots.len()).map(|i| h.row(i).to_vec()).collect())?;
    Ok(LatticeBasis { basis, pivots, ambient, provenance: None })
}

/// Rank of the difference vectors `v_i - v_0`: the dimension of the
/// affine hull.
pub fn affine_dimension<V: AsRef<[BigInt]>>(vertices: &[V]) -> Result<usize> {
    let first = vertices
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no vertices".into()))?
        .as_ref();
    if vertices.len() == 1 {
        return Ok(0);
    }
    let diffs: Vec<Vec<BigInt>> = vertices[1..]
        .iter()
        .map(|v| v.as_ref().iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    let matrix = IntegerMatrix::from_rows(diffs)?;
    let (_, _, pivots) = hnf_inner(&matrix, false);
    Ok(pivots.len())
}

/// Checks the HNF shape invariants; used by tests and callers that ingest
/// externally produced bases.
pub fn is_row_hnf(h: &IntegerMatrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero_row = false;
    for r in 0..h.num_rows() {
        let pivot_col = (0..h.num_cols()).find(|&c| !h.get(r, c).is_zero());
        match pivot_col {
            None => seen_zero_row = true,
            Some(c) => {
                if seen_zero_row {
                    return false;
                }
                if let Some(p) = last_pivot {
                    if c <= p {
                        return false;
                    }
                }
                let pivot = h.get(r, c);
                if !pivot.is_positive() {
                    return false;
                }
                for i in 0..r {
                    let above = h.get(i, c);
                    if above.is_negative() || above >= pivot {
                        return false;
                    }
                }
                for i in r + 1..h.num_rows() {
                    if !h.get(i, c).is_zero() {
                        return false;
                    }
                }
                last_pivot = Some(c);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelPolytope;
    use crate::tree::{RootSpec, RootedPhyloTree};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn model_rows(text: &str, root: u32, group: &str) -> Vec<Vec<BigInt>> {
        let tree = RootedPhyloTree::parse(text, Some(&RootSpec::Leaf(root))).unwrap();
        let p = ModelPolytope::new(tree, group.parse().unwrap()).unwrap();
        p.vertex_rows(1 << 20)
            .unwrap()
            .into_iter()
            .map(|row| row.into_iter().map(BigInt::from).collect())
            .collect()
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hnf(&IntegerMatrix::identity(3));
        assert_eq!(h, IntegerMatrix::identity(3));
        assert_eq!(u, IntegerMatrix::identity(3));

        let a = m(&[&[2], &[4]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, m(&[&[2], &[0]]));
        assert_eq!(u.mul(&a).unwrap(), h);

        let a = m(&[&[0, 1], &[1, 0]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, IntegerMatrix::identity(2));
        assert_eq!(u.determinant().unwrap().abs(), BigInt::one());
    }

    #[test]
    fn hnf_is_idempotent() {
        let a = m(&[&[3, 1, 2], &[6, 5, 9], &[0, 4, 4]]);
        let (h, _) = hnf(&a);
        let (h2, _) = hnf(&h);
        assert_eq!(h, h2);
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(m(&[&[2, 0], &[0, 3]]).determinant().unwrap(), BigInt::from(6));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant().unwrap(), BigInt::from(-1));
        assert_eq!(
            m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).determinant().unwrap(),
            BigInt::zero()
        );
        assert_eq!(
            m(&[&[2, -3, 1], &[0, 5, -2], &[1, 1, 1]]).determinant().unwrap(),
            BigInt::from(15)
        );
        assert!(m(&[&[1, 2]]).determinant().is_err());
    }

    #[test]
    fn lattice_of_single_vector() {
        let basis = lattice_from_vertices([vec![BigInt::from(2), BigInt::from(4)]]).unwrap();
        assert_eq!(basis.rank(), 1);
        assert_eq!(basis.row(0), &[BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn model_vertices_reconstruct_exactly() {
        let rows = model_rows("((1,2),3);", 3, "Z2xZ2");
        let basis = lattice_from_vertices(rows.clone()).unwrap();
        assert!(basis.rank() <= rows.len().min(12));
        assert!(is_row_hnf(basis.basis()));
        for row in &rows {
            let y = basis.to_lattice_coords(row).unwrap().expect("generator in lattice");
            assert_eq!(&basis.from_lattice_coords(&y).unwrap(), row);
        }
        // A vector with unequal block sums is not in the lattice.
        let mut outside = vec![BigInt::zero(); 12];
        outside[0] = BigInt::one();
        assert_eq!(basis.to_lattice_coords(&outside).unwrap(), None);
    }

    #[test]
    fn membership_invariant_under_generator_presentation() {
        let rows = model_rows("((1,2),3);", 3, "Z2");
        let basis = lattice_from_vertices(rows.clone()).unwrap();

        let mut permuted = rows.clone();
        permuted.reverse();
        // Append an integer combination of existing generators.
        let combo: Vec<BigInt> = rows[0]
            .iter()
            .zip(&rows[1])
            .map(|(a, b)| a * BigInt::from(3) - b * BigInt::from(2))
            .collect();
        permuted.push(combo);
        let basis2 = lattice_from_vertices(permuted).unwrap();
        assert_eq!(basis.basis(), basis2.basis());
    }

    #[test]
    fn lattice_coords_of_basis_rows() {
        let rows = model_rows("((1,2),3);", 3, "Z2xZ2");
        let basis = lattice_from_vertices(rows).unwrap();
        let r = basis.rank();
        for i in 0..r {
            let y = basis.to_lattice_coords(basis.row(i)).unwrap().unwrap();
            let mut unit = vec![BigInt::zero(); r];
            unit[i] = BigInt::one();
            assert_eq!(y, unit);
        }
        let two: Vec<BigInt> = basis
            .row(0)
            .iter()
            .zip(basis.row(1))
            .map(|(a, b)| a + b)
            .collect();
        let y = basis.to_lattice_coords(&two).unwrap().unwrap();
        assert_eq!(&y[..2], &[BigInt::one(), BigInt::one()]);
        assert!(y[2..].iter().all(|v| v.is_zero()));
    }

    #[test]
    fn affine_dimension_examples() {
        let one = vec![vec![BigInt::from(5), BigInt::from(7)]];
        assert_eq!(affine_dimension(&one).unwrap(), 0);

        let segment = vec![
            vec![BigInt::zero(), BigInt::zero()],
            vec![BigInt::one(), BigInt::zero()],
        ];
        assert_eq!(affine_dimension(&segment).unwrap(), 1);

        let rows = model_rows("((1,2),3);", 3, "Z2xZ2");
        let d = affine_dimension(&rows).unwrap();
        assert!(d <= 9, "3 blocks of 4 coordinates, each summing to 1");
        assert_eq!(d, rational_rank_oracle(&rows));
    }

    /// Independent rational-rank computation by fraction-free elimination.
    fn rational_rank_oracle(vertices: &[Vec<BigInt>]) -> usize {
        let mut rows: Vec<Vec<BigInt>> = vertices[1..]
            .iter()
            .map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
            .collect();
        let cols = rows[0].len();
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            for i in 0..rows.len() {
                if i != rank && !rows[i][c].is_zero() {
                    let (num, den) = (rows[i][c].clone(), rows[rank][c].clone());
                    let pivot_row = rows[rank].clone();
                    for (slot, pv) in rows[i].iter_mut().zip(&pivot_row) {
                        *slot = &*slot * &den - pv * &num;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    proptest! {
        #[test]
        fn hnf_postconditions(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) % 19) as i64 - 9
            };
            let a = IntegerMatrix::from_i64_rows(
                &(0..rows).map(|_| (0..cols).map(|_| next()).collect()).collect::<Vec<_>>(),
            ).unwrap();
            let (h, u) = hnf(&a);
            prop_assert!(is_row_hnf(&h));
            prop_assert_eq!(u.mul(&a).unwrap(), h);
            prop_assert_eq!(u.determinant().unwrap().abs(), BigInt::one());
        }
    }
}
