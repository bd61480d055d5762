//! The independent polyhedral path: exact rational LP over vertex
//! descriptions, membership in dilated polytopes, and enumeration of the
//! lattice points of `nP` (optionally sliced by fixed coordinate blocks).
//!
//! Everything works directly on the V-representation: membership and
//! coordinate bounds are convex-combination LPs, so no hull computation is
//! ever needed. Enumeration recurses over lattice coordinates in HNF pivot
//! order, bounding each coordinate by a pair of LPs on the current fiber.

mod simplex;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
pub use simplex::LpOutcome;

/// A polytope given by its (integer) vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    vertices: Vec<Vec<BigInt>>,
    dim: usize,
}

impl VPolytope {
    pub fn new(vertices: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = vertices
            .first()
            .ok_or_else(|| Error::DimensionMismatch("polytope needs at least one vertex".into()))?
            .len();
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch("vertices of unequal length".into()));
        }
        Ok(VPolytope { vertices, dim })
    }

    /// Builds from byte coordinate rows, as produced by the model layer.
    pub fn from_byte_rows(rows: &[Vec<u8>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&c| BigInt::from(c)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &[BigInt] {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vec<BigInt>] {
        &self.vertices
    }
}

/// Fixes a run of coordinates to given values: the hyperplane slices
/// `x[first + t] = values[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceConstraint {
    pub first_coord: usize,
    pub values: Vec<BigInt>,
}

impl SliceConstraint {
    pub fn new(first_coord: usize, values: Vec<BigInt>) -> Self {
        SliceConstraint { first_coord, values }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.first_coord + self.values.len() > dim {
            return Err(Error::DimensionMismatch(format!(
                "slice at coordinate {} of width {} exceeds dimension {dim}",
                self.first_coord,
                self.values.len()
            )));
        }
        Ok(())
    }

    fn satisfied_by(&self, x: &[BigInt]) -> bool {
        x[self.first_coord..self.first_coord + self.values.len()] == self.values[..]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

/// An LP optimum together with its convex-combination certificate.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: BigRational,
    /// One weight per polytope vertex: lambda >= 0, sum = n, and
    /// `sum lambda_i v_i` attains the optimum.
    pub lambda: Vec<BigRational>,
}

fn rational(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// Core LP over the dilated polytope: optimize a linear functional of
/// `x = sum lambda_i v_i` subject to `lambda >= 0`, `sum lambda = n`,
/// the slice equalities, and extra single-coordinate equalities.
fn solve_dilation_lp(
    p: &VPolytope,
    n: u32,
    objective: Option<(&[BigRational], Direction)>,
    slices: &[SliceConstraint],
    coord_eqs: &[(usize, BigRational)],
) -> Result<LpOutcome> {
    if let Some((obj, _)) = objective {
        if obj.len() != p.dim() {
            return Err(Error::DimensionMismatch(format!(
                "objective of length {} in dimension {}",
                obj.len(),
                p.dim()
            )));
        }
    }
    for s in slices {
        s.check_dim(p.dim())?;
    }
    let nv = p.num_vertices();
    let mut a: Vec<Vec<BigRational>> = Vec::new();
    let mut b: Vec<BigRational> = Vec::new();

    a.push(vec![BigRational::from_integer(BigInt::from(1)); nv]);
    b.push(BigRational::from_integer(BigInt::from(n)));

    let push_coord_eq = |coord: usize, value: BigRational, a: &mut Vec<Vec<BigRational>>, b: &mut Vec<BigRational>| {
        a.push(p.vertices.iter().map(|v| rational(&v[coord])).collect());
        b.push(value);
    };
    for s in slices {
        for (t, value) in s.values.iter().enumerate() {
            push_coord_eq(s.first_coord + t, rational(value), &mut a, &mut b);
        }
    }
    for (coord, value) in coord_eqs {
        push_coord_eq(*coord, value.clone(), &mut a, &mut b);
    }

    let (c, maximize) = match objective {
        Some((obj, dir)) => {
            let c: Vec<BigRational> = p
                .vertices
                .iter()
                .map(|v| obj.iter().zip(v).map(|(o, x)| o * rational(x)).sum())
                .collect();
            (c, dir == Direction::Max)
        }
        None => (vec![BigRational::zero(); nv], false),
    };
    Ok(simplex::solve(&a, &b, &c, maximize))
}

/// Optimum of `objective . x` over `nP` intersected with the slices.
pub fn lp_extremize(
    p: &VPolytope,
    n: u32,
    objective: &[BigRational],
    direction: Direction,
    slices: &[SliceConstraint],
) -> Result<LpSolution> {
    match solve_dilation_lp(p, n, Some((objective, direction)), slices, &[])? {
        LpOutcome::Optimal { value, solution } => Ok(LpSolution { value, lambda: solution }),
        LpOutcome::Infeasible => Err(Error::Infeasible(format!(
            "no point of the {n}-dilation satisfies the slices"
        ))),
        // The feasible region is bounded: lambda lives on a scaled simplex.
        LpOutcome::Unbounded => unreachable!("dilation LPs are bounded"),
    }
}

/// Whether `x` lies in `nP` and satisfies the slices.
pub fn contains(p: &VPolytope, n: u32, x: &[BigInt], slices: &[SliceConstraint]) -> Result<bool> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "point of length {} in dimension {}",
            x.len(),
            p.dim()
        )));
    }
    for s in slices {
        s.check_dim(p.dim())?;
        if !s.satisfied_by(x) {
            return Ok(false);
        }
    }
    let eqs: Vec<(usize, BigRational)> =
        x.iter().enumerate().map(|(i, v)| (i, rational(v))).collect();
    match solve_dilation_lp(p, n, None, &[], &eqs)? {
        LpOutcome::Optimal { .. } => Ok(true),
        LpOutcome::Infeasible => Ok(false),
        LpOutcome::Unbounded => unreachable!("feasibility LP has a zero objective"),
    }
}

/// Budgets for the lattice-point recursion.
#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Cap on visited recursion nodes.
    pub max_nodes: u64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { max_nodes: 100_000_000 }
    }
}

struct EnumContext<'a> {
    polytope: &'a VPolytope,
    n: u32,
    basis: &'a LatticeBasis,
    slices: &'a [SliceConstraint],
    max_nodes: u64,
    nodes: AtomicU64,
}

impl EnumContext<'_> {
    fn visit_node(&self, prefix: &[BigInt]) -> Result<()> {
        let visited = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if visited > self.max_nodes {
            return Err(Error::budget(format!(
                "lattice enumeration exceeded {} nodes at coordinate prefix {:?}",
                self.max_nodes,
                prefix.iter().map(BigInt::to_string).collect::<Vec<_>>()
            )));
        }
        Ok(())
    }

    /// Integer range of the next lattice coordinate over the current
    /// fiber, from a pair of exact LPs.
    fn coordinate_range(
        &self,
        depth: usize,
        partial_x: &[BigInt],
        fixed: &[(usize, BigRational)],
    ) -> Result<Option<(BigInt, BigInt)>> {
        let pivot_col = self.basis.pivots()[depth];
        let mut objective = vec![BigRational::zero(); self.polytope.dim()];
        objective[pivot_col] = BigRational::from_integer(BigInt::from(1));

        let lo = match solve_dilation_lp(
            self.polytope,
            self.n,
            Some((&objective, Direction::Min)),
            self.slices,
            fixed,
        )? {
            LpOutcome::Optimal { value, .. } => value,
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => unreachable!("dilation LPs are bounded"),
        };
        let hi = match solve_dilation_lp(
            self.polytope,
            self.n,
            Some((&objective, Direction::Max)),
            self.slices,
            fixed,
        )? {
            LpOutcome::Optimal { value, .. } => value,
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => unreachable!("dilation LPs are bounded"),
        };

        // x[pivot] = partial + y * pivot_entry with pivot_entry > 0.
        let partial = rational(&partial_x[pivot_col]);
        let pivot_entry = rational(self.basis.basis().get(depth, pivot_col));
        let y_lo = ((lo - &partial) / &pivot_entry).ceil().to_integer();
        let y_hi = ((hi - &partial) / &pivot_entry).floor().to_integer();
        Ok(Some((y_lo, y_hi)))
    }

    fn recurse(
        &self,
        depth: usize,
        y: &mut Vec<BigInt>,
        partial_x: &mut Vec<BigInt>,
        fixed: &mut Vec<(usize, BigRational)>,
        out: &mut Vec<Vec<BigInt>>,
    ) -> Result<()> {
        self.visit_node(y)?;
        if depth == self.basis.rank() {
            if contains(self.polytope, self.n, partial_x, self.slices)? {
                out.push(partial_x.clone());
            }
            return Ok(());
        }
        let Some((y_lo, y_hi)) = self.coordinate_range(depth, partial_x, fixed)? else {
            return Ok(());
        };
        let mut yi = y_lo;
        while yi <= y_hi {
            self.step_into(depth, &yi, y, partial_x, fixed);
            self.recurse(depth + 1, y, partial_x, fixed, out)?;
            self.step_out_of(depth, y, partial_x, fixed);
            yi += 1;
        }
        Ok(())
    }

    fn step_into(
        &self,
        depth: usize,
        yi: &BigInt,
        y: &mut Vec<BigInt>,
        partial_x: &mut [BigInt],
        fixed: &mut Vec<(usize, BigRational)>,
    ) {
        for (c, slot) in partial_x.iter_mut().enumerate() {
            *slot += yi * self.basis.basis().get(depth, c);
        }
        let pivot_col = self.basis.pivots()[depth];
        fixed.push((pivot_col, rational(&partial_x[pivot_col])));
        y.push(yi.clone());
    }

    fn step_out_of(
        &self,
        depth: usize,
        y: &mut Vec<BigInt>,
        partial_x: &mut [BigInt],
        fixed: &mut Vec<(usize, BigRational)>,
    ) {
        let yi = y.pop().expect("matching step_into");
        fixed.pop();
        for (c, slot) in partial_x.iter_mut().enumerate() {
            *slot -= &yi * self.basis.basis().get(depth, c);
        }
    }
}

/// All points of `nP` in the given lattice that satisfy the slices, in
/// lexicographic lattice-coordinate order. The first coordinate level is
/// explored in parallel; output order does not depend on thread count.
pub fn enumerate_lattice_points(
    p: &VPolytope,
    n: u32,
    basis: &LatticeBasis,
    slices: &[SliceConstraint],
    opts: &EnumOptions,
) -> Result<Vec<Vec<BigInt>>> {
    if basis.ambient_dim() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "lattice in dimension {}, polytope in dimension {}",
            basis.ambient_dim(),
            p.dim()
        )));
    }
    for s in slices {
        s.check_dim(p.dim())?;
    }
    let ctx = EnumContext {
        polytope: p,
        n,
        basis,
        slices,
        max_nodes: opts.max_nodes,
        nodes: AtomicU64::new(0),
    };

    if basis.rank() == 0 {
        let origin = vec![BigInt::zero(); p.dim()];
        if contains(p, n, &origin, slices)? {
            return Ok(vec![origin]);
        }
        return Ok(Vec::new());
    }

    let zero_x = vec![BigInt::zero(); p.dim()];
    let Some((y_lo, y_hi)) = ctx.coordinate_range(0, &zero_x, &[])? else {
        return Ok(Vec::new());
    };
    let mut first_values = Vec::new();
    let mut yi = y_lo;
    while yi <= y_hi {
        first_values.push(yi.clone());
        yi += 1;
    }

    let branches: Vec<Result<Vec<Vec<BigInt>>>> = first_values
        .into_par_iter()
        .map(|y0| {
            let mut y = Vec::new();
            let mut partial_x = vec![BigInt::zero(); p.dim()];
            let mut fixed = Vec::new();
            let mut out = Vec::new();
            ctx.step_into(0, &y0, &mut y, &mut partial_x, &mut fixed);
            ctx.recurse(1, &mut y, &mut partial_x, &mut fixed, &mut out)?;
            Ok(out)
        })
        .collect();

    let mut points = Vec::new();
    for branch in branches {
        points.extend(branch?);
    }
    Ok(points)
}

/// The number of lattice points of the sliced dilation.
pub fn count_slices(
    p: &VPolytope,
    n: u32,
    basis: &LatticeBasis,
    slices: &[SliceConstraint],
    opts: &EnumOptions,
) -> Result<BigUint> {
    Ok(BigUint::from(
        enumerate_lattice_points(p, n, basis, slices, opts)?.len(),
    ))
}

/// Re-evaluates an LP certificate: lambda >= 0, sum lambda = n, and the
/// claimed value is exactly `objective . (sum lambda_i v_i)`.
pub fn certificate_holds(
    p: &VPolytope,
    n: u32,
    objective: &[BigRational],
    solution: &LpSolution,
) -> bool {
    if solution.lambda.len() != p.num_vertices() {
        return false;
    }
    if solution.lambda.iter().any(BigRational::is_negative) {
        return false;
    }
    let total: BigRational = solution.lambda.iter().sum();
    if total != BigRational::from_integer(BigInt::from(n)) {
        return false;
    }
    let mut x = vec![BigRational::zero(); p.dim()];
    for (lambda, v) in solution.lambda.iter().zip(&p.vertices) {
        if lambda.is_zero() {
            continue;
        }
        for (slot, coord) in x.iter_mut().zip(v) {
            *slot += lambda * rational(coord);
        }
    }
    let value: BigRational = objective.iter().zip(&x).map(|(o, xi)| o * xi).sum();
    value == solution.value
}
