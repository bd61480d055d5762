//! The group-based model map: polytope vertices from leaf assignments.
//!
//! Fixing a tree and a group fixes a coordinate layout: one block of |G|
//! coordinates per edge, edges in canonical clade order, group elements in
//! canonical enumeration order. A leaf assignment determines a group value
//! on every edge (the sum over the edge's descendant leaves) and hence a
//! 0/1 exponent vector with one 1 per edge block. Those vectors are the
//! polytope vertices; everything downstream counts their sums.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::abelian::{FiniteAbelianGroup, GroupElement};
use crate::error::{Error, Result};
use crate::hilbert::Multidegree;
use crate::tree::{EdgeRef, RootedPhyloTree};

/// A group value for every non-root leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafAssignment(BTreeMap<u32, GroupElement>);

impl LeafAssignment {
    pub fn new(values: BTreeMap<u32, GroupElement>) -> Self {
        LeafAssignment(values)
    }

    pub fn get(&self, leaf: u32) -> Option<&GroupElement> {
        self.0.get(&leaf)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &GroupElement)> {
        self.0.iter().map(|(&l, g)| (l, g))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for LeafAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(l, g)| format!("{l}:{g}")).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Shared layout identity for exponent vectors: the tree, the group and
/// the frozen edge order.
#[derive(Debug)]
pub struct ModelContext {
    tree: RootedPhyloTree,
    group: FiniteAbelianGroup,
    edges: Vec<EdgeRef>,
    edge_index: BTreeMap<EdgeRef, usize>,
    /// Per edge: its leaf label, or the indices of its child edges.
    composition: Vec<EdgeComposition>,
    /// Edge indices ordered so children come before parents.
    topo: Vec<usize>,
}

#[derive(Debug)]
enum EdgeComposition {
    Leaf(u32),
    Internal(Vec<usize>),
}

impl ModelContext {
    fn layout_eq(&self, other: &Self) -> bool {
        self.tree.canonical_form() == other.tree.canonical_form() && self.group == other.group
    }
}

/// The model polytope of a tree over a group, presented by its vertex map.
#[derive(Clone, Debug)]
pub struct ModelPolytope {
    ctx: Arc<ModelContext>,
}

impl ModelPolytope {
    pub fn new(tree: RootedPhyloTree, group: FiniteAbelianGroup) -> Result<Self> {
        let edges: Vec<EdgeRef> = tree.edges().to_vec();
        let edge_index: BTreeMap<EdgeRef, usize> =
            edges.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();

        let mut composition = Vec::with_capacity(edges.len());
        for e in &edges {
            if e.len() == 1 {
                composition.push(EdgeComposition::Leaf(*e.leaves().iter().next().unwrap()));
            } else {
                // Child edges are the maximal proper sub-clades.
                let subs: Vec<usize> = edges
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| f.len() < e.len() && f.leaves().is_subset(e.leaves()))
                    .map(|(i, _)| i)
                    .collect();
                let children: Vec<usize> = subs
                    .iter()
                    .copied()
                    .filter(|&i| {
                        !subs.iter().any(|&j| {
                            j != i
                                && edges[i].leaves().is_subset(edges[j].leaves())
                                && edges[i].len() < edges[j].len()
                        })
                    })
                    .collect();
                composition.push(EdgeComposition::Internal(children));
            }
        }
        let mut topo: Vec<usize> = (0..edges.len()).collect();
        topo.sort_by_key(|&i| edges[i].len());

        Ok(ModelPolytope {
            ctx: Arc::new(ModelContext {
                tree,
                group,
                edges,
                edge_index,
                composition,
                topo,
            }),
        })
    }

    pub fn tree(&self) -> &RootedPhyloTree {
        &self.ctx.tree
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.ctx.group
    }

    /// Ambient dimension: |E(T)| * |G|.
    pub fn dim(&self) -> usize {
        self.ctx.edges.len() * self.ctx.group.order() as usize
    }

    pub fn edges(&self) -> &[EdgeRef] {
        &self.ctx.edges
    }

    /// Width of one edge block.
    pub fn block_width(&self) -> usize {
        self.ctx.group.order() as usize
    }

    /// First coordinate of the edge's block.
    pub fn block_offset(&self, e: &EdgeRef) -> Result<usize> {
        let idx = self
            .ctx
            .edge_index
            .get(e)
            .ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
        Ok(idx * self.block_width())
    }

    /// Number of polytope vertices: |G|^(L-1).
    pub fn vertex_count(&self) -> u128 {
        let leaves = self.ctx.tree.num_leaves() as u32 - 1;
        (u128::from(self.ctx.group.order())).pow(leaves)
    }

    /// The group value on every edge: the G-sum of the assignment over the
    /// edge's descendant leaves, accumulated from leaf edges upward.
    pub fn edge_values(&self, assignment: &LeafAssignment) -> Result<BTreeMap<EdgeRef, GroupElement>> {
        let values = self.edge_value_vec(assignment)?;
        Ok(self
            .ctx
            .edges
            .iter()
            .cloned()
            .zip(values)
            .collect())
    }

    fn edge_value_vec(&self, assignment: &LeafAssignment) -> Result<Vec<GroupElement>> {
        let non_root = self.ctx.tree.non_root_leaves();
        if assignment.len() != non_root.len() {
            return Err(Error::IncompleteAssignment(format!(
                "assignment covers {} leaves, tree has {} non-root leaves",
                assignment.len(),
                non_root.len()
            )));
        }
        let group = &self.ctx.group;
        let mut values: Vec<Option<GroupElement>> = vec![None; self.ctx.edges.len()];
        for &i in &self.ctx.topo {
            let v = match &self.ctx.composition[i] {
                EdgeComposition::Leaf(label) => assignment
                    .get(*label)
                    .ok_or_else(|| {
                        Error::IncompleteAssignment(format!("leaf {label} not assigned"))
                    })?
                    .clone(),
                EdgeComposition::Internal(children) => {
                    let mut acc = group.identity();
                    for &c in children {
                        acc = group.add(&acc, values[c].as_ref().expect("topo order"))?;
                    }
                    acc
                }
            };
            group.validate(&v)?;
            values[i] = Some(v);
        }
        Ok(values.into_iter().map(|v| v.expect("all edges set")).collect())
    }

    /// The 0/1 exponent vector of one leaf assignment: block `e` carries a
    /// single 1 at the position of the edge's group value.
    pub fn vertex_of(&self, assignment: &LeafAssignment) -> Result<ExponentVector> {
        let values = self.edge_value_vec(assignment)?;
        let w = self.block_width();
        let mut coords = vec![0u8; self.dim()];
        for (i, v) in values.iter().enumerate() {
            let pos = self.ctx.group.index_of(v)? as usize;
            coords[i * w + pos] = 1;
        }
        Ok(ExponentVector { ctx: Arc::clone(&self.ctx), coords })
    }

    /// All leaf assignments in lexicographic order (leaves ascending, the
    /// first leaf most significant, group elements in enumeration order).
    pub fn assignments(&self, max_vertices: u64) -> Result<AssignmentIter> {
        let total = self.vertex_count();
        if total > u128::from(max_vertices) {
            return Err(Error::budget(format!(
                "{total} vertices exceed the cap of {max_vertices}; use a decomposition plan"
            )));
        }
        Ok(AssignmentIter {
            polytope: self.clone(),
            leaves: self.ctx.tree.non_root_leaves(),
            counters: vec![0; self.ctx.tree.num_leaves() - 1],
            done: false,
        })
    }

    /// All polytope vertices, one per assignment, in assignment order.
    pub fn all_vertices(&self, max_vertices: u64) -> Result<Vec<ExponentVector>> {
        self.assignments(max_vertices)?
            .map(|a| self.vertex_of(&a))
            .collect()
    }

    /// Raw vertex coordinate rows, for the counting and polyhedral engines.
    pub fn vertex_rows(&self, max_vertices: u64) -> Result<Vec<Vec<u8>>> {
        Ok(self
            .all_vertices(max_vertices)?
            .into_iter()
            .map(|v| v.coords)
            .collect())
    }
}

pub struct AssignmentIter {
    polytope: ModelPolytope,
    leaves: Vec<u32>,
    counters: Vec<u64>,
    done: bool,
}

impl Iterator for AssignmentIter {
    type Item = LeafAssignment;

    fn next(&mut self) -> Option<LeafAssignment> {
        if self.done {
            return None;
        }
        let group = self.polytope.group();
        let map: BTreeMap<u32, GroupElement> = self
            .leaves
            .iter()
            .zip(&self.counters)
            .map(|(&l, &i)| (l, group.element_at(i).expect("counter in range")))
            .collect();
        // Odometer step, rightmost fastest.
        let order = group.order();
        let mut i = self.counters.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.counters[i] += 1;
            if self.counters[i] < order {
                break;
            }
            self.counters[i] = 0;
        }
        Some(LeafAssignment::new(map))
    }
}

/// A non-negative integer vector in the edge-block layout of one model
/// polytope; vertices are its 0/1 instances.
#[derive(Clone, Debug)]
pub struct ExponentVector {
    ctx: Arc<ModelContext>,
    coords: Vec<u8>,
}

impl PartialEq for ExponentVector {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.ctx.layout_eq(&other.ctx)
    }
}

impl Eq for ExponentVector {}

impl ExponentVector {
    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    /// The block of coordinates of one edge.
    pub fn block(&self, e: &EdgeRef) -> Result<&[u8]> {
        let idx = self
            .ctx
            .edge_index
            .get(e)
            .ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
        let w = self.ctx.group.order() as usize;
        Ok(&self.coords[idx * w..(idx + 1) * w])
    }

    /// Per-socket multidegrees: each socket's edge block read off the
    /// vector (a unit vector for a vertex, block sums for a sum of
    /// vertices).
    pub fn multidegree_at(&self, sockets: &[EdgeRef]) -> Result<Vec<Multidegree>> {
        sockets
            .iter()
            .map(|e| {
                Ok(Multidegree::new(
                    self.block(e)?.iter().map(|&c| u32::from(c)).collect(),
                ))
            })
            .collect()
    }

    /// Componentwise sum; fails on layout mismatch or coordinate overflow.
    pub fn add(&self, other: &ExponentVector) -> Result<ExponentVector> {
        if !(Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.layout_eq(&other.ctx)) {
            return Err(Error::Incompatible(
                "exponent vectors belong to different polytopes".into(),
            ));
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| {
                a.checked_add(b).ok_or_else(|| {
                    Error::budget("coordinate exceeds 255; dilation too large".to_string())
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(ExponentVector { ctx: Arc::clone(&self.ctx), coords })
    }

    /// True for 0/1 vectors with exactly one 1 per edge block.
    pub fn is_vertex(&self) -> bool {
        let w = self.ctx.group.order() as usize;
        self.coords.chunks_exact(w).all(|block| {
            block.iter().all(|&c| c <= 1) && block.iter().map(|&c| u32::from(c)).sum::<u32>() == 1
        })
    }

    /// The common block sum, when every edge block sums to the same degree.
    pub fn degree(&self) -> Result<u32> {
        let w = self.ctx.group.order() as usize;
        let mut degree = None;
        for block in self.coords.chunks_exact(w) {
            let s: u32 = block.iter().map(|&c| u32::from(c)).sum();
            match degree {
                None => degree = Some(s),
                Some(d) if d != s => {
                    return Err(Error::DegreeMismatch(format!(
                        "edge blocks sum to both {d} and {s}"
                    )))
                }
                _ => {}
            }
        }
        degree.ok_or_else(|| Error::DimensionMismatch("empty vector".into()))
    }
}
