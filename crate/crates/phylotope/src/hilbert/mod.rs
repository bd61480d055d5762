//! The counting heart: Hilbert function values of the model's toric ring
//! as distinct n-fold vertex sums, multigraded fiber count tables keyed by
//! socket multidegrees, toric fiber product composition over decomposition
//! plans, and exact Ehrhart interpolation.

mod cache;
mod dedup;
mod ehrhart;
pub mod plan;

pub use cache::TableCache;
pub use ehrhart::{ehrhart_interpolate, EhrhartPolynomial};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelPolytope;
use crate::tree::EdgeRef;

/// Enumeration budgets for the counting engine.
#[derive(Clone, Debug)]
pub struct CountOptions {
    /// Cap on the number of polytope vertices.
    pub max_vertices: u64,
    /// Cap on the number of vertex multisets, C(V+n-1, n).
    pub max_multisets: u128,
    /// Approximate memory budget for in-core deduplication; larger
    /// enumerations spill sorted runs to temporary files.
    pub memory_bytes: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            max_vertices: 1 << 20,
            max_multisets: 1 << 27,
            memory_bytes: 8 << 30,
        }
    }
}

/// A vector of |G| non-negative integers indexed by the canonical group
/// order; the grading value of a socket edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multidegree(Vec<u32>);

impl Multidegree {
    pub fn new(values: Vec<u32>) -> Self {
        Multidegree(values)
    }

    /// The unit multidegree with a 1 at `position`.
    pub fn unit(len: usize, position: usize) -> Self {
        let mut v = vec![0; len];
        v[position] = 1;
        Multidegree(v)
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The total degree of a monomial with this multidegree.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&v| u64::from(v)).sum()
    }

    /// All multidegrees of length `len` and total `n`, in lexicographic
    /// order.
    pub fn all_with_total(len: usize, n: u32) -> Vec<Multidegree> {
        let mut out = Vec::new();
        let mut current = vec![0u32; len];
        fn rec(current: &mut Vec<u32>, pos: usize, rest: u32, out: &mut Vec<Multidegree>) {
            if pos + 1 == current.len() {
                current[pos] = rest;
                out.push(Multidegree(current.clone()));
                return;
            }
            for v in 0..=rest {
                current[pos] = v;
                rec(current, pos + 1, rest - v, out);
            }
            current[pos] = 0;
        }
        if len == 0 {
            if n == 0 {
                out.push(Multidegree(Vec::new()));
            }
            return out;
        }
        rec(&mut current, 0, n, &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// One socket of a fiber table: its name and the clade of its edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocketMeta {
    pub name: String,
    pub clade: Vec<u32>,
}

/// Identifying metadata of a fiber count table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMeta {
    pub tree: String,
    pub group: String,
    pub n: u32,
    pub sockets: Vec<SocketMeta>,
}

impl TableMeta {
    /// Canonical cache key.
    pub fn key(&self) -> String {
        let sockets: Vec<String> = self
            .sockets
            .iter()
            .map(|s| {
                let clade: Vec<String> = s.clade.iter().map(|l| l.to_string()).collect();
                format!("{}:{{{}}}", s.name, clade.join(","))
            })
            .collect();
        format!("{}|{}|{}|{}", self.tree, self.group, self.n, sockets.join(";"))
    }
}

/// The multigraded Hilbert function of one tree at degree `n`: exact
/// counts of distinct n-fold vertex sums, keyed by the multidegrees of the
/// socket edges. Zero cells are omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCountTable {
    meta: TableMeta,
    cells: BTreeMap<Vec<Multidegree>, BigUint>,
}

#[derive(Serialize, Deserialize)]
struct CellJson {
    key: Vec<Multidegree>,
    count: String,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    meta: TableMeta,
    cells: Vec<CellJson>,
}

impl FiberCountTable {
    pub fn new(meta: TableMeta) -> Self {
        FiberCountTable { meta, cells: BTreeMap::new() }
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn n(&self) -> u32 {
        self.meta.n
    }

    /// Number of nonzero cells.
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Adds to a cell, validating key arity and totals.
    pub fn add(&mut self, key: Vec<Multidegree>, count: BigUint) -> Result<()> {
        if key.len() != self.meta.sockets.len() {
            return Err(Error::SocketMismatch(format!(
                "key has {} multidegrees, table has {} sockets",
                key.len(),
                self.meta.sockets.len()
            )));
        }
        for u in &key {
            if u.total() != u64::from(self.meta.n) {
                return Err(Error::DegreeMismatch(format!(
                    "multidegree {u} has total {} in a degree-{} table",
                    u.total(),
                    self.meta.n
                )));
            }
        }
        if count.is_zero() {
            return Ok(());
        }
        *self.cells.entry(key).or_insert_with(BigUint::zero) += count;
        Ok(())
    }

    /// The count of a key; absent cells are zero.
    pub fn get(&self, key: &[Multidegree]) -> BigUint {
        self.cells.get(key).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Vec<Multidegree>, &BigUint)> {
        self.cells.iter()
    }

    /// Sum over all cells: the single-graded Hilbert value.
    pub fn total(&self) -> BigUint {
        self.cells.values().sum()
    }

    /// Position of a socket by name.
    pub fn socket_position(&self, name: &str) -> Option<usize> {
        self.meta.sockets.iter().position(|s| s.name == name)
    }

    /// Sums cells over the sockets not in `keep` (positions into the
    /// socket list, in the order they should appear in the result).
    pub fn marginal(&self, keep: &[usize]) -> Result<FiberCountTable> {
        for &p in keep {
            if p >= self.meta.sockets.len() {
                return Err(Error::OutOfRange(format!("socket position {p}")));
            }
        }
        let meta = TableMeta {
            sockets: keep.iter().map(|&p| self.meta.sockets[p].clone()).collect(),
            ..self.meta.clone()
        };
        let mut out = FiberCountTable::new(meta);
        for (key, count) in &self.cells {
            let sub: Vec<Multidegree> = keep.iter().map(|&p| key[p].clone()).collect();
            out.add(sub, count.clone())?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<CellJson> = self
            .cells
            .iter()
            .map(|(key, count)| CellJson { key: key.clone(), count: count.to_string() })
            .collect();
        serde_json::to_value(TableJson { meta: self.meta.clone(), cells })
            .expect("table serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("table serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: TableJson = serde_json::from_str(text)?;
        let mut table = FiberCountTable::new(parsed.meta);
        for cell in parsed.cells {
            let count = cell
                .count
                .parse::<BigUint>()
                .map_err(|_| Error::parse(format!("bad count {:?}", cell.count)))?;
            table.add(cell.key, count)?;
        }
        Ok(table)
    }
}

fn socket_metas(
    polytope: &ModelPolytope,
    sockets: &[(String, EdgeRef)],
) -> Result<Vec<SocketMeta>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut metas = Vec::with_capacity(sockets.len());
    for (name, edge) in sockets {
        if !polytope.tree().is_pendant(edge)? {
            return Err(Error::NotPendant(edge.to_string()));
        }
        if !seen.insert(name.clone()) {
            return Err(Error::SocketMismatch(format!("duplicate socket name {name:?}")));
        }
        metas.push(SocketMeta {
            name: name.clone(),
            clade: edge.leaves().iter().copied().collect(),
        });
    }
    Ok(metas)
}

/// Checks the multiset budget and materializes the vertex rows.
fn prepare_vertices(
    polytope: &ModelPolytope,
    n: u32,
    opts: &CountOptions,
) -> Result<(Vec<Vec<u8>>, u128)> {
    if n > 255 {
        return Err(Error::budget(format!(
            "dilation {n} exceeds 255, the limit of byte-packed coordinates"
        )));
    }
    let vertices = polytope.vertex_rows(opts.max_vertices)?;
    let multisets = multiset_count(vertices.len() as u128, n);
    if multisets > opts.max_multisets {
        return Err(Error::budget(format!(
            "{multisets} vertex multisets at degree {n} exceed the cap of {}; \
             use a decomposition plan",
            opts.max_multisets
        )));
    }
    Ok((vertices, multisets))
}

/// C(v+n-1, n), the number of n-multisets of v vertices.
pub(crate) fn multiset_count(v: u128, n: u32) -> u128 {
    if v == 0 {
        return if n == 0 { 1 } else { 0 };
    }
    let mut result = num_bigint::BigUint::from(1u32);
    for i in 0..u128::from(n) {
        result *= num_bigint::BigUint::from(v + i);
        result /= num_bigint::BigUint::from(i + 1);
    }
    // Saturate at u128::MAX for comparison against caps.
    result.try_into().unwrap_or(u128::MAX)
}

/// The Hilbert function value of the model's toric ring at degree `n`:
/// the number of distinct sums of `n` polytope vertices.
pub fn hilbert_value(polytope: &ModelPolytope, n: u32, opts: &CountOptions) -> Result<BigUint> {
    let (vertices, multisets) = prepare_vertices(polytope, n, opts)?;
    let count = dedup::for_each_distinct_sum(
        &vertices,
        polytope.dim(),
        n,
        opts.memory_bytes,
        multisets,
        |_| {},
    )?;
    Ok(BigUint::from(count))
}

/// Distinct n-fold vertex sums grouped by their socket-block multidegrees.
pub fn fiber_table(
    polytope: &ModelPolytope,
    n: u32,
    sockets: &[(String, EdgeRef)],
    opts: &CountOptions,
) -> Result<FiberCountTable> {
    let metas = socket_metas(polytope, sockets)?;
    let (vertices, multisets) = prepare_vertices(polytope, n, opts)?;

    let width = polytope.block_width();
    let offsets: Vec<usize> = sockets
        .iter()
        .map(|(_, e)| polytope.block_offset(e))
        .collect::<Result<Vec<usize>>>()?;

    let mut tally: BTreeMap<Vec<Multidegree>, u64> = BTreeMap::new();
    dedup::for_each_distinct_sum(
        &vertices,
        polytope.dim(),
        n,
        opts.memory_bytes,
        multisets,
        |sum| {
            let key: Vec<Multidegree> = offsets
                .iter()
                .map(|&o| {
                    Multidegree::new(sum[o..o + width].iter().map(|&c| u32::from(c)).collect())
                })
                .collect();
            *tally.entry(key).or_insert(0) += 1;
        },
    )?;

    let meta = TableMeta {
        tree: polytope.tree().canonical_form().to_string(),
        group: polytope.group().to_string(),
        n,
        sockets: metas,
    };
    let mut table = FiberCountTable::new(meta);
    for (key, count) in tally {
        table.add(key, BigUint::from(count))?;
    }
    Ok(table)
}

/// `fiber_table` with a cache in front; the flag reports a cache hit.
pub fn fiber_table_cached(
    polytope: &ModelPolytope,
    n: u32,
    sockets: &[(String, EdgeRef)],
    opts: &CountOptions,
    cache: Option<&TableCache>,
) -> Result<(FiberCountTable, bool)> {
    if let Some(cache) = cache {
        let meta = TableMeta {
            tree: polytope.tree().canonical_form().to_string(),
            group: polytope.group().to_string(),
            n,
            sockets: socket_metas(polytope, sockets)?,
        };
        if let Some(table) = cache.lookup(&meta) {
            return Ok((table, true));
        }
        let table = fiber_table(polytope, n, sockets, opts)?;
        cache.store(&table)?;
        Ok((table, false))
    } else {
        Ok((fiber_table(polytope, n, sockets, opts)?, false))
    }
}
