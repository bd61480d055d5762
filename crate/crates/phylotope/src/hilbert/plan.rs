//! Decomposition plans: trees cut into socketed pieces, glued back by
//! identifying socket edges, and composed at the counting level through
//! the toric fiber product.
//!
//! Hilbert values multiply fiberwise: the degree-n value of a glued tree
//! is the sum, over assignments of a total-degree-n multidegree to every
//! socket, of the product of the component fiber counts at the assigned
//! keys. Exposed sockets (named in exactly one component) stay unsummed
//! and key the composed table.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::abelian::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::hilbert::{
    fiber_table_cached, CountOptions, FiberCountTable, Multidegree, SocketMeta, TableCache,
    TableMeta,
};
use crate::model::ModelPolytope;
use crate::tree::{EdgeRef, RootSpec, RootedPhyloTree};

/// One socketed piece of a decomposition.
#[derive(Clone, Debug)]
pub struct PlanComponent {
    pub name: String,
    pub tree: RootedPhyloTree,
}

impl PlanComponent {
    /// Sockets in name order: the socket order of this component's tables.
    pub fn sockets(&self) -> Vec<(String, EdgeRef)> {
        self.tree.sockets_by_edge().into_iter().collect()
    }
}

/// A collection of components whose paired sockets glue to a single tree.
#[derive(Clone, Debug)]
pub struct DecompositionPlan {
    name: Option<String>,
    components: Vec<PlanComponent>,
}

#[derive(Deserialize)]
struct PlanJson {
    #[serde(default)]
    name: Option<String>,
    components: Vec<ComponentJson>,
}

#[derive(Deserialize)]
struct ComponentJson {
    name: String,
    newick: String,
    #[serde(default)]
    root: Option<RootJson>,
    #[serde(default)]
    sockets: BTreeMap<String, SocketValueJson>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RootJson {
    Leaf(u32),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SocketValueJson {
    Leaf(u32),
    Clade(String),
}

impl DecompositionPlan {
    pub fn new(name: Option<String>, components: Vec<PlanComponent>) -> Result<Self> {
        let plan = DecompositionPlan { name, components };
        plan.validate()?;
        Ok(plan)
    }

    /// Parses the plan file format: `{"components": [{"name", "newick",
    /// "root", "sockets": {name: leaf-label-or-clade}}]}`. Socket leaves
    /// may also be declared inline with `S<name>` labels in the Newick
    /// text; roots may name a socket as `"S<name>"`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: PlanJson = serde_json::from_str(text)?;
        let mut components = Vec::new();
        for c in parsed.components {
            let root = match &c.root {
                None => None,
                Some(RootJson::Leaf(l)) => Some(RootSpec::Leaf(*l)),
                Some(RootJson::Text(t)) => {
                    let name = t.strip_prefix('S').ok_or_else(|| {
                        Error::InvalidPlan(format!(
                            "component {:?}: root {t:?} must be a leaf label or S<name>",
                            c.name
                        ))
                    })?;
                    Some(RootSpec::Socket(name.to_string()))
                }
            };
            let mut tree = RootedPhyloTree::parse(&c.newick, root.as_ref())?;
            for (name, value) in &c.sockets {
                let label = match value {
                    SocketValueJson::Leaf(l) => *l,
                    SocketValueJson::Clade(s) => tree.pendant_leaf_for(&EdgeRef::parse(s)?)?,
                };
                tree = tree.with_socket(name, label)?;
            }
            components.push(PlanComponent { name: c.name, tree });
        }
        DecompositionPlan::new(parsed.name, components)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn components(&self) -> &[PlanComponent] {
        &self.components
    }

    /// Socket name -> indices of the components carrying it.
    pub fn socket_incidence(&self) -> BTreeMap<String, Vec<usize>> {
        let mut incidence: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.components.iter().enumerate() {
            for name in c.tree.sockets().keys() {
                incidence.entry(name.clone()).or_default().push(i);
            }
        }
        incidence
    }

    /// Sockets shared by two components.
    pub fn paired_sockets(&self) -> Vec<String> {
        self.socket_incidence()
            .into_iter()
            .filter(|(_, v)| v.len() == 2)
            .map(|(k, _)| k)
            .collect()
    }

    /// Sockets named in exactly one component.
    pub fn exposed_sockets(&self) -> Vec<String> {
        self.socket_incidence()
            .into_iter()
            .filter(|(_, v)| v.len() == 1)
            .map(|(k, _)| k)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidPlan("plan has no components".into()));
        }
        let mut names = BTreeSet::new();
        for c in &self.components {
            if !names.insert(&c.name) {
                return Err(Error::InvalidPlan(format!("duplicate component name {:?}", c.name)));
            }
        }
        let incidence = self.socket_incidence();
        for (name, comps) in &incidence {
            if comps.len() > 2 {
                return Err(Error::InvalidPlan(format!(
                    "socket {name:?} appears in {} components",
                    comps.len()
                )));
            }
        }
        // The component-gluing graph must be a tree: paired sockets are its
        // edges.
        let paired: Vec<&Vec<usize>> =
            incidence.values().filter(|v| v.len() == 2).collect();
        if paired.len() + 1 != self.components.len() {
            return Err(Error::InvalidPlan(format!(
                "{} paired sockets cannot glue {} components into a tree",
                paired.len(),
                self.components.len()
            )));
        }
        let mut reached = vec![false; self.components.len()];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(i) = stack.pop() {
            for pair in &paired {
                if pair.contains(&i) {
                    for &j in pair.iter() {
                        if !reached[j] {
                            reached[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        if !reached.iter().all(|&r| r) {
            return Err(Error::InvalidPlan("gluing graph is disconnected or cyclic".into()));
        }
        Ok(())
    }

    /// Reconstructs the glued tree by identifying each paired socket's
    /// pendant edges. Exposed sockets survive as sockets of the result.
    pub fn glue(&self) -> Result<RootedPhyloTree> {
        // Assemble all component graphs into one vertex space.
        let mut adjacency: Vec<Vec<usize>> = Vec::new();
        let mut labels: Vec<Option<u32>> = Vec::new();
        let mut offsets = Vec::new();
        let mut roots = Vec::new();
        for c in &self.components {
            let (adj, labs, root) = c.tree.graph_parts();
            let offset = labels.len();
            offsets.push(offset);
            roots.push(offset + root);
            for row in adj {
                adjacency.push(row.into_iter().map(|v| v + offset).collect());
            }
            labels.extend(labs);
        }

        let vertex_of_label = |comp: usize, label: u32| -> usize {
            let c = &self.components[comp];
            let (_, labs, _) = c.tree.graph_parts();
            offsets[comp] + labs.iter().position(|l| *l == Some(label)).expect("label exists")
        };

        let incidence = self.socket_incidence();
        let mut dead = vec![false; labels.len()];
        for (name, comps) in &incidence {
            if comps.len() != 2 {
                continue;
            }
            // Identify the two socket edges: drop both socket leaves and
            // connect their neighbors.
            let mut neighbors = Vec::new();
            for &ci in comps {
                let label = self.components[ci].tree.sockets()[name];
                let v = vertex_of_label(ci, label);
                if adjacency[v].len() != 1 {
                    return Err(Error::InvalidPlan(format!("socket {name:?} not a leaf")));
                }
                let nb = adjacency[v][0];
                adjacency[nb].retain(|&w| w != v);
                adjacency[v].clear();
                dead[v] = true;
                neighbors.push(nb);
            }
            adjacency[neighbors[0]].push(neighbors[1]);
            adjacency[neighbors[1]].push(neighbors[0]);
        }

        // The glued root: the unique component root that is not a paired
        // socket leaf.
        let root_candidates: Vec<usize> = (0..self.components.len())
            .filter(|&i| !dead[roots[i]])
            .collect();
        let root_vertex = match root_candidates.as_slice() {
            [only] => roots[*only],
            _ => {
                return Err(Error::InvalidPlan(format!(
                    "{} components rooted away from a paired socket; need exactly 1",
                    root_candidates.len()
                )))
            }
        };

        // Compact the surviving vertices.
        let alive: Vec<usize> = (0..labels.len()).filter(|&v| !dead[v]).collect();
        let remap: BTreeMap<usize, usize> =
            alive.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let new_adjacency: Vec<Vec<usize>> = alive
            .iter()
            .map(|&v| adjacency[v].iter().map(|w| remap[w]).collect())
            .collect();
        let new_labels: Vec<Option<u32>> = alive.iter().map(|&v| labels[v]).collect();

        // Surviving sockets are the exposed ones.
        let mut sockets = BTreeMap::new();
        let mut socket_labels = BTreeSet::new();
        for (name, comps) in &incidence {
            if comps.len() == 1 {
                let ci = comps[0];
                let label = self.components[ci].tree.sockets()[name];
                sockets.insert(name.clone(), label);
                socket_labels.insert(label);
            }
        }
        for (i, c) in self.components.iter().enumerate() {
            for l in c.tree.leaf_labels() {
                if c.tree.is_socket_label(l) && !dead[vertex_of_label(i, l)] {
                    socket_labels.insert(l);
                }
            }
        }

        RootedPhyloTree::from_graph(
            new_adjacency,
            new_labels,
            remap[&root_vertex],
            sockets,
            socket_labels,
        )
        .map_err(|e| match e {
            Error::InvalidTree(msg) => Error::InvalidPlan(format!("glued graph: {msg}")),
            other => other,
        })
    }
}

/// Validates a component table against its plan component.
fn check_table(component: &PlanComponent, table: &FiberCountTable, n: u32) -> Result<()> {
    let meta = table.meta();
    if meta.n != n {
        return Err(Error::DegreeMismatch(format!(
            "table for {:?} has degree {}, expected {n}",
            component.name, meta.n
        )));
    }
    if meta.tree != component.tree.canonical_form() {
        return Err(Error::SocketMismatch(format!(
            "table tree {:?} does not match component {:?}",
            meta.tree, component.name
        )));
    }
    let expected: Vec<SocketMeta> = component
        .sockets()
        .into_iter()
        .map(|(name, edge)| SocketMeta {
            name,
            clade: edge.leaves().iter().copied().collect(),
        })
        .collect();
    if meta.sockets != expected {
        return Err(Error::SocketMismatch(format!(
            "table sockets {:?} do not match component {:?}",
            meta.sockets, component.name
        )));
    }
    Ok(())
}

/// Composes component fiber tables over the plan, keeping `exposed`
/// sockets unsummed. With no exposed sockets the result has a single cell
/// carrying the glued tree's Hilbert value.
pub fn tfp_fiber_table(
    plan: &DecompositionPlan,
    tables: &[FiberCountTable],
    n: u32,
    exposed: &[String],
) -> Result<FiberCountTable> {
    if tables.len() != plan.components().len() {
        return Err(Error::SocketMismatch(format!(
            "{} tables for {} components",
            tables.len(),
            plan.components().len()
        )));
    }
    let group = tables
        .first()
        .map(|t| t.meta().group.clone())
        .ok_or_else(|| Error::InvalidPlan("no tables".into()))?;
    for (component, table) in plan.components().iter().zip(tables) {
        check_table(component, table, n)?;
        if table.meta().group != group {
            return Err(Error::Incompatible(format!(
                "tables over {} and {} cannot compose",
                group,
                table.meta().group
            )));
        }
    }

    let incidence = plan.socket_incidence();
    for name in exposed {
        match incidence.get(name).map(Vec::len) {
            Some(1) => {}
            Some(_) => {
                return Err(Error::SocketMismatch(format!(
                    "socket {name:?} is glued and cannot be exposed"
                )))
            }
            None => {
                return Err(Error::SocketMismatch(format!("no socket named {name:?} in plan")))
            }
        }
    }
    for (name, comps) in &incidence {
        if comps.len() == 1 && !exposed.contains(name) {
            return Err(Error::SocketMismatch(format!(
                "socket {name:?} appears once; expose it or glue it"
            )));
        }
    }

    // Candidate multidegrees per socket: values seen at that position in
    // every incident table.
    let socket_names: Vec<String> = incidence.keys().cloned().collect();
    let mut candidates: Vec<Vec<Multidegree>> = Vec::with_capacity(socket_names.len());
    for name in &socket_names {
        let mut sets: Vec<BTreeSet<Multidegree>> = Vec::new();
        for &ci in &incidence[name] {
            let pos = tables[ci]
                .socket_position(name)
                .expect("socket checked against component");
            sets.push(tables[ci].cells().map(|(key, _)| key[pos].clone()).collect());
        }
        let mut common = sets.pop().unwrap_or_default();
        for s in sets {
            common = common.intersection(&s).cloned().collect();
        }
        candidates.push(common.into_iter().collect());
    }

    // Precompute, per component, its socket positions into socket_names.
    let component_slots: Vec<Vec<usize>> = plan
        .components()
        .iter()
        .map(|c| {
            c.sockets()
                .iter()
                .map(|(name, _)| socket_names.iter().position(|s| s == name).unwrap())
                .collect()
        })
        .collect();
    let exposed_slots: Vec<usize> = exposed
        .iter()
        .map(|name| socket_names.iter().position(|s| s == name).unwrap())
        .collect();

    let glued = plan.glue()?;
    let meta = TableMeta {
        tree: glued.canonical_form().to_string(),
        group,
        n,
        sockets: exposed
            .iter()
            .map(|name| {
                let edge = glued.socket_edge(name)?;
                Ok(SocketMeta {
                    name: name.clone(),
                    clade: edge.leaves().iter().copied().collect(),
                })
            })
            .collect::<Result<Vec<SocketMeta>>>()?,
    };
    let mut out = FiberCountTable::new(meta);

    // Walk every assignment of candidate multidegrees to sockets and
    // multiply the component counts.
    let mut assignment: Vec<usize> = vec![0; socket_names.len()];
    walk_assignments(0, &candidates, &mut assignment, &mut |assignment| {
        let mut product = BigUint::one();
        for (ci, slots) in component_slots.iter().enumerate() {
            let key: Vec<Multidegree> = slots
                .iter()
                .map(|&s| candidates[s][assignment[s]].clone())
                .collect();
            let count = tables[ci].get(&key);
            if count.is_zero() {
                return Ok(());
            }
            product *= count;
        }
        let key: Vec<Multidegree> = exposed_slots
            .iter()
            .map(|&s| candidates[s][assignment[s]].clone())
            .collect();
        out.add(key, product)
    })?;
    Ok(out)
}

fn walk_assignments(
    pos: usize,
    candidates: &[Vec<Multidegree>],
    assignment: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if pos == candidates.len() {
        return f(assignment);
    }
    for i in 0..candidates[pos].len() {
        assignment[pos] = i;
        walk_assignments(pos + 1, candidates, assignment, f)?;
    }
    Ok(())
}

/// The glued tree's Hilbert value at degree `n` from component tables:
/// the sum over all socket assignments of the product of fiber counts.
pub fn tfp_compose(
    plan: &DecompositionPlan,
    tables: &[FiberCountTable],
    n: u32,
) -> Result<BigUint> {
    let table = tfp_fiber_table(plan, tables, n, &[])?;
    Ok(table.total())
}

/// Outcome of running a plan end to end.
#[derive(Clone, Debug)]
pub struct PlanRun {
    pub value: BigUint,
    pub tables: Vec<FiberCountTable>,
    pub cache_hits: usize,
}

/// Builds every component's fiber table (through the cache when given)
/// and composes them.
pub fn plan_hilbert_value(
    plan: &DecompositionPlan,
    group: &FiniteAbelianGroup,
    n: u32,
    opts: &CountOptions,
    cache: Option<&TableCache>,
) -> Result<PlanRun> {
    let mut tables = Vec::with_capacity(plan.components().len());
    let mut cache_hits = 0usize;
    for component in plan.components() {
        let polytope = ModelPolytope::new(component.tree.clone(), group.clone())?;
        let sockets = component.sockets();
        let (table, hit) = fiber_table_cached(&polytope, n, &sockets, opts, cache)?;
        if hit {
            cache_hits += 1;
        }
        tables.push(table);
    }
    let value = tfp_compose(plan, &tables, n)?;
    Ok(PlanRun { value, tables, cache_hits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::hilbert_value;

    pub(crate) const CATERPILLAR6: &str = r#"{
        "name": "caterpillar6",
        "components": [
            { "name": "upper", "newick": "(((Se,4),5),6);", "root": 6 },
            { "name": "lower", "newick": "(((1,2),3),Se);", "root": "Se" }
        ]
    }"#;

    pub(crate) const SNOWFLAKE6: &str = r#"{
        "name": "snowflake6",
        "components": [
            { "name": "center", "newick": "((Se1,Se2),(5,6));", "root": 6 },
            { "name": "cherry12", "newick": "((1,2),Se1);", "root": "Se1" },
            { "name": "cherry34", "newick": "((3,4),Se2);", "root": "Se2" }
        ]
    }"#;

    fn group(s: &str) -> FiniteAbelianGroup {
        s.parse().unwrap()
    }

    fn run(plan_text: &str, g: &str, n: u32) -> BigUint {
        let plan = DecompositionPlan::from_json_str(plan_text).unwrap();
        plan_hilbert_value(&plan, &group(g), n, &CountOptions::default(), None)
            .unwrap()
            .value
    }

    #[test]
    fn glue_caterpillar() {
        let plan = DecompositionPlan::from_json_str(CATERPILLAR6).unwrap();
        let glued = plan.glue().unwrap();
        let direct =
            RootedPhyloTree::parse("((1,2),(3,(4,(5,6))));", Some(&RootSpec::Leaf(6))).unwrap();
        assert_eq!(glued.canonical_form(), direct.canonical_form());
        assert_eq!(glued.root_label(), 6);
        assert!(glued.sockets().is_empty());
    }

    #[test]
    fn glue_snowflake() {
        let plan = DecompositionPlan::from_json_str(SNOWFLAKE6).unwrap();
        let glued = plan.glue().unwrap();
        let direct =
            RootedPhyloTree::parse("(((1,2),(3,4)),(5,6));", Some(&RootSpec::Leaf(6))).unwrap();
        assert_eq!(glued.canonical_form(), direct.canonical_form());
    }

    #[test]
    fn glue_two_triples_into_quartet() {
        let text = r#"{ "components": [
            { "name": "a", "newick": "((1,2),Se);", "root": "Se" },
            { "name": "b", "newick": "((Se,3),4);", "root": 4 }
        ]}"#;
        let plan = DecompositionPlan::from_json_str(text).unwrap();
        let glued = plan.glue().unwrap();
        let direct = RootedPhyloTree::parse("(((1,2),3),4);", Some(&RootSpec::Leaf(4))).unwrap();
        assert_eq!(glued.canonical_form(), direct.canonical_form());
    }

    #[test]
    fn split_then_glue_roundtrip() {
        let tree =
            RootedPhyloTree::parse("((1,2),(3,(4,(5,6))));", Some(&RootSpec::Leaf(6))).unwrap();
        let middle = EdgeRef::new([1, 2, 3]).unwrap();
        let (plus, minus) = tree.split_at_edge(&middle, "e").unwrap();
        let plan = DecompositionPlan::new(
            None,
            vec![
                PlanComponent { name: "plus".into(), tree: plus },
                PlanComponent { name: "minus".into(), tree: minus },
            ],
        )
        .unwrap();
        assert_eq!(plan.glue().unwrap().canonical_form(), tree.canonical_form());
    }

    #[test]
    fn plan_validation_errors() {
        // Socket in three components.
        let text = r#"{ "components": [
            { "name": "a", "newick": "((1,2),Se);", "root": "Se" },
            { "name": "b", "newick": "((Se,3),4);", "root": 4 },
            { "name": "c", "newick": "((Se,5),6);", "root": 6 }
        ]}"#;
        assert!(DecompositionPlan::from_json_str(text).is_err());

        // Two shared sockets between the same pair: a cycle.
        let text = r#"{ "components": [
            { "name": "a", "newick": "((Sx,Sy),1);", "root": 1 },
            { "name": "b", "newick": "((Sx,Sy),2);", "root": 2 }
        ]}"#;
        assert!(DecompositionPlan::from_json_str(text).is_err());

        // Disconnected: two components, no shared socket.
        let text = r#"{ "components": [
            { "name": "a", "newick": "((1,2),3);", "root": 3 },
            { "name": "b", "newick": "((4,5),6);", "root": 6 }
        ]}"#;
        assert!(DecompositionPlan::from_json_str(text).is_err());
    }

    #[test]
    fn sockets_declared_by_label_and_clade() {
        let text = r#"{ "components": [
            { "name": "a", "newick": "((1,2),7);", "root": 7, "sockets": { "e": 7 } },
            { "name": "b", "newick": "((8,3),4);", "root": 4, "sockets": { "e": "e{8}" } }
        ]}"#;
        let plan = DecompositionPlan::from_json_str(text).unwrap();
        let glued = plan.glue().unwrap();
        let direct = RootedPhyloTree::parse("(((1,2),3),4);", Some(&RootSpec::Leaf(4))).unwrap();
        assert_eq!(glued.canonical_form(), direct.canonical_form());
    }

    #[test]
    fn compose_matches_direct_quartet() {
        let text = r#"{ "components": [
            { "name": "a", "newick": "((1,2),Se);", "root": "Se" },
            { "name": "b", "newick": "((Se,3),4);", "root": 4 }
        ]}"#;
        let plan = DecompositionPlan::from_json_str(text).unwrap();
        let quartet =
            RootedPhyloTree::parse("(((1,2),3),4);", Some(&RootSpec::Leaf(4))).unwrap();
        for g in ["Z2", "Z2xZ2"] {
            let polytope = ModelPolytope::new(quartet.clone(), group(g)).unwrap();
            for n in 0..4u32 {
                let composed =
                    plan_hilbert_value(&plan, &group(g), n, &CountOptions::default(), None)
                        .unwrap()
                        .value;
                let direct = hilbert_value(&polytope, n, &CountOptions::default()).unwrap();
                assert_eq!(composed, direct, "group {g}, degree {n}");
            }
        }
    }

    #[test]
    fn exposed_socket_matches_direct_fiber_table() {
        // Glue two 3-leaf trees into a quartet and keep a socket on the
        // root edge; the composed table must equal the directly enumerated
        // one.
        let text = r#"{ "components": [
            { "name": "a", "newick": "((1,2),Se);", "root": "Se" },
            { "name": "b", "newick": "((Se,3),4);", "root": 4, "sockets": { "r": 4 } }
        ]}"#;
        let plan = DecompositionPlan::from_json_str(text).unwrap();
        let g = group("Z2xZ2");
        let opts = CountOptions::default();
        for n in 1..4u32 {
            let mut tables = Vec::new();
            for c in plan.components() {
                let p = ModelPolytope::new(c.tree.clone(), g.clone()).unwrap();
                tables.push(crate::hilbert::fiber_table(&p, n, &c.sockets(), &opts).unwrap());
            }
            let composed = tfp_fiber_table(&plan, &tables, n, &["r".to_string()]).unwrap();

            let quartet =
                RootedPhyloTree::parse("(((1,2),3),4);", Some(&RootSpec::Leaf(4))).unwrap();
            let p = ModelPolytope::new(quartet.clone(), g.clone()).unwrap();
            let direct = crate::hilbert::fiber_table(
                &p,
                n,
                &[("r".to_string(), quartet.root_edge())],
                &opts,
            )
            .unwrap();
            assert_eq!(composed, direct, "degree {n}");
        }
    }

    #[test]
    fn exposing_all_sockets_returns_the_component_table() {
        let text = r#"{ "components": [
            { "name": "a", "newick": "((1,2),3);", "root": 3, "sockets": { "r": 3 } }
        ]}"#;
        let plan = DecompositionPlan::from_json_str(text).unwrap();
        let g = group("Z2xZ2");
        let opts = CountOptions::default();
        let c = &plan.components()[0];
        let p = ModelPolytope::new(c.tree.clone(), g).unwrap();
        let table = crate::hilbert::fiber_table(&p, 2, &c.sockets(), &opts).unwrap();
        let composed = tfp_fiber_table(&plan, std::slice::from_ref(&table), 2, &["r".to_string()]).unwrap();
        assert_eq!(composed, table);
    }

    #[test]
    fn single_component_compose_is_hilbert_value() {
        let text = r#"{ "components": [ { "name": "a", "newick": "((1,2),3);", "root": 3 } ]}"#;
        let plan = DecompositionPlan::from_json_str(text).unwrap();
        let g = group("Z2xZ2");
        let run = plan_hilbert_value(&plan, &g, 2, &CountOptions::default(), None).unwrap();
        assert_eq!(run.value, BigUint::from(136u32));
    }

    #[test]
    fn paper_values_at_small_degree() {
        for plan in [CATERPILLAR6, SNOWFLAKE6] {
            assert_eq!(run(plan, "Z2xZ2", 0), BigUint::from(1u32));
            assert_eq!(run(plan, "Z2xZ2", 1), BigUint::from(1024u32));
            assert_eq!(run(plan, "Z2xZ2", 2), BigUint::from(396928u32));
        }
    }

    #[test]
    fn caterpillar_factors_agree() {
        // One caterpillar factor has a leaf-edge socket, the other a
        // root-edge socket; their tables nevertheless carry the same
        // counts per multidegree.
        let plan = DecompositionPlan::from_json_str(CATERPILLAR6).unwrap();
        let g = group("Z2xZ2");
        let opts = CountOptions::default();
        for n in 1..4u32 {
            let mut tables = Vec::new();
            for c in plan.components() {
                let p = ModelPolytope::new(c.tree.clone(), g.clone()).unwrap();
                tables.push(crate::hilbert::fiber_table(&p, n, &c.sockets(), &opts).unwrap());
            }
            let counts: Vec<BTreeMap<Multidegree, BigUint>> = tables
                .iter()
                .map(|t| t.cells().map(|(k, c)| (k[0].clone(), c.clone())).collect())
                .collect();
            assert_eq!(counts[0], counts[1], "degree {n}");
        }
    }

    #[test]
    fn degree_mismatch_rejected() {
        let plan = DecompositionPlan::from_json_str(CATERPILLAR6).unwrap();
        let g = group("Z2");
        let opts = CountOptions::default();
        let mut tables = Vec::new();
        for (i, c) in plan.components().iter().enumerate() {
            let p = ModelPolytope::new(c.tree.clone(), g.clone()).unwrap();
            let n = if i == 0 { 2 } else { 3 };
            tables.push(crate::hilbert::fiber_table(&p, n, &c.sockets(), &opts).unwrap());
        }
        assert!(matches!(
            tfp_compose(&plan, &tables, 2),
            Err(Error::DegreeMismatch(_))
        ));
    }
}
