//! Rooted phylogenetic trees with a leaf root and edges directed away
//! from it.
//!
//! Edges are addressed externally by their clade: the set of non-root
//! leaf labels below the edge. Clades are stable across serializations,
//! distinguish all edges of a tree, and their lexicographic order is the
//! frozen edge order used for polytope coordinates. Pendant edges (leaf
//! edges and the root edge) may carry socket names, marking the gluing
//! interfaces of a decomposition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// An edge of a tree, identified by its descendant-leaf set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef(BTreeSet<u32>);

impl EdgeRef {
    pub fn new(labels: impl IntoIterator<Item = u32>) -> Result<Self> {
        let set: BTreeSet<u32> = labels.into_iter().collect();
        if set.is_empty() {
            return Err(Error::parse("edge clade must be nonempty"));
        }
        Ok(EdgeRef(set))
    }

    pub fn singleton(label: u32) -> Self {
        EdgeRef(BTreeSet::from([label]))
    }

    pub fn leaves(&self) -> &BTreeSet<u32> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `"e{1,2,3}"` or `"{1,2,3}"`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('e').unwrap_or(t);
        let inner = t
            .strip_prefix('{')
            .and_then(|u| u.strip_suffix('}'))
            .ok_or_else(|| Error::parse(format!("bad edge clade {s:?}, expected e{{1,2,...}}")))?;
        let labels = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::parse(format!("bad leaf label {p:?} in clade {s:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        EdgeRef::new(labels)
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "e{{{}}}", parts.join(","))
    }
}

/// Undirected adjacency lists, per-vertex leaf labels, and the root
/// vertex: the raw pieces plan gluing reassembles.
pub(crate) type GraphParts = (Vec<Vec<usize>>, Vec<Option<u32>>, usize);

/// Which leaf to root a parsed tree at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootSpec {
    /// A numeric leaf label.
    Leaf(u32),
    /// A socket leaf, by socket name.
    Socket(String),
}

#[derive(Clone, Debug)]
enum RawLabel {
    Num(u32),
    Socket(String),
}

#[derive(Debug)]
struct RawNode {
    children: Vec<RawNode>,
    label: Option<RawLabel>,
}

/// A tree rooted at a leaf, with edges directed away from the root.
#[derive(Clone, Debug)]
pub struct RootedPhyloTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    label: Vec<Option<u32>>,
    root: usize,
    /// Socket name -> pendant leaf label (the root label names the root edge).
    sockets: BTreeMap<String, u32>,
    /// Leaf labels that stand in for socket leaves rather than taxa.
    socket_labels: BTreeSet<u32>,
    clade_of: Vec<BTreeSet<u32>>,
    edge_head: BTreeMap<EdgeRef, usize>,
    edge_order: Vec<EdgeRef>,
    canonical: String,
}

impl PartialEq for RootedPhyloTree {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical && self.sockets_by_edge() == other.sockets_by_edge()
    }
}

impl Eq for RootedPhyloTree {}

impl RootedPhyloTree {
    /// Parses Newick-like text and roots the tree at the requested leaf.
    ///
    /// Labels are positive integers or socket markers `S<name>`; socket
    /// leaves receive synthetic numeric labels above the largest explicit
    /// one. Without an explicit root the largest numeric leaf is used.
    pub fn parse(text: &str, root: Option<&RootSpec>) -> Result<Self> {
        let raw = parse_newick(text)?;

        // Flatten into an undirected graph.
        let mut labels: Vec<Option<RawLabel>> = Vec::new();
        let mut adjacency: Vec<Vec<usize>> = Vec::new();
        flatten(&raw, None, &mut labels, &mut adjacency);

        // Assign synthetic numeric labels to socket leaves, in order of
        // appearance.
        let max_numeric = labels
            .iter()
            .filter_map(|l| match l {
                Some(RawLabel::Num(n)) => Some(*n),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut next = max_numeric + 1;
        let mut numeric: Vec<Option<u32>> = Vec::with_capacity(labels.len());
        let mut sockets: BTreeMap<String, u32> = BTreeMap::new();
        let mut socket_labels = BTreeSet::new();
        for l in &labels {
            match l {
                None => numeric.push(None),
                Some(RawLabel::Num(n)) => numeric.push(Some(*n)),
                Some(RawLabel::Socket(name)) => {
                    if sockets.insert(name.clone(), next).is_some() {
                        return Err(Error::invalid_tree(format!("duplicate socket name {name:?}")));
                    }
                    socket_labels.insert(next);
                    numeric.push(Some(next));
                    next += 1;
                }
            }
        }

        // Suppress unlabeled degree-2 vertices (including the artificial
        // top vertex of two-child Newick text).
        let (adjacency, numeric) = suppress_degree_two(adjacency, numeric)?;

        // Resolve the root.
        let root_label = match root {
            Some(RootSpec::Leaf(n)) => *n,
            Some(RootSpec::Socket(name)) => *sockets
                .get(name)
                .ok_or_else(|| Error::invalid_tree(format!("unknown root socket {name:?}")))?,
            None => numeric
                .iter()
                .flatten()
                .copied()
                .filter(|l| !socket_labels.contains(l))
                .max()
                .ok_or_else(|| Error::invalid_tree("tree has no numeric leaf to root at"))?,
        };
        let root_vertex = numeric
            .iter()
            .position(|l| *l == Some(root_label))
            .ok_or_else(|| Error::invalid_tree(format!("root leaf {root_label} not in tree")))?;

        Self::from_graph(adjacency, numeric, root_vertex, sockets, socket_labels)
    }

    /// Builds a tree from an undirected graph. Internal constructor shared
    /// by parsing, splitting and plan gluing.
    pub(crate) fn from_graph(
        adjacency: Vec<Vec<usize>>,
        labels: Vec<Option<u32>>,
        root_vertex: usize,
        sockets: BTreeMap<String, u32>,
        socket_labels: BTreeSet<u32>,
    ) -> Result<Self> {
        let n = adjacency.len();
        if labels.len() != n {
            return Err(Error::invalid_tree("label/adjacency arity mismatch"));
        }

        // Leaves are exactly the labeled vertices and must have degree 1;
        // unlabeled vertices must have degree >= 3.
        let mut seen_labels = BTreeSet::new();
        let mut num_leaves = 0usize;
        for v in 0..n {
            match labels[v] {
                Some(l) => {
                    if l == 0 {
                        return Err(Error::invalid_tree("leaf labels are positive integers"));
                    }
                    if !seen_labels.insert(l) {
                        return Err(Error::invalid_tree(format!("duplicate leaf label {l}")));
                    }
                    if adjacency[v].len() != 1 {
                        return Err(Error::invalid_tree(format!(
                            "labeled vertex {l} has degree {}",
                            adjacency[v].len()
                        )));
                    }
                    num_leaves += 1;
                }
                None => {
                    if adjacency[v].len() < 3 {
                        return Err(Error::invalid_tree(format!(
                            "internal vertex of degree {}",
                            adjacency[v].len()
                        )));
                    }
                }
            }
        }
        if num_leaves < 2 {
            return Err(Error::invalid_tree("tree must have at least 2 leaves"));
        }
        if labels[root_vertex].is_none() {
            return Err(Error::invalid_tree("root must be a leaf"));
        }
        for (name, l) in &sockets {
            if !seen_labels.contains(l) {
                return Err(Error::invalid_tree(format!(
                    "socket {name:?} names absent leaf {l}"
                )));
            }
        }

        // Orient away from the root; detect cycles and disconnection.
        let mut parent = vec![None; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut visited = vec![false; n];
        let mut stack = vec![root_vertex];
        visited[root_vertex] = true;
        let mut count = 0usize;
        while let Some(v) = stack.pop() {
            count += 1;
            for &w in &adjacency[v] {
                if Some(w) == parent[v] {
                    continue;
                }
                if visited[w] {
                    return Err(Error::invalid_tree("cycle in tree graph"));
                }
                visited[w] = true;
                parent[w] = Some(v);
                children[v].push(w);
                stack.push(w);
            }
        }
        if count != n {
            return Err(Error::invalid_tree("tree graph is disconnected"));
        }

        let mut tree = RootedPhyloTree {
            parent,
            children,
            label: labels,
            root: root_vertex,
            sockets,
            socket_labels,
            clade_of: Vec::new(),
            edge_head: BTreeMap::new(),
            edge_order: Vec::new(),
            canonical: String::new(),
        };
        tree.rebuild_derived();
        Ok(tree)
    }

    fn rebuild_derived(&mut self) {
        let n = self.label.len();
        let mut clade_of: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        for v in self.postorder() {
            if v == self.root {
                continue;
            }
            match self.label[v] {
                Some(l) => {
                    clade_of[v].insert(l);
                }
                None => {
                    let mut set = BTreeSet::new();
                    for &c in &self.children[v] {
                        set.extend(clade_of[c].iter().copied());
                    }
                    clade_of[v] = set;
                }
            }
        }
        let mut edge_head = BTreeMap::new();
        for (v, clade) in clade_of.iter().enumerate() {
            if v != self.root {
                edge_head.insert(EdgeRef(clade.clone()), v);
            }
        }
        self.edge_order = edge_head.keys().cloned().collect();
        self.edge_head = edge_head;
        self.clade_of = clade_of;
        self.canonical = self.render_canonical();
    }

    fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.label.len());
        let mut stack = vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
            } else {
                stack.push((v, true));
                for &c in &self.children[v] {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    fn render_canonical(&self) -> String {
        fn go(tree: &RootedPhyloTree, v: usize, out: &mut String) {
            match tree.label[v] {
                Some(l) => out.push_str(&l.to_string()),
                None => {
                    let mut kids: Vec<usize> = tree.children[v].clone();
                    kids.sort_by_key(|&c| tree.clade_of[c].iter().next().copied().unwrap_or(0));
                    out.push('(');
                    for (i, c) in kids.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(tree, *c, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut out = String::from("(");
        go(self, self.children[self.root][0], &mut out);
        out.push(',');
        out.push_str(&self.root_label().to_string());
        out.push(')');
        out
    }

    /// Deterministic serialization, invariant under child-order permutation.
    pub fn canonical_form(&self) -> &str {
        &self.canonical
    }

    pub fn root_label(&self) -> u32 {
        self.label[self.root].expect("root is a leaf")
    }

    pub fn num_vertices(&self) -> usize {
        self.label.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_order.len()
    }

    /// All leaf labels including the root, ascending.
    pub fn leaf_labels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.label.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn num_leaves(&self) -> usize {
        self.label.iter().flatten().count()
    }

    /// Non-root leaf labels, ascending.
    pub fn non_root_leaves(&self) -> Vec<u32> {
        let root = self.root_label();
        self.leaf_labels().into_iter().filter(|&l| l != root).collect()
    }

    /// Edges in canonical clade order.
    pub fn edges(&self) -> &[EdgeRef] {
        &self.edge_order
    }

    pub fn has_edge(&self, e: &EdgeRef) -> bool {
        self.edge_head.contains_key(e)
    }

    fn head_of(&self, e: &EdgeRef) -> Result<usize> {
        self.edge_head
            .get(e)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(e.to_string()))
    }

    /// The descendant-leaf set of an edge.
    pub fn descendants(&self, e: &EdgeRef) -> Result<&BTreeSet<u32>> {
        let head = self.head_of(e)?;
        Ok(&self.clade_of[head])
    }

    /// The pendant edge of the root leaf.
    pub fn root_edge(&self) -> EdgeRef {
        let child = self.children[self.root][0];
        EdgeRef(self.clade_of[child].clone())
    }

    /// The pendant edge of a leaf (the root edge when `label` is the root).
    pub fn leaf_edge(&self, label: u32) -> Result<EdgeRef> {
        if label == self.root_label() {
            return Ok(self.root_edge());
        }
        let e = EdgeRef::singleton(label);
        if !self.has_edge(&e) {
            return Err(Error::UnknownEdge(format!("no leaf {label} in tree")));
        }
        Ok(e)
    }

    /// True for leaf edges and the root edge.
    pub fn is_pendant(&self, e: &EdgeRef) -> Result<bool> {
        let head = self.head_of(e)?;
        Ok(self.label[head].is_some() || self.parent[head] == Some(self.root))
    }

    pub fn is_interior(&self, e: &EdgeRef) -> Result<bool> {
        Ok(!self.is_pendant(e)?)
    }

    /// Edge partial order: `e1 <= e2` iff there is a directed path from
    /// `e2` down to `e1` (equivalently, clade containment).
    pub fn edge_leq(&self, e1: &EdgeRef, e2: &EdgeRef) -> Result<bool> {
        self.head_of(e1)?;
        self.head_of(e2)?;
        Ok(e1.0.is_subset(&e2.0))
    }

    /// Socket name -> pendant leaf label.
    pub fn sockets(&self) -> &BTreeMap<String, u32> {
        &self.sockets
    }

    /// Sockets as name -> pendant edge, in name order.
    pub fn sockets_by_edge(&self) -> BTreeMap<String, EdgeRef> {
        self.sockets
            .iter()
            .map(|(name, &l)| (name.clone(), self.leaf_edge(l).expect("socket leaf exists")))
            .collect()
    }

    pub fn socket_edge(&self, name: &str) -> Result<EdgeRef> {
        let label = self
            .sockets
            .get(name)
            .ok_or_else(|| Error::UnknownEdge(format!("no socket named {name:?}")))?;
        self.leaf_edge(*label)
    }

    /// Whether `label` stands in for a socket leaf.
    pub fn is_socket_label(&self, label: u32) -> bool {
        self.socket_labels.contains(&label)
    }

    /// Adds a socket on the pendant edge of leaf `label`.
    pub fn with_socket(&self, name: &str, label: u32) -> Result<Self> {
        if !self.leaf_labels().contains(&label) {
            return Err(Error::invalid_tree(format!("no leaf {label} for socket {name:?}")));
        }
        let mut tree = self.clone();
        if tree.sockets.insert(name.to_string(), label).is_some() {
            return Err(Error::invalid_tree(format!("duplicate socket name {name:?}")));
        }
        tree.socket_labels.insert(label);
        Ok(tree)
    }

    /// Resolves a pendant edge given either a leaf label or a clade, for
    /// socket declarations.
    pub fn pendant_leaf_for(&self, clade: &EdgeRef) -> Result<u32> {
        let head = self.head_of(clade)?;
        if let Some(l) = self.label[head] {
            return Ok(l);
        }
        if self.parent[head] == Some(self.root) {
            return Ok(self.root_label());
        }
        Err(Error::NotPendant(clade.to_string()))
    }

    /// True when every internal vertex has degree 3.
    pub fn is_trivalent(&self) -> bool {
        (0..self.label.len())
            .filter(|&v| self.label[v].is_none())
            .all(|v| self.children[v].len() == 2)
    }

    /// Splits at an interior edge into the upper part (keeping the original
    /// root) and the lower part (rooted by the tail of the edge). Both parts
    /// carry the cut edge as a pendant socket named `socket_name`.
    pub fn split_at_edge(
        &self,
        e: &EdgeRef,
        socket_name: &str,
    ) -> Result<(RootedPhyloTree, RootedPhyloTree)> {
        let head = self.head_of(e)?;
        if self.is_pendant(e)? {
            return Err(Error::NotInterior(e.to_string()));
        }
        let clade = &self.clade_of[head];

        // Vertices of the lower subtree.
        let mut below = BTreeSet::new();
        let mut stack = vec![head];
        while let Some(v) = stack.pop() {
            below.insert(v);
            stack.extend(self.children[v].iter().copied());
        }

        // Lower part: subtree plus a fresh root leaf at the tail of the cut
        // edge, labeled one past the largest label below.
        let minus = {
            let fresh = clade.iter().next_back().copied().unwrap() + 1;
            let ids: Vec<usize> = below.iter().copied().collect();
            let remap: BTreeMap<usize, usize> =
                ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let new_root = ids.len();
            let mut adjacency = vec![Vec::new(); ids.len() + 1];
            let mut labels = vec![None; ids.len() + 1];
            for &v in &ids {
                labels[remap[&v]] = self.label[v];
                for &c in &self.children[v] {
                    adjacency[remap[&v]].push(remap[&c]);
                    adjacency[remap[&c]].push(remap[&v]);
                }
            }
            labels[new_root] = Some(fresh);
            adjacency[new_root].push(remap[&head]);
            adjacency[remap[&head]].push(new_root);

            let mut sockets: BTreeMap<String, u32> = self
                .sockets
                .iter()
                .filter(|(_, l)| clade.contains(l))
                .map(|(k, &v)| (k.clone(), v))
                .collect();
            if sockets.insert(socket_name.to_string(), fresh).is_some() {
                return Err(Error::invalid_tree(format!(
                    "socket name {socket_name:?} already used below the cut"
                )));
            }
            let mut socket_labels: BTreeSet<u32> = self
                .socket_labels
                .iter()
                .copied()
                .filter(|l| clade.contains(l))
                .collect();
            socket_labels.insert(fresh);
            Self::from_graph(adjacency, labels, new_root, sockets, socket_labels)?
        };

        // Upper part: everything else; the cut edge's head becomes a fresh
        // socket leaf.
        let plus = {
            let fresh = self
                .label
                .iter()
                .flatten()
                .copied()
                .filter(|l| !clade.contains(l))
                .max()
                .unwrap()
                + 1;
            let ids: Vec<usize> = (0..self.label.len())
                .filter(|v| !below.contains(v) || *v == head)
                .collect();
            let remap: BTreeMap<usize, usize> =
                ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut adjacency = vec![Vec::new(); ids.len()];
            let mut labels = vec![None; ids.len()];
            for &v in &ids {
                labels[remap[&v]] = self.label[v];
                if v == head {
                    labels[remap[&v]] = Some(fresh);
                    continue;
                }
                for &c in &self.children[v] {
                    adjacency[remap[&v]].push(remap[&c]);
                    adjacency[remap[&c]].push(remap[&v]);
                }
            }
            let mut sockets: BTreeMap<String, u32> = self
                .sockets
                .iter()
                .filter(|(_, l)| !clade.contains(l))
                .map(|(k, &v)| (k.clone(), v))
                .collect();
            if sockets.insert(socket_name.to_string(), fresh).is_some() {
                return Err(Error::invalid_tree(format!(
                    "socket name {socket_name:?} already used above the cut"
                )));
            }
            let mut socket_labels: BTreeSet<u32> = self
                .socket_labels
                .iter()
                .copied()
                .filter(|l| !clade.contains(l))
                .collect();
            socket_labels.insert(fresh);
            Self::from_graph(adjacency, labels, remap[&self.root], sockets, socket_labels)?
        };

        Ok((plus, minus))
    }

    /// Undirected adjacency, labels, root vertex: the raw pieces plan
    /// gluing needs.
    pub(crate) fn graph_parts(&self) -> GraphParts {
        let n = self.label.len();
        let mut adjacency = vec![Vec::new(); n];
        for v in 0..n {
            for &c in &self.children[v] {
                adjacency[v].push(c);
                adjacency[c].push(v);
            }
        }
        (adjacency, self.label.clone(), self.root)
    }
}

impl fmt::Display for RootedPhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical)
    }
}

fn flatten(
    node: &RawNode,
    parent: Option<usize>,
    labels: &mut Vec<Option<RawLabel>>,
    adjacency: &mut Vec<Vec<usize>>,
) {
    let id = labels.len();
    labels.push(node.label.clone());
    adjacency.push(Vec::new());
    if let Some(p) = parent {
        adjacency[p].push(id);
        adjacency[id].push(p);
    }
    for c in &node.children {
        flatten(c, Some(id), labels, adjacency);
    }
}

/// Removes unlabeled degree-2 vertices, reconnecting their neighbors.
type LabeledGraph = (Vec<Vec<usize>>, Vec<Option<u32>>);

fn suppress_degree_two(
    adjacency: Vec<Vec<usize>>,
    labels: Vec<Option<u32>>,
) -> Result<LabeledGraph> {
    let n = adjacency.len();
    let mut adj: Vec<BTreeSet<usize>> = adjacency
        .iter()
        .map(|row| row.iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for v in 0..n {
            if alive[v] && labels[v].is_none() && adj[v].len() == 2 {
                let mut it = adj[v].iter().copied();
                let a = it.next().unwrap();
                let b = it.next().unwrap();
                adj[a].remove(&v);
                adj[b].remove(&v);
                adj[a].insert(b);
                adj[b].insert(a);
                adj[v].clear();
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let ids: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let remap: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let new_adj = ids
        .iter()
        .map(|&v| adj[v].iter().map(|w| remap[w]).collect())
        .collect();
    let new_labels = ids.iter().map(|&v| labels[v]).collect();
    Ok((new_adj, new_labels))
}

fn parse_newick(text: &str) -> Result<RawNode> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0usize;
    let node = parse_node(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos < chars.len() && chars[pos] == ';' {
        pos += 1;
    }
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(Error::parse(format!(
            "unexpected trailing input at byte {pos} in tree text"
        )));
    }
    Ok(node)
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_node(chars: &[char], pos: &mut usize) -> Result<RawNode> {
    skip_ws(chars, pos);
    if *pos >= chars.len() {
        return Err(Error::parse("unexpected end of tree text"));
    }
    if chars[*pos] == '(' {
        *pos += 1;
        let mut children = vec![parse_node(chars, pos)?];
        loop {
            skip_ws(chars, pos);
            match chars.get(*pos) {
                Some(',') => {
                    *pos += 1;
                    children.push(parse_node(chars, pos)?);
                }
                Some(')') => {
                    *pos += 1;
                    break;
                }
                other => {
                    return Err(Error::parse(format!(
                        "expected ',' or ')' at byte {pos:?}, found {other:?}"
                    )))
                }
            }
        }
        Ok(RawNode { children, label: None })
    } else {
        let start = *pos;
        while *pos < chars.len()
            && (chars[*pos].is_ascii_alphanumeric() || chars[*pos] == '_')
        {
            *pos += 1;
        }
        if *pos == start {
            return Err(Error::parse(format!(
                "expected a label or '(' at byte {start} in tree text"
            )));
        }
        let token: String = chars[start..*pos].iter().collect();
        let label = if token.chars().all(|c| c.is_ascii_digit()) {
            RawLabel::Num(
                token
                    .parse::<u32>()
                    .map_err(|_| Error::parse(format!("leaf label {token:?} out of range")))?,
            )
        } else if let Some(name) = token.strip_prefix('S') {
            if name.is_empty() {
                return Err(Error::parse("socket label 'S' needs a name"));
            }
            RawLabel::Socket(name.to_string())
        } else {
            return Err(Error::parse(format!(
                "leaf label {token:?} must be an integer or S<name>"
            )));
        };
        Ok(RawNode { children: Vec::new(), label: Some(label) })
    }
}
