use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

impl VertexId {
    pub fn new(s: impl Into<String>) -> Self {
        VertexId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

/// Undirected edge stored with its endpoints in ascending order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(VertexId, VertexId);

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Result<Self> {
        if a == b {
            return Err(Error::InvalidEdge(a, b, "self-loop"));
        }
        Ok(if a < b { Edge(a, b) } else { Edge(b, a) })
    }

    /// Panics on a self-loop; for ids already known to differ.
    pub fn of(a: &VertexId, b: &VertexId) -> Self {
        Edge::new(a.clone(), b.clone()).expect("distinct endpoints")
    }

    pub fn u(&self) -> &VertexId {
        &self.0
    }

    pub fn v(&self) -> &VertexId {
        &self.1
    }

    pub fn has(&self, x: &VertexId) -> bool {
        &self.0 == x || &self.1 == x
    }

    pub fn other(&self, x: &VertexId) -> Option<&VertexId> {
        if &self.0 == x {
            Some(&self.1)
        } else if &self.1 == x {
            Some(&self.0)
        } else {
            None
        }
    }

    pub fn shares_endpoint(&self, o: &Edge) -> bool {
        self.has(&o.0) || self.has(&o.1)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Simple undirected graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
    edges: BTreeSet<Edge>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<()> {
        if self.adj.contains_key(&v) {
            return Err(Error::DuplicateVertex(v));
        }
        self.adj.insert(v, BTreeSet::new());
        Ok(())
    }

    pub fn add_edge(&mut self, a: &VertexId, b: &VertexId) -> Result<()> {
        let e = Edge::new(a.clone(), b.clone())?;
        for x in [a, b] {
            if !self.adj.contains_key(x) {
                return Err(Error::UnknownVertex(x.clone()));
            }
        }
        if !self.edges.insert(e) {
            return Err(Error::InvalidEdge(a.clone(), b.clone(), "duplicate edge"));
        }
        self.adj.get_mut(a).unwrap().insert(b.clone());
        self.adj.get_mut(b).unwrap().insert(a.clone());
        Ok(())
    }

    pub fn remove_edge(&mut self, e: &Edge) -> bool {
        if !self.edges.remove(e) {
            return false;
        }
        self.adj.get_mut(e.u()).unwrap().remove(e.v());
        self.adj.get_mut(e.v()).unwrap().remove(e.u());
        true
    }

    pub fn remove_vertex(&mut self, v: &VertexId) -> bool {
        let Some(nbrs) = self.adj.remove(v) else { return false };
        for n in nbrs {
            self.adj.get_mut(&n).unwrap().remove(v);
            self.edges.remove(&Edge::of(v, &n));
        }
        true
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.adj.contains_key(v)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn has_edge(&self, a: &VertexId, b: &VertexId) -> bool {
        self.adj.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> + '_ {
        self.adj.keys()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter()
    }

    pub fn neighbors(&self, v: &VertexId) -> impl Iterator<Item = &VertexId> + '_ {
        self.adj.get(v).into_iter().flatten()
    }

    pub fn degree(&self, v: &VertexId) -> usize {
        self.adj.get(v).map_or(0, |s| s.len())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Connected components, each sorted, ordered by their smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        self.components_without(&BTreeSet::new())
    }

    pub fn components_without(&self, removed: &BTreeSet<&VertexId>) -> Vec<Vec<VertexId>> {
        let mut seen: BTreeSet<&VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for s in self.adj.keys() {
            if removed.contains(s) || seen.contains(s) {
                continue;
            }
            let mut comp = vec![];
            let mut queue = VecDeque::from([s]);
            seen.insert(s);
            while let Some(x) = queue.pop_front() {
                comp.push(x.clone());
                for y in &self.adj[x] {
                    if !removed.contains(y) && seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Articulation points of the subgraph with `removed` deleted.
    pub fn articulation_points_without(&self, removed: &BTreeSet<&VertexId>) -> BTreeSet<VertexId> {
        let ids: Vec<&VertexId> = self.adj.keys().filter(|v| !removed.contains(v)).collect();
        let index: BTreeMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let n = ids.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut out = BTreeSet::new();
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (vertex, parent, neighbour list, cursor)
            let nbrs = |i: usize| -> Vec<usize> {
                self.adj[ids[i]].iter().filter_map(|w| index.get(w).copied()).collect()
            };
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut root_children = 0;
            let mut stack = vec![(root, usize::MAX, nbrs(root), 0usize)];
            while let Some(top) = stack.last_mut() {
                let (x, parent) = (top.0, top.1);
                if top.3 < top.2.len() {
                    let y = top.2[top.3];
                    top.3 += 1;
                    if disc[y] == usize::MAX {
                        disc[y] = timer;
                        low[y] = timer;
                        timer += 1;
                        if x == root {
                            root_children += 1;
                        }
                        stack.push((y, x, nbrs(y), 0));
                    } else if y != parent {
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[x]);
                        if parent != root && low[x] >= disc[parent] {
                            out.insert(ids[parent].clone());
                        }
                    }
                }
            }
            if root_children >= 2 {
                out.insert(ids[root].clone());
            }
        }
        out
    }

    /// Triconnected: more than three vertices and connected after removing
    /// any two of them. Linear articulation search per removed vertex.
    pub fn is_triconnected(&self) -> bool {
        if self.vertex_count() < 4 || !self.is_connected() {
            return false;
        }
        self.adj.keys().all(|v| {
            let removed = BTreeSet::from([v]);
            self.components_without(&removed).len() == 1
                && self.articulation_points_without(&removed).is_empty()
        })
    }

    /// Triconnectivity by removing every pair of vertices; for testing and
    /// small inputs.
    pub fn is_triconnected_brute(&self) -> bool {
        if self.vertex_count() < 4 {
            return false;
        }
        let vs: Vec<&VertexId> = self.adj.keys().collect();
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                if self.components_without(&BTreeSet::from([vs[i], vs[j]])).len() != 1 {
                    return false;
                }
            }
        }
        self.is_connected()
    }

    /// Biconnected components as edge sets; a bridge is a block of one edge.
    /// Isolated vertices belong to no block.
    pub fn blocks(&self) -> Vec<BTreeSet<Edge>> {
        let ids: Vec<&VertexId> = self.adj.keys().collect();
        let index: BTreeMap<&VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let n = ids.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut timer = 0;
        let mut out = Vec::new();
        let mut estack: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            let nbrs = |i: usize| -> Vec<usize> { self.adj[ids[i]].iter().map(|w| index[w]).collect() };
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut stack = vec![(root, usize::MAX, nbrs(root), 0usize)];
            while let Some(top) = stack.last_mut() {
                let (x, parent) = (top.0, top.1);
                if top.3 < top.2.len() {
                    let y = top.2[top.3];
                    top.3 += 1;
                    if disc[y] == usize::MAX {
                        disc[y] = timer;
                        low[y] = timer;
                        timer += 1;
                        estack.push((x, y));
                        stack.push((y, x, nbrs(y), 0));
                    } else if y != parent && disc[y] < disc[x] {
                        estack.push((x, y));
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[x]);
                        if low[x] >= disc[parent] {
                            let mut block = BTreeSet::new();
                            while let Some((a, b)) = estack.pop() {
                                block.insert(Edge::of(ids[a], ids[b]));
                                if (a, b) == (parent, x) {
                                    break;
                                }
                            }
                            out.push(block);
                        }
                    }
                }
            }
        }
        out
    }

    /// Subgraph induced by `keep`.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let mut g = Graph::new();
        for v in keep {
            if self.contains_vertex(v) {
                g.adj.insert(v.clone(), BTreeSet::new());
            }
        }
        for e in &self.edges {
            if keep.contains(e.u()) && keep.contains(e.v()) {
                g.add_edge(e.u(), e.v()).expect("edge of a simple graph");
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    #[test]
    fn simple_graph_rejects_loops_and_multi_edges() {
        let mut g = Graph::new();
        g.add_vertex(vid("a")).unwrap();
        g.add_vertex(vid("b")).unwrap();
        assert!(g.add_vertex(vid("a")).is_err());
        g.add_edge(&vid("a"), &vid("b")).unwrap();
        assert!(g.add_edge(&vid("b"), &vid("a")).is_err());
        assert!(g.add_edge(&vid("a"), &vid("a")).is_err());
        assert!(g.add_edge(&vid("a"), &vid("z")).is_err());
    }

    #[test]
    fn components_and_removal() {
        let mut g = Graph::new();
        for v in ["a", "b", "c", "d"] {
            g.add_vertex(vid(v)).unwrap();
        }
        g.add_edge(&vid("a"), &vid("b")).unwrap();
        g.add_edge(&vid("c"), &vid("d")).unwrap();
        assert_eq!(g.components().len(), 2);
        g.add_edge(&vid("b"), &vid("c")).unwrap();
        assert!(g.is_connected());
        g.remove_vertex(&vid("b"));
        assert_eq!(g.components().len(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    fn from_edges(edges: &[(&str, &str)]) -> Graph {
        let mut g = Graph::new();
        for (a, b) in edges {
            for x in [a, b] {
                if !g.contains_vertex(&vid(x)) {
                    g.add_vertex(vid(x)).unwrap();
                }
            }
            g.add_edge(&vid(a), &vid(b)).unwrap();
        }
        g
    }

    #[test]
    fn triconnectivity() {
        let k4 = from_edges(&[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]);
        assert!(k4.is_triconnected() && k4.is_triconnected_brute());
        let c4 = from_edges(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
        assert!(!c4.is_triconnected() && !c4.is_triconnected_brute());
        // two K4s glued along an edge: 2-cut {a, b}
        let glued = from_edges(&[
            ("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d"),
            ("a", "x"), ("a", "y"), ("b", "x"), ("b", "y"), ("x", "y"),
        ]);
        assert!(!glued.is_triconnected() && !glued.is_triconnected_brute());
        let mut wheel = from_edges(&[("h", "a"), ("h", "b"), ("h", "c"), ("h", "d"), ("h", "e")]);
        for (a, b) in [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")] {
            wheel.add_edge(&vid(a), &vid(b)).unwrap();
        }
        assert!(wheel.is_triconnected() && wheel.is_triconnected_brute());
        assert_eq!(glued.articulation_points_without(&BTreeSet::from([&vid("a")])), BTreeSet::from([vid("b")]));
    }

    #[test]
    fn blocks_of_a_chain() {
        // two triangles sharing c, plus a pendant edge at e
        let g = from_edges(&[("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "e"), ("e", "c"), ("e", "f")]);
        let mut sizes: Vec<usize> = g.blocks().iter().map(|b| b.len()).collect();
        sizes.sort();
        assert_eq!(sizes, [1, 3, 3]);
        let total: usize = g.blocks().iter().map(|b| b.len()).sum();
        assert_eq!(total, g.edge_count());
        assert_eq!(g.articulation_points_without(&BTreeSet::new()), BTreeSet::from([vid("c"), vid("e")]));
    }
}
