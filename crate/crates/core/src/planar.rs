//! Planarization of a drawing into a cell complex, and the topological
//! equivalence check built on it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use serde::Serialize;

use crate::drawing::{validate_drawing, Drawing};
use crate::error::{Error, Result};
use crate::geom::{segments_cross, signed_area2, winding_number, CrossKind, Direction, Point};
use crate::graph::{Edge, VertexId};

/// A vertex of the planarization: an original vertex or the crossing point
/// of two edges (named by the pair, smaller edge first).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum Node {
    Vertex(VertexId),
    Crossing(Edge, Edge),
}

impl Node {
    pub fn crossing(e: Edge, f: Edge) -> Node {
        if e < f {
            Node::Crossing(e, f)
        } else {
            Node::Crossing(f, e)
        }
    }

    pub fn as_vertex(&self) -> Option<&VertexId> {
        match self {
            Node::Vertex(v) => Some(v),
            Node::Crossing(..) => None,
        }
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Vertex(v) => write!(f, "{v}"),
            Node::Crossing(a, b) => write!(f, "x[{a}|{b}]"),
        }
    }
}

/// Closed boundary walk; dart `i` goes from `nodes[i]` to `nodes[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Walk(pub Vec<Node>);

impl Walk {
    /// Canonical form of a cyclic node sequence: rotated to start at its
    /// lexicographically smallest rotation.
    pub fn from_cycle(nodes: Vec<Node>) -> Walk {
        Walk::canonical(nodes)
    }

    pub fn of_vertices(vs: &[VertexId]) -> Walk {
        Walk::canonical(vs.iter().map(|v| Node::Vertex(v.clone())).collect())
    }

    /// Vertex ids of a walk without crossing nodes.
    pub fn vertices(&self) -> Vec<VertexId> {
        self.0.iter().filter_map(|n| n.as_vertex().cloned()).collect()
    }

    fn canonical(mut nodes: Vec<Node>) -> Walk {
        let n = nodes.len();
        let best = (0..n)
            .min_by(|&i, &j| {
                for k in 0..n {
                    let c = nodes[(i + k) % n].cmp(&nodes[(j + k) % n]);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                Ordering::Equal
            })
            .unwrap_or(0);
        nodes.rotate_left(best);
        Walk(nodes)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn darts(&self) -> impl Iterator<Item = (&Node, &Node)> + '_ {
        let n = self.0.len();
        (0..n).map(move |i| (&self.0[i], &self.0[(i + 1) % n]))
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Smallest node of the component; used as its name.
    pub id: Node,
    pub nodes: BTreeSet<Node>,
    pub fragments: usize,
    /// Boundary walk of the unbounded side; empty for an isolated vertex.
    pub outer: Walk,
    pub inner: Vec<Walk>,
}

#[derive(Clone, Debug)]
pub struct CellComplex {
    pub positions: BTreeMap<Node, Point>,
    /// Counterclockwise neighbours, rotated to start at the smallest one.
    pub rotation: BTreeMap<Node, Vec<Node>>,
    /// Sub-segments of each edge between consecutive nodes, in order from
    /// the smaller endpoint.
    pub edge_nodes: BTreeMap<Edge, Vec<Node>>,
    pub components: Vec<Component>,
    /// For each ordered pair of distinct components `(x, y)`, the bounded
    /// walk of `y` whose cell contains `x`, or `None` for the outer cell of `y`.
    pub containment: BTreeMap<(Node, Node), Option<Walk>>,
}

impl CellComplex {
    pub fn walks(&self) -> impl Iterator<Item = &Walk> + '_ {
        self.components.iter().flat_map(|c| std::iter::once(&c.outer).chain(c.inner.iter()))
            .filter(|w| !w.is_empty())
    }

    pub fn crossing_nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.rotation.keys().filter(|n| matches!(n, Node::Crossing(..)))
    }

    /// Outer walks of the components that lie in no bounded cell of another.
    pub fn outer_cell(&self) -> Vec<&Walk> {
        self.components
            .iter()
            .filter(|x| {
                self.components
                    .iter()
                    .all(|y| y.id == x.id || self.containment[&(x.id.clone(), y.id.clone())].is_none())
            })
            .map(|c| &c.outer)
            .collect()
    }

    /// `nodes - fragments + walks = 2` for every component (an isolated
    /// vertex counts one walk), and every dart is used exactly once.
    pub fn euler_holds(&self) -> bool {
        for c in &self.components {
            let walks = if c.outer.is_empty() { 1 } else { 1 + c.inner.len() };
            if c.nodes.len() as i64 - c.fragments as i64 + walks as i64 != 2 {
                return false;
            }
        }
        let mut darts = BTreeSet::new();
        for w in self.walks() {
            for (a, b) in w.darts() {
                if !darts.insert((a.clone(), b.clone())) {
                    return false;
                }
            }
        }
        let expected: usize = self.rotation.values().map(|r| r.len()).sum();
        darts.len() == expected
    }

    /// Boundary walk containing the dart `from -> to`.
    pub fn walk_of_dart(&self, from: &Node, to: &Node) -> Option<&Walk> {
        self.walks().find(|w| w.darts().any(|(a, b)| a == from && b == to))
    }
}

fn pred_in_rotation<'a>(rot: &'a [Node], x: &Node) -> &'a Node {
    let i = rot.iter().position(|n| n == x).expect("neighbour in rotation");
    &rot[(i + rot.len() - 1) % rot.len()]
}

/// Planarize a valid drawing. Callers must ensure `validate_drawing` is empty.
pub fn planarize(d: &Drawing) -> CellComplex {
    let edges: Vec<&Edge> = d.graph().edges().collect();
    let mut positions: BTreeMap<Node, Point> = d
        .positions()
        .iter()
        .map(|(v, p)| (Node::Vertex(v.clone()), p.clone()))
        .collect();
    let mut on_edge: Vec<Vec<(Node, Point)>> = vec![Vec::new(); edges.len()];
    for i in 0..edges.len() {
        let si = d.segment(edges[i]);
        for j in (i + 1)..edges.len() {
            if edges[i].shares_endpoint(edges[j]) {
                continue;
            }
            if let CrossKind::ProperCross(p) = segments_cross(&si, &d.segment(edges[j])) {
                let node = Node::crossing(edges[i].clone(), edges[j].clone());
                positions.insert(node.clone(), p.clone());
                on_edge[i].push((node.clone(), p.clone()));
                on_edge[j].push((node, p));
            }
        }
    }

    let mut adj: BTreeMap<Node, Vec<Node>> =
        positions.keys().map(|n| (n.clone(), Vec::new())).collect();
    let mut edge_nodes = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        let start = d.pos(e.u());
        let mut inner = std::mem::take(&mut on_edge[i]);
        inner.sort_by(|a, b| start.dist2(&a.1).cmp(&start.dist2(&b.1)));
        let mut chain = vec![Node::Vertex(e.u().clone())];
        chain.extend(inner.into_iter().map(|(n, _)| n));
        chain.push(Node::Vertex(e.v().clone()));
        for w in chain.windows(2) {
            adj.get_mut(&w[0]).unwrap().push(w[1].clone());
            adj.get_mut(&w[1]).unwrap().push(w[0].clone());
        }
        edge_nodes.insert((*e).clone(), chain);
    }

    let mut rotation = BTreeMap::new();
    for (n, mut nbrs) in adj {
        let o = &positions[&n];
        let dirs: BTreeMap<Node, Direction> =
            nbrs.iter().map(|m| (m.clone(), Direction::between(o, &positions[m]))).collect();
        nbrs.sort_by(|a, b| dirs[a].angle_cmp(&dirs[b]));
        if let Some(k) = nbrs.iter().enumerate().min_by(|x, y| x.1.cmp(y.1)).map(|x| x.0) {
            nbrs.rotate_left(k);
        }
        rotation.insert(n, nbrs);
    }

    // face walks: next(u -> v) = v -> pred_v(u)
    let mut used: BTreeSet<(Node, Node)> = BTreeSet::new();
    let mut raw_walks: Vec<Vec<Node>> = Vec::new();
    for (u, nbrs) in &rotation {
        for v in nbrs {
            if used.contains(&(u.clone(), v.clone())) {
                continue;
            }
            let mut walk = Vec::new();
            let (mut a, mut b) = (u.clone(), v.clone());
            loop {
                used.insert((a.clone(), b.clone()));
                walk.push(a.clone());
                let c = pred_in_rotation(&rotation[&b], &a).clone();
                a = b;
                b = c;
                if &a == u && &b == v {
                    break;
                }
            }
            raw_walks.push(walk);
        }
    }

    // components by union-find over nodes
    let node_list: Vec<Node> = rotation.keys().cloned().collect();
    let index: BTreeMap<&Node, usize> = node_list.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut parent: Vec<usize> = (0..node_list.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for (u, nbrs) in &rotation {
        for v in nbrs {
            let (a, b) = (find(&mut parent, index[u]), find(&mut parent, index[v]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<Node>> = BTreeMap::new();
    for (i, n) in node_list.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().insert(n.clone());
    }

    let mut walks_by_root: BTreeMap<usize, Vec<Vec<Node>>> = BTreeMap::new();
    for w in raw_walks {
        let r = find(&mut parent, index[&w[0]]);
        walks_by_root.entry(r).or_default().push(w);
    }

    let mut components = Vec::new();
    for (root, nodes) in groups {
        let fragments = nodes.iter().map(|n| rotation[n].len()).sum::<usize>() / 2;
        let mut walks = walks_by_root.remove(&root).unwrap_or_default();
        let outer = if walks.is_empty() {
            Walk(Vec::new())
        } else {
            let areas: Vec<_> = walks
                .iter()
                .map(|w| signed_area2(&w.iter().map(|n| positions[n].clone()).collect::<Vec<_>>()))
                .collect();
            let k = (0..walks.len())
                .min_by(|&i, &j| areas[i].cmp(&areas[j]))
                .expect("non-empty");
            debug_assert!(!areas[k].is_positive());
            Walk::canonical(walks.swap_remove(k))
        };
        let mut inner: Vec<Walk> = walks.into_iter().map(Walk::canonical).collect();
        inner.sort();
        let id = nodes.iter().next().expect("non-empty component").clone();
        components.push(Component { id, nodes, fragments, outer, inner });
    }
    components.sort_by(|a, b| a.id.cmp(&b.id));

    let mut containment = BTreeMap::new();
    for x in &components {
        let p = &positions[&x.id];
        for y in &components {
            if x.id == y.id {
                continue;
            }
            let cell = y.inner.iter().find(|w| {
                let poly: Vec<Point> = w.0.iter().map(|n| positions[n].clone()).collect();
                winding_number(p, &poly) != 0
            });
            containment.insert((x.id.clone(), y.id.clone()), cell.cloned());
        }
    }

    CellComplex { positions, rotation, edge_nodes, components, containment }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Mismatch {
    /// A crossing present in only one of the drawings.
    CrossingSet { node: Node, in_first: bool },
    Rotation { node: Node, expected: Vec<Node>, found: Vec<Node> },
    /// Same rotations but different bounded cells (an orientation flip).
    Cells { walk: Walk, in_first: bool },
    OuterCell { component: Node, expected: Walk, found: Walk },
    Containment { component: Node, other: Node, expected: Option<Walk>, found: Option<Walk> },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Node]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            Mismatch::CrossingSet { node, in_first } => {
                let which = if *in_first { "first" } else { "second" };
                write!(f, "crossing {node} only in the {which} drawing")
            }
            Mismatch::Rotation { node, expected, found } => write!(
                f,
                "rotation at {node}: expected ({}), found ({})",
                list(expected),
                list(found)
            ),
            Mismatch::Cells { walk, in_first } => {
                let which = if *in_first { "first" } else { "second" };
                write!(f, "cell {walk} only in the {which} drawing (orientation mismatch)")
            }
            Mismatch::OuterCell { component, expected, found } => write!(
                f,
                "outer cell of component {component}: expected {expected}, found {found} (orientation mismatch)"
            ),
            Mismatch::Containment { component, other, expected, found } => {
                let s = |w: &Option<Walk>| w.as_ref().map_or("outer cell".to_string(), |w| w.to_string());
                write!(
                    f,
                    "component {component} inside {} of {other} in the first drawing, {} in the second",
                    s(expected),
                    s(found)
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub first_mismatch: Option<Mismatch>,
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_mismatch {
            None => write!(f, "equivalent"),
            Some(m) => write!(f, "{m}"),
        }
    }
}

/// Compare two cell complexes of the same graph under the identity labelling.
pub fn compare_complexes(a: &CellComplex, b: &CellComplex) -> EquivalenceReport {
    let found = |m: Mismatch| EquivalenceReport { equivalent: false, first_mismatch: Some(m) };
    let na: BTreeSet<&Node> = a.rotation.keys().collect();
    let nb: BTreeSet<&Node> = b.rotation.keys().collect();
    if let Some(n) = na.difference(&nb).next() {
        return found(Mismatch::CrossingSet { node: (*n).clone(), in_first: true });
    }
    if let Some(n) = nb.difference(&na).next() {
        return found(Mismatch::CrossingSet { node: (*n).clone(), in_first: false });
    }
    for (n, ra) in &a.rotation {
        let rb = &b.rotation[n];
        if ra != rb {
            return found(Mismatch::Rotation { node: n.clone(), expected: ra.clone(), found: rb.clone() });
        }
    }
    let wa: BTreeSet<&Walk> = a.walks().collect();
    let wb: BTreeSet<&Walk> = b.walks().collect();
    if let Some(w) = wa.difference(&wb).next() {
        return found(Mismatch::Cells { walk: (*w).clone(), in_first: true });
    }
    if let Some(w) = wb.difference(&wa).next() {
        return found(Mismatch::Cells { walk: (*w).clone(), in_first: false });
    }
    for (ca, cb) in a.components.iter().zip(&b.components) {
        if ca.outer != cb.outer {
            return found(Mismatch::OuterCell {
                component: ca.id.clone(),
                expected: ca.outer.clone(),
                found: cb.outer.clone(),
            });
        }
    }
    for (key, ea) in &a.containment {
        let eb = &b.containment[key];
        if ea != eb {
            return found(Mismatch::Containment {
                component: key.0.clone(),
                other: key.1.clone(),
                expected: ea.clone(),
                found: eb.clone(),
            });
        }
    }
    EquivalenceReport { equivalent: true, first_mismatch: None }
}

/// Orientation-preserving topological equivalence of two valid drawings of
/// the same graph.
pub fn topologically_equivalent(a: &Drawing, b: &Drawing) -> Result<EquivalenceReport> {
    if a.graph() != b.graph() {
        return Err(Error::GraphMismatch);
    }
    for d in [a, b] {
        let v = validate_drawing(d);
        if !v.is_empty() {
            return Err(Error::InvalidDrawing(v));
        }
    }
    Ok(compare_complexes(&planarize(a), &planarize(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::drawing_from_ints;

    fn kite(pts: [(i64, i64); 4]) -> Drawing {
        drawing_from_ints(
            &[("a", pts[0].0, pts[0].1), ("b", pts[1].0, pts[1].1), ("c", pts[2].0, pts[2].1), ("d", pts[3].0, pts[3].1)],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c"), ("b", "d")],
        )
        .unwrap()
    }

    #[test]
    fn triangle_has_two_cells() {
        let d = drawing_from_ints(&[("a", 0, 0), ("b", 1, 0), ("c", 0, 1)], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let cc = planarize(&d);
        assert_eq!(cc.walks().count(), 2);
        assert_eq!(cc.crossing_nodes().count(), 0);
        assert!(cc.euler_holds());
        let outer = &cc.components[0].outer;
        assert_eq!(outer.0, vec![Node::Vertex("a".into()), Node::Vertex("c".into()), Node::Vertex("b".into())]);
    }

    #[test]
    fn kite_has_five_cells() {
        let cc = planarize(&kite([(0, 0), (2, 0), (2, 2), (0, 2)]));
        assert_eq!(cc.crossing_nodes().count(), 1);
        assert_eq!(cc.walks().count(), 5);
        assert!(cc.components[0].inner.iter().all(|w| w.len() == 3));
        assert_eq!(cc.components[0].outer.len(), 4);
        assert!(cc.euler_holds());
    }

    #[test]
    fn single_edge_walk_traverses_twice() {
        let d = drawing_from_ints(&[("a", 0, 0), ("b", 1, 0)], &[("a", "b")]).unwrap();
        let cc = planarize(&d);
        assert_eq!(cc.walks().count(), 1);
        assert_eq!(cc.components[0].outer.len(), 2);
        assert!(cc.euler_holds());
    }

    #[test]
    fn equivalence_examples() {
        let d = kite([(0, 0), (2, 0), (2, 2), (0, 2)]);
        assert!(topologically_equivalent(&d, &d).unwrap().equivalent);
        let moved = kite([(10, 10), (14, 10), (14, 14), (10, 14)]);
        assert!(topologically_equivalent(&d, &moved).unwrap().equivalent);
        let mirrored = kite([(0, 0), (-2, 0), (-2, 2), (0, 2)]);
        let r = topologically_equivalent(&d, &mirrored).unwrap();
        assert!(!r.equivalent);
    }

    #[test]
    fn mirrored_triangle_is_an_outer_cell_mismatch() {
        let a = drawing_from_ints(&[("a", 0, 0), ("b", 1, 0), ("c", 0, 1)], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let b = drawing_from_ints(&[("a", 0, 0), ("b", -1, 0), ("c", 0, 1)], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let r = topologically_equivalent(&a, &b).unwrap();
        assert!(!r.equivalent);
        assert!(matches!(r.first_mismatch, Some(Mismatch::Cells { .. } | Mismatch::OuterCell { .. })));
    }

    #[test]
    fn graph_mismatch_is_an_error() {
        let a = drawing_from_ints(&[("a", 0, 0), ("b", 1, 0)], &[("a", "b")]).unwrap();
        let b = drawing_from_ints(&[("a", 0, 0), ("b", 1, 0)], &[]).unwrap();
        assert!(matches!(topologically_equivalent(&a, &b), Err(Error::GraphMismatch)));
    }

    #[test]
    fn nesting_of_components_is_compared() {
        let tri = [("a", 0, 0), ("b", 10, 0), ("c", 0, 10)];
        let e = [("a", "b"), ("b", "c"), ("c", "a")];
        let inside = drawing_from_ints(&[tri[0], tri[1], tri[2], ("x", 1, 1)], &e).unwrap();
        let outside = drawing_from_ints(&[tri[0], tri[1], tri[2], ("x", 20, 20)], &e).unwrap();
        let r = topologically_equivalent(&inside, &outside).unwrap();
        assert!(matches!(r.first_mismatch, Some(Mismatch::Containment { .. })));
        let cc = planarize(&inside);
        assert_eq!(cc.outer_cell().len(), 1);
        assert!(cc.euler_holds());
    }

    #[test]
    fn crossing_set_difference() {
        let a = kite([(0, 0), (2, 0), (2, 2), (0, 2)]);
        // c pulled inside triangle abd: diagonals no longer cross
        let b = drawing_from_ints(
            &[("a", 0, 0), ("b", 4, 0), ("c", 1, 1), ("d", 0, 4)],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c"), ("b", "d")],
        )
        .unwrap();
        let r = topologically_equivalent(&a, &b).unwrap();
        assert!(matches!(r.first_mismatch, Some(Mismatch::CrossingSet { .. })));
    }

    #[test]
    fn similarity_invariance() {
        let d = kite([(0, 0), (3, 1), (2, 5), (-1, 2)]);
        // rotate by 90 degrees and scale by 2: (x, y) -> (-2y, 2x)
        let mut r = d.clone();
        for (v, p) in d.positions() {
            let two = crate::geom::Rational::from_integer(2.into());
            r.set_pos(v, Point::new(-(p.y() * &two), p.x() * &two)).unwrap();
        }
        let (ca, cb) = (planarize(&d), planarize(&r));
        assert_eq!(ca.rotation, cb.rotation);
        assert_eq!(ca.components, cb.components);
    }
}
