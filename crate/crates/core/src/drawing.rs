//! Straight-line drawings: a graph plus an injective vertex placement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{
    orient, point_on_open_segment, segments_cross, ApproxPoint, CrossKind, Orientation, Point,
    Segment,
};
use crate::graph::{Edge, Graph, VertexId};

/// Floating-point positions of one morph frame.
pub type Frame = BTreeMap<VertexId, ApproxPoint>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Violation {
    CoincidentVertices { first: VertexId, second: VertexId },
    VertexOnEdge { vertex: VertexId, edge: Edge },
    /// Two edges overlap along a segment of positive length.
    Degenerate { first: Edge, second: Edge },
    /// Three or more edges pass through one crossing point.
    ConcurrentCrossing { edges: Vec<Edge> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CoincidentVertices { first, second } => {
                write!(f, "vertices {first} and {second} coincide")
            }
            Violation::VertexOnEdge { vertex, edge } => {
                write!(f, "vertex {vertex} lies on the interior of edge {edge}")
            }
            Violation::Degenerate { first, second } => {
                write!(f, "edges {first} and {second} overlap")
            }
            Violation::ConcurrentCrossing { edges } => {
                let list: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
                write!(f, "edges {} cross at a single point", list.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Drawing {
    graph: Graph,
    pos: BTreeMap<VertexId, Point>,
}

impl Drawing {
    /// Every vertex needs a position and every position a vertex.
    pub fn new(graph: Graph, pos: BTreeMap<VertexId, Point>) -> Result<Self> {
        for v in graph.vertices() {
            if !pos.contains_key(v) {
                return Err(Error::MissingPosition(v.clone()));
            }
        }
        if let Some(v) = pos.keys().find(|v| !graph.contains_vertex(v)) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        Ok(Drawing { graph, pos })
    }

    pub fn empty() -> Self {
        Drawing { graph: Graph::new(), pos: BTreeMap::new() }
    }

    /// Build from a float frame; coordinates are converted exactly.
    pub fn from_frame(graph: &Graph, frame: &Frame) -> Result<Self> {
        let mut pos = BTreeMap::new();
        for v in graph.vertices() {
            let p = frame.get(v).ok_or_else(|| Error::MissingPosition(v.clone()))?;
            pos.insert(v.clone(), p.to_exact()?);
        }
        Ok(Drawing { graph: graph.clone(), pos })
    }

    pub fn to_frame(&self) -> Frame {
        self.pos.iter().map(|(v, p)| (v.clone(), p.approx())).collect()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn positions(&self) -> &BTreeMap<VertexId, Point> {
        &self.pos
    }

    /// Panics if `v` is not a vertex.
    pub fn pos(&self, v: &VertexId) -> &Point {
        &self.pos[v]
    }

    pub fn get(&self, v: &VertexId) -> Option<&Point> {
        self.pos.get(v)
    }

    pub fn segment(&self, e: &Edge) -> Segment {
        Segment { a: self.pos[e.u()].clone(), b: self.pos[e.v()].clone() }
    }

    pub fn add_vertex(&mut self, v: VertexId, p: Point) -> Result<()> {
        self.graph.add_vertex(v.clone())?;
        self.pos.insert(v, p);
        Ok(())
    }

    pub fn add_edge(&mut self, a: &VertexId, b: &VertexId) -> Result<()> {
        self.graph.add_edge(a, b)
    }

    pub fn remove_vertex(&mut self, v: &VertexId) -> bool {
        self.pos.remove(v);
        self.graph.remove_vertex(v)
    }

    pub fn set_pos(&mut self, v: &VertexId, p: Point) -> Result<()> {
        match self.pos.get_mut(v) {
            Some(slot) => {
                *slot = p;
                Ok(())
            }
            None => Err(Error::UnknownVertex(v.clone())),
        }
    }

    /// Restriction to `keep`; positions unchanged.
    pub fn subdrawing(&self, keep: &BTreeSet<VertexId>) -> Result<Drawing> {
        if let Some(v) = keep.iter().find(|v| !self.graph.contains_vertex(v)) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        let graph = self.graph.induced(keep);
        let pos = keep.iter().map(|v| (v.clone(), self.pos[v].clone())).collect();
        Ok(Drawing { graph, pos })
    }

    pub fn remove_edges(&self, edges: &BTreeSet<Edge>) -> Result<Drawing> {
        let mut out = self.clone();
        for e in edges {
            if !out.graph.remove_edge(e) {
                return Err(Error::InvalidEdge(e.u().clone(), e.v().clone(), "not an edge"));
            }
        }
        Ok(out)
    }

    /// Length of the bounding-box diagonal (in floating point).
    pub fn bbox_diagonal(&self) -> f64 {
        frame_diagonal(self.pos.values().map(|p| p.approx()))
    }
}

pub fn frame_diagonal(points: impl IntoIterator<Item = ApproxPoint>) -> f64 {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo = (lo.0.min(p.x), lo.1.min(p.y));
        hi = (hi.0.max(p.x), hi.1.max(p.y));
    }
    if lo.0 > hi.0 {
        return 0.0;
    }
    (hi.0 - lo.0).hypot(hi.1 - lo.1)
}

fn collinear_overlap(s: &Segment, t: &Segment) -> bool {
    if orient(&s.a, &s.b, &t.a) != Orientation::Collinear
        || orient(&s.a, &s.b, &t.b) != Orientation::Collinear
    {
        return false;
    }
    // positive-length overlap of collinear segments: some endpoint of one lies
    // strictly inside the other, or they coincide
    point_on_open_segment(&s.a, &s.b, &t.a)
        || point_on_open_segment(&s.a, &s.b, &t.b)
        || point_on_open_segment(&t.a, &t.b, &s.a)
        || point_on_open_segment(&t.a, &t.b, &s.b)
        || (s.a == t.a && s.b == t.b)
        || (s.a == t.b && s.b == t.a)
}

/// All violations of the drawing invariants; empty iff the drawing is valid.
pub fn validate_drawing(d: &Drawing) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut by_point: BTreeMap<&Point, Vec<&VertexId>> = BTreeMap::new();
    for (v, p) in &d.pos {
        by_point.entry(p).or_default().push(v);
    }
    for ids in by_point.values() {
        for w in ids.windows(2) {
            out.push(Violation::CoincidentVertices { first: w[0].clone(), second: w[1].clone() });
        }
    }

    let edges: Vec<&Edge> = d.graph.edges().collect();
    let segs: Vec<Option<Segment>> = edges
        .iter()
        .map(|e| Segment::new(d.pos[e.u()].clone(), d.pos[e.v()].clone()).ok())
        .collect();
    let mut overlaps: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut crossings: BTreeMap<Point, BTreeSet<usize>> = BTreeMap::new();
    for i in 0..edges.len() {
        let Some(si) = &segs[i] else { continue };
        for j in (i + 1)..edges.len() {
            let Some(sj) = &segs[j] else { continue };
            match segments_cross(si, sj) {
                CrossKind::ProperCross(p) => {
                    let set = crossings.entry(p).or_default();
                    set.insert(i);
                    set.insert(j);
                }
                CrossKind::Degenerate if collinear_overlap(si, sj) => {
                    overlaps.insert((i, j));
                    out.push(Violation::Degenerate {
                        first: edges[i].clone(),
                        second: edges[j].clone(),
                    });
                }
                _ => {}
            }
        }
    }

    let overlapping = |x: &VertexId, j: usize| {
        edges.iter().enumerate().any(|(i, e)| {
            e.has(x) && overlaps.contains(&(i.min(j), i.max(j)))
        })
    };
    for (x, p) in &d.pos {
        for (j, e) in edges.iter().enumerate() {
            if e.has(x) || segs[j].is_none() {
                continue;
            }
            if point_on_open_segment(&d.pos[e.u()], &d.pos[e.v()], p) && !overlapping(x, j) {
                out.push(Violation::VertexOnEdge { vertex: x.clone(), edge: (*e).clone() });
            }
        }
    }

    for set in crossings.values() {
        if set.len() >= 3 {
            out.push(Violation::ConcurrentCrossing {
                edges: set.iter().map(|&i| edges[i].clone()).collect(),
            });
        }
    }
    out
}

/// Convenience constructor used by tests and corpus builders.
pub fn drawing_from_ints(verts: &[(&str, i64, i64)], edges: &[(&str, &str)]) -> Result<Drawing> {
    let mut d = Drawing::empty();
    for (id, x, y) in verts {
        d.add_vertex(VertexId::from(*id), Point::from_ints(*x, *y))?;
    }
    for (a, b) in edges {
        d.add_edge(&VertexId::from(*a), &VertexId::from(*b))?;
    }
    Ok(d)
}

/// Every properly crossing pair of edges, smaller edge first, with the
/// crossing point.
pub fn crossing_pairs(d: &Drawing) -> Vec<(Edge, Edge, Point)> {
    let edges: Vec<&Edge> = d.graph.edges().collect();
    let segs: Vec<Segment> = edges.iter().map(|e| d.segment(e)).collect();
    let mut out = Vec::new();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            if edges[i].shares_endpoint(edges[j]) {
                continue;
            }
            if let CrossKind::ProperCross(p) = segments_cross(&segs[i], &segs[j]) {
                out.push((edges[i].clone(), edges[j].clone(), p));
            }
        }
    }
    out
}

/// Can the straight segment `a b` be added to `d` without crossing or
/// touching any edge and without passing through a vertex?
pub fn segment_addable(d: &Drawing, a: &VertexId, b: &VertexId) -> bool {
    let (pa, pb) = (d.pos(a), d.pos(b));
    if pa == pb {
        return false;
    }
    let s = Segment { a: pa.clone(), b: pb.clone() };
    for (v, p) in &d.pos {
        if v != a && v != b && point_on_open_segment(pa, pb, p) {
            return false;
        }
    }
    d.graph.edges().all(|e| {
        matches!(segments_cross(&s, &d.segment(e)), CrossKind::Disjoint | CrossKind::SharedEndpoint)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kite() -> Drawing {
        drawing_from_ints(
            &[("a", 0, 0), ("b", 2, 0), ("c", 2, 2), ("d", 0, 2)],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c"), ("b", "d")],
        )
        .unwrap()
    }

    #[test]
    fn kite_is_valid() {
        assert!(validate_drawing(&kite()).is_empty());
    }

    #[test]
    fn overlapping_edges_reported_once() {
        let d = drawing_from_ints(
            &[("a", 0, 0), ("b", 4, 0), ("c", 1, 0), ("d", 6, 0)],
            &[("a", "b"), ("c", "d")],
        )
        .unwrap();
        let v = validate_drawing(&d);
        assert_eq!(
            v,
            vec![Violation::Degenerate {
                first: Edge::of(&"a".into(), &"b".into()),
                second: Edge::of(&"c".into(), &"d".into())
            }]
        );
    }

    #[test]
    fn vertex_on_edge_reported() {
        let d = drawing_from_ints(
            &[("a", 0, 0), ("b", 4, 0), ("x", 2, 0), ("y", 2, 3)],
            &[("a", "b"), ("x", "y")],
        )
        .unwrap();
        let v = validate_drawing(&d);
        assert_eq!(
            v,
            vec![Violation::VertexOnEdge {
                vertex: "x".into(),
                edge: Edge::of(&"a".into(), &"b".into())
            }]
        );
    }

    #[test]
    fn isolated_vertex_on_edge() {
        let d = drawing_from_ints(&[("a", 0, 0), ("b", 4, 4), ("x", 1, 1)], &[("a", "b")]).unwrap();
        assert_eq!(validate_drawing(&d).len(), 1);
    }

    #[test]
    fn coincident_vertices() {
        let d = drawing_from_ints(&[("a", 0, 0), ("b", 0, 0)], &[]).unwrap();
        assert!(matches!(validate_drawing(&d)[0], Violation::CoincidentVertices { .. }));
    }

    #[test]
    fn concurrent_crossing() {
        let d = drawing_from_ints(
            &[("a", -1, 0), ("b", 1, 0), ("c", 0, -1), ("d", 0, 1), ("e", -1, -1), ("f", 1, 1)],
            &[("a", "b"), ("c", "d"), ("e", "f")],
        )
        .unwrap();
        let v = validate_drawing(&d);
        assert!(matches!(&v[..], [Violation::ConcurrentCrossing { edges }] if edges.len() == 3));
    }

    #[test]
    fn removing_diagonals_gives_cycle() {
        let d = kite();
        let diag: BTreeSet<Edge> =
            [Edge::of(&"a".into(), &"c".into()), Edge::of(&"b".into(), &"d".into())].into();
        let c = d.remove_edges(&diag).unwrap();
        assert_eq!(c.graph().edge_count(), 4);
        assert!(c.graph().vertices().all(|v| c.graph().degree(v) == 2));
        assert_eq!(d.remove_edges(&BTreeSet::new()).unwrap(), d);
        assert!(d.remove_edges(&[Edge::of(&"a".into(), &"z".into())].into()).is_err());
    }

    #[test]
    fn subdrawing_keeps_positions() {
        let d = kite();
        let keep: BTreeSet<VertexId> = ["a".into(), "b".into(), "c".into()].into();
        let s = d.subdrawing(&keep).unwrap();
        assert_eq!(s.graph().edge_count(), 3);
        assert_eq!(s.pos(&"c".into()), d.pos(&"c".into()));
        assert!(d.subdrawing(&["q".into()].into()).is_err());
    }
}
