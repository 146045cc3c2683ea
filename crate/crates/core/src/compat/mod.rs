//! Compatible augmentation of two equivalent planar drawings to a common
//! almost-triangulated supergraph, leaving marked quadrilateral faces alone.

mod connect;
mod face;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::drawing::{validate_drawing, Drawing};
use crate::error::{Error, Result};
use crate::geom::{Point, Rational};
use crate::graph::{Graph, VertexId};
use crate::planar::{planarize, topologically_equivalent, Walk};

use face::{triangle_sides, Slot};

/// Two equivalent planar drawings and the bounded faces (4-walks) that must
/// not be subdivided.
#[derive(Clone, Debug)]
pub struct MarkedPlanarPair {
    pub a: Drawing,
    pub b: Drawing,
    pub marked: BTreeSet<Walk>,
}

impl MarkedPlanarPair {
    pub fn new(a: Drawing, b: Drawing, marked: BTreeSet<Walk>) -> Result<Self> {
        for d in [&a, &b] {
            let v = validate_drawing(d);
            if !v.is_empty() {
                return Err(Error::InvalidDrawing(v));
            }
        }
        let rep = topologically_equivalent(&a, &b)?;
        if !rep.equivalent {
            return Err(Error::NotEquivalent(Box::new(rep)));
        }
        let cc = planarize(&a);
        if cc.crossing_nodes().next().is_some() {
            return Err(Error::InternalInvariant("drawings to triangulate must be planar".into()));
        }
        let bounded: BTreeSet<&Walk> = cc.components.iter().flat_map(|c| c.inner.iter()).collect();
        for m in &marked {
            if m.len() != 4 || !bounded.contains(m) {
                return Err(Error::InternalInvariant(format!("marked walk {m} is not a bounded quadrilateral face")));
            }
        }
        Ok(MarkedPlanarPair { a, b, marked })
    }
}

/// Source of vertex ids that do not collide with existing ones.
#[derive(Clone, Debug)]
pub struct IdGen {
    prefix: String,
    next: usize,
}

impl IdGen {
    pub fn avoiding<'a>(base: &str, taken: impl IntoIterator<Item = &'a VertexId>) -> Self {
        let taken: Vec<&VertexId> = taken.into_iter().collect();
        let mut prefix = base.to_string();
        while taken.iter().any(|v| v.as_str().starts_with(&prefix)) {
            prefix.push('~');
        }
        IdGen { prefix, next: 0 }
    }

    pub fn fresh(&mut self) -> VertexId {
        let v = VertexId::new(format!("{}{}", self.prefix, self.next));
        self.next += 1;
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Enclose {
    /// Add an enclosing triangle unless the outer face is already a triangle.
    #[default]
    Auto,
    Always,
}

#[derive(Clone, Debug)]
pub struct CompatibleResult {
    pub a: Drawing,
    pub b: Drawing,
    /// Every vertex not in the input: enclosing corners, relays and overlay points.
    pub steiner: BTreeSet<VertexId>,
    /// Fresh corners of the enclosing triangle, identical in both drawings.
    pub enclosing: Option<[VertexId; 3]>,
    /// Outer face of the result, counterclockwise.
    pub outer: [VertexId; 3],
    pub marked: BTreeSet<Walk>,
    /// Bounded faces of the result: triangles and the marked quadrilaterals.
    pub faces: Vec<Walk>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompatibleStats {
    pub input_vertices: usize,
    pub steiner_vertices: usize,
    pub faces: usize,
}

impl CompatibleResult {
    pub fn stats(&self, input_vertices: usize) -> CompatibleStats {
        CompatibleStats { input_vertices, steiner_vertices: self.steiner.len(), faces: self.faces.len() }
    }
}

fn union_bbox(ds: &[&Drawing]) -> Option<(Rational, Rational, Rational, Rational)> {
    let mut it = ds.iter().flat_map(|d| d.positions().values());
    let first = it.next()?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.x().clone(), first.y().clone(), first.x().clone(), first.y().clone());
    for p in it {
        if p.x() < &x0 {
            x0 = p.x().clone();
        }
        if p.x() > &x1 {
            x1 = p.x().clone();
        }
        if p.y() < &y0 {
            y0 = p.y().clone();
        }
        if p.y() > &y1 {
            y1 = p.y().clone();
        }
    }
    Some((x0, y0, x1, y1))
}

/// Corners of a triangle strictly containing both drawings.
pub fn enclosing_triangle(a: &Drawing, b: &Drawing) -> [Point; 3] {
    let one = Rational::from_integer(1.into());
    let (x0, y0, x1, y1) =
        union_bbox(&[a, b]).unwrap_or((Rational::from_integer(0.into()), Rational::from_integer(0.into()), one.clone(), one.clone()));
    let mut w = &x1 - &x0;
    if &y1 - &y0 > w {
        w = &y1 - &y0;
    }
    if w < one {
        w = one;
    }
    let four = Rational::from_integer(4.into());
    [
        Point::new(&x0 - &w, &y0 - &w),
        Point::new(&x0 + &w * &four, &y0 - &w),
        Point::new(&x0 - &w, &y0 + &w * &four),
    ]
}

fn outer_is_simple_triangle(d: &Drawing) -> Option<[VertexId; 3]> {
    let cc = planarize(d);
    if cc.components.len() != 1 {
        return None;
    }
    let w = cc.components[0].outer.vertices();
    let distinct: BTreeSet<&VertexId> = w.iter().collect();
    (w.len() == 3 && distinct.len() == 3).then(|| [w[0].clone(), w[1].clone(), w[2].clone()])
}

/// Make the graphs of an equivalent pair connected by adding identical
/// relay paths through corresponding cells.
pub fn connect_components(pair: &MarkedPlanarPair) -> Result<(MarkedPlanarPair, Vec<VertexId>)> {
    let (mut a, mut b) = (pair.a.clone(), pair.b.clone());
    let mut ids = IdGen::avoiding("~r", a.graph().vertices());
    let added = connect::connect(&mut a, &mut b, &mut ids)?;
    let rep = topologically_equivalent(&a, &b)?;
    if !rep.equivalent {
        return Err(Error::InternalInvariant(format!("connecting paths broke equivalence: {rep}")));
    }
    Ok((MarkedPlanarPair { a, b, marked: pair.marked.clone() }, added))
}

pub fn compatible_triangulate(pair: &MarkedPlanarPair) -> Result<CompatibleResult> {
    compatible_triangulate_with(pair, Enclose::Auto)
}

pub fn compatible_triangulate_with(pair: &MarkedPlanarPair, enclose: Enclose) -> Result<CompatibleResult> {
    let (mut a, mut b) = (pair.a.clone(), pair.b.clone());
    let mut steiner = BTreeSet::new();
    let taken: Vec<VertexId> = a.graph().vertices().cloned().collect();
    let mut relay_ids = IdGen::avoiding("~r", &taken);

    // an outer triangle already present is kept once the components are joined
    let mut joined = None;
    if enclose == Enclose::Auto {
        let (mut ja, mut jb) = (a.clone(), b.clone());
        if let Ok(added) = connect::connect(&mut ja, &mut jb, &mut relay_ids.clone()) {
            if outer_is_simple_triangle(&ja).is_some() {
                joined = Some((ja, jb, added));
            }
        }
    }
    let enclosing = if let Some((ja, jb, added)) = joined {
        (a, b) = (ja, jb);
        steiner.extend(added);
        None
    } else {
        let mut ids = IdGen::avoiding("~t", a.graph().vertices());
        let corners = enclosing_triangle(&a, &b);
        let t: [VertexId; 3] = [ids.fresh(), ids.fresh(), ids.fresh()];
        for (v, p) in t.iter().zip(corners) {
            a.add_vertex(v.clone(), p.clone())?;
            b.add_vertex(v.clone(), p)?;
            steiner.insert(v.clone());
        }
        for i in 0..3 {
            a.add_edge(&t[i], &t[(i + 1) % 3])?;
            b.add_edge(&t[i], &t[(i + 1) % 3])?;
        }
        steiner.extend(connect::connect(&mut a, &mut b, &mut relay_ids)?);
        Some(t)
    };

    let cc = planarize(&a);
    let comp = &cc.components[0];
    let outer = comp.outer.vertices();
    if outer.len() != 3 {
        return Err(Error::InternalInvariant("outer face is not a triangle".into()));
    }
    let outer = [outer[0].clone(), outer[1].clone(), outer[2].clone()];
    // walk the outer triangle counterclockwise (the outer walk runs clockwise)
    let outer = [outer[0].clone(), outer[2].clone(), outer[1].clone()];

    let mut ids = IdGen::avoiding("~s", &taken.iter().chain(steiner.iter()).cloned().collect::<Vec<_>>());
    let graph: Graph = a.graph().clone();
    let mut faces = Vec::new();
    let mut new_edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for w in &comp.inner {
        if pair.marked.contains(w) {
            faces.push(w.clone());
            continue;
        }
        let walk = w.vertices();
        if walk.len() == 3 {
            faces.push(w.clone());
            continue;
        }
        let ft = face::triangulate_face(&walk, &a, &b, &|x, y| graph.has_edge(x, y))?;
        let names: Vec<VertexId> = ft.steiner.iter().map(|_| ids.fresh()).collect();
        for (id, (pa, pb)) in names.iter().zip(&ft.steiner) {
            a.add_vertex(id.clone(), pa.clone())?;
            b.add_vertex(id.clone(), pb.clone())?;
            steiner.insert(id.clone());
        }
        let name = |s: Slot| match s {
            Slot::Corner(i) => walk[i].clone(),
            Slot::Steiner(j) => names[j].clone(),
        };
        for t in &ft.triangles {
            faces.push(Walk::of_vertices(&t.map(name)));
            for (x, y) in triangle_sides(t) {
                let (x, y) = (name(x), name(y));
                if !graph.has_edge(&x, &y) {
                    new_edges.insert(if x < y { (x, y) } else { (y, x) });
                }
            }
        }
    }
    for (x, y) in &new_edges {
        a.add_edge(x, y)?;
        b.add_edge(x, y)?;
    }
    faces.sort();

    let out = CompatibleResult { a, b, steiner, enclosing, outer, marked: pair.marked.clone(), faces };
    verify_compatible(pair, &out)?;
    Ok(out)
}

/// Check every postcondition of a compatible triangulation of `pair`.
pub fn verify_compatible(pair: &MarkedPlanarPair, r: &CompatibleResult) -> Result<()> {
    let fail = |m: String| Err(Error::InternalInvariant(m));
    for (src, out) in [(&pair.a, &r.a), (&pair.b, &r.b)] {
        for (v, p) in src.positions() {
            if out.get(v) != Some(p) {
                return fail(format!("position of {v} changed"));
            }
        }
        if let Some(e) = src.graph().edges().find(|e| !out.graph().contains_edge(e)) {
            return fail(format!("edge {e} lost"));
        }
        let v = validate_drawing(out);
        if !v.is_empty() {
            return fail(format!("invalid result drawing: {}", v[0]));
        }
    }
    let rep = topologically_equivalent(&r.a, &r.b)?;
    if !rep.equivalent {
        return fail(format!("results not equivalent: {rep}"));
    }
    if !check_almost_triangulated(&r.a, &r.marked) {
        return fail("result is not almost triangulated".into());
    }
    let cc = planarize(&r.a);
    let walks: BTreeSet<&Walk> = cc.components[0].inner.iter().collect();
    if let Some(m) = r.marked.iter().find(|m| !walks.contains(m)) {
        return fail(format!("marked face {m} was subdivided"));
    }
    let n = pair.a.graph().vertex_count();
    if r.steiner.len() > 50 * n * n.max(1) {
        return fail(format!("{} new vertices for {n} input vertices", r.steiner.len()));
    }
    Ok(())
}

/// Every face, including the outer one, is a triangle or a marked
/// quadrilateral, and the drawing is planar and connected.
pub fn check_almost_triangulated(d: &Drawing, marked: &BTreeSet<Walk>) -> bool {
    if !validate_drawing(d).is_empty() {
        return false;
    }
    let cc = planarize(d);
    if cc.crossing_nodes().next().is_some() || cc.components.len() != 1 {
        return false;
    }
    let c = &cc.components[0];
    let simple_triangle = |w: &Walk| w.len() == 3 && w.0.iter().collect::<BTreeSet<_>>().len() == 3;
    simple_triangle(&c.outer) && c.inner.iter().all(|w| simple_triangle(w) || marked.contains(w))
}

/// No cut vertex or separation pair: by removing every vertex pair for
/// small graphs, by articulation search after each single removal otherwise.
pub fn check_triconnected(g: &Graph) -> bool {
    if g.vertex_count() <= 300 {
        g.is_triconnected_brute()
    } else {
        g.is_triconnected()
    }
}

/// Positions of the vertices of a result in one drawing, for debugging dumps.
pub fn positions_of(d: &Drawing, vs: &BTreeSet<VertexId>) -> BTreeMap<VertexId, Point> {
    vs.iter().filter_map(|v| d.get(v).map(|p| (v.clone(), p.clone()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::drawing_from_ints;

    fn pair(a: Drawing, b: Drawing) -> MarkedPlanarPair {
        MarkedPlanarPair::new(a, b, BTreeSet::new()).unwrap()
    }

    #[test]
    fn triangulated_input_is_unchanged() {
        let d = drawing_from_ints(&[("a", 0, 0), ("b", 4, 0), ("c", 0, 4)], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let r = compatible_triangulate(&pair(d.clone(), d.clone())).unwrap();
        assert!(r.steiner.is_empty());
        assert_eq!(r.a, d);
    }

    #[test]
    fn four_cycle_convex_and_reflex() {
        let a = drawing_from_ints(&[("a", 0, 0), ("b", 10, 0), ("c", 10, 10), ("d", 0, 10)], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
        let b = drawing_from_ints(&[("a", 0, 0), ("b", 10, 0), ("c", 3, 3), ("d", 0, 10)], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
        let r = compatible_triangulate(&pair(a, b)).unwrap();
        assert!(check_almost_triangulated(&r.a, &r.marked));
        assert!(check_triconnected(r.a.graph()));
        // the inner face shares (a, c): no overlay points, only the enclosure and relays
        let overlay = r.steiner.iter().filter(|v| v.as_str().starts_with("~s")).count();
        assert_eq!(overlay, 0);
    }

    #[test]
    fn two_disjoint_triangles_get_connected() {
        let e = [("a", "b"), ("b", "c"), ("c", "a"), ("x", "y"), ("y", "z"), ("z", "x")];
        let a = drawing_from_ints(&[("a", 0, 0), ("b", 4, 0), ("c", 0, 4), ("x", 10, 0), ("y", 14, 0), ("z", 10, 4)], &e).unwrap();
        let b = drawing_from_ints(&[("a", 0, 0), ("b", 4, 0), ("c", 0, 4), ("x", 0, 10), ("y", 4, 10), ("z", 0, 14)], &e).unwrap();
        let (c, added) = connect_components(&pair(a, b)).unwrap();
        assert!(c.a.graph().is_connected());
        assert!(!added.is_empty());
        assert!(topologically_equivalent(&c.a, &c.b).unwrap().equivalent);
    }

    #[test]
    fn marked_face_survives() {
        let e = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")];
        let a = drawing_from_ints(&[("a", 0, 0), ("b", 10, 0), ("c", 10, 10), ("d", 0, 10)], &e).unwrap();
        let b = drawing_from_ints(&[("a", 0, 0), ("b", 12, 2), ("c", 9, 11), ("d", -1, 8)], &e).unwrap();
        let m = Walk::of_vertices(&["a", "b", "c", "d"].map(VertexId::from));
        let p = MarkedPlanarPair::new(a, b, BTreeSet::from([m.clone()])).unwrap();
        let r = compatible_triangulate(&p).unwrap();
        assert!(r.faces.contains(&m));
        assert!(check_triconnected(r.a.graph()));
    }

    #[test]
    fn nonconvex_faces_need_overlay_points() {
        // a hexagonal face that is convex in one drawing and star-shaped
        // with alternating reflex corners in the other
        let names = ["p0", "p1", "p2", "p3", "p4", "p5"];
        let e: Vec<(&str, &str)> = (0..6).map(|i| (names[i], names[(i + 1) % 6])).collect();
        let hex = [(10, 0), (5, 9), (-5, 9), (-10, 0), (-5, -9), (5, -9)];
        let star = [(10, 0), (1, 2), (-5, 9), (-2, 0), (-5, -9), (1, -2)];
        let va: Vec<(&str, i64, i64)> = (0..6).map(|i| (names[i], hex[i].0, hex[i].1)).collect();
        let vb: Vec<(&str, i64, i64)> = (0..6).map(|i| (names[i], star[i].0, star[i].1)).collect();
        let a = drawing_from_ints(&va, &e).unwrap();
        let b = drawing_from_ints(&vb, &e).unwrap();
        let r = compatible_triangulate(&pair(a, b)).unwrap();
        assert!(check_almost_triangulated(&r.b, &r.marked));
        assert!(check_triconnected(r.b.graph()));
    }
}
