//! Connecting the components of two equivalent planar drawings with
//! identical polyline paths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::drawing::Drawing;
use crate::error::{Error, Result};
use crate::geom::{point_on_open_segment, segments_cross, CrossKind, Direction, Point, Rational, Segment};
use crate::graph::{Edge, VertexId};
use crate::planar::{planarize, Node};

use super::IdGen;

/// Wedge at a vertex: from the direction of `start` counterclockwise to the
/// direction of `end`. `None` for an isolated vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Corner {
    v: VertexId,
    wedge: Option<(VertexId, VertexId)>,
}

impl Corner {
    fn contains(&self, d: &Drawing, dir: &Direction) -> bool {
        match &self.wedge {
            None => true,
            Some((s, e)) => {
                let p = d.pos(&self.v);
                Direction::between(p, d.pos(s)).strictly_within_ccw(&Direction::between(p, d.pos(e)), dir)
            }
        }
    }
}

/// Triangles (counterclockwise vertex triples) of a greedy constrained
/// triangulation of the convex hull, with the drawing's edges as constraints.
pub(crate) fn hull_triangulation(d: &Drawing) -> Result<Vec<[VertexId; 3]>> {
    let vs: Vec<&VertexId> = d.graph().vertices().collect();
    let mut segs: Vec<Segment> = d.graph().edges().map(|e| d.segment(e)).collect();
    let mut deg: BTreeMap<&VertexId, usize> = vs.iter().map(|v| (*v, d.graph().degree(v))).collect();
    let mut cand: Vec<(Rational, usize, usize)> = Vec::new();
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            if !d.graph().has_edge(vs[i], vs[j]) {
                cand.push((d.pos(vs[i]).dist2(d.pos(vs[j])), i, j));
            }
        }
    }
    cand.sort();
    let mut full = d.clone();
    for (_, i, j) in cand {
        let s = Segment { a: d.pos(vs[i]).clone(), b: d.pos(vs[j]).clone() };
        let clear = segs
            .iter()
            .all(|t| matches!(segments_cross(&s, t), CrossKind::Disjoint | CrossKind::SharedEndpoint))
            && deg
                .iter()
                .all(|(v, &k)| k > 0 || *v == vs[i] || *v == vs[j] || !point_on_open_segment(&s.a, &s.b, d.pos(v)));
        if clear {
            segs.push(s);
            *deg.get_mut(vs[i]).unwrap() += 1;
            *deg.get_mut(vs[j]).unwrap() += 1;
            full.add_edge(vs[i], vs[j])?;
        }
    }
    let cc = planarize(&full);
    let mut out = Vec::new();
    for c in &cc.components {
        for w in &c.inner {
            let t = w.vertices();
            if t.len() != 3 {
                return Err(Error::InternalInvariant(format!("greedy triangulation left a face of length {}", t.len())));
            }
            out.push([t[0].clone(), t[1].clone(), t[2].clone()]);
        }
    }
    Ok(out)
}

fn centroid(d: &Drawing, t: &[VertexId; 3]) -> Point {
    let three = Rational::from_integer(3.into());
    let (a, b, c) = (d.pos(&t[0]), d.pos(&t[1]), d.pos(&t[2]));
    Point::new((a.x() + b.x() + c.x()) / &three, (a.y() + b.y() + c.y()) / &three)
}

/// Counterclockwise graph neighbours of `v`.
fn ccw_neighbours(d: &Drawing, v: &VertexId) -> Vec<VertexId> {
    let p = d.pos(v);
    let mut ns: Vec<VertexId> = d.graph().neighbors(v).cloned().collect();
    ns.sort_by(|a, b| Direction::between(p, d.pos(a)).angle_cmp(&Direction::between(p, d.pos(b))));
    ns
}

/// The corner of `v` whose wedge contains direction `dir`.
fn corner_containing(d: &Drawing, v: &VertexId, dir: &Direction) -> Corner {
    let ns = ccw_neighbours(d, v);
    if ns.is_empty() {
        return Corner { v: v.clone(), wedge: None };
    }
    for i in 0..ns.len() {
        let c = Corner { v: v.clone(), wedge: Some((ns[i].clone(), ns[(i + 1) % ns.len()].clone())) };
        if c.contains(d, dir) {
            return c;
        }
    }
    unreachable!("a direction off every edge lies in some wedge")
}

struct Route {
    target: Corner,
    /// Centroid / shared-side-midpoint relay points, in order.
    relays: Vec<Point>,
}

/// Breadth-first search over triangles, never crossing a graph edge, from
/// the triangles in `start`'s wedge to a triangle satisfying `is_target`.
fn route(
    d: &Drawing,
    tris: &[[VertexId; 3]],
    start: &Corner,
    is_target: &dyn Fn(&Drawing, &[VertexId; 3]) -> Option<Corner>,
) -> Option<Route> {
    let mut by_side: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (i, t) in tris.iter().enumerate() {
        for s in 0..3 {
            by_side.entry(Edge::of(&t[s], &t[(s + 1) % 3])).or_default().push(i);
        }
    }
    let p0 = d.pos(&start.v);
    let mut parent: Vec<Option<usize>> = vec![None; tris.len()];
    let mut seen = vec![false; tris.len()];
    let mut queue = VecDeque::new();
    for (i, t) in tris.iter().enumerate() {
        if t.contains(&start.v) && start.contains(d, &Direction::between(p0, &centroid(d, t))) {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        if let Some(target) = is_target(d, &tris[i]) {
            let mut chain = vec![i];
            while let Some(p) = parent[*chain.last().unwrap()] {
                chain.push(p);
            }
            chain.reverse();
            let mut relays = vec![centroid(d, &tris[chain[0]])];
            for w in chain.windows(2) {
                let shared: Vec<&VertexId> = tris[w[0]].iter().filter(|v| tris[w[1]].contains(v)).collect();
                relays.push(d.pos(shared[0]).midpoint(d.pos(shared[1])));
                relays.push(centroid(d, &tris[w[1]]));
            }
            return Some(Route { target, relays });
        }
        for s in 0..3 {
            let (x, y) = (&tris[i][s], &tris[i][(s + 1) % 3]);
            if d.graph().has_edge(x, y) {
                continue;
            }
            for &j in &by_side[&Edge::of(x, y)] {
                if !seen[j] {
                    seen[j] = true;
                    parent[j] = Some(i);
                    queue.push_back(j);
                }
            }
        }
    }
    None
}

/// Split the longest segments of the polyline `from, relays.., to` until it
/// has `want` relay points.
fn pad(from: &Point, to: &Point, relays: &mut Vec<Point>, want: usize) {
    while relays.len() < want {
        let mut pts = vec![from.clone()];
        pts.extend(relays.iter().cloned());
        pts.push(to.clone());
        let k = (0..pts.len() - 1)
            .max_by(|&i, &j| pts[i].dist2(&pts[i + 1]).cmp(&pts[j].dist2(&pts[j + 1])).then(j.cmp(&i)))
            .unwrap();
        relays.insert(k, pts[k].midpoint(&pts[k + 1]));
    }
}

/// Join all components of the equivalent planar drawings `a` and `b` by
/// identical abstract paths. Returns the new relay vertices.
pub(crate) fn connect(a: &mut Drawing, b: &mut Drawing, ids: &mut IdGen) -> Result<Vec<VertexId>> {
    let mut relays_added = Vec::new();
    loop {
        let cc = planarize(a);
        if cc.components.len() <= 1 {
            break;
        }
        let outermost: Vec<&Node> = cc
            .components
            .iter()
            .filter(|x| cc.components.iter().all(|y| y.id == x.id || cc.containment[&(x.id.clone(), y.id.clone())].is_none()))
            .map(|c| &c.id)
            .collect();
        let x = cc
            .components
            .iter()
            .find(|c| !outermost.contains(&&c.id) || outermost[0] != &c.id)
            .expect("two or more components");
        let members: BTreeSet<VertexId> = x.nodes.iter().filter_map(|n| n.as_vertex().cloned()).collect();

        let start = if x.outer.is_empty() {
            Corner { v: x.id.as_vertex().expect("vertex").clone(), wedge: None }
        } else {
            let w = x.outer.vertices();
            Corner { v: w[0].clone(), wedge: Some((w[1].clone(), w[w.len() - 1].clone())) }
        };

        let tris_a = hull_triangulation(a)?;
        let find_other = |d: &Drawing, t: &[VertexId; 3]| -> Option<Corner> {
            let y = t.iter().find(|v| !members.contains(*v))?;
            Some(corner_containing(d, y, &Direction::between(d.pos(y), &centroid(d, t))))
        };
        let ra = route(a, &tris_a, &start, &find_other)
            .ok_or_else(|| Error::InternalInvariant("no route between components".into()))?;
        let target = ra.target.clone();
        let tris_b = hull_triangulation(b)?;
        let find_same = |d: &Drawing, t: &[VertexId; 3]| -> Option<Corner> {
            if !t.contains(&target.v) {
                return None;
            }
            let dir = Direction::between(d.pos(&target.v), &centroid(d, t));
            target.contains(d, &dir).then(|| target.clone())
        };
        let rb = route(b, &tris_b, &start, &find_same)
            .ok_or_else(|| Error::InternalInvariant("no matching route in the second drawing".into()))?;

        let (mut pa, mut pb) = (ra.relays, rb.relays);
        let want = pa.len().max(pb.len());
        pad(a.pos(&start.v), a.pos(&target.v), &mut pa, want);
        pad(b.pos(&start.v), b.pos(&target.v), &mut pb, want);

        let mut prev = start.v.clone();
        for (qa, qb) in pa.into_iter().zip(pb) {
            let id = ids.fresh();
            a.add_vertex(id.clone(), qa)?;
            b.add_vertex(id.clone(), qb)?;
            a.add_edge(&prev, &id)?;
            b.add_edge(&prev, &id)?;
            relays_added.push(id.clone());
            prev = id;
        }
        a.add_edge(&prev, &target.v)?;
        b.add_edge(&prev, &target.v)?;
    }
    Ok(relays_added)
}
