//! Compatible triangulation of one face given as a closed walk of corners.

use std::collections::{BTreeMap, BTreeSet};

use crate::drawing::Drawing;
use crate::error::{Error, Result};
use crate::geom::{
    barycentric, combine, line_intersection, orient, segments_cross, CrossKind, Direction, Orientation,
    Point,
};
use crate::graph::VertexId;

/// A vertex of a face triangulation: a corner of the walk or a new point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Slot {
    Corner(usize),
    Steiner(usize),
}

pub(crate) struct FaceTriangulation {
    /// Positions of new points in the first and second drawing.
    pub steiner: Vec<(Point, Point)>,
    pub triangles: Vec<[Slot; 3]>,
}

/// Corner `i` of a walk: the wedge at `walk[i]` swept counterclockwise
/// from the outgoing to the incoming direction.
fn in_wedge(d: &Drawing, walk: &[VertexId], i: usize, dir: &Direction) -> bool {
    let k = walk.len();
    let p = d.pos(&walk[i]);
    let next = Direction::between(p, d.pos(&walk[(i + 1) % k]));
    let prev = Direction::between(p, d.pos(&walk[(i + k - 1) % k]));
    next.strictly_within_ccw(&prev, dir)
}

fn chords_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    let (i, j) = (a.0.min(a.1), a.0.max(a.1));
    if b.0 == i || b.0 == j || b.1 == i || b.1 == j {
        return false;
    }
    let inside = |x: usize| i < x && x < j;
    inside(b.0) != inside(b.1)
}

struct Greedy<'a> {
    walk: &'a [VertexId],
    has_edge: &'a dyn Fn(&VertexId, &VertexId) -> bool,
}

impl Greedy<'_> {
    fn valid(&self, d: &Drawing, accepted: &[(usize, usize)], i: usize, j: usize) -> bool {
        let k = self.walk.len();
        let (vi, vj) = (&self.walk[i], &self.walk[j]);
        if vi == vj || (self.has_edge)(vi, vj) {
            return false;
        }
        if accepted.iter().any(|&(x, y)| {
            let (a, b) = (&self.walk[x], &self.walk[y]);
            (a == vi && b == vj) || (a == vj && b == vi) || chords_cross((x, y), (i, j))
        }) {
            return false;
        }
        let (pi, pj) = (d.pos(vi), d.pos(vj));
        if !in_wedge(d, self.walk, i, &Direction::between(pi, pj))
            || !in_wedge(d, self.walk, j, &Direction::between(pj, pi))
        {
            return false;
        }
        let s = crate::geom::Segment { a: pi.clone(), b: pj.clone() };
        let ok = |a: &VertexId, b: &VertexId| {
            let t = crate::geom::Segment { a: d.pos(a).clone(), b: d.pos(b).clone() };
            matches!(segments_cross(&s, &t), CrossKind::Disjoint | CrossKind::SharedEndpoint)
        };
        (0..k).all(|c| ok(&self.walk[c], &self.walk[(c + 1) % k]))
            && accepted.iter().all(|&(x, y)| ok(&self.walk[x], &self.walk[y]))
    }

    fn run(&self, drawings: &[&Drawing], candidates: &[(usize, usize)], accepted: &mut Vec<(usize, usize)>) {
        for &(i, j) in candidates {
            if accepted.len() + 3 >= self.walk.len() {
                break;
            }
            if accepted.contains(&(i, j)) {
                continue;
            }
            if drawings.iter().all(|d| self.valid(d, accepted, i, j)) {
                accepted.push((i, j));
            }
        }
    }
}

/// Triangles of the walk polygon cut by non-crossing chords, each in walk order.
fn split_by_chords(k: usize, chords: &[(usize, usize)]) -> Vec<[usize; 3]> {
    let mut polys: Vec<Vec<usize>> = vec![(0..k).collect()];
    for &(i, j) in chords {
        let idx = polys
            .iter()
            .position(|p| p.contains(&i) && p.contains(&j))
            .expect("non-crossing chords");
        let p = polys.swap_remove(idx);
        let a = p.iter().position(|&x| x == i).unwrap();
        let b = p.iter().position(|&x| x == j).unwrap();
        let (a, b) = (a.min(b), a.max(b));
        polys.push(p[a..=b].to_vec());
        let mut rest = p[b..].to_vec();
        rest.extend_from_slice(&p[..=a]);
        polys.push(rest);
    }
    polys
        .into_iter()
        .map(|p| {
            assert_eq!(p.len(), 3, "chords do not triangulate the walk");
            [p[0], p[1], p[2]]
        })
        .collect()
}

fn c_point(i: usize) -> Point {
    let x = i as i64;
    Point::from_ints(x, x * x)
}

/// Intersection of two counterclockwise convex polygons.
fn clip(subject: &[Point], clipper: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = subject.to_vec();
    let m = clipper.len();
    for e in 0..m {
        if out.is_empty() {
            break;
        }
        let (c0, c1) = (&clipper[e], &clipper[(e + 1) % m]);
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = &input[i];
            let prev = &input[(i + n - 1) % n];
            let cin = orient(c0, c1, cur) != Orientation::Clockwise;
            let pin = orient(c0, c1, prev) != Orientation::Clockwise;
            if cin {
                if !pin {
                    out.extend(line_intersection(prev, cur, c0, c1));
                }
                out.push(cur.clone());
            } else if pin {
                out.extend(line_intersection(prev, cur, c0, c1));
            }
        }
    }
    // drop repeated and collinear points
    out.dedup();
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    loop {
        let n = out.len();
        if n < 3 {
            return Vec::new();
        }
        let bad = (0..n).find(|&i| orient(&out[(i + n - 1) % n], &out[i], &out[(i + 1) % n]) == Orientation::Collinear);
        match bad {
            Some(i) => {
                out.remove(i);
            }
            None => return out,
        }
    }
}

fn on_closed_segment(a: &Point, b: &Point, p: &Point) -> bool {
    p == a || p == b || crate::geom::point_on_open_segment(a, b, p)
}

/// Ear clipping of a counterclockwise polygon whose vertices may include
/// points in the interior of its sides.
pub(crate) fn ear_clip<T: Copy>(poly: &[(T, Point)]) -> Result<Vec<[T; 3]>> {
    let mut rest: Vec<(T, Point)> = poly.to_vec();
    let mut out = Vec::new();
    while rest.len() > 3 {
        let n = rest.len();
        let ear = (0..n).find(|&i| {
            let (a, b, c) = (&rest[(i + n - 1) % n].1, &rest[i].1, &rest[(i + 1) % n].1);
            if orient(a, b, c) != Orientation::CounterClockwise {
                return false;
            }
            rest.iter().enumerate().all(|(j, (_, p))| {
                j == i
                    || j == (i + n - 1) % n
                    || j == (i + 1) % n
                    || orient(a, b, p) == Orientation::Clockwise
                    || orient(b, c, p) == Orientation::Clockwise
                    || orient(c, a, p) == Orientation::Clockwise
            })
        });
        let Some(i) = ear else {
            return Err(Error::InternalInvariant("polygon without an ear".into()));
        };
        out.push([rest[(i + n - 1) % n].0, rest[i].0, rest[(i + 1) % n].0]);
        rest.remove(i);
    }
    if orient(&rest[0].1, &rest[1].1, &rest[2].1) != Orientation::CounterClockwise {
        return Err(Error::InternalInvariant("degenerate final ear".into()));
    }
    out.push([rest[0].0, rest[1].0, rest[2].0]);
    Ok(out)
}

/// Triangulate the bounded face `walk` (counterclockwise, as corners) of two
/// equivalent planar drawings compatibly. `has_edge` reports existing edges.
pub(crate) fn triangulate_face(
    walk: &[VertexId],
    a: &Drawing,
    b: &Drawing,
    has_edge: &dyn Fn(&VertexId, &VertexId) -> bool,
) -> Result<FaceTriangulation> {
    let k = walk.len();
    if k < 3 {
        return Err(Error::InternalInvariant(format!("face walk of length {k}")));
    }
    let mut candidates = Vec::new();
    for i in 0..k {
        for j in (i + 2)..k {
            if i == 0 && j == k - 1 {
                continue;
            }
            let la = a.pos(&walk[i]).approx().dist(&a.pos(&walk[j]).approx());
            let lb = b.pos(&walk[i]).approx().dist(&b.pos(&walk[j]).approx());
            candidates.push((la + lb, i, j));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let candidates: Vec<(usize, usize)> = candidates.into_iter().map(|(_, i, j)| (i, j)).collect();

    let greedy = Greedy { walk, has_edge };
    let mut common = Vec::new();
    greedy.run(&[a, b], &candidates, &mut common);
    if common.len() + 3 == k {
        let triangles = split_by_chords(k, &common).into_iter().map(|t| t.map(Slot::Corner)).collect();
        return Ok(FaceTriangulation { steiner: Vec::new(), triangles });
    }
    let mut da = common.clone();
    greedy.run(&[a], &candidates, &mut da);
    let mut db = common.clone();
    greedy.run(&[b], &candidates, &mut db);
    if da.len() + 3 != k || db.len() + 3 != k {
        return Err(Error::InternalInvariant(format!(
            "face of length {k} could not be triangulated ({} and {} diagonals)",
            da.len(),
            db.len()
        )));
    }
    overlay(walk, a, b, &da, &db)
}

fn overlay(
    walk: &[VertexId],
    a: &Drawing,
    b: &Drawing,
    da: &[(usize, usize)],
    db: &[(usize, usize)],
) -> Result<FaceTriangulation> {
    let k = walk.len();
    let cp: Vec<Point> = (0..k).map(c_point).collect();
    let ta = split_by_chords(k, da);
    let tb = split_by_chords(k, db);

    let key = |i: usize, j: usize| (i.min(j), i.max(j));
    let sa: BTreeSet<(usize, usize)> = da.iter().map(|&(i, j)| key(i, j)).collect();
    let sb: BTreeSet<(usize, usize)> = db.iter().map(|&(i, j)| key(i, j)).collect();

    let mut slot_of: BTreeMap<Point, Slot> = cp.iter().enumerate().map(|(i, p)| (p.clone(), Slot::Corner(i))).collect();
    let mut steiner_c: Vec<Point> = Vec::new();
    let mut on_seg: BTreeMap<(usize, usize), Vec<Point>> = BTreeMap::new();
    for &x in sa.difference(&sb) {
        for &y in sb.difference(&sa) {
            let s = crate::geom::Segment { a: cp[x.0].clone(), b: cp[x.1].clone() };
            let t = crate::geom::Segment { a: cp[y.0].clone(), b: cp[y.1].clone() };
            if let CrossKind::ProperCross(p) = segments_cross(&s, &t) {
                slot_of.insert(p.clone(), Slot::Steiner(steiner_c.len()));
                steiner_c.push(p.clone());
                on_seg.entry(x).or_default().push(p.clone());
                on_seg.entry(y).or_default().push(p);
            }
        }
    }

    let mut triangles = Vec::new();
    for t1 in &ta {
        let p1: Vec<Point> = t1.iter().map(|&i| cp[i].clone()).collect();
        for t2 in &tb {
            let p2: Vec<Point> = t2.iter().map(|&i| cp[i].clone()).collect();
            let cell = clip(&p1, &p2);
            if cell.is_empty() {
                continue;
            }
            let sides: Vec<(usize, usize)> = (0..3)
                .flat_map(|s| [key(t1[s], t1[(s + 1) % 3]), key(t2[s], t2[(s + 1) % 3])])
                .collect();
            let n = cell.len();
            let mut poly: Vec<(Slot, Point)> = Vec::new();
            for i in 0..n {
                let (p, q) = (&cell[i], &cell[(i + 1) % n]);
                let Some(&slot) = slot_of.get(p) else {
                    return Err(Error::InternalInvariant("overlay vertex is not a known point".into()));
                };
                poly.push((slot, p.clone()));
                let seg = sides.iter().find(|&&(x, y)| on_closed_segment(&cp[x], &cp[y], p) && on_closed_segment(&cp[x], &cp[y], q));
                if let Some(extra) = seg.and_then(|s| on_seg.get(s)) {
                    let mut between: Vec<&Point> =
                        extra.iter().filter(|r| *r != p && *r != q && on_closed_segment(p, q, r)).collect();
                    between.sort_by(|r, s| p.dist2(r).cmp(&p.dist2(s)));
                    poly.extend(between.into_iter().map(|r| (slot_of[r], r.clone())));
                }
            }
            triangles.extend(ear_clip(&poly)?);
        }
    }

    let lift = |d: &Drawing, tris: &[[usize; 3]], p: &Point| -> Result<Point> {
        for t in tris {
            let (x, y, z) = (&cp[t[0]], &cp[t[1]], &cp[t[2]]);
            if orient(x, y, p) != Orientation::Clockwise
                && orient(y, z, p) != Orientation::Clockwise
                && orient(z, x, p) != Orientation::Clockwise
            {
                let w = barycentric(p, x, y, z);
                let targets: Vec<&Point> = t.iter().map(|&i| d.pos(&walk[i])).collect();
                return Ok(combine(&w, &targets));
            }
        }
        Err(Error::InternalInvariant("overlay point outside the face".into()))
    };
    let mut steiner = Vec::with_capacity(steiner_c.len());
    for p in &steiner_c {
        steiner.push((lift(a, &ta, p)?, lift(b, &tb, p)?));
    }
    Ok(FaceTriangulation { steiner, triangles })
}

/// Edges of the face triangulation that join two distinct slots.
pub(crate) fn triangle_sides(t: &[Slot; 3]) -> [(Slot, Slot); 3] {
    [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
}
