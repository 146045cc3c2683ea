//! Morphs between strictly convex drawings of a triconnected plane graph
//! that stay strictly convex: interpolated convex-combination weights with a
//! fixed convex boundary, framed by affine stages when the boundary moves.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::drawing::{validate_drawing, Drawing, Frame};
use crate::error::{Error, Result};
use crate::geom::{is_strictly_convex, ApproxPoint, Direction, Point};
use crate::graph::{Graph, VertexId};
use crate::planar::{planarize, topologically_equivalent};

/// Normalized cross-product margin used when certifying convexity.
pub const CONVEXITY_MARGIN: f64 = 1e-12;

/// Positive coefficients, summing to one, expressing each interior vertex
/// as a combination of its neighbours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSystem {
    pub rows: BTreeMap<VertexId, Vec<(VertexId, f64)>>,
}

impl WeightSystem {
    /// `(1 - t) * self + t * other`; both systems must cover the same graph.
    pub fn lerp(&self, other: &WeightSystem, t: f64) -> WeightSystem {
        let rows = self
            .rows
            .iter()
            .map(|(v, r0)| {
                let r1: BTreeMap<&VertexId, f64> = other.rows[v].iter().map(|(u, w)| (u, *w)).collect();
                let row = r0.iter().map(|(u, w)| (u.clone(), (1.0 - t) * w + t * r1[u])).collect();
                (v.clone(), row)
            })
            .collect();
        WeightSystem { rows }
    }

    /// Every weight positive and every row summing to one within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.rows.values().all(|r| r.iter().all(|(_, w)| *w > 0.0) && (r.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() <= tol)
    }
}

/// Neighbours of `v` in counterclockwise order (exact angular sort).
pub fn ccw_neighbours(d: &Drawing, v: &VertexId) -> Vec<VertexId> {
    let p = d.pos(v);
    let mut ns: Vec<VertexId> = d.graph().neighbors(v).cloned().collect();
    ns.sort_by(|a, b| Direction::between(p, d.pos(a)).angle_cmp(&Direction::between(p, d.pos(b))));
    ns
}

/// Mean value coordinates of every non-boundary vertex over its one-ring.
/// Fails when some angle between consecutive neighbours is not in `(0, pi)`.
pub fn fit_weights(d: &Drawing, boundary: &BTreeSet<VertexId>) -> Result<WeightSystem> {
    let mut rows = BTreeMap::new();
    for v in d.graph().vertices().filter(|v| !boundary.contains(*v)) {
        let ns = ccw_neighbours(d, v);
        let k = ns.len();
        if k < 3 {
            return Err(Error::InputNotConvex(format!("interior vertex {v} has degree {k}")));
        }
        let p = d.pos(v).approx();
        let vecs: Vec<(f64, f64)> = ns
            .iter()
            .map(|u| {
                let q = d.pos(u).approx();
                (q.x - p.x, q.y - p.y)
            })
            .collect();
        let lens: Vec<f64> = vecs.iter().map(|(x, y)| x.hypot(*y)).collect();
        let mut half_tan = Vec::with_capacity(k);
        for i in 0..k {
            let (a, b) = (vecs[i], vecs[(i + 1) % k]);
            let angle = (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1);
            if !(angle > 0.0 && angle < PI) {
                return Err(Error::InputNotConvex(format!("one-ring of {v} does not contain it in its kernel")));
            }
            half_tan.push((angle / 2.0).tan());
        }
        let raw: Vec<f64> = (0..k).map(|i| (half_tan[(i + k - 1) % k] + half_tan[i]) / lens[i]).collect();
        let total: f64 = raw.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InputNotConvex(format!("degenerate one-ring at {v}")));
        }
        rows.insert(v.clone(), ns.into_iter().zip(raw.into_iter().map(|w| w / total)).collect());
    }
    Ok(WeightSystem { rows })
}

/// Place every interior vertex at the weighted average of its neighbours,
/// with the boundary vertices pinned at `boundary`.
pub fn solve_positions(w: &WeightSystem, boundary: &Frame) -> Result<Frame> {
    let interior: Vec<&VertexId> = w.rows.keys().collect();
    let index: BTreeMap<&VertexId, usize> = interior.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = interior.len();
    let mut out: Frame = boundary.clone();
    if n == 0 {
        return Ok(out);
    }
    let mut trip = Vec::new();
    let mut rhs = Mat::<f64>::zeros(n, 2);
    for (i, v) in interior.iter().enumerate() {
        trip.push(Triplet::new(i, i, 1.0));
        for (u, wu) in &w.rows[*v] {
            if let Some(&j) = index.get(u) {
                trip.push(Triplet::new(i, j, -wu));
            } else {
                let p = boundary.get(u).ok_or_else(|| Error::MissingPosition(u.clone()))?;
                rhs[(i, 0)] += wu * p.x;
                rhs[(i, 1)] += wu * p.y;
            }
        }
    }
    let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip).map_err(|_| Error::SingularSystem)?;
    let lu = m.sp_lu().map_err(|_| Error::SingularSystem)?;
    let x = lu.solve(&rhs);
    for (i, v) in interior.iter().enumerate() {
        let p = ApproxPoint::new(x[(i, 0)], x[(i, 1)]);
        if !p.is_finite() {
            return Err(Error::SingularSystem);
        }
        out.insert((*v).clone(), p);
    }
    Ok(out)
}

/// Certify that every listed face is positively oriented and strictly
/// convex: each turn has normalized cross product above `margin`.
pub fn certify_convex_faces(faces: &[Vec<VertexId>], frame: &Frame, margin: f64) -> std::result::Result<(), String> {
    for f in faces {
        let k = f.len();
        for i in 0..k {
            let (a, b, c) = (&frame[&f[i]], &frame[&f[(i + 1) % k]], &frame[&f[(i + 2) % k]]);
            let (ux, uy) = (b.x - a.x, b.y - a.y);
            let (vx, vy) = (c.x - b.x, c.y - b.y);
            let norm = ux.hypot(uy) * vx.hypot(vy);
            let cr = (ux * vy - uy * vx) / norm;
            if !(cr > margin) {
                return Err(format!("face {:?} turns by {cr:e} at {}", f, f[(i + 1) % k]));
            }
        }
        // a strictly convex counterclockwise polygon turns exactly once
        let total: f64 = (0..k)
            .map(|i| {
                let (a, b, c) = (&frame[&f[i]], &frame[&f[(i + 1) % k]], &frame[&f[(i + 2) % k]]);
                let (ux, uy) = (b.x - a.x, b.y - a.y);
                let (vx, vy) = (c.x - b.x, c.y - b.y);
                (ux * vy - uy * vx).atan2(ux * vx + uy * vy)
            })
            .sum();
        if (total - 2.0 * PI).abs() > 1e-6 {
            return Err(format!("face {:?} winds {total} radians", f));
        }
    }
    Ok(())
}

/// `x -> a x + c` in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub m: [[f64; 2]; 2],
    pub c: [f64; 2],
}

impl Affine {
    pub const IDENTITY: Affine = Affine { m: [[1.0, 0.0], [0.0, 1.0]], c: [0.0, 0.0] };

    pub fn apply(&self, p: &ApproxPoint) -> ApproxPoint {
        ApproxPoint::new(
            self.m[0][0] * p.x + self.m[0][1] * p.y + self.c[0],
            self.m[1][0] * p.x + self.m[1][1] * p.y + self.c[1],
        )
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// The affine map taking triangle `src` to triangle `dst`.
    pub fn between(src: &[ApproxPoint; 3], dst: &[ApproxPoint; 3]) -> Option<Affine> {
        let (s0, s1, s2) = (&src[0], &src[1], &src[2]);
        let (d0, d1, d2) = (&dst[0], &dst[1], &dst[2]);
        let (a, b, c, d) = (s1.x - s0.x, s2.x - s0.x, s1.y - s0.y, s2.y - s0.y);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let (e, f, g, h) = (d1.x - d0.x, d2.x - d0.x, d1.y - d0.y, d2.y - d0.y);
        let m = [
            [e * inv[0][0] + f * inv[1][0], e * inv[0][1] + f * inv[1][1]],
            [g * inv[0][0] + h * inv[1][0], g * inv[0][1] + h * inv[1][1]],
        ];
        let c = [d0.x - m[0][0] * s0.x - m[0][1] * s0.y, d0.y - m[1][0] * s0.x - m[1][1] * s0.y];
        Some(Affine { m, c })
    }
}

/// Path of affine maps from the identity to `target` that keeps a positive
/// determinant: rotation angle and symmetric stretch interpolated
/// separately, with the anchor point moving on a straight line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AffinePath {
    pub anchor: ApproxPoint,
    pub angle: f64,
    pub stretch: [[f64; 2]; 2],
    pub shift: [f64; 2],
}

impl AffinePath {
    pub fn new(target: &Affine, anchor: ApproxPoint) -> Result<AffinePath> {
        if !(target.det() > 0.0) {
            return Err(Error::InternalInvariant("affine map reverses orientation".into()));
        }
        let m = target.m;
        let angle = (m[1][0] - m[0][1]).atan2(m[0][0] + m[1][1]);
        let (co, si) = (angle.cos(), angle.sin());
        // stretch = R(-angle) * m, symmetrized against rounding
        let s00 = co * m[0][0] + si * m[1][0];
        let s01 = co * m[0][1] + si * m[1][1];
        let s10 = -si * m[0][0] + co * m[1][0];
        let s11 = -si * m[0][1] + co * m[1][1];
        let off = (s01 + s10) / 2.0;
        let image = target.apply(&anchor);
        Ok(AffinePath {
            anchor,
            angle,
            stretch: [[s00, off], [off, s11]],
            shift: [image.x - anchor.x, image.y - anchor.y],
        })
    }

    pub fn at(&self, t: f64) -> Affine {
        let (co, si) = ((t * self.angle).cos(), (t * self.angle).sin());
        let s = [
            [(1.0 - t) + t * self.stretch[0][0], t * self.stretch[0][1]],
            [t * self.stretch[1][0], (1.0 - t) + t * self.stretch[1][1]],
        ];
        let m = [
            [co * s[0][0] - si * s[1][0], co * s[0][1] - si * s[1][1]],
            [si * s[0][0] + co * s[1][0], si * s[0][1] + co * s[1][1]],
        ];
        let a = &self.anchor;
        let c = [
            a.x + t * self.shift[0] - m[0][0] * a.x - m[0][1] * a.y,
            a.y + t * self.shift[1] - m[1][0] * a.x - m[1][1] * a.y,
        ];
        Affine { m, c }
    }
}

/// One stage of a convex morph, evaluated on `t` in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ConvexMorphStage {
    /// Every vertex of `base` carried by the affine path.
    AffineInterp { base: Frame, path: AffinePath },
    /// Boundary pinned at `boundary`; interior solved with interpolated weights.
    WeightInterp { w0: WeightSystem, w1: WeightSystem, boundary: Frame },
}

impl ConvexMorphStage {
    pub fn evaluate(&self, t: f64) -> Result<Frame> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange(t));
        }
        match self {
            ConvexMorphStage::AffineInterp { base, path } => {
                let m = path.at(t);
                Ok(base.iter().map(|(v, p)| (v.clone(), m.apply(p))).collect())
            }
            ConvexMorphStage::WeightInterp { w0, w1, boundary } => solve_positions(&w0.lerp(w1, t), boundary),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexMorphStage::AffineInterp { .. } => "affineInterp",
            ConvexMorphStage::WeightInterp { .. } => "weightInterp",
        }
    }
}

/// Two equivalent strictly convex drawings of a triconnected plane graph.
#[derive(Clone, Debug)]
pub struct ConvexInstance {
    pub graph: Graph,
    /// Outer boundary, counterclockwise.
    pub boundary: Vec<VertexId>,
    /// Bounded faces, counterclockwise.
    pub faces: Vec<Vec<VertexId>>,
    pub a: Drawing,
    pub b: Drawing,
}

impl ConvexInstance {
    pub fn new(a: Drawing, b: Drawing) -> Result<ConvexInstance> {
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
        if cc.crossing_nodes().next().is_some() || cc.components.len() != 1 {
            return Err(Error::InputNotConvex("graph must be planar and connected".into()));
        }
        let comp = &cc.components[0];
        let mut boundary = comp.outer.vertices();
        boundary.reverse();
        let faces: Vec<Vec<VertexId>> = comp.inner.iter().map(|w| w.vertices()).collect();
        for d in [&a, &b] {
            for f in faces.iter().chain(std::iter::once(&boundary)) {
                let poly: Vec<Point> = f.iter().map(|v| d.pos(v).clone()).collect();
                if !is_strictly_convex(&poly) {
                    return Err(Error::InputNotConvex(format!("face {f:?} is not strictly convex")));
                }
            }
        }
        Ok(ConvexInstance { graph: a.graph().clone(), boundary, faces, a, b })
    }

    pub fn boundary_fixed(&self) -> bool {
        self.boundary.iter().all(|v| self.a.pos(v) == self.b.pos(v))
    }

    /// Certify a frame: bounded faces and the outer boundary positively
    /// oriented and strictly convex.
    pub fn certify(&self, frame: &Frame) -> std::result::Result<(), String> {
        certify_convex_faces(&self.faces, frame, CONVEXITY_MARGIN)?;
        certify_convex_faces(std::slice::from_ref(&self.boundary), frame, CONVEXITY_MARGIN)
    }
}

fn triangle_of(boundary: &[VertexId], frame: &Frame) -> [ApproxPoint; 3] {
    [frame[&boundary[0]], frame[&boundary[1]], frame[&boundary[2]]]
}

/// Equilateral triangle with the mean centroid and mean size of two triangles.
fn canonical_triangle(p: &[ApproxPoint; 3], q: &[ApproxPoint; 3]) -> [ApproxPoint; 3] {
    let area = |t: &[ApproxPoint; 3]| ((t[1].x - t[0].x) * (t[2].y - t[0].y) - (t[2].x - t[0].x) * (t[1].y - t[0].y)).abs() / 2.0;
    let cx = (p.iter().map(|a| a.x).sum::<f64>() + q.iter().map(|a| a.x).sum::<f64>()) / 6.0;
    let cy = (p.iter().map(|a| a.y).sum::<f64>() + q.iter().map(|a| a.y).sum::<f64>()) / 6.0;
    // circumradius of the equilateral triangle with the geometric-mean area
    let r = ((area(p) * area(q)).sqrt() * 4.0 / (3.0 * 3f64.sqrt())).sqrt();
    let corner = |k: f64| {
        let ang = PI / 2.0 + k * 2.0 * PI / 3.0;
        ApproxPoint::new(cx + r * ang.cos(), cy + r * ang.sin())
    };
    [corner(0.0), corner(1.0), corner(2.0)]
}

/// Stages morphing `inst.a` to `inst.b`. With a fixed boundary there is one
/// weight-interpolation stage; otherwise the outer triangle is first
/// carried affinely to a canonical triangle, the interior is morphed there,
/// and the boundary is carried affinely to its final place.
pub fn build_convex_morph(inst: &ConvexInstance, fixed_boundary: bool) -> Result<Vec<ConvexMorphStage>> {
    let bset: BTreeSet<VertexId> = inst.boundary.iter().cloned().collect();
    if fixed_boundary && !inst.boundary_fixed() {
        return Err(Error::InternalInvariant("boundary differs between the drawings".into()));
    }
    let w0 = fit_weights(&inst.a, &bset)?;
    let w1 = fit_weights(&inst.b, &bset)?;
    let fa = inst.a.to_frame();
    let fb = inst.b.to_frame();
    if fixed_boundary || inst.boundary_fixed() {
        let boundary: Frame = inst.boundary.iter().map(|v| (v.clone(), fa[v])).collect();
        return Ok(vec![ConvexMorphStage::WeightInterp { w0, w1, boundary }]);
    }
    if inst.boundary.len() != 3 {
        return Err(Error::InputNotConvex("a moving boundary must be a triangle".into()));
    }
    let ta = triangle_of(&inst.boundary, &fa);
    let tb = triangle_of(&inst.boundary, &fb);
    let canon = canonical_triangle(&ta, &tb);
    let to_canon = Affine::between(&ta, &canon).ok_or(Error::SingularSystem)?;
    let from_canon = Affine::between(&canon, &tb).ok_or(Error::SingularSystem)?;
    let anchor = |t: &[ApproxPoint; 3]| ApproxPoint::new((t[0].x + t[1].x + t[2].x) / 3.0, (t[0].y + t[1].y + t[2].y) / 3.0);

    let first = ConvexMorphStage::AffineInterp { base: fa.clone(), path: AffinePath::new(&to_canon, anchor(&ta))? };
    let boundary: Frame = inst.boundary.iter().cloned().zip(canon).collect();
    let middle = ConvexMorphStage::WeightInterp { w0, w1: w1.clone(), boundary: boundary.clone() };
    // start of the last stage: the second drawing's weights on the canonical boundary
    let base = solve_positions(&w1, &boundary)?;
    let last = ConvexMorphStage::AffineInterp { base, path: AffinePath::new(&from_canon, anchor(&canon))? };
    Ok(vec![first, middle, last])
}

/// Evaluate consecutive stages sharing `[0, 1]` equally.
pub fn evaluate_stages(stages: &[ConvexMorphStage], t: f64) -> Result<Frame> {
    if !(0.0..=1.0).contains(&t) || stages.is_empty() {
        return Err(Error::TimeOutOfRange(t));
    }
    let k = stages.len() as f64;
    let i = ((t * k).floor() as usize).min(stages.len() - 1);
    let local = (t * k - i as f64).clamp(0.0, 1.0);
    stages[i].evaluate(local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::drawing_from_ints;

    fn wheel(center: (i64, i64)) -> Drawing {
        drawing_from_ints(
            &[("a", 0, 0), ("b", 12, 0), ("c", 12, 12), ("d", 0, 12), ("h", center.0, center.1)],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("h", "a"), ("h", "b"), ("h", "c"), ("h", "d")],
        )
        .unwrap()
    }

    #[test]
    fn symmetric_weights() {
        let d = wheel((6, 6));
        let bset: BTreeSet<VertexId> = ["a", "b", "c", "d"].map(VertexId::from).into_iter().collect();
        let w = fit_weights(&d, &bset).unwrap();
        for (_, x) in &w.rows[&VertexId::from("h")] {
            assert!((x - 0.25).abs() < 1e-12);
        }
        let tri = drawing_from_ints(
            &[("a", 0, 0), ("b", 6, 0), ("c", 3, 6), ("h", 3, 2)],
            &[("a", "b"), ("b", "c"), ("c", "a"), ("h", "a"), ("h", "b"), ("h", "c")],
        )
        .unwrap();
        let w = fit_weights(&tri, &["a", "b", "c"].map(VertexId::from).into_iter().collect()).unwrap();
        let row = &w.rows[&VertexId::from("h")];
        let p: (f64, f64) = row.iter().fold((0.0, 0.0), |acc, (u, x)| {
            let q = tri.pos(u).approx();
            (acc.0 + x * q.x, acc.1 + x * q.y)
        });
        assert!((p.0 - 3.0).abs() < 1e-12 && (p.1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn solve_back_reproduces_drawing() {
        let d = wheel((4, 7));
        let bset: BTreeSet<VertexId> = ["a", "b", "c", "d"].map(VertexId::from).into_iter().collect();
        let w = fit_weights(&d, &bset).unwrap();
        let f = d.to_frame();
        let boundary: Frame = bset.iter().map(|v| (v.clone(), f[v])).collect();
        let s = solve_positions(&w, &boundary).unwrap();
        let h = VertexId::from("h");
        assert!(s[&h].dist(&f[&h]) < 1e-12);
        // doubling the boundary doubles the solution
        let doubled: Frame = boundary.iter().map(|(v, p)| (v.clone(), ApproxPoint::new(2.0 * p.x, 2.0 * p.y))).collect();
        let s2 = solve_positions(&w, &doubled).unwrap();
        assert!((s2[&h].x - 8.0).abs() < 1e-12 && (s2[&h].y - 14.0).abs() < 1e-12);
    }

    #[test]
    fn affine_path_endpoints() {
        let src = [ApproxPoint::new(0.0, 0.0), ApproxPoint::new(1.0, 0.0), ApproxPoint::new(0.0, 1.0)];
        let dst = [ApproxPoint::new(5.0, 5.0), ApproxPoint::new(5.0, 7.0), ApproxPoint::new(3.0, 5.0)];
        let m = Affine::between(&src, &dst).unwrap();
        let path = AffinePath::new(&m, ApproxPoint::new(0.3, 0.3)).unwrap();
        for (s, d) in src.iter().zip(&dst) {
            assert!(path.at(1.0).apply(s).dist(d) < 1e-12);
            assert!(path.at(0.0).apply(s).dist(s) < 1e-15);
        }
        for k in 0..=20 {
            assert!(path.at(k as f64 / 20.0).det() > 0.0);
        }
    }

    #[test]
    fn fixed_boundary_morph_is_one_stage_and_convex() {
        let inst = ConvexInstance::new(wheel((3, 3)), wheel((9, 8))).unwrap();
        let stages = build_convex_morph(&inst, true).unwrap();
        assert_eq!(stages.len(), 1);
        for k in 0..=20 {
            let f = stages[0].evaluate(k as f64 / 20.0).unwrap();
            inst.certify(&f).unwrap();
        }
        let end = stages[0].evaluate(1.0).unwrap();
        assert!(end[&VertexId::from("h")].dist(&ApproxPoint::new(9.0, 8.0)) < 1e-9);
    }

    #[test]
    fn moving_triangle_boundary_uses_three_stages() {
        let e = [("a", "b"), ("b", "c"), ("c", "a"), ("h", "a"), ("h", "b"), ("h", "c")];
        let a = drawing_from_ints(&[("a", 0, 0), ("b", 6, 0), ("c", 0, 6), ("h", 1, 1)], &e).unwrap();
        let b = drawing_from_ints(&[("a", 10, 10), ("b", 10, 20), ("c", 0, 12), ("h", 8, 14)], &e).unwrap();
        let inst = ConvexInstance::new(a.clone(), b.clone()).unwrap();
        let stages = build_convex_morph(&inst, false).unwrap();
        assert_eq!(stages.len(), 3);
        let f0 = evaluate_stages(&stages, 0.0).unwrap();
        let f1 = evaluate_stages(&stages, 1.0).unwrap();
        for v in a.graph().vertices() {
            assert!(f0[v].dist(&a.pos(v).approx()) < 1e-9);
            assert!(f1[v].dist(&b.pos(v).approx()) < 1e-9);
        }
        for k in 0..=60 {
            inst.certify(&evaluate_stages(&stages, k as f64 / 60.0).unwrap()).unwrap();
        }
    }
}
