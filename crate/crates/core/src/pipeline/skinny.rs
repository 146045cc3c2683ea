//! Skinny drawings of H′ inside the half-disk of a base edge, and the
//! fixed-triangle convex morphs into and out of them.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::convex::{build_convex_morph, certify_convex_faces, fit_weights, solve_positions, ConvexInstance, CONVEXITY_MARGIN};
use crate::drawing::{Drawing, Frame};
use crate::error::{Error, Result};
use crate::geom::{orient, ApproxPoint, Orientation, Point, Rational};
use crate::graph::VertexId;
use crate::planar::topologically_equivalent;

use super::piece::{toward_base, ChainOfCycles, HPrime, HalfDiskParams};
use super::ConvexPart;

/// Orthonormal frame at the midpoint `w` of a base edge: `e1` along
/// `(u, v)`, `e2` perpendicular toward the apex (to the left of `u -> v`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseFrame {
    pub w: ApproxPoint,
    pub e1: [f64; 2],
    pub e2: [f64; 2],
}

impl BaseFrame {
    pub fn new(u: ApproxPoint, v: ApproxPoint) -> BaseFrame {
        let (dx, dy) = (v.x - u.x, v.y - u.y);
        let len = dx.hypot(dy);
        let e1 = [dx / len, dy / len];
        BaseFrame { w: ApproxPoint::new((u.x + v.x) / 2.0, (u.y + v.y) / 2.0), e1, e2: [-e1[1], e1[0]] }
    }

    pub fn place(&self, local: [f64; 2]) -> ApproxPoint {
        ApproxPoint::new(
            self.w.x + local[0] * self.e1[0] + local[1] * self.e2[0],
            self.w.y + local[0] * self.e1[1] + local[1] * self.e2[1],
        )
    }

    pub fn local(&self, p: ApproxPoint) -> [f64; 2] {
        let (x, y) = (p.x - self.w.x, p.y - self.w.y);
        [x * self.e1[0] + y * self.e1[1], x * self.e2[0] + y * self.e2[1]]
    }
}

/// Skinny drawing of H′: coordinates of every vertex but `u` and `v` in the
/// base frame (first along the base edge, second along the radius).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkinnyDrawing {
    pub local: BTreeMap<VertexId, [f64; 2]>,
    /// Tangent angle of the block arcs at their endpoints.
    pub arc_angle: f64,
}

/// Results of the requirement checks on a skinny drawing.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SkinnyChecks {
    /// chain vertices strictly inside the open half-disk.
    pub inside_disk: bool,
    /// every cycle block strictly convex.
    pub cycles_convex: bool,
    /// spine vertices on the radius.
    pub spine_on_radius: bool,
    /// every cycle side makes an angle below phi with the radius.
    pub steep_sides: bool,
    /// Largest such angle.
    pub max_side_angle: f64,
}

impl SkinnyChecks {
    pub fn all(&self) -> bool {
        self.inside_disk && self.cycles_convex && self.spine_on_radius && self.steep_sides
    }
}

/// Point `j` of `k` evenly spaced interior points on the circular arc from
/// `(0, s0)` to `(0, s1)` bulging to side `sigma` with tangent angle `alpha`.
fn arc_point(s0: f64, s1: f64, sigma: f64, alpha: f64, j: usize, k: usize) -> [f64; 2] {
    let len = s1 - s0;
    let radius = len / (2.0 * alpha.sin());
    let center = [-sigma * radius * alpha.cos(), (s0 + s1) / 2.0];
    let theta = -alpha + 2.0 * alpha * (j + 1) as f64 / (k + 1) as f64;
    [center[0] + sigma * radius * theta.cos(), center[1] + radius * theta.sin()]
}

/// Spine vertices on the radius, block sides on circular arcs inside thin
/// isosceles triangles, and the cycle interiors filled by a convex
/// combination solve with weights fitted to the first drawing of H′.
pub fn build_skinny_drawing(chain: &ChainOfCycles, hp: &HPrime, params: &HalfDiskParams) -> Result<SkinnyDrawing> {
    let spine = chain.spine();
    let m = spine.len();
    let mut local: BTreeMap<VertexId, [f64; 2]> = BTreeMap::new();
    for (i, x) in spine.iter().enumerate() {
        local.insert(x.clone(), [0.0, params.radius * (i + 1) as f64 / (m + 1) as f64]);
    }
    let alpha = (params.phi / 2.0).min(PI / 8.0);
    for b in &chain.blocks {
        let (s0, s1) = (local[&b.from][1], local[&b.to][1]);
        for (side, sigma) in [(&b.u_side, -1.0), (&b.v_side, 1.0)] {
            for (j, x) in side.iter().enumerate() {
                local.insert(x.clone(), arc_point(s0, s1, sigma, alpha, j, side.len()));
            }
        }
    }

    // cycle interiors: boundary is the chain plus the base edge
    let half = hp.a.pos(&hp.u).approx().dist(&hp.a.pos(&hp.v).approx()) / 2.0;
    let mut boundary: BTreeSet<VertexId> = local.keys().cloned().collect();
    boundary.insert(hp.u.clone());
    boundary.insert(hp.v.clone());
    let w = fit_weights(&hp.a, &boundary)?;
    let mut fixed: Frame = local.iter().map(|(x, p)| (x.clone(), ApproxPoint::new(p[0], p[1]))).collect();
    fixed.insert(hp.u.clone(), ApproxPoint::new(-half, 0.0));
    fixed.insert(hp.v.clone(), ApproxPoint::new(half, 0.0));
    let solved = solve_positions(&w, &fixed)?;
    for (x, p) in solved {
        if x != hp.u && x != hp.v {
            local.insert(x, [p.x, p.y]);
        }
    }
    Ok(SkinnyDrawing { local, arc_angle: alpha })
}

/// Skinny requirements in local coordinates.
pub fn check_skinny(chain: &ChainOfCycles, s: &SkinnyDrawing, params: &HalfDiskParams) -> SkinnyChecks {
    let r2 = params.radius * params.radius;
    let inside_disk = s.local.values().all(|p| p[1] > 0.0 && p[0] * p[0] + p[1] * p[1] < r2);
    let spine_on_radius = chain.spine().iter().all(|x| {
        let p = s.local[x];
        p[0] == 0.0 && p[1] > 0.0 && p[1] < params.radius
    });
    let mut cycles_convex = true;
    let mut max_side_angle: f64 = 0.0;
    for b in &chain.blocks {
        let cyc = b.cycle();
        let pts: Vec<[f64; 2]> = cyc.iter().map(|x| s.local[x]).collect();
        let k = pts.len();
        for i in 0..k {
            let (p, q) = (pts[i], pts[(i + 1) % k]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            max_side_angle = max_side_angle.max(dx.abs().atan2(dy.abs()));
        }
        if !b.is_edge() {
            let frame: Frame = cyc.iter().map(|x| (x.clone(), ApproxPoint::new(s.local[x][0], s.local[x][1]))).collect();
            cycles_convex &= certify_convex_faces(&[cyc], &frame, CONVEXITY_MARGIN).is_ok();
        }
    }
    SkinnyChecks { inside_disk, cycles_convex, spine_on_radius, steep_sides: max_side_angle < params.phi, max_side_angle }
}

/// Exact drawing of H′ with `u` and `v` at their positions in `target` and
/// every other vertex carried by the base frame of `(u, v)`.
pub fn place_skinny(hp: &HPrime, s: &SkinnyDrawing, u: &Point, v: &Point) -> Result<Drawing> {
    let bf = BaseFrame::new(u.approx(), v.approx());
    let mut pos = BTreeMap::new();
    pos.insert(hp.u.clone(), u.clone());
    pos.insert(hp.v.clone(), v.clone());
    for (x, p) in &s.local {
        pos.insert(x.clone(), bf.place(*p).to_exact()?);
    }
    Drawing::new(hp.graph().clone(), pos)
}

/// Certify a placed skinny drawing: equivalent to `reference` and every
/// face, including the outer triangle, strictly convex.
pub fn certify_placed(hp: &HPrime, placed: &Drawing, reference: &Drawing) -> Result<()> {
    let rep = topologically_equivalent(placed, reference)?;
    if !rep.equivalent {
        return Err(Error::ConvexityCertification(format!("skinny drawing of H′ is not equivalent: {rep}")));
    }
    let mut faces: Vec<Vec<VertexId>> = hp.faces.iter().map(|w| w.vertices()).collect();
    faces.push(vec![hp.u.clone(), hp.v.clone(), hp.d.clone()]);
    certify_convex_faces(&faces, &placed.to_frame(), CONVEXITY_MARGIN).map_err(Error::ConvexityCertification)
}

fn strictly_inside(p: &Point, a: &Point, b: &Point, c: &Point) -> bool {
    orient(a, b, p) == Orientation::CounterClockwise
        && orient(b, c, p) == Orientation::CounterClockwise
        && orient(c, a, p) == Orientation::CounterClockwise
}

/// Position of the extra apex `d*`: on the segment from the crossing point
/// toward the base midpoint, closer to the crossing point than `d`, so that
/// the triangle `(u, v, d*)` strictly contains every vertex of both drawings.
pub fn place_d_star(hp: &HPrime, apex: &Point, drawings: &[&Drawing]) -> Result<Point> {
    let (u, v) = (drawings[0].pos(&hp.u), drawings[0].pos(&hp.v));
    let half = Rational::new(1.into(), 2.into());
    let mut t = &hp.d_offset * &half;
    for _ in 0..200 {
        let p = toward_base(u, v, apex, &t);
        let ok = drawings.iter().all(|d| {
            d.positions().iter().all(|(x, q)| *x == hp.u || *x == hp.v || strictly_inside(q, u, v, &p))
        });
        if ok {
            return Ok(p);
        }
        t *= &half;
    }
    Err(Error::InternalInvariant("no placement of d* contains both drawings".into()))
}

/// Convex morph between two drawings of H′ with `u`, `v` and the added apex
/// `d*` pinned; `d*` is hidden from emitted frames.
pub fn fixed_triangle_part(hp: &HPrime, from: &Drawing, to: &Drawing, d_star: &VertexId, at: &Point) -> Result<ConvexPart> {
    let mut ends = [from.clone(), to.clone()];
    for d in &mut ends {
        d.add_vertex(d_star.clone(), at.clone())?;
        for x in [&hp.u, &hp.v, &hp.d] {
            d.add_edge(d_star, x)?;
        }
    }
    let [a, b] = ends;
    let inst = ConvexInstance::new(a, b)?;
    let stages = build_convex_morph(&inst, true)?;
    Ok(ConvexPart { stages, hidden: BTreeSet::from([d_star.clone()]) })
}
