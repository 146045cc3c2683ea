//! Frame-by-frame verification of a morph against its endpoint drawings.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::drawing::{crossing_pairs, frame_diagonal, validate_drawing, Drawing, Frame};
use crate::error::Result;
use crate::geom::{is_strictly_convex, segments_cross, ApproxPoint, CrossKind, Point};
use crate::graph::{Edge, Graph};
use crate::kite::{detect_kites, Kite};
use crate::planar::{compare_complexes, planarize, CellComplex};

use super::piece::line_intersection_f64;
use super::{sample_times, Morph, StageKind};

/// Relative tolerance (to the source's bounding-box diagonal).
pub const EPS_REL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameCheck {
    pub t: f64,
    pub valid: bool,
    pub equivalent: bool,
    pub at_most_one_crossing: bool,
    pub kites_convex: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl FrameCheck {
    pub fn ok(&self) -> bool {
        self.valid && self.equivalent && self.at_most_one_crossing && self.kites_convex
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RigidityCheck {
    /// Recursion depth of the rigid-follow stage (0 = outermost).
    pub depth: usize,
    pub base: Edge,
    pub riders: usize,
    /// Largest change of a pairwise rider distance, relative to the
    /// source's bounding-box diagonal.
    pub max_variation: f64,
    /// Riders strictly inside their piece triangle at every sample.
    pub inside_piece: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub ok: bool,
    pub source_error: f64,
    pub target_error: f64,
    pub endpoints_ok: bool,
    pub frames: Vec<FrameCheck>,
    pub rigidity: Vec<RigidityCheck>,
}

impl VerificationReport {
    pub fn failed_frames(&self) -> impl Iterator<Item = &FrameCheck> + '_ {
        self.frames.iter().filter(|f| !f.ok())
    }
}

struct Reference {
    graph: Graph,
    complex: CellComplex,
    kites: Vec<Kite>,
}

fn check_frame(r: &Reference, t: f64, f: &Frame) -> FrameCheck {
    let mut out = FrameCheck { t, valid: false, equivalent: false, at_most_one_crossing: false, kites_convex: false, detail: None };
    let d = match Drawing::from_frame(&r.graph, f) {
        Ok(d) => d,
        Err(e) => {
            out.detail = Some(e.to_string());
            return out;
        }
    };
    let v = validate_drawing(&d);
    out.valid = v.is_empty();
    if let Some(x) = v.first() {
        out.detail = Some(x.to_string());
    }
    let mut counts: BTreeMap<Edge, usize> = BTreeMap::new();
    for (e, g, _) in crossing_pairs(&d) {
        *counts.entry(e).or_default() += 1;
        *counts.entry(g).or_default() += 1;
    }
    out.at_most_one_crossing = counts.values().all(|&c| c <= 1);
    out.kites_convex = r.kites.iter().all(|k| {
        let quad: Vec<Point> = k.corners.iter().map(|c| d.pos(c).clone()).collect();
        let [e, g] = &k.crossing_edges;
        is_strictly_convex(&quad) && matches!(segments_cross(&d.segment(e), &d.segment(g)), CrossKind::ProperCross(_))
    });
    if out.valid {
        let rep = compare_complexes(&r.complex, &planarize(&d));
        out.equivalent = rep.equivalent;
        if let Some(m) = rep.first_mismatch {
            out.detail.get_or_insert(m.to_string());
        }
    }
    out
}

fn endpoint_error(f: &Frame, d: &Drawing, diag: f64) -> f64 {
    d.positions()
        .iter()
        .map(|(v, p)| f.get(v).map_or(f64::INFINITY, |q| q.dist(&p.approx())))
        .fold(0.0, f64::max)
        / diag
}

/// Check sampled frames `(t, frame)` of a morph from `a` to `b`: endpoint
/// fidelity of the first and last frame, then validity, equivalence to
/// `a`, at most one crossing per edge and kite convexity at every frame.
pub fn verify_frames(a: &Drawing, b: &Drawing, frames: &[(f64, Frame)]) -> Result<VerificationReport> {
    let r = Reference { graph: a.graph().clone(), complex: planarize(a), kites: detect_kites(a)? };
    let diag = a.bbox_diagonal().max(f64::MIN_POSITIVE);
    let source_error = frames.first().map_or(f64::INFINITY, |(_, f)| endpoint_error(f, a, diag));
    let target_error = frames.last().map_or(f64::INFINITY, |(_, f)| endpoint_error(f, b, diag));
    let checks: Vec<FrameCheck> = frames.iter().map(|(t, f)| check_frame(&r, *t, f)).collect();
    let endpoints_ok = source_error <= EPS_REL && target_error <= EPS_REL;
    let ok = endpoints_ok && frames.len() >= 2 && checks.iter().all(FrameCheck::ok);
    Ok(VerificationReport { ok, source_error, target_error, endpoints_ok, frames: checks, rigidity: Vec::new() })
}

fn strictly_inside_f64(p: ApproxPoint, a: ApproxPoint, b: ApproxPoint, c: ApproxPoint) -> bool {
    let o = |p: ApproxPoint, q: ApproxPoint, r: ApproxPoint| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    o(a, b, p) > 0.0 && o(b, c, p) > 0.0 && o(c, a, p) > 0.0
}

fn rigidity(m: &Morph, n: usize, diag: f64, depth: usize, out: &mut Vec<RigidityCheck>) -> Result<()> {
    for s in &m.stages {
        let StageKind::RigidFollow { underlying, riders } = &s.kind else { continue };
        let frames: Vec<Frame> = sample_times(n).into_iter().map(|t| s.evaluate(t)).collect::<Result<_>>()?;
        for r in riders {
            let ids: Vec<_> = r.local.keys().collect();
            let dist = |f: &Frame, i: usize, j: usize| f[ids[i]].dist(&f[ids[j]]);
            let mut max_variation: f64 = 0.0;
            let mut inside_piece = true;
            for f in &frames {
                for i in 0..ids.len() {
                    for j in (i + 1)..ids.len() {
                        max_variation = max_variation.max((dist(f, i, j) - dist(&frames[0], i, j)).abs() / diag);
                    }
                }
                let [e, g] = &r.kite_crossing;
                let (u, v) = (f[&r.base.0], f[&r.base.1]);
                inside_piece &= match line_intersection_f64(f[e.u()], f[e.v()], f[g.u()], f[g.v()]) {
                    Some(x) => ids.iter().all(|id| strictly_inside_f64(f[*id], u, v, x)),
                    None => false,
                };
            }
            out.push(RigidityCheck {
                depth,
                base: Edge::of(&r.base.0, &r.base.1),
                riders: ids.len(),
                max_variation,
                inside_piece,
                ok: max_variation < EPS_REL && inside_piece,
            });
        }
        rigidity(underlying, n, diag, depth + 1, out)?;
    }
    Ok(())
}

/// Verify `m` at `n` uniform samples, plus the rigidity of every rider
/// group over `n` samples of its rigid-follow stage.
pub fn verify_morph(a: &Drawing, b: &Drawing, m: &Morph, n: usize) -> Result<VerificationReport> {
    let frames: Vec<(f64, Frame)> =
        sample_times(n.max(2)).into_iter().map(|t| m.evaluate(t).map(|f| (t, f))).collect::<Result<_>>()?;
    let mut rep = verify_frames(a, b, &frames)?;
    let diag = frame_diagonal(a.positions().values().map(|p| p.approx())).max(f64::MIN_POSITIVE);
    rigidity(m, n.max(2), diag, 0, &mut rep.rigidity)?;
    rep.ok &= rep.rigidity.iter().all(|r| r.ok);
    Ok(rep)
}
