//! Morphs of kite-planar 1-planar drawings: the base case as one convex
//! morph of an almost triangulated supergraph, the recursive case by
//! carrying the top-level vertices of every piece of a kite as rigid riders.

mod piece;
mod skinny;
mod verify;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::compat::{
    check_triconnected, compatible_triangulate_with, CompatibleResult, Enclose, IdGen, MarkedPlanarPair,
};
use crate::convex::{build_convex_morph, evaluate_stages, ConvexInstance, ConvexMorphStage};
use crate::drawing::{Drawing, Frame};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, VertexId};
use crate::kite::{assign_levels, complete_partial_kites, detect_kites, uncrossed_skeleton, LevelAssignment};
use crate::planar::Walk;

pub use piece::{
    build_h_prime, compute_half_disk, extract_chain_of_cycles, extract_pieces, fit_radius_f64, half_disk_certified,
    Adjacency, ChainBlock, ChainOfCycles, HPrime, HalfDiskParams, MorphSampler, PieceOfKite,
};
pub use skinny::{
    build_skinny_drawing, certify_placed, check_skinny, fixed_triangle_part, place_d_star, place_skinny, BaseFrame,
    SkinnyChecks, SkinnyDrawing,
};
pub use verify::{verify_frames, verify_morph, FrameCheck, RigidityCheck, VerificationReport, EPS_REL};

/// Share of the timeline given to each skinnify phase of a recursive step.
pub const SKINNIFY_SHARE: f64 = 0.1;
/// Samples of the underlying morph used to fit each half-disk.
pub const HALF_DISK_SAMPLES: usize = 64;

/// Convex morph of a vertex-disjoint part of the drawing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvexPart {
    pub stages: Vec<ConvexMorphStage>,
    /// Auxiliary vertices left out of emitted frames.
    pub hidden: BTreeSet<VertexId>,
}

/// Vertices carried rigidly by a moving base edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Rider {
    pub base: (VertexId, VertexId),
    /// Crossing edges of the kite the riders sit in.
    pub kite_crossing: [Edge; 2],
    /// Coordinates along the base edge and along the perpendicular toward
    /// the kite's crossing point, from the midpoint of the base edge.
    pub local: BTreeMap<VertexId, [f64; 2]>,
    pub half_disk: HalfDiskParams,
}

impl Rider {
    pub fn place(&self, f: &Frame, out: &mut Frame) {
        let bf = BaseFrame::new(f[&self.base.0], f[&self.base.1]);
        for (x, p) in &self.local {
            out.insert(x.clone(), bf.place(*p));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StageKind {
    /// Straight-line motion of every vertex.
    Linear { from: Frame, to: Frame },
    /// Static positions, overwritten by independent convex morphs.
    Convex { still: Frame, parts: Vec<ConvexPart> },
    /// A morph of a subgraph with riders attached to its base edges.
    RigidFollow { underlying: Box<Morph>, riders: Vec<Rider> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Stage {
    /// Positive share of the timeline.
    pub duration: f64,
    pub kind: StageKind,
}

impl Stage {
    /// Every position the stage produces at local time `t`.
    pub fn evaluate(&self, t: f64) -> Result<Frame> {
        match &self.kind {
            StageKind::Linear { from, to } => Ok(from.iter().map(|(v, p)| (v.clone(), p.lerp(&to[v], t))).collect()),
            StageKind::Convex { still, parts } => {
                let mut out = still.clone();
                for part in parts {
                    for (v, p) in evaluate_stages(&part.stages, t)? {
                        if !part.hidden.contains(&v) {
                            out.insert(v, p);
                        }
                    }
                }
                Ok(out)
            }
            StageKind::RigidFollow { underlying, riders } => {
                let mut out = underlying.evaluate_full(t)?;
                let base = out.clone();
                for r in riders {
                    r.place(&base, &mut out);
                }
                Ok(out)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            StageKind::Linear { .. } => "linear",
            StageKind::Convex { .. } => "convex",
            StageKind::RigidFollow { .. } => "rigidFollow",
        }
    }
}

/// A morph of a drawing of `vertices`/`edges`, as consecutive stages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Morph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<Edge>,
    pub source: Frame,
    pub target: Frame,
    pub stages: Vec<Stage>,
}

impl Morph {
    pub fn graph(&self) -> Result<Graph> {
        let mut g = Graph::new();
        for v in &self.vertices {
            g.add_vertex(v.clone())?;
        }
        for e in &self.edges {
            g.add_edge(e.u(), e.v())?;
        }
        Ok(g)
    }

    /// Stage index and stage-local time of global time `t`.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        if !(0.0..=1.0).contains(&t) || self.stages.is_empty() {
            return Err(Error::TimeOutOfRange(t));
        }
        let total: f64 = self.stages.iter().map(|s| s.duration).sum();
        let mut start = 0.0;
        for (i, s) in self.stages.iter().enumerate() {
            let end = start + s.duration / total;
            if t <= end || i + 1 == self.stages.len() {
                return Ok((i, ((t - start) / (end - start)).clamp(0.0, 1.0)));
            }
            start = end;
        }
        unreachable!("the last stage ends at 1")
    }

    /// Time interval of stage `i`.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        let total: f64 = self.stages.iter().map(|s| s.duration).sum();
        let start: f64 = self.stages[..i].iter().map(|s| s.duration).sum::<f64>() / total;
        (start, start + self.stages[i].duration / total)
    }

    /// Positions of every vertex produced at `t`, auxiliary ones included.
    pub fn evaluate_full(&self, t: f64) -> Result<Frame> {
        let (i, local) = self.locate(t)?;
        self.stages[i].evaluate(local)
    }

    /// Positions of the morph's vertices at `t`.
    pub fn evaluate(&self, t: f64) -> Result<Frame> {
        let mut f = self.evaluate_full(t)?;
        f.retain(|v, _| self.vertices.contains(v));
        if f.len() != self.vertices.len() {
            let v = self.vertices.iter().find(|v| !f.contains_key(*v)).expect("missing vertex");
            return Err(Error::MissingPosition(v.clone()));
        }
        Ok(f)
    }

    /// `n` frames at `i / (n - 1)`; `n = 1` gives the source only.
    pub fn sample(&self, n: usize) -> Result<Vec<Frame>> {
        sample_times(n).into_iter().map(|t| self.evaluate(t)).collect()
    }
}

pub fn sample_times(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Audit data for one piece of a kite.
#[derive(Clone, Debug)]
pub struct PieceTrace {
    pub level: usize,
    pub piece: PieceOfKite,
    pub half_disk: HalfDiskParams,
    pub h_prime: HPrime,
    pub chain: ChainOfCycles,
    pub skinny: SkinnyDrawing,
    pub checks: SkinnyChecks,
}

/// Every intermediate result of a pipeline run, for auditing.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    /// Compatible triangulations with their inputs, in construction order.
    pub triangulations: Vec<(MarkedPlanarPair, CompatibleResult)>,
    pub pieces: Vec<PieceTrace>,
    /// Kite edges added to complete partial kites.
    pub added_kite_edges: Vec<Edge>,
}

fn frame_of(d: &Drawing) -> Frame {
    d.to_frame()
}

fn constant_morph(a: &Drawing) -> Morph {
    let f = frame_of(a);
    Morph {
        vertices: a.graph().vertices().cloned().collect(),
        edges: a.graph().edges().cloned().collect(),
        source: f.clone(),
        target: f.clone(),
        stages: vec![Stage { duration: 1.0, kind: StageKind::Linear { from: f.clone(), to: f } }],
    }
}

/// Morph between two topologically equivalent kite-planar 1-planar
/// drawings. Missing kite edges are added first; frames cover the input
/// vertices only.
pub fn morph(a: &Drawing, b: &Drawing) -> Result<Morph> {
    morph_traced(a, b).map(|(m, _)| m)
}

pub fn morph_traced(a: &Drawing, b: &Drawing) -> Result<(Morph, Trace)> {
    let (a2, b2, added) = complete_partial_kites(a, b)?;
    let mut trace = Trace { added_kite_edges: added, ..Trace::default() };
    let mut m = if a2.positions() == b2.positions() {
        constant_morph(&a2)
    } else {
        let levels = assign_levels(&a2)?;
        let lb = assign_levels(&b2)?;
        if lb != levels {
            return Err(Error::InternalInvariant("vertex levels differ between the drawings".into()));
        }
        let ids: Vec<&VertexId> = a2.graph().vertices().collect();
        let prefix = IdGen::avoiding("~", ids).fresh();
        morph_levels(&a2, &b2, &levels, prefix.as_str(), &mut trace)?
    };
    m.edges = a.graph().edges().cloned().collect();
    Ok((m, trace))
}

fn morph_levels(a: &Drawing, b: &Drawing, levels: &LevelAssignment, prefix: &str, trace: &mut Trace) -> Result<Morph> {
    if levels.max_level == 0 {
        base_case_traced(a, b, trace)
    } else {
        recursive_traced(a, b, levels, prefix, trace)
    }
}

/// Morph of a pair without nested kites: drop the crossing edges, triangulate
/// compatibly inside a common enclosing triangle leaving the kite quads
/// alone, and interpolate convex-combination weights.
pub fn base_case_morph(a: &Drawing, b: &Drawing) -> Result<Morph> {
    base_case_traced(a, b, &mut Trace::default())
}

fn base_case_traced(a: &Drawing, b: &Drawing, trace: &mut Trace) -> Result<Morph> {
    let kites = detect_kites(a)?;
    if let Some(k) = kites.iter().find(|k| !k.is_empty()) {
        return Err(Error::InternalInvariant(format!("base case with a non-empty kite {:?}", k.corners)));
    }
    let marked: BTreeSet<Walk> = kites.iter().map(|k| Walk::of_vertices(&k.corners)).collect();
    let pair = MarkedPlanarPair::new(uncrossed_skeleton(a, &kites)?, uncrossed_skeleton(b, &kites)?, marked)?;
    let r = compatible_triangulate_with(&pair, Enclose::Always)?;
    if !check_triconnected(r.a.graph()) {
        return Err(Error::InternalInvariant("almost triangulated graph is not triconnected".into()));
    }
    let inst = ConvexInstance::new(r.a.clone(), r.b.clone())?;
    let stages = build_convex_morph(&inst, true)?;
    trace.triangulations.push((pair, r));
    Ok(Morph {
        vertices: a.graph().vertices().cloned().collect(),
        edges: a.graph().edges().cloned().collect(),
        source: frame_of(a),
        target: frame_of(b),
        stages: vec![Stage {
            duration: 1.0,
            kind: StageKind::Convex { still: Frame::new(), parts: vec![ConvexPart { stages, hidden: BTreeSet::new() }] },
        }],
    })
}

/// One recursive step: morph the graph without the top-level vertices, then
/// skinnify every piece at the source, carry it rigidly along, and
/// unskinnify it at the target.
pub fn recursive_morph(a: &Drawing, b: &Drawing, levels: &LevelAssignment) -> Result<Morph> {
    let ids: Vec<&VertexId> = a.graph().vertices().collect();
    let prefix = IdGen::avoiding("~", ids).fresh();
    recursive_traced(a, b, levels, prefix.as_str(), &mut Trace::default())
}

fn recursive_traced(a: &Drawing, b: &Drawing, levels: &LevelAssignment, prefix: &str, trace: &mut Trace) -> Result<Morph> {
    let top_level = levels.max_level;
    let top = levels.vertices_at(top_level);
    let rest: BTreeSet<VertexId> = a.graph().vertices().filter(|v| !top.contains(*v)).cloned().collect();
    let (qa, qb) = (a.subdrawing(&rest)?, b.subdrawing(&rest)?);
    let q_levels = assign_levels(&qa)?;
    if q_levels.max_level + 1 != top_level {
        return Err(Error::InternalInvariant("removing the top level did not lower the maximum level".into()));
    }
    let q_morph = morph_levels(&qa, &qb, &q_levels, prefix, trace)?;

    let pieces = extract_pieces(a, levels)?;
    let mut sampler = MorphSampler::new(&q_morph);
    let mut parts_a = Vec::new();
    let mut parts_b = Vec::new();
    let mut riders = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        let tag = format!("{prefix}{top_level}.{i}.");
        let half_disk = compute_half_disk(piece, &mut sampler, HALF_DISK_SAMPLES)?;
        let hp = build_h_prime(piece, a, b, &tag)?;
        let chain = extract_chain_of_cycles(&hp)?;
        let skinny = build_skinny_drawing(&chain, &hp, &half_disk)?;
        let checks = check_skinny(&chain, &skinny, &half_disk);
        if !checks.all() {
            return Err(Error::ConvexityCertification(format!("skinny drawing fails its requirements: {checks:?}")));
        }
        let d_star = VertexId::new(format!("{tag}d*"));

        let (ua, va) = (a.pos(&hp.u), a.pos(&hp.v));
        let skinny_a = place_skinny(&hp, &skinny, ua, va)?;
        certify_placed(&hp, &skinny_a, &hp.a)?;
        let at_a = place_d_star(&hp, &piece.apex(a)?, &[&hp.a, &skinny_a])?;
        parts_a.push(fixed_triangle_part(&hp, &hp.a, &skinny_a, &d_star, &at_a)?);

        let (ub, vb) = (b.pos(&hp.u), b.pos(&hp.v));
        let skinny_b = place_skinny(&hp, &skinny, ub, vb)?;
        certify_placed(&hp, &skinny_b, &hp.b)?;
        let at_b = place_d_star(&hp, &piece.apex(b)?, &[&hp.b, &skinny_b])?;
        parts_b.push(fixed_triangle_part(&hp, &skinny_b, &hp.b, &d_star, &at_b)?);

        riders.push(Rider {
            base: (hp.u.clone(), hp.v.clone()),
            kite_crossing: piece.kite.crossing_edges.clone(),
            local: skinny.local.clone(),
            half_disk: half_disk.clone(),
        });
        trace.triangulations.push((hp.input.clone(), hp.triangulation.clone()));
        trace.pieces.push(PieceTrace { level: top_level, piece: piece.clone(), half_disk, h_prime: hp, chain, skinny, checks });
    }

    let (fa, fb) = (frame_of(a), frame_of(b));
    let stages = vec![
        Stage { duration: SKINNIFY_SHARE, kind: StageKind::Convex { still: fa.clone(), parts: parts_a } },
        Stage { duration: 1.0 - 2.0 * SKINNIFY_SHARE, kind: StageKind::RigidFollow { underlying: Box::new(q_morph), riders } },
        Stage { duration: SKINNIFY_SHARE, kind: StageKind::Convex { still: fb.clone(), parts: parts_b } },
    ];
    Ok(Morph {
        vertices: a.graph().vertices().cloned().collect(),
        edges: a.graph().edges().cloned().collect(),
        source: fa,
        target: fb,
        stages,
    })
}
