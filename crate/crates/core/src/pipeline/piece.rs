//! Pieces of kites, their half-disks, the augmented graph H′ of a piece and
//! its chain of cycles.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::compat::{
    check_triconnected, compatible_triangulate_with, CompatibleResult, Enclose, MarkedPlanarPair,
};
use crate::drawing::{Drawing, Frame};
use crate::error::{Error, Result};
use crate::geom::{line_intersection, orient, ApproxPoint, Orientation, Point, Rational};
use crate::graph::{Edge, Graph, VertexId};
use crate::kite::{detect_kites, uncrossed_skeleton, Kite, LevelAssignment};
use crate::planar::{planarize, Walk};

use super::Morph;

/// One of the four triangles cut out of a kite by its crossing edges,
/// together with the top-level vertices inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PieceOfKite {
    pub kite: Kite,
    /// Base edge; the apex lies to its left.
    pub u: VertexId,
    pub v: VertexId,
    pub h: BTreeSet<VertexId>,
    pub binding_edges: Vec<Edge>,
}

impl PieceOfKite {
    /// Crossing point of the kite's crossing edges in `d`.
    pub fn apex(&self, d: &Drawing) -> Result<Point> {
        let [e, f] = &self.kite.crossing_edges;
        line_intersection(d.pos(e.u()), d.pos(e.v()), d.pos(f.u()), d.pos(f.v()))
            .ok_or_else(|| Error::InternalInvariant("kite crossing edges are parallel".into()))
    }

    pub fn apex_approx(&self, f: &Frame) -> Option<ApproxPoint> {
        let [e, g] = &self.kite.crossing_edges;
        line_intersection_f64(f[e.u()], f[e.v()], f[g.u()], f[g.v()])
    }
}

pub(crate) fn line_intersection_f64(a: ApproxPoint, b: ApproxPoint, c: ApproxPoint, d: ApproxPoint) -> Option<ApproxPoint> {
    let (rx, ry) = (b.x - a.x, b.y - a.y);
    let (sx, sy) = (d.x - c.x, d.y - c.y);
    let den = rx * sy - ry * sx;
    if den == 0.0 {
        return None;
    }
    let t = ((c.x - a.x) * sy - (c.y - a.y) * sx) / den;
    Some(ApproxPoint::new(a.x + t * rx, a.y + t * ry))
}

fn strictly_inside(p: &Point, a: &Point, b: &Point, c: &Point) -> bool {
    orient(a, b, p) == Orientation::CounterClockwise
        && orient(b, c, p) == Orientation::CounterClockwise
        && orient(c, a, p) == Orientation::CounterClockwise
}

/// Pieces of the kites whose corners have level `max - 1` and that contain
/// vertices of the top level. Empty pieces are omitted.
pub fn extract_pieces(g: &Drawing, levels: &LevelAssignment) -> Result<Vec<PieceOfKite>> {
    let top_level = levels.max_level;
    if top_level == 0 {
        return Ok(Vec::new());
    }
    let top = levels.vertices_at(top_level);
    let kites = detect_kites(g)?;
    let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut pieces = Vec::new();
    for k in &kites {
        if k.corners.iter().any(|c| levels.level[c] + 1 != top_level) {
            continue;
        }
        let inside: BTreeSet<&VertexId> = k.contained_vertices.iter().filter(|v| top.contains(*v)).collect();
        if inside.is_empty() {
            continue;
        }
        for i in 0..4 {
            let (u, v) = (&k.corners[i], &k.corners[(i + 1) % 4]);
            let h: BTreeSet<VertexId> = inside
                .iter()
                .filter(|x| strictly_inside(g.pos(x), g.pos(u), g.pos(v), &k.crossing_point))
                .map(|x| (*x).clone())
                .collect();
            if h.is_empty() {
                continue;
            }
            let mut binding_edges = Vec::new();
            for x in &h {
                if let Some(o) = owner.insert(x.clone(), pieces.len()) {
                    return Err(Error::InternalInvariant(format!("vertex {x} lies in two pieces ({o})")));
                }
                for y in g.graph().neighbors(x) {
                    if y == u || y == v {
                        binding_edges.push(Edge::of(x, y));
                    } else if !h.contains(y) {
                        return Err(Error::InternalInvariant(format!("edge ({x}, {y}) leaves its piece")));
                    }
                }
            }
            pieces.push(PieceOfKite { kite: k.clone(), u: u.clone(), v: v.clone(), h, binding_edges });
        }
    }
    if let Some(x) = top.iter().find(|x| !owner.contains_key(*x)) {
        return Err(Error::InternalInvariant(format!("top-level vertex {x} lies in no piece")));
    }
    Ok(pieces)
}

/// Radius of the largest half-disk centred at the midpoint of `(u, v)` on
/// the apex side inside the triangle `(u, v, apex)`.
pub fn fit_radius_f64(u: ApproxPoint, v: ApproxPoint, apex: ApproxPoint) -> f64 {
    let w = ApproxPoint::new((u.x + v.x) / 2.0, (u.y + v.y) / 2.0);
    dist_point_segment(w, u, apex).min(dist_point_segment(w, v, apex))
}

fn dist_point_segment(p: ApproxPoint, a: ApproxPoint, b: ApproxPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(&ApproxPoint::new(a.x + t * dx, a.y + t * dy))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HalfDiskParams {
    /// Smallest base-edge length over the samples, times the safety factor.
    pub lambda: f64,
    pub radius: f64,
    /// `atan(lambda / (2 radius))`.
    pub phi: f64,
    /// Sample time at which the base edge is shortest.
    pub t_star: f64,
    pub samples: usize,
}

/// Frames of a morph on uniform grids, computed once per grid size.
pub struct MorphSampler<'a> {
    morph: &'a Morph,
    cache: BTreeMap<usize, Vec<Frame>>,
}

impl<'a> MorphSampler<'a> {
    pub fn new(morph: &'a Morph) -> Self {
        MorphSampler { morph, cache: BTreeMap::new() }
    }

    /// `n >= 2` frames at `i / (n - 1)`, with every produced vertex.
    pub fn frames(&mut self, n: usize) -> Result<&[Frame]> {
        if !self.cache.contains_key(&n) {
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                out.push(self.morph.evaluate_full(i as f64 / (n - 1) as f64)?);
            }
            self.cache.insert(n, out);
        }
        Ok(&self.cache[&n])
    }
}

fn half_disk_attempt(piece: &PieceOfKite, frames: &[Frame], base_safety: f64, radius_safety: f64) -> Result<HalfDiskParams> {
    let n = frames.len();
    let (mut min_len, mut t_star, mut min_fit) = (f64::INFINITY, 0.0, f64::INFINITY);
    for (i, f) in frames.iter().enumerate() {
        let (u, v) = (f[&piece.u], f[&piece.v]);
        let apex = piece
            .apex_approx(f)
            .ok_or_else(|| Error::InternalInvariant("kite collapsed during the morph".into()))?;
        let len = u.dist(&v);
        if len < min_len {
            min_len = len;
            t_star = i as f64 / (n - 1) as f64;
        }
        min_fit = min_fit.min(fit_radius_f64(u, v, apex));
    }
    if !(min_len > 0.0 && min_fit > 0.0) {
        return Err(Error::Geom(crate::error::GeomError::DegenerateTriangle));
    }
    let lambda = base_safety * min_len;
    let radius = radius_safety * min_fit;
    Ok(HalfDiskParams { lambda, radius, phi: (lambda / (2.0 * radius)).atan(), t_star, samples: n })
}

/// The half-disk fits at every frame and the base edge is never shorter
/// than `lambda`.
pub fn half_disk_certified(piece: &PieceOfKite, p: &HalfDiskParams, frames: &[Frame]) -> bool {
    frames.iter().all(|f| {
        let (u, v) = (f[&piece.u], f[&piece.v]);
        match piece.apex_approx(f) {
            Some(apex) => u.dist(&v) >= p.lambda && fit_radius_f64(u, v, apex) > p.radius,
            None => false,
        }
    })
}

/// Half-disk parameters from `n` samples of the underlying morph, certified
/// on a grid four times finer; on failure resampled once with `2n` samples
/// and smaller safety factors.
pub fn compute_half_disk(piece: &PieceOfKite, sampler: &mut MorphSampler, n: usize) -> Result<HalfDiskParams> {
    for (k, (sb, sr)) in [(0.95, 0.9), (0.9, 0.8)].into_iter().enumerate() {
        let m = n << k;
        let p = half_disk_attempt(piece, sampler.frames(m)?, sb, sr)?;
        if half_disk_certified(piece, &p, sampler.frames(4 * (m - 1) + 1)?) {
            return Ok(p);
        }
    }
    Err(Error::InternalInvariant(format!("no certified half-disk for base edge ({}, {})", piece.u, piece.v)))
}

/// The augmented graph H′ of a piece with its two drawings.
#[derive(Clone, Debug)]
pub struct HPrime {
    pub u: VertexId,
    pub v: VertexId,
    /// Dummy apex of the outer triangle `(u, v, d)`.
    pub d: VertexId,
    /// Fraction of the way from the kite's crossing point to the midpoint of
    /// `(u, v)` at which `d` sits.
    pub d_offset: Rational,
    pub a: Drawing,
    pub b: Drawing,
    /// Bounded faces, counterclockwise.
    pub faces: Vec<Walk>,
    pub marked: BTreeSet<Walk>,
    /// Every vertex that is not in the input graph.
    pub added: BTreeSet<VertexId>,
    /// Input pair and raw triangulation, kept for auditing.
    pub input: MarkedPlanarPair,
    pub triangulation: CompatibleResult,
}

impl HPrime {
    pub fn graph(&self) -> &Graph {
        self.a.graph()
    }
}

/// `apex + (w - apex) * t` for the midpoint `w` of `(u, v)`.
pub(crate) fn toward_base(u: &Point, v: &Point, apex: &Point, t: &Rational) -> Point {
    apex.lerp(&u.midpoint(v), t)
}

fn relabel(d: &Drawing, f: &dyn Fn(&VertexId) -> VertexId) -> Result<Drawing> {
    let mut g = Graph::new();
    let mut pos = BTreeMap::new();
    for (v, p) in d.positions() {
        g.add_vertex(f(v))?;
        pos.insert(f(v), p.clone());
    }
    for e in d.graph().edges() {
        g.add_edge(&f(e.u()), &f(e.v()))?;
    }
    Drawing::new(g, pos)
}

fn relabel_walk(w: &Walk, f: &dyn Fn(&VertexId) -> VertexId) -> Walk {
    Walk::of_vertices(&w.vertices().iter().map(f).collect::<Vec<_>>())
}

/// Add a dummy apex `d` near the kite's crossing point, mark the empty kites
/// of the piece and triangulate compatibly. New vertices are named
/// `{tag}{name}`; `tag` must be a prefix no input id starts with.
pub fn build_h_prime(piece: &PieceOfKite, a: &Drawing, b: &Drawing, tag: &str) -> Result<HPrime> {
    let (u, v) = (&piece.u, &piece.v);
    let mut keep = piece.h.clone();
    keep.insert(u.clone());
    keep.insert(v.clone());
    let (mut sa, mut sb) = (a.subdrawing(&keep)?, b.subdrawing(&keep)?);
    let (xa, xb) = (piece.apex(a)?, piece.apex(b)?);

    let d = VertexId::new(format!("{tag}d"));
    let half = Rational::new(1.into(), 2.into());
    let mut t = half.clone();
    let contains_all = |s: &Drawing, apex: &Point, t: &Rational| {
        let dp = toward_base(s.pos(u), s.pos(v), apex, t);
        piece.h.iter().all(|x| strictly_inside(s.pos(x), s.pos(u), s.pos(v), &dp))
    };
    let mut tries = 0;
    while !(contains_all(&sa, &xa, &t) && contains_all(&sb, &xb, &t)) {
        t *= &half;
        tries += 1;
        if tries > 200 {
            return Err(Error::InternalInvariant("no dummy apex placement contains the piece".into()));
        }
    }
    for (s, x) in [(&mut sa, &xa), (&mut sb, &xb)] {
        let p = toward_base(s.pos(u), s.pos(v), x, &t);
        s.add_vertex(d.clone(), p)?;
        s.add_edge(&d, u)?;
        s.add_edge(&d, v)?;
    }

    let kites = detect_kites(&sa)?;
    if let Some(k) = kites.iter().find(|k| !k.is_empty()) {
        return Err(Error::InternalInvariant(format!("kite {:?} inside a top-level piece is not empty", k.corners)));
    }
    let marked: BTreeSet<Walk> = kites.iter().map(|k| Walk::of_vertices(&k.corners)).collect();
    let pair = MarkedPlanarPair::new(uncrossed_skeleton(&sa, &kites)?, uncrossed_skeleton(&sb, &kites)?, marked)?;
    let r = compatible_triangulate_with(&pair, Enclose::Auto)?;
    if r.enclosing.is_some() || !r.outer.contains(u) || !r.outer.contains(v) || !r.outer.contains(&d) {
        return Err(Error::InternalInvariant("outer face of H′ is not (u, v, d)".into()));
    }
    if !check_triconnected(r.a.graph()) {
        return Err(Error::InternalInvariant("almost triangulated H′ is not triconnected".into()));
    }

    let fresh: BTreeSet<VertexId> = r.steiner.clone();
    let rename = |x: &VertexId| if fresh.contains(x) { VertexId::new(format!("{tag}{x}")) } else { x.clone() };
    let faces: Vec<Walk> = r.faces.iter().map(|w| relabel_walk(w, &rename)).collect();
    for w in &faces {
        let vs = w.vertices();
        if (vs.contains(u) || vs.contains(v)) && vs.len() != 3 {
            return Err(Error::InternalInvariant(format!("face {w} at the base edge is not a triangle")));
        }
    }
    let mut added: BTreeSet<VertexId> = fresh.iter().map(rename).collect();
    added.insert(d.clone());
    Ok(HPrime {
        u: u.clone(),
        v: v.clone(),
        d,
        d_offset: t,
        a: relabel(&r.a, &rename)?,
        b: relabel(&r.b, &rename)?,
        faces,
        marked: r.marked.iter().map(|w| relabel_walk(w, &rename)).collect(),
        added,
        input: pair,
        triangulation: r,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Adjacency {
    AdjacentToU,
    AdjacentToV,
    AdjacentToBoth,
}

/// A block of the chain between two consecutive vertices on the radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainBlock {
    /// Endpoint nearer the base edge.
    pub from: VertexId,
    pub to: VertexId,
    /// Interior vertices of the two boundary paths from `from` to `to`.
    pub u_side: Vec<VertexId>,
    pub v_side: Vec<VertexId>,
}

impl ChainBlock {
    /// Boundary cycle, counterclockwise when the base edge points right:
    /// up the v side, down the u side.
    pub fn cycle(&self) -> Vec<VertexId> {
        let mut c = vec![self.from.clone()];
        c.extend(self.v_side.iter().cloned());
        c.push(self.to.clone());
        c.extend(self.u_side.iter().rev().cloned());
        c
    }

    pub fn is_edge(&self) -> bool {
        self.u_side.is_empty() && self.v_side.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainOfCycles {
    /// Blocks ordered from `d_prime` to `d`.
    pub blocks: Vec<ChainBlock>,
    /// Cut vertices in the same order.
    pub cutvertices: Vec<VertexId>,
    pub d: VertexId,
    pub d_prime: VertexId,
    pub tags: BTreeMap<VertexId, Adjacency>,
}

impl ChainOfCycles {
    /// `d_prime`, the cut vertices, then `d`.
    pub fn spine(&self) -> Vec<VertexId> {
        let mut s = vec![self.d_prime.clone()];
        s.extend(self.cutvertices.iter().cloned());
        s.push(self.d.clone());
        s
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.tags.keys().cloned().collect()
    }
}

fn chain_error(what: &str, witness: impl std::fmt::Display) -> Error {
    Error::InternalInvariant(format!("chain of cycles: {what} ({witness})"))
}

/// Outer boundary of H′ without `u` and `v`, decomposed into its blocks,
/// with every structural property asserted.
pub fn extract_chain_of_cycles(hp: &HPrime) -> Result<ChainOfCycles> {
    let (u, v) = (&hp.u, &hp.v);
    let g = hp.graph();
    let rest: BTreeSet<VertexId> = g.vertices().filter(|x| *x != u && *x != v).cloned().collect();
    let inner = hp.a.subdrawing(&rest)?;
    let cc = planarize(&inner);
    if cc.components.len() != 1 {
        return Err(chain_error("H′ without u and v is disconnected", cc.components.len()));
    }
    let walk = cc.components[0].outer.vertices();
    let mut c = Graph::new();
    for x in walk.iter().collect::<BTreeSet<_>>() {
        c.add_vertex(x.clone())?;
    }
    for i in 0..walk.len() {
        let (x, y) = (&walk[i], &walk[(i + 1) % walk.len()]);
        if x != y && !c.has_edge(x, y) {
            c.add_edge(x, y)?;
        }
    }
    if !c.is_connected() || c.vertex_count() < 2 {
        return Err(chain_error("boundary is not connected", c.vertex_count()));
    }

    let blocks = c.blocks();
    let cuts = c.articulation_points_without(&BTreeSet::new());
    let block_vertices: Vec<BTreeSet<VertexId>> =
        blocks.iter().map(|b| b.iter().flat_map(|e| [e.u().clone(), e.v().clone()]).collect()).collect();
    for (b, vs) in blocks.iter().zip(&block_vertices) {
        let cycle = vs.len() == b.len() && vs.iter().all(|x| b.iter().filter(|e| e.has(x)).count() == 2);
        if !(b.len() == 1 || cycle) {
            return Err(chain_error("a block is neither a cycle nor an edge", vs.len()));
        }
    }
    for x in &cuts {
        if !(g.has_edge(x, u) && g.has_edge(x, v)) {
            return Err(chain_error("cut vertex not adjacent to both u and v", x));
        }
        if block_vertices.iter().filter(|vs| vs.contains(x)).count() != 2 {
            return Err(chain_error("block-cut tree is not a path at", x));
        }
    }
    if let Some(vs) = block_vertices.iter().find(|vs| vs.iter().filter(|x| cuts.contains(*x)).count() > 2) {
        return Err(chain_error("block with three cut vertices", vs.len()));
    }

    let at_base: Vec<&Walk> =
        hp.faces.iter().filter(|w| w.vertices().contains(u) && w.vertices().contains(v)).collect();
    if at_base.len() != 1 {
        return Err(chain_error("base edge does not bound exactly one inner face", at_base.len()));
    }
    let d_prime = at_base[0]
        .vertices()
        .into_iter()
        .find(|x| x != u && x != v)
        .ok_or_else(|| chain_error("degenerate face at the base edge", at_base[0]))?;
    let d = hp.d.clone();
    if d_prime == d {
        return Err(chain_error("d′ coincides with d", &d));
    }

    let mut tags = BTreeMap::new();
    for x in c.vertices() {
        let tag = match (g.has_edge(x, u), g.has_edge(x, v)) {
            (true, true) => Adjacency::AdjacentToBoth,
            (true, false) => Adjacency::AdjacentToU,
            (false, true) => Adjacency::AdjacentToV,
            (false, false) => return Err(chain_error("boundary vertex adjacent to neither u nor v", x)),
        };
        let both = tag == Adjacency::AdjacentToBoth;
        if !cuts.contains(x) && both != (*x == d || *x == d_prime) {
            return Err(chain_error("wrong adjacency of a non-cut vertex", x));
        }
        tags.insert(x.clone(), tag);
    }

    // order the blocks along the path from d′ to d
    let mut order = Vec::new();
    let mut spine = vec![d_prime.clone()];
    let mut used = vec![false; blocks.len()];
    loop {
        let here = spine.last().unwrap().clone();
        let next = (0..blocks.len()).find(|&i| !used[i] && block_vertices[i].contains(&here));
        let Some(i) = next else { break };
        used[i] = true;
        order.push(i);
        let exit = block_vertices[i]
            .iter()
            .find(|x| **x != here && (cuts.contains(*x) || **x == d))
            .cloned()
            .ok_or_else(|| chain_error("end block does not contain d", &here))?;
        spine.push(exit.clone());
        if exit == d {
            break;
        }
    }
    if spine.last() != Some(&d) || used.iter().any(|x| !x) {
        return Err(chain_error("d and d′ are not at the two ends of the chain", &d));
    }
    if (block_vertices[order[0]].contains(&d) && order.len() > 1) || cuts.contains(&d_prime) || cuts.contains(&d) {
        return Err(chain_error("d or d′ is not in an end block", &d_prime));
    }

    let mut chain_blocks = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let (from, to) = (spine[k].clone(), spine[k + 1].clone());
        let mut cb = ChainBlock { from: from.clone(), to: to.clone(), u_side: Vec::new(), v_side: Vec::new() };
        if blocks[i].len() > 1 {
            let sub = c.induced(&block_vertices[i]);
            let mut paths = Vec::new();
            for first in sub.neighbors(&from) {
                let mut path = Vec::new();
                let (mut prev, mut cur) = (from.clone(), first.clone());
                while cur != to {
                    path.push(cur.clone());
                    let nxt = sub.neighbors(&cur).find(|y| **y != prev).cloned().expect("cycle");
                    prev = std::mem::replace(&mut cur, nxt);
                }
                paths.push(path);
            }
            if paths.len() != 2 {
                return Err(chain_error("cycle block without two paths", &from));
            }
            for path in paths {
                let side: BTreeSet<Adjacency> = path.iter().map(|x| tags[x]).collect();
                match side.into_iter().collect::<Vec<_>>().as_slice() {
                    [] => {}
                    [Adjacency::AdjacentToU] if cb.u_side.is_empty() => cb.u_side = path,
                    [Adjacency::AdjacentToV] if cb.v_side.is_empty() => cb.v_side = path,
                    _ => return Err(chain_error("a cycle side mixes u- and v-neighbours", &from)),
                }
            }
        }
        chain_blocks.push(cb);
    }
    let cutvertices = spine[1..spine.len() - 1].to_vec();
    Ok(ChainOfCycles { blocks: chain_blocks, cutvertices, d, d_prime, tags })
}
