//! Kites, the kite-planarity conditions, vertex levels, and drawing classes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::drawing::{crossing_pairs, segment_addable, validate_drawing, Drawing};
use crate::error::{Error, Result};
use crate::geom::{locate_unchecked, Direction, Location, Point};
use crate::graph::{Edge, VertexId};
use crate::planar::{planarize, topologically_equivalent, Node};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Kite {
    /// Corners in counterclockwise order starting from the smallest id;
    /// opposite corners span a crossing edge.
    pub corners: [VertexId; 4],
    pub kite_edges: [Edge; 4],
    pub crossing_edges: [Edge; 2],
    #[serde(skip)]
    pub crossing_point: Point,
    pub contained_vertices: BTreeSet<VertexId>,
}

impl Kite {
    fn from_pair(d: &Drawing, e: &Edge, f: &Edge, x: Point) -> Kite {
        let mut ends = [e.u(), f.u(), e.v(), f.v()];
        ends.sort_by(|a, b| Direction::between(&x, d.pos(a)).angle_cmp(&Direction::between(&x, d.pos(b))));
        // rotate so that the smallest id comes first, keeping ccw order
        let k = (0..4).min_by_key(|&i| ends[i]).unwrap();
        ends.rotate_left(k);
        let corners = ends.map(|v| v.clone());
        let kite_edges = [0, 1, 2, 3].map(|i| Edge::of(&corners[i], &corners[(i + 1) % 4]));
        let quad = corners.clone().map(|v| d.pos(&v).clone());
        let contained_vertices = d
            .positions()
            .iter()
            .filter(|(v, p)| !corners.contains(v) && locate_unchecked(p, &quad) == Location::Inside)
            .map(|(v, _)| v.clone())
            .collect();
        Kite {
            corners,
            kite_edges,
            crossing_edges: [e.clone(), f.clone()],
            crossing_point: x,
            contained_vertices,
        }
    }

    pub fn quad(&self, d: &Drawing) -> Vec<Point> {
        self.corners.iter().map(|v| d.pos(v).clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.contained_vertices.is_empty()
    }

    pub fn has_corner(&self, v: &VertexId) -> bool {
        self.corners.contains(v)
    }
}

fn crossing_counts(pairs: &[(Edge, Edge, Point)]) -> BTreeMap<&Edge, Vec<&Edge>> {
    let mut m: BTreeMap<&Edge, Vec<&Edge>> = BTreeMap::new();
    for (e, f, _) in pairs {
        m.entry(e).or_default().push(f);
        m.entry(f).or_default().push(e);
    }
    m
}

/// One kite per crossing pair, in crossing-pair order.
pub fn detect_kites(d: &Drawing) -> Result<Vec<Kite>> {
    let pairs = crossing_pairs(d);
    if let Some((e, _)) = crossing_counts(&pairs).into_iter().find(|(_, c)| c.len() > 1) {
        return Err(Error::MultiplyCrossed(e.u().clone(), e.v().clone()));
    }
    Ok(pairs.into_iter().map(|(e, f, x)| Kite::from_pair(d, &e, &f, x)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "property")]
pub enum KiteViolation {
    /// An edge crossed more than once.
    #[serde(rename = "P1", rename_all = "camelCase")]
    MultiplyCrossed { edge: Edge, crossed_by: Vec<Edge> },
    /// A kite edge that is present but crossed, or absent and not drawable.
    #[serde(rename = "P2", rename_all = "camelCase")]
    KiteEdge { crossing: [Edge; 2], kite_edge: Edge, present: bool, crossed_by: Vec<Edge> },
    /// An edge from a kite corner to a vertex inside the kite that is crossed.
    #[serde(rename = "P3", rename_all = "camelCase")]
    BindingEdgeCrossed { kite: [VertexId; 4], binding_edge: Edge, crossed_by: Edge },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KitePlanarityReport {
    pub ok: bool,
    pub violations: Vec<KiteViolation>,
    pub missing_kite_edges: Vec<Edge>,
}

/// Check that every edge is crossed at most once, every kite edge is
/// present and uncrossed or drawable as an uncrossed segment, and every
/// binding edge is uncrossed. `d` must be a valid drawing.
pub fn validate_kite_planarity(d: &Drawing) -> KitePlanarityReport {
    let pairs = crossing_pairs(d);
    let crossed = crossing_counts(&pairs);
    let mut violations = Vec::new();
    for (e, by) in &crossed {
        if by.len() > 1 {
            violations.push(KiteViolation::MultiplyCrossed {
                edge: (*e).clone(),
                crossed_by: by.iter().map(|f| (*f).clone()).collect(),
            });
        }
    }
    let mut missing = BTreeSet::new();
    for (e, f, x) in &pairs {
        let kite = Kite::from_pair(d, e, f, x.clone());
        for ke in &kite.kite_edges {
            let present = d.graph().contains_edge(ke);
            let by: Vec<Edge> = crossed.get(ke).map(|v| v.iter().map(|g| (*g).clone()).collect()).unwrap_or_default();
            let fine = if present { by.is_empty() } else { segment_addable(d, ke.u(), ke.v()) };
            if !fine {
                violations.push(KiteViolation::KiteEdge {
                    crossing: [e.clone(), f.clone()],
                    kite_edge: ke.clone(),
                    present,
                    crossed_by: by,
                });
            } else if !present {
                missing.insert(ke.clone());
            }
        }
        for c in &kite.corners {
            for w in d.graph().neighbors(c) {
                if !kite.contained_vertices.contains(w) {
                    continue;
                }
                let b = Edge::of(c, w);
                if let Some(by) = crossed.get(&b) {
                    for g in by {
                        violations.push(KiteViolation::BindingEdgeCrossed {
                            kite: kite.corners.clone(),
                            binding_edge: b.clone(),
                            crossed_by: (*g).clone(),
                        });
                    }
                }
            }
        }
    }
    KitePlanarityReport { ok: violations.is_empty(), violations, missing_kite_edges: missing.into_iter().collect() }
}

fn require_kite_planar(d: &Drawing) -> Result<KitePlanarityReport> {
    let v = validate_drawing(d);
    if !v.is_empty() {
        return Err(Error::InvalidDrawing(v));
    }
    let r = validate_kite_planarity(d);
    if !r.ok {
        let msg = serde_json::to_string(&r.violations).unwrap_or_default();
        return Err(Error::NotKitePlanar(msg));
    }
    Ok(r)
}

/// Add every missing kite edge to both drawings of an equivalent pair.
/// The augmented pair is re-checked for validity, kite-planarity and
/// equivalence.
pub fn complete_partial_kites(a: &Drawing, b: &Drawing) -> Result<(Drawing, Drawing, Vec<Edge>)> {
    let ra = require_kite_planar(a)?;
    let rb = require_kite_planar(b)?;
    let rep = topologically_equivalent(a, b)?;
    if !rep.equivalent {
        return Err(Error::NotEquivalent(Box::new(rep)));
    }
    if ra.missing_kite_edges != rb.missing_kite_edges {
        return Err(Error::AugmentationIncompatible("the drawings miss different kite edges".into()));
    }
    let added = ra.missing_kite_edges;
    if added.is_empty() {
        return Ok((a.clone(), b.clone(), added));
    }
    let (mut a2, mut b2) = (a.clone(), b.clone());
    for e in &added {
        a2.add_edge(e.u(), e.v())?;
        b2.add_edge(e.u(), e.v())?;
    }
    for d in [&a2, &b2] {
        let v = validate_drawing(d);
        if !v.is_empty() {
            return Err(Error::AugmentationIncompatible(format!("added kite edges touch: {}", v[0])));
        }
        let r = validate_kite_planarity(d);
        if !r.ok || !r.missing_kite_edges.is_empty() {
            return Err(Error::AugmentationIncompatible("added kite edges cross each other".into()));
        }
    }
    let rep = topologically_equivalent(&a2, &b2)?;
    if !rep.equivalent {
        return Err(Error::AugmentationIncompatible(format!("after adding kite edges: {rep}")));
    }
    Ok((a2, b2, added))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelAssignment {
    pub level: BTreeMap<VertexId, usize>,
    pub max_level: usize,
}

impl LevelAssignment {
    pub fn vertices_at(&self, l: usize) -> BTreeSet<VertexId> {
        self.level.iter().filter(|(_, &x)| x == l).map(|(v, _)| v.clone()).collect()
    }
}

/// Levels by fixpoint: 0 when no kite contains the vertex, otherwise one
/// more than the largest level among corners of kites containing it.
pub fn assign_levels(d: &Drawing) -> Result<LevelAssignment> {
    let kites = detect_kites(d)?;
    assign_levels_with(d, &kites)
}

pub fn assign_levels_with(d: &Drawing, kites: &[Kite]) -> Result<LevelAssignment> {
    let mut containing: BTreeMap<&VertexId, Vec<&Kite>> = BTreeMap::new();
    for k in kites {
        for v in &k.contained_vertices {
            containing.entry(v).or_default().push(k);
        }
    }
    let mut level: BTreeMap<VertexId, usize> = d.graph().vertices().map(|v| (v.clone(), 0)).collect();
    let n = level.len();
    let mut rounds = 0;
    loop {
        let mut changed = false;
        for (v, ks) in &containing {
            let want = 1 + ks
                .iter()
                .flat_map(|k| k.corners.iter())
                .map(|c| level[c])
                .max()
                .unwrap_or(0);
            if level[*v] != want {
                level.insert((*v).clone(), want);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        rounds += 1;
        if rounds > n + 1 {
            return Err(Error::InternalInvariant("kite containment is cyclic".into()));
        }
    }
    for k in kites {
        let l0 = level[&k.corners[0]];
        if let Some(c) = k.corners.iter().find(|c| level[*c] != l0) {
            return Err(Error::InternalInvariant(format!(
                "kite corners {} and {} have levels {} and {}",
                k.corners[0], c, l0, level[c]
            )));
        }
    }
    let max_level = level.values().copied().max().unwrap_or(0);
    Ok(LevelAssignment { level, max_level })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    #[serde(rename = "optimal1Planar")]
    pub optimal_1_planar: bool,
    #[serde(rename = "kiteAugmentedICPlanar")]
    pub kite_augmented_ic_planar: bool,
}

/// Membership in the two drawing classes that are always kite-planar.
/// `d` must be valid; both flags require at least one crossing.
pub fn classify_drawing(d: &Drawing) -> Classification {
    let pairs = crossing_pairs(d);
    let counts = crossing_counts(&pairs);
    if pairs.is_empty() || counts.values().any(|c| c.len() > 1) {
        return Classification::default();
    }
    let kites: Vec<Kite> = pairs.iter().map(|(e, f, x)| Kite::from_pair(d, e, f, x.clone())).collect();

    let mut ends = BTreeSet::new();
    let matching = counts.keys().all(|e| ends.insert(e.u()) && ends.insert(e.v()));
    let all_kite_edges = kites.iter().all(|k| k.kite_edges.iter().all(|e| d.graph().contains_edge(e)));

    Classification {
        optimal_1_planar: is_optimal(d, &counts, &kites),
        kite_augmented_ic_planar: matching && all_kite_edges,
    }
}

fn is_optimal(d: &Drawing, counts: &BTreeMap<&Edge, Vec<&Edge>>, kites: &[Kite]) -> bool {
    let n = d.graph().vertex_count();
    if n < 4 || d.graph().edge_count() != 4 * n - 9 {
        return false;
    }
    let crossed: BTreeSet<Edge> = counts.keys().map(|e| (*e).clone()).collect();
    let Ok(p) = d.remove_edges(&crossed) else { return false };
    if !p.graph().is_triconnected() {
        return false;
    }
    let cc = planarize(&p);
    if cc.components.len() != 1 || cc.components[0].outer.len() != 3 {
        return false;
    }
    let quads: BTreeSet<BTreeSet<&VertexId>> =
        kites.iter().map(|k| k.corners.iter().collect()).collect();
    let mut used = 0;
    for w in &cc.components[0].inner {
        let vs: BTreeSet<&VertexId> = w.0.iter().filter_map(Node::as_vertex).collect();
        match w.len() {
            3 => {}
            4 if quads.contains(&vs) => used += 1,
            _ => return false,
        }
    }
    used == kites.len()
}

/// Graph of a drawing with the crossing edges of every kite removed.
pub fn uncrossed_skeleton(d: &Drawing, kites: &[Kite]) -> Result<Drawing> {
    let crossing: BTreeSet<Edge> = kites.iter().flat_map(|k| k.crossing_edges.iter().cloned()).collect();
    d.remove_edges(&crossing)
}

/// Adjacency helper shared by later stages: the kite whose crossing edges
/// include `e`.
pub fn kite_of_edge<'a>(kites: &'a [Kite], e: &Edge) -> Option<&'a Kite> {
    kites.iter().find(|k| k.crossing_edges.contains(e))
}
