//! On-disk formats: instances with exact coordinates, serialized morphs and
//! sampled frame sets.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use kitemorph::geom::{format_rational, parse_rational};
use kitemorph::pipeline::Morph;
use kitemorph::{Drawing, Edge, Frame, Graph, VertexId};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;
pub const INSTANCE_FORMAT: &str = "kitemorph-instance";
pub const MORPH_FORMAT: &str = "kitemorph-morph";
pub const FRAMES_FORMAT: &str = "kitemorph-frames";

/// Where in a document a parse error occurred.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Position {
    Text { line: usize, column: usize },
    Field(String),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Text { line, column } => write!(f, "line {line}, column {column}"),
            Position::Field(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", .path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", .path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{}: {at}: {msg}", .path.display())]
    Parse { path: PathBuf, at: Position, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub at: Position,
    pub msg: String,
}

impl ParseError {
    fn field(at: impl Into<String>, msg: impl fmt::Display) -> Self {
        ParseError { at: Position::Field(at.into()), msg: msg.to_string() }
    }

    fn json(e: serde_json::Error) -> Self {
        ParseError { at: Position::Text { line: e.line(), column: e.column() }, msg: e.to_string() }
    }

    pub fn in_file(self, path: &Path) -> IoError {
        IoError::Parse { path: path.to_path_buf(), at: self.at, msg: self.msg }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.at, self.msg)
    }
}

/// A parsed instance file.
#[derive(Clone, Debug)]
pub struct Instance {
    pub drawing: Drawing,
    /// Marked faces recorded in debug dumps.
    pub marked: Vec<Vec<VertexId>>,
}

#[derive(Deserialize)]
struct RawInstance {
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    version: Option<u32>,
    vertices: Vec<RawVertex>,
    edges: Vec<(String, String)>,
    #[serde(default)]
    marked: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct RawVertex {
    id: String,
    x: Value,
    y: Value,
}

#[derive(Serialize)]
struct InstanceOut<'a> {
    format: &'static str,
    version: u32,
    vertices: Vec<VertexOut<'a>>,
    edges: Vec<[&'a str; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    marked: Vec<Vec<&'a str>>,
}

#[derive(Serialize)]
struct VertexOut<'a> {
    id: &'a str,
    x: String,
    y: String,
}

fn check_header(format: Option<&str>, version: Option<u32>, want: &str) -> Result<(), ParseError> {
    if let Some(f) = format {
        if f != want {
            return Err(ParseError::field("format", format!("expected `{want}`, found `{f}`")));
        }
    }
    match version {
        Some(v) if v != FORMAT_VERSION => Err(ParseError::field("version", format!("unsupported version {v}"))),
        _ => Ok(()),
    }
}

fn coordinate(v: &Value, at: &str) -> Result<kitemorph::Rational, ParseError> {
    let text = match v {
        Value::String(s) => s.clone(),
        // numbers keep their source text under arbitrary precision
        Value::Number(n) => n.to_string(),
        _ => return Err(ParseError::field(at, "expected a decimal string or a number")),
    };
    parse_rational(&text).map_err(|e| ParseError::field(at, e))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(ParseError::json)?;
    check_header(raw.format.as_deref(), raw.version, INSTANCE_FORMAT)?;
    let mut graph = Graph::new();
    let mut pos = BTreeMap::new();
    for (i, v) in raw.vertices.iter().enumerate() {
        let id = VertexId::new(v.id.clone());
        graph.add_vertex(id.clone()).map_err(|e| ParseError::field(format!("vertices[{i}].id"), e))?;
        let x = coordinate(&v.x, &format!("vertices[{i}].x"))?;
        let y = coordinate(&v.y, &format!("vertices[{i}].y"))?;
        pos.insert(id, kitemorph::Point::new(x, y));
    }
    for (i, (a, b)) in raw.edges.iter().enumerate() {
        graph
            .add_edge(&VertexId::new(a.clone()), &VertexId::new(b.clone()))
            .map_err(|e| ParseError::field(format!("edges[{i}]"), e))?;
    }
    let marked: Vec<Vec<VertexId>> = raw.marked.iter().map(|w| w.iter().map(|x| VertexId::new(x.clone())).collect()).collect();
    for (i, w) in marked.iter().enumerate() {
        if let Some(x) = w.iter().find(|x| !graph.contains_vertex(x)) {
            return Err(ParseError::field(format!("marked[{i}]"), format!("unknown vertex `{x}`")));
        }
    }
    let drawing = Drawing::new(graph, pos).map_err(|e| ParseError::field("vertices", e))?;
    Ok(Instance { drawing, marked })
}

pub fn instance_to_json(d: &Drawing, marked: &[Vec<VertexId>]) -> String {
    let out = InstanceOut {
        format: INSTANCE_FORMAT,
        version: FORMAT_VERSION,
        vertices: d
            .positions()
            .iter()
            .map(|(v, p)| VertexOut { id: v.as_str(), x: format_rational(p.x()), y: format_rational(p.y()) })
            .collect(),
        edges: d.graph().edges().map(|e| [e.u().as_str(), e.v().as_str()]).collect(),
        marked: marked.iter().map(|w| w.iter().map(VertexId::as_str).collect()).collect(),
    };
    to_json(&out)
}

/// Where a morph or frame set came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    /// SHA-256 of the source instance file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_sha256: Option<String>,
    /// SHA-256 of the morph file the frames were sampled from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morph_sha256: Option<String>,
    /// Value of `KITEMORPH_SEED` when the file was written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MorphFile {
    pub format: String,
    pub version: u32,
    pub provenance: Provenance,
    pub morph: Morph,
}

impl MorphFile {
    pub fn new(morph: Morph, provenance: Provenance) -> Self {
        MorphFile { format: MORPH_FORMAT.into(), version: FORMAT_VERSION, provenance, morph }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimedFrame {
    pub t: f64,
    pub positions: Frame,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameProvenance {
    pub files: Provenance,
    pub samples: usize,
    /// Relative endpoint tolerance the frames are meant to be checked at.
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameSet {
    pub format: String,
    pub version: u32,
    pub provenance: FrameProvenance,
    /// Edges of the drawn graph, so a frame set renders on its own.
    pub edges: Vec<Edge>,
    pub frames: Vec<TimedFrame>,
}

impl FrameSet {
    pub fn new(frames: Vec<TimedFrame>, edges: Vec<Edge>, files: Provenance, tolerance: f64) -> Self {
        let samples = frames.len();
        FrameSet {
            format: FRAMES_FORMAT.into(),
            version: FORMAT_VERSION,
            provenance: FrameProvenance { files, samples, tolerance },
            edges,
            frames,
        }
    }

    /// Graph on the frame vertices and the recorded edges.
    pub fn graph(&self) -> kitemorph::Result<Graph> {
        let mut g = Graph::new();
        if let Some(f) = self.frames.first() {
            for v in f.positions.keys() {
                g.add_vertex(v.clone())?;
            }
        }
        for e in &self.edges {
            g.add_edge(e.u(), e.v())?;
        }
        Ok(g)
    }

    pub fn pairs(&self) -> Vec<(f64, Frame)> {
        self.frames.iter().map(|f| (f.t, f.positions.clone())).collect()
    }
}

/// Any file the tool reads, recognized by its `format` field.
#[derive(Clone, Debug)]
pub enum AnyFile {
    Instance(Instance),
    Morph(Box<MorphFile>),
    Frames(FrameSet),
}

#[derive(Deserialize)]
struct Header {
    #[serde(default)]
    format: Option<String>,
}

pub fn parse_morph(text: &str) -> Result<MorphFile, ParseError> {
    let m: MorphFile = serde_json::from_str(text).map_err(ParseError::json)?;
    check_header(Some(&m.format), Some(m.version), MORPH_FORMAT)?;
    Ok(m)
}

pub fn parse_frames(text: &str) -> Result<FrameSet, ParseError> {
    let f: FrameSet = serde_json::from_str(text).map_err(ParseError::json)?;
    check_header(Some(&f.format), Some(f.version), FRAMES_FORMAT)?;
    if f.frames.len() < 2 {
        return Err(ParseError::field("frames", "a frame set needs at least two frames"));
    }
    Ok(f)
}

pub fn parse_any(text: &str) -> Result<AnyFile, ParseError> {
    let h: Header = serde_json::from_str(text).map_err(ParseError::json)?;
    match h.format.as_deref() {
        Some(MORPH_FORMAT) => parse_morph(text).map(|m| AnyFile::Morph(Box::new(m))),
        Some(FRAMES_FORMAT) => parse_frames(text).map(AnyFile::Frames),
        None | Some(INSTANCE_FORMAT) => parse_instance(text).map(AnyFile::Instance),
        Some(f) => Err(ParseError::field("format", format!("unknown format `{f}`"))),
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write { path: path.to_path_buf(), source })
}

pub fn load_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&read_text(path)?).map_err(|e| e.in_file(path))
}

pub fn load_any(path: &Path) -> Result<AnyFile, IoError> {
    parse_any(&read_text(path)?).map_err(|e| e.in_file(path))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const K4: &str = r#"{
        "vertices": [
            {"id": "a", "x": "0", "y": "0"},
            {"id": "b", "x": 4, "y": "0.1"},
            {"id": "c", "x": "4", "y": 4.000000000000000000001},
            {"id": "d", "x": "1/3", "y": "4"}
        ],
        "edges": [["a","b"],["b","c"],["c","d"],["d","a"],["a","c"],["b","d"]]
    }"#;

    #[test]
    fn numbers_and_strings_parse_exactly() {
        let d = parse_instance(K4).unwrap().drawing;
        let c = d.pos(&VertexId::new("c"));
        assert_eq!(format_rational(c.y()), "4.000000000000000000001");
        assert_eq!(format_rational(d.pos(&VertexId::new("b")).y()), "0.1");
        assert_eq!(format_rational(d.pos(&VertexId::new("d")).x()), "1/3");
    }

    #[test]
    fn instance_round_trip_is_exact() {
        let d = parse_instance(K4).unwrap().drawing;
        let text = instance_to_json(&d, &[]);
        let back = parse_instance(&text).unwrap().drawing;
        assert_eq!(back.positions(), d.positions());
        assert_eq!(back.graph(), d.graph());
        assert_eq!(instance_to_json(&back, &[]), text);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_instance("{\n  \"vertices\": [\n  ").unwrap_err();
        assert!(matches!(e.at, Position::Text { line: 3, .. }), "{e}");
        let e = parse_instance(r#"{"vertices":[{"id":"a","x":"1","y":"zz"}],"edges":[]}"#).unwrap_err();
        assert_eq!(e.at, Position::Field("vertices[0].y".into()));
        let e = parse_instance(r#"{"vertices":[{"id":"a","x":"1","y":"1"}],"edges":[["a","q"]]}"#).unwrap_err();
        assert_eq!(e.at, Position::Field("edges[0]".into()));
        let e = parse_instance(r#"{"version":7,"vertices":[],"edges":[]}"#).unwrap_err();
        assert_eq!(e.at, Position::Field("version".into()));
    }

    #[test]
    fn unknown_format_is_rejected() {
        assert!(parse_any(r#"{"format":"nope"}"#).is_err());
        assert!(matches!(parse_any(K4).unwrap(), AnyFile::Instance(_)));
    }
}
