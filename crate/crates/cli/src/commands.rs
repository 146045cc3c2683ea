//! Subcommands. Exit codes: 0 success, 1 semantic failure, 2 parse or IO
//! failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use kitemorph::kite::{classify_drawing, detect_kites, validate_kite_planarity, Kite};
use kitemorph::pipeline::{self, sample_times, verify_frames, verify_morph, VerificationReport, EPS_REL};
use kitemorph::{topologically_equivalent, validate_drawing, Drawing, Frame, Graph, Violation};
use serde::Serialize;

use crate::formats::{
    instance_to_json, load_any, load_instance, parse_instance, read_text, sha256_hex, to_json, write_text, AnyFile, FrameSet,
    IoError, MorphFile, Provenance, TimedFrame,
};
use crate::render::{render_svg, Theme};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

/// Environment variable recorded in provenance for reproducibility.
pub const SEED_VAR: &str = "KITEMORPH_SEED";

#[derive(Debug, Parser)]
#[command(name = "kitemorph", version, about = "Morph between topologically equivalent kite-planar 1-planar drawings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a drawing is valid and kite-planar.
    Validate { path: PathBuf },
    /// Report membership in the optimal and kite-augmented IC-planar classes.
    Classify { path: PathBuf },
    /// Decide whether two drawings are topologically equivalent.
    Equivalent { a: PathBuf, b: PathBuf },
    /// Compute a morph from `a` to `b`.
    Morph {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Samples checked by --verify.
        #[arg(long, default_value_t = 200)]
        frames: usize,
        /// Check the morph at uniformly spaced frames.
        #[arg(long)]
        verify: bool,
        /// Write the full verification report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sample a morph file into a frame set.
    Sample {
        morph: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        frames: usize,
    },
    /// Check a morph file or frame set against its endpoint drawings.
    Verify {
        a: PathBuf,
        b: PathBuf,
        file: PathBuf,
        /// Samples taken from a morph file; frame sets are checked as given.
        #[arg(long, default_value_t = 200)]
        frames: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Render an instance, morph or frame set as SVG.
    Render {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Samples taken from a morph file.
        #[arg(long, default_value_t = 60)]
        frames: usize,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
    },
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ValidateReport {
    ok: bool,
    violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kite_planarity: Option<kitemorph::kite::KitePlanarityReport>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Summary<'a> {
    ok: bool,
    endpoints_ok: bool,
    source_error: f64,
    target_error: f64,
    frames: usize,
    failed_frames: Vec<&'a pipeline::FrameCheck>,
    rigidity: &'a [pipeline::RigidityCheck],
}

impl<'a> Summary<'a> {
    fn of(r: &'a VerificationReport) -> Self {
        Summary {
            ok: r.ok,
            endpoints_ok: r.endpoints_ok,
            source_error: r.source_error,
            target_error: r.target_error,
            frames: r.frames.len(),
            failed_frames: r.failed_frames().collect(),
            rigidity: &r.rigidity,
        }
    }
}

#[derive(Serialize)]
struct Message {
    ok: bool,
    error: String,
}

fn fail(msg: impl ToString) -> i32 {
    print!("{}", to_json(&Message { ok: false, error: msg.to_string() }));
    EXIT_FAIL
}

fn io_fail(e: IoError) -> i32 {
    eprintln!("error: {e}");
    EXIT_PARSE
}

fn seed() -> Option<String> {
    std::env::var(SEED_VAR).ok()
}

/// An instance together with the hash of its file.
fn load_hashed(path: &Path) -> Result<(Drawing, String), IoError> {
    let text = read_text(path)?;
    let inst = parse_instance(&text).map_err(|e| e.in_file(path))?;
    Ok((inst.drawing, sha256_hex(text.as_bytes())))
}

fn require_valid(d: &Drawing, path: &Path) -> Result<(), i32> {
    let v = validate_drawing(d);
    if v.is_empty() {
        return Ok(());
    }
    eprintln!("{}: invalid drawing", path.display());
    print!("{}", to_json(&ValidateReport { ok: false, violations: v, kite_planarity: None }));
    Err(EXIT_FAIL)
}

fn finish_report(rep: &VerificationReport, report: Option<&Path>) -> i32 {
    match report {
        Some(p) => {
            if let Err(e) = write_text(p, &to_json(rep)) {
                return io_fail(e);
            }
            print!("{}", to_json(&Summary::of(rep)));
        }
        None => print!("{}", to_json(rep)),
    }
    if rep.ok {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Validate { path } => validate(&path),
        Command::Classify { path } => classify(&path),
        Command::Equivalent { a, b } => equivalent(&a, &b),
        Command::Morph { a, b, out, frames, verify, report } => morph(&a, &b, &out, frames, verify, report.as_deref()),
        Command::Sample { morph, out, frames } => sample(&morph, &out, frames),
        Command::Verify { a, b, file, frames, report } => verify(&a, &b, &file, frames, report.as_deref()),
        Command::Render { input, out, frames, fps } => render(&input, &out, frames, fps),
    }
}

fn validate(path: &Path) -> i32 {
    let d = match load_instance(path) {
        Ok(i) => i.drawing,
        Err(e) => return io_fail(e),
    };
    let violations = validate_drawing(&d);
    let kite_planarity = violations.is_empty().then(|| validate_kite_planarity(&d));
    let ok = kite_planarity.as_ref().is_some_and(|k| k.ok);
    print!("{}", to_json(&ValidateReport { ok, violations, kite_planarity }));
    if ok {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn classify(path: &Path) -> i32 {
    let d = match load_instance(path) {
        Ok(i) => i.drawing,
        Err(e) => return io_fail(e),
    };
    if let Err(code) = require_valid(&d, path) {
        return code;
    }
    print!("{}", to_json(&classify_drawing(&d)));
    EXIT_OK
}

fn equivalent(a: &Path, b: &Path) -> i32 {
    let (da, db) = match (load_instance(a), load_instance(b)) {
        (Ok(x), Ok(y)) => (x.drawing, y.drawing),
        (Err(e), _) | (_, Err(e)) => return io_fail(e),
    };
    for (d, p) in [(&da, a), (&db, b)] {
        if let Err(code) = require_valid(d, p) {
            return code;
        }
    }
    match topologically_equivalent(&da, &db) {
        Ok(rep) => {
            print!("{}", to_json(&rep));
            if rep.equivalent {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => fail(e),
    }
}

fn morph(a: &Path, b: &Path, out: &Path, frames: usize, verify: bool, report: Option<&Path>) -> i32 {
    let ((da, ha), (db, hb)) = match (load_hashed(a), load_hashed(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return io_fail(e),
    };
    for (d, p) in [(&da, a), (&db, b)] {
        if let Err(code) = require_valid(d, p) {
            return code;
        }
    }
    match topologically_equivalent(&da, &db) {
        Ok(rep) if rep.equivalent => {}
        Ok(rep) => {
            eprintln!("error: the drawings are not topologically equivalent: {rep}");
            print!("{}", to_json(&rep));
            return EXIT_FAIL;
        }
        Err(e) => return fail(e),
    }
    let m = match pipeline::morph(&da, &db) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return fail(e);
        }
    };
    let prov = Provenance { source_sha256: Some(ha), target_sha256: Some(hb), morph_sha256: None, seed: seed() };
    let file = MorphFile::new(m, prov);
    if let Err(e) = write_text(out, &to_json(&file)) {
        return io_fail(e);
    }
    if !verify {
        return EXIT_OK;
    }
    match verify_morph(&da, &db, &file.morph, frames) {
        Ok(rep) => finish_report(&rep, report),
        Err(e) => fail(e),
    }
}

fn sample(path: &Path, out: &Path, n: usize) -> i32 {
    let text = match read_text(path) {
        Ok(t) => t,
        Err(e) => return io_fail(e),
    };
    let file = match crate::formats::parse_morph(&text) {
        Ok(f) => f,
        Err(e) => return io_fail(e.in_file(path)),
    };
    let frames: Result<Vec<TimedFrame>, _> = sample_times(n.max(2))
        .into_iter()
        .map(|t| file.morph.evaluate(t).map(|positions| TimedFrame { t, positions }))
        .collect();
    let frames = match frames {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let prov = Provenance { morph_sha256: Some(sha256_hex(text.as_bytes())), seed: seed(), ..file.provenance.clone() };
    let set = FrameSet::new(frames, file.morph.edges.iter().cloned().collect(), prov, EPS_REL);
    match write_text(out, &to_json(&set)) {
        Ok(()) => EXIT_OK,
        Err(e) => io_fail(e),
    }
}

fn verify(a: &Path, b: &Path, path: &Path, n: usize, report: Option<&Path>) -> i32 {
    let (da, db) = match (load_instance(a), load_instance(b)) {
        (Ok(x), Ok(y)) => (x.drawing, y.drawing),
        (Err(e), _) | (_, Err(e)) => return io_fail(e),
    };
    let rep = match load_any(path) {
        Ok(AnyFile::Morph(m)) => verify_morph(&da, &db, &m.morph, n),
        Ok(AnyFile::Frames(f)) => verify_frames(&da, &db, &f.pairs()),
        Ok(AnyFile::Instance(_)) => {
            eprintln!("error: {}: expected a morph file or a frame set", path.display());
            return EXIT_PARSE;
        }
        Err(e) => return io_fail(e),
    };
    match rep {
        Ok(rep) => finish_report(&rep, report),
        Err(e) => fail(e),
    }
}

fn kites_of(g: &Graph, f: &Frame) -> Vec<Kite> {
    Drawing::from_frame(g, f).ok().and_then(|d| detect_kites(&d).ok()).unwrap_or_default()
}

fn render(path: &Path, out: &Path, n: usize, fps: f64) -> i32 {
    let (graph, frames) = match load_any(path) {
        Ok(AnyFile::Instance(i)) => (i.drawing.graph().clone(), vec![i.drawing.to_frame()]),
        Ok(AnyFile::Morph(m)) => {
            let g = match m.morph.graph() {
                Ok(g) => g,
                Err(e) => return fail(e),
            };
            match m.morph.sample(n.max(2)) {
                Ok(f) => (g, f),
                Err(e) => return fail(e),
            }
        }
        Ok(AnyFile::Frames(f)) => match f.graph() {
            Ok(g) => (g, f.frames.into_iter().map(|t| t.positions).collect()),
            Err(e) => return fail(e),
        },
        Err(e) => return io_fail(e),
    };
    let kites = kites_of(&graph, &frames[0]);
    let svg = render_svg(&graph, &kites, &frames, fps, &Theme::default());
    match write_text(out, &svg) {
        Ok(()) => EXIT_OK,
        Err(e) => io_fail(e),
    }
}

/// Serialize an instance file; used by corpus tooling and tests.
pub fn instance_text(d: &Drawing) -> String {
    instance_to_json(d, &[])
}
