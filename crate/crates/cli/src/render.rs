//! Self-contained SVG output: a static picture for one frame, SMIL
//! keyframe animation for more.

use std::fmt::Write;

use kitemorph::kite::Kite;
use kitemorph::{ApproxPoint, Edge, Frame, Graph, VertexId};

const CANVAS: f64 = 900.0;
const MARGIN: f64 = 50.0;

/// Colors and sizes; the default mirrors the usual blue edges, red
/// crossing edges and green kites.
#[derive(Clone, Debug)]
pub struct Theme {
    pub edge: &'static str,
    pub crossing_edge: &'static str,
    pub kite_fill: &'static str,
    pub vertex: &'static str,
    pub vertex_radius: f64,
}

impl Default for Theme {
    fn default() -> Self {
        Theme { edge: "#1f5fbf", crossing_edge: "#d62728", kite_fill: "#2ca02c", vertex: "#222222", vertex_radius: 4.0 }
    }
}

struct View {
    min_x: f64,
    max_y: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl View {
    fn fit(frames: &[Frame]) -> View {
        let pts = frames.iter().flat_map(|f| f.values());
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        if !x0.is_finite() {
            (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
        }
        let size = (x1 - x0).max(y1 - y0);
        let scale = if size > 0.0 { CANVAS / size } else { 1.0 };
        View {
            min_x: x0,
            max_y: y1,
            scale,
            width: (x1 - x0) * scale + 2.0 * MARGIN,
            height: (y1 - y0) * scale + 2.0 * MARGIN,
        }
    }

    fn map(&self, p: ApproxPoint) -> (f64, f64) {
        (MARGIN + (p.x - self.min_x) * self.scale, MARGIN + (self.max_y - p.y) * self.scale)
    }
}

fn num(x: f64) -> String {
    format!("{x:.2}")
}

fn animate(out: &mut String, attr: &str, values: &[String], dur: f64) {
    if values.len() < 2 {
        return;
    }
    let _ = write!(
        out,
        "<animate attributeName=\"{attr}\" dur=\"{dur:.3}s\" repeatCount=\"indefinite\" calcMode=\"linear\" values=\"{}\"/>",
        values.join(";")
    );
}

/// Render `frames` of a drawing of `graph` with kites `kites`; `fps`
/// frames per second when there is more than one frame.
pub fn render_svg(graph: &Graph, kites: &[Kite], frames: &[Frame], fps: f64, theme: &Theme) -> String {
    let view = View::fit(frames);
    let dur = frames.len() as f64 / fps.max(1e-6);
    let at = |v: &VertexId| -> Vec<(f64, f64)> { frames.iter().map(|f| view.map(f[v])).collect() };
    let crossing: Vec<&Edge> = kites.iter().flat_map(|k| k.crossing_edges.iter()).collect();

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(view.width),
        h = num(view.height)
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    for k in kites {
        let corners: Vec<Vec<(f64, f64)>> = k.corners.iter().map(at).collect();
        let pts: Vec<String> = (0..frames.len())
            .map(|i| corners.iter().map(|c| format!("{},{}", num(c[i].0), num(c[i].1))).collect::<Vec<_>>().join(" "))
            .collect();
        let _ = write!(out, "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\">", pts[0], theme.kite_fill);
        animate(&mut out, "points", &pts, dur);
        let _ = writeln!(out, "</polygon>");
    }

    for e in graph.edges() {
        let (p, q) = (at(e.u()), at(e.v()));
        let style = if crossing.contains(&e) {
            format!("stroke=\"{}\" stroke-dasharray=\"6 4\"", theme.crossing_edge)
        } else {
            format!("stroke=\"{}\"", theme.edge)
        };
        let _ = write!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {style} stroke-width=\"1.5\">",
            num(p[0].0),
            num(p[0].1),
            num(q[0].0),
            num(q[0].1)
        );
        for (attr, xs) in [("x1", &p), ("y1", &p), ("x2", &q), ("y2", &q)] {
            let vals: Vec<String> = xs.iter().map(|c| num(if attr.starts_with('x') { c.0 } else { c.1 })).collect();
            animate(&mut out, attr, &vals, dur);
        }
        let _ = writeln!(out, "</line>");
    }

    for v in graph.vertices() {
        let p = at(v);
        let _ = write!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"><title>{}</title>",
            num(p[0].0),
            num(p[0].1),
            num(theme.vertex_radius),
            theme.vertex,
            escape(v.as_str())
        );
        animate(&mut out, "cx", &p.iter().map(|c| num(c.0)).collect::<Vec<_>>(), dur);
        animate(&mut out, "cy", &p.iter().map(|c| num(c.1)).collect::<Vec<_>>(), dur);
        let _ = writeln!(out, "</circle>");
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use kitemorph::drawing::drawing_from_ints;
    use kitemorph::kite::detect_kites;

    fn k4() -> kitemorph::Drawing {
        drawing_from_ints(
            &[("a", 0, 0), ("b", 4, 0), ("c", 4, 4), ("d", 0, 4)],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c"), ("b", "d")],
        )
        .unwrap()
    }

    #[test]
    fn static_drawing_has_no_animation() {
        let d = k4();
        let svg = render_svg(d.graph(), &detect_kites(&d).unwrap(), &[d.to_frame()], 30.0, &Theme::default());
        assert!(!svg.contains("<animate"));
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 1);
    }

    #[test]
    fn keyframes_follow_frame_count() {
        let d = k4();
        let mut f2 = d.to_frame();
        f2.get_mut(&VertexId::new("c")).unwrap().x = 5.0;
        let frames: Vec<Frame> = (0..200).map(|i| if i % 2 == 0 { d.to_frame() } else { f2.clone() }).collect();
        let svg = render_svg(d.graph(), &detect_kites(&d).unwrap(), &frames, 25.0, &Theme::default());
        let cx = svg.split("attributeName=\"cx\"").nth(1).unwrap();
        let values = cx.split("values=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(values.split(';').count(), 200);
        assert!(cx.contains("dur=\"8.000s\""));
        let again = render_svg(d.graph(), &detect_kites(&d).unwrap(), &frames, 25.0, &Theme::default());
        assert_eq!(svg, again);
    }
}
