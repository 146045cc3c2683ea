use kitemorph::drawing::drawing_from_ints;
use kitemorph::pipeline::{morph_traced, verify_morph};
use kitemorph::topologically_equivalent;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type P = (f64, f64);

fn orient(a: P, b: P, c: P) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn seg_cross(a: P, b: P, c: P, d: P) -> bool {
    orient(a, b, c) * orient(a, b, d) < 0.0 && orient(c, d, a) * orient(c, d, b) < 0.0
}

fn affine(src: [P; 3], dst: [P; 3], p: P) -> P {
    // barycentric in src, recombined in dst
    let den = orient(src[0], src[1], src[2]);
    let l0 = orient(p, src[1], src[2]) / den;
    let l1 = orient(src[0], p, src[2]) / den;
    let l2 = 1.0 - l0 - l1;
    (l0 * dst[0].0 + l1 * dst[1].0 + l2 * dst[2].0, l0 * dst[0].1 + l1 * dst[1].1 + l2 * dst[2].1)
}

/// Outer kite abcd plus a random planar graph in the piece (a, b, X),
/// drawn twice: the second copy is an affine image with jitter.
fn random_piece_pair(seed: u64, k: usize) -> Option<(kitemorph::Drawing, kitemorph::Drawing)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outer_a = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let outer_b = [(0.0, 0.0), (1.2, 0.1), (1.05, 1.1), (-0.1, 0.95)];
    let xa = (0.5, 0.5);
    let xb = {
        let (a, b, c, d) = (outer_b[0], outer_b[1], outer_b[2], outer_b[3]);
        let t = orient(b, d, a) / (orient(b, d, a) - orient(b, d, c));
        (a.0 + t * (c.0 - a.0), a.1 + t * (c.1 - a.1))
    };
    let mut pts: Vec<P> = vec![outer_a[0], outer_a[1]];
    while pts.len() < k + 2 {
        let (s, t): (f64, f64) = (rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.9));
        let (s, t) = if s + t < 1.0 { (s, t) } else { (1.0 - s, 1.0 - t) };
        let l = (1.0 - s - t, s, t);
        if l.0 < 0.03 || l.1 < 0.03 || l.2 < 0.03 {
            continue;
        }
        let p = (l.1 * 1.0 + l.2 * xa.0, l.2 * xa.1);
        if pts.iter().all(|q| (q.0 - p.0).hypot(q.1 - p.1) > 0.02) {
            pts.push(p);
        }
    }
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if (i, j) != (0, 1) {
                cand.push(((pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1), i, j));
            }
        }
    }
    cand.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut inner: Vec<(usize, usize)> = vec![(0, 1)];
    for (_, i, j) in cand {
        if inner.iter().all(|&(p, q)| p == i || p == j || q == i || q == j || !seg_cross(pts[i], pts[j], pts[p], pts[q])) {
            inner.push((i, j));
        }
    }
    inner.remove(0);
    let inner: Vec<(usize, usize)> = inner.into_iter().filter(|_| rng.gen_bool(0.75)).collect();

    let src = [outer_a[0], outer_a[1], xa];
    let dst = [outer_b[0], outer_b[1], xb];
    let names: Vec<String> = (0..pts.len()).map(|i| match i {
        0 => "a".into(),
        1 => "b".into(),
        _ => format!("h{i}"),
    }).collect();
    let scale = 1e6;
    let build = |outer: [P; 4], map: &dyn Fn(P) -> P| {
        let mut vs: Vec<(String, i64, i64)> = Vec::new();
        for (n, p) in ["a", "b", "c", "d"].iter().zip(outer) {
            vs.push((n.to_string(), (p.0 * scale).round() as i64, (p.1 * scale).round() as i64));
        }
        for (i, p) in pts.iter().enumerate().skip(2) {
            let q = map(*p);
            vs.push((names[i].clone(), (q.0 * scale).round() as i64, (q.1 * scale).round() as i64));
        }
        let mut es: Vec<(&str, &str)> = vec![("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c"), ("b", "d")];
        for &(i, j) in &inner {
            es.push((names[i].as_str(), names[j].as_str()));
        }
        let vi: Vec<(&str, i64, i64)> = vs.iter().map(|(n, x, y)| (n.as_str(), *x, *y)).collect();
        drawing_from_ints(&vi, &es).unwrap()
    };
    let jitter: Vec<P> = (0..pts.len()).map(|_| (rng.gen_range(-0.004..0.004), rng.gen_range(-0.004..0.004))).collect();
    let a = build(outer_a, &|p| p);
    let b = build(outer_b, &|p| {
        let i = pts.iter().position(|q| *q == p).unwrap();
        let q = affine(src, dst, p);
        (q.0 + jitter[i].0, q.1 + jitter[i].1)
    });
    if !kitemorph::validate_drawing(&b).is_empty() || !topologically_equivalent(&a, &b).ok()?.equivalent {
        return None;
    }
    Some((a, b))
}

#[test]
fn random_single_pieces_morph_validly() {
    let mut tried = 0;
    let mut multi_block = 0;
    for seed in 0..40 {
        let Some((a, b)) = random_piece_pair(seed, 3 + (seed as usize % 8)) else { continue };
        tried += 1;
        let (m, t) = morph_traced(&a, &b).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        multi_block += t.pieces.iter().filter(|p| p.chain.blocks.len() > 1).count();
        let rep = verify_morph(&a, &b, &m, 100).unwrap();
        assert!(
            rep.ok,
            "seed {seed}: {:?} {:?} {:?}",
            rep.failed_frames().next(),
            rep.rigidity.iter().find(|r| !r.ok),
            (rep.source_error, rep.target_error)
        );
    }
    eprintln!("tried {tried}, multi-block chains {multi_block}");
    assert!(tried >= 20);
}
