//! Planar convex hulls and point-to-polygon distance.

use num_complex::Complex64;
use robust::{orient2d, Coord};

fn orient(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    let pt = |z: Complex64| Coord { x: z.re, y: z.im };
    orient2d(pt(o), pt(a), pt(b))
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Extreme points of the convex hull in counter-clockwise order (Andrew's
/// monotone chain). Collinear boundary points are dropped; a degenerate hull
/// comes back as one point or the two ends of a segment.
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points
        .iter()
        .copied()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .collect();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| (*a - *b).norm() <= 1e-15 * (1.0 + b.norm()));
    if pts.len() <= 2 {
        return pts;
    }
    let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    // Nearly collinear input: sorting by a noisy coordinate would scramble
    // the chain, so return the segment between the two farthest points.
    let far = |from: Complex64| {
        pts.iter()
            .copied()
            .max_by(|x, y| (x - from).norm().total_cmp(&(y - from).norm()))
            .expect("nonempty")
    };
    let a = far(pts[0]);
    let b = far(a);
    if (b - a).norm() <= 1e-15 * scale {
        return vec![a];
    }
    let width = pts
        .iter()
        .map(|&z| cross(a, b, z).abs() / (b - a).norm())
        .fold(0.0, f64::max);
    if width <= 1e-13 * scale {
        let (lo, hi) = if (a.re, a.im) <= (b.re, b.im) { (a, b) } else { (b, a) };
        return vec![lo, hi];
    }
    // Exact orientation: a rounded cross product can misjudge near-collinear
    // triples and drop a genuine extreme point.
    let turns = |o: Complex64, a: Complex64, b: Complex64| orient(o, a, b) > 0.0;
    let mut lower: Vec<Complex64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && !turns(lower[lower.len() - 2], lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && !turns(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && (lower[0] - lower[1]).norm() <= 1e-15 * scale {
        lower.truncate(1);
    }
    lower
}

/// Distance from `z` to the closed segment `[a, b]`.
pub fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Euclidean distance from `z` to the convex polygon with CCW vertices
/// `hull` (0 inside). One or two vertices are treated as a point or segment.
pub fn polygon_distance(z: Complex64, hull: &[Complex64]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (z - hull[0]).norm(),
        2 => segment_distance(z, hull[0], hull[1]),
        n => {
            let inside = (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], z) >= 0.0);
            if inside {
                return 0.0;
            }
            (0..n)
                .map(|i| segment_distance(z, hull[i], hull[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Hull vertices plus `per_edge − 1` evenly spaced points on every edge.
pub fn densify(hull: &[Complex64], per_edge: usize) -> Vec<Complex64> {
    let n = hull.len();
    if n <= 1 || per_edge <= 1 {
        return hull.to_vec();
    }
    let edges = if n == 2 { 1 } else { n };
    let mut out = Vec::with_capacity(edges * per_edge + 1);
    for i in 0..edges {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        for k in 0..per_edge {
            out.push(a + (b - a) * (k as f64 / per_edge as f64));
        }
    }
    if n == 2 {
        out.push(hull[1]);
    }
    out
}
