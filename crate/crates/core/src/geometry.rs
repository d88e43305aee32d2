//! Planar convex hulls for rate regions.

/// A rate pair `(R1, R2)`.
pub type Point = (f64, f64);

const DEDUP_TOLERANCE: f64 = 1e-9;
const COLLINEAR_TOLERANCE: f64 = 1e-12;
/// Abscissae closer than this are merged before sorting, so that round-off
/// cannot reorder points on a vertical edge.
const X_MERGE_TOLERANCE: f64 = 1e-12;

#[inline]
fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counterclockwise convex hull (Andrew's monotone chain), starting from the
/// lowest-leftmost point. Collinear and near-duplicate points are dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points
        .iter()
        .copied()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    let order = |a: &Point, b: &Point| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1));
    pts.sort_by(order);
    for i in 1..pts.len() {
        if pts[i].0 - pts[i - 1].0 <= X_MERGE_TOLERANCE {
            pts[i].0 = pts[i - 1].0;
        }
    }
    pts.sort_by(order);
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= DEDUP_TOLERANCE && (a.1 - b.1).abs() <= DEDUP_TOLERANCE);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= COLLINEAR_TOLERANCE {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= COLLINEAR_TOLERANCE {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Hull of `points` together with their projections onto both axes and the
/// origin: the smallest convex set containing every point and everything
/// it dominates in the positive quadrant.
pub fn monotone_closure(points: &[Point]) -> Vec<Point> {
    let mut cloud = Vec::with_capacity(3 * points.len() + 1);
    cloud.push((0.0, 0.0));
    for &(x, y) in points {
        let (x, y) = (x.max(0.0), y.max(0.0));
        cloud.push((x, y));
        cloud.push((x, 0.0));
        cloud.push((0.0, y));
    }
    convex_hull(&cloud)
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Whether `p` lies in the counterclockwise convex polygon, up to `tol`.
pub fn polygon_contains(poly: &[Point], p: Point, tol: f64) -> bool {
    polygon_distance(poly, p) <= tol
}

/// Euclidean distance from `p` to a counterclockwise convex polygon (0 inside).
pub fn polygon_distance(poly: &[Point], p: Point) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => ((p.0 - poly[0].0).powi(2) + (p.1 - poly[0].1).powi(2)).sqrt(),
        2 => segment_distance(p, poly[0], poly[1]),
        n => {
            let inside = (0..n).all(|i| cross(poly[i], poly[(i + 1) % n], p) >= 0.0);
            if inside {
                0.0
            } else {
                (0..n)
                    .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Two-sided Hausdorff distance between convex polygons; attained at vertices.
pub fn hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let one_way = |from: &[Point], to: &[Point]| from.iter().map(|&p| polygon_distance(to, p)).fold(0.0, f64::max);
    one_way(a, b).max(one_way(b, a))
}
