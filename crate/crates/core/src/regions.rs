//! Rate regions: pentagons, the block-code capacity region, the
//! variable-length outer region and its specializations, the corner curve
//! of the mixed concatenated scheme and the feedback outer bound.
//!
//! Regions are convex hulls of point clouds built from grids over input
//! distributions, closed toward the axes. All rates are in nats per use.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::channel::McChannel;
use crate::geometry::{self, Point};
use crate::infomeasures::{channel_summary, info_triple, ChannelSummary, InfoError, InfoTriple, ProductInput};

/// Tolerance used to decide that the best sum-rate pentagon reaches `C1`/`C2`.
pub const PENTAGON_TOLERANCE: f64 = 1e-4;
pub const MIN_GRID_STEPS: usize = 11;
/// Largest number of grid inputs a region computation will visit.
pub const MAX_GRID_POINTS: u128 = 10_000_000;
/// Target size of the default joint-input grid for feedback regions.
const DEFAULT_JOINT_POINTS: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("invalid region query: {0}")]
    InvalidQuery(String),
    #[error("degenerate query: r1 = 0 forces r2 = 0 (got r2 = {r2})")]
    DegenerateQuery { r2: f64 },
    #[error("the capacity region is not pentagon-shaped: best sum-rate pentagon reaches ({got1}, {got2}) instead of (C1, C2) = ({c1}, {c2}) nats")]
    NotPentagonShaped { got1: f64, got2: f64, c1: f64, c2: f64 },
    #[error("grid needs at least {MIN_GRID_STEPS} points per simplex dimension, got {0}")]
    InvalidGrid(usize),
    #[error(
        "grid of {steps} points per dimension visits {points} inputs, more than {MAX_GRID_POINTS}; use a coarser grid"
    )]
    GridTooLarge { steps: usize, points: u128 },
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// Points per simplex dimension for distribution grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputGrid {
    pub steps: usize,
}

impl InputGrid {
    pub fn new(steps: usize) -> Result<Self, RegionError> {
        if steps < MIN_GRID_STEPS {
            return Err(RegionError::InvalidGrid(steps));
        }
        Ok(InputGrid { steps })
    }

    /// 101 points for binary alphabets, coarser for larger ones.
    pub fn default_for(ch: &McChannel) -> Self {
        let n = ch.x1_size().max(ch.x2_size());
        InputGrid {
            steps: match n {
                0..=2 => 101,
                3 => 31,
                _ => 11,
            },
        }
    }

    /// Default for the joint-input simplex of a feedback region: the
    /// product-grid default, coarsened until it has about a million points.
    pub fn default_joint_for(ch: &McChannel) -> Self {
        let n = ch.x1_size() * ch.x2_size();
        let mut steps = InputGrid::default_for(ch).steps;
        while steps > MIN_GRID_STEPS && (InputGrid { steps }).simplex_points(n) > DEFAULT_JOINT_POINTS {
            steps -= 1;
        }
        InputGrid { steps }
    }

    /// Number of pmfs on `n` symbols on this grid.
    pub fn simplex_points(&self, n: usize) -> u128 {
        // C(steps - 1 + n - 1, n - 1)
        let top = (self.steps - 1) as u128;
        (1..n as u128).fold(1u128, |acc, k| acc.saturating_mul(top + k) / k)
    }

    fn check_product(&self, ch: &McChannel) -> Result<(), RegionError> {
        let points = self
            .simplex_points(ch.x1_size())
            .saturating_mul(self.simplex_points(ch.x2_size()));
        self.check_points(points)
    }

    fn check_points(&self, points: u128) -> Result<(), RegionError> {
        if points > MAX_GRID_POINTS {
            return Err(RegionError::GridTooLarge {
                steps: self.steps,
                points,
            });
        }
        Ok(())
    }

    /// All pmfs on `n` symbols whose entries are multiples of `1/(steps-1)`.
    pub fn pmfs(&self, n: usize) -> Vec<Vec<f64>> {
        let total = self.steps - 1;
        let mut out = Vec::new();
        let mut counts = vec![0usize; n];
        compositions(total, 0, &mut counts, &mut |c| {
            out.push(c.iter().map(|&k| k as f64 / total as f64).collect())
        });
        out
    }
}

fn compositions(left: usize, idx: usize, counts: &mut [usize], emit: &mut dyn FnMut(&[usize])) {
    if idx + 1 == counts.len() {
        counts[idx] = left;
        emit(counts);
        return;
    }
    for k in 0..=left {
        counts[idx] = k;
        compositions(left - k, idx + 1, counts, emit);
    }
}

/// Every product input on the grid.
pub fn product_grid(ch: &McChannel, grid: InputGrid) -> Vec<ProductInput> {
    let g1 = grid.pmfs(ch.x1_size());
    let g2 = grid.pmfs(ch.x2_size());
    g1.iter()
        .flat_map(|p1| {
            g2.iter().map(move |p2| ProductInput {
                p1: p1.clone(),
                p2: p2.clone(),
            })
        })
        .collect()
}

/// `{R1 <= i1, R2 <= i2, R1 + R2 <= i12}` in the positive quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pentagon {
    pub triple: InfoTriple,
}

/// The two corners of a pentagon's sum-rate face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PentagonCorners {
    /// `(I(X1;Y|X2), I(X2;Y))`
    pub corner_a: Point,
    /// `(I(X1;Y), I(X2;Y|X1))`
    pub corner_b: Point,
}

impl Pentagon {
    pub fn corners(&self) -> PentagonCorners {
        let t = self.triple;
        PentagonCorners {
            corner_a: (t.i1, t.i12 - t.i1),
            corner_b: (t.i12 - t.i2, t.i2),
        }
    }

    /// Dominant vertices, clamped so that degenerate triples stay inside the quadrant.
    pub fn vertices(&self) -> [Point; 2] {
        let t = self.triple;
        [
            (t.i1, (t.i12 - t.i1).clamp(0.0, t.i2)),
            ((t.i12 - t.i2).clamp(0.0, t.i1), t.i2),
        ]
    }
}

/// `r2 = s * r1`: the ratios `E[N]/E[N1]`, `E[N]/E[N2]` and `E[N1]/E[N2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionQuery {
    pub r1: f64,
    pub r2: f64,
    pub s: f64,
}

impl RegionQuery {
    pub fn new(r1: f64, r2: f64, s: f64) -> Result<Self, RegionError> {
        for (name, v) in [("r1", r1), ("r2", r2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(RegionError::InvalidQuery(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(RegionError::InvalidQuery(format!("s = {s} must be positive")));
        }
        if r1 == 0.0 {
            if r2 != 0.0 {
                return Err(RegionError::DegenerateQuery { r2 });
            }
        } else if (r2 - s * r1).abs() > 1e-9 {
            return Err(RegionError::InvalidQuery(format!(
                "s = {s} inconsistent with r2/r1 = {}",
                r2 / r1
            )));
        }
        Ok(RegionQuery { r1, r2, s })
    }

    /// Derives `s = r2 / r1`; requires `r1 > 0`.
    pub fn from_ratios(r1: f64, r2: f64) -> Result<Self, RegionError> {
        if r1 == 0.0 {
            return Err(RegionError::DegenerateQuery { r2 });
        }
        RegionQuery::new(r1, r2, r2 / r1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    RMac,
    Outer { r1: f64, r2: f64, s: f64 },
    Rectangle,
    FeedbackOuter { r1: f64, r2: f64, s: f64 },
    Eq1Curve,
}

/// Boundary of a rate region, counterclockwise from the origin.
///
/// For [`Provenance::Eq1Curve`] the region is the union of rectangles
/// dominated by the boundary points and is not convex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegion {
    pub vertices: Vec<Point>,
    pub provenance: Provenance,
}

impl RateRegion {
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        if p.0 < -tol || p.1 < -tol {
            return false;
        }
        match self.provenance {
            Provenance::Eq1Curve => self.vertices.iter().any(|v| p.0 <= v.0 + tol && p.1 <= v.1 + tol),
            _ => geometry::polygon_contains(&self.vertices, p, tol),
        }
    }

    /// Two-sided Hausdorff distance between the (convex) boundaries.
    pub fn distance(&self, other: &RateRegion) -> f64 {
        geometry::hausdorff(&self.vertices, &other.vertices)
    }

    pub fn max_r1(&self) -> f64 {
        self.vertices.iter().map(|v| v.0).fold(0.0, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.vertices.iter().map(|v| v.1).fold(0.0, f64::max)
    }

    /// Largest `a*R1 + b*R2` over the region.
    pub fn support(&self, a: f64, b: f64) -> f64 {
        self.vertices
            .iter()
            .map(|v| a * v.0 + b * v.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same region with the users exchanged.
    pub fn transposed(&self) -> RateRegion {
        let pts: Vec<Point> = self.vertices.iter().map(|&(a, b)| (b, a)).collect();
        RateRegion {
            vertices: geometry::monotone_closure(&pts),
            provenance: self.provenance,
        }
    }

    /// CSV export in bits: header `R1_bits,R2_bits`, one vertex per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R1_bits,R2_bits\n");
        for &(a, b) in &self.vertices {
            out.push_str(&format!(
                "{},{}\n",
                crate::format::fixed6(crate::format::to_bits(a)),
                crate::format::fixed6(crate::format::to_bits(b))
            ));
        }
        out
    }

    pub fn to_json(&self, query: Option<RegionQuery>) -> String {
        let bits: Vec<[f64; 2]> = self
            .vertices
            .iter()
            .map(|&(a, b)| [crate::format::to_bits(a), crate::format::to_bits(b)])
            .collect();
        let nats: Vec<[f64; 2]> = self.vertices.iter().map(|&(a, b)| [a, b]).collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "provenance": self.provenance,
            "query": query,
            "vertices_bits": bits,
            "vertices_nats": nats,
        }))
        .expect("region serializes")
    }
}

fn pentagon_cloud(triples: &[InfoTriple]) -> Vec<Point> {
    triples
        .iter()
        .flat_map(|&triple| Pentagon { triple }.vertices())
        .collect()
}

/// Triples of every product input on the grid, computed in parallel.
pub fn grid_triples(ch: &McChannel, grid: InputGrid) -> Result<Vec<InfoTriple>, RegionError> {
    grid.check_product(ch)?;
    let inputs = product_grid(ch, grid);
    let triples: Result<Vec<_>, _> = inputs.par_iter().map(|inp| info_triple(ch, inp)).collect();
    Ok(triples?)
}

/// `R_MAC`: convex hull of the union of pentagons over the product-input grid.
pub fn block_capacity_region(ch: &McChannel, grid: InputGrid) -> Result<RateRegion, RegionError> {
    let triples = grid_triples(ch, grid)?;
    Ok(RateRegion {
        vertices: geometry::monotone_closure(&pentagon_cloud(&triples)),
        provenance: Provenance::RMac,
    })
}

/// Right-hand sides of the three outer-bound inequalities, the third one
/// bounding `s*R1 + R2`.
pub fn outer_bound_constraints(triple: InfoTriple, summary: &ChannelSummary, q: RegionQuery) -> (f64, f64, f64) {
    let RegionQuery { r1, r2, s } = q;
    let (c1, c2) = (summary.c1, summary.c2);
    (
        r1 * triple.i1 + (1.0 - r1) * c1,
        r2 * triple.i2 + (1.0 - r2) * c2,
        r2 * triple.i12 + s * (1.0 - r1) * c1 + (1.0 - r2) * c2,
    )
}

fn rectangle(c1: f64, c2: f64) -> RateRegion {
    RateRegion {
        vertices: geometry::monotone_closure(&[(c1, c2)]),
        provenance: Provenance::Rectangle,
    }
}

/// `[0, C1] x [0, C2]`.
pub fn rectangle_region(summary: &ChannelSummary) -> RateRegion {
    rectangle(summary.c1, summary.c2)
}

/// Outer region for a ratio query, as the image of `R_MAC` under the
/// contraction by `r2` and shift by `(s(1-r1)C1, (1-r2)C2)` in the
/// `(s*R1, R2)` plane, then mapped back by `R1 = R1'/s`.
pub fn outer_region(ch: &McChannel, q: RegionQuery, grid: InputGrid) -> Result<RateRegion, RegionError> {
    let summary = channel_summary(ch)?;
    if q.r1 == 0.0 {
        return Ok(rectangle_region(&summary));
    }
    let rmac = block_capacity_region(ch, grid)?;
    Ok(outer_from_rmac(&rmac, &summary, q))
}

/// The affine construction of [`outer_region`] applied to a precomputed `R_MAC`.
pub fn outer_from_rmac(rmac: &RateRegion, summary: &ChannelSummary, q: RegionQuery) -> RateRegion {
    let RegionQuery { r1, r2, s } = q;
    if r1 == 0.0 {
        return rectangle_region(summary);
    }
    let shift = (s * (1.0 - r1) * summary.c1, (1.0 - r2) * summary.c2);
    let mapped: Vec<Point> = rmac
        .vertices
        .iter()
        .map(|&(a, b)| ((r2 * a + shift.0) / s, r2 * b + shift.1))
        .collect();
    RateRegion {
        vertices: geometry::monotone_closure(&mapped),
        provenance: Provenance::Outer { r1, r2, s },
    }
}

/// Membership in the outer region by pulling the point back into `R_MAC`:
/// `(1/r2)(s*R1 - s(1-r1)C1, R2 - (1-r2)C2)` must lie in `R_MAC` or be
/// dominated by one of its points.
pub fn outer_membership(rmac: &RateRegion, summary: &ChannelSummary, q: RegionQuery, p: Point, tol: f64) -> bool {
    let RegionQuery { r1, r2, s } = q;
    if p.0 < -tol || p.1 < -tol {
        return false;
    }
    if r1 == 0.0 {
        return p.0 <= summary.c1 + tol && p.1 <= summary.c2 + tol;
    }
    let back = (
        ((s * p.0 - s * (1.0 - r1) * summary.c1) / r2).max(0.0),
        ((p.1 - (1.0 - r2) * summary.c2) / r2).max(0.0),
    );
    rmac.contains(back, tol / r2)
}

/// Dominant vertices of `{R1 <= a, R2 <= b, s*R1 + R2 <= c}` in the quadrant.
fn constraint_vertices(a: f64, b: f64, c: f64, s: f64) -> [Point; 2] {
    let a = a.max(0.0);
    let b = b.max(0.0);
    let c = c.max(0.0);
    if s <= 0.0 {
        let b = b.min(c);
        return [(a, b), (a, b)];
    }
    let a = a.min(c / s);
    let b = b.min(c);
    [(a, (c - s * a).clamp(0.0, b)), (((c - b) / s).clamp(0.0, a), b)]
}

/// Outer region built directly: the three outer-bound constraints for every
/// grid input, then the hull of the union. `s = 0` is allowed here.
pub fn constraint_sweep_region(
    triples: &[InfoTriple],
    summary: &ChannelSummary,
    r1: f64,
    r2: f64,
    s: f64,
) -> RateRegion {
    let q = RegionQuery { r1, r2, s };
    let cloud: Vec<Point> = triples
        .iter()
        .flat_map(|&t| {
            let (a, b, c) = outer_bound_constraints(t, summary, q);
            constraint_vertices(a, b, c, s)
        })
        .collect();
    RateRegion {
        vertices: geometry::monotone_closure(&cloud),
        provenance: Provenance::Outer { r1, r2, s },
    }
}

/// Outer region when user 1 is always decoded first (`r1 = 1`, so `s = r2`).
pub fn r1_fixed_outer(ch: &McChannel, r2: f64, grid: InputGrid) -> Result<RateRegion, RegionError> {
    if !(0.0..=1.0).contains(&r2) {
        return Err(RegionError::InvalidQuery(format!("r2 = {r2} outside [0, 1]")));
    }
    let summary = channel_summary(ch)?;
    let triples = grid_triples(ch, grid)?;
    Ok(constraint_sweep_region(&triples, &summary, 1.0, r2, r2))
}

/// Information triple for an arbitrary joint input `p(x1, x2)` (flattened `[x1][x2]`).
pub fn joint_info_triple(ch: &McChannel, joint: &[f64]) -> InfoTriple {
    let (n1, n2, ny) = (ch.x1_size(), ch.x2_size(), ch.y_size());
    let mut py = vec![0.0; ny];
    // Unnormalized p(x2, y) and p(x1, y).
    let mut pxy2 = vec![vec![0.0; ny]; n2];
    let mut pxy1 = vec![vec![0.0; ny]; n1];
    let mut px1 = vec![0.0; n1];
    let mut px2 = vec![0.0; n2];
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            let p = joint[x1 * n2 + x2];
            px1[x1] += p;
            px2[x2] += p;
            for (y, &w) in ch.row(x1, x2).iter().enumerate() {
                py[y] += p * w;
                pxy2[x2][y] += p * w;
                pxy1[x1][y] += p * w;
            }
        }
    }
    let (mut i1, mut i2, mut i12) = (0.0, 0.0, 0.0);
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            let p = joint[x1 * n2 + x2];
            if p == 0.0 {
                continue;
            }
            for (y, &w) in ch.row(x1, x2).iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let m = p * w;
                i12 += m * (w / py[y]).ln();
                i1 += m * (w / (pxy2[x2][y] / px2[x2])).ln();
                i2 += m * (w / (pxy1[x1][y] / px1[x1])).ln();
            }
        }
    }
    InfoTriple {
        i1: i1.max(0.0),
        i2: i2.max(0.0),
        i12: i12.max(0.0),
    }
}

/// Outer bound with feedback: the same three constraints maximized over
/// joint (possibly correlated) inputs on a simplex grid, without time sharing.
/// The hull of the union is returned, which is itself an outer bound.
pub fn feedback_outer_region(ch: &McChannel, q: RegionQuery, grid: InputGrid) -> Result<RateRegion, RegionError> {
    let summary = channel_summary(ch)?;
    if q.r1 == 0.0 {
        let mut r = rectangle_region(&summary);
        r.provenance = Provenance::FeedbackOuter {
            r1: q.r1,
            r2: q.r2,
            s: q.s,
        };
        return Ok(r);
    }
    let n = ch.x1_size() * ch.x2_size();
    grid.check_points(grid.simplex_points(n))?;
    let total = grid.steps - 1;
    // Stream the joint simplex, split on the first cell's count, keeping
    // only the running hull of each part.
    let parts: Vec<Vec<Point>> = (0..=total)
        .into_par_iter()
        .map(|first| {
            let mut cloud: Vec<Point> = Vec::new();
            let mut counts = vec![0usize; n];
            counts[0] = first;
            let mut joint = vec![0.0; n];
            let mut visit = |c: &[usize]| {
                for (j, &k) in joint.iter_mut().zip(c) {
                    *j = k as f64 / total as f64;
                }
                let (a, b, c) = outer_bound_constraints(joint_info_triple(ch, &joint), &summary, q);
                cloud.extend(constraint_vertices(a, b, c, q.s));
                if cloud.len() > 1 << 16 {
                    cloud = geometry::monotone_closure(&cloud);
                }
            };
            if n == 1 {
                if first == total {
                    visit(&counts);
                }
            } else {
                compositions(total - first, 1, &mut counts, &mut visit);
            }
            geometry::monotone_closure(&cloud)
        })
        .collect();
    let cloud: Vec<Point> = parts.into_iter().flatten().collect();
    let mut r = RateRegion {
        vertices: geometry::monotone_closure(&cloud),
        provenance: Provenance::Outer {
            r1: q.r1,
            r2: q.r2,
            s: q.s,
        },
    };
    r.provenance = Provenance::FeedbackOuter {
        r1: q.r1,
        r2: q.r2,
        s: q.s,
    };
    Ok(r)
}

/// Grid input maximizing `I(X1,X2;Y)`; the first one on ties.
pub fn max_sum_rate_input(ch: &McChannel, grid: InputGrid) -> Result<(ProductInput, InfoTriple), RegionError> {
    let triples = grid_triples(ch, grid)?;
    let inputs = product_grid(ch, grid);
    let k = (1..triples.len()).fold(0, |best, k| if triples[k].i12 > triples[best].i12 { k } else { best });
    Ok((inputs[k].clone(), triples[k]))
}

/// Corners `(C1, d2)` and `(d1, C2)` of the dominant face of `R_MAC`.
///
/// Taken from the grid input maximizing `I(X1,X2;Y)`; refused unless that
/// pentagon's corners actually reach `C1` and `C2`.
pub fn region_corners(
    ch: &McChannel,
    summary: &ChannelSummary,
    grid: InputGrid,
) -> Result<PentagonCorners, RegionError> {
    let (_, best) = max_sum_rate_input(ch, grid)?;
    let corners = Pentagon { triple: best }.corners();
    let got1 = corners.corner_a.0;
    let got2 = corners.corner_b.1;
    if (got1 - summary.c1).abs() > PENTAGON_TOLERANCE || (got2 - summary.c2).abs() > PENTAGON_TOLERANCE {
        return Err(RegionError::NotPentagonShaped {
            got1,
            got2,
            c1: summary.c1,
            c2: summary.c2,
        });
    }
    Ok(corners)
}

/// Point of the corner curve for mixing weight `p`:
/// `(C1/(1+(1-p)(1-d1/C1)), C2/(1+p(1-d2/C2)))`.
pub fn eq1_point(summary: &ChannelSummary, corners: &PentagonCorners, p: f64) -> Point {
    let (c1, c2) = (summary.c1, summary.c2);
    let d1 = corners.corner_b.0;
    let d2 = corners.corner_a.1;
    let frac = |d: f64, c: f64| if c > 0.0 { 1.0 - d / c } else { 0.0 };
    (c1 / (1.0 + (1.0 - p) * frac(d1, c1)), c2 / (1.0 + p * frac(d2, c2)))
}

/// The corner curve sampled at `p_grid` evenly spaced values of `p` in `[0, 1]`.
pub fn eq1_boundary(
    summary: &ChannelSummary,
    corners: &PentagonCorners,
    p_grid: usize,
) -> Result<RateRegion, RegionError> {
    if p_grid < 2 {
        return Err(RegionError::InvalidGrid(p_grid));
    }
    let mut curve: Vec<Point> = (0..p_grid)
        .map(|k| eq1_point(summary, corners, k as f64 / (p_grid - 1) as f64))
        .collect();
    curve.reverse();
    let mut vertices = Vec::with_capacity(p_grid + 3);
    vertices.push((0.0, 0.0));
    vertices.push((curve.iter().map(|v| v.0).fold(0.0, f64::max), 0.0));
    vertices.extend(curve.iter().copied());
    vertices.push((0.0, curve.iter().map(|v| v.1).fold(0.0, f64::max)));
    Ok(RateRegion {
        vertices,
        provenance: Provenance::Eq1Curve,
    })
}

/// Receiver-side rates of the lambda-mixture of the two concatenated codes
/// built on the corners `(C1 - eps, d2)` and `(d1, C2 - eps)`.
pub fn timeshare_rates(
    summary: &ChannelSummary,
    corners: &PentagonCorners,
    lambda: f64,
    log_m1: f64,
    log_m2: f64,
    eps: f64,
) -> Point {
    let d1 = corners.corner_b.0;
    let d2 = corners.corner_a.1;
    let a1 = summary.c1 - eps;
    let a2 = summary.c2 - eps;
    let r1 = a1 / (1.0 + (1.0 - lambda) * (log_m2 / log_m1) * (a1 / a2) * (1.0 - d1 / a1));
    let r2 = a2 / (1.0 + lambda * (log_m1 / log_m2) * (a2 / a1) * (1.0 - d2 / a2));
    (r1, r2)
}

/// `ln(e * E[N]) = 1 + ln E[N]`: the entropy budget of a stopping time with mean `E[N]`.
pub fn lemma_slack(expected_length: f64) -> f64 {
    1.0 + expected_length.ln()
}
