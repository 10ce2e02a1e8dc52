use super::{minmax_scale, Anchors, MetricsError};
use crate::moo::{dominates, SolutionArchive};

/// Largest front accepted by [`hypervolume_oracle`].
pub const ORACLE_MAX_POINTS: usize = 24;

/// Hypervolume against the reference point (1, 1, 1).
pub fn hypervolume(points: &[[f64; 3]]) -> f64 {
    hypervolume_with_reference(points, [1.0; 3])
}

/// Volume of the union of boxes `[p, reference]`, by sweeping the third
/// coordinate upward and keeping a 2-D staircase of the points seen so far.
pub fn hypervolume_with_reference(points: &[[f64; 3]], reference: [f64; 3]) -> f64 {
    let mut pts: Vec<[f64; 3]> = points.iter().copied().filter(|p| (0..3).all(|k| p[k] < reference[k])).collect();
    if pts.is_empty() {
        return 0.0;
    }
    pts.sort_by(|a, b| a[2].total_cmp(&b[2]));

    // (x, y) with x ascending and y strictly descending
    let mut stairs: Vec<(f64, f64)> = Vec::new();
    let mut volume = 0.0;
    for i in 0..pts.len() {
        insert_stair(&mut stairs, pts[i][0], pts[i][1]);
        let z_next = if i + 1 < pts.len() { pts[i + 1][2] } else { reference[2] };
        let depth = z_next - pts[i][2];
        if depth > 0.0 {
            volume += depth * stair_area(&stairs, reference[0], reference[1]);
        }
    }
    volume
}

fn insert_stair(stairs: &mut Vec<(f64, f64)>, x: f64, y: f64) {
    // first stair with stair.x > x; everything before has stair.x <= x
    let pos = stairs.partition_point(|s| s.0 <= x);
    if pos > 0 && stairs[pos - 1].1 <= y {
        return;
    }
    // drop stairs the new point weakly dominates
    let mut end = pos;
    while end < stairs.len() && stairs[end].1 >= y {
        end += 1;
    }
    let mut start = pos;
    while start > 0 && stairs[start - 1].0 == x {
        start -= 1;
    }
    stairs.splice(start..end, [(x, y)]);
}

fn stair_area(stairs: &[(f64, f64)], rx: f64, ry: f64) -> f64 {
    let mut area = 0.0;
    for (j, &(x, y)) in stairs.iter().enumerate() {
        let x_next = stairs.get(j + 1).map_or(rx, |s| s.0);
        area += (x_next - x) * (ry - y);
    }
    area
}

/// Exact union volume by inclusion-exclusion over all non-empty subsets,
/// reference point (1, 1, 1). Exponential; meant as a test oracle.
pub fn hypervolume_oracle(points: &[[f64; 3]]) -> Result<f64, MetricsError> {
    if points.len() > ORACLE_MAX_POINTS {
        return Err(MetricsError::TooManyPoints { got: points.len(), max: ORACLE_MAX_POINTS });
    }
    fn visit(points: &[[f64; 3]], start: usize, corner: [f64; 3], odd: bool, total: &mut f64) {
        for i in start..points.len() {
            let c = [0, 1, 2].map(|k| corner[k].max(points[i][k]));
            let vol: f64 = c.iter().map(|v| (1.0 - v).max(0.0)).product();
            if vol == 0.0 {
                continue;
            }
            if odd {
                *total += vol;
            } else {
                *total -= vol;
            }
            visit(points, i + 1, c, !odd, total);
        }
    }
    let mut total = 0.0;
    visit(points, 0, [f64::NEG_INFINITY; 3], true, &mut total);
    Ok(total)
}

/// Non-dominated subset (first copy of duplicates kept), in input order.
pub fn non_dominated_points(points: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if dominates(q, p) || (j < i && q == p) {
                continue 'outer;
            }
        }
        out.push(*p);
    }
    out
}

/// Hypervolume of the cumulative non-dominated front after each generation,
/// scaled with fixed anchors and clamped to the unit cube.
pub fn cumulative_hypervolume(archive: &SolutionArchive, anchors: &Anchors) -> Vec<f64> {
    let Some(last) = archive.last_generation() else {
        return Vec::new();
    };
    let mut seen: Vec<[f64; 3]> = Vec::new();
    let mut out = Vec::with_capacity(last + 1);
    for g in 0..=last {
        let new: Vec<_> = archive.iter().filter(|e| e.generation == g).filter_map(|e| e.objectives).collect();
        let scaled = minmax_scale(&new, anchors).clamped();
        seen.extend(scaled);
        seen = non_dominated_points(&seen);
        out.push(hypervolume(&seen));
    }
    out
}
