use super::Solution;

/// Pareto dominance on minimization-form vectors.
pub fn dominates(a: &[f64; 3], b: &[f64; 3]) -> bool {
    let mut strictly = false;
    for k in 0..3 {
        if a[k] > b[k] {
            return false;
        }
        if a[k] < b[k] {
            strictly = true;
        }
    }
    strictly
}

/// Fast non-dominated sort. Returns fronts as index lists into `pop`.
///
/// Feasible members are sorted by dominance on their directed objectives.
/// Infeasible members follow in trailing fronts, one per violation count,
/// fewest violations first.
pub fn non_dominated_sort(pop: &[Solution]) -> Vec<Vec<usize>> {
    let feasible: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].is_feasible()).collect();
    let points: Vec<[f64; 3]> = feasible.iter().map(|&i| pop[i].objectives.unwrap().minimization_form()).collect();

    let n = feasible.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counts = vec![0usize; n];
    for p in 0..n {
        for q in p + 1..n {
            if dominates(&points[p], &points[q]) {
                dominated_by[p].push(q);
                counts[q] += 1;
            } else if dominates(&points[q], &points[p]) {
                dominated_by[q].push(p);
                counts[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&p| counts[p] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by[p] {
                counts[q] -= 1;
                if counts[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current.iter().map(|&p| feasible[p]).collect());
        current = next;
    }

    let mut infeasible: Vec<usize> = (0..pop.len()).filter(|&i| !pop[i].is_feasible()).collect();
    infeasible.sort_by_key(|&i| (pop[i].violations, i));
    for chunk in infeasible.chunk_by(|&a, &b| pop[a].violations == pop[b].violations) {
        fronts.push(chunk.to_vec());
    }
    fronts
}

/// Crowding distance of each point in one front.
///
/// Boundary points of every objective with a non-zero range get +inf, so
/// fronts of one or two points are entirely +inf. Objectives that are
/// constant across the front contribute nothing.
pub fn crowding_distance(points: &[[f64; 3]]) -> Vec<f64> {
    let n = points.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    #[allow(clippy::needless_range_loop)]
    for k in 0..3 {
        order.sort_by(|&a, &b| points[a][k].total_cmp(&points[b][k]).then(a.cmp(&b)));
        let lo = points[order[0]][k];
        let hi = points[order[n - 1]][k];
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let gap = points[order[w + 1]][k] - points[order[w - 1]][k];
            dist[order[w]] += gap / range;
        }
    }
    dist
}
