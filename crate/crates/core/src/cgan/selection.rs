use super::IterationStats;

type Key = fn(&IterationStats) -> f64;

/// Indices of snapshots worth generating from: the union of the top quartile
/// by real-batch accuracy and the bottom quartiles by discriminator loss,
/// generated-batch accuracy and generator loss.
///
/// Each quartile keeps `ceil(n / 4)` snapshots plus any tied with the last
/// one kept. Returned indices are ascending.
pub fn select_candidate_snapshots(stats: &[IterationStats]) -> Vec<usize> {
    let n = stats.len();
    if n == 0 {
        return Vec::new();
    }
    let k = n.div_ceil(4);
    let mut chosen = vec![false; n];
    let criteria: [(Key, bool); 4] =
        [(|s| s.acc_real, true), (|s| s.d_loss, false), (|s| s.acc_fake, false), (|s| s.g_loss, false)];
    for (key, highest) in criteria {
        let mut values: Vec<f64> = stats.iter().map(key).collect();
        values.sort_by(f64::total_cmp);
        let threshold = if highest { values[n - k] } else { values[k - 1] };
        for (i, s) in stats.iter().enumerate() {
            let v = key(s);
            if (highest && v >= threshold) || (!highest && v <= threshold) {
                chosen[i] = true;
            }
        }
    }
    (0..n).filter(|&i| chosen[i]).collect()
}
