//! Inverse-distance weights.

/// At or above this rate the weights become an exact one-hot assignment to
/// the closest distance. Raw powers this large underflow inconsistently, so
/// the limit behavior is implemented explicitly.
pub const GAMMA_HARD_ASSIGN: f64 = 500.0;

/// Distance below which a field is treated as coincident with the query.
const COINCIDENT: f64 = 1e-12;

/// Normalized weights `w_i` proportional to `d_i^-gamma`.
///
/// Computed as `(d_min / d_i)^gamma` before normalizing, which keeps every
/// term in (0, 1] and avoids overflow for small distances or large rates.
/// Special cases:
/// * any distance below 1e-12 splits the weight equally among the coincident
///   entries;
/// * `gamma = 0` yields exactly equal weights (the mean);
/// * `gamma >= GAMMA_HARD_ASSIGN` yields an exact one-hot on the argmin,
///   ties breaking toward the lowest index.
pub fn idw_weights(distances: &[f64], gamma: f64) -> Vec<f64> {
    debug_assert!(!distances.is_empty());
    let n = distances.len();
    let coincident: Vec<usize> = distances
        .iter()
        .enumerate()
        .filter(|(_, d)| **d < COINCIDENT)
        .map(|(i, _)| i)
        .collect();
    if !coincident.is_empty() {
        let mut w = vec![0.0; n];
        let share = 1.0 / coincident.len() as f64;
        for i in coincident {
            w[i] = share;
        }
        return w;
    }
    if gamma == 0.0 {
        return vec![1.0 / n as f64; n];
    }
    let mut argmin = 0;
    for (i, d) in distances.iter().enumerate() {
        if *d < distances[argmin] {
            argmin = i;
        }
    }
    if gamma >= GAMMA_HARD_ASSIGN {
        let mut w = vec![0.0; n];
        w[argmin] = 1.0;
        return w;
    }
    let d_min = distances[argmin];
    let mut w: Vec<f64> = distances.iter().map(|d| (d_min / d).powf(gamma)).collect();
    let total: f64 = w.iter().sum();
    for wi in &mut w {
        *wi /= total;
    }
    w
}
