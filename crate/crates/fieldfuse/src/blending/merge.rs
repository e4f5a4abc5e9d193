//! Merging per-field ray samples onto a shared interval partition.

/// One ray interval from a single field, carrying its composite termination
/// mass `p` and sample color.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassSample {
    pub t: f64,
    pub delta: f64,
    pub mass: f64,
    pub color: [f64; 3],
}

impl MassSample {
    pub fn end(&self) -> f64 {
        self.t + self.delta
    }
}

/// Per-field masses and colors redistributed onto one merged partition.
///
/// `mass[i][k]` and `color[i][k]` are field `i`'s contribution to merged
/// interval `k`; uncovered intervals carry zero mass.
#[derive(Debug, Clone)]
pub struct MergedSampleSet {
    /// Merged intervals as `(start, length)`, sorted, non-overlapping.
    pub intervals: Vec<(f64, f64)>,
    pub mass: Vec<Vec<f64>>,
    pub color: Vec<Vec<[f64; 3]>>,
}

impl MergedSampleSet {
    pub fn num_fields(&self) -> usize {
        self.mass.len()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total redistributed mass of one field; equals the sum of its input
    /// masses by construction.
    pub fn total_mass(&self, field: usize) -> f64 {
        self.mass[field].iter().sum()
    }
}

/// Merge the per-field sample lists onto the partition induced by the sorted
/// union of all interval endpoints.
///
/// Each input sample's mass is split across the merged intervals it spans in
/// proportion to overlap length, so per-field totals are conserved exactly
/// (the merged endpoints telescope back to the input endpoints). Merged
/// intervals covered by no field are dropped.
pub fn merge_ray_samples(inputs: &[Vec<MassSample>]) -> MergedSampleSet {
    let n_fields = inputs.len();
    let mut breakpoints: Vec<f64> = inputs
        .iter()
        .flatten()
        .flat_map(|s| [s.t, s.end()])
        .collect();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breakpoints.dedup();

    // Inputs sorted by start; propose_samples already emits them sorted, but
    // merging must not depend on that.
    let sorted: Vec<Vec<MassSample>> = inputs
        .iter()
        .map(|samples| {
            let mut s = samples.clone();
            s.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
            s
        })
        .collect();

    let mut intervals = Vec::new();
    let mut mass: Vec<Vec<f64>> = vec![Vec::new(); n_fields];
    let mut color: Vec<Vec<[f64; 3]>> = vec![Vec::new(); n_fields];

    for w in breakpoints.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        // Every merged interval lies entirely inside or outside each input
        // sample, so the midpoint decides coverage.
        let covering: Vec<Option<&MassSample>> = sorted
            .iter()
            .map(|samples| {
                let idx = samples.partition_point(|s| s.t <= mid);
                if idx == 0 {
                    return None;
                }
                let s = &samples[idx - 1];
                (mid < s.end()).then_some(s)
            })
            .collect();
        if covering.iter().all(|c| c.is_none()) {
            continue;
        }
        intervals.push((lo, hi - lo));
        for (i, c) in covering.iter().enumerate() {
            match c {
                Some(s) if s.delta > 0.0 => {
                    mass[i].push(s.mass * (hi - lo) / s.delta);
                    color[i].push(s.color);
                }
                _ => {
                    mass[i].push(0.0);
                    color[i].push([0.0; 3]);
                }
            }
        }
    }

    MergedSampleSet { intervals, mass, color }
}
