//! Kolmogorov-Smirnov distance and the experiment summary table.

use crate::baseline::Baseline;
use crate::geom::theory_constants;
use crate::path::competitive_bound;

/// `sup |F_n - F|` for the empirical distribution of `samples`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < x.len() {
        // ties: the empirical CDF jumps once over the whole run
        let mut j = i;
        while j + 1 < x.len() && x[j + 1] == x[i] {
            j += 1;
        }
        let f = cdf(x[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    d
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineSummary {
    pub algorithm: Baseline,
    pub mean_hops: f64,
    pub mean_length: f64,
    pub all_terminated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatsTable {
    pub n: f64,
    pub sites: usize,
    pub walks: usize,
    pub seed: u64,
    pub guard: f64,

    pub mean_radius: f64,
    pub mean_intermediates_per_disc: f64,
    /// Simple-Path vertices strictly between `Z_i` and `Z_{i+1}`.
    pub mean_extra_path_vertices: Option<f64>,
    /// Simple-Path length over distance gained, summed over interior steps.
    pub simple_path_ratio: Option<f64>,
    /// Mean Simple-Path length of one step.
    pub mean_simple_step_length: Option<f64>,
    pub competitive_path_ratio: Option<f64>,
    pub max_competitive_stretch: Option<f64>,
    pub mean_steps_per_unit_distance: f64,
    pub mean_progress: f64,
    pub max_degree: usize,
    pub ks_angle: f64,
    pub ks_radius: f64,

    pub total_steps: usize,
    pub interior_steps: usize,
    pub mean_kappa: f64,
    pub mean_visited: f64,
    pub mean_accessed: f64,
    pub terminal_fallbacks: usize,
    pub audit_failures: usize,
    pub baselines: Vec<BaselineSummary>,
}

/// One line of the stats CSV: name, measured value, theoretical value.
pub type StatRow = (String, f64, Option<f64>);

impl StatsTable {
    pub fn rows(&self) -> Vec<StatRow> {
        let th = theory_constants();
        let mut rows: Vec<StatRow> = vec![
            ("mean_radius".into(), self.mean_radius, Some(th.expected_radius)),
            (
                "mean_intermediates_per_disc".into(),
                self.mean_intermediates_per_disc,
                Some(th.expected_intermediates),
            ),
        ];
        if let Some(v) = self.mean_extra_path_vertices {
            rows.push(("mean_extra_path_vertices".into(), v, None));
        }
        if let Some(v) = self.simple_path_ratio {
            rows.push(("simple_path_ratio".into(), v, Some(th.path_length_const)));
        }
        if let Some(v) = self.mean_simple_step_length {
            rows.push(("mean_simple_step_length".into(), v, None));
        }
        if let Some(v) = self.competitive_path_ratio {
            rows.push(("competitive_path_ratio".into(), v, None));
        }
        if let Some(v) = self.max_competitive_stretch {
            rows.push((
                "max_competitive_stretch".into(),
                v,
                Some(competitive_bound(crate::path::DEFAULT_LAMBDA)),
            ));
        }
        rows.extend([
            (
                "mean_steps_per_unit_distance".into(),
                self.mean_steps_per_unit_distance,
                Some(1.0 / th.mean_progress),
            ),
            ("mean_progress".into(), self.mean_progress, Some(th.mean_progress)),
            ("max_degree".into(), self.max_degree as f64, None),
            ("ks_angle".into(), self.ks_angle, None),
            ("ks_radius".into(), self.ks_radius, None),
            ("total_steps".into(), self.total_steps as f64, None),
            ("interior_steps".into(), self.interior_steps as f64, None),
            ("mean_kappa".into(), self.mean_kappa, None),
            ("mean_visited".into(), self.mean_visited, None),
            ("mean_accessed".into(), self.mean_accessed, None),
            ("terminal_fallbacks".into(), self.terminal_fallbacks as f64, None),
            ("audit_failures".into(), self.audit_failures as f64, None),
        ]);
        for b in &self.baselines {
            rows.push((format!("{}_mean_hops", b.algorithm), b.mean_hops, None));
            rows.push((format!("{}_mean_length", b.algorithm), b.mean_length, None));
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Sup distance evaluated at every sample from both sides by counting.
    fn brute_ks(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
        let n = samples.len() as f64;
        samples
            .iter()
            .map(|&x| {
                let le = samples.iter().filter(|&&y| y <= x).count() as f64 / n;
                let lt = samples.iter().filter(|&&y| y < x).count() as f64 / n;
                (le - cdf(x)).abs().max((cdf(x) - lt).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn matches_counting_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in [1, 2, 10, 200] {
            let mut v: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
            v.push(v[0]);
            let f = |x: f64| x.clamp(0.0, 1.0);
            let g = |x: f64| (x * x).clamp(0.0, 1.0);
            assert!((ks_statistic(&v, f) - brute_ks(&v, f)).abs() < 1e-15);
            assert!((ks_statistic(&v, g) - brute_ks(&v, g)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_sample() {
        assert_eq!(ks_statistic(&[0.25], |x| x), 0.75);
        assert!(ks_statistic(&[], |x| x).is_nan());
    }

    #[test]
    fn large_uniform_sample_is_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_statistic(&v, |x| x) < 0.01);
        assert!(ks_statistic(&v, |x| x * x) > 0.2);
    }
}
