//! Experiment configuration and site sampling.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::baseline::Baseline;
use crate::delaunay::{DiscDomain, SiteSet};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::path::DEFAULT_LAMBDA;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    /// `Poisson(n)` sites.
    Poisson,
    /// Exactly `round(n)` sites.
    FixedN,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::Poisson => "poisson",
            SamplingMode::FixedN => "fixed_n",
        })
    }
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(SamplingMode::Poisson),
            "fixed_n" | "fixed" => Ok(SamplingMode::FixedN),
            _ => Err(Error::Domain(format!("unknown sampling mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathKinds {
    pub simple: bool,
    pub competitive: bool,
}

impl Default for PathKinds {
    fn default() -> Self {
        PathKinds {
            simple: true,
            competitive: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Domain area, which is also the expected number of sites.
    pub n: f64,
    pub walks: usize,
    pub seed: u64,
    pub mode: SamplingMode,
    /// Walks start at sites within this fraction of the domain radius.
    pub start_region_fraction: f64,
    /// Baselines run on the same `(z, q)` pairs. The cone walk always runs.
    pub baselines: Vec<Baseline>,
    pub paths: PathKinds,
    /// Distance from the domain boundary and from `q` below which a step is
    /// left out of the statistics. `None` means `2 sqrt(ln n)`.
    pub boundary_guard: Option<f64>,
    /// Also draw `q` from the start region.
    pub restrict_aim: bool,
    /// Boundary samples per disc for the lemma checks; 0 keeps only the
    /// analytic checks.
    pub lemma_samples: usize,
    pub lambda: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 10_000.0,
            walks: 100,
            seed: 0,
            mode: SamplingMode::FixedN,
            start_region_fraction: 0.25,
            baselines: Vec::new(),
            paths: PathKinds::default(),
            boundary_guard: None,
            restrict_aim: false,
            lemma_samples: 0,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 10.0 && self.n.is_finite()) {
            return Err(Error::Domain(format!("n must be at least 10, got {}", self.n)));
        }
        if self.walks == 0 {
            return Err(Error::Domain("need at least one walk".into()));
        }
        if !(self.start_region_fraction > 0.0 && self.start_region_fraction <= 1.0) {
            return Err(Error::Domain(format!(
                "start region fraction must be in (0, 1], got {}",
                self.start_region_fraction
            )));
        }
        if let Some(g) = self.boundary_guard {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::Domain(format!("boundary guard must be non-negative, got {g}")));
            }
        }
        if !(self.lambda >= 1.0 && self.lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be at least 1, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn guard(&self) -> f64 {
        self.boundary_guard.unwrap_or_else(|| 2.0 * self.n.ln().sqrt())
    }

    pub fn domain(&self) -> DiscDomain {
        DiscDomain::with_area(self.n)
    }

    /// Generator for stream `k` of the seed: 0 for sites, `w + 1` for walk `w`.
    pub fn stream(&self, k: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k);
        rng
    }
}

/// Uniform point in the disc of radius `r` about the origin.
pub fn uniform_in_disc<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Point2 {
    let rho = r * rng.random::<f64>().sqrt();
    let theta = TAU * rng.random::<f64>();
    Point2::new(rho * theta.cos(), rho * theta.sin())
}

pub fn sample_sites(config: &ExperimentConfig) -> Result<SiteSet> {
    config.validate()?;
    let mut rng = config.stream(0);
    let count = match config.mode {
        SamplingMode::FixedN => config.n.round() as usize,
        SamplingMode::Poisson => {
            let d = Poisson::new(config.n).map_err(|e| Error::Domain(e.to_string()))?;
            d.sample(&mut rng) as usize
        }
    };
    let domain = config.domain();
    let r = (config.n / PI).sqrt();
    let sites = (0..count).map(|_| uniform_in_disc(&mut rng, r)).collect();
    SiteSet::new(sites, domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_count_in_disc() {
        let cfg = ExperimentConfig {
            n: PI * 100.0 * 100.0,
            ..Default::default()
        };
        let s = sample_sites(&cfg).unwrap();
        assert_eq!(s.len(), 31416);
        assert!(s.points().iter().all(|p| p.norm() <= 100.0));
        assert!((s.domain().radius() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn poisson_mean_count() {
        let mut total = 0usize;
        for seed in 0..100 {
            let cfg = ExperimentConfig {
                n: 1e4,
                seed,
                mode: SamplingMode::Poisson,
                ..Default::default()
            };
            total += sample_sites(&cfg).unwrap().len();
        }
        let mean = total as f64 / 100.0;
        assert!((9800.0..=10200.0).contains(&mean), "{mean}");
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = ExperimentConfig {
            n: 500.0,
            seed: 42,
            ..Default::default()
        };
        let a = sample_sites(&cfg).unwrap();
        let b = sample_sites(&cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_sites(&ExperimentConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn radial_law_is_uniform_in_area() {
        // fraction of points within half the radius should be a quarter
        let cfg = ExperimentConfig {
            n: 40_000.0,
            ..Default::default()
        };
        let s = sample_sites(&cfg).unwrap();
        let r = s.domain().radius();
        let inner = s.points().iter().filter(|p| p.norm() < r / 2.0).count() as f64;
        assert!((inner / 40_000.0 - 0.25).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_configs() {
        let ok = ExperimentConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            ExperimentConfig { n: 5.0, ..ok.clone() },
            ExperimentConfig { walks: 0, ..ok.clone() },
            ExperimentConfig {
                start_region_fraction: 0.0,
                ..ok.clone()
            },
            ExperimentConfig {
                boundary_guard: Some(-1.0),
                ..ok.clone()
            },
            ExperimentConfig { lambda: 0.9, ..ok.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Domain(_))));
        }
        assert_eq!("fixed_n".parse::<SamplingMode>().unwrap(), SamplingMode::FixedN);
        assert!("grid".parse::<SamplingMode>().is_err());
    }
}
