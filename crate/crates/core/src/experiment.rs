//! Batch walks over one triangulation and their aggregation.
//!
//! Walk `k` draws from its own stream of the seed, and outcomes are reduced
//! in walk order, so serial and parallel runs give identical tables.

use crate::baseline::{run_baseline, Baseline};
use crate::delaunay::Triangulation;
use crate::error::{Error, Result};
use crate::geom::{angle_cdf, cone_area, Point2, HALF_ANGLE};
use crate::path::{competitive_bound, competitive_path, path_audit, simple_path};
use crate::sampling::{sample_sites, uniform_in_disc, ExperimentConfig};
use crate::stats::{ks_statistic, BaselineSummary, StatsTable};
use crate::walk::{check_step_lemmata, cone_walk, ensure_terminal_neighbor, TraceDocument};

use rand::Rng;

const AIM_ATTEMPTS: usize = 10_000;

/// A triangulation ready for walks.
#[derive(Clone, Debug)]
pub struct Instance {
    pub config: ExperimentConfig,
    pub triangulation: Triangulation,
    /// Sites eligible as walk starts.
    pub start_pool: Vec<u32>,
}

impl Instance {
    pub fn prepare(config: &ExperimentConfig) -> Result<Instance> {
        config.validate()?;
        let sites = sample_sites(config)?;
        Instance::from_triangulation(config, Triangulation::build(sites)?)
    }

    pub fn from_triangulation(config: &ExperimentConfig, triangulation: Triangulation) -> Result<Instance> {
        config.validate()?;
        let limit = config.start_region_fraction * config.domain().radius();
        let start_pool: Vec<u32> = (0..triangulation.len() as u32)
            .filter(|&v| triangulation.point(v).norm() <= limit)
            .collect();
        if start_pool.is_empty() {
            return Err(Error::Domain(format!("no site within {limit} of the centre")));
        }
        Ok(Instance {
            config: config.clone(),
            triangulation,
            start_pool,
        })
    }

    /// Start site and aim of walk `k`.
    pub fn endpoints(&self, k: usize) -> Result<(u32, Point2)> {
        let mut rng = self.config.stream(k as u64 + 1);
        let z = self.start_pool[rng.random_range(0..self.start_pool.len())];
        let mut r = self.config.domain().radius();
        if self.config.restrict_aim {
            r *= self.config.start_region_fraction;
        }
        for _ in 0..AIM_ATTEMPTS {
            let q = uniform_in_disc(&mut rng, r);
            if self.triangulation.hull_contains(q) {
                return Ok((z, q));
            }
        }
        Err(Error::Domain(format!("walk {k}: no aim inside the hull after {AIM_ATTEMPTS} draws")))
    }
}

/// Sums over the interior steps of one walk.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepSums {
    pub steps: usize,
    pub interior: usize,
    pub radius: f64,
    pub intermediates: usize,
    pub extra_vertices: usize,
    pub simple_length: f64,
    pub competitive_length: f64,
    pub progress: f64,
}

impl StepSums {
    fn add(&mut self, o: &StepSums) {
        self.steps += o.steps;
        self.interior += o.interior;
        self.radius += o.radius;
        self.intermediates += o.intermediates;
        self.extra_vertices += o.extra_vertices;
        self.simple_length += o.simple_length;
        self.competitive_length += o.competitive_length;
        self.progress += o.progress;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineRun {
    pub algorithm: Baseline,
    pub hops: usize,
    pub length: f64,
    pub terminated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkOutcome {
    pub walk_id: usize,
    pub start: u32,
    pub aim: Point2,
    pub l0: f64,
    pub kappa: usize,
    pub visited: usize,
    pub accessed: usize,
    pub terminal: u32,
    pub terminal_fallback: bool,
    pub simple_length: Option<f64>,
    pub competitive_length: Option<f64>,
    pub competitive_stretch: Option<f64>,
    pub audit_failures: usize,
    pub sums: StepSums,
    /// `(R_i, alpha_i)` of interior steps.
    pub samples: Vec<(f64, f64)>,
    pub baselines: Vec<BaselineRun>,
}

pub fn run_walk(inst: &Instance, k: usize) -> Result<WalkOutcome> {
    let cfg = &inst.config;
    let t = &inst.triangulation;
    let (z, q) = inst.endpoints(k)?;
    let mut trace = cone_walk(t, z as usize, q)?;
    ensure_terminal_neighbor(t, &mut trace)?;

    let violations = check_step_lemmata(t, &trace, cfg.lemma_samples);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::Inconsistent(format!(
            "walk {k} breaks the step lemmata:\n{}\n{}",
            list.join("\n"),
            TraceDocument::from(&trace)
        )));
    }

    let mut audit_failures = 0;
    let simple = if cfg.paths.simple {
        let p = simple_path(t, &trace)?;
        audit_failures += usize::from(!path_audit(t, &p, &trace, None).passed());
        Some(p)
    } else {
        None
    };
    let competitive = if cfg.paths.competitive {
        let p = competitive_path(t, &trace, cfg.lambda)?;
        let bound = competitive_bound(p.lambda.unwrap_or(cfg.lambda));
        audit_failures += usize::from(!path_audit(t, &p, &trace, Some(bound)).passed());
        Some(p)
    } else {
        None
    };

    let guard = cfg.guard();
    let domain = cfg.domain();
    let mut sums = StepSums {
        steps: trace.kappa,
        ..Default::default()
    };
    let mut samples = Vec::new();
    for (i, s) in trace.steps.iter().enumerate() {
        let zi = t.point(s.from);
        if s.distance_to_aim < guard || domain.depth(zi) < guard {
            continue;
        }
        sums.interior += 1;
        sums.radius += s.radius;
        sums.intermediates += s.intermediates.len();
        sums.progress += s.distance_to_aim - t.point(s.stopper).dist(q);
        if let Some(p) = &simple {
            sums.extra_vertices += p.segment(i).len() - 2;
            sums.simple_length += p.segment_lengths[i];
        }
        if let Some(p) = &competitive {
            sums.competitive_length += p.segment_lengths[i];
        }
        samples.push((s.radius, s.angle));
    }

    let baselines = cfg
        .baselines
        .iter()
        .map(|&b| {
            run_baseline(t, b, z as usize, q).map(|r| BaselineRun {
                algorithm: b,
                hops: r.hop_count,
                length: r.total_length,
                terminated: r.terminated,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(WalkOutcome {
        walk_id: k,
        start: z,
        aim: q,
        l0: t.point(z).dist(q),
        kappa: trace.kappa,
        visited: trace.visited_count,
        accessed: trace.accessed_total,
        terminal: trace.terminal,
        terminal_fallback: trace.terminal_fallback,
        simple_length: simple.as_ref().map(|p| p.total_length),
        competitive_length: competitive.as_ref().map(|p| p.total_length),
        competitive_stretch: competitive.as_ref().map(|p| p.stretch),
        audit_failures,
        sums,
        samples,
        baselines,
    })
}

pub fn run_walks_serial(inst: &Instance) -> Result<Vec<WalkOutcome>> {
    (0..inst.config.walks).map(|k| run_walk(inst, k)).collect()
}

#[cfg(feature = "parallel")]
pub fn run_walks_parallel(inst: &Instance) -> Result<Vec<WalkOutcome>> {
    use rayon::prelude::*;
    (0..inst.config.walks)
        .into_par_iter()
        .map(|k| run_walk(inst, k))
        .collect()
}

/// Parallel when the `parallel` feature is on, serial otherwise.
pub fn run_walks(inst: &Instance) -> Result<Vec<WalkOutcome>> {
    #[cfg(feature = "parallel")]
    {
        run_walks_parallel(inst)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_walks_serial(inst)
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f64::NAN
    } else {
        a / b
    }
}

pub fn summarize(inst: &Instance, walks: &[WalkOutcome]) -> StatsTable {
    let cfg = &inst.config;
    let mut sums = StepSums::default();
    for w in walks {
        sums.add(&w.sums);
    }
    let m = walks.len() as f64;
    let interior = sums.interior as f64;
    let (angles, radii): (Vec<f64>, Vec<f64>) = walks
        .iter()
        .flat_map(|w| w.samples.iter().map(|&(r, a)| (a.abs().min(HALF_ANGLE), r)))
        .unzip();
    let a = cone_area();
    let baselines = cfg
        .baselines
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let runs = walks.iter().map(|w| &w.baselines[j]);
            BaselineSummary {
                algorithm: b,
                mean_hops: runs.clone().map(|r| r.hops as f64).sum::<f64>() / m,
                mean_length: runs.clone().map(|r| r.length).sum::<f64>() / m,
                all_terminated: runs.clone().all(|r| r.terminated),
            }
        })
        .collect();
    StatsTable {
        n: cfg.n,
        sites: inst.triangulation.len(),
        walks: walks.len(),
        seed: cfg.seed,
        guard: cfg.guard(),
        mean_radius: ratio(sums.radius, interior),
        mean_intermediates_per_disc: ratio(sums.intermediates as f64, interior),
        mean_extra_path_vertices: cfg.paths.simple.then(|| ratio(sums.extra_vertices as f64, interior)),
        simple_path_ratio: cfg.paths.simple.then(|| ratio(sums.simple_length, sums.progress)),
        mean_simple_step_length: cfg.paths.simple.then(|| ratio(sums.simple_length, interior)),
        competitive_path_ratio: cfg
            .paths
            .competitive
            .then(|| ratio(sums.competitive_length, sums.progress)),
        max_competitive_stretch: cfg.paths.competitive.then(|| {
            walks
                .iter()
                .filter_map(|w| w.competitive_stretch)
                .fold(0.0, f64::max)
        }),
        mean_steps_per_unit_distance: ratio(interior, sums.progress),
        mean_progress: ratio(sums.progress, interior),
        max_degree: inst.triangulation.max_degree(),
        ks_angle: ks_statistic(&angles, |x| angle_cdf(x).unwrap_or(1.0)),
        ks_radius: ks_statistic(&radii, |x| 1.0 - (-a * x * x).exp()),
        total_steps: sums.steps,
        interior_steps: sums.interior,
        mean_kappa: walks.iter().map(|w| w.kappa as f64).sum::<f64>() / m,
        mean_visited: walks.iter().map(|w| w.visited as f64).sum::<f64>() / m,
        mean_accessed: walks.iter().map(|w| w.accessed as f64).sum::<f64>() / m,
        terminal_fallbacks: walks.iter().filter(|w| w.terminal_fallback).count(),
        audit_failures: walks.iter().map(|w| w.audit_failures).sum(),
        baselines,
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub table: StatsTable,
    pub walks: Vec<WalkOutcome>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    let inst = Instance::prepare(config)?;
    let walks = run_walks(&inst)?;
    Ok(ExperimentRun {
        table: summarize(&inst, &walks),
        walks,
    })
}
