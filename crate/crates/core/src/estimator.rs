//! Seeded supremum estimation over a domain.
//!
//! Points are drawn up front for each radius cap of the schedule, evaluated in
//! parallel, and the best few are refined by compass search. The reported
//! value is always the exact pointwise quantity at the reported witness, so it
//! is a certified lower bound for the supremum and nothing more.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{DomainSpec, Point};
use crate::error::{LabError, Result};
use crate::linalg::C64;

pub const DEFAULT_SAMPLES: usize = 20_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SCHEDULE: [f64; 4] = [0.5, 0.9, 0.99, 0.999];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateConfig {
    pub samples: usize,
    pub seed: u64,
    pub schedule: Vec<f64>,
    /// Number of best samples refined by local ascent.
    pub ascent_seeds: usize,
    pub ascent_step: f64,
    pub ascent_shrink: f64,
    pub ascent_min_step: f64,
    /// Poll rounds allowed per ascent run.
    pub ascent_max_rounds: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            schedule: DEFAULT_SCHEDULE.to_vec(),
            ascent_seeds: 5,
            ascent_step: 0.05,
            ascent_shrink: 0.5,
            ascent_min_step: 1e-7,
            ascent_max_rounds: 4000,
        }
    }
}

impl EstimateConfig {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(LabError::validation("samples must be at least 1"));
        }
        if self.schedule.is_empty() {
            return Err(LabError::validation("radius schedule must not be empty"));
        }
        if self.schedule.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return Err(LabError::validation(format!(
                "radius schedule entries must lie in (0, 1): {:?}",
                self.schedule
            )));
        }
        if self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::validation(format!(
                "radius schedule must be strictly increasing: {:?}",
                self.schedule
            )));
        }
        if !(self.ascent_shrink > 0.0 && self.ascent_shrink < 1.0) || !(self.ascent_step > 0.0) {
            return Err(LabError::validation("ascent step must be positive and shrink in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub value: f64,
    pub witness: Point,
    pub samples_used: usize,
    pub seed: u64,
    pub radius_schedule: Vec<f64>,
    /// Best sampled value per cap (before ascent); `None` when every sample there was singular.
    pub per_cap_best: Vec<Option<f64>>,
    /// Best sampled value before local ascent.
    pub best_sampled: f64,
    /// Ascent on the winning seed stopped on the step threshold at an interior point.
    pub converged: bool,
    pub lower_bound_certified: bool,
    pub warnings: Vec<String>,
}

/// The sample plan for `config`: the origin, then each cap's share of points.
pub fn sample_plan(spec: &DomainSpec, config: &EstimateConfig) -> Result<Vec<(Option<usize>, Point)>> {
    config.validate()?;
    spec.validate()?;
    let caps = config.schedule.len();
    let mut plan = vec![(None, spec.origin())];
    for (i, &cap) in config.schedule.iter().enumerate() {
        let share = config.samples / caps + usize::from(i < config.samples % caps);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64 + 1);
        for _ in 0..share {
            plan.push((Some(i), spec.sample_one(&mut rng, cap)?));
        }
    }
    Ok(plan)
}

fn finite_or_skip(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(e) if e.is_singularity() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Order-independent argmax: larger value wins, ties go to the lower index.
fn better(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

struct Ascent {
    point: Point,
    value: f64,
    converged: bool,
}

fn compass_ascent<F>(spec: &DomainSpec, f: &F, start: Point, start_value: f64, cfg: &EstimateConfig) -> Result<Ascent>
where
    F: Fn(&[C64]) -> Result<f64> + Sync,
{
    let dim = spec.dimension();
    let (mut x, mut fx) = (start, start_value);
    let mut step = cfg.ascent_step;
    for _ in 0..cfg.ascent_max_rounds {
        if step < cfg.ascent_min_step {
            return Ok(Ascent {
                point: x,
                value: fx,
                converged: true,
            });
        }
        // Poll +-step along the real and imaginary axis of every coordinate.
        let mut best: Option<(Point, f64)> = None;
        for k in 0..4 * dim {
            let delta = if k % 2 == 0 { step } else { -step };
            let mut y = x.clone();
            let coord = (k / 2) % dim;
            if k < 2 * dim {
                y[coord].re += delta;
            } else {
                y[coord].im += delta;
            }
            if !spec.contains(&y)?.0 {
                continue;
            }
            if let Some(v) = finite_or_skip(f(&y))? {
                if v > fx && best.as_ref().is_none_or(|b| v > b.1) {
                    best = Some((y, v));
                }
            }
        }
        match best {
            Some((y, v)) => {
                x = y;
                fx = v;
            }
            None => step *= cfg.ascent_shrink,
        }
    }
    Ok(Ascent {
        point: x,
        value: fx,
        converged: false,
    })
}

/// Estimates `sup_z f(z)` over `spec`.
///
/// Singular samples are skipped and counted; any other evaluation error aborts.
pub fn estimate_supremum<F>(spec: &DomainSpec, config: &EstimateConfig, f: F) -> Result<EstimateReport>
where
    F: Fn(&[C64]) -> Result<f64> + Sync,
{
    let plan = sample_plan(spec, config)?;
    let values: Vec<Result<Option<f64>>> = plan.par_iter().map(|(_, z)| finite_or_skip(f(z))).collect();
    let values: Vec<Option<f64>> = values.into_iter().collect::<Result<_>>()?;

    let skipped = values.iter().filter(|v| v.is_none()).count();
    let mut warnings = Vec::new();
    if skipped > 0 {
        warnings.push(format!("{skipped} of {} samples skipped as singular", plan.len()));
    }
    let mut per_cap_best = vec![None::<f64>; config.schedule.len()];
    for ((cap, _), v) in plan.iter().zip(&values) {
        if let (Some(i), Some(v)) = (cap, v) {
            per_cap_best[*i] = Some(per_cap_best[*i].map_or(*v, |b: f64| b.max(*v)));
        }
    }

    let mut ranked: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .collect();
    if ranked.is_empty() {
        return Err(LabError::Estimation(format!(
            "all {} samples were singular",
            plan.len()
        )));
    }
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let best_sampled = ranked[0].1;
    let seeds: Vec<(usize, f64)> = ranked.into_iter().take(config.ascent_seeds.max(1)).collect();

    let ascents: Vec<Result<Ascent>> = seeds
        .par_iter()
        .map(|&(i, v)| compass_ascent(spec, &f, plan[i].1.clone(), v, config))
        .collect();
    let ascents: Vec<Ascent> = ascents.into_iter().collect::<Result<_>>()?;
    let winner = ascents
        .iter()
        .enumerate()
        .map(|(i, a)| (i, a.value))
        .reduce(better)
        .expect("at least one seed")
        .0;
    let Ascent { point, converged, .. } = &ascents[winner];

    let value = f(point)?;
    let (interior, _) = spec.contains(point)?;
    if !converged {
        warnings.push("local ascent stopped on its round limit".into());
    }
    Ok(EstimateReport {
        value,
        witness: point.clone(),
        samples_used: plan.len(),
        seed: config.seed,
        radius_schedule: config.schedule.clone(),
        per_cap_best,
        best_sampled,
        converged: *converged && interior,
        lower_bound_certified: interior && value.is_finite(),
        warnings,
    })
}
