//! Bloch seminorms, Bergman constants and composition-operator norm bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::domains::{norm, norm_sqr, DomainSpec, Point};
use crate::error::{LabError, Result};
use crate::estimator::{estimate_supremum, EstimateConfig, EstimateReport};
use crate::linalg::{hermitian_quadratic_solve, max_generalized_eigenvalue, C64};
use crate::maps::{HoloMap, Target};

/// How the pointwise seminorm and the distance are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// The Bergman metric of the domain.
    #[default]
    Metric,
    /// The unit-ball convention `(1−|z|²)(‖∇f‖² − |Rf|²)` with distance `atanh`.
    Zhu,
}

impl std::str::FromStr for Normalization {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metric" => Ok(Normalization::Metric),
            "zhu" => Ok(Normalization::Zhu),
            other => Err(LabError::validation(format!(
                "unknown normalization '{other}' (expected metric or zhu)"
            ))),
        }
    }
}

fn require_function_on(f: &HoloMap, spec: &DomainSpec) -> Result<()> {
    if !f.is_scalar() {
        return Err(LabError::validation("the Bloch seminorm needs a scalar function"));
    }
    if !f.domain().same_geometry(spec) {
        return Err(LabError::validation(format!(
            "function is defined on {} but the domain is {spec}",
            f.domain()
        )));
    }
    Ok(())
}

fn require_self_map_of(phi: &HoloMap, spec: &DomainSpec) -> Result<()> {
    if !phi.domain().same_geometry(spec) {
        return Err(LabError::validation(format!(
            "map is defined on {} but the domain is {spec}",
            phi.domain()
        )));
    }
    match phi.target() {
        Target::Domain(d) if d.same_geometry(spec) => Ok(()),
        _ => Err(LabError::validation(format!("map is not a self-map of {spec}"))),
    }
}

fn ball_dimension(spec: &DomainSpec) -> Result<usize> {
    match spec {
        DomainSpec::Disk => Ok(1),
        DomainSpec::Ball(n) => Ok(*n),
        other => Err(LabError::unsupported(format!(
            "the Zhu normalization is defined on the disk and the ball, not on {other}"
        ))),
    }
}

/// `Q_f(z) = sup_u |∇f(z)·u| / H_z(u,ū)^{1/2}`.
pub fn q_norm(f: &HoloMap, spec: &DomainSpec, z: &[C64]) -> Result<f64> {
    require_function_on(f, spec)?;
    let g = f.gradient(z)?;
    let m = spec.metric_matrix(z)?;
    Ok(hermitian_quadratic_solve(&m.form, &g)?.sqrt())
}

/// `((1−|z|²)(‖∇f‖² − |Rf|²))^{1/2}` with `Rf = Σ z_k ∂f/∂z_k`.
pub fn zhu_q_ball(f: &HoloMap, z: &[C64]) -> Result<f64> {
    ball_dimension(f.domain())?;
    if !f.is_scalar() {
        return Err(LabError::validation("the Bloch seminorm needs a scalar function"));
    }
    let g = f.gradient(z)?;
    let radial: C64 = z.iter().zip(&g).map(|(a, b)| a * b).sum();
    let q = (1.0 - norm_sqr(z)) * (norm_sqr(&g) - radial.norm_sqr());
    Ok(q.max(0.0).sqrt())
}

pub fn pointwise_seminorm(f: &HoloMap, spec: &DomainSpec, z: &[C64], normalization: Normalization) -> Result<f64> {
    match normalization {
        Normalization::Metric => q_norm(f, spec, z),
        Normalization::Zhu => {
            require_function_on(f, spec)?;
            zhu_q_ball(f, z)
        }
    }
}

/// Estimated `β_f = sup_z Q_f(z)`.
pub fn bloch_seminorm(f: &HoloMap, spec: &DomainSpec, config: &EstimateConfig) -> Result<EstimateReport> {
    bloch_seminorm_with(f, spec, config, Normalization::Metric)
}

pub fn bloch_seminorm_with(
    f: &HoloMap,
    spec: &DomainSpec,
    config: &EstimateConfig,
    normalization: Normalization,
) -> Result<EstimateReport> {
    require_function_on(f, spec)?;
    if normalization == Normalization::Zhu {
        ball_dimension(spec)?;
    }
    let mut report = estimate_supremum(spec, config, |z| pointwise_seminorm(f, spec, z, normalization))?;
    report.warnings.extend(f.diagnostics(&report.witness));
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochNorm {
    pub value: f64,
    pub at_origin: f64,
    pub seminorm: EstimateReport,
}

/// `‖f‖ = |f(0)| + β_f`.
pub fn bloch_norm(f: &HoloMap, spec: &DomainSpec, config: &EstimateConfig) -> Result<BlochNorm> {
    let seminorm = bloch_seminorm(f, spec, config)?;
    let at_origin = f.evaluate_scalar(&spec.origin())?.norm();
    Ok(BlochNorm {
        value: at_origin + seminorm.value,
        at_origin,
        seminorm,
    })
}

/// `sup_u H_{φ(z)}(Jφ(z)u, ·)^{1/2} / H_z(u,ū)^{1/2}`, the largest pencil eigenvalue.
pub fn local_dilation(phi: &HoloMap, spec: &DomainSpec, z: &[C64]) -> Result<f64> {
    require_self_map_of(phi, spec)?;
    let w = phi.evaluate(z)?;
    let j = phi.jacobian(z)?;
    let pulled = spec.metric_matrix(&w)?.form.congruence(&j)?;
    let base = spec.metric_matrix(z)?;
    Ok(max_generalized_eigenvalue(&pulled, &base.form)?.max(0.0).sqrt())
}

/// Estimated `B_φ = sup_z` of the local dilation.
pub fn bergman_constant(phi: &HoloMap, spec: &DomainSpec, config: &EstimateConfig) -> Result<EstimateReport> {
    require_self_map_of(phi, spec)?;
    let mut report = estimate_supremum(spec, config, |z| local_dilation(phi, spec, z))?;
    report.warnings.extend(phi.diagnostics(&report.witness));
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub ratio: f64,
    pub z: Point,
    pub w: Point,
    pub pairs: usize,
    pub seed: u64,
    pub normalization: Normalization,
}

/// Radius cap for the base point of sampled pairs.
pub const LIPSCHITZ_CAP: f64 = 0.9;

fn distance(spec: &DomainSpec, z: &[C64], w: &[C64], normalization: Normalization) -> Result<f64> {
    match normalization {
        Normalization::Metric => spec.bergman_distance(z, w),
        Normalization::Zhu => crate::domains::zhu_distance_ball(z, w, ball_dimension(spec)?),
    }
}

/// Largest `|f(z) − f(w)| / ρ(z, w)` over seeded pairs.
///
/// Base points are sampled up to [`LIPSCHITZ_CAP`]. Half of the partners are
/// displaced along a random direction, the other half along the direction that
/// extremizes the pointwise seminorm at the base point; offsets are log-uniform
/// in `[1e-4, 0.5]` and halved until the partner is interior.
pub fn lipschitz_ratio(
    f: &HoloMap,
    spec: &DomainSpec,
    pairs: usize,
    seed: u64,
    normalization: Normalization,
) -> Result<LipschitzReport> {
    require_function_on(f, spec)?;
    if pairs == 0 {
        return Err(LabError::validation("pair count must be at least 1"));
    }
    let dim = spec.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Point, Point)> = None;
    for k in 0..pairs {
        let z = spec.sample_one(&mut rng, LIPSCHITZ_CAP)?;
        let mut dir: Vec<C64> = if k % 2 == 1 {
            let g = f.gradient(&z);
            let m = spec.metric_matrix(&z)?;
            match g {
                Ok(g) => {
                    let gbar: Vec<C64> = g.iter().map(|v| v.conj()).collect();
                    m.form.matrix().solve(&gbar)?
                }
                Err(e) if e.is_singularity() => continue,
                Err(e) => return Err(e),
            }
        } else {
            (0..dim)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        };
        let len = norm(&dir);
        if len == 0.0 {
            continue;
        }
        dir.iter_mut().for_each(|v| *v /= len);
        let mut delta = (1e-4f64.ln() + rng.random::<f64>() * (0.5f64 / 1e-4).ln()).exp();
        let w = loop {
            let w: Point = z.iter().zip(&dir).map(|(a, d)| a + d * delta).collect();
            if spec.contains(&w)?.0 {
                break Some(w);
            }
            delta *= 0.5;
            if delta < 1e-12 {
                break None;
            }
        };
        let Some(w) = w else { continue };
        let (fz, fw) = match (f.evaluate_scalar(&z), f.evaluate_scalar(&w)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) if e.is_singularity() => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let rho = distance(spec, &z, &w, normalization)?;
        if rho <= 0.0 {
            continue;
        }
        let ratio = (fz - fw).norm() / rho;
        if best.as_ref().is_none_or(|b| ratio > b.0) {
            best = Some((ratio, z, w));
        }
    }
    let (ratio, z, w) = best.ok_or_else(|| LabError::Estimation("no admissible pair was sampled".into()))?;
    Ok(LipschitzReport {
        ratio,
        z,
        w,
        pairs,
        seed,
        normalization,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
    /// Distance from `φ(0)` to the origin used in the bounds.
    pub rho: f64,
    pub phi_at_origin: Point,
    pub bergman: EstimateReport,
    pub warnings: Vec<String>,
}

/// Two-sided bounds for the composition operator norm on the Bloch space.
///
/// On the disk and the ball `lower = max(1, ρ)` and `upper = max(1, ρ + B_φ)`
/// with `ρ = atanh‖φ(0)‖`. Elsewhere only `lower = 1` is available and `ρ` is
/// the Bergman distance, which is implemented for polydisks and products of
/// disks, balls and polydisks; Cartan factors are accepted when `φ(0) = 0`.
pub fn composition_norm_bounds(phi: &HoloMap, spec: &DomainSpec, config: &EstimateConfig) -> Result<NormBounds> {
    require_self_map_of(phi, spec)?;
    let origin = spec.origin();
    let phi0 = phi.evaluate(&origin)?;
    let mut warnings = Vec::new();
    let (rho, lower) = match spec {
        DomainSpec::Disk | DomainSpec::Ball(_) => {
            let rho = norm(&phi0).atanh();
            (rho, rho.max(1.0))
        }
        _ => {
            let rho = match spec.bergman_distance(&phi0, &origin) {
                Ok(r) => r,
                Err(LabError::Unsupported(_)) if norm(&phi0) == 0.0 => 0.0,
                Err(LabError::Unsupported(msg)) => {
                    return Err(LabError::Unsupported(format!(
                        "{msg}; norm bounds on this domain need φ(0) = 0"
                    )))
                }
                Err(e) => return Err(e),
            };
            (rho, 1.0)
        }
    };
    let bergman = bergman_constant(phi, spec, config)?;
    warnings.extend(bergman.warnings.iter().cloned());
    Ok(NormBounds {
        lower,
        upper: (rho + bergman.value).max(1.0),
        rho,
        phi_at_origin: phi0,
        bergman,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LscOptions {
    /// How many trailing sequence members enter `min β`.
    pub tail_len: usize,
    pub grid_points: usize,
    pub grid_cap: f64,
    /// Largest allowed sup-distance between the last member and the limit on the grid.
    pub convergence_tol: f64,
}

impl Default for LscOptions {
    fn default() -> Self {
        LscOptions {
            tail_len: 1,
            grid_points: 200,
            grid_cap: 0.7,
            convergence_tol: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LscReport {
    pub beta_limit: f64,
    pub tail_betas: Vec<f64>,
    pub min_tail_beta: f64,
    /// Sup over the grid of `|f_k − f|` for every member.
    pub grid_residuals: Vec<f64>,
    /// `min_tail_beta − beta_limit`; lower semicontinuity predicts it is not very negative.
    pub slack: f64,
}

/// Compares `β` of a limit with `β` of the tail of a locally uniformly convergent sequence.
pub fn lsc_check(
    sequence: &[HoloMap],
    limit: &HoloMap,
    spec: &DomainSpec,
    config: &EstimateConfig,
    options: &LscOptions,
) -> Result<LscReport> {
    if sequence.is_empty() || options.tail_len == 0 {
        return Err(LabError::validation("lsc_check needs a nonempty sequence and tail"));
    }
    let grid = spec.sample_points(options.grid_points, options.grid_cap, config.seed)?;
    let limit_vals = grid
        .iter()
        .map(|z| limit.evaluate_scalar(z))
        .collect::<Result<Vec<_>>>()?;
    let mut grid_residuals = Vec::with_capacity(sequence.len());
    for f in sequence {
        let mut r = 0.0f64;
        for (z, l) in grid.iter().zip(&limit_vals) {
            r = r.max((f.evaluate_scalar(z)? - l).norm());
        }
        grid_residuals.push(r);
    }
    let last = *grid_residuals.last().expect("nonempty");
    if last > options.convergence_tol {
        return Err(LabError::validation(format!(
            "sequence does not approach the limit on the sample grid: residual {last:.3e} exceeds {:.3e}",
            options.convergence_tol
        )));
    }
    let beta_limit = bloch_seminorm(limit, spec, config)?.value;
    let start = sequence.len().saturating_sub(options.tail_len);
    let tail_betas = sequence[start..]
        .iter()
        .map(|f| bloch_seminorm(f, spec, config).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let min_tail_beta = tail_betas.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(LscReport {
        beta_limit,
        tail_betas,
        min_tail_beta,
        grid_residuals,
        slack: min_tail_beta - beta_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::maps::disk::DiskPoint;
    use crate::rotation::RotationNumber;

    fn cfg() -> EstimateConfig {
        EstimateConfig::default().with_samples(2000)
    }

    #[test]
    fn identity_on_disk_has_unit_seminorm() {
        let f = HoloMap::expression(DomainSpec::Disk, "z1").unwrap();
        let rep = bloch_seminorm(&f, &DomainSpec::Disk, &cfg()).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-12);
        assert!(norm(&rep.witness) < 1e-6);
    }

    #[test]
    fn zhu_and_metric_differ_by_constant_on_ball() {
        let spec = DomainSpec::Ball(3);
        let f = HoloMap::expression(spec.clone(), "z1*z2 + exp(z3)/3").unwrap();
        let z = vec![c(0.1, 0.2), c(-0.3, 0.1), c(0.2, -0.4)];
        let m = q_norm(&f, &spec, &z).unwrap();
        let zh = zhu_q_ball(&f, &z).unwrap();
        assert!((m - (2.0f64 / 4.0).sqrt() * zh).abs() < 1e-13);
    }

    #[test]
    fn automorphism_dilation_is_one() {
        let phi = HoloMap::mobius_disk(DiskPoint::new(c(0.3, -0.5)).unwrap(), RotationNumber::rational(1, 5).unwrap());
        for z in [c(0.0, 0.0), c(0.7, 0.1), c(-0.2, 0.9)] {
            let d = local_dilation(&phi, &DomainSpec::Disk, &[z]).unwrap();
            assert!((d - 1.0).abs() < 1e-12, "{d}");
        }
    }

    #[test]
    fn constant_symbol_bounds() {
        let phi = HoloMap::constant(DomainSpec::Disk, vec![c(0.9, 0.0)]).unwrap();
        let b = composition_norm_bounds(&phi, &DomainSpec::Disk, &cfg()).unwrap();
        let expect = 0.5 * 19f64.ln();
        assert!((b.lower - expect).abs() < 1e-12 && (b.upper - expect).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_ratio_of_identity() {
        let f = HoloMap::expression(DomainSpec::Disk, "z1").unwrap();
        let r = lipschitz_ratio(&f, &DomainSpec::Disk, 4000, 1, Normalization::Metric).unwrap();
        assert!(r.ratio > 0.95 && r.ratio <= 1.0 + 1e-12, "{}", r.ratio);
    }

    #[test]
    fn rejects_mismatched_domain() {
        let f = HoloMap::expression(DomainSpec::Disk, "z1").unwrap();
        assert!(bloch_seminorm(&f, &DomainSpec::Ball(2), &cfg()).is_err());
        let g = HoloMap::expression(DomainSpec::Ball(2), "z1").unwrap();
        assert!(bloch_seminorm_with(&g, &DomainSpec::Ball(2), &cfg(), Normalization::Zhu).is_ok());
        let p = HoloMap::expression(DomainSpec::Polydisk(2), "z1").unwrap();
        assert!(bloch_seminorm_with(&p, &DomainSpec::Polydisk(2), &cfg(), Normalization::Zhu).is_err());
    }
}
