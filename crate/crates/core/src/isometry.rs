//! Checks for isometric composition operators on the Bloch space.
//!
//! Every check here can refute isometry or report how close the measured
//! quantities are to their required values. None of them proves isometry:
//! the decisive conditions quantify over infinite zero sequences.

use serde::Serialize;

use crate::bloch::{bergman_constant, bloch_seminorm};
use crate::domains::{norm, DomainSpec};
use crate::error::{LabError, Result};
use crate::estimator::{EstimateConfig, EstimateReport};
use crate::linalg::{c, CMatrix, HermitianForm, C64};
use crate::maps::{Blaschke, DiskPoint, HoloMap, MapKind, Target};
use crate::rotation::RotationNumber;

pub use crate::maps::thinness_products;

/// `|φ(0)|` at or below this counts as fixing the origin.
pub const ORIGIN_TOL: f64 = 1e-10;
/// Smallest Gram eigenvalue accepted as linear independence.
pub const INDEPENDENCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridConfig {
    pub points: usize,
    pub cap: f64,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            points: 200,
            cap: 0.7,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryOptions {
    /// Allowed distance of an estimated constant from its target value.
    pub tol: f64,
    /// A witness with membership margin above this counts as an interior maximum.
    pub interior_margin: f64,
    pub grid: GridConfig,
}

impl Default for IsometryOptions {
    fn default() -> Self {
        IsometryOptions {
            tol: 1e-6,
            interior_margin: 1e-4,
            grid: GridConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// No necessary condition is violated; the gaps are `1 − β̂` and `1 − B̂`.
    ConsistentWithIsometry { beta_gap: f64, bergman_gap: f64 },
    FailsNecessaryCondition { reason: String },
    AutomorphismExact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryReport {
    pub fixes_origin: bool,
    pub phi_at_origin: C64,
    pub beta_hat: f64,
    pub bergman_hat: f64,
    /// `max_k (1−|z_k|²)|φ′(z_k)|` over the zeros of a Blaschke symbol.
    pub condition_e_value: Option<f64>,
    pub derivative_profile: Vec<f64>,
    pub thinness_profile: Vec<f64>,
    /// Identity-convergence residuals along the proposed automorphism sequence.
    pub condition_g_residuals: Vec<f64>,
    pub verdict: Verdict,
    pub beta: EstimateReport,
    pub bergman: EstimateReport,
    pub warnings: Vec<String>,
}

fn interior_witness(spec: &DomainSpec, rep: &EstimateReport, margin: f64) -> Result<bool> {
    let (inside, m) = spec.contains(&rep.witness)?;
    Ok(inside && m > margin)
}

/// Runs the disk isometry checks on a self-map of the disk.
pub fn check_disk_isometry(phi: &HoloMap, config: &EstimateConfig, options: &IsometryOptions) -> Result<IsometryReport> {
    let disk = DomainSpec::Disk;
    if !phi.domain().same_geometry(&disk) || !phi.is_self_map() {
        return Err(LabError::validation("the disk isometry check needs a self-map of the disk"));
    }
    let phi0 = phi.evaluate(&[c(0.0, 0.0)])?[0];
    let fixes_origin = phi0.norm() <= ORIGIN_TOL;
    let beta = bloch_seminorm(phi, &disk, config)?;
    let bergman = bergman_constant(phi, &disk, config)?;
    let mut warnings: Vec<String> = beta.warnings.iter().chain(&bergman.warnings).cloned().collect();

    let (mut beta_hat, mut bergman_hat) = (beta.value, bergman.value);
    let (mut beta_interior, mut bergman_interior) = (
        interior_witness(&disk, &beta, options.interior_margin)?,
        interior_witness(&disk, &bergman, options.interior_margin)?,
    );
    let mut condition_e_value = None;
    let mut derivative_profile = Vec::new();
    let mut thinness_profile = Vec::new();
    let mut condition_g_residuals = Vec::new();
    if let MapKind::Blaschke(b) = phi.kind() {
        // At a zero, the seminorm density and the dilation both equal (1−|z_k|²)|B′(z_k)|.
        derivative_profile = b.derivative_profile();
        thinness_profile = thinness_products(b.zeros())?;
        if let Some(e) = derivative_profile.iter().copied().reduce(f64::max) {
            condition_e_value = Some(e);
            if e > beta_hat {
                beta_hat = e;
                beta_interior = true;
            }
            if e > bergman_hat {
                bergman_hat = e;
                bergman_interior = true;
            }
        }
        if b.degree() > 0 {
            let autos = propose_unit_disk_automorphism_sequence(b)?;
            condition_g_residuals = identity_convergence_check(phi, &autos, &disk, &options.grid)?;
        }
    }

    let verdict = if !fixes_origin {
        Verdict::FailsNecessaryCondition {
            reason: format!("origin: |φ(0)| = {:.3e}", phi0.norm()),
        }
    } else if beta_hat > 1.0 + options.tol || bergman_hat > 1.0 + options.tol {
        Verdict::FailsNecessaryCondition {
            reason: format!(
                "constants exceed 1 (β̂ = {beta_hat}, B̂ = {bergman_hat}); the map is not a self-map of the disk"
            ),
        }
    } else if phi.is_automorphism() {
        Verdict::AutomorphismExact
    } else if beta_hat < 1.0 - options.tol && beta_interior {
        Verdict::FailsNecessaryCondition {
            reason: format!("beta: β̂ = {beta_hat} attained at an interior point"),
        }
    } else if bergman_hat < 1.0 - options.tol && bergman_interior {
        Verdict::FailsNecessaryCondition {
            reason: format!("bergman: B̂ = {bergman_hat} attained at an interior point"),
        }
    } else {
        if beta_hat < 1.0 - options.tol || bergman_hat < 1.0 - options.tol {
            warnings.push("estimated constants fall short of 1 but peak at the boundary".into());
        }
        Verdict::ConsistentWithIsometry {
            beta_gap: 1.0 - beta_hat,
            bergman_gap: 1.0 - bergman_hat,
        }
    };
    Ok(IsometryReport {
        fixes_origin,
        phi_at_origin: phi0,
        beta_hat,
        bergman_hat,
        condition_e_value,
        derivative_profile,
        thinness_profile,
        condition_g_residuals,
        verdict,
        beta,
        bergman,
        warnings,
    })
}

/// `S_k = M_{z_k} ∘ (γ_k ·)` with `γ_k` chosen so that `(φ∘S_k)′(0) > 0`.
///
/// `M_a(w) = (a − w)/(1 − āw)` is the involution at `a`, so `S_k(0) = z_k`.
pub fn propose_unit_disk_automorphism_sequence(phi: &Blaschke) -> Result<Vec<HoloMap>> {
    if phi.degree() == 0 {
        return Err(LabError::validation("the Blaschke product has no zeros"));
    }
    Ok(phi
        .zeros()
        .iter()
        .map(|z| {
            let (_, db) = phi.eval_with_derivative(z);
            let d = -db * z.one_minus_mod_sq();
            let gamma = if d.norm() > 0.0 { d.conj() / d.norm() } else { c(1.0, 0.0) };
            // Rotate by the stored angle so S_k⁻¹ sends z_k exactly to 0 near the boundary.
            let rotation = RotationNumber::from_phase(gamma);
            HoloMap::mobius_disk(z.rotate(-rotation.angle()), rotation)
        })
        .collect())
}

/// `max_z ‖φ(S_k(z)) − z‖` over a seeded grid, one value per automorphism.
pub fn identity_convergence_check(
    phi: &HoloMap,
    autos: &[HoloMap],
    spec: &DomainSpec,
    grid: &GridConfig,
) -> Result<Vec<f64>> {
    let points = spec.sample_points(grid.points, grid.cap, grid.seed)?;
    autos
        .iter()
        .enumerate()
        .map(|(k, s)| {
            if !s.is_automorphism() || !s.is_self_map() || !s.domain().same_geometry(spec) {
                return Err(LabError::validation(format!(
                    "entry {} of the sequence is not an automorphism of {spec}",
                    k + 1
                )));
            }
            let composed = HoloMap::compose(phi, s)?;
            let mut worst = 0.0f64;
            for z in &points {
                let w = composed.evaluate(z)?;
                let diff: Vec<C64> = w.iter().zip(z).map(|(a, b)| a - b).collect();
                worst = worst.max(norm(&diff));
            }
            Ok(worst)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub condition: &'static str,
    pub subject: String,
    pub status: CheckStatus,
    pub value: f64,
    pub target: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessaryConditionsReport {
    pub checks: Vec<ConditionCheck>,
    pub overall: CheckStatus,
}

impl NecessaryConditionsReport {
    pub fn status_of(&self, condition: &str) -> CheckStatus {
        overall(self.checks.iter().filter(|c| c.condition == condition))
    }
}

fn overall<'a>(checks: impl Iterator<Item = &'a ConditionCheck>) -> CheckStatus {
    let mut out = CheckStatus::Pass;
    for ch in checks {
        match ch.status {
            CheckStatus::Fail => return CheckStatus::Fail,
            CheckStatus::Inconclusive => out = CheckStatus::Inconclusive,
            CheckStatus::Pass => {}
        }
    }
    out
}

fn seminorm_check(
    condition: &'static str,
    subject: String,
    component: &HoloMap,
    spec: &DomainSpec,
    target: f64,
    config: &EstimateConfig,
    options: &IsometryOptions,
) -> Result<ConditionCheck> {
    let rep = bloch_seminorm(component, spec, config)?;
    let gap = target - rep.value;
    let (status, detail) = if rep.value > target + options.tol {
        (CheckStatus::Fail, format!("estimate exceeds the constant by {:.3e}", -gap))
    } else if gap <= options.tol {
        (CheckStatus::Pass, format!("within {:.1e} of the constant", options.tol))
    } else if interior_witness(spec, &rep, options.interior_margin)? {
        (CheckStatus::Fail, format!("falls short by {gap:.3e} at an interior maximum"))
    } else {
        (
            CheckStatus::Inconclusive,
            format!("falls short by {gap:.3e}; the supremum is approached at the boundary"),
        )
    };
    Ok(ConditionCheck {
        condition,
        subject,
        status,
        value: rep.value,
        target: Some(target),
        detail,
    })
}

/// Necessary conditions for `C_φ` to be an isometry when `φ` is a self-map of
/// a product of bounded symmetric domains: `φ(0) = 0`, linearly independent
/// components, component seminorms equal to the Bloch constant of their
/// factor, and on Lie-ball factors the same for `φ_r ± iφ_s`.
pub fn check_necessary_conditions(
    phi: &HoloMap,
    spec: &DomainSpec,
    config: &EstimateConfig,
    options: &IsometryOptions,
) -> Result<NecessaryConditionsReport> {
    spec.validate()?;
    match phi.target() {
        Target::Domain(t) if t.same_geometry(spec) && phi.domain().same_geometry(spec) => {}
        _ => return Err(LabError::validation(format!("the map is not a self-map of {spec}"))),
    }
    let mut checks = Vec::new();

    let phi0 = phi.evaluate(&spec.origin())?;
    let dev = norm(&phi0);
    checks.push(ConditionCheck {
        condition: "origin",
        subject: "φ(0)".into(),
        status: if dev <= ORIGIN_TOL { CheckStatus::Pass } else { CheckStatus::Fail },
        value: dev,
        target: Some(0.0),
        detail: format!("|φ(0)| = {dev:.3e}"),
    });

    let dim = spec.dimension();
    let points = spec.sample_points(2 * dim, 0.9, config.seed)?;
    let mut values = CMatrix::zeros(points.len(), dim);
    for (p, z) in points.iter().enumerate() {
        for (j, v) in phi.evaluate(z)?.into_iter().enumerate() {
            values[(p, j)] = v;
        }
    }
    let gram = HermitianForm::symmetrized(&values.adjoint().mul(&values)?);
    let smallest = gram.eigenvalues().first().copied().unwrap_or(0.0);
    checks.push(ConditionCheck {
        condition: "independence",
        subject: format!("Gram matrix of {dim} components on {} points", points.len()),
        status: if smallest > INDEPENDENCE_TOL { CheckStatus::Pass } else { CheckStatus::Fail },
        value: smallest,
        target: None,
        detail: format!("smallest eigenvalue {smallest:.3e} against threshold {INDEPENDENCE_TOL:.0e}"),
    });

    for (factor, off) in spec.factors() {
        let target = factor.bloch_constant();
        let n = factor.dimension();
        if matches!(factor, DomainSpec::CartanIV(_)) {
            for r in off..off + n {
                for s in r + 1..off + n {
                    for plus in [true, false] {
                        let proj = HoloMap::modified_projection(spec.clone(), r, s, plus)?;
                        let comp = HoloMap::compose(&proj, phi)?;
                        let sign = if plus { '+' } else { '-' };
                        checks.push(seminorm_check(
                            "modified_component_seminorm",
                            format!("φ{} {sign} iφ{}", r + 1, s + 1),
                            &comp,
                            spec,
                            target,
                            config,
                            options,
                        )?);
                    }
                }
            }
        } else {
            for j in off..off + n {
                let comp = HoloMap::compose(&HoloMap::projection(spec.clone(), j)?, phi)?;
                checks.push(seminorm_check(
                    "component_seminorm",
                    format!("φ{}", j + 1),
                    &comp,
                    spec,
                    target,
                    config,
                    options,
                )?);
            }
        }
    }
    let overall = overall(checks.iter());
    Ok(NecessaryConditionsReport { checks, overall })
}

/// Thin zeros `1 − e^{−2^k}`, `k = 1..=count`, with an extra zero at the origin.
pub fn thin_blaschke_with_origin(count: u32) -> Blaschke {
    let mut zeros = vec![DiskPoint::ORIGIN];
    zeros.extend(Blaschke::thin_zeros(count));
    Blaschke::new(zeros, RotationNumber::ONE)
}
