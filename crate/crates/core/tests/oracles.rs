//! Frozen reference values from `fixtures/oracles.py` (numpy and mpmath).

use bloch_lab::bloch::{bloch_seminorm, composition_norm_bounds, q_norm, zhu_q_ball};
use bloch_lab::domains::DomainSpec;
use bloch_lab::estimator::EstimateConfig;
use bloch_lab::expr::Expr;
use bloch_lab::isometry::{thin_blaschke_with_origin, thinness_products};
use bloch_lab::linalg::{c, C64};
use bloch_lab::maps::{Blaschke, DiskPoint, HoloMap};
use bloch_lab::rotation::RotationNumber;
use serde::Deserialize;

#[derive(Deserialize)]
struct ShermanMorrison {
    n: usize,
    z: Vec<[f64; 2]>,
    g: Vec<[f64; 2]>,
    q_metric: f64,
    q_zhu: f64,
    ratio: f64,
}

#[derive(Deserialize)]
struct Fixtures {
    sherman_morrison: Vec<ShermanMorrison>,
    thin_products: Vec<f64>,
    thin_products_with_origin: Vec<f64>,
    z_squared_seminorm: f64,
    half_log_3: f64,
    half_log_19: f64,
}

fn fixtures() -> Fixtures {
    serde_json::from_str(include_str!("fixtures/oracle_values.json")).unwrap()
}

fn complex(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|[re, im]| c(*re, *im)).collect()
}

/// The linear function `z ↦ Σ g_j z_j`.
fn linear_function(spec: DomainSpec, g: &[C64]) -> HoloMap {
    let expr = g
        .iter()
        .enumerate()
        .map(|(j, a)| Expr::Mul(Box::new(Expr::Const(*a)), Box::new(Expr::Var(j))))
        .reduce(|a, b| Expr::Add(Box::new(a), Box::new(b)))
        .unwrap();
    HoloMap::from_expr(spec, expr)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn sherman_morrison_cases_match_both_q_routes() {
    for case in fixtures().sherman_morrison {
        let spec = DomainSpec::Ball(case.n);
        let z = complex(&case.z);
        let f = linear_function(spec.clone(), &complex(&case.g));
        let qm = q_norm(&f, &spec, &z).unwrap();
        let qz = zhu_q_ball(&f, &z).unwrap();
        assert!(rel(qm, case.q_metric) < 1e-9, "metric route {qm} vs {}", case.q_metric);
        assert!(rel(qz, case.q_zhu) < 1e-9, "zhu route {qz} vs {}", case.q_zhu);
        assert!(rel(qm / qz, case.ratio) < 1e-9);
        assert!(rel(case.ratio, (2.0 / (case.n as f64 + 1.0)).sqrt()) < 1e-12);
    }
}

#[test]
fn thin_deleted_products_match_high_precision() {
    let fx = fixtures();
    let zeros = Blaschke::thin_zeros(6);
    let d = thinness_products(&zeros).unwrap();
    for (a, b) in d.iter().zip(&fx.thin_products) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    let b = thin_blaschke_with_origin(6);
    let d = thinness_products(b.zeros()).unwrap();
    let profile = b.derivative_profile();
    assert_eq!(d.len(), fx.thin_products_with_origin.len());
    for ((a, p), want) in d.iter().zip(&profile).zip(&fx.thin_products_with_origin) {
        assert!((a - want).abs() < 1e-10, "{a} vs {want}");
        assert!((p - want).abs() < 1e-10, "profile {p} vs {want}");
    }
}

#[test]
fn z_squared_seminorm_on_the_disk() {
    let f = HoloMap::expression(DomainSpec::Disk, "z1^2").unwrap();
    let rep = bloch_seminorm(&f, &DomainSpec::Disk, &EstimateConfig::default().with_samples(4000)).unwrap();
    assert!((rep.value - fixtures().z_squared_seminorm).abs() < 1e-9);
}

#[test]
fn half_log_three_from_a_mobius_symbol() {
    let a = DiskPoint::new(c(0.5, 0.0)).unwrap();
    let phi = HoloMap::mobius_disk(a, RotationNumber::ONE);
    let nb = composition_norm_bounds(&phi, &DomainSpec::Disk, &EstimateConfig::default().with_samples(2000)).unwrap();
    assert!((nb.rho - fixtures().half_log_3).abs() < 1e-12);
    assert_eq!(nb.lower, 1.0);
}

#[test]
fn half_log_nineteen_from_a_constant_symbol() {
    let want = fixtures().half_log_19;
    let ball = DomainSpec::Ball(2);
    let phi = HoloMap::constant(ball.clone(), vec![c(0.9, 0.0), c(0.0, 0.0)]).unwrap();
    let nb = composition_norm_bounds(&phi, &ball, &EstimateConfig::default().with_samples(500)).unwrap();
    assert!((nb.lower - want).abs() < 1e-9 && (nb.upper - want).abs() < 1e-9);

    let phi = HoloMap::constant(DomainSpec::Disk, vec![c(0.0, 0.9)]).unwrap();
    let nb = composition_norm_bounds(&phi, &DomainSpec::Disk, &EstimateConfig::default().with_samples(500)).unwrap();
    assert!((nb.lower - want).abs() < 1e-9);
}
