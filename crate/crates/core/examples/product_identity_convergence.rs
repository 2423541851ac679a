//! A non-rotation symbol on D x D whose compositions with automorphisms approach the identity.

use bloch_lab::bloch::bergman_constant;
use bloch_lab::estimator::EstimateConfig;
use bloch_lab::isometry::{
    identity_convergence_check, propose_unit_disk_automorphism_sequence, thin_blaschke_with_origin, GridConfig,
};
use bloch_lab::maps::HoloMap;
use bloch_lab::rotation::RotationNumber;
use bloch_lab::Result;

/// Residuals `max ‖φ(S_k z) − z‖` for k = 1..6 and the estimated Bergman constant.
pub fn run_example() -> Result<(Vec<f64>, f64)> {
    let u = HoloMap::disk_rotation(&RotationNumber::rational(1, 5)?);
    let b = thin_blaschke_with_origin(6);
    let phi = HoloMap::split_product(u.clone(), HoloMap::blaschke(b.zeros().to_vec(), RotationNumber::ONE))?;
    let spec = phi.domain().clone();
    let u_inv = u.inverse()?;
    // Skip the involution at the origin zero; the thin zeros drive the convergence.
    let autos = propose_unit_disk_automorphism_sequence(&b)?
        .into_iter()
        .skip(1)
        .map(|t| HoloMap::product(vec![u_inv.clone(), t]))
        .collect::<Result<Vec<_>>>()?;
    let grid = GridConfig {
        cap: 0.5,
        ..GridConfig::default()
    };
    let residuals = identity_convergence_check(&phi, &autos, &spec, &grid)?;
    let b_hat = bergman_constant(&phi, &spec, &EstimateConfig::default().with_samples(4000))?.value;
    Ok((residuals, b_hat))
}

fn main() -> Result<()> {
    let (residuals, b) = run_example()?;
    for (k, r) in residuals.iter().enumerate() {
        println!("k = {}  residual {r:.6e}", k + 1);
    }
    println!("Bergman constant {b:.9}");
    Ok(())
}
