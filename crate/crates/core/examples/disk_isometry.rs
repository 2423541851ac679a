//! Isometry checks for disk symbols: a rotation, a contraction and a thin Blaschke product.

use bloch_lab::domains::DomainSpec;
use bloch_lab::estimator::EstimateConfig;
use bloch_lab::isometry::{check_disk_isometry, thin_blaschke_with_origin, IsometryOptions, IsometryReport};
use bloch_lab::maps::HoloMap;
use bloch_lab::rotation::RotationNumber;
use bloch_lab::Result;

pub fn run_example() -> Result<Vec<(String, IsometryReport)>> {
    let cfg = EstimateConfig::default().with_samples(4000);
    let opts = IsometryOptions::default();
    let thin = thin_blaschke_with_origin(6);
    let symbols = [
        ("rotation by 1/7 turn", HoloMap::disk_rotation(&RotationNumber::rational(1, 7)?)),
        ("z/2", HoloMap::expression(DomainSpec::Disk, "z1/2")?.with_target(DomainSpec::Disk)?),
        ("thin Blaschke, 7 zeros", HoloMap::blaschke(thin.zeros().to_vec(), RotationNumber::ONE)),
    ];
    symbols
        .into_iter()
        .map(|(name, phi)| Ok((name.to_string(), check_disk_isometry(&phi, &cfg, &opts)?)))
        .collect()
}

fn main() -> Result<()> {
    for (name, rep) in run_example()? {
        println!("{name}");
        println!("  beta = {:.9}  B = {:.9}  verdict {:?}", rep.beta_hat, rep.bergman_hat, rep.verdict);
        if let Some(e) = rep.condition_e_value {
            println!("  sup (1-|z_k|^2)|phi'(z_k)| = {e:.15}");
            println!("  deleted products {:?}", rep.thinness_profile);
            println!("  identity residuals {:?}", rep.condition_g_residuals);
        }
    }
    Ok(())
}
