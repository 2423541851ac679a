//! Necessary conditions for isometric composition operators on product domains.

use bloch_lab::domains::DomainSpec;
use bloch_lab::estimator::EstimateConfig;
use bloch_lab::isometry::{check_necessary_conditions, CheckStatus, IsometryOptions};
use bloch_lab::maps::{DiskPoint, HoloMap};
use bloch_lab::rotation::RotationNumber;
use bloch_lab::Result;

pub fn run_example() -> Result<Vec<(String, CheckStatus)>> {
    let cfg = EstimateConfig::default().with_samples(2000);
    let opts = IsometryOptions::default();
    let poly = DomainSpec::Polydisk(2);
    let swap = HoloMap::polydisk_automorphism(
        vec![(DiskPoint::ORIGIN, RotationNumber::rational(1, 3)?); 2],
        vec![1, 0],
    )?;
    let z1 = HoloMap::projection(poly.clone(), 0)?;
    let dup = HoloMap::stack(vec![z1.clone(), z1], Some(poly.clone()))?;
    let halved = HoloMap::stack(
        vec![HoloMap::expression(poly.clone(), "z1/2")?, HoloMap::projection(poly.clone(), 1)?],
        Some(poly.clone()),
    )?;
    let lie = DomainSpec::CartanIV(5);
    let lie_id = HoloMap::identity(lie.clone())?;
    let cases = [
        ("rotation with swap on D^2", swap, &poly),
        ("(z1, z1) on D^2", dup, &poly),
        ("(z1/2, z2) on D^2", halved, &poly),
        ("identity on the Lie ball", lie_id, &lie),
    ];
    cases
        .into_iter()
        .map(|(name, phi, spec)| Ok((name.to_string(), check_necessary_conditions(&phi, spec, &cfg, &opts)?.overall)))
        .collect()
}

fn main() -> Result<()> {
    for (name, status) in run_example()? {
        println!("{name:<28} {status:?}");
    }
    Ok(())
}
