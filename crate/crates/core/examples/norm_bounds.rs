//! Two-sided bounds for composition operator norms on the ball.

use bloch_lab::bloch::{composition_norm_bounds, NormBounds};
use bloch_lab::domains::DomainSpec;
use bloch_lab::estimator::EstimateConfig;
use bloch_lab::linalg::{c, CMatrix};
use bloch_lab::maps::HoloMap;
use bloch_lab::Result;

pub fn run_example() -> Result<Vec<(String, NormBounds)>> {
    let ball = DomainSpec::Ball(2);
    let cfg = EstimateConfig::default().with_samples(4000);
    let symbols = [
        ("constant 0.9 e1", HoloMap::constant(ball.clone(), vec![c(0.9, 0.0), c(0.0, 0.0)])?),
        ("automorphism at (0.5, 0)", HoloMap::ball_automorphism(CMatrix::identity(2), vec![c(0.5, 0.0), c(0.0, 0.0)])?),
        (
            "contraction z/2",
            HoloMap::linear(ball.clone(), CMatrix::identity(2).scale_real(0.5))?,
        ),
    ];
    symbols
        .into_iter()
        .map(|(name, phi)| Ok((name.to_string(), composition_norm_bounds(&phi, &ball, &cfg)?)))
        .collect()
}

fn main() -> Result<()> {
    for (name, nb) in run_example()? {
        println!(
            "{name:<26} rho = {:.6}  B = {:.6}  {:.6} <= ||C_phi|| <= {:.6}",
            nb.rho, nb.bergman.value, nb.lower, nb.upper
        );
    }
    Ok(())
}
