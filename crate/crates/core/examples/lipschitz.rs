//! Difference quotients against the Bergman distance stay below the seminorm.

use bloch_lab::bloch::{bloch_seminorm, lipschitz_ratio, Normalization};
use bloch_lab::domains::DomainSpec;
use bloch_lab::estimator::EstimateConfig;
use bloch_lab::maps::HoloMap;
use bloch_lab::Result;

/// `(function, sampled ratio, β̂)` on the unit ball of C².
pub fn run_example() -> Result<Vec<(String, f64, f64)>> {
    let ball = DomainSpec::Ball(2);
    let cfg = EstimateConfig::default().with_samples(4000);
    ["z1", "z1*z2", "exp(z1 + z2)"]
        .into_iter()
        .map(|text| {
            let f = HoloMap::expression(ball.clone(), text)?;
            let beta = bloch_seminorm(&f, &ball, &cfg)?.value;
            let lip = lipschitz_ratio(&f, &ball, 5000, 1, Normalization::Metric)?;
            Ok((text.to_string(), lip.ratio, beta))
        })
        .collect()
}

fn main() -> Result<()> {
    for (f, ratio, beta) in run_example()? {
        println!("{f:<14} max |f(z)-f(w)|/rho = {ratio:.9}  beta = {beta:.9}  share = {:.4}", ratio / beta);
    }
    Ok(())
}
