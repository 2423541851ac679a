//! Bergman metrics, Bloch constants and distances on the supported domains.

use bloch_lab::domains::DomainSpec;
use bloch_lab::linalg::c;
use bloch_lab::Result;

pub struct DomainSummary {
    pub domain: String,
    pub rank: usize,
    pub bloch_constant: f64,
    pub inner_radius: f64,
}

pub fn run_example() -> Result<Vec<DomainSummary>> {
    let domains = ["disk", "ball:3", "polydisk:2", "cartan1:3x2", "cartan2:2", "cartan3:5", "cartan4:5"];
    let mut out = Vec::new();
    for text in domains {
        let spec: DomainSpec = text.parse()?;
        out.push(DomainSummary {
            domain: spec.to_string(),
            rank: spec.rank(),
            bloch_constant: spec.bloch_constant(),
            inner_radius: spec.inner_radius()?,
        });
    }
    Ok(out)
}

fn main() -> Result<()> {
    println!("{:<14} {:>4} {:>10} {:>10}", "domain", "rank", "c_D", "r_D");
    for s in run_example()? {
        println!("{:<14} {:>4} {:>10.6} {:>10.6}", s.domain, s.rank, s.bloch_constant, s.inner_radius);
    }

    let ball = DomainSpec::Ball(2);
    let z = [c(0.3, 0.1), c(-0.2, 0.4)];
    let h = ball.metric_matrix(&z)?;
    println!("\nBall(2) metric at z = ({}, {}):", z[0], z[1]);
    println!("  H(e1, e1) = {:.6}", h.quadratic(&[c(1.0, 0.0), c(0.0, 0.0)])?);
    println!("  d(0, z)   = {:.6}", ball.bergman_distance(&ball.origin(), &z)?);
    Ok(())
}
