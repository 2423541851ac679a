//! Local dilation and Bergman constants of self-maps.

use bloch_lab::bloch::{bergman_constant, local_dilation};
use bloch_lab::domains::DomainSpec;
use bloch_lab::estimator::EstimateConfig;
use bloch_lab::linalg::c;
use bloch_lab::maps::{DiskPoint, HoloMap};
use bloch_lab::rotation::RotationNumber;
use bloch_lab::Result;

/// Estimated Bergman constants of a disk automorphism, `z²` and the diagonal embeddings.
pub fn run_example() -> Result<Vec<(String, f64)>> {
    let cfg = EstimateConfig::default().with_samples(4000);
    let mut out = Vec::new();

    let mobius = HoloMap::mobius_disk(DiskPoint::new(c(0.4, -0.3))?, RotationNumber::rational(1, 4)?);
    out.push(("disk automorphism".into(), bergman_constant(&mobius, &DomainSpec::Disk, &cfg)?.value));

    let square = HoloMap::expression(DomainSpec::Disk, "z1^2")?.with_target(DomainSpec::Disk)?;
    out.push(("z^2 on the disk".into(), bergman_constant(&square, &DomainSpec::Disk, &cfg)?.value));

    for n in 2..=4 {
        let spec = DomainSpec::Polydisk(n);
        let diag = HoloMap::diagonal_embedding(n)?;
        out.push((format!("diagonal embedding, n = {n}"), bergman_constant(&diag, &spec, &cfg)?.value));
    }
    Ok(out)
}

fn main() -> Result<()> {
    for (name, b) in run_example()? {
        println!("{name:<26} B = {b:.9}");
    }
    let square = HoloMap::expression(DomainSpec::Disk, "z1^2")?.with_target(DomainSpec::Disk)?;
    for r in [0.0, 0.5, 0.9, 0.99] {
        println!("z^2 dilation at {r:<4}: {:.9}", local_dilation(&square, &DomainSpec::Disk, &[c(r, 0.0)])?);
    }
    Ok(())
}
