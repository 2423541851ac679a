//! Seeded estimates of Bloch seminorms, with both ball normalizations.

use bloch_lab::bloch::{bloch_norm, bloch_seminorm_with, Normalization};
use bloch_lab::domains::DomainSpec;
use bloch_lab::estimator::EstimateConfig;
use bloch_lab::maps::HoloMap;
use bloch_lab::Result;

/// `(domain, function, metric β̂, Zhu β̂ when defined)`.
pub fn run_example() -> Result<Vec<(String, String, f64, Option<f64>)>> {
    let cfg = EstimateConfig::default().with_samples(4000);
    let cases = [("disk", "z1^2"), ("disk", "log(1 - z1)"), ("ball:2", "z1*z2"), ("polydisk:2", "z1*z2")];
    let mut out = Vec::new();
    for (domain, text) in cases {
        let spec: DomainSpec = domain.parse()?;
        let f = HoloMap::expression(spec.clone(), text)?;
        let metric = bloch_seminorm_with(&f, &spec, &cfg, Normalization::Metric)?;
        let zhu = match spec {
            DomainSpec::Disk | DomainSpec::Ball(_) => Some(bloch_seminorm_with(&f, &spec, &cfg, Normalization::Zhu)?.value),
            _ => None,
        };
        out.push((spec.to_string(), text.to_string(), metric.value, zhu));
    }
    Ok(out)
}

fn main() -> Result<()> {
    for (domain, f, metric, zhu) in run_example()? {
        let zhu = zhu.map_or("-".to_string(), |v| format!("{v:.9}"));
        println!("{domain:<11} {f:<12} metric {metric:.9}  zhu {zhu}");
    }
    // The supremum of log(1 - z) is only approached at the boundary; the report says so.
    let f = HoloMap::expression(DomainSpec::Disk, "1 + z1")?;
    let n = bloch_norm(&f, &DomainSpec::Disk, &EstimateConfig::default().with_samples(2000))?;
    println!("\n||1 + z|| = |f(0)| + beta = {} + {:.9} = {:.9}", n.at_origin, n.seminorm.value, n.value);
    Ok(())
}
