//! Spectra of composition operators with polydisk automorphism symbols.

use bloch_lab::domains::DomainSpec;
use bloch_lab::rotation::RotationNumber;
use bloch_lab::spectrum::{eigenfunction, spectrum, Fraction, PolydiskSymbol, SpectrumResult, SymbolClass};
use bloch_lab::Result;

pub fn run_example() -> Result<Vec<(String, SpectrumResult)>> {
    let third = RotationNumber::rational(1, 3)?;
    let symbols = [
        ("rotation by 1/3 turn", PolydiskSymbol::rotation(vec![third.clone()])?),
        (
            "coordinate swap",
            PolydiskSymbol::new(vec![RotationNumber::ONE; 2], vec![1, 0], SymbolClass::Automorphism)?,
        ),
        (
            "swap after (1/3 turn, 1)",
            PolydiskSymbol::new(vec![third, RotationNumber::ONE], vec![1, 0], SymbolClass::Automorphism)?,
        ),
        (
            "half turn with swap",
            PolydiskSymbol::new(
                vec![RotationNumber::rational(1, 2)?, RotationNumber::ONE],
                vec![1, 0],
                SymbolClass::Automorphism,
            )?,
        ),
        (
            "irrational rotation",
            PolydiskSymbol::rotation(vec![RotationNumber::irrational(0.5 * (5f64.sqrt() - 1.0), "golden")?])?,
        ),
    ];
    symbols
        .into_iter()
        .map(|(name, sym)| Ok((name.to_string(), spectrum(&sym)?)))
        .collect()
}

fn main() -> Result<()> {
    for (name, res) in run_example()? {
        println!("{name}: {}", serde_json::to_string(&res).expect("serializable"));
    }
    // The half turn with swap has eigenvalue i, with eigenfunction z1 + i z2.
    let sym = PolydiskSymbol::new(
        vec![RotationNumber::rational(1, 2)?, RotationNumber::ONE],
        vec![1, 0],
        SymbolClass::Automorphism,
    )?;
    let quarter = Fraction { num: 1, den: 4 };
    if let Some(p) = eigenfunction(&sym, quarter)? {
        let pts = DomainSpec::Polydisk(2).sample_points(50, 0.9, 1)?;
        println!("eigenfunction for {quarter} turn: residual {:.2e}", p.residual(&sym, &pts)?);
    }
    Ok(())
}
