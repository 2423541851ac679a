//! Parsing, printing and differentiating holomorphic expressions.

use bloch_lab::expr::Expr;
use bloch_lab::linalg::c;
use bloch_lab::Result;

/// Each input with its printed form and the printed gradient.
pub fn run_example() -> Result<Vec<(String, String, Vec<String>)>> {
    ["z1^2*z2 - 3*i*z2", "exp(z1)/(1 - z2)", "-z1^2", "sqrt(1 + z1*z2)", "log(2 - z1)^2"]
        .into_iter()
        .map(|text| {
            let e = Expr::parse(text, 2)?;
            let grad = e.gradient(2).iter().map(ToString::to_string).collect();
            Ok((text.to_string(), e.to_string(), grad))
        })
        .collect()
}

fn main() -> Result<()> {
    let z = [c(0.2, 0.1), c(-0.3, 0.4)];
    for (input, printed, grad) in run_example()? {
        let e = Expr::parse(&input, 2)?;
        println!("{input:<20} prints as {printed:<22} f(z) = {:.6}", e.eval(&z)?);
        for (j, g) in grad.iter().enumerate() {
            println!("    d/dz{} = {g}", j + 1);
        }
    }
    Ok(())
}
