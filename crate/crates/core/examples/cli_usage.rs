//! Driving the command-line interface in-process.

use bloch_lab::cli::{run, Outcome};

pub fn run_example() -> Vec<(Vec<&'static str>, Outcome)> {
    let invocations: Vec<Vec<&'static str>> = vec![
        vec!["bloch-lab", "--format", "table", "domain", "info", "cartan4:5"],
        vec!["bloch-lab", "--samples", "2000", "seminorm", "--domain", "disk", "--function", "z1^2"],
        vec!["bloch-lab", "distance", "--domain", "ball:2", "--from", "[0,0;0,0]", "--to", "[0.5,0;0,0]"],
        vec!["bloch-lab", "spectrum", "--symbol", r#"{"lambdas":["1/3"],"class":"automorphism"}"#],
        vec!["bloch-lab", "metric", "--domain", "disk", "--point", "[1,0]", "--u", "[1,0]"],
    ];
    invocations.into_iter().map(|args| (args.clone(), run(args))).collect()
}

fn main() {
    for (args, out) in run_example() {
        println!("$ {}", args.join(" "));
        print!("{}{}", out.stdout, out.stderr);
        println!("(exit {})\n", out.code);
    }
}
