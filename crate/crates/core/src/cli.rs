//! Command-line front end. Every subcommand prints one JSON document
//! `{command, value, witness, extra, seed, config, warnings}`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bloch::{
    bergman_constant, bloch_norm, bloch_seminorm_with, composition_norm_bounds, local_dilation, Normalization,
};
use crate::domains::{zhu_distance_ball, DomainSpec, Point};
use crate::error::{LabError, Result};
use crate::estimator::{sample_plan, EstimateConfig, EstimateReport, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::isometry::{check_disk_isometry, check_necessary_conditions, IsometryOptions};
use crate::linalg::{c, C64};
use crate::maps::{HoloMap, MapDoc};
use crate::spectrum::{spectrum, PolydiskSymbol, SpectrumKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "bloch-lab", version, about = "Bergman geometry and Bloch-space composition operators")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Comma-separated radius caps, strictly increasing in (0, 1).
    #[arg(long, global = true, value_delimiter = ',', default_value = "0.5,0.9,0.99,0.999")]
    pub schedule: Vec<f64>,
    /// Allowed distance of estimated constants from their targets in isometry checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the estimator's sample points to this file as JSON.
    #[arg(long, global = true)]
    pub dump_samples: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizationArg {
    Metric,
    Zhu,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Metric => Normalization::Metric,
            NormalizationArg::Zhu => Normalization::Zhu,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Domain facts.
    Domain {
        #[command(subcommand)]
        action: DomainAction,
    },
    /// Bergman metric H_z(u, v̄) at a point.
    Metric {
        #[arg(long)]
        domain: DomainSpec,
        #[arg(long)]
        point: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: Option<String>,
    },
    /// Estimated Bloch seminorm of an expression.
    Seminorm {
        #[arg(long)]
        domain: DomainSpec,
        #[arg(long)]
        function: String,
        #[arg(long, value_enum, default_value_t = NormalizationArg::Metric)]
        normalization: NormalizationArg,
    },
    /// Local Bergman dilation of a self-map at a point (default: the origin).
    Dilation {
        #[arg(long)]
        domain: DomainSpec,
        #[arg(long)]
        map: String,
        #[arg(long)]
        point: Option<String>,
    },
    /// Estimated Bergman constant of a self-map.
    BergmanConstant {
        #[arg(long)]
        domain: DomainSpec,
        #[arg(long)]
        map: String,
    },
    /// Distance between two points.
    Distance {
        #[arg(long)]
        domain: DomainSpec,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value_t = NormalizationArg::Metric)]
        normalization: NormalizationArg,
    },
    /// Bounds for the composition operator norm.
    NormBounds {
        #[arg(long)]
        domain: DomainSpec,
        #[arg(long)]
        map: String,
    },
    /// Isometry checks for a self-map of the disk.
    IsometryCheck {
        #[arg(long)]
        domain: DomainSpec,
        #[arg(long)]
        map: String,
    },
    /// Necessary isometry conditions on products of symmetric domains.
    Neccond {
        #[arg(long)]
        domain: DomainSpec,
        #[arg(long)]
        map: String,
    },
    /// Spectrum of a polydisk symbol.
    Spectrum {
        #[arg(long)]
        symbol: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum DomainAction {
    Info { spec: DomainSpec },
}

#[derive(Serialize, Debug)]
pub struct Output {
    pub command: &'static str,
    pub value: Option<f64>,
    pub witness: Option<Point>,
    pub extra: Value,
    pub seed: u64,
    pub config: Value,
    pub warnings: Vec<String>,
}

/// Exit code and the text for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(err: &LabError) -> i32 {
    match err {
        LabError::Singularity(_) | LabError::NotPositiveDefinite { .. } | LabError::Estimation(_) => EXIT_SINGULAR,
        _ => EXIT_VALIDATION,
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => Outcome {
            code: EXIT_OK,
            stdout: render(&out, cli.run.format),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn render(out: &Output, format: Format) -> String {
    let doc = serde_json::to_value(out).expect("output serializes");
    match format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("json") + "\n",
        Format::Table => {
            let mut s = String::new();
            if let Value::Object(map) = doc {
                for (k, v) in map {
                    match v {
                        Value::Object(inner) => {
                            for (ik, iv) in inner {
                                s.push_str(&format!("{k}.{ik:<28} {iv}\n"));
                            }
                        }
                        other => s.push_str(&format!("{k:<34} {other}\n")),
                    }
                }
            }
            s
        }
    }
}

fn estimate_config(run: &RunArgs) -> Result<EstimateConfig> {
    let cfg = EstimateConfig::default()
        .with_samples(run.samples)
        .with_seed(run.seed)
        .with_schedule(run.schedule.clone());
    cfg.validate()?;
    Ok(cfg)
}

fn config_echo(run: &RunArgs) -> Value {
    json!({
        "samples": run.samples,
        "seed": run.seed,
        "schedule": run.schedule,
        "tol": run.tol,
        "format": run.format,
    })
}

/// Reads `arg` as a file when such a file exists, otherwise uses it verbatim.
fn inline_or_file(arg: &str) -> Result<String> {
    let path = std::path::Path::new(arg);
    if !arg.trim_start().starts_with(['[', '{']) && path.is_file() {
        std::fs::read_to_string(path).map_err(|e| LabError::validation(format!("cannot read {arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

/// `[re,im;re,im;...]`; a bare real is allowed for a real entry.
pub fn parse_vector(text: &str) -> Result<Point> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| LabError::validation(format!("vector must look like [re,im;re,im], got {t:?}")))?;
    if inner.trim().is_empty() {
        return Err(LabError::validation("vector must have at least one entry"));
    }
    inner
        .split(';')
        .map(|entry| {
            let parts: Vec<&str> = entry.split(',').map(str::trim).collect();
            let num = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| LabError::validation(format!("bad number {s:?} in vector")))
            };
            match parts.as_slice() {
                [re] => Ok(c(num(re)?, 0.0)),
                [re, im] => Ok(c(num(re)?, num(im)?)),
                _ => Err(LabError::validation(format!("bad vector entry {entry:?}"))),
            }
        })
        .collect()
}

fn vector_arg(arg: &str) -> Result<Point> {
    parse_vector(&inline_or_file(arg)?)
}

fn map_arg(arg: &str, domain: &DomainSpec) -> Result<HoloMap> {
    MapDoc::from_json(&inline_or_file(arg)?)?.build(domain)
}

fn dump(run: &RunArgs, spec: &DomainSpec, cfg: &EstimateConfig) -> Result<()> {
    if let Some(path) = &run.dump_samples {
        let plan = sample_plan(spec, cfg)?;
        let rows: Vec<Value> = plan
            .iter()
            .map(|(cap, z)| json!({"cap": cap.map(|i| cfg.schedule[i]), "point": z}))
            .collect();
        std::fs::write(path, serde_json::to_string(&rows).expect("json"))
            .map_err(|e| LabError::validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn estimate_extra(rep: &EstimateReport) -> Value {
    json!({
        "samples_used": rep.samples_used,
        "radius_schedule": rep.radius_schedule,
        "per_cap_best": rep.per_cap_best,
        "best_sampled": rep.best_sampled,
        "converged": rep.converged,
        "lower_bound_certified": rep.lower_bound_certified,
    })
}

fn complex_json(z: C64) -> Value {
    json!({"re": z.re, "im": z.im})
}

pub fn execute(cli: &Cli) -> Result<Output> {
    let run = &cli.run;
    let seed = run.seed;
    let config = config_echo(run);
    let out = |command, value, witness, extra, warnings| Output {
        command,
        value,
        witness,
        extra,
        seed,
        config: config.clone(),
        warnings,
    };
    match &cli.command {
        Command::Domain {
            action: DomainAction::Info { spec },
        } => {
            spec.validate()?;
            let extra = json!({
                "domain": spec.to_string(),
                "dimension": spec.dimension(),
                "rank": spec.rank(),
                "bloch_constant": spec.bloch_constant(),
                "inner_radius": spec.inner_radius()?,
            });
            Ok(out("domain info", Some(spec.bloch_constant()), None, extra, vec![]))
        }
        Command::Metric { domain, point, u, v } => {
            let z = vector_arg(point)?;
            let u = vector_arg(u)?;
            let v = match v {
                Some(v) => vector_arg(v)?,
                None => u.clone(),
            };
            let m = domain.metric_matrix(&z)?;
            let h = m.eval(&u, &v)?;
            let rows: Vec<Vec<C64>> = (0..m.form.dim()).map(|r| m.form.matrix().row(r).to_vec()).collect();
            let extra = json!({"h": complex_json(h), "matrix": rows});
            Ok(out("metric", Some(h.re), Some(z), extra, vec![]))
        }
        Command::Seminorm {
            domain,
            function,
            normalization,
        } => {
            let cfg = estimate_config(run)?;
            dump(run, domain, &cfg)?;
            let f = HoloMap::expression(domain.clone(), function)?;
            let rep = bloch_seminorm_with(&f, domain, &cfg, (*normalization).into())?;
            let mut extra = estimate_extra(&rep);
            extra["function"] = json!(function);
            extra["normalization"] = json!(Normalization::from(*normalization));
            if *normalization == NormalizationArg::Metric {
                let norm = bloch_norm(&f, domain, &cfg)?;
                extra["value_at_origin"] = json!(norm.at_origin);
                extra["bloch_norm"] = json!(norm.value);
            }
            Ok(out("seminorm", Some(rep.value), Some(rep.witness), extra, rep.warnings))
        }
        Command::Dilation { domain, map, point } => {
            let phi = map_arg(map, domain)?;
            let z = match point {
                Some(p) => vector_arg(p)?,
                None => domain.origin(),
            };
            let d = local_dilation(&phi, domain, &z)?;
            Ok(out("dilation", Some(d), Some(z.clone()), json!({}), phi.diagnostics(&z)))
        }
        Command::BergmanConstant { domain, map } => {
            let cfg = estimate_config(run)?;
            dump(run, domain, &cfg)?;
            let phi = map_arg(map, domain)?;
            let rep = bergman_constant(&phi, domain, &cfg)?;
            Ok(out(
                "bergman-constant",
                Some(rep.value),
                Some(rep.witness.clone()),
                estimate_extra(&rep),
                rep.warnings,
            ))
        }
        Command::Distance {
            domain,
            from,
            to,
            normalization,
        } => {
            let (z, w) = (vector_arg(from)?, vector_arg(to)?);
            let d = match normalization {
                NormalizationArg::Metric => domain.bergman_distance(&z, &w)?,
                NormalizationArg::Zhu => match domain {
                    DomainSpec::Disk => zhu_distance_ball(&z, &w, 1)?,
                    DomainSpec::Ball(n) => zhu_distance_ball(&z, &w, *n)?,
                    other => {
                        return Err(LabError::Unsupported(format!(
                            "the Zhu normalization is defined on the disk and the ball, not on {other}"
                        )))
                    }
                },
            };
            let extra = json!({"from": z, "to": w, "normalization": Normalization::from(*normalization)});
            Ok(out("distance", Some(d), None, extra, vec![]))
        }
        Command::NormBounds { domain, map } => {
            let cfg = estimate_config(run)?;
            dump(run, domain, &cfg)?;
            let phi = map_arg(map, domain)?;
            let b = composition_norm_bounds(&phi, domain, &cfg)?;
            let extra = json!({
                "lower": b.lower,
                "upper": b.upper,
                "rho": b.rho,
                "phi_at_origin": b.phi_at_origin,
                "bergman_constant": b.bergman.value,
                "bergman": estimate_extra(&b.bergman),
            });
            Ok(out("norm-bounds", Some(b.upper), Some(b.bergman.witness), extra, b.warnings))
        }
        Command::IsometryCheck { domain, map } => {
            if *domain != DomainSpec::Disk {
                return Err(LabError::Unsupported(format!(
                    "isometry-check runs on the disk; use neccond on {domain}"
                )));
            }
            let cfg = estimate_config(run)?;
            dump(run, domain, &cfg)?;
            let phi = map_arg(map, domain)?;
            let opts = IsometryOptions {
                tol: run.tol,
                ..IsometryOptions::default()
            };
            let rep = check_disk_isometry(&phi, &cfg, &opts)?;
            let extra = json!({
                "verdict": rep.verdict,
                "fixes_origin": rep.fixes_origin,
                "phi_at_origin": complex_json(rep.phi_at_origin),
                "beta_hat": rep.beta_hat,
                "bergman_hat": rep.bergman_hat,
                "condition_e_value": rep.condition_e_value,
                "derivative_profile": rep.derivative_profile,
                "thinness_profile": rep.thinness_profile,
                "condition_g_residuals": rep.condition_g_residuals,
            });
            Ok(out("isometry-check", Some(rep.beta_hat), Some(rep.beta.witness), extra, rep.warnings))
        }
        Command::Neccond { domain, map } => {
            let cfg = estimate_config(run)?;
            let phi = map_arg(map, domain)?;
            let opts = IsometryOptions {
                tol: run.tol,
                ..IsometryOptions::default()
            };
            let rep = check_necessary_conditions(&phi, domain, &cfg, &opts)?;
            Ok(out("neccond", None, None, serde_json::to_value(&rep).expect("json"), vec![]))
        }
        Command::Spectrum { symbol } => {
            let sym = PolydiskSymbol::from_json(&inline_or_file(symbol)?)?;
            let s = spectrum(&sym)?;
            let value = match s.kind {
                SpectrumKind::FiniteCyclicGroup { order, .. } => Some(order as f64),
                _ => None,
            };
            let warnings = s.warnings.clone();
            Ok(out("spectrum", value, None, serde_json::to_value(&s).expect("json"), warnings))
        }
    }
}
