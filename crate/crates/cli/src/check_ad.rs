use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use aqec_core::lp::{solve_feasibility, write_lp};
use aqec_core::programs::{build_ad_program, AdProgramSpec};
use aqec_core::{SolverOptions, Status};
use clap::ValueEnum;

use crate::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strengthen {
    A0Floor,
    AuxIdentity,
    AuxDiag,
    All,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// JSON program spec; the individual flags are ignored when given.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Code dimension.
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 9.8e4)]
    c: f64,
    /// Damping parameters, comma-separated or repeated.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Optional valid strengthening constraints.
    #[arg(long, value_enum, value_delimiter = ',')]
    strengthen: Vec<Strengthen>,
    /// Feasibility tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Also write the program in CPLEX LP format.
    #[arg(long)]
    export_lp: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn spec_from(args: &Args) -> Result<AdProgramSpec> {
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(AdProgramSpec::from_json(&text)?);
    }
    let (Some(n), Some(m)) = (args.n, args.m) else {
        bail!("give --spec or both --n and --M");
    };
    let gammas = if args.gamma.is_empty() {
        vec![0.1, 0.05, 0.01, 0.0001]
    } else {
        args.gamma.clone()
    };
    let mut spec = AdProgramSpec::new(n, m, args.t, args.c, gammas);
    for s in &args.strengthen {
        let all = *s == Strengthen::All;
        spec.strengthen_a0_floor |= all || *s == Strengthen::A0Floor;
        spec.strengthen_aux_identity |= all || *s == Strengthen::AuxIdentity;
        spec.strengthen_aux_diag |= all || *s == Strengthen::AuxDiag;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn run(args: &Args) -> Result<ExitCode> {
    let spec = spec_from(args)?;
    let opts = args.tol.map_or_else(SolverOptions::default, SolverOptions::with_tolerance);
    let prog = build_ad_program(&spec)?;
    if let Some(path) = &args.export_lp {
        std::fs::write(path, write_lp(&prog.model)).with_context(|| format!("writing {}", path.display()))?;
    }
    let v = solve_feasibility(&prog.model, &opts)?;
    let support = v
        .certificate
        .as_ref()
        .map(|c| c.multipliers.iter().filter(|y| **y != 0.0).count());
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "spec": spec,
                "status": v.status,
                "margin": v.certificate.as_ref().map(|c| c.margin),
                "certificate_support": support,
                "certificate": v.certificate.as_ref().map(|c| &c.multipliers),
                "primal_residual": v.primal_residual,
                "iterations": v.iterations,
                "message": v.message,
            })
        ),
        Format::Csv => {
            println!("status,margin,certificate_support,primal_residual,iterations");
            println!(
                "{:?},{},{},{:e},{}",
                v.status,
                v.certificate.as_ref().map_or(String::new(), |c| format!("{:e}", c.margin)),
                support.map_or(String::new(), |s| s.to_string()),
                v.primal_residual,
                v.iterations
            );
        }
        Format::Md => bail!("markdown output is only available for table-pi"),
    }
    Ok(match v.status {
        Status::Feasible => ExitCode::SUCCESS,
        Status::Infeasible => ExitCode::from(2),
        Status::Numerical => ExitCode::from(3),
    })
}
