use std::process::ExitCode;

use anyhow::{bail, Result};
use aqec_core::channel::{amplitude_damping_set, pauli_kraus_set};
use aqec_core::connection::{
    build_connection, compressed_connection, compression_matrix, macwilliams_matrix, reduced_aux,
    MAX_CONNECTION_QUBITS,
};
use aqec_core::enumerator::{aqec_residuals, aux_vector, compute_enumerators, compute_sl_enumerators, pi_phi};
use aqec_core::pauli::{MAX_FULL_QUBITS, MAX_ORBIT_QUBITS};
use aqec_core::{KrausSet, QuantumCode, TOLERANCES};
use nalgebra::DVector;
use serde::Serialize;

use crate::input::load_code;
use crate::Format;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    code: String,
    /// Damping parameters for the channel checks.
    #[arg(long, default_values_t = [0.05, 0.1, 0.25])]
    gamma: Vec<f64>,
    /// Largest admissible residual.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Serialize)]
struct Check {
    identity: &'static str,
    status: &'static str,
    max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn scaled(v: Vec<f64>, s: f64) -> Vec<f64> {
    v.into_iter().map(|x| x / s).collect()
}

fn connection_residual(code: &QuantumCode, ks: &KrausSet) -> Result<f64> {
    let m = code.dimension() as f64;
    let e = compute_enumerators(code, ks)?;
    let cm = build_connection(ks)?;
    let aux = reduced_aux(aux_vector(code)?.values());
    let a = scaled(cm.m_a.mul_vec(&aux)?, m * m);
    let b = scaled(cm.m_b.mul_vec(&aux)?, m);
    Ok(max_diff(&a, &e.a).max(max_diff(&b, &e.b)))
}

fn suite(code: &QuantumCode, gammas: &[f64]) -> Result<Vec<Check>> {
    let n = code.num_qubits();
    let m = code.dimension() as f64;
    let mut gap: f64 = 0.0;
    let mut bounds: f64 = 0.0;
    for &g in gammas {
        let ks = amplitude_damping_set(n, g)?;
        let e = compute_enumerators(code, &ks)?;
        gap = gap.max(max_diff(&e.differences(), &aqec_residuals(code, &ks)?));
        for i in 0..e.len() {
            bounds = bounds.max(e.a[i] - e.b[i]).max(-e.a[i]);
        }
        bounds = bounds
            .max(e.b.iter().sum::<f64>() - 1.0)
            .max((1.0 - g).powi(n as i32) - e.a[0]);
    }
    let done = |identity, r: f64| Check {
        identity,
        status: "ok",
        max_residual: Some(r),
        note: None,
    };
    let skipped = |identity, why: String| Check {
        identity,
        status: "skipped",
        max_residual: None,
        note: Some(why),
    };
    let mut checks = vec![done("residual-gap", gap), done("enumerator-bounds", bounds.max(0.0) + 0.0)];
    if n <= MAX_CONNECTION_QUBITS {
        let mut r: f64 = 0.0;
        for &g in gammas {
            r = r.max(connection_residual(code, &amplitude_damping_set(n, g)?)?);
        }
        r = r.max(connection_residual(code, &pauli_kraus_set(n, n)?)?);
        checks.push(done("connection", r));
    } else {
        checks.push(skipped("connection", format!("needs n <= {MAX_CONNECTION_QUBITS}")));
    }
    if n <= MAX_ORBIT_QUBITS {
        let sl = compute_sl_enumerators(code)?;
        let mw = macwilliams_matrix(n, m)? * DVector::from_column_slice(&sl.a);
        checks.push(done("macwilliams", max_diff(mw.as_slice(), &sl.b)));
        if code.is_permutation_invariant(TOLERANCES.identity) {
            let phi = pi_phi(code)?;
            if n <= MAX_FULL_QUBITS {
                let lifted = compression_matrix(n)?.mul_vec(&phi)?;
                checks.push(done("compression", max_diff(&lifted, aux_vector(code)?.values())));
            } else {
                checks.push(skipped("compression", format!("needs n <= {MAX_FULL_QUBITS}")));
            }
            let cc = compressed_connection(n)?;
            let pi: Vec<f64> = phi.iter().map(|v| v * v).collect();
            let a = &cc.h_a * DVector::from_column_slice(&pi) / (m * m);
            let b = &cc.h_b * DVector::from_column_slice(&pi) / m;
            checks.push(done(
                "orbit-connection",
                max_diff(a.as_slice(), &sl.a).max(max_diff(b.as_slice(), &sl.b)),
            ));
        } else {
            checks.push(skipped("compression", "code is not permutation invariant".into()));
            checks.push(skipped("orbit-connection", "code is not permutation invariant".into()));
        }
    } else {
        checks.push(skipped("macwilliams", format!("needs n <= {MAX_ORBIT_QUBITS}")));
    }
    Ok(checks)
}

pub fn run(args: &Args) -> Result<ExitCode> {
    let code = load_code(&args.code)?;
    let mut checks = suite(&code, &args.gamma)?;
    for c in &mut checks {
        if c.max_residual.is_some_and(|r| !(r <= args.tol)) {
            c.status = "breach";
        }
    }
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::json!({"code": args.code, "tolerance": args.tol, "checks": checks})
        ),
        Format::Csv => {
            println!("identity,status,max_residual");
            for c in &checks {
                let r = c.max_residual.map_or(String::new(), |r| format!("{r:e}"));
                println!("{},{},{r}", c.identity, c.status);
            }
        }
        Format::Md => bail!("markdown output is only available for table-pi"),
    }
    let breached: Vec<_> = checks.iter().filter(|c| c.status == "breach").collect();
    for c in &breached {
        eprintln!(
            "identity {} breached: residual {:e} > {:e}",
            c.identity,
            c.max_residual.unwrap_or(f64::NAN),
            args.tol
        );
    }
    Ok(if breached.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
