use std::process::ExitCode;

use anyhow::{bail, Result};
use aqec_core::enumerator::{compute_enumerators, compute_sl_enumerators};
use aqec_core::EnumeratorPair;

use crate::input::{fmt_opt, load_channels, load_code};
use crate::Format;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Builtin code name or JSON code file.
    #[arg(long)]
    code: String,
    /// `ad`, `pauli` or a JSON Kraus-set file.
    #[arg(long)]
    channel: Option<String>,
    /// Damping parameters, comma-separated or repeated.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Also print Shor-Laflamme enumerators.
    #[arg(long)]
    sl: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

pub fn run(args: &Args) -> Result<ExitCode> {
    let code = load_code(&args.code)?;
    let n = code.num_qubits();
    let channel = match (&args.channel, args.gamma.is_empty(), args.sl) {
        (Some(c), _, _) => Some(c.as_str()),
        (None, false, _) => Some("ad"),
        (None, true, true) => None,
        (None, true, false) => bail!("nothing to enumerate: give --channel, --gamma or --sl"),
    };
    let mut rows: Vec<(&str, EnumeratorPair)> = Vec::new();
    if let Some(ch) = channel {
        for (g, ks) in load_channels(ch, n, &args.gamma)? {
            let e = compute_enumerators(&code, &ks)?;
            rows.push(("channel", if let Some(g) = g { e.with_gamma(g) } else { e }));
        }
    }
    if args.sl {
        rows.push(("sl", compute_sl_enumerators(&code)?));
    }
    match args.format {
        Format::Json => {
            for (_, e) in &rows {
                println!("{}", serde_json::to_string(e)?);
            }
        }
        Format::Csv => {
            println!("kind,gamma,class,A,B");
            for (kind, e) in &rows {
                for i in 0..e.len() {
                    println!("{kind},{},{i},{:e},{:e}", fmt_opt(e.gamma), e.a[i], e.b[i]);
                }
            }
        }
        Format::Md => bail!("markdown output is only available for table-pi"),
    }
    Ok(ExitCode::SUCCESS)
}
