use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use aqec_core::programs::{max_dimension, render_markdown, PiMode, TableCell};
use aqec_core::SolverOptions;
use rayon::prelude::*;

use crate::Format;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Qubit counts, `3-12` or a single value.
    #[arg(long, default_value = "3-12", value_parser = parse_range)]
    n: RangeInclusive<usize>,
    /// Distances, `2-6` or a single value; cells with d > n are skipped.
    #[arg(long, default_value = "2-6", value_parser = parse_range)]
    d: RangeInclusive<usize>,
    /// `pi_nonneg` or `macwilliams_only`; both when omitted.
    #[arg(long)]
    mode: Vec<PiMode>,
    /// JSON file of finished cells, read on start and rewritten after each cell.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Feasibility tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "md")]
    format: Format,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t}: {e}"));
    let r = match s.split_once('-') {
        Some((a, b)) => parse(a)?..=parse(b)?,
        None => parse(s)?..=parse(s)?,
    };
    if r.is_empty() {
        return Err(format!("empty range {s}"));
    }
    Ok(r)
}

type Key = (String, usize, usize);

fn key(c: &TableCell) -> Key {
    (c.mode.to_string(), c.d, c.n)
}

fn load_checkpoint(path: &Path) -> Result<BTreeMap<Key, TableCell>> {
    if !path.exists() {
        return Ok(BTreeMap::new());
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cells: Vec<TableCell> =
        serde_json::from_str(&text).with_context(|| format!("parsing checkpoint {}", path.display()))?;
    Ok(cells.into_iter().map(|c| (key(&c), c)).collect())
}

fn save_checkpoint(path: &Path, cells: &BTreeMap<Key, TableCell>) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let list: Vec<&TableCell> = cells.values().collect();
    std::fs::write(&tmp, serde_json::to_string_pretty(&list)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn run(args: &Args) -> Result<ExitCode> {
    let modes = if args.mode.is_empty() {
        vec![PiMode::PiNonneg, PiMode::MacWilliamsOnly]
    } else {
        args.mode.clone()
    };
    if *args.d.start() == 0 {
        bail!("distance must be at least 1");
    }
    let opts = args.tol.map_or_else(SolverOptions::default, SolverOptions::with_tolerance);
    let done = Mutex::new(match &args.checkpoint {
        Some(p) => load_checkpoint(p)?,
        None => BTreeMap::new(),
    });
    let mut todo = Vec::new();
    for &mode in &modes {
        for d in args.d.clone() {
            for n in args.n.clone().filter(|&n| n >= d) {
                if !done.lock().unwrap().contains_key(&(mode.to_string(), d, n)) {
                    todo.push((mode, n, d));
                }
            }
        }
    }
    todo.par_iter().try_for_each(|&(mode, n, d)| -> Result<()> {
        let cell = TableCell {
            n,
            d,
            mode,
            bound: max_dimension(n, d, mode, &opts)?,
        };
        let mut map = done.lock().map_err(|_| anyhow!("checkpoint lock poisoned"))?;
        map.insert(key(&cell), cell);
        if let Some(p) = &args.checkpoint {
            save_checkpoint(p, &map)?;
        }
        Ok(())
    })?;
    let done = done.into_inner().map_err(|_| anyhow!("checkpoint lock poisoned"))?;
    let cells: Vec<TableCell> = done
        .into_values()
        .filter(|c| modes.contains(&c.mode) && args.n.contains(&c.n) && args.d.contains(&c.d))
        .collect();
    match args.format {
        Format::Json => println!("{}", serde_json::to_string(&cells)?),
        Format::Csv => {
            println!("mode,n,d,M");
            for c in &cells {
                println!("{},{},{},{}", c.mode, c.n, c.d, c.bound);
            }
        }
        Format::Md => {
            for (i, mode) in modes.iter().enumerate() {
                let part: Vec<TableCell> = cells.iter().filter(|c| c.mode == *mode).cloned().collect();
                if i > 0 {
                    println!();
                }
                println!("{mode}\n");
                print!("{}", render_markdown(&part));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
