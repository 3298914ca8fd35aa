//! CSV and JSON report plumbing.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// Orbit CSV: header `n,x`, one row per step, 17 significant digits so the
/// values round-trip bit-exactly.
pub fn write_orbit_csv<W: Write>(mut w: W, xs: &[f64]) -> io::Result<()> {
    writeln!(w, "n,x")?;
    for (i, x) in xs.iter().enumerate() {
        writeln!(w, "{},{:.16e}", i + 1, x)?;
    }
    Ok(())
}

/// Reads the `x` column of an orbit CSV (or a bare one-column list).
pub fn read_values_csv(path: &Path) -> io::Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let field = match line.split(',').nth(1) {
            Some(second) => second,
            None => line,
        };
        match field.trim().parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if lineno == 0 => {} // header
            Err(e) => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{}: bad number `{field}`: {e}", path.display(), lineno + 1),
                ));
            }
        }
    }
    Ok(out)
}

/// Standard report envelope; every command's JSON output goes through here
/// so results always carry the configuration that produced them.
pub fn emit_report(
    command: &str,
    config: Value,
    result: Value,
    diagnostics: Vec<String>,
    out: Option<&PathBuf>,
) -> io::Result<()> {
    let report = json!({
        "command": command,
        "config": config,
        "result": result,
        "diagnostics": diagnostics,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(path) => fs::write(path, text + "\n"),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn write_text(out: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            io::stdout().flush()
        }
    }
}
