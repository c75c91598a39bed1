//! XNF text format.
//!
//! ```text
//! c optional comment
//! p xnf <n> <m>
//! 1 -2 3 0
//! ```
//!
//! Each clause line lists nonzero 1-based literals terminated by `0`; a
//! negative literal is negated and the line asserts that the XOR of its
//! literals is true.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::formula::{Clause, XorsatFormula};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_xnf(text: &str) -> Result<XorsatFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(lineno, "duplicate header"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "xnf" {
                return Err(parse_err(lineno, "expected `p xnf <n> <m>`"));
            }
            let n = fields[2]
                .parse()
                .map_err(|_| parse_err(lineno, "bad variable count"))?;
            let m = fields[3]
                .parse()
                .map_err(|_| parse_err(lineno, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_err(lineno, "clause before header"))?;
        let mut lits = Vec::new();
        let mut terminated = false;
        for tok in line.split_whitespace() {
            if terminated {
                return Err(parse_err(lineno, "tokens after terminating 0"));
            }
            let lit: i64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                terminated = true;
                continue;
            }
            let var = lit.unsigned_abs();
            if var > n as u64 {
                return Err(parse_err(
                    lineno,
                    format!("variable {var} out of range 1..={n}"),
                ));
            }
            lits.push(((var - 1) as u32, lit < 0));
        }
        if !terminated {
            return Err(parse_err(lineno, "clause not terminated by 0"));
        }
        if lits.is_empty() {
            return Err(parse_err(lineno, "empty clause"));
        }
        let clause = Clause::from_literals(&lits).map_err(|e| parse_err(lineno, e.to_string()))?;
        clauses.push(clause);
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    if clauses.len() != m {
        return Err(parse_err(
            text.lines().count(),
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    XorsatFormula::new(n, 0, clauses)
}

pub fn read_xnf(path: &Path) -> Result<XorsatFormula> {
    parse_xnf(&fs::read_to_string(path)?)
}

/// Canonical form: positive literals when `rhs = 1`, otherwise the first
/// literal negated.
pub fn format_xnf(f: &XorsatFormula) -> String {
    let mut out = format!("p xnf {} {}\n", f.num_vars(), f.num_clauses());
    for c in f.clauses() {
        for (i, &v) in c.vars().iter().enumerate() {
            if i == 0 && !c.rhs() {
                out.push('-');
            }
            out.push_str(&(v + 1).to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

pub fn write_xnf(f: &XorsatFormula, path: &Path) -> Result<()> {
    write_atomic(path, format_xnf(f).as_bytes())
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(io::Error::new(io::ErrorKind::InvalidInput, "no file name")))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}
