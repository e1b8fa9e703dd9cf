//! Minimal fixed-column PDB reader: `ATOM`/`HETATM` coordinates and element
//! symbols, grouped into proteins by chain identifier.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;

use super::AtomRecord;
use crate::error::{Error, Result};

/// 1-based inclusive column range, blank-padded when the line is short.
fn columns(line: &str, first: usize, last: usize) -> &str {
    let start = (first - 1).min(line.len());
    let end = last.min(line.len());
    line.get(start..end).unwrap_or("")
}

fn coord(line: &str, first: usize, last: usize, lineno: usize) -> Result<f64> {
    let field = columns(line, first, last).trim();
    field
        .parse()
        .map_err(|_| Error::Parse { line: lineno, msg: format!("bad coordinate {field:?} in columns {first}-{last}") })
}

/// Parse PDB text. Chains are numbered 0, 1, ... in order of first
/// appearance and used as `protein_id`. Records other than ATOM/HETATM are
/// skipped.
pub fn parse(text: &str) -> Result<Vec<AtomRecord>> {
    let mut chains: Vec<char> = Vec::new();
    let mut atoms = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let record = columns(line, 1, 6).trim_end();
        if record != "ATOM" && record != "HETATM" {
            continue;
        }
        let x = coord(line, 31, 38, lineno)?;
        let y = coord(line, 39, 46, lineno)?;
        let z = coord(line, 47, 54, lineno)?;
        let element = columns(line, 77, 78).trim();
        if element.is_empty() {
            return Err(Error::Parse { line: lineno, msg: "missing element symbol (columns 77-78)".into() });
        }
        let chain = columns(line, 22, 22).chars().next().unwrap_or(' ');
        let protein_id = match chains.iter().position(|&c| c == chain) {
            Some(p) => p,
            None => {
                chains.push(chain);
                chains.len() - 1
            }
        };
        let atom = AtomRecord::new(element, Vector3::new(x, y, z), protein_id).map_err(|e| match e {
            Error::UnknownElement(s) => Error::Parse { line: lineno, msg: format!("unknown element {s:?}") },
            other => other,
        })?;
        atoms.push(atom);
    }
    Ok(atoms)
}

pub fn load(path: impl AsRef<Path>) -> Result<Vec<AtomRecord>> {
    parse(&fs::read_to_string(path)?)
}

/// Fixed-column ATOM records; `protein_id` 0, 1, ... becomes chain A, B, ...
/// Coordinates are written with three decimals.
pub fn to_string(atoms: &[AtomRecord]) -> Result<String> {
    let mut out = String::new();
    for (i, a) in atoms.iter().enumerate() {
        let chain = u8::try_from(a.protein_id)
            .ok()
            .filter(|&c| c < 26)
            .map(|c| (b'A' + c) as char)
            .ok_or_else(|| Error::Format(format!("protein id {} has no chain letter", a.protein_id)))?;
        let p = a.position;
        let _ = writeln!(
            out,
            "ATOM  {:>5} {:<4} UNK {}{:>4}    {:8.3}{:8.3}{:8.3}  1.00  0.00          {:>2}",
            (i + 1) % 100_000,
            a.element.to_ascii_uppercase(),
            chain,
            1,
            p.x,
            p.y,
            p.z,
            a.element.to_ascii_uppercase()
        );
    }
    out.push_str("END\n");
    Ok(out)
}

pub fn save(atoms: &[AtomRecord], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_string(atoms)?)?;
    Ok(())
}

/// Split atoms into per-protein lists indexed by `protein_id`.
pub fn group_by_protein(atoms: &[AtomRecord]) -> Vec<Vec<AtomRecord>> {
    let count = atoms.iter().map(|a| a.protein_id + 1).max().unwrap_or(0);
    let mut groups = vec![Vec::new(); count];
    for a in atoms {
        groups[a.protein_id].push(a.clone());
    }
    groups
}
