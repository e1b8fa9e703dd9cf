//! `PROB v1` binary problem dumps for solver-only workflows.
//!
//! Little-endian layout: magic `PROB`, `u32` version (1), `u32` m, `u32` N,
//! `u32` score-kind tag, then `Q` row-major (n² `f64`) and `b` (n `f64`),
//! with n = m·N.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{AssemblyProblem, ScoreKind};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PROB";
pub const VERSION: u32 = 1;

pub fn write<W: Write>(problem: &AssemblyProblem, mut w: W) -> Result<()> {
    let as_u32 = |v: usize| u32::try_from(v).map_err(|_| Error::Format(format!("{v} exceeds u32")));
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&as_u32(problem.proteins())?.to_le_bytes())?;
    w.write_all(&as_u32(problem.positions())?.to_le_bytes())?;
    w.write_all(&problem.score_kind().tag().to_le_bytes())?;
    let n = problem.n();
    for r in 0..n {
        for c in 0..n {
            w.write_all(&problem.q()[(r, c)].to_le_bytes())?;
        }
    }
    for v in problem.b().iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn to_bytes(problem: &AssemblyProblem) -> Vec<u8> {
    let mut buf = Vec::new();
    write(problem, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn read<R: Read>(mut r: R) -> Result<AssemblyProblem> {
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)?;
    if raw.len() < 20 || &raw[..4] != MAGIC {
        return Err(Error::Format("missing PROB header".into()));
    }
    let u32_at = |off: usize| u32::from_le_bytes(raw[off..off + 4].try_into().unwrap());
    if u32_at(4) != VERSION {
        return Err(Error::Format(format!("unsupported PROB version {}", u32_at(4))));
    }
    let (m, per) = (u32_at(8) as usize, u32_at(12) as usize);
    let kind = ScoreKind::from_tag(u32_at(16))?;
    let n = m.checked_mul(per).ok_or_else(|| Error::Format("problem size overflows".into()))?;
    let expected = n
        .checked_mul(n)
        .and_then(|nn| nn.checked_add(n))
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| Error::Format("problem size overflows".into()))?;
    let body = &raw[20..];
    if body.len() != expected {
        return Err(Error::Format(format!("expected {expected} payload bytes, found {}", body.len())));
    }
    let mut floats = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let q = DMatrix::from_row_iterator(n, n, floats.by_ref().take(n * n));
    let b = DVector::from_iterator(n, floats);
    AssemblyProblem::new(m, per, q, b, kind)
}

pub fn save(problem: &AssemblyProblem, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_bytes(problem))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<AssemblyProblem> {
    read(fs::read(path)?.as_slice())
}
