//! `PLAC v1` text placement files.
//!
//! ```text
//! PLAC 1 <m> <N> <voxel_size>
//! <i> <k>                 # 1-based protein and position
//! <element> <x> <y> <z>   # one line per atom
//! ...
//! ```
//! Fields are whitespace-delimited; `#` starts a comment.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;

use super::{placements_from_poses, MapParams, PlacementTable};
use crate::error::{Error, Result};
use crate::grid::AtomRecord;

/// One explicit pose; indices are 0-based in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    pub protein: usize,
    pub position: usize,
    pub atoms: Vec<AtomRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementFile {
    pub proteins: usize,
    pub positions: usize,
    pub voxel_size: f64,
    pub poses: Vec<Pose>,
}

impl PlacementFile {
    pub fn from_table(table: &PlacementTable) -> Self {
        let voxel_size = table.placements()[0].map().voxel_size();
        let poses = table
            .placements()
            .iter()
            .map(|p| Pose { protein: p.protein(), position: p.position(), atoms: p.atoms().to_vec() })
            .collect();
        Self { proteins: table.proteins(), positions: table.positions(), voxel_size, poses }
    }

    /// Synthesize maps for every pose. The file's voxel size overrides
    /// `map.voxel_size`.
    pub fn into_table(self, map: &MapParams) -> Result<PlacementTable> {
        let map = MapParams { voxel_size: self.voxel_size, ..*map };
        let poses = self.poses.into_iter().map(|p| (p.protein, p.position, p.atoms)).collect();
        placements_from_poses(poses, self.proteins, self.positions, &map)
    }
}

pub fn to_string(file: &PlacementFile) -> String {
    let mut out = format!("PLAC 1 {} {} {}\n", file.proteins, file.positions, file.voxel_size);
    for pose in &file.poses {
        let _ = writeln!(out, "{} {}", pose.protein + 1, pose.position + 1);
        for a in &pose.atoms {
            let p = a.position;
            let _ = writeln!(out, "{} {} {} {}", a.element, p.x, p.y, p.z);
        }
    }
    out
}

fn parse_num<T: std::str::FromStr>(tok: &str, what: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad {what} {tok:?}") })
}

pub fn parse(text: &str) -> Result<PlacementFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| Error::Format("empty placement file".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 5 || h[0] != "PLAC" {
        return Err(Error::Parse { line: hline, msg: "expected `PLAC 1 m N voxel_size`".into() });
    }
    if h[1] != "1" {
        return Err(Error::Parse { line: hline, msg: format!("unsupported PLAC version {}", h[1]) });
    }
    let proteins: usize = parse_num(h[2], "protein count", hline)?;
    let positions: usize = parse_num(h[3], "position count", hline)?;
    let voxel_size: f64 = parse_num(h[4], "voxel size", hline)?;

    let mut poses: Vec<Pose> = Vec::new();
    for (lineno, line) in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.len() {
            2 => {
                let i: usize = parse_num(tok[0], "protein index", lineno)?;
                let k: usize = parse_num(tok[1], "position index", lineno)?;
                if i == 0 || k == 0 || i > proteins || k > positions {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("placement ({i}, {k}) outside 1..={proteins} x 1..={positions}"),
                    });
                }
                poses.push(Pose { protein: i - 1, position: k - 1, atoms: Vec::new() });
            }
            4 => {
                let pose = poses.last_mut().ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: "atom line before any placement header".into(),
                })?;
                let xyz = [
                    parse_num(tok[1], "coordinate", lineno)?,
                    parse_num(tok[2], "coordinate", lineno)?,
                    parse_num(tok[3], "coordinate", lineno)?,
                ];
                let atom = AtomRecord::new(tok[0], Vector3::from(xyz), pose.protein)
                    .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
                pose.atoms.push(atom);
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected `i k` or `element x y z`, got {} fields", tok.len()),
                })
            }
        }
    }
    Ok(PlacementFile { proteins, positions, voxel_size, poses })
}

pub fn save(file: &PlacementFile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_string(file))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<PlacementFile> {
    parse(&fs::read_to_string(path)?)
}
