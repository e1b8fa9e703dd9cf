#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use densfit::grid::{pdb, AtomRecord};
use densfit::nalgebra::Vector3;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_densfit"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn densfit")
}

/// Two compact proteins, 20 heavy atoms each, 14 Å apart along x. Positions
/// come from a fixed integer hash so the fixture never depends on an RNG.
pub fn toy_complex(atoms_per_protein: usize, separation: f64) -> Vec<AtomRecord> {
    let elements = ["C", "N", "O", "S"];
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut atoms = Vec::new();
    for protein in 0..2 {
        for i in 0..atoms_per_protein {
            let p =
                Vector3::new(protein as f64 * separation + 8.0 * next() - 4.0, 8.0 * next() - 4.0, 8.0 * next() - 4.0);
            atoms.push(AtomRecord::new(elements[i % 4], p, protein).unwrap());
        }
    }
    atoms
}

pub fn write_pdb(dir: &Path, name: &str, atoms: &[AtomRecord]) -> PathBuf {
    let path = dir.join(name);
    pdb::save(atoms, &path).unwrap();
    path
}
