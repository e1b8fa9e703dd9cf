use nalgebra::{Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{Placement, PlacementTable};
use crate::error::{Error, Result};
use crate::grid::{AtomRecord, Resolution};

/// Geometry used when synthesizing placement maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub voxel_size: f64,
    pub resolution: Resolution,
    /// Padding in Å; `None` uses the blur-safe default.
    pub padding: Option<f64>,
}

impl MapParams {
    pub fn new(voxel_size: f64, resolution: f64) -> Result<Self> {
        if !(voxel_size > 0.0 && voxel_size.is_finite()) {
            return Err(Error::NonPositiveVoxelSize(voxel_size));
        }
        Ok(Self { voxel_size, resolution: Resolution::new(resolution)?, padding: None })
    }
}

/// Bounds on the random rigid perturbations applied to the native pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub positions: usize,
    /// Maximum rotation angle in degrees.
    pub max_rotation: f64,
    /// Maximum translation length in Å.
    pub max_translation: f64,
    pub seed: u64,
}

fn random_unit(rng: &mut ChaCha8Rng) -> Unit<Vector3<f64>> {
    loop {
        let v = Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        if v.norm() > 1e-12 {
            return Unit::new_normalize(v);
        }
    }
}

fn perturb(atoms: &[AtomRecord], rng: &mut ChaCha8Rng, bounds: &Perturbation, voxel_size: f64) -> Vec<AtomRecord> {
    let axis = random_unit(rng);
    let angle = rng.random::<f64>() * bounds.max_rotation.to_radians();
    let dir = random_unit(rng);
    let radius = bounds.max_translation * rng.random::<f64>().cbrt();
    // translate by whole voxels so every placement stays on the lattice
    let shift = (dir.into_inner() * radius).map(|t| (t / voxel_size).round() * voxel_size);

    let centroid = atoms.iter().map(|a| a.position).sum::<Vector3<f64>>() / atoms.len() as f64;
    let rotation = Rotation3::from_axis_angle(&axis, angle);
    atoms
        .iter()
        .map(|a| {
            let mut moved = a.clone();
            if angle > 0.0 {
                moved.position = rotation * (a.position - centroid) + centroid;
            }
            moved.position += shift;
            moved
        })
        .collect()
}

/// Candidate placements for every protein: position 0 is the native pose,
/// the rest are the native pose rotated about its centroid by a random
/// axis-angle (angle ≤ `max_rotation`) and shifted by a random vector of
/// length ≤ `max_translation` rounded to whole voxels.
///
/// The random stream depends only on `seed`, so output is reproducible.
pub fn generate_placements(
    natives: &[Vec<AtomRecord>],
    bounds: &Perturbation,
    map: &MapParams,
) -> Result<PlacementTable> {
    if bounds.positions == 0 {
        return Err(Error::NoPositions);
    }
    if natives.is_empty() {
        return Err(Error::InvalidParameter("no proteins to place".into()));
    }
    if natives.iter().any(|p| p.is_empty()) {
        return Err(Error::EmptyAtoms);
    }
    if !(bounds.max_rotation >= 0.0 && bounds.max_translation >= 0.0) {
        return Err(Error::InvalidParameter("perturbation bounds must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let mut poses = Vec::with_capacity(natives.len() * bounds.positions);
    for (protein, native) in natives.iter().enumerate() {
        poses.push((protein, 0, native.clone()));
        for position in 1..bounds.positions {
            poses.push((protein, position, perturb(native, &mut rng, bounds, map.voxel_size)));
        }
    }
    placements_from_poses(poses, natives.len(), bounds.positions, map)
}

/// Synthesize maps for explicit poses `(protein, position, atoms)`.
pub fn placements_from_poses(
    poses: Vec<(usize, usize, Vec<AtomRecord>)>,
    proteins: usize,
    positions: usize,
    map: &MapParams,
) -> Result<PlacementTable> {
    let placements = poses
        .into_par_iter()
        .map(|(protein, position, atoms)| Placement::from_atoms(protein, position, atoms, map))
        .collect::<Result<Vec<_>>>()?;
    PlacementTable::new(placements, proteins, positions)
}
