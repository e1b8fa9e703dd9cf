use super::{filter, gaussian_blur, AtomRecord, DensityMap, Resolution};
use crate::error::{Error, Result};

/// Padding in Å that keeps blurred mass off the boundary: twice the Gaussian
/// kernel radius.
pub fn default_padding(voxel_size: f64, resolution: Resolution) -> f64 {
    let radius = filter::gaussian_kernel_len(resolution.sigma() / voxel_size) / 2;
    2.0 * radius as f64 * voxel_size
}

fn heavy_atoms(atoms: &[AtomRecord]) -> impl Iterator<Item = &AtomRecord> {
    atoms.iter().filter(|a| !a.is_hydrogen())
}

fn deposit(atoms: &[AtomRecord], map: &DensityMap) -> Result<DensityMap> {
    let [nx, ny, nz] = map.dims();
    let vs = map.voxel_size();
    let origin = map.origin();
    let mut values = vec![0.0; map.len()];
    for atom in heavy_atoms(atoms) {
        let idx: [f64; 3] = std::array::from_fn(|d| ((atom.position[d] - origin[d]) / vs).round());
        if idx.iter().zip([nx, ny, nz]).any(|(&i, n)| i < 0.0 || i >= n as f64) {
            continue;
        }
        let flat = map.index(idx[0] as usize, idx[1] as usize, idx[2] as usize);
        values[flat] += atom.atomic_number as f64;
    }
    map.with_values(values)
}

/// Unblurred map: the bounding box of the non-hydrogen atoms grown by
/// `padding` Å and snapped outward to the global lattice, with each atom's
/// atomic number added to its nearest voxel.
pub fn voxelize(atoms: &[AtomRecord], voxel_size: f64, padding: f64) -> Result<DensityMap> {
    if !(voxel_size > 0.0 && voxel_size.is_finite()) {
        return Err(Error::NonPositiveVoxelSize(voxel_size));
    }
    if !(padding >= 0.0 && padding.is_finite()) {
        return Err(Error::InvalidParameter(format!("padding must be >= 0, got {padding}")));
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for atom in heavy_atoms(atoms) {
        for d in 0..3 {
            lo[d] = lo[d].min(atom.position[d]);
            hi[d] = hi[d].max(atom.position[d]);
        }
    }
    if lo[0] > hi[0] {
        return Err(Error::EmptyAtoms);
    }
    let lo_idx = lo.map(|v| ((v - padding) / voxel_size).floor());
    let hi_idx = hi.map(|v| ((v + padding) / voxel_size).ceil());
    let dims: [usize; 3] = std::array::from_fn(|d| (hi_idx[d] - lo_idx[d]) as usize + 1);
    let origin = lo_idx.map(|i| i * voxel_size);
    let grid = DensityMap::zeros(dims, origin, voxel_size)?;
    deposit(atoms, &grid)
}

/// Voxelize onto the bounding-box grid and blur with sigma = 0.187 × resolution.
/// `padding` defaults to [`default_padding`].
pub fn synthesize_map(
    atoms: &[AtomRecord],
    voxel_size: f64,
    resolution: Resolution,
    padding: Option<f64>,
) -> Result<DensityMap> {
    let padding = padding.unwrap_or_else(|| default_padding(voxel_size, resolution));
    let raw = voxelize(atoms, voxel_size, padding)?;
    gaussian_blur(&raw, resolution.sigma())
}

/// Voxelize onto an existing grid geometry and blur. Atoms whose nearest
/// voxel falls outside `grid` are dropped.
pub fn synthesize_on_grid(atoms: &[AtomRecord], grid: &DensityMap, resolution: Resolution) -> Result<DensityMap> {
    if heavy_atoms(atoms).next().is_none() {
        return Err(Error::EmptyAtoms);
    }
    let raw = deposit(atoms, grid)?;
    gaussian_blur(&raw, resolution.sigma())
}
