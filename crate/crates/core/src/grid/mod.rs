//! Voxel density maps: synthesis from atoms, filtering, resampling and
//! cross-correlation.
//!
//! Maps live on a global lattice anchored at the world origin. Two maps with
//! the same voxel size whose origins differ by whole voxels can be compared
//! voxel-for-voxel without interpolation.

mod atoms;
pub mod dmap;
mod filter;
pub mod pdb;
mod resample;
mod synth;

pub use atoms::{atomic_number, AtomRecord};
pub use filter::{convolve_stencil, gaussian_blur, gaussian_kernel, gaussian_kernel_len, laplacian_filter, Stencil};
pub use resample::resample_fourier;
pub use synth::{default_padding, synthesize_map, synthesize_on_grid, voxelize};

use crate::error::{Error, Result};

/// Standard deviation of the blurring Gaussian as a fraction of resolution.
pub const SIGMA_PER_RESOLUTION: f64 = 0.187;

const LATTICE_TOL: f64 = 1e-6;
const VOXEL_SIZE_RTOL: f64 = 1e-9;

/// Nominal map resolution in Å.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution(f64);

impl Resolution {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::NonPositiveResolution(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Gaussian sigma in Å used to blur a synthesized map.
    pub fn sigma(self) -> f64 {
        SIGMA_PER_RESOLUTION * self.0
    }
}

/// A scalar field sampled on a regular cubic grid, x-fastest.
///
/// Voxel `(ix, iy, iz)` is centred at `origin + voxel_size * (ix, iy, iz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMap {
    dims: [usize; 3],
    origin: [f64; 3],
    voxel_size: f64,
    values: Vec<f64>,
}

impl DensityMap {
    pub fn new(dims: [usize; 3], origin: [f64; 3], voxel_size: f64, values: Vec<f64>) -> Result<Self> {
        if !(voxel_size > 0.0 && voxel_size.is_finite()) {
            return Err(Error::NonPositiveVoxelSize(voxel_size));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidMap(format!("zero dimension in {dims:?}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidMap("non-finite origin".into()));
        }
        let len = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidMap(format!("dims {dims:?} overflow")))?;
        if values.len() != len {
            return Err(Error::InvalidMap(format!("{} values for dims {dims:?} ({len} expected)", values.len())));
        }
        Ok(Self { dims, origin, voxel_size, values })
    }

    pub fn zeros(dims: [usize; 3], origin: [f64; 3], voxel_size: f64) -> Result<Self> {
        Self::filled(dims, origin, voxel_size, 0.0)
    }

    pub fn filled(dims: [usize; 3], origin: [f64; 3], voxel_size: f64, value: f64) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, origin, voxel_size, vec![value; len])
    }

    /// A map with the same geometry and new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.dims, self.origin, self.voxel_size, values)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[self.index(x, y, z)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self { values: self.values.iter().map(|v| alpha * v).collect(), ..self.clone() }
    }

    /// World coordinates of a voxel centre.
    pub fn voxel_center(&self, x: usize, y: usize, z: usize) -> [f64; 3] {
        [
            self.origin[0] + self.voxel_size * x as f64,
            self.origin[1] + self.voxel_size * y as f64,
            self.origin[2] + self.voxel_size * z as f64,
        ]
    }

    pub fn same_voxel_size(&self, other: &DensityMap) -> bool {
        (self.voxel_size - other.voxel_size).abs() <= VOXEL_SIZE_RTOL * self.voxel_size.max(other.voxel_size)
    }

    /// Offset of `other`'s origin relative to this map's origin, in whole
    /// voxels.
    pub fn lattice_offset(&self, other: &DensityMap) -> Result<[i64; 3]> {
        if !self.same_voxel_size(other) {
            return Err(Error::VoxelSizeMismatch(self.voxel_size, other.voxel_size));
        }
        let raw: [f64; 3] = std::array::from_fn(|d| (other.origin[d] - self.origin[d]) / self.voxel_size);
        if raw.iter().any(|r| (r - r.round()).abs() > LATTICE_TOL) {
            return Err(Error::LatticeMismatch(raw));
        }
        Ok(raw.map(|r| r.round() as i64))
    }

    /// Copy this map onto the geometry of `template`, dropping voxels outside
    /// it and zero-filling voxels this map does not cover.
    pub fn regrid_like(&self, template: &DensityMap) -> Result<DensityMap> {
        let off = template.lattice_offset(self)?;
        let [tx, ty, tz] = template.dims;
        let mut out = vec![0.0; template.len()];
        for z in 0..tz {
            let sz = z as i64 - off[2];
            if sz < 0 || sz >= self.dims[2] as i64 {
                continue;
            }
            for y in 0..ty {
                let sy = y as i64 - off[1];
                if sy < 0 || sy >= self.dims[1] as i64 {
                    continue;
                }
                for x in 0..tx {
                    let sx = x as i64 - off[0];
                    if sx < 0 || sx >= self.dims[0] as i64 {
                        continue;
                    }
                    out[template.index(x, y, z)] = self.get(sx as usize, sy as usize, sz as usize);
                }
            }
        }
        template.with_values(out)
    }
}

/// Overlap of two aligned maps along one axis, as index ranges into each.
fn axis_overlap(len_a: usize, len_b: usize, b_offset: i64) -> Option<(usize, usize, usize)> {
    // b voxel j sits at a index j + b_offset
    let start = b_offset.max(0);
    let end = (len_a as i64).min(b_offset + len_b as i64);
    (end > start).then(|| (start as usize, (start - b_offset) as usize, (end - start) as usize))
}

/// Voxel-wise dot product of two lattice-aligned maps over the voxels they
/// share in world space. Voxels outside the overlap contribute nothing.
///
/// The sum runs in world order over the overlap box, so swapping the
/// arguments gives a bit-identical result.
pub fn cross_correlate(a: &DensityMap, b: &DensityMap) -> Result<f64> {
    let off = a.lattice_offset(b)?;
    let mut ranges = [(0usize, 0usize, 0usize); 3];
    for d in 0..3 {
        match axis_overlap(a.dims[d], b.dims[d], off[d]) {
            Some(r) => ranges[d] = r,
            None => return Ok(0.0),
        }
    }
    let [(ax, bx, nx), (ay, by, ny), (az, bz, nz)] = ranges;
    let mut total = 0.0;
    for k in 0..nz {
        for j in 0..ny {
            let ia = a.index(ax, ay + j, az + k);
            let ib = b.index(bx, by + j, bz + k);
            let row_a = &a.values[ia..ia + nx];
            let row_b = &b.values[ib..ib + nx];
            total += row_a.iter().zip(row_b).map(|(p, q)| p * q).sum::<f64>();
        }
    }
    Ok(total)
}
