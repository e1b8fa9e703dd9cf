use super::DensityMap;
use crate::error::{Error, Result};

/// Number of taps in the Gaussian kernel for `sigma_vox` (sigma in voxels):
/// `2 * ceil(2 * sigma_vox) + 1`.
pub fn gaussian_kernel_len(sigma_vox: f64) -> usize {
    2 * (2.0 * sigma_vox).ceil() as usize + 1
}

/// Normalized 1D Gaussian kernel, centre tap in the middle.
pub fn gaussian_kernel(sigma_vox: f64) -> Result<Vec<f64>> {
    if !(sigma_vox > 0.0 && sigma_vox.is_finite()) {
        return Err(Error::NonPositiveSigma(sigma_vox));
    }
    let len = gaussian_kernel_len(sigma_vox);
    let radius = (len / 2) as f64;
    let raw: Vec<f64> = (0..len)
        .map(|i| {
            let t = i as f64 - radius;
            (-t * t / (2.0 * sigma_vox * sigma_vox)).exp()
        })
        .collect();
    let norm: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / norm).collect())
}

fn axis_stride(dims: [usize; 3], axis: usize) -> usize {
    match axis {
        0 => 1,
        1 => dims[0],
        _ => dims[0] * dims[1],
    }
}

/// Convolve every line along `axis` with a symmetric odd-length kernel,
/// treating voxels outside the grid as zero.
fn convolve_axis(values: &[f64], dims: [usize; 3], axis: usize, kernel: &[f64]) -> Vec<f64> {
    let n = dims[axis];
    let stride = axis_stride(dims, axis);
    let radius = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; values.len()];
    let mut line = vec![0.0; n];
    for start in 0..values.len() {
        // visit each line once, from its first voxel
        if !(start / stride).is_multiple_of(n) {
            continue;
        }
        for (i, v) in line.iter_mut().enumerate() {
            *v = values[start + i * stride];
        }
        for i in 0..n as isize {
            let lo = (i - radius).max(0);
            let hi = (i + radius).min(n as isize - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += kernel[(j - i + radius) as usize] * line[j as usize];
            }
            out[start + i as usize * stride] = acc;
        }
    }
    out
}

/// Separable Gaussian blur with `sigma` in Å and zero-padded boundaries.
pub fn gaussian_blur(map: &DensityMap, sigma: f64) -> Result<DensityMap> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let kernel = gaussian_kernel(sigma / map.voxel_size())?;
    let dims = map.dims();
    let mut values = map.values().to_vec();
    for axis in 0..3 {
        values = convolve_axis(&values, dims, axis, &kernel);
    }
    map.with_values(values)
}

/// A small convolution stencil given as (offset, weight) taps.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    taps: Vec<([i64; 3], f64)>,
}

impl Stencil {
    pub fn new(taps: Vec<([i64; 3], f64)>) -> Self {
        Self { taps }
    }

    /// Centre −6, face neighbours +1.
    pub fn laplacian7() -> Self {
        let mut taps = vec![([0, 0, 0], -6.0)];
        for axis in 0..3 {
            for s in [-1, 1] {
                let mut off = [0; 3];
                off[axis] = s;
                taps.push((off, 1.0));
            }
        }
        Self { taps }
    }

    pub fn taps(&self) -> &[([i64; 3], f64)] {
        &self.taps
    }

    fn reach(&self) -> usize {
        self.taps.iter().flat_map(|(o, _)| o.iter().map(|c| c.unsigned_abs() as usize)).max().unwrap_or(0)
    }
}

impl Default for Stencil {
    fn default() -> Self {
        Self::laplacian7()
    }
}

/// Apply a stencil with zero padding.
///
/// Each output is evaluated as `sum(w) * v + sum(w_t * (v_t - v))` so that a
/// zero-sum stencil maps constant regions to exactly zero.
pub fn convolve_stencil(map: &DensityMap, stencil: &Stencil) -> Result<DensityMap> {
    let dims = map.dims();
    let min_dim = (2 * stencil.reach() + 1).max(3);
    if dims.iter().any(|&d| d < min_dim) {
        return Err(Error::MapTooSmall(dims));
    }
    let total_weight: f64 = stencil.taps.iter().map(|(_, w)| w).sum();
    let neighbours: Vec<([i64; 3], f64)> = stencil.taps.iter().copied().filter(|(o, _)| *o != [0, 0, 0]).collect();
    let values = map.values();
    let [nx, ny, nz] = dims.map(|d| d as i64);
    let mut out = vec![0.0; values.len()];
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let idx = map.index(x as usize, y as usize, z as usize);
                let v = values[idx];
                let mut acc = 0.0;
                for ([dx, dy, dz], w) in &neighbours {
                    let (sx, sy, sz) = (x + dx, y + dy, z + dz);
                    let nb = if (0..nx).contains(&sx) && (0..ny).contains(&sy) && (0..nz).contains(&sz) {
                        values[map.index(sx as usize, sy as usize, sz as usize)]
                    } else {
                        0.0
                    };
                    acc += w * (nb - v);
                }
                out[idx] = if total_weight == 0.0 { acc } else { total_weight * v + acc };
            }
        }
    }
    map.with_values(out)
}

/// Discrete Laplacian with the 7-point stencil.
pub fn laplacian_filter(map: &DensityMap) -> Result<DensityMap> {
    convolve_stencil(map, &Stencil::laplacian7())
}
