use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::DensityMap;
use crate::error::{Error, Result};

fn resample_axis(
    planner: &mut FftPlanner<f64>,
    data: &[Complex<f64>],
    dims: [usize; 3],
    axis: usize,
    new_len: usize,
) -> (Vec<Complex<f64>>, [usize; 3]) {
    let n = dims[axis];
    let mut new_dims = dims;
    new_dims[axis] = new_len;
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(new_len);

    let stride = |d: [usize; 3]| match axis {
        0 => 1,
        1 => d[0],
        _ => d[0] * d[1],
    };
    let (old_stride, new_stride) = (stride(dims), stride(new_dims));
    // lines are indexed by the coordinates of the two other axes
    let others: Vec<usize> = (0..3).filter(|&d| d != axis).collect();
    let (na, nb) = (dims[others[0]], dims[others[1]]);
    let offset = |d: [usize; 3], a: usize, b: usize| {
        let mut c = [0usize; 3];
        c[others[0]] = a;
        c[others[1]] = b;
        c[0] + d[0] * (c[1] + d[1] * c[2])
    };

    let m = n.min(new_len);
    let half = (m - 1) / 2;
    let scale = 1.0 / n as f64;
    let mut out = vec![Complex::new(0.0, 0.0); data.len() / n * new_len];
    let mut line = vec![Complex::new(0.0, 0.0); n];
    let mut spec = vec![Complex::new(0.0, 0.0); new_len];
    for b in 0..nb {
        for a in 0..na {
            let src0 = offset(dims, a, b);
            for (i, v) in line.iter_mut().enumerate() {
                *v = data[src0 + i * old_stride];
            }
            forward.process(&mut line);
            spec.iter_mut().for_each(|v| *v = Complex::new(0.0, 0.0));
            spec[0] = line[0];
            for f in 1..=half {
                spec[f] = line[f];
                spec[new_len - f] = line[n - f];
            }
            if m.is_multiple_of(2) {
                let nyq = m / 2;
                if n < new_len {
                    // split the source Nyquist bin between +/- frequencies
                    spec[nyq] += line[nyq] * 0.5;
                    spec[new_len - nyq] += line[nyq] * 0.5;
                } else {
                    // fold both source bins onto the target Nyquist bin
                    spec[nyq] = line[nyq] + line[n - nyq];
                }
            }
            inverse.process(&mut spec);
            let dst0 = offset(new_dims, a, b);
            for (i, v) in spec.iter().enumerate() {
                out[dst0 + i * new_stride] = v * scale;
            }
        }
    }
    (out, new_dims)
}

/// Resample onto a grid with `target_voxel_size` by cropping or zero-padding
/// the Fourier spectrum along each axis.
///
/// New dims are `round(n * voxel_size / target_voxel_size)` (at least 1);
/// the origin is kept. The DC term is preserved, so constant maps stay
/// constant. Equal voxel sizes return the input unchanged.
pub fn resample_fourier(map: &DensityMap, target_voxel_size: f64) -> Result<DensityMap> {
    if !(target_voxel_size > 0.0 && target_voxel_size.is_finite()) {
        return Err(Error::NonPositiveVoxelSize(target_voxel_size));
    }
    if target_voxel_size == map.voxel_size() {
        return Ok(map.clone());
    }
    let ratio = map.voxel_size() / target_voxel_size;
    let target_dims = map.dims().map(|n| ((n as f64 * ratio).round() as usize).max(1));

    let mut planner = FftPlanner::new();
    let mut dims = map.dims();
    let mut data: Vec<Complex<f64>> = map.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    for axis in 0..3 {
        if target_dims[axis] != dims[axis] {
            (data, dims) = resample_axis(&mut planner, &data, dims, axis, target_dims[axis]);
        }
    }
    DensityMap::new(dims, map.origin(), target_voxel_size, data.into_iter().map(|c| c.re).collect())
}
