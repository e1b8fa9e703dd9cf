//! Fit quality: RMSD against the native poses, the correct-answer ratio β,
//! probe maps and map-only scores (Laplacian cross-correlation and mutual
//! information).

use crate::assembly::PlacementTable;
use crate::error::{Error, Result};
use crate::grid::{
    cross_correlate, laplacian_filter, resample_fourier, synthesize_on_grid, AtomRecord, DensityMap, Resolution,
};
use crate::solvers::{AssignmentVector, Mode};

/// Default RMSD threshold in Å below which a protein counts as placed
/// correctly.
pub const DEFAULT_RMSD_THRESHOLD: f64 = 10.0;
pub const DEFAULT_MI_BINS: usize = 20;
/// Voxel size of the intermediate probe grid.
pub const PROBE_VOXEL_SIZE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FitQuality {
    pub per_protein_rmsd: Vec<f64>,
    pub correct: Vec<bool>,
    pub beta: f64,
    pub threshold: f64,
    pub mi: Option<f64>,
    pub lap_score: Option<f64>,
}

/// Root-mean-square distance between atoms paired by order, hydrogens
/// excluded. No superposition is applied.
pub fn rmsd(predicted: &[AtomRecord], native: &[AtomRecord]) -> Result<f64> {
    let p: Vec<_> = predicted.iter().filter(|a| !a.is_hydrogen()).collect();
    let q: Vec<_> = native.iter().filter(|a| !a.is_hydrogen()).collect();
    if p.len() != q.len() {
        return Err(Error::AtomCountMismatch(p.len(), q.len()));
    }
    if p.is_empty() {
        return Err(Error::EmptyAtoms);
    }
    let sum: f64 = p.iter().zip(&q).map(|(a, b)| (a.position - b.position).norm_squared()).sum();
    Ok((sum / p.len() as f64).sqrt())
}

fn check_binary(assignment: &AssignmentVector, table: &PlacementTable) -> Result<()> {
    if assignment.mode() != Mode::Binary {
        return Err(Error::Infeasible("assignment is not binary".into()));
    }
    if assignment.proteins() != table.proteins() || assignment.positions() != table.positions() {
        return Err(Error::Infeasible(format!(
            "assignment shape {}x{} does not match placements {}x{}",
            assignment.proteins(),
            assignment.positions(),
            table.proteins(),
            table.positions()
        )));
    }
    Ok(())
}

/// Per-protein RMSD of the chosen placements against `natives` and the
/// fraction `β` of proteins within `threshold` Å (inclusive).
pub fn evaluate_fit(
    assignment: &AssignmentVector,
    table: &PlacementTable,
    natives: &[Vec<AtomRecord>],
    threshold: f64,
) -> Result<FitQuality> {
    check_binary(assignment, table)?;
    if natives.len() != table.proteins() {
        return Err(Error::DimensionMismatch { expected: table.proteins(), got: natives.len() });
    }
    let per_protein_rmsd = assignment
        .choices()
        .iter()
        .enumerate()
        .map(|(i, &k)| rmsd(table.get(i, k).atoms(), &natives[i]))
        .collect::<Result<Vec<_>>>()?;
    let correct: Vec<bool> = per_protein_rmsd.iter().map(|&r| r <= threshold).collect();
    let beta = correct.iter().filter(|&&c| c).count() as f64 / correct.len() as f64;
    Ok(FitQuality { per_protein_rmsd, correct, beta, threshold, mi: None, lap_score: None })
}

/// Map of the chosen placements on the target's grid.
///
/// Atoms are voxelized on a 1 Å grid spanning the target box, blurred at
/// sigma = 0.187 × resolution, Fourier-resampled to the target voxel size and
/// copied onto the target geometry.
pub fn probe_map(
    assignment: &AssignmentVector,
    table: &PlacementTable,
    resolution: Resolution,
    target: &DensityMap,
) -> Result<DensityMap> {
    check_binary(assignment, table)?;
    let atoms: Vec<AtomRecord> =
        assignment.choices().iter().enumerate().flat_map(|(i, &k)| table.get(i, k).atoms().iter().cloned()).collect();
    let extent = target.dims().map(|d| d as f64 * target.voxel_size());
    let dims = extent.map(|e| ((e / PROBE_VOXEL_SIZE).round() as usize).max(1));
    let grid = DensityMap::zeros(dims, target.origin(), PROBE_VOXEL_SIZE)?;
    let probe = synthesize_on_grid(&atoms, &grid, resolution)?;
    let resampled = resample_fourier(&probe, target.voxel_size())?;
    resampled.regrid_like(target)
}

/// Mutual information between two aligned maps, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInformation {
    pub value: f64,
    /// Set when either map is constant; the value is then defined as 0.
    pub constant_input: bool,
}

fn bin_indices(values: &[f64], bins: usize) -> Option<Vec<usize>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = hi - lo;
    if !(width > 0.0) {
        return None;
    }
    Some(values.iter().map(|&v| (((v - lo) / width * bins as f64).floor() as usize).min(bins - 1)).collect())
}

/// Histogram mutual information with `bins` equal-width bins spanning each
/// map's own value range.
pub fn mutual_information(probe: &DensityMap, target: &DensityMap, bins: usize) -> Result<MutualInformation> {
    if probe.dims() != target.dims() {
        return Err(Error::DimsMismatch(probe.dims(), target.dims()));
    }
    if target.lattice_offset(probe)? != [0, 0, 0] {
        return Err(Error::InvalidParameter("maps are not voxel-aligned".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("bin count must be positive".into()));
    }
    let (Some(xs), Some(ys)) = (bin_indices(probe.values(), bins), bin_indices(target.values(), bins)) else {
        return Ok(MutualInformation { value: 0.0, constant_input: true });
    };
    let total = xs.len() as f64;
    let mut joint = vec![0usize; bins * bins];
    let mut px = vec![0usize; bins];
    let mut py = vec![0usize; bins];
    for (&x, &y) in xs.iter().zip(&ys) {
        joint[x * bins + y] += 1;
        px[x] += 1;
        py[y] += 1;
    }
    let mut mi = 0.0;
    for x in 0..bins {
        for y in 0..bins {
            let c = joint[x * bins + y];
            if c == 0 {
                continue;
            }
            let pxy = c as f64 / total;
            mi += pxy * (pxy * total * total / (px[x] as f64 * py[y] as f64)).ln();
        }
    }
    Ok(MutualInformation { value: mi.max(0.0), constant_input: false })
}

/// Cross-correlation of the Laplacian-filtered maps; larger is better.
pub fn lap_score(probe: &DensityMap, target: &DensityMap) -> Result<f64> {
    cross_correlate(&laplacian_filter(probe)?, &laplacian_filter(target)?)
}

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn atom(x: f64, y: f64, z: f64) -> AtomRecord {
        AtomRecord::new("C", Vector3::new(x, y, z), 0).unwrap()
    }

    #[test]
    fn rmsd_examples() {
        let a = vec![atom(0.0, 0.0, 0.0), atom(1.0, 2.0, 3.0)];
        assert_eq!(rmsd(&a, &a).unwrap(), 0.0);
        assert_eq!(rmsd(&[atom(3.0, 4.0, 0.0)], &[atom(0.0, 0.0, 0.0)]).unwrap(), 5.0);
        let moved = vec![atom(1.0, 0.0, 0.0), atom(1.0, 2.0, 10.0)];
        assert_eq!(rmsd(&moved, &a).unwrap(), 5.0);
        assert_eq!(rmsd(&a, &moved).unwrap(), 5.0);
    }

    #[test]
    fn rmsd_errors() {
        let a = vec![atom(0.0, 0.0, 0.0)];
        assert!(matches!(rmsd(&a, &[]), Err(Error::AtomCountMismatch(1, 0))));
        assert!(matches!(rmsd(&[], &[]), Err(Error::EmptyAtoms)));
        let h = AtomRecord::new("H", Vector3::new(9.0, 9.0, 9.0), 0).unwrap();
        // hydrogens are ignored on both sides
        assert_eq!(rmsd(&[atom(0.0, 0.0, 0.0), h], &a).unwrap(), 0.0);
    }

    fn random_map(n: usize, seed: u64) -> DensityMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..n * n * n).map(|_| rng.random_range(0.0..1.0)).collect();
        DensityMap::new([n; 3], [0.0; 3], 1.0, v).unwrap()
    }

    fn entropy_of_bins(values: &[f64], bins: usize) -> f64 {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut counts = vec![0.0; bins];
        for &v in values {
            let b = if v == hi { bins - 1 } else { ((v - lo) / (hi - lo) * bins as f64) as usize };
            counts[b] += 1.0;
        }
        let n = values.len() as f64;
        counts.iter().filter(|&&c| c > 0.0).map(|&c| -(c / n) * (c / n).ln()).sum()
    }

    #[test]
    fn self_information_is_entropy() {
        let m = random_map(8, 3);
        let mi = mutual_information(&m, &m, 20).unwrap();
        assert!(!mi.constant_input);
        assert!((mi.value - entropy_of_bins(m.values(), 20)).abs() <= 1e-9);
    }

    #[test]
    fn shuffled_target_is_nearly_independent() {
        let m = random_map(32, 5);
        let mut v = m.values().to_vec();
        v.shuffle(&mut ChaCha8Rng::seed_from_u64(6));
        let shuffled = m.with_values(v).unwrap();
        let mi = mutual_information(&m, &shuffled, 20).unwrap();
        assert!(mi.value < 0.05, "{}", mi.value);
    }

    #[test]
    fn mi_is_symmetric_and_bounded() {
        let a = random_map(6, 1);
        let b = a.with_values(a.values().iter().map(|v| (v * 7.0).sin()).collect()).unwrap();
        let ab = mutual_information(&a, &b, 20).unwrap().value;
        let ba = mutual_information(&b, &a, 20).unwrap().value;
        assert!((ab - ba).abs() <= 1e-12);
        let aa = mutual_information(&a, &a, 20).unwrap().value;
        assert!(aa >= ab - 1e-9);
        assert!(ab >= -1e-12);
    }

    #[test]
    fn constant_map_has_zero_information() {
        let a = random_map(4, 1);
        let c = DensityMap::filled([4; 3], [0.0; 3], 1.0, 2.0).unwrap();
        let mi = mutual_information(&a, &c, 20).unwrap();
        assert_eq!(mi.value, 0.0);
        assert!(mi.constant_input);
    }

    #[test]
    fn mi_requires_alignment() {
        let a = random_map(4, 1);
        let b = random_map(5, 1);
        assert!(matches!(mutual_information(&a, &b, 20), Err(Error::DimsMismatch(..))));
    }

    fn two_protein_table() -> (PlacementTable, Vec<Vec<AtomRecord>>) {
        use crate::assembly::{placements_from_poses, MapParams};
        let a = vec![atom(0.0, 0.0, 0.0), atom(1.5, 0.5, -0.5), atom(0.3, 2.0, 1.0)];
        let b: Vec<AtomRecord> = [(6.0, 0.0, 0.0), (7.2, 1.0, 0.4)]
            .iter()
            .map(|&(x, y, z)| AtomRecord::new("N", Vector3::new(x, y, z), 1).unwrap())
            .collect();
        let shifted: Vec<AtomRecord> =
            b.iter().map(|x| AtomRecord { position: x.position + Vector3::new(0.0, 3.0, 0.0), ..x.clone() }).collect();
        let poses = vec![(0, 0, a.clone()), (0, 1, a.clone()), (1, 0, b.clone()), (1, 1, shifted)];
        let table = placements_from_poses(poses, 2, 2, &MapParams::new(1.0, 6.0).unwrap()).unwrap();
        (table, vec![a, b])
    }

    #[test]
    fn probe_of_native_single_protein_matches_target() {
        use crate::assembly::{placements_from_poses, MapParams};
        let a = vec![atom(0.2, 0.0, 0.0), atom(1.5, 0.5, -0.5)];
        let res = Resolution::new(6.0).unwrap();
        let table = placements_from_poses(vec![(0, 0, a.clone())], 1, 1, &MapParams::new(1.0, 6.0).unwrap()).unwrap();
        let target = crate::grid::synthesize_map(&a, 1.0, res, None).unwrap();
        let x = AssignmentVector::from_choices(&[0], 1).unwrap();
        let probe = probe_map(&x, &table, res, &target).unwrap();
        let diff = probe.values().iter().zip(target.values()).map(|(p, t)| (p - t).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-9);
    }

    #[test]
    fn probe_of_two_proteins_matches_union_map() {
        let (table, natives) = two_protein_table();
        let res = Resolution::new(6.0).unwrap();
        let union: Vec<AtomRecord> = natives.concat();
        let target = crate::grid::synthesize_map(&union, 1.0, res, None).unwrap();
        let x = AssignmentVector::from_choices(&[0, 0], 2).unwrap();
        let probe = probe_map(&x, &table, res, &target).unwrap();
        let diff = probe.values().iter().zip(target.values()).map(|(p, t)| (p - t).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-9);
    }

    #[test]
    fn beta_counts_proteins_within_threshold() {
        let (table, natives) = two_protein_table();
        let native = AssignmentVector::from_choices(&[0, 0], 2).unwrap();
        let fit = evaluate_fit(&native, &table, &natives, DEFAULT_RMSD_THRESHOLD).unwrap();
        assert_eq!(fit.beta, 1.0);
        assert_eq!(fit.per_protein_rmsd, vec![0.0, 0.0]);
        let moved = AssignmentVector::from_choices(&[0, 1], 2).unwrap();
        let fit = evaluate_fit(&moved, &table, &natives, 3.0).unwrap();
        assert!((fit.per_protein_rmsd[1] - 3.0).abs() < 1e-12);
        // the threshold is inclusive
        assert_eq!(fit.beta, 1.0);
        let fit = evaluate_fit(&moved, &table, &natives, 2.9).unwrap();
        assert_eq!(fit.beta, 0.5);
        assert_eq!(fit.correct, vec![true, false]);
    }

    #[test]
    fn lap_score_examples() {
        let a = random_map(6, 2);
        let b = random_map(6, 3);
        let lap = laplacian_filter(&a).unwrap();
        let self_score = lap_score(&a, &a).unwrap();
        let sq: f64 = lap.values().iter().map(|v| v * v).sum();
        assert!((self_score - sq).abs() <= 1e-12 * sq);
        assert!(self_score >= 0.0);
        let zero = DensityMap::zeros([6; 3], [0.0; 3], 1.0).unwrap();
        assert_eq!(lap_score(&zero, &a).unwrap(), 0.0);
        assert_eq!(lap_score(&a, &b).unwrap(), lap_score(&b, &a).unwrap());
    }
}
