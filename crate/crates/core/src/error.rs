use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no non-hydrogen atoms to voxelize")]
    EmptyAtoms,

    #[error("voxel size must be positive, got {0}")]
    NonPositiveVoxelSize(f64),

    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),

    #[error("resolution must be positive, got {0}")]
    NonPositiveResolution(f64),

    #[error("map dims {0:?} too small for a 3x3x3 stencil")]
    MapTooSmall([usize; 3]),

    #[error("voxel size mismatch: {0} vs {1}")]
    VoxelSizeMismatch(f64, f64),

    #[error("map origins are not lattice-aligned (offset {0:?} voxels)")]
    LatticeMismatch([f64; 3]),

    #[error("map dims mismatch: {0:?} vs {1:?}")]
    DimsMismatch([usize; 3], [usize; 3]),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("position count must be at least 1")]
    NoPositions,

    #[error("placements {0} and {1} belong to the same protein")]
    SameProtein(usize, usize),

    #[error("missing placement for protein {protein}, position {position}")]
    MissingPlacement { protein: usize, position: usize },

    #[error("duplicate placement for protein {protein}, position {position}")]
    DuplicatePlacement { protein: usize, position: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("infeasible assignment: {0}")]
    Infeasible(String),

    #[error("problem size {size} exceeds cap {cap}")]
    SizeCap { size: u128, cap: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("atom count mismatch: {0} vs {1}")]
    AtomCountMismatch(usize, usize),

    #[error("unknown element symbol {0:?}")]
    UnknownElement(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
