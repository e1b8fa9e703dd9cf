//! Candidate placements and construction of the assembly problem
//! `(Q, b, A)`.

mod generate;
pub mod plac;
pub mod prob;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

pub use generate::{generate_placements, placements_from_poses, MapParams, Perturbation};

use crate::error::{Error, Result};
use crate::grid::{cross_correlate, laplacian_filter, synthesize_map, AtomRecord, DensityMap};

/// Relative asymmetry tolerated in a loaded or hand-built `Q`.
const SYMMETRY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScoreKind {
    Ccf,
    Contact,
    SkinCore,
    CoreSkin,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 4] = [ScoreKind::Contact, ScoreKind::Ccf, ScoreKind::SkinCore, ScoreKind::CoreSkin];

    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Ccf => "ccf",
            ScoreKind::Contact => "contact",
            ScoreKind::SkinCore => "skin-core",
            ScoreKind::CoreSkin => "core-skin",
        }
    }

    /// Tag stored in `PROB` files.
    pub fn tag(self) -> u32 {
        match self {
            ScoreKind::Ccf => 0,
            ScoreKind::Contact => 1,
            ScoreKind::SkinCore => 2,
            ScoreKind::CoreSkin => 3,
        }
    }

    pub fn from_tag(tag: u32) -> Result<Self> {
        Ok(match tag {
            0 => ScoreKind::Ccf,
            1 => ScoreKind::Contact,
            2 => ScoreKind::SkinCore,
            3 => ScoreKind::CoreSkin,
            t => return Err(Error::Format(format!("unknown score kind tag {t}"))),
        })
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "ccf" => Ok(ScoreKind::Ccf),
            "contact" | "lap" => Ok(ScoreKind::Contact),
            "skin-core" | "skincore" => Ok(ScoreKind::SkinCore),
            "core-skin" | "coreskin" => Ok(ScoreKind::CoreSkin),
            other => Err(Error::InvalidParameter(format!("unknown score kind {other:?}"))),
        }
    }
}

/// One candidate rigid pose of one protein, with its density map.
/// Indices are 0-based.
#[derive(Debug, Clone)]
pub struct Placement {
    protein: usize,
    position: usize,
    atoms: Vec<AtomRecord>,
    map: DensityMap,
    laplacian: OnceLock<DensityMap>,
}

impl PartialEq for Placement {
    fn eq(&self, other: &Self) -> bool {
        self.protein == other.protein
            && self.position == other.position
            && self.atoms == other.atoms
            && self.map == other.map
    }
}

impl Placement {
    pub fn new(protein: usize, position: usize, atoms: Vec<AtomRecord>, map: DensityMap) -> Self {
        Self { protein, position, atoms, map, laplacian: OnceLock::new() }
    }

    pub fn from_atoms(protein: usize, position: usize, atoms: Vec<AtomRecord>, params: &MapParams) -> Result<Self> {
        let map = synthesize_map(&atoms, params.voxel_size, params.resolution, params.padding)?;
        Ok(Self::new(protein, position, atoms, map))
    }

    pub fn protein(&self) -> usize {
        self.protein
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn atoms(&self) -> &[AtomRecord] {
        &self.atoms
    }

    pub fn map(&self) -> &DensityMap {
        &self.map
    }

    /// Laplacian-filtered map, computed on first use.
    pub fn laplacian(&self) -> Result<&DensityMap> {
        if let Some(l) = self.laplacian.get() {
            return Ok(l);
        }
        let l = laplacian_filter(&self.map)?;
        Ok(self.laplacian.get_or_init(|| l))
    }
}

/// A complete set of `m × N` placements ordered by flat index
/// `protein * N + position`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementTable {
    proteins: usize,
    positions: usize,
    placements: Vec<Placement>,
}

impl PlacementTable {
    pub fn new(placements: Vec<Placement>, proteins: usize, positions: usize) -> Result<Self> {
        if positions == 0 {
            return Err(Error::NoPositions);
        }
        if proteins == 0 {
            return Err(Error::InvalidParameter("protein count must be at least 1".into()));
        }
        let mut slots: Vec<Option<Placement>> = vec![None; proteins * positions];
        for p in placements {
            if p.protein >= proteins || p.position >= positions {
                return Err(Error::InvalidParameter(format!(
                    "placement ({}, {}) outside {proteins}x{positions}",
                    p.protein, p.position
                )));
            }
            let slot = &mut slots[p.protein * positions + p.position];
            if slot.is_some() {
                return Err(Error::DuplicatePlacement { protein: p.protein, position: p.position });
            }
            *slot = Some(p);
        }
        let placements = slots
            .into_iter()
            .enumerate()
            .map(|(a, s)| s.ok_or(Error::MissingPlacement { protein: a / positions, position: a % positions }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { proteins, positions, placements })
    }

    pub fn proteins(&self) -> usize {
        self.proteins
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn get(&self, protein: usize, position: usize) -> &Placement {
        &self.placements[protein * self.positions + position]
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }
}

/// Score of placing `p` and `q` together; smaller is better for every kind.
pub fn pairwise_score(p: &Placement, q: &Placement, kind: ScoreKind) -> Result<f64> {
    if p.protein == q.protein {
        return Err(Error::SameProtein(p.protein, q.protein));
    }
    Ok(match kind {
        ScoreKind::Ccf => cross_correlate(&p.map, &q.map)?,
        ScoreKind::Contact => -cross_correlate(p.laplacian()?, q.laplacian()?)?,
        ScoreKind::SkinCore => -cross_correlate(p.laplacian()?, &q.map)?,
        ScoreKind::CoreSkin => -cross_correlate(&p.map, q.laplacian()?)?,
    })
}

/// Pairwise overlap matrix. For flat indices `a < b` on different proteins,
/// `Q[a][b] = Q[b][a] = pairwise_score(p_a, p_b)`; same-protein blocks are
/// zero.
///
/// Scoring the lower-index placement first keeps Skin-Core and Core-Skin
/// distinct: averaging both orders would make their matrices identical.
pub fn build_overlap_matrix(table: &PlacementTable, kind: ScoreKind) -> Result<DMatrix<f64>> {
    let n = table.len();
    let per = table.positions;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| ((a / per + 1) * per..n).map(move |b| (a, b))).collect();
    let scores = pairs
        .par_iter()
        .map(|&(a, b)| pairwise_score(&table.placements[a], &table.placements[b], kind))
        .collect::<Result<Vec<_>>>()?;
    let mut q = DMatrix::zeros(n, n);
    for (&(a, b), s) in pairs.iter().zip(scores) {
        q[(a, b)] = s;
        q[(b, a)] = s;
    }
    Ok(q)
}

/// Relevance of each placement: Laplacian-filtered cross-correlation with
/// the complex map (filtered once). Larger is better.
pub fn build_relevance_vector(table: &PlacementTable, complex_map: &DensityMap) -> Result<DVector<f64>> {
    let target = laplacian_filter(complex_map)?;
    let values =
        table.placements.par_iter().map(|p| cross_correlate(p.laplacian()?, &target)).collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(values))
}

/// The `m × mN` one-hot constraint matrix: row `i` has ones in columns
/// `i·N .. (i+1)·N`.
pub fn build_constraint_matrix(proteins: usize, positions: usize) -> DMatrix<f64> {
    DMatrix::from_fn(proteins, proteins * positions, |i, a| if a / positions == i { 1.0 } else { 0.0 })
}

/// The instance `min xᵀQx − bᵀx s.t. Ax = 1, x ∈ {0,1}ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyProblem {
    proteins: usize,
    positions: usize,
    q: DMatrix<f64>,
    b: DVector<f64>,
    score_kind: ScoreKind,
}

impl AssemblyProblem {
    /// Validates shapes, symmetry of `q` and the zero same-protein blocks.
    pub fn new(
        proteins: usize,
        positions: usize,
        q: DMatrix<f64>,
        b: DVector<f64>,
        score_kind: ScoreKind,
    ) -> Result<Self> {
        if positions == 0 {
            return Err(Error::NoPositions);
        }
        if proteins == 0 {
            return Err(Error::InvalidParameter("protein count must be at least 1".into()));
        }
        let n = proteins * positions;
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: q.nrows().max(q.ncols()) });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        if q.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite entry in Q or b".into()));
        }
        let scale = q.amax();
        let mut asym: f64 = 0.0;
        for a in 0..n {
            for c in a + 1..n {
                asym = asym.max((q[(a, c)] - q[(c, a)]).abs());
            }
        }
        if asym > SYMMETRY_RTOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        for a in 0..n {
            for c in 0..n {
                if a / positions == c / positions && q[(a, c)] != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "Q[{a}][{c}] couples two positions of protein {}",
                        a / positions
                    )));
                }
            }
        }
        Ok(Self { proteins, positions, q, b, score_kind })
    }

    pub fn proteins(&self) -> usize {
        self.proteins
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn n(&self) -> usize {
        self.proteins * self.positions
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn score_kind(&self) -> ScoreKind {
        self.score_kind
    }

    pub fn constraint_matrix(&self) -> DMatrix<f64> {
        build_constraint_matrix(self.proteins, self.positions)
    }

    pub fn flat_index(&self, protein: usize, position: usize) -> usize {
        protein * self.positions + position
    }
}

/// Build `(Q, b)` for `kind` from a placement table and the target map.
pub fn build_problem(table: &PlacementTable, complex_map: &DensityMap, kind: ScoreKind) -> Result<AssemblyProblem> {
    let q = build_overlap_matrix(table, kind)?;
    let b = build_relevance_vector(table, complex_map)?;
    AssemblyProblem::new(table.proteins, table.positions, q, b, kind)
}
