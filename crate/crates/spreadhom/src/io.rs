//! JSON formats and inline-spec parsing shared by the CLI and the browser demo.
//!
//! Posets are `{"type":"grid","factors":[4,2]}` or
//! `{"type":"explicit","n":3,"relations":[[1,0],[1,2]]}`; subsets are sorted
//! element-index arrays; representations carry one matrix per Hasse edge keyed
//! `"i->j"`; aligned inclusions are per-factor index lists. Reports re-encode
//! spreads canonically as (members, min-set, cover-set), with coordinate tuples
//! added for grid posets.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{Approximation, Resolution};
use crate::kan::{aligned_inclusion, AlignedGridInclusion, KanError};
use crate::linalg::{FieldSpec, LinalgError, Matrix};
use crate::poset::{build_grid, build_poset, GridPoset, Poset, PosetError, Spread, Subset};
use crate::rep::{Rep, RepError, Representation};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("bad grid spec '{0}': expected sizes like 4x2 or 4x2x3")]
    BadGridSpec(String),
    #[error("bad spread spec '{0}': expected up-<el>, down-<el>, or comma-separated indices")]
    BadSpreadSpec(String),
    #[error("subset {0:?} is not a spread of the poset")]
    NotASpread(Vec<usize>),
    #[error("unknown map key '{0}': expected 'i->j' for a Hasse edge")]
    BadMapKey(String),
    #[error("missing matrix for Hasse edge {0} -> {1}")]
    MissingEdge(usize, usize),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Kan(#[from] KanError),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Parses inline grid syntax like `4x2` or `4x2x3`.
pub fn parse_grid_spec(spec: &str) -> Result<Vec<usize>, IoError> {
    let factors: Result<Vec<usize>, _> =
        spec.split(['x', 'X']).map(|part| part.trim().parse::<usize>()).collect();
    match factors {
        Ok(f) if !f.is_empty() && f.iter().all(|&m| m > 0) => Ok(f),
        _ => Err(IoError::BadGridSpec(spec.to_string())),
    }
}

/// Parses a spread spec: `up-<el>`, `down-<el>` (element index or a letter `a`..`z`
/// naming index 0..25), or a comma-separated element list like `0,1,3`.
pub fn parse_spread_spec(poset: &Poset, spec: &str) -> Result<Spread, IoError> {
    let parse_el = |text: &str| -> Option<usize> {
        if let Ok(i) = text.parse::<usize>() {
            return Some(i);
        }
        let mut chars = text.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => Some(c as usize - 'a' as usize),
            _ => None,
        }
    };
    let members = if let Some(rest) = spec.strip_prefix("up-") {
        let el = parse_el(rest).ok_or_else(|| IoError::BadSpreadSpec(spec.into()))?;
        poset.up_of(el)
    } else if let Some(rest) = spec.strip_prefix("down-") {
        let el = parse_el(rest).ok_or_else(|| IoError::BadSpreadSpec(spec.into()))?;
        poset.down_of(el)
    } else {
        let indices: Result<Vec<usize>, _> =
            spec.split(',').map(|p| p.trim().parse::<usize>()).collect();
        let indices = indices.map_err(|_| IoError::BadSpreadSpec(spec.into()))?;
        Subset::from_indices(indices)
    };
    Spread::from_subset(poset, members).ok_or_else(|| IoError::NotASpread(members.indices()))
}

/// A poset, as either a grid or an explicit relation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PosetSpec {
    Grid { factors: Vec<usize> },
    Explicit { n: usize, relations: Vec<(usize, usize)> },
}

impl PosetSpec {
    pub fn build(&self) -> Result<(Arc<Poset>, Option<GridPoset>), IoError> {
        match self {
            PosetSpec::Grid { factors } => {
                let grid = build_grid(factors)?;
                Ok((Arc::new(grid.poset().clone()), Some(grid)))
            }
            PosetSpec::Explicit { n, relations } => {
                Ok((Arc::new(build_poset(*n, relations)?), None))
            }
        }
    }
}

/// On-disk form of a representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub poset: PosetSpec,
    pub p: u64,
    pub dims: Vec<usize>,
    /// One entry per Hasse edge, keyed `"i->j"`, row-major `dims[j] x dims[i]`.
    pub maps: BTreeMap<String, Vec<Vec<u32>>>,
}

fn edge_key(x: usize, y: usize) -> String {
    format!("{x}->{y}")
}

fn parse_edge_key(key: &str) -> Result<(usize, usize), IoError> {
    let (x, y) = key.split_once("->").ok_or_else(|| IoError::BadMapKey(key.into()))?;
    let x = x.trim().parse().map_err(|_| IoError::BadMapKey(key.into()))?;
    let y = y.trim().parse().map_err(|_| IoError::BadMapKey(key.into()))?;
    Ok((x, y))
}

impl RepresentationJson {
    pub fn build(&self) -> Result<Rep, IoError> {
        let (poset, _) = self.poset.build()?;
        let field = FieldSpec::new(self.p)?;
        let mut maps = Vec::with_capacity(poset.hasse_edges().len());
        for key in self.maps.keys() {
            let (x, y) = parse_edge_key(key)?;
            if !poset.hasse_edges().contains(&(x, y)) {
                return Err(IoError::BadMapKey(key.clone()));
            }
        }
        for &(x, y) in poset.hasse_edges() {
            let rows = self
                .maps
                .get(&edge_key(x, y))
                .ok_or(IoError::MissingEdge(x, y))?;
            let matrix = if rows.is_empty() {
                Matrix::zero(field, self.dims[y], self.dims[x])
            } else {
                Matrix::from_rows(field, rows)
            };
            maps.push(matrix);
        }
        Ok(Representation::new(poset, field, self.dims.clone(), maps)?)
    }

    pub fn from_rep(spec: PosetSpec, rep: &Rep) -> RepresentationJson {
        let mut maps = BTreeMap::new();
        for (e, &(x, y)) in rep.poset().hasse_edges().iter().enumerate() {
            maps.insert(edge_key(x, y), rep.edge_map(e).to_row_vecs());
        }
        RepresentationJson {
            poset: spec,
            p: rep.field().modulus() as u64,
            dims: rep.dims().to_vec(),
            maps,
        }
    }
}

/// On-disk form of a morphism: both representations plus one component matrix per
/// element, keyed by element index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismJson {
    pub source: RepresentationJson,
    pub target: RepresentationJson,
    pub components: BTreeMap<String, Vec<Vec<u32>>>,
}

impl MorphismJson {
    pub fn build(&self) -> Result<crate::rep::RepMorphism, IoError> {
        let source = self.source.build()?;
        let target = self.target.build()?;
        let field = source.field();
        let mut components = Vec::with_capacity(source.poset().len());
        for p in 0..source.poset().len() {
            let rows = self
                .components
                .get(&p.to_string())
                .ok_or_else(|| IoError::BadMapKey(p.to_string()))?;
            let m = if rows.is_empty() {
                Matrix::zero(field, target.dim_at(p), source.dim_at(p))
            } else {
                Matrix::from_rows(field, rows)
            };
            components.push(m);
        }
        Ok(crate::rep::RepMorphism::new(source, target, components)?)
    }

    pub fn from_morphism(
        spec: PosetSpec,
        f: &crate::rep::RepMorphism,
    ) -> MorphismJson {
        MorphismJson {
            source: RepresentationJson::from_rep(spec.clone(), f.source()),
            target: RepresentationJson::from_rep(spec, f.target()),
            components: (0..f.source().poset().len())
                .map(|p| (p.to_string(), f.component(p).to_row_vecs()))
                .collect(),
        }
    }
}

/// On-disk form of an aligned grid inclusion: per-factor image index lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InclusionJson {
    pub factors: Vec<Vec<usize>>,
}

impl InclusionJson {
    pub fn build(&self, target: &GridPoset) -> Result<AlignedGridInclusion, IoError> {
        let sizes: Vec<usize> = self.factors.iter().map(Vec::len).collect();
        let source = build_grid(&sizes)?;
        Ok(aligned_inclusion(source, target.clone(), self.factors.clone())?)
    }
}

/// Canonical encoding of a spread: members plus the (min, cover) antichain pair,
/// with coordinate tuples for grid posets.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpreadJson {
    pub members: Subset,
    pub min: Subset,
    pub cover: Subset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member_coords: Option<Vec<Vec<usize>>>,
}

impl SpreadJson {
    pub fn from_spread(s: &Spread, grid: Option<&GridPoset>) -> SpreadJson {
        SpreadJson {
            members: s.members(),
            min: s.mins(),
            cover: s.covers(),
            member_coords: grid
                .map(|g| s.members().iter().map(|i| g.coords(i)).collect()),
        }
    }
}

/// Report form of an approximation: the summand multiset with canonical spread
/// encodings, and the component count per element.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub target_dims: Vec<usize>,
    pub summands: Vec<SpreadJson>,
    pub multiplicities: Vec<usize>,
    pub domain_dims: Vec<usize>,
}

impl ApproximationReport {
    pub fn from_approximation(a: &Approximation, grid: Option<&GridPoset>) -> Self {
        let multiset = a.summand_multiset();
        let mut summands = Vec::new();
        let mut multiplicities = Vec::new();
        for (&mask, &mult) in &multiset {
            let spread = a
                .summands()
                .iter()
                .find(|s| s.members().0 == mask)
                .expect("multiset keys come from summands");
            summands.push(SpreadJson::from_spread(spread, grid));
            multiplicities.push(mult);
        }
        ApproximationReport {
            target_dims: a.target().dims().to_vec(),
            summands,
            multiplicities,
            domain_dims: a.domain().dims().to_vec(),
        }
    }
}

/// Report form of a resolution: per-step summands, kernel dimension vectors, and
/// wall-clock seconds when measured.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub steps: Vec<ResolutionStepReport>,
    /// `None` for the zero module.
    pub pdim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolutionStepReport {
    pub approximation: ApproximationReport,
    pub kernel_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl ResolutionReport {
    pub fn from_resolution(r: &Resolution, grid: Option<&GridPoset>) -> Self {
        ResolutionReport {
            steps: r
                .steps()
                .iter()
                .map(|s| ResolutionStepReport {
                    approximation: ApproximationReport::from_approximation(
                        &s.approximation,
                        grid,
                    ),
                    kernel_dims: s.kernel.dims().to_vec(),
                    seconds: None,
                })
                .collect(),
            pdim: r.length(),
        }
    }
}
