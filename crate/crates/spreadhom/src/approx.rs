//! Relative homological algebra with respect to spread representations: the radical
//! and its square, minimal approximations, minimal radical approximations (generic
//! and closed-form), resolutions, and the spread-global dimension.
//!
//! A [`SpreadFamily`] fixes a poset, a field, and a list of pairwise distinct spreads
//! with their representations, and caches a Hom basis for every ordered pair. The
//! family of all spreads drives the spread-relative theory; the subfamily of
//! principal upsets recovers ordinary projective covers and is what
//! `kan::support_subgrid` uses.
//!
//! Minimal approximations are computed as projective covers transported through
//! projectivization: the multiplicity of a summand `k_S` in the minimal
//! approximation of `M` is `dim Hom(k_S, M) / R_S`, where `R_S` is the image of
//! postcomposition with radical morphisms out of `k_S`; coset representatives follow
//! the pivot conventions of [`crate::linalg`], so output is deterministic.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{FieldSpec, Matrix};
use crate::poset::{Poset, PosetError, Spread, Subset};
use crate::rep::{
    direct_sum, hom_basis, kernel_of, Rep, RepMorphism, Representation,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApproxError {
    #[error("resolution did not terminate within bound {0}; this signals a bug")]
    DepthExceeded(usize),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A finite family of pairwise non-isomorphic spread representations with a complete
/// Hom cache.
pub struct SpreadFamily {
    poset: Arc<Poset>,
    field: FieldSpec,
    spreads: Vec<Spread>,
    reps: Vec<Rep>,
    /// Cached basis of `Hom(k_T, k_S)` for every pair with a nonzero Hom space;
    /// absent keys mean zero. Keeps the cache linear in the nonzero pairs rather
    /// than quadratic in the family.
    hom: HashMap<(usize, usize), Vec<RepMorphism>>,
    /// Pairs `(u, s)` with nonzero Hom, grouped by target for radical sweeps.
    nonzero_into: Vec<Vec<usize>>,
    index: HashMap<u64, usize>,
}

const NO_MORPHISMS: &[RepMorphism] = &[];

impl SpreadFamily {
    /// The family of all spreads of the poset, in canonical order.
    pub fn all_spreads(poset: Arc<Poset>, field: FieldSpec) -> SpreadFamily {
        let spreads = poset.enumerate_spreads();
        SpreadFamily::from_spreads(poset, field, spreads)
    }

    /// The subfamily of principal upsets; approximations over it are ordinary
    /// projective covers.
    pub fn projectives(poset: Arc<Poset>, field: FieldSpec) -> SpreadFamily {
        let spreads = (0..poset.len())
            .map(|p| Spread::from_subset(&poset, poset.up_of(p)).expect("principal upsets are spreads"))
            .collect();
        SpreadFamily::from_spreads(poset, field, spreads)
    }

    pub fn from_spreads(poset: Arc<Poset>, field: FieldSpec, spreads: Vec<Spread>) -> SpreadFamily {
        let reps: Vec<Rep> = spreads
            .iter()
            .map(|s| Representation::spread_rep(poset.clone(), field, s))
            .collect();
        let index: HashMap<u64, usize> =
            spreads.iter().enumerate().map(|(i, s)| (s.members().0, i)).collect();
        assert_eq!(index.len(), spreads.len(), "family spreads must be pairwise distinct");
        let n = spreads.len();
        let mut hom = HashMap::new();
        let mut nonzero_into = vec![Vec::new(); n];
        for t in 0..n {
            for s in 0..n {
                if spreads[t].members().inter(spreads[s].members()).is_empty() {
                    continue;
                }
                let basis = hom_basis(&reps[t], &reps[s]);
                if !basis.is_empty() {
                    hom.insert((t, s), basis);
                    nonzero_into[s].push(t);
                }
            }
        }
        SpreadFamily { poset, field, spreads, reps, hom, nonzero_into, index }
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn len(&self) -> usize {
        self.spreads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spreads.is_empty()
    }

    pub fn spreads(&self) -> &[Spread] {
        &self.spreads
    }

    pub fn spread(&self, i: usize) -> &Spread {
        &self.spreads[i]
    }

    pub fn rep(&self, i: usize) -> &Rep {
        &self.reps[i]
    }

    pub fn index_of(&self, members: Subset) -> Option<usize> {
        self.index.get(&members.0).copied()
    }

    pub fn hom(&self, t: usize, s: usize) -> &[RepMorphism] {
        self.hom.get(&(t, s)).map_or(NO_MORPHISMS, Vec::as_slice)
    }

    /// Sources `T` with `Hom(k_T, k_S)` nonzero, ascending.
    pub fn sources_into(&self, s: usize) -> &[usize] {
        &self.nonzero_into[s]
    }

    /// Basis of the radical `rad(k_T, k_S)`: the full Hom space for distinct spreads
    /// (non-isomorphic indecomposables), empty for `T = S` since `End(k_S) = k`.
    pub fn rad_basis(&self, t: usize, s: usize) -> &[RepMorphism] {
        if t == s {
            NO_MORPHISMS
        } else {
            self.hom(t, s)
        }
    }

    /// Basis of the span `rad^2(k_T, k_S) = span{ h∘g : g in rad(T,U), h in rad(U,S) }`,
    /// computed by stacking all composites and row-reducing.
    pub fn rad2_basis(&self, t: usize, s: usize) -> Vec<RepMorphism> {
        let mut flats: Vec<Vec<u32>> = Vec::new();
        for &u in self.sources_into(s) {
            if u == t || u == s || self.hom(t, u).is_empty() {
                continue;
            }
            for g in self.rad_basis(t, u) {
                for h in self.rad_basis(u, s) {
                    flats.push(h.compose(g).flatten());
                }
            }
        }
        if flats.is_empty() {
            return Vec::new();
        }
        let (reduced, pivots) = Matrix::from_rows(self.field, &flats).rref();
        pivots
            .iter()
            .enumerate()
            .map(|(row, _)| {
                RepMorphism::from_flat(
                    self.reps[t].clone(),
                    self.reps[s].clone(),
                    reduced.row(row),
                )
            })
            .collect()
    }

    /// Hom bases from every family member into `m`, with a cheap support prefilter:
    /// a morphism out of `k_T` is determined by its values on `min T`, so it vanishes
    /// when `m` does there.
    fn hom_into(&self, m: &Rep) -> Vec<Vec<RepMorphism>> {
        (0..self.len())
            .map(|t| {
                let alive = self.spreads[t].mins().iter().any(|p| m.dim_at(p) > 0);
                if alive {
                    hom_basis(&self.reps[t], m)
                } else {
                    Vec::new()
                }
            })
            .collect()
    }
}

/// A morphism from a labeled direct sum of spread representations into a target.
#[derive(Debug, Clone)]
pub struct Approximation {
    target: Rep,
    /// One entry per summand copy, in canonical family order.
    summands: Vec<Spread>,
    morphism: RepMorphism,
}

impl Approximation {
    pub fn target(&self) -> &Rep {
        &self.target
    }

    pub fn summands(&self) -> &[Spread] {
        &self.summands
    }

    pub fn domain(&self) -> &Rep {
        self.morphism.source()
    }

    pub fn morphism(&self) -> &RepMorphism {
        &self.morphism
    }

    /// Multiset of summands keyed by member bitmask.
    pub fn summand_multiset(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for s in &self.summands {
            *out.entry(s.members().0).or_insert(0) += 1;
        }
        out
    }
}

fn assemble_morphism(
    family: &SpreadFamily,
    target: &Rep,
    chosen: &[(usize, RepMorphism)],
) -> Approximation {
    let poset = family.poset().clone();
    let parts: Vec<Rep> = chosen.iter().map(|&(t, _)| family.rep(t).clone()).collect();
    let (sum, _) = direct_sum(poset.clone(), family.field(), &parts);
    let n = poset.len();
    let components: Vec<Matrix> = (0..n)
        .map(|p| {
            let mut big = Matrix::zero(family.field(), target.dim_at(p), sum.dim_at(p));
            let mut col = 0;
            for (_, f) in chosen {
                let block = f.component(p);
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        big.set(r, col + c, block.at(r, c));
                    }
                }
                col += block.cols();
            }
            big
        })
        .collect();
    let morphism = RepMorphism::from_parts_unchecked(sum, target.clone(), components);
    let summands = chosen.iter().map(|&(t, _)| family.spread(t).clone()).collect();
    Approximation { target: target.clone(), summands, morphism }
}

/// Coordinates of `v` in the basis given by the columns of `basis_matrix`.
fn coords_in_basis(basis_matrix: &Matrix, v: &[u32]) -> Vec<u32> {
    basis_matrix
        .solve(v)
        .expect("shapes agree")
        .expect("vector lies in the span of the basis")
}

/// The minimal approximation of `m` by the family: for each spread `S` the
/// multiplicity is `dim Hom(k_S, M) / R_S` with `R_S` spanned by the composites
/// `h ∘ rho` over radical morphisms `rho` out of `k_S`, and the components are the
/// non-pivot Hom-basis elements representing the quotient.
pub fn minimal_approximation(family: &SpreadFamily, m: &Rep) -> Approximation {
    let hom_into = family.hom_into(m);
    let mut chosen: Vec<(usize, RepMorphism)> = Vec::new();
    for t in 0..family.len() {
        if hom_into[t].is_empty() {
            continue;
        }
        let flat_len = hom_into[t][0].flatten().len();
        let basis_matrix = Matrix::from_cols(
            family.field(),
            flat_len,
            &hom_into[t].iter().map(RepMorphism::flatten).collect::<Vec<_>>(),
        );
        // R_t in Hom-basis coordinates.
        let mut radical_image: Vec<Vec<u32>> = Vec::new();
        for u in 0..family.len() {
            if u == t || hom_into[u].is_empty() || family.hom(t, u).is_empty() {
                continue;
            }
            for rho in family.rad_basis(t, u) {
                for h in &hom_into[u] {
                    radical_image.push(coords_in_basis(&basis_matrix, &h.compose(rho).flatten()));
                }
            }
        }
        let free = crate::linalg::quotient_representatives(
            family.field(),
            hom_into[t].len(),
            &radical_image,
        );
        for rep_vec in free {
            let i = rep_vec.iter().position(|&x| x == 1).expect("standard basis direction");
            chosen.push((t, hom_into[t][i].clone()));
        }
    }
    assemble_morphism(family, m, &chosen)
}

/// Whether postcomposition with `f` hits every morphism from every family spread
/// into the target; solved one linear system per Hom-basis element, independently of
/// how `f` was constructed.
pub fn is_approximation(family: &SpreadFamily, f: &RepMorphism) -> bool {
    let c = f.source();
    let m = f.target();
    for t in 0..family.len() {
        let into_m = hom_basis(family.rep(t), m);
        if into_m.is_empty() {
            continue;
        }
        let into_c = hom_basis(family.rep(t), c);
        let composed: Vec<Vec<u32>> = into_c.iter().map(|g| f.compose(g).flatten()).collect();
        let flat_len = into_m[0].flatten().len();
        let postcomp = Matrix::from_cols(family.field(), flat_len, &composed);
        for h in &into_m {
            if postcomp.solve(&h.flatten()).expect("shapes agree").is_none() {
                return false;
            }
        }
    }
    true
}

/// The minimal radical approximation of the family spread `s`: multiplicity of `k_T`
/// is `dim rad(T, S) / rad^2(T, S)` and components are coset representatives.
pub fn minimal_radical_approximation(family: &SpreadFamily, s: usize) -> Approximation {
    let target = family.rep(s).clone();
    let mut chosen: Vec<(usize, RepMorphism)> = Vec::new();
    for t in 0..family.len() {
        let rad = family.rad_basis(t, s);
        if rad.is_empty() {
            continue;
        }
        let flat_len = rad[0].flatten().len();
        let basis_matrix = Matrix::from_cols(
            family.field(),
            flat_len,
            &rad.iter().map(RepMorphism::flatten).collect::<Vec<_>>(),
        );
        let rad2_coords: Vec<Vec<u32>> = family
            .rad2_basis(t, s)
            .iter()
            .map(|g| coords_in_basis(&basis_matrix, &g.flatten()))
            .collect();
        let free =
            crate::linalg::quotient_representatives(family.field(), rad.len(), &rad2_coords);
        debug_assert!(
            free.len() <= 1,
            "rad/rad^2 between spread representations is at most one-dimensional"
        );
        for rep_vec in free {
            let i = rep_vec.iter().position(|&x| x == 1).expect("standard basis direction");
            chosen.push((t, rad[i].clone()));
        }
    }
    assemble_morphism(family, &target, &chosen)
}

/// The domain of the minimal spread-radical approximation of `k_S`, by the closed
/// form: one summand `V = S ⊔ (down(x) \ down(S))` per cover `x` of `S`, and one
/// summand per connected component `W` of `S \ {s}`, `s` minimal in `S`, for which
/// `S = W ⊔ (up(s) \ up(W))`. Each qualifying spread appears with multiplicity one.
pub fn radapp_domain_closed_form(poset: &Poset, s: &Spread) -> Vec<Spread> {
    let members = s.members();
    let down_s = poset.closure(members, crate::poset::Dir::Down);
    let mut out: Vec<Spread> = Vec::new();
    for x in poset.covers(members).iter() {
        let v = members.union(poset.down_of(x).minus(down_s));
        let v = Spread::from_subset(poset, v).expect("cover extensions of spreads are spreads");
        out.push(v);
    }
    for min_el in s.mins().iter() {
        let rest = members.minus(Subset::singleton(min_el));
        for w in poset.connected_components(rest) {
            let Some(w_spread) = Spread::from_subset(poset, w) else {
                continue;
            };
            let wedge = poset.up_of(min_el).minus(poset.closure(w, crate::poset::Dir::Up));
            if w.inter(wedge).is_empty() && w.union(wedge) == members {
                out.push(w_spread);
            }
        }
    }
    out.sort_by_key(|t| (t.len(), t.members().0));
    // Each qualifying spread occurs once: the added region determines the cover
    // and the removed wedge determines the minimum.
    debug_assert!(out.windows(2).all(|w| w[0] != w[1]));
    out
}

/// One approximation step of a resolution, with the kernel it leaves behind.
#[derive(Debug, Clone)]
pub struct ResolutionStep {
    pub approximation: Approximation,
    pub kernel: Rep,
}

/// A chain of minimal approximations of successive kernels, ending when a kernel
/// vanishes.
#[derive(Debug, Clone)]
pub struct Resolution {
    target: Rep,
    steps: Vec<ResolutionStep>,
}

impl Resolution {
    pub fn target(&self) -> &Rep {
        &self.target
    }

    pub fn steps(&self) -> &[ResolutionStep] {
        &self.steps
    }

    /// `min { i : C_{i+1} = 0 }`; `None` for the zero module (empty resolution).
    pub fn length(&self) -> Option<usize> {
        if self.steps.is_empty() {
            None
        } else {
            Some(self.steps.len() - 1)
        }
    }
}

/// Iterates minimal approximations on successive kernels. The default depth bound is
/// `2 * |P|`; exceeding it signals a bug, not mathematics.
pub fn minimal_resolution(
    family: &SpreadFamily,
    m: &Rep,
    max_depth: Option<usize>,
) -> Result<Resolution, ApproxError> {
    let bound = max_depth.unwrap_or(2 * family.poset().len());
    let mut steps = Vec::new();
    if m.is_zero() {
        return Ok(Resolution { target: m.clone(), steps });
    }
    let mut current = m.clone();
    loop {
        let approximation = minimal_approximation(family, &current);
        let (kernel, _incl) = kernel_of(approximation.morphism());
        let done = kernel.is_zero();
        steps.push(ResolutionStep { approximation, kernel: kernel.clone() });
        if done {
            return Ok(Resolution { target: m.clone(), steps });
        }
        if steps.len() > bound {
            return Err(ApproxError::DepthExceeded(bound));
        }
        current = kernel;
    }
}

/// The spread-dimension of `m`: length of its minimal resolution, or `None` for the
/// zero module (excluded from global-dimension maxima).
pub fn spread_pdim(family: &SpreadFamily, m: &Rep) -> Result<Option<usize>, ApproxError> {
    Ok(minimal_resolution(family, m, None)?.length())
}

/// The spread-global dimension of the poset: the maximum of `pdim(ker rho_S)` over
/// all spreads `S`, where `rho_S` is the minimal radical approximation of `k_S`.
/// Zero kernels are skipped; if every kernel vanishes the dimension is 0.
pub fn spread_gldim(family: &SpreadFamily) -> Result<usize, ApproxError> {
    let mut best = 0;
    for s in 0..family.len() {
        let rho = minimal_radical_approximation(family, s);
        let (kernel, _) = kernel_of(rho.morphism());
        if let Some(pd) = spread_pdim(family, &kernel)? {
            best = best.max(pd);
        }
    }
    Ok(best)
}

/// Convenience: build the family over `poset` and compute the spread-global
/// dimension in one call.
pub fn spread_gldim_of_poset(poset: Arc<Poset>, field: FieldSpec) -> Result<usize, ApproxError> {
    let family = SpreadFamily::all_spreads(poset, field);
    spread_gldim(&family)
}
