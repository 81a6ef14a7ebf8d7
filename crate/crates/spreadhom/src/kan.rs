//! Aligned grid inclusions and the functors along them: floor map, restriction,
//! left Kan extension, contraction, padding, and finite-support subgrid extraction.
//!
//! An [`AlignedGridInclusion`] is a product of strictly increasing maps between the
//! chain factors of two grids. Its floor map sends `p` (in the upset of the image)
//! to the coordinatewise largest preimage below it; the left Kan extension is
//! precomposition with the floor followed by zero padding, and the contraction is
//! its left adjoint, computed pointwise by colimits over floor fibers.

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{quotient_map, quotient_section, Matrix};
use crate::poset::{build_grid, Dir, GridPoset, Poset, PosetError, Subset};
use crate::rep::{restrict, Rep, RepError, RepMorphism, Representation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KanError {
    #[error("source and target grids have different factor counts ({0} vs {1})")]
    FactorCountMismatch(usize, usize),
    #[error("factor map {0} is not strictly increasing")]
    NonIncreasing(usize),
    #[error("factor map {0} has {1} entries, expected {2}")]
    FactorLength(usize, usize, usize),
    #[error("factor map {0} hits value {1}, target factor has size {2}")]
    ValueOutOfRange(usize, usize, usize),
    #[error("element lies outside the upset of the inclusion image")]
    OutsideImageUpset,
    #[error("representation support lies outside the upset of the inclusion image")]
    SupportOutsideImageUpset,
    #[error("padding requires an upset")]
    NotUpset,
    #[error("representation lives over an unexpected poset")]
    WrongPoset,
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// A product of strictly increasing chain maps between two grid posets.
#[derive(Debug, Clone)]
pub struct AlignedGridInclusion {
    source: GridPoset,
    target: GridPoset,
    factor_maps: Vec<Vec<usize>>,
    /// Image index per source element.
    image_of: Vec<usize>,
    source_poset: Arc<Poset>,
    target_poset: Arc<Poset>,
}

/// Validates and builds an aligned grid inclusion from per-factor index lists.
pub fn aligned_inclusion(
    source: GridPoset,
    target: GridPoset,
    factor_maps: Vec<Vec<usize>>,
) -> Result<AlignedGridInclusion, KanError> {
    let d = source.factors().len();
    if d != target.factors().len() {
        return Err(KanError::FactorCountMismatch(d, target.factors().len()));
    }
    if factor_maps.len() != d {
        return Err(KanError::FactorCountMismatch(factor_maps.len(), d));
    }
    for (j, map) in factor_maps.iter().enumerate() {
        if map.len() != source.factors()[j] {
            return Err(KanError::FactorLength(j, map.len(), source.factors()[j]));
        }
        if !map.windows(2).all(|w| w[0] < w[1]) {
            return Err(KanError::NonIncreasing(j));
        }
        for &v in map {
            if v >= target.factors()[j] {
                return Err(KanError::ValueOutOfRange(j, v, target.factors()[j]));
            }
        }
    }
    let image_of: Vec<usize> = (0..source.len())
        .map(|q| {
            let coords = source.coords(q);
            let image: Vec<usize> =
                coords.iter().enumerate().map(|(j, &c)| factor_maps[j][c]).collect();
            target.index(&image)
        })
        .collect();
    let inc = AlignedGridInclusion {
        source_poset: Arc::new(source.poset().clone()),
        target_poset: Arc::new(target.poset().clone()),
        source,
        target,
        factor_maps,
        image_of,
    };
    debug_assert!(inc.is_full_semilattice_morphism());
    Ok(inc)
}

/// The identity inclusion of a grid into itself.
pub fn identity_inclusion(grid: &GridPoset) -> AlignedGridInclusion {
    let maps = grid.factors().iter().map(|&m| (0..m).collect()).collect();
    aligned_inclusion(grid.clone(), grid.clone(), maps).expect("identity maps are increasing")
}

impl AlignedGridInclusion {
    pub fn source(&self) -> &GridPoset {
        &self.source
    }

    pub fn target(&self) -> &GridPoset {
        &self.target
    }

    pub fn source_poset(&self) -> &Arc<Poset> {
        &self.source_poset
    }

    pub fn target_poset(&self) -> &Arc<Poset> {
        &self.target_poset
    }

    pub fn factor_maps(&self) -> &[Vec<usize>] {
        &self.factor_maps
    }

    pub fn map_index(&self, q: usize) -> usize {
        self.image_of[q]
    }

    pub fn image(&self) -> Subset {
        Subset::from_indices(self.image_of.iter().copied())
    }

    pub fn map_subset(&self, s: Subset) -> Subset {
        Subset::from_indices(s.iter().map(|q| self.image_of[q]))
    }

    /// True exactly when every factor map sends 0 to 0; equivalent to the upset of
    /// the image being the whole target.
    pub fn origin_aligned(&self) -> bool {
        self.factor_maps.iter().all(|m| m[0] == 0)
    }

    pub fn upset_of_image(&self) -> Subset {
        self.target_poset.closure(self.image(), Dir::Up)
    }

    fn is_full_semilattice_morphism(&self) -> bool {
        let p = &self.target_poset;
        let q = &self.source_poset;
        for a in 0..q.len() {
            for b in 0..q.len() {
                let qa = self.image_of[a];
                let qb = self.image_of[b];
                // Full poset morphism both ways.
                if q.leq(a, b) != p.leq(qa, qb) {
                    return false;
                }
                // Joins are coordinatewise maxima on both sides.
                let join_src = self.source.index(
                    &self
                        .source
                        .coords(a)
                        .iter()
                        .zip(self.source.coords(b).iter())
                        .map(|(x, y)| *x.max(y))
                        .collect::<Vec<_>>(),
                );
                let join_dst = self.target.index(
                    &self
                        .target
                        .coords(qa)
                        .iter()
                        .zip(self.target.coords(qb).iter())
                        .map(|(x, y)| *x.max(y))
                        .collect::<Vec<_>>(),
                );
                if self.image_of[join_src] != join_dst {
                    return false;
                }
            }
        }
        true
    }

    /// The floor of `p`: coordinatewise, the largest source value mapping at or
    /// below `p`. Errors when some coordinate of `p` is below the whole factor map.
    pub fn floor_index(&self, p: usize) -> Result<usize, KanError> {
        let coords = self.target.coords(p);
        let mut out = Vec::with_capacity(coords.len());
        for (j, &c) in coords.iter().enumerate() {
            let q = self.factor_maps[j]
                .iter()
                .rposition(|&v| v <= c)
                .ok_or(KanError::OutsideImageUpset)?;
            out.push(q);
        }
        Ok(self.source.index(&out))
    }

    pub fn floor_subset(&self, s: Subset) -> Result<Subset, KanError> {
        let mut out = Subset::EMPTY;
        for p in s.iter() {
            out.insert(self.floor_index(p)?);
        }
        Ok(out)
    }

    /// Restriction: precomposition with the inclusion.
    pub fn restrict_rep(&self, m: &Rep) -> Result<Rep, KanError> {
        if m.poset().as_ref() != self.target_poset.as_ref() {
            return Err(KanError::WrongPoset);
        }
        Ok(restrict(m, self.source_poset.clone(), &self.image_of)?)
    }

    /// Left Kan extension: `(Lan M)(p) = M(floor p)` on the upset of the image, zero
    /// outside, with structure maps induced by the floor map.
    pub fn lan(&self, m: &Rep) -> Result<Rep, KanError> {
        if m.poset().as_ref() != self.source_poset.as_ref() {
            return Err(KanError::WrongPoset);
        }
        let field = m.field();
        let upset = self.upset_of_image();
        let n = self.target_poset.len();
        let floors: Vec<Option<usize>> = (0..n)
            .map(|p| if upset.contains(p) { Some(self.floor_index(p).unwrap()) } else { None })
            .collect();
        let dims: Vec<usize> =
            (0..n).map(|p| floors[p].map_or(0, |q| m.dim_at(q))).collect();
        let maps: Vec<Matrix> = self
            .target_poset
            .hasse_edges()
            .iter()
            .map(|&(x, y)| match (floors[x], floors[y]) {
                (Some(fx), Some(fy)) => m.map_for_pair(fx, fy),
                _ => Matrix::zero(field, dims[y], dims[x]),
            })
            .collect();
        Ok(Representation::from_parts_unchecked(self.target_poset.clone(), field, dims, maps))
    }

    /// Applies the left Kan extension to a morphism.
    pub fn lan_morphism(&self, f: &RepMorphism) -> Result<RepMorphism, KanError> {
        let src = self.lan(f.source())?;
        let dst = self.lan(f.target())?;
        let field = src.field();
        let upset = self.upset_of_image();
        let components: Vec<Matrix> = (0..self.target_poset.len())
            .map(|p| {
                if upset.contains(p) {
                    f.component(self.floor_index(p).unwrap()).clone()
                } else {
                    Matrix::zero(field, 0, 0)
                }
            })
            .collect();
        Ok(RepMorphism::from_parts_unchecked(src, dst, components))
    }

    /// The contraction (left adjoint of `lan`): pointwise the colimit of `M` over
    /// the fiber `{p in up(image) : floor(p) <= q}`. Requires the support of `M`
    /// inside the upset of the image; the computation then happens on that upset.
    pub fn contraction(&self, m: &Rep) -> Result<Rep, KanError> {
        if m.poset().as_ref() != self.target_poset.as_ref() {
            return Err(KanError::WrongPoset);
        }
        let upset = self.upset_of_image();
        if !m.support().is_subset_of(upset) {
            return Err(KanError::SupportOutsideImageUpset);
        }
        let field = m.field();
        let p_poset = &self.target_poset;
        let q_poset = &self.source_poset;
        let nq = q_poset.len();
        // Fiber D_q and its colimit data, per source element.
        let fibers: Vec<Vec<usize>> = (0..nq)
            .map(|q| {
                upset
                    .iter()
                    .filter(|&p| q_poset.leq(self.floor_index(p).unwrap(), q))
                    .collect()
            })
            .collect();
        struct ColimData {
            dim: usize,
            proj: Matrix,
            section: Matrix,
            offsets: Vec<usize>,
            members: Vec<usize>,
        }
        let colims: Vec<ColimData> = fibers
            .iter()
            .map(|members| {
                let mut offsets = vec![0usize; members.len() + 1];
                for (i, &p) in members.iter().enumerate() {
                    offsets[i + 1] = offsets[i] + m.dim_at(p);
                }
                let total = offsets[members.len()];
                let mut relations: Vec<Vec<u32>> = Vec::new();
                for (i, &x) in members.iter().enumerate() {
                    for (k, &y) in members.iter().enumerate() {
                        if x == y || !p_poset.leq(x, y) {
                            continue;
                        }
                        let a = m.map_for_pair(x, y);
                        for c in 0..m.dim_at(x) {
                            let mut rel = vec![0u32; total];
                            for r in 0..m.dim_at(y) {
                                rel[offsets[k] + r] = a.at(r, c);
                            }
                            rel[offsets[i] + c] = field.sub(rel[offsets[i] + c], 1);
                            relations.push(rel);
                        }
                    }
                }
                let (dim, proj) = quotient_map(field, total, &relations);
                let section = quotient_section(field, total, &relations);
                ColimData { dim, proj, section, offsets, members: members.clone() }
            })
            .collect();
        let dims: Vec<usize> = colims.iter().map(|c| c.dim).collect();
        let maps: Vec<Matrix> = q_poset
            .hasse_edges()
            .iter()
            .map(|&(qx, qy)| {
                // colim over D_{qx} -> colim over D_{qy}: represent, embed, project.
                let cx = &colims[qx];
                let cy = &colims[qy];
                let total_y = cy.offsets[cy.members.len()];
                let mut embed = Matrix::zero(field, total_y, cx.offsets[cx.members.len()]);
                for (i, &p) in cx.members.iter().enumerate() {
                    let k = cy
                        .members
                        .iter()
                        .position(|&pp| pp == p)
                        .expect("fibers grow monotonically");
                    for r in 0..m.dim_at(p) {
                        embed.set(cy.offsets[k] + r, cx.offsets[i] + r, 1);
                    }
                }
                cy.proj.mul(&embed.mul(&cx.section))
            })
            .collect();
        Ok(Representation::from_parts_unchecked(q_poset.clone(), field, dims, maps))
    }
}

/// Extends a representation of an upset (as its own poset, indices in mask order) by
/// zero to the whole poset.
pub fn padding(
    poset: &Arc<Poset>,
    upset: Subset,
    m: &Rep,
) -> Result<Rep, KanError> {
    if poset.closure(upset, Dir::Up) != upset {
        return Err(KanError::NotUpset);
    }
    let (induced, old_indices) = poset.induced(upset);
    if m.poset().as_ref() != &induced {
        return Err(KanError::WrongPoset);
    }
    let field = m.field();
    let mut dims = vec![0usize; poset.len()];
    for (new, &old) in old_indices.iter().enumerate() {
        dims[old] = m.dim_at(new);
    }
    let position_of = |old: usize| old_indices.iter().position(|&o| o == old);
    let maps: Vec<Matrix> = poset
        .hasse_edges()
        .iter()
        .map(|&(x, y)| match (position_of(x), position_of(y)) {
            (Some(nx), Some(ny)) => m.map_for_pair(nx, ny),
            _ => Matrix::zero(field, dims[y], dims[x]),
        })
        .collect();
    Ok(Representation::from_parts_unchecked(poset.clone(), field, dims, maps))
}

/// The generator and relation grades of the minimal standard presentation of `m`,
/// read off the projective cover of `m` and of its kernel.
pub fn presentation_grades(m: &Rep) -> Subset {
    let family = crate::approx::SpreadFamily::projectives(m.poset().clone(), m.field());
    let cover = crate::approx::minimal_approximation(&family, m);
    let mut grades = Subset::EMPTY;
    for s in cover.summands() {
        grades.insert(s.mins().iter().next().expect("principal upsets have a minimum"));
    }
    let (kernel, _) = crate::rep::kernel_of(cover.morphism());
    let relations = crate::approx::minimal_approximation(&family, &kernel);
    for s in relations.summands() {
        grades.insert(s.mins().iter().next().expect("principal upsets have a minimum"));
    }
    grades
}

/// The smallest aligned subgrid supporting minimal presentations of all the given
/// representations: presentation grades are projected to each factor and the
/// inclusion of the resulting subgrid is returned together with the restrictions.
/// `lan` after `restrict_rep` along it reproduces the inputs up to isomorphism.
pub fn support_subgrid(
    grid: &GridPoset,
    reps: &[Rep],
) -> Result<(AlignedGridInclusion, Vec<Rep>), KanError> {
    let mut per_factor: Vec<Vec<usize>> = vec![Vec::new(); grid.factors().len()];
    let mut grades = Subset::EMPTY;
    for m in reps {
        grades = grades.union(presentation_grades(m));
    }
    for g in grades.iter() {
        let coords = grid.coords(g);
        for (j, &c) in coords.iter().enumerate() {
            if !per_factor[j].contains(&c) {
                per_factor[j].push(c);
            }
        }
    }
    for f in per_factor.iter_mut() {
        if f.is_empty() {
            f.push(0);
        }
        f.sort_unstable();
    }
    let sub_sizes: Vec<usize> = per_factor.iter().map(Vec::len).collect();
    let sub = build_grid(&sub_sizes)?;
    let inclusion = aligned_inclusion(sub, grid.clone(), per_factor)?;
    let restricted = reps
        .iter()
        .map(|m| inclusion.restrict_rep(m))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((inclusion, restricted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Spread;
    use crate::rep::{hom_basis, iso_check, random_rep, DEFAULT_ISO_CAP};
    use crate::linalg::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf2() -> FieldSpec {
        FieldSpec::gf2()
    }

    fn incl(src: &[usize], dst: &[usize], maps: &[&[usize]]) -> AlignedGridInclusion {
        aligned_inclusion(
            build_grid(src).unwrap(),
            build_grid(dst).unwrap(),
            maps.iter().map(|m| m.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn inclusion_validation() {
        let id = identity_inclusion(&build_grid(&[3, 2]).unwrap());
        assert!(id.origin_aligned());
        assert_eq!(id.image(), id.target_poset().elements());

        // The figure-style inclusion [7]x[3] into [9]x[3] skipping two columns.
        let fig = incl(&[7, 3], &[9, 3], &[&[0, 1, 2, 3, 5, 7, 8], &[0, 1, 2]]);
        assert!(fig.origin_aligned());
        assert_eq!(fig.image().len(), 21);

        let bad = aligned_inclusion(
            build_grid(&[2]).unwrap(),
            build_grid(&[4]).unwrap(),
            vec![vec![3, 0]],
        );
        assert_eq!(bad.unwrap_err(), KanError::NonIncreasing(0));
    }

    #[test]
    fn floor_examples() {
        // [2] -> [4] with 0 -> 0, 1 -> 3.
        let i = incl(&[2], &[4], &[&[0, 3]]);
        assert_eq!(i.floor_index(2).unwrap(), 0);
        assert_eq!(i.floor_index(3).unwrap(), 1);
        for q in 0..2 {
            assert_eq!(i.floor_index(i.map_index(q)).unwrap(), q);
        }
        // Adjunction: iota(q) <= p iff q <= floor(p).
        for q in 0..2 {
            for p in 0..4 {
                assert_eq!(
                    i.target_poset().leq(i.map_index(q), p),
                    i.source_poset().leq(q, i.floor_index(p).unwrap())
                );
            }
        }
        // Outside the upset of the image.
        let shifted = incl(&[2], &[4], &[&[1, 3]]);
        assert_eq!(shifted.floor_index(0).unwrap_err(), KanError::OutsideImageUpset);
    }

    #[test]
    fn floor_preserves_joins() {
        let i = incl(&[3, 2], &[6, 2], &[&[0, 2, 5], &[0, 1]]);
        let p = i.target();
        for x in 0..p.len() {
            for y in 0..p.len() {
                let join = p.index(
                    &p.coords(x)
                        .iter()
                        .zip(p.coords(y).iter())
                        .map(|(a, b)| *a.max(b))
                        .collect::<Vec<_>>(),
                );
                let fx = i.floor_index(x).unwrap();
                let fy = i.floor_index(y).unwrap();
                let src = i.source();
                let join_floor = src.index(
                    &src.coords(fx)
                        .iter()
                        .zip(src.coords(fy).iter())
                        .map(|(a, b)| *a.max(b))
                        .collect::<Vec<_>>(),
                );
                assert_eq!(i.floor_index(join).unwrap(), join_floor);
            }
        }
    }

    #[test]
    fn floor_exchanges_with_upset_difference() {
        // up(floor A) \ up(floor B) = floor(up A \ up B) for A, B inside the image,
        // exhaustively on [3]x[2] into [6]x[2].
        let i = incl(&[3, 2], &[6, 2], &[&[0, 2, 4], &[0, 1]]);
        let p = i.target_poset().clone();
        let q = i.source_poset().clone();
        let image: Vec<usize> = i.image().indices();
        for a_bits in 0u32..(1 << image.len()) {
            for b_bits in 0u32..(1 << image.len()) {
                let a = Subset::from_indices(
                    image.iter().enumerate().filter(|&(j, _)| a_bits >> j & 1 == 1).map(|(_, &x)| x),
                );
                let b = Subset::from_indices(
                    image.iter().enumerate().filter(|&(j, _)| b_bits >> j & 1 == 1).map(|(_, &x)| x),
                );
                let lhs = q
                    .closure(i.floor_subset(a).unwrap(), Dir::Up)
                    .minus(q.closure(i.floor_subset(b).unwrap(), Dir::Up));
                let big = p.closure(a, Dir::Up).minus(p.closure(b, Dir::Up));
                let rhs = i.floor_subset(big).unwrap();
                assert_eq!(lhs, rhs, "A = {a:?}, B = {b:?}");
            }
        }
    }

    #[test]
    fn lan_of_identity_inclusion_is_identity() {
        let g = build_grid(&[3, 2]).unwrap();
        let id = identity_inclusion(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_rep(id.source_poset(), gf2(), &mut rng, 3, 2);
        let lan = id.lan(&m).unwrap();
        assert!(iso_check(&m, &lan, 12).unwrap());
        let back = id.contraction(&m).unwrap();
        assert!(iso_check(&m, &back, 12).unwrap());
    }

    #[test]
    fn lan_of_spread_is_stretched_spread() {
        let i = incl(&[3, 2], &[6, 2], &[&[0, 2, 4], &[0, 1]]);
        let q = i.source_poset().clone();
        let p = i.target_poset().clone();
        for s in q.enumerate_spreads() {
            let rep = Representation::spread_rep(q.clone(), gf2(), &s);
            let lan = i.lan(&rep).unwrap();
            let image_pair = (
                i.map_subset(s.mins()),
                i.map_subset(s.covers()),
            );
            let expected = p
                .closure(image_pair.0, Dir::Up)
                .minus(p.closure(image_pair.1, Dir::Up));
            let expected_rep = Representation::indicator(p.clone(), gf2(), expected).unwrap();
            assert!(
                iso_check(&lan, &expected_rep, DEFAULT_ISO_CAP).unwrap(),
                "S = {:?}",
                s.members()
            );
        }
    }

    #[test]
    fn lan_on_nine_by_three_column_skipping_inclusion() {
        // [7]x[3] into [9]x[3] skipping columns 4 and 6; a band spread given by
        // two-point min and cover antichains stretches to the corresponding
        // spread of the big grid.
        let i = incl(&[7, 3], &[9, 3], &[&[0, 1, 2, 3, 5, 7, 8], &[0, 1, 2]]);
        let q = i.source_poset().clone();
        let p = i.target_poset().clone();
        let qg = i.source().clone();
        let a = Subset::from_indices([qg.index(&[1, 1]), qg.index(&[3, 0])]);
        let b = Subset::from_indices([qg.index(&[2, 2]), qg.index(&[5, 1])]);
        let members = q.closure(a, Dir::Up).minus(q.closure(b, Dir::Up));
        let s = Spread::from_subset(&q, members).expect("band is a spread");
        let rep = Representation::spread_rep(q.clone(), gf2(), &s);
        let lan = i.lan(&rep).unwrap();
        let expected_members = p
            .closure(i.map_subset(a), Dir::Up)
            .minus(p.closure(i.map_subset(b), Dir::Up));
        let expected = Representation::indicator(p.clone(), gf2(), expected_members).unwrap();
        assert!(iso_check(&lan, &expected, DEFAULT_ISO_CAP).unwrap());
        // The image spread is presented by the images of the antichains.
        assert_eq!(lan.support(), expected_members);
        assert_eq!(p.minima(expected_members), i.map_subset(s.mins()));
    }

    #[test]
    fn unit_of_adjunction_is_iso() {
        let i = incl(&[3, 2], &[5, 2], &[&[0, 2, 4], &[0, 1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let m = random_rep(i.source_poset(), gf2(), &mut rng, 3, 2);
            let lan = i.lan(&m).unwrap();
            let back = i.restrict_rep(&lan).unwrap();
            assert!(iso_check(&m, &back, 12).unwrap());
        }
    }

    #[test]
    fn lan_is_fully_faithful_on_hom_dimensions() {
        let i = incl(&[2, 2], &[4, 3], &[&[1, 3], &[0, 2]]);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..6 {
            let m = random_rep(i.source_poset(), gf2(), &mut rng, 2, 2);
            let n = random_rep(i.source_poset(), gf2(), &mut rng, 2, 2);
            let lm = i.lan(&m).unwrap();
            let ln = i.lan(&n).unwrap();
            assert_eq!(hom_basis(&m, &n).len(), hom_basis(&lm, &ln).len());
        }
    }

    #[test]
    fn contraction_of_spread_is_floored_spread() {
        let i = incl(&[3, 2], &[6, 2], &[&[0, 1, 4], &[0, 1]]);
        let p = i.target_poset().clone();
        let q = i.source_poset().clone();
        for s in p.enumerate_spreads() {
            let rep = Representation::spread_rep(p.clone(), gf2(), &s);
            let contracted = i.contraction(&rep).unwrap();
            let floored = q
                .closure(i.floor_subset(s.mins()).unwrap(), Dir::Up)
                .minus(q.closure(i.floor_subset(s.covers()).unwrap(), Dir::Up));
            let expected = Representation::indicator(q.clone(), gf2(), floored).unwrap();
            assert!(
                iso_check(&contracted, &expected, DEFAULT_ISO_CAP).unwrap(),
                "S = {:?}",
                s.members()
            );
        }
    }

    #[test]
    fn contraction_rejects_unsupported_modules() {
        let i = incl(&[2], &[4], &[&[1, 3]]);
        let p = i.target_poset().clone();
        let m = Representation::indicator(p.clone(), gf2(), Subset::singleton(0)).unwrap();
        assert_eq!(i.contraction(&m).unwrap_err(), KanError::SupportOutsideImageUpset);
    }

    #[test]
    fn contraction_is_left_adjoint_on_dimensions() {
        let i = incl(&[3, 2], &[5, 2], &[&[0, 2, 4], &[0, 1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..8 {
            let m = random_rep(i.target_poset(), gf2(), &mut rng, 3, 2);
            let n = random_rep(i.source_poset(), gf2(), &mut rng, 3, 2);
            let lhs = hom_basis(&i.contraction(&m).unwrap(), &n).len();
            let rhs = hom_basis(&m, &i.lan(&n).unwrap()).len();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn contraction_fiber_variants_agree_on_dimensions() {
        // The colimit over {p : floor p <= q} has the same dimension as over the
        // strict fiber {p : floor p = q} for aligned grid inclusions.
        let i = incl(&[3, 2], &[6, 2], &[&[0, 2, 4], &[0, 1]]);
        let p = i.target_poset().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..5 {
            let m = random_rep(i.target_poset(), gf2(), &mut rng, 3, 2);
            let contracted = i.contraction(&m).unwrap();
            for q in 0..i.source_poset().len() {
                let fiber: Vec<usize> = (0..p.len())
                    .filter(|&x| i.floor_index(x).unwrap() == q)
                    .collect();
                // Colimit over the strict fiber, inline.
                let (induced, old) = p.induced(Subset::from_indices(fiber.iter().copied()));
                let restricted = restrict(&m, Arc::new(induced), &old).unwrap();
                let colim = crate::rep::co_limit(&restricted, crate::rep::LimitKind::Colimit);
                assert_eq!(contracted.dim_at(q), colim.dim, "q = {q}");
            }
        }
    }

    #[test]
    fn padding_sends_spreads_to_spreads() {
        let g = build_grid(&[3, 2]).unwrap();
        let p = Arc::new(g.poset().clone());
        let upset = p.up_of(g.index(&[1, 0]));
        let (induced, old) = p.induced(upset);
        let induced = Arc::new(induced);
        for w in induced.enumerate_spreads() {
            let rep = Representation::spread_rep(induced.clone(), gf2(), &w);
            let padded = padding(&p, upset, &rep).unwrap();
            let image = Subset::from_indices(w.members().iter().map(|new| old[new]));
            let expected = Representation::indicator(p.clone(), gf2(), image).unwrap();
            assert!(iso_check(&padded, &expected, DEFAULT_ISO_CAP).unwrap());
            assert!(p.is_spread(image));
        }
    }

    #[test]
    fn three_factor_inclusions_stretch_and_contract() {
        let i = incl(&[2, 2, 2], &[3, 2, 3], &[&[0, 2], &[0, 1], &[0, 2]]);
        let q = i.source_poset().clone();
        let p = i.target_poset().clone();
        for s in q.enumerate_spreads() {
            let rep = Representation::spread_rep(q.clone(), gf2(), &s);
            let lan = i.lan(&rep).unwrap();
            let members = p
                .closure(i.map_subset(s.mins()), Dir::Up)
                .minus(p.closure(i.map_subset(s.covers()), Dir::Up));
            let expected = Representation::indicator(p.clone(), gf2(), members).unwrap();
            assert!(iso_check(&lan, &expected, DEFAULT_ISO_CAP).unwrap(), "S = {:?}", s.members());
        }
        for s in p.enumerate_spreads() {
            let rep = Representation::spread_rep(p.clone(), gf2(), &s);
            let contracted = i.contraction(&rep).unwrap();
            let floored = q
                .closure(i.floor_subset(s.mins()).unwrap(), Dir::Up)
                .minus(q.closure(i.floor_subset(s.covers()).unwrap(), Dir::Up));
            let expected = Representation::indicator(q.clone(), gf2(), floored).unwrap();
            assert!(
                iso_check(&contracted, &expected, DEFAULT_ISO_CAP).unwrap(),
                "S = {:?}",
                s.members()
            );
        }
    }

    #[test]
    fn padding_examples() {
        let g = build_grid(&[3, 2]).unwrap();
        let p = Arc::new(g.poset().clone());
        let upset = p.up_of(g.index(&[1, 0]));
        let (induced, _) = p.induced(upset);
        let induced = Arc::new(induced);
        let m = Representation::constant(induced.clone(), gf2());
        let padded = padding(&p, upset, &m).unwrap();
        assert_eq!(padded.support(), upset);
        let expected = Representation::indicator(p.clone(), gf2(), upset).unwrap();
        assert!(iso_check(&padded, &expected, DEFAULT_ISO_CAP).unwrap());

        // Whole poset: padding is the identity.
        let all = Representation::constant(p.clone(), gf2());
        let (whole, _) = p.induced(p.elements());
        let over_whole = Representation::constant(Arc::new(whole), gf2());
        let padded_all = padding(&p, p.elements(), &over_whole).unwrap();
        assert!(iso_check(&padded_all, &all, DEFAULT_ISO_CAP).unwrap());

        // Not an upset.
        let not_upset = Subset::singleton(g.index(&[0, 0]));
        let (ind, _) = p.induced(not_upset);
        let m2 = Representation::constant(Arc::new(ind), gf2());
        assert_eq!(padding(&p, not_upset, &m2).unwrap_err(), KanError::NotUpset);
    }

    #[test]
    fn lan_composes_floor_with_padding_when_not_origin_aligned() {
        let i = incl(&[2, 2], &[4, 3], &[&[1, 3], &[1, 2]]);
        assert!(!i.origin_aligned());
        let q = i.source_poset().clone();
        let s = Spread::from_subset(&q, q.up_of(0)).unwrap();
        let rep = Representation::spread_rep(q.clone(), gf2(), &s);
        let lan = i.lan(&rep).unwrap();
        // Support is exactly the upset of the image of up(0).
        assert_eq!(lan.support(), i.upset_of_image());
        assert_eq!(lan.support(), i.target_poset().closure(i.image(), Dir::Up));
    }

    #[test]
    fn support_subgrid_on_spreads_and_constants() {
        let g = build_grid(&[5, 3]).unwrap();
        let p = Arc::new(g.poset().clone());

        // A single spread: grades are the minima and covers, so the factor windows
        // are their projections.
        let members = Subset::from_indices([
            g.index(&[1, 0]),
            g.index(&[1, 1]),
            g.index(&[2, 0]),
            g.index(&[2, 1]),
            g.index(&[3, 0]),
        ]);
        let s = Spread::from_subset(&p, members).unwrap();
        let rep = Representation::spread_rep(p.clone(), gf2(), &s);
        let (inclusion, restricted) = support_subgrid(&g, std::slice::from_ref(&rep)).unwrap();
        let mut expected: Vec<Vec<usize>> = vec![Vec::new(); 2];
        for e in s.mins().union(s.covers()).iter() {
            for (j, &c) in g.coords(e).iter().enumerate() {
                if !expected[j].contains(&c) {
                    expected[j].push(c);
                }
            }
        }
        for f in expected.iter_mut() {
            f.sort_unstable();
        }
        assert_eq!(inclusion.factor_maps(), &expected[..]);
        let back = inclusion.lan(&restricted[0]).unwrap();
        assert!(iso_check(&back, &rep, DEFAULT_ISO_CAP).unwrap());

        // The constant representation needs only the origin.
        let constant = Representation::constant(p.clone(), gf2());
        let (inc2, _) = support_subgrid(&g, &[constant]).unwrap();
        assert_eq!(inc2.factor_maps(), &[vec![0], vec![0]]);

        // Round-trip isomorphism on random modules.
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            let m = random_rep(&p, gf2(), &mut rng, 3, 2);
            let (inc, restr) = support_subgrid(&g, std::slice::from_ref(&m)).unwrap();
            let back = inc.lan(&restr[0]).unwrap();
            assert!(iso_check(&back, &m, 12).unwrap());
        }
    }
}
