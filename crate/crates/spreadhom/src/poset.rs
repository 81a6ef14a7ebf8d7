//! Finite posets, grid posets, and spread combinatorics.
//!
//! Elements are indices `0..n` with `n <= 64`, so subsets are machine words
//! ([`Subset`]). A [`Poset`] stores the full order relation as per-element upset and
//! downset masks plus the Hasse diagram. A [`Spread`] is a nonempty convex connected
//! subset, carried together with its canonical antichain pair `(min S, cover S)`;
//! the two determine the spread via `S = up(min S) \ up(cover S)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on poset size: subsets must fit in one machine word.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("not a partial order: elements {0} and {1} are in a cycle")]
    NotPartialOrder(usize, usize),
    #[error("poset has {0} elements, cap is {1}")]
    CapExceeded(usize, usize),
    #[error("element index {0} out of range (poset has {1} elements)")]
    IndexOutOfRange(usize, usize),
    #[error("grid needs at least one factor")]
    EmptyFactors,
    #[error("grid factor sizes must be at least 1")]
    ZeroFactor,
    #[error("subset is not convex")]
    NotConvex,
}

/// A subset of a poset's elements, encoded as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Subset {
        let mut mask = 0u64;
        for i in indices {
            assert!(i < MAX_ELEMENTS, "element index {i} out of range");
            mask |= 1 << i;
        }
        Subset(mask)
    }

    /// All `n` elements.
    pub fn full(n: usize) -> Subset {
        if n == 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn inter(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn minus(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(&self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mask = self.0;
        (0..64).filter(move |i| mask >> i & 1 == 1)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.indices().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        for &i in &indices {
            if i >= MAX_ELEMENTS {
                return Err(serde::de::Error::custom(format!("element index {i} out of range")));
            }
        }
        Ok(Subset::from_indices(indices))
    }
}

/// Direction selector for closures, extrema and frontiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Up,
    Down,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Up => Dir::Down,
            Dir::Down => Dir::Up,
        }
    }
}

/// A finite poset on elements `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    /// `up[i]` is the principal upset of `i` (including `i`).
    up: Vec<u64>,
    /// `down[i]` is the principal downset of `i` (including `i`).
    down: Vec<u64>,
    /// Cover pairs `(i, j)` with `i < j` and nothing strictly between, sorted.
    hasse: Vec<(usize, usize)>,
}

/// Builds a poset from generating relation pairs `(i, j)` meaning `i <= j`.
/// The order is the reflexive-transitive closure; a cycle is rejected.
pub fn build_poset(n: usize, relations: &[(usize, usize)]) -> Result<Poset, PosetError> {
    if n > MAX_ELEMENTS {
        return Err(PosetError::CapExceeded(n, MAX_ELEMENTS));
    }
    let mut up = vec![0u64; n];
    for (i, mask) in up.iter_mut().enumerate() {
        *mask = 1 << i;
    }
    for &(a, b) in relations {
        if a >= n {
            return Err(PosetError::IndexOutOfRange(a, n));
        }
        if b >= n {
            return Err(PosetError::IndexOutOfRange(b, n));
        }
        up[a] |= 1 << b;
    }
    // Transitive closure by saturation.
    loop {
        let mut changed = false;
        for i in 0..n {
            let mut acc = up[i];
            let mut rest = up[i];
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                acc |= up[j];
            }
            if acc != up[i] {
                up[i] = acc;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if up[i] >> j & 1 == 1 && up[j] >> i & 1 == 1 {
                return Err(PosetError::NotPartialOrder(i, j));
            }
        }
    }
    Ok(Poset::from_upsets(n, up))
}

impl Poset {
    fn from_upsets(n: usize, up: Vec<u64>) -> Poset {
        let mut down = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                if up[j] >> i & 1 == 1 {
                    down[i] |= 1 << j;
                }
            }
        }
        let mut hasse = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || up[i] >> j & 1 == 0 {
                    continue;
                }
                let between = up[i] & down[j] & !(1 << i) & !(1 << j);
                if between == 0 {
                    hasse.push((i, j));
                }
            }
        }
        hasse.sort_unstable();
        Poset { n, up, down, hasse }
    }

    /// A total order `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Poset {
        let up = (0..n)
            .map(|i| (Subset::full(n).0 >> i) << i)
            .collect();
        Poset::from_upsets(n, up)
    }

    /// `n` pairwise incomparable elements.
    pub fn antichain(n: usize) -> Poset {
        Poset::from_upsets(n, (0..n).map(|i| 1 << i).collect())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i] >> j & 1 == 1
    }

    pub fn hasse_edges(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn elements(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn up_of(&self, i: usize) -> Subset {
        Subset(self.up[i])
    }

    pub fn down_of(&self, i: usize) -> Subset {
        Subset(self.down[i])
    }

    /// `up(S)` or `down(S)`.
    pub fn closure(&self, s: Subset, dir: Dir) -> Subset {
        let table = match dir {
            Dir::Up => &self.up,
            Dir::Down => &self.down,
        };
        let mut acc = 0u64;
        for i in s.iter() {
            acc |= table[i];
        }
        Subset(acc)
    }

    /// Minimal (`Dir::Down` ends) or maximal elements of `S`; always an antichain.
    pub fn extrema(&self, s: Subset, dir: Dir) -> Subset {
        let table = match dir {
            Dir::Up => &self.up,
            Dir::Down => &self.down,
        };
        // i is maximal in S iff nothing else of S lies above it (Dir::Up),
        // minimal iff nothing else of S lies below (Dir::Down).
        let mut acc = 0u64;
        for i in s.iter() {
            if table[i] & s.0 & !(1u64 << i) == 0 {
                acc |= 1 << i;
            }
        }
        Subset(acc)
    }

    pub fn minima(&self, s: Subset) -> Subset {
        self.extrema(s, Dir::Down)
    }

    pub fn maxima(&self, s: Subset) -> Subset {
        self.extrema(s, Dir::Up)
    }

    /// Covers `min(up(S) \ S)` or cocovers `max(down(S) \ S)` of `S`.
    pub fn frontier(&self, s: Subset, dir: Dir) -> Subset {
        let outside = self.closure(s, dir).minus(s);
        self.extrema(outside, dir.flip())
    }

    pub fn covers(&self, s: Subset) -> Subset {
        self.frontier(s, Dir::Up)
    }

    pub fn cocovers(&self, s: Subset) -> Subset {
        self.frontier(s, Dir::Down)
    }

    /// The closed segment `{p : a <= p <= b}`; empty when `a` and `b` are incomparable.
    pub fn segment(&self, a: usize, b: usize) -> Subset {
        Subset(self.up[a] & self.down[b])
    }

    /// `up(A) ∩ down(B)` for subsets.
    pub fn segment_sets(&self, a: Subset, b: Subset) -> Subset {
        self.closure(a, Dir::Up).inter(self.closure(b, Dir::Down))
    }

    /// Smallest convex set containing `S`, namely `up(S) ∩ down(S)`.
    pub fn convex_closure(&self, s: Subset) -> Subset {
        self.closure(s, Dir::Up).inter(self.closure(s, Dir::Down))
    }

    pub fn is_convex(&self, s: Subset) -> bool {
        self.convex_closure(s) == s
    }

    /// Connectivity through zigzags of comparabilities inside `S`. Empty sets are not
    /// connected.
    pub fn is_connected(&self, s: Subset) -> bool {
        if s.is_empty() {
            return false;
        }
        let start = s.0.trailing_zeros() as usize;
        let mut seen = 1u64 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u64;
            let mut rest = frontier;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                next |= (self.up[i] | self.down[i]) & s.0 & !seen;
            }
            seen |= next;
            frontier = next;
        }
        seen == s.0
    }

    pub fn is_spread(&self, s: Subset) -> bool {
        !s.is_empty() && self.is_convex(s) && self.is_connected(s)
    }

    pub fn is_antichain(&self, s: Subset) -> bool {
        s.iter().all(|i| (self.up[i] | self.down[i]) & s.0 & !(1u64 << i) == 0)
    }

    pub fn is_upset(&self, s: Subset) -> bool {
        self.closure(s, Dir::Up) == s
    }

    /// Partition of `S` into maximal connected pieces, ordered by smallest element.
    pub fn connected_components(&self, s: Subset) -> Vec<Subset> {
        let mut remaining = s;
        let mut parts = Vec::new();
        while !remaining.is_empty() {
            let start = remaining.0.trailing_zeros() as usize;
            let mut seen = 1u64 << start;
            let mut frontier = seen;
            while frontier != 0 {
                let mut next = 0u64;
                let mut rest = frontier;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    next |= (self.up[i] | self.down[i]) & remaining.0 & !seen;
                }
                seen |= next;
                frontier = next;
            }
            parts.push(Subset(seen));
            remaining = remaining.minus(Subset(seen));
        }
        parts
    }

    /// Splits the whole poset into `S`, `up(cover S)`, `down(cocover S)` and the
    /// elements incomparable to all of `S`. Requires `S` convex; the parts are then
    /// pairwise disjoint and exhaustive.
    pub fn region_decomposition(&self, s: Subset) -> Result<Regions, PosetError> {
        if !self.is_convex(s) {
            return Err(PosetError::NotConvex);
        }
        let up_cover = self.closure(self.covers(s), Dir::Up);
        let down_cocover = self.closure(self.cocovers(s), Dir::Down);
        let incomparable = self
            .elements()
            .minus(s)
            .minus(up_cover)
            .minus(down_cocover);
        Ok(Regions { spread: s, up_cover, down_cocover, incomparable })
    }

    /// The opposite poset; element indices are unchanged, the relation reverses.
    pub fn opposite(&self) -> Poset {
        Poset::from_upsets(self.n, self.down.clone())
    }

    /// Size of the largest antichain, via Dilworth and bipartite matching.
    pub fn max_antichain_size(&self) -> usize {
        // Minimum chain cover = n - maximum matching on the strict comparability
        // bipartite graph; Dilworth gives width = minimum chain cover.
        let n = self.n;
        let mut match_right = vec![usize::MAX; n];
        let mut matched = 0;
        for i in 0..n {
            let mut visited = vec![false; n];
            if self.try_augment(i, &mut visited, &mut match_right) {
                matched += 1;
            }
        }
        n - matched
    }

    fn try_augment(&self, i: usize, visited: &mut [bool], match_right: &mut [usize]) -> bool {
        for j in 0..self.n {
            if i != j && self.leq(i, j) && !visited[j] {
                visited[j] = true;
                if match_right[j] == usize::MAX
                    || self.try_augment(match_right[j], visited, match_right)
                {
                    match_right[j] = i;
                    return true;
                }
            }
        }
        false
    }

    /// The full subposet on `S`, with the index dictionary from new to old indices.
    pub fn induced(&self, s: Subset) -> (Poset, Vec<usize>) {
        let old: Vec<usize> = s.indices();
        let pos: std::collections::HashMap<usize, usize> =
            old.iter().enumerate().map(|(new, &o)| (o, new)).collect();
        let up = old
            .iter()
            .map(|&o| {
                let mut mask = 0u64;
                for t in Subset(self.up[o]).inter(s).iter() {
                    mask |= 1 << pos[&t];
                }
                mask
            })
            .collect();
        (Poset::from_upsets(old.len(), up), old)
    }

    /// All spreads in canonical order (ascending size, then bitmask value).
    ///
    /// Grows connected convex sets from singletons: each step adds one comparable
    /// element and closes under convexity again, deduplicating by bitmask. Every
    /// spread is reached because a strictly smaller spread inside it can always be
    /// extended within it.
    pub fn enumerate_spreads(&self) -> Vec<Spread> {
        let mut seen = std::collections::HashSet::new();
        let mut queue = std::collections::VecDeque::new();
        for i in 0..self.n {
            let s = Subset::singleton(i);
            if seen.insert(s.0) {
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            let comparable = self.closure(s, Dir::Up).union(self.closure(s, Dir::Down)).minus(s);
            for x in comparable.iter() {
                let mut grown = s;
                grown.insert(x);
                let closed = self.convex_closure(grown);
                if seen.insert(closed.0) {
                    queue.push_back(closed);
                }
            }
        }
        let mut masks: Vec<Subset> = seen.into_iter().map(Subset).collect();
        masks.sort_by_key(|s| (s.len(), s.0));
        masks
            .into_iter()
            .map(|s| Spread::from_subset(self, s).expect("growth search produced a non-spread"))
            .collect()
    }
}

/// The four-part decomposition of a poset relative to a convex subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regions {
    pub spread: Subset,
    pub up_cover: Subset,
    pub down_cocover: Subset,
    pub incomparable: Subset,
}

/// A nonempty convex connected subset together with its canonical antichain pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Spread {
    members: Subset,
    mins: Subset,
    covers: Subset,
}

impl Spread {
    /// Checks the spread conditions and computes the canonical pair; `None` when `s`
    /// is empty, not convex, or not connected.
    pub fn from_subset(poset: &Poset, s: Subset) -> Option<Spread> {
        if !poset.is_spread(s) {
            return None;
        }
        let mins = poset.minima(s);
        let covers = poset.covers(s);
        debug_assert_eq!(poset.closure(mins, Dir::Up).minus(poset.closure(covers, Dir::Up)), s);
        Some(Spread { members: s, mins, covers })
    }

    pub fn members(&self) -> Subset {
        self.members
    }

    pub fn mins(&self) -> Subset {
        self.mins
    }

    pub fn covers(&self) -> Subset {
        self.covers
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(i)
    }
}

/// The spread `up(A) \ up(B)` when that set is one.
pub fn spread_from_antichains(poset: &Poset, a: Subset, b: Subset) -> Option<Spread> {
    let s = poset
        .closure(a, Dir::Up)
        .minus(poset.closure(b, Dir::Up));
    Spread::from_subset(poset, s)
}

/// A finite product of chains with the product order. Element `i` has coordinates
/// [`GridPoset::coords`]; the first factor is the most significant in the index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPoset {
    poset: Poset,
    factors: Vec<usize>,
}

pub fn build_grid(factors: &[usize]) -> Result<GridPoset, PosetError> {
    if factors.is_empty() {
        return Err(PosetError::EmptyFactors);
    }
    if factors.contains(&0) {
        return Err(PosetError::ZeroFactor);
    }
    let n: usize = factors.iter().product();
    if n > MAX_ELEMENTS {
        return Err(PosetError::CapExceeded(n, MAX_ELEMENTS));
    }
    let coords_of = |mut idx: usize| -> Vec<usize> {
        let mut c = vec![0; factors.len()];
        for (k, &m) in factors.iter().enumerate().rev() {
            c[k] = idx % m;
            idx /= m;
        }
        c
    };
    let mut up = vec![0u64; n];
    for i in 0..n {
        let ci = coords_of(i);
        for (j, mask) in up.iter_mut().enumerate() {
            let cj = coords_of(j);
            if cj.iter().zip(&ci).all(|(a, b)| a <= b) {
                *mask |= 1 << i;
            }
        }
    }
    Ok(GridPoset { poset: Poset::from_upsets(n, up), factors: factors.to_vec() })
}

impl GridPoset {
    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.poset.n
    }

    pub fn is_empty(&self) -> bool {
        self.poset.n == 0
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        assert_eq!(coords.len(), self.factors.len());
        let mut idx = 0;
        for (k, &m) in self.factors.iter().enumerate() {
            assert!(coords[k] < m, "coordinate out of range");
            idx = idx * m + coords[k];
        }
        idx
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut c = vec![0; self.factors.len()];
        for (k, &m) in self.factors.iter().enumerate().rev() {
            c[k] = idx % m;
            idx /= m;
        }
        c
    }

    /// The projection `pi_i` onto the `i`-th chain factor.
    pub fn project(&self, idx: usize, factor: usize) -> usize {
        self.coords(idx)[factor]
    }

    /// Coordinatewise truncated sum: each coordinate saturates at its factor size.
    pub fn add(&self, x: usize, y: usize) -> usize {
        let cx = self.coords(x);
        let cy = self.coords(y);
        let sum: Vec<usize> = cx
            .iter()
            .zip(&cy)
            .zip(&self.factors)
            .map(|((a, b), &m)| (a + b).min(m - 1))
            .collect();
        self.index(&sum)
    }

    /// Coordinatewise truncated difference: each coordinate floors at 0.
    pub fn sub(&self, x: usize, y: usize) -> usize {
        let cx = self.coords(x);
        let cy = self.coords(y);
        let diff: Vec<usize> = cx.iter().zip(&cy).map(|(a, b)| a.saturating_sub(*b)).collect();
        self.index(&diff)
    }

    /// The standard basis element `e_k` (1 in factor `k`, truncated if the factor is
    /// a single point).
    pub fn basis_element(&self, k: usize) -> usize {
        let coords: Vec<usize> = (0..self.factors.len())
            .map(|i| if i == k { 1.min(self.factors[i] - 1) } else { 0 })
            .collect();
        self.index(&coords)
    }

    /// Applies truncated `+ e_k` to every element of a subset.
    pub fn shift_up(&self, s: Subset, k: usize) -> Subset {
        let e = self.basis_element(k);
        Subset::from_indices(s.iter().map(|x| self.add(x, e)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::oracle;
    use proptest::prelude::*;

    fn abc_poset() -> Poset {
        // b <= a and b <= c, with a = 0, b = 1, c = 2.
        build_poset(3, &[(1, 0), (1, 2)]).unwrap()
    }

    #[test]
    fn build_poset_generates_closure() {
        let p = abc_poset();
        assert_eq!(p.up_of(1), Subset::from_indices([0, 1, 2]));
        assert_eq!(p.up_of(0), Subset::singleton(0));
        assert!(!p.leq(0, 2));
        assert_eq!(p.hasse_edges(), &[(1, 0), (1, 2)]);
    }

    #[test]
    fn build_poset_singleton() {
        let p = build_poset(1, &[]).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.leq(0, 0));
    }

    #[test]
    fn build_poset_rejects_cycles() {
        assert_eq!(build_poset(2, &[(0, 1), (1, 0)]), Err(PosetError::NotPartialOrder(0, 1)));
        assert_eq!(build_poset(3, &[(0, 1), (1, 2), (2, 0)]), Err(PosetError::NotPartialOrder(0, 1)));
    }

    #[test]
    fn grid_4x2_product_order() {
        let g = build_grid(&[4, 2]).unwrap();
        assert_eq!(g.len(), 8);
        let bottom = g.index(&[0, 0]);
        let top = g.index(&[3, 1]);
        assert!(g.poset().leq(bottom, top));
        let a = g.index(&[0, 1]);
        let b = g.index(&[1, 0]);
        assert!(!g.poset().leq(a, b) && !g.poset().leq(b, a));
    }

    #[test]
    fn grid_9x3_and_single_factor() {
        assert_eq!(build_grid(&[9, 3]).unwrap().len(), 27);
        let chain = build_grid(&[5]).unwrap();
        assert_eq!(chain.poset(), &Poset::chain(5));
        assert_eq!(build_grid(&[]), Err(PosetError::EmptyFactors));
    }

    #[test]
    fn closure_examples() {
        let c3 = Poset::chain(3);
        assert_eq!(c3.closure(Subset::singleton(1), Dir::Up), Subset::from_indices([1, 2]));
        let s = Subset::from_indices([0, 2]);
        assert_eq!(c3.closure(c3.closure(s, Dir::Up), Dir::Up), c3.closure(s, Dir::Up));

        let g = build_grid(&[3, 3]).unwrap();
        let down = g.poset().closure(Subset::singleton(g.index(&[1, 1])), Dir::Down);
        let expect = Subset::from_indices(
            [[0, 0], [0, 1], [1, 0], [1, 1]].iter().map(|c| g.index(c)),
        );
        assert_eq!(down, expect);
    }

    #[test]
    fn extrema_examples() {
        let c4 = Poset::chain(4);
        assert_eq!(c4.minima(c4.elements()), Subset::singleton(0));

        let a = Poset::antichain(3);
        assert_eq!(a.minima(a.elements()), a.elements());
        assert_eq!(a.maxima(a.elements()), a.elements());

        let g = build_grid(&[3, 3]).unwrap();
        let s = g.poset().up_of(g.index(&[1, 1]));
        assert_eq!(g.poset().maxima(s), Subset::singleton(g.index(&[2, 2])));
        assert!(g.poset().is_antichain(g.poset().minima(s)));
    }

    #[test]
    fn frontier_examples() {
        let g = build_grid(&[2, 2]).unwrap();
        let p = g.poset();
        let covers = p.covers(Subset::singleton(g.index(&[0, 0])));
        assert_eq!(covers, Subset::from_indices([g.index(&[0, 1]), g.index(&[1, 0])]));
        assert_eq!(p.covers(p.elements()), Subset::EMPTY);

        let g3 = build_grid(&[3, 3]).unwrap();
        let p3 = g3.poset();
        let s = p3.up_of(g3.index(&[1, 1]));
        // Brute oracle: maxima of down(S) \ S straight from the definition.
        let mut outside = Vec::new();
        for i in p3.closure(s, Dir::Down).minus(s).iter() {
            outside.push(i);
        }
        let brute = Subset::from_indices(outside.iter().copied().filter(|&i| {
            outside.iter().all(|&j| j == i || !p3.leq(i, j))
        }));
        assert_eq!(p3.cocovers(s), brute);
        assert_eq!(brute, Subset::from_indices([g3.index(&[0, 2]), g3.index(&[2, 0])]));
    }

    #[test]
    fn spread_predicates() {
        let g = build_grid(&[2, 2]).unwrap();
        let p = g.poset();
        let anti = Subset::from_indices([g.index(&[0, 1]), g.index(&[1, 0])]);
        assert!(p.is_convex(anti) && !p.is_connected(anti) && !p.is_spread(anti));

        let diag = Subset::from_indices([g.index(&[0, 0]), g.index(&[1, 1])]);
        assert!(!p.is_convex(diag) && !p.is_spread(diag));

        // Union of two disjoint incomparable spreads: convex but not connected.
        let g4 = build_grid(&[4, 4]).unwrap();
        let p4 = g4.poset();
        let s1 = Subset::from_indices([g4.index(&[0, 3])]);
        let s2 = Subset::from_indices([g4.index(&[3, 0])]);
        assert!(p4.is_spread(s1) && p4.is_spread(s2));
        let union = s1.union(s2);
        assert!(p4.is_convex(union) && !p4.is_spread(union));

        assert!(!p.is_spread(Subset::EMPTY));
    }

    #[test]
    fn connected_components_examples() {
        let g = build_grid(&[2, 2]).unwrap();
        let p = g.poset();
        let s = Subset::from_indices([g.index(&[0, 1]), g.index(&[1, 0])]);
        assert_eq!(p.connected_components(s).len(), 2);
        assert_eq!(p.connected_components(p.elements()), vec![p.elements()]);

        let g3 = build_grid(&[3, 3]).unwrap();
        let p3 = g3.poset();
        let hole = p3
            .up_of(g3.index(&[1, 1]))
            .minus(Subset::singleton(g3.index(&[1, 1])));
        let parts = p3.connected_components(hole);
        assert_eq!(parts, vec![hole]);
        // Components of a convex set are spreads.
        let corners = Subset::from_indices([g3.index(&[0, 2]), g3.index(&[2, 0])]);
        assert!(p3.is_convex(corners));
        for part in p3.connected_components(corners) {
            assert!(p3.is_spread(part));
        }
    }

    #[test]
    fn segment_examples() {
        let g = build_grid(&[2, 2]).unwrap();
        let p = g.poset();
        assert_eq!(p.segment(1, 1), Subset::singleton(1));
        assert_eq!(p.segment(g.index(&[0, 1]), g.index(&[1, 0])), Subset::EMPTY);
        assert_eq!(p.segment(g.index(&[0, 0]), g.index(&[1, 1])), p.elements());
    }

    #[test]
    fn region_decomposition_examples() {
        let g = build_grid(&[2, 2]).unwrap();
        let p = g.poset();

        let whole = p.region_decomposition(p.elements()).unwrap();
        assert!(whole.up_cover.is_empty() && whole.down_cocover.is_empty() && whole.incomparable.is_empty());

        let origin = p.region_decomposition(Subset::singleton(g.index(&[0, 0]))).unwrap();
        assert!(origin.incomparable.is_empty());
        assert_eq!(origin.up_cover.len(), 3);
        assert!(origin.down_cocover.is_empty());

        let corner = p.region_decomposition(Subset::singleton(g.index(&[1, 0]))).unwrap();
        assert_eq!(corner.incomparable, Subset::singleton(g.index(&[0, 1])));

        assert_eq!(
            p.region_decomposition(Subset::from_indices([g.index(&[0, 0]), g.index(&[1, 1])])),
            Err(PosetError::NotConvex)
        );
    }

    #[test]
    fn region_decomposition_partitions_small_posets() {
        for p in oracle::test_corpus(12) {
            for mask in 0u64..(1 << p.len().min(10)) {
                let s = Subset(mask);
                if s.is_empty() || !p.is_convex(s) {
                    continue;
                }
                let r = p.region_decomposition(s).unwrap();
                let total = r.spread.len() + r.up_cover.len() + r.down_cocover.len() + r.incomparable.len();
                assert_eq!(total, p.len());
                assert_eq!(
                    r.spread.union(r.up_cover).union(r.down_cocover).union(r.incomparable),
                    p.elements()
                );
                assert_eq!(p.closure(s, Dir::Up), s.union(r.up_cover));
                assert_eq!(p.closure(s, Dir::Down), s.union(r.down_cocover));
            }
        }
    }

    #[test]
    fn enumerate_spreads_counts() {
        assert_eq!(Poset::chain(2).enumerate_spreads().len(), 3);
        let g = build_grid(&[2, 2]).unwrap();
        assert_eq!(g.poset().enumerate_spreads().len(), 11);
        for m in 1..=6 {
            assert_eq!(Poset::chain(m).enumerate_spreads().len(), m * (m + 1) / 2);
        }
        assert_eq!(abc_poset().enumerate_spreads().len(), 6);
    }

    #[test]
    fn enumerate_spreads_matches_brute_filter() {
        for p in oracle::test_corpus(12) {
            let fast: Vec<Subset> = p.enumerate_spreads().iter().map(|s| s.members()).collect();
            let brute = oracle::spreads_by_subset_filter(&p);
            assert_eq!(fast, brute, "spread enumeration mismatch on {p:?}");
        }
    }

    #[test]
    fn spreads_canonical_pair_roundtrip() {
        for factors in [vec![3, 3], vec![4, 3], vec![4, 2]] {
            let g = build_grid(&factors).unwrap();
            let p = g.poset();
            for s in p.enumerate_spreads() {
                assert!(p.is_antichain(s.mins()));
                assert!(p.is_antichain(s.covers()));
                let back = spread_from_antichains(p, s.mins(), s.covers()).unwrap();
                assert_eq!(back, s);
            }
        }
    }

    #[test]
    fn spread_from_antichains_examples() {
        let p = abc_poset();
        let up_b = spread_from_antichains(&p, Subset::singleton(1), Subset::EMPTY).unwrap();
        assert_eq!(up_b.members(), p.up_of(1));
        let a = Subset::singleton(1);
        assert!(spread_from_antichains(&p, a, a).is_none());
    }

    #[test]
    fn opposite_poset_duality() {
        let g = build_grid(&[3, 2]).unwrap();
        let p = g.poset();
        let op = p.opposite();
        assert_eq!(op.opposite(), *p);

        let c3 = Poset::chain(3);
        assert_eq!(c3.opposite().minima(c3.elements()), Subset::singleton(2));

        for s in p.enumerate_spreads() {
            assert_eq!(p.covers(s.members()), op.cocovers(s.members()));
            assert_eq!(p.minima(s.members()), op.maxima(s.members()));
            assert_eq!(p.closure(s.members(), Dir::Up), op.closure(s.members(), Dir::Down));
        }
    }

    #[test]
    fn grid_arithmetic_truncates() {
        let c4 = build_grid(&[4]).unwrap();
        assert_eq!(c4.add(3, 2), 3);
        let g = build_grid(&[4, 2]).unwrap();
        let x = g.index(&[3, 1]);
        assert_eq!(g.add(x, g.basis_element(0)), x);
        for x in 0..g.len() {
            assert_eq!(g.sub(x, x), 0);
        }
    }

    #[test]
    fn max_antichain_sizes() {
        assert_eq!(Poset::chain(5).max_antichain_size(), 1);
        assert_eq!(Poset::antichain(7).max_antichain_size(), 7);
        let g = build_grid(&[5, 3]).unwrap();
        assert_eq!(g.poset().max_antichain_size(), 3);
    }

    #[test]
    fn finitely_generated_upsets() {
        for p in oracle::test_corpus(12) {
            for mask in 0u64..(1 << p.len().min(10)) {
                let a = Subset(mask);
                let u = p.closure(a, Dir::Up);
                assert_eq!(p.closure(p.minima(u), Dir::Up), u);
            }
        }
    }

    #[test]
    fn min_spread_implies_cover_ds() {
        // For convex V with min(P) inside down(cocover V):
        // min V is contained in cover(down(cocover V)). Exhaustive on [3]x[3].
        let g = build_grid(&[3, 3]).unwrap();
        let p = g.poset();
        let bottom = p.minima(p.elements());
        for mask in 0u64..(1 << 9) {
            let v = Subset(mask);
            if v.is_empty() || !p.is_convex(v) {
                continue;
            }
            let z = p.closure(p.cocovers(v), Dir::Down);
            if !bottom.is_subset_of(z) {
                continue;
            }
            assert!(p.minima(v).is_subset_of(p.covers(z)), "V = {v:?}");
        }
    }

    #[test]
    fn cocover_vs_connected_component() {
        let g = build_grid(&[3, 2]).unwrap();
        let p = g.poset();
        for w in p.enumerate_spreads() {
            let wm = w.members();
            for a in p.closure(wm, Dir::Down).minus(wm).iter() {
                let wedge = p
                    .up_of(a)
                    .minus(p.closure(wm, Dir::Up))
                    .minus(Subset::singleton(a));
                let ambient = wm.union(wedge);
                let is_component = p.connected_components(ambient).contains(&wm);
                assert_eq!(p.cocovers(wm).contains(a), is_component, "W = {wm:?}, a = {a}");
            }
        }
    }

    proptest! {
        #[test]
        fn random_posets_enumerate_like_the_subset_filter(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=9usize);
            let pairs: Vec<(usize, usize)> = (0..rng.gen_range(0..2 * n))
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            if let Ok(p) = build_poset(n, &pairs) {
                let fast: Vec<Subset> =
                    p.enumerate_spreads().iter().map(|s| s.members()).collect();
                prop_assert_eq!(fast, oracle::spreads_by_subset_filter(&p));
            }
        }

        #[test]
        fn duality_dictionary_random_subsets(mask in 0u64..(1 << 12)) {
            let g = build_grid(&[4, 3]).unwrap();
            let p = g.poset();
            let op = p.opposite();
            let s = Subset(mask);
            prop_assert_eq!(p.frontier(s, Dir::Up), op.frontier(s, Dir::Down));
            prop_assert_eq!(p.extrema(s, Dir::Down), op.extrema(s, Dir::Up));
            prop_assert_eq!(p.is_convex(s), op.is_convex(s));
            prop_assert_eq!(p.is_connected(s), op.is_connected(s));
        }

        #[test]
        fn convex_closure_is_idempotent_and_sound(mask in 0u64..(1 << 12)) {
            let g = build_grid(&[3, 4]).unwrap();
            let p = g.poset();
            let c = p.convex_closure(Subset(mask));
            prop_assert!(p.is_convex(c));
            prop_assert_eq!(p.convex_closure(c), c);
        }
    }
}
