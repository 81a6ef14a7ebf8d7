//! Representations of finite posets in finite-dimensional GF(p)-vector spaces.
//!
//! A [`Representation`] stores one dimension per element and one matrix per Hasse
//! edge; the map for an arbitrary comparable pair is the composite along a fixed
//! path, which is well-defined because construction checks that all Hasse-path
//! composites agree. Zero-dimensional spaces are allowed everywhere and empty
//! matrices compose like any other.
//!
//! Morphisms ([`RepMorphism`]) are per-element matrices satisfying naturality on
//! every Hasse edge. Hom spaces are computed exactly as the kernel of the naturality
//! system, and kernels/cokernels/(co)limits are pointwise with induced structure
//! maps.

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{quotient_map, quotient_section, FieldSpec, Matrix};
use crate::poset::{Poset, Spread, Subset};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepError {
    #[error("dims length {0} does not match poset size {1}")]
    DimsLength(usize, usize),
    #[error("expected one matrix per Hasse edge ({expected}), got {got}")]
    MapCount { expected: usize, got: usize },
    #[error("map for edge {0} -> {1} has shape {2}x{3}, expected {4}x{5}")]
    MapShape(usize, usize, usize, usize, usize, usize),
    #[error("functoriality fails: two paths from {0} to {1} compose differently")]
    NonCommuting(usize, usize),
    #[error("morphism component at element {0} has wrong shape")]
    ComponentShape(usize),
    #[error("naturality fails on edge {0} -> {1}")]
    NotNatural(usize, usize),
    #[error("representations live over different posets")]
    PosetMismatch,
    #[error("representations live over different fields")]
    FieldMismatch,
    #[error("indicator subsets must be convex")]
    NotConvex,
    #[error("map of posets is not order-preserving at pair ({0}, {1})")]
    NotMonotone(usize, usize),
    #[error("isomorphism test inconclusive: Hom dimension {0} exceeds search cap {1}")]
    IsoInconclusive(usize, usize),
}

/// Shared-ownership handle used everywhere a representation is passed around.
pub type Rep = Arc<Representation>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    poset: Arc<Poset>,
    field: FieldSpec,
    dims: Vec<usize>,
    /// One matrix per Hasse edge, in `poset.hasse_edges()` order; the matrix for
    /// edge `(x, y)` has shape `dims[y] x dims[x]`.
    maps: Vec<Matrix>,
}

impl Representation {
    /// Validates shapes and functoriality (all Hasse-path composites between any two
    /// comparable elements agree) before accepting the data.
    pub fn new(
        poset: Arc<Poset>,
        field: FieldSpec,
        dims: Vec<usize>,
        maps: Vec<Matrix>,
    ) -> Result<Rep, RepError> {
        let rep = Representation { poset, field, dims, maps };
        rep.validate()?;
        Ok(Arc::new(rep))
    }

    /// For internal constructions whose functoriality holds by design; still fully
    /// checked in debug builds.
    pub(crate) fn from_parts_unchecked(
        poset: Arc<Poset>,
        field: FieldSpec,
        dims: Vec<usize>,
        maps: Vec<Matrix>,
    ) -> Rep {
        let rep = Representation { poset, field, dims, maps };
        debug_assert_eq!(rep.validate(), Ok(()));
        Arc::new(rep)
    }

    pub fn zero(poset: Arc<Poset>, field: FieldSpec) -> Rep {
        let n = poset.len();
        let maps = poset
            .hasse_edges()
            .iter()
            .map(|_| Matrix::zero(field, 0, 0))
            .collect();
        Representation::from_parts_unchecked(poset, field, vec![0; n], maps)
    }

    /// The indicator representation of a convex subset: k on the subset, identity on
    /// internal edges, zero elsewhere.
    pub fn indicator(poset: Arc<Poset>, field: FieldSpec, s: Subset) -> Result<Rep, RepError> {
        if !poset.is_convex(s) {
            return Err(RepError::NotConvex);
        }
        let dims: Vec<usize> = (0..poset.len()).map(|i| s.contains(i) as usize).collect();
        let maps = poset
            .hasse_edges()
            .iter()
            .map(|&(x, y)| {
                if s.contains(x) && s.contains(y) {
                    Matrix::identity(field, 1)
                } else {
                    Matrix::zero(field, dims[y], dims[x])
                }
            })
            .collect();
        Ok(Representation::from_parts_unchecked(poset, field, dims, maps))
    }

    /// The spread representation `k_S`.
    pub fn spread_rep(poset: Arc<Poset>, field: FieldSpec, s: &Spread) -> Rep {
        Representation::indicator(poset, field, s.members()).expect("spreads are convex")
    }

    /// The constant representation `k_P`.
    pub fn constant(poset: Arc<Poset>, field: FieldSpec) -> Rep {
        let all = poset.elements();
        Representation::indicator(poset, field, all).expect("the full poset is convex")
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_at(&self, p: usize) -> usize {
        self.dims[p]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn support(&self) -> Subset {
        Subset::from_indices((0..self.dims.len()).filter(|&p| self.dims[p] > 0))
    }

    pub fn edge_maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn edge_map(&self, edge_idx: usize) -> &Matrix {
        &self.maps[edge_idx]
    }

    /// Elements ordered so that every element appears after everything below it.
    fn topo_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.poset.len()).collect();
        order.sort_by_key(|&i| (self.poset.down_of(i).len(), i));
        order
    }

    fn validate(&self) -> Result<(), RepError> {
        let n = self.poset.len();
        if self.dims.len() != n {
            return Err(RepError::DimsLength(self.dims.len(), n));
        }
        let edges = self.poset.hasse_edges();
        if self.maps.len() != edges.len() {
            return Err(RepError::MapCount { expected: edges.len(), got: self.maps.len() });
        }
        for (e, &(x, y)) in edges.iter().enumerate() {
            let m = &self.maps[e];
            if m.rows() != self.dims[y] || m.cols() != self.dims[x] {
                return Err(RepError::MapShape(
                    x,
                    y,
                    m.rows(),
                    m.cols(),
                    self.dims[y],
                    self.dims[x],
                ));
            }
        }
        // All paths out of each source must compose equally; dynamic programming
        // over the Hasse DAG in a topological order.
        let topo = self.topo_order();
        for &src in &topo {
            let mut reached: Vec<Option<Matrix>> = vec![None; n];
            reached[src] = Some(Matrix::identity(self.field, self.dims[src]));
            for &y in &topo {
                if y == src || !self.poset.leq(src, y) {
                    continue;
                }
                for (e, &(w, yy)) in edges.iter().enumerate() {
                    if yy != y || !self.poset.leq(src, w) {
                        continue;
                    }
                    let via = self.maps[e].mul(reached[w].as_ref().expect("topo order"));
                    match &reached[y] {
                        None => reached[y] = Some(via),
                        Some(prev) => {
                            if *prev != via {
                                return Err(RepError::NonCommuting(src, y));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The structure map for an arbitrary comparable pair, composed along a fixed
    /// Hasse path (lowest-index predecessor first, so the choice is deterministic).
    pub fn map_for_pair(&self, x: usize, y: usize) -> Matrix {
        assert!(self.poset.leq(x, y), "map_for_pair needs x <= y");
        if x == y {
            return Matrix::identity(self.field, self.dims[x]);
        }
        let (e, &(w, _)) = self
            .poset
            .hasse_edges()
            .iter()
            .enumerate()
            .find(|&(_, &(w, yy))| yy == y && self.poset.leq(x, w))
            .expect("comparable pair has an incoming edge above x");
        self.maps[e].mul(&self.map_for_pair(x, w))
    }
}

/// Builds and validates a representation from raw per-edge matrices, reporting a
/// witness pair when functoriality fails.
pub fn validate_representation(
    poset: Arc<Poset>,
    field: FieldSpec,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
) -> Result<Rep, RepError> {
    Representation::new(poset, field, dims, maps)
}

/// A natural transformation between two representations of the same poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepMorphism {
    source: Rep,
    target: Rep,
    components: Vec<Matrix>,
}

impl RepMorphism {
    pub fn new(source: Rep, target: Rep, components: Vec<Matrix>) -> Result<RepMorphism, RepError> {
        let f = RepMorphism { source, target, components };
        f.validate()?;
        Ok(f)
    }

    pub(crate) fn from_parts_unchecked(
        source: Rep,
        target: Rep,
        components: Vec<Matrix>,
    ) -> RepMorphism {
        let f = RepMorphism { source, target, components };
        debug_assert_eq!(f.validate(), Ok(()));
        f
    }

    pub fn zero(source: Rep, target: Rep) -> RepMorphism {
        let field = source.field();
        let components = (0..source.poset().len())
            .map(|p| Matrix::zero(field, target.dim_at(p), source.dim_at(p)))
            .collect();
        RepMorphism::from_parts_unchecked(source, target, components)
    }

    pub fn identity(rep: &Rep) -> RepMorphism {
        let components = (0..rep.poset().len())
            .map(|p| Matrix::identity(rep.field(), rep.dim_at(p)))
            .collect();
        RepMorphism::from_parts_unchecked(rep.clone(), rep.clone(), components)
    }

    fn validate(&self) -> Result<(), RepError> {
        if self.source.poset() != self.target.poset() {
            return Err(RepError::PosetMismatch);
        }
        if self.source.field() != self.target.field() {
            return Err(RepError::FieldMismatch);
        }
        let n = self.source.poset().len();
        if self.components.len() != n {
            return Err(RepError::ComponentShape(self.components.len()));
        }
        for p in 0..n {
            let c = &self.components[p];
            if c.rows() != self.target.dim_at(p) || c.cols() != self.source.dim_at(p) {
                return Err(RepError::ComponentShape(p));
            }
        }
        for (e, &(x, y)) in self.source.poset().hasse_edges().iter().enumerate() {
            let lhs = self.components[y].mul(self.source.edge_map(e));
            let rhs = self.target.edge_map(e).mul(&self.components[x]);
            if lhs != rhs {
                return Err(RepError::NotNatural(x, y));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &Rep {
        &self.source
    }

    pub fn target(&self) -> &Rep {
        &self.target
    }

    pub fn component(&self, p: usize) -> &Matrix {
        &self.components[p]
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Matrix::is_zero)
    }

    /// `self ∘ g` (apply `g` first).
    pub fn compose(&self, g: &RepMorphism) -> RepMorphism {
        assert_eq!(*g.target(), self.source, "composition needs matching middle object");
        let components = self
            .components
            .iter()
            .zip(&g.components)
            .map(|(a, b)| a.mul(b))
            .collect();
        RepMorphism::from_parts_unchecked(g.source.clone(), self.target.clone(), components)
    }

    /// All components invertible.
    pub fn is_iso(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.rows() == c.cols() && c.rank() == c.rows())
    }

    pub fn add(&self, other: &RepMorphism) -> RepMorphism {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect();
        RepMorphism::from_parts_unchecked(self.source.clone(), self.target.clone(), components)
    }

    pub fn scale(&self, c: u32) -> RepMorphism {
        let components = self.components.iter().map(|m| m.scale(c)).collect();
        RepMorphism::from_parts_unchecked(self.source.clone(), self.target.clone(), components)
    }

    /// All component entries in element order, for span computations.
    pub fn flatten(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for c in &self.components {
            out.extend_from_slice(c.entries());
        }
        out
    }

    pub fn from_flat(source: Rep, target: Rep, data: &[u32]) -> RepMorphism {
        let field = source.field();
        let mut components = Vec::with_capacity(source.poset().len());
        let mut off = 0;
        for p in 0..source.poset().len() {
            let (r, c) = (target.dim_at(p), source.dim_at(p));
            let mut m = Matrix::zero(field, r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, data[off + i * c + j]);
                }
            }
            off += r * c;
            components.push(m);
        }
        debug_assert_eq!(off, data.len());
        RepMorphism::from_parts_unchecked(source, target, components)
    }
}

/// A deterministic basis of the natural transformations `M -> N`: the kernel of the
/// naturality system, with unknowns ordered element by element and row-major within
/// each component.
pub fn hom_basis(m: &Rep, n: &Rep) -> Vec<RepMorphism> {
    assert_eq!(m.poset(), n.poset(), "hom_basis needs a common poset");
    assert_eq!(m.field(), n.field(), "hom_basis needs a common field");
    let field = m.field();
    let count = m.poset().len();
    let mut offsets = vec![0usize; count + 1];
    for p in 0..count {
        offsets[p + 1] = offsets[p] + n.dim_at(p) * m.dim_at(p);
    }
    let unknowns = offsets[count];
    if unknowns == 0 {
        return Vec::new();
    }
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (e, &(x, y)) in m.poset().hasse_edges().iter().enumerate() {
        let a = m.edge_map(e);
        let b = n.edge_map(e);
        // f_y ∘ M(x<=y) = N(x<=y) ∘ f_x, one equation per (r, c) in N(y) x M(x).
        for r in 0..n.dim_at(y) {
            for c in 0..m.dim_at(x) {
                let mut row = vec![0u32; unknowns];
                for k in 0..m.dim_at(y) {
                    let idx = offsets[y] + r * m.dim_at(y) + k;
                    row[idx] = field.add(row[idx], a.at(k, c));
                }
                for l in 0..n.dim_at(x) {
                    let idx = offsets[x] + l * m.dim_at(x) + c;
                    row[idx] = field.sub(row[idx], b.at(r, l));
                }
                if row.iter().any(|&v| v != 0) {
                    rows.push(row);
                }
            }
        }
    }
    let system = if rows.is_empty() {
        Matrix::zero(field, 1, unknowns)
    } else {
        Matrix::from_rows(field, &rows)
    };
    system
        .kernel_basis()
        .into_iter()
        .map(|v| RepMorphism::from_flat(m.clone(), n.clone(), &v))
        .collect()
}

/// Pointwise kernel of a morphism, with the inclusion back into the source.
pub fn kernel_of(f: &RepMorphism) -> (Rep, RepMorphism) {
    let source = f.source();
    let field = source.field();
    let poset = source.poset().clone();
    let n = poset.len();
    let incls: Vec<Matrix> = (0..n)
        .map(|p| {
            let basis = f.component(p).kernel_basis();
            Matrix::from_cols(field, source.dim_at(p), &basis)
        })
        .collect();
    let dims: Vec<usize> = incls.iter().map(Matrix::cols).collect();
    let maps: Vec<Matrix> = poset
        .hasse_edges()
        .iter()
        .enumerate()
        .map(|(e, &(x, y))| {
            // Coordinates of M(x<=y) ∘ incl_x relative to the kernel basis at y.
            let img = source.edge_map(e).mul(&incls[x]);
            let mut out = Matrix::zero(field, dims[y], dims[x]);
            for c in 0..dims[x] {
                let col: Vec<u32> = (0..source.dim_at(y)).map(|r| img.at(r, c)).collect();
                let z = incls[y]
                    .solve(&col)
                    .expect("shape checked")
                    .expect("naturality keeps kernels inside kernels");
                for r in 0..dims[y] {
                    out.set(r, c, z[r]);
                }
            }
            out
        })
        .collect();
    let kernel = Representation::from_parts_unchecked(poset, field, dims, maps);
    let incl = RepMorphism::from_parts_unchecked(kernel.clone(), source.clone(), incls);
    (kernel, incl)
}

/// Pointwise cokernel of a morphism, with the projection from the target.
pub fn cokernel_of(f: &RepMorphism) -> (Rep, RepMorphism) {
    let target = f.target();
    let field = target.field();
    let poset = target.poset().clone();
    let n = poset.len();
    let mut projs = Vec::with_capacity(n);
    let mut sections = Vec::with_capacity(n);
    let mut dims = Vec::with_capacity(n);
    for p in 0..n {
        let image_rows: Vec<Vec<u32>> = (0..f.component(p).cols())
            .map(|c| (0..f.component(p).rows()).map(|r| f.component(p).at(r, c)).collect())
            .collect();
        let (d, proj) = quotient_map(field, target.dim_at(p), &image_rows);
        sections.push(quotient_section(field, target.dim_at(p), &image_rows));
        projs.push(proj);
        dims.push(d);
    }
    let maps: Vec<Matrix> = poset
        .hasse_edges()
        .iter()
        .enumerate()
        .map(|(e, &(x, y))| projs[y].mul(&target.edge_map(e).mul(&sections[x])))
        .collect();
    let coker = Representation::from_parts_unchecked(poset, field, dims, maps);
    let proj = RepMorphism::from_parts_unchecked(target.clone(), coker.clone(), projs);
    (coker, proj)
}

/// Block-diagonal direct sum with the canonical injections. An empty list yields the
/// zero representation over the given poset.
pub fn direct_sum(poset: Arc<Poset>, field: FieldSpec, parts: &[Rep]) -> (Rep, Vec<RepMorphism>) {
    let n = poset.len();
    for part in parts {
        assert_eq!(part.poset().as_ref(), poset.as_ref(), "direct sum needs one poset");
        assert_eq!(part.field(), field);
    }
    let dims: Vec<usize> = (0..n).map(|p| parts.iter().map(|m| m.dim_at(p)).sum()).collect();
    let maps: Vec<Matrix> = poset
        .hasse_edges()
        .iter()
        .enumerate()
        .map(|(e, &(x, y))| {
            let mut big = Matrix::zero(field, dims[y], dims[x]);
            let mut ro = 0;
            let mut co = 0;
            for part in parts {
                let block = part.edge_map(e);
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        big.set(ro + r, co + c, block.at(r, c));
                    }
                }
                ro += part.dim_at(y);
                co += part.dim_at(x);
            }
            big
        })
        .collect();
    let sum = Representation::from_parts_unchecked(poset.clone(), field, dims, maps);
    let mut injections = Vec::with_capacity(parts.len());
    let mut offset = vec![0usize; n];
    for part in parts {
        let comps: Vec<Matrix> = (0..n)
            .map(|p| {
                let mut m = Matrix::zero(field, sum.dim_at(p), part.dim_at(p));
                for r in 0..part.dim_at(p) {
                    m.set(offset[p] + r, r, 1);
                }
                m
            })
            .collect();
        injections.push(RepMorphism::from_parts_unchecked(part.clone(), sum.clone(), comps));
        for p in 0..n {
            offset[p] += part.dim_at(p);
        }
    }
    (sum, injections)
}

/// A limit or colimit of the whole diagram: its dimension and the cone maps
/// (`lim -> M(p)` per element) or cocone maps (`M(p) -> colim`).
#[derive(Debug, Clone)]
pub struct ConeData {
    pub dim: usize,
    pub maps: Vec<Matrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Limit,
    Colimit,
}

/// The limit of `M` as the kernel of the difference map `⊕_p M(p) -> ⊕_edges M(y)`,
/// or the colimit as the cokernel of the corresponding edge map.
pub fn co_limit(m: &Rep, kind: LimitKind) -> ConeData {
    let field = m.field();
    let poset = m.poset();
    let n = poset.len();
    let mut offsets = vec![0usize; n + 1];
    for p in 0..n {
        offsets[p + 1] = offsets[p] + m.dim_at(p);
    }
    let total = offsets[n];
    match kind {
        LimitKind::Limit => {
            // Tuples (v_p) with M(x<=y) v_x = v_y on every edge.
            let mut rows = Vec::new();
            for (e, &(x, y)) in poset.hasse_edges().iter().enumerate() {
                let a = m.edge_map(e);
                for r in 0..m.dim_at(y) {
                    let mut row = vec![0u32; total];
                    for c in 0..m.dim_at(x) {
                        row[offsets[x] + c] = a.at(r, c);
                    }
                    row[offsets[y] + r] = field.sub(row[offsets[y] + r], 1);
                    rows.push(row);
                }
            }
            let basis = if total == 0 {
                Vec::new()
            } else if rows.is_empty() {
                Matrix::zero(field, 1, total).kernel_basis()
            } else {
                Matrix::from_rows(field, &rows).kernel_basis()
            };
            let dim = basis.len();
            let maps = (0..n)
                .map(|p| {
                    let mut cone = Matrix::zero(field, m.dim_at(p), dim);
                    for (j, v) in basis.iter().enumerate() {
                        for r in 0..m.dim_at(p) {
                            cone.set(r, j, v[offsets[p] + r]);
                        }
                    }
                    cone
                })
                .collect();
            ConeData { dim, maps }
        }
        LimitKind::Colimit => {
            // Quotient of ⊕_p M(p) by the spans of incl_y(M(x<=y)u) - incl_x(u).
            let mut relations = Vec::new();
            for (e, &(x, y)) in poset.hasse_edges().iter().enumerate() {
                let a = m.edge_map(e);
                for c in 0..m.dim_at(x) {
                    let mut rel = vec![0u32; total];
                    for r in 0..m.dim_at(y) {
                        rel[offsets[y] + r] = a.at(r, c);
                    }
                    rel[offsets[x] + c] = field.sub(rel[offsets[x] + c], 1);
                    relations.push(rel);
                }
            }
            let (dim, proj) = quotient_map(field, total, &relations);
            let maps = (0..n)
                .map(|p| {
                    let mut cocone = Matrix::zero(field, dim, m.dim_at(p));
                    for c in 0..m.dim_at(p) {
                        for r in 0..dim {
                            cocone.set(r, c, proj.at(r, offsets[p] + c));
                        }
                    }
                    cocone
                })
                .collect();
            ConeData { dim, maps }
        }
    }
}

/// Restriction along an order-preserving map `psi: Q -> P`, given as the image index
/// per element of `Q`. The result lives over `Q` with `(Res M)(q) = M(psi q)`.
pub fn restrict(m: &Rep, q_poset: Arc<Poset>, psi: &[usize]) -> Result<Rep, RepError> {
    assert_eq!(psi.len(), q_poset.len(), "psi must cover the source poset");
    let p_poset = m.poset();
    for a in 0..q_poset.len() {
        for b in 0..q_poset.len() {
            if q_poset.leq(a, b) && !p_poset.leq(psi[a], psi[b]) {
                return Err(RepError::NotMonotone(a, b));
            }
        }
    }
    let dims: Vec<usize> = psi.iter().map(|&p| m.dim_at(p)).collect();
    let maps: Vec<Matrix> = q_poset
        .hasse_edges()
        .iter()
        .map(|&(x, y)| m.map_for_pair(psi[x], psi[y]))
        .collect();
    Ok(Representation::from_parts_unchecked(q_poset, m.field(), dims, maps))
}

pub const DEFAULT_ISO_CAP: usize = 4;

/// Isomorphism test: equal dimension vectors plus an invertible natural
/// transformation. Tries Hom-basis elements first, then every GF(p)-combination when
/// the Hom space is small; `Err` when the search space exceeds the cap.
pub fn iso_check(m: &Rep, n: &Rep, cap: usize) -> Result<bool, RepError> {
    if m.dims() != n.dims() {
        return Ok(false);
    }
    if m.total_dim() == 0 {
        return Ok(true);
    }
    let basis = hom_basis(m, n);
    for f in &basis {
        if f.is_iso() {
            return Ok(true);
        }
    }
    if basis.len() > cap {
        return Err(RepError::IsoInconclusive(basis.len(), cap));
    }
    let p = m.field().modulus() as u64;
    let Some(combos) = p.checked_pow(basis.len() as u32) else {
        return Err(RepError::IsoInconclusive(basis.len(), cap));
    };
    for code in 1..combos {
        let mut digits = code;
        let mut f = RepMorphism::zero(m.clone(), n.clone());
        for b in &basis {
            let coeff = (digits % p) as u32;
            digits /= p;
            if coeff != 0 {
                f = f.add(&b.scale(coeff));
            }
        }
        if f.is_iso() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A random finitely presented representation: the cokernel of a random morphism
/// between direct sums of principal-upset representations. Functorial by
/// construction, which sidesteps sampling commuting matrices directly.
pub fn random_rep<R: rand::Rng>(
    poset: &Arc<Poset>,
    field: FieldSpec,
    rng: &mut R,
    max_generators: usize,
    max_relations: usize,
) -> Rep {
    let n = poset.len();
    let gens: Vec<usize> = (0..rng.gen_range(1..=max_generators.max(1)))
        .map(|_| rng.gen_range(0..n))
        .collect();
    let rels: Vec<usize> = (0..rng.gen_range(0..=max_relations))
        .map(|_| rng.gen_range(0..n))
        .collect();
    let upset_rep = |p: usize| {
        Representation::indicator(poset.clone(), field, poset.up_of(p))
            .expect("principal upsets are convex")
    };
    let p0_parts: Vec<Rep> = gens.iter().map(|&g| upset_rep(g)).collect();
    let (p0, _) = direct_sum(poset.clone(), field, &p0_parts);
    let p1_parts: Vec<Rep> = rels.iter().map(|&r| upset_rep(r)).collect();
    let (p1, _) = direct_sum(poset.clone(), field, &p1_parts);
    // A morphism ⊕ k_{up r} -> ⊕ k_{up g} is a scalar per (r, g) with g <= r,
    // acting as that constant on the overlap.
    let mut scalars = vec![vec![0u32; gens.len()]; rels.len()];
    for (j, &r) in rels.iter().enumerate() {
        for (i, &g) in gens.iter().enumerate() {
            if poset.leq(g, r) {
                scalars[j][i] = rng.gen_range(0..field.modulus());
            }
        }
    }
    let components: Vec<Matrix> = (0..n)
        .map(|p| {
            let mut mat = Matrix::zero(field, p0.dim_at(p), p1.dim_at(p));
            let live_rows: Vec<usize> = gens
                .iter()
                .enumerate()
                .filter(|&(_, &g)| poset.leq(g, p))
                .map(|(i, _)| i)
                .collect();
            let live_cols: Vec<usize> = rels
                .iter()
                .enumerate()
                .filter(|&(_, &r)| poset.leq(r, p))
                .map(|(j, _)| j)
                .collect();
            for (row, &i) in live_rows.iter().enumerate() {
                for (col, &j) in live_cols.iter().enumerate() {
                    mat.set(row, col, scalars[j][i]);
                }
            }
            mat
        })
        .collect();
    let f = RepMorphism::from_parts_unchecked(p1, p0, components);
    cokernel_of(&f).0
}

/// Seeded batch of random finitely presented representations (ChaCha8 keyed by
/// `seed`), for reproducible sampled tests without threading an RNG through
/// callers.
pub fn seeded_random_reps(
    poset: &Arc<Poset>,
    field: FieldSpec,
    seed: u64,
    count: usize,
    max_generators: usize,
    max_relations: usize,
) -> Vec<Rep> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_rep(poset, field, &mut rng, max_generators, max_relations)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{build_grid, build_poset, Dir};
    use crate::verify::oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn chain(n: usize) -> Arc<Poset> {
        Arc::new(Poset::chain(n))
    }

    fn grid22() -> (Arc<Poset>, crate::poset::GridPoset) {
        let g = build_grid(&[2, 2]).unwrap();
        (Arc::new(g.poset().clone()), g)
    }

    fn interval(poset: &Arc<Poset>, els: &[usize]) -> Rep {
        Representation::indicator(poset.clone(), gf(2), Subset::from_indices(els.iter().copied()))
            .unwrap()
    }

    #[test]
    fn spread_rep_shapes() {
        let p = chain(3);
        let s = Spread::from_subset(&p, Subset::from_indices([1, 2])).unwrap();
        let rep = Representation::spread_rep(p.clone(), gf(2), &s);
        assert_eq!(rep.dims(), &[0, 1, 1]);
        // End space of a spread representation is one-dimensional.
        assert_eq!(hom_basis(&rep, &rep).len(), 1);
    }

    #[test]
    fn validate_rejects_non_commuting_square() {
        let (p, g) = grid22();
        let dims = vec![1; 4];
        let field = gf(2);
        let bad_edge_source = g.index(&[0, 1]);
        let maps: Vec<Matrix> = p
            .hasse_edges()
            .iter()
            .map(|&(x, _)| {
                if x == bad_edge_source {
                    Matrix::zero(field, 1, 1)
                } else {
                    Matrix::identity(field, 1)
                }
            })
            .collect();
        let err = Representation::new(p.clone(), field, dims.clone(), maps).unwrap_err();
        assert!(matches!(err, RepError::NonCommuting(_, _)));

        let zeros: Vec<Matrix> =
            p.hasse_edges().iter().map(|_| Matrix::zero(field, 1, 1)).collect();
        assert!(Representation::new(p, field, dims, zeros).is_ok());
    }

    #[test]
    fn abc_identity_rep_is_up_b() {
        // k <- k -> k with identities over the poset b <= a, b <= c equals k_{up b}.
        let p = Arc::new(build_poset(3, &[(1, 0), (1, 2)]).unwrap());
        let field = gf(3);
        let maps = vec![Matrix::identity(field, 1); 2];
        let rep = Representation::new(p.clone(), field, vec![1, 1, 1], maps).unwrap();
        let up_b = Representation::indicator(p.clone(), field, p.up_of(1)).unwrap();
        assert!(iso_check(&rep, &up_b, DEFAULT_ISO_CAP).unwrap());
    }

    #[test]
    fn hom_between_chain_intervals() {
        let p = chain(3);
        let late = interval(&p, &[1, 2]);
        let early = interval(&p, &[0, 1]);
        assert_eq!(hom_basis(&late, &early).len(), 1);
        assert_eq!(hom_basis(&early, &late).len(), 0);
    }

    #[test]
    fn hom_dims_match_scalar_assignment_oracle() {
        for poset in oracle::test_corpus(12) {
            let poset = Arc::new(poset);
            let spreads = poset.enumerate_spreads();
            for t in &spreads {
                for s in &spreads {
                    let mt = Representation::spread_rep(poset.clone(), gf(2), t);
                    let ms = Representation::spread_rep(poset.clone(), gf(2), s);
                    assert_eq!(
                        hom_basis(&mt, &ms).len(),
                        oracle::hom_dim_between_spreads(&poset, t, s),
                        "T = {:?}, S = {:?}",
                        t.members(),
                        s.members()
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let p = chain(2);
        let m = interval(&p, &[0, 1]);
        let (k, _) = kernel_of(&RepMorphism::identity(&m));
        assert!(k.is_zero());

        let (k0, incl) = kernel_of(&RepMorphism::zero(m.clone(), m.clone()));
        assert_eq!(k0.dims(), m.dims());
        assert!(iso_check(&k0, &m, DEFAULT_ISO_CAP).unwrap());
        assert!(!incl.is_zero());
    }

    #[test]
    fn kernel_of_radical_surjection_on_grid() {
        // The surjection k_{00,01} ⊕ k_{00,10} -> k_{00} has kernel k_{00,01,10}.
        let (p, g) = grid22();
        let field = gf(2);
        let c1 = interval(&p, &[g.index(&[0, 0]), g.index(&[0, 1])]);
        let c2 = interval(&p, &[g.index(&[0, 0]), g.index(&[1, 0])]);
        let target = interval(&p, &[g.index(&[0, 0])]);
        let (sum, injections) = direct_sum(p.clone(), field, &[c1, c2]);
        let origin = g.index(&[0, 0]);
        let mut comps: Vec<Matrix> = (0..4)
            .map(|q| Matrix::zero(field, target.dim_at(q), sum.dim_at(q)))
            .collect();
        comps[origin] = Matrix::from_rows(field, &[vec![1, 1]]);
        let f = RepMorphism::new(sum, target, comps).unwrap();
        assert_eq!(injections.len(), 2);
        let (kernel, incl) = kernel_of(&f);
        let hat = interval(&p, &[g.index(&[0, 0]), g.index(&[0, 1]), g.index(&[1, 0])]);
        assert!(iso_check(&kernel, &hat, DEFAULT_ISO_CAP).unwrap());
        // Exactness: inclusion components injective and f ∘ incl = 0.
        assert!(f.compose(&incl).is_zero());
        for p_idx in 0..4 {
            assert_eq!(incl.component(p_idx).rank(), kernel.dim_at(p_idx));
        }
    }

    #[test]
    fn direct_sum_dims_and_zero() {
        let p = chain(3);
        let m = interval(&p, &[0, 1]);
        let (zero_sum, inj) = direct_sum(p.clone(), gf(2), &[]);
        assert!(zero_sum.is_zero() && inj.is_empty());

        let z = Representation::zero(p.clone(), gf(2));
        let (sum, _) = direct_sum(p.clone(), gf(2), &[m.clone(), z]);
        assert!(iso_check(&sum, &m, DEFAULT_ISO_CAP).unwrap());

        let (sum2, _) = direct_sum(p.clone(), gf(2), &[m.clone(), m.clone()]);
        for q in 0..3 {
            assert_eq!(sum2.dim_at(q), 2 * m.dim_at(q));
        }
    }

    #[test]
    fn limits_and_colimits() {
        let (p, g) = grid22();
        let constant = Representation::constant(p.clone(), gf(2));
        assert_eq!(co_limit(&constant, LimitKind::Limit).dim, 1);
        assert_eq!(co_limit(&constant, LimitKind::Colimit).dim, 1);

        let up01 = interval(&p, &[g.index(&[0, 1]), g.index(&[1, 1])]);
        assert_eq!(co_limit(&up01, LimitKind::Limit).dim, 0);

        // Upset spreads have colimit dimension 1; dually, downset spreads have
        // limit dimension 1.
        for poset in oracle::test_corpus(12) {
            let poset = Arc::new(poset);
            for s in poset.enumerate_spreads() {
                let rep = Representation::spread_rep(poset.clone(), gf(2), &s);
                if poset.closure(s.members(), Dir::Up) == s.members() {
                    assert_eq!(co_limit(&rep, LimitKind::Colimit).dim, 1, "S = {:?}", s.members());
                }
                if poset.closure(s.members(), Dir::Down) == s.members() {
                    assert_eq!(co_limit(&rep, LimitKind::Limit).dim, 1, "S = {:?}", s.members());
                }
            }
        }
    }

    #[test]
    fn lim_dim_equals_hom_from_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for factors in [vec![2, 2], vec![3, 2]] {
            let g = build_grid(&factors).unwrap();
            let p = Arc::new(g.poset().clone());
            for _ in 0..10 {
                let m = random_rep(&p, gf(2), &mut rng, 3, 3);
                let k_p = Representation::constant(p.clone(), gf(2));
                assert_eq!(co_limit(&m, LimitKind::Limit).dim, hom_basis(&k_p, &m).len());
            }
        }
    }

    #[test]
    fn restrict_examples() {
        let p = chain(4);
        let m = interval(&p, &[1, 2]);
        let identity: Vec<usize> = (0..4).collect();
        let back = restrict(&m, p.clone(), &identity).unwrap();
        assert!(iso_check(&m, &back, DEFAULT_ISO_CAP).unwrap());

        let q = chain(2);
        assert_eq!(restrict(&m, q.clone(), &[3, 0]).unwrap_err(), RepError::NotMonotone(0, 1));

        // Restriction of an indicator along an inclusion is the indicator of the
        // preimage.
        let sub = restrict(&m, q, &[1, 3]).unwrap();
        assert_eq!(sub.dims(), &[1, 0]);
    }

    #[test]
    fn iso_check_examples() {
        let p = chain(3);
        let m = interval(&p, &[0, 1]);
        assert!(iso_check(&m, &m, DEFAULT_ISO_CAP).unwrap());
        let other = interval(&p, &[1, 2]);
        assert!(!iso_check(&m, &other, DEFAULT_ISO_CAP).unwrap());
    }

    #[test]
    fn random_reps_are_functorial_and_kernel_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = build_grid(&[3, 2]).unwrap();
        let p = Arc::new(g.poset().clone());
        for p_mod in [2u64, 3] {
            for _ in 0..10 {
                let m = random_rep(&p, gf(p_mod), &mut rng, 3, 3);
                let n = random_rep(&p, gf(p_mod), &mut rng, 3, 3);
                for f in hom_basis(&m, &n) {
                    let (kernel, incl) = kernel_of(&f);
                    assert!(f.compose(&incl).is_zero());
                    for q in 0..p.len() {
                        assert_eq!(incl.component(q).rank(), kernel.dim_at(q));
                    }
                }
            }
        }
    }
}
