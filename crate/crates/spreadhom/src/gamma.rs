//! The endomorphism algebra of the sum of all family spreads, with enough right
//! module theory to resolve its simples.
//!
//! For a [`SpreadFamily`] with spreads `X_1, ..., X_n`, the algebra is
//! `Gamma = End(⊕ X_i) = ⊕_{t,s} Hom(k_T, k_S)` with composition as multiplication.
//! Its Jacobson radical is the off-diagonal part (composites of non-isomorphisms
//! between indecomposables into the diagonal vanish because `End(k_S) = k`), the
//! indecomposable projectives are `P_S = e_S Gamma = ⊕_t Hom(k_T, k_S)` acting by
//! precomposition, and the simples are one-dimensional. Minimal projective
//! resolutions of simples are computed by iterated projective covers, which gives
//! `gldim(Gamma)` as an independent cross-check of the spread-global dimension.

use crate::approx::SpreadFamily;
use crate::linalg::{quotient_representatives, FieldSpec, Matrix};

/// Index data for one basis element of the algebra: a Hom-basis morphism
/// `k_{source} -> k_{target}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisElement {
    pub source: usize,
    pub target: usize,
    pub hom_index: usize,
}

/// Multiplication table of `End(⊕ spreads)` with respect to the cached Hom bases.
pub struct GammaTable {
    field: FieldSpec,
    n_spreads: usize,
    basis: Vec<BasisElement>,
    /// `offset[t][s]` is the global index of the first basis vector of `Hom(t, s)`.
    offset: Vec<Vec<usize>>,
    dims: Vec<Vec<usize>>,
    /// `product[i][j]` expresses `b_i ∘ b_j` in the global basis (sparse pairs).
    product: Vec<Vec<Vec<(usize, u32)>>>,
    /// Global indices of the identity morphisms `id_{k_S}`.
    diagonal: Vec<usize>,
}

/// Builds the multiplication table, verifying along the way that each diagonal Hom
/// space is the span of the identity, that the table is associative, and that the
/// identities compose as a unit.
pub fn gamma_table(family: &SpreadFamily) -> GammaTable {
    let n = family.len();
    let field = family.field();
    let mut basis = Vec::new();
    let mut offset = vec![vec![0usize; n]; n];
    let mut dims = vec![vec![0usize; n]; n];
    for t in 0..n {
        for s in 0..n {
            offset[t][s] = basis.len();
            dims[t][s] = family.hom(t, s).len();
            for k in 0..family.hom(t, s).len() {
                basis.push(BasisElement { source: t, target: s, hom_index: k });
            }
        }
    }
    let mut diagonal = Vec::with_capacity(n);
    for s in 0..n {
        assert_eq!(dims[s][s], 1, "End of a spread representation is one-dimensional");
        let id = &family.hom(s, s)[0];
        assert!(
            crate::rep::RepMorphism::identity(family.rep(s)) == *id,
            "diagonal Hom basis must be the identity"
        );
        diagonal.push(offset[s][s]);
    }
    // Coordinate solvers per Hom space, reused for every product.
    let coord_matrices: Vec<Vec<Option<Matrix>>> = (0..n)
        .map(|t| {
            (0..n)
                .map(|s| {
                    if dims[t][s] == 0 {
                        None
                    } else {
                        let cols: Vec<Vec<u32>> =
                            family.hom(t, s).iter().map(|f| f.flatten()).collect();
                        Some(Matrix::from_cols(field, cols[0].len(), &cols))
                    }
                })
                .collect()
        })
        .collect();
    let dim = basis.len();
    let mut product = vec![vec![Vec::new(); dim]; dim];
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            // b_i ∘ b_j needs b_j to land where b_i starts.
            if bj.target != bi.source {
                continue;
            }
            let f = &family.hom(bi.source, bi.target)[bi.hom_index];
            let g = &family.hom(bj.source, bj.target)[bj.hom_index];
            let composite = f.compose(g);
            if composite.is_zero() {
                continue;
            }
            let coords = coord_matrices[bj.source][bi.target]
                .as_ref()
                .expect("nonzero composite lives in a nonzero Hom space")
                .solve(&composite.flatten())
                .expect("shapes agree")
                .expect("composite lies in the Hom span");
            let base = offset[bj.source][bi.target];
            for (k, &c) in coords.iter().enumerate() {
                if c != 0 {
                    product[i][j].push((base + k, c));
                }
            }
        }
    }
    let table = GammaTable { field, n_spreads: n, basis, offset, dims, product, diagonal };
    table.verify_unit();
    table.verify_associativity();
    table
}

impl GammaTable {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n_spreads(&self) -> usize {
        self.n_spreads
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn hom_dim(&self, t: usize, s: usize) -> usize {
        self.dims[t][s]
    }

    /// Sparse coordinates of `b_i ∘ b_j`.
    pub fn compose_basis(&self, i: usize, j: usize) -> &[(usize, u32)] {
        &self.product[i][j]
    }

    pub fn identity_index(&self, s: usize) -> usize {
        self.diagonal[s]
    }

    pub fn is_radical_element(&self, i: usize) -> bool {
        self.basis[i].source != self.basis[i].target
    }

    fn verify_unit(&self) {
        for (i, b) in self.basis.iter().enumerate() {
            let left = &self.product[self.diagonal[b.target]][i];
            assert_eq!(left.as_slice(), &[(i, 1)], "left unit fails at basis {i}");
            let right = &self.product[i][self.diagonal[b.source]];
            assert_eq!(right.as_slice(), &[(i, 1)], "right unit fails at basis {i}");
        }
    }

    fn verify_associativity(&self) {
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if self.basis[j].target != self.basis[i].source {
                    continue;
                }
                for k in 0..dim {
                    if self.basis[k].target != self.basis[j].source {
                        continue;
                    }
                    let mut lhs = vec![0u32; dim];
                    for &(m, c) in &self.product[i][j] {
                        for &(r, d) in &self.product[m][k] {
                            lhs[r] = self.field.add(lhs[r], self.field.mul(c, d));
                        }
                    }
                    let mut rhs = vec![0u32; dim];
                    for &(m, c) in &self.product[j][k] {
                        for &(r, d) in &self.product[i][m] {
                            rhs[r] = self.field.add(rhs[r], self.field.mul(c, d));
                        }
                    }
                    assert_eq!(lhs, rhs, "associativity fails at ({i}, {j}, {k})");
                }
            }
        }
    }

    /// Smallest `k` with `rad^k = 0`, by iterating spans of products with the
    /// radical basis.
    pub fn radical_nilpotency_index(&self) -> usize {
        let dim = self.dim();
        let rad_indices: Vec<usize> =
            (0..dim).filter(|&i| self.is_radical_element(i)).collect();
        let mut current: Vec<Vec<u32>> = rad_indices
            .iter()
            .map(|&i| {
                let mut v = vec![0u32; dim];
                v[i] = 1;
                v
            })
            .collect();
        let mut k = 1;
        while !current.is_empty() {
            k += 1;
            let mut next: Vec<Vec<u32>> = Vec::new();
            for v in &current {
                for &j in &rad_indices {
                    let mut w = vec![0u32; dim];
                    let mut nonzero = false;
                    for (i, &c) in v.iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        for &(r, d) in &self.product[i][j] {
                            w[r] = self.field.add(w[r], self.field.mul(c, d));
                            nonzero = true;
                        }
                    }
                    if nonzero && w.iter().any(|&x| x != 0) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return k;
            }
            let (reduced, pivots) = Matrix::from_rows(self.field, &next).rref();
            current = pivots
                .iter()
                .enumerate()
                .map(|(row, _)| reduced.row(row).to_vec())
                .collect();
            assert!(k <= dim + 1, "radical fails to be nilpotent");
        }
        k
    }
}

/// A finite-dimensional right module over the algebra: one block per spread
/// (`M e_t`), with one matrix `M e_s -> M e_t` per radical-or-diagonal basis element
/// `b: k_T -> k_S` acting by precomposition.
#[derive(Debug, Clone)]
pub struct GammaModule {
    block_dims: Vec<usize>,
    /// `action[i]`: the matrix of `- · b_i : M e_{target(i)} -> M e_{source(i)}`.
    action: Vec<Matrix>,
}

impl GammaModule {
    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }
}

/// The simple module concentrated at spread `x`.
pub fn simple_module(table: &GammaTable, x: usize) -> GammaModule {
    let n = table.n_spreads();
    let field = table.field;
    let block_dims: Vec<usize> = (0..n).map(|t| usize::from(t == x)).collect();
    let action = table
        .basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let rows = block_dims[b.source];
            let cols = block_dims[b.target];
            if i == table.identity_index(x) {
                Matrix::identity(field, 1)
            } else {
                Matrix::zero(field, rows, cols)
            }
        })
        .collect();
    GammaModule { block_dims, action }
}

/// The indecomposable projective `P_s = e_s Gamma`: block `t` is `Hom(k_T, k_S)` and
/// basis elements act by precomposition through the multiplication table.
pub fn projective_module(table: &GammaTable, s: usize) -> GammaModule {
    let n = table.n_spreads();
    let field = table.field;
    let block_dims: Vec<usize> = (0..n).map(|t| table.dims[t][s]).collect();
    let action = table
        .basis
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let rows = block_dims[b.source];
            let cols = block_dims[b.target];
            let mut m = Matrix::zero(field, rows, cols);
            for col in 0..cols {
                // Column: the element of Hom(target(b), s) with index col,
                // precomposed with b.
                let i = table.offset[b.target][s] + col;
                for &(r, c) in &table.product[i][j] {
                    let be = table.basis[r];
                    debug_assert_eq!((be.source, be.target), (b.source, s));
                    m.set(be.hom_index, col, c);
                }
            }
            m
        })
        .collect();
    GammaModule { block_dims, action }
}

/// A morphism of right modules, one matrix per block; naturality with all basis
/// actions is checked in debug builds.
#[derive(Debug, Clone)]
pub struct GammaModuleMap {
    blocks: Vec<Matrix>,
}

fn check_module_map(table: &GammaTable, f: &GammaModuleMap, src: &GammaModule, dst: &GammaModule) {
    for (i, b) in table.basis.iter().enumerate() {
        let lhs = f.blocks[b.source].mul(&src.action[i]);
        let rhs = dst.action[i].mul(&f.blocks[b.target]);
        debug_assert_eq!(lhs, rhs, "module map not equivariant at basis {i}");
    }
}

/// Direct sum of modules.
pub fn module_direct_sum(table: &GammaTable, parts: &[GammaModule]) -> GammaModule {
    let n = table.n_spreads();
    let field = table.field;
    let block_dims: Vec<usize> =
        (0..n).map(|t| parts.iter().map(|m| m.block_dims[t]).sum()).collect();
    let action = table
        .basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut big = Matrix::zero(field, block_dims[b.source], block_dims[b.target]);
            let mut ro = 0;
            let mut co = 0;
            for part in parts {
                let blk = &part.action[i];
                for r in 0..blk.rows() {
                    for c in 0..blk.cols() {
                        big.set(ro + r, co + c, blk.at(r, c));
                    }
                }
                ro += part.block_dims[b.source];
                co += part.block_dims[b.target];
            }
            big
        })
        .collect();
    GammaModule { block_dims, action }
}

/// The radical submodule `M J` per block: the span of all images of radical basis
/// actions landing in that block.
fn radical_spans(table: &GammaTable, m: &GammaModule) -> Vec<Vec<Vec<u32>>> {
    let n = table.n_spreads();
    let mut spans: Vec<Vec<Vec<u32>>> = vec![Vec::new(); n];
    for (i, b) in table.basis.iter().enumerate() {
        if !table.is_radical_element(i) {
            continue;
        }
        let act = &m.action[i];
        for col in 0..act.cols() {
            let v: Vec<u32> = (0..act.rows()).map(|r| act.at(r, col)).collect();
            if v.iter().any(|&x| x != 0) {
                spans[b.source].push(v);
            }
        }
    }
    spans
}

/// The projective cover of `m`: multiplicities `dim (M/MJ) e_t`, the cover morphism,
/// and its kernel as a module.
pub fn projective_cover(
    table: &GammaTable,
    m: &GammaModule,
) -> (Vec<usize>, GammaModule, GammaModule) {
    let n = table.n_spreads();
    let field = table.field;
    let spans = radical_spans(table, m);
    // Generators: coset representatives of (M/MJ) e_t, as vectors in M e_t.
    let mut generators: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut multiplicities = vec![0usize; n];
    for t in 0..n {
        let reps = quotient_representatives(field, m.block_dims[t], &spans[t]);
        multiplicities[t] = reps.len();
        for v in reps {
            generators.push((t, v));
        }
    }
    let parts: Vec<GammaModule> =
        generators.iter().map(|&(t, _)| projective_module(table, t)).collect();
    let cover = module_direct_sum(table, &parts);
    // The cover morphism: generator (t, v) sends the basis of P_t block u
    // (morphisms f: k_U -> k_T) to v · f, computed through the module action.
    let mut blocks: Vec<Matrix> = (0..n)
        .map(|u| Matrix::zero(field, m.block_dims[u], cover.block_dims[u]))
        .collect();
    let mut col_offset = vec![0usize; n];
    for (t, v) in &generators {
        for u in 0..n {
            for k in 0..table.dims[u][*t] {
                let basis_idx = table.offset[u][*t] + k;
                let image = m.action[basis_idx].apply(v);
                for (r, &val) in image.iter().enumerate() {
                    blocks[u].set(r, col_offset[u] + k, val);
                }
            }
            col_offset[u] += table.dims[u][*t];
        }
    }
    let cover_map = GammaModuleMap { blocks };
    check_module_map(table, &cover_map, &cover, m);
    // Kernel blockwise, with restricted actions.
    let incls: Vec<Matrix> = (0..n)
        .map(|u| {
            let basis = cover_map.blocks[u].kernel_basis();
            Matrix::from_cols(field, cover.block_dims[u], &basis)
        })
        .collect();
    let k_dims: Vec<usize> = incls.iter().map(Matrix::cols).collect();
    let k_action: Vec<Matrix> = table
        .basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let img = cover.action[i].mul(&incls[b.target]);
            let mut out = Matrix::zero(field, k_dims[b.source], k_dims[b.target]);
            for c in 0..k_dims[b.target] {
                let col: Vec<u32> = (0..cover.block_dims[b.source]).map(|r| img.at(r, c)).collect();
                let z = incls[b.source]
                    .solve(&col)
                    .expect("shapes agree")
                    .expect("action preserves the kernel");
                for r in 0..k_dims[b.source] {
                    out.set(r, c, z[r]);
                }
            }
            out
        })
        .collect();
    let kernel = GammaModule { block_dims: k_dims, action: k_action };
    (multiplicities, cover, kernel)
}

/// Projective dimension of a module by iterated minimal covers; `None` for zero.
pub fn module_pdim(table: &GammaTable, m: &GammaModule) -> Option<usize> {
    if m.is_zero() {
        return None;
    }
    let mut steps = 0;
    let mut current = m.clone();
    loop {
        let (_, _, kernel) = projective_cover(table, &current);
        if kernel.is_zero() {
            return Some(steps);
        }
        steps += 1;
        current = kernel;
        assert!(steps <= 4 * table.dim() + 4, "projective resolution fails to terminate");
    }
}

/// Global dimension of the algebra: the maximum projective dimension of a simple.
pub fn gamma_gldim(table: &GammaTable) -> usize {
    (0..table.n_spreads())
        .filter_map(|x| module_pdim(table, &simple_module(table, x)))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::spread_gldim;
    use crate::linalg::FieldSpec;
    use crate::poset::{build_grid, Poset};
    use std::sync::Arc;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn chain_family(n: usize, p: u64) -> SpreadFamily {
        SpreadFamily::all_spreads(Arc::new(Poset::chain(n)), gf(p))
    }

    #[test]
    fn chain2_table_dimensions() {
        let fam = chain_family(2, 2);
        let table = gamma_table(&fam);
        // 3 identities plus the two inclusions/projections among {0}, {1}, {0,1}:
        // Hom({1},{0,1}), Hom({0,1},{0}) -- total dimension is the sum of Hom dims.
        let expected: usize = (0..fam.len())
            .flat_map(|t| (0..fam.len()).map(move |s| (t, s)))
            .map(|(t, s)| fam.hom(t, s).len())
            .sum();
        assert_eq!(table.dim(), expected);
        // Identities are idempotent.
        for s in 0..fam.len() {
            let i = table.identity_index(s);
            assert_eq!(table.compose_basis(i, i), &[(i, 1)]);
        }
    }

    #[test]
    fn radical_is_nilpotent() {
        let fam = chain_family(3, 2);
        let table = gamma_table(&fam);
        let k = table.radical_nilpotency_index();
        assert!(k >= 2 && k <= table.dim());
        // Longest chain of composable nonzero radical maps on [3]: length 2, so
        // rad^3 = 0 at the latest.
        assert!(k <= 4);
    }

    #[test]
    fn projective_modules_have_simple_tops() {
        let fam = chain_family(3, 3);
        let table = gamma_table(&fam);
        for s in 0..fam.len() {
            let p = projective_module(&table, s);
            let (mult, _, _) = projective_cover(&table, &p);
            let expected: Vec<usize> = (0..fam.len()).map(|t| usize::from(t == s)).collect();
            assert_eq!(mult, expected, "P_{s} must be its own cover");
        }
    }

    #[test]
    fn simples_of_projective_spreads_have_pdim_equal_radical_resolution() {
        let fam = chain_family(2, 2);
        let table = gamma_table(&fam);
        // gldim(Gamma) = spread_gldim + 2 on the chain [2].
        assert_eq!(gamma_gldim(&table), spread_gldim(&fam).unwrap() + 2);
    }

    #[test]
    fn sandwich_on_the_cube() {
        // Three chain factors; the spread-global dimension is corroborated by the
        // independent resolution of the simples over the endomorphism algebra.
        let g = build_grid(&[2, 2, 2]).unwrap();
        let fam = SpreadFamily::all_spreads(Arc::new(g.poset().clone()), gf(2));
        assert_eq!(fam.len(), 68);
        let table = gamma_table(&fam);
        let spread = spread_gldim(&fam).unwrap();
        assert_eq!(spread, 2);
        assert_eq!(gamma_gldim(&table), spread + 2);
    }

    #[test]
    fn sandwich_on_2x2() {
        let g = build_grid(&[2, 2]).unwrap();
        let fam = SpreadFamily::all_spreads(Arc::new(g.poset().clone()), gf(2));
        let table = gamma_table(&fam);
        assert_eq!(gamma_gldim(&table), spread_gldim(&fam).unwrap() + 2);
    }
}
