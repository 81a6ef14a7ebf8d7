//! Dense exact linear algebra over a prime field GF(p).
//!
//! This is the computational substrate for every Hom-space and kernel computation in
//! the crate: reduced row echelon form, kernel bases, linear solving, and
//! deterministic coset representatives for quotient spaces. Pivoting is leftmost-first
//! and quotient representatives are the non-pivot standard basis directions in index
//! order, so every basis produced here is reproducible across runs.
//!
//! Matrices are dense and row-major. Scalars are `u32` values already reduced mod p;
//! with p < 2^16 all products fit in `u32` without overflow.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} out of range (need a prime < 2^16)")]
    ModulusTooLarge(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A prime field GF(p), p < 2^16.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u32,
}

impl FieldSpec {
    pub fn new(p: u64) -> Result<Self, LinalgError> {
        if p >= 1 << 16 {
            return Err(LinalgError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(FieldSpec { p: p as u32 })
    }

    /// GF(2), the default field for all computations.
    pub fn gf2() -> Self {
        FieldSpec { p: 2 }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.p
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero");
        // Fermat: a^(p-2). p-2 < 2^16 so the loop is short.
        let mut base = a % self.p;
        let mut exp = self.p - 2;
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::gf2()
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A dense row-major matrix over GF(p). A 0×n or n×0 matrix is a valid (empty) linear
/// map and composes like any other.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Matrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: &[Vec<u32>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&x| x % field.p.max(1)));
        }
        Matrix { field, rows: r, cols: c, entries }
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_cols(field: FieldSpec, dim: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zero(field, dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u32 {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(r < self.rows && c < self.cols);
        self.entries[r * self.cols + c] = v % self.field.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn to_row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c));
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matrix product");
        let f = self.field;
        let mut out = Matrix::zero(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = f.add(out.at(r, c), f.mul(a, rhs.at(k, c)));
                    out.entries[r * rhs.cols + c] = v;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix apply");
        let f = self.field;
        (0..self.rows)
            .map(|r| {
                let mut acc = 0u32;
                for c in 0..self.cols {
                    acc = f.add(acc, f.mul(self.at(r, c), v[c]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Matrix { field: f, rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, c: u32) -> Matrix {
        let f = self.field;
        let entries = self.entries.iter().map(|&a| f.mul(a, c)).collect();
        Matrix { field: f, rows: self.rows, cols: self.cols, entries }
    }

    /// Stacks `below` underneath `self`.
    pub fn vstack(&self, below: &Matrix) -> Matrix {
        assert_eq!(self.cols, below.cols);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&below.entries);
        Matrix { field: self.field, rows: self.rows + below.rows, cols: self.cols, entries }
    }

    /// Reduced row echelon form together with the strictly increasing pivot column list.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.at(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.entries.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.at(row, col));
            if inv != 1 {
                for c in col..m.cols {
                    let v = f.mul(m.at(row, c), inv);
                    m.entries[row * m.cols + c] = v;
                }
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.at(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.at(r, c), f.mul(factor, m.at(row, c)));
                    m.entries[r * m.cols + c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{v : self * v = 0}`, one vector per non-pivot column, in column
    /// index order. Each basis vector has a 1 in its non-pivot coordinate.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![usize::MAX; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            is_pivot[pc] = i;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if is_pivot[free] != usize::MAX {
                continue;
            }
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.at(i, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * x = b`; `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "matrix has {} rows but right-hand side has length {}",
                self.rows,
                b.len()
            )));
        }
        let f = self.field;
        // Eliminate on [A | b].
        let mut aug = Matrix::zero(f, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u32; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = red.at(i, self.cols);
        }
        Ok(Some(x))
    }
}

/// Deterministic coset representatives for `GF(p)^ambient_dim / span(subspace_basis)`:
/// the standard basis vectors at the non-pivot coordinates of the row-reduced subspace
/// basis, in index order. Together with the subspace they span the ambient space.
pub fn quotient_representatives(
    field: FieldSpec,
    ambient_dim: usize,
    subspace_basis: &[Vec<u32>],
) -> Vec<Vec<u32>> {
    let free = quotient_free_coordinates(field, ambient_dim, subspace_basis);
    free.into_iter()
        .map(|i| {
            let mut v = vec![0u32; ambient_dim];
            v[i] = 1;
            v
        })
        .collect()
}

fn quotient_free_coordinates(
    field: FieldSpec,
    ambient_dim: usize,
    subspace_basis: &[Vec<u32>],
) -> Vec<usize> {
    for v in subspace_basis {
        assert_eq!(v.len(), ambient_dim, "subspace vector has wrong length");
    }
    let m = Matrix::from_rows(field, subspace_basis);
    let m = if m.cols() == 0 && ambient_dim > 0 {
        Matrix::zero(field, subspace_basis.len().max(1), ambient_dim)
    } else {
        m
    };
    let (_, pivots) = m.rref();
    (0..ambient_dim).filter(|i| !pivots.contains(i)).collect()
}

/// The quotient `GF(p)^n / rowspan(relations)` as a pair (dimension, projection).
/// The projection matrix sends an ambient vector to its coordinates relative to the
/// non-pivot standard basis representatives (same convention as
/// [`quotient_representatives`]).
pub fn quotient_map(field: FieldSpec, n: usize, relations: &[Vec<u32>]) -> (usize, Matrix) {
    for v in relations {
        assert_eq!(v.len(), n, "relation vector has wrong length");
    }
    let rel = if relations.is_empty() {
        Matrix::zero(field, 1, n)
    } else {
        Matrix::from_rows(field, relations)
    };
    let (red, pivots) = rel.rref();
    let free: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
    let mut proj = Matrix::zero(field, free.len(), n);
    for (j, &q) in free.iter().enumerate() {
        proj.set(j, q, 1);
    }
    // e_{pivot i} = -sum_q red[i][q] e_q modulo the relations.
    for (i, &pc) in pivots.iter().enumerate() {
        for (j, &q) in free.iter().enumerate() {
            proj.set(j, pc, field.neg(red.at(i, q)));
        }
    }
    (free.len(), proj)
}

/// Embeds quotient coordinates back into the ambient space using the non-pivot
/// standard basis representatives. `quotient_map(..).1 * quotient_section(..) = id`.
pub fn quotient_section(field: FieldSpec, n: usize, relations: &[Vec<u32>]) -> Matrix {
    let reps = quotient_representatives(field, n, relations);
    Matrix::from_cols(field, n, &reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, field: FieldSpec, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zero(field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, rng.gen_range(0..field.modulus()));
            }
        }
        m
    }

    /// Independent rank oracle: the largest k with a nonzero k×k minor, determinants
    /// by Laplace expansion. Only usable on small matrices.
    fn rank_by_minors(m: &Matrix) -> usize {
        fn det(field: FieldSpec, m: &[Vec<u32>]) -> u32 {
            let n = m.len();
            if n == 0 {
                return 1;
            }
            let mut acc = 0u32;
            let mut sign_pos = true;
            for j in 0..n {
                let a = m[0][j];
                if a != 0 {
                    let sub: Vec<Vec<u32>> = m[1..]
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .filter(|&(c, _)| c != j)
                                .map(|(_, &x)| x)
                                .collect()
                        })
                        .collect();
                    let term = field.mul(a, det(field, &sub));
                    acc = if sign_pos { field.add(acc, term) } else { field.sub(acc, term) };
                }
                sign_pos = !sign_pos;
            }
            acc
        }
        fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in combinations(n - first - 1, k - 1) {
                    for x in rest.iter_mut() {
                        *x += first + 1;
                    }
                    let mut c = vec![first];
                    c.extend(rest);
                    out.push(c);
                }
            }
            out
        }
        let max_k = m.rows().min(m.cols());
        for k in (1..=max_k).rev() {
            for rows in combinations(m.rows(), k) {
                for cols in combinations(m.cols(), k) {
                    let minor: Vec<Vec<u32>> = rows
                        .iter()
                        .map(|&r| cols.iter().map(|&c| m.at(r, c)).collect())
                        .collect();
                    if det(m.field(), &minor) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn field_rejects_non_primes() {
        assert_eq!(FieldSpec::new(4), Err(LinalgError::NotPrime(4)));
        assert_eq!(FieldSpec::new(1), Err(LinalgError::NotPrime(1)));
        assert!(matches!(FieldSpec::new(1 << 17), Err(LinalgError::ModulusTooLarge(_))));
        assert!(FieldSpec::new(65521).is_ok()); // largest prime below 2^16
    }

    #[test]
    fn field_arithmetic_gf3() {
        let f = gf(3);
        assert_eq!(f.add(2, 2), 1);
        assert_eq!(f.sub(0, 1), 2);
        assert_eq!(f.inv(2), 2);
        assert_eq!(f.reduce(-4), 2);
    }

    #[test]
    fn rref_identity_is_fixed() {
        let id = Matrix::identity(gf(2), 2);
        let (r, pivots) = id.rref();
        assert_eq!(r, id);
        assert_eq!(pivots, vec![0, 1]);
    }

    #[test]
    fn rref_rank_one_gf2() {
        let m = Matrix::from_rows(gf(2), &[vec![1, 1], vec![1, 1]]);
        let (r, pivots) = m.rref();
        assert_eq!(r.to_row_vecs(), vec![vec![1, 1], vec![0, 0]]);
        assert_eq!(pivots, vec![0]);
    }

    #[test]
    fn rref_rank_matches_minor_oracle_gf3() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, gf(3), 5, 7);
            assert_eq!(m.rank(), rank_by_minors(&m));
        }
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(Matrix::identity(gf(5), 4).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_zero_is_full() {
        let z = Matrix::zero(gf(2), 3, 3);
        assert_eq!(z.kernel_basis().len(), 3);
    }

    #[test]
    fn kernel_of_sum_row_gf2() {
        let m = Matrix::from_rows(gf(2), &[vec![1, 1]]);
        assert_eq!(m.kernel_basis(), vec![vec![1, 1]]);
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let id = Matrix::identity(gf(7), 3);
        assert_eq!(id.solve(&[1, 2, 3]).unwrap(), Some(vec![1, 2, 3]));
        let z = Matrix::zero(gf(7), 2, 2);
        assert_eq!(z.solve(&[1, 0]).unwrap(), None);
        assert!(id.solve(&[1, 2]).is_err());
    }

    #[test]
    fn solve_random_consistent_systems_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [2u64, 3, 7] {
            let f = gf(p);
            for _ in 0..30 {
                let a = random_matrix(&mut rng, f, 4, 6);
                let x0: Vec<u32> = (0..6).map(|_| rng.gen_range(0..f.modulus())).collect();
                let b = a.apply(&x0);
                let x = a.solve(&b).unwrap().expect("consistent by construction");
                assert_eq!(a.apply(&x), b);
            }
        }
    }

    #[test]
    fn quotient_representatives_examples() {
        let f = gf(2);
        // Full subspace: nothing left.
        let full = vec![vec![1, 0], vec![0, 1]];
        assert!(quotient_representatives(f, 2, &full).is_empty());
        // Zero subspace: the whole standard basis.
        assert_eq!(
            quotient_representatives(f, 2, &[]),
            vec![vec![1, 0], vec![0, 1]]
        );
        // span{e0+e1} in GF(2)^2: pivot in column 0, so e1 represents the quotient.
        assert_eq!(
            quotient_representatives(f, 2, &[vec![1, 1]]),
            vec![vec![0, 1]]
        );
        // Deterministic on rerun.
        assert_eq!(
            quotient_representatives(f, 2, &[vec![1, 1]]),
            quotient_representatives(f, 2, &[vec![1, 1]])
        );
    }

    #[test]
    fn quotient_map_section_is_identity() {
        let f = gf(3);
        let rels = vec![vec![1, 2, 0, 1], vec![0, 0, 1, 2]];
        let (d, proj) = quotient_map(f, 4, &rels);
        assert_eq!(d, 2);
        let sec = quotient_section(f, 4, &rels);
        assert_eq!(proj.mul(&sec), Matrix::identity(f, 2));
        // Relations project to zero.
        for r in &rels {
            assert!(proj.apply(r).iter().all(|&x| x == 0));
        }
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let f = gf(p);
            let rows = rng.gen_range(0..5);
            let cols = rng.gen_range(0..5);
            let m = random_matrix(&mut rng, f, rows, cols);
            let (r1, piv1) = m.rref();
            let (r2, piv2) = r1.rref();
            prop_assert_eq!(&r1, &r2);
            prop_assert_eq!(piv1, piv2);
        }

        #[test]
        fn rank_nullity_holds(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let f = gf(p);
            let rows = rng.gen_range(1..6);
            let cols = rng.gen_range(1..6);
            let m = random_matrix(&mut rng, f, rows, cols);
            let kernel = m.kernel_basis();
            prop_assert_eq!(m.rank() + kernel.len(), m.cols());
            for v in &kernel {
                prop_assert!(m.apply(v).iter().all(|&x| x == 0));
            }
            // Kernel vectors are independent by construction: each has a 1 in a
            // coordinate where all others are 0.
            let km = Matrix::from_rows(f, &kernel);
            prop_assert_eq!(km.rank(), kernel.len());
        }
    }
}
