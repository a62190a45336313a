//! Exact linear algebra over GF(q): matrices, canonical subspaces, pairs of
//! maps f: V→W, g: W→V, their Fitting decomposition, orbit subspaces and the
//! balanced/unbalanced classification of vectors.
//!
//! Everything is dense and exact. Subspaces are kept in reduced row echelon
//! form so that subspace equality is structural equality; every complement
//! choice in the crate goes through [`Subspace::canonical_complement`] so
//! that "pick a complement" is one global deterministic function.

use std::fmt;

use thiserror::Error;

use crate::field::{Fel, Field};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("pair is not nilpotent")]
    NotNilpotent,
    #[error("subspace is not a complement of the embedded summand")]
    NotAComplement,
    #[error("entry index {index} out of range for GF({q})")]
    EntryOutOfRange { index: usize, q: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Dense matrix over GF(q), row-major. Zero-row and zero-column matrices are
/// legal and show up constantly (empty pairs, trivial Fitting parts).
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFq {
    rows: usize,
    cols: usize,
    entries: Vec<Fel>,
    field: Field,
}

impl MatrixFq {
    pub fn new(
        field: Field,
        rows: usize,
        cols: usize,
        entries: Vec<Fel>,
    ) -> Result<MatrixFq, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        let q = field.q();
        for e in &entries {
            if e.index() as u64 >= q {
                return Err(LinalgError::EntryOutOfRange {
                    index: e.index(),
                    q,
                });
            }
        }
        Ok(MatrixFq {
            rows,
            cols,
            entries,
            field,
        })
    }

    /// Convenience constructor from raw element indices, row-major.
    pub fn from_indices(
        field: &Field,
        rows: usize,
        cols: usize,
        indices: &[u64],
    ) -> Result<MatrixFq, LinalgError> {
        let entries = indices
            .iter()
            .map(|&i| {
                field
                    .fel(i)
                    .map_err(|_| LinalgError::EntryOutOfRange {
                        index: i as usize,
                        q: field.q(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        MatrixFq::new(field.clone(), rows, cols, entries)
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Fel,
    ) -> MatrixFq {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        MatrixFq {
            rows,
            cols,
            entries,
            field,
        }
    }

    pub fn zero(field: Field, rows: usize, cols: usize) -> MatrixFq {
        MatrixFq {
            rows,
            cols,
            entries: vec![Fel::ZERO; rows * cols],
            field,
        }
    }

    pub fn identity(field: Field, n: usize) -> MatrixFq {
        MatrixFq::from_fn(field, n, n, |i, j| if i == j { Fel::ONE } else { Fel::ZERO })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Fel>]) -> MatrixFq {
        for c in columns {
            assert_eq!(c.len(), rows, "column length must equal row count");
        }
        MatrixFq::from_fn(field, rows, columns.len(), |i, j| columns[j][i])
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<Fel>]) -> MatrixFq {
        for r in rows {
            assert_eq!(r.len(), cols, "row length must equal column count");
        }
        MatrixFq::from_fn(field, rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> Fel {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fel) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fel] {
        assert!(i < self.rows, "row out of range");
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Fel> {
        assert!(j < self.cols, "column out of range");
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[Fel] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == Fel::ZERO)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> MatrixFq {
        MatrixFq::from_fn(self.field.clone(), self.cols, self.rows, |i, j| {
            self.get(j, i)
        })
    }

    /// Exact product. Inner dimension 0 yields the zero matrix.
    pub fn mul(&self, rhs: &MatrixFq) -> Result<MatrixFq, LinalgError> {
        if self.field != rhs.field {
            return Err(LinalgError::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = MatrixFq::zero(self.field.clone(), self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Fel::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, rhs.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    /// Applies the matrix to a column vector of length `cols`.
    ///
    /// Panics on length mismatch: vector shapes are structural invariants
    /// here, not user input.
    pub fn apply(&self, v: &[Fel]) -> Vec<Fel> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        let f = &self.field;
        let mut out = vec![Fel::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = Fel::ZERO;
            for j in 0..self.cols {
                acc = f.add(acc, f.mul(self.get(i, j), v[j]));
            }
            out[i] = acc;
        }
        out
    }

    pub fn pow(&self, e: usize) -> Result<MatrixFq, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut acc = MatrixFq::identity(self.field.clone(), self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// A^d = 0 with d the matrix size, by successive multiplication with an
    /// early exit once a power vanishes.
    pub fn is_nilpotent(&self) -> Result<bool, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut acc = MatrixFq::identity(self.field.clone(), self.rows);
        for _ in 0..self.rows {
            acc = acc.mul(self)?;
            if acc.is_zero() {
                return Ok(true);
            }
        }
        Ok(acc.is_zero())
    }

    /// Canonical reduced row echelon form and rank. RREF is unique, so equal
    /// row spaces produce identical outputs.
    pub fn rref(&self) -> (MatrixFq, usize) {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivot_row = 0usize;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(src) = (pivot_row..m.rows).find(|&i| m.get(i, col) != Fel::ZERO) else {
                continue;
            };
            if src != pivot_row {
                for j in 0..m.cols {
                    let (a, b) = (m.get(src, j), m.get(pivot_row, j));
                    m.set(src, j, b);
                    m.set(pivot_row, j, a);
                }
            }
            let scale = f.inv(m.get(pivot_row, col)).expect("pivot is nonzero");
            for j in 0..m.cols {
                m.set(pivot_row, j, f.mul(scale, m.get(pivot_row, j)));
            }
            for i in 0..m.rows {
                if i == pivot_row {
                    continue;
                }
                let factor = m.get(i, col);
                if factor == Fel::ZERO {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(pivot_row, j)));
                    m.set(i, j, v);
                }
            }
            pivot_row += 1;
        }
        (m, pivot_row)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<MatrixFq> {
        assert!(self.is_square(), "inverse requires a square matrix");
        let n = self.rows;
        let aug = MatrixFq::from_fn(self.field.clone(), n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                Fel::ONE
            } else {
                Fel::ZERO
            }
        });
        let (r, _) = aug.rref();
        // [A | I] reduces to [I | A⁻¹] exactly when A is invertible; the
        // augmented rank alone is always n, so inspect the left block.
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { Fel::ONE } else { Fel::ZERO };
                if r.get(i, j) != want {
                    return None;
                }
            }
        }
        Some(MatrixFq::from_fn(self.field.clone(), n, n, |i, j| {
            r.get(i, j + n)
        }))
    }

    /// One solution of A·x = b, or `None` when inconsistent. Free variables
    /// are set to zero, so the answer is deterministic.
    pub fn solve(&self, b: &[Fel]) -> Option<Vec<Fel>> {
        assert_eq!(b.len(), self.rows, "rhs length must equal row count");
        let aug = MatrixFq::from_fn(self.field.clone(), self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                b[i]
            }
        });
        let (r, rank) = aug.rref();
        let mut x = vec![Fel::ZERO; self.cols];
        for i in 0..rank {
            let pivot = (0..=self.cols).find(|&j| r.get(i, j) != Fel::ZERO).unwrap();
            if pivot == self.cols {
                return None; // row (0 … 0 | 1): inconsistent
            }
            x[pivot] = r.get(i, self.cols);
        }
        Some(x)
    }
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} over {} [", self.rows, self.cols, self.field.describe())?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", vec_string(self.row(i)))?;
        }
        write!(f, "]")
    }
}

/// Space-separated element indices; the one vector format used everywhere
/// (reports, CLI files, error messages).
pub fn vec_string(v: &[Fel]) -> String {
    v.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn vec_is_zero(v: &[Fel]) -> bool {
    v.iter().all(|&e| e == Fel::ZERO)
}

/// All vectors of GF(q)^d in lexicographic order (first entry most
/// significant), starting at zero.
pub fn enumerate_vectors(field: &Field, d: usize) -> impl Iterator<Item = Vec<Fel>> {
    let q = field.q();
    let total = q
        .checked_pow(d as u32)
        .expect("vector space too large to enumerate");
    (0..total).map(move |i| decode_vector(i, q, d))
}

fn decode_vector(mut i: u64, q: u64, d: usize) -> Vec<Fel> {
    let mut v = vec![Fel::ZERO; d];
    for slot in v.iter_mut().rev() {
        *slot = Fel::from_raw((i % q) as u8);
        i /= q;
    }
    v
}

/// All rows×cols matrices in lexicographic order on the row-major entry
/// vector. The enumeration order is part of the CLI/report contract.
pub fn enumerate_matrices(
    field: &Field,
    rows: usize,
    cols: usize,
) -> impl Iterator<Item = MatrixFq> {
    let f = field.clone();
    enumerate_vectors(field, rows * cols)
        .map(move |entries| MatrixFq::new(f.clone(), rows, cols, entries).unwrap())
}

/// All q^(2mn) pairs filtered down to the nilpotent ones, in lexicographic
/// (f outer, g inner) order. Exhaustive-sweep scale only.
pub fn enumerate_nilpotent_pairs(field: &Field, m: usize, n: usize) -> Vec<LinearPair> {
    let mut out = Vec::new();
    for f in enumerate_matrices(field, n, m) {
        for g in enumerate_matrices(field, m, n) {
            let p = LinearPair::new(f.clone(), g).unwrap();
            if p.is_nilpotent() {
                out.push(p);
            }
        }
    }
    out
}

/// A subspace of GF(q)^ambient, stored as its unique RREF basis. Structural
/// equality is subspace equality.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: MatrixFq, // dim × ambient, canonical RREF, no zero rows
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Subspace {
        Subspace {
            basis: MatrixFq::zero(field, 0, ambient),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        Subspace {
            basis: MatrixFq::identity(field, ambient),
        }
    }

    /// Span of the given vectors.
    pub fn from_rows(field: &Field, ambient: usize, rows: &[Vec<Fel>]) -> Subspace {
        let m = MatrixFq::from_rows(field.clone(), ambient, rows);
        Subspace::from_row_span(&m)
    }

    /// Row space of a matrix.
    pub fn from_row_span(m: &MatrixFq) -> Subspace {
        let (r, rank) = m.rref();
        let basis = MatrixFq::from_fn(m.field().clone(), rank, m.cols(), |i, j| r.get(i, j));
        Subspace { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn basis(&self) -> &MatrixFq {
        &self.basis
    }

    pub fn basis_rows(&self) -> impl Iterator<Item = &[Fel]> {
        (0..self.dim()).map(|i| self.basis.row(i))
    }

    /// Pivot column of each basis row, strictly increasing.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                (0..self.ambient())
                    .find(|&j| self.basis.get(i, j) != Fel::ZERO)
                    .expect("RREF basis has no zero rows")
            })
            .collect()
    }

    pub fn contains(&self, v: &[Fel]) -> bool {
        self.reduce(v).iter().all(|&e| e == Fel::ZERO)
    }

    /// Remainder of v after subtracting its projection onto the row space;
    /// zero iff contained.
    fn reduce(&self, v: &[Fel]) -> Vec<Fel> {
        assert_eq!(v.len(), self.ambient());
        let f = self.field().clone();
        let mut r = v.to_vec();
        for (i, &p) in self.pivots().iter().enumerate() {
            let c = r[p];
            if c == Fel::ZERO {
                continue;
            }
            for j in 0..self.ambient() {
                r[j] = f.sub(r[j], f.mul(c, self.basis.get(i, j)));
            }
        }
        r
    }

    /// Coordinates of v over the RREF basis rows, or `None` if v is outside.
    /// With an RREF basis the candidate coordinates are just the entries of
    /// v at the pivot columns.
    pub fn express(&self, v: &[Fel]) -> Option<Vec<Fel>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots().iter().map(|&p| v[p]).collect())
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient(), other.ambient(), "ambient mismatch");
        let rows: Vec<Vec<Fel>> = self
            .basis_rows()
            .chain(other.basis_rows())
            .map(|r| r.to_vec())
            .collect();
        Subspace::from_rows(self.field(), self.ambient(), &rows)
    }

    pub fn intersection_dim(&self, other: &Subspace) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }

    /// The fixed global complement choice: span of the standard basis
    /// vectors at the non-pivot columns of the RREF basis. Deterministic and
    /// always a true complement.
    pub fn canonical_complement(&self) -> Subspace {
        let pivots = self.pivots();
        let field = self.field().clone();
        let free: Vec<usize> = (0..self.ambient()).filter(|j| !pivots.contains(j)).collect();
        let basis = MatrixFq::from_fn(field, free.len(), self.ambient(), |i, j| {
            if free[i] == j {
                Fel::ONE
            } else {
                Fel::ZERO
            }
        });
        // Distinct standard basis vectors sorted by position are already RREF.
        Subspace { basis }
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} of GF({})^{}: {:?})",
            self.dim(),
            self.field().q(),
            self.ambient(),
            self.basis
        )
    }
}

/// Column span of a matrix: the image of the map it represents.
pub fn image(a: &MatrixFq) -> Subspace {
    Subspace::from_row_span(&a.transpose())
}

/// Null space of a matrix, ambient = cols.
pub fn kernel(a: &MatrixFq) -> Subspace {
    let (r, rank) = a.rref();
    let field = a.field().clone();
    let cols = a.cols();
    let mut pivots = Vec::with_capacity(rank);
    for i in 0..rank {
        pivots.push((0..cols).find(|&j| r.get(i, j) != Fel::ZERO).unwrap());
    }
    let mut rows: Vec<Vec<Fel>> = Vec::new();
    for free in (0..cols).filter(|j| !pivots.contains(j)) {
        let mut v = vec![Fel::ZERO; cols];
        v[free] = Fel::ONE;
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = field.neg(r.get(i, free));
        }
        rows.push(v);
    }
    Subspace::from_rows(&field, cols, &rows)
}

/// Writes v = x + y with x in `a` and y in `b`, for complementary subspaces
/// (a ⊕ b = ambient). Returns `None` when the pair does not split v.
pub fn split_along(v: &[Fel], a: &Subspace, b: &Subspace) -> Option<(Vec<Fel>, Vec<Fel>)> {
    assert_eq!(a.ambient(), b.ambient(), "ambient mismatch");
    assert_eq!(v.len(), a.ambient());
    let field = a.field().clone();
    let cols: Vec<Vec<Fel>> = a
        .basis_rows()
        .chain(b.basis_rows())
        .map(|r| r.to_vec())
        .collect();
    let m = MatrixFq::from_columns(field.clone(), v.len(), &cols);
    let c = m.solve(v)?;
    let mut x = vec![Fel::ZERO; v.len()];
    let mut y = vec![Fel::ZERO; v.len()];
    for (idx, coeff) in c.iter().enumerate() {
        let row = &cols[idx];
        let target = if idx < a.dim() { &mut x } else { &mut y };
        for j in 0..v.len() {
            target[j] = field.add(target[j], field.mul(*coeff, row[j]));
        }
    }
    Some((x, y))
}

/// The unique matrix sending basis[i] to images[i]. The basis vectors must
/// span the domain.
pub fn map_from_basis_images(
    field: &Field,
    domain_dim: usize,
    target_dim: usize,
    basis: &[Vec<Fel>],
    images: &[Vec<Fel>],
) -> Result<MatrixFq, LinalgError> {
    if basis.len() != domain_dim || images.len() != domain_dim {
        return Err(LinalgError::ShapeMismatch(format!(
            "need {} basis/image vectors, got {}/{}",
            domain_dim,
            basis.len(),
            images.len()
        )));
    }
    let b = MatrixFq::from_columns(field.clone(), domain_dim, basis);
    let u = MatrixFq::from_columns(field.clone(), target_dim, images);
    let binv = b
        .inverse()
        .ok_or_else(|| LinalgError::Internal("basis vectors are dependent".into()))?;
    u.mul(&binv)
}

/// Graph subspace {(v, h·v)} of V ⊕ W for h: V → W given as an n×m matrix.
pub fn hom_to_complement(h: &MatrixFq) -> Subspace {
    let (n, m) = (h.rows(), h.cols());
    let basis = MatrixFq::from_fn(h.field().clone(), m, m + n, |i, j| {
        if j < m {
            if i == j {
                Fel::ONE
            } else {
                Fel::ZERO
            }
        } else {
            h.get(j - m, i)
        }
    });
    // [I | C] is already canonical RREF.
    Subspace { basis }
}

/// Inverse of [`hom_to_complement`]: a subspace of V ⊕ W is the graph of a
/// map V → W exactly when its RREF basis is [I | C].
pub fn complement_to_hom(s: &Subspace, m: usize) -> Result<MatrixFq, LinalgError> {
    let ambient = s.ambient();
    assert!(m <= ambient, "V dimension exceeds ambient");
    let n = ambient - m;
    if s.dim() != m || s.pivots() != (0..m).collect::<Vec<_>>() {
        return Err(LinalgError::NotAComplement);
    }
    Ok(MatrixFq::from_fn(s.field().clone(), n, m, |i, j| {
        s.basis().get(j, m + i)
    }))
}

/// A pair of linear maps f: V → W, g: W → V with dim V = m, dim W = n,
/// carried by F (n×m) and G (m×n).
#[derive(Clone, PartialEq, Eq)]
pub struct LinearPair {
    f: MatrixFq,
    g: MatrixFq,
}

impl LinearPair {
    pub fn new(f: MatrixFq, g: MatrixFq) -> Result<LinearPair, LinalgError> {
        if f.field() != g.field() {
            return Err(LinalgError::FieldMismatch);
        }
        if f.rows() != g.cols() || f.cols() != g.rows() {
            return Err(LinalgError::ShapeMismatch(format!(
                "f is {}x{} so g must be {}x{}, got {}x{}",
                f.rows(),
                f.cols(),
                f.cols(),
                f.rows(),
                g.rows(),
                g.cols()
            )));
        }
        Ok(LinearPair { f, g })
    }

    pub fn m(&self) -> usize {
        self.f.cols()
    }

    pub fn n(&self) -> usize {
        self.f.rows()
    }

    pub fn field(&self) -> &Field {
        self.f.field()
    }

    pub fn f(&self) -> &MatrixFq {
        &self.f
    }

    pub fn g(&self) -> &MatrixFq {
        &self.g
    }

    /// T = g∘f on V (m×m).
    pub fn t(&self) -> MatrixFq {
        self.g.mul(&self.f).unwrap()
    }

    /// T′ = f∘g on W (n×n).
    pub fn t_prime(&self) -> MatrixFq {
        self.f.mul(&self.g).unwrap()
    }

    /// Nilpotency of T; equivalent to nilpotency of T′ (tested exhaustively).
    pub fn is_nilpotent(&self) -> bool {
        self.t().is_nilpotent().unwrap()
    }

    pub fn apply_f(&self, v: &[Fel]) -> Vec<Fel> {
        self.f.apply(v)
    }

    pub fn apply_g(&self, w: &[Fel]) -> Vec<Fel> {
        self.g.apply(w)
    }

    /// The mirror pair with the roles of V and W exchanged.
    pub fn swap(&self) -> LinearPair {
        LinearPair {
            f: self.g.clone(),
            g: self.f.clone(),
        }
    }
}

impl fmt::Debug for LinearPair {
    fn fmt(&self, fmt: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fmt, "LinearPair(f: {:?}, g: {:?})", self.f, self.g)
    }
}

/// Which side of the pair a vector lives on. V-side statements about (v, T,
/// f) mirror to W-side statements about (w, T′, g); one code path serves
/// both.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    V,
    W,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::V => Side::W,
            Side::W => Side::V,
        }
    }
}

/// The eventual image/kernel split of both spaces.
#[derive(Clone, Debug)]
pub struct FittingData {
    pub v_inv: Subspace,
    pub v_nil: Subspace,
    pub w_inv: Subspace,
    pub w_nil: Subspace,
}

/// V_I = im(T^m), V_N = ker(T^m), W_I = im(T′^n), W_N = ker(T′^n); the
/// chains stabilize by the ambient dimension, so one power suffices.
pub fn fitting_decompose(p: &LinearPair) -> FittingData {
    let (m, n) = (p.m(), p.n());
    let tm = p.t().pow(m).unwrap();
    let tn = p.t_prime().pow(n).unwrap();
    let data = FittingData {
        v_inv: image(&tm),
        v_nil: kernel(&tm),
        w_inv: image(&tn),
        w_nil: kernel(&tn),
    };
    debug_assert_eq!(data.v_inv.dim() + data.v_nil.dim(), m);
    debug_assert_eq!(data.w_inv.dim() + data.w_nil.dim(), n);
    debug_assert_eq!(data.v_inv.intersection_dim(&data.v_nil), 0);
    debug_assert_eq!(data.w_inv.intersection_dim(&data.w_nil), 0);
    debug_assert_eq!(data.v_inv.dim(), data.w_inv.dim());
    data
}

/// Ordered basis [v, Tv, …, T^{a−1}v] of the orbit subspace of v (under T on
/// side V, under T′ on side W). Empty for v = 0. Nilpotency makes the list
/// finite and linearly independent.
pub fn orbit_basis(
    pair: &LinearPair,
    v: &[Fel],
    side: Side,
) -> Result<Vec<Vec<Fel>>, LinalgError> {
    if !pair.is_nilpotent() {
        return Err(LinalgError::NotNilpotent);
    }
    let t = match side {
        Side::V => pair.t(),
        Side::W => pair.t_prime(),
    };
    assert_eq!(v.len(), t.rows(), "vector length must match the side");
    let mut basis = Vec::new();
    let mut cur = v.to_vec();
    while !vec_is_zero(&cur) {
        basis.push(cur.clone());
        cur = t.apply(&cur);
        debug_assert!(basis.len() <= t.rows(), "orbit exceeds dimension");
    }
    debug_assert_eq!(
        Subspace::from_rows(pair.field(), v.len(), &basis).dim(),
        basis.len(),
        "orbit iterates of a nilpotent pair are independent"
    );
    Ok(basis)
}

/// The orbit subspace T[v] (side V) or T′[w] (side W) as a canonical
/// subspace.
pub fn orbit_subspace(pair: &LinearPair, v: &[Fel], side: Side) -> Result<Subspace, LinalgError> {
    let basis = orbit_basis(pair, v, side)?;
    Ok(Subspace::from_rows(pair.field(), v.len(), &basis))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BalanceTag {
    Balanced,
    Unbalanced,
}

/// Orbit data of a vector: a = dim T[v], ell = dim T′[fv] (side V; mirrored
/// on side W). For a nilpotent pair only a = ell (balanced) and ell = a − 1
/// (unbalanced) can occur; anything else is reported as `Internal`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Balancedness {
    pub tag: BalanceTag,
    pub a: usize,
    pub ell: usize,
}

impl Balancedness {
    pub fn is_balanced(&self) -> bool {
        self.tag == BalanceTag::Balanced
    }

    /// The common orbit length for balanced vectors (a = ell).
    pub fn length(&self) -> usize {
        self.a
    }
}

pub fn classify_vector(
    pair: &LinearPair,
    v: &[Fel],
    side: Side,
) -> Result<Balancedness, LinalgError> {
    let a = orbit_basis(pair, v, side)?.len();
    let img = match side {
        Side::V => pair.apply_f(v),
        Side::W => pair.apply_g(v),
    };
    let ell = orbit_basis(pair, &img, side.flip())?.len();
    let tag = if a == ell {
        BalanceTag::Balanced
    } else if ell + 1 == a {
        BalanceTag::Unbalanced
    } else {
        return Err(LinalgError::Internal(format!(
            "orbit lengths a={a}, ell={ell} violate the balance dichotomy"
        )));
    };
    Ok(Balancedness { tag, a, ell })
}

/// The four indecomposable types: balanced generators give dimension pairs
/// (ℓ, ℓ); unbalanced generators give (ℓ, ℓ−1) from the V side and (ℓ−1, ℓ)
/// from the W side.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum SummandKind {
    BalancedV,
    BalancedW,
    UnbalancedV,
    UnbalancedW,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Summand {
    pub kind: SummandKind,
    pub length: usize,
}

impl Summand {
    /// (dim V, dim W) of the summand.
    pub fn dims(&self) -> (usize, usize) {
        let l = self.length;
        match self.kind {
            SummandKind::BalancedV | SummandKind::BalancedW => (l, l),
            SummandKind::UnbalancedV => (l, l - 1),
            SummandKind::UnbalancedW => (l - 1, l),
        }
    }
}

/// Splits a nilpotent pair into indecomposable summands, sorted. Greedy:
/// repeatedly take a vector of maximal orbit length (V side wins ties, then
/// lexicographically least vector), split off the sub-pair spanned by its
/// orbit and the orbit of its image, and recurse on the quotient pair
/// carried by the canonical complements.
///
/// Enumerates q^m + q^n vectors per split, so desk-scale dimensions only.
pub fn decompose_indecomposables(pair: &LinearPair) -> Result<Vec<Summand>, LinalgError> {
    if !pair.is_nilpotent() {
        return Err(LinalgError::NotNilpotent);
    }
    let mut out = Vec::new();
    let mut cur = pair.clone();
    loop {
        let (m, n) = (cur.m(), cur.n());
        if m == 0 && n == 0 {
            break;
        }
        let best_on = |side: Side| -> Option<(usize, Vec<Fel>)> {
            let d = match side {
                Side::V => m,
                Side::W => n,
            };
            let mut best: Option<(usize, Vec<Fel>)> = None;
            for v in enumerate_vectors(cur.field(), d) {
                // The sub-pair generated by v has total dimension a + ell;
                // that is the quantity a maximal string generator maximizes
                // (orbit length alone cannot tell a dims-(1,1) generator
                // from a dims-(1,0) one).
                let c = classify_vector(&cur, &v, side).unwrap();
                let score = c.a + c.ell;
                if best.as_ref().is_none_or(|(bs, _)| score > *bs) {
                    best = Some((score, v));
                }
            }
            best
        };
        // max score over both sides; V first so ties go to V; the vector
        // enumeration is lexicographic so the first maximum is the least.
        let (side, gen) = match (best_on(Side::V), best_on(Side::W)) {
            (Some((av, v)), Some((aw, w))) => {
                if av >= aw {
                    (Side::V, v)
                } else {
                    (Side::W, w)
                }
            }
            (Some((_, v)), None) => (Side::V, v),
            (None, Some((_, w))) => (Side::W, w),
            (None, None) => unreachable!("handled by the m = n = 0 exit"),
        };
        let cls = classify_vector(&cur, &gen, side)?;
        debug_assert!(cls.a >= 1, "a zero-length maximum implies m = n = 0");
        let kind = match (side, cls.tag) {
            (Side::V, BalanceTag::Balanced) => SummandKind::BalancedV,
            (Side::V, BalanceTag::Unbalanced) => SummandKind::UnbalancedV,
            (Side::W, BalanceTag::Balanced) => SummandKind::BalancedW,
            (Side::W, BalanceTag::Unbalanced) => SummandKind::UnbalancedW,
        };
        out.push(Summand {
            kind,
            length: cls.a,
        });
        // Orbit of the generator plus orbit of its image span an invariant
        // sub-pair; recurse on the quotient, carried by the canonical
        // complements with the projected maps.
        let img = match side {
            Side::V => cur.apply_f(&gen),
            Side::W => cur.apply_g(&gen),
        };
        let (u_v, u_w) = match side {
            Side::V => (
                orbit_subspace(&cur, &gen, Side::V)?,
                orbit_subspace(&cur, &img, Side::W)?,
            ),
            Side::W => (
                orbit_subspace(&cur, &img, Side::V)?,
                orbit_subspace(&cur, &gen, Side::W)?,
            ),
        };
        let c_v = u_v.canonical_complement();
        let c_w = u_w.canonical_complement();
        let project = |mat: &MatrixFq, from: &Subspace, onto: &Subspace, along: &Subspace| {
            // Quotient map in complement coordinates: basis vector ↦
            // coordinates of the along-projection of its image.
            let cols: Vec<Vec<Fel>> = from
                .basis_rows()
                .map(|b| {
                    let y = mat.apply(b);
                    let (_, y_c) = split_along(&y, along, onto)
                        .expect("complement pairs split the whole space");
                    onto.express(&y_c).expect("projection lands in the target")
                })
                .collect();
            MatrixFq::from_columns(mat.field().clone(), onto.dim(), &cols)
        };
        let f_new = project(cur.f(), &c_v, &c_w, &u_w);
        let g_new = project(cur.g(), &c_w, &c_v, &u_v);
        cur = LinearPair::new(f_new, g_new)?;
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u64) -> Field {
        Field::gf(q).unwrap()
    }

    fn mat(field: &Field, rows: usize, cols: usize, idx: &[u64]) -> MatrixFq {
        MatrixFq::from_indices(field, rows, cols, idx).unwrap()
    }

    #[test]
    fn mul_examples() {
        let g2 = gf(2);
        let a = mat(&g2, 2, 2, &[1, 1, 0, 1]);
        let b = mat(&g2, 2, 2, &[1, 0, 1, 1]);
        assert_eq!(a.mul(&b).unwrap(), mat(&g2, 2, 2, &[0, 1, 1, 1]));
        let id = MatrixFq::identity(g2.clone(), 2);
        assert_eq!(id.mul(&a).unwrap(), a);
        // 2×0 times 0×3 is the 2×3 zero matrix (empty sums).
        let left = MatrixFq::zero(g2.clone(), 2, 0);
        let right = MatrixFq::zero(g2.clone(), 0, 3);
        assert_eq!(left.mul(&right).unwrap(), MatrixFq::zero(g2.clone(), 2, 3));
        assert!(matches!(
            a.mul(&right).unwrap_err(),
            LinalgError::ShapeMismatch(_)
        ));
        let g3 = gf(3);
        assert_eq!(
            a.mul(&MatrixFq::identity(g3, 2)).unwrap_err(),
            LinalgError::FieldMismatch
        );
    }

    #[test]
    fn rref_examples() {
        let g3 = gf(3);
        assert_eq!(MatrixFq::zero(g3.clone(), 3, 3).rank(), 0);
        assert_eq!(MatrixFq::identity(g3.clone(), 3).rank(), 3);
        // Singular over GF(3): second row is twice the first.
        let a = mat(&g3, 2, 2, &[1, 2, 2, 1]);
        let (r, rank) = a.rref();
        assert_eq!(rank, 1);
        assert_eq!(r, mat(&g3, 2, 2, &[1, 2, 0, 0]));
        // Cross-check by brute force: the rows of a span exactly 3 vectors.
        let span: std::collections::HashSet<Vec<Fel>> = enumerate_vectors(&g3, 2)
            .filter(|v| {
                // v in rowspace iff v is a combination c0*row0 + c1*row1
                g3.elements().any(|c0| {
                    g3.elements().any(|c1| {
                        (0..2).all(|j| {
                            g3.add(g3.mul(c0, a.get(0, j)), g3.mul(c1, a.get(1, j))) == v[j]
                        })
                    })
                })
            })
            .collect();
        assert_eq!(span.len(), 3); // q^rank = 3^1
    }

    #[test]
    fn rref_is_canonical_for_equal_row_spaces() {
        let g2 = gf(2);
        // Same row space, different presentations.
        let a = mat(&g2, 2, 3, &[1, 1, 0, 0, 1, 1]);
        let b = mat(&g2, 3, 3, &[1, 0, 1, 0, 1, 1, 1, 1, 0]);
        let sa = Subspace::from_row_span(&a);
        let sb = Subspace::from_row_span(&b);
        assert_eq!(sa, sb);
    }

    #[test]
    fn nilpotency_examples() {
        let g2 = gf(2);
        assert!(MatrixFq::zero(g2.clone(), 3, 3).is_nilpotent().unwrap());
        assert!(!MatrixFq::identity(g2.clone(), 2).is_nilpotent().unwrap());
        let strict_lower = mat(&g2, 3, 3, &[0, 0, 0, 1, 0, 0, 1, 1, 0]);
        assert!(strict_lower.is_nilpotent().unwrap());
        assert!(matches!(
            MatrixFq::zero(g2, 2, 3).is_nilpotent().unwrap_err(),
            LinalgError::NotSquare { rows: 2, cols: 3 }
        ));
    }

    #[test]
    fn pair_nilpotency_examples() {
        let g2 = gf(2);
        // F = 0, G arbitrary.
        let p = LinearPair::new(MatrixFq::zero(g2.clone(), 2, 2), mat(&g2, 2, 2, &[1, 1, 0, 1]))
            .unwrap();
        assert!(p.is_nilpotent());
        // F = G = I.
        let id = MatrixFq::identity(g2.clone(), 2);
        assert!(!LinearPair::new(id.clone(), id).unwrap().is_nilpotent());
        // m=1, n=2: F = (1,0)^T, G = (0,1): gf = 0.
        let p = LinearPair::new(mat(&g2, 2, 1, &[1, 0]), mat(&g2, 1, 2, &[0, 1])).unwrap();
        assert!(p.is_nilpotent());
        assert_eq!(p.m(), 1);
        assert_eq!(p.n(), 2);
    }

    /// gf nilpotent iff fg nilpotent, exhaustively at m,n ≤ 2 for q = 2, 3.
    #[test]
    fn nilpotency_of_t_and_t_prime_agree() {
        for q in [2u64, 3] {
            let field = gf(q);
            for m in 0..=2usize {
                for n in 0..=2usize {
                    if q.pow((2 * m * n) as u32) > 1 << 14 {
                        continue;
                    }
                    for f in enumerate_matrices(&field, n, m) {
                        for g in enumerate_matrices(&field, m, n) {
                            let p = LinearPair::new(f.clone(), g).unwrap();
                            assert_eq!(
                                p.t().is_nilpotent().unwrap(),
                                p.t_prime().is_nilpotent().unwrap()
                            );
                        }
                    }
                }
            }
        }
    }

    /// gf and fg both invertible iff F and G both invertible (m = n).
    #[test]
    fn invertible_pair_iff_both_factors_invertible() {
        for q in [2u64, 3] {
            let field = gf(q);
            for m in 0..=2usize {
                if q.pow((2 * m * m) as u32) > 1 << 14 {
                    continue;
                }
                for f in enumerate_matrices(&field, m, m) {
                    for g in enumerate_matrices(&field, m, m) {
                        let both_maps = f.inverse().is_some() && g.inverse().is_some();
                        let p = LinearPair::new(f.clone(), g).unwrap();
                        let both_comps =
                            p.t().inverse().is_some() && p.t_prime().inverse().is_some();
                        assert_eq!(both_maps, both_comps);
                    }
                }
            }
        }
    }

    #[test]
    fn fitting_examples() {
        let g2 = gf(2);
        // Nilpotent pair: everything is eventual kernel.
        let p = LinearPair::new(mat(&g2, 1, 2, &[1, 0]), mat(&g2, 2, 1, &[0, 1])).unwrap();
        assert!(p.is_nilpotent());
        let fd = fitting_decompose(&p);
        assert_eq!(fd.v_inv.dim(), 0);
        assert_eq!(fd.v_nil.dim(), 2);
        assert_eq!(fd.w_inv.dim(), 0);
        assert_eq!(fd.w_nil.dim(), 1);
        // Invertible pair: everything is eventual image.
        let id = MatrixFq::identity(g2.clone(), 2);
        let fd = fitting_decompose(&LinearPair::new(id.clone(), id).unwrap());
        assert_eq!(fd.v_inv.dim(), 2);
        assert_eq!(fd.v_nil.dim(), 0);
        // Mixed block-diagonal: invertible 1×1 part plus nilpotent 1×1 part.
        let f = mat(&g2, 2, 2, &[1, 0, 0, 0]);
        let g = mat(&g2, 2, 2, &[1, 0, 0, 0]);
        let fd = fitting_decompose(&LinearPair::new(f, g).unwrap());
        assert_eq!(
            (fd.v_inv.dim(), fd.v_nil.dim(), fd.w_inv.dim(), fd.w_nil.dim()),
            (1, 1, 1, 1)
        );
    }

    /// f maps V_I into W_I and V_N into W_N (block structure of the split).
    #[test]
    fn fitting_blocks_are_invariant() {
        let g2 = gf(2);
        for f in enumerate_matrices(&g2, 2, 2) {
            for g in enumerate_matrices(&g2, 2, 2) {
                let p = LinearPair::new(f.clone(), g).unwrap();
                let fd = fitting_decompose(&p);
                for b in fd.v_inv.basis_rows() {
                    assert!(fd.w_inv.contains(&p.apply_f(b)));
                }
                for b in fd.v_nil.basis_rows() {
                    assert!(fd.w_nil.contains(&p.apply_f(b)));
                }
                // T restricted to V_I is invertible: image has full dim.
                let t = p.t();
                let imgs: Vec<Vec<Fel>> = fd.v_inv.basis_rows().map(|b| t.apply(b)).collect();
                assert_eq!(
                    Subspace::from_rows(&g2, p.m(), &imgs).dim(),
                    fd.v_inv.dim()
                );
            }
        }
    }

    #[test]
    fn canonical_complement_examples() {
        let g2 = gf(2);
        let zero = Subspace::zero(g2.clone(), 3);
        assert_eq!(zero.canonical_complement(), Subspace::full(g2.clone(), 3));
        let full = Subspace::full(g2.clone(), 3);
        assert_eq!(full.canonical_complement(), Subspace::zero(g2.clone(), 3));
        // span{e1+e2} in GF(2)^2: pivot at column 0, complement span{e2}.
        let s = Subspace::from_rows(&g2, 2, &[vec![Fel::ONE, Fel::ONE]]);
        let c = s.canonical_complement();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&[Fel::ZERO, Fel::ONE]));
    }

    /// Complement really complements: direct sum with the original.
    #[test]
    fn canonical_complement_is_a_complement() {
        let g3 = gf(3);
        for m in enumerate_matrices(&g3, 2, 3) {
            let s = Subspace::from_row_span(&m);
            let c = s.canonical_complement();
            assert_eq!(s.dim() + c.dim(), 3);
            assert_eq!(s.intersection_dim(&c), 0);
        }
    }

    #[test]
    fn hom_complement_examples() {
        let g2 = gf(2);
        // h = 0 gives the embedded V.
        let s = hom_to_complement(&MatrixFq::zero(g2.clone(), 2, 2));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[Fel::ONE, Fel::ZERO, Fel::ZERO, Fel::ZERO]));
        // m=n=1, h=(1): graph span{(1,1)}.
        let s = hom_to_complement(&mat(&g2, 1, 1, &[1]));
        assert!(s.contains(&[Fel::ONE, Fel::ONE]));
        // Embedded W is not a complement.
        let w = Subspace::from_rows(&g2, 2, &[vec![Fel::ZERO, Fel::ONE]]);
        assert_eq!(complement_to_hom(&w, 1).unwrap_err(), LinalgError::NotAComplement);
    }

    /// hom_to_complement and complement_to_hom are mutually inverse, and
    /// every complement of the embedded W arises: exhaustive at m = n = 2.
    #[test]
    fn hom_complement_roundtrip_exhaustive() {
        let g2 = gf(2);
        let mut graphs = std::collections::HashSet::new();
        for h in enumerate_matrices(&g2, 2, 2) {
            let s = hom_to_complement(&h);
            assert_eq!(complement_to_hom(&s, 2).unwrap(), h);
            graphs.insert(format!("{:?}", s));
        }
        assert_eq!(graphs.len(), 16);
    }

    #[test]
    fn orbit_examples() {
        let g2 = gf(2);
        // Not nilpotent: rejected.
        let bad = LinearPair::new(mat(&g2, 1, 2, &[1, 0]), mat(&g2, 2, 1, &[1, 0])).unwrap();
        assert_eq!(
            orbit_basis(&bad, &[Fel::ONE, Fel::ZERO], Side::V).unwrap_err(),
            LinalgError::NotNilpotent
        );
        // m=2, n=1, f=(1,0), g=(0,1)^T: orbit of e1 is [e1, e2].
        let p = LinearPair::new(mat(&g2, 1, 2, &[1, 0]), mat(&g2, 2, 1, &[0, 1])).unwrap();
        let orbit = orbit_basis(&p, &[Fel::ONE, Fel::ZERO], Side::V).unwrap();
        assert_eq!(
            orbit,
            vec![vec![Fel::ONE, Fel::ZERO], vec![Fel::ZERO, Fel::ONE]]
        );
        // v = 0 has the empty orbit.
        assert!(orbit_basis(&p, &[Fel::ZERO, Fel::ZERO], Side::V)
            .unwrap()
            .is_empty());
        // F = 0: any nonzero v has orbit [v].
        let z = LinearPair::new(
            MatrixFq::zero(g2.clone(), 1, 2),
            MatrixFq::zero(g2.clone(), 2, 1),
        )
        .unwrap();
        assert_eq!(
            orbit_basis(&z, &[Fel::ONE, Fel::ONE], Side::V).unwrap().len(),
            1
        );
    }

    #[test]
    fn classify_examples() {
        let g2 = gf(2);
        // v = 0 is balanced of length 0.
        let z = LinearPair::new(
            MatrixFq::zero(g2.clone(), 1, 1),
            MatrixFq::zero(g2.clone(), 1, 1),
        )
        .unwrap();
        let c = classify_vector(&z, &[Fel::ZERO], Side::V).unwrap();
        assert_eq!(c.tag, BalanceTag::Balanced);
        assert_eq!(c.length(), 0);
        // f = g = 0, v ≠ 0: unbalanced with a = 1.
        let c = classify_vector(&z, &[Fel::ONE], Side::V).unwrap();
        assert_eq!(c.tag, BalanceTag::Unbalanced);
        assert_eq!((c.a, c.ell), (1, 0));
        // m=n=1, f=1, g=0, v=1: balanced of length 1.
        let p = LinearPair::new(mat(&g2, 1, 1, &[1]), mat(&g2, 1, 1, &[0])).unwrap();
        let c = classify_vector(&p, &[Fel::ONE], Side::V).unwrap();
        assert_eq!(c.tag, BalanceTag::Balanced);
        assert_eq!(c.length(), 1);
    }

    /// The four-part structure of balanced/unbalanced vectors, exhaustively
    /// at m,n ≤ 2, q = 2: (1) orbit vectors of a balanced v are balanced;
    /// (2) nonzero orbit vectors of an unbalanced v are unbalanced; (3) the
    /// image of a nonzero-image balanced vector is unbalanced; (4) the image
    /// of an unbalanced vector is balanced.
    #[test]
    fn balance_structure_exhaustive() {
        let g2 = gf(2);
        for m in 1..=2usize {
            for n in 1..=2usize {
                for f in enumerate_matrices(&g2, n, m) {
                    for g in enumerate_matrices(&g2, m, n) {
                        let p = LinearPair::new(f.clone(), g).unwrap();
                        if !p.is_nilpotent() {
                            continue;
                        }
                        for v in enumerate_vectors(&g2, m) {
                            let c = classify_vector(&p, &v, Side::V).unwrap();
                            let orbit = orbit_subspace(&p, &v, Side::V).unwrap();
                            for u in enumerate_vectors(&g2, m) {
                                if !orbit.contains(&u) {
                                    continue;
                                }
                                let cu = classify_vector(&p, &u, Side::V).unwrap();
                                match c.tag {
                                    BalanceTag::Balanced => {
                                        assert_eq!(cu.tag, BalanceTag::Balanced)
                                    }
                                    BalanceTag::Unbalanced => {
                                        if !vec_is_zero(&u) {
                                            assert_eq!(cu.tag, BalanceTag::Unbalanced);
                                        }
                                    }
                                }
                            }
                            let fv = p.apply_f(&v);
                            let cf = classify_vector(&p, &fv, Side::W).unwrap();
                            match c.tag {
                                BalanceTag::Balanced => {
                                    if !vec_is_zero(&fv) {
                                        assert_eq!(cf.tag, BalanceTag::Unbalanced);
                                    }
                                }
                                BalanceTag::Unbalanced => {
                                    assert_eq!(cf.tag, BalanceTag::Balanced)
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// Orbit subspaces of balanced and unbalanced vectors intersect
    /// trivially, and so do T[v] and T[g(w)] for balanced v, w.
    #[test]
    fn orbit_intersection_corollaries() {
        let g2 = gf(2);
        for m in 1..=2usize {
            for n in 1..=2usize {
                for f in enumerate_matrices(&g2, n, m) {
                    for g in enumerate_matrices(&g2, m, n) {
                        let p = LinearPair::new(f.clone(), g).unwrap();
                        if !p.is_nilpotent() {
                            continue;
                        }
                        let classified: Vec<(Vec<Fel>, Balancedness)> =
                            enumerate_vectors(&g2, m)
                                .map(|v| {
                                    let c = classify_vector(&p, &v, Side::V).unwrap();
                                    (v, c)
                                })
                                .collect();
                        for (v, cv) in &classified {
                            for (u, cu) in &classified {
                                if cv.tag == BalanceTag::Balanced
                                    && cu.tag == BalanceTag::Unbalanced
                                {
                                    let sv = orbit_subspace(&p, v, Side::V).unwrap();
                                    let su = orbit_subspace(&p, u, Side::V).unwrap();
                                    assert_eq!(sv.intersection_dim(&su), 0);
                                }
                            }
                        }
                        for w in enumerate_vectors(&g2, n) {
                            let cw = classify_vector(&p, &w, Side::W).unwrap();
                            if cw.tag != BalanceTag::Balanced {
                                continue;
                            }
                            let gw = p.apply_g(&w);
                            for (v, cv) in &classified {
                                if cv.tag != BalanceTag::Balanced {
                                    continue;
                                }
                                let sv = orbit_subspace(&p, v, Side::V).unwrap();
                                let sg = orbit_subspace(&p, &gw, Side::V).unwrap();
                                assert_eq!(sv.intersection_dim(&sg), 0);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let g2 = gf(2);
        // f = g = 0 at m = n = 1: one unbalanced point on each side.
        let z = LinearPair::new(
            MatrixFq::zero(g2.clone(), 1, 1),
            MatrixFq::zero(g2.clone(), 1, 1),
        )
        .unwrap();
        assert_eq!(
            decompose_indecomposables(&z).unwrap(),
            vec![
                Summand {
                    kind: SummandKind::UnbalancedV,
                    length: 1
                },
                Summand {
                    kind: SummandKind::UnbalancedW,
                    length: 1
                },
            ]
        );
        // f = 1, g = 0: a single balanced summand of dims (1,1).
        let p = LinearPair::new(mat(&g2, 1, 1, &[1]), mat(&g2, 1, 1, &[0])).unwrap();
        assert_eq!(
            decompose_indecomposables(&p).unwrap(),
            vec![Summand {
                kind: SummandKind::BalancedV,
                length: 1
            }]
        );
        // Empty pair: empty multiset.
        let e = LinearPair::new(
            MatrixFq::zero(g2.clone(), 0, 0),
            MatrixFq::zero(g2.clone(), 0, 0),
        )
        .unwrap();
        assert_eq!(decompose_indecomposables(&e).unwrap(), vec![]);
        // Non-nilpotent pairs are rejected.
        let id = MatrixFq::identity(g2.clone(), 1);
        let bad = LinearPair::new(id.clone(), id).unwrap();
        assert_eq!(
            decompose_indecomposables(&bad).unwrap_err(),
            LinalgError::NotNilpotent
        );
    }

    /// Summand dimensions add up to (m, n), and the dimension gap within
    /// each summand is at most one. Exhaustive m,n ≤ 2 at q = 2; swap
    /// symmetry checked alongside.
    #[test]
    fn decompose_dimension_sums() {
        let g2 = gf(2);
        for m in 0..=2usize {
            for n in 0..=2usize {
                for f in enumerate_matrices(&g2, n, m) {
                    for g in enumerate_matrices(&g2, m, n) {
                        let p = LinearPair::new(f.clone(), g).unwrap();
                        if !p.is_nilpotent() {
                            continue;
                        }
                        let summands = decompose_indecomposables(&p).unwrap();
                        let (mut dv, mut dw) = (0usize, 0usize);
                        for s in &summands {
                            let (a, b) = s.dims();
                            assert!(a.abs_diff(b) <= 1);
                            dv += a;
                            dw += b;
                        }
                        assert_eq!((dv, dw), (m, n));
                        // Mirror: swapping V and W mirrors the multiset.
                        let mut mirrored: Vec<Summand> = decompose_indecomposables(&p.swap())
                            .unwrap()
                            .into_iter()
                            .map(|s| Summand {
                                kind: match s.kind {
                                    SummandKind::BalancedV => SummandKind::BalancedW,
                                    SummandKind::BalancedW => SummandKind::BalancedV,
                                    SummandKind::UnbalancedV => SummandKind::UnbalancedW,
                                    SummandKind::UnbalancedW => SummandKind::UnbalancedV,
                                },
                                length: s.length,
                            })
                            .collect();
                        mirrored.sort();
                        // BalancedV and BalancedW name isomorphic summands
                        // ((ℓ,ℓ) either way); normalize before comparing.
                        let normalize = |v: Vec<Summand>| -> Vec<Summand> {
                            let mut v: Vec<Summand> = v
                                .into_iter()
                                .map(|s| Summand {
                                    kind: match s.kind {
                                        SummandKind::BalancedW => SummandKind::BalancedV,
                                        k => k,
                                    },
                                    length: s.length,
                                })
                                .collect();
                            v.sort();
                            v
                        };
                        assert_eq!(normalize(summands), normalize(mirrored));
                    }
                }
            }
        }
    }

    #[test]
    fn solve_and_inverse() {
        let g5 = gf(5);
        let a = mat(&g5, 2, 2, &[2, 1, 1, 1]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), MatrixFq::identity(g5.clone(), 2));
        let b = vec![g5.fel(3).unwrap(), g5.fel(4).unwrap()];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.apply(&x), b);
        // Inconsistent system.
        let sing = mat(&g5, 2, 2, &[1, 1, 2, 2]);
        assert!(sing
            .solve(&[g5.fel(1).unwrap(), g5.fel(3).unwrap()])
            .is_none());
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn split_along_complements() {
        let g2 = gf(2);
        let s = Subspace::from_rows(&g2, 2, &[vec![Fel::ONE, Fel::ONE]]);
        let c = s.canonical_complement();
        for v in enumerate_vectors(&g2, 2) {
            let (x, y) = split_along(&v, &s, &c).unwrap();
            assert!(s.contains(&x));
            assert!(c.contains(&y));
            for j in 0..2 {
                assert_eq!(g2.add(x[j], y[j]), v[j]);
            }
        }
    }

    proptest! {
        /// rref is idempotent and rank-stable on random matrices.
        #[test]
        fn rref_idempotent(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3, 4, 5]),
                           rows in 0usize..4, cols in 0usize..4) {
            let field = gf(q);
            let mut s = seed;
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 33) % q
            };
            let idx: Vec<u64> = (0..rows * cols).map(|_| next()).collect();
            let a = MatrixFq::from_indices(&field, rows, cols, &idx).unwrap();
            let (r, rank) = a.rref();
            prop_assert!(rank <= rows.min(cols));
            let (rr, rank2) = r.rref();
            prop_assert_eq!(rank, rank2);
            prop_assert_eq!(r, rr);
        }

        /// A·A⁻¹ = I whenever the inverse exists.
        #[test]
        fn inverse_is_two_sided(seed in any::<u64>(), n in 1usize..4) {
            let field = gf(3);
            let mut s = seed;
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 33) % 3
            };
            let idx: Vec<u64> = (0..n * n).map(|_| next()).collect();
            let a = MatrixFq::from_indices(&field, n, n, &idx).unwrap();
            if let Some(inv) = a.inverse() {
                prop_assert_eq!(a.mul(&inv).unwrap(), MatrixFq::identity(field.clone(), n));
                prop_assert_eq!(inv.mul(&a).unwrap(), MatrixFq::identity(field.clone(), n));
            }
        }
    }
}
