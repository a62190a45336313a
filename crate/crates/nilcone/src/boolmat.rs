//! Matrices over the two-element Boolean semiring (1 + 1 = 1), where
//! nilpotency is the same thing as acyclicity of the associated digraph, and
//! nilpotent matrices biject with labeled DAGs.
//!
//! Convention throughout: A_{ij} = 1 encodes an oriented edge j → i.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::nilpairs::BigCount;
use crate::par::map_ranges;

/// Largest supported matrix size; rows pack into single machine words.
pub const MAX_BOOL_N: usize = 64;

/// Hard ceiling on the brute-force census (2^{n²} matrices, n ≤ 5).
pub const BOOL_BRUTE_CAP: u64 = 1 << 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoolmatError {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("edge set is not acyclic")]
    NotAcyclic,
    #[error("enumeration needs {needed} matrices, over the cap {cap}")]
    CapExceeded { needed: u128, cap: u64 },
}

/// A square Boolean matrix; row i is the bitmask `rows[i]`, bit j = A_{ij}.
#[derive(Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BoolMatrix {
    pub fn new(n: usize, rows: Vec<u64>) -> Result<BoolMatrix, BoolmatError> {
        if n > MAX_BOOL_N {
            return Err(BoolmatError::SizeMismatch(format!(
                "size {n} exceeds the word-packing limit {MAX_BOOL_N}"
            )));
        }
        if rows.len() != n {
            return Err(BoolmatError::SizeMismatch(format!(
                "expected {n} rows, got {}",
                rows.len()
            )));
        }
        let mask = row_mask(n);
        if let Some(r) = rows.iter().find(|&&r| r & !mask != 0) {
            return Err(BoolmatError::SizeMismatch(format!(
                "row {r:#b} has bits outside the first {n} columns"
            )));
        }
        Ok(BoolMatrix { n, rows })
    }

    pub fn from_entries(n: usize, entries: &[bool]) -> Result<BoolMatrix, BoolmatError> {
        if entries.len() != n * n {
            return Err(BoolmatError::SizeMismatch(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| entries[i * n + j])
                    .fold(0u64, |r, j| r | 1 << j)
            })
            .collect();
        BoolMatrix::new(n, rows)
    }

    pub fn zero(n: usize) -> BoolMatrix {
        BoolMatrix::new(n, vec![0; n]).expect("zero matrix is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "entry ({i},{j}) out of range");
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n && j < self.n, "entry ({i},{j}) out of range");
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }
}

impl std::fmt::Debug for BoolMatrix {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "BoolMatrix {}×{}", self.n, self.n)?;
        for &row in &self.rows {
            let line: String = (0..self.n)
                .map(|j| if row >> j & 1 == 1 { '1' } else { '0' })
                .collect();
            writeln!(out, "  {line}")?;
        }
        Ok(())
    }
}

fn row_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

/// OR-AND matrix product: row i of AB is the union of the rows of B selected
/// by row i of A.
pub fn bool_mul(a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix, BoolmatError> {
    if a.n != b.n {
        return Err(BoolmatError::SizeMismatch(format!(
            "cannot multiply {0}×{0} by {1}×{1}",
            a.n, b.n
        )));
    }
    let rows = a
        .rows
        .iter()
        .map(|&arow| {
            let mut out = 0u64;
            let mut rem = arow;
            while rem != 0 {
                let k = rem.trailing_zeros() as usize;
                rem &= rem - 1;
                out |= b.rows[k];
            }
            out
        })
        .collect();
    Ok(BoolMatrix { n: a.n, rows })
}

/// Nilpotency by direct powering: A^n = 0, with early exit once a power
/// vanishes.
pub fn bool_is_nilpotent_power(a: &BoolMatrix) -> bool {
    if a.n == 0 {
        return true;
    }
    let mut p = a.clone();
    for _ in 1..a.n {
        if p.is_zero() {
            return true;
        }
        p = bool_mul(&p, a).expect("sizes match");
    }
    p.is_zero()
}

/// Acyclicity of the digraph with an edge j → i whenever A_{ij} = 1, by
/// iterative three-color depth-first search. Agrees with
/// [`bool_is_nilpotent_power`] on every matrix.
pub fn bool_is_acyclic(a: &BoolMatrix) -> bool {
    let mut succ = [0u64; MAX_BOOL_N];
    transpose_into(a.n, &a.rows, &mut succ);
    acyclic_masks(a.n, &succ)
}

/// succ[j] = bitmask of successors of j, i.e. column j of the matrix.
fn transpose_into(n: usize, rows: &[u64], succ: &mut [u64; MAX_BOOL_N]) {
    succ[..n].fill(0);
    for (i, &row) in rows.iter().enumerate() {
        let mut rem = row;
        while rem != 0 {
            let j = rem.trailing_zeros() as usize;
            rem &= rem - 1;
            succ[j] |= 1 << i;
        }
    }
}

/// Three-color DFS over successor masks; a gray-to-gray edge is a cycle.
/// Everything lives in fixed stack arrays (n ≤ 64, DFS depth ≤ n).
fn acyclic_masks(n: usize, succ: &[u64; MAX_BOOL_N]) -> bool {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = [WHITE; MAX_BOOL_N];
    let mut stack = [(0usize, 0u64); MAX_BOOL_N];
    for start in 0..n {
        if color[start] != WHITE {
            continue;
        }
        color[start] = GRAY;
        stack[0] = (start, succ[start]);
        let mut depth = 1;
        while depth > 0 {
            let (v, rem) = stack[depth - 1];
            if rem == 0 {
                color[v] = BLACK;
                depth -= 1;
                continue;
            }
            let u = rem.trailing_zeros() as usize;
            stack[depth - 1].1 = rem & (rem - 1);
            match color[u] {
                WHITE => {
                    color[u] = GRAY;
                    stack[depth] = (u, succ[u]);
                    depth += 1;
                }
                GRAY => return false,
                _ => {}
            }
        }
    }
    true
}

/// Edge list of the DAG of a nilpotent matrix: (j, i) for every A_{ij} = 1,
/// sorted.
pub fn matrix_to_dag(a: &BoolMatrix) -> Result<Vec<(usize, usize)>, BoolmatError> {
    if !bool_is_acyclic(a) {
        return Err(BoolmatError::NotNilpotent);
    }
    let mut edges = Vec::new();
    for (i, &row) in a.rows.iter().enumerate() {
        let mut rem = row;
        while rem != 0 {
            let j = rem.trailing_zeros() as usize;
            rem &= rem - 1;
            edges.push((j, i));
        }
    }
    edges.sort_unstable();
    Ok(edges)
}

/// The nilpotent matrix of an acyclic edge list on n ordered vertices: edge
/// (u, v) sets A_{vu} = 1.
pub fn dag_to_matrix(n: usize, edges: &[(usize, usize)]) -> Result<BoolMatrix, BoolmatError> {
    let mut mat = BoolMatrix::new(n, vec![0; n])?;
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(BoolmatError::SizeMismatch(format!(
                "edge ({u},{v}) outside graph of size {n}"
            )));
        }
        mat.set(v, u, true);
    }
    if !bool_is_acyclic(&mat) {
        return Err(BoolmatError::NotAcyclic);
    }
    Ok(mat)
}

/// Number of labeled DAGs on n ordered vertices (equivalently nilpotent
/// Boolean n×n matrices), by the alternating recurrence
/// a_n = Σ_{k=1}^{n} (−1)^{k−1} C(n,k) 2^{k(n−k)} a_{n−k}, a₀ = 1.
/// The whole table up to n is built once; intermediate terms are signed.
pub fn count_dags_recurrence(n: u64) -> BigCount {
    let n = n as usize;
    let mut table: Vec<BigInt> = Vec::with_capacity(n + 1);
    table.push(BigInt::one());
    for i in 1..=n {
        let mut total = BigInt::zero();
        for k in 1..=i {
            let choose = num_integer::binomial(BigInt::from(i), BigInt::from(k));
            let pow2 = BigInt::one() << (k * (i - k));
            let term = choose * pow2 * &table[i - k];
            if k % 2 == 1 {
                total += term;
            } else {
                total -= term;
            }
        }
        table.push(total);
    }
    let result = table.pop().expect("table is nonempty");
    debug_assert!(!result.is_negative());
    result.magnitude().clone()
}

/// Census of nilpotent matrices over all 2^{n²} Boolean matrices, using the
/// acyclicity test. The index space is split by high bits across workers.
pub fn count_bool_nilpotent_brute(n: u64, workers: usize) -> Result<BigCount, BoolmatError> {
    if n == 0 {
        return Ok(BigCount::one());
    }
    let bits = (n * n) as u32;
    let needed = 1u128 << bits.min(127);
    if needed > BOOL_BRUTE_CAP as u128 {
        return Err(BoolmatError::CapExceeded {
            needed,
            cap: BOOL_BRUTE_CAP,
        });
    }
    let n = n as usize;
    let mask = row_mask(n);
    let parts = map_ranges(1u64 << bits, workers, |range| {
        let mut rows = vec![0u64; n];
        let mut succ = [0u64; MAX_BOOL_N];
        let mut count = 0u64;
        for idx in range {
            for (i, row) in rows.iter_mut().enumerate() {
                *row = idx >> (i * n) & mask;
            }
            transpose_into(n, &rows, &mut succ);
            if acyclic_masks(n, &succ) {
                count += 1;
            }
        }
        count
    });
    Ok(BigCount::from(parts.into_iter().sum::<u64>()))
}

/// All n×n Boolean matrices, for exhaustive tests at small n.
pub fn enumerate_bool_matrices(n: usize) -> impl Iterator<Item = BoolMatrix> {
    let bits = (n * n) as u32;
    let mask = row_mask(n.max(1));
    (0u64..1 << bits).map(move |idx| {
        let rows = (0..n).map(|i| idx >> (i * n) & mask).collect();
        BoolMatrix::new(n, rows).expect("enumerated rows are in range")
    })
}
