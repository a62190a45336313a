//! Exact counting of nilpotent pairs over GF(q).
//!
//! Three independent evaluations of the nilpotent-pair count are provided —
//! a closed form, a sum over ranks, and a rank-weighted sum over maps with a
//! different rank-count factorization — plus brute-force enumeration
//! oracles. Everything is big-integer or big-rational exact; divisions are
//! checked to be exact, never rounded.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::Field;
use crate::linalg::{classify_vector, BalanceTag, LinearPair, MatrixFq, Side};
use crate::par::map_ranges;

/// Exact nonnegative count.
pub type BigCount = BigUint;

/// Exact probability; `Ratio` keeps it reduced with positive denominator.
pub type ExactRational = Ratio<BigInt>;

/// Default ceiling on brute-force pair evaluations (q^{2mn}).
pub const DEFAULT_BRUTE_CAP: u64 = 1 << 26;

/// Dimensions are capped well past anything enumerable so that every
/// exponent below fits comfortably in u64.
const MAX_FORMULA_DIM: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("parameter out of range: {0}")]
    BadRange(String),
    #[error("enumeration needs {needed} evaluations, over the cap {cap}")]
    CapExceeded { needed: u128, cap: u64 },
}

fn check_dims(vals: &[(u64, &str)]) -> Result<(), CountError> {
    for &(v, name) in vals {
        if v > MAX_FORMULA_DIM {
            return Err(CountError::BadRange(format!(
                "{name} = {v} exceeds the formula limit {MAX_FORMULA_DIM}"
            )));
        }
    }
    Ok(())
}

fn check_q(q: u64) -> Result<(), CountError> {
    if q < 2 {
        return Err(CountError::BadRange(format!("q = {q} must be at least 2")));
    }
    Ok(())
}

fn q_pow(q: u64, e: u64) -> BigCount {
    num_traits::Pow::pow(BigUint::from(q), e)
}

/// Exact division; the formulas below only ever divide when the quotient is
/// an integer, so a remainder is an implementation bug.
fn exact_div(num: BigCount, den: &BigCount) -> BigCount {
    let (d, r) = num.div_rem(den);
    debug_assert!(r.is_zero(), "division was expected to be exact");
    d
}

/// ∏_{i=0}^{r−1} (q^m − q^i).
fn falling_q_product(q: u64, m: u64, r: u64) -> BigCount {
    let qm = q_pow(q, m);
    let mut acc = BigCount::one();
    for i in 0..r {
        acc *= &qm - q_pow(q, i);
    }
    acc
}

/// The q-binomial coefficient: the number of r-dimensional subspaces of an
/// m-dimensional space over GF(q). Defined (and exact) for any integer
/// q ≥ 2, prime power or not, since it is a polynomial in q.
pub fn q_binomial(m: u64, r: u64, q: u64) -> Result<BigCount, CountError> {
    check_q(q)?;
    check_dims(&[(m, "m"), (r, "r")])?;
    if r > m {
        return Err(CountError::BadRange(format!("r = {r} exceeds m = {m}")));
    }
    let num = falling_q_product(q, m, r);
    let den = falling_q_product(q, r, r);
    Ok(exact_div(num, &den))
}

/// Number of rank-r linear maps from an m-dimensional to an n-dimensional
/// space: [m r]_q · [n r]_q · ∏_{i<r}(q^r − q^i).
pub fn count_rank_r_maps(m: u64, n: u64, r: u64, q: u64) -> Result<BigCount, CountError> {
    check_q(q)?;
    check_dims(&[(m, "m"), (n, "n"), (r, "r")])?;
    if r > m.min(n) {
        return Err(CountError::BadRange(format!(
            "r = {r} exceeds min(m, n) = {}",
            m.min(n)
        )));
    }
    Ok(q_binomial(m, r, q)? * q_binomial(n, r, q)? * falling_q_product(q, r, r))
}

/// Nilpotent-pair count as the sum over ranks r of q^{mn−r} · N_{m,n;r},
/// with N_{m,n;r} from [`count_rank_r_maps`].
pub fn count_nilpotent_pairs_sum(m: u64, n: u64, q: u64) -> Result<BigCount, CountError> {
    check_q(q)?;
    check_dims(&[(m, "m"), (n, "n")])?;
    let mut acc = BigCount::zero();
    for r in 0..=m.min(n) {
        acc += q_pow(q, m * n - r) * count_rank_r_maps(m, n, r, q)?;
    }
    Ok(acc)
}

/// Nilpotent-pair count in closed form: q^{2mn−m−n} (q^m + q^n − 1),
/// evaluated as q^{2mn}(q^m + q^n − 1)/q^{m+n} so the m·n = 0 cases (where
/// the exponent would go negative) still come out exactly 1.
pub fn count_nilpotent_pairs_closed(m: u64, n: u64, q: u64) -> Result<BigCount, CountError> {
    check_q(q)?;
    check_dims(&[(m, "m"), (n, "n")])?;
    let num = q_pow(q, 2 * m * n) * (q_pow(q, m) + q_pow(q, n) - BigCount::one());
    Ok(exact_div(num, &q_pow(q, m + n)))
}

/// Nilpotent-pair count as Σ_T q^{mn − rank T}, grouped by rank with the
/// alternative factorization N_{m,n;r} = [n r]_q · ∏_{i<r}(q^m − q^i)
/// (choose the image, then count surjections onto it) — deliberately a
/// different route from the other two evaluations.
pub fn count_nilpotent_pairs_rank_weighted(m: u64, n: u64, q: u64) -> Result<BigCount, CountError> {
    check_q(q)?;
    check_dims(&[(m, "m"), (n, "n")])?;
    let mut acc = BigCount::zero();
    for r in 0..=m.min(n) {
        let maps_of_rank_r = q_binomial(n, r, q)? * falling_q_product(q, m, r);
        acc += q_pow(q, m * n - r) * maps_of_rank_r;
    }
    Ok(acc)
}

/// Probability that a uniformly random pair is nilpotent:
/// (q^m + q^n − 1)/q^{m+n} = q^{−m} + q^{−n} − q^{−m−n}.
pub fn nilpotent_pair_probability(m: u64, n: u64, q: u64) -> Result<ExactRational, CountError> {
    check_q(q)?;
    check_dims(&[(m, "m"), (n, "n")])?;
    let num = q_pow(q, m) + q_pow(q, n) - BigCount::one();
    Ok(Ratio::new(num.into(), q_pow(q, m + n).into()))
}

/// Probability that a uniformly random v ∈ V is balanced for a uniformly
/// random nilpotent pair: q^n/(q^m + q^n − 1).
pub fn balanced_probability(m: u64, n: u64, q: u64) -> Result<ExactRational, CountError> {
    check_q(q)?;
    check_dims(&[(m, "m"), (n, "n")])?;
    let den = q_pow(q, m) + q_pow(q, n) - BigCount::one();
    Ok(Ratio::new(q_pow(q, n).into(), den.into()))
}

/// Number of triples (f, g, v) with (f, g) nilpotent and v balanced of
/// length exactly ell: q^{2mn+ℓ−(m+n)(ℓ+1)} (q^m + q^n − q^ℓ)
/// ∏_{i<ℓ}(q^m − q^i) ∏_{j<ℓ}(q^n − q^j), evaluated with exact division.
/// At ell = 0 this reduces to the nilpotent-pair count (v = 0 is the unique
/// balanced vector of length 0).
pub fn count_balanced_triples_of_length(
    m: u64,
    n: u64,
    q: u64,
    ell: u64,
) -> Result<BigCount, CountError> {
    check_q(q)?;
    check_dims(&[(m, "m"), (n, "n"), (ell, "ell")])?;
    if ell > m.min(n) {
        return Err(CountError::BadRange(format!(
            "ell = {ell} exceeds min(m, n) = {}",
            m.min(n)
        )));
    }
    let head = q_pow(q, m) + q_pow(q, n) - q_pow(q, ell);
    let num = q_pow(q, 2 * m * n + ell)
        * head
        * falling_q_product(q, m, ell)
        * falling_q_product(q, n, ell);
    Ok(exact_div(num, &q_pow(q, (m + n) * (ell + 1))))
}

/// Knobs for the enumeration oracles.
#[derive(Clone, Copy, Debug)]
pub struct BruteOptions {
    /// Maximum number of (F, G) pairs to evaluate.
    pub cap: u64,
    /// Worker threads; the F-space is partitioned by index range.
    pub workers: usize,
}

impl Default for BruteOptions {
    fn default() -> Self {
        BruteOptions {
            cap: DEFAULT_BRUTE_CAP,
            workers: 1,
        }
    }
}

/// q^{2mn} if it fits the cap, else the error.
fn check_cap(q: u64, m: usize, n: usize, cap: u64) -> Result<(u64, u64), CountError> {
    let exp = 2 * m as u32 * n as u32;
    let needed = (q as u128)
        .checked_pow(exp)
        .unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(CountError::CapExceeded { needed, cap });
    }
    // needed ≤ cap ≤ u64::MAX, and its square root bounds each factor.
    let f_total = (q as u64).pow(m as u32 * n as u32);
    Ok((f_total, f_total))
}

/// Counts nilpotent pairs by enumerating all q^{mn} × q^{mn} (F, G) pairs
/// in lexicographic row-major entry order, F outer, G inner. The F-space is
/// split across workers; partial counts add up.
pub fn brute_force_count_nilpotent_pairs(
    field: &Field,
    m: usize,
    n: usize,
    opts: BruteOptions,
) -> Result<BigCount, CountError> {
    let (f_total, _) = check_cap(field.q(), m, n, opts.cap)?;
    let parts = map_ranges(f_total, opts.workers, |range| {
        count_nilpotent_in_f_range(field, m, n, range)
    });
    Ok(BigCount::from(parts.into_iter().sum::<u64>()))
}

/// Raw-index inner loop: matrices are `usize` index buffers, arithmetic is
/// direct table lookup, and the G odometer avoids re-decoding indices.
fn count_nilpotent_in_f_range(
    field: &Field,
    m: usize,
    n: usize,
    f_range: std::ops::Range<u64>,
) -> u64 {
    let q = field.q() as usize;
    let mn = m * n;
    let mut f_mat = vec![0usize; mn]; // n×m row-major
    let mut g_mat = vec![0usize; mn]; // m×n row-major
    let mut t = vec![0usize; m * m];
    let mut pow = vec![0usize; m * m];
    let mut scratch = vec![0usize; m * m];
    let mut count = 0u64;
    for f_idx in f_range {
        decode_mat(f_idx, q, &mut f_mat);
        g_mat.iter_mut().for_each(|e| *e = 0);
        loop {
            // T = G·F, m×m.
            raw_mul(field, &g_mat, &f_mat, m, n, m, &mut t);
            if raw_is_nilpotent(field, &t, m, &mut pow, &mut scratch) {
                count += 1;
            }
            if !odometer_step(&mut g_mat, q) {
                break;
            }
        }
    }
    count
}

/// Writes the base-q digits of `idx` into `out`, first entry most
/// significant (lexicographic enumeration order).
fn decode_mat(mut idx: u64, q: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = (idx % q as u64) as usize;
        idx /= q as u64;
    }
}

/// Advances a base-q digit vector in lexicographic order; false on wrap.
fn odometer_step(digits: &mut [usize], q: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

fn raw_mul(
    field: &Field,
    a: &[usize],
    b: &[usize],
    ar: usize,
    inner: usize,
    bc: usize,
    out: &mut [usize],
) {
    for i in 0..ar {
        for j in 0..bc {
            let mut acc = 0usize;
            for k in 0..inner {
                let prod = field.mul_idx(a[i * inner + k], b[k * bc + j]);
                acc = field.add_idx(acc, prod);
            }
            out[i * bc + j] = acc;
        }
    }
}

/// t^d = 0 for a d×d index matrix, with early exit on a vanishing power.
fn raw_is_nilpotent(
    field: &Field,
    t: &[usize],
    d: usize,
    pow: &mut [usize],
    scratch: &mut [usize],
) -> bool {
    if d == 0 {
        return true;
    }
    pow.copy_from_slice(t);
    for _ in 1..d {
        if pow.iter().all(|&e| e == 0) {
            return true;
        }
        raw_mul(field, pow, t, d, d, d, scratch);
        pow.copy_from_slice(scratch);
    }
    pow.iter().all(|&e| e == 0)
}

/// Per-length tallies of balanced vectors plus unbalanced totals across all
/// nilpotent pairs at (m, n, q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentCensus {
    pub pairs_tested: u64,
    pub nilpotent: u64,
    /// Index ℓ: number of (nilpotent pair, balanced v ∈ V of length ℓ) events.
    pub balanced_v_by_length: Vec<u64>,
    pub balanced_w_by_length: Vec<u64>,
    pub unbalanced_v: u64,
    pub unbalanced_w: u64,
}

impl NilpotentCensus {
    pub fn balanced_v_total(&self) -> u64 {
        self.balanced_v_by_length.iter().sum()
    }

    pub fn balanced_w_total(&self) -> u64 {
        self.balanced_w_by_length.iter().sum()
    }
}

/// Full balanced/unbalanced census over every nilpotent pair, classifying
/// all q^m + q^n vectors per pair. Much heavier than the plain count; meant
/// for small (m, n, q).
pub fn brute_force_nilpotent_census(
    field: &Field,
    m: usize,
    n: usize,
    opts: BruteOptions,
) -> Result<NilpotentCensus, CountError> {
    let (f_total, _) = check_cap(field.q(), m, n, opts.cap)?;
    let lmax = m.min(n);
    let parts = map_ranges(f_total, opts.workers, |range| {
        let mut c = NilpotentCensus {
            pairs_tested: 0,
            nilpotent: 0,
            balanced_v_by_length: vec![0; lmax + 1],
            balanced_w_by_length: vec![0; lmax + 1],
            unbalanced_v: 0,
            unbalanced_w: 0,
        };
        for f in matrices_in_range(field, n, m, range) {
            for g in crate::linalg::enumerate_matrices(field, m, n) {
                c.pairs_tested += 1;
                let pair = LinearPair::new(f.clone(), g).unwrap();
                if !pair.is_nilpotent() {
                    continue;
                }
                c.nilpotent += 1;
                tally_side(&pair, Side::V, &mut c.balanced_v_by_length, &mut c.unbalanced_v);
                tally_side(&pair, Side::W, &mut c.balanced_w_by_length, &mut c.unbalanced_w);
            }
        }
        c
    });
    let mut total = NilpotentCensus {
        pairs_tested: 0,
        nilpotent: 0,
        balanced_v_by_length: vec![0; lmax + 1],
        balanced_w_by_length: vec![0; lmax + 1],
        unbalanced_v: 0,
        unbalanced_w: 0,
    };
    for p in parts {
        total.pairs_tested += p.pairs_tested;
        total.nilpotent += p.nilpotent;
        for (a, b) in total
            .balanced_v_by_length
            .iter_mut()
            .zip(&p.balanced_v_by_length)
        {
            *a += b;
        }
        for (a, b) in total
            .balanced_w_by_length
            .iter_mut()
            .zip(&p.balanced_w_by_length)
        {
            *a += b;
        }
        total.unbalanced_v += p.unbalanced_v;
        total.unbalanced_w += p.unbalanced_w;
    }
    Ok(total)
}

fn tally_side(pair: &LinearPair, side: Side, balanced: &mut [u64], unbalanced: &mut u64) {
    let d = match side {
        Side::V => pair.m(),
        Side::W => pair.n(),
    };
    for v in crate::linalg::enumerate_vectors(pair.field(), d) {
        let c = classify_vector(pair, &v, side).expect("nilpotent by construction");
        match c.tag {
            BalanceTag::Balanced => balanced[c.length()] += 1,
            BalanceTag::Unbalanced => *unbalanced += 1,
        }
    }
}

/// Matrices with row-major entry index in `range`, lexicographic order.
fn matrices_in_range(
    field: &Field,
    rows: usize,
    cols: usize,
    range: std::ops::Range<u64>,
) -> impl Iterator<Item = MatrixFq> + '_ {
    let q = field.q();
    range.map(move |i| {
        let mut buf = vec![0usize; rows * cols];
        decode_mat(i, q as usize, &mut buf);
        MatrixFq::from_indices(field, rows, cols, &buf.iter().map(|&e| e as u64).collect::<Vec<_>>())
            .unwrap()
    })
}
