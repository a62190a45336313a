//! Arithmetic in GF(q) for small prime powers q = p^k.
//!
//! Elements are stored as indices in `[0, q)`. For k = 1 the index is the
//! residue mod p; for k > 1 it packs the coefficients of the residue
//! polynomial in base p, least-significant digit first, so index 0 is the
//! zero element, index 1 is the unit and index p is the class of x. All
//! arithmetic is a table lookup once the field is built, which is what keeps
//! the brute-force enumerations cheap.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use thiserror::Error;

/// Largest q for which tables are built. Counting formulas work for any
/// prime power; only element-level arithmetic (and hence brute force) is
/// capped.
pub const MAX_Q: u64 = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {0} exceeds the table limit {MAX_Q}")]
    TooLarge(u64),
    #[error("modulus must be monic of degree {expected}, got coefficients {found:?}")]
    BadModulus { expected: u32, found: Vec<u64> },
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u64),
    #[error("0 has no multiplicative inverse")]
    ZeroInversion,
    #[error("element index {index} out of range for GF({q})")]
    BadElement { index: u64, q: u64 },
}

/// A field element, identified by its index in `[0, q)`.
///
/// A `Fel` is only meaningful relative to the [`Field`] that produced it;
/// mixing elements of different fields is a caller bug (caught by
/// `debug_assert` range checks, since distinct small fields can share
/// indices).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fel(u8);

impl Fel {
    pub const ZERO: Fel = Fel(0);
    pub const ONE: Fel = Fel(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Unchecked constructor for internal table plumbing. Callers must
    /// guarantee `index < q`.
    pub(crate) fn from_raw(index: u8) -> Fel {
        Fel(index)
    }
}

impl fmt::Debug for Fel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Immutable description of GF(p^k) plus full lookup tables.
///
/// Shared read-only across threads; see [`Field`] for the cheap handle.
pub struct FieldSpec {
    p: u64,
    k: u32,
    q: u64,
    /// Monic irreducible modulus, ascending coefficients, length k+1.
    /// `None` for prime fields, which use plain modular arithmetic.
    modulus: Option<Vec<u8>>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Cheap clonable handle to a [`FieldSpec`].
#[derive(Clone)]
pub struct Field(Arc<FieldSpec>);

impl Deref for Field {
    type Target = FieldSpec;
    fn deref(&self) -> &FieldSpec {
        &self.0
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl Field {
    /// Builds GF(q) with the built-in modulus for composite q.
    pub fn gf(q: u64) -> Result<Field, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if q > MAX_Q {
            return Err(FieldError::TooLarge(q));
        }
        if k == 1 {
            return Ok(Field(Arc::new(FieldSpec::build(p, k, None))));
        }
        let modulus = default_modulus(p, k)
            .expect("every (p, k) with p^k <= MAX_Q and k >= 2 has a built-in modulus");
        Ok(Field(Arc::new(FieldSpec::build(p, k, Some(modulus)))))
    }

    /// Builds GF(q) with a caller-supplied modulus, given as ascending
    /// coefficients of length k+1. For prime q the modulus is irrelevant and
    /// silently ignored.
    pub fn gf_with_modulus(q: u64, coeffs: &[u64]) -> Result<Field, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if q > MAX_Q {
            return Err(FieldError::TooLarge(q));
        }
        if k == 1 {
            // Prime field: arithmetic is mod p, any supplied modulus is moot.
            return Ok(Field(Arc::new(FieldSpec::build(p, k, None))));
        }
        let reduced: Vec<u8> = coeffs.iter().map(|&c| (c % p) as u8).collect();
        let bad = || FieldError::BadModulus {
            expected: k,
            found: coeffs.to_vec(),
        };
        if reduced.len() != k as usize + 1 || *reduced.last().unwrap() != 1 {
            return Err(bad());
        }
        if !is_irreducible(&reduced, p) {
            return Err(FieldError::ReducibleModulus(p));
        }
        Ok(Field(Arc::new(FieldSpec::build(p, k, Some(reduced)))))
    }
}

impl FieldSpec {
    fn build(p: u64, k: u32, modulus: Option<Vec<u8>>) -> FieldSpec {
        let q = p.pow(k);
        debug_assert!(q <= MAX_Q);
        if let Some(m) = &modulus {
            debug_assert_eq!(m.len(), k as usize + 1);
            debug_assert!(is_irreducible(m, p));
        }
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];

        for a in 0..qs {
            let da = digits(a as u64, p, k);
            let mut nd = vec![0u64; k as usize];
            for (i, &c) in da.iter().enumerate() {
                nd[i] = (p - c) % p;
            }
            neg[a] = encode(&nd, p) as u8;
            for b in 0..qs {
                let db = digits(b as u64, p, k);
                let mut sum = vec![0u64; k as usize];
                for i in 0..k as usize {
                    sum[i] = (da[i] + db[i]) % p;
                }
                add[a * qs + b] = encode(&sum, p) as u8;

                let prod = match &modulus {
                    None => vec![(a as u64 * b as u64) % p],
                    Some(m) => {
                        let m64: Vec<u64> = m.iter().map(|&c| c as u64).collect();
                        poly_rem(&poly_mul(&da, &db, p), &m64, p)
                    }
                };
                let mut padded = vec![0u64; k as usize];
                padded[..prod.len()].copy_from_slice(&prod);
                mul[a * qs + b] = encode(&padded, p) as u8;
            }
        }
        for a in 1..qs {
            let b = (0..qs)
                .find(|&b| mul[a * qs + b] == 1)
                .expect("every nonzero element of a field is invertible") as u8;
            inv[a] = b;
        }
        FieldSpec {
            p,
            k,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Ascending modulus coefficients; `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u8]> {
        self.modulus.as_deref()
    }

    /// Human-readable field description, e.g. `GF(9) [x^2+1]`.
    pub fn describe(&self) -> String {
        match &self.modulus {
            None => format!("GF({})", self.q),
            Some(m) => format!("GF({}) [{}]", self.q, poly_string(m)),
        }
    }

    /// Checked element constructor.
    pub fn fel(&self, index: u64) -> Result<Fel, FieldError> {
        if index < self.q {
            Ok(Fel(index as u8))
        } else {
            Err(FieldError::BadElement { index, q: self.q })
        }
    }

    pub fn add(&self, a: Fel, b: Fel) -> Fel {
        debug_assert!(a.index() < self.q as usize && b.index() < self.q as usize);
        Fel(self.add[a.index() * self.q as usize + b.index()])
    }

    pub fn neg(&self, a: Fel) -> Fel {
        debug_assert!(a.index() < self.q as usize);
        Fel(self.neg[a.index()])
    }

    pub fn sub(&self, a: Fel, b: Fel) -> Fel {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fel, b: Fel) -> Fel {
        debug_assert!(a.index() < self.q as usize && b.index() < self.q as usize);
        Fel(self.mul[a.index() * self.q as usize + b.index()])
    }

    pub fn inv(&self, a: Fel) -> Result<Fel, FieldError> {
        if a == Fel::ZERO {
            return Err(FieldError::ZeroInversion);
        }
        debug_assert!(a.index() < self.q as usize);
        Ok(Fel(self.inv[a.index()]))
    }

    /// All q elements in index order, each exactly once.
    pub fn elements(&self) -> impl Iterator<Item = Fel> {
        (0..self.q).map(|i| Fel(i as u8))
    }

    /// Raw table access for hot enumeration loops: index of a+b.
    #[inline(always)]
    pub(crate) fn add_idx(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q as usize + b] as usize
    }

    /// Raw table access for hot enumeration loops: index of a·b.
    #[inline(always)]
    pub(crate) fn mul_idx(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q as usize + b] as usize
    }
}

/// Factors q as p^k with p prime, if possible.
fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    if !is_prime(p) {
        return None; // smallest divisor > 1 of any integer is prime; unreachable
    }
    let mut rest = q;
    let mut k = 0u32;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest == 1 {
        Some((p, k))
    } else {
        None
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// One fixed irreducible per (p, k) with p^k <= MAX_Q, so runs are
/// reproducible without flags. Irreducibility is re-verified at build time.
fn default_modulus(p: u64, k: u32) -> Option<Vec<u8>> {
    let coeffs: &[u8] = match (p, k) {
        (2, 2) => &[1, 1, 1],             // x^2+x+1
        (2, 3) => &[1, 1, 0, 1],          // x^3+x+1
        (2, 4) => &[1, 1, 0, 0, 1],       // x^4+x+1
        (2, 5) => &[1, 0, 1, 0, 0, 1],    // x^5+x^2+1
        (2, 6) => &[1, 1, 0, 0, 0, 0, 1], // x^6+x+1
        (3, 2) => &[1, 0, 1],             // x^2+1
        (3, 3) => &[1, 2, 0, 1],          // x^3+2x+1
        (5, 2) => &[2, 0, 1],             // x^2+2
        (7, 2) => &[1, 0, 1],             // x^2+1
        _ => return None,
    };
    Some(coeffs.to_vec())
}

/// Base-p digit vector of `n`, length `k`, least significant first.
fn digits(n: u64, p: u64, k: u32) -> Vec<u64> {
    let mut d = vec![0u64; k as usize];
    let mut n = n;
    for slot in d.iter_mut() {
        *slot = n % p;
        n /= p;
    }
    debug_assert_eq!(n, 0);
    d
}

fn encode(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Polynomial product over GF(p), ascending coefficients.
fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    out
}

fn poly_deg(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Remainder of `a` by monic `m` over GF(p), ascending coefficients.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let md = poly_deg(m).expect("modulus is nonzero");
    debug_assert_eq!(m[md], 1, "modulus must be monic");
    let mut r = a.to_vec();
    while let Some(rd) = poly_deg(&r) {
        if rd < md {
            break;
        }
        let lead = r[rd];
        let shift = rd - md;
        for i in 0..=md {
            r[shift + i] = (r[shift + i] + (p - m[i] % p) % p * lead) % p;
        }
    }
    r.truncate(md);
    r.resize(md, 0);
    r
}

/// No monic factor of degree 1..=deg/2 divides `m`. For degrees 2 and 3 this
/// degenerates to the no-root test.
fn is_irreducible(m: &[u8], p: u64) -> bool {
    let m64: Vec<u64> = m.iter().map(|&c| c as u64).collect();
    let k = match poly_deg(&m64) {
        Some(d) if d >= 2 => d,
        _ => return false,
    };
    for d in 1..=k / 2 {
        // Monic candidates of degree d: free low coefficients count p^d.
        let total = p.pow(d as u32);
        for idx in 0..total {
            let mut cand = digits(idx, p, d as u32);
            cand.push(1);
            let rem = poly_rem(&m64, &cand, p);
            if poly_deg(&rem).is_none() {
                return false;
            }
        }
    }
    true
}

fn poly_string(m: &[u8]) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (i, &c) in m.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let t = match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}x^{i}"),
        };
        terms.push(t);
    }
    terms.join("+")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(field: &Field, i: u64) -> Fel {
        field.fel(i).unwrap()
    }

    #[test]
    fn prime_power_factoring() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::gf(6).unwrap_err(), FieldError::NotPrimePower(6));
        assert_eq!(Field::gf(0).unwrap_err(), FieldError::NotPrimePower(0));
        assert_eq!(Field::gf(128).unwrap_err(), FieldError::TooLarge(128));
        assert_eq!(Field::gf(67).unwrap_err(), FieldError::TooLarge(67));
        // x^2+1 = (x+1)^2 over GF(2).
        assert_eq!(
            Field::gf_with_modulus(4, &[1, 0, 1]).unwrap_err(),
            FieldError::ReducibleModulus(2)
        );
        assert!(matches!(
            Field::gf_with_modulus(4, &[1, 1]).unwrap_err(),
            FieldError::BadModulus { expected: 2, .. }
        ));
        assert!(matches!(
            Field::gf_with_modulus(4, &[1, 1, 2]).unwrap_err(),
            FieldError::BadModulus { .. } // leading coefficient 2 ≡ 0 mod 2
        ));
    }

    #[test]
    fn every_prime_power_up_to_max_builds() {
        let qs: Vec<u64> = (2..=MAX_Q).filter(|&q| prime_power(q).is_some()).collect();
        assert!(qs.contains(&64) && qs.contains(&49) && qs.contains(&27));
        for q in qs {
            let field = Field::gf(q).unwrap();
            assert_eq!(field.q(), q);
            assert_eq!(field.elements().count() as u64, q);
        }
    }

    #[test]
    fn addition_examples() {
        let g2 = Field::gf(2).unwrap();
        assert_eq!(g2.add(Fel::ONE, Fel::ONE), Fel::ZERO);
        let g5 = Field::gf(5).unwrap();
        assert_eq!(g5.add(f(&g5, 3), f(&g5, 4)), f(&g5, 2));
        // GF(4), modulus x^2+x+1: x + (x+1) = 1.
        let g4 = Field::gf(4).unwrap();
        assert_eq!(g4.add(f(&g4, 2), f(&g4, 3)), Fel::ONE);
    }

    #[test]
    fn multiplication_examples() {
        let g2 = Field::gf(2).unwrap();
        assert_eq!(g2.mul(Fel::ONE, Fel::ONE), Fel::ONE);
        let g3 = Field::gf(3).unwrap();
        assert_eq!(g3.mul(f(&g3, 2), f(&g3, 2)), Fel::ONE);
        // GF(4): x·x = x+1 after reduction by x^2+x+1.
        let g4 = Field::gf(4).unwrap();
        assert_eq!(g4.mul(f(&g4, 2), f(&g4, 2)), f(&g4, 3));
    }

    #[test]
    fn inverse_examples() {
        let g5 = Field::gf(5).unwrap();
        assert_eq!(g5.inv(f(&g5, 2)).unwrap(), f(&g5, 3));
        let g2 = Field::gf(2).unwrap();
        assert_eq!(g2.inv(Fel::ONE).unwrap(), Fel::ONE);
        let g4 = Field::gf(4).unwrap();
        assert_eq!(g4.inv(f(&g4, 2)).unwrap(), f(&g4, 3));
        assert_eq!(g4.inv(Fel::ZERO).unwrap_err(), FieldError::ZeroInversion);
    }

    #[test]
    fn enumeration_is_index_order() {
        let g3 = Field::gf(3).unwrap();
        let all: Vec<usize> = g3.elements().map(Fel::index).collect();
        assert_eq!(all, vec![0, 1, 2]);
        let g4 = Field::gf(4).unwrap();
        let all: Vec<usize> = g4.elements().map(Fel::index).collect();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    /// Exhaustive field axioms over all triples for every q ≤ 9.
    #[test]
    fn field_axioms_exhaustive_small_q() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let field = Field::gf(q).unwrap();
            let els: Vec<Fel> = field.elements().collect();
            for &a in &els {
                assert_eq!(field.add(a, Fel::ZERO), a);
                assert_eq!(field.mul(a, Fel::ONE), a);
                assert_eq!(field.add(a, field.neg(a)), Fel::ZERO);
                if a != Fel::ZERO {
                    let b = field.inv(a).unwrap();
                    assert_eq!(field.mul(a, b), Fel::ONE);
                    assert_eq!(field.inv(b).unwrap(), a);
                    // Multiplicative group has order q-1.
                    let mut pow = Fel::ONE;
                    for _ in 0..q - 1 {
                        pow = field.mul(pow, a);
                    }
                    assert_eq!(pow, Fel::ONE);
                }
                for &b in &els {
                    assert_eq!(field.add(a, b), field.add(b, a));
                    assert_eq!(field.mul(a, b), field.mul(b, a));
                    for &c in &els {
                        assert_eq!(
                            field.add(field.add(a, b), c),
                            field.add(a, field.add(b, c))
                        );
                        assert_eq!(
                            field.mul(field.mul(a, b), c),
                            field.mul(a, field.mul(b, c))
                        );
                        assert_eq!(
                            field.mul(a, field.add(b, c)),
                            field.add(field.mul(a, b), field.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn no_zero_divisors_all_q() {
        for q in (2..=MAX_Q).filter(|&q| prime_power(q).is_some()) {
            let field = Field::gf(q).unwrap();
            for a in field.elements() {
                for b in field.elements() {
                    let prod_zero = field.mul(a, b) == Fel::ZERO;
                    assert_eq!(prod_zero, a == Fel::ZERO || b == Fel::ZERO);
                }
            }
        }
    }

    #[test]
    fn custom_modulus_still_a_field() {
        // x^2+x+2 over GF(3): roots 0→2, 1→1, 2→2·... 4+2+2=8≡2 — none.
        let g9 = Field::gf_with_modulus(9, &[2, 1, 1]).unwrap();
        assert_eq!(g9.describe(), "GF(9) [x^2+x+2]");
        for a in g9.elements().skip(1) {
            assert_eq!(g9.mul(a, g9.inv(a).unwrap()), Fel::ONE);
        }
        // Different modulus ⇒ different field value.
        let default = Field::gf(9).unwrap();
        assert_ne!(default, g9);
        assert_eq!(default.describe(), "GF(9) [x^2+1]");
    }

    #[test]
    fn fel_range_checking() {
        let g4 = Field::gf(4).unwrap();
        assert!(g4.fel(3).is_ok());
        assert_eq!(
            g4.fel(4).unwrap_err(),
            FieldError::BadElement { index: 4, q: 4 }
        );
    }
}
