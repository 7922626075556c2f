//! The finite field F_q = F_p[x]/(h) with table-driven arithmetic and the
//! absolute trace to F_p.
//!
//! Elements are handles into the tables. The handle of an element with
//! coordinates (c_0, …, c_{m−1}) (w.r.t. 1, x, …, x^{m−1}) is the base-p number
//! with c_0 as its most significant digit, so comparing handles compares
//! coordinate vectors lexicographically.

use std::fmt;

use crate::error::{Error, Result};

/// Largest field order for which the multiplication table is materialised.
pub const MAX_FIELD_ORDER: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    /// Position of the element in the canonical order, in `[0, q)`.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone)]
pub struct FieldConfig {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    one: FieldElement,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    trace: Vec<u32>,
}

impl fmt::Debug for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldConfig")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldConfig {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldConfig {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n as u64 {
        if (n as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldConfig {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// Builds F_{p^m}. When `modulus` is `None` the lexicographically smallest
    /// monic irreducible of degree `m` is used (coefficients little-endian,
    /// counted with the constant term as least significant digit).
    pub fn new(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_FIELD_ORDER as u64)
            .ok_or(Error::FieldTooLarge {
                p,
                m,
                limit: MAX_FIELD_ORDER,
            })? as u32;
        let modulus = match modulus {
            Some(h) => {
                if h.len() != m as usize + 1 || h[m as usize] != 1 || h.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus { p, expected: m });
                }
                if !is_irreducible(&h, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                h
            }
            None => smallest_irreducible(p, m),
        };
        Ok(Self::build_tables(p, m, q, modulus))
    }

    fn build_tables(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> Self {
        let qs = q as usize;
        let coords: Vec<Vec<u32>> = (0..q).map(|i| index_to_coords(i, p, m)).collect();
        let idx = |c: &[u32]| coords_to_index(c, p) as u16;

        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        for a in 0..qs {
            for b in a..qs {
                let s: Vec<u32> = coords[a]
                    .iter()
                    .zip(&coords[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                let prod = fp_mulmod(&coords[a], &coords[b], &modulus, p);
                let (si, pi) = (idx(&s), idx(&prod));
                add[a * qs + b] = si;
                add[b * qs + a] = si;
                mul[a * qs + b] = pi;
                mul[b * qs + a] = pi;
            }
        }
        let neg: Vec<u16> = coords
            .iter()
            .map(|c| idx(&c.iter().map(|&x| (p - x) % p).collect::<Vec<_>>()))
            .collect();
        let mut one_coords = vec![0u32; m as usize];
        one_coords[0] = 1;
        let one = idx(&one_coords);
        let mut inv = vec![0u16; qs];
        for a in 1..qs {
            inv[a] = (1..qs)
                .find(|&b| mul[a * qs + b] == one)
                .expect("field has inverses") as u16;
        }

        let mut cfg = FieldConfig {
            p,
            m,
            q,
            modulus,
            one: FieldElement(one),
            add,
            mul,
            neg,
            inv,
            trace: Vec::new(),
        };
        cfg.trace = (0..q)
            .map(|i| {
                let t = cfg.frobenius_trace(FieldElement(i as u16));
                let c = cfg.coords(t);
                debug_assert!(c[1..].iter().all(|&x| x == 0), "trace left the prime field");
                c[0]
            })
            .collect();
        cfg
    }

    fn frobenius_trace(&self, x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut power = x;
        for _ in 0..self.m {
            acc = self.add(acc, power);
            power = self.pow(power, self.p as u64);
        }
        acc
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients of h, little-endian, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        self.one
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    /// All q elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|i| FieldElement(i as u16))
    }

    pub fn element(&self, index: usize) -> FieldElement {
        assert!(
            index < self.q as usize,
            "element index {index} out of range"
        );
        FieldElement(index as u16)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElement> {
        if coords.len() != self.m as usize {
            return Err(Error::DimensionMismatch {
                expected: self.m as usize,
                got: coords.len(),
            });
        }
        if let Some(&value) = coords.iter().find(|&&c| c >= self.p) {
            return Err(Error::UnreducedCoordinate { value, p: self.p });
        }
        Ok(FieldElement(coords_to_index(coords, self.p) as u16))
    }

    pub fn coords(&self, x: FieldElement) -> Vec<u32> {
        index_to_coords(x.0 as u32, self.p, self.m)
    }

    /// Embeds an integer of the prime subfield.
    pub fn from_prime(&self, c: u32) -> FieldElement {
        let mut v = vec![0; self.m as usize];
        v[0] = c % self.p;
        FieldElement(coords_to_index(&v, self.p) as u16)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.index()])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        (!a.is_zero()).then(|| FieldElement(self.inv[a.index()]))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace Tr(x) = x + x^p + … + x^{p^{m−1}}, as an integer mod p.
    #[inline]
    pub fn trace(&self, x: FieldElement) -> u32 {
        self.trace[x.index()]
    }

    /// Trace of an element given by coordinates.
    pub fn trace_coords(&self, coords: &[u32]) -> Result<u32> {
        Ok(self.trace(self.from_coords(coords)?))
    }
}

fn index_to_coords(mut i: u32, p: u32, m: u32) -> Vec<u32> {
    let mut c = vec![0; m as usize];
    for slot in c.iter_mut().rev() {
        *slot = i % p;
        i /= p;
    }
    c
}

fn coords_to_index(c: &[u32], p: u32) -> u32 {
    c.iter().fold(0, |acc, &x| acc * p + x)
}

// Dense polynomial helpers over F_p (little-endian `Vec<u32>`), used only to
// construct the extension.

fn fp_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (j, &bj) in b.iter().enumerate() {
            let t = (c as u64 * bj as u64 % p as u64) as u32;
            r[shift + j] = (r[shift + j] + p - t) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &[u32], b: &[u32], h: &[u32], p: u32) -> Vec<u32> {
    let m = h.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = fp_rem(&prod, h, p);
    r.resize(m, 0);
    r
}

fn fp_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Rabin-style test: h of degree m is irreducible iff gcd(h, x^{p^i} − x) = 1
/// for 1 ≤ i ≤ m/2.
pub(crate) fn is_irreducible(h: &[u32], p: u32) -> bool {
    let m = h.len() - 1;
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let mut x_pow = vec![0u32; m];
    x_pow[1] = 1;
    let x = x_pow.clone();
    for _ in 1..=m / 2 {
        // x_pow <- x_pow^p mod h
        let mut acc = {
            let mut one = vec![0u32; m];
            one[0] = 1;
            one
        };
        let mut base = x_pow.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_mulmod(&acc, &base, h, p);
            }
            base = fp_mulmod(&base, &base, h, p);
            e >>= 1;
        }
        x_pow = acc;
        let diff: Vec<u32> = x_pow.iter().zip(&x).map(|(a, b)| (a + p - b) % p).collect();
        let g = fp_gcd(h, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    let m = m as usize;
    let count = (p as u64).pow(m as u32);
    for n in 0..count {
        let mut h = vec![0u32; m + 1];
        let mut v = n;
        for slot in h.iter_mut().take(m) {
            *slot = (v % p as u64) as u32;
            v /= p as u64;
        }
        h[m] = 1;
        if is_irreducible(&h, p) {
            return h;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible(h: &[u32], p: u32) -> bool {
        // no monic factor of degree 1..=deg/2
        let m = h.len() - 1;
        for d in 1..=m / 2 {
            for n in 0..(p as u64).pow(d as u32) {
                let mut g = vec![0u32; d + 1];
                let mut v = n;
                for slot in g.iter_mut().take(d) {
                    *slot = (v % p as u64) as u32;
                    v /= p as u64;
                }
                g[d] = 1;
                if fp_rem(h, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn primality() {
        let primes: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn rabin_test_matches_factor_search() {
        for p in [2u32, 3, 5] {
            for m in 1..=4usize {
                if (p as u64).pow(m as u32) > 700 {
                    continue;
                }
                for n in 0..(p as u64).pow(m as u32) {
                    let mut h = vec![0u32; m + 1];
                    let mut v = n;
                    for slot in h.iter_mut().take(m) {
                        *slot = (v % p as u64) as u32;
                        v /= p as u64;
                    }
                    h[m] = 1;
                    assert_eq!(
                        is_irreducible(&h, p),
                        brute_irreducible(&h, p),
                        "{h:?} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldConfig::new(2, 2, None).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FieldConfig::new(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(
            FieldConfig::new(2, 3, None).unwrap().modulus(),
            &[1, 1, 0, 1]
        );
        assert_eq!(FieldConfig::prime(7).unwrap().modulus(), &[0, 1]);
    }

    #[test]
    fn rejects_bad_configs() {
        assert_eq!(FieldConfig::prime(4).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldConfig::new(2, 0, None).unwrap_err(), Error::ZeroDegree);
        assert!(matches!(
            FieldConfig::new(2, 11, None),
            Err(Error::FieldTooLarge { .. })
        ));
        assert_eq!(
            FieldConfig::new(2, 2, Some(vec![1, 0, 1])).unwrap_err(),
            Error::ReducibleModulus(2)
        );
        assert!(matches!(
            FieldConfig::new(2, 2, Some(vec![1, 1])),
            Err(Error::BadModulus { .. })
        ));
    }

    #[test]
    fn trace_examples() {
        let f5 = FieldConfig::prime(5).unwrap();
        assert_eq!(f5.trace(f5.from_prime(3)), 3);
        let f4 = FieldConfig::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        let x = f4.from_coords(&[0, 1]).unwrap();
        // x + x^2 = x + (x + 1) = 1
        assert_eq!(f4.trace(x), 1);
        assert_eq!(f4.trace(f4.zero()), 0);
        assert_eq!(
            f4.trace_coords(&[1]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 2,
                got: 1
            }
        );
    }

    fn small_fields() -> Vec<FieldConfig> {
        vec![
            FieldConfig::prime(2).unwrap(),
            FieldConfig::prime(3).unwrap(),
            FieldConfig::prime(5).unwrap(),
            FieldConfig::prime(7).unwrap(),
            FieldConfig::new(2, 2, None).unwrap(),
            FieldConfig::new(2, 3, None).unwrap(),
            FieldConfig::new(3, 2, None).unwrap(),
        ]
    }

    #[test]
    fn trace_is_linear_frobenius_invariant_and_onto() {
        for f in small_fields() {
            let p = f.p();
            let mut hit = vec![false; p as usize];
            for x in f.elements() {
                hit[f.trace(x) as usize] = true;
                assert_eq!(f.trace(f.pow(x, p as u64)), f.trace(x));
                for y in f.elements() {
                    assert_eq!(f.trace(f.add(x, y)), (f.trace(x) + f.trace(y)) % p);
                }
            }
            assert!(
                hit.iter().all(|&h| h),
                "trace not surjective for q={}",
                f.q()
            );
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields() {
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if let Some(ai) = f.inv(a) {
                    assert_eq!(f.mul(a, ai), f.one());
                }
                for b in f.elements() {
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_order_is_lexicographic_in_coords() {
        let f = FieldConfig::new(3, 2, None).unwrap();
        let coords: Vec<Vec<u32>> = f.elements().map(|x| f.coords(x)).collect();
        let mut sorted = coords.clone();
        sorted.sort();
        assert_eq!(coords, sorted);
        assert_eq!(f.coords(f.one()), vec![1, 0]);
    }
}
