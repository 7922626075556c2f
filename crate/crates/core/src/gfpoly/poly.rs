//! Dense univariate polynomials over F_q.

use std::cmp::Ordering;
use std::fmt;

use super::field::{FieldConfig, FieldElement};
use crate::error::{Error, Result};

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`,
/// which compares below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// `self <= bound` for an integer bound.
    pub fn at_most(self, bound: i64) -> bool {
        self <= Degree::Finite(bound)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Polynomial in t, coefficients little-endian with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Ord for Poly {
    // Little-endian coefficient counting: longer is larger, then compare from
    // the leading coefficient down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(cfg: &FieldConfig) -> Self {
        Poly::constant(cfg.one())
    }

    pub fn constant(c: FieldElement) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The polynomial t.
    pub fn t(cfg: &FieldConfig) -> Self {
        Poly::monomial(cfg.one(), 1)
    }

    pub fn monomial(c: FieldElement, degree: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; degree + 1];
        coeffs[degree] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Builds a polynomial from canonical element indices, little-endian.
    pub fn from_indices(cfg: &FieldConfig, indices: &[usize]) -> Self {
        Poly::from_coeffs(indices.iter().map(|&i| cfg.element(i)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of t^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n as i64 - 1),
        }
    }

    /// Degree of a nonzero polynomial; 0 for the zero polynomial. Use where
    /// the argument is known to be nonzero (denominators).
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self, cfg: &FieldConfig) -> bool {
        self.leading() == Some(cfg.one())
    }

    pub fn is_one(&self, cfg: &FieldConfig) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == cfg.one()
    }

    pub fn add(&self, other: &Poly, cfg: &FieldConfig) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| cfg.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly, cfg: &FieldConfig) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| cfg.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self, cfg: &FieldConfig) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| cfg.neg(c)).collect())
    }

    pub fn scale(&self, c: FieldElement, cfg: &FieldConfig) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| cfg.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, cfg: &FieldConfig) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = cfg.add(out[i + j], cfg.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, mut e: u32, cfg: &FieldConfig) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(cfg);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, cfg);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, cfg);
            }
        }
        acc
    }

    /// Euclidean division: `self = quot * divisor + rem`, `deg rem < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly, cfg: &FieldConfig) -> Result<(Poly, Poly)> {
        let lead = divisor.leading().ok_or(Error::DivisionByZero)?;
        let lead_inv = cfg.inv(lead).expect("leading coefficient is nonzero");
        let db = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - db];
        for shift in (0..quot.len()).rev() {
            let c = cfg.mul(rem[shift + db], lead_inv);
            quot[shift] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = cfg.sub(rem[shift + j], cfg.mul(c, b));
            }
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Poly, cfg: &FieldConfig) -> Result<Poly> {
        Ok(self.div_rem(divisor, cfg)?.1)
    }

    pub fn divides(&self, other: &Poly, cfg: &FieldConfig) -> Result<bool> {
        Ok(other.rem(self, cfg)?.is_zero())
    }

    /// Scales to leading coefficient 1; zero stays zero.
    pub fn monic(&self, cfg: &FieldConfig) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(cfg.inv(l).expect("nonzero"), cfg),
        }
    }

    /// Monic generator of the ideal (self, other); gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly, cfg: &FieldConfig) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, cfg).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic(cfg)
    }

    pub fn lcm(&self, other: &Poly, cfg: &FieldConfig) -> Result<Poly> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::LcmWithZero);
        }
        let g = self.gcd(other, cfg);
        let (quot, _) = self.mul(other, cfg).div_rem(&g, cfg)?;
        Ok(quot.monic(cfg))
    }

    /// Human-readable form, e.g. `t^2+t+1`. Over extension fields a
    /// coefficient is written as its coordinate polynomial in x.
    pub fn display(&self, cfg: &FieldConfig) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = element_string(c, cfg);
            let needs_parens = coeff.contains('+');
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (c == cfg.one(), i) {
                (true, 0) => "1".to_string(),
                (true, _) => mono,
                (false, 0) => coeff,
                (false, _) if needs_parens => format!("({coeff}){mono}"),
                (false, _) => format!("{coeff}{mono}"),
            });
        }
        terms.join("+")
    }
}

fn element_string(c: FieldElement, cfg: &FieldConfig) -> String {
    let coords = cfg.coords(c);
    if cfg.m() == 1 {
        return coords[0].to_string();
    }
    let mut parts = Vec::new();
    for (i, &a) in coords.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        parts.push(match (a, i) {
            (_, 0) => a.to_string(),
            (1, _) => mono,
            _ => format!("{a}{mono}"),
        });
    }
    parts.join("+")
}

/// All polynomials of degree ≤ `max_degree` (including zero), in canonical
/// little-endian counting order; `q^{max_degree+1}` entries.
pub fn enumerate_up_to(max_degree: usize, cfg: &FieldConfig) -> Vec<Poly> {
    let q = cfg.q() as usize;
    let len = max_degree + 1;
    let total = q.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; len];
    for _ in 0..total {
        out.push(Poly::from_indices(cfg, &digits));
        increment(&mut digits, q);
    }
    out
}

/// All monic polynomials of degree exactly `d`, in canonical order.
pub fn enumerate_monic(d: usize, cfg: &FieldConfig) -> Vec<Poly> {
    let q = cfg.q() as usize;
    let total = q.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; d];
    for _ in 0..total {
        let mut coeffs: Vec<FieldElement> = digits.iter().map(|&i| cfg.element(i)).collect();
        coeffs.push(cfg.one());
        out.push(Poly::from_coeffs(coeffs));
        increment(&mut digits, q);
    }
    out
}

/// All monic polynomials of degree ≤ `d`, by degree then canonical order.
pub fn enumerate_monic_up_to(d: usize, cfg: &FieldConfig) -> Vec<Poly> {
    (0..=d).flat_map(|k| enumerate_monic(k, cfg)).collect()
}

fn increment(digits: &mut [usize], base: usize) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

/// Factorization of a monic polynomial into monic irreducibles with
/// multiplicities, by trial division in canonical order.
pub fn factor(f: &Poly, cfg: &FieldConfig) -> Result<Vec<(Poly, u32)>> {
    if f.is_zero() || !f.is_monic(cfg) {
        return Err(Error::NonMonicDenominator);
    }
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut d = 1;
    while 2 * d <= rest.deg() {
        for cand in enumerate_monic(d, cfg) {
            let mut e = 0;
            loop {
                let (quot, r) = rest.div_rem(&cand, cfg)?;
                if !r.is_zero() {
                    break;
                }
                rest = quot;
                e += 1;
            }
            if e > 0 {
                out.push((cand, e));
            }
        }
        d += 1;
    }
    if rest.deg() > 0 {
        // no factor of degree ≤ deg/2 remains, so `rest` is irreducible
        match out.iter_mut().find(|(p, _)| *p == rest) {
            Some((_, e)) => *e += 1,
            None => out.push((rest, 1)),
        }
    }
    out.sort();
    Ok(out)
}

/// #{r : deg r < deg f, gcd(r, f) = 1} via the product formula.
pub fn euler_phi(f: &Poly, cfg: &FieldConfig) -> Result<u64> {
    let q = cfg.q() as u64;
    let mut phi = 1u64;
    for (p, e) in factor(f, cfg)? {
        let qd = q.pow(p.deg() as u32);
        phi = phi
            .checked_mul(qd.pow(e - 1) * (qd - 1))
            .expect("Euler phi overflows u64");
    }
    Ok(phi)
}
