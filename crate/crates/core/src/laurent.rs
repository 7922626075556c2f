//! Truncated Laurent expansions at infinity and the additive characters.
//!
//! A rational function r/f is always handled as a (numerator, monic
//! denominator) pair. Only its class modulo F_q[t] matters to the characters
//! and the torus norm, so [`Fraction`] keeps the numerator reduced mod f.
//!
//! Character values are exact exponents mod p; the complex value
//! exp(2πi·k/p) is produced only when a caller sums them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gfpoly::{FieldConfig, FieldElement, Poly};

/// A point of the one-dimensional torus F_q(t)_∞ / F_q[t] with rational
/// representative num/den, den monic, deg num < deg den.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    num: Poly,
    den: Poly,
}

impl Fraction {
    pub fn new(num: Poly, den: Poly, cfg: &FieldConfig) -> Result<Self> {
        check_denominator(&den, cfg)?;
        let num = num.rem(&den, cfg)?;
        Ok(Fraction { num, den })
    }

    pub fn zero(cfg: &FieldConfig) -> Self {
        Fraction {
            num: Poly::zero(),
            den: Poly::one(cfg),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// gcd(num, den) = 1.
    pub fn is_reduced(&self, cfg: &FieldConfig) -> bool {
        self.num.gcd(&self.den, cfg).is_one(cfg)
    }

    /// Difference over the common denominator lcm(f, f̃), numerator reduced
    /// mod the lcm but not cancelled further.
    pub fn sub(&self, other: &Fraction, cfg: &FieldConfig) -> Fraction {
        let l = self
            .den
            .lcm(&other.den, cfg)
            .expect("denominators are nonzero");
        let a = l.div_rem(&self.den, cfg).expect("nonzero").0;
        let b = l.div_rem(&other.den, cfg).expect("nonzero").0;
        let num = self
            .num
            .mul(&a, cfg)
            .sub(&other.num.mul(&b, cfg), cfg)
            .rem(&l, cfg)
            .expect("nonzero");
        Fraction { num, den: l }
    }

    /// g · (num/den) for a polynomial g.
    pub fn scale(&self, g: &Poly, cfg: &FieldConfig) -> Fraction {
        Fraction {
            num: g.mul(&self.num, cfg).rem(&self.den, cfg).expect("nonzero"),
            den: self.den.clone(),
        }
    }
}

fn check_denominator(f: &Poly, cfg: &FieldConfig) -> Result<()> {
    if f.is_monic(cfg) {
        Ok(())
    } else {
        Err(Error::NonMonicDenominator)
    }
}

/// Coefficients c_1, …, c_D of t^{−1}, …, t^{−D} in the expansion of r/f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracExpansion {
    coeffs: Vec<FieldElement>,
}

impl FracExpansion {
    pub fn depth(&self) -> usize {
        self.coeffs.len()
    }

    /// c_j for 1 ≤ j ≤ depth.
    pub fn coeff(&self, j: usize) -> FieldElement {
        assert!(j >= 1 && j <= self.coeffs.len(), "c_{j} outside depth");
        self.coeffs[j - 1]
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }
}

/// Long division of (r mod f)·t^D by f; the quotient digits are c_1, …, c_D.
pub fn frac_expansion(
    r: &Poly,
    f: &Poly,
    depth: usize,
    cfg: &FieldConfig,
) -> Result<FracExpansion> {
    check_denominator(f, cfg)?;
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    let s = r.rem(f, cfg)?;
    Ok(FracExpansion {
        coeffs: expansion_digits(&s, f, depth, cfg),
    })
}

/// Digits of s/f for deg s < deg f, f monic. Each step multiplies the running
/// remainder by t and peels off the t^{deg f} coefficient.
pub(crate) fn expansion_digits(
    s: &Poly,
    f: &Poly,
    depth: usize,
    cfg: &FieldConfig,
) -> Vec<FieldElement> {
    let d = f.deg();
    let fc = f.coeffs();
    let mut rem = vec![FieldElement::ZERO; d];
    rem[..s.coeffs().len()].copy_from_slice(s.coeffs());
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        if d == 0 {
            out.push(FieldElement::ZERO);
            continue;
        }
        let top = rem[d - 1];
        rem.copy_within(0..d - 1, 1);
        rem[0] = FieldElement::ZERO;
        if !top.is_zero() {
            for (slot, &fj) in rem.iter_mut().zip(fc) {
                *slot = cfg.sub(*slot, cfg.mul(top, fj));
            }
        }
        out.push(top);
    }
    out
}

/// A value exp(2πi·exponent/p) of an additive character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharValue {
    exponent: u32,
    p: u32,
}

impl CharValue {
    pub fn new(exponent: u32, p: u32) -> Self {
        CharValue {
            exponent: exponent % p,
            p,
        }
    }

    pub fn trivial(p: u32) -> Self {
        CharValue { exponent: 0, p }
    }

    pub fn exponent(self) -> u32 {
        self.exponent
    }

    pub fn is_trivial(self) -> bool {
        self.exponent == 0
    }

    /// Product of character values.
    pub fn times(self, other: CharValue) -> CharValue {
        CharValue::new(self.exponent + other.exponent, self.p)
    }

    pub fn to_complex(self) -> Complex64 {
        root_of_unity(self.exponent, self.p)
    }
}

pub fn root_of_unity(k: u32, p: u32) -> Complex64 {
    match (k % p, p) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (k, p) => Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / p as f64),
    }
}

/// E(x) = exp(2πi Tr(x)/p).
pub fn base_char(x: FieldElement, cfg: &FieldConfig) -> CharValue {
    CharValue::new(cfg.trace(x), cfg.p())
}

/// e(r/f) = E(c_1).
pub fn e_char(r: &Poly, f: &Poly, cfg: &FieldConfig) -> Result<CharValue> {
    let c1 = frac_expansion(r, f, 1, cfg)?.coeff(1);
    Ok(base_char(c1, cfg))
}

/// Ψ_x(g) = Π_i e(g_i · r_i / f_i).
pub fn psi(x: &[Fraction], g: &[Poly], cfg: &FieldConfig) -> Result<CharValue> {
    if x.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: g.len(),
        });
    }
    x.iter()
        .zip(g)
        .try_fold(CharValue::trivial(cfg.p()), |acc, (xi, gi)| {
            Ok(acc.times(e_char(&gi.mul(xi.num(), cfg), xi.den(), cfg)?))
        })
}

/// The torus norm of r/f: zero, or q^{−j} with j ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TorusNorm {
    Zero,
    /// q^{−j}
    InvPow(u32),
}

impl TorusNorm {
    /// ‖·‖ ≤ q^{−n} (n may be ≤ 0).
    pub fn at_most_inv_pow(self, n: i64) -> bool {
        match self {
            TorusNorm::Zero => true,
            TorusNorm::InvPow(j) => j as i64 >= n,
        }
    }

    pub fn to_f64(self, q: u32) -> f64 {
        match self {
            TorusNorm::Zero => 0.0,
            TorusNorm::InvPow(j) => (q as f64).powi(-(j as i32)),
        }
    }
}

impl PartialOrd for TorusNorm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TorusNorm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use TorusNorm::*;
        match (self, other) {
            (Zero, Zero) => std::cmp::Ordering::Equal,
            (Zero, _) => std::cmp::Ordering::Less,
            (_, Zero) => std::cmp::Ordering::Greater,
            (InvPow(a), InvPow(b)) => b.cmp(a),
        }
    }
}

/// ‖r/f‖ = q^{deg(r mod f) − deg f}, or zero when f | r.
pub fn torus_norm(r: &Poly, f: &Poly, cfg: &FieldConfig) -> Result<TorusNorm> {
    check_denominator(f, cfg)?;
    let s = r.rem(f, cfg)?;
    Ok(match s.degree().finite() {
        None => TorusNorm::Zero,
        Some(ds) => TorusNorm::InvPow((f.deg() as i64 - ds) as u32),
    })
}

/// Sup norm over coordinates.
pub fn torus_norm_tuple(x: &[Fraction], cfg: &FieldConfig) -> TorusNorm {
    x.iter()
        .map(|xi| torus_norm(xi.num(), xi.den(), cfg).expect("fraction denominators are monic"))
        .max()
        .unwrap_or(TorusNorm::Zero)
}
