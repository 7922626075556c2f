//! The ball B(0, N) ∩ F_q[t]^n and exact character sums over it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gfpoly::{FieldConfig, Poly};
use crate::laurent::{expansion_digits, root_of_unity, Fraction};

/// Largest ball the lab will enumerate.
pub const MAX_BALL_SIZE: usize = 1 << 20;

/// Canonical indexing of n-tuples g with deg g_i ≤ N. The flat index is
/// Σ_{i,j} digit(g_i, t^j) · q^{i(N+1)+j}, i.e. little-endian counting with
/// coordinate 0's constant term least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallIndex {
    pub n: usize,
    pub big_n: usize,
    q: usize,
    len: usize,
}

impl BallIndex {
    pub fn new(n: usize, big_n: usize, cfg: &FieldConfig) -> Result<Self> {
        let q = cfg.q() as usize;
        let digits = n * (big_n + 1);
        let len = (q as u64)
            .checked_pow(digits as u32)
            .filter(|&l| l <= MAX_BALL_SIZE as u64)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "ball of size {q}^{digits} exceeds {MAX_BALL_SIZE} points"
                ))
            })? as usize;
        Ok(BallIndex { n, big_n, q, len })
    }

    /// q^{n(N+1)}.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn digits(&self) -> usize {
        self.n * (self.big_n + 1)
    }

    pub fn point(&self, mut idx: usize, cfg: &FieldConfig) -> Vec<Poly> {
        assert!(idx < self.len);
        (0..self.n)
            .map(|_| {
                let coeffs: Vec<usize> = (0..=self.big_n)
                    .map(|_| {
                        let d = idx % self.q;
                        idx /= self.q;
                        d
                    })
                    .collect();
                Poly::from_indices(cfg, &coeffs)
            })
            .collect()
    }

    pub fn points(&self, cfg: &FieldConfig) -> Vec<Vec<Poly>> {
        (0..self.len).map(|i| self.point(i, cfg)).collect()
    }
}

/// For each ball digit position (coordinate i, power t^j) the exponent
/// contribution Tr(g_{ij} · c^{(i)}_{j+1}) of every value of the digit, where
/// c^{(i)} are the expansion digits of x_i. The exponent of e(g·x) is the sum
/// of the contributions of g's digits mod p.
pub(crate) fn digit_contributions(
    x: &[Fraction],
    big_n: usize,
    cfg: &FieldConfig,
) -> Vec<Vec<u16>> {
    let mut out = Vec::with_capacity(x.len() * (big_n + 1));
    for xi in x {
        let c = expansion_digits(xi.num(), xi.den(), big_n + 1, cfg);
        for cj in c {
            out.push(
                cfg.elements()
                    .map(|g| cfg.trace(cfg.mul(g, cj)) as u16)
                    .collect(),
            );
        }
    }
    out
}

/// Exponents of e(g·x) for every g of the ball, in canonical index order.
pub fn exponent_row(x: &[Fraction], ball: &BallIndex, cfg: &FieldConfig) -> Vec<u16> {
    let p = cfg.p() as u16;
    let contrib = digit_contributions(x, ball.big_n, cfg);
    let mut row = Vec::with_capacity(ball.len());
    row.push(0u16);
    for table in &contrib {
        let low = row.len();
        for &add in &table[1..] {
            for k in 0..low {
                let e = row[k] + add;
                row.push(if e >= p { e - p } else { e });
            }
        }
    }
    debug_assert_eq!(row.len(), ball.len());
    row
}

/// Σ_{g ∈ ball} e(g·x), kept as the number of g in each exponent class mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSum {
    counts: Vec<u64>,
}

impl BallSum {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// The sum when it is a rational integer: always for p = 2, and whenever
    /// all nontrivial classes carry equal counts.
    pub fn as_integer(&self) -> Option<i128> {
        let p = self.counts.len();
        if p == 2 {
            return Some(self.counts[0] as i128 - self.counts[1] as i128);
        }
        let rest = &self.counts[1..];
        rest.windows(2)
            .all(|w| w[0] == w[1])
            .then(|| self.counts[0] as i128 - rest.first().copied().unwrap_or(0) as i128)
    }

    pub fn to_complex(&self) -> Complex64 {
        let p = self.counts.len() as u32;
        self.counts
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| {
                acc + root_of_unity(k as u32, p) * c as f64
            })
    }
}

/// Σ_{g ∈ B(0,N) ∩ F_q[t]^n} e(g·x), exactly. The ball is a product of its
/// digit positions and the exponent is additive over digits, so the class
/// counts are the mod-p convolution of per-digit class counts.
pub fn char_ball_sum(x: &[Fraction], big_n: usize, cfg: &FieldConfig) -> Result<BallSum> {
    for xi in x {
        if !xi.den().is_monic(cfg) || xi.num().degree() >= xi.den().degree() {
            return Err(Error::MalformedFraction(format!(
                "{}/{}",
                xi.num().display(cfg),
                xi.den().display(cfg)
            )));
        }
    }
    let p = cfg.p() as usize;
    let mut counts = vec![0u64; p];
    counts[0] = 1;
    let mut digit_counts = vec![0u64; p];
    for table in digit_contributions(x, big_n, cfg) {
        digit_counts.iter_mut().for_each(|c| *c = 0);
        for &e in &table {
            digit_counts[e as usize] += 1;
        }
        let mut next = vec![0u64; p];
        for (a, &ca) in counts.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (b, &cb) in digit_counts.iter().enumerate() {
                next[(a + b) % p] += ca * cb;
            }
        }
        counts = next;
    }
    Ok(BallSum { counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::{farey_set, ModuliFamily};
    use crate::laurent::psi;

    fn brute_counts(x: &[Fraction], big_n: usize, cfg: &FieldConfig) -> Vec<u64> {
        let ball = BallIndex::new(x.len(), big_n, cfg).unwrap();
        let mut counts = vec![0u64; cfg.p() as usize];
        for g in ball.points(cfg) {
            counts[psi(x, &g, cfg).unwrap().exponent() as usize] += 1;
        }
        counts
    }

    #[test]
    fn ball_enumeration() {
        let cfg = FieldConfig::prime(2).unwrap();
        let ball = BallIndex::new(1, 1, &cfg).unwrap();
        assert_eq!(ball.len(), 4);
        let pts: Vec<Poly> = ball
            .points(&cfg)
            .into_iter()
            .map(|g| g[0].clone())
            .collect();
        assert_eq!(
            pts,
            vec![
                Poly::zero(),
                Poly::one(&cfg),
                Poly::t(&cfg),
                Poly::from_indices(&cfg, &[1, 1])
            ]
        );
        let f3 = FieldConfig::prime(3).unwrap();
        assert_eq!(BallIndex::new(2, 1, &f3).unwrap().len(), 81);
        assert!(BallIndex::new(4, 20, &f3).is_err());
    }

    #[test]
    fn examples() {
        let cfg = FieldConfig::prime(2).unwrap();
        let t = Poly::t(&cfg);
        let zero = vec![Fraction::zero(&cfg); 2];
        for big_n in 0..3 {
            assert_eq!(
                char_ball_sum(&zero, big_n, &cfg).unwrap().as_integer(),
                Some(1 << (2 * (big_n + 1)))
            );
        }
        let inv_t = [Fraction::new(Poly::one(&cfg), t.clone(), &cfg).unwrap()];
        assert_eq!(
            char_ball_sum(&inv_t, 0, &cfg).unwrap().as_integer(),
            Some(0)
        );
        for big_n in 0..4 {
            let x = [Fraction::new(Poly::one(&cfg), t.pow(big_n as u32 + 2, &cfg), &cfg).unwrap()];
            assert_eq!(
                char_ball_sum(&x, big_n, &cfg).unwrap().as_integer(),
                Some(1 << (big_n + 1))
            );
        }
    }

    #[test]
    fn factorised_counts_match_brute_force() {
        for cfg in [
            FieldConfig::prime(2).unwrap(),
            FieldConfig::prime(3).unwrap(),
            FieldConfig::new(2, 2, None).unwrap(),
        ] {
            for n in 1..=2 {
                let s = farey_set(&ModuliFamily::full(n), 2, &cfg);
                for x in s.iter().step_by(7).take(40) {
                    for big_n in 0..2 {
                        let got = char_ball_sum(x.coords(), big_n, &cfg).unwrap();
                        assert_eq!(
                            got.counts(),
                            brute_counts(x.coords(), big_n, &cfg).as_slice()
                        );
                        let ball = BallIndex::new(n, big_n, &cfg).unwrap();
                        let row = exponent_row(x.coords(), &ball, &cfg);
                        let mut hist = vec![0u64; cfg.p() as usize];
                        for (i, &e) in row.iter().enumerate() {
                            hist[e as usize] += 1;
                            let g = ball.point(i, &cfg);
                            assert_eq!(psi(x.coords(), &g, &cfg).unwrap().exponent(), e as u32);
                        }
                        assert_eq!(hist, got.counts());
                    }
                }
            }
        }
    }

    #[test]
    fn malformed_fractions_are_unrepresentable() {
        let cfg = FieldConfig::prime(3).unwrap();
        let two_t = Poly::from_indices(&cfg, &[0, 2]);
        assert!(Fraction::new(Poly::one(&cfg), two_t, &cfg).is_err());
        // numerators are reduced on construction
        let x = Fraction::new(Poly::t(&cfg), Poly::one(&cfg), &cfg).unwrap();
        assert_eq!(char_ball_sum(&[x], 1, &cfg).unwrap().as_integer(), Some(9));
    }
}
