//! The character matrix [e(g·x)] and the quadratic forms T and T′.

use num_complex::Complex64;
use rayon::prelude::*;

use super::ball::{exponent_row, BallIndex};
use crate::error::{Error, Result};
use crate::farey::FareyPoint;
use crate::gfpoly::FieldConfig;
use crate::laurent::root_of_unity;

/// Exponents of e(g·x) with one row per point x and one column per ball
/// element g. Products with complex vectors bucket the summands by exponent
/// class and realise the p roots of unity once per output entry.
#[derive(Debug, Clone)]
pub struct CharMatrix {
    rows: usize,
    cols: usize,
    p: usize,
    exps: Vec<u16>,
    roots: Vec<Complex64>,
}

impl CharMatrix {
    pub fn new(points: &[FareyPoint], ball: &BallIndex, cfg: &FieldConfig) -> Self {
        let rows: Vec<Vec<u16>> = points
            .par_iter()
            .map(|x| exponent_row(x.coords(), ball, cfg))
            .collect();
        let p = cfg.p() as usize;
        CharMatrix {
            rows: points.len(),
            cols: ball.len(),
            p,
            exps: rows.concat(),
            roots: (0..p as u32).map(|k| root_of_unity(k, p as u32)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn exponent(&self, row: usize, col: usize) -> u16 {
        self.exps[row * self.cols + col]
    }

    fn realise(&self, buckets: &[Complex64], conj: bool) -> Complex64 {
        buckets
            .iter()
            .zip(&self.roots)
            .fold(Complex64::new(0.0, 0.0), |acc, (b, w)| {
                acc + b * if conj { w.conj() } else { *w }
            })
    }

    /// (B a)_x = Σ_g a_g e(g·x).
    pub fn apply(&self, a: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(a.len(), self.cols);
        (0..self.rows)
            .into_par_iter()
            .map(|r| {
                let row = &self.exps[r * self.cols..(r + 1) * self.cols];
                let mut buckets = vec![Complex64::new(0.0, 0.0); self.p];
                for (&e, &ag) in row.iter().zip(a) {
                    buckets[e as usize] += ag;
                }
                self.realise(&buckets, false)
            })
            .collect()
    }

    /// Σ_x b_x e(±g·x) for every g; `conj` selects the adjoint B*.
    fn apply_columns(&self, b: &[Complex64], conj: bool) -> Vec<Complex64> {
        assert_eq!(b.len(), self.rows);
        let p = self.p;
        (0..self.cols)
            .into_par_iter()
            .with_min_len(64)
            .map(|g| {
                let mut buckets = vec![Complex64::new(0.0, 0.0); p];
                for (r, &bx) in b.iter().enumerate() {
                    buckets[self.exps[r * self.cols + g] as usize] += bx;
                }
                self.realise(&buckets, conj)
            })
            .collect()
    }

    /// (B^T b)_g = Σ_x b_x e(g·x).
    pub fn apply_transpose(&self, b: &[Complex64]) -> Vec<Complex64> {
        self.apply_columns(b, false)
    }

    /// (B* b)_g = Σ_x b_x conj(e(g·x)).
    pub fn apply_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        self.apply_columns(b, true)
    }
}

fn norm_sqr_sum(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// T = Σ_{x ∈ S} |Σ_{g ∈ ball} a_g e(g·x)|².
pub fn sieve_sum_t(
    points: &[FareyPoint],
    big_n: usize,
    a: &[Complex64],
    cfg: &FieldConfig,
) -> Result<f64> {
    let n = points.first().map_or(0, FareyPoint::dim);
    let ball = BallIndex::new(n, big_n, cfg)?;
    if a.len() != ball.len() {
        return Err(Error::LengthMismatch {
            expected: ball.len(),
            got: a.len(),
        });
    }
    let p = cfg.p();
    let inner: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let row = exponent_row(x.coords(), &ball, cfg);
            let mut buckets = vec![Complex64::new(0.0, 0.0); p as usize];
            for (&e, &ag) in row.iter().zip(a) {
                buckets[e as usize] += ag;
            }
            buckets
                .iter()
                .enumerate()
                .fold(Complex64::new(0.0, 0.0), |acc, (k, b)| {
                    acc + b * root_of_unity(k as u32, p)
                })
                .norm_sqr()
        })
        .collect();
    Ok(inner.iter().sum())
}

/// T′ = Σ_{g ∈ ball} |Σ_{x ∈ S} b_x e(g·x)|².
pub fn dual_sum_t(
    points: &[FareyPoint],
    big_n: usize,
    b: &[Complex64],
    cfg: &FieldConfig,
) -> Result<f64> {
    if b.len() != points.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            got: b.len(),
        });
    }
    let n = points.first().map_or(0, FareyPoint::dim);
    let ball = BallIndex::new(n, big_n, cfg)?;
    Ok(norm_sqr_sum(
        &CharMatrix::new(points, &ball, cfg).apply_transpose(b),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::{farey_set, ModuliFamily};
    use crate::laurent::torus_norm_tuple;
    use crate::rng::ComplexStream;
    use crate::sieve::char_ball_sum;

    #[test]
    fn sieve_sum_examples() {
        let cfg = FieldConfig::prime(2).unwrap();
        let s = farey_set(&ModuliFamily::full(1), 2, &cfg);
        let big_n = 1;
        let len = 4;
        let mut delta = vec![Complex64::new(0.0, 0.0); len];
        delta[0] = Complex64::new(1.0, 0.0);
        assert_eq!(
            sieve_sum_t(&s, big_n, &delta, &cfg).unwrap(),
            s.len() as f64
        );
        let zeros = vec![Complex64::new(0.0, 0.0); len];
        assert_eq!(sieve_sum_t(&s, big_n, &zeros, &cfg).unwrap(), 0.0);
        let ones = vec![Complex64::new(1.0, 0.0); len];
        let close = s
            .iter()
            .filter(|x| torus_norm_tuple(x.coords(), &cfg).at_most_inv_pow(big_n as i64 + 2))
            .count();
        let brute: f64 = s
            .iter()
            .map(|x| {
                char_ball_sum(x.coords(), big_n, &cfg)
                    .unwrap()
                    .to_complex()
                    .norm_sqr()
            })
            .sum();
        assert_eq!(sieve_sum_t(&s, big_n, &ones, &cfg).unwrap(), brute);
        assert_eq!(brute, 16.0 * close as f64);
        assert!(sieve_sum_t(&s, big_n, &ones[..3], &cfg).is_err());
    }

    #[test]
    fn dual_sum_examples() {
        let cfg = FieldConfig::prime(3).unwrap();
        let s = farey_set(&ModuliFamily::full(2), 1, &cfg);
        let big_n = 1;
        let mut b = vec![Complex64::new(0.0, 0.0); s.len()];
        assert_eq!(dual_sum_t(&s, big_n, &b, &cfg).unwrap(), 0.0);
        b[0] = Complex64::new(1.0, 0.0);
        assert!((dual_sum_t(&s, big_n, &b, &cfg).unwrap() - 81.0).abs() < 1e-9);
        let s0 = farey_set(&ModuliFamily::full(2), 0, &cfg);
        let b0 = [Complex64::new(0.5, -2.0)];
        let want = 81.0 * b0[0].norm_sqr();
        assert!((dual_sum_t(&s0, big_n, &b0, &cfg).unwrap() - want).abs() < 1e-9);
        assert!(dual_sum_t(&s, big_n, &b0, &cfg).is_err());
    }

    #[test]
    fn quadratic_form_consistency() {
        // T(a) = Σ_x |(B a)_x|² and T′(b) = ‖B^T b‖² against direct psi sums
        let cfg = FieldConfig::prime(3).unwrap();
        let s = farey_set(&ModuliFamily::full(1), 2, &cfg);
        let big_n = 1;
        let ball = BallIndex::new(1, big_n, &cfg).unwrap();
        let m = CharMatrix::new(&s, &ball, &cfg);
        let mut rng = ComplexStream::new(7);
        for _ in 0..5 {
            let a = rng.complex_vec(ball.len());
            let direct: f64 = s
                .iter()
                .map(|x| {
                    ball.points(&cfg)
                        .iter()
                        .zip(&a)
                        .map(|(g, ag)| {
                            ag * crate::laurent::psi(x.coords(), g, &cfg)
                                .unwrap()
                                .to_complex()
                        })
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum();
            let t = sieve_sum_t(&s, big_n, &a, &cfg).unwrap();
            assert!((t - direct).abs() <= 1e-9 * direct);
            assert!((norm_sqr_sum(&m.apply(&a)) - t).abs() <= 1e-9 * t);
        }
    }
}
