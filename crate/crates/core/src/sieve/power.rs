//! Largest eigenvalue of a Hermitian positive semidefinite operator by power
//! iteration.

use num_complex::Complex64;

use super::forms::CharMatrix;
use super::gram::GramMatrix;
use crate::error::{Error, Result};
use crate::rng::ComplexStream;

pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[Complex64]) -> Vec<Complex64>;
}

impl HermitianOperator for GramMatrix {
    fn dim(&self) -> usize {
        self.size()
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.mul_vec(v)
    }
}

/// B*B for a character matrix B, applied without forming it. This is the
/// ball-side operator of the form T: T(a) = ⟨a, B*B a⟩.
pub struct BallSideOperator<'a>(pub &'a CharMatrix);

impl HermitianOperator for BallSideOperator<'_> {
    fn dim(&self) -> usize {
        self.0.cols()
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.0.apply_adjoint(&self.0.apply(v))
    }
}

/// B B* for a character matrix B; the point-side operator of T′, equal to
/// the Gram matrix.
pub struct PointSideOperator<'a>(pub &'a CharMatrix);

impl HermitianOperator for PointSideOperator<'_> {
    fn dim(&self) -> usize {
        self.0.rows()
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.0.apply(&self.0.apply_adjoint(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIterationOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub restart_seed: u64,
}

impl Default for PowerIterationOptions {
    fn default() -> Self {
        PowerIterationOptions {
            tolerance: 1e-12,
            max_iterations: 100_000,
            seed: 0x5eed_0001,
            restart_seed: 0x5eed_0002,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    /// Rayleigh quotient at termination.
    pub value: f64,
    /// Unit vector attaining it.
    pub vector: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    pub restarted: bool,
}

fn normalise(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    norm
}

fn run<O: HermitianOperator + ?Sized>(
    op: &O,
    seed: u64,
    opts: &PowerIterationOptions,
) -> SpectralEstimate {
    let mut v = ComplexStream::new(seed).complex_vec(op.dim());
    normalise(&mut v);
    let mut prev = f64::NAN;
    for it in 1..=opts.max_iterations {
        let mut w = op.apply(&v);
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let norm = normalise(&mut w);
        if norm == 0.0 {
            // v lies in the kernel; for PSD input this means the operator is zero
            return SpectralEstimate {
                value: 0.0,
                vector: v,
                iterations: it,
                converged: true,
                restarted: false,
            };
        }
        if (rayleigh - prev).abs() <= opts.tolerance * rayleigh.abs() {
            return SpectralEstimate {
                value: rayleigh,
                vector: v,
                iterations: it,
                converged: true,
                restarted: false,
            };
        }
        prev = rayleigh;
        v = w;
    }
    SpectralEstimate {
        value: prev,
        vector: v,
        iterations: opts.max_iterations,
        converged: false,
        restarted: false,
    }
}

/// Largest eigenvalue of a Hermitian PSD operator. A run that exhausts its
/// iteration budget is repeated once from `restart_seed`; the larger
/// Rayleigh quotient wins.
pub fn operator_norm<O: HermitianOperator + ?Sized>(
    op: &O,
    opts: &PowerIterationOptions,
) -> SpectralEstimate {
    if op.dim() == 0 {
        return SpectralEstimate {
            value: 0.0,
            vector: Vec::new(),
            iterations: 0,
            converged: true,
            restarted: false,
        };
    }
    let first = run(op, opts.seed, opts);
    if first.converged {
        return first;
    }
    let mut second = run(op, opts.restart_seed, opts);
    second.restarted = true;
    second.iterations += first.iterations;
    if second.value < first.value {
        second.value = first.value;
        second.vector = first.vector;
    }
    second
}

/// Operator norm of a dense Gram matrix, after checking it is Hermitian.
pub fn gram_operator_norm(
    g: &GramMatrix,
    opts: &PowerIterationOptions,
) -> Result<SpectralEstimate> {
    let asym = g.relative_asymmetry();
    if asym > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(asym));
    }
    Ok(operator_norm(g, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense(size: usize, rows: Vec<Complex64>) -> GramMatrix {
        GramMatrix::from_rows(size, rows).unwrap()
    }

    #[test]
    fn one_by_one_and_diagonal() {
        let opts = PowerIterationOptions::default();
        let g = dense(1, vec![c(7.5, 0.0)]);
        assert!((gram_operator_norm(&g, &opts).unwrap().value - 7.5).abs() < 1e-12);
        let mut d = vec![c(0.0, 0.0); 16];
        for (i, v) in [3.0, 9.0, 1.0, 4.0].iter().enumerate() {
            d[i * 4 + i] = c(*v, 0.0);
        }
        let est = gram_operator_norm(&dense(4, d), &opts).unwrap();
        assert!((est.value - 9.0).abs() < 1e-9);
        assert!(est.converged);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[a, b], [conj b, d]]: λ = (tr + sqrt(tr² − 4 det)) / 2
        let cases = [
            (2.0, c(1.0, 1.0), 3.0),
            (5.0, c(0.0, -2.0), 1.0),
            (1.0, c(0.5, 0.0), 1.0),
        ];
        for (a, b, d) in cases {
            let g = dense(2, vec![c(a, 0.0), b, b.conj(), c(d, 0.0)]);
            let tr = a + d;
            let det = a * d - b.norm_sqr();
            let lam = (tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;
            let est = gram_operator_norm(&g, &PowerIterationOptions::default()).unwrap();
            assert!(
                (est.value - lam).abs() < 1e-10 * lam,
                "{} vs {}",
                est.value,
                lam
            );
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let g = dense(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            gram_operator_norm(&g, &PowerIterationOptions::default()),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn zero_matrix() {
        let g = dense(3, vec![c(0.0, 0.0); 9]);
        assert_eq!(
            gram_operator_norm(&g, &PowerIterationOptions::default())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn matches_dense_eigensolver() {
        let mut rng = ComplexStream::new(11);
        for size in [3usize, 8, 20] {
            // G = A A* is Hermitian PSD
            let a = DMatrix::from_fn(size, size + 2, |_, _| {
                let z = rng.next_complex();
                nalgebra::Complex::new(z.re, z.im)
            });
            let g = &a * a.adjoint();
            let eig = g.clone().symmetric_eigen();
            let top = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
            let rows: Vec<Complex64> = (0..size)
                .flat_map(|i| (0..size).map(move |j| (i, j)))
                .map(|(i, j)| c(g[(i, j)].re, g[(i, j)].im))
                .collect();
            let est =
                gram_operator_norm(&dense(size, rows), &PowerIterationOptions::default()).unwrap();
            assert!(
                (est.value - top).abs() <= 1e-10 * top,
                "{} vs {top}",
                est.value
            );
        }
    }

    #[test]
    fn budget_exhaustion_triggers_restart() {
        let opts = PowerIterationOptions {
            max_iterations: 2,
            ..PowerIterationOptions::default()
        };
        let g = dense(
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.999, 0.0)],
        );
        let est = operator_norm(&g, &opts);
        assert!(est.restarted && !est.converged);
        assert_eq!(est.iterations, 4);
    }
}
