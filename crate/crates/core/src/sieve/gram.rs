use num_complex::Complex64;
use rayon::prelude::*;

use super::ball::{char_ball_sum, BallIndex};
use crate::error::{Error, Result};
use crate::farey::FareyPoint;
use crate::gfpoly::FieldConfig;

/// Dense Hermitian matrix of ball character sums, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    size: usize,
    data: Vec<Complex64>,
}

impl GramMatrix {
    pub fn from_rows(size: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != size * size {
            return Err(Error::LengthMismatch {
                expected: size * size,
                got: data.len(),
            });
        }
        Ok(GramMatrix { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn trace(&self) -> f64 {
        (0..self.size).map(|i| self.get(i, i).re).sum()
    }

    /// max |G_ij − conj(G_ji)| / max |G_ij|.
    pub fn relative_asymmetry(&self) -> f64 {
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for i in 0..self.size {
            for j in 0..self.size {
                scale = scale.max(self.get(i, j).norm());
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .par_chunks(self.size.max(1))
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// G_ij = Σ_{g ∈ ball} e(g·(x_i − x_j)), with each coordinate difference
/// reduced over lcm(f_i, f̃_i). The upper triangle is computed, the lower
/// filled by conjugation.
pub fn gram_matrix(points: &[FareyPoint], big_n: usize, cfg: &FieldConfig) -> Result<GramMatrix> {
    let r = points.len();
    if let Some(x) = points.first() {
        BallIndex::new(x.dim(), big_n, cfg)?;
    }
    let upper: Vec<Vec<Complex64>> = (0..r)
        .into_par_iter()
        .map(|i| {
            (i..r)
                .map(|j| {
                    let diff = points[i].sub(&points[j], cfg);
                    char_ball_sum(&diff, big_n, cfg).map(|s| s.to_complex())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut data = vec![Complex64::new(0.0, 0.0); r * r];
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + off;
            data[i * r + j] = v;
            data[j * r + i] = v.conj();
        }
    }
    Ok(GramMatrix { size: r, data })
}
