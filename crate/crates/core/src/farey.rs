//! Restricted Farey sets S_Q over F_q[t]^n and the closeness count M(Q, N).

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gfpoly::{enumerate_monic_up_to, enumerate_up_to, euler_phi, FieldConfig, Poly};
use crate::laurent::Fraction;

/// Which denominator tuples are admitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyKind {
    /// All monic tuples.
    Full,
    /// Coordinatewise k-th powers f^k of monic base tuples f.
    KthPower(u32),
    /// A fixed list of monic denominator tuples.
    Explicit(Vec<Vec<Poly>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuliFamily {
    pub kind: FamilyKind,
    pub n: usize,
}

impl ModuliFamily {
    pub fn full(n: usize) -> Self {
        ModuliFamily {
            kind: FamilyKind::Full,
            n,
        }
    }

    pub fn kth_power(k: u32, n: usize) -> Self {
        ModuliFamily {
            kind: FamilyKind::KthPower(k),
            n,
        }
    }

    pub fn explicit(tuples: Vec<Vec<Poly>>, n: usize, cfg: &FieldConfig) -> Result<Self> {
        for t in &tuples {
            if t.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.len(),
                });
            }
            if !t.iter().all(|f| f.is_monic(cfg)) {
                return Err(Error::NonMonicDenominator);
            }
        }
        Ok(ModuliFamily {
            kind: FamilyKind::Explicit(tuples),
            n,
        })
    }

    /// The power applied to base tuples (1 unless `KthPower`).
    pub fn power(&self) -> u32 {
        match self.kind {
            FamilyKind::KthPower(k) => k,
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            FamilyKind::Full => "full".into(),
            FamilyKind::KthPower(k) => format!("kpower{k}"),
            FamilyKind::Explicit(_) => "explicit".into(),
        }
    }
}

/// One admitted denominator tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusTuple {
    /// Base tuple f (equal to `moduli` except for k-th power families).
    pub base: Vec<Poly>,
    pub moduli: Vec<Poly>,
    /// deg lcm of the base tuple; this is what Q bounds.
    pub base_lcm_degree: usize,
    /// deg lcm of the moduli, the order of the character.
    pub lcm_degree: usize,
}

pub fn lcm_all(fs: &[Poly], cfg: &FieldConfig) -> Poly {
    fs.iter().fold(Poly::one(cfg), |acc, f| {
        acc.lcm(f, cfg).expect("denominators are nonzero")
    })
}

/// All monic n-tuples with each coordinate of degree ≤ `max_degree`,
/// coordinate 0 varying slowest.
pub fn monic_tuples(n: usize, max_degree: usize, cfg: &FieldConfig) -> Vec<Vec<Poly>> {
    let monics = enumerate_monic_up_to(max_degree, cfg);
    let mut out: Vec<Vec<Poly>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                monics.iter().map(move |f| {
                    let mut t = prefix.clone();
                    t.push(f.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Monic n-tuples with deg lcm ≤ `q_bound`, canonical order.
pub fn monic_tuples_lcm_bounded(n: usize, q_bound: usize, cfg: &FieldConfig) -> Vec<Vec<Poly>> {
    monic_tuples(n, q_bound, cfg)
        .into_iter()
        .filter(|t| lcm_all(t, cfg).deg() <= q_bound)
        .collect()
}

pub fn enumerate_moduli(
    family: &ModuliFamily,
    q_bound: usize,
    cfg: &FieldConfig,
) -> Vec<ModulusTuple> {
    let k = family.power();
    let bases: Vec<Vec<Poly>> = match &family.kind {
        FamilyKind::Full | FamilyKind::KthPower(_) => {
            monic_tuples_lcm_bounded(family.n, q_bound, cfg)
        }
        FamilyKind::Explicit(list) => list
            .iter()
            .filter(|t| lcm_all(t, cfg).deg() <= q_bound)
            .cloned()
            .collect(),
    };
    bases
        .into_iter()
        .map(|base| {
            let moduli: Vec<Poly> = base.iter().map(|f| f.pow(k, cfg)).collect();
            ModulusTuple {
                base_lcm_degree: lcm_all(&base, cfg).deg(),
                lcm_degree: lcm_all(&moduli, cfg).deg(),
                base,
                moduli,
            }
        })
        .collect()
}

/// A reduced point r/f of the torus T^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FareyPoint {
    coords: Vec<Fraction>,
    base: Vec<Poly>,
    lcm_degree: usize,
}

impl FareyPoint {
    pub fn new(coords: Vec<Fraction>, base: Vec<Poly>, cfg: &FieldConfig) -> Result<Self> {
        if coords.len() != base.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.len(),
                got: base.len(),
            });
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_reduced(cfg)) {
            return Err(Error::MalformedFraction(format!(
                "{}/{}",
                bad.num().display(cfg),
                bad.den().display(cfg)
            )));
        }
        let dens: Vec<Poly> = coords.iter().map(|c| c.den().clone()).collect();
        Ok(FareyPoint {
            lcm_degree: lcm_all(&dens, cfg).deg(),
            coords,
            base,
        })
    }

    /// The all-zero point with denominators 1.
    pub fn zero(n: usize, cfg: &FieldConfig) -> Self {
        FareyPoint {
            coords: vec![Fraction::zero(cfg); n],
            base: vec![Poly::one(cfg); n],
            lcm_degree: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Fraction] {
        &self.coords
    }

    pub fn base(&self) -> &[Poly] {
        &self.base
    }

    /// deg lcm(f_1, …, f_n), the order of the character r/f.
    pub fn lcm_degree(&self) -> usize {
        self.lcm_degree
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Fraction::is_zero)
    }

    /// Coordinatewise difference over lcm denominators.
    pub fn sub(&self, other: &FareyPoint, cfg: &FieldConfig) -> Vec<Fraction> {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.sub(b, cfg))
            .collect()
    }

    pub fn denominators_string(&self, cfg: &FieldConfig) -> String {
        self.coords
            .iter()
            .map(|c| c.den().display(cfg))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn numerators_string(&self, cfg: &FieldConfig) -> String {
        self.coords
            .iter()
            .map(|c| c.num().display(cfg))
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn units_mod(modulus: &Poly, base: &Poly, cfg: &FieldConfig) -> Vec<Poly> {
    if modulus.deg() == 0 {
        return vec![Poly::zero()];
    }
    enumerate_up_to(modulus.deg() - 1, cfg)
        .into_iter()
        .filter(|r| r.gcd(base, cfg).is_one(cfg))
        .collect()
}

/// The Farey set S_Q of the family.
pub fn farey_set(family: &ModuliFamily, q_bound: usize, cfg: &FieldConfig) -> Vec<FareyPoint> {
    let mut out = Vec::new();
    for m in enumerate_moduli(family, q_bound, cfg) {
        let residues: Vec<Vec<Poly>> = m
            .moduli
            .iter()
            .zip(&m.base)
            .map(|(f, b)| units_mod(f, b, cfg))
            .collect();
        let mut idx = vec![0usize; family.n];
        'outer: loop {
            let coords = (0..family.n)
                .map(|i| Fraction::new(residues[i][idx[i]].clone(), m.moduli[i].clone(), cfg))
                .collect::<Result<Vec<_>>>()
                .expect("moduli are monic");
            out.push(FareyPoint {
                coords,
                base: m.base.clone(),
                lcm_degree: m.lcm_degree,
            });
            // coordinate 0 varies slowest
            for i in (0..family.n).rev() {
                idx[i] += 1;
                if idx[i] < residues[i].len() {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
    }
    out
}

/// Σ over admitted moduli of Π_i φ(f_i), the expected |S_Q|.
pub fn expected_cardinality(
    family: &ModuliFamily,
    q_bound: usize,
    cfg: &FieldConfig,
) -> Result<u64> {
    let mut total = 0u64;
    for m in enumerate_moduli(family, q_bound, cfg) {
        let mut prod = 1u64;
        for f in &m.moduli {
            prod *= euler_phi(f, cfg)?;
        }
        total += prod;
    }
    Ok(total)
}

/// ‖x̃ − x‖ ≤ q^{−N}, decided coordinatewise by
/// |r̃_i f_i − r_i f̃_i| ≤ q^{deg f_i + deg f̃_i − N}.
pub fn close_pair(x: &FareyPoint, y: &FareyPoint, big_n: i64, cfg: &FieldConfig) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(x.coords.iter().zip(&y.coords).all(|(a, b)| {
        let cross = b
            .num()
            .mul(a.den(), cfg)
            .sub(&a.num().mul(b.den(), cfg), cfg);
        cross
            .degree()
            .at_most(a.den().deg() as i64 + b.den().deg() as i64 - big_n)
    }))
}

/// Number of points of S within distance q^{−N} of each point (itself included).
pub fn closeness_counts(points: &[FareyPoint], big_n: i64, cfg: &FieldConfig) -> Vec<usize> {
    points
        .par_iter()
        .map(|x| {
            points
                .iter()
                .filter(|y| close_pair(x, y, big_n, cfg).expect("same dimension"))
                .count()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountM {
    pub value: usize,
    /// Index of the first maximising point in canonical order.
    pub argmax: usize,
}

/// M = max_x #{x̃ ∈ S : ‖x̃ − x‖ ≤ q^{−N}}.
pub fn count_m(points: &[FareyPoint], big_n: i64, cfg: &FieldConfig) -> CountM {
    max_first(&closeness_counts(points, big_n, cfg))
}

pub fn count_m_family(
    family: &ModuliFamily,
    q_bound: usize,
    big_n: i64,
    cfg: &FieldConfig,
) -> CountM {
    count_m(&farey_set(family, q_bound, cfg), big_n, cfg)
}

pub(crate) fn max_first(counts: &[usize]) -> CountM {
    let mut best = CountM {
        value: 0,
        argmax: 0,
    };
    for (i, &c) in counts.iter().enumerate() {
        if c > best.value {
            best = CountM {
                value: c,
                argmax: i,
            };
        }
    }
    best
}

/// Writes `index,f,r,lcm_degree,count` rows. Tuple coordinates are separated
/// by `;`.
pub fn write_csv<W: Write>(
    mut w: W,
    points: &[FareyPoint],
    counts: &[usize],
    cfg: &FieldConfig,
) -> io::Result<()> {
    writeln!(w, "index,f,r,lcm_degree,count")?;
    for (i, (x, c)) in points.iter().zip(counts).enumerate() {
        writeln!(
            w,
            "{i},{},{},{},{c}",
            x.denominators_string(cfg),
            x.numerators_string(cfg),
            x.lcm_degree
        )?;
    }
    Ok(())
}
