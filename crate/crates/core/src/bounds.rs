//! Explicit and asymptotic large sieve bounds, and the weighted denominator
//! count M̃.
//!
//! Everything with a negative power of q is kept as an exact rational so a
//! comparison never fails on rounding. The asymptotic bounds carry an
//! unknown constant; they are evaluated with constant 1 and only the
//! observed ratio is reported.

use std::collections::HashMap;

use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::farey::{enumerate_moduli, lcm_all, monic_tuples_lcm_bounded, FamilyKind, ModuliFamily};
use crate::gfpoly::{enumerate_monic_up_to, FieldConfig, Poly};
use crate::sieve::{Violation, FORM_GUARD};

/// base^exp for any integer exponent.
pub fn rational_pow(base: u64, exp: i64) -> BigRational {
    let mag = BigInt::from(base).pow(exp.unsigned_abs() as u32);
    if exp >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Σ_{f̃} Π_i (δ(f_i, f̃_i)·q^a + q^{e_i(f̃)}) over a fixed list of tuples f̃,
/// evaluated for many f. Expanding the product over the set J of matching
/// coordinates turns each evaluation into 2^n table lookups:
/// Σ_J q^{a|J|} · Σ_{f̃ agreeing with f on J} Π_{i∉J} q^{e_i(f̃)}.
struct MatchTable {
    n: usize,
    ids: HashMap<Poly, u32>,
    delta_pows: Vec<BigInt>,
    by_mask: Vec<HashMap<Vec<u32>, BigInt>>,
}

impl MatchTable {
    fn new(
        tuples: &[Vec<Poly>],
        exps: impl Fn(&Poly) -> u32,
        delta_exp: u32,
        q: u64,
        n: usize,
    ) -> Self {
        let mut ids = HashMap::new();
        let mut by_mask = vec![HashMap::new(); 1 << n];
        for t in tuples {
            let key: Vec<u32> = t
                .iter()
                .map(|f| {
                    let next = ids.len() as u32;
                    *ids.entry(f.clone()).or_insert(next)
                })
                .collect();
            let w: Vec<BigInt> = t.iter().map(|f| BigInt::from(q).pow(exps(f))).collect();
            for (mask, map) in by_mask.iter_mut().enumerate() {
                let sub: Vec<u32> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| key[i])
                    .collect();
                let tail = (0..n)
                    .filter(|i| mask >> i & 1 == 0)
                    .fold(BigInt::one(), |acc, i| acc * &w[i]);
                *map.entry(sub).or_insert_with(BigInt::zero) += tail;
            }
        }
        let delta = BigInt::from(q).pow(delta_exp);
        let delta_pows = (0..=n).scan(BigInt::one(), |acc, _| {
            let cur = acc.clone();
            *acc *= &delta;
            Some(cur)
        });
        MatchTable {
            n,
            ids,
            delta_pows: delta_pows.collect(),
            by_mask,
        }
    }

    fn eval(&self, f: &[Poly]) -> BigInt {
        let key: Vec<Option<u32>> = f[..self.n]
            .iter()
            .map(|p| self.ids.get(p).copied())
            .collect();
        let mut total = BigInt::zero();
        'masks: for (mask, map) in self.by_mask.iter().enumerate() {
            let mut sub = Vec::new();
            for (i, id) in key.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    match id {
                        Some(id) => sub.push(*id),
                        None => continue 'masks,
                    }
                }
            }
            if let Some(v) = map.get(&sub) {
                total += &self.delta_pows[mask.count_ones() as usize] * v;
            }
        }
        total
    }
}

/// q^{n(N+1)} · M: the bound that follows from the closeness count alone.
pub fn bound_tineq(n: usize, big_n: usize, m: usize, cfg: &FieldConfig) -> BigRational {
    rational_pow(cfg.q() as u64, (n * (big_n + 1)) as i64) * BigRational::from_integer(m.into())
}

/// q^{N+1} + (#moduli) · q^{d−1}, where d bounds the degree of the moduli.
pub fn bound_dim1(
    moduli_count: usize,
    moduli_degree: usize,
    big_n: usize,
    cfg: &FieldConfig,
) -> BigRational {
    let q = cfg.q() as u64;
    rational_pow(q, big_n as i64 + 1)
        + BigRational::from_integer(moduli_count.into()) * rational_pow(q, moduli_degree as i64 - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralBound {
    /// q^{n(N+1)} · max over all admissible f of the weighted sum.
    pub value: BigRational,
    /// The same maximum taken only over f with deg lcm(f) ≤ Q.
    pub restricted_value: BigRational,
    pub argmax: Vec<Poly>,
    /// True when no maximiser has deg lcm ≤ Q.
    pub argmax_outside: bool,
}

/// q^{n(N+1)} · max_f Σ_{f̃} Π_i (δ(f_i, f̃_i) + q^{deg f̃_i − (N+2)}), with f̃
/// over the moduli of S_Q. The maximum over f is unrestricted: for full and
/// power families every coordinate may be any admissible modulus of base
/// degree ≤ Q (larger coordinates never match and are dominated), for an
/// explicit family f ranges over the whole list.
///
/// Not a true upper bound: the residue count behind it is short by a factor
/// q, and Δ_opt exceeds it at q=2, n=1, Q=2, N=1 (16 > 29/2).
pub fn bound_general(
    family: &ModuliFamily,
    q_bound: usize,
    big_n: usize,
    cfg: &FieldConfig,
) -> Result<GeneralBound> {
    let n = family.n;
    let q = cfg.q() as u64;
    let inner: Vec<Vec<Poly>> = enumerate_moduli(family, q_bound, cfg)
        .into_iter()
        .map(|m| m.moduli)
        .collect();
    if inner.is_empty() {
        return Err(Error::InvalidArgument(
            "family has no moduli of degree ≤ Q".into(),
        ));
    }
    let table = MatchTable::new(&inner, |f| f.deg() as u32, big_n as u32 + 2, q, n);

    let candidates: Vec<Vec<Poly>> = match &family.kind {
        FamilyKind::Explicit(list) => list.clone(),
        _ => {
            let k = family.power();
            let coords: Vec<Poly> = enumerate_monic_up_to(q_bound, cfg)
                .into_iter()
                .map(|f| f.pow(k, cfg))
                .collect();
            let mut out: Vec<Vec<Poly>> = vec![Vec::new()];
            for _ in 0..n {
                out = out
                    .into_iter()
                    .flat_map(|pre| {
                        coords.iter().map(move |f| {
                            let mut t = pre.clone();
                            t.push(f.clone());
                            t
                        })
                    })
                    .collect();
            }
            out
        }
    };
    let inside: std::collections::HashSet<&Vec<Poly>> = inner.iter().collect();
    let mut best: Option<(BigInt, Vec<Poly>, bool)> = None;
    let mut best_inside = BigInt::zero();
    for f in &candidates {
        let v = table.eval(f);
        let is_inside = inside.contains(f);
        if is_inside && v > best_inside {
            best_inside = v.clone();
        }
        match &mut best {
            Some((bv, bf, bi)) if v >= *bv => {
                if v > *bv {
                    *bv = v;
                    *bf = f.clone();
                    *bi = is_inside;
                } else {
                    *bi |= is_inside;
                }
            }
            None => best = Some((v, f.clone(), is_inside)),
            _ => {}
        }
    }
    let (bv, argmax, any_inside) = best.expect("candidate list is nonempty");
    // q^{n(N+1)} / q^{n(N+2)} = q^{−n}
    let scale = rational_pow(q, -(n as i64));
    Ok(GeneralBound {
        value: BigRational::from_integer(bv) * &scale,
        restricted_value: BigRational::from_integer(best_inside) * scale,
        argmax,
        argmax_outside: !any_inside,
    })
}

/// M̃_{·,n,k}(X, N) for one (n, k, X, N), tabulated so it can be evaluated at
/// many f.
pub struct MTildeTable {
    n: usize,
    table: MatchTable,
    scale: BigRational,
}

impl MTildeTable {
    pub fn new(n: usize, k: u32, x: usize, big_n: i64, cfg: &FieldConfig) -> Self {
        let q = cfg.q() as u64;
        // multiply every factor by q^{shift} so all terms are integers
        let shift = big_n.max(0);
        let tuples = monic_tuples_lcm_bounded(n, x, cfg);
        let table = MatchTable::new(
            &tuples,
            |f| (k as i64 * f.deg() as i64 + shift - big_n) as u32,
            shift as u32,
            q,
            n,
        );
        MTildeTable {
            n,
            table,
            scale: rational_pow(q, -(n as i64) * shift),
        }
    }

    /// M̃ at f; only the first n coordinates of f are used.
    pub fn eval(&self, f: &[Poly]) -> Result<BigRational> {
        if f.len() < self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: f.len(),
            });
        }
        Ok(BigRational::from_integer(self.table.eval(f)) * &self.scale)
    }
}

fn check_monic(f: &[Poly], cfg: &FieldConfig) -> Result<()> {
    if f.iter().all(|g| g.is_monic(cfg)) {
        Ok(())
    } else {
        Err(Error::NonMonicDenominator)
    }
}

/// M̃_{f,n,k}(X, N) = Σ_{f̃ monic, deg lcm f̃ ≤ X} Π_{i≤n} (δ(f_i, f̃_i) + q^{k deg f̃_i − N}).
/// f may have more than n coordinates.
pub fn m_tilde(
    f: &[Poly],
    n: usize,
    k: u32,
    x: usize,
    big_n: i64,
    cfg: &FieldConfig,
) -> Result<BigRational> {
    check_monic(f, cfg)?;
    MTildeTable::new(n, k, x, big_n, cfg).eval(f)
}

/// The one-dimensional closed form [deg f ≤ X] + Σ_{d≤X} q^d · q^{kd−N}.
pub fn m_tilde_dim1(f: &Poly, k: u32, x: usize, big_n: i64, cfg: &FieldConfig) -> BigRational {
    let q = cfg.q() as u64;
    let hit = if f.deg() <= x {
        BigRational::one()
    } else {
        BigRational::zero()
    };
    (0..=x as i64).fold(hit, |acc, d| {
        acc + rational_pow(q, d + k as i64 * d - big_n)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecursionCheck {
    pub holds: bool,
    pub lhs: BigRational,
    pub rhs: BigRational,
    /// rhs − lhs.
    pub slack: BigRational,
}

/// Tables for checking, at many f,
/// M̃_{f,n,k}(X,N) ≤ M̃_{f,n−1,k}(X,N) + Σ_{j≤X} M̃_{f,n−1,k}(j,N) · (q+1)^{(k+1)X − kj − N}.
/// The inequality fails whenever the (q+1) exponent is negative, e.g.
/// n=2, q=2, k=1, X=0, N=1, f=(1,1) gives 9/4 > 2.
pub struct RecursionTables {
    full: MTildeTable,
    lower: Vec<MTildeTable>,
    weights: Vec<BigRational>,
}

impl RecursionTables {
    pub fn new(n: usize, k: u32, x: usize, big_n: i64, cfg: &FieldConfig) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("the recursion needs n ≥ 2".into()));
        }
        let q1 = cfg.q() as u64 + 1;
        Ok(RecursionTables {
            full: MTildeTable::new(n, k, x, big_n, cfg),
            lower: (0..=x)
                .map(|j| MTildeTable::new(n - 1, k, j, big_n, cfg))
                .collect(),
            weights: (0..=x as i64)
                .map(|j| rational_pow(q1, (k as i64 + 1) * x as i64 - k as i64 * j - big_n))
                .collect(),
        })
    }

    pub fn check(&self, f: &[Poly]) -> Result<RecursionCheck> {
        let lhs = self.full.eval(f)?;
        let x = self.lower.len() - 1;
        let mut rhs = self.lower[x].eval(f)?;
        for (table, w) in self.lower.iter().zip(&self.weights) {
            rhs += table.eval(f)? * w;
        }
        let slack = &rhs - &lhs;
        Ok(RecursionCheck {
            holds: slack >= BigRational::zero(),
            lhs,
            rhs,
            slack,
        })
    }
}

pub fn m_tilde_recursion_check(
    f: &[Poly],
    n: usize,
    k: u32,
    x: usize,
    big_n: i64,
    cfg: &FieldConfig,
) -> Result<RecursionCheck> {
    check_monic(f, cfg)?;
    RecursionTables::new(n, k, x, big_n, cfg)?.check(f)
}

/// 1 + (q+1)^{kX+(X−N)} + (q+1)^{kX+n(X−N)}, with constant 1.
pub fn lemma_bound(x: usize, big_n: i64, n: usize, k: u32, cfg: &FieldConfig) -> BigRational {
    let q1 = cfg.q() as u64 + 1;
    let (x, k, n) = (x as i64, k as i64, n as i64);
    BigRational::one()
        + rational_pow(q1, k * x + x - big_n)
        + rational_pow(q1, k * x + n * (x - big_n))
}

/// (q+1)^{nN} + (q+1)^{(k+1)Q+(n−1)N} + (q+1)^{(k+n)Q}, with constant 1.
/// For n = 1 the last two terms are the same power and it is counted once,
/// which is the one-dimensional form (q+1)^N + (q+1)^{(k+1)Q}.
pub fn power_bound(
    n: usize,
    k: u32,
    q_bound: usize,
    big_n: usize,
    cfg: &FieldConfig,
) -> BigRational {
    let q1 = cfg.q() as u64 + 1;
    let (n, k, qb, bn) = (n as i64, k as i64, q_bound as i64, big_n as i64);
    let head = rational_pow(q1, n * bn) + rational_pow(q1, (k + 1) * qb + (n - 1) * bn);
    if n == 1 {
        head
    } else {
        head + rational_pow(q1, (k + n) * qb)
    }
}

pub fn full_bound(n: usize, q_bound: usize, big_n: usize, cfg: &FieldConfig) -> BigRational {
    power_bound(n, 1, q_bound, big_n, cfg)
}

pub fn dim1_power_bound(k: u32, q_bound: usize, big_n: usize, cfg: &FieldConfig) -> BigRational {
    power_bound(1, k, q_bound, big_n, cfg)
}

/// q^{n(N+1)} · max_f M̃_{f,n,k}(Q, N+2), f over monic base tuples. Only
/// coordinates of degree ≤ Q can match, so those tuples suffice.
pub fn kth_corollary_bound(
    family: &ModuliFamily,
    q_bound: usize,
    big_n: usize,
    cfg: &FieldConfig,
) -> Result<BigRational> {
    let k = match family.kind {
        FamilyKind::KthPower(k) => k,
        FamilyKind::Full => 1,
        FamilyKind::Explicit(_) => {
            return Err(Error::InvalidArgument(
                "the power corollary needs a full or power family".into(),
            ))
        }
    };
    let n = family.n;
    let table = MTildeTable::new(n, k, q_bound, big_n as i64 + 2, cfg);
    let mut best = BigRational::zero();
    for f in crate::farey::monic_tuples(n, q_bound, cfg) {
        let v = table.eval(&f)?;
        if v > best {
            best = v;
        }
    }
    Ok(rational_pow(cfg.q() as u64, (n * (big_n + 1)) as i64) * best)
}

/// Measured quantities fed into a report; the sieve and counting parts are
/// optional because large sets are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurements {
    pub s_count: u64,
    /// M(Q, N+2).
    pub m_count: Option<usize>,
    pub delta_opt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub q: u32,
    pub p: u32,
    pub m: u32,
    pub n: usize,
    pub big_n: usize,
    pub q_bound: usize,
    pub k: u32,
    pub family: String,
    pub s_count: u64,
    pub moduli_count: usize,
    /// Largest deg lcm among the moduli.
    pub moduli_degree: usize,
    pub m_count: Option<usize>,
    /// max_f M̃_{f,n,k}(X, N+2) for X = 0..=Q.
    pub m_tilde: Vec<BigRational>,
    pub delta_opt: Option<f64>,
    pub tineq: Option<BigRational>,
    pub general: GeneralBound,
    pub dim1: Option<BigRational>,
    pub kth: Option<BigRational>,
    pub lemma: BigRational,
    pub power: BigRational,
    pub full: BigRational,
    pub dim1_power: Option<BigRational>,
}

impl BoundReport {
    pub fn new(
        family: &ModuliFamily,
        q_bound: usize,
        big_n: usize,
        cfg: &FieldConfig,
        meas: &Measurements,
    ) -> Result<Self> {
        let n = family.n;
        let k = family.power();
        let moduli = enumerate_moduli(family, q_bound, cfg);
        let moduli_degree = moduli.iter().map(|m| m.lcm_degree).max().unwrap_or(0);
        let kth = match family.kind {
            FamilyKind::Explicit(_) => None,
            _ => Some(kth_corollary_bound(family, q_bound, big_n, cfg)?),
        };
        let m_tilde = (0..=q_bound)
            .map(|x| {
                let table = MTildeTable::new(n, k, x, big_n as i64 + 2, cfg);
                crate::farey::monic_tuples(n, x, cfg)
                    .iter()
                    .map(|f| table.eval(f))
                    .try_fold(BigRational::zero(), |best, v| {
                        v.map(|v| if v > best { v } else { best })
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundReport {
            q: cfg.q(),
            p: cfg.p(),
            m: cfg.m(),
            n,
            big_n,
            q_bound,
            k,
            family: family.name(),
            s_count: meas.s_count,
            moduli_count: moduli.len(),
            moduli_degree,
            m_count: meas.m_count,
            m_tilde,
            delta_opt: meas.delta_opt,
            tineq: meas.m_count.map(|m| bound_tineq(n, big_n, m, cfg)),
            general: bound_general(family, q_bound, big_n, cfg)?,
            dim1: (n == 1).then(|| bound_dim1(moduli.len(), moduli_degree, big_n, cfg)),
            kth,
            lemma: lemma_bound(q_bound, big_n as i64 + 2, n, k, cfg),
            power: power_bound(n, k, q_bound, big_n, cfg),
            full: full_bound(n, q_bound, big_n, cfg),
            dim1_power: (n == 1).then(|| dim1_power_bound(k, q_bound, big_n, cfg)),
        })
    }

    /// Bounds that hold with constant 1, by name.
    pub fn explicit_bounds(&self) -> Vec<(&'static str, &BigRational)> {
        let mut out = Vec::new();
        if let Some(t) = &self.tineq {
            out.push(("tineq", t));
        }
        out.push(("general", &self.general.value));
        if let Some(d) = &self.dim1 {
            out.push(("dim1", d));
        }
        if let Some(k) = &self.kth {
            out.push(("kth", k));
        }
        out
    }

    /// Bounds with an unknown constant, evaluated at constant 1.
    pub fn asymptotic_bounds(&self) -> Vec<(&'static str, &BigRational)> {
        let mut out = vec![("power", &self.power), ("full", &self.full)];
        if let Some(d) = &self.dim1_power {
            out.push(("dim1_power", d));
        }
        out
    }

    /// Δ_opt / bound for every bound, when Δ_opt was measured.
    pub fn ratios(&self) -> Vec<(&'static str, f64)> {
        let Some(delta) = self.delta_opt else {
            return Vec::new();
        };
        self.explicit_bounds()
            .into_iter()
            .chain(self.asymptotic_bounds())
            .map(|(name, b)| (name, delta / rational_to_f64(b)))
            .collect()
    }

    /// max_f M̃(f, n, k, Q, N+2) / lemma bound.
    pub fn lemma_ratio(&self) -> f64 {
        let top = self.m_tilde.last().expect("table covers X = 0..=Q");
        rational_to_f64(&(top / &self.lemma))
    }

    /// Violations of the constant-1 inequalities. Δ_opt is allowed a relative
    /// excess of `FORM_GUARD` over each bound; integer-valued comparisons are
    /// exact.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Some(delta) = self.delta_opt {
            for (name, bound) in self.explicit_bounds() {
                let b = rational_to_f64(bound);
                if delta > b * (1.0 + FORM_GUARD) {
                    out.push(Violation {
                        check: format!("bound_{name}"),
                        detail: format!("delta_opt {delta:.17e} exceeds {name} bound {b:.17e}"),
                    });
                }
            }
        }
        if let Some(m) = self.m_count {
            // M(Q, N+2) against the weighted sum behind the general bound
            let sum = &self.general.restricted_value
                / rational_pow(self.q as u64, (self.n * (self.big_n + 1)) as i64);
            if BigRational::from_integer(m.into()) > sum {
                out.push(Violation {
                    check: "count_vs_weighted_sum".into(),
                    detail: format!("M = {m} exceeds {sum}"),
                });
            }
        }
        out
    }
}

/// deg lcm of a tuple; exposed for callers enumerating their own f.
pub fn lcm_degree(f: &[Poly], cfg: &FieldConfig) -> usize {
    lcm_all(f, cfg).deg()
}
