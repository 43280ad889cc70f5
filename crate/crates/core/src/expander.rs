//! Exact q-expansions of q-multiple zeta values and the auxiliary sums `T`, `S`.
//!
//! Everything is computed in the modified normalization
//! `zeta_bar(k) = (1-q)^(-|k|) zeta_q(k)`, where each factor `1/[n]`
//! becomes `(1-q)/(1-q^n)`. Every summand is then a product of series
//!
//! ```text
//!     q^(n*shift) / (1 - q^n)^kappa = sum_l C(l+kappa-1, kappa-1) q^(n*(shift+l))
//! ```
//!
//! with non-negative integer coefficients, so the hot loop runs over
//! integers: `i128` with checked arithmetic first, arbitrary precision if
//! that overflows.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::Index;
use crate::qseries::QSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Modified,
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub index: Index,
    pub kind: Kind,
    pub series: QSeries,
}

impl Expansion {
    pub fn trunc(&self) -> usize {
        self.series.trunc()
    }
}

// ---------------------------------------------------------------------------
// Integer kernel

/// Coefficient ring of the chain DP.
trait DpInt: Clone + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn into_big(self) -> BigInt;
    /// `self += a * b`; `None` on overflow.
    fn mul_add(&mut self, a: &Self, b: &Self) -> Option<()>;
    fn add(&mut self, a: &Self) -> Option<()>;
}

impl DpInt for i128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn into_big(self) -> BigInt {
        BigInt::from(self)
    }
    #[inline]
    fn mul_add(&mut self, a: &Self, b: &Self) -> Option<()> {
        *self = self.checked_add(a.checked_mul(*b)?)?;
        Some(())
    }
    #[inline]
    fn add(&mut self, a: &Self) -> Option<()> {
        *self = self.checked_add(*a)?;
        Some(())
    }
}

impl DpInt for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn into_big(self) -> BigInt {
        self
    }
    fn mul_add(&mut self, a: &Self, b: &Self) -> Option<()> {
        *self += a * b;
        Some(())
    }
    fn add(&mut self, a: &Self) -> Option<()> {
        *self += a;
        Some(())
    }
}

/// The factor `q^(n*shift) / (1 - q^n)^kappa` attached to one summation variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Factor {
    kappa: u32,
    shift: u32,
}

impl Factor {
    /// Factor of a part `k` in the modified q-zeta sum.
    fn zeta(k: u32) -> Self {
        Factor { kappa: k, shift: k - 1 }
    }
}

/// Binomials `C(l+kappa-1, kappa-1)` for `l = 0..=trunc`, per kappa.
struct Binomials<T> {
    table: HashMap<u32, Vec<T>>,
}

impl<T: DpInt> Binomials<T> {
    fn new(kappas: impl IntoIterator<Item = u32>, trunc: usize) -> Option<Self> {
        let mut table = HashMap::new();
        for kappa in kappas {
            if table.contains_key(&kappa) {
                continue;
            }
            let mut row = Vec::with_capacity(trunc + 1);
            let mut c = BigInt::one();
            for l in 0..=trunc as u64 {
                if kappa == 0 {
                    row.push(T::from_big(&BigInt::from(u8::from(l == 0)))?);
                    continue;
                }
                row.push(T::from_big(&c)?);
                c = c * BigInt::from(l + kappa as u64) / BigInt::from(l + 1);
            }
            table.insert(kappa, row);
        }
        Some(Self { table })
    }

    /// Sparse terms `(exponent, coefficient)` of the factor at variable value `n`.
    fn terms(&self, f: Factor, n: usize, trunc: usize) -> impl Iterator<Item = (usize, &T)> {
        let row = &self.table[&f.kappa];
        let start = n * f.shift as usize;
        let max_l = if f.kappa == 0 { 0 } else { trunc.saturating_sub(start).checked_div(n).unwrap_or(0) };
        let live = start <= trunc;
        row.iter()
            .take(if live { max_l + 1 } else { 0 })
            .enumerate()
            .map(move |(l, c)| (start + n * l, c))
    }
}

/// `out += sparse * dense`, truncated at `trunc`.
fn sparse_mul_add<'a, T: DpInt + 'a>(
    out: &mut [T],
    sparse: impl Iterator<Item = (usize, &'a T)>,
    dense: &[T],
    lo: usize,
    trunc: usize,
) -> Option<()> {
    for (e, c) in sparse {
        if c.is_zero() {
            continue;
        }
        if e + lo > trunc {
            break;
        }
        for j in lo..=trunc - e {
            let d = &dense[j];
            if !d.is_zero() {
                out[e + j].mul_add(c, d)?;
            }
        }
    }
    Some(())
}

fn first_nonzero<T: DpInt>(s: &[T]) -> Option<usize> {
    s.iter().position(|c| !c.is_zero())
}

/// Chain sums with the top variable pinned:
/// `out[n] = sum over n = n_1 > n_2 > ... > n_r > lower of prod_i factor_i(n_i)`,
/// for `n` in `0..=nmax`. Empty vectors stand for zero series.
fn top_sums<T: DpInt>(
    factors: &[Factor],
    lower: usize,
    nmax: usize,
    trunc: usize,
    binom: &Binomials<T>,
) -> Option<Vec<Vec<T>>> {
    let r = factors.len();
    let mut cur: Vec<Vec<T>> = vec![Vec::new(); nmax + 1];
    for (n, slot) in cur.iter_mut().enumerate().skip(lower + 1) {
        let mut s = vec![T::zero(); trunc + 1];
        for (e, c) in binom.terms(factors[r - 1], n, trunc) {
            s[e].add(c)?;
        }
        *slot = s;
    }
    for f in factors[..r - 1].iter().rev() {
        let mut prefix = vec![T::zero(); trunc + 1];
        let mut prefix_live = false;
        let mut next: Vec<Vec<T>> = vec![Vec::new(); nmax + 1];
        for n in 0..=nmax {
            if n > 0 && !cur[n - 1].is_empty() {
                for (p, c) in prefix.iter_mut().zip(&cur[n - 1]) {
                    if !c.is_zero() {
                        p.add(c)?;
                    }
                }
                prefix_live = true;
            }
            if n <= lower || !prefix_live {
                continue;
            }
            let Some(lo) = first_nonzero(&prefix) else { continue };
            let mut s = vec![T::zero(); trunc + 1];
            sparse_mul_add(&mut s, binom.terms(*f, n, trunc), &prefix, lo, trunc)?;
            next[n] = s;
        }
        cur = next;
    }
    Some(cur)
}

fn modified_kernel<T: DpInt>(parts: &[u32], trunc: usize) -> Option<Vec<T>> {
    let factors: Vec<Factor> = parts.iter().map(|&k| Factor::zeta(k)).collect();
    let binom = Binomials::new(factors.iter().map(|f| f.kappa), trunc)?;
    // The top factor has q-order >= n_1 (k_1 - 1) >= n_1.
    let nmax = trunc / (parts[0] as usize - 1);
    let tops = top_sums(&factors, 0, nmax, trunc, &binom)?;
    let mut acc = vec![T::zero(); trunc + 1];
    for s in tops.iter().filter(|s| !s.is_empty()) {
        for (a, c) in acc.iter_mut().zip(s) {
            a.add(c)?;
        }
    }
    Some(acc)
}

/// `sum_{p >= p_min} e(p) sum_{n_1 > ... > n_r > p, n_1 <= trunc} h(n_1 - p) prod g(n_i, k_i)`
/// with `h(m) = q^m/(1-q^m)`; the shared shape of the modified `T` and `S` sums.
fn aux_kernel<T: DpInt>(parts: &[u32], p_min: usize, outer: Factor, trunc: usize) -> Option<Vec<T>> {
    let factors: Vec<Factor> = parts.iter().map(|&k| Factor::zeta(k)).collect();
    let h = Factor { kappa: 1, shift: 1 };
    let binom = Binomials::new(
        factors.iter().map(|f| f.kappa).chain([h.kappa, outer.kappa]),
        trunc,
    )?;
    let mut acc = vec![T::zero(); trunc + 1];
    let nmax = trunc;
    for p in p_min..nmax {
        let tops = top_sums(&factors, p, nmax, trunc, &binom)?;
        let mut inner = vec![T::zero(); trunc + 1];
        let mut live = false;
        for (n1, s) in tops.iter().enumerate() {
            let Some(lo) = first_nonzero(s) else { continue };
            live = true;
            sparse_mul_add(&mut inner, binom.terms(h, n1 - p, trunc), s, lo, trunc)?;
        }
        if !live {
            continue;
        }
        let Some(lo) = first_nonzero(&inner) else { continue };
        sparse_mul_add(&mut acc, binom.terms(outer, p, trunc), &inner, lo, trunc)?;
    }
    Some(acc)
}

/// Runs an integer kernel in `i128`, redoing it in `BigInt` if any step overflows.
fn run_kernel(fsmall: impl Fn() -> Option<Vec<i128>>, fbig: impl Fn() -> Option<Vec<BigInt>>) -> QSeries {
    let big = match fsmall() {
        Some(v) => v.into_iter().map(DpInt::into_big).collect::<Vec<_>>(),
        None => fbig().expect("arbitrary-precision kernel cannot overflow"),
    };
    QSeries::from_integers(big)
}

// ---------------------------------------------------------------------------
// Public operations

/// Coefficients of `zeta_bar_q(k)` through `q^trunc`.
pub fn expand_modified(k: &Index, trunc: usize) -> Result<QSeries> {
    k.require_admissible()?;
    let p = k.parts();
    Ok(run_kernel(|| modified_kernel::<i128>(p, trunc), || modified_kernel::<BigInt>(p, trunc)))
}

/// Coefficients of `zeta_q(k) = (1-q)^|k| zeta_bar_q(k)` through `q^trunc`.
pub fn expand_raw(k: &Index, trunc: usize) -> Result<QSeries> {
    let m = expand_modified(k, trunc)?;
    Ok(to_raw(&m, k.weight()))
}

/// Multiplies a modified-normalization series of the given weight by `(1-q)^weight`.
pub fn to_raw(modified: &QSeries, weight: usize) -> QSeries {
    modified * &QSeries::one_minus_q_pow(weight as i64, modified.trunc())
}

/// Literal enumeration of every chain `n_1 > ... > n_r > 0` with `n_1 <= trunc`,
/// each summand built from exact series inverses. An oracle for [`expand_modified`].
pub fn expand_bruteforce(k: &Index, trunc: usize) -> Result<QSeries> {
    k.require_admissible()?;
    let parts = k.parts();
    let factor = |n: usize, kj: u32| -> QSeries {
        // q^(n(k-1)) / (1 - q^n)^k
        let mut d = QSeries::one(trunc);
        if n <= trunc {
            d = &d - &QSeries::monomial(BigRational::one(), n, trunc);
        }
        let inv = d.pow(kj).inv().expect("constant term 1");
        inv.shift(n * (kj as usize - 1)).truncate(trunc)
    };
    let mut total = QSeries::zero(trunc);
    let mut chain: Vec<usize> = Vec::with_capacity(parts.len());
    fn walk(
        depth: usize,
        upper: usize,
        parts: &[u32],
        trunc: usize,
        chain: &mut Vec<usize>,
        total: &mut QSeries,
        factor: &dyn Fn(usize, u32) -> QSeries,
    ) {
        if depth == parts.len() {
            let order: usize = chain.iter().zip(parts).map(|(&n, &k)| n * (k as usize - 1)).sum();
            if order > trunc {
                return;
            }
            let mut term = QSeries::one(trunc);
            for (&n, &k) in chain.iter().zip(parts) {
                term = &term * &factor(n, k);
            }
            *total = &*total + &term;
            return;
        }
        let remaining = parts.len() - depth;
        for n in remaining..upper {
            chain.push(n);
            walk(depth + 1, n, parts, trunc, chain, total, factor);
            chain.pop();
        }
    }
    walk(0, trunc + 1, parts, trunc, &mut chain, &mut total, &factor);
    Ok(total)
}

/// Modified `T(k) = (1-q)^-(|k|+1) T(k)`, the sum
/// `sum_{n_1 > ... > n_r > n_{r+1} >= 0} q^(n_1-n_{r+1}) q^(sum n_i(k_i-1)) / ([n_1-n_{r+1}] prod [n_i]^k_i)`.
///
/// As a formal q-series this needs some part `>= 2`; with all parts equal
/// to one the coefficient of `q^1` is already an infinite sum.
pub fn expand_t(k: &Index, trunc: usize) -> Result<QSeries> {
    if !k.has_part_at_least_two() {
        return Err(Error::DivergentSum(format!("T{k} needs a part >= 2")));
    }
    let p = k.parts();
    let one = Factor { kappa: 0, shift: 0 };
    Ok(run_kernel(
        || aux_kernel::<i128>(p, 0, one, trunc),
        || aux_kernel::<BigInt>(p, 0, one, trunc),
    ))
}

/// Modified `S(k_1, ..., k_r, last)`, normalized by `(1-q)^-(|k|+last+1)`.
///
/// Needs `last >= 1`, or `last == 0` together with some `k_i >= 2`.
pub fn expand_s(k: &Index, last: u32, trunc: usize) -> Result<QSeries> {
    if last == 0 && !k.has_part_at_least_two() {
        return Err(Error::DivergentSum(format!("S{k} with last entry 0 needs a part >= 2")));
    }
    let p = k.parts();
    let outer = Factor { kappa: last, shift: last };
    Ok(run_kernel(
        || aux_kernel::<i128>(p, 1, outer, trunc),
        || aux_kernel::<BigInt>(p, 1, outer, trunc),
    ))
}

// ---------------------------------------------------------------------------
// Cache

/// Memoizing front end to the expansion routines. Requests at a lower
/// truncation are served by slicing a cached higher-truncation series.
#[derive(Default)]
pub struct Expander {
    cache: RwLock<HashMap<(Index, Kind), QSeries>>,
}

impl Expander {
    pub fn new() -> Self {
        Self::default()
    }

    /// The process-wide expander shared by the verifiers.
    pub fn global() -> &'static Expander {
        static GLOBAL: OnceLock<Expander> = OnceLock::new();
        GLOBAL.get_or_init(Expander::new)
    }

    pub fn get(&self, k: &Index, kind: Kind, trunc: usize) -> Result<QSeries> {
        if let Some(s) = self.lookup(k, kind, trunc) {
            return Ok(s);
        }
        let s = match kind {
            Kind::Modified => match self.lookup(k, Kind::Modified, trunc) {
                Some(s) => s,
                None => expand_modified(k, trunc)?,
            },
            Kind::Raw => to_raw(&self.get(k, Kind::Modified, trunc)?, k.weight()),
        };
        self.insert(k.clone(), kind, s.clone());
        Ok(s)
    }

    pub fn modified(&self, k: &Index, trunc: usize) -> Result<QSeries> {
        self.get(k, Kind::Modified, trunc)
    }

    pub fn raw(&self, k: &Index, trunc: usize) -> Result<QSeries> {
        self.get(k, Kind::Raw, trunc)
    }

    fn lookup(&self, k: &Index, kind: Kind, trunc: usize) -> Option<QSeries> {
        let map = self.cache.read().expect("expansion cache poisoned");
        map.get(&(k.clone(), kind))
            .filter(|s| s.trunc() >= trunc)
            .map(|s| s.truncate(trunc))
    }

    /// Stores a series unless a longer one is already cached.
    pub fn insert(&self, k: Index, kind: Kind, series: QSeries) {
        let mut map = self.cache.write().expect("expansion cache poisoned");
        match map.get(&(k.clone(), kind)) {
            Some(old) if old.trunc() >= series.trunc() => {}
            _ => {
                map.insert((k, kind), series);
            }
        }
    }

    /// Snapshot of all cached expansions in canonical order.
    pub fn entries(&self) -> Vec<Expansion> {
        let map = self.cache.read().expect("expansion cache poisoned");
        let mut v: Vec<Expansion> = map
            .iter()
            .map(|((index, kind), series)| Expansion { index: index.clone(), kind: *kind, series: series.clone() })
            .collect();
        v.sort_by(|a, b| (&a.index, a.kind).cmp(&(&b.index, b.kind)));
        v
    }

    pub fn len(&self) -> usize {
        self.cache.read().expect("expansion cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
