//! Generating functions: graded polynomials in three variables with q-series
//! coefficients, one-variable series in `t`, q-multiple polylogarithms and
//! the q-difference operator.

mod ohno_zagier;
mod qhyp;

pub use ohno_zagier::{
    ohno_zagier_lhs, ohno_zagier_rhs, phi0_xyz, power_sums, power_sums_quotient, verify_ohno_zagier,
    verify_ohno_zagier_height_one, verify_phi_to_zeta,
};
pub use qhyp::{phi0_t, qhyp_residual, verify_qhyp_equation, PhiT};

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::Result;
use crate::expander::Expander;
use crate::index::Index;
use crate::qseries::QSeries;

/// Exponents of `(x, y, z)` (or `(u, v, w)`).
pub type Monomial = (u32, u32, u32);

/// Weighted degree with the first two variables of weight 1 and the third of weight 2.
pub fn wdeg((i, j, m): Monomial) -> u32 {
    i + j + 2 * m
}

/// Position of an index of weight `k`, depth `r`, height `s` in the generating functions:
/// `(k - r - s, r - s, s - 1)`, of weighted degree `k - 2`.
pub fn monomial_of(k: &Index) -> Monomial {
    let (w, r, s) = (k.weight() as u32, k.depth() as u32, k.height() as u32);
    assert!(s >= 1, "height-zero indices are not admissible");
    (w - r - s, r - s, s - 1)
}

/// Polynomial in three variables with [`QSeries`] coefficients, truncated
/// at weighted degree `wbound` and at `q^trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct WPoly {
    terms: BTreeMap<Monomial, QSeries>,
    wbound: u32,
    trunc: usize,
}

impl WPoly {
    pub fn zero(wbound: u32, trunc: usize) -> Self {
        WPoly { terms: BTreeMap::new(), wbound, trunc }
    }

    pub fn one(wbound: u32, trunc: usize) -> Self {
        Self::monomial((0, 0, 0), QSeries::one(trunc), wbound)
    }

    pub fn monomial(mono: Monomial, c: QSeries, wbound: u32) -> Self {
        let mut p = Self::zero(wbound, c.trunc());
        p.add_term(mono, &c);
        p
    }

    pub fn var(which: usize, wbound: u32, trunc: usize) -> Self {
        let mono = [(1, 0, 0), (0, 1, 0), (0, 0, 1)][which];
        Self::monomial(mono, QSeries::one(trunc), wbound)
    }

    pub fn wbound(&self) -> u32 {
        self.wbound
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, QSeries> {
        &self.terms
    }

    /// Coefficient of `mono`; zero when absent.
    pub fn coeff(&self, mono: Monomial) -> QSeries {
        self.terms.get(&mono).cloned().unwrap_or_else(|| QSeries::zero(self.trunc))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(QSeries::is_zero)
    }

    /// `self[mono] += c`, ignoring monomials beyond the bound.
    pub fn add_term(&mut self, mono: Monomial, c: &QSeries) {
        if wdeg(mono) > self.wbound || c.is_zero() {
            return;
        }
        self.trunc = self.trunc.min(c.trunc());
        let entry = self.terms.entry(mono).or_insert_with(|| QSeries::zero(c.trunc()));
        entry.add_scaled(c, &BigRational::one());
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map(|s| s.scale(c))
    }

    pub fn scale_series(&self, c: &QSeries) -> Self {
        let mut p = self.map(|s| s * c);
        p.trunc = p.trunc.min(c.trunc());
        p
    }

    fn map(&self, f: impl Fn(&QSeries) -> QSeries) -> Self {
        let mut out = Self::zero(self.wbound, self.trunc);
        for (&m, s) in &self.terms {
            out.add_term(m, &f(s));
        }
        out
    }

    /// Keeps only the monomials satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(Monomial) -> bool) -> Self {
        let mut out = self.clone();
        out.terms.retain(|&m, _| keep(m));
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.wbound, self.trunc), |acc, _| &acc * self)
    }

    /// `exp(self)` for `self` without constant term; the series stops once powers leave the bound.
    pub fn exp(&self) -> Result<Self> {
        if self.terms.contains_key(&(0, 0, 0)) {
            return Err(crate::Error::BadConstantTerm("exp needs constant term 0"));
        }
        let mut acc = Self::one(self.wbound, self.trunc);
        let mut term = acc.clone();
        for j in 1.. {
            term = (&term * self).scale(&BigRational::new(BigInt::one(), BigInt::from(j)));
            if term.terms.is_empty() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

impl Add for &WPoly {
    type Output = WPoly;
    fn add(self, rhs: &WPoly) -> WPoly {
        let mut out = self.clone();
        out.wbound = out.wbound.min(rhs.wbound);
        out.terms.retain(|&m, _| wdeg(m) <= out.wbound);
        out.trunc = out.trunc.min(rhs.trunc);
        for (&m, s) in &rhs.terms {
            out.add_term(m, s);
        }
        for s in out.terms.values_mut() {
            *s = s.truncate(out.trunc);
        }
        out
    }
}

impl Neg for &WPoly {
    type Output = WPoly;
    fn neg(self) -> WPoly {
        self.map(|s| -s)
    }
}

impl Sub for &WPoly {
    type Output = WPoly;
    fn sub(self, rhs: &WPoly) -> WPoly {
        self + &(-rhs)
    }
}

impl Mul for &WPoly {
    type Output = WPoly;
    fn mul(self, rhs: &WPoly) -> WPoly {
        let mut out = WPoly::zero(self.wbound.min(rhs.wbound), self.trunc.min(rhs.trunc));
        for (&(a, b, c), s) in &self.terms {
            for (&(d, e, f), t) in &rhs.terms {
                let m = (a + d, b + e, c + f);
                if wdeg(m) <= out.wbound {
                    out.add_term(m, &(s * t));
                }
            }
        }
        out
    }
}

/// Power series in one variable `t` with [`QSeries`] coefficients, known through `t^M`.
#[derive(Clone, Debug, PartialEq)]
pub struct TSeries {
    coeffs: Vec<QSeries>,
}

impl TSeries {
    pub fn new(coeffs: Vec<QSeries>) -> Self {
        assert!(!coeffs.is_empty(), "a TSeries needs at least one coefficient");
        TSeries { coeffs }
    }

    pub fn zero(m: usize, trunc: usize) -> Self {
        TSeries { coeffs: vec![QSeries::zero(trunc); m + 1] }
    }

    pub fn one(m: usize, trunc: usize) -> Self {
        let mut s = Self::zero(m, trunc);
        s.coeffs[0] = QSeries::one(trunc);
        s
    }

    pub fn trunc_t(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn trunc_q(&self) -> usize {
        self.coeffs.iter().map(QSeries::trunc).min().unwrap()
    }

    pub fn coeffs(&self) -> &[QSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&QSeries> {
        self.coeffs.get(n)
    }

    pub fn coeff_mut(&mut self, n: usize) -> &mut QSeries {
        &mut self.coeffs[n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(QSeries::is_zero)
    }

    pub fn truncate_t(&self, m: usize) -> Self {
        TSeries { coeffs: self.coeffs[..=m.min(self.trunc_t())].to_vec() }
    }

    /// `t * self`, which is known one order further.
    pub fn shift_t(&self) -> Self {
        let mut coeffs = vec![QSeries::zero(self.trunc_q())];
        coeffs.extend(self.coeffs.iter().cloned());
        TSeries { coeffs }
    }

    /// `(1 - t) * self` at the same t-truncation.
    pub fn times_one_minus_t(&self) -> Self {
        self - &self.shift_t().truncate_t(self.trunc_t())
    }

    /// `self / (1 - t)`.
    pub fn div_one_minus_t(&self) -> Self {
        let mut acc = QSeries::zero(self.trunc_q());
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                acc = &acc + c;
                acc.clone()
            })
            .collect();
        TSeries { coeffs }
    }

    pub fn scale_series(&self, c: &QSeries) -> Self {
        TSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Substitutes `t = q`; the result is exact through `q^min(M, N)`.
    pub fn at_q(&self) -> QSeries {
        let trunc = self.trunc_q().min(self.trunc_t());
        let mut acc = QSeries::zero(trunc);
        for (n, c) in self.coeffs.iter().enumerate().take(trunc + 1) {
            acc.add_scaled(&c.truncate(trunc).shift(n), &BigRational::one());
        }
        acc
    }
}

impl Add for &TSeries {
    type Output = TSeries;
    fn add(self, rhs: &TSeries) -> TSeries {
        TSeries { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &TSeries {
    type Output = TSeries;
    fn sub(self, rhs: &TSeries) -> TSeries {
        TSeries { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &TSeries {
    type Output = TSeries;
    fn mul(self, rhs: &TSeries) -> TSeries {
        let m = self.trunc_t().min(rhs.trunc_t());
        let mut out = TSeries::zero(m, self.trunc_q().min(rhs.trunc_q()));
        for i in 0..=m {
            for j in 0..=m - i {
                let p = &self.coeffs[i] * &rhs.coeffs[j];
                out.coeffs[i + j].add_scaled(&p, &BigRational::one());
            }
        }
        out
    }
}

/// `1/[n]^k` as a q-series, cached per call site.
struct InvBrackets {
    trunc: usize,
    cache: BTreeMap<(usize, u32), QSeries>,
}

impl InvBrackets {
    fn new(trunc: usize) -> Self {
        InvBrackets { trunc, cache: BTreeMap::new() }
    }

    fn get(&mut self, n: usize, k: u32) -> QSeries {
        let trunc = self.trunc;
        self.cache
            .entry((n, k))
            .or_insert_with(|| {
                let inv = QSeries::q_integer(n, trunc).inv().expect("[n] has constant term 1");
                inv.pow(k)
            })
            .clone()
    }
}

/// `Li_k(t)` through `t^M` and `q^N`. Any index with positive parts is
/// allowed; the empty index gives `1`.
pub fn polylog(k: &[u32], m: usize, trunc: usize) -> TSeries {
    let mut brackets = InvBrackets::new(trunc);
    polylog_with(k, m, trunc, &mut brackets)
}

fn polylog_with(k: &[u32], m: usize, trunc: usize, brackets: &mut InvBrackets) -> TSeries {
    if k.is_empty() {
        return TSeries::one(m, trunc);
    }
    // below[n]: sum over chains of the inner parts whose top variable is < n
    let mut below: Vec<QSeries> = vec![QSeries::one(trunc); m + 1];
    let mut level = Vec::new();
    for &kj in k.iter().rev() {
        level = (0..=m)
            .map(|n| {
                if n == 0 || below[n].is_zero() {
                    QSeries::zero(trunc)
                } else {
                    &below[n] * &brackets.get(n, kj)
                }
            })
            .collect::<Vec<_>>();
        let mut acc = QSeries::zero(trunc);
        below = level
            .iter()
            .map(|l| {
                let prev = acc.clone();
                acc = &acc + l;
                prev
            })
            .collect();
    }
    TSeries::new(level)
}

/// `(D_q f)(t) = (f(t) - f(qt)) / ((1-q) t)`: the `t^(n-1)` coefficient is `[n] f_n`.
///
/// Panics on a series known only through `t^0`.
pub fn qdiff(f: &TSeries) -> TSeries {
    assert!(f.trunc_t() >= 1, "qdiff lowers the t-truncation by one");
    let trunc = f.trunc_q();
    TSeries::new((1..=f.trunc_t()).map(|n| &QSeries::q_integer(n, trunc) * &f.coeffs[n]).collect())
}

/// `D_q Li_k = Li_{k_1 - 1, ...} / t` when `k_1 >= 2` and `Li_{k_2, ...} / (1 - t)` when `k_1 = 1`,
/// compared through `t^(M-1)` and `q^N`.
pub fn verify_qdiff_recurrences(k: &Index, m: usize, trunc: usize) -> bool {
    let p = k.parts();
    let lhs = qdiff(&polylog(p, m, trunc));
    let rhs = if p[0] >= 2 {
        let mut lower = p.to_vec();
        lower[0] -= 1;
        let li = polylog(&lower, m, trunc);
        TSeries::new(li.coeffs[1..].to_vec())
    } else {
        polylog(&p[1..], m, trunc).div_one_minus_t().truncate_t(m - 1)
    };
    (&lhs - &rhs).is_zero()
}

/// `Li_k(q)` against the binomial combination of `zeta_q(a)` with `a <= k` partwise, through `q^N`.
pub fn verify_log_to_zeta(k: &Index, trunc: usize) -> Result<bool> {
    k.require_admissible()?;
    let lhs = polylog(k.parts(), trunc, trunc).at_q();
    let p = k.parts();
    let ranges: Vec<Vec<u32>> = p
        .iter()
        .enumerate()
        .map(|(j, &kj)| (if j == 0 { 2 } else { 1 }..=kj).collect())
        .collect();
    let mut rhs = QSeries::zero(trunc);
    let mut choice = vec![0usize; p.len()];
    loop {
        let a: Vec<u32> = choice.iter().zip(&ranges).map(|(&c, r)| r[c]).collect();
        let mut coeff = BigInt::one();
        for (j, (&kj, &aj)) in p.iter().zip(&a).enumerate() {
            let off = if j == 0 { 2 } else { 1 };
            coeff *= binomial(kj - off, aj - off);
        }
        let excess: u32 = p.iter().zip(&a).map(|(k, a)| k - a).sum();
        let z = Expander::global().raw(&Index::new(a)?, trunc)?;
        let term = &z * &QSeries::one_minus_q_pow(excess as i64, trunc);
        rhs.add_scaled(&term, &BigRational::from_integer(coeff));
        // odometer over the choices
        let mut i = 0;
        loop {
            if i == p.len() {
                return Ok((&lhs - &rhs).is_zero());
            }
            choice[i] += 1;
            if choice[i] < ranges[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Both sides of the logarithm of `prod_n (1 - q^n s / [n])` as series in `s` through `s^S`,
/// the product cut at `n <= N`.
pub fn log_product_sides(s_bound: usize, trunc: usize) -> Result<(TSeries, TSeries)> {
    let mut lhs = TSeries::zero(s_bound, trunc);
    let mut brackets = InvBrackets::new(trunc);
    let mut l_sum = QSeries::zero(trunc);
    for n in 1..=trunc {
        let c = brackets.get(n, 1).shift(n);
        l_sum = &l_sum + &c;
        let mut power = QSeries::one(trunc);
        for j in 1..=s_bound {
            power = &power * &c;
            if power.is_zero() {
                break;
            }
            lhs.coeffs[j].add_scaled(&power, &-BigRational::new(BigInt::one(), BigInt::from(j)));
        }
    }
    let mut rhs = TSeries::zero(s_bound, trunc);
    for j in 1..=s_bound {
        let mut c = &QSeries::q_minus_one_pow(j as u32 - 1, trunc) * &l_sum;
        for n in 2..=j {
            let z = Expander::global().raw(&Index::new(vec![n as u32])?, trunc)?;
            c = &c + &(&QSeries::q_minus_one_pow((j - n) as u32, trunc) * &z);
        }
        rhs.coeffs[j] = c.scale(&-BigRational::new(BigInt::one(), BigInt::from(j)));
    }
    Ok((lhs, rhs))
}

pub fn verify_log_product(s_bound: usize, trunc: usize) -> Result<bool> {
    let (lhs, rhs) = log_product_sides(s_bound, trunc)?;
    Ok((&lhs - &rhs).is_zero())
}

pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
