//! Numerical evaluation of qMZVs at real `q`, of MZVs, and spot checks of the
//! analytic identities behind the generating-function theorem.
//!
//! Arithmetic runs in `BigDecimal` rounded to [`DIGITS`] significant digits.
//! Every result carries a rigorous bound on the truncation error plus a
//! generous allowance for rounding; the value itself is always a plain
//! partial sum, never extrapolated.

mod heine;

pub use heine::{check_heine, check_solution_formula, phi0_numeric, phi_hypergeometric};

use bigdecimal::{BigDecimal, FromPrimitive, One, ToPrimitive, Zero};
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::expander::Expander;
use crate::index::Index;

/// Working precision in significant decimal digits.
pub const DIGITS: u64 = 50;

#[derive(Clone, Debug)]
pub struct NumericResult {
    pub value: BigDecimal,
    /// Bound on `|value - exact|`, truncation and rounding together.
    pub tail_bound: f64,
    pub terms_used: usize,
}

impl NumericResult {
    pub fn value_f64(&self) -> f64 {
        to_f64(&self.value)
    }
}

pub(crate) fn rnd(x: BigDecimal) -> BigDecimal {
    x.with_prec(DIGITS)
}

pub(crate) fn dec(x: f64) -> BigDecimal {
    BigDecimal::from_f64(x).expect("finite input")
}

pub(crate) fn int(n: i64) -> BigDecimal {
    BigDecimal::from(n)
}

pub(crate) fn to_f64(x: &BigDecimal) -> f64 {
    x.to_f64().expect("representable")
}

/// Rounding allowance for about `ops` roundings of quantities bounded by `magnitude`.
pub(crate) fn rounding(magnitude: f64, ops: usize) -> f64 {
    (magnitude.abs() + 1.0) * ops as f64 * 1e-47
}

fn ln_binom(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `sum_{m >= n_1 > ... > n_r > 0} prod_j g(j, n_j)` for non-negative `g`.
///
/// All summands are non-negative, so the partial sums of the outer level
/// must be non-decreasing; this is asserted as the sum accumulates.
fn nested_sum(r: usize, m: usize, g: impl Fn(usize, usize) -> BigDecimal) -> BigDecimal {
    let mut below = vec![BigDecimal::one(); m + 1];
    let mut level = vec![BigDecimal::zero(); m + 1];
    for j in (0..r).rev() {
        level = (0..=m)
            .map(|n| if n == 0 { BigDecimal::zero() } else { rnd(g(j, n) * &below[n]) })
            .collect();
        let mut acc = BigDecimal::zero();
        for n in 0..=m {
            below[n] = acc.clone();
            acc = rnd(acc + &level[n]);
        }
    }
    let mut total = BigDecimal::zero();
    for term in level.into_iter().skip(1) {
        assert!(term >= BigDecimal::zero(), "negative summand in a positive series");
        total = rnd(total + term);
    }
    total
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::BadQ(q))
    }
}

/// Bound on the terms of `zeta_q(k)` with `n_1 > m`.
///
/// Every inner factor `q^(n(k-1)) / [n]^k` is at most 1 because `[n] >= 1`,
/// and there are `C(n_1 - 1, r - 1)` inner chains. For the outer factor,
/// `1/[n_1] = (1-q)/(1-q^n_1) <= (1-q)/(1-q^(m+1))` once `n_1 > m`. With
/// `rho = q^(k_1 - 1)`, the terms `t_n = C(n-1, r-1) rho^n` have ratio at
/// most `R = rho (m+1)/(m+2-r)` beyond `m`, giving `t_(m+1) / (1 - R)`.
fn qmzv_tail(k: &Index, q: f64, m: usize) -> f64 {
    let (k1, r) = (k.parts()[0] as f64, k.depth());
    if m + 1 < r {
        return f64::INFINITY;
    }
    let ln_rho = (k1 - 1.0) * q.ln();
    let ratio = ln_rho.exp() * (m + 1) as f64 / (m + 2 - r) as f64;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let outer = k1 * ((1.0 - q) / (1.0 - q.powi(m as i32 + 1))).ln();
    (ln_binom(m, r - 1) + (m + 1) as f64 * ln_rho + outer).exp() / (1.0 - ratio)
}

/// `zeta_q(k)` at real `q` by direct summation with `n_1 <= M`, `M` chosen from the tail envelope.
pub fn eval_qmzv(k: &Index, q: f64, eps: f64) -> Result<NumericResult> {
    k.require_admissible()?;
    check_q(q)?;
    let mut m = k.depth();
    while qmzv_tail(k, q, m) > eps / 2.0 {
        m += 1;
    }
    let qd = dec(q);
    let mut q_pow = vec![BigDecimal::one(); m + 1];
    let mut bracket = vec![BigDecimal::zero(); m + 1];
    let one_minus_q = BigDecimal::one() - &qd;
    for n in 1..=m {
        q_pow[n] = rnd(&q_pow[n - 1] * &qd);
        bracket[n] = rnd((BigDecimal::one() - &q_pow[n]) / &one_minus_q);
    }
    let parts = k.parts();
    let value = nested_sum(k.depth(), m, |j, n| {
        let kj = parts[j];
        let mut num = BigDecimal::one();
        for _ in 1..kj {
            num = rnd(num * &q_pow[n]);
        }
        let mut den = BigDecimal::one();
        for _ in 0..kj {
            den = rnd(den * &bracket[n]);
        }
        rnd(num / den)
    });
    let ops = m * (k.weight() * 2 + 4);
    Ok(NumericResult {
        tail_bound: qmzv_tail(k, q, m) + rounding(to_f64(&value), ops),
        value,
        terms_used: m,
    })
}

/// Bound on `(1-q)^|k| sum_(n > N) a_n q^n` using `a_n <= (n+1)^(r+|k|)`.
///
/// The coefficient of `q^e` in `sum q^(sum n_j (k_j - 1))` counts chains with
/// `n_1 <= e`, at most `(e+1)^r`; replacing every `1/(1-q^n)` by the
/// coefficientwise larger `1/(1-q)` convolves with `C(m+|k|-1, |k|-1) <= (m+1)^(|k|-1)`.
fn series_tail(k: &Index, q: f64, n: usize) -> f64 {
    let p = (k.depth() + k.weight()) as f64;
    let ratio = ((n + 3) as f64 / (n + 2) as f64).powf(p) * q;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let ln_first = p * ((n + 2) as f64).ln() + (n + 1) as f64 * q.ln();
    (1.0 - q).powi(k.weight() as i32) * ln_first.exp() / (1.0 - ratio)
}

/// `zeta_q(k)` at real `q` from the exact modified expansion, `(1-q)^|k| sum a_n q^n`.
pub fn eval_qmzv_from_series(k: &Index, q: f64, eps: f64) -> Result<NumericResult> {
    k.require_admissible()?;
    check_q(q)?;
    let mut n = 8;
    while series_tail(k, q, n) > eps / 2.0 {
        n += 8;
    }
    let coeffs = Expander::global()
        .modified(k, n)?
        .to_integers()
        .expect("modified expansions are integral");
    let qd = dec(q);
    let mut acc = BigDecimal::zero();
    for a in coeffs.iter().rev() {
        acc = rnd(acc * &qd + BigDecimal::from(a.clone()));
    }
    let mut scale = BigDecimal::one();
    for _ in 0..k.weight() {
        scale = rnd(scale * (BigDecimal::one() - &qd));
    }
    let value = rnd(acc * scale);
    Ok(NumericResult {
        tail_bound: series_tail(k, q, n) + rounding(to_f64(&value), 2 * n + k.weight()),
        value,
        terms_used: n,
    })
}

/// Tail `sum_(n > m) C(n-1, r-1) x^n` of the chain count weighted by `x^n`, `0 < x < 1`.
fn chain_tail(r: usize, x: f64, m: usize) -> f64 {
    if m + 1 < r {
        return f64::INFINITY;
    }
    let ratio = x * (m + 1) as f64 / (m + 2 - r) as f64;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    (ln_binom(m, r - 1) + (m + 1) as f64 * x.ln()).exp() / (1.0 - ratio)
}

/// `Li_s(1/2) = sum_(n_1 > ... > n_r > 0) 2^(-n_1) / prod n_j^(s_j)` for any parts `s_j >= 1`.
///
/// Every summand is at most `2^(-n_1)`, and `sum_n C(n-1, r-1) 2^(-n) = 1`,
/// so the value lies in `[0, 1]` and the tail is [`chain_tail`] at `x = 1/2`.
fn li_half(s: &[u32], eps: f64) -> NumericResult {
    if s.is_empty() {
        return NumericResult { value: BigDecimal::one(), tail_bound: 0.0, terms_used: 0 };
    }
    let r = s.len();
    let mut m = r;
    while chain_tail(r, 0.5, m) > eps {
        m += 1;
    }
    let half = dec(0.5);
    let mut half_pow = vec![BigDecimal::one(); m + 1];
    let mut inv = vec![BigDecimal::zero(); m + 1];
    for n in 1..=m {
        half_pow[n] = rnd(&half_pow[n - 1] * &half);
        inv[n] = rnd(BigDecimal::one() / int(n as i64));
    }
    let value = nested_sum(r, m, |j, n| {
        let mut x = if j == 0 { half_pow[n].clone() } else { BigDecimal::one() };
        for _ in 0..s[j] {
            x = rnd(x * &inv[n]);
        }
        x
    });
    let ops = m * (s.iter().sum::<u32>() as usize + 3);
    NumericResult { tail_bound: chain_tail(r, 0.5, m) + rounding(1.0, ops), value, terms_used: m }
}

/// Letters of the iterated-integral word of `k`, outermost first: `0^(k_j - 1) 1` per part.
fn word_of(parts: &[u32]) -> Vec<u8> {
    parts.iter().flat_map(|&p| std::iter::repeat_n(0, p as usize - 1).chain([1])).collect()
}

/// Inverse of [`word_of`]; the word must end in `1` (or be empty).
fn index_of_word(word: &[u8]) -> Vec<u32> {
    assert!(word.last().is_none_or(|&l| l == 1), "word must end in 1");
    let mut parts = Vec::new();
    let mut run = 1;
    for &l in word {
        if l == 0 {
            run += 1;
        } else {
            parts.push(run);
            run = 1;
        }
    }
    parts
}

/// `zeta(k)` by splitting the iterated integral over `[0, 1]` at `1/2`.
///
/// With the word `a_1 ... a_n` of `k` (outermost letter first),
/// `zeta(k) = sum_j I(a_1..a_j; 1/2 -> 1) * I(a_(j+1)..a_n; 0 -> 1/2)`. The
/// substitution `t -> 1 - t` turns the first factor into an integral over
/// `[0, 1/2]` of the reversed word with letters swapped. Admissibility makes
/// both words end in the letter `1`, so both factors are multiple
/// polylogarithms at `1/2`, whose tails are geometric. Direct summation of
/// the defining series would need about `1/eps` terms when `k_1 = 2`.
pub fn eval_mzv(k: &Index, eps: f64) -> Result<NumericResult> {
    k.require_admissible()?;
    let word = word_of(k.parts());
    let n = word.len();
    let inner_eps = eps / (8.0 * (n + 1) as f64);
    let mut value = BigDecimal::zero();
    let mut bound = 0.0;
    let mut terms = 0;
    for j in 0..=n {
        let prefix: Vec<u8> = word[..j].iter().rev().map(|l| 1 - l).collect();
        let a = li_half(&index_of_word(&prefix), inner_eps);
        let b = li_half(&index_of_word(&word[j..]), inner_eps);
        // |AB - A'B'| <= eA |B'| + eB |A'| + eA eB with |A'|, |B'| <= 1
        bound += a.tail_bound + b.tail_bound + a.tail_bound * b.tail_bound;
        terms += a.terms_used + b.terms_used;
        value = rnd(value + rnd(a.value * b.value));
    }
    Ok(NumericResult { tail_bound: bound + rounding(to_f64(&value), 2 * n + 2), value, terms_used: terms })
}

/// `zeta(k)` by direct nested summation over `n_1 <= m`.
///
/// The inner chains below `n` contribute at most `H_(n-1)^(r-1)/(r-1)! <=
/// (1 + ln n)^(r-1)/(r-1)!`, so the tail is at most the integral of
/// `x^(-k_1) (1 + ln x)^(r-1) / (r-1)!` over `[m, inf)`, which is
/// `sum_p (1 + ln m)^p m^(1-k_1) / (p! (k_1-1)^(r-p))` for `p = 0..r-1`.
/// The integrand decreases on `[m, inf)` once `k_1 (1 + ln m) >= r - 1`.
pub fn eval_mzv_direct(k: &Index, m: usize) -> Result<NumericResult> {
    k.require_admissible()?;
    let (k1, r) = (k.parts()[0] as f64, k.depth());
    let lm = 1.0 + (m as f64).ln();
    assert!(k1 * lm >= (r - 1) as f64, "integral comparison needs a decreasing integrand");
    let mut tail = 0.0;
    let mut fact = 1.0;
    for p in 0..r {
        // p = power of (1 + ln m), fact = p!
        if p > 0 {
            fact *= p as f64;
        }
        tail += lm.powi(p as i32) * (m as f64).powf(1.0 - k1) / (fact * (k1 - 1.0).powi((r - p) as i32));
    }
    let inv: Vec<BigDecimal> =
        (0..=m).map(|n| if n == 0 { BigDecimal::zero() } else { rnd(BigDecimal::one() / int(n as i64)) }).collect();
    let parts = k.parts();
    let value = nested_sum(r, m, |j, n| {
        let mut x = BigDecimal::one();
        for _ in 0..parts[j] {
            x = rnd(x * &inv[n]);
        }
        x
    });
    let ops = m * (k.weight() + 3);
    Ok(NumericResult { tail_bound: tail + rounding(to_f64(&value), ops), value, terms_used: m })
}

/// `|sum c_i zeta(k_i)| <= eps + sum |c_i| tail_i`.
pub fn check_mzv_relation(rel: &[(Index, i64)], eps: f64) -> Result<bool> {
    let norm: f64 = rel.iter().map(|(_, c)| c.abs() as f64).sum::<f64>().max(1.0);
    let mut sum = BigDecimal::zero();
    let mut slack = eps;
    for (k, c) in rel {
        let z = eval_mzv(k, eps / (10.0 * norm))?;
        slack += c.abs() as f64 * z.tail_bound;
        sum = rnd(sum + z.value * BigDecimal::from(BigInt::from(*c)));
    }
    Ok(to_f64(&sum.abs()) <= slack)
}
