//! Numeric checks of Heine's summation in the form used for the generating
//! function, and of the closed-form solution of the q-difference equation.
//!
//! Parameters: `alpha_0 + beta_0 = u + v`, `alpha_0 beta_0 = w`,
//! `a = 1/(1 - (1-q)(u - alpha_0))`, `b` likewise with `beta_0`,
//! `c = q/(1 - (1-q)u)`, and `phi(a, b, c; t)` the basic hypergeometric series.
//!
//! `alpha_0, beta_0` may be complex conjugates, but everything here depends
//! on them only through symmetric functions: with `g = 1 - (1-q)u`,
//! `1/a + 1/b = 2g + (1-q)(u+v)` and `1/(ab) = g^2 + g(1-q)(u+v) + (1-q)^2 w`,
//! so all arithmetic stays real.

use bigdecimal::{BigDecimal, One, Zero};

use super::{dec, rnd, rounding, to_f64, NumericResult};
use crate::error::{Error, Result};

/// Weight cutoff of the polylogarithm sum in [`check_solution_formula`].
const WEIGHT_CUTOFF: usize = 14;

/// A factor `1 - s e + p e^2`, i.e. `(1 - z_1 e)(1 - z_2 e)` with `z_1 + z_2 = s`, `z_1 z_2 = p`.
#[derive(Clone, Debug)]
struct Quadratic {
    s: BigDecimal,
    p: BigDecimal,
}

impl Quadratic {
    fn linear(z: BigDecimal) -> Self {
        Quadratic { s: z, p: BigDecimal::zero() }
    }

    fn at(&self, e: &BigDecimal) -> BigDecimal {
        rnd(BigDecimal::one() - &self.s * e + &self.p * e * e)
    }
}

struct Params {
    q: BigDecimal,
    /// `a + b` and `ab`.
    ab_sum: BigDecimal,
    ab_prod: BigDecimal,
    c: BigDecimal,
    /// `1/a + 1/b` and `1/(ab)`.
    inv_sum: BigDecimal,
    inv_prod: BigDecimal,
    /// `alpha + beta`, `alpha beta`, `x`, `y` of the product form.
    alpha_sum: BigDecimal,
    alpha_prod: BigDecimal,
    x: BigDecimal,
    y: BigDecimal,
}

fn params(q: f64, u: f64, v: f64, w: f64) -> Result<Params> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::BadQ(q));
    }
    let (qd, ud, vd, wd) = (dec(q), dec(u), dec(v), dec(w));
    let one = BigDecimal::one();
    let omq = &one - &qd;
    let g = rnd(&one - &omq * &ud);
    if g.is_zero() {
        return Err(Error::Domain("1 - (1-q)u vanishes".into()));
    }
    let uv = &ud + &vd;
    let inv_sum = rnd(BigDecimal::from(2) * &g + &omq * &uv);
    let inv_prod = rnd(&g * &g + &g * &omq * &uv + &omq * &omq * &wd);
    if inv_prod.is_zero() {
        return Err(Error::Domain("a or b is infinite".into()));
    }
    Ok(Params {
        ab_sum: rnd(&inv_sum / &inv_prod),
        ab_prod: rnd(&one / &inv_prod),
        c: rnd(&qd / &g),
        alpha_sum: rnd(&uv / &g),
        alpha_prod: rnd(&wd / (&g * &g)),
        x: rnd(&ud / &g),
        y: rnd((&vd + &omq * (&wd - &ud * &vd)) / &g),
        inv_sum,
        inv_prod,
        q: qd,
    })
}

/// `phi(a, b, c; t)` summed over `n < n_cut`, given `a + b` and `ab`.
///
/// The term ratio is `t (1 - a q^n)(1 - b q^n) / ((1 - q^(n+1))(1 - c q^n))`,
/// bounded for `n >= N = n_cut` by
/// `R = |t| (1 + |a+b| q^N + |ab| q^(2N)) / ((1 - q^(N+1))(1 - |c| q^N))`;
/// the tail is then at most `|term_N| / (1 - R)`.
pub fn phi_hypergeometric(
    ab_sum: &BigDecimal,
    ab_prod: &BigDecimal,
    c: &BigDecimal,
    t: &BigDecimal,
    q: &BigDecimal,
    n_cut: usize,
) -> Result<NumericResult> {
    let one = BigDecimal::one();
    let num_factor = Quadratic { s: ab_sum.clone(), p: ab_prod.clone() };
    let mut term = one.clone();
    let mut sum = BigDecimal::zero();
    let mut q_pow = one.clone();
    let mut magnitude: f64 = 0.0;
    for _ in 0..n_cut {
        sum = rnd(sum + &term);
        magnitude = magnitude.max(to_f64(&term.abs()));
        let num = num_factor.at(&q_pow);
        let next_q = rnd(&q_pow * q);
        let den = rnd((&one - &next_q) * (&one - c * &q_pow));
        if den.is_zero() {
            return Err(Error::DivergenceDetected("zero denominator in phi".into()));
        }
        term = rnd(term * t * num / den);
        q_pow = next_q;
    }
    let qn = to_f64(&q_pow);
    let (sf, pf, cf, tf) = (to_f64(&ab_sum.abs()), to_f64(&ab_prod.abs()), to_f64(&c.abs()), to_f64(&t.abs()));
    let qf = to_f64(q);
    if cf * qn >= 1.0 {
        return Err(Error::DivergenceDetected("c q^n not yet small".into()));
    }
    let ratio = tf * (1.0 + sf * qn + pf * qn * qn) / ((1.0 - qn * qf) * (1.0 - cf * qn));
    if ratio >= 1.0 {
        return Err(Error::DivergenceDetected(format!("phi term ratio bound {ratio} >= 1")));
    }
    let tail = to_f64(&term.abs()) / (1.0 - ratio);
    Ok(NumericResult { tail_bound: tail + rounding(magnitude, 8 * n_cut), value: sum, terms_used: n_cut })
}

/// `prod_(n = start)^(start + n_cut - 1) prod_i f_i(e_n) / prod_j f'_j(e_n)` for quadratic
/// factors `f = 1 - s e + p e^2` with `0 <= e_n <= e_max q^n`.
///
/// For an omitted factor, `delta = |s| e + |p| e^2` bounds `|f - 1|` and
/// `|log f| <= delta / (1 - delta)`. Summing over `n >= N = start + n_cut`,
/// the log of the tail is at most
/// `(|s| e_max q^N / (1-q) + |p| e_max^2 q^(2N) / (1-q^2)) / (1 - delta_N)`
/// per factor, and the relative error at most `e^L - 1`.
fn q_product(
    num: &[Quadratic],
    den: &[Quadratic],
    e: impl Fn(usize) -> BigDecimal,
    e_max: f64,
    q: f64,
    start: usize,
    n_cut: usize,
) -> Result<NumericResult> {
    let mut prod = BigDecimal::one();
    for n in start..start + n_cut {
        let en = e(n);
        for f in num {
            prod = rnd(prod * f.at(&en));
        }
        for f in den {
            let x = f.at(&en);
            if x.is_zero() {
                return Err(Error::DivergenceDetected("vanishing factor in the product".into()));
            }
            prod = rnd(prod / x);
        }
    }
    let eq = e_max * q.powi((start + n_cut) as i32);
    let mut log_tail = 0.0;
    for f in num.iter().chain(den) {
        let (sf, pf) = (to_f64(&f.s.abs()), to_f64(&f.p.abs()));
        let delta = sf * eq + pf * eq * eq;
        if delta >= 1.0 {
            return Err(Error::DivergenceDetected("product tail not yet small".into()));
        }
        log_tail += (sf * eq / (1.0 - q) + pf * eq * eq / (1.0 - q * q)) / (1.0 - delta);
    }
    let mag = to_f64(&prod.abs());
    Ok(NumericResult {
        tail_bound: mag * log_tail.exp_m1() + rounding(mag, 8 * n_cut),
        value: prod,
        terms_used: n_cut,
    })
}

fn agree(a: &NumericResult, b: &NumericResult, eps: f64) -> bool {
    to_f64(&(&a.value - &b.value).abs()) <= eps + a.tail_bound + b.tail_bound
}

/// Heine's summation at `t = c/(ab)`: the series, Heine's product over
/// `n >= 0`, and its rewriting as
/// `prod_(n >= 1) (1 - q^n alpha/[n])(1 - q^n beta/[n]) / ((1 - q^n x/[n])(1 - q^n y/[n]))`
/// must agree pairwise within `eps` plus their tail bounds.
pub fn check_heine(q: f64, u: f64, v: f64, w: f64, n_cut: usize, eps: f64) -> Result<bool> {
    let p = params(q, u, v, w)?;
    let t = rnd(&p.c / &p.ab_prod);
    let series = phi_hypergeometric(&p.ab_sum, &p.ab_prod, &p.c, &t, &p.q, n_cut)?;

    let one = BigDecimal::one();
    let q_pows: Vec<BigDecimal> = std::iter::successors(Some(one.clone()), |x| Some(rnd(x * &p.q)))
        .take(n_cut + 2)
        .collect();
    // (1 - c q^n / a)(1 - c q^n / b) / ((1 - c q^n)(1 - c q^n / (ab)))
    let heine = q_product(
        &[Quadratic { s: p.inv_sum.clone(), p: p.inv_prod.clone() }],
        &[Quadratic::linear(one.clone()), Quadratic::linear(p.inv_prod.clone())],
        |n| rnd(&p.c * &q_pows[n]),
        to_f64(&p.c.abs()),
        q,
        0,
        n_cut,
    )?;
    let omq = &one - &p.q;
    let product_form = q_product(
        &[Quadratic { s: p.alpha_sum.clone(), p: p.alpha_prod.clone() }],
        &[Quadratic::linear(p.x.clone()), Quadratic::linear(p.y.clone())],
        // q^n / [n] = q^n (1-q) / (1-q^n) <= q^n
        |n| rnd(&q_pows[n] * &omq / (&one - &q_pows[n])),
        1.0,
        q,
        1,
        n_cut,
    )?;
    Ok(agree(&series, &heine, eps) && agree(&series, &product_form, eps))
}

/// `Phi_0(u, v, w; t)` summed over admissible indices of weight `<= cutoff` and `n_1 <= M`.
///
/// Indices are grouped by weight: each part `k` contributes `v / [n]` when
/// `k = 1` and `u^(k-2) w / [n]^k` otherwise, except the outermost part,
/// which contributes `u^(k-2) / [n]^k` (the `w^(-1)` of the generating
/// function absorbed). Summing the same terms in absolute value over all
/// weights gives the closed form
/// `sum_n |t|^n / ([n]^2 (1 - |u|/[n])) prod_(m < n) (1 + |v|/[m] + |w| / ([m]^2 (1 - |u|/[m])))`,
/// so the weight tail is the difference of the two absolute sums, and with
/// `[n] >= 1` the terms beyond `M` are at most `|t|^n rho^(n-1) / (1 - |u|)`,
/// `rho = 1 + |v| + |w|/(1 - |u|)`.
pub fn phi0_numeric(q: f64, u: f64, v: f64, w: f64, t: f64, cutoff: usize, eps: f64) -> Result<NumericResult> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::BadQ(q));
    }
    let rho = 1.0 + v.abs() + w.abs() / (1.0 - u.abs());
    if u.abs() >= 1.0 || t.abs() * rho >= 1.0 {
        return Err(Error::DivergenceDetected("Phi_0 envelope does not converge".into()));
    }
    let tr = t.abs() * rho;
    let t_tail = |m: usize| tr.powi(m as i32 + 1) / (rho * (1.0 - u.abs()) * (1.0 - tr));
    let mut m = 1;
    while t_tail(m) > eps / 4.0 {
        m += 1;
    }
    let signed = graded_sum(q, u, v, w, t, cutoff, m);
    let abs_trunc = graded_sum(q, u.abs(), v.abs(), w.abs(), t.abs(), cutoff, m);
    let abs_full = closed_abs_sum(q, u.abs(), v.abs(), w.abs(), t.abs(), m);
    let weight_tail = to_f64(&(abs_full - abs_trunc)).max(0.0);
    let mag = to_f64(&signed.abs());
    Ok(NumericResult {
        tail_bound: t_tail(m) + weight_tail + rounding(mag + 1.0, m * cutoff * cutoff * 4),
        value: signed,
        terms_used: m,
    })
}

fn brackets(q: f64, m: usize) -> Vec<BigDecimal> {
    let qd = dec(q);
    let one = BigDecimal::one();
    let omq = &one - &qd;
    let mut q_pow = one.clone();
    let mut out = vec![BigDecimal::zero()];
    for _ in 1..=m {
        q_pow = rnd(q_pow * &qd);
        out.push(rnd((&one - &q_pow) / &omq));
    }
    out
}

fn graded_sum(q: f64, u: f64, v: f64, w: f64, t: f64, cutoff: usize, m: usize) -> BigDecimal {
    let (ud, vd, wd, td) = (dec(u), dec(v), dec(w), dec(t));
    let br = brackets(q, m);
    // inv_pow[n][k] = 1/[n]^k
    let inv_pow: Vec<Vec<BigDecimal>> = br
        .iter()
        .map(|b| {
            let inv = if b.is_zero() { BigDecimal::zero() } else { rnd(BigDecimal::one() / b) };
            std::iter::successors(Some(BigDecimal::one()), |x| Some(rnd(x * &inv))).take(cutoff + 1).collect()
        })
        .collect();
    let u_pow: Vec<BigDecimal> =
        std::iter::successors(Some(BigDecimal::one()), |x| Some(rnd(x * &ud))).take(cutoff + 1).collect();
    let inner_part = |k: usize| if k == 1 { vd.clone() } else { rnd(&u_pow[k - 2] * &wd) };
    let inner_max = cutoff.saturating_sub(2);
    // below[wt] = sum over inner chains with top variable < n and total weight wt
    let mut below = vec![BigDecimal::zero(); inner_max + 1];
    below[0] = BigDecimal::one();
    let mut total = BigDecimal::zero();
    let mut t_pow = BigDecimal::one();
    for inv_n in &inv_pow[1..=m] {
        t_pow = rnd(t_pow * &td);
        let mut outer = BigDecimal::zero();
        for k in 2..=cutoff {
            for b in below.iter().take(cutoff - k + 1) {
                if !b.is_zero() {
                    outer = rnd(outer + &u_pow[k - 2] * &inv_n[k] * b);
                }
            }
        }
        total = rnd(total + &t_pow * outer);
        // chains whose top variable is n, for the next n
        let mut top = vec![BigDecimal::zero(); inner_max + 1];
        for wt in 1..=inner_max {
            for k in 1..=wt {
                if !below[wt - k].is_zero() {
                    top[wt] = rnd(&top[wt] + inner_part(k) * &inv_n[k] * &below[wt - k]);
                }
            }
        }
        for (b, x) in below.iter_mut().zip(top) {
            *b = rnd(&*b + x);
        }
    }
    total
}

fn closed_abs_sum(q: f64, u: f64, v: f64, w: f64, t: f64, m: usize) -> BigDecimal {
    let (ud, vd, wd, td) = (dec(u), dec(v), dec(w), dec(t));
    let one = BigDecimal::one();
    let br = brackets(q, m);
    let mut prod = one.clone();
    let mut total = BigDecimal::zero();
    let mut t_pow = one.clone();
    for b in &br[1..=m] {
        t_pow = rnd(t_pow * &td);
        let inv = rnd(&one / b);
        let geo = rnd(&one / (&one - &ud * &inv));
        total = rnd(total + &t_pow * &inv * &inv * &geo * &prod);
        prod = rnd(prod * (&one + &vd * &inv + &wd * &inv * &inv * &geo));
    }
    total
}

/// `Phi_0(u, v, w; t) = (1 - phi(a, b, c; ct/(qab))) / (uv - w)`, the left
/// side summed over admissible indices of weight `<= 14`.
pub fn check_solution_formula(q: f64, u: f64, v: f64, w: f64, t: f64, eps: f64) -> Result<bool> {
    let denom = u * v - w;
    if denom == 0.0 {
        return Err(Error::Domain("uv = w".into()));
    }
    let p = params(q, u, v, w)?;
    let lhs = phi0_numeric(q, u, v, w, t, WEIGHT_CUTOFF, eps)?;
    let arg = rnd(&p.c * dec(t) / (&p.q * &p.ab_prod));
    let mut n_cut = 16;
    let phi = loop {
        let phi = phi_hypergeometric(&p.ab_sum, &p.ab_prod, &p.c, &arg, &p.q, n_cut)?;
        if phi.tail_bound <= eps * denom.abs() / 4.0 || n_cut > 4096 {
            break phi;
        }
        n_cut *= 2;
    };
    let dd = dec(denom);
    let rhs = rnd((BigDecimal::one() - &phi.value) / &dd);
    let diff = to_f64(&(&lhs.value - rhs).abs());
    Ok(diff <= eps + lhs.tail_bound + phi.tail_bound / denom.abs())
}
