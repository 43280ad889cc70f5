//! The generating function of qMZVs by weight, depth and height, and its
//! closed form as an exponential of single zeta values.
//!
//! Everything is truncated at weighted degree `K` (x, y of weight 1, z of
//! weight 2). Only `n <= K` and `m <= K - n` contribute inside the
//! exponential: the bracket `x^j + y^j - p_j` has no monomial of weighted
//! degree below `j`, so larger `j` vanish modulo the truncation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{monomial_of, polylog, rational, wdeg, WPoly};
use crate::error::Result;
use crate::expander::{Expander, Kind};
use crate::index::{enumerate_admissible, Index};
use crate::qseries::QSeries;

/// `Phi_0(x, y, z)`: the sum of `zeta_q(k)` (or the modified values) at
/// `x^(k-r-s) y^(r-s) z^(s-1)` over admissible indices of weight `2..=K`.
pub fn phi0_xyz(k_max: usize, trunc: usize, kind: Kind) -> Result<WPoly> {
    phi0_filtered(k_max, trunc, kind, |_| true)
}

fn phi0_filtered(k_max: usize, trunc: usize, kind: Kind, keep: impl Fn(&Index) -> bool) -> Result<WPoly> {
    let exp = Expander::global();
    let mut phi = WPoly::zero(k_max as u32, trunc);
    for w in 2..=k_max {
        for k in enumerate_admissible(w)?.into_iter().filter(|k| keep(k)) {
            phi.add_term(monomial_of(&k), &exp.get(&k, kind, trunc)?);
        }
    }
    Ok(phi)
}

/// `p_j = alpha^j + beta^j` for `j = 0..=upto` from `alpha + beta = e1`, `alpha beta = e2`.
pub fn power_sums(e1: &WPoly, e2: &WPoly, upto: usize) -> Vec<WPoly> {
    let (wb, tr) = (e1.wbound(), e1.trunc());
    let mut p = vec![WPoly::one(wb, tr).scale(&rational(2, 1)), e1.clone()];
    for j in 2..=upto {
        let next = &(e1 * &p[j - 1]) - &(e2 * &p[j - 2]);
        p.push(next);
    }
    p.truncate(upto + 1);
    p
}

/// The same power sums computed in `R[alpha] / (alpha^2 - e1 alpha + e2)`:
/// `alpha^j = A_j alpha + B_j`, so `alpha^j + beta^j = A_j e1 + 2 B_j`.
pub fn power_sums_quotient(e1: &WPoly, e2: &WPoly, upto: usize) -> Vec<WPoly> {
    let (wb, tr) = (e1.wbound(), e1.trunc());
    let (mut a, mut b) = (WPoly::zero(wb, tr), WPoly::one(wb, tr));
    let mut out = Vec::new();
    for _ in 0..=upto {
        out.push(&(&a * e1) + &b.scale(&rational(2, 1)));
        let next_a = &(&a * e1) + &b;
        b = -&(&a * e2);
        a = next_a;
    }
    out
}

/// `(q - 1)^m` for the raw form, `(-1)^m` for the modified one.
fn unit(kind: Kind, m: u32, trunc: usize) -> QSeries {
    match kind {
        Kind::Raw => QSeries::q_minus_one_pow(m, trunc),
        Kind::Modified => QSeries::constant(rational(if m.is_multiple_of(2) { 1 } else { -1 }, 1), trunc),
    }
}

fn xyz(wb: u32, trunc: usize) -> (WPoly, WPoly, WPoly) {
    (WPoly::var(0, wb, trunc), WPoly::var(1, wb, trunc), WPoly::var(2, wb, trunc))
}

fn lhs_from(phi: &WPoly, z_zero: bool) -> WPoly {
    let (wb, tr) = (phi.wbound(), phi.trunc());
    let (x, y, z) = xyz(wb, tr);
    let mut factor = -&(&x * &y);
    if !z_zero {
        factor = &factor + &z;
    }
    &WPoly::one(wb, tr) + &(&factor * phi)
}

/// `1 + (z - xy) Phi_0`, truncated at weighted degree `K`.
pub fn ohno_zagier_lhs(k_max: usize, trunc: usize, kind: Kind) -> Result<WPoly> {
    Ok(lhs_from(&phi0_xyz(k_max, trunc, kind)?, false))
}

fn rhs_with(k_max: usize, trunc: usize, kind: Kind, z_zero: bool) -> Result<WPoly> {
    let wb = k_max as u32;
    let (x, y, z) = xyz(wb, trunc);
    let z = if z_zero { WPoly::zero(wb, trunc) } else { z };
    // e1 = x + y + c (z - xy) with c = q - 1, or -1 in the modified form
    let e1 = &(&x + &y) + &(&z - &(&x * &y)).scale_series(&unit(kind, 1, trunc));
    let p = power_sums(&e1, &z, k_max);
    let exp = Expander::global();
    let mut arg = WPoly::zero(wb, trunc);
    for n in 2..=k_max {
        let zeta_n = exp.get(&Index::new(vec![n as u32])?, kind, trunc)?;
        for m in 0..=k_max - n {
            let j = m + n;
            let bracket = &(&x.pow(j as u32) + &y.pow(j as u32)) - &p[j];
            let c = &zeta_n * &unit(kind, m as u32, trunc);
            let c = c.scale(&BigRational::new(BigInt::one(), BigInt::from(j)));
            arg = &arg + &bracket.scale_series(&c);
        }
    }
    arg.exp()
}

/// `exp(sum_n zeta_q(n) sum_m c^m / (m+n) (x^(m+n) + y^(m+n) - p_(m+n)))`, truncated at weighted degree `K`.
pub fn ohno_zagier_rhs(k_max: usize, trunc: usize, kind: Kind) -> Result<WPoly> {
    rhs_with(k_max, trunc, kind, false)
}

/// Both sides agree at every monomial of weighted degree `<= K` and every power `q^0..=q^N`.
pub fn verify_ohno_zagier(k_max: usize, trunc: usize, kind: Kind) -> Result<bool> {
    let lhs = ohno_zagier_lhs(k_max, trunc, kind)?;
    let rhs = ohno_zagier_rhs(k_max, trunc, kind)?;
    Ok((&lhs - &rhs).is_zero())
}

/// The `z = 0` specialization computed from scratch: height-one indices on
/// the left, `alpha beta = 0` on the right.
pub fn verify_ohno_zagier_height_one(k_max: usize, trunc: usize, kind: Kind) -> Result<bool> {
    let phi = phi0_filtered(k_max, trunc, kind, |k| k.height() == 1)?;
    let lhs = lhs_from(&phi, true);
    let rhs = rhs_with(k_max, trunc, kind, true)?;
    Ok((&lhs - &rhs).is_zero())
}

/// `Phi_0` at `t = q` in `(u, v, w)` against
/// `1/(1-(1-q)u) * sum zeta_q(k) x^a y^b z^c` with
/// `x = u g`, `y = (v + (1-q)(w - uv)) g`, `z = w g^2`, `g = 1/(1-(1-q)u)`,
/// through weighted degree `D` and `q^N`.
pub fn verify_phi_to_zeta(d: u32, trunc: usize) -> Result<bool> {
    let k_max = d as usize + 2;
    let mut lhs = WPoly::zero(d, trunc);
    for w in 2..=k_max {
        for k in enumerate_admissible(w)? {
            lhs.add_term(monomial_of(&k), &polylog(k.parts(), trunc, trunc).at_q());
        }
    }

    let (u, v, w) = xyz(d, trunc);
    let one_minus_q = QSeries::one_minus_q_pow(1, trunc);
    let mut g = WPoly::zero(d, trunc);
    for i in 0..=d {
        g.add_term((i, 0, 0), &QSeries::one_minus_q_pow(i as i64, trunc));
    }
    let x = &u * &g;
    let y = &(&v + &(&w - &(&u * &v)).scale_series(&one_minus_q)) * &g;
    let z = &(&w * &g) * &g;
    let zeta = phi0_xyz(k_max, trunc, Kind::Raw)?;
    let mut sum = WPoly::zero(d, trunc);
    for (&(a, b, c), coeff) in zeta.terms() {
        if wdeg((a, b, c)) > d {
            continue;
        }
        let mono = &(&x.pow(a) * &y.pow(b)) * &z.pow(c);
        sum = &sum + &mono.scale_series(coeff);
    }
    let rhs = &g * &sum;
    Ok((&lhs - &rhs).is_zero())
}
