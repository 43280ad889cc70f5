//! The second-order q-difference equation satisfied by `Phi_0(u, v, w; t)`:
//!
//! `q t (1-t) D^2 Phi_0 + ((1-u)(1-t) - v t) D Phi_0 + (uv - w) Phi_0 = 1`.
//!
//! `Phi_0` is stored monomial by monomial in `(u, v, w)`, each coefficient a
//! series in `t`. The equation is linear with polynomial coefficients, so the
//! residual at a monomial only involves `Phi_0` at that monomial and at its
//! quotients by `u`, `v`, `uv` and `w`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use super::{monomial_of, polylog, qdiff, wdeg, Monomial, TSeries};
use crate::error::Result;
use crate::index::enumerate_admissible;
use crate::qseries::QSeries;

pub type PhiT = BTreeMap<Monomial, TSeries>;

/// `Phi_0(t)` over admissible indices of weight `2..=K`, each `Li` through `t^M` and `q^N`.
pub fn phi0_t(k_max: usize, m: usize, trunc: usize) -> Result<PhiT> {
    let mut phi = PhiT::new();
    for w in 2..=k_max {
        for k in enumerate_admissible(w)? {
            let li = polylog(k.parts(), m, trunc);
            phi.entry(monomial_of(&k))
                .and_modify(|acc| *acc = &*acc + &li)
                .or_insert(li);
        }
    }
    Ok(phi)
}

fn monomials_up_to(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for m in 0..=d / 2 {
        for i in 0..=d - 2 * m {
            for j in 0..=d - 2 * m - i {
                out.push((i, j, m));
            }
        }
    }
    out
}

/// Left side minus right side of the equation at every monomial of
/// weighted degree `<= K - 2`, through `t^(M-1)`.
///
/// The second derivative is known only through `t^(M-2)`, but it enters
/// multiplied by `t`, so every term is exact through `t^(M-1)`.
pub fn qhyp_residual(phi: &PhiT, k_max: usize, m: usize, trunc: usize) -> PhiT {
    assert!(k_max >= 2 && m >= 2);
    let zero = TSeries::zero(m, trunc);
    let get = |mono: Option<Monomial>| -> &TSeries { mono.and_then(|k| phi.get(&k)).unwrap_or(&zero) };
    let q = QSeries::monomial(BigRational::one(), 1, trunc);
    let top = m - 1;
    let mut out = PhiT::new();
    for mono in monomials_up_to(k_max as u32 - 2) {
        let (i, j, l) = mono;
        let f = get(Some(mono));
        let d1 = qdiff(f);
        let d2 = qdiff(&d1);
        // q t (1 - t) D^2
        let mut r = d2.shift_t().times_one_minus_t().scale_series(&q);
        // (1 - t) D
        r = &r + &d1.times_one_minus_t();
        // -u (1 - t) D
        let du = qdiff(get(i.checked_sub(1).map(|i| (i, j, l))));
        r = &r - &du.times_one_minus_t();
        // -v t D
        let dv = qdiff(get(j.checked_sub(1).map(|j| (i, j, l))));
        r = &r - &dv.shift_t().truncate_t(top);
        // + uv Phi - w Phi
        let uv = get(i.checked_sub(1).zip(j.checked_sub(1)).map(|(i, j)| (i, j, l)));
        let w = get(l.checked_sub(1).map(|l| (i, j, l)));
        r = &r + &(uv - w).truncate_t(top);
        if mono == (0, 0, 0) {
            r.coeff_mut(0).add_scaled(&QSeries::one(trunc), &-BigRational::one());
        }
        debug_assert_eq!(r.trunc_t(), top);
        debug_assert!(wdeg(mono) <= k_max as u32 - 2);
        out.insert(mono, r);
    }
    out
}

pub fn verify_qhyp_equation(k_max: usize, m: usize, trunc: usize) -> Result<bool> {
    let phi = phi0_t(k_max, m, trunc)?;
    Ok(qhyp_residual(&phi, k_max, m, trunc).values().all(TSeries::is_zero))
}
