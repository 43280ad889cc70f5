//! Truncated power series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] with truncation `N` knows the coefficients of `q^0..=q^N`
//! and nothing beyond. Binary operations return the smaller of the two
//! truncations so that no result ever claims a coefficient it could not
//! have computed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<BigRational>,
}

impl QSeries {
    /// Builds a series from its coefficients; the truncation is `coeffs.len() - 1`.
    ///
    /// Panics on an empty vector, which has no truncation.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a QSeries needs at least one coefficient");
        Self { coeffs }
    }

    pub fn from_integers<I>(coeffs: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<BigInt>,
    {
        Self::new(coeffs.into_iter().map(|c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero(trunc: usize) -> Self {
        Self { coeffs: vec![BigRational::zero(); trunc + 1] }
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(BigRational::one(), trunc)
    }

    pub fn constant(c: BigRational, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = c;
        s
    }

    /// `c * q^exp`, which is the zero series when `exp > trunc`.
    pub fn monomial(c: BigRational, exp: usize, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if exp <= trunc {
            s.coeffs[exp] = c;
        }
        s
    }

    /// A polynomial in `q` given by integer coefficients, lowest degree first.
    pub fn polynomial(coeffs: &[i64], trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        for (e, &c) in coeffs.iter().enumerate().take(trunc + 1) {
            s.coeffs[e] = BigRational::from_integer(c.into());
        }
        s
    }

    /// `(1 - q)^e` for a signed exponent `e`.
    pub fn one_minus_q_pow(e: i64, trunc: usize) -> Self {
        let base = Self::polynomial(&[1, -1], trunc);
        if e >= 0 {
            base.pow(e as u32)
        } else {
            // 1/(1-q)^m has coefficients C(n+m-1, m-1).
            let m = (-e) as u64;
            let mut s = Self::zero(trunc);
            let mut c = BigInt::one();
            for n in 0..=trunc {
                s.coeffs[n] = BigRational::from_integer(c.clone());
                c = c * BigInt::from(n as u64 + m) / BigInt::from(n as u64 + 1);
            }
            s
        }
    }

    /// `(q - 1)^e`.
    pub fn q_minus_one_pow(e: u32, trunc: usize) -> Self {
        Self::polynomial(&[-1, 1], trunc).pow(e)
    }

    /// The q-integer `[n] = 1 + q + ... + q^(n-1)`.
    pub fn q_integer(n: usize, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        for c in s.coeffs.iter_mut().take(n) {
            *c = BigRational::one();
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    /// Coefficient of `q^n`; `None` when `n` exceeds the truncation.
    pub fn coeff(&self, n: usize) -> Option<&BigRational> {
        self.coeffs.get(n)
    }

    /// Drops every coefficient above `q^trunc`. Raising the truncation is not possible.
    pub fn truncate(&self, trunc: usize) -> Self {
        let t = trunc.min(self.trunc());
        Self { coeffs: self.coeffs[..=t].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Lowest exponent with a nonzero coefficient, with that coefficient.
    pub fn first_nonzero(&self) -> Option<(usize, &BigRational)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    /// Integer coefficients, or `None` if some coefficient has a denominator.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(c.into()))
    }

    /// Multiplies by `q^e`, keeping the truncation.
    pub fn shift(&self, e: usize) -> Self {
        let mut s = Self::zero(self.trunc());
        for n in e..=self.trunc() {
            s.coeffs[n] = self.coeffs[n - e].clone();
        }
        s
    }

    /// `self += c * other`, over the overlapping range; truncation becomes the minimum.
    pub fn add_scaled(&mut self, other: &QSeries, c: &BigRational) {
        let t = self.trunc().min(other.trunc());
        self.coeffs.truncate(t + 1);
        if c.is_zero() {
            return;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += b * c;
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.trunc());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = a0.recip();
        let n = self.trunc();
        let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
        b.push(inv0.clone());
        for m in 1..=n {
            let mut acc = BigRational::zero();
            for k in 1..=m {
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    acc += a * &b[m - k];
                }
            }
            b.push(-(acc * &inv0));
        }
        Ok(Self { coeffs: b })
    }

    /// `exp(a)` for `a` with zero constant term, from `n f_n = sum_k k a_k f_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::BadConstantTerm("exp needs constant term 0"));
        }
        let n = self.trunc();
        let mut f: Vec<BigRational> = Vec::with_capacity(n + 1);
        f.push(BigRational::one());
        for m in 1..=n {
            let mut acc = BigRational::zero();
            for k in 1..=m {
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    acc += a * &f[m - k] * BigInt::from(k);
                }
            }
            f.push(acc / BigInt::from(m));
        }
        Ok(Self { coeffs: f })
    }

    /// `log(f)` for `f` with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::BadConstantTerm("log needs constant term 1"));
        }
        let n = self.trunc();
        let f = &self.coeffs;
        let mut g: Vec<BigRational> = vec![BigRational::zero(); n + 1];
        for m in 1..=n {
            let mut acc = &f[m] * BigInt::from(m);
            for k in 1..m {
                if !g[k].is_zero() && !f[m - k].is_zero() {
                    acc -= &g[k] * &f[m - k] * BigInt::from(k);
                }
            }
            g[m] = acc / BigInt::from(m);
        }
        Ok(Self { coeffs: g })
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let t = self.trunc().min(rhs.trunc());
        QSeries {
            coeffs: self.coeffs[..=t].iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let t = self.trunc().min(rhs.trunc());
        QSeries {
            coeffs: self.coeffs[..=t].iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let t = self.trunc().min(rhs.trunc());
        let mut out = vec![BigRational::zero(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(t + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs: out }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[{}](", self.trunc())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (n, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{a}*q")?,
                (_, true) => write!(f, "q^{n}")?,
                (_, false) => write!(f, "{a}*q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.trunc() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn poly(c: &[i64], t: usize) -> QSeries {
        QSeries::polynomial(c, t)
    }

    #[test]
    fn add_examples() {
        assert_eq!(&poly(&[1, 1], 1) + &poly(&[0, 2], 1), poly(&[1, 3], 1));
        let a = poly(&[3, -1, 4], 2);
        assert_eq!(&a + &QSeries::zero(2), a);
        assert_eq!(&poly(&[1, 1, 1], 2) + &poly(&[1], 1), poly(&[2, 1], 1));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&poly(&[1, -1], 3) * &poly(&[1, 1, 1, 1], 3), QSeries::one(3));
        let a = poly(&[2, 0, -5, 7], 3);
        assert_eq!(&a * &QSeries::one(3), a);
        assert_eq!(poly(&[1, 1], 2).pow(2), poly(&[1, 2, 1], 2));
    }

    #[test]
    fn inv_examples() {
        assert_eq!(poly(&[1, -1], 3).inv().unwrap(), poly(&[1, 1, 1, 1], 3));
        assert_eq!(QSeries::one(4).inv().unwrap(), QSeries::one(4));
        let inv = poly(&[2, 1], 1).inv().unwrap();
        assert_eq!(inv, QSeries::new(vec![r(1, 2), r(-1, 4)]));
        assert_eq!(&inv * &poly(&[2, 1], 1), QSeries::one(1));
        assert_eq!(poly(&[0, 1], 3).inv(), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn exp_log_examples() {
        assert_eq!(QSeries::zero(5).exp().unwrap(), QSeries::one(5));
        assert_eq!(QSeries::one(5).log().unwrap(), QSeries::zero(5));
        let e = poly(&[0, 1], 3).exp().unwrap();
        assert_eq!(e, QSeries::new(vec![r(1, 1), r(1, 1), r(1, 2), r(1, 6)]));
        assert!(matches!(QSeries::one(3).exp(), Err(Error::BadConstantTerm(_))));
        assert!(matches!(poly(&[2, 1], 3).log(), Err(Error::BadConstantTerm(_))));
    }

    #[test]
    fn is_zero_respects_truncation() {
        assert!(QSeries::zero(5).is_zero());
        assert!(!QSeries::monomial(r(1, 1), 5, 5).is_zero());
        assert!(QSeries::monomial(r(1, 1), 6, 5).is_zero());
    }

    #[test]
    fn one_minus_q_negative_power_is_inverse() {
        let a = QSeries::one_minus_q_pow(-4, 12);
        let b = QSeries::one_minus_q_pow(4, 12);
        assert_eq!(&a * &b, QSeries::one(12));
    }

    #[test]
    fn display() {
        let s = QSeries::new(vec![r(0, 1), r(1, 1), r(-3, 2)]);
        assert_eq!(s.to_string(), "q - 3/2*q^2 + O(q^3)");
    }

    fn series(trunc: usize) -> impl Strategy<Value = QSeries> {
        prop::collection::vec((-20i64..20, 1i64..5), trunc + 1)
            .prop_map(|v| QSeries::new(v.into_iter().map(|(n, d)| r(n, d)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in series(8), b in series(8), c in series(8)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn inverse_is_two_sided(a in series(8), c0 in 1i64..9) {
            let mut v = a.into_coeffs();
            v[0] = r(c0, 1);
            let a = QSeries::new(v);
            let inv = a.inv().unwrap();
            prop_assert_eq!(&a * &inv, QSeries::one(8));
        }

        #[test]
        fn exp_log_roundtrip(a in series(7)) {
            let mut v = a.into_coeffs();
            v[0] = BigRational::zero();
            let a = QSeries::new(v);
            let e = a.exp().unwrap();
            prop_assert_eq!(e.log().unwrap(), a.clone());
            let mut w = e.into_coeffs();
            w[0] = BigRational::one();
            let f = QSeries::new(w);
            prop_assert_eq!(f.log().unwrap().exp().unwrap(), f);
        }
    }
}
