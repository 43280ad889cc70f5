//! Order-by-order verification of the cyclic sum formula, its lemma, the
//! Ohno relation and duality.
//!
//! Every identity here is a linear combination of terms of one common
//! weight `w`, so the check runs in the modified normalization and the
//! residual is reported after multiplying back by `(1-q)^w`.

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::expander::{self, Expander};
use crate::index::{compositions, dual, Index};
use crate::qseries::QSeries;

/// Supplies modified-normalization expansions to the verifiers.
pub trait ExpansionSource: Sync {
    fn zeta(&self, k: &Index, trunc: usize) -> Result<QSeries>;
    fn t(&self, k: &Index, trunc: usize) -> Result<QSeries>;
}

impl ExpansionSource for Expander {
    fn zeta(&self, k: &Index, trunc: usize) -> Result<QSeries> {
        self.modified(k, trunc)
    }
    fn t(&self, k: &Index, trunc: usize) -> Result<QSeries> {
        expander::expand_t(k, trunc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statement {
    CyclicSum,
    CyclicLemma,
    Ohno,
    Duality,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub statement: Statement,
    pub index: Index,
    pub l: Option<u32>,
    pub trunc: usize,
    /// `lhs - rhs` in raw normalization.
    pub residual: QSeries,
    pub passed: bool,
}

impl VerificationReport {
    fn new(statement: Statement, index: &Index, l: Option<u32>, weight: usize, modified: QSeries) -> Self {
        let residual = expander::to_raw(&modified, weight);
        Self {
            statement,
            index: index.clone(),
            l,
            trunc: residual.trunc(),
            passed: residual.is_zero(),
            residual,
        }
    }

    /// Lowest q-order where the residual is nonzero, with its coefficient.
    pub fn first_failure(&self) -> Option<(usize, BigRational)> {
        self.residual.first_nonzero().map(|(n, c)| (n, c.clone()))
    }
}

/// Accumulates `sum c_i zeta_bar(k_i)` at a fixed truncation.
struct Combination<'a> {
    src: &'a dyn ExpansionSource,
    acc: QSeries,
}

impl<'a> Combination<'a> {
    fn new(src: &'a dyn ExpansionSource, trunc: usize) -> Self {
        Self { src, acc: QSeries::zero(trunc) }
    }

    fn zeta(&mut self, parts: Vec<u32>, sign: i64) -> Result<()> {
        let k = Index::new(parts)?;
        let s = self.src.zeta(&k, self.acc.trunc())?;
        self.acc.add_scaled(&s, &BigRational::from_integer(sign.into()));
        Ok(())
    }

    fn t(&mut self, k: &Index, sign: i64) -> Result<()> {
        let s = self.src.t(k, self.acc.trunc())?;
        self.acc.add_scaled(&s, &BigRational::from_integer(sign.into()));
        Ok(())
    }
}

fn require_part_two(k: &Index) -> Result<()> {
    if k.has_part_at_least_two() {
        Ok(())
    } else {
        Err(Error::NoPartAtLeastTwo(k.clone()))
    }
}

/// Terms of the cyclic sum formula for `k`: `(parts, sign)` with sign `+1`
/// on the rotated `zeta(k_i + 1, ...)` side and `-1` on the other.
pub fn cyclic_terms(k: &Index) -> Result<Vec<(Vec<u32>, i64)>> {
    require_part_two(k)?;
    let mut terms = Vec::new();
    for i in 0..k.depth() {
        let rot = k.rotate(i);
        let mut lhs = rot.parts().to_vec();
        lhs[0] += 1;
        terms.push((lhs, 1));
        terms.extend(lemma_tail_terms(&rot));
    }
    Ok(terms)
}

/// `-zeta(k_1 - j, k_2, ..., k_r, j + 1)` for `j = 0..=k_1-2`.
fn lemma_tail_terms(k: &Index) -> Vec<(Vec<u32>, i64)> {
    let k1 = k.parts()[0];
    (0..k1.saturating_sub(1))
        .map(|j| {
            let mut p = k.parts().to_vec();
            p[0] = k1 - j;
            p.push(j + 1);
            (p, -1)
        })
        .collect()
}

pub fn verify_cyclic(k: &Index, trunc: usize) -> Result<VerificationReport> {
    verify_cyclic_with(Expander::global(), k, trunc)
}

pub fn verify_cyclic_with(src: &dyn ExpansionSource, k: &Index, trunc: usize) -> Result<VerificationReport> {
    let mut comb = Combination::new(src, trunc);
    for (parts, sign) in cyclic_terms(k)? {
        comb.zeta(parts, sign)?;
    }
    Ok(VerificationReport::new(Statement::CyclicSum, k, None, k.weight() + 1, comb.acc))
}

/// Checks the lemma behind the cyclic sum formula for one index.
///
/// The residual is oriented as
/// `zeta(k_1+1, k_2, ...) - sum_j zeta(k_1-j, k_2, ..., j+1) + T(k_2, ..., k_r, k_1) - T(k)`
/// so that summing it over all rotations of `k` reproduces the residual of
/// [`verify_cyclic`] term for term.
pub fn verify_cyclic_lemma(k: &Index, trunc: usize) -> Result<VerificationReport> {
    verify_cyclic_lemma_with(Expander::global(), k, trunc)
}

pub fn verify_cyclic_lemma_with(
    src: &dyn ExpansionSource,
    k: &Index,
    trunc: usize,
) -> Result<VerificationReport> {
    require_part_two(k)?;
    let mut comb = Combination::new(src, trunc);
    let mut bumped = k.parts().to_vec();
    bumped[0] += 1;
    comb.zeta(bumped, 1)?;
    for (parts, sign) in lemma_tail_terms(k) {
        comb.zeta(parts, sign)?;
    }
    comb.t(&k.rotate(1), 1)?;
    comb.t(k, -1)?;
    Ok(VerificationReport::new(Statement::CyclicLemma, k, None, k.weight() + 1, comb.acc))
}

/// Terms of the Ohno relation: compositions on `k` with sign `+1`, on its dual with `-1`.
pub fn ohno_terms(k: &Index, l: u32) -> Result<Vec<(Vec<u32>, i64)>> {
    let d = dual(k)?;
    let mut terms = Vec::new();
    for (idx, sign) in [(k, 1), (&d, -1)] {
        for c in compositions(l, idx.depth()) {
            let parts = idx.parts().iter().zip(&c).map(|(a, b)| a + b).collect();
            terms.push((parts, sign));
        }
    }
    Ok(terms)
}

pub fn verify_ohno(k: &Index, l: u32, trunc: usize) -> Result<VerificationReport> {
    verify_ohno_with(Expander::global(), k, l, trunc)
}

pub fn verify_ohno_with(
    src: &dyn ExpansionSource,
    k: &Index,
    l: u32,
    trunc: usize,
) -> Result<VerificationReport> {
    let mut comb = Combination::new(src, trunc);
    for (parts, sign) in ohno_terms(k, l)? {
        comb.zeta(parts, sign)?;
    }
    Ok(VerificationReport::new(Statement::Ohno, k, Some(l), k.weight() + l as usize, comb.acc))
}

pub fn verify_duality(k: &Index, trunc: usize) -> Result<VerificationReport> {
    let mut r = verify_ohno(k, 0, trunc)?;
    r.statement = Statement::Duality;
    Ok(r)
}

/// Sum of lemma residuals over all rotations of `k`.
pub fn summed_lemma_residual(src: &dyn ExpansionSource, k: &Index, trunc: usize) -> Result<QSeries> {
    let mut acc = QSeries::zero(trunc);
    for i in 0..k.depth() {
        let r = verify_cyclic_lemma_with(src, &k.rotate(i), trunc)?;
        acc.add_scaled(&r.residual, &BigRational::one());
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{enumerate_admissible_up_to, enumerate_all};

    fn ix(p: &[u32]) -> Index {
        Index::new(p.to_vec()).unwrap()
    }

    #[test]
    fn cyclic_examples() {
        assert!(verify_cyclic(&ix(&[2]), 60).unwrap().passed);
        assert!(verify_cyclic(&ix(&[2, 1]), 60).unwrap().passed);
        assert!(matches!(verify_cyclic(&ix(&[1, 1]), 10), Err(Error::NoPartAtLeastTwo(_))));
        // (2): zeta(3) on the left, zeta(2,1) on the right
        let t = cyclic_terms(&ix(&[2])).unwrap();
        assert_eq!(t, vec![(vec![3], 1), (vec![2, 1], -1)]);
    }

    #[test]
    fn cyclic_to_weight_five() {
        for w in 1..=5 {
            for k in enumerate_all(w).into_iter().filter(Index::has_part_at_least_two) {
                let r = verify_cyclic(&k, 30).unwrap();
                assert!(r.passed, "{k}: {:?}", r.first_failure());
            }
        }
    }

    #[test]
    fn lemma_examples() {
        assert!(verify_cyclic_lemma(&ix(&[2]), 40).unwrap().passed);
        assert!(verify_cyclic_lemma(&ix(&[3, 1]), 40).unwrap().passed);
        assert!(verify_cyclic_lemma(&ix(&[1, 2]), 30).unwrap().passed);
    }

    #[test]
    fn ohno_examples() {
        assert!(verify_ohno(&ix(&[2]), 0, 60).unwrap().passed);
        assert!(verify_ohno(&ix(&[3]), 0, 60).unwrap().passed);
        assert!(verify_ohno(&ix(&[3]), 1, 60).unwrap().passed);
        assert!(verify_duality(&ix(&[4, 1]), 40).unwrap().passed);
        assert!(matches!(verify_ohno(&ix(&[1, 3]), 0, 10), Err(Error::NotAdmissible(_))));
        let t = ohno_terms(&ix(&[3]), 1).unwrap();
        assert_eq!(t, vec![(vec![4], 1), (vec![3, 1], -1), (vec![2, 2], -1)]);
    }

    #[test]
    fn ohno_small_weights() {
        for k in enumerate_admissible_up_to(4) {
            for l in 0..=3 {
                assert!(verify_ohno(&k, l, 25).unwrap().passed, "{k} l={l}");
            }
        }
    }

    /// Adds `q^5` to every zeta expansion and `2 q^7` to every T expansion.
    struct Corrupted;

    impl ExpansionSource for Corrupted {
        fn zeta(&self, k: &Index, trunc: usize) -> Result<QSeries> {
            let s = Expander::global().modified(k, trunc)?;
            Ok(&s + &QSeries::monomial(BigRational::one(), 5, trunc))
        }
        fn t(&self, k: &Index, trunc: usize) -> Result<QSeries> {
            let s = expander::expand_t(k, trunc)?;
            Ok(&s + &QSeries::monomial(BigRational::from_integer(2.into()), 7, trunc))
        }
    }

    #[test]
    fn lemma_sum_is_cyclic_residual() {
        for k in [ix(&[2]), ix(&[2, 1]), ix(&[3, 1, 2]), ix(&[1, 1, 3])] {
            let good = verify_cyclic(&k, 20).unwrap();
            assert_eq!(summed_lemma_residual(Expander::global(), &k, 20).unwrap(), good.residual);
            let bad = verify_cyclic_with(&Corrupted, &k, 20).unwrap();
            let summed = summed_lemma_residual(&Corrupted, &k, 20).unwrap();
            assert_eq!(summed, bad.residual);
            if k.parts().iter().map(|&p| p - 1).sum::<u32>() != k.depth() as u32 {
                assert!(!bad.passed, "{k}");
            }
        }
    }

    #[test]
    fn failure_reports_first_order() {
        let bad = verify_ohno_with(&Corrupted, &ix(&[3]), 1, 20).unwrap();
        // one term on the left and two on the right: net -q^5 in modified form
        assert!(!bad.passed);
        assert_eq!(bad.first_failure().unwrap().0, 5);
    }
}
