//! Coefficient matrices of modified q-MZVs, their exact ranks, dimension
//! bounds from the proved relations, and relation mining.
//!
//! Matrices are oriented with rows indexed by q-exponents and columns by
//! indices in canonical order, so kernel vectors are linear relations.

pub mod linalg;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::expander::{expand_modified, Expander};
use crate::index::{enumerate_admissible, enumerate_admissible_up_to, enumerate_all, Index};
use crate::relations::{cyclic_terms, ohno_terms};

/// Conjectured dimensions `d_k` of the weight-`k` MZV space for `k = 2..=10`,
/// quoted from the literature as display data. Never computed here.
pub const D_K: [usize; 9] = [1, 1, 1, 2, 2, 3, 4, 5, 7];

pub fn d_k(k: usize) -> Option<usize> {
    k.checked_sub(2).and_then(|i| D_K.get(i)).copied()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatMatrix {
    pub entries: Vec<Vec<BigRational>>,
    /// q-exponent of each row.
    pub row_labels: Vec<usize>,
    pub col_labels: Vec<Index>,
}

impl RatMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    /// Rows scaled to integers (denominators cleared row by row).
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.iter().map(|r| linalg::clear_denominators(r)).collect()
    }
}

/// Builds the matrix `(a_n(k))` for the given row exponents and column indices.
pub fn coefficient_matrix(rows: std::ops::RangeInclusive<usize>, cols: Vec<Index>) -> Result<RatMatrix> {
    let trunc = *rows.end();
    let exp = Expander::global();
    let series = cols
        .par_iter()
        .map(|k| exp.modified(k, trunc))
        .collect::<Result<Vec<_>>>()?;
    let row_labels: Vec<usize> = rows.collect();
    let entries = row_labels
        .iter()
        .map(|&n| series.iter().map(|s| s.coeffs()[n].clone()).collect())
        .collect();
    Ok(RatMatrix { entries, row_labels, col_labels: cols })
}

fn ak_last_row(k: usize) -> usize {
    k + (1 << (k - 2)) - 2
}

/// `A_k`: rows `n = k-1 ..= k + 2^(k-2) - 2 + n_extra`, columns the admissible indices of weight `k`.
pub fn build_ak(k: usize, n_extra: usize) -> Result<RatMatrix> {
    let cols = enumerate_admissible(k)?;
    coefficient_matrix(k - 1..=ak_last_row(k) + n_extra, cols)
}

/// `A_{<=k}`: rows `n = 1 ..= k + 2^(k-2) - 2`, columns all admissible indices of weight `2..=k`.
/// At `k = 2` the range is widened to `n = 1, 2`.
pub fn build_a_le_k(k: usize) -> Result<RatMatrix> {
    enumerate_admissible(k)?;
    coefficient_matrix(1..=ak_last_row(k).max(k), enumerate_admissible_up_to(k))
}

pub fn rank_exact(m: &RatMatrix) -> usize {
    linalg::rank(m.integer_rows(), m.cols())
}

/// Relation vectors over the admissible weight-`k` indices given by the
/// cyclic sum formula (sources of weight `k-1`) and the Ohno relation
/// (admissible indices of weight `w <= k` with `l = k - w`).
pub fn proved_relation_vectors(k: usize) -> Result<Vec<Vec<BigInt>>> {
    let cols = enumerate_admissible(k)?;
    let pos: HashMap<Index, usize> = cols.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let to_vector = |terms: Vec<(Vec<u32>, i64)>| -> Result<Vec<BigInt>> {
        let mut v = vec![BigInt::zero(); cols.len()];
        for (parts, c) in terms {
            let idx = Index::new(parts)?;
            v[pos[&idx]] += c;
        }
        Ok(v)
    };
    let mut rows = Vec::new();
    for src in enumerate_all(k - 1).into_iter().filter(Index::has_part_at_least_two) {
        rows.push(to_vector(cyclic_terms(&src)?)?);
    }
    for w in 2..=k {
        for src in enumerate_admissible(w)? {
            rows.push(to_vector(ohno_terms(&src, (k - w) as u32)?)?);
        }
    }
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    Ok(rows)
}

/// `2^(k-2)` minus the rank of the span of all cyclic-sum and Ohno relations in weight `k`.
pub fn upper_bound_from_relations(k: usize) -> Result<usize> {
    let rows = proved_relation_vectors(k)?;
    let n = 1usize << (k - 2);
    Ok(n - linalg::rank(rows, n))
}

// ---------------------------------------------------------------------------
// Relations

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationStatus {
    MinedCandidate,
    VerifiedToOrder,
}

/// `sum c_i zeta_bar(k_i) = 0` with primitive integer coefficients, first one positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Index, BigInt)>,
    pub verified_to: usize,
    pub status: RelationStatus,
}

impl Relation {
    /// Builds a relation from a coefficient vector over `cols`, dropping zero terms.
    pub fn from_vector(cols: &[Index], v: &[BigInt], verified_to: usize, status: RelationStatus) -> Self {
        let terms = cols
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        Relation { terms, verified_to, status }
    }

    /// Coefficient vector over `cols`; `None` if some term is not among them.
    pub fn to_vector(&self, cols: &[Index]) -> Option<Vec<BigInt>> {
        let mut v = vec![BigInt::zero(); cols.len()];
        for (k, c) in &self.terms {
            let i = cols.iter().position(|x| x == k)?;
            v[i] += c;
        }
        Some(v)
    }

    pub fn weights(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.terms.iter().map(|(k, _)| k.weight()).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn max_weight(&self) -> usize {
        self.terms.iter().map(|(k, _)| k.weight()).max().unwrap_or(0)
    }

    /// `sum c_i zeta_bar(k_i)` through `q^trunc`, recomputed from scratch.
    pub fn evaluate_fresh(&self, trunc: usize) -> Result<Vec<BigInt>> {
        let series = self
            .terms
            .par_iter()
            .map(|(k, _)| expand_modified(k, trunc))
            .collect::<Result<Vec<_>>>()?;
        Ok(combine(&self.terms.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>(), &series_to_ints(&series)))
    }
}

fn series_to_ints(series: &[crate::qseries::QSeries]) -> Vec<Vec<BigInt>> {
    series
        .iter()
        .map(|s| s.to_integers().expect("modified expansions are integral"))
        .collect()
}

fn combine(coeffs: &[BigInt], series: &[Vec<BigInt>]) -> Vec<BigInt> {
    let len = series.iter().map(Vec::len).min().unwrap_or(0);
    let mut acc = vec![BigInt::zero(); len];
    for (c, s) in coeffs.iter().zip(series) {
        if c.is_zero() {
            continue;
        }
        for (a, x) in acc.iter_mut().zip(s) {
            if !x.is_zero() {
                *a += c * x;
            }
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct MiningResult {
    pub columns: Vec<Index>,
    pub rows_used: usize,
    pub rank: usize,
    pub kernel_dimension: usize,
    /// One relation per kernel basis vector; failed re-verification leaves
    /// the status at [`RelationStatus::MinedCandidate`].
    pub relations: Vec<Relation>,
}

impl MiningResult {
    pub fn all_verified(&self) -> bool {
        self.relations.iter().all(|r| r.status == RelationStatus::VerifiedToOrder)
    }

    /// Whether the given relation lies in the Q-span of the mined kernel.
    pub fn contains(&self, terms: &[(Index, i64)]) -> bool {
        let rel = Relation {
            terms: terms.iter().map(|(k, c)| (k.clone(), BigInt::from(*c))).collect(),
            verified_to: 0,
            status: RelationStatus::MinedCandidate,
        };
        let Some(v) = rel.to_vector(&self.columns) else { return false };
        let basis: Vec<Vec<BigInt>> = self
            .relations
            .iter()
            .map(|r| r.to_vector(&self.columns).expect("mined over these columns"))
            .collect();
        linalg::in_span(&basis, &v)
    }
}

/// Default row count: column count plus `max(20, column count)`.
pub fn default_rows(cols: usize) -> usize {
    cols + cols.max(20)
}

fn mine(cols: Vec<Index>, first_row: usize, n_rows: usize, n_verify: usize) -> Result<MiningResult> {
    let last = first_row + n_rows - 1;
    let m = coefficient_matrix(first_row..=last, cols.clone())?;
    let e = linalg::bareiss(m.integer_rows(), m.cols());
    let kernel = linalg::kernel(&e);

    // Re-verification uses fresh expansions, bypassing the cache.
    let fresh = cols
        .par_iter()
        .map(|k| expand_modified(k, n_verify))
        .collect::<Result<Vec<_>>>()?;
    let fresh = series_to_ints(&fresh);
    let relations = kernel
        .par_iter()
        .map(|v| {
            let ok = combine(v, &fresh).iter().all(Zero::is_zero);
            let status = if ok { RelationStatus::VerifiedToOrder } else { RelationStatus::MinedCandidate };
            Relation::from_vector(&cols, v, if ok { n_verify } else { 0 }, status)
        })
        .collect();
    Ok(MiningResult {
        rank: e.rank(),
        kernel_dimension: kernel.len(),
        rows_used: n_rows,
        columns: cols,
        relations,
    })
}

/// Kernel of the `n_rows x 2^(k-2)` matrix with rows starting at `q^(k-1)`,
/// each basis vector re-verified through `q^n_verify`.
pub fn mine_relations(k: usize, n_rows: usize, n_verify: usize) -> Result<MiningResult> {
    let cols = enumerate_admissible(k)?;
    mine(cols, k - 1, n_rows, n_verify)
}

/// Like [`mine_relations`] over all admissible indices of weight `2..=k`, rows from `q^1`.
pub fn mine_mixed_weight(k: usize, n_rows: usize, n_verify: usize) -> Result<MiningResult> {
    enumerate_admissible(k)?;
    mine(enumerate_admissible_up_to(k), 1, n_rows, n_verify)
}

/// The MZV relation obtained by multiplying by `(1-q)^w` and letting `q -> 1`:
/// only the terms of maximal weight `w` survive.
pub fn mzv_limit(r: &Relation) -> Vec<(Index, BigInt)> {
    let w = r.max_weight();
    r.terms.iter().filter(|(k, _)| k.weight() == w).cloned().collect()
}

/// Small helper for callers holding machine-size coefficients.
pub fn mzv_limit_i64(r: &Relation) -> Vec<(Index, i64)> {
    mzv_limit(r)
        .into_iter()
        .map(|(k, c)| (k, c.to_i64().expect("coefficient fits in i64")))
        .collect()
}
