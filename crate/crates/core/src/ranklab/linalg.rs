//! Exact linear algebra over Z and Q: fraction-free elimination, rank, kernel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row echelon form produced by fraction-free (Bareiss) elimination.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// The first `pivots.len()` rows, each with its leading entry at the matching pivot column.
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Fraction-free Gaussian elimination. Every division is exact: after step
/// `t` the live entries are `(t+1) x (t+1)` minors of the input, divided by
/// the previous pivot, which is itself such a minor.
pub fn bareiss(mut m: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    m.retain(|row| row.iter().any(|x| !x.is_zero()));
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    for c in 0..cols {
        let r = pivots.len();
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = &pivot_row[c];
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = m[r][c].clone();
        pivots.push(c);
        // Rows that vanished carry no information; dropping them keeps later steps cheap.
        let mut rest = m.split_off(r + 1);
        rest.retain(|row| row[c + 1..].iter().any(|x| !x.is_zero()));
        m.extend(rest);
    }
    m.truncate(pivots.len());
    Echelon { rows: m, pivots, cols }
}

pub fn rank(m: Vec<Vec<BigInt>>, cols: usize) -> usize {
    bareiss(m, cols).rank()
}

/// Scales a rational row to a primitive integer vector.
pub fn clear_denominators(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect()
}

/// Divides out the content and makes the first nonzero entry positive.
pub fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sign = v.iter().find(|x| !x.is_zero()).map_or(1, |x| if x.is_negative() { -1 } else { 1 });
    let g = g * BigInt::from(sign);
    v.into_iter().map(|x| x / &g).collect()
}

/// Basis of the right kernel `{x : M x = 0}` as primitive integer vectors,
/// one per free column, in increasing free-column order.
pub fn kernel(e: &Echelon) -> Vec<Vec<BigInt>> {
    let is_pivot = {
        let mut v = vec![false; e.cols];
        for &p in &e.pivots {
            v[p] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in (0..e.cols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![BigRational::zero(); e.cols];
        x[free] = BigRational::one();
        for (row, &p) in e.rows.iter().zip(&e.pivots).rev() {
            let mut s = BigRational::zero();
            for j in p + 1..e.cols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s += &x[j] * &row[j];
                }
            }
            x[p] = -s / &row[p];
        }
        basis.push(primitive(clear_denominators(&x)));
    }
    basis
}

/// Whether `v` lies in the Q-span of `basis`.
pub fn in_span(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let cols = v.len();
    let base_rank = rank(basis.to_vec(), cols);
    let mut ext = basis.to_vec();
    ext.push(v.to_vec());
    rank(ext, cols) == base_rank
}
