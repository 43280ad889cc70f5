//! Indices `(k_1, ..., k_r)` of positive integers and their combinatorics.
//!
//! The derived `Ord` on [`Index`] is the canonical order used for matrix
//! columns, cache keys and output: lexicographic on the parts, with a
//! proper prefix sorting before its extensions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Index(Vec<u32>);

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Parse("an index needs at least one part".into()));
        }
        if parts.contains(&0) {
            return Err(Error::Parse(format!("parts must be positive: {parts:?}")));
        }
        Ok(Self(parts))
    }

    /// Like [`Index::new`] for parts already known to be valid.
    pub(crate) fn from_parts(parts: Vec<u32>) -> Self {
        debug_assert!(!parts.is_empty() && !parts.contains(&0));
        Self(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn height(&self) -> usize {
        self.0.iter().filter(|&&k| k >= 2).count()
    }

    pub fn is_admissible(&self) -> bool {
        self.0[0] >= 2
    }

    pub fn has_part_at_least_two(&self) -> bool {
        self.height() > 0
    }

    pub(crate) fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::NotAdmissible(self.clone()))
        }
    }

    /// `(k_{i+1}, ..., k_r, k_1, ..., k_i)`.
    pub fn rotate(&self, i: usize) -> Index {
        let mut p = self.0.clone();
        let r = p.len();
        p.rotate_left(i % r);
        Index(p)
    }

    pub fn code(&self) -> Result<Code> {
        code_of(self)
    }

    pub fn dual(&self) -> Result<Index> {
        dual(self)
    }
}

impl TryFrom<Vec<u32>> for Index {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Index::new(v)
    }
}

impl From<Index> for Vec<u32> {
    fn from(k: Index) -> Self {
        k.0
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Index {
    type Err = Error;

    /// Parses `"(3,2,1)"`; the parentheses are optional and spaces are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .unwrap_or(t);
        if inner.trim().is_empty() {
            return Err(Error::Parse(format!("empty index `{s}`")));
        }
        let parts = inner
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad part `{}` in `{s}`", p.trim()))))
            .collect::<Result<Vec<_>>>()?;
        Index::new(parts)
    }
}

/// Block encoding `((a_1,b_1), ..., (a_s,b_s))` of an admissible index:
/// block `i` is `a_i + 1` followed by `b_i - 1` ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Code(Vec<(u32, u32)>);

impl Code {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self> {
        if pairs.is_empty() || pairs.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(Error::Parse(format!("code entries must be positive: {pairs:?}")));
        }
        Ok(Self(pairs))
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn decode(&self) -> Index {
        let mut parts = Vec::new();
        for &(a, b) in &self.0 {
            parts.push(a + 1);
            parts.extend(std::iter::repeat_n(1, (b - 1) as usize));
        }
        Index::from_parts(parts)
    }
}

pub fn code_of(k: &Index) -> Result<Code> {
    k.require_admissible()?;
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(k.height());
    for &p in k.parts() {
        if p >= 2 {
            pairs.push((p - 1, 1));
        } else {
            pairs.last_mut().expect("admissible index starts with a part >= 2").1 += 1;
        }
    }
    Ok(Code(pairs))
}

/// The dual index: reverse the code and swap each `(a_i, b_i)`.
pub fn dual(k: &Index) -> Result<Index> {
    let code = code_of(k)?;
    let swapped = code.0.iter().rev().map(|&(a, b)| (b, a)).collect();
    Ok(Code(swapped).decode())
}

/// Every index of weight `k` (all `2^(k-1)` compositions), in canonical order.
pub fn enumerate_all(k: usize) -> Vec<Index> {
    fn rec(rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Index>) {
        if rem == 0 {
            out.push(Index::from_parts(cur.clone()));
            return;
        }
        for p in 1..=rem {
            cur.push(p);
            rec(rem - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k as u32, &mut Vec::new(), &mut out);
    }
    out
}

/// The `2^(k-2)` admissible indices of weight `k`, in canonical order.
pub fn enumerate_admissible(k: usize) -> Result<Vec<Index>> {
    if k < 2 {
        return Err(Error::WeightTooSmall(k));
    }
    let mut out = Vec::with_capacity(1 << (k - 2));
    for first in 2..=k as u32 {
        let rest = k - first as usize;
        if rest == 0 {
            out.push(Index::from_parts(vec![first]));
        } else {
            for tail in enumerate_all(rest) {
                let mut p = vec![first];
                p.extend_from_slice(tail.parts());
                out.push(Index::from_parts(p));
            }
        }
    }
    Ok(out)
}

/// Admissible indices of every weight in `2..=k`, grouped by weight and
/// canonical within each weight.
pub fn enumerate_admissible_up_to(k: usize) -> Vec<Index> {
    (2..=k).flat_map(|w| enumerate_admissible(w).expect("w >= 2")).collect()
}

/// `I(k, r, s)`: indices of weight `k`, depth `r`, height `s`.
pub fn enumerate_by(k: usize, r: usize, s: usize) -> Vec<Index> {
    if k < r + s || s > r || r == 0 {
        return Vec::new();
    }
    enumerate_all(k)
        .into_iter()
        .filter(|x| x.depth() == r && x.height() == s)
        .collect()
}

/// `I_0(k, r, s)`: the admissible members of `I(k, r, s)`.
pub fn enumerate_by_admissible(k: usize, r: usize, s: usize) -> Vec<Index> {
    enumerate_by(k, r, s).into_iter().filter(Index::is_admissible).collect()
}

/// All length-`r` sequences of non-negative integers summing to `l`.
pub fn compositions(l: u32, r: usize) -> Vec<Vec<u32>> {
    fn rec(rem: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in (0..=rem).rev() {
            cur.push(c);
            rec(rem - c, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r > 0 {
        rec(l, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(p: &[u32]) -> Index {
        Index::new(p.to_vec()).unwrap()
    }

    #[test]
    fn statistics() {
        let k = ix(&[3, 1, 2, 1, 1]);
        assert_eq!((k.weight(), k.depth(), k.height()), (8, 5, 2));
        assert!(k.is_admissible());
        assert!(!ix(&[1, 2]).is_admissible());
    }

    #[test]
    fn code_examples() {
        assert_eq!(code_of(&ix(&[2])).unwrap().pairs(), &[(1, 1)]);
        assert_eq!(code_of(&ix(&[3])).unwrap().pairs(), &[(2, 1)]);
        assert_eq!(code_of(&ix(&[3, 1, 2, 1, 1])).unwrap().pairs(), &[(2, 2), (1, 3)]);
        assert_eq!(Code::new(vec![(2, 2), (1, 3)]).unwrap().decode(), ix(&[3, 1, 2, 1, 1]));
        assert!(matches!(code_of(&ix(&[1, 2])), Err(Error::NotAdmissible(_))));
        assert!(Code::new(vec![(0, 1)]).is_err());
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(&ix(&[2])).unwrap(), ix(&[2]));
        assert_eq!(dual(&ix(&[3])).unwrap(), ix(&[2, 1]));
        assert_eq!(dual(&ix(&[2, 1])).unwrap(), ix(&[3]));
        assert_eq!(dual(&ix(&[4, 1])).unwrap(), ix(&[3, 1, 1]));
        assert!(dual(&ix(&[1, 1])).is_err());
    }

    #[test]
    fn duality_properties_to_weight_ten() {
        for w in 2..=10 {
            for k in enumerate_admissible(w).unwrap() {
                let d = dual(&k).unwrap();
                assert!(d.is_admissible());
                assert_eq!(d.weight(), w);
                assert_eq!(dual(&d).unwrap(), k);
                assert_eq!(d.depth(), w - k.depth());
                assert_eq!(d.height(), k.height());
                assert_eq!(code_of(&k).unwrap().pairs().len(), k.height());
                assert_eq!(code_of(&k).unwrap().decode(), k);
            }
        }
    }

    #[test]
    fn admissible_enumeration() {
        assert!(matches!(enumerate_admissible(1), Err(Error::WeightTooSmall(1))));
        assert_eq!(enumerate_admissible(2).unwrap(), vec![ix(&[2])]);
        assert_eq!(enumerate_admissible(3).unwrap(), vec![ix(&[2, 1]), ix(&[3])]);
        assert_eq!(
            enumerate_admissible(4).unwrap(),
            vec![ix(&[2, 1, 1]), ix(&[2, 2]), ix(&[3, 1]), ix(&[4])]
        );
        let six = enumerate_admissible(6).unwrap();
        assert_eq!(six.len(), 16);
        for p in [&[6][..], &[5, 1], &[4, 2], &[3, 3], &[4, 1, 1], &[3, 2, 1]] {
            assert!(six.contains(&ix(p)));
        }
        for w in 2..=12 {
            let v = enumerate_admissible(w).unwrap();
            assert_eq!(v.len(), 1 << (w - 2));
            assert!(v.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn by_weight_depth_height() {
        assert_eq!(enumerate_by_admissible(4, 2, 1), vec![ix(&[3, 1])]);
        assert_eq!(enumerate_by(3, 3, 0), vec![ix(&[1, 1, 1])]);
        assert!(enumerate_by(3, 2, 2).is_empty());
        assert!(enumerate_by(5, 2, 3).is_empty());
        for k in 2..=9 {
            let mut total = 0;
            for r in 1..=k {
                for s in 0..=r {
                    let v = enumerate_by_admissible(k, r, s);
                    if s == 0 {
                        assert!(v.is_empty());
                    }
                    total += v.len();
                }
            }
            assert_eq!(total, 1 << (k - 2));
        }
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(compositions(4, 3).len(), 15);
        assert!(compositions(5, 4).iter().all(|c| c.len() == 4 && c.iter().sum::<u32>() == 5));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("(3,2,1)".parse::<Index>().unwrap(), ix(&[3, 2, 1]));
        assert_eq!(" ( 3, 1 ) ".parse::<Index>().unwrap(), ix(&[3, 1]));
        assert_eq!("2".parse::<Index>().unwrap(), ix(&[2]));
        assert!("()".parse::<Index>().is_err());
        assert!("(3,0)".parse::<Index>().is_err());
        assert!("(3,x)".parse::<Index>().is_err());
        assert_eq!(ix(&[3, 2, 1]).to_string(), "(3,2,1)");
    }

    #[test]
    fn serde_as_array() {
        let k = ix(&[7, 2]);
        assert_eq!(serde_json::to_string(&k).unwrap(), "[7,2]");
        assert_eq!(serde_json::from_str::<Index>("[7,2]").unwrap(), k);
        assert!(serde_json::from_str::<Index>("[]").is_err());
    }
}
