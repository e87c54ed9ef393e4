//! Exterior powers of `Q^n` in the lexicographic basis `e_I`.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::linalg::{Rat, RatMatrix};

/// All `p`-element subsets of `0..n`, lexicographically.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if p > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..p).collect();
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - p + i {
                cur[i] += 1;
                for j in i + 1..p {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Sign of the shuffle putting `a ++ b` in increasing order, or zero when
/// the index sets meet.
pub fn shuffle_sign(a: &[usize], b: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for x in a {
        for y in b {
            if x == y {
                return 0;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

/// Basis bookkeeping for `Λ^p Q^n`.
#[derive(Clone, Debug)]
pub struct ExteriorBasis {
    pub n: usize,
    pub p: usize,
    subsets: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl ExteriorBasis {
    pub fn new(n: usize, p: usize) -> Self {
        let subsets = subsets(n, p);
        let index = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        ExteriorBasis { n, p, subsets, index }
    }

    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s).copied()
    }
}

/// `v_1 ∧ ... ∧ v_k` in `Λ^k Q^n`; the coordinates are the maximal minors.
pub fn wedge_vectors(n: usize, vs: &[Vec<Rat>]) -> Vec<Rat> {
    let k = vs.len();
    if k == 0 {
        return vec![Rat::one()];
    }
    let basis = subsets(n, k);
    basis
        .iter()
        .map(|cols| {
            let rows: Vec<Vec<Rat>> = vs.iter().map(|v| cols.iter().map(|&c| v[c].clone()).collect()).collect();
            RatMatrix::from_rows(&rows, k).determinant()
        })
        .collect()
}

/// Product `Λ^r × Λ^s -> Λ^{r+s}` on coordinate vectors.
pub fn wedge_product(n: usize, r: usize, a: &[Rat], s: usize, b: &[Rat]) -> Vec<Rat> {
    let ba = subsets(n, r);
    let bb = subsets(n, s);
    let target = ExteriorBasis::new(n, r + s);
    let mut out = vec![Rat::zero(); target.dim()];
    for (i, si) in ba.iter().enumerate() {
        if a[i].is_zero() {
            continue;
        }
        for (j, sj) in bb.iter().enumerate() {
            if b[j].is_zero() {
                continue;
            }
            let sign = shuffle_sign(si, sj);
            if sign == 0 {
                continue;
            }
            let k = target.index_of(&merge_sorted(si, sj)).expect("subset in basis");
            let term = &a[i] * &b[j];
            if sign > 0 {
                out[k] += term;
            } else {
                out[k] -= term;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn subset_counts() {
        for n in 0..6 {
            for p in 0..=n + 1 {
                assert_eq!(subsets(n, p).len(), binomial(n, p));
            }
        }
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn wedge_is_alternating() {
        let e0 = vec![rat(1), rat(0), rat(0)];
        let e1 = vec![rat(0), rat(1), rat(0)];
        let ab = wedge_product(3, 1, &e0, 1, &e1);
        let ba = wedge_product(3, 1, &e1, 1, &e0);
        assert_eq!(ab, vec![rat(1), rat(0), rat(0)]);
        assert_eq!(ba, vec![rat(-1), rat(0), rat(0)]);
        assert!(wedge_product(3, 1, &e0, 1, &e0).iter().all(Zero::is_zero));
    }

    #[test]
    fn wedge_vectors_matches_products() {
        let u = vec![rat(1), rat(2), rat(3)];
        let v = vec![rat(0), rat(-1), rat(5)];
        assert_eq!(wedge_vectors(3, &[u.clone(), v.clone()]), wedge_product(3, 1, &u, 1, &v));
    }
}
