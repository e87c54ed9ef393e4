//! Exact integer and rational linear algebra.
//!
//! Everything here is arbitrary precision. Integer matrices carry the
//! Smith normal form machinery used for class groups, quotient lattices and
//! integral solvability; rational matrices carry row reduction, kernels and
//! an incremental sparse echelon form used for the large rank computations
//! in the Jacobian ring and the Cech complexes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(x: i64) -> Int {
    BigInt::from(x)
}

pub fn rat(x: i64) -> Rat {
    BigRational::from_integer(BigInt::from(x))
}

pub fn rat_of(x: &Int) -> Rat {
    BigRational::from_integer(x.clone())
}

pub fn ivec(xs: &[i64]) -> Vec<Int> {
    xs.iter().map(|&x| int(x)).collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_mixed(a: &[Rat], b: &[Int]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * rat_of(y)).sum()
}

/// Divides out the gcd of the entries; the zero vector is returned unchanged.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = v.iter().fold(Int::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Clears denominators and makes the result primitive.
pub fn primitive_from_rat(v: &[Rat]) -> Vec<Int> {
    let l = v.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
    let scaled: Vec<Int> = v.iter().map(|x| (x * rat_of(&l)).to_integer()).collect();
    primitive(&scaled)
}

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed for the empty case.
    pub fn from_rows(rows: &[Vec<Int>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        IntMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let big: Vec<Vec<Int>> = rows.iter().map(|r| ivec(r)).collect();
        Self::from_rows(&big, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Int) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Whether every off-diagonal entry vanishes.
    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::new(self.rows, self.cols, self.data.iter().map(rat_of).collect())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.to_rows();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    pub fn rank(&self) -> usize {
        self.to_rat().rank()
    }

    /// Inverse of a unimodular matrix; `None` when the determinant is not a unit.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        let inv = self.to_rat().inverse()?;
        let data: Option<Vec<Int>> = inv
            .data
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect();
        Some(IntMatrix::new(self.rows, self.cols, data?))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += c * row[source]
    fn add_row(&mut self, target: usize, source: usize, c: &Int) {
        for j in 0..self.cols {
            let s = self.data[source * self.cols + j].clone();
            if !s.is_zero() {
                self.data[target * self.cols + j] += c * s;
            }
        }
    }

    /// col[target] += c * col[source]
    fn add_col(&mut self, target: usize, source: usize, c: &Int) {
        for i in 0..self.rows {
            let s = self.data[i * self.cols + source].clone();
            if !s.is_zero() {
                self.data[i * self.cols + target] += c * s;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[i * self.cols + j];
            *x = -x.clone();
        }
    }
}

/// `u * m * v == s` with `u`, `v` unimodular and `s` diagonal with a
/// divisibility chain of nonnegative entries.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Nonzero diagonal entries in order.
    pub fn invariant_factors(&self) -> Vec<Int> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn min_abs_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with minimal-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut t = 0;
    while t < r.min(c) {
        let Some((pi, pj)) = min_abs_nonzero(&a, t) else {
            break;
        };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).div_floor(a.get(t, t));
                let nq = -q;
                a.add_row(i, t, &nq);
                u.add_row(i, t, &nq);
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).div_floor(a.get(t, t));
                let nq = -q;
                a.add_col(j, t, &nq);
                v.add_col(j, t, &nq);
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                // Divisibility: fold an offending row into the pivot row.
                let p = a.get(t, t).clone();
                let bad = (t + 1..r).find(|&i| {
                    (t + 1..c).any(|j| !a.get(i, j).mod_floor(&p).is_zero())
                });
                match bad {
                    None => break,
                    Some(i) => {
                        let one = Int::one();
                        a.add_row(t, i, &one);
                        u.add_row(t, i, &one);
                        continue;
                    }
                }
            }
            // Bring the smallest remaining entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t + 1..r {
                let x = a.get(i, t);
                if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..c {
                let x = a.get(t, j);
                if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
            }
            if best.1 != t {
                a.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Snf { u, s: a, v }
}

/// Finitely generated abelian group presented as the cokernel of an integer
/// matrix (columns are relations, rows index the generators).
///
/// Elements are coordinate vectors: one entry per torsion factor (reduced
/// into `[0, d)`) followed by `free_rank` free coordinates.
#[derive(Clone, Debug)]
pub struct FinAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    pub presentation: IntMatrix,
    pub snf: Snf,
    u_inv: IntMatrix,
    torsion_rows: Vec<usize>,
    free_rows: Vec<usize>,
}

impl FinAbGroup {
    pub fn element_len(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.element_len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Image of a vector of the generator lattice.
    pub fn class_of(&self, x: &[Int]) -> Vec<Int> {
        let y = self.snf.u.mul_vec(x);
        let mut out = Vec::with_capacity(self.element_len());
        for (k, &row) in self.torsion_rows.iter().enumerate() {
            out.push(y[row].mod_floor(&self.torsion[k]));
        }
        for &row in &self.free_rows {
            out.push(y[row].clone());
        }
        out
    }

    /// The free coordinates of `class_of(x)`, i.e. the image in the group modulo torsion.
    pub fn free_part(&self, x: &[Int]) -> Vec<Int> {
        let y = self.snf.u.mul_vec(x);
        self.free_rows.iter().map(|&r| y[r].clone()).collect()
    }

    /// Some vector of the generator lattice mapping to `g`.
    pub fn lift(&self, g: &[Int]) -> Vec<Int> {
        assert_eq!(g.len(), self.element_len(), "group element has wrong length");
        let mut y = vec![Int::zero(); self.presentation.rows()];
        for (k, &row) in self.torsion_rows.iter().enumerate() {
            y[row] = g[k].mod_floor(&self.torsion[k]);
        }
        for (k, &row) in self.free_rows.iter().enumerate() {
            y[row] = g[self.torsion.len() + k].clone();
        }
        self.u_inv.mul_vec(&y)
    }

    pub fn normalize(&self, g: &[Int]) -> Vec<Int> {
        let mut out = g.to_vec();
        for (k, d) in self.torsion.iter().enumerate() {
            out[k] = out[k].mod_floor(d);
        }
        out
    }

    pub fn add(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        let s: Vec<Int> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.normalize(&s)
    }

    pub fn sub(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        let s: Vec<Int> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.normalize(&s)
    }

    pub fn scale(&self, k: &Int, a: &[Int]) -> Vec<Int> {
        let s: Vec<Int> = a.iter().map(|x| k * x).collect();
        self.normalize(&s)
    }

    pub fn is_zero_element(&self, g: &[Int]) -> bool {
        self.normalize(g).iter().all(Zero::is_zero)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cokernel of `m : Z^cols -> Z^rows`.
pub fn cokernel(m: &IntMatrix) -> FinAbGroup {
    let snf = smith_normal_form(m);
    let factors = snf.invariant_factors();
    let rank = factors.len();
    let mut torsion = Vec::new();
    let mut torsion_rows = Vec::new();
    for (i, d) in factors.iter().enumerate() {
        if !d.is_one() {
            torsion.push(d.clone());
            torsion_rows.push(i);
        }
    }
    let free_rows: Vec<usize> = (rank..m.rows()).collect();
    let u_inv = snf.u.inverse_unimodular().expect("SNF transform is unimodular");
    FinAbGroup {
        free_rank: free_rows.len(),
        torsion,
        presentation: m.clone(),
        snf,
        u_inv,
        torsion_rows,
        free_rows,
    }
}

/// Some integer solution of `a x = b`, if one exists.
pub fn solve_integral(a: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    assert_eq!(a.rows(), b.len());
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let factors = snf.invariant_factors();
    let mut y = vec![Int::zero(); a.cols()];
    for (i, val) in ub.iter().enumerate() {
        if i < factors.len() {
            let (q, r) = val.div_rem(&factors[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !val.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Integer basis of the kernel lattice `{x in Z^cols : a x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<Int>> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    (rank..a.cols()).map(|j| snf.v.col(j)).collect()
}

/// Dense rational matrix, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "RatMatrix{rows:?}")
    }
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        RatMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        RatMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let big: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        Self::from_rows(&big, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rat) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot_rat(self.row(i), v)).collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k).clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += &a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..a.cols {
                    a.data.swap(p * a.cols + j, r * a.cols + j);
                }
            }
            let inv = a.get(r, c).recip();
            for j in c..a.cols {
                let x = a.get(r, j) * &inv;
                a.set(r, j, x);
            }
            for i in 0..a.rows {
                if i == r || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in c..a.cols {
                    let x = a.get(i, j) - &f * a.get(r, j);
                    a.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Rank and a kernel basis (one vector per free column).
    pub fn rank_and_kernel(&self) -> (usize, Vec<Vec<Rat>>) {
        let (e, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut kernel = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -e.get(r, free).clone();
            }
            kernel.push(v);
        }
        (pivots.len(), kernel)
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = RatMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let (e, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, e.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Some solution of `a x = b`, if the system is consistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut aug = RatMatrix::zeros(self.rows, self.cols + 1);
        for (i, bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, bi.clone());
        }
        let (e, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = e.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = a.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                if a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c) / &piv;
                for j in c..n {
                    let x = a.get(i, j) - &f * a.get(c, j);
                    a.set(i, j, x);
                }
            }
        }
        det
    }
}

/// Sparse rational vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Rat)>;

pub fn sparse_from_dense(v: &[Rat]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sparse_to_dense(v: &SparseVec, len: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// `a - c * b`
fn sparse_axpy(a: &SparseVec, c: &Rat, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ai = a.get(i).map(|e| e.0);
        let bj = b.get(j).map(|e| e.0);
        match (ai, bj) {
            (Some(x), Some(y)) if x == y => {
                let v = &a[i].1 - c * &b[j].1;
                if !v.is_zero() {
                    out.push((x, v));
                }
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(a[i].clone());
                i += 1;
            }
            (Some(_), None) => {
                out.push(a[i].clone());
                i += 1;
            }
            (_, Some(y)) => {
                out.push((y, -(c * &b[j].1)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Incremental echelon basis of a subspace of `Q^len`, keyed by leading index.
///
/// Each stored vector has leading coefficient one and no two share a
/// leading index, so a vector reduces to zero exactly when it lies in the span.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    len: usize,
    pivots: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Echelon { len, pivots: BTreeMap::new() }
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce_sparse(&self, mut v: SparseVec) -> SparseVec {
        while let Some((lead, coef)) = v.first().cloned() {
            match self.pivots.get(&lead) {
                Some(p) => v = sparse_axpy(&v, &coef, p),
                None => break,
            }
        }
        v
    }

    /// Inserts `v`; returns whether the rank grew.
    pub fn insert_sparse(&mut self, v: SparseVec) -> bool {
        let r = self.reduce_sparse(v);
        let Some((lead, coef)) = r.first().cloned() else {
            return false;
        };
        let inv = coef.recip();
        let normalized: SparseVec = r.into_iter().map(|(i, x)| (i, x * &inv)).collect();
        self.pivots.insert(lead, normalized);
        true
    }

    pub fn insert(&mut self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.len);
        self.insert_sparse(sparse_from_dense(v))
    }

    pub fn contains_sparse(&self, v: SparseVec) -> bool {
        self.reduce_sparse(v).is_empty()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.contains_sparse(sparse_from_dense(v))
    }

    pub fn basis(&self) -> Vec<Vec<Rat>> {
        self.pivots.values().map(|p| sparse_to_dense(p, self.len)).collect()
    }
}

/// Rank of the span of the given sparse vectors.
pub fn sparse_rank(len: usize, vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new(len);
    for v in vectors {
        e.insert_sparse(v);
    }
    e.rank()
}

/// A linear subspace of `Q^n` stored by a basis in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rat>>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis == other.basis
    }
}

impl Eq for Subspace {}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let id = RatMatrix::identity(ambient);
        Subspace { ambient, basis: (0..ambient).map(|i| id.row(i).to_vec()).collect() }
    }

    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = Vec<Rat>>) -> Self {
        let rows: Vec<Vec<Rat>> = vectors.into_iter().collect();
        if rows.is_empty() {
            return Self::zero(ambient);
        }
        let (e, pivots) = RatMatrix::from_rows(&rows, ambient).rref();
        let basis = (0..pivots.len()).map(|i| e.row(i).to_vec()).collect();
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        RatMatrix::from_rows(&rows, self.ambient).rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Self::span(self.ambient, self.basis.iter().chain(&other.basis).cloned())
    }

    /// Orthogonal complement under the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        if self.basis.is_empty() {
            return Self::full(self.ambient);
        }
        let (_, ker) = RatMatrix::from_rows(&self.basis, self.ambient).rank_and_kernel();
        Self::span(self.ambient, ker)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        self.annihilator().sum(&other.annihilator()).annihilator()
    }
}

/// `{x : a x = 0}` for the rows `a` of an `n`-column system.
pub fn solution_space(n: usize, equations: &[Vec<Rat>]) -> Subspace {
    Subspace::span(n, equations.iter().cloned()).annihilator()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(s: &Snf) -> Vec<i64> {
        (0..s.s.rows().min(s.s.cols()))
            .map(|i| i64::try_from(s.s.get(i, i).clone()).unwrap())
            .collect()
    }

    fn check_snf(m: &IntMatrix) -> Snf {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.s);
        assert!(s.s.is_diagonal());
        assert!(s.u.det().abs().is_one());
        assert!(s.v.det().abs().is_one());
        s
    }

    #[test]
    fn snf_identity() {
        let s = check_snf(&IntMatrix::identity(2));
        assert_eq!(s.s, IntMatrix::identity(2));
    }

    #[test]
    fn snf_two_by_two() {
        let s = check_snf(&IntMatrix::from_i64_rows(&[&[2, 4], &[6, 8]]));
        assert_eq!(diag(&s), vec![2, 4]);
    }

    #[test]
    fn snf_zero() {
        let s = check_snf(&IntMatrix::zeros(2, 3));
        assert!(s.s.is_zero());
    }

    #[test]
    fn snf_divisibility_needs_fixup() {
        // diag(2, 3) is diagonal but not in normal form.
        let s = check_snf(&IntMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]));
        assert_eq!(diag(&s), vec![1, 6]);
    }

    #[test]
    fn cokernel_of_p2_rays() {
        let m = IntMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[-1, -1]]);
        let g = cokernel(&m);
        assert_eq!(g.free_rank, 1);
        assert!(g.torsion.is_empty());
        // quotient map kills the image
        for j in 0..2 {
            assert!(g.is_zero_element(&g.class_of(&m.col(j))));
        }
        let c: Vec<Vec<Int>> = (0..3).map(|i| g.class_of(&IntMatrix::identity(3).col(i))).collect();
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_eq!(format!("{g}"), "Z");
    }

    #[test]
    fn cokernel_trivial_and_cyclic() {
        assert!(cokernel(&IntMatrix::identity(3)).is_trivial());
        let g = cokernel(&IntMatrix::from_i64_rows(&[&[3]]));
        assert_eq!(g.torsion, vec![int(3)]);
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.class_of(&ivec(&[5])), ivec(&[2]));
    }

    #[test]
    fn lift_round_trip() {
        let m = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 6], &[1, 1]]);
        let g = cokernel(&m);
        for a in -3..4 {
            let e = g.normalize(&vec![int(a); g.element_len()]);
            assert_eq!(g.class_of(&g.lift(&e)), e);
        }
    }

    #[test]
    fn rank_kernel_small() {
        let (r, k) = RatMatrix::identity(3).rank_and_kernel();
        assert_eq!((r, k.len()), (3, 0));
        let m = RatMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        let (r, k) = m.rank_and_kernel();
        assert_eq!(r, 1);
        assert_eq!(k.len(), 1);
        // proportional to (2, -1)
        assert_eq!(&k[0][0] * rat(-1), &k[0][1] * rat(2));
        assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn integral_solve() {
        let a = IntMatrix::from_i64_rows(&[&[1, 0], &[1, 2]]);
        assert_eq!(solve_integral(&a, &ivec(&[0, -2])), Some(ivec(&[0, -1])));
        assert_eq!(solve_integral(&a, &ivec(&[0, -1])), None);
    }

    #[test]
    fn echelon_membership() {
        let mut e = Echelon::new(3);
        assert!(e.insert(&[rat(1), rat(2), rat(0)]));
        assert!(e.insert(&[rat(0), rat(1), rat(1)]));
        assert!(!e.insert(&[rat(2), rat(5), rat(1)]));
        assert!(e.contains(&[rat(1), rat(3), rat(1)]));
        assert!(!e.contains(&[rat(0), rat(0), rat(1)]));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn subspace_intersection() {
        let a = Subspace::span(3, vec![vec![rat(1), rat(0), rat(0)], vec![rat(0), rat(1), rat(0)]]);
        let b = Subspace::span(3, vec![vec![rat(0), rat(1), rat(0)], vec![rat(0), rat(0), rat(1)]]);
        let c = a.intersect(&b);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&[rat(0), rat(7), rat(0)]));
    }

    #[test]
    fn bareiss_det() {
        let m = IntMatrix::from_i64_rows(&[&[0, 2, 1], &[1, 0, 3], &[4, 5, 6]]);
        assert_eq!(m.det(), int(17));
        assert_eq!(m.to_rat().determinant(), rat(17));
    }
}
