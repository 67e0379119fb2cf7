//! Exact integer-matrix algebra: Smith normal form, membership in integer
//! column spans and presentations of quotient groups `Z^r / L`.
//!
//! Everything is carried out over arbitrary precision integers. Pivoting is
//! deterministic (smallest nonzero absolute value, ties broken by `(row, col)`)
//! so that the projection maps derived from the transforms are reproducible.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row {i}");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    /// Builds the `rows × columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns<T: Into<BigInt> + Clone>(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has wrong length");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "incompatible matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "incompatible matrix-vector product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = (rank..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(p, rank);
            for i in rank + 1..a.rows {
                for j in col + 1..a.cols {
                    let v = &a[(i, j)] * &a[(rank, col)] - &a[(i, col)] * &a[(rank, j)];
                    a[(i, j)] = v / &prev;
                }
                a[(i, col)] = BigInt::zero();
            }
            prev = a[(rank, col)].clone();
            rank += 1;
        }
        rank
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

    /// row[dst] += factor * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * factor;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * factor;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `left · A · right = diag(diag)` with unimodular `left` and `right`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub left: IntMatrix,
    pub right: IntMatrix,
    /// `min(rows, cols)` non-negative entries, each dividing the next; zeros trail.
    pub diag: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }

    /// The diagonal `rows × cols` matrix `left · A · right`.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.left.rows(), self.right.cols());
        for (i, x) in self.diag.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }
}

fn smallest_nonzero<I>(cells: I, m: &IntMatrix) -> Option<(usize, usize)>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (i, j) in cells {
        let a = m[(i, j)].abs();
        if a.is_zero() {
            continue;
        }
        // strict comparison keeps the earliest (row, col) on ties
        if best.as_ref().is_none_or(|(_, b)| a < *b) {
            best = Some(((i, j), a));
        }
    }
    best.map(|(pos, _)| pos)
}

/// Smith normal form with transforms.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut left = IntMatrix::identity(m);
    let mut right = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        let cells = (t..m).flat_map(|i| (t..n).map(move |j| (i, j)));
        let Some((pr, pc)) = smallest_nonzero(cells, &d) else {
            break;
        };
        d.swap_rows(t, pr);
        left.swap_rows(t, pr);
        d.swap_cols(t, pc);
        right.swap_cols(t, pc);

        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                left.add_row_multiple(i, t, &q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                right.add_col_multiple(j, t, &q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                let cells = (t..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
                let (pr, pc) = smallest_nonzero(cells, &d).expect("pivot row/column nonzero");
                d.swap_rows(t, pr);
                left.swap_rows(t, pr);
                d.swap_cols(t, pc);
                right.swap_cols(t, pc);
                continue;
            }
            // pivot must divide the whole remaining block
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    left.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
    }

    let diag = (0..m.min(n)).map(|i| d[(i, i)].clone()).collect();
    SmithDecomposition { left, right, diag }
}

/// Integer coefficients `c` with `L · c = v`, or `None` when `v` is not in the
/// integer column span of `L`.
pub fn solve_membership(v: &[BigInt], lattice: &IntMatrix) -> Result<Option<Vec<BigInt>>> {
    Ok(solve_with_kernel(v, lattice)?.map(|(c, _)| c))
}

/// A particular solution and a basis of the homogeneous solutions.
pub type SolutionWithKernel = (Vec<BigInt>, Vec<Vec<BigInt>>);

/// Like [`solve_membership`], additionally returning a basis of the integer
/// kernel `{c : L · c = 0}`.
pub fn solve_with_kernel(v: &[BigInt], lattice: &IntMatrix) -> Result<Option<SolutionWithKernel>> {
    if v.len() != lattice.rows() {
        return Err(Error::DimensionMismatch {
            expected: lattice.rows(),
            found: v.len(),
        });
    }
    let s = snf(lattice);
    let rank = s.rank();
    let y = s.left.mul_vec(v);
    let mut z = vec![BigInt::zero(); lattice.cols()];
    for (i, yi) in y.iter().enumerate() {
        if i < rank {
            let (q, r) = yi.div_rem(&s.diag[i]);
            if !r.is_zero() {
                return Ok(None);
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return Ok(None);
        }
    }
    let c = s.right.mul_vec(&z);
    debug_assert_eq!(lattice.mul_vec(&c), v);
    let kernel = (rank..lattice.cols()).map(|j| s.right.column(j)).collect();
    Ok(Some((c, kernel)))
}

/// A finitely generated abelian group `Z^r / L` in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPresentation {
    pub ambient_rank: usize,
    pub free_rank: usize,
    /// Factors `> 1`, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
    /// Maps `Z^r` to `(torsion coordinates, free coordinates)`; one row per coordinate.
    pub projection: IntMatrix,
}

/// Image of a vector in a [`QuotientPresentation`]: torsion coordinates
/// reduced into `[0, factor)`, followed by the free coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientElement {
    #[serde(with = "crate::bigint_serde::vec")]
    pub torsion: Vec<BigInt>,
    #[serde(with = "crate::bigint_serde::vec")]
    pub free: Vec<BigInt>,
}

impl QuotientElement {
    pub fn is_zero(&self) -> bool {
        self.torsion.iter().chain(&self.free).all(Zero::is_zero)
    }
}

impl fmt::Display for QuotientElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .torsion
            .iter()
            .chain(&self.free)
            .map(ToString::to_string)
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl QuotientPresentation {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }

    pub fn zero_element(&self) -> QuotientElement {
        QuotientElement {
            torsion: vec![BigInt::zero(); self.invariant_factors.len()],
            free: vec![BigInt::zero(); self.free_rank],
        }
    }

    /// Reduces a raw coordinate vector (torsion part not yet reduced).
    pub fn reduce(&self, mut coords: Vec<BigInt>) -> QuotientElement {
        let free = coords.split_off(self.invariant_factors.len());
        let torsion = coords
            .into_iter()
            .zip(&self.invariant_factors)
            .map(|(c, m)| c.mod_floor(m))
            .collect();
        QuotientElement { torsion, free }
    }

    pub fn add(&self, a: &QuotientElement, b: &QuotientElement) -> QuotientElement {
        let coords = a
            .torsion
            .iter()
            .zip(&b.torsion)
            .chain(a.free.iter().zip(&b.free))
            .map(|(x, y)| x + y)
            .collect();
        self.reduce(coords)
    }
}

impl fmt::Display for QuotientPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Presentation of `Z^r / (column span of L)`.
pub fn quotient(lattice: &IntMatrix) -> QuotientPresentation {
    let r = lattice.rows();
    let s = snf(lattice);
    let rank = s.rank();
    let torsion_idx: Vec<usize> = (0..rank).filter(|&i| !s.diag[i].is_one()).collect();
    let invariant_factors = torsion_idx.iter().map(|&i| s.diag[i].clone()).collect();
    let rows: Vec<usize> = torsion_idx.into_iter().chain(rank..r).collect();
    let mut projection = IntMatrix::zeros(rows.len(), r);
    for (k, &i) in rows.iter().enumerate() {
        for j in 0..r {
            projection[(k, j)] = s.left[(i, j)].clone();
        }
    }
    QuotientPresentation {
        ambient_rank: r,
        free_rank: r - rank,
        invariant_factors,
        projection,
    }
}

pub fn push_to_quotient(v: &[BigInt], q: &QuotientPresentation) -> Result<QuotientElement> {
    if v.len() != q.ambient_rank {
        return Err(Error::DimensionMismatch {
            expected: q.ambient_rank,
            found: v.len(),
        });
    }
    Ok(q.reduce(q.projection.mul_vec(v)))
}

/// Extended gcd over a list: returns `(g, t)` with `Σ t_i a_i = g ≥ 0`.
pub fn gcd_with_cofactors(a: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut t: Vec<BigInt> = vec![BigInt::zero(); a.len()];
    for (i, x) in a.iter().enumerate() {
        let e = g.extended_gcd(x);
        for ti in t.iter_mut().take(i) {
            *ti *= &e.x;
        }
        t[i] = e.y;
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        t.iter_mut().for_each(|x| *x = -&*x);
    }
    (g, t)
}

/// The canonical element of the coset `base + span_Z(kernel)`: coordinates
/// are fixed left to right, each taking the smallest absolute value still
/// reachable, with the negative value preferred on a tie.
pub fn lex_min_abs_representative(base: &[BigInt], kernel: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut v = base.to_vec();
    let mut basis: Vec<Vec<BigInt>> = kernel.to_vec();
    for i in 0..v.len() {
        let row: Vec<BigInt> = basis.iter().map(|k| k[i].clone()).collect();
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        let (g, t) = gcd_with_cofactors(&row);
        let r = v[i].mod_floor(&g);
        let neg = &r - &g;
        let target = if neg.abs() <= r { neg } else { r };
        let z = (&target - &v[i]) / &g;
        for (tc, k) in t.iter().zip(&basis) {
            let f = tc * &z;
            for (vj, kj) in v.iter_mut().zip(k) {
                *vj += &f * kj;
            }
        }
        debug_assert_eq!(v[i], target);
        // restrict to kernel vectors with zero i-th coordinate
        let s = snf(&IntMatrix::from_rows(row.len(), &[row]));
        basis = (1..s.right.cols())
            .map(|l| {
                let mut w = vec![BigInt::zero(); v.len()];
                for (c, k) in basis.iter().enumerate() {
                    let f = &s.right[(c, l)];
                    if f.is_zero() {
                        continue;
                    }
                    for (wj, kj) in w.iter_mut().zip(k) {
                        *wj += f * kj;
                    }
                }
                w
            })
            .collect();
    }
    v
}
