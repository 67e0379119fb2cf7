//! Rational polyhedral cones stored by primitive integer generators, with the
//! facet description computed on demand by Fourier–Motzkin projection.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{project_homogeneous, LinearConstraint};

#[derive(Clone, Debug)]
pub struct RationalCone {
    ambient_dim: usize,
    generators: Vec<Vec<BigInt>>,
    description: OnceLock<FacetDescription>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct FacetDescription {
    /// Lexicographically sorted; includes `±y` pairs for every equation of the span.
    normals: Vec<Vec<BigInt>>,
    full_dimensional: bool,
}

impl PartialEq for RationalCone {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.generators == other.generators
    }
}

impl Eq for RationalCone {}

pub(crate) fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

fn primitive_rational(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    primitive(&ints)
}

fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().cloned().map(BigRational::from_integer).collect()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_q(a: &[BigInt], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
        .sum()
}

/// Rank of a list of integer vectors over `Q`.
pub(crate) fn rank(vectors: &[Vec<BigInt>], dim: usize) -> usize {
    crate::lattice::IntMatrix::from_rows(dim, vectors).rank()
}

/// Primitive integer basis of `{y : y · g = 0 for every g}`.
fn orthogonal_complement(vectors: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    // reduced row echelon form over Q
    let mut rows: Vec<Vec<BigRational>> = vectors.iter().map(|v| to_rational(v)).collect();
    let mut pivots = Vec::new();
    let mut done = 0;
    for col in 0..dim {
        let Some(p) = (done..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(done, p);
        let inv = rows[done][col].recip();
        rows[done].iter_mut().for_each(|a| *a *= &inv);
        let pivot = rows[done].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != done && !row[col].is_zero() {
                let f = row[col].clone();
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a -= &f * b);
            }
        }
        pivots.push(col);
        done += 1;
    }
    (0..dim)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut y = vec![BigRational::zero(); dim];
            y[free] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                y[p] = -rows[r][free].clone();
            }
            primitive_rational(&y)
        })
        .collect()
}

impl RationalCone {
    /// Cone spanned by integer generators in `Q^ambient_dim`. Generators are
    /// made primitive; zero vectors and duplicates are dropped.
    pub fn new<T: Into<BigInt> + Clone>(ambient_dim: usize, generators: &[Vec<T>]) -> Result<Self> {
        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        for g in generators {
            if g.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: g.len(),
                });
            }
            let g: Vec<BigInt> = g.iter().cloned().map(Into::into).collect();
            if g.iter().all(Zero::is_zero) {
                continue;
            }
            let p = primitive(&g);
            if !gens.contains(&p) {
                gens.push(p);
            }
        }
        Ok(RationalCone {
            ambient_dim,
            generators: gens,
            description: OnceLock::new(),
        })
    }

    /// Rational generators are scaled by the lcm of their denominators.
    pub fn from_rational(ambient_dim: usize, generators: &[Vec<BigRational>]) -> Result<Self> {
        let ints: Vec<Vec<BigInt>> = generators.iter().map(|g| primitive_rational(g)).collect();
        Self::new(ambient_dim, &ints)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    fn description(&self) -> &FacetDescription {
        self.description.get_or_init(|| self.compute_facets())
    }

    /// Primitive normals `F_k` with `cone = {v : F_k · v ≥ 0}`, sorted
    /// lexicographically. A cone that is not full-dimensional also lists
    /// each equation of its span as an opposite pair.
    pub fn facets(&self) -> &[Vec<BigInt>] {
        &self.description().normals
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.description().full_dimensional
    }

    fn compute_facets(&self) -> FacetDescription {
        let r = self.ambient_dim;
        let g = self.generators.len();
        let dim = rank(&self.generators, r);
        let complement = orthogonal_complement(&self.generators, r);

        // variables (v_1..v_r, λ_1..λ_g): v = Σ λ_j g_j, λ ≥ 0
        let n = r + g;
        let eqs: Vec<LinearConstraint> = (0..r)
            .map(|i| {
                let mut coeffs = vec![BigRational::zero(); n];
                coeffs[i] = BigRational::one();
                for (j, gen) in self.generators.iter().enumerate() {
                    coeffs[r + j] = -BigRational::from_integer(gen[i].clone());
                }
                LinearConstraint {
                    coeffs,
                    rhs: BigRational::zero(),
                }
            })
            .collect();
        let ineqs: Vec<LinearConstraint> = (0..g)
            .map(|j| {
                let mut coeffs = vec![BigRational::zero(); n];
                coeffs[r + j] = BigRational::one();
                LinearConstraint {
                    coeffs,
                    rhs: BigRational::zero(),
                }
            })
            .collect();
        let candidates = project_homogeneous(n, r, &eqs, &ineqs);

        let mut normals: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for y in &complement {
            normals.insert(y.clone());
            normals.insert(y.iter().map(|x| -x).collect());
        }
        for f in candidates {
            let f = if complement.is_empty() {
                f
            } else {
                project_onto_span(&f, &complement)
            };
            if f.iter().all(Zero::is_zero) {
                continue;
            }
            let tight: Vec<Vec<BigInt>> = self
                .generators
                .iter()
                .filter(|gen| dot(&f, gen).is_zero())
                .cloned()
                .collect();
            debug_assert!(self
                .generators
                .iter()
                .all(|gen| !dot(&f, gen).is_negative()));
            if tight.len() < self.generators.len() && rank(&tight, r) + 1 == dim {
                normals.insert(f);
            }
        }
        FacetDescription {
            normals: normals.into_iter().collect(),
            full_dimensional: dim == r,
        }
    }

    pub fn contains(&self, v: &[BigRational]) -> Result<bool> {
        self.check_dim(v.len())?;
        Ok(self.facets().iter().all(|f| !dot_q(f, v).is_negative()))
    }

    pub fn contains_int(&self, v: &[i64]) -> Result<bool> {
        let q: Vec<BigRational> = v
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        self.contains(&q)
    }

    /// Strict interior membership; requires a full-dimensional cone.
    pub fn contains_interior(&self, v: &[BigRational]) -> Result<bool> {
        self.check_dim(v.len())?;
        if !self.is_full_dimensional() {
            return Err(Error::ConeNotFullDimensional);
        }
        Ok(self.facets().iter().all(|f| dot_q(f, v).is_positive()))
    }

    pub fn contains_interior_int(&self, v: &[i64]) -> Result<bool> {
        let q: Vec<BigRational> = v
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        self.contains_interior(&q)
    }

    /// No line inside the cone, i.e. the normals span `Q^r`.
    pub fn is_pointed(&self) -> bool {
        rank(self.facets(), self.ambient_dim) == self.ambient_dim
    }

    /// Generators of `{v : F_k · v ≥ 0}` recovered from the facet normals
    /// (the facets of the cone spanned by the normals). Meaningful for pointed
    /// full-dimensional cones.
    pub fn generators_from_facets(&self) -> Result<RationalCone> {
        let dual = RationalCone::new(self.ambient_dim, self.facets())?;
        RationalCone::new(self.ambient_dim, dual.facets())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: len,
            });
        }
        Ok(())
    }
}

/// Orthogonal projection of `f` onto the orthogonal complement of `span(c)`,
/// scaled to a primitive integer vector.
fn project_onto_span(f: &[BigInt], c: &[Vec<BigInt>]) -> Vec<BigInt> {
    // solve (C C^T) a = C f, then f - C^T a
    let k = c.len();
    let mut gram: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| BigRational::from_integer(dot(&c[i], &c[j])))
                .collect()
        })
        .collect();
    let mut rhs: Vec<BigRational> = c
        .iter()
        .map(|ci| BigRational::from_integer(dot(ci, f)))
        .collect();
    for col in 0..k {
        let p = (col..k)
            .find(|&i| !gram[i][col].is_zero())
            .expect("Gram matrix is invertible");
        gram.swap(col, p);
        rhs.swap(col, p);
        let inv = gram[col][col].recip();
        gram[col].iter_mut().for_each(|a| *a *= &inv);
        rhs[col] *= &inv;
        let prow = gram[col].clone();
        let prhs = rhs[col].clone();
        for i in 0..k {
            if i != col && !gram[i][col].is_zero() {
                let m = gram[i][col].clone();
                gram[i]
                    .iter_mut()
                    .zip(&prow)
                    .for_each(|(a, b)| *a -= &m * b);
                rhs[i] -= &m * &prhs;
            }
        }
    }
    let mut out = to_rational(f);
    for (a, ci) in rhs.iter().zip(c) {
        for (o, x) in out.iter_mut().zip(ci) {
            *o -= a * BigRational::from_integer(x.clone());
        }
    }
    primitive_rational(&out)
}
