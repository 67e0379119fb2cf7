//! Hypotheses, the index set `U`, class groups, canonical classes and graded
//! shifts for `T = T(X; D_1, ..., D_s)` and `R = R(X; D_1, ..., D_s)`.
//!
//! Positivity ("some combination is ample", "ample plus effective") is decided
//! by exact feasibility over the cones of the variety. Strict interior
//! conditions `F·v > 0` are written as `F·v ≥ 1`; every system below is
//! homogeneous in the strict part, so nothing is lost.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{DivisorClass, VarietyPresentation};
use crate::lattice::{
    self, lex_min_abs_representative, push_to_quotient, IntMatrix, QuotientElement,
    QuotientPresentation,
};
use crate::lp::{feasible, FeasibilityQuery};

/// Which of the two multi-section rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    /// `⊕_{n ∈ N^s} H^0(X, O_X(Σ n_i D_i))`
    T,
    /// `⊕_{n ∈ Z^s} H^0(X, O_X(Σ n_i D_i))`
    R,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::T => write!(f, "T"),
            Ring::R => write!(f, "R"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSectionSetup {
    pub variety: VarietyPresentation,
    pub divisors: Vec<DivisorClass>,
}

/// Sorted 1-based indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct USet(Vec<usize>);

impl USet {
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        USet(indices)
    }

    /// 1-based membership test.
    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for USet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A class `F` together with its image under `q` (ring T) or `p` (ring R).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedModuleClass {
    pub ring: Ring,
    pub class_vector: DivisorClass,
    pub quotient_coords: QuotientElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub ring: Ring,
    pub omega_class: QuotientElement,
    pub free: bool,
    /// `ω ≅ ring(shift)`, normalized as the lexicographically smallest
    /// absolute values among all solutions.
    #[serde(with = "crate::bigint_serde::opt_vec")]
    pub shift: Option<Vec<BigInt>>,
    /// Basis of the homogeneous solutions; empty when the shift is unique.
    #[serde(with = "crate::bigint_serde::vec_vec")]
    pub shift_solution_lattice: Vec<Vec<BigInt>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightClass {
    ExactlyOne,
    AtLeastTwo,
}

impl fmt::Display for HeightClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightClass::ExactlyOne => write!(f, "= 1"),
            HeightClass::AtLeastTwo => write!(f, ">= 2"),
        }
    }
}

/// Height of `Q_j = ⊕_{n_j > 0} T_n` for `j = 1..s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HeightReport(pub Vec<HeightClass>);

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn qb(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

impl MultiSectionSetup {
    pub fn new(variety: VarietyPresentation, divisors: Vec<DivisorClass>) -> Result<Self> {
        if divisors.is_empty() {
            return Err(Error::validation(
                "divisors",
                "at least one divisor is required",
            ));
        }
        for (i, d) in divisors.iter().enumerate() {
            if d.len() != variety.class_rank {
                return Err(Error::validation(
                    format!("divisors[{i}]"),
                    format!(
                        "expected {} coordinates, found {}",
                        variety.class_rank,
                        d.len()
                    ),
                ));
            }
        }
        Ok(MultiSectionSetup { variety, divisors })
    }

    pub fn s(&self) -> usize {
        self.divisors.len()
    }

    pub fn class_rank(&self) -> usize {
        self.variety.class_rank
    }

    fn ample_combination_query(&self, lower_bound: Option<i64>) -> FeasibilityQuery {
        // λ_1..λ_s; facet_k(amp) · Σ λ_i D_i ≥ 1
        let s = self.s();
        let mut query = FeasibilityQuery::new(s);
        for f in self.variety.amp_cone.facets() {
            let coeffs = self
                .divisors
                .iter()
                .map(|d| {
                    qb(&f
                        .iter()
                        .zip(d.coords())
                        .map(|(a, &b)| a * b)
                        .sum::<BigInt>())
                })
                .collect();
            query.at_least(coeffs, q(1)).expect("length s");
        }
        if let Some(lb) = lower_bound {
            for i in 0..s {
                let mut e = vec![q(0); s];
                e[i] = q(1);
                query.at_least(e, q(lb)).expect("length s");
            }
        }
        query
    }

    /// Some `Σ λ_i D_i` with all `λ_i > 0` is ample.
    pub fn check_hypothesis_t(&self) -> bool {
        feasible(&self.ample_combination_query(Some(1))).is_some()
    }

    /// Some integer combination of the `D_i` is ample.
    pub fn check_hypothesis_r(&self) -> bool {
        feasible(&self.ample_combination_query(None)).is_some()
    }

    pub fn check_hypothesis(&self, ring: Ring) -> bool {
        match ring {
            Ring::T => self.check_hypothesis_t(),
            Ring::R => self.check_hypothesis_r(),
        }
    }

    fn require(&self, ring: Ring) -> Result<()> {
        if self.check_hypothesis(ring) {
            Ok(())
        } else {
            Err(Error::HypothesisFailed(match ring {
                Ring::T => "no positive combination of the divisors is ample".into(),
                Ring::R => "no integer combination of the divisors is ample".into(),
            }))
        }
    }

    /// Whether the divisors other than `D_j` (1-based) reach
    /// "ample + effective" with non-negative coefficients.
    pub fn others_reach_ample_plus_effective(&self, j: usize) -> bool {
        let r = self.class_rank();
        let others: Vec<&DivisorClass> = self
            .divisors
            .iter()
            .enumerate()
            .filter(|&(i, _)| i + 1 != j)
            .map(|(_, d)| d)
            .collect();
        let k = others.len();
        // variables: λ (k), α (r), ε (r)
        let n = k + 2 * r;
        let mut query = FeasibilityQuery::new(n);
        for c in 0..r {
            let mut row = vec![q(0); n];
            for (i, d) in others.iter().enumerate() {
                row[i] = q(d.coords()[c]);
            }
            row[k + c] = q(-1);
            row[k + r + c] = q(-1);
            query.equal(row, q(0)).expect("length n");
        }
        for i in 0..k {
            let mut row = vec![q(0); n];
            row[i] = q(1);
            query.at_least(row, q(0)).expect("length n");
        }
        for f in self.variety.amp_cone.facets() {
            let mut row = vec![q(0); n];
            for c in 0..r {
                row[k + c] = qb(&f[c]);
            }
            query.at_least(row, q(1)).expect("length n");
        }
        for f in self.variety.eff_cone.facets() {
            let mut row = vec![q(0); n];
            for c in 0..r {
                row[k + r + c] = qb(&f[c]);
            }
            query.at_least(row, q(0)).expect("length n");
        }
        feasible(&query).is_some()
    }

    pub fn compute_u(&self) -> Result<USet> {
        self.compute_u_with(Exec::default())
    }

    pub fn compute_u_with(&self, exec: Exec) -> Result<USet> {
        self.require(Ring::T)?;
        let indices: Vec<usize> = (1..=self.s()).collect();
        let member = exec.map(&indices, |&j| self.others_reach_ample_plus_effective(j));
        Ok(USet(
            indices
                .into_iter()
                .zip(member)
                .filter_map(|(j, m)| m.then_some(j))
                .collect(),
        ))
    }

    /// Generators of the kernel of `Cl(X) → Cl(ring)`, as 0-based indices.
    fn kernel_indices(&self, ring: Ring, u: &USet) -> Vec<usize> {
        (0..self.s())
            .filter(|&i| ring == Ring::R || !u.contains(i + 1))
            .collect()
    }

    fn kernel_matrix(&self, indices: &[usize]) -> IntMatrix {
        let cols: Vec<Vec<i64>> = indices
            .iter()
            .map(|&i| self.divisors[i].0.clone())
            .collect();
        IntMatrix::from_columns(self.class_rank(), &cols)
    }

    /// `Cl(T) = Cl(X) / Σ_{j ∉ U} Z D_j` and `Cl(R) = Cl(X) / Σ_i Z D_i`.
    pub fn class_group(&self, ring: Ring) -> Result<QuotientPresentation> {
        let u = match ring {
            Ring::T => self.compute_u()?,
            Ring::R => {
                self.require(Ring::R)?;
                USet::default()
            }
        };
        Ok(self.class_group_given(ring, &u))
    }

    /// Class group for a precomputed `U` (ignored for ring R).
    pub fn class_group_given(&self, ring: Ring, u: &USet) -> QuotientPresentation {
        lattice::quotient(&self.kernel_matrix(&self.kernel_indices(ring, u)))
    }

    pub fn push_class(
        &self,
        ring: Ring,
        group: &QuotientPresentation,
        f: &DivisorClass,
    ) -> Result<GradedModuleClass> {
        let quotient_coords = push_to_quotient(&f.to_big(), group)?;
        Ok(GradedModuleClass {
            ring,
            class_vector: f.clone(),
            quotient_coords,
        })
    }

    pub fn canonical_report(&self, ring: Ring) -> Result<CanonicalReport> {
        let u = match ring {
            Ring::T => self.compute_u()?,
            Ring::R => {
                self.require(Ring::R)?;
                USet::default()
            }
        };
        self.canonical_report_given(ring, &u)
    }

    /// Canonical report for a precomputed `U` (ignored for ring R).
    pub fn canonical_report_given(&self, ring: Ring, u: &USet) -> Result<CanonicalReport> {
        let k = &self.variety.canonical_class;
        let group = self.class_group_given(ring, u);
        let omega = match ring {
            Ring::T => {
                let mut acc = k.clone();
                for d in &self.divisors {
                    acc = acc.checked_add(d)?;
                }
                acc
            }
            Ring::R => k.clone(),
        };
        let omega_class = push_to_quotient(&omega.to_big(), &group)?;
        let free = omega_class.is_zero();

        // solve Σ_{j ∈ kernel} v_j D_j = target, with v_i = -1 on U for ring T
        let indices = self.kernel_indices(ring, u);
        let target = match ring {
            Ring::T => {
                let mut acc = k.clone();
                for i in u.members() {
                    acc = acc.checked_add(&self.divisors[i - 1])?;
                }
                acc
            }
            Ring::R => k.clone(),
        };
        let solved = lattice::solve_with_kernel(&target.to_big(), &self.kernel_matrix(&indices))?;
        debug_assert_eq!(solved.is_some(), free);
        let (shift, shift_solution_lattice) = match (free, solved) {
            (true, Some((particular, kernel))) => {
                let best = lex_min_abs_representative(&particular, &kernel);
                let embed = |coeffs: &[BigInt], fill: BigInt| {
                    let mut v = vec![fill; self.s()];
                    for (&i, c) in indices.iter().zip(coeffs) {
                        v[i] = c.clone();
                    }
                    v
                };
                let shift = embed(&best, -BigInt::one());
                let lattice = kernel.iter().map(|w| embed(w, BigInt::zero())).collect();
                (Some(shift), lattice)
            }
            (true, None) => unreachable!("free canonical class must have a shift"),
            (false, _) => (None, Vec::new()),
        };
        Ok(CanonicalReport {
            ring,
            omega_class,
            free,
            shift,
            shift_solution_lattice,
        })
    }

    pub fn height_report(&self) -> Result<HeightReport> {
        Ok(self.height_report_given(&self.compute_u()?))
    }

    pub fn height_report_given(&self, u: &USet) -> HeightReport {
        HeightReport(
            (1..=self.s())
                .map(|j| {
                    if u.contains(j) {
                        HeightClass::ExactlyOne
                    } else {
                        HeightClass::AtLeastTwo
                    }
                })
                .collect(),
        )
    }

    /// Checks `Σ v_i D_i = K_X` (ring R) or `Σ_{j∉U} v_j D_j = K_X + Σ_{i∈U} D_i`
    /// with `v_i = -1` on `U` (ring T). Both reduce to `Σ_i v_i D_i = K_X`.
    pub fn shift_satisfies(&self, ring: Ring, u: &USet, shift: &[BigInt]) -> bool {
        if shift.len() != self.s() {
            return false;
        }
        if ring == Ring::T && u.members().iter().any(|&i| shift[i - 1] != -BigInt::one()) {
            return false;
        }
        let r = self.class_rank();
        (0..r).all(|c| {
            let lhs: BigInt = self
                .divisors
                .iter()
                .zip(shift)
                .map(|(d, v)| v * d.coords()[c])
                .sum();
            lhs == BigInt::from(self.variety.canonical_class.coords()[c])
        })
    }
}
