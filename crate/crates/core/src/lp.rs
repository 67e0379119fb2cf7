//! Exact rational feasibility by Fourier–Motzkin elimination.
//!
//! Equalities are removed first by Gaussian elimination; the remaining
//! inequalities are projected one variable at a time. Every intermediate row
//! is scaled to a primitive integer coefficient vector, and rows sharing a
//! coefficient vector keep only the strongest right-hand side.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// `coeffs · x (= or ≥) rhs`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

impl LinearConstraint {
    fn value(&self, x: &[BigRational]) -> BigRational {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// A conjunction of linear equalities and `≥` inequalities over the rationals.
#[derive(Clone, Debug, Default)]
pub struct FeasibilityQuery {
    num_vars: usize,
    equalities: Vec<LinearConstraint>,
    inequalities: Vec<LinearConstraint>,
}

impl FeasibilityQuery {
    pub fn new(num_vars: usize) -> Self {
        FeasibilityQuery {
            num_vars,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn equalities(&self) -> &[LinearConstraint] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[LinearConstraint] {
        &self.inequalities
    }

    fn check(&self, coeffs: &[BigRational]) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                found: coeffs.len(),
            });
        }
        Ok(())
    }

    /// Adds `coeffs · x = rhs`.
    pub fn equal(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) -> Result<&mut Self> {
        self.check(&coeffs)?;
        self.equalities.push(LinearConstraint { coeffs, rhs });
        Ok(self)
    }

    /// Adds `coeffs · x ≥ rhs`.
    pub fn at_least(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) -> Result<&mut Self> {
        self.check(&coeffs)?;
        self.inequalities.push(LinearConstraint { coeffs, rhs });
        Ok(self)
    }

    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        x.len() == self.num_vars
            && self.equalities.iter().all(|c| c.value(x) == c.rhs)
            && self.inequalities.iter().all(|c| c.value(x) >= c.rhs)
    }
}

/// Returns a rational point satisfying every constraint of `query`, or
/// `None` when the system is infeasible.
pub fn feasible(query: &FeasibilityQuery) -> Option<Vec<BigRational>> {
    let n = query.num_vars;
    let order: Vec<usize> = (0..n).collect();
    let pivots = reduce_equalities(&query.equalities, n, &order)?;
    let is_pivot: Vec<bool> = (0..n).map(|j| pivots.iter().any(|p| p.var == j)).collect();
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();

    // inequalities over the free variables only
    let mut system = System::new(free.len());
    for c in &query.inequalities {
        let (coeffs, rhs) = substitute(c, &pivots);
        system.insert(free.iter().map(|&j| coeffs[j].clone()).collect(), rhs);
    }
    if system.infeasible {
        return None;
    }

    let mut remaining: Vec<usize> = (0..free.len()).collect();
    let mut stages: Vec<(usize, System)> = Vec::with_capacity(free.len());
    while !remaining.is_empty() {
        let var = system.cheapest_variable(&remaining);
        remaining.retain(|&v| v != var);
        let next = system.eliminate(var);
        stages.push((var, system));
        system = next;
        if system.infeasible {
            return None;
        }
    }

    let mut values = vec![BigRational::zero(); free.len()];
    for (var, stage) in stages.iter().rev() {
        values[*var] = stage.choose_value(*var, &values)?;
    }

    let mut x = vec![BigRational::zero(); n];
    for (k, &j) in free.iter().enumerate() {
        x[j] = values[k].clone();
    }
    for p in &pivots {
        let v: BigRational = &p.constant
            + p.coeffs
                .iter()
                .zip(&x)
                .map(|(a, b)| a * b)
                .sum::<BigRational>();
        x[p.var] = v;
    }
    assert!(
        query.satisfied_by(&x),
        "Fourier-Motzkin witness failed to verify"
    );
    Some(x)
}

/// `x[var] = constant + coeffs · x`, where `coeffs` vanishes on pivot variables.
#[derive(Clone, Debug)]
struct PivotExpr {
    var: usize,
    constant: BigRational,
    coeffs: Vec<BigRational>,
}

/// Reduced row echelon form of the equalities, pivoting on variables in
/// `order`. `None` when the equalities are inconsistent.
fn reduce_equalities(
    eqs: &[LinearConstraint],
    n: usize,
    order: &[usize],
) -> Option<Vec<PivotExpr>> {
    let mut rows: Vec<(Vec<BigRational>, BigRational)> = eqs
        .iter()
        .map(|c| (c.coeffs.clone(), c.rhs.clone()))
        .collect();
    let mut pivot_of_row: Vec<usize> = Vec::new();
    let mut done = 0;
    for &col in order {
        let Some(p) = (done..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else {
            continue;
        };
        rows.swap(done, p);
        let inv = rows[done].0[col].recip();
        for a in rows[done].0.iter_mut() {
            *a *= &inv;
        }
        rows[done].1 *= &inv;
        let (pivot_coeffs, pivot_rhs) = rows[done].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == done || row.0[col].is_zero() {
                continue;
            }
            let f = row.0[col].clone();
            for (a, b) in row.0.iter_mut().zip(&pivot_coeffs) {
                *a -= &f * b;
            }
            row.1 -= &f * &pivot_rhs;
        }
        pivot_of_row.push(col);
        done += 1;
    }
    if rows[done..].iter().any(|(_, rhs)| !rhs.is_zero()) {
        return None;
    }
    Some(
        rows.into_iter()
            .zip(pivot_of_row)
            .map(|((coeffs, rhs), var)| {
                let coeffs = coeffs
                    .into_iter()
                    .enumerate()
                    .map(|(j, a)| if j == var { BigRational::zero() } else { -a })
                    .collect::<Vec<_>>();
                debug_assert_eq!(coeffs.len(), n);
                PivotExpr {
                    var,
                    constant: rhs,
                    coeffs,
                }
            })
            .collect(),
    )
}

fn substitute(c: &LinearConstraint, pivots: &[PivotExpr]) -> (Vec<BigRational>, BigRational) {
    let mut coeffs = c.coeffs.clone();
    let mut rhs = c.rhs.clone();
    for p in pivots {
        let a = std::mem::replace(&mut coeffs[p.var], BigRational::zero());
        if a.is_zero() {
            continue;
        }
        for (x, e) in coeffs.iter_mut().zip(&p.coeffs) {
            *x += &a * e;
        }
        rhs -= &a * &p.constant;
    }
    (coeffs, rhs)
}

/// Set of inequalities `coeffs · x ≥ rhs` with primitive integer coefficients.
#[derive(Clone, Debug)]
struct System {
    n: usize,
    rows: BTreeMap<Vec<BigInt>, BigRational>,
    infeasible: bool,
}

fn normalize(coeffs: &[BigRational], rhs: &BigRational) -> (Vec<BigInt>, BigRational) {
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return (ints, rhs.clone());
    }
    let scale = BigRational::new(lcm, g.clone());
    (ints.into_iter().map(|c| c / &g).collect(), rhs * scale)
}

impl System {
    fn new(n: usize) -> Self {
        System {
            n,
            rows: BTreeMap::new(),
            infeasible: false,
        }
    }

    fn insert(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) {
        let (key, rhs) = normalize(&coeffs, &rhs);
        self.insert_normalized(key, rhs);
    }

    fn insert_normalized(&mut self, key: Vec<BigInt>, rhs: BigRational) {
        if key.iter().all(Zero::is_zero) {
            if rhs.is_positive() {
                self.infeasible = true;
            }
            return;
        }
        match self.rows.get_mut(&key) {
            Some(old) if *old >= rhs => {}
            Some(old) => *old = rhs,
            None => {
                self.rows.insert(key, rhs);
            }
        }
    }

    fn cheapest_variable(&self, candidates: &[usize]) -> usize {
        *candidates
            .iter()
            .min_by_key(|&&v| {
                let pos = self.rows.keys().filter(|k| k[v].is_positive()).count();
                let neg = self.rows.keys().filter(|k| k[v].is_negative()).count();
                pos * neg
            })
            .expect("non-empty candidate list")
    }

    fn eliminate(&self, var: usize) -> System {
        let mut out = System::new(self.n);
        out.infeasible = self.infeasible;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (k, r) in &self.rows {
            if k[var].is_positive() {
                pos.push((k, r));
            } else if k[var].is_negative() {
                neg.push((k, r));
            } else {
                out.insert_normalized(k.clone(), r.clone());
            }
        }
        for (kp, rp) in &pos {
            for (kn, rn) in &neg {
                let cp = &kp[var];
                let cn = -&kn[var];
                let coeffs: Vec<BigRational> = kp
                    .iter()
                    .zip(kn.iter())
                    .map(|(a, b)| BigRational::from_integer(&cn * a + cp * b))
                    .collect();
                let rhs = BigRational::from_integer(cn.clone()) * *rp
                    + BigRational::from_integer(cp.clone()) * *rn;
                out.insert(coeffs, rhs);
            }
        }
        out
    }

    /// Picks a value for `var` given values of every other variable that
    /// still occurs in this stage.
    fn choose_value(&self, var: usize, values: &[BigRational]) -> Option<BigRational> {
        let mut lower: Option<BigRational> = None;
        let mut upper: Option<BigRational> = None;
        for (k, r) in &self.rows {
            let a = &k[var];
            if a.is_zero() {
                continue;
            }
            let rest: BigRational = k
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != var)
                .map(|(j, c)| BigRational::from_integer(c.clone()) * &values[j])
                .sum();
            let bound = (r - rest) / BigRational::from_integer(a.clone());
            if a.is_positive() {
                if lower.as_ref().is_none_or(|l| bound > *l) {
                    lower = Some(bound);
                }
            } else if upper.as_ref().is_none_or(|u| bound < *u) {
                upper = Some(bound);
            }
        }
        let fits = |x: &BigRational| {
            lower.as_ref().is_none_or(|l| x >= l) && upper.as_ref().is_none_or(|u| x <= u)
        };
        let zero = BigRational::zero();
        if fits(&zero) {
            return Some(zero);
        }
        let candidate = match (&lower, &upper) {
            (Some(l), _) => l.ceil(),
            (None, Some(u)) => u.floor(),
            (None, None) => unreachable!("zero fits an unconstrained variable"),
        };
        if fits(&candidate) {
            return Some(candidate);
        }
        match lower {
            Some(l) if fits(&l) => Some(l),
            _ => None,
        }
    }
}

/// Projects the homogeneous system `{(v, w) : eqs, ineqs}` onto its first
/// `keep` coordinates. Returns the surviving inequalities over those
/// coordinates (equalities appear as opposite pairs).
pub(crate) fn project_homogeneous(
    n: usize,
    keep: usize,
    eqs: &[LinearConstraint],
    ineqs: &[LinearConstraint],
) -> Vec<Vec<BigInt>> {
    // pivot on the eliminated coordinates first, latest first
    let order: Vec<usize> = (keep..n).rev().chain((0..keep).rev()).collect();
    let pivots = reduce_equalities(eqs, n, &order).expect("homogeneous equalities are consistent");
    let mut system = System::new(n);
    for c in ineqs {
        let (coeffs, rhs) = substitute(c, &pivots);
        system.insert(coeffs, rhs);
    }
    for p in &pivots {
        // x_p - coeffs·x = 0, as two inequalities over the non-pivot variables
        let mut row = p.coeffs.clone();
        row.iter_mut().for_each(|a| *a = -&*a);
        row[p.var] = BigRational::one();
        if p.var < keep && row[keep..].iter().all(Zero::is_zero) {
            let neg: Vec<BigRational> = row.iter().map(|a| -a).collect();
            system.insert(row, BigRational::zero());
            system.insert(neg, BigRational::zero());
        }
    }
    let mut remaining: Vec<usize> = (keep..n)
        .filter(|j| !pivots.iter().any(|p| p.var == *j))
        .collect();
    while !remaining.is_empty() {
        let var = system.cheapest_variable(&remaining);
        remaining.retain(|&v| v != var);
        system = system.eliminate(var);
    }
    system
        .rows
        .into_keys()
        .map(|mut k| {
            k.truncate(keep);
            k
        })
        .filter(|k| !k.iter().all(Zero::is_zero))
        .collect()
}
