//! Multigraded Hilbert functions of `T`, `R` and their canonical modules over
//! a box of degrees, and the graded-dimension check of a free canonical
//! module `ω ≅ ring(v)`.
//!
//! The free-shift check compares `dim [ω]_n` with `dim [ring]_{n+v}` at every
//! degree of the box. It is a necessary condition for a graded isomorphism,
//! not a proof of one ("Hilbert-verified").

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{binomial, DivisorClass};
use crate::lattice::IntMatrix;
use crate::multisection::{CanonicalReport, MultiSectionSetup, Ring, USet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Marker {
    T,
    R,
    #[serde(rename = "omegaT")]
    OmegaT,
    #[serde(rename = "omegaR")]
    OmegaR,
}

impl Marker {
    pub fn canonical_of(ring: Ring) -> Marker {
        match ring {
            Ring::T => Marker::OmegaT,
            Ring::R => Marker::OmegaR,
        }
    }

    pub fn of_ring(ring: Ring) -> Marker {
        match ring {
            Ring::T => Marker::T,
            Ring::R => Marker::R,
        }
    }

    fn is_canonical(self) -> bool {
        matches!(self, Marker::OmegaT | Marker::OmegaR)
    }

    /// Whether degree `n` carries a graded piece of this ring or module.
    pub fn admits(self, u: &USet, n: &[i64]) -> bool {
        match self {
            Marker::T => n.iter().all(|&x| x >= 0),
            Marker::OmegaT => n
                .iter()
                .enumerate()
                .all(|(i, &x)| !u.contains(i + 1) || x >= 1),
            Marker::R | Marker::OmegaR => true,
        }
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Marker::T => "T",
            Marker::R => "R",
            Marker::OmegaT => "omegaT",
            Marker::OmegaR => "omegaR",
        })
    }
}

impl FromStr for Marker {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" => Ok(Marker::T),
            "R" => Ok(Marker::R),
            "omegaT" => Ok(Marker::OmegaT),
            "omegaR" => Ok(Marker::OmegaR),
            other => Err(Error::validation(
                "ring",
                format!("unknown marker `{other}` (expected T, R, omegaT or omegaR)"),
            )),
        }
    }
}

/// A box `lo ≤ n ≤ hi` of degrees together with the set `U` that decides
/// which degrees are admissible for `ω_T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeWindow {
    pub u_set: USet,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl DegreeWindow {
    pub fn new(u_set: USet, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        Ok(DegreeWindow { u_set, lo, hi })
    }

    /// Default boxes: `[0,8]` for T, `[-4,8]` for R, ω_R and the coordinates
    /// of ω_T outside `U`, `[1,8]` for ω_T on `U`.
    pub fn default_for(marker: Marker, s: usize, u_set: USet) -> Self {
        let (lo, hi): (Vec<i64>, Vec<i64>) = (1..=s)
            .map(|j| match marker {
                Marker::T => (0, 8),
                Marker::R | Marker::OmegaR => (-4, 8),
                Marker::OmegaT if u_set.contains(j) => (1, 8),
                Marker::OmegaT => (-4, 8),
            })
            .unzip();
        DegreeWindow { u_set, lo, hi }
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    /// All degrees of the box in lexicographic order.
    pub fn degrees(&self) -> Vec<Vec<i64>> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Vec::with_capacity(self.dims())];
        for (&l, &h) in self.lo.iter().zip(&self.hi) {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (l..=h).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertTable {
    pub marker: Marker,
    /// Sorted lexicographically by degree.
    pub entries: Vec<(Vec<i64>, u64)>,
}

impl HilbertTable {
    pub fn get(&self, n: &[i64]) -> Option<u64> {
        self.entries
            .binary_search_by(|(d, _)| d.as_slice().cmp(n))
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// CSV with header `n_1,...,n_s,dim` and LF line endings.
    pub fn to_csv(&self, s: usize) -> String {
        let mut out = String::new();
        for i in 1..=s {
            out.push_str(&format!("n_{i},"));
        }
        out.push_str("dim\n");
        for (n, d) in &self.entries {
            for x in n {
                out.push_str(&format!("{x},"));
            }
            out.push_str(&format!("{d}\n"));
        }
        out
    }
}

impl MultiSectionSetup {
    /// The class whose sections form the degree-`n` piece.
    fn graded_class(&self, marker: Marker, n: &[i64]) -> Result<DivisorClass> {
        let c = DivisorClass::combination(&self.divisors, n, self.class_rank())?;
        if marker.is_canonical() {
            c.checked_add(&self.variety.canonical_class)
        } else {
            Ok(c)
        }
    }

    /// `dim` of the degree-`n` piece, zero at inadmissible degrees.
    pub fn graded_dim(&self, marker: Marker, u: &USet, n: &[i64]) -> Result<u64> {
        if n.len() != self.s() {
            return Err(Error::DimensionMismatch {
                expected: self.s(),
                found: n.len(),
            });
        }
        if !marker.admits(u, n) {
            return Ok(0);
        }
        self.variety.h0(&self.graded_class(marker, n)?)
    }
}

pub fn hilbert(
    setup: &MultiSectionSetup,
    marker: Marker,
    window: &DegreeWindow,
) -> Result<HilbertTable> {
    hilbert_with(setup, marker, window, Exec::default())
}

pub fn hilbert_with(
    setup: &MultiSectionSetup,
    marker: Marker,
    window: &DegreeWindow,
    exec: Exec,
) -> Result<HilbertTable> {
    if !setup.variety.has_oracle() {
        return Err(Error::NoOracle(setup.variety.name.clone()));
    }
    if window.dims() != setup.s() {
        return Err(Error::DimensionMismatch {
            expected: setup.s(),
            found: window.dims(),
        });
    }
    let degrees: Vec<Vec<i64>> = window
        .degrees()
        .into_iter()
        .filter(|n| marker.admits(&window.u_set, n))
        .collect();
    let dims = exec.map(&degrees, |n| setup.graded_dim(marker, &window.u_set, n));
    let entries = degrees
        .into_iter()
        .zip(dims)
        .map(|(n, d)| d.map(|d| (n, d)))
        .collect::<Result<_>>()?;
    Ok(HilbertTable { marker, entries })
}

/// Outcome of comparing `dim [ω]_n` with `dim [ring]_{n+v}` over a box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ShiftVerdict {
    Pass {
        degrees_checked: usize,
    },
    Fail {
        degree: Vec<i64>,
        omega_dim: u64,
        ring_dim: u64,
    },
}

impl ShiftVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ShiftVerdict::Pass { .. })
    }
}

pub fn verify_free_shift(
    setup: &MultiSectionSetup,
    report: &CanonicalReport,
    window: &DegreeWindow,
) -> Result<ShiftVerdict> {
    verify_free_shift_with(setup, report, window, Exec::default())
}

pub fn verify_free_shift_with(
    setup: &MultiSectionSetup,
    report: &CanonicalReport,
    window: &DegreeWindow,
    exec: Exec,
) -> Result<ShiftVerdict> {
    if !report.free {
        return Err(Error::ReportNotFree);
    }
    let shift: Vec<i64> = report
        .shift
        .as_ref()
        .ok_or(Error::ReportNotFree)?
        .iter()
        .map(|x| x.to_i64().ok_or(Error::Overflow))
        .collect::<Result<_>>()?;
    check_shift(setup, report.ring, &shift, window, exec)
}

/// Compares `dim [ω]_n` and `dim [ring]_{n+shift}` for every `n` in the box.
/// Degrees outside a marker's admissible set count as zero.
pub fn check_shift(
    setup: &MultiSectionSetup,
    ring: Ring,
    shift: &[i64],
    window: &DegreeWindow,
    exec: Exec,
) -> Result<ShiftVerdict> {
    if !setup.variety.has_oracle() {
        return Err(Error::NoOracle(setup.variety.name.clone()));
    }
    if shift.len() != setup.s() || window.dims() != setup.s() {
        return Err(Error::DimensionMismatch {
            expected: setup.s(),
            found: if shift.len() != setup.s() {
                shift.len()
            } else {
                window.dims()
            },
        });
    }
    let u = &window.u_set;
    let omega = Marker::canonical_of(ring);
    let base = Marker::of_ring(ring);
    let degrees = window.degrees();
    let pairs = exec.map(&degrees, |n| -> Result<(u64, u64)> {
        let shifted: Vec<i64> = n
            .iter()
            .zip(shift)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok((
            setup.graded_dim(omega, u, n)?,
            setup.graded_dim(base, u, &shifted)?,
        ))
    });
    for (n, pair) in degrees.iter().zip(pairs) {
        let (omega_dim, ring_dim) = pair?;
        if omega_dim != ring_dim {
            return Ok(ShiftVerdict::Fail {
                degree: n.clone(),
                omega_dim,
                ring_dim,
            });
        }
    }
    Ok(ShiftVerdict::Pass {
        degrees_checked: degrees.len(),
    })
}

const ENUMERATION_LIMIT: u64 = 10_000_000;

fn exponent_vectors(vars: usize, total: u64, limit: &mut u64) -> Result<Vec<Vec<u64>>> {
    fn go(
        vars: usize,
        total: u64,
        prefix: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        limit: &mut u64,
    ) -> Result<()> {
        if vars == 1 {
            if *limit == 0 {
                return Err(Error::BoundExceeded("monomial enumeration".into()));
            }
            *limit -= 1;
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return Ok(());
        }
        for k in 0..=total {
            prefix.push(k);
            go(vars - 1, total - k, prefix, out, limit)?;
            prefix.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(vars, total, &mut Vec::new(), &mut out, limit)?;
    Ok(out)
}

/// Number of monomials `x^α y^β` in `m+1` and `n+1` variables with `|α| = p`
/// and `|β| = q`, counted by explicit enumeration.
pub fn bruteforce_product_dim(m: u32, n: u32, p: u64, q: u64) -> Result<u64> {
    let mut limit = ENUMERATION_LIMIT;
    let xs = exponent_vectors(m as usize + 1, p, &mut limit)?;
    let ys = exponent_vectors(n as usize + 1, q, &mut limit)?;
    let mut count = 0u64;
    for a in &xs {
        for b in &ys {
            debug_assert_eq!(a.iter().sum::<u64>() + b.iter().sum::<u64>(), p + q);
            count += 1;
            if count > ENUMERATION_LIMIT {
                return Err(Error::BoundExceeded("monomial pairs".into()));
            }
        }
    }
    Ok(count)
}

/// Largest degree accepted by [`bruteforce_vanishing_dim`].
pub const MAX_BRUTEFORCE_DEGREE: u64 = 40;

/// Dimension of degree-`degree` forms in `x, y, z` vanishing to order
/// `≥ order` at `[1:1:1]`: the monomial count minus the rank of the matrix of
/// all partial derivatives of order `< order` evaluated at the point.
pub fn bruteforce_vanishing_dim(degree: u64, order: u64) -> Result<u64> {
    if degree > MAX_BRUTEFORCE_DEGREE {
        return Err(Error::BoundExceeded(format!(
            "degree {degree} exceeds {MAX_BRUTEFORCE_DEGREE}"
        )));
    }
    let mut limit = ENUMERATION_LIMIT;
    let monomials = exponent_vectors(3, degree, &mut limit)?;
    // derivatives of order > degree vanish identically
    let top = order.min(degree + 1);
    let mut derivatives = Vec::new();
    for k in 0..top {
        derivatives.extend(exponent_vectors(3, k, &mut limit)?);
    }
    if derivatives.is_empty() {
        return Ok(monomials.len() as u64);
    }
    let mut m = IntMatrix::zeros(derivatives.len(), monomials.len());
    for (r, alpha) in derivatives.iter().enumerate() {
        for (c, beta) in monomials.iter().enumerate() {
            // ∂^α x^β at (1,1,1) = Π β_i! / (β_i - α_i)!
            if alpha.iter().zip(beta).all(|(a, b)| a <= b) {
                let v: BigInt = alpha
                    .iter()
                    .zip(beta)
                    .map(|(&a, &b)| falling_factorial(b, a))
                    .product();
                m[(r, c)] = v;
            }
        }
    }
    Ok(monomials.len() as u64 - m.rank() as u64)
}

fn falling_factorial(n: u64, k: u64) -> BigInt {
    (0..k).map(|i| BigInt::from(n - i)).product()
}

/// `C(n2+2, 2) - C(n1+1, 2)`: forms of degree `n2` through a point with
/// multiplicity `n1 ≤ n2 + 1`.
pub fn vanishing_closed_form(n1: u64, n2: u64) -> Result<u64> {
    Ok(binomial(n2 + 2, 2)? - binomial(n1 + 1, 2)?)
}
