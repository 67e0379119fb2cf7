//! Varieties as seen by the multi-section ring computations: a free class
//! lattice `Cl(X) = Z^r`, the canonical class, effective and ample cones and
//! an optional oracle for `dim_k H^0(X, O_X(F))`.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cone::RationalCone;
use crate::error::{Error, Result};
use crate::lattice::IntMatrix;

/// A Weil divisor class in lattice coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass(pub Vec<i64>);

impl DivisorClass {
    pub fn zero(rank: usize) -> Self {
        DivisorClass(vec![0; rank])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn checked_add(&self, other: &DivisorClass) -> Result<DivisorClass> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<_>>()
            .map(DivisorClass)
    }

    pub fn checked_scale(&self, k: i64) -> Result<DivisorClass> {
        self.0
            .iter()
            .map(|a| a.checked_mul(k).ok_or(Error::Overflow))
            .collect::<Result<_>>()
            .map(DivisorClass)
    }

    /// `Σ n_i D_i`.
    pub fn combination(divisors: &[DivisorClass], n: &[i64], rank: usize) -> Result<DivisorClass> {
        let mut acc = DivisorClass::zero(rank);
        for (d, &k) in divisors.iter().zip(n) {
            acc = acc.checked_add(&d.checked_scale(k)?)?;
        }
        Ok(acc)
    }
}

impl From<Vec<i64>> for DivisorClass {
    fn from(v: Vec<i64>) -> Self {
        DivisorClass(v)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Section dimension oracles for the builtin families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionOracle {
    /// `P^n`, class lattice generated by a hyperplane.
    Projective { n: u32 },
    /// `P^m × P^n` in the basis `(A_1, A_2)` of pulled-back hyperplanes.
    Product { m: u32, n: u32 },
    /// The projective plane blown up at `[1:1:1]`, basis `(E, A)`.
    BlowupP2Point,
}

impl SectionOracle {
    pub fn class_rank(&self) -> usize {
        match self {
            SectionOracle::Projective { .. } => 1,
            _ => 2,
        }
    }

    pub fn dim(&self) -> u32 {
        match *self {
            SectionOracle::Projective { n } => n,
            SectionOracle::Product { m, n } => m + n,
            SectionOracle::BlowupP2Point => 2,
        }
    }

    pub fn canonical_class(&self) -> DivisorClass {
        match *self {
            SectionOracle::Projective { n } => DivisorClass(vec![-(n as i64) - 1]),
            SectionOracle::Product { m, n } => DivisorClass(vec![-(m as i64) - 1, -(n as i64) - 1]),
            SectionOracle::BlowupP2Point => DivisorClass(vec![1, -3]),
        }
    }

    /// `dim_k H^0(X, O_X(F))`.
    pub fn h0(&self, f: &DivisorClass) -> Result<u64> {
        if f.len() != self.class_rank() {
            return Err(Error::DimensionMismatch {
                expected: self.class_rank(),
                found: f.len(),
            });
        }
        let c = f.coords();
        match *self {
            SectionOracle::Projective { n } => {
                if c[0] < 0 {
                    return Ok(0);
                }
                binomial(c[0] as u64 + n as u64, n as u64)
            }
            SectionOracle::Product { m, n } => {
                if c[0] < 0 || c[1] < 0 {
                    return Ok(0);
                }
                let a = binomial(c[0] as u64 + m as u64, m as u64)?;
                let b = binomial(c[1] as u64 + n as u64, n as u64)?;
                a.checked_mul(b).ok_or(Error::Overflow)
            }
            SectionOracle::BlowupP2Point => {
                let (e, a) = (c[0], c[1]);
                if a < 0 {
                    return Ok(0);
                }
                // a positive multiple of E is a fixed component
                let order = if e >= 0 { 0 } else { e.unsigned_abs() };
                plane_forms_vanishing_at_point(a as u64, order)
            }
        }
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128).ok_or(Error::Overflow)? / (i as u128 + 1);
    }
    u64::try_from(acc).map_err(|_| Error::Overflow)
}

/// Largest form degree accepted by the rank oracle.
pub const MAX_FORM_DEGREE: u64 = 48;

/// Dimension of degree-`degree` ternary forms vanishing to order `≥ order`
/// at `[1:1:1]`.
///
/// After the substitution `x ↦ x + z, y ↦ y + z` the point becomes `[0:0:1]`,
/// where vanishing to order `m` means that every coefficient of
/// `x^p y^q z^{d-p-q}` with `p + q < m` is zero. The dimension is the number
/// of monomials minus the rank of that linear map.
pub fn plane_forms_vanishing_at_point(degree: u64, order: u64) -> Result<u64> {
    if degree > MAX_FORM_DEGREE {
        return Err(Error::BoundExceeded(format!(
            "form degree {degree} exceeds {MAX_FORM_DEGREE}"
        )));
    }
    let d = degree as usize;
    let monomials: Vec<(usize, usize)> = (0..=d)
        .flat_map(|i| (0..=d - i).map(move |j| (i, j)))
        .collect();
    let conditions: Vec<(usize, usize)> = (0..order.min(degree + 1) as usize)
        .flat_map(|t| (0..=t).map(move |p| (p, t - p)))
        .collect();
    if conditions.is_empty() {
        return Ok(monomials.len() as u64);
    }
    let mut m = IntMatrix::zeros(conditions.len(), monomials.len());
    for (r, &(p, q)) in conditions.iter().enumerate() {
        for (col, &(i, j)) in monomials.iter().enumerate() {
            if p <= i && q <= j {
                let v = binomial(i as u64, p as u64)? * binomial(j as u64, q as u64)?;
                m[(r, col)] = BigInt::from(v);
            }
        }
    }
    Ok((monomials.len() - m.rank()) as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyPresentation {
    pub name: String,
    pub dim_x: u32,
    pub class_rank: usize,
    pub canonical_class: DivisorClass,
    pub eff_cone: RationalCone,
    /// Closure of the ample cone; ample classes are its strict interior.
    pub amp_cone: RationalCone,
    pub oracle: Option<SectionOracle>,
}

impl VarietyPresentation {
    /// Assembles and validates a presentation. Field names in errors follow
    /// the card schema.
    pub fn new(
        name: impl Into<String>,
        dim_x: i64,
        canonical_class: DivisorClass,
        eff_generators: &[Vec<i64>],
        amp_generators: &[Vec<i64>],
        oracle: Option<SectionOracle>,
    ) -> Result<Self> {
        let class_rank = canonical_class.len();
        if dim_x < 1 {
            return Err(Error::validation(
                "dim",
                "variety dimension must be positive",
            ));
        }
        let dim_x = u32::try_from(dim_x).map_err(|_| Error::validation("dim", "too large"))?;
        if class_rank == 0 {
            return Err(Error::validation("class_rank", "must be positive"));
        }
        let cone = |field: &str, gens: &[Vec<i64>]| -> Result<RationalCone> {
            for (i, g) in gens.iter().enumerate() {
                if g.len() != class_rank {
                    return Err(Error::validation(
                        format!("{field}[{i}]"),
                        format!("expected {class_rank} coordinates, found {}", g.len()),
                    ));
                }
            }
            let c = RationalCone::new(class_rank, gens)?;
            if !c.is_full_dimensional() {
                return Err(Error::validation(field, "cone is not full-dimensional"));
            }
            if !c.is_pointed() {
                return Err(Error::validation(field, "cone contains a line"));
            }
            Ok(c)
        };
        let eff_cone = cone("eff_generators", eff_generators)?;
        let amp_cone = cone("amp_generators", amp_generators)?;
        for (i, g) in amp_generators.iter().enumerate() {
            if !eff_cone.contains_int(g)? {
                return Err(Error::validation(
                    format!("amp_generators[{i}]"),
                    "ample generator outside the effective cone",
                ));
            }
        }
        if let Some(o) = oracle {
            let params_ok = match o {
                SectionOracle::Projective { n } => n >= 1,
                SectionOracle::Product { m, n } => m >= 1 && n >= 1,
                SectionOracle::BlowupP2Point => true,
            };
            if !params_ok {
                return Err(Error::validation("oracle", "parameters must be positive"));
            }
            if o.class_rank() != class_rank {
                return Err(Error::validation(
                    "oracle",
                    format!(
                        "oracle needs class rank {}, card has {class_rank}",
                        o.class_rank()
                    ),
                ));
            }
            if o.dim() != dim_x {
                return Err(Error::validation(
                    "oracle",
                    format!(
                        "oracle variety has dimension {}, card says {dim_x}",
                        o.dim()
                    ),
                ));
            }
            if o.canonical_class() != canonical_class {
                return Err(Error::validation(
                    "canonical_class",
                    format!("oracle variety has canonical class {}", o.canonical_class()),
                ));
            }
        }
        Ok(VarietyPresentation {
            name: name.into(),
            dim_x,
            class_rank,
            canonical_class,
            eff_cone,
            amp_cone,
            oracle,
        })
    }

    pub fn h0(&self, f: &DivisorClass) -> Result<u64> {
        self.oracle
            .ok_or_else(|| Error::NoOracle(self.name.clone()))?
            .h0(f)
    }

    pub fn has_oracle(&self) -> bool {
        self.oracle.is_some()
    }
}

pub fn build_projective(n: u32) -> Result<VarietyPresentation> {
    if n == 0 {
        return Err(Error::validation("n", "projective space needs n >= 1"));
    }
    VarietyPresentation::new(
        format!("P^{n}"),
        n as i64,
        DivisorClass(vec![-(n as i64) - 1]),
        &[vec![1]],
        &[vec![1]],
        Some(SectionOracle::Projective { n }),
    )
}

pub fn build_product(m: u32, n: u32) -> Result<VarietyPresentation> {
    if m == 0 || n == 0 {
        return Err(Error::validation(
            "m, n",
            "both factors need positive dimension",
        ));
    }
    let orthant = [vec![1, 0], vec![0, 1]];
    VarietyPresentation::new(
        format!("P^{m} x P^{n}"),
        (m + n) as i64,
        DivisorClass(vec![-(m as i64) - 1, -(n as i64) - 1]),
        &orthant,
        &orthant,
        Some(SectionOracle::Product { m, n }),
    )
}

/// The plane blown up at one point, in the basis `(E, A)`.
pub fn build_blowup_p2_point() -> VarietyPresentation {
    VarietyPresentation::new(
        "Bl_p P^2",
        2,
        DivisorClass(vec![1, -3]),
        &[vec![1, 0], vec![-1, 1]],
        &[vec![0, 1], vec![-1, 1]],
        Some(SectionOracle::BlowupP2Point),
    )
    .expect("builtin blow-up presentation is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc(v: &[i64]) -> DivisorClass {
        DivisorClass(v.to_vec())
    }

    #[test]
    fn builders() {
        assert_eq!(build_projective(2).unwrap().canonical_class, dc(&[-3]));
        assert_eq!(build_projective(1).unwrap().canonical_class, dc(&[-2]));
        assert!(build_projective(0).is_err());
        let p = build_projective(4).unwrap();
        assert_eq!(p.eff_cone.facets(), &[vec![BigInt::from(1)]]);

        let x = build_product(1, 2).unwrap();
        assert_eq!(x.canonical_class, dc(&[-2, -3]));
        assert_eq!(build_product(1, 1).unwrap().class_rank, 2);
        assert!(x.amp_cone.contains_interior_int(&[1, 1]).unwrap());
        assert!(!x.amp_cone.contains_interior_int(&[1, 0]).unwrap());
        assert!(build_product(0, 3).is_err());
    }

    #[test]
    fn blowup_cones() {
        let x = build_blowup_p2_point();
        assert_eq!(x.canonical_class, dc(&[1, -3]));
        assert!(x.eff_cone.contains_int(&[1, 0]).unwrap());
        assert!(!x.amp_cone.contains_int(&[1, 0]).unwrap());
        assert!(x.eff_cone.contains_int(&[-1, 1]).unwrap());
        assert!(!x.eff_cone.contains_interior_int(&[-1, 1]).unwrap());
        assert!(x.amp_cone.contains_int(&[-1, 1]).unwrap());
        assert!(!x.amp_cone.contains_interior_int(&[-1, 1]).unwrap());
        assert!(x.amp_cone.contains_interior_int(&[-1, 2]).unwrap());
    }

    #[test]
    fn oracle_values() {
        let x = build_product(1, 2).unwrap();
        assert_eq!(x.h0(&dc(&[2, 1])).unwrap(), 9);
        assert_eq!(x.h0(&dc(&[-1, 4])).unwrap(), 0);
        assert_eq!(build_projective(2).unwrap().h0(&dc(&[3])).unwrap(), 10);
        let b = build_blowup_p2_point();
        assert_eq!(b.h0(&dc(&[-1, 2])).unwrap(), 5);
        assert_eq!(b.h0(&dc(&[-1, 0])).unwrap(), 0);
        assert_eq!(b.h0(&dc(&[0, 0])).unwrap(), 1);
        assert_eq!(b.h0(&dc(&[-1, 1])).unwrap(), 2);
        assert_eq!(b.h0(&dc(&[2, 1])).unwrap(), 3);
        assert_eq!(b.h0(&dc(&[-3, 2])).unwrap(), 0);
        assert_eq!(b.h0(&dc(&[0, -1])).unwrap(), 0);
    }

    #[test]
    fn h0_of_zero_is_one() {
        for x in [
            build_projective(3).unwrap(),
            build_product(2, 1).unwrap(),
            build_blowup_p2_point(),
        ] {
            assert_eq!(x.h0(&DivisorClass::zero(x.class_rank)).unwrap(), 1);
        }
    }

    #[test]
    fn no_oracle() {
        let x =
            VarietyPresentation::new("bare", 1, dc(&[-2]), &[vec![1]], &[vec![1]], None).unwrap();
        assert!(matches!(x.h0(&dc(&[1])), Err(Error::NoOracle(_))));
    }

    #[test]
    fn validation_errors() {
        let field = |r: Result<VarietyPresentation>| match r {
            Err(Error::Validation { field, .. }) => field,
            other => panic!("expected validation error, got {other:?}"),
        };
        let o = [vec![1, 0], vec![0, 1]];
        assert_eq!(
            field(VarietyPresentation::new(
                "x",
                0,
                dc(&[-2, -2]),
                &o,
                &o,
                None
            )),
            "dim"
        );
        assert_eq!(
            field(VarietyPresentation::new(
                "x",
                2,
                dc(&[-2, -2]),
                &[vec![1, 0]],
                &o,
                None
            )),
            "eff_generators"
        );
        assert_eq!(
            field(VarietyPresentation::new(
                "x",
                2,
                dc(&[-2, -2]),
                &o,
                &[vec![1, 0], vec![-1, 1]],
                None
            )),
            "amp_generators[1]"
        );
        assert_eq!(
            field(VarietyPresentation::new(
                "x",
                2,
                dc(&[-2, -2]),
                &o,
                &[vec![1]],
                None
            )),
            "amp_generators[0]"
        );
        assert_eq!(
            field(VarietyPresentation::new(
                "x",
                2,
                dc(&[-3, -2]),
                &o,
                &o,
                Some(SectionOracle::Product { m: 1, n: 1 })
            )),
            "canonical_class"
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(2, 5).unwrap(), 0);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert!(binomial(200, 100).is_err());
    }
}
