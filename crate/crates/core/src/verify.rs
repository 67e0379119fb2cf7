//! The builtin verification suite: projective spaces with a multiple of the
//! hyperplane, products of projective spaces with two ample divisors, and
//! the blown-up plane with `D = (-E, A)`.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{build_blowup_p2_point, build_product, build_projective, DivisorClass};
use crate::hilbert::{check_shift, verify_free_shift, DegreeWindow};
use crate::multisection::{HeightClass, MultiSectionSetup, Ring};

pub const EXAMPLES: [&str; 4] = ["veronese", "fano-product", "gorenstein-grid", "blowup"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub example: &'static str,
    pub label: String,
    pub expected: String,
    pub computed: String,
}

impl Assertion {
    fn new(
        example: &'static str,
        label: impl Into<String>,
        expected: impl ToString,
        computed: impl ToString,
    ) -> Self {
        Assertion {
            example,
            label: label.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.expected == self.computed
    }
}

/// Runs one example (or `all`).
pub fn run(name: &str) -> Result<Vec<Assertion>> {
    run_with(name, Exec::default())
}

pub fn run_with(name: &str, exec: Exec) -> Result<Vec<Assertion>> {
    match name {
        "veronese" => veronese(exec),
        "fano-product" => fano_product(exec),
        "gorenstein-grid" => gorenstein_grid(exec),
        "blowup" => blowup(),
        "all" => {
            let mut out = Vec::new();
            for ex in EXAMPLES {
                out.extend(run_with(ex, exec)?);
            }
            Ok(out)
        }
        other => Err(Error::validation(
            "example",
            format!(
                "unknown example `{other}` (expected one of {}, all)",
                EXAMPLES.join(", ")
            ),
        )),
    }
}

fn dc(v: &[i64]) -> DivisorClass {
    DivisorClass(v.to_vec())
}

fn fmt_shift(s: &Option<Vec<BigInt>>) -> String {
    match s {
        None => "none".into(),
        Some(v) => {
            let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
            format!("({})", parts.join(", "))
        }
    }
}

fn veronese(exec: Exec) -> Result<Vec<Assertion>> {
    let cases: Vec<(u32, i64)> = (1..=6).flat_map(|n| (1..=6).map(move |d| (n, d))).collect();
    let rows = exec.map(&cases, |&(n, d)| -> Result<Assertion> {
        let setup = MultiSectionSetup::new(build_projective(n)?, vec![dc(&[d])])?;
        let group = setup.class_group(Ring::T)?;
        let canon = setup.canonical_report(Ring::T)?;
        let mut computed = format!(
            "Cl(T)={group} free={} shift={}",
            canon.free,
            fmt_shift(&canon.shift)
        );
        if canon.free {
            let window = DegreeWindow::new(setup.compute_u()?, vec![-4], vec![8])?;
            let v = verify_free_shift(&setup, &canon, &window)?;
            computed.push_str(if v.passed() {
                " hilbert=ok"
            } else {
                " hilbert=FAIL"
            });
        }
        let np1 = n as i64 + 1;
        let expected_group = if d == 1 {
            "0".to_string()
        } else {
            format!("Z/{d}")
        };
        let free = np1 % d == 0;
        let expected = if free {
            format!(
                "Cl(T)={expected_group} free=true shift=({}) hilbert=ok",
                -np1 / d
            )
        } else {
            format!("Cl(T)={expected_group} free=false shift=none")
        };
        Ok(Assertion::new(
            "veronese",
            format!("P^{n}, D = {d}H"),
            expected,
            computed,
        ))
    });
    rows.into_iter().collect()
}

/// One case of the `P^m × P^n` grid with `D_1 = (a, b)`, `D_2 = (c, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridCase {
    pub m: u32,
    pub n: u32,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GridCase {
    pub fn setup(&self) -> Result<MultiSectionSetup> {
        MultiSectionSetup::new(
            build_product(self.m, self.n)?,
            vec![dc(&[self.a, self.b]), dc(&[self.c, self.d])],
        )
    }
}

/// `m, n ∈ {1,2,3}`, `a, b, c, d ∈ {1..4}`, `ad ≠ bc`.
pub fn grid_cases() -> Vec<GridCase> {
    let mut out = Vec::new();
    for m in 1..=3 {
        for n in 1..=3 {
            for a in 1..=4 {
                for b in 1..=4 {
                    for c in 1..=4 {
                        for d in 1..=4 {
                            if a * d != b * c {
                                out.push(GridCase { m, n, a, b, c, d });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridOutcome {
    pub case: GridCase,
    pub u_is_full: bool,
    pub cl_t_is_z2: bool,
    pub free_t: bool,
    pub free_r: bool,
}

pub fn sweep_grid(exec: Exec) -> Result<Vec<GridOutcome>> {
    let cases = grid_cases();
    exec.map(&cases, |case| -> Result<GridOutcome> {
        let setup = case.setup()?;
        let u = setup.compute_u()?;
        let group = setup.class_group_given(Ring::T, &u);
        Ok(GridOutcome {
            case: *case,
            u_is_full: u.members() == [1, 2],
            cl_t_is_z2: group.free_rank == 2 && group.invariant_factors.is_empty(),
            free_t: setup.canonical_report_given(Ring::T, &u)?.free,
            free_r: setup.canonical_report(Ring::R)?.free,
        })
    })
    .into_iter()
    .collect()
}

/// `(m+1, n+1) ∈ Z(a,b) + Z(c,d)`, by Cramer's rule.
pub fn in_integer_span(case: &GridCase) -> bool {
    let det = case.a * case.d - case.b * case.c;
    let (x, y) = (case.m as i64 + 1, case.n as i64 + 1);
    let p = x * case.d - y * case.c;
    let q = case.a * y - case.b * x;
    p.is_multiple_of(&det) && q.is_multiple_of(&det)
}

fn fano_product(exec: Exec) -> Result<Vec<Assertion>> {
    let outcomes = sweep_grid(exec)?;
    let total = outcomes.len();
    let u_full = outcomes.iter().filter(|o| o.u_is_full).count();
    let cl = outcomes.iter().filter(|o| o.cl_t_is_z2).count();
    let fano = outcomes
        .iter()
        .filter(|o| {
            let c = o.case;
            o.free_t == (c.a + c.c == c.m as i64 + 1 && c.b + c.d == c.n as i64 + 1)
        })
        .count();
    let mut rows = vec![
        Assertion::new("fano-product", "U = {1, 2} (cases)", total, u_full),
        Assertion::new("fano-product", "Cl(T) = Z^2 (cases)", total, cl),
        Assertion::new(
            "fano-product",
            "free iff D_1 + D_2 = -K_X (cases)",
            total,
            fano,
        ),
    ];

    let setup = MultiSectionSetup::new(build_product(1, 2)?, vec![dc(&[1, 1]), dc(&[1, 2])])?;
    let canon = setup.canonical_report(Ring::T)?;
    rows.push(Assertion::new(
        "fano-product",
        "P^1 x P^2, D = (1,1), (1,2): shift",
        "(-1, -1)",
        fmt_shift(&canon.shift),
    ));
    let window = DegreeWindow::default_for(crate::hilbert::Marker::OmegaT, 2, setup.compute_u()?);
    rows.push(Assertion::new(
        "fano-product",
        "P^1 x P^2: graded dimensions of omega_T match T(-1,-1)",
        true,
        verify_free_shift(&setup, &canon, &window)?.passed(),
    ));
    Ok(rows)
}

fn gorenstein_grid(exec: Exec) -> Result<Vec<Assertion>> {
    let outcomes = sweep_grid(exec)?;
    let total = outcomes.len();
    let t_ok = outcomes
        .iter()
        .filter(|o| {
            let c = o.case;
            o.free_t == (c.m as i64 + 1 == c.a + c.c && c.n as i64 + 1 == c.b + c.d)
        })
        .count();
    let r_ok = outcomes
        .iter()
        .filter(|o| o.free_r == in_integer_span(&o.case))
        .count();
    let t_free = outcomes.iter().filter(|o| o.free_t).count();
    Ok(vec![
        Assertion::new(
            "gorenstein-grid",
            "T Gorenstein iff m+1 = a+c and n+1 = b+d (cases)",
            total,
            t_ok,
        ),
        Assertion::new(
            "gorenstein-grid",
            "R Gorenstein iff (m+1, n+1) in Z(a,b) + Z(c,d) (cases)",
            total,
            r_ok,
        ),
        Assertion::new(
            "gorenstein-grid",
            "T Gorenstein cases found",
            "nonzero",
            if t_free > 0 { "nonzero" } else { "zero" },
        ),
    ])
}

fn blowup() -> Result<Vec<Assertion>> {
    const EX: &str = "blowup";
    let setup = MultiSectionSetup::new(build_blowup_p2_point(), vec![dc(&[-1, 0]), dc(&[0, 1])])?;
    let mut rows = vec![
        Assertion::new(EX, "hypothesis T", true, setup.check_hypothesis_t()),
        Assertion::new(EX, "hypothesis R", true, setup.check_hypothesis_r()),
    ];
    let u = setup.compute_u()?;
    rows.push(Assertion::new(EX, "U", "{1}", &u));
    rows.push(Assertion::new(
        EX,
        "Cl(T)",
        "Z",
        setup.class_group_given(Ring::T, &u),
    ));
    rows.push(Assertion::new(
        EX,
        "Cl(R)",
        "0",
        setup.class_group(Ring::R)?,
    ));
    for ring in [Ring::T, Ring::R] {
        let canon = setup.canonical_report_given(ring, &u)?;
        rows.push(Assertion::new(
            EX,
            format!("omega_{ring} free"),
            true,
            canon.free,
        ));
        rows.push(Assertion::new(
            EX,
            format!("omega_{ring} shift"),
            "(-1, -3)",
            fmt_shift(&canon.shift),
        ));
    }
    let heights = setup.height_report_given(&u);
    rows.push(Assertion::new(
        EX,
        "heights",
        format!("{:?}", [HeightClass::ExactlyOne, HeightClass::AtLeastTwo]),
        format!("{:?}", heights.0),
    ));

    let wt = DegreeWindow::new(u.clone(), vec![1, -2], vec![6, 8])?;
    let wr = DegreeWindow::new(u.clone(), vec![-4, -4], vec![6, 6])?;
    for (ring, window) in [(Ring::T, &wt), (Ring::R, &wr)] {
        let canon = setup.canonical_report_given(ring, &u)?;
        let v = verify_free_shift(&setup, &canon, window)?;
        rows.push(Assertion::new(
            EX,
            format!("omega_{ring} = {ring}(-1,-3) on the box"),
            true,
            v.passed(),
        ));
        for (i, delta) in [(0, -1), (0, 1), (1, -1), (1, 1)] {
            let mut shift = vec![-1i64, -3];
            shift[i] += delta;
            let v = check_shift(&setup, ring, &shift, window, Exec::default())?;
            rows.push(Assertion::new(
                EX,
                format!(
                    "perturbed shift ({}, {}) rejected for {ring}",
                    shift[0], shift[1]
                ),
                true,
                !v.passed(),
            ));
        }
    }
    let group = setup.class_group_given(Ring::T, &u);
    let k = setup
        .push_class(Ring::T, &group, &dc(&[1, -3]))?
        .quotient_coords;
    let e = setup
        .push_class(Ring::T, &group, &dc(&[1, 0]))?
        .quotient_coords;
    rows.push(Assertion::new(EX, "q(K_X) = q(E)", &e, &k));
    let generator =
        e.torsion.is_empty() && e.free.len() == 1 && e.free[0].magnitude() == &1u32.into();
    rows.push(Assertion::new(EX, "q(E) generates Cl(T)", true, generator));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_passes() {
        for ex in EXAMPLES {
            for a in run(ex).unwrap() {
                assert!(a.passed(), "{a:?}");
            }
        }
    }

    #[test]
    fn unknown_example() {
        assert!(run("nope").is_err());
    }

    #[test]
    fn cramer_span() {
        let c = GridCase {
            m: 1,
            n: 2,
            a: 1,
            b: 1,
            c: 1,
            d: 2,
        };
        assert!(in_integer_span(&c));
        let c = GridCase {
            m: 1,
            n: 1,
            a: 2,
            b: 0,
            c: 0,
            d: 2,
        };
        assert!(in_integer_span(&c));
        let c = GridCase {
            m: 2,
            n: 2,
            a: 2,
            b: 0,
            c: 0,
            d: 2,
        };
        assert!(!in_integer_span(&c));
    }
}
