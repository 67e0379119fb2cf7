//! Orchestration of one card analysis and its text / JSON renderings.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::card::{builtin_provenance, AnalysisCard};
use crate::error::Result;
use crate::hilbert::{verify_free_shift, DegreeWindow, Marker, ShiftVerdict};
use crate::lattice::QuotientPresentation;
use crate::multisection::{CanonicalReport, HeightReport, MultiSectionSetup, Ring, USet};

/// Boxes larger than this many degrees are not Hilbert-verified by `analyze`.
const MAX_VERIFY_DEGREES: usize = 5_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub structure: String,
    pub free_rank: usize,
    #[serde(with = "crate::bigint_serde::vec")]
    pub invariant_factors: Vec<BigInt>,
}

impl From<&QuotientPresentation> for GroupSummary {
    fn from(q: &QuotientPresentation) -> Self {
        GroupSummary {
            structure: q.to_string(),
            free_rank: q.free_rank,
            invariant_factors: q.invariant_factors.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftCheck {
    pub ring: Ring,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub result: ShiftVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSummary {
    /// Graded dimensions agree on the box; not a proof of isomorphism.
    pub status: String,
    pub checks: Vec<ShiftCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub card: String,
    pub s: usize,
    pub hypothesis_t: bool,
    pub hypothesis_r: bool,
    pub noetherian_assumed: bool,
    pub noetherian_note: String,
    pub u: Option<USet>,
    pub class_group_t: Option<GroupSummary>,
    pub class_group_r: Option<GroupSummary>,
    pub canonical_t: Option<CanonicalReport>,
    pub canonical_r: Option<CanonicalReport>,
    pub heights: Option<HeightReport>,
    pub hilbert_verification: Option<HilbertSummary>,
}

impl AnalysisReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypothesis_t && self.hypothesis_r
    }

    /// `free` agrees with a zero canonical class, and optional parts are
    /// present exactly when their hypothesis holds.
    pub fn is_consistent(&self) -> bool {
        let canon_ok = |c: &Option<CanonicalReport>| {
            c.as_ref()
                .is_none_or(|c| c.free == c.omega_class.is_zero() && c.free == c.shift.is_some())
        };
        canon_ok(&self.canonical_t)
            && canon_ok(&self.canonical_r)
            && self.u.is_some() == self.hypothesis_t
            && self.canonical_t.is_some() == self.hypothesis_t
            && self.canonical_r.is_some() == self.hypothesis_r
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn analyze(card: &AnalysisCard) -> Result<AnalysisReport> {
    let setup = card.validate()?;
    let provenance = builtin_provenance(card);
    let (noetherian_assumed, noetherian_note) = match &provenance {
        Some(b) => (false, b.noetherian_note.to_string()),
        None => (
            true,
            "T is assumed Noetherian; the freeness criterion for its canonical module relies on it"
                .to_string(),
        ),
    };
    let hypothesis_t = setup.check_hypothesis_t();
    let hypothesis_r = hypothesis_t || setup.check_hypothesis_r();

    let mut report = AnalysisReport {
        card: card.name.clone(),
        s: setup.s(),
        hypothesis_t,
        hypothesis_r,
        noetherian_assumed,
        noetherian_note,
        u: None,
        class_group_t: None,
        class_group_r: None,
        canonical_t: None,
        canonical_r: None,
        heights: None,
        hilbert_verification: None,
    };

    let none = USet::default();
    if hypothesis_r {
        report.class_group_r = Some((&setup.class_group_given(Ring::R, &none)).into());
        report.canonical_r = Some(setup.canonical_report_given(Ring::R, &none)?);
    }
    if hypothesis_t {
        let u = setup.compute_u()?;
        report.class_group_t = Some((&setup.class_group_given(Ring::T, &u)).into());
        report.canonical_t = Some(setup.canonical_report_given(Ring::T, &u)?);
        report.heights = Some(setup.height_report_given(&u));
        report.u = Some(u);
    }
    report.hilbert_verification = hilbert_summary(&setup, &report)?;
    debug_assert!(report.is_consistent());
    Ok(report)
}

fn hilbert_summary(
    setup: &MultiSectionSetup,
    report: &AnalysisReport,
) -> Result<Option<HilbertSummary>> {
    if !setup.variety.has_oracle() {
        return Ok(None);
    }
    let mut checks = Vec::new();
    for canon in [&report.canonical_t, &report.canonical_r]
        .into_iter()
        .flatten()
    {
        if !canon.free {
            continue;
        }
        let u = report.u.clone().unwrap_or_default();
        let window = DegreeWindow::default_for(Marker::canonical_of(canon.ring), setup.s(), u);
        if window.degrees().len() > MAX_VERIFY_DEGREES {
            continue;
        }
        let result = verify_free_shift(setup, canon, &window)?;
        checks.push(ShiftCheck {
            ring: canon.ring,
            lo: window.lo,
            hi: window.hi,
            result,
        });
    }
    if checks.is_empty() {
        return Ok(None);
    }
    let status = if checks.iter().all(|c| c.result.passed()) {
        "Hilbert-verified"
    } else {
        "Hilbert mismatch"
    };
    Ok(Some(HilbertSummary {
        status: status.to_string(),
        checks,
    }))
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn canonical_line(out: &mut String, c: &CanonicalReport) -> fmt::Result {
    writeln!(out, "canonical module of {}:", c.ring)?;
    writeln!(out, "  class        {}", c.omega_class)?;
    writeln!(out, "  free         {}", c.free)?;
    if let Some(shift) = &c.shift {
        writeln!(out, "  shift        {}", join(shift))?;
        for w in &c.shift_solution_lattice {
            writeln!(out, "  shift + Z·{}", join(w))?;
        }
    }
    Ok(())
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "card         {}", self.card)?;
        writeln!(out, "divisors     {}", self.s)?;
        writeln!(out, "hypothesis T {}", self.hypothesis_t)?;
        writeln!(out, "hypothesis R {}", self.hypothesis_r)?;
        writeln!(
            out,
            "noetherian   {} ({})",
            if self.noetherian_assumed {
                "assumed"
            } else {
                "known"
            },
            self.noetherian_note
        )?;
        if let Some(u) = &self.u {
            writeln!(out, "U            {u}")?;
        }
        if let Some(g) = &self.class_group_t {
            writeln!(out, "Cl(T)        {}", g.structure)?;
        }
        if let Some(g) = &self.class_group_r {
            writeln!(out, "Cl(R)        {}", g.structure)?;
        }
        if let Some(c) = &self.canonical_t {
            canonical_line(&mut out, c)?;
        }
        if let Some(c) = &self.canonical_r {
            canonical_line(&mut out, c)?;
        }
        if let Some(h) = &self.heights {
            for (j, class) in h.0.iter().enumerate() {
                writeln!(out, "ht(Q_{})      {class}", j + 1)?;
            }
        }
        if let Some(h) = &self.hilbert_verification {
            writeln!(out, "hilbert      {}", h.status)?;
            for c in &h.checks {
                let boxes: Vec<String> =
                    c.lo.iter()
                        .zip(&c.hi)
                        .map(|(l, h)| format!("{l}:{h}"))
                        .collect();
                match &c.result {
                    ShiftVerdict::Pass { degrees_checked } => writeln!(
                        out,
                        "  omega{} box {}: {degrees_checked} degrees agree",
                        c.ring,
                        boxes.join(",")
                    )?,
                    ShiftVerdict::Fail {
                        degree,
                        omega_dim,
                        ring_dim,
                    } => writeln!(
                        out,
                        "  omega{} box {}: mismatch at {} (omega {omega_dim}, ring {ring_dim})",
                        c.ring,
                        boxes.join(","),
                        join(degree)
                    )?,
                }
            }
        }
        f.write_str(&out)
    }
}
