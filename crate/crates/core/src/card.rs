//! JSON analysis cards and the builtin example catalog.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DivisorClass, SectionOracle, VarietyPresentation};
use crate::multisection::MultiSectionSetup;

/// Serialized input of one analysis. Integers must be JSON integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisCard {
    pub name: String,
    pub dim: i64,
    pub class_rank: i64,
    pub canonical_class: Vec<i64>,
    pub eff_generators: Vec<Vec<i64>>,
    pub amp_generators: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<SectionOracle>,
    pub divisors: Vec<Vec<i64>>,
}

impl AnalysisCard {
    /// Parses a card; errors name the offending field (e.g. `divisors[1][0]`).
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." {
                "card".to_string()
            } else {
                path
            };
            Error::validation(field, e.into_inner().to_string())
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("card serializes");
        s.push('\n');
        s
    }

    /// Checks every field and assembles the setup.
    pub fn validate(&self) -> Result<MultiSectionSetup> {
        if self.dim < 1 {
            return Err(Error::validation(
                "dim",
                "variety dimension must be positive",
            ));
        }
        if self.class_rank < 1 {
            return Err(Error::validation("class_rank", "must be positive"));
        }
        let r = self.class_rank as usize;
        if self.canonical_class.len() != r {
            return Err(Error::validation(
                "canonical_class",
                format!(
                    "expected {r} coordinates, found {}",
                    self.canonical_class.len()
                ),
            ));
        }
        let variety = VarietyPresentation::new(
            self.name.clone(),
            self.dim,
            DivisorClass(self.canonical_class.clone()),
            &self.eff_generators,
            &self.amp_generators,
            self.oracle,
        )?;
        let divisors = self.divisors.iter().cloned().map(DivisorClass).collect();
        MultiSectionSetup::new(variety, divisors)
    }
}

/// A compiled-in card with the reason its ring `T` is known to be Noetherian.
#[derive(Clone, Debug)]
pub struct BuiltinCard {
    pub key: &'static str,
    pub card: AnalysisCard,
    pub noetherian_note: &'static str,
}

const ZARISKI: &str = "all divisors are ample, so T is Noetherian by a famous result of Zariski";

pub fn builtin_cards() -> Vec<BuiltinCard> {
    vec![
        BuiltinCard {
            key: "veronese",
            card: AnalysisCard {
                name: "veronese".into(),
                dim: 2,
                class_rank: 1,
                canonical_class: vec![-3],
                eff_generators: vec![vec![1]],
                amp_generators: vec![vec![1]],
                oracle: Some(SectionOracle::Projective { n: 2 }),
                divisors: vec![vec![2]],
            },
            noetherian_note: ZARISKI,
        },
        BuiltinCard {
            key: "fano-product",
            card: AnalysisCard {
                name: "fano-product".into(),
                dim: 3,
                class_rank: 2,
                canonical_class: vec![-2, -3],
                eff_generators: vec![vec![1, 0], vec![0, 1]],
                amp_generators: vec![vec![1, 0], vec![0, 1]],
                oracle: Some(SectionOracle::Product { m: 1, n: 2 }),
                divisors: vec![vec![1, 1], vec![1, 2]],
            },
            noetherian_note: ZARISKI,
        },
        BuiltinCard {
            key: "blowup",
            card: AnalysisCard {
                name: "blowup".into(),
                dim: 2,
                class_rank: 2,
                canonical_class: vec![1, -3],
                eff_generators: vec![vec![1, 0], vec![-1, 1]],
                amp_generators: vec![vec![0, 1], vec![-1, 1]],
                oracle: Some(SectionOracle::BlowupP2Point),
                divisors: vec![vec![-1, 0], vec![0, 1]],
            },
            noetherian_note: "T is the symbolic Rees ring of a reduced point, which equals the ordinary Rees ring and is finitely generated",
        },
    ]
}

pub fn builtin_card(key: &str) -> Option<BuiltinCard> {
    builtin_cards().into_iter().find(|b| b.key == key)
}

/// The builtin entry whose card equals `card`, if any.
pub fn builtin_provenance(card: &AnalysisCard) -> Option<BuiltinCard> {
    builtin_cards().into_iter().find(|b| &b.card == card)
}
