//! Trial records and selected collections of them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{no_signalling_deviation, FreqTable16};

use super::bell::BellIndex;
use super::settings::SettingsMap;

/// One experimental trial: two setting choices, two outcomes, and the
/// collider value when the run had a joint-measurement or preparation stage
/// (the swap outcome for W-type runs, the preparation index for V-type runs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub setting_a: u8,
    pub setting_b: u8,
    pub outcome_a: u8,
    pub outcome_b: u8,
    pub collider: Option<BellIndex>,
}

/// How a collection of runs was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Selection {
    /// Every run kept.
    Unselected,
    /// Runs with another collider value were discarded after the fact.
    Postselected(BellIndex),
    /// The collider was locked: other values never occurred.
    Constrained(BellIndex),
    /// The preparation was held fixed from the start.
    Preselected(BellIndex),
}

impl Selection {
    pub fn target(self) -> Option<BellIndex> {
        match self {
            Selection::Unselected => None,
            Selection::Postselected(m)
            | Selection::Constrained(m)
            | Selection::Preselected(m) => Some(m),
        }
    }
}

/// Runs plus the selection that produced them and the settings map in force.
#[derive(Debug, Clone, Serialize)]
pub struct Ensemble {
    runs: Vec<RunRecord>,
    selection: Selection,
    settings: SettingsMap,
}

impl Ensemble {
    /// Validates the selection invariant: a selected ensemble contains only
    /// runs with the selected collider value.
    pub fn new(runs: Vec<RunRecord>, selection: Selection, settings: SettingsMap) -> Result<Self> {
        if let Some(m) = selection.target() {
            if let Some(bad) = runs.iter().find(|r| r.collider != Some(m)) {
                return Err(Error::SelectionMismatch {
                    expected: m.value(),
                    found: bad.collider.map(BellIndex::value),
                });
            }
        }
        Ok(Self {
            runs,
            selection,
            settings,
        })
    }

    pub fn runs(&self) -> &[RunRecord] {
        &self.runs
    }

    pub fn selection(&self) -> Selection {
        self.selection
    }

    pub fn settings(&self) -> &SettingsMap {
        &self.settings
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Keeps only runs whose collider equals `m`.
    pub fn postselect(&self, m: BellIndex) -> Ensemble {
        Ensemble {
            runs: self
                .runs
                .iter()
                .filter(|r| r.collider == Some(m))
                .copied()
                .collect(),
            selection: Selection::Postselected(m),
            settings: self.settings,
        }
    }
}

/// Marginal-independence report for the two wings.
#[derive(Debug, Clone, Serialize)]
pub struct NoSignallingReport {
    /// Largest deviation between a wing's outcome marginals across the other
    /// wing's settings, in standard errors.
    pub max_abs_z: f64,
    /// Same deviation in raw probability.
    pub max_abs_dev: f64,
    /// Caller-supplied threshold in standard errors.
    pub sigma_threshold: f64,
    pub pass: bool,
}

/// Tests, for each wing, that the wing's outcome marginal is independent of
/// the other wing's setting choice; passes when every deviation stays within
/// `sigma_threshold` standard errors.
pub fn no_signalling(ensemble: &Ensemble, sigma_threshold: f64) -> Result<NoSignallingReport> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let table = FreqTable16::from_ensemble(ensemble)?;
    let (max_abs_z, max_abs_dev) = no_signalling_deviation(&table);
    Ok(NoSignallingReport {
        max_abs_z,
        max_abs_dev,
        sigma_threshold,
        pass: max_abs_z < sigma_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(a: u8, b: u8, x: u8, y: u8, m: Option<u8>) -> RunRecord {
        RunRecord {
            setting_a: a,
            setting_b: b,
            outcome_a: x,
            outcome_b: y,
            collider: m.map(|v| BellIndex::new(v).unwrap()),
        }
    }

    #[test]
    fn selection_invariant_enforced() {
        let m0 = BellIndex::new(0).unwrap();
        let ok = Ensemble::new(
            vec![record(0, 0, 0, 0, Some(0)), record(1, 0, 1, 1, Some(0))],
            Selection::Postselected(m0),
            SettingsMap::chsh_optimal(),
        );
        assert!(ok.is_ok());

        let bad = Ensemble::new(
            vec![record(0, 0, 0, 0, Some(1))],
            Selection::Postselected(m0),
            SettingsMap::chsh_optimal(),
        );
        assert!(matches!(bad, Err(Error::SelectionMismatch { .. })));
    }

    #[test]
    fn postselect_filters_by_collider() {
        let runs = (0..4u8)
            .map(|m| record(0, 0, m & 1, 0, Some(m)))
            .collect();
        let ensemble =
            Ensemble::new(runs, Selection::Unselected, SettingsMap::chsh_optimal()).unwrap();
        let sub = ensemble.postselect(BellIndex::new(2).unwrap());
        assert_eq!(sub.len(), 1);
        assert_eq!(sub.runs()[0].outcome_a, 0);
        assert_eq!(sub.selection(), Selection::Postselected(BellIndex::new(2).unwrap()));
    }

    #[test]
    fn hand_built_signalling_ensemble_fails() {
        // B copies a: Bob's marginal depends on Alice's setting.
        let mut runs = Vec::new();
        for a in 0..2u8 {
            for b in 0..2u8 {
                for _ in 0..500 {
                    runs.push(record(a, b, 0, a, None));
                }
            }
        }
        let ensemble =
            Ensemble::new(runs, Selection::Unselected, SettingsMap::chsh_optimal()).unwrap();
        let report = no_signalling(&ensemble, 4.0).unwrap();
        assert!(!report.pass);
        assert!(report.max_abs_dev > 0.9);
    }

    #[test]
    fn empty_ensemble_is_an_error() {
        let ensemble = Ensemble::new(
            Vec::new(),
            Selection::Unselected,
            SettingsMap::chsh_optimal(),
        )
        .unwrap();
        assert!(matches!(
            no_signalling(&ensemble, 4.0),
            Err(Error::EmptyEnsemble)
        ));
    }
}
