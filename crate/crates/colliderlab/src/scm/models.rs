//! Builders for the models used throughout the suite.

use crate::bellcore::{bin_weights, SettingsMap};
use crate::error::{Error, Result};

use super::{Scm, ScmBuilder};

/// Admissions collider: `Academic ~ Bern(p)` and `Athletic ~ Bern(q)`
/// independent, `Admit = Academic OR Athletic`.
pub fn build_ivy(p: f64, q: f64) -> Result<Scm> {
    for (name, value) in [("p", p), ("q", q)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ProbabilityOutOfRange { name, value });
        }
    }
    ScmBuilder::new()
        .choice("Academic", &[1.0 - p, p])?
        .choice("Athletic", &[1.0 - q, q])?
        .deterministic("Admit", &["Academic", "Athletic"], 2, |pa| {
            usize::from(pa[0] == 1 || pa[1] == 1)
        })?
        .build()
}

/// Two independent fair destination choices and a meeting collider that
/// fires when they coincide.
pub fn build_death_in_damascus() -> Scm {
    ScmBuilder::new()
        .choice("YourChoice", &[0.5, 0.5])
        .and_then(|b| b.choice("DeathChoice", &[0.5, 0.5]))
        .and_then(|b| {
            b.deterministic("Meeting", &["YourChoice", "DeathChoice"], 2, |pa| {
                usize::from(pa[0] == pa[1])
            })
        })
        .and_then(ScmBuilder::build)
        .expect("fixed fair-coin model")
}

/// Classical analogue of the swap experiment: binary settings `a, b` and
/// fair outcome coins `A, B`, plus a four-valued bin label `M` drawn with
/// probability `q(m | a, b, A, B)` equal to the exact wing-outcome
/// conditional of Bell state `m` at the mapped angles. Conditioning any bin
/// then reproduces that Bell state's statistics exactly, by Bayes' rule and
/// the uniformity of both marginals.
///
/// `M`'s noise uses a shared-uniform construction: one atom per interval
/// between the conditional CDF breakpoints across all sixteen parent
/// configurations, so the finite noise domain realizes every conditional
/// exactly and noise-fixed counterfactuals couple through a common quantile.
pub fn build_toy_bell(settings: &SettingsMap) -> Scm {
    let weights = bin_weights(settings);

    let config_of = |pa: &[usize]| -> usize { pa[0] << 3 | pa[1] << 2 | pa[2] << 1 | pa[3] };
    let mut cdfs = vec![[0.0f64; 4]; 16];
    let mut breaks = vec![0.0, 1.0];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    let q = &weights[a][b][x][y];
                    let config = config_of(&[a, b, x, y]);
                    let mut acc = 0.0;
                    for m in 0..4 {
                        acc += q[m];
                        cdfs[config][m] = acc;
                        if m < 3 {
                            breaks.push(acc);
                        }
                    }
                }
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut atom_weights = Vec::new();
    let mut atom_bins = Vec::new(); // [atom][config] -> m
    for pair in breaks.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi <= lo {
            continue;
        }
        atom_weights.push(hi - lo);
        let mid = 0.5 * (lo + hi);
        let bins: [u8; 16] = std::array::from_fn(|config| {
            cdfs[config].iter().position(|&c| mid < c).unwrap_or(3) as u8
        });
        atom_bins.push(bins);
    }

    ScmBuilder::new()
        .choice("a", &[0.5, 0.5])
        .and_then(|b| b.choice("b", &[0.5, 0.5]))
        .and_then(|b| b.choice("A", &[0.5, 0.5]))
        .and_then(|b| b.choice("B", &[0.5, 0.5]))
        .and_then(|b| {
            b.stochastic("M", &["a", "b", "A", "B"], 4, &atom_weights, move |pa, atom| {
                usize::from(atom_bins[atom][config_of(pa)])
            })
        })
        .and_then(ScmBuilder::build)
        .expect("toy model construction is total")
}

/// Which boundary condition pins the photon's origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenroseRegime {
    /// Ordinary initial control: the source fires every run.
    InitialControl,
    /// Equilibrium: origin uniformly random.
    Equilibrium,
}

/// Retrodiction model for a photon crossing a half-silvered mirror:
/// `Origin` is the lamp `S` or the floor `F`, `Branch` is transmit/reflect
/// at the mirror, and the terminal is fixed by the route table
/// `(S, transmit) -> D`, `(S, reflect) -> C`, `(F, transmit) -> C`,
/// `(F, reflect) -> D`.
pub fn build_penrose_paths(regime: PenroseRegime) -> Scm {
    let origin_dist = match regime {
        PenroseRegime::InitialControl => [1.0, 0.0],
        PenroseRegime::Equilibrium => [0.5, 0.5],
    };
    ScmBuilder::new()
        .choice_labeled("Origin", &origin_dist, Some(&["S", "F"]))
        .and_then(|b| {
            b.choice_labeled("Branch", &[0.5, 0.5], Some(&["transmit", "reflect"]))
        })
        .and_then(|b| {
            b.deterministic_labeled(
                "Terminal",
                &["Origin", "Branch"],
                2,
                Some(&["D", "C"]),
                |pa| pa[0] ^ pa[1],
            )
        })
        .and_then(ScmBuilder::build)
        .expect("fixed route model")
}
