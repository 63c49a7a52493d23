//! Win events over the rows of an n-round table.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::games::Game;
use crate::min_wins;

use super::joint::RoundLayout;
use super::table::JointTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WinEventSpec {
    /// The whole probability space.
    Always,
    /// Round `j` is won.
    Round { j: usize },
    /// At least a `threshold` fraction of all rounds is won.
    Global { threshold: f64 },
    /// At least a `threshold` fraction of the listed rounds is won. Repeated
    /// indices count with multiplicity; an empty list is always satisfied.
    Subset { rounds: Vec<usize>, threshold: f64 },
}

impl WinEventSpec {
    pub fn subset_from_tau(rounds: &[usize], tau: f64) -> Self {
        WinEventSpec::Subset {
            rounds: rounds.to_vec(),
            threshold: 1.0 - tau,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let bad_threshold = |t: f64| !(0.0..=1.0).contains(&t);
        match self {
            WinEventSpec::Always => Ok(()),
            WinEventSpec::Round { j } if *j >= n => Err(invalid(format!("round {j} out of range"))),
            WinEventSpec::Round { .. } => Ok(()),
            WinEventSpec::Global { threshold } if bad_threshold(*threshold) => {
                Err(invalid("threshold must be in [0, 1]"))
            }
            WinEventSpec::Global { .. } => Ok(()),
            WinEventSpec::Subset { rounds, threshold } => {
                if bad_threshold(*threshold) {
                    return Err(invalid("threshold must be in [0, 1]"));
                }
                if let Some(i) = rounds.iter().find(|&&i| i >= n) {
                    return Err(invalid(format!("round {i} out of range")));
                }
                Ok(())
            }
        }
    }

    /// Compiles the event into a row predicate for the given table layout.
    pub fn predicate<'a>(
        &'a self,
        layout: &'a RoundLayout,
        game: &'a Game,
    ) -> Result<impl Fn(&[u16]) -> bool + 'a> {
        self.check(layout.n())?;
        let need = match self {
            WinEventSpec::Global { threshold } => min_wins(*threshold, layout.n()),
            WinEventSpec::Subset { rounds, threshold } => min_wins(*threshold, rounds.len()),
            _ => 0,
        };
        Ok(move |row: &[u16]| match self {
            WinEventSpec::Always => true,
            WinEventSpec::Round { j } => layout.round_won(game, row, *j),
            WinEventSpec::Global { .. } => {
                (0..layout.n())
                    .filter(|&i| layout.round_won(game, row, i))
                    .count()
                    >= need
            }
            WinEventSpec::Subset { rounds, .. } => {
                rounds
                    .iter()
                    .filter(|&&i| layout.round_won(game, row, i))
                    .count()
                    >= need
            }
        })
    }

    pub fn probability(&self, table: &JointTable, game: &Game) -> Result<f64> {
        let layout = RoundLayout::of(table)?;
        let pred = self.predicate(&layout, game)?;
        Ok(table.probability(pred))
    }
}

/// Conditional table given the event, and the event's probability.
pub fn condition_on_event(
    table: &JointTable,
    event: &WinEventSpec,
    game: &Game,
) -> Result<(JointTable, f64)> {
    let layout = RoundLayout::of(table)?;
    let pred = event.predicate(&layout, game)?;
    table.condition(pred)
}
