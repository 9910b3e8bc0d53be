//! Opponent strategies: monotone partial step functions `Φ_e(x)[s]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything answering `Φ_e(x)[s]`.
pub trait StrategyOracle {
    fn step(&self, x: u64, s: u64) -> Option<u64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub x: u64,
    pub value: u64,
    pub stage: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableDoc {
    entries: Vec<StrategyEntry>,
}

/// A strategy as a finite table `x ↦ (value, convergence stage)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "TableDoc", into = "TableDoc")]
pub struct StrategyTable {
    entries: BTreeMap<u64, (u64, u64)>,
}

impl TryFrom<TableDoc> for StrategyTable {
    type Error = Error;

    fn try_from(doc: TableDoc) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for e in doc.entries {
            if entries.insert(e.x, (e.value, e.stage)).is_some() {
                return Err(Error::BadInput(format!("argument {} listed twice", e.x)));
            }
        }
        Ok(StrategyTable { entries })
    }
}

impl From<StrategyTable> for TableDoc {
    fn from(t: StrategyTable) -> Self {
        TableDoc {
            entries: t.entries.into_iter().map(|(x, (value, stage))| StrategyEntry { x, value, stage }).collect(),
        }
    }
}

impl StrategyOracle for StrategyTable {
    fn step(&self, x: u64, s: u64) -> Option<u64> {
        self.entries.get(&x).filter(|&&(_, st)| st <= s).map(|&(v, _)| v)
    }
}

impl StrategyTable {
    /// Entries given as `(x, value, stage)`.
    pub fn new(entries: &[(u64, u64, u64)]) -> Self {
        StrategyTable { entries: entries.iter().map(|&(x, v, s)| (x, (v, s))).collect() }
    }

    pub fn never() -> Self {
        StrategyTable::default()
    }

    /// Tabulates an oracle over `x ≤ s ≤ stages`.
    pub fn probe(oracle: &dyn StrategyOracle, stages: u64) -> Self {
        let mut entries = BTreeMap::new();
        for x in 0..=stages {
            if let Some(s) = (x..=stages).find(|&s| oracle.step(x, s).is_some()) {
                entries.insert(x, (oracle.step(x, s).expect("found above"), s));
            }
        }
        StrategyTable { entries }
    }

    /// `s_{e,x}`.
    pub fn convergence_stage(&self, x: u64) -> Option<u64> {
        self.entries.get(&x).map(|&(_, s)| s)
    }

    pub fn value(&self, x: u64) -> Option<u64> {
        self.entries.get(&x).map(|&(v, _)| v)
    }

    pub fn entries(&self) -> impl Iterator<Item = StrategyEntry> + '_ {
        self.entries.iter().map(|(&x, &(value, stage))| StrategyEntry { x, value, stage })
    }

    /// Values converged by stage `s`, in argument order.
    pub fn converged_prefix(&self, s: u64) -> Vec<u64> {
        (0..).map_while(|x| self.step(x, s)).collect()
    }

    /// Nonempty with every listed argument converged by `s`.
    pub fn is_total_by(&self, s: u64) -> bool {
        !self.entries.is_empty() && self.entries.values().all(|&(_, st)| st <= s)
    }

    /// Checks `e, x, y ≤ s` and that every `z < x` has converged by `s`.
    pub fn validate(&self, e: usize) -> Result<()> {
        let bad = |reason: String| Error::StrategyConvention { strategy: e, reason };
        for (&x, &(y, s)) in &self.entries {
            if e as u64 > s || x > s || y > s {
                return Err(bad(format!("answer {y} for {x} at stage {s} exceeds its stage")));
            }
            for z in 0..x {
                match self.convergence_stage(z) {
                    Some(sz) if sz <= s => {}
                    _ => return Err(bad(format!("{x} converges at stage {s} before {z}"))),
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StrategySuite {
    pub strategies: Vec<StrategyTable>,
}

impl StrategySuite {
    pub fn validate(&self) -> Result<()> {
        self.strategies.iter().enumerate().try_for_each(|(e, t)| t.validate(e))
    }
}

/// Five strategies: one redefining its target at stage 3, one that never
/// converges, and three total ones converging at staggered stages.
pub fn bundled_suite() -> StrategySuite {
    StrategySuite {
        strategies: vec![
            StrategyTable::new(&[(0, 1, 3), (1, 2, 5)]),
            StrategyTable::never(),
            StrategyTable::new(&[(0, 0, 4), (1, 3, 6), (2, 1, 9)]),
            StrategyTable::new(&[(0, 3, 7), (1, 1, 8)]),
            StrategyTable::new(&[(0, 4, 10), (1, 4, 12), (2, 5, 14)]),
        ],
    }
}
