//! Configuration reachability decision over the pruned reachability tree.

use serde::{Deserialize, Serialize};

use crate::ca::{Configuration, MinSteps, RuleVector};
use crate::error::{Error, Result};
use crate::tree::{self, Anchors, EdgeId, Level, PathSearchResult};

/// Why a decision came out negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// The destination prefix has no predecessor at this level.
    Condition1,
    /// Nothing but the source edge itself links into the source edge.
    Condition2,
    /// No walk from the destination edge to the source edge.
    NoPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Reachable { min_steps: u64 },
    NotReachable { reason: Reason, at_level: usize },
}

impl Outcome {
    pub fn is_reachable(&self) -> bool {
        matches!(self, Outcome::Reachable { .. })
    }

    pub fn min_steps(&self) -> Option<u64> {
        match self {
            Outcome::Reachable { min_steps } => Some(*min_steps),
            Outcome::NotReachable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub outcome: Outcome,
    /// Sum of `2 * Count` over every level whose walk search succeeded.
    pub explored_edges: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOptions {
    pub min_steps_required: MinSteps,
    pub count_edges: bool,
    pub prune_enabled: bool,
    /// Run the Condition 1 / Condition 2 shortcuts before searching.
    pub shortcuts_enabled: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            min_steps_required: MinSteps::Zero,
            count_edges: true,
            prune_enabled: true,
            shortcuts_enabled: true,
        }
    }
}

/// Flat record used for machine-readable output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Reason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explored_edges: Option<u64>,
}

impl Decision {
    pub fn record(&self, include_edges: bool) -> DecisionRecord {
        let (outcome, reason, at_level, min_steps) = match self.outcome {
            Outcome::Reachable { min_steps } => ("reachable", None, None, Some(min_steps)),
            Outcome::NotReachable { reason, at_level } => {
                ("not_reachable", Some(reason), Some(at_level), None)
            }
        };
        DecisionRecord {
            outcome: outcome.to_string(),
            reason,
            at_level,
            min_steps,
            explored_edges: include_edges.then_some(self.explored_edges),
        }
    }
}

/// Per-level record kept by [`decide_traced`].
#[derive(Debug, Clone)]
pub struct LevelTrace {
    pub level: Level,
    pub search: Option<PathSearchResult>,
    /// Level contents after pruning (equal to `level` when pruning is off).
    pub kept: Option<Level>,
}

#[derive(Debug, Clone)]
pub struct DecisionTrace {
    pub decision: Decision,
    pub levels: Vec<LevelTrace>,
}

impl DecisionTrace {
    /// Shortest last-level walk from the destination edge to the source edge.
    pub fn leaf_walk(&self) -> Option<&[EdgeId]> {
        if !self.decision.outcome.is_reachable() {
            return None;
        }
        self.levels.last()?.search.as_ref()?.walk.as_deref()
    }
}

/// True when the destination prefix edge is missing or carries no RMTs.
pub fn check_condition1(level: &Level) -> bool {
    match level.d_edge() {
        Some(d) => level.label(d).is_none_or(|l| l.is_empty()),
        None => true,
    }
}

/// True when the source edge is only ever linked from itself, so no other
/// edge can walk into it. Never fires when the two tracked edges coincide.
pub fn check_condition2(level: &Level) -> bool {
    let (Some(s), Some(d)) = (level.s_edge(), level.d_edge()) else {
        return false;
    };
    if s == d {
        return false;
    }
    let mut incoming = level.incoming_iter(s).peekable();
    incoming.peek().is_some() && incoming.all(|(from, _)| from == s)
}

fn validate(rv: &RuleVector, s: &Configuration, d: &Configuration) -> Result<()> {
    if rv.is_empty() {
        return Err(Error::EmptyRuleVector);
    }
    for c in [s, d] {
        if c.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if c.len() != rv.len() {
            return Err(Error::LengthMismatch { expected: rv.len(), found: c.len() });
        }
    }
    if rv.len() > tree::MAX_CELLS {
        return Err(Error::SizeCapExceeded { n: rv.len(), cap: tree::MAX_CELLS });
    }
    Ok(())
}

fn run(
    rv: &RuleVector,
    s: &Configuration,
    d: &Configuration,
    opts: DecideOptions,
    mut trace: Option<&mut Vec<LevelTrace>>,
) -> Result<Decision> {
    validate(rv, s, d)?;
    let n = rv.len();
    let anchors = Anchors::new(s.clone(), d.clone());
    // A zero-step witness makes S = D reachable even when D has no predecessor.
    let trivially_equal = s == d && opts.min_steps_required == MinSteps::Zero;

    let mut count: u64 = 1;
    let mut explored: u64 = 0;
    let mut level = tree::build_root(rv, Some(&anchors))?;

    for i in 0..n {
        if i > 0 {
            level = tree::expand_level(&level, rv.rule(i), Some(&anchors))?;
        }
        let stop = |reason, explored| Decision {
            outcome: Outcome::NotReachable { reason, at_level: i },
            explored_edges: explored,
        };

        if opts.shortcuts_enabled {
            let verdict = if check_condition1(&level) && !trivially_equal {
                Some(Reason::Condition1)
            } else if check_condition2(&level) {
                Some(Reason::Condition2)
            } else {
                None
            };
            if let Some(reason) = verdict {
                if let Some(t) = trace.as_deref_mut() {
                    t.push(LevelTrace { level, search: None, kept: None });
                }
                return Ok(stop(reason, explored));
            }
        }

        let is_last = i + 1 == n;
        let reflexive = !(is_last && opts.min_steps_required == MinSteps::One);
        let search = tree::path_search(&level, reflexive);
        if !search.exists {
            if let Some(t) = trace.as_deref_mut() {
                t.push(LevelTrace { level, search: Some(search), kept: None });
            }
            return Ok(stop(Reason::NoPath, explored));
        }

        if opts.count_edges {
            explored += 2 * count;
        }
        let kept = match (opts.prune_enabled, trace.is_some()) {
            (true, true) => tree::prune(&level, &search.survivors),
            (true, false) => tree::prune_owned(std::mem::take(&mut level), &search.survivors),
            (false, true) => level.clone(),
            (false, false) => std::mem::take(&mut level),
        };
        count = kept.len() as u64;

        if is_last {
            let min_steps = search.min_length.expect("search found a walk");
            if let Some(t) = trace.as_deref_mut() {
                t.push(LevelTrace { level, search: Some(search), kept: Some(kept) });
            }
            return Ok(Decision {
                outcome: Outcome::Reachable { min_steps },
                explored_edges: explored,
            });
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(LevelTrace { level, search: Some(search), kept: Some(kept.clone()) });
        }
        level = kept;
    }
    unreachable!("the last level always returns")
}

/// Decides whether `d` is reachable from `s` under the automaton `rv`.
pub fn decide(
    rv: &RuleVector,
    s: &Configuration,
    d: &Configuration,
    opts: DecideOptions,
) -> Result<Decision> {
    run(rv, s, d, opts, None)
}

/// Like [`decide`], also returning every level built along the way.
pub fn decide_traced(
    rv: &RuleVector,
    s: &Configuration,
    d: &Configuration,
    opts: DecideOptions,
) -> Result<DecisionTrace> {
    let mut levels = Vec::new();
    let decision = run(rv, s, d, opts, Some(&mut levels))?;
    Ok(DecisionTrace { decision, levels })
}

/// Fewest steps taking `s` to `d`, if any (zero-step witness allowed).
pub fn min_steps(rv: &RuleVector, s: &Configuration, d: &Configuration) -> Result<Option<u64>> {
    Ok(decide(rv, s, d, DecideOptions::default())?.outcome.min_steps())
}
