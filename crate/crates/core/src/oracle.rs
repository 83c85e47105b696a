//! Brute-force ground truth: orbit iteration and the full state transition graph.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::ca::{Configuration, MinSteps, RuleVector};
use crate::error::{Error, Result};

/// Default cap on the cell count for whole-graph operations.
pub const DEFAULT_STG_CAP: usize = 20;

/// The forward orbit of a configuration up to its first repeated state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub states: Vec<Configuration>,
    /// Index in `states` where the cycle closes (the state `F` maps the last one to).
    pub tail_index: usize,
}

impl Trajectory {
    pub fn cycle_len(&self) -> usize {
        self.states.len() - self.tail_index
    }
}

pub fn trajectory(rv: &RuleVector, s: &Configuration) -> Result<Trajectory> {
    let mut seen: HashMap<Configuration, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut cur = s.clone();
    rv.evolve(&cur)?;
    loop {
        if let Some(&tail_index) = seen.get(&cur) {
            return Ok(Trajectory { states, tail_index });
        }
        seen.insert(cur.clone(), states.len());
        let next = rv.evolve(&cur)?;
        states.push(cur);
        cur = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleVerdict {
    pub reachable: bool,
    pub min_t: Option<u64>,
}

/// Iterates `F` from `s` until a state repeats and reports the first time
/// `d` shows up at or after `min_steps`.
pub fn oracle_decide(
    rv: &RuleVector,
    s: &Configuration,
    d: &Configuration,
    min_steps: MinSteps,
) -> Result<OracleVerdict> {
    if d.len() != rv.len() {
        return Err(Error::LengthMismatch { expected: rv.len(), found: d.len() });
    }
    let traj = trajectory(rv, s)?;
    let floor = min_steps.as_u64() as usize;
    let hit = match traj.states.iter().position(|c| c == d) {
        Some(p) if p >= floor => Some(p),
        // d == s with t >= 1: d recurs only if s lies on the cycle
        Some(0) if traj.tail_index == 0 => Some(traj.states.len()),
        _ => None,
    };
    Ok(OracleVerdict { reachable: hit.is_some(), min_t: hit.map(|p| p as u64) })
}

/// Successor of every `n`-bit configuration, indexed by
/// [`Configuration::to_index`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stg {
    n: usize,
    successor: Vec<u64>,
}

impl Stg {
    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.successor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successor.is_empty()
    }

    #[inline]
    pub fn successor(&self, x: u64) -> u64 {
        self.successor[x as usize]
    }

    pub fn successors(&self) -> &[u64] {
        &self.successor
    }

    /// Image of `F` as packed indices, sorted.
    pub fn image(&self) -> BTreeSet<u64> {
        self.successor.iter().copied().collect()
    }

    pub fn predecessors_of(&self, y: u64) -> Vec<u64> {
        (0..self.successor.len() as u64)
            .filter(|&x| self.successor[x as usize] == y)
            .collect()
    }

    /// First-occurrence step of every state in the orbit of `s`, as a dense
    /// table (`u32::MAX` where the state never appears).
    pub fn first_hits(&self, s: u64) -> Vec<u32> {
        let mut hit = vec![u32::MAX; self.successor.len()];
        let mut cur = s;
        let mut t = 0u32;
        while hit[cur as usize] == u32::MAX {
            hit[cur as usize] = t;
            cur = self.successor[cur as usize];
            t += 1;
        }
        hit
    }

    /// Graphviz rendering with one arc per state, nodes named by bit string.
    pub fn to_dot(&self) -> String {
        let name = |x: u64| Configuration::from_index(x as u128, self.n).to_string();
        let mut out = String::from("digraph stg {\n");
        for (x, &y) in self.successor.iter().enumerate() {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", name(x as u64), name(y));
        }
        out.push_str("}\n");
        out
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n > 63 {
        return Err(Error::SizeCapExceeded { n, cap: cap.min(63) });
    }
    Ok(())
}

pub fn build_stg(rv: &RuleVector, cap: usize) -> Result<Stg> {
    let n = rv.len();
    check_cap(n, cap)?;
    let successor = (0..1u64 << n).map(|x| rv.evolve_packed(x)).collect();
    Ok(Stg { n, successor })
}

/// Image of `F`: every configuration with at least one predecessor.
pub fn reachable_states(rv: &RuleVector, cap: usize) -> Result<BTreeSet<Configuration>> {
    let stg = build_stg(rv, cap)?;
    Ok(stg
        .image()
        .into_iter()
        .map(|x| Configuration::from_index(x as u128, stg.n))
        .collect())
}

pub fn predecessors(rv: &RuleVector, c: &Configuration, cap: usize) -> Result<BTreeSet<Configuration>> {
    if c.len() != rv.len() {
        return Err(Error::LengthMismatch { expected: rv.len(), found: c.len() });
    }
    let stg = build_stg(rv, cap)?;
    Ok(stg
        .predecessors_of(c.to_index() as u64)
        .into_iter()
        .map(|x| Configuration::from_index(x as u128, stg.n))
        .collect())
}

pub fn is_reachable_state(rv: &RuleVector, c: &Configuration, cap: usize) -> Result<bool> {
    Ok(!predecessors(rv, c, cap)?.is_empty())
}
