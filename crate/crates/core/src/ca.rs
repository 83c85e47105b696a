//! Elementary non-uniform cellular automata under null boundary.
//!
//! A cell's neighborhood `(left, self, right)` is packed into an RMT
//! (rule min term) `4*left + 2*self + right`. A [`Rule`] is the Wolfram code
//! whose bit `r` is the next state for RMT `r`. Cells outside the lattice are
//! permanently 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A neighborhood pattern `4x + 2y + z`, always in `0..=7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rmt(u8);

impl Rmt {
    pub const ALL: [Rmt; 8] = [Rmt(0), Rmt(1), Rmt(2), Rmt(3), Rmt(4), Rmt(5), Rmt(6), Rmt(7)];

    pub fn new(value: u8) -> Result<Self> {
        if value > 7 {
            return Err(Error::RmtOutOfRange(value));
        }
        Ok(Rmt(value))
    }

    /// Builds an RMT from its three neighborhood bits.
    pub fn from_bits(left: u8, middle: u8, right: u8) -> Self {
        Rmt(((left & 1) << 2) | ((middle & 1) << 1) | (right & 1))
    }

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn left(self) -> u8 {
        self.0 >> 2
    }

    #[inline]
    pub fn middle(self) -> u8 {
        (self.0 >> 1) & 1
    }

    #[inline]
    pub fn right(self) -> u8 {
        self.0 & 1
    }

    /// The two RMTs that may follow this one in an RMT sequence:
    /// `(2r mod 8, 2r + 1 mod 8)`.
    #[inline]
    pub fn children(self) -> (Rmt, Rmt) {
        let base = (self.0 << 1) & 7;
        (Rmt(base), Rmt(base | 1))
    }

    /// Siblings share `r / 2`. The relation is only defined for distinct RMTs.
    pub fn is_sibling_of(self, other: Rmt) -> Result<bool> {
        if self == other {
            return Err(Error::SameRmt(self.0));
        }
        Ok(self.0 >> 1 == other.0 >> 1)
    }

    /// Equivalent RMTs satisfy `2r = 2s (mod 8)`, i.e. they have the same children.
    pub fn is_equivalent_to(self, other: Rmt) -> Result<bool> {
        if self == other {
            return Err(Error::SameRmt(self.0));
        }
        Ok((self.0 << 1) & 7 == (other.0 << 1) & 7)
    }
}

impl fmt::Display for Rmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An elementary rule in Wolfram's decimal convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule(u8);

impl Rule {
    #[inline]
    pub fn new(code: u8) -> Self {
        Rule(code)
    }

    /// Builds a rule from its next-state table indexed by RMT.
    pub fn from_table(table: [u8; 8]) -> Self {
        let code = table
            .iter()
            .enumerate()
            .fold(0u8, |acc, (r, &bit)| acc | ((bit & 1) << r));
        Rule(code)
    }

    #[inline]
    pub fn code(self) -> u8 {
        self.0
    }

    pub fn table(self) -> [u8; 8] {
        let mut table = [0u8; 8];
        for (r, slot) in table.iter_mut().enumerate() {
            *slot = (self.0 >> r) & 1;
        }
        table
    }

    /// Next state assigned to neighborhood `rmt`.
    #[inline]
    pub fn apply(self, rmt: Rmt) -> u8 {
        (self.0 >> rmt.0) & 1
    }

    /// True when the rule copies the middle bit of `rmt` forward.
    #[inline]
    pub fn is_self_replicating(self, rmt: Rmt) -> bool {
        self.apply(rmt) == rmt.middle()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::ParseRule(s.to_string()));
        }
        t.parse::<u8>()
            .map(Rule)
            .map_err(|_| Error::ParseRule(s.to_string()))
    }
}

/// The rules of an `n`-cell automaton; cell `i` follows `rules[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleVector(Vec<Rule>);

impl RuleVector {
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::EmptyRuleVector);
        }
        Ok(RuleVector(rules))
    }

    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        Self::new(codes.iter().copied().map(Rule).collect())
    }

    /// A uniform automaton: every cell follows `rule`.
    pub fn uniform(rule: Rule, n: usize) -> Result<Self> {
        Self::new(vec![rule; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn rule(&self, i: usize) -> Rule {
        self.0[i]
    }

    pub fn rules(&self) -> &[Rule] {
        &self.0
    }

    pub fn codes(&self) -> Vec<u8> {
        self.0.iter().map(|r| r.0).collect()
    }

    pub fn is_uniform(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    fn check_len(&self, c: &Configuration) -> Result<()> {
        if c.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: c.len(),
            });
        }
        Ok(())
    }

    /// One synchronous update of every cell.
    pub fn evolve(&self, c: &Configuration) -> Result<Configuration> {
        self.check_len(c)?;
        let bits = &c.0;
        let n = bits.len();
        let next = (0..n)
            .map(|i| {
                let left = if i > 0 { bits[i - 1] } else { 0 };
                let right = if i + 1 < n { bits[i + 1] } else { 0 };
                self.0[i].apply(Rmt::from_bits(left, bits[i], right))
            })
            .collect();
        Ok(Configuration(next))
    }

    /// `F^t(c)`; `t = 0` returns `c` unchanged.
    pub fn evolve_t(&self, c: &Configuration, t: u64) -> Result<Configuration> {
        self.check_len(c)?;
        let mut cur = c.clone();
        for _ in 0..t {
            cur = self.evolve(&cur)?;
        }
        Ok(cur)
    }

    /// Packed update for automata of at most 64 cells. Bit `n-1-i` of the
    /// word holds cell `i`, so the word's value equals
    /// [`Configuration::to_index`].
    pub fn evolve_packed(&self, x: u64) -> u64 {
        let n = self.len();
        debug_assert!(n <= 64);
        let mut y = 0u64;
        for (i, rule) in self.0.iter().enumerate() {
            let shift = n - 1 - i;
            // window (left, self, right) sits at bits shift+1, shift, shift-1
            let window = if shift == 0 {
                (x << 1) & 0b110
            } else {
                (x >> (shift - 1)) & 0b111
            };
            let window = if i == 0 { window & 0b011 } else { window };
            y |= (((rule.0 >> window) & 1) as u64) << shift;
        }
        y
    }
}

impl fmt::Display for RuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.0.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for RuleVector {
    type Err = Error;

    /// Parses comma-separated decimals, e.g. `9,170,195,80`.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Err(Error::EmptyRuleVector);
        }
        let rules = s.split(',').map(str::parse).collect::<Result<Vec<Rule>>>()?;
        Self::new(rules)
    }
}

/// A global state. Index 0 is the leftmost cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration(Vec<u8>);

impl Configuration {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::ParseConfiguration(format!("{bits:?}")));
        }
        Ok(Configuration(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Configuration(vec![0; n])
    }

    /// Decodes an integer whose most significant of `n` bits is cell 0.
    pub fn from_index(value: u128, n: usize) -> Self {
        assert!((1..=128).contains(&n), "configuration index supports 1..=128 cells");
        Configuration((0..n).map(|i| ((value >> (n - 1 - i)) & 1) as u8).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Integer value with cell 0 as the most significant bit.
    pub fn to_index(&self) -> u128 {
        assert!(self.len() <= 128, "configuration index supports at most 128 cells");
        self.0.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128)
    }

    /// Value of the prefix of cells `0..=level`, cell 0 most significant.
    pub fn prefix_value(&self, level: usize) -> u128 {
        self.0[..=level]
            .iter()
            .fold(0u128, |acc, &b| (acc << 1) | b as u128)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    /// Parses a binary string, leftmost character = cell 0.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::ParseConfiguration(s.to_string()));
        }
        t.bytes()
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::ParseConfiguration(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Configuration)
    }
}

/// The per-cell neighborhood view of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RmtSequence(Vec<Rmt>);

impl RmtSequence {
    pub fn rmts(&self) -> &[Rmt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks the adjacency and null-boundary constraints.
    pub fn is_well_formed(&self) -> bool {
        let n = self.0.len();
        if n == 0 {
            return false;
        }
        let adjacent = self.0.windows(2).all(|w| {
            let (a, b) = w[0].children();
            w[1] == a || w[1] == b
        });
        adjacent && self.0[0].left() == 0 && self.0[n - 1].right() == 0
    }

    /// Recovers the configuration whose RMT sequence this is.
    pub fn configuration(&self) -> Configuration {
        Configuration(self.0.iter().map(|r| r.middle()).collect())
    }
}

impl fmt::Display for RmtSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.0 {
            write!(f, "{}", r.0)?;
        }
        Ok(())
    }
}

pub fn rule_apply(rule: Rule, r: Rmt) -> u8 {
    rule.apply(r)
}

/// RMTs a cell can actually see under null boundary.
pub fn valid_rmts(i: usize, n: usize) -> Result<Vec<Rmt>> {
    if i >= n {
        return Err(Error::CellIndexOutOfRange { index: i, n });
    }
    Ok(Rmt::ALL
        .iter()
        .copied()
        .filter(|r| (i > 0 || r.left() == 0) && (i + 1 < n || r.right() == 0))
        .collect())
}

pub fn rmt_children(r: Rmt) -> (Rmt, Rmt) {
    r.children()
}

pub fn is_self_replicating(rule: Rule, r: Rmt) -> bool {
    rule.is_self_replicating(r)
}

pub fn are_sibling(r: Rmt, s: Rmt) -> Result<bool> {
    r.is_sibling_of(s)
}

pub fn are_equivalent(r: Rmt, s: Rmt) -> Result<bool> {
    r.is_equivalent_to(s)
}

pub fn rmt_sequence(c: &Configuration) -> Result<RmtSequence> {
    let n = c.len();
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    let bits = c.bits();
    Ok(RmtSequence(
        (0..n)
            .map(|i| {
                let left = if i > 0 { bits[i - 1] } else { 0 };
                let right = if i + 1 < n { bits[i + 1] } else { 0 };
                Rmt::from_bits(left, bits[i], right)
            })
            .collect(),
    ))
}

pub fn evolve(rv: &RuleVector, c: &Configuration) -> Result<Configuration> {
    rv.evolve(c)
}

pub fn evolve_t(rv: &RuleVector, c: &Configuration, t: u64) -> Result<Configuration> {
    rv.evolve_t(c, t)
}

/// Whether a zero-step witness counts as reachability (`D = F^0(S) = S`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MinSteps {
    /// `t >= 0`: every configuration reaches itself.
    #[default]
    Zero,
    /// `t >= 1`: `S = D` needs `S` to lie on a cycle.
    One,
}

impl MinSteps {
    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(MinSteps::Zero),
            1 => Ok(MinSteps::One),
            _ => Err(Error::InvalidParams(format!("min steps must be 0 or 1, got {v}"))),
        }
    }

    pub fn as_u64(self) -> u64 {
        match self {
            MinSteps::Zero => 0,
            MinSteps::One => 1,
        }
    }
}
