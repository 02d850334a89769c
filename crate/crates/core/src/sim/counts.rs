use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Format a classical register value as a bitstring, clbit 0 rightmost.
pub fn format_bits(value: u64, n_clbits: usize) -> String {
    if n_clbits == 0 {
        return String::new();
    }
    format!("{value:0n_clbits$b}")
}

pub fn parse_bits(s: &str) -> Result<u64> {
    if s.len() > 64 || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Config(format!("invalid bitstring {s:?}")));
    }
    Ok(s.bytes()
        .fold(0u64, |acc, b| (acc << 1) | (b - b'0') as u64))
}

fn check_keep(keep: &[usize], n_clbits: usize) -> Result<()> {
    for (i, &k) in keep.iter().enumerate() {
        if k >= n_clbits {
            return Err(Error::ClbitOutOfRange { index: k, n_clbits });
        }
        if keep[..i].contains(&k) {
            return Err(Error::DuplicateBit(k));
        }
    }
    Ok(())
}

/// Project `value` onto the kept bits; `keep[i]` becomes bit `i`.
fn project(value: u64, keep: &[usize]) -> u64 {
    keep.iter()
        .enumerate()
        .fold(0, |acc, (i, &k)| acc | (((value >> k) & 1) << i))
}

/// Measurement outcome frequencies keyed by classical register value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Counts {
    n_clbits: usize,
    map: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn new(n_clbits: usize) -> Self {
        Self {
            n_clbits,
            map: BTreeMap::new(),
        }
    }

    /// Build from `(bitstring, count)` pairs; all strings must share one
    /// length.
    pub fn from_bitstrings<'a>(entries: impl IntoIterator<Item = (&'a str, u64)>) -> Result<Self> {
        let mut n = None;
        let mut out = Counts::new(0);
        for (s, c) in entries {
            match n {
                None => n = Some(s.len()),
                Some(len) if len != s.len() => {
                    return Err(Error::Config(format!(
                        "bitstring {s:?} has length {} not {len}",
                        s.len()
                    )))
                }
                _ => {}
            }
            out.n_clbits = s.len();
            *out.map.entry(parse_bits(s)?).or_default() += c;
        }
        Ok(out)
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn add(&mut self, value: u64, count: u64) {
        *self.map.entry(value).or_default() += count;
    }

    pub fn get(&self, value: u64) -> u64 {
        self.map.get(&value).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.map.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> u64 {
        self.map.values().sum()
    }

    /// `(bitstring, count)` pairs in ascending register order.
    pub fn to_bitstrings(&self) -> Vec<(String, u64)> {
        self.iter()
            .map(|(k, v)| (format_bits(k, self.n_clbits), v))
            .collect()
    }

    /// Sum over discarded bits. `keep[i]` becomes bit `i` of the result.
    pub fn marginal(&self, keep: &[usize]) -> Result<Counts> {
        check_keep(keep, self.n_clbits)?;
        let mut out = Counts::new(keep.len());
        for (k, v) in self.iter() {
            out.add(project(k, keep), v);
        }
        Ok(out)
    }

    /// Relative frequency of `value` on classical bit `bit`.
    pub fn prob_of(&self, bit: usize, value: bool) -> Result<f64> {
        check_keep(&[bit], self.n_clbits)?;
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyCounts);
        }
        let hits: u64 = self
            .iter()
            .filter(|(k, _)| ((k >> bit) & 1 == 1) == value)
            .map(|(_, v)| v)
            .sum();
        Ok(hits as f64 / total as f64)
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .to_bitstrings()
            .into_iter()
            .map(|(k, v)| format!("\"{k}\": {v}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn marginal_counts(counts: &Counts, keep: &[usize]) -> Result<Counts> {
    counts.marginal(keep)
}

pub fn prob_of(counts: &Counts, bit: usize, value: bool) -> Result<f64> {
    counts.prob_of(bit, value)
}

/// Exact outcome distribution over classical register values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Distribution {
    n_clbits: usize,
    probs: BTreeMap<u64, f64>,
}

impl Distribution {
    pub(crate) fn new(n_clbits: usize) -> Self {
        Self {
            n_clbits,
            probs: BTreeMap::new(),
        }
    }

    pub(crate) fn add(&mut self, value: u64, p: f64) {
        *self.probs.entry(value).or_default() += p;
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn get(&self, value: u64) -> f64 {
        self.probs.get(&value).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn marginal(&self, keep: &[usize]) -> Result<Distribution> {
        check_keep(keep, self.n_clbits)?;
        let mut out = Distribution::new(keep.len());
        for (k, p) in self.iter() {
            out.add(project(k, keep), p);
        }
        Ok(out)
    }

    /// Marginal probability that classical bit `bit` reads `value`.
    pub fn prob_of(&self, bit: usize, value: bool) -> Result<f64> {
        check_keep(&[bit], self.n_clbits)?;
        Ok(self
            .iter()
            .filter(|(k, _)| ((k >> bit) & 1 == 1) == value)
            .map(|(_, p)| p)
            .sum())
    }
}
