//! Validation reports shared by every checker.

use std::fmt;

/// A violation that belongs to a named axiom or clause.
pub trait Clause: fmt::Display {
    fn clause(&self) -> &'static str;
}

/// The outcome of a checker: every violation found, in deterministic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report<V> {
    pub violations: Vec<V>,
}

impl<V> Default for Report<V> {
    fn default() -> Self {
        Report { violations: Vec::new() }
    }
}

impl<V> Report<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: V) {
        self.violations.push(v);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn map<W>(self, f: impl FnMut(V) -> W) -> Report<W> {
        Report { violations: self.violations.into_iter().map(f).collect() }
    }
}

impl<V: Clause> Report<V> {
    /// Violations of one clause.
    pub fn of(&self, clause: &str) -> impl Iterator<Item = &V> + '_ {
        let clause = clause.to_string();
        self.violations.iter().filter(move |v| v.clause() == clause)
    }

    pub fn passes(&self, clause: &str) -> bool {
        self.of(clause).next().is_none()
    }

    /// Pass/fail per clause, in the order given.
    pub fn summary<'a>(&self, clauses: &[&'a str]) -> Vec<(&'a str, bool)> {
        clauses.iter().map(|&c| (c, self.passes(c))).collect()
    }
}

impl<V: fmt::Display> fmt::Display for Report<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}
