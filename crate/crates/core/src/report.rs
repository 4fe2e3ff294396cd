//! Bound reports: ordered named terms, their sum, an optional oracle value
//! and scenario metadata.

use std::collections::BTreeMap;

use serde::Serialize;

/// One additive term of a bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub stage: String,
    pub label: String,
    pub value: f64,
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub terms: Vec<Term>,
    pub total: f64,
    pub oracle: Option<f64>,
    pub meta: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>) -> Self {
        BoundReport {
            name: name.into(),
            terms: Vec::new(),
            total: 0.0,
            oracle: None,
            meta: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn term(mut self, stage: &str, label: &str, value: f64, anchor: &str) -> Self {
        self.terms.push(Term {
            stage: stage.into(),
            label: label.into(),
            value,
            anchor: anchor.into(),
        });
        self.total = self.terms.iter().map(|t| t.value).sum();
        self
    }

    pub fn meta(mut self, key: &str, value: f64) -> Self {
        self.meta.insert(key.into(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn with_oracle(mut self, value: f64) -> Self {
        self.oracle = Some(value);
        self
    }

    pub fn value_of(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.label == label).map(|t| t.value)
    }

    /// `oracle <= total`, or `None` without an oracle.
    pub fn holds(&self) -> Option<bool> {
        self.oracle.map(|o| o <= self.total)
    }

    /// `total - oracle` when an oracle is present.
    pub fn margin(&self) -> Option<f64> {
        self.oracle.map(|o| self.total - o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_tracks_terms() {
        let r = BoundReport::new("x").term("a", "p", 0.25, "x/p").term("a", "q", 0.5, "x/q");
        assert_eq!(r.total, 0.75);
        assert_eq!(r.holds(), None);
        let r = r.with_oracle(0.8);
        assert_eq!(r.holds(), Some(false));
        assert_eq!(r.value_of("q"), Some(0.5));
    }
}
