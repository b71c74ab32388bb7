use alloc::vec::Vec;
use core::cmp::Ordering;

/// A candidate symbol vector (point indices) with its MSE.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub symbols: Vec<u8>,
    pub metric: f64,
}

/// Ascending metric, then lexicographic symbol order.
fn rank(metric_a: f64, sym_a: &[u8], metric_b: f64, sym_b: &[u8]) -> Ordering {
    metric_a.total_cmp(&metric_b).then_with(|| sym_a.cmp(sym_b))
}

/// Bounded list of distinct candidates kept sorted by metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateList {
    entries: Vec<Candidate>,
    capacity: usize,
}

impl CandidateList {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "list capacity must be positive");
        Self {
            entries: Vec::new(),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn head(&self) -> Option<&Candidate> {
        self.entries.first()
    }

    pub fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Candidate> {
        self.entries.iter()
    }

    pub fn contains(&self, symbols: &[u8]) -> bool {
        // Vectors are a handful of bytes; an inline loop beats a memcmp call.
        self.entries
            .iter()
            .any(|c| c.symbols.len() == symbols.len() && c.symbols.iter().zip(symbols).all(|(a, b)| a == b))
    }

    /// Inserts `symbols` unless it is already present or ranks below a full
    /// list. Returns whether the list changed.
    pub fn insert(&mut self, symbols: &[u8], metric: f64) -> bool {
        if self.entries.len() == self.capacity {
            let last = &self.entries[self.entries.len() - 1];
            if rank(metric, symbols, last.metric, &last.symbols) != Ordering::Less {
                return false;
            }
        }
        if self.contains(symbols) {
            return false;
        }
        let pos = self
            .entries
            .partition_point(|c| rank(c.metric, &c.symbols, metric, symbols) == Ordering::Less);
        self.entries.insert(
            pos,
            Candidate {
                symbols: symbols.to_vec(),
                metric,
            },
        );
        self.entries.truncate(self.capacity);
        true
    }

    /// Re-establishes the ordering after metrics or symbols were changed in
    /// place, dropping duplicates and anything beyond capacity.
    pub(crate) fn normalize(&mut self) {
        self.entries.sort_by(|a, b| a.symbols.cmp(&b.symbols));
        self.entries.dedup_by(|a, b| a.symbols == b.symbols);
        self.entries
            .sort_by(|a, b| rank(a.metric, &a.symbols, b.metric, &b.symbols));
        self.entries.truncate(self.capacity);
    }

    /// Appends without ordering; [`Self::normalize`] must follow.
    pub(crate) fn push_unchecked(&mut self, symbols: &[u8], metric: f64) {
        self.entries.push(Candidate {
            symbols: symbols.to_vec(),
            metric,
        });
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Candidate] {
        &mut self.entries
    }

    pub(crate) fn set_capacity(&mut self, capacity: usize) {
        self.capacity = capacity;
        self.entries.truncate(capacity);
    }

    /// Sorted, duplicate free and within capacity.
    pub fn is_well_formed(&self) -> bool {
        self.entries.len() <= self.capacity
            && self
                .entries
                .windows(2)
                .all(|w| rank(w[0].metric, &w[0].symbols, w[1].metric, &w[1].symbols) == Ordering::Less)
            && self
                .entries
                .iter()
                .enumerate()
                .all(|(i, a)| self.entries[i + 1..].iter().all(|b| b.symbols != a.symbols))
    }
}
