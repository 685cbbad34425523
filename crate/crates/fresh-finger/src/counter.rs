use std::cell::Cell;

/// Counts two-way key comparisons performed by a structure.
///
/// Every key-to-key comparison made by a tree or baseline operation bumps the
/// counter exactly once; pointer chasing and balance bookkeeping are free.
/// The counter only ever moves forward, so the cost of an individual call is
/// the difference between two readings.
#[derive(Debug, Default)]
pub struct ComparisonCounter {
    count: Cell<u64>,
}

impl ComparisonCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn bump(&self) {
        self.count.set(self.count.get() + 1);
    }

    #[inline]
    pub fn count(&self) -> u64 {
        self.count.get()
    }

    /// Comparisons performed since an earlier reading.
    #[inline]
    pub fn since(&self, earlier: u64) -> u64 {
        self.count.get() - earlier
    }
}
