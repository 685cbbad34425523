use std::fmt;

/// A dictionary key. The structures in this crate store dense integer key
/// spaces `1..=n`, but `Key` itself is just a totally ordered integer.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Key(pub u64);

impl Key {
    pub fn new(value: u64) -> Self {
        Key(value)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl From<u64> for Key {
    fn from(value: u64) -> Self {
        Key(value)
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
