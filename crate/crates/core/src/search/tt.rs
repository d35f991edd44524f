use crate::board::Move;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Exact,
    /// The true value is at least the stored value.
    Lower,
    /// The true value is at most the stored value.
    Upper,
}

#[derive(Debug, Clone, Copy)]
pub struct Entry {
    pub key: u64,
    pub depth: u8,
    /// Check extensions already spent on the path; part of the node's state
    /// because it bounds further extensions below.
    pub extensions: u8,
    pub age: u8,
    pub bound: Bound,
    pub value: f64,
    pub best_move: Option<Move>,
}

/// Fixed-capacity hash table of searched nodes.
///
/// Probes only hit on an exact (key, depth, extensions) match, so a hit
/// reproduces what a fresh search of that node would have returned.
/// Replacement is depth-preferred, except that entries from an older
/// search generation are always overwritten.
pub struct TranspositionTable {
    slots: Vec<Option<Entry>>,
    age: u8,
}

impl TranspositionTable {
    pub fn new(capacity: usize) -> Self {
        TranspositionTable { slots: vec![None; capacity.max(1)], age: 0 }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = None);
        self.age = 0;
    }

    /// Starts a new generation; existing entries stay valid but become
    /// preferred victims.
    pub fn new_generation(&mut self) {
        self.age = self.age.wrapping_add(1);
    }

    #[inline]
    fn slot(&self, key: u64) -> usize {
        (key % self.slots.len() as u64) as usize
    }

    pub fn probe(&self, key: u64, depth: u8, extensions: u8) -> Option<&Entry> {
        self.slots[self.slot(key)]
            .as_ref()
            .filter(|e| e.key == key && e.depth == depth && e.extensions == extensions)
    }

    pub fn store(&mut self, entry: Entry) {
        let age = self.age;
        let i = self.slot(entry.key);
        let replace = match &self.slots[i] {
            None => true,
            Some(old) => old.key == entry.key || old.age != age || entry.depth >= old.depth,
        };
        if replace {
            self.slots[i] = Some(Entry { age, ..entry });
        }
    }

    pub fn occupancy(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }
}
