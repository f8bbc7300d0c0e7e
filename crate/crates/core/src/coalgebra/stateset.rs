use std::fmt;

/// A subset of a finite state space `{0, .., n-1}` with `n <= 64`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(pub u64);

pub const MAX_STATES: usize = 64;

impl StateSet {
    pub const fn empty() -> Self {
        StateSet(0)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            StateSet(u64::MAX)
        } else {
            StateSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(s: usize) -> Self {
        StateSet(1 << s)
    }

    pub fn from_states(states: impl IntoIterator<Item = usize>) -> Self {
        states.into_iter().fold(StateSet(0), |acc, s| acc.with(s))
    }

    pub fn with(self, s: usize) -> Self {
        StateSet(self.0 | (1 << s))
    }

    pub fn without(self, s: usize) -> Self {
        StateSet(self.0 & !(1 << s))
    }

    pub fn contains(self, s: usize) -> bool {
        s < 64 && self.0 & (1 << s) != 0
    }

    pub fn union(self, o: StateSet) -> Self {
        StateSet(self.0 | o.0)
    }

    pub fn inter(self, o: StateSet) -> Self {
        StateSet(self.0 & o.0)
    }

    pub fn minus(self, o: StateSet) -> Self {
        StateSet(self.0 & !o.0)
    }

    pub fn complement(self, n: usize) -> Self {
        StateSet(!self.0 & StateSet::full(n).0)
    }

    pub fn is_subset(self, o: StateSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let s = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(s)
            }
        })
    }

    /// `{x | f(x) in self}` for `f` given as a table over `0..f.len()`.
    pub fn preimage(self, f: &[usize]) -> Self {
        StateSet::from_states((0..f.len()).filter(|&x| self.contains(f[x])))
    }

    /// `{f(x) | x in self}`.
    pub fn image(self, f: &[usize]) -> Self {
        StateSet::from_states(self.iter().map(|x| f[x]))
    }

    /// All subsets of `{0, .., n-1}` in increasing bitmask order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = StateSet> {
        assert!(n < 64, "too many states to enumerate subsets");
        (0..1u64 << n).map(StateSet)
    }

    /// All subsets of `self`.
    pub fn subsets(self) -> impl Iterator<Item = StateSet> {
        let full = self.0;
        let mut cur = Some(0u64);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some(((c | !full).wrapping_add(1)) & full) };
            Some(StateSet(c))
        })
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
