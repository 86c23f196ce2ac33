use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use crate::parser::{empty_set, enumeration};
use crate::syntax::Term;

struct Node {
    elems: Vec<Hf>,
    hash: u64,
    rank: u32,
}

/// A hereditarily finite set in canonical form.
///
/// Elements are kept sorted by [`Ord`] (cardinality first, then
/// lexicographically) and free of duplicates, so structural equality is set
/// equality.
#[derive(Clone)]
pub struct Hf(Arc<Node>);

const SEED: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x0000_0100_0000_01b3).rotate_left(29) ^ SEED
}

impl Hf {
    pub fn empty() -> Hf {
        Hf::from_sorted(Vec::new())
    }

    fn from_sorted(elems: Vec<Hf>) -> Hf {
        let mut hash = SEED ^ elems.len() as u64;
        let mut rank = 0;
        for e in &elems {
            hash = mix(hash, e.0.hash);
            rank = rank.max(e.0.rank + 1);
        }
        Hf(Arc::new(Node { elems, hash, rank }))
    }

    /// The set of the given elements.
    pub fn set(elems: impl IntoIterator<Item = Hf>) -> Hf {
        let mut v: Vec<Hf> = elems.into_iter().collect();
        v.sort();
        v.dedup();
        Hf::from_sorted(v)
    }

    pub fn singleton(a: Hf) -> Hf {
        Hf::from_sorted(vec![a])
    }

    /// The Kuratowski pair `{{a}, {a, b}}`.
    pub fn pair(a: &Hf, b: &Hf) -> Hf {
        Hf::set([Hf::singleton(a.clone()), Hf::set([a.clone(), b.clone()])])
    }

    /// The von Neumann numeral `n`.
    pub fn nat(n: u64) -> Hf {
        let mut all: Vec<Hf> = Vec::with_capacity(n as usize);
        for _ in 0..n {
            // Numerals are ordered by cardinality, so `all` stays sorted.
            let next = Hf::from_sorted(all.clone());
            all.push(next);
        }
        Hf::from_sorted(all)
    }

    /// The set coded by the bits of `n`: `i`-th bit set iff `decode(i)` is an element.
    pub fn from_index(n: u128) -> Hf {
        let mut elems = Vec::new();
        let mut i = 0u128;
        let mut m = n;
        while m > 0 {
            if m & 1 == 1 {
                elems.push(Hf::from_index(i));
            }
            m >>= 1;
            i += 1;
        }
        Hf::set(elems)
    }

    pub fn elems(&self) -> &[Hf] {
        &self.0.elems
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    /// `0` for `∅`, otherwise one more than the largest element rank.
    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    pub fn contains(&self, x: &Hf) -> bool {
        self.0.elems.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &Hf) -> bool {
        self.len() <= other.len() && self.elems().iter().all(|e| other.contains(e))
    }

    pub fn union(&self, other: &Hf) -> Hf {
        Hf::set(self.elems().iter().chain(other.elems()).cloned())
    }

    pub fn intersection(&self, other: &Hf) -> Hf {
        Hf::from_sorted(self.elems().iter().filter(|e| other.contains(e)).cloned().collect())
    }

    pub fn difference(&self, other: &Hf) -> Hf {
        Hf::from_sorted(self.elems().iter().filter(|e| !other.contains(e)).cloned().collect())
    }

    /// `x ∪ {x}`.
    pub fn successor(&self) -> Hf {
        Hf::set(self.elems().iter().cloned().chain([self.clone()]))
    }

    /// All subsets, in canonical order.
    pub fn subsets(&self) -> Vec<Hf> {
        let n = self.len();
        assert!(n < 32, "powerset of a set with {n} elements");
        let mut out: Vec<Hf> = (0u64..1 << n)
            .map(|mask| {
                Hf::from_sorted(
                    self.elems()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, e)| e.clone())
                        .collect(),
                )
            })
            .collect();
        out.sort();
        out
    }

    /// The transitive closure `{self} ∪ ⋃ elements` as a sorted list.
    pub fn transitive_closure(&self) -> Vec<Hf> {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(x) = stack.pop() {
            if seen.insert(x.clone()) {
                stack.extend(x.elems().iter().cloned());
            }
        }
        seen.into_iter().collect()
    }

    /// A closed term denoting this set, built from `∅` and enumerations.
    pub fn to_term(&self) -> Term {
        if self.is_empty() {
            empty_set()
        } else {
            enumeration(&self.elems().iter().map(Hf::to_term).collect::<Vec<_>>())
        }
    }

    pub fn ptr_eq(&self, other: &Hf) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for Hf {
    fn eq(&self, other: &Hf) -> bool {
        self.ptr_eq(other)
            || (self.0.hash == other.0.hash
                && self.0.rank == other.0.rank
                && self.0.elems.len() == other.0.elems.len()
                && self.0.elems == other.0.elems)
    }
}

impl Eq for Hf {}

impl Hash for Hf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for Hf {
    fn cmp(&self, other: &Hf) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.elems.iter().cmp(other.0.elems.iter()))
    }
}

impl PartialOrd for Hf {
    fn partial_cmp(&self, other: &Hf) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Hf {
    fn default() -> Self {
        Hf::empty()
    }
}

/// Writes `{}` for the empty set and `{a, b}` otherwise.
impl fmt::Display for Hf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elems().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Hf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the [`Display`](fmt::Display) form; whitespace is ignored.
impl FromStr for Hf {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let v = parse_set(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(format!("trailing input at {pos}"));
        }
        Ok(v)
    }
}

fn parse_set(c: &[char], pos: &mut usize) -> Result<Hf, String> {
    if c.get(*pos) != Some(&'{') {
        return Err(format!("expected `{{` at {}", *pos));
    }
    *pos += 1;
    let mut elems = Vec::new();
    if c.get(*pos) == Some(&'}') {
        *pos += 1;
        return Ok(Hf::empty());
    }
    loop {
        elems.push(parse_set(c, pos)?);
        match c.get(*pos) {
            Some(',') => *pos += 1,
            Some('}') => {
                *pos += 1;
                return Ok(Hf::set(elems));
            }
            _ => return Err(format!("expected `,` or `}}` at {}", *pos)),
        }
    }
}
