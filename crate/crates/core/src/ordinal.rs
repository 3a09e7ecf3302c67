//! Finite families of nonempty finite sets of naturals and their rank.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type FinSet = BTreeSet<u32>;

/// A finite family `M ⊆ Fin ℕ`. Serialized as an array of arrays.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct FinFamily {
    members: BTreeSet<FinSet>,
}

impl TryFrom<Vec<Vec<u32>>> for FinFamily {
    type Error = Error;

    fn try_from(v: Vec<Vec<u32>>) -> Result<Self> {
        FinFamily::new(v.into_iter().map(|m| m.into_iter().collect()))
    }
}

impl From<FinFamily> for Vec<Vec<u32>> {
    fn from(f: FinFamily) -> Self {
        f.members.into_iter().map(|m| m.into_iter().collect()).collect()
    }
}

impl FinFamily {
    /// Rejects empty members; duplicates collapse.
    pub fn new(members: impl IntoIterator<Item = FinSet>) -> Result<Self> {
        let members: BTreeSet<FinSet> = members.into_iter().collect();
        if members.iter().any(BTreeSet::is_empty) {
            return Err(Error::InvalidParameter("Fin N members are nonempty".into()));
        }
        Ok(FinFamily { members })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_slices(members: &[&[u32]]) -> Result<Self> {
        Self::new(members.iter().map(|m| m.iter().copied().collect()))
    }

    pub fn members(&self) -> &BTreeSet<FinSet> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: &FinSet) -> bool {
        self.members.contains(s)
    }

    /// Union of the members.
    pub fn support(&self) -> FinSet {
        self.members.iter().flatten().copied().collect()
    }

    pub fn max_member_size(&self) -> usize {
        self.members.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn is_subfamily_of(&self, other: &FinFamily) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// `M^σ = { τ ≠ ∅ : τ ∪ σ ∈ M, τ ∩ σ = ∅ }`.
pub fn derived_family(m: &FinFamily, sigma: &FinSet) -> FinFamily {
    let members = m
        .members
        .iter()
        .filter(|s| sigma.is_subset(s))
        .map(|s| s.difference(sigma).copied().collect::<FinSet>())
        .filter(|t| !t.is_empty())
        .collect();
    FinFamily { members }
}

/// `Ord M`: 0 for the empty family, otherwise `1 + max_a Ord M^{a}` over the
/// support.
pub fn ord_rank(m: &FinFamily) -> u32 {
    fn go(m: &FinFamily, memo: &mut HashMap<FinFamily, u32>) -> u32 {
        if m.is_empty() {
            return 0;
        }
        if let Some(&r) = memo.get(m) {
            return r;
        }
        let best = m
            .support()
            .into_iter()
            .map(|a| go(&derived_family(m, &FinSet::from([a])), memo))
            .max()
            .unwrap_or(0);
        memo.insert(m.clone(), best + 1);
        best + 1
    }
    go(m, &mut HashMap::new())
}

/// Adds every nonempty subset of every member.
pub fn inclusive_closure(m: &FinFamily) -> FinFamily {
    let mut members = BTreeSet::new();
    for s in &m.members {
        let v: Vec<u32> = s.iter().copied().collect();
        for mask in 1u64..(1u64 << v.len()) {
            members.insert(
                v.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect(),
            );
        }
    }
    FinFamily { members }
}

/// Whether every nonempty subset of a member is a member.
pub fn is_inclusive(m: &FinFamily) -> bool {
    // closing under removal of single elements suffices
    m.members.iter().all(|s| {
        s.len() == 1
            || s.iter().all(|x| {
                let mut t = s.clone();
                t.remove(x);
                m.members.contains(&t)
            })
    })
}

/// A random family with members drawn from `0..support`, each of size
/// `1..=max_member`, with at most `count` members.
pub fn random_family(rng: &mut impl Rng, support: u32, max_member: usize, count: usize) -> FinFamily {
    let mut members = BTreeSet::new();
    for _ in 0..count {
        let size = rng.random_range(1..=max_member.min(support as usize).max(1));
        let mut s = FinSet::new();
        while s.len() < size {
            s.insert(rng.random_range(0..support.max(1)));
        }
        members.insert(s);
    }
    FinFamily { members }
}
