use std::collections::btree_set;
use std::collections::BTreeSet;
use std::fmt;

use super::value::Value;

/// A finite set of values, iterated in sorted order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domain {
    values: BTreeSet<Value>,
}

impl Domain {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The integer interval `[lo..hi]`, inclusive. Empty when `lo > hi`.
    pub fn range(lo: i64, hi: i64) -> Self {
        (lo..=hi).map(Value::Int).collect()
    }

    pub fn symbols(names: &[&str]) -> Self {
        names.iter().map(|n| Value::sym(n)).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.values.len() == 1
    }

    /// The only element of a singleton domain.
    pub fn single(&self) -> Option<&Value> {
        if self.is_singleton() {
            self.values.first()
        } else {
            None
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.values.contains(v)
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Value> {
        self.values.iter()
    }

    pub fn first(&self) -> Option<&Value> {
        self.values.first()
    }

    pub fn last(&self) -> Option<&Value> {
        self.values.last()
    }

    pub fn insert(&mut self, v: Value) -> bool {
        self.values.insert(v)
    }

    pub fn remove(&mut self, v: &Value) -> bool {
        self.values.remove(v)
    }

    pub fn retain(&mut self, f: impl FnMut(&Value) -> bool) {
        self.values.retain(f)
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.values.is_subset(&other.values)
    }

    pub fn intersection(&self, other: &Domain) -> Domain {
        self.values.intersection(&other.values).cloned().collect()
    }

    pub fn union(&self, other: &Domain) -> Domain {
        self.values.union(&other.values).cloned().collect()
    }

    pub fn difference(&self, other: &Domain) -> Domain {
        self.values.difference(&other.values).cloned().collect()
    }

    /// True when every element is an integer.
    pub fn is_integral(&self) -> bool {
        self.values.iter().all(Value::is_int)
    }

    /// Splits at the median into a lower and an upper half. The lower half
    /// gets the extra element of an odd-sized domain.
    pub fn bisect(&self) -> (Domain, Domain) {
        let cut = self.len().div_ceil(2);
        let lower = self.values.iter().take(cut).cloned().collect();
        let upper = self.values.iter().skip(cut).cloned().collect();
        (lower, upper)
    }

    /// Display form that writes runs of consecutive integers as `[lo..hi]`.
    pub fn compact(&self) -> CompactDomain<'_> {
        CompactDomain(self)
    }

    /// All subsets, smallest first. Only meant for tiny universes.
    pub fn subsets(&self) -> Vec<Domain> {
        let items: Vec<&Value> = self.values.iter().collect();
        assert!(items.len() < 20, "subset enumeration over {} values", items.len());
        let mut out: Vec<Domain> = (0u32..(1 << items.len()))
            .map(|mask| {
                items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, v)| (*v).clone())
                    .collect()
            })
            .collect();
        out.sort_by_key(Domain::len);
        out
    }
}

impl FromIterator<Value> for Domain {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        Domain {
            values: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Domain {
    type Item = &'a Value;
    type IntoIter = btree_set::Iter<'a, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.values.iter()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

pub struct CompactDomain<'a>(&'a Domain);

impl fmt::Display for CompactDomain<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.0;
        if d.len() >= 2 && d.is_integral() {
            let lo = d.first().and_then(Value::as_int).unwrap_or_default();
            let hi = d.last().and_then(Value::as_int).unwrap_or_default();
            if (hi - lo) as usize + 1 == d.len() {
                return write!(f, "[{lo}..{hi}]");
            }
        }
        write!(f, "{d}")
    }
}

/// One domain per CSP variable, positionally.
///
/// Ordered by reverse inclusion: `d ⊑ e` iff every `e[i] ⊆ d[i]`, so moving
/// up the ordering means domains shrink. The initial domains are the bottom.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainTuple {
    domains: Vec<Domain>,
}

impl DomainTuple {
    pub fn new(domains: Vec<Domain>) -> Self {
        DomainTuple { domains }
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn get(&self, i: usize) -> &Domain {
        &self.domains[i]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut Domain {
        &mut self.domains[i]
    }

    pub fn set(&mut self, i: usize, d: Domain) {
        self.domains[i] = d;
    }

    pub fn as_slice(&self) -> &[Domain] {
        &self.domains
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Domain> {
        self.domains.iter()
    }

    pub fn into_inner(self) -> Vec<Domain> {
        self.domains
    }

    /// The sub-tuple `d[s]` for a sequence of indices.
    pub fn project(&self, indices: &[usize]) -> Vec<Domain> {
        indices.iter().map(|&i| self.domains[i].clone()).collect()
    }

    /// `self ⊑ other`: every component of `other` is a subset of ours.
    pub fn precedes(&self, other: &DomainTuple) -> bool {
        self.len() == other.len()
            && self
                .domains
                .iter()
                .zip(&other.domains)
                .all(|(mine, theirs)| theirs.is_subset(mine))
    }

    pub fn has_empty(&self) -> bool {
        self.domains.iter().any(Domain::is_empty)
    }

    pub fn all_singletons(&self) -> bool {
        self.domains.iter().all(Domain::is_singleton)
    }

    /// Collapses every failed tuple (some empty component) to the all-empty
    /// tuple. All failed states have the same (empty) solution set.
    pub fn failure_normalized(&self) -> DomainTuple {
        if self.has_empty() {
            DomainTuple::new(vec![Domain::empty(); self.len()])
        } else {
            self.clone()
        }
    }

    /// Product of domain sizes, saturating.
    pub fn search_space(&self) -> u128 {
        self.domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    /// Componentwise union.
    pub fn join(&self, other: &DomainTuple) -> DomainTuple {
        DomainTuple::new(
            self.domains
                .iter()
                .zip(&other.domains)
                .map(|(a, b)| a.union(b))
                .collect(),
        )
    }
}

impl From<Vec<Domain>> for DomainTuple {
    fn from(domains: Vec<Domain>) -> Self {
        DomainTuple::new(domains)
    }
}

impl fmt::Display for DomainTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, d) in self.domains.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

/// Calls `visit` with every tuple of the product of `domains`, stopping
/// early when it returns `true`. Returns whether it stopped early.
///
/// The empty product has exactly one element, the empty tuple.
pub fn any_in_product(domains: &[&Domain], mut visit: impl FnMut(&[Value]) -> bool) -> bool {
    if domains.iter().any(|d| d.is_empty()) {
        return false;
    }
    let pools: Vec<Vec<&Value>> = domains.iter().map(|d| d.iter().collect()).collect();
    let mut cursor = vec![0usize; pools.len()];
    let mut current: Vec<Value> = pools.iter().map(|p| p[0].clone()).collect();
    loop {
        if visit(&current) {
            return true;
        }
        let mut pos = pools.len();
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < pools[pos].len() {
                current[pos] = pools[pos][cursor[pos]].clone();
                break;
            }
            cursor[pos] = 0;
            current[pos] = pools[pos][0].clone();
        }
    }
}
