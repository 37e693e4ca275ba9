//! Set partitions of `[n]` and the combinatorics of the partition lattice.
//!
//! A [`SetPartition`] is stored as a restricted-growth string: item 0 has
//! label 0 and every later label is at most one more than the largest label
//! before it. Two label vectors describe the same clustering iff their
//! restricted-growth strings are equal, so `Eq` and `Hash` on
//! [`SetPartition`] are equality of clusterings.
//!
//! Entropies and distances are in bits.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` that [`enumerate_partitions`] accepts unless told otherwise.
pub const DEFAULT_ENUMERATION_CAP: usize = 13;

/// Absolute tolerance under which two distances fall in the same bin.
pub const DISTANCE_TOLERANCE: f64 = 1e-9;

/// A clustering of `n` items in canonical restricted-growth form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct SetPartition {
    labels: Vec<u32>,
    k: usize,
}

impl SetPartition {
    /// Relabels arbitrary cluster labels by order of first occurrence.
    pub fn canonicalize<T: Eq + Hash>(raw: &[T]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyLabels);
        }
        let mut map: HashMap<&T, u32> = HashMap::with_capacity(raw.len());
        let mut labels = Vec::with_capacity(raw.len());
        for key in raw {
            let next = map.len() as u32;
            labels.push(*map.entry(key).or_insert(next));
        }
        let k = map.len();
        Ok(Self { labels, k })
    }

    /// Wraps labels that are already a restricted-growth string, or returns
    /// `None` if they are not.
    pub fn from_canonical(labels: Vec<u32>) -> Option<Self> {
        let mut max_plus_one = 0u32;
        for &l in &labels {
            if l > max_plus_one {
                return None;
            }
            if l == max_plus_one {
                max_plus_one += 1;
            }
        }
        if labels.is_empty() {
            return None;
        }
        Some(Self {
            labels,
            k: max_plus_one as usize,
        })
    }

    pub(crate) fn from_canonical_unchecked(labels: Vec<u32>, k: usize) -> Self {
        debug_assert!(Self::from_canonical(labels.clone()).map(|p| p.k) == Some(k));
        Self { labels, k }
    }

    /// Canonicalizes `usize` labels without going through a hash map.
    pub(crate) fn from_dense_labels(raw: &[usize]) -> Self {
        let width = raw.iter().copied().max().map_or(0, |m| m + 1);
        let mut map = vec![u32::MAX; width];
        let mut labels = Vec::with_capacity(raw.len());
        let mut next = 0u32;
        for &r in raw {
            if map[r] == u32::MAX {
                map[r] = next;
                next += 1;
            }
            labels.push(map[r]);
        }
        Self {
            labels,
            k: next as usize,
        }
    }

    /// The partition with a single block.
    pub fn one_block(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLabels);
        }
        Ok(Self {
            labels: vec![0; n],
            k: 1,
        })
    }

    /// The partition with every item in its own block.
    pub fn singletons(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLabels);
        }
        Ok(Self {
            labels: (0..n as u32).collect(),
            k: n,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, item: usize) -> usize {
        self.labels[item] as usize
    }

    /// Block sizes indexed by block label.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// Zero-based item indices of each block, in label order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(i);
        }
        blocks
    }

    /// One-based block notation, e.g. `{1}{2,3,4}`.
    pub fn to_block_string(&self) -> String {
        let mut out = String::new();
        for block in self.blocks() {
            out.push('{');
            let items: Vec<String> = block.iter().map(|i| (i + 1).to_string()).collect();
            out.push_str(&items.join(","));
            out.push('}');
        }
        out
    }

    /// `self` refines `other` (every block of `self` lies inside a block of `other`).
    pub fn refines(&self, other: &SetPartition) -> Result<bool> {
        check_same_size(self, other)?;
        let mut image = vec![u32::MAX; self.k];
        for (a, b) in self.labels.iter().zip(&other.labels) {
            let slot = &mut image[*a as usize];
            if *slot == u32::MAX {
                *slot = *b;
            } else if *slot != *b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn parse_blocks(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::ParsePartition {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut owner: Vec<Option<usize>> = Vec::new();
        let mut rest = text.trim();
        let mut block = 0usize;
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(|| err("expected `{`"))?;
            let close = body.find('}').ok_or_else(|| err("unclosed block"))?;
            let items = &body[..close];
            if items.trim().is_empty() {
                return Err(err("empty block"));
            }
            for tok in items.split(',') {
                let item: usize = tok.trim().parse().map_err(|_| err("bad item index"))?;
                if item == 0 {
                    return Err(err("items are numbered from 1"));
                }
                if owner.len() < item {
                    owner.resize(item, None);
                }
                if owner[item - 1].replace(block).is_some() {
                    return Err(err("item appears twice"));
                }
            }
            block += 1;
            rest = body[close + 1..].trim_start();
        }
        let raw: Option<Vec<usize>> = owner.into_iter().collect();
        let raw = raw.ok_or_else(|| err("items must cover 1..n"))?;
        if raw.is_empty() {
            return Err(Error::EmptyLabels);
        }
        Ok(Self::from_dense_labels(&raw))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Accepts comma-separated labels (`0,0,1,2`, canonicalized on the way in)
/// or one-based block notation (`{1,2}{3,4}`).
impl FromStr for SetPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') {
            return Self::parse_blocks(t);
        }
        if t.is_empty() {
            return Err(Error::EmptyLabels);
        }
        let raw = t
            .split(',')
            .map(|tok| tok.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::ParsePartition {
                text: s.to_string(),
                reason: e.to_string(),
            })?;
        Self::canonicalize(&raw)
    }
}

impl TryFrom<Vec<u32>> for SetPartition {
    type Error = Error;

    fn try_from(raw: Vec<u32>) -> Result<Self> {
        Self::canonicalize(&raw)
    }
}

impl From<SetPartition> for Vec<u32> {
    fn from(p: SetPartition) -> Self {
        p.labels
    }
}

/// Multiset of block sizes, stored in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    sizes: Vec<usize>,
}

impl Configuration {
    pub fn new(mut sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidConfiguration("no blocks".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidConfiguration("zero-sized block".into()));
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.sizes.len()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sizes.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parses `3+1+1`.
impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sizes = s
            .split('+')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidConfiguration(format!("`{s}`: {e}")))?;
        Self::new(sizes)
    }
}

/// Sorted block sizes of `c`.
pub fn configuration(c: &SetPartition) -> Configuration {
    let mut sizes = c.block_sizes();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Configuration { sizes }
}

/// Bell number `B_n` from the Bell triangle.
pub fn bell_number(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let mut row = vec![BigUint::one()];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().cloned().unwrap());
        for v in &row {
            let s = next.last().unwrap() + v;
            next.push(s);
        }
        row = next;
    }
    row.pop().unwrap()
}

/// Stirling number of the second kind `S(n, k)` by the recurrence
/// `S(n, k) = k S(n-1, k) + S(n-1, k-1)`.
pub fn stirling2(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(Error::StirlingRange { n, k });
    }
    Ok(stirling2_row(n).swap_remove(k))
}

/// `S(n, 0..=n)`.
pub fn stirling2_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for m in 1..=n {
        let mut next = vec![BigUint::zero(); m + 1];
        for k in 1..=m {
            let mut v = row.get(k - 1).cloned().unwrap_or_default();
            if k < row.len() {
                v += &row[k] * BigUint::from(k);
            }
            next[k] = v;
        }
        row = next;
    }
    row
}

/// Number of set partitions of `n = sum(sizes)` with the given block sizes:
/// `n! / (prod sizes_j! * prod_i f_i!)` where `f_i` counts blocks of size `i`.
pub fn count_partitions_with_configuration(lambda: &Configuration) -> BigUint {
    let factorial = |m: usize| -> BigUint { (1..=m).fold(BigUint::one(), |acc, x| acc * x) };
    let mut denom = BigUint::one();
    for &s in &lambda.sizes {
        denom *= factorial(s);
    }
    let mut i = 0;
    while i < lambda.sizes.len() {
        let mut j = i;
        while j < lambda.sizes.len() && lambda.sizes[j] == lambda.sizes[i] {
            j += 1;
        }
        denom *= factorial(j - i);
        i = j;
    }
    factorial(lambda.n()) / denom
}

/// Lexicographic successor iteration over restricted-growth strings,
/// optionally with the first entries held fixed.
#[derive(Debug, Clone)]
pub(crate) struct RgsCursor {
    labels: Vec<u32>,
    // prefix_max[i] = max(labels[..=i])
    prefix_max: Vec<u32>,
    fixed: usize,
    started: bool,
    done: bool,
}

impl RgsCursor {
    pub(crate) fn new(n: usize) -> Self {
        Self::with_prefix(n, &[0])
    }

    /// Completions of a canonical `prefix` (nonempty, starting with 0).
    pub(crate) fn with_prefix(n: usize, prefix: &[u32]) -> Self {
        debug_assert!(!prefix.is_empty() && prefix.len() <= n && prefix[0] == 0);
        let mut labels = vec![0u32; n];
        labels[..prefix.len()].copy_from_slice(prefix);
        let mut prefix_max = vec![0u32; n];
        let mut m = 0;
        for i in 0..n {
            m = m.max(labels[i]);
            prefix_max[i] = m;
        }
        Self {
            labels,
            prefix_max,
            fixed: prefix.len(),
            started: false,
            done: false,
        }
    }

    pub(crate) fn next_labels(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.labels);
        }
        let n = self.labels.len();
        let mut i = n;
        while i > self.fixed {
            i -= 1;
            if self.labels[i] <= self.prefix_max[i - 1] {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return Some(&self.labels);
            }
        }
        self.done = true;
        None
    }

    pub(crate) fn block_count(&self) -> usize {
        self.prefix_max.last().map_or(0, |m| *m as usize + 1)
    }
}

/// Iterator over all of `Π_n` in lexicographic restricted-growth order.
#[derive(Debug, Clone)]
pub struct PartitionIter {
    cursor: RgsCursor,
}

impl Iterator for PartitionIter {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        let labels = self.cursor.next_labels()?.to_vec();
        let k = self.cursor.block_count();
        Some(SetPartition::from_canonical_unchecked(labels, k))
    }
}

/// All partitions of `n` items, refusing `n` above [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_partitions(n: usize) -> Result<PartitionIter> {
    enumerate_partitions_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_partitions_with_cap(n: usize, cap: usize) -> Result<PartitionIter> {
    if n == 0 {
        return Err(Error::EmptyLabels);
    }
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    Ok(PartitionIter {
        cursor: RgsCursor::new(n),
    })
}

fn check_same_size(a: &SetPartition, b: &SetPartition) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

/// Greatest lower bound: the partition into nonempty pairwise intersections.
pub fn meet(a: &SetPartition, b: &SetPartition) -> Result<SetPartition> {
    check_same_size(a, b)?;
    let kb = b.k;
    let cells: Vec<usize> = a
        .labels
        .iter()
        .zip(&b.labels)
        .map(|(&x, &y)| x as usize * kb + y as usize)
        .collect();
    Ok(SetPartition::from_dense_labels(&cells))
}

/// Shannon entropy in bits of the block-size distribution.
pub fn entropy(c: &SetPartition) -> f64 {
    entropy_of_sizes(&c.block_sizes(), c.n())
}

pub(crate) fn entropy_of_sizes(sizes: &[usize], n: usize) -> f64 {
    let nf = n as f64;
    -sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / nf;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Table of `x log2 x` for `x = 0..=n`, with `0 log 0 = 0`.
#[derive(Debug, Clone)]
pub(crate) struct XLogXTable {
    values: Vec<f64>,
}

impl XLogXTable {
    pub(crate) fn new(n: usize) -> Self {
        let values = (0..=n)
            .map(|x| if x < 2 { 0.0 } else { x as f64 * (x as f64).log2() })
            .collect();
        Self { values }
    }

    #[inline]
    pub(crate) fn get(&self, x: usize) -> f64 {
        self.values[x]
    }
}

/// Variation of information to a fixed partition, with the per-center terms
/// cached. Used wherever many partitions are compared to one center.
#[derive(Debug, Clone)]
pub struct CenterDistance {
    center: SetPartition,
    table: XLogXTable,
    center_term: f64,
}

impl CenterDistance {
    pub fn new(center: &SetPartition) -> Self {
        let table = XLogXTable::new(center.n());
        let center_term = center.block_sizes().iter().map(|&s| table.get(s)).sum();
        Self {
            center: center.clone(),
            table,
            center_term,
        }
    }

    pub fn center(&self) -> &SetPartition {
        &self.center
    }

    pub fn distance(&self, c: &SetPartition) -> Result<f64> {
        check_same_size(c, &self.center)?;
        Ok(self.distance_labels(c.labels(), c.k()))
    }

    /// `labels` must be a canonical string over the center's items with `k` blocks.
    pub(crate) fn distance_labels(&self, labels: &[u32], k: usize) -> f64 {
        let k0 = self.center.k();
        let mut sizes = vec![0usize; k];
        let mut cross = vec![0usize; k * k0];
        let mut equal = true;
        for (&a, &b) in labels.iter().zip(self.center.labels()) {
            sizes[a as usize] += 1;
            cross[a as usize * k0 + b as usize] += 1;
            equal &= a == b;
        }
        if equal {
            return 0.0;
        }
        let t = &self.table;
        let own: f64 = sizes.iter().map(|&s| t.get(s)).sum();
        let joint: f64 = cross.iter().map(|&s| t.get(s)).sum();
        ((own + self.center_term - 2.0 * joint) / labels.len() as f64).max(0.0)
    }
}

/// Variation of information `2 H(a ∧ b) - H(a) - H(b)` in bits.
pub fn vi_distance(a: &SetPartition, b: &SetPartition) -> Result<f64> {
    check_same_size(a, b)?;
    if a == b {
        return Ok(0.0);
    }
    CenterDistance::new(b).distance(a)
}

/// Covering neighbors of a partition in the Hasse diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseNeighborhood {
    pub center: SetPartition,
    /// Partitions covering `center`: one merge of two blocks.
    pub up: Vec<SetPartition>,
    /// Partitions covered by `center`: one block split in two.
    pub down: Vec<SetPartition>,
}

impl HasseNeighborhood {
    pub fn iter(&self) -> impl Iterator<Item = &SetPartition> {
        self.up.iter().chain(self.down.iter())
    }

    pub fn len(&self) -> usize {
        self.up.len() + self.down.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn hasse_neighbors(c: &SetPartition) -> HasseNeighborhood {
    let mut up = Vec::with_capacity(c.k * c.k.saturating_sub(1) / 2);
    for_each_merge(c, |p| up.push(p));
    let mut down = Vec::new();
    for_each_split(c, |p| down.push(p));
    HasseNeighborhood {
        center: c.clone(),
        up,
        down,
    }
}

pub(crate) fn for_each_merge(c: &SetPartition, mut f: impl FnMut(SetPartition)) {
    let mut raw: Vec<usize> = vec![0; c.n()];
    for a in 0..c.k {
        for b in a + 1..c.k {
            for (slot, &l) in raw.iter_mut().zip(&c.labels) {
                let l = l as usize;
                *slot = if l == b { a } else { l };
            }
            f(SetPartition::from_dense_labels(&raw));
        }
    }
}

pub(crate) fn for_each_split(c: &SetPartition, mut f: impl FnMut(SetPartition)) {
    let blocks = c.blocks();
    let fresh = c.k;
    let mut raw: Vec<usize> = c.labels.iter().map(|&l| l as usize).collect();
    for block in &blocks {
        if block.len() < 2 {
            continue;
        }
        // block[0] stays; each nonempty subset of the rest moves out
        let rest = &block[1..];
        assert!(rest.len() < 64, "block too large to split exhaustively");
        let own = c.labels[block[0]] as usize;
        for mask in 1u64..(1u64 << rest.len()) {
            for (bit, &item) in rest.iter().enumerate() {
                raw[item] = if mask >> bit & 1 == 1 { fresh } else { own };
            }
            f(SetPartition::from_dense_labels(&raw));
        }
        for &item in rest {
            raw[item] = own;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let c = SetPartition::canonicalize(&[2, 2, 7, 5]).unwrap();
        assert_eq!(c.labels(), &[0, 0, 1, 2]);
        assert_eq!(c.k(), 3);
        let c = SetPartition::canonicalize(&[0, 1, 2, 3]).unwrap();
        assert_eq!(c.labels(), &[0, 1, 2, 3]);
        let a = SetPartition::canonicalize(&[1, 0, 0, 0]).unwrap();
        let b = SetPartition::canonicalize(&[5, 9, 9, 9]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels(), &[0, 1, 1, 1]);
        assert_eq!(
            SetPartition::canonicalize::<u8>(&[]),
            Err(Error::EmptyLabels)
        );
    }

    #[test]
    fn parse_both_notations() {
        assert_eq!(p("{1}{2,3,4}"), p("0,1,1,1"));
        assert_eq!(p("{3,4}{1,2}").labels(), &[0, 0, 1, 1]);
        assert_eq!(p("{1}{2,3,4}").to_block_string(), "{1}{2,3,4}");
        assert_eq!(p("7,7,3").to_string(), "0,0,1");
        assert!("{1}{3}".parse::<SetPartition>().is_err());
        assert!("{1,1}".parse::<SetPartition>().is_err());
        assert!("".parse::<SetPartition>().is_err());
        assert!(SetPartition::from_canonical(vec![0, 2]).is_none());
    }

    #[test]
    fn configuration_examples() {
        assert_eq!(configuration(&p("{1}{2,3,4}")).sizes(), &[3, 1]);
        assert_eq!(
            configuration(&SetPartition::singletons(5).unwrap()).sizes(),
            &[1, 1, 1, 1, 1]
        );
        assert_eq!(configuration(&p("{1,2}{3,4,5}")).sizes(), &[3, 2]);
        assert_eq!("3+1+1".parse::<Configuration>().unwrap().to_string(), "3+1+1");
        assert!(Configuration::new(vec![2, 0]).is_err());
    }

    #[test]
    fn bell_and_stirling() {
        assert_eq!(bell_number(0), BigUint::from(1u32));
        assert_eq!(bell_number(1), BigUint::from(1u32));
        assert_eq!(bell_number(5), BigUint::from(52u32));
        assert_eq!(bell_number(12), BigUint::from(4_213_597u32));
        assert_eq!(bell_number(13), BigUint::from(27_644_437u32));
        assert_eq!(stirling2(5, 2).unwrap(), BigUint::from(15u32));
        for n in 0..10 {
            assert_eq!(stirling2(n, n).unwrap(), BigUint::from(1u32));
        }
        let total: BigUint = stirling2_row(12).iter().sum();
        assert_eq!(total, BigUint::from(4_213_597u32));
        assert!(matches!(stirling2(3, 4), Err(Error::StirlingRange { .. })));
        // B_26 overflows nothing here but does overflow u64 at larger n
        assert!(bell_number(26) > BigUint::from(u64::MAX / 1_000_000));
    }

    #[test]
    fn stirling_by_enumeration() {
        let two_blocks = enumerate_partitions(5).unwrap().filter(|c| c.k() == 2).count();
        assert_eq!(two_blocks, 15);
    }

    #[test]
    fn configuration_counts() {
        let c = |s: &str| count_partitions_with_configuration(&s.parse().unwrap());
        assert_eq!(c("2+2+1"), BigUint::from(15u32));
        assert_eq!(c("3+1+1"), BigUint::from(10u32));
        assert_eq!(c("6"), BigUint::from(1u32));
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_partitions(4).unwrap().count(), 15);
        let one: Vec<_> = enumerate_partitions(1).unwrap().collect();
        assert_eq!(one, vec![SetPartition::one_block(1).unwrap()]);
        let all: Vec<_> = enumerate_partitions(5).unwrap().collect();
        assert_eq!(all.len(), 52);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let target: Configuration = "2+2+1".parse().unwrap();
        assert_eq!(all.iter().filter(|c| configuration(c) == target).count(), 15);
        assert!(matches!(
            enumerate_partitions(14),
            Err(Error::EnumerationCap { n: 14, cap: 13 })
        ));
        assert_eq!(enumerate_partitions_with_cap(3, 2).unwrap_err(), Error::EnumerationCap { n: 3, cap: 2 });
    }

    #[test]
    fn enumeration_matches_bell_and_configuration_counts() {
        for n in 1..=9 {
            let mut tally: HashMap<Configuration, u64> = HashMap::new();
            let mut count = 0u64;
            for c in enumerate_partitions(n).unwrap() {
                *tally.entry(configuration(&c)).or_default() += 1;
                count += 1;
            }
            assert_eq!(BigUint::from(count), bell_number(n));
            for (lambda, k) in tally {
                assert_eq!(count_partitions_with_configuration(&lambda), BigUint::from(k));
            }
        }
    }

    #[test]
    fn prefix_cursor_partitions_the_space() {
        let n = 7;
        let mut prefixes = RgsCursor::new(3);
        let mut total = 0;
        while let Some(prefix) = prefixes.next_labels() {
            let prefix = prefix.to_vec();
            let mut cur = RgsCursor::with_prefix(n, &prefix);
            while let Some(l) = cur.next_labels() {
                assert_eq!(&l[..3], &prefix[..]);
                total += 1;
            }
        }
        assert_eq!(BigUint::from(total as u64), bell_number(n));
    }

    #[test]
    fn meet_examples() {
        let m = meet(&p("{1}{2,3,4}"), &p("{3}{1,2,4}")).unwrap();
        assert_eq!(m, p("{1}{3}{2,4}"));
        let a = p("{1,2}{3,4,5}");
        assert_eq!(meet(&a, &a).unwrap(), a);
        let bottom = SetPartition::singletons(5).unwrap();
        assert_eq!(meet(&a, &bottom).unwrap(), bottom);
        assert!(matches!(
            meet(&a, &SetPartition::one_block(4).unwrap()),
            Err(Error::SizeMismatch { left: 5, right: 4 })
        ));
    }

    #[test]
    fn meet_lattice_laws_on_pi4() {
        let all: Vec<_> = enumerate_partitions(4).unwrap().collect();
        for a in &all {
            assert_eq!(&meet(a, a).unwrap(), a);
            for b in &all {
                let ab = meet(a, b).unwrap();
                assert_eq!(ab, meet(b, a).unwrap());
                assert!(ab.refines(a).unwrap() && ab.refines(b).unwrap());
                for c in &all {
                    assert_eq!(
                        meet(&ab, c).unwrap(),
                        meet(a, &meet(b, c).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&p("{1,2,3,4}")), 0.0);
        assert!((entropy(&p("{1}{2,3,4}")) - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!((entropy(&SetPartition::singletons(4).unwrap()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn vi_examples() {
        let d = vi_distance(&p("{1}{2,3,4}"), &p("{1}{2}{3,4}")).unwrap();
        assert!((d - 0.6887).abs() < 1e-4, "{d}");
        let c = p("{1,2}{3,4,5}");
        assert_eq!(vi_distance(&c, &c).unwrap(), 0.0);
        let c0 = p("{1,2,3}{4,5,6}{7,8,9}{10,11,12}");
        let c0w = p("{1,5,9}{2,6,10}{3,7,11}{4,8,12}");
        let d = vi_distance(&c0, &c0w).unwrap();
        assert!((d - 3.17).abs() < 0.01, "{d}");
        assert!(vi_distance(&c, &c0).is_err());
    }

    #[test]
    fn vi_metric_axioms_on_pi4() {
        let all: Vec<_> = enumerate_partitions(4).unwrap().collect();
        let d: Vec<Vec<f64>> = all
            .iter()
            .map(|a| all.iter().map(|b| vi_distance(a, b).unwrap()).collect())
            .collect();
        for i in 0..all.len() {
            for j in 0..all.len() {
                assert!((d[i][j] - d[j][i]).abs() < 1e-12);
                assert_eq!(d[i][j] == 0.0, i == j);
                assert!(d[i][j] <= 2.0 + 1e-12);
                for k in 0..all.len() {
                    assert!(d[i][k] <= d[i][j] + d[j][k] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn hasse_neighbor_counts() {
        let n = hasse_neighbors(&p("{1}{2,3,4}"));
        assert_eq!((n.up.len(), n.down.len()), (1, 3));
        assert_eq!(n.up[0], SetPartition::one_block(4).unwrap());
        let n = hasse_neighbors(&SetPartition::singletons(5).unwrap());
        assert_eq!(n.down.len(), 0);
        assert_eq!(n.up.len(), 10);
        let n = hasse_neighbors(&p("{1,2}{3,4}"));
        assert_eq!((n.up.len(), n.down.len()), (1, 2));
    }

    #[test]
    fn hasse_edges_are_covering_relations() {
        for c in enumerate_partitions(5).unwrap() {
            let nb = hasse_neighbors(&c);
            let sizes = c.block_sizes();
            assert_eq!(nb.up.len(), c.k() * (c.k() - 1) / 2);
            let splits: usize = sizes.iter().map(|&s| (1usize << (s - 1)) - 1).sum();
            assert_eq!(nb.down.len(), splits);
            for u in &nb.up {
                assert!(c.refines(u).unwrap() && u.k() + 1 == c.k());
            }
            for d in &nb.down {
                assert!(d.refines(&c).unwrap() && d.k() == c.k() + 1);
            }
        }
    }

    #[test]
    fn center_distance_agrees_with_vi() {
        let c0 = p("{1,2}{3}{4,5,6}");
        let cd = CenterDistance::new(&c0);
        for c in enumerate_partitions(6).unwrap() {
            let direct = 2.0 * entropy(&meet(&c, &c0).unwrap()) - entropy(&c) - entropy(&c0);
            let fast = cd.distance(&c).unwrap();
            assert!((direct.max(0.0) - fast).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn canonical_form_ignores_label_permutation(
            raw in prop::collection::vec(0u32..6, 1..20),
            perm_seed in any::<u64>(),
        ) {
            let mut perm: Vec<u32> = (0..6).collect();
            // deterministic shuffle from the seed
            let mut s = perm_seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let relabeled: Vec<u32> = raw.iter().map(|&l| perm[l as usize]).collect();
            let a = SetPartition::canonicalize(&raw).unwrap();
            let b = SetPartition::canonicalize(&relabeled).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert!(SetPartition::from_canonical(a.labels().to_vec()).is_some());
            prop_assert_eq!(a.to_string().parse::<SetPartition>().unwrap(), a);
        }
    }
}
