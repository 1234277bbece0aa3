//! Integer partitions and the strict-sequence encodings used to count them.
//!
//! A partition is stored as its weakly decreasing list of positive parts.
//! The herringbone encoding pairs a strictly increasing positive sequence
//! `x` with a strictly increasing nonnegative sequence `y` of the same
//! length; reading the pair anti-diagonally recovers the Frobenius symbol of
//! the encoded partition 1:1, which is what makes the two-kinds convolution
//! `sum_m p(m) p(n-m)` count partitions correctly.
//!
//! Enumeration orders are fixed: partitions are emitted in lexicographically
//! decreasing order, strict sequences in lexicographically increasing order.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors from constructing or parsing partition-module values.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts must be positive and weakly decreasing (position {0})")]
    NotWeaklyDecreasing(usize),
    #[error("values must be strictly increasing (position {0})")]
    NotStrictlyIncreasing(usize),
    #[error("positive sequences must start at 1 or above")]
    ZeroInPositive,
    #[error("herringbone pair needs equal lengths (x has {x}, y has {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("expected a {expected} sequence")]
    KindMismatch { expected: &'static str },
    #[error("cannot parse `{0}`")]
    Parse(String),
}

/// A partition of a nonnegative integer: weakly decreasing positive parts.
///
/// The empty partition (of 0) is a first-class value. Serializes as
/// comma-separated decreasing integers, e.g. `5,4,4,2,1`; the empty
/// partition serializes as the empty string.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Validates that `parts` is weakly decreasing with positive entries.
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        for (i, w) in parts.windows(2).enumerate() {
            if w[0] < w[1] {
                return Err(PartitionError::NotWeaklyDecreasing(i + 1));
            }
        }
        if let Some(pos) = parts.iter().position(|&p| p == 0) {
            return Err(PartitionError::NotWeaklyDecreasing(pos));
        }
        Ok(Partition { parts })
    }

    /// The empty partition of 0.
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the parts.
    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| u64::from(p)).sum()
    }

    /// Side length of the largest square fitting in the Ferrers diagram.
    pub fn durfee(&self) -> usize {
        self.parts
            .iter()
            .enumerate()
            .take_while(|&(i, &p)| p as usize > i)
            .count()
    }

    /// Column lengths of the Ferrers diagram (the conjugate partition).
    pub fn conjugate_parts(&self) -> Vec<u32> {
        let cols = self.parts.first().copied().unwrap_or(0) as usize;
        (1..=cols)
            .map(|j| self.parts.iter().filter(|&&p| p as usize >= j).count() as u32)
            .collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.parts {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = PartitionError;

    fn from_str(s: &str) -> Result<Self, PartitionError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PartitionError::Parse(s.to_string()))?;
        Partition::new(parts)
    }
}

/// Calls `f` with every partition of `n`, in lexicographically decreasing
/// order of the part lists.
pub fn for_each_partition<F: FnMut(&[u32])>(n: u32, mut f: F) {
    fn rec<F: FnMut(&[u32])>(remaining: u32, max: u32, buf: &mut Vec<u32>, f: &mut F) {
        if remaining == 0 {
            f(buf);
            return;
        }
        let mut part = remaining.min(max);
        while part >= 1 {
            buf.push(part);
            rec(remaining - part, part, buf, f);
            buf.pop();
            part -= 1;
        }
    }
    let mut buf = Vec::new();
    rec(n, n.max(1), &mut buf, &mut f);
}

/// Every partition of `n`, in lexicographically decreasing order.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for_each_partition(n, |parts| {
        out.push(Partition {
            parts: parts.to_vec(),
        })
    });
    out
}

/// `p(0), ..., p(n)` by Euler's pentagonal-number recurrence.
///
/// This is the independent route for `p(n)`; agreement with the length of
/// [`enumerate_partitions`] is a tested invariant, not an assumption.
pub fn partition_count_table(n: u32) -> Vec<u128> {
    let n = n as usize;
    let mut table = vec![0i128; n + 1];
    table[0] = 1;
    for i in 1..=n {
        let mut acc: i128 = 0;
        let mut k: usize = 1;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let sign: i128 = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * table[i - g1];
            let g2 = g1 + k; // k(3k+1)/2
            if g2 <= i {
                acc += sign * table[i - g2];
            }
            k += 1;
        }
        table[i] = acc;
    }
    table
        .into_iter()
        .map(|v| {
            debug_assert!(v >= 0);
            v as u128
        })
        .collect()
}

/// The partition number `p(n)`.
pub fn partition_count(n: u32) -> u128 {
    *partition_count_table(n).last().unwrap()
}

/// `sum_{0<=m<=n} p(m) p(n-m)`: partitions of `n` into parts of two kinds.
pub fn a000712(n: u32) -> u128 {
    let p = partition_count_table(n);
    let n = n as usize;
    (0..=n).map(|m| p[m] * p[n - m]).sum()
}

/// Whether a strict sequence starts at 1 (`Positive`) or may start at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    Positive,
    Nonnegative,
}

/// A strictly increasing integer sequence with a fixed lower bound.
///
/// `Positive` sequences satisfy `1 <= x_1 < ... < x_k`; `Nonnegative`
/// sequences allow `x_1 = 0`. The empty sequence is valid for either kind.
/// Serializes as comma-separated increasing integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrictSequence {
    values: Vec<u32>,
    kind: SequenceKind,
}

impl StrictSequence {
    pub fn new(values: Vec<u32>, kind: SequenceKind) -> Result<Self, PartitionError> {
        for (i, w) in values.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(PartitionError::NotStrictlyIncreasing(i + 1));
            }
        }
        if kind == SequenceKind::Positive && values.first() == Some(&0) {
            return Err(PartitionError::ZeroInPositive);
        }
        Ok(StrictSequence { values, kind })
    }

    pub fn empty(kind: SequenceKind) -> Self {
        StrictSequence {
            values: Vec::new(),
            kind,
        }
    }

    pub fn parse(s: &str, kind: SequenceKind) -> Result<Self, PartitionError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(StrictSequence::empty(kind));
        }
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PartitionError::Parse(s.to_string()))?;
        StrictSequence::new(values, kind)
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of the values.
    pub fn total(&self) -> u64 {
        self.values.iter().map(|&v| u64::from(v)).sum()
    }
}

impl fmt::Display for StrictSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.values {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// All strict sequences of the given kind with length `k` and sum `total`,
/// in lexicographically increasing order.
///
/// For `Positive` this is the set usually written `A(k, l)`; for
/// `Nonnegative` it is `B(k, l)`. The empty sequence appears exactly when
/// `k = 0` and `total = 0`.
pub fn enumerate_strict_sequences(kind: SequenceKind, k: usize, total: u32) -> Vec<StrictSequence> {
    fn min_sum(start: u64, terms: u64) -> u64 {
        // start + (start+1) + ... + (start+terms-1)
        terms * start + terms * (terms - 1) / 2
    }
    fn rec(
        k_left: usize,
        remaining: u64,
        min_next: u64,
        buf: &mut Vec<u32>,
        kind: SequenceKind,
        out: &mut Vec<StrictSequence>,
    ) {
        if k_left == 0 {
            if remaining == 0 {
                out.push(StrictSequence {
                    values: buf.clone(),
                    kind,
                });
            }
            return;
        }
        let mut v = min_next;
        while min_sum(v, k_left as u64) <= remaining {
            buf.push(v as u32);
            rec(k_left - 1, remaining - v, v + 1, buf, kind, out);
            buf.pop();
            v += 1;
        }
    }
    let start = match kind {
        SequenceKind::Positive => 1,
        SequenceKind::Nonnegative => 0,
    };
    let mut out = Vec::new();
    let mut buf = Vec::new();
    rec(k, u64::from(total), start, &mut buf, kind, &mut out);
    out
}

/// A pair of equal-length strict sequences encoding a partition herringbone
/// style: `x` positive, `y` nonnegative, both strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerringbonePair {
    x: StrictSequence,
    y: StrictSequence,
}

impl HerringbonePair {
    pub fn new(x: StrictSequence, y: StrictSequence) -> Result<Self, PartitionError> {
        if x.kind() != SequenceKind::Positive {
            return Err(PartitionError::KindMismatch {
                expected: "positive",
            });
        }
        if y.kind() != SequenceKind::Nonnegative {
            return Err(PartitionError::KindMismatch {
                expected: "nonnegative",
            });
        }
        if x.len() != y.len() {
            return Err(PartitionError::LengthMismatch {
                x: x.len(),
                y: y.len(),
            });
        }
        Ok(HerringbonePair { x, y })
    }

    pub fn x(&self) -> &StrictSequence {
        &self.x
    }

    pub fn y(&self) -> &StrictSequence {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Weight of the encoded partition: `sum x + sum y`.
    pub fn weight(&self) -> u64 {
        self.x.total() + self.y.total()
    }
}

/// The Frobenius symbol of a partition: arm lengths and leg lengths of the
/// diagonal hooks, both rows strictly decreasing with nonnegative entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusSymbol {
    top: Vec<u32>,
    bottom: Vec<u32>,
}

impl FrobeniusSymbol {
    pub fn top(&self) -> &[u32] {
        &self.top
    }

    pub fn bottom(&self) -> &[u32] {
        &self.bottom
    }

    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }
}

/// Builds the partition encoded by a herringbone pair.
///
/// With `k = |x|`, the i-th diagonal cell carries a hook with arm
/// `y_{k+1-i}` and leg `x_{k+1-i} - 1`: row `i` has length `i + y_{k+1-i}`
/// and column `i` has length `i + x_{k+1-i} - 1`. The output weight is
/// always `sum x + sum y`.
pub fn herringbone_to_partition(pair: &HerringbonePair) -> Partition {
    let k = pair.len();
    if k == 0 {
        return Partition::empty();
    }
    let x = pair.x.values();
    let y = pair.y.values();
    let mut rows: Vec<u32> = Vec::new();
    for i in 1..=k {
        rows.push(i as u32 + y[k - i]);
    }
    // Column lengths across the Durfee square determine the rows below it.
    let col_len: Vec<u32> = (1..=k).map(|j| j as u32 + x[k - j] - 1).collect();
    let max_row = col_len[0];
    for r in (k as u32 + 1)..=max_row {
        let len = col_len.iter().filter(|&&c| c >= r).count() as u32;
        rows.push(len);
    }
    Partition::new(rows).expect("herringbone rows are weakly decreasing")
}

/// Recovers the herringbone pair of a partition: exact inverse of
/// [`herringbone_to_partition`], computed from the Durfee square and the
/// arms/legs of the diagonal hooks.
pub fn partition_to_herringbone(p: &Partition) -> HerringbonePair {
    let k = p.durfee();
    let conj = p.conjugate_parts();
    let mut x = vec![0u32; k];
    let mut y = vec![0u32; k];
    for i in 1..=k {
        y[k - i] = p.parts[i - 1] - i as u32;
        x[k - i] = conj[i - 1] - i as u32 + 1;
    }
    HerringbonePair {
        x: StrictSequence {
            values: x,
            kind: SequenceKind::Positive,
        },
        y: StrictSequence {
            values: y,
            kind: SequenceKind::Nonnegative,
        },
    }
}

/// The Frobenius symbol of `p`: top row `(y_k, ..., y_1)`, bottom row
/// `(x_k - 1, ..., x_1 - 1)` where `(x, y)` is the herringbone pair.
pub fn frobenius_symbol(p: &Partition) -> FrobeniusSymbol {
    let pair = partition_to_herringbone(p);
    let top: Vec<u32> = pair.y.values().iter().rev().copied().collect();
    let bottom: Vec<u32> = pair.x.values().iter().rev().map(|&v| v - 1).collect();
    FrobeniusSymbol { top, bottom }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn seq(values: &[u32], kind: SequenceKind) -> StrictSequence {
        StrictSequence::new(values.to_vec(), kind).unwrap()
    }

    #[test]
    fn enumerate_partitions_of_zero() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
    }

    #[test]
    fn enumerate_partitions_of_four() {
        let got = enumerate_partitions(4);
        let want = vec![
            part(&[4]),
            part(&[3, 1]),
            part(&[2, 2]),
            part(&[2, 1, 1]),
            part(&[1, 1, 1, 1]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumerate_partitions_of_ten_has_42() {
        assert_eq!(enumerate_partitions(10).len(), 42);
    }

    #[test]
    fn partition_count_values() {
        assert_eq!(partition_count(0), 1);
        assert_eq!(partition_count(4), 5);
        assert_eq!(partition_count(9), 30);
    }

    #[test]
    fn recurrence_matches_enumeration() {
        let table = partition_count_table(30);
        for n in 0..=30u32 {
            assert_eq!(
                table[n as usize],
                enumerate_partitions(n).len() as u128,
                "p({n})"
            );
        }
    }

    #[test]
    fn a000712_prefix() {
        let want: [u128; 11] = [1, 2, 5, 10, 20, 36, 65, 110, 185, 300, 481];
        for (n, &v) in want.iter().enumerate() {
            assert_eq!(a000712(n as u32), v, "a({n})");
        }
    }

    #[test]
    fn a000712_at_four_by_direct_convolution() {
        // p(0)p(4) + p(1)p(3) + p(2)p(2) + p(3)p(1) + p(4)p(0)
        let p = partition_count_table(4);
        let direct: u128 = (0..=4).map(|m| p[m] * p[4 - m]).sum();
        assert_eq!(direct, 20);
        assert_eq!(a000712(4), 20);
    }

    #[test]
    fn strict_positive_sequences() {
        let empty = enumerate_strict_sequences(SequenceKind::Positive, 0, 0);
        assert_eq!(empty, vec![StrictSequence::empty(SequenceKind::Positive)]);
        assert!(enumerate_strict_sequences(SequenceKind::Positive, 0, 3).is_empty());

        let a39 = enumerate_strict_sequences(SequenceKind::Positive, 3, 9);
        assert!(a39.contains(&seq(&[1, 3, 5], SequenceKind::Positive)));

        let a25 = enumerate_strict_sequences(SequenceKind::Positive, 2, 5);
        assert_eq!(
            a25,
            vec![
                seq(&[1, 4], SequenceKind::Positive),
                seq(&[2, 3], SequenceKind::Positive),
            ]
        );
    }

    #[test]
    fn strict_nonnegative_sequences() {
        let b37 = enumerate_strict_sequences(SequenceKind::Nonnegative, 3, 7);
        assert!(b37.contains(&seq(&[1, 2, 4], SequenceKind::Nonnegative)));

        let b10 = enumerate_strict_sequences(SequenceKind::Nonnegative, 1, 0);
        assert_eq!(b10, vec![seq(&[0], SequenceKind::Nonnegative)]);

        let b23 = enumerate_strict_sequences(SequenceKind::Nonnegative, 2, 3);
        assert_eq!(
            b23,
            vec![
                seq(&[0, 3], SequenceKind::Nonnegative),
                seq(&[1, 2], SequenceKind::Nonnegative),
            ]
        );
    }

    #[test]
    fn herringbone_single_cell() {
        let pair = HerringbonePair::new(
            seq(&[1], SequenceKind::Positive),
            seq(&[0], SequenceKind::Nonnegative),
        )
        .unwrap();
        assert_eq!(herringbone_to_partition(&pair), part(&[1]));
    }

    #[test]
    fn herringbone_two_one() {
        let pair = HerringbonePair::new(
            seq(&[2], SequenceKind::Positive),
            seq(&[1], SequenceKind::Nonnegative),
        )
        .unwrap();
        assert_eq!(herringbone_to_partition(&pair), part(&[2, 1]));
    }

    #[test]
    fn herringbone_example_of_weight_16() {
        let pair = HerringbonePair::new(
            seq(&[1, 3, 5], SequenceKind::Positive),
            seq(&[1, 2, 4], SequenceKind::Nonnegative),
        )
        .unwrap();
        let p = herringbone_to_partition(&pair);
        assert_eq!(p, part(&[5, 4, 4, 2, 1]));
        assert_eq!(p.weight(), 16);
        let sym = frobenius_symbol(&p);
        assert_eq!(sym.top(), &[4, 2, 1]);
        assert_eq!(sym.bottom(), &[4, 2, 0]);
    }

    #[test]
    fn herringbone_inverse_examples() {
        let pair = partition_to_herringbone(&part(&[1]));
        assert_eq!(pair.x().values(), &[1]);
        assert_eq!(pair.y().values(), &[0]);

        let pair = partition_to_herringbone(&part(&[2, 1]));
        assert_eq!(pair.x().values(), &[2]);
        assert_eq!(pair.y().values(), &[1]);

        let pair = partition_to_herringbone(&Partition::empty());
        assert!(pair.is_empty());
        assert_eq!(herringbone_to_partition(&pair), Partition::empty());
    }

    #[test]
    fn frobenius_symbol_examples() {
        let sym = frobenius_symbol(&part(&[2, 1]));
        assert_eq!(sym.top(), &[1]);
        assert_eq!(sym.bottom(), &[1]);

        let sym = frobenius_symbol(&part(&[1]));
        assert_eq!(sym.top(), &[0]);
        assert_eq!(sym.bottom(), &[0]);
    }

    #[test]
    fn round_trip_all_partitions_up_to_15() {
        for n in 0..=15u32 {
            for p in enumerate_partitions(n) {
                let pair = partition_to_herringbone(&p);
                assert_eq!(pair.weight(), p.weight());
                assert_eq!(herringbone_to_partition(&pair), p, "n={n}");
            }
        }
    }

    #[test]
    fn convolution_identity_both_forms() {
        // sum over 0<=k<=l<=n of |A(k,l)||B(k,n-l)| = p(n), and the same
        // with |B(k,l-k)| in place of |A(k,l)|.
        for n in 0..=15u32 {
            let mut via_a: u128 = 0;
            let mut via_b: u128 = 0;
            for l in 0..=n {
                for k in 0..=l as usize {
                    let b_right =
                        enumerate_strict_sequences(SequenceKind::Nonnegative, k, n - l).len()
                            as u128;
                    let a_left =
                        enumerate_strict_sequences(SequenceKind::Positive, k, l).len() as u128;
                    let b_left =
                        enumerate_strict_sequences(SequenceKind::Nonnegative, k, l - k as u32)
                            .len() as u128;
                    via_a += a_left * b_right;
                    via_b += b_left * b_right;
                }
            }
            assert_eq!(via_a, partition_count(n), "A-form, n={n}");
            assert_eq!(via_b, partition_count(n), "B-form, n={n}");
        }
    }

    #[test]
    fn positive_counts_equal_shifted_nonnegative_counts() {
        for l in 0..=15u32 {
            for k in 0..=l as usize {
                let a = enumerate_strict_sequences(SequenceKind::Positive, k, l).len();
                let b =
                    enumerate_strict_sequences(SequenceKind::Nonnegative, k, l - k as u32).len();
                assert_eq!(a, b, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn serialization_forms() {
        assert_eq!(part(&[5, 4, 4, 2, 1]).to_string(), "5,4,4,2,1");
        assert_eq!(Partition::empty().to_string(), "");
        assert_eq!("5,4,4,2,1".parse::<Partition>().unwrap(), part(&[5, 4, 4, 2, 1]));
        assert_eq!("".parse::<Partition>().unwrap(), Partition::empty());
        assert!("1,2".parse::<Partition>().is_err());
        assert_eq!(seq(&[1, 3, 5], SequenceKind::Positive).to_string(), "1,3,5");
        assert_eq!(
            StrictSequence::parse("1,2,4", SequenceKind::Nonnegative).unwrap(),
            seq(&[1, 2, 4], SequenceKind::Nonnegative)
        );
        assert!(StrictSequence::parse("0,1", SequenceKind::Positive).is_err());
    }

    fn arb_partition(max_n: u32) -> impl Strategy<Value = Partition> {
        (0..=max_n).prop_flat_map(|n| {
            let all = enumerate_partitions(n);
            let len = all.len();
            (0..len).prop_map(move |i| all[i].clone())
        })
    }

    fn arb_herringbone() -> impl Strategy<Value = HerringbonePair> {
        (0usize..=4).prop_flat_map(|k| {
            let xs = proptest::collection::btree_set(1u32..=12, k);
            let ys = proptest::collection::btree_set(0u32..=12, k);
            (xs, ys).prop_map(|(xs, ys)| {
                let x = StrictSequence::new(xs.into_iter().collect(), SequenceKind::Positive)
                    .unwrap();
                let y = StrictSequence::new(ys.into_iter().collect(), SequenceKind::Nonnegative)
                    .unwrap();
                HerringbonePair::new(x, y).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn prop_round_trip(p in arb_partition(15)) {
            let pair = partition_to_herringbone(&p);
            prop_assert_eq!(herringbone_to_partition(&pair), p);
        }

        #[test]
        fn prop_weight_conserved(pair in arb_herringbone()) {
            let p = herringbone_to_partition(&pair);
            prop_assert_eq!(p.weight(), pair.weight());
            prop_assert_eq!(partition_to_herringbone(&p), pair);
        }
    }
}
