//! The data bijection behind `N(n) = sum p(m) p(n-m)`.
//!
//! Each isomorphism class of pointed abelian groups of order `q^n` comes
//! from exactly one triple: a positive strict sequence `x`, a nonnegative
//! strict sequence `y` of the same length, and a partition `lambda`. The
//! exponent multiset is `mu = lambda  union  {x_s + y_s}`, the sequence
//! indices are `e_{i_s} = x_s + y_s`, and `f_s = x_s - 1`. The `-1` shift
//! keeps `f_s` inside `0 <= f_s <= e_{i_s} - 1` for every datum (including
//! `y_s = 0`) and makes the map a bijection; the unshifted variant
//! `f_s = x_s` is reported alongside by the CLI demo for comparison.

use std::collections::BTreeMap;

use super::{AbelianError, IndexSequence};
use crate::partitions::{
    enumerate_partitions, enumerate_strict_sequences, Partition, SequenceKind, StrictSequence,
};

/// Forward map: `(x, y, lambda)` to shape exponent data plus index sequence.
///
/// Returns the blocks `(e_i, n_i)` read off the multiset union `mu` and the
/// index sequence with `i_s` located by `e_{i_s} = x_s + y_s`, `f_s = x_s - 1`.
pub fn data_to_pointed_group(
    x: &StrictSequence,
    y: &StrictSequence,
    lambda: &Partition,
) -> Result<(Vec<(u32, u32)>, IndexSequence), AbelianError> {
    if x.kind() != SequenceKind::Positive {
        return Err(AbelianError::InvalidData("x must be a positive sequence".into()));
    }
    if y.kind() != SequenceKind::Nonnegative {
        return Err(AbelianError::InvalidData(
            "y must be a nonnegative sequence".into(),
        ));
    }
    if x.len() != y.len() {
        return Err(AbelianError::InvalidData(format!(
            "x and y must have equal length ({} vs {})",
            x.len(),
            y.len()
        )));
    }

    let sums: Vec<u32> = x
        .values()
        .iter()
        .zip(y.values())
        .map(|(&xs, &ys)| xs + ys)
        .collect();
    let mut mu: Vec<u32> = lambda.parts().to_vec();
    mu.extend(&sums);
    mu.sort_unstable();

    let mut blocks: Vec<(u32, u32)> = Vec::new();
    for &part in &mu {
        match blocks.last_mut() {
            Some(last) if last.0 == part => last.1 += 1,
            _ => blocks.push((part, 1)),
        }
    }
    let exponents: Vec<u32> = blocks.iter().map(|&(e, _)| e).collect();

    let pairs: Vec<(usize, u32)> = x
        .values()
        .iter()
        .zip(&sums)
        .map(|(&xs, &sum)| {
            let i = exponents
                .iter()
                .position(|&e| e == sum)
                .expect("every x_s + y_s is a part of mu");
            (i + 1, xs - 1)
        })
        .collect();

    let seq = IndexSequence::new(pairs, exponents)?;
    Ok((blocks, seq))
}

/// Inverse map: `x_s = f_s + 1`, `y_s = e_{i_s} - f_s - 1`, and `lambda` is
/// `mu` minus one copy of each `e_{i_s}`.
pub fn pointed_group_to_data(
    blocks: &[(u32, u32)],
    seq: &IndexSequence,
) -> Result<(StrictSequence, StrictSequence, Partition), AbelianError> {
    let exponents: Vec<u32> = blocks.iter().map(|&(e, _)| e).collect();
    if seq.exponents() != exponents.as_slice() {
        return Err(AbelianError::ContextMismatch);
    }

    let mut x = Vec::with_capacity(seq.len());
    let mut y = Vec::with_capacity(seq.len());
    for &(i, f) in seq.pairs() {
        x.push(f + 1);
        y.push(exponents[i - 1] - f - 1);
    }
    let x = StrictSequence::new(x, SequenceKind::Positive)
        .map_err(|e| AbelianError::InvalidData(e.to_string()))?;
    let y = StrictSequence::new(y, SequenceKind::Nonnegative)
        .map_err(|e| AbelianError::InvalidData(e.to_string()))?;

    let mut remaining: Vec<u32> = Vec::new();
    let used: Vec<u32> = seq.pairs().iter().map(|&(i, _)| exponents[i - 1]).collect();
    for &(e, n) in blocks {
        let spent = used.iter().filter(|&&u| u == e).count() as u32;
        for _ in 0..(n - spent) {
            remaining.push(e);
        }
    }
    remaining.sort_unstable_by(|a, b| b.cmp(a));
    let lambda =
        Partition::new(remaining).map_err(|e| AbelianError::InvalidData(e.to_string()))?;
    Ok((x, y, lambda))
}

/// Calls `f` with every datum `(x, y, lambda)` for weight `n`, in a fixed
/// deterministic order.
pub(crate) fn for_each_datum<F>(n: u32, mut f: F)
where
    F: FnMut(&StrictSequence, &StrictSequence, &Partition),
{
    for m in 0..=n {
        for u in 0..=m {
            for l in 0..=u as usize {
                let xs = enumerate_strict_sequences(SequenceKind::Positive, l, u);
                if xs.is_empty() {
                    continue;
                }
                let ys = enumerate_strict_sequences(SequenceKind::Nonnegative, l, m - u);
                if ys.is_empty() {
                    continue;
                }
                let lambdas = enumerate_partitions(n - m);
                for x in &xs {
                    for y in &ys {
                        for lambda in &lambdas {
                            f(x, y, lambda);
                        }
                    }
                }
            }
        }
    }
}

/// An isomorphism class keyed q-independently: blocks plus sequence pairs.
type ClassKey = (Vec<(u32, u32)>, Vec<(usize, u32)>);

/// Runs the full bijection check at weight `n`: every datum maps to a
/// distinct classification entry, the map is onto, and the inverse returns
/// the original datum. Returns the common count, or a description of the
/// first failure.
pub fn verify_bijection(n: u32) -> Result<u128, String> {
    let mut expected: BTreeMap<ClassKey, bool> = BTreeMap::new();
    for parts in enumerate_partitions(n) {
        let mut blocks: Vec<(u32, u32)> = Vec::new();
        for &p in parts.parts().iter().rev() {
            match blocks.last_mut() {
                Some(last) if last.0 == p => last.1 += 1,
                _ => blocks.push((p, 1)),
            }
        }
        let exponents: Vec<u32> = blocks.iter().map(|&(e, _)| e).collect();
        let seqs = super::enumerate_index_sequences(&exponents)
            .map_err(|e| format!("bad exponents from partition: {e}"))?;
        for seq in seqs {
            expected.insert((blocks.clone(), seq.pairs().to_vec()), false);
        }
    }

    let mut count: u128 = 0;
    let mut failure: Option<String> = None;
    for_each_datum(n, |x, y, lambda| {
        if failure.is_some() {
            return;
        }
        let (blocks, seq) = match data_to_pointed_group(x, y, lambda) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(format!("forward map failed on x={x} y={y} lambda={lambda}: {e}"));
                return;
            }
        };
        match expected.get_mut(&(blocks.clone(), seq.pairs().to_vec())) {
            None => {
                failure = Some(format!(
                    "datum x={x} y={y} lambda={lambda} maps outside the classification"
                ));
                return;
            }
            Some(seen) if *seen => {
                failure = Some(format!(
                    "datum x={x} y={y} lambda={lambda} collides with an earlier datum"
                ));
                return;
            }
            Some(seen) => *seen = true,
        }
        match pointed_group_to_data(&blocks, &seq) {
            Ok((x2, y2, l2)) => {
                if &x2 != x || &y2 != y || &l2 != lambda {
                    failure = Some(format!(
                        "round trip mismatch: x={x} y={y} lambda={lambda} came back as x={x2} y={y2} lambda={l2}"
                    ));
                    return;
                }
            }
            Err(e) => {
                failure = Some(format!("inverse map failed: {e}"));
                return;
            }
        }
        count += 1;
    });
    if let Some(f) = failure {
        return Err(f);
    }
    if let Some(((blocks, pairs), _)) = expected.iter().find(|(_, &seen)| !seen) {
        return Err(format!(
            "classification entry not reached: blocks {blocks:?}, sequence {pairs:?}"
        ));
    }
    Ok(count)
}
