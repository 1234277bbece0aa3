//! Finite abelian q-groups with a distinguished element.
//!
//! A group shape is `Z_{q^e1}^{n1} + ... + Z_{q^ek}^{nk}` with
//! `1 <= e1 < ... < ek`. The Aut(A)-orbits of such a group are named by
//! index sequences `((i1,f1),...,(il,fl))`: the orbit of
//! `sum_s q^{f_s} eps_{i_s}`, where `eps_i` is the first standard basis
//! vector of block `i`. This module enumerates those sequences, builds the
//! representatives, canonicalizes arbitrary elements, counts isomorphism
//! classes, and splits general pointed groups into their primary parts.
//!
//! Text forms (stable CLI/golden-file contracts):
//! - shape: `q=3;1^2,2^2,5,9` (exponents with optional `^multiplicity`)
//! - element: blocks separated by `;`, coordinates by `,`: `0,0;3,0;27;243`
//! - index sequence: `(2,1)(3,3)(4,5)`, the empty sequence being `()`

mod bijection;
mod oracle;

pub use bijection::{data_to_pointed_group, pointed_group_to_data, verify_bijection};
pub use oracle::{
    brute_force_orbits, brute_force_orbits_with_bound, endomorphism_count,
    orbits_via_endomorphisms, Endomorphism, DEFAULT_ORACLE_BOUND,
};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::partitions::for_each_partition;

/// Errors from the abelian-group layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbelianError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("block exponents must be strictly increasing and positive")]
    BadExponents,
    #[error("block multiplicities must be positive")]
    BadMultiplicity,
    #[error("q^e overflows 64 bits (q={q}, e={e})")]
    ModulusOverflow { q: u64, e: u32 },
    #[error("element does not conform to the group shape")]
    ShapeMismatch,
    #[error("index sequence does not match the shape exponents")]
    ContextMismatch,
    #[error("invalid index sequence: {0}")]
    InvalidIndexSequence(String),
    #[error("cyclic factor orders must be at least 2 (got {0})")]
    InvalidOrder(u64),
    #[error("point length {point} does not match factor count {factors}")]
    PointLength { point: usize, factors: usize },
    #[error("group order exceeds the configured bound ({order} > {bound})")]
    SizeBound { order: u128, bound: u128 },
    #[error("group order overflows 128 bits")]
    OrderOverflow,
    #[error("invalid bijection data: {0}")]
    InvalidData(String),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

fn parse_err(input: &str, reason: &str) -> AbelianError {
    AbelianError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Trial-division factorization into `(prime, exponent)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.checked_mul(d).map_or(false, |sq| sq <= n) {
        if n % d == 0 {
            let mut e = 0u32;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The shape of a finite abelian q-group: a prime `q` and blocks
/// `(e_i, n_i)` with strictly increasing exponents and positive
/// multiplicities. Constructors normalize: blocks are sorted by exponent
/// and equal exponents are merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupShape {
    q: u64,
    blocks: Vec<(u32, u32)>,
    moduli: Vec<u64>,
}

impl GroupShape {
    pub fn new(q: u64, blocks: Vec<(u32, u32)>) -> Result<Self, AbelianError> {
        if !is_prime(q) {
            return Err(AbelianError::NotPrime(q));
        }
        let mut sorted = blocks;
        sorted.sort_by_key(|&(e, _)| e);
        let mut merged: Vec<(u32, u32)> = Vec::new();
        for (e, n) in sorted {
            if e == 0 {
                return Err(AbelianError::BadExponents);
            }
            if n == 0 {
                return Err(AbelianError::BadMultiplicity);
            }
            match merged.last_mut() {
                Some(last) if last.0 == e => last.1 += n,
                _ => merged.push((e, n)),
            }
        }
        let moduli = merged
            .iter()
            .map(|&(e, _)| {
                let m = (q as u128).checked_pow(e).filter(|&m| m <= u64::MAX as u128);
                m.map(|m| m as u64)
                    .ok_or(AbelianError::ModulusOverflow { q, e })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupShape {
            q,
            blocks: merged,
            moduli,
        })
    }

    pub fn trivial(q: u64) -> Result<Self, AbelianError> {
        GroupShape::new(q, Vec::new())
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn blocks(&self) -> &[(u32, u32)] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.blocks.iter().map(|&(e, _)| e).collect()
    }

    /// Modulus `q^{e_i}` of block `i` (0-based).
    pub fn modulus(&self, block: usize) -> u64 {
        self.moduli[block]
    }

    /// `|A| = q^{sum n_i e_i}`, or `None` past 128 bits.
    pub fn order(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for (b, &(_, n)) in self.blocks.iter().enumerate() {
            for _ in 0..n {
                acc = acc.checked_mul(self.moduli[b] as u128)?;
            }
        }
        Some(acc)
    }

    /// The zero element.
    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: self
                .blocks
                .iter()
                .map(|&(_, n)| vec![0u64; n as usize])
                .collect(),
        }
    }

    /// Element from per-block coordinates; coordinates are reduced modulo
    /// the block modulus.
    pub fn element(&self, coords: Vec<Vec<u64>>) -> Result<GroupElement, AbelianError> {
        if coords.len() != self.blocks.len() {
            return Err(AbelianError::ShapeMismatch);
        }
        let coords = coords
            .into_iter()
            .enumerate()
            .map(|(b, block)| {
                if block.len() != self.blocks[b].1 as usize {
                    return Err(AbelianError::ShapeMismatch);
                }
                Ok(block.into_iter().map(|c| c % self.moduli[b]).collect())
            })
            .collect::<Result<Vec<Vec<u64>>, _>>()?;
        Ok(GroupElement { coords })
    }

    /// The distinguished generator of block `i`: first coordinate 1, rest 0.
    pub fn basis_element(&self, block: usize) -> GroupElement {
        let mut e = self.zero();
        e.coords[block][0] = 1;
        e
    }

    /// Number of elements as `usize`; caller must have checked the bound.
    pub(crate) fn element_count(&self) -> usize {
        self.order().expect("group order fits u128") as usize
    }

    /// Mixed-radix rank of an element, leftmost coordinate most significant.
    pub fn element_index(&self, e: &GroupElement) -> usize {
        let mut idx: u128 = 0;
        for (b, block) in e.coords.iter().enumerate() {
            for &c in block {
                idx = idx * self.moduli[b] as u128 + c as u128;
            }
        }
        idx as usize
    }

    /// Inverse of [`GroupShape::element_index`].
    pub fn element_from_index(&self, mut idx: usize) -> GroupElement {
        let mut coords: Vec<Vec<u64>> = self
            .blocks
            .iter()
            .map(|&(_, n)| vec![0u64; n as usize])
            .collect();
        for b in (0..self.blocks.len()).rev() {
            let m = self.moduli[b] as usize;
            for j in (0..self.blocks[b].1 as usize).rev() {
                coords[b][j] = (idx % m) as u64;
                idx /= m;
            }
        }
        GroupElement { coords }
    }

    /// Parses the element text form `0,0;3,0;27;243` against this shape.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement, AbelianError> {
        let s = s.trim();
        if self.blocks.is_empty() {
            return if s.is_empty() {
                Ok(self.zero())
            } else {
                Err(parse_err(s, "trivial group has no coordinates"))
            };
        }
        let blocks: Vec<&str> = s.split(';').collect();
        if blocks.len() != self.blocks.len() {
            return Err(parse_err(s, "wrong number of blocks"));
        }
        let mut coords = Vec::with_capacity(blocks.len());
        for (b, text) in blocks.iter().enumerate() {
            let vals = text
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| parse_err(s, "coordinates must be nonnegative integers"))?;
            if vals.len() != self.blocks[b].1 as usize {
                return Err(parse_err(s, "wrong coordinate count in a block"));
            }
            coords.push(vals);
        }
        self.element(coords)
    }

    /// Formats an element in the `;`/`,` text form.
    pub fn format_element(&self, e: &GroupElement) -> String {
        e.coords
            .iter()
            .map(|block| {
                block
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for GroupShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={};", self.q)?;
        let mut first = true;
        for &(e, n) in &self.blocks {
            if !first {
                write!(f, ",")?;
            }
            if n == 1 {
                write!(f, "{e}")?;
            } else {
                write!(f, "{e}^{n}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl FromStr for GroupShape {
    type Err = AbelianError;

    fn from_str(s: &str) -> Result<Self, AbelianError> {
        let t = s.trim();
        let rest = t
            .strip_prefix("q=")
            .ok_or_else(|| parse_err(s, "expected `q=<prime>;<blocks>`"))?;
        let (q_text, blocks_text) = match rest.split_once(';') {
            Some((a, b)) => (a, b),
            None => (rest, ""),
        };
        let q = q_text
            .trim()
            .parse::<u64>()
            .map_err(|_| parse_err(s, "bad prime"))?;
        let mut blocks = Vec::new();
        for tok in blocks_text.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let (e, n) = match tok.split_once('^') {
                Some((e, n)) => (
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| parse_err(s, "bad exponent"))?,
                    n.trim()
                        .parse::<u32>()
                        .map_err(|_| parse_err(s, "bad multiplicity"))?,
                ),
                None => (
                    tok.parse::<u32>()
                        .map_err(|_| parse_err(s, "bad exponent"))?,
                    1,
                ),
            };
            blocks.push((e, n));
        }
        GroupShape::new(q, blocks)
    }
}

/// An element of a [`GroupShape`]: one coordinate tuple per block, each
/// coordinate reduced into `[0, q^{e_i})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<Vec<u64>>,
}

impl GroupElement {
    pub fn coords(&self) -> &[Vec<u64>] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|b| b.iter().all(|&c| c == 0))
    }
}

/// A pointed abelian q-group: a shape together with a distinguished element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedGroup {
    shape: GroupShape,
    point: GroupElement,
}

impl PointedGroup {
    pub fn new(shape: GroupShape, point: GroupElement) -> Result<Self, AbelianError> {
        if point.coords.len() != shape.blocks.len() {
            return Err(AbelianError::ShapeMismatch);
        }
        for (b, block) in point.coords.iter().enumerate() {
            if block.len() != shape.blocks[b].1 as usize
                || block.iter().any(|&c| c >= shape.moduli[b])
            {
                return Err(AbelianError::ShapeMismatch);
            }
        }
        Ok(PointedGroup { shape, point })
    }

    pub fn shape(&self) -> &GroupShape {
        &self.shape
    }

    pub fn point(&self) -> &GroupElement {
        &self.point
    }
}

/// The combinatorial name of an Aut(A)-orbit: pairs `(i_s, f_s)` over a
/// context of strictly increasing exponents `(e_1, ..., e_k)`, satisfying
///
/// 1. `l >= 0` (the empty sequence is valid),
/// 2. `1 <= i_1 < ... < i_l <= k` (block indices are 1-based),
/// 3. `0 <= f_s <= e_{i_s} - 1`,
/// 4. `0 < f_{s+1} - f_s < e_{i_{s+1}} - e_{i_s}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSequence {
    pairs: Vec<(usize, u32)>,
    exponents: Vec<u32>,
}

impl IndexSequence {
    pub fn new(pairs: Vec<(usize, u32)>, exponents: Vec<u32>) -> Result<Self, AbelianError> {
        validate_exponents(&exponents)?;
        let k = exponents.len();
        let mut prev_i = 0usize;
        for (s, &(i, f)) in pairs.iter().enumerate() {
            if i < 1 || i > k {
                return Err(AbelianError::InvalidIndexSequence(format!(
                    "block index {i} out of range 1..={k}"
                )));
            }
            if i <= prev_i {
                return Err(AbelianError::InvalidIndexSequence(
                    "block indices must be strictly increasing".into(),
                ));
            }
            let e = exponents[i - 1];
            if f > e - 1 {
                return Err(AbelianError::InvalidIndexSequence(format!(
                    "f={f} exceeds e-1={} at position {s}",
                    e - 1
                )));
            }
            if s > 0 {
                let (pi, pf) = pairs[s - 1];
                let df = f as i64 - pf as i64;
                let de = exponents[i - 1] as i64 - exponents[pi - 1] as i64;
                if df <= 0 || df >= de {
                    return Err(AbelianError::InvalidIndexSequence(format!(
                        "gap condition fails between positions {} and {s}",
                        s - 1
                    )));
                }
            }
            prev_i = i;
        }
        Ok(IndexSequence { pairs, exponents })
    }

    pub fn empty(exponents: Vec<u32>) -> Result<Self, AbelianError> {
        IndexSequence::new(Vec::new(), exponents)
    }

    /// Pairs `(i_s, f_s)` with 1-based block indices.
    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.pairs
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Parses the text form `(2,1)(3,3)(4,5)` (`()` for the empty sequence)
    /// against the given context exponents.
    pub fn parse(s: &str, exponents: Vec<u32>) -> Result<Self, AbelianError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "()" {
            return IndexSequence::new(Vec::new(), exponents);
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| parse_err(s, "expected `(i,f)(i,f)...`"))?;
        let mut pairs = Vec::new();
        for chunk in inner.split(")(") {
            let (i, f) = chunk
                .split_once(',')
                .ok_or_else(|| parse_err(s, "expected `i,f` inside parentheses"))?;
            pairs.push((
                i.parse::<usize>().map_err(|_| parse_err(s, "bad index"))?,
                f.parse::<u32>().map_err(|_| parse_err(s, "bad exponent"))?,
            ));
        }
        IndexSequence::new(pairs, exponents)
    }
}

impl fmt::Display for IndexSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "()");
        }
        for &(i, fv) in &self.pairs {
            write!(f, "({i},{fv})")?;
        }
        Ok(())
    }
}

fn validate_exponents(exponents: &[u32]) -> Result<(), AbelianError> {
    if exponents.contains(&0) {
        return Err(AbelianError::BadExponents);
    }
    if exponents.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AbelianError::BadExponents);
    }
    Ok(())
}

/// Every valid index sequence over `exponents`, exactly once, in depth-first
/// order: the empty sequence first, then extensions by increasing `(i, f)`.
pub fn enumerate_index_sequences(exponents: &[u32]) -> Result<Vec<IndexSequence>, AbelianError> {
    validate_exponents(exponents)?;
    let k = exponents.len();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u32)> = Vec::new();

    fn rec(
        exponents: &[u32],
        k: usize,
        stack: &mut Vec<(usize, u32)>,
        out: &mut Vec<IndexSequence>,
    ) {
        out.push(IndexSequence {
            pairs: stack.clone(),
            exponents: exponents.to_vec(),
        });
        let start = stack.last().map_or(1, |&(i, _)| i + 1);
        for i in start..=k {
            let e = exponents[i - 1];
            let (lo, hi) = match stack.last() {
                None => (0i64, e as i64 - 1),
                Some(&(pi, pf)) => {
                    let gap = e as i64 - exponents[pi - 1] as i64;
                    (pf as i64 + 1, (e as i64 - 1).min(pf as i64 + gap - 1))
                }
            };
            let mut f = lo;
            while f <= hi {
                stack.push((i, f as u32));
                rec(exponents, k, stack, out);
                stack.pop();
                f += 1;
            }
        }
    }

    rec(exponents, k, &mut stack, &mut out);
    Ok(out)
}

/// `|I(e_1,...,e_k)|` without materializing the sequences.
pub fn count_index_sequences(exponents: &[u32]) -> Result<u128, AbelianError> {
    validate_exponents(exponents)?;
    let k = exponents.len();
    // tails[i][f] = number of valid sequences starting with the pair (i+1, f).
    let mut tails: Vec<Vec<u128>> = exponents
        .iter()
        .map(|&e| vec![0u128; e as usize])
        .collect();
    for i in (0..k).rev() {
        for f in 0..exponents[i] as usize {
            let mut total: u128 = 1;
            for j in i + 1..k {
                let gap = (exponents[j] - exponents[i]) as usize;
                let hi = (exponents[j] as usize - 1).min(f + gap - 1);
                for fj in (f + 1)..=hi {
                    total += tails[j][fj];
                }
            }
            tails[i][f] = total;
        }
    }
    let mut total: u128 = 1; // the empty sequence
    for row in &tails {
        total += row.iter().sum::<u128>();
    }
    Ok(total)
}

/// The element `sum_s q^{f_s} eps_{i_s}` named by an index sequence.
pub fn orbit_representative(
    s: &IndexSequence,
    shape: &GroupShape,
) -> Result<GroupElement, AbelianError> {
    if s.exponents != shape.exponents() {
        return Err(AbelianError::ContextMismatch);
    }
    let mut e = shape.zero();
    for &(i, f) in &s.pairs {
        e.coords[i - 1][0] = shape.q.pow(f);
    }
    Ok(e)
}

/// q-adic valuation of a nonzero residue; `None` for zero.
fn valuation(q: u64, mut c: u64) -> Option<u32> {
    if c == 0 {
        return None;
    }
    let mut v = 0;
    while c % q == 0 {
        c /= q;
        v += 1;
    }
    Some(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Violation {
    DropLeft(usize),
    DropRight(usize),
}

fn find_violations(pairs: &[(usize, u32)], exponents: &[u32]) -> Vec<Violation> {
    let mut out = Vec::new();
    for s in 0..pairs.len().saturating_sub(1) {
        let (i0, f0) = pairs[s];
        let (i1, f1) = pairs[s + 1];
        let df = f1 as i64 - f0 as i64;
        let de = exponents[i1 - 1] as i64 - exponents[i0 - 1] as i64;
        if df <= 0 {
            out.push(Violation::DropLeft(s));
        } else if df >= de {
            out.push(Violation::DropRight(s));
        }
    }
    out
}

/// Applies the two eliminations until the gap condition holds everywhere.
/// `choose` selects which violation to resolve next; the fixed point is the
/// same for every choice, which the tests exercise with randomized orders.
fn reduce_pairs<F: FnMut(usize) -> usize>(
    mut pairs: Vec<(usize, u32)>,
    exponents: &[u32],
    mut choose: F,
) -> Vec<(usize, u32)> {
    loop {
        let violations = find_violations(&pairs, exponents);
        if violations.is_empty() {
            return pairs;
        }
        let pick = violations[choose(violations.len()) % violations.len()];
        match pick {
            Violation::DropLeft(s) => {
                pairs.remove(s);
            }
            Violation::DropRight(s) => {
                pairs.remove(s + 1);
            }
        }
    }
}

/// The unique index sequence naming the Aut(A)-orbit of `g.point`.
///
/// Per block, the minimum q-adic valuation `t_i` over the block coordinates
/// reduces the block component to `q^{t_i} eps_i` (orbits of a homocyclic
/// block are classified by valuation; all-zero blocks drop out). The
/// retained pairs are then rewritten to the normal form: whenever
/// `f_{s+1} - f_s <= 0` drop term `s`, whenever
/// `f_{s+1} - f_s >= e_{i_{s+1}} - e_{i_s}` drop term `s+1`. Each step
/// shrinks the sequence, and the fixed point is unique.
pub fn canonicalize(g: &PointedGroup) -> IndexSequence {
    let shape = g.shape();
    let exponents = shape.exponents();
    let mut pairs: Vec<(usize, u32)> = Vec::new();
    for (b, block) in g.point().coords.iter().enumerate() {
        let t = block.iter().filter_map(|&c| valuation(shape.q, c)).min();
        if let Some(t) = t {
            pairs.push((b + 1, t));
        }
    }
    let pairs = reduce_pairs(pairs, &exponents, |_| 0);
    IndexSequence::new(pairs, exponents).expect("reduction yields a valid index sequence")
}

/// `N(n)`: the number of isomorphism classes of pointed abelian groups of
/// order `q^n`, summed over all shapes; independent of the prime `q`.
pub fn count_pointed_groups(n: u32) -> u128 {
    let mut cache: HashMap<Vec<u32>, u128> = HashMap::new();
    let mut total: u128 = 0;
    for_each_partition(n, |parts| {
        // Distinct parts of the partition, ascending, are the exponents.
        let mut exponents: Vec<u32> = parts.to_vec();
        exponents.dedup();
        exponents.reverse();
        let count = *cache.entry(exponents.clone()).or_insert_with(|| {
            count_index_sequences(&exponents).expect("partition parts form valid exponents")
        });
        total += count;
    });
    total
}

/// One `(shape, index sequence)` per isomorphism class of pointed abelian
/// groups of order `q^n`, in a deterministic order: shapes follow the
/// lexicographically decreasing partition order, sequences the depth-first
/// order of [`enumerate_index_sequences`].
pub fn enumerate_pointed_groups(
    q: u64,
    n: u32,
) -> Result<Vec<(GroupShape, IndexSequence)>, AbelianError> {
    if !is_prime(q) {
        return Err(AbelianError::NotPrime(q));
    }
    let mut out = Vec::new();
    let mut shapes: Vec<Vec<(u32, u32)>> = Vec::new();
    for_each_partition(n, |parts| {
        let mut blocks: Vec<(u32, u32)> = Vec::new();
        for &p in parts.iter().rev() {
            match blocks.last_mut() {
                Some(last) if last.0 == p => last.1 += 1,
                _ => blocks.push((p, 1)),
            }
        }
        shapes.push(blocks);
    });
    for blocks in shapes {
        let shape = GroupShape::new(q, blocks)?;
        for seq in enumerate_index_sequences(&shape.exponents())? {
            out.push((shape.clone(), seq));
        }
    }
    Ok(out)
}

/// A finite abelian group presented as a product of cyclic factors of the
/// given orders (each at least 2; the empty product is the trivial group),
/// together with a distinguished element in coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralPointedGroup {
    orders: Vec<u64>,
    point: Vec<u64>,
}

impl GeneralPointedGroup {
    /// Coordinates are reduced modulo their factor orders.
    pub fn new(orders: Vec<u64>, point: Vec<u64>) -> Result<Self, AbelianError> {
        if point.len() != orders.len() {
            return Err(AbelianError::PointLength {
                point: point.len(),
                factors: orders.len(),
            });
        }
        if let Some(&bad) = orders.iter().find(|&&m| m < 2) {
            return Err(AbelianError::InvalidOrder(bad));
        }
        let point = point
            .iter()
            .zip(&orders)
            .map(|(&c, &m)| c % m)
            .collect();
        Ok(GeneralPointedGroup { orders, point })
    }

    pub fn trivial() -> Self {
        GeneralPointedGroup {
            orders: Vec::new(),
            point: Vec::new(),
        }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn point(&self) -> &[u64] {
        &self.point
    }

    pub fn order(&self) -> Option<u128> {
        self.orders
            .iter()
            .try_fold(1u128, |acc, &m| acc.checked_mul(m as u128))
    }
}

/// Splits `(A, c)` into its primary parts `(A_q, c_q)`, one per prime
/// dividing `|A|`. Each cyclic factor is CRT-split and the point follows;
/// the per-prime output is in shape normal form.
pub fn primary_decompose(g: &GeneralPointedGroup) -> BTreeMap<u64, PointedGroup> {
    // Per prime: (exponent, residue) in factor order, then a stable sort by
    // exponent so the layout is deterministic.
    let mut per_prime: BTreeMap<u64, Vec<(u32, u64)>> = BTreeMap::new();
    for (&order, &coord) in g.orders.iter().zip(&g.point) {
        for (q, a) in factorize(order) {
            let m = q.pow(a);
            per_prime.entry(q).or_default().push((a, coord % m));
        }
    }
    per_prime
        .into_iter()
        .map(|(q, mut parts)| {
            parts.sort_by_key(|&(a, _)| a);
            let mut blocks: Vec<(u32, u32)> = Vec::new();
            let mut coords: Vec<Vec<u64>> = Vec::new();
            for (a, residue) in parts {
                match blocks.last_mut() {
                    Some(last) if last.0 == a => {
                        last.1 += 1;
                        coords.last_mut().unwrap().push(residue);
                    }
                    _ => {
                        blocks.push((a, 1));
                        coords.push(vec![residue]);
                    }
                }
            }
            let shape = GroupShape::new(q, blocks).expect("primary parts form a valid shape");
            let point = shape.element(coords).expect("residues conform to the shape");
            (q, PointedGroup::new(shape, point).unwrap())
        })
        .collect()
}

/// Whether two general pointed groups are isomorphic: primary parts must
/// agree prime by prime, both in shape and in canonical index sequence.
pub fn pointed_isomorphic(g: &GeneralPointedGroup, h: &GeneralPointedGroup) -> bool {
    let dg = primary_decompose(g);
    let dh = primary_decompose(h);
    if dg.len() != dh.len() {
        return false;
    }
    for ((qg, pg), (qh, ph)) in dg.iter().zip(dh.iter()) {
        if qg != qh || pg.shape() != ph.shape() {
            return false;
        }
        if canonicalize(pg) != canonicalize(ph) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn shape(q: u64, blocks: &[(u32, u32)]) -> GroupShape {
        GroupShape::new(q, blocks.to_vec()).unwrap()
    }

    fn seq(pairs: &[(usize, u32)], exponents: &[u32]) -> IndexSequence {
        IndexSequence::new(pairs.to_vec(), exponents.to_vec()).unwrap()
    }

    /// All shapes for the prime `q` with order exactly `q^n`.
    fn shapes_of_exponent(q: u64, n: u32) -> Vec<GroupShape> {
        enumerate_pointed_groups(q, n)
            .unwrap()
            .into_iter()
            .map(|(s, _)| s)
            .fold(Vec::new(), |mut acc, s| {
                if acc.last() != Some(&s) {
                    acc.push(s);
                }
                acc
            })
    }

    #[test]
    fn index_sequences_single_block_e1() {
        let seqs = enumerate_index_sequences(&[1]).unwrap();
        assert_eq!(seqs, vec![seq(&[], &[1]), seq(&[(1, 0)], &[1])]);
    }

    #[test]
    fn index_sequences_single_block_e2() {
        let seqs = enumerate_index_sequences(&[2]).unwrap();
        assert_eq!(
            seqs,
            vec![seq(&[], &[2]), seq(&[(1, 0)], &[2]), seq(&[(1, 1)], &[2])]
        );
    }

    #[test]
    fn index_sequences_e1_e2() {
        let seqs = enumerate_index_sequences(&[1, 2]).unwrap();
        assert_eq!(
            seqs,
            vec![
                seq(&[], &[1, 2]),
                seq(&[(1, 0)], &[1, 2]),
                seq(&[(2, 0)], &[1, 2]),
                seq(&[(2, 1)], &[1, 2]),
            ]
        );
        // ((1,0),(2,1)) violates the gap condition: f2-f1 = 1 is not < 1.
        assert!(IndexSequence::new(vec![(1, 0), (2, 1)], vec![1, 2]).is_err());
    }

    #[test]
    fn index_sequences_reject_bad_exponents() {
        assert!(enumerate_index_sequences(&[2, 2]).is_err());
        assert!(enumerate_index_sequences(&[3, 1]).is_err());
        assert!(enumerate_index_sequences(&[0]).is_err());
        assert!(count_index_sequences(&[2, 1]).is_err());
    }

    #[test]
    fn count_matches_enumeration() {
        for exps in [
            vec![1],
            vec![2],
            vec![1, 2],
            vec![3],
            vec![1, 3],
            vec![2, 5],
            vec![1, 2, 4],
            vec![1, 3, 5, 9],
            vec![2, 3, 7],
        ] {
            assert_eq!(
                count_index_sequences(&exps).unwrap(),
                enumerate_index_sequences(&exps).unwrap().len() as u128,
                "{exps:?}"
            );
        }
    }

    #[test]
    fn orbit_representative_examples() {
        let s2 = shape(2, &[(1, 1), (3, 1)]);
        let rep = orbit_representative(&seq(&[(1, 0), (2, 1)], &[1, 3]), &s2).unwrap();
        assert_eq!(rep.coords(), &[vec![1], vec![2]]);

        let empty = orbit_representative(&seq(&[], &[1, 3]), &s2).unwrap();
        assert!(empty.is_zero());

        let s3 = shape(3, &[(1, 2), (2, 2), (5, 1), (9, 1)]);
        let rep =
            orbit_representative(&seq(&[(2, 1), (3, 3), (4, 5)], &[1, 2, 5, 9]), &s3).unwrap();
        assert_eq!(
            rep.coords(),
            &[vec![0, 0], vec![3, 0], vec![27], vec![243]]
        );
    }

    #[test]
    fn orbit_representative_rejects_mismatched_context() {
        let s = shape(2, &[(1, 1), (3, 1)]);
        let wrong = seq(&[(1, 0)], &[1, 2]);
        assert_eq!(
            orbit_representative(&wrong, &s),
            Err(AbelianError::ContextMismatch)
        );
    }

    #[test]
    fn canonicalize_zero() {
        let s = shape(2, &[(1, 1), (2, 1)]);
        let g = PointedGroup::new(s.clone(), s.zero()).unwrap();
        assert_eq!(canonicalize(&g), seq(&[], &[1, 2]));
    }

    #[test]
    fn canonicalize_z2_z4() {
        // (1,1) in Z2+Z4: valuations (0,0); f2-f1 <= 0 drops term 1.
        let s = shape(2, &[(1, 1), (2, 1)]);
        let p = s.element(vec![vec![1], vec![1]]).unwrap();
        let g = PointedGroup::new(s, p).unwrap();
        assert_eq!(canonicalize(&g), seq(&[(2, 0)], &[1, 2]));
    }

    #[test]
    fn canonicalize_z2_z8() {
        let s = shape(2, &[(1, 1), (3, 1)]);
        let p = s.element(vec![vec![1], vec![2]]).unwrap();
        let g = PointedGroup::new(s, p).unwrap();
        assert_eq!(canonicalize(&g), seq(&[(1, 0), (2, 1)], &[1, 3]));
    }

    #[test]
    fn count_pointed_groups_values() {
        assert_eq!(count_pointed_groups(0), 1);
        assert_eq!(count_pointed_groups(2), 5);
        assert_eq!(count_pointed_groups(3), 10);
        // Cross-check the n=3 split: |I(3)| + |I(1,2)| + |I(1)| = 4 + 4 + 2.
        assert_eq!(count_index_sequences(&[3]).unwrap(), 4);
        assert_eq!(count_index_sequences(&[1, 2]).unwrap(), 4);
        assert_eq!(count_index_sequences(&[1]).unwrap(), 2);
    }

    #[test]
    fn count_agrees_with_convolution_up_to_30() {
        for n in 0..=30 {
            assert_eq!(
                count_pointed_groups(n),
                crate::partitions::a000712(n),
                "n={n}"
            );
        }
    }

    #[test]
    fn enumerate_pointed_groups_examples() {
        let two = enumerate_pointed_groups(2, 1).unwrap();
        assert_eq!(
            two,
            vec![
                (shape(2, &[(1, 1)]), seq(&[], &[1])),
                (shape(2, &[(1, 1)]), seq(&[(1, 0)], &[1])),
            ]
        );

        let trivial = enumerate_pointed_groups(3, 0).unwrap();
        assert_eq!(trivial.len(), 1);
        assert!(trivial[0].0.blocks().is_empty());
        assert!(trivial[0].1.is_empty());

        assert_eq!(enumerate_pointed_groups(2, 2).unwrap().len(), 5);
        assert!(enumerate_pointed_groups(4, 1).is_err());
    }

    #[test]
    fn enumeration_length_independent_of_q() {
        for n in 0..=6u32 {
            let want = count_pointed_groups(n);
            for q in [2u64, 3, 5] {
                assert_eq!(
                    enumerate_pointed_groups(q, n).unwrap().len() as u128,
                    want,
                    "q={q} n={n}"
                );
            }
        }
    }

    #[test]
    fn primary_decompose_z6() {
        let g = GeneralPointedGroup::new(vec![6], vec![5]).unwrap();
        let d = primary_decompose(&g);
        assert_eq!(d.len(), 2);
        assert_eq!(d[&2].shape(), &shape(2, &[(1, 1)]));
        assert_eq!(d[&2].point().coords(), &[vec![1]]);
        assert_eq!(d[&3].shape(), &shape(3, &[(1, 1)]));
        assert_eq!(d[&3].point().coords(), &[vec![2]]);
    }

    #[test]
    fn primary_decompose_already_primary() {
        let g = GeneralPointedGroup::new(vec![4], vec![2]).unwrap();
        let d = primary_decompose(&g);
        assert_eq!(d.len(), 1);
        assert_eq!(d[&2].shape(), &shape(2, &[(2, 1)]));
        assert_eq!(d[&2].point().coords(), &[vec![2]]);
    }

    #[test]
    fn primary_decompose_z12_z2() {
        let g = GeneralPointedGroup::new(vec![12, 2], vec![6, 1]).unwrap();
        let d = primary_decompose(&g);
        assert_eq!(d.len(), 2);
        // 2-part: Z4 (from 12) and Z2, normal form Z2+Z4 with point (1; 2).
        assert_eq!(d[&2].shape(), &shape(2, &[(1, 1), (2, 1)]));
        assert_eq!(d[&2].point().coords(), &[vec![1], vec![2]]);
        assert_eq!(d[&3].shape(), &shape(3, &[(1, 1)]));
        assert_eq!(d[&3].point().coords(), &[vec![0]]);
    }

    /// Chinese-remainder recombination: walking the same stable layout that
    /// `primary_decompose` uses must reproduce every original coordinate.
    #[test]
    fn primary_decompose_recombines() {
        let cases = vec![
            GeneralPointedGroup::new(vec![6], vec![5]).unwrap(),
            GeneralPointedGroup::new(vec![12, 2], vec![6, 1]).unwrap(),
            GeneralPointedGroup::new(vec![60, 10, 9], vec![37, 7, 5]).unwrap(),
            GeneralPointedGroup::new(vec![8, 12, 18], vec![3, 11, 17]).unwrap(),
            GeneralPointedGroup::trivial(),
        ];
        for g in cases {
            let d = primary_decompose(&g);
            // Rebuild the per-prime residue streams in layout order.
            let mut streams: BTreeMap<u64, Vec<u64>> = d
                .iter()
                .map(|(&q, pg)| {
                    let flat: Vec<u64> =
                        pg.point().coords().iter().flatten().copied().collect();
                    (q, flat)
                })
                .collect();
            // Emulate the stable layout: factor t contributes its residue at
            // the position of its exponent among equal-prime factors.
            let mut claims: BTreeMap<u64, Vec<(u32, usize)>> = BTreeMap::new();
            for (t, &order) in g.orders().iter().enumerate() {
                for (q, a) in factorize(order) {
                    claims.entry(q).or_default().push((a, t));
                }
            }
            let mut recovered = vec![(1u64, 0u64); g.orders().len()]; // (modulus, residue) via CRT
            for (q, mut list) in claims {
                list.sort_by_key(|&(a, _)| a);
                let stream = streams.remove(&q).unwrap();
                assert_eq!(stream.len(), list.len());
                for ((a, t), residue) in list.into_iter().zip(stream) {
                    let m = q.pow(a);
                    let (acc_m, acc_r) = recovered[t];
                    // CRT combine (moduli coprime).
                    let mut r = acc_r;
                    while r % m != residue {
                        r += acc_m;
                    }
                    recovered[t] = (acc_m * m, r);
                }
            }
            for (t, &(m, r)) in recovered.iter().enumerate() {
                assert_eq!(m, g.orders()[t]);
                assert_eq!(r, g.point()[t]);
            }
        }
    }

    #[test]
    fn pointed_isomorphic_examples() {
        let a = GeneralPointedGroup::new(vec![3], vec![1]).unwrap();
        let b = GeneralPointedGroup::new(vec![3], vec![2]).unwrap();
        let z = GeneralPointedGroup::new(vec![3], vec![0]).unwrap();
        assert!(pointed_isomorphic(&a, &b));
        assert!(!pointed_isomorphic(&z, &a));

        let g = GeneralPointedGroup::new(vec![4, 2], vec![1, 1]).unwrap();
        let h = GeneralPointedGroup::new(vec![4, 2], vec![1, 0]).unwrap();
        assert!(pointed_isomorphic(&g, &h));
    }

    #[test]
    fn pointed_isomorphic_detects_factor_regrouping() {
        let a = GeneralPointedGroup::new(vec![6], vec![5]).unwrap();
        let b = GeneralPointedGroup::new(vec![2, 3], vec![1, 2]).unwrap();
        assert!(pointed_isomorphic(&a, &b));
    }

    #[test]
    fn canonical_rep_round_trip_small_shapes() {
        // canonicalize(orbit_representative(s)) = s over all shapes with
        // order at most 3^5, for q in {2, 3, 5}.
        for q in [2u64, 3, 5] {
            let mut n = 0u32;
            loop {
                let order = (q as u128).pow(n);
                if order > 243 {
                    break;
                }
                for s in shapes_of_exponent(q, n) {
                    for is in enumerate_index_sequences(&s.exponents()).unwrap() {
                        let rep = orbit_representative(&is, &s).unwrap();
                        let g = PointedGroup::new(s.clone(), rep).unwrap();
                        assert_eq!(canonicalize(&g), is, "q={q} shape={s}");
                    }
                }
                n += 1;
            }
        }
    }

    #[test]
    fn reduction_is_confluent_under_random_orders() {
        let mut rng = StdRng::seed_from_u64(0x9e3779b97f4a7c15);
        for q in [2u64, 3] {
            let max_n = if q == 2 { 7 } else { 5 };
            for n in 0..=max_n {
                for s in shapes_of_exponent(q, n) {
                    let count = s.order().unwrap() as usize;
                    for idx in 0..count {
                        let el = s.element_from_index(idx);
                        let g = PointedGroup::new(s.clone(), el).unwrap();
                        let canonical = canonicalize(&g);
                        // Rebuild the pre-reduction pairs and reduce with a
                        // randomized choice of violation each step.
                        let mut pairs: Vec<(usize, u32)> = Vec::new();
                        for (b, block) in g.point().coords().iter().enumerate() {
                            let t =
                                block.iter().filter_map(|&c| valuation(q, c)).min();
                            if let Some(t) = t {
                                pairs.push((b + 1, t));
                            }
                        }
                        let reduced = reduce_pairs(pairs, &s.exponents(), |n| {
                            rng.gen_range(0..n)
                        });
                        assert_eq!(reduced, canonical.pairs(), "shape={s} idx={idx}");
                    }
                }
            }
        }
    }

    #[test]
    fn shape_text_round_trips() {
        let s = shape(3, &[(1, 2), (2, 2), (5, 1), (9, 1)]);
        assert_eq!(s.to_string(), "q=3;1^2,2^2,5,9");
        assert_eq!("q=3;1^2,2^2,5,9".parse::<GroupShape>().unwrap(), s);
        assert_eq!("q=3;2^2,1^2,9,5".parse::<GroupShape>().unwrap(), s);

        let t = shape(2, &[]);
        assert_eq!(t.to_string(), "q=2;");
        assert_eq!("q=2;".parse::<GroupShape>().unwrap(), t);
        assert_eq!("q=2".parse::<GroupShape>().unwrap(), t);

        assert!("q=4;1".parse::<GroupShape>().is_err());
        assert!("3;1".parse::<GroupShape>().is_err());
    }

    #[test]
    fn element_text_round_trips() {
        let s = shape(3, &[(1, 2), (2, 2), (5, 1), (9, 1)]);
        let e = s.parse_element("0,0;3,0;27;243").unwrap();
        assert_eq!(s.format_element(&e), "0,0;3,0;27;243");
        assert!(s.parse_element("0,0;3,0;27").is_err());

        let t = shape(2, &[]);
        assert!(t.parse_element("").unwrap().is_zero());
    }

    #[test]
    fn index_sequence_text_round_trips() {
        let is = seq(&[(2, 1), (3, 3), (4, 5)], &[1, 2, 5, 9]);
        assert_eq!(is.to_string(), "(2,1)(3,3)(4,5)");
        assert_eq!(
            IndexSequence::parse("(2,1)(3,3)(4,5)", vec![1, 2, 5, 9]).unwrap(),
            is
        );
        let empty = seq(&[], &[1, 2]);
        assert_eq!(empty.to_string(), "()");
        assert_eq!(IndexSequence::parse("()", vec![1, 2]).unwrap(), empty);
        assert!(IndexSequence::parse("(0,0)", vec![1, 2]).is_err());
    }

    #[test]
    fn element_indexing_round_trips() {
        let s = shape(2, &[(1, 2), (2, 1)]);
        let count = s.order().unwrap() as usize;
        assert_eq!(count, 16);
        for idx in 0..count {
            let e = s.element_from_index(idx);
            assert_eq!(s.element_index(&e), idx);
        }
    }

    fn arb_shape() -> impl Strategy<Value = GroupShape> {
        let qs = prop_oneof![Just(2u64), Just(3u64), Just(5u64)];
        (qs, 0u32..=6).prop_map(|(q, n)| {
            // Deterministic pick: the first shape of that exponent sum.
            let shapes = shapes_of_exponent(q, n);
            shapes[0].clone()
        })
    }

    proptest! {
        #[test]
        fn prop_canonical_round_trip(s in arb_shape(), pick in 0usize..1000) {
            let seqs = enumerate_index_sequences(&s.exponents()).unwrap();
            let is = &seqs[pick % seqs.len()];
            let rep = orbit_representative(is, &s).unwrap();
            let g = PointedGroup::new(s.clone(), rep).unwrap();
            prop_assert_eq!(&canonicalize(&g), is);
        }
    }
}
