//! Finite quandles as Cayley tables, and the Galkin construction.
//!
//! A quandle is a set with an operation `*` that is idempotent
//! (`x*x = x`), right-invertible (each `x -> x*y` is a permutation), and
//! right self-distributive (`(x*y)*z = (x*z)*(y*z)`). The Galkin quandle of
//! a pointed abelian group `(A, c)` lives on `Z3 x A` with
//!
//! ```text
//! (x,a) * (y,b) = (-x-y, -a + mu(x-y) b + tau(x-y) c)
//! ```
//!
//! where `mu(0) = 2`, `mu(1) = mu(2) = -1`, `tau(2) = 1`, `tau(0) = tau(1) = 0`.
//!
//! Table file formats: the text form is a line with `n` followed by `n`
//! rows of `n` space-separated indices, `table[x][y] = x*y`; the JSON form
//! mirrors it with fields `size`, `table`, and optional `labels`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::GeneralPointedGroup;

/// Largest group order accepted by [`galkin`]; the table has `(3|A|)^2`
/// entries, so this caps memory at a few hundred megabytes.
pub const MAX_GALKIN_GROUP_ORDER: u128 = 1024;

/// Structural problems with a table, before any axiom is considered.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("table is empty")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("entry at ({x},{y}) is {value}, out of range for size {size}")]
    EntryOutOfRange {
        x: usize,
        y: usize,
        value: usize,
        size: usize,
    },
}

/// The first axiom violation found, with a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomViolation {
    /// Axiom (i) fails: `x*x != x`.
    Idempotence { x: usize },
    /// Axiom (ii) fails: the right translation by `y` is not injective,
    /// witnessed by `x1 < x2` with `x1*y = x2*y`.
    RightTranslation { y: usize, x1: usize, x2: usize },
    /// Axiom (iii) fails: `(x*y)*z != (x*z)*(y*z)`.
    SelfDistributivity { x: usize, y: usize, z: usize },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AxiomViolation::Idempotence { x } => write!(f, "axiom i x={x}"),
            AxiomViolation::RightTranslation { y, x1, x2 } => {
                write!(f, "axiom ii y={y} x1={x1} x2={x2}")
            }
            AxiomViolation::SelfDistributivity { x, y, z } => {
                write!(f, "axiom iii x={x} y={y} z={z}")
            }
        }
    }
}

/// Outcome of an axiom check on a structurally valid table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(AxiomViolation),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuandleError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("table violates {0}")]
    Axiom(AxiomViolation),
    #[error("group of order {0} is too large for the Galkin construction")]
    GroupTooLarge(u128),
    #[error("quandle carries no group labels")]
    NotGalkin,
    #[error("map is not a group homomorphism")]
    NotHomomorphism,
    #[error("map sends the distinguished element to the wrong point")]
    PointMismatch,
    #[error("cannot parse table: {0}")]
    Parse(String),
}

/// Group context attached to a Galkin-constructed quandle: the cyclic
/// factor orders of `A`, the distinguished element `c`, and the `(x, a)`
/// label of every quandle element in index order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GalkinLabels {
    pub orders: Vec<u64>,
    pub point: Vec<u64>,
    pub elements: Vec<(u8, Vec<u64>)>,
}

/// A finite quandle: an `n x n` Cayley table over element indices
/// `0..n`, `table[x][y] = x*y`, with the three axioms holding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuandle {
    size: usize,
    table: Vec<usize>,
    labels: Option<GalkinLabels>,
}

fn validate_structure(rows: &[Vec<usize>]) -> Result<(), TableError> {
    let n = rows.len();
    if n == 0 {
        return Err(TableError::Empty);
    }
    for (x, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(TableError::NotSquare {
                row: x,
                len: row.len(),
                expected: n,
            });
        }
        for (y, &v) in row.iter().enumerate() {
            if v >= n {
                return Err(TableError::EntryOutOfRange {
                    x,
                    y,
                    value: v,
                    size: n,
                });
            }
        }
    }
    Ok(())
}

fn check_axioms(n: usize, table: &[usize]) -> Verdict {
    let at = |x: usize, y: usize| table[x * n + y];
    for x in 0..n {
        if at(x, x) != x {
            return Verdict::Fail(AxiomViolation::Idempotence { x });
        }
    }
    for y in 0..n {
        let mut seen = vec![usize::MAX; n];
        for x in 0..n {
            let v = at(x, y);
            if seen[v] != usize::MAX {
                return Verdict::Fail(AxiomViolation::RightTranslation {
                    y,
                    x1: seen[v],
                    x2: x,
                });
            }
            seen[v] = x;
        }
    }
    for x in 0..n {
        for y in 0..n {
            let xy = at(x, y);
            for z in 0..n {
                if at(xy, z) != at(at(x, z), at(y, z)) {
                    return Verdict::Fail(AxiomViolation::SelfDistributivity { x, y, z });
                }
            }
        }
    }
    Verdict::Pass
}

/// Checks the three quandle axioms on a table given as rows.
///
/// Structural problems (non-square rows, out-of-range entries) are errors;
/// an in-range table yields a [`Verdict`] naming the first violated axiom
/// and a witness, with axioms checked in order (i), (ii), (iii) and
/// witnesses scanned in ascending index order.
pub fn is_quandle(rows: &[Vec<usize>]) -> Result<Verdict, TableError> {
    validate_structure(rows)?;
    let n = rows.len();
    let flat: Vec<usize> = rows.iter().flatten().copied().collect();
    Ok(check_axioms(n, &flat))
}

impl FiniteQuandle {
    /// Builds a quandle from rows, validating structure and all axioms.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self, QuandleError> {
        validate_structure(&rows)?;
        let size = rows.len();
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        match check_axioms(size, &table) {
            Verdict::Pass => Ok(FiniteQuandle {
                size,
                table,
                labels: None,
            }),
            Verdict::Fail(v) => Err(QuandleError::Axiom(v)),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `x * y`.
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.size + y]
    }

    pub fn labels(&self) -> Option<&GalkinLabels> {
        self.labels.as_ref()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.size)
            .map(|x| self.table[x * self.size..(x + 1) * self.size].to_vec())
            .collect()
    }

    /// Text form: `n`, then `n` rows of `n` space-separated indices.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.size);
        for x in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|y| self.op(x, y).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let file = QuandleFile {
            size: self.size,
            table: self.rows(),
            labels: self.labels.clone(),
        };
        serde_json::to_string_pretty(&file).expect("quandle serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct QuandleFile {
    size: usize,
    table: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<GalkinLabels>,
}

/// Parses the text table form into rows (no axiom check).
pub fn parse_table_text(text: &str) -> Result<Vec<Vec<usize>>, QuandleError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| QuandleError::Parse("empty input".into()))?
        .trim()
        .parse()
        .map_err(|_| QuandleError::Parse("first line must be the size".into()))?;
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| QuandleError::Parse(format!("bad entry in row {i}")))?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err(QuandleError::Parse(format!(
            "expected {n} rows, found {}",
            rows.len()
        )));
    }
    Ok(rows)
}

/// Parses either table format into rows: JSON if the input starts with
/// `{`, the plain text form otherwise.
pub fn parse_table_any(text: &str) -> Result<(Vec<Vec<usize>>, Option<GalkinLabels>), QuandleError>
{
    if text.trim_start().starts_with('{') {
        let file: QuandleFile =
            serde_json::from_str(text).map_err(|e| QuandleError::Parse(e.to_string()))?;
        if file.table.len() != file.size {
            return Err(QuandleError::Parse(
                "size field disagrees with table".into(),
            ));
        }
        Ok((file.table, file.labels))
    } else {
        Ok((parse_table_text(text)?, None))
    }
}

/// Loads a quandle from either file format, validating the axioms.
pub fn quandle_from_str(text: &str) -> Result<FiniteQuandle, QuandleError> {
    let (rows, labels) = parse_table_any(text)?;
    let mut q = FiniteQuandle::from_table(rows)?;
    q.labels = labels;
    Ok(q)
}

fn mu(d: u8) -> i128 {
    if d == 0 {
        2
    } else {
        -1
    }
}

fn tau(d: u8) -> i128 {
    if d == 2 {
        1
    } else {
        0
    }
}

/// The Galkin quandle `G(A, c)` of a pointed abelian group.
///
/// Elements are the pairs `(x, a)` in `Z3 x A`, indexed lexicographically
/// by `x` first and then the coordinates of `a`; the table is filled from
/// the defining operation, which satisfies the axioms for every `(A, c)`.
/// The returned quandle carries labels recording the group context.
pub fn galkin(group: &GeneralPointedGroup) -> Result<FiniteQuandle, QuandleError> {
    let order = group
        .order()
        .ok_or(QuandleError::GroupTooLarge(u128::MAX))?;
    if order > MAX_GALKIN_GROUP_ORDER {
        return Err(QuandleError::GroupTooLarge(order));
    }
    let a_count = order as usize;
    let orders = group.orders();
    let factor_count = orders.len();

    // Group elements in lexicographic coordinate order (leftmost
    // coordinate most significant).
    let mut group_elements: Vec<Vec<u64>> = Vec::with_capacity(a_count);
    for mut idx in 0..a_count {
        let mut coords = vec![0u64; factor_count];
        for t in (0..factor_count).rev() {
            let m = orders[t] as usize;
            coords[t] = (idx % m) as u64;
            idx /= m;
        }
        group_elements.push(coords);
    }

    let encode = |coords: &[u64]| -> usize {
        let mut idx: usize = 0;
        for (t, &c) in coords.iter().enumerate() {
            idx = idx * orders[t] as usize + c as usize;
        }
        idx
    };

    let n = 3 * a_count;
    let mut table = vec![0usize; n * n];
    let c = group.point();
    for x in 0..3u8 {
        for (ai, a) in group_elements.iter().enumerate() {
            let row_base = (x as usize * a_count + ai) * n;
            for y in 0..3u8 {
                let d = (x + 3 - y) % 3;
                let (m, t) = (mu(d), tau(d));
                let zx = ((6 - x - y) % 3) as usize;
                for (bi, b) in group_elements.iter().enumerate() {
                    let coords: Vec<u64> = (0..factor_count)
                        .map(|j| {
                            let v = -(a[j] as i128) + m * b[j] as i128 + t * c[j] as i128;
                            v.rem_euclid(orders[j] as i128) as u64
                        })
                        .collect();
                    table[row_base + y as usize * a_count + bi] = zx * a_count + encode(&coords);
                }
            }
        }
    }

    let mut elements = Vec::with_capacity(n);
    for x in 0..3u8 {
        for a in &group_elements {
            elements.push((x, a.clone()));
        }
    }

    Ok(FiniteQuandle {
        size: n,
        table,
        labels: Some(GalkinLabels {
            orders: orders.to_vec(),
            point: c.to_vec(),
            elements,
        }),
    })
}

/// The dual table: `inv[x*y][y] = x`, i.e. the operation `*^{-1}` with
/// `(x*y)*^{-1}y = x`. The dual of a quandle is again a quandle.
pub fn right_inverse(q: &FiniteQuandle) -> FiniteQuandle {
    let n = q.size;
    let mut table = vec![0usize; n * n];
    for y in 0..n {
        for x in 0..n {
            table[q.op(x, y) * n + y] = x;
        }
    }
    FiniteQuandle {
        size: n,
        table,
        labels: None,
    }
}

/// A map between quandle element index spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuandleMap {
    domain: usize,
    codomain: usize,
    values: Vec<usize>,
}

impl QuandleMap {
    pub fn new(domain: usize, codomain: usize, values: Vec<usize>) -> Option<Self> {
        if values.len() != domain || values.iter().any(|&v| v >= codomain) {
            return None;
        }
        Some(QuandleMap {
            domain,
            codomain,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        QuandleMap {
            domain: n,
            codomain: n,
            values: (0..n).collect(),
        }
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `other` after `self` (so `self` is applied first).
    pub fn then(&self, other: &QuandleMap) -> Option<QuandleMap> {
        if self.codomain != other.domain {
            return None;
        }
        Some(QuandleMap {
            domain: self.domain,
            codomain: other.codomain,
            values: self.values.iter().map(|&v| other.values[v]).collect(),
        })
    }

    /// Whether `h(u*v) = h(u)*h(v)` holds for all pairs.
    pub fn is_homomorphism(&self, from: &FiniteQuandle, to: &FiniteQuandle) -> bool {
        if self.domain != from.size || self.codomain != to.size {
            return false;
        }
        for u in 0..from.size {
            for v in 0..from.size {
                if self.values[from.op(u, v)] != to.op(self.values[u], self.values[v]) {
                    return false;
                }
            }
        }
        true
    }
}

fn add_in(orders: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    orders
        .iter()
        .zip(a.iter().zip(b))
        .map(|(&m, (&x, &y))| ((x as u128 + y as u128) % m as u128) as u64)
        .collect()
}

/// The quandle homomorphism `(x, a) -> (x, f(a))` induced by a morphism of
/// pointed groups.
///
/// `f` is given on coordinates of the domain group; it must be a group
/// homomorphism (checked exhaustively) sending the domain's distinguished
/// element to the codomain's. Both quandles must carry Galkin labels.
pub fn induced_hom<F>(
    f: F,
    from: &FiniteQuandle,
    to: &FiniteQuandle,
) -> Result<QuandleMap, QuandleError>
where
    F: Fn(&[u64]) -> Vec<u64>,
{
    let from_labels = from.labels().ok_or(QuandleError::NotGalkin)?;
    let to_labels = to.labels().ok_or(QuandleError::NotGalkin)?;
    let orders_to = &to_labels.orders;

    let normalize = |coords: Vec<u64>| -> Result<Vec<u64>, QuandleError> {
        if coords.len() != orders_to.len() {
            return Err(QuandleError::NotHomomorphism);
        }
        Ok(coords
            .into_iter()
            .zip(orders_to)
            .map(|(c, &m)| c % m)
            .collect())
    };

    // Domain group elements are the labels of the x = 0 slice.
    let a_count = from.size / 3;
    let domain_elements: Vec<&Vec<u64>> = from_labels.elements[..a_count]
        .iter()
        .map(|(_, a)| a)
        .collect();

    // f must be additive and must respect the distinguished elements.
    let orders_from = &from_labels.orders;
    for a in &domain_elements {
        for b in &domain_elements {
            let sum = add_in(orders_from, a, b);
            let lhs = normalize(f(&sum))?;
            let rhs = add_in(orders_to, &normalize(f(a))?, &normalize(f(b))?);
            if lhs != rhs {
                return Err(QuandleError::NotHomomorphism);
            }
        }
    }
    if normalize(f(&from_labels.point))? != to_labels.point {
        return Err(QuandleError::PointMismatch);
    }

    let mut index_of: HashMap<(u8, Vec<u64>), usize> = HashMap::new();
    for (i, (x, a)) in to_labels.elements.iter().enumerate() {
        index_of.insert((*x, a.clone()), i);
    }

    let values = from_labels
        .elements
        .iter()
        .map(|(x, a)| {
            let image = normalize(f(a))?;
            index_of
                .get(&(*x, image))
                .copied()
                .ok_or(QuandleError::NotHomomorphism)
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(QuandleMap {
        domain: from.size,
        codomain: to.size,
        values,
    })
}

fn cycle_type(q: &FiniteQuandle, y: usize) -> Vec<usize> {
    let n = q.size;
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = q.op(x, y);
            len += 1;
        }
        cycles.push(len);
    }
    cycles.sort_unstable();
    cycles
}

/// Joint color refinement over both element sets. Starts from the cycle
/// type of each right translation and refines by the multiset of color
/// triples `(color(v), color(u*v), color(v*u))` until stable. Colors are
/// comparable across the two quandles; as an isomorphism invariant this
/// only ever separates elements that no isomorphism can identify.
fn joint_colors(a: &FiniteQuandle, b: &FiniteQuandle) -> Option<(Vec<usize>, Vec<usize>)> {
    use std::collections::BTreeMap;

    let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let assign = |key: Vec<usize>, ids: &mut BTreeMap<Vec<usize>, usize>| -> usize {
        let next = ids.len();
        *ids.entry(key).or_insert(next)
    };
    let mut ca: Vec<usize> = (0..a.size)
        .map(|y| assign(cycle_type(a, y), &mut ids))
        .collect();
    let mut cb: Vec<usize> = (0..b.size)
        .map(|y| assign(cycle_type(b, y), &mut ids))
        .collect();

    let mut distinct = ids.len();
    loop {
        let mut next_ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let refine = |q: &FiniteQuandle,
                      colors: &[usize],
                      next_ids: &mut BTreeMap<Vec<usize>, usize>|
         -> Vec<usize> {
            (0..q.size)
                .map(|u| {
                    let mut key = vec![colors[u]];
                    let mut triples: Vec<[usize; 3]> = (0..q.size)
                        .map(|v| [colors[v], colors[q.op(u, v)], colors[q.op(v, u)]])
                        .collect();
                    triples.sort_unstable();
                    for t in triples {
                        key.extend_from_slice(&t);
                    }
                    let next = next_ids.len();
                    *next_ids.entry(key).or_insert(next)
                })
                .collect()
        };
        let na = refine(a, &ca, &mut next_ids);
        let nb = refine(b, &cb, &mut next_ids);
        let now = next_ids.len();
        ca = na;
        cb = nb;
        if now == distinct {
            break;
        }
        distinct = now;
    }

    // Per-color population must match for an isomorphism to exist.
    let mut count_a: BTreeMap<usize, usize> = BTreeMap::new();
    let mut count_b: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &ca {
        *count_a.entry(c).or_insert(0) += 1;
    }
    for &c in &cb {
        *count_b.entry(c).or_insert(0) += 1;
    }
    if count_a != count_b {
        return None;
    }
    Some((ca, cb))
}

struct IsoSearch<'a> {
    a: &'a FiniteQuandle,
    b: &'a FiniteQuandle,
    colors: Option<(Vec<usize>, Vec<usize>)>,
    h: Vec<Option<usize>>,
    used: Vec<bool>,
    assigned: Vec<usize>,
}

impl<'a> IsoSearch<'a> {
    fn set(&mut self, u: usize, w: usize) -> bool {
        if self.used[w] {
            return false;
        }
        if let Some((ca, cb)) = &self.colors {
            if ca[u] != cb[w] {
                return false;
            }
        }
        self.h[u] = Some(w);
        self.used[w] = true;
        self.assigned.push(u);
        true
    }

    /// Assigns `h(u) = w` and propagates every consequence
    /// `h(p*r) = h(p)*h(r)` over assigned pairs. Returns false on
    /// conflict; the trail keeps whatever was assigned so the caller can
    /// roll back to its mark.
    fn assign(&mut self, u: usize, w: usize) -> bool {
        if !self.set(u, w) {
            return false;
        }
        let mut qi = self.assigned.len() - 1;
        while qi < self.assigned.len() {
            let u2 = self.assigned[qi];
            qi += 1;
            let mut vi = 0;
            while vi < self.assigned.len() {
                let v = self.assigned[vi];
                vi += 1;
                for (p, r) in [(u2, v), (v, u2)] {
                    let c = self.a.op(p, r);
                    let img = self.b.op(self.h[p].unwrap(), self.h[r].unwrap());
                    match self.h[c] {
                        Some(existing) => {
                            if existing != img {
                                return false;
                            }
                        }
                        None => {
                            if !self.set(c, img) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.assigned.len() > mark {
            let u = self.assigned.pop().unwrap();
            let w = self.h[u].take().unwrap();
            self.used[w] = false;
        }
    }

    fn dfs(&mut self) -> bool {
        let n = self.a.size;
        let Some(u) = (0..n).find(|&u| self.h[u].is_none()) else {
            // Fully assigned; confirm the homomorphism law outright.
            let values: Vec<usize> = self.h.iter().map(|v| v.unwrap()).collect();
            let map = QuandleMap {
                domain: n,
                codomain: n,
                values,
            };
            return map.is_homomorphism(self.a, self.b);
        };
        for w in 0..n {
            if self.used[w] {
                continue;
            }
            let mark = self.assigned.len();
            if self.assign(u, w) && self.dfs() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

fn iso_search(a: &FiniteQuandle, b: &FiniteQuandle, prune: bool) -> Option<Vec<usize>> {
    if a.size != b.size {
        return None;
    }
    let colors = if prune {
        Some(joint_colors(a, b)?)
    } else {
        None
    };
    let mut search = IsoSearch {
        a,
        b,
        colors,
        h: vec![None; a.size],
        used: vec![false; a.size],
        assigned: Vec::new(),
    };
    if search.dfs() {
        Some(search.h.into_iter().map(|v| v.unwrap()).collect())
    } else {
        None
    }
}

/// Searches for a quandle isomorphism, returning the image vector of the
/// first bijection found in canonical order (branching on the lowest
/// unassigned element, candidates ascending) or `None` after exhausting
/// the pruned search space. Pruning never discards a candidate that
/// extends to an isomorphism, so the result is search-order deterministic.
pub fn quandle_iso(a: &FiniteQuandle, b: &FiniteQuandle) -> Option<Vec<usize>> {
    iso_search(a, b, true)
}
