//! Exact Aut(A)-orbit computation, independent of the classification.
//!
//! Two routes are provided. [`brute_force_orbits`] closes the group under a
//! generating set of Aut(A) — block transvections, single-coordinate unit
//! scalings, and elementary cross-block homomorphisms — which handles every
//! group up to the size bound quickly. [`orbits_via_endomorphisms`] is the
//! literal route: it enumerates every endomorphism, keeps the bijections
//! (block-diagonal parts invertible), and closes orbits; its cost is
//! `|End(A)|`, so it is only usable on small shapes, where the tests check
//! that both routes produce identical orbit partitions.

use super::{AbelianError, GroupElement, GroupShape};

/// Default cap on `|A|` for the orbit oracle.
pub const DEFAULT_ORACLE_BOUND: u128 = 256;

fn oracle_bound_from_env() -> u128 {
    std::env::var("GALKINLAB_ORACLE_BOUND")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ORACLE_BOUND)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

/// A generating set of Aut(A) as permutations of element ranks.
fn generator_permutations(shape: &GroupShape) -> Vec<Vec<usize>> {
    let n = shape.element_count();
    let q = shape.q();
    let blocks = shape.blocks();
    let mut gens: Vec<Vec<usize>> = Vec::new();

    let mut push_gen = |apply: &dyn Fn(&mut Vec<Vec<u64>>)| {
        let mut perm = vec![0usize; n];
        for (idx, slot) in perm.iter_mut().enumerate() {
            let el = shape.element_from_index(idx);
            let mut coords: Vec<Vec<u64>> = el.coords().to_vec();
            apply(&mut coords);
            *slot = shape.element_index(&GroupElement { coords });
        }
        gens.push(perm);
    };

    // Transvections inside a block: add coordinate s onto coordinate r.
    for (b, &(_, mult)) in blocks.iter().enumerate() {
        let m = shape.modulus(b);
        for r in 0..mult as usize {
            for s in 0..mult as usize {
                if r == s {
                    continue;
                }
                push_gen(&|coords: &mut Vec<Vec<u64>>| {
                    let add = coords[b][s];
                    coords[b][r] = ((coords[b][r] as u128 + add as u128) % m as u128) as u64;
                });
            }
        }
    }

    // Unit scalings of a single coordinate.
    for (b, &(_, mult)) in blocks.iter().enumerate() {
        let m = shape.modulus(b);
        for r in 0..mult as usize {
            for u in 2..m {
                if u % q == 0 {
                    continue;
                }
                push_gen(&|coords: &mut Vec<Vec<u64>>| {
                    coords[b][r] = ((coords[b][r] as u128 * u as u128) % m as u128) as u64;
                });
            }
        }
    }

    // Elementary cross-block maps: id + (coordinate (i,r) -> coordinate
    // (j,s), scaled by q^{max(0, e_j - e_i)}). These are unipotent, hence
    // automorphisms, and their powers span the whole Hom(A_i, A_j) summand.
    for i in 0..blocks.len() {
        for j in 0..blocks.len() {
            if i == j {
                continue;
            }
            let (ei, ni) = blocks[i];
            let (ej, nj) = blocks[j];
            let mj = shape.modulus(j);
            let factor = q.pow(ej.saturating_sub(ei));
            for r in 0..ni as usize {
                for s in 0..nj as usize {
                    push_gen(&|coords: &mut Vec<Vec<u64>>| {
                        let add = (coords[i][r] as u128 * factor as u128) % mj as u128;
                        coords[j][s] = ((coords[j][s] as u128 + add) % mj as u128) as u64;
                    });
                }
            }
        }
    }

    gens
}

fn collect_orbits(shape: &GroupShape, dsu: &mut Dsu) -> Vec<Vec<GroupElement>> {
    dsu.classes()
        .into_iter()
        .map(|class| {
            class
                .into_iter()
                .map(|idx| shape.element_from_index(idx))
                .collect()
        })
        .collect()
}

/// The exact partition of `A` into Aut(A)-orbits, as a canonical list:
/// orbits sorted by their least element rank, elements sorted within.
///
/// The group size cap defaults to [`DEFAULT_ORACLE_BOUND`] and can be
/// overridden with the `GALKINLAB_ORACLE_BOUND` environment variable.
pub fn brute_force_orbits(shape: &GroupShape) -> Result<Vec<Vec<GroupElement>>, AbelianError> {
    brute_force_orbits_with_bound(shape, oracle_bound_from_env())
}

/// [`brute_force_orbits`] with an explicit size cap.
pub fn brute_force_orbits_with_bound(
    shape: &GroupShape,
    bound: u128,
) -> Result<Vec<Vec<GroupElement>>, AbelianError> {
    let order = shape.order().ok_or(AbelianError::OrderOverflow)?;
    if order > bound {
        return Err(AbelianError::SizeBound { order, bound });
    }
    let n = order as usize;
    let mut dsu = Dsu::new(n);
    for perm in generator_permutations(shape) {
        for (x, &y) in perm.iter().enumerate() {
            dsu.union(x, y);
        }
    }
    Ok(collect_orbits(shape, &mut dsu))
}

/// An endomorphism of a shaped group, stored blockwise: for each ordered
/// block pair `(i, j)` an `n_i x n_j` matrix of residues modulo `q^{e_j}`,
/// each entry divisible by `q^{max(0, e_j - e_i)}` — exactly the elements
/// of `Hom(Z_{q^{e_i}}, Z_{q^{e_j}})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    /// `coeffs[i][j][r][s]`: coefficient from coordinate `(i, r)` into
    /// coordinate `(j, s)`.
    coeffs: Vec<Vec<Vec<Vec<u64>>>>,
}

impl Endomorphism {
    /// Applies the endomorphism to an element of `shape`.
    pub fn apply(&self, shape: &GroupShape, x: &GroupElement) -> GroupElement {
        let blocks = shape.blocks();
        let mut out: Vec<Vec<u64>> = blocks
            .iter()
            .map(|&(_, n)| vec![0u64; n as usize])
            .collect();
        for (j, &(_, nj)) in blocks.iter().enumerate() {
            let mj = shape.modulus(j) as u128;
            for s in 0..nj as usize {
                let mut acc: u128 = 0;
                for (i, &(_, ni)) in blocks.iter().enumerate() {
                    for r in 0..ni as usize {
                        acc = (acc
                            + (self.coeffs[i][j][r][s] as u128
                                * x.coords()[i][r] as u128))
                            % mj;
                    }
                }
                out[j][s] = acc as u64;
            }
        }
        GroupElement { coords: out }
    }

    /// Bijectivity criterion: each diagonal block must be invertible over
    /// its ring, i.e. its determinant must be a unit mod `q^{e_i}`, which
    /// holds exactly when the matrix is nonsingular mod `q`.
    pub fn is_automorphism(&self, shape: &GroupShape) -> bool {
        let q = shape.q();
        for (i, &(_, ni)) in shape.blocks().iter().enumerate() {
            let n = ni as usize;
            let mut m: Vec<Vec<u64>> = (0..n)
                .map(|r| (0..n).map(|s| self.coeffs[i][i][r][s] % q).collect())
                .collect();
            if !nonsingular_mod_prime(&mut m, q) {
                return false;
            }
        }
        true
    }
}

fn nonsingular_mod_prime(m: &mut [Vec<u64>], q: u64) -> bool {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col] % q != 0);
        let Some(pivot) = pivot else { return false };
        m.swap(col, pivot);
        let inv = mod_inverse(m[col][col] % q, q);
        for r in col + 1..n {
            let factor = (m[r][col] % q * inv) % q;
            if factor == 0 {
                continue;
            }
            for c in col..n {
                let sub = (factor as u128 * m[col][c] as u128) % q as u128;
                m[r][c] = ((m[r][c] as u128 + q as u128 - sub) % q as u128) as u64;
            }
        }
    }
    true
}

fn mod_inverse(a: u64, q: u64) -> u64 {
    // Fermat: q is prime and a is nonzero mod q.
    let mut result: u128 = 1;
    let mut base = a as u128 % q as u128;
    let mut exp = q - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % q as u128;
        }
        base = base * base % q as u128;
        exp >>= 1;
    }
    result as u64
}

/// One slot of the endomorphism odometer: the allowed values are the
/// `q^{min(e_i, e_j)}` multiples of `q^{max(0, e_j - e_i)}` mod `q^{e_j}`.
struct Slot {
    i: usize,
    j: usize,
    r: usize,
    s: usize,
    step: u64,
    count: u64,
}

fn slots(shape: &GroupShape) -> Vec<Slot> {
    let q = shape.q();
    let blocks = shape.blocks();
    let mut out = Vec::new();
    for (i, &(ei, ni)) in blocks.iter().enumerate() {
        for (j, &(ej, nj)) in blocks.iter().enumerate() {
            let step = q.pow(ej.saturating_sub(ei));
            let count = q.pow(ei.min(ej));
            for r in 0..ni as usize {
                for s in 0..nj as usize {
                    out.push(Slot {
                        i,
                        j,
                        r,
                        s,
                        step,
                        count,
                    });
                }
            }
        }
    }
    out
}

/// `|End(A)| = prod_{i,j} q^{min(e_i, e_j) n_i n_j}`, or `None` past 128 bits.
pub fn endomorphism_count(shape: &GroupShape) -> Option<u128> {
    slots(shape)
        .iter()
        .try_fold(1u128, |acc, slot| acc.checked_mul(slot.count as u128))
}

/// Literal orbit computation: enumerate every endomorphism, filter the
/// automorphisms via the block-diagonal criterion, and close orbits.
/// Refuses to run when `|End(A)|` exceeds `max_endomorphisms`.
pub fn orbits_via_endomorphisms(
    shape: &GroupShape,
    max_endomorphisms: u128,
) -> Result<Vec<Vec<GroupElement>>, AbelianError> {
    let total = endomorphism_count(shape).ok_or(AbelianError::OrderOverflow)?;
    if total > max_endomorphisms {
        return Err(AbelianError::SizeBound {
            order: total,
            bound: max_endomorphisms,
        });
    }
    let order = shape.order().ok_or(AbelianError::OrderOverflow)?;
    let n = order as usize;
    let elements: Vec<GroupElement> = (0..n).map(|i| shape.element_from_index(i)).collect();

    let slots = slots(shape);
    let blocks = shape.blocks();
    let mut coeffs: Vec<Vec<Vec<Vec<u64>>>> = blocks
        .iter()
        .map(|&(_, ni)| {
            blocks
                .iter()
                .map(|&(_, nj)| vec![vec![0u64; nj as usize]; ni as usize])
                .collect()
        })
        .collect();
    let mut odometer = vec![0u64; slots.len()];
    let mut dsu = Dsu::new(n);

    loop {
        let endo = Endomorphism {
            coeffs: coeffs.clone(),
        };
        if endo.is_automorphism(shape) {
            for (idx, el) in elements.iter().enumerate() {
                let image = endo.apply(shape, el);
                dsu.union(idx, shape.element_index(&image));
            }
        }
        // Advance the odometer.
        let mut pos = 0usize;
        loop {
            if pos == slots.len() {
                return Ok(collect_orbits(shape, &mut dsu));
            }
            let slot = &slots[pos];
            odometer[pos] += 1;
            if odometer[pos] < slot.count {
                coeffs[slot.i][slot.j][slot.r][slot.s] = odometer[pos] * slot.step;
                break;
            }
            odometer[pos] = 0;
            coeffs[slot.i][slot.j][slot.r][slot.s] = 0;
            pos += 1;
        }
    }
}
