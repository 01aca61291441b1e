//! Basic commutators (Hall basis) on `k` letters and the Witt count.
//!
//! Basic commutators are built weight by weight. A letter `x_i` is basic; a
//! bracket `[u, v]` is basic when `u` and `v` are basic, `u > v`, and, if
//! `u = [p, q]`, then `q <= v`. The total order compares weight first and then
//! the pair of child positions `(left, right)` lexicographically, letters
//! ordered `x1 < x2 < ...`. Every order extending weight gives a valid basis;
//! this one is fixed so that output is reproducible.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Default upper bound on the number of basis items a caller may request.
pub const DEFAULT_BASIS_CAP: usize = 10_000;

/// The Möbius function.
pub fn moebius(m: u64) -> Result<i8> {
    if m == 0 {
        return Err(invalid("moebius is undefined at 0"));
    }
    let mut n = m;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Number of basic commutators of weight `w` on `k` letters,
/// `(1/w) * sum_{m | w} mu(m) k^(w/m)`.
pub fn witt_count(k: u32, w: u32) -> Result<u64> {
    if k == 0 || w == 0 {
        return Err(invalid("witt_count needs k >= 1 and w >= 1"));
    }
    let mut total: i128 = 0;
    for m in 1..=w {
        if w % m != 0 {
            continue;
        }
        let mu = moebius(m as u64)?;
        if mu == 0 {
            continue;
        }
        let term = (k as i128)
            .checked_pow(w / m)
            .ok_or_else(|| Error::Overflow(format!("{k}^{}", w / m)))?;
        total += mu as i128 * term;
    }
    debug_assert_eq!(total % w as i128, 0);
    u64::try_from(total / w as i128).map_err(|_| Error::Overflow("witt count".into()))
}

/// A basic commutator as a tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasicCommutator {
    /// 1-based letter index.
    Leaf(u32),
    Bracket(Box<BasicCommutator>, Box<BasicCommutator>),
}

impl BasicCommutator {
    pub fn weight(&self) -> u32 {
        match self {
            BasicCommutator::Leaf(_) => 1,
            BasicCommutator::Bracket(l, r) => l.weight() + r.weight(),
        }
    }
}

impl fmt::Display for BasicCommutator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicCommutator::Leaf(i) => write!(f, "x{i}"),
            BasicCommutator::Bracket(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

/// Flat description of one basis item; children refer to earlier positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    Leaf(u32),
    Bracket(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HallItem {
    pub weight: u32,
    pub shape: Shape,
}

/// The ordered basic commutators of weight at most `max_weight` on `letters` letters.
#[derive(Debug, Clone)]
pub struct HallBasis {
    letters: u32,
    max_weight: u32,
    items: Vec<HallItem>,
    lookup: HashMap<(usize, usize), usize>,
    /// `block_start[m]` is the first position of weight `m`; has `max_weight + 2` entries.
    block_start: Vec<usize>,
}

/// Builds the Hall basis with the default size cap.
pub fn generate_hall_basis(k: u32, w: u32) -> Result<HallBasis> {
    generate_hall_basis_capped(k, w, DEFAULT_BASIS_CAP)
}

pub fn generate_hall_basis_capped(k: u32, w: u32, cap: usize) -> Result<HallBasis> {
    if k == 0 || w == 0 {
        return Err(invalid("hall basis needs k >= 1 and w >= 1"));
    }
    let mut expected: u128 = 0;
    for m in 1..=w {
        expected += witt_count(k, m)? as u128;
        if expected > cap as u128 {
            return Err(Error::ResourceLimit {
                what: "hall basis size",
                requested: expected,
                limit: cap as u128,
            });
        }
    }

    let mut items: Vec<HallItem> = (1..=k)
        .map(|i| HallItem {
            weight: 1,
            shape: Shape::Leaf(i),
        })
        .collect();
    let mut lookup = HashMap::new();
    let mut block_start = vec![0, 0];

    for m in 2..=w {
        block_start.push(items.len());
        let existing = items.len();
        let mut fresh = Vec::new();
        for u in 0..existing {
            let wu = items[u].weight;
            if wu >= m {
                continue;
            }
            // q <= v is required when u = [p, q]
            let min_v = match items[u].shape {
                Shape::Leaf(_) => 0,
                Shape::Bracket(_, q) => q,
            };
            for v in min_v..u {
                if wu + items[v].weight == m {
                    fresh.push((u, v));
                }
            }
        }
        fresh.sort_unstable();
        for (u, v) in fresh {
            lookup.insert((u, v), items.len());
            items.push(HallItem {
                weight: m,
                shape: Shape::Bracket(u, v),
            });
        }
    }
    block_start.push(items.len());

    Ok(HallBasis {
        letters: k,
        max_weight: w,
        items,
        lookup,
        block_start,
    })
}

impl HallBasis {
    pub fn letters(&self) -> u32 {
        self.letters
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[HallItem] {
        &self.items
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.items[i].weight
    }

    /// Positions of the items of weight `m` (empty when `m` is out of range).
    pub fn block(&self, m: u32) -> std::ops::Range<usize> {
        if m == 0 || m > self.max_weight {
            return 0..0;
        }
        self.block_start[m as usize]..self.block_start[m as usize + 1]
    }

    /// Position of the basic commutator `[items[u], items[v]]`, if it is basic
    /// and within the weight bound.
    pub fn position_of_bracket(&self, u: usize, v: usize) -> Option<usize> {
        self.lookup.get(&(u, v)).copied()
    }

    /// Whether `[items[u], items[v]]` satisfies the Hall condition
    /// (ignoring the weight bound).
    pub fn hall_condition(&self, u: usize, v: usize) -> bool {
        if u <= v {
            return false;
        }
        match self.items[u].shape {
            Shape::Leaf(_) => true,
            Shape::Bracket(_, q) => q <= v,
        }
    }

    pub fn commutator(&self, i: usize) -> BasicCommutator {
        match self.items[i].shape {
            Shape::Leaf(l) => BasicCommutator::Leaf(l),
            Shape::Bracket(u, v) => BasicCommutator::Bracket(
                Box::new(self.commutator(u)),
                Box::new(self.commutator(v)),
            ),
        }
    }

    /// Position of a tree in this basis, if it is one of the items.
    pub fn position(&self, c: &BasicCommutator) -> Option<usize> {
        match c {
            BasicCommutator::Leaf(l) if *l >= 1 && *l <= self.letters => Some(*l as usize - 1),
            BasicCommutator::Leaf(_) => None,
            BasicCommutator::Bracket(l, r) => {
                let u = self.position(l)?;
                let v = self.position(r)?;
                self.position_of_bracket(u, v)
            }
        }
    }

    /// Per-weight item counts, `counts()[m - 1]` for weight `m`.
    pub fn counts(&self) -> Vec<usize> {
        (1..=self.max_weight).map(|m| self.block(m).len()).collect()
    }
}
