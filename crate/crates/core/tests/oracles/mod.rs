//! Reference implementations used only by tests. None of them share code with
//! the library beyond its public types.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet, VecDeque};

use nilcover::fingroup::Pcp;
use nilcover::hall::{BasicCommutator, HallBasis};

/// Truncated noncommutative power series in sparse form: word -> coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    w: usize,
    terms: BTreeMap<Vec<u8>, i128>,
}

impl Series {
    pub fn one(w: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), 1);
        Series { w, terms }
    }

    /// `1 + X_i`, letters 0-based.
    pub fn letter(w: usize, i: u8) -> Self {
        let mut s = Self::one(w);
        if w >= 1 {
            s.terms.insert(vec![i], 1);
        }
        s
    }

    pub fn mul(&self, other: &Series) -> Series {
        let mut terms: BTreeMap<Vec<u8>, i128> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.len() + b.len() > self.w {
                    continue;
                }
                let mut word = a.clone();
                word.extend_from_slice(b);
                *terms.entry(word).or_insert(0) += ca * cb;
            }
        }
        terms.retain(|_, c| *c != 0);
        Series { w: self.w, terms }
    }

    pub fn inverse(&self) -> Series {
        assert_eq!(self.terms.get(&Vec::new()), Some(&1));
        let mut t = self.clone();
        t.terms.remove(&Vec::new());
        for c in t.terms.values_mut() {
            *c = -*c;
        }
        // (1 - t')^-1 = sum of powers of t'
        let mut acc = Series::one(self.w);
        let mut p = Series::one(self.w);
        for _ in 0..self.w {
            p = p.mul(&t);
            for (k, v) in &p.terms {
                *acc.terms.entry(k.clone()).or_insert(0) += v;
            }
        }
        acc.terms.retain(|_, c| *c != 0);
        acc
    }

    pub fn pow(&self, e: i64) -> Series {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Series::one(self.w);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn commutator(&self, other: &Series) -> Series {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }
}

pub fn series_of_tree(w: usize, t: &BasicCommutator) -> Series {
    match t {
        BasicCommutator::Leaf(i) => Series::letter(w, (*i - 1) as u8),
        BasicCommutator::Bracket(a, b) => series_of_tree(w, a).commutator(&series_of_tree(w, b)),
    }
}

/// Series images of every basis element, built from the bracket trees.
pub fn basis_series(basis: &HallBasis) -> Vec<Series> {
    let w = basis.max_weight() as usize;
    (0..basis.len()).map(|i| series_of_tree(w, &basis.commutator(i))).collect()
}

pub fn series_of_normal_form(images: &[Series], w: usize, exps: &[i64]) -> Series {
    let mut s = Series::one(w);
    for (img, &e) in images.iter().zip(exps) {
        if e != 0 {
            s = s.mul(&img.pow(e));
        }
    }
    s
}

/// Aperiodic necklaces of length `w` on `k` letters, counted by brute force as
/// words strictly smaller than each of their nontrivial rotations.
pub fn lyndon_count(k: u32, w: u32) -> u64 {
    let total = (k as u64).pow(w);
    let mut count = 0;
    let mut word = vec![0u32; w as usize];
    for mut code in 0..total {
        for x in word.iter_mut() {
            *x = (code % k as u64) as u32;
            code /= k as u64;
        }
        let n = word.len();
        if (1..n).all(|r| {
            let rot: Vec<u32> = word[r..].iter().chain(&word[..r]).copied().collect();
            word < rot
        }) {
            count += 1;
        }
    }
    count
}

/// Row-style Hermite normal form: nonzero rows, upper triangular, positive pivots.
pub fn hermite_rows(rows: &[Vec<i64>], n: usize) -> Vec<Vec<i128>> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut out = Vec::new();
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (0..a.len()).filter(|&i| a[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][col].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let q = a[i][col] / a[p][col];
                    for j in 0..n {
                        a[i][j] -= q * a[p][j];
                    }
                }
            }
        }
        if let Some(i) = (0..a.len()).find(|&i| a[i][col] != 0) {
            let mut r = a.remove(i);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(r);
        }
    }
    out
}

/// `(order, free rank)` of `Z^n / rowspace`, the order found by breadth-first
/// enumeration of canonical residues when the lattice has full rank.
pub fn residue_enumeration(rows: &[Vec<i64>], n: usize) -> (Option<u128>, usize) {
    let h = hermite_rows(rows, n);
    if h.len() < n {
        return (None, n - h.len());
    }
    let reduce = |mut v: Vec<i128>| {
        for (i, row) in h.iter().enumerate() {
            let q = v[i].div_euclid(row[i]);
            for j in i..n {
                v[j] -= q * row[j];
            }
        }
        v
    };
    let start = vec![0i128; n];
    let mut seen: HashSet<Vec<i128>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for j in 0..n {
            let mut u = v.clone();
            u[j] += 1;
            let u = reduce(u);
            if seen.insert(u.clone()) {
                queue.push_back(u);
            }
        }
    }
    (Some(seen.len() as u128), 0)
}

/// All normal words of a presentation.
pub fn normal_words(p: u32, m: usize) -> Vec<Vec<u32>> {
    let total = (p as usize).pow(m as u32);
    (0..total)
        .map(|mut code| {
            (0..m)
                .map(|_| {
                    let e = (code % p as usize) as u32;
                    code /= p as usize;
                    e
                })
                .collect()
        })
        .collect()
}

/// A presentation is consistent exactly when collected multiplication of
/// normal words is associative.
pub fn pcp_associative(pcp: &Pcp) -> bool {
    let words = normal_words(pcp.p(), pcp.len());
    let prods: Vec<Vec<Vec<u32>>> = words
        .iter()
        .map(|a| words.iter().map(|b| pcp.multiply(a, b)).collect())
        .collect();
    let index = |w: &[u32]| w.iter().rev().fold(0usize, |acc, &e| acc * pcp.p() as usize + e as usize);
    for a in 0..words.len() {
        for b in 0..words.len() {
            let ab = index(&prods[a][b]);
            for c in 0..words.len() {
                let bc = index(&prods[b][c]);
                if prods[ab][c] != prods[a][bc] {
                    return false;
                }
            }
        }
    }
    true
}
