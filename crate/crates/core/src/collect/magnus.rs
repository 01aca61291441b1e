//! Truncated Magnus embedding of the free nilpotent group.
//!
//! `x_i -> 1 + X_i` sends `F / gamma_{w+1}(F)` injectively into the units of
//! the free associative ring `Z<X_1..X_k>` modulo words of degree `> w`. A
//! series is turned back into Hall coordinates layer by layer: the lowest
//! nonconstant homogeneous part of an element of `gamma_m` is the integer
//! combination of Lie polynomials of the weight-`m` basic commutators with the
//! element's weight-`m` exponents, which are solved for and divided off.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hall::{HallBasis, Shape};

/// Coefficient layout for series truncated above degree `w` in `k` letters.
#[derive(Debug, Clone)]
pub(crate) struct SeriesRing {
    w: usize,
    offsets: Vec<usize>,
    pows: Vec<usize>,
}

pub(crate) type Series = Vec<BigInt>;

impl SeriesRing {
    pub fn new(k: usize, w: usize) -> Self {
        let mut offsets = Vec::with_capacity(w + 2);
        let mut pows = Vec::with_capacity(w + 1);
        let mut off = 0;
        let mut p = 1;
        for _ in 0..=w {
            offsets.push(off);
            pows.push(p);
            off += p;
            p *= k;
        }
        offsets.push(off);
        SeriesRing { w, offsets, pows }
    }

    pub fn len(&self) -> usize {
        self.offsets[self.w + 1]
    }

    pub fn one(&self) -> Series {
        let mut s = vec![BigInt::zero(); self.len()];
        s[0] = BigInt::one();
        s
    }

    /// `1 + X_i` for the 0-based letter `i`.
    pub fn letter(&self, i: usize) -> Series {
        let mut s = self.one();
        if self.w >= 1 {
            s[self.offsets[1] + i] = BigInt::one();
        }
        s
    }

    pub fn degree_part<'a>(&self, s: &'a Series, d: usize) -> &'a [BigInt] {
        &s[self.offsets[d]..self.offsets[d + 1]]
    }

    pub fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut out = vec![BigInt::zero(); self.len()];
        for da in 0..=self.w {
            for (ia, ca) in self.degree_part(a, da).iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for db in 0..=(self.w - da) {
                    let base = self.offsets[da + db] + ia * self.pows[db];
                    for (ib, cb) in self.degree_part(b, db).iter().enumerate() {
                        if !cb.is_zero() {
                            out[base + ib] += ca * cb;
                        }
                    }
                }
            }
        }
        out
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(&self, a: &Series) -> Series {
        debug_assert!(a[0].is_one());
        let mut neg_tail: Series = a.iter().map(|c| -c).collect();
        neg_tail[0] = BigInt::zero();
        let mut inv = self.one();
        let mut term = self.one();
        for _ in 0..self.w {
            term = self.mul(&term, &neg_tail);
            for (x, t) in inv.iter_mut().zip(&term) {
                *x += t;
            }
        }
        inv
    }

    pub fn pow(&self, a: &Series, n: &BigInt) -> Series {
        let mut base = if n.is_negative() {
            self.inverse(a)
        } else {
            a.clone()
        };
        let mut e = n.abs();
        let mut acc = self.one();
        let two = BigInt::from(2);
        while !e.is_zero() {
            if e.is_odd() {
                acc = self.mul(&acc, &base);
            }
            e /= &two;
            if !e.is_zero() {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn commutator(&self, a: &Series, b: &Series) -> Series {
        let ai = self.inverse(a);
        let bi = self.inverse(b);
        self.mul(&self.mul(&ai, &bi), &self.mul(a, b))
    }
}

/// Solves `sum_b e_b * lie(b) = target` over the basic commutators of one weight.
#[derive(Debug, Clone)]
struct LayerSolver {
    range: std::ops::Range<usize>,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    /// Inverse of the square submatrix of `rows` on the pivot columns.
    inv: Vec<Vec<BigRational>>,
}

impl LayerSolver {
    fn new(range: std::ops::Range<usize>, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        let width = rows.first().map_or(0, |r| r.len());

        // row echelon form over Q to find independent columns
        let mut ech: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
            .collect();
        let mut pivots = Vec::with_capacity(n);
        let mut row = 0;
        for col in 0..width {
            if row == n {
                break;
            }
            let Some(p) = (row..n).find(|&i| !ech[i][col].is_zero()) else {
                continue;
            };
            ech.swap(row, p);
            for i in row + 1..n {
                if ech[i][col].is_zero() {
                    continue;
                }
                let f = &ech[i][col] / &ech[row][col];
                for j in col..width {
                    let t = &f * &ech[row][j];
                    ech[i][j] -= t;
                }
            }
            pivots.push(col);
            row += 1;
        }
        if pivots.len() != n {
            return Err(Error::Internal(
                "Lie polynomials of basic commutators are dependent".into(),
            ));
        }

        // Gauss-Jordan on the square pivot submatrix
        let mut a: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| pivots.iter().map(|&c| BigRational::from_integer(r[c].clone())).collect())
            .collect();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let p = (col..n)
                .find(|&i| !a[i][col].is_zero())
                .ok_or_else(|| Error::Internal("singular pivot block".into()))?;
            a.swap(col, p);
            inv.swap(col, p);
            let d = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &d;
                inv[col][j] /= &d;
            }
            for i in 0..n {
                if i == col || a[i][col].is_zero() {
                    continue;
                }
                let f = a[i][col].clone();
                for j in 0..n {
                    let ta = &f * &a[col][j];
                    a[i][j] -= ta;
                    let ti = &f * &inv[col][j];
                    inv[i][j] -= ti;
                }
            }
        }
        Ok(LayerSolver {
            range,
            rows,
            pivots,
            inv,
        })
    }

    fn solve(&self, target: &[BigInt]) -> Result<Vec<BigInt>> {
        let n = self.rows.len();
        // e * A = t_P  with A the pivot submatrix, so e = t_P * A^{-1}
        let mut e = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = BigRational::zero();
            for (i, &c) in self.pivots.iter().enumerate() {
                if !target[c].is_zero() {
                    acc += BigRational::from_integer(target[c].clone()) * &self.inv[i][j];
                }
            }
            if !acc.is_integer() {
                return Err(Error::Internal("non-integral layer coordinates".into()));
            }
            e.push(acc.to_integer());
        }
        for (c, t) in target.iter().enumerate() {
            let mut s = BigInt::zero();
            for (ej, row) in e.iter().zip(&self.rows) {
                s += ej * &row[c];
            }
            if &s != t {
                return Err(Error::Internal(
                    "series layer is not a combination of basic commutators".into(),
                ));
            }
        }
        Ok(e)
    }
}

/// Series images of every basis element plus the per-layer solvers.
#[derive(Debug, Clone)]
pub(crate) struct Magnus {
    ring: SeriesRing,
    images: Vec<Series>,
    solvers: Vec<LayerSolver>,
}

impl Magnus {
    pub fn new(basis: &HallBasis) -> Result<Self> {
        let k = basis.letters() as usize;
        let w = basis.max_weight() as usize;
        let ring = SeriesRing::new(k, w);
        let mut images: Vec<Series> = Vec::with_capacity(basis.len());
        for item in basis.items() {
            let s = match item.shape {
                Shape::Leaf(l) => ring.letter(l as usize - 1),
                Shape::Bracket(u, v) => ring.commutator(&images[u], &images[v]),
            };
            images.push(s);
        }
        let mut solvers = Vec::with_capacity(w);
        for m in 1..=w as u32 {
            let range = basis.block(m);
            let rows = range
                .clone()
                .map(|i| ring.degree_part(&images[i], m as usize).to_vec())
                .collect();
            solvers.push(LayerSolver::new(range, rows)?);
        }
        Ok(Magnus {
            ring,
            images,
            solvers,
        })
    }

    pub fn ring(&self) -> &SeriesRing {
        &self.ring
    }

    /// Series of the normal-form word `prod_i b_i^{e_i}`.
    pub fn series_of(&self, exps: &[BigInt]) -> Series {
        let mut s = self.ring.one();
        for (img, e) in self.images.iter().zip(exps) {
            if !e.is_zero() {
                s = self.ring.mul(&s, &self.ring.pow(img, e));
            }
        }
        s
    }

    /// Hall-basis exponents of the group element with series `s`.
    pub fn peel(&self, s: &Series) -> Result<Vec<BigInt>> {
        let mut rest = s.clone();
        let mut exps = vec![BigInt::zero(); self.images.len()];
        for (m, solver) in self.solvers.iter().enumerate() {
            let d = m + 1;
            for lower in 1..d {
                if self.ring.degree_part(&rest, lower).iter().any(|c| !c.is_zero()) {
                    return Err(Error::Internal("peeling left a lower-degree residue".into()));
                }
            }
            let layer = self.ring.degree_part(&rest, d);
            if layer.iter().all(Zero::is_zero) {
                continue;
            }
            let e = solver.solve(layer)?;
            let mut block = self.ring.one();
            for (idx, ei) in solver.range.clone().zip(&e) {
                if !ei.is_zero() {
                    block = self.ring.mul(&block, &self.ring.pow(&self.images[idx], ei));
                }
                exps[idx] = ei.clone();
            }
            rest = self.ring.mul(&self.ring.inverse(&block), &rest);
        }
        if rest != self.ring.one() {
            return Err(Error::Internal("peeling did not reach the identity".into()));
        }
        Ok(exps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hall::generate_hall_basis;

    #[test]
    fn inverse_and_pow() {
        let r = SeriesRing::new(2, 4);
        let x = r.letter(0);
        let y = r.letter(1);
        let xy = r.mul(&x, &y);
        assert_eq!(r.mul(&xy, &r.inverse(&xy)), r.one());
        let p = r.pow(&xy, &BigInt::from(-3));
        let q = r.pow(&r.inverse(&xy), &BigInt::from(3));
        assert_eq!(p, q);
    }

    #[test]
    fn peel_recovers_normal_forms() {
        let basis = generate_hall_basis(2, 4).unwrap();
        let m = Magnus::new(&basis).unwrap();
        let exps: Vec<BigInt> = [3, -2, 5, 0, -1, 7, 2, -4].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(exps.len(), basis.len());
        let s = m.series_of(&exps);
        assert_eq!(m.peel(&s).unwrap(), exps);
    }
}
