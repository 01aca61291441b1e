//! Normal-form arithmetic in the free nilpotent group `F / gamma_{w+1}(F)`.
//!
//! Every element is uniquely `b_1^{e_1} b_2^{e_2} ... b_N^{e_N}` over the Hall
//! basis in basis order. Products are formed by collection from the left:
//! multiplying a collected word by `b_j^e` keeps the prefix up to `b_j`,
//! bumps the exponent of `b_j`, and replaces the tail `t` (all letters after
//! `b_j`) by its conjugate `t^{b_j^e}`. Since `b_l^{b_j} = b_l [b_l, b_j]` and
//! `[b_l, b_j]` only involves letters of larger weight, the conjugate tail is
//! again supported after `b_j`, so the result is already collected.
//!
//! Conjugation by `b_j^{+-2^i}` is an automorphism of the subgroup generated by
//! `b_{j+1}, ..., b_N`; its images of generators are memoized, and conjugation
//! by `b_j^e` is the composite over the binary digits of `|e|`. All recursion
//! moves to strictly later generators or strictly heavier commutators, so it
//! terminates in the nilpotent quotient.

mod expr;
mod magnus;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::hall::{generate_hall_basis_capped, HallBasis, DEFAULT_BASIS_CAP};

pub use expr::parse_word;

type Exps = Vec<BigInt>;

/// Conjugation by `b_j^{sign * 2^bit}`, image of generator `b_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct AutoKey {
    j: usize,
    inverse: bool,
    bit: u32,
    l: usize,
}

/// Free nilpotent group of rank `letters` and class `class`.
pub struct NilGroupCtx {
    basis: HallBasis,
    weights: Vec<u32>,
    magnus: OnceLock<std::result::Result<magnus::Magnus, Error>>,
    // [b_l, b_j] for l > j
    table: RwLock<HashMap<(usize, usize), Arc<Exps>>>,
    autos: RwLock<HashMap<AutoKey, Arc<Exps>>>,
}

impl fmt::Debug for NilGroupCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NilGroupCtx")
            .field("letters", &self.letters())
            .field("class", &self.class())
            .field("basis_len", &self.basis.len())
            .finish()
    }
}

pub fn make_context(k: u32, w: u32) -> Result<Arc<NilGroupCtx>> {
    make_context_capped(k, w, DEFAULT_BASIS_CAP)
}

pub fn make_context_capped(k: u32, w: u32, cap: usize) -> Result<Arc<NilGroupCtx>> {
    let basis = generate_hall_basis_capped(k, w, cap)?;
    let weights = basis.items().iter().map(|it| it.weight).collect();
    Ok(Arc::new(NilGroupCtx {
        basis,
        weights,
        magnus: OnceLock::new(),
        table: RwLock::new(HashMap::new()),
        autos: RwLock::new(HashMap::new()),
    }))
}

impl NilGroupCtx {
    pub fn letters(&self) -> u32 {
        self.basis.letters()
    }

    pub fn class(&self) -> u32 {
        self.basis.max_weight()
    }

    pub fn basis(&self) -> &HallBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    fn same_group(&self, other: &NilGroupCtx) -> bool {
        std::ptr::eq(self, other)
            || (self.letters() == other.letters() && self.class() == other.class())
    }

    fn zeros(&self) -> Exps {
        vec![BigInt::zero(); self.len()]
    }

    fn unit(&self, i: usize) -> Exps {
        let mut v = self.zeros();
        v[i] = BigInt::one();
        v
    }

    fn magnus(&self) -> Result<&magnus::Magnus> {
        self.magnus
            .get_or_init(|| magnus::Magnus::new(&self.basis))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Whether `b_l` and `b_j` commute for weight reasons alone.
    fn commute_by_weight(&self, l: usize, j: usize) -> bool {
        self.weights[l] + self.weights[j] > self.class()
    }

    /// Normal form of `[b_l, b_j]`, `l > j`.
    fn structure(&self, l: usize, j: usize) -> Result<Arc<Exps>> {
        debug_assert!(l > j);
        if let Some(v) = self.table.read().unwrap().get(&(l, j)) {
            return Ok(Arc::clone(v));
        }
        let v = if self.commute_by_weight(l, j) {
            self.zeros()
        } else if let Some(pos) = self.basis.position_of_bracket(l, j) {
            self.unit(pos)
        } else {
            // not basic: rewrite through the faithful series representation
            let m = self.magnus()?;
            let ring = m.ring();
            let s = ring.commutator(&m.series_of(&self.unit(l)), &m.series_of(&self.unit(j)));
            m.peel(&s)?
        };
        let v = Arc::new(v);
        self.table
            .write()
            .unwrap()
            .entry((l, j))
            .or_insert_with(|| Arc::clone(&v));
        Ok(v)
    }

    fn auto_image(&self, key: AutoKey) -> Result<Arc<Exps>> {
        if let Some(v) = self.autos.read().unwrap().get(&key) {
            return Ok(Arc::clone(v));
        }
        let AutoKey { j, inverse, bit, l } = key;
        let v = if bit > 0 {
            let prev = self.auto_image(AutoKey { bit: bit - 1, ..key })?;
            self.apply_auto(j, inverse, bit - 1, &prev)?
        } else {
            let t = self.structure(l, j)?;
            // b_l^{b_j} = b_l [b_l, b_j];  b_l^{b_j^-1} = b_l (([b_l, b_j])^{b_j^-1})^-1
            let tail = if inverse {
                let conj = self.apply_auto(j, true, 0, &t)?;
                self.inverse_exps(&conj)?
            } else {
                (*t).clone()
            };
            let mut v = tail;
            if v[..=l].iter().any(|x| !x.is_zero()) {
                return Err(Error::Internal("conjugate escaped the tail".into()));
            }
            v[l] = BigInt::one();
            v
        };
        let v = Arc::new(v);
        self.autos
            .write()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&v));
        Ok(v)
    }

    /// Image of `x` (supported after `b_j`) under conjugation by `b_j^{+-2^bit}`.
    fn apply_auto(&self, j: usize, inverse: bool, bit: u32, x: &[BigInt]) -> Result<Exps> {
        let mut out = self.zeros();
        for l in j + 1..self.len() {
            if x[l].is_zero() {
                continue;
            }
            if self.commute_by_weight(l, j) {
                self.mul_letter(&mut out, l, &x[l])?;
            } else {
                let img = self.auto_image(AutoKey { j, inverse, bit, l })?;
                let p = self.power_exps(&img, &x[l])?;
                self.mul_exps(&mut out, &p)?;
            }
        }
        Ok(out)
    }

    /// `c <- c * b_j^e`.
    fn mul_letter(&self, c: &mut [BigInt], j: usize, e: &BigInt) -> Result<()> {
        if e.is_zero() {
            return Ok(());
        }
        let needs_conj = (j + 1..self.len()).any(|l| !c[l].is_zero() && !self.commute_by_weight(l, j));
        if !needs_conj {
            c[j] += e;
            return Ok(());
        }
        let mut tail = self.zeros();
        for l in j + 1..self.len() {
            tail[l] = std::mem::take(&mut c[l]);
        }
        c[j] += e;
        let inverse = e.is_negative();
        let mut mag = e.abs();
        let mut bit = 0u32;
        while !mag.is_zero() {
            if mag.is_odd() {
                tail = self.apply_auto(j, inverse, bit, &tail)?;
            }
            mag >>= 1;
            bit += 1;
        }
        for l in j + 1..self.len() {
            c[l] = std::mem::take(&mut tail[l]);
        }
        Ok(())
    }

    /// `c <- c * y`.
    fn mul_exps(&self, c: &mut [BigInt], y: &[BigInt]) -> Result<()> {
        for (m, e) in y.iter().enumerate() {
            if !e.is_zero() {
                self.mul_letter(c, m, e)?;
            }
        }
        Ok(())
    }

    fn inverse_exps(&self, x: &[BigInt]) -> Result<Exps> {
        let mut out = self.zeros();
        for (m, e) in x.iter().enumerate().rev() {
            if !e.is_zero() {
                self.mul_letter(&mut out, m, &-e)?;
            }
        }
        Ok(out)
    }

    fn power_exps(&self, x: &[BigInt], n: &BigInt) -> Result<Exps> {
        if n.is_one() {
            return Ok(x.to_vec());
        }
        // a single letter power needs no collection
        let support: Vec<usize> = (0..x.len()).filter(|&i| !x[i].is_zero()).collect();
        if support.len() <= 1 {
            let mut out = self.zeros();
            if let Some(&i) = support.first() {
                out[i] = &x[i] * n;
            }
            return Ok(out);
        }
        let mut base = if n.is_negative() {
            self.inverse_exps(x)?
        } else {
            x.to_vec()
        };
        let mut e = n.abs();
        let mut acc = self.zeros();
        while !e.is_zero() {
            if e.is_odd() {
                self.mul_exps(&mut acc, &base)?;
            }
            e >>= 1;
            if !e.is_zero() {
                let sq = base.clone();
                self.mul_exps(&mut base, &sq)?;
            }
        }
        Ok(acc)
    }

    pub fn identity(self: &Arc<Self>) -> NilElement {
        NilElement {
            ctx: Arc::clone(self),
            exps: self.zeros(),
        }
    }

    /// The generator `x_i`, 1-based.
    pub fn letter(self: &Arc<Self>, i: u32) -> Result<NilElement> {
        if i == 0 || i > self.letters() {
            return Err(invalid(format!("letter x{i} out of range 1..={}", self.letters())));
        }
        Ok(self.basis_element(i as usize - 1))
    }

    /// The basis element at position `i`.
    pub fn basis_element(self: &Arc<Self>, i: usize) -> NilElement {
        NilElement {
            ctx: Arc::clone(self),
            exps: self.unit(i),
        }
    }

    pub fn element(self: &Arc<Self>, exps: Vec<BigInt>) -> Result<NilElement> {
        if exps.len() != self.len() {
            return Err(invalid(format!(
                "exponent vector has length {}, basis has {}",
                exps.len(),
                self.len()
            )));
        }
        Ok(NilElement {
            ctx: Arc::clone(self),
            exps,
        })
    }

    /// Convenience for small integer exponent vectors.
    pub fn element_i64(self: &Arc<Self>, exps: &[i64]) -> Result<NilElement> {
        self.element(exps.iter().map(|&e| BigInt::from(e)).collect())
    }
}

/// An element of a free nilpotent group in Hall normal form.
#[derive(Clone)]
pub struct NilElement {
    ctx: Arc<NilGroupCtx>,
    exps: Exps,
}

impl PartialEq for NilElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_group(&other.ctx) && self.exps == other.exps
    }
}

impl Eq for NilElement {}

impl fmt::Debug for NilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("NilElement").field(&self.exps).finish()
    }
}

impl fmt::Display for NilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, e) in self.exps.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}", self.ctx.basis.commutator(i))?;
            if !e.is_one() {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl NilElement {
    pub fn context(&self) -> &Arc<NilGroupCtx> {
        &self.ctx
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &NilElement) -> Result<()> {
        if self.ctx.same_group(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn with(&self, exps: Exps) -> NilElement {
        NilElement {
            ctx: Arc::clone(&self.ctx),
            exps,
        }
    }

    pub fn multiply(&self, other: &NilElement) -> Result<NilElement> {
        self.check(other)?;
        let mut c = self.exps.clone();
        self.ctx.mul_exps(&mut c, &other.exps)?;
        Ok(self.with(c))
    }

    pub fn inverse(&self) -> Result<NilElement> {
        Ok(self.with(self.ctx.inverse_exps(&self.exps)?))
    }

    pub fn pow(&self, n: &BigInt) -> Result<NilElement> {
        Ok(self.with(self.ctx.power_exps(&self.exps, n)?))
    }

    pub fn pow_i64(&self, n: i64) -> Result<NilElement> {
        self.pow(&BigInt::from(n))
    }

    /// `self^other = other^-1 self other`.
    pub fn conjugate(&self, other: &NilElement) -> Result<NilElement> {
        other.inverse()?.multiply(self)?.multiply(other)
    }

    /// Lowest weight with a nonzero exponent; `None` for the identity.
    pub fn depth(&self) -> Option<u32> {
        self.exps
            .iter()
            .position(|e| !e.is_zero())
            .map(|i| self.ctx.weights[i])
    }

    /// The weight-`m` exponent block; fails unless every lighter exponent is zero.
    pub fn layer_coords(&self, m: u32) -> Result<Vec<BigInt>> {
        if m == 0 || m > self.ctx.class() {
            return Err(invalid(format!(
                "layer {m} outside 1..={}",
                self.ctx.class()
            )));
        }
        if let Some(d) = self.depth() {
            if d < m {
                return Err(Error::NotInLayer { weight: m });
            }
        }
        Ok(self.exps[self.ctx.basis.block(m)].to_vec())
    }
}

/// `a^-1 b^-1 a b`.
pub fn commutator(a: &NilElement, b: &NilElement) -> Result<NilElement> {
    a.check(b)?;
    let mut c = a.ctx.inverse_exps(&a.exps)?;
    let bi = a.ctx.inverse_exps(&b.exps)?;
    a.ctx.mul_exps(&mut c, &bi)?;
    a.ctx.mul_exps(&mut c, &a.exps)?;
    a.ctx.mul_exps(&mut c, &b.exps)?;
    Ok(a.with(c))
}

/// Left-normed commutator `[[...[p1, p2], p3], ..., pm]`.
pub fn left_normed(parts: &[NilElement]) -> Result<NilElement> {
    if parts.len() < 2 {
        return Err(invalid("left-normed commutator needs at least two entries"));
    }
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc = commutator(&acc, p)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn context_sizes() {
        assert_eq!(make_context(2, 2).unwrap().len(), 3);
        assert_eq!(make_context(2, 3).unwrap().len(), 5);
        assert_eq!(make_context(1, 5).unwrap().len(), 1);
        assert!(make_context(0, 2).is_err());
        assert!(matches!(
            make_context_capped(3, 9, 50).unwrap_err(),
            Error::ResourceLimit { .. }
        ));
    }

    #[test]
    fn class_two_products() {
        let g = make_context(2, 2).unwrap();
        let x1 = g.letter(1).unwrap();
        let x2 = g.letter(2).unwrap();
        assert_eq!(x1.multiply(&x2).unwrap().exponents(), ints(&[1, 1, 0]));
        assert_eq!(x2.multiply(&x1).unwrap().exponents(), ints(&[1, 1, 1]));
        let x1x2 = x1.multiply(&x2).unwrap();
        assert_eq!(x1x2.multiply(&x1x2).unwrap().exponents(), ints(&[2, 2, 1]));
    }

    #[test]
    fn inverse_power_commutator() {
        let g = make_context(2, 3).unwrap();
        assert!(g.identity().inverse().unwrap().is_identity());
        let x1 = g.letter(1).unwrap();
        assert_eq!(x1.pow_i64(5).unwrap().exponents(), ints(&[5, 0, 0, 0, 0]));
        let a = g.element_i64(&[1, 1, 1, 0, 0]).unwrap();
        assert!(a.inverse().unwrap().multiply(&a).unwrap().is_identity());
        assert!(commutator(&a, &a).unwrap().is_identity());

        let g2 = make_context(2, 2).unwrap();
        let (y1, y2) = (g2.letter(1).unwrap(), g2.letter(2).unwrap());
        assert_eq!(commutator(&y2, &y1).unwrap(), g2.basis_element(2));
        assert_eq!(
            commutator(&y2.pow_i64(2).unwrap(), &y1).unwrap().exponents(),
            ints(&[0, 0, 2])
        );
    }

    #[test]
    fn left_normed_truncates() {
        let g = make_context(2, 3).unwrap();
        let x1 = g.letter(1).unwrap();
        let x2 = g.letter(2).unwrap();
        assert_eq!(
            left_normed(&[x2.clone(), x1.clone()]).unwrap(),
            commutator(&x2, &x1).unwrap()
        );
        assert!(left_normed(&[x1.clone(), x2.clone(), x2.clone(), x2.clone()])
            .unwrap()
            .is_identity());
        assert!(left_normed(&[x1.clone()]).is_err());
    }

    #[test]
    fn layer_coordinates() {
        let g = make_context(2, 3).unwrap();
        let x1 = g.letter(1).unwrap();
        let x2 = g.letter(2).unwrap();
        assert_eq!(g.identity().layer_coords(2).unwrap(), ints(&[0]));
        assert_eq!(commutator(&x2, &x1).unwrap().layer_coords(2).unwrap(), ints(&[1]));
        assert!(matches!(
            x1.layer_coords(2).unwrap_err(),
            Error::NotInLayer { weight: 2 }
        ));
        let base = left_normed(&[x1.clone(), x2.clone(), x2.clone()]).unwrap();
        let scaled = left_normed(&[x1.pow_i64(4).unwrap(), x2.clone(), x2.clone()]).unwrap();
        let b: Vec<BigInt> = base.layer_coords(3).unwrap();
        let s: Vec<BigInt> = scaled.layer_coords(3).unwrap();
        // [x1,x2,x2] = [[x2,x1],x2]^-1 mod gamma_4
        assert_eq!(b, ints(&[0, -1]));
        assert_eq!(s, ints(&[0, -4]));
    }

    #[test]
    fn context_mismatch() {
        let a = make_context(2, 2).unwrap().letter(1).unwrap();
        let b = make_context(2, 3).unwrap().letter(1).unwrap();
        assert_eq!(a.multiply(&b).unwrap_err(), Error::ContextMismatch);
    }
}
