//! Baer invariant of `G = Z_r + Z_s` for the variety of nilpotent groups of
//! class at most `c`.
//!
//! Two routes are provided. [`baer_formula`] returns `n` copies of `Z_d`,
//! `d = gcd(r, s)`, `n` the number of basic commutators of weight `c + 1` on
//! two letters. [`baer_engine`] recomputes the group from the free
//! presentation `F / R` with `R = <x1^r, x2^s, gamma_2(F)>`, never using the
//! closed form.
//!
//! Engine reduction. Because `gamma_2(F) <= R`, the numerator
//! `R cap gamma_{c+1}(F)` is all of `gamma_{c+1}(F)`, and the invariant is
//! `gamma_{c+1}(F) / [S, _c F] gamma_{c+2}(F)` with `S` the normal closure of
//! `x1^r, x2^s`. Work in `F / gamma_{c+2}(F)`, whose top layer
//! `gamma_{c+1} / gamma_{c+2}` is free abelian on the weight-`(c+1)` basic
//! commutators. The image of `[S, _c F]` there is spanned by the rows
//! `[u, y_1, ..., y_c]` with `u` in `{x1^r, x2^s}` and `y_i` in `{x1, x2}`:
//! conjugation acts trivially on `gamma_{c+1} / gamma_{c+2}` (as
//! `[gamma_{c+1}, F] = gamma_{c+2}`), the bracket map `S x F^c -> gamma_{c+1}/gamma_{c+2}`
//! is multiplicative in each entry modulo `gamma_{c+2}`, entries from
//! `gamma_2` push the bracket into weight `c + 2`, and inverse letters only
//! negate rows, which a lattice absorbs. The invariant is `Z^n` modulo the
//! row lattice.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::collect::{commutator, make_context, NilElement, NilGroupCtx};
use crate::error::{invalid, Error, Result};
use crate::hall::witt_count;
use crate::lattice::{quotient_invariants, AbelianType, IntMatrix};

pub const DEFAULT_CLASS_CAP: u32 = 6;

type Rows = Arc<Vec<Vec<BigInt>>>;

/// `G = Z_r + Z_s` and the class bound `c` of the variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BaerInput {
    pub r: u64,
    pub s: u64,
    pub c: u32,
}

impl BaerInput {
    pub fn new(r: u64, s: u64, c: u32) -> Result<Self> {
        if r == 0 || s == 0 {
            return Err(invalid("r and s must be positive"));
        }
        if c == 0 {
            return Err(invalid("class c must be at least 1"));
        }
        Ok(BaerInput { r, s, c })
    }

    pub fn d(&self) -> u64 {
        self.r.gcd(&self.s)
    }

    /// Number of cyclic factors in the invariant: basic commutators of weight `c + 1` on two letters.
    pub fn n(&self) -> Result<u64> {
        witt_count(2, self.c + 1)
    }

    /// Invariant factors of `G` itself.
    pub fn group_type(&self) -> Result<AbelianType> {
        AbelianType::from_cyclic_orders(&[self.r, self.s])
    }
}

pub fn baer_formula(input: &BaerInput) -> Result<AbelianType> {
    let d = input.d();
    if d == 1 {
        return Ok(AbelianType::trivial());
    }
    Ok(AbelianType {
        invariants: vec![d; input.n()? as usize],
        free_rank: 0,
    })
}

pub fn baer_engine(input: &BaerInput) -> Result<AbelianType> {
    BaerEngine::new(DEFAULT_CLASS_CAP).compute(input)
}

/// Reusable engine; contexts and relation rows are cached across inputs.
#[derive(Debug)]
pub struct BaerEngine {
    class_cap: u32,
    contexts: Mutex<HashMap<u32, Arc<NilGroupCtx>>>,
    rows: Mutex<HashMap<(u32, u32, u64), Rows>>,
}

impl Default for BaerEngine {
    fn default() -> Self {
        Self::new(DEFAULT_CLASS_CAP)
    }
}

impl BaerEngine {
    pub fn new(class_cap: u32) -> Self {
        BaerEngine {
            class_cap,
            contexts: Mutex::new(HashMap::new()),
            rows: Mutex::new(HashMap::new()),
        }
    }

    fn context(&self, c: u32) -> Result<Arc<NilGroupCtx>> {
        if let Some(ctx) = self.contexts.lock().unwrap().get(&c) {
            return Ok(Arc::clone(ctx));
        }
        let ctx = make_context(2, c + 1)?;
        Ok(Arc::clone(
            self.contexts.lock().unwrap().entry(c).or_insert(ctx),
        ))
    }

    /// Top-layer coordinates of `[x_letter^power, y_1, ..., y_c]` over all
    /// `y` in `{x1, x2}^c`.
    pub fn relation_rows(&self, c: u32, letter: u32, power: u64) -> Result<Rows> {
        let key = (c, letter, power);
        if let Some(rows) = self.rows.lock().unwrap().get(&key) {
            return Ok(Arc::clone(rows));
        }
        let ctx = self.context(c)?;
        let u = ctx.letter(letter)?.pow(&BigInt::from(power))?;
        let ys = [ctx.letter(1)?, ctx.letter(2)?];
        let mut rows = Vec::with_capacity(1 << c);
        extend_rows(&u, &ys, c, c + 1, &mut rows)?;
        let rows = Arc::new(rows);
        self.rows
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| Arc::clone(&rows));
        Ok(rows)
    }

    pub fn compute(&self, input: &BaerInput) -> Result<AbelianType> {
        if input.c > self.class_cap {
            return Err(Error::ResourceLimit {
                what: "class",
                requested: input.c as u128,
                limit: self.class_cap as u128,
            });
        }
        let n = input.n()? as usize;
        let mut all = Vec::new();
        all.extend(self.relation_rows(input.c, 1, input.r)?.iter().cloned());
        all.extend(self.relation_rows(input.c, 2, input.s)?.iter().cloned());
        quotient_invariants(n, &IntMatrix::from_rows(n, all)?)
    }
}

// Depth-first over the tuples so shared prefixes are bracketed once.
fn extend_rows(
    acc: &NilElement,
    ys: &[NilElement; 2],
    remaining: u32,
    top: u32,
    out: &mut Vec<Vec<BigInt>>,
) -> Result<()> {
    if remaining == 0 {
        let coords = acc.layer_coords(top).map_err(|_| {
            Error::Internal(format!("relation {acc} is not in the top layer {top}"))
        })?;
        out.push(coords);
        return Ok(());
    }
    for y in ys {
        let next = commutator(acc, y)?;
        extend_rows(&next, ys, remaining - 1, top, out)?;
    }
    Ok(())
}

/// Both routes and whether they agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaerComparison {
    pub d: u64,
    pub n: u64,
    pub formula: AbelianType,
    pub engine: AbelianType,
    pub agree: bool,
}

pub fn compare(engine: &BaerEngine, input: &BaerInput) -> Result<BaerComparison> {
    let formula = baer_formula(input)?;
    let computed = engine.compute(input)?;
    Ok(BaerComparison {
        d: input.d(),
        n: input.n()?,
        agree: formula == computed,
        formula,
        engine: computed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(fs: &[u64]) -> AbelianType {
        AbelianType {
            invariants: fs.to_vec(),
            free_rank: 0,
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(baer_formula(&BaerInput::new(2, 2, 2).unwrap()).unwrap(), z(&[2, 2]));
        assert_eq!(baer_formula(&BaerInput::new(4, 6, 1).unwrap()).unwrap(), z(&[2]));
        assert!(baer_formula(&BaerInput::new(3, 5, 4).unwrap()).unwrap().is_trivial());
    }

    #[test]
    fn engine_examples() {
        assert_eq!(baer_engine(&BaerInput::new(2, 2, 2).unwrap()).unwrap(), z(&[2, 2]));
        assert_eq!(baer_engine(&BaerInput::new(4, 6, 2).unwrap()).unwrap(), z(&[2, 2]));
        assert!(baer_engine(&BaerInput::new(1, 7, 3).unwrap()).unwrap().is_trivial());
        assert_eq!(baer_engine(&BaerInput::new(4, 6, 1).unwrap()).unwrap(), z(&[2]));
    }

    #[test]
    fn input_validation_and_cap() {
        assert!(BaerInput::new(0, 2, 1).is_err());
        assert!(BaerInput::new(2, 2, 0).is_err());
        let e = BaerEngine::new(2).compute(&BaerInput::new(2, 2, 3).unwrap());
        assert!(matches!(e, Err(Error::ResourceLimit { .. })));
    }
}
