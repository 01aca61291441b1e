//! Integer matrices, Smith normal form and invariants of `Z^n / L`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Dense row-major integer matrix. A matrix may have zero rows (an empty
/// lattice) but always has at least one column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        if cols == 0 {
            return Err(invalid("matrix needs at least one column"));
        }
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(invalid(format!("row of length {} in {cols}-column matrix", r.len())));
            }
            entries.extend(r);
        }
        Ok(IntMatrix {
            rows: n,
            cols,
            entries,
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    fn to_grid(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.cols).map(<[BigInt]>::to_vec).collect()
    }
}

/// Diagonal of the Smith normal form: `min(rows, cols)` nonnegative entries,
/// each dividing the next, zeros last.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.to_grid();
    let (nr, nc) = (m.rows, m.cols);
    let n = nr.min(nc);
    for t in 0..n {
        loop {
            // pivot: smallest nonzero absolute value, row-major scan
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, n);
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            if a[t][t].is_negative() {
                for x in a[t].iter_mut() {
                    *x = -&*x;
                }
            }

            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..nr {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&p);
                for j in t..nc {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..nc {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&p);
                for i in t..nr {
                    let s = &q * &a[i][t];
                    a[i][j] -= s;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // the pivot must divide the rest of the block
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for j in t..nc {
                        let s = a[i][j].clone();
                        a[t][j] += s;
                    }
                }
                None => break,
            }
        }
    }
    finish(a, n)
}

fn finish(a: Vec<Vec<BigInt>>, n: usize) -> Vec<BigInt> {
    (0..n).map(|i| a[i][i].abs()).collect()
}

/// Isomorphism type of a finitely generated abelian group:
/// `Z_{f_1} + ... + Z_{f_t} + Z^free_rank`, `f_1 | f_2 | ... `, all `f_i >= 2`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianType {
    pub invariants: Vec<u64>,
    pub free_rank: usize,
}

impl AbelianType {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Canonical type from arbitrary (possibly non-dividing) cyclic orders.
    pub fn from_cyclic_orders(orders: &[u64]) -> Result<Self> {
        let rows: Vec<Vec<BigInt>> = (0..orders.len())
            .map(|i| {
                (0..orders.len())
                    .map(|j| if i == j { BigInt::from(orders[i]) } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        if orders.is_empty() {
            return Ok(Self::trivial());
        }
        quotient_invariants(orders.len(), &IntMatrix::from_rows(orders.len(), rows)?)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty() && self.free_rank == 0
    }

    /// Order of the group, `None` if infinite or too large.
    pub fn order(&self) -> Option<u128> {
        if self.free_rank > 0 {
            return None;
        }
        self.invariants
            .iter()
            .try_fold(1u128, |acc, &f| acc.checked_mul(f as u128))
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("1");
        }
        let mut parts: Vec<String> = self.invariants.iter().map(|d| format!("Z_{d}")).collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Invariants of `Z^n / rowspace(rows)`.
pub fn quotient_invariants(n: usize, rows: &IntMatrix) -> Result<AbelianType> {
    if rows.cols != n {
        return Err(invalid(format!(
            "relation matrix has {} columns, ambient rank is {n}",
            rows.cols
        )));
    }
    let diag = smith_normal_form(rows);
    let mut invariants = Vec::new();
    let mut nonzero = 0;
    for d in &diag {
        if d.is_zero() {
            continue;
        }
        nonzero += 1;
        if !d.is_one() {
            invariants.push(
                d.to_u64()
                    .ok_or_else(|| Error::Overflow(format!("invariant factor {d}")))?,
            );
        }
    }
    Ok(AbelianType {
        invariants,
        free_rank: n - nonzero,
    })
}
