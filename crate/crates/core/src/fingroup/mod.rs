//! Small finite groups as materialized multiplication tables, with brute-force
//! subgroup machinery and consistent power-commutator presentations of
//! `p`-groups.

mod pcp;

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;

use crate::baer::{baer_formula, BaerInput};
use crate::error::{invalid, Error, Result};
use crate::lattice::{quotient_invariants, AbelianType, IntMatrix};

pub(crate) use pcp::is_prime;
pub use pcp::{Pcp, PcpBuilder};

/// Largest group the table machinery accepts.
pub const MAX_TABLE_ORDER: usize = 1024;

/// Groups up to this order get the exhaustive associativity check; larger
/// ones use Light's test over a generating set.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverses: Vec<u32>,
    labels: Vec<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup").field("order", &self.order).finish()
    }
}

/// A subgroup, stored as a membership bitset plus its sorted elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    bits: Vec<u64>,
    elements: Vec<u32>,
}

impl Subgroup {
    fn from_members(n: usize, members: &[bool]) -> Self {
        let mut bits = vec![0u64; n.div_ceil(64)];
        let mut elements = Vec::new();
        for (i, &m) in members.iter().enumerate() {
            if m {
                bits[i / 64] |= 1 << (i % 64);
                elements.push(i as u32);
            }
        }
        Subgroup { bits, elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits.get(x / 64).is_some_and(|w| w >> (x % 64) & 1 == 1)
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let bits: Vec<u64> = self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        let elements = self
            .elements
            .iter()
            .copied()
            .filter(|&x| other.contains(x as usize))
            .collect();
        Subgroup { bits, elements }
    }
}

impl FiniteGroup {
    /// Builds a group from a row-major Cayley table, verifying the group axioms.
    pub fn from_table(order: usize, table: Vec<u32>, labels: Option<Vec<String>>) -> Result<Self> {
        if order == 0 {
            return Err(invalid("group must be nonempty"));
        }
        if order > MAX_TABLE_ORDER {
            return Err(Error::ResourceLimit {
                what: "group order",
                requested: order as u128,
                limit: MAX_TABLE_ORDER as u128,
            });
        }
        if table.len() != order * order || table.iter().any(|&x| x as usize >= order) {
            return Err(invalid("table has the wrong shape"));
        }
        let at = |a: usize, b: usize| table[a * order + b] as usize;

        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| invalid("table has no identity"))?;
        let mut inverses = vec![0u32; order];
        for (a, inv) in inverses.iter_mut().enumerate() {
            let b = (0..order)
                .find(|&b| at(a, b) == identity)
                .ok_or_else(|| invalid(format!("element {a} has no right inverse")))?;
            if at(b, a) != identity {
                return Err(invalid(format!("element {a} has no two-sided inverse")));
            }
            *inv = b as u32;
        }
        let labels = labels.unwrap_or_else(|| (0..order).map(|i| format!("e{i}")).collect());
        if labels.len() != order {
            return Err(invalid("label count does not match order"));
        }
        let g = FiniteGroup {
            order,
            table,
            identity,
            inverses,
            labels,
        };
        if order <= EXHAUSTIVE_ASSOC_LIMIT {
            if !g.is_associative_exhaustive() {
                return Err(invalid("table is not associative"));
            }
        } else {
            let gens = g.generating_set();
            if !g.is_associative_light(&gens) {
                return Err(invalid("table is not associative"));
            }
        }
        Ok(g)
    }

    /// The group on `Z_{n_1} x ... x Z_{n_t}` given by `op`, which must be
    /// a group law on mixed-radix tuples.
    pub fn from_tuples(
        moduli: &[u64],
        op: impl Fn(&[u64], &[u64]) -> Vec<u64>,
    ) -> Result<Self> {
        let order = moduli.iter().try_fold(1usize, |acc, &m| {
            acc.checked_mul(m as usize).filter(|&o| o <= MAX_TABLE_ORDER)
        });
        let order = order.ok_or(Error::ResourceLimit {
            what: "group order",
            requested: moduli.iter().map(|&m| m as u128).product(),
            limit: MAX_TABLE_ORDER as u128,
        })?;
        let decode = |mut i: usize| -> Vec<u64> {
            let mut t = vec![0; moduli.len()];
            for k in (0..moduli.len()).rev() {
                t[k] = (i as u64) % moduli[k];
                i /= moduli[k] as usize;
            }
            t
        };
        let encode = |t: &[u64]| -> usize {
            t.iter()
                .zip(moduli)
                .fold(0usize, |acc, (&x, &m)| acc * m as usize + (x % m) as usize)
        };
        let tuples: Vec<Vec<u64>> = (0..order).map(decode).collect();
        let mut table = Vec::with_capacity(order * order);
        for a in &tuples {
            for b in &tuples {
                table.push(encode(&op(a, b)) as u32);
            }
        }
        let labels = tuples
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().map(u64::to_string).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        Self::from_table(order, table, Some(labels))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn is_associative_exhaustive(&self) -> bool {
        let n = self.order;
        (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = self.mul(a, b);
                (0..n).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        })
    }

    /// Light's test: `(x s) y = x (s y)` for every generator `s`.
    fn is_associative_light(&self, gens: &[usize]) -> bool {
        let n = self.order;
        gens.iter().all(|&s| {
            (0..n).all(|x| {
                let xs = self.mul(x, s);
                (0..n).all(|y| self.mul(xs, y) == self.mul(x, self.mul(s, y)))
            })
        })
    }

    /// Greedy generating set; the closure is over right multiplication,
    /// which does not presuppose associativity.
    fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut reached = vec![false; self.order];
        reached[self.identity] = true;
        let mut count = 1;
        while count < self.order {
            let g = (0..self.order).find(|&x| !reached[x]).unwrap();
            gens.push(g);
            count = self.close_right(&mut reached, &gens);
        }
        gens
    }

    fn close_right(&self, members: &mut [bool], gens: &[usize]) -> usize {
        let mut queue: Vec<usize> = (0..self.order).filter(|&x| members[x]).collect();
        let mut count = queue.len();
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !members[y] {
                    members[y] = true;
                    count += 1;
                    queue.push(y);
                }
            }
        }
        count
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        let mut m = vec![false; self.order];
        m[self.identity] = true;
        Subgroup::from_members(self.order, &m)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_members(self.order, &vec![true; self.order])
    }

    /// Subgroup generated by `gens`.
    pub fn generated(&self, gens: &[usize]) -> Subgroup {
        let mut m = vec![false; self.order];
        m[self.identity] = true;
        self.close_right(&mut m, gens);
        Subgroup::from_members(self.order, &m)
    }

    /// Subgroup generated by `h` and `g`.
    pub fn join(&self, h: &Subgroup, g: usize) -> Subgroup {
        let mut m: Vec<bool> = (0..self.order).map(|x| h.contains(x)).collect();
        let mut gens: Vec<usize> = h.elements.iter().map(|&x| x as usize).collect();
        gens.push(g);
        self.close_right(&mut m, &gens);
        Subgroup::from_members(self.order, &m)
    }

    /// Subgroup generated by the members of a candidate set, adding generators
    /// one at a time only when they are not yet reached.
    fn generated_by_set(&self, candidates: &[bool]) -> Subgroup {
        let mut m = vec![false; self.order];
        m[self.identity] = true;
        let mut gens = Vec::new();
        for x in 0..self.order {
            if candidates[x] && !m[x] {
                gens.push(x);
                self.close_right(&mut m, &gens);
            }
        }
        Subgroup::from_members(self.order, &m)
    }

    /// `[H, K]`.
    pub fn commutator_subgroup(&self, h: &Subgroup, k: &Subgroup) -> Subgroup {
        let mut cand = vec![false; self.order];
        for &x in &h.elements {
            for &y in &k.elements {
                cand[self.commutator(x as usize, y as usize)] = true;
            }
        }
        self.generated_by_set(&cand)
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        (0..self.order).all(|g| {
            let gi = self.inv(g);
            h.elements
                .iter()
                .all(|&x| h.contains(self.mul(gi, self.mul(x as usize, g))))
        })
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// `gamma_1 = G, gamma_2, ...` ending at the first term equal to its successor.
    pub fn lower_central(&self) -> Vec<Subgroup> {
        let whole = self.whole();
        let mut series = vec![whole.clone()];
        loop {
            let next = self.commutator_subgroup(series.last().unwrap(), &whole);
            if &next == series.last().unwrap() {
                return series;
            }
            series.push(next);
        }
    }

    /// `Z_0 = 1, Z_1, ...` ending at the first term equal to its successor.
    pub fn upper_central(&self) -> Vec<Subgroup> {
        let mut series = vec![self.trivial_subgroup()];
        loop {
            let z = series.last().unwrap();
            let members: Vec<bool> = (0..self.order)
                .map(|x| (0..self.order).all(|g| z.contains(self.commutator(x, g))))
                .collect();
            let next = Subgroup::from_members(self.order, &members);
            if &next == z {
                return series;
            }
            series.push(next);
        }
    }

    pub fn center(&self) -> Subgroup {
        let z = self.upper_central();
        z.get(1).cloned().unwrap_or_else(|| self.trivial_subgroup())
    }

    /// `gamma_i(G)` for `i >= 1`, extending the stabilized series.
    pub fn gamma(&self, lower: &[Subgroup], i: usize) -> Subgroup {
        lower[(i - 1).min(lower.len() - 1)].clone()
    }

    /// `Z_i(G)` for `i >= 0`, extending the stabilized series.
    pub fn zeta(&self, upper: &[Subgroup], i: usize) -> Subgroup {
        upper[i.min(upper.len() - 1)].clone()
    }

    /// Nilpotency class, or `None` if the lower central series stalls above 1.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let lower = self.lower_central();
        (lower.last().unwrap().order() == 1).then(|| lower.len() - 1)
    }

    /// Invariant factors of `G / N` for normal `N` with abelian quotient.
    pub fn abelian_invariants(&self, n: &Subgroup) -> Result<AbelianType> {
        if !self.is_normal(n) {
            return Err(Error::NotNormal);
        }
        for a in 0..self.order {
            for b in 0..a {
                if !n.contains(self.commutator(a, b)) {
                    return Err(Error::NonAbelianQuotient);
                }
            }
        }
        // Polycyclic generating sequence h_1..h_t of G/N with relative orders o_i;
        // row i encodes h_i^{o_i} = prod_{j<i} h_j^{a_j} modulo N.
        let mut label: Vec<Option<Vec<i64>>> = vec![None; self.order];
        for &x in &n.elements {
            label[x as usize] = Some(Vec::new());
        }
        let mut span: Vec<usize> = n.elements.iter().map(|&x| x as usize).collect();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        while span.len() < self.order {
            let h = (0..self.order).find(|&x| label[x].is_none()).unwrap();
            let t = rows.len();
            let mut power = h;
            let mut rel = 1i64;
            while label[power].is_none() {
                power = self.mul(power, h);
                rel += 1;
            }
            let mut row = vec![0i64; t + 1];
            row[t] = rel;
            for (j, a) in label[power].as_ref().unwrap().iter().enumerate() {
                row[j] -= a;
            }
            rows.push(row);
            // extend the span by the cosets h^e, 0 < e < rel
            let mut fresh = Vec::new();
            let mut he = self.identity;
            for e in 1..rel {
                he = self.mul(he, h);
                for &x in &span {
                    let y = self.mul(x, he);
                    if label[y].is_none() {
                        let mut l = label[x].clone().unwrap();
                        l.resize(t + 1, 0);
                        l[t] = e;
                        label[y] = Some(l);
                        fresh.push(y);
                    }
                }
            }
            span.extend(fresh);
        }
        let t = rows.len();
        if t == 0 {
            return Ok(AbelianType::trivial());
        }
        let rows: Vec<Vec<BigInt>> = rows
            .into_iter()
            .map(|mut r| {
                r.resize(t, 0);
                r.into_iter().map(BigInt::from).collect()
            })
            .collect();
        quotient_invariants(t, &IntMatrix::from_rows(t, rows)?)
    }

    /// `H` as a group in its own right.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> Result<FiniteGroup> {
        let idx: std::collections::HashMap<u32, u32> = h
            .elements
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as u32))
            .collect();
        let k = h.order();
        let mut table = Vec::with_capacity(k * k);
        for &a in &h.elements {
            for &b in &h.elements {
                let c = self.mul(a as usize, b as usize) as u32;
                table.push(*idx.get(&c).ok_or_else(|| invalid("set is not closed"))?);
            }
        }
        let labels = h.elements.iter().map(|&x| self.labels[x as usize].clone()).collect();
        FiniteGroup::from_table(k, table, Some(labels))
    }

    /// Every subgroup of order `k`, optionally only the normal ones, sorted by
    /// element set.
    pub fn subgroups_of_order(&self, k: usize, normal_only: bool) -> Result<Vec<Subgroup>> {
        if k == 0 || self.order % k != 0 {
            return Err(invalid(format!("{k} does not divide |G| = {}", self.order)));
        }
        // Every subgroup H arises from a chain 1 < <h1> < <h1,h2> < ... = H
        // whose orders all divide |H|.
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let trivial = self.trivial_subgroup();
        seen.insert(trivial.bits.clone());
        let mut out = Vec::new();
        if k == 1 {
            out.push(trivial.clone());
        }
        let mut frontier = vec![trivial];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for h in &frontier {
                for g in 0..self.order {
                    if h.contains(g) {
                        continue;
                    }
                    let j = self.join(h, g);
                    if k % j.order() != 0 || !seen.insert(j.bits.clone()) {
                        continue;
                    }
                    if j.order() == k {
                        out.push(j.clone());
                    } else {
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        if normal_only {
            out.retain(|h| self.is_normal(h));
        }
        out.sort_by(|a, b| a.elements.cmp(&b.elements));
        Ok(out)
    }

    /// Whether `1 -> A -> G* -> Z_r + Z_s -> 1` (with `G* = self`) is a stem
    /// cover for the class-`c` nilpotent variety.
    pub fn is_stem_cover(&self, a: &Subgroup, input: &BaerInput) -> Result<bool> {
        StemCoverCheck::new(self, input)?.check(a)
    }
}

/// Stem-cover test for one group and input, with the central series and
/// target invariants computed once.
///
/// `A` passes when it is normal, `A <= gamma_{c+1}(G*) cap Z_c(G*)`,
/// `G*/A` has the invariants of `Z_r + Z_s`, and `A` is abelian with the
/// invariants of the Baer invariant.
#[derive(Debug)]
pub struct StemCoverCheck<'g> {
    group: &'g FiniteGroup,
    lower: Vec<Subgroup>,
    upper: Vec<Subgroup>,
    c: usize,
    quotient_type: AbelianType,
    kernel_type: AbelianType,
}

/// How far a candidate kernel got through the stem-cover conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StemCoverTrace {
    pub normal: bool,
    pub in_marginal: bool,
    pub in_verbal: bool,
    pub quotient_matches: bool,
    pub kernel_matches: bool,
}

impl StemCoverTrace {
    pub fn passes(&self) -> bool {
        self.normal && self.in_marginal && self.in_verbal && self.quotient_matches && self.kernel_matches
    }
}

impl<'g> StemCoverCheck<'g> {
    pub fn new(group: &'g FiniteGroup, input: &BaerInput) -> Result<Self> {
        Ok(StemCoverCheck {
            group,
            lower: group.lower_central(),
            upper: group.upper_central(),
            c: input.c as usize,
            quotient_type: input.group_type()?,
            kernel_type: baer_formula(input)?,
        })
    }

    pub fn lower_central(&self) -> &[Subgroup] {
        &self.lower
    }

    pub fn upper_central(&self) -> &[Subgroup] {
        &self.upper
    }

    /// `gamma_{c+1}(G*) cap Z_c(G*)`; every passing kernel lies inside it.
    pub fn verbal_marginal(&self) -> Subgroup {
        let g = self.group;
        g.gamma(&self.lower, self.c + 1)
            .intersection(&g.zeta(&self.upper, self.c))
    }

    pub fn check(&self, a: &Subgroup) -> Result<bool> {
        Ok(self.trace(a)?.passes())
    }

    /// Evaluates every condition independently.
    pub fn trace(&self, a: &Subgroup) -> Result<StemCoverTrace> {
        let g = self.group;
        let normal = g.is_normal(a);
        let in_verbal = a.is_subset_of(&g.gamma(&self.lower, self.c + 1));
        let in_marginal = a.is_subset_of(&g.zeta(&self.upper, self.c));
        let quotient_matches = normal
            && match g.abelian_invariants(a) {
                Ok(t) => t == self.quotient_type,
                Err(Error::NonAbelianQuotient) => false,
                Err(e) => return Err(e),
            };
        let kernel_matches = {
            let ag = g.subgroup_as_group(a)?;
            ag.is_abelian() && ag.abelian_invariants(&ag.trivial_subgroup())? == self.kernel_type
        };
        Ok(StemCoverTrace {
            normal,
            in_marginal,
            in_verbal,
            quotient_matches,
            kernel_matches,
        })
    }
}

/// Summary of a group used in reports.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GroupSummary {
    pub order: usize,
    pub center_order: usize,
    pub nilpotency_class: Option<usize>,
    pub lower_central_orders: Vec<usize>,
    pub upper_central_orders: Vec<usize>,
    pub abelianization: AbelianType,
}

impl FiniteGroup {
    pub fn summary(&self) -> Result<GroupSummary> {
        let lower = self.lower_central();
        let upper = self.upper_central();
        let class = (lower.last().unwrap().order() == 1).then(|| lower.len() - 1);
        Ok(GroupSummary {
            order: self.order,
            center_order: upper.get(1).map_or(1, Subgroup::order),
            nilpotency_class: class,
            lower_central_orders: lower.iter().map(Subgroup::order).collect(),
            upper_central_orders: upper.iter().map(Subgroup::order).collect(),
            abelianization: self.abelian_invariants(&lower.get(1).cloned().unwrap_or_else(|| self.trivial_subgroup()))?,
        })
    }
}
