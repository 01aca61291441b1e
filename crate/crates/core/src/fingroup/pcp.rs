//! Power-commutator presentations of groups of order `p^m`.
//!
//! Generators `g_1..g_m`, relations `g_i^p = w_i` and `[g_j, g_i] = w_{ji}`
//! (`j > i`), where every right-hand side is a normal word
//! `g_{i+1}^{a_{i+1}} ... g_m^{a_m}` (resp. over `g_{j+1}..g_m`) with
//! exponents in `[0, p)`.
//!
//! Text format, one relation per line, `#` comments, unspecified relations trivial:
//! ```text
//! p = 2
//! m = 3
//! g1^2 = 1
//! [g2,g1] = g3
//! ```

use std::fmt;

use super::{FiniteGroup, MAX_TABLE_ORDER};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pcp {
    p: u32,
    m: usize,
    /// `powers[i]`: exponents of `g_i^p`, full length, zero up to `i`.
    powers: Vec<Vec<u32>>,
    /// `comms[j][i]` for `j > i`: exponents of `[g_j, g_i]`, zero up to `j`.
    comms: Vec<Vec<Vec<u32>>>,
}

/// Incremental construction with validation in [`PcpBuilder::build`].
#[derive(Debug, Clone)]
pub struct PcpBuilder {
    pcp: Pcp,
}

impl PcpBuilder {
    /// Sets `g_i^p` (0-based `i`).
    pub fn power(mut self, i: usize, tail: &[u32]) -> Self {
        self.pcp.powers[i] = pad(tail, self.pcp.m);
        self
    }

    /// Sets `[g_j, g_i]` (0-based, `j > i`).
    pub fn commutator(mut self, j: usize, i: usize, tail: &[u32]) -> Self {
        self.pcp.comms[j][i] = pad(tail, self.pcp.m);
        self
    }

    pub fn build(self) -> Result<Pcp> {
        self.pcp.validate()?;
        Ok(self.pcp)
    }
}

fn pad(v: &[u32], m: usize) -> Vec<u32> {
    let mut out = v.to_vec();
    out.resize(m, 0);
    out
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl Pcp {
    pub fn builder(p: u32, m: usize) -> PcpBuilder {
        PcpBuilder {
            pcp: Pcp {
                p,
                m,
                powers: vec![vec![0; m]; m],
                comms: vec![vec![vec![0; m]; m]; m],
            },
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn power_tail(&self, i: usize) -> &[u32] {
        &self.powers[i]
    }

    pub fn commutator_tail(&self, j: usize, i: usize) -> &[u32] {
        &self.comms[j][i]
    }

    /// `p^m`, if it fits the table bound.
    pub fn order(&self) -> Option<usize> {
        (self.p as usize)
            .checked_pow(self.m as u32)
            .filter(|&n| n <= MAX_TABLE_ORDER)
    }

    fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(invalid(format!("{} is not prime", self.p)));
        }
        if self.m == 0 {
            return Err(invalid("presentation needs at least one generator"));
        }
        let bad_entry = |v: &Vec<u32>, after: usize| {
            v.len() != self.m || v.iter().enumerate().any(|(l, &e)| e >= self.p || (l <= after && e != 0))
        };
        for i in 0..self.m {
            if bad_entry(&self.powers[i], i) {
                return Err(invalid(format!("power relation of g{} is not a tail", i + 1)));
            }
            for j in 0..self.m {
                let t = &self.comms[j][i];
                let ok = if j > i { !bad_entry(t, j) } else { t.iter().all(|&e| e == 0) };
                if !ok {
                    return Err(invalid(format!(
                        "commutator relation [g{},g{}] is not a tail",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    fn letters_of(exps: &[u32]) -> impl Iterator<Item = usize> + '_ {
        exps.iter()
            .enumerate()
            .flat_map(|(l, &e)| std::iter::repeat_n(l, e as usize))
    }

    /// `c <- c * word`, collecting from the left with a stack of pending letters.
    pub(crate) fn collect(&self, c: &mut [u32], word: impl IntoIterator<Item = usize>) {
        let mut stack: Vec<usize> = word.into_iter().collect();
        stack.reverse();
        let mut pending = Vec::new();
        while let Some(j) = stack.pop() {
            // c * g_j = prefix . g_j^{c_j + 1} . tail^{g_j}, with g_l^{g_j} = g_l [g_l, g_j]
            pending.clear();
            for l in j + 1..self.m {
                for _ in 0..c[l] {
                    pending.push(l);
                    pending.extend(Self::letters_of(&self.comms[l][j]));
                }
                c[l] = 0;
            }
            c[j] += 1;
            stack.extend(pending.iter().rev());
            if c[j] == self.p {
                c[j] = 0;
                let tail: Vec<usize> = Self::letters_of(&self.powers[j]).collect();
                stack.extend(tail.iter().rev());
            }
        }
    }

    /// Normal form of a product of normal words.
    pub fn multiply(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut c = a.to_vec();
        self.collect(&mut c, Self::letters_of(b).collect::<Vec<_>>());
        c
    }

    fn nf(&self, word: &[usize]) -> Vec<u32> {
        let mut c = vec![0; self.m];
        self.collect(&mut c, word.iter().copied());
        c
    }

    fn unit_power(&self, i: usize, e: u32) -> Vec<u32> {
        let mut v = vec![0; self.m];
        v[i] = e;
        v
    }

    /// Overlap test words; the presentation defines a group of order exactly
    /// `p^m` iff every pair of bracketings collects to the same normal form.
    pub fn is_consistent(&self) -> bool {
        let m = self.m;
        let p = self.p;
        // (g_k g_j) g_i = g_k (g_j g_i)
        for k in 0..m {
            for j in 0..k {
                for i in 0..j {
                    let left = self.multiply(&self.nf(&[k, j]), &self.unit_power(i, 1));
                    let right = self.multiply(&self.unit_power(k, 1), &self.nf(&[j, i]));
                    if left != right {
                        return false;
                    }
                }
            }
        }
        for j in 0..m {
            let gj_p = self.powers[j].clone();
            let gj_pm1 = self.unit_power(j, p - 1);
            // (g_j^p) g_j = g_j (g_j^p)
            if self.multiply(&gj_p, &self.unit_power(j, 1)) != self.multiply(&self.unit_power(j, 1), &gj_p) {
                return false;
            }
            for i in 0..j {
                // (g_j^p) g_i = g_j^{p-1} (g_j g_i)
                let left = self.multiply(&gj_p, &self.unit_power(i, 1));
                let right = self.multiply(&gj_pm1, &self.nf(&[j, i]));
                if left != right {
                    return false;
                }
                // g_j (g_i^p) = (g_j g_i) g_i^{p-1}
                let left = self.multiply(&self.unit_power(j, 1), &self.powers[i]);
                let right = self.multiply(&self.nf(&[j, i]), &self.unit_power(i, p - 1));
                if left != right {
                    return false;
                }
            }
        }
        true
    }

    fn index_of(&self, exps: &[u32]) -> usize {
        exps.iter().fold(0, |acc, &e| acc * self.p as usize + e as usize)
    }

    fn exps_of(&self, mut idx: usize) -> Vec<u32> {
        let mut v = vec![0; self.m];
        for l in (0..self.m).rev() {
            v[l] = (idx % self.p as usize) as u32;
            idx /= self.p as usize;
        }
        v
    }

    /// Full multiplication table of the presented group.
    pub fn materialize(&self) -> Result<FiniteGroup> {
        let n = self.order().ok_or(Error::ResourceLimit {
            what: "group order",
            requested: (self.p as u128).saturating_pow(self.m as u32),
            limit: MAX_TABLE_ORDER as u128,
        })?;
        if !self.is_consistent() {
            return Err(invalid("presentation is inconsistent"));
        }
        let elems: Vec<Vec<u32>> = (0..n).map(|i| self.exps_of(i)).collect();
        // right multiplication by each generator, then products letter by letter
        let mut right = vec![0u32; n * self.m];
        for (a, ea) in elems.iter().enumerate() {
            for j in 0..self.m {
                let mut c = ea.clone();
                self.collect(&mut c, [j]);
                right[a * self.m + j] = self.index_of(&c) as u32;
            }
        }
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for eb in &elems {
                let mut x = a;
                for l in Self::letters_of(eb) {
                    x = right[x * self.m + l] as usize;
                }
                table.push(x as u32);
            }
        }
        let labels = elems.iter().map(|e| word_label(e)).collect();
        FiniteGroup::from_table(n, table, Some(labels))
    }

    pub fn parse(text: &str) -> Result<Pcp> {
        parse(text)
    }
}

fn word_label(e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(l, &x)| if x == 1 { format!("g{}", l + 1) } else { format!("g{}^{x}", l + 1) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

impl fmt::Display for Pcp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "m = {}", self.m)?;
        for i in 0..self.m {
            writeln!(f, "g{}^{} = {}", i + 1, self.p, word_label(&self.powers[i]))?;
        }
        for j in 0..self.m {
            for i in 0..j {
                if self.comms[j][i].iter().any(|&e| e != 0) {
                    writeln!(f, "[g{},g{}] = {}", j + 1, i + 1, word_label(&self.comms[j][i]))?;
                }
            }
        }
        Ok(())
    }
}

fn parse(text: &str) -> Result<Pcp> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut p: Option<u32> = None;
    let mut m: Option<usize> = None;
    let mut powers: Vec<(usize, usize, usize, String)> = Vec::new();
    let mut comms: Vec<(usize, usize, usize, String)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| perr(line_no, format!("expected '=' in {line:?}")))?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        match lhs {
            "p" => p = Some(rhs.parse().map_err(|_| perr(line_no, format!("bad prime {rhs:?}")))?),
            "m" => m = Some(rhs.parse().map_err(|_| perr(line_no, format!("bad length {rhs:?}")))?),
            _ if lhs.starts_with('[') && lhs.ends_with(']') => {
                let inner = &lhs[1..lhs.len() - 1];
                let (a, b) = inner
                    .split_once(',')
                    .ok_or_else(|| perr(line_no, format!("bad commutator {lhs:?}")))?;
                let j = gen_index(a.trim()).ok_or_else(|| perr(line_no, format!("bad generator {a:?}")))?;
                let i = gen_index(b.trim()).ok_or_else(|| perr(line_no, format!("bad generator {b:?}")))?;
                comms.push((line_no, j, i, rhs.to_string()));
            }
            _ => {
                let (g, e) = lhs
                    .split_once('^')
                    .ok_or_else(|| perr(line_no, format!("unrecognized relation {lhs:?}")))?;
                let i = gen_index(g.trim()).ok_or_else(|| perr(line_no, format!("bad generator {g:?}")))?;
                let e: usize = e.trim().parse().map_err(|_| perr(line_no, format!("bad exponent {e:?}")))?;
                powers.push((line_no, i, e, rhs.to_string()));
            }
        }
    }
    let p = p.ok_or_else(|| perr(0, "missing 'p = ...'".into()))?;
    let m = m.ok_or_else(|| perr(0, "missing 'm = ...'".into()))?;
    let mut b = Pcp::builder(p, m);
    for (line, i, e, rhs) in powers {
        if i >= m || e != p as usize {
            return Err(perr(line, format!("power relation must be g_i^{p} with i <= {m}")));
        }
        let tail = parse_tail(&rhs, m, p).map_err(|msg| perr(line, msg))?;
        b = b.power(i, &tail);
    }
    for (line, j, i, rhs) in comms {
        if j >= m || i >= j {
            return Err(perr(line, "commutator relation must be [g_j,g_i] with j > i".into()));
        }
        let tail = parse_tail(&rhs, m, p).map_err(|msg| perr(line, msg))?;
        b = b.commutator(j, i, &tail);
    }
    b.build()
}

fn gen_index(s: &str) -> Option<usize> {
    let n: usize = s.strip_prefix('g')?.parse().ok()?;
    n.checked_sub(1)
}

fn parse_tail(rhs: &str, m: usize, p: u32) -> std::result::Result<Vec<u32>, String> {
    let mut v = vec![0u32; m];
    if rhs == "1" || rhs.is_empty() {
        return Ok(v);
    }
    let mut last: Option<usize> = None;
    for tok in rhs.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
        let (g, e) = match tok.split_once('^') {
            Some((g, e)) => (g, e.parse::<u32>().map_err(|_| format!("bad exponent in {tok:?}"))?),
            None => (tok, 1),
        };
        let l = gen_index(g).ok_or_else(|| format!("bad generator {g:?}"))?;
        if l >= m || e >= p || last.is_some_and(|x| x >= l) {
            return Err(format!("right-hand side {rhs:?} is not a normal word"));
        }
        last = Some(l);
        v[l] = e;
    }
    Ok(v)
}
