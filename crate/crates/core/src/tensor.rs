//! Symmetric tensors stored by sorted index tuples, their contractions, the
//! product-moment formula for two elements of the same chaos, and the
//! line-oriented text format for real tensors and complex kernels.
//!
//! Indices are zero-based in the API and one-based in the text format.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{ChaosError, Result};
use crate::exact::{
    binomial_q, cint, cq, factorial_q, format_rational, is_czero, multinomial, parse_rational,
    rat, ComplexRational, Rational,
};

/// Run lengths of a sorted tuple, e.g. `[0, 0, 2] -> [2, 1]`.
pub fn multiplicities(sorted: &[usize]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::new();
    let mut prev = None;
    for &i in sorted {
        if prev == Some(i) {
            *out.last_mut().expect("run started") += 1;
        } else {
            out.push(1);
            prev = Some(i);
        }
    }
    out
}

/// Number of distinct orderings of a sorted tuple.
pub fn tuple_multinomial(sorted: &[usize]) -> BigInt {
    multinomial(&multiplicities(sorted))
}

fn mult_q(sorted: &[usize]) -> Rational {
    Rational::from_integer(tuple_multinomial(sorted))
}

/// All distinct orderings of a sorted tuple, in lexicographic order.
pub fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

fn check_indices(idx: &[usize], dim: usize) -> Result<()> {
    match idx.iter().find(|&&i| i >= dim) {
        Some(&i) => Err(ChaosError::IndexOutOfRange { index: i, dim }),
        None => Ok(()),
    }
}

/// Fully symmetric element of the `p`-th tensor power of `R^D`. The value at
/// a sorted tuple is the dense tensor entry shared by all its orderings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymTensor {
    order: usize,
    dim: usize,
    entries: BTreeMap<Vec<usize>, Rational>,
}

impl SymTensor {
    pub fn zero(order: usize, dim: usize) -> Self {
        Self {
            order,
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// Builds from dense-entry values keyed by (possibly unsorted) tuples.
    /// Two keys that sort to the same tuple must carry the same value.
    pub fn from_entries<I>(order: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut out = Self::zero(order, dim);
        for (mut idx, v) in entries {
            if idx.len() != order {
                return Err(ChaosError::ShapeMismatch(format!(
                    "tuple of length {} in a tensor of order {order}",
                    idx.len()
                )));
            }
            check_indices(&idx, dim)?;
            idx.sort_unstable();
            if let Some(prev) = out.entries.get(&idx) {
                if prev != &v {
                    return Err(ChaosError::ShapeMismatch(format!(
                        "conflicting values for symmetric entry {idx:?}"
                    )));
                }
                continue;
            }
            if !v.is_zero() {
                out.entries.insert(idx, v);
            }
        }
        Ok(out)
    }

    /// `h^{⊗p}`.
    pub fn tensor_power(h: &[Rational], p: usize) -> Self {
        let dim = h.len();
        let mut out = Self::zero(p, dim);
        for idx in sorted_tuples(p, dim) {
            let v = idx.iter().fold(rat(1), |acc, &i| acc * &h[i]);
            if !v.is_zero() {
                out.entries.insert(idx, v);
            }
        }
        out
    }

    /// `symm(e_{i_1} ⊗ … ⊗ e_{i_p})`.
    pub fn basis(idx: &[usize], dim: usize) -> Result<Self> {
        check_indices(idx, dim)?;
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        let v = rat(1) / mult_q(&sorted);
        let mut out = Self::zero(idx.len(), dim);
        out.entries.insert(sorted, v);
        Ok(out)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, idx: &[usize]) -> Rational {
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        self.entries.get(&sorted).cloned().unwrap_or_else(|| rat(0))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.order, self.dim);
        if !c.is_zero() {
            for (k, v) in &self.entries {
                out.entries.insert(k.clone(), v * c);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_shape(self, other)?;
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let slot = out.entries.entry(k.clone()).or_insert_with(|| rat(0));
            *slot += v;
            if slot.is_zero() {
                out.entries.remove(k);
            }
        }
        Ok(out)
    }

    pub fn norm_sq(&self) -> Rational {
        self.entries
            .iter()
            .map(|(k, v)| mult_q(k) * v * v)
            .fold(rat(0), |a, b| a + b)
    }

    /// Every ordered tuple with its entry.
    pub fn ordered_entries(&self) -> Vec<(Vec<usize>, Rational)> {
        let mut out = Vec::new();
        for (k, v) in &self.entries {
            for perm in distinct_permutations(k) {
                out.push((perm, v.clone()));
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.order, self.dim);
        for (k, v) in &self.entries {
            for i in k {
                let _ = write!(s, "{} ", i + 1);
            }
            let _ = writeln!(s, "{}", format_rational(v));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = data_lines(text);
        let (hline, header) = lines
            .next()
            .ok_or(ChaosError::Parse { line: 0, msg: "missing header".into() })?;
        let dims = parse_usizes(&header, hline)?;
        let [order, dim] = dims[..] else {
            return Err(ChaosError::Parse {
                line: hline,
                msg: format!("header needs `p D`, got {} fields", dims.len()),
            });
        };
        let mut entries = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (line, fields) in lines {
            if fields.len() != order + 1 {
                return Err(ChaosError::Parse {
                    line,
                    msg: format!("expected {} indices and a value", order),
                });
            }
            let idx = parse_indices(&fields[..order], dim, line)?;
            let mut key = idx.clone();
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(ChaosError::Parse { line, msg: "duplicate entry".into() });
            }
            let v = parse_number(&fields[order], line)?;
            entries.push((idx, v));
        }
        Self::from_entries(order, dim, entries)
    }
}

fn same_shape(f: &SymTensor, g: &SymTensor) -> Result<()> {
    if f.order != g.order || f.dim != g.dim {
        return Err(ChaosError::ShapeMismatch(format!(
            "order {} dim {} vs order {} dim {}",
            f.order, f.dim, g.order, g.dim
        )));
    }
    Ok(())
}

/// All non-decreasing tuples of length `p` over `0..dim`.
pub fn sorted_tuples(p: usize, dim: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(p: usize, dim: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(p, dim, i, cur, out);
            cur.pop();
        }
    }
    rec(p, dim, 0, &mut cur, &mut out);
    out
}

/// A tensor without symmetry, keyed by ordered tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTensor {
    order: usize,
    dim: usize,
    entries: HashMap<Vec<usize>, Rational>,
}

impl RawTensor {
    pub fn new(order: usize, dim: usize) -> Self {
        Self {
            order,
            dim,
            entries: HashMap::new(),
        }
    }

    pub fn add_entry(&mut self, idx: Vec<usize>, v: Rational) -> Result<()> {
        if idx.len() != self.order {
            return Err(ChaosError::ShapeMismatch(format!(
                "tuple of length {} in a tensor of order {}",
                idx.len(),
                self.order
            )));
        }
        check_indices(&idx, self.dim)?;
        let slot = self.entries.entry(idx).or_insert_with(|| rat(0));
        *slot += v;
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, idx: &[usize]) -> Rational {
        self.entries.get(idx).cloned().unwrap_or_else(|| rat(0))
    }

    pub fn norm_sq(&self) -> Rational {
        self.entries.values().map(|v| v * v).fold(rat(0), |a, b| a + b)
    }

    /// Average over all orderings of the slots.
    pub fn symmetrize(&self) -> SymTensor {
        let mut sums: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (k, v) in &self.entries {
            let mut key = k.clone();
            key.sort_unstable();
            *sums.entry(key).or_insert_with(|| rat(0)) += v;
        }
        let mut out = SymTensor::zero(self.order, self.dim);
        for (k, s) in sums {
            let v = s / mult_q(&k);
            if !v.is_zero() {
                out.entries.insert(k, v);
            }
        }
        out
    }
}

/// Symmetrizes raw ordered entries; the result's value at `S` is the sum of
/// `raw[u]` over orderings `u` of `S`, divided by their number.
pub fn symmetrize<I>(raw: I, order: usize, dim: usize) -> Result<SymTensor>
where
    I: IntoIterator<Item = (Vec<usize>, Rational)>,
{
    let mut t = RawTensor::new(order, dim);
    for (k, v) in raw {
        t.add_entry(k, v)?;
    }
    Ok(t.symmetrize())
}

pub fn inner(f: &SymTensor, g: &SymTensor) -> Result<Rational> {
    same_shape(f, g)?;
    let (small, large) = if f.entries.len() <= g.entries.len() { (f, g) } else { (g, f) };
    Ok(small
        .entries
        .iter()
        .filter_map(|(k, v)| large.entries.get(k).map(|w| mult_q(k) * v * w))
        .fold(rat(0), |a, b| a + b))
}

/// `u ⊗_r v`: the last `r` slots of `u` are paired with the last `r` slots of
/// `v`; the result carries `u`'s free slots first.
pub fn contract(u: &SymTensor, v: &SymTensor, r: usize) -> Result<RawTensor> {
    same_shape(u, v)?;
    let q = u.order;
    if r > q {
        return Err(ChaosError::ContractionOrder { r, q });
    }
    let group = |t: &SymTensor| {
        let mut by_tail: HashMap<Vec<usize>, Vec<(Vec<usize>, Rational)>> = HashMap::new();
        for (idx, val) in t.ordered_entries() {
            let (head, tail) = idx.split_at(q - r);
            by_tail.entry(tail.to_vec()).or_default().push((head.to_vec(), val));
        }
        by_tail
    };
    let gu = group(u);
    let gv = group(v);
    let mut out = RawTensor::new(2 * (q - r), u.dim);
    for (tail, us) in &gu {
        let Some(vs) = gv.get(tail) else { continue };
        for (a, x) in us {
            for (b, y) in vs {
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                *out.entries.entry(idx).or_insert_with(|| rat(0)) += x * y;
            }
        }
    }
    out.entries.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// `u ⊗̃_r v`, the symmetrization of [`contract`].
pub fn contract_sym(u: &SymTensor, v: &SymTensor, r: usize) -> Result<SymTensor> {
    Ok(contract(u, v, r)?.symmetrize())
}

/// `E[U²V²]` for `U = I_q(u)`, `V = I_q(v)` from inner products and
/// contraction norms.
pub fn prod_moment(u: &SymTensor, v: &SymTensor) -> Result<Rational> {
    same_shape(u, v)?;
    let q = u.order as u32;
    if q == 0 {
        return Err(ChaosError::ShapeMismatch("product moment needs order q ≥ 1".into()));
    }
    let qf = factorial_q(q);
    let euv = &qf * inner(u, v)?;
    let eu2 = &qf * u.norm_sq();
    let ev2 = &qf * v.norm_sq();
    let mut total = rat(2) * &euv * &euv + eu2 * ev2;
    for r in 1..q {
        let c = binomial_q(q, r);
        let raw = contract(u, v, r as usize)?;
        let full = &qf * &qf * raw.norm_sq();
        let rf = factorial_q(r);
        let sym = &rf * &rf * &c * &c * factorial_q(2 * q - 2 * r) * raw.symmetrize().norm_sq();
        total += &c * &c * (full + sym);
    }
    Ok(total)
}

/// Element of `ℌ_ℂ^{⊙m} ⊗ ℌ_ℂ^{⊙n}` stored by pairs of sorted tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexKernel {
    m: usize,
    n: usize,
    dim: usize,
    entries: BTreeMap<(Vec<usize>, Vec<usize>), ComplexRational>,
}

impl ComplexKernel {
    pub fn zero(m: usize, n: usize, dim: usize) -> Self {
        Self {
            m,
            n,
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// Sets the dense entry shared by all orderings of `a` and of `b`.
    pub fn set(&mut self, mut a: Vec<usize>, mut b: Vec<usize>, v: ComplexRational) -> Result<()> {
        if a.len() != self.m || b.len() != self.n {
            return Err(ChaosError::ShapeMismatch(format!(
                "tuples of lengths ({}, {}) in a kernel of bidegree ({}, {})",
                a.len(),
                b.len(),
                self.m,
                self.n
            )));
        }
        check_indices(&a, self.dim)?;
        check_indices(&b, self.dim)?;
        a.sort_unstable();
        b.sort_unstable();
        if is_czero(&v) {
            self.entries.remove(&(a, b));
        } else {
            self.entries.insert((a, b), v);
        }
        Ok(())
    }

    /// `h^{⊗m} ⊗ h̄^{⊗n}`.
    pub fn rank_one(h: &[ComplexRational], m: usize, n: usize) -> Self {
        let dim = h.len();
        let mut out = Self::zero(m, n, dim);
        let ta = sorted_tuples(m, dim);
        let tb = sorted_tuples(n, dim);
        for a in &ta {
            let va = a.iter().fold(cint(1), |acc, &i| acc * h[i].clone());
            for b in &tb {
                let v = b.iter().fold(va.clone(), |acc, &i| acc * h[i].conj());
                if !is_czero(&v) {
                    out.entries.insert((a.clone(), b.clone()), v);
                }
            }
        }
        out
    }

    /// `symm(e_a) ⊗ symm(ē_b)`.
    pub fn basis(a: &[usize], b: &[usize], dim: usize) -> Result<Self> {
        let mut out = Self::zero(a.len(), b.len(), dim);
        let mut sa = a.to_vec();
        let mut sb = b.to_vec();
        sa.sort_unstable();
        sb.sort_unstable();
        let w = rat(1) / (mult_q(&sa) * mult_q(&sb));
        out.set(sa, sb, cq(w, rat(0)))?;
        Ok(out)
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: &[usize], b: &[usize]) -> ComplexRational {
        let mut sa = a.to_vec();
        let mut sb = b.to_vec();
        sa.sort_unstable();
        sb.sort_unstable();
        self.entries.get(&(sa, sb)).cloned().unwrap_or_else(|| cint(0))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Vec<usize>, Vec<usize>), &ComplexRational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        let mut out = Self::zero(self.m, self.n, self.dim);
        for (k, v) in &self.entries {
            let w = v.clone() * c.clone();
            if !is_czero(&w) {
                out.entries.insert(k.clone(), w);
            }
        }
        out
    }

    /// `⟨φ, ψ⟩ = Σ mult(a) mult(b) φ[a,b] conj(ψ[a,b])`.
    pub fn inner(&self, other: &Self) -> Result<ComplexRational> {
        if self.bidegree() != other.bidegree() || self.dim != other.dim {
            return Err(ChaosError::ShapeMismatch(format!(
                "kernels ({}, {}) dim {} and ({}, {}) dim {}",
                self.m, self.n, self.dim, other.m, other.n, other.dim
            )));
        }
        let mut acc = cint(0);
        for (k, v) in &self.entries {
            if let Some(w) = other.entries.get(k) {
                let weight = mult_q(&k.0) * mult_q(&k.1);
                acc += v.clone() * w.conj() * cq(weight, rat(0));
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> Rational {
        self.inner(self).expect("same shape").re
    }

    /// Copy with every index shifted by `offset`, living in dimension `dim`.
    pub fn embed(&self, offset: usize, dim: usize) -> Result<Self> {
        if offset + self.dim > dim {
            return Err(ChaosError::ShapeMismatch(format!(
                "cannot place dimension {} at offset {offset} inside {dim}",
                self.dim
            )));
        }
        let shift = |t: &Vec<usize>| t.iter().map(|i| i + offset).collect::<Vec<_>>();
        Ok(Self {
            m: self.m,
            n: self.n,
            dim,
            entries: self
                .entries
                .iter()
                .map(|((a, b), v)| ((shift(a), shift(b)), v.clone()))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.bidegree() != other.bidegree() || self.dim != other.dim {
            return Err(ChaosError::ShapeMismatch(format!(
                "cannot add kernels ({}, {}) dim {} and ({}, {}) dim {}",
                self.m, self.n, self.dim, other.m, other.n, other.dim
            )));
        }
        let mut out = self.clone();
        for ((a, b), v) in &other.entries {
            let cur = out.get(a, b);
            out.set(a.clone(), b.clone(), cur + v.clone())?;
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.m, self.n, self.dim);
        for ((a, b), v) in &self.entries {
            for i in a.iter().chain(b) {
                let _ = write!(s, "{} ", i + 1);
            }
            let _ = writeln!(s, "{} {}", format_rational(&v.re), format_rational(&v.im));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = data_lines(text);
        let (hline, header) = lines
            .next()
            .ok_or(ChaosError::Parse { line: 0, msg: "missing header".into() })?;
        let dims = parse_usizes(&header, hline)?;
        let [m, n, dim] = dims[..] else {
            return Err(ChaosError::Parse {
                line: hline,
                msg: format!("header needs `m n D`, got {} fields", dims.len()),
            });
        };
        let mut out = Self::zero(m, n, dim);
        for (line, fields) in lines {
            if fields.len() != m + n + 2 {
                return Err(ChaosError::Parse {
                    line,
                    msg: format!("expected {} indices and a `re im` pair", m + n),
                });
            }
            let mut a = parse_indices(&fields[..m], dim, line)?;
            let mut b = parse_indices(&fields[m..m + n], dim, line)?;
            a.sort_unstable();
            b.sort_unstable();
            if out.entries.contains_key(&(a.clone(), b.clone())) {
                return Err(ChaosError::Parse { line, msg: "duplicate entry".into() });
            }
            let re = parse_number(&fields[m + n], line)?;
            let im = parse_number(&fields[m + n + 1], line)?;
            out.set(a, b, cq(re, im)).map_err(|e| ChaosError::Parse { line, msg: e.to_string() })?;
        }
        Ok(out)
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<String>)> + '_ {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            None
        } else {
            Some((i + 1, l.split_whitespace().map(str::to_string).collect()))
        }
    })
}

fn parse_usizes(fields: &[String], line: usize) -> Result<Vec<usize>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>().map_err(|_| ChaosError::Parse {
                line,
                msg: format!("`{f}` is not a nonnegative integer"),
            })
        })
        .collect()
}

fn parse_indices(fields: &[String], dim: usize, line: usize) -> Result<Vec<usize>> {
    let raw = parse_usizes(fields, line)?;
    raw.into_iter()
        .map(|i| {
            if i == 0 || i > dim {
                Err(ChaosError::Parse {
                    line,
                    msg: format!("index {i} outside 1..={dim}"),
                })
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

/// Accepts `n`, `n/d` or a finite decimal such as `-0.125`, all read exactly.
pub fn parse_number(s: &str, line: usize) -> Result<Rational> {
    if let Some(q) = parse_rational(s) {
        return Ok(q);
    }
    parse_decimal(s).ok_or_else(|| ChaosError::Parse {
        line,
        msg: format!("`{s}` is not a rational or decimal number"),
    })
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().ok()? / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = Rational::from_integer(digits);
    if scale >= 0 {
        q *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -q } else { q })
}

/// Dense brute-force contraction, kept as a test oracle.
pub fn contract_dense(u: &SymTensor, v: &SymTensor, r: usize) -> Result<RawTensor> {
    same_shape(u, v)?;
    let q = u.order;
    if r > q {
        return Err(ChaosError::ContractionOrder { r, q });
    }
    let d = u.dim;
    let mut out = RawTensor::new(2 * (q - r), d);
    for a in all_tuples(q - r, d) {
        for b in all_tuples(q - r, d) {
            let mut acc = rat(0);
            for c in all_tuples(r, d) {
                let mut ia = a.clone();
                ia.extend_from_slice(&c);
                let mut ib = b.clone();
                ib.extend_from_slice(&c);
                acc += u.get(&ia) * v.get(&ib);
            }
            if !acc.is_zero() {
                let mut idx = a.clone();
                idx.extend_from_slice(&b);
                out.entries.insert(idx, acc);
            }
        }
    }
    Ok(out)
}

fn all_tuples(p: usize, dim: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..p {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..dim).map(move |i| {
                    let mut t2 = t.clone();
                    t2.push(i);
                    t2
                })
            })
            .collect();
    }
    out
}

/// True when `x ≥ 0`, for readable gap checks.
pub fn nonnegative(x: &Rational) -> bool {
    !x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn e(i: usize, d: usize) -> Vec<Rational> {
        (0..d).map(|j| if i == j { rat(1) } else { rat(0) }).collect()
    }

    #[test]
    fn symmetrize_examples() {
        let s = symmetrize([(vec![0, 1], rat(1))], 2, 2).unwrap();
        assert_eq!(s.get(&[0, 1]), ratio(1, 2));
        assert_eq!(s.get(&[1, 0]), ratio(1, 2));
        let again = symmetrize(s.ordered_entries(), 2, 2).unwrap();
        assert_eq!(again, s);
        let s = symmetrize([(vec![0, 0], rat(1))], 2, 2).unwrap();
        assert_eq!(s.get(&[0, 0]), rat(1));
        assert!(symmetrize([(vec![0, 2], rat(1))], 2, 2).is_err());
    }

    #[test]
    fn inner_examples() {
        let e11 = SymTensor::tensor_power(&e(0, 2), 2);
        let s12 = SymTensor::basis(&[0, 1], 2).unwrap();
        assert_eq!(inner(&e11, &e11).unwrap(), rat(1));
        assert_eq!(inner(&s12, &s12).unwrap(), ratio(1, 2));
        assert_eq!(inner(&e11, &s12).unwrap(), rat(0));
        assert!(inner(&e11, &SymTensor::zero(3, 2)).is_err());
        let h = vec![rat(1), rat(2), ratio(-1, 3)];
        let hp = SymTensor::tensor_power(&h, 3);
        let hn: Rational = h.iter().map(|x| x * x).sum();
        assert_eq!(hp.norm_sq(), &hn * &hn * &hn);
    }

    #[test]
    fn basis_norm_is_multiplicity_ratio() {
        for p in 1..=4 {
            for d in 1..=3 {
                for idx in sorted_tuples(p, d) {
                    let b = SymTensor::basis(&idx, d).unwrap();
                    let counts = multiplicities(&idx);
                    let m_fact = counts.iter().fold(rat(1), |a, &c| a * factorial_q(c));
                    assert_eq!(b.norm_sq(), m_fact / factorial_q(p as u32));
                }
            }
        }
    }

    #[test]
    fn contraction_examples() {
        let e11 = SymTensor::tensor_power(&e(0, 2), 2);
        let c = contract(&e11, &e11, 1).unwrap();
        assert_eq!(c.get(&[0, 0]), rat(1));
        assert_eq!(c.norm_sq(), rat(1));
        let s12 = SymTensor::basis(&[0, 1], 2).unwrap();
        let c = contract(&s12, &s12, 1).unwrap();
        assert_eq!(c, contract_dense(&s12, &s12, 1).unwrap());
        assert_eq!(c.get(&[0, 0]), ratio(1, 4));
        assert_eq!(c.get(&[1, 1]), ratio(1, 4));
        assert_eq!(c.get(&[0, 1]), rat(0));
        let full = contract(&s12, &e11, 2).unwrap();
        assert_eq!(full.get(&[]), inner(&s12, &e11).unwrap());
        assert!(matches!(contract(&s12, &s12, 3), Err(ChaosError::ContractionOrder { .. })));
    }

    #[test]
    fn product_moment_examples() {
        let e1 = SymTensor::tensor_power(&e(0, 2), 1);
        let e2 = SymTensor::tensor_power(&e(1, 2), 1);
        assert_eq!(prod_moment(&e1, &e1).unwrap(), rat(3));
        assert_eq!(prod_moment(&e1, &e2).unwrap(), rat(1));
        // U = H_2(ξ): E[H_2⁴] = 105 − 60 + 18 − 4 + 1
        let e11 = SymTensor::tensor_power(&e(0, 1), 2);
        assert_eq!(prod_moment(&e11, &e11).unwrap(), rat(60));
    }

    #[test]
    fn text_round_trip() {
        let t = SymTensor::from_entries(
            2,
            3,
            [(vec![0, 2], ratio(1, 3)), (vec![1, 1], rat(-2))],
        )
        .unwrap();
        assert_eq!(SymTensor::from_text(&t.to_text()).unwrap(), t);
        let parsed = SymTensor::from_text("# comment\n2 3\n3 1 1/3\n2 2 -2.0\n").unwrap();
        assert_eq!(parsed, t);
        assert!(matches!(
            SymTensor::from_text("2 3\n1 4 1\n"),
            Err(ChaosError::Parse { line: 2, .. })
        ));
        assert!(SymTensor::from_text("2 3\n1 2 1\n2 1 1\n").is_err());

        let mut k = ComplexKernel::zero(1, 2, 2);
        k.set(vec![0], vec![1, 0], cq(ratio(1, 2), rat(-1))).unwrap();
        assert_eq!(ComplexKernel::from_text(&k.to_text()).unwrap(), k);
        assert!(ComplexKernel::from_text("1 2 2\n1 1 2 0.5\n").is_err());
        assert_eq!(parse_number("1.5e-1", 1).unwrap(), ratio(3, 20));
        assert_eq!(parse_number("-.25", 1).unwrap(), ratio(-1, 4));
        assert!(parse_number("1.2.3", 1).is_err());
    }

    #[test]
    fn complex_kernel_inner() {
        let h = vec![cq(rat(1), rat(1)), cint(0)];
        let k = ComplexKernel::rank_one(&h, 1, 1);
        // ‖h‖⁴ = 4
        assert_eq!(k.norm_sq(), rat(4));
        let b = ComplexKernel::basis(&[0, 1], &[1], 2).unwrap();
        assert_eq!(b.norm_sq(), ratio(1, 2));
    }

    #[test]
    fn permutations_are_distinct() {
        assert_eq!(distinct_permutations(&[0, 0, 1]).len(), 3);
        assert_eq!(distinct_permutations(&[0, 1, 2]).len(), 6);
        assert_eq!(distinct_permutations(&[]).len(), 1);
    }
}
