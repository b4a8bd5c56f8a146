//! Finite-dimensional isonormal processes: keyed Gaussian sampling, pathwise
//! multiple integrals, the real-pair decomposition of complex integrals and
//! exact moments of polynomial expressions in chaos elements.
//!
//! Coordinates: `ℌ = R^D` with basis `e_0..e_{D-1}`. A sample holds
//! `ξ_k = X(e_k)` and `η_k = Y(e_k)`, and `ζ_k = ξ_k + iη_k`. Real tensors
//! over `ℌ ⊕ ℌ` use slots `0..D` for `ξ` and `D..2D` for `η`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convert::h2j_table;
use crate::error::{ChaosError, Result};
use crate::exact::{
    cint, cq, creal, format_complex, is_czero, pow_q, rat, ratio, to_c64, to_f64, ComplexRational,
    Rational,
};
use crate::exec::{map_chunks, Execution, CHUNK};
use crate::hermite::{complex_hermite, complex_hermite_table, hermite_values, HermiteIndex};
use crate::tensor::{multiplicities, tuple_multinomial, ComplexKernel, SymTensor};
use crate::wick::{expect, GaussPoly, GaussianFamily, ZetaPoly, DEGREE_BUDGET};

/// One draw of `(ξ_1..ξ_D, η_1..η_D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSample {
    xi: Vec<f64>,
    eta: Vec<f64>,
}

impl GaussianSample {
    pub fn new(xi: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if xi.len() != eta.len() || xi.is_empty() {
            return Err(ChaosError::ShapeMismatch(format!(
                "ξ has {} coordinates and η has {}",
                xi.len(),
                eta.len()
            )));
        }
        Ok(Self { xi, eta })
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Slot `c` of `ℌ ⊕ ℌ`.
    pub fn coord(&self, c: usize) -> f64 {
        let d = self.dim();
        if c < d {
            self.xi[c]
        } else {
            self.eta[c - d]
        }
    }

    pub fn zeta(&self, k: usize) -> Complex64 {
        Complex64::new(self.xi[k], self.eta[k])
    }

    /// `X(f) + Y(g)` for real `f`, `g`.
    pub fn x_plus_y(&self, f: &[f64], g: &[f64]) -> f64 {
        let x: f64 = f.iter().zip(&self.xi).map(|(a, b)| a * b).sum();
        let y: f64 = g.iter().zip(&self.eta).map(|(a, b)| a * b).sum();
        x + y
    }

    /// `Z(𝔥) = Σ_k 𝔥_k ζ_k / √2`.
    pub fn z_of(&self, h: &[Complex64]) -> Complex64 {
        h.iter()
            .enumerate()
            .map(|(k, &hk)| hk * self.zeta(k))
            .sum::<Complex64>()
            * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Standard normal from 64 random bits through the inverse CDF.
pub fn standard_normal(bits: u64) -> f64 {
    let u = ((bits >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * u)
}

/// The sample with the given index; it depends only on `(seed, index, dim)`.
pub fn sample_at(dim: usize, seed: u64, index: u64) -> GaussianSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let xi = (0..dim).map(|_| standard_normal(rng.next_u64())).collect();
    let eta = (0..dim).map(|_| standard_normal(rng.next_u64())).collect();
    GaussianSample { xi, eta }
}

pub fn sample_batch(dim: usize, count: usize, seed: u64) -> Result<Vec<GaussianSample>> {
    sample_batch_with(dim, count, seed, Execution::Parallel)
}

pub fn sample_batch_with(
    dim: usize,
    count: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<GaussianSample>> {
    if dim == 0 || count == 0 {
        return Err(ChaosError::ShapeMismatch(format!(
            "sampling needs D ≥ 1 and N ≥ 1, got D={dim}, N={count}"
        )));
    }
    let chunks = map_chunks(count, CHUNK, exec, |r| {
        r.map(|i| sample_at(dim, seed, i as u64)).collect::<Vec<_>>()
    })?;
    Ok(chunks.into_iter().flatten().collect())
}

/// `I_p(f)` compiled to a list of Hermite monomials over `2D` slots.
#[derive(Clone, Debug)]
pub struct RealIntegrand {
    dim: usize,
    slots: Vec<(usize, usize)>,
    terms: Vec<(f64, Vec<(usize, usize)>)>,
}

impl RealIntegrand {
    /// `f` must live over `2D` slots for samples of dimension `D`.
    pub fn compile(f: &SymTensor) -> Result<Self> {
        if !f.dim().is_multiple_of(2) || f.dim() == 0 {
            return Err(ChaosError::ShapeMismatch(format!(
                "real kernels live over 2D slots, got dimension {}",
                f.dim()
            )));
        }
        let mut slot_pos: BTreeMap<usize, usize> = BTreeMap::new();
        let mut slots: Vec<(usize, usize)> = Vec::new();
        let mut terms = Vec::new();
        for (idx, v) in f.entries() {
            let weight = Rational::from_integer(tuple_multinomial(idx)) * v;
            let mut factors = Vec::new();
            let mut start = 0;
            for count in multiplicities(idx) {
                let c = idx[start];
                start += count as usize;
                let pos = *slot_pos.entry(c).or_insert_with(|| {
                    slots.push((c, 0));
                    slots.len() - 1
                });
                slots[pos].1 = slots[pos].1.max(count as usize);
                factors.push((pos, count as usize));
            }
            terms.push((to_f64(&weight), factors));
        }
        Ok(Self {
            dim: f.dim() / 2,
            slots,
            terms,
        })
    }

    pub fn eval(&self, s: &GaussianSample) -> Result<f64> {
        if s.dim() != self.dim {
            return Err(ChaosError::ShapeMismatch(format!(
                "kernel over D={} evaluated at a sample of dimension {}",
                self.dim,
                s.dim()
            )));
        }
        let mut buf = Vec::new();
        let tables: Vec<Vec<f64>> = self
            .slots
            .iter()
            .map(|&(c, maxp)| {
                hermite_values(s.coord(c), maxp, &mut buf);
                buf.clone()
            })
            .collect();
        Ok(self
            .terms
            .iter()
            .map(|(w, fs)| w * fs.iter().map(|&(p, k)| tables[p][k]).product::<f64>())
            .sum())
    }
}

pub fn eval_real(f: &SymTensor, s: &GaussianSample) -> Result<f64> {
    RealIntegrand::compile(f)?.eval(s)
}

/// `𝓘_{m,n}(φ)` compiled to products of `J_{a,b}(ζ_k)` factors.
#[derive(Clone, Debug)]
pub struct ComplexIntegrand {
    dim: usize,
    coords: Vec<(usize, usize, usize)>,
    terms: Vec<(Complex64, Vec<(usize, usize, usize)>)>,
}

fn group_counts(a: &[usize], b: &[usize]) -> BTreeMap<usize, (usize, usize)> {
    let mut out: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for &i in a {
        out.entry(i).or_default().0 += 1;
    }
    for &j in b {
        out.entry(j).or_default().1 += 1;
    }
    out
}

impl ComplexIntegrand {
    pub fn compile(phi: &ComplexKernel) -> Self {
        Self::compile_scaled(phi, 1.0)
    }

    /// Compiles `c · 𝓘(φ)`.
    pub fn compile_scaled(phi: &ComplexKernel, c: f64) -> Self {
        let (m, n) = phi.bidegree();
        let norm = c * 2f64.powf(-((m + n) as f64) / 2.0);
        let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
        let mut coords: Vec<(usize, usize, usize)> = Vec::new();
        let mut terms = Vec::new();
        for ((a, b), v) in phi.entries() {
            let weight = Rational::from_integer(tuple_multinomial(a) * tuple_multinomial(b));
            let coeff = to_c64(v) * to_f64(&weight) * norm;
            let mut factors = Vec::new();
            for (k, (ca, cb)) in group_counts(a, b) {
                let p = *pos.entry(k).or_insert_with(|| {
                    coords.push((k, 0, 0));
                    coords.len() - 1
                });
                coords[p].1 = coords[p].1.max(ca);
                coords[p].2 = coords[p].2.max(cb);
                factors.push((p, ca, cb));
            }
            terms.push((coeff, factors));
        }
        Self {
            dim: phi.dim(),
            coords,
            terms,
        }
    }

    /// Sum of integrands over the same dimension.
    pub fn sum(parts: Vec<ComplexIntegrand>) -> Result<Self> {
        let mut it = parts.into_iter();
        let mut acc = it
            .next()
            .ok_or_else(|| ChaosError::ShapeMismatch("empty sum of integrands".into()))?;
        for p in it {
            if p.dim != acc.dim {
                return Err(ChaosError::ShapeMismatch(format!(
                    "integrands over D={} and D={}",
                    acc.dim, p.dim
                )));
            }
            let mut remap = Vec::with_capacity(p.coords.len());
            for &(k, ma, mb) in &p.coords {
                let at = match acc.coords.iter().position(|c| c.0 == k) {
                    Some(i) => {
                        acc.coords[i].1 = acc.coords[i].1.max(ma);
                        acc.coords[i].2 = acc.coords[i].2.max(mb);
                        i
                    }
                    None => {
                        acc.coords.push((k, ma, mb));
                        acc.coords.len() - 1
                    }
                };
                remap.push(at);
            }
            for (c, fs) in p.terms {
                acc.terms
                    .push((c, fs.into_iter().map(|(q, a, b)| (remap[q], a, b)).collect()));
            }
        }
        Ok(acc)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, s: &GaussianSample) -> Result<Complex64> {
        if s.dim() != self.dim {
            return Err(ChaosError::ShapeMismatch(format!(
                "kernel over D={} evaluated at a sample of dimension {}",
                self.dim,
                s.dim()
            )));
        }
        let tables: Vec<Vec<Vec<Complex64>>> = self
            .coords
            .iter()
            .map(|&(k, ma, mb)| complex_hermite_table(s.zeta(k), ma, mb))
            .collect();
        Ok(self
            .terms
            .iter()
            .map(|(c, fs)| {
                fs.iter()
                    .fold(*c, |acc, &(p, a, b)| acc * tables[p][a][b])
            })
            .sum())
    }
}

pub fn eval_complex(phi: &ComplexKernel, s: &GaussianSample) -> Result<Complex64> {
    ComplexIntegrand::compile(phi).eval(s)
}

/// `𝓘(φ) = √scale_sq · (I(u) + i I(v))`, with `scale_sq ∈ {1, 1/2}` so that
/// `u` and `v` stay rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub u: SymTensor,
    pub v: SymTensor,
    pub scale_sq: Rational,
}

impl Decomposition {
    pub fn scale(&self) -> f64 {
        to_f64(&self.scale_sq).sqrt()
    }

    pub fn eval(&self, s: &GaussianSample) -> Result<Complex64> {
        let re = eval_real(&self.u, s)?;
        let im = eval_real(&self.v, s)?;
        Ok(Complex64::new(re, im) * self.scale())
    }
}

/// Real pair `(u, v)` over `ℌ ⊕ ℌ` with `𝓘_{m,n}(φ) = I(u) + i I(v)` up to
/// the recorded scale.
pub fn decompose(phi: &ComplexKernel) -> Decomposition {
    let (m, n) = phi.bidegree();
    let d = phi.dim();
    let p = m + n;
    let tables: Vec<_> = (0..=p as u32).map(|deg| h2j_table(deg).complex_to_real).collect();
    // 2^{-p/2} = 2^{-⌊p/2⌋} · (1 or 1/√2)
    let rational_scale = rat(1) / pow_q(&rat(2), (p / 2) as u32);
    let scale_sq = if p % 2 == 1 { ratio(1, 2) } else { rat(1) };

    // coefficients on real Fourier-Hermite monomials, keyed by sorted slot tuples
    let mut beta: BTreeMap<Vec<usize>, ComplexRational> = BTreeMap::new();
    for ((a, b), v) in phi.entries() {
        let alpha = v.clone()
            * creal(Rational::from_integer(tuple_multinomial(a) * tuple_multinomial(b)));
        // (slot powers, coefficient) partial products across coordinates
        let mut partial: Vec<(Vec<(usize, usize)>, ComplexRational)> = vec![(Vec::new(), alpha)];
        for (k, (ca, cb)) in group_counts(a, b) {
            let deg = ca + cb;
            let row = &tables[deg].rows()[ca];
            let mut next = Vec::with_capacity(partial.len() * (deg + 1));
            for (powers, c) in &partial {
                for (j, t) in row.iter().enumerate() {
                    if is_czero(t) {
                        continue;
                    }
                    let mut pw = powers.clone();
                    pw.push((k, j));
                    pw.push((d + k, deg - j));
                    next.push((pw, c.clone() * t.clone()));
                }
            }
            partial = next;
        }
        for (powers, c) in partial {
            let mut idx = Vec::with_capacity(p);
            for (slot, count) in powers {
                idx.extend(std::iter::repeat_n(slot, count));
            }
            idx.sort_unstable();
            let slot = beta.entry(idx).or_insert_with(|| cint(0));
            *slot = slot.clone() + c;
        }
    }
    let mut u_entries = Vec::new();
    let mut v_entries = Vec::new();
    for (idx, c) in beta {
        let w = &rational_scale / Rational::from_integer(tuple_multinomial(&idx));
        if !c.re.is_zero() {
            u_entries.push((idx.clone(), &c.re * &w));
        }
        if !c.im.is_zero() {
            v_entries.push((idx, &c.im * &w));
        }
    }
    Decomposition {
        u: SymTensor::from_entries(p, 2 * d, u_entries).expect("sorted in-range tuples"),
        v: SymTensor::from_entries(p, 2 * d, v_entries).expect("sorted in-range tuples"),
        scale_sq,
    }
}

/// A multiple integral: real over `ℌ ⊕ ℌ` or complex over `ℌ_ℂ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChaosElement {
    Real(SymTensor),
    Complex(ComplexKernel),
}

impl ChaosElement {
    /// `D`, the dimension of `ℌ`.
    pub fn base_dim(&self) -> usize {
        match self {
            ChaosElement::Real(f) => f.dim() / 2,
            ChaosElement::Complex(phi) => phi.dim(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            ChaosElement::Real(f) => f.order() as u32,
            ChaosElement::Complex(phi) => {
                let (m, n) = phi.bidegree();
                (m + n) as u32
            }
        }
    }

    pub fn eval(&self, s: &GaussianSample) -> Result<Complex64> {
        match self {
            ChaosElement::Real(f) => eval_real(f, s).map(|x| Complex64::new(x, 0.0)),
            ChaosElement::Complex(phi) => eval_complex(phi, s),
        }
    }
}

/// Number of the form `a + b/√2` with rational-complex `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtTwoComplex {
    pub rational: ComplexRational,
    pub over_sqrt2: ComplexRational,
}

impl SqrtTwoComplex {
    pub fn to_c64(&self) -> Complex64 {
        to_c64(&self.rational) + to_c64(&self.over_sqrt2) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// The value when it is rational.
    pub fn as_rational(&self) -> Option<&ComplexRational> {
        is_czero(&self.over_sqrt2).then_some(&self.rational)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            rational: self.rational.clone() * creal(c.clone()),
            over_sqrt2: self.over_sqrt2.clone() * creal(c.clone()),
        }
    }

    pub fn from_rational(q: ComplexRational) -> Self {
        Self {
            rational: q,
            over_sqrt2: cint(0),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            rational: self.rational.clone() + o.rational.clone(),
            over_sqrt2: self.over_sqrt2.clone() + o.over_sqrt2.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let half = creal(ratio(1, 2));
        Self {
            rational: self.rational.clone() * o.rational.clone()
                + self.over_sqrt2.clone() * o.over_sqrt2.clone() * half,
            over_sqrt2: self.rational.clone() * o.over_sqrt2.clone()
                + self.over_sqrt2.clone() * o.rational.clone(),
        }
    }
}

impl std::fmt::Display for SqrtTwoComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "{}", format_complex(q)),
            None if is_czero(&self.rational) => {
                write!(f, "({})/sqrt(2)", format_complex(&self.over_sqrt2))
            }
            None => write!(
                f,
                "{} + ({})/sqrt(2)",
                format_complex(&self.rational),
                format_complex(&self.over_sqrt2)
            ),
        }
    }
}

/// Polynomial `even + odd/√2` over the `2D` real coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SqrtPoly {
    even: GaussPoly,
    odd: GaussPoly,
}

impl SqrtPoly {
    fn rational(p: GaussPoly) -> Self {
        let odd = GaussPoly::zero(p.dim());
        Self { even: p, odd }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            even: &self.even + &o.even,
            odd: &self.odd + &o.odd,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        Self {
            even: &self.even - &o.even,
            odd: &self.odd - &o.odd,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let half = creal(ratio(1, 2));
        Self {
            even: &(&self.even * &o.even) + &(&self.odd * &o.odd).scale(&half),
            odd: &(&self.even * &o.odd) + &(&self.odd * &o.even),
        }
    }

    fn conj(&self) -> Self {
        Self {
            even: self.even.conj(),
            odd: self.odd.conj(),
        }
    }
}

fn real_hermite_monomial(dim2: usize, idx: &[usize]) -> GaussPoly {
    let mut acc = GaussPoly::one(dim2);
    let mut start = 0;
    for count in multiplicities(idx) {
        let c = idx[start];
        start += count as usize;
        acc = &acc * &GaussPoly::hermite(dim2, c, count).expect("slot in range");
    }
    acc
}

fn element_poly(e: &ChaosElement) -> SqrtPoly {
    match e {
        ChaosElement::Real(f) => {
            let dim2 = f.dim();
            let mut acc = GaussPoly::zero(dim2);
            for (idx, v) in f.entries() {
                let w = creal(Rational::from_integer(tuple_multinomial(idx)) * v);
                acc = &acc + &real_hermite_monomial(dim2, idx).scale(&w);
            }
            SqrtPoly::rational(acc)
        }
        ChaosElement::Complex(phi) => {
            let (m, n) = phi.bidegree();
            let d = phi.dim();
            let mut acc = ZetaPoly::zero(d);
            for ((a, b), v) in phi.entries() {
                let w = Rational::from_integer(tuple_multinomial(a) * tuple_multinomial(b));
                let mut term = ZetaPoly::one(d);
                for (k, (ca, cb)) in group_counts(a, b) {
                    let j = complex_hermite(&HermiteIndex::standard(ca as u32, cb as u32));
                    term = term.mul(&ZetaPoly::from_bipoly(d, k, &j).expect("coordinate in range"));
                }
                let mut scaled = ZetaPoly::zero(d);
                scaled.add_term(vec![0; d], vec![0; d], v.clone() * creal(w));
                acc = acc.add(&term.mul(&scaled));
            }
            let p = (m + n) as u32;
            let real = acc.to_real().scale(&creal(rat(1) / pow_q(&rat(2), p / 2)));
            if p.is_multiple_of(2) {
                SqrtPoly::rational(real)
            } else {
                SqrtPoly {
                    odd: real,
                    even: GaussPoly::zero(2 * d),
                }
            }
        }
    }
}

/// Polynomial expression in chaos elements and their conjugates.
#[derive(Clone, Debug, PartialEq)]
pub enum ChaosExpr {
    Elem(usize),
    Const(ComplexRational),
    Conj(Box<ChaosExpr>),
    Add(Box<ChaosExpr>, Box<ChaosExpr>),
    Sub(Box<ChaosExpr>, Box<ChaosExpr>),
    Mul(Box<ChaosExpr>, Box<ChaosExpr>),
    Pow(Box<ChaosExpr>, u32),
}

impl ChaosExpr {
    pub fn elem(i: usize) -> Self {
        ChaosExpr::Elem(i)
    }

    pub fn conj(self) -> Self {
        ChaosExpr::Conj(Box::new(self))
    }

    pub fn pow(self, k: u32) -> Self {
        ChaosExpr::Pow(Box::new(self), k)
    }

    pub fn times(self, o: Self) -> Self {
        ChaosExpr::Mul(Box::new(self), Box::new(o))
    }

    pub fn plus(self, o: Self) -> Self {
        ChaosExpr::Add(Box::new(self), Box::new(o))
    }

    pub fn minus(self, o: Self) -> Self {
        ChaosExpr::Sub(Box::new(self), Box::new(o))
    }

    /// Upper bound on the Gaussian degree of the expanded expression.
    pub fn degree(&self, elements: &[ChaosElement]) -> Result<u32> {
        Ok(match self {
            ChaosExpr::Elem(i) => elements
                .get(*i)
                .ok_or(ChaosError::IndexOutOfRange {
                    index: *i,
                    dim: elements.len(),
                })?
                .degree(),
            ChaosExpr::Const(_) => 0,
            ChaosExpr::Conj(e) => e.degree(elements)?,
            ChaosExpr::Add(a, b) | ChaosExpr::Sub(a, b) => {
                a.degree(elements)?.max(b.degree(elements)?)
            }
            ChaosExpr::Mul(a, b) => a.degree(elements)? + b.degree(elements)?,
            ChaosExpr::Pow(e, k) => e.degree(elements)?.saturating_mul(*k),
        })
    }
}

fn expand(expr: &ChaosExpr, polys: &[SqrtPoly], dim2: usize) -> SqrtPoly {
    match expr {
        ChaosExpr::Elem(i) => polys[*i].clone(),
        ChaosExpr::Const(c) => SqrtPoly::rational(GaussPoly::constant(dim2, c.clone())),
        ChaosExpr::Conj(e) => expand(e, polys, dim2).conj(),
        ChaosExpr::Add(a, b) => expand(a, polys, dim2).add(&expand(b, polys, dim2)),
        ChaosExpr::Sub(a, b) => expand(a, polys, dim2).sub(&expand(b, polys, dim2)),
        ChaosExpr::Mul(a, b) => expand(a, polys, dim2).mul(&expand(b, polys, dim2)),
        ChaosExpr::Pow(e, k) => {
            let base = expand(e, polys, dim2);
            let mut acc = SqrtPoly::rational(GaussPoly::one(dim2));
            for _ in 0..*k {
                acc = acc.mul(&base);
            }
            acc
        }
    }
}

/// Exact expectation of `expr` over independent standard `ξ`, `η`.
pub fn exact_moment(elements: &[ChaosElement], expr: &ChaosExpr) -> Result<SqrtTwoComplex> {
    let degree = expr.degree(elements)?;
    if degree > DEGREE_BUDGET {
        return Err(ChaosError::DegreeBudget {
            degree,
            budget: DEGREE_BUDGET,
        });
    }
    let d = elements.first().map(ChaosElement::base_dim).unwrap_or(1);
    if let Some(e) = elements.iter().find(|e| e.base_dim() != d) {
        return Err(ChaosError::ShapeMismatch(format!(
            "elements over D={d} and D={}",
            e.base_dim()
        )));
    }
    let polys: Vec<SqrtPoly> = elements.iter().map(element_poly).collect();
    let p = expand(expr, &polys, 2 * d);
    let fam = GaussianFamily::standard(2 * d);
    Ok(SqrtTwoComplex {
        rational: expect(&fam, &p.even)?,
        over_sqrt2: expect(&fam, &p.odd)?,
    })
}

/// `E[X Y]` for two elements, a common special case.
pub fn exact_cross(a: &ChaosElement, b: &ChaosElement) -> Result<SqrtTwoComplex> {
    exact_moment(
        &[a.clone(), b.clone()],
        &ChaosExpr::elem(0).times(ChaosExpr::elem(1)),
    )
}

/// `ComplexRational` literal helper for expression constants.
pub fn constant(re: i64, im: i64) -> ChaosExpr {
    ChaosExpr::Const(cq(rat(re), rat(im)))
}
