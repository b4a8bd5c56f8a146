//! Exact Gaussian expectations through Isserlis pairing sums.
//!
//! This is the brute-force oracle behind every moment claim in the crate:
//! complex variables are always reduced to real coordinates first, and the
//! expectation of a real monomial is the sum over perfect matchings of its
//! degree multiset.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{ChaosError, Result};
use crate::exact::{cint, cq, creal, is_czero, rat, ComplexRational, Rational};
use crate::hermite::BiPoly;

/// Default degree budget for exact expectations.
pub const DEGREE_BUDGET: u32 = 16;

/// Covariance of finitely many centered jointly Gaussian real coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianFamily {
    cov: Vec<Vec<Rational>>,
}

impl GaussianFamily {
    /// Validates symmetry and positive semidefiniteness exactly.
    pub fn new(cov: Vec<Vec<Rational>>) -> Result<Self> {
        let d = cov.len();
        for (i, row) in cov.iter().enumerate() {
            if row.len() != d {
                return Err(ChaosError::ShapeMismatch(format!(
                    "covariance row {i} has length {} in a {d}x{d} matrix",
                    row.len()
                )));
            }
            for j in 0..i {
                if row[j] != cov[j][i] {
                    return Err(ChaosError::NotPositiveSemidefinite(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        check_psd_exact(&cov)?;
        Ok(Self { cov })
    }

    /// Covariance given in floating point. Entries are converted to their
    /// exact binary rational values; the PSD check uses a pivoted Cholesky
    /// with tolerance `1e-10`.
    pub fn from_f64(cov: &[Vec<f64>]) -> Result<Self> {
        let d = cov.len();
        let mut exact = Vec::with_capacity(d);
        for (i, row) in cov.iter().enumerate() {
            if row.len() != d {
                return Err(ChaosError::ShapeMismatch(format!("row {i} has length {}", row.len())));
            }
            let mut out = Vec::with_capacity(d);
            for (j, &v) in row.iter().enumerate() {
                if (v - cov[j][i]).abs() > 1e-10 {
                    return Err(ChaosError::NotPositiveSemidefinite(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
                let sym = 0.5 * (v + cov[j][i]);
                out.push(BigRational::from_float(sym).ok_or_else(|| {
                    ChaosError::NotPositiveSemidefinite(format!("non-finite entry ({i},{j})"))
                })?);
            }
            exact.push(out);
        }
        check_psd_f64(cov, 1e-10)?;
        Ok(Self { cov: exact })
    }

    /// `d` independent standard normal coordinates.
    pub fn standard(d: usize) -> Self {
        let cov = (0..d)
            .map(|i| (0..d).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
            .collect();
        Self { cov }
    }

    pub fn dim(&self) -> usize {
        self.cov.len()
    }

    pub fn covariance(&self, i: usize, j: usize) -> &Rational {
        &self.cov[i][j]
    }
}

fn check_psd_exact(cov: &[Vec<Rational>]) -> Result<()> {
    let mut a: Vec<Vec<Rational>> = cov.to_vec();
    let mut active: Vec<usize> = (0..a.len()).collect();
    while !active.is_empty() {
        if let Some(&i) = active.iter().find(|&&i| a[i][i].is_negative()) {
            return Err(ChaosError::NotPositiveSemidefinite(format!(
                "negative pivot at coordinate {i}"
            )));
        }
        let pivot = match active.iter().copied().find(|&i| a[i][i].is_positive()) {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish: off-diagonals must too
                for &i in &active {
                    for &j in &active {
                        if !a[i][j].is_zero() {
                            return Err(ChaosError::NotPositiveSemidefinite(format!(
                                "zero variance at {i} with nonzero covariance to {j}"
                            )));
                        }
                    }
                }
                return Ok(());
            }
        };
        active.retain(|&i| i != pivot);
        let p = a[pivot][pivot].clone();
        for &i in &active {
            let factor = &a[i][pivot] / &p;
            if factor.is_zero() {
                continue;
            }
            for &j in &active {
                let delta = &factor * &a[pivot][j];
                a[i][j] -= delta;
            }
        }
    }
    Ok(())
}

fn check_psd_f64(cov: &[Vec<f64>], tol: f64) -> Result<()> {
    let mut a: Vec<Vec<f64>> = cov.to_vec();
    let mut active: Vec<usize> = (0..a.len()).collect();
    while !active.is_empty() {
        let (pos, &pivot) = active
            .iter()
            .enumerate()
            .max_by(|x, y| a[*x.1][*x.1].total_cmp(&a[*y.1][*y.1]))
            .expect("non-empty");
        let p = a[pivot][pivot];
        if p < -tol {
            return Err(ChaosError::NotPositiveSemidefinite(format!(
                "pivot {p:e} below -{tol:e}"
            )));
        }
        active.remove(pos);
        if p <= tol {
            for &i in &active {
                for &j in &active {
                    if a[i][j].abs() > tol {
                        return Err(ChaosError::NotPositiveSemidefinite(format!(
                            "residual block entry {:e} at ({i},{j})",
                            a[i][j]
                        )));
                    }
                }
            }
            return Ok(());
        }
        for &i in &active {
            let factor = a[i][pivot] / p;
            for &j in &active {
                a[i][j] -= factor * a[pivot][j];
            }
        }
    }
    Ok(())
}

/// Memoized pairing sums for one family; the memo lives for one call.
struct Pairings<'a> {
    fam: &'a GaussianFamily,
    memo: HashMap<Vec<u32>, Rational>,
}

impl<'a> Pairings<'a> {
    fn new(fam: &'a GaussianFamily) -> Self {
        Self {
            fam,
            memo: HashMap::new(),
        }
    }

    // E[prod g_i^{k_i}] = sum_j C[i][j] * k'_j * E[... with one g_i and one g_j removed]
    fn moment(&mut self, exps: &[u32]) -> Rational {
        let total: u32 = exps.iter().sum();
        if total == 0 {
            return rat(1);
        }
        if total % 2 == 1 {
            return rat(0);
        }
        if let Some(v) = self.memo.get(exps) {
            return v.clone();
        }
        let i = exps.iter().position(|&k| k > 0).expect("nonzero degree");
        let mut rest = exps.to_vec();
        rest[i] -= 1;
        let mut acc = rat(0);
        for j in 0..exps.len() {
            let mult = rest[j];
            if mult == 0 {
                continue;
            }
            let c = self.fam.covariance(i, j);
            if c.is_zero() {
                continue;
            }
            rest[j] -= 1;
            let sub = self.moment(&rest);
            rest[j] += 1;
            acc += c * rat(mult as i64) * sub;
        }
        self.memo.insert(exps.to_vec(), acc.clone());
        acc
    }
}

/// `E[prod_i g_i^{k_i}]` by perfect matchings; zero for odd total degree.
pub fn isserlis_moment(fam: &GaussianFamily, exponents: &[u32]) -> Result<Rational> {
    if exponents.len() != fam.dim() {
        return Err(ChaosError::ShapeMismatch(format!(
            "{} exponents for a family of dimension {}",
            exponents.len(),
            fam.dim()
        )));
    }
    Ok(Pairings::new(fam).moment(exponents))
}

/// Polynomial in `d` real Gaussian coordinates with rational-complex
/// coefficients, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, ComplexRational>,
}

impl GaussPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: ComplexRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, cint(1))
    }

    /// The coordinate `g_i`.
    pub fn var(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(ChaosError::IndexOutOfRange { index: i, dim });
        }
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Self::zero(dim);
        p.add_term(e, cint(1));
        Ok(p)
    }

    /// `H_n(g_i)` for the probabilists' Hermite polynomial.
    pub fn hermite(dim: usize, i: usize, n: u32) -> Result<Self> {
        if i >= dim {
            return Err(ChaosError::IndexOutOfRange { index: i, dim });
        }
        let mut p = Self::zero(dim);
        for (j, c) in crate::hermite::hermite_coeffs(n).into_iter().enumerate() {
            let mut e = vec![0; dim];
            e[i] = j as u32;
            p.add_term(e, creal(c));
        }
        Ok(p)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: ComplexRational) {
        assert_eq!(exps.len(), self.dim, "exponent vector length");
        if is_czero(&c) {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(slot) => {
                *slot = slot.clone() + c;
                if is_czero(slot) {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Complex conjugate; the coordinates are real so only coefficients change.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.conj())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at a real point in double precision.
    pub fn evaluate(&self, point: &[f64]) -> num_complex::Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = e
                    .iter()
                    .zip(point)
                    .map(|(&k, &x)| x.powi(k as i32))
                    .product();
                crate::exact::to_c64(c) * mono
            })
            .sum()
    }

    /// Embeds into a larger coordinate space (new coordinates appended).
    pub fn widen(&self, dim: usize) -> Self {
        assert!(dim >= self.dim);
        let mut out = Self::zero(dim);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.resize(dim, 0);
            out.add_term(e2, c.clone());
        }
        out
    }
}

impl Add for &GaussPoly {
    type Output = GaussPoly;
    fn add(self, rhs: &GaussPoly) -> GaussPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in GaussPoly addition");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &GaussPoly {
    type Output = GaussPoly;
    fn sub(self, rhs: &GaussPoly) -> GaussPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in GaussPoly subtraction");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &GaussPoly {
    type Output = GaussPoly;
    fn mul(self, rhs: &GaussPoly) -> GaussPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in GaussPoly product");
        let mut acc: HashMap<Vec<u32>, ComplexRational> = HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let v = c1.clone() * c2.clone();
                match acc.get_mut(&e) {
                    Some(slot) => *slot = slot.clone() + v,
                    None => {
                        acc.insert(e, v);
                    }
                }
            }
        }
        GaussPoly {
            dim: self.dim,
            terms: acc.into_iter().filter(|(_, c)| !is_czero(c)).collect(),
        }
    }
}

/// `E[p]`, the linear extension of [`isserlis_moment`].
pub fn expect(fam: &GaussianFamily, p: &GaussPoly) -> Result<ComplexRational> {
    if p.dim() != fam.dim() {
        return Err(ChaosError::ShapeMismatch(format!(
            "polynomial over {} coordinates, family of dimension {}",
            p.dim(),
            fam.dim()
        )));
    }
    let mut pairings = Pairings::new(fam);
    let mut re = rat(0);
    let mut im = rat(0);
    for (e, c) in p.terms() {
        let m = pairings.moment(e);
        if m.is_zero() {
            continue;
        }
        re += &c.re * &m;
        im += &c.im * &m;
    }
    Ok(cq(re, im))
}

/// Polynomial in complex variables `ζ_1..ζ_K` and their conjugates.
/// Exponents are stored as `(z-exponents, z̄-exponents)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaPoly {
    vars: usize,
    terms: BTreeMap<(Vec<u32>, Vec<u32>), ComplexRational>,
}

impl ZetaPoly {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: usize) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars], vec![0; vars], cint(1));
        p
    }

    /// Lifts a one-variable `(z, z̄)` polynomial onto `ζ_k`.
    pub fn from_bipoly(vars: usize, k: usize, p: &BiPoly) -> Result<Self> {
        if k >= vars {
            return Err(ChaosError::IndexOutOfRange { index: k, dim: vars });
        }
        let mut out = Self::zero(vars);
        for (&(a, b), c) in p.terms() {
            let mut za = vec![0; vars];
            let mut zb = vec![0; vars];
            za[k] = a;
            zb[k] = b;
            out.add_term(za, zb, c.clone());
        }
        Ok(out)
    }

    pub fn add_term(&mut self, za: Vec<u32>, zb: Vec<u32>, c: ComplexRational) {
        if is_czero(&c) {
            return;
        }
        let key = (za, zb);
        let slot = self.terms.entry(key.clone()).or_insert_with(|| cint(0));
        *slot = slot.clone() + c;
        if is_czero(slot) {
            self.terms.remove(&key);
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn conj(&self) -> Self {
        Self {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|((a, b), c)| ((b.clone(), a.clone()), c.conj()))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.vars, rhs.vars);
        let mut out = Self::zero(self.vars);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &rhs.terms {
                let a = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let b = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                out.add_term(a, b, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_term(a.clone(), b.clone(), c.clone());
        }
        out
    }

    /// Substitutes `ζ_k = g_k + i g_{K+k}` into a polynomial over `2K` real
    /// coordinates.
    pub fn to_real(&self) -> GaussPoly {
        let k_vars = self.vars;
        let mut cache: HashMap<(u32, u32), crate::hermite::XyPoly> = HashMap::new();
        let mut out = GaussPoly::zero(2 * k_vars);
        for ((za, zb), c) in &self.terms {
            let mut acc = GaussPoly::constant(2 * k_vars, c.clone());
            for k in 0..k_vars {
                if za[k] == 0 && zb[k] == 0 {
                    continue;
                }
                let xy = cache
                    .entry((za[k], zb[k]))
                    .or_insert_with(|| BiPoly::monomial(za[k], zb[k], cint(1)).to_xy())
                    .clone();
                let mut factor = GaussPoly::zero(2 * k_vars);
                for (&(px, py), v) in xy.terms() {
                    let mut e = vec![0; 2 * k_vars];
                    e[k] = px;
                    e[k_vars + k] = py;
                    factor.add_term(e, v.clone());
                }
                acc = &acc * &factor;
            }
            out = &out + &acc;
        }
        out
    }
}

/// `E[p(ζ, ζ̄)]` where `ζ_k = g_k + i g_{K+k}` over a family of dimension `2K`.
pub fn expect_complex(fam: &GaussianFamily, p: &ZetaPoly) -> Result<ComplexRational> {
    if 2 * p.vars() != fam.dim() {
        return Err(ChaosError::ShapeMismatch(format!(
            "{} complex variables need a family of dimension {}, got {}",
            p.vars(),
            2 * p.vars(),
            fam.dim()
        )));
    }
    expect(fam, &p.to_real())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{factorial_q, pow_q, ratio};
    use crate::hermite::{complex_hermite, HermiteIndex};

    fn double_factorial(n: i64) -> Rational {
        let mut acc = rat(1);
        let mut k = n;
        while k > 1 {
            acc *= rat(k);
            k -= 2;
        }
        acc
    }

    #[test]
    fn single_coordinate_moments() {
        let fam = GaussianFamily::standard(1);
        assert_eq!(isserlis_moment(&fam, &[4]).unwrap(), rat(3));
        assert_eq!(isserlis_moment(&fam, &[5]).unwrap(), rat(0));
        for k in 0..=6 {
            assert_eq!(
                isserlis_moment(&fam, &[2 * k as u32]).unwrap(),
                double_factorial(2 * k - 1)
            );
        }
    }

    #[test]
    fn independent_and_correlated_pairs() {
        let fam = GaussianFamily::standard(2);
        assert_eq!(isserlis_moment(&fam, &[2, 2]).unwrap(), rat(1));
        assert_eq!(isserlis_moment(&fam, &[1, 2]).unwrap(), rat(0));
        // E[x²y²] = 1 + 2ρ² for unit variances with correlation ρ
        let rho = ratio(1, 3);
        let fam = GaussianFamily::new(vec![vec![rat(1), rho.clone()], vec![rho.clone(), rat(1)]]).unwrap();
        assert_eq!(
            isserlis_moment(&fam, &[2, 2]).unwrap(),
            rat(1) + rat(2) * &rho * &rho
        );
        assert_eq!(isserlis_moment(&fam, &[1, 1]).unwrap(), rho.clone());
        // E[x³y] = 3ρ
        assert_eq!(isserlis_moment(&fam, &[3, 1]).unwrap(), rat(3) * rho);
    }

    #[test]
    fn exponent_length_is_checked() {
        let fam = GaussianFamily::standard(2);
        assert!(isserlis_moment(&fam, &[2]).is_err());
    }

    #[test]
    fn psd_validation() {
        assert!(GaussianFamily::new(vec![vec![rat(1), rat(2)], vec![rat(2), rat(1)]]).is_err());
        assert!(GaussianFamily::new(vec![vec![rat(1), rat(1)], vec![rat(1), rat(1)]]).is_ok());
        assert!(GaussianFamily::new(vec![vec![rat(0), rat(1)], vec![rat(1), rat(4)]]).is_err());
        assert!(GaussianFamily::new(vec![vec![rat(1), rat(0)], vec![rat(1), rat(1)]]).is_err());
        assert!(GaussianFamily::from_f64(&[vec![1.0, 0.5], vec![0.5, 1.0]]).is_ok());
        assert!(GaussianFamily::from_f64(&[vec![1.0, 1.1], vec![1.1, 1.0]]).is_err());
        assert!(GaussianFamily::from_f64(&[vec![1.0, 1.0], vec![1.0, 1.0]]).is_ok());
    }

    #[test]
    fn expectation_examples() {
        let fam = GaussianFamily::standard(1);
        let c = cq(ratio(2, 7), rat(-1));
        assert_eq!(expect(&fam, &GaussPoly::constant(1, c.clone())).unwrap(), c);
        let h4 = GaussPoly::hermite(1, 0, 4).unwrap();
        assert_eq!(expect(&fam, &h4).unwrap(), cint(0));

        let fam2 = GaussianFamily::standard(2);
        let x = GaussPoly::var(2, 0).unwrap();
        let y = GaussPoly::var(2, 1).unwrap();
        let chi = &(&(&x * &x) + &(&y * &y)) - &GaussPoly::constant(2, cint(2));
        assert_eq!(expect(&fam2, &(&chi * &chi)).unwrap(), cint(4));
        assert!(expect(&fam, &chi).is_err());
    }

    #[test]
    fn complex_examples() {
        let fam = GaussianFamily::standard(2);
        let z = ZetaPoly::from_bipoly(1, 0, &BiPoly::z()).unwrap();
        assert_eq!(expect_complex(&fam, &z.mul(&z.conj())).unwrap(), cint(2));
        let j12 = ZetaPoly::from_bipoly(1, 0, &complex_hermite(&HermiteIndex::standard(1, 2))).unwrap();
        assert_eq!(expect_complex(&fam, &j12.mul(&j12.conj())).unwrap(), cint(16));
        let j01 = ZetaPoly::from_bipoly(1, 0, &complex_hermite(&HermiteIndex::standard(0, 1))).unwrap();
        assert_eq!(expect_complex(&fam, &z.mul(&j01.conj())).unwrap(), cint(0));
        assert!(expect_complex(&GaussianFamily::standard(3), &z).is_err());
    }

    #[test]
    fn complex_hermite_orthogonality_sweep() {
        let fam = GaussianFamily::standard(2);
        let mut idx = Vec::new();
        for m in 0..=4u32 {
            for n in 0..=(4 - m) {
                idx.push((m, n));
            }
        }
        for &(m1, n1) in &idx {
            let p1 = ZetaPoly::from_bipoly(1, 0, &complex_hermite(&HermiteIndex::standard(m1, n1))).unwrap();
            for &(m2, n2) in &idx {
                let p2 = ZetaPoly::from_bipoly(1, 0, &complex_hermite(&HermiteIndex::standard(m2, n2))).unwrap();
                let v = expect_complex(&fam, &p1.mul(&p2.conj())).unwrap();
                let expected = if (m1, n1) == (m2, n2) {
                    creal(factorial_q(m1) * factorial_q(n1) * pow_q(&rat(2), m1 + n1))
                } else {
                    cint(0)
                };
                assert_eq!(v, expected, "J_{m1},{n1} vs J_{m2},{n2}");
            }
        }
    }

    #[test]
    fn correlated_complex_pair_matches_product_formula() {
        // ζ1 = x1 + i y1, ζ2 = x2 + i y2 with Cov(x1,x2) = Cov(y1,y2) = a,
        // Cov(x1,y2) = -b, Cov(y1,x2) = b  =>  E[ζ1 ζ̄2] = 2(a + ib), E[ζ1 ζ2] = 0.
        let a = ratio(1, 3);
        let b = ratio(1, 4);
        let z = rat(0);
        let o = rat(1);
        // coordinates ordered (x1, x2, y1, y2)
        let cov = vec![
            vec![o.clone(), a.clone(), z.clone(), -b.clone()],
            vec![a.clone(), o.clone(), b.clone(), z.clone()],
            vec![z.clone(), b.clone(), o.clone(), a.clone()],
            vec![-b.clone(), z.clone(), a.clone(), o.clone()],
        ];
        let fam = GaussianFamily::new(cov).unwrap();
        let cross = cq(rat(2) * &a, rat(2) * &b);
        for (m, n) in [(1u32, 0u32), (1, 1), (2, 1), (0, 2)] {
            let j = complex_hermite(&HermiteIndex::standard(m, n));
            let p1 = ZetaPoly::from_bipoly(2, 0, &j).unwrap();
            let p2 = ZetaPoly::from_bipoly(2, 1, &j).unwrap();
            let v = expect_complex(&fam, &p1.mul(&p2.conj())).unwrap();
            let expected = creal(factorial_q(m) * factorial_q(n))
                * crate::exact::pow_c(&cross, m)
                * crate::exact::pow_c(&cross.conj(), n);
            assert_eq!(v, expected);
        }
    }
}
