//! Real Hermite polynomials `H_n` and complex Hermite polynomials `J_{m,n}(z, rho)`
//! with exact rational-complex coefficients.
//!
//! Polynomials in one complex variable live in two coordinate systems: the
//! `(z, z̄)` form ([`BiPoly`]) and the real `(x, y)` form ([`XyPoly`]) with
//! `z = x + iy`. Both share the sparse representation [`Poly2`].

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed};

use crate::error::{ChaosError, Result};
use crate::exact::{
    binomial_q, cint, cq, creal, format_complex, is_czero, rat, ratio, to_c64, to_f64,
    ComplexRational, Rational,
};

/// Marker for the `(z, z̄)` coordinate form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ZForm;
/// Marker for the real `(x, y)` coordinate form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct XyForm;

/// Sparse polynomial in two variables; exponent pair `(a, b)` maps to its
/// coefficient. Zero coefficients are never stored.
#[derive(PartialEq, Eq)]
pub struct Poly2<F> {
    terms: BTreeMap<(u32, u32), ComplexRational>,
    form: PhantomData<F>,
}

impl<F> Clone for Poly2<F> {
    fn clone(&self) -> Self {
        Self {
            terms: self.terms.clone(),
            form: PhantomData,
        }
    }
}

/// Polynomial in `z` and `z̄`.
pub type BiPoly = Poly2<ZForm>;
/// Polynomial in the real coordinates `x = Re z`, `y = Im z`.
pub type XyPoly = Poly2<XyForm>;

impl<F> Default for Poly2<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F> Poly2<F> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
            form: PhantomData,
        }
    }

    pub fn constant(c: ComplexRational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(cint(1))
    }

    pub fn monomial(a: u32, b: u32, c: ComplexRational) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), ComplexRational)>,
    {
        let mut p = Self::zero();
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: ComplexRational) {
        if is_czero(&c) {
            return;
        }
        let slot = self.terms.entry((a, b)).or_insert_with(|| cint(0));
        *slot = slot.clone() + c;
        if is_czero(slot) {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coeff(&self, a: u32, b: u32) -> ComplexRational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(|| cint(0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &ComplexRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree `a + b` among stored terms.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    /// Largest exponent of each variable separately.
    pub fn partial_degrees(&self) -> (u32, u32) {
        self.terms.keys().fold((0, 0), |(da, db), &(a, b)| (da.max(a), db.max(b)))
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to the first variable.
    pub fn d_first(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((a, _), _)| *a > 0)
                .map(|(&(a, b), c)| ((a - 1, b), c.clone() * cint(a as i64))),
        )
    }

    /// Partial derivative with respect to the second variable.
    pub fn d_second(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|(&(a, b), c)| ((a, b - 1), c.clone() * cint(b as i64))),
        )
    }

    pub fn mul_first(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), c)| ((a + 1, b), c.clone())))
    }

    pub fn mul_second(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), c)| ((a, b + 1), c.clone())))
    }

    /// Largest absolute difference between coefficients of two polynomials
    /// once both are rounded to floating point.
    pub fn max_abs_diff_f64(&self, other: &FloatPoly) -> f64 {
        let mut keys: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        keys.extend(other.terms.keys().copied());
        keys.into_iter()
            .map(|(a, b)| (to_c64(&self.coeff(a, b)) - other.coeff(a, b)).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, to_c64(v))).collect(),
        }
    }

    fn eval_pair(&self, u: Complex64, v: Complex64) -> Complex64 {
        let (du, dv) = self.partial_degrees();
        let upow = powers(u, du);
        let vpow = powers(v, dv);
        self.terms
            .iter()
            .map(|(&(a, b), c)| to_c64(c) * upow[a as usize] * vpow[b as usize])
            .sum()
    }
}

fn powers(base: Complex64, max: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=max {
        out.push(acc);
        acc *= base;
    }
    out
}

impl<F> fmt::Debug for Poly2<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| format!("({})*[{a},{b}]", format_complex(c)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<F> Add for &Poly2<F> {
    type Output = Poly2<F>;
    fn add(self, rhs: Self) -> Poly2<F> {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl<F> Sub for &Poly2<F> {
    type Output = Poly2<F>;
    fn sub(self, rhs: Self) -> Poly2<F> {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }
}

impl<F> Neg for &Poly2<F> {
    type Output = Poly2<F>;
    fn neg(self) -> Poly2<F> {
        self.scale(&cint(-1))
    }
}

impl<F> Mul for &Poly2<F> {
    type Output = Poly2<F>;
    fn mul(self, rhs: Self) -> Poly2<F> {
        let mut out = Poly2::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl BiPoly {
    pub fn z() -> Self {
        Self::monomial(1, 0, cint(1))
    }

    pub fn zbar() -> Self {
        Self::monomial(0, 1, cint(1))
    }

    /// Complex conjugate as a polynomial: conjugate every coefficient and
    /// swap the `z`/`z̄` exponents.
    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), c)| ((b, a), c.conj())))
    }

    pub fn d_z(&self) -> Self {
        self.d_first()
    }

    pub fn d_zbar(&self) -> Self {
        self.d_second()
    }

    /// Rewrites in real coordinates via `z = x + iy`, `z̄ = x - iy`.
    pub fn to_xy(&self) -> XyPoly {
        let z = XyPoly::from_terms([((1, 0), cint(1)), ((0, 1), cq(rat(0), rat(1)))]);
        let zbar = z.conj_coords();
        let (da, db) = self.partial_degrees();
        let zp = power_table(&z, da);
        let zbp = power_table(&zbar, db);
        let mut out = XyPoly::zero();
        for (&(a, b), c) in &self.terms {
            let term = (&zp[a as usize] * &zbp[b as usize]).scale(c);
            out = &out + &term;
        }
        out
    }

    /// Evaluates in double precision at `z`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.eval_pair(z, z.conj())
    }
}

impl XyPoly {
    pub fn x() -> Self {
        Self::monomial(1, 0, cint(1))
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, cint(1))
    }

    /// The conjugate function; `x` and `y` are real so only coefficients change.
    fn conj_coords(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&k, c)| (k, c.conj())))
    }

    /// Rewrites in complex coordinates via `x = (z + z̄)/2`, `y = (z - z̄)/(2i)`.
    pub fn to_zzbar(&self) -> BiPoly {
        let half = creal(ratio(1, 2));
        let x = BiPoly::from_terms([((1, 0), half.clone()), ((0, 1), half)]);
        // 1/(2i) = -i/2
        let y = BiPoly::from_terms([
            ((1, 0), cq(rat(0), ratio(-1, 2))),
            ((0, 1), cq(rat(0), ratio(1, 2))),
        ]);
        let (da, db) = self.partial_degrees();
        let xp = power_table(&x, da);
        let yp = power_table(&y, db);
        let mut out = BiPoly::zero();
        for (&(a, b), c) in &self.terms {
            let term = (&xp[a as usize] * &yp[b as usize]).scale(c);
            out = &out + &term;
        }
        out
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Complex64 {
        self.eval_pair(Complex64::new(x, 0.0), Complex64::new(y, 0.0))
    }

    /// `H_n(a x + b y)` expanded exactly.
    pub fn hermite_of_linear(n: u32, a: &Rational, b: &Rational) -> Self {
        let lin = Self::from_terms([((1, 0), creal(a.clone())), ((0, 1), creal(b.clone()))]);
        let powers = power_table(&lin, n);
        let mut out = Self::zero();
        for (j, c) in hermite_coeffs(n).into_iter().enumerate() {
            out = &out + &powers[j].scale(&creal(c));
        }
        out
    }

    /// Product `H_k(x) H_l(y)`.
    pub fn hermite_product(k: u32, l: u32) -> Self {
        let hx = hermite_coeffs(k);
        let hy = hermite_coeffs(l);
        let mut out = Self::zero();
        for (i, cx) in hx.iter().enumerate() {
            for (j, cy) in hy.iter().enumerate() {
                out.add_term(i as u32, j as u32, creal(cx * cy));
            }
        }
        out
    }
}

fn power_table<F>(base: &Poly2<F>, max: u32) -> Vec<Poly2<F>> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(Poly2::one());
    for k in 0..max as usize {
        let next = &out[k] * base;
        out.push(next);
    }
    out
}

/// Floating-point counterpart of [`Poly2`] used when an operator is applied
/// at an angle without exact trigonometric values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FloatPoly {
    pub terms: BTreeMap<(u32, u32), Complex64>,
}

impl FloatPoly {
    pub fn coeff(&self, a: u32, b: u32) -> Complex64 {
        self.terms.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: Complex64) {
        *self.terms.entry((a, b)).or_default() += c;
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &FloatPoly) -> f64 {
        let mut keys: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        keys.extend(other.terms.keys().copied());
        keys.into_iter()
            .map(|(a, b)| (self.coeff(a, b) - other.coeff(a, b)).norm())
            .fold(0.0, f64::max)
    }
}

/// Index `(m, n, rho)` of a complex Hermite polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteIndex {
    pub m: u32,
    pub n: u32,
    pub rho: Rational,
}

impl HermiteIndex {
    pub fn new(m: u32, n: u32, rho: Rational) -> Result<Self> {
        if !rho.is_positive() {
            return Err(ChaosError::InvalidRho(rho.to_string()));
        }
        Ok(Self { m, n, rho })
    }

    /// `rho = 2`, the convention used everywhere downstream.
    pub fn standard(m: u32, n: u32) -> Self {
        Self { m, n, rho: rat(2) }
    }
}

/// Coefficients `c_0..c_n` of the probabilists' Hermite polynomial
/// `H_n(x) = (-1)^n e^{x²/2} dⁿ/dxⁿ e^{-x²/2}`.
///
/// Built from the derivative definition: writing
/// `dᵏ/dxᵏ e^{-x²/2} = P_k(x) e^{-x²/2}` gives `P_{k+1} = P_k' - x P_k`.
pub fn hermite_coeffs(n: u32) -> Vec<Rational> {
    let mut p: Vec<Rational> = vec![rat(1)];
    for _ in 0..n {
        let mut next = vec![rat(0); p.len() + 1];
        for (j, c) in p.iter().enumerate() {
            if j > 0 {
                next[j - 1] += c * rat(j as i64);
            }
            next[j + 1] -= c;
        }
        p = next;
    }
    if n % 2 == 1 {
        p.iter_mut().for_each(|c| *c = -c.clone());
    }
    p
}

/// `H_n` as a polynomial in `x` alone.
pub fn real_hermite(n: u32) -> XyPoly {
    XyPoly::from_terms(
        hermite_coeffs(n)
            .into_iter()
            .enumerate()
            .map(|(j, c)| ((j as u32, 0), creal(c))),
    )
}

/// `J_{m,n}(z, rho) = rho^{m+n} (∂*)^m (∂̄*)^n 1` where
/// `∂*φ = -∂_{z̄}φ + (z/rho)φ` and `∂̄*φ = -∂_zφ + (z̄/rho)φ`.
pub fn complex_hermite(idx: &HermiteIndex) -> BiPoly {
    let inv_rho = creal(Rational::one() / idx.rho.clone());
    let mut p = BiPoly::one();
    for _ in 0..idx.n {
        p = &p.mul_zbar().scale(&inv_rho) - &p.d_z();
    }
    for _ in 0..idx.m {
        p = &p.mul_z().scale(&inv_rho) - &p.d_zbar();
    }
    p.scale(&creal(crate::exact::pow_q(&idx.rho, idx.m + idx.n)))
}

impl BiPoly {
    fn mul_z(&self) -> Self {
        self.mul_first()
    }

    fn mul_zbar(&self) -> Self {
        self.mul_second()
    }
}

/// An angle given by exact rational cosine and sine with `cos² + sin² = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactAngle {
    cos: Rational,
    sin: Rational,
}

impl ExactAngle {
    pub fn new(cos: Rational, sin: Rational) -> Result<Self> {
        if &cos * &cos + &sin * &sin != rat(1) {
            return Err(ChaosError::InvalidAngle(format!(
                "cos={cos}, sin={sin} is not on the unit circle"
            )));
        }
        Ok(Self { cos, sin })
    }

    /// Angle of the rational point `(a/c, b/c)` of a Pythagorean triple.
    pub fn from_triple(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(ratio(a, c), ratio(b, c))
    }

    pub fn zero() -> Self {
        Self {
            cos: rat(1),
            sin: rat(0),
        }
    }

    pub fn cos(&self) -> &Rational {
        &self.cos
    }

    pub fn sin(&self) -> &Rational {
        &self.sin
    }

    pub fn radians(&self) -> f64 {
        to_f64(&self.sin).atan2(to_f64(&self.cos))
    }

    /// `e^{iθ}`.
    pub fn unit(&self) -> ComplexRational {
        cq(self.cos.clone(), self.sin.clone())
    }
}

/// Eigenvalue `-[(m+n)cosθ + i(m-n)sinθ]` of the OU generator on `J_{m,n}`.
pub fn ou_eigenvalue(m: u32, n: u32, angle: &ExactAngle) -> ComplexRational {
    let re = -(rat((m + n) as i64) * angle.cos());
    let im = -(rat(m as i64 - n as i64) * angle.sin());
    cq(re, im)
}

/// Applies `A_θ = 2ρcosθ ∂²/∂z∂z̄ - e^{iθ} z ∂_z - e^{-iθ} z̄ ∂_{z̄}` exactly.
pub fn ou_apply_exact(p: &BiPoly, angle: &ExactAngle, rho: &Rational) -> Result<BiPoly> {
    if !angle.cos().is_positive() {
        return Err(ChaosError::InvalidAngle(format!("{}", angle.radians())));
    }
    if !rho.is_positive() {
        return Err(ChaosError::InvalidRho(rho.to_string()));
    }
    let diffusion = creal(rat(2) * rho * angle.cos());
    let e = angle.unit();
    let laplace = p.d_z().d_zbar().scale(&diffusion);
    let drift_z = p.d_z().mul_z().scale(&e);
    let drift_zbar = p.d_zbar().mul_zbar().scale(&e.conj());
    Ok(&(&laplace - &drift_z) - &drift_zbar)
}

/// Floating-point `A_θ` for angles without exact trigonometric values.
pub fn ou_apply(p: &BiPoly, theta: f64, rho: f64) -> Result<FloatPoly> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    if !(theta > -half_pi && theta < half_pi) {
        return Err(ChaosError::InvalidAngle(theta.to_string()));
    }
    if !(rho > 0.0) {
        return Err(ChaosError::InvalidRho(rho.to_string()));
    }
    let e = Complex64::from_polar(1.0, theta);
    let diffusion = 2.0 * rho * theta.cos();
    let mut out = FloatPoly::default();
    for (&(a, b), c) in p.terms() {
        let c = to_c64(c);
        if a > 0 && b > 0 {
            out.add_term(a - 1, b - 1, c * diffusion * (a as f64) * (b as f64));
        }
        if a > 0 {
            out.add_term(a, b, -c * e * a as f64);
        }
        if b > 0 {
            out.add_term(a, b, -c * e.conj() * b as f64);
        }
    }
    out.terms.retain(|_, v| *v != Complex64::default());
    Ok(out)
}

/// `z^r z̄^s = Σ_i C(r,i) C(s,i) i! 2^i J_{r-i,s-i}(z)` (rho = 2); returns the
/// coefficient of each `J_{m,n}` keyed by `(m, n)`.
pub fn expand_monomial(r: u32, s: u32) -> BTreeMap<(u32, u32), Rational> {
    (0..=r.min(s))
        .map(|i| {
            let c = binomial_q(r, i)
                * binomial_q(s, i)
                * crate::exact::factorial_q(i)
                * crate::exact::pow_q(&rat(2), i);
            ((r - i, s - i), c)
        })
        .collect()
}

/// Double-precision `J_{a,b}(z)` for all `a ≤ max_a`, `b ≤ max_b` at rho = 2,
/// via `J_{a+1,b} = z J_{a,b} - 2b J_{a,b-1}`. Indexed `[a][b]`.
pub fn complex_hermite_table(z: Complex64, max_a: usize, max_b: usize) -> Vec<Vec<Complex64>> {
    let mut table = vec![vec![Complex64::default(); max_b + 1]; max_a + 1];
    // J_{0,b} = conj(J_{b,0}) = z̄^b
    let zb = z.conj();
    let mut acc = Complex64::new(1.0, 0.0);
    for b in 0..=max_b {
        table[0][b] = acc;
        acc *= zb;
    }
    for a in 0..max_a {
        for b in 0..=max_b {
            let mut v = z * table[a][b];
            if b > 0 {
                v -= 2.0 * b as f64 * table[a][b - 1];
            }
            table[a + 1][b] = v;
        }
    }
    table
}

/// Double-precision `H_0(x)..H_n(x)` via the three-term recurrence.
pub fn hermite_values(x: f64, n: usize, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n == 0 {
        return;
    }
    out.push(x);
    for k in 1..n {
        let next = x * out[k] - k as f64 * out[k - 1];
        out.push(next);
    }
}
