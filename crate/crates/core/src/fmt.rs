//! Fourth-moment experiments: block-kernel sequences, Monte Carlo and exact
//! moment reports, verdicts against the limit laws, and a Kolmogorov–Smirnov
//! side check.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::chaos::{
    decompose, exact_moment, sample_at, ChaosElement, ChaosExpr, ComplexIntegrand, SqrtTwoComplex,
};
use crate::error::{ChaosError, Result};
use crate::exact::{cint, creal, factorial_q, rat, ratio, to_f64, ComplexRational, Rational};
use crate::exec::{map_chunks, Execution, CHUNK};
use crate::tensor::{contract, inner, prod_moment, ComplexKernel, SymTensor};

/// `F = √scale_sq · Σ_j 𝓘(φ_j)`, optionally remembered as a normalized sum of
/// `k` independent copies of a base variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaosVariable {
    parts: Vec<ComplexKernel>,
    scale_sq: Rational,
    blocks: Option<(Box<ChaosVariable>, u64)>,
}

impl ChaosVariable {
    pub fn new(parts: Vec<ComplexKernel>, scale_sq: Rational) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| ChaosError::ShapeMismatch("a chaos variable needs a kernel".into()))?;
        let d = first.dim();
        if let Some(p) = parts.iter().find(|p| p.dim() != d) {
            return Err(ChaosError::ShapeMismatch(format!(
                "kernels over D={d} and D={}",
                p.dim()
            )));
        }
        if scale_sq <= rat(0) {
            return Err(ChaosError::ShapeMismatch("scale must be positive".into()));
        }
        Ok(Self {
            parts,
            scale_sq,
            blocks: None,
        })
    }

    pub fn single(phi: ComplexKernel) -> Self {
        Self {
            parts: vec![phi],
            scale_sq: rat(1),
            blocks: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    pub fn parts(&self) -> &[ComplexKernel] {
        &self.parts
    }

    pub fn scale_sq(&self) -> &Rational {
        &self.scale_sq
    }

    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        self.parts.iter().map(ComplexKernel::bidegree).collect()
    }

    /// Block count when built by [`block_sum`].
    pub fn block_count(&self) -> Option<u64> {
        self.blocks.as_ref().map(|(_, k)| *k)
    }

    pub fn integrand(&self) -> Result<ComplexIntegrand> {
        let s = to_f64(&self.scale_sq).sqrt();
        ComplexIntegrand::sum(
            self.parts
                .iter()
                .map(|p| ComplexIntegrand::compile_scaled(p, s))
                .collect(),
        )
    }

    /// Moves every kernel into a larger dimension (new coordinates unused).
    pub fn widen(&self, dim: usize) -> Result<Self> {
        Ok(Self {
            parts: self
                .parts
                .iter()
                .map(|p| p.embed(0, dim))
                .collect::<Result<_>>()?,
            scale_sq: self.scale_sq.clone(),
            blocks: None,
        })
    }

    /// `(u, v, s)` with `F = √s (I(u) + i I(v))`; all parts must share one
    /// total degree.
    pub fn decompose(&self) -> Result<(SymTensor, SymTensor, Rational)> {
        let l = total_degree(self)?;
        let mut u = SymTensor::zero(l, 2 * self.dim());
        let mut v = SymTensor::zero(l, 2 * self.dim());
        let mut s = rat(1);
        for p in &self.parts {
            let d = decompose(p);
            u = u.add(&d.u)?;
            v = v.add(&d.v)?;
            s = d.scale_sq;
        }
        Ok((u, v, s * &self.scale_sq))
    }
}

fn total_degree(var: &ChaosVariable) -> Result<usize> {
    let degrees: Vec<usize> = var.bidegrees().iter().map(|(m, n)| m + n).collect();
    let l = degrees[0];
    if degrees.iter().any(|&d| d != l) {
        return Err(ChaosError::InvalidCriterion(format!(
            "parts have different total degrees {degrees:?}"
        )));
    }
    Ok(l)
}

/// `k^{-1/2} Σ_{j<k}` of independent copies of `base`, copy `j` living on
/// coordinates `j·D..(j+1)·D`.
pub fn block_sum(base: &ChaosVariable, k: u64) -> Result<ChaosVariable> {
    if k == 0 {
        return Err(ChaosError::ShapeMismatch("block count must be at least 1".into()));
    }
    let d0 = base.dim();
    let dim = d0 * k as usize;
    let mut parts = Vec::with_capacity(base.parts.len());
    for p in &base.parts {
        let (m, n) = p.bidegree();
        let mut acc = ComplexKernel::zero(m, n, dim);
        for j in 0..k as usize {
            acc = acc.add(&p.embed(j * d0, dim)?)?;
        }
        parts.push(acc);
    }
    let mut plain = base.clone();
    plain.blocks = None;
    Ok(ChaosVariable {
        parts,
        scale_sq: base.scale_sq.clone() / Rational::from_integer(k.into()),
        blocks: Some((Box::new(plain), k)),
    })
}

/// `φ_k = k^{-1/2} Σ_{j<k} e_j^{⊗m} ⊗ ē_j^{⊗n}` over `D = k`.
pub fn gen_block_kernel(m: usize, n: usize, k: u64) -> Result<ChaosVariable> {
    if m + n < 2 {
        return Err(ChaosError::InvalidCriterion(format!(
            "block kernels need m + n ≥ 2, got ({m}, {n})"
        )));
    }
    let base = ChaosVariable::single(ComplexKernel::rank_one(&[cint(1)], m, n));
    block_sum(&base, k)
}

/// The five moments tracked by the fourth-moment criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quantity {
    Abs2,
    F2,
    Abs4,
    F4,
    T3,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::Abs2,
        Quantity::F2,
        Quantity::Abs4,
        Quantity::F4,
        Quantity::T3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Abs2 => "E|F|^2",
            Quantity::F2 => "E[F^2]",
            Quantity::Abs4 => "E|F|^4",
            Quantity::F4 => "E[F^4]",
            Quantity::T3 => "T3",
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, Quantity::F2 | Quantity::F4 | Quantity::T3)
    }

    fn index(self) -> usize {
        self as usize
    }

    fn sample(self, f: Complex64) -> Complex64 {
        let a2 = f.norm_sqr();
        match self {
            Quantity::Abs2 => Complex64::new(a2, 0.0),
            Quantity::F2 => f * f,
            Quantity::Abs4 => Complex64::new(a2 * a2, 0.0),
            Quantity::F4 => (f * f) * (f * f),
            Quantity::T3 => f * f * f + 3.0 * a2 * f.conj(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub re: f64,
    pub im: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(v: Complex64) -> Self {
        Self {
            re: v.re,
            im: v.im,
            stderr: 0.0,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Sample mean with standard error `sqrt(var Re + var Im) / √N`.
    pub fn from_samples(xs: impl Iterator<Item = Complex64> + Clone) -> Result<Self> {
        let n = xs.clone().count();
        if n < 2 {
            return Err(ChaosError::TooFewSamples { needed: 2, got: n });
        }
        let nf = n as f64;
        let mean: Complex64 = xs.clone().sum::<Complex64>() / nf;
        let ss: f64 = xs.map(|x| (x - mean).norm_sqr()).sum();
        Ok(Self {
            re: mean.re,
            im: mean.im,
            stderr: (ss / (nf - 1.0)).sqrt() / nf.sqrt(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: usize,
    pub seed: u64,
    pub exact: bool,
    values: Vec<Estimate>,
}

impl MomentReport {
    pub fn get(&self, q: Quantity) -> Estimate {
        self.values[q.index()]
    }

    pub fn from_values(values: &[Complex64], seed: u64) -> Result<Self> {
        let est = Quantity::ALL
            .iter()
            .map(|&q| Estimate::from_samples(values.iter().map(move |&f| q.sample(f))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: values.len(),
            seed,
            exact: false,
            values: est,
        })
    }

    pub fn from_exact(m: &ExactMoments) -> Self {
        let values = Quantity::ALL.iter().map(|&q| Estimate::exact(m.get(q))).collect();
        Self {
            n: 0,
            seed: 0,
            exact: true,
            values,
        }
    }
}

/// Pathwise values of several variables over the same keyed samples.
pub fn simulate_many(
    vars: &[&ChaosVariable],
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Vec<Complex64>>> {
    let d = vars
        .first()
        .ok_or_else(|| ChaosError::ShapeMismatch("nothing to simulate".into()))?
        .dim();
    if let Some(v) = vars.iter().find(|v| v.dim() != d) {
        return Err(ChaosError::ShapeMismatch(format!(
            "variables over D={d} and D={}",
            v.dim()
        )));
    }
    let integrands = vars
        .iter()
        .map(|v| v.integrand())
        .collect::<Result<Vec<_>>>()?;
    let chunks = map_chunks(n, CHUNK, exec, |r| -> Result<Vec<Vec<Complex64>>> {
        let mut out = vec![Vec::with_capacity(r.len()); integrands.len()];
        for i in r {
            let s = sample_at(d, seed, i as u64);
            for (j, integrand) in integrands.iter().enumerate() {
                out[j].push(integrand.eval(&s)?);
            }
        }
        Ok(out)
    })?;
    let mut out = vec![Vec::with_capacity(n); vars.len()];
    for chunk in chunks {
        for (j, vals) in chunk?.into_iter().enumerate() {
            out[j].extend(vals);
        }
    }
    Ok(out)
}

pub fn simulate(var: &ChaosVariable, n: usize, seed: u64, exec: Execution) -> Result<Vec<Complex64>> {
    Ok(simulate_many(&[var], n, seed, exec)?.pop().expect("one variable"))
}

/// Monte Carlo report with plain standard errors.
pub fn estimate(var: &ChaosVariable, n: usize, seed: u64, exec: Execution) -> Result<MomentReport> {
    if n < 2 {
        return Err(ChaosError::TooFewSamples { needed: 2, got: n });
    }
    MomentReport::from_values(&simulate(var, n, seed, exec)?, seed)
}

/// Exact moments; the odd-order `T3` is exact only up to the final
/// floating conversion.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMoments {
    pub abs2: SqrtTwoComplex,
    pub f2: SqrtTwoComplex,
    pub abs4: SqrtTwoComplex,
    pub f4: SqrtTwoComplex,
    pub t3: Complex64,
}

impl ExactMoments {
    pub fn get(&self, q: Quantity) -> Complex64 {
        match q {
            Quantity::Abs2 => self.abs2.to_c64(),
            Quantity::F2 => self.f2.to_c64(),
            Quantity::Abs4 => self.abs4.to_c64(),
            Quantity::F4 => self.f4.to_c64(),
            Quantity::T3 => self.t3,
        }
    }
}

/// `E[G^a conj(G)^b]` for `G = Σ_j 𝓘(φ_j)` without the scale.
fn raw_moment(var: &ChaosVariable, a: u32, b: u32) -> Result<SqrtTwoComplex> {
    let elements: Vec<ChaosElement> = var.parts.iter().cloned().map(ChaosElement::Complex).collect();
    let g = (1..elements.len()).fold(ChaosExpr::elem(0), |acc, i| acc.plus(ChaosExpr::elem(i)));
    let mut expr = ChaosExpr::Const(cint(1));
    if a > 0 {
        expr = expr.times(g.clone().pow(a));
    }
    if b > 0 {
        expr = expr.times(g.conj().pow(b));
    }
    exact_moment(&elements, &expr)
}

fn scaled(var: &ChaosVariable, a: u32, b: u32) -> Result<SqrtTwoComplex> {
    let order = a + b;
    debug_assert!(order.is_multiple_of(2));
    let q = (0..order / 2).fold(rat(1), |acc, _| acc * &var.scale_sq);
    Ok(raw_moment(var, a, b)?.scale(&q))
}

fn scaled_odd(var: &ChaosVariable, a: u32, b: u32) -> Result<Complex64> {
    let s = to_f64(&var.scale_sq).powf((a + b) as f64 / 2.0);
    Ok(raw_moment(var, a, b)?.to_c64() * s)
}

/// Exact moments by expanding the whole variable through the Wick oracle.
pub fn exact_moments_direct(var: &ChaosVariable) -> Result<ExactMoments> {
    Ok(ExactMoments {
        abs2: scaled(var, 1, 1)?,
        f2: scaled(var, 2, 0)?,
        abs4: scaled(var, 2, 2)?,
        f4: scaled(var, 4, 0)?,
        t3: scaled_odd(var, 3, 0)? + 3.0 * scaled_odd(var, 1, 2)?,
    })
}

/// Exact moments; block sums use the moments of one block and the algebra of
/// normalized sums of independent copies.
pub fn exact_moments(var: &ChaosVariable) -> Result<ExactMoments> {
    let Some((base, k)) = &var.blocks else {
        return exact_moments_direct(var);
    };
    let b = exact_moments_direct(base)?;
    let m11 = &b.abs2;
    let m20 = &b.f2;
    let m02 = scaled(base, 0, 2)?;
    let inv_k = ratio(1, *k as i64);
    let rest = rat(1) - &inv_k;
    // E[F^a F̄^b] = μ_{a,b}/k + (1 − 1/k) · Σ_pairings Π μ_2 for a + b = 4
    let pair_abs = m20.mul(&m02).add(&m11.mul(m11).scale(&rat(2)));
    let pair_f4 = m20.mul(m20).scale(&rat(3));
    Ok(ExactMoments {
        abs2: m11.clone(),
        f2: m20.clone(),
        abs4: b.abs4.scale(&inv_k).add(&pair_abs.scale(&rest)),
        f4: b.f4.scale(&inv_k).add(&pair_f4.scale(&rest)),
        t3: b.t3 / (*k as f64).sqrt(),
    })
}

pub fn exact_report(var: &ChaosVariable) -> Result<MomentReport> {
    Ok(MomentReport::from_exact(&exact_moments(var)?))
}

/// `E[U⁴] − 3(E U²)²`, `E[V⁴] − 3(E V²)²` and `E[U²V²] − E[U²]E[V²]` for
/// `F = U + iV`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gaps {
    pub u: Rational,
    pub v: Rational,
    pub uv: Rational,
}

impl Gaps {
    pub fn all_nonnegative(&self) -> bool {
        self.u >= rat(0) && self.v >= rat(0) && self.uv >= rat(0)
    }
}

pub fn nonnegativity_gaps(var: &ChaosVariable) -> Result<Gaps> {
    let (u, v, s) = var.decompose()?;
    let qf = factorial_q(u.order() as u32);
    let eu2 = &qf * u.norm_sq();
    let ev2 = &qf * v.norm_sq();
    let s2 = &s * &s;
    let gap = |x: Rational| x * &s2;
    Ok(Gaps {
        u: gap(prod_moment(&u, &u)? - rat(3) * &eu2 * &eu2),
        v: gap(prod_moment(&v, &v)? - rat(3) * &ev2 * &ev2),
        uv: gap(prod_moment(&u, &v)? - &eu2 * &ev2),
    })
}

/// `(r, ‖u⊗_r u‖², ‖v⊗_r v‖²)` for `r = 1..l−1`, including the scale.
pub fn contraction_norms(var: &ChaosVariable) -> Result<Vec<(usize, Rational, Rational)>> {
    let (u, v, s) = var.decompose()?;
    let s2 = &s * &s;
    (1..u.order())
        .map(|r| {
            Ok((
                r,
                contract(&u, &u, r)?.norm_sq() * &s2,
                contract(&v, &v, r)?.norm_sq() * &s2,
            ))
        })
        .collect()
}

/// `E[U V]` for the real and imaginary parts, exact.
pub fn real_imag_covariance(var: &ChaosVariable) -> Result<Rational> {
    let (u, v, s) = var.decompose()?;
    Ok(factorial_q(u.order() as u32) * inner(&u, &v)? * s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    GaussianOffdiag,
    GaussianDiag,
    GaussianDegenerate,
    ChiSquareOffdiag,
    ChiSquareDiag,
    Multichaos,
}

impl Case {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "gaussian-offdiag" => Case::GaussianOffdiag,
            "gaussian-diag" => Case::GaussianDiag,
            "gaussian-degenerate" => Case::GaussianDegenerate,
            "chi-square-offdiag" => Case::ChiSquareOffdiag,
            "chi-square-diag" => Case::ChiSquareDiag,
            "multichaos" => Case::Multichaos,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::GaussianOffdiag => "gaussian-offdiag",
            Case::GaussianDiag => "gaussian-diag",
            Case::GaussianDegenerate => "gaussian-degenerate",
            Case::ChiSquareOffdiag => "chi-square-offdiag",
            Case::ChiSquareDiag => "chi-square-diag",
            Case::Multichaos => "multichaos",
        }
    }

    pub fn is_chi_square(self) -> bool {
        matches!(self, Case::ChiSquareOffdiag | Case::ChiSquareDiag)
    }
}

/// Message used when a chi-square target is requested for odd total degree.
pub const ODD_CHI_SQUARE: &str = "chi-square targets need an even total degree m + n: when m + n \
    is odd there does not exist any sequence with bounded variances converging in distribution \
    to a complex centered chi-square law";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionSpec {
    pub case: Case,
    pub sigma2: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Degrees of freedom of the configured chi-square law per unit of the
    /// nominal parameter; `0.5` makes `E|ξ|² = σ²`.
    pub chi_square_scale: f64,
}

impl CriterionSpec {
    pub fn new(case: Case, sigma2: f64) -> Self {
        Self {
            case,
            sigma2,
            a: None,
            b: None,
            chi_square_scale: 0.5,
        }
    }

    pub fn with_ab(mut self, a: f64, b: f64) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self
    }

    /// Checks the spec against the bidegrees of the variable under test.
    pub fn validate(&self, bidegrees: &[(usize, usize)]) -> Result<()> {
        let bad = |m: String| Err(ChaosError::InvalidCriterion(m));
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return bad(format!("σ² must be positive, got {}", self.sigma2));
        }
        let (a, b) = (self.a.unwrap_or(0.0), self.b.unwrap_or(0.0));
        if a * a + b * b > 1.0 + 1e-12 {
            return bad(format!("a² + b² = {} exceeds 1", a * a + b * b));
        }
        if !(self.chi_square_scale.is_finite() && self.chi_square_scale > 0.0) {
            return bad("chi-square scale must be positive".into());
        }
        let Some(&(m0, n0)) = bidegrees.first() else {
            return bad("no kernel bidegree given".into());
        };
        if let Some((m, n)) = bidegrees.iter().find(|(m, n)| m + n < 2) {
            return bad(format!("bidegree ({m}, {n}) has m + n < 2"));
        }
        let fixed = bidegrees.iter().all(|&d| d == (m0, n0));
        match self.case {
            // chi-square sums over mixed bidegrees of one even total degree
            // share the diagonal targets
            Case::Multichaos | Case::ChiSquareDiag => {
                if bidegrees.iter().any(|(m, n)| m + n != m0 + n0) {
                    return bad("sums across bidegrees need one total degree".into());
                }
            }
            _ if !fixed => return bad("this case needs a single fixed bidegree".into()),
            _ => {}
        }
        if self.case.is_chi_square() && (m0 + n0) % 2 == 1 {
            return bad(ODD_CHI_SQUARE.into());
        }
        match self.case {
            Case::GaussianOffdiag | Case::ChiSquareOffdiag if bidegrees.iter().any(|(m, n)| m == n) => {
                bad(format!("off-diagonal case needs m ≠ n, got ({m0}, {n0})"))
            }
            Case::GaussianDiag | Case::GaussianDegenerate if m0 != n0 => {
                bad(format!("diagonal case needs m = n, got ({m0}, {n0})"))
            }
            _ => Ok(()),
        }
    }
}

/// Independent centered chi-square coordinates `G_1(ν_1) + i G_2(ν_2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquareLaw {
    pub nu1: f64,
    pub nu2: f64,
}

impl ChiSquareLaw {
    /// `E[G^r]` for a centered chi-square with `ν` degrees of freedom, `r ≤ 4`.
    pub fn centered_moment(nu: f64, r: u32) -> f64 {
        match r {
            0 => 1.0,
            1 => 0.0,
            2 => 2.0 * nu,
            3 => 8.0 * nu,
            4 => 12.0 * nu * nu + 48.0 * nu,
            _ => f64::NAN,
        }
    }

    pub fn moment(&self, q: Quantity) -> Complex64 {
        let m = Self::centered_moment;
        let (n1, n2) = (self.nu1, self.nu2);
        match q {
            Quantity::Abs2 => Complex64::new(m(n1, 2) + m(n2, 2), 0.0),
            Quantity::F2 => Complex64::new(m(n1, 2) - m(n2, 2), 0.0),
            Quantity::Abs4 => Complex64::new(m(n1, 4) + m(n2, 4) + 2.0 * m(n1, 2) * m(n2, 2), 0.0),
            Quantity::F4 => Complex64::new(m(n1, 4) + m(n2, 4) - 6.0 * m(n1, 2) * m(n2, 2), 0.0),
            Quantity::T3 => Complex64::new(4.0 * m(n1, 3), -4.0 * m(n2, 3)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// A standing assumption of the theorem (variance normalization).
    Hypothesis,
    /// A moment condition the theorem declares equivalent to convergence.
    Criterion,
    /// Reported for context; does not enter the overall verdict.
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub k: u64,
    pub quantity: String,
    pub estimate: String,
    pub stderr: f64,
    pub target: String,
    pub pass: bool,
}

impl Row {
    pub const CSV_HEADER: &'static str = "k,quantity,estimate,stderr,target,pass";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.k,
            self.quantity,
            self.estimate,
            fmt_real(self.stderr),
            self.target,
            self.pass
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceVerdict {
    pub quantity: String,
    pub role: Role,
    pub target: String,
    pub gaps: Vec<f64>,
    pub tolerances: Vec<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedValue {
    pub quantity: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub case: Case,
    pub sigma2: f64,
    pub a: f64,
    pub b: f64,
    pub rows: Vec<Row>,
    pub sequences: Vec<SequenceVerdict>,
    pub stated_limits: Vec<NamedValue>,
    pub configured_law: Option<ChiSquareLaw>,
    pub notes: Vec<String>,
    pub pass: bool,
}

pub fn fmt_real(x: f64) -> String {
    format!("{x:.8}")
}

/// `re±imi` with eight decimals, or a plain real.
pub fn fmt_value(v: Complex64, complex: bool) -> String {
    if complex {
        let sign = if v.im.is_sign_negative() { '-' } else { '+' };
        format!("{:.8}{sign}{:.8}i", v.re, v.im.abs())
    } else {
        fmt_real(v.re)
    }
}

/// Tolerance at one index: `max(5·SE, 0.02·|target| + 0.01)`.
pub fn tolerance(stderr: f64, target: Complex64) -> f64 {
    (5.0 * stderr).max(0.02 * target.norm() + 0.01)
}

impl Verdict {
    /// Judges a trajectory: the last index must pass and each gap may exceed
    /// the previous one by at most the current tolerance.
    pub fn push_sequence(
        &mut self,
        name: &str,
        role: Role,
        points: &[(u64, Estimate)],
        target: Complex64,
        complex: bool,
    ) {
        let mut gaps = Vec::with_capacity(points.len());
        let mut tols = Vec::with_capacity(points.len());
        for &(k, e) in points {
            let gap = (e.value() - target).norm();
            let tol = tolerance(e.stderr, target);
            self.rows.push(Row {
                k,
                quantity: name.to_string(),
                estimate: fmt_value(e.value(), complex),
                stderr: e.stderr,
                target: fmt_value(target, complex),
                pass: gap <= tol,
            });
            gaps.push(gap);
            tols.push(tol);
        }
        let last_ok = match (gaps.last(), tols.last()) {
            (Some(g), Some(t)) => g <= t,
            _ => false,
        };
        let monotone = (1..gaps.len()).all(|j| gaps[j] <= gaps[j - 1] + tols[j]);
        let pass = last_ok && monotone;
        if role != Role::Auxiliary {
            self.pass &= pass;
        }
        self.sequences.push(SequenceVerdict {
            quantity: name.to_string(),
            role,
            target: fmt_value(target, complex),
            gaps,
            tolerances: tols,
            pass,
        });
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Row::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }
}

fn gaussian_target(q: Quantity, sigma2: f64, ab: Complex64) -> Complex64 {
    let s2 = Complex64::new(sigma2, 0.0);
    match q {
        Quantity::Abs2 => s2,
        Quantity::F2 => s2 * ab,
        Quantity::Abs4 => Complex64::new((ab.norm_sqr() + 2.0) * sigma2 * sigma2, 0.0),
        Quantity::F4 => 3.0 * ab * ab * sigma2 * sigma2,
        Quantity::T3 => Complex64::zero(),
    }
}

/// Resolves `a + ib`, routing nearly degenerate diagonal data to case 3.
fn resolve(spec: &CriterionSpec, last: &MomentReport, notes: &mut Vec<String>) -> (Case, Complex64) {
    let given = match (spec.a, spec.b) {
        (Some(a), b) => Some(Complex64::new(a, b.unwrap_or(0.0))),
        (None, Some(b)) => Some(Complex64::new(0.0, b)),
        (None, None) => None,
    };
    match spec.case {
        Case::GaussianOffdiag | Case::ChiSquareOffdiag => (spec.case, Complex64::zero()),
        Case::ChiSquareDiag => {
            let ab = given.unwrap_or_else(|| {
                let abs2 = last.get(Quantity::Abs2).value().re;
                last.get(Quantity::F2).value() / abs2
            });
            if ab.norm_sqr() >= 1.0 - 1e-12 {
                notes.push(format!(
                    "a² + b² = {:.6} is outside the chi-square diagonal hypothesis a² + b² < 1; \
                     targets are reported but the theorem does not apply",
                    ab.norm_sqr()
                ));
            }
            if ab.im.abs() > 1e-12 {
                notes.push("the chi-square limit law has real E[F²]; b ≠ 0 is inconsistent with it".into());
            }
            (spec.case, ab)
        }
        Case::GaussianDiag | Case::GaussianDegenerate | Case::Multichaos => {
            let ab = match given {
                Some(ab) => ab,
                None => {
                    let abs2 = last.get(Quantity::Abs2);
                    let f2 = last.get(Quantity::F2);
                    let ratio = f2.value() / abs2.re;
                    notes.push(format!("a + ib estimated from data as {}", fmt_value(ratio, true)));
                    if ratio.norm() >= 0.98 || spec.case == Case::GaussianDegenerate {
                        ratio / ratio.norm()
                    } else {
                        ratio
                    }
                }
            };
            if spec.case == Case::GaussianDiag && ab.norm_sqr() >= 1.0 - 1e-9 {
                notes.push("a² + b² = 1: routed to the degenerate diagonal case".into());
                (Case::GaussianDegenerate, ab)
            } else {
                (spec.case, ab)
            }
        }
    }
}

fn role_of(case: Case, q: Quantity) -> Role {
    match (case, q) {
        (_, Quantity::Abs2) => Role::Hypothesis,
        (Case::GaussianDiag | Case::GaussianDegenerate | Case::Multichaos | Case::ChiSquareDiag, Quantity::F2) => {
            Role::Hypothesis
        }
        (_, Quantity::Abs4) => Role::Criterion,
        (Case::GaussianDegenerate, Quantity::F4) => Role::Criterion,
        (Case::ChiSquareOffdiag | Case::ChiSquareDiag, Quantity::T3) => Role::Criterion,
        _ => Role::Auxiliary,
    }
}

/// Verdict for one sequence of reports ordered by `k`.
pub fn verdict(reports: &[(u64, MomentReport)], spec: &CriterionSpec) -> Result<Verdict> {
    let last = reports
        .last()
        .ok_or_else(|| ChaosError::InvalidCriterion("no reports to judge".into()))?;
    if reports.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(ChaosError::InvalidCriterion("reports must be ordered by increasing k".into()));
    }
    let mut notes = Vec::new();
    let (case, ab) = resolve(spec, &last.1, &mut notes);
    let sigma2 = spec.sigma2;
    let mut stated_limits = Vec::new();
    let mut configured_law = None;
    let target: Box<dyn Fn(Quantity) -> Complex64> = if case.is_chi_square() {
        let a = ab.re;
        let law = ChiSquareLaw {
            nu1: spec.chi_square_scale * (1.0 + a) * sigma2 / 2.0,
            nu2: spec.chi_square_scale * (1.0 - a) * sigma2 / 2.0,
        };
        configured_law = Some(law);
        stated_limits.push(NamedValue {
            quantity: Quantity::T3.name().into(),
            value: fmt_value(Complex64::new(1.0 + a, -(1.0 - a)) * 8.0 * sigma2, true),
        });
        stated_limits.push(NamedValue {
            quantity: Quantity::Abs4.name().into(),
            value: fmt_real((2.0 + a * a) * sigma2 * sigma2 + 24.0 * sigma2),
        });
        if (law.moment(Quantity::Abs2).re - sigma2).abs() > 1e-9 * sigma2 {
            notes.push(format!(
                "configured chi-square law has E|ξ|² = {} while σ² = {sigma2}; the stated \
                 limits assume E|ξ|² = σ²",
                fmt_real(law.moment(Quantity::Abs2).re)
            ));
        }
        Box::new(move |q| law.moment(q))
    } else {
        Box::new(move |q| gaussian_target(q, sigma2, ab))
    };
    let mut v = Verdict {
        case,
        sigma2,
        a: ab.re,
        b: ab.im,
        rows: Vec::new(),
        sequences: Vec::new(),
        stated_limits,
        configured_law,
        notes,
        pass: true,
    };
    for q in Quantity::ALL {
        let points: Vec<(u64, Estimate)> = reports.iter().map(|(k, r)| (*k, r.get(q))).collect();
        v.push_sequence(q.name(), role_of(case, q), &points, target(q), q.is_complex());
    }
    Ok(v)
}

/// Degrees of a multivariate vector must be pairwise distinct.
pub fn check_distinct_degrees(degrees: &[usize]) -> Result<()> {
    for i in 0..degrees.len() {
        for j in 0..i {
            if degrees[i] == degrees[j] {
                return Err(ChaosError::InvalidCriterion(format!(
                    "multivariate components {j} and {i} share degree {}; degrees must be pairwise distinct",
                    degrees[i]
                )));
            }
        }
    }
    if degrees.len() < 2 {
        return Err(ChaosError::InvalidCriterion("a multivariate vector needs d ≥ 2 components".into()));
    }
    Ok(())
}

/// Ordered pairs `(j, i)` with `l_i = 2 l_j`.
pub fn doubled_pairs(degrees: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (j, &lj) in degrees.iter().enumerate() {
        for (i, &li) in degrees.iter().enumerate() {
            if li == 2 * lj {
                out.push((j, i));
            }
        }
    }
    out
}

/// `E[F_j² F_i]` and `E[|F_j|² F_i]` from paired samples.
pub fn cross_estimates(fj: &[Complex64], fi: &[Complex64]) -> Result<(Estimate, Estimate)> {
    if fj.len() != fi.len() {
        return Err(ChaosError::ShapeMismatch("paired samples differ in length".into()));
    }
    let sq = Estimate::from_samples(fj.iter().zip(fi).map(|(a, b)| a * a * b))?;
    let ab = Estimate::from_samples(fj.iter().zip(fi).map(|(a, b)| a.norm_sqr() * b))?;
    Ok((sq, ab))
}

/// Reference law for the Kolmogorov–Smirnov check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TargetCdf {
    Normal { variance: f64 },
    CenteredChiSquare { dof: f64 },
}

impl TargetCdf {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            TargetCdf::Normal { variance } => {
                0.5 * statrs::function::erf::erfc(-x / (2.0 * variance).sqrt())
            }
            TargetCdf::CenteredChiSquare { dof } => {
                let y = x + dof;
                if y <= 0.0 {
                    0.0
                } else {
                    statrs::function::gamma::gamma_lr(dof / 2.0, y / 2.0)
                }
            }
        }
    }

    fn check(&self) -> Result<()> {
        let (ok, what) = match *self {
            TargetCdf::Normal { variance } => (variance > 0.0 && variance.is_finite(), variance),
            TargetCdf::CenteredChiSquare { dof } => (dof > 0.0 && dof.is_finite(), dof),
        };
        if ok {
            Ok(())
        } else {
            Err(ChaosError::DegenerateTarget(format!("{self:?} has parameter {what}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub n: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov tail `P(K > λ)`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sided KS distance with the Stephens small-sample correction for the
/// p-value.
pub fn ks_distance(samples: &[f64], target: &TargetCdf) -> Result<KsResult> {
    if samples.len() < 100 {
        return Err(ChaosError::TooFewSamples {
            needed: 100,
            got: samples.len(),
        });
    }
    target.check()?;
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = target.cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    Ok(KsResult {
        n: xs.len(),
        statistic: d,
        p_value: kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d),
    })
}

/// Marginal laws of `Re F` and `Im F` under the verdict's limit.
pub fn marginal_targets(v: &Verdict) -> (TargetCdf, TargetCdf) {
    match v.configured_law {
        Some(law) => (
            TargetCdf::CenteredChiSquare { dof: law.nu1 },
            TargetCdf::CenteredChiSquare { dof: law.nu2 },
        ),
        None => (
            TargetCdf::Normal {
                variance: v.sigma2 * (1.0 + v.a) / 2.0,
            },
            TargetCdf::Normal {
                variance: v.sigma2 * (1.0 - v.a) / 2.0,
            },
        ),
    }
}

/// Exact value as a rational when possible.
pub fn exact_rational(v: &SqrtTwoComplex) -> Option<ComplexRational> {
    v.as_rational().cloned()
}

/// `2σ⁴ + c/k` fit of exact fourth moments: returns `c` from the first point
/// and whether every point satisfies it.
pub fn fits_inverse_k(points: &[(u64, Rational)], sigma4_times_2: &Rational) -> (Rational, bool) {
    let Some((k0, m0)) = points.first() else {
        return (rat(0), true);
    };
    let c = (m0 - sigma4_times_2) * Rational::from_integer((*k0).into());
    let ok = points
        .iter()
        .all(|(k, m)| m == &(sigma4_times_2 + &c / Rational::from_integer((*k).into())));
    (c, ok)
}

#[doc(hidden)]
pub fn creal_q(q: Rational) -> ComplexRational {
    creal(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cq;

    #[test]
    fn block_kernel_examples() {
        let f = gen_block_kernel(1, 2, 1).unwrap();
        let m = exact_moments_direct(&f).unwrap();
        assert_eq!(m.abs2.as_rational(), Some(&cint(2)));
        assert_eq!(m.f2.as_rational(), Some(&cint(0)));
        for k in [1, 2, 3] {
            let f = gen_block_kernel(1, 2, k).unwrap();
            assert_eq!(f.dim(), k as usize);
            let m = exact_moments_direct(&f).unwrap();
            assert_eq!(m.abs2.as_rational(), Some(&cint(2)));
            assert_eq!(m.f2.as_rational(), Some(&cint(0)));
        }
        let f = gen_block_kernel(1, 1, 1).unwrap();
        let m = exact_moments_direct(&f).unwrap();
        assert_eq!(m.abs2, m.f2);
        assert!(gen_block_kernel(1, 0, 3).is_err());
    }

    #[test]
    fn iid_shortcut_matches_direct_expansion() {
        for (m, n) in [(1, 2), (1, 1), (2, 0)] {
            for k in [1, 2, 3] {
                let f = gen_block_kernel(m, n, k).unwrap();
                let a = exact_moments(&f).unwrap();
                let b = exact_moments_direct(&f).unwrap();
                assert_eq!(a.abs2, b.abs2);
                assert_eq!(a.f2, b.f2);
                assert_eq!(a.abs4, b.abs4, "({m},{n}) k={k}");
                assert_eq!(a.f4, b.f4);
                assert!((a.t3 - b.t3).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn real_valued_t3_is_four_third_moments() {
        let f = gen_block_kernel(1, 1, 1).unwrap();
        let m = exact_moments_direct(&f).unwrap();
        let third = scaled_odd(&f, 3, 0).unwrap();
        assert!((m.t3 - 4.0 * third).norm() < 1e-12);
    }

    #[test]
    fn gaps_are_nonnegative() {
        for (m, n) in [(1, 2), (1, 1), (2, 2), (3, 1)] {
            for k in [1, 2, 5] {
                let f = gen_block_kernel(m, n, k).unwrap();
                assert!(nonnegativity_gaps(&f).unwrap().all_nonnegative());
            }
        }
    }

    #[test]
    fn estimate_is_deterministic_and_close() {
        let f = gen_block_kernel(1, 2, 1).unwrap();
        let a = estimate(&f, 20_000, 3, Execution::Sequential).unwrap();
        let b = estimate(&f, 20_000, 3, Execution::Workers(3)).unwrap();
        assert_eq!(a, b);
        let e = a.get(Quantity::Abs2);
        assert!((e.re - 2.0).abs() <= 5.0 * e.stderr);
        assert!(estimate(&f, 1, 3, Execution::Sequential).is_err());
    }

    #[test]
    fn first_chaos_estimate() {
        let f = ChaosVariable::single(ComplexKernel::rank_one(&[cint(1)], 1, 0));
        let r = estimate(&f, 200_000, 9, Execution::Parallel).unwrap();
        let e = r.get(Quantity::Abs2);
        assert!((e.re - 1.0).abs() <= 5.0 * e.stderr);
    }

    #[test]
    fn spec_validation() {
        let s = CriterionSpec::new(Case::ChiSquareOffdiag, 2.0);
        let err = s.validate(&[(1, 2)]).unwrap_err();
        assert!(err.to_string().contains("does not exist"));
        assert!(s.validate(&[(3, 1)]).is_ok());
        assert!(CriterionSpec::new(Case::GaussianOffdiag, 2.0).validate(&[(1, 1)]).is_err());
        assert!(CriterionSpec::new(Case::GaussianDiag, 2.0).validate(&[(1, 1)]).is_ok());
        assert!(CriterionSpec::new(Case::GaussianDiag, -1.0).validate(&[(1, 1)]).is_err());
        assert!(CriterionSpec::new(Case::Multichaos, 1.0).validate(&[(1, 2), (3, 0)]).is_ok());
        assert!(CriterionSpec::new(Case::Multichaos, 1.0).validate(&[(1, 2), (2, 0)]).is_err());
        assert!(check_distinct_degrees(&[2, 2]).is_err());
        assert!(check_distinct_degrees(&[2, 4]).is_ok());
        assert_eq!(doubled_pairs(&[2, 4, 3]), vec![(0, 1)]);
    }

    #[test]
    fn gaussian_offdiag_exact_trajectory_verdict() {
        let spec = CriterionSpec::new(Case::GaussianOffdiag, 2.0);
        let reports: Vec<(u64, MomentReport)> = [1u64, 4, 16]
            .iter()
            .map(|&k| (k, exact_report(&gen_block_kernel(1, 2, k).unwrap()).unwrap()))
            .collect();
        let v = verdict(&reports, &spec).unwrap();
        assert_eq!(v.rows.len(), 15);
        let abs4 = v.sequences.iter().find(|s| s.quantity == "E|F|^4").unwrap();
        // E|F_k|⁴ = 8 + 168/k: monotone, but still 10.5 away at k = 16
        assert_eq!(abs4.gaps, vec![168.0, 42.0, 10.5]);
        assert!(!abs4.pass);
        let mut longer = reports;
        longer.push((4096, exact_report(&gen_block_kernel(1, 2, 4096).unwrap()).unwrap()));
        let v = verdict(&longer, &spec).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn degenerate_routing_and_nualart_peccati_case() {
        let f = gen_block_kernel(1, 1, 1).unwrap();
        let r = exact_report(&f).unwrap();
        let sigma2 = r.get(Quantity::Abs2).re;
        let v = verdict(&[(1, r)], &CriterionSpec::new(Case::GaussianDiag, sigma2)).unwrap();
        assert_eq!(v.case, Case::GaussianDegenerate);
        assert_eq!(v.a, 1.0);
        let f4 = v.sequences.iter().find(|s| s.quantity == "E[F^4]").unwrap();
        assert_eq!(f4.role, Role::Criterion);
        assert_eq!(f4.target, fmt_value(Complex64::new(3.0 * sigma2 * sigma2, 0.0), true));
    }

    #[test]
    fn chi_square_example_matches_configured_law() {
        // F = (|ζ_1|² − 2) + i(|ζ_2|² − 2): independent centered χ²_2 parts
        let mut phi = ComplexKernel::zero(1, 1, 2);
        phi.set(vec![0], vec![0], cint(2)).unwrap();
        phi.set(vec![1], vec![1], cq(rat(0), rat(2))).unwrap();
        let f = ChaosVariable::single(phi);
        let r = exact_report(&f).unwrap();
        assert_eq!(r.get(Quantity::Abs2).re, 8.0);
        let spec = CriterionSpec::new(Case::ChiSquareDiag, 8.0).with_ab(0.0, 0.0);
        let v = verdict(&[(1, r)], &spec).unwrap();
        assert!(v.pass, "{v:?}");
        assert_eq!(v.configured_law, Some(ChiSquareLaw { nu1: 2.0, nu2: 2.0 }));
        assert_eq!(v.stated_limits[0].value, fmt_value(Complex64::new(64.0, -64.0), true));
    }

    #[test]
    fn chi_square_moments_agree_with_wick_oracle() {
        use crate::wick::{expect, GaussPoly, GaussianFamily};
        for nu in 1..=3usize {
            let fam = GaussianFamily::standard(nu);
            let mut g = GaussPoly::constant(nu, cint(-(nu as i64)));
            for i in 0..nu {
                let x = GaussPoly::var(nu, i).unwrap();
                g = &g + &(&x * &x);
            }
            for r in 2..=4 {
                let exact = expect(&fam, &g.pow(r)).unwrap();
                assert_eq!(to_f64(&exact.re), ChiSquareLaw::centered_moment(nu as f64, r));
            }
        }
    }

    #[test]
    fn ks_examples() {
        let xs: Vec<f64> = (0..100_000).map(|i| crate::chaos::sample_at(1, 4, i).xi()[0]).collect();
        let r = ks_distance(&xs, &TargetCdf::Normal { variance: 1.0 }).unwrap();
        assert!(r.statistic < 1.95 / (xs.len() as f64).sqrt());
        let flat = vec![0.3; 200];
        let r = ks_distance(&flat, &TargetCdf::Normal { variance: 1.0 }).unwrap();
        assert!(r.statistic >= 0.5 && r.p_value < 1e-6);
        assert!(ks_distance(&flat, &TargetCdf::Normal { variance: 0.0 }).is_err());
        assert!(ks_distance(&flat[..50], &TargetCdf::Normal { variance: 1.0 }).is_err());
        let chi = TargetCdf::CenteredChiSquare { dof: 2.0 };
        // χ²_2 is exponential with mean 2
        assert!((chi.cdf(0.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn inverse_k_fit() {
        let pts = vec![(1u64, rat(20)), (2, rat(14)), (4, rat(11))];
        assert_eq!(fits_inverse_k(&pts, &rat(8)), (rat(12), true));
        let bad = vec![(1u64, rat(20)), (2, rat(15))];
        assert!(!fits_inverse_k(&bad, &rat(8)).1);
    }

    #[test]
    fn real_imag_covariance_offdiag_is_zero() {
        let f = gen_block_kernel(2, 1, 2).unwrap();
        assert_eq!(real_imag_covariance(&f).unwrap(), rat(0));
    }
}
