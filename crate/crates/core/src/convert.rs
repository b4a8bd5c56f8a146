//! Basis changes between real Hermite products `H_k(x)H_{n-k}(y)` and
//! complex Hermite polynomials `J_{m,n-m}(z)`, the rotation identity for
//! `H_n`, the matrix `M(θ_0..θ_n)` and the coefficient families built on it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{ChaosError, Result};
use crate::exact::{
    binomial_f64, binomial_q, cint, cq, creal, i_pow, pow_c, pow_q, rat, ratio, to_f64,
    ComplexRational, Rational,
};
use crate::hermite::ExactAngle;

/// Residual bound for `‖M·M⁻¹ − I‖_∞`.
pub const RESIDUAL_BOUND: f64 = 1e-10;

/// Strictly decreasing angles `θ_0 > … > θ_n` in `(0, π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaGrid {
    angles: Vec<f64>,
}

impl ThetaGrid {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(ChaosError::InvalidGrid("a grid needs at least one angle".into()));
        }
        for (k, &t) in angles.iter().enumerate() {
            if !(t > 0.0 && t < std::f64::consts::PI) {
                return Err(ChaosError::InvalidGrid(format!("θ_{k} = {t} is outside (0, π)")));
            }
        }
        if let Some(k) = angles.windows(2).position(|w| w[0] <= w[1]) {
            return Err(ChaosError::InvalidGrid(format!(
                "θ_{k} = {} is not greater than θ_{} = {}",
                angles[k],
                k + 1,
                angles[k + 1]
            )));
        }
        Ok(Self { angles })
    }

    /// `θ_k = π(n+1−k)/(n+2)` for `k = 0..=n`.
    pub fn default_for(n: usize) -> Self {
        let pi = std::f64::consts::PI;
        let angles = (0..=n)
            .map(|k| pi * (n + 1 - k) as f64 / (n + 2) as f64)
            .collect();
        Self { angles }
    }

    /// Degree `n`, one less than the number of angles.
    pub fn degree(&self) -> usize {
        self.angles.len() - 1
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// A grid whose angles all have rational cosine and sine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactGrid {
    angles: Vec<ExactAngle>,
}

impl ExactGrid {
    pub fn new(angles: Vec<ExactAngle>) -> Result<Self> {
        if angles.is_empty() {
            return Err(ChaosError::InvalidGrid("a grid needs at least one angle".into()));
        }
        for (k, a) in angles.iter().enumerate() {
            if !a.sin().is_positive() {
                return Err(ChaosError::InvalidGrid(format!("θ_{k} is outside (0, π)")));
            }
        }
        // on (0, π) the angle decreases exactly when the cosine increases
        if let Some(k) = angles.windows(2).position(|w| w[0].cos() >= w[1].cos()) {
            return Err(ChaosError::InvalidGrid(format!(
                "θ_{k} is not greater than θ_{}",
                k + 1
            )));
        }
        Ok(Self { angles })
    }

    /// `n + 1` well-spread rational angles built from Pythagorean triples.
    pub fn pythagorean(n: usize) -> Result<Self> {
        const TRIPLES: [(i64, i64, i64); 10] = [
            (3, 4, 5),
            (5, 12, 13),
            (8, 15, 17),
            (7, 24, 25),
            (20, 21, 29),
            (12, 35, 37),
            (9, 40, 41),
            (28, 45, 53),
            (11, 60, 61),
            (33, 56, 65),
        ];
        let mut pool = vec![ExactAngle::new(rat(0), rat(1))?];
        for (a, b, c) in TRIPLES {
            for (p, q) in [(a, b), (b, a)] {
                pool.push(ExactAngle::from_triple(p, q, c)?);
                pool.push(ExactAngle::from_triple(-p, q, c)?);
            }
        }
        pool.sort_by(|x, y| x.cos().cmp(y.cos()));
        if n + 1 > pool.len() {
            return Err(ChaosError::InvalidGrid(format!(
                "only {} rational angles available, {} requested",
                pool.len(),
                n + 1
            )));
        }
        let picks = (0..=n).map(|i| {
            if n == 0 {
                pool.len() / 2
            } else {
                (i * (pool.len() - 1) + n / 2) / n
            }
        });
        Self::new(picks.map(|i| pool[i].clone()).collect())
    }

    pub fn degree(&self) -> usize {
        self.angles.len() - 1
    }

    pub fn angles(&self) -> &[ExactAngle] {
        &self.angles
    }

    pub fn to_float(&self) -> ThetaGrid {
        ThetaGrid {
            angles: self.angles.iter().map(ExactAngle::radians).collect(),
        }
    }
}

/// Which way a [`ConversionTable`] maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Row `m` expands `J_{m,n-m}(z)`; column `k` is `H_k(x)H_{n-k}(y)`.
    ComplexToReal,
    /// Row `k` expands `H_k(x)H_{n-k}(y)`; column `m` is `J_{m,n-m}(z)`.
    RealToComplex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConversionTable {
    degree: u32,
    direction: Direction,
    coeffs: Vec<Vec<ComplexRational>>,
}

impl ConversionTable {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn get(&self, row: usize, col: usize) -> &ComplexRational {
        &self.coeffs[row][col]
    }

    pub fn rows(&self) -> &[Vec<ComplexRational>] {
        &self.coeffs
    }

    /// Exact matrix product `self · other`.
    pub fn compose(&self, other: &ConversionTable) -> Vec<Vec<ComplexRational>> {
        let d = self.coeffs.len();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d).fold(cint(0), |acc, k| {
                            acc + self.coeffs[i][k].clone() * other.coeffs[k][j].clone()
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Overwrites one coefficient; used to build deliberately broken tables.
    pub fn set(&mut self, row: usize, col: usize, value: ComplexRational) {
        self.coeffs[row][col] = value;
    }
}

/// Both directions of the real/complex Hermite conversion at degree `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2j {
    pub complex_to_real: ConversionTable,
    pub real_to_complex: ConversionTable,
}

fn signed_binomial_sum(a: u32, b: u32, j: u32, sign_of_s: impl Fn(u32) -> bool) -> Rational {
    let mut acc = rat(0);
    for r in 0..=j.min(a) {
        let s = j - r;
        if s > b {
            continue;
        }
        let term = binomial_q(a, r) * binomial_q(b, s);
        if sign_of_s(s) {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

pub fn h2j_table(n: u32) -> H2j {
    let size = n as usize + 1;
    let mut c2r = vec![vec![cint(0); size]; size];
    let mut r2c = vec![vec![cint(0); size]; size];
    for m in 0..=n {
        for k in 0..=n {
            // J_{m,n-m}: i^{n-k} Σ_{r+s=k} C(m,r)C(n-m,s)(-1)^{n-m-s}
            let sum = signed_binomial_sum(m, n - m, k, |s| (n - m - s) % 2 == 1);
            c2r[m as usize][k as usize] = i_pow(n - k) * creal(sum);
        }
    }
    let scale = ratio(1, 1) / pow_q(&rat(2), n);
    for k in 0..=n {
        for m in 0..=n {
            // H_k H_{n-k}: i^{n-k}/2^n Σ_{r+s=m} C(k,r)C(n-k,s)(-1)^s
            let sum = signed_binomial_sum(k, n - k, m, |s| s % 2 == 1);
            r2c[k as usize][m as usize] = i_pow(n - k) * creal(sum * &scale);
        }
    }
    H2j {
        complex_to_real: ConversionTable {
            degree: n,
            direction: Direction::ComplexToReal,
            coeffs: c2r,
        },
        real_to_complex: ConversionTable {
            degree: n,
            direction: Direction::RealToComplex,
            coeffs: r2c,
        },
    }
}

/// Coefficients of `H_l(x)H_{n-l}(y)`, `l = 0..=n`, in `H_n(x cosθ + y sinθ)`.
pub fn rotation_expand(n: u32, angle: &ExactAngle) -> Vec<Rational> {
    (0..=n)
        .map(|l| binomial_q(n, l) * pow_q(angle.cos(), l) * pow_q(angle.sin(), n - l))
        .collect()
}

pub fn rotation_expand_f64(n: u32, theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    (0..=n)
        .map(|l| binomial_f64(n, l) * c.powi(l as i32) * s.powi((n - l) as i32))
        .collect()
}

fn m_entries(n: usize, sin: f64, cos: f64) -> impl Iterator<Item = f64> {
    (0..=n).map(move |l| binomial_f64(n as u32, l as u32) * sin.powi((n - l) as i32) * cos.powi(l as i32))
}

/// `M[k][l] = C(n,l) sin^{n-l}θ_k cos^l θ_k`; row index is the grid index.
pub fn matrix_m(grid: &ThetaGrid) -> DMatrix<f64> {
    let n = grid.degree();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for (k, &t) in grid.angles().iter().enumerate() {
        let (s, c) = t.sin_cos();
        for (l, v) in m_entries(n, s, c).enumerate() {
            m[(k, l)] = v;
        }
    }
    m
}

/// Determinant of `M` from an LU factorization with partial pivoting.
pub fn det_lu(grid: &ThetaGrid) -> f64 {
    matrix_m(grid).lu().determinant()
}

/// `∏_k C(n,k) · ∏_{i<j} sin(θ_i − θ_j)`.
pub fn det_closed_form(grid: &ThetaGrid) -> f64 {
    let n = grid.degree() as u32;
    let a = grid.angles();
    let mut det: f64 = (0..=n).map(|k| binomial_f64(n, k)).product();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            det *= (a[i] - a[j]).sin();
        }
    }
    det
}

/// `M`, its inverse and the residual certificate `‖M·M⁻¹ − I‖_∞`.
#[derive(Clone, Debug)]
pub struct MatrixM {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    determinant: f64,
    residual: f64,
}

impl MatrixM {
    /// Fails with [`ChaosError::IllConditioned`] when the residual exceeds
    /// [`RESIDUAL_BOUND`].
    pub fn build(grid: &ThetaGrid) -> Result<Self> {
        let matrix = matrix_m(grid);
        let lu = matrix.clone().lu();
        let determinant = lu.determinant();
        let inverse = lu.try_inverse().ok_or(ChaosError::IllConditioned {
            residual: f64::INFINITY,
            bound: RESIDUAL_BOUND,
        })?;
        let size = matrix.nrows();
        let prod = &matrix * &inverse;
        let residual = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| (prod[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        if !(residual <= RESIDUAL_BOUND) {
            return Err(ChaosError::IllConditioned {
                residual,
                bound: RESIDUAL_BOUND,
            });
        }
        Ok(Self {
            matrix,
            inverse,
            determinant,
            residual,
        })
    }

    pub fn degree(&self) -> usize {
        self.matrix.nrows() - 1
    }

    /// `M[k][l]`: grid index `k`, power index `l`.
    pub fn entry(&self, k: usize, l: usize) -> f64 {
        self.matrix[(k, l)]
    }

    /// `M⁻¹_{l,k}`: power index `l`, grid index `k`.
    pub fn inverse_lk(&self, l: usize, k: usize) -> f64 {
        self.inverse[(l, k)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn determinant(&self) -> f64 {
        self.determinant
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Exact `M` and `M⁻¹` for a grid of rational angles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrixM {
    matrix: Vec<Vec<Rational>>,
    inverse: Vec<Vec<Rational>>,
    determinant: Rational,
}

impl ExactMatrixM {
    pub fn build(grid: &ExactGrid) -> Result<Self> {
        let n = grid.degree() as u32;
        let matrix: Vec<Vec<Rational>> = grid
            .angles()
            .iter()
            .map(|a| {
                (0..=n)
                    .map(|l| binomial_q(n, l) * pow_q(a.sin(), n - l) * pow_q(a.cos(), l))
                    .collect()
            })
            .collect();
        let (inverse, determinant) = gauss_jordan(&matrix)?;
        Ok(Self {
            matrix,
            inverse,
            determinant,
        })
    }

    pub fn entry(&self, k: usize, l: usize) -> &Rational {
        &self.matrix[k][l]
    }

    /// `M⁻¹_{l,k}`.
    pub fn inverse_lk(&self, l: usize, k: usize) -> &Rational {
        &self.inverse[l][k]
    }

    pub fn determinant(&self) -> &Rational {
        &self.determinant
    }
}

/// The closed-form determinant evaluated in exact arithmetic, using
/// `sin(a − b) = sin a cos b − cos a sin b`.
pub fn det_closed_form_exact(grid: &ExactGrid) -> Rational {
    let n = grid.degree() as u32;
    let a = grid.angles();
    let mut det = (0..=n).fold(rat(1), |acc, k| acc * binomial_q(n, k));
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            det *= a[i].sin() * a[j].cos() - a[i].cos() * a[j].sin();
        }
    }
    det
}

fn gauss_jordan(matrix: &[Vec<Rational>]) -> Result<(Vec<Vec<Rational>>, Rational)> {
    let size = matrix.len();
    let mut a: Vec<Vec<Rational>> = matrix.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..size)
        .map(|i| (0..size).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
        .collect();
    let mut det = rat(1);
    for col in 0..size {
        let pivot = (col..size)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| ChaosError::InvalidGrid("M is singular".into()))?;
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        let p_inv = Rational::one() / p;
        for j in 0..size {
            a[col][j] *= &p_inv;
            inv[col][j] *= &p_inv;
        }
        for r in 0..size {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..size {
                let da = &f * &a[col][j];
                let di = &f * &inv[col][j];
                a[r][j] -= da;
                inv[r][j] -= di;
            }
        }
    }
    Ok((inv, det))
}

/// `d_0..d_n` with `H_n(x cosθ + y sinθ) = Σ_k d_k J_{k,n-k}(x + iy)`.
pub fn dk_coeffs(n: u32, angle: &ExactAngle) -> Vec<ComplexRational> {
    let isin = cq(rat(0), angle.sin().clone());
    let scale = creal(Rational::one() / pow_q(&rat(2), n));
    (0..=n)
        .map(|k| {
            let mut acc = cint(0);
            for r in 0..=k {
                let s = k - r;
                let sign = if s % 2 == 1 { -1 } else { 1 };
                for l in 0..=n {
                    let comb = binomial_q(n, l) * binomial_q(l, r) * binomial_q(n - l, s);
                    if comb.is_zero() {
                        continue;
                    }
                    let trig = creal(pow_q(angle.cos(), l)) * pow_c(&isin, n - l);
                    acc += creal(comb * rat(sign)) * trig;
                }
            }
            acc * scale.clone()
        })
        .collect()
}

pub fn dk_coeffs_f64(n: u32, theta: f64) -> Vec<Complex64> {
    let (s, c) = theta.sin_cos();
    let isin = Complex64::new(0.0, s);
    (0..=n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..=k {
                let s_idx = k - r;
                let sign = if s_idx % 2 == 1 { -1.0 } else { 1.0 };
                for l in 0..=n {
                    let comb = binomial_f64(n, l) * binomial_f64(l, r) * binomial_f64(n - l, s_idx);
                    acc += sign * comb * c.powi(l as i32) * isin.powi((n - l) as i32);
                }
            }
            acc / 2f64.powi(n as i32)
        })
        .collect()
}

/// `c_j`: the coefficient of `H_j(x)H_{n-j}(y)` in `J_{k,n-k}(x + iy)`.
///
/// The power of `i` follows the summation index `j`, not `k`; with `i^{n-k}`
/// the expansion of `J_{1,0}` would read `x + y` instead of `x + iy`.
pub fn ci_raw(n: u32, k: u32) -> Result<Vec<ComplexRational>> {
    if k > n {
        return Err(ChaosError::IndexOutOfRange {
            index: k as usize,
            dim: n as usize + 1,
        });
    }
    Ok((0..=n)
        .map(|j| {
            let sum = signed_binomial_sum(k, n - k, j, |s| (n - k - s) % 2 == 1);
            i_pow(n - j) * creal(sum)
        })
        .collect())
}

/// `c̃_i = Σ_j M⁻¹_{j,i} c_j`, so that
/// `J_{k,n-k}(Z(𝔥)) = Σ_i c̃_i H_n(X(f_i) + Y(g_i))` with
/// `f_i + i g_i = e^{iθ_i} conj(𝔥)/√2`.
pub fn ci_coeffs(n: u32, k: u32, m: &MatrixM) -> Result<Vec<Complex64>> {
    if m.degree() != n as usize {
        return Err(ChaosError::ShapeMismatch(format!(
            "matrix of degree {} for coefficients of degree {n}",
            m.degree()
        )));
    }
    let c: Vec<Complex64> = ci_raw(n, k)?.iter().map(crate::exact::to_c64).collect();
    Ok((0..=n as usize)
        .map(|i| (0..=n as usize).map(|j| c[j] * m.inverse_lk(j, i)).sum())
        .collect())
}

pub fn ci_coeffs_exact(n: u32, k: u32, grid: &ExactGrid) -> Result<Vec<ComplexRational>> {
    if grid.degree() != n as usize {
        return Err(ChaosError::ShapeMismatch(format!(
            "grid of degree {} for coefficients of degree {n}",
            grid.degree()
        )));
    }
    let m = ExactMatrixM::build(grid)?;
    let c = ci_raw(n, k)?;
    Ok((0..=n as usize)
        .map(|i| {
            (0..=n as usize).fold(cint(0), |acc, j| {
                acc + c[j].clone() * creal(m.inverse_lk(j, i).clone())
            })
        })
        .collect())
}

/// Relative error helper used by determinant checks.
pub fn relative_error(computed: f64, reference: f64) -> f64 {
    let denom = reference.abs().max(f64::MIN_POSITIVE);
    (computed - reference).abs() / denom
}

/// `f64` view of an exact rational, for reports.
pub fn approx(q: &Rational) -> f64 {
    to_f64(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{complex_hermite, HermiteIndex, XyPoly};
    use std::f64::consts::PI;

    fn identity(size: usize) -> Vec<Vec<ComplexRational>> {
        (0..size)
            .map(|i| (0..size).map(|j| if i == j { cint(1) } else { cint(0) }).collect())
            .collect()
    }

    #[test]
    fn h2j_small_degrees() {
        let t = h2j_table(0);
        assert_eq!(t.complex_to_real.rows(), identity(1).as_slice());
        assert_eq!(t.real_to_complex.rows(), identity(1).as_slice());
        let t = h2j_table(1);
        // J_{1,0} = H_1(x) + i H_1(y)
        assert_eq!(t.complex_to_real.get(1, 1), &cint(1));
        assert_eq!(t.complex_to_real.get(1, 0), &cq(rat(0), rat(1)));
        // H_1(x) = (J_{1,0} + J_{0,1}) / 2
        assert_eq!(t.real_to_complex.get(1, 0), &creal(ratio(1, 2)));
        assert_eq!(t.real_to_complex.get(1, 1), &creal(ratio(1, 2)));
    }

    #[test]
    fn h2j_round_trip_and_polynomial_agreement() {
        for n in 0..=6u32 {
            let t = h2j_table(n);
            let size = n as usize + 1;
            assert_eq!(t.complex_to_real.compose(&t.real_to_complex), identity(size));
            assert_eq!(t.real_to_complex.compose(&t.complex_to_real), identity(size));
            for m in 0..=n {
                let lhs = complex_hermite(&HermiteIndex::standard(m, n - m)).to_xy();
                let mut rhs = XyPoly::zero();
                for k in 0..=n {
                    let c = t.complex_to_real.get(m as usize, k as usize);
                    rhs = &rhs + &XyPoly::hermite_product(k, n - k).scale(c);
                }
                assert_eq!(lhs, rhs, "degree {n}, J_{m},{}", n - m);
            }
        }
    }

    #[test]
    fn rotation_examples() {
        let v = rotation_expand_f64(1, 0.3);
        assert!((v[0] - 0.3f64.sin()).abs() < 1e-15 && (v[1] - 0.3f64.cos()).abs() < 1e-15);
        let v = rotation_expand_f64(2, PI / 4.0);
        for (a, b) in v.iter().zip([0.5, 1.0, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(rotation_expand(2, &ExactAngle::zero()), vec![rat(0), rat(0), rat(1)]);
    }

    #[test]
    fn rotation_matches_polynomial_expansion() {
        let angle = ExactAngle::from_triple(3, 4, 5).unwrap();
        for n in 0..=6u32 {
            let lhs = XyPoly::hermite_of_linear(n, angle.cos(), angle.sin());
            let mut rhs = XyPoly::zero();
            for (l, c) in rotation_expand(n, &angle).into_iter().enumerate() {
                rhs = &rhs + &XyPoly::hermite_product(l as u32, n - l as u32).scale(&creal(c));
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(ThetaGrid::new(vec![]).is_err());
        assert!(ThetaGrid::new(vec![1.0, 1.0]).is_err());
        assert!(ThetaGrid::new(vec![1.0, 2.0]).is_err());
        assert!(ThetaGrid::new(vec![PI, 1.0]).is_err());
        assert!(ThetaGrid::new(vec![2.0, 1.0]).is_ok());
        let g = ThetaGrid::default_for(4);
        assert_eq!(g.degree(), 4);
        assert!(ThetaGrid::new(g.angles().to_vec()).is_ok());
        for n in 0..=9 {
            assert_eq!(ExactGrid::pythagorean(n).unwrap().degree(), n);
        }
    }

    #[test]
    fn matrix_examples() {
        let m = MatrixM::build(&ThetaGrid::new(vec![PI / 2.0, PI / 4.0]).unwrap()).unwrap();
        let h = 0.5f64.sqrt();
        assert!((m.entry(0, 0) - 1.0).abs() < 1e-15 && m.entry(0, 1).abs() < 1e-15);
        assert!((m.entry(1, 0) - h).abs() < 1e-15 && (m.entry(1, 1) - h).abs() < 1e-15);
        assert!((m.determinant() - h).abs() < 1e-15);
        let m0 = MatrixM::build(&ThetaGrid::new(vec![1.2]).unwrap()).unwrap();
        assert_eq!(m0.entry(0, 0), 1.0);
        assert_eq!(m0.determinant(), 1.0);
        let g = ThetaGrid::new(vec![3.0 * PI / 4.0, PI / 2.0, PI / 4.0]).unwrap();
        assert!(relative_error(det_lu(&g), det_closed_form(&g)) < 1e-10);
    }

    #[test]
    fn close_angles_are_ill_conditioned() {
        let g = ThetaGrid::new(vec![2.0, 1.5, 1.5 - 1e-9, 1.0]).unwrap();
        assert!(matches!(MatrixM::build(&g), Err(ChaosError::IllConditioned { .. })));
    }

    #[test]
    fn exact_determinant_matches_closed_form() {
        for n in 0..=6 {
            let g = ExactGrid::pythagorean(n).unwrap();
            let m = ExactMatrixM::build(&g).unwrap();
            assert_eq!(m.determinant(), &det_closed_form_exact(&g));
            assert!(relative_error(det_lu(&g.to_float()), approx(m.determinant())) < 1e-10);
        }
    }

    #[test]
    fn dk_examples() {
        assert_eq!(dk_coeffs(1, &ExactAngle::zero()), vec![creal(ratio(1, 2)); 2]);
        let any = ExactAngle::from_triple(5, 12, 13).unwrap();
        assert_eq!(dk_coeffs(0, &any), vec![cint(1)]);
        assert_eq!(
            dk_coeffs(2, &ExactAngle::zero()),
            vec![creal(ratio(1, 4)), creal(ratio(1, 2)), creal(ratio(1, 4))]
        );
    }

    #[test]
    fn dk_from_rotation_and_table() {
        for angle in [
            ExactAngle::from_triple(3, 4, 5).unwrap(),
            ExactAngle::from_triple(-5, 12, 13).unwrap(),
            ExactAngle::from_triple(8, -15, 17).unwrap(),
        ] {
            for n in 0..=6u32 {
                let t = h2j_table(n);
                let rot = rotation_expand(n, &angle);
                let composed: Vec<ComplexRational> = (0..=n as usize)
                    .map(|k| {
                        (0..=n as usize).fold(cint(0), |acc, l| {
                            acc + creal(rot[l].clone()) * t.real_to_complex.get(l, k).clone()
                        })
                    })
                    .collect();
                assert_eq!(composed, dk_coeffs(n, &angle));
                let float = dk_coeffs_f64(n, angle.radians());
                for (a, b) in float.iter().zip(&composed) {
                    assert!((a - crate::exact::to_c64(b)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ci_examples() {
        let g = ExactGrid::new(vec![ExactAngle::from_triple(3, 4, 5).unwrap()]).unwrap();
        assert_eq!(ci_coeffs_exact(0, 0, &g).unwrap(), vec![cint(1)]);
        let m = MatrixM::build(&ThetaGrid::default_for(0)).unwrap();
        assert!((ci_coeffs(0, 0, &m).unwrap()[0] - 1.0).norm() < 1e-15);
        assert!(ci_raw(2, 3).is_err());
    }

    #[test]
    fn ci_reconstructs_complex_hermite_exactly() {
        for n in 0..=6u32 {
            let grid = ExactGrid::pythagorean(n as usize).unwrap();
            for k in 0..=n {
                let c = ci_coeffs_exact(n, k, &grid).unwrap();
                let mut rhs = XyPoly::zero();
                for (i, a) in grid.angles().iter().enumerate() {
                    rhs = &rhs + &XyPoly::hermite_of_linear(n, a.cos(), a.sin()).scale(&c[i]);
                }
                let lhs = complex_hermite(&HermiteIndex::standard(k, n - k)).to_xy();
                assert_eq!(lhs, rhs, "n={n}, k={k}");
            }
        }
    }
}
