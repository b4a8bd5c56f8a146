//! Named identity suites relating real and complex Hermite chaos, each run
//! exactly on rational angles and pathwise on generic angles.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chaos::sample_at;
use crate::convert::{
    ci_coeffs, ci_coeffs_exact, det_closed_form, det_closed_form_exact, det_lu, dk_coeffs,
    dk_coeffs_f64, h2j_table, rotation_expand, ExactGrid, ExactMatrixM, MatrixM, ThetaGrid,
};
use crate::error::{ChaosError, Result};
use crate::exact::{binomial_f64, cint, creal, rat, to_c64, ComplexRational};
use crate::hermite::{
    complex_hermite, complex_hermite_table, expand_monomial, hermite_values, ou_apply,
    ou_apply_exact, ou_eigenvalue, BiPoly, ExactAngle, HermiteIndex, XyPoly,
};

/// Largest degree the symbolic suites accept.
pub const MAX_DEGREE: u32 = 8;

/// Sample points per pathwise check.
pub const PATHWISE_POINTS: u64 = 100;

/// Pathwise tolerance, relative to `max(1, |value|)`.
pub const PATHWISE_TOL: f64 = 1e-9;

/// Absolute per-coefficient tolerance of the floating eigenrelation.
pub const EIGEN_TOL: f64 = 1e-12;

/// Supplies `J_{m,n}` (rho = 2) to the suites; a tampered source perturbs one
/// polynomial so the failure path can be exercised.
#[derive(Clone, Debug, Default)]
pub struct HermiteSource {
    tamper: Option<(u32, u32)>,
}

impl HermiteSource {
    pub fn standard() -> Self {
        Self::default()
    }

    /// Adds one to the leading coefficient of `J_{m,n}`.
    pub fn tampered(m: u32, n: u32) -> Self {
        Self {
            tamper: Some((m, n)),
        }
    }

    pub fn j(&self, m: u32, n: u32) -> BiPoly {
        let mut p = complex_hermite(&HermiteIndex::standard(m, n));
        if self.tamper == Some((m, n)) {
            p.add_term(m, n, cint(1));
        }
        p
    }

    /// `J_{k,n-k}(z)` for `k = 0..=n`.
    pub fn j_values(&self, z: Complex64, n: u32) -> Vec<Complex64> {
        let n = n as usize;
        let table = complex_hermite_table(z, n, n);
        (0..=n)
            .map(|k| {
                let mut v = table[k][n - k];
                if self.tamper == Some((k as u32, (n - k) as u32)) {
                    v += z.powu(k as u32) * z.conj().powu((n - k) as u32);
                }
                v
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub exact_checks: usize,
    pub pathwise_checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            exact_checks: 0,
            pathwise_checks: 0,
            failures: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn exact(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.exact_checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn pathwise(&mut self, err: f64, scale: f64, what: impl FnOnce() -> String) {
        self.pathwise_checks += 1;
        if !(err <= PATHWISE_TOL * scale.max(1.0)) {
            self.failures.push(format!("{} (error {err:.3e})", what()));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub max_degree: u32,
    pub suites: Vec<SuiteReport>,
}

impl IdentityReport {
    pub fn pass(&self) -> bool {
        self.suites.iter().all(SuiteReport::pass)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.pass()).map(|s| s.name).collect()
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("identity suites up to degree {}\n", self.max_degree);
        for s in &self.suites {
            out.push_str(&format!(
                "{:<13} {}  exact={} pathwise={}\n",
                s.name,
                if s.pass() { "PASS" } else { "FAIL" },
                s.exact_checks,
                s.pathwise_checks
            ));
            for f in s.failures.iter().take(10) {
                out.push_str(&format!("    {f}\n"));
            }
            if s.failures.len() > 10 {
                out.push_str(&format!("    ... {} more\n", s.failures.len() - 10));
            }
        }
        out.push_str(if self.pass() { "all identities hold\n" } else { "identity failures\n" });
        out
    }
}

/// Rational angles on the whole circle used by the exact suites.
pub fn exact_angles() -> Vec<ExactAngle> {
    let mut out = vec![ExactAngle::zero()];
    for (a, b, c) in [(3, 4, 5), (4, 3, 5), (5, 12, 13), (-8, 15, 17), (-20, -21, 29), (7, -24, 25)] {
        out.push(ExactAngle::from_triple(a, b, c).expect("Pythagorean triple"));
    }
    out.push(ExactAngle::new(rat(0), rat(1)).expect("right angle"));
    out
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_1d00 ^ tag)
}

/// Random real pair `(f, g)` in `R²` with `‖f‖² + ‖g‖² = 1`.
fn split_unit(r: &mut ChaCha8Rng) -> ([f64; 2], [f64; 2]) {
    let v: [f64; 4] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
    ([v[0] / norm, v[1] / norm], [v[2] / norm, v[3] / norm])
}

fn unit2(r: &mut ChaCha8Rng) -> [f64; 2] {
    let t: f64 = r.random_range(0.0..2.0 * PI);
    [t.cos(), t.sin()]
}

/// A generic admissible grid: the default grid with each angle jittered by
/// up to a quarter of the spacing.
pub fn jittered_grid(n: u32, r: &mut ChaCha8Rng) -> Result<ThetaGrid> {
    let base = ThetaGrid::default_for(n as usize);
    let step = PI / (n as f64 + 2.0);
    ThetaGrid::new(
        base.angles()
            .iter()
            .map(|t| t + r.random_range(-0.25..0.25) * step)
            .collect(),
    )
}

fn hermite_n(x: f64, n: u32) -> f64 {
    let mut buf = Vec::new();
    hermite_values(x, n as usize, &mut buf);
    buf[n as usize]
}

fn sum_scaled<'a>(parts: impl Iterator<Item = (ComplexRational, &'a XyPoly)>) -> XyPoly {
    parts.fold(XyPoly::zero(), |acc, (c, p)| &acc + &p.scale(&c))
}

fn products(n: u32) -> Vec<XyPoly> {
    (0..=n).map(|l| XyPoly::hermite_product(l, n - l)).collect()
}

fn suite_h2j(max: u32, src: &HermiteSource) -> SuiteReport {
    let mut s = SuiteReport::new("h2j");
    for n in 0..=max {
        let t = h2j_table(n);
        let prods = products(n);
        let js: Vec<BiPoly> = (0..=n).map(|m| src.j(m, n - m)).collect();
        for m in 0..=n as usize {
            let rhs = sum_scaled((0..=n as usize).map(|k| (t.complex_to_real.get(m, k).clone(), &prods[k])));
            s.exact(js[m].to_xy() == rhs, || format!("J_{{{m},{}}} ≠ its real expansion", n as usize - m));
        }
        for k in 0..=n as usize {
            let rhs = (0..=n as usize).fold(BiPoly::zero(), |acc, m| {
                &acc + &js[m].scale(t.real_to_complex.get(k, m))
            });
            s.exact(prods[k].to_zzbar() == rhs, || {
                format!("H_{k}(x)H_{}(y) ≠ its complex expansion", n as usize - k)
            });
        }
        let id = t.complex_to_real.compose(&t.real_to_complex);
        let ok = id.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, c)| *c == if i == j { cint(1) } else { cint(0) })
        });
        s.exact(ok, || format!("degree {n}: tables are not inverse to each other"));
        for i in 0..PATHWISE_POINTS {
            let p = sample_at(1, 11, i);
            let (x, y) = (p.xi()[0], p.eta()[0]);
            let js = src.j_values(Complex64::new(x, y), n);
            let (mut hx, mut hy) = (Vec::new(), Vec::new());
            hermite_values(x, n as usize, &mut hx);
            hermite_values(y, n as usize, &mut hy);
            for m in 0..=n as usize {
                let rhs: Complex64 = (0..=n as usize)
                    .map(|k| to_c64(t.complex_to_real.get(m, k)) * hx[k] * hy[n as usize - k])
                    .sum();
                s.pathwise((js[m] - rhs).norm(), js[m].norm(), || {
                    format!("J_{{{m},{}}} at sample {i}", n as usize - m)
                });
            }
        }
    }
    s
}

fn suite_man000(max: u32) -> SuiteReport {
    let mut s = SuiteReport::new("man000");
    let mut r = rng(0);
    for n in 0..=max {
        let prods = products(n);
        for a in exact_angles() {
            let lhs = XyPoly::hermite_of_linear(n, a.cos(), a.sin());
            let coeffs = rotation_expand(n, &a);
            let rhs = sum_scaled(coeffs.into_iter().map(creal).zip(&prods));
            s.exact(lhs == rhs, || format!("n={n}, θ={:.6}", a.radians()));
        }
        let (f, g) = split_unit(&mut r);
        let (nf, ng) = (f[0].hypot(f[1]), g[0].hypot(g[1]));
        for i in 0..PATHWISE_POINTS {
            let p = sample_at(2, 12, i);
            let lhs = hermite_n(p.x_plus_y(&f, &g), n);
            let (x, y) = (p.x_plus_y(&f, &[0.0; 2]) / nf, p.x_plus_y(&[0.0; 2], &g) / ng);
            let (mut hx, mut hy) = (Vec::new(), Vec::new());
            hermite_values(x, n as usize, &mut hx);
            hermite_values(y, n as usize, &mut hy);
            let rhs: f64 = (0..=n)
                .map(|l| {
                    binomial_f64(n, l)
                        * nf.powi(l as i32)
                        * ng.powi((n - l) as i32)
                        * hx[l as usize]
                        * hy[(n - l) as usize]
                })
                .sum();
            s.pathwise((lhs - rhs).abs(), lhs.abs(), || format!("n={n} at sample {i}"));
        }
    }
    s
}

fn suite_man001(max: u32) -> Result<SuiteReport> {
    let mut s = SuiteReport::new("man001");
    let mut r = rng(1);
    for n in 0..=max {
        let grid = ExactGrid::pythagorean(n as usize)?;
        let m = ExactMatrixM::build(&grid)?;
        let rotated: Vec<XyPoly> = grid
            .angles()
            .iter()
            .map(|a| XyPoly::hermite_of_linear(n, a.cos(), a.sin()))
            .collect();
        for (l, lhs) in products(n).iter().enumerate() {
            let rhs = sum_scaled((0..=n as usize).map(|k| (creal(m.inverse_lk(l, k).clone()), &rotated[k])));
            s.exact(*lhs == rhs, || format!("n={n}, l={l} on a rational grid"));
        }
        let tgrid = jittered_grid(n, &mut r)?;
        let mm = MatrixM::build(&tgrid)?;
        let (f, g) = (unit2(&mut r), unit2(&mut r));
        for i in 0..PATHWISE_POINTS {
            let p = sample_at(2, 13, i);
            let (x, y) = (p.x_plus_y(&f, &[0.0; 2]), p.x_plus_y(&[0.0; 2], &g));
            let h: Vec<f64> = tgrid
                .angles()
                .iter()
                .map(|t| hermite_n(t.cos() * x + t.sin() * y, n))
                .collect();
            for l in 0..=n {
                let lhs = hermite_n(x, l) * hermite_n(y, n - l);
                let rhs: f64 = (0..=n as usize).map(|k| mm.inverse_lk(l as usize, k) * h[k]).sum();
                s.pathwise((lhs - rhs).abs(), lhs.abs(), || format!("n={n}, l={l} at sample {i}"));
            }
        }
    }
    Ok(s)
}

fn suite_man010(max: u32, src: &HermiteSource) -> SuiteReport {
    let mut s = SuiteReport::new("man010");
    let mut r = rng(2);
    for n in 0..=max {
        let t = h2j_table(n);
        let jxy: Vec<XyPoly> = (0..=n).map(|k| src.j(k, n - k).to_xy()).collect();
        for a in exact_angles() {
            let d = dk_coeffs(n, &a);
            let lhs = XyPoly::hermite_of_linear(n, a.cos(), a.sin());
            let rhs = sum_scaled(d.iter().cloned().zip(&jxy));
            s.exact(lhs == rhs, || format!("n={n}, θ={:.6}", a.radians()));
            // d_k also equals the rotation coefficients pushed through the tables
            let rot = rotation_expand(n, &a);
            let via_tables: Vec<ComplexRational> = (0..=n as usize)
                .map(|k| {
                    (0..=n as usize).fold(cint(0), |acc, l| {
                        acc + creal(rot[l].clone()) * t.real_to_complex.get(l, k).clone()
                    })
                })
                .collect();
            s.exact(via_tables == d, || format!("n={n}, θ={:.6}: d_k ≠ table composition", a.radians()));
        }
        let theta: f64 = r.random_range(-PI..PI);
        let d = dk_coeffs_f64(n, theta);
        let (f, g) = split_unit(&mut r);
        let e = Complex64::from_polar(SQRT_2, theta);
        let h: Vec<Complex64> = (0..2).map(|k| e * Complex64::new(f[k], -g[k])).collect();
        for i in 0..PATHWISE_POINTS {
            let p = sample_at(2, 14, i);
            let lhs = hermite_n(p.x_plus_y(&f, &g), n);
            let js = src.j_values(p.z_of(&h), n);
            let rhs: Complex64 = d.iter().zip(&js).map(|(a, b)| a * b).sum();
            s.pathwise((rhs - lhs).norm(), lhs.abs(), || format!("n={n}, θ={theta:.6} at sample {i}"));
        }
    }
    s
}

fn suite_man011(max: u32, src: &HermiteSource) -> Result<SuiteReport> {
    let mut s = SuiteReport::new("man011");
    let mut r = rng(3);
    for n in 0..=max {
        let grid = ExactGrid::pythagorean(n as usize)?;
        let rotated: Vec<XyPoly> = grid
            .angles()
            .iter()
            .map(|a| XyPoly::hermite_of_linear(n, a.cos(), a.sin()))
            .collect();
        for k in 0..=n {
            let c = ci_coeffs_exact(n, k, &grid)?;
            let rhs = sum_scaled(c.into_iter().zip(&rotated));
            s.exact(src.j(k, n - k).to_xy() == rhs, || {
                format!("J_{{{k},{}}} from H_n on a rational grid", n - k)
            });
        }
        let tgrid = jittered_grid(n, &mut r)?;
        let mm = MatrixM::build(&tgrid)?;
        let v: [f64; 4] = std::array::from_fn(|_| r.random_range(-1.0..1.0));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
        let h: Vec<Complex64> = (0..2)
            .map(|k| Complex64::new(v[2 * k], v[2 * k + 1]) * SQRT_2 / norm)
            .collect();
        let fg: Vec<([f64; 2], [f64; 2])> = tgrid
            .angles()
            .iter()
            .map(|&t| {
                let e = Complex64::from_polar(FRAC_1_SQRT_2, t);
                let w: Vec<Complex64> = h.iter().map(|hk| e * hk.conj()).collect();
                ([w[0].re, w[1].re], [w[0].im, w[1].im])
            })
            .collect();
        let cs: Vec<Vec<Complex64>> = (0..=n).map(|k| ci_coeffs(n, k, &mm)).collect::<Result<_>>()?;
        for i in 0..PATHWISE_POINTS {
            let p = sample_at(2, 15, i);
            let js = src.j_values(p.z_of(&h), n);
            let hs: Vec<f64> = fg.iter().map(|(f, g)| hermite_n(p.x_plus_y(f, g), n)).collect();
            for k in 0..=n as usize {
                let rhs: Complex64 = cs[k].iter().zip(&hs).map(|(c, h)| c * h).sum();
                s.pathwise((js[k] - rhs).norm(), js[k].norm(), || {
                    format!("J_{{{k},{}}} at sample {i}", n as usize - k)
                });
            }
        }
    }
    Ok(s)
}

/// Random admissible grids for the floating determinant check.
pub const DET_GRIDS: usize = 50;

/// Relative tolerance for `det M` against the closed form.
pub const DET_TOL: f64 = 1e-10;

fn suite_det(max: u32) -> Result<SuiteReport> {
    let mut s = SuiteReport::new("det-M");
    let mut r = rng(4);
    for n in 0..=max {
        let grid = ExactGrid::pythagorean(n as usize)?;
        let m = ExactMatrixM::build(&grid)?;
        s.exact(*m.determinant() == det_closed_form_exact(&grid), || {
            format!("n={n}: exact determinant ≠ closed form")
        });
        for g in 0..DET_GRIDS {
            let grid = jittered_grid(n, &mut r)?;
            let err = crate::convert::relative_error(det_lu(&grid), det_closed_form(&grid));
            s.pathwise_checks += 1;
            if !(err <= DET_TOL) {
                s.failures.push(format!("n={n}, grid {g}: relative error {err:.3e}"));
            }
        }
        let mm = MatrixM::build(&ThetaGrid::default_for(n as usize))?;
        s.pathwise_checks += 1;
        if !(mm.residual() <= DET_TOL) {
            s.failures.push(format!("n={n}: ‖M·M⁻¹ − I‖ = {:.3e}", mm.residual()));
        }
    }
    Ok(s)
}

fn suite_eigen(max: u32, src: &HermiteSource) -> Result<SuiteReport> {
    let mut s = SuiteReport::new("eigenrelation");
    let mut r = rng(5);
    let rho = rat(2);
    let angles: Vec<ExactAngle> = exact_angles().into_iter().filter(|a| a.cos() > &rat(0)).collect();
    let thetas: Vec<f64> = (0..20).map(|_| r.random_range(-1.5..1.5)).collect();
    for total in 0..=max {
        for m in 0..=total {
            let n = total - m;
            let j = src.j(m, n);
            for a in &angles {
                let lhs = ou_apply_exact(&j, a, &rho)?;
                s.exact(lhs == j.scale(&ou_eigenvalue(m, n, a)), || {
                    format!("J_{{{m},{n}}} at θ={:.6}", a.radians())
                });
            }
            let jf = j.to_float();
            for &t in &thetas {
                let lhs = ou_apply(&j, t, 2.0)?;
                let ev = -Complex64::new(total as f64 * t.cos(), (m as f64 - n as f64) * t.sin());
                let err = lhs.max_abs_diff(&jf.scale(ev));
                s.pathwise_checks += 1;
                if !(err <= EIGEN_TOL) {
                    s.failures.push(format!("J_{{{m},{n}}} at θ={t:.6}: coefficient error {err:.3e}"));
                }
            }
        }
    }
    Ok(s)
}

/// `z^r z̄^s = Σ coefficient · J` for every `r + s ≤ max`, or for `r, s ≤ max`
/// when `square` is set.
pub fn suite_monomial(max: u32, square: bool, src: &HermiteSource) -> SuiteReport {
    let mut s = SuiteReport::new("monomial");
    let mut cache: BTreeMap<(u32, u32), BiPoly> = BTreeMap::new();
    for r in 0..=max {
        for t in 0..=max {
            if !square && r + t > max {
                continue;
            }
            let rhs = expand_monomial(r, t).into_iter().fold(BiPoly::zero(), |acc, (k, c)| {
                let j = cache.entry(k).or_insert_with(|| src.j(k.0, k.1));
                &acc + &j.scale(&creal(c))
            });
            s.exact(BiPoly::monomial(r, t, cint(1)) == rhs, || format!("z^{r} z̄^{t}"));
        }
    }
    s
}

/// Runs every suite up to `max_degree`.
pub fn run_identities(max_degree: u32, src: &HermiteSource) -> Result<IdentityReport> {
    if max_degree > MAX_DEGREE {
        return Err(ChaosError::DegreeBudget {
            degree: max_degree,
            budget: MAX_DEGREE,
        });
    }
    Ok(IdentityReport {
        max_degree,
        suites: vec![
            suite_h2j(max_degree, src),
            suite_man000(max_degree),
            suite_man001(max_degree)?,
            suite_man010(max_degree, src),
            suite_man011(max_degree, src)?,
            suite_det(max_degree)?,
            suite_eigen(max_degree, src)?,
            suite_monomial(max_degree, false, src),
        ],
    })
}
