use chaos_core::chaos::{
    decompose, eval_complex, eval_real, exact_moment, sample_at, sample_batch, sample_batch_with, ChaosElement,
    ChaosExpr, GaussianSample,
};
use chaos_core::exact::{cint, cq, rat, ratio, ComplexRational, Rational};
use chaos_core::exec::Execution;
use chaos_core::tensor::{inner, ComplexKernel, SymTensor};
use num_complex::Complex64;

fn e(i: usize, d: usize) -> Vec<Rational> {
    (0..d).map(|j| rat((i == j) as i64)).collect()
}

fn ce(i: usize, d: usize) -> Vec<ComplexRational> {
    (0..d).map(|j| cint((i == j) as i64)).collect()
}

#[test]
fn sampling_is_reproducible_and_standard() {
    let a = sample_batch(3, 1000, 42).unwrap();
    let b = sample_batch_with(3, 1000, 42, Execution::Sequential).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_batch(3, 1000, 43).unwrap());

    let n = 1_000_000;
    let s = sample_batch(1, n, 7).unwrap();
    let mean = s.iter().map(|g| g.xi()[0]).sum::<f64>() / n as f64;
    let cov = s.iter().map(|g| g.xi()[0] * g.eta()[0]).sum::<f64>() / n as f64;
    let bound = 4.0 / (n as f64).sqrt();
    assert!(mean.abs() < bound, "{mean}");
    assert!(cov.abs() < bound, "{cov}");
}

#[test]
fn real_integral_examples() {
    let g = GaussianSample::new(vec![0.3, -1.2], vec![0.8, 2.0]).unwrap();
    let e1 = SymTensor::tensor_power(&e(0, 4), 1);
    assert_eq!(eval_real(&e1, &g).unwrap(), 0.3);
    let e11 = SymTensor::tensor_power(&e(0, 4), 2);
    assert!((eval_real(&e11, &g).unwrap() - (0.09 - 1.0)).abs() < 1e-15);

    // h = (e_1 + e_2)/√2: h⊗h = (e_1 + e_2)^{⊗2}/2
    let h2 = SymTensor::tensor_power(&[rat(1), rat(1), rat(0), rat(0)], 2).scale(&ratio(1, 2));
    for i in 0..100 {
        let s = sample_at(2, 3, i);
        let w = (s.xi()[0] + s.xi()[1]) / 2f64.sqrt();
        assert!((eval_real(&h2, &s).unwrap() - (w * w - 1.0)).abs() < 1e-12);
    }
}

#[test]
fn complex_integral_examples() {
    for i in 0..100 {
        let s = sample_at(2, 4, i);
        let z1 = s.zeta(0);
        let z2 = s.zeta(1);
        let e1 = ComplexKernel::rank_one(&ce(0, 2), 1, 0);
        assert!((eval_complex(&e1, &s).unwrap() - z1 / 2f64.sqrt()).norm() < 1e-14);

        let mut e12 = ComplexKernel::zero(1, 1, 2);
        e12.set(vec![0], vec![1], cint(1)).unwrap();
        assert!((eval_complex(&e12, &s).unwrap() - z1 * z2.conj() / 2.0).norm() < 1e-13);

        let h = vec![cq(rat(1), rat(0)), cq(rat(0), rat(1))];
        let hh = ComplexKernel::rank_one(&h, 1, 1);
        let z = s.z_of(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        assert!((eval_complex(&hh, &s).unwrap() - (z.norm_sqr() - 2.0)).norm() < 1e-12);
    }
}

#[test]
fn decomposition_examples() {
    let dec = decompose(&ComplexKernel::rank_one(&ce(0, 1), 1, 0));
    let (u, v) = (dec.u.scale(&rat(1)), dec.v.scale(&rat(1)));
    assert_eq!(dec.scale_sq * u.norm_sq(), ratio(1, 2));
    assert!(inner(&u, &v).unwrap() == rat(0));
    assert_eq!(u.norm_sq(), v.norm_sq());

    let h = vec![cq(rat(1), rat(1)), cq(ratio(1, 2), rat(0))];
    let phi = ComplexKernel::rank_one(&h, 1, 1);
    let dec = decompose(&phi);
    for i in 0..100 {
        let s = sample_at(2, 9, i);
        let a = eval_complex(&phi, &s).unwrap();
        assert!((a - dec.eval(&s).unwrap()).norm() < 1e-10 * a.norm().max(1.0));
    }
}

#[test]
fn exact_moment_examples() {
    let z = ChaosElement::Complex(ComplexKernel::rank_one(&ce(0, 1), 1, 0));
    let v = exact_moment(&[z], &ChaosExpr::elem(0).times(ChaosExpr::elem(0).conj())).unwrap();
    assert_eq!(v.as_rational(), Some(&cint(1)));

    let mut phi = ComplexKernel::zero(1, 2, 2);
    phi.set(vec![1], vec![0, 1], cq(rat(2), rat(-1))).unwrap();
    phi.set(vec![0], vec![0, 0], cint(3)).unwrap();
    let v = exact_moment(&[ChaosElement::Complex(phi)], &ChaosExpr::elem(0).pow(2)).unwrap();
    assert_eq!(v.to_c64(), Complex64::new(0.0, 0.0));

    let j11 = ChaosElement::Complex(ComplexKernel::rank_one(&ce(0, 1), 1, 1).scale(&cint(2)));
    let v = exact_moment(&[j11], &ChaosExpr::elem(0).pow(2)).unwrap();
    assert_eq!(v.as_rational(), Some(&cint(4)));
}
