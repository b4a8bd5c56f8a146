use chaos_core::exact::{cint, cq, rat, ratio};
use chaos_core::hermite::{complex_hermite, BiPoly, HermiteIndex};
use chaos_core::wick::{expect, expect_complex, isserlis_moment, GaussPoly, GaussianFamily, ZetaPoly};

fn zeta(p: &BiPoly) -> ZetaPoly {
    ZetaPoly::from_bipoly(1, 0, p).unwrap()
}

fn j(m: u32, n: u32) -> ZetaPoly {
    zeta(&complex_hermite(&HermiteIndex::standard(m, n)))
}

#[test]
fn isserlis_examples() {
    let one = GaussianFamily::standard(1);
    assert_eq!(isserlis_moment(&one, &[4]).unwrap(), rat(3));
    let two = GaussianFamily::standard(2);
    assert_eq!(isserlis_moment(&two, &[2, 2]).unwrap(), rat(1));
    let rho = ratio(2, 5);
    let corr = GaussianFamily::new(vec![vec![rat(2), rho.clone()], vec![rho, rat(1)]]).unwrap();
    assert_eq!(isserlis_moment(&corr, &[3, 2]).unwrap(), rat(0));
}

#[test]
fn rejects_indefinite_covariance() {
    assert!(GaussianFamily::new(vec![vec![rat(1), rat(2)], vec![rat(2), rat(1)]]).is_err());
    assert!(GaussianFamily::new(vec![vec![rat(1), rat(0)], vec![rat(1), rat(1)]]).is_err());
}

#[test]
fn expect_examples() {
    let fam = GaussianFamily::standard(2);
    let c = cq(ratio(3, 7), rat(-1));
    assert_eq!(expect(&fam, &GaussPoly::constant(2, c.clone())).unwrap(), c);
    assert_eq!(expect(&fam, &GaussPoly::hermite(2, 0, 4).unwrap()).unwrap(), cint(0));
    let x = GaussPoly::var(2, 0).unwrap();
    let y = GaussPoly::var(2, 1).unwrap();
    let chi = &(&(&x * &x) + &(&y * &y)) - &GaussPoly::constant(2, cint(2));
    assert_eq!(expect(&fam, &chi.pow(2)).unwrap(), cint(4));
    assert!(expect(&GaussianFamily::standard(1), &y).is_err());
}

#[test]
fn complex_expectation_examples() {
    let fam = GaussianFamily::standard(2);
    let zz = zeta(&(&BiPoly::z() * &BiPoly::zbar()));
    assert_eq!(expect_complex(&fam, &zz).unwrap(), cint(2));
    assert_eq!(expect_complex(&fam, &j(1, 2).mul(&j(1, 2).conj())).unwrap(), cint(16));
    assert_eq!(expect_complex(&fam, &j(1, 0).mul(&j(0, 1).conj())).unwrap(), cint(0));
}

#[test]
fn correlated_complex_pair() {
    // ζ_1, ζ_2 with E[ζ_1 ζ̄_2] = 1: real parts share covariance 1/2, imaginary parts too
    let h = ratio(1, 2);
    let cov = vec![
        vec![rat(1), h.clone(), rat(0), rat(0)],
        vec![h.clone(), rat(1), rat(0), rat(0)],
        vec![rat(0), rat(0), rat(1), h.clone()],
        vec![rat(0), rat(0), h, rat(1)],
    ];
    let fam = GaussianFamily::new(cov).unwrap();
    let jm = |m, n, k| ZetaPoly::from_bipoly(2, k, &complex_hermite(&HermiteIndex::standard(m, n))).unwrap();
    // m!n! (E ζ_1 ζ̄_2)^m (E ζ̄_1 ζ_2)^n with both covariances equal to 1
    assert_eq!(expect_complex(&fam, &jm(2, 1, 0).mul(&jm(2, 1, 1).conj())).unwrap(), cint(2));
    assert_eq!(expect_complex(&fam, &jm(2, 1, 0).mul(&jm(1, 2, 1).conj())).unwrap(), cint(0));
}

#[test]
fn high_single_coordinate_powers_pair_out() {
    let fam = GaussianFamily::standard(1);
    let x = GaussPoly::var(1, 0).unwrap();
    // 17!! = 34459425
    assert_eq!(expect(&fam, &x.pow(18)).unwrap(), cint(34_459_425));
}
