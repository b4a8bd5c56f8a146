//! Rational and rational-complex scalars shared by the exact modules.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type ComplexRational = Complex<BigRational>;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn cq(re: Rational, im: Rational) -> ComplexRational {
    Complex::new(re, im)
}

pub fn creal(re: Rational) -> ComplexRational {
    Complex::new(re, Rational::zero())
}

pub fn cint(n: i64) -> ComplexRational {
    creal(rat(n))
}

/// `i^k` as an exact complex number.
pub fn i_pow(k: u32) -> ComplexRational {
    match k % 4 {
        0 => cint(1),
        1 => cq(rat(0), rat(1)),
        2 => cint(-1),
        _ => cq(rat(0), rat(-1)),
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn binomial_q(n: u32, k: u32) -> Rational {
    BigRational::from_integer(binomial(n, k))
}

pub fn factorial_q(n: u32) -> Rational {
    BigRational::from_integer(factorial(n))
}

pub fn binomial_f64(n: u32, k: u32) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

/// Multinomial coefficient `(sum of counts)! / prod(count!)`.
pub fn multinomial(counts: &[u32]) -> BigInt {
    let total: u32 = counts.iter().sum();
    let mut denom = BigInt::one();
    for &c in counts {
        denom *= factorial(c);
    }
    factorial(total).div_floor(&denom)
}

pub fn pow_q(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn pow_c(base: &ComplexRational, exp: u32) -> ComplexRational {
    let mut acc = cint(1);
    for _ in 0..exp {
        acc *= base.clone();
    }
    acc
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn to_c64(q: &ComplexRational) -> Complex64 {
    Complex64::new(to_f64(&q.re), to_f64(&q.im))
}

pub fn is_czero(q: &ComplexRational) -> bool {
    q.re.is_zero() && q.im.is_zero()
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders `a + bi` in the shortest exact form (`8`, `-i`, `1/2 - 3i`).
pub fn format_complex(q: &ComplexRational) -> String {
    let imag = |v: &Rational| {
        if v.abs().is_one() {
            "i".to_string()
        } else {
            format!("{}i", format_rational(&v.abs()))
        }
    };
    match (q.re.is_zero(), q.im.is_zero()) {
        (_, true) => format_rational(&q.re),
        (true, false) => {
            let sign = if q.im.is_negative() { "-" } else { "" };
            format!("{sign}{}", imag(&q.im))
        }
        (false, false) => {
            let sign = if q.im.is_negative() { '-' } else { '+' };
            format!("{} {sign} {}", format_rational(&q.re), imag(&q.im))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(multinomial(&[2, 1, 1]), BigInt::from(12));
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(&cint(8)), "8");
        assert_eq!(format_complex(&cq(rat(0), rat(-1))), "-i");
        assert_eq!(format_complex(&cq(ratio(1, 2), rat(-3))), "1/2 - 3i");
        assert_eq!(format_complex(&cq(rat(0), ratio(2, 3))), "2/3i");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/6"), Some(ratio(-1, 2)));
        assert_eq!(parse_rational(" 7 "), Some(rat(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
