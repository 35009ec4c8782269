//! Number types shared by the float and exact-rational engines.
//!
//! Every density and distribution routine is generic over [`Scalar`], so the
//! same code path runs in `f64` and in arbitrary-precision rationals.

use std::fmt::Debug;
use std::sync::OnceLock;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Exact rational used by the rational mode.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and comparisons must be equalities.
    const EXACT: bool;

    fn ratio(num: i64, den: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Probability mass function of `Binomial(n, p)` as a vector of length `n + 1`.
    fn binomial_pmf(n: usize, p: &Self) -> Vec<Self>;

    /// Multinomial coefficient `(Σ counts)! / Π counts_i!`.
    fn multinomial(counts: &[usize]) -> Self;

    /// Equality for exact types, `|a - b| <= tol` for floats.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    /// Rendering used in reports: shortest round-trip decimal or `p/q`.
    fn render(&self) -> String;

    fn powu(&self, exp: usize) -> Self {
        num::pow(self.clone(), exp)
    }
}

const LN_FACT_CACHE: usize = 20_001;

/// `ln(n!)`, tabulated up to 20000 and Stirling beyond.
pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_CACHE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for i in 1..LN_FACT_CACHE {
            acc += (i as f64).ln();
            t.push(acc);
        }
        t
    });
    if n < LN_FACT_CACHE {
        table[n]
    } else {
        let x = n as f64;
        x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x * x * x)
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn multinomial_u128(counts: &[usize]) -> Option<u128> {
    let mut acc: u128 = 1;
    let mut total: u128 = 0;
    for &c in counts {
        // multiply by C(total + c, c) incrementally; each step stays integral
        for i in 1..=c as u128 {
            total += 1;
            acc = acc.checked_mul(total)? / i;
        }
    }
    Some(acc)
}

/// Largest trial count for which float binomial laws use direct products;
/// beyond it the coefficients overflow and log space is used.
pub const DIRECT_PMF_MAX_N: usize = 1000;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn binomial_pmf(n: usize, p: &Self) -> Vec<Self> {
        let p = p.clamp(0.0, 1.0);
        let mut out = vec![0.0; n + 1];
        if p == 0.0 {
            out[0] = 1.0;
            return out;
        }
        if p == 1.0 {
            out[n] = 1.0;
            return out;
        }
        let q = 1.0 - p;
        if n <= DIRECT_PMF_MAX_N {
            let mut coeff = 1.0f64;
            let mut exact = Some(1u128);
            for (j, slot) in out.iter_mut().enumerate() {
                let c = exact.map_or(coeff, |c| c as f64);
                *slot = c * p.powi(j as i32) * q.powi((n - j) as i32);
                exact = exact.and_then(|c| c.checked_mul((n - j) as u128)).map(|c| c / (j as u128 + 1));
                coeff = coeff * (n - j) as f64 / (j + 1) as f64;
            }
            return out;
        }
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let mut sum = 0.0;
        for (j, slot) in out.iter_mut().enumerate() {
            let v = (ln_binomial(n, j) + j as f64 * lp + (n - j) as f64 * lq).exp();
            *slot = v;
            sum += v;
        }
        // renormalization guard against accumulated rounding
        if sum > 0.0 && (sum - 1.0).abs() > 0.0 {
            for v in &mut out {
                *v /= sum;
            }
        }
        out
    }

    fn multinomial(counts: &[usize]) -> Self {
        match multinomial_u128(counts) {
            Some(v) => v as f64,
            None => {
                let total: usize = counts.iter().sum();
                let ln = ln_factorial(total) - counts.iter().map(|&c| ln_factorial(c)).sum::<f64>();
                ln.exp()
            }
        }
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn render(&self) -> String {
        format!("{self:?}")
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn binomial_pmf(n: usize, p: &Self) -> Vec<Self> {
        let q = Self::one() - p;
        let mut p_pows = Vec::with_capacity(n + 1);
        let mut q_pows = Vec::with_capacity(n + 1);
        p_pows.push(Self::one());
        q_pows.push(Self::one());
        for i in 1..=n {
            p_pows.push(&p_pows[i - 1] * p);
            q_pows.push(&q_pows[i - 1] * &q);
        }
        let mut coeff = BigInt::one();
        let mut out = Vec::with_capacity(n + 1);
        for j in 0..=n {
            if j > 0 {
                coeff = coeff * BigInt::from(n - j + 1) / BigInt::from(j);
            }
            out.push(Self::from_integer(coeff.clone()) * &p_pows[j] * &q_pows[n - j]);
        }
        out
    }

    fn multinomial(counts: &[usize]) -> Self {
        let mut acc = BigInt::one();
        let mut total = BigInt::zero();
        for &c in counts {
            for i in 1..=c {
                total += 1;
                acc = acc * &total / BigInt::from(i);
            }
        }
        Self::from_integer(acc)
    }

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Parses `"0.35"`, `"7/20"`, `"1e-3"` or `"3"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Converts between scalar types through `f64` (lossy) or exactly when both
/// sides are rational-capable.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.6"), Some(Rational::ratio(3, 5)));
        assert_eq!(parse_rational("7/20"), Some(Rational::ratio(7, 20)));
        assert_eq!(parse_rational("1e-3"), Some(Rational::ratio(1, 1000)));
        assert_eq!(parse_rational("2.5E1"), Some(Rational::ratio(25, 1)));
        assert_eq!(parse_rational("-.5"), Some(Rational::ratio(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn binomial_pmfs_agree_across_modes() {
        let exact = Rational::binomial_pmf(7, &Rational::ratio(3, 10));
        let float = f64::binomial_pmf(7, &0.3);
        for (e, f) in exact.iter().zip(&float) {
            assert!((e.to_f64_lossy() - f).abs() < 1e-15);
        }
        assert_eq!(exact.iter().cloned().sum::<Rational>(), Rational::one());
    }

    #[test]
    fn dyadic_binomials_are_exact() {
        assert_eq!(f64::binomial_pmf(3, &0.5), [0.125, 0.375, 0.375, 0.125]);
        assert_eq!(f64::binomial_pmf(2, &0.25), [0.5625, 0.375, 0.0625]);
    }

    #[test]
    fn large_binomial_does_not_overflow() {
        for n in [DIRECT_PMF_MAX_N, 1770] {
            let pmf = f64::binomial_pmf(n, &0.5);
            let total: f64 = pmf.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}: {total}");
            assert!(pmf.iter().all(|v| v.is_finite()));
        }
        let skewed = f64::binomial_pmf(900, &0.013);
        assert!((skewed.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multinomials() {
        assert_eq!(f64::multinomial(&[2, 1, 1]), 12.0);
        assert_eq!(Rational::multinomial(&[3, 3]), Rational::ratio(20, 1));
        let big = f64::multinomial(&[15, 15, 15, 15]);
        let ln = ln_factorial(60) - 4.0 * ln_factorial(15);
        assert!((big.ln() - ln).abs() < 1e-9);
    }
}
