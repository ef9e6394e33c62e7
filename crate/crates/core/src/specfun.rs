//! Special functions and Gauss-Legendre quadrature.
//!
//! `erfc`, `tgamma` and `lgamma` come from `libm`; the incomplete gamma
//! function, the quadrature rule and the binomial coefficients are computed
//! here.

use std::f64::consts::{FRAC_1_SQRT_2, PI};


use crate::error::{Error, Result};

/// Below this argument `erfc` underflows and the asymptotic tail series takes over.
const NORMAL_TAIL_CUTOFF: f64 = -37.0;

/// Standard normal CDF Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < NORMAL_TAIL_CUTOFF {
        return ln_normal_tail(x).exp();
    }
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Natural log of Φ(x), accurate deep into the lower tail.
pub fn ln_std_normal_cdf(x: f64) -> f64 {
    if x < NORMAL_TAIL_CUTOFF {
        ln_normal_tail(x)
    } else if x < 0.0 {
        (0.5 * libm::erfc(-x * FRAC_1_SQRT_2)).ln()
    } else {
        // Φ(x) = 1 - Φ(-x); ln_1p keeps precision when the complement is tiny.
        (-0.5 * libm::erfc(x * FRAC_1_SQRT_2)).ln_1p()
    }
}

// Asymptotic expansion of ln Φ(x) for x << 0:
// Φ(x) = φ(x)/|x| · (1 - 1/x² + 3/x⁴ - 15/x⁶ + 105/x⁸ - ...)
fn ln_normal_tail(x: f64) -> f64 {
    let z = 1.0 / (x * x);
    let series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z)));
    -0.5 * x * x - (-x).ln() - 0.5 * (2.0 * PI).ln() + series.ln()
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Complete gamma function Γ(p).
pub fn gamma(p: f64) -> f64 {
    libm::tgamma(p)
}

/// ln Γ(p) for p > 0.
pub fn ln_gamma(p: f64) -> f64 {
    libm::lgamma(p)
}

/// Upper incomplete gamma function Γ(p, x) = ∫ₓ^∞ t^(p-1) e^(-t) dt.
///
/// Uses the power series for the lower function when `x < p + 1` and a
/// Lentz continued fraction otherwise.
pub fn upper_incomplete_gamma(p: f64, x: f64) -> Result<f64> {
    check_gamma_args("upper_incomplete_gamma", p, x)?;
    if x == 0.0 {
        return Ok(gamma(p));
    }
    if x < p + 1.0 {
        let lower = (p * x.ln() - x).exp() * lower_gamma_series(p, x);
        Ok(gamma(p) - lower)
    } else {
        Ok((p * x.ln() - x).exp() * upper_gamma_fraction(p, x))
    }
}

/// Regularized upper incomplete gamma Q(p, x) = Γ(p, x)/Γ(p).
pub fn regularized_upper_gamma(p: f64, x: f64) -> Result<f64> {
    check_gamma_args("regularized_upper_gamma", p, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    let prefactor = (p * x.ln() - x - ln_gamma(p)).exp();
    if x < p + 1.0 {
        Ok((1.0 - prefactor * lower_gamma_series(p, x)).max(0.0))
    } else {
        Ok(prefactor * upper_gamma_fraction(p, x))
    }
}

fn check_gamma_args(op: &'static str, p: f64, x: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain(op, format!("shape p must be positive and finite, got {p}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(op, format!("argument x must be nonnegative, got {x}")));
    }
    Ok(())
}

// Σ_{n≥0} x^n / (p (p+1) ... (p+n)); multiply by x^p e^{-x} for γ(p, x).
fn lower_gamma_series(p: f64, x: f64) -> f64 {
    let mut term = 1.0 / p;
    let mut sum = term;
    let mut denom = p;
    for _ in 0..10_000 {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

// Continued fraction for Γ(p, x) e^{x} x^{-p}, modified Lentz.
fn upper_gamma_fraction(p: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - p;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - p);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

/// Exact binomial coefficient C(n, k) for n ≤ 64.
pub fn binomial_coeff(n: u32, k: u32) -> Result<u64> {
    if n > 64 {
        return Err(Error::domain("binomial_coeff", format!("n = {n} exceeds 64")));
    }
    if k > n {
        return Err(Error::domain("binomial_coeff", format!("k = {k} exceeds n = {n}")));
    }
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc · (n - i) is always divisible by (i + 1)
        acc = acc * (n as u128 - i) / (i + 1);
    }
    Ok(acc as u64)
}

/// Nodes and weights of an N-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

pub const MAX_QUAD_ORDER: usize = 256;

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Σ wⱼ f(xⱼ) over the reference interval.
    pub fn sum<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// ∫ₐᵇ f via the affine map x ↦ (b−a)/2·x + (b+a)/2.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self.sum(|x| f(half * x + mid))
    }
}

/// Gauss-Legendre rule of the given order, by Newton iteration on P_n.
pub fn gauss_legendre_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_QUAD_ORDER {
        return Err(Error::domain(
            "gauss_legendre_rule",
            format!("order must lie in [1, {MAX_QUAD_ORDER}], got {order}"),
        ));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        // Tricomi-style initial guess for the i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // mirror for exact symmetry
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// dB → linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// Neumaier-compensated sum, for the alternating binomial expansions.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent erf oracle: Maclaurin series, convergent for moderate |x|.
    fn erf_series(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = x;
        let mut n = 0.0;
        while term.abs() > 1e-20 {
            sum += term / (2.0 * n + 1.0);
            n += 1.0;
            term *= -x * x / n;
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(8.0) - 1.0).abs() < 1e-15);
        assert!((std_normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-15);
        let oracle = 0.5 * (1.0 + erf_series(1.0 / 2f64.sqrt()));
        assert!((std_normal_cdf(1.0) - oracle).abs() < 1e-14);
    }

    #[test]
    fn normal_cdf_matches_series_on_grid() {
        for i in -30..=30 {
            let x = i as f64 * 0.1;
            let oracle = 0.5 * (1.0 + erf_series(x / 2f64.sqrt()));
            let got = std_normal_cdf(x);
            assert!((got - oracle).abs() <= 1e-12 * oracle, "x={x}: {got} vs {oracle}");
        }
    }

    #[test]
    fn normal_cdf_symmetry_and_tail_continuity() {
        for i in -160..=160 {
            let x = i as f64 * 0.05;
            assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-13);
        }
        // erfc branch and asymptotic branch agree at the switch point
        let a = 0.5 * libm::erfc(37.0 * FRAC_1_SQRT_2);
        let b = ln_normal_tail(-37.0).exp();
        assert!((a - b).abs() / a < 1e-10);
        assert!(std_normal_cdf(-36.0) > 0.0);
        assert_eq!(std_normal_cdf(-40.0), 0.0);
        assert!((ln_std_normal_cdf(-50.0) - ln_normal_tail(-50.0)).abs() < 1e-15);
        assert!((ln_std_normal_cdf(2.0) - std_normal_cdf(2.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn incomplete_gamma_identities() {
        let sqrt_pi = PI.sqrt();
        assert!((upper_incomplete_gamma(0.5, 0.0).unwrap() - sqrt_pi).abs() < 1e-12);
        for &x in &[0.0, 0.3, 1.0, 2.5, 10.0, 40.0] {
            let got = upper_incomplete_gamma(1.0, x).unwrap();
            assert!((got - (-x as f64).exp()).abs() <= 1e-14 * (-x as f64).exp().max(1e-300));
        }
        // √π·erfc(1)
        let v = upper_incomplete_gamma(0.5, 1.0).unwrap();
        assert!((v - 0.2788055852).abs() < 1e-10);
        assert!((v - sqrt_pi * libm::erfc(1.0)).abs() < 1e-14);
    }

    #[test]
    fn incomplete_gamma_integer_closed_form() {
        for p in 1..=8u32 {
            for &x in &[0.1, 0.7, 1.5, 3.0, 6.0, 9.5, 20.0] {
                let mut fact = 1.0;
                let mut series = 0.0;
                let mut term = 1.0;
                for j in 0..p {
                    if j > 0 {
                        term *= x / j as f64;
                    }
                    series += term;
                }
                for j in 1..p {
                    fact *= j as f64;
                }
                let want = fact * (-x).exp() * series;
                let got = upper_incomplete_gamma(p as f64, x).unwrap();
                assert!((got - want).abs() <= 1e-10 * want, "p={p} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn incomplete_gamma_decreasing_and_domain() {
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let x = i as f64 * 0.1;
            let v = upper_incomplete_gamma(0.5, x).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(upper_incomplete_gamma(0.0, 1.0).is_err());
        assert!(upper_incomplete_gamma(-1.0, 1.0).is_err());
        assert!(upper_incomplete_gamma(1.0, -0.1).is_err());
        let q = regularized_upper_gamma(0.5, 2.0).unwrap();
        assert!((q - libm::erfc(2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let r1 = gauss_legendre_rule(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - 2.0).abs() < 1e-15);
        let r2 = gauss_legendre_rule(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r2.nodes()[0] + s).abs() < 1e-15 && (r2.nodes()[1] - s).abs() < 1e-15);
        assert!((r2.weights()[0] - 1.0).abs() < 1e-14 && (r2.weights()[1] - 1.0).abs() < 1e-14);
        let r16 = gauss_legendre_rule(16).unwrap();
        let v = r16.sum(|x| x.powi(30));
        assert!((v - 2.0 / 31.0).abs() < 1e-12);
        assert!(gauss_legendre_rule(0).is_err());
        assert!(gauss_legendre_rule(257).is_err());
    }

    #[test]
    fn gauss_legendre_invariants() {
        for n in [3usize, 5, 8, 17, 32, 64, 100, 128, 256] {
            let r = gauss_legendre_rule(n).unwrap();
            assert_eq!(r.order(), n);
            let nodes = r.nodes();
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
            for i in 0..n {
                assert!((nodes[i] + nodes[n - 1 - i]).abs() < 1e-14);
                assert!(r.weights()[i] > 0.0);
            }
            assert!((r.weights().iter().sum::<f64>() - 2.0).abs() < 1e-12);
            if n <= 64 {
                for j in 0..2 * n {
                    let exact = if j % 2 == 1 { 0.0 } else { 2.0 / (j as f64 + 1.0) };
                    let got = r.sum(|x| x.powi(j as i32));
                    let err = if exact == 0.0 { got.abs() } else { ((got - exact) / exact).abs() };
                    assert!(err < 1e-10, "n={n} j={j}: {got} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial_coeff(4, 2).unwrap(), 6);
        assert_eq!(binomial_coeff(7, 0).unwrap(), 1);
        assert_eq!(binomial_coeff(64, 32).unwrap(), 1_832_624_140_942_590_534);
        // Pascal triangle oracle
        let mut row = vec![1u64];
        for n in 1..=30u32 {
            let mut next = vec![1u64; n as usize + 1];
            for k in 1..n as usize {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
            for k in 0..=n {
                assert_eq!(binomial_coeff(n, k).unwrap(), row[k as usize]);
            }
        }
        assert_eq!(binomial_coeff(10, 5).unwrap(), 252);
        assert!(binomial_coeff(3, 4).is_err());
        assert!(binomial_coeff(65, 1).is_err());
    }

    #[test]
    fn db_round_trip() {
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((linear_to_db(db_to_linear(-7.3)) + 7.3).abs() < 1e-12);
    }
}
