//! Raw busy-period moments from the `C⁽ⁿ⁾(0)` integrals
//!
//! ```text
//! C⁽ⁿ⁾(0) = ∫₀^∞ (−t)ⁿ e^(−λΛ(t)) λ[1 − G(t)] dt
//! E[Bⁿ]   = (−1)ⁿ⁺¹ { eᵖ n C⁽ⁿ⁻¹⁾(0)/λ − eᵖ Σ_{p=1}^{n−1} (−1)ⁿ⁻ᵖ C(n,p) E[Bⁿ⁻ᵖ] C⁽ᵖ⁾(0) }
//! ```
//!
//! plus the direct integral for `E[B²]` and Sathe's variance bounds.

use serde::Serialize;

use crate::dist::{Family, QueueConfig, ServiceDistribution};
use crate::error::{check_positive, Error, Result};
use crate::numeric::{binomial, exp_m1_minus_x, factorial, CompensatedSum};
use crate::quad::{self, Estimate};

/// Default relative tolerance for each `C⁽ⁿ⁾(0)` quadrature.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Highest order the CLI asks for unless told otherwise.
pub const DEFAULT_MAX_ORDER: usize = 5;

/// Largest loss of significant digits tolerated in one recurrence step.
pub const CANCELLATION_DIGITS: f64 = 8.0;

/// Tolerance for the service coefficient of variation quadrature.
pub const GAMMA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub family: Family,
    pub rho: f64,
    pub lambda: f64,
    pub n_max: usize,
    /// `E[Bᵏ]` for `k = 1..=n_max`.
    pub raw_moments: Vec<f64>,
    pub variance: f64,
    pub sathe_lower: f64,
    pub sathe_upper: f64,
    pub gamma_s: f64,
}

impl MomentTable {
    /// Builds the table from `E[B], E[B²], ...` (at least two entries).
    pub fn from_raw(
        family: Family,
        q: &QueueConfig,
        n_max: usize,
        raw: Vec<f64>,
        gamma_s: f64,
    ) -> Result<Self> {
        debug_assert!(raw.len() >= 2 && raw.len() >= n_max);
        let variance = raw[1] - raw[0] * raw[0];
        let (sathe_lower, sathe_upper) = sathe_bounds(q.rho(), q.lambda(), gamma_s)?;
        let mut raw_moments = raw;
        raw_moments.truncate(n_max);
        Ok(Self {
            family,
            rho: q.rho(),
            lambda: q.lambda(),
            n_max,
            raw_moments,
            variance,
            sathe_lower,
            sathe_upper,
            gamma_s,
        })
    }

    pub fn mean(&self) -> f64 {
        self.raw_moments[0]
    }

    /// Whether the variance lies in `[sathe_lower, sathe_upper]`, allowing a
    /// relative slack of `rel_tol` on the upper bound's magnitude.
    pub fn sathe_contains(&self, rel_tol: f64) -> bool {
        let slack = rel_tol * self.sathe_upper.abs().max(self.variance.abs());
        self.variance >= 0.0
            && self.variance >= self.sathe_lower - slack
            && self.variance <= self.sathe_upper + slack
    }
}

/// `∫_T^∞ tⁿ e^(−rt) dt = e^(−rT) Σ_{k=0}^{n} n!/k! · Tᵏ / r^(n−k+1)`.
fn power_exp_tail(n: usize, r: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut coeff = factorial(n); // n!/k! for k = 0
    for k in 0..=n {
        sum += coeff * t.powi(k as i32) / r.powi((n - k + 1) as i32);
        if k < n {
            coeff /= (k + 1) as f64;
        }
    }
    (-r * t).exp() * sum
}

/// `C⁽ⁿ⁾(0)` by adaptive quadrature to absolute error `tol`.
pub fn c_n_zero(d: &ServiceDistribution, q: &QueueConfig, n: usize, tol: f64) -> Result<Estimate> {
    check_positive("tol", tol)?;
    q.ensure_matches(d)?;
    let lambda = q.lambda();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let integrand = |t: f64| {
        t.powi(n as i32)
            * lambda
            * d.survival_unchecked(t)
            * (-lambda * d.integrated_survival_unchecked(t)).exp()
    };
    let magnitude = match (d.support_end(), d.survival_envelope()) {
        (Some(end), _) => quad::integrate(integrand, 0.0, end, tol)?,
        (None, Some((c, r))) => {
            // e^(−λΛ) ≤ 1 and 1 − G(t) ≤ C e^(−rt)
            let tail = |t: f64| lambda * c * power_exp_tail(n, r, t);
            quad::integrate_semi_infinite(integrand, &[], q.alpha().min(1.0 / lambda), tail, tol)?
        }
        (None, None) => unreachable!("every infinite-support law carries an envelope"),
    };
    Ok(Estimate {
        value: sign * magnitude.value,
        error: magnitude.error,
    })
}

/// Runs the moment recurrence on `c[k] = C⁽ᵏ⁾(0)`, `k = 0..n_max`, returning
/// `E[B], ..., E[B^n_max]`.
pub fn moments_from_c(c: &[f64], lambda: f64, rho: f64, n_max: usize) -> Result<Vec<f64>> {
    assert!(c.len() >= n_max, "need C values up to order n_max - 1");
    let e_rho = rho.exp();
    let mut moments: Vec<f64> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut acc = CompensatedSum::new();
        acc.add(e_rho / lambda * n as f64 * c[n - 1]);
        for p in 1..n {
            let sign = if (n - p) % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(-e_rho * sign * binomial(n, p) * moments[n - p - 1] * c[p]);
        }
        let outer = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let value = outer * acc.value();
        let digits_lost = (acc.magnitude() / acc.value().abs()).log10();
        if !(value > 0.0 && value.is_finite()) || digits_lost > CANCELLATION_DIGITS {
            return Err(Error::Cancellation {
                order: n,
                digits_lost: if digits_lost.is_finite() {
                    digits_lost
                } else {
                    f64::INFINITY
                },
            });
        }
        moments.push(value);
    }
    Ok(moments)
}

/// `E[B], ..., E[B^n_max]` via the recurrence driven by quadrature values of
/// `C⁽ᵏ⁾(0)`. `tol` is relative to the natural scale `k! · min(α, 1/λ)ᵏ` of
/// each integral.
pub fn busy_moments(
    d: &ServiceDistribution,
    q: &QueueConfig,
    n_max: usize,
    tol: f64,
) -> Result<MomentTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: 0.0,
            reason: "at least one moment is required",
        });
    }
    check_positive("tol", tol)?;
    q.ensure_matches(d)?;
    let order = n_max.max(2);
    let scale = q.alpha().min(1.0 / q.lambda());
    let c = (0..order)
        .map(|k| c_n_zero(d, q, k, tol * factorial(k) * scale.powi(k as i32)).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    let raw = moments_from_c(&c, q.lambda(), q.rho(), order)?;
    let gamma_s = d.coefficient_of_variation(GAMMA_TOL)?;
    MomentTable::from_raw(d.family(), q, n_max, raw, gamma_s)
}

/// `E[B²] = (2eᵖ/λ) ∫₀^∞ (e^(λ(α − Λ(t))) − 1) dt` to absolute error `tol`.
pub fn second_moment_integral(
    d: &ServiceDistribution,
    q: &QueueConfig,
    tol: f64,
) -> Result<Estimate> {
    check_positive("tol", tol)?;
    q.ensure_matches(d)?;
    let lambda = q.lambda();
    let factor = 2.0 * q.rho().exp() / lambda;
    let inner_tol = tol / factor;
    let integrand = |t: f64| (lambda * d.residual_unchecked(t)).exp_m1();
    let inner = match (d.support_end(), d.survival_envelope()) {
        (Some(end), _) => quad::integrate(integrand, 0.0, end, inner_tol)?,
        (None, Some((c, r))) => {
            // α − Λ(t) ≤ C e^(−rt)/r =: y(t); e^(λy) − 1 ≤ λy e^(λy)
            let tail = |t: f64| {
                let y = c * (-r * t).exp() / r;
                (lambda * y).exp() * lambda * y / r
            };
            quad::integrate_semi_infinite(integrand, &[], q.alpha(), tail, inner_tol)?
        }
        (None, None) => unreachable!("every infinite-support law carries an envelope"),
    };
    Ok(Estimate {
        value: factor * inner.value,
        error: factor * inner.error,
    })
}

/// Sathe's bounds on `VAR[B]` from `ρ`, `λ` and the service coefficient of
/// variation.
pub fn sathe_bounds(rho: f64, lambda: f64, gamma_s: f64) -> Result<(f64, f64)> {
    check_positive("rho", rho)?;
    check_positive("lambda", lambda)?;
    if !(gamma_s >= 0.0 && gamma_s.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "gamma_s",
            value: gamma_s,
            reason: "must be finite and >= 0",
        });
    }
    let e = rho.exp();
    let g2 = gamma_s * gamma_s;
    let l2 = lambda * lambda;
    let lower = ((2.0 * rho).exp_m1() + e * rho * rho * g2 - 2.0 * rho * e).max(0.0) / l2;
    let em1 = rho.exp_m1();
    let upper = (2.0 * e * (g2 + 1.0) * exp_m1_minus_x(rho) - em1 * em1) / l2;
    Ok((lower, upper))
}

/// `Σ_{n=0}^{N} (−s)ⁿ E[Bⁿ]/n!`, the truncated moment series of `B̄(s)`.
pub fn truncated_laplace_series(raw_moments: &[f64], s: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    let mut coeff = 1.0;
    for (i, m) in raw_moments.iter().enumerate() {
        coeff *= -s / (i + 1) as f64;
        acc.add(coeff * m);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog(lambda: f64, rho: f64) -> Vec<(ServiceDistribution, QueueConfig)> {
        let q = QueueConfig::new(lambda, rho).unwrap();
        let p = ServiceDistribution::power(0.5).unwrap();
        vec![
            (ServiceDistribution::deterministic(q.alpha()).unwrap(), q),
            (ServiceDistribution::exponential(q.alpha()).unwrap(), q),
            (
                p,
                QueueConfig::for_distribution(&p, rho / p.mean()).unwrap(),
            ),
            (ServiceDistribution::g1(lambda, rho).unwrap(), q),
            (ServiceDistribution::g2(lambda, rho).unwrap(), q),
        ]
    }

    #[test]
    fn c0_is_one_minus_exp_minus_rho_for_every_family() {
        for &rho in &[0.5, 1.0, 5.0] {
            for (d, q) in catalog(1.0, rho) {
                let c0 = c_n_zero(&d, &q, 0, 1e-13).unwrap();
                assert!((c0.value - (-(-rho).exp_m1())).abs() < 1e-12, "{d}");
            }
        }
    }

    #[test]
    fn deterministic_c1() {
        // by parts: C⁽¹⁾ = −e^(−ρ)(−α) − (1/λ)(1 − e^(−ρ)) = 2/e − 1
        let d = ServiceDistribution::deterministic(1.0).unwrap();
        let q = QueueConfig::new(1.0, 1.0).unwrap();
        let c1 = c_n_zero(&d, &q, 1, 1e-13).unwrap().value;
        assert!((c1 - (2.0 / std::f64::consts::E - 1.0)).abs() < 1e-12);
        for (d, q) in catalog(2.0, 1.0) {
            assert!(c_n_zero(&d, &q, 1, 1e-12).unwrap().value < 0.0);
            assert!(c_n_zero(&d, &q, 2, 1e-12).unwrap().value > 0.0);
        }
    }

    #[test]
    fn busy_moments_examples() {
        let e = std::f64::consts::E;
        for (d, q) in catalog(1.0, 1.0) {
            let t = busy_moments(&d, &q, 2, DEFAULT_TOL).unwrap();
            // the power law sits in a λ = 3 queue
            let expected = (e - 1.0) / q.lambda();
            assert!((t.mean() - expected).abs() < 1e-9 * expected, "{d}");
        }
        let d = ServiceDistribution::deterministic(1.0).unwrap();
        let q = QueueConfig::new(1.0, 1.0).unwrap();
        let t = busy_moments(&d, &q, 3, DEFAULT_TOL).unwrap();
        assert_eq!(t.raw_moments.len(), 3);
        assert!((t.variance - (e * e - 2.0 * e - 1.0)).abs() < 1e-10);
        assert!((t.variance - 0.952_492_4).abs() < 1e-7);
        assert!(t.sathe_contains(1e-9));

        let m = ServiceDistribution::exponential(1.0).unwrap();
        let t = busy_moments(&m, &q, 2, DEFAULT_TOL).unwrap();
        // Sathe bracket at γ_s = 1: [e² + e − 2e − 1, 4e(e − 2) − (e − 1)²]
        let lo = e * e + e - 2.0 * e - 1.0;
        let hi = 4.0 * e * (e - 2.0) - (e - 1.0) * (e - 1.0);
        assert!((t.sathe_lower - lo).abs() < 1e-12 && (t.sathe_upper - hi).abs() < 1e-12);
        assert!(t.variance > lo && t.variance < hi, "{}", t.variance);
        // E[B²] = 2e ∫₀¹ (eᵘ − 1)/u du with Ein(1) = 1.3179021514544038
        assert!((t.raw_moments[1] - 2.0 * e * 1.317_902_151_454_403_8).abs() < 1e-10);
    }

    #[test]
    fn n_max_one_still_reports_variance() {
        let d = ServiceDistribution::exponential(1.0).unwrap();
        let q = QueueConfig::new(1.0, 1.0).unwrap();
        let t = busy_moments(&d, &q, 1, DEFAULT_TOL).unwrap();
        assert_eq!(t.raw_moments.len(), 1);
        assert!(t.variance > 0.0);
        assert!(busy_moments(&d, &q, 0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn second_moment_integral_examples() {
        let e = std::f64::consts::E;
        let d = ServiceDistribution::deterministic(1.0).unwrap();
        let q = QueueConfig::new(1.0, 1.0).unwrap();
        let m2 = second_moment_integral(&d, &q, 1e-12).unwrap();
        assert!((m2.value - (e * e - 2.0 * e - 1.0 + (e - 1.0) * (e - 1.0))).abs() < 1e-11);
        assert!((m2.value - 3.904_984_8).abs() < 1e-7);
        // rare arrivals: one service dominates
        let q = QueueConfig::new(0.01, 0.01).unwrap();
        let m2 = second_moment_integral(&d, &q, 1e-12).unwrap();
        assert!((m2.value - 1.0).abs() < 0.02);
    }

    #[test]
    fn two_routes_to_second_moment() {
        for &rho in &[0.5, 1.0, 2.0] {
            for (d, q) in catalog(1.0, rho) {
                let rec = busy_moments(&d, &q, 2, DEFAULT_TOL).unwrap().raw_moments[1];
                let int = second_moment_integral(&d, &q, 1e-12 * rec).unwrap().value;
                assert!(((rec - int) / int).abs() < 1e-7, "{d}: {rec} vs {int}");
            }
        }
    }

    #[test]
    fn sathe_examples() {
        let e = std::f64::consts::E;
        let pinch = e * e - 2.0 * e - 1.0;
        let (lo, hi) = sathe_bounds(1.0, 1.0, 0.0).unwrap();
        assert!((lo - pinch).abs() < 1e-14 && (hi - pinch).abs() < 1e-14);
        let (lo, hi) = sathe_bounds(1.0, 2.0, 0.0).unwrap();
        assert!((lo - 0.238_123_1).abs() < 1e-7 && (hi - 0.238_123_1).abs() < 1e-7);
        assert!(sathe_bounds(0.0, 1.0, 0.0).is_err());
        assert!(sathe_bounds(1.0, 1.0, -0.5).is_err());
    }

    #[test]
    fn sathe_bounds_pinch_at_zero_variation() {
        // e^(2ρ) − 2ρe^ρ − 1 = 2e^ρ(e^ρ − 1 − ρ) − (e^ρ − 1)², checked at scattered ρ
        for i in 0..10 {
            let rho = 0.05 + 1.37 * i as f64;
            let (lo, hi) = sathe_bounds(rho, 1.0, 0.0).unwrap();
            let direct = (2.0 * rho).exp() - 2.0 * rho * rho.exp() - 1.0;
            assert!(((lo - hi) / hi).abs() < 1e-9, "rho={rho}");
            assert!(((lo - direct) / direct).abs() < 1e-9, "rho={rho}");
        }
    }

    #[test]
    fn sathe_lower_never_exceeds_upper() {
        for i in 1..=200 {
            let rho = 0.1 * i as f64;
            for j in 0..=30 {
                let g = 0.1 * j as f64;
                let (lo, hi) = sathe_bounds(rho, 1.0, g).unwrap();
                assert!(lo <= hi * (1.0 + 1e-12), "rho={rho} g={g}");
            }
        }
    }

    #[test]
    fn truncated_series_approaches_peakedness() {
        let d = ServiceDistribution::deterministic(1.0).unwrap();
        let q = QueueConfig::new(0.25, 0.25).unwrap();
        let t = busy_moments(&d, &q, 8, DEFAULT_TOL).unwrap();
        let series = truncated_laplace_series(&t.raw_moments, 1.0);
        let p = crate::transform::peakedness(&d, &q, 1e-10).unwrap().value;
        assert!((series - p).abs() < 1e-3, "{series} vs {p}");
    }

    #[test]
    fn scale_covariance() {
        // α → κα, λ → λ/κ keeps ρ and scales E[Bⁿ] by κⁿ
        let kappa = 3.5;
        let base = busy_moments(
            &ServiceDistribution::exponential(1.0).unwrap(),
            &QueueConfig::new(2.0, 2.0).unwrap(),
            4,
            DEFAULT_TOL,
        )
        .unwrap();
        let scaled = busy_moments(
            &ServiceDistribution::exponential(kappa).unwrap(),
            &QueueConfig::new(2.0 / kappa, 2.0).unwrap(),
            4,
            DEFAULT_TOL,
        )
        .unwrap();
        for (n, (a, b)) in base.raw_moments.iter().zip(&scaled.raw_moments).enumerate() {
            let expected = a * kappa.powi(n as i32 + 1);
            assert!(((b - expected) / expected).abs() < 1e-9, "order {}", n + 1);
        }
    }

    #[test]
    fn cancellation_alarm_trips() {
        // c values making the first order vanish
        let err = moments_from_c(&[0.0, -1.0], 1.0, 1.0, 2).unwrap_err();
        assert!(matches!(err, Error::Cancellation { order: 1, .. }));
        // order-3 sum is 3eᵖ[c₂(1/λ + E[B]) − E[B²]c₁]; pick c₂ to cancel it to 1e-11
        let (lambda, rho) = (1.0, 1.0f64);
        let c0 = -(-rho).exp_m1();
        let c1 = 2.0 / std::f64::consts::E - 1.0;
        let m = moments_from_c(&[c0, c1], lambda, rho, 2).unwrap();
        let c2 = m[1] * c1 / (1.0 / lambda + m[0]) * (1.0 + 1e-11);
        let err = moments_from_c(&[c0, c1, c2], lambda, rho, 3).unwrap_err();
        assert!(
            matches!(err, Error::Cancellation { order: 3, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn power_exp_tail_matches_quadrature() {
        for n in 0..5 {
            let exact = power_exp_tail(n, 1.7, 2.0);
            let num = quad::integrate(
                |t: f64| t.powi(n as i32) * (-1.7 * t).exp(),
                2.0,
                80.0,
                1e-12,
            )
            .unwrap();
            assert!(((exact - num.value) / exact).abs() < 1e-11, "n={n}");
        }
    }
}
