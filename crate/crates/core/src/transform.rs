//! The busy-period Laplace transform
//!
//! ```text
//! B̄(s) = 1 + s/λ − 1 / (λ K(s)),   K(s) = ∫₀^∞ e^(−st − λΛ(t)) dt
//! ```
//!
//! evaluated by adaptive quadrature, and the peakedness `p = B̄(1/α)` and the
//! normalized parameter `η = p ρ / (e^ρ − ρ − 1) + 1` derived from it.

use serde::Serialize;

use crate::dist::{Family, QueueConfig, ServiceDistribution};
use crate::error::{check_positive, Error, Result};
use crate::numeric::exp_m1_minus_x;
use crate::quad::{self, Estimate};

/// Default absolute tolerance on `p`.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_TAIL_DOUBLINGS: usize = 200;

/// `B̄(s)` with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformValue {
    pub s: f64,
    pub value: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakednessMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaReport {
    pub family: Family,
    pub rho: f64,
    pub lambda: f64,
    pub p: f64,
    pub eta: f64,
    pub eta_lower: f64,
    pub eta_upper: f64,
    /// Absolute error bound on `p`; zero for closed forms.
    pub quadrature_error: f64,
    pub method: PeakednessMethod,
}

impl EtaReport {
    /// Error bound on `eta`, i.e. `quadrature_error · ρ / (e^ρ − ρ − 1)`.
    pub fn eta_error(&self) -> f64 {
        self.quadrature_error * eta_scale(self.rho) + 4.0 * f64::EPSILON * self.eta
    }

    pub fn within_bounds(&self) -> bool {
        let slack = self.eta_error();
        self.p > 0.0
            && self.p < 1.0
            && self.eta >= self.eta_lower - slack
            && self.eta <= self.eta_upper + slack
    }
}

/// `ρ / (e^ρ − ρ − 1)`, the factor mapping `p` to `η − 1`.
fn eta_scale(rho: f64) -> f64 {
    rho / exp_m1_minus_x(rho)
}

/// `K(s) = ∫₀^∞ e^(−st − λΛ(t)) dt` to absolute error `tol`.
///
/// The body `[0, T]` is integrated adaptively. Because `Λ` is nondecreasing
/// with limit `α`, the tail lies in the exact bracket
/// `[e^(−ρ) e^(−sT)/s, e^(−λΛ(T)) e^(−sT)/s]`; its midpoint is used and `T`
/// doubles until the bracket is narrower than `tol / 2`.
pub fn k_integral(d: &ServiceDistribution, q: &QueueConfig, s: f64, tol: f64) -> Result<Estimate> {
    check_positive("s", s)?;
    check_positive("tol", tol)?;
    q.ensure_matches(d)?;
    let lambda = q.lambda();
    let rho = q.rho();
    let alpha = q.alpha();

    let tail_bracket = |t: f64| {
        let scale = (-s * t).exp() / s;
        let hi = (-lambda * d.integrated_survival_unchecked(t)).exp() * scale;
        let lo = (-rho).exp() * scale;
        (lo, hi.max(lo))
    };
    let mut upper = alpha * (10.0 / (s * alpha)).max(1.0);
    let mut bracket = tail_bracket(upper);
    let mut doublings = 0;
    while bracket.1 - bracket.0 >= 0.5 * tol {
        upper *= 2.0;
        bracket = tail_bracket(upper);
        doublings += 1;
        if doublings > MAX_TAIL_DOUBLINGS {
            return Err(Error::Accuracy {
                requested: tol,
                achieved: bracket.1 - bracket.0,
            });
        }
    }
    let integrand = |t: f64| (-s * t - lambda * d.integrated_survival_unchecked(t)).exp();
    let mut points = quad::pieces(&d.breakpoints(), upper);
    // the integrand decays on the scale 1/s; without knees a wide first
    // piece can miss the mass near the origin entirely
    let first = points[1];
    let knees: Vec<f64> = [1.0, 8.0, 40.0]
        .iter()
        .map(|k| k / s)
        .filter(|&k| k < first)
        .collect();
    points.splice(1..1, knees);
    let body = quad::integrate_pieces(integrand, &points, 0.5 * tol)?;
    let half_width = 0.5 * (bracket.1 - bracket.0);
    Ok(Estimate {
        value: body.value + bracket.0 + half_width,
        error: body.error + half_width,
    })
}

/// `B̄(s)` to absolute error `tol`; `s = 0` returns exactly 1.
pub fn busy_laplace(
    d: &ServiceDistribution,
    q: &QueueConfig,
    s: f64,
    tol: f64,
) -> Result<TransformValue> {
    check_positive("tol", tol)?;
    if s == 0.0 {
        q.ensure_matches(d)?;
        return Ok(TransformValue {
            s,
            value: 1.0,
            error_bound: 0.0,
        });
    }
    check_positive("s", s)?;
    let lambda = q.lambda();
    // Λ(t) ≤ min(t, α) gives K(s) ≥ max(1/(s + λ), e^(−ρ)/s); that lower
    // bound sets the K tolerance
    let k_lower = (1.0 / (s + lambda)).max((-q.rho()).exp() / s);
    let k_tol = (0.5 * tol * lambda * k_lower * k_lower).max(16.0 * f64::EPSILON * k_lower);
    let k = k_integral(d, q, s, k_tol)?;
    let inv = 1.0 / (lambda * k.value);
    let value = 1.0 + s / lambda - inv;
    let propagated = k.error / (lambda * k.value * (k.value - k.error).max(k_lower * 0.5));
    let rounding = 4.0 * f64::EPSILON * (1.0 + s / lambda + inv);
    let error_bound = propagated + rounding;
    if error_bound > tol {
        return Err(Error::Accuracy {
            requested: tol,
            achieved: error_bound,
        });
    }
    Ok(TransformValue {
        s,
        value,
        error_bound,
    })
}

/// Peakedness `p = B̄(1/α)` by quadrature.
pub fn peakedness(d: &ServiceDistribution, q: &QueueConfig, tol: f64) -> Result<TransformValue> {
    busy_laplace(d, q, 1.0 / q.alpha(), tol)
}

/// Closed-form peakedness for the families where it depends on `ρ` only.
pub fn peakedness_closed_form(family: Family, rho: f64) -> Result<f64> {
    check_positive("rho", rho)?;
    match family {
        Family::G1 => {
            if rho > 1.0 {
                let e = (-rho).exp();
                Ok((rho + 1.0) * e / (1.0 + rho * e))
            } else {
                Ok((rho + 1.0) / (rho.exp() + rho))
            }
        }
        Family::G2 => {
            if rho > 1.0 {
                let e = (-rho).exp();
                Ok(rho * e / (1.0 + (rho - 1.0) * e))
            } else {
                Ok(rho / (rho.exp_m1() + rho))
            }
        }
        Family::Deterministic => {
            if rho > 1.0 {
                let e = (-rho - 1.0).exp();
                Ok((rho + 1.0) * e / (1.0 + rho * e))
            } else {
                Ok((rho + 1.0) / ((rho + 1.0).exp() + rho))
            }
        }
        Family::Exponential => {
            if rho > 1.0 {
                let e = (-rho).exp();
                Ok((1.0 - (1.0 + rho) * e) / (rho * (1.0 - e)))
            } else {
                Ok(exp_m1_minus_x(rho) / (rho * rho.exp_m1()))
            }
        }
        Family::Power => Err(Error::NoClosedForm("P")),
    }
}

/// `η = p ρ / (e^ρ − ρ − 1) + 1`.
pub fn eta_from_peakedness(p: f64, rho: f64) -> f64 {
    p * eta_scale(rho) + 1.0
}

/// `(1, (e^ρ − 1)/(e^ρ − ρ − 1))`.
pub fn eta_bounds(rho: f64) -> Result<(f64, f64)> {
    check_positive("rho", rho)?;
    Ok((1.0, 1.0 + eta_scale(rho)))
}

fn closed_form_applies(d: &ServiceDistribution, q: &QueueConfig) -> bool {
    match d.family() {
        Family::Deterministic | Family::Exponential => true,
        Family::G1 | Family::G2 => d.queue_parameters().is_some_and(|(l, r)| {
            (l - q.lambda()).abs() <= 1e-12 * l && (r - q.rho()).abs() <= 1e-12 * r
        }),
        Family::Power => false,
    }
}

/// `η` for `d` in queue `q`, through the closed-form peakedness when one
/// exists for the system and by quadrature otherwise.
pub fn eta(d: &ServiceDistribution, q: &QueueConfig, tol: f64) -> Result<EtaReport> {
    check_positive("tol", tol)?;
    q.ensure_matches(d)?;
    if closed_form_applies(d, q) {
        let p = peakedness_closed_form(d.family(), q.rho())?;
        Ok(report(d.family(), q, p, 0.0, PeakednessMethod::ClosedForm))
    } else {
        eta_by_quadrature(d, q, tol)
    }
}

/// `η` with `p` always obtained by quadrature.
pub fn eta_by_quadrature(d: &ServiceDistribution, q: &QueueConfig, tol: f64) -> Result<EtaReport> {
    let p = peakedness(d, q, tol)?;
    Ok(report(
        d.family(),
        q,
        p.value,
        p.error_bound,
        PeakednessMethod::Quadrature,
    ))
}

fn report(
    family: Family,
    q: &QueueConfig,
    p: f64,
    err: f64,
    method: PeakednessMethod,
) -> EtaReport {
    let (eta_lower, eta_upper) = eta_bounds(q.rho()).expect("rho validated by QueueConfig");
    EtaReport {
        family,
        rho: q.rho(),
        lambda: q.lambda(),
        p,
        eta: eta_from_peakedness(p, q.rho()),
        eta_lower,
        eta_upper,
        quadrature_error: err,
        method,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> (ServiceDistribution, QueueConfig) {
        (
            ServiceDistribution::exponential(1.0).unwrap(),
            QueueConfig::new(1.0, 1.0).unwrap(),
        )
    }

    fn det1() -> (ServiceDistribution, QueueConfig) {
        (
            ServiceDistribution::deterministic(1.0).unwrap(),
            QueueConfig::new(1.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn k_integral_examples() {
        let e1 = (-1.0f64).exp();
        let (d, q) = exp1();
        let k = k_integral(&d, &q, 1.0, 1e-12).unwrap();
        // α(1 − e^(−ρ))/ρ
        assert!((k.value - (1.0 - e1)).abs() < 1e-12);
        assert!((k.value - 0.632_120_6).abs() < 1e-7);
        let (d, q) = det1();
        let k = k_integral(&d, &q, 1.0, 1e-12).unwrap();
        let exact = (1.0 - (-2.0f64).exp()) / 2.0 + (-2.0f64).exp();
        assert!((k.value - exact).abs() < 1e-12);
        assert!((k.value - 0.567_667_6).abs() < 1e-7);
    }

    #[test]
    fn k_integral_large_s() {
        for d in [
            ServiceDistribution::exponential(1.0).unwrap(),
            ServiceDistribution::deterministic(1.0).unwrap(),
            ServiceDistribution::g1(1.0, 1.0).unwrap(),
            ServiceDistribution::g2(1.0, 1.0).unwrap(),
        ] {
            let q = QueueConfig::new(1.0, 1.0).unwrap();
            let k = k_integral(&d, &q, 1e6, 1e-14).unwrap();
            assert!((k.value * 1e6 - 1.0).abs() < 1e-4, "{d}: {}", k.value * 1e6);
        }
        let p = ServiceDistribution::power(0.5).unwrap();
        let q = QueueConfig::for_distribution(&p, 3.0).unwrap();
        let k = k_integral(&p, &q, 1e6, 1e-14).unwrap();
        assert!((k.value * 1e6 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn k_integral_rejects_bad_input() {
        let (d, q) = exp1();
        assert!(k_integral(&d, &q, 0.0, 1e-10).is_err());
        assert!(k_integral(&d, &q, -1.0, 1e-10).is_err());
        assert!(k_integral(&d, &q, 1.0, 0.0).is_err());
        let q2 = QueueConfig::new(1.0, 2.0).unwrap();
        assert!(matches!(
            k_integral(&d, &q2, 1.0, 1e-10),
            Err(Error::Inconsistent { .. })
        ));
    }

    #[test]
    fn busy_laplace_examples() {
        let (d, q) = exp1();
        assert_eq!(busy_laplace(&d, &q, 0.0, 1e-10).unwrap().value, 1.0);
        let v = busy_laplace(&d, &q, 1.0, 1e-10).unwrap();
        assert!((v.value - 0.418_023_3).abs() < 1e-7);
        assert!(v.error_bound <= 1e-10);
        let (d, q) = det1();
        let v = busy_laplace(&d, &q, 1.0, 1e-10).unwrap();
        assert!((v.value - 0.238_405_8).abs() < 1e-7);
        assert!(busy_laplace(&d, &q, -1.0, 1e-10).is_err());
    }

    #[test]
    fn peakedness_examples() {
        let (d, q) = exp1();
        assert!((peakedness(&d, &q, 1e-10).unwrap().value - 0.418_023_3).abs() < 1e-7);
        let g2 = ServiceDistribution::g2(1.0, 1.0).unwrap();
        let p = peakedness(&g2, &q, 1e-10).unwrap().value;
        assert!((p - (-1.0f64).exp()).abs() < 1e-10);
        let (d, q) = det1();
        assert!((peakedness(&d, &q, 1e-10).unwrap().value - 0.238_405_8).abs() < 1e-7);
    }

    #[test]
    fn closed_form_examples() {
        let e = std::f64::consts::E;
        let g1 = peakedness_closed_form(Family::G1, 1.0).unwrap();
        assert!((g1 - 2.0 / (e + 1.0)).abs() < 1e-15);
        assert!((eta_from_peakedness(g1, 1.0) - 1.748_846_5).abs() < 5e-8);
        let m = peakedness_closed_form(Family::Exponential, 1.0).unwrap();
        assert!((m - 0.418_023_3).abs() < 1e-7);
        assert!((eta_from_peakedness(m, 1.0) - 1.581_976_7).abs() < 5e-8);
        let d = peakedness_closed_form(Family::Deterministic, 0.5).unwrap();
        assert!((d - 1.5 / (1.5f64.exp() + 0.5)).abs() < 1e-15);
        assert!((d - 0.301_102_7).abs() < 1e-7);
        assert!((eta_from_peakedness(d, 0.5) - 2.012_305_4).abs() < 5e-8);
        assert!(peakedness_closed_form(Family::Power, 1.0).is_err());
        assert!(peakedness_closed_form(Family::G1, 0.0).is_err());
    }

    #[test]
    fn closed_forms_continuous_across_branch_point() {
        for f in [
            Family::G1,
            Family::G2,
            Family::Deterministic,
            Family::Exponential,
        ] {
            let below = peakedness_closed_form(f, 1.0).unwrap();
            let above = peakedness_closed_form(f, 1.0 + 1e-12).unwrap();
            assert!((below - above).abs() < 1e-11, "{f}");
        }
        // no overflow far into heavy traffic
        for f in [
            Family::G1,
            Family::G2,
            Family::Deterministic,
            Family::Exponential,
        ] {
            let p = peakedness_closed_form(f, 800.0).unwrap();
            assert!(p.is_finite() && p >= 0.0);
        }
    }

    #[test]
    fn eta_bounds_examples() {
        let e = std::f64::consts::E;
        let (lo, hi) = eta_bounds(1.0).unwrap();
        assert_eq!(lo, 1.0);
        assert!((hi - (e - 1.0) / (e - 2.0)).abs() < 1e-14);
        assert!((hi - 2.392_211_2).abs() < 1e-7);
        let (_, hi) = eta_bounds(20.0).unwrap();
        let e20 = 20f64.exp();
        assert!((hi - (e20 - 1.0) / (e20 - 21.0)).abs() < 1e-15);
        assert!(hi - 1.0 < 5e-8);
        for &rho in &[50.0, 100.0, 700.0, 1e4] {
            let (_, hi) = eta_bounds(rho).unwrap();
            assert!(hi >= 1.0 && hi - 1.0 < 1e-15);
        }
        assert!(eta_bounds(-1.0).is_err());
    }

    #[test]
    fn eta_examples() {
        let q = QueueConfig::new(1.0, 5.0).unwrap();
        let m = ServiceDistribution::exponential(5.0).unwrap();
        let r = eta(&m, &q, DEFAULT_TOL).unwrap();
        assert_eq!(r.method, PeakednessMethod::ClosedForm);
        assert!((r.eta - 1.006_783_7).abs() < 5e-8);
        assert!(r.within_bounds());

        let q = QueueConfig::new(1.0, 0.5).unwrap();
        let g2 = ServiceDistribution::g2(1.0, 0.5).unwrap();
        assert!((eta(&g2, &q, DEFAULT_TOL).unwrap().eta - 2.463_363_6).abs() < 5e-8);

        let p = ServiceDistribution::power(0.5).unwrap();
        let q = QueueConfig::for_distribution(&p, 3.0).unwrap();
        let r = eta(&p, &q, DEFAULT_TOL).unwrap();
        assert_eq!(r.method, PeakednessMethod::Quadrature);
        assert!(r.quadrature_error <= DEFAULT_TOL);
        assert!(r.within_bounds());
    }

    #[test]
    fn g1_in_foreign_queue_uses_quadrature() {
        // same mean, different arrival rate: not the M/G1/∞ system
        let g1 = ServiceDistribution::g1(1.0, 1.0).unwrap();
        let q = QueueConfig::new(2.0, 2.0).unwrap();
        let r = eta(&g1, &q, DEFAULT_TOL).unwrap();
        assert_eq!(r.method, PeakednessMethod::Quadrature);
        assert!(r.within_bounds());
    }
}
