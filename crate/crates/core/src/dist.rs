//! Service-time laws with closed-form CDF, survival, integrated survival
//! `Λ(t) = ∫₀ᵗ [1 − G(v)] dv`, quantile and sampling.

use std::fmt;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_time, Error, Result};
use crate::quad::{self, Estimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "D")]
    Deterministic,
    #[serde(rename = "M")]
    Exponential,
    #[serde(rename = "P")]
    Power,
    G1,
    G2,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::G1,
        Family::G2,
        Family::Deterministic,
        Family::Exponential,
        Family::Power,
    ];

    /// Tag used in distribution spec strings (`det`, `exp`, `pow`, `g1`, `g2`).
    pub fn tag(self) -> &'static str {
        match self {
            Family::Deterministic => "det",
            Family::Exponential => "exp",
            Family::Power => "pow",
            Family::G1 => "g1",
            Family::G2 => "g2",
        }
    }

    /// Short label used in reports (`D`, `M`, `P`, `G1`, `G2`).
    pub fn label(self) -> &'static str {
        match self {
            Family::Deterministic => "D",
            Family::Exponential => "M",
            Family::Power => "P",
            Family::G1 => "G1",
            Family::G2 => "G2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.tag() == tag)
    }

    pub fn from_label(label: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.label() == label)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Arrival rate and traffic intensity of an M/G/∞ queue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueConfig {
    lambda: f64,
    rho: f64,
}

impl QueueConfig {
    pub fn new(lambda: f64, rho: f64) -> Result<Self> {
        Ok(Self {
            lambda: check_positive("lambda", lambda)?,
            rho: check_positive("rho", rho)?,
        })
    }

    /// Queue fed at rate `lambda` with service law `d`, so `rho = lambda * alpha`.
    pub fn for_distribution(d: &ServiceDistribution, lambda: f64) -> Result<Self> {
        Self::new(lambda, lambda * d.mean())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Mean service time `rho / lambda`.
    pub fn alpha(&self) -> f64 {
        self.rho / self.lambda
    }

    pub(crate) fn ensure_matches(&self, d: &ServiceDistribution) -> Result<()> {
        let a = self.alpha();
        if (d.mean() - a).abs() <= 1e-12 * a {
            Ok(())
        } else {
            Err(Error::Inconsistent {
                dist_alpha: d.mean(),
                queue_alpha: a,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Law {
    Deterministic { alpha: f64 },
    Exponential { alpha: f64 },
    Power { c: f64 },
    // e1 = e^ρ − 1, a = 1 − e^(−ρ)
    G1 { lambda: f64, rho: f64, e1: f64 },
    G2 { lambda: f64, rho: f64, a: f64 },
}

/// An immutable service-time law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceDistribution {
    law: Law,
}

impl ServiceDistribution {
    pub fn deterministic(alpha: f64) -> Result<Self> {
        let alpha = check_positive("alpha", alpha)?;
        Ok(Self {
            law: Law::Deterministic { alpha },
        })
    }

    pub fn exponential(alpha: f64) -> Result<Self> {
        let alpha = check_positive("alpha", alpha)?;
        Ok(Self {
            law: Law::Exponential { alpha },
        })
    }

    /// `G(t) = t^c` on `[0, 1]`, mean `c / (c + 1)`.
    pub fn power(c: f64) -> Result<Self> {
        let c = check_positive("c", c)?;
        Ok(Self {
            law: Law::Power { c },
        })
    }

    /// The law under which the busy period is exponential with an atom
    /// `e^(−ρ)` at the origin. Mean `rho / lambda`.
    pub fn g1(lambda: f64, rho: f64) -> Result<Self> {
        let q = QueueConfig::new(lambda, rho)?;
        Ok(Self {
            law: Law::G1 {
                lambda: q.lambda,
                rho: q.rho,
                e1: q.rho.exp_m1(),
            },
        })
    }

    /// The law under which the busy period is exactly exponential. Mean `rho / lambda`.
    pub fn g2(lambda: f64, rho: f64) -> Result<Self> {
        let q = QueueConfig::new(lambda, rho)?;
        Ok(Self {
            law: Law::G2 {
                lambda: q.lambda,
                rho: q.rho,
                a: -(-q.rho).exp_m1(),
            },
        })
    }

    /// A member of `family` whose mean matches `q.alpha()`. Power is rejected
    /// unless `q.alpha()` equals `c / (c + 1)` for the supplied `c`.
    pub fn for_queue(family: Family, q: &QueueConfig, power_c: f64) -> Result<Self> {
        let d = match family {
            Family::Deterministic => Self::deterministic(q.alpha())?,
            Family::Exponential => Self::exponential(q.alpha())?,
            Family::Power => Self::power(power_c)?,
            Family::G1 => Self::g1(q.lambda, q.rho)?,
            Family::G2 => Self::g2(q.lambda, q.rho)?,
        };
        q.ensure_matches(&d)?;
        Ok(d)
    }

    pub fn family(&self) -> Family {
        match self.law {
            Law::Deterministic { .. } => Family::Deterministic,
            Law::Exponential { .. } => Family::Exponential,
            Law::Power { .. } => Family::Power,
            Law::G1 { .. } => Family::G1,
            Law::G2 { .. } => Family::G2,
        }
    }

    /// Mean service time α.
    pub fn mean(&self) -> f64 {
        match self.law {
            Law::Deterministic { alpha } | Law::Exponential { alpha } => alpha,
            Law::Power { c } => c / (c + 1.0),
            Law::G1 { lambda, rho, .. } | Law::G2 { lambda, rho, .. } => rho / lambda,
        }
    }

    /// Power exponent, for the power law only.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.law {
            Law::Power { c } => Some(c),
            _ => None,
        }
    }

    /// `(lambda, rho)` parameters of G1/G2.
    pub fn queue_parameters(&self) -> Option<(f64, f64)> {
        match self.law {
            Law::G1 { lambda, rho, .. } | Law::G2 { lambda, rho, .. } => Some((lambda, rho)),
            _ => None,
        }
    }

    /// Right end of the support, if finite.
    pub fn support_end(&self) -> Option<f64> {
        match self.law {
            Law::Deterministic { alpha } => Some(alpha),
            Law::Power { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Points where the survival function or its derivative is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.support_end().into_iter().collect()
    }

    /// `(C, r)` with `1 − G(t) ≤ C·e^(−r t)` for all `t ≥ 0`; `None` for
    /// finite support.
    pub fn survival_envelope(&self) -> Option<(f64, f64)> {
        match self.law {
            Law::Exponential { alpha } => Some((1.0, 1.0 / alpha)),
            Law::G1 { lambda, e1, .. } => Some((e1, lambda)),
            Law::G2 { lambda, rho, a } => Some((rho.exp(), lambda / a)),
            Law::Deterministic { .. } | Law::Power { .. } => None,
        }
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self.law {
            Law::Deterministic { alpha } => {
                if t < alpha {
                    0.0
                } else {
                    1.0
                }
            }
            Law::Exponential { alpha } => -(-t / alpha).exp_m1(),
            Law::Power { c } => {
                if t >= 1.0 {
                    1.0
                } else {
                    t.powf(c)
                }
            }
            Law::G1 { lambda, e1, .. } => 1.0 / (1.0 + e1 * (-lambda * t).exp()),
            Law::G2 { .. } => {
                let (z, a, rho) = self.g2_z(t);
                ((1.0 - (-rho).exp() * z) / (1.0 + a * z)).clamp(0.0, 1.0)
            }
        })
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.survival_unchecked(t))
    }

    pub(crate) fn survival_unchecked(&self, t: f64) -> f64 {
        match self.law {
            Law::Deterministic { alpha } => {
                if t < alpha {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Exponential { alpha } => (-t / alpha).exp(),
            Law::Power { c } => {
                if t >= 1.0 {
                    0.0
                } else {
                    1.0 - t.powf(c)
                }
            }
            Law::G1 { lambda, e1, .. } => {
                let y = e1 * (-lambda * t).exp();
                y / (1.0 + y)
            }
            Law::G2 { .. } => {
                let (z, a, _) = self.g2_z(t);
                z / (1.0 + a * z)
            }
        }
    }

    /// `Λ(t) = ∫₀ᵗ [1 − G(v)] dv`, increasing to the mean.
    pub fn integrated_survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.integrated_survival_unchecked(t))
    }

    pub(crate) fn integrated_survival_unchecked(&self, t: f64) -> f64 {
        match self.law {
            Law::Deterministic { alpha } => t.min(alpha),
            Law::Exponential { alpha } => -alpha * (-t / alpha).exp_m1(),
            Law::Power { c } => {
                if t >= 1.0 {
                    c / (c + 1.0)
                } else {
                    t - t.powf(c + 1.0) / (c + 1.0)
                }
            }
            Law::G1 { lambda, rho, e1 } => {
                let y = e1 * (-lambda * t).exp();
                (rho - y.ln_1p()) / lambda
            }
            Law::G2 { lambda, rho, .. } => {
                let (z, a, _) = self.g2_z(t);
                (rho - (a * z).ln_1p()) / lambda
            }
        }
    }

    /// `α − Λ(t) = ∫_t^∞ [1 − G(v)] dv`, evaluated without cancellation.
    pub fn residual_integrated_survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.residual_unchecked(t))
    }

    pub(crate) fn residual_unchecked(&self, t: f64) -> f64 {
        match self.law {
            Law::Deterministic { alpha } => (alpha - t).max(0.0),
            Law::Exponential { alpha } => alpha * (-t / alpha).exp(),
            Law::Power { c } => {
                if t >= 1.0 {
                    0.0
                } else {
                    c / (c + 1.0) - t + t.powf(c + 1.0) / (c + 1.0)
                }
            }
            Law::G1 { lambda, e1, .. } => (e1 * (-lambda * t).exp()).ln_1p() / lambda,
            Law::G2 { lambda, .. } => {
                let (z, a, _) = self.g2_z(t);
                (a * z).ln_1p() / lambda
            }
        }
    }

    /// `z = e^(ρ − λt/a)` with `a = 1 − e^(−ρ)`; G2's survival is `z / (1 + a z)`.
    fn g2_z(&self, t: f64) -> (f64, f64, f64) {
        match self.law {
            Law::G2 { lambda, rho, a } => ((rho - lambda * t / a).exp(), a, rho),
            _ => unreachable!("g2_z on non-G2 law"),
        }
    }

    /// Probability mass at `t = 0`.
    pub fn atom_at_zero(&self) -> f64 {
        match self.law {
            Law::G1 { rho, .. } => (-rho).exp(),
            _ => 0.0,
        }
    }

    /// `inf { t : G(t) ≥ u }` for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::InvalidParameter {
                name: "u",
                value: u,
                reason: "probability must lie in [0, 1)",
            });
        }
        Ok(match self.law {
            Law::Deterministic { alpha } => {
                if u == 0.0 {
                    0.0
                } else {
                    alpha
                }
            }
            Law::Exponential { alpha } => -alpha * (-u).ln_1p(),
            Law::Power { c } => u.powf(1.0 / c),
            Law::G1 { lambda, rho, e1 } => {
                if u <= (-rho).exp() {
                    0.0
                } else {
                    (u * e1 / (1.0 - u)).ln() / lambda
                }
            }
            Law::G2 { lambda, rho, a } => a / lambda * (rho.exp() * u / (1.0 - u)).ln_1p(),
        })
    }

    /// One draw by inversion of an open-interval uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u).expect("Open01 lies in (0, 1)")
    }

    /// `E[S²] = 2∫₀^∞ t [1 − G(t)] dt`, by quadrature for the laws without a
    /// tabulated variance.
    pub fn second_moment(&self, tol: f64) -> Result<Estimate> {
        match self.law {
            Law::Deterministic { alpha } => Ok(Estimate {
                value: alpha * alpha,
                error: 0.0,
            }),
            Law::Exponential { alpha } => Ok(Estimate {
                value: 2.0 * alpha * alpha,
                error: 0.0,
            }),
            _ => {
                let f = |t: f64| 2.0 * t * self.survival_unchecked(t);
                if let Some(end) = self.support_end() {
                    quad::integrate(f, 0.0, end, tol)
                } else {
                    let (c, r) = self.survival_envelope().expect("infinite support");
                    // ∫_T^∞ 2 t C e^(−rt) dt = 2C e^(−rT) (rT + 1) / r²
                    let tail = |t: f64| 2.0 * c * (-r * t).exp() * (r * t + 1.0) / (r * r);
                    quad::integrate_semi_infinite(f, &[], self.mean(), tail, tol)
                }
            }
        }
    }

    /// Service coefficient of variation γ_s.
    pub fn coefficient_of_variation(&self, tol: f64) -> Result<f64> {
        let a = self.mean();
        let m2 = self.second_moment(tol * a * a)?;
        Ok((m2.value / (a * a) - 1.0).max(0.0).sqrt())
    }
}

impl fmt::Display for ServiceDistribution {
    /// Renders the spec-string form, e.g. `g1:lambda=1,rho=2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.law {
            Law::Deterministic { alpha } => write!(f, "det:alpha={alpha}"),
            Law::Exponential { alpha } => write!(f, "exp:alpha={alpha}"),
            Law::Power { c } => write!(f, "pow:c={c}"),
            Law::G1 { lambda, rho, .. } => write!(f, "g1:lambda={lambda},rho={rho}"),
            Law::G2 { lambda, rho, .. } => write!(f, "g2:lambda={lambda},rho={rho}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalog(lambda: f64, rho: f64) -> Vec<ServiceDistribution> {
        let alpha = rho / lambda;
        vec![
            ServiceDistribution::deterministic(alpha).unwrap(),
            ServiceDistribution::exponential(alpha).unwrap(),
            ServiceDistribution::power(0.5).unwrap(),
            ServiceDistribution::g1(lambda, rho).unwrap(),
            ServiceDistribution::g2(lambda, rho).unwrap(),
        ]
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cdf_examples() {
        let d = ServiceDistribution::deterministic(1.0).unwrap();
        assert_eq!(d.cdf(0.5).unwrap(), 0.0);
        assert_eq!(d.cdf(1.0).unwrap(), 1.0);
        let g2 = ServiceDistribution::g2(1.0, 1.0).unwrap();
        assert_eq!(g2.cdf(0.0).unwrap(), 0.0);
        let g1 = ServiceDistribution::g1(1.0, 1.0).unwrap();
        assert!(close(g1.cdf(0.0).unwrap(), 0.367_879_441_171_442_3, 1e-15));
        assert!(d.cdf(-1.0).is_err());
        assert!(d.integrated_survival(-0.1).is_err());
    }

    #[test]
    fn g1_atom_is_exact() {
        for &rho in &[0.5, 1.0, 5.0, 10.0] {
            let g1 = ServiceDistribution::g1(2.0, rho).unwrap();
            assert!(
                (g1.cdf(0.0).unwrap() - (-rho).exp()).abs()
                    <= 1e-15 * (-rho).exp().max(1e-300) + 1e-17
            );
            assert_eq!(g1.atom_at_zero(), (-rho).exp());
        }
    }

    #[test]
    fn integrated_survival_examples() {
        let d = ServiceDistribution::deterministic(1.0).unwrap();
        assert_eq!(d.integrated_survival(2.0).unwrap(), 1.0);
        let p = ServiceDistribution::power(0.5).unwrap();
        assert!(close(p.integrated_survival(1.0).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(p.mean(), 1.0 / 3.0, 1e-15));
        let e = ServiceDistribution::exponential(1.0).unwrap();
        assert!(close(e.integrated_survival(800.0).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn corrected_g1_has_mean_alpha() {
        // mean = ∫ survival; quadrature independent of the closed-form Λ
        for &(lambda, rho) in &[(1.0, 1.0), (0.5, 5.0), (2.0, 0.5), (1.0, 10.0)] {
            let g1 = ServiceDistribution::g1(lambda, rho).unwrap();
            let (c, r) = g1.survival_envelope().unwrap();
            let m = quad::integrate_semi_infinite(
                |t| g1.survival_unchecked(t),
                &[],
                1.0,
                |t| c * (-r * t).exp() / r,
                1e-12,
            )
            .unwrap();
            assert!(((m.value - rho / lambda) / (rho / lambda)).abs() < 1e-10);
        }
    }

    #[test]
    fn quantile_examples() {
        let e = ServiceDistribution::exponential(1.0).unwrap();
        assert!(close(
            e.quantile(1.0 - (-1.0f64).exp()).unwrap(),
            1.0,
            1e-14
        ));
        let g1 = ServiceDistribution::g1(1.0, 1.0).unwrap();
        assert_eq!(g1.quantile(0.2).unwrap(), 0.0);
        let p = ServiceDistribution::power(0.5).unwrap();
        let q = p.quantile(0.25).unwrap();
        assert!(close(q, 0.0625, 1e-15));
        assert!(close(p.cdf(q).unwrap(), 0.25, 1e-15));
        assert!(e.quantile(1.0).is_err());
        assert!(e.quantile(-0.1).is_err());
        assert!(e.quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_inverts_cdf_on_continuous_part() {
        for &(lambda, rho) in &[(0.5, 0.5), (1.0, 1.0), (2.0, 5.0), (1.0, 10.0)] {
            for d in catalog(lambda, rho) {
                if d.family() == Family::Deterministic {
                    continue;
                }
                let atom = d.atom_at_zero();
                for i in 1..100 {
                    let u = i as f64 / 100.0;
                    if u <= atom + 1e-9 {
                        continue;
                    }
                    let t = d.quantile(u).unwrap();
                    let back = d.cdf(t).unwrap();
                    assert!(close(back, u, 1e-10), "{d}: u={u} t={t} cdf={back}");
                }
            }
        }
    }

    #[test]
    fn cdf_monotone_and_integrated_survival_matches_quadrature() {
        for &rho in &[0.5, 1.0, 5.0, 10.0] {
            for &lambda in &[0.5, 1.0, 2.0] {
                for d in catalog(lambda, rho) {
                    let alpha = d.mean();
                    let horizon = d.support_end().unwrap_or(60.0 * alpha * (1.0 + rho));
                    let mut prev = 0.0;
                    for i in 0..=1000 {
                        let t = horizon * 1.2 * i as f64 / 1000.0;
                        let g = d.cdf(t).unwrap();
                        assert!((0.0..=1.0).contains(&g));
                        assert!(g >= prev, "{d}: cdf decreased at {t}");
                        prev = g;
                    }
                    let bps = d.breakpoints();
                    let total = match d.survival_envelope() {
                        None => quad::integrate_pieces(
                            |t| d.survival_unchecked(t),
                            &quad::pieces(&bps, horizon),
                            1e-12 * alpha,
                        )
                        .unwrap(),
                        Some((c, r)) => quad::integrate_semi_infinite(
                            |t| d.survival_unchecked(t),
                            &[],
                            alpha,
                            |t| c * (-r * t).exp() / r,
                            1e-12 * alpha,
                        )
                        .unwrap(),
                    };
                    assert!(
                        ((total.value - alpha) / alpha).abs() < 1e-8,
                        "{d}: {}",
                        total.value
                    );
                    for i in 1..=20 {
                        let t = horizon * i as f64 / 16.0;
                        let numeric = quad::integrate_pieces(
                            |v| d.survival_unchecked(v),
                            &quad::pieces(&bps, t),
                            1e-11 * alpha,
                        )
                        .unwrap();
                        let closed = d.integrated_survival(t).unwrap();
                        assert!(
                            ((closed - numeric.value) / closed).abs() < 1e-8,
                            "{d}: t={t} closed={closed} numeric={}",
                            numeric.value
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn residual_complements_integrated_survival() {
        for d in catalog(1.0, 2.0).into_iter().chain(catalog(0.5, 5.0)) {
            for i in 0..50 {
                let t = i as f64 * 0.3;
                let sum =
                    d.integrated_survival(t).unwrap() + d.residual_integrated_survival(t).unwrap();
                assert!((sum - d.mean()).abs() < 1e-13 * d.mean(), "{d} t={t}");
            }
        }
    }

    #[test]
    fn sampling_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = ServiceDistribution::deterministic(2.0).unwrap();
        for _ in 0..1000 {
            assert_eq!(d.sample(&mut rng), 2.0);
        }
        for (d, mean, sd) in [
            (ServiceDistribution::exponential(1.0).unwrap(), 1.0, 1.0),
            // Var = c/(c+2) − α² = 0.2 − 1/9
            (
                ServiceDistribution::power(0.5).unwrap(),
                1.0 / 3.0,
                (0.2f64 - 1.0 / 9.0).sqrt(),
            ),
        ] {
            let n = 1_000_000;
            let s: f64 = (0..n).map(|_| d.sample(&mut rng)).sum();
            let m = s / n as f64;
            assert!((m - mean).abs() < 4.0 * sd / (n as f64).sqrt(), "{d}: {m}");
        }
    }

    #[test]
    fn coefficient_of_variation() {
        assert_eq!(
            ServiceDistribution::deterministic(3.0)
                .unwrap()
                .coefficient_of_variation(1e-9)
                .unwrap(),
            0.0
        );
        assert_eq!(
            ServiceDistribution::exponential(3.0)
                .unwrap()
                .coefficient_of_variation(1e-9)
                .unwrap(),
            1.0
        );
        // power law: γ² = 1 / (c (c + 2))
        for &c in &[0.5, 1.0, 3.0] {
            let g = ServiceDistribution::power(c)
                .unwrap()
                .coefficient_of_variation(1e-11)
                .unwrap();
            assert!((g * g - 1.0 / (c * (c + 2.0))).abs() < 1e-9);
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(ServiceDistribution::deterministic(0.0).is_err());
        assert!(ServiceDistribution::exponential(-1.0).is_err());
        assert!(ServiceDistribution::power(f64::NAN).is_err());
        assert!(ServiceDistribution::g1(0.0, 1.0).is_err());
        assert!(ServiceDistribution::g2(1.0, -1.0).is_err());
        let q = QueueConfig::new(1.0, 1.0).unwrap();
        assert!(ServiceDistribution::for_queue(Family::Power, &q, 0.5).is_err());
        let q = QueueConfig::new(3.0, 1.0).unwrap();
        assert!(ServiceDistribution::for_queue(Family::Power, &q, 0.5).is_ok());
    }
}
