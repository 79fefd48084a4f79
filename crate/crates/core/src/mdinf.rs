//! Exact M/D/∞ results: closed-form transform, quadrature-free moments and
//! the busy-period density.
//!
//! The density uses the mixture reading `B = α + X₁ + … + X_N`, where `N` is
//! geometric with `P(N = n) = e^(−ρ)(1 − e^(−ρ))ⁿ` and the `Xᵢ` are i.i.d.
//! exponential(λ) truncated to `[0, α]`. `N = 0` is the atom of mass `e^(−ρ)`
//! at `t = α`.

use std::io::{self, Write};

use serde::Serialize;

use crate::dist::{Family, QueueConfig};
use crate::error::{check_positive, Error, Result};
use crate::moments::{moments_from_c, MomentTable};
use crate::numeric::{factorial, CompensatedSum};
use crate::transform::TransformValue;

/// Points per service time used when the caller does not choose a step.
pub const DEFAULT_STEPS_PER_ALPHA: usize = 512;

/// Coarsest accepted grid: `α / 16`.
pub const MIN_STEPS_PER_ALPHA: usize = 16;

/// `B̄ᴰ(s) = 1 + (1/λ)(s − (s + λ)s / (λe^(−(s+λ)α) + s))`, rearranged as
/// `1 + s·expm1(−(s+λ)α) / (λe^(−(s+λ)α) + s)` to avoid cancellation at small `s`.
pub fn md_laplace(s: f64, q: &QueueConfig) -> Result<TransformValue> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "transform argument must be finite and >= 0",
        });
    }
    if s == 0.0 {
        return Ok(TransformValue {
            s,
            value: 1.0,
            error_bound: 0.0,
        });
    }
    let lambda = q.lambda();
    let x = -(s + lambda) * q.alpha();
    let value = 1.0 + s * x.exp_m1() / (lambda * x.exp() + s);
    Ok(TransformValue {
        s,
        value,
        error_bound: 8.0 * f64::EPSILON,
    })
}

/// Regularized lower incomplete gamma `P(k + 1, x)` for integer `k`.
fn lower_gamma_regularized(k: usize, x: f64) -> f64 {
    if x > (k + 1) as f64 {
        // 1 − e^(−x) Σ_{j≤k} xʲ/j!, the partial sum being the small side
        let mut term = (-x).exp();
        let mut sum = term;
        for j in 1..=k {
            term *= x / j as f64;
            sum += term;
        }
        1.0 - sum
    } else {
        // e^(−x) Σ_{j>k} xʲ/j!, all terms positive
        let mut term = (-x).exp();
        for j in 1..=k + 1 {
            term *= x / j as f64;
        }
        let mut sum = CompensatedSum::new();
        let mut j = k + 1;
        while term > 1e-18 * sum.value().max(f64::MIN_POSITIVE) {
            sum.add(term);
            j += 1;
            term *= x / j as f64;
        }
        sum.value()
    }
}

/// `C⁽ᵏ⁾(0)` for deterministic service, `k = 0..count`.
///
/// These satisfy `C⁽⁰⁾ = 1 − e^(−ρ)` and, by parts,
/// `C⁽ⁿ⁾ = −e^(−ρ)(−α)ⁿ − (n/λ) C⁽ⁿ⁻¹⁾`; the forward recurrence loses digits
/// for small `ρ`, so the equivalent closed form
/// `(−1)ᵏ k! λ^(−k) P(k + 1, ρ)` is evaluated instead.
pub fn md_c_values(q: &QueueConfig, count: usize) -> Vec<f64> {
    let lambda = q.lambda();
    (0..count)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(k) / lambda.powi(k as i32) * lower_gamma_regularized(k, q.rho())
        })
        .collect()
}

/// Moments of the M/D/∞ busy period without quadrature.
pub fn md_moments(q: &QueueConfig, n_max: usize) -> Result<MomentTable> {
    if n_max == 0 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: 0.0,
            reason: "at least one moment is required",
        });
    }
    let order = n_max.max(2);
    let c = md_c_values(q, order);
    let raw = moments_from_c(&c, q.lambda(), q.rho(), order)?;
    MomentTable::from_raw(Family::Deterministic, q, n_max, raw, 0.0)
}

/// Tabulated M/D/∞ busy-period law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MDDensity {
    pub alpha: f64,
    pub rho: f64,
    pub lambda: f64,
    /// `P(B = α) = e^(−ρ)`.
    pub atom_mass: f64,
    /// Evenly spaced abscissae from `α` to at least `t_max`.
    pub grid: Vec<f64>,
    /// Continuous-part density at `grid`; the first value is the right limit at `α`.
    pub density_values: Vec<f64>,
    pub n_terms: usize,
    /// Probability not represented on the grid: mixture terms beyond
    /// `n_terms` plus retained mass lying past the last grid point.
    pub tail_mass_bound: f64,
}

impl MDDensity {
    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    fn trapezoid<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let h = self.step();
        let last = self.grid.len() - 1;
        let mut acc = CompensatedSum::new();
        for (i, (&t, &b)) in self.grid.iter().zip(&self.density_values).enumerate() {
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            acc.add(w * f(t, b));
        }
        h * acc.value()
    }

    /// Trapezoid integral of the continuous part.
    pub fn continuous_mass(&self) -> f64 {
        self.trapezoid(|_, b| b)
    }

    /// `atom + continuous + tail`; should be 1 up to discretization error.
    pub fn normalization(&self) -> f64 {
        self.atom_mass + self.continuous_mass() + self.tail_mass_bound
    }

    pub fn mean(&self) -> f64 {
        self.atom_mass * self.alpha + self.trapezoid(|t, b| t * b)
    }

    /// `e^(−sα) e^(−ρ) + ∫ e^(−st) b(t) dt` by the trapezoid rule.
    pub fn laplace(&self, s: f64) -> f64 {
        (-s * self.alpha).exp() * self.atom_mass + self.trapezoid(|t, b| (-s * t).exp() * b)
    }

    /// Two-column CSV `t,density` preceded by a comment line carrying the atom.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# atom_mass={},atom_at={}", self.atom_mass, self.alpha)?;
        writeln!(out, "t,density")?;
        for (t, b) in self.grid.iter().zip(&self.density_values) {
            writeln!(out, "{t},{b}")?;
        }
        Ok(())
    }

    /// `t_max = α + 20·E[N]·E[X]` where `E[N]E[X] = E[B] − α`.
    pub fn default_t_max(q: &QueueConfig) -> f64 {
        let mean_b = q.rho().exp_m1() / q.lambda();
        q.alpha() + 20.0 * (mean_b - q.alpha()).max(q.alpha())
    }
}

/// Busy-period density of M/D/∞ on `[α, t_max]` by repeated grid
/// convolution of the truncated-exponential increment density.
///
/// The step is snapped down so that `α` is an integer number of steps;
/// steps coarser than `α/16` are rejected. Mixture terms stop at the
/// smallest `n` with `(1 − e^(−ρ))^(n+1) < tol`.
pub fn md_density(q: &QueueConfig, t_max: f64, grid_step: f64, tol: f64) -> Result<MDDensity> {
    let alpha = q.alpha();
    let lambda = q.lambda();
    let rho = q.rho();
    check_positive("grid_step", grid_step)?;
    check_positive("tol", tol)?;
    if t_max <= alpha || !t_max.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_max",
            value: t_max,
            reason: "must exceed the service time alpha",
        });
    }
    if grid_step > alpha / MIN_STEPS_PER_ALPHA as f64 {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            value: grid_step,
            reason: "grid too coarse: step must be <= alpha/16",
        });
    }
    let m = (alpha / grid_step).ceil() as usize;
    let h = alpha / m as f64;
    let cells = ((t_max - alpha) / h).ceil() as usize;

    let busy = -(-rho).exp_m1(); // 1 − e^(−ρ)
    let atom_mass = (-rho).exp();
    let mut n_terms = 0usize;
    while busy.powi(n_terms as i32 + 1) >= tol {
        n_terms += 1;
    }

    // increment density on the lattice, trapezoid-weighted for convolution
    let fx: Vec<f64> = (0..=m)
        .map(|j| lambda * (-lambda * (j as f64 * h)).exp() / busy)
        .collect();
    let kernel: Vec<f64> = fx
        .iter()
        .enumerate()
        .map(|(j, f)| if j == 0 || j == m { 0.5 * h * f } else { h * f })
        .collect();

    let mut density = vec![0.0; cells + 1];
    let mut beyond = 0.0;
    // n-fold density at lattice nodes; jump nodes hold the mean of both limits
    let mut current: Vec<f64> = fx.clone();
    current[0] *= 0.5;
    current[m] *= 0.5;
    for n in 1..=n_terms {
        if n > 1 {
            current = convolve(&current, &kernel);
            // zero-length range at the origin; sums of two or more increments vanish there
            current[0] = 0.0;
        }
        let weight = atom_mass * busy.powi(n as i32);
        for (k, g) in current.iter().enumerate() {
            if k <= cells {
                density[k] += weight * g;
            } else {
                beyond += weight * h * g;
            }
        }
    }
    // the grid starts at α, so use the right limit there: only n = 1 jumps
    if n_terms >= 1 {
        density[0] += atom_mass * busy * 0.5 * fx[0];
    }
    let grid = (0..=cells).map(|k| alpha + k as f64 * h).collect();
    Ok(MDDensity {
        alpha,
        rho,
        lambda,
        atom_mass,
        grid,
        density_values: density,
        n_terms,
        tail_mass_bound: busy.powi(n_terms as i32 + 1) + beyond,
    })
}

fn convolve(signal: &[f64], kernel: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; signal.len() + kernel.len() - 1];
    for (i, s) in signal.iter().enumerate() {
        if *s == 0.0 {
            continue;
        }
        for (j, k) in kernel.iter().enumerate() {
            out[i + j] += s * k;
        }
    }
    out
}
