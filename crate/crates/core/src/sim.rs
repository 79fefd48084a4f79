//! Monte Carlo busy periods. Each period is simulated from its first arrival
//! as the length of the interval covered by overlapping service intervals,
//! so no idle periods or warm-up are involved.
//!
//! Work is split into fixed-size shards. Shard `i` draws from the ChaCha8
//! stream `i` of the root seed, which makes every result a function of
//! `(seed, n_periods)` alone, whatever the thread count.

use std::io::{self, Write};

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{Family, QueueConfig, ServiceDistribution};
use crate::error::{Error, Result};
use crate::transform::eta_from_peakedness;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;
pub const MIN_PERIODS: usize = 1000;
/// Per-period event budget before the run is declared divergent.
pub const MAX_EVENTS: u64 = 1_000_000_000;
pub const SHARD_SIZE: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub family: Family,
    pub rho: f64,
    pub lambda: f64,
    pub n_periods: usize,
    pub seed: u64,
    pub mean_b: f64,
    pub ci_mean: f64,
    pub var_b: f64,
    pub ci_var: f64,
    pub p_hat: f64,
    pub ci_p: f64,
    pub eta_hat: f64,
}

impl SimResult {
    pub fn mean_covers(&self, value: f64) -> bool {
        (self.mean_b - value).abs() <= self.ci_mean
    }

    pub fn p_covers(&self, value: f64) -> bool {
        (self.p_hat - value).abs() <= self.ci_p
    }

    pub fn var_covers(&self, value: f64) -> bool {
        (self.var_b - value).abs() <= self.ci_var
    }
}

/// Length of the busy period started by a customer with service
/// `first_service`, given the subsequent `(interarrival gap, service)` pairs.
/// Pairs are pulled only while the system is still busy.
pub fn cover_length<I>(first_service: f64, arrivals: I) -> Result<f64>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut end = first_service;
    let mut clock = 0.0;
    let mut events = 0u64;
    for (gap, service) in arrivals {
        clock += gap;
        if clock >= end {
            return Ok(end);
        }
        end = end.max(clock + service);
        events += 1;
        if events >= MAX_EVENTS {
            return Err(Error::Divergence { events });
        }
    }
    Ok(end)
}

/// One busy period of the M/G/∞ queue.
pub fn sample_busy_period<R: Rng + ?Sized>(
    d: &ServiceDistribution,
    q: &QueueConfig,
    rng: &mut R,
) -> Result<f64> {
    q.ensure_matches(d)?;
    draw(d, q.lambda(), rng)
}

fn draw<R: Rng + ?Sized>(d: &ServiceDistribution, lambda: f64, rng: &mut R) -> Result<f64> {
    let first = d.sample(rng);
    let mut rng = rng;
    let arrivals = std::iter::from_fn(move || {
        let u: f64 = rng.sample(Open01);
        let gap = -u.ln() / lambda;
        Some((gap, d.sample(&mut rng)))
    });
    cover_length(first, arrivals)
}

/// Streaming central moments up to order four, mergeable in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.merge(&Moments {
            n: 1.0,
            mean: x,
            ..Default::default()
        });
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n, o.n);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d_n = d / n;
        let m4 = self.m4
            + o.m4
            + d * d_n.powi(3) * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * o.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * o.m3 - nb * self.m3);
        let m3 = self.m3
            + o.m3
            + d * d_n * d_n * na * nb * (na - nb)
            + 3.0 * d_n * (na * o.m2 - nb * self.m2);
        let m2 = self.m2 + o.m2 + d * d_n * na * nb;
        self.mean += d_n * nb;
        self.n = n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
    }

    fn variance(&self) -> f64 {
        self.m2 / (self.n - 1.0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ShardStats {
    b: Moments,
    p: Moments,
}

fn check_periods(n: usize) -> Result<()> {
    if n < MIN_PERIODS {
        return Err(Error::InvalidParameter {
            name: "n_periods",
            value: n as f64,
            reason: "at least 1000 periods are needed for normal-approximation intervals",
        });
    }
    Ok(())
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

fn shard_len(n: usize, shard: usize) -> usize {
    SHARD_SIZE.min(n - shard * SHARD_SIZE)
}

/// Estimates of `E[B]`, `VAR[B]`, `p = E[e^(−B/α)]` and η from
/// `n_periods` independent busy periods.
pub fn estimate(
    d: &ServiceDistribution,
    q: &QueueConfig,
    n_periods: usize,
    seed: u64,
) -> Result<SimResult> {
    q.ensure_matches(d)?;
    check_periods(n_periods)?;
    let alpha = q.alpha();
    let shards = n_periods.div_ceil(SHARD_SIZE);
    let parts: Vec<Result<ShardStats>> = (0..shards)
        .into_par_iter()
        .map(|i| {
            let mut rng = shard_rng(seed, i);
            let mut st = ShardStats::default();
            for _ in 0..shard_len(n_periods, i) {
                let b = draw(d, q.lambda(), &mut rng)?;
                st.b.push(b);
                st.p.push((-b / alpha).exp());
            }
            Ok(st)
        })
        .collect();
    let mut total = ShardStats::default();
    for part in parts {
        let part = part?;
        total.b.merge(&part.b);
        total.p.merge(&part.p);
    }

    let n = total.b.n;
    let var_b = total.b.variance();
    let mu2 = total.b.m2 / n;
    let ci_var = Z_99 * ((total.b.m4 / n - mu2 * mu2).max(0.0) / n).sqrt();
    let p_hat = total.p.mean;
    Ok(SimResult {
        family: d.family(),
        rho: q.rho(),
        lambda: q.lambda(),
        n_periods,
        seed,
        mean_b: total.b.mean,
        ci_mean: Z_99 * (var_b / n).sqrt(),
        var_b,
        ci_var,
        p_hat,
        ci_p: Z_99 * (total.p.variance() / n).sqrt(),
        eta_hat: eta_from_peakedness(p_hat, q.rho()),
    })
}

/// Raw busy-period draws, in the same stream layout as [`estimate`].
pub fn busy_period_samples(
    d: &ServiceDistribution,
    q: &QueueConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    q.ensure_matches(d)?;
    let shards = n.div_ceil(SHARD_SIZE);
    let parts: Vec<Result<Vec<f64>>> = (0..shards)
        .into_par_iter()
        .map(|i| {
            let mut rng = shard_rng(seed, i);
            (0..shard_len(n, i))
                .map(|_| draw(d, q.lambda(), &mut rng))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Single-column CSV with a `busy_period` header.
pub fn write_samples_csv<W: Write>(samples: &[f64], mut out: W) -> io::Result<()> {
    writeln!(out, "busy_period")?;
    for b in samples {
        writeln!(out, "{b}")?;
    }
    Ok(())
}

/// Kolmogorov–Smirnov distance to the exponential law with the same mean.
pub fn ks_to_exponential(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = -(-x / mean).exp_m1();
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// `(KS distance to a fitted exponential, η estimate)` for judging how close
/// the busy period is to exponential in heavy traffic.
pub fn heavy_traffic_check(
    d: &ServiceDistribution,
    q: &QueueConfig,
    n_periods: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let samples = busy_period_samples(d, q, n_periods, seed)?;
    let alpha = q.alpha();
    let p_hat = samples.iter().map(|b| (-b / alpha).exp()).sum::<f64>() / samples.len() as f64;
    Ok((
        ks_to_exponential(&samples),
        eta_from_peakedness(p_hat, q.rho()),
    ))
}
