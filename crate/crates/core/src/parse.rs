//! Text formats accepted by the command line: distribution specs such as
//! `g1:lambda=1,rho=2` and evaluation grids such as `rho=0.5,1;family=D,M`.

use std::fmt;
use std::str::FromStr;

use crate::dist::{Family, QueueConfig, ServiceDistribution};
use crate::error::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_number(key: &str, text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_err(format!("`{key}` expects a number, got `{text}`")))?;
    if !v.is_finite() {
        return Err(parse_err(format!("`{key}` must be finite, got `{text}`")));
    }
    Ok(v)
}

fn parse_family(text: &str) -> Result<Family> {
    let t = text.trim();
    Family::from_tag(t)
        .or_else(|| Family::from_label(t))
        .ok_or_else(|| parse_err(format!("unknown distribution family `{t}`")))
}

/// A parsed but not yet validated distribution spec. Parameters left out
/// are filled from queue parameters by [`DistSpec::resolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistSpec {
    pub family: Family,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
}

impl DistSpec {
    pub fn new(family: Family) -> Self {
        DistSpec {
            family,
            alpha: None,
            c: None,
            lambda: None,
            rho: None,
        }
    }

    fn allowed_keys(family: Family) -> &'static [&'static str] {
        match family {
            Family::Deterministic | Family::Exponential => &["alpha"],
            Family::Power => &["c"],
            Family::G1 | Family::G2 => &["lambda", "rho"],
        }
    }

    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        if !Self::allowed_keys(self.family).contains(&key) {
            return None;
        }
        match key {
            "alpha" => Some(&mut self.alpha),
            "c" => Some(&mut self.c),
            "lambda" => Some(&mut self.lambda),
            "rho" => Some(&mut self.rho),
            _ => None,
        }
    }

    /// Builds the service law and the queue it runs in. Queue parameters
    /// not given are derived from `α = ρ/λ`; a conflict is an error.
    pub fn resolve(
        &self,
        lambda: Option<f64>,
        rho: Option<f64>,
    ) -> Result<(ServiceDistribution, QueueConfig)> {
        let d = match self.family {
            Family::Deterministic | Family::Exponential => {
                let alpha = match (self.alpha, lambda, rho) {
                    (Some(a), _, _) => a,
                    (None, Some(l), Some(r)) => r / l,
                    _ => {
                        return Err(parse_err(
                            "alpha missing: give it in the spec or pass both lambda and rho",
                        ))
                    }
                };
                if self.family == Family::Deterministic {
                    ServiceDistribution::deterministic(alpha)?
                } else {
                    ServiceDistribution::exponential(alpha)?
                }
            }
            Family::Power => {
                let c = self.c.ok_or_else(|| parse_err("pow requires c"))?;
                ServiceDistribution::power(c)?
            }
            Family::G1 | Family::G2 => {
                let l = self
                    .lambda
                    .or(lambda)
                    .ok_or_else(|| parse_err("lambda missing"))?;
                let r = self.rho.or(rho).ok_or_else(|| parse_err("rho missing"))?;
                if self.family == Family::G1 {
                    ServiceDistribution::g1(l, r)?
                } else {
                    ServiceDistribution::g2(l, r)?
                }
            }
        };
        let alpha = d.mean();
        let own = d.queue_parameters();
        let (l, r) = match (lambda, rho) {
            (Some(l), Some(r)) => (l, r),
            (Some(l), None) => (l, l * alpha),
            (None, Some(r)) => (r / alpha, r),
            (None, None) => {
                own.ok_or_else(|| parse_err("lambda or rho required for this distribution"))?
            }
        };
        let q = QueueConfig::new(l, r)?;
        q.ensure_matches(&d)?;
        Ok((d, q))
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, rest) = match s.split_once(':') {
            Some((t, r)) => (t, Some(r)),
            None => (s, None),
        };
        let mut spec = DistSpec::new(parse_family(tag)?);
        for item in rest.into_iter().flat_map(|r| r.split(',')) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got `{item}`")))?;
            let key = key.trim();
            let v = parse_number(key, value)?;
            let family = spec.family;
            let slot = spec.slot(key).ok_or_else(|| {
                parse_err(format!("`{key}` is not a parameter of {}", family.tag()))
            })?;
            if slot.replace(v).is_some() {
                return Err(parse_err(format!("`{key}` given twice")));
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.tag())?;
        let fields = [
            ("alpha", self.alpha),
            ("c", self.c),
            ("lambda", self.lambda),
            ("rho", self.rho),
        ];
        let mut sep = ':';
        for (key, value) in fields {
            if let Some(v) = value {
                write!(f, "{sep}{key}={v}")?;
                sep = ',';
            }
        }
        Ok(())
    }
}

/// Cartesian evaluation grid over traffic intensities, arrival rates and
/// families. Text form: `rho=0.5,1;lambda=1;family=D,M`, any key optional.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub rho: Vec<f64>,
    pub lambda: Vec<f64>,
    pub families: Vec<Family>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rho: vec![0.5, 1.0, 2.0, 5.0, 10.0, 20.0],
            lambda: vec![1.0],
            families: Family::ALL.to_vec(),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Err(parse_err("empty grid"));
        }
        let mut grid = GridSpec::default();
        let mut seen = Vec::new();
        for section in s.split(';').filter(|p| !p.trim().is_empty()) {
            let (key, values) = section
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=values, got `{section}`")))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(parse_err(format!("`{key}` given twice")));
            }
            seen.push(key);
            let items: Vec<&str> = values.split(',').collect();
            match key {
                "rho" | "lambda" => {
                    let nums = items
                        .iter()
                        .map(|v| {
                            let x = parse_number(key, v)?;
                            if x > 0.0 {
                                Ok(x)
                            } else {
                                Err(parse_err(format!("`{key}` values must be > 0, got `{v}`")))
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if key == "rho" {
                        grid.rho = nums;
                    } else {
                        grid.lambda = nums;
                    }
                }
                "family" => {
                    grid.families = items
                        .iter()
                        .map(|v| parse_family(v))
                        .collect::<Result<_>>()?
                }
                _ => return Err(parse_err(format!("unknown grid key `{key}`"))),
            }
        }
        Ok(grid)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let fams: Vec<&str> = self.families.iter().map(|f| f.label()).collect();
        write!(
            f,
            "rho={};lambda={};family={}",
            join(&self.rho),
            join(&self.lambda),
            fams.join(",")
        )
    }
}
