use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("distribution mean {dist_alpha} is inconsistent with queue alpha = rho/lambda = {queue_alpha}")]
    Inconsistent { dist_alpha: f64, queue_alpha: f64 },

    #[error("requested accuracy {requested:e} not reached; achieved error bound {achieved:e}")]
    Accuracy { requested: f64, achieved: f64 },

    #[error("moment recurrence at order {order} lost {digits_lost:.1} significant digits")]
    Cancellation { order: usize, digits_lost: f64 },

    #[error("busy period exceeded {events} events without terminating")]
    Divergence { events: u64 },

    #[error("no closed-form peakedness for family {0}")]
    NoClosedForm(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn check_time(t: f64) -> Result<f64> {
    if t >= 0.0 && !t.is_nan() {
        Ok(t)
    } else {
        Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "time must be >= 0",
        })
    }
}
