//! Reports behind the `mginf` binary: the η table, the bound suites and the
//! CSV/JSON writers shared by every subcommand.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{Family, QueueConfig, ServiceDistribution};
use crate::error::{Error, Result};
use crate::mdinf::MDDensity;
use crate::moments::{self, MomentTable};
use crate::parse::GridSpec;
use crate::sim::SimResult;
use crate::transform::{self, EtaReport};

pub const TABLE1_RHO: [f64; 6] = [0.5, 1.0, 5.0, 10.0, 15.0, 20.0];

/// Power-law exponent used for the `P` row.
pub const TABLE1_POWER_C: f64 = 0.5;

/// Reference η values, rows in [`Family::ALL`] order, columns in [`TABLE1_RHO`] order.
pub const TABLE1_REFERENCE: [[f64; 6]; 5] = [
    [
        3.3469730, 1.7488465, 1.0013731, 1.0000002, 1.0000000, 1.0000000,
    ],
    [
        2.4633636, 1.5121659, 1.0011518, 1.0000002, 1.0000000, 1.0000000,
    ],
    [
        2.0123054, 1.3319113, 1.0005158, 1.0000001, 1.0000000, 1.0000000,
    ],
    [
        2.5414941, 1.5819767, 1.0067837, 1.0000454, 1.0000000, 1.0000000,
    ],
    [
        2.4721612, 1.5747122, 1.0120525, 1.0001526, 1.0000000, 1.0000000,
    ],
];

/// Agreement required for rows with a closed-form peakedness.
pub const CLOSED_FORM_TOL: f64 = 5e-7;
/// Agreement required for the quadrature-only `P` row.
pub const POWER_ROW_TOL: f64 = 1e-3;

/// Exit status for a failed check.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for unusable input.
pub const EXIT_INVALID_INPUT: i32 = 2;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. } | Error::Inconsistent { .. } | Error::Parse(_) => {
            EXIT_INVALID_INPUT
        }
        _ => EXIT_CHECK_FAILED,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Table1,
    EtaBounds,
    Nbue,
    ExponentialOrder,
    Sathe,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Table1 => "table1",
            Check::EtaBounds => "eta_bounds",
            Check::Nbue => "nbue",
            Check::ExponentialOrder => "exponential_order",
            Check::Sathe => "sathe",
        }
    }
}

/// One pass/fail line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub check: Check,
    pub family: Family,
    pub rho: f64,
    pub lambda: f64,
    pub value: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub pass: bool,
}

impl Row {
    fn failed(check: Check, family: Family, rho: f64, lambda: f64, reference: f64) -> Row {
        Row {
            check,
            family,
            rho,
            lambda,
            value: f64::NAN,
            reference,
            abs_error: f64::NAN,
            pass: false,
        }
    }
}

pub fn all_pass(rows: &[Row]) -> bool {
    rows.iter().all(|r| r.pass)
}

/// The queue and service law behind one table cell. `D` and `M` use `λ = 1`;
/// `G1` and `G2` are built on the queue's own `(λ, ρ)` with `λ = 1`; `P`
/// fixes the law `t^c` on `[0, 1]` and sets `λ = ρ/α`.
pub fn table1_case(family: Family, rho: f64) -> Result<(ServiceDistribution, QueueConfig)> {
    let c = TABLE1_POWER_C;
    let lambda = match family {
        Family::Power => rho * (c + 1.0) / c,
        _ => 1.0,
    };
    let q = QueueConfig::new(lambda, rho)?;
    let d = ServiceDistribution::for_queue(family, &q, c)?;
    Ok((d, q))
}

pub fn table1_tolerance(family: Family) -> f64 {
    if family == Family::Power {
        POWER_ROW_TOL
    } else {
        CLOSED_FORM_TOL
    }
}

/// η for one table cell at quadrature tolerance `tol`.
pub fn table1_eta(family: Family, rho: f64, tol: f64) -> Result<EtaReport> {
    let (d, q) = table1_case(family, rho)?;
    transform::eta(&d, &q, tol)
}

/// All 30 cells, family-major and ρ-minor. A failed evaluation yields a
/// failed row rather than aborting the table.
pub fn run_table1(tol: f64) -> Vec<Row> {
    let cells: Vec<(usize, usize)> = (0..Family::ALL.len())
        .flat_map(|i| (0..TABLE1_RHO.len()).map(move |j| (i, j)))
        .collect();
    cells
        .par_iter()
        .map(|&(i, j)| {
            let family = Family::ALL[i];
            let rho = TABLE1_RHO[j];
            let reference = TABLE1_REFERENCE[i][j];
            match table1_eta(family, rho, tol) {
                Ok(r) => {
                    let abs_error = (r.eta - reference).abs();
                    Row {
                        check: Check::Table1,
                        family,
                        rho,
                        lambda: r.lambda,
                        value: r.eta,
                        reference,
                        abs_error,
                        pass: abs_error <= table1_tolerance(family),
                    }
                }
                Err(_) => Row::failed(Check::Table1, family, rho, f64::NAN, reference),
            }
        })
        .collect()
}

/// Queue and law for a bounds grid point. The power law has a fixed mean,
/// so its `λ` is `ρ/α` whatever the grid says.
pub fn grid_case(
    family: Family,
    lambda: f64,
    rho: f64,
) -> Result<(ServiceDistribution, QueueConfig)> {
    if family == Family::Power {
        return table1_case(family, rho);
    }
    let q = QueueConfig::new(lambda, rho)?;
    Ok((
        ServiceDistribution::for_queue(family, &q, TABLE1_POWER_C)?,
        q,
    ))
}

/// Grid arrival rates that give distinct queues for `family`.
fn lambdas_for(family: Family, grid: &GridSpec) -> &[f64] {
    if family == Family::Power {
        &grid.lambda[..1.min(grid.lambda.len())]
    } else {
        &grid.lambda
    }
}

enum Task {
    Eta(Family, f64, f64),
    Nbue(f64, f64),
    ExpPair(f64, f64, f64),
    Sathe(Family, f64, f64),
}

fn eval_task(task: &Task, tol: f64) -> Row {
    match *task {
        Task::Eta(family, lambda, rho) => {
            let run = || -> Result<EtaReport> {
                let (d, q) = grid_case(family, lambda, rho)?;
                transform::eta(&d, &q, tol)
            };
            match run() {
                Ok(r) => {
                    let reference = if r.eta - r.eta_lower < r.eta_upper - r.eta {
                        r.eta_lower
                    } else {
                        r.eta_upper
                    };
                    Row {
                        check: Check::EtaBounds,
                        family,
                        rho,
                        lambda: r.lambda,
                        value: r.eta,
                        reference,
                        abs_error: (r.eta - reference).abs(),
                        pass: r.within_bounds(),
                    }
                }
                Err(_) => Row::failed(Check::EtaBounds, family, rho, lambda, f64::NAN),
            }
        }
        Task::Nbue(lambda, rho) => {
            let run = || -> Result<(f64, f64, f64)> {
                let q = QueueConfig::new(lambda, rho)?;
                let d = transform::peakedness(
                    &ServiceDistribution::deterministic(q.alpha())?,
                    &q,
                    tol,
                )?;
                let m =
                    transform::peakedness(&ServiceDistribution::exponential(q.alpha())?, &q, tol)?;
                Ok((d.value, m.value, d.error_bound + m.error_bound))
            };
            match run() {
                Ok((pd, pm, err)) => Row {
                    check: Check::Nbue,
                    family: Family::Deterministic,
                    rho,
                    lambda,
                    value: pd,
                    reference: pm,
                    abs_error: (pm - pd).abs(),
                    pass: pd <= pm + err,
                },
                Err(_) => Row::failed(Check::Nbue, Family::Deterministic, rho, lambda, f64::NAN),
            }
        }
        Task::ExpPair(lambda, rho1, rho2) => {
            // means α₁ = ρ₁/λ < α₂ = ρ₂/λ at a common arrival rate
            let p_at = |rho: f64| -> Result<(f64, f64)> {
                let q = QueueConfig::new(lambda, rho)?;
                let t =
                    transform::peakedness(&ServiceDistribution::exponential(q.alpha())?, &q, tol)?;
                Ok((t.value, t.error_bound))
            };
            match p_at(rho1).and_then(|a| Ok((a, p_at(rho2)?))) {
                Ok(((p1, e1), (p2, e2))) => Row {
                    check: Check::ExponentialOrder,
                    family: Family::Exponential,
                    rho: rho1,
                    lambda,
                    value: p1,
                    reference: p2,
                    abs_error: (p1 - p2).abs(),
                    pass: p1 + e1 + e2 > p2,
                },
                Err(_) => Row::failed(
                    Check::ExponentialOrder,
                    Family::Exponential,
                    rho1,
                    lambda,
                    f64::NAN,
                ),
            }
        }
        Task::Sathe(family, lambda, rho) => {
            let run = || -> Result<MomentTable> {
                let (d, q) = grid_case(family, lambda, rho)?;
                moments::busy_moments(&d, &q, 2, moments::DEFAULT_TOL)
            };
            match run() {
                Ok(t) => {
                    let (lo, hi) = (t.sathe_lower, t.sathe_upper);
                    let reference = if t.variance - lo < hi - t.variance {
                        lo
                    } else {
                        hi
                    };
                    Row {
                        check: Check::Sathe,
                        family,
                        rho,
                        lambda: t.lambda,
                        value: t.variance,
                        reference,
                        abs_error: (t.variance - reference).abs(),
                        pass: t.sathe_contains(1e-9),
                    }
                }
                Err(_) => Row::failed(Check::Sathe, family, rho, lambda, f64::NAN),
            }
        }
    }
}

/// Every bound suite over `grid`: η bounds per family, the deterministic
/// versus exponential ordering, the exponential ordering across consecutive
/// ρ at fixed λ, and variance containment in Sathe's interval.
pub fn run_bounds(grid: &GridSpec, tol: f64) -> Vec<Row> {
    let mut rhos = grid.rho.clone();
    rhos.sort_by(f64::total_cmp);
    rhos.dedup();
    let mut tasks = Vec::new();
    for &family in &grid.families {
        for &lambda in lambdas_for(family, grid) {
            for &rho in &rhos {
                tasks.push(Task::Eta(family, lambda, rho));
            }
        }
    }
    if grid.families.contains(&Family::Deterministic)
        || grid.families.contains(&Family::Exponential)
    {
        for &lambda in &grid.lambda {
            for &rho in &rhos {
                tasks.push(Task::Nbue(lambda, rho));
            }
        }
    }
    if grid.families.contains(&Family::Exponential) {
        for &lambda in &grid.lambda {
            for w in rhos.windows(2) {
                tasks.push(Task::ExpPair(lambda, w[0], w[1]));
            }
        }
    }
    for &family in &grid.families {
        for &lambda in lambdas_for(family, grid) {
            for &rho in &rhos {
                tasks.push(Task::Sathe(family, lambda, rho));
            }
        }
    }
    tasks.par_iter().map(|t| eval_task(t, tol)).collect()
}

/// Scalars of fixed-width tabular output.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.7}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// A record type that can be printed as a CSV row or a JSON line.
pub trait Record: Serialize {
    fn columns() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

impl Record for Row {
    fn columns() -> &'static [&'static str] {
        &[
            "check",
            "family",
            "rho",
            "lambda",
            "value",
            "reference",
            "abs_error",
            "pass",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.check.name().into()),
            Cell::Text(self.family.label().into()),
            Cell::Num(self.rho),
            Cell::Num(self.lambda),
            Cell::Num(self.value),
            Cell::Num(self.reference),
            Cell::Num(self.abs_error),
            Cell::Bool(self.pass),
        ]
    }
}

impl Record for EtaReport {
    fn columns() -> &'static [&'static str] {
        &[
            "family",
            "rho",
            "lambda",
            "p",
            "eta",
            "eta_lower",
            "eta_upper",
            "quadrature_error",
            "method",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        let method = match self.method {
            transform::PeakednessMethod::ClosedForm => "closed_form",
            transform::PeakednessMethod::Quadrature => "quadrature",
        };
        vec![
            Cell::Text(self.family.label().into()),
            Cell::Num(self.rho),
            Cell::Num(self.lambda),
            Cell::Num(self.p),
            Cell::Num(self.eta),
            Cell::Num(self.eta_lower),
            Cell::Num(self.eta_upper),
            Cell::Text(format!("{:e}", self.quadrature_error)),
            Cell::Text(method.into()),
        ]
    }
}

/// One named quantity from a [`MomentTable`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub family: Family,
    pub rho: f64,
    pub lambda: f64,
    pub quantity: String,
    pub value: f64,
}

pub fn moment_rows(t: &MomentTable) -> Vec<MomentRow> {
    let row = |quantity: String, value| MomentRow {
        family: t.family,
        rho: t.rho,
        lambda: t.lambda,
        quantity,
        value,
    };
    let mut rows: Vec<MomentRow> = t
        .raw_moments
        .iter()
        .enumerate()
        .map(|(k, m)| row(format!("E[B^{}]", k + 1), *m))
        .collect();
    rows.push(row("variance".into(), t.variance));
    rows.push(row("sathe_lower".into(), t.sathe_lower));
    rows.push(row("sathe_upper".into(), t.sathe_upper));
    rows.push(row("gamma_s".into(), t.gamma_s));
    rows
}

impl Record for MomentRow {
    fn columns() -> &'static [&'static str] {
        &["family", "rho", "lambda", "quantity", "value"]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.family.label().into()),
            Cell::Num(self.rho),
            Cell::Num(self.lambda),
            Cell::Text(self.quantity.clone()),
            Cell::Num(self.value),
        ]
    }
}

impl Record for SimResult {
    fn columns() -> &'static [&'static str] {
        &[
            "family",
            "rho",
            "lambda",
            "n_periods",
            "seed",
            "mean_b",
            "ci_mean",
            "var_b",
            "ci_var",
            "p_hat",
            "ci_p",
            "eta_hat",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.family.label().into()),
            Cell::Num(self.rho),
            Cell::Num(self.lambda),
            Cell::Int(self.n_periods as u64),
            Cell::Int(self.seed),
            Cell::Num(self.mean_b),
            Cell::Num(self.ci_mean),
            Cell::Num(self.var_b),
            Cell::Num(self.ci_var),
            Cell::Num(self.p_hat),
            Cell::Num(self.ci_p),
            Cell::Num(self.eta_hat),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// CSV with a header row, or one JSON object per line.
pub fn write_records<R: Record, W: Write>(
    records: &[R],
    format: Format,
    mut out: W,
) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", R::columns().join(","))?;
            for r in records {
                let line: Vec<String> = r.cells().iter().map(Cell::csv).collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// Density as CSV (see [`MDDensity::write_csv`]) or as JSON lines: one
/// header object with the atom, then one `{t, density}` object per point.
pub fn write_density<W: Write>(dens: &MDDensity, format: Format, mut out: W) -> io::Result<()> {
    match format {
        Format::Csv => dens.write_csv(out),
        Format::Json => {
            let head = serde_json::json!({
                "atom_mass": dens.atom_mass,
                "atom_at": dens.alpha,
                "rho": dens.rho,
                "lambda": dens.lambda,
                "n_terms": dens.n_terms,
                "tail_mass_bound": dens.tail_mass_bound,
            });
            writeln!(out, "{head}")?;
            for (t, b) in dens.grid.iter().zip(&dens.density_values) {
                writeln!(out, "{}", serde_json::json!({ "t": t, "density": b }))?;
            }
            Ok(())
        }
    }
}
