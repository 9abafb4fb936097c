//! Seeded Monte Carlo runs of the rescaled weight and convergence reports.
//!
//! Trial `t` at schedule position `s` draws from ChaCha stream
//! `(s << 32) | t` under the configured seed, so each trial's sample is fixed
//! by the seed alone. Trials may run on several threads; statistics are
//! reduced in trial order with compensated sums.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{limit_constant, GraphFamily, LimitQuery};
use crate::error::{invalid, Result};
use crate::functionals::{rescaled_weight, CompensatedSum, WeightExponent};
use crate::graphs::build;
use crate::points::{density_integral, generate_with_rng, DensitySpec, Seed};

/// Which `L^p` errors to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PMode {
    L1,
    L2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub family: GraphFamily,
    pub d: usize,
    pub alpha: f64,
    pub density: DensitySpec,
    pub n_schedule: Vec<usize>,
    pub trials: usize,
    pub seed: Seed,
    pub p_modes: Vec<PMode>,
    /// Worker cap; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl SimConfig {
    /// A config with both error modes and the default thread pool.
    pub fn new(family: GraphFamily, d: usize, alpha: f64, n_schedule: Vec<usize>, trials: usize, seed: Seed) -> Self {
        SimConfig {
            family,
            d,
            alpha,
            density: DensitySpec::UniformUnitCube,
            n_schedule,
            trials,
            seed,
            p_modes: vec![PMode::L1, PMode::L2],
            threads: None,
        }
    }

    pub fn with_density(mut self, density: DensitySpec) -> Self {
        self.density = density;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate(self.d)?;
        WeightExponent::new(self.alpha)?;
        self.density.validate(self.d)?;
        if self.trials < 2 {
            return Err(invalid(format!("trials must be >= 2, got {}", self.trials)));
        }
        if self.n_schedule.is_empty() {
            return Err(invalid("the n schedule is empty"));
        }
        if self.n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!("the n schedule {:?} is not strictly increasing", self.n_schedule)));
        }
        // Smallest n for which every family's builder is defined.
        let min_n = match self.family {
            GraphFamily::JthNng { j } => j + 1,
            GraphFamily::Knng { k } | GraphFamily::KnngUndirected { k } => k + 1,
            GraphFamily::Ong | GraphFamily::Gabriel => 2,
            GraphFamily::Mdsf { .. } => 1,
        };
        if self.n_schedule[0] < min_n {
            return Err(invalid(format!(
                "{} needs n >= {min_n}, schedule starts at {}",
                self.family, self.n_schedule[0]
            )));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be >= 1"));
        }
        self.target().map(|_| ())
    }

    /// Limit of the rescaled weight including the density factor, or `None`
    /// when no closed form is known (undirected k-NN graph with `k >= 2`).
    pub fn target(&self) -> Result<Option<f64>> {
        if let GraphFamily::KnngUndirected { k } = self.family {
            if k >= 2 {
                return Ok(None);
            }
        }
        let c = limit_constant(&LimitQuery::new(self.family, self.d, self.alpha))?;
        Ok(Some(c * density_integral(&self.density, self.d, self.alpha)))
    }
}

/// Statistics at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub family: String,
    pub d: usize,
    pub alpha: f64,
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub stdev: f64,
    pub stderr: f64,
    pub target: Option<f64>,
    pub abs_dev: Option<f64>,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
}

impl ReportRow {
    /// `|mean - target| <= 3 s.e. + allowance`; `None` without a target.
    pub fn within(&self, allowance: f64) -> Option<bool> {
        self.abs_dev.map(|dev| dev <= 3.0 * self.stderr + allowance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    pub fn largest(&self) -> Option<&ReportRow> {
        self.rows.last()
    }
}

/// Mean, sample standard deviation and standard error of `xs` (length >= 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub stdev: f64,
    pub stderr: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Result<Summary> {
        if xs.len() < 2 {
            return Err(invalid("at least two samples are needed"));
        }
        let m = xs.len() as f64;
        let mean = xs.iter().copied().collect::<CompensatedSum>().value() / m;
        let ss = xs.iter().map(|x| (x - mean) * (x - mean)).collect::<CompensatedSum>().value();
        let stdev = (ss / (m - 1.0)).sqrt();
        Ok(Summary { mean, stdev, stderr: stdev / m.sqrt() })
    }

    /// `|mean - target| <= 3 s.e. + allowance`.
    pub fn within(&self, target: f64, allowance: f64) -> bool {
        (self.mean - target).abs() <= 3.0 * self.stderr + allowance
    }
}

/// Runs `trials` evaluations of `f`, trial `t` on stream `(block << 32) | t`.
/// Results come back in trial order regardless of scheduling.
pub fn run_trials<F>(seed: Seed, block: u32, trials: usize, threads: Option<usize>, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if trials > u32::MAX as usize {
        return Err(invalid("too many trials"));
    }
    let work = || -> Result<Vec<f64>> {
        (0..trials as u64).into_par_iter().map(|t| f(&mut seed.stream((u64::from(block) << 32) | t))).collect()
    };
    match threads {
        None => work(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| invalid(format!("cannot start {k} worker threads: {e}")))?
            .install(work),
    }
}

/// One trial: sample `n` points, build the graph, return the rescaled weight.
pub fn sample_statistic(cfg: &SimConfig, n: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let ps = generate_with_rng(n, cfg.d, &cfg.density, rng)?;
    let g = build(&ps, &cfg.family)?;
    Ok(rescaled_weight(&g, WeightExponent::new(cfg.alpha)?, n, cfg.d))
}

/// Builds a report row from per-trial values.
pub fn summarise(cfg: &SimConfig, n: usize, values: &[f64], target: Option<f64>) -> Result<ReportRow> {
    let s = Summary::of(values)?;
    let err_mean = |p: f64| {
        target.map(|t| {
            values.iter().map(|x| (x - t).abs().powf(p)).collect::<CompensatedSum>().value() / values.len() as f64
        })
    };
    let row = ReportRow {
        family: cfg.family.tag().to_string(),
        d: cfg.d,
        alpha: cfg.alpha,
        n,
        trials: values.len(),
        mean: s.mean,
        stdev: s.stdev,
        stderr: s.stderr,
        target,
        abs_dev: target.map(|t| (s.mean - t).abs()),
        l1: if cfg.p_modes.contains(&PMode::L1) { err_mean(1.0) } else { None },
        l2: if cfg.p_modes.contains(&PMode::L2) { err_mean(2.0) } else { None },
    };
    let finite = [Some(row.mean), Some(row.stdev), Some(row.stderr), row.target, row.abs_dev, row.l1, row.l2]
        .into_iter()
        .flatten()
        .all(f64::is_finite);
    if !finite {
        return Err(invalid(format!("non-finite statistic at n = {n}")));
    }
    Ok(row)
}

/// Simulates every sample size in the schedule.
pub fn run(cfg: &SimConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let target = cfg.target()?;
    let mut rows = Vec::with_capacity(cfg.n_schedule.len());
    for (s, &n) in cfg.n_schedule.iter().enumerate() {
        let block = u32::try_from(s).map_err(|_| invalid("schedule too long"))?;
        let values = run_trials(cfg.seed, block, cfg.trials, cfg.threads, |rng| sample_statistic(cfg, n, rng))?;
        rows.push(summarise(cfg, n, &values, target)?);
    }
    Ok(ConvergenceReport { rows })
}

/// Monotone-approach heuristic over the schedule.
///
/// Passes when the deviation of the mean at the largest `n` is at most the
/// deviation at the smallest `n`, and the largest-`n` `L^1` error is within
/// one standard error of the smallest `L^1` error in the schedule. Both
/// comparisons allow a slack of one standard error at the largest `n`.
pub fn trend_check(report: &ConvergenceReport) -> Result<bool> {
    let rows = &report.rows;
    if rows.len() < 3 {
        return Err(invalid(format!("trend check needs at least 3 sample sizes, got {}", rows.len())));
    }
    let need = |x: Option<f64>, what: &str| x.ok_or_else(|| invalid(format!("trend check needs {what} at every n")));
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let slack = last.stderr;
    let dev_ok = need(last.abs_dev, "a target")? <= need(first.abs_dev, "a target")? + slack;
    let mut l1_min = f64::INFINITY;
    for r in rows {
        l1_min = l1_min.min(need(r.l1, "the L1 error")?);
    }
    let l1_ok = need(last.l1, "the L1 error")? <= l1_min + slack;
    Ok(dev_ok && l1_ok)
}

/// Systematic allowance added to the 3 s.e. band for each family, covering
/// finite-`n` boundary effects at the reference sample sizes.
pub fn default_allowance(family: &GraphFamily) -> f64 {
    match family {
        GraphFamily::JthNng { .. } | GraphFamily::KnngUndirected { .. } => 0.005,
        GraphFamily::Knng { k } if *k == 1 => 0.005,
        GraphFamily::Knng { .. } | GraphFamily::Gabriel => 0.02,
        GraphFamily::Ong => 0.03,
        GraphFamily::Mdsf { .. } => 0.05,
    }
}
