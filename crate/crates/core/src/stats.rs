//! Statistical indistinguishability harness: frequency distributions of
//! A5 elements in transmitted/key matrices versus random matrices, Q-Q
//! quantile data, and a calibrated chi-square distance.
//!
//! Trials are driven by per-trial RNG streams derived from the master
//! seed, so output is byte-identical for a fixed seed regardless of how
//! the work is scheduled.

use std::io::{self, Write};

use num_bigint::{BigUint, RandBigInt};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::algebra::{GRMatrix, A5_ORDER, DIM};
use crate::error::{Error, Result};
use crate::paramgen::{generate_matrix_params, sample_matrix_uniform, DEFAULT_FACTOR_COUNT};
use crate::semidirect::Platform;

pub const CELLS: usize = DIM * DIM;

/// Desk-scale defaults: fast enough for CI while still exercising the
/// full pipeline.
pub const DESK_TRIALS: u32 = 100;
pub const DESK_EXP_LOW: u64 = 10_000_000_000; // 1e10
pub const DESK_EXP_HIGH: u64 = 10_000_000_000_000; // 1e13

/// Full-scale settings: 500 trials, exponents in [1e44, 1e55].
pub const FULL_TRIALS: u32 = 500;

pub fn full_exp_low() -> BigUint {
    BigUint::from(10u8).pow(44)
}

pub fn full_exp_high() -> BigUint {
    BigUint::from(10u8).pow(55)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    /// First component of (M, φ_H)^n versus an unrestricted random matrix N.
    PowerVsRandom,
    /// First component of (M, φ_H)^n versus (M, φ_H)^{a+b}.
    PowerVsSumPower,
}

impl ExperimentMode {
    pub fn label(&self) -> &'static str {
        match self {
            ExperimentMode::PowerVsRandom => "power_vs_random",
            ExperimentMode::PowerVsSumPower => "power_vs_sumpower",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub trials: u32,
    pub exponent_low: BigUint,
    pub exponent_high: BigUint,
    pub mode: ExperimentMode,
    pub seed: u64,
    /// Sample (M, H) once and reuse them for every trial instead of
    /// resampling per trial.
    pub fixed_params: bool,
    pub factor_count: usize,
}

impl ExperimentConfig {
    pub fn desk_scale(mode: ExperimentMode, seed: u64) -> Self {
        ExperimentConfig {
            trials: DESK_TRIALS,
            exponent_low: BigUint::from(DESK_EXP_LOW),
            exponent_high: BigUint::from(DESK_EXP_HIGH),
            mode,
            seed,
            fixed_params: false,
            factor_count: DEFAULT_FACTOR_COUNT,
        }
    }

    pub fn full_scale(mode: ExperimentMode, seed: u64) -> Self {
        ExperimentConfig {
            trials: FULL_TRIALS,
            exponent_low: full_exp_low(),
            exponent_high: full_exp_high(),
            ..Self::desk_scale(mode, seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::NoTrials);
        }
        if self.exponent_low >= self.exponent_high {
            return Err(Error::EmptyExponentRange);
        }
        if self.exponent_low.bits() == 0 {
            return Err(Error::ZeroExponent);
        }
        Ok(())
    }
}

/// Occurrence counts of each A5 element per matrix cell, aggregated over
/// trials. An element occurs in an entry when its coefficient is
/// nonzero; the weighted counts additionally sum the coefficient values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    indicator: [[u64; A5_ORDER]; CELLS],
    weighted: [[u64; A5_ORDER]; CELLS],
    trials: u32,
    entries_tabulated: u64,
}

impl Default for FrequencyTable {
    fn default() -> Self {
        Self::new()
    }
}

impl FrequencyTable {
    pub fn new() -> Self {
        FrequencyTable {
            indicator: [[0; A5_ORDER]; CELLS],
            weighted: [[0; A5_ORDER]; CELLS],
            trials: 0,
            entries_tabulated: 0,
        }
    }

    /// Tabulates one trial's matrix: all nine entries.
    pub fn record(&mut self, m: &GRMatrix) {
        for row in 0..DIM {
            for col in 0..DIM {
                let cell = row * DIM + col;
                let entry = m.entry(row, col);
                for (elem, slot) in self.indicator[cell].iter_mut().enumerate() {
                    let c = entry.coeff(elem);
                    if c != 0 {
                        *slot += 1;
                        self.weighted[cell][elem] += c as u64;
                    }
                }
                self.entries_tabulated += 1;
            }
        }
        self.trials += 1;
    }

    pub fn trials(&self) -> u32 {
        self.trials
    }

    pub fn entries_tabulated(&self) -> u64 {
        self.entries_tabulated
    }

    pub fn indicator_counts(&self, cell: usize) -> &[u64; A5_ORDER] {
        &self.indicator[cell]
    }

    pub fn weighted_counts(&self, cell: usize) -> &[u64; A5_ORDER] {
        &self.weighted[cell]
    }

    /// Test hook used by calibration checks: a table with prescribed
    /// indicator counts.
    pub fn from_indicator_counts(counts: [[u64; A5_ORDER]; CELLS], trials: u32) -> Self {
        FrequencyTable {
            indicator: counts,
            weighted: [[0; A5_ORDER]; CELLS],
            trials,
            entries_tabulated: trials as u64 * CELLS as u64,
        }
    }
}

fn trial_rng(seed: u64, index: u64) -> ChaCha20Rng {
    // splitmix64 of the (seed, index) pair gives independent per-trial
    // streams with deterministic aggregation order
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha20Rng::seed_from_u64(z ^ (z >> 31))
}

/// Runs one experiment: per trial, fresh (M, H) (unless pinned), a fresh
/// exponent draw, then both sides tabulated. Returns (table A, table B)
/// where A always holds the power (M, φ_H)^n.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(FrequencyTable, FrequencyTable)> {
    config.validate()?;
    let fixed = if config.fixed_params {
        let mut rng = trial_rng(config.seed, u64::MAX);
        Some(generate_matrix_params(&mut rng, config.factor_count)?.params)
    } else {
        None
    };
    let mut table_a = FrequencyTable::new();
    let mut table_b = FrequencyTable::new();
    for trial in 0..config.trials {
        let mut rng = trial_rng(config.seed, trial as u64);
        let params = match &fixed {
            Some(p) => p.clone(),
            None => generate_matrix_params(&mut rng, config.factor_count)?.params,
        };
        let n = rng.gen_biguint_range(&config.exponent_low, &config.exponent_high);
        let power = params.transmission(&n)?;
        table_a.record(&power);
        match config.mode {
            ExperimentMode::PowerVsRandom => {
                table_b.record(&sample_matrix_uniform(&mut rng));
            }
            ExperimentMode::PowerVsSumPower => {
                let a = rng.gen_biguint_range(&config.exponent_low, &config.exponent_high);
                let b = rng.gen_biguint_range(&config.exponent_low, &config.exponent_high);
                let sum_power = params.transmission(&(a + b))?;
                table_b.record(&sum_power);
            }
        }
    }
    Ok((table_a, table_b))
}

/// One Q-Q series: paired quantiles for a single matrix cell.
#[derive(Debug, Clone, PartialEq)]
pub struct QqSeries {
    pub cell: (usize, usize),
    pub points: Vec<(f64, f64)>,
}

/// Empirical quantiles (probes k/(B+1), k = 1..B, linear interpolation)
/// of the element-index distribution carried by one cell's counts: the
/// counts are read as a sample of Σcounts observations of the canonical
/// index 0..59, i.e. the two cumulative distribution functions are
/// compared. An empty cell yields all-zero quantiles.
fn quantiles(counts: &[u64; A5_ORDER], probes: usize) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0.0; probes];
    }
    let mut cumulative = [0u64; A5_ORDER];
    let mut running = 0u64;
    for (i, &c) in counts.iter().enumerate() {
        running += c;
        cumulative[i] = running;
    }
    // value at 1-indexed sample position j: smallest index with cdf ≥ j
    let value_at = |j: u64| -> f64 {
        let j = j.clamp(1, total);
        cumulative.partition_point(|&c| c < j) as f64
    };
    (1..=probes)
        .map(|k| {
            let h = k as f64 / (probes + 1) as f64 * (total + 1) as f64;
            let pos = (h.floor() as u64).clamp(1, total);
            let frac = h - pos as f64;
            let lo = value_at(pos);
            if frac <= 0.0 || pos >= total {
                lo
            } else {
                lo + frac * (value_at(pos + 1) - lo)
            }
        })
        .collect()
}

/// Per-cell Q-Q pairing of the two tables' indicator distributions,
/// probed at the 60 bucket quantiles.
pub fn qq_data(a: &FrequencyTable, b: &FrequencyTable) -> Result<Vec<QqSeries>> {
    if a.trials != b.trials {
        return Err(Error::TrialCountMismatch(a.trials, b.trials));
    }
    Ok((0..CELLS)
        .map(|cell| {
            let qa = quantiles(&a.indicator[cell], A5_ORDER);
            let qb = quantiles(&b.indicator[cell], A5_ORDER);
            QqSeries {
                cell: (cell / DIM, cell % DIM),
                points: qa.into_iter().zip(qb).collect(),
            }
        })
        .collect())
}

/// Least-squares slope of y on x and the Pearson correlation of a Q-Q
/// series. Degenerate series report (0, 0).
pub fn slope_and_correlation(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.is_empty() {
        return (0.0, 0.0);
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in points {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x).powi(2);
        var_y += (y - mean_y).powi(2);
    }
    if var_x == 0.0 || var_y == 0.0 {
        return (0.0, 0.0);
    }
    (cov / var_x, cov / (var_x * var_y).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellChiSquare {
    pub cell: (usize, usize),
    pub statistic: f64,
    pub df: usize,
    pub critical: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareReport {
    pub alpha: f64,
    pub cells: Vec<CellChiSquare>,
    pub aggregate_statistic: f64,
    pub aggregate_df: usize,
    pub aggregate_critical: f64,
    pub aggregate_rejected: bool,
}

/// Two-sample chi-square over the element-frequency buckets of each
/// cell. Every bucket is a 2×2 table (occurred / not × table A / B)
/// contributing one degree of freedom; buckets whose expected occurrence
/// or non-occurrence count falls below 5 are pooled, and a pooled bucket
/// still below threshold is dropped. Reported per cell and aggregated.
pub fn chi_square_distance(
    a: &FrequencyTable,
    b: &FrequencyTable,
    alpha: f64,
) -> Result<ChiSquareReport> {
    if a.trials != b.trials {
        return Err(Error::TrialCountMismatch(a.trials, b.trials));
    }
    if a.trials == 0 {
        return Err(Error::NoTrials);
    }
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0, 1)");
    let trials = a.trials as f64;
    let mut cells = Vec::with_capacity(CELLS);
    let mut aggregate_statistic = 0.0;
    let mut aggregate_df = 0usize;
    for cell in 0..CELLS {
        let mut statistic = 0.0;
        let mut df = 0usize;
        let mut pooled = (0.0f64, 0.0f64, 0.0f64); // (a, b, per-table trials)
        for elem in 0..A5_ORDER {
            let ca = a.indicator[cell][elem] as f64;
            let cb = b.indicator[cell][elem] as f64;
            let expected_occurrence = (ca + cb) / 2.0;
            let expected_absence = trials - expected_occurrence;
            if expected_occurrence < 5.0 || expected_absence < 5.0 {
                pooled.0 += ca;
                pooled.1 += cb;
                pooled.2 += trials;
            } else {
                statistic += two_by_two(ca, cb, trials);
                df += 1;
            }
        }
        if pooled.2 > 0.0 {
            let expected_occurrence = (pooled.0 + pooled.1) / 2.0;
            let expected_absence = pooled.2 - expected_occurrence;
            if expected_occurrence >= 5.0 && expected_absence >= 5.0 {
                statistic += two_by_two(pooled.0, pooled.1, pooled.2);
                df += 1;
            }
        }
        if df == 0 {
            return Err(Error::UnderpopulatedTable);
        }
        let critical = chi_square_critical(df, alpha);
        cells.push(CellChiSquare {
            cell: (cell / DIM, cell % DIM),
            statistic,
            df,
            critical,
            rejected: statistic > critical,
        });
        aggregate_statistic += statistic;
        aggregate_df += df;
    }
    let aggregate_critical = chi_square_critical(aggregate_df, alpha);
    Ok(ChiSquareReport {
        alpha,
        cells,
        aggregate_statistic,
        aggregate_df,
        aggregate_critical,
        aggregate_rejected: aggregate_statistic > aggregate_critical,
    })
}

/// Pearson statistic of the 2×2 table [[a, n−a], [b, n−b]].
fn two_by_two(a: f64, b: f64, n: f64) -> f64 {
    let pooled = (a + b) / (2.0 * n);
    let variance = 2.0 * n * pooled * (1.0 - pooled);
    if variance <= 0.0 {
        return 0.0;
    }
    (a - b).powi(2) / variance
}

fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("positive df")
        .inverse_cdf(1.0 - alpha)
}

// --- CSV emission ---------------------------------------------------------

pub const FREQ_CSV_HEADER: &str = "cell_row,cell_col,element_index,count_A,count_B";
pub const QQ_CSV_HEADER: &str = "cell_row,cell_col,quantile_A,quantile_B";
pub const SUMMARY_CSV_HEADER: &str =
    "cell_row,cell_col,chi_square,df,critical,rejected,qq_slope,qq_corr";

/// Frequency counts of both tables; `weighted` selects the
/// coefficient-sum counts instead of the occurrence indicators.
pub fn write_freq_csv<W: Write>(
    out: &mut W,
    a: &FrequencyTable,
    b: &FrequencyTable,
    weighted: bool,
) -> io::Result<()> {
    writeln!(out, "{FREQ_CSV_HEADER}")?;
    for cell in 0..CELLS {
        let (ca, cb) = if weighted {
            (&a.weighted[cell], &b.weighted[cell])
        } else {
            (&a.indicator[cell], &b.indicator[cell])
        };
        for elem in 0..A5_ORDER {
            writeln!(
                out,
                "{},{},{},{},{}",
                cell / DIM,
                cell % DIM,
                elem,
                ca[elem],
                cb[elem]
            )?;
        }
    }
    Ok(())
}

pub fn write_qq_csv<W: Write>(out: &mut W, series: &[QqSeries]) -> io::Result<()> {
    writeln!(out, "{QQ_CSV_HEADER}")?;
    for s in series {
        for (qa, qb) in &s.points {
            writeln!(out, "{},{},{qa:.6},{qb:.6}", s.cell.0, s.cell.1)?;
        }
    }
    Ok(())
}

/// Per-cell chi-square and Q-Q fit statistics, then an aggregate row
/// with cell coordinates -1,-1 (Q-Q columns empty there).
pub fn write_summary_csv<W: Write>(
    out: &mut W,
    report: &ChiSquareReport,
    series: &[QqSeries],
) -> io::Result<()> {
    writeln!(out, "{SUMMARY_CSV_HEADER}")?;
    for (cell_report, s) in report.cells.iter().zip(series) {
        let (slope, corr) = slope_and_correlation(&s.points);
        writeln!(
            out,
            "{},{},{:.6},{},{:.6},{},{slope:.6},{corr:.6}",
            cell_report.cell.0,
            cell_report.cell.1,
            cell_report.statistic,
            cell_report.df,
            cell_report.critical,
            cell_report.rejected,
        )?;
    }
    writeln!(
        out,
        "-1,-1,{:.6},{},{:.6},{},,",
        report.aggregate_statistic,
        report.aggregate_df,
        report.aggregate_critical,
        report.aggregate_rejected,
    )?;
    Ok(())
}
