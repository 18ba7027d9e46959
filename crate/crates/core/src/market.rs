//! Ingestion of daily closure-price tables and the empirical escape-time
//! pipeline: log returns, per-stock standard deviations, per-stock
//! thresholds and pooled escape times.
//!
//! Input CSV schema: header row `date,TICKER1,TICKER2,...`, one row per
//! trading day, ISO dates, plain decimal prices (no thousands
//! separators), UTF-8.

use std::path::Path;

use crate::error::{Error, Result};
use crate::escape::{return_series_escape_times, ReturnThresholds};

/// Daily closure prices for a universe of stocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    pub tickers: Vec<String>,
    /// `prices[stock][day]`, all > 0.
    pub prices: Vec<Vec<f64>>,
    pub n_days: usize,
}

/// Per-stock return series and full-period standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnTable {
    pub tickers: Vec<String>,
    /// `returns[stock][t]`, length `n_days - 1`.
    pub returns: Vec<Vec<f64>>,
    /// Sample standard deviation (n-1) of each stock's returns.
    pub sigmas: Vec<f64>,
}

/// Ingestion policy knobs.
#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Keep stocks with missing cells by dropping them with a warning
    /// count instead of rejecting the file.
    pub allow_gaps: bool,
}

/// Loads and validates a price table under the default strict policy
/// (any gap is a parse error).
pub fn load_price_table(path: &Path) -> Result<PriceTable> {
    load_price_table_with(path, IngestOptions::default()).map(|(t, _)| t)
}

/// Loads a price table; returns the table and the number of stocks
/// dropped for gaps (always 0 under the strict policy).
pub fn load_price_table_with(
    path: &Path,
    opts: IngestOptions,
) -> Result<(PriceTable, usize)> {
    let text = std::fs::read_to_string(path)?;
    parse_price_table(&text, opts)
}

fn looks_like_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter()
            .enumerate()
            .all(|(i, &ch)| (i == 4 || i == 7) || ch.is_ascii_digit())
}

/// Parses a price table from CSV text; returns the table and the number
/// of stocks dropped for gaps under the permissive policy.
pub fn parse_price_table(text: &str, opts: IngestOptions) -> Result<(PriceTable, usize)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: None,
        msg: "empty file: missing header row".into(),
    })?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first().map(|c| c.trim()) != Some("date") || cols.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            column: Some(1),
            msg: "header must be `date,TICKER1,...`".into(),
        });
    }
    let tickers: Vec<String> = cols[1..].iter().map(|c| c.trim().to_string()).collect();
    if tickers.iter().any(|t| t.is_empty()) {
        return Err(Error::Parse {
            line: 1,
            column: None,
            msg: "empty ticker name in header".into(),
        });
    }

    let n_stocks = tickers.len();
    let mut prices: Vec<Vec<f64>> = vec![Vec::new(); n_stocks];
    let mut gaps: Vec<bool> = vec![false; n_stocks];
    let mut n_days = 0usize;

    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_stocks + 1 {
            return Err(Error::Parse {
                line: line_no,
                column: None,
                msg: format!(
                    "ragged row: expected {} fields, found {}",
                    n_stocks + 1,
                    fields.len()
                ),
            });
        }
        if !looks_like_iso_date(fields[0].trim()) {
            return Err(Error::Parse {
                line: line_no,
                column: Some(1),
                msg: format!("`{}` is not an ISO date (YYYY-MM-DD)", fields[0]),
            });
        }
        for (s, field) in fields[1..].iter().enumerate() {
            let field = field.trim();
            if field.is_empty() {
                if opts.allow_gaps {
                    gaps[s] = true;
                    prices[s].push(f64::NAN);
                    continue;
                }
                return Err(Error::Parse {
                    line: line_no,
                    column: Some(s + 2),
                    msg: format!("missing price for {}", tickers[s]),
                });
            }
            let p: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                column: Some(s + 2),
                msg: format!("`{field}` is not a decimal price"),
            })?;
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::Parse {
                    line: line_no,
                    column: Some(s + 2),
                    msg: format!("price must be > 0, got {field}"),
                });
            }
            prices[s].push(p);
        }
        n_days += 1;
    }

    if n_days < 2 {
        return Err(Error::Parse {
            line: n_days + 1,
            column: None,
            msg: format!("every stock needs >= 2 days, found {n_days}"),
        });
    }

    // drop gapped stocks under the permissive policy
    let mut dropped = 0usize;
    let mut kept_tickers = Vec::new();
    let mut kept_prices = Vec::new();
    for ((ticker, series), has_gap) in tickers.into_iter().zip(prices).zip(gaps) {
        if has_gap {
            dropped += 1;
        } else {
            kept_tickers.push(ticker);
            kept_prices.push(series);
        }
    }
    if kept_tickers.is_empty() {
        return Err(Error::DegenerateInput(
            "no complete stock series left after dropping gaps".into(),
        ));
    }

    Ok((
        PriceTable {
            tickers: kept_tickers,
            prices: kept_prices,
            n_days,
        },
        dropped,
    ))
}

/// Log returns `ln p_{t+1} - ln p_t`.
pub fn returns_from_prices(prices: &[f64]) -> Result<Vec<f64>> {
    if prices.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "returns need >= 2 prices, got {}",
            prices.len()
        )));
    }
    if let Some(&bad) = prices.iter().find(|&&p| p.is_nan() || p <= 0.0) {
        return Err(Error::invalid("price", "must be > 0", bad));
    }
    Ok(prices.windows(2).map(|w| w[1].ln() - w[0].ln()).collect())
}

/// Simple returns `(p_{t+1} - p_t) / p_t`, kept behind for sensitivity
/// checks against the log-return default.
pub fn simple_returns_from_prices(prices: &[f64]) -> Result<Vec<f64>> {
    if prices.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "returns need >= 2 prices, got {}",
            prices.len()
        )));
    }
    if let Some(&bad) = prices.iter().find(|&&p| p.is_nan() || p <= 0.0) {
        return Err(Error::invalid("price", "must be > 0", bad));
    }
    Ok(prices.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect())
}

fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Return-series mode: log returns by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReturnMode {
    #[default]
    Log,
    Simple,
}

/// Computes per-stock return series and full-period sigmas.
pub fn compute_returns(table: &PriceTable, mode: ReturnMode) -> Result<ReturnTable> {
    let mut returns = Vec::with_capacity(table.prices.len());
    for series in &table.prices {
        let r = match mode {
            ReturnMode::Log => returns_from_prices(series)?,
            ReturnMode::Simple => simple_returns_from_prices(series)?,
        };
        returns.push(r);
    }
    let sigmas = returns.iter().map(|r| sample_std(r)).collect();
    Ok(ReturnTable {
        tickers: table.tickers.clone(),
        returns,
        sigmas,
    })
}

/// Escape times pooled across stocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledEscapes {
    /// Escape times in steps, concatenated in stock order.
    pub times: Vec<u64>,
    /// Per-stock event counts, aligned with the table's tickers.
    pub per_stock: Vec<usize>,
    /// Stocks skipped because their sigma was zero.
    pub skipped_zero_sigma: usize,
}

/// Applies the per-stock thresholds `(k_i sigma_i, k_f sigma_i)` and pools
/// the escape times across the universe. Defaults are `k_i = -0.1`,
/// `k_f = -2.0`.
pub fn empirical_escape_dataset(
    table: &ReturnTable,
    k_i: f64,
    k_f: f64,
) -> Result<PooledEscapes> {
    if k_f.is_nan() || k_i.is_nan() || k_f >= k_i || k_i >= 0.0 {
        return Err(Error::invalid(
            "thresholds",
            "must satisfy k_f < k_i < 0",
            k_i,
        ));
    }
    let mut pooled = PooledEscapes {
        times: Vec::new(),
        per_stock: Vec::with_capacity(table.returns.len()),
        skipped_zero_sigma: 0,
    };
    for (series, &sigma) in table.returns.iter().zip(&table.sigmas) {
        if sigma.is_nan() || sigma <= 0.0 {
            pooled.skipped_zero_sigma += 1;
            pooled.per_stock.push(0);
            continue;
        }
        let th = ReturnThresholds {
            delta_x_i: k_i * sigma,
            delta_x_f: k_f * sigma,
        };
        let times = return_series_escape_times(series, &th);
        pooled.per_stock.push(times.len());
        pooled.times.extend(times);
    }
    Ok(pooled)
}

/// Reads a pooled escape-time file back: `#`-comment header lines
/// followed by one integer step count per line.
pub fn read_escape_steps(path: &Path) -> Result<Vec<u64>> {
    let text = std::fs::read_to_string(path)?;
    let mut steps = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: u64 = line.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            column: None,
            msg: format!("`{line}` is not an integer step count"),
        })?;
        steps.push(value);
    }
    if steps.is_empty() {
        return Err(Error::DegenerateInput(format!(
            "no escape times in {}",
            path.display()
        )));
    }
    Ok(steps)
}
