//! Distribution estimation and statistical comparison: binned probability
//! functions, moments, autocorrelation functions, chi-square and
//! Kolmogorov-Smirnov tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Histogram binning scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binning {
    Linear,
    /// Geometrically spaced edges; requires strictly positive samples.
    Logarithmic,
}

/// Density-normalized histogram: the empirical probability function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPf {
    /// Strictly increasing bin edges, length = densities.len() + 1.
    pub bin_edges: Vec<f64>,
    /// Probability density per bin; integrates to 1 over the edges.
    pub densities: Vec<f64>,
    pub n_samples: usize,
    pub binning: Binning,
}

impl EmpiricalPf {
    pub fn n_bins(&self) -> usize {
        self.densities.len()
    }

    /// Bin midpoints (geometric midpoints under logarithmic binning).
    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| match self.binning {
                Binning::Linear => 0.5 * (w[0] + w[1]),
                Binning::Logarithmic => (w[0] * w[1]).sqrt(),
            })
            .collect()
    }

    /// Integral of the density over all bins; 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.bin_edges
            .windows(2)
            .zip(&self.densities)
            .map(|(w, d)| d * (w[1] - w[0]))
            .sum()
    }
}

/// Builds a density-normalized histogram over the sample range.
pub fn empirical_pf(samples: &[f64], binning: Binning, n_bins: usize) -> Result<EmpiricalPf> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "histogram needs >= 2 samples, got {}",
            samples.len()
        )));
    }
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    empirical_pf_with_range(samples, binning, n_bins, lo, hi)
}

/// Builds the histogram over an explicit range `[lo, hi]`.
///
/// Samples outside the range are an error: the density would no longer
/// integrate to one.
pub fn empirical_pf_with_range(
    samples: &[f64],
    binning: Binning,
    n_bins: usize,
    lo: f64,
    hi: f64,
) -> Result<EmpiricalPf> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "histogram needs >= 2 samples, got {}",
            samples.len()
        )));
    }
    if n_bins < 2 {
        return Err(Error::invalid("n_bins", "must be >= 2", n_bins as f64));
    }
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(Error::DegenerateInput(format!(
            "histogram range [{lo}, {hi}] is empty or degenerate"
        )));
    }
    if binning == Binning::Logarithmic && lo <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "logarithmic binning requires positive samples, range starts at {lo}"
        )));
    }

    let edges: Vec<f64> = match binning {
        Binning::Linear => {
            let w = (hi - lo) / n_bins as f64;
            (0..=n_bins).map(|i| lo + w * i as f64).collect()
        }
        Binning::Logarithmic => {
            let llo = lo.ln();
            let step = (hi.ln() - llo) / n_bins as f64;
            let mut e: Vec<f64> = (0..=n_bins).map(|i| (llo + step * i as f64).exp()).collect()
            ;
            // guard the ends against rounding so every sample lands inside
            e[0] = lo;
            e[n_bins] = hi;
            e
        }
    };

    let mut counts = vec![0u64; n_bins];
    for &s in samples {
        if !s.is_finite() || s < lo || s > hi {
            return Err(Error::DegenerateInput(format!(
                "sample {s} outside histogram range [{lo}, {hi}]"
            )));
        }
        let mut idx = match binning {
            Binning::Linear => (((s - lo) / (hi - lo)) * n_bins as f64) as usize,
            Binning::Logarithmic => {
                ((s.ln() - lo.ln()) / (hi.ln() - lo.ln()) * n_bins as f64) as usize
            }
        }
        .min(n_bins - 1);
        // rounding at an edge can land a sample one bin off; walk it back
        while idx > 0 && s < edges[idx] {
            idx -= 1;
        }
        while idx < n_bins - 1 && s > edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }

    let n = samples.len() as f64;
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n * (w[1] - w[0])))
        .collect();

    Ok(EmpiricalPf {
        bin_edges: edges,
        densities,
        n_samples: samples.len(),
        binning,
    })
}

/// Mean, standard deviation, skewness and excess kurtosis of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator).
    pub std: f64,
    /// Standardized third central moment.
    pub skewness: f64,
    /// Standardized fourth central moment minus 3 (Gaussian → 0).
    pub kurtosis: f64,
}

/// Computes the four-moment summary. Skewness and kurtosis use central
/// moments with n denominators; the Gaussian reference is kurtosis = 0.
pub fn moments(series: &[f64]) -> Result<MomentSummary> {
    if series.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "moments need >= 4 samples, got {}",
            series.len()
        )));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in series {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return Err(Error::DegenerateInput(
            "zero variance: skewness and kurtosis undefined".into(),
        ));
    }
    Ok(MomentSummary {
        mean,
        std: (m2 * n / (n - 1.0)).sqrt(),
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

/// Autocorrelation estimate at lags 0..=max_lag.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfResult {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
}

impl AcfResult {
    /// 3/sqrt(N) white-noise significance band for the underlying series.
    pub fn white_noise_band(&self, n_samples: usize) -> f64 {
        3.0 / (n_samples as f64).sqrt()
    }

    /// Least-squares exponential decay time from a fit of ln ACF(k) over
    /// the lags in `1..=fit_lags` with positive ACF values.
    pub fn exponential_decay_time(&self, fit_lags: usize) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .lags
            .iter()
            .zip(&self.values)
            .skip(1)
            .take(fit_lags)
            .filter(|(_, &v)| v > 0.0)
            .map(|(&k, &v)| (k as f64, v.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::InsufficientData(
                "not enough positive ACF values for an exponential fit".into(),
            ));
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if slope >= 0.0 {
            return Err(Error::DegenerateInput(
                "ACF does not decay; no exponential time constant".into(),
            ));
        }
        Ok(-1.0 / slope)
    }
}

/// Biased autocorrelation estimator
/// `ACF(k) = sum_t (x_t - mean)(x_{t+k} - mean) / sum_t (x_t - mean)²`.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<AcfResult> {
    if series.len() < 2 || max_lag >= series.len() / 2 {
        return Err(Error::InsufficientData(format!(
            "max_lag {max_lag} too large for series of length {}",
            series.len()
        )));
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    if denom == 0.0 {
        return Err(Error::DegenerateInput(
            "constant series has no autocorrelation".into(),
        ));
    }
    let mut values = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let mut num = 0.0;
        for t in 0..n - k {
            num += (series[t] - mean) * (series[t + k] - mean);
        }
        values.push(num / denom);
    }
    Ok(AcfResult {
        lags: (0..=max_lag).collect(),
        values,
    })
}

/// Elementwise `ln |r|` with exact zeros dropped; returns the transformed
/// series and the number of dropped entries.
pub fn log_abs_return_series(returns: &[f64]) -> Result<(Vec<f64>, usize)> {
    if returns.is_empty() {
        return Err(Error::InsufficientData("empty return series".into()));
    }
    let mut out = Vec::with_capacity(returns.len());
    let mut dropped = 0usize;
    for &r in returns {
        if r == 0.0 {
            dropped += 1;
        } else {
            out.push(r.abs().ln());
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateInput(
            "all returns are zero; log-absolute series is empty".into(),
        ));
    }
    Ok((out, dropped))
}

/// Goodness-of-fit summary of a model PF against a reference PF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofResult {
    pub chi2: f64,
    pub chi2_reduced: f64,
    pub ks_d: f64,
    pub ks_p: f64,
}

/// Density-form chi-square distance between two PFs on shared edges:
/// `chi² = sum_bins (d_model - d_ref)² / d_ref` over bins with positive
/// reference density; reduced form divides by (included bins - 1).
pub fn chi_square(pf_model: &EmpiricalPf, pf_ref: &EmpiricalPf) -> Result<(f64, f64)> {
    if pf_model.bin_edges.len() != pf_ref.bin_edges.len()
        || pf_model
            .bin_edges
            .iter()
            .zip(&pf_ref.bin_edges)
            .any(|(a, b)| a != b)
    {
        return Err(Error::EdgeMismatch(format!(
            "model has {} edges, reference has {}",
            pf_model.bin_edges.len(),
            pf_ref.bin_edges.len()
        )));
    }
    let mut chi2 = 0.0;
    let mut included = 0usize;
    for (&dm, &dr) in pf_model.densities.iter().zip(&pf_ref.densities) {
        if dr > 0.0 {
            chi2 += (dm - dr) * (dm - dr) / dr;
            included += 1;
        }
    }
    if included < 2 {
        return Err(Error::InsufficientData(
            "fewer than 2 bins with positive reference density".into(),
        ));
    }
    Ok((chi2, chi2 / (included - 1) as f64))
}

/// Chi-square and K-S comparison of two samples, binned on shared edges
/// spanning the pooled range.
pub fn goodness_of_fit(
    samples_model: &[f64],
    samples_ref: &[f64],
    binning: Binning,
    n_bins: usize,
) -> Result<GofResult> {
    if samples_model.len() < 2 || samples_ref.len() < 2 {
        return Err(Error::InsufficientData(
            "goodness of fit needs two samples of >= 2 points".into(),
        ));
    }
    let lo = samples_model
        .iter()
        .chain(samples_ref)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = samples_model
        .iter()
        .chain(samples_ref)
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let pf_model = empirical_pf_with_range(samples_model, binning, n_bins, lo, hi)?;
    let pf_ref = empirical_pf_with_range(samples_ref, binning, n_bins, lo, hi)?;
    let (chi2, chi2_reduced) = chi_square(&pf_model, &pf_ref)?;
    let (ks_d, ks_p) = ks_test(samples_model, samples_ref)?;
    Ok(GofResult {
        chi2,
        chi2_reduced,
        ks_d,
        ks_p,
    })
}

/// Two-sample Kolmogorov-Smirnov test.
///
/// Returns the sup-distance D between the empirical CDFs and the
/// asymptotic significance P from the Kolmogorov distribution with the
/// usual small-sample correction
/// `lambda = D (sqrt(n_eff) + 0.12 + 0.11 / sqrt(n_eff))`,
/// `n_eff = n_a n_b / (n_a + n_b)`.
pub fn ks_test(samples_a: &[f64], samples_b: &[f64]) -> Result<(f64, f64)> {
    if samples_a.is_empty() || samples_b.is_empty() {
        return Err(Error::InsufficientData(
            "KS test needs two nonempty samples".into(),
        ));
    }
    let mut a = samples_a.to_vec();
    let mut b = samples_b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));

    let (na, nb) = (a.len(), b.len());
    // sup tracked in integer units of 1/(na*nb) so that D is exact
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d_num: i64 = 0;
    while i < na && j < nb {
        let t = a[i].min(b[j]);
        while i < na && a[i] <= t {
            i += 1;
        }
        while j < nb && b[j] <= t {
            j += 1;
        }
        let diff = (i as i64 * nb as i64 - j as i64 * na as i64).abs();
        d_num = d_num.max(diff);
    }
    let d = d_num as f64 / (na as f64 * nb as f64);

    let n_eff = (na as f64 * nb as f64) / (na + nb) as f64;
    let sqrt_n = n_eff.sqrt();
    let lambda = d * (sqrt_n + 0.12 + 0.11 / sqrt_n);
    Ok((d, kolmogorov_survival(lambda)))
}

/// Asymptotic Kolmogorov survival function
/// `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² λ²)`, clamped to [0, 1].
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    let l2 = lambda * lambda;
    for k in 1..=100 {
        let term = sign * (-2.0 * (k as f64) * (k as f64) * l2).exp();
        sum += term;
        if term.abs() < 1e-12 * sum.abs().max(1e-300) {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
