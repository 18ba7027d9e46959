//! Executes experiments and writes their output files.

use std::path::PathBuf;
use std::time::Instant;

use escapelab_core::escape::ok_points;
use escapelab_core::output::{
    unique_path, write_acf_csv, write_ensemble_csv, write_escape_steps, write_pf_csv,
    write_summary_txt, write_sweep_csv,
};
use escapelab_core::{
    autocorrelation, detect_nonmonotonicity, empirical_pf, log_abs_return_series,
    mean_escape_time, met_sweep, moments, return_series_escape_times, run_escape_ensemble,
    simulate_restarted_series, Binning, Error, Result, ReturnThresholds, RngStream,
};

use crate::config::{ExperimentConfig, ExperimentKind};

/// What a run produced.
#[derive(Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub wall_seconds: f64,
    /// `(label, censored fraction)` per ensemble/sweep executed.
    pub censored: Vec<(String, f64)>,
    pub seed: u64,
    pub fingerprint: String,
    /// Free-form result lines echoed to stdout.
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn print(&self) {
        println!("fingerprint: {}", self.fingerprint);
        println!("seed: {}", self.seed);
        for (label, frac) in &self.censored {
            println!("censored[{label}]: {:.4}%", frac * 100.0);
        }
        for note in &self.notes {
            println!("{note}");
        }
        for f in &self.files {
            println!("wrote {}", f.display());
        }
        println!("wall: {:.2}s", self.wall_seconds);
    }
}

/// Runs one experiment with an optional name prefix for its files.
pub fn run_experiment(config: &ExperimentConfig, stem_prefix: &str) -> Result<RunReport> {
    config.validate()?;
    let started = Instant::now();
    let fp = config.fingerprint();
    let out_dir = config.out_dir();
    std::fs::create_dir_all(&out_dir)?;

    let mut report = RunReport {
        seed: config.sim.seed,
        fingerprint: fp.clone(),
        ..Default::default()
    };

    match config.kind {
        ExperimentKind::Ensemble => run_ensemble(config, stem_prefix, &mut report)?,
        ExperimentKind::MetSweep => run_sweep(config, stem_prefix, &mut report)?,
        ExperimentKind::SeriesStats => run_series_stats(config, stem_prefix, &mut report)?,
        ExperimentKind::ReturnEscape => run_return_escape(config, stem_prefix, &mut report)?,
    }

    report.wall_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

fn run_ensemble(
    config: &ExperimentConfig,
    stem: &str,
    report: &mut RunReport,
) -> Result<()> {
    let mut ens = run_escape_ensemble(
        &config.model,
        &config.escape,
        config.sim.n_events,
        &config.sim,
    )?;
    ens.fingerprint = report.fingerprint.clone();
    report
        .censored
        .push((stem.to_string(), ens.censored_fraction()));

    let path = unique_path(&config.out_dir(), &format!("{stem}events"), &ens.fingerprint, "csv");
    write_ensemble_csv(&path, &ens)?;
    report.files.push(path);

    let met = mean_escape_time(&ens)?;
    let summary = vec![
        ("model", config.model.name().to_string()),
        ("met", met.met.to_string()),
        ("met_std_error", met.std_error.to_string()),
        ("n_events", met.n_events.to_string()),
        ("censored_fraction", ens.censored_fraction().to_string()),
        ("met_valid", ens.met_valid().to_string()),
    ];
    let path = unique_path(&config.out_dir(), &format!("{stem}met"), &report.fingerprint, "txt");
    write_summary_txt(&path, &summary, &report.fingerprint)?;
    report.files.push(path);
    report.notes.push(format!(
        "MET = {} ± {} over {} events",
        met.met, met.std_error, met.n_events
    ));
    Ok(())
}

fn run_sweep(config: &ExperimentConfig, stem: &str, report: &mut RunReport) -> Result<()> {
    let sweep = config.sweep.as_ref().expect("validated");
    let values = config.sweep_values()?;
    let curve = met_sweep(
        sweep.axis,
        &values,
        &config.model,
        &config.escape,
        &config.sim,
        sweep.v_start_policy,
    )?;
    for p in &curve {
        report.censored.push((
            format!("{stem}{}={}", sweep.axis.name(), p.value),
            p.censored_fraction(),
        ));
    }

    let path = unique_path(
        &config.out_dir(),
        &format!("{stem}met_vs_{}", sweep.axis.name()),
        &report.fingerprint,
        "csv",
    );
    write_sweep_csv(&path, sweep.axis.name(), &curve, &report.fingerprint)?;
    report.files.push(path);

    let points = ok_points(&curve);
    let classification = if points.len() >= 5 {
        detect_nonmonotonicity(&points)
            .map(|c| c.to_string())
            .unwrap_or_else(|e| format!("unavailable ({e})"))
    } else {
        format!("unavailable ({} valid points)", points.len())
    };
    report.notes.push(format!(
        "{stem}curve over {} points: {classification}",
        curve.len()
    ));
    Ok(())
}

/// Simulates the configured return series: restarted protocol or
/// free-running, depending on the series section.
fn make_series(config: &ExperimentConfig) -> Result<escapelab_core::escape::SeriesRecord> {
    let series = config.series.as_ref().expect("validated");
    if series.restarted {
        simulate_restarted_series(&config.model, &config.escape, series.n_obs, &config.sim)
    } else {
        let mut stream = RngStream::new(config.sim.seed, 0);
        let returns = escapelab_core::simulate_returns(
            &config.model,
            series.n_obs,
            &mut stream,
            config.sim.dt,
        );
        Ok(escapelab_core::escape::SeriesRecord {
            volatilities: Vec::new(),
            restarts: 0,
            returns,
        })
    }
}

fn run_series_stats(
    config: &ExperimentConfig,
    stem: &str,
    report: &mut RunReport,
) -> Result<()> {
    let series_cfg = config.series.as_ref().expect("validated");
    let rec = make_series(config)?;
    let out_dir = config.out_dir();
    let fp = report.fingerprint.clone();

    let m = moments(&rec.returns)?;

    let return_pf = empirical_pf(&rec.returns, Binning::Linear, series_cfg.pf_bins)?;
    let path = unique_path(&out_dir, &format!("{stem}return_pf"), &fp, "csv");
    write_pf_csv(&path, &return_pf, &fp)?;
    report.files.push(path);

    // volatility PF on the positive samples (full truncation parks the
    // variance at exactly zero part of the time)
    let mut dropped_zero_vol = 0usize;
    if !rec.volatilities.is_empty() {
        let positive: Vec<f64> = rec
            .volatilities
            .iter()
            .copied()
            .filter(|&v| {
                if v > 0.0 {
                    true
                } else {
                    dropped_zero_vol += 1;
                    false
                }
            })
            .collect();
        if positive.len() >= 2 {
            let vol_pf = empirical_pf(&positive, Binning::Logarithmic, series_cfg.pf_bins)?;
            let path = unique_path(&out_dir, &format!("{stem}volatility_pf"), &fp, "csv");
            write_pf_csv(&path, &vol_pf, &fp)?;
            report.files.push(path);
        }
    }

    let acf = autocorrelation(&rec.returns, series_cfg.acf_max_lag)?;
    let path = unique_path(&out_dir, &format!("{stem}return_acf"), &fp, "csv");
    write_acf_csv(&path, &acf, &fp)?;
    report.files.push(path);

    let (labs, dropped_zero_ret) = log_abs_return_series(&rec.returns)?;
    let labs_acf = autocorrelation(&labs, series_cfg.acf_max_lag)?;
    let path = unique_path(&out_dir, &format!("{stem}log_abs_return_acf"), &fp, "csv");
    write_acf_csv(&path, &labs_acf, &fp)?;
    report.files.push(path);

    let mean_vol = if rec.volatilities.is_empty() {
        f64::NAN
    } else {
        rec.volatilities.iter().sum::<f64>() / rec.volatilities.len() as f64
    };
    let summary = vec![
        ("model", config.model.name().to_string()),
        ("n_obs", rec.returns.len().to_string()),
        ("mean", m.mean.to_string()),
        ("sigma", m.std.to_string()),
        ("skewness", m.skewness.to_string()),
        ("kurtosis_excess", m.kurtosis.to_string()),
        ("restarts", rec.restarts.to_string()),
        ("mean_volatility", mean_vol.to_string()),
        ("zero_returns_dropped", dropped_zero_ret.to_string()),
        ("zero_volatility_samples", dropped_zero_vol.to_string()),
    ];
    let path = unique_path(&out_dir, &format!("{stem}moments"), &fp, "txt");
    write_summary_txt(&path, &summary, &fp)?;
    report.files.push(path);
    report.notes.push(format!(
        "{stem}sigma = {:.6}, skewness = {:.3}, excess kurtosis = {:.1}, restarts = {}",
        m.std, m.skewness, m.kurtosis, rec.restarts
    ));
    Ok(())
}

fn run_return_escape(
    config: &ExperimentConfig,
    stem: &str,
    report: &mut RunReport,
) -> Result<()> {
    let series_cfg = config.series.as_ref().expect("validated");
    let th_cfg = config.thresholds.expect("validated");
    let rec = make_series(config)?;
    let m = moments(&rec.returns)?;
    let sigma = m.std;
    let th = ReturnThresholds {
        delta_x_i: th_cfg.k_i * sigma,
        delta_x_f: th_cfg.k_f * sigma,
    };
    th.validate()?;
    let times = return_series_escape_times(&rec.returns, &th);
    if times.is_empty() {
        return Err(Error::DegenerateEnsemble(0));
    }
    let out_dir = config.out_dir();
    let fp = report.fingerprint.clone();

    let path = unique_path(&out_dir, &format!("{stem}escape_times"), &fp, "steps");
    write_escape_steps(&path, &times, &fp)?;
    report.files.push(path);

    let float_times: Vec<f64> = times.iter().map(|&t| t as f64).collect();
    if times.len() >= 2 {
        let bins = series_cfg.pf_bins.min(
            // keep log bins meaningful for narrow integer supports
            ((float_times.iter().cloned().fold(f64::MIN, f64::max)).ln_1p() * 8.0).ceil() as usize,
        );
        let pf = empirical_pf(&float_times, Binning::Logarithmic, bins.max(2))?;
        let path = unique_path(&out_dir, &format!("{stem}escape_pf"), &fp, "csv");
        write_pf_csv(&path, &pf, &fp)?;
        report.files.push(path);
    }

    let mean_steps = float_times.iter().sum::<f64>() / float_times.len() as f64;
    let summary = vec![
        ("model", config.model.name().to_string()),
        ("n_obs", rec.returns.len().to_string()),
        ("sigma", sigma.to_string()),
        ("threshold_initial", th.delta_x_i.to_string()),
        ("threshold_final", th.delta_x_f.to_string()),
        ("n_escapes", times.len().to_string()),
        ("mean_escape_steps", mean_steps.to_string()),
        ("restarts", rec.restarts.to_string()),
    ];
    let path = unique_path(&out_dir, &format!("{stem}escape_summary"), &fp, "txt");
    write_summary_txt(&path, &summary, &fp)?;
    report.files.push(path);
    report.notes.push(format!(
        "{stem}{} escapes, mean {:.2} steps, sigma = {:.6}",
        times.len(),
        mean_steps,
        sigma
    ));

    // goodness of fit against reference escape times, when supplied
    if let Some(compare) = &config.compare {
        let reference = escapelab_core::market::read_escape_steps(&compare.escape_steps)?;
        let ref_times: Vec<f64> = reference.iter().map(|&t| t as f64).collect();
        let gof = escapelab_core::stats::goodness_of_fit(
            &float_times,
            &ref_times,
            Binning::Logarithmic,
            series_cfg.pf_bins,
        )?;
        let summary = vec![
            ("reference", compare.escape_steps.display().to_string()),
            ("n_model", float_times.len().to_string()),
            ("n_reference", ref_times.len().to_string()),
            ("chi2", gof.chi2.to_string()),
            ("chi2_reduced", gof.chi2_reduced.to_string()),
            ("ks_d", gof.ks_d.to_string()),
            ("ks_p", gof.ks_p.to_string()),
        ];
        let path = unique_path(&out_dir, &format!("{stem}escape_gof"), &fp, "txt");
        write_summary_txt(&path, &summary, &fp)?;
        report.files.push(path);
        report.notes.push(format!(
            "{stem}vs reference: chi2 = {:.5} (reduced {:.5}), D = {:.3}, P = {:.3}",
            gof.chi2, gof.chi2_reduced, gof.ks_d, gof.ks_p
        ));
    }
    Ok(())
}

/// Runs a list of named experiments, merging the reports.
pub fn run_all(experiments: &[(String, ExperimentConfig)]) -> Result<RunReport> {
    let started = Instant::now();
    let mut merged = RunReport::default();
    for (name, config) in experiments {
        let rep = run_experiment(config, name)?;
        if merged.fingerprint.is_empty() {
            merged.fingerprint = rep.fingerprint.clone();
            merged.seed = rep.seed;
        }
        merged.files.extend(rep.files);
        merged.censored.extend(rep.censored);
        merged.notes.extend(rep.notes);
    }
    merged.wall_seconds = started.elapsed().as_secs_f64();
    Ok(merged)
}
