//! Plot-ready output files: CSV tables and flat key/value summaries,
//! each carrying the config fingerprint in a comment header.
//!
//! File contents are fully determined by the data passed in (no
//! timestamps), so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::escape::{EscapeEnsemble, SweepPoint};
use crate::stats::{AcfResult, EmpiricalPf};

/// Joins `dir/stem.<fp8>.ext`, bumping a `.vN` suffix instead of
/// overwriting when the name is already taken.
pub fn unique_path(dir: &Path, stem: &str, fingerprint: &str, ext: &str) -> PathBuf {
    let fp8 = &fingerprint[..fingerprint.len().min(8)];
    let first = dir.join(format!("{stem}.{fp8}.{ext}"));
    if !first.exists() {
        return first;
    }
    for v in 2.. {
        let candidate = dir.join(format!("{stem}.{fp8}.v{v}.{ext}"));
        if !candidate.exists() {
            return candidate;
        }
    }
    unreachable!()
}

/// One row per event: escape flag, time and the variance bookends.
pub fn write_ensemble_csv(path: &Path, ens: &EscapeEnsemble) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# fingerprint: {}", ens.fingerprint);
    let _ = writeln!(out, "# censored: {} of {}", ens.censored_count, ens.n_events());
    let _ = writeln!(out, "# units: dimensionless time");
    let _ = writeln!(out, "event,escaped,time,v_initial,v_final");
    let mut times = ens.times.iter();
    for i in 0..ens.n_events() {
        let t = if ens.escaped[i] {
            *times.next().expect("times aligned with escaped flags")
        } else {
            f64::NAN
        };
        let _ = writeln!(
            out,
            "{i},{},{},{},{}",
            u8::from(ens.escaped[i]),
            t,
            ens.v_initial[i],
            ens.v_final[i]
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// One row per sweep point; failed points carry the error message.
pub fn write_sweep_csv(
    path: &Path,
    axis_name: &str,
    curve: &[SweepPoint],
    fingerprint: &str,
) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# fingerprint: {fingerprint}");
    let _ = writeln!(out, "# axis: {axis_name}");
    let _ = writeln!(out, "# units: dimensionless time");
    let _ = writeln!(
        out,
        "{axis_name},met,met_std_error,n_events,censored_fraction,error"
    );
    for p in curve {
        match &p.met {
            Ok(m) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},",
                    p.value,
                    m.met,
                    m.std_error,
                    p.n_events,
                    p.censored_fraction()
                );
            }
            Err(e) => {
                let msg = e.to_string().replace(',', ";");
                let _ = writeln!(out, "{},,,{},{},{msg}", p.value, p.n_events, p.censored_fraction());
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Binned probability function: one row per bin.
pub fn write_pf_csv(path: &Path, pf: &EmpiricalPf, fingerprint: &str) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# fingerprint: {fingerprint}");
    let _ = writeln!(out, "# binning: {:?}", pf.binning);
    let _ = writeln!(out, "# n_samples: {}", pf.n_samples);
    let _ = writeln!(out, "bin_lo,bin_hi,center,density");
    let centers = pf.centers();
    for (i, d) in pf.densities.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            pf.bin_edges[i],
            pf.bin_edges[i + 1],
            centers[i],
            d
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Autocorrelation function: one row per lag.
pub fn write_acf_csv(path: &Path, acf: &AcfResult, fingerprint: &str) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# fingerprint: {fingerprint}");
    let _ = writeln!(out, "lag,acf");
    for (k, v) in acf.lags.iter().zip(&acf.values) {
        let _ = writeln!(out, "{k},{v}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Flat `key = value` summary of scalar statistics.
pub fn write_summary_txt(path: &Path, pairs: &[(&str, String)], fingerprint: &str) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# fingerprint: {fingerprint}");
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Pooled escape times in steps, one integer per line.
pub fn write_escape_steps(path: &Path, steps: &[u64], fingerprint: &str) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# fingerprint: {fingerprint}");
    for s in steps {
        let _ = writeln!(out, "{s}");
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::escape::MetEstimate;

    #[test]
    fn unique_path_versions_instead_of_overwriting() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = unique_path(dir.path(), "curve", "abcdef0123456789", "csv");
        assert!(p1.file_name().unwrap().to_str().unwrap() == "curve.abcdef01.csv");
        fs::write(&p1, "x").unwrap();
        let p2 = unique_path(dir.path(), "curve", "abcdef0123456789", "csv");
        assert!(p2.file_name().unwrap().to_str().unwrap() == "curve.abcdef01.v2.csv");
        fs::write(&p2, "x").unwrap();
        let p3 = unique_path(dir.path(), "curve", "abcdef0123456789", "csv");
        assert!(p3.file_name().unwrap().to_str().unwrap() == "curve.abcdef01.v3.csv");
    }

    #[test]
    fn sweep_csv_reports_failed_points() {
        let dir = tempfile::tempdir().unwrap();
        let curve = vec![
            SweepPoint {
                value: 0.1,
                met: Ok(MetEstimate {
                    met: 12.0,
                    std_error: 0.5,
                    n_events: 100,
                }),
                n_events: 100,
                censored_count: 0,
            },
            SweepPoint {
                value: 0.2,
                met: Err(crate::error::Error::DegenerateEnsemble(100)),
                n_events: 100,
                censored_count: 100,
            },
        ];
        let path = dir.path().join("sweep.csv");
        write_sweep_csv(&path, "b", &curve, "deadbeef").unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# fingerprint: deadbeef\n"));
        assert!(text.contains("0.1,12,0.5,100,0,"));
        assert!(text.contains("degenerate ensemble"));
    }
}
