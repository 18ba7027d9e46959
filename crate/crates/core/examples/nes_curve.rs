//! Maps a mean-escape-time curve over the volatility reverting level and
//! classifies its shape.
//!
//! ```text
//! cargo run --release --example nes_curve [n_events]
//! ```

use escapelab_core::escape::ok_points;
use escapelab_core::*;

fn main() {
    let n_events: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);

    // revert-only regime: volatility sits at its reverting level b
    let model = ModelParams::Nlh(NlhParams::new(1e-2, 0.01, 0.0, 0.0));
    let spec = EscapeSpec {
        x_start: -1.1,
        x_abs: -6.0,
        v_start: 0.01,
        carry_volatility: true,
        max_time: Some(1e4),
    };
    let sim = SimConfig {
        dt: 0.01,
        seed: 7,
        n_events,
        workers: 2,
    };

    let values: Vec<f64> = (0..13)
        .map(|i| 1e-2 * 10f64.powf(3.0 * i as f64 / 12.0))
        .collect();
    let curve = met_sweep(
        SweepAxis::B,
        &values,
        &model,
        &spec,
        &sim,
        VStartPolicy::TrackB,
    )
    .expect("sweep runs");

    println!("{:>10}  {:>12}  {:>10}  {:>9}", "b", "MET", "std error", "censored");
    for p in &curve {
        match &p.met {
            Ok(m) => println!(
                "{:>10.4}  {:>12.3}  {:>10.3}  {:>8.2}%",
                p.value,
                m.met,
                m.std_error,
                100.0 * p.censored_fraction()
            ),
            Err(e) => println!("{:>10.4}  {e}", p.value),
        }
    }

    let points = ok_points(&curve);
    match detect_nonmonotonicity(&points) {
        Ok(class) => println!("\nshape: {class}"),
        Err(e) => println!("\nshape unavailable: {e}"),
    }
}
