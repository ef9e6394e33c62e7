//! Analytic metrics against the Monte Carlo oracle at a few operating points.
//!
//! cargo run --release --example mc_validation

use plcvlc::cli::{analytic_value, mc_value, FitCache, Metric, RunConfig};
use plcvlc::mc::compare_report;

fn main() -> plcvlc::Result<()> {
    let fits = FitCache::new();
    let cases = [
        (Metric::Op, "plc.m = 4\nvlc.n = 4\nvlc.semiangle_deg = 30\nvlc.mean_snr_db = 110"),
        (Metric::Bep, "plc.m = 4\nvlc.n = 4\nplc.mean_snr_db = 15\nvlc.fov_deg = 75\nvlc.semiangle_deg = 15\nvlc.mean_snr_db = 70"),
        (Metric::Capacity, "plc.m = 3\nvlc.n = 4\nvlc.fov_deg = 75\nvlc.mean_snr_db = 90"),
    ];
    println!("{:>9} {:>14} {:>14} {:>12} {:>7} {:>5}", "metric", "analytic", "mc_mean", "mc_stderr", "z", "pass");
    for (metric, text) in cases {
        let mut cfg = RunConfig::parse(text)?;
        cfg.mc.trials = 1_000_000;
        let analytic = analytic_value(&cfg, metric, &fits)?;
        let est = mc_value(&cfg, metric, &fits, &cfg.mc)?;
        let r = compare_report(analytic, &est);
        println!(
            "{:>9} {:>14.6e} {:>14.6e} {:>12.3e} {:>7.2} {:>5}",
            metric.name(),
            r.analytic,
            r.mc_mean,
            r.mc_stderr,
            r.z,
            r.pass
        );
    }
    Ok(())
}
