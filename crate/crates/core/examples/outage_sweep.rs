//! Outage probability against the mean VLC SNR for the Fig. 3 cell.
//!
//! cargo run --release --example outage_sweep

use plcvlc::cli::{recipes, run_metric, FitCache, Metric, RunConfig, SweepSpec};

fn main() -> plcvlc::Result<()> {
    let fits = FitCache::new();
    let sweep = SweepSpec::parse("vlc_mean_snr_db:20:140:13")?;
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "dB", "M1 N1", "M4 N1", "M1 N4", "M4 N4");
    let mut columns = Vec::new();
    for name in ["fig3_m1_n1", "fig3_m4_n1", "fig3_m1_n4", "fig3_m4_n4"] {
        let cfg = RunConfig::parse(recipes::find(name).expect("shipped recipe"))?;
        columns.push(run_metric(&cfg, Metric::Op, Some(&sweep), false, &fits)?);
    }
    for (i, db) in sweep.values().iter().enumerate() {
        let row: Vec<String> = columns.iter().map(|c| format!("{:>12.6}", c[i].analytic)).collect();
        println!("{db:>8.1} {}", row.join(" "));
    }
    Ok(())
}
