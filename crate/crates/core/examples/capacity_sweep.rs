//! Ergodic capacity against the mean PLC branch SNR, with its three terms.
//!
//! cargo run --release --example capacity_sweep

use plcvlc::cli::{recipes, FitCache, RunConfig, SweepVar};

fn main() -> plcvlc::Result<()> {
    let fits = FitCache::new();
    let base = RunConfig::parse(recipes::find("fig5_vlc30").expect("shipped recipe"))?;
    for vlc_db in [30.0, 90.0] {
        let base = SweepVar::VlcMeanSnrDb.apply(&base, vlc_db);
        println!("mean VLC SNR {vlc_db} dB");
        println!("{:>8} {:>14} {:>14} {:>14} {:>14}", "PLC dB", "C1", "C2", "C3", "C");
        for plc_db in (0..=8).map(|k| 5.0 * k as f64) {
            let cfg = SweepVar::PlcMeanSnrDb.apply(&base, plc_db);
            let t = cfg.build(&fits)?.capacity_terms(&cfg.metric_config())?;
            println!("{plc_db:>8.1} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}", t.c1, t.c2, t.c3, t.capacity());
        }
    }
    Ok(())
}
