//! Fit Φ(a₀ − a₁x^(−a₂/κ)) to sums of K lognormal wire gains.
//!
//! cargo run --release --example lognormal_sum_fit

use plcvlc::plc::{fit_lognormal_sum, normalize_fading, FitConfig, PlcTopology};

fn main() -> plcvlc::Result<()> {
    let cfg = FitConfig::default();
    println!("{:>2} {:>9} {:>10} {:>10} {:>10} {:>10}", "K", "mu_h", "a0", "a1", "a2", "fit_error");
    for k in 1..=4 {
        let fading = normalize_fading(k, 1.0)?;
        let fit = fit_lognormal_sum(&PlcTopology::new(1, k)?, &fading, &cfg)?;
        println!(
            "{k:>2} {:>9.4} {:>10.4} {:>10.4} {:>10.6} {:>10.2e}",
            fading.mu_h, fit.a0, fit.a1, fit.a2, fit.fit_error
        );
    }
    Ok(())
}
