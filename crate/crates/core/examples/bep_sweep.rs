//! Average BPSK bit-error probability for the Fig. 4 cells.
//!
//! cargo run --release --example bep_sweep

use plcvlc::cascade::{CascadeModel, MetricConfig, ModulationParams};
use plcvlc::plc::{fit_lognormal_sum, normalize_fading, FitConfig, PlcModel, PlcTopology};
use plcvlc::specfun::db_to_linear;
use plcvlc::vlc::{ReceiverParams, VlcGeometry, VlcModel};

fn main() -> plcvlc::Result<()> {
    let topology = PlcTopology::new(4, 3)?;
    let fading = normalize_fading(3, 1.0)?;
    let fit = fit_lognormal_sum(&topology, &fading, &FitConfig::default())?;
    let plc = PlcModel::new(topology, fading, fit, db_to_linear(15.0))?;
    let rx = ReceiverParams { fov_half_angle: 75.0, ..ReceiverParams::default() };
    let cfg = MetricConfig::default();

    println!("{:>6} {:>5} {:>14} {:>14} {:>14}", "phi", "L", "30 dB", "50 dB", "70 dB");
    for phi in [15.0, 60.0] {
        for l in [2.0, 2.5, 3.0] {
            let mut row = Vec::new();
            for db in [30.0, 50.0, 70.0] {
                let vlc = VlcModel::new(VlcGeometry { vertical_len: l, cell_radius: 2.5 }, phi, &rx, db_to_linear(db), 4)?;
                let bep = CascadeModel::new(plc, vlc).average_bep(&ModulationParams::BPSK, &cfg)?;
                row.push(format!("{bep:>14.6e}"));
            }
            println!("{phi:>6} {l:>5} {}", row.join(" "));
        }
    }
    Ok(())
}
