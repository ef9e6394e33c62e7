//! SNR support and best-of-N distribution of the VLC hop.
//!
//! cargo run --release --example vlc_statistics

use plcvlc::specfun::db_to_linear;
use plcvlc::vlc::{lambertian_order, ReceiverParams, VlcGeometry, VlcModel};

fn main() -> plcvlc::Result<()> {
    let rx = ReceiverParams { fov_half_angle: 75.0, ..ReceiverParams::default() };
    println!("{:>6} {:>5} {:>8} {:>12} {:>12}", "phi", "L", "m_v", "gamma_e", "gamma_c");
    for phi in [15.0, 30.0, 60.0] {
        for l in [2.0, 2.5, 3.0] {
            let m = VlcModel::new(VlcGeometry { vertical_len: l, cell_radius: 2.5 }, phi, &rx, db_to_linear(70.0), 4)?;
            let (ge, gc) = m.snr_support();
            println!("{phi:>6} {l:>5} {:>8.3} {ge:>12.4e} {gc:>12.4e}", lambertian_order(phi)?);
        }
    }

    let models = [1, 2, 4, 8]
        .iter()
        .map(|&n| VlcModel::new(VlcGeometry::default(), 15.0, &rx, db_to_linear(70.0), n))
        .collect::<plcvlc::Result<Vec<_>>>()?;
    let (ge, gc) = models[0].snr_support();
    println!("\nphi = 15 deg, L = 2.5 m, 70 dB: F_max(gamma) for N = 1, 2, 4, 8");
    for k in 0..=8 {
        let g = ge * (gc / ge).powf(k as f64 / 8.0);
        let row: Vec<String> = models.iter().map(|m| format!("{:>9.6}", m.cdf_max(g))).collect();
        println!("{g:>12.4e} {}", row.join(" "));
    }
    Ok(())
}
