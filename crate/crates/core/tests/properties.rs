use plcvlc::cascade::CascadeModel;
use plcvlc::cli::{read_csv, write_csv, Row, Scale, SweepSpec, SweepVar};
use plcvlc::mc::{compare_report, McEstimate};
use plcvlc::plc::{normalize_fading, LognormalSumFit, PlcModel, PlcTopology};
use plcvlc::rng::split_evenly;
use plcvlc::specfun::{gauss_legendre_rule, std_normal_cdf};
use plcvlc::vlc::{VlcGeometry, VlcModel};
use proptest::prelude::*;

fn arb_model() -> impl Strategy<Value = CascadeModel> {
    (
        (1u32..=4, 1u32..=4, 1u32..=8),
        (2.0f64..20.0, 1.0f64..30.0, 0.005f64..0.05),
        (-10.0f64..30.0, 1.0f64..4.0, 1.0f64..4.0, 0.5f64..30.0, 40.0f64..140.0),
    )
        .prop_map(|((m, k, n), (a0, a1, a2), (plc_db, l, r, m_v, vlc_db))| {
            let fit = LognormalSumFit::new(a0, a1, a2, 0.0).unwrap();
            let plc = PlcModel::new(
                PlcTopology::new(m, k).unwrap(),
                normalize_fading(k, 1.0).unwrap(),
                fit,
                10f64.powf(plc_db / 10.0),
            )
            .unwrap();
            let geo = VlcGeometry { vertical_len: l, cell_radius: r };
            let vlc = VlcModel::from_constants(geo, m_v, 4.77e-5, 10f64.powf(vlc_db / 10.0), n).unwrap();
            CascadeModel::new(plc, vlc)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn end_to_end_cdf_is_a_cdf(m in arb_model(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (ge, gc) = m.support();
        let lo = ge * 1e-3;
        let x = lo * (gc * 10.0 / lo).powf(a.min(b));
        let y = lo * (gc * 10.0 / lo).powf(a.max(b));
        let (fx, fy) = (m.cdf(x), m.cdf(y));
        prop_assert!((0.0..=1.0).contains(&fx) && (0.0..=1.0).contains(&fy));
        prop_assert!(fx <= fy + 1e-15);
        prop_assert!(fx + 1e-15 >= m.plc.cdf(x));
        prop_assert!(fx + 1e-15 >= m.vlc.cdf_max(x));
        prop_assert!(m.pdf(x) >= 0.0);
    }

    #[test]
    fn cdf_is_continuous_at_support_endpoints(m in arb_model()) {
        let (ge, gc) = m.support();
        prop_assert!((m.cdf(ge) - m.cdf(ge * (1.0 - 1e-13))).abs() < 1e-9);
        prop_assert!((m.cdf(gc) - m.cdf(gc * (1.0 + 1e-13))).abs() < 1e-9);
    }

    #[test]
    fn outage_falls_with_vlc_snr_and_diversity(m in arb_model(), th_db in -10.0f64..20.0, step in 0.0f64..20.0) {
        let th = 10f64.powf(th_db / 10.0);
        let better = m.vlc.with_mean_snr(m.vlc.mean_snr * 10f64.powf(step / 10.0)).unwrap();
        let stronger = CascadeModel::new(m.plc, better);
        prop_assert!(stronger.outage_probability(th) <= m.outage_probability(th) + 1e-12);
        let mut more = m.clone();
        more.plc.topology.num_relays += 1;
        prop_assert!(more.outage_probability(th) <= m.outage_probability(th) + 1e-12);
    }

    #[test]
    fn plc_limit_is_the_fit_limit(m in arb_model()) {
        let big = m.plc.mean_branch_snr * 1e300;
        prop_assert!((m.plc.cdf(big) - m.plc.limit_cdf()).abs() < 1e-6);
        prop_assert!((m.plc.limit_cdf() - std_normal_cdf(m.plc.fit.a0).powi(m.plc.topology.num_relays as i32)).abs() < 1e-15);
    }

    #[test]
    fn split_covers_total(total in 0u64..1_000_000, parts in 1u64..64) {
        let chunks = split_evenly(total, parts);
        prop_assert_eq!(chunks.len() as u64, parts);
        prop_assert_eq!(chunks.iter().sum::<u64>(), total);
        let (lo, hi) = (chunks.iter().min().unwrap(), chunks.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
    }

    #[test]
    fn quadrature_weights_are_positive_and_sum_to_two(order in 1usize..=256) {
        let rule = gauss_legendre_rule(order).unwrap();
        prop_assert!(rule.weights().iter().all(|&w| w > 0.0));
        prop_assert!((rule.weights().iter().sum::<f64>() - 2.0).abs() < 1e-12);
        prop_assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sweep_grids_are_increasing(start in -50.0f64..50.0, span in 0.1f64..100.0, points in 2usize..200, log in any::<bool>()) {
        let (start, scale) = if log { (start.abs() + 0.1, Scale::Log) } else { (start, Scale::Linear) };
        let s = SweepSpec::new(SweepVar::VlcMeanSnrDb, start, start + span, points, scale).unwrap();
        let v = s.values();
        prop_assert_eq!(v.len(), points);
        prop_assert_eq!(v[0], start);
        prop_assert_eq!(*v.last().unwrap(), start + span);
        prop_assert!(v.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(SweepSpec::parse(&s.to_string()).unwrap().points, points);
    }

    #[test]
    fn csv_round_trips(analytic in -1e6f64..1e6, mean in -1e6f64..1e6, se in 0.0f64..1e3, value in -1e3f64..1e3) {
        let est = McEstimate { mean, std_error: se, trials: 1000, ci95_low: mean - 1.96 * se, ci95_high: mean + 1.96 * se };
        let rows = vec![Row { sweep_var: "num_leds".into(), sweep_value: Some(value), analytic, agreement: Some(compare_report(analytic, &est)) }];
        let text = write_csv(&rows);
        let back = read_csv(&text).unwrap();
        prop_assert_eq!(write_csv(&back), text);
        prop_assert_eq!(back[0].passed(), rows[0].passed());
    }

    #[test]
    fn agreement_z_scales_with_deviation(mean in -10.0f64..10.0, se in 1e-6f64..1.0, k in 0.0f64..10.0) {
        let est = McEstimate { mean, std_error: se, trials: 1000, ci95_low: 0.0, ci95_high: 0.0 };
        let r = compare_report(mean + k * se, &est);
        prop_assert!((r.z - k).abs() < 1e-6 * k.max(1.0));
        prop_assert_eq!(r.pass, r.z < 3.0);
    }
}
