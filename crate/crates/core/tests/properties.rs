use proptest::prelude::*;

use tfi_core::channel::{apply_scenario, ChannelScenario, NoiseModel, TapPreset};
use tfi_core::harness::{
    read_iq_capture, read_json_results, render_results, write_iq_capture, CaptureMeta,
    OutputFormat, ReceiverKind, SweepResultRow,
};
use tfi_core::phy::{assemble_symbol, fft, Constellation, Modulation, OfdmConfig};
use tfi_core::receiver::{polyphase_split, receive_frame, FrameFormat, GroundTruth, ReceiverConfig};
use tfi_core::transmitter::{build_frame, upsample_bandlimited, PREAMBLE_LEN};
use tfi_core::Complex64;

fn scheme() -> impl Strategy<Value = Modulation> {
    prop::sample::select(Modulation::ALL.to_vec())
}

fn overclock() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 2, 4, 8])
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn bits(n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polyphase_split_interleave_round_trip(
        g in overclock(),
        x in prop::collection::vec(complex(), 1..40),
    ) {
        let stream: Vec<Complex64> = x.iter().cycle().take(x.len() * g).copied().collect();
        let set = polyphase_split(&stream, g).unwrap();
        prop_assert_eq!(set.overclock(), g);
        for (p, copy) in set.copies().iter().enumerate() {
            for (n, v) in copy.iter().enumerate() {
                prop_assert_eq!(*v, stream[n * g + p]);
            }
        }
        prop_assert_eq!(set.interleave(), stream);
    }

    #[test]
    fn map_then_demap_is_identity(s in scheme(), seed in bits(6 * 40)) {
        let c = Constellation::new(s);
        let n = (seed.len() / s.bits_per_symbol()) * s.bits_per_symbol();
        let b = &seed[..n];
        let points = c.map_bits(b).unwrap();
        prop_assert_eq!(c.demap_bits(&points), b.to_vec());
    }

    #[test]
    fn upsampling_interpolates_through_base_samples(
        g in overclock(),
        x in prop::collection::vec(complex(), 64),
    ) {
        let up = upsample_bandlimited(&x, g).unwrap();
        prop_assert_eq!(up.len(), 64 * g);
        for (k, v) in x.iter().enumerate() {
            prop_assert!((up[k * g] - v).norm() < 1e-9);
        }
    }

    #[test]
    fn prefix_removal_recovers_grid(
        data in prop::collection::vec(complex(), 52),
        pilots in prop::collection::vec(complex(), 4),
    ) {
        let cfg = OfdmConfig::default();
        let sym = assemble_symbol(&data, &pilots, &cfg).unwrap();
        prop_assert_eq!(&sym[..16], &sym[64..80]);
        let spec = fft(&sym[16..]).unwrap();
        for (&l, v) in cfg.data_subcarriers.iter().zip(&data) {
            prop_assert!((spec[cfg.bin(l)] - v).norm() < 1e-9);
        }
        for (&l, v) in cfg.pilot_subcarriers.iter().zip(&pilots) {
            prop_assert!((spec[cfg.bin(l)] - v).norm() < 1e-9);
        }
    }

    #[test]
    fn base_copy_of_oversampled_frame_is_base_waveform(
        s in scheme(),
        g in overclock(),
        b in bits(104),
    ) {
        let cfg = OfdmConfig::default().with_overclock(g);
        let bp = build_frame(&b, s, &cfg).unwrap();
        let set = polyphase_split(&bp.oversampled_waveform, g).unwrap();
        prop_assert_eq!(set.copy(0).len(), bp.base_waveform.len());
        for (a, b) in set.copy(0).iter().zip(&bp.base_waveform) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn channel_output_is_reproducible(
        g in overclock(),
        seed in any::<u64>(),
        snr in 0.0f64..30.0,
        offset in 0usize..100,
    ) {
        let cfg = OfdmConfig::default().with_overclock(g);
        let bp = build_frame(&[1, 0, 1, 1], Modulation::Qpsk, &cfg).unwrap();
        let sc = ChannelScenario::new(
            TapPreset::TwoRay.taps(g), 300.0, offset, snr, NoiseModel::Brickwall, seed,
        ).unwrap();
        let a = apply_scenario(&bp, &sc, &cfg).unwrap();
        let b = apply_scenario(&bp, &sc, &cfg).unwrap();
        prop_assert_eq!(a.samples, b.samples);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn payload_symbol_rotation_is_absorbed_by_pilots(
        s in scheme(),
        g in overclock(),
        phi in -3.1f64..3.1,
        which in 0usize..3,
        b in bits(6 * 52 * 3),
    ) {
        let cfg = OfdmConfig::default().with_overclock(g);
        let n = 52 * 3 * s.bits_per_symbol();
        let bits = &b[..n];
        let bp = build_frame(bits, s, &cfg).unwrap();
        let cap = apply_scenario(&bp, &ChannelScenario::ideal().with_timing_offset(40 * g), &cfg)
            .unwrap();
        let mut rotated = cap.samples.clone();
        let start = (cap.frame_start_base as usize + PREAMBLE_LEN + which * 80) * g;
        let rot = Complex64::from_polar(1.0, phi);
        for v in &mut rotated[start..start + 80 * g] {
            *v *= rot;
        }
        let format = FrameFormat { scheme: s, payload_symbols: 3 };
        let truth = GroundTruth { bits, ltf_start_base: cap.ltf_start_base() };
        let rx = ReceiverConfig::default().with_noise_floor(0.0);
        let plain = receive_frame(&cap.samples, &cfg, &rx, format, Some(truth)).unwrap();
        let turned = receive_frame(&rotated, &cfg, &rx, format, Some(truth)).unwrap();
        prop_assert_eq!(plain.bit_errors, Some(0));
        prop_assert_eq!(&turned.decoded_bits, &plain.decoded_bits);
    }

    #[test]
    fn iq_file_round_trip(
        x in prop::collection::vec((any::<f32>(), any::<f32>()), 0..300),
        rate in 1.0f64..1e9,
        g in overclock(),
    ) {
        let x: Vec<Complex64> = x
            .into_iter()
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| Complex64::new(a as f64, b as f64))
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tfiq");
        let meta = CaptureMeta { sample_rate_hz: rate, overclock: g as u16 };
        write_iq_capture(&path, &x, meta).unwrap();
        let (y, m) = read_iq_capture(&path).unwrap();
        prop_assert_eq!(y, x);
        prop_assert_eq!(m, meta);
    }

    #[test]
    fn json_results_round_trip(
        ber in 0.0f64..1.0,
        se in 0.0f64..0.1,
        trials in 1usize..5000,
        g in overclock(),
        s in scheme(),
    ) {
        let row = SweepResultRow {
            snr_db: 11.0,
            g,
            scheme: s,
            noise_model: NoiseModel::Brickwall,
            receiver: ReceiverKind::Baseline,
            trials,
            ber_mean: ber,
            ber_stderr: se,
            mean_abs_sync_error: 0.25,
            sync_error_std: f64::NAN,
            miss_rate: 0.0,
            cfo_rmse_hz: 3.5,
            wall_time_s: 0.0,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let mut out = Vec::new();
        render_results(std::slice::from_ref(&row), OutputFormat::Json, &mut out).unwrap();
        std::fs::write(&path, out).unwrap();
        let back = read_json_results(&path).unwrap().remove(0);
        prop_assert_eq!(back.trials, trials);
        prop_assert_eq!(back.scheme, s);
        prop_assert!((back.ber_mean - ber).abs() <= 5e-9 * ber.max(1e-300));
        prop_assert!((back.ber_stderr - se).abs() <= 5e-9 * se.max(1e-300));
        prop_assert!(back.sync_error_std.is_nan());
    }
}
