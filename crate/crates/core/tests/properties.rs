use std::path::PathBuf;

use dce::cli::{Command, GridSpec, OutputFormat, RunConfig};
use dce::oracles::sawtooth;
use dce::{
    chi_of_t, cluster_interference, mean_particle_number, mode_phase, nonadiabatic_couplings, params_from, v_closed,
    CavityParams, Interference, ModeIndex, Speed, Squeeze,
};
use proptest::prelude::*;

fn mode(n: usize) -> ModeIndex {
    ModeIndex::new(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rho_and_duration_give_the_same_phase(v in 0.01f64..0.99, rho in 0.001f64..0.999, l_i in 0.1f64..10.0) {
        let a = params_from(Speed::Velocity(v), Squeeze::Rho(rho), l_i).unwrap();
        let b = params_from(Speed::Velocity(v), Squeeze::Duration((l_i - rho * l_i) / v), l_i).unwrap();
        // Both land on the same point of the circle; compare modulo 1.
        let gap = (a.theta() - b.theta()).abs();
        prop_assert!(gap.min(1.0 - gap) < 1e-12, "{} vs {}", a.theta(), b.theta());
    }

    #[test]
    fn integer_powers_of_doppler_have_zero_phase(v in 0.01f64..0.99, k in 1u32..8) {
        let p = CavityParams::new(Speed::Velocity(v), Squeeze::RhoPower(k)).unwrap();
        prop_assert_eq!(p.theta(), 0.0);
    }

    #[test]
    fn auxiliary_time_is_increasing_and_convex(v in 0.05f64..0.95, rho in 0.01f64..0.95) {
        let p = CavityParams::new(Speed::Velocity(v), Squeeze::Rho(rho)).unwrap();
        let t: Vec<f64> = (0..=100).map(|i| (p.duration() * i as f64 / 100.0).min(p.duration())).collect();
        let chi: Vec<f64> = t.iter().map(|&s| chi_of_t(&p, s).unwrap()).collect();
        for w in chi.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        for w in chi.windows(3) {
            prop_assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-12 * w[2].abs());
        }
    }

    #[test]
    fn particle_number_is_non_negative(gamma in 1.01f64..50.0, theta in 0.0f64..1.0, n in 1usize..20) {
        let d = CavityParams::new(Speed::Gamma(gamma), Squeeze::Theta(0.5)).unwrap().d();
        let r = mean_particle_number(mode(n), d, theta, 1e-8).unwrap();
        prop_assert!(r.value >= 0.0, "{r:?}");
    }

    #[test]
    fn mode_phase_has_unit_modulus(v in 0.01f64..0.99, theta in 0.0f64..1.0, n in 1usize..1000) {
        let p = CavityParams::new(Speed::Velocity(v), Squeeze::Theta(theta)).unwrap();
        prop_assert!((mode_phase(&p, mode(n)).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_phase_pair_block_vanishes(d in 1.01f64..1e4, n in 1usize..64, m in 1usize..64) {
        prop_assert_eq!(v_closed(mode(n), mode(m), d, 0.0).unwrap().norm(), 0.0);
    }

    #[test]
    fn sawtooth_has_unit_period(z in -5.0f64..5.0) {
        prop_assume!((z - z.round()).abs() > 1e-9);
        prop_assert!((sawtooth(z + 1.0) - sawtooth(z)).abs() < 1e-12);
    }

    #[test]
    fn constructive_order_respects_the_mode(gamma in 1.5f64..1000.0, theta in 0.0f64..1.0, n in 1usize..12) {
        let p = CavityParams::new(Speed::Gamma(gamma), Squeeze::Theta(theta)).unwrap();
        let (kin, class) = cluster_interference(&p, mode(n), 0.1);
        if class == Interference::Constructive {
            prop_assert!(2 * (kin.j as usize) < n, "{kin:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coupling_symmetries(size in 1usize..=64, which in 0usize..3) {
        let v = [0.1, 0.5, 0.9][which];
        let c = nonadiabatic_couplings(v, size).unwrap();
        for i in 0..size {
            for j in 0..size {
                let a = c.scattering[(i, j)];
                let scale = a.norm().max(1.0);
                prop_assert!((a.conj() + c.scattering[(j, i)]).norm() < 1e-14 * scale);
                prop_assert!((c.pairing[(i, j)] - c.pairing[(j, i)]).norm() < 1e-14 * c.pairing[(i, j)].norm().max(1.0));
            }
        }
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL
}

fn config() -> impl Strategy<Value = RunConfig> {
    let command = prop::option::of(prop_oneof![
        Just(Command::Spectrum),
        Just(Command::Scan),
        Just(Command::Maxima),
        Just(Command::Verify),
        Just(Command::Oracle),
    ]);
    let speed = (prop::option::of(finite()), prop::collection::vec(finite(), 0..4));
    let squeeze = (
        prop::option::of(finite()),
        prop::option::of(any::<u32>()),
        prop::option::of(finite()),
        prop::option::of(finite()),
        prop::option::of(finite()),
    );
    let policy = (
        prop::option::of(0usize..10_000),
        prop::collection::vec(1usize..1000, 0..5),
        prop::option::of(finite()),
        prop::option::of((finite(), finite(), 0usize..100_000).prop_map(|(start, stop, count)| GridSpec { start, stop, count })),
        prop::option::of("[a-z][a-z-]{0,11}"),
    );
    let output = (
        prop::option::of("[a-zA-Z0-9_./-]{1,24}".prop_map(PathBuf::from)),
        prop::option::of(prop_oneof![Just(OutputFormat::Csv), Just(OutputFormat::Json)]),
        prop::option::of(0usize..256),
    );
    (command, speed, squeeze, policy, output).prop_map(
        |(command, (v, gamma), (rho, rho_power, duration, l_i, theta), (n_max, modes, tol, grid, suite), (out, format, workers))| {
            RunConfig {
                command,
                v,
                gamma,
                rho,
                rho_power,
                duration,
                l_i,
                theta,
                n_max,
                modes,
                tol,
                grid,
                suite,
                out,
                format,
                workers,
            }
        },
    )
}

proptest! {
    #[test]
    fn config_round_trips(cfg in config()) {
        let text = cfg.emit();
        let back = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(back, cfg, "{}", text);
    }
}
