use absorb_core::planar::build_planar_example;
use absorb_core::simulator::{run_with_seed, simulate_closed_loop, InitialState};
use absorb_core::trajectory::{composite_norm, fit_decay_rate};
use absorb_core::{generate_partition, InitialData, InputHistory, SimConfig, Vector};
use proptest::prelude::*;

fn v2(a: f64, b: f64) -> Vector {
    Vector::from_vec(vec![a, b])
}

fn config(horizon: f64) -> SimConfig {
    SimConfig {
        horizon,
        ..SimConfig::default()
    }
}

#[test]
fn delayed_run_keeps_sublevel_bounds_and_decays() {
    let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
    let plant = plant.with_delays(0.25, 0.25).unwrap();
    let init = InitialData::constant(&plant, v2(1.0, -1.0), v2(0.0, 0.0), Vector::zeros(1)).unwrap();
    let (traj, summary) = run_with_seed(&plant, &assm, &blend, &config(40.0), &init, 0.01, 0.5, (20.0, 40.0)).unwrap();

    let bound = assm.v(&v2(1.0, -1.0)).max(1.0) + 1e-6;
    assert!(traj.rows.iter().all(|row| row.v_x <= bound));
    assert!(traj.node_max_vz <= 1.5 + 1e-6);
    assert!(summary.sigma_hat.unwrap() > 0.0);
    assert!(summary.terminal_norm < summary.initial_norm);
    for reset in &traj.resets {
        assert_eq!(reset.w_after[0].to_bits(), plant.h(&reset.x_delayed)[0].to_bits());
    }
}

#[test]
fn composite_norm_of_run_matches_definition_at_start() {
    let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
    let plant = plant.with_delays(0.25, 0.25).unwrap();
    let init = InitialData::new(
        &plant,
        InitialState::Table(vec![(-0.25, v2(0.0, 2.0)), (0.0, v2(1.0, 0.0))]),
        v2(0.0, 1.0),
        InputHistory::from_segments(
            vec![
                (-0.5, Vector::from_element(1, 0.5)),
                (-0.1, Vector::from_element(1, -0.2)),
            ],
            0.0,
        )
        .unwrap(),
        Vector::zeros(1),
    )
    .unwrap();
    let partition = generate_partition(0.01, 1.0, 3, 0.5).unwrap();
    let traj = simulate_closed_loop(&plant, &assm, &blend, &partition, &config(1.0), &init).unwrap();
    assert_eq!(composite_norm(&traj, 0.0, 0.25, 0.25).unwrap(), 3.5);
    assert_eq!(traj.rows[0].norm, 3.5);
    assert!(fit_decay_rate(&traj, 0.0, 1.0).is_ok());
}

#[test]
fn delay_free_run_has_point_norms() {
    let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
    let init = InitialData::constant(&plant, v2(0.6, 0.8), v2(0.0, 0.5), Vector::zeros(1)).unwrap();
    let partition = generate_partition(0.01, 2.0, 0, 0.5).unwrap();
    let traj = simulate_closed_loop(&plant, &assm, &blend, &partition, &config(2.0), &init).unwrap();
    for row in &traj.rows {
        let expected = row.x.norm() + row.z.norm();
        assert!((row.norm - expected).abs() <= 1e-15 * (1.0 + expected));
        assert!((composite_norm(&traj, row.t, 0.0, 0.0).unwrap() - expected).abs() <= 1e-15 * (1.0 + expected));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inputs_are_legal_and_held(seed in 0u64..1000, x1 in -3.0f64..3.0, x2 in -3.0f64..3.0, min_frac in 0.1f64..1.0) {
        let (plant, assm, blend) = build_planar_example(0.01, 1.5, 0.5).unwrap();
        let plant = plant.with_delays(0.1, 0.15).unwrap();
        let init = InitialData::constant(&plant, v2(x1, x2), v2(0.0, 0.0), Vector::zeros(1)).unwrap();
        let partition = generate_partition(0.02, 1.0, seed, min_frac).unwrap();
        let traj = simulate_closed_loop(&plant, &assm, &blend, &partition, &config(1.0), &init).unwrap();
        for (start, end, u) in traj.inputs.segments() {
            prop_assert!(plant.input_box().contains(u));
            if start >= 0.0 {
                prop_assert!((end - start - 0.05).abs() < 1e-12);
            }
        }
        let bound = assm.v(&v2(x1, x2)).max(1.0) + 1e-6;
        prop_assert!(traj.node_max_vx <= bound);
    }

    #[test]
    fn partitions_respect_gap_bound(ts in 0.001f64..0.1, horizon in 0.5f64..5.0, seed in any::<u64>(), min_frac in 0.05f64..=1.0) {
        let p = generate_partition(ts, horizon, seed, min_frac).unwrap();
        prop_assert_eq!(p.times()[0], 0.0);
        prop_assert!(p.last() >= horizon);
        for w in p.times().windows(2) {
            prop_assert!(w[1] > w[0]);
            prop_assert!(w[1] - w[0] <= ts * (1.0 + 1e-9));
        }
    }
}
