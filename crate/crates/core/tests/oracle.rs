//! The row-wise engine against slow dense-matrix references.

mod common;

use common::*;
use proptest::prelude::*;
use qwalk::*;

fn engine_pure(cfg: &WalkConfig) -> Vec<f64> {
    evolve_pure(cfg).unwrap().position_distribution().probs().to_vec()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

fn shift_parts(kind: ShiftKind) -> (bool, Vec<Mat2>) {
    match kind {
        ShiftKind::Forward => (false, vec![]),
        ShiftKind::Reverse => (true, vec![]),
        ShiftKind::FlipShift => (false, vec![*gate(GateKind::PauliX).matrix()]),
    }
}

fn shift_of(k: u8) -> ShiftKind {
    [ShiftKind::Forward, ShiftKind::Reverse, ShiftKind::FlipShift][k as usize % 3]
}

fn gate_of(k: u8, phi: f64) -> GateOp {
    match k % 4 {
        0 => gate(GateKind::PauliZ),
        1 => gate(GateKind::PauliX),
        2 => gate(GateKind::PhaseShift(phi)),
        _ => gate(GateKind::Identity),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneous_walk_matches_dense_reference(
        xi in -3.2..3.2f64, th in 0.0..1.6f64, ze in -3.2..3.2f64,
        a in (-1.0..1.0f64, -1.0..1.0f64), b in (-1.0..1.0f64, -1.0..1.0f64),
        shift in 0u8..3, gates in proptest::collection::vec((0u8..4, -3.2..3.2f64), 0..3),
        cycle in proptest::option::of(3usize..12), steps in 0usize..14,
    ) {
        let norm = (a.0 * a.0 + a.1 * a.1 + b.0 * b.0 + b.1 * b.1).sqrt();
        prop_assume!(norm > 1e-3);
        let amps = [c(a.0 / norm, a.1 / norm), c(b.0 / norm, b.1 / norm)];
        let init = InitialState::new(amps[0], amps[1], 0).unwrap();
        let coin = build_coin(CoinParams::new(xi, th, ze));
        let mut pipe = StepPipeline::new(coin).with_shift(shift_of(shift));
        for &(g, phi) in &gates {
            pipe = pipe.with_gate(gate_of(g, phi));
        }
        let cfg = match cycle {
            Some(r) => WalkConfig::cycle(r, init, pipe.clone(), steps).unwrap(),
            None => WalkConfig::line(init, pipe.clone(), steps),
        };
        let topo = cfg.topology;
        let (inverted, mut post) = shift_parts(shift_of(shift));
        post.extend(pipe.symmetry_gates.iter().map(|g| *g.matrix()));
        let u = step_matrix(topo, coin.matrix(), inverted, &post);
        let mut v = initial_vector(topo, amps, 0);
        for _ in 0..steps {
            v = u.apply(&v);
        }
        prop_assert!(close(&engine_pure(&cfg), &marginal_of_vector(topo, &v), 1e-12));
    }

    #[test]
    fn inhomogeneous_walk_matches_dense_reference(
        coins in proptest::collection::vec((-3.2..3.2f64, 0.0..1.6f64, -3.2..3.2f64, 0u8..3), 1..12),
        basis in 0usize..2, prx in any::<bool>(),
    ) {
        let steps = coins.len();
        let overrides: Vec<StepOverride> = coins
            .iter()
            .map(|&(x, t, z, s)| StepOverride { coin: build_coin(CoinParams::new(x, t, z)), shift: shift_of(s) })
            .collect();
        let mut pipe = StepPipeline::new(CoinOp::hadamard());
        if prx {
            pipe.parity_each_step = true;
        }
        let cfg = WalkConfig::line(InitialState::basis(basis, 0), pipe, steps).with_overrides(overrides.clone());
        let topo = cfg.topology;
        let mut amps = [c(0.0, 0.0); 2];
        amps[basis] = c(1.0, 0.0);
        let mut v = initial_vector(topo, amps, 0);
        for o in &overrides {
            let (inverted, post) = shift_parts(o.shift);
            v = step_matrix(topo, o.coin.matrix(), inverted ^ prx, &post).apply(&v);
        }
        prop_assert!(close(&engine_pure(&cfg), &marginal_of_vector(topo, &v), 1e-12));
    }
}

fn channels() -> Vec<KrausChannel> {
    vec![
        phase_flip(0.13).unwrap(),
        bit_flip(0.31).unwrap(),
        gad_channel(0.2, 1.0).unwrap(),
        gad_channel(0.45, 0.7).unwrap(),
        gad_channel(0.9, 0.5).unwrap(),
    ]
}

#[test]
fn density_walks_match_dense_kraus_reference() {
    let coin = build_coin(CoinParams::from_degrees(20.0, 35.0, -50.0));
    let init = InitialState::new(c(0.6, 0.0), c(0.0, 0.8), 0).unwrap();
    for ch in channels() {
        for (cycle, gates) in [(None, vec![]), (Some(7), vec![gate(GateKind::PauliZ)]), (None, vec![gate(GateKind::PhaseShift(0.7))])] {
            let steps = 8;
            let mut pipe = StepPipeline::new(coin).with_channel(ch.clone());
            for g in &gates {
                pipe = pipe.with_gate(*g);
            }
            let cfg = match cycle {
                Some(r) => WalkConfig::cycle(r, init, pipe, steps).unwrap(),
                None => WalkConfig::line(init, pipe, steps),
            };
            let topo = cfg.topology;
            let post: Vec<Mat2> = gates.iter().map(|g| *g.matrix()).collect();
            let u = step_matrix(topo, coin.matrix(), false, &post);
            let rho0 = outer(&initial_vector(topo, init.coin(), 0));
            let reference = dense_density_walk(topo, &u, ch.operators(), rho0, steps);
            let rho = evolve_density(&cfg).unwrap();
            let n = rho.dim();
            let worst = (0..n * n)
                .map(|k| (rho.matrix()[k] - reference.a[k]).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "{} {:?}: {worst:e}", ch.label(), cycle);
            assert!(close(
                rho.position_distribution().probs(),
                &marginal_of_density(topo, &reference),
                1e-12
            ));
        }
    }
}

#[test]
fn density_state_stays_physical() {
    let coin = build_coin(CoinParams::from_degrees(0.0, 60.0, 0.0));
    for ch in channels() {
        let cfg = WalkConfig::line(InitialState::symmetric(0), StepPipeline::new(coin).with_channel(ch), 30);
        let rho = evolve_density(&cfg).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
        assert!(rho.trace().im.abs() < 1e-10);
        assert!(rho.hermiticity_defect() < 1e-10);
        assert!(rho.purity() <= 1.0 + 1e-10);
        let d = rho.position_distribution();
        assert!(d.probs().iter().all(|&p| p >= -1e-12));
        assert!((d.total() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn hadamard_distribution_keeps_step_parity() {
    let cfg = WalkConfig::line(InitialState::symmetric(0), StepPipeline::new(CoinOp::hadamard()), 100);
    let d = final_distribution(&cfg).unwrap();
    for (x, p) in d.reported() {
        if x.rem_euclid(2) == 1 {
            assert_eq!(p, 0.0, "odd site {x}");
        }
    }
    assert!((d.total() - 1.0).abs() < 1e-12);
}
