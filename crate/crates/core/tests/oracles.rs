//! Worked examples checked against independent oracles: brute-force
//! enumeration, quadrature, and hand-derived closed forms.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use qgames_core::equilibria::{
    best_response, dominant_strategies, grid_nash, pure_nash, Domain, GridOptions, ParamRange,
};
use qgames_core::games::{
    gvw_expected_gains, gvw_honest_state, penny_flip, penny_flip_bimatrix, penny_flip_optimal_q,
    penny_flip_two_move, prisoners_dilemma, wiesner_round, Bit, GvwSetup, Variant, WiesnerRound,
};
use qgames_core::linalg::{c, re};
use qgames_core::protocols::{
    issue_banknote, sample_haar_qubit, simulate_gvw, simulate_wiesner, sweep, BobPolicy, SimConfig,
    TrentPolicy,
};
use qgames_core::quantum::{apply_channel, density_from_pure, StateVector};
use qgames_core::{flip_channel, play, Player, Strategy};

// --- classical tables --------------------------------------------------------

#[test]
fn penny_table_has_no_dominance_and_no_pure_equilibrium() {
    // Oracle: direct inequality checks on the literal table.
    let t = [[-1.0, 1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];
    let row_dom = (0..2).any(|r| (0..4).all(|c| (0..2).all(|r2| t[r][c] >= t[r2][c])));
    let col_dom = (0..4).any(|c| (0..2).all(|r| (0..4).all(|c2| -t[r][c] >= -t[r][c2])));
    assert!(!row_dom && !col_dom);

    let g = penny_flip_bimatrix();
    assert_eq!(dominant_strategies(&g), (vec![], vec![]));
    assert!(pure_nash(&g).is_empty());
}

#[test]
fn pd_table_entries() {
    let g = prisoners_dilemma();
    assert_eq!((g.pa(0, 1), g.pb(0, 1)), (0.0, 5.0));
    for r in 0..2 {
        for col in 0..2 {
            assert_eq!(g.pb(r, col), g.pa(col, r));
        }
    }
}

// --- play ----------------------------------------------------------------------

#[test]
fn picard_wins_against_flip_then_stay() {
    let g = penny_flip();
    let (rho, pay) = play(
        &g,
        &Strategy::PureClassical(vec![0]),
        &Strategy::PureClassical(vec![1, 0]),
    )
    .unwrap();
    assert_eq!(pay.p_a, 1.0);
    assert_eq!(rho.get(1, 1), re(1.0));
}

#[test]
fn half_flip_equalizes_the_diagonal() {
    let mut r = common::rng(5);
    let ch = flip_channel(0.5).unwrap();
    for _ in 0..20 {
        let rho = common::random_density(&mut r, 2);
        let out = apply_channel(&rho, &ch).unwrap();
        assert!((out.get(0, 0).re - 0.5).abs() < 1e-12);
        assert!((out.get(1, 1).re - 0.5).abs() < 1e-12);
    }
}

#[test]
fn optimal_q_state_is_fixed_by_picard() {
    // After Q's first move and any classical mix by Picard, the coin is
    // unchanged.
    let Strategy::QuantumUnitary(ops) = penny_flip_optimal_q() else {
        unreachable!()
    };
    let after_q = density_from_pure(&StateVector::basis(2, 0).unwrap().apply(&ops[0]).unwrap());
    for k in 0..=10 {
        let out = apply_channel(&after_q, &flip_channel(k as f64 / 10.0).unwrap()).unwrap();
        assert!(out.max_abs_diff(&after_q) < 1e-12);
    }
}

// --- grids -------------------------------------------------------------------

#[test]
fn fixed_optimal_q_makes_every_picard_point_an_equilibrium() {
    let g = penny_flip();
    let q_only = Domain::Points(vec![("optimal".into(), penny_flip_optimal_q())]);
    let rep = grid_nash(&g, &Domain::flip_unit(), &q_only, GridOptions::default()).unwrap();
    assert_eq!(rep.profiles.len(), 21);
    assert!(rep
        .profiles
        .iter()
        .all(|p| (p.payoff_a + 1.0).abs() < 1e-12));
}

#[test]
fn infinite_epsilon_flags_everything() {
    let g = penny_flip_two_move();
    let rep = grid_nash(
        &g,
        &Domain::flip_unit(),
        &Domain::Pure,
        GridOptions {
            resolution: 5,
            epsilon: f64::INFINITY,
        },
    )
    .unwrap();
    assert_eq!(rep.profiles.len(), 5 * 2);
    assert_eq!(rep.grid_meta.profiles_searched, 10);
}

#[test]
fn grid_errors() {
    let g = penny_flip_two_move();
    let opts = |resolution| GridOptions {
        resolution,
        epsilon: 1e-6,
    };
    assert!(grid_nash(&g, &Domain::Pure, &Domain::Pure, opts(1)).is_err());
    assert!(grid_nash(&g, &Domain::Points(vec![]), &Domain::Pure, opts(3)).is_err());
    let bad = Domain::Flip {
        p: ParamRange::closed(1.0, 0.0),
    };
    assert!(grid_nash(&g, &bad, &Domain::Pure, opts(3)).is_err());
}

#[test]
fn picard_stays_when_q_favours_down() {
    // bb > aa: staying leaves spin down more likely, so p = 0.
    let g = penny_flip_two_move();
    let alpha: f64 = 1.2;
    assert!(alpha.sin().powi(2) > alpha.cos().powi(2));
    let q = Strategy::QuantumUnitary(vec![qgames_core::u2_angles(alpha, 0.3, 1.1).unwrap()]);
    let (pt, value) = best_response(&g, Player::A, &q, &Domain::flip_unit(), 21).unwrap();
    assert_eq!(pt.params, vec![0.0]);
    let expect = alpha.sin().powi(2) - alpha.cos().powi(2);
    assert!((value - expect).abs() < 1e-12);
}

#[test]
fn q_plays_a_equals_one_against_rare_flips() {
    let g = penny_flip_two_move();
    let picard = Strategy::flip(0.3).unwrap();
    let (pt, value) = best_response(&g, Player::B, &picard, &Domain::su2_full(), 9).unwrap();
    assert_eq!(pt.params[0], 0.0);
    assert!((value - 0.4).abs() < 1e-12);
}

#[test]
fn single_point_domain_is_its_own_best_response() {
    let g = penny_flip_two_move();
    let only = Domain::Points(vec![("stay".into(), Strategy::PureClassical(vec![0]))]);
    let (pt, _) =
        best_response(&g, Player::A, &Strategy::PureClassical(vec![1]), &only, 2).unwrap();
    assert_eq!(pt.label, "stay");
}

// --- identification rounds ---------------------------------------------------

fn gauss_legendre_8() -> ([f64; 8], [f64; 8]) {
    (
        [
            -0.960_289_856_497_536_2,
            -0.796_666_477_413_626_7,
            -0.525_532_409_916_329,
            -0.183_434_642_495_649_8,
            0.183_434_642_495_649_8,
            0.525_532_409_916_329,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_2,
        ],
        [
            0.101_228_536_290_376_3,
            0.222_381_034_453_374_5,
            0.313_706_645_877_887_3,
            0.362_683_783_378_362,
            0.362_683_783_378_362,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_5,
            0.101_228_536_290_376_3,
        ],
    )
}

/// Sphere quadrature exact for the low-degree polynomials that round pass
/// probabilities are in the Bloch coordinates.
fn sphere_nodes() -> Vec<(f64, StateVector)> {
    let (zs, ws) = gauss_legendre_8();
    let total: f64 = ws.iter().sum();
    let mut out = Vec::new();
    for (z, w) in zs.iter().zip(ws) {
        for k in 0..8 {
            let phi = TAU * k as f64 / 8.0;
            let a = ((1.0 + z) / 2.0).sqrt();
            let b = ((1.0 - z) / 2.0).sqrt();
            let s = StateVector::normalized(vec![re(a), c(phi.cos(), phi.sin()) * b]).unwrap();
            out.push((w / total / 8.0, s));
        }
    }
    out
}

fn policy_nodes(p: TrentPolicy) -> Vec<(f64, StateVector)> {
    match p {
        TrentPolicy::Haar => sphere_nodes(),
        TrentPolicy::TwoPoint => vec![
            (0.5, StateVector::basis(2, 0).unwrap()),
            (0.5, StateVector::basis(2, 1).unwrap()),
        ],
    }
}

/// Exact single-round pass probability by summing over Alice's bit, Bob's
/// response and Trent's (and the ancilla's) state.
fn round_oracle(variant: Variant, trent: TrentPolicy, bob: BobPolicy) -> f64 {
    let nodes = policy_nodes(trent);
    let ancillas: Vec<(f64, Option<StateVector>)> = match variant {
        Variant::Swap => nodes.iter().map(|(w, s)| (*w, Some(s.clone()))).collect(),
        Variant::Hadamard => vec![(1.0, None)],
    };
    let mut total = 0.0;
    for alice in [Bit::Zero, Bit::One] {
        let bobs: Vec<(f64, Bit)> = match bob {
            BobPolicy::UniformGuess => vec![(0.5, Bit::Zero), (0.5, Bit::One)],
            BobPolicy::FixedBit(b) => vec![(1.0, b)],
            BobPolicy::CopyAfterMeasure => vec![(1.0, alice)],
        };
        for (wb, b) in &bobs {
            for (wt, t) in &nodes {
                for (wa, anc) in &ancillas {
                    let r = WiesnerRound {
                        variant,
                        trent_state: t.clone(),
                        ancilla_state: anc.clone(),
                        alice_bit: alice,
                        bob_bit: *b,
                    };
                    total += 0.5 * wb * wt * wa * wiesner_round(&r).unwrap().trent_pass;
                }
            }
        }
    }
    total
}

#[test]
fn round_oracle_values() {
    let u = BobPolicy::UniformGuess;
    let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
    assert!(close(
        round_oracle(Variant::Hadamard, TrentPolicy::TwoPoint, u),
        0.75
    ));
    assert!(close(
        round_oracle(Variant::Hadamard, TrentPolicy::Haar, u),
        2.0 / 3.0
    ));
    assert!(close(
        round_oracle(Variant::Swap, TrentPolicy::TwoPoint, u),
        0.75
    ));
    assert!(close(
        round_oracle(Variant::Swap, TrentPolicy::Haar, u),
        0.75
    ));
}

#[test]
fn monte_carlo_matches_round_oracle() {
    let bobs = [
        BobPolicy::UniformGuess,
        BobPolicy::FixedBit(Bit::Zero),
        BobPolicy::FixedBit(Bit::One),
        BobPolicy::CopyAfterMeasure,
    ];
    let mut seed = 100;
    for variant in [Variant::Swap, Variant::Hadamard] {
        for trent in [TrentPolicy::Haar, TrentPolicy::TwoPoint] {
            for bob in bobs {
                let oracle = round_oracle(variant, trent, bob);
                seed += 1;
                let cfg = SimConfig {
                    trials: 100_000,
                    rounds_per_trial: 1,
                    master_seed: seed,
                    trent_policy: trent,
                    bob_policy: bob,
                    variant,
                };
                let res = simulate_wiesner(&cfg).unwrap();
                let p = oracle.clamp(0.0, 1.0);
                let sigma = (p * (1.0 - p) / 1e5).sqrt();
                assert!(
                    (res.success_rate - oracle).abs() <= 3.0 * sigma + 1e-9,
                    "{variant:?} {trent:?} {bob:?}: {} vs {oracle}",
                    res.success_rate
                );
            }
        }
    }
}

#[test]
fn rounds_multiply() {
    let oracle = round_oracle(Variant::Swap, TrentPolicy::Haar, BobPolicy::UniformGuess);
    let mut cfg = SimConfig::new(100_000, 3, 8);
    cfg.variant = Variant::Swap;
    let res = simulate_wiesner(&cfg).unwrap();
    let want = oracle.powi(3);
    assert!((res.success_rate - want).abs() <= 3.0 * (want * (1.0 - want) / 1e5).sqrt());
    assert!((res.per_round_rate - res.success_rate.cbrt()).abs() < 1e-15);
}

#[test]
fn twenty_rounds_are_negligible() {
    let mut cfg = SimConfig::new(100_000, 20, 3);
    cfg.trent_policy = TrentPolicy::TwoPoint;
    let res = simulate_wiesner(&cfg).unwrap();
    assert!(res.success_rate < 1e-2, "{}", res.success_rate);
}

#[test]
fn estimator_spread_matches_binomial() {
    let oracle = round_oracle(
        Variant::Hadamard,
        TrentPolicy::Haar,
        BobPolicy::UniformGuess,
    );
    let n = 10_000.0;
    let sigma = (oracle * (1.0 - oracle) / n).sqrt();
    let rates: Vec<f64> = (0..30)
        .map(|s| {
            simulate_wiesner(&SimConfig::new(10_000, 1, 1_000 + s))
                .unwrap()
                .success_rate
        })
        .collect();
    for r in &rates {
        assert!((r - oracle).abs() <= 4.0 * sigma);
    }
    let mean = rates.iter().sum::<f64>() / 30.0;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / 29.0;
    // Chi-square with 29 degrees of freedom: 99.9% band is about [0.40, 2.0].
    let ratio = var / (sigma * sigma);
    assert!((0.3..=2.3).contains(&ratio), "variance ratio {ratio}");
    assert!((mean - oracle).abs() <= 4.0 * sigma / 30f64.sqrt());
}

#[test]
fn sweep_is_nonincreasing() {
    let mut cfg = SimConfig::new(20_000, 1, 11);
    cfg.trent_policy = TrentPolicy::TwoPoint;
    let rows = sweep(&cfg, 1..=10).unwrap();
    assert_eq!(rows.len(), 10);
    for w in rows.windows(2) {
        assert!(w[1].rate <= w[0].rate);
    }
    // Each row equals a standalone run with the same seed.
    cfg.rounds_per_trial = 4;
    assert_eq!(rows[3].rate, simulate_wiesner(&cfg).unwrap().success_rate);
}

#[test]
fn haar_sampler_moments() {
    let mut r = common::rng(99);
    let n = 200_000;
    let (mut z1, mut z2, mut x1) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        let s = sample_haar_qubit(&mut r);
        let a = s.amplitudes();
        let z = a[0].norm_sqr() - a[1].norm_sqr();
        let x = 2.0 * (a[0].conj() * a[1]).re;
        z1 += z;
        z2 += z * z;
        x1 += x;
    }
    let n = n as f64;
    // Var(z) = 1/3, Var(z^2) = 4/45.
    assert!((z1 / n).abs() < 4.0 * (1.0 / 3.0 / n).sqrt());
    assert!((z2 / n - 1.0 / 3.0).abs() < 4.0 * (4.0 / 45.0 / n).sqrt());
    assert!((x1 / n).abs() < 4.0 * (1.0 / 3.0 / n).sqrt());
}

#[test]
fn issued_banknotes_authenticate_for_the_issuer() {
    for variant in [Variant::Swap, Variant::Hadamard] {
        let note = issue_banknote(variant, TrentPolicy::Haar, 12, 5);
        let bits: Vec<Bit> = note.rounds.iter().map(|r| r.alice_bit).collect();
        assert!((note.authenticate(&bits).unwrap() - 1.0).abs() < 1e-12);
        let flipped: Vec<Bit> = bits
            .iter()
            .map(|b| if *b == Bit::Zero { Bit::One } else { Bit::Zero })
            .collect();
        assert!(note.authenticate(&flipped).unwrap() < 0.5);
        assert_eq!(issue_banknote(variant, TrentPolicy::Haar, 12, 5), note);
    }
}

// --- gambling -------------------------------------------------------------------

/// Enumerates Bob's branch and the measurement outcome, with the gain each
/// leaf pays Bob.
fn gvw_enumeration(state: &StateVector, r: f64, v: f64) -> f64 {
    let amps = state.amplitudes();
    let in_b = amps[1].norm_sqr();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let overlap = (amps[0] * h + amps[1] * h).norm_sqr();
    let leaves = [
        (1.0 - v, in_b, 1.0),
        (1.0 - v, 1.0 - in_b, -1.0),
        (v, overlap, -1.0),
        (v, 1.0 - overlap, r),
    ];
    leaves.iter().map(|(pb, po, g)| pb * po * g).sum()
}

#[test]
fn gvw_closed_form_matches_enumeration() {
    let mut rng = common::rng(21);
    for _ in 0..200 {
        let s = common::random_state(&mut rng, 2);
        let r = rand::Rng::random_range(&mut rng, 0.1..10.0);
        let v = rand::Rng::random_range(&mut rng, 0.0..=1.0);
        let setup = GvwSetup::new(s.clone(), r, v).unwrap();
        let g = gvw_expected_gains(&setup, None).unwrap();
        assert!((g.p_b - gvw_enumeration(&s, r, v)).abs() < 1e-12);
    }
    for v in [0.0, 0.3, 1.0] {
        let honest = GvwSetup::new(gvw_honest_state(), 2.0, v).unwrap();
        assert!((gvw_expected_gains(&honest, None).unwrap().p_b + v).abs() < 1e-12);
    }
}

#[test]
fn gvw_simulation_examples() {
    let a = StateVector::basis(2, 0).unwrap();
    let never = simulate_gvw(
        &GvwSetup::new(a.clone(), 3.0, 0.0).unwrap(),
        &SimConfig::new(10_000, 1, 4),
    )
    .unwrap();
    assert_eq!(never.mean_gain_b, Some(-1.0));
    assert_eq!(never.successes, 0);

    let always = simulate_gvw(
        &GvwSetup::new(a, 3.0, 1.0).unwrap(),
        &SimConfig::new(100_000, 1, 4),
    )
    .unwrap();
    let se = always.gain_std_error.unwrap();
    assert!((always.mean_gain_b.unwrap() - 1.0).abs() <= 3.0 * se);
    assert_eq!(always.mean_gain_a.unwrap(), -always.mean_gain_b.unwrap());
}

#[test]
fn angle_grid_conventions() {
    let r = ParamRange::periodic(0.0, TAU).points(4).unwrap();
    assert_eq!(r, vec![0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]);
}
