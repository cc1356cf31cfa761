//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or overruns its time budget.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::time::{Duration, Instant};

use qgames_core::equilibria::{
    dominant_strategies, grid_nash, pareto_front, pure_nash, Domain, GridOptions,
};
use qgames_core::games::{
    gvw_expected_gains, gvw_honest_state, gvw_interpolated_state, penny_flip, penny_flip_optimal_q,
    penny_flip_two_move, prisoners_dilemma, wiesner_round, Bit, GvwSetup, Variant, WiesnerRound,
};
use qgames_core::market::{hbar_eff, min_risk_inclination, risk_spectrum, RiskOscillator};
use qgames_core::numfmt::to_json;
use qgames_core::protocols::{
    exponent_fit, sample_haar_qubit, simulate_gvw, simulate_wiesner, sweep, write_sweep_csv,
    BobPolicy, SimConfig, TrentPolicy,
};
use qgames_core::quantum::{apply_channel, StateVector};
use qgames_core::{flip_channel, play, u2, Strategy, C64};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// --- 1 ---------------------------------------------------------------------

fn penny_table() -> Outcome {
    // Rows: A plays N, F. Columns: B plays NN, NF, FN, FF.
    const TABLE: [[f64; 4]; 2] = [[-1.0, 1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];
    let g = penny_flip();
    let mut mismatches = Vec::new();
    for (r, row) in TABLE.iter().enumerate() {
        for (col, &want) in row.iter().enumerate() {
            let a = Strategy::PureClassical(vec![r]);
            let b = Strategy::PureClassical(vec![col >> 1, col & 1]);
            let got = play(&g, &a, &b).map_err(|e| e.to_string())?.1;
            if got.p_a != want || got.p_b != -want {
                mismatches.push(format!("({r},{col}) -> {got:?}"));
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!("8 profiles, mismatches {mismatches:?}"),
    )
}

// --- 2 ---------------------------------------------------------------------

fn q_always_wins() -> Outcome {
    let g = penny_flip();
    let q = penny_flip_optimal_q();
    let mut worst = 0.0f64;
    for k in 0..=100 {
        let p = k as f64 / 100.0;
        let a = Strategy::GeneralChannel(vec![flip_channel(p).unwrap()]);
        let pay = play(&g, &a, &q).map_err(|e| e.to_string())?.1;
        worst = worst.max((pay.p_a + 1.0).abs());
    }
    check(
        worst <= 1e-12,
        format!("max |payoff_a + 1| over 101 p = {worst:e}"),
    )
}

// --- 3 ---------------------------------------------------------------------

fn two_move_guarantees() -> Outcome {
    let g = penny_flip_two_move();
    let mut r = common::rng(0x2_30FE);
    let half = Strategy::flip(0.5).unwrap();
    let (mut worst_half, mut worst_picard, mut worst_q) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (u, aa) = common::random_u2(&mut r);
        let bb = 1.0 - aa;
        let q = Strategy::QuantumUnitary(vec![u]);
        worst_half = worst_half.max(play(&g, &half, &q).unwrap().1.p_a.abs());
        let best_pure = [0usize, 1]
            .iter()
            .map(|&m| {
                play(&g, &Strategy::PureClassical(vec![m]), &q)
                    .unwrap()
                    .1
                    .p_a
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst_picard = worst_picard.max((best_pure - (aa - bb).abs()).abs());

        let p: f64 = rand::Rng::random(&mut r);
        let picard = Strategy::flip(p).unwrap();
        let endpoints = [
            u2(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap(),
            u2(C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap(),
        ];
        let best_q = endpoints
            .into_iter()
            .map(|e| {
                play(&g, &picard, &Strategy::QuantumUnitary(vec![e]))
                    .unwrap()
                    .1
                    .p_b
            })
            .fold(f64::NEG_INFINITY, f64::max);
        worst_q = worst_q.max((best_q - (2.0 * p - 1.0).abs()).abs());
    }
    check(
        worst_half <= 1e-12 && worst_picard <= 1e-12 && worst_q <= 1e-12,
        format!(
            "1000 draws: |p=1/2 payoff| {worst_half:e}, picard best-pure gap {worst_picard:e}, q endpoint gap {worst_q:e}"
        ),
    )
}

// --- 4 ---------------------------------------------------------------------

fn pd_concepts() -> Outcome {
    let g = prisoners_dilemma();
    let (c, d) = (0usize, 1usize);
    let dom = dominant_strategies(&g);
    let nash = pure_nash(&g);
    let front = pareto_front(&g);
    let nash_pay = nash.first().map(|&(r, col)| (g.pa(r, col), g.pb(r, col)));
    check(
        dom == (vec![d], vec![d])
            && nash == vec![(d, d)]
            && nash_pay == Some((1.0, 1.0))
            && front.contains(&(c, c))
            && !front.contains(&(d, d)),
        format!("dominant {dom:?}, nash {nash:?} payoffs {nash_pay:?}, pareto {front:?}"),
    )
}

// --- 5 ---------------------------------------------------------------------

fn grid_recovery() -> Outcome {
    let g = penny_flip_two_move();
    let rep = grid_nash(
        &g,
        &Domain::flip_unit(),
        &Domain::su2_full(),
        GridOptions {
            resolution: 21,
            epsilon: 1e-6,
        },
    )
    .map_err(|e| e.to_string())?;
    let p_step = 1.0 / 20.0;
    let a_step = FRAC_PI_2 / 20.0;
    let tol = 1e-12;
    let stray = rep
        .profiles
        .iter()
        .filter(|pr| {
            let p = pr.a.params[0];
            let alpha = pr.b.params[0];
            (p - 0.5).abs() > p_step + tol || (alpha - FRAC_PI_4).abs() > a_step + tol
        })
        .count();
    let exact = rep
        .profiles
        .iter()
        .filter(|pr| {
            (pr.a.params[0] - 0.5).abs() < tol && (pr.b.params[0].cos().powi(2) - 0.5).abs() < tol
        })
        .count();
    // p = 1/2 with alpha = pi/4 over the 21 x 21 phase grid.
    check(
        stray == 0 && exact == 21 * 21,
        format!(
            "{} flagged of {}, {stray} outside one grid step, {exact}/441 exact equilibria flagged",
            rep.profiles.len(),
            rep.grid_meta.profiles_searched
        ),
    )
}

// --- 6 ---------------------------------------------------------------------

/// Exact per-round pass probability by enumerating Alice's bit, Bob's
/// guess and Trent's two basis states.
fn hadamard_two_point_oracle() -> f64 {
    let mut total = 0.0;
    for a in [Bit::Zero, Bit::One] {
        for b in [Bit::Zero, Bit::One] {
            for t in 0..2 {
                let r = WiesnerRound {
                    variant: Variant::Hadamard,
                    trent_state: StateVector::basis(2, t).unwrap(),
                    ancilla_state: None,
                    alice_bit: a,
                    bob_bit: b,
                };
                total += wiesner_round(&r).unwrap().trent_pass / 8.0;
            }
        }
    }
    total
}

fn wiesner_decay() -> Outcome {
    let per_round = hadamard_two_point_oracle();
    let mut cfg = SimConfig::new(100_000, 1, 20_240_601);
    cfg.variant = Variant::Hadamard;
    cfg.trent_policy = TrentPolicy::TwoPoint;
    cfg.bob_policy = BobPolicy::UniformGuess;
    let mut points = Vec::new();
    let mut worst_z = 0.0f64;
    for n in 1..=10u32 {
        cfg.rounds_per_trial = n;
        let res = simulate_wiesner(&cfg).map_err(|e| e.to_string())?;
        let oracle = per_round.powi(n as i32);
        let sigma = (oracle * (1.0 - oracle) / cfg.trials as f64).sqrt();
        worst_z = worst_z.max((res.success_rate - oracle).abs() / sigma);
        points.push((n as f64, res.success_rate));
    }
    let fit = exponent_fit(&points).map_err(|e| e.to_string())?;
    check(
        worst_z <= 3.0 && (fit.per_round - per_round).abs() <= 0.03 && fit.r_squared > 0.98,
        format!(
            "oracle per-round {per_round:.6}, worst |z| {worst_z:.3}, fit s = {:.5}, r2 = {:.6}",
            fit.per_round, fit.r_squared
        ),
    )
}

// --- 7 ---------------------------------------------------------------------

fn coordinated_bob() -> Outcome {
    let mut r = common::rng(77);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t = sample_haar_qubit(&mut r);
        let anc = sample_haar_qubit(&mut r);
        for variant in [Variant::Swap, Variant::Hadamard] {
            for bit in [Bit::Zero, Bit::One] {
                let round = WiesnerRound {
                    variant,
                    trent_state: t.clone(),
                    ancilla_state: (variant == Variant::Swap).then(|| anc.clone()),
                    alice_bit: bit,
                    bob_bit: bit,
                };
                let pass = wiesner_round(&round).map_err(|e| e.to_string())?.trent_pass;
                worst = worst.max((pass - 1.0).abs());
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("100 states x 2 variants x 2 bits, max |pass - 1| = {worst:e}"),
    )
}

// --- 8 ---------------------------------------------------------------------

fn gvw_consistency() -> Outcome {
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut worst_z = 0.0f64;
    let mut seed = 9_000;
    for &t in &grid {
        for &v in &grid {
            let setup = GvwSetup::new(gvw_interpolated_state(t).unwrap(), 3.0, v).unwrap();
            let exact = gvw_expected_gains(&setup, None).unwrap().p_b;
            seed += 1;
            let res = simulate_gvw(&setup, &SimConfig::new(100_000, 1, seed)).unwrap();
            let diff = (res.mean_gain_b.unwrap() - exact).abs();
            let se = res.gain_std_error.unwrap();
            let z = if se > 0.0 {
                diff / se
            } else if diff <= 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            worst_z = worst_z.max(z);
        }
    }
    let honest = GvwSetup::new(gvw_honest_state(), 3.0, 0.0).unwrap();
    let h = simulate_gvw(&honest, &SimConfig::new(100_000, 1, 31_337)).unwrap();
    let hm = h.mean_gain_b.unwrap();
    let hse = h.gain_std_error.unwrap();
    check(
        worst_z <= 3.0 && hm.abs() <= 3.0 * hse,
        format!(
            "5x5 grid worst |z| {worst_z:.3}; honest v=0 mean {hm:.5} (3 sigma = {:.5})",
            3.0 * hse
        ),
    )
}

// --- 9 ---------------------------------------------------------------------

fn channel_fuzz() -> Outcome {
    let mut r = common::rng(0xF022);
    let (mut tr, mut herm, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    for k in 0..1000 {
        let dim = [2, 3, 4, 8][k % 4];
        let rho = common::random_density(&mut r, dim);
        let ch = common::random_channel(&mut r, dim);
        let out = apply_channel(&rho, &ch).map_err(|e| e.to_string())?;
        tr = tr.max((out.trace().re - 1.0).abs().max(out.trace().im.abs()));
        herm = herm.max(out.matrix().hermiticity_error());
        min_eig = min_eig.min(out.min_eigenvalue());
    }
    check(
        tr <= 1e-12 && herm <= 1e-12 && min_eig >= -1e-9,
        format!("1000 applications: trace err {tr:e}, hermiticity err {herm:e}, min eigenvalue {min_eig:e}"),
    )
}

// --- 10 --------------------------------------------------------------------

/// Ground level of `p^2 / 2m + m w^2 q^2 / 2` with `[q, p] = i hbar` on a
/// 512-point finite-difference grid.
fn fd_ground_level(m: f64, w: f64, hbar: f64) -> f64 {
    let n = 512;
    let width = (hbar / (m * w)).sqrt();
    let half = 10.0 * width;
    let h = 2.0 * half / (n as f64 - 1.0);
    let kin = hbar * hbar / (2.0 * m * h * h);
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let q = -half + i as f64 * h;
            2.0 * kin + 0.5 * m * w * w * q * q
        })
        .collect();
    let e = vec![-kin; n - 1];
    common::tridiagonal_min_eigenvalue(&d, &e)
}

fn market_identities() -> Outcome {
    let o = RiskOscillator::new(1.7, 2.3, 0.9, 0.0).unwrap();
    let h_e = min_risk_inclination(&o);
    let ident = h_e == TAU * 0.9 && (risk_spectrum(&o, 0) * 2.0 * o.theta - h_e).abs() <= 1e-12;
    let pyth = hbar_eff(3.0, 4.0).unwrap() == 5.0;
    let mut worst = 0.0f64;
    for &(m, theta, hb, big) in &[
        (1.0, TAU, 1.0, 0.0),
        (2.5, 0.7, 0.3, 0.4),
        (0.4, 3.0, 2.0, 1.5),
    ] {
        let o = RiskOscillator::new(m, theta, hb, big).unwrap();
        let fd = fd_ground_level(o.m, o.omega(), o.hbar_eff());
        let an = risk_spectrum(&o, 0);
        worst = worst.max((fd - an).abs() / an);
    }
    check(
        ident && pyth && worst < 0.01,
        format!(
            "h_E identity {ident}, hbar_eff(3,4) = 5 {pyth}, worst FD relative error {worst:e}"
        ),
    )
}

// --- 11 --------------------------------------------------------------------

fn run_in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn determinism() -> Outcome {
    let mut cfg = SimConfig::new(20_000, 6, 42);
    cfg.variant = Variant::Swap;
    let setup = GvwSetup::new(gvw_interpolated_state(0.3).unwrap(), 2.5, 0.4).unwrap();
    let outputs = |threads: usize| {
        run_in_pool(threads, || {
            let w = to_json(&simulate_wiesner(&cfg).unwrap()).unwrap();
            let g = to_json(&simulate_gvw(&setup, &cfg).unwrap()).unwrap();
            let mut csv = Vec::new();
            write_sweep_csv(&sweep(&cfg, 1..=8).unwrap(), &mut csv).unwrap();
            (w, g, csv)
        })
    };
    let base = outputs(1);
    let mut same = true;
    for threads in [1, 2, 4, 8] {
        same &= outputs(threads) == base;
    }
    check(
        same,
        "wiesner, gvw and sweep outputs identical across reruns and 1/2/4/8 threads".into(),
    )
}

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("penny-flip table reproduction", 1, penny_table),
        ("Q wins against every classical mix", 1, q_always_wins),
        ("two-move guarantees", 5, two_move_guarantees),
        ("prisoner's dilemma solution concepts", 1, pd_concepts),
        ("grid equilibrium recovery", 60, grid_recovery),
        ("wiesner decay", 120, wiesner_decay),
        ("coordinated bob certainty", 1, coordinated_bob),
        ("gvw fairness and consistency", 60, gvw_consistency),
        ("channel invariant fuzz", 10, channel_fuzz),
        ("market identities", 5, market_identities),
        ("simulation determinism", 60, determinism),
    ];
    let mut failures = 0;
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let late = elapsed > Duration::from_secs(budget);
        let (ok, detail) = match outcome {
            Ok(d) => (!late, d),
            Err(d) => (false, d),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} {name}: {detail} [{:.2}s / {budget}s{}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if late { ", over budget" } else { "" }
        );
    }
    println!("acceptance: {}/{} criteria passed", 11 - failures, 11);
    if failures > 0 {
        std::process::exit(1);
    }
}
