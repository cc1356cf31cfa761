//! Seeded Monte Carlo runs of repeated identification rounds and gambling
//! sessions.
//!
//! Every trial draws from its own `Pcg32` stream seeded by
//! [`trial_seed`]`(master_seed, trial_index)`, and trials are merged through
//! integer counters, so results are bit-identical for a given seed no
//! matter how many threads run them.

use std::f64::consts::TAU;
use std::io::Write;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{
    gvw_branch_probs, wiesner_trent_pass, Banknote, BanknoteRound, Bit, GvwSetup, Variant,
    WiesnerRound,
};
use crate::linalg::{c, re};
use crate::numfmt::g17;
use crate::quantum::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrentPolicy {
    /// Uniform on the Bloch sphere.
    Haar,
    /// `|0>` or `|I>` with equal probability.
    TwoPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobPolicy {
    /// A fair coin per round.
    UniformGuess,
    /// The same bit every round.
    FixedBit(Bit),
    /// Reads Alice's control qubit in the computational basis and uses the
    /// result. Alice's control is a basis state, so this copies her bit.
    CopyAfterMeasure,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub rounds_per_trial: u32,
    pub master_seed: u64,
    pub trent_policy: TrentPolicy,
    pub bob_policy: BobPolicy,
    pub variant: Variant,
}

impl SimConfig {
    pub fn new(trials: u64, rounds_per_trial: u32, master_seed: u64) -> Self {
        Self {
            trials,
            rounds_per_trial,
            master_seed,
            trent_policy: TrentPolicy::Haar,
            bob_policy: BobPolicy::UniformGuess,
            variant: Variant::Hadamard,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.rounds_per_trial == 0 {
            return Err(Error::InvalidParameter("rounds must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// `sqrt(rate (1 - rate) / trials)`.
    pub std_error: f64,
    /// `success_rate^(1 / rounds)`.
    pub per_round_rate: f64,
    pub mean_gain_a: Option<f64>,
    pub mean_gain_b: Option<f64>,
    /// Standard error of the per-game mean gain.
    pub gain_std_error: Option<f64>,
    pub seed_used: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index`: the splitmix64 output at position `index + 1`
/// of the sequence started at `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn trial_rng(master: u64, index: u64) -> Pcg32 {
    Pcg32::seed_from_u64(trial_seed(master, index))
}

/// Haar-random qubit: uniform height on the sphere, uniform azimuth.
pub fn sample_haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> StateVector {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = TAU * rng.random::<f64>();
    let a = ((1.0 + z) / 2.0).sqrt();
    let b = ((1.0 - z) / 2.0).sqrt();
    StateVector::normalized(vec![re(a), c(phi.cos(), phi.sin()) * b]).expect("point on the sphere")
}

pub fn sample_trent_state<R: Rng + ?Sized>(rng: &mut R, policy: TrentPolicy) -> StateVector {
    match policy {
        TrentPolicy::Haar => sample_haar_qubit(rng),
        TrentPolicy::TwoPoint => {
            StateVector::basis(2, rng.random::<bool>() as usize).expect("qubit basis state")
        }
    }
}

fn sample_round<R: Rng + ?Sized>(rng: &mut R, cfg: &SimConfig) -> WiesnerRound {
    let alice_bit = Bit::from_bool(rng.random::<bool>());
    let trent_state = sample_trent_state(rng, cfg.trent_policy);
    let ancilla_state = match cfg.variant {
        Variant::Swap => Some(sample_trent_state(rng, cfg.trent_policy)),
        Variant::Hadamard => None,
    };
    let bob_bit = match cfg.bob_policy {
        BobPolicy::UniformGuess => Bit::from_bool(rng.random::<bool>()),
        BobPolicy::FixedBit(b) => b,
        BobPolicy::CopyAfterMeasure => alice_bit,
    };
    WiesnerRound {
        variant: cfg.variant,
        trent_state,
        ancilla_state,
        alice_bit,
        bob_bit,
    }
}

/// Number of leading rounds of trial `index` that pass, capped at `rounds`.
fn wiesner_trial(cfg: &SimConfig, index: u64, rounds: u32) -> u32 {
    let mut rng = trial_rng(cfg.master_seed, index);
    for k in 0..rounds {
        let round = sample_round(&mut rng, cfg);
        let pass = wiesner_trent_pass(&round).expect("sampled rounds are well formed");
        if rng.random::<f64>() >= pass {
            return k;
        }
    }
    rounds
}

fn binomial(trials: u64, successes: u64, rounds: u32, seed: u64) -> ProtocolResult {
    let rate = successes as f64 / trials as f64;
    ProtocolResult {
        trials,
        successes,
        success_rate: rate,
        std_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
        per_round_rate: rate.powf(1.0 / f64::from(rounds)),
        mean_gain_a: None,
        mean_gain_b: None,
        gain_std_error: None,
        seed_used: seed,
    }
}

/// Repeated forgery attempts: a trial succeeds iff Trent accepts every one
/// of its rounds.
pub fn simulate_wiesner(cfg: &SimConfig) -> Result<ProtocolResult> {
    cfg.validate()?;
    let rounds = cfg.rounds_per_trial;
    let successes: u64 = (0..cfg.trials)
        .into_par_iter()
        .map(|i| u64::from(wiesner_trial(cfg, i, rounds) == rounds))
        .sum();
    Ok(binomial(cfg.trials, successes, rounds, cfg.master_seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub rate: f64,
    pub std_error: f64,
}

/// Success rate for each round count in `range`. Trials reuse their
/// streams across round counts, so the rate column never increases.
pub fn sweep(cfg: &SimConfig, range: RangeInclusive<u32>) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let (lo, hi) = (*range.start(), *range.end());
    if lo == 0 || lo > hi {
        return Err(Error::InvalidParameter(format!("sweep range {lo}..{hi}")));
    }
    let width = (hi - lo + 1) as usize;
    // counts[k] = trials passing at least lo + k rounds.
    let counts = (0..cfg.trials)
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut acc, i| {
                let passed = wiesner_trial(cfg, i, hi);
                for (k, slot) in acc.iter_mut().enumerate() {
                    if passed >= lo + k as u32 {
                        *slot += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let r = binomial(cfg.trials, s, lo + k as u32, cfg.master_seed);
            SweepRow {
                n: lo + k as u32,
                rate: r.success_rate,
                std_error: r.std_error,
            }
        })
        .collect())
}

/// Writes sweep rows as CSV with header `n,rate,std_error`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(["n", "rate", "std_error"]).map_err(io)?;
    for r in rows {
        w.write_record([r.n.to_string(), g17(r.rate), g17(r.std_error)])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct GvwCounts {
    open_win: u64,
    open_lose: u64,
    verify_pass: u64,
    verify_fail: u64,
    bob_ahead: u64,
}

impl GvwCounts {
    fn merge(self, o: Self) -> Self {
        Self {
            open_win: self.open_win + o.open_win,
            open_lose: self.open_lose + o.open_lose,
            verify_pass: self.verify_pass + o.verify_pass,
            verify_fail: self.verify_fail + o.verify_fail,
            bob_ahead: self.bob_ahead + o.bob_ahead,
        }
    }
}

/// Gambling sessions of `rounds_per_trial` games each. A trial counts as a
/// success when Bob ends the session ahead; mean gains are per game.
pub fn simulate_gvw(setup: &GvwSetup, cfg: &SimConfig) -> Result<ProtocolResult> {
    cfg.validate()?;
    let probs = gvw_branch_probs(&setup.alice_state)?;
    let v = setup.bob_verify_prob;
    let r = setup.r;
    let counts = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.master_seed, i);
            let mut c = GvwCounts::default();
            for _ in 0..cfg.rounds_per_trial {
                if rng.random::<f64>() < v {
                    if rng.random::<f64>() < probs.verify_fail {
                        c.verify_fail += 1;
                    } else {
                        c.verify_pass += 1;
                    }
                } else if rng.random::<f64>() < probs.open_win {
                    c.open_win += 1;
                } else {
                    c.open_lose += 1;
                }
            }
            let session =
                c.open_win as f64 + c.verify_fail as f64 * r - (c.open_lose + c.verify_pass) as f64;
            c.bob_ahead = u64::from(session > 0.0);
            c
        })
        .reduce(GvwCounts::default, GvwCounts::merge);

    let games = (cfg.trials * u64::from(cfg.rounds_per_trial)) as f64;
    let n_plus = counts.open_win as f64;
    let n_minus = (counts.open_lose + counts.verify_pass) as f64;
    let n_r = counts.verify_fail as f64;
    let mean = (n_plus - n_minus + n_r * r) / games;
    let second = (n_plus + n_minus + n_r * r * r) / games;
    let var = (second - mean * mean).max(0.0);
    let mut out = binomial(
        cfg.trials,
        counts.bob_ahead,
        cfg.rounds_per_trial,
        cfg.master_seed,
    );
    out.mean_gain_a = Some(-mean);
    out.mean_gain_b = Some(mean);
    out.gain_std_error = Some((var / games).sqrt());
    Ok(out)
}

/// Draws a banknote of `rounds` recorded rounds from a single stream.
pub fn issue_banknote(
    variant: Variant,
    trent_policy: TrentPolicy,
    rounds: usize,
    seed: u64,
) -> Banknote {
    let mut rng = Pcg32::seed_from_u64(seed);
    let rounds = (0..rounds)
        .map(|_| {
            let alice_bit = Bit::from_bool(rng.random::<bool>());
            let trent_state = sample_trent_state(&mut rng, trent_policy);
            let ancilla_state = match variant {
                Variant::Swap => Some(sample_trent_state(&mut rng, trent_policy)),
                Variant::Hadamard => None,
            };
            BanknoteRound {
                variant,
                trent_state,
                ancilla_state,
                alice_bit,
            }
        })
        .collect();
    Banknote { rounds }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    /// `exp(slope)` of `ln(rate)` against `n`.
    pub per_round: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Least-squares fit of `ln(rate) = c + n ln(s)`. Needs at least three
/// points, all with positive rates.
pub fn exponent_fit(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(n, rate) in points {
        if !n.is_finite() || !(rate.is_finite() && rate > 0.0) {
            return Err(Error::Fit(format!(
                "unusable point (n = {n}, rate = {rate})"
            )));
        }
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all points share one round count".into()));
    }
    let sxy: f64 = points
        .iter()
        .zip(&ys)
        .map(|(p, y)| (p.0 - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sse: f64 = points
        .iter()
        .zip(&ys)
        .map(|(p, y)| (y - (my + slope * (p.0 - mx))).powi(2))
        .sum();
    let r_squared = if syy <= f64::EPSILON * f64::EPSILON * k {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(ExponentFit {
        per_round: slope.exp(),
        r_squared,
        points_used: points.len(),
    })
}

/// [`exponent_fit`] after dropping points whose rate is below `floor`
/// (typically `1 / trials`), logging each dropped point.
pub fn exponent_fit_with_floor(points: &[(f64, f64)], floor: f64) -> Result<ExponentFit> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(n, rate)| {
            let keep = rate >= floor;
            if !keep {
                log::warn!("dropping n = {n}: rate {rate} below floor {floor}");
            }
            keep
        })
        .collect();
    exponent_fit(&kept)
}
