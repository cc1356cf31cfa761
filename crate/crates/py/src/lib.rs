//! Python bindings. Strategies cross the boundary as spec strings
//! ("pure:F,N", "mixed:0.5", "u2:a,p1,p2;..."); results come back as plain
//! Python values or small read-only classes.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use qgames_core::equilibria::{self, GridOptions};
use qgames_core::games::{self, Bit, GvwSetup, Variant};
use qgames_core::market;
use qgames_core::numfmt;
use qgames_core::protocols::{self, BobPolicy, SimConfig, TrentPolicy};
use qgames_core::quantum::measure_probs;
use qgames_core::strategy_spec::parse_strategy;
use qgames_core::{Player, QuantumGame};

fn err(e: qgames_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn variant(name: &str) -> PyResult<Variant> {
    match name {
        "hadamard" => Ok(Variant::Hadamard),
        "swap" => Ok(Variant::Swap),
        _ => Err(PyValueError::new_err(format!("unknown variant `{name}`"))),
    }
}

fn trent(name: &str) -> PyResult<TrentPolicy> {
    match name {
        "haar" => Ok(TrentPolicy::Haar),
        "two-point" | "two_point" => Ok(TrentPolicy::TwoPoint),
        _ => Err(PyValueError::new_err(format!(
            "unknown Trent policy `{name}`"
        ))),
    }
}

fn bob(name: &str) -> PyResult<BobPolicy> {
    match name {
        "uniform-guess" | "uniform_guess" => Ok(BobPolicy::UniformGuess),
        "fixed-0" | "fixed_0" => Ok(BobPolicy::FixedBit(Bit::Zero)),
        "fixed-1" | "fixed_1" => Ok(BobPolicy::FixedBit(Bit::One)),
        "copy-after-measure" | "copy_after_measure" => Ok(BobPolicy::CopyAfterMeasure),
        _ => Err(PyValueError::new_err(format!(
            "unknown Bob policy `{name}`"
        ))),
    }
}

/// A two-player quantum game looked up by name.
#[pyclass(name = "Game", module = "qgames", frozen)]
struct PyGame {
    inner: QuantumGame,
}

#[pymethods]
impl PyGame {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        games::game_by_name(name)
            .map(|inner| PyGame { inner })
            .ok_or_else(|| PyKeyError::new_err(format!("unknown game `{name}`")))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn turns(&self) -> Vec<String> {
        self.inner
            .schedule()
            .turns()
            .iter()
            .map(|p| p.to_string())
            .collect()
    }

    #[getter]
    fn zero_sum(&self) -> bool {
        self.inner.is_zero_sum()
    }

    /// Plays spec strings `a` and `b`; returns (payoff_a, payoff_b, final_probs).
    fn play(&self, a: &str, b: &str) -> PyResult<(f64, f64, Vec<f64>)> {
        let sa = parse_strategy(a, &self.inner, Player::A).map_err(err)?;
        let sb = parse_strategy(b, &self.inner, Player::B).map_err(err)?;
        let (rho, pay) = qgames_core::play(&self.inner, &sa, &sb).map_err(err)?;
        Ok((pay.p_a, pay.p_b, measure_probs(&rho)))
    }

    /// Grid equilibrium search as the JSON report the CLI prints.
    #[pyo3(signature = (resolution = 21, epsilon = 1e-6))]
    fn nash_json(&self, py: Python<'_>, resolution: usize, epsilon: f64) -> PyResult<String> {
        let (da, db) = games::search_domains(&self.inner);
        let opts = GridOptions {
            resolution,
            epsilon,
        };
        let report = py
            .detach(|| equilibria::grid_nash(&self.inner, &da, &db, opts))
            .map_err(err)?;
        numfmt::to_json(&report).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Game({:?})", self.inner.name)
    }
}

/// A finite two-player game in normal form.
#[pyclass(name = "BimatrixGame", module = "qgames", frozen)]
struct PyBimatrix {
    inner: equilibria::BimatrixGame,
}

#[pymethods]
impl PyBimatrix {
    #[new]
    fn new(payoff_a: Vec<Vec<f64>>, payoff_b: Vec<Vec<f64>>) -> PyResult<Self> {
        equilibria::BimatrixGame::new(payoff_a, payoff_b)
            .map(|inner| PyBimatrix { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn prisoners_dilemma() -> Self {
        PyBimatrix {
            inner: games::prisoners_dilemma(),
        }
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    /// Weakly dominant rows and columns.
    fn dominant_strategies(&self) -> (Vec<usize>, Vec<usize>) {
        equilibria::dominant_strategies(&self.inner)
    }

    fn pure_nash(&self) -> Vec<(usize, usize)> {
        equilibria::pure_nash(&self.inner)
    }

    fn pareto_front(&self) -> Vec<(usize, usize)> {
        equilibria::pareto_front(&self.inner)
    }

    /// All equilibria of a 2x2 game as (row_dist, col_dist) pairs, plus a
    /// flag set when the equilibrium set is a continuum.
    #[allow(clippy::type_complexity)]
    fn mixed_nash(&self) -> PyResult<(Vec<(Vec<f64>, Vec<f64>)>, bool)> {
        let m = equilibria::mixed_nash_2x2(&self.inner).map_err(err)?;
        let profiles = m
            .profiles
            .into_iter()
            .map(|p| (p.row_dist, p.col_dist))
            .collect();
        Ok((profiles, m.degenerate))
    }
}

/// Aggregate of a seeded simulation run.
#[pyclass(name = "ProtocolResult", module = "qgames", frozen, get_all)]
struct PyProtocolResult {
    trials: u64,
    successes: u64,
    success_rate: f64,
    std_error: f64,
    per_round_rate: f64,
    mean_gain_a: Option<f64>,
    mean_gain_b: Option<f64>,
    gain_std_error: Option<f64>,
    seed_used: u64,
}

impl From<protocols::ProtocolResult> for PyProtocolResult {
    fn from(r: protocols::ProtocolResult) -> Self {
        PyProtocolResult {
            trials: r.trials,
            successes: r.successes,
            success_rate: r.success_rate,
            std_error: r.std_error,
            per_round_rate: r.per_round_rate,
            mean_gain_a: r.mean_gain_a,
            mean_gain_b: r.mean_gain_b,
            gain_std_error: r.gain_std_error,
            seed_used: r.seed_used,
        }
    }
}

#[pymethods]
impl PyProtocolResult {
    fn __repr__(&self) -> String {
        format!(
            "ProtocolResult(trials={}, successes={}, success_rate={})",
            self.trials, self.successes, self.success_rate
        )
    }
}

fn wiesner_config(
    trials: u64,
    rounds: u32,
    seed: u64,
    variant_name: &str,
    trent_name: &str,
    bob_name: &str,
) -> PyResult<SimConfig> {
    let mut cfg = SimConfig::new(trials, rounds, seed);
    cfg.variant = variant(variant_name)?;
    cfg.trent_policy = trent(trent_name)?;
    cfg.bob_policy = bob(bob_name)?;
    Ok(cfg)
}

/// Forging Bob against repeated identification rounds.
#[pyfunction]
#[pyo3(signature = (trials, rounds = 1, seed = 42, variant = "hadamard", trent = "haar", bob = "uniform-guess"))]
fn simulate_wiesner(
    py: Python<'_>,
    trials: u64,
    rounds: u32,
    seed: u64,
    variant: &str,
    trent: &str,
    bob: &str,
) -> PyResult<PyProtocolResult> {
    let cfg = wiesner_config(trials, rounds, seed, variant, trent, bob)?;
    py.detach(|| protocols::simulate_wiesner(&cfg))
        .map(Into::into)
        .map_err(err)
}

/// (n, rate, std_error) for every round count from `lo` to `hi`.
#[pyfunction]
#[pyo3(signature = (lo, hi, trials, seed = 42, variant = "hadamard", trent = "haar", bob = "uniform-guess"))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    lo: u32,
    hi: u32,
    trials: u64,
    seed: u64,
    variant: &str,
    trent: &str,
    bob: &str,
) -> PyResult<Vec<(u32, f64, f64)>> {
    if lo > hi {
        return Err(PyValueError::new_err(format!("empty range {lo}..{hi}")));
    }
    let cfg = wiesner_config(trials, lo.max(1), seed, variant, trent, bob)?;
    let rows = py.detach(|| protocols::sweep(&cfg, lo..=hi)).map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.n, r.rate, r.std_error))
        .collect())
}

/// Two-box sessions. `alice` is the interpolation weight: 0 is honest,
/// 1 puts everything in box a.
#[pyfunction]
#[pyo3(signature = (trials, alice = 0.0, v = 0.0, r = 2.0, rounds = 1, seed = 42))]
fn simulate_gvw(
    py: Python<'_>,
    trials: u64,
    alice: f64,
    v: f64,
    r: f64,
    rounds: u32,
    seed: u64,
) -> PyResult<PyProtocolResult> {
    let state = games::gvw_interpolated_state(alice).map_err(err)?;
    let setup = GvwSetup::new(state, r, v).map_err(err)?;
    let cfg = SimConfig::new(trials, rounds, seed);
    py.detach(|| protocols::simulate_gvw(&setup, &cfg))
        .map(Into::into)
        .map_err(err)
}

/// Exact (gain_a, gain_b) of one two-box game.
#[pyfunction]
#[pyo3(signature = (alice = 0.0, v = 0.0, r = 2.0))]
fn gvw_expected_gains(alice: f64, v: f64, r: f64) -> PyResult<(f64, f64)> {
    let state = games::gvw_interpolated_state(alice).map_err(err)?;
    let setup = GvwSetup::new(state, r, v).map_err(err)?;
    let pay = games::gvw_expected_gains(&setup, None).map_err(err)?;
    Ok((pay.p_a, pay.p_b))
}

/// Least-squares geometric decay fit over (n, rate) points; returns
/// (per_round, r_squared, points_used).
#[pyfunction]
fn exponent_fit(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, usize)> {
    let fit = protocols::exponent_fit(&points).map_err(err)?;
    Ok((fit.per_round, fit.r_squared, fit.points_used))
}

/// Quantum-oscillator model of a trader's risk inclination.
#[pyclass(name = "RiskOscillator", module = "qgames", frozen)]
struct PyRiskOscillator {
    inner: market::RiskOscillator,
}

#[pymethods]
impl PyRiskOscillator {
    #[new]
    #[pyo3(signature = (m = 1.0, theta = std::f64::consts::TAU, hbar_e = 1.0, big_theta = 0.0))]
    fn new(m: f64, theta: f64, hbar_e: f64, big_theta: f64) -> PyResult<Self> {
        market::RiskOscillator::new(m, theta, hbar_e, big_theta)
            .map(|inner| PyRiskOscillator { inner })
            .map_err(err)
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega()
    }

    #[getter]
    fn hbar_eff(&self) -> f64 {
        self.inner.hbar_eff()
    }

    #[getter]
    fn min_risk_inclination(&self) -> f64 {
        market::min_risk_inclination(&self.inner)
    }

    fn level(&self, n: i64) -> PyResult<f64> {
        market::risk_level(&self.inner, n).map_err(err)
    }

    fn spectrum(&self, count: u32) -> Vec<f64> {
        (0..count)
            .map(|n| market::risk_spectrum(&self.inner, n))
            .collect()
    }
}

#[pymodule]
fn qgames(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GAME_NAMES", games::GAME_NAMES.to_vec())?;
    m.add_class::<PyGame>()?;
    m.add_class::<PyBimatrix>()?;
    m.add_class::<PyProtocolResult>()?;
    m.add_class::<PyRiskOscillator>()?;
    m.add_function(wrap_pyfunction!(simulate_wiesner, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_gvw, m)?)?;
    m.add_function(wrap_pyfunction!(gvw_expected_gains, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_fit, m)?)?;
    Ok(())
}
