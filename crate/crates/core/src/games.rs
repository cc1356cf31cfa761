//! Concrete games: the penny flip, the Prisoner's Dilemma, Wiesner-style
//! identification rounds and the two-box gambling game.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::equilibria::{BimatrixGame, Domain};
use crate::error::{Error, Result};
use crate::game::{
    play, u2, ClassicalMove, PayoffPair, PayoffRule, Player, QuantumGame, Strategy, StrategyKind,
    StrategySpace, TurnSchedule,
};
use crate::linalg::{re, C64};
use crate::quantum::{
    controlled_gate, density_from_pure, embed_gate, gates, partial_trace, StateVector, Unitary,
    WEIGHT_TOL,
};

// ---------------------------------------------------------------------------
// Penny flip
// ---------------------------------------------------------------------------

/// Index of the spin-up outcome on the coin board.
pub const UP: usize = 0;
/// Index of the spin-down outcome.
pub const DOWN: usize = 1;

fn coin_moves() -> Vec<ClassicalMove> {
    vec![
        ClassicalMove {
            label: "N".into(),
            op: gates::no_flip(),
        },
        ClassicalMove {
            label: "F".into(),
            op: gates::flip(),
        },
    ]
}

fn coin_game(name: &str, schedule: Vec<Player>) -> QuantumGame {
    let picard = StrategySpace {
        moves: coin_moves(),
        allowed: vec![
            StrategyKind::PureClassical,
            StrategyKind::MixedClassical,
            StrategyKind::GeneralChannel,
        ],
    };
    let q = StrategySpace {
        moves: coin_moves(),
        allowed: vec![
            StrategyKind::PureClassical,
            StrategyKind::MixedClassical,
            StrategyKind::QuantumUnitary,
            StrategyKind::GeneralChannel,
        ],
    };
    QuantumGame::new(
        name,
        density_from_pure(&StateVector::basis(2, UP).expect("valid basis state")),
        TurnSchedule::new(schedule).expect("nonempty schedule"),
        picard,
        q,
        PayoffRule::zero_sum(vec![-1.0, 1.0]).expect("finite payoffs"),
        true,
    )
    .expect("penny flip is well formed")
}

/// The coin game: the coin starts heads-up (spin up), B moves, A moves,
/// B moves again. A wins (+1) on spin down and loses (-1) on spin up.
/// Player A is the classical player, B the quantum one.
pub fn penny_flip() -> QuantumGame {
    coin_game("penny-flip", vec![Player::B, Player::A, Player::B])
}

/// The same coin with B's final move removed: B then A.
pub fn penny_flip_two_move() -> QuantumGame {
    coin_game("penny-flip-2move", vec![Player::B, Player::A])
}

/// B plays the Hadamard-like `U(1/sqrt 2, 1/sqrt 2)` on both turns, which
/// parks the coin in a state every classical move leaves alone.
pub fn penny_flip_optimal_q() -> Strategy {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = u2(re(h), re(h)).expect("normalized");
    Strategy::QuantumUnitary(vec![u.clone(), u])
}

/// The classical 2x4 table of the penny flip, rows `N, F` for A and
/// columns `NN, NF, FN, FF` for B, built by playing every pure profile.
pub fn penny_flip_bimatrix() -> BimatrixGame {
    let game = penny_flip();
    let mut pa = vec![vec![0.0; 4]; 2];
    for (r, row) in pa.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let a = Strategy::PureClassical(vec![r]);
            let b = Strategy::PureClassical(vec![c >> 1, c & 1]);
            *cell = play(&game, &a, &b).expect("pure profile").1.p_a;
        }
    }
    let pb = pa.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    BimatrixGame::new(pa, pb)
        .and_then(|g| g.with_labels(&["N", "F"], &["NN", "NF", "FN", "FF"]))
        .expect("2x4 table")
}

pub fn prisoners_dilemma() -> BimatrixGame {
    BimatrixGame::from_pairs(&[&[(3.0, 3.0), (0.0, 5.0)], &[(5.0, 0.0), (1.0, 1.0)]])
        .and_then(|g| g.with_labels(&["C", "D"], &["C", "D"]))
        .expect("fixed table")
}

pub const GAME_NAMES: &[&str] = &["penny-flip", "penny-flip-2move", "pd"];

/// Looks up a board game by its command-line name.
pub fn game_by_name(name: &str) -> Option<QuantumGame> {
    match name {
        "penny-flip" => Some(penny_flip()),
        "penny-flip-2move" => Some(penny_flip_two_move()),
        "pd" => Some(
            prisoners_dilemma()
                .to_quantum_game("pd")
                .expect("2x2 encoding"),
        ),
        _ => None,
    }
}

/// Default equilibrium-search domains for a named game. Picard always
/// varies his flip probability. Q searches all of SU(2) per turn in the
/// two-move game; in the three-move game Q's candidates are the four pure
/// sequences and the Hadamard pair. Anything else searches pure moves.
pub fn search_domains(game: &QuantumGame) -> (Domain, Domain) {
    match game.name.as_str() {
        "penny-flip" => {
            let moves = &game.space(Player::B).moves;
            let mut pts = Vec::new();
            for i in 0..moves.len() {
                for j in 0..moves.len() {
                    let label = format!("pure:{},{}", moves[i].label, moves[j].label);
                    pts.push((label, Strategy::PureClassical(vec![i, j])));
                }
            }
            let q = std::f64::consts::FRAC_PI_4;
            pts.push((format!("u2:{q},0,0;{q},0,0"), penny_flip_optimal_q()));
            (Domain::flip_unit(), Domain::Points(pts))
        }
        "penny-flip-2move" => (Domain::flip_unit(), Domain::su2_full()),
        _ => (Domain::Pure, Domain::Pure),
    }
}

// ---------------------------------------------------------------------------
// Identification rounds
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Controlled swaps of Trent's qubit with a second random qubit.
    Swap,
    /// Controlled Hadamards on Trent's qubit.
    Hadamard,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Swap => "swap",
            Variant::Hadamard => "hadamard",
        })
    }
}

/// A control bit, `0` or `I`. Serialized as the integer 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(*self as u8)
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            other => Err(serde::de::Error::custom(format!(
                "bit must be 0 or 1, got {other}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WiesnerRound {
    pub variant: Variant,
    pub trent_state: StateVector,
    /// Second qubit, present only for [`Variant::Swap`].
    pub ancilla_state: Option<StateVector>,
    pub alice_bit: Bit,
    pub bob_bit: Bit,
}

impl WiesnerRound {
    pub fn validate(&self) -> Result<()> {
        if self.trent_state.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.trent_state.dim(),
            });
        }
        match (self.variant, &self.ancilla_state) {
            (Variant::Swap, Some(anc)) if anc.dim() == 2 => Ok(()),
            (Variant::Swap, Some(anc)) => Err(Error::DimensionMismatch {
                expected: 2,
                got: anc.dim(),
            }),
            (Variant::Swap, None) => Err(Error::InvalidParameter(
                "swap round needs an ancilla state".into(),
            )),
            (Variant::Hadamard, None) => Ok(()),
            (Variant::Hadamard, Some(_)) => Err(Error::InvalidParameter(
                "hadamard round takes no ancilla state".into(),
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RoundOutcome {
    /// Probability that Trent finds his qubit unchanged.
    pub trent_pass: f64,
    pub final_board: crate::quantum::DensityMatrix,
}

struct Circuit {
    alice: Unitary,
    bob: Unitary,
    n_qubits: usize,
    trent_pos: usize,
}

/// Swap boards are `[Alice, T, T', Bob]`, Hadamard boards `[Alice, T, Bob]`.
fn circuit(variant: Variant) -> &'static Circuit {
    static SWAP: OnceLock<Circuit> = OnceLock::new();
    static HAD: OnceLock<Circuit> = OnceLock::new();
    match variant {
        Variant::Swap => SWAP.get_or_init(|| {
            let cswap = controlled_gate(&gates::swap());
            Circuit {
                alice: embed_gate(&cswap, &[0, 1, 2], 4).expect("valid layout"),
                bob: embed_gate(&cswap, &[3, 1, 2], 4).expect("valid layout"),
                n_qubits: 4,
                trent_pos: 1,
            }
        }),
        Variant::Hadamard => HAD.get_or_init(|| {
            let ch = controlled_gate(&gates::hadamard());
            Circuit {
                alice: embed_gate(&ch, &[0, 1], 3).expect("valid layout"),
                bob: embed_gate(&ch, &[2, 1], 3).expect("valid layout"),
                n_qubits: 3,
                trent_pos: 1,
            }
        }),
    }
}

fn bit_state(b: Bit) -> StateVector {
    StateVector::basis(2, b.index()).expect("qubit basis state")
}

fn final_state(r: &WiesnerRound) -> Result<(StateVector, &'static Circuit)> {
    r.validate()?;
    let circ = circuit(r.variant);
    let mut factors = vec![bit_state(r.alice_bit), r.trent_state.clone()];
    if let Some(anc) = &r.ancilla_state {
        factors.push(anc.clone());
    }
    factors.push(bit_state(r.bob_bit));
    let board = crate::quantum::tensor_all(&factors).expect("nonempty");
    let psi = board.apply(&circ.alice)?.apply(&circ.bob)?;
    Ok((psi, circ))
}

/// `<phi| Tr_rest(|psi><psi|) |phi>` for a single qubit `pos` of an
/// `n`-qubit pure state, without forming the full density matrix.
fn qubit_overlap(psi: &StateVector, pos: usize, n: usize, phi: &StateVector) -> f64 {
    let amps = psi.amplitudes();
    let shift = n - 1 - pos;
    let mask = 1usize << shift;
    let f = phi.amplitudes();
    let mut total = 0.0;
    for (k, &amp0) in amps.iter().enumerate() {
        if k & mask != 0 {
            continue;
        }
        // Project the rest-of-board slice onto <phi| on the chosen qubit.
        let amp1 = amps[k | mask];
        let proj: C64 = f[0].conj() * amp0 + f[1].conj() * amp1;
        total += proj.norm_sqr();
    }
    total.clamp(0.0, 1.0)
}

/// Probability that Trent's verification passes. Same value as
/// [`wiesner_round`] but computed on the state vector.
pub fn wiesner_trent_pass(r: &WiesnerRound) -> Result<f64> {
    let (psi, circ) = final_state(r)?;
    Ok(qubit_overlap(
        &psi,
        circ.trent_pos,
        circ.n_qubits,
        &r.trent_state,
    ))
}

/// Runs one round: Alice's controlled gate, then Bob's, then Trent checks
/// his qubit against the state he prepared.
pub fn wiesner_round(r: &WiesnerRound) -> Result<RoundOutcome> {
    let (psi, circ) = final_state(r)?;
    let board = density_from_pure(&psi);
    let dims = vec![2; circ.n_qubits];
    let reduced = partial_trace(&board, circ.trent_pos, &dims)?;
    let trent_pass = crate::quantum::projective_overlap(&reduced, &r.trent_state)?;
    Ok(RoundOutcome {
        trent_pass,
        final_board: board,
    })
}

/// A point of the extended complex plane; `Infinity` stands for `|I>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtComplex {
    Finite(C64),
    Infinity,
}

/// Action of the Hadamard gate on `|0> + z|I>`: `z -> (1 - z) / (1 + z)`.
pub fn hadamard_mobius(z: ExtComplex) -> ExtComplex {
    match z {
        ExtComplex::Infinity => ExtComplex::Finite(re(-1.0)),
        ExtComplex::Finite(z) => {
            let den = re(1.0) + z;
            if den.norm_sqr() == 0.0 {
                ExtComplex::Infinity
            } else {
                ExtComplex::Finite((re(1.0) - z) / den)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Banknotes
// ---------------------------------------------------------------------------

/// The recorded part of a round: everything except Bob's bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanknoteRound {
    pub variant: Variant,
    pub trent_state: StateVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla_state: Option<StateVector>,
    pub alice_bit: Bit,
}

/// A serial record of rounds. Presenting the note means replaying every
/// round with the presenter's bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Banknote {
    pub rounds: Vec<BanknoteRound>,
}

impl Banknote {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let note: Self =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        for r in &note.rounds {
            r.as_round(Bit::Zero).validate()?;
        }
        Ok(note)
    }

    /// Probability that every round passes with the given presenter bits.
    pub fn authenticate(&self, bob_bits: &[Bit]) -> Result<f64> {
        if bob_bits.len() != self.rounds.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rounds.len(),
                got: bob_bits.len(),
            });
        }
        self.rounds
            .iter()
            .zip(bob_bits)
            .try_fold(1.0, |acc, (r, &b)| {
                Ok(acc * wiesner_trent_pass(&r.as_round(b))?)
            })
    }
}

impl BanknoteRound {
    pub fn as_round(&self, bob_bit: Bit) -> WiesnerRound {
        WiesnerRound {
            variant: self.variant,
            trent_state: self.trent_state.clone(),
            ancilla_state: self.ancilla_state.clone(),
            alice_bit: self.alice_bit,
            bob_bit,
        }
    }
}

// ---------------------------------------------------------------------------
// Two-box gambling
// ---------------------------------------------------------------------------

/// Alice hides a particle over boxes `a` (index 0) and `b` (index 1). Bob
/// either opens box `b` (winning 1 if the particle is there, losing 1
/// otherwise) or, with probability `bob_verify_prob`, tests the state
/// against the fair superposition and collects `r` if the test fails.
#[derive(Clone, Debug, PartialEq)]
pub struct GvwSetup {
    pub alice_state: StateVector,
    pub r: f64,
    pub bob_verify_prob: f64,
}

impl GvwSetup {
    pub fn new(alice_state: StateVector, r: f64, bob_verify_prob: f64) -> Result<Self> {
        if alice_state.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: alice_state.dim(),
            });
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reward must be finite and positive, got {r}"
            )));
        }
        if !(0.0..=1.0).contains(&bob_verify_prob) {
            return Err(Error::InvalidProbability(bob_verify_prob));
        }
        Ok(Self {
            alice_state,
            r,
            bob_verify_prob,
        })
    }
}

/// The fair superposition `(|a> + |b>) / sqrt 2`.
pub fn gvw_honest_state() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(vec![re(h), re(h)]).expect("normalized")
}

/// Probabilities that drive Bob's two branches for one prepared state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GvwBranchProbs {
    /// Opening box `b` finds the particle.
    pub open_win: f64,
    /// The fairness test fails.
    pub verify_fail: f64,
}

pub fn gvw_branch_probs(state: &StateVector) -> Result<GvwBranchProbs> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.dim(),
        });
    }
    let open_win = state.amplitudes()[1].norm_sqr().clamp(0.0, 1.0);
    let pass = gvw_honest_state().inner(state)?.norm_sqr().clamp(0.0, 1.0);
    Ok(GvwBranchProbs {
        open_win,
        verify_fail: 1.0 - pass,
    })
}

fn bob_gain(setup: &GvwSetup, p: GvwBranchProbs) -> f64 {
    let v = setup.bob_verify_prob;
    let open = p.open_win - (1.0 - p.open_win);
    let verify = p.verify_fail * setup.r - (1.0 - p.verify_fail);
    (1.0 - v) * open + v * verify
}

/// Exact expected gains. With `alice_mixed`, Alice prepares each listed
/// state with its weight and `setup.alice_state` is ignored.
pub fn gvw_expected_gains(
    setup: &GvwSetup,
    alice_mixed: Option<&[(f64, StateVector)]>,
) -> Result<PayoffPair> {
    let bob = match alice_mixed {
        None => bob_gain(setup, gvw_branch_probs(&setup.alice_state)?),
        Some(mix) => {
            if mix.is_empty() {
                return Err(Error::InvalidDistribution("empty mixture".into()));
            }
            let mut total_w = 0.0;
            let mut acc = 0.0;
            for (w, s) in mix {
                if !(w.is_finite() && *w >= 0.0) {
                    return Err(Error::InvalidDistribution(format!("weight {w}")));
                }
                total_w += w;
                acc += w * bob_gain(setup, gvw_branch_probs(s)?);
            }
            if (total_w - 1.0).abs() > WEIGHT_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "weights sum to {total_w}"
                )));
            }
            acc
        }
    };
    Ok(PayoffPair {
        p_a: -bob,
        p_b: bob,
    })
}

/// `normalize((1 - t) psi_0 + t |a>)` for `t` in `[0, 1]`: the honest state
/// at 0, all-in-box-a at 1.
pub fn gvw_interpolated_state(t: f64) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "interpolation {t} outside [0, 1]"
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::normalized(vec![re((1.0 - t) * h + t), re((1.0 - t) * h)])
}
