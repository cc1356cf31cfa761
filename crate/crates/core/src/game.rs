//! Two-player quantum games `(H, rho, S_A, S_B, P_A, P_B)` and the play
//! pipeline: the initial board is evolved by each turn's operation in
//! schedule order, measured in the computational basis, and scored by
//! expected payoff.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::quantum::{
    apply_channel, apply_unitary, gates, measure_probs, Channel, DensityMatrix, Unitary,
    VALIDATION_TOL, WEIGHT_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    A,
    B,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::A => "A",
            Player::B => "B",
        })
    }
}

/// Turn order; one entry per move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnSchedule(Vec<Player>);

impl TurnSchedule {
    pub fn new(turns: Vec<Player>) -> Result<Self> {
        if turns.is_empty() {
            return Err(Error::InvalidGame("empty turn schedule".into()));
        }
        Ok(Self(turns))
    }

    pub fn turns(&self) -> &[Player] {
        &self.0
    }

    pub fn turn_count(&self, player: Player) -> usize {
        self.0.iter().filter(|&&p| p == player).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    PureClassical,
    MixedClassical,
    QuantumUnitary,
    GeneralChannel,
}

/// A labelled classical move available to a player.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalMove {
    pub label: String,
    pub op: Unitary,
}

/// Declarative description of what a player may do.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategySpace {
    pub moves: Vec<ClassicalMove>,
    pub allowed: Vec<StrategyKind>,
}

impl StrategySpace {
    pub fn allows(&self, kind: StrategyKind) -> bool {
        self.allowed.contains(&kind)
    }

    pub fn move_index(&self, label: &str) -> Option<usize> {
        self.moves.iter().position(|m| m.label == label)
    }
}

/// A player's strategy: one operation per owned turn.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// Move indices into the player's classical alphabet.
    PureClassical(Vec<usize>),
    /// Independent per-turn distributions over the classical alphabet.
    MixedClassical(Vec<Vec<f64>>),
    /// A distribution over whole pure move sequences.
    MixedSequences(Vec<(f64, Vec<usize>)>),
    QuantumUnitary(Vec<Unitary>),
    GeneralChannel(Vec<Channel>),
}

impl Strategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Strategy::PureClassical(_) => StrategyKind::PureClassical,
            Strategy::MixedClassical(_) | Strategy::MixedSequences(_) => {
                StrategyKind::MixedClassical
            }
            Strategy::QuantumUnitary(_) => StrategyKind::QuantumUnitary,
            Strategy::GeneralChannel(_) => StrategyKind::GeneralChannel,
        }
    }

    /// Single-turn mixed move: alphabet entry 1 with probability `p`,
    /// entry 0 otherwise.
    pub fn flip(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Strategy::MixedClassical(vec![vec![1.0 - p, p]]))
    }

    /// Number of turns the strategy covers.
    pub fn turn_count(&self) -> usize {
        match self {
            Strategy::PureClassical(m) => m.len(),
            Strategy::MixedClassical(d) => d.len(),
            Strategy::MixedSequences(d) => d.first().map_or(0, |(_, s)| s.len()),
            Strategy::QuantumUnitary(u) => u.len(),
            Strategy::GeneralChannel(ch) => ch.len(),
        }
    }
}

/// Payoff per computational-basis outcome, for each player.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffRule {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PayoffRule {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("payoff rule"));
        }
        Ok(Self { a, b })
    }

    pub fn zero_sum(a: Vec<f64>) -> Result<Self> {
        let b = a.iter().map(|x| -x).collect();
        Self::new(a, b)
    }

    pub fn outcomes(&self) -> usize {
        self.a.len()
    }

    pub fn for_player(&self, player: Player) -> &[f64] {
        match player {
            Player::A => &self.a,
            Player::B => &self.b,
        }
    }

    fn is_zero_sum(&self) -> bool {
        self.a.iter().zip(&self.b).all(|(x, y)| x + y == 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffPair {
    pub p_a: f64,
    pub p_b: f64,
}

impl PayoffPair {
    pub fn for_player(&self, player: Player) -> f64 {
        match player {
            Player::A => self.p_a,
            Player::B => self.p_b,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuantumGame {
    pub name: String,
    initial: DensityMatrix,
    schedule: TurnSchedule,
    space_a: StrategySpace,
    space_b: StrategySpace,
    payoff: PayoffRule,
    zero_sum: bool,
}

impl QuantumGame {
    pub fn new(
        name: impl Into<String>,
        initial: DensityMatrix,
        schedule: TurnSchedule,
        space_a: StrategySpace,
        space_b: StrategySpace,
        payoff: PayoffRule,
        zero_sum: bool,
    ) -> Result<Self> {
        let dim = initial.dim();
        if payoff.outcomes() != dim {
            return Err(Error::InvalidGame(format!(
                "payoff rule has {} outcomes, board dimension is {dim}",
                payoff.outcomes()
            )));
        }
        for space in [&space_a, &space_b] {
            for m in &space.moves {
                if m.op.dim() != dim {
                    return Err(Error::InvalidGame(format!(
                        "move {} acts on dimension {}, board dimension is {dim}",
                        m.label,
                        m.op.dim()
                    )));
                }
            }
        }
        if zero_sum && !payoff.is_zero_sum() {
            return Err(Error::InvalidGame(
                "payoffs declared zero-sum do not cancel".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            initial,
            schedule,
            space_a,
            space_b,
            payoff,
            zero_sum,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn initial(&self) -> &DensityMatrix {
        &self.initial
    }

    pub fn schedule(&self) -> &TurnSchedule {
        &self.schedule
    }

    pub fn space(&self, player: Player) -> &StrategySpace {
        match player {
            Player::A => &self.space_a,
            Player::B => &self.space_b,
        }
    }

    pub fn payoff_rule(&self) -> &PayoffRule {
        &self.payoff
    }

    pub fn is_zero_sum(&self) -> bool {
        self.zero_sum
    }

    /// Validates a strategy against this game and lowers it to per-turn
    /// operations.
    pub fn compile(&self, player: Player, s: &Strategy) -> Result<CompiledStrategy> {
        let space = self.space(player);
        let kind = s.kind();
        if !space.allows(kind) {
            return Err(Error::StrategyNotAllowed { player, kind });
        }
        let expected = self.schedule.turn_count(player);
        let check_turns = |got: usize| {
            if got == expected {
                Ok(())
            } else {
                Err(Error::TurnCountMismatch {
                    player,
                    expected,
                    got,
                })
            }
        };
        let dim = self.dim();
        let check_dim = |got: usize| {
            if got == dim {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: dim, got })
            }
        };
        let pure_ops = |seq: &[usize]| -> Result<Vec<TurnOp>> {
            seq.iter()
                .map(|&i| {
                    space
                        .moves
                        .get(i)
                        .map(|m| TurnOp::Unitary(m.op.clone()))
                        .ok_or(Error::UnknownMove {
                            player,
                            index: i,
                            available: space.moves.len(),
                        })
                })
                .collect()
        };

        let branches = match s {
            Strategy::PureClassical(seq) => {
                check_turns(seq.len())?;
                vec![(1.0, pure_ops(seq)?)]
            }
            Strategy::MixedClassical(dists) => {
                check_turns(dists.len())?;
                let mut ops = Vec::with_capacity(dists.len());
                for dist in dists {
                    if dist.len() != space.moves.len() {
                        return Err(Error::InvalidDistribution(format!(
                            "distribution over {} moves for an alphabet of {}",
                            dist.len(),
                            space.moves.len()
                        )));
                    }
                    let terms = dist
                        .iter()
                        .zip(&space.moves)
                        .map(|(&w, m)| (w, m.op.clone()))
                        .collect();
                    ops.push(TurnOp::Channel(Channel::convex(terms)?));
                }
                vec![(1.0, ops)]
            }
            Strategy::MixedSequences(dist) => {
                if dist.is_empty() {
                    return Err(Error::InvalidDistribution("no sequences".into()));
                }
                let mut total = 0.0;
                let mut branches = Vec::with_capacity(dist.len());
                for (w, seq) in dist {
                    if !w.is_finite() || *w < 0.0 {
                        return Err(Error::InvalidDistribution(format!("weight {w}")));
                    }
                    check_turns(seq.len())?;
                    total += w;
                    branches.push((*w, pure_ops(seq)?));
                }
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::InvalidDistribution(format!(
                        "weights sum to {total}"
                    )));
                }
                branches
            }
            Strategy::QuantumUnitary(us) => {
                check_turns(us.len())?;
                for u in us {
                    check_dim(u.dim())?;
                }
                vec![(1.0, us.iter().cloned().map(TurnOp::Unitary).collect())]
            }
            Strategy::GeneralChannel(chs) => {
                check_turns(chs.len())?;
                for ch in chs {
                    check_dim(ch.dim())?;
                }
                vec![(1.0, chs.iter().cloned().map(TurnOp::Channel).collect())]
            }
        };
        Ok(CompiledStrategy { player, branches })
    }

    /// Evolves the board under two compiled strategies.
    pub fn evolve(&self, a: &CompiledStrategy, b: &CompiledStrategy) -> Result<DensityMatrix> {
        if a.player != Player::A || b.player != Player::B {
            return Err(Error::InvalidParameter(
                "evolve takes A's strategy first and B's second".into(),
            ));
        }
        let mut terms = Vec::with_capacity(a.branches.len() * b.branches.len());
        for (wa, ops_a) in &a.branches {
            for (wb, ops_b) in &b.branches {
                let (mut ia, mut ib) = (ops_a.iter(), ops_b.iter());
                let mut rho = self.initial.clone();
                for turn in self.schedule.turns() {
                    let op = match turn {
                        Player::A => ia.next(),
                        Player::B => ib.next(),
                    }
                    .expect("compiled strategies match the schedule");
                    rho = op.apply(&rho)?;
                }
                terms.push((wa * wb, rho));
            }
        }
        if terms.len() == 1 {
            Ok(terms.pop().expect("one term").1)
        } else {
            DensityMatrix::mixture(&terms)
        }
    }

    /// Expected payoffs of a final board.
    pub fn score(&self, rho: &DensityMatrix) -> PayoffPair {
        let probs = measure_probs(rho);
        let dot = |v: &[f64]| probs.iter().zip(v).map(|(p, x)| p * x).sum::<f64>();
        PayoffPair {
            p_a: dot(&self.payoff.a),
            p_b: dot(&self.payoff.b),
        }
    }
}

/// A strategy lowered to weighted branches of per-turn operations.
#[derive(Clone, Debug)]
pub struct CompiledStrategy {
    player: Player,
    branches: Vec<(f64, Vec<TurnOp>)>,
}

#[derive(Clone, Debug)]
enum TurnOp {
    Unitary(Unitary),
    Channel(Channel),
}

impl TurnOp {
    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            TurnOp::Unitary(u) => apply_unitary(rho, u),
            TurnOp::Channel(ch) => apply_channel(rho, ch),
        }
    }
}

/// Plays one profile: returns the final board and the expected payoffs.
pub fn play(
    game: &QuantumGame,
    s_a: &Strategy,
    s_b: &Strategy,
) -> Result<(DensityMatrix, PayoffPair)> {
    let a = game.compile(Player::A, s_a)?;
    let b = game.compile(Player::B, s_b)?;
    let rho = game.evolve(&a, &b)?;
    let payoff = game.score(&rho);
    Ok((rho, payoff))
}

pub fn expected_payoff_a(game: &QuantumGame, s_a: &Strategy, s_b: &Strategy) -> Result<f64> {
    Ok(play(game, s_a, s_b)?.1.p_a)
}

pub fn expected_payoff_b(game: &QuantumGame, s_a: &Strategy, s_b: &Strategy) -> Result<f64> {
    Ok(play(game, s_a, s_b)?.1.p_b)
}

/// `U(a, b) = [[a, b], [conj(b), -conj(a)]]`.
pub fn u2(a: crate::linalg::C64, b: crate::linalg::C64) -> Result<Unitary> {
    let n = a.norm_sqr() + b.norm_sqr();
    if !n.is_finite() || (n - 1.0).abs() > VALIDATION_TOL {
        return Err(Error::NotNormalized(n));
    }
    Unitary::new(CMatrix::from_rows(vec![
        vec![a, b],
        vec![b.conj(), -a.conj()],
    ])?)
}

/// `U(a, b)` with `a = cos(alpha) e^{i phi1}`, `b = sin(alpha) e^{i phi2}`.
pub fn u2_angles(alpha: f64, phi1: f64, phi2: f64) -> Result<Unitary> {
    let a = c(phi1.cos(), phi1.sin()) * alpha.cos();
    let b = c(phi2.cos(), phi2.sin()) * alpha.sin();
    u2(a, b)
}

/// Classical mixed move `p F + (1 - p) N`.
pub fn flip_channel(p: f64) -> Result<Channel> {
    check_probability(p)?;
    Channel::convex(vec![(p, gates::flip()), (1.0 - p, gates::no_flip())])
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}
