//! Solution concepts: weak dominance, pure and mixed Nash equilibria, Pareto
//! optimality, and epsilon-Nash search over discretized strategy spaces.
//!
//! Grid results are grid-relative: a flagged profile has no profitable
//! deviation *within the grid*, which says nothing about the continuum.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    u2_angles, ClassicalMove, PayoffPair, PayoffRule, Player, QuantumGame, Strategy, StrategyKind,
    StrategySpace, TurnSchedule,
};
use crate::linalg::{re, CMatrix};
use crate::quantum::{density_from_pure, StateVector, Unitary};

/// Payoff differences at or below this are ties.
pub const TIE_TOL: f64 = 1e-12;
pub const DEFAULT_RESOLUTION: usize = 21;
pub const DEFAULT_EPSILON: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Bimatrix games
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BimatrixGame {
    payoff_a: Vec<Vec<f64>>,
    payoff_b: Vec<Vec<f64>>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl BimatrixGame {
    pub fn new(payoff_a: Vec<Vec<f64>>, payoff_b: Vec<Vec<f64>>) -> Result<Self> {
        let rows = payoff_a.len();
        let cols = payoff_a.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGame("empty payoff matrix".into()));
        }
        if payoff_b.len() != rows || payoff_a.iter().chain(&payoff_b).any(|r| r.len() != cols) {
            return Err(Error::InvalidGame("payoff matrix shapes differ".into()));
        }
        if payoff_a
            .iter()
            .chain(&payoff_b)
            .flatten()
            .any(|x| !x.is_finite())
        {
            return Err(Error::NonFinite("payoff matrix"));
        }
        Ok(Self {
            row_labels: (0..rows).map(|i| format!("r{i}")).collect(),
            col_labels: (0..cols).map(|j| format!("c{j}")).collect(),
            payoff_a,
            payoff_b,
        })
    }

    /// Builds a game from `(a, b)` payoff pairs.
    pub fn from_pairs(cells: &[&[(f64, f64)]]) -> Result<Self> {
        let a = cells
            .iter()
            .map(|r| r.iter().map(|p| p.0).collect())
            .collect();
        let b = cells
            .iter()
            .map(|r| r.iter().map(|p| p.1).collect())
            .collect();
        Self::new(a, b)
    }

    pub fn with_labels(mut self, rows: &[&str], cols: &[&str]) -> Result<Self> {
        if rows.len() != self.rows() || cols.len() != self.cols() {
            return Err(Error::InvalidGame(
                "label count does not match shape".into(),
            ));
        }
        self.row_labels = rows.iter().map(|s| s.to_string()).collect();
        self.col_labels = cols.iter().map(|s| s.to_string()).collect();
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.payoff_a.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff_a[0].len()
    }

    pub fn pa(&self, r: usize, c: usize) -> f64 {
        self.payoff_a[r][c]
    }

    pub fn pb(&self, r: usize, c: usize) -> f64 {
        self.payoff_b[r][c]
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        let s = |m: &Vec<Vec<f64>>| {
            m.iter()
                .map(|r| r.iter().map(|x| x * k).collect())
                .collect()
        };
        let mut g = Self::new(s(&self.payoff_a), s(&self.payoff_b))?;
        g.row_labels = self.row_labels.clone();
        g.col_labels = self.col_labels.clone();
        Ok(g)
    }

    /// Encodes the game on a `rows * cols` board: the board starts in
    /// `|0, 0>`, A then B each pick a cyclic shift of their own register,
    /// and outcome `(r, c)` pays the matrix entries.
    pub fn to_quantum_game(&self, name: &str) -> Result<QuantumGame> {
        let (rows, cols) = (self.rows(), self.cols());
        let dim = rows * cols;
        let shift =
            |n: usize, k: usize| CMatrix::from_fn(n, |i, j| re(((j + k) % n == i) as u8 as f64));
        let moves = |labels: &[String], player: Player| -> Vec<ClassicalMove> {
            labels
                .iter()
                .enumerate()
                .map(|(k, label)| {
                    let m = match player {
                        Player::A => shift(rows, k).kron(&CMatrix::identity(cols)),
                        Player::B => CMatrix::identity(rows).kron(&shift(cols, k)),
                    };
                    ClassicalMove {
                        label: label.clone(),
                        op: Unitary::new(m).expect("permutation matrices are unitary"),
                    }
                })
                .collect()
        };
        let classical = vec![StrategyKind::PureClassical, StrategyKind::MixedClassical];
        let flat = |m: &Vec<Vec<f64>>| m.iter().flatten().copied().collect::<Vec<_>>();
        let zero_sum = flat(&self.payoff_a)
            .iter()
            .zip(flat(&self.payoff_b))
            .all(|(a, b)| a + b == 0.0);
        QuantumGame::new(
            name,
            density_from_pure(&StateVector::basis(dim, 0)?),
            TurnSchedule::new(vec![Player::A, Player::B])?,
            StrategySpace {
                moves: moves(&self.row_labels, Player::A),
                allowed: classical.clone(),
            },
            StrategySpace {
                moves: moves(&self.col_labels, Player::B),
                allowed: classical,
            },
            PayoffRule::new(flat(&self.payoff_a), flat(&self.payoff_b))?,
            zero_sum,
        )
    }
}

/// Weakly dominant rows and columns: `a[r][c] >= a[r'][c]` for every `r'`
/// and every opponent move `c` (and symmetrically for columns).
pub fn dominant_strategies(g: &BimatrixGame) -> (Vec<usize>, Vec<usize>) {
    let (rows, cols) = (g.rows(), g.cols());
    let col_max_a: Vec<f64> = (0..cols)
        .map(|c| {
            (0..rows)
                .map(|r| g.pa(r, c))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let row_max_b: Vec<f64> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| g.pb(r, c))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let dom_rows = (0..rows)
        .filter(|&r| (0..cols).all(|c| g.pa(r, c) >= col_max_a[c] - TIE_TOL))
        .collect();
    let dom_cols = (0..cols)
        .filter(|&c| (0..rows).all(|r| g.pb(r, c) >= row_max_b[r] - TIE_TOL))
        .collect();
    (dom_rows, dom_cols)
}

/// Cells where no unilateral deviation strictly improves the deviator.
pub fn pure_nash(g: &BimatrixGame) -> Vec<(usize, usize)> {
    let (rows, cols) = (g.rows(), g.cols());
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let a_ok = (0..rows).all(|r2| g.pa(r2, c) <= g.pa(r, c) + TIE_TOL);
            let b_ok = (0..cols).all(|c2| g.pb(r, c2) <= g.pb(r, c) + TIE_TOL);
            if a_ok && b_ok {
                out.push((r, c));
            }
        }
    }
    out
}

/// Cells whose payoff pair is not strictly Pareto-dominated by another cell.
pub fn pareto_front(g: &BimatrixGame) -> Vec<(usize, usize)> {
    let cols = g.cols();
    let pairs: Vec<PayoffPair> = (0..g.rows())
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| PayoffPair {
            p_a: g.pa(r, c),
            p_b: g.pb(r, c),
        })
        .collect();
    pareto_mask(&pairs)
        .into_iter()
        .enumerate()
        .filter(|(_, keep)| *keep)
        .map(|(k, _)| (k / cols, k % cols))
        .collect()
}

/// Marks points not strictly dominated by any other point, comparing
/// payoffs quantized to [`TIE_TOL`]. Runs in `O(n log n)`.
fn pareto_mask(points: &[PayoffPair]) -> Vec<bool> {
    let q = |x: f64| (x / TIE_TOL).round();
    let keys: Vec<(f64, f64)> = points.iter().map(|p| (q(p.p_a), q(p.p_b))).collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        keys[j]
            .0
            .total_cmp(&keys[i].0)
            .then(keys[j].1.total_cmp(&keys[i].1))
    });
    let mut mask = vec![false; points.len()];
    let mut best_b_above = f64::NEG_INFINITY;
    let mut k = 0;
    while k < order.len() {
        let group_a = keys[order[k]].0;
        let group_b = keys[order[k]].1;
        let mut end = k;
        while end < order.len() && keys[order[end]].0 == group_a {
            let (_, b) = keys[order[end]];
            mask[order[end]] = b == group_b && b > best_b_above;
            end += 1;
        }
        best_b_above = best_b_above.max(group_b);
        k = end;
    }
    mask
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedProfile {
    pub row_dist: Vec<f64>,
    pub col_dist: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedNash {
    pub profiles: Vec<MixedProfile>,
    /// The equilibrium set contains a continuum; `profiles` lists the
    /// extreme points of its components.
    pub degenerate: bool,
}

/// All Nash equilibria of a 2x2 game by support enumeration.
///
/// Best-response correspondences of a 2x2 game only switch at the
/// indifference points, so every equilibrium component is a union of cells
/// of the grid `{0, x*, 1} x {0, y*, 1}` and its extreme points lie on that
/// grid. `x` and `y` are the probabilities of row 0 and column 0.
pub fn mixed_nash_2x2(g: &BimatrixGame) -> Result<MixedNash> {
    if g.rows() != 2 || g.cols() != 2 {
        return Err(Error::InvalidParameter(format!(
            "mixed_nash_2x2 needs a 2x2 game, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let (a, b) = (|r, c| g.pa(r, c), |r, c| g.pb(r, c));
    // Advantage of row 0 over row 1 against column mix y, and of column 0
    // over column 1 against row mix x; both are affine.
    let row_adv = |y: f64| y * (a(0, 0) - a(1, 0)) + (1.0 - y) * (a(0, 1) - a(1, 1));
    let col_adv = |x: f64| x * (b(0, 0) - b(0, 1)) + (1.0 - x) * (b(1, 0) - b(1, 1));
    let root = |f: &dyn Fn(f64) -> f64| {
        let (f0, f1) = (f(0.0), f(1.0));
        let den = f1 - f0;
        if den.abs() <= TIE_TOL {
            return None;
        }
        let t = -f0 / den;
        (t > 0.0 && t < 1.0).then_some(t)
    };
    let axis = |r: Option<f64>| {
        let mut v = vec![0.0];
        v.extend(r);
        v.push(1.0);
        v
    };
    let xs = axis(root(&col_adv));
    let ys = axis(root(&row_adv));

    let is_nash = |x: f64, y: f64| {
        let da = row_adv(y);
        let db = col_adv(x);
        (x <= 0.0 || da >= -TIE_TOL)
            && (x >= 1.0 || da <= TIE_TOL)
            && (y <= 0.0 || db >= -TIE_TOL)
            && (y >= 1.0 || db <= TIE_TOL)
    };
    let seg = |x0: f64, y0: f64, x1: f64, y1: f64| {
        is_nash(x0, y0) && is_nash(x1, y1) && is_nash((x0 + x1) / 2.0, (y0 + y1) / 2.0)
    };

    let mut degenerate = false;
    let mut profiles = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            if !is_nash(x, y) {
                continue;
            }
            let left = i > 0 && seg(xs[i - 1], y, x, y);
            let right = i + 1 < xs.len() && seg(x, y, xs[i + 1], y);
            let down = j > 0 && seg(x, ys[j - 1], x, y);
            let up = j + 1 < ys.len() && seg(x, y, x, ys[j + 1]);
            degenerate |= left || right || down || up;
            if (left && right) || (down && up) {
                continue;
            }
            profiles.push(MixedProfile {
                row_dist: vec![x, 1.0 - x],
                col_dist: vec![y, 1.0 - y],
            });
        }
    }
    Ok(MixedNash {
        profiles,
        degenerate,
    })
}

// ---------------------------------------------------------------------------
// Strategy-space grids
// ---------------------------------------------------------------------------

/// A one-dimensional parameter interval. Periodic ranges exclude `hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl ParamRange {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: false,
        }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: true,
        }
    }

    pub fn fixed(v: f64) -> Self {
        Self::closed(v, v)
    }

    pub fn points(&self, resolution: usize) -> Result<Vec<f64>> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(Error::EmptyDomain(format!(
                "range [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.lo == self.hi {
            return Ok(vec![self.lo]);
        }
        let span = self.hi - self.lo;
        Ok(if self.periodic {
            (0..resolution)
                .map(|k| self.lo + span * k as f64 / resolution as f64)
                .collect()
        } else {
            (0..resolution)
                .map(|k| self.lo + span * k as f64 / (resolution - 1) as f64)
                .collect()
        })
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let close = if self.periodic { ")" } else { "]" };
        write!(f, "[{}, {}{}", self.lo, self.hi, close)
    }
}

/// A searchable region of one player's strategy space. Parametrized
/// domains get one copy of their axes per owned turn.
#[derive(Clone, Debug)]
pub enum Domain {
    /// Every pure move sequence.
    Pure,
    /// Per-turn mixtures of moves 0 and 1, weight `p` on move 1.
    Flip { p: ParamRange },
    /// Per-turn `U(a, b)` with `a = cos(alpha) e^{i phi1}`,
    /// `b = sin(alpha) e^{i phi2}`.
    Su2 {
        alpha: ParamRange,
        phi1: ParamRange,
        phi2: ParamRange,
    },
    /// An explicit list of labelled strategies.
    Points(Vec<(String, Strategy)>),
}

impl Domain {
    pub fn flip_unit() -> Self {
        Domain::Flip {
            p: ParamRange::closed(0.0, 1.0),
        }
    }

    pub fn su2_full() -> Self {
        use std::f64::consts::{FRAC_PI_2, TAU};
        Domain::Su2 {
            alpha: ParamRange::closed(0.0, FRAC_PI_2),
            phi1: ParamRange::periodic(0.0, TAU),
            phi2: ParamRange::periodic(0.0, TAU),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Pure => f.write_str("pure"),
            Domain::Flip { p } => write!(f, "mixed(p in {p})"),
            Domain::Su2 { alpha, phi1, phi2 } => {
                write!(f, "u2(alpha in {alpha}, phi1 in {phi1}, phi2 in {phi2})")
            }
            Domain::Points(pts) => write!(f, "points({})", pts.len()),
        }
    }
}

/// One grid point: its strategy, a label in the CLI strategy grammar where
/// one exists, and the raw parameters.
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub label: String,
    pub params: Vec<f64>,
    pub strategy: Strategy,
}

/// Cartesian product of per-axis values, last axis fastest.
fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

fn join(values: &[String], sep: &str) -> String {
    values.join(sep)
}

/// Enumerates a domain in lexicographic grid-index order.
pub fn expand_domain(
    game: &QuantumGame,
    player: Player,
    domain: &Domain,
    resolution: usize,
) -> Result<Vec<GridPoint>> {
    if resolution < 2 {
        return Err(Error::EmptyDomain(format!("resolution {resolution} < 2")));
    }
    let turns = game.schedule().turn_count(player);
    let space = game.space(player);
    let points = match domain {
        Domain::Pure => {
            let n = space.moves.len();
            if n == 0 {
                return Err(Error::EmptyDomain(format!("player {player} has no moves")));
            }
            let axes = vec![(0..n).map(|i| i as f64).collect::<Vec<_>>(); turns];
            cartesian(&axes)
                .into_iter()
                .map(|params| {
                    let seq: Vec<usize> = params.iter().map(|&x| x as usize).collect();
                    let labels: Vec<String> =
                        seq.iter().map(|&i| space.moves[i].label.clone()).collect();
                    GridPoint {
                        label: format!("pure:{}", join(&labels, ",")),
                        params,
                        strategy: Strategy::PureClassical(seq),
                    }
                })
                .collect()
        }
        Domain::Flip { p } => {
            if space.moves.len() != 2 {
                return Err(Error::EmptyDomain(format!(
                    "flip domain needs exactly two moves, player {player} has {}",
                    space.moves.len()
                )));
            }
            let axis = p.points(resolution)?;
            cartesian(&vec![axis; turns])
                .into_iter()
                .map(|params| {
                    let labels: Vec<String> = params.iter().map(|p| format!("{p}")).collect();
                    GridPoint {
                        label: format!("mixed:{}", join(&labels, ";")),
                        strategy: Strategy::MixedClassical(
                            params.iter().map(|&p| vec![1.0 - p, p]).collect(),
                        ),
                        params,
                    }
                })
                .collect()
        }
        Domain::Su2 { alpha, phi1, phi2 } => {
            let per_turn = [
                alpha.points(resolution)?,
                phi1.points(resolution)?,
                phi2.points(resolution)?,
            ];
            let axes: Vec<Vec<f64>> = (0..turns).flat_map(|_| per_turn.clone()).collect();
            let mut out = Vec::new();
            for params in cartesian(&axes) {
                let mut ops = Vec::with_capacity(turns);
                let mut labels = Vec::with_capacity(turns);
                for t in params.chunks(3) {
                    ops.push(u2_angles(t[0], t[1], t[2])?);
                    labels.push(format!("{},{},{}", t[0], t[1], t[2]));
                }
                out.push(GridPoint {
                    label: format!("u2:{}", join(&labels, ";")),
                    params,
                    strategy: Strategy::QuantumUnitary(ops),
                });
            }
            out
        }
        Domain::Points(list) => list
            .iter()
            .enumerate()
            .map(|(k, (label, s))| GridPoint {
                label: label.clone(),
                params: vec![k as f64],
                strategy: s.clone(),
            })
            .collect(),
    };
    if points.is_empty() {
        return Err(Error::EmptyDomain(format!("{domain} for player {player}")));
    }
    Ok(points)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridOptions {
    pub resolution: usize,
    pub epsilon: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileFlags {
    pub dominant_a: bool,
    pub dominant_b: bool,
    pub nash: bool,
    pub pareto: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSummary {
    pub index: usize,
    pub label: String,
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileReport {
    pub a: PointSummary,
    pub b: PointSummary,
    pub payoff_a: f64,
    pub payoff_b: f64,
    pub flags: ProfileFlags,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridMeta {
    pub resolution: usize,
    pub epsilon: f64,
    pub domain_a: String,
    pub domain_b: String,
    pub points_a: usize,
    pub points_b: usize,
    pub profiles_searched: usize,
}

/// Epsilon-Nash profiles of a grid, in `(index_a, index_b)` order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub profiles: Vec<ProfileReport>,
    pub grid_meta: GridMeta,
}

fn compile_all(
    game: &QuantumGame,
    player: Player,
    pts: &[GridPoint],
) -> Result<Vec<crate::game::CompiledStrategy>> {
    pts.iter()
        .map(|p| game.compile(player, &p.strategy))
        .collect()
}

/// Payoff table over two grids, row-major by A's index. Rows are computed
/// in parallel and collected in index order.
fn payoff_table(
    game: &QuantumGame,
    pts_a: &[GridPoint],
    pts_b: &[GridPoint],
) -> Result<Vec<Vec<PayoffPair>>> {
    let ca = compile_all(game, Player::A, pts_a)?;
    let cb = compile_all(game, Player::B, pts_b)?;
    ca.par_iter()
        .map(|sa| {
            cb.iter()
                .map(|sb| Ok(game.score(&game.evolve(sa, sb)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Flags every grid profile `(s_a, s_b)` from which neither player can gain
/// more than `epsilon` by moving to another grid point.
pub fn grid_nash(
    game: &QuantumGame,
    domain_a: &Domain,
    domain_b: &Domain,
    opts: GridOptions,
) -> Result<EquilibriumReport> {
    if opts.epsilon.is_nan() || opts.epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon {}", opts.epsilon)));
    }
    let pts_a = expand_domain(game, Player::A, domain_a, opts.resolution)?;
    let pts_b = expand_domain(game, Player::B, domain_b, opts.resolution)?;
    let table = payoff_table(game, &pts_a, &pts_b)?;
    let (na, nb) = (pts_a.len(), pts_b.len());

    let col_max_a: Vec<f64> = (0..nb)
        .map(|j| {
            (0..na)
                .map(|i| table[i][j].p_a)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let row_max_b: Vec<f64> = table
        .iter()
        .map(|row| row.iter().map(|p| p.p_b).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let dominant_a: Vec<bool> = (0..na)
        .map(|i| (0..nb).all(|j| table[i][j].p_a >= col_max_a[j] - TIE_TOL))
        .collect();
    let dominant_b: Vec<bool> = (0..nb)
        .map(|j| (0..na).all(|i| table[i][j].p_b >= row_max_b[i] - TIE_TOL))
        .collect();
    let flat: Vec<PayoffPair> = table.iter().flatten().copied().collect();
    let pareto = pareto_mask(&flat);

    let summary = |pts: &[GridPoint], k: usize| PointSummary {
        index: k,
        label: pts[k].label.clone(),
        params: pts[k].params.clone(),
    };
    let mut profiles = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            let p = table[i][j];
            let nash = p.p_a >= col_max_a[j] - opts.epsilon && p.p_b >= row_max_b[i] - opts.epsilon;
            if !nash {
                continue;
            }
            profiles.push(ProfileReport {
                a: summary(&pts_a, i),
                b: summary(&pts_b, j),
                payoff_a: p.p_a,
                payoff_b: p.p_b,
                flags: ProfileFlags {
                    dominant_a: dominant_a[i],
                    dominant_b: dominant_b[j],
                    nash,
                    pareto: pareto[i * nb + j],
                },
            });
        }
    }
    Ok(EquilibriumReport {
        profiles,
        grid_meta: GridMeta {
            resolution: opts.resolution,
            epsilon: opts.epsilon,
            domain_a: domain_a.to_string(),
            domain_b: domain_b.to_string(),
            points_a: na,
            points_b: nb,
            profiles_searched: na * nb,
        },
    })
}

/// Best grid response of `responder` to a fixed opponent strategy. Ties
/// (within [`TIE_TOL`]) go to the lowest grid index.
pub fn best_response(
    game: &QuantumGame,
    responder: Player,
    opponent: &Strategy,
    domain: &Domain,
    resolution: usize,
) -> Result<(GridPoint, f64)> {
    let other = match responder {
        Player::A => Player::B,
        Player::B => Player::A,
    };
    let fixed = game.compile(other, opponent)?;
    let pts = expand_domain(game, responder, domain, resolution)?;
    let compiled = compile_all(game, responder, &pts)?;
    let payoffs: Vec<f64> = compiled
        .par_iter()
        .map(|s| {
            let rho = match responder {
                Player::A => game.evolve(s, &fixed)?,
                Player::B => game.evolve(&fixed, s)?,
            };
            Ok(game.score(&rho).for_player(responder))
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (k, &v) in payoffs.iter().enumerate().skip(1) {
        if v > payoffs[best] + TIE_TOL {
            best = k;
        }
    }
    let value = payoffs[best];
    Ok((pts.into_iter().nth(best).expect("index in range"), value))
}
