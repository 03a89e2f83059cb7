//! Environment generators with exact linear realizations.

use std::collections::VecDeque;

use rand::Rng;

use super::features::FeatureMap;
use super::mdp::{EpisodicMdp, RewardNoise};
use super::planner::{optimal_q, reachable_states, QTables};
use super::realization::LinearQRealization;
use crate::error::{Error, Result};

/// An MDP together with its feature map, exact realization and oracle tables.
#[derive(Debug, Clone)]
pub struct Environment {
    pub mdp: EpisodicMdp,
    pub features: FeatureMap,
    pub realization: LinearQRealization,
    pub optimal: QTables,
    /// Grid layout when the environment is a maze.
    pub maze: Option<MazeLayout>,
}

impl Environment {
    /// Rescales rewards so `max_x V*_1(x) <= 1`, then solves for the realization.
    pub fn assemble(mut mdp: EpisodicMdp, features: FeatureMap) -> Result<Self> {
        let mut optimal = optimal_q(&mdp);
        let top = optimal.max_start_value();
        if top > 1.0 {
            mdp.scale_rewards(1.0 / top);
            optimal = optimal_q(&mdp);
        }
        let realization = LinearQRealization::solve(&mdp, &features, &optimal)?;
        Ok(Self {
            mdp,
            features,
            realization,
            optimal,
            maze: None,
        })
    }

    /// `V*` from the initial distribution.
    pub fn optimal_value(&self) -> f64 {
        self.optimal.start_value(&self.mdp)
    }

    /// Sub-Gaussian parameter of the regression noise in `Q*` targets.
    ///
    /// Combines the reward-noise bound `b` with the Hoeffding parameter of
    /// the next-state value spread; equals `b` for deterministic transitions.
    pub fn sub_gaussian_sigma(&self) -> f64 {
        let b = self.mdp.noise().bound;
        let mdp = &self.mdp;
        let mut span = 0.0f64;
        for h in 0..mdp.horizon().saturating_sub(1) {
            for x in 0..mdp.n_states() {
                for a in 0..mdp.n_actions() {
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for (y, &p) in mdp.transition(x, a, h).iter().enumerate() {
                        if p > 0.0 {
                            let v = self.optimal.v(y, h + 1);
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                    span = span.max(mdp.gamma() * (hi - lo));
                }
            }
        }
        (b * b + 0.25 * span * span).sqrt()
    }
}

/// Left/right chain with a small reward at the left end and reward 1 for
/// landing on the rightmost state at the last step.
///
/// Action 0 moves left deterministically. Action 1 moves right with
/// probability `1 - slip` and left otherwise. The episode starts in state 0.
pub fn make_chain_mdp(n: usize, horizon: usize, slip: f64, noise_bound: f64) -> Result<Environment> {
    if n < 2 {
        return Err(Error::param("n", "chain needs at least 2 states"));
    }
    if horizon == 0 {
        return Err(Error::param("horizon", "must be >= 1"));
    }
    if !(0.0..0.5).contains(&slip) {
        return Err(Error::param("slip_prob", format!("{slip} not in [0, 0.5)")));
    }
    let (s, a) = (n, 2);
    let small = 0.1 / horizon as f64;
    let mut transitions = vec![0.0; horizon * s * a * s];
    let mut rewards = vec![0.0; horizon * s * a];
    for h in 0..horizon {
        for x in 0..s {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(n - 1);
            let base = (h * s + x) * a;
            transitions[base * s + left] += 1.0;
            transitions[(base + 1) * s + right] += 1.0 - slip;
            transitions[(base + 1) * s + left] += slip;
            if x == 0 {
                rewards[base] += small;
            }
            if h + 1 == horizon {
                for act in 0..a {
                    rewards[base + act] += transitions[(base + act) * s + (n - 1)];
                }
            }
        }
    }
    let mut initial = vec![0.0; s];
    initial[0] = 1.0;
    let mdp = EpisodicMdp::new(
        s,
        a,
        horizon,
        1.0,
        transitions,
        rewards,
        RewardNoise { bound: noise_bound },
        initial,
    )?;
    let features = FeatureMap::tabular_one_hot(s, a, horizon)?;
    Environment::assemble(mdp, features)
}

/// Maze actions in index order.
pub const MAZE_ACTIONS: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

/// Parsed maze layout: open cells in row-major order.
#[derive(Debug, Clone)]
pub struct MazeLayout {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<(usize, usize)>,
    pub start: usize,
    pub goal: usize,
}

impl MazeLayout {
    /// Parses rows of `S` (start), `G` (goal), `#` (wall), `.` (open).
    pub fn parse(grid: &[String]) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, |r| r.chars().count());
        if rows == 0 || cols == 0 {
            return Err(Error::Environment("empty maze".into()));
        }
        let mut cells = Vec::new();
        let (mut start, mut goal) = (Vec::new(), Vec::new());
        for (r, line) in grid.iter().enumerate() {
            if line.chars().count() != cols {
                return Err(Error::Environment(format!("maze row {r} has ragged width")));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '#' => continue,
                    '.' => {}
                    'S' => start.push(cells.len()),
                    'G' => goal.push(cells.len()),
                    other => {
                        return Err(Error::Environment(format!("unknown maze cell {other:?}")))
                    }
                }
                cells.push((r, c));
            }
        }
        if start.len() != 1 || goal.len() != 1 {
            return Err(Error::Environment(
                "maze needs exactly one start and one goal".into(),
            ));
        }
        Ok(Self {
            rows,
            cols,
            cells,
            start: start[0],
            goal: goal[0],
        })
    }

    pub fn index_of(&self, cell: (usize, usize)) -> Option<usize> {
        self.cells.iter().position(|&c| c == cell)
    }

    /// Deterministic successor; walls and borders leave the agent in place.
    pub fn successor(&self, state: usize, action: usize) -> usize {
        let (r, c) = self.cells[state];
        let (dr, dc) = MAZE_ACTIONS[action];
        let (nr, nc) = (r as isize + dr, c as isize + dc);
        if nr < 0 || nc < 0 || nr >= self.rows as isize || nc >= self.cols as isize {
            return state;
        }
        self.index_of((nr as usize, nc as usize)).unwrap_or(state)
    }

    /// Breadth-first distances from `from` to every cell (`None` if unreachable).
    pub fn distances_from(&self, from: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.cells.len()];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap_or(0);
            for a in 0..MAZE_ACTIONS.len() {
                let y = self.successor(x, a);
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }
}

/// Deterministic episodic maze: reward 1 on entering the goal, 0 elsewhere;
/// `H` is the shortest start-to-goal path length. The goal is absorbing.
pub fn make_maze_mdp(grid: &[String], noise_bound: f64) -> Result<(Environment, MazeLayout)> {
    let layout = MazeLayout::parse(grid)?;
    let goal_for = |layout: &MazeLayout| -> Result<usize> {
        layout.distances_from(layout.start)[layout.goal]
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::Environment("goal is unreachable from start".into()))
    };
    let horizon = goal_for(&layout)?;
    let mut env = maze_with_goal(&layout, layout.goal, horizon, noise_bound)?;
    env.maze = Some(layout.clone());
    Ok((env, layout))
}

/// Maze dynamics with the reward placed on an arbitrary goal cell.
pub fn maze_with_goal(
    layout: &MazeLayout,
    goal: usize,
    horizon: usize,
    noise_bound: f64,
) -> Result<Environment> {
    let (s, a) = (layout.cells.len(), MAZE_ACTIONS.len());
    let mut transitions = vec![0.0; horizon * s * a * s];
    let mut rewards = vec![0.0; horizon * s * a];
    for h in 0..horizon {
        for x in 0..s {
            for act in 0..a {
                let sa = (h * s + x) * a + act;
                let y = if x == goal { goal } else { layout.successor(x, act) };
                transitions[sa * s + y] = 1.0;
                if x != goal && y == goal {
                    rewards[sa] = 1.0;
                }
            }
        }
    }
    let mut initial = vec![0.0; s];
    initial[layout.start] = 1.0;
    let mdp = EpisodicMdp::new(
        s,
        a,
        horizon,
        1.0,
        transitions,
        rewards,
        RewardNoise { bound: noise_bound },
        initial,
    )?;
    let features = FeatureMap::tabular_one_hot(s, a, horizon)?;
    Environment::assemble(mdp, features)
}

/// Random tabular MDP: flat-Dirichlet transition rows, uniform reward means,
/// rescaled so the maximum expected return is at most 1.
pub fn make_random_mdp<R: Rng + ?Sized>(
    n_states: usize,
    n_actions: usize,
    horizon: usize,
    noise_bound: f64,
    rng: &mut R,
) -> Result<Environment> {
    if n_states == 0 || n_actions == 0 || horizon == 0 {
        return Err(Error::param("random mdp", "sizes must be >= 1"));
    }
    let (s, a) = (n_states, n_actions);
    let mut transitions = Vec::with_capacity(horizon * s * a * s);
    for _ in 0..horizon * s * a {
        let raw: Vec<f64> = (0..s)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let mut row: Vec<f64> = raw.iter().map(|p| p / total).collect();
        let drift: f64 = 1.0 - row.iter().sum::<f64>();
        let last = row.len() - 1;
        row[last] = (row[last] + drift).max(0.0);
        transitions.extend(row);
    }
    let rewards = (0..horizon * s * a).map(|_| rng.random::<f64>()).collect();
    let mut initial = vec![0.0; s];
    initial[0] = 1.0;
    let mdp = EpisodicMdp::new(
        s,
        a,
        horizon,
        1.0,
        transitions,
        rewards,
        RewardNoise { bound: noise_bound },
        initial,
    )?;
    let features = FeatureMap::tabular_one_hot(s, a, horizon)?;
    Environment::assemble(mdp, features)
}

/// Checks every invariant the generators promise; used by tests and `verify`.
pub fn check_environment(env: &Environment) -> Result<()> {
    let mdp = &env.mdp;
    let reach = reachable_states(mdp);
    for (h, reach_h) in reach.iter().enumerate() {
        for x in (0..mdp.n_states()).filter(|&x| reach_h[x]) {
            for a in 0..mdp.n_actions() {
                let phi = env.features.eval(x, a, h);
                if phi.norm_squared().powi(2) > env.features.norm_bound() + 1e-12 {
                    return Err(Error::Environment(format!("feature norm bound violated at {x},{a},{h}")));
                }
                let diff = (env.realization.q(&env.features, x, a, h) - env.optimal.q(x, a, h)).abs();
                if diff > super::realization::REALIZATION_TOLERANCE {
                    return Err(Error::Environment(format!("realization off by {diff:e} at {x},{a},{h}")));
                }
            }
        }
    }
    let top = env.optimal.max_start_value();
    if !(-1e-12..=1.0 + 1e-12).contains(&top) {
        return Err(Error::Environment(format!("max expected return {top} outside [0,1]")));
    }
    Ok(())
}
