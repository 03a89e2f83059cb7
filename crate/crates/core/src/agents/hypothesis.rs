use rand::seq::SliceRandom;

use crate::env::{maze_with_goal, sample_categorical, Environment, MazeLayout, Policy, QTables};
use crate::error::{Error, Result};
use crate::rng::RngStream;

use super::{Agent, Transition};

/// Posterior sampling over a finite set of candidate Q-functions for a
/// deterministic environment.
///
/// A hypothesis predicts the reward of `(x, a, h) -> x'` as
/// `Q_h(x, a) - gamma V_{h+1}(x')`. Any hypothesis whose prediction misses an
/// observed reward by more than `tolerance` loses all of its mass.
#[derive(Debug, Clone)]
pub struct HypothesisSetPsrl {
    hypotheses: Vec<QTables>,
    mass: Vec<f64>,
    gamma: f64,
    tolerance: f64,
    n_states: usize,
    n_actions: usize,
    current: usize,
    draws: Vec<usize>,
}

impl HypothesisSetPsrl {
    pub fn new(hypotheses: Vec<QTables>, gamma: f64, tolerance: f64, n_states: usize, n_actions: usize) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::EmptyPosterior);
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::param("tolerance", "must be finite and >= 0"));
        }
        let k = hypotheses.len();
        Ok(Self {
            hypotheses,
            mass: vec![1.0 / k as f64; k],
            gamma,
            tolerance,
            n_states,
            n_actions,
            current: 0,
            draws: Vec::new(),
        })
    }

    /// Hypothesis set for a maze: index 0 is the true goal, the other `k - 1`
    /// place the reward on distinct open cells reachable within the horizon,
    /// chosen with `rng`.
    pub fn for_maze(env: &Environment, layout: &MazeLayout, k: usize, rng: &mut RngStream) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k", "must be > 0"));
        }
        let horizon = env.mdp.horizon();
        let dist = layout.distances_from(layout.start);
        let mut decoys: Vec<usize> = (0..layout.cells.len())
            .filter(|&c| c != layout.goal && matches!(dist[c], Some(d) if d >= 1 && d <= horizon))
            .collect();
        if decoys.len() < k - 1 {
            return Err(Error::param(
                "k",
                format!("maze has only {} candidate goal cells", decoys.len() + 1),
            ));
        }
        decoys.shuffle(rng);
        let noise = env.mdp.noise().bound;
        let mut hypotheses = vec![env.optimal.clone()];
        for &g in &decoys[..k - 1] {
            hypotheses.push(maze_with_goal(layout, g, horizon, noise)?.optimal);
        }
        Self::new(
            hypotheses,
            env.mdp.gamma(),
            noise + 1e-9,
            env.mdp.n_states(),
            env.mdp.n_actions(),
        )
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    /// Indices drawn so far, one per episode.
    pub fn draws(&self) -> &[usize] {
        &self.draws
    }

    /// Draws a hypothesis proportionally to mass.
    pub fn draw(&mut self, rng: &mut RngStream) -> Result<usize> {
        let total: f64 = self.mass.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyPosterior);
        }
        self.current = sample_categorical(&self.mass, rng);
        self.draws.push(self.current);
        Ok(self.current)
    }

    fn predicted_reward(&self, q: &QTables, t: &Transition) -> f64 {
        q.q(t.state, t.action, t.step) - self.gamma * q.v(t.next_state, t.step + 1)
    }

    /// Zeroes contradicted hypotheses and renormalizes.
    pub fn eliminate(&mut self, t: &Transition) -> Result<()> {
        for i in 0..self.hypotheses.len() {
            if self.mass[i] > 0.0 && (self.predicted_reward(&self.hypotheses[i], t) - t.reward).abs() > self.tolerance {
                self.mass[i] = 0.0;
            }
        }
        let total: f64 = self.mass.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyPosterior);
        }
        for m in &mut self.mass {
            *m /= total;
        }
        Ok(())
    }

    fn policy_of(&self, index: usize) -> Policy {
        let q = &self.hypotheses[index];
        let actions: Vec<Vec<usize>> = (0..q.horizon())
            .map(|h| (0..self.n_states).map(|x| q.greedy_action(x, h)).collect())
            .collect();
        Policy::deterministic(self.n_actions, &actions)
    }
}

/// One episode: draw, follow the drawn hypothesis greedily, eliminate.
/// Returns the drawn index, the episode return and the updated mass.
pub fn hypothesis_psrl_episode(
    agent: &mut HypothesisSetPsrl,
    env: &Environment,
    agent_rng: &mut RngStream,
    env_rng: &mut RngStream,
) -> Result<(usize, f64, Vec<f64>)> {
    let chosen = agent.draw(agent_rng)?;
    let horizon = env.mdp.horizon();
    let mut x = env.mdp.sample_initial(env_rng);
    let mut total = 0.0;
    for h in 0..horizon {
        let a = agent.hypotheses[chosen].greedy_action(x, h);
        let (r, next) = env.mdp.step(x, a, h, env_rng);
        total += r;
        agent.eliminate(&Transition {
            state: x,
            action: a,
            reward: r,
            next_state: next,
            step: h,
            terminal: h + 1 == horizon,
        })?;
        x = next;
    }
    Ok((chosen, total, agent.mass.clone()))
}

impl Agent for HypothesisSetPsrl {
    fn name(&self) -> &'static str {
        "hypothesis_psrl"
    }

    fn begin_episode(&mut self, rng: &mut RngStream) {
        self.draw(rng).expect("true hypothesis keeps positive mass");
    }

    fn act(&mut self, state: usize, step: usize, _rng: &mut RngStream) -> usize {
        self.hypotheses[self.current].greedy_action(state, step)
    }

    fn observe(&mut self, transition: &Transition, _rng: &mut RngStream) {
        self.eliminate(transition)
            .expect("true hypothesis keeps positive mass");
    }

    fn end_episode(&mut self) {}

    fn episode_policy(&self) -> Policy {
        self.policy_of(self.current)
    }

    fn greedy_policy(&self) -> Policy {
        let best = crate::linalg::argmax(&self.mass);
        self.policy_of(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::make_maze_mdp;

    fn open_maze() -> (Environment, MazeLayout) {
        let grid: Vec<String> = ["S....", ".....", ".....", "...G.", "....."]
            .iter()
            .map(|s| s.to_string())
            .collect();
        make_maze_mdp(&grid, 0.0).unwrap()
    }

    #[test]
    fn singleton_set_always_succeeds() {
        let (env, layout) = open_maze();
        assert_eq!(env.mdp.horizon(), 6);
        let mut agent = HypothesisSetPsrl::for_maze(&env, &layout, 1, &mut RngStream::named(0, "h")).unwrap();
        let mut rng = RngStream::named(0, "agent");
        let mut env_rng = RngStream::named(0, "env");
        for _ in 0..3 {
            let (chosen, ret, mass) = hypothesis_psrl_episode(&mut agent, &env, &mut rng, &mut env_rng).unwrap();
            assert_eq!((chosen, ret, mass), (0, 1.0, vec![1.0]));
        }
    }

    #[test]
    fn finds_truth_within_k_and_never_revisits() {
        let (env, layout) = open_maze();
        let k = 16;
        for seed in 0..50 {
            let mut set_rng = RngStream::named(seed, "hypotheses");
            let mut agent = HypothesisSetPsrl::for_maze(&env, &layout, k, &mut set_rng).unwrap();
            let mut rng = RngStream::named(seed, "agent");
            let mut env_rng = RngStream::named(seed, "env");
            let mut eliminated = vec![false; k];
            let mut found = None;
            for episode in 1..=k {
                let (chosen, ret, mass) = hypothesis_psrl_episode(&mut agent, &env, &mut rng, &mut env_rng).unwrap();
                assert!(!eliminated[chosen]);
                assert!((mass.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for (i, &m) in mass.iter().enumerate() {
                    if eliminated[i] {
                        assert_eq!(m, 0.0);
                    }
                    eliminated[i] |= m == 0.0;
                }
                assert!(!eliminated[0]);
                if ret == 1.0 {
                    assert_eq!(chosen, 0);
                    found = Some(episode);
                    break;
                }
                assert!(eliminated[chosen]);
            }
            assert!(found.is_some());
        }
    }

    #[test]
    fn all_mass_zero_is_an_error() {
        let (env, layout) = open_maze();
        let decoy = maze_with_goal(&layout, 1, 6, 0.0).unwrap().optimal;
        let mut agent = HypothesisSetPsrl::new(vec![decoy], 1.0, 1e-9, 25, 4).unwrap();
        let mut rng = RngStream::named(0, "agent");
        let mut env_rng = RngStream::named(0, "env");
        let err = hypothesis_psrl_episode(&mut agent, &env, &mut rng, &mut env_rng).unwrap_err();
        assert!(matches!(err, Error::EmptyPosterior));
    }

    #[test]
    fn too_many_hypotheses_rejected() {
        let (env, layout) = open_maze();
        assert!(HypothesisSetPsrl::for_maze(&env, &layout, 100, &mut RngStream::named(0, "h")).is_err());
    }
}
