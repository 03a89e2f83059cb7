//! Exact episodic environments whose optimal Q-function is linear in a known
//! feature map, plus the dynamic-programming oracle used for ground truth.

mod builders;
mod features;
mod mdp;
mod planner;
mod realization;
mod spec;

pub use builders::{
    check_environment, make_chain_mdp, make_maze_mdp, make_random_mdp, maze_with_goal,
    Environment, MazeLayout, MAZE_ACTIONS,
};
pub use features::{FeatureMap, StateFeatures};
pub use mdp::{sample_categorical, EpisodicMdp, Policy, RewardNoise};
pub use planner::{
    bellman_backup, optimal_q, policy_state_values, policy_value, reachable_states, QTables,
};
pub use realization::{LinearQRealization, REALIZATION_TOLERANCE};
pub use spec::{EnvKind, EnvSpec};
