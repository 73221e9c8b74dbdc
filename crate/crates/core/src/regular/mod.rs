//! Regular pairs, cluster cycles and good sets.

mod cycle;
mod good;
mod pairs;

pub use cycle::ClusterCycle;
pub use good::{find_good_set, good_set_of_size, is_good_set_surrogate, random_restriction, surrogate_passes, GoodSetParams, SurrogateVerdict, GOOD_SET_RETRIES};
pub use pairs::{check_cluster_cycle, check_eps_regular, density, CycleVerdict, PairCheck, RegularityVerdict, MAX_EXHAUSTIVE_SIDE};
