//! Combinatorial subroutines behind the discovery algorithms: greedy set
//! cover, asymmetric k-center, exact brute-force oracles for both, and the
//! graph analytics used by the heuristic baselines.

pub mod centrality;
pub mod k_center;
pub mod set_cover;
pub mod spectral;

pub use centrality::betweenness_centrality;
pub use k_center::{asym_k_center, brute_force_k_center, KCenterInstance};
pub use set_cover::{brute_force_set_cover, greedy_set_cover, SetCoverInstance};
pub use spectral::laplacian_eigens;
