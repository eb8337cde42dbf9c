//! Coordination and Nash bargaining between two selfish users of a Gaussian
//! interference channel.
//!
//! Users agree on a Han-Kobayashi scheme with a fixed power split when both
//! have an incentive to, then operate at the Nash bargaining solution of the
//! scheme's rate region; otherwise they fall back to treating interference
//! as noise. A time-division baseline is provided for comparison.

pub mod bargain;
pub mod channel;
pub mod error;
pub mod mechanism;
pub mod region;
pub mod report;
pub mod tdm;

pub use bargain::{
    disagreement_point, grid_oracle_nbs, is_essential, log_nash_product, nbs_mac, nbs_polytope,
    verify_kkt, BargainingProblem, KktReport, NbsOutcome,
};
pub use channel::{capacity_c, classify_regime, db_to_linear, ChannelParams, Regime};
pub use error::{Error, Result};
pub use mechanism::{phase1_negotiate, run_mechanism, BreakdownReason, MechanismResult};
pub use region::{
    build_hk_region, build_mac_region, max_sum_rate, region_contains, region_vertices,
    select_power_split, PowerSplit, RatePair, RatePolytope,
};
pub use tdm::{tdm_nbs, tdm_rate, tdm_region_samples, TdmAllocation, TdmNbs};
