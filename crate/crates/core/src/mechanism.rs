//! Two-phase coordination between the users.
//!
//! Phase 1 fixes the H-K power split for the channel's regime and checks
//! whether both users gain from it. Phase 2 places the users at the Nash
//! bargaining solution of the agreed region. If negotiation breaks down
//! the users keep decoding with interference treated as noise, i.e. they
//! stay at the disagreement point.

use serde::Serialize;

use crate::bargain::{disagreement_point, is_essential, nbs_polytope, BargainingProblem, NbsOutcome};
use crate::channel::{classify_regime, ChannelParams, Regime};
use crate::error::Result;
use crate::region::{build_hk_region, select_power_split, PowerSplit, RatePair, RatePolytope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakdownReason {
    None,
    /// `a·P2 ≤ 1`: user 2's common message would not help user 1.
    User1NoIncentive,
    /// `b·P1 ≤ 1`.
    User2NoIncentive,
    /// The agreed region has no rate pair strictly better than R⁰ for both.
    NotEssential,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Negotiation {
    pub regime: Regime,
    pub split: PowerSplit,
    pub essential: bool,
    pub reason: BreakdownReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismResult {
    pub regime: Regime,
    pub split: PowerSplit,
    pub agreed: bool,
    pub reason: BreakdownReason,
    pub operating_point: RatePair,
    pub hk_region: RatePolytope,
    pub disagreement: RatePair,
    pub nbs: Option<NbsOutcome>,
}

/// Phase 1. Incentive tests use `≤ 1` as breakdown, so `a·P2 = 1` exactly
/// (which makes user 2's message fully private) is a breakdown.
pub fn phase1_negotiate(params: &ChannelParams) -> Negotiation {
    let regime = classify_regime(params);
    let split = select_power_split(params);
    let user1_gains = params.a() * params.p2() > 1.0;
    let user2_gains = params.b() * params.p1() > 1.0;

    let incentive = match regime {
        Regime::Strong => BreakdownReason::None,
        Regime::MixedAWeak if !user1_gains => BreakdownReason::User1NoIncentive,
        Regime::MixedBWeak if !user2_gains => BreakdownReason::User2NoIncentive,
        Regime::Weak if !user1_gains => BreakdownReason::User1NoIncentive,
        Regime::Weak if !user2_gains => BreakdownReason::User2NoIncentive,
        _ => BreakdownReason::None,
    };
    if incentive != BreakdownReason::None {
        return Negotiation {
            regime,
            split,
            essential: false,
            reason: incentive,
        };
    }

    let problem = BargainingProblem::new(build_hk_region(params, split), disagreement_point(params));
    let essential = is_essential(&problem);
    Negotiation {
        regime,
        split,
        essential,
        reason: if essential {
            BreakdownReason::None
        } else {
            BreakdownReason::NotEssential
        },
    }
}

pub fn run_mechanism(params: &ChannelParams) -> Result<MechanismResult> {
    let negotiation = phase1_negotiate(params);
    let hk_region = build_hk_region(params, negotiation.split);
    let disagreement = disagreement_point(params);

    let nbs = if negotiation.reason == BreakdownReason::None {
        let problem = BargainingProblem::new(hk_region.clone(), disagreement);
        Some(nbs_polytope(&problem)?)
    } else {
        None
    };
    let operating_point = nbs.as_ref().map_or(disagreement, |o| o.solution);

    Ok(MechanismResult {
        regime: negotiation.regime,
        split: negotiation.split,
        agreed: nbs.is_some(),
        reason: negotiation.reason,
        operating_point,
        hk_region,
        disagreement,
        nbs,
    })
}
