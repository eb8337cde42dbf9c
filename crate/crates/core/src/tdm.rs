//! Time-division baseline: each user transmits alone for a fraction ρᵢ of
//! the time at power Pᵢ/ρᵢ.

use serde::Serialize;

use crate::channel::{cap, ChannelParams};
use crate::error::{Error, Result};
use crate::region::RatePair;

/// Bracket width at which the golden-section search stops.
pub const RHO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdmAllocation {
    rho1: f64,
    rho2: f64,
}

impl TdmAllocation {
    pub fn new(rho1: f64, rho2: f64) -> Result<Self> {
        if !(rho1 >= 0.0 && rho2 >= 0.0 && rho1 + rho2 <= 1.0 + 1e-15) {
            return Err(Error::Domain(format!(
                "time shares must be nonnegative with sum <= 1, got ({rho1}, {rho2})"
            )));
        }
        Ok(Self { rho1, rho2 })
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }
}

/// `ρ·C(P/ρ)`, extended by continuity to 0 at ρ = 0.
fn share_rate(rho: f64, p: f64) -> f64 {
    if rho <= 0.0 {
        0.0
    } else {
        rho * cap(p / rho)
    }
}

pub fn tdm_rate(alloc: TdmAllocation, params: &ChannelParams) -> RatePair {
    RatePair {
        r1: share_rate(alloc.rho1, params.p1()),
        r2: share_rate(alloc.rho2, params.p2()),
    }
}

/// Rate pair on the TDM frontier ρ₂ = 1 − ρ₁.
fn frontier(rho1: f64, params: &ChannelParams) -> RatePair {
    RatePair {
        r1: share_rate(rho1, params.p1()),
        r2: share_rate(1.0 - rho1, params.p2()),
    }
}

/// `n` frontier points at equally spaced ρ₁ from 0 to 1.
pub fn tdm_region_samples(params: &ChannelParams, n: usize) -> Result<Vec<RatePair>> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 TDM samples, got {n}")));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|k| frontier(k as f64 / last, params)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TdmNbs {
    Essential { solution: RatePair, rho1: f64 },
    NotEssential,
}

impl TdmNbs {
    pub fn solution(&self) -> Option<RatePair> {
        match self {
            TdmNbs::Essential { solution, .. } => Some(*solution),
            TdmNbs::NotEssential => None,
        }
    }
}

/// Nash bargaining solution over the TDM region with disagreement point `r0`.
///
/// The maximizer lies on the frontier. The essential range of ρ₁ is found by
/// bisection on each user's zero-surplus crossing, then the log Nash product
/// is maximized by golden-section search.
pub fn tdm_nbs(params: &ChannelParams, r0: RatePair) -> TdmNbs {
    let (p1, p2) = (params.p1(), params.p2());
    // User 1's rate grows with ρ₁; user 2's shrinks.
    let lo = if r0.r1 <= 0.0 {
        0.0
    } else if r0.r1 >= cap(p1) {
        return TdmNbs::NotEssential;
    } else {
        bisect(|rho| share_rate(rho, p1) - r0.r1)
    };
    let hi = if r0.r2 <= 0.0 {
        1.0
    } else if r0.r2 >= cap(p2) {
        return TdmNbs::NotEssential;
    } else {
        1.0 - bisect(|rho| share_rate(rho, p2) - r0.r2)
    };
    if hi - lo <= RHO_TOL {
        return TdmNbs::NotEssential;
    }

    let objective = |rho: f64| {
        let r = frontier(rho, params);
        let d1 = r.r1 - r0.r1;
        let d2 = r.r2 - r0.r2;
        if d1 > 0.0 && d2 > 0.0 {
            d1.ln() + d2.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    let rho1 = golden_section_max(objective, lo, hi, RHO_TOL);
    TdmNbs::Essential {
        solution: frontier(rho1, params),
        rho1,
    }
}

/// Root of an increasing function on [0, 1] with `f(0) < 0 < f(1)`.
fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximizer of a unimodal function on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
