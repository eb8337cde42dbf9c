//! Nash bargaining over two-user rate polytopes.
//!
//! The Nash product `(R₁ − R⁰₁)(R₂ − R⁰₂)` is maximized through its
//! logarithm. For a polygon the maximizer sits either on the relative
//! interior of one edge or at a vertex, so the exact solution is found by
//! enumerating active sets of size one and two, solving the stationarity
//! system in closed form for each, and keeping the candidate that is
//! primal feasible with nonnegative multipliers. The multipliers are
//! returned as an optimality certificate.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{cap, ChannelParams};
use crate::error::{Error, Result};
use crate::region::{build_mac_region, HalfPlane, RatePair, RatePolytope, AGG_MATRIX};

/// Margin applied to the strict inequalities of the essentiality test.
pub const ESSENTIAL_MARGIN: f64 = 1e-12;

/// Residual threshold used by [`verify_kkt`].
pub const KKT_TOL: f64 = 1e-7;

const CANDIDATE_FEAS_TOL: f64 = 1e-10;
const CANDIDATE_DUAL_TOL: f64 = 1e-10;
const UPPER_ACTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BargainingProblem {
    pub feasible: RatePolytope,
    pub disagreement: RatePair,
}

impl BargainingProblem {
    pub fn new(feasible: RatePolytope, disagreement: RatePair) -> Self {
        Self {
            feasible,
            disagreement,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            feasible: self.feasible.swapped(),
            disagreement: self.disagreement.swapped(),
        }
    }
}

/// Nash bargaining solution together with its KKT multipliers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NbsOutcome {
    pub solution: RatePair,
    /// Multipliers of the aggregate rows R₁+R₂, 2R₁+R₂, R₁+2R₂.
    pub multipliers_mu: [f64; 3],
    /// Multipliers of the individual-rationality rows R ≥ R⁰.
    pub multipliers_lambda: [f64; 2],
    /// Multipliers of the individual upper bounds R ≤ R¹.
    pub multipliers_upper: [f64; 2],
    pub active_upper: [bool; 2],
    pub nash_product_value: f64,
    /// Set when no active set certified a solution and the grid oracle
    /// result was returned instead.
    pub degenerate: bool,
}

/// Rates each user gets when both treat the other's signal as noise.
pub fn disagreement_point(params: &ChannelParams) -> RatePair {
    let (a, b, p1, p2) = (params.a(), params.b(), params.p1(), params.p2());
    RatePair {
        r1: cap(p1 / (1.0 + a * p2)),
        r2: cap(p2 / (1.0 + b * p1)),
    }
}

/// True iff `R⁰ < R¹` and `A·R⁰ < B`, each with margin [`ESSENTIAL_MARGIN`].
pub fn is_essential(problem: &BargainingProblem) -> bool {
    let r0 = problem.disagreement;
    let poly = &problem.feasible;
    let upper_ok = r0.r1 < poly.r_upper.r1 - ESSENTIAL_MARGIN
        && r0.r2 < poly.r_upper.r2 - ESSENTIAL_MARGIN;
    let agg = poly.agg_apply(r0);
    let agg_ok = agg
        .iter()
        .zip(poly.agg_bounds.iter())
        .all(|(lhs, rhs)| *lhs < rhs - ESSENTIAL_MARGIN);
    upper_ok && agg_ok
}

/// `ln(r₁ − r⁰₁) + ln(r₂ − r⁰₂)`; requires `r > r⁰` strictly.
pub fn log_nash_product(r: RatePair, r0: RatePair) -> Result<f64> {
    let d1 = r.r1 - r0.r1;
    let d2 = r.r2 - r0.r2;
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::Domain(format!(
            "Nash product needs r > r0 strictly, got surplus ({d1}, {d2})"
        )));
    }
    Ok(d1.ln() + d2.ln())
}

/// Solution of a Nash bargaining problem over a general intersection of
/// half-planes, in the caller's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneNbs {
    pub point: [f64; 2],
    /// One multiplier per input half-plane, zero where inactive.
    pub multipliers: Vec<f64>,
}

/// Maximizes `ln(x₁ − d₁) + ln(x₂ − d₂)` over `{x : hᵢ·x ≤ bᵢ}` by active-set
/// enumeration. Returns `None` when no candidate is certified, which happens
/// for non-essential, unbounded or numerically degenerate inputs.
pub fn solve_nbs_half_planes(planes: &[HalfPlane], disagreement: [f64; 2]) -> Option<HalfPlaneNbs> {
    // Surplus coordinates: s = x − d, constraint gᵢ·s ≤ cᵢ.
    let shifted: Vec<([f64; 2], f64)> = planes
        .iter()
        .map(|h| (h.normal, h.bound - h.eval(disagreement)))
        .collect();

    let mut best: Option<([f64; 2], Vec<f64>, f64)> = None;
    let mut consider = |s: [f64; 2], mult: Vec<f64>| {
        if !(s[0] > 0.0 && s[1] > 0.0) {
            return;
        }
        let feasible = shifted.iter().all(|(g, c)| {
            g[0] * s[0] + g[1] * s[1] - c <= CANDIDATE_FEAS_TOL * (1.0 + c.abs())
        });
        let grad_scale = 1.0 + (1.0 / s[0]).max(1.0 / s[1]);
        let dual_ok = mult.iter().all(|m| *m >= -CANDIDATE_DUAL_TOL * grad_scale);
        if !(feasible && dual_ok) {
            return;
        }
        let value = s[0].ln() + s[1].ln();
        if best.as_ref().map_or(true, |(_, _, v)| value > *v) {
            best = Some((s, mult.into_iter().map(|m| m.max(0.0)).collect(), value));
        }
    };

    let m = shifted.len();
    // One active row: stationarity 1/sᵢ = ν·gᵢ gives sᵢ = c/(2gᵢ).
    for (k, (g, c)) in shifted.iter().enumerate() {
        if g[0] > 0.0 && g[1] > 0.0 && *c > 0.0 {
            let s = [c / (2.0 * g[0]), c / (2.0 * g[1])];
            let mut mult = vec![0.0; m];
            mult[k] = 2.0 / c;
            consider(s, mult);
        }
    }
    // Two active rows: their intersection, then ν from the 2×2 system.
    for k in 0..m {
        for l in (k + 1)..m {
            let (gk, ck) = shifted[k];
            let (gl, cl) = shifted[l];
            let det = gk[0] * gl[1] - gk[1] * gl[0];
            let scale = gk[0].abs().max(gk[1].abs()) * gl[0].abs().max(gl[1].abs());
            if det.abs() <= 1e-14 * scale {
                continue;
            }
            let s = [(ck * gl[1] - cl * gk[1]) / det, (gk[0] * cl - gl[0] * ck) / det];
            if !(s[0] > 0.0 && s[1] > 0.0) {
                continue;
            }
            let grad = [1.0 / s[0], 1.0 / s[1]];
            // [gk gl] (νk, νl)ᵀ = grad
            let nu_k = (grad[0] * gl[1] - grad[1] * gl[0]) / det;
            let nu_l = (gk[0] * grad[1] - gk[1] * grad[0]) / det;
            let mut mult = vec![0.0; m];
            mult[k] = nu_k;
            mult[l] = nu_l;
            consider(s, mult);
        }
    }

    best.map(|(s, multipliers, _)| HalfPlaneNbs {
        point: [disagreement[0] + s[0], disagreement[1] + s[1]],
        multipliers,
    })
}

/// Exact Nash bargaining solution over an H-K (or MAC) polytope.
///
/// Falls back to [`grid_oracle_nbs`] with `degenerate = true` if no active set
/// yields a certified candidate.
pub fn nbs_polytope(problem: &BargainingProblem) -> Result<NbsOutcome> {
    if !is_essential(problem) {
        return Err(Error::NotEssential);
    }
    let poly = &problem.feasible;
    let r0 = problem.disagreement;
    let planes = poly.upper_half_planes();

    match solve_nbs_half_planes(&planes, r0.to_array()) {
        Some(sol) => {
            let solution = RatePair::from_array(sol.point);
            let nu = &sol.multipliers;
            Ok(assemble_outcome(
                poly,
                r0,
                solution,
                [nu[2], nu[3], nu[4]],
                [nu[0], nu[1]],
                false,
            ))
        }
        None => {
            let solution = grid_oracle_nbs(problem, 2000)?;
            Ok(assemble_outcome(poly, r0, solution, [0.0; 3], [0.0; 2], true))
        }
    }
}

fn assemble_outcome(
    poly: &RatePolytope,
    r0: RatePair,
    solution: RatePair,
    mu: [f64; 3],
    upper: [f64; 2],
    degenerate: bool,
) -> NbsOutcome {
    let active_upper = [
        (solution.r1 - poly.r_upper.r1).abs() <= UPPER_ACTIVE_TOL,
        (solution.r2 - poly.r_upper.r2).abs() <= UPPER_ACTIVE_TOL,
    ];
    let nash_product_value = ((solution.r1 - r0.r1) * (solution.r2 - r0.r2)).max(0.0);
    NbsOutcome {
        solution,
        multipliers_mu: mu,
        multipliers_lambda: [0.0; 2],
        multipliers_upper: upper,
        active_upper,
        nash_product_value,
        degenerate,
    }
}

/// NBS of the Gaussian MAC in closed form: equal surplus on the dominant
/// face, with `μ₁ = 2/(φ₀ − R⁰₁ − R⁰₂)`.
pub fn nbs_mac(p1: f64, p2: f64) -> Result<NbsOutcome> {
    let poly = build_mac_region(p1, p2)?;
    let r0 = mac_disagreement_point(p1, p2)?;
    let phi0 = poly.agg_bounds[0];
    let mu1 = 2.0 / (phi0 - r0.r1 - r0.r2);
    let surplus = 1.0 / mu1;
    let solution = RatePair {
        r1: r0.r1 + surplus,
        r2: r0.r2 + surplus,
    };
    Ok(assemble_outcome(&poly, r0, solution, [mu1, 0.0, 0.0], [0.0; 2], false))
}

/// Safe rates over the MAC: each user decoded treating the other as noise.
pub fn mac_disagreement_point(p1: f64, p2: f64) -> Result<RatePair> {
    let params = ChannelParams::new(1.0, 1.0, p1, p2)?;
    Ok(disagreement_point(&params))
}

/// The MAC bargaining problem `(pentagon, safe rates)`.
pub fn mac_problem(p1: f64, p2: f64) -> Result<BargainingProblem> {
    Ok(BargainingProblem::new(
        build_mac_region(p1, p2)?,
        mac_disagreement_point(p1, p2)?,
    ))
}

/// Brute-force maximizer of the Nash product over `n` equally spaced R₁
/// columns of `[R⁰₁, R¹₁]`, refined once at ten times the resolution
/// around the best column.
///
/// The log Nash product increases in R₂, so each column is evaluated at the
/// top of its feasible segment, the limit of an arbitrarily fine R₂ grid.
/// A plain two-dimensional lattice drifts along flat faces by roughly the
/// square root of its spacing. Ties go to the lexicographically smallest
/// rate pair.
pub fn grid_oracle_nbs(problem: &BargainingProblem, n: usize) -> Result<RatePair> {
    if n < 100 {
        return Err(Error::Domain(format!("grid oracle needs n >= 100, got {n}")));
    }
    if !is_essential(problem) {
        return Err(Error::NotEssential);
    }
    let poly = &problem.feasible;
    let r0 = problem.disagreement;
    let planes = poly.upper_half_planes();
    let column = |r1: f64| -> Option<(f64, RatePair)> {
        if r1 <= r0.r1 || r1 > poly.r_upper.r1 {
            return None;
        }
        let top = planes
            .iter()
            .filter(|h| h.normal[1] > 0.0)
            .map(|h| (h.bound - h.normal[0] * r1) / h.normal[1])
            .fold(f64::INFINITY, f64::min);
        let feasible_r1 = planes
            .iter()
            .filter(|h| h.normal[1] == 0.0)
            .all(|h| h.normal[0] * r1 <= h.bound);
        if !feasible_r1 || top <= r0.r2 {
            return None;
        }
        let r = RatePair { r1, r2: top };
        Some((log_nash_product(r, r0).ok()?, r))
    };

    let h = (poly.r_upper.r1 - r0.r1) / n as f64;
    let (_, coarse) = (1..=n)
        .into_par_iter()
        .filter_map(|i| column(r0.r1 + h * i as f64))
        .reduce_with(better)
        .ok_or(Error::NotEssential)?;

    let fine = h / 10.0;
    let best = (-10i32..=10)
        .filter_map(|k| column(coarse.r1 + fine * k as f64))
        .reduce(better)
        .map_or(coarse, |(_, r)| r);
    Ok(best)
}

fn better(x: (f64, RatePair), y: (f64, RatePair)) -> (f64, RatePair) {
    use std::cmp::Ordering::*;
    match x.0.total_cmp(&y.0) {
        Greater => x,
        Less => y,
        Equal => {
            let kx = (x.1.r1, x.1.r2);
            let ky = (y.1.r1, y.1.r2);
            if ky.0.total_cmp(&kx.0).then(ky.1.total_cmp(&kx.1)) == Less {
                y
            } else {
                x
            }
        }
    }
}

/// Worst violation of each KKT condition for an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    pub stationarity: f64,
    pub primal_feasibility: f64,
    pub dual_feasibility: f64,
    pub complementary_slackness: f64,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.stationarity
            .max(self.primal_feasibility)
            .max(self.dual_feasibility)
            .max(self.complementary_slackness)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() < KKT_TOL
    }
}

/// Checks the Lagrangian
/// `f(R) + Σλᵢ(Rᵢ − R⁰ᵢ) + Σμⱼ(Bⱼ − (A·R)ⱼ) + Σνᵢ(R¹ᵢ − Rᵢ)`
/// at the reported solution. Stationarity residuals are scaled by
/// `max(1, 1/(R*ᵢ − R⁰ᵢ))`.
pub fn verify_kkt(problem: &BargainingProblem, outcome: &NbsOutcome) -> KktReport {
    let poly = &problem.feasible;
    let r0 = problem.disagreement.to_array();
    let r = outcome.solution.to_array();
    let upper = poly.r_upper.to_array();
    let mu = outcome.multipliers_mu;
    let lambda = outcome.multipliers_lambda;
    let nu = outcome.multipliers_upper;
    let agg = poly.agg_apply(outcome.solution);

    let mut stationarity: f64 = 0.0;
    for i in 0..2 {
        let surplus = r[i] - r0[i];
        if surplus <= 0.0 {
            stationarity = f64::INFINITY;
            continue;
        }
        let grad = 1.0 / surplus;
        let mu_term: f64 = (0..3).map(|j| mu[j] * AGG_MATRIX[j][i]).sum();
        let resid = (grad + lambda[i] - mu_term - nu[i]).abs() / grad.max(1.0);
        stationarity = stationarity.max(resid);
    }

    let mut primal: f64 = 0.0;
    for i in 0..2 {
        primal = primal.max(r[i] - upper[i]).max(r0[i] - r[i]).max(-r[i]);
    }
    for j in 0..3 {
        primal = primal.max(agg[j] - poly.agg_bounds[j]);
    }

    let dual = mu
        .iter()
        .chain(lambda.iter())
        .chain(nu.iter())
        .fold(0.0f64, |acc, m| acc.max(-m));

    let mut slack: f64 = 0.0;
    for j in 0..3 {
        slack = slack.max((mu[j] * (agg[j] - poly.agg_bounds[j])).abs());
    }
    for i in 0..2 {
        slack = slack
            .max((lambda[i] * (r[i] - r0[i])).abs())
            .max((nu[i] * (upper[i] - r[i])).abs());
    }

    KktReport {
        stationarity,
        primal_feasibility: primal,
        dual_feasibility: dual,
        complementary_slackness: slack,
    }
}
