//! Experiment drivers behind the command-line tool: JSON reports, the
//! region export and the b-sweep, with deterministic text formatting.
//!
//! All rates are in bits per channel use.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::bargain::{grid_oracle_nbs, mac_problem, nbs_mac, BargainingProblem, NbsOutcome};
use crate::channel::{db_to_linear, ChannelParams, Regime};
use crate::error::{Error, Result};
use crate::mechanism::{run_mechanism, MechanismResult};
use crate::region::{build_mac_region, max_sum_rate, region_vertices, RatePair};
use crate::tdm::{tdm_nbs, tdm_region_samples, TdmNbs};

pub const SCHEMA: &str = "icbargain/1";
pub const RATE_UNITS: &str = "bits/channel_use";
pub const VERIFY_GRID_N: usize = 2000;

pub const SWEEP_HEADER: &str =
    "b,regime,agreed,r1_0,r2_0,r1_star,r2_star,sum_nbs,sum_max,tdm_r1,tdm_r2,tdm_sum";
pub const REGION_HEADER: &str = "curve,index,r1,r2";

/// Fixed-point rendering with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.starts_with("-0") && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub grid_n: usize,
    pub oracle_solution: RatePair,
    pub sup_norm_deviation: f64,
}

fn oracle_check(problem: &BargainingProblem, solution: RatePair) -> Result<OracleCheck> {
    let oracle_solution = grid_oracle_nbs(problem, VERIFY_GRID_N)?;
    Ok(OracleCheck {
        grid_n: VERIFY_GRID_N,
        oracle_solution,
        sup_norm_deviation: oracle_solution.sup_dist(solution),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NbsMacReport {
    pub schema: &'static str,
    pub units: &'static str,
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub p1: f64,
    pub p2: f64,
    pub phi0: f64,
    pub disagreement: RatePair,
    pub solution: RatePair,
    pub mu1: f64,
    pub vertices: Vec<RatePair>,
    pub outcome: NbsOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<OracleCheck>,
}

pub fn nbs_mac_report(snr1_db: f64, snr2_db: f64, verify: bool) -> Result<NbsMacReport> {
    let p1 = db_to_linear(snr1_db)?;
    let p2 = db_to_linear(snr2_db)?;
    let problem = mac_problem(p1, p2)?;
    let outcome = nbs_mac(p1, p2)?;
    let verify = if verify {
        Some(oracle_check(&problem, outcome.solution)?)
    } else {
        None
    };
    Ok(NbsMacReport {
        schema: SCHEMA,
        units: RATE_UNITS,
        snr1_db,
        snr2_db,
        p1,
        p2,
        phi0: problem.feasible.agg_bounds[0],
        disagreement: problem.disagreement,
        solution: outcome.solution,
        mu1: outcome.multipliers_mu[0],
        vertices: region_vertices(&build_mac_region(p1, p2)?),
        outcome,
        verify,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MechanismReport {
    pub schema: &'static str,
    pub units: &'static str,
    pub params: ChannelParams,
    pub snr1_db: f64,
    pub snr2_db: f64,
    /// (φ₁, φ₂, φ₃, φ₄, φ₅) of the negotiated region.
    pub phi: [f64; 5],
    pub max_sum_rate: f64,
    pub result: MechanismResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<OracleCheck>,
}

impl MechanismReport {
    pub fn degenerate(&self) -> bool {
        self.result.nbs.as_ref().is_some_and(|n| n.degenerate)
    }
}

pub fn mechanism_report(
    a: f64,
    b: f64,
    snr1_db: f64,
    snr2_db: f64,
    verify: bool,
) -> Result<MechanismReport> {
    let params = ChannelParams::from_db(a, b, snr1_db, snr2_db)?;
    let result = run_mechanism(&params)?;
    let region = &result.hk_region;
    let phi = [
        region.r_upper.r1,
        region.r_upper.r2,
        region.agg_bounds[0],
        region.agg_bounds[1],
        region.agg_bounds[2],
    ];
    let verify = match (&result.nbs, verify) {
        (Some(nbs), true) => {
            let problem = BargainingProblem::new(region.clone(), result.disagreement);
            Some(oracle_check(&problem, nbs.solution)?)
        }
        _ => None,
    };
    Ok(MechanismReport {
        schema: SCHEMA,
        units: RATE_UNITS,
        params,
        snr1_db,
        snr2_db,
        phi,
        max_sum_rate: max_sum_rate(region),
        result,
        verify,
    })
}

/// Everything needed to draw one region figure.
#[derive(Debug, Clone, Serialize)]
pub struct RegionExport {
    pub schema: &'static str,
    pub units: &'static str,
    pub mechanism: MechanismResult,
    pub hk_vertices: Vec<RatePair>,
    pub tdm_frontier: Vec<RatePair>,
    pub tdm_nbs: TdmNbs,
}

pub fn region_export(
    a: f64,
    b: f64,
    snr1_db: f64,
    snr2_db: f64,
    tdm_samples: usize,
) -> Result<RegionExport> {
    let params = ChannelParams::from_db(a, b, snr1_db, snr2_db)?;
    let mechanism = run_mechanism(&params)?;
    Ok(RegionExport {
        schema: SCHEMA,
        units: RATE_UNITS,
        hk_vertices: region_vertices(&mechanism.hk_region),
        tdm_frontier: tdm_region_samples(&params, tdm_samples)?,
        tdm_nbs: tdm_nbs(&params, mechanism.disagreement),
        mechanism,
    })
}

impl RegionExport {
    /// Long-format CSV, one row per point, grouped by curve: `hk_vertex`,
    /// `tdm_frontier`, `disagreement`, `hk_nbs` (only when agreed) and
    /// `tdm_nbs` (only when the TDM problem is essential).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(REGION_HEADER);
        out.push('\n');
        let mut block = |name: &str, pts: &[RatePair]| {
            for (k, p) in pts.iter().enumerate() {
                let _ = writeln!(out, "{name},{k},{},{}", fmt_num(p.r1), fmt_num(p.r2));
            }
        };
        block("hk_vertex", &self.hk_vertices);
        block("tdm_frontier", &self.tdm_frontier);
        block("disagreement", &[self.mechanism.disagreement]);
        if let Some(nbs) = &self.mechanism.nbs {
            block("hk_nbs", &[nbs.solution]);
        }
        if let Some(sol) = self.tdm_nbs.solution() {
            block("tdm_nbs", &[sol]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub b: f64,
    pub regime: Regime,
    pub agreed: bool,
    pub r1_0: f64,
    pub r2_0: f64,
    /// H-K NBS, or the disagreement point on breakdown.
    pub r1_star: f64,
    pub r2_star: f64,
    pub sum_nbs: f64,
    /// Largest sum rate of the negotiated H-K region.
    pub sum_max: f64,
    /// TDM NBS, or the disagreement point when the TDM problem is not
    /// essential.
    pub tdm_r1: f64,
    pub tdm_r2: f64,
    pub tdm_sum: f64,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_num(self.b),
            self.regime.tag(),
            self.agreed,
            fmt_num(self.r1_0),
            fmt_num(self.r2_0),
            fmt_num(self.r1_star),
            fmt_num(self.r2_star),
            fmt_num(self.sum_nbs),
            fmt_num(self.sum_max),
            fmt_num(self.tdm_r1),
            fmt_num(self.tdm_r2),
            fmt_num(self.tdm_sum),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub a: f64,
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub step: f64,
}

impl SweepSpec {
    /// `floor((b_max − b_min)/step) + 1`, with a 1e-9 allowance so that a
    /// step dividing the range exactly is not lost to rounding.
    pub fn row_count(&self) -> usize {
        ((self.b_max - self.b_min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn b_at(&self, k: usize) -> f64 {
        self.b_min + k as f64 * self.step
    }

    fn validate(&self) -> Result<()> {
        let all_finite = [self.a, self.snr1_db, self.snr2_db, self.b_min, self.b_max, self.step]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || self.a < 0.0 || self.b_min < 0.0 || self.b_max < self.b_min || self.step <= 0.0 {
            return Err(Error::Domain(format!(
                "sweep needs a >= 0, 0 <= b_min <= b_max and step > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

pub fn sweep_row(a: f64, b: f64, p1: f64, p2: f64) -> Result<(SweepRow, bool)> {
    let params = ChannelParams::new(a, b, p1, p2)?;
    let mech = run_mechanism(&params)?;
    let r0 = mech.disagreement;
    let star = mech.operating_point;
    let tdm = tdm_nbs(&params, r0).solution().unwrap_or(r0);
    let degenerate = mech.nbs.as_ref().is_some_and(|n| n.degenerate);
    Ok((
        SweepRow {
            b,
            regime: mech.regime,
            agreed: mech.agreed,
            r1_0: r0.r1,
            r2_0: r0.r2,
            r1_star: star.r1,
            r2_star: star.r2,
            sum_nbs: star.sum(),
            sum_max: max_sum_rate(&mech.hk_region),
            tdm_r1: tdm.r1,
            tdm_r2: tdm.r2,
            tdm_sum: tdm.sum(),
        },
        degenerate,
    ))
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// Whether any row needed the grid fallback.
    pub degenerate: bool,
}

/// Rows are computed in parallel and returned in increasing b.
pub fn sweep_b(spec: &SweepSpec) -> Result<Sweep> {
    spec.validate()?;
    let p1 = db_to_linear(spec.snr1_db)?;
    let p2 = db_to_linear(spec.snr2_db)?;
    let results: Vec<(SweepRow, bool)> = (0..spec.row_count())
        .into_par_iter()
        .map(|k| sweep_row(spec.a, spec.b_at(k), p1, p2))
        .collect::<Result<_>>()?;
    let degenerate = results.iter().any(|(_, d)| *d);
    Ok(Sweep {
        rows: results.into_iter().map(|(r, _)| r).collect(),
        degenerate,
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 160);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport<'a> {
    pub schema: &'static str,
    pub units: &'static str,
    pub rows: &'a [SweepRow],
}
