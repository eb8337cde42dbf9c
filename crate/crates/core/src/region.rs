//! Han-Kobayashi rate polytopes with a fixed power split, the Gaussian MAC
//! capacity pentagon, and the small amount of planar geometry needed on top
//! of them.
//!
//! A region is stored in the matrix form `{R ≥ 0, R ≤ R¹, A·R ≤ B}` with
//! `A = [[1,1],[2,1],[1,2]]`, `R¹ = (φ₁, φ₂)` and `B = (φ₃, φ₄, φ₅)`.

use serde::Serialize;

use crate::channel::{cap, classify_regime, ChannelParams, Regime};
use crate::error::{Error, Result};

/// Rows of the aggregate constraint matrix: R₁+R₂, 2R₁+R₂, R₁+2R₂.
pub const AGG_MATRIX: [[f64; 2]; 3] = [[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]];

/// Rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1.is_finite() && r1 >= 0.0 && r2.is_finite() && r2 >= 0.0) {
            return Err(Error::Domain(format!(
                "rates must be finite and nonnegative, got ({r1}, {r2})"
            )));
        }
        Ok(Self { r1, r2 })
    }

    pub(crate) fn from_array(v: [f64; 2]) -> Self {
        Self { r1: v[0], r2: v[1] }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.r1, self.r2]
    }

    pub fn sum(self) -> f64 {
        self.r1 + self.r2
    }

    pub fn swapped(self) -> Self {
        Self {
            r1: self.r2,
            r2: self.r1,
        }
    }

    pub fn sup_dist(self, other: RatePair) -> f64 {
        (self.r1 - other.r1).abs().max((self.r2 - other.r2).abs())
    }
}

/// Fractions of each user's power spent on its private message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSplit {
    pub alpha: f64,
    pub beta: f64,
}

impl PowerSplit {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !((0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&beta)) {
            return Err(Error::Domain(format!(
                "power split fractions must lie in [0,1], got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }
}

/// Closed half-plane `normal · r ≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlane {
    pub normal: [f64; 2],
    pub bound: f64,
}

impl HalfPlane {
    pub fn new(normal: [f64; 2], bound: f64) -> Self {
        Self { normal, bound }
    }

    #[inline]
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.normal[0] * p[0] + self.normal[1] * p[1]
    }

    /// Signed violation `normal · p − bound`; positive outside.
    #[inline]
    pub fn slack_violation(&self, p: [f64; 2]) -> f64 {
        self.eval(p) - self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePolytope {
    /// Individual bounds (φ₁, φ₂).
    pub r_upper: RatePair,
    /// Aggregate bounds (φ₃, φ₄, φ₅).
    pub agg_bounds: [f64; 3],
    /// (φ₃₁, φ₃₂, φ₃₃); φ₃ is their minimum.
    pub phi3_parts: [f64; 3],
}

impl RatePolytope {
    /// Builds a polytope from raw bounds. `phi3_parts` defaults to three
    /// copies of the sum bound.
    pub fn from_bounds(r_upper: [f64; 2], agg_bounds: [f64; 3]) -> Result<Self> {
        if r_upper
            .iter()
            .chain(agg_bounds.iter())
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::Domain(format!(
                "polytope bounds must be finite and nonnegative: R1={r_upper:?}, B={agg_bounds:?}"
            )));
        }
        Ok(Self {
            r_upper: RatePair::from_array(r_upper),
            agg_bounds,
            phi3_parts: [agg_bounds[0]; 3],
        })
    }

    pub fn agg_matrix(&self) -> [[f64; 2]; 3] {
        AGG_MATRIX
    }

    /// The five upper constraints in the order φ₁, φ₂, φ₃, φ₄, φ₅.
    pub fn upper_half_planes(&self) -> [HalfPlane; 5] {
        [
            HalfPlane::new([1.0, 0.0], self.r_upper.r1),
            HalfPlane::new([0.0, 1.0], self.r_upper.r2),
            HalfPlane::new(AGG_MATRIX[0], self.agg_bounds[0]),
            HalfPlane::new(AGG_MATRIX[1], self.agg_bounds[1]),
            HalfPlane::new(AGG_MATRIX[2], self.agg_bounds[2]),
        ]
    }

    /// All seven supporting half-planes, including `R ≥ 0`.
    pub fn half_planes(&self) -> [HalfPlane; 7] {
        let u = self.upper_half_planes();
        [
            HalfPlane::new([-1.0, 0.0], 0.0),
            HalfPlane::new([0.0, -1.0], 0.0),
            u[0],
            u[1],
            u[2],
            u[3],
            u[4],
        ]
    }

    /// `A·r` for the aggregate rows.
    pub fn agg_apply(&self, r: RatePair) -> [f64; 3] {
        AGG_MATRIX.map(|row| row[0] * r.r1 + row[1] * r.r2)
    }

    pub fn swapped(&self) -> Self {
        let [p31, p32, p33] = self.phi3_parts;
        Self {
            r_upper: self.r_upper.swapped(),
            agg_bounds: [self.agg_bounds[0], self.agg_bounds[2], self.agg_bounds[1]],
            phi3_parts: [p32, p31, p33],
        }
    }
}

/// Power split used by the coordination mechanism for each regime.
///
/// A zero cross gain makes `1/(gain·P)` infinite; the cap at 1 then applies.
pub fn select_power_split(params: &ChannelParams) -> PowerSplit {
    let alpha_weak = (1.0 / (params.b() * params.p1())).min(1.0);
    let beta_weak = (1.0 / (params.a() * params.p2())).min(1.0);
    let (alpha, beta) = match classify_regime(params) {
        Regime::Strong => (0.0, 0.0),
        Regime::MixedAWeak => (0.0, beta_weak),
        Regime::MixedBWeak => (alpha_weak, 0.0),
        Regime::Weak => (alpha_weak, beta_weak),
    };
    PowerSplit { alpha, beta }
}

/// H-K region of `HK(α, β)`, evaluated term by term.
pub fn build_hk_region(params: &ChannelParams, split: PowerSplit) -> RatePolytope {
    let (a, b, p1, p2) = (params.a(), params.b(), params.p1(), params.p2());
    let PowerSplit { alpha, beta } = split;

    // Interference-plus-noise seen by each receiver from the other user's
    // private message.
    let d1 = 1.0 + a * beta * p2;
    let d2 = 1.0 + b * alpha * p1;

    let phi1 = cap(p1 / d1);
    let phi2 = cap(p2 / d2);

    let phi31 = cap((p1 + a * (1.0 - beta) * p2) / d1) + cap((beta * p2) / d2);
    let phi32 = cap((alpha * p1) / d1) + cap((p2 + b * (1.0 - alpha) * p1) / d2);
    let phi33 = cap((alpha * p1 + a * (1.0 - beta) * p2) / d1)
        + cap((beta * p2 + b * (1.0 - alpha) * p1) / d2);
    let phi3 = phi31.min(phi32).min(phi33);

    let phi4 = cap((p1 + a * (1.0 - beta) * p2) / d1)
        + cap((alpha * p1) / d1)
        + cap((beta * p2 + b * (1.0 - alpha) * p1) / d2);
    let phi5 = cap((p2 + b * (1.0 - alpha) * p1) / d2)
        + cap((beta * p2) / d2)
        + cap((alpha * p1 + a * (1.0 - beta) * p2) / d1);

    RatePolytope {
        r_upper: RatePair { r1: phi1, r2: phi2 },
        agg_bounds: [phi3, phi4, phi5],
        phi3_parts: [phi31, phi32, phi33],
    }
}

/// Capacity pentagon of the two-user Gaussian MAC. The 2R₁+R₂ and R₁+2R₂
/// rows get a finite sentinel bound that can never bind.
pub fn build_mac_region(p1: f64, p2: f64) -> Result<RatePolytope> {
    if !(p1.is_finite() && p1 > 0.0 && p2.is_finite() && p2 > 0.0) {
        return Err(Error::Domain(format!(
            "MAC powers must be finite and positive, got ({p1}, {p2})"
        )));
    }
    let c1 = cap(p1);
    let c2 = cap(p2);
    let phi0 = cap(p1 + p2);
    let sentinel = 2.0 * c1.max(c2).max(phi0) + 1.0;
    Ok(RatePolytope {
        r_upper: RatePair { r1: c1, r2: c2 },
        agg_bounds: [phi0, sentinel, sentinel],
        phi3_parts: [phi0; 3],
    })
}

pub fn region_contains(poly: &RatePolytope, r: RatePair, tol: f64) -> bool {
    poly.half_planes()
        .iter()
        .all(|h| h.slack_violation(r.to_array()) <= tol)
}

const VERTEX_TOL: f64 = 1e-9;

/// Vertices of the polytope in counterclockwise order starting at the origin.
///
/// Computed by clipping the box `[0,φ₁]×[0,φ₂]` with each aggregate row.
pub fn region_vertices(poly: &RatePolytope) -> Vec<RatePair> {
    let (u1, u2) = (poly.r_upper.r1, poly.r_upper.r2);
    let mut ring: Vec<[f64; 2]> = vec![[0.0, 0.0], [u1, 0.0], [u1, u2], [0.0, u2]];
    for (row, &bound) in AGG_MATRIX.iter().zip(poly.agg_bounds.iter()) {
        ring = clip(&ring, &HalfPlane::new(*row, bound));
    }
    let verts = simplify_ring(ring);
    order_ccw_from_origin(verts)
        .into_iter()
        .map(RatePair::from_array)
        .collect()
}

/// One Sutherland-Hodgman pass against a single half-plane.
fn clip(ring: &[[f64; 2]], h: &HalfPlane) -> Vec<[f64; 2]> {
    let n = ring.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = ring[i];
        let next = ring[(i + 1) % n];
        let fc = h.slack_violation(cur);
        let fn_ = h.slack_violation(next);
        let cur_in = fc <= 0.0;
        let next_in = fn_ <= 0.0;
        if cur_in {
            out.push(cur);
        }
        if cur_in != next_in {
            let t = fc / (fc - fn_);
            out.push([
                cur[0] + t * (next[0] - cur[0]),
                cur[1] + t * (next[1] - cur[1]),
            ]);
        }
    }
    out
}

fn close(p: [f64; 2], q: [f64; 2]) -> bool {
    (p[0] - q[0]).hypot(p[1] - q[1]) <= VERTEX_TOL
}

/// Drops repeated points and points lying in the interior of an edge.
fn simplify_ring(ring: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(ring.len());
    for p in ring {
        if pts.iter().all(|q| !close(p, *q)) {
            pts.push(p);
        }
    }
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let idx = (0..n).find(|&i| {
            let prev = pts[(i + n - 1) % n];
            let cur = pts[i];
            let next = pts[(i + 1) % n];
            let ex = next[0] - prev[0];
            let ey = next[1] - prev[1];
            let len = ex.hypot(ey);
            // Distance from `cur` to the chord prev→next.
            let cross = ex * (cur[1] - prev[1]) - ey * (cur[0] - prev[0]);
            len > 0.0 && (cross / len).abs() <= VERTEX_TOL
        });
        match idx {
            Some(i) => {
                pts.remove(i);
            }
            None => return pts,
        }
    }
}

fn order_ccw_from_origin(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let origin = [0.0, 0.0];
    pts.retain(|p| !close(*p, origin));
    pts.sort_by(|p, q| {
        let ap = p[1].atan2(p[0]);
        let aq = q[1].atan2(q[0]);
        ap.total_cmp(&aq).then_with(|| {
            let dp = p[0].hypot(p[1]);
            let dq = q[0].hypot(q[1]);
            dp.total_cmp(&dq)
        })
    });
    let mut out = Vec::with_capacity(pts.len() + 1);
    out.push(origin);
    out.extend(pts);
    out
}

/// Largest R₁+R₂ over the polytope.
pub fn max_sum_rate(poly: &RatePolytope) -> f64 {
    region_vertices(poly)
        .into_iter()
        .map(RatePair::sum)
        .fold(0.0, f64::max)
}
