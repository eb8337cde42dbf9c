#![allow(dead_code)]

use icbargain::bargain::{disagreement_point, BargainingProblem};
use icbargain::region::{build_hk_region, RatePair, RatePolytope};
use icbargain::{run_mechanism, ChannelParams, Regime};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Random channel in the requested regime, SNRs in [0, 30] dB.
pub fn channel_in(rng: &mut ChaCha8Rng, regime: Regime) -> ChannelParams {
    let weak = |r: &mut ChaCha8Rng| log_uniform(r, 1e-3, 0.999);
    let strong = |r: &mut ChaCha8Rng| r.gen_range(1.0..10.0);
    let (a, b) = match regime {
        Regime::Strong => (strong(rng), strong(rng)),
        Regime::MixedAWeak => (weak(rng), strong(rng)),
        Regime::MixedBWeak => (strong(rng), weak(rng)),
        Regime::Weak => (weak(rng), weak(rng)),
    };
    let p1 = 10f64.powf(rng.gen_range(0.0..30.0) / 10.0);
    let p2 = 10f64.powf(rng.gen_range(0.0..30.0) / 10.0);
    ChannelParams::new(a, b, p1, p2).unwrap()
}

pub const REGIMES: [Regime; 4] = [Regime::Strong, Regime::MixedAWeak, Regime::MixedBWeak, Regime::Weak];

/// Essential H-K bargaining problems produced by the mechanism, cycling
/// through the four regimes.
pub fn essential_ic_problems(rng: &mut ChaCha8Rng, count: usize) -> Vec<(ChannelParams, BargainingProblem)> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100 * count, "could not generate enough essential instances");
        let regime = REGIMES[k % 4];
        let params = channel_in(rng, regime);
        let mech = run_mechanism(&params).unwrap();
        if mech.agreed {
            out.push((params, BargainingProblem::new(mech.hk_region, mech.disagreement)));
            k += 1;
        }
    }
    out
}

/// Random polytope with random aggregate bounds, some binding, some slack.
pub fn random_polytope(rng: &mut ChaCha8Rng) -> RatePolytope {
    let u1 = rng.gen_range(0.2..4.0);
    let u2 = rng.gen_range(0.2..4.0);
    let bound = |row: [f64; 2], r: &mut ChaCha8Rng| {
        let full = row[0] * u1 + row[1] * u2;
        // Anywhere from deep cut to slack.
        full * r.gen_range(0.3..1.3)
    };
    let b3 = bound([1.0, 1.0], rng);
    let b4 = bound([2.0, 1.0], rng);
    let b5 = bound([1.0, 2.0], rng);
    RatePolytope::from_bounds([u1, u2], [b3, b4, b5]).unwrap()
}

/// Random polytope with a disagreement point strictly inside it.
pub fn random_essential_problem(rng: &mut ChaCha8Rng) -> BargainingProblem {
    loop {
        let poly = random_polytope(rng);
        let scale = rng.gen_range(0.0..0.9);
        let r0 = RatePair::new(
            poly.r_upper.r1 * scale * rng.gen_range(0.0..1.0),
            poly.r_upper.r2 * scale * rng.gen_range(0.0..1.0),
        )
        .unwrap();
        let problem = BargainingProblem::new(poly, r0);
        if icbargain::is_essential(&problem) {
            return problem;
        }
    }
}

/// Mix of mechanism-generated and synthetic essential problems.
pub fn mixed_problems(rng: &mut ChaCha8Rng, count: usize) -> Vec<BargainingProblem> {
    let half = count / 2;
    let mut out: Vec<BargainingProblem> = essential_ic_problems(rng, half).into_iter().map(|(_, p)| p).collect();
    while out.len() < count {
        out.push(random_essential_problem(rng));
    }
    out
}

/// H-K region with an arbitrary power split.
pub fn random_split_problem(rng: &mut ChaCha8Rng) -> Option<BargainingProblem> {
    let regime = REGIMES[rng.gen_range(0..4)];
    let params = channel_in(rng, regime);
    let split = icbargain::PowerSplit::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)).unwrap();
    let problem = BargainingProblem::new(build_hk_region(&params, split), disagreement_point(&params));
    icbargain::is_essential(&problem).then_some(problem)
}

/// Every pairwise intersection of the seven supporting lines that satisfies
/// all constraints, deduplicated at 1e-9.
pub fn brute_force_vertices(poly: &RatePolytope) -> Vec<[f64; 2]> {
    let lines: Vec<([f64; 2], f64)> = poly.half_planes().iter().map(|h| (h.normal, h.bound)).collect();
    let feasible = |p: [f64; 2]| lines.iter().all(|(n, c)| n[0] * p[0] + n[1] * p[1] <= c + 1e-9);
    let mut out: Vec<[f64; 2]> = Vec::new();
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            let (n1, c1) = lines[i];
            let (n2, c2) = lines[j];
            let det = n1[0] * n2[1] - n1[1] * n2[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let p = [(c1 * n2[1] - c2 * n1[1]) / det, (n1[0] * c2 - n2[0] * c1) / det];
            if feasible(p) && out.iter().all(|q| (p[0] - q[0]).hypot(p[1] - q[1]) > 1e-9) {
                out.push(p);
            }
        }
    }
    out
}
