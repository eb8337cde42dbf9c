//! Channel parameters, the Gaussian capacity function and interference
//! regime classification.
//!
//! Noise is normalized to unit variance, so a user's SNR equals its power
//! constraint. All rates are in bits per channel use.

use serde::Serialize;

use crate::error::{Error, Result};

/// Two-user Gaussian interference channel instance.
///
/// `a` is the power gain of the cross link from transmitter 2 to receiver 1,
/// `b` the gain from transmitter 1 to receiver 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    a: f64,
    b: f64,
    p1: f64,
    p2: f64,
}

impl ChannelParams {
    pub fn new(a: f64, b: f64, p1: f64, p2: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) || !(b.is_finite() && b >= 0.0) {
            return Err(Error::Domain(format!(
                "cross gains must be finite and nonnegative (a={a}, b={b})"
            )));
        }
        if !(p1.is_finite() && p1 > 0.0) || !(p2.is_finite() && p2 > 0.0) {
            return Err(Error::Domain(format!(
                "powers must be finite and positive (p1={p1}, p2={p2})"
            )));
        }
        Ok(Self { a, b, p1, p2 })
    }

    /// Builds parameters from per-user SNRs in dB.
    pub fn from_db(a: f64, b: f64, snr1_db: f64, snr2_db: f64) -> Result<Self> {
        Self::new(a, b, db_to_linear(snr1_db)?, db_to_linear(snr2_db)?)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// Same channel with the user indices exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            p1: self.p2,
            p2: self.p1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// a ≥ 1 and b ≥ 1.
    Strong,
    /// a < 1, b ≥ 1.
    MixedAWeak,
    /// a ≥ 1, b < 1.
    MixedBWeak,
    /// a < 1 and b < 1.
    Weak,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::Strong => "strong",
            Regime::MixedAWeak => "mixed_a_weak",
            Regime::MixedBWeak => "mixed_b_weak",
            Regime::Weak => "weak",
        }
    }
}

/// `C(x) = ½·log₂(1 + x)`.
pub fn capacity_c(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("C(x) requires finite x >= 0, got {x}")));
    }
    Ok(cap(x))
}

// Unchecked variant for arguments that are nonnegative by construction.
#[inline]
pub(crate) fn cap(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

pub fn db_to_linear(snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::Domain(format!("SNR must be finite, got {snr_db} dB")));
    }
    Ok(10f64.powf(snr_db / 10.0))
}

/// Boundary values a = 1 or b = 1 count as strong for that link.
pub fn classify_regime(params: &ChannelParams) -> Regime {
    match (params.a >= 1.0, params.b >= 1.0) {
        (true, true) => Regime::Strong,
        (false, true) => Regime::MixedAWeak,
        (true, false) => Regime::MixedBWeak,
        (false, false) => Regime::Weak,
    }
}
