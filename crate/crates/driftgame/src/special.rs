//! Gaussian tail integral and the heat-kernel potentials built from it.
//!
//! Everything here is driven by two functions of a space coordinate s and a
//! strictly negative time t:
//!
//! ```text
//! g(s,t)  = (1/sqrt(pi)) * integral of exp(-x^2) over [s/sqrt(-2t), inf)
//! g~(s,t) = 1            for s <= 0
//!         = 2 g(s,t)     for s >  0
//! ```
//!
//! `g` solves the backward heat equation d/dt g + (1/2) d2/ds2 g = 0 and
//! `g~` solves the one-sided variant on s > 0 with a kink at s = 0. Shifted
//! copies of these, described by [`PotentialSpec`], are the upper and lower
//! game potentials used by the strategies and the bound calculators.

// The erfc coefficients below are quoted at their published precision; the
// compiler rounds each literal to the nearest f64 either way.
#![allow(clippy::excessive_precision)]

use std::fmt;

// The erfc implementation below follows FreeBSD's msun s_erf.c via Go's
// erf.go, as does the original notice:
//
// ====================================================
// Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//
// Developed at SunPro, a Sun Microsystems, Inc. business.
// Permission to use, copy, modify, and distribute this
// software is freely granted, provided that this notice
// is preserved.
// ====================================================

const ERX: f64 = 8.45062911510467529297e-01;

// coefficients for approximation to erf in [0, 0.84375]
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

// coefficients for approximation to erf in [0.84375, 1.25]
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

// coefficients for approximation to erfc in [1.25, 1/0.35]
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

// coefficients for approximation to erfc in [1/0.35, 28]
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

const TINY: f64 = 1.3877787807814457e-17; // 2^-56

/// Complementary error function, double precision.
///
/// Special cases: `erfc(+inf) = 0`, `erfc(-inf) = 2`, `erfc(NaN) = NaN`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp: f64;
        if x < TINY {
            temp = x;
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if x < 0.25 {
                temp = x + x * y;
            } else {
                temp = 0.5 + (x * y + (x - 0.5));
            }
        }
        return if sign { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign { 1.0 + ERX + p / q } else { 1.0 - ERX - p / q };
    }
    if x < 28.0 {
        let s = 1.0 / (x * x);
        let r: f64;
        let q: f64;
        if x < 1.0 / 0.35 {
            r = RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
            q = 1.0
                + s * (SA1
                    + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        } else {
            if sign && x > 6.0 {
                return 2.0;
            }
            r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
            q = 1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        }
        // pseudo-single precision split keeps -z*z exact below
        let z = f64::from_bits(f64::to_bits(x) & 0xffff_ffff_0000_0000);
        let v = (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / q).exp();
        return if sign { 2.0 - v / x } else { v / x };
    }
    if sign {
        2.0
    } else {
        0.0
    }
}

/// Normalized Gaussian tail mass: `(1/sqrt(pi)) * integral of exp(-x^2)`
/// over `[a, inf)`, i.e. `erfc(a) / 2`.
///
/// Total on the extended reals except NaN, which panics. The value lies in
/// `[0, 1]`, decreasing from 1 at `-inf` to 0 at `+inf`.
pub fn tail_integral(a: f64) -> f64 {
    assert!(!a.is_nan(), "tail_integral: NaN argument");
    0.5 * erfc(a)
}

/// Domain errors for the potential family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecialError {
    /// Time coordinate was not strictly negative (or not finite).
    TimeNotNegative(f64),
    /// Spatial coordinate was not finite.
    SpaceNotFinite(f64),
    /// Derivative of the truncated potential requested at its kink, s = 0.
    KinkDerivative,
    /// Potential time shift was not strictly positive and finite.
    TimeShiftNotPositive(f64),
}

impl fmt::Display for SpecialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecialError::TimeNotNegative(t) => write!(f, "time coordinate {t} is not < 0"),
            SpecialError::SpaceNotFinite(s) => write!(f, "spatial coordinate {s} is not finite"),
            SpecialError::KinkDerivative => {
                write!(f, "truncated potential has no derivative at its kink (s = 0)")
            }
            SpecialError::TimeShiftNotPositive(tau) => {
                write!(f, "potential time shift {tau} is not > 0")
            }
        }
    }
}

impl std::error::Error for SpecialError {}

/// A point (s, t) with finite s and strictly negative t, the domain of the
/// potential building blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    s: f64,
    t: f64,
}

impl SpaceTimePoint {
    pub fn new(s: f64, t: f64) -> Result<Self, SpecialError> {
        if !s.is_finite() {
            return Err(SpecialError::SpaceNotFinite(s));
        }
        if !t.is_finite() || t >= 0.0 {
            return Err(SpecialError::TimeNotNegative(t));
        }
        Ok(SpaceTimePoint { s, t })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// Spatial derivatives up to third order and time derivatives up to second
/// order of `g` (or `g~`) at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    /// d/ds
    pub d1: f64,
    /// d2/ds2
    pub d2: f64,
    /// d3/ds3
    pub d3: f64,
    /// d/dt
    pub dt: f64,
    /// d2/dt2
    pub dtt: f64,
}

/// `g(s,t)`: the Gaussian tail integral in similarity coordinates,
/// `tail_integral(s / sqrt(-2t))`.
pub fn g_eval(p: SpaceTimePoint) -> f64 {
    tail_integral(p.s / (-2.0 * p.t).sqrt())
}

/// Closed-form derivatives of `g`. With u = exp(s^2/(2t)) and
/// w = sqrt(-2 pi t):
///
/// ```text
/// g'   = -u/w
/// g''  = -(s/t) u/w
/// g''' = -(1/t + s^2/t^2) u/w
/// dg/dt   = -(1/2) g''
/// d2g/dt2 = -(s/(2 t^2)) (3/2 + s^2/(2t)) u/w
/// ```
///
/// The pair (dt, d2) satisfies the backward heat equation identically.
pub fn g_derivatives(p: SpaceTimePoint) -> Derivatives {
    let (s, t) = (p.s, p.t);
    let u = (s * s / (2.0 * t)).exp();
    let w = (-2.0 * std::f64::consts::PI * t).sqrt();
    let d1 = -u / w;
    let d2 = (s / t) * d1;
    let d3 = (1.0 / t + (s * s) / (t * t)) * d1;
    let dt = -0.5 * d2;
    let dtt = (s / (2.0 * t * t)) * (1.5 + s * s / (2.0 * t)) * d1;
    Derivatives { d1, d2, d3, dt, dtt }
}

/// `g~(s,t)`: 1 on s <= 0, `2 g(s,t)` on s > 0. Continuous, with a kink in
/// slope at s = 0.
pub fn g_tilde_eval(p: SpaceTimePoint) -> f64 {
    if p.s <= 0.0 {
        1.0
    } else {
        2.0 * g_eval(p)
    }
}

/// Derivatives of `g~`: zero on the constant branch s < 0, twice the `g`
/// derivatives on s > 0, undefined at the kink s = 0.
pub fn g_tilde_derivatives(p: SpaceTimePoint) -> Result<Derivatives, SpecialError> {
    if p.s == 0.0 {
        return Err(SpecialError::KinkDerivative);
    }
    if p.s < 0.0 {
        return Ok(Derivatives { d1: 0.0, d2: 0.0, d3: 0.0, dt: 0.0, dtt: 0.0 });
    }
    let d = g_derivatives(p);
    Ok(Derivatives {
        d1: 2.0 * d.d1,
        d2: 2.0 * d.d2,
        d3: 2.0 * d.d3,
        dt: 2.0 * d.dt,
        dtt: 2.0 * d.dtt,
    })
}

/// Which building block a shifted potential uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// The smooth tail integral `g`.
    HeatTail,
    /// The truncated variant `g~` with its kink.
    TruncatedTail,
}

/// A fully determined game potential: `base(s + spatial_shift,
/// t - time_shift) + vertical_offset`, evaluated per chip and averaged by
/// the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    kind: PotentialKind,
    spatial_shift: f64,
    time_shift: f64,
    vertical_offset: f64,
}

impl PotentialSpec {
    pub fn new(
        kind: PotentialKind,
        spatial_shift: f64,
        time_shift: f64,
        vertical_offset: f64,
    ) -> Result<Self, SpecialError> {
        if !spatial_shift.is_finite() {
            return Err(SpecialError::SpaceNotFinite(spatial_shift));
        }
        if !time_shift.is_finite() || time_shift <= 0.0 {
            return Err(SpecialError::TimeShiftNotPositive(time_shift));
        }
        if !vertical_offset.is_finite() {
            return Err(SpecialError::SpaceNotFinite(vertical_offset));
        }
        Ok(PotentialSpec { kind, spatial_shift, time_shift, vertical_offset })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn spatial_shift(&self) -> f64 {
        self.spatial_shift
    }

    pub fn time_shift(&self) -> f64 {
        self.time_shift
    }

    pub fn vertical_offset(&self) -> f64 {
        self.vertical_offset
    }

    /// Potential value at chip position s and game time t (t <= 0 is fine;
    /// the time shift moves the evaluation strictly before the singularity).
    pub fn eval(&self, s: f64, t: f64) -> Result<f64, SpecialError> {
        let p = SpaceTimePoint::new(s + self.spatial_shift, t - self.time_shift)?;
        let base = match self.kind {
            PotentialKind::HeatTail => g_eval(p),
            PotentialKind::TruncatedTail => g_tilde_eval(p),
        };
        Ok(base + self.vertical_offset)
    }

    /// Spatial gradient of the potential at (s, t). Zero on the truncated
    /// kind's constant branch; the kink itself is rejected.
    pub fn grad(&self, s: f64, t: f64) -> Result<f64, SpecialError> {
        let p = SpaceTimePoint::new(s + self.spatial_shift, t - self.time_shift)?;
        match self.kind {
            PotentialKind::HeatTail => Ok(g_derivatives(p).d1),
            PotentialKind::TruncatedTail => Ok(g_tilde_derivatives(p)?.d1),
        }
    }
}
