//! Distance-based wireless channel model.
//!
//! The nominal normalized rate between two agents a distance `d` apart is
//!
//! ```text
//! R̄(d) = erf( sqrt( P_T · K · d^(-n) / P_N0 ) )
//! ```
//!
//! with powers in mW. `R̄` never reaches zero, so [`ChannelCurve`] replaces its
//! tail beyond the transition distance `d_t` (where `R̄(d_t)` equals the cutoff
//! rate) by the tangent line at `d_t`, and truncates to zero past the tangent's
//! zero crossing `d_c`. The resulting curve is C¹ at `d_t` and continuous at
//! `d_c`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::Point;

/// Distances below this are treated as coincident agents.
pub const MIN_DISTANCE_M: f64 = 1e-6;

const ROOT_BRACKET_M: (f64, f64) = (1e-3, 1e4);
const ROOT_TOLERANCE_M: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel parameter: {0}")]
    InvalidParameter(String),
    #[error("transition distance not bracketed by [{lo}, {hi}] m")]
    NoTransition { lo: f64, hi: f64 },
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Radio parameters of the channel model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    /// Transmit power `P_T` in dBm.
    pub transmit_power_dbm: f64,
    /// Receiver noise floor `P_N0` in dBm.
    pub noise_floor_dbm: f64,
    /// Hardware gain constant `K` (unitless).
    pub gain_constant: f64,
    /// Path loss exponent `n`.
    pub path_loss_exponent: f64,
    /// Nominal rate at which the linear tail takes over.
    pub rate_cutoff: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            transmit_power_dbm: 0.0,
            noise_floor_dbm: -70.0,
            gain_constant: 5.01e-6,
            path_loss_exponent: 2.52,
            rate_cutoff: 0.25,
        }
    }
}

impl ChannelParams {
    pub fn with_transmit_power(self, dbm: f64) -> Self {
        ChannelParams {
            transmit_power_dbm: dbm,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |what: &str| Err(ChannelError::InvalidParameter(what.to_string()));
        if !(self.gain_constant > 0.0 && self.gain_constant.is_finite()) {
            return bad("gain_constant must be positive");
        }
        if !(self.path_loss_exponent > 0.0 && self.path_loss_exponent.is_finite()) {
            return bad("path_loss_exponent must be positive");
        }
        if !(self.rate_cutoff > 0.0 && self.rate_cutoff < 1.0) {
            return bad("rate_cutoff must lie in (0, 1)");
        }
        if !self.transmit_power_dbm.is_finite() || !self.noise_floor_dbm.is_finite() {
            return bad("powers must be finite");
        }
        Ok(())
    }

    pub fn transmit_power_mw(&self) -> f64 {
        dbm_to_mw(self.transmit_power_dbm)
    }

    pub fn noise_floor_mw(&self) -> f64 {
        dbm_to_mw(self.noise_floor_dbm)
    }

    /// `P_T · K / P_N0`: the SNR at one meter.
    fn snr_at_unit_distance(&self) -> f64 {
        self.transmit_power_mw() * self.gain_constant / self.noise_floor_mw()
    }

    /// Distance at which the SNR inside the erf equals one.
    pub fn unit_snr_distance(&self) -> f64 {
        self.snr_at_unit_distance().powf(1.0 / self.path_loss_exponent)
    }
}

/// Nominal (untruncated) normalized rate at distance `d`.
pub fn nominal_rate(d: f64, params: &ChannelParams) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    let snr = params.snr_at_unit_distance() * d.powf(-params.path_loss_exponent);
    libm::erf(snr.sqrt())
}

/// Analytic derivative of [`nominal_rate`] with respect to distance.
pub fn nominal_rate_derivative(d: f64, params: &ChannelParams) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    let n = params.path_loss_exponent;
    let snr = params.snr_at_unit_distance() * d.powf(-n);
    if !snr.is_finite() {
        return 0.0;
    }
    let u = snr.sqrt();
    // d/dd erf(u) with u = sqrt(c d^-n): erf'(u) · (-n/2) · u / d
    2.0 / PI.sqrt() * (-snr).exp() * (-0.5 * n) * u / d
}

/// The truncated, piecewise rate curve derived from a set of [`ChannelParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelCurve {
    pub params: ChannelParams,
    pub transition_distance_m: f64,
    pub cutoff_distance_m: f64,
    pub slope_at_transition: f64,
}

impl ChannelCurve {
    /// Locates the transition distance by bisection and extends the tangent
    /// there down to its zero crossing.
    pub fn new(params: ChannelParams) -> Result<Self, ChannelError> {
        params.validate()?;
        let target = params.rate_cutoff;
        let (mut lo, mut hi) = ROOT_BRACKET_M;
        if !(nominal_rate(lo, &params) > target && nominal_rate(hi, &params) < target) {
            return Err(ChannelError::NoTransition { lo, hi });
        }
        while hi - lo > ROOT_TOLERANCE_M {
            let mid = 0.5 * (lo + hi);
            if nominal_rate(mid, &params) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let transition = 0.5 * (lo + hi);
        let slope = nominal_rate_derivative(transition, &params);
        if !(slope < 0.0) {
            return Err(ChannelError::InvalidParameter(
                "rate curve is flat at the transition distance".into(),
            ));
        }
        Ok(ChannelCurve {
            params,
            transition_distance_m: transition,
            cutoff_distance_m: transition - target / slope,
            slope_at_transition: slope,
        })
    }

    /// Curve for the same radio with a different transmit power.
    pub fn at_power(&self, dbm: f64) -> Result<Self, ChannelError> {
        ChannelCurve::new(self.params.with_transmit_power(dbm))
    }

    pub fn rate(&self, d: f64) -> f64 {
        if d < self.transition_distance_m {
            nominal_rate(d, &self.params)
        } else if d <= self.cutoff_distance_m {
            (self.params.rate_cutoff + self.slope_at_transition * (d - self.transition_distance_m))
                .max(0.0)
        } else {
            0.0
        }
    }

    pub fn rate_derivative(&self, d: f64) -> f64 {
        if d < self.transition_distance_m {
            nominal_rate_derivative(d, &self.params)
        } else if d <= self.cutoff_distance_m {
            self.slope_at_transition
        } else {
            0.0
        }
    }

    pub fn rate_between(&self, a: Point, b: Point) -> f64 {
        self.rate(a.distance(b))
    }

    /// Gradient of `rate(|x_i - x_j|)` with respect to `x_i`.
    pub fn rate_gradient(&self, x_i: Point, x_j: Point) -> Point {
        let delta = x_i - x_j;
        let d = delta.norm();
        if d < MIN_DISTANCE_M || d > self.cutoff_distance_m {
            return Point::ORIGIN;
        }
        delta * (self.rate_derivative(d) / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> ChannelCurve {
        ChannelCurve::new(ChannelParams::default()).unwrap()
    }

    #[test]
    fn rate_is_one_at_zero_distance() {
        assert_eq!(nominal_rate(0.0, &ChannelParams::default()), 1.0);
        assert_eq!(curve().rate(0.0), 1.0);
    }

    #[test]
    fn unit_snr_point_gives_erf_one() {
        let p = ChannelParams::default();
        let d = p.unit_snr_distance();
        assert!((d - 4.7265).abs() < 1e-3, "{d}");
        assert!((nominal_rate(d, &p) - 0.842_700_792_949_714_9).abs() < 1e-12);
    }

    #[test]
    fn knots_match_expected_defaults() {
        let c = curve();
        assert!((c.transition_distance_m - 15.4242).abs() < 1e-3);
        assert!((c.cutoff_distance_m - 28.0884).abs() < 1e-3);
        assert!((nominal_rate(c.transition_distance_m, &c.params) - 0.25).abs() < 1e-9);
    }

    #[test]
    fn piecewise_branches() {
        let c = curve();
        assert_eq!(c.rate(c.transition_distance_m), 0.25);
        let mid = 0.5 * (c.transition_distance_m + c.cutoff_distance_m);
        assert!((c.rate(mid) - 0.125).abs() < 1e-12);
        assert_eq!(c.rate(c.cutoff_distance_m + 1.0), 0.0);
        assert!(nominal_rate(10.0, &c.params) > nominal_rate(20.0, &c.params));
    }

    #[test]
    fn rejects_out_of_range_cutoff() {
        let p = ChannelParams {
            rate_cutoff: 1.5,
            ..Default::default()
        };
        assert!(matches!(ChannelCurve::new(p), Err(ChannelError::InvalidParameter(_))));
    }

    #[test]
    fn gradient_direction_and_support() {
        let c = curve();
        let g = c.rate_gradient(Point::new(10.0, 0.0), Point::ORIGIN);
        assert!(g.x < 0.0 && g.y == 0.0);
        assert!((g.x - nominal_rate_derivative(10.0, &c.params)).abs() < 1e-15);
        let far = c.rate_gradient(Point::new(c.cutoff_distance_m + 0.5, 0.0), Point::ORIGIN);
        assert_eq!(far, Point::ORIGIN);
        assert_eq!(c.rate_gradient(Point::ORIGIN, Point::ORIGIN), Point::ORIGIN);
    }
}
