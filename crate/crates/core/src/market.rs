//! Risk-inclination oscillator of a quantum market player.
//!
//! A player's price/position pair is modelled as a harmonic oscillator with
//! frequency `2 pi / theta`, where `theta` is the characteristic time of a
//! transaction. The risk quantum `hbar_e` plays the role of Planck's
//! constant; noncommuting prices and positions replace it by
//! `sqrt(hbar_e^2 + big_theta^2)`.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiskOscillator {
    /// Risk asymmetry (the oscillator mass).
    pub m: f64,
    /// Characteristic transaction time.
    pub theta: f64,
    pub hbar_e: f64,
    /// Noncommutativity of prices and positions.
    pub big_theta: f64,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and positive, got {x}"
        )))
    }
}

impl RiskOscillator {
    pub fn new(m: f64, theta: f64, hbar_e: f64, big_theta: f64) -> Result<Self> {
        positive("m", m)?;
        positive("theta", theta)?;
        positive("hbar_e", hbar_e)?;
        if !(big_theta.is_finite() && big_theta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "big_theta must be finite and nonnegative, got {big_theta}"
            )));
        }
        Ok(Self {
            m,
            theta,
            hbar_e,
            big_theta,
        })
    }

    pub fn omega(&self) -> f64 {
        TAU / self.theta
    }

    pub fn hbar_eff(&self) -> f64 {
        self.hbar_e.hypot(self.big_theta)
    }
}

/// Characteristic frequency `2 pi / theta`.
pub fn omega(theta: f64) -> Result<f64> {
    positive("theta", theta)?;
    Ok(TAU / theta)
}

/// `sqrt(hbar_e^2 + big_theta^2)`, computed without intermediate overflow.
pub fn hbar_eff(hbar_e: f64, big_theta: f64) -> Result<f64> {
    positive("hbar_e", hbar_e)?;
    if !(big_theta.is_finite() && big_theta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "big_theta must be finite and nonnegative, got {big_theta}"
        )));
    }
    Ok(hbar_e.hypot(big_theta))
}

/// Level `n` of the ladder: `hbar_eff * omega * (n + 1/2)`.
pub fn risk_spectrum(o: &RiskOscillator, n: u32) -> f64 {
    o.hbar_eff() * o.omega() * (f64::from(n) + 0.5)
}

/// Same as [`risk_spectrum`] for a signed level index.
pub fn risk_level(o: &RiskOscillator, n: i64) -> Result<f64> {
    let n = u32::try_from(n)
        .map_err(|_| Error::InvalidParameter(format!("level index {n} must be in 0..=u32::MAX")))?;
    Ok(risk_spectrum(o, n))
}

/// Minimal risk inclination: twice the transaction time times the ground
/// level. Algebraically `2 pi hbar_eff`, which is how it is evaluated so
/// that it does not pick up rounding from `theta`.
pub fn min_risk_inclination(o: &RiskOscillator) -> f64 {
    TAU * o.hbar_eff()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_examples() {
        assert_eq!(omega(TAU).unwrap(), 1.0);
        assert_eq!(omega(1.0).unwrap(), TAU);
        assert_eq!(omega(4.0).unwrap(), omega(2.0).unwrap() / 2.0);
        assert!(omega(0.0).is_err());
        assert!(omega(-1.0).is_err());
    }

    #[test]
    fn hbar_eff_examples() {
        assert_eq!(hbar_eff(3.0, 4.0).unwrap(), 5.0);
        assert_eq!(hbar_eff(0.7, 0.0).unwrap(), 0.7);
        assert!(hbar_eff(1.0, -1.0).is_err());
        assert!(hbar_eff(0.0, 1.0).is_err());
    }

    #[test]
    fn ground_level_identity() {
        let o = RiskOscillator::new(2.0, 3.0, 1.5, 0.0).unwrap();
        let e0 = risk_spectrum(&o, 0);
        assert!((e0 - 1.5 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        assert!((e0 * 2.0 * o.theta - min_risk_inclination(&o)).abs() < 1e-12);
        assert_eq!(min_risk_inclination(&o), TAU * 1.5);
    }

    #[test]
    fn negative_level_rejected() {
        let o = RiskOscillator::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(risk_level(&o, -1).is_err());
        assert_eq!(risk_level(&o, 2).unwrap(), risk_spectrum(&o, 2));
    }
}
