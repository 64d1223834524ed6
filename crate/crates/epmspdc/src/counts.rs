//! Gated singles, accidental, and pair-coincidence statistics.
//!
//! Detection is modelled as Poissonian arrivals inside a gate of width T_g
//! opened R_g times per second: the click probability per gate for a photon
//! flux φ on a detector with efficiency η and dark rate d is
//! 1 − exp(−(ηφ + d)·T_g). Accidental coincidences count two independent
//! clicks landing within the coincidence window τ_w of each other.

use crate::error::{Error, Result};

/// Detector and gating parameters for the two arms.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    /// Photon pairs generated per second at the source.
    pub pair_rate: f64,
    /// Source-to-detector transmission per arm (includes all optics).
    pub transmission: [f64; 2],
    /// Detector quantum efficiency per arm.
    pub efficiency: [f64; 2],
    /// Dark counts per second per arm.
    pub dark_rate: [f64; 2],
    /// Gate width T_g, seconds.
    pub gate_width: f64,
    /// Gate repetition rate R_g, 1/s.
    pub gate_rate: f64,
    /// Coincidence window τ_w, seconds.
    pub coincidence_window: f64,
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pair_rate >= 0.0) {
            return Err(Error::Config(format!(
                "pair rate must be non-negative, got {}",
                self.pair_rate
            )));
        }
        for (name, pair) in [
            ("transmission", &self.transmission),
            ("efficiency", &self.efficiency),
        ] {
            for v in pair.iter() {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::Config(format!("{name} {v} outside [0, 1]")));
                }
            }
        }
        for d in &self.dark_rate {
            if !(*d >= 0.0) {
                return Err(Error::Config(format!("dark rate {d} must be non-negative")));
            }
        }
        if !(self.gate_width > 0.0 && self.gate_rate > 0.0) {
            return Err(Error::Config("gate width and rate must be positive".into()));
        }
        if self.gate_width * self.gate_rate > 1.0 {
            return Err(Error::Config(format!(
                "duty cycle {} exceeds 1; gates overlap",
                self.gate_width * self.gate_rate
            )));
        }
        if !(self.coincidence_window > 0.0) || self.coincidence_window > self.gate_width {
            return Err(Error::Config(
                "coincidence window must be positive and no wider than the gate".into(),
            ));
        }
        Ok(())
    }
}

/// Click probability per gate for Poissonian arrivals of flux `flux` on a
/// detector with the given efficiency and dark rate.
pub fn singles_probability(flux: f64, efficiency: f64, dark_rate: f64, gate_width: f64) -> f64 {
    1.0 - (-(efficiency * flux + dark_rate) * gate_width).exp()
}

/// Accidental-coincidence probability per gate: two independent clicks with
/// per-gate probabilities p1, p2 landing within τ_w of each other.
pub fn accidental_probability(p1: f64, p2: f64, window: f64, gate_width: f64) -> Result<f64> {
    if !(gate_width > 0.0) || !(0.0..=gate_width).contains(&window) {
        return Err(Error::Config(
            "coincidence window must lie in (0, gate width]".into(),
        ));
    }
    for p in [p1, p2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("probability {p} outside [0, 1]")));
        }
    }
    Ok(p1 * p2 * window / gate_width)
}

/// Per-gate probabilities and per-second rates for one configuration.
#[derive(Debug, Clone)]
pub struct RatesReport {
    /// Photon flux reaching each detector, 1/s.
    pub flux: [f64; 2],
    /// Click probability per gate, per arm.
    pub p_singles: [f64; 2],
    /// Dark-only click probability per gate, per arm.
    pub p_dark: [f64; 2],
    /// Dark-only probability normalized by the duty cycle.
    pub p_dark_per_duty: [f64; 2],
    /// True-pair coincidence probability per gate.
    pub p_true_pair: f64,
    /// Accidental coincidence probability per gate.
    pub p_accidental: f64,
    /// Singles rates, 1/s.
    pub rate_singles: [f64; 2],
    /// True-pair coincidence rate, 1/s.
    pub rate_true_pairs: f64,
    /// Accidental rate, 1/s.
    pub rate_accidentals: f64,
    /// Fraction of time the gates are open.
    pub duty_cycle: f64,
}

/// Fraction of pairs surviving both arms that are recorded as a gated
/// coincidence: both photons transmitted and detected during a gate; the
/// trailing 1/2 accounts for pairs straddling the gate edges.
fn pair_capture(cfg: &DetectionConfig) -> f64 {
    cfg.transmission[0]
        * cfg.transmission[1]
        * cfg.efficiency[0]
        * cfg.efficiency[1]
        * cfg.gate_width
        * 0.5
}

/// Full rate budget for a configuration.
pub fn coincidence_rates(cfg: &DetectionConfig) -> Result<RatesReport> {
    cfg.validate()?;
    let flux = [
        cfg.pair_rate * cfg.transmission[0],
        cfg.pair_rate * cfg.transmission[1],
    ];
    let p_singles = [
        singles_probability(flux[0], cfg.efficiency[0], cfg.dark_rate[0], cfg.gate_width),
        singles_probability(flux[1], cfg.efficiency[1], cfg.dark_rate[1], cfg.gate_width),
    ];
    let p_dark = [
        singles_probability(0.0, 0.0, cfg.dark_rate[0], cfg.gate_width),
        singles_probability(0.0, 0.0, cfg.dark_rate[1], cfg.gate_width),
    ];
    let duty = cfg.gate_width * cfg.gate_rate;
    let p_true_pair = cfg.pair_rate * pair_capture(cfg);
    let p_accidental = accidental_probability(
        p_singles[0],
        p_singles[1],
        cfg.coincidence_window,
        cfg.gate_width,
    )?;
    Ok(RatesReport {
        flux,
        p_singles,
        p_dark,
        p_dark_per_duty: [p_dark[0] / duty, p_dark[1] / duty],
        p_true_pair,
        p_accidental,
        rate_singles: [p_singles[0] * cfg.gate_rate, p_singles[1] * cfg.gate_rate],
        rate_true_pairs: p_true_pair * cfg.gate_rate,
        rate_accidentals: p_accidental * cfg.gate_rate,
        duty_cycle: duty,
    })
}

/// Invert the coincidence budget: the source pair rate implied by a measured
/// true-coincidence rate under this configuration.
pub fn infer_pair_rate(coincidence_rate: f64, cfg: &DetectionConfig) -> Result<f64> {
    cfg.validate()?;
    if !(coincidence_rate >= 0.0) {
        return Err(Error::Config(format!(
            "coincidence rate must be non-negative, got {coincidence_rate}"
        )));
    }
    let capture = pair_capture(cfg) * cfg.gate_rate;
    if capture == 0.0 {
        return Err(Error::Physics(
            "configuration detects no pairs; cannot infer a source rate".into(),
        ));
    }
    Ok(coincidence_rate / capture)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn reference_config() -> DetectionConfig {
        DetectionConfig {
            pair_rate: 4.0e6,
            transmission: [0.17983, 0.13035],
            efficiency: [0.16, 0.24],
            dark_rate: [40.0, 20.0],
            gate_width: 20e-9,
            gate_rate: 50e3,
            coincidence_window: 1.8e-9,
        }
    }

    #[test]
    fn reference_rate_budget() {
        let cfg = reference_config();
        let report = coincidence_rates(&cfg).unwrap();
        assert_relative_eq!(report.p_singles[0], 2.29997e-3, max_relative = 1e-5);
        assert_relative_eq!(report.p_singles[1], 2.49999e-3, max_relative = 1e-5);
        assert!((report.rate_singles[0] - 115.0).abs() < 0.01);
        assert!((report.rate_singles[1] - 125.0).abs() < 0.01);
        assert_relative_eq!(report.p_accidental, 5.17492e-7, max_relative = 1e-5);
        assert!((report.p_accidental / 5e-7 - 1.0).abs() < 0.10);
        assert_relative_eq!(report.p_true_pair, 3.6005e-5, max_relative = 1e-3);
        assert_relative_eq!(report.rate_true_pairs, 1.80, max_relative = 1e-3);
        assert_relative_eq!(report.duty_cycle, 1e-3, max_relative = 1e-12);
        assert_relative_eq!(report.p_dark[0], 8e-7, max_relative = 1e-5);
        assert_relative_eq!(report.p_dark_per_duty[0], 8e-4, max_relative = 1e-5);
    }

    #[test]
    fn inference_round_trips_and_matches_nominal_example() {
        let cfg = reference_config();
        let report = coincidence_rates(&cfg).unwrap();
        let inferred = infer_pair_rate(report.rate_true_pairs, &cfg).unwrap();
        assert_relative_eq!(inferred, cfg.pair_rate, max_relative = 1e-12);

        // With nominal identical arm transmissions, a 1/s coincidence rate
        // implies ~1.37e6 generated pairs per second.
        let nominal = DetectionConfig {
            transmission: [0.195, 0.195],
            ..reference_config()
        };
        let inferred = infer_pair_rate(1.0, &nominal).unwrap();
        assert_relative_eq!(inferred, 1.3697e6, max_relative = 1e-4);
        assert!(inferred / 4.0e6 > 0.25 && inferred / 4.0e6 < 4.0);
    }

    #[test]
    fn coincidence_probability_to_rate() {
        let cfg = reference_config();
        // A 2e-5 per-gate coincidence probability at 50 kHz gating is 1/s.
        assert_relative_eq!(2e-5 * cfg.gate_rate, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn singles_probability_limits() {
        // Zero flux and zero dark rate never click.
        assert_eq!(singles_probability(0.0, 0.0, 0.0, 20e-9), 0.0);
        // Saturation at large flux.
        assert!((singles_probability(1e18, 1.0, 0.0, 20e-9) - 1.0).abs() < 1e-12);
        // Small-signal linearity.
        let p = singles_probability(1e5, 0.2, 0.0, 20e-9);
        assert_relative_eq!(p, 0.2 * 1e5 * 20e-9, max_relative = 1e-3);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = reference_config();
        cfg.transmission = [1.2, 0.1];
        assert!(cfg.validate().is_err());
        let mut cfg = reference_config();
        cfg.coincidence_window = 30e-9;
        assert!(cfg.validate().is_err());
        let mut cfg = reference_config();
        cfg.gate_rate = 1e9;
        assert!(cfg.validate().is_err());
        let mut cfg = reference_config();
        cfg.dark_rate = [-1.0, 0.0];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn accidental_probability_preconditions() {
        assert!(accidental_probability(0.5, 0.5, 2.0, 1.0).is_err());
        assert!(accidental_probability(1.5, 0.5, 0.5, 1.0).is_err());
        assert_relative_eq!(
            accidental_probability(0.1, 0.2, 0.5, 1.0).unwrap(),
            0.01,
            max_relative = 1e-12
        );
    }
}
