//! Quasi-phase-matching and the extended-phase-matching operating point.
//!
//! A collinear type-II process p → s + i with a first-order (or odd-order)
//! grating has effective mismatch
//!
//! ```text
//! Δk_Q(ω_p, ω_s) = k_p(ω_p) − k_s(ω_s) − k_i(ω_p − ω_s) − s·2πm/Λ
//! ```
//!
//! where s=±1 is chosen so the grating opposes the bulk mismatch. The
//! extended-phase-matching (EPM) point is the pump frequency where the pump
//! group slowness equals the mean of the degenerate signal and idler group
//! slownesses, which makes the phase-matching function symmetric along the
//! ω_s+ω_i direction and lets a broad pump produce frequency-correlated
//! (rather than anti-correlated) photon pairs.

use crate::dispersion::{lambda_from_omega, omega_from_lambda, SellmeierSet};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Positive root of sinc²(x) = 1/2; sets every sinc-shaped FWHM used here.
pub const SINC_SQ_HALF_MAX_X: f64 = 1.39155737825151;

/// Periodic poling of the crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poling {
    /// Grating period Λ in metres.
    pub period: f64,
    /// Sign of the bulk mismatch the grating compensates (±1).
    pub sign: f64,
}

/// Crystal geometry and the dispersion of the three interacting waves.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    /// Propagation length in metres.
    pub length: f64,
    /// Poling, if the crystal already carries a grating.
    pub poling: Option<Poling>,
    /// QPM order m (odd).
    pub qpm_order: u32,
    pub pump: SellmeierSet,
    pub signal: SellmeierSet,
    pub idler: SellmeierSet,
}

impl CrystalSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::Config(format!(
                "crystal length must be positive, got {} m",
                self.length
            )));
        }
        if self.qpm_order == 0 || self.qpm_order.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "QPM order must be odd and >= 1, got {}",
                self.qpm_order
            )));
        }
        if self.signal.name == self.idler.name {
            return Err(Error::Config(
                "type-II process requires signal and idler on different axes".into(),
            ));
        }
        if let Some(p) = &self.poling {
            if !(p.period > 0.0) {
                return Err(Error::Config(format!(
                    "grating period must be positive, got {} m",
                    p.period
                )));
            }
            if p.sign != 1.0 && p.sign != -1.0 {
                return Err(Error::Config(format!(
                    "grating sign must be +1 or -1, got {}",
                    p.sign
                )));
            }
        }
        Ok(())
    }

    /// Bulk (grating-free) mismatch k_p(ω_p) − k_s(ω_s) − k_i(ω_p−ω_s), rad/m.
    pub fn bulk_mismatch(&self, omega_p: f64, omega_s: f64) -> Result<f64> {
        let omega_i = omega_p - omega_s;
        if !(omega_s > 0.0 && omega_i > 0.0) {
            return Err(Error::Physics(format!(
                "signal/idler split {omega_s}, {omega_i} rad/s is unphysical"
            )));
        }
        Ok(self.pump.k(omega_p)? - self.signal.k(omega_s)? - self.idler.k(omega_i)?)
    }

    /// Effective mismatch including the grating contribution, rad/m.
    pub fn phase_mismatch(&self, omega_p: f64, omega_s: f64) -> Result<f64> {
        let bulk = self.bulk_mismatch(omega_p, omega_s)?;
        match &self.poling {
            Some(p) => Ok(bulk - p.sign * 2.0 * PI * self.qpm_order as f64 / p.period),
            None => Ok(bulk),
        }
    }

    /// Pump-frame group-slowness mismatch at degenerate split, s/m:
    /// k′_p(ω_p) − ½·[k′_s(ω_p/2) + k′_i(ω_p/2)]. Zero at the EPM point.
    pub fn epm_slope(&self, omega_p: f64) -> Result<f64> {
        let half = omega_p / 2.0;
        Ok(self.pump.k_prime(omega_p)?
            - 0.5 * (self.signal.k_prime(half)? + self.idler.k_prime(half)?))
    }

    /// Signal–idler group-slowness difference at degenerate split times the
    /// crystal length: the maximal longitudinal walk-off delay, seconds.
    pub fn walkoff_delay(&self, omega_p: f64) -> Result<f64> {
        let half = omega_p / 2.0;
        Ok((self.signal.k_prime(half)? - self.idler.k_prime(half)?).abs() * self.length)
    }

    /// Pump-frame effective GVD k″_p(ω_p) − ¼·[k″_s(ω_p/2) + k″_i(ω_p/2)], s²/m.
    pub fn effective_gvd(&self, omega_p: f64) -> Result<f64> {
        let half = omega_p / 2.0;
        Ok(self.pump.k_double_prime(omega_p)?
            - 0.25 * (self.signal.k_double_prime(half)? + self.idler.k_double_prime(half)?))
    }
}

/// Solve for the grating period that phase matches degenerate down-conversion
/// at pump frequency ω_p: Λ = 2πm/|Δk_bulk|, with the compensation sign stored.
pub fn solve_grating_period(crystal: &CrystalSpec, omega_p: f64) -> Result<Poling> {
    crystal.validate()?;
    let bulk = crystal.bulk_mismatch(omega_p, omega_p / 2.0)?;
    if bulk == 0.0 {
        return Err(Error::Physics(
            "process is already phase matched at this pump; no finite grating period exists".into(),
        ));
    }
    Ok(Poling {
        period: 2.0 * PI * crystal.qpm_order as f64 / bulk.abs(),
        sign: bulk.signum(),
    })
}

/// Everything fixed by the EPM operating point.
#[derive(Debug, Clone)]
pub struct EpmSolution {
    /// Pump wavelength at the EPM point, metres.
    pub lambda_p: f64,
    /// Pump angular frequency, rad/s.
    pub omega_p: f64,
    /// Grating that phase matches the degenerate process at this pump.
    pub poling: Poling,
    /// Δk_Q at the solved point (numerical residual), rad/m.
    pub residual_mismatch: f64,
    /// Group-slowness mismatch at the solved point (numerical residual), s/m.
    pub residual_slope: f64,
    /// Full signal–idler walk-off delay |k′_s−k′_i|·L, seconds.
    pub walkoff: f64,
    /// Biphoton correlation time: half the full walk-off delay, seconds.
    pub tau_c: f64,
    /// Phase-matching bandwidth 2π/(|k′_s−k′_i|·L), rad/s.
    pub omega_c: f64,
    /// Phase-matching bandwidth as the FWHM of sinc², rad/s.
    pub omega_c_sinc_fwhm: f64,
    /// Pump-acceptance bandwidth of the group-matched process, rad/s.
    pub omega_epm: f64,
}

const SLOPE_TOL: f64 = 1e-18; // s/m

/// Find the pump frequency in [λ_lo, λ_hi] where the pump group slowness
/// equals the mean signal/idler group slowness, then build the full
/// operating-point summary. Uses a bracketed secant/bisection hybrid; the
/// endpoints are accepted directly when they already satisfy the tolerance,
/// so re-solving at a previous solution reproduces it exactly.
pub fn solve_epm_point(crystal: &CrystalSpec, lambda_lo: f64, lambda_hi: f64) -> Result<EpmSolution> {
    crystal.validate()?;
    if !(lambda_lo > 0.0 && lambda_hi >= lambda_lo) {
        return Err(Error::Config(format!(
            "invalid pump search range [{lambda_lo}, {lambda_hi}] m"
        )));
    }
    // Work in frequency; the wavelength order reverses.
    let mut a = omega_from_lambda(lambda_hi);
    let mut b = omega_from_lambda(lambda_lo);
    let g = |w: f64| crystal.epm_slope(w);

    let mut ga = g(a)?;
    let mut gb = g(b)?;
    let root = if ga.abs() <= SLOPE_TOL {
        a
    } else if gb.abs() <= SLOPE_TOL {
        b
    } else {
        if ga * gb > 0.0 {
            return Err(Error::Physics(format!(
                "no group-velocity-matched pump in [{:.1}, {:.1}] nm: slope does not change sign",
                lambda_lo * 1e9,
                lambda_hi * 1e9
            )));
        }
        let mut best = if ga.abs() <= gb.abs() { (a, ga.abs()) } else { (b, gb.abs()) };
        for _ in 0..200 {
            // Secant candidate, clamped into the open bracket; fall back to
            // the midpoint when it degenerates. Iterate until the bracket
            // collapses to float resolution so the root is as sharp as the
            // dispersion data allows, then accept the smallest residual seen.
            let mut x = b - gb * (b - a) / (gb - ga);
            if !x.is_finite() || x <= a || x >= b {
                x = 0.5 * (a + b);
            }
            if x <= a || x >= b {
                break;
            }
            let gx = g(x)?;
            if gx.abs() < best.1 {
                best = (x, gx.abs());
            }
            if gx == 0.0 {
                break;
            }
            if gx * ga < 0.0 {
                b = x;
                gb = gx;
            } else {
                a = x;
                ga = gx;
            }
            if b - a <= 4.0 * f64::EPSILON * b {
                break;
            }
        }
        if best.1 <= SLOPE_TOL {
            best.0
        } else {
            return Err(Error::Numeric(format!(
                "group-velocity matching did not converge: best residual {:.3e} s/m",
                best.1
            )));
        }
    };

    let poling = solve_grating_period(crystal, root)?;
    let mut solved = crystal.clone();
    solved.poling = Some(poling);
    let residual_mismatch = solved.phase_mismatch(root, root / 2.0)?;
    let residual_slope = crystal.epm_slope(root)?;
    let walkoff = crystal.walkoff_delay(root)?;
    if walkoff == 0.0 {
        return Err(Error::Physics(
            "signal and idler group slownesses coincide; walk-off delay is zero".into(),
        ));
    }
    let gvd = crystal.effective_gvd(root)?;
    Ok(EpmSolution {
        lambda_p: lambda_from_omega(root),
        omega_p: root,
        poling,
        residual_mismatch,
        residual_slope,
        walkoff,
        tau_c: 0.5 * walkoff,
        omega_c: phasematch_bandwidth(walkoff),
        omega_c_sinc_fwhm: phasematch_bandwidth_sinc_fwhm(walkoff),
        omega_epm: epm_bandwidth(gvd, crystal.length),
    })
}

/// Phase-matching bandwidth Ω_c = 2π/(|k′_s−k′_i|·L) from the full walk-off
/// delay, rad/s.
pub fn phasematch_bandwidth(walkoff: f64) -> f64 {
    2.0 * PI / walkoff
}

/// Phase-matching bandwidth as the FWHM of sinc²(Δk′·ν·L/2) in the signal
/// detuning ν, rad/s.
pub fn phasematch_bandwidth_sinc_fwhm(walkoff: f64) -> f64 {
    4.0 * SINC_SQ_HALF_MAX_X / walkoff
}

/// Biphoton coherence time 2π/Ω_c, seconds.
pub fn biphoton_coherence_time(omega_c: f64) -> f64 {
    2.0 * PI / omega_c
}

/// Pump-acceptance bandwidth of the group-matched process: FWHM of
/// sinc²(Δk″_eff·Ω²·L/4) in the pump detuning Ω, rad/s. Scales as 1/√L.
pub fn epm_bandwidth(effective_gvd: f64, length: f64) -> f64 {
    2.0 * (4.0 * SINC_SQ_HALF_MAX_X / (effective_gvd.abs() * length)).sqrt()
}

/// Whether the bandwidth ordering Ω_c ≪ Ω_p ≪ Ω_epm needed for
/// frequency-correlated pairs holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Both separations exceed the requested ratio.
    Satisfied,
    /// Ordering holds but at least one separation is below the ratio.
    Marginal,
    /// Ordering itself is broken.
    Violated,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Satisfied => write!(f, "satisfied"),
            Regime::Marginal => write!(f, "marginal"),
            Regime::Violated => write!(f, "violated"),
        }
    }
}

/// Classify the separation of the three bandwidths with margin ratio `r`
/// (r = 2 is the conventional check).
pub fn regime_check(omega_c: f64, omega_pump: f64, omega_epm: f64, r: f64) -> Regime {
    if omega_pump >= r * omega_c && omega_epm >= r * omega_pump {
        Regime::Satisfied
    } else if omega_pump <= omega_c || omega_epm <= omega_pump {
        Regime::Violated
    } else {
        Regime::Marginal
    }
}
