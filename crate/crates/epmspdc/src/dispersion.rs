//! Sellmeier dispersion for nonlinear-crystal axes.
//!
//! Refractive index model (wavelength in micrometres):
//!
//! ```text
//! n²(λ) = A + Σ_j B_j / (1 − C_j/λ²) − D·λ²
//! ```
//!
//! All frequency-domain evaluations (k, k′, k″) use analytic derivatives of
//! this form via the substitution u = λ² = (2πc·10⁶)²/ω², never finite
//! differences.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;

/// λ (m) → angular frequency ω (rad/s).
pub fn omega_from_lambda(lambda_m: f64) -> f64 {
    2.0 * PI * C_LIGHT / lambda_m
}

/// Angular frequency ω (rad/s) → λ (m).
pub fn lambda_from_omega(omega: f64) -> f64 {
    2.0 * PI * C_LIGHT / omega
}

/// Spectral width conversion Δλ = λ²·Δω/(2πc) at the stated carrier.
pub fn delta_lambda_from_delta_omega(delta_omega: f64, carrier_lambda_m: f64) -> f64 {
    carrier_lambda_m * carrier_lambda_m * delta_omega / (2.0 * PI * C_LIGHT)
}

/// Spectral width conversion Δω = 2πc·Δλ/λ² at the stated carrier.
pub fn delta_omega_from_delta_lambda(delta_lambda_m: f64, carrier_lambda_m: f64) -> f64 {
    2.0 * PI * C_LIGHT * delta_lambda_m / (carrier_lambda_m * carrier_lambda_m)
}

/// One crystal axis: Sellmeier coefficients plus the wavelength range over
/// which the fit is trusted.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierSet {
    pub name: String,
    pub a: f64,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: f64,
    /// Valid wavelength range in µm (inclusive).
    pub lambda_min_um: f64,
    pub lambda_max_um: f64,
    /// Literature source of the coefficients; printed in every report.
    pub citation: String,
}

impl SellmeierSet {
    pub fn new(
        name: &str,
        a: f64,
        b: &[f64],
        c: &[f64],
        d: f64,
        lambda_range_um: (f64, f64),
        citation: &str,
    ) -> Result<Self> {
        if b.len() != c.len() {
            return Err(Error::Config(format!(
                "sellmeier set {name}: B and C term counts differ ({} vs {})",
                b.len(),
                c.len()
            )));
        }
        let (lo, hi) = lambda_range_um;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Config(format!(
                "sellmeier set {name}: invalid wavelength range [{lo}, {hi}] um"
            )));
        }
        let set = SellmeierSet {
            name: name.to_string(),
            a,
            b: b.to_vec(),
            c: c.to_vec(),
            d,
            lambda_min_um: lo,
            lambda_max_um: hi,
            citation: citation.to_string(),
        };
        // A resonance pole inside the stated range would make every
        // downstream quantity garbage; reject at construction.
        for &cj in &set.c {
            if cj > 0.0 {
                let pole = cj.sqrt();
                if pole >= lo && pole <= hi {
                    return Err(Error::Config(format!(
                        "sellmeier set {name}: resonance pole at {pole:.4} um lies inside the stated range"
                    )));
                }
            }
        }
        let samples = 257;
        for i in 0..samples {
            let lam = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            let n2 = set.f(lam * lam);
            if !(n2 >= 0.999_999) {
                return Err(Error::Config(format!(
                    "sellmeier set {name}: n^2 = {n2:.6} at {lam:.4} um is unphysical"
                )));
            }
        }
        Ok(set)
    }

    /// n² as a function of u = λ² (λ in µm).
    fn f(&self, u: f64) -> f64 {
        let mut v = self.a - self.d * u;
        for (bj, cj) in self.b.iter().zip(&self.c) {
            v += bj * u / (u - cj);
        }
        v
    }

    /// d(n²)/du.
    fn f_prime(&self, u: f64) -> f64 {
        let mut v = -self.d;
        for (bj, cj) in self.b.iter().zip(&self.c) {
            let den = u - cj;
            v -= bj * cj / (den * den);
        }
        v
    }

    /// d²(n²)/du².
    fn f_double_prime(&self, u: f64) -> f64 {
        let mut v = 0.0;
        for (bj, cj) in self.b.iter().zip(&self.c) {
            let den = u - cj;
            v += 2.0 * bj * cj / (den * den * den);
        }
        v
    }

    fn check_range(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(Error::Physics(format!(
                "sellmeier set {}: non-positive frequency {omega}",
                self.name
            )));
        }
        let lam_um = lambda_from_omega(omega) * 1e6;
        // A few ulps of slack so a wavelength converted through omega and
        // back still counts as inside an inclusive range.
        let slack = 1e-12;
        if lam_um < self.lambda_min_um * (1.0 - slack) || lam_um > self.lambda_max_um * (1.0 + slack)
        {
            return Err(Error::Physics(format!(
                "sellmeier set {}: wavelength {:.4} um outside valid range [{}, {}] um",
                self.name, lam_um, self.lambda_min_um, self.lambda_max_um
            )));
        }
        Ok(lam_um)
    }

    /// Refractive index at angular frequency ω (rad/s).
    pub fn index(&self, omega: f64) -> Result<f64> {
        let lam_um = self.check_range(omega)?;
        Ok(self.f(lam_um * lam_um).sqrt())
    }

    /// Wavevector magnitude k(ω) = n(ω)·ω/c in rad/m.
    pub fn k(&self, omega: f64) -> Result<f64> {
        Ok(self.index(omega)? * omega / C_LIGHT)
    }

    /// (n, dn/dω, d²n/dω²) by analytic differentiation.
    fn index_derivatives(&self, omega: f64) -> Result<(f64, f64, f64)> {
        let lam_um = self.check_range(omega)?;
        let u = lam_um * lam_um;
        let f = self.f(u);
        let fp = self.f_prime(u);
        let fpp = self.f_double_prime(u);
        let n = f.sqrt();
        // u(ω) = κ/ω² gives u′ = −2u/ω and u″ = 6u/ω².
        let up = -2.0 * u / omega;
        let upp = 6.0 * u / (omega * omega);
        let np = fp * up / (2.0 * n);
        let npp = (fpp * up * up + fp * upp) / (2.0 * n) - (fp * up) * (fp * up) / (4.0 * n * n * n);
        Ok((n, np, npp))
    }

    /// Group slowness dk/dω = (n + ω·dn/dω)/c in s/m.
    pub fn k_prime(&self, omega: f64) -> Result<f64> {
        let (n, np, _) = self.index_derivatives(omega)?;
        Ok((n + omega * np) / C_LIGHT)
    }

    /// Group-velocity dispersion d²k/dω² = (2·dn/dω + ω·d²n/dω²)/c in s²/m.
    pub fn k_double_prime(&self, omega: f64) -> Result<f64> {
        let (_, np, npp) = self.index_derivatives(omega)?;
        Ok((2.0 * np + omega * npp) / C_LIGHT)
    }

    /// Group index c·dk/dω.
    pub fn group_index(&self, omega: f64) -> Result<f64> {
        Ok(self.k_prime(omega)? * C_LIGHT)
    }
}

/// Shipped KTP y-axis coefficients.
///
/// Source: F. König and F. N. C. Wong, Appl. Phys. Lett. 84, 1644 (2004).
pub fn ktp_y() -> SellmeierSet {
    SellmeierSet::new(
        "y",
        2.09930,
        &[0.922683],
        &[0.0467695],
        0.0138408,
        (0.43, 1.85),
        "F. Konig and F. N. C. Wong, Appl. Phys. Lett. 84, 1644 (2004), KTP y axis",
    )
    .expect("shipped y-axis coefficients are valid")
}

/// Shipped KTP z-axis coefficients (IR-corrected fit).
///
/// Source: K. Fradkin, A. Arie, A. Skliar, and G. Rosenman,
/// Appl. Phys. Lett. 74, 914 (1999).
pub fn ktp_z() -> SellmeierSet {
    SellmeierSet::new(
        "z",
        2.12725,
        &[1.18431, 0.6603],
        &[0.0514852, 100.00507],
        0.00968956,
        (0.43, 1.85),
        "K. Fradkin, A. Arie, A. Skliar, and G. Rosenman, Appl. Phys. Lett. 74, 914 (1999), KTP z axis",
    )
    .expect("shipped z-axis coefficients are valid")
}

/// Constant-index set (dispersionless), for tests and feasibility checks.
pub fn constant_index(name: &str, n: f64) -> SellmeierSet {
    SellmeierSet::new(
        name,
        n * n,
        &[],
        &[],
        0.0,
        (0.01, 1e6),
        "constant test index",
    )
    .expect("constant index set is valid")
}
