//! Joint spectral amplitude of the photon pair and the measures derived
//! from it (Schmidt number, frequency correlation, marginals).
//!
//! The two-photon amplitude on an (ω_s, ω_i) grid is
//!
//! ```text
//! A(ω_s, ω_i) = α(ω_s + ω_i) · sinc(Δk_Q·L/2) · exp(i·Δk_Q·L/2)
//! ```
//!
//! with α a transform-limited Gaussian pump envelope. A is L²-normalized so
//! that Σ|A|²·δω² = 1, which makes all downstream quantities (Schmidt
//! coefficients, interference terms) direct probabilities.

use crate::dispersion::{delta_omega_from_delta_lambda, omega_from_lambda};
use crate::error::{Error, Result};
use crate::phasematch::{phasematch_bandwidth, CrystalSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Normalized sinc, sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Evenly spaced samples from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    v[n - 1] = b;
    v
}

/// Sum of a slice by recursive halving. The fixed association order makes
/// the result independent of how the caller chunks its data, so repeated
/// runs are bit-identical.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        let mut s = 0.0;
        for x in v {
            s += x;
        }
        s
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

/// Pump field description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpSpec {
    /// Monochromatic pump at the given wavelength (metres).
    Cw { lambda: f64 },
    /// Transform-limited Gaussian pulse: centre wavelength and intensity
    /// FWHM, both in metres of wavelength.
    Pulsed { lambda: f64, fwhm: f64 },
}

impl PumpSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PumpSpec::Cw { lambda } if *lambda > 0.0 => Ok(()),
            PumpSpec::Pulsed { lambda, fwhm } if *lambda > 0.0 && *fwhm > 0.0 => Ok(()),
            _ => Err(Error::Config(format!("invalid pump description {self:?}"))),
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            PumpSpec::Cw { lambda } | PumpSpec::Pulsed { lambda, .. } => *lambda,
        }
    }

    /// Pump carrier angular frequency, rad/s.
    pub fn center_omega(&self) -> f64 {
        omega_from_lambda(self.lambda())
    }

    /// Intensity FWHM in angular frequency, rad/s.
    pub fn fwhm_omega(&self) -> Result<f64> {
        match self {
            PumpSpec::Cw { .. } => Err(Error::Config(
                "cw pump has no spectral width; this operation needs the pulsed pump".into(),
            )),
            PumpSpec::Pulsed { lambda, fwhm } => {
                Ok(delta_omega_from_delta_lambda(*fwhm, *lambda))
            }
        }
    }

    /// Gaussian amplitude width σ of α(ω) = exp(−(ω−ω₀)²/(2σ²)), chosen so
    /// the intensity |α|² has the configured FWHM: σ = Δω/(2√ln2).
    pub fn sigma_omega(&self) -> Result<f64> {
        Ok(self.fwhm_omega()? / (2.0 * (2.0f64.ln()).sqrt()))
    }

    /// Pump amplitude envelope at ω (peak value 1).
    pub fn envelope(&self, omega: f64) -> Result<f64> {
        let sigma = self.sigma_omega()?;
        let d = omega - self.center_omega();
        Ok((-d * d / (2.0 * sigma * sigma)).exp())
    }
}

/// Uniform frequency grid used for both photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    /// Centre frequency (the degenerate point ω_p0/2), rad/s.
    pub center: f64,
    /// Half the covered span, rad/s.
    pub half_span: f64,
    /// Points per axis; a power of two, at least 16.
    pub n: usize,
}

impl FrequencyGrid {
    pub fn new(center: f64, half_span: f64, n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 16 {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !(half_span > 0.0) {
            return Err(Error::Config(format!(
                "grid half-span must be positive, got {half_span}"
            )));
        }
        if !(center > half_span) {
            return Err(Error::Config(
                "grid extends to non-positive frequencies; reduce the span".into(),
            ));
        }
        Ok(FrequencyGrid { center, half_span, n })
    }

    /// Grid step δω, rad/s.
    pub fn step(&self) -> f64 {
        2.0 * self.half_span / (self.n - 1) as f64
    }

    /// All grid frequencies, ascending.
    pub fn axis(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|m| self.center + (2.0 * m as f64 / (n - 1) as f64 - 1.0) * self.half_span)
            .collect()
    }
}

/// A normalized two-photon amplitude sampled on a square grid. Row index is
/// the signal frequency, column index the idler frequency.
#[derive(Debug, Clone)]
pub struct JointSpectralAmplitude {
    pub grid: FrequencyGrid,
    pub a: DMatrix<Complex64>,
    pub normalized: bool,
}

impl JointSpectralAmplitude {
    pub fn axis(&self) -> Vec<f64> {
        self.grid.axis()
    }

    pub fn step(&self) -> f64 {
        self.grid.step()
    }

    /// Scale so that Σ|A|²·δω² = 1.
    pub fn normalize(&mut self) -> Result<()> {
        let dw = self.grid.step();
        let sq: Vec<f64> = self.a.iter().map(|z| z.norm_sqr()).collect();
        let total = pairwise_sum(&sq) * dw * dw;
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Physics(
                "joint amplitude has no support on this grid; widen the span or check the pump".into(),
            ));
        }
        let scale = 1.0 / total.sqrt();
        self.a.apply(|z| *z *= scale);
        self.normalized = true;
        Ok(())
    }

    /// Total probability Σ|A|²·δω² (1 after normalization).
    pub fn total_probability(&self) -> f64 {
        let dw = self.grid.step();
        let sq: Vec<f64> = self.a.iter().map(|z| z.norm_sqr()).collect();
        pairwise_sum(&sq) * dw * dw
    }

    /// Marginal spectral densities (signal, idler), each integrating to the
    /// total probability.
    pub fn marginal_spectra(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.n;
        let dw = self.grid.step();
        let mut signal = vec![0.0; n];
        let mut idler = vec![0.0; n];
        for (j, s) in signal.iter_mut().enumerate() {
            for (k, i) in idler.iter_mut().enumerate() {
                let w = self.a[(j, k)].norm_sqr();
                *s += w * dw;
                *i += w * dw;
            }
        }
        (signal, idler)
    }
}

/// Number of grid points required across the narrowest spectral feature.
const MIN_POINTS_PER_FEATURE: f64 = 8.0;
/// Required half-span in units of the widest spectral feature.
const MIN_HALF_SPAN_FACTOR: f64 = 3.0;
/// Support cut (relative to the peak intensity) for the correlation measure.
const SUPPORT_FRACTION: f64 = 0.01;

/// Default grid for a crystal/pump pair: centred on the degenerate
/// frequency with half-span `span_factor`·max(σ, Ω_c) (4 is the default).
pub fn default_grid(
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    n: usize,
    span_factor: f64,
) -> Result<FrequencyGrid> {
    let sigma = pump.sigma_omega()?;
    let omega_p0 = pump.center_omega();
    let omega_c = phasematch_bandwidth(crystal.walkoff_delay(omega_p0)?);
    FrequencyGrid::new(omega_p0 / 2.0, span_factor * sigma.max(omega_c), n)
}

/// Sample the two-photon amplitude for a poled crystal and a pulsed pump and
/// normalize it. Fails when the grid cannot support the state: span below
/// 3×max(σ, Ω_c), or fewer than 8 points across min(σ, Ω_c).
pub fn joint_spectral_amplitude(
    crystal: &CrystalSpec,
    pump: &PumpSpec,
    grid: &FrequencyGrid,
) -> Result<JointSpectralAmplitude> {
    crystal.validate()?;
    pump.validate()?;
    if crystal.poling.is_none() {
        return Err(Error::Config(
            "crystal carries no grating; solve for the poling period first".into(),
        ));
    }
    let sigma = pump.sigma_omega()?;
    let omega_p0 = pump.center_omega();
    let omega_c = phasematch_bandwidth(crystal.walkoff_delay(omega_p0)?);

    let coarse = sigma.max(omega_c);
    if grid.half_span < MIN_HALF_SPAN_FACTOR * coarse {
        return Err(Error::Config(format!(
            "grid half-span {:.3e} rad/s clips the state; need at least {:.3e} (3 x max of pump width and phase-matching bandwidth)",
            grid.half_span,
            MIN_HALF_SPAN_FACTOR * coarse
        )));
    }
    let fine = sigma.min(omega_c);
    let points_per_feature = fine / grid.step();
    if points_per_feature < MIN_POINTS_PER_FEATURE {
        return Err(Error::Config(format!(
            "grid resolves the narrowest spectral feature with only {points_per_feature:.1} points (need {MIN_POINTS_PER_FEATURE}); increase the grid size"
        )));
    }

    let axis = grid.axis();
    let half_l = 0.5 * crystal.length;
    let two_sigma_sq = 2.0 * sigma * sigma;
    let n = grid.n;
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let ws = axis[j];
        for k in 0..n {
            let wi = axis[k];
            let wp = ws + wi;
            let d = wp - omega_p0;
            let env = (-d * d / two_sigma_sq).exp();
            let x = crystal.phase_mismatch(wp, ws)? * half_l;
            let mag = env * sinc(x);
            a[(j, k)] = Complex64::new(mag * x.cos(), mag * x.sin());
        }
    }
    let mut jsa = JointSpectralAmplitude {
        grid: *grid,
        a,
        normalized: false,
    };
    jsa.normalize()?;
    Ok(jsa)
}

/// Schmidt decomposition of the normalized amplitude.
#[derive(Debug, Clone)]
pub struct SchmidtResult {
    /// Mode probabilities λ_n, descending, Σλ_n = 1.
    pub coefficients: Vec<f64>,
    /// Schmidt number K = 1/Σλ_n².
    pub k: f64,
    /// Single-photon purity 1/K.
    pub purity: f64,
}

/// Singular-value decomposition of A·δω. The squared singular values are the
/// Schmidt mode probabilities; K = 1 means separable, K ≫ 1 highly entangled.
pub fn schmidt_decompose(jsa: &JointSpectralAmplitude) -> Result<SchmidtResult> {
    let dw = jsa.grid.step();
    let scaled = jsa.a.map(|z| z * dw);
    let svd = scaled
        .try_svd(false, false, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numeric("singular value decomposition did not converge".into()))?;
    let mut p: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    p.sort_by(|x, y| y.partial_cmp(x).expect("singular values are finite"));
    let total = pairwise_sum(&p);
    if !(total > 0.0) {
        return Err(Error::Numeric("all Schmidt coefficients vanished".into()));
    }
    let sq: Vec<f64> = p.iter().map(|x| x * x).collect();
    let k = total * total / pairwise_sum(&sq);
    Ok(SchmidtResult {
        coefficients: p.iter().map(|x| x / total).collect(),
        k,
        purity: 1.0 / k,
    })
}

/// Pearson correlation of (ω_s, ω_i) under |A|², restricted to the support
/// where the intensity exceeds 1% of its peak. The cut removes the slowly
/// decaying sinc tails, whose second moments otherwise grow with the chosen
/// span instead of converging. +1 means fully frequency-correlated, −1
/// anti-correlated, 0 uncorrelated.
pub fn frequency_correlation(jsa: &JointSpectralAmplitude) -> f64 {
    let n = jsa.grid.n;
    let axis = jsa.axis();
    let mut peak = 0.0f64;
    for z in jsa.a.iter() {
        peak = peak.max(z.norm_sqr());
    }
    if peak == 0.0 {
        return 0.0;
    }
    let cut = SUPPORT_FRACTION * peak;

    let mut wsum = 0.0;
    let mut ms = 0.0;
    let mut mi = 0.0;
    for j in 0..n {
        for k in 0..n {
            let w = jsa.a[(j, k)].norm_sqr();
            if w >= cut {
                wsum += w;
                ms += w * axis[j];
                mi += w * axis[k];
            }
        }
    }
    if wsum == 0.0 {
        return 0.0;
    }
    ms /= wsum;
    mi /= wsum;

    let mut vs = 0.0;
    let mut vi = 0.0;
    let mut cov = 0.0;
    for j in 0..n {
        let ds = axis[j] - ms;
        for (k, wi) in axis.iter().enumerate() {
            let w = jsa.a[(j, k)].norm_sqr();
            if w >= cut {
                let di = wi - mi;
                vs += w * ds * ds;
                vi += w * di * di;
                cov += w * ds * di;
            }
        }
    }
    let denom = (vs * vi).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        cov / denom
    }
}
