//! Hong–Ou–Mandel interference: dip curves, visibility, triangular fits,
//! and coherence-time extraction.
//!
//! For a pair state A(ω_s, ω_i) entering a balanced beam splitter with a
//! relative delay τ, the coincidence probability is
//!
//! ```text
//! C(τ) = ½·(1 − W(τ)),   W(τ) = Σ_jk A[j][k]·conj(A[k][j])·e^{i(ω_j−ω_k)τ}·δω²
//! ```
//!
//! which vanishes at τ = 0 for an exchange-symmetric amplitude. Under
//! extended phase matching the dip is triangular with base width equal to
//! the full signal–idler walk-off delay.

use crate::dispersion::C_LIGHT;
use crate::error::{Error, Result};
use crate::jsa::{linspace, pairwise_sum, sinc, JointSpectralAmplitude};
use crate::phasematch::CrystalSpec;
use num_complex::Complex64;

/// Unit of the dip abscissa: direct time delay or mirror displacement
/// (x = c·τ, single-pass convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisUnit {
    Seconds,
    Meters,
}

impl std::fmt::Display for AxisUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxisUnit::Seconds => write!(f, "s"),
            AxisUnit::Meters => write!(f, "m"),
        }
    }
}

/// A sampled coincidence curve.
#[derive(Debug, Clone)]
pub struct HomCurve {
    pub delays: Vec<f64>,
    pub c: Vec<f64>,
    pub unit: AxisUnit,
}

impl HomCurve {
    /// Convert a time-delay curve to mirror displacement x = c·τ.
    pub fn to_position(&self) -> HomCurve {
        assert_eq!(self.unit, AxisUnit::Seconds, "curve is already positional");
        HomCurve {
            delays: self.delays.iter().map(|t| t * C_LIGHT).collect(),
            c: self.c.clone(),
            unit: AxisUnit::Meters,
        }
    }
}

/// Standard delay grid for pulsed dips: ±4 walk-off delays, 321 samples.
pub fn default_pulsed_delays(walkoff: f64) -> Vec<f64> {
    linspace(-4.0 * walkoff, 4.0 * walkoff, 321)
}

/// Standard delay grid for cw dips: ±7.5 ps, 301 samples.
pub fn default_cw_delays() -> Vec<f64> {
    linspace(-7.5e-12, 7.5e-12, 301)
}

fn clamp_probability(c: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&c) {
        return Err(Error::Numeric(format!(
            "coincidence probability {c} outside [0, 1]"
        )));
    }
    Ok(c.clamp(0.0, 1.0))
}

/// Coincidence curve of a pulsed pair state, directly from its sampled
/// amplitude. O(N²) per delay.
pub fn hom_coincidence_curve(
    jsa: &JointSpectralAmplitude,
    delays: &[f64],
) -> Result<HomCurve> {
    if delays.is_empty() || delays.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Config(
            "delay grid must be non-empty and ascending".into(),
        ));
    }
    if !jsa.normalized {
        return Err(Error::Config("amplitude must be normalized first".into()));
    }
    let n = jsa.grid.n;
    let axis = jsa.axis();
    let dw = jsa.step();
    // Exchange kernel M[j][k] = A[j][k]·conj(A[k][j]).
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            m[j * n + k] = jsa.a[(j, k)] * jsa.a[(k, j)].conj();
        }
    }
    let mut c = Vec::with_capacity(delays.len());
    for &tau in delays {
        let e: Vec<Complex64> = axis
            .iter()
            .map(|&w| Complex64::from_polar(1.0, w * tau))
            .collect();
        let mut w = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..n {
                row += m[j * n + k] * e[k].conj();
            }
            w += e[j] * row;
        }
        c.push(clamp_probability(0.5 * (1.0 - w.re * dw * dw))?);
    }
    Ok(HomCurve {
        delays: delays.to_vec(),
        c,
        unit: AxisUnit::Seconds,
    })
}

const CW_KERNEL_POINTS: usize = 8192;
const CW_KERNEL_LOBES: f64 = 6.0;

/// Coincidence curve for a cw pump at `lambda_pump`, using the crystal's
/// installed grating. The spectral kernel Φ(ν) = sinc(Δk_Q·L/2) is sampled
/// over ±6 phase-matching lobes and the curve is self-normalized:
///
/// ```text
/// C(τ) = ½·[1 − Σ Φ(ν)Φ(−ν)cos(2ντ) / Σ Φ(ν)²]
/// ```
pub fn cw_hom_curve(
    crystal: &CrystalSpec,
    lambda_pump: f64,
    delays: &[f64],
) -> Result<HomCurve> {
    crystal.validate()?;
    if crystal.poling.is_none() {
        return Err(Error::Config(
            "crystal carries no grating; solve for the poling period first".into(),
        ));
    }
    if delays.is_empty() || delays.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Config(
            "delay grid must be non-empty and ascending".into(),
        ));
    }
    let wp = crate::dispersion::omega_from_lambda(lambda_pump);
    let walkoff = crystal.walkoff_delay(wp)?;
    if walkoff == 0.0 {
        return Err(Error::Physics(
            "signal and idler group slownesses coincide; the dip has no width".into(),
        ));
    }
    let lobe = 2.0 * std::f64::consts::PI / walkoff;
    let nu = linspace(-CW_KERNEL_LOBES * lobe, CW_KERNEL_LOBES * lobe, CW_KERNEL_POINTS);
    let half_l = 0.5 * crystal.length;
    let mut phi = Vec::with_capacity(nu.len());
    let mut phi_m = Vec::with_capacity(nu.len());
    for &v in &nu {
        phi.push(sinc(crystal.phase_mismatch(wp, wp / 2.0 + v)? * half_l));
        phi_m.push(sinc(crystal.phase_mismatch(wp, wp / 2.0 - v)? * half_l));
    }
    let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
    let norm = pairwise_sum(&sq);
    if !(norm > 0.0) {
        return Err(Error::Physics("phase-matching kernel vanished".into()));
    }
    let mut c = Vec::with_capacity(delays.len());
    for &tau in delays {
        let terms: Vec<f64> = nu
            .iter()
            .zip(phi.iter().zip(&phi_m))
            .map(|(&v, (&p, &pm))| p * pm * (2.0 * v * tau).cos())
            .collect();
        let w = pairwise_sum(&terms) / norm;
        c.push(clamp_probability(0.5 * (1.0 - w))?);
    }
    Ok(HomCurve {
        delays: delays.to_vec(),
        c,
        unit: AxisUnit::Seconds,
    })
}

/// Model-free visibility estimate.
#[derive(Debug, Clone, Copy)]
pub struct Visibility {
    pub v: f64,
    pub baseline: f64,
    pub c_min: f64,
    /// Set when the curve has no usable dip (flat, or the extremes are
    /// adjacent samples); `v` is 0 in that case.
    pub degenerate: bool,
}

/// Estimate visibility as 1 − C_min/baseline, where the baseline is the mean
/// of the flattest fifth of the samples among those at least a median
/// distance from the minimum. Using only far, flat samples keeps the dip
/// walls and the dip itself out of the baseline.
pub fn visibility(c: &[f64]) -> Result<Visibility> {
    let n = c.len();
    if n < 5 {
        return Err(Error::Config(format!(
            "visibility needs at least 5 samples, got {n}"
        )));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("coincidence curve contains non-finite samples".into()));
    }
    let imin = (0..n).min_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap();
    let imax = (0..n).max_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap();
    let flat = c[imax] - c[imin] < 1e-12 * c[imax].abs().max(1.0);
    if flat || imax.abs_diff(imin) < 3 {
        return Ok(Visibility {
            v: 0.0,
            baseline: c.iter().sum::<f64>() / n as f64,
            c_min: c[imin],
            degenerate: true,
        });
    }
    // Slope per sample (one-sided at the ends, central inside).
    let slope = |i: usize| -> f64 {
        if i == 0 {
            c[1] - c[0]
        } else if i == n - 1 {
            c[n - 1] - c[n - 2]
        } else {
            0.5 * (c[i + 1] - c[i - 1])
        }
    };
    let dist: Vec<f64> = (0..n).map(|i| i.abs_diff(imin) as f64).collect();
    let median = {
        let mut d = dist.clone();
        d.sort_by(f64::total_cmp);
        if n % 2 == 1 {
            d[n / 2]
        } else {
            0.5 * (d[n / 2 - 1] + d[n / 2])
        }
    };
    let mut far: Vec<usize> = (0..n).filter(|&i| dist[i] >= median).collect();
    far.sort_by(|&a, &b| slope(a).abs().total_cmp(&slope(b).abs()).then(a.cmp(&b)));
    let take = (n / 5).max(1).min(far.len());
    let baseline = far[..take].iter().map(|&i| c[i]).sum::<f64>() / take as f64;
    if !(baseline > 0.0) {
        return Ok(Visibility {
            v: 0.0,
            baseline,
            c_min: c[imin],
            degenerate: true,
        });
    }
    Ok(Visibility {
        v: 1.0 - c[imin] / baseline,
        baseline,
        c_min: c[imin],
        degenerate: false,
    })
}

/// Visibility after subtracting a relative leakage/background fraction ε of
/// each photon's intensity into the wrong output: V_adj = max(0, V − 2ε).
pub fn leakage_adjusted_visibility(v: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::Config(format!(
            "leakage fraction must lie in [0, 0.5], got {epsilon}"
        )));
    }
    if !(-1e-9..=1.0 + 1e-9).contains(&v) {
        return Err(Error::Config(format!(
            "visibility must lie in [0, 1], got {v}"
        )));
    }
    Ok((v.clamp(0.0, 1.0) - 2.0 * epsilon).max(0.0))
}

/// Fitted triangular dip C(x) = B·[1 − V·max(0, 1 − |x−x₀|/(w/2))].
#[derive(Debug, Clone)]
pub struct DipFit {
    pub baseline: f64,
    pub visibility: f64,
    pub center: f64,
    /// Full base width of the triangle.
    pub width: f64,
    pub residual_rms: f64,
    /// 1σ parameter uncertainties (baseline, visibility, center, width) from
    /// the residual variance and the local Jacobian; None when the normal
    /// matrix is singular.
    pub sigma: Option<[f64; 4]>,
    pub unit: AxisUnit,
}

impl DipFit {
    /// Evaluate the fitted model at `x`.
    pub fn model(&self, x: f64) -> f64 {
        triangle(
            &[self.baseline, self.visibility, self.center, self.width],
            x,
        )
    }
}

fn triangle(p: &[f64; 4], x: f64) -> f64 {
    let [b, v, x0, w] = *p;
    b * (1.0 - v * (1.0 - (x - x0).abs() / (0.5 * w)).max(0.0))
}

/// One Nelder–Mead run. Returns (best params, best SSE, converged).
fn nelder_mead(
    f: &dyn Fn(&[f64; 4]) -> f64,
    start: [f64; 4],
    scales: [f64; 4],
    max_iter: usize,
) -> ([f64; 4], f64, bool) {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;
    let mut simplex: Vec<[f64; 4]> = vec![start];
    for i in 0..4 {
        let mut v = start;
        v[i] += scales[i];
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(f).collect();
    let mut converged = false;
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..5).collect();
        order.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        let sorted: Vec<[f64; 4]> = order.iter().map(|&i| simplex[i]).collect();
        let fsorted: Vec<f64> = order.iter().map(|&i| fv[i]).collect();
        simplex = sorted;
        fv = fsorted;

        let spread_ok = (0..4).all(|i| {
            let lo = simplex.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let hi = simplex.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo <= 1e-9 * simplex[0][i].abs().max(scales[i].abs())
        });
        if spread_ok {
            converged = true;
            break;
        }

        let mut centroid = [0.0; 4];
        for p in &simplex[..4] {
            for i in 0..4 {
                centroid[i] += p[i] / 4.0;
            }
        }
        let worst = simplex[4];
        let mut reflected = [0.0; 4];
        for i in 0..4 {
            reflected[i] = centroid[i] + ALPHA * (centroid[i] - worst[i]);
        }
        let fr = f(&reflected);
        if fr < fv[0] {
            let mut expanded = [0.0; 4];
            for i in 0..4 {
                expanded[i] = centroid[i] + GAMMA * (reflected[i] - centroid[i]);
            }
            let fe = f(&expanded);
            if fe < fr {
                simplex[4] = expanded;
                fv[4] = fe;
            } else {
                simplex[4] = reflected;
                fv[4] = fr;
            }
        } else if fr < fv[3] {
            simplex[4] = reflected;
            fv[4] = fr;
        } else {
            let inside = fr >= fv[4];
            let towards = if inside { worst } else { reflected };
            let mut contracted = [0.0; 4];
            for i in 0..4 {
                contracted[i] = centroid[i] + RHO * (towards[i] - centroid[i]);
            }
            let fc = f(&contracted);
            if fc < fv[4].min(fr) {
                simplex[4] = contracted;
                fv[4] = fc;
            } else {
                let best = simplex[0];
                for v in simplex.iter_mut().skip(1) {
                    for i in 0..4 {
                        v[i] = best[i] + SIGMA * (v[i] - best[i]);
                    }
                }
                for (v, fx) in simplex.iter().zip(fv.iter_mut()).skip(1) {
                    *fx = f(v);
                }
            }
        }
    }
    let ibest = (0..5).min_by(|&a, &b| fv[a].total_cmp(&fv[b])).unwrap();
    (simplex[ibest], fv[ibest], converged)
}

/// Least-squares triangular fit with three deterministic width multi-starts.
/// Fails with a numeric error (reporting the best iterate) when no start
/// converges.
pub fn fit_triangular_dip(delays: &[f64], c: &[f64], unit: AxisUnit) -> Result<DipFit> {
    let n = delays.len();
    if n != c.len() {
        return Err(Error::Config("delay and coincidence lengths differ".into()));
    }
    if n < 8 {
        return Err(Error::Config(format!(
            "triangular fit needs at least 8 samples, got {n}"
        )));
    }
    if delays.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Config("delay grid must be ascending".into()));
    }
    let est = visibility(c)?;
    if est.degenerate {
        return Err(Error::Numeric(
            "coincidence data shows no dip to fit".into(),
        ));
    }
    let imin = (0..n).min_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap();
    let b0 = if est.baseline > 0.0 {
        est.baseline
    } else {
        c.iter().sum::<f64>() / n as f64
    };
    let v0 = est.v.clamp(0.05, 1.0);
    let x0 = delays[imin];
    // Width seed: samples below the half-depth level span w/2 for a triangle.
    let half_level = b0 - 0.5 * (b0 - c[imin]);
    let mut i0 = imin;
    while i0 > 0 && c[i0 - 1] <= half_level {
        i0 -= 1;
    }
    let mut i1 = imin;
    while i1 + 1 < n && c[i1 + 1] <= half_level {
        i1 += 1;
    }
    let mut w_est = 2.0 * (delays[i1] - delays[i0]);
    if !(w_est > 0.0) {
        w_est = 0.125 * (delays[n - 1] - delays[0]);
    }

    let sse = |p: &[f64; 4]| -> f64 {
        // Positive baseline and width; visibility within its physical range,
        // so the model never predicts a negative coincidence probability.
        if !(p[0] > 0.0 && p[3] > 0.0) || !(0.0..=1.0).contains(&p[1]) {
            return f64::INFINITY;
        }
        let mut s = 0.0;
        for (x, y) in delays.iter().zip(c) {
            let r = triangle(p, *x) - y;
            s += r * r;
        }
        s
    };

    let mut best: Option<([f64; 4], f64)> = None;
    let mut last_iterate = ([b0, v0, x0, w_est], f64::INFINITY);
    for mult in [0.5, 1.0, 2.0] {
        let w_start = mult * w_est;
        let start = [b0, v0, x0, w_start];
        let scales = [0.1 * b0, 0.1, 0.1 * w_start, 0.5 * w_start];
        let (p, s, conv) = nelder_mead(&sse, start, scales, 2000);
        if s < last_iterate.1 {
            last_iterate = (p, s);
        }
        if conv && best.as_ref().is_none_or(|(_, bs)| s < *bs) {
            best = Some((p, s));
        }
    }
    let (p, s) = best.ok_or_else(|| {
        Error::Numeric(format!(
            "triangular fit did not converge; best iterate B={:.6e} V={:.6e} x0={:.6e} w={:.6e} with rms residual {:.3e}",
            last_iterate.0[0],
            last_iterate.0[1],
            last_iterate.0[2],
            last_iterate.0[3],
            (last_iterate.1 / n as f64).sqrt()
        ))
    })?;
    let rms = (s / n as f64).sqrt();

    // Parameter uncertainties from the local Jacobian: cov = s²·(JᵀJ)⁻¹.
    let scales = [0.1 * b0, 0.1, 0.1 * p[3].abs(), 0.5 * p[3].abs()];
    let mut jtj = [[0.0f64; 4]; 4];
    let mut jac = vec![[0.0f64; 4]; n];
    for (r, x) in delays.iter().enumerate() {
        for i in 0..4 {
            let h = (p[i].abs() * 1e-6).max(scales[i].abs() * 1e-9);
            let mut hi = p;
            hi[i] += h;
            let mut lo = p;
            lo[i] -= h;
            jac[r][i] = (triangle(&hi, *x) - triangle(&lo, *x)) / (2.0 * h);
        }
    }
    for row in &jac {
        for i in 0..4 {
            for j in 0..4 {
                jtj[i][j] += row[i] * row[j];
            }
        }
    }
    let dof = (n - 4) as f64;
    let var = s / dof;
    let jtj = nalgebra::Matrix4::from_fn(|i, j| jtj[i][j]);
    let sigma = jtj.try_inverse().map(|inv| {
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = (inv[(i, i)] * var).max(0.0).sqrt();
        }
        out
    });

    Ok(DipFit {
        baseline: p[0],
        visibility: p[1],
        center: p[2],
        width: p[3],
        residual_rms: rms,
        sigma,
        unit,
    })
}

/// Coherence time implied by a triangular dip: half the full base width,
/// converted from the curve's axis unit (x = c·τ single-pass for meters).
pub fn dip_width_to_coherence_time(width: f64, unit: AxisUnit) -> f64 {
    match unit {
        AxisUnit::Seconds => 0.5 * width,
        AxisUnit::Meters => 0.5 * width / C_LIGHT,
    }
}

/// FWHM of the field autocorrelation |g(τ)| of a single photon with spectral
/// density `spectrum` on the uniform frequency `axis`:
///
/// ```text
/// g(τ) = |Σ S(ω)·e^{iωτ}| / Σ S(ω)
/// ```
///
/// Found by scanning outward from τ = 0 and bisecting the first half-maximum
/// crossing.
pub fn field_autocorrelation_coherence_time(axis: &[f64], spectrum: &[f64]) -> Result<f64> {
    if axis.len() != spectrum.len() || axis.len() < 4 {
        return Err(Error::Config(
            "autocorrelation needs matching axis/spectrum arrays with at least 4 samples".into(),
        ));
    }
    if spectrum.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(Error::Config("spectral density must be finite and non-negative".into()));
    }
    let total = pairwise_sum(spectrum);
    if !(total > 0.0) {
        return Err(Error::Physics("spectral density is identically zero".into()));
    }
    let g = |tau: f64| -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (w, s) in axis.iter().zip(spectrum) {
            let (sin, cos) = (w * tau).sin_cos();
            re += s * cos;
            im += s * sin;
        }
        (re * re + im * im).sqrt() / total
    };
    const SCAN_POINTS: usize = 30_001;
    let mut tau_max = 3e-12;
    for _ in 0..10 {
        let taus = linspace(0.0, tau_max, SCAN_POINTS);
        let mut bracket = None;
        let mut prev = (0.0, 1.0);
        for &t in &taus[1..] {
            let v = g(t);
            if v < 0.5 {
                bracket = Some((prev.0, t));
                break;
            }
            prev = (t, v);
        }
        if let Some((mut lo, mut hi)) = bracket {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.5 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(2.0 * 0.5 * (lo + hi));
        }
        tau_max *= 2.0;
    }
    Err(Error::Numeric(
        "field autocorrelation never reached half maximum within the scan range".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsa::tests::{epm_crystal, reference_pump};
    use crate::jsa::{default_grid, joint_spectral_amplitude, FrequencyGrid, JointSpectralAmplitude};
    use crate::phasematch::biphoton_coherence_time;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn reference_dip() -> (HomCurve, f64) {
        let (crystal, sol) = epm_crystal();
        let pump = reference_pump();
        let grid = default_grid(&crystal, &pump, 512, 4.0).unwrap();
        let jsa = joint_spectral_amplitude(&crystal, &pump, &grid).unwrap();
        let curve = hom_coincidence_curve(&jsa, &default_pulsed_delays(sol.walkoff)).unwrap();
        (curve, sol.walkoff)
    }

    #[test]
    fn pulsed_dip_sits_at_half_the_walkoff() {
        let (curve, walkoff) = reference_dip();
        assert!(curve.c.iter().all(|&c| (0.0..=0.55).contains(&c)));
        let vis = visibility(&curve.c).unwrap();
        assert!(!vis.degenerate);
        assert!((vis.v - 0.9978).abs() < 2e-3, "V = {}", vis.v);

        let fit = fit_triangular_dip(&curve.delays, &curve.c, curve.unit).unwrap();
        assert!((fit.center - (-0.5 * walkoff)).abs() < 0.03e-12, "center = {}", fit.center);
        assert_relative_eq!(fit.width, 2.9575579e-12, max_relative = 1e-4);
        assert!(fit.sigma.is_some());
    }

    #[test]
    fn cw_dip_is_triangular_and_deep() {
        let (crystal, sol) = epm_crystal();
        let curve = cw_hom_curve(&crystal, 792e-9, &default_cw_delays()).unwrap();
        let vis = visibility(&curve.c).unwrap();
        assert!(vis.v > 0.999, "V = {}", vis.v);
        // The kernel is even in the detuning, so the curve is even in delay.
        let n = curve.c.len();
        for i in 0..n / 2 {
            assert!((curve.c[i] - curve.c[n - 1 - i]).abs() < 1e-12);
        }
        assert!(curve.c[n / 2] < 1e-4, "C(0) = {}", curve.c[n / 2]);

        let fit = fit_triangular_dip(&curve.delays, &curve.c, curve.unit).unwrap();
        assert_relative_eq!(fit.width, 2.9744739e-12, max_relative = 1e-4);
        assert!(fit.center.abs() < 1e-14);
        assert!(fit.residual_rms / fit.baseline < 0.005);
        // Dip-implied coherence time agrees with the walk-off value.
        let tau_dip = dip_width_to_coherence_time(fit.width, fit.unit);
        assert!((tau_dip / sol.tau_c - 1.0).abs() < 0.05);
    }

    #[test]
    fn exchange_symmetric_state_cancels_at_zero_delay() {
        let grid = FrequencyGrid::new(1.19e15, 4e13, 64).unwrap();
        let axis = grid.axis();
        let s = 1e13;
        let mut a = DMatrix::<Complex64>::zeros(grid.n, grid.n);
        for j in 0..grid.n {
            for k in 0..grid.n {
                let ds = axis[j] - grid.center;
                let di = axis[k] - grid.center;
                a[(j, k)] = Complex64::new((-(ds * ds + di * di) / (2.0 * s * s)).exp(), 0.0);
            }
        }
        let mut jsa = JointSpectralAmplitude { grid, a, normalized: false };
        jsa.normalize().unwrap();
        let curve = hom_coincidence_curve(&jsa, &linspace(-1e-13, 1e-13, 11)).unwrap();
        assert!(curve.c[5] < 1e-12, "C(0) = {}", curve.c[5]);
    }

    #[test]
    fn visibility_flags_flat_curves() {
        let flat = vec![0.5; 64];
        let vis = visibility(&flat).unwrap();
        assert!(vis.degenerate);
        assert_eq!(vis.v, 0.0);
        assert!(visibility(&[0.5, 0.4, 0.5]).is_err());
    }

    #[test]
    fn fit_recovers_its_own_model() {
        let truth = DipFit {
            baseline: 0.5,
            visibility: 0.97,
            center: -1.4e-12,
            width: 3e-12,
            residual_rms: 0.0,
            sigma: None,
            unit: AxisUnit::Seconds,
        };
        let delays: Vec<f64> = linspace(-4.0 * truth.width, 4.0 * truth.width, 321)
            .iter()
            .map(|d| truth.center + d)
            .collect();
        let c: Vec<f64> = delays.iter().map(|&x| truth.model(x)).collect();
        let fit = fit_triangular_dip(&delays, &c, AxisUnit::Seconds).unwrap();
        assert_relative_eq!(fit.baseline, truth.baseline, max_relative = 1e-6);
        assert_relative_eq!(fit.visibility, truth.visibility, max_relative = 1e-6);
        assert_relative_eq!(fit.width, truth.width, max_relative = 1e-6);
        assert!((fit.center - truth.center).abs() < 1e-6 * truth.width);
        assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn fit_rejects_flat_data() {
        let delays = linspace(-1.0, 1.0, 64);
        let flat = vec![0.5; 64];
        assert!(fit_triangular_dip(&delays, &flat, AxisUnit::Seconds).is_err());
    }

    #[test]
    fn leakage_adjustment() {
        assert_relative_eq!(leakage_adjusted_visibility(1.0, 0.01).unwrap(), 0.98);
        assert_eq!(leakage_adjusted_visibility(0.3, 0.5).unwrap(), 0.0);
        assert!(leakage_adjusted_visibility(0.5, 0.6).is_err());
        assert!(leakage_adjusted_visibility(-0.1, 0.1).is_err());
    }

    #[test]
    fn gaussian_autocorrelation_width() {
        let fwhm = 2e13;
        let center = 1.19e15;
        let axis = linspace(center - 4.0 * fwhm, center + 4.0 * fwhm, 8001);
        let s: Vec<f64> = axis
            .iter()
            .map(|&w| {
                let d = w - center;
                (-4.0 * (2.0f64).ln() * d * d / (fwhm * fwhm)).exp()
            })
            .collect();
        let t = field_autocorrelation_coherence_time(&axis, &s).unwrap();
        let expected = 8.0 * (2.0f64).ln() / fwhm;
        assert_relative_eq!(t, expected, max_relative = 1e-4);
    }

    #[test]
    fn marginal_autocorrelation_is_much_shorter_than_pair_coherence() {
        let (crystal, sol) = epm_crystal();
        let pump = reference_pump();
        let grid = default_grid(&crystal, &pump, 512, 4.0).unwrap();
        let jsa = joint_spectral_amplitude(&crystal, &pump, &grid).unwrap();
        let (s, i) = jsa.marginal_spectra();
        let axis = jsa.axis();
        let t_s = field_autocorrelation_coherence_time(&axis, &s).unwrap();
        let t_i = field_autocorrelation_coherence_time(&axis, &i).unwrap();
        assert_relative_eq!(t_s, 570.5e-15, max_relative = 2e-3);
        assert_relative_eq!(t_i, 566.2e-15, max_relative = 2e-3);
        assert!(t_s < 600e-15 && t_i < 600e-15);
        let pair = biphoton_coherence_time(sol.omega_c);
        assert!(pair / t_s > 3.0 && pair / t_i > 3.0);
    }

    #[test]
    fn position_axis_conversion() {
        let curve = HomCurve {
            delays: vec![-1e-12, 0.0, 1e-12],
            c: vec![0.5, 0.0, 0.5],
            unit: AxisUnit::Seconds,
        };
        let pos = curve.to_position();
        assert_eq!(pos.unit, AxisUnit::Meters);
        assert_relative_eq!(pos.delays[2], C_LIGHT * 1e-12, max_relative = 1e-15);
        assert_relative_eq!(
            dip_width_to_coherence_time(2.0 * C_LIGHT * 1e-12, AxisUnit::Meters),
            1e-12,
            max_relative = 1e-12
        );
    }
}
