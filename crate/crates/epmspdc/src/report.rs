//! Human-readable reports, CSV output, and minimal JSON encoding.
//!
//! Every number is printed with a fixed-width format so repeated runs of the
//! same configuration produce byte-identical output.

use crate::config::RunConfig;
use crate::counts::{DetectionConfig, RatesReport};
use crate::dispersion::{delta_lambda_from_delta_omega, C_LIGHT};
use crate::error::{Error, Result};
use crate::hom::{dip_width_to_coherence_time, AxisUnit, DipFit, Visibility};
use crate::jsa::{JointSpectralAmplitude, SchmidtResult};
use crate::phasematch::{biphoton_coherence_time, regime_check, EpmSolution};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// Spectral width in nm at the stated carrier wavelength.
fn nm_width(delta_omega: f64, carrier_m: f64) -> f64 {
    delta_lambda_from_delta_omega(delta_omega, carrier_m) * 1e9
}

pub fn epm_report(cfg: &RunConfig, sol: &EpmSolution) -> String {
    let mut s = String::new();
    let lam_f = 2.0 * sol.lambda_p;
    let _ = writeln!(s, "extended phase matching operating point");
    let _ = writeln!(
        s,
        "  pump wavelength          {:.4} nm  ({:.6e} rad/s)",
        sol.lambda_p * 1e9,
        sol.omega_p
    );
    let _ = writeln!(
        s,
        "  grating period           {:.6} um  (order {}, sign {:+.0})",
        sol.poling.period * 1e6,
        cfg.crystal.qpm_order,
        sol.poling.sign
    );
    let _ = writeln!(
        s,
        "  residual mismatch        {:.3e} rad/m; residual slope {:.3e} s/m",
        sol.residual_mismatch, sol.residual_slope
    );
    let _ = writeln!(
        s,
        "  walk-off delay           {:.4} ps  (correlation time {:.4} ps)",
        sol.walkoff * 1e12,
        sol.tau_c * 1e12
    );
    let _ = writeln!(
        s,
        "  coherence length         {:.4} mm  (c x walk-off delay)",
        sol.walkoff * C_LIGHT * 1e3
    );
    let _ = writeln!(
        s,
        "  pair bandwidth           {:.6e} rad/s  ({:.4} nm at {:.1} nm)",
        sol.omega_c,
        nm_width(sol.omega_c, lam_f),
        lam_f * 1e9
    );
    let _ = writeln!(
        s,
        "  pair bandwidth (sinc)    {:.6e} rad/s  ({:.4} nm at {:.1} nm)",
        sol.omega_c_sinc_fwhm,
        nm_width(sol.omega_c_sinc_fwhm, lam_f),
        lam_f * 1e9
    );
    let _ = writeln!(
        s,
        "  pump acceptance          {:.6e} rad/s  ({:.2} nm at the pump; {:.2} nm at {:.1} nm)",
        sol.omega_epm,
        nm_width(sol.omega_epm, sol.lambda_p),
        nm_width(sol.omega_epm / 2.0, lam_f),
        lam_f * 1e9
    );
    if let Ok(pump_fwhm) = cfg.pump_pulsed.fwhm_omega() {
        let regime = regime_check(sol.omega_c, pump_fwhm, sol.omega_epm, 2.0);
        let _ = writeln!(
            s,
            "  pump bandwidth           {:.6e} rad/s  (configured pulse)",
            pump_fwhm
        );
        let _ = writeln!(s, "  bandwidth ordering (r=2) {regime}");
    }
    let _ = writeln!(s, "  dispersion sources:");
    let mut seen: Vec<&str> = Vec::new();
    for set in [&cfg.crystal.pump, &cfg.crystal.signal, &cfg.crystal.idler] {
        if !seen.contains(&set.name.as_str()) {
            seen.push(&set.name);
            let _ = writeln!(s, "    axis {}: {}", set.name, set.citation);
        }
    }
    s
}

pub fn jsa_report(
    jsa: &JointSpectralAmplitude,
    rho: f64,
    schmidt: &SchmidtResult,
    autocorr: (f64, f64),
    omega_c: f64,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "joint spectral amplitude");
    let _ = writeln!(
        s,
        "  grid                     {} x {} points, half-span {:.6e} rad/s, step {:.6e} rad/s",
        jsa.grid.n,
        jsa.grid.n,
        jsa.grid.half_span,
        jsa.step()
    );
    let _ = writeln!(
        s,
        "  normalization            {:.12e} (target 1)",
        jsa.total_probability()
    );
    let _ = writeln!(s, "  frequency correlation    {rho:+.5}");
    let _ = writeln!(
        s,
        "  schmidt number           {:.4}  (purity {:.4}, mode sum {:.8})",
        schmidt.k,
        schmidt.purity,
        schmidt.coefficients.iter().sum::<f64>()
    );
    let pair = biphoton_coherence_time(omega_c);
    let _ = writeln!(
        s,
        "  marginal autocorrelation {:.1} fs (signal), {:.1} fs (idler)",
        autocorr.0 * 1e15,
        autocorr.1 * 1e15
    );
    let _ = writeln!(
        s,
        "  pair coherence time      {:.4} ps  (ratios {:.2}, {:.2})",
        pair * 1e12,
        pair / autocorr.0,
        pair / autocorr.1
    );
    s
}

pub fn hom_report(
    mode: &str,
    vis: &Visibility,
    fit: &DipFit,
    walkoff_tau_c: f64,
    leakage: Option<(f64, f64)>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "hong-ou-mandel dip ({mode})");
    let _ = writeln!(
        s,
        "  visibility (model-free)  {:.6}  (baseline {:.6}, minimum {:.3e}{})",
        vis.v,
        vis.baseline,
        vis.c_min,
        if vis.degenerate { ", degenerate" } else { "" }
    );
    let unit = match fit.unit {
        AxisUnit::Seconds => "s",
        AxisUnit::Meters => "m",
    };
    let sig = |i: usize| -> String {
        match &fit.sigma {
            Some(v) => format!(" +/- {:.2e}", v[i]),
            None => " +/- n/a".into(),
        }
    };
    let _ = writeln!(s, "  triangular fit:");
    let _ = writeln!(s, "    baseline               {:.6}{}", fit.baseline, sig(0));
    let _ = writeln!(s, "    visibility             {:.6}{}", fit.visibility, sig(1));
    let _ = writeln!(s, "    centre                 {:.6e} {unit}{}", fit.center, sig(2));
    let _ = writeln!(s, "    base width             {:.6e} {unit}{}", fit.width, sig(3));
    let _ = writeln!(
        s,
        "    residual rms           {:.3e}  ({:.3}% of baseline)",
        fit.residual_rms,
        100.0 * fit.residual_rms / fit.baseline
    );
    let tau_dip = dip_width_to_coherence_time(fit.width, fit.unit);
    let _ = writeln!(
        s,
        "  dip correlation time     {:.4} ps  (walk-off value {:.4} ps, ratio {:.4})",
        tau_dip * 1e12,
        walkoff_tau_c * 1e12,
        tau_dip / walkoff_tau_c
    );
    if let Some((eps, adjusted)) = leakage {
        let _ = writeln!(
            s,
            "  leakage adjustment       epsilon {:.4} -> visibility {:.6}",
            eps, adjusted
        );
    }
    s
}

pub fn counts_report(
    cfg: &DetectionConfig,
    rates: &RatesReport,
    inference: Option<(f64, f64)>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "gated coincidence budget");
    let _ = writeln!(
        s,
        "  source pair rate         {:.4e} 1/s; gate {:.1} ns at {:.1} kHz (duty {:.1e})",
        cfg.pair_rate,
        cfg.gate_width * 1e9,
        cfg.gate_rate * 1e-3,
        rates.duty_cycle
    );
    for arm in 0..2 {
        let _ = writeln!(
            s,
            "  arm {}: flux {:.4e} 1/s, singles {:.6e}/gate = {:.2} 1/s, dark {:.2e}/gate ({:.2e} per gate-duty)",
            arm + 1,
            rates.flux[arm],
            rates.p_singles[arm],
            rates.rate_singles[arm],
            rates.p_dark[arm],
            rates.p_dark_per_duty[arm]
        );
    }
    let _ = writeln!(
        s,
        "  true pairs               {:.6e}/gate = {:.4} 1/s",
        rates.p_true_pair, rates.rate_true_pairs
    );
    let _ = writeln!(
        s,
        "  accidentals ({:.1} ns)     {:.6e}/gate = {:.4e} 1/s",
        cfg.coincidence_window * 1e9,
        rates.p_accidental,
        rates.rate_accidentals
    );
    if let Some((measured, inferred)) = inference {
        let _ = writeln!(
            s,
            "  inference                {:.4} 1/s measured -> {:.4e} pairs/s at the source",
            measured, inferred
        );
    }
    s
}

/// Write a CSV file: a header line, then one comma-separated row per item.
pub fn write_csv_rows<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let fail = |e: std::io::Error| Error::io(path, e);
    writeln!(out, "{header}").map_err(fail)?;
    for row in rows {
        let mut line = String::with_capacity(row.len() * 24);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let _ = write!(line, "{v:.16e}");
        }
        writeln!(out, "{line}").map_err(fail)?;
    }
    out.flush().map_err(fail)
}

// --- minimal JSON encoding ---------------------------------------------------

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn json_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        "null".into()
    }
}

pub fn json_bool(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}

pub fn json_object(fields: &[(&str, String)]) -> String {
    let mut out = String::from("{");
    for (i, (k, v)) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&json_string(k));
        out.push(':');
        out.push_str(v);
    }
    out.push('}');
    out
}

pub fn json_array(items: &[String]) -> String {
    let mut out = String::from("[");
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(v);
    }
    out.push(']');
    out
}
