//! Command-line interface.
//!
//! Parsing is deliberately plain: one subcommand followed by `--flag value`
//! pairs. Unknown flags are configuration errors (exit code 2); physics and
//! numerical failures exit with code 1.

use crate::config::RunConfig;
use crate::counts::{coincidence_rates, infer_pair_rate};
use crate::dispersion::{delta_lambda_from_delta_omega, omega_from_lambda, SellmeierSet};
use crate::error::{Error, Result};
use crate::hom::{
    cw_hom_curve, default_cw_delays, default_pulsed_delays, dip_width_to_coherence_time,
    fit_triangular_dip, hom_coincidence_curve, leakage_adjusted_visibility, visibility, HomCurve,
};
use crate::jsa::{
    default_grid, frequency_correlation, joint_spectral_amplitude, schmidt_decompose, PumpSpec,
};
use crate::phasematch::{biphoton_coherence_time, solve_epm_point, CrystalSpec, EpmSolution};
use crate::report;
use std::path::PathBuf;

const USAGE: &str = "\
usage: epmspdc <command> [options]

commands:
  dispersion   refractive index and group properties at given wavelengths
  epm          solve the extended-phase-matching operating point
  jsa          joint spectral amplitude and entanglement measures
  hom          hong-ou-mandel dip (cw or pulsed)
  counts       gated singles/coincidence budget
  reproduce    run the built-in acceptance checks (exit 0 only if all pass)

options:
  --config PATH         run configuration (default: built-in values)
  --out PATH            write the primary curve/grid as CSV
  --json                machine-readable summary instead of the text report
  --grid-n N            frequency grid size, power of two >= 16 (default 512)
  --span FACTOR         grid half-span in units of max(pump width, pair
                        bandwidth) (default 4)
  --mode cw|pulsed      interference mode for `hom` (default cw)
  --leakage EPS         apply a leakage fraction to the fitted visibility
  --lambdas NM[,NM...]  wavelengths for `dispersion`
  --infer RATE          `counts`: infer the source pair rate from a measured
                        coincidence rate (1/s)
  --pump-offset-nm X    shift the pump centre wavelength
  --pump-fwhm-nm X      override the pulsed pump bandwidth
  --grating-offset-um X perturb the grating period actually installed
  --seed N              reserved for sampling extensions; all current
                        outputs are deterministic
";

#[derive(Debug, Clone)]
struct Options {
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    json: bool,
    grid_n: usize,
    span: f64,
    mode: Mode,
    leakage: Option<f64>,
    lambdas: Option<Vec<f64>>,
    infer: Option<f64>,
    pump_offset_nm: f64,
    pump_fwhm_nm: Option<f64>,
    grating_offset_um: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Cw,
    Pulsed,
}

impl Options {
    fn parse(args: &[String]) -> Result<Options> {
        let mut opts = Options {
            config: None,
            out: None,
            json: false,
            grid_n: 512,
            span: 4.0,
            mode: Mode::Cw,
            leakage: None,
            lambdas: None,
            infer: None,
            pump_offset_nm: 0.0,
            pump_fwhm_nm: None,
            grating_offset_um: 0.0,
        };
        let mut it = args.iter();
        while let Some(flag) = it.next() {
            let mut value = || {
                it.next()
                    .ok_or_else(|| Error::Config(format!("flag {flag} needs a value")))
            };
            match flag.as_str() {
                "--config" => opts.config = Some(PathBuf::from(value()?)),
                "--out" => opts.out = Some(PathBuf::from(value()?)),
                "--json" => opts.json = true,
                "--grid-n" => opts.grid_n = parse_num(flag, value()?)?,
                "--span" => opts.span = parse_num(flag, value()?)?,
                "--mode" => {
                    opts.mode = match value()?.as_str() {
                        "cw" => Mode::Cw,
                        "pulsed" => Mode::Pulsed,
                        other => {
                            return Err(Error::Config(format!(
                                "--mode must be cw or pulsed, got '{other}'"
                            )))
                        }
                    }
                }
                "--leakage" => opts.leakage = Some(parse_num(flag, value()?)?),
                "--lambdas" => {
                    let list = value()?;
                    let mut v = Vec::new();
                    for part in list.split(',') {
                        v.push(parse_num::<f64>(flag, part)?);
                    }
                    opts.lambdas = Some(v);
                }
                "--infer" => opts.infer = Some(parse_num(flag, value()?)?),
                "--pump-offset-nm" => opts.pump_offset_nm = parse_num(flag, value()?)?,
                "--pump-fwhm-nm" => opts.pump_fwhm_nm = Some(parse_num(flag, value()?)?),
                "--grating-offset-um" => opts.grating_offset_um = parse_num(flag, value()?)?,
                "--seed" => {
                    let _: u64 = parse_num(flag, value()?)?;
                }
                other => {
                    return Err(Error::Config(format!(
                        "unknown flag '{other}' (see --help)"
                    )))
                }
            }
        }
        if !(opts.span > 0.0) {
            return Err(Error::Config(format!(
                "--span must be positive, got {}",
                opts.span
            )));
        }
        Ok(opts)
    }
}

fn parse_num<T: std::str::FromStr>(flag: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::Config(format!("flag {flag}: cannot parse '{raw}'")))
}

/// Entry point; returns the process exit code.
pub fn run(args: &[String]) -> Result<i32> {
    let cmd = match args.first() {
        None => {
            eprintln!("{USAGE}");
            return Ok(crate::error::EXIT_CONFIG);
        }
        Some(c) => c.as_str(),
    };
    if cmd == "--help" || cmd == "-h" || cmd == "help" {
        println!("{USAGE}");
        return Ok(0);
    }
    let opts = Options::parse(&args[1..])?;
    let cfg = match &opts.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::builtin_default(),
    };
    match cmd {
        "dispersion" => cmd_dispersion(&cfg, &opts)?,
        "epm" => cmd_epm(&cfg, &opts)?,
        "jsa" => cmd_jsa(&cfg, &opts)?,
        "hom" => cmd_hom(&cfg, &opts)?,
        "counts" => cmd_counts(&cfg, &opts)?,
        "reproduce" => return cmd_reproduce(&cfg, &opts),
        other => {
            return Err(Error::Config(format!(
                "unknown command '{other}' (see --help)"
            )))
        }
    }
    Ok(0)
}

/// Solve the operating point and install the grating actually used
/// downstream: the configured one if pinned, otherwise the solved one, plus
/// any commanded period offset.
fn solved_crystal(cfg: &RunConfig, opts: &Options) -> Result<(CrystalSpec, EpmSolution)> {
    let sol = solve_epm_point(&cfg.crystal, cfg.epm_search.0, cfg.epm_search.1)?;
    let mut poling = cfg.crystal.poling.unwrap_or(sol.poling);
    poling.period += opts.grating_offset_um * 1e-6;
    if !(poling.period > 0.0) {
        return Err(Error::Config(format!(
            "grating offset drives the period non-positive ({} m)",
            poling.period
        )));
    }
    let mut crystal = cfg.crystal.clone();
    crystal.poling = Some(poling);
    Ok((crystal, sol))
}

fn effective_pulsed_pump(cfg: &RunConfig, opts: &Options) -> Result<PumpSpec> {
    let (mut lambda, mut fwhm) = match cfg.pump_pulsed {
        PumpSpec::Pulsed { lambda, fwhm } => (lambda, fwhm),
        PumpSpec::Cw { .. } => {
            return Err(Error::Config("configuration lacks a pulsed pump".into()))
        }
    };
    lambda += opts.pump_offset_nm * 1e-9;
    if let Some(nm) = opts.pump_fwhm_nm {
        fwhm = nm * 1e-9;
    }
    let pump = PumpSpec::Pulsed { lambda, fwhm };
    pump.validate()?;
    Ok(pump)
}

fn unique_axes(crystal: &CrystalSpec) -> Vec<&SellmeierSet> {
    let mut axes: Vec<&SellmeierSet> = Vec::new();
    for set in [&crystal.pump, &crystal.signal, &crystal.idler] {
        if !axes.iter().any(|a| a.name == set.name) {
            axes.push(set);
        }
    }
    axes
}

fn cmd_dispersion(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let lambdas_nm = match &opts.lambdas {
        Some(v) => v.clone(),
        None => vec![
            cfg.pump_cw.lambda() * 1e9,
            2.0 * cfg.pump_cw.lambda() * 1e9,
        ],
    };
    let axes = unique_axes(&cfg.crystal);
    let mut json_rows = Vec::new();
    let mut csv_rows = Vec::new();
    let mut text = String::new();
    for &nm in &lambdas_nm {
        let w = omega_from_lambda(nm * 1e-9);
        text.push_str(&format!("dispersion at {nm:.4} nm\n"));
        let mut row = vec![nm];
        for set in &axes {
            let n = set.index(w)?;
            let ng = set.group_index(w)?;
            let kp = set.k_prime(w)?;
            let kpp = set.k_double_prime(w)?;
            text.push_str(&format!(
                "  axis {}: n = {:.8}, group index = {:.8}, k' = {:.8e} s/m, k'' = {:.8e} s^2/m\n",
                set.name, n, ng, kp, kpp
            ));
            row.extend_from_slice(&[n, ng, kp, kpp]);
            json_rows.push(report::json_object(&[
                ("lambda_nm", report::json_number(nm)),
                ("axis", report::json_string(&set.name)),
                ("n", report::json_number(n)),
                ("group_index", report::json_number(ng)),
                ("k_prime_s_per_m", report::json_number(kp)),
                ("k_double_prime_s2_per_m", report::json_number(kpp)),
            ]));
        }
        csv_rows.push(row);
    }
    for set in &axes {
        text.push_str(&format!("  axis {}: {}\n", set.name, set.citation));
    }
    if let Some(path) = &opts.out {
        let mut header = String::from("lambda_nm");
        for set in &axes {
            let a = &set.name;
            header.push_str(&format!(
                ",n_{a},group_index_{a},k_prime_{a}_s_per_m,k_double_prime_{a}_s2_per_m"
            ));
        }
        report::write_csv_rows(path, &header, csv_rows)?;
    }
    if opts.json {
        println!("{}", report::json_array(&json_rows));
    } else {
        print!("{text}");
    }
    Ok(())
}

fn cmd_epm(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let sol = solve_epm_point(&cfg.crystal, cfg.epm_search.0, cfg.epm_search.1)?;
    if let Some(path) = &opts.out {
        // Slope scan across the search range; the sign change marks the
        // operating point.
        let (lo, hi) = cfg.epm_search;
        let rows: Result<Vec<Vec<f64>>> = crate::jsa::linspace(lo, hi, 201)
            .iter()
            .map(|&lam| {
                let slope = cfg.crystal.epm_slope(omega_from_lambda(lam))?;
                Ok(vec![lam * 1e9, slope])
            })
            .collect();
        report::write_csv_rows(path, "pump_lambda_nm,group_slowness_mismatch_s_per_m", rows?)?;
    }
    if opts.json {
        let regime = cfg
            .pump_pulsed
            .fwhm_omega()
            .map(|w| crate::phasematch::regime_check(sol.omega_c, w, sol.omega_epm, 2.0));
        println!(
            "{}",
            report::json_object(&[
                ("lambda_p_nm", report::json_number(sol.lambda_p * 1e9)),
                ("period_um", report::json_number(sol.poling.period * 1e6)),
                ("grating_sign", report::json_number(sol.poling.sign)),
                ("walkoff_ps", report::json_number(sol.walkoff * 1e12)),
                ("tau_c_ps", report::json_number(sol.tau_c * 1e12)),
                ("omega_c_rad_per_s", report::json_number(sol.omega_c)),
                (
                    "omega_c_sinc_fwhm_rad_per_s",
                    report::json_number(sol.omega_c_sinc_fwhm),
                ),
                ("omega_epm_rad_per_s", report::json_number(sol.omega_epm)),
                (
                    "regime",
                    match regime {
                        Ok(r) => report::json_string(&r.to_string()),
                        Err(_) => "null".into(),
                    },
                ),
            ])
        );
    } else {
        print!("{}", report::epm_report(cfg, &sol));
    }
    Ok(())
}

fn cmd_jsa(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let (crystal, sol) = solved_crystal(cfg, opts)?;
    let pump = effective_pulsed_pump(cfg, opts)?;
    let grid = default_grid(&crystal, &pump, opts.grid_n, opts.span)?;
    let jsa = joint_spectral_amplitude(&crystal, &pump, &grid)?;
    let rho = frequency_correlation(&jsa);
    let schmidt = schmidt_decompose(&jsa)?;
    let (ms, mi) = jsa.marginal_spectra();
    let axis = jsa.axis();
    let t_s = crate::hom::field_autocorrelation_coherence_time(&axis, &ms)?;
    let t_i = crate::hom::field_autocorrelation_coherence_time(&axis, &mi)?;
    if let Some(path) = &opts.out {
        let n = jsa.grid.n;
        let rows = (0..n * n).map(|idx| {
            let j = idx / n;
            let k = idx % n;
            let z = jsa.a[(j, k)];
            vec![axis[j], axis[k], z.re, z.im]
        });
        report::write_csv_rows(
            path,
            "omega_s_rad_per_s,omega_i_rad_per_s,amplitude_re,amplitude_im",
            rows,
        )?;
    }
    if opts.json {
        println!(
            "{}",
            report::json_object(&[
                ("grid_n", report::json_number(jsa.grid.n as f64)),
                ("half_span_rad_per_s", report::json_number(jsa.grid.half_span)),
                ("frequency_correlation", report::json_number(rho)),
                ("schmidt_number", report::json_number(schmidt.k)),
                ("purity", report::json_number(schmidt.purity)),
                ("autocorr_signal_s", report::json_number(t_s)),
                ("autocorr_idler_s", report::json_number(t_i)),
                (
                    "pair_coherence_time_s",
                    report::json_number(biphoton_coherence_time(sol.omega_c)),
                ),
            ])
        );
    } else {
        print!(
            "{}",
            report::jsa_report(&jsa, rho, &schmidt, (t_s, t_i), sol.omega_c)
        );
    }
    Ok(())
}

fn cmd_hom(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let (crystal, sol) = solved_crystal(cfg, opts)?;
    let (mode, curve): (&str, HomCurve) = match opts.mode {
        Mode::Cw => {
            let lambda = cfg.pump_cw.lambda() + opts.pump_offset_nm * 1e-9;
            ("cw", cw_hom_curve(&crystal, lambda, &default_cw_delays())?)
        }
        Mode::Pulsed => {
            let pump = effective_pulsed_pump(cfg, opts)?;
            let grid = default_grid(&crystal, &pump, opts.grid_n, opts.span)?;
            let jsa = joint_spectral_amplitude(&crystal, &pump, &grid)?;
            (
                "pulsed",
                hom_coincidence_curve(&jsa, &default_pulsed_delays(sol.walkoff))?,
            )
        }
    };
    let vis = visibility(&curve.c)?;
    let fit = fit_triangular_dip(&curve.delays, &curve.c, curve.unit)?;
    let leakage = match opts.leakage {
        Some(eps) => Some((
            eps,
            leakage_adjusted_visibility(fit.visibility.clamp(0.0, 1.0), eps)?,
        )),
        None => None,
    };
    if let Some(path) = &opts.out {
        let rows = curve
            .delays
            .iter()
            .zip(&curve.c)
            .map(|(&d, &c)| vec![d, c])
            .collect::<Vec<_>>();
        report::write_csv_rows(path, "delay_s,coincidence_probability", rows)?;
    }
    if opts.json {
        let mut fields = vec![
            ("mode", report::json_string(mode)),
            ("visibility", report::json_number(vis.v)),
            ("baseline", report::json_number(vis.baseline)),
            ("fit_baseline", report::json_number(fit.baseline)),
            ("fit_visibility", report::json_number(fit.visibility)),
            ("fit_center_s", report::json_number(fit.center)),
            ("fit_width_s", report::json_number(fit.width)),
            ("fit_residual_rms", report::json_number(fit.residual_rms)),
            (
                "dip_tau_c_s",
                report::json_number(dip_width_to_coherence_time(fit.width, fit.unit)),
            ),
            ("walkoff_tau_c_s", report::json_number(sol.tau_c)),
        ];
        if let Some((eps, adj)) = leakage {
            fields.push(("leakage", report::json_number(eps)));
            fields.push(("leakage_adjusted_visibility", report::json_number(adj)));
        }
        println!("{}", report::json_object(&fields));
    } else {
        print!("{}", report::hom_report(mode, &vis, &fit, sol.tau_c, leakage));
    }
    Ok(())
}

fn cmd_counts(cfg: &RunConfig, opts: &Options) -> Result<()> {
    let rates = coincidence_rates(&cfg.detection)?;
    let inference = match opts.infer {
        Some(rate) => Some((rate, infer_pair_rate(rate, &cfg.detection)?)),
        None => None,
    };
    if let Some(path) = &opts.out {
        report::write_csv_rows(
            path,
            "p_singles_1,p_singles_2,p_true_pair,p_accidental,rate_singles_1,rate_singles_2,rate_true_pairs,rate_accidentals",
            vec![vec![
                rates.p_singles[0],
                rates.p_singles[1],
                rates.p_true_pair,
                rates.p_accidental,
                rates.rate_singles[0],
                rates.rate_singles[1],
                rates.rate_true_pairs,
                rates.rate_accidentals,
            ]],
        )?;
    }
    if opts.json {
        let mut fields = vec![
            (
                "p_singles",
                report::json_array(&[
                    report::json_number(rates.p_singles[0]),
                    report::json_number(rates.p_singles[1]),
                ]),
            ),
            (
                "rate_singles",
                report::json_array(&[
                    report::json_number(rates.rate_singles[0]),
                    report::json_number(rates.rate_singles[1]),
                ]),
            ),
            ("p_true_pair", report::json_number(rates.p_true_pair)),
            ("p_accidental", report::json_number(rates.p_accidental)),
            ("rate_true_pairs", report::json_number(rates.rate_true_pairs)),
            ("rate_accidentals", report::json_number(rates.rate_accidentals)),
            ("duty_cycle", report::json_number(rates.duty_cycle)),
        ];
        if let Some((measured, inferred)) = inference {
            fields.push(("measured_rate", report::json_number(measured)));
            fields.push(("inferred_pair_rate", report::json_number(inferred)));
        }
        println!("{}", report::json_object(&fields));
    } else {
        print!("{}", report::counts_report(&cfg.detection, &rates, inference));
    }
    Ok(())
}

struct Criterion {
    index: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn criterion(index: usize, name: &'static str, pass: bool, detail: String) -> Criterion {
    Criterion {
        index,
        name,
        pass,
        detail,
    }
}

fn nm_width(delta_omega: f64, carrier_m: f64) -> f64 {
    delta_lambda_from_delta_omega(delta_omega, carrier_m) * 1e9
}

fn cmd_reproduce(cfg: &RunConfig, opts: &Options) -> Result<i32> {
    let mut rows: Vec<Criterion> = Vec::new();
    let (crystal, sol) = solved_crystal(cfg, opts)?;

    // 1: operating point lands in the expected window.
    let lam_nm = sol.lambda_p * 1e9;
    let per_um = sol.poling.period * 1e6;
    rows.push(criterion(
        1,
        "operating point",
        (782.0..=802.0).contains(&lam_nm) && (45.15..=47.15).contains(&per_um),
        format!("lambda_p {lam_nm:.4} nm, period {per_um:.6} um"),
    ));

    // cw dip, shared by criteria 2 and 4.
    let cw = cw_hom_curve(&crystal, cfg.pump_cw.lambda(), &default_cw_delays())?;
    let cw_fit = fit_triangular_dip(&cw.delays, &cw.c, cw.unit);
    let cw_tau = cw_fit
        .as_ref()
        .map(|f| dip_width_to_coherence_time(f.width, f.unit));

    // 2: pair correlation time, and the cw dip confirms it.
    let tau_ps = sol.tau_c * 1e12;
    let in_window = (1.42 * 0.8..=1.42 * 1.2).contains(&tau_ps);
    let (agree, agree_detail) = match &cw_tau {
        Ok(t) => (
            (t / sol.tau_c - 1.0).abs() <= 0.05,
            format!("cw dip ratio {:.4}", t / sol.tau_c),
        ),
        Err(e) => (false, format!("cw fit failed: {e}")),
    };
    rows.push(criterion(
        2,
        "pair correlation time",
        in_window && agree,
        format!("tau_c {tau_ps:.4} ps, {agree_detail}"),
    ));

    // 3: pump acceptance bandwidth at the degenerate fundamental.
    let epm_nm = nm_width(sol.omega_epm / 2.0, 2.0 * sol.lambda_p);
    rows.push(criterion(
        3,
        "pump acceptance bandwidth",
        (epm_nm / 67.0 - 1.0).abs() <= 0.40,
        format!("{epm_nm:.2} nm vs 67 nm reference"),
    ));

    // 4: cw dip shape, depth, and leakage arithmetic.
    let c4 = match &cw_fit {
        Ok(fit) => {
            let rms_ok = fit.residual_rms / fit.baseline < 0.02;
            let v_ok = (fit.visibility - 1.0).abs() <= 0.01;
            let adj = leakage_adjusted_visibility(fit.visibility.clamp(0.0, 1.0), 0.01)?;
            let leak_ok = (adj - 0.98).abs() <= 0.002;
            criterion(
                4,
                "cw dip",
                rms_ok && v_ok && leak_ok,
                format!(
                    "V {:.4}, rms/baseline {:.3}%, leakage-adjusted {:.4}",
                    fit.visibility,
                    100.0 * fit.residual_rms / fit.baseline,
                    adj
                ),
            )
        }
        Err(e) => criterion(4, "cw dip", false, format!("fit failed: {e}")),
    };
    rows.push(c4);

    // Pulsed state, shared by criteria 5-7.
    let pump = effective_pulsed_pump(cfg, opts)?;
    let grid = default_grid(&crystal, &pump, opts.grid_n, opts.span)?;
    let jsa = joint_spectral_amplitude(&crystal, &pump, &grid)?;
    let pulsed = hom_coincidence_curve(&jsa, &default_pulsed_delays(sol.walkoff))?;
    let p_vis = visibility(&pulsed.c)?;

    // 5: pulsed dip depth and width consistency against the cw dip.
    let c5 = {
        let v_ok = p_vis.v >= 0.90;
        let widths = fit_triangular_dip(&pulsed.delays, &pulsed.c, pulsed.unit)
            .map(|fit| dip_width_to_coherence_time(fit.width, fit.unit));
        match (widths, &cw_tau) {
            (Ok(tau), Ok(cw_t)) => {
                let w_ok = (tau / cw_t - 1.0).abs() <= 0.15;
                criterion(
                    5,
                    "pulsed dip",
                    v_ok && w_ok,
                    format!("V {:.4}, tau ratio to cw {:.4}", p_vis.v, tau / cw_t),
                )
            }
            (Err(e), _) => {
                criterion(5, "pulsed dip", false, format!("V {:.4}; fit failed: {e}", p_vis.v))
            }
            (_, Err(e)) => {
                criterion(5, "pulsed dip", false, format!("V {:.4}; cw fit failed: {e}", p_vis.v))
            }
        }
    };
    rows.push(c5);

    // 6: entanglement measures and their grid stability (same span, grid
    // doubled).
    let rho = frequency_correlation(&jsa);
    let schmidt = schmidt_decompose(&jsa)?;
    let k_fine = schmidt_decompose(&joint_spectral_amplitude(
        &crystal,
        &pump,
        &default_grid(&crystal, &pump, 2 * opts.grid_n, opts.span)?,
    )?)?
    .k;
    let drift = (k_fine - schmidt.k).abs() / k_fine;
    let narrow_pump = PumpSpec::Pulsed {
        lambda: pump.lambda(),
        fwhm: 0.05e-9,
    };
    let narrow_grid = default_grid(&crystal, &narrow_pump, 2048, opts.span)?;
    let rho_narrow =
        frequency_correlation(&joint_spectral_amplitude(&crystal, &narrow_pump, &narrow_grid)?);
    rows.push(criterion(
        6,
        "spectral entanglement",
        rho > 0.5 && schmidt.k > 2.0 && rho_narrow < -0.9 && drift < 0.02,
        format!(
            "rho {rho:+.4}, K {:.4}, narrowband rho {rho_narrow:+.4}, K drift {:.3}%",
            schmidt.k,
            100.0 * drift
        ),
    ));

    // 7: single photons decohere much faster than the pair.
    let (ms, mi) = jsa.marginal_spectra();
    let axis = jsa.axis();
    let t_s = crate::hom::field_autocorrelation_coherence_time(&axis, &ms)?;
    let t_i = crate::hom::field_autocorrelation_coherence_time(&axis, &mi)?;
    let pair = biphoton_coherence_time(sol.omega_c);
    rows.push(criterion(
        7,
        "coherence-time separation",
        pair / t_s > 3.0 && pair / t_i > 3.0,
        format!(
            "pair {:.4} ps vs marginals {:.1}/{:.1} fs (ratios {:.2}/{:.2})",
            pair * 1e12,
            t_s * 1e15,
            t_i * 1e15,
            pair / t_s,
            pair / t_i
        ),
    ));

    // 8: the counting budget reproduces the reference numbers.
    let rates = coincidence_rates(&cfg.detection)?;
    let acc_ok = (rates.p_accidental / 5e-7 - 1.0).abs() <= 0.10;
    let singles_ok = (rates.rate_singles[0] / 115.0 - 1.0).abs() <= 0.01
        && (rates.rate_singles[1] / 125.0 - 1.0).abs() <= 0.01;
    let rate_1_per_s = 2e-5 * cfg.detection.gate_rate;
    let rate_ok = (rate_1_per_s - 1.0).abs() <= 1e-9;
    let nominal = crate::counts::DetectionConfig {
        transmission: [0.195, 0.195],
        ..cfg.detection.clone()
    };
    let inferred = infer_pair_rate(1.0, &nominal)?;
    let infer_ok = inferred / 4.0e6 >= 0.25 && inferred / 4.0e6 <= 4.0;
    rows.push(criterion(
        8,
        "counting budget",
        acc_ok && singles_ok && rate_ok && infer_ok,
        format!(
            "accidentals {:.3e}/gate, singles {:.1}/{:.1} 1/s, inferred source {:.3e} pairs/s",
            rates.p_accidental, rates.rate_singles[0], rates.rate_singles[1], inferred
        ),
    ));

    let all_pass = rows.iter().all(|r| r.pass);
    if opts.json {
        let items: Vec<String> = rows
            .iter()
            .map(|r| {
                report::json_object(&[
                    ("index", r.index.to_string()),
                    ("name", report::json_string(r.name)),
                    ("pass", report::json_bool(r.pass)),
                    ("detail", report::json_string(&r.detail)),
                ])
            })
            .collect();
        println!(
            "{}",
            report::json_object(&[
                ("criteria", report::json_array(&items)),
                ("all_pass", report::json_bool(all_pass)),
            ])
        );
    } else {
        for r in &rows {
            println!(
                "criterion {:<2} {:<26} {}  {}",
                r.index,
                r.name,
                if r.pass { "PASS" } else { "FAIL" },
                r.detail
            );
        }
        println!(
            "{}",
            if all_pass {
                "all criteria passed"
            } else {
                "some criteria FAILED"
            }
        );
    }
    Ok(if all_pass { 0 } else { 1 })
}
