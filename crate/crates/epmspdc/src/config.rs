//! TOML configuration loading.
//!
//! A run configuration is a small file naming four part files (paths are
//! resolved relative to it):
//!
//! ```toml
//! sellmeier = "sellmeier_ktp.toml"
//! crystal = "crystal.toml"
//! pump = "pump.toml"
//! detection = "detection.toml"
//! ```
//!
//! The compiled-in defaults mirror the files shipped under `configs/`, so
//! the tool runs without any configuration present.

use crate::counts::DetectionConfig;
use crate::dispersion::{ktp_y, ktp_z, SellmeierSet};
use crate::error::{Error, Result};
use crate::jsa::PumpSpec;
use crate::phasematch::{CrystalSpec, Poling};
use serde::Deserialize;
use std::path::{Path, PathBuf};

fn nm(x: f64) -> f64 {
    x * 1e-9
}

fn um(x: f64) -> f64 {
    x * 1e-6
}

fn mm(x: f64) -> f64 {
    x * 1e-3
}

fn ns(x: f64) -> f64 {
    x * 1e-9
}

/// A fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub crystal: CrystalSpec,
    pub pump_cw: PumpSpec,
    pub pump_pulsed: PumpSpec,
    pub detection: DetectionConfig,
    /// Pump wavelength bracket for the group-matching search, metres.
    pub epm_search: (f64, f64),
}

impl RunConfig {
    /// The compiled-in configuration: a 10 mm periodically poled KTP crystal
    /// (pump and signal on y, idler on z), a 792 nm cw probe, a 790 nm /
    /// 6 nm pulsed pump, and the reference detection chain.
    pub fn builtin_default() -> RunConfig {
        RunConfig {
            crystal: CrystalSpec {
                length: mm(10.0),
                poling: None,
                qpm_order: 1,
                pump: ktp_y(),
                signal: ktp_y(),
                idler: ktp_z(),
            },
            pump_cw: PumpSpec::Cw { lambda: nm(792.0) },
            pump_pulsed: PumpSpec::Pulsed {
                lambda: nm(790.0),
                fwhm: nm(6.0),
            },
            detection: DetectionConfig {
                pair_rate: 4.0e6,
                transmission: [0.17983, 0.13035],
                efficiency: [0.16, 0.24],
                dark_rate: [40.0, 20.0],
                gate_width: ns(20.0),
                gate_rate: 50.0e3,
                coincidence_window: ns(1.8),
            },
            epm_search: (nm(750.0), nm(850.0)),
        }
    }

    /// Load a run configuration and all part files it references.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let run: RunFile = parse(&read(path)?, path)?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let sell_path = resolve(dir, &run.sellmeier);
        let crystal_path = resolve(dir, &run.crystal);
        let pump_path = resolve(dir, &run.pump);
        let detection_path = resolve(dir, &run.detection);

        let sets = sellmeier_from_str(&read(&sell_path)?, &sell_path)?;
        let (crystal, epm_search) =
            crystal_from_str(&read(&crystal_path)?, &crystal_path, &sets)?;
        let (pump_cw, pump_pulsed) = pump_from_str(&read(&pump_path)?, &pump_path)?;
        let detection = detection_from_str(&read(&detection_path)?, &detection_path)?;

        let config = RunConfig {
            crystal,
            pump_cw,
            pump_pulsed,
            detection,
            epm_search,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.crystal.validate()?;
        self.pump_cw.validate()?;
        self.pump_pulsed.validate()?;
        self.detection.validate()?;
        let (lo, hi) = self.epm_search;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Config(format!(
                "pump search range [{lo}, {hi}] m is invalid"
            )));
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn resolve(dir: &Path, name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    sellmeier: String,
    crystal: String,
    pump: String,
    detection: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SellmeierFile {
    set: Vec<SellmeierEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SellmeierEntry {
    name: String,
    a: f64,
    b: Vec<f64>,
    c: Vec<f64>,
    d: f64,
    lambda_range_um: [f64; 2],
    citation: String,
}

pub(crate) fn sellmeier_from_str(text: &str, path: &Path) -> Result<Vec<SellmeierSet>> {
    let file: SellmeierFile = parse(text, path)?;
    file.set
        .iter()
        .map(|e| {
            SellmeierSet::new(
                &e.name,
                e.a,
                &e.b,
                &e.c,
                e.d,
                (e.lambda_range_um[0], e.lambda_range_um[1]),
                &e.citation,
            )
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CrystalFile {
    length_mm: f64,
    qpm_order: u32,
    pump_axis: String,
    signal_axis: String,
    idler_axis: String,
    /// Optional fixed grating; omit to solve for the group-matched period.
    period_um: Option<f64>,
    /// Orientation of the compensated bulk mismatch; -1 when the grating
    /// vector adds to the pump-deficient mismatch (the shipped material).
    grating_sign: Option<f64>,
    epm_search_nm: [f64; 2],
}

pub(crate) fn crystal_from_str(
    text: &str,
    path: &Path,
    sets: &[SellmeierSet],
) -> Result<(CrystalSpec, (f64, f64))> {
    let file: CrystalFile = parse(text, path)?;
    let axis = |name: &str| -> Result<SellmeierSet> {
        sets.iter()
            .find(|s| s.name == name)
            .cloned()
            .ok_or_else(|| {
                Error::Config(format!(
                    "{}: axis '{name}' is not defined in the sellmeier file",
                    path.display()
                ))
            })
    };
    let crystal = CrystalSpec {
        length: mm(file.length_mm),
        poling: file.period_um.map(|p| Poling {
            period: um(p),
            sign: file.grating_sign.unwrap_or(-1.0),
        }),
        qpm_order: file.qpm_order,
        pump: axis(&file.pump_axis)?,
        signal: axis(&file.signal_axis)?,
        idler: axis(&file.idler_axis)?,
    };
    let search = (nm(file.epm_search_nm[0]), nm(file.epm_search_nm[1]));
    Ok((crystal, search))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PumpFile {
    cw: CwPump,
    pulsed: PulsedPump,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CwPump {
    wavelength_nm: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PulsedPump {
    wavelength_nm: f64,
    fwhm_nm: f64,
}

pub(crate) fn pump_from_str(text: &str, path: &Path) -> Result<(PumpSpec, PumpSpec)> {
    let file: PumpFile = parse(text, path)?;
    Ok((
        PumpSpec::Cw {
            lambda: nm(file.cw.wavelength_nm),
        },
        PumpSpec::Pulsed {
            lambda: nm(file.pulsed.wavelength_nm),
            fwhm: nm(file.pulsed.fwhm_nm),
        },
    ))
}

/// One value applied to both arms, or one value per arm.
#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrTwo {
    One(f64),
    Two([f64; 2]),
}

impl OneOrTwo {
    fn pair(&self) -> [f64; 2] {
        match self {
            OneOrTwo::One(v) => [*v, *v],
            OneOrTwo::Two(p) => *p,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectionFile {
    pair_rate: f64,
    transmission: OneOrTwo,
    efficiency: OneOrTwo,
    dark_rate: OneOrTwo,
    gate_width_ns: f64,
    gate_rate_hz: f64,
    coincidence_window_ns: f64,
}

pub(crate) fn detection_from_str(text: &str, path: &Path) -> Result<DetectionConfig> {
    let file: DetectionFile = parse(text, path)?;
    Ok(DetectionConfig {
        pair_rate: file.pair_rate,
        transmission: file.transmission.pair(),
        efficiency: file.efficiency.pair(),
        dark_rate: file.dark_rate.pair(),
        gate_width: ns(file.gate_width_ns),
        gate_rate: file.gate_rate_hz,
        coincidence_window: ns(file.coincidence_window_ns),
    })
}
