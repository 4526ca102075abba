//! Simulation configuration: a strict, line-oriented key-value format with
//! explicit unit tags, plus the bundled presets.
//!
//! Every physical quantity carries a unit suffix checked against the
//! declared unit system (`MPa` or `uN/mm2`, both with ug, mm, days).
//! Unknown keys are rejected with their location so misspelled physics
//! switches cannot be silently ignored. See `docs/config.md`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::GnrError;
use crate::fem::solve::Stepping;
use crate::material::MaterialParams;
use crate::scenario::{CruciformDivisions, FiberInit, FiberPlane};

/// Which experiment the config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Strip,
    Cruciform,
    MaterialPoint,
}

/// Stress unit of the run; lengths are mm, masses ug, times days.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSystem {
    /// MPa stress unit (1 MPa mm^3 = 1e-3 J).
    MPa,
    /// uN/mm^2 stress unit (1 uN/mm^2 mm^3 = 1e-9 J).
    MicroNewton,
}

impl UnitSystem {
    pub fn stress_tag(&self) -> &'static str {
        match self {
            UnitSystem::MPa => "MPa",
            UnitSystem::MicroNewton => "uN/mm2",
        }
    }

    /// Scale applied to psi_co/rho before comparison against psi_crit.
    /// The specific energy is kept in (stress unit x mm^3)/ug, the same
    /// convention the source thresholds were fitted in, so the scale is 1
    /// for both systems.
    pub fn energy_per_mass_scale(&self) -> f64 {
        match self {
            UnitSystem::MPa => 1.0,
            UnitSystem::MicroNewton => 1.0,
        }
    }
}

/// Scenario geometry.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryConfig {
    Strip {
        length: f64,
        width: f64,
        thickness: f64,
        nx: usize,
        ny: usize,
        nz: usize,
    },
    Cruciform {
        arm_length: f64,
        arm_width: f64,
        thickness: f64,
        divisions: CruciformDivisions,
    },
    None,
}

/// Day-17-style boundary perturbation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationConfig {
    pub time_days: f64,
    pub fraction: f64,
}

/// Parsed, validated simulation description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub scenario: Scenario,
    pub units: UnitSystem,
    pub geometry: GeometryConfig,
    pub params: MaterialParams,
    pub stepping: Stepping,
    pub fiber: FiberInit,
    pub snapshot_times: Vec<f64>,
    pub vtk_dir: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
    pub perturbation: Option<PerturbationConfig>,
}

pub const PRESET_STRIP: &str = include_str!("../presets/strip_table1.gnr");
pub const PRESET_CRUCIFORM: &str = include_str!("../presets/cruciform_table2.gnr");

/// Look up a bundled preset by name.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "strip_table1" => Some(PRESET_STRIP),
        "cruciform_table2" => Some(PRESET_CRUCIFORM),
        _ => None,
    }
}

struct Entry {
    line: usize,
    col: usize,
    tokens: Vec<String>,
}

struct Doc {
    entries: BTreeMap<String, Entry>,
}

fn err_at(line: usize, col: usize, msg: impl std::fmt::Display) -> GnrError {
    GnrError::Config(format!("line {line}, column {col}: {msg}"))
}

impl Doc {
    fn parse(text: &str) -> Result<Doc, GnrError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            let eq = line.find('=').ok_or_else(|| {
                err_at(line_no, 1, "expected 'key = value', found no '='")
            })?;
            let key = line[..eq].trim();
            let col = raw.find(key).map_or(1, |p| p + 1);
            if key.is_empty() {
                return Err(err_at(line_no, 1, "empty key"));
            }
            let tokens: Vec<String> = line[eq + 1..]
                .split_whitespace()
                .map(str::to_string)
                .collect();
            if tokens.is_empty() {
                return Err(err_at(line_no, col, format!("key '{key}' has no value")));
            }
            if entries
                .insert(
                    key.to_string(),
                    Entry {
                        line: line_no,
                        col,
                        tokens,
                    },
                )
                .is_some()
            {
                return Err(err_at(line_no, col, format!("duplicate key '{key}'")));
            }
        }
        Ok(Doc { entries })
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Entry, GnrError> {
        self.take(key)
            .ok_or_else(|| GnrError::Config(format!("missing mandatory key '{key}'")))
    }

    fn finish(self) -> Result<(), GnrError> {
        if let Some((key, e)) = self.entries.into_iter().next() {
            return Err(err_at(e.line, e.col, format!("unknown key '{key}'")));
        }
        Ok(())
    }
}

fn one_word(e: &Entry, key: &str) -> Result<String, GnrError> {
    if e.tokens.len() != 1 {
        return Err(err_at(
            e.line,
            e.col,
            format!("key '{key}' expects a single word"),
        ));
    }
    Ok(e.tokens[0].clone())
}

fn number(e: &Entry, key: &str, unit: Option<&str>) -> Result<f64, GnrError> {
    match unit {
        None => {
            if e.tokens.len() != 1 {
                return Err(err_at(
                    e.line,
                    e.col,
                    format!("key '{key}' is dimensionless: expected a bare number"),
                ));
            }
        }
        Some(u) => {
            if e.tokens.len() != 2 {
                return Err(err_at(
                    e.line,
                    e.col,
                    format!("key '{key}' expects '<number> {u}'"),
                ));
            }
            if e.tokens[1] != u {
                return Err(err_at(
                    e.line,
                    e.col,
                    format!("key '{key}': unit mismatch, expected '{u}', got '{}'", e.tokens[1]),
                ));
            }
        }
    }
    e.tokens[0]
        .parse()
        .map_err(|_| err_at(e.line, e.col, format!("key '{key}': bad number '{}'", e.tokens[0])))
}

fn integer(e: &Entry, key: &str) -> Result<u64, GnrError> {
    if e.tokens.len() != 1 {
        return Err(err_at(e.line, e.col, format!("key '{key}' expects one integer")));
    }
    e.tokens[0]
        .parse()
        .map_err(|_| err_at(e.line, e.col, format!("key '{key}': bad integer '{}'", e.tokens[0])))
}

fn number_list(e: &Entry, key: &str, unit: &str) -> Result<Vec<f64>, GnrError> {
    if e.tokens.len() < 2 || e.tokens.last().map(String::as_str) != Some(unit) {
        return Err(err_at(
            e.line,
            e.col,
            format!("key '{key}' expects '<numbers...> {unit}'"),
        ));
    }
    e.tokens[..e.tokens.len() - 1]
        .iter()
        .map(|t| {
            t.parse()
                .map_err(|_| err_at(e.line, e.col, format!("key '{key}': bad number '{t}'")))
        })
        .collect()
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<SimulationConfig, GnrError> {
    let mut doc = Doc::parse(text)?;

    let scenario_entry = doc
        .take("scenario")
        .ok_or_else(|| GnrError::Config("scenario missing".into()))?;
    let scenario = match one_word(&scenario_entry, "scenario")?.as_str() {
        "strip" => Scenario::Strip,
        "cruciform" => Scenario::Cruciform,
        "material_point" => Scenario::MaterialPoint,
        other => {
            return Err(err_at(
                scenario_entry.line,
                scenario_entry.col,
                format!("unknown scenario '{other}' (strip | cruciform | material_point)"),
            ))
        }
    };

    let units_entry = doc.require("units")?;
    let units = match one_word(&units_entry, "units")?.as_str() {
        "MPa" => UnitSystem::MPa,
        "uN/mm2" => UnitSystem::MicroNewton,
        other => {
            return Err(err_at(
                units_entry.line,
                units_entry.col,
                format!("unknown unit system '{other}' (MPa | uN/mm2)"),
            ))
        }
    };
    let stress = units.stress_tag();

    // Geometry.
    let geometry = match scenario {
        Scenario::Strip => {
            let length = number(&doc.require("geometry.length")?, "geometry.length", Some("mm"))?;
            let width = number(&doc.require("geometry.width")?, "geometry.width", Some("mm"))?;
            let thickness = number(
                &doc.require("geometry.thickness")?,
                "geometry.thickness",
                Some("mm"),
            )?;
            let nx = integer(&doc.require("geometry.nx")?, "geometry.nx")? as usize;
            let ny = integer(&doc.require("geometry.ny")?, "geometry.ny")? as usize;
            let nz = integer(&doc.require("geometry.nz")?, "geometry.nz")? as usize;
            if nx == 0 || ny == 0 || nz == 0 {
                return Err(GnrError::Config(
                    "geometry divisions must be at least 1 per axis".into(),
                ));
            }
            GeometryConfig::Strip {
                length,
                width,
                thickness,
                nx,
                ny,
                nz,
            }
        }
        Scenario::Cruciform => {
            let arm_length = number(
                &doc.require("geometry.arm_length")?,
                "geometry.arm_length",
                Some("mm"),
            )?;
            let arm_width = number(
                &doc.require("geometry.arm_width")?,
                "geometry.arm_width",
                Some("mm"),
            )?;
            let thickness = number(
                &doc.require("geometry.thickness")?,
                "geometry.thickness",
                Some("mm"),
            )?;
            let divisions = CruciformDivisions {
                center: integer(&doc.require("geometry.div_center")?, "geometry.div_center")?
                    as usize,
                arm_width: integer(
                    &doc.require("geometry.div_arm_width")?,
                    "geometry.div_arm_width",
                )? as usize,
                arm_length: integer(
                    &doc.require("geometry.div_arm_length")?,
                    "geometry.div_arm_length",
                )? as usize,
                thickness: integer(
                    &doc.require("geometry.div_thickness")?,
                    "geometry.div_thickness",
                )? as usize,
            };
            if divisions.center == 0
                || divisions.arm_width == 0
                || divisions.arm_length == 0
                || divisions.thickness == 0
            {
                return Err(GnrError::Config(
                    "geometry divisions must be at least 1 per axis".into(),
                ));
            }
            GeometryConfig::Cruciform {
                arm_length,
                arm_width,
                thickness,
                divisions,
            }
        }
        Scenario::MaterialPoint => GeometryConfig::None,
    };

    // Material parameters.
    let kappa_entry = doc.require("params.kappa")?;
    let kappa = number(&kappa_entry, "params.kappa", None)?;
    if !(0.0..=1.0 / 3.0).contains(&kappa) {
        return Err(err_at(
            kappa_entry.line,
            kappa_entry.col,
            format!("params.kappa = {kappa} out of range: 0 <= kappa <= 1/3"),
        ));
    }
    let params = MaterialParams {
        lambda: number(&doc.require("params.lambda")?, "params.lambda", Some(stress))?,
        mu: number(&doc.require("params.mu")?, "params.mu", Some(stress))?,
        k1: number(&doc.require("params.k1")?, "params.k1", Some(stress))?,
        k2: number(&doc.require("params.k2")?, "params.k2", None)?,
        kappa,
        sigma_g0: number(
            &doc.require("params.sigma_g0")?,
            "params.sigma_g0",
            Some(stress),
        )?,
        r1: number(&doc.require("params.r1")?, "params.r1", None)?,
        beta_g: number(&doc.require("params.beta_g")?, "params.beta_g", Some(stress))?,
        eta_g: number(&doc.require("params.eta_g")?, "params.eta_g", Some("days"))?,
        eta_s: number(&doc.require("params.eta_s")?, "params.eta_s", Some("days"))?,
        v_g: number(&doc.require("params.v_g")?, "params.v_g", None)?,
        a1: number(&doc.require("params.a1")?, "params.a1", Some("ug/cells"))?,
        tau: number(&doc.require("params.tau")?, "params.tau", Some("days"))?,
        h: number(&doc.require("params.h")?, "params.h", None)?,
        a2: number(&doc.require("params.a2")?, "params.a2", Some("mm3/cells/day"))?,
        psi_crit: number(&doc.require("params.psi_crit")?, "params.psi_crit", Some("J/ug"))?,
        rho_th: number(&doc.require("params.rho_th")?, "params.rho_th", Some("ug/mm3"))?,
        rho_co_f: number(
            &doc.require("params.rho_co_f")?,
            "params.rho_co_f",
            Some("ug/mm3"),
        )?,
        c_cell: number(
            &doc.require("params.c_cell")?,
            "params.c_cell",
            Some("cells/mm3"),
        )?,
        energy_per_mass_scale: units.energy_per_mass_scale(),
        pi_co_mode: Default::default(),
    };
    params.validate()?;

    // Stepping.
    let stepping = Stepping {
        dt_base: number(
            &doc.require("stepping.dt_base")?,
            "stepping.dt_base",
            Some("days"),
        )?,
        dt_max: number(&doc.require("stepping.dt_max")?, "stepping.dt_max", Some("days"))?,
        horizon_days: number(
            &doc.require("stepping.horizon")?,
            "stepping.horizon",
            Some("days"),
        )?,
        event_times: match doc.take("stepping.events") {
            Some(e) => number_list(&e, "stepping.events", "days")?,
            None => Vec::new(),
        },
    };
    if stepping.horizon_days < 0.0 {
        return Err(GnrError::Config("stepping.horizon must be >= 0".into()));
    }
    if !(stepping.dt_base > 0.0 && stepping.dt_max >= stepping.dt_base) {
        return Err(GnrError::Config(
            "stepping requires 0 < dt_base <= dt_max".into(),
        ));
    }

    // Fiber initialization.
    let mode_entry = doc.require("fiber.mode")?;
    let plane_entry = doc.require("fiber.plane")?;
    let plane = match one_word(&plane_entry, "fiber.plane")?.as_str() {
        "xy" => FiberPlane::Xy,
        "xz" => FiberPlane::Xz,
        "yz" => FiberPlane::Yz,
        other => {
            return Err(err_at(
                plane_entry.line,
                plane_entry.col,
                format!("unknown fiber plane '{other}' (xy | xz | yz)"),
            ))
        }
    };
    let fiber = match one_word(&mode_entry, "fiber.mode")?.as_str() {
        "in_plane_uniform" => {
            let seed_entry = doc.take("fiber.seed").ok_or_else(|| {
                err_at(
                    mode_entry.line,
                    mode_entry.col,
                    "fiber.seed is mandatory for mode in_plane_uniform",
                )
            })?;
            FiberInit::InPlaneUniform {
                plane,
                seed: integer(&seed_entry, "fiber.seed")?,
            }
        }
        "fixed_angle" => FiberInit::FixedAngle {
            plane,
            angle_deg: number(&doc.require("fiber.angle")?, "fiber.angle", Some("deg"))?,
        },
        other => {
            return Err(err_at(
                mode_entry.line,
                mode_entry.col,
                format!("unknown fiber mode '{other}' (in_plane_uniform | fixed_angle)"),
            ))
        }
    };

    // Outputs.
    let snapshot_times = match doc.take("output.snapshots") {
        Some(e) => number_list(&e, "output.snapshots", "days")?,
        None => Vec::new(),
    };
    for &t in &snapshot_times {
        if t < 0.0 || t > stepping.horizon_days + 1e-12 {
            return Err(GnrError::Config(format!(
                "snapshot time {t} outside [0, horizon]"
            )));
        }
    }
    let vtk_dir = doc
        .take("output.vtk_dir")
        .map(|e| one_word(&e, "output.vtk_dir").map(PathBuf::from))
        .transpose()?;
    let csv_path = doc
        .take("output.csv")
        .map(|e| one_word(&e, "output.csv").map(PathBuf::from))
        .transpose()?;

    // Optional perturbation.
    let perturbation = match (doc.take("perturbation.time"), doc.take("perturbation.fraction")) {
        (Some(t), Some(f)) => Some(PerturbationConfig {
            time_days: number(&t, "perturbation.time", Some("days"))?,
            fraction: number(&f, "perturbation.fraction", None)?,
        }),
        (None, None) => None,
        _ => {
            return Err(GnrError::Config(
                "perturbation requires both perturbation.time and perturbation.fraction".into(),
            ))
        }
    };
    if let Some(pt) = &perturbation {
        if pt.time_days <= 0.0 || pt.time_days >= stepping.horizon_days {
            return Err(GnrError::Config(format!(
                "perturbation.time {} must lie strictly inside (0, horizon)",
                pt.time_days
            )));
        }
    }

    doc.finish()?;
    Ok(SimulationConfig {
        scenario,
        units,
        geometry,
        params,
        stepping,
        fiber,
        snapshot_times,
        vtk_dir,
        csv_path,
        perturbation,
    })
}

fn fmt_f64(v: f64) -> String {
    // Shortest representation that round-trips.
    let s = format!("{v}");
    if s.parse::<f64>() == Ok(v) {
        s
    } else {
        format!("{v:.17e}")
    }
}

/// Canonical serialization; `parse_config(serialize_config(c)) == c`.
pub fn serialize_config(c: &SimulationConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    kv(
        "scenario",
        match c.scenario {
            Scenario::Strip => "strip",
            Scenario::Cruciform => "cruciform",
            Scenario::MaterialPoint => "material_point",
        }
        .into(),
    );
    kv("units", c.units.stress_tag().into());
    match &c.geometry {
        GeometryConfig::Strip {
            length,
            width,
            thickness,
            nx,
            ny,
            nz,
        } => {
            kv("geometry.length", format!("{} mm", fmt_f64(*length)));
            kv("geometry.width", format!("{} mm", fmt_f64(*width)));
            kv("geometry.thickness", format!("{} mm", fmt_f64(*thickness)));
            kv("geometry.nx", nx.to_string());
            kv("geometry.ny", ny.to_string());
            kv("geometry.nz", nz.to_string());
        }
        GeometryConfig::Cruciform {
            arm_length,
            arm_width,
            thickness,
            divisions,
        } => {
            kv("geometry.arm_length", format!("{} mm", fmt_f64(*arm_length)));
            kv("geometry.arm_width", format!("{} mm", fmt_f64(*arm_width)));
            kv("geometry.thickness", format!("{} mm", fmt_f64(*thickness)));
            kv("geometry.div_center", divisions.center.to_string());
            kv("geometry.div_arm_width", divisions.arm_width.to_string());
            kv("geometry.div_arm_length", divisions.arm_length.to_string());
            kv("geometry.div_thickness", divisions.thickness.to_string());
        }
        GeometryConfig::None => {}
    }
    let stress = c.units.stress_tag();
    let p = &c.params;
    kv("params.lambda", format!("{} {stress}", fmt_f64(p.lambda)));
    kv("params.mu", format!("{} {stress}", fmt_f64(p.mu)));
    kv("params.k1", format!("{} {stress}", fmt_f64(p.k1)));
    kv("params.k2", fmt_f64(p.k2));
    kv("params.kappa", fmt_f64(p.kappa));
    kv("params.sigma_g0", format!("{} {stress}", fmt_f64(p.sigma_g0)));
    kv("params.r1", fmt_f64(p.r1));
    kv("params.beta_g", format!("{} {stress}", fmt_f64(p.beta_g)));
    kv("params.eta_g", format!("{} days", fmt_f64(p.eta_g)));
    kv("params.eta_s", format!("{} days", fmt_f64(p.eta_s)));
    kv("params.v_g", fmt_f64(p.v_g));
    kv("params.a1", format!("{} ug/cells", fmt_f64(p.a1)));
    kv("params.tau", format!("{} days", fmt_f64(p.tau)));
    kv("params.h", fmt_f64(p.h));
    kv("params.a2", format!("{} mm3/cells/day", fmt_f64(p.a2)));
    kv("params.psi_crit", format!("{} J/ug", fmt_f64(p.psi_crit)));
    kv("params.rho_th", format!("{} ug/mm3", fmt_f64(p.rho_th)));
    kv("params.rho_co_f", format!("{} ug/mm3", fmt_f64(p.rho_co_f)));
    kv("params.c_cell", format!("{} cells/mm3", fmt_f64(p.c_cell)));
    kv("stepping.dt_base", format!("{} days", fmt_f64(c.stepping.dt_base)));
    kv("stepping.dt_max", format!("{} days", fmt_f64(c.stepping.dt_max)));
    kv(
        "stepping.horizon",
        format!("{} days", fmt_f64(c.stepping.horizon_days)),
    );
    if !c.stepping.event_times.is_empty() {
        let list: Vec<String> = c.stepping.event_times.iter().map(|&t| fmt_f64(t)).collect();
        kv("stepping.events", format!("{} days", list.join(" ")));
    }
    match &c.fiber {
        FiberInit::InPlaneUniform { plane, seed } => {
            kv("fiber.mode", "in_plane_uniform".into());
            kv("fiber.plane", plane_name(*plane).into());
            kv("fiber.seed", seed.to_string());
        }
        FiberInit::FixedAngle { plane, angle_deg } => {
            kv("fiber.mode", "fixed_angle".into());
            kv("fiber.plane", plane_name(*plane).into());
            kv("fiber.angle", format!("{} deg", fmt_f64(*angle_deg)));
        }
    }
    if !c.snapshot_times.is_empty() {
        let list: Vec<String> = c.snapshot_times.iter().map(|&t| fmt_f64(t)).collect();
        kv("output.snapshots", format!("{} days", list.join(" ")));
    }
    if let Some(d) = &c.vtk_dir {
        kv("output.vtk_dir", d.display().to_string());
    }
    if let Some(d) = &c.csv_path {
        kv("output.csv", d.display().to_string());
    }
    if let Some(pt) = &c.perturbation {
        kv("perturbation.time", format!("{} days", fmt_f64(pt.time_days)));
        kv("perturbation.fraction", fmt_f64(pt.fraction));
    }
    out
}

fn plane_name(p: FiberPlane) -> &'static str {
    match p {
        FiberPlane::Xy => "xy",
        FiberPlane::Xz => "xz",
        FiberPlane::Yz => "yz",
    }
}
