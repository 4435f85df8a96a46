//! Run configuration: flags, the optional TOML config file, material
//! presets/files and the length unit table.

use std::fmt;
use std::path::{Path, PathBuf};

use block_casimir::{ExecMode, MaterialModel};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// eV^-1 per micrometre (hbar c = 0.1973 eV um).
pub const INV_EV_PER_UM: f64 = 5.068;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthUnit {
    #[serde(rename = "um")]
    Micrometre,
    #[serde(rename = "inv_eV")]
    InverseEv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Length {
    pub value: f64,
    pub unit: LengthUnit,
    /// The same length in eV^-1.
    pub inv_ev: f64,
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            LengthUnit::Micrometre => write!(f, "{}um", self.value),
            LengthUnit::InverseEv => write!(f, "{}inv_eV", self.value),
        }
    }
}

fn usage(field: &str, reason: impl fmt::Display) -> CliError {
    CliError::Usage(format!("invalid `{field}`: {reason}"))
}

/// Parses `<value><unit>` with unit `um` or `inv_eV`.
pub fn parse_length(field: &str, text: &str) -> Result<Length, CliError> {
    let text = text.trim();
    let (number, unit) = if let Some(v) = text.strip_suffix("um") {
        (v, LengthUnit::Micrometre)
    } else if let Some(v) = text.strip_suffix("inv_eV") {
        (v, LengthUnit::InverseEv)
    } else {
        return Err(usage(field, format!("`{text}` needs a unit suffix, `um` or `inv_eV`")));
    };
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| usage(field, format!("`{number}` is not a number")))?;
    if !(value.is_finite() && value > 0.0) {
        return Err(usage(field, format!("length must be positive, got {value}")));
    }
    let inv_ev = match unit {
        // Integer scaling keeps 0.1, 1 and 10 um on the decimal values 0.5068, 5.068, 50.68.
        LengthUnit::Micrometre => value * (INV_EV_PER_UM * 1000.0) / 1000.0,
        LengthUnit::InverseEv => value,
    };
    Ok(Length { value, unit, inv_ev })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.stop } else { self.start + step * i as f64 })
            .collect()
    }
}

/// Parses `start:stop:count`. Frequency grids must be positive.
pub fn parse_grid(field: &str, text: &str, positive: bool) -> Result<Grid, CliError> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [start, stop, count] = parts[..] else {
        return Err(usage(field, format!("expected start:stop:count, got `{text}`")));
    };
    let number = |s: &str| s.parse::<f64>().map_err(|_| usage(field, format!("`{s}` is not a number")));
    let (start, stop) = (number(start)?, number(stop)?);
    let count: usize = count
        .parse()
        .map_err(|_| usage(field, format!("`{count}` is not a point count")))?;
    if count < 2 {
        return Err(usage(field, "count must be at least 2"));
    }
    if !(start.is_finite() && stop.is_finite() && stop > start) {
        return Err(usage(field, "need finite start < stop"));
    }
    if positive && start <= 0.0 {
        return Err(usage(field, "frequencies must be positive"));
    }
    Ok(Grid { start, stop, count })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Preset name or file path as given.
    pub source: String,
    pub model: MaterialModel,
}

/// A material in the config file: a preset/file name, or inline parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum MaterialEntry {
    Name(String),
    Inline(MaterialModel),
}

pub fn preset(name: &str) -> Option<MaterialModel> {
    match name {
        "gold" => Some(MaterialModel::gold()),
        "dielectric" => Some(MaterialModel::dielectric()),
        "vacuum" => Some(MaterialModel::vacuum()),
        _ => None,
    }
}

fn checked(model: MaterialModel) -> Result<MaterialModel, CliError> {
    model.validate().map_err(|e| usage("material", e))?;
    Ok(model)
}

/// A preset name, or a TOML file with `omega0`, `omega_p`, `gamma` and an
/// optional `[mu]` table (`kind = "lorentz"`).
pub fn load_material(choice: &str, base: Option<&Path>) -> Result<Material, CliError> {
    if let Some(model) = preset(choice) {
        return Ok(Material {
            source: choice.to_string(),
            model,
        });
    }
    let path = match base {
        Some(dir) if Path::new(choice).is_relative() => dir.join(choice),
        _ => PathBuf::from(choice),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| usage("material", format!("not a preset (gold, dielectric, vacuum) and {}: {e}", path.display())))?;
    let model: MaterialModel = toml::from_str(&text).map_err(|e| usage("material", format!("{}: {e}", path.display())))?;
    Ok(Material {
        source: choice.to_string(),
        model: checked(model)?,
    })
}

/// Contents of `--config`. Every key is optional and flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    material: Option<MaterialEntry>,
    length: Option<String>,
    grid: Option<String>,
    #[serde(alias = "tolerance")]
    tol: Option<f64>,
    #[serde(alias = "output")]
    out: Option<PathBuf>,
    format: Option<Format>,
    serial: Option<bool>,
    omega: Option<f64>,
    positions: Option<String>,
    lengths: Option<Vec<String>>,
    cutoff: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<(Self, Option<PathBuf>), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| usage("config", format!("{}: {e}", path.display())))?;
        let config = toml::from_str(&text).map_err(|e| usage("config", format!("{}: {e}", path.display())))?;
        Ok((config, path.parent().map(Path::to_path_buf)))
    }
}

/// Flags shared by every subcommand, before merging with the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Preset (gold, dielectric, vacuum) or material TOML file
    #[arg(long)]
    pub material: Option<String>,
    /// Block length with unit, e.g. 1um or 5.068inv_eV
    #[arg(long)]
    pub length: Option<String>,
    /// Frequency grid start:stop:count in eV
    #[arg(long)]
    pub grid: Option<String>,
    /// Relative quadrature tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file (stdout if absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Evaluate on one thread; output bytes are identical either way
    #[arg(long)]
    pub serial: bool,
    /// TOML file with any of the above keys
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Command-specific flags, merged the same way.
#[derive(Debug, Clone, Default)]
pub struct ExtraArgs {
    pub omega: Option<f64>,
    pub positions: Option<String>,
    pub lengths: Option<String>,
    pub cutoff: Option<f64>,
}

/// Fully resolved configuration, echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub material: Material,
    pub length: Length,
    pub grid: Grid,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub serial: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub positions: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lengths: Option<Vec<Length>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cutoff: Option<f64>,
    /// Set when `verify` runs its default preset pair.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub all_presets: bool,
}

impl RunConfig {
    pub fn mode(&self) -> ExecMode {
        if self.serial {
            ExecMode::Serial
        } else {
            ExecMode::default()
        }
    }

    pub fn resolve(common: &CommonArgs, extra: &ExtraArgs) -> Result<Self, CliError> {
        let (file, base) = match &common.config {
            Some(path) => {
                let (file, base) = FileConfig::load(path)?;
                (file, base)
            }
            None => (FileConfig::default(), None),
        };

        let material_given = common.material.is_some() || file.material.is_some();
        let material = match (&common.material, file.material) {
            (Some(choice), _) => load_material(choice, None)?,
            (None, Some(MaterialEntry::Name(choice))) => load_material(&choice, base.as_deref())?,
            (None, Some(MaterialEntry::Inline(model))) => Material {
                source: "inline".to_string(),
                model: checked(model)?,
            },
            (None, None) => load_material("gold", None)?,
        };

        let length = parse_length("length", common.length.as_deref().or(file.length.as_deref()).unwrap_or("1um"))?;
        let grid = parse_grid("grid", common.grid.as_deref().or(file.grid.as_deref()).unwrap_or("0.1:20:400"), true)?;

        let tolerance = common.tol.or(file.tol).unwrap_or(1e-6);
        if !(tolerance.is_finite() && tolerance > 0.0 && tolerance < 1.0) {
            return Err(usage("tol", format!("must lie in (0, 1), got {tolerance}")));
        }

        let omega = extra.omega.or(file.omega);
        if let Some(w) = omega {
            if !(w.is_finite() && w > 0.0) {
                return Err(usage("omega", format!("must be positive, got {w}")));
            }
        }
        let positions = match extra.positions.as_deref().or(file.positions.as_deref()) {
            Some(text) => Some(parse_grid("positions", text, false)?),
            None => None,
        };
        let lengths = match (&extra.lengths, file.lengths) {
            (Some(list), _) => Some(list.split(',').map(|s| parse_length("lengths", s)).collect::<Result<Vec<_>, _>>()?),
            (None, Some(list)) => Some(list.iter().map(|s| parse_length("lengths", s)).collect::<Result<Vec<_>, _>>()?),
            (None, None) => None,
        };
        if lengths.as_ref().is_some_and(Vec::is_empty) {
            return Err(usage("lengths", "empty list"));
        }
        let cutoff = extra.cutoff.or(file.cutoff);
        if let Some(c) = cutoff {
            if !(c.is_finite() && c > grid.stop) {
                return Err(usage("cutoff", format!("must exceed the grid stop {}, got {c}", grid.stop)));
            }
        }

        Ok(RunConfig {
            material,
            length,
            grid,
            tolerance,
            output: common.out.clone().or(file.out),
            format: common.format.or(file.format).unwrap_or(Format::Csv),
            serial: common.serial || file.serial.unwrap_or(false),
            omega,
            positions,
            lengths,
            cutoff,
            all_presets: !material_given,
        })
    }
}
