//! Run configuration: an optional TOML file, overridden field by field by flags.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use mcshane::{Exact, solve_c, validate_params, Budget, Error, FrickeParams, Real, DEFAULT_PRECISION};
use serde::Deserialize;

/// Invalid input: exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// A number in the config file: strings keep every digit, bare numbers are accepted too.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Num {
    pub fn text(&self) -> String {
        match self {
            Num::Text(s) => s.clone(),
            Num::Int(v) => v.to_string(),
            Num::Float(v) => v.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub params: ParamsSection,
    pub run: RunSection,
    pub scan: ScanSection,
    pub dimension: DimensionSection,
    pub render: RenderSection,
    pub verify: VerifySection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub a: Option<Num>,
    pub b: Option<Num>,
    pub c: Option<Num>,
    pub solve_c: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub precision: Option<u32>,
    pub max_depth: Option<usize>,
    pub max_z: Option<Num>,
    pub max_nodes: Option<usize>,
    pub tol: Option<Num>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub prefix: Option<String>,
    pub block: Option<String>,
    pub iterations: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimensionSection {
    pub depths: Option<Vec<usize>>,
    pub scales: Option<Vec<Num>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderSection {
    /// `[x_min, x_max, y_min, y_max]`.
    pub window: Option<[f64; 4]>,
    pub layers: Option<Vec<String>>,
    pub width_px: Option<f64>,
    pub sagitta_px: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub nodes: Option<usize>,
    pub crossing_nodes: Option<usize>,
    pub layout_depth: Option<usize>,
    pub sum_depth: Option<usize>,
    pub branches: Option<usize>,
}

pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
}

/// Flags shared by every command.
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Fricke parameter a (decimal or p/q).
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long, conflicts_with = "solve_c")]
    pub c: Option<String>,
    /// Derive c as the root below ab/2.
    #[arg(long)]
    pub solve_c: bool,
    /// Working precision in bits for real arithmetic.
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub max_z: Option<String>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub tol: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with [params], [run], [scan], [dimension], [render] and [verify] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Merged common settings.
#[derive(Debug)]
pub struct RunConfig {
    pub a: String,
    pub b: String,
    /// `None` means solve for c.
    pub c: Option<String>,
    pub precision: u32,
    pub budget: Budget,
    /// `max_depth` as given, before the default budget is applied.
    pub explicit_depth: Option<usize>,
    pub tol: String,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub const DEFAULT_DEPTH: usize = 10;
pub const DEFAULT_TOL: &str = "1e-6";

impl RunConfig {
    pub fn resolve(flags: &Common, file: &FileConfig) -> anyhow::Result<Self> {
        let p = &file.params;
        let a = flags.a.clone().or_else(|| p.a.as_ref().map(Num::text));
        let b = flags.b.clone().or_else(|| p.b.as_ref().map(Num::text));
        let (c, solve) = if flags.solve_c {
            (None, true)
        } else if flags.c.is_some() {
            (flags.c.clone(), false)
        } else {
            (p.c.as_ref().map(Num::text), p.solve_c.unwrap_or(false))
        };
        if c.is_some() && solve {
            return Err(bad("[params] sets both c and solve_c; give exactly one"));
        }
        let (a, b, c) = match (a, b) {
            (None, None) if c.is_none() && !solve => ("3".to_string(), "3".to_string(), Some("3".to_string())),
            (Some(a), Some(b)) => {
                if c.is_none() && !solve {
                    return Err(bad("give c or solve_c together with a and b"));
                }
                (a, b, c)
            }
            _ => return Err(bad("a and b must be given together")),
        };
        let r = &file.run;
        let precision = flags.precision.or(r.precision).unwrap_or(DEFAULT_PRECISION);
        if precision < 64 {
            return Err(bad(format!("precision {precision} is below the 64-bit minimum")));
        }
        let mut budget = Budget {
            max_depth: flags.max_depth.or(r.max_depth),
            max_nodes: flags.max_nodes.or(r.max_nodes),
            ..Budget::default()
        };
        if let Some(z) = flags.max_z.clone().or_else(|| r.max_z.as_ref().map(Num::text)) {
            budget = budget.with_max_z(&z)?;
        }
        if budget == Budget::default() {
            budget.max_depth = Some(DEFAULT_DEPTH);
        }
        budget.check()?;
        Ok(RunConfig {
            a,
            b,
            c,
            precision,
            explicit_depth: flags.max_depth.or(r.max_depth),
            budget,
            tol: flags.tol.clone().or_else(|| r.tol.as_ref().map(Num::text)).unwrap_or_else(|| DEFAULT_TOL.into()),
            out: flags.out.clone().or_else(|| r.out.clone()),
            format: flags.format.or(r.format),
        })
    }

    pub fn surface(&self) -> anyhow::Result<Surface> {
        surface(&self.a, &self.b, self.c.as_deref(), self.precision)
    }
}

/// Parameters in the arithmetic they admit.
pub enum Surface {
    Exact(FrickeParams<Exact>),
    Real(FrickeParams<Real>),
}

/// Exact arithmetic when the inputs are rational and satisfy the equation
/// exactly (or c solves exactly); reals at `prec` bits otherwise.
pub fn surface(a: &str, b: &str, c: Option<&str>, prec: u32) -> anyhow::Result<Surface> {
    if let (Ok(ea), Ok(eb)) = (Exact::parse(a), Exact::parse(b)) {
        let exact = match c {
            Some(c) => Exact::parse(c).ok().map(|ec| validate_params(ea, eb, ec)),
            None => match solve_c(&ea, &eb) {
                Ok(ec) => Some(validate_params(ea, eb, ec)),
                Err(Error::DomainError(_)) => None,
                Err(e) => Some(Err(e)),
            },
        };
        match exact {
            Some(Ok(p)) => return Ok(Surface::Exact(p)),
            Some(Err(Error::EquationViolated { .. })) | None => {}
            Some(Err(e)) => return Err(e.into()),
        }
    }
    let ra = Real::parse(a, prec)?;
    let rb = Real::parse(b, prec)?;
    let rc = match c {
        Some(c) => Real::parse(c, prec)?,
        None => solve_c(&ra, &rb)?,
    };
    Ok(Surface::Real(validate_params(ra, rb, rc)?))
}

/// Inclusive ranges (`5-20`) and comma lists (`5,8,13`).
pub fn parse_depths(s: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad(format!("bad depth {t:?}")));
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(bad(format!("empty depth range {part:?}")));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(bad("no depths given"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("[params]\na = \"5/2\"\nb = \"41/12\"\nc = \"89/24\"\n[run]\nmax_depth = 3\nprecision = 128\n").unwrap();
        let flags = Common { max_depth: Some(7), ..Common::default() };
        let r = RunConfig::resolve(&flags, &file).unwrap();
        assert_eq!(r.budget.max_depth, Some(7));
        assert_eq!(r.precision, 128);
        assert!(matches!(r.surface().unwrap(), Surface::Exact(_)));
    }

    #[test]
    fn mode_selection() {
        assert!(matches!(surface("3", "3", Some("3"), 128).unwrap(), Surface::Exact(_)));
        assert!(matches!(surface("3", "3", None, 128).unwrap(), Surface::Exact(_)));
        assert!(matches!(surface("2.9", "3", None, 128).unwrap(), Surface::Real(_)));
        assert!(surface("2", "2", Some("2"), 128).is_err());
    }

    #[test]
    fn both_sources_rejected() {
        let file: FileConfig = toml::from_str("[params]\na = 3\nb = 3\nc = 3\nsolve_c = true\n").unwrap();
        assert!(RunConfig::resolve(&Common::default(), &file).is_err());
        assert!(toml::from_str::<FileConfig>("[params]\nd = 1\n").is_err());
    }

    #[test]
    fn depth_lists() {
        assert_eq!(parse_depths("5-8,10").unwrap(), vec![5, 6, 7, 8, 10]);
        assert!(parse_depths("9-3").is_err());
    }
}
