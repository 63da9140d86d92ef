//! Demo configuration. Paths inside a config file are relative to the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::json::{from_str, GroupJson, Rat};
use crate::output::Format;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupJson),
}

/// The tree-product model `B(v0, radius) x [0, path_length)` split along
/// the axis of the ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoarseModel {
    #[serde(default = "two")]
    pub radius: usize,
    #[serde(default = "five")]
    pub path_length: usize,
    #[serde(default = "one_rat")]
    pub r: Rat,
    #[serde(default = "one_rat")]
    pub s: Rat,
    #[serde(default = "three")]
    pub profile_max: usize,
}

impl Default for CoarseModel {
    fn default() -> Self {
        CoarseModel { radius: 2, path_length: 5, r: one_rat(), s: one_rat(), profile_max: 3 }
    }
}

fn one_rat() -> Rat {
    Rat::Int(1)
}
fn two() -> usize {
    2
}
fn three() -> usize {
    3
}
fn five() -> usize {
    5
}
fn four() -> usize {
    4
}
fn six() -> usize {
    6
}
fn twelve() -> usize {
    12
}
fn point_cap() -> usize {
    hnntree::coarse::POINT_CAP
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub group: GroupRef,
    #[serde(default = "four")]
    pub radius: usize,
    /// Stabilization depth; defaults to `radius`.
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default = "six")]
    pub radius_cap: usize,
    /// Largest sphere handed to the invariant-order solver.
    #[serde(default = "twelve")]
    pub solver_cap: usize,
    #[serde(default = "point_cap")]
    pub point_cap: usize,
    #[serde(default)]
    pub coarse: CoarseModel,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub out_dir: Option<String>,
}

/// A config with every path resolved and every cap checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub group: GroupJson,
    pub radius: usize,
    pub depth: usize,
    pub radius_cap: usize,
    pub solver_cap: usize,
    pub point_cap: usize,
    pub coarse: CoarseModel,
    pub format: Format,
    pub out_dir: Option<PathBuf>,
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn load_group(path: &Path) -> Result<GroupJson, CliError> {
    from_str(&read_file(path)?, &path.display().to_string())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let file: ConfigFile = from_str(&read_file(path)?, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::resolve(file, base)
    }

    pub fn resolve(file: ConfigFile, base: &Path) -> Result<RunConfig, CliError> {
        let group = match file.group {
            GroupRef::Inline(g) => g,
            GroupRef::Path(p) => load_group(&base.join(p))?,
        };
        let depth = file.depth.unwrap_or(file.radius);
        for (name, v) in [
            ("radius_cap", file.radius_cap),
            ("solver_cap", file.solver_cap),
            ("point_cap", file.point_cap),
            ("depth", depth),
            ("coarse.radius", file.coarse.radius),
            ("coarse.path_length", file.coarse.path_length),
            ("coarse.profile_max", file.coarse.profile_max),
        ] {
            if v == 0 {
                return Err(CliError::Precondition(format!("{name} must be positive")));
            }
        }
        if file.radius > file.radius_cap {
            return Err(CliError::Precondition(format!("radius {} exceeds radius_cap {}", file.radius, file.radius_cap)));
        }
        if file.coarse.radius > file.radius_cap {
            return Err(CliError::Precondition(format!("coarse.radius exceeds radius_cap {}", file.radius_cap)));
        }
        Ok(RunConfig {
            group,
            radius: file.radius,
            depth,
            radius_cap: file.radius_cap,
            solver_cap: file.solver_cap,
            point_cap: file.point_cap,
            coarse: file.coarse,
            format: file.format,
            out_dir: file.out_dir.map(|d| base.join(d)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inline(extra: &str) -> String {
        format!(r#"{{"group": {{"n": 1, "A": [[2]], "L_prime": [[1]]}}{extra}}}"#)
    }

    #[test]
    fn defaults_fill_in() {
        let f: ConfigFile = from_str(&inline(""), "cfg").unwrap();
        let c = RunConfig::resolve(f, Path::new(".")).unwrap();
        assert_eq!((c.radius, c.depth, c.solver_cap), (4, 4, 12));
        assert_eq!(c.coarse, CoarseModel::default());
    }

    #[test]
    fn caps_are_checked() {
        let f: ConfigFile = from_str(&inline(r#", "solver_cap": 0"#), "cfg").unwrap();
        assert!(matches!(RunConfig::resolve(f, Path::new(".")), Err(CliError::Precondition(_))));
        let f: ConfigFile = from_str(&inline(r#", "radius": 9"#), "cfg").unwrap();
        assert!(matches!(RunConfig::resolve(f, Path::new(".")), Err(CliError::Precondition(_))));
        assert!(from_str::<ConfigFile>(&inline(r#", "raduis": 3"#), "cfg").is_err());
    }
}
