//! Experiment configuration: the TOML file format, command-line overrides,
//! and resolution into a fully specified [`ResolvedConfig`].

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use weightlab_core::varsolve::{FeSettings, SolverSettings};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PdScan,
    PmSolve,
    PmQScan,
    SwCompare,
    BesselTable,
    RearrangeCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::PdScan,
        Experiment::PmSolve,
        Experiment::PmQScan,
        Experiment::SwCompare,
        Experiment::BesselTable,
        Experiment::RearrangeCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::PdScan => "pd-scan",
            Experiment::PmSolve => "pm-solve",
            Experiment::PmQScan => "pm-q-scan",
            Experiment::SwCompare => "sw-compare",
            Experiment::BesselTable => "bessel-table",
            Experiment::RearrangeCheck => "rearrange-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Span {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

/// A scalar, an explicit list, or an evenly spaced span (endpoints included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    Value(f64),
    List(Vec<f64>),
    Span(Span),
}

impl Range {
    pub fn values(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Range::Value(x) => vec![*x],
            Range::List(v) => v.clone(),
            Range::Span(s) => {
                if s.count == 0 {
                    return Err(CliError::Config(format!("{name}: span count must be positive")));
                }
                if s.spacing == Spacing::Log && !(s.start > 0.0 && s.stop > 0.0) {
                    return Err(CliError::Config(format!(
                        "{name}: log spacing needs positive endpoints"
                    )));
                }
                let n = s.count;
                (0..n)
                    .map(|i| {
                        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                        match s.spacing {
                            Spacing::Linear => s.start + t * (s.stop - s.start),
                            Spacing::Log => (s.start.ln() + t * (s.stop.ln() - s.start.ln())).exp(),
                        }
                    })
                    .collect()
            }
        };
        if v.is_empty() {
            return Err(CliError::Config(format!("{name}: empty range")));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("{name}: non-finite value {x}")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "N")]
    pub dimension: Option<Vec<usize>>,
    pub p: Option<Range>,
    pub q: Option<Range>,
    pub alpha: Option<Range>,
    pub gamma: Option<Range>,
    /// Ball radii (bessel-table).
    pub radius: Option<Range>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub multistarts: Option<usize>,
    pub q_cap: Option<f64>,
    pub constraint_tol: Option<f64>,
    pub min_bump_nodes: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeConfig {
    pub rings: Option<usize>,
    pub directions: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RearrangeConfig {
    pub trials: Option<usize>,
    pub fss_tol: Option<f64>,
}

/// Contents of a configuration file. Every field is optional; missing
/// fields take per-experiment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub fe: FeConfig,
    /// Domain names for sw-compare: disk, square, rectangle, hexagon.
    pub domains: Option<Vec<String>>,
    #[serde(default)]
    pub rearrange: RearrangeConfig,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid: Option<(usize, usize)>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// Parses `MxK`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let err = || CliError::Config(format!("grid must look like MxK with positive integers, got '{s}'"));
    let (m, k) = s.split_once(['x', 'X']).ok_or_else(err)?;
    let m: usize = m.trim().parse().map_err(|_| err())?;
    let k: usize = k.trim().parse().map_err(|_| err())?;
    if m == 0 || k == 0 {
        return Err(err());
    }
    Ok((m, k))
}

pub const DOMAIN_NAMES: [&str; 4] = ["disk", "square", "rectangle", "hexagon"];

/// Fully specified experiment. Its JSON form is what the config hash covers;
/// output location and worker count are deliberately not part of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedConfig {
    pub experiment: Experiment,
    pub seed: u64,
    #[serde(rename = "N")]
    pub dimension: Vec<usize>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub alpha: Vec<f64>,
    pub gamma: Vec<f64>,
    pub radius: Vec<f64>,
    pub solver: SolverSettings,
    pub fe: FeSettings,
    pub domains: Vec<String>,
    pub trials: usize,
    pub fss_tol: f64,
}

struct Defaults {
    dimension: Vec<usize>,
    p: Vec<f64>,
    q: Vec<f64>,
    alpha: Vec<f64>,
    gamma: Vec<f64>,
    radius: Vec<f64>,
    grid: (usize, usize),
}

fn defaults(e: Experiment) -> Defaults {
    let base = Defaults {
        dimension: vec![2],
        p: vec![2.0],
        q: vec![2.0],
        alpha: vec![0.0],
        gamma: vec![],
        radius: vec![1.0],
        grid: (200, 128),
    };
    match e {
        Experiment::PdScan => Defaults {
            q: vec![2.5],
            gamma: vec![2.0, 4.0, 8.0, 16.0, 32.0],
            grid: (400, 256),
            ..base
        },
        Experiment::PmSolve => Defaults {
            q: vec![2.0, 3.0],
            alpha: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            ..base
        },
        Experiment::PmQScan => Defaults {
            q: vec![2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0],
            alpha: vec![-1.0],
            ..base
        },
        Experiment::SwCompare => Defaults {
            alpha: vec![0.5, 1.0],
            ..base
        },
        Experiment::BesselTable => Defaults {
            dimension: vec![2, 3, 4],
            alpha: vec![0.25, 0.5, 1.0, 1.5],
            radius: vec![0.5, 1.0, 2.0],
            ..base
        },
        Experiment::RearrangeCheck => Defaults {
            alpha: vec![-1.0, 0.0, 0.5, 1.0],
            grid: (32, 64),
            ..base
        },
    }
}

fn range_or(r: &Option<Range>, default: Vec<f64>, name: &str) -> Result<Vec<f64>, CliError> {
    match r {
        Some(r) => r.values(name),
        None => Ok(default),
    }
}

impl ResolvedConfig {
    /// Resolves `file` for `experiment`, with `overrides` taking precedence.
    pub fn resolve(experiment: Experiment, file: &FileConfig, overrides: &Overrides) -> Result<Self, CliError> {
        if let Some(e) = file.experiment {
            if e != experiment {
                return Err(CliError::Config(format!(
                    "configuration is for experiment '{e}', invoked as '{experiment}'"
                )));
            }
        }
        let d = defaults(experiment);
        let p = &file.params;
        let dimension = p.dimension.clone().unwrap_or(d.dimension);
        if dimension.is_empty() {
            return Err(CliError::Config("N: empty list".into()));
        }
        let seed = overrides.seed.or(file.seed).unwrap_or(0);

        let mut solver = SolverSettings::default();
        solver.seed = seed;
        let (mut m, mut k) = d.grid;
        let mut fe = FeSettings::default();
        m = file.grid.m.unwrap_or(m);
        k = file.grid.k.unwrap_or(k);
        fe.rings = file.fe.rings.unwrap_or(fe.rings);
        fe.directions = file.fe.directions.unwrap_or(fe.directions);
        if let Some((gm, gk)) = overrides.grid {
            // the finite element mesh is the only grid of sw-compare
            if experiment == Experiment::SwCompare {
                fe.rings = gm;
                fe.directions = gk;
            } else {
                m = gm;
                k = gk;
            }
        }
        solver.m = m;
        solver.k = k;
        solver.epsilon = file.grid.epsilon.unwrap_or(solver.epsilon);
        solver.ratio = file.grid.ratio.unwrap_or(solver.ratio);
        let s = &file.solver;
        solver.tol = overrides.tol.or(s.tol).unwrap_or(solver.tol);
        solver.max_iter = s.max_iter.unwrap_or(solver.max_iter);
        solver.multistarts = s.multistarts.unwrap_or(solver.multistarts);
        solver.q_cap = s.q_cap.unwrap_or(solver.q_cap);
        solver.constraint_tol = s.constraint_tol.unwrap_or(solver.constraint_tol);
        solver.min_bump_nodes = s.min_bump_nodes.unwrap_or(solver.min_bump_nodes);

        let domains = file
            .domains
            .clone()
            .unwrap_or_else(|| DOMAIN_NAMES.iter().map(|s| s.to_string()).collect());
        let cfg = ResolvedConfig {
            experiment,
            seed,
            dimension,
            p: range_or(&p.p, d.p, "p")?,
            q: range_or(&p.q, d.q, "q")?,
            alpha: range_or(&p.alpha, d.alpha, "alpha")?,
            gamma: range_or(&p.gamma, d.gamma, "gamma")?,
            radius: range_or(&p.radius, d.radius, "radius")?,
            solver,
            fe,
            domains,
            trials: file.rearrange.trials.unwrap_or(100),
            fss_tol: file.rearrange.fss_tol.unwrap_or(1e-6),
        };
        cfg.check_settings()?;
        Ok(cfg)
    }

    fn check_settings(&self) -> Result<(), CliError> {
        let s = &self.solver;
        let bad = |msg: String| Err(CliError::Config(msg));
        if s.m < 4 || s.k < 4 || s.k % 2 != 0 {
            return bad(format!("grid needs M >= 4 and even K >= 4, got {}x{}", s.m, s.k));
        }
        if !(s.epsilon > 0.0 && s.epsilon < 1.0) || !(s.ratio >= 1.0) {
            return bad(format!(
                "grid needs 0 < epsilon < 1 and ratio >= 1, got {} and {}",
                s.epsilon, s.ratio
            ));
        }
        if !(s.tol > 0.0) || !(s.constraint_tol > 0.0) || !(s.q_cap > 0.0 && s.q_cap <= 1.0) {
            return bad("solver needs tol > 0, constraint_tol > 0 and 0 < q_cap <= 1".into());
        }
        if s.max_iter == 0 {
            return bad("solver needs max_iter >= 1".into());
        }
        if self.fe.rings < 4 || self.fe.directions < 8 || self.fe.directions % 2 != 0 {
            return bad(format!(
                "finite element mesh needs rings >= 4 and even directions >= 8, got {}x{}",
                self.fe.rings, self.fe.directions
            ));
        }
        if let Some(d) = self.domains.iter().find(|d| !DOMAIN_NAMES.contains(&d.as_str())) {
            return bad(format!("unknown domain '{d}', expected one of {DOMAIN_NAMES:?}"));
        }
        if self.trials == 0 || !(self.fss_tol >= 0.0) {
            return bad("rearrange needs trials >= 1 and fss_tol >= 0".into());
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
