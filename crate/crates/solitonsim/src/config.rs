//! Run configuration: one JSON document, optionally patched by
//! `--key=value` flags, checked in full before any numerics run.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};
use solitonsim_core::elliptic::{EllipticConfig, Mode};
use solitonsim_core::evolver::{Scheme, SolverConfig};
use solitonsim_core::grid::{PeriodicGrid1D, PeriodicGrid2D};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Evolve,
    SolitonProfile,
    VerifyReduction,
    Ishimori,
    SweepEps,
    Refine,
    CheckGeometry,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::SolitonProfile => "soliton-profile",
            Command::VerifyReduction => "verify-reduction",
            Command::Ishimori => "ishimori",
            Command::SweepEps => "sweep-eps",
            Command::Refine => "refine",
            Command::CheckGeometry => "check-geometry",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `{n, length}` for the circle or `{nx, ny, Lx, Ly}` for the torus.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(default, rename = "Lx", skip_serializing_if = "Option::is_none")]
    pub lx: Option<f64>,
    #[serde(default, rename = "Ly", skip_serializing_if = "Option::is_none")]
    pub ly: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    Circle(PeriodicGrid1D),
    Torus(PeriodicGrid2D),
}

impl GridSpec {
    pub fn resolve(&self) -> Result<Grid> {
        let one = self.n.is_some() || self.length.is_some();
        let two = self.nx.is_some() || self.ny.is_some() || self.lx.is_some() || self.ly.is_some();
        match (one, two) {
            (true, false) => {
                let n = self.n.ok_or_else(|| AppError::invalid("grid.n is required"))?;
                let length = self.length.unwrap_or(std::f64::consts::TAU);
                Ok(Grid::Circle(PeriodicGrid1D::new(n, length)?))
            }
            (false, true) => match (self.nx, self.ny, self.lx, self.ly) {
                (Some(nx), Some(ny), Some(lx), Some(ly)) => Ok(Grid::Torus(PeriodicGrid2D::new(nx, ny, lx, ly)?)),
                _ => Err(AppError::invalid("a 2D grid needs all of grid.nx, grid.ny, grid.Lx, grid.Ly")),
            },
            (true, true) => {
                Err(AppError::invalid("grid mixes the 1D keys {n, length} with the 2D keys {nx, ny, Lx, Ly}"))
            }
            (false, false) => Err(AppError::invalid("grid must give {n, length} or {nx, ny, Lx, Ly}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Leapfrog,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSection {
    pub epsilon: f64,
    /// Defaults to `min(h/4, h²/4ε)` on the configured grid, with the
    /// largest ε of a sweep.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub scheme: SchemeName,
    pub renormalize_every: usize,
    pub record_every: usize,
    pub snapshot_every: usize,
    pub constraint_tol: f64,
    pub tangency_tol: f64,
    pub cfl_factor: f64,
    pub drift_abort: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            epsilon: d.epsilon,
            dt: None,
            t_end: d.t_end,
            scheme: SchemeName::Leapfrog,
            renormalize_every: d.renormalize_every,
            record_every: d.record_every,
            snapshot_every: d.snapshot_every,
            constraint_tol: d.constraint_tol,
            tangency_tol: d.tangency_tol,
            cfl_factor: d.cfl_factor,
            drift_abort: d.drift_abort,
        }
    }
}

impl SolverSection {
    pub fn to_config(&self, h: f64) -> SolverConfig {
        SolverConfig {
            epsilon: self.epsilon,
            dt: self.dt.unwrap_or(h / 4.0),
            t_end: self.t_end,
            scheme: match self.scheme {
                SchemeName::Leapfrog => Scheme::Leapfrog,
                SchemeName::Rk4 => Scheme::Rk4,
            },
            renormalize_every: self.renormalize_every,
            record_every: self.record_every,
            snapshot_every: self.snapshot_every,
            constraint_tol: self.constraint_tol,
            tangency_tol: self.tangency_tol,
            cfl_factor: self.cfl_factor,
            drift_abort: self.drift_abort,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    GradientFlow,
    ResidualDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EllipticSection {
    /// Defaults to `h²/4`, the largest stable step.
    pub flow_dt: Option<f64>,
    pub max_iters: usize,
    pub residual_target: f64,
    pub mode: ModeName,
}

impl Default for EllipticSection {
    fn default() -> Self {
        let d = EllipticConfig::default();
        Self {
            flow_dt: None,
            max_iters: d.max_iters,
            residual_target: d.residual_target,
            mode: ModeName::ResidualDescent,
        }
    }
}

impl EllipticSection {
    pub fn to_config(&self, h: f64) -> EllipticConfig {
        EllipticConfig {
            flow_dt: self.flow_dt.unwrap_or(h * h / 4.0),
            max_iters: self.max_iters,
            residual_target: self.residual_target,
            mode: match self.mode {
                ModeName::GradientFlow => Mode::GradientFlow,
                ModeName::ResidualDescent => Mode::ResidualDescent,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// `u ≡ e_3`
    Pole,
    Latitude {
        k: u32,
        costheta: f64,
    },
    /// A grid CSV with `u` in `c0..c2` and optionally `v` in `c3..c5`.
    File {
        path: PathBuf,
    },
    /// `base` plus seeded smooth tangent noise of sup norm `amplitude`.
    Perturbed {
        base: Box<InitialData>,
        amplitude: f64,
        seed: u64,
    },
}

impl InitialData {
    /// True when the data is defined independently of the grid, so it can be
    /// resampled for refinement studies.
    pub fn is_analytic(&self) -> bool {
        match self {
            InitialData::Pole | InitialData::Latitude { .. } => true,
            InitialData::File { .. } => false,
            InitialData::Perturbed { base, .. } => base.is_analytic(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometrySection {
    pub samples: usize,
    pub seed: u64,
    pub fd_step: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self { samples: 20, seed: 1, fd_step: 1e-4 }
    }
}

fn eps_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        List(Vec<f64>),
        Text(String),
    }
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(Raw::List(v)) => Ok(Some(v)),
        Some(Raw::Text(s)) => s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| serde::de::Error::custom(format!("eps: {p:?}: {e}"))))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some),
    }
}

/// The whole configuration. After [`load`] every defaulted field holds the
/// value actually used, so the echoed file reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub elliptic: EllipticSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_data: Option<InitialData>,
    pub output_dir: PathBuf,
    /// Viscosities for `sweep-eps`, descending and ending with 0. Also
    /// accepted as a comma-separated string.
    #[serde(default, deserialize_with = "eps_list", skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    /// Node counts for refinement studies, each twice the previous.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<usize>,
    /// Times at which `verify-reduction` writes soliton frames.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frame_times: Vec<f64>,
    #[serde(default)]
    pub geometry: GeometrySection,
}

const TOP_KEYS: &[&str] = &[
    "command",
    "grid",
    "solver",
    "elliptic",
    "initial_data",
    "output_dir",
    "eps",
    "levels",
    "frame_times",
    "geometry",
];
const GRID_KEYS: &[&str] = &["n", "length", "nx", "ny", "Lx", "Ly"];
const SOLVER_KEYS: &[&str] = &[
    "epsilon",
    "dt",
    "t_end",
    "scheme",
    "renormalize_every",
    "record_every",
    "snapshot_every",
    "constraint_tol",
    "tangency_tol",
    "cfl_factor",
    "drift_abort",
];
const ELLIPTIC_KEYS: &[&str] = &["flow_dt", "max_iters", "residual_target", "mode"];
const GEOMETRY_KEYS: &[&str] = &["samples", "seed", "fd_step"];

fn unknown_in(obj: &Map<String, Value>, path: &str, allowed: &[&str], out: &mut Vec<String>) {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            out.push(if path.is_empty() { key.clone() } else { format!("{path}.{key}") });
        }
    }
}

fn unknown_initial(v: &Value, path: &str, out: &mut Vec<String>) {
    let Some(obj) = v.as_object() else { return };
    let allowed: &[&str] = match obj.get("kind").and_then(Value::as_str) {
        Some("pole") => &["kind"],
        Some("latitude") => &["kind", "k", "costheta"],
        Some("file") => &["kind", "path"],
        Some("perturbed") => &["kind", "base", "amplitude", "seed"],
        // an unrecognized kind is reported by deserialization
        _ => return,
    };
    unknown_in(obj, path, allowed, out);
    if let Some(base) = obj.get("base") {
        unknown_initial(base, &format!("{path}.base"), out);
    }
}

/// Every key in `doc` that the configuration does not define, as dotted
/// paths, in document order.
pub fn unknown_keys(doc: &Value) -> Vec<String> {
    let mut out = Vec::new();
    let Some(top) = doc.as_object() else { return out };
    unknown_in(top, "", TOP_KEYS, &mut out);
    for (key, allowed) in
        [("grid", GRID_KEYS), ("solver", SOLVER_KEYS), ("elliptic", ELLIPTIC_KEYS), ("geometry", GEOMETRY_KEYS)]
    {
        if let Some(obj) = top.get(key).and_then(Value::as_object) {
            unknown_in(obj, key, allowed, &mut out);
        }
    }
    if let Some(init) = top.get("initial_data") {
        unknown_initial(init, "initial_data", &mut out);
    }
    out
}

/// Applies `key=value` (the leading `--` already stripped). Dotted keys reach
/// into sections; the value is read as JSON when it parses, else as a string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| AppError::invalid(format!("override {assignment:?} is not of the form --key=value")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(AppError::invalid(format!("override {assignment:?} has an empty key")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| AppError::invalid(format!("override {key}: {} is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert((*part).to_owned(), value);
            return Ok(());
        }
        node = obj.entry((*part).to_owned()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("the loop returns at the last part")
}

/// Reads `path`, applies `overrides`, and checks the result for `command`.
pub fn load(command: Command, path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| AppError::invalid(format!("{}: not valid JSON: {e}", path.display())))?;
    from_value(command, doc, overrides)
}

pub fn from_value(command: Command, mut doc: Value, overrides: &[String]) -> Result<RunConfig> {
    if !doc.is_object() {
        return Err(AppError::invalid("the configuration must be a JSON object"));
    }
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let unknown = unknown_keys(&doc);
    if !unknown.is_empty() {
        return Err(AppError::invalid(format!("unknown configuration keys: {}", unknown.join(", "))));
    }
    let obj = doc.as_object_mut().expect("checked above");
    match obj.get("command") {
        None => {
            obj.insert("command".into(), Value::String(command.name().into()));
        }
        Some(Value::String(s)) if s == command.name() => {}
        Some(other) => {
            return Err(AppError::invalid(format!(
                "the configuration is for command {other} but {command} was requested"
            )))
        }
    }
    let mut config: RunConfig =
        serde_json::from_value(doc).map_err(|e| AppError::invalid(format!("invalid configuration: {e}")))?;
    config.fill_defaults()?;
    config.validate()?;
    Ok(config)
}

fn needs_initial_data(command: Command) -> bool {
    command != Command::CheckGeometry
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        self.grid.as_ref().ok_or_else(|| AppError::invalid(format!("{} needs a grid", self.command)))?.resolve()
    }

    pub fn circle(&self) -> Result<PeriodicGrid1D> {
        match self.grid()? {
            Grid::Circle(g) => Ok(g),
            Grid::Torus(_) => Err(AppError::invalid(format!("{} needs a 1D grid {{n, length}}", self.command))),
        }
    }

    pub fn initial(&self) -> Result<&InitialData> {
        self.initial_data.as_ref().ok_or_else(|| AppError::invalid(format!("{} needs initial_data", self.command)))
    }

    /// Records the grid-dependent defaults so the echo is explicit.
    fn fill_defaults(&mut self) -> Result<()> {
        if self.command == Command::CheckGeometry {
            return Ok(());
        }
        if let Grid::Circle(g) = self.grid()? {
            let h = g.spacing();
            // h/4, or less where the viscous term needs it
            let eps_max = match self.command {
                Command::SweepEps => self.eps.iter().flatten().copied().fold(0.0, f64::max),
                _ => self.solver.epsilon,
            };
            let viscous = if eps_max > 0.0 { h * h / (4.0 * eps_max) } else { f64::INFINITY };
            self.solver.dt.get_or_insert((h / 4.0).min(viscous));
            self.elliptic.flow_dt.get_or_insert(h * h / 4.0);
            if self.levels.is_empty() {
                let base = match self.command {
                    Command::Refine => vec![g.n() / 4, g.n() / 2, g.n()],
                    Command::VerifyReduction | Command::Ishimori => vec![g.n() / 2, g.n()],
                    _ => vec![],
                };
                let levels: Vec<usize> = base.into_iter().filter(|&n| n >= solitonsim_core::grid::MIN_NODES).collect();
                // resampling needs grid-independent initial data
                if self.initial_data.as_ref().is_some_and(InitialData::is_analytic) || self.command == Command::Refine {
                    self.levels = levels;
                }
            }
        }
        Ok(())
    }

    /// The grid of refinement level `n` and the solver configuration scaled
    /// to it: `dt` shrinks with `h`, so the CFL number and the snapshot
    /// spacing in units of `h` stay fixed.
    pub fn level(&self, n: usize) -> Result<(PeriodicGrid1D, SolverConfig)> {
        let base = self.circle()?;
        let g = PeriodicGrid1D::new(n, base.length())?;
        let mut c = self.solver.to_config(base.spacing());
        c.dt *= g.spacing() / base.spacing();
        Ok((g, c))
    }

    fn validate(&self) -> Result<()> {
        if self.output_dir.as_os_str().is_empty() {
            return Err(AppError::invalid("output_dir must not be empty"));
        }
        let geo = &self.geometry;
        if geo.samples == 0 || !(geo.fd_step > 0.0 && geo.fd_step <= 1e-2) {
            return Err(AppError::invalid("geometry needs samples ≥ 1 and fd_step in (0, 1e-2]"));
        }
        if self.frame_times.iter().any(|t| !t.is_finite()) {
            return Err(AppError::invalid("frame_times must be finite"));
        }
        if self.command == Command::CheckGeometry {
            return Ok(());
        }
        if needs_initial_data(self.command) {
            validate_initial(self.initial()?)?;
        }
        let grid = self.grid()?;
        let g = match grid {
            Grid::Torus(_) if self.command == Command::Ishimori => {
                if !matches!(self.initial()?, InitialData::File { .. }) {
                    return Err(AppError::invalid(
                        "on a 2D grid ishimori reads the sheet from initial_data of kind file",
                    ));
                }
                return Ok(());
            }
            Grid::Torus(_) => return Err(AppError::invalid(format!("{} needs a 1D grid {{n, length}}", self.command))),
            Grid::Circle(g) => g,
        };
        let h = g.spacing();
        let solver = self.solver.to_config(h);
        solver.validate(&g)?;
        let ell = self.elliptic.to_config(h);
        if !(ell.flow_dt > 0.0 && ell.flow_dt <= h * h / 4.0 * (1.0 + 1e-12)) {
            return Err(AppError::invalid("elliptic.flow_dt must lie in (0, h²/4]"));
        }
        if !(ell.residual_target > 0.0) || ell.max_iters == 0 {
            return Err(AppError::invalid("elliptic needs residual_target > 0 and max_iters ≥ 1"));
        }
        for w in self.levels.windows(2) {
            if w[1] != 2 * w[0] {
                return Err(AppError::invalid("levels must double from one entry to the next"));
            }
        }
        for &n in &self.levels {
            let (lg, lc) = self.level(n)?;
            lc.validate(&lg)?;
        }
        match self.command {
            Command::SweepEps => {
                let eps = self.eps.as_ref().ok_or_else(|| AppError::invalid("sweep-eps needs eps"))?;
                solitonsim_core::evolver::check_eps_list(eps)?;
                for &e in eps {
                    solitonsim_core::evolver::member_config(&solver, e).validate(&g)?;
                }
            }
            Command::Refine if self.levels.len() < 2 => {
                return Err(AppError::invalid("refine needs at least two levels"));
            }
            Command::Refine if !self.initial()?.is_analytic() => {
                return Err(AppError::invalid("refine resamples its initial data; a file datum cannot be refined"));
            }
            Command::Ishimori if solver.snapshot_every == 0 => {
                return Err(AppError::invalid(
                    "ishimori builds its sheet from snapshots; set solver.snapshot_every ≥ 1",
                ));
            }
            _ => {}
        }
        Ok(())
    }
}

fn validate_initial(d: &InitialData) -> Result<()> {
    match d {
        InitialData::Pole => Ok(()),
        InitialData::Latitude { costheta, .. } => {
            if (-1.0..=1.0).contains(costheta) {
                Ok(())
            } else {
                Err(AppError::invalid("initial_data.costheta must lie in [-1, 1]"))
            }
        }
        InitialData::File { path } => {
            if path.is_file() {
                Ok(())
            } else {
                Err(AppError::invalid(format!("initial_data.path {} is not a readable file", path.display())))
            }
        }
        InitialData::Perturbed { base, amplitude, .. } => {
            if !(amplitude.is_finite() && *amplitude >= 0.0) {
                return Err(AppError::invalid("initial_data.amplitude must be finite and nonnegative"));
            }
            validate_initial(base)
        }
    }
}
