//! Experiment runner behind the `mdiew` binary.
//!
//! Each [`Command`] produces a [`Table`]: named columns, one row per grid
//! point and a metadata footer. [`render`] turns a table into CSV or JSON.

use std::fmt::Write as _;
use std::path::PathBuf;

use mdiew_core::detection::{
    attacked_witness_value, coincidence_efficiency, sample_coincidence_efficiency, simulate_attack,
    suppression_profile, AttackMode, DetectorModel, SuppressionProfile, ATTACK_DELTA_T_NS,
    COINCIDENCE_WINDOW_NS, FITTED_JITTER_SIGMA_NS,
};
use mdiew_core::mdiew::{
    adversarial_draws, j_value_exact, j_value_from_counts, pauli_grid_basis, simulate_records,
    solve_beta, sparse_basis, BsmOutcome, JMode, MdiewTables,
};
use mdiew_core::sampling::stream_rng;
use mdiew_core::states::{rho_v, theta_from_v, v_from_theta, TwoQubitState};
use mdiew_core::tomography::{
    exact_record, fit_v, reconstruct, sample_record, tangle, tangle_of_estimate,
};
use mdiew_core::witness::WitnessOperator;
use rand::Rng;
use serde_json::{json, Map, Value};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_TOMOGRAPHY_SHOTS: u64 = 250_000;
pub const DEFAULT_DRAWS: usize = 1000;
pub const DEFAULT_GRID_POINTS: usize = 21;
pub const SEED_ENV: &str = "MDIEW_SEED";
/// Selector angles of the published tomography table.
pub const TOMOGRAPHY_THETAS: [f64; 5] = [45.0, 30.0, 22.5, 15.0, 0.0];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mdiew_core::Error),
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Witness under the time-shift attack. Columns: v, delta_t, suppression,
    /// witness_honest, witness_attacked[, witness_estimate, standard_error]
    AttackDemo,
    /// Coincidence efficiency against delay. Columns: delta_t, efficiency[,
    /// efficiency_estimate, standard_error]
    EfficiencyCurve,
    /// Combined MDIEW score. Columns: v, j[, j_estimate, standard_error]
    MdiewCurve,
    /// Random separable inputs against random relay POVMs. Columns: draw,
    /// j_pp, j_pm, j_mp, j_mm, j_combined
    MdiewAdversary,
    /// Simulated tomography and v fit. Columns: theta, v, v_rho11, v_rho22,
    /// v_rho33, v_rho44, v_rho23, v_mean, v_spread, v_mean_error, physical, tangle
    Tomography,
    /// Spin-flip spectrum and tangle. Columns: theta, v, lambda1..lambda4,
    /// concurrence, tangle
    TangleCurve,
    /// Solved β coefficients. Columns: decomposition, class, s, t, beta
    Tables,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AttackDemo => "attack-demo",
            Command::EfficiencyCurve => "efficiency-curve",
            Command::MdiewCurve => "mdiew-curve",
            Command::MdiewAdversary => "mdiew-adversary",
            Command::Tomography => "tomography",
            Command::TangleCurve => "tangle-curve",
            Command::Tables => "tables",
        }
    }

    fn default_trials(self) -> u64 {
        match self {
            Command::Tomography => DEFAULT_TOMOGRAPHY_SHOTS,
            Command::AttackDemo | Command::EfficiencyCurve | Command::MdiewCurve => DEFAULT_TRIALS,
            Command::MdiewAdversary | Command::TangleCurve | Command::Tables => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    /// Where the seed came from, reported in the footer.
    pub seed_source: String,
    /// `None` selects the command default; `Some(0)` selects analytic mode.
    pub trials: Option<u64>,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
    pub delta_t: Vec<f64>,
    pub window: f64,
    pub jitter_sigma: f64,
    pub draws: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            seed: DEFAULT_SEED,
            seed_source: "default".into(),
            trials: None,
            v: Vec::new(),
            theta: Vec::new(),
            delta_t: Vec::new(),
            window: COINCIDENCE_WINDOW_NS,
            jitter_sigma: FITTED_JITTER_SIGMA_NS,
            draws: DEFAULT_DRAWS,
            out: None,
            format: Format::Csv,
        }
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or_else(|| self.command.default_trials())
    }

    pub fn validate(&self) -> CliResult<()> {
        if !self.v.is_empty() && !self.theta.is_empty() {
            return Err(CliError::InvalidArgs(
                "give either --v or --theta, not both".into(),
            ));
        }
        if let Some(v) = self.v.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CliError::InvalidArgs(format!("v = {v} outside [0, 1]")));
        }
        if self
            .theta
            .iter()
            .chain(&self.delta_t)
            .any(|x| !x.is_finite())
        {
            return Err(CliError::InvalidArgs(
                "angles and delays must be finite".into(),
            ));
        }
        if self.command == Command::MdiewAdversary && self.draws == 0 {
            return Err(CliError::InvalidArgs("--draws must be positive".into()));
        }
        DetectorModel::new(0.0, self.jitter_sigma, self.window, AttackMode::Honest)?;
        Ok(())
    }

    /// `(theta, v)` pairs: explicit angles, explicit v values, or the
    /// default grid.
    fn mixing_grid(&self, default_thetas: Option<&[f64]>) -> Vec<(f64, f64)> {
        if !self.theta.is_empty() {
            return self.theta.iter().map(|&t| (t, v_from_theta(t))).collect();
        }
        if !self.v.is_empty() {
            return self.v.iter().map(|&v| (theta_from_v(v), v)).collect();
        }
        match default_thetas {
            Some(ts) => ts.iter().map(|&t| (t, v_from_theta(t))).collect(),
            None => default_v_grid()
                .into_iter()
                .map(|v| (theta_from_v(v), v))
                .collect(),
        }
    }

    fn v_grid(&self) -> Vec<f64> {
        self.mixing_grid(None).into_iter().map(|(_, v)| v).collect()
    }
}

pub fn default_v_grid() -> Vec<f64> {
    let n = DEFAULT_GRID_POINTS - 1;
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

/// Delays from −10 ns to 10 ns in 0.5 ns steps.
pub fn default_delay_grid() -> Vec<f64> {
    (-20..=20).map(|k| k as f64 * 0.5).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(String, String)>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| match &r[i] {
                Cell::Num(x) => Some(*x),
                Cell::Text(_) => None,
            })
            .collect()
    }
}

pub fn run(config: &RunConfig) -> CliResult<Table> {
    config.validate()?;
    log::info!(
        "{}: seed {} ({}), trials {}",
        config.command.name(),
        config.seed,
        config.seed_source,
        config.trials()
    );
    let mut table = match config.command {
        Command::AttackDemo => attack_demo(config)?,
        Command::EfficiencyCurve => efficiency_curve(config)?,
        Command::MdiewCurve => mdiew_curve(config)?,
        Command::MdiewAdversary => mdiew_adversary(config)?,
        Command::Tomography => tomography(config)?,
        Command::TangleCurve => tangle_curve(config)?,
        Command::Tables => tables()?,
    };
    table.meta("command", config.command.name());
    table.meta("seed", format!("{} ({})", config.seed, config.seed_source));
    table.meta("trials", config.trials());
    table.meta("version", env!("CARGO_PKG_VERSION"));
    Ok(table)
}

/// Sub-seed for grid point `k`.
fn point_seed(seed: u64, k: usize) -> u64 {
    stream_rng(seed, k as u64).random()
}

/// State measured in the attack experiment: `ρ^v` after Bob's 45° half-wave plate.
fn attacked_state(v: f64) -> CliResult<TwoQubitState> {
    Ok(rho_v(v)?.with_bob_flipped())
}

fn attack_demo(c: &RunConfig) -> CliResult<Table> {
    let trials = c.trials();
    let mut cols = vec![
        "v",
        "delta_t",
        "suppression",
        "witness_honest",
        "witness_attacked",
    ];
    if trials > 0 {
        cols.extend(["witness_estimate", "standard_error"]);
    }
    let mut table = Table::new(&cols);
    let delays = if c.delta_t.is_empty() {
        vec![ATTACK_DELTA_T_NS]
    } else {
        c.delta_t.clone()
    };
    let mut k = 0;
    for v in c.v_grid() {
        let rho = attacked_state(v)?;
        let honest = attacked_witness_value(&rho, &SuppressionProfile::honest())?;
        for &dt in &delays {
            let model = DetectorModel::new(dt, c.jitter_sigma, c.window, AttackMode::TimeShift)?;
            let profile = suppression_profile(&model);
            let attacked = attacked_witness_value(&rho, &profile)?;
            let mut row: Vec<Cell> = vec![
                v.into(),
                dt.into(),
                profile.as_array()[0].into(),
                honest.into(),
                attacked.into(),
            ];
            if trials > 0 {
                let est = simulate_attack(&rho, &profile, trials, point_seed(c.seed, k))?;
                row.extend([est.value.into(), est.std_error.into()]);
            }
            table.push(row);
            k += 1;
        }
    }
    table.meta("window_ns", c.window);
    table.meta("jitter_sigma_ns", c.jitter_sigma);
    Ok(table)
}

fn efficiency_curve(c: &RunConfig) -> CliResult<Table> {
    let trials = c.trials();
    let mut cols = vec!["delta_t", "efficiency"];
    if trials > 0 {
        cols.extend(["efficiency_estimate", "standard_error"]);
    }
    let mut table = Table::new(&cols);
    let delays = if c.delta_t.is_empty() {
        default_delay_grid()
    } else {
        c.delta_t.clone()
    };
    for (k, &dt) in delays.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            dt.into(),
            coincidence_efficiency(dt, c.jitter_sigma, c.window).into(),
        ];
        if trials > 0 {
            let (p, se) = sample_coincidence_efficiency(
                dt,
                c.jitter_sigma,
                c.window,
                trials,
                point_seed(c.seed, k),
            )?;
            row.extend([p.into(), se.into()]);
        }
        table.push(row);
    }
    table.meta("window_ns", c.window);
    table.meta("jitter_sigma_ns", c.jitter_sigma);
    Ok(table)
}

fn mdiew_curve(c: &RunConfig) -> CliResult<Table> {
    let trials = c.trials();
    let mut cols = vec!["v", "j"];
    if trials > 0 {
        cols.extend(["j_estimate", "standard_error"]);
    }
    let mut table = Table::new(&cols);
    let tables = MdiewTables::sparse();
    let settings = tables.settings();
    for (k, v) in c.v_grid().into_iter().enumerate() {
        let rho = rho_v(v)?;
        let exact = j_value_exact(&rho, &tables, JMode::Combined).j_value;
        let mut row: Vec<Cell> = vec![v.into(), exact.into()];
        if trials > 0 {
            let records = simulate_records(&rho, &settings, trials, point_seed(c.seed, k))?;
            let est = j_value_from_counts(&records, &tables, JMode::Combined)?;
            row.extend([est.j_value.into(), est.std_error.unwrap_or(f64::NAN).into()]);
        }
        table.push(row);
    }
    Ok(table)
}

fn mdiew_adversary(c: &RunConfig) -> CliResult<Table> {
    let mut table = Table::new(&["draw", "j_pp", "j_pm", "j_mp", "j_mm", "j_combined"]);
    let draws = adversarial_draws(c.draws, c.seed, &MdiewTables::sparse())?;
    let mut min = f64::INFINITY;
    for d in &draws {
        let mut row: Vec<Cell> = vec![(d.index as f64).into()];
        row.extend(d.single.iter().map(|&j| Cell::Num(j)));
        row.push(d.combined.into());
        table.push(row);
        min = min.min(d.combined);
    }
    table.meta("draws", c.draws);
    table.meta("min_j_combined", format!("{min:.16e}"));
    Ok(table)
}

fn tomography(c: &RunConfig) -> CliResult<Table> {
    let shots = c.trials();
    let mut table = Table::new(&[
        "theta",
        "v",
        "v_rho11",
        "v_rho22",
        "v_rho33",
        "v_rho44",
        "v_rho23",
        "v_mean",
        "v_spread",
        "v_mean_error",
        "physical",
        "tangle",
    ]);
    for (k, (theta, v)) in c
        .mixing_grid(Some(&TOMOGRAPHY_THETAS))
        .into_iter()
        .enumerate()
    {
        let rho = rho_v(v)?;
        let record = if shots == 0 {
            exact_record(&rho)
        } else {
            sample_record(&rho, shots, point_seed(c.seed, k))?
        };
        let estimate = reconstruct(&record)?;
        let fit = fit_v(&estimate);
        let tangle_value = tangle_of_estimate(&estimate)?.tangle;
        let mut row: Vec<Cell> = vec![theta.into(), v.into()];
        row.extend(fit.estimates.iter().map(|&e| Cell::Num(e)));
        row.extend([
            fit.mean.into(),
            fit.spread.into(),
            fit.mean_error.into(),
            (if estimate.is_physical() { 1.0 } else { 0.0 }).into(),
            tangle_value.into(),
        ]);
        table.push(row);
    }
    Ok(table)
}

fn tangle_curve(c: &RunConfig) -> CliResult<Table> {
    let mut table = Table::new(&[
        "theta",
        "v",
        "lambda1",
        "lambda2",
        "lambda3",
        "lambda4",
        "concurrence",
        "tangle",
    ]);
    for (theta, v) in c.mixing_grid(None) {
        let report = tangle(&rho_v(v)?)?;
        let mut row: Vec<Cell> = vec![theta.into(), v.into()];
        row.extend(report.eigenvalues.iter().map(|&l| Cell::Num(l)));
        row.extend([report.concurrence.into(), report.tangle.into()]);
        table.push(row);
    }
    Ok(table)
}

fn tables() -> CliResult<Table> {
    let mut table = Table::new(&["decomposition", "class", "s", "t", "beta"]);
    let w = WitnessOperator::singlet();
    for class in BsmOutcome::ALL {
        for (name, basis) in [
            ("sparse", sparse_basis(class)),
            ("pauli-grid", pauli_grid_basis()),
        ] {
            let solved = solve_beta(&w, &basis, class)?;
            for (&(s, t), &b) in &solved.beta {
                // least-squares noise on structurally zero entries
                let b = if b.abs() < 1e-12 { 0.0 } else { b };
                table.push(vec![
                    name.into(),
                    class.label().into(),
                    s.label().into(),
                    t.label().into(),
                    b.into(),
                ]);
            }
        }
    }
    Ok(table)
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format!("{x:.16e}"),
        Cell::Text(s) => s.clone(),
    }
}

pub fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = table.columns.join(",");
            out.push('\n');
            for row in &table.rows {
                let fields: Vec<String> = row.iter().map(csv_field).collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            for (k, v) in &table.metadata {
                let _ = writeln!(out, "# {k}: {v}");
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, cell)| {
                            let v = match cell {
                                Cell::Num(x) => json!(x),
                                Cell::Text(s) => json!(s),
                            };
                            (k.clone(), v)
                        })
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let metadata: Map<String, Value> = table
                .metadata
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .collect();
            let doc = json!({ "columns": table.columns, "rows": rows, "metadata": metadata });
            let mut s = serde_json::to_string_pretty(&doc).expect("plain values");
            s.push('\n');
            s
        }
    }
}

/// Runs the command and writes the rendered table to `config.out` or
/// returns it for stdout.
pub fn execute(config: &RunConfig) -> CliResult<String> {
    let text = render(&run(config)?, config.format);
    if let Some(path) = &config.out {
        std::fs::write(path, &text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(text)
}
