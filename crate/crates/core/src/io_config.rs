//! Plain-text `key=value` configuration and CSV output.
//!
//! Every table has a header row, fixed column order, and numbers printed
//! with at most 9 significant digits, so identical runs produce
//! byte-identical files. Files are written to a temporary sibling and
//! renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::decision::{CurvePoint, FixedPoints};
use crate::dynamics::{DEFAULT_ALPHA, DEFAULT_MAX_ITERS};
use crate::error::{Error, Result};
use crate::montecarlo::{
    CellResult, DegreeConditional, Preset, RunRecord, RunStatus, SweepResult, SweepSpec,
    DEFAULT_REGEN_LIMIT,
};
use crate::network::Network;
use crate::scenarios::{ScenarioConfig, ScenarioKind};

/// Keys understood by [`Config`], with the CLI flag spelling in the help.
pub const KEYS: &[&str] = &[
    "scenario",
    "phi",
    "degree",
    "runs",
    "seed",
    "n",
    "attach",
    "alpha",
    "max_iters",
    "regen_limit",
    "preset",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let key = key.trim().replace('-', "_");
    let key = match key.as_str() {
        "degrees" => "degree",
        "phis" => "phi",
        "master_seed" => "seed",
        "attach_count" => "attach",
        other => other,
    };
    KEYS.iter().copied().find(|k| *k == key)
}

/// Raw configuration values keyed by canonical name. Later insertions win,
/// so apply file values first and command-line values second.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<&'static str, String>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let canonical = canonical_key(key).ok_or_else(|| Error::config(key, "unknown setting"))?;
        self.values.insert(canonical, value.into());
        Ok(())
    }

    /// Parse whitespace-separated `key=value` tokens; spaces around `=` are
    /// allowed and `#` starts a comment that runs to the end of the line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Config::new();
        config.merge_text(text)?;
        Ok(config)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            let line = line.split('=').map(str::trim).collect::<Vec<_>>().join("=");
            for token in line.split_whitespace() {
                let (key, value) = token
                    .split_once('=')
                    .ok_or_else(|| Error::config(token, "expected key=value"))?;
                self.set(key, value)?;
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Values of `other` override those of `self`.
    pub fn overlay(mut self, other: &Config) -> Self {
        for (k, v) in &other.values {
            self.values.insert(k, v.clone());
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|raw| {
                raw.parse::<T>()
                    .map_err(|_| Error::config(key, format!("cannot parse `{raw}`")))
            })
            .transpose()
    }

    /// Build and validate a sweep. Missing settings fall back to the preset
    /// (desk unless `preset=full`) and the model defaults; `seed` has no
    /// default.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let kind: ScenarioKind = match self.get("scenario") {
            Some(raw) => raw.parse()?,
            None => ScenarioKind::Nearby,
        };
        let preset: Preset = match self.get("preset") {
            Some(raw) => raw.parse()?,
            None => Preset::Desk,
        };
        let phi_list = match self.get("phi") {
            Some(raw) => parse_float_list("phi", raw)?,
            None => preset.phi_list(kind),
        };
        let degree_list = match self.get("degree") {
            Some(raw) => parse_int_list("degree", raw)?,
            None => preset.degree_list(),
        };
        for &phi in &phi_list {
            kind.check_phi(phi)?;
        }

        let mut scenario = ScenarioConfig::new(
            kind,
            phi_list.first().copied().unwrap_or(45.0),
            degree_list.first().copied().unwrap_or(2),
        );
        scenario.alpha = self.parsed("alpha")?.unwrap_or(DEFAULT_ALPHA);
        scenario.n = self.parsed("n")?.unwrap_or(scenario.n);
        scenario.attach_count = self.parsed("attach")?.unwrap_or(scenario.attach_count);
        scenario.max_iters = self.parsed("max_iters")?.unwrap_or(DEFAULT_MAX_ITERS);

        let master_seed = self
            .parsed("seed")?
            .ok_or_else(|| Error::config("seed", "a master seed is required"))?;

        let spec = SweepSpec {
            scenario,
            phi_list,
            degree_list,
            runs_per_cell: self.parsed("runs")?.unwrap_or(preset.runs_per_cell()),
            master_seed,
            regen_limit: self.parsed("regen_limit")?.unwrap_or(DEFAULT_REGEN_LIMIT),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A single-cell sweep describing one run: exactly one angle and one
    /// innovator degree.
    pub fn single_run_spec(&self) -> Result<SweepSpec> {
        let mut config = self.clone();
        if config.get("phi").is_none() {
            match config.get("scenario") {
                Some("neutral") => config.set("phi", "45")?,
                _ => return Err(Error::config("phi", "an angle is required")),
            }
        }
        if config.get("degree").is_none() {
            return Err(Error::config("degree", "an innovator degree is required"));
        }
        config.values.entry("runs").or_insert_with(|| "1".into());
        let spec = config.sweep_spec()?;
        if spec.phi_list.len() != 1 {
            return Err(Error::config("phi", "a single run takes exactly one angle"));
        }
        if spec.degree_list.len() != 1 {
            return Err(Error::config(
                "degree",
                "a single run takes exactly one degree",
            ));
        }
        Ok(spec)
    }
}

/// Comma-separated items, each a number or an inclusive range `lo:hi` or
/// `lo:hi:step` (default step 1).
fn parse_float_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    let bad = || Error::config(key, format!("cannot parse `{raw}`"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let mut out = Vec::new();
    for item in raw.split(',').filter(|s| !s.trim().is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(num(x)?),
            [lo, hi] | [lo, hi, _] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let step = if parts.len() == 3 {
                    num(parts[2])?
                } else {
                    1.0
                };
                if step.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
                    || hi < lo
                    || !lo.is_finite()
                    || !hi.is_finite()
                {
                    return Err(bad());
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|k| lo + k as f64 * step));
            }
            _ => return Err(bad()),
        }
    }
    if out.is_empty() || out.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(out)
}

fn parse_int_list(key: &str, raw: &str) -> Result<Vec<usize>> {
    let bad = || Error::config(key, format!("cannot parse `{raw}`"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let mut out = Vec::new();
    for item in raw.split(',').filter(|s| !s.trim().is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(num(x)?),
            [lo, hi] | [lo, hi, _] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                if step == 0 || hi < lo {
                    return Err(bad());
                }
                out.extend((lo..=hi).step_by(step));
            }
            _ => return Err(bad()),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// `%.9g`-style rendering: 9 significant digits, trailing zeros dropped,
/// exponent form outside `[1e-5, 1e9)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-5..9).contains(&exponent) {
        let mantissa = trim_fraction(mantissa);
        return format!("{mantissa}e{exponent}");
    }
    let decimals = (8 - exponent).max(0) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Output file locations for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunArtifacts {
    pub cells_path: PathBuf,
    pub runs_path: PathBuf,
    pub nodes_path: PathBuf,
    pub edges_path: PathBuf,
    pub trajectory_path: PathBuf,
}

impl RunArtifacts {
    pub fn in_dir(dir: &Path) -> Self {
        RunArtifacts {
            cells_path: dir.join("cells.csv"),
            runs_path: dir.join("runs.csv"),
            nodes_path: dir.join("nodes.csv"),
            edges_path: dir.join("edges.csv"),
            trajectory_path: dir.join("trajectory.csv"),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_owned(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_owned(),
        source,
    }
}

/// CSV file written to a temporary sibling and renamed over `path` by
/// [`AtomicCsv::commit`]. Dropping it without committing leaves `path`
/// untouched.
pub struct AtomicCsv {
    path: PathBuf,
    writer: csv::Writer<NamedTempFile>,
}

impl AtomicCsv {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let tmp = NamedTempFile::new_in(dir).map_err(io_err(path))?;
        let mut writer = csv::Writer::from_writer(tmp);
        writer.write_record(header).map_err(csv_err(path))?;
        Ok(AtomicCsv {
            path: path.to_owned(),
            writer,
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(csv_err(&self.path))
    }

    pub fn commit(self) -> Result<()> {
        let path = self.path;
        let tmp = self.writer.into_inner().map_err(|e| Error::Io {
            path: path.clone(),
            source: e.into_error(),
        })?;
        tmp.as_file().sync_all().map_err(io_err(&path))?;
        tmp.persist(&path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e.error,
        })?;
        Ok(())
    }
}

pub const CELLS_HEADER: &[&str] = &[
    "phi_deg",
    "innovator_degree",
    "runs",
    "n_survival",
    "n_dominance",
    "n_completion",
    "mean_mbar_final",
    "sd_mbar_final",
    "mean_t_final",
    "n_regen_failures",
];
pub const RUNS_HEADER: &[&str] = &[
    "scenario",
    "phi_deg",
    "degree",
    "run_index",
    "mbar_final",
    "t_final",
    "outcome",
];
pub const CURVE_HEADER: &[&str] = &["m", "f_m"];
pub const FIXED_POINT_HEADER: &[&str] = &["location", "stability", "derivative"];
pub const EDGES_HEADER: &[&str] = &["src", "dst"];
pub const NODE_DEGREE_HEADER: &[&str] = &["id", "degree"];
pub const NODE_TABLE_HEADER: &[&str] = &["id", "degree", "beta", "distance", "m_final"];
pub const TRAJECTORY_HEADER: &[&str] = &["t", "mbar"];
pub const CONDITIONAL_HEADER: &[&str] = &[
    "degree",
    "runs",
    "cascades",
    "p_cascade_given_degree",
    "p_degree_given_cascade",
];

pub fn cell_row(c: &CellResult) -> [String; 10] {
    [
        fmt_num(c.phi_deg),
        c.innovator_degree.to_string(),
        c.runs.to_string(),
        c.n_survival.to_string(),
        c.n_dominance.to_string(),
        c.n_completion.to_string(),
        fmt_num(c.mean_mbar_final),
        fmt_num(c.sd_mbar_final),
        fmt_num(c.mean_t_final),
        c.n_regen_failures.to_string(),
    ]
}

pub fn run_row(r: &RunRecord) -> [String; 7] {
    let (mbar, t, outcome) = match &r.status {
        RunStatus::Finished(o) => (
            fmt_num(o.mbar_final),
            o.t_final.to_string(),
            o.class().to_string(),
        ),
        RunStatus::RegenFailure => (String::new(), String::new(), "regen_failure".into()),
    };
    [
        r.scenario.to_string(),
        fmt_num(r.phi_deg),
        r.degree.to_string(),
        r.run_index.to_string(),
        mbar,
        t,
        outcome,
    ]
}

/// Streams run records into `runs.csv` through a single appender.
pub struct RunsWriter(AtomicCsv);

impl RunsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(RunsWriter(AtomicCsv::create(path, RUNS_HEADER)?))
    }

    pub fn append(&mut self, record: &RunRecord) -> Result<()> {
        self.0.row(run_row(record))
    }

    pub fn commit(self) -> Result<()> {
        self.0.commit()
    }
}

pub fn write_cells(path: &Path, cells: &[CellResult]) -> Result<()> {
    let mut out = AtomicCsv::create(path, CELLS_HEADER)?;
    for c in cells {
        out.row(cell_row(c))?;
    }
    out.commit()
}

/// Write `cells.csv` and `runs.csv` for a finished sweep.
pub fn write_outputs(result: &SweepResult, artifacts: &RunArtifacts) -> Result<()> {
    let mut runs = RunsWriter::create(&artifacts.runs_path)?;
    for r in &result.records {
        runs.append(r)?;
    }
    runs.commit()?;
    write_cells(&artifacts.cells_path, &result.cells)
}

/// Run a sweep, streaming `runs.csv` as chunks complete, then write
/// `cells.csv`.
pub fn run_sweep_to_files(
    spec: &SweepSpec,
    workers: Option<usize>,
    artifacts: &RunArtifacts,
    mut keep: impl FnMut(&RunRecord),
) -> Result<Vec<CellResult>> {
    let mut runs = RunsWriter::create(&artifacts.runs_path)?;
    let cells = crate::montecarlo::execute_sweep_streaming(spec, workers, |r| {
        keep(r);
        runs.append(r)
    })?;
    runs.commit()?;
    write_cells(&artifacts.cells_path, &cells)?;
    Ok(cells)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes a table either to a writer (e.g. stdout) or atomically to a file.
pub fn write_table<W: Write>(
    out: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()
}

pub fn write_table_file(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut out = AtomicCsv::create(path, header)?;
    for row in rows {
        out.row(row)?;
    }
    out.commit()
}

pub fn curve_rows(curve: &[CurvePoint]) -> Vec<Vec<String>> {
    curve
        .iter()
        .map(|p| vec![fmt_num(p.m), fmt_num(p.f_m)])
        .collect()
}

/// A continuum of fixed points is reported as the single row
/// `continuum,marginal,1`.
pub fn fixed_point_rows(points: &FixedPoints) -> Vec<Vec<String>> {
    match points {
        FixedPoints::Continuum => vec![vec!["continuum".into(), "marginal".into(), "1".into()]],
        FixedPoints::Isolated(v) => v
            .iter()
            .map(|p| {
                vec![
                    fmt_num(p.location),
                    p.stability.to_string(),
                    fmt_num(p.derivative),
                ]
            })
            .collect(),
    }
}

pub fn edge_rows(net: &Network) -> Vec<Vec<String>> {
    net.edges()
        .map(|(a, b)| vec![a.to_string(), b.to_string()])
        .collect()
}

pub fn node_degree_rows(net: &Network) -> Vec<Vec<String>> {
    net.degrees()
        .into_iter()
        .enumerate()
        .map(|(id, d)| vec![id.to_string(), d.to_string()])
        .collect()
}

pub fn node_table_rows(
    net: &Network,
    beta: &[f64],
    distances: &[usize],
    m_final: &[f64],
) -> Vec<Vec<String>> {
    (0..net.node_count())
        .map(|id| {
            vec![
                id.to_string(),
                net.degree(id).to_string(),
                fmt_num(beta[id]),
                distances[id].to_string(),
                fmt_num(m_final[id]),
            ]
        })
        .collect()
}

pub fn trajectory_rows(mbar: &[f64]) -> Vec<Vec<String>> {
    mbar.iter()
        .enumerate()
        .map(|(t, m)| vec![t.to_string(), fmt_num(*m)])
        .collect()
}

pub fn conditional_rows(table: &[DegreeConditional]) -> Vec<Vec<String>> {
    table
        .iter()
        .map(|r| {
            vec![
                r.degree.to_string(),
                r.runs.to_string(),
                r.cascades.to_string(),
                fmt_num(r.p_cascade_given_degree),
                r.p_degree_given_cascade.map(fmt_num).unwrap_or_default(),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::execute_sweep;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(60.0), "60");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666667");
        assert_eq!(fmt_num(123456.789), "123456.789");
        assert_eq!(fmt_num(9.9999999999), "10");
        assert_eq!(fmt_num(1e-8), "1e-8");
        assert_eq!(fmt_num(-1.5e-7), "-1.5e-7");
        assert_eq!(fmt_num(0.000123456789123), "0.000123456789");
        assert_eq!(fmt_num(1234567891234.0), "1.23456789e12");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn example_config_parses() {
        let c = Config::parse("scenario=nearby phi=60 degrees=2:20 runs=100 seed=42").unwrap();
        let spaced =
            Config::parse("scenario = nearby\nphi =60  degrees= 2:20\nruns=100 seed=42").unwrap();
        assert_eq!(spaced, c);
        let spec = c.sweep_spec().unwrap();
        assert_eq!(spec.scenario.kind, ScenarioKind::Nearby);
        assert_eq!(spec.phi_list, [60.0]);
        assert_eq!(spec.degree_list, (2..=20).collect::<Vec<_>>());
        assert_eq!(spec.runs_per_cell, 100);
        assert_eq!(spec.master_seed, 42);
        assert_eq!(spec.scenario.n, 256);
        assert_eq!(spec.scenario.attach_count, 2);
        assert_eq!(spec.scenario.alpha, 0.1);
        assert_eq!(spec.scenario.max_iters, 10_000);
        assert_eq!(spec.regen_limit, 1000);
    }

    #[test]
    fn config_errors_name_the_key() {
        let err = Config::parse("scenario=neutral phi=60 seed=1")
            .unwrap()
            .sweep_spec()
            .unwrap_err();
        assert!(
            matches!(&err, Error::Config { key, .. } if key == "phi"),
            "{err}"
        );

        let err = Config::parse("").unwrap().sweep_spec().unwrap_err();
        assert!(
            matches!(&err, Error::Config { key, .. } if key == "seed"),
            "{err}"
        );

        let err = Config::parse("colour=blue").unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "colour"));

        let err = Config::parse("seed=1 n=255")
            .unwrap()
            .sweep_spec()
            .unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "n"));

        let err = Config::parse("seed=1 alpha=x")
            .unwrap()
            .sweep_spec()
            .unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "alpha"));

        assert!(Config::parse("seed").is_err());
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(
            parse_float_list("phi", "45:90:15").unwrap(),
            [45.0, 60.0, 75.0, 90.0]
        );
        assert_eq!(parse_float_list("phi", "60,70.5").unwrap(), [60.0, 70.5]);
        assert_eq!(
            parse_int_list("degree", "2:4,8,16:32:8").unwrap(),
            [2, 3, 4, 8, 16, 24, 32]
        );
        assert!(parse_int_list("degree", "4:2").is_err());
        assert!(parse_float_list("phi", "a").is_err());
    }

    #[test]
    fn command_line_overrides_file() {
        let file = Config::parse("# from file\nseed=1 runs=5\nphi=60").unwrap();
        let mut cli = Config::new();
        cli.set("runs", "7").unwrap();
        let spec = file.overlay(&cli).sweep_spec().unwrap();
        assert_eq!(spec.runs_per_cell, 7);
        assert_eq!(spec.master_seed, 1);
    }

    #[test]
    fn neutral_defaults_to_45_and_single_runs_need_coordinates() {
        let spec = Config::parse("scenario=neutral seed=3")
            .unwrap()
            .sweep_spec()
            .unwrap();
        assert_eq!(spec.phi_list, [45.0]);

        let single = Config::parse("scenario=neutral seed=3 degree=4")
            .unwrap()
            .single_run_spec()
            .unwrap();
        assert_eq!(single.runs_per_cell, 1);
        assert!(Config::parse("scenario=hubs seed=3 degree=4")
            .unwrap()
            .single_run_spec()
            .is_err());
        assert!(Config::parse("scenario=hubs seed=3 phi=60,70 degree=4")
            .unwrap()
            .single_run_spec()
            .is_err());
    }

    #[test]
    fn outputs_are_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let spec = Config::parse("scenario=random phi=60,75,90 degree=2,3,4,6 runs=3 seed=5")
            .unwrap()
            .sweep_spec()
            .unwrap();
        let artifacts = RunArtifacts::in_dir(dir.path());
        let result = execute_sweep(&spec).unwrap();
        write_outputs(&result, &artifacts).unwrap();
        let cells = fs::read_to_string(&artifacts.cells_path).unwrap();
        assert_eq!(cells.lines().count(), 13);
        assert_eq!(cells.lines().next().unwrap(), CELLS_HEADER.join(","));
        let runs = fs::read(&artifacts.runs_path).unwrap();

        let other = tempfile::tempdir().unwrap();
        let again = RunArtifacts::in_dir(other.path());
        run_sweep_to_files(&spec, Some(3), &again, |_| {}).unwrap();
        assert_eq!(fs::read_to_string(&again.cells_path).unwrap(), cells);
        assert_eq!(fs::read(&again.runs_path).unwrap(), runs);
    }

    #[test]
    fn unwritable_directory_names_the_path() {
        let path = Path::new("/nonexistent-dir-for-test/cells.csv");
        let err = write_cells(path, &[]).unwrap_err();
        assert!(
            err.to_string()
                .contains("/nonexistent-dir-for-test/cells.csv"),
            "{err}"
        );
        assert!(!err.is_usage());
    }
}
