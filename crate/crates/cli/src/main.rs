//! `cascade`: decision-function tables, network samples, single runs and
//! Monte Carlo sweeps, all written as CSV.

use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cascade_core::decision::{find_fixed_points, tabulate_curve, DecisionParams, Family};
use cascade_core::dynamics::OutcomeClass;
use cascade_core::io_config::{
    self as io_config, Config, RunArtifacts, CONDITIONAL_HEADER, CURVE_HEADER, EDGES_HEADER,
    FIXED_POINT_HEADER, NODE_DEGREE_HEADER, NODE_TABLE_HEADER, TRAJECTORY_HEADER,
};
use cascade_core::montecarlo::{
    conditional_degree_distribution, empirical_degree_pmf, simulate_run, DEGREE_PMF_NETWORKS,
};
use cascade_core::network::generate_pa_network;
use cascade_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(
    name = "cascade",
    version,
    about = "Informational cascades on scale-free networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate a decision function and optionally list its fixed points.
    Fn(FnArgs),
    /// Generate one preferential-attachment network.
    Net(NetArgs),
    /// Execute one seeded run.
    Run(RunArgs),
    /// Execute a Monte Carlo sweep over angles and innovator degrees.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct FnArgs {
    #[arg(long, default_value = "clog", value_parser = ["clog", "logistic"])]
    family: String,
    /// Angle of the curve's central slope, in degrees.
    #[arg(long, default_value_t = 60.0)]
    phi: f64,
    /// Threshold shift; the curve is centred on 0.5 + beta.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    /// Number of evenly spaced samples on [0, 1].
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Print the fixed-point report instead of the curve (with --out-dir
    /// both files are written).
    #[arg(long)]
    fixed_points: bool,
    /// Accepted for uniformity with the other subcommands; unused.
    #[arg(long)]
    seed: Option<u64>,
    /// Write curve.csv and fixed_points.csv here instead of printing.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NetArgs {
    /// Number of nodes.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Edges attached by each new node.
    #[arg(long, default_value_t = 2)]
    attach: usize,
    /// Seed of the network's random stream.
    #[arg(long)]
    seed: u64,
    /// Write edges.csv and nodes.csv here; otherwise print the edge list.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Simulation settings shared by `run` and `sweep`. Unset flags fall back to
/// the `--config` file, then to the defaults shown.
#[derive(Args, Debug)]
struct ModelArgs {
    /// Plain-text key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// neutral, unbiased, hubs, nearby or random [default: nearby]
    #[arg(long)]
    scenario: Option<String>,
    /// Master seed; every run's random stream derives from it (required)
    #[arg(long)]
    seed: Option<u64>,
    /// Imitation weight of the neighbours' signals [default: 0.1]
    #[arg(long)]
    alpha: Option<String>,
    /// Number of nodes [default: 256]
    #[arg(long)]
    n: Option<String>,
    /// Edges attached by each new node [default: 2]
    #[arg(long)]
    attach: Option<String>,
    /// Cycle cap per run [default: 10000]
    #[arg(long)]
    max_iters: Option<String>,
    /// Networks tried per run to find the innovator degree [default: 1000]
    #[arg(long)]
    regen_limit: Option<String>,
}

impl ModelArgs {
    fn config(&self, extra: &[(&str, Option<String>)]) -> cascade_core::Result<Config> {
        let base = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::new(),
        };
        let mut flags = Config::new();
        let fields = [
            ("scenario", self.scenario.clone()),
            ("seed", self.seed.map(|s| s.to_string())),
            ("alpha", self.alpha.clone()),
            ("n", self.n.clone()),
            ("attach", self.attach.clone()),
            ("max_iters", self.max_iters.clone()),
            ("regen_limit", self.regen_limit.clone()),
        ];
        for (key, value) in fields.iter().chain(extra) {
            if let Some(value) = value {
                flags.set(key, value.clone())?;
            }
        }
        Ok(base.overlay(&flags))
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Angle in degrees [default: 45 for neutral, required otherwise]
    #[arg(long)]
    phi: Option<String>,
    /// Degree of the innovator node.
    #[arg(long)]
    degree: Option<String>,
    /// Index of the run within its cell; selects the random stream.
    #[arg(long, default_value_t = 0)]
    run_index: usize,
    /// Emit the final node table (id,degree,beta,distance,m_final).
    #[arg(long)]
    dump_nodes: bool,
    /// Emit the mean mental state per cycle (t,mbar).
    #[arg(long)]
    dump_trajectory: bool,
    /// Write nodes.csv / trajectory.csv / edges.csv here instead of printing.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Angles: list `a,b`, range `lo:hi` or `lo:hi:step` [default: from preset]
    #[arg(long)]
    phi: Option<String>,
    /// Innovator degrees, same syntax as --phi [default: from preset]
    #[arg(long, alias = "degree")]
    degrees: Option<String>,
    /// Runs per (phi, degree) cell [default: from preset]
    #[arg(long)]
    runs: Option<String>,
    /// desk (100 runs per cell) or full (500) [default: desk]
    #[arg(long)]
    preset: Option<String>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    workers: Option<usize>,
    /// Also write conditional.csv: cascade rate and P(degree | cascade) for
    /// this outcome level.
    #[arg(long, value_enum)]
    conditional: Option<CascadeLevel>,
    /// Directory for cells.csv and runs.csv.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CascadeLevel {
    Survival,
    Dominance,
    Completion,
}

impl From<CascadeLevel> for OutcomeClass {
    fn from(level: CascadeLevel) -> Self {
        match level {
            CascadeLevel::Survival => OutcomeClass::Survival,
            CascadeLevel::Dominance => OutcomeClass::Dominance,
            CascadeLevel::Completion => OutcomeClass::Completion,
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (verb, outcome) = match cli.command {
        Command::Fn(args) => ("fn", cmd_fn(args)),
        Command::Net(args) => ("net", cmd_net(args)),
        Command::Run(args) => ("run", cmd_run(args)),
        Command::Sweep(args) => ("sweep", cmd_sweep(args)),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("\nFor more information, try 'cascade {verb} --help'.");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_fn(args: FnArgs) -> CliResult {
    let family: Family = args.family.parse()?;
    let params = DecisionParams::new(args.phi, args.beta)?;
    let curve = tabulate_curve(family, &params, args.points)?;
    let curve_rows = io_config::curve_rows(&curve);

    match args.out_dir {
        Some(dir) => {
            io_config::ensure_dir(&dir)?;
            io_config::write_table_file(&dir.join("curve.csv"), CURVE_HEADER, curve_rows)?;
            if args.fixed_points {
                let points = find_fixed_points(family, &params)?;
                io_config::write_table_file(
                    &dir.join("fixed_points.csv"),
                    FIXED_POINT_HEADER,
                    io_config::fixed_point_rows(&points),
                )?;
            }
        }
        None if args.fixed_points => {
            let points = find_fixed_points(family, &params)?;
            let rows = io_config::fixed_point_rows(&points);
            io_config::write_table(io::stdout().lock(), FIXED_POINT_HEADER, rows)?;
        }
        None => io_config::write_table(io::stdout().lock(), CURVE_HEADER, curve_rows)?,
    }
    Ok(())
}

fn cmd_net(args: NetArgs) -> CliResult {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let net = generate_pa_network(args.n, args.attach, &mut rng)?;
    match args.out_dir {
        Some(dir) => {
            let artifacts = RunArtifacts::in_dir(&dir);
            io_config::ensure_dir(&dir)?;
            io_config::write_table_file(
                &artifacts.edges_path,
                EDGES_HEADER,
                io_config::edge_rows(&net),
            )?;
            io_config::write_table_file(
                &artifacts.nodes_path,
                NODE_DEGREE_HEADER,
                io_config::node_degree_rows(&net),
            )?;
        }
        None => io_config::write_table(
            io::stdout().lock(),
            EDGES_HEADER,
            io_config::edge_rows(&net),
        )?,
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> CliResult {
    if args.out_dir.is_none() && args.dump_nodes && args.dump_trajectory {
        return Err(Failure::Usage(
            "--dump-nodes and --dump-trajectory together need --out-dir".into(),
        ));
    }
    let config = args
        .model
        .config(&[("phi", args.phi.clone()), ("degree", args.degree.clone())])?;
    let spec = config.single_run_spec()?;
    let (phi, degree) = (spec.phi_list[0], spec.degree_list[0]);
    let detail = simulate_run(&spec, phi, degree, args.run_index, args.dump_trajectory)?;

    let Some(real) = detail.realization else {
        return Err(Failure::Runtime(format!(
            "no network with a node of degree {degree} in {} attempts (seed {})",
            detail.networks_generated, detail.seed
        )));
    };
    let o = &real.outcome;
    eprintln!(
        "scenario={} phi={} degree={} run_index={} seed={} innovator={} networks={} \
         mbar_final={} t_final={} terminated_by={} outcome={}",
        spec.scenario.kind,
        io_config::fmt_num(phi),
        degree,
        args.run_index,
        detail.seed,
        real.innovator,
        detail.networks_generated,
        io_config::fmt_num(o.mbar_final),
        o.t_final,
        o.terminated_by,
        o.class(),
    );

    let node_rows =
        || io_config::node_table_rows(&real.network, &real.beta, &real.distances, &real.final_m);
    match &args.out_dir {
        Some(dir) => {
            let artifacts = RunArtifacts::in_dir(dir);
            io_config::ensure_dir(dir)?;
            if args.dump_nodes {
                io_config::write_table_file(&artifacts.nodes_path, NODE_TABLE_HEADER, node_rows())?;
                io_config::write_table_file(
                    &artifacts.edges_path,
                    EDGES_HEADER,
                    io_config::edge_rows(&real.network),
                )?;
            }
            if args.dump_trajectory {
                io_config::write_table_file(
                    &artifacts.trajectory_path,
                    TRAJECTORY_HEADER,
                    io_config::trajectory_rows(&real.trajectory),
                )?;
            }
        }
        None if args.dump_nodes => {
            io_config::write_table(io::stdout().lock(), NODE_TABLE_HEADER, node_rows())?
        }
        None if args.dump_trajectory => io_config::write_table(
            io::stdout().lock(),
            TRAJECTORY_HEADER,
            io_config::trajectory_rows(&real.trajectory),
        )?,
        None => {}
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let config = args.model.config(&[
        ("phi", args.phi.clone()),
        ("degree", args.degrees.clone()),
        ("runs", args.runs.clone()),
        ("preset", args.preset.clone()),
    ])?;
    let spec = config.sweep_spec()?;
    if args.workers == Some(0) {
        return Err(Failure::Usage("--workers must be at least 1".into()));
    }
    let artifacts = RunArtifacts::in_dir(&args.out_dir);
    io_config::ensure_dir(&args.out_dir)?;

    let mut records = Vec::new();
    let keep_records = args.conditional.is_some();
    let cells = io_config::run_sweep_to_files(&spec, args.workers, &artifacts, |r| {
        if keep_records {
            records.push(*r);
        }
    })?;
    eprintln!(
        "{} cells, {} runs -> {}, {}",
        cells.len(),
        spec.total_runs(),
        display(&artifacts.cells_path),
        display(&artifacts.runs_path),
    );

    if let Some(level) = args.conditional {
        let sc = &spec.scenario;
        let pmf =
            empirical_degree_pmf(sc.n, sc.attach_count, DEGREE_PMF_NETWORKS, spec.master_seed)?;
        let table = conditional_degree_distribution(&records, &pmf, level.into())?;
        io_config::write_table_file(
            &args.out_dir.join("conditional.csv"),
            CONDITIONAL_HEADER,
            io_config::conditional_rows(&table),
        )?;
    }

    let failed: Vec<String> = cells
        .iter()
        .filter(|c| c.only_failures())
        .map(|c| {
            format!(
                "(phi={}, degree={})",
                io_config::fmt_num(c.phi_deg),
                c.innovator_degree
            )
        })
        .collect();
    if !failed.is_empty() {
        return Err(Failure::Runtime(format!(
            "no network with the target degree was found for any run of {}",
            failed.join(", ")
        )));
    }
    Ok(())
}

fn display(path: &Path) -> String {
    path.display().to_string()
}
