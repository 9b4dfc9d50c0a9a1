//! Monte Carlo sweeps over categoriality x innovator degree x runs.
//!
//! Every run draws its own network, innovator and biases from a ChaCha8
//! stream seeded by a stateless hash of its coordinates, so results do not
//! depend on scheduling or on the number of worker threads.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decision::{DecisionParams, DecisionRule};
use crate::dynamics::{OutcomeClass, Population, RunOutcome};
use crate::error::{Error, Result};
use crate::network::{bfs_distances, find_node_with_degree, generate_pa_network, Network, NodeId};
use crate::scenarios::{allocate_biases, sample_neutral_biases, ScenarioConfig, ScenarioKind};

pub const DEFAULT_REGEN_LIMIT: usize = 1000;
pub const DEFAULT_RUNS_PER_CELL: usize = 100;
/// Networks sampled when estimating the degree distribution.
pub const DEGREE_PMF_NETWORKS: usize = 1000;

const DESK_PHIS: [f64; 10] = [45.0, 50.0, 55.0, 60.0, 65.0, 70.0, 75.0, 80.0, 85.0, 90.0];
const DESK_DEGREES: [usize; 9] = [2, 3, 4, 6, 8, 12, 16, 24, 32];

/// Runs executed between two flushes to the record sink.
const CHUNK: usize = 2048;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Template; `phi_deg` and `innovator_degree` are replaced per cell.
    pub scenario: ScenarioConfig,
    pub phi_list: Vec<f64>,
    pub degree_list: Vec<usize>,
    pub runs_per_cell: usize,
    pub master_seed: u64,
    pub regen_limit: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// 10 angles x 9 degrees x 100 runs.
    Desk,
    /// Every whole degree 45..=90 x innovator degrees 2..=55 x 500 runs.
    Full,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "full" => Ok(Preset::Full),
            other => Err(Error::config(
                "preset",
                format!("expected `desk` or `full`, got `{other}`"),
            )),
        }
    }
}

impl Preset {
    /// Angles admissible for `kind`: only 45 for neutral, 45 excluded for
    /// unbiased.
    pub fn phi_list(self, kind: ScenarioKind) -> Vec<f64> {
        let all: Vec<f64> = match self {
            Preset::Desk => DESK_PHIS.to_vec(),
            Preset::Full => (45..=90).map(f64::from).collect(),
        };
        all.into_iter()
            .filter(|&phi| kind.check_phi(phi).is_ok())
            .collect()
    }

    pub fn degree_list(self) -> Vec<usize> {
        match self {
            Preset::Desk => DESK_DEGREES.to_vec(),
            Preset::Full => (2..=55).collect(),
        }
    }

    pub fn runs_per_cell(self) -> usize {
        match self {
            Preset::Desk => DEFAULT_RUNS_PER_CELL,
            Preset::Full => 500,
        }
    }
}

impl SweepSpec {
    pub fn from_preset(preset: Preset, scenario: ScenarioConfig, master_seed: u64) -> Self {
        SweepSpec {
            phi_list: preset.phi_list(scenario.kind),
            degree_list: preset.degree_list(),
            runs_per_cell: preset.runs_per_cell(),
            scenario,
            master_seed,
            regen_limit: DEFAULT_REGEN_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.phi_list.is_empty() {
            return Err(Error::config("phi", "no angles to sweep"));
        }
        if self.degree_list.is_empty() {
            return Err(Error::config("degrees", "no innovator degrees to sweep"));
        }
        if self.runs_per_cell < 1 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.regen_limit < 1 {
            return Err(Error::config("regen_limit", "must be at least 1"));
        }
        for &phi in &self.phi_list {
            for &degree in &self.degree_list {
                self.cell_config(phi, degree).validate()?;
            }
        }
        Ok(())
    }

    pub fn cell_config(&self, phi_deg: f64, degree: usize) -> ScenarioConfig {
        ScenarioConfig {
            phi_deg,
            innovator_degree: degree,
            ..self.scenario.clone()
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.phi_list
            .iter()
            .flat_map(move |&phi| self.degree_list.iter().map(move |&d| (phi, d)))
    }

    pub fn cell_count(&self) -> usize {
        self.phi_list.len() * self.degree_list.len()
    }

    pub fn total_runs(&self) -> usize {
        self.cell_count() * self.runs_per_cell
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one run: each coordinate is folded in with the splitmix64
/// finalizer after adding the golden-ratio increment `0x9e3779b97f4a7c15`.
/// `phi` enters by its IEEE-754 bit pattern.
pub fn run_seed(
    master_seed: u64,
    kind: ScenarioKind,
    phi_deg: f64,
    degree: usize,
    run_index: usize,
) -> u64 {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    [
        kind.code(),
        phi_deg.to_bits(),
        degree as u64,
        run_index as u64,
    ]
    .into_iter()
    .fold(splitmix64(master_seed), |h, field| {
        splitmix64(h.wrapping_add(GOLDEN) ^ splitmix64(field))
    })
}

/// One network + innovator + bias draw and the dynamics it produced.
#[derive(Clone, Debug)]
pub struct Realization {
    pub network: Network,
    pub innovator: NodeId,
    pub beta: Vec<f64>,
    pub distances: Vec<usize>,
    pub outcome: RunOutcome,
    pub final_m: Vec<f64>,
    /// Mean mental state per cycle, starting at t = 0. Empty unless asked for.
    pub trajectory: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunDetail {
    pub seed: u64,
    /// Networks generated before one had a node of the target degree.
    pub networks_generated: usize,
    /// `None` when `regen_limit` networks all lacked the target degree.
    pub realization: Option<Realization>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RunStatus {
    Finished(RunOutcome),
    RegenFailure,
}

/// Compact per-run result, as streamed to `runs.csv`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunRecord {
    pub scenario: ScenarioKind,
    pub phi_deg: f64,
    pub degree: usize,
    pub run_index: usize,
    pub status: RunStatus,
}

impl RunRecord {
    pub fn outcome(&self) -> Option<&RunOutcome> {
        match &self.status {
            RunStatus::Finished(o) => Some(o),
            RunStatus::RegenFailure => None,
        }
    }
}

/// Execute one run in full detail.
pub fn simulate_run(
    spec: &SweepSpec,
    phi_deg: f64,
    degree: usize,
    run_index: usize,
    record_trajectory: bool,
) -> Result<RunDetail> {
    let config = spec.cell_config(phi_deg, degree);
    config.validate()?;
    let seed = run_seed(spec.master_seed, config.kind, phi_deg, degree, run_index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut networks_generated = 0;
    let mut found = None;
    while networks_generated < spec.regen_limit {
        networks_generated += 1;
        let net = generate_pa_network(config.n, config.attach_count, &mut rng)?;
        if let Some(v) = find_node_with_degree(&net, degree, &mut rng) {
            found = Some((net, v));
            break;
        }
    }
    let Some((network, innovator)) = found else {
        return Ok(RunDetail {
            seed,
            networks_generated,
            realization: None,
        });
    };

    let beta = if config.kind.is_biased() {
        let values = sample_neutral_biases(config.n, &mut rng)?;
        allocate_biases(&values, &network, innovator, config.kind, &mut rng)?
    } else {
        vec![0.0; config.n]
    };
    let rules = beta
        .iter()
        .map(|&b| DecisionRule::clog(&DecisionParams::new(phi_deg, b)?))
        .collect::<Result<Vec<_>>>()?;

    let mut trajectory = Vec::new();
    let population = Population::new(&network, rules, config.alpha)?;
    let (outcome, final_state) =
        population.run_observed(innovator, config.max_iters, &mut rng, |state| {
            if record_trajectory {
                trajectory.push(state.mbar());
            }
        })?;
    let distances = bfs_distances(&network, innovator)?;
    let final_m = final_state.m().to_vec();

    Ok(RunDetail {
        seed,
        networks_generated,
        realization: Some(Realization {
            network,
            innovator,
            beta,
            distances,
            outcome,
            final_m,
            trajectory,
        }),
    })
}

pub fn execute_run(
    spec: &SweepSpec,
    phi_deg: f64,
    degree: usize,
    run_index: usize,
) -> Result<RunRecord> {
    let detail = simulate_run(spec, phi_deg, degree, run_index, false)?;
    Ok(RunRecord {
        scenario: spec.scenario.kind,
        phi_deg,
        degree,
        run_index,
        status: match detail.realization {
            Some(r) => RunStatus::Finished(r.outcome),
            None => RunStatus::RegenFailure,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub phi_deg: f64,
    pub innovator_degree: usize,
    /// Runs that reached the dynamics (regeneration failures excluded).
    pub runs: usize,
    pub n_survival: usize,
    pub n_dominance: usize,
    pub n_completion: usize,
    /// NaN when `runs` is zero.
    pub mean_mbar_final: f64,
    /// Sample standard deviation; 0 for a single run, NaN for none.
    pub sd_mbar_final: f64,
    pub mean_t_final: f64,
    pub n_regen_failures: usize,
}

impl CellResult {
    pub fn rate(&self, class: OutcomeClass) -> f64 {
        let hits = match class {
            OutcomeClass::Extinction => self.runs - self.n_survival,
            OutcomeClass::Survival => self.n_survival,
            OutcomeClass::Dominance => self.n_dominance,
            OutcomeClass::Completion => self.n_completion,
        };
        hits as f64 / self.runs as f64
    }

    /// Every run in the cell failed to find its innovator.
    pub fn only_failures(&self) -> bool {
        self.runs == 0 && self.n_regen_failures > 0
    }
}

#[derive(Clone, Debug, Default)]
struct CellAccumulator {
    runs: usize,
    n_survival: usize,
    n_dominance: usize,
    n_completion: usize,
    sum_t: f64,
    // Welford
    mean: f64,
    m2: f64,
    n_regen_failures: usize,
}

impl CellAccumulator {
    fn add(&mut self, record: &RunRecord) {
        let Some(o) = record.outcome() else {
            self.n_regen_failures += 1;
            return;
        };
        self.runs += 1;
        self.n_survival += o.survival as usize;
        self.n_dominance += o.dominance as usize;
        self.n_completion += o.completion as usize;
        self.sum_t += o.t_final as f64;
        let delta = o.mbar_final - self.mean;
        self.mean += delta / self.runs as f64;
        self.m2 += delta * (o.mbar_final - self.mean);
    }

    fn finish(self, phi_deg: f64, innovator_degree: usize) -> CellResult {
        let (mean, sd, mean_t) = match self.runs {
            0 => (f64::NAN, f64::NAN, f64::NAN),
            1 => (self.mean, 0.0, self.sum_t),
            n => (
                self.mean,
                (self.m2 / (n - 1) as f64).sqrt(),
                self.sum_t / n as f64,
            ),
        };
        CellResult {
            phi_deg,
            innovator_degree,
            runs: self.runs,
            n_survival: self.n_survival,
            n_dominance: self.n_dominance,
            n_completion: self.n_completion,
            mean_mbar_final: mean,
            sd_mbar_final: sd,
            mean_t_final: mean_t,
            n_regen_failures: self.n_regen_failures,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub cells: Vec<CellResult>,
    pub records: Vec<RunRecord>,
}

impl SweepResult {
    pub fn has_failed_cells(&self) -> bool {
        self.cells.iter().any(CellResult::only_failures)
    }
}

/// Run every cell of `spec` on the global rayon pool.
pub fn execute_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let mut records = Vec::with_capacity(spec.total_runs());
    let cells = execute_sweep_streaming(spec, None, |r| {
        records.push(*r);
        Ok(())
    })?;
    Ok(SweepResult { cells, records })
}

/// Run every cell of `spec`, handing each record to `sink` in canonical
/// order (cell by cell in spec order, runs ascending) as soon as its chunk
/// completes. `workers` pins the thread count; `None` uses the global pool.
pub fn execute_sweep_streaming(
    spec: &SweepSpec,
    workers: Option<usize>,
    mut sink: impl FnMut(&RunRecord) -> Result<()>,
) -> Result<Vec<CellResult>> {
    spec.validate()?;
    let cells: Vec<(f64, usize)> = spec.cells().collect();
    let runs = spec.runs_per_cell;
    let total = cells.len() * runs;
    let job = |k: usize| {
        let (phi, degree) = cells[k / runs];
        execute_run(spec, phi, degree, k % runs)
    };

    let pool = match workers {
        Some(w) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::config("workers", e.to_string()))?,
        ),
        None => None,
    };

    let mut accumulators = vec![CellAccumulator::default(); cells.len()];
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let run_chunk = || {
            (start..end)
                .into_par_iter()
                .map(job)
                .collect::<Result<Vec<_>>>()
        };
        let chunk = match &pool {
            Some(p) => p.install(run_chunk),
            None => run_chunk(),
        }?;
        for (offset, record) in chunk.iter().enumerate() {
            accumulators[(start + offset) / runs].add(record);
            sink(record)?;
        }
        start = end;
    }

    Ok(accumulators
        .into_iter()
        .zip(cells)
        .map(|(acc, (phi, degree))| acc.finish(phi, degree))
        .collect())
}

/// Probability of each degree among nodes of generated networks, indexed
/// by degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreePmf(Vec<f64>);

impl DegreePmf {
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::domain("degree distribution has no mass"));
        }
        Ok(DegreePmf(
            counts.iter().map(|&c| c as f64 / total as f64).collect(),
        ))
    }

    pub fn get(&self, degree: usize) -> f64 {
        self.0.get(degree).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Pool node degrees over `networks` independently generated networks.
pub fn empirical_degree_pmf(
    n: usize,
    attach_count: usize,
    networks: usize,
    seed: u64,
) -> Result<DegreePmf> {
    if networks < 1 {
        return Err(Error::domain("need at least one network"));
    }
    let counts = (0..networks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(i as u64)));
            let net = generate_pa_network(n, attach_count, &mut rng)?;
            let mut counts = vec![0u64; n];
            for d in net.degrees() {
                counts[d] += 1;
            }
            Ok(counts)
        })
        .try_reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    DegreePmf::from_counts(&counts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeConditional {
    pub degree: usize,
    pub runs: usize,
    pub cascades: usize,
    pub p_cascade_given_degree: f64,
    /// `None` when no run of any degree produced a cascade.
    pub p_degree_given_cascade: Option<f64>,
}

/// Bayes inversion of per-degree cascade rates: `P(degree | cascade)` is
/// proportional to `P(cascade | degree) P(degree)`, normalized over the
/// degrees present in `records`. A run counts as a cascade when it reaches
/// `class`. Records of different angles are pooled.
pub fn conditional_degree_distribution(
    records: &[RunRecord],
    degree_pmf: &DegreePmf,
    class: OutcomeClass,
) -> Result<Vec<DegreeConditional>> {
    let mut by_degree: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for record in records {
        if let Some(o) = record.outcome() {
            let entry = by_degree.entry(record.degree).or_default();
            entry.0 += 1;
            entry.1 += (o.class() >= class) as usize;
        }
    }
    if by_degree.is_empty() {
        return Err(Error::domain("no finished runs to analyse"));
    }

    let weights: Vec<f64> = by_degree
        .iter()
        .map(|(&d, &(runs, hits))| hits as f64 / runs as f64 * degree_pmf.get(d))
        .collect();
    let total: f64 = weights.iter().sum();

    Ok(by_degree
        .into_iter()
        .zip(weights)
        .map(|((degree, (runs, cascades)), w)| DegreeConditional {
            degree,
            runs,
            cascades,
            p_cascade_given_degree: cascades as f64 / runs as f64,
            p_degree_given_cascade: (total > 0.0).then(|| w / total),
        })
        .collect())
}
