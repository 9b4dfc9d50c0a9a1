//! Scenario definitions and allocation of functionally neutral biases.
//!
//! Bias magnitudes are drawn from `U[0, 0.5]` and always used in `+b / -b`
//! pairs, so the population as a whole favours neither variant. The
//! scenarios differ only in *who* gets which value: negative (innovation
//! favouring) values go to the best connected nodes (`hubs`), to the nodes
//! closest to the innovator (`nearby`), or to random nodes (`random`).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dynamics::{DEFAULT_ALPHA, DEFAULT_MAX_ITERS};
use crate::error::{Error, Result};
use crate::network::{bfs_distances, Network, NodeId};

pub const MAX_BIAS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    /// Probability matching (phi = 45), no bias.
    Neutral,
    /// Categorical rule, no bias.
    Unbiased,
    Hubs,
    Nearby,
    Random,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Neutral,
        ScenarioKind::Unbiased,
        ScenarioKind::Hubs,
        ScenarioKind::Nearby,
        ScenarioKind::Random,
    ];

    pub fn is_biased(self) -> bool {
        matches!(
            self,
            ScenarioKind::Hubs | ScenarioKind::Nearby | ScenarioKind::Random
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Neutral => "neutral",
            ScenarioKind::Unbiased => "unbiased",
            ScenarioKind::Hubs => "hubs",
            ScenarioKind::Nearby => "nearby",
            ScenarioKind::Random => "random",
        }
    }

    /// Stable small integer used in seed derivation.
    pub fn code(self) -> u64 {
        match self {
            ScenarioKind::Neutral => 0,
            ScenarioKind::Unbiased => 1,
            ScenarioKind::Hubs => 2,
            ScenarioKind::Nearby => 3,
            ScenarioKind::Random => 4,
        }
    }

    /// Checks the angle against what the scenario allows.
    pub fn check_phi(self, phi_deg: f64) -> Result<()> {
        if !(45.0..=90.0).contains(&phi_deg) {
            return Err(Error::config(
                "phi",
                format!("must lie in [45, 90], got {phi_deg}"),
            ));
        }
        match self {
            ScenarioKind::Neutral if phi_deg != 45.0 => Err(Error::config(
                "phi",
                format!("the neutral scenario requires phi = 45, got {phi_deg}"),
            )),
            ScenarioKind::Unbiased if phi_deg <= 45.0 => Err(Error::config(
                "phi",
                "the unbiased scenario requires phi > 45",
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::config(
                    "scenario",
                    format!("expected one of neutral, unbiased, hubs, nearby, random; got `{s}`"),
                )
            })
    }
}

/// Everything needed to execute one run, apart from the seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub phi_deg: f64,
    pub alpha: f64,
    pub n: usize,
    pub attach_count: usize,
    pub innovator_degree: usize,
    pub max_iters: u64,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind, phi_deg: f64, innovator_degree: usize) -> Self {
        ScenarioConfig {
            kind,
            phi_deg,
            alpha: DEFAULT_ALPHA,
            n: 256,
            attach_count: 2,
            innovator_degree,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.check_phi(self.phi_deg)?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config(
                "alpha",
                format!("must lie in (0, 1], got {}", self.alpha),
            ));
        }
        if self.attach_count < 1 {
            return Err(Error::config("attach", "must be at least 1"));
        }
        if self.n < self.attach_count + 1 {
            return Err(Error::config(
                "n",
                format!("must be at least attach + 1 = {}", self.attach_count + 1),
            ));
        }
        if !self.n.is_multiple_of(2) {
            return Err(Error::config(
                "n",
                format!(
                    "paired bias sampling needs an even population, got {}",
                    self.n
                ),
            ));
        }
        if self.innovator_degree < 1 || self.innovator_degree >= self.n {
            return Err(Error::config(
                "degree",
                format!(
                    "innovator degree must lie in [1, {}], got {}",
                    self.n - 1,
                    self.innovator_degree
                ),
            ));
        }
        if self.max_iters < 1 {
            return Err(Error::config("max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// `n / 2` magnitudes from `U[0, 0.5]`, each returned as `+b` then `-b`.
pub fn sample_neutral_biases<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "paired bias sampling needs an even count, got {n}"
        )));
    }
    let mut values = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let b = rng.random_range(0.0..=MAX_BIAS);
        values.push(b);
        values.push(-b);
    }
    Ok(values)
}

/// Assign bias values to nodes.
///
/// Values are sorted ascending, so the most innovation-favouring value goes
/// first in the node order of the scenario: degree descending (`hubs`), hop
/// distance from the innovator ascending (`nearby`), or a uniform random
/// permutation (`random`). Ties are broken uniformly at random. The
/// innovator takes part like any other node. Unbiased kinds get all zeros.
pub fn allocate_biases<R: Rng + ?Sized>(
    values: &[f64],
    net: &Network,
    innovator: NodeId,
    kind: ScenarioKind,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = net.node_count();
    if values.len() != n {
        return Err(Error::domain(format!(
            "{} bias values for {n} nodes",
            values.len()
        )));
    }
    if innovator >= n {
        return Err(Error::domain(format!(
            "innovator {innovator} out of range for {n} nodes"
        )));
    }
    if !kind.is_biased() {
        return Ok(vec![0.0; n]);
    }

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    match kind {
        ScenarioKind::Hubs => {
            order.sort_by_key(|&v| std::cmp::Reverse(net.degree(v)));
        }
        ScenarioKind::Nearby => {
            let dist = bfs_distances(net, innovator)?;
            order.sort_by_key(|&v| dist[v]);
        }
        ScenarioKind::Random => {}
        ScenarioKind::Neutral | ScenarioKind::Unbiased => unreachable!(),
    }

    let mut beta = vec![0.0; n];
    for (node, value) in order.into_iter().zip(sorted) {
        beta[node] = value;
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::generate_pa_network;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn parse_and_display() {
        for kind in ScenarioKind::ALL {
            assert_eq!(kind.as_str().parse::<ScenarioKind>().unwrap(), kind);
        }
        assert!("hub".parse::<ScenarioKind>().is_err());
    }

    #[test]
    fn phi_rules() {
        assert!(ScenarioKind::Neutral.check_phi(45.0).is_ok());
        assert!(ScenarioKind::Neutral.check_phi(60.0).is_err());
        assert!(ScenarioKind::Unbiased.check_phi(45.0).is_err());
        assert!(ScenarioKind::Unbiased.check_phi(46.0).is_ok());
        assert!(ScenarioKind::Hubs.check_phi(45.0).is_ok());
        assert!(ScenarioKind::Hubs.check_phi(91.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ScenarioConfig::new(ScenarioKind::Nearby, 60.0, 4)
            .validate()
            .is_ok());
        let mut odd = ScenarioConfig::new(ScenarioKind::Nearby, 60.0, 4);
        odd.n = 255;
        assert!(odd.validate().is_err());
        let mut deg = ScenarioConfig::new(ScenarioKind::Nearby, 60.0, 0);
        assert!(deg.validate().is_err());
        deg.innovator_degree = 256;
        assert!(deg.validate().is_err());
    }

    #[test]
    fn pairs_sum_to_zero() {
        let values = sample_neutral_biases(256, &mut rng(1)).unwrap();
        assert_eq!(values.len(), 256);
        assert_eq!(values.iter().sum::<f64>(), 0.0);
        for pair in values.chunks(2) {
            assert_eq!(pair[0], -pair[1]);
            assert!((0.0..=0.5).contains(&pair[0]));
        }
        assert!(sample_neutral_biases(3, &mut rng(1)).is_err());
    }

    #[test]
    fn magnitudes_average_a_quarter() {
        let mut r = rng(2);
        let mut total = 0.0;
        let rounds = 200;
        for _ in 0..rounds {
            total += sample_neutral_biases(256, &mut r)
                .unwrap()
                .iter()
                .map(|b| b.abs())
                .sum::<f64>();
        }
        let mean = total / (rounds * 256) as f64;
        // sd of U[0, 0.5] is 0.144; 25600 draws give a standard error < 0.001
        assert!((mean - 0.25).abs() < 0.005, "{mean}");
    }

    #[test]
    fn hubs_by_degree() {
        // degrees: node0 = 3, node1 = 2, node2 = 2, node3 = 1
        let net = Network::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
        let values = [0.4, -0.1, 0.1, -0.4];
        let mut seen_orders = std::collections::HashSet::new();
        for seed in 0..50 {
            let beta =
                allocate_biases(&values, &net, 3, ScenarioKind::Hubs, &mut rng(seed)).unwrap();
            assert_eq!(beta[0], -0.4);
            assert_eq!(beta[3], 0.4);
            let mut middle = [beta[1], beta[2]];
            seen_orders.insert(beta[1].to_bits());
            middle.sort_by(f64::total_cmp);
            assert_eq!(middle, [-0.1, 0.1]);
        }
        assert_eq!(seen_orders.len(), 2, "ties were not shuffled");
    }

    #[test]
    fn nearby_by_distance() {
        let path = Network::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let values = [0.3, -0.3, 0.2, -0.2];
        let beta = allocate_biases(&values, &path, 0, ScenarioKind::Nearby, &mut rng(0)).unwrap();
        assert_eq!(beta, [-0.3, -0.2, 0.2, 0.3]);
        let beta = allocate_biases(&values, &path, 3, ScenarioKind::Nearby, &mut rng(0)).unwrap();
        assert_eq!(beta, [0.3, 0.2, -0.2, -0.3]);
    }

    #[test]
    fn size_mismatch_and_unbiased_kinds() {
        let path = Network::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(
            allocate_biases(&[-0.2, 0.2], &path, 0, ScenarioKind::Nearby, &mut rng(0)).is_err()
        );
        let tri = Network::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let zeros = allocate_biases(
            &[0.1, -0.1, 0.2, -0.2],
            &tri,
            0,
            ScenarioKind::Unbiased,
            &mut rng(0),
        )
        .unwrap();
        assert_eq!(zeros, [0.0; 4]);
    }

    #[test]
    fn random_allocation_is_uniform_over_positions() {
        // Each of the 4 values should land on node 0 a quarter of the time.
        let net = Network::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let values = [-0.4, -0.1, 0.1, 0.4];
        let draws = 8000;
        let mut counts = [[0usize; 4]; 4];
        let mut r = rng(9);
        for _ in 0..draws {
            let beta = allocate_biases(&values, &net, 0, ScenarioKind::Random, &mut r).unwrap();
            for (node, b) in beta.iter().enumerate() {
                let k = values.iter().position(|v| v == b).unwrap();
                counts[node][k] += 1;
            }
        }
        let expected = draws as f64 / 4.0;
        for row in counts {
            let chi2: f64 = row
                .iter()
                .map(|&c| (c as f64 - expected).powi(2) / expected)
                .sum();
            // 3 degrees of freedom, p = 0.001 critical value
            assert!(chi2 < 16.27, "chi2 = {chi2}, counts {row:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn allocation_invariants(seed in any::<u64>(), kind_idx in 2usize..5) {
            let kind = ScenarioKind::ALL[kind_idx];
            let mut r = rng(seed);
            let net = generate_pa_network(64, 2, &mut r).unwrap();
            let innovator = (seed % 64) as usize;
            let values = sample_neutral_biases(64, &mut r).unwrap();
            let beta = allocate_biases(&values, &net, innovator, kind, &mut r).unwrap();
            let mut a = beta.clone();
            let mut b = values.clone();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert_eq!(&a, &b);
            // symmetric multiset: pairwise cancellation from both ends is exact
            for i in 0..32 {
                prop_assert_eq!(a[i] + a[63 - i], 0.0);
            }
            let dist = bfs_distances(&net, innovator).unwrap();
            for u in 0..64 {
                for v in 0..64 {
                    if kind == ScenarioKind::Hubs && net.degree(u) > net.degree(v) {
                        prop_assert!(beta[u] <= beta[v]);
                    }
                    if kind == ScenarioKind::Nearby && dist[u] < dist[v] {
                        prop_assert!(beta[u] <= beta[v]);
                    }
                }
            }
        }
    }
}
