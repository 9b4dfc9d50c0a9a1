//! Undirected simple graphs grown by preferential attachment.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Immutable undirected simple graph in compressed adjacency form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Network {
    /// Build from an edge list. Rejects self loops, duplicate edges and
    /// endpoints out of range.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::domain(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            if a == b {
                return Err(Error::domain(format!("self loop at node {a}")));
            }
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
        }
        for (node, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::domain(format!("parallel edge at node {node}")));
            }
        }
        Ok(Self::from_adjacency(adjacency))
    }

    fn from_adjacency(adjacency: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(adjacency.iter().map(Vec::len).sum());
        for list in adjacency {
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Network { offsets, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[u32] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.offsets
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or(0)
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    /// Each edge once, as `(low, high)`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .map(|&b| b as NodeId)
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        n == 0 || bfs(self, 0).iter().all(|d| d.is_some())
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "node {node} out of range for {} nodes",
                self.node_count()
            )))
        }
    }
}

fn bfs(net: &Network, source: NodeId) -> Vec<Option<usize>> {
    let mut dist = vec![None; net.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u].unwrap() + 1;
        for &v in net.neighbors(u) {
            let v = v as usize;
            if dist[v].is_none() {
                dist[v] = Some(next);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Hop distance from `source` to every node.
///
/// Fails on an invalid source or if some node is unreachable.
pub fn bfs_distances(net: &Network, source: NodeId) -> Result<Vec<usize>> {
    net.check_node(source)?;
    bfs(net, source)
        .into_iter()
        .enumerate()
        .map(|(node, d)| {
            d.ok_or_else(|| Error::domain(format!("node {node} unreachable from {source}")))
        })
        .collect()
}

/// Barabási–Albert growth.
///
/// Starts from a complete graph on `attach_count + 1` nodes; each further
/// node links to `attach_count` distinct existing nodes, each picked with
/// probability proportional to its current degree. Duplicate picks are
/// redrawn.
pub fn generate_pa_network<R: Rng + ?Sized>(
    n: usize,
    attach_count: usize,
    rng: &mut R,
) -> Result<Network> {
    if attach_count < 1 {
        return Err(Error::domain("attach_count must be at least 1"));
    }
    if n < attach_count + 1 {
        return Err(Error::domain(format!(
            "need at least attach_count + 1 = {} nodes, got {n}",
            attach_count + 1
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::domain(format!("too many nodes: {n}")));
    }

    let seed = attach_count + 1;
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    // Every edge contributes both endpoints, so a uniform pick from this
    // list is a degree-proportional pick of a node.
    let mut endpoints: Vec<u32> =
        Vec::with_capacity(seed * (seed - 1) + 2 * attach_count * (n - seed));
    for a in 0..seed {
        for b in (a + 1)..seed {
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
            endpoints.push(a as u32);
            endpoints.push(b as u32);
        }
    }

    let mut targets: Vec<u32> = Vec::with_capacity(attach_count);
    for node in seed..n {
        targets.clear();
        while targets.len() < attach_count {
            let pick = *endpoints.choose(rng).expect("seed graph has edges");
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for &t in &targets {
            adjacency[node].push(t);
            adjacency[t as usize].push(node as u32);
            endpoints.push(node as u32);
            endpoints.push(t);
        }
    }

    for list in &mut adjacency {
        list.sort_unstable();
    }
    let net = Network::from_adjacency(adjacency);
    debug_assert!(net.is_connected());
    Ok(net)
}

/// A node of exactly `target_degree`, chosen uniformly among all such
/// nodes, or `None` if the network has none.
pub fn find_node_with_degree<R: Rng + ?Sized>(
    net: &Network,
    target_degree: usize,
    rng: &mut R,
) -> Option<NodeId> {
    let candidates: Vec<NodeId> = (0..net.node_count())
        .filter(|&v| net.degree(v) == target_degree)
        .collect();
    candidates.choose(rng).copied()
}
