//! Synchronous production / assimilation cycles on a fixed network.
//!
//! Each cycle every individual first emits a binary signal with probability
//! given by its decision rule applied to its current mental state, then
//! every individual moves its mental state towards the mean signal of its
//! neighbours: `m <- alpha * input + (1 - alpha) * m`.

use std::fmt;

use rand::Rng;

use crate::decision::DecisionRule;
use crate::error::{Error, Result};
use crate::network::{Network, NodeId};

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_MAX_ITERS: u64 = 10_000;

/// A node counts as converged once within this distance of 0 or 1.
pub const CONSENSUS_EPSILON: f64 = 1e-8;
pub const SURVIVAL_THRESHOLD: f64 = 1e-4;
pub const DOMINANCE_THRESHOLD: f64 = 0.5;
pub const COMPLETION_THRESHOLD: f64 = 1.0 - 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    m: Vec<f64>,
    s: Vec<bool>,
    t: u64,
}

impl SimState {
    /// Mental states.
    pub fn m(&self) -> &[f64] {
        &self.m
    }

    /// Signals of the most recent cycle; all `false` before the first one.
    pub fn signals(&self) -> &[bool] {
        &self.s
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn mbar(&self) -> f64 {
        self.m.iter().sum::<f64>() / self.m.len() as f64
    }

    pub fn consensus(&self) -> Option<Termination> {
        if self.m.iter().all(|&m| m < CONSENSUS_EPSILON) {
            Some(Termination::ConsensusZero)
        } else if self.m.iter().all(|&m| m > 1.0 - CONSENSUS_EPSILON) {
            Some(Termination::ConsensusOne)
        } else {
            None
        }
    }
}

/// Everyone at 0 except the innovator at 1.
pub fn init_state(net: &Network, innovator: NodeId) -> Result<SimState> {
    let n = net.node_count();
    if innovator >= n {
        return Err(Error::domain(format!(
            "innovator {innovator} out of range for {n} nodes"
        )));
    }
    let mut m = vec![0.0; n];
    m[innovator] = 1.0;
    Ok(SimState {
        m,
        s: vec![false; n],
        t: 0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    ConsensusZero,
    ConsensusOne,
    MaxIterations,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::ConsensusZero => "consensus_zero",
            Termination::ConsensusOne => "consensus_one",
            Termination::MaxIterations => "max_iterations",
        })
    }
}

/// Highest outcome class reached by a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeClass {
    Extinction,
    Survival,
    Dominance,
    Completion,
}

impl OutcomeClass {
    pub fn of_mbar(mbar: f64) -> Self {
        if mbar >= COMPLETION_THRESHOLD {
            OutcomeClass::Completion
        } else if mbar >= DOMINANCE_THRESHOLD {
            OutcomeClass::Dominance
        } else if mbar > SURVIVAL_THRESHOLD {
            OutcomeClass::Survival
        } else {
            OutcomeClass::Extinction
        }
    }
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeClass::Extinction => "extinction",
            OutcomeClass::Survival => "survival",
            OutcomeClass::Dominance => "dominance",
            OutcomeClass::Completion => "completion",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOutcome {
    pub mbar_final: f64,
    pub t_final: u64,
    pub terminated_by: Termination,
    pub survival: bool,
    pub dominance: bool,
    pub completion: bool,
}

impl RunOutcome {
    pub fn classify(mbar_final: f64, t_final: u64, terminated_by: Termination) -> Self {
        let class = OutcomeClass::of_mbar(mbar_final);
        RunOutcome {
            mbar_final,
            t_final,
            terminated_by,
            survival: class >= OutcomeClass::Survival,
            dominance: class >= OutcomeClass::Dominance,
            completion: class >= OutcomeClass::Completion,
        }
    }

    pub fn class(&self) -> OutcomeClass {
        OutcomeClass::of_mbar(self.mbar_final)
    }
}

/// A network populated with one decision rule per node and a shared
/// learning rate.
#[derive(Clone, Debug)]
pub struct Population<'a> {
    net: &'a Network,
    rules: Vec<DecisionRule>,
    alpha: f64,
}

impl<'a> Population<'a> {
    pub fn new(net: &'a Network, rules: Vec<DecisionRule>, alpha: f64) -> Result<Self> {
        if rules.len() != net.node_count() {
            return Err(Error::domain(format!(
                "{} decision rules for {} nodes",
                rules.len(),
                net.node_count()
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if let Some(v) = (0..net.node_count()).find(|&v| net.degree(v) == 0) {
            return Err(Error::domain(format!("node {v} has no neighbours")));
        }
        Ok(Population { net, rules, alpha })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// One production + assimilation cycle. Both phases read only values
    /// from before the phase, so node order is irrelevant.
    pub fn step<R: Rng + ?Sized>(&self, state: &mut SimState, rng: &mut R) {
        debug_assert_eq!(state.m.len(), self.rules.len());
        for ((s, &m), rule) in state.s.iter_mut().zip(&state.m).zip(&self.rules) {
            // One draw per node per cycle keeps the stream aligned
            // regardless of the rule.
            let u: f64 = rng.random();
            *s = u < rule.apply(m);
        }
        let keep = 1.0 - self.alpha;
        for (i, m) in state.m.iter_mut().enumerate() {
            let neighbors = self.net.neighbors(i);
            let heard = neighbors.iter().filter(|&&j| state.s[j as usize]).count();
            let input = heard as f64 / neighbors.len() as f64;
            *m = self.alpha * input + keep * *m;
        }
        state.t += 1;
    }

    /// Step from the innovator-only state until consensus or `max_iters`
    /// cycles.
    pub fn run<R: Rng + ?Sized>(
        &self,
        innovator: NodeId,
        max_iters: u64,
        rng: &mut R,
    ) -> Result<RunOutcome> {
        self.run_observed(innovator, max_iters, rng, |_| {})
            .map(|(outcome, _)| outcome)
    }

    /// As [`Population::run`], calling `observe` on the initial state and
    /// after every cycle. Also returns the final state.
    pub fn run_observed<R: Rng + ?Sized>(
        &self,
        innovator: NodeId,
        max_iters: u64,
        rng: &mut R,
        mut observe: impl FnMut(&SimState),
    ) -> Result<(RunOutcome, SimState)> {
        if max_iters < 1 {
            return Err(Error::domain("max_iters must be at least 1"));
        }
        let mut state = init_state(self.net, innovator)?;
        observe(&state);
        let terminated_by = loop {
            self.step(&mut state, rng);
            observe(&state);
            if let Some(reason) = state.consensus() {
                break reason;
            }
            if state.t >= max_iters {
                break Termination::MaxIterations;
            }
        };
        let outcome = RunOutcome::classify(state.mbar(), state.t, terminated_by);
        Ok((outcome, state))
    }
}

pub fn run_to_completion<R: Rng + ?Sized>(
    net: &Network,
    innovator: NodeId,
    rules: Vec<DecisionRule>,
    alpha: f64,
    max_iters: u64,
    rng: &mut R,
) -> Result<RunOutcome> {
    Population::new(net, rules, alpha)?.run(innovator, max_iters, rng)
}
