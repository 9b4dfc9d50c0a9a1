//! Decision functions mapping a mental state `m` (the believed probability
//! that the community uses the innovation) onto the probability of
//! producing the innovative signal.
//!
//! Two families are provided:
//!
//! * **clog**, the cognitive logistic. Fixed points at 0 and 1 for every
//!   temperature and bias, an unstable interior fixed point at `0.5 + beta`,
//!   and the identity map as the high-temperature limit.
//! * **logistic**, the textbook two-alternative SoftMax restricted to
//!   probability inputs. Kept for comparison: its fixed points move with
//!   temperature and bias, and it never reproduces probability matching.
//!
//! Both are parametrized by the categoriality angle `phi` (degrees), the
//! slope angle of the curve at its inflection point. `phi = 45` is
//! probability matching for the clog, `phi = 90` is a hard threshold.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Points in the sign-change scan used by [`find_fixed_points`] (intervals).
pub const SCAN_INTERVALS: usize = 10_000;
/// Residual `|f(m) - m|` accepted as a root.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Step for finite-difference derivatives.
pub const DERIVATIVE_STEP: f64 = 1e-6;
/// Band around slope 1 classified as marginal.
pub const SLOPE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Clog,
    Logistic,
}

impl Family {
    /// Smallest admissible categoriality angle for this family.
    pub fn min_phi(self) -> f64 {
        match self {
            Family::Clog => 45.0,
            Family::Logistic => 0.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Clog => "clog",
            Family::Logistic => "logistic",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clog" => Ok(Family::Clog),
            "logistic" => Ok(Family::Logistic),
            other => Err(Error::config(
                "family",
                format!("expected `clog` or `logistic`, got `{other}`"),
            )),
        }
    }
}

/// Categoriality angle and bias of one individual's decision rule.
///
/// The angle is accepted on `[0, 90]` so that the logistic family can be
/// analysed below 45 degrees; the clog operations reject angles under 45.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionParams {
    phi_deg: f64,
    beta: f64,
}

impl DecisionParams {
    pub fn new(phi_deg: f64, beta: f64) -> Result<Self> {
        if !phi_deg.is_finite() || !(0.0..=90.0).contains(&phi_deg) {
            return Err(Error::domain(format!(
                "phi must lie in [0, 90] degrees, got {phi_deg}"
            )));
        }
        if !beta.is_finite() || !(-0.5..=0.5).contains(&beta) {
            return Err(Error::domain(format!(
                "beta must lie in [-0.5, 0.5], got {beta}"
            )));
        }
        Ok(DecisionParams { phi_deg, beta })
    }

    pub fn unbiased(phi_deg: f64) -> Result<Self> {
        Self::new(phi_deg, 0.0)
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi_deg
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(self.phi_deg, beta)
    }

    pub fn tau(&self, family: Family) -> Result<f64> {
        phi_to_tau(self.phi_deg, family)
    }
}

/// Temperature corresponding to a categoriality angle.
///
/// clog: `tau = 1 / (2 (tan phi - 1))`, infinite at 45 and zero at 90.
/// logistic: `tau = 1 / (2 tan phi)`, infinite at 0 and zero at 90.
pub fn phi_to_tau(phi_deg: f64, family: Family) -> Result<f64> {
    let lo = family.min_phi();
    if !phi_deg.is_finite() || phi_deg < lo || phi_deg > 90.0 {
        return Err(Error::domain(format!(
            "{family}: phi must lie in [{lo}, 90] degrees, got {phi_deg}"
        )));
    }
    if phi_deg == 90.0 {
        return Ok(0.0);
    }
    if phi_deg == lo {
        return Ok(f64::INFINITY);
    }
    let slope = phi_deg.to_radians().tan();
    Ok(match family {
        Family::Clog => 1.0 / (2.0 * (slope - 1.0)),
        Family::Logistic => 1.0 / (2.0 * slope),
    })
}

/// A decision function with its temperature resolved, ready for repeated
/// evaluation. The limiting angles are separate variants so that the
/// smooth formulas never see a zero or infinite temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecisionRule {
    /// clog at 45 degrees.
    Identity,
    /// clog at 90 degrees: 0 below the threshold, 1 above, and the
    /// threshold itself is a fixed point.
    ClogStep {
        threshold: f64,
    },
    ClogSmooth {
        inv_tau: f64,
        beta: f64,
    },
    /// logistic at 0 degrees.
    LogisticFlat,
    /// logistic at 90 degrees: 0.5 exactly at the threshold.
    LogisticStep {
        threshold: f64,
    },
    LogisticSmooth {
        inv_tau: f64,
        beta: f64,
    },
}

impl DecisionRule {
    pub fn new(family: Family, params: &DecisionParams) -> Result<Self> {
        let tau = params.tau(family)?;
        let beta = params.beta;
        Ok(match family {
            Family::Clog if tau.is_infinite() => DecisionRule::Identity,
            Family::Clog if tau == 0.0 => DecisionRule::ClogStep {
                threshold: 0.5 + beta,
            },
            Family::Clog => DecisionRule::ClogSmooth {
                inv_tau: tau.recip(),
                beta,
            },
            Family::Logistic if tau.is_infinite() => DecisionRule::LogisticFlat,
            Family::Logistic if tau == 0.0 => DecisionRule::LogisticStep {
                threshold: 0.5 + beta,
            },
            Family::Logistic => DecisionRule::LogisticSmooth {
                inv_tau: tau.recip(),
                beta,
            },
        })
    }

    pub fn clog(params: &DecisionParams) -> Result<Self> {
        Self::new(Family::Clog, params)
    }

    /// Evaluate at `m`, which must already be known to lie in `[0, 1]`.
    #[inline]
    pub fn apply(&self, m: f64) -> f64 {
        match *self {
            DecisionRule::Identity => m,
            DecisionRule::ClogStep { threshold } => step(m, threshold, threshold),
            DecisionRule::ClogSmooth { inv_tau, beta } => {
                if m <= 0.0 {
                    0.0
                } else if m >= 1.0 {
                    1.0
                } else {
                    logistic_of(clog_smooth_log_odds(m, inv_tau, beta))
                }
            }
            DecisionRule::LogisticFlat => 0.5,
            DecisionRule::LogisticStep { threshold } => step(m, threshold, 0.5),
            DecisionRule::LogisticSmooth { inv_tau, beta } => {
                1.0 / (1.0 + ((1.0 - 2.0 * m + 2.0 * beta) * inv_tau).exp())
            }
        }
    }

    /// Log-odds `ln(f / (1 - f))` of the output, computed without passing
    /// through the probability so it does not saturate near 0 or 1.
    pub fn log_odds(&self, m: f64) -> f64 {
        match *self {
            DecisionRule::Identity => log_odds(m),
            DecisionRule::ClogSmooth { inv_tau, beta } => {
                if m <= 0.0 {
                    f64::NEG_INFINITY
                } else if m >= 1.0 {
                    f64::INFINITY
                } else {
                    clog_smooth_log_odds(m, inv_tau, beta)
                }
            }
            DecisionRule::LogisticSmooth { inv_tau, beta } => {
                (2.0 * m - 1.0 - 2.0 * beta) * inv_tau
            }
            _ => log_odds(self.apply(m)),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, DecisionRule::Identity)
    }
}

#[inline]
fn step(m: f64, threshold: f64, at_threshold: f64) -> f64 {
    if m < threshold {
        0.0
    } else if m > threshold {
        1.0
    } else {
        at_threshold
    }
}

#[inline]
fn clog_smooth_log_odds(m: f64, inv_tau: f64, beta: f64) -> f64 {
    m.ln() - (-m).ln_1p() + (2.0 * m - 1.0 - 2.0 * beta) * inv_tau
}

#[inline]
fn logistic_of(l: f64) -> f64 {
    1.0 / (1.0 + (-l).exp())
}

fn log_odds(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

fn check_probability(m: f64) -> Result<()> {
    if m.is_finite() && (0.0..=1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::domain(format!("m must be a probability, got {m}")))
    }
}

/// `clog_{tau,beta}(m)`.
pub fn clog_eval(m: f64, params: &DecisionParams) -> Result<f64> {
    check_probability(m)?;
    Ok(DecisionRule::clog(params)?.apply(m))
}

/// Biased logistic over a probability input.
pub fn logistic_eval(m: f64, params: &DecisionParams) -> Result<f64> {
    check_probability(m)?;
    Ok(DecisionRule::new(Family::Logistic, params)?.apply(m))
}

pub fn eval(family: Family, m: f64, params: &DecisionParams) -> Result<f64> {
    match family {
        Family::Clog => clog_eval(m, params),
        Family::Logistic => logistic_eval(m, params),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn classify(derivative: f64) -> Self {
        let slope = derivative.abs();
        if slope < 1.0 - SLOPE_TOLERANCE {
            Stability::Stable
        } else if slope > 1.0 + SLOPE_TOLERANCE {
            Stability::Unstable
        } else {
            Stability::Marginal
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint {
    pub location: f64,
    pub stability: Stability,
    pub derivative: f64,
}

/// Result of a fixed-point search.
#[derive(Clone, Debug, PartialEq)]
pub enum FixedPoints {
    /// Every point of `[0, 1]` is fixed (clog at 45 degrees).
    Continuum,
    Isolated(Vec<FixedPoint>),
}

impl FixedPoints {
    pub fn points(&self) -> &[FixedPoint] {
        match self {
            FixedPoints::Continuum => &[],
            FixedPoints::Isolated(v) => v,
        }
    }

    pub fn stable(&self) -> impl Iterator<Item = &FixedPoint> {
        self.points()
            .iter()
            .filter(|p| p.stability == Stability::Stable)
    }
}

/// Finite-difference slope of `rule` at `m`; one-sided within one step of
/// either end of the unit interval.
pub fn derivative(rule: &DecisionRule, m: f64) -> f64 {
    let h = DERIVATIVE_STEP;
    if m - h < 0.0 {
        (rule.apply(m + h) - rule.apply(m)) / h
    } else if m + h > 1.0 {
        (rule.apply(m) - rule.apply(m - h)) / h
    } else {
        (rule.apply(m + h) - rule.apply(m - h)) / (2.0 * h)
    }
}

/// All solutions of `f(m) = m` on `[0, 1]` with their stability.
///
/// Scans the residual on a uniform grid, takes grid points whose residual
/// is already below [`ROOT_TOLERANCE`] as roots (runs of such points collapse
/// to their middle), and bisects every strict sign change.
pub fn find_fixed_points(family: Family, params: &DecisionParams) -> Result<FixedPoints> {
    let rule = DecisionRule::new(family, params)?;
    if rule.is_identity() {
        return Ok(FixedPoints::Continuum);
    }

    let residual = |m: f64| rule.apply(m) - m;
    let grid: Vec<f64> = (0..=SCAN_INTERVALS)
        .map(|i| i as f64 / SCAN_INTERVALS as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&m| residual(m)).collect();
    let is_zero = |v: f64| v.abs() < ROOT_TOLERANCE;

    let mut roots = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if is_zero(values[i]) {
            let start = i;
            while i + 1 < grid.len() && is_zero(values[i + 1]) {
                i += 1;
            }
            roots.push(grid[(start + i) / 2]);
        } else if i + 1 < grid.len()
            && !is_zero(values[i + 1])
            && values[i].signum() != values[i + 1].signum()
        {
            roots.push(bisect(&residual, grid[i], grid[i + 1], values[i]));
        }
        i += 1;
    }

    let points = roots
        .into_iter()
        .map(|location| {
            let d = derivative(&rule, location);
            FixedPoint {
                location,
                stability: Stability::classify(d),
                derivative: d,
            }
        })
        .collect();
    Ok(FixedPoints::Isolated(points))
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, g_lo: f64) -> f64 {
    let lo_sign = g_lo.signum();
    // 200 halvings exhaust f64 resolution on [0, 1] many times over.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let v = g(mid);
        if v.abs() < ROOT_TOLERANCE {
            return mid;
        }
        if v.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub m: f64,
    pub f_m: f64,
}

/// The decision function sampled on `n_points` evenly spaced inputs
/// covering `[0, 1]` inclusive.
pub fn tabulate_curve(
    family: Family,
    params: &DecisionParams,
    n_points: usize,
) -> Result<Vec<CurvePoint>> {
    if n_points < 2 {
        return Err(Error::domain(format!(
            "a curve needs at least 2 points, got {n_points}"
        )));
    }
    let rule = DecisionRule::new(family, params)?;
    let last = (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            let m = i as f64 / last;
            CurvePoint {
                m,
                f_m: rule.apply(m),
            }
        })
        .collect())
}
