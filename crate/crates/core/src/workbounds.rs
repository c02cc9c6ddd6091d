//! Work bounds in units of `kT`: the standard free-energy difference, the
//! Renyi-family bounds optimized over `alpha`, and the recovery-fidelity
//! bounds obtained from the reversal of a thermal operation.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ThermalOperation;
use crate::config::TRANSITION_TOL;
use crate::divergence::{fidelity, relative_entropy, renyi_divergence, AlphaFamilySpec};
use crate::error::{Error, Result};
use crate::operator::{same_dim, DensityMatrix};
use crate::thermo::{gibbs_state, HamiltonianSpec};

/// Slack allowed when asserting analytic inequalities between computed
/// quantities.
const BOUND_SLACK: f64 = 1e-10;

/// `D(rho || tau) - D(sigma || tau)`.
///
/// Infinite when only `rho` violates the support condition (`+inf`) or only
/// `sigma` does (`-inf`); an error when both do.
pub fn delta(rho: &DensityMatrix, sigma: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    same_dim(tau.dim(), rho.dim())?;
    same_dim(tau.dim(), sigma.dim())?;
    let a = relative_entropy(rho, tau)?;
    let b = relative_entropy(sigma, tau)?;
    match (a.finite, b.finite) {
        (true, true) => Ok(a.value - b.value),
        (false, true) => Ok(f64::INFINITY),
        (true, false) => Ok(f64::NEG_INFINITY),
        (false, false) => Err(Error::Support("both states leave the support of the reference".into())),
    }
}

/// Sampling grid for the optimization over `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaGrid {
    points: Vec<f64>,
    refine_rounds: u32,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        let mut points: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
        points.extend([0.99, 1.0, 1.01, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, 50.0, f64::INFINITY]);
        Self { points, refine_rounds: 3 }
    }
}

impl AlphaGrid {
    pub fn new(mut points: Vec<f64>, refine_rounds: u32) -> Result<Self> {
        if points.is_empty() || points.iter().any(|a| a.is_nan() || *a < 0.0) {
            return Err(Error::InvalidParameter("alpha grid needs nonempty points >= 0".into()));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Self { points, refine_rounds })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn refine_rounds(&self) -> u32 {
        self.refine_rounds
    }

    /// Inserts a midpoint between consecutive finite points (and twice the
    /// largest finite point before `+inf`).
    pub fn doubled(&self) -> Self {
        let mut points = Vec::with_capacity(2 * self.points.len());
        for w in self.points.windows(2) {
            points.push(w[0]);
            if w[1].is_finite() {
                points.push(0.5 * (w[0] + w[1]));
            } else if w[0].is_finite() {
                points.push(2.0 * w[0].max(1.0));
            }
        }
        points.push(*self.points.last().expect("nonempty grid"));
        Self { points, refine_rounds: self.refine_rounds }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Min,
    Max,
}

impl Sense {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }
}

/// Result of optimizing `D_alpha(a || tau) - D_alpha(b || tau)` over `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaOptimum {
    /// Optimum over every sampled order, `+inf` included.
    pub value: f64,
    pub alpha: f64,
    /// Optimum over finite orders only.
    pub finite_value: f64,
    pub finite_alpha: f64,
    /// Value at the max-divergence endpoint, when the grid contains it.
    pub infinity_value: Option<f64>,
    /// True when the optimum is infinite.
    pub unbounded: bool,
    /// Every `(alpha, difference)` evaluated, sorted by `alpha`.
    pub trace: Vec<(f64, f64)>,
}

fn renyi_difference(a: &DensityMatrix, b: &DensityMatrix, tau: &DensityMatrix, alpha: f64) -> Result<f64> {
    let spec = AlphaFamilySpec::new(alpha)?;
    let da = renyi_divergence(a, tau, spec)?;
    let db = renyi_divergence(b, tau, spec)?;
    Ok(match (da.finite, db.finite) {
        (true, true) => da.value - db.value,
        (false, true) => f64::INFINITY,
        (true, false) => f64::NEG_INFINITY,
        (false, false) => f64::NAN,
    })
}

const GOLDEN_ITERATIONS: usize = 25;

/// Largest order reached when marching past the last finite grid point.
const MAX_MARCH_ALPHA: f64 = 1e4;

fn golden_section(
    f: &impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    sense: Sense,
    samples: &mut Vec<(f64, f64)>,
) -> Result<()> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    samples.push((c, fc));
    samples.push((d, fd));
    for _ in 0..GOLDEN_ITERATIONS {
        // NaN compares false, which shrinks towards the lower end
        if sense.better(fc, fd) || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
            samples.push((c, fc));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
            samples.push((d, fd));
        }
    }
    Ok(())
}

fn best_of(samples: &[(f64, f64)], sense: Sense, finite_only: bool) -> Option<(f64, f64)> {
    samples
        .iter()
        .filter(|(a, v)| !v.is_nan() && (!finite_only || a.is_finite()))
        .fold(None, |best: Option<(f64, f64)>, &(a, v)| match best {
            Some((_, bv)) if !sense.better(v, bv) => best,
            _ => Some((a, v)),
        })
}

fn optimize_alpha(
    a: &DensityMatrix,
    b: &DensityMatrix,
    tau: &DensityMatrix,
    grid: &AlphaGrid,
    sense: Sense,
) -> Result<AlphaOptimum> {
    same_dim(tau.dim(), a.dim())?;
    same_dim(tau.dim(), b.dim())?;
    let f = |alpha: f64| renyi_difference(a, b, tau, alpha);
    let grid_values: Vec<f64> = grid.points.par_iter().map(|&alpha| f(alpha)).collect::<Result<_>>()?;
    let mut samples: Vec<(f64, f64)> = grid.points.iter().copied().zip(grid_values).collect();

    let unbounded_value = match sense {
        Sense::Min => f64::NEG_INFINITY,
        Sense::Max => f64::INFINITY,
    };
    let unbounded = samples.iter().any(|&(_, v)| v == unbounded_value);

    if !unbounded {
        if let Some((alpha_star, _)) = best_of(&samples, sense, true) {
            let finite: Vec<f64> = grid.points.iter().copied().filter(|a| a.is_finite()).collect();
            let k = finite.iter().position(|&a| a == alpha_star).expect("optimum is a grid point");
            let mut lo = if k == 0 { finite[0] } else { finite[k - 1] };
            let hi = if k + 1 < finite.len() {
                finite[k + 1]
            } else if grid.points.last().is_some_and(|a| a.is_infinite()) {
                // the optimum may sit at a large finite order: march outward
                // by doubling while the objective keeps improving
                let (mut at, mut best) = best_of(&samples, sense, true).expect("finite samples exist");
                loop {
                    let next = 2.0 * at.max(1.0);
                    if next > MAX_MARCH_ALPHA {
                        break next;
                    }
                    let v = f(next)?;
                    samples.push((next, v));
                    if v.is_finite() && sense.better(v, best) {
                        lo = at;
                        at = next;
                        best = v;
                    } else {
                        break next;
                    }
                }
            } else {
                finite[k]
            };
            let (mut lo_r, mut hi_r) = (lo, hi);
            for round in 0..grid.refine_rounds {
                if hi_r > lo_r {
                    golden_section(&f, lo_r, hi_r, sense, &mut samples)?;
                }
                // recentre a narrower bracket on the incumbent for the next round
                let (incumbent, _) = best_of(&samples, sense, true).expect("finite samples exist");
                let half = (hi - lo) / 4f64.powi(round as i32 + 1);
                lo_r = (incumbent - half).max(lo);
                hi_r = (incumbent + half).min(hi);
            }
        }
    }

    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (alpha, value) =
        best_of(&samples, sense, false).ok_or_else(|| Error::Support("no order gives a defined difference".into()))?;
    let (finite_alpha, finite_value) = best_of(&samples, sense, true).unwrap_or((f64::NAN, f64::NAN));
    let infinity_value = samples.iter().find(|(a, _)| a.is_infinite()).map(|&(_, v)| v);
    Ok(AlphaOptimum {
        value,
        alpha,
        finite_value,
        finite_alpha,
        infinity_value,
        unbounded: value.is_infinite(),
        trace: samples,
    })
}

/// `inf_alpha [D_alpha(rho || tau) - D_alpha(sigma || tau)]`, the upper bound on
/// extractable work in the single-shot regime.
pub fn nano_gain_bound(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tau: &DensityMatrix,
    grid: &AlphaGrid,
) -> Result<AlphaOptimum> {
    optimize_alpha(rho, sigma, tau, grid, Sense::Min)
}

/// `sup_alpha [D_alpha(sigma || tau) - D_alpha(rho || tau)]`, the lower bound on
/// invested work in the single-shot regime. Checked to dominate the
/// relative-entropy difference.
pub fn nano_invest_bound(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tau: &DensityMatrix,
    grid: &AlphaGrid,
) -> Result<AlphaOptimum> {
    let opt = optimize_alpha(sigma, rho, tau, grid, Sense::Max)?;
    let standard = -delta(rho, sigma, tau)?;
    if opt.value < standard - BOUND_SLACK * standard.abs().max(1.0) {
        return Err(Error::BoundViolation(format!(
            "invest bound {} below relative-entropy difference {standard}",
            opt.value
        )));
    }
    Ok(opt)
}

/// Quantities along the recovery chain
/// `delta >= D(rho || R(sigma)) >= -log F(rho, R(sigma))` (squared fidelity).
#[derive(Debug, Clone)]
pub struct RecoveryChain {
    pub delta: f64,
    pub d_recovery: f64,
    pub neg_log_fidelity: f64,
    pub recovered: DensityMatrix,
}

impl RecoveryChain {
    /// Largest violation of the two inequalities (zero when both hold).
    pub fn violation(&self) -> f64 {
        let first = self.d_recovery - self.delta;
        let second = self.neg_log_fidelity - self.d_recovery;
        first.max(second).max(0.0)
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.delta >= self.d_recovery - slack && self.d_recovery >= self.neg_log_fidelity - slack
    }
}

fn neg_log(x: f64) -> f64 {
    if x > 0.0 { -x.ln() } else { f64::INFINITY }
}

fn check_transition(t: &ThermalOperation, from: &DensityMatrix, to: &DensityMatrix) -> Result<()> {
    same_dim(t.system_dim(), from.dim())?;
    same_dim(t.system_dim(), to.dim())?;
    let out = t.apply(from)?;
    let miss = out.trace_distance(to)?;
    if miss > TRANSITION_TOL {
        return Err(Error::TransitionMismatch(miss));
    }
    Ok(())
}

/// Evaluates the chain for `t` mapping `rho` to `sigma`, with `R` the reversal
/// of `t`. No inequality is asserted here.
pub fn recovery_chain(rho: &DensityMatrix, sigma: &DensityMatrix, t: &ThermalOperation) -> Result<RecoveryChain> {
    check_transition(t, rho, sigma)?;
    let recovered = t.reversal().apply(sigma)?;
    let tau = t.system_gibbs().state();
    let d_recovery = relative_entropy(rho, &recovered)?.value;
    let neg_log_fidelity = neg_log(fidelity(rho, &recovered)?.squared);
    Ok(RecoveryChain { delta: delta(rho, sigma, tau)?, d_recovery, neg_log_fidelity, recovered })
}

/// `-log F(rho, R(sigma))` with `R` the reversal of `t` (which must map `rho`
/// to `sigma`); checked not to exceed `delta`.
pub fn recovery_gain_bound(rho: &DensityMatrix, sigma: &DensityMatrix, t: &ThermalOperation) -> Result<f64> {
    let chain = recovery_chain(rho, sigma, t)?;
    if chain.delta < chain.neg_log_fidelity - BOUND_SLACK {
        return Err(Error::BoundViolation(format!(
            "delta {} below recovery bound {}",
            chain.delta, chain.neg_log_fidelity
        )));
    }
    Ok(chain.neg_log_fidelity)
}

/// `-log F(sigma, R(rho))` with `R` the reversal of `t`, where `t` maps `sigma`
/// to `rho` (the work-yielding direction of the transition).
pub fn recovery_invest_bound(rho: &DensityMatrix, sigma: &DensityMatrix, t: &ThermalOperation) -> Result<f64> {
    let chain = recovery_chain(sigma, rho, t)?;
    if chain.delta < chain.neg_log_fidelity - BOUND_SLACK {
        return Err(Error::BoundViolation(format!(
            "free-energy difference {} below recovery bound {}",
            chain.delta, chain.neg_log_fidelity
        )));
    }
    Ok(chain.neg_log_fidelity)
}

/// Both sides of `D(rho||tau) - D(sigma||tau) = D(rho (x) rho_E || V^dag (sigma (x) rho_E) V)`
/// for `sigma = t(rho)`.
pub fn recovery_rewrite(rho: &DensityMatrix, t: &ThermalOperation) -> Result<(f64, f64)> {
    let sigma = t.apply(rho)?;
    let lhs = delta(rho, &sigma, t.system_gibbs().state())?;
    let joint_in = crate::operator::tensor(rho, t.env_state())?;
    let back = t.reversal().apply_global(&sigma)?;
    let rhs = relative_entropy(&joint_in, &back)?.value;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorkMode {
    Std,
    NanoGain,
    NanoInvest,
}

/// Work bounds for `rho -> sigma` at inverse temperature `beta`, in units of `kT`.
#[derive(Debug, Clone, Serialize)]
pub struct WorkReport {
    pub mode: WorkMode,
    pub delta: f64,
    pub w_gain_std: f64,
    pub w_inv_std: f64,
    pub nano_gain_upper: Option<AlphaOptimum>,
    pub nano_inv_lower: Option<AlphaOptimum>,
    pub recovery_fidelity_bound: Option<f64>,
}

impl WorkReport {
    /// With `t`, the recovery bound is added: for gain modes `t` must map `rho`
    /// to `sigma`, for the invest mode it must map `sigma` to `rho`.
    pub fn compute(
        rho: &DensityMatrix,
        sigma: &DensityMatrix,
        system: &HamiltonianSpec,
        beta: f64,
        mode: WorkMode,
        grid: &AlphaGrid,
        t: Option<&ThermalOperation>,
    ) -> Result<Self> {
        let tau = gibbs_state(system, beta)?.into_state();
        let d = delta(rho, sigma, &tau)?;
        let mut report = Self {
            mode,
            delta: d,
            w_gain_std: d,
            w_inv_std: -d,
            nano_gain_upper: None,
            nano_inv_lower: None,
            recovery_fidelity_bound: None,
        };
        match mode {
            WorkMode::Std => {}
            WorkMode::NanoGain => report.nano_gain_upper = Some(nano_gain_bound(rho, sigma, &tau, grid)?),
            WorkMode::NanoInvest => report.nano_inv_lower = Some(nano_invest_bound(rho, sigma, &tau, grid)?),
        }
        if let Some(t) = t {
            report.recovery_fidelity_bound = Some(match mode {
                WorkMode::NanoInvest => recovery_invest_bound(rho, sigma, t)?,
                _ => recovery_gain_bound(rho, sigma, t)?,
            });
        }
        Ok(report)
    }

    /// The optimization trace of whichever nano bound was computed.
    pub fn alpha_trace(&self) -> &[(f64, f64)] {
        self.nano_gain_upper
            .as_ref()
            .or(self.nano_inv_lower.as_ref())
            .map(|o| o.trace.as_slice())
            .unwrap_or(&[])
    }
}
