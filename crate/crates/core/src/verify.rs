//! Randomized property suites, run trial by trial with per-trial RNG streams.
//!
//! Every trial draws its inputs from `trial_rng(seed, stream, index)`, so the
//! outcome of trial `k` does not depend on thread scheduling or on how many
//! other trials run. A suite fails when any metric of any trial exceeds its
//! tolerance; the first failing trial (in index order) is kept as a
//! counterexample with all of its inputs.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalysis::{check_fixed_point_product, energy_change, sample_instance, FixtureKind};
use crate::channel::{
    haar_unitary, petz_recovery, rotated_recovery_average, QuadratureSpec, ThermalOperation,
};
use crate::config::Tolerances;
use crate::divergence::{fidelity, relative_entropy, renyi_divergence, sandwiched_renyi, AlphaFamilySpec};
use crate::error::{Error, Result};
use crate::json::{HamiltonianJson, MatrixJson};
use crate::operator::{
    conjugate_state, hermitian_part, matrix_function, max_abs_diff, partial_trace, partial_trace_matrix,
    reduce_state, tensor, trace_of_product, ComplexMatrix, CompositeSpace, DensityMatrix, HermitianOperator,
};
use crate::oscillator::OscillatorInstance;
use crate::random::{
    ginibre, random_density_matrix, random_diagonal_state, random_gibbs_preserving, random_hermitian,
    random_thermal_operation, trial_rng,
};
use crate::workbounds::{delta, recovery_chain, recovery_rewrite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Adjointness,
    Divergence,
    Identity,
    Chain,
    Petz,
    Rotated,
    Oscillator,
    Catalysis,
    Rewrite,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Adjointness,
        Suite::Divergence,
        Suite::Identity,
        Suite::Chain,
        Suite::Petz,
        Suite::Rotated,
        Suite::Oscillator,
        Suite::Catalysis,
        Suite::Rewrite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Adjointness => "adjointness",
            Suite::Divergence => "divergence",
            Suite::Identity => "identity",
            Suite::Chain => "chain",
            Suite::Petz => "petz",
            Suite::Rotated => "rotated",
            Suite::Oscillator => "oscillator",
            Suite::Catalysis => "catalysis",
            Suite::Rewrite => "rewrite",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|s| s.name()).collect();
            Error::InvalidParameter(format!("unknown suite `{name}` (expected one of {})", known.join(", ")))
        })
    }

    /// RNG stream name. The identity, chain and Petz suites share one so that
    /// they examine the same sampled thermal operations.
    fn stream(self) -> &'static str {
        match self {
            Suite::Identity | Suite::Chain | Suite::Petz => "thermal",
            other => other.name(),
        }
    }

    /// Metric names and the tolerance each is held to.
    pub fn metrics(self, tol: &Tolerances) -> Vec<(&'static str, f64)> {
        match self {
            Suite::Adjointness => vec![
                ("partial_trace_adjointness", tol.adjointness),
                ("identity_function_on_support", tol.adjointness),
                ("hermiticity", 1e-11),
            ],
            Suite::Divergence => vec![
                ("data_processing_violation", tol.data_processing),
                ("ordering_violation", tol.data_processing),
                ("half_order_vs_fidelity", tol.data_processing),
                // equalities, limited by logs of small eigenvalues
                ("unitary_invariance", tol.identity),
                ("ancilla_invariance", tol.identity),
                ("alpha_monotonicity_violation", tol.data_processing),
            ],
            Suite::Identity => vec![("identity_residual", tol.identity)],
            Suite::Chain => vec![("chain_violation", tol.chain)],
            Suite::Petz => vec![("petz_max_entry_diff", tol.petz)],
            Suite::Rotated => {
                vec![("bound_violation", tol.rotated), ("node_doubling_change", tol.quadrature)]
            }
            Suite::Oscillator => vec![
                ("population_residual", tol.oscillator),
                ("pipeline_residual", tol.oscillator),
            ],
            Suite::Catalysis => vec![
                ("global_product_residual", tol.product),
                ("energy_change", tol.chain),
                ("general_identity_residual", tol.identity),
                ("chain_violation", tol.chain),
            ],
            Suite::Rewrite => vec![("rewrite_residual", tol.identity)],
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    /// Index of the first trial; with `trials = 1` this replays one trial.
    pub first_trial: u64,
    pub system_dims: Vec<usize>,
    pub bath_dims: Vec<usize>,
    pub catalyst_dims: Vec<usize>,
    pub tolerances: Tolerances,
    pub quadrature: QuadratureSpec,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 200,
            first_trial: 0,
            system_dims: vec![2, 3],
            bath_dims: vec![2, 3, 4],
            catalyst_dims: vec![2],
            tolerances: Tolerances::default(),
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{what} must be a non-empty list of dims >= 1")));
        if self.system_dims.is_empty() || self.system_dims.contains(&0) {
            return bad("system dims");
        }
        if self.bath_dims.is_empty() || self.bath_dims.contains(&0) {
            return bad("bath dims");
        }
        if self.catalyst_dims.contains(&0) {
            return bad("catalyst dims");
        }
        Ok(())
    }

    /// Trial `k` walks the system x bath grid, system index fastest.
    fn dims(&self, trial: u64) -> (usize, usize) {
        let k = trial as usize;
        let ns = self.system_dims.len();
        (self.system_dims[k % ns], self.bath_dims[(k / ns) % self.bath_dims.len()])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub name: &'static str,
    pub tolerance: f64,
    /// Largest value seen; zero when the metric was never evaluated.
    pub max: f64,
    pub evaluated: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Trials whose premise did not hold; only unconditional metrics were checked.
    pub skipped: usize,
    /// Trials that raised an error (counted as failed too).
    pub errors: usize,
    pub metrics: Vec<MetricReport>,
    pub counterexample: Option<Value>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn metric(&self, name: &str) -> Option<&MetricReport> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::ok)
    }

    pub fn suite(&self, suite: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == suite)
    }

    pub fn first_counterexample(&self) -> Option<&Value> {
        self.suites.iter().find_map(|s| s.counterexample.as_ref())
    }
}

/// One evaluated trial: a value per metric (`None` when not evaluated).
struct Trial {
    values: Vec<Option<f64>>,
    skipped: bool,
    inputs: Value,
}

impl Trial {
    fn full(values: Vec<f64>, inputs: Value) -> Self {
        Self { values: values.into_iter().map(Some).collect(), skipped: false, inputs }
    }
}

enum Outcome {
    Ok(Trial),
    Err(String),
}

fn evaluate(suite: Suite, cfg: &VerifyConfig, trial: u64) -> Outcome {
    let mut rng = trial_rng(cfg.seed, suite.stream(), trial);
    let (ds, db) = cfg.dims(trial);
    let result = match suite {
        Suite::Adjointness => adjointness_trial(ds, db, &mut rng),
        Suite::Divergence => divergence_trial(ds, db, &mut rng),
        Suite::Identity | Suite::Chain | Suite::Petz => {
            random_thermal_operation(ds, db, &mut rng).and_then(|t| {
                let rho = random_density_matrix(ds, &mut rng)?;
                let inputs = ThermalFixture::from_instance(&t, &rho, suite, cfg.seed, trial).to_value();
                thermal_trial(suite, &t, &rho, inputs)
            })
        }
        Suite::Rotated => rotated_trial(ds, &cfg.bath_dims, trial, &cfg.quadrature, &mut rng),
        Suite::Oscillator => oscillator_trial(&mut rng),
        Suite::Catalysis => catalysis_trial(ds, db, &cfg.catalyst_dims, trial, &cfg.tolerances, &mut rng),
        Suite::Rewrite => rewrite_trial(ds, db, &mut rng),
    };
    match result {
        Ok(t) => Outcome::Ok(t),
        Err(e) => Outcome::Err(format!("{} ({})", e, e.kind())),
    }
}

/// Runs `cfg.trials` trials of one suite in parallel and reduces in index order.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let outcomes: Vec<(u64, Outcome)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|k| {
            let trial = cfg.first_trial + k;
            (trial, evaluate(suite, cfg, trial))
        })
        .collect();
    let specs = suite.metrics(&cfg.tolerances);
    Ok(reduce(suite, cfg.seed, &specs, outcomes))
}

fn reduce(suite: Suite, seed: u64, specs: &[(&'static str, f64)], outcomes: Vec<(u64, Outcome)>) -> SuiteReport {
    let mut metrics: Vec<MetricReport> = specs
        .iter()
        .map(|&(name, tolerance)| MetricReport { name, tolerance, max: 0.0, evaluated: 0 })
        .collect();
    let mut report = SuiteReport {
        suite,
        trials: outcomes.len(),
        passed: 0,
        failed: 0,
        skipped: 0,
        errors: 0,
        metrics: Vec::new(),
        counterexample: None,
    };
    for (trial, outcome) in outcomes {
        let failure = match outcome {
            Outcome::Err(msg) => {
                report.errors += 1;
                Some(json!({ "suite": suite.name(), "seed": seed, "trial": trial, "error": msg }))
            }
            Outcome::Ok(t) => {
                let mut exceeded = Vec::new();
                for (m, v) in metrics.iter_mut().zip(&t.values) {
                    if let Some(v) = *v {
                        m.evaluated += 1;
                        // NaN counts as a failure and poisons the maximum
                        if v.is_nan() || v > m.max {
                            m.max = if v.is_nan() { f64::NAN } else { v };
                        }
                        if v > m.tolerance || v.is_nan() {
                            exceeded.push(json!({ "metric": m.name, "value": v, "tolerance": m.tolerance }));
                        }
                    }
                }
                if !exceeded.is_empty() {
                    Some(json!({
                        "suite": suite.name(),
                        "seed": seed,
                        "trial": trial,
                        "exceeded": exceeded,
                        "inputs": t.inputs,
                    }))
                } else {
                    if t.skipped {
                        report.skipped += 1;
                    } else {
                        report.passed += 1;
                    }
                    None
                }
            }
        };
        if let Some(dump) = failure {
            report.failed += 1;
            if report.counterexample.is_none() {
                report.counterexample = Some(dump);
            }
        }
    }
    report.metrics = metrics;
    report
}

pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<VerifyReport> {
    let reports = suites.iter().map(|&s| run_suite(s, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { seed: cfg.seed, trials: cfg.trials, suites: reports })
}

pub fn run_all(cfg: &VerifyConfig) -> Result<VerifyReport> {
    run_suites(&Suite::ALL, cfg)
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixJson::from_matrix(m)).unwrap_or(Value::Null)
}

fn adjointness_trial<R: Rng + ?Sized>(ds: usize, db: usize, rng: &mut R) -> Result<Trial> {
    let d = ds * db;
    let space = CompositeSpace::new(vec![ds, db])?;
    let a = random_hermitian(ds, rng);
    let m = random_hermitian(d, rng);
    let lhs = tensor(&a, &HermitianOperator::identity(db))?.expectation(&m)?;
    let rhs = a.expectation(&partial_trace(&m, &space, &[0])?)?;
    let scale = 1.0f64.max(lhs.abs());
    let adjointness = (lhs - rhs).abs() / scale;

    // partial trace of a non-Hermitian input keeps the Hermitian structure of its parts
    let raw = partial_trace_matrix(m.matrix(), &space, &[1])?;
    let hermiticity = max_abs_diff(&raw, &raw.adjoint());

    let rank = 1 + rng.random_range(0..d);
    let g = ginibre(d, rank, rng);
    let rho = DensityMatrix::from_matrix_normalized(hermitian_part(&(&g * g.adjoint())))?;
    let id = matrix_function(rho.as_operator(), |x| x, true)?;
    let identity_fn = id.max_abs_diff(rho.as_operator());

    Ok(Trial::full(
        vec![adjointness, identity_fn, hermiticity],
        json!({ "dims": [ds, db], "a": matrix_value(a.matrix()), "m": matrix_value(m.matrix()), "rho": matrix_value(rho.matrix()) }),
    ))
}

const MONOTONICITY_GRID: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, f64::INFINITY];

fn divergence_trial<R: Rng + ?Sized>(ds: usize, db: usize, rng: &mut R) -> Result<Trial> {
    let d = ds * db;
    let space = CompositeSpace::new(vec![ds, db])?;
    let rho = random_density_matrix(d, rng)?;
    let sigma = random_density_matrix(d, rng)?;
    let full = relative_entropy(&rho, &sigma)?.value;
    let reduced = relative_entropy(&reduce_state(&rho, &space, &[0])?, &reduce_state(&sigma, &space, &[0])?)?.value;
    let dpi = (reduced - full).max(0.0);

    let neg_log_f = -fidelity(&rho, &sigma)?.squared.ln();
    let ordering = (neg_log_f - full).max(0.0);
    let half = (sandwiched_renyi(&rho, &sigma, 0.5)?.value - neg_log_f).abs();

    let u = haar_unitary(d, rng);
    let rotated = relative_entropy(&conjugate_state(&rho, &u)?, &conjugate_state(&sigma, &u)?)?.value;
    let scale = full.abs().max(1.0);
    let unitary = (rotated - full).abs() / scale;

    let gamma = random_density_matrix(2, rng)?;
    let with_ancilla = relative_entropy(&tensor(&rho, &gamma)?, &tensor(&sigma, &gamma)?)?.value;
    let ancilla = (with_ancilla - full).abs() / scale;

    let p = random_diagonal_state(ds, rng)?;
    let q = random_diagonal_state(ds, rng)?;
    let mut values = Vec::with_capacity(MONOTONICITY_GRID.len());
    for &alpha in &MONOTONICITY_GRID {
        values.push(renyi_divergence(&p, &q, AlphaFamilySpec::new(alpha)?)?.value);
    }
    let monotone = values.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max);

    Ok(Trial::full(
        vec![dpi, ordering, half, unitary, ancilla, monotone],
        json!({
            "dims": [ds, db],
            "rho": matrix_value(rho.matrix()),
            "sigma": matrix_value(sigma.matrix()),
            "unitary": matrix_value(&u),
            "ancilla": matrix_value(gamma.matrix()),
            "commuting_rho": matrix_value(p.matrix()),
            "commuting_sigma": matrix_value(q.matrix()),
        }),
    ))
}

fn thermal_trial(suite: Suite, t: &ThermalOperation, rho: &DensityMatrix, inputs: Value) -> Result<Trial> {
    let value = match suite {
        Suite::Identity => {
            let (lhs, rhs) = recovery_rewrite(rho, t)?;
            (lhs - rhs).abs()
        }
        Suite::Chain => {
            let sigma = t.apply(rho)?;
            recovery_chain(rho, &sigma, t)?.violation()
        }
        Suite::Petz => {
            let reversal = t.reversal().superoperator()?;
            reversal.max_abs_diff(&petz_recovery(t, t.system_gibbs().state())?.map)
        }
        _ => unreachable!("not a thermal-operation suite"),
    };
    Ok(Trial::full(vec![value], inputs))
}

fn rotated_trial<R: Rng + ?Sized>(
    ds: usize,
    bath_dims: &[usize],
    trial: u64,
    quadrature: &QuadratureSpec,
    rng: &mut R,
) -> Result<Trial> {
    let components = 2 + (trial % 2) as usize;
    let gp = random_gibbs_preserving(ds, bath_dims, components, rng)?;
    let rho = random_density_matrix(ds, rng)?;
    let sigma = gp.map.apply_state(&rho)?;
    let gap = delta(&rho, &sigma, &gp.tau)?;
    let bound = |q: &QuadratureSpec| -> Result<f64> {
        let avg = rotated_recovery_average(&gp.map, &gp.tau, &sigma, q)?;
        Ok(-2.0 * fidelity(&rho, &avg)?.root.ln())
    };
    let coarse = bound(quadrature)?;
    let fine = bound(&quadrature.doubled())?;
    Ok(Trial::full(
        vec![(coarse - gap).max(0.0), (coarse - fine).abs()],
        json!({
            "system": HamiltonianJson::from_spec(&gp.system),
            "beta": gp.beta,
            "superoperator": matrix_value(gp.map.matrix()),
            "rho": matrix_value(rho.matrix()),
            "nodes": quadrature.nodes,
            "order": quadrature.order,
        }),
    ))
}

fn oscillator_trial<R: Rng + ?Sized>(rng: &mut R) -> Result<Trial> {
    let beta_e: f64 = rng.random_range(0.25..3.0);
    let lower = -(-beta_e).exp_m1();
    let p0 = lower + (1.0 - lower) * rng.random::<f64>();
    let inst = OscillatorInstance::new(beta_e, p0, None)?;
    let op = inst.thermal_operation()?;
    let forward = op.apply(&inst.ground_state())?;
    let recovered = op.reversal().apply(&inst.mixed_state())?;
    let p0r = inst.closed_form_p0r();
    let populations = [
        (forward.matrix()[(0, 0)].re - p0).abs(),
        (forward.matrix()[(1, 1)].re - (1.0 - p0)).abs(),
        (recovered.matrix()[(0, 0)].re - p0r).abs(),
        (recovered.matrix()[(1, 1)].re - (1.0 - p0r)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let pipeline = (inst.invest_bound() - inst.invest_bound_pipeline()?).abs();
    Ok(Trial::full(
        vec![populations, pipeline],
        json!({ "beta_e": beta_e, "p0": p0, "n_max": inst.n_max() }),
    ))
}

fn catalysis_trial<R: Rng + ?Sized>(
    ds: usize,
    db: usize,
    catalyst_dims: &[usize],
    trial: u64,
    tol: &Tolerances,
    rng: &mut R,
) -> Result<Trial> {
    let kind = FixtureKind::ALL[(trial % FixtureKind::ALL.len() as u64) as usize];
    let inst = sample_instance(kind, ds, db, catalyst_dims, rng)?;
    let rho = random_density_matrix(ds, rng)?;
    let energy = energy_change(&inst, &rho)?.abs();
    let fixed = check_fixed_point_product(&inst, tol.product)?;
    let op = inst.operation();
    let inputs = json!({
        "kind": kind,
        "dims": [ds, db],
        "catalyst_dims": op.catalysts().iter().map(|c| c.state.dim()).collect::<Vec<_>>(),
        "beta": op.beta(),
        "system": HamiltonianJson::from_spec(op.system()),
        "bath": HamiltonianJson::from_spec(op.bath()),
        "catalyst_hamiltonians": op.catalysts().iter().map(|c| HamiltonianJson::from_spec(&c.hamiltonian)).collect::<Vec<_>>(),
        "catalyst_states": op.catalysts().iter().map(|c| matrix_value(c.state.matrix())).collect::<Vec<_>>(),
        "unitary": matrix_value(op.unitary().matrix()),
        "rho": matrix_value(rho.matrix()),
    });
    if !fixed.premise_holds {
        return Ok(Trial { values: vec![None, Some(energy), None, None], skipped: true, inputs });
    }
    let (lhs, rhs) = recovery_rewrite(&rho, op)?;
    let sigma = op.apply(&rho)?;
    let chain = recovery_chain(&rho, &sigma, op)?.violation();
    Ok(Trial::full(vec![fixed.global_residual, energy, (lhs - rhs).abs(), chain], inputs))
}

fn rewrite_trial<R: Rng + ?Sized>(dc: usize, dd: usize, rng: &mut R) -> Result<Trial> {
    let space = CompositeSpace::new(vec![dc, dd])?;
    let eta = random_density_matrix(dc * dd, rng)?;
    let theta = random_density_matrix(dc * dd, rng)?;
    let eta_d = reduce_state(&eta, &space, &[1])?;
    let theta_d = reduce_state(&theta, &space, &[1])?;
    let lhs = relative_entropy(&eta, &theta)?.value - relative_entropy(&eta_d, &theta_d)?.value;
    let ic = ComplexMatrix::identity(dc, dc);
    let bracket = eta.log() - theta.log() - ic.kronecker(&eta_d.log()) + ic.kronecker(&theta_d.log());
    let rhs = trace_of_product(eta.matrix(), &bracket).re;
    Ok(Trial::full(
        vec![(lhs - rhs).abs()],
        json!({ "dims": [dc, dd], "eta": matrix_value(eta.matrix()), "theta": matrix_value(theta.matrix()) }),
    ))
}

/// A single thermal operation and input state, in a form that can be written
/// out and replayed. The unitary is not required to conserve energy, so that
/// broken instances can be fed back through the suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalFixture {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    pub beta: f64,
    pub system: HamiltonianJson,
    pub bath: HamiltonianJson,
    pub unitary: MatrixJson,
    pub rho: MatrixJson,
}

impl ThermalFixture {
    pub fn from_instance(t: &ThermalOperation, rho: &DensityMatrix, suite: Suite, seed: u64, trial: u64) -> Self {
        Self {
            suite: Some(suite.name().to_string()),
            seed: Some(seed),
            trial: Some(trial),
            beta: t.beta(),
            system: HamiltonianJson::from_spec(t.system()),
            bath: HamiltonianJson::from_spec(t.bath()),
            unitary: MatrixJson::from_matrix(t.unitary().matrix()),
            rho: MatrixJson::from(rho),
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }

    /// Builds the operation without the energy-conservation check.
    pub fn operation(&self) -> Result<ThermalOperation> {
        ThermalOperation::unchecked(self.unitary.to_matrix()?, self.system.to_spec()?, self.bath.to_spec()?, self.beta)
    }

    pub fn state(&self) -> Result<DensityMatrix> {
        self.rho.to_state()
    }
}

/// Runs the identity, chain and Petz suites on one stored instance.
/// Malformed fixtures are errors; numerical failures land in the report.
pub fn run_fixture(fixture: &ThermalFixture, tol: &Tolerances) -> Result<VerifyReport> {
    let t = fixture.operation()?;
    let rho = fixture.state()?;
    if rho.dim() != t.system_dim() {
        return Err(Error::DimensionMismatch { expected: t.system_dim(), found: rho.dim() });
    }
    let seed = fixture.seed.unwrap_or(0);
    let trial = fixture.trial.unwrap_or(0);
    let suites = [Suite::Identity, Suite::Chain, Suite::Petz]
        .into_iter()
        .map(|suite| {
            let outcome = match thermal_trial(suite, &t, &rho, fixture.to_value()) {
                Ok(t) => Outcome::Ok(t),
                Err(e) => Outcome::Err(format!("{} ({})", e, e.kind())),
            };
            reduce(suite, seed, &suite.metrics(tol), vec![(trial, outcome)])
        })
        .collect();
    Ok(VerifyReport { seed, trials: 1, suites })
}
