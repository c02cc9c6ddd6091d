//! One function per subcommand. Each returns a JSON report, an optional table
//! for `--format csv`, and an optional failure with a reproducible dump.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use thermo_recover::channel::ThermalOperation;
use thermo_recover::divergence::{relative_entropy, renyi_divergence, RenyiVariant};
use thermo_recover::oscillator::OscillatorInstance;
use thermo_recover::random::{random_density_matrix, random_thermal_operation, trial_rng};
use thermo_recover::verify::{run_fixture, run_suites, Suite, SuiteReport, ThermalFixture, VerifyConfig, VerifyReport};
use thermo_recover::workbounds::{recovery_chain, AlphaOptimum};
use thermo_recover::{
    AlphaFamilySpec, AlphaGrid, DensityMatrix, HamiltonianJson, MatrixJson, Tolerances, WorkMode, WorkReport,
};

use crate::output::{cell, matrix, num, opt_num, read_json, CliError, CliResult, Table};

pub struct RunConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub csv: bool,
    pub tolerances: Tolerances,
    pub overrides: Vec<String>,
    pub counterexample: Option<PathBuf>,
}

impl RunConfig {
    /// Where a failing run writes its dump: `--counterexample`, else next to
    /// `--out`, else the working directory.
    pub fn counterexample_path(&self) -> PathBuf {
        if let Some(p) = &self.counterexample {
            return p.clone();
        }
        match &self.out {
            Some(out) => {
                let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
                out.with_file_name(format!("{stem}.counterexample.json"))
            }
            None => PathBuf::from("counterexample.json"),
        }
    }
}

pub struct Failure {
    pub message: String,
    pub dump: Value,
}

pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    pub failure: Option<Failure>,
}

fn state(path: &Path) -> CliResult<DensityMatrix> {
    Ok(read_json::<MatrixJson>(path)?.to_state()?)
}

fn hamiltonian(path: &Path) -> CliResult<thermo_recover::HamiltonianSpec> {
    Ok(read_json::<HamiltonianJson>(path)?.to_spec()?)
}

fn parse_dims(list: &str, what: &str) -> CliResult<Vec<usize>> {
    let dims: Result<Vec<usize>, _> = list.split(',').map(|s| s.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if !d.is_empty() && !d.contains(&0) => Ok(d),
        _ => Err(CliError::invalid("invalid_parameter", format!("{what} `{list}` is not a comma-separated list of positive integers"))),
    }
}

/// `"a,b;c,d"` into two lists.
pub fn parse_dim_pair(spec: &str, first: &str, second: &str) -> CliResult<(Vec<usize>, Vec<usize>)> {
    let (a, b) = spec
        .split_once(';')
        .ok_or_else(|| CliError::invalid("invalid_parameter", format!("dims `{spec}` must look like `2,3;2,3,4`")))?;
    Ok((parse_dims(a, first)?, parse_dims(b, second)?))
}

pub fn divergence(_cfg: &RunConfig, a: &Path, b: &Path, alpha: Option<f64>) -> CliResult<Report> {
    let (a, b) = (state(a)?, state(b)?);
    let (result, order, variant) = match alpha {
        None => (relative_entropy(&a, &b)?, 1.0, "relative_entropy"),
        Some(x) => {
            let spec = if x == f64::INFINITY { AlphaFamilySpec::infinity() } else { AlphaFamilySpec::new(x)? };
            let variant = if x == f64::INFINITY {
                "max"
            } else if spec.is_relative_entropy() {
                "relative_entropy"
            } else {
                match spec.variant() {
                    RenyiVariant::Petz => "petz",
                    RenyiVariant::Sandwiched => "sandwiched",
                }
            };
            (renyi_divergence(&a, &b, spec)?, x, variant)
        }
    };
    let json = json!({
        "value": num(result.value),
        "finite": result.finite,
        "support_ok": result.support_ok,
        "alpha": num(order),
        "variant": variant,
    });
    let mut table = Table::new(&["alpha", "variant", "value", "finite"]);
    table.rows.push(vec![cell(order), variant.into(), cell(result.value), result.finite.to_string()]);
    Ok(Report { json, table: Some(table), failure: None })
}

fn optimum(o: &Option<AlphaOptimum>) -> Value {
    match o {
        None => Value::Null,
        Some(o) => json!({
            "value": num(o.value),
            "alpha": num(o.alpha),
            "finite_value": num(o.finite_value),
            "finite_alpha": num(o.finite_alpha),
            "infinity_value": opt_num(o.infinity_value),
            "unbounded": o.unbounded,
        }),
    }
}

pub struct WorkboundArgs {
    pub rho: PathBuf,
    pub sigma: PathBuf,
    pub hs: PathBuf,
    pub beta: f64,
    pub mode: WorkMode,
    pub unitary: Option<PathBuf>,
    pub hb: Option<PathBuf>,
    pub alpha_grid: Option<String>,
    pub kt: Option<f64>,
    pub csv: Option<PathBuf>,
}

fn alpha_grid(spec: Option<&str>) -> CliResult<AlphaGrid> {
    let Some(spec) = spec else { return Ok(AlphaGrid::default()) };
    let points: Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let points = points.map_err(|_| CliError::invalid("invalid_parameter", format!("alpha grid `{spec}` is not a list of numbers")))?;
    Ok(AlphaGrid::new(points, AlphaGrid::default().refine_rounds())?)
}

pub fn workbound(_cfg: &RunConfig, args: &WorkboundArgs) -> CliResult<Report> {
    let rho = state(&args.rho)?;
    let sigma = state(&args.sigma)?;
    let hs = hamiltonian(&args.hs)?;
    let grid = alpha_grid(args.alpha_grid.as_deref())?;
    let t = match (&args.unitary, &args.hb) {
        (Some(u), Some(hb)) => {
            let v = read_json::<MatrixJson>(u)?.to_matrix()?;
            Some(ThermalOperation::new(v, hs.clone(), hamiltonian(hb)?, args.beta)?)
        }
        (None, None) => None,
        _ => return Err(CliError::invalid("invalid_parameter", "--unitary and --hb must be given together")),
    };
    let r = WorkReport::compute(&rho, &sigma, &hs, args.beta, args.mode, &grid, t.as_ref())?;
    let mut json = json!({
        "mode": r.mode,
        "beta": num(args.beta),
        "delta": num(r.delta),
        "w_gain_std": num(r.w_gain_std),
        "w_inv_std": num(r.w_inv_std),
        "nano_gain_upper": optimum(&r.nano_gain_upper),
        "nano_inv_lower": optimum(&r.nano_inv_lower),
        "recovery_fidelity_bound": opt_num(r.recovery_fidelity_bound),
        "units": "kT",
    });
    if let Some(kt) = args.kt {
        if !(kt.is_finite() && kt > 0.0) {
            return Err(CliError::invalid("invalid_parameter", "--kt must be finite and positive"));
        }
        let scaled = |x: f64| num(x * kt);
        json["kt"] = num(kt);
        json["energy_units"] = json!({
            "w_gain_std": scaled(r.w_gain_std),
            "w_inv_std": scaled(r.w_inv_std),
            "nano_gain_upper": r.nano_gain_upper.as_ref().map_or(Value::Null, |o| scaled(o.value)),
            "nano_inv_lower": r.nano_inv_lower.as_ref().map_or(Value::Null, |o| scaled(o.value)),
            "recovery_fidelity_bound": r.recovery_fidelity_bound.map_or(Value::Null, scaled),
        });
    }
    let mut table = Table::new(&["alpha", "difference"]);
    table.rows = r.alpha_trace().iter().map(|&(a, d)| vec![cell(a), cell(d)]).collect();
    if let Some(path) = &args.csv {
        table.write_to(path)?;
    }
    Ok(Report { json, table: Some(table), failure: None })
}

pub struct RecoverArgs {
    pub unitary: Option<PathBuf>,
    pub hs: Option<PathBuf>,
    pub hb: Option<PathBuf>,
    pub beta: Option<f64>,
    pub sigma: Option<PathBuf>,
    pub rho: Option<PathBuf>,
    pub sample: Option<String>,
}

fn parse_sample(spec: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::invalid("invalid_parameter", format!("--sample `{spec}` must look like 2x4"));
    let (s, b) = spec.split_once(['x', 'X']).ok_or_else(bad)?;
    let s: usize = s.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if s == 0 || b == 0 {
        return Err(bad());
    }
    Ok((s, b))
}

pub fn recover(cfg: &RunConfig, args: &RecoverArgs) -> CliResult<Report> {
    let missing = |flag: &str| CliError::invalid("invalid_parameter", format!("{flag} is required without --sample"));
    let (t, rho, sigma, sample) = match &args.sample {
        Some(spec) => {
            let (ds, db) = parse_sample(spec)?;
            let mut rng = trial_rng(cfg.seed, "recover", 0);
            let t = random_thermal_operation(ds, db, &mut rng)?;
            let rho = match &args.rho {
                Some(p) => state(p)?,
                None => random_density_matrix(ds, &mut rng)?,
            };
            let sigma = t.apply(&rho)?;
            (t, Some(rho), sigma, Some(json!({ "system_dim": ds, "bath_dim": db })))
        }
        None => {
            let v = read_json::<MatrixJson>(args.unitary.as_ref().ok_or_else(|| missing("--unitary"))?)?.to_matrix()?;
            let hs = hamiltonian(args.hs.as_ref().ok_or_else(|| missing("--hs"))?)?;
            let hb = hamiltonian(args.hb.as_ref().ok_or_else(|| missing("--hb"))?)?;
            let beta = args.beta.ok_or_else(|| missing("--beta"))?;
            let t = ThermalOperation::new(v, hs, hb, beta)?;
            let sigma = state(args.sigma.as_ref().ok_or_else(|| missing("--sigma"))?)?;
            let rho = args.rho.as_deref().map(state).transpose()?;
            (t, rho, sigma, None)
        }
    };
    let slack = cfg.tolerances.chain;
    let mut json = json!({ "beta": num(t.beta()), "seed": cfg.seed });
    if let Some(s) = sample {
        json["sample"] = s;
    }
    let mut table = Table::new(&["delta", "d_recovery", "neg_log_f", "delta_ge_d_recovery", "d_recovery_ge_neg_log_f", "bound_satisfied"]);
    let mut failure = None;
    match &rho {
        None => {
            json["recovered"] = matrix(t.reversal().apply(&sigma)?.matrix());
        }
        Some(rho) => {
            let chain = recovery_chain(rho, &sigma, &t)?;
            let first = chain.delta >= chain.d_recovery - slack;
            let second = chain.d_recovery >= chain.neg_log_fidelity - slack;
            let bound = chain.delta >= chain.neg_log_fidelity - slack;
            json["rho"] = matrix(rho.matrix());
            json["sigma"] = matrix(sigma.matrix());
            json["recovered"] = matrix(chain.recovered.matrix());
            json["delta"] = num(chain.delta);
            json["d_recovery"] = num(chain.d_recovery);
            json["neg_log_f"] = num(chain.neg_log_fidelity);
            json["flags"] = json!({
                "delta_ge_d_recovery": first,
                "d_recovery_ge_neg_log_f": second,
                "bound_satisfied": bound,
            });
            table.rows.push(vec![
                cell(chain.delta),
                cell(chain.d_recovery),
                cell(chain.neg_log_fidelity),
                first.to_string(),
                second.to_string(),
                bound.to_string(),
            ]);
            if !(first && second && bound) {
                let fixture = ThermalFixture::from_instance(&t, rho, Suite::Chain, cfg.seed, 0);
                failure = Some(Failure {
                    message: format!("recovery chain violated by {:e}", chain.violation()),
                    dump: json!({
                        "command": "recover",
                        "seed": cfg.seed,
                        "delta": chain.delta,
                        "d_recovery": chain.d_recovery,
                        "neg_log_f": chain.neg_log_fidelity,
                        "inputs": fixture.to_value(),
                    }),
                });
            }
        }
    }
    Ok(Report { json, table: Some(table), failure })
}

pub struct OscillatorArgs {
    pub beta_e: f64,
    pub p0: Option<f64>,
    pub nmax: Option<usize>,
    pub sweep: Option<String>,
    pub kt: Option<f64>,
    pub csv: Option<PathBuf>,
}

pub const OSCILLATOR_COLUMNS: [&str; 10] =
    ["beta_e", "p0", "n_max", "b", "p0r", "matrix_p0r", "bound", "pipeline_bound", "residual", "pipeline_residual"];

fn parse_sweep(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::invalid("invalid_parameter", format!("--sweep `{spec}` must look like p0:start:stop:steps"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 || parts[0].trim() != "p0" {
        return Err(bad());
    }
    let start: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[2].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[3].trim().parse().map_err(|_| bad())?;
    if steps == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    Ok((0..steps).map(|k| start + (stop - start) * k as f64 / (steps - 1) as f64).collect())
}

fn oscillator_point(beta_e: f64, p0: f64, nmax: Option<usize>) -> CliResult<[f64; 10]> {
    let inst = OscillatorInstance::new(beta_e, p0, nmax)?;
    let pops = inst.reversal_populations()?;
    let bound = inst.invest_bound();
    let pipeline = inst.invest_bound_pipeline()?;
    Ok([
        beta_e,
        inst.p0(),
        inst.n_max() as f64,
        inst.b(),
        pops.p0r,
        pops.matrix_p0r,
        bound,
        pipeline,
        pops.residual,
        (pipeline - bound).abs(),
    ])
}

pub fn oscillator(cfg: &RunConfig, args: &OscillatorArgs) -> CliResult<Report> {
    let p0s = match (&args.sweep, args.p0) {
        (Some(s), None) => parse_sweep(s)?,
        (None, Some(p0)) => vec![p0],
        (Some(_), Some(_)) => return Err(CliError::invalid("invalid_parameter", "--p0 and --sweep are exclusive")),
        (None, None) => return Err(CliError::invalid("invalid_parameter", "one of --p0 or --sweep is required")),
    };
    if let Some(kt) = args.kt {
        if !(kt.is_finite() && kt > 0.0) {
            return Err(CliError::invalid("invalid_parameter", "--kt must be finite and positive"));
        }
    }
    let points = p0s.iter().map(|&p0| oscillator_point(args.beta_e, p0, args.nmax)).collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(&OSCILLATOR_COLUMNS);
    let mut rows = Vec::with_capacity(points.len());
    let mut worst: f64 = 0.0;
    for p in &points {
        table.rows.push(p.iter().enumerate().map(|(i, &x)| if i == 2 { (x as usize).to_string() } else { cell(x) }).collect());
        let mut obj = Map::new();
        for (name, &x) in OSCILLATOR_COLUMNS.iter().zip(p) {
            obj.insert((*name).into(), if *name == "n_max" { Value::from(x as usize) } else { num(x) });
        }
        if let Some(kt) = args.kt {
            obj.insert("bound_energy".into(), num(p[6] * kt));
        }
        worst = worst.max(p[8]).max(p[9]);
        rows.push(Value::Object(obj));
    }
    if let Some(path) = &args.csv {
        table.write_to(path)?;
    }
    let tol = cfg.tolerances.oscillator;
    let json = if args.sweep.is_some() {
        json!({ "points": rows, "max_residual": num(worst), "tolerance": num(tol) })
    } else {
        rows.pop().unwrap_or(Value::Null)
    };
    let failure = (worst > tol).then(|| Failure {
        message: format!("matrix pipeline disagrees with the closed form by {worst:e} (tolerance {tol:e})"),
        dump: json!({
            "command": "oscillator",
            "beta_e": args.beta_e,
            "p0": p0s,
            "n_max": args.nmax,
            "max_residual": worst,
        }),
    });
    Ok(Report { json, table: Some(table), failure })
}

fn suite_json(s: &SuiteReport) -> Value {
    let metrics: Vec<Value> = s
        .metrics
        .iter()
        .map(|m| json!({ "name": m.name, "max": num(m.max), "tolerance": num(m.tolerance), "evaluated": m.evaluated }))
        .collect();
    json!({
        "suite": s.suite.name(),
        "ok": s.ok(),
        "trials": s.trials,
        "passed": s.passed,
        "failed": s.failed,
        "skipped": s.skipped,
        "errors": s.errors,
        "metrics": metrics,
    })
}

fn suites_table(report: &VerifyReport) -> Table {
    let mut t = Table::new(&["suite", "metric", "max", "tolerance", "evaluated", "trials", "passed", "failed", "skipped"]);
    for s in &report.suites {
        for m in &s.metrics {
            t.rows.push(vec![
                s.suite.name().into(),
                m.name.into(),
                cell(m.max),
                cell(m.tolerance),
                m.evaluated.to_string(),
                s.trials.to_string(),
                s.passed.to_string(),
                s.failed.to_string(),
                s.skipped.to_string(),
            ]);
        }
    }
    t
}

fn join(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Command line that regenerates one failing trial.
fn replay(cfg: &RunConfig, vc: &VerifyConfig, cx: &Value) -> Value {
    let (Some(suite), Some(trial)) = (cx["suite"].as_str(), cx["trial"].as_u64()) else { return Value::Null };
    let mut cmd = format!(
        "thermo-recover verify --seed {} --suites {suite} --first-trial {trial} --trials 1 --dims '{};{}' --catalyst-dims {}",
        vc.seed,
        join(&vc.system_dims),
        join(&vc.bath_dims),
        join(&vc.catalyst_dims)
    );
    for o in &cfg.overrides {
        cmd.push_str(&format!(" --tol-override {o}"));
    }
    Value::from(cmd)
}

fn verify_report(cfg: &RunConfig, vc: Option<&VerifyConfig>, report: &VerifyReport, extra: Value) -> Report {
    let mut json = json!({
        "seed": report.seed,
        "trials": report.trials,
        "all_passed": report.all_passed(),
        "suites": report.suites.iter().map(suite_json).collect::<Vec<_>>(),
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut json, extra) {
        dst.extend(src);
    }
    let failure = (!report.all_passed()).then(|| {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.ok()).map(|s| s.suite.name()).collect();
        let mut dump = report.first_counterexample().cloned().unwrap_or_else(|| json!({}));
        if let (Some(vc), Value::Object(obj)) = (vc, &mut dump) {
            let r = replay(cfg, vc, &Value::Object(obj.clone()));
            obj.insert("replay".into(), r);
        }
        Failure { message: format!("failing suites: {}", failed.join(", ")), dump }
    });
    Report { json, table: Some(suites_table(report)), failure }
}

pub struct VerifyArgs {
    pub fixture: Option<PathBuf>,
    pub suites: Option<String>,
    pub trials: usize,
    pub first_trial: u64,
    pub dims: Option<String>,
    pub catalyst_dims: Option<String>,
}

/// Accepts a bare fixture or a counterexample dump that wraps one in `inputs`.
fn load_fixture(path: &Path) -> CliResult<ThermalFixture> {
    let v: Value = read_json(path)?;
    let inner = match v.get("inputs") {
        Some(i) if i.is_object() => i.clone(),
        _ => v,
    };
    serde_json::from_value(inner)
        .map_err(|e| CliError::invalid("json", format!("{} is not a thermal-operation fixture: {e}", path.display())))
}

pub fn verify(cfg: &RunConfig, args: &VerifyArgs) -> CliResult<Report> {
    if let Some(path) = &args.fixture {
        let fixture = load_fixture(path)?;
        let report = run_fixture(&fixture, &cfg.tolerances)?;
        let extra = json!({ "fixture": path.display().to_string() });
        return Ok(verify_report(cfg, None, &report, extra));
    }
    let suites = match &args.suites {
        None => Suite::ALL.to_vec(),
        Some(list) => list.split(',').map(|s| Suite::parse(s.trim())).collect::<Result<Vec<_>, _>>()?,
    };
    let mut vc = VerifyConfig {
        seed: cfg.seed,
        trials: args.trials,
        first_trial: args.first_trial,
        tolerances: cfg.tolerances,
        ..VerifyConfig::default()
    };
    if let Some(d) = &args.dims {
        (vc.system_dims, vc.bath_dims) = parse_dim_pair(d, "system dims", "bath dims")?;
    }
    if let Some(c) = &args.catalyst_dims {
        vc.catalyst_dims = parse_dims(c, "catalyst dims")?;
    }
    let report = run_suites(&suites, &vc)?;
    let extra = json!({
        "first_trial": vc.first_trial,
        "system_dims": vc.system_dims,
        "bath_dims": vc.bath_dims,
        "catalyst_dims": vc.catalyst_dims,
    });
    Ok(verify_report(cfg, Some(&vc), &report, extra))
}

pub struct CatalysisArgs {
    pub trials: usize,
    pub dims: String,
    pub bath_dims: Option<String>,
}

pub fn catalysis_verify(cfg: &RunConfig, args: &CatalysisArgs) -> CliResult<Report> {
    let (system_dims, catalyst_dims) = parse_dim_pair(&args.dims, "system dims", "catalyst dims")?;
    let mut vc = VerifyConfig {
        seed: cfg.seed,
        trials: args.trials,
        system_dims,
        catalyst_dims,
        tolerances: cfg.tolerances,
        ..VerifyConfig::default()
    };
    if let Some(b) = &args.bath_dims {
        vc.bath_dims = parse_dims(b, "bath dims")?;
    }
    let report = run_suites(&[Suite::Catalysis], &vc)?;
    let s = &report.suites[0];
    let metric = |name: &str| s.metric(name).map_or(Value::Null, |m| num(m.max));
    let extra = json!({
        "premise_passed": s.trials - s.skipped - s.errors,
        "premise_skipped": s.skipped,
        "lemma_asserts": s.trials - s.skipped - s.errors,
        "lemma_failures": s.failed,
        "max_residuals": {
            "global_product": metric("global_product_residual"),
            "energy_change": metric("energy_change"),
            "identity": metric("general_identity_residual"),
            "chain": metric("chain_violation"),
        },
        "system_dims": vc.system_dims,
        "bath_dims": vc.bath_dims,
        "catalyst_dims": vc.catalyst_dims,
    });
    Ok(verify_report(cfg, Some(&vc), &report, extra))
}
