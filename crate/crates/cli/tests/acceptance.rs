//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use thermo_recover::oscillator::OscillatorInstance;
use thermo_recover::thermo::gibbs_state;
use thermo_recover::verify::{run_suite, Suite, SuiteReport, VerifyConfig};
use thermo_recover::workbounds::{nano_invest_bound, AlphaGrid};
use thermo_recover::DensityMatrix;

const BETAS: [f64; 3] = [0.5, 1.0, 2.0];

type Check = fn() -> Result<Outcome, String>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn metric(report: &SuiteReport, name: &str) -> f64 {
    report.metric(name).map_or(f64::NAN, |m| m.max)
}

fn suite(suite: Suite, trials: usize) -> Result<SuiteReport, String> {
    let cfg = VerifyConfig { seed: 42, trials, ..VerifyConfig::default() };
    run_suite(suite, &cfg).map_err(|e| e.to_string())
}

fn exact_identity() -> Result<Outcome, String> {
    let r = suite(Suite::Identity, 1000)?;
    let max = metric(&r, "identity_residual");
    Ok(Outcome {
        pass: r.ok() && r.passed == 1000 && max <= 1e-9,
        detail: format!("max residual {max:.3e} over {} trials (tol 1e-9)", r.trials),
    })
}

fn recovery_chain() -> Result<Outcome, String> {
    let r = suite(Suite::Chain, 1000)?;
    let max = metric(&r, "chain_violation");
    Ok(Outcome {
        pass: r.ok() && r.passed == 1000 && max <= 1e-10,
        detail: format!("max violation {max:.3e} over {} trials (slack 1e-10)", r.trials),
    })
}

fn petz_equivalence() -> Result<Outcome, String> {
    let r = suite(Suite::Petz, 200)?;
    let max = metric(&r, "petz_max_entry_diff");
    Ok(Outcome {
        pass: r.ok() && r.passed == 200 && max <= 1e-10,
        detail: format!("max entry difference {max:.3e} over {} operations (tol 1e-10)", r.trials),
    })
}

fn oscillator(beta_e: f64, p0: f64) -> Result<OscillatorInstance, String> {
    OscillatorInstance::new(beta_e, p0, None).map_err(|e| e.to_string())
}

fn pure_target() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    for x in BETAS {
        let inst = oscillator(x, 1.0)?;
        worst = worst.max(inst.invest_bound().abs());
        worst = worst.max(inst.invest_bound_pipeline().map_err(|e| e.to_string())?.abs());
    }
    Ok(Outcome { pass: worst <= 1e-12, detail: format!("max |bound| {worst:.3e} (tol 1e-12)") })
}

fn thermal_target() -> Result<Outcome, String> {
    let (mut formula, mut tight): (f64, f64) = (0.0, 0.0);
    let mut at_one = f64::NAN;
    for x in BETAS {
        let z_s = 1.0 + (-x).exp();
        let inst = oscillator(x, 1.0 / z_s)?;
        let bound = inst.invest_bound();
        formula = formula.max((bound - z_s.ln()).abs());
        let tau = gibbs_state(&inst.system_hamiltonian(), x).map_err(|e| e.to_string())?.into_state();
        let ground = DensityMatrix::basis_state(2, 0).map_err(|e| e.to_string())?;
        let nano = nano_invest_bound(&tau, &ground, &tau, &AlphaGrid::default()).map_err(|e| e.to_string())?;
        tight = tight.max((nano.value - bound).abs());
        if x == 1.0 {
            at_one = bound;
        }
    }
    let pass = formula <= 1e-9 && tight <= 1e-9 && (at_one - 0.313262).abs() < 5e-7;
    Ok(Outcome {
        pass,
        detail: format!("|bound - log Z_S| {formula:.3e}, |bound - nano| {tight:.3e}, value at 1: {at_one:.6}"),
    })
}

fn bath_target() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    let mut at_one = f64::NAN;
    for x in BETAS {
        let inst = oscillator(x, 1.0 - (-x).exp())?;
        let expected = -(1.0 + (-2.0 * x).exp() - (-x).exp()).ln();
        worst = worst.max((inst.invest_bound() - expected).abs());
        worst = worst.max((inst.invest_bound_pipeline().map_err(|e| e.to_string())? - expected).abs());
        if x == 1.0 {
            at_one = inst.invest_bound();
        }
    }
    Ok(Outcome { pass: worst <= 1e-9, detail: format!("max deviation {worst:.3e} (tol 1e-9), value at 1: {at_one:.6}") })
}

fn oscillator_sweep() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for x in BETAS {
        let lower = 1.0 - (-x).exp();
        for k in 0..50 {
            let p0 = lower + (1.0 - lower) * k as f64 / 49.0;
            let pops = oscillator(x, p0)?.reversal_populations().map_err(|e| e.to_string())?;
            worst = worst.max(pops.residual);
            points += 1;
        }
    }
    Ok(Outcome { pass: worst <= 1e-9, detail: format!("max population residual {worst:.3e} over {points} points (tol 1e-9)") })
}

fn rotated_bound() -> Result<Outcome, String> {
    let r = suite(Suite::Rotated, 200)?;
    let violation = metric(&r, "bound_violation");
    let doubling = metric(&r, "node_doubling_change");
    Ok(Outcome {
        pass: r.ok() && r.passed == 200 && violation <= 1e-10 && doubling <= 1e-8,
        detail: format!("max violation {violation:.3e}, node doubling {doubling:.3e} over {} instances", r.trials),
    })
}

fn catalysis_lemma() -> Result<Outcome, String> {
    let r = suite(Suite::Catalysis, 200)?;
    let premise = r.trials - r.skipped - r.errors;
    let product = metric(&r, "global_product_residual");
    Ok(Outcome {
        pass: r.ok() && premise >= 50 && product <= 1e-8,
        detail: format!("{premise} premise-passing of {} instances, max product residual {product:.3e} (tol 1e-8)", r.trials),
    })
}

fn negative_control() -> Result<Outcome, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/non_energy_conserving.json");
    let dump = dir.path().join("counterexample.json");
    let out = Command::new(env!("CARGO_BIN_EXE_thermo-recover"))
        .arg("verify")
        .arg("--fixture")
        .arg(&fixture)
        .arg("--out")
        .arg(dir.path().join("report.json"))
        .arg("--counterexample")
        .arg(&dump)
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code();
    let written = dump.is_file();
    Ok(Outcome { pass: code == Some(1) && written, detail: format!("exit {code:?}, counterexample written: {written}") })
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("exact identity", exact_identity),
        ("recovery chain", recovery_chain),
        ("Petz equivalence", petz_equivalence),
        ("oscillator pure target", pure_target),
        ("oscillator thermal target", thermal_target),
        ("oscillator bath-marginal target", bath_target),
        ("oscillator pipeline sweep", oscillator_sweep),
        ("rotated recovery bound", rotated_bound),
        ("catalysis product lemma", catalysis_lemma),
        ("negative control", negative_control),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{secs:.1}s]", k + 1, outcome.detail);
        failures += usize::from(!outcome.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
