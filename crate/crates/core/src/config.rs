//! Process-wide limits and the tolerance table used by the verification suites.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DIM: usize = 4096;

/// Environment variable read by the CLI to cap matrix sizes.
pub const MAX_DIM_ENV: &str = "THERMO_RECOVER_MAX_DIM";

static MAX_DIM: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_DIM);

pub fn max_dim() -> usize {
    MAX_DIM.load(Ordering::Relaxed)
}

pub fn set_max_dim(dim: usize) {
    MAX_DIM.store(dim.max(1), Ordering::Relaxed);
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    let max = max_dim();
    if dim > max {
        return Err(Error::TooLarge { dim, max });
    }
    Ok(())
}

/// Construction-time tolerances for the validated types.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
pub const COMMUTATOR_TOL: f64 = 1e-10;
/// Relative rank cut: eigenvalues at or below `dim * lambda_max * RANK_REL_TOL` are off-support.
pub const RANK_REL_TOL: f64 = 1e-12;
/// Relative energy spread tolerated inside a degenerate block.
pub const DEGENERACY_REL_TOL: f64 = 1e-9;
/// Weight of one state on the kernel of another below which supports count as nested.
pub const SUPPORT_TOL: f64 = 1e-10;
pub const GIBBS_PRESERVING_TOL: f64 = 1e-9;
pub const CATALYST_TOL: f64 = 1e-9;
pub const TRANSITION_TOL: f64 = 1e-8;

/// Thresholds for the randomized verification suites. Every field can be
/// overridden from the CLI with `--tol-override key=value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub adjointness: f64,
    pub data_processing: f64,
    pub identity: f64,
    pub chain: f64,
    pub petz: f64,
    pub rotated: f64,
    pub quadrature: f64,
    pub oscillator: f64,
    pub catalyst: f64,
    pub product: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            adjointness: 1e-10,
            data_processing: 1e-10,
            identity: 1e-9,
            chain: 1e-10,
            petz: 1e-10,
            rotated: 1e-10,
            quadrature: 1e-8,
            oscillator: 1e-9,
            catalyst: CATALYST_TOL,
            product: 1e-8,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 10] = [
        "adjointness",
        "data_processing",
        "identity",
        "chain",
        "petz",
        "rotated",
        "quadrature",
        "oscillator",
        "catalyst",
        "product",
    ];

    /// Overrides one entry. Values below machine epsilon are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value < f64::EPSILON {
            return Err(Error::InvalidParameter(format!(
                "tolerance {key}={value} must be finite and at least machine epsilon"
            )));
        }
        let slot = match key {
            "adjointness" => &mut self.adjointness,
            "data_processing" => &mut self.data_processing,
            "identity" => &mut self.identity,
            "chain" => &mut self.chain,
            "petz" => &mut self.petz,
            "rotated" => &mut self.rotated,
            "quadrature" => &mut self.quadrature,
            "oscillator" => &mut self.oscillator,
            "catalyst" => &mut self.catalyst,
            "product" => &mut self.product,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown tolerance key `{other}` (expected one of {})",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// Parses `key=value`.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, value) = spec.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("tolerance override `{spec}` is not key=value"))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("tolerance override `{spec}` has a non-numeric value"))
        })?;
        self.set(key.trim(), value)
    }
}
