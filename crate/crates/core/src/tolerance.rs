//! Numeric tolerances.

use std::sync::OnceLock;

/// Default tolerance for analytic identities.
pub const DEFAULT_EPS_NUM: f64 = 1e-9;

/// Tolerance for rounding Verlinde sums and other integer quantities.
pub const EPS_INT: f64 = 1e-6;

/// Environment variable overriding [`DEFAULT_EPS_NUM`].
pub const EPS_ENV: &str = "MTC_COSET_EPS";

/// Tolerance for analytic identities, read once from `MTC_COSET_EPS` when set.
pub fn eps_num() -> f64 {
    static EPS: OnceLock<f64> = OnceLock::new();
    *EPS.get_or_init(|| {
        std::env::var(EPS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(DEFAULT_EPS_NUM)
    })
}
