//! Verification suite (placeholder while the solver layers land).

use std::collections::BTreeMap;

/// Named check results: identifier → (value, tolerance, pass).
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: BTreeMap<String, (f64, f64, bool)>,
}
