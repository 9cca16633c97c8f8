use serde::Serialize;

/// Outcome of one named inequality or identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Largest amount by which the check is violated (0 when it holds).
    pub max_violation: f64,
    /// Radius of the first violation, if any.
    pub first_violation: Option<f64>,
    /// Informational checks are reported but do not affect [`ResidualReport::passed`].
    pub informational: bool,
}

/// Per-sample residuals plus summary norms and named checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub label: String,
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    pub rms: f64,
    pub checks: Vec<Check>,
}

impl ResidualReport {
    pub fn new(label: impl Into<String>, radii: Vec<f64>, residuals: Vec<f64>) -> Self {
        let max_abs = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        let rms = if residuals.is_empty() {
            0.0
        } else {
            (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt()
        };
        Self {
            label: label.into(),
            radii,
            residuals,
            max_abs,
            rms,
            checks: Vec::new(),
        }
    }

    /// Adds a check from `(radius, slack)` pairs; negative slack below `-tol`
    /// is a violation.
    pub fn push_slack_check<I>(&mut self, name: &str, tol: f64, informational: bool, slack: I)
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut max_violation = 0.0_f64;
        let mut first = None;
        for (r, s) in slack {
            if !(s >= -tol) {
                first.get_or_insert(r);
                max_violation = max_violation.max(if s.is_nan() { f64::INFINITY } else { -s });
            }
        }
        self.checks.push(Check {
            name: name.to_string(),
            passed: first.is_none(),
            max_violation,
            first_violation: first,
            informational,
        });
    }

    /// All non-informational checks hold.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| !c.informational).all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
