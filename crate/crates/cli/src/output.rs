use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use qklab_core::rosgeom::{self, ProfileCurve};
use qklab_core::symfunc;
use qklab_core::ResidualReport;

use crate::args::Format;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments; exit code 2.
    Usage(String),
    /// Reading or writing artifacts failed; exit code 3.
    Io { path: PathBuf, source: io::Error },
    /// A numerical routine returned an error; exit code 1.
    Numeric(qklab_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io { path, source } => write!(f, "I/O error on {}: {source}", path.display()),
            CliError::Numeric(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<qklab_core::Error> for CliError {
    fn from(e: qklab_core::Error) -> Self {
        CliError::Numeric(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// One line of a report's `checks` array.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOut {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
    /// Measured quantity the check compares against its tolerance.
    pub value: f64,
    /// Reported only; does not affect the exit code.
    pub informational: bool,
}

impl CheckOut {
    /// `value <= tol`.
    pub fn at_most(name: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= tol,
            max_violation: if value <= tol { 0.0 } else { value - tol },
            value,
            informational: false,
        }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self {
            name: name.into(),
            passed: ok,
            max_violation: if ok { 0.0 } else { 1.0 },
            value: if ok { 1.0 } else { 0.0 },
            informational: false,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn from_report(rep: &ResidualReport) -> Vec<Self> {
        rep.checks
            .iter()
            .map(|c| Self {
                name: c.name.clone(),
                passed: c.passed,
                max_violation: c.max_violation,
                value: c.max_violation,
                informational: c.informational,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub n: usize,
    pub k: Option<usize>,
    pub provenance: Option<&'static str>,
    pub blow_up_radius: Option<f64>,
    pub checks: Vec<CheckOut>,
    pub config_echo: Value,
    pub details: Value,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| !c.informational).all(|c| c.passed)
    }
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

/// Profile table with curvature columns; entries that cannot be evaluated
/// are NaN.
pub fn profile_table(curve: &ProfileCurve) -> Table {
    let n = curve.n;
    let mut cols: Vec<String> = ["r", "u", "v", "ddu", "lambda_rot", "lambda_rad"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((1..=n).map(|l| format!("S_{l}")));
    cols.extend(["Q_k".to_string(), "nu_vertical".into(), "residual".into()]);
    let mut t = Table::new(cols);
    for s in &curve.samples {
        let mut row = vec![s.r, s.u, s.du, s.ddu];
        match rosgeom::principal_curvatures(s) {
            Ok(lam) => {
                row.push(lam[0]);
                row.push(lam[n - 1]);
                row.extend(&symfunc::elementary_symmetric_all(&lam)[1..]);
                row.push(symfunc::q_ratio(&lam, curve.k).unwrap_or(f64::NAN));
            }
            Err(_) => row.resize(row.len() + n + 3, f64::NAN),
        }
        row.push(rosgeom::normal_vertical(s));
        row.push(rosgeom::equation_residual(s).unwrap_or(f64::NAN));
        t.rows.push(row);
    }
    t
}

/// Writes artifacts under one directory.
pub struct Artifacts {
    dir: PathBuf,
    format: Format,
    plot_script: bool,
}

impl Artifacts {
    pub fn new(dir: &Path, format: Format, plot_script: bool) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            plot_script,
        })
    }

    pub fn subdir(&self, name: &str) -> CliResult<Self> {
        Self::new(&self.dir.join(name), self.format, self.plot_script)
    }

    pub fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write(name, &text)
    }

    /// `stem.csv` or `stem.json` depending on the chosen format.
    pub fn table(&self, stem: &str, table: &Table) -> CliResult<PathBuf> {
        match self.format {
            Format::Csv => self.write(&format!("{stem}.csv"), &table.to_csv()),
            Format::Json => self.json(&format!("{stem}.json"), &table.to_json()),
        }
    }

    /// Profile table plus, if requested, a gnuplot script that reads it.
    pub fn profile(&self, stem: &str, curve: &ProfileCurve) -> CliResult<()> {
        self.table(stem, &profile_table(curve))?;
        if self.plot_script {
            self.write(&format!("{stem}.gp"), &plot_script(stem, curve))?;
        }
        Ok(())
    }
}

fn plot_script(stem: &str, curve: &ProfileCurve) -> String {
    format!(
        "# n = {n}, k = {k}, {prov}\n\
         set datafile separator ','\n\
         set key top left\n\
         set xlabel 'r'\n\
         set multiplot layout 2,1\n\
         set ylabel 'u'\n\
         plot '{stem}.csv' using 1:2 skip 1 with lines title 'u'\n\
         set ylabel 'v'\n\
         set logscale y\n\
         plot '{stem}.csv' using 1:3 skip 1 with lines title 'v'\n\
         unset multiplot\n",
        n = curve.n,
        k = curve.k,
        prov = curve.provenance.as_str(),
    )
}
