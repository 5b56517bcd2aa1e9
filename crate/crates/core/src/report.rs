//! Report records, output formatting, and the drivers behind the CLI
//! commands: stiffness computation, deflection, spectral analysis and
//! cross-path validation.

use nalgebra::{DMatrix, Matrix3, Matrix6, Vector6};
use std::fmt::Write as _;

use crate::assembly::{aggregate, deflection, leg_to_global, FrameTag, LegAssembly, ManipulatorModel};
use crate::chain::{base_stiffness, energy_oracle_stiffness, jacobians, kkt_stiffness, ChainConfig};
use crate::elimination::{
    eliminate_full, eliminate_recursive, PassiveJacobian, RedundancyPolicy,
};
use crate::error::StiffnessError;
use crate::modelfile::{BuiltLeg, ModelFile, SchemaError};
use crate::models::{
    beam_stiffness, demo_2d_matrix, leg_orientation, motivating_2d, stewart_leg_passive_columns,
    stewart_leg_vectors, BeamParams, StewartCase, StewartParams,
};
use crate::spatial::{StiffnessMatrix6, Wrench};

/// Default relative eigenvalue threshold for rank decisions in reports.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Stable exit-code contract: 0 ok, 2 schema, 3 redundancy, 4 unresisted
/// wrench, 5 validation breach, 1 anything else.
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_REDUNDANCY: i32 = 3;
pub const EXIT_UNRESISTED: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

/// Failed command: exit code plus a message for stderr.
#[derive(Debug, Clone)]
pub struct CliFailure {
    pub exit_code: i32,
    pub message: String,
}

impl CliFailure {
    fn new(exit_code: i32, message: impl Into<String>) -> Self {
        Self {
            exit_code,
            message: message.into(),
        }
    }
}

impl From<SchemaError> for CliFailure {
    fn from(e: SchemaError) -> Self {
        CliFailure::new(EXIT_SCHEMA, e.to_string())
    }
}

impl From<StiffnessError> for CliFailure {
    fn from(e: StiffnessError) -> Self {
        let code = match &e {
            StiffnessError::RedundantColumn { .. }
            | StiffnessError::RedundantPassiveJoints { .. }
            | StiffnessError::SingularSaddlePoint { .. } => EXIT_REDUNDANCY,
            StiffnessError::UnresistedWrench { .. } => EXIT_UNRESISTED,
            StiffnessError::NonUnitAxis { .. }
            | StiffnessError::InvalidSpringBlock { .. }
            | StiffnessError::NonOrthonormalRotation { .. }
            | StiffnessError::SizeMismatch { .. } => EXIT_SCHEMA,
            _ => 1,
        };
        CliFailure::new(code, e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Pretty,
    Csv,
    Json,
}

/// Formats a number with 17 significant digits; identical across formats so
/// parse-back agrees bitwise on the decimal representation.
pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Cross-path comparison entry of a validation run.
#[derive(Debug, Clone)]
pub struct OracleDelta {
    pub pair: String,
    pub delta: f64,
    pub tolerance: f64,
}

/// Stiffness matrix plus its spectral analysis and computation trace.
#[derive(Debug, Clone)]
pub struct ReportRecord {
    pub label: String,
    pub stiffness: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub null_space: Vec<Vec<f64>>,
    /// Per-leg elimination trace: the scalar μ of every accepted column.
    pub mu_values: Vec<Vec<f64>>,
    pub oracle_deltas: Vec<OracleDelta>,
}

impl ReportRecord {
    pub fn from_matrix(
        label: impl Into<String>,
        m: DMatrix<f64>,
        rank_tol: f64,
        mu_values: Vec<Vec<f64>>,
    ) -> Self {
        let sym = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        let eig = sym.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let max = eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let mut rank = 0;
        let mut null_space = Vec::new();
        for &i in &order {
            if max > 0.0 && eig.eigenvalues[i].abs() > rank_tol * max {
                rank += 1;
            } else {
                null_space.push(eig.eigenvectors.column(i).iter().copied().collect());
            }
        }
        Self {
            label: label.into(),
            stiffness: m,
            eigenvalues,
            rank,
            null_space,
            mu_values,
            oracle_deltas: Vec::new(),
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Pretty => self.render_pretty(),
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_pretty(&self) -> String {
        let mut out = String::new();
        let n = self.stiffness.nrows();
        writeln!(out, "# {}", self.label).unwrap();
        writeln!(out, "stiffness ({n}x{n}):").unwrap();
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format_num(self.stiffness[(i, j)])).collect();
            writeln!(out, "  {}", row.join(" ")).unwrap();
        }
        let ev: Vec<String> = self.eigenvalues.iter().map(|&x| format_num(x)).collect();
        writeln!(out, "eigenvalues: {}", ev.join(" ")).unwrap();
        writeln!(out, "rank: {}", self.rank).unwrap();
        for basis in &self.null_space {
            let row: Vec<String> = basis.iter().map(|&x| format_num(x)).collect();
            writeln!(out, "null: {}", row.join(" ")).unwrap();
        }
        for (leg, mus) in self.mu_values.iter().enumerate() {
            let row: Vec<String> = mus.iter().map(|&x| format_num(x)).collect();
            writeln!(out, "mu[leg {leg}]: {}", row.join(" ")).unwrap();
        }
        for delta in &self.oracle_deltas {
            writeln!(
                out,
                "delta {}: {} (tol {})",
                delta.pair,
                format_num(delta.delta),
                format_num(delta.tolerance)
            )
            .unwrap();
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let n = self.stiffness.nrows();
        writeln!(out, "# {}", self.label).unwrap();
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format_num(self.stiffness[(i, j)])).collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        let ev: Vec<String> = self.eigenvalues.iter().map(|&x| format_num(x)).collect();
        writeln!(out, "# eigenvalues,{}", ev.join(",")).unwrap();
        writeln!(out, "# rank,{}", self.rank).unwrap();
        out
    }

    fn render_json(&self) -> String {
        // numbers are embedded with the shared 17-digit formatting
        let matrix_rows = |m: &DMatrix<f64>| -> String {
            (0..m.nrows())
                .map(|i| {
                    let row: Vec<String> =
                        (0..m.ncols()).map(|j| format_num(m[(i, j)])).collect();
                    format!("[{}]", row.join(","))
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        let vector = |v: &[f64]| -> String {
            let items: Vec<String> = v.iter().map(|&x| format_num(x)).collect();
            format!("[{}]", items.join(","))
        };
        let null: Vec<String> = self.null_space.iter().map(|b| vector(b)).collect();
        let mus: Vec<String> = self.mu_values.iter().map(|m| vector(m)).collect();
        let deltas: Vec<String> = self
            .oracle_deltas
            .iter()
            .map(|d| {
                format!(
                    "{{\"pair\":{:?},\"delta\":{},\"tolerance\":{}}}",
                    d.pair,
                    format_num(d.delta),
                    format_num(d.tolerance)
                )
            })
            .collect();
        format!(
            "{{\"label\":{:?},\"stiffness\":[{}],\"eigenvalues\":{},\"rank\":{},\"null_space\":[{}],\"mu_values\":[{}],\"oracle_deltas\":[{}]}}\n",
            self.label,
            matrix_rows(&self.stiffness),
            vector(&self.eigenvalues),
            self.rank,
            null.join(","),
            mus.join(","),
            deltas.join(",")
        )
    }
}

/// Which model a command operates on.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSelector {
    StewartA,
    StewartB,
    Demo2d,
    SingleBeam,
    Path(String),
}

impl ModelSelector {
    pub fn parse(s: &str) -> Self {
        match s {
            "stewart-a" => Self::StewartA,
            "stewart-b" => Self::StewartB,
            "demo-2d" => Self::Demo2d,
            "single-beam" => Self::SingleBeam,
            other => Self::Path(other.to_string()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::StewartA => "stewart-a".into(),
            Self::StewartB => "stewart-b".into(),
            Self::Demo2d => "demo-2d".into(),
            Self::SingleBeam => "single-beam".into(),
            Self::Path(p) => p.clone(),
        }
    }
}

/// Stewart-Gough geometry flags with the documented defaults.
#[derive(Debug, Clone, Copy)]
pub struct StewartFlags {
    pub platform_radius: f64,
    pub base_radius: f64,
    pub height: f64,
    pub k11: f64,
}

impl Default for StewartFlags {
    fn default() -> Self {
        Self {
            platform_radius: 0.2,
            base_radius: 0.5,
            height: 1.0,
            k11: 1e6,
        }
    }
}

impl StewartFlags {
    fn params(&self, case: StewartCase) -> StewartParams {
        StewartParams {
            base_radius: self.base_radius,
            platform_radius: self.platform_radius,
            height: self.height,
            k11: self.k11,
            case,
        }
    }
}

fn default_beam() -> BeamParams {
    BeamParams {
        e: 70e9,
        g: 26e9,
        a: 3e-4,
        i_y: 2e-8,
        i_z: 2e-8,
        j_t: 4e-8,
        l: 1.0,
    }
}

/// Inputs of the per-leg stiffness computation, shared by all paths.
struct LegInputs {
    j_theta: DMatrix<f64>,
    k_theta: DMatrix<f64>,
    j_q: PassiveJacobian,
    orientation: nalgebra::Matrix3<f64>,
    lever: nalgebra::Vector3<f64>,
}

fn stewart_leg_inputs(p: &StewartParams, i: usize) -> LegInputs {
    let (u, v) = stewart_leg_vectors(p, i);
    let l = u.norm();
    let a = 1e-3;
    let beam = beam_stiffness(&BeamParams {
        e: p.k11 * l / a,
        g: p.k11 * l / (2.6 * a),
        a,
        i_y: 1e-6,
        i_z: 1e-6,
        j_t: 2e-6,
        l,
    });
    LegInputs {
        j_theta: DMatrix::identity(6, 6),
        k_theta: DMatrix::from_fn(6, 6, |r, c| beam.matrix()[(r, c)]),
        j_q: stewart_leg_passive_columns(l),
        orientation: leg_orientation(&(u / l)),
        lever: v,
    }
}

fn built_leg_inputs(leg: &BuiltLeg) -> Result<LegInputs, StiffnessError> {
    let cfg = ChainConfig::zero(&leg.chain);
    let jac = jacobians(&leg.chain, &cfg)?;
    Ok(LegInputs {
        j_theta: jac.j_theta,
        k_theta: leg.chain.aggregate_spring_stiffness(),
        j_q: PassiveJacobian::from_matrix(&jac.j_q),
        orientation: leg.orientation,
        lever: leg.lever,
    })
}

fn leg_inputs_for(
    selector: &ModelSelector,
    flags: &StewartFlags,
) -> Result<Vec<LegInputs>, CliFailure> {
    match selector {
        ModelSelector::StewartA | ModelSelector::StewartB => {
            let case = if *selector == ModelSelector::StewartA {
                StewartCase::A
            } else {
                StewartCase::B
            };
            let p = flags.params(case);
            Ok((0..6).map(|i| stewart_leg_inputs(&p, i)).collect())
        }
        ModelSelector::SingleBeam => {
            let beam = beam_stiffness(&default_beam());
            Ok(vec![LegInputs {
                j_theta: DMatrix::identity(6, 6),
                k_theta: DMatrix::from_fn(6, 6, |r, c| beam.matrix()[(r, c)]),
                j_q: PassiveJacobian::empty(),
                orientation: nalgebra::Matrix3::identity(),
                lever: nalgebra::Vector3::zeros(),
            }])
        }
        ModelSelector::Path(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliFailure::new(1, format!("cannot read {path}: {e}")))?;
            let model = ModelFile::from_json_str(&text)?;
            let built = model.build()?;
            built
                .iter()
                .map(|leg| built_leg_inputs(leg).map_err(CliFailure::from))
                .collect()
        }
        ModelSelector::Demo2d => Err(CliFailure::new(
            1,
            "the demo-2d model is planar; this operation needs a spatial model",
        )),
    }
}

fn assemble(
    legs: &[LegInputs],
    per_leg: &[StiffnessMatrix6],
) -> Result<StiffnessMatrix6, StiffnessError> {
    let assemblies = legs
        .iter()
        .zip(per_leg)
        .map(|(inputs, k)| {
            leg_to_global(&LegAssembly {
                stiffness: *k,
                orientation: inputs.orientation,
                lever: inputs.lever,
                frame: FrameTag::Local,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    aggregate(&ManipulatorModel { legs: assemblies })
}

/// Computes the aggregate stiffness via recursive elimination, collecting the
/// per-leg μ traces.
fn compute_aggregate(
    legs: &[LegInputs],
) -> Result<(StiffnessMatrix6, Vec<Vec<f64>>), StiffnessError> {
    let mut per_leg = Vec::new();
    let mut mu_values = Vec::new();
    for inputs in legs {
        let k0 = base_stiffness(&inputs.j_theta, &inputs.k_theta)?;
        let report = eliminate_recursive(&k0, &inputs.j_q, None, RedundancyPolicy::Error)?;
        mu_values.push(report.mu_values.clone());
        per_leg.push(report.result);
    }
    Ok((assemble(legs, &per_leg)?, mu_values))
}

fn dmatrix6(m: &Matrix6<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(6, 6, |i, j| m[(i, j)])
}

fn dmatrix3(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
}

/// `stiff`: stiffness matrix plus spectral report for a model.
pub fn cmd_stiff(
    selector: &ModelSelector,
    flags: &StewartFlags,
    format: OutputFormat,
    rank_tol: f64,
) -> Result<String, CliFailure> {
    let record = match selector {
        ModelSelector::Demo2d => {
            let (m, _) = motivating_2d(&demo_2d_matrix())?;
            ReportRecord::from_matrix("demo-2d", dmatrix3(&m), rank_tol, vec![])
        }
        _ => {
            let legs = leg_inputs_for(selector, flags)?;
            let (k, mu) = compute_aggregate(&legs)?;
            ReportRecord::from_matrix(
                selector.label(),
                dmatrix6(k.matrix()),
                rank_tol,
                mu,
            )
        }
    };
    Ok(record.render(format))
}

/// Parses `fx,fy,fz,mx,my,mz`.
pub fn parse_wrench(s: &str) -> Result<Wrench, CliFailure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 6 {
        return Err(CliFailure::new(
            EXIT_SCHEMA,
            format!("wrench must be six comma-separated reals, got {} items", parts.len()),
        ));
    }
    let mut v = Vector6::zeros();
    for (i, part) in parts.iter().enumerate() {
        v[i] = part.trim().parse::<f64>().map_err(|e| {
            CliFailure::new(EXIT_SCHEMA, format!("wrench component {i}: {e}"))
        })?;
    }
    Ok(Wrench::from_vector(&v))
}

/// `deflect`: minimum-norm twist under a wrench, with the residual.
pub fn cmd_deflect(
    selector: &ModelSelector,
    flags: &StewartFlags,
    wrench: &Wrench,
    format: OutputFormat,
) -> Result<String, CliFailure> {
    let legs = leg_inputs_for(selector, flags)?;
    let (k, _) = compute_aggregate(&legs)?;
    let twist = deflection(&k, wrench)?;
    let f = wrench.to_vector();
    let dt = twist.to_vector();
    let residual = (k.matrix() * dt - f).norm() / f.norm().max(f64::MIN_POSITIVE);
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            let items: Vec<String> = dt.iter().map(|&x| format_num(x)).collect();
            writeln!(
                out,
                "{{\"twist\":[{}],\"residual\":{}}}",
                items.join(","),
                format_num(residual)
            )
            .unwrap();
        }
        OutputFormat::Csv => {
            let items: Vec<String> = dt.iter().map(|&x| format_num(x)).collect();
            writeln!(out, "{}", items.join(",")).unwrap();
            writeln!(out, "# residual,{}", format_num(residual)).unwrap();
        }
        OutputFormat::Pretty => {
            let items: Vec<String> = dt.iter().map(|&x| format_num(x)).collect();
            writeln!(out, "twist: {}", items.join(" ")).unwrap();
            writeln!(out, "residual: {}", format_num(residual)).unwrap();
        }
    }
    Ok(out)
}

/// Parses a matrix file: a JSON 2D array, or comma/whitespace-separated rows
/// (lines starting with `#` ignored).
pub fn parse_matrix_text(text: &str) -> Result<DMatrix<f64>, CliFailure> {
    let trimmed = text.trim_start();
    let rows: Vec<Vec<f64>> = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliFailure::new(EXIT_SCHEMA, format!("invalid matrix JSON: {e}")))?;
        let arr = value
            .get("stiffness")
            .cloned()
            .unwrap_or(value);
        let arr = arr
            .as_array()
            .ok_or_else(|| CliFailure::new(EXIT_SCHEMA, "expected a JSON array of rows"))?
            .clone();
        arr.iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| CliFailure::new(EXIT_SCHEMA, "expected an array row"))?
                    .iter()
                    .map(|x| {
                        x.as_f64()
                            .ok_or_else(|| CliFailure::new(EXIT_SCHEMA, "expected a number"))
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?
    } else {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|line| {
                line.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|e| CliFailure::new(EXIT_SCHEMA, format!("bad number `{s}`: {e}")))
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?
    };
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliFailure::new(EXIT_SCHEMA, "matrix must be square and non-empty"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// `analyze`: spectral report for a matrix file.
pub fn cmd_analyze(
    matrix_text: &str,
    label: &str,
    format: OutputFormat,
    rank_tol: f64,
) -> Result<String, CliFailure> {
    let m = parse_matrix_text(matrix_text)?;
    let record = ReportRecord::from_matrix(label, m, rank_tol, vec![]);
    Ok(record.render(format))
}

fn rel_delta(a: &StiffnessMatrix6, b: &StiffnessMatrix6) -> f64 {
    let scale = a.matrix().norm().max(b.matrix().norm()).max(f64::MIN_POSITIVE);
    (a.matrix() - b.matrix()).norm() / scale
}

/// `validate`: recomputes the stiffness via the one-shot Schur complement,
/// the recursive procedure, the saddle-point inversion, and the energy
/// minimization oracle, and reports pairwise deltas.
pub fn cmd_validate(
    selector: &ModelSelector,
    flags: &StewartFlags,
    format: OutputFormat,
) -> Result<String, CliFailure> {
    const TOL_ALGEBRAIC: f64 = 1e-9;
    const TOL_ENERGY: f64 = 1e-6;

    let (label, variants): (String, Vec<(&str, StiffnessMatrix6)>) = match selector {
        ModelSelector::Demo2d => {
            // planar case embedded in (x, y, rz) with unit springs elsewhere
            let k2d = demo_2d_matrix();
            let (analytic2d, _) = motivating_2d(&k2d)?;
            let map = [0usize, 1, 5];
            let mut k0 = Matrix6::identity();
            for (a, &ia) in map.iter().enumerate() {
                for (b, &ib) in map.iter().enumerate() {
                    k0[(ia, ib)] = k2d[(a, b)];
                }
            }
            let mut analytic = Matrix6::identity();
            analytic[(5, 5)] = 0.0;
            for (a, &ia) in map.iter().enumerate() {
                for (b, &ib) in map.iter().enumerate() {
                    analytic[(ia, ib)] = analytic2d[(a, b)];
                }
            }
            let mut e6 = Vector6::zeros();
            e6[5] = 1.0;
            let jq = PassiveJacobian::from_columns(vec![e6]);
            let k0s = StiffnessMatrix6::from_matrix(k0);
            // the demo spring matrix is rank-deficient, so the saddle-point
            // and energy routes (which need an invertible spring block) do
            // not apply here
            let full = eliminate_full(&k0s, &jq)?;
            let recursive = eliminate_recursive(&k0s, &jq, None, RedundancyPolicy::Error)?.result;
            (
                "demo-2d".into(),
                vec![
                    ("analytic", StiffnessMatrix6::from_matrix(analytic)),
                    ("schur", full),
                    ("recursive", recursive),
                ],
            )
        }
        _ => {
            let legs = leg_inputs_for(selector, flags)?;
            let mut per_path: Vec<(&str, Vec<StiffnessMatrix6>)> = vec![
                ("schur", Vec::new()),
                ("recursive", Vec::new()),
                ("kkt", Vec::new()),
                ("energy", Vec::new()),
            ];
            for inputs in &legs {
                let k0 = base_stiffness(&inputs.j_theta, &inputs.k_theta)?;
                let jq_mat = inputs.j_q.to_matrix();
                per_path[0].1.push(eliminate_full(&k0, &inputs.j_q)?);
                per_path[1].1.push(
                    eliminate_recursive(&k0, &inputs.j_q, None, RedundancyPolicy::Error)?.result,
                );
                per_path[2]
                    .1
                    .push(kkt_stiffness(&inputs.j_theta, &inputs.k_theta, &jq_mat)?.0);
                per_path[3]
                    .1
                    .push(energy_oracle_stiffness(&inputs.j_theta, &inputs.k_theta, &jq_mat)?);
            }
            let variants = per_path
                .into_iter()
                .map(|(name, per_leg)| Ok((name, assemble(&legs, &per_leg)?)))
                .collect::<Result<Vec<_>, StiffnessError>>()?;
            (selector.label(), variants)
        }
    };

    let mut deltas = Vec::new();
    let mut worst: Option<&OracleDelta> = None;
    for i in 0..variants.len() {
        for j in i + 1..variants.len() {
            let tolerance = if variants[i].0 == "energy" || variants[j].0 == "energy" {
                TOL_ENERGY
            } else {
                TOL_ALGEBRAIC
            };
            deltas.push(OracleDelta {
                pair: format!("{}/{}", variants[i].0, variants[j].0),
                delta: rel_delta(&variants[i].1, &variants[j].1),
                tolerance,
            });
        }
    }
    for delta in &deltas {
        let headroom = delta.delta / delta.tolerance;
        if worst.map_or(true, |w| headroom > w.delta / w.tolerance) {
            worst = Some(delta);
        }
    }

    let breach = deltas.iter().find(|d| d.delta > d.tolerance);
    let mut record = ReportRecord::from_matrix(
        label,
        dmatrix6(variants[0].1.matrix()),
        DEFAULT_RANK_TOL,
        vec![],
    );
    record.oracle_deltas = deltas.clone();
    let rendered = record.render(format);
    if let Some(bad) = breach {
        return Err(CliFailure::new(
            EXIT_VALIDATION,
            format!(
                "validation breach: pair {} delta {:.3e} exceeds tolerance {:.3e}\n{rendered}",
                bad.pair, bad.delta, bad.tolerance
            ),
        ));
    }
    Ok(rendered)
}
