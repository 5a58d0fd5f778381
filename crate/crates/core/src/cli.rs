//! Command implementations behind the `ncpmap` binary.
//!
//! Table commands (`eigencurve`, `domain`, `positivity`) write CSV by default
//! and JSON on request. Report commands write JSON only. Every float is
//! printed in its shortest round-trip form, so reruns are byte-identical.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::domains::{
    excludes_north_pole, in_positivity, intersection_equals_compatibility, membership_grid, positivity_boundary,
    DomainSpec, EquivalenceReport, Section,
};
use crate::hermmap::MapFile;
use crate::matlin::{eig_hermitian_matrix, ComplexMatrix, C64, ONE, ZERO};
use crate::pechukas::{check_constant_rho_b, hunt_positivity_failure, AssignmentMap, HuntReport, SixVectorReport};
use crate::reduced::{
    build_basis, reduce, reduced_matrix_map, transfer_matrix, two_qubit_hamiltonian, BipartiteHamiltonian, EnvMeans,
    EnvMeansFile,
};
use crate::twoqubit::{
    analytic_eigensystem, reduced_map, singlet, two_qubit_state, witness_p, witness_p_min_closed_form, witness_w,
    CorrelationParams,
};
use crate::{Error, MatrixMap, Result};

const CP_TOL: f64 = 1e-10;
const TP_TOL: f64 = 1e-10;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "ncpmap",
    version,
    about = "Not-completely-positive reduced dynamics: maps, domains and checks",
    allow_negative_numbers = true
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Real part of the correlation parameter a
    #[arg(long, global = true, default_value_t = -0.5)]
    pub a1: f64,

    /// Imaginary part of the correlation parameter a
    #[arg(long, global = true, default_value_t = 0.5)]
    pub a2: f64,

    #[arg(long, global = true, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub omega_t: f64,

    /// Correlation magnitude ⟨Σ₊Ξ₁⟩ for the compatibility domain
    #[arg(long, global = true, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub c: f64,

    /// Rotation angle of the (s₊, s₋) axes
    #[arg(long, global = true, default_value_t = 3.0 * std::f64::consts::FRAC_PI_4)]
    pub alpha: f64,

    #[arg(long, global = true, default_value_t = 0.05)]
    pub grid_step: f64,

    #[arg(long, global = true, default_value_t = 720)]
    pub t_samples: usize,

    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainSection {
    Minus3,
    Plusminus,
    Plus3,
    Grid3d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    IdentityMap,
    TwoQubitMap,
    TwoQubitHamiltonian,
    CorrelatedMeans,
    SingletMeans,
    ProductAssignment,
    PerturbedAssignment,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Analytic and Jacobi eigenvalues of B over ωt ∈ [0, 2π]
    #[command(allow_negative_numbers = true)]
    Eigencurve {
        #[arg(long, default_value_t = 513)]
        steps: usize,
    },
    /// Section boundary curves or the full membership grid of the compatibility domain
    #[command(allow_negative_numbers = true)]
    Domain {
        #[arg(long, value_enum)]
        section: DomainSection,
    },
    /// Grid scan comparing the compatibility domain with the intersection of positivity domains
    #[command(allow_negative_numbers = true)]
    Equivalence,
    /// Boundary surface of the positivity domain at one ωt
    #[command(allow_negative_numbers = true)]
    Positivity,
    /// Witness values P' and W at the configured parameters
    #[command(allow_negative_numbers = true)]
    Witness,
    /// Signed Kraus decomposition of a map file
    #[command(allow_negative_numbers = true)]
    Decompose { map_file: PathBuf },
    /// Reduced affine map of a bipartite Hamiltonian at time t
    #[command(allow_negative_numbers = true)]
    Reduce {
        hamiltonian_file: PathBuf,
        env_means_file: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Factorization and positivity checks of an assignment map
    #[command(allow_negative_numbers = true)]
    Pechukas {
        assignment_file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Writes an example input file
    #[command(allow_negative_numbers = true)]
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
    },
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a1", self.a1),
            ("a2", self.a2),
            ("omega-t", self.omega_t),
            ("c", self.c),
            ("alpha", self.alpha),
            ("grid-step", self.grid_step),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("--{name} must be finite")));
            }
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "--grid-step {} outside (0, 0.5]",
                self.grid_step
            )));
        }
        if self.t_samples < 8 {
            return Err(Error::InvalidParameter(format!(
                "--t-samples {} below 8",
                self.t_samples
            )));
        }
        self.params()?;
        self.spec()?;
        if let Command::Eigencurve { steps } = self.command {
            if steps < 2 {
                return Err(Error::InvalidParameter(format!("--steps {steps} below 2")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<CorrelationParams> {
        CorrelationParams::new(self.a1, self.a2, self.omega_t)
    }

    pub fn spec(&self) -> Result<DomainSpec> {
        DomainSpec::new(self.c, self.alpha)
    }
}

/// One output cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:?}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// Rows with a header and `key=value` comment lines.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub comments: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn comment(&mut self, key: &str, value: impl ToString) {
        self.comments.push((key.to_string(), value.to_string()));
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        for (k, v) in &self.comments {
            writeln!(buf, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let meta: serde_json::Map<String, Value> = self
            .comments
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = serde_json::json!({ "meta": meta, "columns": self.columns, "rows": rows });
        let mut out = serde_json::to_vec_pretty(&doc)?;
        out.push(b'\n');
        Ok(out)
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}

/// What a command produced.
pub enum Output {
    Table(Table),
    Report(Value),
}

impl Output {
    fn report<T: Serialize>(value: &T) -> Result<Self> {
        Ok(Output::Report(serde_json::to_value(value)?))
    }

    pub fn render(&self, format: Option<Format>) -> Result<Vec<u8>> {
        match (self, format) {
            (Output::Table(t), None | Some(Format::Csv)) => t.to_csv(),
            (Output::Table(t), Some(Format::Json)) => t.to_json(),
            (Output::Report(v), None | Some(Format::Json)) => {
                let mut out = serde_json::to_vec_pretty(v)?;
                out.push(b'\n');
                Ok(out)
            }
            (Output::Report(_), Some(Format::Csv)) => {
                Err(Error::InvalidParameter("this command writes JSON reports only".into()))
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output> {
    cfg.validate()?;
    match &cfg.command {
        Command::Eigencurve { steps } => eigencurve(cfg, *steps).map(Output::Table),
        Command::Domain { section } => domain(cfg, *section).map(Output::Table),
        Command::Equivalence => equivalence(cfg),
        Command::Positivity => positivity(cfg).map(Output::Table),
        Command::Witness => witness(cfg),
        Command::Decompose { map_file } => decompose(map_file),
        Command::Reduce {
            hamiltonian_file,
            env_means_file,
            t,
        } => reduce_cmd(hamiltonian_file, env_means_file, *t),
        Command::Pechukas {
            assignment_file,
            samples,
        } => pechukas(assignment_file, *samples, cfg.seed),
        Command::Sample { kind } => sample(cfg, *kind),
    }
}

pub fn eigencurve(cfg: &RunConfig, steps: usize) -> Result<Table> {
    let base = cfg.params()?;
    let mut table = Table::new(&[
        "omega_t",
        "lambda1",
        "lambda2",
        "lambda3",
        "lambda4",
        "num_lambda1",
        "num_lambda2",
        "num_lambda3",
        "num_lambda4",
        "max_dev",
    ]);
    table.comment("a1", base.a1);
    table.comment("a2", base.a2);
    table.comment("abs_a_sq", base.abs_a_sq());
    for k in 0..steps {
        let wt = 2.0 * std::f64::consts::PI * k as f64 / (steps - 1) as f64;
        let p = base.at(wt);
        let analytic = analytic_eigensystem(&p).eigenvalues;
        let numeric = matched_numeric(&analytic, &reduced_map(&p))?;
        let dev = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let mut row = vec![Cell::Num(wt)];
        row.extend(analytic.iter().map(|&x| Cell::Num(x)));
        row.extend(numeric.iter().map(|&x| Cell::Num(x)));
        row.push(Cell::Num(dev));
        table.rows.push(row);
    }
    Ok(table)
}

/// Jacobi eigenvalues of B, assigned to the analytic labels by rank.
pub fn matched_numeric(analytic: &[f64; 4], map: &MatrixMap) -> Result<[f64; 4]> {
    let numeric = eig_hermitian_matrix(map.b_matrix())?.eigenvalues;
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| analytic[j].total_cmp(&analytic[i]));
    let mut out = [0.0; 4];
    for (rank, &label) in order.iter().enumerate() {
        out[label] = numeric[rank];
    }
    Ok(out)
}

pub fn domain(cfg: &RunConfig, section: DomainSection) -> Result<Table> {
    let named = match section {
        DomainSection::Minus3 => Some(Section::Minus3),
        DomainSection::Plusminus => Some(Section::PlusMinus),
        DomainSection::Plus3 => Some(Section::Plus3),
        DomainSection::Grid3d => None,
    };
    match named {
        Some(s) => {
            let points = (2.0 * std::f64::consts::PI / cfg.grid_step).ceil() as usize;
            let mut table = Table::new(&["section_name", "u", "v"]);
            table.comment("c", cfg.c);
            for (u, v) in s.boundary(cfg.c, points) {
                table
                    .rows
                    .push(vec![Cell::Text(s.name().into()), Cell::Num(u), Cell::Num(v)]);
            }
            Ok(table)
        }
        None => {
            let mut table = Table::new(&["s_plus", "s_minus", "s3", "in_domain"]);
            table.comment("c", cfg.c);
            table.comment("grid_step", cfg.grid_step);
            for g in membership_grid(cfg.c, cfg.grid_step)? {
                table.rows.push(vec![
                    Cell::Num(g.s_plus),
                    Cell::Num(g.s_minus),
                    Cell::Num(g.s3),
                    Cell::Bool(g.in_domain),
                ]);
            }
            Ok(table)
        }
    }
}

#[derive(Serialize)]
struct EquivalenceOutput {
    #[serde(flatten)]
    report: EquivalenceReport,
    interior_violations: usize,
    exceptions_within_step: bool,
    pass: bool,
}

fn equivalence(cfg: &RunConfig) -> Result<Output> {
    let report = intersection_equals_compatibility(&cfg.spec()?, cfg.grid_step, cfg.t_samples)?;
    let interior_violations = report.interior_violations();
    let exceptions_within_step = report.max_exception_distance <= report.grid_step;
    let pass = interior_violations == 0 && exceptions_within_step;
    Output::report(&EquivalenceOutput {
        report,
        interior_violations,
        exceptions_within_step,
        pass,
    })
}

pub fn positivity(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.params()?;
    let n_theta = (std::f64::consts::PI / cfg.grid_step).ceil() as usize + 1;
    let n_phi = (2.0 * std::f64::consts::PI / cfg.grid_step).ceil() as usize;
    let slab = p.omega_t.cos().abs() < 1e-12;
    let mut table = Table::new(&["surface", "theta", "phi", "s1", "s2", "s3", "on_boundary"]);
    table.comment("a1", p.a1);
    table.comment("a2", p.a2);
    table.comment("omega_t", p.omega_t);
    table.comment("north_pole_excluded", excludes_north_pole(&p));
    table.comment("slab", slab);
    let angles = || {
        (0..n_theta).flat_map(move |i| {
            let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
            (0..n_phi).map(move |j| (theta, 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64))
        })
    };
    if !slab {
        for (theta, phi) in angles() {
            let v = positivity_boundary(&p, theta, phi)?;
            let inside = v.norm_sq() <= 1.0 + 1e-12;
            table
                .rows
                .push(surface_row("stretched", theta, phi, v.as_array(), inside));
        }
    }
    for (theta, phi) in angles() {
        let (st, ct) = theta.sin_cos();
        let (sf, cf) = phi.sin_cos();
        let v = crate::BlochVector::new(st * cf, st * sf, ct);
        table
            .rows
            .push(surface_row("sphere", theta, phi, v.as_array(), in_positivity(&v, &p)));
    }
    Ok(table)
}

fn surface_row(surface: &str, theta: f64, phi: f64, s: [f64; 3], flag: bool) -> Vec<Cell> {
    vec![
        Cell::Text(surface.into()),
        Cell::Num(theta),
        Cell::Num(phi),
        Cell::Num(s[0]),
        Cell::Num(s[1]),
        Cell::Num(s[2]),
        Cell::Bool(flag),
    ]
}

#[derive(Serialize)]
struct WitnessOutput {
    a1: f64,
    a2: f64,
    omega_t: f64,
    p_prime_min_eigenvalue: Option<f64>,
    p_prime_closed_form: f64,
    p_prime_not_positive: bool,
    w_singlet: f64,
    w_singlet_closed_form: f64,
    w_not_completely_positive: bool,
}

fn witness(cfg: &RunConfig) -> Result<Output> {
    let p = cfg.params()?;
    let p_min = if p.abs_a_sq() > 0.0 {
        Some(witness_p(&p)?.min_eigenvalue)
    } else {
        None
    };
    let w = witness_w(-1.0, -1.0)?;
    Output::report(&WitnessOutput {
        a1: p.a1,
        a2: p.a2,
        omega_t: p.omega_t,
        p_prime_min_eigenvalue: p_min,
        p_prime_closed_form: witness_p_min_closed_form(&p),
        p_prime_not_positive: p_min.is_some_and(|m| m < 0.0),
        w_singlet: w,
        w_singlet_closed_form: 0.25 * (1.0 - std::f64::consts::SQRT_2),
        w_not_completely_positive: w < 0.0,
    })
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn flat(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Serialize)]
struct TermOutput {
    sign: i8,
    eigenvalue: f64,
    operator: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct DecomposeOutput {
    dim: usize,
    hermiticity_deviation: f64,
    trace_preservation_deviation: f64,
    trace_preserving: bool,
    min_b_eigenvalue: f64,
    completely_positive: bool,
    positive_terms: usize,
    negative_terms: usize,
    terms: Vec<TermOutput>,
    completeness: Vec<[f64; 2]>,
    completeness_deviation: f64,
    orthogonality_deviation: f64,
    reconstruction_deviation: f64,
}

fn decompose(path: &Path) -> Result<Output> {
    let map = MatrixMap::from_json(&read_text(path)?)?;
    let sk = map.signed_kraus()?;
    let min_b = map.min_b_eigenvalue()?;
    let terms = sk
        .terms
        .iter()
        .zip(&sk.eigenvalues)
        .map(|(t, &eigenvalue)| TermOutput {
            sign: t.sign.value() as i8,
            eigenvalue,
            operator: flat(&t.operator),
        })
        .collect();
    let tp = map.trace_preservation_deviation();
    Output::report(&DecomposeOutput {
        dim: map.dim(),
        hermiticity_deviation: map.hermiticity_deviation(),
        trace_preservation_deviation: tp,
        trace_preserving: tp <= TP_TOL,
        min_b_eigenvalue: min_b,
        completely_positive: min_b >= -CP_TOL,
        positive_terms: sk.positive_count(),
        negative_terms: sk.terms.len() - sk.positive_count(),
        terms,
        completeness: flat(&sk.completeness()),
        completeness_deviation: sk.completeness_deviation(),
        orthogonality_deviation: sk.orthogonality_deviation(),
        reconstruction_deviation: sk.to_map().b_matrix().max_abs_diff(map.b_matrix()),
    })
}

#[derive(Serialize)]
struct ReduceOutput {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    t: f64,
    drift: Vec<f64>,
    block: Vec<f64>,
    orthogonality_deviation: f64,
    unit_row_column_deviation: f64,
    map: MapFile,
    min_b_eigenvalue: f64,
    completely_positive: bool,
    trace_preserving: bool,
}

fn reduce_cmd(h_path: &Path, env_path: &Path, t: f64) -> Result<Output> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter("--t must be finite".into()));
    }
    let h = BipartiteHamiltonian::from_json(&read_text(h_path)?)?;
    let env_file: EnvMeansFile = serde_json::from_str(&read_text(env_path)?)?;
    let env = EnvMeans::from_file(&env_file)?;
    let a = build_basis(h.dim_a, None)?;
    let b = build_basis(h.dim_b, None)?;
    let tm = transfer_matrix(&h.h, t, &a, &b)?;
    let ram = reduce(&tm, &env)?;
    let map = reduced_matrix_map(&ram, &a)?;
    let min_b = map.min_b_eigenvalue()?;
    Output::report(&ReduceOutput {
        dim_a: h.dim_a,
        dim_b: h.dim_b,
        t,
        drift: ram.drift,
        block: ram.block,
        orthogonality_deviation: tm.orthogonality_deviation(),
        unit_row_column_deviation: tm.unit_row_column_deviation(),
        map: map.to_file(),
        min_b_eigenvalue: min_b,
        completely_positive: min_b >= -CP_TOL,
        trace_preserving: map.is_trace_preserving(TP_TOL),
    })
}

#[derive(Serialize)]
struct PechukasOutput {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    partial_trace_deviation: f64,
    linearity_deviation: f64,
    product: bool,
    hunt: HuntReport,
    six_vectors: SixVectorReport,
    theorem_consistent: bool,
}

fn pechukas(path: &Path, samples: usize, seed: u64) -> Result<Output> {
    let l = AssignmentMap::from_json(&read_text(path)?)?;
    let (n, m) = l.dims();
    if n < 2 {
        return Err(Error::InvalidParameter("assignment needs dimA ≥ 2".into()));
    }
    let basis = |i: usize| -> Vec<C64> { (0..n).map(|k| if k == i { ONE } else { ZERO }).collect() };
    let hunt = hunt_positivity_failure(&l, samples, seed)?;
    let six = check_constant_rho_b(&l, &basis(0), &basis(1), std::f64::consts::FRAC_PI_4, 0.0)?;
    let theorem_consistent = !hunt.non_product || hunt.violation_found;
    Output::report(&PechukasOutput {
        dim_a: n,
        dim_b: m,
        partial_trace_deviation: l.partial_trace_deviation()?,
        linearity_deviation: l.linearity_deviation(100, seed)?,
        product: !hunt.non_product,
        hunt,
        six_vectors: six,
        theorem_consistent,
    })
}

fn sample(cfg: &RunConfig, kind: SampleKind) -> Result<Output> {
    let value = match kind {
        SampleKind::IdentityMap => serde_json::to_value(MatrixMap::identity(2).to_file())?,
        SampleKind::TwoQubitMap => serde_json::to_value(reduced_map(&cfg.params()?).to_file())?,
        SampleKind::TwoQubitHamiltonian => {
            serde_json::to_value(BipartiteHamiltonian::new(2, 2, two_qubit_hamiltonian(1.0))?.to_file())?
        }
        SampleKind::CorrelatedMeans => {
            // ⟨Σ₂Ξ₁⟩ = −a₁, ⟨Σ₁Ξ₁⟩ = a₂
            let p = cfg.params()?;
            let pi = two_qubit_state([0.0; 3], [0.0; 3], [[p.a2, 0.0, 0.0], [-p.a1, 0.0, 0.0], [0.0; 3]]);
            env_means_value(&pi)?
        }
        SampleKind::SingletMeans => env_means_value(&singlet())?,
        SampleKind::ProductAssignment => serde_json::to_value(AssignmentMap::product(2, &sample_rho_b())?.to_file()?)?,
        SampleKind::PerturbedAssignment => {
            serde_json::to_value(AssignmentMap::perturbed(2, &sample_rho_b(), 0.1)?.to_file()?)?
        }
    };
    Ok(Output::Report(value))
}

fn sample_rho_b() -> ComplexMatrix {
    ComplexMatrix::diag_real(&[0.7, 0.3])
}

fn env_means_value(pi: &ComplexMatrix) -> Result<Value> {
    let basis = build_basis(2, None)?;
    Ok(serde_json::to_value(
        EnvMeans::from_state(pi, &basis, &basis)?.to_file(),
    )?)
}

fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Exit status: 0 success, 1 validation failure, 2 I/O failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = run(&cfg)
        .and_then(|o| o.render(cfg.format))
        .and_then(|b| write_output(&b, cfg.out.as_deref()));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
