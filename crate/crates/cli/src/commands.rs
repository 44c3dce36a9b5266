use std::io::Write;
use std::path::Path;

use serde::Serialize;

use painleve_ds::error::Error;
use painleve_ds::exact_numerics::Rational;
use painleve_ds::flow_engine::{
    self, dopri, integrate as run_flow, residual_along, FlowProblem, ReferenceRun, ResidualReport, Termination,
    Tolerances, TrajectoryMetadata, TrajectorySample,
};
use painleve_ds::heisenberg::{build_heisenberg, summarize, verify_heisenberg, Partition};
use painleve_ds::lax_verification::{check_constraints, check_normalization, verify_partition};
use painleve_ds::painleve_core::{params_from_reduction, PainleveParams, PhasePoint, Reduction, SystemId};
use painleve_ds::report::{Failure, VerificationReport};
use painleve_ds::weyl_symmetry::{apply_word, check_equivariance, check_gauge_bridge, check_relations, WeylWord};

use crate::config::{Format, RunConfig};
use crate::{EXIT_FAIL, EXIT_OK};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;

/// Ways a command ends other than with a plain exit code.
#[derive(Debug)]
pub enum Exit {
    /// Bad or missing arguments (exit 2).
    Usage(String),
    /// Output could not be written (exit 1).
    Io(String),
}

pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

type Outcome = Result<i32, Exit>;

fn usage<E: std::fmt::Display>(e: E) -> Exit {
    Exit::Usage(e.to_string())
}

fn io_err<E: std::fmt::Display>(e: E) -> Exit {
    Exit::Io(e.to_string())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

/// JSON when asked for or when the check failed, text otherwise. Failing
/// runs in text mode also print the text summary on stderr.
fn emit<T: Serialize>(io: &mut Io, cfg: &RunConfig, value: &T, text: impl FnOnce() -> String, ok: bool) -> Outcome {
    let format = cfg.format.unwrap_or_default();
    if format == Format::Json || !ok {
        writeln!(io.out, "{}", json(value)).map_err(io_err)?;
        if !ok && format != Format::Json {
            write!(io.err, "{}", text()).map_err(io_err)?;
        }
    } else {
        write!(io.out, "{}", text()).map_err(io_err)?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn require<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T, Exit> {
    v.as_ref().ok_or_else(|| Exit::Usage(format!("--{flag} is required")))
}

fn samples(cfg: &RunConfig) -> (usize, u64) {
    (cfg.samples.unwrap_or(DEFAULT_SAMPLES), cfg.seed.unwrap_or(DEFAULT_SEED))
}

fn reduction_of(p: &Partition) -> Result<Reduction, Exit> {
    Reduction::from_partition(p).map_err(usage)
}

pub fn heisenberg(cfg: &RunConfig, io: &mut Io) -> Outcome {
    let p = require(&cfg.partition, "partition")?;
    let s = summarize(p).map_err(usage)?;
    let ok = s.checks.iter().all(|c| c.pass);
    let text = || {
        let mut t = format!("partition {}\nN={}\ns=({})\n", s.partition, s.n_scale, join(&s.s));
        for g in &s.generators {
            match g.degree {
                Some(d) => t.push_str(&format!("{} (degree {d}):\n", g.name)),
                None => t.push_str(&format!("{}:\n", g.name)),
            }
            for line in g.matrix.lines() {
                t.push_str(&format!("  {line}\n"));
            }
        }
        for c in &s.checks {
            let mark = if c.pass { "pass" } else { "FAIL" };
            t.push_str(&format!("{mark} {}", c.name));
            if let Some(w) = &c.witness {
                t.push_str(&format!(": {w}"));
            }
            t.push('\n');
        }
        t
    };
    emit(io, cfg, &s, text, ok)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct LaxReport<'a> {
    partition: Reduction,
    samples: usize,
    passed: usize,
    failures: &'a [Failure],
}

impl<'a> LaxReport<'a> {
    fn new(red: Reduction, r: &'a VerificationReport) -> Self {
        LaxReport { partition: red, samples: r.samples, passed: r.passed, failures: &r.failures }
    }
}

fn summary_line(name: &str, r: &VerificationReport) -> String {
    let mark = if r.ok() { "pass" } else { "FAIL" };
    format!("{mark} {name}: {}/{} samples passed\n", r.passed, r.samples)
}

pub fn verify_lax(cfg: &RunConfig, io: &mut Io) -> Outcome {
    let (n, seed) = samples(cfg);
    let reds = match &cfg.partition {
        Some(p) => vec![reduction_of(p)?],
        None => Reduction::ALL.to_vec(),
    };
    let reports: Vec<(Reduction, VerificationReport)> =
        reds.iter().map(|&r| (r, verify_partition(r, n, seed))).collect();
    let ok = reports.iter().all(|(_, r)| r.ok());
    let text = || reports.iter().map(|(red, r)| summary_line(&red.to_string(), r)).collect::<String>();
    let views: Vec<LaxReport> = reports.iter().map(|(red, r)| LaxReport::new(*red, r)).collect();
    if cfg.partition.is_some() {
        emit(io, cfg, &views[0], text, ok)
    } else {
        #[derive(Serialize)]
        struct All<'a> {
            partitions: &'a [LaxReport<'a>],
        }
        emit(io, cfg, &All { partitions: &views }, text, ok)
    }
}

#[derive(Serialize)]
struct PointView {
    q: Vec<Rational>,
    p: Vec<Rational>,
    t: Rational,
    alphas: Vec<Rational>,
    eta: Rational,
}

impl PointView {
    fn new(x: &PhasePoint<Rational>, params: &PainleveParams) -> Self {
        PointView { q: x.q.clone(), p: x.p.clone(), t: x.t.clone(), alphas: params.alphas.clone(), eta: params.eta() }
    }

    fn text(&self) -> String {
        let mut t = String::new();
        for (i, (q, p)) in self.q.iter().zip(&self.p).enumerate() {
            t.push_str(&format!("q{} = {q}\np{} = {p}\n", i + 1, i + 1));
        }
        t.push_str(&format!("t = {}\nalphas = {}\neta = {}\n", self.t, join(&self.alphas), self.eta));
        t
    }
}

pub fn weyl(cfg: &RunConfig, io: &mut Io) -> Outcome {
    let word: WeylWord = cfg.word.as_deref().unwrap_or("").parse().map_err(usage)?;
    let point = require(&cfg.point, "point")?
        .iter()
        .map(|v| v.exact())
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    if point.len() != 4 {
        return Err(Exit::Usage(format!("--point needs q1,p1,q2,p2, got {} values", point.len())));
    }
    let t = require(&cfg.t, "t")?.exact().map_err(usage)?;
    let alphas = require(&cfg.alphas, "alphas")?.clone();
    let eta = require(&cfg.eta, "eta")?.clone();
    let params = PainleveParams::new(SystemId::CP6, alphas, Some(eta)).map_err(usage)?;
    let x = PhasePoint::from_interleaved(&point, t);

    #[derive(Serialize)]
    struct WeylOutput {
        word: String,
        input: PointView,
        #[serde(skip_serializing_if = "Option::is_none")]
        image: Option<PointView>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    }
    let input = PointView::new(&x, &params);
    match apply_word(&word, &x, &params) {
        Ok((y, np)) => {
            let image = PointView::new(&y, &np);
            let text = image.text();
            let out = WeylOutput { word: word.to_string(), input, image: Some(image), error: None };
            emit(io, cfg, &out, || text, true)
        }
        Err(e @ (Error::Pole(_) | Error::DivisionByZero)) => {
            let msg = e.to_string();
            let out = WeylOutput { word: word.to_string(), input, image: None, error: Some(msg.clone()) };
            emit(io, cfg, &out, || format!("error: {msg}\n"), false)
        }
        Err(e) => Err(usage(e)),
    }
}

#[derive(Serialize)]
struct WeylCheckReport<'a> {
    samples: usize,
    seed: u64,
    relations: &'a VerificationReport,
    equivariance: &'a VerificationReport,
    gauge_bridge: &'a VerificationReport,
}

pub fn weyl_check(cfg: &RunConfig, io: &mut Io) -> Outcome {
    let (n, seed) = samples(cfg);
    let rel = check_relations(n, seed);
    let eq = check_equivariance(n, seed);
    let gb = check_gauge_bridge(n, seed);
    let ok = rel.ok() && eq.ok() && gb.ok();
    let text = || {
        summary_line("relations", &rel) + &summary_line("equivariance", &eq) + &summary_line("gauge bridge", &gb)
    };
    let rep = WeylCheckReport { samples: n, seed, relations: &rel, equivariance: &eq, gauge_bridge: &gb };
    emit(io, cfg, &rep, text, ok)
}

#[derive(Serialize)]
struct IntegrateSummary<'a> {
    #[serde(flatten)]
    metadata: TrajectoryMetadata<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<&'a [TrajectorySample]>,
}

fn integrate_params(cfg: &RunConfig, system: SystemId, red: Option<Reduction>) -> Result<PainleveParams, Exit> {
    if let Some(k) = &cfg.kappas {
        let red = red.ok_or_else(|| Exit::Usage("--kappas needs --partition".into()))?;
        let rhos = cfg.rhos.clone().unwrap_or_default();
        return params_from_reduction(red, k, &rhos).map_err(usage);
    }
    let alphas = require(&cfg.alphas, "alphas")?.clone();
    PainleveParams::new(system, alphas, cfg.eta.clone()).map_err(usage)
}

pub fn integrate(cfg: &RunConfig, io: &mut Io) -> Outcome {
    let red = cfg.partition.as_ref().map(reduction_of).transpose()?;
    let system = match (cfg.system, red) {
        (Some(s), Some(r)) if s != r.system() => {
            return Err(Exit::Usage(format!("partition {r} reduces to {}, not {s}", r.system())))
        }
        (Some(s), _) => s,
        (None, Some(r)) => r.system(),
        (None, None) => return Err(Exit::Usage("--system or --partition is required".into())),
    };
    let params = integrate_params(cfg, system, red)?;
    let y0: Vec<f64> = require(&cfg.point, "point")?.iter().map(|v| v.to_f64()).collect();
    if y0.len() != 2 * system.pairs() {
        return Err(Exit::Usage(format!("--point needs {} values for {system}, got {}", 2 * system.pairs(), y0.len())));
    }
    let t0 = require(&cfg.t, "t0")?.to_f64();
    let t1 = require(&cfg.t_end, "t1")?.to_f64();
    let gauge_count = red.map(|r| r.gauge_names().len()).unwrap_or(0);
    let gauge: Vec<f64> = match &cfg.gauge {
        Some(g) => g.iter().map(|v| v.to_f64()).collect(),
        None => vec![1.0; gauge_count],
    };
    let defaults = Tolerances::default();
    let tol = Tolerances { rel: cfg.rtol.unwrap_or(defaults.rel), abs: cfg.atol.unwrap_or(defaults.abs) };
    let residual_tol = cfg.residual_tol.unwrap_or(DEFAULT_RESIDUAL_TOL);
    let problem = FlowProblem::new(params.clone(), red).map_err(usage)?;
    let x0 = PhasePoint::from_interleaved(&y0, t0);

    let traj = match run_flow(&problem, &x0, &gauge, t1, tol) {
        Ok(t) => t,
        Err(e @ (Error::Domain(_) | Error::Pole(_) | Error::DivisionByZero)) => {
            #[derive(Serialize)]
            struct Rejected<'a> {
                system: SystemId,
                params: &'a PainleveParams,
                t0: f64,
                t1: f64,
                error: String,
            }
            let w = Rejected { system, params: &params, t0, t1, error: e.to_string() };
            return emit(io, cfg, &w, || format!("error: {e}\n"), false);
        }
        Err(e) => return Err(usage(e)),
    };
    let (residual, residual_error) = match red.map(|r| residual_along(&traj, r)) {
        Some(Ok(r)) => (Some(r), None),
        Some(Err(e)) => (None, Some(e.to_string())),
        None => (None, None),
    };
    let residual_ok = residual_error.is_none() && residual.as_ref().map_or(true, |r| r.max_residual <= residual_tol);
    let ok = traj.termination == Termination::ReachedEnd && residual_ok;

    let grid: Option<Vec<f64>> = cfg.grid.map(|n| {
        let (a, b) = (traj.samples[0].t, traj.last().t);
        match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
        }
    });
    let csv = traj.to_csv(grid.as_deref());
    let format = cfg.format.unwrap_or_default();
    let mut summary = IntegrateSummary {
        metadata: traj.metadata(),
        residual: residual.clone(),
        residual_error: residual_error.clone(),
        residual_tol: red.map(|_| residual_tol),
        samples: None,
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, &csv).map_err(|e| io_err(format!("{}: {e}", path.display())))?;
        let side = sidecar(path);
        std::fs::write(&side, json(&summary) + "\n").map_err(|e| io_err(format!("{}: {e}", side.display())))?;
    } else if format == Format::Csv && ok {
        write!(io.out, "{csv}").map_err(io_err)?;
        return Ok(EXIT_OK);
    } else if format == Format::Json {
        summary.samples = Some(&traj.samples);
    }
    let text = || {
        let mut t = format!(
            "{}: t {} -> {} in {} steps, {:?}\n",
            traj.system,
            traj.samples[0].t,
            traj.last().t,
            traj.samples.len() - 1,
            traj.termination
        );
        if let Some(m) = &traj.message {
            t.push_str(&format!("  {m}\n"));
        }
        if let Some(r) = &residual {
            t.push_str(&format!("max Lax residual {:e} at t = {} (tolerance {residual_tol:e})\n", r.max_residual, r.worst_t));
        }
        if let Some(e) = &residual_error {
            t.push_str(&format!("residual not evaluated: {e}\n"));
        }
        if let Some(p) = &cfg.output {
            t.push_str(&format!("wrote {} and {}\n", p.display(), sidecar(p).display()));
        }
        t
    };
    emit(io, cfg, &summary, text, ok)
}

/// `run.csv` → `run.json`; a path without extension gets `.json` appended.
pub fn sidecar(path: &Path) -> std::path::PathBuf {
    if path.extension().map_or(false, |e| e == "json") {
        let mut s = path.as_os_str().to_owned();
        s.push(".meta.json");
        return s.into();
    }
    path.with_extension("json")
}

#[derive(Serialize)]
struct ReductionHeisenberg {
    partition: Partition,
    #[serde(rename = "N")]
    n_scale: i64,
    s: Vec<i64>,
}

#[derive(Serialize)]
struct HeisenbergFailure {
    partition: Partition,
    check: String,
    witness: String,
}

#[derive(Serialize)]
struct HeisenbergSection {
    reductions: Vec<ReductionHeisenberg>,
    partitions_checked: usize,
    failures: Vec<HeisenbergFailure>,
}

#[derive(Serialize)]
struct NumericsSection {
    order_steps: Vec<f64>,
    order_errors: Vec<f64>,
    order_slope: f64,
    trajectories: Vec<ReferenceRun>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<String>,
}

#[derive(Serialize)]
struct FullReport<'a> {
    samples: usize,
    seed: u64,
    pass: bool,
    heisenberg: HeisenbergSection,
    zero_curvature: Vec<LaxReport<'a>>,
    constraints: &'a [VerificationReport],
    normalization: &'a [VerificationReport],
    weyl_relations: &'a VerificationReport,
    equivariance: &'a VerificationReport,
    gauge_bridge: &'a VerificationReport,
    numerics: NumericsSection,
}

/// Largest partition size covered by the Heisenberg sweep.
pub const HEISENBERG_MAX_M: usize = 7;

fn heisenberg_section() -> HeisenbergSection {
    let mut reductions = Vec::new();
    for red in Reduction::ALL {
        let p = red.partition();
        if let Ok(d) = build_heisenberg(&p) {
            reductions.push(ReductionHeisenberg { partition: p, n_scale: d.n_scale, s: d.s_vector.clone() });
        }
    }
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in 2..=HEISENBERG_MAX_M {
        for p in Partition::all_of(m) {
            checked += 1;
            match build_heisenberg(&p).and_then(|d| verify_heisenberg(&d)) {
                Ok(checks) => failures.extend(checks.into_iter().filter(|c| !c.pass).map(|c| HeisenbergFailure {
                    partition: p.clone(),
                    check: c.name,
                    witness: c.witness.unwrap_or_default(),
                })),
                Err(e) => failures.push(HeisenbergFailure { partition: p, check: "build".into(), witness: e.to_string() }),
            }
        }
    }
    HeisenbergSection { reductions, partitions_checked: checked, failures }
}

pub const ORDER_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

fn numerics_section() -> (NumericsSection, bool) {
    let errs = dopri::manufactured_errors(&ORDER_STEPS);
    let slope = dopri::order_slope(&ORDER_STEPS);
    let mut trajectories = Vec::new();
    let mut errors = Vec::new();
    for red in Reduction::ALL {
        match flow_engine::reference_run(red, 2.0, 3.0, Tolerances { rel: 1e-10, abs: 1e-12 }) {
            Ok(r) => trajectories.push(r),
            Err(e) => errors.push(format!("{red}: {e}")),
        }
    }
    let ok = (slope - 5.0).abs() <= 0.3
        && errors.is_empty()
        && trajectories.iter().all(|r| {
            r.termination == Termination::ReachedEnd && r.max_residual <= 1e-6 && r.round_trip_error <= 1e-6
        });
    let sec = NumericsSection {
        order_steps: ORDER_STEPS.to_vec(),
        order_errors: errs.into_iter().map(|(_, e)| e).collect(),
        order_slope: slope,
        trajectories,
        errors,
    };
    (sec, ok)
}

pub fn report(cfg: &RunConfig, io: &mut Io) -> Outcome {
    let (n, seed) = samples(cfg);
    let heis = heisenberg_section();
    let lax: Vec<(Reduction, VerificationReport)> =
        Reduction::ALL.iter().map(|&r| (r, verify_partition(r, n, seed))).collect();
    let constraints: Vec<VerificationReport> = Reduction::ALL.iter().map(|&r| check_constraints(r, n, seed)).collect();
    let normalization: Vec<VerificationReport> =
        Reduction::ALL.iter().map(|&r| check_normalization(r, 10 * n, seed)).collect();
    let rel = check_relations(n, seed);
    let eq = check_equivariance(n, seed);
    let gb = check_gauge_bridge(n, seed);
    let (numerics, numerics_ok) = numerics_section();
    let pass = heis.failures.is_empty()
        && lax.iter().all(|(_, r)| r.ok())
        && constraints.iter().all(VerificationReport::ok)
        && normalization.iter().all(VerificationReport::ok)
        && rel.ok()
        && eq.ok()
        && gb.ok()
        && numerics_ok;
    let text = {
        let mut t = format!(
            "{} heisenberg: {} partitions checked\n",
            if heis.failures.is_empty() { "pass" } else { "FAIL" },
            heis.partitions_checked
        );
        for (red, r) in &lax {
            t += &summary_line(&format!("zero curvature {red}"), r);
        }
        for r in constraints.iter().chain(&normalization).chain([&rel, &eq, &gb]) {
            t += &summary_line(&r.subject, r);
        }
        t += &format!(
            "{} numerics: order slope {:.3}, max residual {:e}, max round trip {:e}\n",
            if numerics_ok { "pass" } else { "FAIL" },
            numerics.order_slope,
            numerics.trajectories.iter().map(|r| r.max_residual).fold(0.0, f64::max),
            numerics.trajectories.iter().map(|r| r.round_trip_error).fold(0.0, f64::max)
        );
        t
    };
    let rep = FullReport {
        samples: n,
        seed,
        pass,
        heisenberg: heis,
        zero_curvature: lax.iter().map(|(red, r)| LaxReport::new(*red, r)).collect(),
        constraints: &constraints,
        normalization: &normalization,
        weyl_relations: &rel,
        equivariance: &eq,
        gauge_bridge: &gb,
        numerics,
    };
    let code = if pass { EXIT_OK } else { EXIT_FAIL };
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, json(&rep) + "\n").map_err(|e| io_err(format!("{}: {e}", path.display())))?;
            write!(io.out, "{text}wrote {}\n", path.display()).map_err(io_err)?;
            Ok(code)
        }
        None if cfg.format == Some(Format::Text) => {
            write!(io.out, "{text}").map_err(io_err)?;
            Ok(code)
        }
        None => {
            writeln!(io.out, "{}", json(&rep)).map_err(io_err)?;
            Ok(code)
        }
    }
}
