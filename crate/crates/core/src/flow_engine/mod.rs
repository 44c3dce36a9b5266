//! Adaptive float integration of the Hamiltonian systems, with gauge
//! variables carried in log form and a Lax-residual monitor.

pub mod dopri;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_numerics::{Scalar, FLOAT_POLE_EPS};
use crate::lax_verification::curvature;
use crate::painleve_core::{pfaffian_log_derivative, vector_field, PainleveParams, PhasePoint, Reduction, SystemId};

/// State magnitude treated as a pole.
pub const BLOWUP: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedEnd,
    PoleDetected,
    StepUnderflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel: 1e-10, abs: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub gauge: Vec<f64>,
    /// Max-norm of the embedded error of the step that produced this sample.
    pub local_error: f64,
    /// f(t, y) as seen by the stepper: (dq, dp) interleaved, then d log g.
    #[serde(skip)]
    pub derivative: Vec<f64>,
}

impl TrajectorySample {
    pub fn point(&self) -> PhasePoint<f64> {
        PhasePoint::new(self.q.clone(), self.p.clone(), self.t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub system: SystemId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reduction>,
    pub params: PainleveParams,
    pub tolerances: Tolerances,
    pub gauge_names: Vec<&'static str>,
    /// Sign of each gauge variable; the state carries log|g|.
    #[serde(skip)]
    pub gauge_signs: Vec<f64>,
    pub samples: Vec<TrajectorySample>,
    pub termination: Termination,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Everything fixed for one integration.
#[derive(Clone, Debug)]
pub struct FlowProblem {
    pub params: PainleveParams,
    /// Reduction whose gauge variables are carried along, if any.
    pub reduction: Option<Reduction>,
}

impl FlowProblem {
    pub fn new(params: PainleveParams, reduction: Option<Reduction>) -> Result<Self> {
        if let Some(red) = reduction {
            if red.system() != params.system {
                return Err(Error::Domain(format!("{red} carries {} parameters, not {}", red.system(), params.system)));
            }
        }
        Ok(FlowProblem { params, reduction })
    }

    pub fn gauge_names(&self) -> Vec<&'static str> {
        self.reduction.map(|r| r.gauge_names().to_vec()).unwrap_or_default()
    }

    fn pairs(&self) -> usize {
        self.params.system.pairs()
    }

    /// Right-hand side on y = (q1, p1, ..., log|g1|, ...).
    pub fn rhs(&self, t: f64, y: &[f64]) -> Result<Vec<f64>> {
        let m = self.pairs();
        if let Some(v) = y.iter().find(|v| !v.is_finite() || v.abs() > BLOWUP) {
            return Err(Error::Pole(format!("state magnitude {v:e}")));
        }
        let x = PhasePoint::from_interleaved(&y[..2 * m], t);
        let (dq, dp) = vector_field(&self.params, &x)?;
        let mut out: Vec<f64> = dq.into_iter().zip(dp).flat_map(|(a, b)| [a, b]).collect();
        if let Some(red) = self.reduction {
            out.extend(pfaffian_log_derivative(red, &x, &self.params)?.into_iter().map(|(_, v)| v));
        }
        if let Some(v) = out.iter().find(|v| !v.is_finite() || v.abs() > BLOWUP) {
            return Err(Error::Pole(format!("derivative magnitude {v:e}")));
        }
        Ok(out)
    }
}

fn check_interval(system: SystemId, t0: f64, t1: f64) -> Result<()> {
    if !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Domain("non-finite time".into()));
    }
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    for &s in system.singular_times() {
        let s = s as f64;
        if lo - FLOAT_POLE_EPS <= s && s <= hi + FLOAT_POLE_EPS {
            return Err(Error::Domain(format!("[{t0}, {t1}] contains the singular time t = {s} of {system}")));
        }
    }
    Ok(())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Integrate from x0 (at x0.t) to t_end.
///
/// Errors only on invalid input: a time range through a fixed singular time,
/// wrong arity, or a singular start. Poles met on the way end the trajectory
/// with [`Termination::PoleDetected`].
pub fn integrate(
    problem: &FlowProblem,
    x0: &PhasePoint<f64>,
    gauge0: &[f64],
    t_end: f64,
    tol: Tolerances,
) -> Result<Trajectory> {
    let params = &problem.params;
    params.check_point(x0)?;
    let names = problem.gauge_names();
    if gauge0.len() != names.len() {
        return Err(Error::Arity { what: "gauge values", expected: names.len(), got: gauge0.len() });
    }
    if gauge0.iter().any(|g| g.abs() < FLOAT_POLE_EPS || !g.is_finite()) {
        return Err(Error::Domain("gauge values must be finite and nonzero".into()));
    }
    if !(tol.rel > 0.0 && tol.abs >= 0.0) {
        return Err(Error::Domain("tolerances must be positive".into()));
    }
    let t0 = x0.t;
    check_interval(params.system, t0, t_end)?;

    let signs: Vec<f64> = gauge0.iter().map(|g| g.signum()).collect();
    let mut y = x0.interleaved();
    y.extend(gauge0.iter().map(|g| g.abs().ln()));
    let f = |t: f64, y: &[f64]| problem.rhs(t, y);
    let mut k1 = f(t0, &y)?;

    let sample = |t: f64, y: &[f64], d: Vec<f64>, local_error: f64| {
        let m = problem.pairs();
        let x = PhasePoint::from_interleaved(&y[..2 * m], t);
        TrajectorySample {
            t,
            q: x.q,
            p: x.p,
            gauge: y[2 * m..].iter().zip(&signs).map(|(l, s)| s * l.exp()).collect(),
            local_error,
            derivative: d,
        }
    };
    let mut traj = Trajectory {
        system: params.system,
        reduction: problem.reduction,
        params: params.clone(),
        tolerances: tol,
        gauge_names: names,
        gauge_signs: signs.clone(),
        samples: vec![sample(t0, &y, k1.clone(), 0.0)],
        termination: Termination::ReachedEnd,
        message: None,
    };
    let span = t_end - t0;
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut h = dopri::initial_step(&y, &k1, tol.rel, tol.abs, span) * dir;
    let mut ctl = dopri::Controller::default();
    loop {
        let remaining = t_end - t;
        if remaining * dir <= 0.0 {
            break;
        }
        let last = h.abs() >= remaining.abs();
        if last {
            h = remaining;
        }
        if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            traj.termination = Termination::StepUnderflow;
            traj.message = Some(format!("step size {:e} at t = {t}", h.abs()));
            break;
        }
        match dopri::step(&f, t, &y, &k1, h) {
            Ok((y1, k7, e)) => {
                let err = dopri::error_norm(&e, &y, &y1, tol.rel, tol.abs);
                if err.is_finite() && err <= 1.0 {
                    t = if last { t_end } else { t + h };
                    y = y1;
                    k1 = k7;
                    traj.samples.push(sample(t, &y, k1.clone(), max_abs(&e)));
                    h = ctl.accept(h, err);
                } else {
                    h = if err.is_finite() { ctl.reject(h, err) } else { h * 0.2 };
                }
            }
            Err(Error::Pole(what)) | Err(Error::Domain(what)) => {
                // A stage hit a singularity; shrink and retry until underflow.
                h *= 0.2;
                if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    traj.termination = Termination::PoleDetected;
                    traj.message = Some(format!("pole near t = {t}: {what}"));
                    break;
                }
            }
            Err(Error::DivisionByZero) => {
                h *= 0.2;
                if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    traj.termination = Termination::PoleDetected;
                    traj.message = Some(format!("pole near t = {t}"));
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

impl Trajectory {
    fn state(&self, s: &TrajectorySample) -> Vec<f64> {
        let mut y: Vec<f64> = s.q.iter().zip(&s.p).flat_map(|(a, b)| [*a, *b]).collect();
        y.extend(s.gauge.iter().map(|g| g.abs().ln()));
        y
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectories are never empty")
    }

    /// Cubic Hermite interpolation between accepted steps; None outside the
    /// integrated range.
    pub fn interpolate(&self, t: f64) -> Option<TrajectorySample> {
        let first = &self.samples[0];
        let dir = if self.last().t >= first.t { 1.0 } else { -1.0 };
        if (t - first.t) * dir < 0.0 || (self.last().t - t) * dir < 0.0 {
            return None;
        }
        let i = self.samples.windows(2).position(|w| (t - w[1].t) * dir <= 0.0).unwrap_or(0);
        let (a, b) = if self.samples.len() == 1 { (first, first) } else { (&self.samples[i], &self.samples[i + 1]) };
        let h = b.t - a.t;
        let (ya, yb) = (self.state(a), self.state(b));
        let y: Vec<f64> = if h == 0.0 {
            ya
        } else {
            let s = (t - a.t) / h;
            let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
            let h10 = s * (1.0 - s) * (1.0 - s);
            let h01 = s * s * (3.0 - 2.0 * s);
            let h11 = s * s * (s - 1.0);
            (0..ya.len())
                .map(|k| h00 * ya[k] + h10 * h * a.derivative[k] + h01 * yb[k] + h11 * h * b.derivative[k])
                .collect()
        };
        let m = self.system.pairs();
        let x = PhasePoint::from_interleaved(&y[..2 * m], t);
        Some(TrajectorySample {
            t,
            q: x.q,
            p: x.p,
            gauge: y[2 * m..].iter().zip(&self.gauge_signs).map(|(l, s)| s * l.exp()).collect(),
            local_error: a.local_error.max(b.local_error),
            derivative: Vec::new(),
        })
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["t".to_string()];
        for i in 1..=self.system.pairs() {
            cols.push(format!("q{i}"));
            cols.push(format!("p{i}"));
        }
        cols.extend(self.gauge_names.iter().map(|s| s.to_string()));
        cols.join(",")
    }

    fn csv_row(s: &TrajectorySample) -> String {
        let mut v = vec![s.t];
        for (q, p) in s.q.iter().zip(&s.p) {
            v.push(*q);
            v.push(*p);
        }
        v.extend(&s.gauge);
        v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",")
    }

    /// One row per accepted step, or per grid time when `grid` is given
    /// (grid times outside the integrated range are skipped).
    pub fn to_csv(&self, grid: Option<&[f64]>) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        let rows: Vec<TrajectorySample> = match grid {
            None => self.samples.clone(),
            Some(g) => g.iter().filter_map(|t| self.interpolate(*t)).collect(),
        };
        for s in &rows {
            out.push_str(&Self::csv_row(s));
            out.push('\n');
        }
        out
    }

    pub fn metadata(&self) -> TrajectoryMetadata<'_> {
        TrajectoryMetadata {
            system: self.system,
            reduction: self.reduction,
            params: &self.params,
            tolerances: self.tolerances,
            termination: self.termination,
            message: self.message.as_deref(),
            t_start: self.samples[0].t,
            t_stop: self.last().t,
            steps: self.samples.len() - 1,
        }
    }
}

/// JSON sidecar of a CSV trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryMetadata<'a> {
    pub system: SystemId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reduction>,
    pub params: &'a PainleveParams,
    pub tolerances: Tolerances,
    pub termination: Termination,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<&'a str>,
    pub t_start: f64,
    pub t_stop: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub reduction: Reduction,
    pub samples: usize,
    pub max_residual: f64,
    /// Index of the sample attaining the maximum.
    pub worst_sample: usize,
    pub worst_t: f64,
}

/// Max entry magnitude of the float zero-curvature residual at a state with
/// the given derivative (dq, dp interleaved, then d log g).
pub fn residual_at(
    red: Reduction,
    params: &PainleveParams,
    x: &PhasePoint<f64>,
    gauge: &[f64],
    derivative: &[f64],
) -> Result<f64> {
    let m = red.system().pairs();
    let c = |v: &f64| Complex64::new(*v, 0.0);
    let xc = x.map(c);
    let gc: Vec<Complex64> = gauge.iter().map(c).collect();
    let d = PhasePoint::from_interleaved(&derivative[..2 * m], 1.0).map(c);
    let dg: Vec<Complex64> = gauge.iter().zip(&derivative[2 * m..]).map(|(g, l)| c(&(g * l))).collect();
    let cv = curvature(red, &xc, &gc, &d, &dg, params)?;
    Ok(cv.residual.matrix().blocks().values().flat_map(|b| b.nonzeros().map(|(_, _, v)| v.magnitude()).collect::<Vec<_>>()).fold(0.0, f64::max))
}

/// Float zero-curvature residual at every sample, using the stored state and
/// stored derivative.
pub fn residual_along(traj: &Trajectory, red: Reduction) -> Result<ResidualReport> {
    if traj.reduction != Some(red) {
        return Err(Error::Domain(format!("trajectory does not carry the gauge variables of {red}")));
    }
    let mut rep = ResidualReport { reduction: red, samples: traj.samples.len(), max_residual: 0.0, worst_sample: 0, worst_t: traj.samples[0].t };
    for (i, s) in traj.samples.iter().enumerate() {
        let r = residual_at(red, &traj.params, &s.point(), &s.gauge, &s.derivative)?;
        if r > rep.max_residual || r.is_nan() {
            rep.max_residual = r;
            rep.worst_sample = i;
            rep.worst_t = s.t;
        }
    }
    Ok(rep)
}


/// A fixed, pole-free start for each reduction on t ∈ [2, 3]: small κ, ρ
/// and (q, p), unit gauge values.
pub fn reference_start(red: Reduction, t0: f64) -> Result<(FlowProblem, PhasePoint<f64>, Vec<f64>)> {
    use crate::exact_numerics::Rational;
    use crate::painleve_core::params_from_reduction;
    let kappas: Vec<Rational> = (0..red.kappa_count()).map(|i| Rational::frac(i as i64 % 3 - 1, 7 + i as i64)).collect();
    let rhos: Vec<Rational> = (0..red.rho_count()).map(|i| Rational::frac(1, 5 + i as i64)).collect();
    let params = params_from_reduction(red, &kappas, &rhos)?;
    let m = red.system().pairs();
    let q = (0..m).map(|i| 0.3 - 0.1 * i as f64).collect();
    let p = (0..m).map(|i| 0.1 + 0.05 * i as f64).collect();
    let gauge = vec![1.0; red.gauge_names().len()];
    Ok((FlowProblem::new(params, Some(red))?, PhasePoint::new(q, p, t0), gauge))
}

/// Residual and time-reversal error of the reference trajectory of a
/// reduction over [t0, t1].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceRun {
    pub reduction: Reduction,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub termination: Termination,
    pub max_residual: f64,
    pub round_trip_error: f64,
}

pub fn reference_run(red: Reduction, t0: f64, t1: f64, tol: Tolerances) -> Result<ReferenceRun> {
    let (pb, x0, g0) = reference_start(red, t0)?;
    let fwd = integrate(&pb, &x0, &g0, t1, tol)?;
    let end = fwd.last();
    let bwd = integrate(&pb, &end.point(), &end.gauge, t0, tol)?;
    let back = bwd.last();
    let round_trip_error = x0
        .interleaved()
        .iter()
        .chain(&g0)
        .zip(back.point().interleaved().iter().chain(&back.gauge))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let termination = if bwd.termination != Termination::ReachedEnd { bwd.termination } else { fwd.termination };
    Ok(ReferenceRun {
        reduction: red,
        t0,
        t1,
        steps: fwd.samples.len() - 1,
        termination,
        max_residual: residual_along(&fwd, red)?.max_residual,
        round_trip_error,
    })
}
