use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ds::{canonical_to_ds, constraint_residuals};
use super::lax::{zero_curvature_residual_with, Curvature, GaugeFlow};
use crate::error::{Error, Result};
use crate::exact_numerics::{ExtScalar, Rational, Scalar};
use crate::painleve_core::{
    normalization_form, normalization_weights, params_from_reduction, PainleveParams, PhasePoint, Reduction,
};
use crate::report::{Failure, VerificationReport};
use crate::workers::par_map;

pub const MAX_RETRIES: usize = 1000;

/// A random rational point of a reduction.
#[derive(Clone, Debug)]
pub struct Sample {
    pub reduction: Reduction,
    pub params: PainleveParams,
    pub x: PhasePoint<Rational>,
    pub gauge: Vec<Rational>,
}

impl Sample {
    pub fn labelled(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, (q, p)) in self.x.q.iter().zip(&self.x.p).enumerate() {
            out.push((format!("q{}", i + 1), q.to_string()));
            out.push((format!("p{}", i + 1), p.to_string()));
        }
        out.push(("t".into(), self.x.t.to_string()));
        for (name, g) in self.reduction.gauge_names().iter().zip(&self.gauge) {
            out.push((name.to_string(), g.to_string()));
        }
        if let Some(raw) = &self.params.raw {
            for (i, k) in raw.kappas.iter().enumerate() {
                out.push((format!("kappa{i}"), k.to_string()));
            }
            for (i, r) in raw.rhos.iter().enumerate() {
                out.push((format!("rho{}", i + 1), r.to_string()));
            }
        }
        out
    }

    pub fn exact_point(&self) -> (PhasePoint<ExtScalar>, Vec<ExtScalar>) {
        (self.x.map(|v| ExtScalar::from_rational(v)), self.gauge.iter().map(ExtScalar::from_rational).collect())
    }
}

/// Numerators in [−20, 20], denominators in [1, 10].
pub fn draw_rational(rng: &mut impl Rng) -> Rational {
    Rational::frac(rng.gen_range(-20..=20), rng.gen_range(1..=10))
}

fn draw_nonzero(rng: &mut impl Rng) -> Rational {
    loop {
        let r = draw_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn draw_sample(red: Reduction, rng: &mut impl Rng) -> Result<Sample> {
    let kappas: Vec<Rational> = (0..red.kappa_count()).map(|_| draw_rational(rng)).collect();
    let rhos: Vec<Rational> = (0..red.rho_count()).map(|_| draw_rational(rng)).collect();
    let params = params_from_reduction(red, &kappas, &rhos)?;
    let m = red.system().pairs();
    let q = (0..m).map(|_| draw_rational(rng)).collect();
    let p = (0..m).map(|_| draw_rational(rng)).collect();
    let t = draw_nonzero(rng);
    let gauge = red.gauge_names().iter().map(|_| draw_nonzero(rng)).collect();
    Ok(Sample { reduction: red, params, x: PhasePoint::new(q, p, t), gauge })
}

/// The RNG of sample `index`: one ChaCha stream per sample, so results do
/// not depend on scheduling.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn is_singular(e: &Error) -> bool {
    matches!(e, Error::Pole(_) | Error::DivisionByZero | Error::NoRoot(_))
}

/// Draw until the point is admissible, evaluating the exact residual.
pub fn admissible_sample(red: Reduction, rng: &mut impl Rng, flow: GaugeFlow) -> Result<(Sample, Curvature<ExtScalar>)> {
    for _ in 0..MAX_RETRIES {
        let s = draw_sample(red, rng)?;
        let (x, g) = s.exact_point();
        match zero_curvature_residual_with(red, &x, &g, &s.params, flow) {
            Ok(c) => return Ok((s, c)),
            Err(e) if is_singular(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Domain(format!("no admissible point for {red} after {MAX_RETRIES} draws")))
}

/// Nonzero coefficients of the residual, the constraints, and the time
/// derivative of the κ-diagonal.
pub fn sample_failures(index: usize, s: &Sample, c: &Curvature<ExtScalar>) -> Vec<Failure> {
    let point = s.labelled();
    let mut out = Vec::new();
    let mut push = |entry: Vec<i64>, check: &str, v: &ExtScalar| {
        out.push(Failure { sample_index: index, point: point.clone(), entry, check: check.to_string(), residual: v.to_string() })
    };
    for (deg, m) in c.residual.matrix().blocks() {
        for (i, j, v) in m.nonzeros() {
            push(vec![i as i64 + 1, j as i64 + 1, *deg as i64], "zero-curvature", v);
        }
    }
    let values = c.state.map(|d| d.value.clone());
    for (name, v) in constraint_residuals(&values) {
        if !v.is_zero() {
            push(Vec::new(), &format!("constraint {name}"), &v);
        }
    }
    if let Some(m) = c.dm_dt.matrix().block(0) {
        for i in 0..m.dim() {
            let v = m.get(i, i);
            if !v.is_zero() {
                push(vec![i as i64 + 1, i as i64 + 1, 0], "kappa-diagonal constant", v);
            }
        }
    }
    for (what, el) in [("M support", &c.pair.m), ("B support", &c.pair.b)] {
        for deg in el.matrix().degrees() {
            if deg != 0 && deg != 1 {
                push(vec![0, 0, deg as i64], what, &ExtScalar::one());
            }
        }
    }
    out
}

fn run(red: Reduction, samples: usize, seed: u64, flow: GaugeFlow, subject: String) -> VerificationReport {
    let outcomes = par_map(samples, |i| {
        let mut rng = sample_rng(seed, i);
        match admissible_sample(red, &mut rng, flow) {
            Ok((s, c)) => sample_failures(i, &s, &c),
            Err(e) => vec![Failure {
                sample_index: i,
                point: Vec::new(),
                entry: Vec::new(),
                check: "sampling".into(),
                residual: e.to_string(),
            }],
        }
    });
    VerificationReport::from_samples(&subject, outcomes)
}

/// Exact zero-curvature and constraint checks at `samples` random points.
pub fn verify_partition(red: Reduction, samples: usize, seed: u64) -> VerificationReport {
    run(red, samples, seed, GaugeFlow::Pfaffian, format!("zero curvature {red}"))
}

/// The same checks with the gauge tangents dropped; expected to fail.
pub fn verify_without_gauge_flow(red: Reduction, samples: usize, seed: u64) -> VerificationReport {
    run(red, samples, seed, GaugeFlow::Frozen, format!("zero curvature {red}, gauge frozen"))
}

/// The algebraic relations among the Drinfeld–Sokolov variables, at random
/// states produced by the canonical change of variables.
pub fn check_constraints(red: Reduction, samples: usize, seed: u64) -> VerificationReport {
    let outcomes = par_map(samples, |i| {
        let mut rng = sample_rng(seed, i);
        for _ in 0..MAX_RETRIES {
            let s = match draw_sample(red, &mut rng) {
                Ok(s) => s,
                Err(e) => return vec![sampling_failure(i, e)],
            };
            let (x, g) = s.exact_point();
            let state = match canonical_to_ds(red, &x, &s.params, &g) {
                Ok(st) => st,
                Err(e) if is_singular(&e) => continue,
                Err(e) => return vec![sampling_failure(i, e)],
            };
            let point = s.labelled();
            return constraint_residuals(&state)
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(name, v)| Failure {
                    sample_index: i,
                    point: point.clone(),
                    entry: Vec::new(),
                    check: format!("constraint {name}"),
                    residual: v.to_string(),
                })
                .collect();
        }
        vec![sampling_failure(i, Error::Domain(format!("no admissible point after {MAX_RETRIES} draws")))]
    });
    VerificationReport::from_samples(&format!("constraints {red}"), outcomes)
}

fn sampling_failure(i: usize, e: Error) -> Failure {
    Failure { sample_index: i, point: Vec::new(), entry: Vec::new(), check: "sampling".into(), residual: e.to_string() }
}

/// Σ w_i α_i = 1 for the parameter map of a reduction: sample 0 is the
/// symbolic coefficient check, samples 1.. are random (κ, ρ).
pub fn check_normalization(red: Reduction, samples: usize, seed: u64) -> VerificationReport {
    let w = normalization_weights(red);
    let (constant, coeffs) = normalization_form(red);
    let mut symbolic = Vec::new();
    let mut push = |check: String, v: Rational| {
        symbolic.push(Failure { sample_index: 0, point: Vec::new(), entry: Vec::new(), check, residual: v.to_string() })
    };
    if constant != Rational::one() {
        push("constant term".into(), constant - Rational::one());
    }
    for (k, c) in coeffs.into_iter().enumerate() {
        if !c.is_zero() {
            push(format!("coefficient of unknown {k}"), c);
        }
    }
    let mut outcomes = vec![symbolic];
    outcomes.extend(par_map(samples, |i| {
        let mut rng = sample_rng(seed, i);
        let kappas: Vec<Rational> = (0..red.kappa_count()).map(|_| draw_rational(&mut rng)).collect();
        let rhos: Vec<Rational> = (0..red.rho_count()).map(|_| draw_rational(&mut rng)).collect();
        let params = match params_from_reduction(red, &kappas, &rhos) {
            Ok(p) => p,
            Err(e) => return vec![sampling_failure(i + 1, e)],
        };
        let sum = params
            .alphas
            .iter()
            .zip(&w)
            .fold(Rational::zero(), |a, (x, k)| a + x.clone() * Rational::from_integer(*k));
        if sum == Rational::one() {
            return Vec::new();
        }
        let point = kappas
            .iter()
            .enumerate()
            .map(|(j, v)| (format!("kappa{j}"), v.to_string()))
            .chain(rhos.iter().enumerate().map(|(j, v)| (format!("rho{}", j + 1), v.to_string())))
            .collect();
        vec![Failure {
            sample_index: i + 1,
            point,
            entry: Vec::new(),
            check: "weighted alpha sum".into(),
            residual: (sum - Rational::one()).to_string(),
        }]
    }));
    VerificationReport::from_samples(&format!("normalization {red}"), outcomes)
}
