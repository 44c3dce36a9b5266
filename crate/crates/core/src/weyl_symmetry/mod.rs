//! The six birational generators acting on the coupled sixth-order system,
//! their relations, equivariance of the flow, and the gauge factors that
//! realize them on the (3,3) Lax pair.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_numerics::{div, Dual, ExtScalar, Rational, Scalar};
use crate::lax_verification::{assemble_m, canonical_to_ds, grading, sample_rng, t11_of_t};
use crate::loop_algebra::{f, Laurent, LoopElement};
use crate::painleve_core::{vector_field, PainleveParams, PhasePoint, Reduction, SystemId};
use crate::report::{Failure, VerificationReport};
use crate::workers::par_map;

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct WeylWord(pub Vec<usize>);

impl WeylWord {
    pub fn new(letters: Vec<usize>) -> Result<Self> {
        if let Some(&i) = letters.iter().find(|&&i| i > 5) {
            return Err(Error::IndexOutOfRange { index: i, max: 5 });
        }
        Ok(WeylWord(letters))
    }
}

impl FromStr for WeylWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(WeylWord::default());
        }
        let letters = s
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad Weyl letter `{x}`"))))
            .collect::<Result<Vec<_>>>()?;
        WeylWord::new(letters)
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_cp6(params: &PainleveParams) -> Result<()> {
    if params.system != SystemId::CP6 {
        return Err(Error::Domain(format!("the generators act on cp6, not {}", params.system)));
    }
    Ok(())
}

fn check_index(i: usize) -> Result<()> {
    if i > 5 {
        return Err(Error::IndexOutOfRange { index: i, max: 5 });
    }
    Ok(())
}

/// α_i ↦ −α_i, the two cycle neighbours gain α_i, and η ↦ η + (−1)^i α_i.
pub fn transform_params(i: usize, params: &PainleveParams) -> Result<PainleveParams> {
    check_cp6(params)?;
    check_index(i)?;
    let a = &params.alphas;
    let mut n = a.clone();
    n[i] = -a[i].clone();
    n[(i + 1) % 6] = a[(i + 1) % 6].clone() + a[i].clone();
    n[(i + 5) % 6] = a[(i + 5) % 6].clone() + a[i].clone();
    let shift = if i % 2 == 0 { a[i].clone() } else { -a[i].clone() };
    let mut out = PainleveParams::new(SystemId::CP6, n, Some(params.eta() + shift))?;
    out.raw = None;
    Ok(out)
}

/// The coordinate part of r_i; t is unchanged.
pub fn transform_point<S: Scalar>(i: usize, x: &PhasePoint<S>, params: &PainleveParams) -> Result<PhasePoint<S>> {
    check_cp6(params)?;
    check_index(i)?;
    params.check_point(x)?;
    let ai = S::from_rational(&params.alphas[i]);
    let (q1, p1, q2, p2) = (x.q[0].clone(), x.p[0].clone(), x.q[1].clone(), x.p[1].clone());
    let t = x.t.clone();
    let one = S::one();
    let (q, p) = match i {
        0 => {
            let d = q1.clone() - q2.clone();
            let sh = div(&ai, &d, "q1-q2")?;
            (vec![q1, q2], vec![p1 - sh.clone(), p2 + sh])
        }
        1 => (vec![q1 + div(&ai, &p1, "p1")?, q2], vec![p1, p2]),
        2 => (vec![q1.clone(), q2], vec![p1 - div(&ai, &(q1 - t.clone()), "q1-t")?, p2]),
        3 => {
            let eta = S::from_rational(&params.eta());
            let s = q1.clone() * p1.clone() + q2.clone() * p2.clone();
            let d1 = s.clone() - ai.clone() + eta.clone();
            let d2 = s + eta;
            let k1 = div(&ai, &d1, "q1p1+q2p2-alpha3+eta")?;
            let k2 = div(&ai, &d2, "q1p1+q2p2+eta")?;
            (
                vec![q1.clone() + k1.clone() * q1, q2.clone() + k1 * q2],
                vec![p1.clone() - k2.clone() * p1, p2.clone() - k2 * p2],
            )
        }
        4 => (vec![q1, q2.clone()], vec![p1, p2 - div(&ai, &(q2 - one), "q2-1")?]),
        _ => (vec![q1, q2 + div(&ai, &p2, "p2")?], vec![p1, p2]),
    };
    Ok(PhasePoint::new(q, p, t))
}

pub fn apply_generator<S: Scalar>(
    i: usize,
    x: &PhasePoint<S>,
    params: &PainleveParams,
) -> Result<(PhasePoint<S>, PainleveParams)> {
    Ok((transform_point(i, x, params)?, transform_params(i, params)?))
}

/// Left-to-right composition; a pole names the prefix already applied.
pub fn apply_word<S: Scalar>(
    w: &WeylWord,
    x: &PhasePoint<S>,
    params: &PainleveParams,
) -> Result<(PhasePoint<S>, PainleveParams)> {
    let mut cur = (x.clone(), params.clone());
    for (k, &i) in w.0.iter().enumerate() {
        cur = apply_generator(i, &cur.0, &cur.1).map_err(|e| match e {
            Error::Pole(what) => Error::Pole(format!("{what} at r_{i} after prefix {}", WeylWord(w.0[..k].to_vec()))),
            other => other,
        })?;
    }
    Ok(cur)
}

/// Whether the α's are mapped on the right-hand side of the equivariance
/// identity; `Unmapped` is a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamAction {
    Mapped,
    Unmapped,
}

/// D r_i(x)·X(x) + ∂_t r_i − X(r_i(x); r_i(α)), one dual pass.
pub fn equivariance_residual<S: Scalar>(i: usize, x: &PhasePoint<S>, params: &PainleveParams) -> Result<Vec<S>> {
    equivariance_residual_with(i, x, params, ParamAction::Mapped)
}

pub fn equivariance_residual_with<S: Scalar>(
    i: usize,
    x: &PhasePoint<S>,
    params: &PainleveParams,
    action: ParamAction,
) -> Result<Vec<S>> {
    let (dq, dp) = vector_field(params, x)?;
    let lift = |v: &[S], dv: &[S]| v.iter().zip(dv).map(|(a, b)| Dual::new(a.clone(), b.clone())).collect();
    let xd = PhasePoint { q: lift(&x.q, &dq), p: lift(&x.p, &dp), t: Dual::variable(x.t.clone()) };
    let image = transform_point(i, &xd, params)?;
    let new_params = match action {
        ParamAction::Mapped => transform_params(i, params)?,
        ParamAction::Unmapped => params.clone(),
    };
    let y = image.map(|d| d.value.clone());
    let (yq, yp) = vector_field(&new_params, &y)?;
    let mut out = Vec::with_capacity(4);
    for k in 0..2 {
        out.push(image.q[k].tangent.clone() - yq[k].clone());
        out.push(image.p[k].tangent.clone() - yp[k].clone());
    }
    Ok(out)
}

/// The φ_i of the gauge factor, written in t^{1/3} = 1/t_{1,1}.
pub fn gauge_phi<S: Scalar>(i: usize, x: &PhasePoint<S>, w3: &S, params: &PainleveParams) -> Result<S> {
    check_index(i)?;
    check_cp6(params)?;
    params.check_point(x)?;
    let u = t11_of_t(Reduction::P33, &x.t)?;
    let (q1, p1, q2, p2) = (x.q[0].clone(), x.p[0].clone(), x.q[1].clone(), x.p[1].clone());
    let t = x.t.clone();
    let three = S::from_int(3);
    let uu = u.clone() * u.clone();
    Ok(match i {
        0 => w3.clone() * (q2 - q1) * uu * S::frac(1, 3),
        1 => -div(&p1, &(uu * w3.clone()), "w3")?,
        2 => div(&(w3.clone() * (q1 - t.clone())), &(three * t), "t")?,
        3 => div(&(q1 * p1 + q2 * p2 + S::from_rational(&params.eta())), w3, "w3")?,
        4 => w3.clone() * (S::one() - q2) * u * S::frac(1, 3),
        _ => -div(&p2, &(u * w3.clone()), "w3")?,
    })
}

/// The image of w_3 under r_i.
pub fn transform_w3<S: Scalar>(i: usize, x: &PhasePoint<S>, w3: &S, params: &PainleveParams) -> Result<S> {
    if i != 3 {
        return Ok(w3.clone());
    }
    let s = x.q[0].clone() * x.p[0].clone() + x.q[1].clone() * x.p[1].clone() + S::from_rational(&params.eta());
    let a3 = S::from_rational(&params.alphas[3]);
    Ok(w3.clone() * div(&(s.clone() - a3), &s, "q1p1+q2p2+eta")?)
}

/// exp((α_i/φ_i) f_i) = 1 + (α_i/φ_i) f_i; a group element, so a plain
/// Laurent matrix rather than an algebra element.
pub fn gauge_factor<S: Scalar>(i: usize, x: &PhasePoint<S>, w3: &S, params: &PainleveParams) -> Result<Laurent<S>> {
    let c = gauge_coefficient(i, x, w3, params)?;
    Ok(Laurent::identity(6) + f::<S>(5, i)?.matrix().scale(&c))
}

fn gauge_coefficient<S: Scalar>(i: usize, x: &PhasePoint<S>, w3: &S, params: &PainleveParams) -> Result<S> {
    let phi = gauge_phi(i, x, w3, params)?;
    div(&S::from_rational(&params.alphas[i]), &phi, &format!("phi{i}"))
}

pub fn gauge_factor_inverse<S: Scalar>(
    i: usize,
    x: &PhasePoint<S>,
    w3: &S,
    params: &PainleveParams,
) -> Result<Laurent<S>> {
    let c = gauge_coefficient(i, x, w3, params)?;
    Ok(Laurent::identity(6) - f::<S>(5, i)?.matrix().scale(&c))
}

/// g M g⁻¹ + ϑ(g) g⁻¹ minus the (3,3) M at the transformed point, gauge
/// and parameters.
pub fn gauge_bridge_residual(
    i: usize,
    x: &PhasePoint<ExtScalar>,
    w3: &ExtScalar,
    params: &PainleveParams,
) -> Result<Laurent<ExtScalar>> {
    let red = Reduction::P33;
    let m = assemble_m(&canonical_to_ds(red, x, params, std::slice::from_ref(w3))?);
    let c = gauge_coefficient(i, x, w3, params)?;
    let fi = f::<ExtScalar>(5, i)?.scale(&c);
    let g = Laurent::identity(6) + fi.matrix().clone();
    let gi = Laurent::identity(6) - fi.matrix().clone();
    let theta_g = grading(red).apply_theta(&fi)?;
    let lhs = g.matmul(&m).matmul(&gi) + theta_g.matrix().matmul(&gi);
    let (y, new_params) = apply_generator(i, x, params)?;
    let w3n = transform_w3(i, x, w3, params)?;
    let rhs = assemble_m(&canonical_to_ds(red, &y, &new_params, &[w3n])?);
    Ok(lhs - rhs)
}

/// A random CP6 point and parameters with Σα = 1.
pub fn random_cp6_point(rng: &mut impl rand::Rng) -> (PhasePoint<Rational>, PainleveParams) {
    use crate::lax_verification::draw_rational;
    let mut alphas: Vec<Rational> = (0..5).map(|_| draw_rational(rng)).collect();
    let rest = alphas.iter().fold(Rational::zero(), |acc, a| acc + a.clone());
    alphas.push(Rational::one() - rest);
    let eta = draw_rational(rng);
    let params = PainleveParams::new(SystemId::CP6, alphas, Some(eta)).expect("six alphas");
    let q = (0..2).map(|_| draw_rational(rng)).collect();
    let p = (0..2).map(|_| draw_rational(rng)).collect();
    let t = draw_rational(rng);
    (PhasePoint::new(q, p, t), params)
}

/// The words checked: r_i², (r_i r_j)³ for cycle neighbours, (r_i r_j)² otherwise.
pub fn relation_words() -> Vec<(String, WeylWord)> {
    let mut out = Vec::new();
    for i in 0..6 {
        out.push((format!("r{i}^2"), WeylWord(vec![i, i])));
    }
    for i in 0..6 {
        for j in i + 1..6 {
            let adjacent = (j - i) % 6 == 1 || (i + 6 - j) % 6 == 1;
            let reps = if adjacent { 3 } else { 2 };
            out.push((format!("(r{i}r{j})^{reps}"), WeylWord([i, j].repeat(reps))));
        }
    }
    out
}

fn same_point(a: &(PhasePoint<Rational>, PainleveParams), x: &PhasePoint<Rational>, p: &PainleveParams) -> bool {
    a.0 == *x && a.1.alphas == p.alphas && a.1.eta() == p.eta()
}

/// Group relations at `samples` random admissible rational points.
pub fn check_relations(samples: usize, seed: u64) -> VerificationReport {
    let words = relation_words();
    let outcomes = par_map(samples, |k| {
        let mut rng = sample_rng(seed, k);
        for _ in 0..crate::lax_verification::MAX_RETRIES {
            let (x, params) = random_cp6_point(&mut rng);
            let results: Result<Vec<_>> = words.iter().map(|(_, w)| apply_word(w, &x, &params)).collect();
            let results = match results {
                Ok(r) => r,
                Err(Error::Pole(_)) => continue,
                Err(e) => return vec![sampling_failure(k, e)],
            };
            let point = labelled(&x, &params);
            return words
                .iter()
                .zip(results)
                .filter(|(_, r)| !same_point(r, &x, &params))
                .map(|((name, _), r)| Failure {
                    sample_index: k,
                    point: point.clone(),
                    entry: Vec::new(),
                    check: name.clone(),
                    residual: format!("{:?} {:?}", r.0.interleaved(), r.1.alphas),
                })
                .collect();
        }
        vec![sampling_failure(k, Error::Domain("no admissible point".into()))]
    });
    VerificationReport::from_samples("weyl relations", outcomes)
}

fn sampling_failure(k: usize, e: Error) -> Failure {
    Failure { sample_index: k, point: Vec::new(), entry: Vec::new(), check: "sampling".into(), residual: e.to_string() }
}

pub fn labelled(x: &PhasePoint<Rational>, params: &PainleveParams) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (k, v) in x.interleaved().iter().enumerate() {
        out.push((format!("{}{}", if k % 2 == 0 { "q" } else { "p" }, k / 2 + 1), v.to_string()));
    }
    out.push(("t".into(), x.t.to_string()));
    for (k, a) in params.alphas.iter().enumerate() {
        out.push((format!("alpha{k}"), a.to_string()));
    }
    out.push(("eta".into(), params.eta().to_string()));
    out
}

/// Equivariance for every generator at `samples` random points.
pub fn check_equivariance(samples: usize, seed: u64) -> VerificationReport {
    let outcomes = par_map(samples, |k| {
        let mut rng = sample_rng(seed, k);
        for _ in 0..crate::lax_verification::MAX_RETRIES {
            let (x, params) = random_cp6_point(&mut rng);
            let res: Result<Vec<Vec<Rational>>> = (0..6).map(|i| equivariance_residual(i, &x, &params)).collect();
            match res {
                Ok(all) => {
                    let point = labelled(&x, &params);
                    return all
                        .into_iter()
                        .enumerate()
                        .filter(|(_, r)| r.iter().any(|v| !v.is_zero()))
                        .map(|(i, r)| Failure {
                            sample_index: k,
                            point: point.clone(),
                            entry: Vec::new(),
                            check: format!("equivariance r{i}"),
                            residual: format!("{r:?}"),
                        })
                        .collect();
                }
                Err(Error::Pole(_)) => continue,
                Err(e) => return vec![sampling_failure(k, e)],
            }
        }
        vec![sampling_failure(k, Error::Domain("no admissible point".into()))]
    });
    VerificationReport::from_samples("weyl equivariance", outcomes)
}

/// The gauge conjugation identity for every generator at random points.
pub fn check_gauge_bridge(samples: usize, seed: u64) -> VerificationReport {
    let outcomes = par_map(samples, |k| {
        let mut rng = sample_rng(seed, k);
        for _ in 0..crate::lax_verification::MAX_RETRIES {
            let (x, params) = random_cp6_point(&mut rng);
            let w3 = crate::lax_verification::draw_rational(&mut rng);
            let xe = x.map(ExtScalar::from_rational);
            let we = ExtScalar::from_rational(&w3);
            let res: Result<Vec<Laurent<ExtScalar>>> = (0..6).map(|i| gauge_bridge_residual(i, &xe, &we, &params)).collect();
            match res {
                Ok(all) => {
                    let mut point = labelled(&x, &params);
                    point.push(("w3".into(), w3.to_string()));
                    let mut out = Vec::new();
                    for (i, r) in all.iter().enumerate() {
                        for (deg, m) in r.blocks() {
                            for (a, b, v) in m.nonzeros() {
                                out.push(Failure {
                                    sample_index: k,
                                    point: point.clone(),
                                    entry: vec![a as i64 + 1, b as i64 + 1, *deg as i64],
                                    check: format!("gauge bridge r{i}"),
                                    residual: v.to_string(),
                                });
                            }
                        }
                    }
                    return out;
                }
                Err(Error::Pole(_) | Error::NoRoot(_) | Error::DivisionByZero) => continue,
                Err(e) => return vec![sampling_failure(k, e)],
            }
        }
        vec![sampling_failure(k, Error::Domain("no admissible point".into()))]
    });
    VerificationReport::from_samples("weyl gauge bridge", outcomes)
}

/// The unipotent matrix as an algebra-valued log: (α_i/φ_i) f_i.
pub fn gauge_log<S: Scalar>(i: usize, x: &PhasePoint<S>, w3: &S, params: &PainleveParams) -> Result<LoopElement<S>> {
    Ok(f::<S>(5, i)?.scale(&gauge_coefficient(i, x, w3, params)?))
}
