use std::sync::OnceLock;

use super::ds::{canonical_to_ds, DSState};
use crate::error::{Error, Result};
use crate::exact_numerics::{div, Dual, Scalar};
use crate::heisenberg::build_heisenberg;
use crate::loop_algebra::{ad_word, bracket, e, h, GradationSpec, Laurent, LoopElement};
use crate::painleve_core::{pfaffian_log_derivative, vector_field, PainleveParams, PhasePoint, Reduction};

/// M and B for one point, with the grade operator they are paired with.
#[derive(Clone, Debug)]
pub struct LaxPair<S> {
    pub reduction: Reduction,
    pub m: LoopElement<S>,
    pub b: LoopElement<S>,
    pub theta: GradationSpec,
}

/// How the gauge variables move in the total time derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeFlow {
    Pfaffian,
    /// Gauge tangents set to zero: a negative control.
    Frozen,
}

pub fn grading(red: Reduction) -> &'static GradationSpec {
    static CACHE: OnceLock<Vec<GradationSpec>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        Reduction::ALL
            .iter()
            .map(|r| build_heisenberg(&r.partition()).expect("valid partition").grading)
            .collect()
    });
    &all[Reduction::ALL.iter().position(|r| *r == red).expect("listed")]
}

/// Linear combinations of Chevalley words, matrix part only (K ↦ 0).
struct Lc<S: Scalar> {
    n: usize,
    acc: Laurent<S>,
}

impl<S: Scalar> Lc<S> {
    fn new(n: usize) -> Self {
        Lc { n, acc: Laurent::zero(n + 1) }
    }

    fn e(&self, i: usize) -> Laurent<S> {
        e::<S>(self.n, i).expect("index in range").matrix().clone()
    }

    fn h(&self, i: usize) -> Laurent<S> {
        h::<S>(self.n, i).expect("index in range").matrix().clone()
    }

    fn w(&self, idx: &[usize]) -> Laurent<S> {
        ad_word::<S>(self.n, idx).expect("index in range").matrix().clone()
    }

    fn add(&mut self, c: S, x: Laurent<S>) {
        let acc = std::mem::replace(&mut self.acc, Laurent::zero(self.n + 1));
        self.acc = acc + x.scale(&c);
    }

    fn kappa_diagonal(&mut self, s: &DSState<S>) {
        for i in 0..=self.n {
            let hi = self.h(i);
            self.add(s.k(i), hi);
        }
    }

    fn done(self) -> Laurent<S> {
        self.acc
    }
}

/// The M of the reduction in DS variables.
pub fn assemble_m<S: Scalar>(s: &DSState<S>) -> Laurent<S> {
    let red = s.reduction;
    let n = red.rank();
    let v = |name: &str| s.get(name).clone();
    let c = |k: i64| S::from_int(k);
    let t11 = s.t11.clone();
    let one = S::one();
    let mut lc = Lc::new(n);
    lc.kappa_diagonal(s);
    match red {
        Reduction::P22 => {
            let (w1, w3) = (v("w1"), v("w3"));
            lc.add(w1.clone() - t11.clone() * w3.clone(), lc.e(0));
            lc.add(v("phi1"), lc.e(1));
            lc.add(w3 - t11.clone() * w1, lc.e(2));
            lc.add(v("phi3"), lc.e(3));
            let l1 = lc.w(&[1, 2]) + lc.w(&[3, 0]);
            let l2 = lc.w(&[0, 1]) + lc.w(&[2, 3]);
            lc.add(t11, l1);
            lc.add(one, l2);
        }
        Reduction::P31 => {
            let (w2, g, g23) = (v("w2"), v("phi12"), v("phi23"));
            lc.add(v("phi0"), lc.e(0));
            lc.add(v("phi1") + w2.clone() * g.clone(), lc.e(1));
            lc.add(v("phi2"), lc.e(2));
            lc.add(v("phi3") - w2.clone() * g23.clone(), lc.e(3));
            lc.add(g, lc.w(&[1, 2]));
            lc.add(g23, lc.w(&[2, 3]));
            lc.add(-(c(2) * w2), lc.w(&[3, 0]));
            let l1 = lc.e(0) + lc.e(1) + lc.w(&[2, 3]);
            lc.add(c(2), l1.matmul(&l1));
        }
        Reduction::P41 => {
            for i in 0..=4 {
                lc.add(v(["phi0", "phi1", "phi2", "phi3", "phi4"][i]), lc.e(i));
            }
            lc.add(v("phi12"), lc.w(&[1, 2]));
            lc.add(v("phi23"), lc.w(&[2, 3]));
            lc.add(v("phi34"), lc.w(&[3, 4]));
            let l1 = lc.e(0) + lc.e(1) + lc.e(4) + lc.w(&[2, 3]);
            lc.add(c(4), l1.matmul(&l1));
        }
        Reduction::P221 => {
            let (w1, w4, g34, g12) = (v("w1"), v("w4"), v("phi34"), v("phi12"));
            lc.add(c(2) * (w1.clone() - t11.clone() * w4.clone()), lc.e(0));
            lc.add(v("phi1"), lc.e(1));
            lc.add(v("phi2") - w1.clone() * g12.clone(), lc.e(2));
            lc.add(v("phi3") + w4.clone() * g34.clone(), lc.e(3));
            lc.add(v("phi4"), lc.e(4));
            lc.add(g12, lc.w(&[1, 2]));
            lc.add(c(2) * (w4 - t11.clone() * w1), lc.w(&[2, 3]));
            lc.add(g34, lc.w(&[3, 4]));
            let l1 = lc.w(&[4, 0]) + lc.w(&[1, 2, 3]);
            let l2 = lc.w(&[0, 1]) + lc.w(&[2, 3, 4]);
            lc.add(c(2) * t11, l1);
            lc.add(c(2), l2);
        }
        Reduction::P33 => {
            let (w1, w3, w5) = (v("w1"), v("w3"), v("w5"));
            lc.add(w1.clone() - t11.clone() * w5.clone(), lc.e(0));
            lc.add(v("phi1"), lc.e(1));
            lc.add(w3.clone() - t11.clone() * w1, lc.e(2));
            lc.add(v("phi3"), lc.e(3));
            lc.add(w5 - t11.clone() * w3, lc.e(4));
            lc.add(v("phi5"), lc.e(5));
            let l1 = lc.w(&[1, 2]) + lc.w(&[3, 4]) + lc.w(&[5, 0]);
            let l2 = lc.w(&[0, 1]) + lc.w(&[2, 3]) + lc.w(&[4, 5]);
            lc.add(t11, l1);
            lc.add(one, l2);
        }
    }
    lc.done()
}

/// B_{1,1}, the generator of the t_{1,1} flow, in DS variables.
pub fn assemble_b11<S: Scalar>(s: &DSState<S>) -> Result<Laurent<S>> {
    let red = s.reduction;
    let n = red.rank();
    let v = |name: &str| s.get(name).clone();
    let c = |k: i64| S::from_int(k);
    let fr = |a: i64, b: i64| S::frac(a, b);
    let (k, rho) = (|i| s.k(i), |i| s.rho(i));
    let t11 = s.t11.clone();
    let one = S::one();
    let mut lc = Lc::new(n);
    match red {
        Reduction::P22 => {
            let (w1, w3, phi3) = (v("w1"), v("w3"), v("phi3"));
            let cst = k(0) - k(1) + k(2) - k(3) + c(2) * rho(1);
            let den = (t11.clone() * t11.clone() - one.clone()) * w1.clone();
            let x3 = div(&((t11.clone() * w1.clone() - w3.clone()) * phi3.clone() - cst.clone()), &den, "(t11^2-1)w1")?;
            let x1 = div(
                &((w1.clone() - t11.clone() * w3.clone()) * phi3.clone() - cst * t11.clone()),
                &den,
                "(t11^2-1)w1",
            )?;
            let u1 = div(&(w1.clone() * x3.clone() - k(0) + k(1) - rho(1)), &t11, "t11")?;
            let u2 = div(&(w3.clone() * phi3 + k(2) - k(3) + rho(1)), &t11, "t11")?;
            lc.add(u1, lc.h(1));
            lc.add(u2, lc.h(2));
            lc.add(w3.clone() * x3.clone(), lc.h(3));
            lc.add(-w3, lc.e(0));
            lc.add(x1, lc.e(1));
            lc.add(-w1, lc.e(2));
            lc.add(x3, lc.e(3));
            let l1 = lc.w(&[1, 2]) + lc.w(&[3, 0]);
            lc.add(one, l1);
        }
        Reduction::P31 => {
            let (w2, g) = (v("w2"), v("phi12"));
            lc.add(-(v("phi1") - t11.clone()) * fr(1, 2), lc.h(0));
            lc.add((v("phi0") - t11) * fr(1, 2), lc.h(1));
            lc.add(w2.clone() * g.clone() * fr(1, 2), lc.h(2));
            lc.add(g * fr(1, 2), lc.e(2));
            lc.add(-w2, lc.e(3));
            let l1 = lc.e(0) + lc.e(1) + lc.w(&[2, 3]);
            lc.add(one, l1);
        }
        Reduction::P41 => {
            let (p0, p1, p2, g, p34) = (v("phi0"), v("phi1"), v("phi2"), v("phi12"), v("phi34"));
            let cc = c(16) * (k(0) - k(1) + k(2) - k(4) - c(2) * rho(1));
            let den = c(64) * t11.clone();
            let tt16 = c(16) * t11.clone() * t11.clone();
            let inner = c(4) * p1 + g.clone() * p34.clone();
            let u0 = div(
                &((p0.clone() - c(4) * t11.clone()) * inner.clone() + c(4) * p2.clone() * p34.clone() + tt16.clone() + cc.clone()),
                &den,
                "t11",
            )?;
            let u2 = div(
                &(p0.clone() * inner.clone() + c(4) * (p2.clone() - t11.clone() * g.clone()) * p34.clone() - tt16.clone()
                    + cc.clone()),
                &den,
                "t11",
            )?;
            let u3 = div(&(p0.clone() * inner + c(4) * p2 * p34.clone() - tt16 + cc), &den, "t11")?;
            lc.add(u0, lc.h(0));
            lc.add((p0 - c(2) * t11) * fr(1, 4), lc.h(1));
            lc.add(u2, lc.h(2));
            lc.add(u3, lc.h(3));
            lc.add(g * fr(1, 4), lc.e(2));
            lc.add(p34 * fr(1, 4), lc.e(3));
            let l1 = lc.e(0) + lc.e(1) + lc.e(4) + lc.w(&[2, 3]);
            lc.add(one, l1);
        }
        Reduction::P221 => {
            let (w1, w4, p1, p4, g3, g34) = (v("w1"), v("w4"), v("phi1"), v("phi4"), v("phi3"), v("phi34"));
            let sum = w1.clone() * p1.clone() + w4.clone() * p4.clone();
            let c1 = k(0) - k(1) + k(3) - k(4) + c(2) * rho(1);
            let sc1 = sum + c1;
            let two_t = c(2) * t11.clone();
            let u2 = div(&-(w1.clone() * p1.clone() + k(0) - k(1) + rho(1)), &two_t, "t11")?;
            let u3 = div(&(w4.clone() * p4.clone() + k(3) - k(4) + rho(1)), &two_t, "t11")?;
            let den = c(2) * (t11.clone() * t11.clone() - one.clone()) * g3.clone();
            let x1 = div(
                &((t11.clone() * p1.clone() + p4.clone()) * g3.clone() + sc1.clone() * g34.clone()),
                &den,
                "(t11^2-1)phi3",
            )?;
            let x4 = div(
                &((p1 + t11.clone() * p4) * g3.clone() + t11.clone() * sc1.clone() * g34),
                &den,
                "(t11^2-1)phi3",
            )?;
            let x12 = div(&sc1, &g3, "phi3")?;
            lc.add(u2.clone() + w1.clone() * x1.clone(), lc.h(1));
            lc.add(u2, lc.h(2));
            lc.add(u3, lc.h(3));
            lc.add(w4.clone() * x4.clone(), lc.h(4));
            lc.add(-w4, lc.e(0));
            lc.add(x1, lc.e(1));
            lc.add(-(w1.clone() * x12.clone()), lc.e(2));
            lc.add(div(&g3, &two_t, "t11")?, lc.e(3));
            lc.add(x4, lc.e(4));
            lc.add(x12, lc.w(&[1, 2]));
            lc.add(-w1, lc.w(&[2, 3]));
            let l1 = lc.w(&[4, 0]) + lc.w(&[1, 2, 3]);
            lc.add(one, l1);
        }
        Reduction::P33 => {
            let (w1, w3, w5) = (v("w1"), v("w3"), v("w5"));
            let (p1, p3, p5) = (v("phi1"), v("phi3"), v("phi5"));
            let (a1, a3, a5) = (w1.clone() * p1.clone(), w3.clone() * p3.clone(), w5.clone() * p5.clone());
            let three_t = c(3) * t11.clone();
            let u1 = div(
                &(-(c(2) * a1.clone()) + a3.clone() + a5.clone() - c(2) * k(0) + c(2) * k(1) + k(2) - k(3) + k(4) - k(5)),
                &three_t,
                "t11",
            )?;
            let u2 = div(&-(a1.clone() + k(0) - k(1) + rho(1)), &t11, "t11")?;
            let u3 = div(
                &(-a1 - a3 + c(2) * a5.clone() - k(0) + k(1) - k(2) + k(3) + c(2) * k(4) - c(2) * k(5)),
                &three_t,
                "t11",
            )?;
            let u4 = div(&(a5 + k(4) - k(5) + rho(1)), &t11, "t11")?;
            let d3 = t11.powi(3) - one.clone();
            let tt = t11.clone() * t11.clone();
            let x1 = div(&(tt.clone() * p1.clone() + t11.clone() * p5.clone() + p3.clone()), &d3, "t11^3-1")?;
            let x3 = div(&(tt.clone() * p3.clone() + t11.clone() * p1.clone() + p5.clone()), &d3, "t11^3-1")?;
            let x5 = div(&(tt * p5 + t11 * p3 + p1), &d3, "t11^3-1")?;
            lc.add(u1 + w1.clone() * x1.clone(), lc.h(1));
            lc.add(u2, lc.h(2));
            lc.add(u3 + w3.clone() * x3.clone(), lc.h(3));
            lc.add(u4, lc.h(4));
            lc.add(w5.clone() * x5.clone(), lc.h(5));
            lc.add(-w5, lc.e(0));
            lc.add(x1, lc.e(1));
            lc.add(-w1, lc.e(2));
            lc.add(x3, lc.e(3));
            lc.add(-w3, lc.e(4));
            lc.add(x5, lc.e(5));
            let l1 = lc.w(&[1, 2]) + lc.w(&[3, 4]) + lc.w(&[5, 0]);
            lc.add(one, l1);
        }
    }
    Ok(lc.done())
}

fn lift<S: Scalar>(v: &[S], dv: &[S]) -> Vec<Dual<S>> {
    v.iter().zip(dv).map(|(a, b)| Dual::new(a.clone(), b.clone())).collect()
}

/// M and B = (dt_{1,1}/dt)·B_{1,1} at a point.
pub fn lax_matrices<S: Scalar>(
    red: Reduction,
    x: &PhasePoint<S>,
    gauge: &[S],
    params: &PainleveParams,
) -> Result<LaxPair<S>> {
    let zeros = vec![S::zero(); x.q.len()];
    let xd = PhasePoint { q: lift(&x.q, &zeros), p: lift(&x.p, &zeros), t: Dual::variable(x.t.clone()) };
    let gd: Vec<Dual<S>> = gauge.iter().cloned().map(Dual::constant).collect();
    let sd = canonical_to_ds(red, &xd, params, &gd)?;
    pair_from_state(&sd)
}

fn pair_from_state<S: Scalar>(sd: &DSState<Dual<S>>) -> Result<LaxPair<S>> {
    let red = sd.reduction;
    let s = sd.map(|d| d.value.clone());
    let dt11 = sd.t11.tangent.clone();
    let b = assemble_b11(&s)?.scale(&dt11);
    let n = red.rank();
    Ok(LaxPair {
        reduction: red,
        m: LoopElement::from_matrix(n, assemble_m(&s))?,
        b: LoopElement::from_matrix(n, b)?,
        theta: grading(red).clone(),
    })
}

/// The residual and its pieces from a single dual pass.
#[derive(Clone, Debug)]
pub struct Curvature<S> {
    pub residual: LoopElement<S>,
    pub pair: LaxPair<S>,
    pub dm_dt: LoopElement<S>,
    pub state: DSState<Dual<S>>,
}

/// R = dM/dt − ϑ(B) + [M, B] with the time derivatives of (q, p) and of the
/// gauge variables supplied explicitly.
pub fn curvature<S: Scalar>(
    red: Reduction,
    x: &PhasePoint<S>,
    gauge: &[S],
    dx: &PhasePoint<S>,
    dgauge: &[S],
    params: &PainleveParams,
) -> Result<Curvature<S>> {
    if dgauge.len() != gauge.len() {
        return Err(Error::Arity { what: "gauge tangents", expected: gauge.len(), got: dgauge.len() });
    }
    let xd = PhasePoint { q: lift(&x.q, &dx.q), p: lift(&x.p, &dx.p), t: Dual::variable(x.t.clone()) };
    let gd = lift(gauge, dgauge);
    let sd = canonical_to_ds(red, &xd, params, &gd)?;
    let md = assemble_m(&sd);
    let n = red.rank();
    let dm_dt = LoopElement::from_matrix(n, md.map(|d| d.tangent.clone()))?;
    let pair = pair_from_state(&sd)?;
    let theta_b = pair.theta.apply_theta(&pair.b)?;
    let residual = dm_dt.try_sub(&theta_b)?.try_add(&bracket(&pair.m, &pair.b)?)?;
    Ok(Curvature { residual, pair, dm_dt, state: sd })
}

/// Tangents along the Hamiltonian flow: (dq, dp) from the vector field and
/// gauge·(Pfaffian log-derivative), or zero gauge tangents when frozen.
pub fn flow_tangents<S: Scalar>(
    red: Reduction,
    x: &PhasePoint<S>,
    gauge: &[S],
    params: &PainleveParams,
    flow: GaugeFlow,
) -> Result<(PhasePoint<S>, Vec<S>)> {
    let (dq, dp) = vector_field(params, x)?;
    let dgauge = match flow {
        GaugeFlow::Pfaffian => pfaffian_log_derivative(red, x, params)?
            .into_iter()
            .zip(gauge)
            .map(|((_, l), g)| l * g.clone())
            .collect(),
        GaugeFlow::Frozen => vec![S::zero(); gauge.len()],
    };
    Ok((PhasePoint::new(dq, dp, S::one()), dgauge))
}

pub fn zero_curvature_residual_with<S: Scalar>(
    red: Reduction,
    x: &PhasePoint<S>,
    gauge: &[S],
    params: &PainleveParams,
    flow: GaugeFlow,
) -> Result<Curvature<S>> {
    let (dx, dg) = flow_tangents(red, x, gauge, params, flow)?;
    curvature(red, x, gauge, &dx, &dg, params)
}

pub fn zero_curvature_residual<S: Scalar>(
    red: Reduction,
    x: &PhasePoint<S>,
    gauge: &[S],
    params: &PainleveParams,
) -> Result<LoopElement<S>> {
    Ok(zero_curvature_residual_with(red, x, gauge, params, GaugeFlow::Pfaffian)?.residual)
}
