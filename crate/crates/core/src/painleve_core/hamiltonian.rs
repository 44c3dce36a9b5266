use super::params::{PainleveParams, PhasePoint, SystemId};
use crate::error::Result;
use crate::exact_numerics::{div, Dual, Scalar};

pub fn h4<S: Scalar>(q: &S, p: &S, t: &S, a: &S, b: &S) -> S {
    q.clone() * p.clone() * (p.clone() - q.clone() - t.clone()) - a.clone() * q.clone() - b.clone() * p.clone()
}

pub fn h5<S: Scalar>(q: &S, p: &S, t: &S, a: &S, b: &S, c: &S) -> S {
    let one = S::one();
    q.clone() * (q.clone() - one) * p.clone() * (p.clone() + t.clone()) + a.clone() * t.clone() * q.clone()
        + b.clone() * p.clone()
        - c.clone() * q.clone() * p.clone()
}

pub fn h6<S: Scalar>(q: &S, p: &S, t: &S, a: &S, b: &S, c: &S, d: &S) -> S {
    let one = S::one();
    let q1 = q.clone() - one.clone();
    let qt = q.clone() - t.clone();
    let brace = (a.clone() - one) * q.clone() * q1.clone()
        + b.clone() * q.clone() * qt.clone()
        + c.clone() * q1.clone() * qt.clone();
    q.clone() * q1 * qt * p.clone() * p.clone() - brace * p.clone() + d.clone() * q.clone()
}

/// The prefactor-scaled Hamiltonian: H for A4, tH for A5,
/// t(t−1)H for D6, CP6 and P6.
pub fn scaled_hamiltonian<S: Scalar>(params: &PainleveParams, x: &PhasePoint<S>) -> Result<S> {
    params.check_point(x)?;
    let a: Vec<S> = params.alphas.iter().map(S::from_rational).collect();
    let t = &x.t;
    let one = S::one();
    let two = S::from_int(2);
    Ok(match params.system {
        SystemId::A4 => {
            let (q1, p1, q2, p2) = (&x.q[0], &x.p[0], &x.q[1], &x.p[1]);
            h4(q1, p1, t, &a[2], &a[1])
                + h4(q2, p2, t, &a[4], &(a[1].clone() + a[3].clone()))
                + two * q1.clone() * p1.clone() * p2.clone()
        }
        SystemId::A5 => {
            let (q1, p1, q2, p2) = (&x.q[0], &x.p[0], &x.q[1], &x.p[1]);
            let a13 = a[1].clone() + a[3].clone();
            let a135 = a13.clone() + a[5].clone();
            h5(q1, p1, t, &a[2], &a[1], &a135)
                + h5(q2, p2, t, &a[4], &a13, &a135)
                + two * q1.clone() * p1.clone() * (q2.clone() - one) * p2.clone()
        }
        SystemId::D6 => {
            let (q1, p1, q2, p2) = (&x.q[0], &x.p[0], &x.q[1], &x.p[1]);
            let d1 = a[2].clone() * (a[1].clone() + a[2].clone());
            let d2 = a[4].clone()
                * (a[1].clone() + two.clone() * a[2].clone() + a[3].clone() + a[4].clone());
            h6(q1, p1, t, &a[0], &(a[3].clone() + a[5].clone()), &(a[3].clone() + a[6].clone()), &d1)
                + h6(q2, p2, t, &(a[0].clone() + a[3].clone()), &a[5], &a[6], &d2)
                + two
                    * (q1.clone() - t.clone())
                    * p1.clone()
                    * q2.clone()
                    * ((q2.clone() - one) * p2.clone() + a[4].clone())
        }
        SystemId::CP6 => {
            let (q1, p1, q2, p2) = (&x.q[0], &x.p[0], &x.q[1], &x.p[1]);
            let eta = S::from_rational(params.eta.as_ref().expect("CP6 carries eta"));
            h6(
                q1,
                p1,
                t,
                &a[2],
                &(a[0].clone() + a[4].clone()),
                &(a[3].clone() + a[5].clone() - eta.clone()),
                &(eta.clone() * a[1].clone()),
            ) + h6(
                q2,
                p2,
                t,
                &(a[0].clone() + a[2].clone()),
                &a[4],
                &(a[1].clone() + a[3].clone() - eta.clone()),
                &(eta * a[5].clone()),
            ) + (q1.clone() - t.clone())
                * (q2.clone() - one)
                * ((q1.clone() * p1.clone() + a[1].clone()) * p2.clone()
                    + p1.clone() * (p2.clone() * q2.clone() + a[5].clone()))
        }
        SystemId::P6 => {
            let d = a[2].clone() * (a[1].clone() + a[2].clone());
            h6(&x.q[0], &x.p[0], t, &a[0], &a[3], &a[4], &d)
        }
    })
}

/// The factor dividing the scaled form: 1, t or t(t−1).
pub fn prefactor<S: Scalar>(system: SystemId, t: &S) -> S {
    match system {
        SystemId::A4 => S::one(),
        SystemId::A5 => t.clone(),
        SystemId::D6 | SystemId::CP6 | SystemId::P6 => t.clone() * (t.clone() - S::one()),
    }
}

pub fn hamiltonian<S: Scalar>(params: &PainleveParams, x: &PhasePoint<S>) -> Result<S> {
    let h = scaled_hamiltonian(params, x)?;
    div(&h, &prefactor(params.system, &x.t), params.system.prefactor_name())
}

/// Hamilton's equations, dq_i = ∂H/∂p_i and dp_i = −∂H/∂q_i, one dual pass per
/// canonical variable.
pub fn vector_field<S: Scalar>(params: &PainleveParams, x: &PhasePoint<S>) -> Result<(Vec<S>, Vec<S>)> {
    let m = x.q.len();
    let mut dq = Vec::with_capacity(m);
    let mut dp = Vec::with_capacity(m);
    for slot in 0..2 * m {
        let lift = |v: &[S], off: usize| -> Vec<Dual<S>> {
            v.iter()
                .enumerate()
                .map(|(i, c)| if off + i == slot { Dual::variable(c.clone()) } else { Dual::constant(c.clone()) })
                .collect()
        };
        let xd = PhasePoint { q: lift(&x.q, 0), p: lift(&x.p, m), t: Dual::constant(x.t.clone()) };
        let partial = hamiltonian(params, &xd)?.tangent;
        if slot < m {
            dp.push(-partial);
        } else {
            dq.push(partial);
        }
    }
    Ok((dq, dp))
}

/// ∂H/∂t at fixed (q, p).
pub fn time_partial<S: Scalar>(params: &PainleveParams, x: &PhasePoint<S>) -> Result<S> {
    let xd = PhasePoint {
        q: x.q.iter().cloned().map(Dual::constant).collect(),
        p: x.p.iter().cloned().map(Dual::constant).collect(),
        t: Dual::variable(x.t.clone()),
    };
    Ok(hamiltonian(params, &xd)?.tangent)
}
