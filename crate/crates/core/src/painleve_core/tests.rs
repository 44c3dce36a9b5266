use proptest::prelude::*;

use super::*;
use crate::exact_numerics::{Dual, Rational};

type Q = Rational;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn fr(n: i64, d: i64) -> Q {
    Q::frac(n, d)
}

/// Second evaluator of the polynomials, written term by term.
mod oracle {
    use super::*;

    fn hvi(q: &Q, p: &Q, t: &Q, a: &Q, b: &Q, c: &Q, d: &Q) -> Q {
        let one = Q::one();
        let quad = q.clone() * (q.clone() - one.clone()) * (q.clone() - t.clone()) * p.clone() * p.clone();
        let lin_a = (a.clone() - one.clone()) * q.clone() * (q.clone() - one.clone());
        let lin_b = b.clone() * q.clone() * (q.clone() - t.clone());
        let lin_c = c.clone() * (q.clone() - one) * (q.clone() - t.clone());
        quad - (lin_a + lin_b + lin_c) * p.clone() + d.clone() * q.clone()
    }

    pub fn scaled(sys: SystemId, a: &[Q], eta: &Q, x: &[Q], t: &Q) -> Q {
        let (q1, p1) = (&x[0], &x[1]);
        match sys {
            SystemId::P6 => hvi(q1, p1, t, &a[0], &a[3], &a[4], &(a[2].clone() * (a[1].clone() + a[2].clone()))),
            SystemId::A4 => {
                let (q2, p2) = (&x[2], &x[3]);
                let hiv = |q: &Q, p: &Q, aa: &Q, bb: &Q| {
                    q.clone() * p.clone() * p.clone() - q.clone() * q.clone() * p.clone() - t.clone() * q.clone() * p.clone()
                        - aa.clone() * q.clone()
                        - bb.clone() * p.clone()
                };
                hiv(q1, p1, &a[2], &a[1]) + hiv(q2, p2, &a[4], &(a[1].clone() + a[3].clone()))
                    + q(2) * q1.clone() * p1.clone() * p2.clone()
            }
            SystemId::A5 => {
                let (q2, p2) = (&x[2], &x[3]);
                let c = a[1].clone() + a[3].clone() + a[5].clone();
                let hv = |q: &Q, p: &Q, aa: &Q, bb: &Q| {
                    (q.clone() * q.clone() - q.clone()) * (p.clone() * p.clone() + t.clone() * p.clone())
                        + aa.clone() * t.clone() * q.clone()
                        + bb.clone() * p.clone()
                        - c.clone() * q.clone() * p.clone()
                };
                hv(q1, p1, &a[2], &a[1]) + hv(q2, p2, &a[4], &(a[1].clone() + a[3].clone()))
                    + q(2) * q1.clone() * p1.clone() * q2.clone() * p2.clone()
                    - q(2) * q1.clone() * p1.clone() * p2.clone()
            }
            SystemId::D6 => {
                let (q2, p2) = (&x[2], &x[3]);
                hvi(q1, p1, t, &a[0], &(a[3].clone() + a[5].clone()), &(a[3].clone() + a[6].clone()),
                    &(a[2].clone() * a[1].clone() + a[2].clone() * a[2].clone()))
                    + hvi(q2, p2, t, &(a[0].clone() + a[3].clone()), &a[5], &a[6],
                        &(a[4].clone() * (a[1].clone() + a[2].clone() + a[2].clone() + a[3].clone() + a[4].clone())))
                    + q(2) * (q1.clone() - t.clone()) * p1.clone() * q2.clone() * (q2.clone() - Q::one()) * p2.clone()
                    + q(2) * (q1.clone() - t.clone()) * p1.clone() * q2.clone() * a[4].clone()
            }
            SystemId::CP6 => {
                let (q2, p2) = (&x[2], &x[3]);
                let cpl = (q1.clone() - t.clone()) * (q2.clone() - Q::one());
                hvi(q1, p1, t, &a[2], &(a[0].clone() + a[4].clone()), &(a[3].clone() + a[5].clone() - eta.clone()),
                    &(eta.clone() * a[1].clone()))
                    + hvi(q2, p2, t, &(a[0].clone() + a[2].clone()), &a[4], &(a[1].clone() + a[3].clone() - eta.clone()),
                        &(eta.clone() * a[5].clone()))
                    + cpl.clone() * q1.clone() * p1.clone() * p2.clone()
                    + cpl.clone() * a[1].clone() * p2.clone()
                    + cpl.clone() * p1.clone() * p2.clone() * q2.clone()
                    + cpl * a[5].clone() * p1.clone()
            }
        }
    }

    fn dvi_dq(x: &Q, p: &Q, t: &Q, a: &Q, b: &Q, c: &Q, d: &Q) -> Q {
        let one = Q::one();
        let cubic = q(3) * x.clone() * x.clone() - q(2) * (one.clone() + t.clone()) * x.clone() + t.clone();
        let lin = (a.clone() - one.clone()) * (q(2) * x.clone() - one.clone())
            + b.clone() * (q(2) * x.clone() - t.clone())
            + c.clone() * (q(2) * x.clone() - one - t.clone());
        cubic * p.clone() * p.clone() - lin * p.clone() + d.clone()
    }

    fn dvi_dp(x: &Q, p: &Q, t: &Q, a: &Q, b: &Q, c: &Q) -> Q {
        let one = Q::one();
        q(2) * x.clone() * (x.clone() - one.clone()) * (x.clone() - t.clone()) * p.clone()
            - ((a.clone() - one.clone()) * x.clone() * (x.clone() - one.clone())
                + b.clone() * x.clone() * (x.clone() - t.clone())
                + c.clone() * (x.clone() - one) * (x.clone() - t.clone()))
    }

    /// Hand gradient of t(t−1)H_c: (∂q1, ∂p1, ∂q2, ∂p2).
    pub fn cp6_gradient(a: &[Q], eta: &Q, x: &[Q], t: &Q) -> [Q; 4] {
        let (q1, p1, q2, p2) = (&x[0], &x[1], &x[2], &x[3]);
        let (a1b, a1c) = (a[0].clone() + a[4].clone(), a[3].clone() + a[5].clone() - eta.clone());
        let (a2a, a2c) = (a[0].clone() + a[2].clone(), a[1].clone() + a[3].clone() - eta.clone());
        let d1 = eta.clone() * a[1].clone();
        let d2 = eta.clone() * a[5].clone();
        let u = q1.clone() - t.clone();
        let v = q2.clone() - Q::one();
        let br = q1.clone() * p1.clone() * p2.clone() + a[1].clone() * p2.clone() + p1.clone() * p2.clone() * q2.clone()
            + a[5].clone() * p1.clone();
        [
            dvi_dq(q1, p1, t, &a[2], &a1b, &a1c, &d1) + v.clone() * br.clone() + u.clone() * v.clone() * p1.clone() * p2.clone(),
            dvi_dp(q1, p1, t, &a[2], &a1b, &a1c)
                + u.clone() * v.clone() * (q1.clone() * p2.clone() + p2.clone() * q2.clone() + a[5].clone()),
            dvi_dq(q2, p2, t, &a2a, &a[4], &a2c, &d2) + u.clone() * br + u.clone() * v.clone() * p1.clone() * p2.clone(),
            dvi_dp(q2, p2, t, &a2a, &a[4], &a2c) + u.clone() * v * (q1.clone() * p1.clone() + a[1].clone() + p1.clone() * q2.clone()),
        ]
    }
}

fn small() -> impl Strategy<Value = Q> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| fr(n, d))
}

fn params_for(sys: SystemId, a: Vec<Q>, eta: Q) -> PainleveParams {
    let a = a[..sys.alpha_count()].to_vec();
    PainleveParams::new(sys, a, sys.has_eta().then_some(eta)).unwrap()
}

fn point(sys: SystemId, x: &[Q], t: Q) -> PhasePoint<Q> {
    PhasePoint::from_interleaved(&x[..2 * sys.pairs()], t)
}

fn nonsingular_t() -> impl Strategy<Value = Q> {
    small().prop_filter("t off the singular set", |t| !t.is_zero() && *t != Q::one())
}

#[test]
fn scalar_block_examples() {
    assert_eq!(h4(&q(1), &q(2), &q(3), &q(1), &q(1)), q(-7));
    assert_eq!(h5(&q(2), &q(1), &q(1), &q(1), &q(1), &q(1)), q(5));
    assert_eq!(h6(&q(2), &q(1), &q(3), &q(1), &q(1), &q(1), &q(1)), q(3));
    let (p, t, a, b, c, d) = (fr(3, 2), fr(5, 3), q(2), fr(-1, 2), q(7), fr(1, 3));
    assert_eq!(h4(&Q::zero(), &p, &t, &a, &b), -(b.clone() * p.clone()));
    assert_eq!(h4(&p, &Q::zero(), &t, &a, &b), -(a.clone() * p.clone()));
    assert_eq!(h5(&Q::zero(), &p, &t, &a, &b, &c), b.clone() * p.clone());
    assert_eq!(h5(&Q::one(), &p, &t, &a, &b, &c), a.clone() * t.clone() + b.clone() * p.clone() - c.clone() * p.clone());
    assert_eq!(h6(&Q::zero(), &p, &t, &a, &b, &c, &d), -(c.clone() * t.clone() * p.clone()));
    assert_eq!(h6(&Q::one(), &p, &t, &a, &b, &c, &d), -(b * (Q::one() - t) * p) + d);
}

#[test]
fn parameter_map_examples() {
    let z = |n| vec![Q::zero(); n];
    let p33 = params_from_reduction(Reduction::P33, &z(6), &z(1)).unwrap();
    assert_eq!(p33.alphas, vec![fr(1, 3), q(0), fr(1, 3), q(0), fr(1, 3), q(0)]);
    assert_eq!(p33.eta(), Q::zero());
    let p22 = params_from_reduction(Reduction::P22, &z(4), &z(1)).unwrap();
    assert_eq!(p22.alphas, vec![fr(1, 2), q(0), q(0), fr(1, 2), q(0)]);
    assert!(matches!(
        params_from_reduction(Reduction::P22, &z(3), &z(1)),
        Err(crate::Error::Arity { .. })
    ));
    assert!(params_from_reduction(Reduction::P221, &z(5), &z(1)).is_err());
}

#[test]
fn pfaffian_examples() {
    let params = params_from_reduction(Reduction::P31, &[q(1), q(2), q(0), q(-1)], &[q(3)]).unwrap();
    let x = PhasePoint::new(vec![q(5), q(-2)], vec![q(0), q(0)], q(0));
    assert_eq!(pfaffian_log_derivative(Reduction::P31, &x, &params).unwrap(), vec![("phi12", q(0))]);

    let params = params_from_reduction(Reduction::P221, &[q(1), q(0), q(2), q(-3), q(1)], &[fr(1, 2), q(4)]).unwrap();
    let t = q(2);
    let x = PhasePoint::new(vec![t.clone(), t.clone()], vec![q(7), fr(-3, 5)], t.clone());
    let out = pfaffian_log_derivative(Reduction::P221, &x, &params).unwrap();
    assert_eq!(out[1], ("phi34", (-params.eta()).checked_div(&(t.clone() * (t - Q::one()))).unwrap()));

    let x = PhasePoint::new(vec![q(2), q(3)], vec![q(1), q(1)], q(1));
    assert!(matches!(pfaffian_log_derivative(Reduction::P33, &x, &p33_sample()), Err(crate::Error::Pole(_))));
}

fn p33_sample() -> PainleveParams {
    params_from_reduction(Reduction::P33, &[q(1), q(-2), fr(1, 2), q(0), q(3), fr(2, 3)], &[fr(-1, 4)]).unwrap()
}

#[test]
fn p33_pfaffian_second_coder() {
    let params = p33_sample();
    let a = &params.alphas;
    let eta = params.eta();
    let (q1, p1, q2, p2, t) = (fr(3, 2), q(-2), fr(1, 3), fr(5, 4), fr(7, 2));
    let x = PhasePoint::new(vec![q1.clone(), q2.clone()], vec![p1.clone(), p2.clone()], t.clone());
    let got = pfaffian_log_derivative(Reduction::P33, &x, &params).unwrap()[0].1.clone();
    let one = Q::one();
    let mut rhs = Q::zero();
    rhs = rhs - (q1.clone() - one.clone()) * (q1.clone() - t.clone()) * p1;
    rhs = rhs - (q2.clone() - one.clone()) * (q2.clone() - t.clone()) * p2;
    rhs = rhs - a[1].clone() * q1 - a[5].clone() * q2;
    let c1 = a[1].clone() + a[2].clone() - a[3].clone() - a[4].clone() + q(2) * eta.clone();
    let c0 = a[1].clone() + a[2].clone() + q(2) * a[3].clone() - a[4].clone() - q(4) * eta;
    rhs = rhs + c1 * t.clone() * fr(1, 3) - c0 * fr(1, 3);
    assert_eq!(got, rhs.checked_div(&(t.clone() * (t - one))).unwrap());
}

#[test]
fn cp6_coupling_vanishes_on_locus() {
    let params = PainleveParams::new(SystemId::CP6, vec![fr(1, 2), q(1), fr(-1, 3), q(2), fr(1, 5), q(0)], Some(fr(2, 7)))
        .unwrap();
    let t = q(3);
    let x = PhasePoint::new(vec![t.clone(), q(1)], vec![q(4), fr(-5, 2)], t.clone());
    let a = &params.alphas;
    let eta = params.eta();
    let blocks = h6(&x.q[0], &x.p[0], &t, &a[2], &(a[0].clone() + a[4].clone()), &(a[3].clone() + a[5].clone() - eta.clone()),
        &(eta.clone() * a[1].clone()))
        + h6(&x.q[1], &x.p[1], &t, &(a[0].clone() + a[2].clone()), &a[4], &(a[1].clone() + a[3].clone() - eta.clone()),
            &(eta * a[5].clone()));
    assert_eq!(hamiltonian(&params, &x).unwrap(), blocks.checked_div(&(t.clone() * (t - Q::one()))).unwrap());

    let a4 = PainleveParams::new(SystemId::A4, vec![q(1), q(2), q(3), q(4), q(5)], None).unwrap();
    let x = PhasePoint::new(vec![q(0), q(2)], vec![q(3), q(1)], q(1));
    let expect = h4(&q(0), &q(3), &q(1), &q(3), &q(2)) + h4(&q(2), &q(1), &q(1), &q(5), &q(6));
    assert_eq!(hamiltonian(&a4, &x).unwrap(), expect);
}

#[test]
fn singular_time_is_pole() {
    let p6 = PainleveParams::new(SystemId::P6, vec![q(1); 5], None).unwrap();
    let x = PhasePoint::new(vec![q(2)], vec![q(1)], q(1));
    assert!(matches!(hamiltonian(&p6, &x), Err(crate::Error::Pole(_))));
    let a5 = PainleveParams::new(SystemId::A5, vec![q(1); 6], None).unwrap();
    let x = PhasePoint::new(vec![q(2), q(3)], vec![q(1), q(1)], q(0));
    assert!(vector_field(&a5, &x).is_err());
}

#[test]
fn p6_free_parameters_vector_field() {
    // a = 1, b = c = d = 0 leaves q(q−1)(q−t)p², so at p = 0 both components vanish
    let params = PainleveParams::new(SystemId::P6, vec![q(1), q(0), q(0), q(0), q(0)], None).unwrap();
    let t = q(3);
    let x = PhasePoint::new(vec![q(2)], vec![q(0)], t.clone());
    let (dq, dp) = vector_field(&params, &x).unwrap();
    assert_eq!((dq[0].clone(), dp[0].clone()), (q(0), q(0)));
    // with a = 0 the linear term is q(q−1)p: dq = q(q−1)/(t(t−1)) and dp = 0 at p = 0
    let params = PainleveParams::new(SystemId::P6, vec![q(0); 5], None).unwrap();
    let (dq, dp) = vector_field(&params, &x).unwrap();
    assert_eq!(dq[0], q(2).checked_div(&q(6)).unwrap());
    assert_eq!(dp[0], q(0));
}

#[test]
fn vector_field_matches_finite_differences() {
    for sys in SystemId::ALL {
        let a: Vec<f64> = [0.3, -0.7, 1.1, 0.25, -0.4, 0.6, 0.9][..sys.alpha_count()].to_vec();
        let params = PainleveParams::new(
            sys,
            a.iter().map(|v| Q::frac((v * 100.0) as i64, 100)).collect(),
            sys.has_eta().then(|| fr(3, 10)),
        )
        .unwrap();
        let x = PhasePoint::from_interleaved(&[0.7f64, -1.3, 2.2, 0.45][..2 * sys.pairs()], 2.6);
        let (dq, dp) = vector_field(&params, &x).unwrap();
        let h = 1e-6;
        let flat = x.interleaved();
        for k in 0..flat.len() {
            let eval = |d: f64| {
                let mut v = flat.clone();
                v[k] += d;
                hamiltonian(&params, &PhasePoint::from_interleaved(&v, x.t)).unwrap()
            };
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            let dual = if k % 2 == 0 { -dp[k / 2] } else { dq[k / 2] };
            assert!((fd - dual).abs() <= 1e-6 * dual.abs().max(1.0), "{sys} slot {k}: {fd} vs {dual}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hamiltonian_matches_oracle(
        a in prop::collection::vec(small(), 7),
        eta in small(),
        x in prop::collection::vec(small(), 4),
        t in nonsingular_t(),
    ) {
        for sys in SystemId::ALL {
            let params = params_for(sys, a.clone(), eta.clone());
            let got = scaled_hamiltonian(&params, &point(sys, &x, t.clone())).unwrap();
            prop_assert_eq!(got, oracle::scaled(sys, &params.alphas, &params.eta(), &x, &t));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cp6_gradient_matches_hand_gradient(
        a in prop::collection::vec(small(), 6),
        eta in small(),
        x in prop::collection::vec(small(), 4),
        t in nonsingular_t(),
    ) {
        let params = params_for(SystemId::CP6, a, eta);
        let (dq, dp) = vector_field(&params, &point(SystemId::CP6, &x, t.clone())).unwrap();
        let g = oracle::cp6_gradient(&params.alphas, &params.eta(), &x, &t);
        let s = t.clone() * (t - Q::one());
        let h = |v: &Q| v.checked_div(&s).unwrap();
        prop_assert_eq!(dp[0].clone(), -h(&g[0]));
        prop_assert_eq!(dq[0].clone(), h(&g[1]));
        prop_assert_eq!(dp[1].clone(), -h(&g[2]));
        prop_assert_eq!(dq[1].clone(), h(&g[3]));
    }

    #[test]
    fn vector_field_is_symplectic(
        a in prop::collection::vec(small(), 7),
        eta in small(),
        x in prop::collection::vec(small(), 4),
        t in nonsingular_t(),
    ) {
        for sys in SystemId::ALL {
            let params = params_for(sys, a.clone(), eta.clone());
            let m = sys.pairs();
            let flat = &x[..2 * m];
            // jac[j] = derivative of (dq, dp) along canonical slot j
            let mut jac = Vec::new();
            for j in 0..2 * m {
                let seeded: Vec<Dual<Q>> = flat
                    .iter()
                    .enumerate()
                    .map(|(k, v)| if k == j { Dual::variable(v.clone()) } else { Dual::constant(v.clone()) })
                    .collect();
                let (dq, dp) = vector_field(&params, &PhasePoint::from_interleaved(&seeded, Dual::constant(t.clone()))).unwrap();
                jac.push((dq.into_iter().map(|d| d.tangent).collect::<Vec<_>>(), dp.into_iter().map(|d| d.tangent).collect::<Vec<_>>()));
            }
            for i in 0..m {
                for k in 0..m {
                    // ∂(dq_i)/∂q_k = −∂(dp_k)/∂p_i
                    prop_assert_eq!(jac[2 * k].0[i].clone(), -jac[2 * i + 1].1[k].clone());
                    // ∂(dq_i)/∂p_k = ∂(dq_k)/∂p_i, ∂(dp_i)/∂q_k = ∂(dp_k)/∂q_i
                    prop_assert_eq!(jac[2 * k + 1].0[i].clone(), jac[2 * i + 1].0[k].clone());
                    prop_assert_eq!(jac[2 * k].1[i].clone(), jac[2 * i].1[k].clone());
                }
            }
        }
    }

    #[test]
    fn cp6_maps_normalized(
        k in prop::collection::vec(small(), 6),
        r in prop::collection::vec(small(), 2),
    ) {
        let p33 = params_from_reduction(Reduction::P33, &k, &r[..1]).unwrap();
        prop_assert_eq!(p33.alpha_sum(), Q::one());
        let p221 = params_from_reduction(Reduction::P221, &k[..5], &r).unwrap();
        prop_assert_eq!(p221.alpha_sum(), Q::one());
        let p31 = params_from_reduction(Reduction::P31, &k[..4], &r[..1]).unwrap();
        prop_assert_eq!(p31.alpha_sum(), Q::one());
        let p22 = params_from_reduction(Reduction::P22, &k[..4], &r[..1]).unwrap();
        let a = &p22.alphas;
        prop_assert_eq!(a[0].clone() + a[1].clone() + q(2) * a[2].clone() + a[3].clone() + a[4].clone(), Q::one());
    }

    #[test]
    fn reduction_round_trip(
        k in prop::collection::vec(small(), 6),
        r in prop::collection::vec(small(), 2),
    ) {
        for red in Reduction::ALL {
            let mut kappas = k[..red.kappa_count()].to_vec();
            let shift = kappas[0].clone();
            for v in kappas.iter_mut() {
                *v = v.clone() - shift.clone();
            }
            let rhos = r[..red.rho_count()].to_vec();
            let params = params_from_reduction(red, &kappas, &rhos).unwrap();
            let raw = params_to_reduction(red, &params).unwrap();
            prop_assert_eq!(&raw.kappas, &kappas);
            prop_assert_eq!(&raw.rhos, &rhos);
        }
    }
}
