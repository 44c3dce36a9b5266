use super::*;
use crate::exact_numerics::{ExtScalar, Rational, Scalar};
use crate::painleve_core::{params_from_reduction, PhasePoint, Reduction};
use crate::Error;

type Q = Rational;
type X = ExtScalar;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn x(v: Q) -> X {
    X::from_rational(&v)
}

#[test]
fn every_reduction_is_flat() {
    for red in Reduction::ALL {
        let report = verify_partition(red, 8, 42);
        assert!(report.ok(), "{red}: {:?}", report.failures.first());
        assert_eq!(report.samples, 8);
    }
}

#[test]
fn frozen_gauge_is_not_flat() {
    for red in Reduction::ALL {
        let report = verify_without_gauge_flow(red, 4, 7);
        assert_eq!(report.passed, 0, "{red}");
    }
}

#[test]
fn zero_samples() {
    let r = verify_partition(Reduction::P22, 0, 1);
    assert!(r.ok());
    assert_eq!(r.samples, 0);
}

#[test]
fn p33_change_of_variables() {
    let params = params_from_reduction(Reduction::P33, &vec![q(0); 6], &[q(1)]).unwrap();
    let pt = PhasePoint::new(vec![q(1), q(2)], vec![q(3), q(-1)], Q::frac(1, 8));
    let s = canonical_to_ds(Reduction::P33, &pt, &params, &[q(1)]).unwrap();
    assert_eq!(s.t11, q(2));
    assert_eq!(s.get("w1"), &q(4));
    let pt = PhasePoint::new(vec![q(1), q(2)], vec![q(3), q(-1)], q(1));
    assert!(matches!(canonical_to_ds(Reduction::P33, &pt, &params, &[q(1)]), Err(Error::Pole(_))));
    let pt = PhasePoint::new(vec![q(1), q(2)], vec![q(3), q(-1)], Q::frac(1, 27));
    assert!(matches!(canonical_to_ds(Reduction::P33, &pt, &params, &[q(0)]), Err(Error::Pole(_))));
}

#[test]
fn round_trips() {
    for red in Reduction::ALL {
        for i in 0..5 {
            let mut rng = sample_rng(11, i);
            let (s, _) = admissible_sample(red, &mut rng, GaugeFlow::Pfaffian).unwrap();
            let (pt, g) = s.exact_point();
            let st = canonical_to_ds(red, &pt, &s.params, &g).unwrap();
            assert!(constraint_residuals(&st).iter().all(|(_, v)| v.is_zero()), "{red}");
            let (back, gb) = ds_to_canonical(&st).unwrap();
            assert_eq!(back, pt, "{red}");
            assert_eq!(gb, g, "{red}");
            let again = canonical_to_ds(red, &back, &s.params, &gb).unwrap();
            assert_eq!(again.values, st.values, "{red}");
        }
    }
}

#[test]
fn constraints_detect_perturbation() {
    let mut rng = sample_rng(5, 0);
    let (s, _) = admissible_sample(Reduction::P41, &mut rng, GaugeFlow::Pfaffian).unwrap();
    let (pt, g) = s.exact_point();
    let st = canonical_to_ds(Reduction::P41, &pt, &s.params, &g).unwrap();
    for (name, touched) in [("phi23", 2), ("phi4", 1), ("phi3", 0)] {
        let mut bad = st.clone();
        bad.set(name, st.get(name).clone() + X::one()).unwrap();
        let res = constraint_residuals(&bad);
        for (k, (_, v)) in res.iter().enumerate() {
            assert_eq!(!v.is_zero(), k == touched, "{name} touches constraint {k}");
        }
    }
}

#[test]
fn p31_homogeneous_zero_state() {
    let z = X::zero();
    let kappas = vec![q(0), q(0), q(3), q(0)];
    let rhos = vec![q(1)];
    let st = DSState::new(
        Reduction::P31,
        vec![z.clone(); 7],
        z,
        kappas.into_iter().map(x).collect(),
        rhos.into_iter().map(x).collect(),
    )
    .unwrap();
    assert!(constraint_residuals(&st).iter().all(|(_, v)| v.is_zero()));
}

#[test]
fn p22_reference_entries() {
    let params = params_from_reduction(Reduction::P22, &[q(1), q(2), q(-1), q(3)], &[Q::frac(1, 2)]).unwrap();
    let t = x(q(3));
    let pt = PhasePoint::new(vec![x(q(2))], vec![x(q(5))], t.clone());
    let pair = lax_matrices(Reduction::P22, &pt, &[x(q(7))], &params).unwrap();
    let s = pair.m.matrix().entry(2, 0, 1);
    assert_eq!(s.clone() * s.clone(), t);
    let b13 = pair.b.matrix().entry(0, 2, 0);
    assert_eq!(b13 * X::from_int(2) * s.clone(), X::one());
    assert_eq!(pair.b.matrix().entry(2, 0, 1) * X::from_int(2) * s, X::one());
}

#[test]
fn p33_reference_entry() {
    let params = params_from_reduction(Reduction::P33, &[q(1), q(0), q(2), q(-1), q(1), q(3)], &[q(2)]).unwrap();
    let t = x(q(5));
    let (p1, w3) = (q(-4), q(3));
    let pt = PhasePoint::new(vec![x(q(2)), x(q(1))], vec![x(p1.clone()), x(q(2))], t.clone());
    let pair = lax_matrices(Reduction::P33, &pt, &[x(w3.clone())], &params).unwrap();
    // (entry·w3/(3p1))³ = t², i.e. the entry is 3t^{2/3}p1/w3
    let r = pair.m.matrix().entry(0, 1, 0) * x(w3.checked_div(&(q(3) * p1)).unwrap());
    assert_eq!(r.powi(3), t.clone() * t);
}

#[test]
fn p41_reference_entry() {
    let params = params_from_reduction(Reduction::P41, &[q(1), q(0), q(2), q(-1), q(1)], &[q(2)]).unwrap();
    let (q2, p2, g) = (q(3), Q::frac(1, 2), q(-2));
    let pt = PhasePoint::new(vec![x(q(2)), x(q2.clone())], vec![x(q(1)), x(p2.clone())], x(q(4)));
    let pair = lax_matrices(Reduction::P41, &pt, &[x(g.clone())], &params).unwrap();
    let expect = q(32) * ((Q::one() - q2) * p2 - params.alphas[4].clone());
    assert_eq!(pair.m.matrix().entry(2, 3, 0), x(expect.checked_div(&g).unwrap()));
}

#[test]
fn residual_is_traceless_and_float_agrees() {
    for red in Reduction::ALL {
        let mut rng = sample_rng(3, 1);
        let (s, c) = admissible_sample(red, &mut rng, GaugeFlow::Frozen).unwrap();
        assert!(c.residual.matrix().is_traceless());
        let pt = s.x.map(|v| num_complex::Complex64::from_rational(v));
        let g: Vec<_> = s.gauge.iter().map(num_complex::Complex64::from_rational).collect();
        let cf = zero_curvature_residual(red, &pt, &g, &s.params).unwrap();
        let worst = cf.matrix().blocks().values().flat_map(|m| m.nonzeros().map(|(_, _, v)| v.norm()).collect::<Vec<_>>()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{red}: {worst}");
    }
}

#[test]
fn constraints_hold_on_random_states() {
    for red in Reduction::ALL {
        let r = check_constraints(red, 20, 3);
        assert!(r.ok(), "{red}: {:?}", r.failures.first());
        assert_eq!(r.samples, 20);
    }
}

#[test]
fn normalization_is_identical() {
    for red in Reduction::ALL {
        let r = check_normalization(red, 50, 5);
        assert!(r.ok(), "{red}: {:?}", r.failures.first());
        assert_eq!(r.samples, 51);
    }
}
