use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_numerics::{div, Scalar};
use crate::painleve_core::{params_to_reduction, PainleveParams, PhasePoint, RawReduction, Reduction};

/// The variables of a reduction's DS presentation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DSState<S> {
    pub reduction: Reduction,
    pub names: &'static [&'static str],
    pub values: Vec<S>,
    pub t11: S,
    pub kappas: Vec<S>,
    pub rhos: Vec<S>,
}

pub fn ds_names(red: Reduction) -> &'static [&'static str] {
    match red {
        Reduction::P22 => &["w1", "w3", "phi1", "phi3"],
        Reduction::P31 => &["w2", "phi0", "phi1", "phi2", "phi3", "phi12", "phi23"],
        Reduction::P41 => &["phi0", "phi1", "phi2", "phi3", "phi4", "phi12", "phi23", "phi34"],
        Reduction::P221 => &["w1", "w4", "phi1", "phi2", "phi3", "phi4", "phi12", "phi34"],
        Reduction::P33 => &["w1", "w3", "w5", "phi1", "phi3", "phi5"],
    }
}

impl<S: Scalar> DSState<S> {
    pub fn new(red: Reduction, values: Vec<S>, t11: S, kappas: Vec<S>, rhos: Vec<S>) -> Result<Self> {
        let names = ds_names(red);
        if values.len() != names.len() {
            return Err(Error::Arity { what: "DS variables", expected: names.len(), got: values.len() });
        }
        if kappas.len() != red.kappa_count() {
            return Err(Error::Arity { what: "kappas", expected: red.kappa_count(), got: kappas.len() });
        }
        if rhos.len() != red.rho_count() {
            return Err(Error::Arity { what: "rhos", expected: red.rho_count(), got: rhos.len() });
        }
        Ok(DSState { reduction: red, names, values, t11, kappas, rhos })
    }

    pub fn get(&self, name: &str) -> &S {
        let i = self.names.iter().position(|n| *n == name).unwrap_or_else(|| panic!("no DS variable {name}"));
        &self.values[i]
    }

    pub fn set(&mut self, name: &str, v: S) -> Result<()> {
        let i = self
            .names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::Domain(format!("{} has no variable {name}", self.reduction)))?;
        self.values[i] = v;
        Ok(())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DSState<T> {
        DSState {
            reduction: self.reduction,
            names: self.names,
            values: self.values.iter().map(&f).collect(),
            t11: f(&self.t11),
            kappas: self.kappas.iter().map(&f).collect(),
            rhos: self.rhos.iter().map(&f).collect(),
        }
    }

    pub(crate) fn k(&self, i: usize) -> S {
        self.kappas[i].clone()
    }

    pub(crate) fn rho(&self, i: usize) -> S {
        self.rhos[i - 1].clone()
    }
}

/// The κ's and ρ's behind `params`, recovered when not recorded.
pub fn raw_parameters(red: Reduction, params: &PainleveParams) -> Result<RawReduction> {
    match &params.raw {
        Some(raw) if raw.kappas.len() == red.kappa_count() && raw.rhos.len() == red.rho_count() => Ok(raw.clone()),
        _ => params_to_reduction(red, params),
    }
}

/// Name of the root adjoined for t_{1,1}, its degree, and its base as a function of t.
fn root_spec<S: Scalar>(red: Reduction, t: &S) -> Result<(&'static str, u32, S)> {
    Ok(match red {
        Reduction::P22 | Reduction::P221 => ("s", 2, t.clone()),
        Reduction::P31 => ("r", 2, S::from_int(6)),
        Reduction::P41 => ("v", 2, -(S::from_int(2) * t.clone())),
        Reduction::P33 => ("u", 3, crate::exact_numerics::recip(t, "t")?),
    })
}

/// t_{1,1} as a function of t: s with s² = t, −t√6/3, v with v² = −2t, or u with u³ = 1/t.
pub fn t11_of_t<S: Scalar>(red: Reduction, t: &S) -> Result<S> {
    let (sym, k, base) = root_spec(red, t)?;
    let root = S::root(&base, k, sym)?;
    Ok(match red {
        Reduction::P31 => -(t.clone() * root) * S::frac(1, 3),
        _ => root,
    })
}

pub fn t_of_t11<S: Scalar>(red: Reduction, t11: &S) -> Result<S> {
    Ok(match red {
        Reduction::P22 | Reduction::P221 => t11.clone() * t11.clone(),
        Reduction::P31 => -(t11.clone() * S::root(&S::from_int(6), 2, "r")?) * S::frac(1, 2),
        Reduction::P41 => -(t11.clone() * t11.clone()) * S::frac(1, 2),
        Reduction::P33 => crate::exact_numerics::recip(&t11.powi(3), "t11")?,
    })
}

fn check_t11<S: Scalar>(red: Reduction, t11: &S) -> Result<()> {
    let one = S::one();
    let bad = |what: &str| Err(Error::Pole(what.into()));
    if t11.is_zero() {
        return bad("t11");
    }
    match red {
        Reduction::P22 | Reduction::P221 if (t11.clone() * t11.clone() - one.clone()).is_zero() => bad("t11^2-1"),
        Reduction::P33 if (t11.powi(3) - one).is_zero() => bad("t11^3-1"),
        _ => Ok(()),
    }
}

/// The variable change from canonical coordinates plus gauge variables to
/// the DS variables; the remaining DS variables come from the constraints.
pub fn canonical_to_ds<S: Scalar>(
    red: Reduction,
    x: &PhasePoint<S>,
    params: &PainleveParams,
    gauge: &[S],
) -> Result<DSState<S>> {
    params.check_point(x)?;
    if params.system != red.system() {
        return Err(Error::Domain(format!("{red} needs {} parameters, got {}", red.system(), params.system)));
    }
    if gauge.len() != red.gauge_names().len() {
        return Err(Error::Arity { what: "gauge variables", expected: red.gauge_names().len(), got: gauge.len() });
    }
    let raw = raw_parameters(red, params)?;
    let kappas: Vec<S> = raw.kappas.iter().map(S::from_rational).collect();
    let rhos: Vec<S> = raw.rhos.iter().map(S::from_rational).collect();
    let t11 = t11_of_t(red, &x.t)?;
    check_t11(red, &t11)?;
    let k = |i: usize| kappas[i].clone();
    let rho = |i: usize| rhos[i - 1].clone();
    let c = |n: i64| S::from_int(n);
    let q = |i: usize| x.q[i - 1].clone();
    let p = |i: usize| x.p[i - 1].clone();
    let t11c = t11.clone();
    let values = match red {
        Reduction::P22 => {
            let w1 = gauge[0].clone();
            let w3 = div(&(q(1) * w1.clone()), &t11c, "t11")?;
            let phi3 = div(&(c(2) * t11c.clone() * p(1)), &w1, "w1")?;
            let cst = k(0) - k(1) + k(2) - k(3) + c(2) * rho(1);
            let phi1 = div(&-(w3.clone() * phi3.clone() + cst), &w1, "w1")?;
            vec![w1, w3, phi1, phi3]
        }
        Reduction::P31 => {
            let g = gauge[0].clone();
            let r = S::root(&c(6), 2, "r")?;
            let w2 = div(&-(r.clone() * q(1)), &g, "phi12")?;
            let phi2 = -(r.clone() * p(1) * g.clone()) * S::frac(1, 2);
            let phi1 = r.clone() * q(2);
            let phi0 = -(r * p(2));
            let phi23 = c(3) * t11c - phi0.clone() - phi1.clone();
            let num = c(2) * w2.clone() * phi2.clone() - c(2) * (k(2) - k(3) - c(3) * rho(1));
            let phi3 = div(&num, &g, "phi12")?;
            vec![w2, phi0, phi1, phi2, phi3, g, phi23]
        }
        Reduction::P41 => {
            let g = gauge[0].clone();
            let phi0 = c(4) * t11c.clone() * q(1);
            let phi1 = div(&(c(8) * p(1)), &t11c, "t11")?;
            let phi2 = t11c.clone() * g.clone() * (q(2) - q(1));
            let phi34 = div(&(c(32) * p(2)), &(t11c.clone() * g.clone()), "t11*phi12")?;
            let phi23 = c(4) * t11c.clone() - phi0.clone();
            let phi4 = c(4) * t11c.clone() - phi1.clone() - g.clone() * phi34.clone() * S::frac(1, 4);
            let num = c(16) * (-k(2) + k(3) + c(4) * rho(1))
                - (phi0.clone() - c(4) * t11c) * g.clone() * phi34.clone()
                - c(4) * phi2.clone() * phi34.clone();
            let phi3 = div(&num, &(c(4) * g.clone()), "phi12")?;
            vec![phi0, phi1, phi2, phi3, phi4, g, phi23, phi34]
        }
        Reduction::P221 => {
            let (g3, g34) = (gauge[0].clone(), gauge[1].clone());
            let tt = t11c.clone() * t11c.clone();
            let w4 = div(&-(q(1) * g3.clone()), &(tt.clone() * g34.clone()), "t11^2*phi34")?;
            let phi4 = div(&-(c(4) * tt * g34.clone() * p(1)), &g3, "phi3")?;
            let w1 = div(&-(q(2) * g3.clone()), &(t11c.clone() * g34.clone()), "t11*phi34")?;
            let phi1 = div(&-(c(4) * t11c.clone() * g34.clone() * p(2)), &g3, "phi3")?;
            let s = w1.clone() * phi1.clone() + w4.clone() * phi4.clone();
            let c1 = k(0) - k(1) + k(3) - k(4) + c(2) * rho(1);
            let c2 = k(0) - k(1) + k(2) - k(4) + c(2) * rho(2);
            let phi12 = div(&(c(2) * t11c * (s.clone() + c1)), &g3, "phi3")?;
            let phi2 = div(&-(c(2) * (s + c2)), &g34, "phi34")?;
            vec![w1, w4, phi1, phi2, g3, phi4, phi12, g34]
        }
        Reduction::P33 => {
            let w3 = gauge[0].clone();
            let tt = t11c.clone() * t11c.clone();
            let w1 = q(1) * tt.clone() * w3.clone();
            let phi1 = div(&(c(3) * p(1)), &(tt * w3.clone()), "t11^2*w3")?;
            let w5 = q(2) * t11c.clone() * w3.clone();
            let phi5 = div(&(c(3) * p(2)), &(t11c * w3.clone()), "t11*w3")?;
            let alt = k(0) - k(1) + k(2) - k(3) + k(4) - k(5);
            let num = -(w1.clone() * phi1.clone() + w5.clone() * phi5.clone() + alt + c(3) * rho(1));
            let phi3 = div(&num, &w3, "w3")?;
            vec![w1, w3, w5, phi1, phi3, phi5]
        }
    };
    DSState::new(red, values, t11, kappas, rhos)
}

/// The variable change to canonical coordinates, returning the phase point and the gauge variables.
pub fn ds_to_canonical<S: Scalar>(s: &DSState<S>) -> Result<(PhasePoint<S>, Vec<S>)> {
    let v = |n: &str| s.get(n).clone();
    let t11 = s.t11.clone();
    let c = |n: i64| S::from_int(n);
    let t = t_of_t11(s.reduction, &t11)?;
    let (q, p, gauge) = match s.reduction {
        Reduction::P22 => {
            let p = div(&(v("w1") * v("phi3")), &(c(2) * t11.clone()), "t11")?;
            let q = div(&(t11 * v("w3")), &v("w1"), "w1")?;
            (vec![q], vec![p], vec![v("w1")])
        }
        Reduction::P31 => {
            let r = S::root(&c(6), 2, "r")?;
            let g = v("phi12");
            let q1 = div(&-(v("w2") * g.clone()), &r, "r")?;
            let p1 = div(&-(c(2) * v("phi2")), &(r.clone() * g.clone()), "phi12")?;
            let q2 = div(&v("phi1"), &r, "r")?;
            let p2 = div(&-v("phi0"), &r, "r")?;
            (vec![q1, q2], vec![p1, p2], vec![g])
        }
        Reduction::P41 => {
            let g = v("phi12");
            let q1 = div(&v("phi0"), &(c(4) * t11.clone()), "t11")?;
            let p1 = t11.clone() * v("phi1") * S::frac(1, 8);
            let q2 = q1.clone() + div(&v("phi2"), &(t11.clone() * g.clone()), "t11*phi12")?;
            let p2 = t11 * g.clone() * v("phi34") * S::frac(1, 32);
            (vec![q1, q2], vec![p1, p2], vec![g])
        }
        Reduction::P221 => {
            let (g3, g34) = (v("phi3"), v("phi34"));
            let tt = t11.clone() * t11.clone();
            let q1 = div(&-(tt.clone() * g34.clone() * v("w4")), &g3, "phi3")?;
            let p1 = div(&-(g3.clone() * v("phi4")), &(c(4) * tt * g34.clone()), "t11^2*phi34")?;
            let q2 = div(&-(t11.clone() * g34.clone() * v("w1")), &g3, "phi3")?;
            let p2 = div(&-(g3.clone() * v("phi1")), &(c(4) * t11 * g34.clone()), "t11*phi34")?;
            (vec![q1, q2], vec![p1, p2], vec![g3, g34])
        }
        Reduction::P33 => {
            let w3 = v("w3");
            let tt = t11.clone() * t11.clone();
            let q1 = div(&v("w1"), &(tt.clone() * w3.clone()), "t11^2*w3")?;
            let p1 = tt * w3.clone() * v("phi1") * S::frac(1, 3);
            let q2 = div(&v("w5"), &(t11.clone() * w3.clone()), "t11*w3")?;
            let p2 = t11 * w3.clone() * v("phi5") * S::frac(1, 3);
            (vec![q1, q2], vec![p1, p2], vec![w3])
        }
    };
    Ok((PhasePoint::new(q, p, t), gauge))
}

/// Left minus right of each constraint identity.
pub fn constraint_residuals<S: Scalar>(s: &DSState<S>) -> Vec<(&'static str, S)> {
    let v = |n: &str| s.get(n).clone();
    let c = |n: i64| S::from_int(n);
    let t11 = s.t11.clone();
    let (k, rho) = (|i| s.k(i), |i| s.rho(i));
    match s.reduction {
        Reduction::P22 => {
            let cst = k(0) - k(1) + k(2) - k(3) + c(2) * rho(1);
            vec![("w1*phi1+w3*phi3", v("w1") * v("phi1") + v("w3") * v("phi3") + cst)]
        }
        Reduction::P31 => vec![
            (
                "2*w2*phi2-phi3*phi12",
                c(2) * v("w2") * v("phi2") - v("phi3") * v("phi12") - c(2) * (k(2) - k(3) - c(3) * rho(1)),
            ),
            ("phi0+phi1+phi23", v("phi0") + v("phi1") + v("phi23") - c(3) * t11),
        ],
        Reduction::P41 => vec![
            (
                "phi3*phi12",
                (v("phi0") - c(4) * t11.clone()) * v("phi12") * v("phi34")
                    + c(4) * v("phi3") * v("phi12")
                    + c(4) * v("phi2") * v("phi34")
                    - c(16) * (-k(2) + k(3) + c(4) * rho(1)),
            ),
            ("phi1+phi4", c(4) * v("phi1") + c(4) * v("phi4") + v("phi12") * v("phi34") - c(16) * t11.clone()),
            ("phi0+phi23", v("phi0") + v("phi23") - c(4) * t11),
        ],
        Reduction::P221 => {
            let sum = v("w1") * v("phi1") + v("w4") * v("phi4");
            let c1 = k(0) - k(1) + k(3) - k(4) + c(2) * rho(1);
            let c2 = k(0) - k(1) + k(2) - k(4) + c(2) * rho(2);
            vec![
                ("phi2*phi34", v("phi2") * v("phi34") + c(2) * (sum.clone() + c2)),
                ("phi3*phi12", v("phi3") * v("phi12") - c(2) * t11 * (sum + c1)),
            ]
        }
        Reduction::P33 => {
            let alt = k(0) - k(1) + k(2) - k(3) + k(4) - k(5);
            vec![(
                "w1*phi1+w3*phi3+w5*phi5",
                v("w1") * v("phi1") + v("w3") * v("phi3") + v("w5") * v("phi5") + alt + c(3) * rho(1),
            )]
        }
    }
}
