use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::params::{PainleveParams, PhasePoint, RawReduction, SystemId};
use crate::error::{Error, Result};
use crate::exact_numerics::{div, Rational, Scalar};
use crate::heisenberg::Partition;

/// The five reductions with explicit Lax pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reduction {
    P22,
    P31,
    P41,
    P221,
    P33,
}

#[derive(Clone, Copy, Debug)]
enum Target {
    Alpha(usize),
    Eta,
}

/// value = (constant + Σ coeffs·unknowns) / denom over (κ_0.., ρ_1..).
struct MapRow {
    target: Target,
    denom: i64,
    constant: i64,
    coeffs: &'static [i64],
}

const fn row(target: Target, denom: i64, constant: i64, coeffs: &'static [i64]) -> MapRow {
    MapRow { target, denom, constant, coeffs }
}

use Target::{Alpha, Eta};

static ROWS_22: [MapRow; 5] = [
    row(Alpha(0), 2, 1, &[0, 1, -2, 1, 0]),
    row(Alpha(1), 2, 0, &[0, -1, 0, 1, 2]),
    row(Alpha(2), 2, 0, &[1, 0, 1, -2, 0]),
    row(Alpha(3), 2, 1, &[-2, 1, 0, 1, 0]),
    row(Alpha(4), 2, 0, &[0, -1, 0, 1, -2]),
];

static ROWS_31: [MapRow; 4] = [
    row(Alpha(1), 3, 0, &[0, 0, 1, -1, -3]),
    row(Alpha(2), 3, 0, &[0, 1, -2, 1, 0]),
    row(Alpha(3), 3, 1, &[1, -2, 1, 0, 0]),
    row(Alpha(4), 3, 1, &[-2, 1, 0, 1, 0]),
];

static ROWS_41: [MapRow; 5] = [
    row(Alpha(1), 8, 2, &[-2, 1, 0, 0, 1, 0]),
    row(Alpha(2), 8, 2, &[1, -2, 1, 0, 0, 0]),
    row(Alpha(3), 8, 1, &[0, 1, -2, 1, 0, 0]),
    row(Alpha(4), 8, 0, &[0, 0, 1, -1, 0, -4]),
    row(Alpha(5), 8, 1, &[0, 0, 0, -1, 1, 4]),
];

static ROWS_221: [MapRow; 7] = [
    row(Alpha(0), 4, 2, &[-2, 1, 0, 0, 1, 0, 0]),
    row(Alpha(1), 4, 0, &[1, 0, 0, 1, -2, 0, 0]),
    row(Alpha(2), 4, 1, &[0, 0, 1, -2, 1, 0, 0]),
    row(Alpha(3), 4, 0, &[0, 0, -1, 1, 0, 2, -2]),
    row(Alpha(4), 4, 1, &[0, 1, -1, 0, 0, -2, 2]),
    row(Alpha(5), 4, 0, &[1, -2, 1, 0, 0, 0, 0]),
    row(Eta, 4, 0, &[1, -1, 0, 1, -1, 2, 0]),
];

static ROWS_33: [MapRow; 7] = [
    row(Alpha(0), 3, 1, &[-2, 1, 0, 0, 0, 1, 0]),
    row(Alpha(1), 3, 0, &[1, -2, 1, 0, 0, 0, 0]),
    row(Alpha(2), 3, 1, &[0, 1, -2, 1, 0, 0, 0]),
    row(Alpha(3), 3, 0, &[0, 0, 1, -2, 1, 0, 0]),
    row(Alpha(4), 3, 1, &[0, 0, 0, 1, -2, 1, 0]),
    row(Alpha(5), 3, 0, &[1, 0, 0, 0, 1, -2, 0]),
    row(Eta, 3, 0, &[1, -1, 1, -1, 1, -1, 3]),
];

impl Reduction {
    pub const ALL: [Reduction; 5] = [Reduction::P22, Reduction::P31, Reduction::P41, Reduction::P221, Reduction::P33];

    pub fn from_partition(p: &Partition) -> Result<Self> {
        Ok(match p.parts() {
            [2, 2] => Reduction::P22,
            [3, 1] => Reduction::P31,
            [4, 1] => Reduction::P41,
            [2, 2, 1] => Reduction::P221,
            [3, 3] => Reduction::P33,
            _ => return Err(Error::InvalidPartition(format!("no Lax pair is implemented for {p}"))),
        })
    }

    pub fn partition(self) -> Partition {
        let parts = match self {
            Reduction::P22 => vec![2, 2],
            Reduction::P31 => vec![3, 1],
            Reduction::P41 => vec![4, 1],
            Reduction::P221 => vec![2, 2, 1],
            Reduction::P33 => vec![3, 3],
        };
        Partition::new(parts).expect("valid partition")
    }

    pub fn system(self) -> SystemId {
        match self {
            Reduction::P22 => SystemId::P6,
            Reduction::P31 => SystemId::A4,
            Reduction::P41 => SystemId::A5,
            Reduction::P221 | Reduction::P33 => SystemId::CP6,
        }
    }

    /// The reduction used by default for a system; D6 has none.
    pub fn for_system(system: SystemId) -> Option<Self> {
        match system {
            SystemId::P6 => Some(Reduction::P22),
            SystemId::A4 => Some(Reduction::P31),
            SystemId::A5 => Some(Reduction::P41),
            SystemId::CP6 => Some(Reduction::P33),
            SystemId::D6 => None,
        }
    }

    pub fn rank(self) -> usize {
        self.partition().rank()
    }

    pub fn kappa_count(self) -> usize {
        self.rank() + 1
    }

    pub fn rho_count(self) -> usize {
        if self == Reduction::P221 {
            2
        } else {
            1
        }
    }

    pub fn gauge_names(self) -> &'static [&'static str] {
        match self {
            Reduction::P22 => &["w1"],
            Reduction::P31 | Reduction::P41 => &["phi12"],
            Reduction::P221 => &["phi3", "phi34"],
            Reduction::P33 => &["w3"],
        }
    }

    fn rows(self) -> &'static [MapRow] {
        match self {
            Reduction::P22 => &ROWS_22,
            Reduction::P31 => &ROWS_31,
            Reduction::P41 => &ROWS_41,
            Reduction::P221 => &ROWS_221,
            Reduction::P33 => &ROWS_33,
        }
    }

    /// α_0 is fixed by Σα = 1.
    fn alpha0_derived(self) -> bool {
        matches!(self, Reduction::P31 | Reduction::P41)
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.partition().fmt(f)
    }
}

impl FromStr for Reduction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Reduction::from_partition(&s.parse()?)
    }
}

impl Serialize for Reduction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn unknowns(raw: &RawReduction) -> Vec<Rational> {
    raw.kappas.iter().chain(&raw.rhos).cloned().collect()
}

fn eval_row(r: &MapRow, x: &[Rational]) -> Rational {
    let num = r
        .coeffs
        .iter()
        .zip(x)
        .fold(Rational::from_integer(r.constant), |acc, (c, v)| acc + Rational::from_integer(*c) * v.clone());
    num.checked_div(&Rational::from_integer(r.denom)).expect("nonzero denominator")
}

/// The linear map (κ, ρ) ↦ (α, η) of a reduction.
pub fn params_from_reduction(red: Reduction, kappas: &[Rational], rhos: &[Rational]) -> Result<PainleveParams> {
    if kappas.len() != red.kappa_count() {
        return Err(Error::Arity { what: "kappas", expected: red.kappa_count(), got: kappas.len() });
    }
    if rhos.len() != red.rho_count() {
        return Err(Error::Arity { what: "rhos", expected: red.rho_count(), got: rhos.len() });
    }
    let raw = RawReduction { kappas: kappas.to_vec(), rhos: rhos.to_vec() };
    let x = unknowns(&raw);
    let system = red.system();
    let mut alphas = vec![Rational::zero(); system.alpha_count()];
    let mut eta = None;
    for r in red.rows() {
        let v = eval_row(r, &x);
        match r.target {
            Alpha(i) => alphas[i] = v,
            Eta => eta = Some(v),
        }
    }
    if red.alpha0_derived() {
        let rest = alphas[1..].iter().fold(Rational::zero(), |a, x| a + x.clone());
        alphas[0] = Rational::one() - rest;
    }
    let mut params = PainleveParams::new(system, alphas, eta)?;
    params.raw = Some(raw);
    Ok(params)
}

/// Weights w with Σ w_i α_i = 1 the normalization of the target system.
pub fn normalization_weights(red: Reduction) -> Vec<i64> {
    match red {
        Reduction::P22 => vec![1, 1, 2, 1, 1],
        _ => vec![1; red.system().alpha_count()],
    }
}

/// Σ w_i α_i as an affine form in (κ, ρ): (constant, coefficient per
/// unknown). The normalization holds identically iff this is (1, 0, ..., 0).
pub fn normalization_form(red: Reduction) -> (Rational, Vec<Rational>) {
    let nu = red.kappa_count() + red.rho_count();
    if red.alpha0_derived() {
        return (Rational::one(), vec![Rational::zero(); nu]);
    }
    let w = normalization_weights(red);
    let mut constant = Rational::zero();
    let mut coeffs = vec![Rational::zero(); nu];
    for r in red.rows() {
        let Alpha(i) = r.target else { continue };
        let scale = Rational::frac(w[i], r.denom);
        constant = constant + scale.clone() * Rational::from_integer(r.constant);
        for (c, k) in coeffs.iter_mut().zip(r.coeffs) {
            *c = c.clone() + scale.clone() * Rational::from_integer(*k);
        }
    }
    (constant, coeffs)
}

/// Preimage of (α, η) with the common κ shift fixed by κ_0 = 0.
pub fn params_to_reduction(red: Reduction, params: &PainleveParams) -> Result<RawReduction> {
    if params.system != red.system() {
        return Err(Error::Domain(format!("{red} reduces to {}, not {}", red.system(), params.system)));
    }
    let nk = red.kappa_count();
    let nu = nk + red.rho_count();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut gauge = vec![Rational::zero(); nu];
    gauge[0] = Rational::one();
    a.push(gauge);
    b.push(Rational::zero());
    for r in red.rows() {
        let target = match r.target {
            Alpha(i) => params.alphas[i].clone(),
            Eta => params.eta(),
        };
        a.push(r.coeffs.iter().map(|c| Rational::from_integer(*c)).collect());
        b.push(target * Rational::from_integer(r.denom) - Rational::from_integer(r.constant));
    }
    if red.alpha0_derived() && params.alpha_sum() != Rational::one() {
        return Err(Error::Inconsistent(format!("alphas sum to {}, expected 1", params.alpha_sum())));
    }
    let x = crate::exact_numerics::solve_linear(a, b)?;
    Ok(RawReduction { kappas: x[..nk].to_vec(), rhos: x[nk..].to_vec() })
}

/// d/dt log g for each gauge variable g of the reduction.
pub fn pfaffian_log_derivative<S: Scalar>(
    red: Reduction,
    x: &PhasePoint<S>,
    params: &PainleveParams,
) -> Result<Vec<(&'static str, S)>> {
    params.check_point(x)?;
    if params.system != red.system() {
        return Err(Error::Domain(format!("{red} needs {} parameters", red.system())));
    }
    let a: Vec<S> = params.alphas.iter().map(S::from_rational).collect();
    let eta = S::from_rational(&params.eta());
    let t = x.t.clone();
    let one = S::one();
    let fr = |n, d| S::frac(n, d);
    let tt1 = t.clone() * (t.clone() - one.clone());
    Ok(match red {
        Reduction::P22 => {
            let (q, p) = (x.q[0].clone(), x.p[0].clone());
            let rhs = -((q.clone() - one.clone()) * (q.clone() - t.clone()) * p) - a[2].clone() * q
                + fr(1, 4) * (one.clone() + fr(2, 1) * a[1].clone() - fr(2, 1) * a[3].clone() - fr(4, 1) * a[4].clone()) * t
                - fr(1, 4) * (one - fr(2, 1) * a[1].clone() - fr(4, 1) * a[2].clone() - fr(2, 1) * a[3].clone());
            vec![("w1", div(&rhs, &tt1, "t(t-1)")?)]
        }
        Reduction::P31 => {
            vec![("phi12", x.p[0].clone() + x.p[1].clone() - fr(2, 3) * t)]
        }
        Reduction::P41 => {
            let (q1, p1, q2, p2) = (x.q[0].clone(), x.p[0].clone(), x.q[1].clone(), x.p[1].clone());
            let rhs = -(q1 * p1) - q2.clone() * p2 - t.clone() * q2 + fr(3, 4) * t.clone()
                - fr(1, 4) * (one - fr(2, 1) * (a[1].clone() + a[3].clone() + a[5].clone()));
            vec![("phi12", div(&rhs, &t, "t")?)]
        }
        Reduction::P221 => {
            let (q1, p1, q2, p2) = (x.q[0].clone(), x.p[0].clone(), x.q[1].clone(), x.p[1].clone());
            let two = fr(2, 1);
            let r3 = -(q1.clone() * (q1.clone() - t.clone()) * p1.clone())
                - q2.clone() * (q2.clone() - t.clone()) * p2.clone()
                - a[1].clone() * q1.clone()
                - a[5].clone() * q2.clone()
                + fr(1, 4)
                    * (one.clone() + two.clone() * a[2].clone()
                        - two.clone() * a[3].clone()
                        - two.clone() * a[4].clone()
                        - two.clone() * a[5].clone()
                        + fr(6, 1) * eta.clone())
                    * t.clone()
                - fr(1, 4)
                    * (one + two.clone() * a[2].clone() + two.clone() * a[3].clone()
                        - two.clone() * a[4].clone()
                        - two.clone() * a[5].clone()
                        + two * eta.clone());
            let r34 = -((q1 - t.clone()) * p1) - (q2 - t) * p2 - eta;
            vec![("phi3", div(&r3, &tt1, "t(t-1)")?), ("phi34", div(&r34, &tt1, "t(t-1)")?)]
        }
        Reduction::P33 => {
            let (q1, p1, q2, p2) = (x.q[0].clone(), x.p[0].clone(), x.q[1].clone(), x.p[1].clone());
            let two = fr(2, 1);
            let rhs = -((q1.clone() - one.clone()) * (q1.clone() - t.clone()) * p1)
                - (q2.clone() - one.clone()) * (q2.clone() - t.clone()) * p2
                - a[1].clone() * q1
                - a[5].clone() * q2
                + fr(1, 3) * (a[1].clone() + a[2].clone() - a[3].clone() - a[4].clone() + two.clone() * eta.clone()) * t
                - fr(1, 3)
                    * (a[1].clone() + a[2].clone() + two * a[3].clone() - a[4].clone() - fr(4, 1) * eta);
            vec![("w3", div(&rhs, &tt1, "t(t-1)")?)]
        }
    })
}
