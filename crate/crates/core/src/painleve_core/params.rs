use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_numerics::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemId {
    A4,
    A5,
    D6,
    CP6,
    P6,
}

impl SystemId {
    pub const ALL: [SystemId; 5] = [SystemId::A4, SystemId::A5, SystemId::D6, SystemId::CP6, SystemId::P6];

    pub fn alpha_count(self) -> usize {
        match self {
            SystemId::A4 | SystemId::P6 => 5,
            SystemId::A5 | SystemId::CP6 => 6,
            SystemId::D6 => 7,
        }
    }

    /// Number of (q, p) pairs.
    pub fn pairs(self) -> usize {
        match self {
            SystemId::P6 => 1,
            _ => 2,
        }
    }

    pub fn has_eta(self) -> bool {
        self == SystemId::CP6
    }

    /// Fixed singular times.
    pub fn singular_times(self) -> &'static [i64] {
        match self {
            SystemId::A4 => &[],
            SystemId::A5 => &[0],
            _ => &[0, 1],
        }
    }

    pub(crate) fn prefactor_name(self) -> &'static str {
        match self {
            SystemId::A4 => "1",
            SystemId::A5 => "t",
            _ => "t(t-1)",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemId::A4 => "a4",
            SystemId::A5 => "a5",
            SystemId::D6 => "d6",
            SystemId::CP6 => "cp6",
            SystemId::P6 => "p6",
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for SystemId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for SystemId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SystemId::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown system `{s}` (expected a4, a5, d6, cp6 or p6)")))
    }
}

/// The κ's and ρ's of a reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RawReduction {
    pub kappas: Vec<Rational>,
    pub rhos: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PainleveParams {
    pub system: SystemId,
    pub alphas: Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawReduction>,
}

impl PainleveParams {
    pub fn new(system: SystemId, alphas: Vec<Rational>, eta: Option<Rational>) -> Result<Self> {
        if alphas.len() != system.alpha_count() {
            return Err(Error::Arity { what: "alphas", expected: system.alpha_count(), got: alphas.len() });
        }
        if system.has_eta() != eta.is_some() {
            return Err(Error::Domain(format!("eta is {} for {system}", if system.has_eta() { "required" } else { "not used" })));
        }
        Ok(PainleveParams { system, alphas, eta, raw: None })
    }

    pub fn alpha(&self, i: usize) -> &Rational {
        &self.alphas[i]
    }

    pub fn eta(&self) -> Rational {
        self.eta.clone().unwrap_or_default()
    }

    pub fn alpha_sum(&self) -> Rational {
        self.alphas.iter().fold(Rational::zero(), |a, x| a + x.clone())
    }

    pub(crate) fn check_point<S: Scalar>(&self, x: &PhasePoint<S>) -> Result<()> {
        let m = self.system.pairs();
        if x.q.len() != m || x.p.len() != m {
            return Err(Error::Arity { what: "canonical pairs", expected: m, got: x.q.len().min(x.p.len()) });
        }
        Ok(())
    }
}

/// Canonical coordinates and time.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<S> {
    pub q: Vec<S>,
    pub p: Vec<S>,
    pub t: S,
}

impl<S: Scalar> PhasePoint<S> {
    pub fn new(q: Vec<S>, p: Vec<S>, t: S) -> Self {
        PhasePoint { q, p, t }
    }

    /// (q1, p1, q2, p2, ...)
    pub fn interleaved(&self) -> Vec<S> {
        self.q.iter().zip(&self.p).flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
    }

    pub fn from_interleaved(v: &[S], t: S) -> Self {
        PhasePoint {
            q: v.iter().step_by(2).cloned().collect(),
            p: v.iter().skip(1).step_by(2).cloned().collect(),
            t,
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PhasePoint<T> {
        PhasePoint { q: self.q.iter().map(&f).collect(), p: self.p.iter().map(&f).collect(), t: f(&self.t) }
    }
}
