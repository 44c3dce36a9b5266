use super::element::{e, LoopElement};
use super::matrix::{Laurent, Mat};
use crate::error::{Error, Result};
use crate::exact_numerics::{Rational, Scalar};

/// Grade operator ϑ = N (z d/dz + ad η) with η diagonal and z-free.
#[derive(Clone, Debug, PartialEq)]
pub struct GradationSpec {
    n: usize,
    scale: i64,
    eta: Vec<Rational>,
    s: Vec<i64>,
}

impl GradationSpec {
    /// `eta` is the diagonal of η; it is shifted to be traceless. The type
    /// s is read off from ϑ(e_i) and must be non-negative integers.
    pub fn new(n: usize, scale: i64, eta: Vec<Rational>) -> Result<Self> {
        if eta.len() != n + 1 {
            return Err(Error::Arity { what: "eta entries", expected: n + 1, got: eta.len() });
        }
        if scale <= 0 {
            return Err(Error::Domain("grade scale N must be positive".into()));
        }
        let mean = eta.iter().fold(Rational::zero(), |a, x| a + x.clone())
            .checked_div(&Rational::from_integer(n as i64 + 1))?;
        let eta = eta.into_iter().map(|x| x - mean.clone()).collect();
        let mut spec = GradationSpec { n, scale, eta, s: Vec::new() };
        let mut s = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let ei = e::<Rational>(n, i)?;
            let img = spec.apply_theta(&ei)?;
            let (row, col, deg) = if i == 0 { (n, 0, 1) } else { (i - 1, i, 0) };
            let d = img.matrix().entry(row, col, deg);
            if !d.is_integer() || d.is_negative() {
                return Err(Error::Inconsistent(format!("ϑ(e_{i}) = {d}·e_{i} is not a non-negative integer degree")));
            }
            s.push(d.numer().try_into().map_err(|_| Error::Inconsistent("degree overflow".into()))?);
        }
        spec.s = s;
        Ok(spec)
    }

    /// The gradation of type s: N = Σ s_i and η_i − η_{i+1} = s_i / N.
    pub fn from_type(s: &[i64]) -> Result<Self> {
        if s.len() < 2 || s.iter().any(|x| *x < 0) || s.iter().all(|x| *x == 0) {
            return Err(Error::Domain("gradation type needs n+1 >= 2 non-negative entries, not all zero".into()));
        }
        let n = s.len() - 1;
        let total: i64 = s.iter().sum();
        let mut eta = vec![Rational::zero()];
        for i in 1..=n {
            let step = Rational::frac(s[i], total);
            eta.push(eta[i - 1].clone() - step);
        }
        Self::new(n, total, eta)
    }

    pub fn principal(n: usize) -> Self {
        Self::from_type(&vec![1; n + 1]).expect("principal type is valid")
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn s(&self) -> &[i64] {
        &self.s
    }

    pub fn eta_diagonal(&self) -> &[Rational] {
        &self.eta
    }

    pub fn eta<S: Scalar>(&self) -> LoopElement<S> {
        let m = Mat::diagonal(self.eta.iter().map(S::from_rational).collect());
        LoopElement::from_matrix(self.n, Laurent::monomial(0, m)).expect("traceless diagonal")
    }

    /// N·(z d/dz X + [η, X]) on the matrix part; K and d are annihilated.
    pub fn apply_theta<S: Scalar>(&self, x: &LoopElement<S>) -> Result<LoopElement<S>> {
        if x.rank() != self.n {
            return Err(Error::RankMismatch(self.n, x.rank()));
        }
        let d = self.n + 1;
        let eta: Vec<S> = self.eta.iter().map(S::from_rational).collect();
        let big_n = S::from_int(self.scale);
        let mut out = Laurent::zero(d);
        for (k, m) in x.matrix().blocks() {
            let kk = S::from_int(*k as i64);
            let mut img = Mat::zeros(d);
            for (i, j, v) in m.nonzeros() {
                let w = kk.clone() + eta[i].clone() - eta[j].clone();
                img.set(i, j, big_n.clone() * w * v.clone());
            }
            out.add_block(*k, img);
        }
        LoopElement::from_matrix(self.n, out)
    }
}
