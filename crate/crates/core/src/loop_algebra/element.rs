use std::fmt;

use super::matrix::{Laurent, Mat};
use crate::error::{Error, Result};
use crate::exact_numerics::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    E,
    F,
    H,
}

/// Element of the affine algebra of type A_n^(1): a traceless Laurent
/// matrix of size n+1 plus the coefficients of K and d.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopElement<S> {
    rank: usize,
    mat: Laurent<S>,
    c_k: S,
    c_d: S,
}

impl<S: Scalar> LoopElement<S> {
    pub fn zero(rank: usize) -> Self {
        LoopElement { rank, mat: Laurent::zero(rank + 1), c_k: S::zero(), c_d: S::zero() }
    }

    pub fn new(rank: usize, mat: Laurent<S>, c_k: S, c_d: S) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Domain("rank must be at least 1".into()));
        }
        if mat.dim() != rank + 1 {
            return Err(Error::RankMismatch(rank, mat.dim().saturating_sub(1)));
        }
        if !mat.is_traceless() {
            return Err(Error::Domain("loop algebra elements must be traceless".into()));
        }
        Ok(LoopElement { rank, mat, c_k, c_d })
    }

    pub fn from_matrix(rank: usize, mat: Laurent<S>) -> Result<Self> {
        Self::new(rank, mat, S::zero(), S::zero())
    }

    pub fn central(rank: usize) -> Self {
        LoopElement { c_k: S::one(), ..Self::zero(rank) }
    }

    pub fn scaling(rank: usize) -> Self {
        LoopElement { c_d: S::one(), ..Self::zero(rank) }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &Laurent<S> {
        &self.mat
    }

    pub fn c_k(&self) -> &S {
        &self.c_k
    }

    pub fn c_d(&self) -> &S {
        &self.c_d
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero() && self.c_k.is_zero() && self.c_d.is_zero()
    }

    /// Drop K and d: the evaluation representation.
    pub fn evaluation(&self) -> Self {
        LoopElement { rank: self.rank, mat: self.mat.clone(), c_k: S::zero(), c_d: S::zero() }
    }

    pub fn scale(&self, c: &S) -> Self {
        LoopElement {
            rank: self.rank,
            mat: self.mat.scale(c),
            c_k: self.c_k.clone() * c.clone(),
            c_d: self.c_d.clone() * c.clone(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        same_rank(self, other)?;
        Ok(LoopElement {
            rank: self.rank,
            mat: self.mat.clone() + other.mat.clone(),
            c_k: self.c_k.clone() + other.c_k.clone(),
            c_d: self.c_d.clone() + other.c_d.clone(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-S::one()))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LoopElement<T> {
        LoopElement { rank: self.rank, mat: self.mat.map(&f), c_k: f(&self.c_k), c_d: f(&self.c_d) }
    }

    /// Matrix-part product, e.g. Λ² in a Lax matrix. The result is only
    /// an algebra element when it stays traceless.
    pub fn matrix_product(&self, other: &Self) -> Result<Self> {
        same_rank(self, other)?;
        Self::from_matrix(self.rank, self.mat.matmul(&other.mat))
    }

    pub fn render(&self) -> String {
        let mut s = self.mat.render();
        if !self.c_k.is_zero() {
            s.push_str(&format!("\nK: {}", self.c_k));
        }
        if !self.c_d.is_zero() {
            s.push_str(&format!("\nd: {}", self.c_d));
        }
        s
    }
}

impl<S: Scalar> fmt::Display for LoopElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn same_rank<S>(a: &LoopElement<S>, b: &LoopElement<S>) -> Result<()> {
    if a.rank == b.rank {
        Ok(())
    } else {
        Err(Error::RankMismatch(a.rank, b.rank))
    }
}

fn check_index(n: usize, i: usize) -> Result<()> {
    if i <= n {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, max: n })
    }
}

/// Chevalley generators in the matrix realization.
pub fn chevalley<S: Scalar>(n: usize, i: usize, kind: Generator) -> Result<LoopElement<S>> {
    check_index(n, i)?;
    let d = n + 1;
    let one = S::one;
    let mat = match (kind, i) {
        (Generator::E, 0) => Laurent::unit(d, 1, n, 0, one()),
        (Generator::F, 0) => Laurent::unit(d, -1, 0, n, one()),
        (Generator::H, 0) => Laurent::unit(d, 0, n, n, one()) + Laurent::unit(d, 0, 0, 0, -one()),
        (Generator::E, i) => Laurent::unit(d, 0, i - 1, i, one()),
        (Generator::F, i) => Laurent::unit(d, 0, i, i - 1, one()),
        (Generator::H, i) => Laurent::unit(d, 0, i - 1, i - 1, one()) + Laurent::unit(d, 0, i, i, -one()),
    };
    let c_k = if kind == Generator::H && i == 0 { one() } else { S::zero() };
    LoopElement::new(n, mat, c_k, S::zero())
}

pub fn e<S: Scalar>(n: usize, i: usize) -> Result<LoopElement<S>> {
    chevalley(n, i, Generator::E)
}

pub fn f<S: Scalar>(n: usize, i: usize) -> Result<LoopElement<S>> {
    chevalley(n, i, Generator::F)
}

pub fn h<S: Scalar>(n: usize, i: usize) -> Result<LoopElement<S>> {
    chevalley(n, i, Generator::H)
}

/// Central term of Σ_k k·tr(A_k B_{-k}).
fn cocycle<S: Scalar>(a: &Laurent<S>, b: &Laurent<S>, weighted: bool) -> S {
    let mut acc = S::zero();
    for (k, ma) in a.blocks() {
        if let Some(mb) = b.block(-k) {
            let tr = ma.matmul(mb).trace();
            acc = acc + if weighted { tr * S::from_int(*k as i64) } else { tr };
        }
    }
    acc
}

/// Lie bracket with central extension; d acts as z d/dz.
pub fn bracket<S: Scalar>(a: &LoopElement<S>, b: &LoopElement<S>) -> Result<LoopElement<S>> {
    same_rank(a, b)?;
    let mut mat = a.mat.commutator(&b.mat);
    if !a.c_d.is_zero() {
        mat = mat + b.mat.z_deriv().scale(&a.c_d);
    }
    if !b.c_d.is_zero() {
        mat = mat - a.mat.z_deriv().scale(&b.c_d);
    }
    let c_k = cocycle(&a.mat, &b.mat, true);
    Ok(LoopElement { rank: a.rank, mat, c_k, c_d: S::zero() })
}

/// Normalized invariant form: residue of the trace plus the K–d pairing.
pub fn invariant_form<S: Scalar>(a: &LoopElement<S>, b: &LoopElement<S>) -> Result<S> {
    same_rank(a, b)?;
    Ok(cocycle(&a.mat, &b.mat, false) + a.c_k.clone() * b.c_d.clone() + a.c_d.clone() * b.c_k.clone())
}

/// e_{i1,...,im} = ad e_{i1} ... ad e_{i(m-1)} (e_{im}).
pub fn ad_word<S: Scalar>(n: usize, indices: &[usize]) -> Result<LoopElement<S>> {
    word(n, indices, Generator::E)
}

/// The mirrored word in the f generators.
pub fn ad_word_f<S: Scalar>(n: usize, indices: &[usize]) -> Result<LoopElement<S>> {
    word(n, indices, Generator::F)
}

fn word<S: Scalar>(n: usize, indices: &[usize], kind: Generator) -> Result<LoopElement<S>> {
    let (last, rest) = indices
        .split_last()
        .ok_or_else(|| Error::Domain("ad word needs at least one index".into()))?;
    let mut x = chevalley(n, *last, kind)?;
    for &i in rest.iter().rev() {
        x = bracket(&chevalley(n, i, kind)?, &x)?;
    }
    Ok(x)
}

/// Matrix with a single entry, as a Laurent matrix; 1-based indices as in E_{i,j}.
pub fn matrix_unit<S: Scalar>(n: usize, i: usize, j: usize, deg: i32) -> Laurent<S> {
    Laurent::monomial(deg, Mat::unit(n + 1, i - 1, j - 1, S::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_numerics::Rational;

    type Q = Rational;

    #[test]
    fn generators() {
        let e1 = e::<Q>(3, 1).unwrap();
        assert_eq!(e1.matrix(), &matrix_unit(3, 1, 2, 0));
        let e0 = e::<Q>(3, 0).unwrap();
        assert_eq!(e0.matrix(), &matrix_unit(3, 4, 1, 1));
        let h0 = h::<Q>(3, 0).unwrap();
        assert_eq!(h0.matrix(), &(matrix_unit(3, 4, 4, 0) - matrix_unit(3, 1, 1, 0)));
        assert_eq!(h0.c_k(), &Q::one());
        assert!(e::<Q>(3, 4).is_err());
    }

    #[test]
    fn bracket_examples() {
        let n = 3;
        assert_eq!(bracket(&e::<Q>(n, 1).unwrap(), &f(n, 1).unwrap()).unwrap(), h(n, 1).unwrap());
        assert_eq!(bracket(&e::<Q>(n, 0).unwrap(), &f(n, 0).unwrap()).unwrap(), h(n, 0).unwrap());
        let d = LoopElement::<Q>::scaling(n);
        assert_eq!(bracket(&d, &e(n, 0).unwrap()).unwrap(), e(n, 0).unwrap());
        assert!(bracket(&d, &e::<Q>(n, 2).unwrap()).unwrap().is_zero());
        assert!(bracket(&e::<Q>(3, 1).unwrap(), &e(4, 1).unwrap()).is_err());
    }

    #[test]
    fn form_examples() {
        let n = 3;
        let ip = |a: LoopElement<Q>, b: LoopElement<Q>| invariant_form(&a, &b).unwrap();
        assert_eq!(ip(h(n, 1).unwrap(), h(n, 2).unwrap()), Q::from_integer(-1));
        assert_eq!(ip(h(n, 1).unwrap(), h(n, 1).unwrap()), Q::from_integer(2));
        assert_eq!(ip(h(n, 0).unwrap(), h(n, 0).unwrap()), Q::from_integer(2));
        assert_eq!(ip(h(n, 0).unwrap(), h(n, 3).unwrap()), Q::from_integer(-1));
        assert_eq!(ip(e(n, 1).unwrap(), f(n, 1).unwrap()), Q::one());
        assert_eq!(ip(e(n, 0).unwrap(), f(n, 0).unwrap()), Q::one());
        assert_eq!(ip(e(n, 0).unwrap(), f(n, 1).unwrap()), Q::zero());
        let d = LoopElement::<Q>::scaling(n);
        assert_eq!(ip(d.clone(), d.clone()), Q::zero());
        assert_eq!(ip(d.clone(), h(n, 0).unwrap()), Q::one());
        assert_eq!(ip(d, h(n, 2).unwrap()), Q::zero());
    }

    #[test]
    fn words() {
        assert_eq!(ad_word::<Q>(3, &[2]).unwrap(), e(3, 2).unwrap());
        let w = ad_word::<Q>(3, &[2, 3]).unwrap();
        assert_eq!(w.matrix(), &matrix_unit(3, 2, 4, 0));
        // e_{5,0} = [E_{5,6}, z E_{6,1}] = z E_{5,1}
        let w = ad_word::<Q>(5, &[5, 0]).unwrap();
        assert_eq!(w.matrix(), &matrix_unit(5, 5, 1, 1));
        assert_eq!(ad_word::<Q>(5, &[1, 2]).unwrap().matrix(), &matrix_unit(5, 1, 3, 0));
        let fw = ad_word_f::<Q>(3, &[2, 3]).unwrap();
        assert_eq!(fw.matrix(), &(-matrix_unit::<Q>(3, 4, 2, 0)));
        assert!(ad_word::<Q>(3, &[]).is_err());
    }

    #[test]
    fn traceless_enforced() {
        assert!(LoopElement::<Q>::from_matrix(2, matrix_unit(2, 1, 1, 0)).is_err());
    }
}
