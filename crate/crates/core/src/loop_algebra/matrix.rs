use std::collections::BTreeMap;
use std::fmt;

use crate::exact_numerics::Scalar;

/// Dense square matrix, row-major, 0-based indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    /// The matrix unit E_{i,j} (0-based) scaled by `c`.
    pub fn unit(n: usize, i: usize, j: usize, c: S) -> Self {
        let mut m = Self::zeros(n);
        m.set(i, j, c);
        m
    }

    pub fn diagonal(d: Vec<S>) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, x) in d.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: S) {
        let k = i * self.n + j;
        self.data[k] = self.data[k].clone() + v;
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        Mat { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, a.clone() * b.clone());
                    }
                }
            }
        }
        out
    }

    /// Entries as (row, col, value) for every nonzero entry.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(k, x)| (k / self.n, k % self.n, x))
    }
}

impl<S: Scalar> std::ops::Add for Mat<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a.clone() + b.clone())
    }
}

impl<S: Scalar> std::ops::Sub for Mat<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a.clone() - b.clone())
    }
}

impl<S: Scalar> fmt::Display for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Matrix with Laurent-polynomial entries in z, stored by z-degree.
/// Zero blocks are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<S> {
    n: usize,
    blocks: BTreeMap<i32, Mat<S>>,
}

impl<S: Scalar> Laurent<S> {
    pub fn zero(n: usize) -> Self {
        Laurent { n, blocks: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::monomial(0, Mat::identity(n))
    }

    pub fn monomial(deg: i32, m: Mat<S>) -> Self {
        let mut out = Self::zero(m.dim());
        out.add_block(deg, m);
        out
    }

    /// c·z^deg·E_{i,j}, 0-based.
    pub fn unit(n: usize, deg: i32, i: usize, j: usize, c: S) -> Self {
        Self::monomial(deg, Mat::unit(n, i, j, c))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &BTreeMap<i32, Mat<S>> {
        &self.blocks
    }

    pub fn block(&self, deg: i32) -> Option<&Mat<S>> {
        self.blocks.get(&deg)
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.blocks.keys().copied().collect()
    }

    pub fn entry(&self, i: usize, j: usize, deg: i32) -> S {
        self.blocks.get(&deg).map(|m| m.get(i, j).clone()).unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn add_block(&mut self, deg: i32, m: Mat<S>) {
        assert_eq!(m.dim(), self.n, "matrix size mismatch");
        let sum = match self.blocks.remove(&deg) {
            Some(old) => old + m,
            None => m,
        };
        if !sum.is_zero() {
            self.blocks.insert(deg, sum);
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Laurent<T> {
        let mut out = Laurent::zero(self.n);
        for (k, m) in &self.blocks {
            out.add_block(*k, m.map(&f));
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (k, a) in &self.blocks {
            for (l, b) in &other.blocks {
                out.add_block(k + l, a.matmul(b));
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other) - other.matmul(self)
    }

    /// z d/dz.
    pub fn z_deriv(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (k, m) in &self.blocks {
            out.add_block(*k, m.scale(&S::from_int(*k as i64)));
        }
        out
    }

    /// Exact for exact backends; float traces may be off by rounding
    /// relative to the largest entry.
    pub fn is_traceless(&self) -> bool {
        self.blocks.values().all(|m| {
            let tr = m.trace();
            if tr.is_zero() {
                return true;
            }
            let scale = m.nonzeros().map(|(_, _, v)| v.magnitude()).fold(1.0, f64::max);
            tr.magnitude() <= 1e-9 * scale
        })
    }

    /// Plain-text rendering, one z-degree per line.
    pub fn render(&self) -> String {
        if self.blocks.is_empty() {
            return "0".into();
        }
        self.blocks
            .iter()
            .map(|(k, m)| format!("z^{k}: {m}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl<S: Scalar> std::ops::Add for Laurent<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (k, m) in rhs.blocks {
            self.add_block(k, m);
        }
        self
    }
}

impl<S: Scalar> std::ops::Neg for Laurent<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x.clone())
    }
}

impl<S: Scalar> std::ops::Sub for Laurent<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}
