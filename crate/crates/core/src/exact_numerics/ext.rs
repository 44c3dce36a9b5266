use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::{Rational, Scalar};
use crate::error::{Error, Result};

/// `name^power = base` with a rational base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSymbol {
    pub name: String,
    pub power: u32,
    pub base: Rational,
}

/// A tower of pure root symbols over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    symbols: Vec<RootSymbol>,
}

impl Extension {
    pub fn new(symbols: Vec<RootSymbol>) -> Result<Arc<Self>> {
        for (i, s) in symbols.iter().enumerate() {
            if s.power < 2 {
                return Err(Error::Domain(format!("root symbol {} needs power >= 2", s.name)));
            }
            if s.base.is_zero() {
                return Err(Error::Domain(format!("root symbol {} has zero base", s.name)));
            }
            if symbols[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::Domain(format!("root symbol {} declared twice", s.name)));
            }
        }
        Ok(Arc::new(Extension { symbols }))
    }

    pub fn single(name: &str, power: u32, base: Rational) -> Result<Arc<Self>> {
        Self::new(vec![RootSymbol { name: name.to_string(), power, base }])
    }

    pub fn symbols(&self) -> &[RootSymbol] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UndeclaredSymbol(name.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.symbols.iter().map(|s| s.power as usize).product()
    }

    fn basis(&self) -> Vec<Mono> {
        let mut out = vec![Vec::new()];
        for (j, s) in self.symbols.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * s.power as usize);
            for m in &out {
                for e in 0..s.power {
                    let mut m2 = m.clone();
                    m2.resize(j + 1, 0);
                    m2[j] = e;
                    next.push(trim(m2));
                }
            }
            out = next;
        }
        out
    }

    /// Principal numeric value of each symbol.
    pub fn numeric_values(&self) -> Vec<Complex64> {
        self.symbols
            .iter()
            .map(|s| Complex64::root(&Complex64::from_rational(&s.base), s.power, &s.name).unwrap_or_default())
            .collect()
    }
}

type Mono = Vec<u32>;

fn trim(mut m: Mono) -> Mono {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

/// Element of Q(root symbols), stored reduced: every exponent is below the
/// declared power of its symbol.
///
/// Elements without root symbols carry no extension and combine with any
/// extension. Combining two different extensions panics.
#[derive(Clone)]
pub struct ExtScalar {
    ext: Option<Arc<Extension>>,
    terms: BTreeMap<Mono, Rational>,
}

impl ExtScalar {
    pub fn rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Vec::new(), r);
        }
        ExtScalar { ext: None, terms }
    }

    pub fn symbol(ext: &Arc<Extension>, name: &str) -> Result<Self> {
        Self::from_monomials(ext, &[(&[(name, 1)], Rational::one())])
    }

    /// Build from unreduced monomials and reduce them modulo the extension.
    pub fn from_monomials(ext: &Arc<Extension>, terms: &[(&[(&str, u32)], Rational)]) -> Result<Self> {
        let mut out = ExtScalar { ext: Some(ext.clone()), terms: BTreeMap::new() };
        for (mono, c) in terms {
            let mut m = vec![0u32; ext.symbols.len()];
            for (name, e) in mono.iter() {
                m[ext.index_of(name)?] += e;
            }
            out.accumulate(m, c.clone());
        }
        Ok(out.normalized())
    }

    pub fn extension(&self) -> Option<&Arc<Extension>> {
        self.ext.as_ref()
    }

    /// The rational value if no root symbol survives reduction.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn coefficient(&self, mono: &[(&str, u32)]) -> Result<Rational> {
        let mut m = Vec::new();
        if let Some(ext) = &self.ext {
            m = vec![0u32; ext.symbols.len()];
            for (name, e) in mono {
                m[ext.index_of(name)?] = *e;
            }
        } else if let Some((name, _)) = mono.iter().find(|(_, e)| *e > 0) {
            return Err(Error::UndeclaredSymbol(name.to_string()));
        }
        Ok(self.terms.get(&trim(m)).cloned().unwrap_or_default())
    }

    /// Numeric image with every symbol replaced by its principal value.
    pub fn to_complex(&self) -> Complex64 {
        let vals = self.ext.as_ref().map(|e| e.numeric_values()).unwrap_or_default();
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .enumerate()
                    .fold(Complex64::from_rational(c), |acc, (j, e)| acc * vals[j].powu(*e))
            })
            .sum()
    }

    fn accumulate(&mut self, mut m: Mono, mut c: Rational) {
        if let Some(ext) = &self.ext {
            for (j, s) in ext.symbols.iter().enumerate() {
                if j >= m.len() {
                    break;
                }
                while m[j] >= s.power {
                    m[j] -= s.power;
                    c = c * s.base.clone();
                }
            }
        }
        let m = trim(m);
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot = &*slot + &c;
    }

    fn normalized(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    fn joined(a: &Option<Arc<Extension>>, b: &Option<Arc<Extension>>) -> Option<Arc<Extension>> {
        match (a, b) {
            (None, x) | (x, None) => x.clone(),
            (Some(x), Some(y)) => {
                assert!(Arc::ptr_eq(x, y) || x == y, "mixing values from different extensions");
                Some(x.clone())
            }
        }
    }

    fn inverse(&self) -> Result<Self> {
        if let Some(r) = self.as_rational() {
            return Ok(ExtScalar::rational(r.recip()?));
        }
        let ext = self.ext.clone().expect("non-rational value has an extension");
        let basis = ext.basis();
        let index: BTreeMap<&Mono, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let d = basis.len();
        // column j holds the coordinates of self * basis[j]
        let mut a = vec![vec![Rational::zero(); d + 1]; d];
        for (j, bm) in basis.iter().enumerate() {
            let b = ExtScalar { ext: Some(ext.clone()), terms: BTreeMap::from([(bm.clone(), Rational::one())]) };
            let prod = self.clone() * b;
            for (m, c) in prod.terms {
                a[index[&m]][j] = c;
            }
        }
        a[index[&Vec::new()]][d] = Rational::one();
        let y = solve_augmented(a)?;
        let mut out = ExtScalar { ext: Some(ext), terms: BTreeMap::new() };
        for (m, c) in basis.into_iter().zip(y) {
            if !c.is_zero() {
                out.terms.insert(m, c);
            }
        }
        Ok(out)
    }
}

/// Solve a square system given as an augmented matrix; singular means a pole.
fn solve_augmented(mut a: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    let d = a.len();
    for col in 0..d {
        let piv = (col..d).find(|&r| !a[r][col].is_zero()).ok_or(Error::DivisionByZero)?;
        a.swap(col, piv);
        let inv = a[col][col].recip()?;
        for c in col..=d {
            a[col][c] = &a[col][c] * &inv;
        }
        for r in 0..d {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=d {
                    let v = &a[col][c] * &f;
                    a[r][c] = &a[r][c] - &v;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[d].clone()).collect())
}

/// Capelli: x^k - c is irreducible over Q iff c is not a p-th power for any
/// prime p dividing k, and c is not in -4Q^4 when 4 divides k.
fn pure_root_irreducible(c: &Rational, k: u32) -> bool {
    let mut n = k;
    let mut p = 2;
    while n > 1 {
        if n % p == 0 {
            if c.exact_root(p).is_some() {
                return false;
            }
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if k % 4 == 0 {
        if let Ok(q) = c.checked_div(&Rational::from_integer(-4)) {
            if q.exact_root(4).is_some() {
                return false;
            }
        }
    }
    true
}

impl PartialEq for ExtScalar {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for ExtScalar {}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<&str> = self
            .ext
            .as_ref()
            .map(|e| e.symbols.iter().map(|s| s.name.as_str()).collect())
            .unwrap_or_default();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (j, e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", names[j])?,
                    _ => write!(f, "*{}^{}", names[j], e)?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for ExtScalar {
    type Output = ExtScalar;
    fn add(mut self, rhs: ExtScalar) -> ExtScalar {
        self.ext = Self::joined(&self.ext, &rhs.ext);
        for (m, c) in rhs.terms {
            let slot = self.terms.entry(m).or_insert_with(Rational::zero);
            *slot = &*slot + &c;
        }
        self.normalized()
    }
}

impl Neg for ExtScalar {
    type Output = ExtScalar;
    fn neg(mut self) -> ExtScalar {
        for c in self.terms.values_mut() {
            *c = -&*c;
        }
        self
    }
}

impl Sub for ExtScalar {
    type Output = ExtScalar;
    fn sub(self, rhs: ExtScalar) -> ExtScalar {
        self + (-rhs)
    }
}

impl Mul for ExtScalar {
    type Output = ExtScalar;
    fn mul(self, rhs: ExtScalar) -> ExtScalar {
        let mut out = ExtScalar { ext: Self::joined(&self.ext, &rhs.ext), terms: BTreeMap::new() };
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let len = m1.len().max(m2.len());
                let m: Mono = (0..len)
                    .map(|j| m1.get(j).copied().unwrap_or(0) + m2.get(j).copied().unwrap_or(0))
                    .collect();
                out.accumulate(m, c1 * c2);
            }
        }
        out.normalized()
    }
}

impl Scalar for ExtScalar {
    fn zero() -> Self {
        ExtScalar::rational(Rational::zero())
    }
    fn one() -> Self {
        ExtScalar::rational(Rational::one())
    }
    fn from_rational(r: &Rational) -> Self {
        ExtScalar::rational(r.clone())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn try_recip(&self) -> Result<Self> {
        self.inverse()
    }
    /// Rational roots are returned directly; otherwise the root is adjoined
    /// as a new symbol, which requires a rational base and an irreducible
    /// x^k - base.
    fn root(base: &Self, k: u32, symbol: &str) -> Result<Self> {
        let c = base
            .as_rational()
            .ok_or_else(|| Error::NoRoot(format!("{symbol}: nested roots are not supported")))?;
        if let Some(r) = c.exact_root(k) {
            return Ok(ExtScalar::rational(r));
        }
        if !pure_root_irreducible(&c, k) {
            return Err(Error::NoRoot(format!("{symbol}^{k} = {c} does not define a field")));
        }
        let ext = Extension::single(symbol, k, c)?;
        ExtScalar::symbol(&ext, symbol)
    }
    fn magnitude(&self) -> f64 {
        if self.terms.is_empty() {
            0.0
        } else {
            1.0
        }
    }
}
