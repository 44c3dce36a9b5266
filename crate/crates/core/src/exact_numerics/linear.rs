use super::Rational;
use crate::error::{Error, Result};

/// Solve A x = b exactly. Overdetermined systems are accepted when
/// consistent; a rank-deficient or contradictory system is an error.
pub fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Result<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if b.len() != rows || a.iter().any(|r| r.len() != cols) {
        return Err(Error::Inconsistent("ragged linear system".into()));
    }
    let mut pivots = Vec::with_capacity(cols);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip()?;
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        b[r] = b[r].clone() * inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = a[i][j].clone() - f.clone() * a[r][j].clone();
                    a[i][j] = v;
                }
                b[i] = b[i].clone() - f * b[r].clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return Err(Error::Inconsistent("linear system has no solution".into()));
    }
    if r < cols {
        return Err(Error::Inconsistent(format!("linear system has rank {r} < {cols}")));
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, c) in pivots.into_iter().enumerate() {
        x[c] = b[i].clone();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn square_and_overdetermined() {
        let a = vec![vec![q(1), q(1)], vec![q(1), q(-1)], vec![q(2), q(0)]];
        assert_eq!(solve_linear(a.clone(), vec![q(3), q(1), q(4)]).unwrap(), vec![q(2), q(1)]);
        assert!(solve_linear(a, vec![q(3), q(1), q(5)]).is_err());
        assert!(solve_linear(vec![vec![q(1), q(1)]], vec![q(0)]).is_err());
    }
}
