//! Heisenberg subalgebras attached to partitions of n+1.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_numerics::Rational;
use crate::loop_algebra::{bracket, GradationSpec, Laurent, LoopElement, Mat};
use crate::report::Check;

/// Weakly decreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!("{parts:?}: parts must be positive")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?}: parts must be weakly decreasing")));
        }
        if parts.iter().sum::<usize>() < 2 {
            return Err(Error::InvalidPartition(format!("{parts:?}: needs n+1 >= 2")));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// n for a partition of n+1.
    pub fn rank(&self) -> usize {
        self.parts.iter().sum::<usize>() - 1
    }

    /// Every partition of `m`, in reverse lexicographic order.
    pub fn all_of(m: usize) -> Vec<Partition> {
        fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rest == 0 {
                out.push(cur.clone());
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                go(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(m, m, &mut Vec::new(), &mut out);
        out.into_iter().filter_map(|p| Partition::new(p).ok()).collect()
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::InvalidPartition(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// lcm of the parts, doubled when N'(1/n_i + 1/n_j) is odd for some pair.
pub fn compute_n(p: &Partition) -> i64 {
    let lcm = p.parts.iter().fold(1usize, |a, &b| a.lcm(&b)) as i64;
    let odd = p.parts.iter().any(|&a| {
        p.parts.iter().any(|&b| (lcm / a as i64 + lcm / b as i64) % 2 != 0)
    });
    if odd {
        2 * lcm
    } else {
        lcm
    }
}

pub fn gradation_type(p: &Partition) -> Result<Vec<i64>> {
    Ok(build_heisenberg(p)?.grading.s().to_vec())
}

#[derive(Clone, Debug)]
pub struct HeisenbergData {
    pub partition: Partition,
    /// Λ_i for parts > 1, σ-conjugated.
    pub lambdas: Vec<LoopElement<Rational>>,
    /// H_1..H_{s−1}, σ-conjugated.
    pub h_diagonals: Vec<LoopElement<Rational>>,
    pub eta: LoopElement<Rational>,
    pub n_scale: i64,
    pub s_vector: Vec<i64>,
    /// σ as "new position a holds old index sigma[a]".
    pub sigma: Vec<usize>,
    pub grading: GradationSpec,
    offsets: Vec<usize>,
}

fn conjugate(m: &Mat<Rational>, sigma: &[usize]) -> Mat<Rational> {
    let d = sigma.len();
    let mut out = Mat::zeros(d);
    for a in 0..d {
        for b in 0..d {
            out.set(a, b, m.get(sigma[a], sigma[b]).clone());
        }
    }
    out
}

fn conjugate_laurent(x: &Laurent<Rational>, sigma: &[usize]) -> Laurent<Rational> {
    let mut out = Laurent::zero(x.dim());
    for (k, m) in x.blocks() {
        out.add_block(*k, conjugate(m, sigma));
    }
    out
}

pub fn build_heisenberg(p: &Partition) -> Result<HeisenbergData> {
    let n = p.rank();
    let d = n + 1;
    let mut offsets = Vec::with_capacity(p.parts.len());
    let mut eta_prime = Vec::with_capacity(d);
    let mut o = 0;
    for &ni in &p.parts {
        offsets.push(o);
        for k in 0..ni {
            eta_prime.push(Rational::frac(ni as i64 - 1 - 2 * k as i64, 2 * ni as i64));
        }
        o += ni;
    }
    let mut sigma: Vec<usize> = (0..d).collect();
    sigma.sort_by(|a, b| eta_prime[*b].cmp(&eta_prime[*a]));
    let eta_diag: Vec<Rational> = sigma.iter().map(|&i| eta_prime[i].clone()).collect();

    let n_scale = compute_n(p);
    let grading = GradationSpec::new(n, n_scale, eta_diag)?;
    let eta = grading.eta::<Rational>();

    let mut data = HeisenbergData {
        partition: p.clone(),
        lambdas: Vec::new(),
        h_diagonals: Vec::new(),
        eta,
        n_scale,
        s_vector: grading.s().to_vec(),
        sigma,
        grading,
        offsets,
    };
    for i in 0..p.parts.len() {
        if p.parts[i] > 1 {
            let l = data.lambda_power(i, 1)?;
            data.lambdas.push(l);
        }
    }
    for j in 0..p.parts.len().saturating_sub(1) {
        let (nj, nj1) = (p.parts[j] as i64, p.parts[j + 1] as i64);
        let diag = data.block_identity(j).scale(&Rational::from_integer(nj1))
            - data.block_identity(j + 1).scale(&Rational::from_integer(nj));
        let hj = conjugate_laurent(&diag, &data.sigma);
        data.h_diagonals.push(LoopElement::from_matrix(n, hj)?);
    }
    Ok(data)
}

impl HeisenbergData {
    pub fn rank(&self) -> usize {
        self.partition.rank()
    }

    fn block_identity(&self, i: usize) -> Laurent<Rational> {
        let d = self.rank() + 1;
        let mut m = Mat::zeros(d);
        for k in 0..self.partition.parts[i] {
            m.set(self.offsets[i] + k, self.offsets[i] + k, Rational::one());
        }
        Laurent::monomial(0, m)
    }

    /// Cyclic block of part i before conjugation: E_{k,k+1} inside the
    /// block and z at the corner.
    fn cyclic_block(&self, i: usize) -> Laurent<Rational> {
        let d = self.rank() + 1;
        let (o, ni) = (self.offsets[i], self.partition.parts[i]);
        let mut out = Laurent::zero(d);
        for k in 0..ni - 1 {
            out = out + Laurent::unit(d, 0, o + k, o + k + 1, Rational::one());
        }
        out + Laurent::unit(d, 1, o + ni - 1, o, Rational::one())
    }

    /// Λ_i^k for k not divisible by n_i (i indexes all parts).
    pub fn lambda_power(&self, i: usize, k: i64) -> Result<LoopElement<Rational>> {
        let ni = self.partition.parts[i] as i64;
        if k.rem_euclid(ni) == 0 {
            return Err(Error::Domain(format!("power {k} of a block of size {ni} is not traceless")));
        }
        let (q, r) = (k.div_euclid(ni), k.rem_euclid(ni));
        let c = self.cyclic_block(i);
        let mut m = c.clone();
        for _ in 1..r {
            m = m.matmul(&c);
        }
        let mut shifted = Laurent::zero(m.dim());
        for (deg, b) in m.blocks() {
            shifted.add_block(deg + q as i32, b.clone());
        }
        LoopElement::from_matrix(self.rank(), conjugate_laurent(&shifted, &self.sigma))
    }

    /// Degree of Λ_i under ϑ, N / n_i.
    pub fn lambda_degree(&self, i: usize) -> i64 {
        self.n_scale / self.partition.parts[i] as i64
    }

    /// Named generators used by the verification: powers of each Λ and
    /// z-shifts of each H.
    pub fn generators(&self) -> Result<Vec<(String, LoopElement<Rational>)>> {
        let mut out = Vec::new();
        for (i, &ni) in self.partition.parts.iter().enumerate() {
            if ni < 2 {
                continue;
            }
            let ni = ni as i64;
            for k in -2 * ni..=2 * ni {
                if k.rem_euclid(ni) != 0 {
                    out.push((format!("Lambda_{}^{}", i + 1, k), self.lambda_power(i, k)?));
                }
            }
        }
        let n = self.rank();
        for (j, hj) in self.h_diagonals.iter().enumerate() {
            for k in -2i32..=2 {
                let mut m = Laurent::zero(n + 1);
                for (deg, b) in hj.matrix().blocks() {
                    m.add_block(deg + k, b.clone());
                }
                out.push((format!("z^{}H_{}", k, j + 1), LoopElement::from_matrix(n, m)?));
            }
        }
        Ok(out)
    }
}

pub fn verify_heisenberg(d: &HeisenbergData) -> Result<Vec<Check>> {
    let n = d.rank();
    let gens = d.generators()?;
    let mut checks = Vec::new();

    let mut witness = None;
    'outer: for (i, (na, a)) in gens.iter().enumerate() {
        for (nb, b) in &gens[i + 1..] {
            let c = bracket(a, b)?;
            if !c.matrix().is_zero() {
                witness = Some(format!("[{na}, {nb}] = {}", c.matrix().render()));
                break 'outer;
            }
        }
    }
    checks.push(Check::new("commutators_central", witness));

    let mut lambda_index = 0;
    for (i, &ni) in d.partition.parts.iter().enumerate() {
        if ni < 2 {
            continue;
        }
        let l = &d.lambdas[lambda_index];
        lambda_index += 1;
        let deg = Rational::from_integer(d.lambda_degree(i));
        let img = d.grading.apply_theta(l)?;
        let ok = img == l.scale(&deg);
        checks.push(Check::new(
            &format!("Lambda_{}_homogeneous", i + 1),
            (!ok).then(|| format!("ϑ(Λ) = {}", img.matrix().render())),
        ));
        let mut zero_power = None;
        for k in 1..ni as i64 {
            if d.lambda_power(i, k)?.is_zero() {
                zero_power = Some(format!("Λ_{}^{k} = 0", i + 1));
                break;
            }
        }
        checks.push(Check::new(&format!("Lambda_{}_powers_nonzero", i + 1), zero_power));

        let kc = bracket(&LoopElement::central(n), l)?;
        checks.push(Check::new(
            &format!("K_central_Lambda_{}", i + 1),
            (!kc.is_zero()).then(|| kc.render()),
        ));
        if d.n_scale % d.lambda_degree(i) != 0 {
            checks.push(Check::new(
                &format!("Lambda_{}_degree_divides_N", i + 1),
                Some(format!("{} does not divide {}", d.lambda_degree(i), d.n_scale)),
            ));
        }
    }

    let bad_s = d.s_vector.iter().enumerate().find(|(_, s)| **s < 0);
    checks.push(Check::new(
        "gradation_nonnegative",
        bad_s.map(|(i, s)| format!("s_{i} = {s}")),
    ));
    Ok(checks)
}

/// Output of the `heisenberg` command.
#[derive(Clone, Debug, Serialize)]
pub struct HeisenbergSummary {
    pub partition: Partition,
    #[serde(rename = "N")]
    pub n_scale: i64,
    pub s: Vec<i64>,
    pub generators: Vec<GeneratorSummary>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSummary {
    pub name: String,
    pub degree: Option<i64>,
    pub matrix: String,
}

pub fn summarize(p: &Partition) -> Result<HeisenbergSummary> {
    let d = build_heisenberg(p)?;
    let mut generators = Vec::new();
    let mut li = 0;
    for (i, &ni) in p.parts.iter().enumerate() {
        if ni > 1 {
            generators.push(GeneratorSummary {
                name: format!("Lambda_{}", i + 1),
                degree: Some(d.lambda_degree(i)),
                matrix: d.lambdas[li].matrix().render(),
            });
            li += 1;
        }
    }
    for (j, hj) in d.h_diagonals.iter().enumerate() {
        generators.push(GeneratorSummary { name: format!("H_{}", j + 1), degree: Some(0), matrix: hj.matrix().render() });
    }
    generators.push(GeneratorSummary { name: "eta".into(), degree: None, matrix: d.eta.matrix().render() });
    let checks = verify_heisenberg(&d)?;
    Ok(HeisenbergSummary { partition: p.clone(), n_scale: d.n_scale, s: d.s_vector.clone(), generators, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_algebra::{ad_word, h};

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn scales() {
        let got: Vec<i64> = ["2,2", "3,1", "4,1", "2,2,1", "3,3"].iter().map(|s| compute_n(&p(s))).collect();
        assert_eq!(got, vec![2, 3, 8, 4, 3]);
    }

    #[test]
    fn known_types() {
        assert_eq!(gradation_type(&p("3,3")).unwrap(), vec![1, 0, 1, 0, 1, 0]);
        assert_eq!(gradation_type(&p("2,2,1")).unwrap(), vec![2, 0, 1, 1, 0]);
        assert_eq!(gradation_type(&p("4,1")).unwrap(), vec![2, 2, 1, 1, 2]);
        assert_eq!(gradation_type(&p("2,2")).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(gradation_type(&p("3,1")).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(gradation_type(&p("5")).unwrap(), vec![1; 5]);
    }

    #[test]
    fn p33_generators() {
        let d = build_heisenberg(&p("3,3")).unwrap();
        let q = |n: i64| Rational::from_integer(n);
        let h135 = h::<Rational>(5, 1).unwrap().try_add(&h(5, 3).unwrap()).unwrap().try_add(&h(5, 5).unwrap()).unwrap();
        assert_eq!(d.h_diagonals[0], h135.scale(&q(3)));
        let mut eta = LoopElement::zero(5);
        for (i, c) in [1, 2, 2, 2, 1].iter().enumerate() {
            eta = eta.try_add(&h(5, i + 1).unwrap().scale(&Rational::frac(*c, 3))).unwrap();
        }
        assert_eq!(d.eta, eta);
        let l1 = ad_word::<Rational>(5, &[1, 2]).unwrap()
            .try_add(&ad_word(5, &[3, 4]).unwrap()).unwrap()
            .try_add(&ad_word(5, &[5, 0]).unwrap()).unwrap();
        assert_eq!(d.lambdas[0], l1);
        let l2 = ad_word::<Rational>(5, &[0, 1]).unwrap()
            .try_add(&ad_word(5, &[2, 3]).unwrap()).unwrap()
            .try_add(&ad_word(5, &[4, 5]).unwrap()).unwrap();
        assert_eq!(d.lambdas[1], l2);
    }

    #[test]
    fn p22_eta() {
        let d = build_heisenberg(&p("2,2")).unwrap();
        let mut eta = LoopElement::zero(3);
        for (i, c) in [1, 2, 1].iter().enumerate() {
            eta = eta.try_add(&h(3, i + 1).unwrap().scale(&Rational::frac(*c, 4))).unwrap();
        }
        assert_eq!(d.eta, eta);
    }

    #[test]
    fn all_small_partitions_verify() {
        for m in 2..=7 {
            for part in Partition::all_of(m) {
                let d = build_heisenberg(&part).unwrap();
                for c in verify_heisenberg(&d).unwrap() {
                    assert!(c.pass, "{part}: {} {:?}", c.name, c.witness);
                }
            }
        }
    }

    #[test]
    fn invalid_partitions() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![1]).is_err());
        assert!("2,x".parse::<Partition>().is_err());
    }
}
