//! Method of types: letter-count classes, joint types, and the
//! frequency-typical subspace of `rho^{(x) n}` evaluated on its spectrum.
//!
//! Eigenvectors of `rho^{(x) n}` are strings over the eigenbasis, so every
//! question about the typical subspace reduces to sums over count vectors;
//! nothing of dimension `d^n` is ever built.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::qmath::matrix::{entropy_of_spectrum, EIG_ZERO_TOL};
use crate::qmath::DensityOperator;

/// Enumeration guard for explicit type lists.
pub const MAX_ENUMERATED_TYPES: u128 = 10_000_000;

/// Letter counts of a string of length `n` over `{0, .., d-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypeClass {
    counts: Vec<usize>,
    n: usize,
}

impl TypeClass {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::param("type over an empty alphabet"));
        }
        let n = counts.iter().sum();
        Ok(TypeClass { counts, n })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> usize {
        self.counts.len()
    }

    /// Empirical distribution `counts / n`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Number of strings in the class, `n! / prod counts!`.
    pub fn size(&self) -> BigUint {
        multinomial(&self.counts)
    }

    /// Position in [`enumerate_types`] order.
    pub fn rank(&self) -> u128 {
        let d = self.counts.len();
        let mut rank = 0u128;
        let mut remaining = self.n;
        for (i, &c) in self.counts.iter().enumerate().take(d - 1) {
            for bigger in c + 1..=remaining {
                rank += compositions(remaining - bigger, d - i - 1).unwrap_or(u128::MAX);
            }
            remaining -= c;
        }
        rank
    }
}

/// Pair counts `counts[a * d_out + b] = #{i : x_i = a, y_i = b}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct JointType {
    counts: Vec<usize>,
    d_in: usize,
    d_out: usize,
    n: usize,
}

impl JointType {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, a: usize, b: usize) -> usize {
        self.counts[a * self.d_out + b]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_in, self.d_out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Type of the first string.
    pub fn input_type(&self) -> TypeClass {
        let counts = (0..self.d_in)
            .map(|a| (0..self.d_out).map(|b| self.count(a, b)).sum())
            .collect();
        TypeClass { counts, n: self.n }
    }
}

pub fn type_of(x: &[usize], d: usize) -> Result<TypeClass> {
    if d == 0 {
        return Err(Error::param("alphabet size must be positive"));
    }
    let mut counts = vec![0; d];
    for &a in x {
        *counts.get_mut(a).ok_or_else(|| Error::param(format!("letter {a} outside [0,{d})")))? += 1;
    }
    Ok(TypeClass { counts, n: x.len() })
}

pub fn joint_type(x: &[usize], y: &[usize], d_in: usize, d_out: usize) -> Result<JointType> {
    if x.len() != y.len() {
        return Err(Error::dims(format!("strings of length {} and {}", x.len(), y.len())));
    }
    if d_in == 0 || d_out == 0 {
        return Err(Error::param("alphabet size must be positive"));
    }
    let mut counts = vec![0; d_in * d_out];
    for (&a, &b) in x.iter().zip(y) {
        if a >= d_in || b >= d_out {
            return Err(Error::param(format!("pair ({a},{b}) outside {d_in}x{d_out}")));
        }
        counts[a * d_out + b] += 1;
    }
    Ok(JointType { counts, d_in, d_out, n: x.len() })
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Number of ways to write `m` as an ordered sum of `r` non-negative parts.
fn compositions(m: usize, r: usize) -> Option<u128> {
    match r {
        0 => Some(u128::from(m == 0)),
        _ => binomial((m + r - 1) as u128, (r - 1) as u128),
    }
}

/// Number of type classes, `C(n + d - 1, d - 1)`.
pub fn type_count(n: usize, d: usize) -> Option<u128> {
    compositions(n, d)
}

/// All type classes of length `n` over `d` letters, in descending
/// lexicographic order of the count vector: `(n,0,..), (n-1,1,..), ..`.
pub fn enumerate_types(n: usize, d: usize) -> Result<Vec<TypeClass>> {
    if d == 0 {
        return Err(Error::param("alphabet size must be positive"));
    }
    match type_count(n, d) {
        Some(c) if c <= MAX_ENUMERATED_TYPES => {}
        _ => {
            return Err(Error::LimitExceeded(format!(
                "more than {MAX_ENUMERATED_TYPES} types for n={n}, d={d}"
            )))
        }
    }
    let mut out = Vec::new();
    let mut counts = vec![0; d];
    fill_types(&mut out, &mut counts, 0, n);
    Ok(out)
}

fn fill_types(out: &mut Vec<TypeClass>, counts: &mut Vec<usize>, pos: usize, remaining: usize) {
    let d = counts.len();
    if pos == d - 1 {
        counts[pos] = remaining;
        let n = counts.iter().sum();
        out.push(TypeClass { counts: counts.clone(), n });
        return;
    }
    for c in (0..=remaining).rev() {
        counts[pos] = c;
        fill_types(out, counts, pos + 1, remaining - c);
    }
}

/// Inverse of [`TypeClass::rank`].
pub fn type_from_rank(n: usize, d: usize, mut rank: u128) -> Result<TypeClass> {
    if d == 0 {
        return Err(Error::param("alphabet size must be positive"));
    }
    if type_count(n, d).is_none_or(|c| rank >= c) {
        return Err(Error::param(format!("type rank {rank} out of range for n={n}, d={d}")));
    }
    let mut counts = vec![0; d];
    let mut remaining = n;
    for i in 0..d - 1 {
        let mut c = remaining;
        loop {
            let block = compositions(remaining - c, d - i - 1).unwrap_or(u128::MAX);
            if rank < block {
                break;
            }
            rank -= block;
            c -= 1;
        }
        counts[i] = c;
        remaining -= c;
    }
    counts[d - 1] = remaining;
    Ok(TypeClass { counts, n })
}

/// A uniformly random string of the given type.
pub fn sample_from_type<R: Rng + ?Sized>(tc: &TypeClass, rng: &mut R) -> Vec<usize> {
    let mut s: Vec<usize> = tc
        .counts
        .iter()
        .enumerate()
        .flat_map(|(a, &c)| std::iter::repeat_n(a, c))
        .collect();
    s.shuffle(rng);
    s
}

pub(crate) fn multinomial(counts: &[usize]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total = 0usize;
    for &c in counts {
        for i in 1..=c {
            total += 1;
            acc *= total;
            acc /= i;
        }
    }
    acc
}

fn ln_multinomial(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    ln_gamma(n as f64 + 1.0) - counts.iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum::<f64>()
}

/// Exact rational value of the shortest decimal that round-trips to `x`,
/// so that `0.7` is compared as `7/10`.
pub(crate) fn decimal_rational(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::param(format!("non-finite value {x}")));
    }
    let s = format!("{x:e}");
    let (mant, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (neg, mant) = mant.strip_prefix('-').map_or((false, mant), |m| (true, m));
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal digits");
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// The `delta`-typical eigenstrings of `rho^{(x) n}` for a spectrum `eigs`:
/// strings whose letter counts satisfy `|N_j - lambda_j n| < delta n` for all `j`.
#[derive(Clone, Debug)]
pub struct TypicalSet {
    eigs: Vec<f64>,
    exact_eigs: Vec<BigRational>,
    exact_delta: BigRational,
    n: usize,
    delta: f64,
}

pub fn typical_eigenstate_set(eigs: &[f64], n: usize, delta: f64) -> Result<TypicalSet> {
    if eigs.is_empty() || eigs.iter().any(|&l| !(l >= 0.0)) {
        return Err(Error::param("spectrum must be non-empty and non-negative"));
    }
    let total: f64 = eigs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::param(format!("spectrum sums to {total}")));
    }
    if n == 0 {
        return Err(Error::param("block length must be at least 1"));
    }
    if !(delta > 0.0) {
        return Err(Error::param("delta must be positive"));
    }
    Ok(TypicalSet {
        eigs: eigs.to_vec(),
        exact_eigs: eigs.iter().map(|&l| decimal_rational(l)).collect::<Result<_>>()?,
        exact_delta: decimal_rational(delta)?,
        n,
        delta,
    })
}

impl TypicalSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigs
    }

    /// Typicality depends only on the letter counts.
    pub fn is_typical_counts(&self, counts: &[usize]) -> bool {
        if counts.len() != self.eigs.len() || counts.iter().sum::<usize>() != self.n {
            return false;
        }
        let n = BigRational::from_integer(BigInt::from(self.n));
        let slack = &self.exact_delta * &n;
        counts.iter().zip(&self.exact_eigs).all(|(&c, l)| {
            let dev = BigRational::from_integer(BigInt::from(c)) - l * &n;
            dev.abs() < slack
        })
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        s.len() == self.n
            && s.iter().all(|&a| a < self.eigs.len())
            && type_of(s, self.eigs.len()).is_ok_and(|t| self.is_typical_counts(&t.counts))
    }

    /// Typical type classes, in [`enumerate_types`] order.
    pub fn types(&self) -> Result<Vec<TypeClass>> {
        Ok(enumerate_types(self.n, self.eigs.len())?
            .into_iter()
            .filter(|t| self.is_typical_counts(&t.counts))
            .collect())
    }

    /// Number of typical strings (dimension of the typical subspace).
    pub fn cardinality(&self) -> Result<BigUint> {
        Ok(self.types()?.iter().map(TypeClass::size).fold(BigUint::zero(), |a, b| a + b))
    }

    /// Every typical string, type by type, each type in lexicographic order.
    pub fn iter(&self) -> Result<impl Iterator<Item = Vec<usize>>> {
        Ok(self.types()?.into_iter().flat_map(|t| MultisetPermutations::new(&t)))
    }
}

/// Distinct orderings of a multiset, lexicographically increasing.
struct MultisetPermutations {
    next: Option<Vec<usize>>,
}

impl MultisetPermutations {
    fn new(t: &TypeClass) -> Self {
        let first = t.counts.iter().enumerate().flat_map(|(a, &c)| std::iter::repeat_n(a, c)).collect();
        MultisetPermutations { next: Some(first) }
    }
}

impl Iterator for MultisetPermutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let len = succ.len();
        if len >= 2 {
            if let Some(i) = (0..len - 1).rev().find(|&i| succ[i] < succ[i + 1]) {
                let j = (i + 1..len).rev().find(|&j| succ[j] > succ[i]).expect("pivot has a successor");
                succ.swap(i, j);
                succ[i + 1..].reverse();
                self.next = Some(succ);
            }
        }
        Some(cur)
    }
}

/// Exact spectral summary of the typical projector against `rho^{(x) n}`.
#[derive(Clone, Debug, Serialize)]
pub struct TypicalSubspaceReport {
    pub n: usize,
    pub delta: f64,
    pub epsilon: f64,
    /// Support dimension of `rho` after dropping zero eigenvalues.
    pub support_dim: usize,
    pub entropy: f64,
    /// `delta * d * log2(lambda_max / lambda_min)` over the support.
    pub delta_prime: f64,
    /// `tr(Pi rho^{(x) n} Pi)`.
    pub trace_mass: f64,
    /// Extreme eigenvalues of `Pi rho^{(x) n} Pi` on the typical subspace.
    pub min_eig: f64,
    pub max_eig: f64,
    pub dim: u128,
    /// Properties 1-3: mass at least `1 - epsilon`; eigenvalues within
    /// `2^{-n(H +- delta')}`; dimension within
    /// `[(1 - epsilon) 2^{n(H - delta')}, 2^{n(H + delta')}]`.
    pub bounds_ok: [bool; 3],
}

pub fn typical_subspace_report(
    rho: &DensityOperator,
    n: usize,
    delta: f64,
    epsilon: f64,
) -> Result<TypicalSubspaceReport> {
    let support: Vec<f64> = rho.eigenvalues().into_iter().filter(|&l| l > EIG_ZERO_TOL).collect();
    spectrum_report(&support, n, delta, epsilon)
}

/// As [`typical_subspace_report`] for a diagonal state with the given
/// spectrum, without rounding through an eigensolver.
pub fn spectrum_report(
    eigs: &[f64],
    n: usize,
    delta: f64,
    epsilon: f64,
) -> Result<TypicalSubspaceReport> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::param(format!("epsilon {epsilon} outside [0,1)")));
    }
    let support: Vec<f64> = eigs.iter().copied().filter(|&l| l > EIG_ZERO_TOL).collect();
    let total: f64 = support.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::param(format!("spectrum sums to {total}")));
    }
    let set = typical_eigenstate_set(&support, n, delta)?;
    let d = support.len();
    let entropy = entropy_of_spectrum(&support);
    let lmax = support.iter().copied().fold(f64::MIN, f64::max);
    let lmin = support.iter().copied().fold(f64::MAX, f64::min);
    let delta_prime = delta * d as f64 * (lmax / lmin).log2();

    let mut mass = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut max_eig: f64 = 0.0;
    let mut dim = BigUint::zero();
    for t in set.types()? {
        let ln_eig: f64 = t.counts.iter().zip(&support).map(|(&c, &l)| c as f64 * l.ln()).sum();
        mass += (ln_multinomial(&t.counts) + ln_eig).exp();
        let eig = ln_eig.exp();
        min_eig = min_eig.min(eig);
        max_eig = max_eig.max(eig);
        dim += t.size();
    }
    let dim = dim
        .to_u128()
        .ok_or_else(|| Error::LimitExceeded("typical subspace dimension exceeds 2^128".into()))?;
    if dim == 0 {
        min_eig = 0.0;
    }

    let nf = n as f64;
    let lo = (-nf * (entropy + delta_prime)).exp2();
    let hi = (-nf * (entropy - delta_prime)).exp2();
    let rel = 1e-12;
    let dim_f = dim as f64;
    let bounds_ok = [
        mass >= 1.0 - epsilon,
        dim > 0 && min_eig >= lo * (1.0 - rel) && max_eig <= hi * (1.0 + rel),
        dim_f >= (1.0 - epsilon) * (nf * (entropy - delta_prime)).exp2() * (1.0 - rel)
            && dim_f <= (nf * (entropy + delta_prime)).exp2() * (1.0 + rel),
    ];
    Ok(TypicalSubspaceReport {
        n,
        delta,
        epsilon,
        support_dim: d,
        entropy,
        delta_prime,
        trace_mass: mass.min(1.0),
        min_eig,
        max_eig,
        dim,
        bounds_ok,
    })
}
