//! Dense complex matrices and the Hermitian spectral primitives everything
//! else is built on.
//!
//! Matrices are `nalgebra` dense matrices over `Complex64`. On the wire they
//! are nested row-major arrays of `[re, im]` pairs:
//!
//! ```json
//! [[[1.0, 0.0], [0.0, 0.0]],
//!  [[0.0, 0.0], [0.0, 1.0]]]
//! ```

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use nalgebra::Complex;
pub type Complex64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Eigenvalues below this contribute nothing to entropies and are clamped
/// here before taking logarithms.
pub const EIG_ZERO_TOL: f64 = 1e-12;

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub(crate) fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// `|a><b|` in dimension `d`.
pub fn ket_bra(d_rows: usize, a: usize, d_cols: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d_rows, d_cols);
    m[(a, b)] = C_ONE;
    m
}

pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn basis_vector(d: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[i] = C_ONE;
    v
}

pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, cols, |i, j| cr(rows[i][j]))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { cr(values[i]) } else { C_ZERO })
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace_re(m: &ComplexMatrix) -> f64 {
    m.trace().re
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let mut acc = C_ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order. Each eigenvector is
/// phase-fixed so that its first non-negligible component is real and
/// positive, and eigenvalues that tie within `EIG_ZERO_TOL` are ordered by
/// lexicographic comparison of their eigenvectors. This makes every
/// downstream construction (purification, linear oracles) reproducible.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Eigh {
    pub fn vector(&self, i: usize) -> ComplexVector {
        self.vectors.column(i).into_owned()
    }

    /// Rebuild `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn eigh(m: &ComplexMatrix) -> Eigh {
    assert!(m.is_square(), "eigh requires a square matrix");
    let n = m.nrows();
    if n == 0 {
        return Eigh { values: vec![], vectors: ComplexMatrix::zeros(0, 0) };
    }
    let se = nalgebra::SymmetricEigen::new(hermitian_part(m));
    let mut cols: Vec<(f64, ComplexVector)> = (0..n)
        .map(|j| {
            let mut v = se.eigenvectors.column(j).into_owned();
            fix_phase(&mut v);
            (se.eigenvalues[j], v)
        })
        .collect();
    cols.sort_by(|a, b| {
        if (a.0 - b.0).abs() <= EIG_ZERO_TOL {
            lex_cmp(&a.1, &b.1)
        } else {
            b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal)
        }
    });
    let values = cols.iter().map(|(l, _)| *l).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| cols[j].1[i]);
    Eigh { values, vectors }
}

/// Eigenvalues only, descending.
pub fn eigvalsh(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.nrows();
    if n == 1 {
        return vec![m[(0, 0)].re];
    }
    if n == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return vec![mean + rad, mean - rad];
    }
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    v
}

fn fix_phase(v: &mut ComplexVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-10).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

fn lex_cmp(a: &ComplexVector, b: &ComplexVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > 1e-12 {
                return p.partial_cmp(&q).unwrap_or(Ordering::Equal);
            }
        }
    }
    Ordering::Equal
}

/// Entropy in bits of a probability-like spectrum.
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let h: f64 = values
        .iter()
        .filter(|&&l| l >= EIG_ZERO_TOL)
        .map(|&l| -l * l.log2())
        .sum();
    h.max(0.0)
}

/// `log2` of a Hermitian PSD matrix with eigenvalues clamped at `EIG_ZERO_TOL`.
pub fn log2_clamped(m: &ComplexMatrix) -> ComplexMatrix {
    eigh(m).map(|l| l.max(EIG_ZERO_TOL).log2())
}

/// Principal square root of a Hermitian PSD matrix; negative noise is clamped to 0.
pub fn sqrt_psd(m: &ComplexMatrix) -> ComplexMatrix {
    eigh(m).map(|l| l.max(0.0).sqrt())
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

pub(crate) fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::param("matrix has non-finite entries"))
    }
}

/// Serde adapter for the `[[[re, im], ...], ...]` row-major format.
pub mod json {
    use super::*;

    pub fn to_nested(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_nested(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Parse("matrix has no rows".into()));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|row| row.len() != cols) {
            return Err(Error::Parse("matrix rows are empty or ragged".into()));
        }
        let m = ComplexMatrix::from_fn(r, cols, |i, j| c(rows[i][j][0], rows[i][j][1]));
        check_finite(&m).map_err(|_| Error::Parse("matrix has non-finite entries".into()))?;
        Ok(m)
    }

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_nested(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_nested(&rows).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            ms: &[ComplexMatrix],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            ms.iter().map(to_nested).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<ComplexMatrix>, D::Error> {
            let all = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            all.iter()
                .map(|rows| from_nested(rows).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod opt_vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            ms: &Option<Vec<ComplexMatrix>>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            ms.as_ref()
                .map(|v| v.iter().map(to_nested).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Vec<ComplexMatrix>>, D::Error> {
            let all = Option::<Vec<Vec<Vec<[f64; 2]>>>>::deserialize(d)?;
            all.map(|all| {
                all.iter()
                    .map(|rows| from_nested(rows).map_err(serde::de::Error::custom))
                    .collect()
            })
            .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = from_real_rows(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 0.0], &[0.0, 0.0, 5.0]]);
        let e = eigh(&m);
        assert!((e.values[0] - 5.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        assert!((e.values[2] - 1.0).abs() < 1e-12);
        assert!(max_abs(&(e.map(|x| x) - &m)) < 1e-12);
    }

    #[test]
    fn closed_form_2x2_matches_general() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[cr(0.3), c(0.1, -0.2), c(0.1, 0.2), cr(0.7)]);
        let fast = eigvalsh(&m);
        let slow = eigh(&m).values;
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip_and_rejects_ragged() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), cr(0.0), c(0.0, -1.0), cr(2.0)]);
        let s = serde_json::to_string(&json::to_nested(&m)).unwrap();
        assert_eq!(s, "[[[1.0,0.5],[0.0,0.0]],[[0.0,-1.0],[2.0,0.0]]]");
        let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&s).unwrap();
        assert_eq!(json::from_nested(&rows).unwrap(), m);
        let ragged: Vec<Vec<[f64; 2]>> = serde_json::from_str("[[[1,0]],[[1,0],[0,0]]]").unwrap();
        assert!(json::from_nested(&ragged).is_err());
    }

    #[test]
    fn spectrum_entropy_ignores_tiny_values() {
        assert_eq!(entropy_of_spectrum(&[1.0, 1e-15, -1e-14]), 0.0);
        assert!((entropy_of_spectrum(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
    }
}
