use serde::{Deserialize, Serialize};

use super::matrix::{
    self, cr, eigh, hermiticity_error, kron, kron_vec, trace_re, ComplexMatrix, ComplexVector,
    C_ZERO,
};
use crate::error::{Error, Result};

/// Construction tolerance for Hermiticity, unit trace and positivity.
pub const STATE_TOL: f64 = 1e-10;

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityJson", into = "DensityJson")]
pub struct DensityOperator {
    mat: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct DensityJson(#[serde(with = "matrix::json")] ComplexMatrix);

impl TryFrom<DensityJson> for DensityOperator {
    type Error = Error;
    fn try_from(j: DensityJson) -> Result<Self> {
        DensityOperator::new(j.0)
    }
}

impl From<DensityOperator> for DensityJson {
    fn from(d: DensityOperator) -> Self {
        DensityJson(d.mat)
    }
}

impl DensityOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "density operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        matrix::check_finite(&mat).map_err(|_| Error::InvalidState("non-finite entries".into()))?;
        let herm = hermiticity_error(&mat);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = trace_re(&mat);
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = matrix::eigvalsh(&mat).last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("not PSD (min eigenvalue {min:.3e})")));
        }
        Ok(DensityOperator { mat })
    }

    /// Wraps a matrix already known to be a state up to rounding; only
    /// Hermitian symmetrization is applied.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        DensityOperator { mat: matrix::hermitian_part(&mat) }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityOperator { mat: matrix::identity(d).scale(1.0 / d as f64) }
    }

    /// `|i><i|`.
    pub fn basis(d: usize, i: usize) -> Self {
        DensityOperator { mat: matrix::ket_bra(d, i, d, i) }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(matrix::diag_real(probs))
    }

    pub fn from_pure(v: &ComplexVector) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        Ok(DensityOperator { mat: matrix::projector(v) })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        matrix::eigvalsh(&self.mat)
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator { mat: kron(&self.mat, &other.mat) }
    }

    /// `p self + (1-p) other`.
    pub fn mix(&self, p: f64, other: &DensityOperator) -> Result<DensityOperator> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("mixing weight {p} outside [0,1]")));
        }
        if self.dim() != other.dim() {
            return Err(Error::dims(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(DensityOperator { mat: self.mat.scale(p) + other.mat.scale(1.0 - p) })
    }

    /// `U rho U†`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityOperator> {
        if u.ncols() != self.dim() || u.nrows() != self.dim() {
            return Err(Error::dims("unitary does not match state dimension"));
        }
        Ok(DensityOperator::from_trusted(u * &self.mat * u.adjoint()))
    }
}

/// A unit vector on a (possibly) multipartite space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vec: ComplexVector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(vec: ComplexVector, dims: Vec<usize>) -> Result<Self> {
        let prod: usize = dims.iter().product();
        if dims.is_empty() || prod != vec.len() {
            return Err(Error::dims(format!(
                "factor dimensions {dims:?} do not multiply to {}",
                vec.len()
            )));
        }
        let norm = vec.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        Ok(PureState { vec, dims })
    }

    pub fn single(vec: ComplexVector) -> Result<Self> {
        let n = vec.len();
        Self::new(vec, vec![n])
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vec
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.vec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vec.is_empty()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator { mat: matrix::projector(&self.vec) }
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { vec: kron_vec(&self.vec, &other.vec), dims }
    }

    /// Reduced state on the factors listed in `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        let m = partial_trace(&self.density().mat, &self.dims, keep)?;
        Ok(DensityOperator::from_trusted(m))
    }
}

/// Trace out every factor not listed in `keep`.
///
/// `dims` lists factor dimensions, most significant first (the usual
/// Kronecker ordering). The kept factors stay in ascending order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::param("factor dimensions must be positive"));
    }
    if !m.is_square() || m.nrows() != total {
        return Err(Error::dims(format!(
            "matrix is {}x{} but factors {dims:?} multiply to {total}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::param(format!("keep set {keep:?} out of range for {} factors", dims.len())));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
    let dk: usize = keep_sorted.iter().map(|&i| dims[i]).product();
    let dt: usize = traced.iter().map(|&i| dims[i]).product();

    // Strides of each factor inside the full index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |factors: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &f in factors.iter().rev() {
                    off += (idx % dims[f]) * strides[f];
                    idx /= dims[f];
                }
                off
            })
            .collect()
    };
    let keep_off = offsets(&keep_sorted, dk);
    let trace_off = offsets(&traced, dt);

    let mut out = ComplexMatrix::from_element(dk, dk, C_ZERO);
    for (a, &ka) in keep_off.iter().enumerate() {
        for (b, &kb) in keep_off.iter().enumerate() {
            let mut acc = C_ZERO;
            for &t in &trace_off {
                acc += m[(ka + t, kb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Canonical purification `sum_i sqrt(l_i) |v_i> (x) |i>` on system (x) reference.
///
/// Eigenvectors come from [`matrix::eigh`], so ordering and phases are
/// deterministic.
pub fn purify(rho: &DensityOperator) -> PureState {
    let d = rho.dim();
    let e = eigh(&rho.mat);
    let mut v = ComplexVector::zeros(d * d);
    for (i, &l) in e.values.iter().enumerate() {
        let w = l.max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for s in 0..d {
            v[s * d + i] += e.vectors[(s, i)] * cr(w);
        }
    }
    // Renormalize away clamped negative noise.
    let norm = v.norm();
    v.unscale_mut(norm);
    PureState { vec: v, dims: vec![d, d] }
}
