//! Square-root measurement after projection, and its Gram-matrix error bound.

use crate::error::{Error, Result};
use crate::qmath::matrix::{eigh, hermiticity_error, max_abs, projector, ComplexMatrix, ComplexVector};
use crate::qmath::PureState;

/// For codewords `|v_i>` and a projector `P`, measure with the square-root
/// POVM built from `|w_i> = P|v_i>`, `phi = sum |w_i><w_i|`, elements
/// `phi^{-1/2} |w_i><w_i| phi^{-1/2}`. Returns per-codeword
/// `(exact error, bound)` where the bound is
/// `2(1 - S_ii) + sum_{j != i} |S_ij|^2` with `S_ij = <w_i|w_j>`.
pub fn pgm_error(codewords: &[PureState], proj: &ComplexMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let first = codewords.first().ok_or_else(|| Error::param("no codewords"))?;
    let d = first.len();
    if codewords.iter().any(|c| c.len() != d) {
        return Err(Error::dims("codewords have different dimensions"));
    }
    if proj.shape() != (d, d) {
        return Err(Error::dims(format!("projector is {:?}, codewords have dimension {d}", proj.shape())));
    }
    if hermiticity_error(proj) > 1e-9 || max_abs(&(proj * proj - proj)) > 1e-9 {
        return Err(Error::param("subspace operator is not an orthogonal projector"));
    }

    let w: Vec<ComplexVector> = codewords.iter().map(|c| proj * c.vector()).collect();
    let mut phi = ComplexMatrix::zeros(d, d);
    for v in &w {
        phi += projector(v);
    }
    let spec = eigh(&phi);
    let top = spec.values[0];
    if top <= 1e-12 {
        return Err(Error::InvalidState("all projected codewords vanish".into()));
    }
    let cut = top * 1e-12;
    let inv_sqrt = spec.map(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 });

    let m = w.len();
    let gram = |i: usize, j: usize| w[i].dotc(&w[j]);
    let mut exact = Vec::with_capacity(m);
    let mut bound = Vec::with_capacity(m);
    for i in 0..m {
        let amp = w[i].dotc(&(&inv_sqrt * &w[i]));
        exact.push((1.0 - amp.norm_sqr()).max(0.0));
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| gram(i, j).norm_sqr()).sum();
        bound.push(2.0 * (1.0 - gram(i, i).re) + off);
    }
    Ok((exact, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::matrix::{basis_vector, identity};

    #[test]
    fn orthonormal_codewords_are_perfect() {
        let cw: Vec<PureState> = (0..3).map(|i| PureState::single(basis_vector(4, i)).unwrap()).collect();
        let (exact, bound) = pgm_error(&cw, &identity(4)).unwrap();
        assert!(exact.iter().all(|&e| e < 1e-12));
        assert!(bound.iter().all(|&b| b.abs() < 1e-12));
    }

    #[test]
    fn single_codeword_has_zero_error() {
        let v = ComplexVector::from_element(4, crate::qmath::matrix::cr(0.5));
        let (exact, _) = pgm_error(&[PureState::single(v).unwrap()], &identity(4)).unwrap();
        assert!(exact[0] < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cw = vec![PureState::single(basis_vector(2, 0)).unwrap()];
        let mut p = identity(2);
        p[(0, 0)] = crate::qmath::matrix::cr(0.0);
        assert!(pgm_error(&cw, &p).is_err()); // projects the only codeword away
        assert!(pgm_error(&cw, &identity(2).scale(0.5)).is_err());
        assert!(pgm_error(&cw, &identity(3)).is_err());
    }
}
