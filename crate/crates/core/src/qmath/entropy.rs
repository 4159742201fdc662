use super::channel::QuantumChannel;
use super::matrix::{self, entropy_of_spectrum, sqrt_psd, ComplexMatrix};
use super::state::{partial_trace, DensityOperator};
use crate::error::{Error, Result};

/// `H(rho) = -tr rho log2 rho`, in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> f64 {
    entropy_of_spectrum(&matrix::eigvalsh(m))
}

/// Entropy of the environment after the channel acts, via the
/// complementary map.
pub fn entropy_exchange(ch: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    Ok(von_neumann_entropy(&ch.complementary_apply(rho)?))
}

/// The same quantity through a purification: `H((N (x) I) Phi_rho)`.
pub fn entropy_exchange_via_purification(ch: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    Ok(von_neumann_entropy(&ch.apply_to_purification(rho)?))
}

/// `H(rho) + H(N(rho)) - H_E(N, rho)`.
pub fn quantum_mutual_information(ch: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    let out = ch.apply(rho)?;
    let env = ch.complementary_apply(rho)?;
    Ok(von_neumann_entropy(rho) + von_neumann_entropy(&out) - von_neumann_entropy(&env))
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    let s = sqrt_psd(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let root_trace: f64 = matrix::eigvalsh(&inner).iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `H(AB) + H(AC) - H(ABC) - H(A)`, non-negative by strong subadditivity.
pub fn ssa_slack(rho_abc: &DensityOperator, dims: [usize; 3]) -> Result<f64> {
    let m = rho_abc.matrix();
    let h = |keep: &[usize]| -> Result<f64> { Ok(matrix_entropy(&partial_trace(m, &dims, keep)?)) };
    Ok(h(&[0, 1])? + h(&[0, 2])? - von_neumann_entropy(rho_abc) - h(&[0])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::matrix::{cr, ComplexVector};
    use crate::qmath::state::PureState;

    #[test]
    fn entropy_examples() {
        assert!((von_neumann_entropy(&DensityOperator::maximally_mixed(2)) - 1.0).abs() < 1e-15);
        assert_eq!(von_neumann_entropy(&DensityOperator::basis(3, 1)), 0.0);
        // -(1/2)log2(1/2) - 3 (1/6) log2(1/6) = 1/2 + (1/2) log2 6
        let rho = DensityOperator::diagonal(&[0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]).unwrap();
        let expected = 0.5 + 0.5 * 6f64.log2();
        assert!((von_neumann_entropy(&rho) - expected).abs() < 1e-14);
        assert!((expected - 1.7925).abs() < 5e-5);
    }

    #[test]
    fn fidelity_examples() {
        let z0 = DensityOperator::basis(2, 0);
        let z1 = DensityOperator::basis(2, 1);
        let mm = DensityOperator::maximally_mixed(2);
        assert!((fidelity(&z0, &z0).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&z0, &z1).unwrap() < 1e-12);
        assert!((fidelity(&z0, &mm).unwrap() - 0.5).abs() < 1e-12);
        assert!(fidelity(&z0, &DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn ssa_slack_product_is_zero_and_ghz_nonnegative() {
        let a = DensityOperator::diagonal(&[0.2, 0.8]).unwrap();
        let b = DensityOperator::diagonal(&[0.5, 0.5]).unwrap();
        let c = DensityOperator::diagonal(&[0.9, 0.1]).unwrap();
        let abc = a.tensor(&b).tensor(&c);
        assert!(ssa_slack(&abc, [2, 2, 2]).unwrap().abs() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = ComplexVector::zeros(8);
        v[0] = cr(s);
        v[7] = cr(s);
        let ghz = PureState::new(v, vec![2, 2, 2]).unwrap().density();
        // H(AB) = H(AC) = H(A) = 1, H(ABC) = 0.
        assert!((ssa_slack(&ghz, [2, 2, 2]).unwrap() - 1.0).abs() < 1e-12);
        assert!(ssa_slack(&ghz, [2, 4, 2]).is_err());
    }
}
