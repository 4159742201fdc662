//! Holevo information, the entanglement-assisted capacity maximizer and the
//! amplitude-damping, additivity, concavity and square-root-measurement checks.

mod damping;
mod frank_wolfe;
mod pgm;

pub use damping::{ad_asymptotics, ad_ce, ad_ch};
pub use frank_wolfe::{
    ce_maximize, ce_maximize_constrained, ce_maximize_with, CeOptions, EnergyConstraint,
    FwProgress, DEFAULT_TOL, MAX_ITERS,
};
pub use pgm::pgm_error;

use serde::{Deserialize, Serialize};

use crate::channels::Ensemble;
use crate::error::{Error, Result};
use crate::qmath::entropy::matrix_entropy;
use crate::qmath::{tensor_channels, von_neumann_entropy, DensityOperator, QuantumChannel};

/// Largest input dimension handed to the optimizer by the composite checks.
pub const OPTIMIZER_DIM_LIMIT: usize = 16;

/// Outcome of a capacity maximization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CeResult {
    /// Best objective value found, in bits.
    pub value: f64,
    #[serde(rename = "rho")]
    pub argmax_rho: DensityOperator,
    pub iterations: usize,
    /// Certified upper bound on `C_E - value`.
    pub gap_bound: f64,
}

/// `H(sum p_i rho_i) - sum p_i H(rho_i)`.
pub fn holevo_chi(ens: &Ensemble) -> f64 {
    let avg = von_neumann_entropy(&ens.average());
    let mean: f64 = ens.items().iter().map(|(p, r)| p * von_neumann_entropy(r)).sum();
    avg - mean
}

/// Holevo information of the channel outputs for equiprobable
/// computational-basis inputs.
pub fn basis_input_chi(ch: &QuantumChannel) -> Result<f64> {
    let d = ch.d_in();
    let items = (0..d)
        .map(|i| Ok((1.0 / d as f64, ch.apply(&DensityOperator::basis(d, i))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(holevo_chi(&Ensemble::new(items)?))
}

/// `H(rho) + H(N(rho)) - H(E(rho))` on a raw matrix.
pub(crate) fn objective_matrix(ch: &QuantumChannel, rho: &crate::qmath::ComplexMatrix) -> f64 {
    matrix_entropy(rho) + matrix_entropy(&ch.apply_matrix(rho))
        - matrix_entropy(&ch.complementary_matrix(rho))
}

/// The entanglement-assisted objective at a given input.
pub fn ce_objective(ch: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != ch.d_in() {
        return Err(Error::dims(format!("channel input {} vs state {}", ch.d_in(), rho.dim())));
    }
    Ok(objective_matrix(ch, rho.matrix()))
}

/// `|C_E(N1 (x) N2) - C_E(N1) - C_E(N2)|`.
pub fn ce_additivity_slack(ch1: &QuantumChannel, ch2: &QuantumChannel, tol: f64) -> Result<f64> {
    let d = ch1.d_in() * ch2.d_in();
    if d > OPTIMIZER_DIM_LIMIT {
        return Err(Error::LimitExceeded(format!(
            "product input dimension {d} exceeds {OPTIMIZER_DIM_LIMIT}"
        )));
    }
    let joint = ce_maximize(&tensor_channels(ch1, ch2), tol)?.value;
    let a = ce_maximize(ch1, tol)?.value;
    let b = ce_maximize(ch2, tol)?.value;
    Ok((joint - a - b).abs())
}

/// `f(p0 rho0 + p1 rho1) - p0 f(rho0) - p1 f(rho1)` for the capacity
/// objective `f`; non-negative because `f` is concave.
pub fn concavity_slack(
    ch: &QuantumChannel,
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    p0: f64,
) -> Result<f64> {
    let mixed = rho0.mix(p0, rho1)?;
    let f = |r: &DensityOperator| ce_objective(ch, r);
    Ok(f(&mixed)? - p0 * f(rho0)? - (1.0 - p0) * f(rho1)?)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a unimodal function on `[a, b]`,
/// stopping when the bracket is narrower than `tol`. Endpoints are also
/// compared, so boundary maxima are found.
pub(crate) fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Grid scan followed by golden-section refinement around the best cell;
/// guards against shallow multi-modality of one-parameter families.
pub(crate) fn grid_golden_max(mut f: impl FnMut(f64) -> f64, cells: usize, tol: f64) -> (f64, f64) {
    let mut best = (0.0, f(0.0));
    for i in 1..=cells {
        let x = i as f64 / cells as f64;
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    let h = 1.0 / cells as f64;
    let lo = (best.0 - h).max(0.0);
    let hi = (best.0 + h).min(1.0);
    let refined = golden_max(&mut f, lo, hi, tol);
    if refined.1 >= best.1 {
        refined
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, noiseless, superdense_ensemble};
    use crate::qmath::matrix::{c, ComplexVector};

    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    #[test]
    fn chi_examples() {
        let ortho = Ensemble::new(
            (0..4).map(|i| (0.25, DensityOperator::basis(4, i))).collect(),
        )
        .unwrap();
        assert!((holevo_chi(&ortho) - 2.0).abs() < 1e-12);

        let same = Ensemble::new(vec![
            (0.3, DensityOperator::maximally_mixed(2)),
            (0.7, DensityOperator::maximally_mixed(2)),
        ])
        .unwrap();
        assert!(holevo_chi(&same).abs() < 1e-12);

        // {|0>, |+>}: average state has eigenvalues cos^2(pi/8), sin^2(pi/8).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityOperator::from_pure(&ComplexVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]))
            .unwrap();
        let ens = Ensemble::new(vec![(0.5, DensityOperator::basis(2, 0)), (0.5, plus)]).unwrap();
        let cos2 = (std::f64::consts::PI / 8.0).cos().powi(2);
        // Independent route: 2x2 trace/determinant of the average.
        let avg = ens.average();
        let m = avg.matrix();
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        let lam = 0.5 + (0.25 - det).sqrt();
        assert!((lam - cos2).abs() < 1e-12);
        assert!((holevo_chi(&ens) - h2(cos2)).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_basis_chi_matches_binary_entropy_form() {
        let ch = depolarizing(2, 2.0 / 3.0).unwrap();
        let chi = basis_input_chi(&ch).unwrap();
        assert!((chi - (1.0 - h2(1.0 / 3.0))).abs() < 1e-12);
        assert!((chi - 0.0817).abs() < 5e-5);
    }

    #[test]
    fn superdense_chi_of_noiseless_qubit() {
        let ens = superdense_ensemble(&noiseless(2).unwrap()).unwrap();
        assert!((holevo_chi(&ens) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn concavity_trivial_cases() {
        let ch = depolarizing(2, 0.3).unwrap();
        let r0 = DensityOperator::diagonal(&[0.2, 0.8]).unwrap();
        let r1 = DensityOperator::basis(2, 0);
        assert!(concavity_slack(&ch, &r0, &r0, 0.4).unwrap().abs() < 1e-12);
        assert!(concavity_slack(&ch, &r0, &r1, 1.0).unwrap().abs() < 1e-12);
        assert!(concavity_slack(&ch, &r0, &r1, 0.0).unwrap().abs() < 1e-12);
        assert!(concavity_slack(&ch, &r0, &r1, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn additivity_dimension_guard() {
        let big = noiseless(5).unwrap();
        assert!(matches!(ce_additivity_slack(&big, &big, 1e-6), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn golden_finds_interior_and_boundary() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && fx.abs() < 1e-12);
        let (x, _) = golden_max(|x| x, 0.0, 1.0, 1e-12);
        assert_eq!(x, 1.0);
    }
}
