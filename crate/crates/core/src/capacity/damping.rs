//! One-parameter optimizations for the qubit amplitude-damping channel.

use crate::channels::{amplitude_damping, Ensemble};
use crate::error::{Error, Result};
use crate::qmath::matrix::{diag_real, from_real_rows};
use crate::qmath::DensityOperator;

use super::{golden_max, grid_golden_max, holevo_chi, objective_matrix};

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("damping probability {p} outside [0,1]")));
    }
    Ok(())
}

/// Entanglement-assisted capacity over the diagonal inputs `diag(1-x, x)`,
/// which contain a maximizer by the phase symmetry of the channel.
/// Returns `(value, x*)`.
pub fn ad_ce(p: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    let ch = amplitude_damping(p)?;
    let (x, v) = golden_max(|x| objective_matrix(&ch, &diag_real(&[1.0 - x, x])), 0.0, 1.0, 1e-10);
    Ok((v, x))
}

/// Holevo information of the equiprobable pair
/// `rho_{x,+-} = [[1-x, +-sqrt(x(1-x))], [+-sqrt(x(1-x)), x]]`, maximized
/// over `x`. This is the optimum within that two-state family only.
/// Returns `(value, x*)`.
pub fn ad_ch(p: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    let ch = amplitude_damping(p)?;
    let chi = |x: f64| {
        let off = (x * (1.0 - x)).max(0.0).sqrt();
        let sig = |s: f64| {
            let m = from_real_rows(&[&[1.0 - x, s * off], &[s * off, x]]);
            DensityOperator::from_trusted(ch.apply_matrix(&m))
        };
        Ensemble::new(vec![(0.5, sig(1.0)), (0.5, sig(-1.0))]).map(|e| holevo_chi(&e)).unwrap_or(0.0)
    };
    let (x, v) = grid_golden_max(chi, 200, 1e-10);
    Ok((v, x))
}

/// Leading-order terms as `p -> 1`:
/// `C_E ~ -x (1-p) log2(1-p)` and `C_H ~ -x (1-x) (1-p) log2(1-p)`.
pub fn ad_asymptotics(p: f64, x: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) || !(x > 0.0 && x < 1.0) {
        return Err(Error::param(format!("need p, x in (0,1), got p={p}, x={x}")));
    }
    let base = -(1.0 - p) * (1.0 - p).log2();
    Ok((x * base, x * (1.0 - x) * base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::ce_maximize;

    #[test]
    fn endpoints() {
        let (v, x) = ad_ce(0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-12 && (x - 0.5).abs() < 1e-6);
        assert!(ad_ce(1.0).unwrap().0.abs() < 1e-12);
        let (v, x) = ad_ch(0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12 && (x - 0.5).abs() < 1e-6);
        assert!(ad_ch(1.0).unwrap().0.abs() < 1e-12);
        assert!(ad_ce(1.5).is_err());
    }

    #[test]
    fn one_parameter_matches_full_optimizer() {
        for p in [0.2, 0.5, 0.8] {
            let (v, _) = ad_ce(p).unwrap();
            let full = ce_maximize(&amplitude_damping(p).unwrap(), 1e-9).unwrap();
            assert!((v - full.value).abs() < 1e-5, "p={p}: {v} vs {}", full.value);
        }
    }

    #[test]
    fn leading_terms() {
        let (ce1, _) = ad_asymptotics(0.99, 1.0 - 1e-9).unwrap();
        let (_, ch_half) = ad_asymptotics(0.99, 0.5).unwrap();
        assert!((ce1 / ch_half - 4.0).abs() < 1e-6);
        let (_, a) = ad_asymptotics(0.9, 0.2).unwrap();
        let (_, b) = ad_asymptotics(0.9, 0.8).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(ad_asymptotics(1.0, 0.5).is_err());
    }
}
