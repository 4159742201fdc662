//! Constructors for the standard channels, generalized Pauli operators, the
//! classical-channel embedding and the superdense-coding ensemble.

mod ensemble;
mod spec;

pub use ensemble::Ensemble;
pub use spec::{ChannelKind, ChannelSpec};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qmath::matrix::{self, c, cr, identity, ket_bra, ComplexMatrix, ComplexVector, C_ZERO};
use crate::qmath::{extend_channel, PureState, QuantumChannel};
use crate::reverse_shannon::Dmc;

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::param(format!("{name} = {p} outside [0,1]")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::param(format!("dimension {d} < 2")));
    }
    Ok(())
}

/// `U_{j,k} = T^j R^k`, with `T|b> = |b-1 mod d>` and `R = diag(e^{2 pi i a/d})`.
pub fn generalized_pauli(d: usize, j: usize, k: usize) -> Result<ComplexMatrix> {
    if d == 0 || j >= d || k >= d {
        return Err(Error::param(format!("Pauli index ({j},{k}) out of range for d={d}")));
    }
    let mut u = ComplexMatrix::from_element(d, d, C_ZERO);
    for b in 0..d {
        let a = (b + d - j) % d;
        let phase = 2.0 * PI * (b * k) as f64 / d as f64;
        u[(a, b)] = c(phase.cos(), phase.sin());
    }
    Ok(u)
}

pub fn noiseless(d: usize) -> Result<QuantumChannel> {
    check_dim(d)?;
    Ok(QuantumChannel::identity(d))
}

/// `rho -> (1-q) rho + q I/d`.
pub fn depolarizing(d: usize, q: f64) -> Result<QuantumChannel> {
    check_dim(d)?;
    check_prob("q", q)?;
    let d2 = (d * d) as f64;
    let mut kraus = vec![identity(d).scale((1.0 - q + q / d2).sqrt())];
    if q > 0.0 {
        let w = (q / d2).sqrt();
        for j in 0..d {
            for k in 0..d {
                if (j, k) != (0, 0) {
                    kraus.push(generalized_pauli(d, j, k)?.scale(w));
                }
            }
        }
    }
    QuantumChannel::new(kraus)
}

/// Transmits with probability `1-p`, otherwise outputs the flag `|d><d|`.
/// Output dimension is `d + 1`.
pub fn erasure(d: usize, p: f64) -> Result<QuantumChannel> {
    check_dim(d)?;
    check_prob("p", p)?;
    let mut embed = ComplexMatrix::zeros(d + 1, d);
    for i in 0..d {
        embed[(i, i)] = cr(1.0);
    }
    let mut kraus = vec![embed.scale((1.0 - p).sqrt())];
    if p > 0.0 {
        for i in 0..d {
            kraus.push(ket_bra(d + 1, d, d, i).scale(p.sqrt()));
        }
    }
    QuantumChannel::new(kraus)
}

/// Complete dephasing in the computational basis, Kraus `{|i><i|}`.
pub fn dephasing(d: usize) -> Result<QuantumChannel> {
    partial_dephasing(d, 1.0)
}

/// With probability `strength` measure in the computational basis, else
/// leave the state alone. `strength = 1` is complete dephasing.
pub fn partial_dephasing(d: usize, strength: f64) -> Result<QuantumChannel> {
    check_dim(d)?;
    check_prob("strength", strength)?;
    let mut kraus = Vec::with_capacity(d + 1);
    if strength < 1.0 {
        kraus.push(identity(d).scale((1.0 - strength).sqrt()));
    }
    for i in 0..d {
        kraus.push(ket_bra(d, i, d, i).scale(strength.sqrt()));
    }
    QuantumChannel::new(kraus)
}

/// Qubit amplitude damping: `A1 = diag(1, sqrt(1-p))`, `A2 = sqrt(p) |0><1|`.
pub fn amplitude_damping(p: f64) -> Result<QuantumChannel> {
    check_prob("p", p)?;
    let a1 = matrix::diag_real(&[1.0, (1.0 - p).sqrt()]);
    let a2 = ket_bra(2, 0, 2, 1).scale(p.sqrt());
    QuantumChannel::new(vec![a1, a2])
}

/// Three qubits in, two out, switched by the first input qubit.
///
/// Input basis index is `4 q1 + 2 q2 + q3`; output index is `2 o1 + o2`.
///
/// - `q1 = 0`: qubits 2 and 3 are measured and emitted as classical bits,
///   Kraus `|ab><0ab|` for `a, b` in {0,1}.
/// - `q1 = 1`: input qubit 2 goes intact to output slot 1, input qubit 3 is
///   discarded and output slot 2 holds `I/2`. Kraus
///   `K_{c,e} = (1/sqrt 2) sum_psi |psi e><1 psi c|` for `c, e` in {0,1}.
///
/// That is eight operators in total.
pub fn switched_3to2() -> QuantumChannel {
    let mut kraus = Vec::with_capacity(8);
    for a in 0..2 {
        for b in 0..2 {
            kraus.push(ket_bra(4, 2 * a + b, 8, 2 * a + b));
        }
    }
    let w = std::f64::consts::FRAC_1_SQRT_2;
    for cbit in 0..2 {
        for e in 0..2 {
            let mut k = ComplexMatrix::zeros(4, 8);
            for psi in 0..2 {
                k[(2 * psi + e, 4 + 2 * psi + cbit)] = cr(w);
            }
            kraus.push(k);
        }
    }
    QuantumChannel::new(kraus).expect("switched channel Kraus family is complete")
}

/// A DMC as a quantum channel, Kraus `{sqrt(N_yx) |y><x|}`.
pub fn classical_embedding(dmc: &Dmc) -> Result<QuantumChannel> {
    let (di, dout) = (dmc.inputs(), dmc.outputs());
    let mut kraus = Vec::new();
    for x in 0..di {
        for y in 0..dout {
            let p = dmc.prob(x, y);
            if p > 0.0 {
                kraus.push(ket_bra(dout, y, di, x).scale(p.sqrt()));
            }
        }
    }
    QuantumChannel::new(kraus)
}

/// `(1/sqrt d) sum_i |i>|i>`.
pub fn maximally_entangled(d: usize) -> Result<PureState> {
    check_dim(d)?;
    let w = 1.0 / (d as f64).sqrt();
    let mut v = ComplexVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = cr(w);
    }
    PureState::new(v, vec![d, d])
}

/// The `d^2` equiprobable states `(N (x) I)(U_{jk} (x) I) phi` obtained by
/// encoding with generalized Paulis on half of a maximally entangled pair.
pub fn superdense_ensemble(ch: &QuantumChannel) -> Result<Ensemble> {
    let d = ch.d_in();
    check_dim(d)?;
    let phi = maximally_entangled(d)?;
    let ext = extend_channel(ch, d);
    let id = identity(d);
    let p = 1.0 / (d * d) as f64;
    let mut items = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            let u = matrix::kron(&generalized_pauli(d, j, k)?, &id);
            let encoded = PureState::new(&u * phi.vector(), vec![d, d])?;
            items.push((p, ext.apply(&encoded.density())?));
        }
    }
    Ensemble::new(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::matrix::{max_abs, trace_product};
    use crate::qmath::{von_neumann_entropy, DensityOperator};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) < tol
    }

    #[test]
    fn pauli_orthogonality_and_unitarity() {
        for d in 2..=5 {
            assert!(close(&generalized_pauli(d, 0, 0).unwrap(), &identity(d), 1e-15));
            for j in 0..d {
                for k in 0..d {
                    let u = generalized_pauli(d, j, k).unwrap();
                    assert!(close(&(u.adjoint() * &u), &identity(d), 1e-10));
                    for j2 in 0..d {
                        for k2 in 0..d {
                            let u2 = generalized_pauli(d, j2, k2).unwrap();
                            let t = trace_product(&u.adjoint(), &u2);
                            let expect = if (j, k) == (j2, k2) { d as f64 } else { 0.0 };
                            assert!((t - cr(expect)).norm() < 1e-10);
                        }
                    }
                }
            }
        }
        assert!(generalized_pauli(2, 2, 0).is_err());
    }

    #[test]
    fn qubit_paulis_up_to_phase() {
        let x = generalized_pauli(2, 1, 0).unwrap();
        let z = generalized_pauli(2, 0, 1).unwrap();
        assert!(close(&x, &matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), 1e-15));
        assert!(close(&z, &matrix::diag_real(&[1.0, -1.0]), 1e-15));
    }

    #[test]
    fn depolarizing_limits() {
        let rho = DensityOperator::diagonal(&[0.9, 0.1]).unwrap();
        let id = depolarizing(2, 0.0).unwrap();
        assert_eq!(id.d_env(), 1);
        assert!(close(id.apply(&rho).unwrap().matrix(), rho.matrix(), 1e-15));
        let full = depolarizing(3, 1.0).unwrap();
        let r3 = DensityOperator::basis(3, 2);
        assert!(close(full.apply(&r3).unwrap().matrix(), &identity(3).scale(1.0 / 3.0), 1e-12));
        assert!(depolarizing(1, 0.5).is_err());
        assert!(depolarizing(2, 1.5).is_err());
    }

    #[test]
    fn erasure_shapes() {
        let e = erasure(2, 0.5).unwrap();
        assert_eq!((e.d_in(), e.d_out()), (2, 3));
        let out = e.apply(&DensityOperator::basis(2, 1)).unwrap();
        assert!(close(out.matrix(), &matrix::diag_real(&[0.0, 0.5, 0.5]), 1e-15));
        let gone = erasure(2, 1.0).unwrap().apply(&DensityOperator::basis(2, 0)).unwrap();
        assert!(close(gone.matrix(), &DensityOperator::basis(3, 2).into_matrix(), 1e-15));
    }

    #[test]
    fn dephasing_kills_coherences() {
        let plus = DensityOperator::new(matrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap();
        let out = dephasing(2).unwrap().apply(&plus).unwrap();
        assert!(close(out.matrix(), &identity(2).scale(0.5), 1e-15));
        let diag = DensityOperator::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert!(close(dephasing(3).unwrap().apply(&diag).unwrap().matrix(), diag.matrix(), 1e-15));
        let half = partial_dephasing(2, 0.5).unwrap().apply(&plus).unwrap();
        assert!((half.matrix()[(0, 1)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn amplitude_damping_limits() {
        assert!(close(
            amplitude_damping(1.0).unwrap().apply(&DensityOperator::basis(2, 1)).unwrap().matrix(),
            DensityOperator::basis(2, 0).matrix(),
            1e-15
        ));
        let ad = amplitude_damping(0.37).unwrap();
        let k = ad.kraus();
        let sum = k[0].adjoint() * &k[0] + k[1].adjoint() * &k[1];
        assert!(close(&sum, &identity(2), 1e-15));
        assert!(amplitude_damping(-0.1).is_err());
    }

    #[test]
    fn switched_channel_branches() {
        let ch = switched_3to2();
        assert_eq!((ch.d_in(), ch.d_out(), ch.d_env()), (8, 4, 8));
        for a in 0..2 {
            for b in 0..2 {
                let out = ch.apply(&DensityOperator::basis(8, 2 * a + b)).unwrap();
                assert!(close(out.matrix(), DensityOperator::basis(4, 2 * a + b).matrix(), 1e-15));
            }
        }
        // |1> (x) |+> (x) |b>  ->  |+><+| (x) I/2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for b in 0..2 {
            let mut v = ComplexVector::zeros(8);
            v[4 + b] = cr(s);
            v[4 + 2 + b] = cr(s);
            let out = ch.apply(&DensityOperator::from_pure(&v).unwrap()).unwrap();
            let plus = matrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
            let expect = matrix::kron(&plus, &identity(2).scale(0.5));
            assert!(close(out.matrix(), &expect, 1e-15));
        }
    }

    #[test]
    fn classical_embedding_of_identity_is_dephasing() {
        let dmc = Dmc::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let ch = classical_embedding(&dmc).unwrap();
        let plus = DensityOperator::new(matrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap();
        assert!(close(ch.apply(&plus).unwrap().matrix(), &identity(2).scale(0.5), 1e-15));
    }

    #[test]
    fn maximally_entangled_marginals() {
        for d in 2..=4 {
            let phi = maximally_entangled(d).unwrap();
            for side in 0..2 {
                let r = phi.reduced(&[side]).unwrap();
                assert!(close(r.matrix(), &identity(d).scale(1.0 / d as f64), 1e-14));
                assert!((von_neumann_entropy(&r) - (d as f64).log2()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn superdense_average_factorizes() {
        let ch = amplitude_damping(0.3).unwrap();
        let ens = superdense_ensemble(&ch).unwrap();
        let avg = ens.average();
        let expect = ch
            .apply(&DensityOperator::maximally_mixed(2))
            .unwrap()
            .tensor(&DensityOperator::maximally_mixed(2));
        assert!(close(avg.matrix(), expect.matrix(), 1e-9));
    }
}
