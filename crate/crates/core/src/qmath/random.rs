//! Haar-ish random states, unitaries and channels for property sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use super::channel::QuantumChannel;
use super::matrix::{c, ComplexMatrix, ComplexVector};
use super::state::DensityOperator;

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Orthonormalize the columns of a Gaussian matrix, fixing the phase
/// ambiguity of QR so the result is Haar distributed.
fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let qr = ginibre(rng, rows, cols).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    haar_isometry(rng, d, d)
}

pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexVector {
    let g = ginibre(rng, d, 1);
    let v: ComplexVector = g.column(0).into_owned();
    let n = v.norm();
    v.unscale(n)
}

/// Full-rank random state from the Ginibre ensemble.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let g = ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityOperator::from_trusted(m.unscale(t))
}

/// Random channel with `n_kraus` Kraus operators from a Haar-random
/// Stinespring isometry `C^{d_in} -> C^{d_out} (x) C^{n_kraus}`.
/// Panics unless `d_out * n_kraus >= d_in`, since no such isometry exists.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    d_in: usize,
    d_out: usize,
    n_kraus: usize,
) -> QuantumChannel {
    assert!(d_out * n_kraus >= d_in, "need d_out * n_kraus >= d_in for a trace-preserving map");
    let v = haar_isometry(rng, d_out * n_kraus, d_in);
    let kraus = (0..n_kraus)
        .map(|k| v.rows(k * d_out, d_out).into_owned())
        .collect();
    QuantumChannel::new(kraus).expect("isometry blocks form a complete Kraus family")
}
