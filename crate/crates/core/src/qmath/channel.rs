use serde::{Deserialize, Serialize};

use super::matrix::{self, identity, kron, max_abs, ComplexMatrix, C_ZERO};
use super::state::{purify, DensityOperator};
use crate::error::{Error, Result};

/// Completeness tolerance for `sum_k A_k† A_k = I`.
pub const KRAUS_TOL: f64 = 1e-9;

/// A CPTP map given by a Kraus family `{A_k}`, each `d_out x d_in`.
///
/// The same family defines the complementary map to the environment,
/// `E(rho)_{kl} = tr(A_k rho A_l†)`, so the Kraus count is the environment
/// dimension.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ChannelJson", into = "ChannelJson")]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    #[serde(with = "matrix::json::vec")]
    kraus: Vec<ComplexMatrix>,
}

impl TryFrom<ChannelJson> for QuantumChannel {
    type Error = Error;
    fn try_from(j: ChannelJson) -> Result<Self> {
        QuantumChannel::new(j.kraus)
    }
}

impl From<QuantumChannel> for ChannelJson {
    fn from(c: QuantumChannel) -> Self {
        ChannelJson { kraus: c.kraus }
    }
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::param("empty Kraus list"))?;
        let (d_out, d_in) = first.shape();
        if d_in == 0 || d_out == 0 {
            return Err(Error::param("Kraus operators must be non-empty"));
        }
        for a in &kraus {
            if a.shape() != (d_out, d_in) {
                return Err(Error::dims(format!(
                    "Kraus operator is {:?}, expected {:?}",
                    a.shape(),
                    (d_out, d_in)
                )));
            }
            matrix::check_finite(a)?;
        }
        let mut sum = ComplexMatrix::zeros(d_in, d_in);
        for a in &kraus {
            sum += a.adjoint() * a;
        }
        let deviation = max_abs(&(sum - identity(d_in)));
        if deviation > KRAUS_TOL {
            return Err(Error::NotComplete { deviation });
        }
        Ok(QuantumChannel { kraus, d_in, d_out })
    }

    pub fn identity(d: usize) -> Self {
        QuantumChannel { kraus: vec![identity(d)], d_in: d, d_out: d }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Environment dimension of the Kraus representation.
    pub fn d_env(&self) -> usize {
        self.kraus.len()
    }

    fn check_input(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.d_in {
            return Err(Error::dims(format!(
                "channel input dimension {} but state dimension {}",
                self.d_in,
                rho.dim()
            )));
        }
        Ok(())
    }

    /// `N(rho) = sum_k A_k rho A_k†`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input(rho)?;
        DensityOperator::new(self.apply_matrix(rho.matrix()))
    }

    /// The complementary map, `E(rho)_{kl} = tr(A_k rho A_l†)`.
    pub fn complementary_apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input(rho)?;
        DensityOperator::new(self.complementary_matrix(rho.matrix()))
    }

    pub(crate) fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for a in &self.kraus {
            out += a * rho * a.adjoint();
        }
        out
    }

    pub(crate) fn complementary_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let c = self.kraus.len();
        let prods: Vec<ComplexMatrix> = self.kraus.iter().map(|a| a * rho).collect();
        let mut e = ComplexMatrix::from_element(c, c, C_ZERO);
        for k in 0..c {
            for l in k..c {
                // tr(A_k rho A_l†) = sum_ij (A_k rho)_ij conj(A_l)_ij
                let v = prods[k]
                    .iter()
                    .zip(self.kraus[l].iter())
                    .fold(C_ZERO, |acc, (x, y)| acc + x * y.conj());
                e[(k, l)] = v;
                e[(l, k)] = v.conj();
            }
        }
        e
    }

    /// Heisenberg-picture map `N†(Y) = sum_k A_k† Y A_k`.
    pub(crate) fn adjoint_matrix(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for a in &self.kraus {
            out += a.adjoint() * y * a;
        }
        out
    }

    /// Adjoint of the complementary map, `E†(Y) = sum_{kl} Y_{lk} A_l† A_k`.
    pub(crate) fn complementary_adjoint_matrix(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let c = self.kraus.len();
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for l in 0..c {
            let mut acc = ComplexMatrix::zeros(self.d_out, self.d_in);
            for k in 0..c {
                if y[(l, k)] != C_ZERO {
                    acc += &self.kraus[k] * y[(l, k)];
                }
            }
            out += self.kraus[l].adjoint() * acc;
        }
        out
    }

    /// `N (x) I_ref` acting on the purification `|Phi_rho>`; returns the joint
    /// output state on system (x) reference.
    pub fn apply_to_purification(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input(rho)?;
        let phi = purify(rho);
        let ext = extend_channel(self, rho.dim());
        Ok(DensityOperator::from_trusted(ext.apply_matrix(&phi.density().into_matrix())))
    }

    /// Compose with a fixed input operation: `rho -> N(U rho U†)`.
    pub fn precompose(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.d_in {
            return Err(Error::dims("precomposed map does not match channel input"));
        }
        QuantumChannel::new(self.kraus.iter().map(|a| a * u).collect())
    }
}

/// `N (x) I_ref` as the Kraus family `{A_k (x) I}`.
pub fn extend_channel(ch: &QuantumChannel, ref_dim: usize) -> QuantumChannel {
    let id = identity(ref_dim);
    QuantumChannel {
        kraus: ch.kraus.iter().map(|a| kron(a, &id)).collect(),
        d_in: ch.d_in * ref_dim,
        d_out: ch.d_out * ref_dim,
    }
}

/// `N1 (x) N2` as the Kraus family `{A_i (x) B_j}`.
pub fn tensor_channels(ch1: &QuantumChannel, ch2: &QuantumChannel) -> QuantumChannel {
    let mut kraus = Vec::with_capacity(ch1.kraus.len() * ch2.kraus.len());
    for a in &ch1.kraus {
        for b in &ch2.kraus {
            kraus.push(kron(a, b));
        }
    }
    QuantumChannel { kraus, d_in: ch1.d_in * ch2.d_in, d_out: ch1.d_out * ch2.d_out }
}
