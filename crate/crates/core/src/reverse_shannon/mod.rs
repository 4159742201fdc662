//! Simulating a discrete memoryless channel over a noiseless bit channel
//! with shared randomness, and the tools to check that the simulation is
//! exactly faithful and asymptotically efficient.

mod harness;
mod oracle;
mod protocol;
mod randomness;

pub use harness::{
    cost_statistics, empirical_faithfulness, CostStats, FaithfulnessStats, InputSource,
    MAX_HISTOGRAM_BINS,
};
pub use oracle::{exact_faithfulness_oracle, itc_mutual_information, OracleReport, ORACLE_LIMIT};
pub use protocol::{
    bsc_receive, bsc_simulate, dmc_receive, dmc_simulate, receive, simulate, z_size, ProtocolConfig,
    SimChannel, Transcript, Variant,
};
pub use randomness::SharedRandomness;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_TOL: f64 = 1e-12;

/// Row-stochastic transition table, `matrix[x][y] = P(y | x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DmcJson", into = "DmcJson")]
pub struct Dmc {
    matrix: Vec<Vec<f64>>,
    /// Per-row cumulative sums for sampling.
    cdf: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct DmcJson {
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<DmcJson> for Dmc {
    type Error = Error;
    fn try_from(j: DmcJson) -> Result<Self> {
        Dmc::new(j.matrix)
    }
}

impl From<Dmc> for DmcJson {
    fn from(d: Dmc) -> Self {
        DmcJson { matrix: d.matrix }
    }
}

impl Dmc {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let d_out = matrix.first().map_or(0, Vec::len);
        if matrix.is_empty() || d_out == 0 {
            return Err(Error::param("DMC matrix must be non-empty"));
        }
        for (x, row) in matrix.iter().enumerate() {
            if row.len() != d_out {
                return Err(Error::dims(format!("row {x} has {} entries, expected {d_out}", row.len())));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::param(format!("row {x} has an entry outside [0,1]")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::param(format!("row {x} sums to {s}")));
            }
        }
        let cdf = matrix
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                row.iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Dmc { matrix, cdf })
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("crossover {p} outside [0,1]")));
        }
        Dmc::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Noiseless `d`-ary channel.
    pub fn identity(d: usize) -> Result<Self> {
        Dmc::new((0..d).map(|x| (0..d).map(|y| f64::from(u8::from(x == y))).collect()).collect())
    }

    pub fn inputs(&self) -> usize {
        self.matrix.len()
    }

    pub fn outputs(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.matrix[x][y]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// `(N^n)_{yx} = prod_i N(y_i | x_i)`.
    pub fn block_prob(&self, x: &[usize], y: &[usize]) -> f64 {
        x.iter().zip(y).map(|(&a, &b)| self.matrix[a][b]).product()
    }

    /// One channel use.
    pub fn sample<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let row = &self.cdf[x];
        row.iter().position(|&c| u < c).unwrap_or_else(|| {
            // u landed in the rounding slack above the last cumulative sum.
            self.matrix[x].iter().rposition(|&p| p > 0.0).unwrap_or(0)
        })
    }

    /// Output distribution `sum_x q_x N(. | x)`.
    pub fn output_dist(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.outputs()];
        for (row, &qx) in self.matrix.iter().zip(q) {
            for (o, &p) in out.iter_mut().zip(row) {
                *o += qx * p;
            }
        }
        out
    }

    fn check_dist(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.inputs() {
            return Err(Error::dims(format!("distribution has {} entries, DMC has {} inputs", q.len(), self.inputs())));
        }
        if q.iter().any(|&v| !(v >= 0.0)) || (q.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(Error::param("input distribution must be non-negative and sum to 1"));
        }
        Ok(())
    }
}

/// `D(N(.|x) || r)` in bits for every input `x`.
fn divergences(dmc: &Dmc, r: &[f64]) -> Vec<f64> {
    dmc.matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(r)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &ry)| p * (p / ry).log2())
                .sum()
        })
        .collect()
}

/// Single-letter mutual information `I(X; Y)` for input distribution `q`.
pub fn constrained_mi(dmc: &Dmc, q: &[f64]) -> Result<f64> {
    dmc.check_dist(q)?;
    let r = dmc.output_dist(q);
    let d = divergences(dmc, &r);
    Ok(q.iter().zip(&d).map(|(&qx, &dx)| if qx > 0.0 { qx * dx } else { 0.0 }).sum::<f64>().max(0.0))
}

pub const BA_MAX_ITERS: usize = 1_000_000;

/// Blahut-Arimoto iteration. Stops when `max_x D(N(.|x)||qN) - I(q)`, an
/// upper bound on the remaining gap, drops below `tol`; returns
/// `(I(q), q)`.
pub fn ba_capacity(dmc: &Dmc, tol: f64) -> Result<(f64, Vec<f64>)> {
    if !(tol > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    let m = dmc.inputs();
    let mut q = vec![1.0 / m as f64; m];
    for _ in 0..BA_MAX_ITERS {
        let r = dmc.output_dist(&q);
        let d = divergences(dmc, &r);
        let lower: f64 = q.iter().zip(&d).map(|(&qx, &dx)| qx * dx).sum();
        let upper = d.iter().copied().fold(f64::MIN, f64::max);
        if upper - lower <= tol {
            return Ok((lower.max(0.0), q));
        }
        let w: Vec<f64> = q.iter().zip(&d).map(|(&qx, &dx)| qx * dx.exp2()).collect();
        let z: f64 = w.iter().sum();
        q = w.into_iter().map(|v| v / z).collect();
    }
    Err(Error::LimitExceeded(format!("Blahut-Arimoto did not converge in {BA_MAX_ITERS} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn dmc_validation_and_json() {
        assert!(Dmc::new(vec![vec![0.5, 0.4]]).is_err());
        assert!(Dmc::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
        assert!(Dmc::new(vec![]).is_err());
        let d: Dmc = serde_json::from_str(r#"{"matrix": [[0.9, 0.1], [0.2, 0.8]]}"#).unwrap();
        assert_eq!((d.inputs(), d.outputs()), (2, 2));
        assert_eq!(d.prob(1, 0), 0.2);
        assert!(serde_json::from_str::<Dmc>(r#"{"matrix": [[0.9, 0.2]]}"#).is_err());
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"matrix":[[0.9,0.1],[0.2,0.8]]}"#);
    }

    #[test]
    fn capacities() {
        let (c, q) = ba_capacity(&Dmc::bsc(0.1).unwrap(), 1e-12).unwrap();
        assert!((c - (1.0 - h2(0.1))).abs() < 1e-9);
        assert!((q[0] - 0.5).abs() < 1e-9);
        assert!(ba_capacity(&Dmc::bsc(0.5).unwrap(), 1e-12).unwrap().0.abs() < 1e-12);
        let (c, _) = ba_capacity(&Dmc::identity(5).unwrap(), 1e-12).unwrap();
        assert!((c - 5f64.log2()).abs() < 1e-12);
        // Z channel: closed form log2(1 + (1-p) p^{p/(1-p)}).
        let p: f64 = 0.3;
        let z = Dmc::new(vec![vec![1.0, 0.0], vec![p, 1.0 - p]]).unwrap();
        let closed = (1.0 + (1.0 - p) * p.powf(p / (1.0 - p))).log2();
        assert!((ba_capacity(&z, 1e-12).unwrap().0 - closed).abs() < 1e-9);
    }

    #[test]
    fn mutual_information() {
        let bsc = Dmc::bsc(0.1).unwrap();
        assert!(constrained_mi(&bsc, &[1.0, 0.0]).unwrap().abs() < 1e-15);
        assert!((constrained_mi(&bsc, &[0.5, 0.5]).unwrap() - (1.0 - h2(0.1))).abs() < 1e-12);
        assert!(constrained_mi(&bsc, &[0.5, 0.6]).is_err());
    }
}
