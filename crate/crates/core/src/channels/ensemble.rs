use crate::error::{Error, Result};
use crate::qmath::matrix::ComplexMatrix;
use crate::qmath::DensityOperator;

/// Probability-weighted collection of states of equal dimension.
#[derive(Clone, Debug)]
pub struct Ensemble {
    items: Vec<(f64, DensityOperator)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let d = items.first().ok_or_else(|| Error::param("empty ensemble"))?.1.dim();
        if items.iter().any(|(_, r)| r.dim() != d) {
            return Err(Error::dims("ensemble states have different dimensions"));
        }
        if items.iter().any(|(p, _)| !(*p >= 0.0)) {
            return Err(Error::param("negative ensemble probability"));
        }
        let total: f64 = items.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::param(format!("ensemble probabilities sum to {total}")));
        }
        Ok(Ensemble { items })
    }

    pub fn items(&self) -> &[(f64, DensityOperator)] {
        &self.items
    }

    pub fn dim(&self) -> usize {
        self.items[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn average(&self) -> DensityOperator {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (p, r) in &self.items {
            m += r.matrix().scale(*p);
        }
        DensityOperator::from_trusted(m)
    }
}
