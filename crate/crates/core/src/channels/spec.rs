use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::matrix::{self, ComplexMatrix};
use crate::qmath::QuantumChannel;
use crate::reverse_shannon::Dmc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Noiseless,
    Depolarizing,
    Erasure,
    Dephasing,
    AmplitudeDamping,
    #[serde(rename = "switched_3to2")]
    Switched3to2,
    ClassicalEmbedding,
    ExplicitKraus,
}

/// Serializable channel description:
/// `{"kind": "...", "params": {...}, "kraus": [...]}`.
///
/// `classical_embedding` reads its transition matrix from `dmc`
/// (`{"matrix": [[P(y|x), ...], ...]}`) or from a `bsc` crossover parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "matrix::json::opt_vec")]
    pub kraus: Option<Vec<ComplexMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dmc: Option<Dmc>,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind) -> Self {
        ChannelSpec { kind, params: BTreeMap::new(), kraus: None, dmc: None }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::param(format!("{:?} channel needs parameter '{key}'", self.kind)))
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn dim(&self, default: usize) -> Result<usize> {
        let d = self.get_or("d", default as f64);
        if d.fract() != 0.0 || d < 2.0 {
            return Err(Error::param(format!("dimension {d} is not an integer >= 2")));
        }
        Ok(d as usize)
    }

    pub fn build(&self) -> Result<QuantumChannel> {
        use super::*;
        match self.kind {
            ChannelKind::Noiseless => noiseless(self.dim(2)?),
            ChannelKind::Depolarizing => depolarizing(self.dim(2)?, self.get("q")?),
            ChannelKind::Erasure => erasure(self.dim(2)?, self.get("p")?),
            ChannelKind::Dephasing => partial_dephasing(self.dim(2)?, self.get_or("strength", 1.0)),
            ChannelKind::AmplitudeDamping => amplitude_damping(self.get("p")?),
            ChannelKind::Switched3to2 => Ok(switched_3to2()),
            ChannelKind::ClassicalEmbedding => {
                let dmc = match (&self.dmc, self.params.get("bsc")) {
                    (Some(d), _) => d.clone(),
                    (None, Some(&p)) => Dmc::bsc(p)?,
                    (None, None) => {
                        return Err(Error::param("classical_embedding needs 'dmc' or params.bsc"))
                    }
                };
                classical_embedding(&dmc)
            }
            ChannelKind::ExplicitKraus => {
                let kraus = self
                    .kraus
                    .clone()
                    .ok_or_else(|| Error::param("explicit_kraus needs a 'kraus' list"))?;
                QuantumChannel::new(kraus)
            }
        }
    }

    /// Parse a short preset such as `amplitude-damping:0.5`,
    /// `depolarizing:2,0.6667`, `erasure:0.5`, `noiseless:2`, `bsc:0.1`.
    pub fn from_preset(preset: &str) -> Result<Self> {
        let (name, args) = preset.split_once(':').unwrap_or((preset, ""));
        let args: Vec<f64> = if args.is_empty() {
            vec![]
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("preset '{preset}': {e}")))?
        };
        let name = name.replace('-', "_");
        let need = |n: usize| -> Result<()> {
            if args.len() > n {
                Err(Error::Parse(format!("preset '{preset}' takes at most {n} values")))
            } else {
                Ok(())
            }
        };
        let spec = match (name.as_str(), args.as_slice()) {
            ("noiseless", [d]) => ChannelSpec::new(ChannelKind::Noiseless).with("d", *d),
            ("noiseless", []) => ChannelSpec::new(ChannelKind::Noiseless),
            ("depolarizing", [q]) => ChannelSpec::new(ChannelKind::Depolarizing).with("q", *q),
            ("depolarizing", [d, q]) => {
                ChannelSpec::new(ChannelKind::Depolarizing).with("d", *d).with("q", *q)
            }
            ("erasure", [p]) => ChannelSpec::new(ChannelKind::Erasure).with("p", *p),
            ("erasure", [d, p]) => ChannelSpec::new(ChannelKind::Erasure).with("d", *d).with("p", *p),
            ("dephasing", []) => ChannelSpec::new(ChannelKind::Dephasing),
            ("dephasing", [d]) => ChannelSpec::new(ChannelKind::Dephasing).with("d", *d),
            ("amplitude_damping", [p]) => {
                ChannelSpec::new(ChannelKind::AmplitudeDamping).with("p", *p)
            }
            ("switched" | "switched_3to2", []) => ChannelSpec::new(ChannelKind::Switched3to2),
            ("bsc", [p]) => ChannelSpec::new(ChannelKind::ClassicalEmbedding).with("bsc", *p),
            _ => {
                need(0)?;
                return Err(Error::Parse(format!("unknown or malformed preset '{preset}'")));
            }
        };
        Ok(spec)
    }
}
