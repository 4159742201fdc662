//! Monte-Carlo statistics over many independent protocol runs.
//!
//! Trial `t` uses shared randomness `base.child("trial", t)` and a private
//! generator seeded from `base.child("private", t)`, so results do not
//! depend on how trials are spread over threads.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::protocol::{h2, receive, simulate, ProtocolConfig, SimChannel, Transcript};
use super::{ba_capacity, constrained_mi, Dmc, SharedRandomness};
use crate::error::{Error, Result};
use crate::typeclasses::{sample_from_type, type_count, type_from_rank};

/// Largest output alphabet `d_out^n` the histogram check accepts.
pub const MAX_HISTOGRAM_BINS: usize = 10_000;
const MIN_FAITHFULNESS_TRIALS: u64 = 1_000;
const MIN_EXPECTED: f64 = 5.0;

/// Runs `f` on a pool capped by `QCAP_THREADS` when it is set.
pub(crate) fn with_threads<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = match std::env::var("QCAP_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| Error::param(format!("QCAP_THREADS={v} is not a count")))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn trial_streams(base: &SharedRandomness, t: u64) -> (SharedRandomness, Xoshiro256PlusPlus) {
    (base.child("trial", t), Xoshiro256PlusPlus::seed_from_u64(base.child("private", t).seed))
}

fn output_index(y: &[usize], d_out: usize) -> usize {
    y.iter().fold(0, |acc, &b| acc * d_out + b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessStats {
    pub trials: u64,
    /// Total variation between the empirical histogram and `N^n(.|x)`.
    pub tv_estimate: f64,
    pub chi2_statistic: f64,
    /// Degrees of freedom after pooling bins with expected count below 5.
    pub chi2_dof: usize,
    pub chi2_pvalue: f64,
    pub fallback_rate: f64,
}

/// Histogram of outputs for the fixed input `x` against the exact `N^n(.|x)`.
pub fn empirical_faithfulness(
    ch: &SimChannel,
    cfg: &ProtocolConfig,
    x: &[usize],
    trials: u64,
    seed: u64,
) -> Result<FaithfulnessStats> {
    cfg.validate()?;
    if trials < MIN_FAITHFULNESS_TRIALS {
        return Err(Error::param(format!("need at least {MIN_FAITHFULNESS_TRIALS} trials")));
    }
    let dmc = ch.to_dmc()?;
    let d_out = dmc.outputs();
    let bins = (d_out as u64)
        .checked_pow(cfg.n as u32)
        .filter(|&b| b <= MAX_HISTOGRAM_BINS as u64)
        .ok_or_else(|| Error::LimitExceeded(format!("{d_out}^{} output bins", cfg.n)))? as usize;
    if x.len() != cfg.n {
        return Err(Error::dims(format!("input has length {}, block length is {}", x.len(), cfg.n)));
    }

    let base = SharedRandomness::new(seed);
    let outcomes: Vec<(usize, bool)> = with_threads(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let (shared, mut private) = trial_streams(&base, t);
                let (y, tr) = simulate(ch, cfg, &shared, x, &mut private)?;
                Ok((output_index(&y, d_out), tr.fallback))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut counts = vec![0u64; bins];
    for &(i, _) in &outcomes {
        counts[i] += 1;
    }
    let fallbacks = outcomes.iter().filter(|o| o.1).count();
    let total = trials as f64;
    let mut tv = 0.0;
    let mut chi2 = 0.0;
    let mut kept = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    let mut y = vec![0usize; cfg.n];
    for (i, &c) in counts.iter().enumerate() {
        let mut v = i;
        for slot in y.iter_mut().rev() {
            *slot = v % d_out;
            v /= d_out;
        }
        let p = dmc.block_prob(x, &y);
        tv += (c as f64 / total - p).abs();
        let e = p * total;
        if e >= MIN_EXPECTED {
            chi2 += (c as f64 - e).powi(2) / e;
            kept += 1;
        } else {
            pooled_obs += c as f64;
            pooled_exp += e;
        }
    }
    if pooled_exp > 0.0 {
        chi2 += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        kept += 1;
    } else if pooled_obs > 0.0 {
        // Observed an output of probability zero.
        chi2 = f64::INFINITY;
    }
    let dof = kept.saturating_sub(1);
    let pvalue = if chi2.is_infinite() {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map_err(|e| Error::param(e.to_string()))?.sf(chi2)
    };
    Ok(FaithfulnessStats {
        trials,
        tv_estimate: tv / 2.0,
        chi2_statistic: chi2,
        chi2_dof: dof,
        chi2_pvalue: pvalue,
        fallback_rate: fallbacks as f64 / total,
    })
}

/// Where each trial's input string comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Fixed(Vec<usize>),
    /// Letters i.i.d. from the given distribution.
    Iid(Vec<f64>),
    /// A type class chosen uniformly, then a uniform member of it.
    ItcUniform,
}

impl FromStr for InputSource {
    type Err = Error;

    /// `fixed:0110` (or `fixed:0,2,1` for larger alphabets), `iid:0.3,0.7`,
    /// `itc-uniform`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized input source `{s}`"));
        if s == "itc-uniform" {
            return Ok(InputSource::ItcUniform);
        }
        let (kind, body) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "fixed" => {
                let letters: Option<Vec<usize>> = if body.contains(',') {
                    body.split(',').map(|t| t.trim().parse::<usize>().ok()).collect()
                } else {
                    body.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
                };
                match letters {
                    Some(x) if !x.is_empty() => Ok(InputSource::Fixed(x)),
                    _ => Err(bad()),
                }
            }
            "iid" => Ok(InputSource::Iid(
                body.split(',').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?,
            )),
            _ => Err(bad()),
        }
    }
}

impl InputSource {
    fn check(&self, n: usize, dmc: &Dmc) -> Result<()> {
        match self {
            InputSource::Fixed(x) => {
                if x.len() != n {
                    return Err(Error::dims(format!("fixed input has length {}, block length is {n}", x.len())));
                }
                if x.iter().any(|&a| a >= dmc.inputs()) {
                    return Err(Error::param("fixed input letter outside the input alphabet"));
                }
                Ok(())
            }
            InputSource::Iid(q) => constrained_mi(dmc, q).map(|_| ()),
            InputSource::ItcUniform => {
                type_count(n, dmc.inputs()).ok_or_else(|| Error::LimitExceeded("too many type classes".into()))?;
                Ok(())
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, n: usize, d_in: usize, rng: &mut R) -> Result<Vec<usize>> {
        Ok(match self {
            InputSource::Fixed(x) => x.clone(),
            InputSource::Iid(q) => (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    q.iter()
                        .position(|&p| {
                            acc += p;
                            u < acc
                        })
                        .unwrap_or_else(|| q.iter().rposition(|&p| p > 0.0).unwrap_or(0))
                })
                .collect(),
            InputSource::ItcUniform => {
                let count = type_count(n, d_in).expect("checked");
                let tc = type_from_rank(n, d_in, rng.random_range(0..count))?;
                sample_from_type(&tc, rng)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostStats {
    pub n: usize,
    pub trials: u64,
    pub capacity: f64,
    /// `n (C + eps)`.
    pub threshold_bits: f64,
    pub mean_bits: f64,
    pub mean_bits_per_symbol: f64,
    pub se_bits_per_symbol: f64,
    /// Fraction of runs with `m_n > n (C + eps)`.
    pub p_exceed: f64,
    pub se_p_exceed: f64,
    pub fallback_rate: f64,
    pub se_fallback_rate: f64,
    pub mean_itc_bits: f64,
    /// `I(N, q)` when inputs are drawn i.i.d. from `q`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_information: Option<f64>,
    /// Runs where the receiver's reconstruction differed from the sender's output.
    pub receiver_mismatches: u64,
}

/// Communication cost over `trials` independent runs.
pub fn cost_statistics(
    ch: &SimChannel,
    cfg: &ProtocolConfig,
    trials: u64,
    source: &InputSource,
    seed: u64,
) -> Result<CostStats> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    let dmc = ch.to_dmc()?;
    source.check(cfg.n, &dmc)?;
    let capacity = match ch {
        SimChannel::Bsc(p) => 1.0 - h2(*p),
        SimChannel::Dmc(d) => ba_capacity(d, 1e-12)?.0,
    };
    let threshold = cfg.n as f64 * (capacity + cfg.eps);
    let base = SharedRandomness::new(seed);

    let runs: Vec<(Transcript, bool)> = with_threads(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let (shared, mut private) = trial_streams(&base, t);
                let x = source.draw(cfg.n, dmc.inputs(), &mut private)?;
                let (y, tr) = simulate(ch, cfg, &shared, &x, &mut private)?;
                let ok = receive(ch, cfg, &shared, &tr.message)? == y;
                Ok((tr, ok))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let m = trials as f64;
    let n = cfg.n as f64;
    let per_symbol: Vec<f64> = runs.iter().map(|(t, _)| t.bits_sent as f64 / n).collect();
    let mean = per_symbol.iter().sum::<f64>() / m;
    let var = if trials > 1 { per_symbol.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    let rate = |hits: usize| {
        let p = hits as f64 / m;
        (p, (p * (1.0 - p) / m).sqrt())
    };
    let (p_exceed, se_p_exceed) = rate(runs.iter().filter(|(t, _)| t.bits_sent as f64 > threshold).count());
    let (fallback_rate, se_fallback_rate) = rate(runs.iter().filter(|(t, _)| t.fallback).count());
    Ok(CostStats {
        n: cfg.n,
        trials,
        capacity,
        threshold_bits: threshold,
        mean_bits: mean * n,
        mean_bits_per_symbol: mean,
        se_bits_per_symbol: (var / m).sqrt(),
        p_exceed,
        se_p_exceed,
        fallback_rate,
        se_fallback_rate,
        mean_itc_bits: runs.iter().map(|(t, _)| t.itc_bits as f64).sum::<f64>() / m,
        source_information: match source {
            InputSource::Iid(q) => Some(constrained_mi(&dmc, q)?),
            _ => None,
        },
        receiver_mismatches: runs.iter().filter(|(_, ok)| !ok).count() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reverse_shannon::Variant;

    #[test]
    fn parse_sources() {
        assert_eq!("fixed:0110".parse::<InputSource>().unwrap(), InputSource::Fixed(vec![0, 1, 1, 0]));
        assert_eq!("fixed:0,12,1".parse::<InputSource>().unwrap(), InputSource::Fixed(vec![0, 12, 1]));
        assert_eq!("iid:0.25,0.75".parse::<InputSource>().unwrap(), InputSource::Iid(vec![0.25, 0.75]));
        assert_eq!("itc-uniform".parse::<InputSource>().unwrap(), InputSource::ItcUniform);
        for bad in ["fixed:01a", "iid:x", "uniform", "foo:1"] {
            assert!(bad.parse::<InputSource>().is_err(), "{bad}");
        }
    }

    #[test]
    fn deterministic_channel_has_zero_tv() {
        let cfg = ProtocolConfig::new(4, 0.5, Variant::Bsc).unwrap();
        let s = empirical_faithfulness(&SimChannel::Bsc(0.0), &cfg, &[1, 0, 1, 1], 1000, 3).unwrap();
        assert_eq!(s.tv_estimate, 0.0);
        assert_eq!(s.chi2_pvalue, 1.0);
    }

    #[test]
    fn bsc_histogram_passes() {
        let cfg = ProtocolConfig::new(4, 0.5, Variant::Bsc).unwrap();
        let s = empirical_faithfulness(&SimChannel::Bsc(0.2), &cfg, &[1, 0, 0, 1], 20_000, 5).unwrap();
        assert!(s.chi2_pvalue > 1e-3, "{s:?}");
        assert!(s.tv_estimate < 0.03);
        assert!(empirical_faithfulness(&SimChannel::Bsc(0.2), &cfg, &[1, 0, 0, 1], 10, 5).is_err());
    }

    #[test]
    fn cost_stats_are_consistent() {
        let cfg = ProtocolConfig::new(8, 0.25, Variant::Bsc).unwrap();
        let ch = SimChannel::Bsc(0.1);
        let a = cost_statistics(&ch, &cfg, 500, &InputSource::Iid(vec![0.5, 0.5]), 1).unwrap();
        let b = cost_statistics(&ch, &cfg, 500, &InputSource::Iid(vec![0.5, 0.5]), 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.receiver_mismatches, 0);
        assert!(a.mean_bits_per_symbol > 0.0 && a.p_exceed >= a.fallback_rate - 1e-12);
        assert!((a.source_information.unwrap() - a.capacity).abs() < 1e-12);

        let dmc = Dmc::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]]).unwrap();
        let cfg = ProtocolConfig::new(6, 0.5, Variant::General).unwrap();
        let s = cost_statistics(&SimChannel::Dmc(dmc), &cfg, 300, &InputSource::ItcUniform, 2).unwrap();
        assert_eq!(s.receiver_mismatches, 0);
        assert_eq!(s.mean_itc_bits, 3.0);
        assert!(cost_statistics(&ch, &cfg, 10, &InputSource::Fixed(vec![0, 1]), 0).is_err());
    }
}
