//! Exhaustive check of exact faithfulness.
//!
//! Works on the abstract protocol rather than on the seeded
//! implementation: the members of `Z` are i.i.d. draws from the
//! distribution the sender's generator targets (uniform strings for the
//! BSC variant, the output of a uniform member of the input's type class
//! for the general one), and every `Z` tuple, provisional output and pick
//! is enumerated with its probability.

use serde::{Deserialize, Serialize};

use super::protocol::{z_size, ProtocolConfig, SimChannel, Variant};
use super::{constrained_mi, Dmc};
use crate::error::{Error, Result};
use crate::typeclasses::{joint_type, type_of, JointType, TypeClass};

/// Cap on enumerated `(x, y, Z)` combinations.
pub const ORACLE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// `max |S_n - N^n|` over all entries.
    pub deviation: f64,
    /// Induced transition table, `induced[x][y]`, strings in lexicographic order.
    pub induced: Vec<Vec<f64>>,
    pub combinations: u64,
}

/// All strings of length `n` over `0..d`, lexicographic.
fn strings(n: usize, d: usize) -> Result<Vec<Vec<usize>>> {
    let total = (d as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= ORACLE_LIMIT)
        .ok_or_else(|| Error::LimitExceeded(format!("{d}^{n} strings")))?;
    Ok((0..total)
        .map(|mut v| {
            let mut s = vec![0; n];
            for slot in s.iter_mut().rev() {
                *slot = (v % d as u64) as usize;
                v /= d as u64;
            }
            s
        })
        .collect())
}

#[derive(PartialEq)]
enum Class {
    Distance(usize),
    Joint(JointType),
}

fn class_of(variant: Variant, x: &[usize], y: &[usize], dmc: &Dmc) -> Result<Class> {
    Ok(match variant {
        Variant::Bsc => Class::Distance(x.iter().zip(y).filter(|(a, b)| a != b).count()),
        Variant::General => Class::Joint(joint_type(x, y, dmc.inputs(), dmc.outputs())?),
    })
}

/// Distribution of one member of the general variant's shared set for
/// type class `tc`: `mu(y) = avg_{x' in T} N^n(y | x')`.
fn itc_output_dist(dmc: &Dmc, tc: &TypeClass, xs: &[Vec<usize>], ys: &[Vec<usize>]) -> Result<Vec<f64>> {
    let members: Vec<&Vec<usize>> =
        xs.iter().filter(|x| type_of(x, dmc.inputs()).map(|t| &t == tc).unwrap_or(false)).collect();
    let w = 1.0 / members.len() as f64;
    Ok(ys.iter().map(|y| members.iter().map(|x| dmc.block_prob(x, y)).sum::<f64>() * w).collect())
}

/// Enumerates the protocol exactly and returns the induced channel and its
/// deviation from `N^n`.
pub fn exact_faithfulness_oracle(ch: &SimChannel, cfg: &ProtocolConfig) -> Result<OracleReport> {
    cfg.validate()?;
    if cfg.variant == Variant::Bsc && !matches!(ch, SimChannel::Bsc(_)) {
        return Err(Error::param("the BSC variant needs a binary symmetric channel"));
    }
    let dmc = ch.to_dmc()?;
    let n = cfg.n;
    let xs = strings(n, dmc.inputs())?;
    let ys = strings(n, dmc.outputs())?;
    let mut induced = vec![vec![0.0; ys.len()]; xs.len()];
    let mut combinations = 0u64;
    let mut deviation = 0f64;

    for (xi, x) in xs.iter().enumerate() {
        let (z, mu) = match cfg.variant {
            Variant::Bsc => {
                let SimChannel::Bsc(p) = ch else { unreachable!() };
                let c = 1.0 - super::protocol::h2(*p);
                (z_size(c, cfg)?, vec![1.0 / ys.len() as f64; ys.len()])
            }
            Variant::General => {
                let tc = type_of(x, dmc.inputs())?;
                (z_size(constrained_mi(&dmc, &tc.frequencies())?, cfg)?, itc_output_dist(&dmc, &tc, &xs, &ys)?)
            }
        };
        let support: Vec<usize> = (0..ys.len()).filter(|&i| mu[i] > 0.0).collect();
        let tuples = (support.len() as u64)
            .checked_pow(u32::try_from(z).unwrap_or(u32::MAX))
            .and_then(|t| t.checked_mul(ys.len() as u64))
            .ok_or_else(|| Error::LimitExceeded("shared set too large to enumerate".into()))?;
        combinations = combinations.saturating_add(tuples);
        if combinations > ORACLE_LIMIT {
            return Err(Error::LimitExceeded(format!("more than {ORACLE_LIMIT} combinations")));
        }
        let classes: Vec<Class> = ys.iter().map(|y| class_of(cfg.variant, x, y, &dmc)).collect::<Result<_>>()?;
        let z = z as usize;
        let row = &mut induced[xi];

        for (yi, py) in ys.iter().map(|y| dmc.block_prob(x, y)).enumerate() {
            if py == 0.0 {
                continue;
            }
            // Odometer over Z tuples drawn from the support of mu.
            let mut digits = vec![0usize; z];
            loop {
                let tuple: Vec<usize> = digits.iter().map(|&d| support[d]).collect();
                let pz: f64 = tuple.iter().map(|&t| mu[t]).product();
                let hits: Vec<usize> = tuple.iter().copied().filter(|&t| classes[t] == classes[yi]).collect();
                if hits.is_empty() {
                    row[yi] += py * pz;
                } else {
                    let share = py * pz / hits.len() as f64;
                    for t in hits {
                        row[t] += share;
                    }
                }
                let mut k = 0;
                while k < z {
                    digits[k] += 1;
                    if digits[k] < support.len() {
                        break;
                    }
                    digits[k] = 0;
                    k += 1;
                }
                if k == z {
                    break;
                }
            }
        }
        for (yi, y) in ys.iter().enumerate() {
            deviation = deviation.max((row[yi] - dmc.block_prob(x, y)).abs());
        }
    }
    Ok(OracleReport { deviation, induced, combinations })
}

/// `I(X^n; Y^n)` in bits with `X^n` uniform over the type class `tc`.
/// Never exceeds `n I(N, q)` for the class's letter frequencies `q`.
pub fn itc_mutual_information(dmc: &Dmc, tc: &TypeClass) -> Result<f64> {
    if tc.alphabet() != dmc.inputs() {
        return Err(Error::dims(format!("type over {} letters, DMC has {} inputs", tc.alphabet(), dmc.inputs())));
    }
    let n = tc.n();
    let xs = strings(n, dmc.inputs())?;
    let ys = strings(n, dmc.outputs())?;
    let mu = itc_output_dist(dmc, tc, &xs, &ys)?;
    let h_out: f64 = mu.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    let h_cond: f64 = tc
        .counts()
        .iter()
        .enumerate()
        .map(|(a, &c)| {
            let row_h: f64 = dmc.matrix()[a].iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
            c as f64 * row_h
        })
        .sum();
    Ok((h_out - h_cond).max(0.0))
}
