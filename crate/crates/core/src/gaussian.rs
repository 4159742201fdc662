//! Closed-form capacities and bounds for the single-mode bosonic Gaussian
//! channel with attenuation/amplification `k` and noise `N`.
//!
//! Differences of thermal entropies are evaluated through `ln_1p` so that
//! the tiny capacities at large noise keep full relative precision.

use std::f64::consts::LN_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::fmt_sig;

/// Mean input photon number `S`, noise `N`, gain `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub s: f64,
    pub n: f64,
    pub k: f64,
}

impl GaussianParams {
    pub fn new(s: f64, n: f64, k: f64) -> Result<Self> {
        let p = GaussianParams { s, n, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::param(format!("S = {} must be finite and >= 0", self.s)));
        }
        if !(self.n >= 0.0 && self.n.is_finite()) {
            return Err(Error::param(format!("N = {} must be finite and >= 0", self.n)));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::param(format!("k = {} must be finite and > 0", self.k)));
        }
        Ok(())
    }

    /// Thermal parameter of the output when the input is vacuum.
    fn output_noise(&self) -> f64 {
        if self.k <= 1.0 {
            self.n
        } else {
            self.n + self.k * self.k - 1.0
        }
    }
}

/// `h(x) - h(x - delta)` for `h(x) = x ln x`, `0 <= delta <= x`.
fn xlnx_drop(x: f64, delta: f64) -> f64 {
    if x <= 0.0 || delta <= 0.0 {
        return 0.0;
    }
    let delta = delta.min(x);
    let y = x - delta;
    if y <= 0.0 {
        return x * x.ln();
    }
    delta * x.ln() - y * (-delta / x).ln_1p()
}

/// Thermal entropy in bits without argument checks; negative arguments
/// from rounding are clamped to zero.
fn g(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x.ln_1p() + x * (1.0 / x).ln_1p()) / LN_2
}

/// `g(x) - g(x - delta)` in bits, stable when `delta << x`.
fn g_drop(x: f64, delta: f64) -> f64 {
    let x = x.max(0.0);
    let delta = delta.clamp(0.0, x);
    ((xlnx_drop(x + 1.0, delta) - xlnx_drop(x, delta)) / LN_2).max(0.0)
}

/// `g(S) = (S+1) log2(S+1) - S log2 S`.
pub fn g_entropy(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::param(format!("thermal energy {s} is negative")));
    }
    Ok(g(s))
}

/// `log2(1 + S/N)` where `S` is the received signal energy.
pub fn shannon_capacity(s: f64, n: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::param(format!("signal {s} is negative")));
    }
    if !(n > 0.0) {
        return Err(Error::param("noise must be positive (capacity is infinite at N = 0)"));
    }
    Ok((s / n).ln_1p() / LN_2)
}

/// Classical Shannon capacity of the channel at received signal `k^2 S`.
pub fn gaussian_shannon(p: &GaussianParams) -> Result<f64> {
    shannon_capacity(p.k * p.k * p.s, p.n)
}

/// Average output energy `S'`.
pub fn output_energy(p: &GaussianParams) -> f64 {
    p.k * p.k * p.s + p.output_noise()
}

/// `D = sqrt((S + S' + 1)^2 - 4 k^2 S (S + 1))`.
pub fn big_d(s: f64, s_out: f64, k: f64) -> Result<f64> {
    let rad = (s + s_out + 1.0).powi(2) - 4.0 * k * k * s * (s + 1.0);
    if rad < 0.0 {
        return Err(Error::param(format!("negative radicand {rad} in D")));
    }
    Ok(rad.sqrt())
}

/// `C_E = g(S) + g(S') - g((D + S' - S - 1)/2) - g((D - S' + S - 1)/2)`.
///
/// Both subtracted arguments equal the corresponding positive term minus
/// `2 k^2 S (S+1) / (S + S' + 1 + D)`, which is how they are evaluated.
pub fn gaussian_ce(p: &GaussianParams) -> Result<f64> {
    p.validate()?;
    let s_out = output_energy(p);
    let d = big_d(p.s, s_out, p.k)?;
    let delta = 2.0 * p.k * p.k * p.s * (p.s + 1.0) / (p.s + s_out + 1.0 + d);
    Ok(g_drop(p.s, delta) + g_drop(s_out, delta))
}

/// Large-noise limit of `C_E / C_Shan`, `(S+1) ln(1 + 1/S)`.
pub fn ce_over_cshan_limit(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::param("the limit ratio needs S > 0"));
    }
    Ok((s + 1.0) * (1.0 / s).ln_1p())
}

/// Bounds from coherent-state encoding with heterodyne detection (lower)
/// and measure-and-prepare simulation (upper). An upper bound whose
/// classical noise would be non-positive is reported as `+inf`.
pub fn coherent_bounds(p: &GaussianParams) -> Result<(f64, f64)> {
    p.validate()?;
    let k2 = p.k * p.k;
    let log2_1p = |x: f64| x.ln_1p() / LN_2;
    let (lower, upper) = if p.k <= 1.0 {
        let lower = log2_1p(k2 * p.s / (p.n + 1.0));
        let noise = p.n / k2 - 1.0;
        (lower, if noise > 0.0 { log2_1p((p.s + 1.0) / noise) } else { f64::INFINITY })
    } else {
        let lower = log2_1p(p.s / (p.n / k2 + 1.0));
        let noise = p.n - 1.0;
        (lower, if noise > 0.0 { log2_1p(k2 * (p.s + 1.0) / noise) } else { f64::INFINITY })
    };
    Ok((lower, upper))
}

/// Bounds at `k = 1` from squeezed-state superdense coding (lower) and
/// teleportation (upper), each optimized over the squeezing `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqueezedBounds {
    pub lower: f64,
    pub upper: f64,
    pub r_lower: f64,
    pub r_upper: f64,
}

pub fn squeezed_bounds(s: f64, n: f64) -> Result<SqueezedBounds> {
    if !(s >= 0.0) || !(n > 0.0) {
        return Err(Error::param(format!("squeezed bounds need S >= 0 and N > 0, got S={s}, N={n}")));
    }
    let d1 = ((n + 1.0).powi(2) + 4.0 * n * s).sqrt();
    let log2_1p = |x: f64| x.ln_1p() / LN_2;

    let r_upper = (0.5 * ((d1 + 1.0) / n).ln()).max(0.0);
    let upper_at = |r: f64| {
        let noise = n - (-2.0 * r).exp();
        if noise > 0.0 {
            log2_1p((s + r.cosh().powi(2)) / noise)
        } else {
            f64::INFINITY
        }
    };

    // The lower bound spends sinh^2 r of the signal energy on squeezing.
    let r_cap = s.sqrt().asinh();
    let r_lower = (0.5 * ((d1 - 1.0) / n).ln()).clamp(0.0, r_cap);
    let lower_at = |r: f64| log2_1p((s - r.sinh().powi(2)).max(0.0) / (n + (-2.0 * r).exp()));

    Ok(SqueezedBounds { lower: lower_at(r_lower), upper: upper_at(r_upper), r_lower, r_upper })
}

/// Holevo information of a thermal mixture of coherent states,
/// `g(S') - g(S' - k^2 S)`; conjectured to be the unassisted capacity.
pub fn ch_conjectured(p: &GaussianParams) -> Result<f64> {
    p.validate()?;
    Ok(g_drop(output_energy(p), p.k * p.k * p.s))
}

/// Parameter grid for [`sweep`]; rows are emitted with `k` outermost,
/// then `S`, then `N`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GaussianGrid {
    pub s: Vec<f64>,
    pub n: Vec<f64>,
    pub k: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub s: f64,
    pub n: f64,
    pub k: f64,
    pub ce: f64,
    pub cshan: f64,
    pub ratio: f64,
    pub lb_coh: f64,
    pub ub_coh: f64,
    /// Squeezed-state bounds exist only at `k = 1`; NaN elsewhere.
    pub lb_sq: f64,
    pub ub_sq: f64,
    pub ch_conj: f64,
}

pub const SWEEP_HEADER: [&str; 11] =
    ["S", "N", "k", "ce", "cshan", "ratio", "lb_coh", "ub_coh", "lb_sq", "ub_sq", "ch_conj"];

pub fn sweep(grid: &GaussianGrid) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(grid.s.len() * grid.n.len() * grid.k.len());
    for &k in &grid.k {
        for &s in &grid.s {
            for &n in &grid.n {
                let p = GaussianParams::new(s, n, k)?;
                let ce = gaussian_ce(&p)?;
                let cshan = if n > 0.0 { gaussian_shannon(&p)? } else { f64::INFINITY };
                let (lb_coh, ub_coh) = coherent_bounds(&p)?;
                let (lb_sq, ub_sq) = if k == 1.0 && n > 0.0 {
                    let b = squeezed_bounds(s, n)?;
                    (b.lower, b.upper)
                } else {
                    (f64::NAN, f64::NAN)
                };
                rows.push(SweepRow {
                    s,
                    n,
                    k,
                    ce,
                    cshan,
                    ratio: if cshan > 0.0 { ce / cshan } else { f64::NAN },
                    lb_coh,
                    ub_coh,
                    lb_sq,
                    ub_sq,
                    ch_conj: ch_conjectured(&p)?,
                });
            }
        }
    }
    Ok(rows)
}

/// Write sweep rows as CSV; `with_limit` appends the large-noise limit of
/// the ratio as a twelfth column `limit`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], with_limit: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
    if with_limit {
        header.push("limit");
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec: Vec<String> = [r.s, r.n, r.k, r.ce, r.cshan, r.ratio, r.lb_coh, r.ub_coh, r.lb_sq, r.ub_sq, r.ch_conj]
            .iter()
            .map(|&x| fmt_sig(x))
            .collect();
        if with_limit {
            rec.push(fmt_sig(ce_over_cshan_limit(r.s).unwrap_or(f64::NAN)));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}
