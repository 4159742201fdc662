//! Conditional-gradient ascent of `f(rho) = H(rho) + H(N(rho)) - H(E(rho))`
//! over the set of density operators.
//!
//! `f` is concave, so for any iterate `rho` and gradient `G`,
//! `max_sigma tr(G sigma) - tr(G rho)` bounds the distance to the optimum.
//! The linear oracle over the full spectrahedron is the top eigenvector of
//! `G`; each step does an exact line search on the segment to the oracle
//! point, which keeps the objective sequence monotone.

use crate::error::{Error, Result};
use crate::qmath::entropy::matrix_entropy;
use crate::qmath::matrix::{
    self, eigh, eigvalsh, hermiticity_error, log2_clamped, projector, trace_re, ComplexMatrix,
};
use crate::qmath::{DensityOperator, QuantumChannel};

use super::{objective_matrix, CeResult};

pub const MAX_ITERS: usize = 100_000;
pub const DEFAULT_TOL: f64 = 1e-7;
const LINE_SEARCH_STEPS: usize = 60;
/// Relative decrease tolerated as rounding noise when a step is accepted.
const ASCENT_SLACK: f64 = 1e-12;

/// Snapshot handed to the progress callback after every iteration.
#[derive(Clone, Copy, Debug)]
pub struct FwProgress {
    pub iteration: usize,
    pub value: f64,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct CeOptions {
    /// Stop once the certified gap is at most this many bits.
    pub tol: f64,
    pub max_iters: usize,
    /// Starting point; defaults to `I/d` (or a feasible mixture when constrained).
    pub initial: Option<DensityOperator>,
}

impl Default for CeOptions {
    fn default() -> Self {
        CeOptions { tol: DEFAULT_TOL, max_iters: MAX_ITERS, initial: None }
    }
}

impl CeOptions {
    pub fn with_tol(tol: f64) -> Self {
        CeOptions { tol, ..Default::default() }
    }
}

/// `tr(H rho) <= bound` for a Hermitian positive semidefinite `H`.
#[derive(Clone, Debug)]
pub struct EnergyConstraint {
    observable: ComplexMatrix,
    bound: f64,
}

impl EnergyConstraint {
    pub fn new(observable: ComplexMatrix, bound: f64) -> Result<Self> {
        if !observable.is_square() {
            return Err(Error::dims("observable must be square"));
        }
        matrix::check_finite(&observable)?;
        let herm = hermiticity_error(&observable);
        if herm > 1e-10 {
            return Err(Error::param(format!("observable not Hermitian (deviation {herm:.3e})")));
        }
        if eigvalsh(&observable).last().is_some_and(|&l| l < -1e-10) {
            return Err(Error::param("observable is not positive semidefinite"));
        }
        if !(bound >= 0.0) {
            return Err(Error::param(format!("energy bound {bound} is negative")));
        }
        Ok(EnergyConstraint { observable: matrix::hermitian_part(&observable), bound })
    }

    pub fn observable(&self) -> &ComplexMatrix {
        &self.observable
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

/// Maximize the capacity objective to within `tol` bits.
pub fn ce_maximize(ch: &QuantumChannel, tol: f64) -> Result<CeResult> {
    ce_maximize_with(ch, &CeOptions::with_tol(tol), None)
}

/// Like [`ce_maximize`], with explicit options and a progress callback.
/// Returning `false` from the callback cancels the run.
pub fn ce_maximize_with(
    ch: &QuantumChannel,
    opts: &CeOptions,
    progress: Option<&mut dyn FnMut(&FwProgress) -> bool>,
) -> Result<CeResult> {
    check_opts(ch, opts)?;
    let start = match &opts.initial {
        Some(r) => r.matrix().clone(),
        None => DensityOperator::maximally_mixed(ch.d_in()).into_matrix(),
    };
    run(ch, start, opts, &mut |g: &ComplexMatrix| top_eigen_oracle(g), progress)
}

/// Maximize subject to `tr(H rho) <= E`.
///
/// The linear subproblem `max tr(G sigma)` over the constrained set is
/// solved through its Lagrange dual `min_{mu >= 0} lambda_max(G - mu H) + mu E`.
/// Bisection on `mu` brackets the multiplier; the oracle point mixes the top
/// eigenvectors of `G - mu H` at the two bracket ends so that the energy
/// constraint is met with equality, and the dual value at the upper end is
/// a valid bound for the gap certificate.
pub fn ce_maximize_constrained(
    ch: &QuantumChannel,
    constraint: &EnergyConstraint,
    opts: &CeOptions,
    progress: Option<&mut dyn FnMut(&FwProgress) -> bool>,
) -> Result<CeResult> {
    check_opts(ch, opts)?;
    let d = ch.d_in();
    let h = &constraint.observable;
    if h.nrows() != d {
        return Err(Error::dims(format!("observable is {}x{}, channel input {d}", h.nrows(), h.nrows())));
    }
    let e = constraint.bound;
    let spec = eigh(h);
    let lmin = spec.values[d - 1];
    if e < lmin - 1e-12 {
        return Err(Error::Infeasible(format!(
            "energy bound {e} is below the minimum eigenvalue {lmin} of the observable"
        )));
    }
    if e <= lmin + 1e-9 {
        return ground_space_only(ch, &spec, lmin, opts, progress);
    }

    let start = match &opts.initial {
        Some(r) => {
            if trace_re(&(h * r.matrix())) > e + 1e-9 {
                return Err(Error::Infeasible("initial state violates the constraint".into()));
            }
            r.matrix().clone()
        }
        None => {
            let mm = DensityOperator::maximally_mixed(d).into_matrix();
            let e_mm = trace_re(h) / d as f64;
            if e_mm <= e {
                mm
            } else {
                // Mix I/d with the normalized ground projector to land on tr(H rho) = E.
                let ground = ground_projector(&spec, lmin);
                let t = (e - lmin) / (e_mm - lmin);
                mm.scale(t) + ground.scale(1.0 - t)
            }
        }
    };
    let mut oracle = |g: &ComplexMatrix| constrained_oracle(g, h, e);
    run(ch, start, opts, &mut oracle, progress)
}

fn check_opts(ch: &QuantumChannel, opts: &CeOptions) -> Result<()> {
    if !(opts.tol > 0.0) {
        return Err(Error::param(format!("tolerance {} must be positive", opts.tol)));
    }
    if let Some(r) = &opts.initial {
        if r.dim() != ch.d_in() {
            return Err(Error::dims("initial state does not match channel input"));
        }
    }
    Ok(())
}

fn ground_projector(spec: &matrix::Eigh, lmin: f64) -> ComplexMatrix {
    let d = spec.values.len();
    let idx: Vec<usize> = (0..d).filter(|&i| spec.values[i] <= lmin + 1e-9).collect();
    let mut p = ComplexMatrix::zeros(d, d);
    for &i in &idx {
        p += projector(&spec.vector(i));
    }
    p.unscale(idx.len() as f64)
}

/// Feasible set collapses to states on the ground eigenspace of `H`.
fn ground_space_only(
    ch: &QuantumChannel,
    spec: &matrix::Eigh,
    lmin: f64,
    opts: &CeOptions,
    progress: Option<&mut dyn FnMut(&FwProgress) -> bool>,
) -> Result<CeResult> {
    let d = spec.values.len();
    let idx: Vec<usize> = (0..d).filter(|&i| spec.values[i] <= lmin + 1e-9).collect();
    if idx.len() == 1 {
        let rho = projector(&spec.vector(idx[0]));
        let value = objective_matrix(ch, &rho);
        return Ok(CeResult {
            value,
            argmax_rho: DensityOperator::from_trusted(rho),
            iterations: 0,
            gap_bound: 0.0,
        });
    }
    let v = ComplexMatrix::from_fn(d, idx.len(), |r, c| spec.vectors[(r, idx[c])]);
    let sub = ch.precompose(&v)?;
    let sub_opts = CeOptions { initial: None, ..opts.clone() };
    let lift = |r: CeResult| CeResult {
        argmax_rho: DensityOperator::from_trusted(&v * r.argmax_rho.matrix() * v.adjoint()),
        ..r
    };
    match ce_maximize_with(&sub, &sub_opts, progress) {
        Ok(r) => Ok(lift(r)),
        Err(Error::NonConvergence { best }) => Err(Error::NonConvergence { best: Box::new(lift(*best)) }),
        Err(Error::Cancelled { best }) => Err(Error::Cancelled { best: Box::new(lift(*best)) }),
        Err(e) => Err(e),
    }
}

/// Oracle point and the upper bound on `max tr(G sigma)` it certifies.
struct OracleAnswer {
    sigma: ComplexMatrix,
    bound: f64,
}

fn top_eigen_oracle(g: &ComplexMatrix) -> OracleAnswer {
    let e = eigh(g);
    OracleAnswer { sigma: projector(&e.vector(0)), bound: e.values[0] }
}

fn constrained_oracle(g: &ComplexMatrix, h: &ComplexMatrix, e: f64) -> OracleAnswer {
    let top = |mu: f64| {
        let s = eigh(&(g - h.scale(mu)));
        let v = s.vector(0);
        let energy = (v.adjoint() * h * &v)[(0, 0)].re;
        (v, energy, s.values[0])
    };
    let (v0, h0, l0) = top(0.0);
    if h0 <= e + 1e-12 {
        return OracleAnswer { sigma: projector(&v0), bound: l0 };
    }
    let scale = matrix::max_abs(g).max(1.0) / matrix::max_abs(h).max(1e-300);
    let (mut lo, mut hi) = ((0.0, v0, h0), (scale, top(scale)));
    let mut hi_top = hi.1;
    let mut hi_mu = hi.0;
    let mut guard = 0;
    while hi_top.1 > e && guard < 200 {
        lo = (hi_mu, hi_top.0.clone(), hi_top.1);
        hi_mu *= 2.0;
        hi_top = top(hi_mu);
        guard += 1;
    }
    hi = (hi_mu, hi_top);
    for _ in 0..200 {
        if hi.0 - lo.0 <= 1e-14 * (1.0 + hi.0) {
            break;
        }
        let mid = 0.5 * (lo.0 + hi.0);
        let t = top(mid);
        if t.1 > e {
            lo = (mid, t.0, t.1);
        } else {
            hi = (mid, t);
        }
    }
    let (mu_hi, (v_hi, e_hi, l_hi)) = hi;
    let (_, v_lo, e_lo) = lo;
    let a = if e_lo - e_hi > 0.0 { ((e - e_hi) / (e_lo - e_hi)).clamp(0.0, 1.0) } else { 0.0 };
    let sigma = projector(&v_lo).scale(a) + projector(&v_hi).scale(1.0 - a);
    OracleAnswer { sigma, bound: l_hi + mu_hi * e }
}

/// `G = -log2 rho - N†(log2 N(rho)) + E†(log2 E(rho))`, dropping the
/// constant multiple of the identity that does not affect trace-one
/// directions.
fn gradient(ch: &QuantumChannel, rho: &ComplexMatrix, out: &ComplexMatrix, env: &ComplexMatrix) -> ComplexMatrix {
    let g = -log2_clamped(rho) - ch.adjoint_matrix(&log2_clamped(out))
        + ch.complementary_adjoint_matrix(&log2_clamped(env));
    matrix::hermitian_part(&g)
}

/// Exact line search on `[0, 1]` by bisection on the slope of the
/// objective. Each term is `(a, b, sign)` and contributes
/// `sign * tr((b - a) log2((1-t) a + t b))`, the derivative of
/// `-sign * H((1-t) a + t b)` for trace-preserved directions. Working
/// with the slope instead of the value keeps the step accurate to float
/// resolution even when the objective change is far below it.
fn line_search(terms: &[(&ComplexMatrix, &ComplexMatrix, f64)]) -> f64 {
    let slope = |t: f64| -> f64 {
        terms
            .iter()
            .map(|&(a, b, sign)| {
                let at = a.scale(1.0 - t) + b.scale(t);
                sign * trace_re(&((b - a) * log2_clamped(&at)))
            })
            .sum()
    };
    if slope(1.0) >= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..LINE_SEARCH_STEPS {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn run(
    ch: &QuantumChannel,
    start: ComplexMatrix,
    opts: &CeOptions,
    oracle: &mut dyn FnMut(&ComplexMatrix) -> OracleAnswer,
    mut progress: Option<&mut dyn FnMut(&FwProgress) -> bool>,
) -> Result<CeResult> {
    let mut rho = start;
    let mut out = ch.apply_matrix(&rho);
    let mut env = ch.complementary_matrix(&rho);
    let mut value = matrix_entropy(&rho) + matrix_entropy(&out) - matrix_entropy(&env);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;

    let finish = |rho: &ComplexMatrix, value: f64, iterations: usize, gap: f64| CeResult {
        value,
        argmax_rho: DensityOperator::from_trusted(rho.clone()),
        iterations,
        gap_bound: gap.max(0.0),
    };

    for iter in 0..=opts.max_iters {
        iterations = iter;
        let g = gradient(ch, &rho, &out, &env);
        let ans = oracle(&g);
        gap = ans.bound - trace_re(&(&g * &rho));
        if let Some(cb) = progress.as_deref_mut() {
            if !cb(&FwProgress { iteration: iter, value, gap }) {
                return Err(Error::Cancelled { best: Box::new(finish(&rho, value, iter, gap)) });
            }
        }
        if gap <= opts.tol {
            return Ok(finish(&rho, value, iter, gap));
        }
        if iter == opts.max_iters {
            break;
        }

        let sigma = ans.sigma;
        let out_s = ch.apply_matrix(&sigma);
        let env_s = ch.complementary_matrix(&sigma);
        let t = line_search(&[(&rho, &sigma, -1.0), (&out, &out_s, -1.0), (&env, &env_s, 1.0)]);
        if t == 0.0 {
            // The step is below float resolution although the gap is open.
            break;
        }
        let s = 1.0 - t;
        let f_t = matrix_entropy(&(rho.scale(s) + sigma.scale(t)))
            + matrix_entropy(&(out.scale(s) + out_s.scale(t)))
            - matrix_entropy(&(env.scale(s) + env_s.scale(t)));
        if f_t < value - ASCENT_SLACK * (1.0 + value.abs()) {
            break;
        }
        rho = rho.scale(s) + sigma.scale(t);
        out = out.scale(s) + out_s.scale(t);
        env = env.scale(s) + env_s.scale(t);
        value = f_t;
    }
    Err(Error::NonConvergence { best: Box::new(finish(&rho, value, iterations, gap)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{amplitude_damping, depolarizing, erasure, noiseless};
    use crate::qmath::matrix::diag_real;

    #[test]
    fn table_values() {
        let r = ce_maximize(&noiseless(2).unwrap(), 1e-7).unwrap();
        assert!((r.value - 2.0).abs() < 1e-6);
        let r = ce_maximize(&erasure(2, 0.5).unwrap(), 1e-7).unwrap();
        assert!((r.value - 1.0).abs() < 1e-5);
        let r = ce_maximize(&depolarizing(2, 2.0 / 3.0).unwrap(), 1e-7).unwrap();
        assert!((r.value - 0.2075).abs() < 5e-4);
        assert!(r.gap_bound <= 1e-7);
    }

    #[test]
    fn monotone_ascent_and_gap() {
        let ch = amplitude_damping(0.7).unwrap();
        let mut values = Vec::new();
        let mut cb = |p: &FwProgress| {
            values.push(p.value);
            true
        };
        let r = ce_maximize_with(&ch, &CeOptions::with_tol(1e-9), Some(&mut cb)).unwrap();
        assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(r.gap_bound <= 1e-9);
    }

    #[test]
    fn cancellation_returns_best() {
        let ch = amplitude_damping(0.4).unwrap();
        let mut cb = |p: &FwProgress| p.iteration < 1;
        let err = ce_maximize_with(&ch, &CeOptions::with_tol(1e-12), Some(&mut cb)).unwrap_err();
        match err {
            Error::Cancelled { best } => assert_eq!(best.iterations, 1),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn iteration_cap_reports_best_so_far() {
        use rand::SeedableRng;
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(11);
        let ch = crate::qmath::random::random_channel(&mut rng, 3, 3, 3);
        let start = crate::capacity::ce_objective(&ch, &DensityOperator::maximally_mixed(3)).unwrap();
        let opts = CeOptions { tol: 1e-15, max_iters: 3, initial: None };
        match ce_maximize_with(&ch, &opts, None) {
            Err(Error::NonConvergence { best }) => {
                assert!(best.value >= start);
                assert_eq!(best.iterations, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constrained_cases() {
        let ch = amplitude_damping(0.5).unwrap();
        let free = ce_maximize(&ch, 1e-8).unwrap();
        let h = diag_real(&[0.0, 1.0]);

        let loose = EnergyConstraint::new(h.clone(), 10.0).unwrap();
        let r = ce_maximize_constrained(&ch, &loose, &CeOptions::with_tol(1e-8), None).unwrap();
        assert!((r.value - free.value).abs() < 1e-7);

        let point = EnergyConstraint::new(h.clone(), 0.0).unwrap();
        let r = ce_maximize_constrained(&ch, &point, &CeOptions::default(), None).unwrap();
        assert!(r.value.abs() < 1e-12);

        let tight = EnergyConstraint::new(h.clone(), 0.3).unwrap();
        let r = ce_maximize_constrained(&ch, &tight, &CeOptions::with_tol(1e-8), None).unwrap();
        assert!(r.value <= free.value + 1e-9);
        assert!(trace_re(&(&h * r.argmax_rho.matrix())) <= 0.3 + 1e-9);
        // Fine grid over diag(1-x, x), x <= 0.3.
        let grid = (0..=3000)
            .map(|i| {
                let x = i as f64 * 1e-4;
                objective_matrix(&ch, &diag_real(&[1.0 - x, x]))
            })
            .fold(f64::MIN, f64::max);
        assert!((r.value - grid).abs() < 1e-6, "{} vs {}", r.value, grid);

        assert!(matches!(
            ce_maximize_constrained(
                &ch,
                &EnergyConstraint::new(diag_real(&[1.0, 2.0]), 0.5).unwrap(),
                &CeOptions::default(),
                None
            ),
            Err(Error::Infeasible(_))
        ));
        assert!(EnergyConstraint::new(diag_real(&[1.0, 2.0]), -1.0).is_err());
    }

    #[test]
    fn degenerate_ground_space_restriction() {
        // Observable with a two-dimensional ground space on a qutrit.
        let ch = noiseless(3).unwrap();
        let h = diag_real(&[0.0, 0.0, 1.0]);
        let c = EnergyConstraint::new(h, 0.0).unwrap();
        let r = ce_maximize_constrained(&ch, &c, &CeOptions::default(), None).unwrap();
        assert!((r.value - 2.0).abs() < 1e-6);
        assert!(r.argmax_rho.matrix()[(2, 2)].norm() < 1e-12);
    }
}
