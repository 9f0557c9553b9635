//! Sparse label propagation: recovery of a graph signal from samples by
//! minimizing total variation subject to agreeing with the samples.
//!
//! The solver is a primal-dual iteration on `min ||Dx||_1 s.t. x_M = s`.
//! With step `tau = 1 / (2 sqrt(d_max))`, each iteration does
//!
//! ```text
//! y <- clip(y + tau * D z)
//! r <- x - tau * D^T y
//! x' <- s on M, r elsewhere
//! z <- 2x' - x
//! ```
//!
//! and the output is the running average of the primal iterates. Since
//! `||D||^2 <= 2 d_max`, `tau^2 ||D||^2 <= 1/2 < 1`.
//!
//! The iteration can sit near a non-optimal point for hundreds of steps
//! before moving again, so a small change in the average alone does not end
//! the run: it must also be within a relative duality gap of a certified
//! lower bound (see [`tv_lower_bound`]).

use crate::error::{Error, Result};
use crate::graph::{EdgeSignal, Graph, GraphSignal};
use crate::sampling::SamplingSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlpConfig {
    pub max_iterations: usize,
    /// Stop once `||avg_k - avg_{k-1}||_2 / max(||avg_k - mean(avg_k)||_2, 1e-12)`
    /// drops below this value.
    pub rel_change_tol: f64,
    /// Stop only once TV(avg) is within `gap_tol * max(1, TV(avg))` of a
    /// certified lower bound on the optimum.
    pub gap_tol: f64,
}

impl SlpConfig {
    pub const DEFAULT_MAX_ITERATIONS: usize = 50_000;
    pub const DEFAULT_REL_CHANGE_TOL: f64 = 1e-7;
    pub const DEFAULT_GAP_TOL: f64 = 1e-3;

    pub fn new(max_iterations: usize, rel_change_tol: f64) -> Result<Self> {
        if max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        if rel_change_tol.is_nan() || rel_change_tol < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rel_change_tol must be nonnegative, got {rel_change_tol}"
            )));
        }
        Ok(SlpConfig {
            max_iterations,
            rel_change_tol,
            gap_tol: Self::DEFAULT_GAP_TOL,
        })
    }

    /// `f64::INFINITY` disables the gap requirement.
    pub fn with_gap_tol(self, gap_tol: f64) -> Result<Self> {
        if gap_tol.is_nan() || gap_tol < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gap_tol must be nonnegative, got {gap_tol}"
            )));
        }
        Ok(SlpConfig { gap_tol, ..self })
    }
}

impl Default for SlpConfig {
    fn default() -> Self {
        SlpConfig {
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
            rel_change_tol: Self::DEFAULT_REL_CHANGE_TOL,
            gap_tol: Self::DEFAULT_GAP_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlpResult {
    pub recovered: GraphSignal,
    pub iterations_run: usize,
    /// Total variation of the running average after each iteration.
    pub objective_trace: Vec<f64>,
}

/// Solver state handed to an observer after each iteration.
#[derive(Debug)]
pub struct SlpIterate<'a> {
    /// 1-based iteration counter.
    pub iteration: usize,
    pub primal: &'a [f64],
    pub dual: &'a [f64],
    pub average: &'a [f64],
}

/// Entrywise projection onto `[-1, 1]`: `z / max(|z|, 1)`.
pub fn clip(y: &EdgeSignal) -> EdgeSignal {
    let mut v = y.as_slice().to_vec();
    clip_in_place(&mut v);
    EdgeSignal::new(v).expect("clipping preserves finiteness")
}

#[inline]
fn clip_in_place(v: &mut [f64]) {
    for z in v {
        *z /= z.abs().max(1.0);
    }
}

/// Step size `1 / (2 sqrt(d_max))`.
pub fn step_size(g: &Graph) -> Result<f64> {
    match g.max_degree() {
        0 => Err(Error::EdgelessGraph),
        d => Ok(1.0 / (2.0 * (d as f64).sqrt())),
    }
}

/// Recovers a signal from `samples`, given in the order of `m.nodes()`.
pub fn slp_recover(
    g: &Graph,
    m: &SamplingSet,
    samples: &[f64],
    cfg: &SlpConfig,
) -> Result<SlpResult> {
    slp_recover_observed(g, m, samples, cfg, |_| {})
}

/// [`slp_recover`] with a callback invoked after every iteration.
pub fn slp_recover_observed<F>(
    g: &Graph,
    m: &SamplingSet,
    samples: &[f64],
    cfg: &SlpConfig,
    mut observer: F,
) -> Result<SlpResult>
where
    F: FnMut(&SlpIterate<'_>),
{
    if m.is_empty() {
        return Err(Error::EmptySamplingSet);
    }
    if samples.len() != m.len() {
        return Err(Error::LengthMismatch {
            expected: m.len(),
            actual: samples.len(),
        });
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    for &node in m.nodes() {
        g.check_node(node)?;
    }
    let tau = step_size(g)?;
    let cfg = SlpConfig::new(cfg.max_iterations, cfg.rel_change_tol)?.with_gap_tol(cfg.gap_tol)?;

    let n = g.node_count();
    let mut observed: Vec<Option<f64>> = vec![None; n];
    for (&node, &value) in m.nodes().iter().zip(samples) {
        observed[node] = Some(value);
    }

    let mut x = vec![0.0; n];
    let mut x_next = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut y = vec![0.0; g.edge_count()];
    let mut dz = vec![0.0; g.edge_count()];
    let mut dty = vec![0.0; n];
    let mut avg = vec![0.0; n];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut y_avg = vec![0.0; g.edge_count()];
    let mut dty_avg = vec![0.0; n];
    let range = sample_range(samples);

    while iterations < cfg.max_iterations {
        iterations += 1;

        g.incidence_apply_into(&z, &mut dz);
        for (ye, &d) in y.iter_mut().zip(&dz) {
            *ye += tau * d;
        }
        clip_in_place(&mut y);

        g.incidence_transpose_apply_into(&y, &mut dty);
        for i in 0..n {
            x_next[i] = match observed[i] {
                Some(s) => s,
                None => x[i] - tau * dty[i],
            };
        }
        for i in 0..n {
            z[i] = 2.0 * x_next[i] - x[i];
        }
        std::mem::swap(&mut x, &mut x_next);

        let k = iterations as f64;
        let mut change_sq = 0.0;
        for (a, &xi) in avg.iter_mut().zip(&x) {
            let delta = (xi - *a) / k;
            *a += delta;
            change_sq += delta * delta;
        }
        for (a, &ye) in y_avg.iter_mut().zip(&y) {
            *a += (ye - *a) / k;
        }
        let mean = avg.iter().sum::<f64>() / n as f64;
        let norm_sq: f64 = avg.iter().map(|a| (a - mean) * (a - mean)).sum();
        let tv = g.total_variation_of(&avg);
        trace.push(tv);

        observer(&SlpIterate {
            iteration: iterations,
            primal: &x,
            dual: &y,
            average: &avg,
        });

        if change_sq.sqrt() / norm_sq.sqrt().max(1e-12) < cfg.rel_change_tol {
            if cfg.gap_tol == f64::INFINITY {
                break;
            }
            g.incidence_transpose_apply_into(&y_avg, &mut dty_avg);
            let bound =
                lower_bound(&dty, &observed, range).max(lower_bound(&dty_avg, &observed, range));
            if tv - bound <= cfg.gap_tol * tv {
                break;
            }
        }
    }

    Ok(SlpResult {
        recovered: GraphSignal::from_vec_unchecked(avg),
        iterations_run: iterations,
        objective_trace: trace,
    })
}

/// Lower bound on `min ||Dx||_1 s.t. x_M = s` from any `y` with `|y_e| <= 1`.
///
/// Some minimizer takes values in `[min s, max s]`, and on that box
/// `||Dx||_1 >= <D^T y, x>`; the bound minimizes the right side over the box.
pub fn tv_lower_bound(g: &Graph, m: &SamplingSet, samples: &[f64], y: &EdgeSignal) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::EmptySamplingSet);
    }
    if samples.len() != m.len() {
        return Err(Error::LengthMismatch {
            expected: m.len(),
            actual: samples.len(),
        });
    }
    if y.len() != g.edge_count() {
        return Err(Error::LengthMismatch {
            expected: g.edge_count(),
            actual: y.len(),
        });
    }
    if y.as_slice().iter().any(|v| v.abs() > 1.0) {
        return Err(Error::InvalidParameter(
            "dual variable outside [-1, 1]".into(),
        ));
    }
    let mut observed = vec![None; g.node_count()];
    for (&node, &value) in m.nodes().iter().zip(samples) {
        g.check_node(node)?;
        observed[node] = Some(value);
    }
    let dty = g.incidence_transpose_apply(y)?;
    Ok(lower_bound(
        dty.as_slice(),
        &observed,
        sample_range(samples),
    ))
}

fn sample_range(samples: &[f64]) -> (f64, f64) {
    samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        })
}

fn lower_bound(dty: &[f64], observed: &[Option<f64>], (lo, hi): (f64, f64)) -> f64 {
    dty.iter()
        .zip(observed)
        .map(|(&r, obs)| match obs {
            Some(s) => r * s,
            None => (r * lo).min(r * hi),
        })
        .sum()
}

/// Normalized squared error `||x_hat - x||^2 / ||x||^2`.
pub fn nmse(x_hat: &GraphSignal, x_true: &GraphSignal) -> Result<f64> {
    if x_hat.len() != x_true.len() {
        return Err(Error::LengthMismatch {
            expected: x_true.len(),
            actual: x_hat.len(),
        });
    }
    let norm_sq: f64 = x_true.as_slice().iter().map(|v| v * v).sum();
    if norm_sq == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let err_sq: f64 = x_hat
        .as_slice()
        .iter()
        .zip(x_true.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(err_sq / norm_sq)
}
