//! Maximization of the mutual information `I(S,Φ)` under `Tr SF ≤ E`.
//!
//! Each iteration evaluates the gradient, calls the linear oracle and
//! records the Frank–Wolfe gap `max_X Tr G(X − S)`, bounded above through
//! the oracle's dual value. By concavity of `I` this gap bounds the
//! distance to the optimum, so it is the stopping certificate.
//!
//! Steps are taken by a multiplicative (mirror) update
//! `S ← exp(ln S + tG − μF)/Z`, which converges quickly and keeps iterates
//! full rank. When it stalls the solver falls back to a Frank–Wolfe step
//! toward the oracle point with an exact line search.

use crate::channel::KrausChannel;
use crate::entropy::{entropy, mutual_information};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::{DensityMatrix, HermitianOperator};

use super::oracle::Region;
use super::LOG_FLOOR;
use super::{CapacityResult, ConstraintSpec, Optimizer, SolverDiagnostics, SolverOptions};

/// Consecutive iterations without any gain before giving up. Progress
/// stops when the remaining gap sits in directions whose eigenvalues are
/// below round-off, and further iterations cannot recover it.
const STALL_LIMIT: usize = 3;

/// Weight of the feasible interior state mixed into Frank–Wolfe iterates.
const INTERIOR_MIX: f64 = 1e-9;

/// Below this smallest eigenvalue the gradient is taken at a perturbed state.
const RANK_FLOOR: f64 = 1e-12;

/// Analytic gradient of `I(·,Φ)`.
#[derive(Clone, Debug)]
pub struct Gradient {
    /// `−ln S − Φ*[ln Φ[S]] + Φ_E*[ln Φ_E[S]]`, defined up to multiples of `I`.
    pub operator: HermitianOperator,
    /// `S` was rank deficient and was mixed with `I/d` first.
    pub perturbed: bool,
}

/// Gradient of `S ↦ I(S,Φ)` on the trace-one slice.
pub fn mutual_info_gradient(s: &DensityMatrix, ch: &KrausChannel) -> Result<Gradient> {
    if s.dim() != ch.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            found: s.dim(),
        });
    }
    let perturbed = s.spectrum()?.min() < RANK_FLOOR;
    let s = if perturbed {
        s.mix(&DensityMatrix::maximally_mixed(s.dim()), INTERIOR_MIX)?
    } else {
        s.clone()
    };
    let p = Point::evaluate(ch, s)?;
    Ok(Gradient {
        operator: HermitianOperator::from_hermitian_unchecked(p.gradient(ch)?),
        perturbed,
    })
}

/// Analytic and central-difference derivatives of `I(·,Φ)` at `s` along a
/// trace-zero Hermitian direction. `s ± step·dir` must stay positive.
pub fn directional_derivatives(
    s: &DensityMatrix,
    ch: &KrausChannel,
    dir: &HermitianOperator,
    step: f64,
) -> Result<(f64, f64)> {
    if dir.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: dir.dim(),
        });
    }
    let g = mutual_info_gradient(s, ch)?.operator;
    let analytic = g.matrix().trace_product(dir.matrix()).re;
    let shifted = |sign: f64| {
        DensityMatrix::from_matrix_trusted(s.matrix() + &dir.matrix().scale(sign * step))
    };
    let fd = (mutual_information(&shifted(1.0), ch)? - mutual_information(&shifted(-1.0), ch)?)
        / (2.0 * step);
    Ok((analytic, fd))
}

fn log_psd(s: &DensityMatrix) -> Result<ComplexMatrix> {
    Ok(s.spectrum()?.map(|x| x.max(LOG_FLOOR).ln()))
}

/// An iterate with its channel outputs (their spectra are cached).
pub(crate) struct Point {
    pub s: DensityMatrix,
    out: DensityMatrix,
    env: DensityMatrix,
    pub value: f64,
}

impl Point {
    pub fn evaluate(ch: &KrausChannel, s: DensityMatrix) -> Result<Self> {
        let out = ch.apply(&s)?;
        let env = ch.complementary_apply(&s)?;
        let value = entropy(&s)? + entropy(&out)? - entropy(&env)?;
        Ok(Self { s, out, env, value })
    }

    pub fn gradient(&self, ch: &KrausChannel) -> Result<ComplexMatrix> {
        let a = log_psd(&self.s)?;
        let b = ch.dual_apply_matrix(&log_psd(&self.out)?)?;
        let c = ch.complementary_dual_matrix(&log_psd(&self.env)?)?;
        Ok((&(&c - &a) - &b).hermitian_part())
    }
}

pub fn maximize_mutual_info(
    ch: &KrausChannel,
    c: &ConstraintSpec,
    opts: &SolverOptions,
) -> Result<CapacityResult> {
    opts.validate()?;
    if ch.dim_in() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            found: c.dim(),
        });
    }
    if c.tight_ground() {
        // every feasible state lives on the ground eigenspace of F
        let v = c.observable().ground_space();
        let sub = ch.restrict_input(&v)?;
        let mut run = solve(&sub, Region::unconstrained(opts.mu_bisect_tol), opts)?;
        let s =
            DensityMatrix::from_matrix_trusted(v.matmul(run.point.s.matrix()).matmul(&v.adjoint()));
        run.diagnostics.tight_ground = true;
        run.diagnostics.notes.push(format!(
            "E equals the ground energy; solved on a {}-dimensional subspace",
            v.ncols()
        ));
        return finish(run, s, c);
    }
    let run = solve(ch, Region::constrained(c, opts.mu_bisect_tol), opts)?;
    let s = run.point.s.clone();
    finish(run, s, c)
}

fn finish(run: Run, s: DensityMatrix, c: &ConstraintSpec) -> Result<CapacityResult> {
    let slack = c.slack(&s)?;
    Ok(CapacityResult {
        value: run.point.value,
        optimizer: Optimizer::State(s),
        duality_gap: Some(run.gap),
        iterations: run.iterations,
        constraint_slack: slack,
        certified: run.certified,
        heuristic: false,
        diagnostics: run.diagnostics,
    })
}

struct Run {
    point: Point,
    gap: f64,
    iterations: usize,
    certified: bool,
    diagnostics: SolverDiagnostics,
}

fn solve(ch: &KrausChannel, region: Region<'_>, opts: &SolverOptions) -> Result<Run> {
    let safe = region.safe_state(ch.dim_in())?;
    let mut point = Point::evaluate(ch, safe.clone())?;
    let mut diagnostics = SolverDiagnostics::default();
    let mut step = 1.0_f64;
    let mut stalled = 0;
    let mut iterations = 0;
    loop {
        let g = point.gradient(ch)?;
        let orc = region.oracle(&g)?;
        let gap = (orc.upper_bound - g.trace_product(point.s.matrix()).re).max(0.0);
        diagnostics.oracle_residual = orc.residual;
        if gap <= opts.gap_tol || iterations >= opts.max_iters || stalled >= STALL_LIMIT {
            if gap > opts.gap_tol {
                diagnostics.notes.push(if stalled >= STALL_LIMIT {
                    format!("stalled with gap {gap:e}")
                } else {
                    format!("iteration cap reached with gap {gap:e}")
                });
            }
            return Ok(Run {
                point,
                gap,
                iterations,
                certified: gap <= opts.gap_tol,
                diagnostics,
            });
        }
        iterations += 1;
        let before = point.value;

        // multiplicative step with backtracking on its length
        let log_s = log_psd(&point.s)?;
        let mut mirror = None;
        let mut t = step;
        for _ in 0..8 {
            let k = &log_s + &g.scale(t);
            let (s_new, _) = region.project_exp(&k)?;
            let p = Point::evaluate(ch, s_new)?;
            if p.value > point.value {
                mirror = Some(p);
                break;
            }
            t *= 0.5;
        }
        let mut gained = 0.0;
        if let Some(p) = mirror {
            gained = p.value - point.value;
            step = (t * 1.5).min(1.0);
            point = p;
            diagnostics.mirror_steps += 1;
        } else {
            step = t.max(1e-3);
        }

        // fall back to a Frank–Wolfe step when the mirror step was weak
        if gained < 0.05 * gap {
            let g = if gained > 0.0 { point.gradient(ch)? } else { g };
            let orc = if gained > 0.0 {
                region.oracle(&g)?
            } else {
                orc
            };
            if let Some(p) = frank_wolfe_step(ch, &point, &orc.state, &g, &safe)? {
                if p.value > point.value {
                    point = p;
                    diagnostics.frank_wolfe_steps += 1;
                }
            }
        }
        if point.value - before <= 1e-15 * before.abs().max(1.0) {
            stalled += 1;
        } else {
            stalled = 0;
        }
    }
}

/// Line search on `γ ↦ I(S + γ(X − S))` by safeguarded false position on
/// its derivative, which is decreasing by concavity. Stops once the slope
/// has dropped to `1e-4` of its initial value.
fn frank_wolfe_step(
    ch: &KrausChannel,
    point: &Point,
    x: &DensityMatrix,
    g: &ComplexMatrix,
    safe: &DensityMatrix,
) -> Result<Option<Point>> {
    let dir = x.matrix() - point.s.matrix();
    let at = |gamma: f64| -> Result<Point> {
        let s = DensityMatrix::from_matrix_trusted(point.s.matrix() + &dir.scale(gamma));
        Point::evaluate(ch, s.mix(safe, INTERIOR_MIX)?)
    };
    let slope = |p: &Point| -> Result<f64> { Ok(p.gradient(ch)?.trace_product(&dir).re) };
    let d0 = g.trace_product(&dir).re;
    if !(d0 > 0.0) {
        return Ok(None);
    }
    let end = at(1.0)?;
    let d1 = slope(&end)?;
    if d1 >= 0.0 {
        return Ok(Some(end));
    }
    let (mut lo, mut hi, mut dlo, mut dhi) = (0.0, 1.0, d0, d1);
    let mut best: Option<Point> = (end.value > point.value).then_some(end);
    for _ in 0..12 {
        let w = hi - lo;
        let mut mid = lo + w * dlo / (dlo - dhi);
        if !(mid > lo + 0.05 * w && mid < hi - 0.05 * w) {
            mid = 0.5 * (lo + hi);
        }
        let p = at(mid)?;
        let d = slope(&p)?;
        let done = d.abs() <= 1e-2 * d0 || w < 1e-10;
        if d > 0.0 {
            lo = mid;
            dlo = d;
        } else {
            hi = mid;
            dhi = d;
        }
        if best.as_ref().is_none_or(|b| p.value > b.value) {
            best = Some(p);
        }
        if done {
            break;
        }
    }
    Ok(best)
}
