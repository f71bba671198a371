//! Constrained mutual-information maximization over auxiliary channels.
//!
//! The basic problem: given a joint law of (input, target), maximize
//! `I(aux; target)` over conditional pmfs `P(aux|input)` subject to the rate
//! constraint `I(aux; input) <= R`. Tabulating the optimum against `R` yields
//! the per-hop rate-exponent curves `f` (first hop) and `g` (second hop) that
//! the region assembly consumes.
//!
//! The solver is a Lagrangian alternating maximization (a Blahut-Arimoto
//! style fixed point on the auxiliary channel for the objective
//! `I(aux;target) - lambda * I(aux;input)`), with an outer bisection on
//! `lambda` to meet the budget and explicit time-sharing across multiplier
//! solutions. Time-sharing matters because the budgeted problem is not
//! concave in the channel alone; mixing two multiplier solutions on disjoint
//! auxiliary alphabets realizes every upper-envelope point exactly.
//!
//! Two independent oracles keep the solver honest: a closed form for doubly
//! symmetric binary sources (`mgl_value`, the entropy-convolution bound) and
//! an exhaustive grid search for small instances (`brute_force_ib`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::prob::{
    binary_convolution, binary_entropy, binary_entropy_inverse, mutual_information, Channel,
    Joint, Pmf,
};
use crate::{Error, Result};

/// Default auxiliary-alphabet size for first-hop (U) problems.
pub fn default_u_cardinality(nx: usize, ny: usize) -> usize {
    nx * ny + 2
}

/// Default auxiliary-alphabet size for second-hop (V) problems.
pub fn default_v_cardinality(nx: usize, ny: usize) -> usize {
    (nx * ny + 2) * nx * ny + 1
}

// ---------------------------------------------------------------------------
// Problem & solution types
// ---------------------------------------------------------------------------

/// One bottleneck instance: joint law of (input, target), a rate budget in
/// bits per sample, and the auxiliary cardinality the solver may use.
#[derive(Debug, Clone)]
pub struct IbProblem {
    pub joint: Joint,
    pub rate_budget: f64,
    pub aux_cardinality: usize,
}

impl IbProblem {
    pub fn new(joint: Joint, rate_budget: f64, aux_cardinality: usize) -> Result<Self> {
        if !rate_budget.is_finite() || rate_budget < 0.0 {
            return Err(Error::Domain(format!("rate budget {rate_budget} < 0")));
        }
        if aux_cardinality < 1 {
            return Err(Error::Domain("auxiliary cardinality must be >= 1".into()));
        }
        Ok(Self {
            joint,
            rate_budget,
            aux_cardinality,
        })
    }
}

/// A witness channel together with its exact rate and payoff.
#[derive(Debug, Clone)]
pub struct IbSolution {
    /// P(aux | input).
    pub aux_channel: Channel,
    /// I(aux; input) of the witness.
    pub rate_used: f64,
    /// I(aux; target) of the witness.
    pub payoff: f64,
}

/// Solver knobs. Defaults follow the artifact-wide conventions: 16 seeded
/// restarts at the anchor multiplier evaluations, fixed-point iteration until
/// the objective moves less than 1e-10 or 10,000 iterations.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub objective_tol: f64,
    /// Outer bisection steps on the rate multiplier.
    pub lambda_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0xCA5C_ADE0,
            max_iters: 10_000,
            objective_tol: 1e-10,
            lambda_steps: 44,
        }
    }
}

// ---------------------------------------------------------------------------
// Dense working form of a problem
// ---------------------------------------------------------------------------

struct Instance {
    nx: usize,
    ny: usize,
    m: usize,
    p_x: Vec<f64>,
    /// p(y|x), row-major nx x ny.
    w: Vec<f64>,
    /// p(x,y), row-major nx x ny.
    pj: Vec<f64>,
    h_x: f64,
    i_xy: f64,
}

impl Instance {
    fn build(problem: &IbProblem) -> Self {
        let joint = &problem.joint;
        let nx = joint.rows();
        let ny = joint.cols();
        let marg = joint.row_marginal();
        let p_x: Vec<f64> = (0..nx).map(|x| marg.get(x)).collect();
        let mut w = vec![0.0; nx * ny];
        let mut pj = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                pj[x * ny + y] = joint.at(x, y);
                w[x * ny + y] = if p_x[x] > 0.0 { joint.at(x, y) / p_x[x] } else { 0.0 };
            }
        }
        Instance {
            nx,
            ny,
            m: problem.aux_cardinality,
            h_x: joint.row_marginal().entropy(),
            i_xy: mutual_information(joint),
            p_x,
            w,
            pj,
        }
    }

    /// Exact (rate, payoff) of a channel q[x*m+u] in bits.
    fn evaluate(&self, q: &[f64]) -> (f64, f64) {
        let (nx, ny, m) = (self.nx, self.ny, self.m);
        let mut q_u = vec![0.0; m];
        for x in 0..nx {
            for u in 0..m {
                q_u[u] += self.p_x[x] * q[x * m + u];
            }
        }
        let mut rate = 0.0;
        for x in 0..nx {
            if self.p_x[x] == 0.0 {
                continue;
            }
            for u in 0..m {
                let v = q[x * m + u];
                if v > 0.0 && q_u[u] > 0.0 {
                    rate += self.p_x[x] * v * (v / q_u[u]).log2();
                }
            }
        }
        // joint of (aux, target)
        let mut muy = vec![0.0; m * ny];
        let mut p_y = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                let pxy = self.pj[x * ny + y];
                p_y[y] += pxy;
                if pxy == 0.0 {
                    continue;
                }
                for u in 0..m {
                    muy[u * ny + y] += pxy * q[x * m + u];
                }
            }
        }
        let mut payoff = 0.0;
        for u in 0..m {
            for y in 0..ny {
                let v = muy[u * ny + y];
                if v > 0.0 {
                    payoff += v * (v / (q_u[u] * p_y[y])).log2();
                }
            }
        }
        (rate.max(0.0), payoff.max(0.0))
    }
}

// ---------------------------------------------------------------------------
// Fixed-point iteration at a fixed multiplier
// ---------------------------------------------------------------------------

/// Alternating maximization of `I(U;Y) - lambda I(U;X)` from a given channel.
/// Returns the final channel and its (rate, payoff).
fn ba_solve(inst: &Instance, lambda: f64, init: &[f64], opts: &SolverOptions) -> (Vec<f64>, f64, f64) {
    let (nx, ny, m) = (inst.nx, inst.ny, inst.m);
    let beta = 1.0 / lambda;
    let mut q = init.to_vec();
    let mut q_u = vec![0.0; m];
    let mut r = vec![0.0; m * ny]; // p(y|u)
    let mut logits = vec![0.0; m];
    let mut prev_obj = f64::NEG_INFINITY;

    for _ in 0..opts.max_iters {
        // marginal and decoder
        for u in 0..m {
            q_u[u] = 0.0;
        }
        for x in 0..nx {
            for u in 0..m {
                q_u[u] += inst.p_x[x] * q[x * m + u];
            }
        }
        for u in 0..m {
            for y in 0..ny {
                r[u * ny + y] = 0.0;
            }
        }
        for x in 0..nx {
            for y in 0..ny {
                let pxy = inst.pj[x * ny + y];
                if pxy == 0.0 {
                    continue;
                }
                for u in 0..m {
                    r[u * ny + y] += pxy * q[x * m + u];
                }
            }
        }
        for u in 0..m {
            if q_u[u] > 0.0 {
                for y in 0..ny {
                    r[u * ny + y] /= q_u[u];
                }
            }
        }

        // channel update: q(u|x) proportional to q(u) exp(beta sum_y p(y|x) ln r(y|u))
        for x in 0..nx {
            let mut max_logit = f64::NEG_INFINITY;
            for u in 0..m {
                let l = if q_u[u] > 0.0 {
                    let mut s = 0.0;
                    for y in 0..ny {
                        let wxy = inst.w[x * ny + y];
                        if wxy > 0.0 {
                            let ruy = r[u * ny + y];
                            if ruy > 0.0 {
                                s += wxy * ruy.ln();
                            } else {
                                s = f64::NEG_INFINITY;
                                break;
                            }
                        }
                    }
                    q_u[u].ln() + beta * s
                } else {
                    f64::NEG_INFINITY
                };
                logits[u] = l;
                if l > max_logit {
                    max_logit = l;
                }
            }
            let mut z = 0.0;
            for u in 0..m {
                let e = if logits[u] == f64::NEG_INFINITY {
                    0.0
                } else {
                    (logits[u] - max_logit).exp()
                };
                logits[u] = e;
                z += e;
            }
            for u in 0..m {
                q[x * m + u] = logits[u] / z;
            }
        }

        let (rate, payoff) = inst.evaluate(&q);
        let obj = payoff - lambda * rate;
        if (obj - prev_obj).abs() < opts.objective_tol {
            prev_obj = obj;
            break;
        }
        prev_obj = obj;
    }
    let (rate, payoff) = inst.evaluate(&q);
    (q, rate, payoff)
}

fn random_channel(rng: &mut ChaCha8Rng, nx: usize, m: usize) -> Vec<f64> {
    let mut q = vec![0.0; nx * m];
    for x in 0..nx {
        let mut sum = 0.0;
        for u in 0..m {
            // exponential variates normalize to a Dirichlet(1) row
            let e = -(1.0 - rng.gen::<f64>()).ln();
            q[x * m + u] = e;
            sum += e;
        }
        for u in 0..m {
            q[x * m + u] /= sum;
        }
    }
    q
}

fn structured_inits(nx: usize, m: usize) -> Vec<Vec<f64>> {
    let mut inits = Vec::new();
    // smoothed identity-like assignment
    let mut q = vec![0.05 / m as f64; nx * m];
    for x in 0..nx {
        q[x * m + (x % m)] += 0.95;
        let s: f64 = (0..m).map(|u| q[x * m + u]).sum();
        for u in 0..m {
            q[x * m + u] /= s;
        }
    }
    inits.push(q);
    // near-uniform with a deterministic tilt
    let mut q = vec![0.0; nx * m];
    for x in 0..nx {
        let mut s = 0.0;
        for u in 0..m {
            let v = 1.0 + 0.1 * (((x * m + u) % 7) as f64 - 3.0) / 7.0;
            q[x * m + u] = v;
            s += v;
        }
        for u in 0..m {
            q[x * m + u] /= s;
        }
    }
    inits.push(q);
    inits
}

/// Runs the fixed point from each start, pushes every result into the pool,
/// and returns the best channel by objective at this multiplier.
fn solve_at_lambda(
    inst: &Instance,
    lambda: f64,
    starts: &[Vec<f64>],
    opts: &SolverOptions,
    pool: &mut Vec<(f64, f64, Vec<f64>)>,
) -> (Vec<f64>, f64, f64) {
    let results: Vec<(Vec<f64>, f64, f64)> = starts
        .par_iter()
        .map(|init| ba_solve(inst, lambda, init, opts))
        .collect();
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for (q, rate, payoff) in results {
        pool.push((rate, payoff, q.clone()));
        let obj = payoff - lambda * rate;
        let better = match &best {
            None => true,
            Some((_, br, bp)) => obj > (bp - lambda * br) + 1e-14,
        };
        if better {
            best = Some((q, rate, payoff));
        }
    }
    best.expect("at least one start")
}

// ---------------------------------------------------------------------------
// ib_max
// ---------------------------------------------------------------------------

/// Maximizes `I(aux; target)` subject to `I(aux; input) <= rate_budget`.
///
/// Zero budget returns the constant auxiliary (payoff 0); a budget of at
/// least `H(input)` returns the unconstrained optimum `I(input; target)`.
/// Among solutions of equal payoff the cheapest witness (smallest rate) wins.
pub fn ib_max(problem: &IbProblem, opts: &SolverOptions) -> Result<IbSolution> {
    let inst = Instance::build(problem);
    let nx = inst.nx;
    let m = inst.m;

    let constant = IbSolution {
        aux_channel: Channel::constant(nx),
        rate_used: 0.0,
        payoff: 0.0,
    };
    if problem.rate_budget <= 0.0 || m == 1 || inst.i_xy <= 0.0 {
        return Ok(constant);
    }
    let budget = problem.rate_budget;

    // Solution pool: (rate, payoff, channel). Seeded with the two exact
    // endpoint witnesses.
    let mut pool: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    let mut constant_q = vec![0.0; nx * m];
    for x in 0..nx {
        constant_q[x * m] = 1.0;
    }
    pool.push((0.0, 0.0, constant_q));
    if m >= nx {
        let mut ident = vec![0.0; nx * m];
        for x in 0..nx {
            ident[x * m + x] = 1.0;
        }
        let (rate, payoff) = inst.evaluate(&ident);
        pool.push((rate, payoff, ident));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut full_starts = structured_inits(nx, m);
    while full_starts.len() < opts.restarts.max(2) {
        full_starts.push(random_channel(&mut rng, nx, m));
    }

    // Anchor evaluation at a small multiplier (nearly unconstrained) with the
    // full multi-start; it caps the achievable payoff.
    let lambda_min = 1e-6;
    let lambda_max = 1.0 + 1e-3;
    let top = solve_at_lambda(&inst, lambda_min, &full_starts, opts, &mut pool);

    if top.1 > budget {
        // Budget binds: bisect the multiplier, warm-starting along the path.
        let mut lo = lambda_min;
        let mut hi = lambda_max;
        let mut warm = top.0;
        for _ in 0..opts.lambda_steps {
            let mid = 0.5 * (lo + hi);
            let starts = vec![
                warm.clone(),
                random_channel(&mut rng, nx, m),
                random_channel(&mut rng, nx, m),
            ];
            let (q, rate, _) = solve_at_lambda(&inst, mid, &starts, opts, &mut pool);
            warm = q;
            if rate > budget {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) < 1e-12 {
                break;
            }
        }
        // Polish at the bracketing multiplier with the full restart set.
        solve_at_lambda(&inst, 0.5 * (lo + hi), &full_starts, opts, &mut pool);
    }

    // Upper concave hull of the pool in the (rate, payoff) plane; the curve
    // value at the budget is achievable directly or by time-sharing the two
    // bracketing vertices.
    pool.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut hull: Vec<usize> = Vec::new();
    let mut best_seen = f64::NEG_INFINITY;
    for (i, s) in pool.iter().enumerate() {
        // dominated points cannot be vertices
        if s.1 <= best_seen + 1e-15 {
            continue;
        }
        best_seen = s.1;
        while hull.len() >= 2 {
            let a = &pool[hull[hull.len() - 2]];
            let b = &pool[hull[hull.len() - 1]];
            // drop b if it sags to or below the chord a -> s
            if (b.0 - a.0) * (s.1 - a.1) >= (s.0 - a.0) * (b.1 - a.1) - 1e-15 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }

    // Best direct (feasible) vertex: maximize payoff, tie-break smallest rate.
    let mut best_direct: Option<&(f64, f64, Vec<f64>)> = None;
    for s in &pool {
        if s.0 <= budget + 1e-9 {
            let better = match best_direct {
                None => true,
                Some(b) => s.1 > b.1 + 1e-9 || (s.1 > b.1 - 1e-9 && s.0 < b.0),
            };
            if better {
                best_direct = Some(s);
            }
        }
    }
    let best_direct = best_direct.expect("constant solution is always feasible");

    // Time-share across the budget if the hull says it pays.
    let mut mixed: Option<(f64, Vec<f64>, f64, f64)> = None; // (gain, channel, rate, payoff)
    for w in hull.windows(2) {
        let a = &pool[w[0]];
        let b = &pool[w[1]];
        if a.0 <= budget && b.0 > budget && b.0 - a.0 > 1e-12 {
            let t = (b.0 - budget) / (b.0 - a.0);
            let payoff = t * a.1 + (1.0 - t) * b.1;
            if payoff > best_direct.1 + 1e-12 {
                let mut q = vec![0.0; nx * 2 * m];
                for x in 0..nx {
                    for u in 0..m {
                        q[x * 2 * m + u] = t * a.2[x * m + u];
                        q[x * 2 * m + m + u] = (1.0 - t) * b.2[x * m + u];
                    }
                }
                mixed = Some((payoff - best_direct.1, q, t * a.0 + (1.0 - t) * b.0, payoff));
            }
        }
    }

    let (q, m_eff) = match &mixed {
        Some((_, q, _, _)) => (q.clone(), 2 * m),
        None => (best_direct.2.clone(), m),
    };

    // Prune dead auxiliary symbols and repackage as a Channel.
    let mut q_u = vec![0.0; m_eff];
    for x in 0..nx {
        for u in 0..m_eff {
            q_u[u] += inst.p_x[x] * q[x * m_eff + u];
        }
    }
    let alive: Vec<usize> = (0..m_eff).filter(|&u| q_u[u] > 1e-12).collect();
    let alive = if alive.is_empty() { vec![0] } else { alive };
    let rows: Vec<Vec<f64>> = (0..nx)
        .map(|x| {
            let mut row: Vec<f64> = alive.iter().map(|&u| q[x * m_eff + u].max(0.0)).collect();
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                for v in &mut row {
                    *v /= s;
                }
            } else {
                row[0] = 1.0;
            }
            row
        })
        .collect();
    let aux_channel = Channel::new(rows)?;

    // Report the exact information quantities of the emitted witness.
    let pruned_inst = Instance::build(&IbProblem {
        joint: problem.joint.clone(),
        rate_budget: budget,
        aux_cardinality: alive.len(),
    });
    let flat: Vec<f64> = (0..nx)
        .flat_map(|x| (0..alive.len()).map(move |u| aux_channel.prob(x, u)))
        .collect();
    let (rate_used, payoff) = pruned_inst.evaluate(&flat);

    Ok(IbSolution {
        aux_channel,
        rate_used,
        payoff,
    })
}

// ---------------------------------------------------------------------------
// Closed-form oracle (doubly symmetric binary sources)
// ---------------------------------------------------------------------------

/// Exact bottleneck optimum for a uniform binary input observed through a
/// binary symmetric channel: `1 - h_b(q * h_b^{-1}(1 - rate))` with
/// `q = min(crossover, 1 - crossover)`. Entropy-convolution bound; valid only
/// for the doubly symmetric case.
pub fn mgl_value(crossover: f64, rate: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&crossover) {
        return Err(Error::Domain(format!("crossover {crossover} outside [0,1]")));
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Domain(format!("rate {rate} outside [0,1]")));
    }
    let q = crossover.min(1.0 - crossover);
    let p = binary_entropy_inverse(1.0 - rate)?;
    Ok(1.0 - binary_entropy(binary_convolution(q, p))?)
}

/// Extracts the crossover of a doubly symmetric binary joint, or a domain
/// error if the input marginal is not uniform or the channel not symmetric.
pub fn symmetric_binary_crossover(joint: &Joint) -> Result<f64> {
    if joint.rows() != 2 || joint.cols() != 2 {
        return Err(Error::Domain("oracle needs a 2x2 joint".into()));
    }
    let marg = joint.row_marginal();
    if (marg.get(0) - 0.5).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "oracle needs a uniform input marginal, got P(0) = {}",
            marg.get(0)
        )));
    }
    let w = joint.col_given_row();
    let q = w.prob(0, 1);
    if (w.prob(1, 0) - q).abs() > 1e-9 {
        return Err(Error::Domain("oracle needs a symmetric channel".into()));
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Exhaustive oracle
// ---------------------------------------------------------------------------

/// Exhaustive grid search over auxiliary channels for binary-input problems
/// with auxiliary cardinality at most 3. Returns the best feasible payoff;
/// lower-bounds `ib_max` to within the grid resolution.
pub fn brute_force_ib(problem: &IbProblem, grid_step: f64) -> Result<f64> {
    let inst = Instance::build(problem);
    if inst.nx != 2 {
        return Err(Error::Unsupported(format!(
            "brute force handles binary inputs, got {} symbols",
            inst.nx
        )));
    }
    if problem.aux_cardinality > 3 {
        return Err(Error::Unsupported(format!(
            "brute force handles auxiliary cardinality <= 3, got {}",
            problem.aux_cardinality
        )));
    }
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::Domain(format!("grid step {grid_step} outside (0, 0.5]")));
    }
    if problem.aux_cardinality == 1 {
        return Ok(0.0);
    }
    let steps = (1.0 / grid_step).round() as usize;
    let budget = problem.rate_budget + 1e-9;

    if problem.aux_cardinality == 2 {
        let best = (0..=steps)
            .into_par_iter()
            .map(|i| {
                let a = i as f64 / steps as f64;
                let mut local = 0.0_f64;
                let mut q = [0.0_f64; 4]; // q[x*2+u]
                for jdx in 0..=steps {
                    let b = jdx as f64 / steps as f64;
                    q[0] = a;
                    q[1] = 1.0 - a;
                    q[2] = b;
                    q[3] = 1.0 - b;
                    let (rate, payoff) = eval_small(&inst, &q, 2);
                    if rate <= budget && payoff > local {
                        local = payoff;
                    }
                }
                local
            })
            .reduce(|| 0.0, f64::max);
        return Ok(best);
    }

    // cardinality 3: each input row ranges over a simplex grid
    let row_points: Vec<[f64; 3]> = {
        let mut v = Vec::new();
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let k = steps - i - j;
                v.push([
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    k as f64 / steps as f64,
                ]);
            }
        }
        v
    };
    let combos = row_points.len() * row_points.len();
    if combos > 300_000_000 {
        return Err(Error::Unsupported(format!(
            "grid step {grid_step} with cardinality 3 needs {combos} evaluations"
        )));
    }
    let best = row_points
        .par_iter()
        .map(|r0| {
            let mut local = 0.0_f64;
            let mut q = [0.0_f64; 6];
            for r1 in &row_points {
                q[..3].copy_from_slice(r0);
                q[3..].copy_from_slice(r1);
                let (rate, payoff) = eval_small(&inst, &q, 3);
                if rate <= budget && payoff > local {
                    local = payoff;
                }
            }
            local
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Rate/payoff of a small stack-allocated channel (2 inputs, m aux symbols).
fn eval_small(inst: &Instance, q: &[f64], m: usize) -> (f64, f64) {
    let ny = inst.ny;
    let mut q_u = [0.0_f64; 3];
    for u in 0..m {
        q_u[u] = inst.p_x[0] * q[u] + inst.p_x[1] * q[m + u];
    }
    let mut rate = 0.0;
    for x in 0..2 {
        let px = inst.p_x[x];
        if px == 0.0 {
            continue;
        }
        for u in 0..m {
            let v = q[x * m + u];
            if v > 0.0 && q_u[u] > 0.0 {
                rate += px * v * (v / q_u[u]).log2();
            }
        }
    }
    let mut payoff = 0.0;
    for y in 0..ny {
        let p0y = inst.pj[y];
        let p1y = inst.pj[ny + y];
        let py = p0y + p1y;
        if py == 0.0 {
            continue;
        }
        for u in 0..m {
            let v = p0y * q[u] + p1y * q[m + u];
            if v > 0.0 && q_u[u] > 0.0 {
                payoff += v * (v / (q_u[u] * py)).log2();
            }
        }
    }
    (rate.max(0.0), payoff.max(0.0))
}

// ---------------------------------------------------------------------------
// Rate-exponent curves
// ---------------------------------------------------------------------------

/// A tabulated concave nondecreasing map from rate to exponent: linear
/// interpolation between knots, constant beyond the last knot, (0,0) first.
#[derive(Debug, Clone, PartialEq)]
pub struct RateExponentCurve {
    knots: Vec<(f64, f64)>,
}

impl RateExponentCurve {
    /// Builds a curve from raw (rate, exponent) samples: sorts, applies a
    /// monotone repair, then keeps the upper concave envelope.
    pub fn from_points(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("curve needs at least one point".into()));
        }
        for &(r, e) in &points {
            if !r.is_finite() || !e.is_finite() || r < 0.0 {
                return Err(Error::Domain(format!("bad curve point ({r}, {e})")));
            }
        }
        points.push((0.0, 0.0));
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        // monotone repair: exponents may not decrease with rate
        let mut run_max = 0.0_f64;
        for p in &mut points {
            run_max = run_max.max(p.1.max(0.0));
            p.1 = run_max;
        }
        // upper concave envelope (monotone chain on the upper hull)
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for &(r, e) in &points {
            if let Some(&(lr, le)) = hull.last() {
                if (r - lr).abs() < 1e-15 {
                    if e <= le {
                        continue;
                    }
                    hull.pop();
                }
            }
            let mut p = (r, e);
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b.0 - a.0) * (p.1 - a.1) >= (p.0 - a.0) * (b.1 - a.1) - 1e-15 {
                    hull.pop();
                } else {
                    break;
                }
            }
            // concavity implies the hull is still nondecreasing here
            if let Some(&(_, le)) = hull.last() {
                if p.1 < le {
                    p.1 = le;
                }
            }
            hull.push(p);
        }
        Ok(Self { knots: hull })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Curve value: linear interpolation, constant beyond the last knot.
    pub fn eval(&self, rate: f64) -> f64 {
        if rate <= 0.0 {
            return self.knots[0].1 * 0.0; // curve passes through (0,0)
        }
        let last = *self.knots.last().expect("nonempty");
        if rate >= last.0 {
            return last.1;
        }
        let idx = self
            .knots
            .partition_point(|&(r, _)| r <= rate)
            .saturating_sub(1);
        let (r0, e0) = self.knots[idx];
        let (r1, e1) = self.knots[idx + 1];
        if r1 <= r0 {
            return e0.max(e1);
        }
        e0 + (rate - r0) * (e1 - e0) / (r1 - r0)
    }

    /// Left inverse: the smallest rate whose value reaches `target`, or None
    /// if the target exceeds the curve's maximum.
    pub fn inverse(&self, target: f64) -> Option<f64> {
        if target <= 0.0 {
            return Some(0.0);
        }
        let max = self.max_exponent();
        if target > max + 1e-12 {
            return None;
        }
        for w in self.knots.windows(2) {
            let (r0, e0) = w[0];
            let (r1, e1) = w[1];
            if e1 >= target {
                if e1 <= e0 {
                    return Some(r0);
                }
                let t = (target - e0) / (e1 - e0);
                return Some(r0 + t.clamp(0.0, 1.0) * (r1 - r0));
            }
        }
        Some(self.knots.last().unwrap().0)
    }

    pub fn max_exponent(&self) -> f64 {
        self.knots.last().map(|&(_, e)| e).unwrap_or(0.0)
    }
}

/// Tabulates the bottleneck optimum over a rate grid and returns the repaired
/// concave curve. The grid must be sorted and start at 0.
pub fn build_curve(
    joint: &Joint,
    rate_grid: &[f64],
    aux_cardinality: usize,
    opts: &SolverOptions,
) -> Result<RateExponentCurve> {
    if rate_grid.is_empty() {
        return Err(Error::Domain("empty rate grid".into()));
    }
    if rate_grid[0] != 0.0 {
        return Err(Error::Domain("rate grid must start at 0".into()));
    }
    if rate_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("rate grid must be sorted".into()));
    }
    let points = rate_grid
        .par_iter()
        .map(|&r| {
            let problem = IbProblem::new(joint.clone(), r, aux_cardinality)?;
            let sol = ib_max(&problem, opts)?;
            Ok((r, sol.payoff))
        })
        .collect::<Result<Vec<_>>>()?;
    RateExponentCurve::from_points(points)
}

/// Uniform rate grid `{0, step, 2 step, ..., stop}` (stop included).
pub fn uniform_grid(stop: f64, step: f64) -> Vec<f64> {
    let n = (stop / step).round() as usize;
    let mut g: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    if let Some(last) = g.last_mut() {
        *last = stop;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{build_example_source, random_binary_source, BinaryExampleParams};

    // closed-form constants for the binary example (crossovers 0.1 and 0.2)
    const F_AT_HALF: f64 = 0.302684134730472;
    const G_AT_HALF: f64 = 0.16430937176281574;
    const EXAMPLE_IXY: f64 = 0.5310044064107188;

    fn example_hop1() -> Joint {
        build_example_source(&BinaryExampleParams::new(0.5, 0.9, 0.8).unwrap())
            .unwrap()
            .p_xy()
            .clone()
    }

    fn example_hop2() -> Joint {
        build_example_source(&BinaryExampleParams::new(0.5, 0.9, 0.8).unwrap())
            .unwrap()
            .p_yz()
            .clone()
    }

    #[test]
    fn mgl_matches_frozen_values() {
        assert!((mgl_value(0.1, 0.5).unwrap() - F_AT_HALF).abs() < 1e-12);
        assert!((mgl_value(0.2, 0.5).unwrap() - G_AT_HALF).abs() < 1e-12);
        // relabeling symmetry folds crossover 0.9 onto 0.1
        assert!((mgl_value(0.9, 0.5).unwrap() - F_AT_HALF).abs() < 1e-12);
    }

    #[test]
    fn mgl_full_rate_limit() {
        for q in [0.05, 0.1, 0.2, 0.35] {
            let expect = 1.0 - binary_entropy(q).unwrap();
            assert!((mgl_value(q, 1.0).unwrap() - expect).abs() < 1e-12);
        }
        assert!(mgl_value(-0.1, 0.5).is_err());
        assert!(mgl_value(0.1, 1.5).is_err());
    }

    #[test]
    fn crossover_extraction() {
        let q = symmetric_binary_crossover(&example_hop1()).unwrap();
        assert!((q - 0.9).abs() < 1e-12 || (q - 0.1).abs() < 1e-12);
        let skew = Joint::new(vec![vec![0.6, 0.1], vec![0.1, 0.2]]).unwrap();
        assert!(symmetric_binary_crossover(&skew).is_err());
    }

    #[test]
    fn solver_zero_budget_is_constant() {
        let problem = IbProblem::new(example_hop1(), 0.0, 6).unwrap();
        let sol = ib_max(&problem, &SolverOptions::default()).unwrap();
        assert_eq!(sol.payoff, 0.0);
        assert_eq!(sol.rate_used, 0.0);
    }

    #[test]
    fn solver_unconstrained_budget_reaches_capacity() {
        let problem = IbProblem::new(example_hop1(), 1.0, 6).unwrap();
        let sol = ib_max(&problem, &SolverOptions::default()).unwrap();
        assert!((sol.payoff - EXAMPLE_IXY).abs() < 1e-6, "payoff {}", sol.payoff);
        assert!(sol.rate_used <= 1.0 + 1e-9);
    }

    #[test]
    fn solver_matches_oracle_at_half_rate() {
        let problem = IbProblem::new(example_hop1(), 0.5, 6).unwrap();
        let sol = ib_max(&problem, &SolverOptions::default()).unwrap();
        assert!((sol.payoff - F_AT_HALF).abs() < 1e-4, "payoff {}", sol.payoff);
        assert!(sol.rate_used <= 0.5 + 1e-9);

        let problem = IbProblem::new(example_hop2(), 0.5, 6).unwrap();
        let sol = ib_max(&problem, &SolverOptions::default()).unwrap();
        assert!((sol.payoff - G_AT_HALF).abs() < 1e-4, "payoff {}", sol.payoff);
    }

    #[test]
    fn solution_respects_feasibility_and_ceiling() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let opts = SolverOptions {
            restarts: 6,
            ..SolverOptions::default()
        };
        for _ in 0..6 {
            let src = random_binary_source(&mut rng);
            let i_xy = mutual_information(src.p_xy());
            for budget in [0.05, 0.3, 0.8] {
                let problem = IbProblem::new(src.p_xy().clone(), budget, 6).unwrap();
                let sol = ib_max(&problem, &opts).unwrap();
                assert!(sol.rate_used <= budget + 1e-9);
                assert!(sol.payoff <= sol.rate_used.min(i_xy) + 1e-9);
            }
        }
    }

    #[test]
    fn brute_force_basics() {
        let problem = IbProblem::new(example_hop1(), 0.0, 2).unwrap();
        assert_eq!(brute_force_ib(&problem, 0.01).unwrap(), 0.0);
        let problem = IbProblem::new(example_hop1(), 0.5, 4).unwrap();
        assert!(brute_force_ib(&problem, 0.01).is_err());
        let three = Joint::new(vec![
            vec![0.2, 0.1, 0.05],
            vec![0.05, 0.3, 0.1],
            vec![0.1, 0.05, 0.05],
        ])
        .unwrap();
        let problem = IbProblem::new(three, 0.5, 2).unwrap();
        assert!(brute_force_ib(&problem, 0.01).is_err());
    }

    #[test]
    fn brute_force_cross_checks_oracle() {
        let problem = IbProblem::new(example_hop1(), 0.5, 2).unwrap();
        let b = brute_force_ib(&problem, 1e-3).unwrap();
        assert!((b - F_AT_HALF).abs() < 1e-3, "brute {b}");
        let problem = IbProblem::new(example_hop2(), 0.5, 2).unwrap();
        let b = brute_force_ib(&problem, 1e-3).unwrap();
        assert!((b - G_AT_HALF).abs() < 1e-3, "brute {b}");
    }

    #[test]
    fn curve_basics() {
        let c = RateExponentCurve::from_points(vec![(0.0, 0.0)]).unwrap();
        assert_eq!(c.eval(0.0), 0.0);
        assert_eq!(c.eval(2.0), 0.0);
        assert!(RateExponentCurve::from_points(vec![]).is_err());

        let c = RateExponentCurve::from_points(vec![
            (0.0, 0.0),
            (0.2, 0.15),
            (0.4, 0.18),
            (0.3, 0.05), // dominated dip, repaired away
            (1.0, 0.25),
        ])
        .unwrap();
        // nondecreasing and concave
        let ks = c.knots();
        for w in ks.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-12);
            assert!(w[1].0 > w[0].0);
        }
        for rate in [0.0, 0.1, 0.35, 0.9, 5.0] {
            assert!(c.eval(rate) >= -1e-12);
        }
        assert_eq!(c.eval(5.0), c.max_exponent());
        // inverse is a left inverse on attained values
        for t in [0.0, 0.05, 0.12, 0.2, 0.25] {
            let r = c.inverse(t).unwrap();
            assert!(c.eval(r) >= t - 1e-9, "t={t} r={r} eval={}", c.eval(r));
        }
        assert!(c.inverse(0.3).is_none());
    }

    #[test]
    fn grid_validation() {
        let j = example_hop1();
        let opts = SolverOptions::default();
        assert!(build_curve(&j, &[], 6, &opts).is_err());
        assert!(build_curve(&j, &[0.1, 0.2], 6, &opts).is_err());
        assert!(build_curve(&j, &[0.0, 0.3, 0.2], 6, &opts).is_err());
    }

    #[test]
    fn curve_on_example_matches_oracle() {
        let grid = uniform_grid(1.0, 0.05);
        let opts = SolverOptions {
            restarts: 8,
            ..SolverOptions::default()
        };
        let f = build_curve(&example_hop1(), &grid, 6, &opts).unwrap();
        for &(r, e) in f.knots() {
            let oracle = mgl_value(0.1, r.min(1.0)).unwrap();
            assert!((e - oracle).abs() < 2e-4, "rate {r}: {e} vs {oracle}");
        }
        assert!((f.eval(0.5) - F_AT_HALF).abs() < 2e-4);
    }

    #[test]
    fn cardinality_beyond_bound_changes_nothing() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let opts = SolverOptions {
            restarts: 8,
            ..SolverOptions::default()
        };
        for _ in 0..3 {
            let src = random_binary_source(&mut rng);
            let p6 = IbProblem::new(src.p_xy().clone(), 0.4, 6).unwrap();
            let p9 = IbProblem::new(src.p_xy().clone(), 0.4, 9).unwrap();
            let a = ib_max(&p6, &opts).unwrap().payoff;
            let b = ib_max(&p9, &opts).unwrap().payoff;
            assert!((a - b).abs() <= 1e-4, "card 6: {a}, card 9: {b}");
        }
    }

    #[test]
    fn default_cardinalities() {
        assert_eq!(default_u_cardinality(2, 2), 6);
        assert_eq!(default_v_cardinality(2, 2), 25);
    }
}
