//! Nelder-Mead simplex minimization and a seeded multistart driver.
//!
//! Restarts run in parallel, but every restart draws from its own ChaCha
//! stream (`seed`, stream = restart index) and the winner is chosen by
//! lowest value then lowest restart index, so results do not depend on the
//! thread schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex along each coordinate.
    pub initial_step: f64,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
    pub max_evals: usize,
    /// Number of times to rebuild a fresh simplex around the best vertex
    /// after convergence.
    pub rebuilds: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: 0.5,
            f_tol: 1e-10,
            x_tol: 1e-8,
            max_evals: 20_000,
            rebuilds: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

/// Minimizes `f` from `x0` with the standard reflect/expand/contract/shrink
/// simplex iteration.
pub fn nelder_mead<F>(f: &F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let mut evals = 0usize;
    let mut best = (x0.to_vec(), f(x0));
    evals += 1;
    let mut converged = false;
    let mut step = opts.initial_step;
    for _ in 0..=opts.rebuilds {
        let run = simplex_run(f, &best.0, step, opts, opts.max_evals.saturating_sub(evals));
        evals += run.evals;
        let improved = run.value < best.1 - opts.f_tol;
        if run.value <= best.1 {
            best = (run.x, run.value);
        }
        converged = run.converged;
        if !improved && converged {
            break;
        }
        if evals >= opts.max_evals {
            break;
        }
        step *= 0.5;
    }
    Minimum {
        x: best.0,
        value: best.1,
        evals,
        converged,
    }
}

fn simplex_run<F>(f: &F, x0: &[f64], step: f64, opts: &NelderMeadOptions, budget: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    evals += 1;
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = f(&x);
        evals += 1;
        simplex.push((x, v));
    }

    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (f_spread <= opts.f_tol && diameter <= opts.x_tol) || diameter <= 1e-13 {
            converged = true;
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();

        let point = |coef: f64, out: &mut Vec<f64>| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&worst.0) {
                *o = c + coef * (w - c);
            }
        };

        point(-ALPHA, &mut trial);
        let fr = f(&trial);
        evals += 1;
        if fr < simplex[0].1 {
            let reflected = trial.clone();
            point(-ALPHA * GAMMA, &mut trial);
            let fe = f(&trial);
            evals += 1;
            simplex[n] = if fe < fr { (trial.clone(), fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (trial.clone(), fr);
            continue;
        }
        // Contraction, outside when the reflection beat the worst vertex.
        let (coef, target) = if fr < worst.1 { (-RHO, fr) } else { (RHO, worst.1) };
        point(coef, &mut trial);
        let fc = f(&trial);
        evals += 1;
        if fc < target {
            simplex[n] = (trial.clone(), fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (x, b) in vertex.0.iter_mut().zip(&best) {
                *x = b + SIGMA * (*x - b);
            }
            vertex.1 = f(&vertex.0);
            evals += 1;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        evals,
        converged,
    }
}

/// Result of [`multistart`].
#[derive(Clone, Debug)]
pub struct MultistartResult {
    pub best: Minimum,
    /// Index of the restart that produced `best`.
    pub restart: usize,
    pub total_evals: usize,
}

/// Deterministic per-restart generator.
pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Runs Nelder-Mead from a set of fixed starting points followed by
/// `restarts` random ones drawn by `sample`.
pub fn multistart<F, S>(
    f: &F,
    fixed_starts: &[Vec<f64>],
    restarts: usize,
    seed: u64,
    sample: S,
    opts: &NelderMeadOptions,
) -> MultistartResult
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let total = fixed_starts.len() + restarts;
    assert!(total > 0, "multistart needs at least one start");
    let runs: Vec<Minimum> = (0..total)
        .into_par_iter()
        .map(|i| {
            let x0 = if i < fixed_starts.len() {
                fixed_starts[i].clone()
            } else {
                sample(&mut restart_rng(seed, i - fixed_starts.len()))
            };
            nelder_mead(f, &x0, opts)
        })
        .collect();
    let total_evals = runs.iter().map(|m| m.evals).sum();
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .expect("non-empty");
    MultistartResult {
        best,
        restart,
        total_evals,
    }
}

/// Uniform sample in `[lo, hi)^n`.
pub fn uniform_box(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }

    #[test]
    fn minimizes_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 3.0;
        let m = nelder_mead(&f, &[5.0, 5.0], &NelderMeadOptions::default());
        assert!(m.converged);
        assert!((m.value - 3.0).abs() < 1e-9);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] + 0.5).abs() < 1e-4);
    }

    #[test]
    fn minimizes_rosenbrock_4d() {
        let opts = NelderMeadOptions {
            max_evals: 50_000,
            f_tol: 1e-14,
            x_tol: 1e-10,
            ..Default::default()
        };
        let m = nelder_mead(&rosenbrock, &[-1.2, 1.0, -1.2, 1.0], &opts);
        assert!(m.value < 1e-8, "{m:?}");
    }

    #[test]
    fn multistart_finds_global_minimum_deterministically() {
        // Two wells; the deeper one is at x = 2.
        let f = |x: &[f64]| {
            let a = (x[0] + 1.0).powi(2);
            let b = (x[0] - 2.0).powi(2) - 0.5;
            a.min(b) + x[1] * x[1]
        };
        let sample = |rng: &mut ChaCha8Rng| uniform_box(rng, 2, -4.0, 4.0);
        let opts = NelderMeadOptions::default();
        let r1 = multistart(&f, &[], 16, 42, sample, &opts);
        let r2 = multistart(&f, &[], 16, 42, sample, &opts);
        assert!((r1.best.value + 0.5).abs() < 1e-9);
        assert_eq!(r1.best.x, r2.best.x);
        assert_eq!(r1.restart, r2.restart);
    }

    #[test]
    fn restart_streams_differ() {
        let a: f64 = restart_rng(1, 0).gen();
        let b: f64 = restart_rng(1, 1).gen();
        let c: f64 = restart_rng(1, 0).gen();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
