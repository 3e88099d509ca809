//! Depolarizing gate noise, Monte Carlo shot harness and (p_L, R) estimators.

use crate::circuits::{Circuit, Op};
use crate::error::{Error, Result};
use crate::pauli::{Gate, GateKind, Pauli};
use crate::protocol::{run_shot, support_paulis, Classification, FaultSite, Reference};
use crate::tableau::shot_rng;
use rand::Rng;
use serde::Serialize;
use std::io::Write;

/// Gate-only depolarizing noise: each k-qubit gate is followed by a uniformly random
/// non-identity Pauli on its support with probability p (k ≥ 2) or q (k = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseModel {
    pub p: f64,
    pub q: f64,
    /// Treat SWAP gates (permutation-realized logical gates) as noisy.
    pub noisy_swaps: bool,
}

impl NoiseModel {
    /// Single-qubit rate q = p/10.
    pub fn new(p: f64) -> NoiseModel {
        NoiseModel { p, q: p / 10.0, noisy_swaps: false }
    }

    pub fn noiseless() -> NoiseModel {
        NoiseModel::new(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) || !(0.0..=1.0).contains(&self.q) {
            return Err(Error::Config(format!("error rates out of range: p={}, q={}", self.p, self.q)));
        }
        Ok(())
    }

    pub fn rate(&self, g: &Gate) -> f64 {
        match g.kind {
            GateKind::Swap if !self.noisy_swaps => 0.0,
            k if k.arity() == 1 => self.q,
            _ => self.p,
        }
    }

    /// All faults of one shot, in op order.
    pub fn sample_faults<R: Rng>(&self, c: &Circuit, rng: &mut R) -> Vec<FaultSite> {
        FaultSampler::new(c, self).sample(rng)
    }
}

/// Precomputed noisy gates of a circuit. Draws the position of the next fault directly from the
/// cumulative survival probability, so a fault-free shot costs one uniform draw.
#[derive(Clone, Debug)]
pub struct FaultSampler {
    n: usize,
    gates: Vec<(usize, Gate)>,
    // log_surv[k] = Σ_{j ≤ k} ln(1 − r_j)
    log_surv: Vec<f64>,
}

impl FaultSampler {
    pub fn new(c: &Circuit, noise: &NoiseModel) -> FaultSampler {
        let (mut gates, mut log_surv, mut acc) = (vec![], vec![], 0.0);
        for (i, op) in c.ops.iter().enumerate().skip(c.noise_from) {
            if let Op::Gate(g) = op {
                let r = noise.rate(g);
                if r > 0.0 {
                    acc += (1.0 - r).max(f64::MIN_POSITIVE).ln();
                    gates.push((i, *g));
                    log_surv.push(acc);
                }
            }
        }
        FaultSampler { n: c.n, gates, log_surv }
    }

    /// Probability that a shot has no fault at all.
    pub fn fault_free_probability(&self) -> f64 {
        self.log_surv.last().map_or(1.0, |l| l.exp())
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<FaultSite> {
        let u = rng.gen::<f64>();
        self.sample_from(u, rng)
    }

    /// Whether a shot whose first uniform draw is `u` has any fault.
    pub fn any_fault(&self, u: f64) -> bool {
        (1.0 - u).ln() > self.log_surv.last().copied().unwrap_or(0.0)
    }

    /// Faults of a shot given its first uniform draw `u`; later draws come from `rng`.
    pub fn sample_from<R: Rng>(&self, mut u: f64, rng: &mut R) -> Vec<FaultSite> {
        let mut out = vec![];
        let mut base = 0.0;
        let mut from = 0;
        loop {
            // first k ≥ from with survival relative to `base` below u
            let ln_u = (1.0 - u).ln() + base;
            let k = from + self.log_surv[from..].partition_point(|&l| l >= ln_u);
            if k >= self.gates.len() {
                return out;
            }
            let (op, g) = &self.gates[k];
            let pick = rng.gen_range(0..4usize.pow(g.qubits().len() as u32) - 1);
            out.push(FaultSite { op: *op, pauli: support_paulis(self.n, g.qubits())[pick] });
            base = self.log_surv[k];
            from = k + 1;
            u = rng.gen();
        }
    }
}

/// Draws the error following one gate, if any.
pub fn sample_fault<R: Rng>(noise: &NoiseModel, g: &Gate, n: usize, rng: &mut R) -> Option<Pauli> {
    let r = noise.rate(g);
    if r <= 0.0 || rng.gen::<f64>() >= r {
        return None;
    }
    let k = g.qubits().len() as u32;
    let pick = rng.gen_range(0..4usize.pow(k) - 1);
    Some(support_paulis(n, g.qubits())[pick])
}

/// Uniform in [0, 1) from a SplitMix64 hash of (seed, shot).
pub fn unit_hash(seed: u64, shot: u64) -> f64 {
    let mut z = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ shot.wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let (n, p) = (n as f64, k as f64 / n as f64);
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt()) / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub p: f64,
    pub q: f64,
    pub shots: u64,
    pub n_postselected: u64,
    pub n_failure: u64,
    pub p_l: f64,
    pub p_l_ci_lo: f64,
    pub p_l_ci_hi: f64,
    pub r: f64,
    pub r_ci_lo: f64,
    pub r_ci_hi: f64,
    /// Fewer failures than the requested minimum.
    #[serde(skip)]
    pub insufficient: bool,
}

impl ExperimentResult {
    pub fn from_counts(noise: &NoiseModel, shots: u64, n_postselected: u64, n_failure: u64) -> ExperimentResult {
        let p_l = if n_postselected == 0 { 0.0 } else { n_failure as f64 / n_postselected as f64 };
        let (pl_lo, pl_hi) = wilson(n_failure, n_postselected);
        let (r_lo, r_hi) = wilson(n_postselected, shots);
        ExperimentResult {
            p: noise.p,
            q: noise.q,
            shots,
            n_postselected,
            n_failure,
            p_l,
            p_l_ci_lo: pl_lo,
            p_l_ci_hi: pl_hi,
            r: n_postselected as f64 / shots as f64,
            r_ci_lo: r_lo,
            r_ci_hi: r_hi,
            insufficient: false,
        }
    }
}

/// Counters for shots `range`, parallel over `threads`. Fault-free shots are not simulated:
/// a noiseless run is always a success.
fn run_range(c: &Circuit, noise: &NoiseModel, reference: &Reference, seed: u64, range: std::ops::Range<u64>, threads: usize) -> Result<(u64, u64)> {
    let sampler = FaultSampler::new(c, noise);
    let one = |shot: u64| -> Result<Classification> {
        // a cheap counter-based draw decides whether the shot has any fault at all
        let u = unit_hash(seed, shot);
        if !sampler.any_fault(u) {
            return Ok(Classification::Success);
        }
        let mut rng = shot_rng(seed, shot);
        let faults = sampler.sample_from(u, &mut rng);
        Ok(run_shot(c, reference, &faults, rng, false)?.0)
    };
    let count = |r: std::ops::Range<u64>| -> Result<(u64, u64)> {
        let (mut acc, mut fail) = (0, 0);
        for s in r {
            match one(s)? {
                Classification::Success => acc += 1,
                Classification::Failure => {
                    acc += 1;
                    fail += 1
                }
                Classification::Discard => {}
            }
        }
        Ok((acc, fail))
    };
    let threads = threads.max(1) as u64;
    let len = range.end - range.start;
    if threads == 1 || len < 64 {
        return count(range);
    }
    let chunk = len.div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = range.start + t * chunk;
                let hi = (lo + chunk).min(range.end);
                let f = &count;
                s.spawn(move || f(lo..hi.max(lo)))
            })
            .collect();
        handles.into_iter().try_fold((0, 0), |(a, f), h| {
            let (a2, f2) = h.join().expect("worker panicked")?;
            Ok((a + a2, f + f2))
        })
    })
}

/// Runs `shots` shots with per-shot generators derived from `seed`.
pub fn run_experiment(c: &Circuit, noise: &NoiseModel, shots: u64, reference: &Reference, seed: u64, threads: usize) -> Result<ExperimentResult> {
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    noise.validate()?;
    let (acc, fail) = run_range(c, noise, reference, seed, 0..shots, threads)?;
    Ok(ExperimentResult::from_counts(noise, shots, acc, fail))
}

/// Doubles the shot count from `min_shots` until at least `min_failures` failures are seen or
/// `max_shots` is reached. Earlier shots are reused, so the result equals a single run of the
/// final size.
pub fn run_until_failures(
    c: &Circuit,
    noise: &NoiseModel,
    reference: &Reference,
    seed: u64,
    threads: usize,
    min_shots: u64,
    max_shots: u64,
    min_failures: u64,
) -> Result<ExperimentResult> {
    noise.validate()?;
    let (mut done, mut acc, mut fail) = (0u64, 0u64, 0u64);
    let mut target = min_shots.max(1).min(max_shots);
    loop {
        let (a, f) = run_range(c, noise, reference, seed, done..target, threads)?;
        acc += a;
        fail += f;
        done = target;
        if fail >= min_failures || done >= max_shots {
            break;
        }
        // aim for the failure target from the current rate, at most 8x per step
        let est = if fail == 0 { done * 8 } else { (done as f64 * min_failures as f64 / fail as f64 * 1.1) as u64 };
        target = est.clamp(done * 2, done * 8).min(max_shots);
    }
    let mut r = ExperimentResult::from_counts(noise, done, acc, fail);
    r.insufficient = fail < min_failures;
    Ok(r)
}

pub const CSV_HEADER: [&str; 11] = ["p", "q", "shots", "n_postselected", "n_failure", "p_L", "p_L_ci_lo", "p_L_ci_hi", "R", "R_ci_lo", "R_ci_hi"];

pub fn write_results_csv<W: Write>(rows: &[ExperimentResult], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Config(e.to_string());
    wr.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        wr.write_record([
            format!("{:.6e}", r.p),
            format!("{:.6e}", r.q),
            r.shots.to_string(),
            r.n_postselected.to_string(),
            r.n_failure.to_string(),
            format!("{:.6e}", r.p_l),
            format!("{:.6e}", r.p_l_ci_lo),
            format!("{:.6e}", r.p_l_ci_hi),
            format!("{:.6}", r.r),
            format!("{:.6}", r.r_ci_lo),
            format!("{:.6}", r.r_ci_hi),
        ])
        .map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Config(e.to_string()))
}

/// Fit of log p_L = a·log p + b.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r2: f64,
}

/// Least-squares log-log fit with per-point weights.
pub fn fit_scaling_weighted(points: &[(f64, f64, f64)]) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64, f64)> = points.iter().filter(|p| p.1 > 0.0 && p.0 > 0.0 && p.2 > 0.0).map(|&(p, pl, w)| (p.ln(), pl.ln(), w)).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientFailures(format!("{} usable points, need 3", pts.len())));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| p.2 * (p.1 - my).powi(2)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ScalingFit { exponent: a, prefactor: b.exp(), r2 })
}

/// Unweighted log-log fit over (p, p_L) pairs.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    fit_scaling_weighted(&points.iter().map(|&(p, pl)| (p, pl, 1.0)).collect::<Vec<_>>())
}

/// Inverse-variance weighted fit over experiment rows (variance of ln p_L ≈ 1/n_failure).
pub fn fit_results(rows: &[ExperimentResult]) -> Result<ScalingFit> {
    fit_scaling_weighted(&rows.iter().map(|r| (r.p, r.p_l, r.n_failure as f64)).collect::<Vec<_>>())
}

/// `k` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    (0..k).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (k - 1) as f64).exp()).collect()
}
