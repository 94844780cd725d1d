//! Independent oracles and instance generators shared by the integration
//! tests. Nothing here goes through the log-likelihood-ratio spectrum.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive weights on a random subset (at least one outcome), normalized.
pub fn random_masses(rng: &mut ChaCha8Rng, k: usize, zero_prob: f64) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..k)
            .map(|_| {
                if rng.gen_bool(zero_prob) {
                    0.0
                } else {
                    -rng.gen::<f64>().ln()
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.iter().map(|x| x / total).collect();
        }
    }
}

/// A pair on `k` outcomes, with zero entries on either side about
/// `zero_prob` of the time.
pub fn random_pair(rng: &mut ChaCha8Rng, k: usize, zero_prob: f64) -> (Vec<f64>, Vec<f64>) {
    (random_masses(rng, k, zero_prob), random_masses(rng, k, zero_prob))
}

/// Masses on the grid `{0, 1/denom, ..., 1}`: a uniform random composition
/// of `denom` into `k` parts, zeros allowed.
pub fn grid_masses(rng: &mut ChaCha8Rng, k: usize, denom: u32) -> Vec<f64> {
    let mut cuts: Vec<u32> = (0..k - 1).map(|_| rng.gen_range(0..=denom)).collect();
    cuts.push(0);
    cuts.push(denom);
    cuts.sort_unstable();
    cuts.windows(2)
        .map(|w| f64::from(w[1] - w[0]) / f64::from(denom))
        .collect()
}

/// `min Σ q x` over `0 <= x <= 1` with `Σ p x >= alpha`, by the greedy
/// fractional knapsack: take outcomes in increasing `q/p`, the last one
/// fractionally. Outcomes with equal ratios cost the same in any order.
pub fn lp_beta(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let mut items: Vec<(f64, f64)> = p
        .iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&a, &b)| (a, b))
        .collect();
    items.sort_by(|a, b| (a.1 / a.0).total_cmp(&(b.1 / b.0)));
    let mut need = alpha;
    let mut cost = 0.0;
    for (pi, qi) in items {
        if need <= 0.0 {
            break;
        }
        let take = (need / pi).min(1.0);
        cost += take * qi;
        need -= take * pi;
    }
    cost
}

/// `Σ min(Q, λP)` straight from the masses.
pub fn sum_min(p: &[f64], q: &[f64], lambda: f64) -> f64 {
    p.iter().zip(q).map(|(&a, &b)| b.min(lambda * a)).sum()
}

/// Explicit `n`-fold product pair, outcomes in lexicographic order.
pub fn product_pair(p: &[f64], q: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pp = vec![1.0];
    let mut qq = vec![1.0];
    for _ in 0..n {
        pp = pp.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect();
        qq = qq.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
    }
    (pp, qq)
}

/// `P{ln(P/Q) <= z}` straight from the masses; `P = 0` outcomes carry no
/// P-mass and `Q = 0` outcomes sit at `+inf`.
pub fn direct_cdf(p: &[f64], q: &[f64], z: f64) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0 && (a / b).ln() <= z)
        .map(|(&a, _)| a)
        .sum()
}
