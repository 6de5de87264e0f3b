//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Final-size distribution of a Reed-Frost chain binomial in a closed
/// group of `s` susceptibles and `i` initial infectives, by enumerating
/// every subset of susceptibles infected in every generation.
pub fn reed_frost_enumeration(s: usize, i: usize, p: f64) -> Vec<f64> {
    fn step(s: usize, i: usize, infected: usize, prob: f64, p: f64, out: &mut [f64]) {
        let escape = (1.0 - p).powi(i as i32);
        for mask in 0u32..(1 << s) {
            let n = mask.count_ones() as usize;
            let w = prob * (1.0 - escape).powi(n as i32) * escape.powi((s - n) as i32);
            if w == 0.0 {
                continue;
            }
            if n == 0 {
                out[infected] += w;
            } else {
                step(s - n, n, infected + n, w, p, out);
            }
        }
    }
    let mut out = vec![0.0; s + 1];
    if i == 0 {
        out[0] = 1.0;
    } else {
        step(s, i, 0, 1.0, p, &mut out);
    }
    out
}

/// One household of two children, a female and a male adult. Each member is
/// infected from outside with probability `1 - psi[role]`; infection then
/// spreads by a Reed-Frost chain with per-pair probability `p_h`. Returns
/// `(children, female, male)` ever infected.
pub fn household_ex2_draw<R: Rng>(psi: [f64; 3], p_h: f64, rng: &mut R) -> (usize, usize, usize) {
    let roles = [0usize, 0, 1, 2];
    let mut infected = [false; 4];
    let mut current = Vec::new();
    for (m, &r) in roles.iter().enumerate() {
        if rng.random::<f64>() >= psi[r] {
            infected[m] = true;
            current.push(m);
        }
    }
    while !current.is_empty() {
        let mut next = Vec::new();
        for m in 0..4 {
            if infected[m] {
                continue;
            }
            if current.iter().any(|_| rng.random::<f64>() < p_h) {
                infected[m] = true;
                next.push(m);
            }
        }
        current = next;
    }
    (
        infected[0] as usize + infected[1] as usize,
        infected[2] as usize,
        infected[3] as usize,
    )
}

/// Monte Carlo estimate of the 12 cell probabilities, indexed
/// `children * 4 + female * 2 + male`.
pub fn household_ex2_monte_carlo(psi: [f64; 3], p_h: f64, n: usize, seed: u64) -> [f64; 12] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0usize; 12];
    for _ in 0..n {
        let (c, f, m) = household_ex2_draw(psi, p_h, &mut rng);
        counts[c * 4 + f * 2 + m] += 1;
    }
    counts.map(|c| c as f64 / n as f64)
}

/// Final size with a constant infectious period `mu` via the equivalent
/// random directed graph: an infective infects each susceptible
/// independently with probability `1 - exp(-mu * pairwise rate)`.
pub fn random_graph_final_size<R: Rng>(
    pop: &threemix::PopulationStructure,
    rates: &threemix::ContactRates,
    mu: f64,
    index: usize,
    rng: &mut R,
) -> usize {
    let n = pop.n_individuals();
    let mut infected = vec![false; n];
    infected[index] = true;
    let mut frontier = vec![index];
    let mut total = 1;
    while let Some(i) = frontier.pop() {
        let (h, g) = (pop.household_of(i), pop.group_of(i));
        let class = pop.rate_class(g);
        for j in 0..n {
            if infected[j] {
                continue;
            }
            let mut rate = rates.community / n as f64;
            if pop.household_of(j) == h {
                rate += rates.household;
            }
            if class > 0 && pop.group_of(j) == g {
                rate += rates.group[class - 1] / pop.group_size(g) as f64;
            }
            if rng.random::<f64>() < 1.0 - (-mu * rate).exp() {
                infected[j] = true;
                frontier.push(j);
                total += 1;
            }
        }
    }
    total
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = (n as f64 * m as f64 / (n + m) as f64).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    (d, kolmogorov_q(lambda))
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Brute-force maximum of `f` over `{0, 1/n, ..., 1}^dim`.
pub fn grid_oracle<F: Fn(&[f64]) -> f64>(f: F, dim: usize, n: usize) -> (Vec<f64>, f64) {
    let total = (n + 1).pow(dim as u32);
    let mut best = (vec![0.0; dim], f64::NEG_INFINITY);
    let mut x = vec![0.0; dim];
    for idx in 0..total {
        let mut r = idx;
        for v in x.iter_mut() {
            *v = (r % (n + 1)) as f64 / n as f64;
            r /= n + 1;
        }
        let v = f(&x);
        if v > best.1 {
            best = (x.clone(), v);
        }
    }
    best
}

/// Central finite-difference gradient.
pub fn numeric_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let mut up = x.to_vec();
            let mut dn = x.to_vec();
            up[k] += h;
            dn[k] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn sd(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}
