//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

mod common;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use threemix::datasets::Dataset;
use threemix::hh_finalsize::{household_final_size, mean_final_size, HouseholdFinalSizeTable};
use threemix::likelihood::{mle_from, CompleteDataLikelihood};
use threemix::mcmc::{
    rstar_ex1, run_chains, run_complete_chain, run_finalsize_chain, summarize, ChainConfig, FinalSizeTarget,
    PosteriorSummary, Samples,
};
use threemix::population::{build_villages, Example2Layout};
use threemix::pseudolikelihood::{household_table_ex2, pseudo_mle_ex1, HouseholdTriples, VillageFinalSize};
use threemix::reproduce::{complete_posterior, village_posterior};
use threemix::simulate::{final_size, simulate_replicate, simulate_replicates};
use threemix::threshold::{rstar_example1, rstar_example2};
use threemix::{ContactRates, EpidemicParams, Execution, InitialCondition, PeriodDistribution};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn p_h(lambda_h: f64) -> f64 {
    1.0 - (-lambda_h).exp()
}

const EXEC: Execution = Execution::Parallel;

fn criterion_1() -> Verdict {
    let r11 = rstar_example1(0.001, 1.4, 1.0, p_h(0.3)).unwrap();
    let r12 = rstar_example1(0.6, 0.6, 1.0, p_h(0.3)).unwrap();
    let r21 = rstar_example2(0.3, 0.05, 1.2, 0.6, 1.0).unwrap();
    let r22 = rstar_example2(0.3, 0.005, 1.2, 0.6, 1.0).unwrap();
    let pass =
        within(r11, 1.763, 0.002) && within(r12, 1.511, 0.001) && within(r21, 2.082, 0.02) && within(r22, 1.992, 0.02);
    verdict(
        pass,
        format!(
            "ex1 {r11:.4} (1.763), {r12:.4} (1.511); ex2 {r21:.4} (2.082), {r22:.4} (1.992); offsets {:+.4}, {:+.4} with mu3 = {:.6}",
            r21 - 2.082,
            r22 - 1.992,
            mean_final_size(3, 1, p_h(0.3)).unwrap()
        ),
    )
}

fn criterion_2() -> Verdict {
    let data = Dataset::D11.village_counts().unwrap();
    let t = Instant::now();
    let m = pseudo_mle_ex1(&data, EXEC).unwrap();
    let elapsed = t.elapsed();
    let x = m.params.to_vec();
    let r = rstar_ex1(&x);
    let got = [x[0], x[1], x[2], r];
    let want = [0.279, 0.238, 1.000, 1.836];
    let pass = got.iter().zip(want).all(|(g, w)| within(*g, w, 0.01)) && elapsed < Duration::from_secs(1);
    verdict(pass, format!("MLE {got:.4?} vs {want:?}, {elapsed:.2?}"))
}

fn full_chain() -> ChainConfig {
    ChainConfig::default()
}

fn posterior_line(s: &PosteriorSummary) -> (Vec<f64>, Vec<f64>) {
    let mut means: Vec<f64> = s.parameters.iter().map(|p| p.mean).collect();
    let mut sds: Vec<f64> = s.parameters.iter().map(|p| p.sd).collect();
    let r = s.rstar.as_ref().unwrap();
    means.push(r.mean);
    sds.push(r.sd);
    (means, sds)
}

fn criterion_3() -> Verdict {
    let data = Dataset::D11.village_counts().unwrap();
    let chains = 4;
    let t = Instant::now();
    let s = village_posterior(&data, &full_chain(), chains, Execution::Sequential).unwrap();
    let per_chain = t.elapsed() / chains as u32;
    let (means, sds) = posterior_line(&s);
    let want_m = [0.277, 0.238, 0.999, 1.836];
    let want_sd = [0.037, 0.014, 0.001, 0.062];
    let mean_ok: Vec<bool> = means.iter().zip(want_m).map(|(g, w)| within(*g, w, 0.01)).collect();
    let sd_ok: Vec<bool> = sds.iter().zip(want_sd).map(|(g, w)| within(*g, w, 0.3 * w)).collect();
    let rho = s.correlation[0][1];
    let pass =
        mean_ok.iter().chain(&sd_ok).all(|&b| b) && within(rho, 0.57, 0.1) && per_chain < Duration::from_secs(60);
    verdict(
        pass,
        format!(
            "means {means:.4?} ok {mean_ok:?}; sds {sds:.4?} vs {want_sd:?} ok {sd_ok:?}; rho(p_H,pi_G) {rho:.3}; {per_chain:.2?}/chain"
        ),
    )
}

fn criterion_4() -> Verdict {
    let data = Dataset::D12.village_counts().unwrap();
    let t = Instant::now();
    let m = pseudo_mle_ex1(&data, EXEC).unwrap();
    let (grid_x, grid_best) = grid_oracle(|x| data_loglik(&data, x), 3, 200);
    let gap = grid_best - m.loglik;
    let s = village_posterior(&data, &full_chain(), 4, EXEC).unwrap();
    let elapsed = t.elapsed();
    let (means, _) = posterior_line(&s);
    let want_m = [0.272, 0.498, 0.658, 1.550];
    let mean_ok = means.iter().zip(want_m).all(|(g, w)| within(*g, w, 0.03));
    let rho = s.correlation[1][2];
    let pass = gap <= 0.01
        && within(m.params.p_h, 0.272, 0.02)
        && mean_ok
        && within(rho, -0.95, 0.05)
        && elapsed < Duration::from_secs(60);
    verdict(
        pass,
        format!(
            "MLE {:.4?} loglik {:.4}, grid max {grid_best:.4} at {grid_x:?} (gap {gap:.2e}); means {means:.4?}; rho(pi_G,pi_C) {rho:.3}; {elapsed:.2?}",
            m.params.to_vec(),
            m.loglik
        ),
    )
}

fn data_loglik(data: &VillageFinalSize, x: &[f64]) -> f64 {
    threemix::pseudolikelihood::pseudo_loglik_ex1(data, &threemix::TransformedParams::new(x[0], vec![x[1]], x[2]))
        .unwrap_or(f64::NEG_INFINITY)
}

fn criterion_5() -> Verdict {
    let t = Instant::now();
    let d = Dataset::D11;
    let pop = d.population();
    let init = d.initial();

    // (a) score against central differences on 20 random cases
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut cases = 0;
    let small = build_villages(4, 30, 2).unwrap();
    let varied = EpidemicParams {
        latent: PeriodDistribution::Exponential { mean: 1.0 },
        infectious: PeriodDistribution::Gamma { mean: 1.0, shape: 2.0 },
        ..EpidemicParams::fixed(ContactRates::new(0.5, vec![2.0], 1.0), 1.0, 1.0)
    };
    let mut r = 0;
    while cases < 20 {
        let log = simulate_replicate(&small, &varied, &init, 21, r).unwrap();
        r += 1;
        if log.final_size() < 5 {
            continue;
        }
        let lik = CompleteDataLikelihood::new(&log, &small, log.end_time()).unwrap();
        let x: Vec<f64> = (0..3).map(|_| rand::Rng::random_range(&mut rng, 0.05..3.0)).collect();
        let analytic = lik.score(&x).unwrap();
        let h = 1e-6 * x.iter().cloned().fold(1.0, f64::max);
        let numeric = numeric_gradient(|y| lik.log_likelihood_unchecked(y), &x, h);
        for k in 0..3 {
            worst = worst.max((analytic[k] - numeric[k]).abs() / analytic[k].abs().max(1.0));
        }
        cases += 1;
    }
    let a_ok = worst < 1e-5;

    // (b) calibration over 50 seeded replicates at the Dataset 1.1 rates
    let truth = d.rates().to_vec();
    let logs = simulate_replicates(&pop, &d.params(), &init, 2024, 50, EXEC).unwrap();
    let mut major = 0;
    let mut covered = 0;
    for log in logs.iter().filter(|l| l.final_size() >= 200) {
        major += 1;
        let lik = CompleteDataLikelihood::new(log, &pop, log.end_time()).unwrap();
        let m = mle_from(&lik, &[0.5; 3]).unwrap();
        let x = m.rates.to_vec();
        let Ok(se) = lik.standard_errors(&x) else { continue };
        if (0..3).all(|k| (x[k] - truth[k]).abs() <= 3.0 * se[k]) {
            covered += 1;
        }
    }
    let b_ok = major > 0 && covered as f64 >= 0.9 * major as f64;

    // (c) one paired outbreak at the Dataset 1.2 rates
    let d2 = Dataset::D12;
    let (_, log) = threemix::reproduce::major_outbreak(d2, 7, 200, 1000).unwrap();
    let fs = final_size(&log, &pop).unwrap();
    let villages = VillageFinalSize::from_final_size(&fs, &pop).unwrap();
    let cfg = full_chain();
    let fin = village_posterior(&villages, &cfg, 4, EXEC).unwrap();
    let lik = CompleteDataLikelihood::new(&log, &pop, log.end_time()).unwrap();
    let comp = complete_posterior(&lik, 1.0, &cfg, 4, EXEC, rstar_ex1).unwrap();
    let sd_f: Vec<f64> = fin.parameters.iter().map(|p| p.sd).collect();
    let sd_c: Vec<f64> = comp.parameters.iter().map(|p| p.sd).collect();
    let c_ok = sd_f.iter().zip(&sd_c).all(|(f, c)| f > c);
    let elapsed = t.elapsed();

    verdict(
        a_ok && b_ok && c_ok && elapsed < Duration::from_secs(600),
        format!(
            "(a) worst relative score error {worst:.1e} over {cases} cases; (b) {covered}/{major} major outbreaks within 3 SE; (c) final-size sds {sd_f:.4?} > complete-data sds {sd_c:.4?}: {c_ok}; {elapsed:.1?}"
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut worst = 0.0f64;
    for s in 0..=4 {
        for i in 1..=2 {
            for p in [0.1, 0.2591818, 0.5, 0.9] {
                let fast = household_final_size(s, i, p).unwrap();
                let slow = reed_frost_enumeration(s, i, p);
                for k in 0..=s {
                    worst = worst.max((fast[k] - slow[k]).abs());
                }
            }
        }
    }
    let mu3 = mean_final_size(3, 1, 0.2591818).unwrap();
    let oracle: f64 = reed_frost_enumeration(3, 1, 0.2591818)
        .iter()
        .enumerate()
        .map(|(k, v)| k as f64 * v)
        .sum();
    verdict(
        worst < 1e-10 && within(mu3, 1.0928, 1e-3),
        format!(
            "max |recursion - enumeration| {worst:.1e}; mu3(0.2591818) = {mu3:.6} (enumeration {oracle:.6}) vs stated 1.0928"
        ),
    )
}

fn criterion_7() -> Verdict {
    let t = Instant::now();
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut worst_sum = 0.0f64;
    for p in grid {
        let table = HouseholdFinalSizeTable::new(p, 4, 4).unwrap();
        for a in grid {
            for b in grid {
                for c in grid {
                    let cells = household_table_ex2(&table, [a, b, c]);
                    worst_sum = worst_sum.max((cells.iter().sum::<f64>() - 1.0).abs());
                }
            }
        }
    }
    let settings: [([f64; 3], f64); 6] = [
        ([0.9, 0.8, 0.95], 0.26),
        ([0.5, 0.5, 0.5], 0.5),
        ([0.3, 0.9, 0.7], 0.1),
        ([0.95, 0.2, 0.6], 0.8),
        ([0.7, 0.7, 0.3], 0.35),
        ([0.6, 0.99, 0.85], 0.6),
    ];
    let n = 1_000_000;
    let results: Vec<(usize, usize)> = threemix::par::map_range(settings.len(), EXEC, |s| {
        let (psi, p) = settings[s];
        let exact = household_table_ex2(&HouseholdFinalSizeTable::new(p, 4, 4).unwrap(), psi);
        let mc = household_ex2_monte_carlo(psi, p, n, 100 + s as u64);
        let mut ok = 0;
        for c in 0..12 {
            let se = (exact[c] * (1.0 - exact[c]) / n as f64).sqrt();
            if (mc[c] - exact[c]).abs() <= 3.0 * se {
                ok += 1;
            }
        }
        (ok, 12)
    });
    let ok: usize = results.iter().map(|r| r.0).sum();
    let total: usize = results.iter().map(|r| r.1).sum();
    let elapsed = t.elapsed();
    verdict(
        worst_sum < 1e-10 && ok as f64 >= 0.95 * total as f64 && elapsed < Duration::from_secs(300),
        format!("max |sum - 1| {worst_sum:.1e} over 5^4 settings; {ok}/{total} cells within 3 SE of 10^6-draw Monte Carlo; {elapsed:.1?}"),
    )
}

fn within_mcse(s: &PosteriorSummary, mean: f64) -> (bool, Vec<f64>) {
    let z: Vec<f64> = s
        .parameters
        .iter()
        .map(|p| (p.mean - mean) / (p.sd / p.ess.sqrt()))
        .collect();
    (z.iter().all(|v| v.abs() <= 3.0), z)
}

fn criterion_8() -> Verdict {
    let t = Instant::now();
    let cfg = full_chain();
    let empty_villages = VillageFinalSize::new(vec![]);
    let v = run_chains(4, EXEC, |c| {
        run_finalsize_chain(FinalSizeTarget::Villages(&empty_villages), &cfg, c)
    })
    .unwrap();
    let sv = summarize(&Samples::from_chains(&v).unwrap()).unwrap();

    let sw = threemix::population::build_schools_workplaces();
    let layout = Example2Layout {
        households: vec![],
        schools: vec![],
        workplaces: vec![],
    };
    let empty_households = HouseholdTriples::new(vec![], &layout, &sw).unwrap();
    let h = run_chains(4, EXEC, |c| {
        run_finalsize_chain(FinalSizeTarget::Households(&empty_households), &cfg, c)
    })
    .unwrap();
    let sh = summarize(&Samples::from_chains(&h).unwrap()).unwrap();

    // one isolated individual: no susceptibles, so the likelihood is flat
    let solo = build_villages(1, 1, 1).unwrap();
    let params = EpidemicParams::fixed(ContactRates::new(0.3, vec![1.0], 0.1), 1.0, 1.0);
    let log = simulate_replicate(&solo, &params, &InitialCondition::single_infective(0), 1, 0).unwrap();
    let lik = CompleteDataLikelihood::new(&log, &solo, log.end_time()).unwrap();
    let names = ContactRates::new(0.0, vec![0.0], 0.0).names();
    let c = run_chains(4, EXEC, |k| run_complete_chain(&lik, names.clone(), &cfg, k, None)).unwrap();
    let sc = summarize(&Samples::from_chains(&c).unwrap()).unwrap();

    let (ok_v, zv) = within_mcse(&sv, 0.5);
    let (ok_h, zh) = within_mcse(&sh, 0.5);
    let (ok_c, zc) = within_mcse(&sc, 1.0);
    let elapsed = t.elapsed();
    verdict(
        ok_v && ok_h && ok_c && elapsed < Duration::from_secs(60),
        format!("z-scores: villages {zv:.2?}, households {zh:.2?}, complete {zc:.2?}; {elapsed:.1?}"),
    )
}

fn criterion_9() -> Verdict {
    let t = Instant::now();
    let pop = build_villages(2, 25, 2).unwrap();
    let constant = EpidemicParams::fixed(ContactRates::new(0.3, vec![1.4], 0.6), 1.0, 1.0);
    let exponential = EpidemicParams {
        latent: PeriodDistribution::Exponential { mean: 1.0 },
        ..constant.clone()
    };
    let init = InitialCondition::single_infective(0);
    let sizes = |p: &EpidemicParams, seed| -> Vec<f64> {
        simulate_replicates(&pop, p, &init, seed, 10_000, EXEC)
            .unwrap()
            .iter()
            .map(|l| l.final_size() as f64)
            .collect()
    };
    let a = sizes(&constant, 91);
    let b = sizes(&exponential, 92);
    let (d, p) = ks_two_sample(&a, &b);
    let elapsed = t.elapsed();
    verdict(
        p > 1e-3 && elapsed < Duration::from_secs(300),
        format!(
            "KS D = {d:.4}, p = {p:.3}; mean sizes {:.2} vs {:.2}; {elapsed:.1?}",
            mean(&a),
            mean(&b)
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("threshold values", criterion_1),
        ("Dataset 1.1 final-size MLE", criterion_2),
        ("Dataset 1.1 final-size posterior", criterion_3),
        ("Dataset 1.2 ridge-aware MLE and posterior", criterion_4),
        ("complete-data properties", criterion_5),
        ("household final-size recursion", criterion_6),
        ("Example 2 household probabilities", criterion_7),
        ("MCMC prior recovery", criterion_8),
        ("latent-period invariance", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {}",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
