//! Library values checked against independent numerical oracles.

use parpolar::allocation::{
    db_to_linear, design_split, mercury_waterfill, optimize_power_fer, required_power_db,
    shannon_limit_power, sum_mi, PolarProblem, SplitRule,
};
use parpolar::channel::{
    biawgn_mi, biawgn_mi_exact, bpsk_mmse, info_density_moments, j_func, j_inv, MiValue,
};
use parpolar::codec::{
    channel_llr, encode, scl_decode, simulate, CrcSpec, DecoderConfig, SimConfig, StopRule,
};
use parpolar::construction::{
    de_ga, mi_minus, mi_plus, select_frozen, CodeSpec, Link, MappingKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gauss–Hermite nodes and weights for the weight `e^{−x²}`, by Newton
/// iteration on the normalised Hermite recurrence.
fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let nf = n as f64;
    let mut out = vec![(0.0, 0.0); n];
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * out[0].0,
            3 => 1.91 * z - 0.91 * out[1].0,
            _ => 2.0 * z - out[i - 2].0,
        };
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            dp = (2.0 * nf).sqrt() * p2;
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        out[i] = (z, 2.0 / (dp * dp));
        out[n - 1 - i] = (-z, 2.0 / (dp * dp));
    }
    out
}

fn log2_1p_exp_neg(l: f64) -> f64 {
    let nats = if l > 0.0 {
        (-l).exp().ln_1p()
    } else {
        -l + l.exp().ln_1p()
    };
    nats / std::f64::consts::LN_2
}

/// `1 − E[log2(1 + e^{−L})]` with `L ~ N(σ²/2, σ²)`.
fn j_oracle(rule: &[(f64, f64)], sigma: f64) -> f64 {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let loss: f64 = rule
        .iter()
        .map(|&(x, w)| {
            w / sqrt_pi
                * log2_1p_exp_neg(sigma * sigma / 2.0 + sigma * std::f64::consts::SQRT_2 * x)
        })
        .sum();
    1.0 - loss
}

fn rule() -> Vec<(f64, f64)> {
    gauss_hermite(96)
}

#[test]
fn hermite_rule_integrates_moments() {
    let r = rule();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let m0: f64 = r.iter().map(|p| p.1).sum();
    let m2: f64 = r.iter().map(|p| p.1 * p.0 * p.0).sum();
    let m4: f64 = r.iter().map(|p| p.1 * p.0.powi(4)).sum();
    assert!((m0 - sqrt_pi).abs() < 1e-12);
    assert!((m2 - sqrt_pi / 2.0).abs() < 1e-12);
    assert!((m4 - 0.75 * sqrt_pi).abs() < 1e-11);
}

#[test]
fn j_func_matches_quadrature() {
    let r = rule();
    assert!((j_func(2.0).unwrap().get() - j_oracle(&r, 2.0)).abs() < 2e-3);
    assert!((biawgn_mi(1.0, 1.0).unwrap().get() - j_oracle(&r, 2.0)).abs() < 2e-3);
    for i in 0..=500 {
        let amplitude = 5.0 * f64::from(i) / 500.0;
        let fit = biawgn_mi(1.0, amplitude * amplitude).unwrap().get();
        let exact = j_oracle(&r, 2.0 * amplitude);
        assert!(
            (fit - exact).abs() < 2e-3,
            "h√p = {amplitude}: {fit} vs {exact}"
        );
        assert!((biawgn_mi_exact(amplitude * amplitude) - exact).abs() < 1e-9);
    }
}

#[test]
fn j_inv_matches_bisection_on_quadrature() {
    let r = rule();
    let (mut lo, mut hi) = (0.0, 20.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if j_oracle(&r, mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let got = j_inv(MiValue::new(0.5).unwrap()).unwrap();
    assert!((got - 0.5 * (lo + hi)).abs() < 1e-3, "{got} vs {lo}");
}

fn mean_and_se(samples: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut s, mut s2) = (0.0, 0.0, 0.0);
    for x in samples {
        n += 1.0;
        s += x;
        s2 += x * x;
    }
    let mean = s / n;
    (mean, ((s2 / n - mean * mean) / n).sqrt())
}

#[test]
fn mmse_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mean, se) = mean_and_se((0..10_000_000).map(|_| {
        let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let y: f64 = s + rng.sample::<f64, _>(StandardNormal);
        (s - y.tanh()).powi(2)
    }));
    let got = bpsk_mmse(1.0).unwrap();
    assert!((got - mean).abs() < 3.0 * se, "{got} vs {mean} ± {se}");
}

#[test]
fn mi_derivative_is_half_the_mmse() {
    for i in 0..=40 {
        let snr = 0.1 + 9.9 * f64::from(i) / 40.0;
        let h = 1e-4 * snr;
        let nats = |s: f64| biawgn_mi_exact(s) * std::f64::consts::LN_2;
        let slope = (nats(snr + h) - nats(snr - h)) / (2.0 * h);
        let mmse = bpsk_mmse(snr).unwrap();
        assert!(
            (2.0 * slope - mmse).abs() < 1e-3,
            "snr {snr}: {} vs {mmse}",
            2.0 * slope
        );
    }
}

#[test]
fn density_moments_match_monte_carlo() {
    let p_avg = db_to_linear(10.37);
    let mw = mercury_waterfill(0.9, 0.1, p_avg).unwrap().allocation;
    let cp = mw.channel_pair(0.9, 0.1).unwrap();
    let (capacity, dispersion) = info_density_moments(&cp);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let density = |h: f64, p: f64, z: f64| {
        let a = 2.0 * h * p.sqrt();
        1.0 - log2_1p_exp_neg(a * (h * p.sqrt() + z))
    };
    let m = 10_000_000;
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..m {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let d = density(cp.h1, cp.p1, z1) + density(cp.h2, cp.p2, z2);
        s1 += d;
        s2 += d * d;
        s3 += d * d * d;
        s4 += d * d * d * d;
    }
    let mf = m as f64;
    let mean = s1 / mf;
    let var = s2 / mf - mean * mean;
    let central4 =
        s4 / mf - 4.0 * mean * s3 / mf + 6.0 * mean * mean * s2 / mf - 3.0 * mean.powi(4);
    let se_mean = (var / mf).sqrt() / 2.0;
    let se_var = ((central4 - var * var) / mf).sqrt() / 2.0;
    assert!(
        (capacity - mean / 2.0).abs() < 3.0 * se_mean,
        "{capacity} vs {}",
        mean / 2.0
    );
    assert!(
        (dispersion - var / 2.0).abs() < 3.0 * se_var,
        "{dispersion} vs {} ± {se_var}",
        var / 2.0
    );

    let fit =
        0.5 * (biawgn_mi(cp.h1, cp.p1).unwrap().get() + biawgn_mi(cp.h2, cp.p2).unwrap().get());
    assert!((capacity - fit).abs() < 1e-3);
}

/// Estimates the MI of the combined LLRs with actual check/variable node
/// operations on sampled consistent Gaussians.
#[test]
fn kernel_transfer_matches_monte_carlo_density_evolution() {
    let (i1, i2) = (MiValue::new(0.8).unwrap(), MiValue::new(0.2).unwrap());
    let (s1, s2) = (j_inv(i1).unwrap(), j_inv(i2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut minus, mut plus) = (0.0, 0.0);
    let m = 1_000_000;
    for _ in 0..m {
        let l1 = s1 * s1 / 2.0 + s1 * rng.sample::<f64, _>(StandardNormal);
        let l2 = s2 * s2 / 2.0 + s2 * rng.sample::<f64, _>(StandardNormal);
        let check = 2.0 * ((l1 / 2.0).tanh() * (l2 / 2.0).tanh()).atanh();
        minus += log2_1p_exp_neg(check);
        plus += log2_1p_exp_neg(l1 + l2);
    }
    let (mc_minus, mc_plus) = (1.0 - minus / m as f64, 1.0 - plus / m as f64);
    assert!(
        (mi_minus(i1, i2).get() - mc_minus).abs() < 0.01,
        "{} vs {mc_minus}",
        mi_minus(i1, i2).get()
    );
    assert!(
        (mi_plus(i1, i2).get() - mc_plus).abs() < 0.01,
        "{} vs {mc_plus}",
        mi_plus(i1, i2).get()
    );
}

#[test]
fn frozen_set_is_the_sorted_de_order() {
    let de = de_ga(
        MappingKind::Sorted,
        3,
        MiValue::new(0.8).unwrap(),
        MiValue::new(0.2).unwrap(),
    )
    .unwrap();
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| de.bit_mi[a].total_cmp(&de.bit_mi[b]).then(a.cmp(&b)));
    let mut expected = order[..4].to_vec();
    expected.sort_unstable();
    assert_eq!(select_frozen(&de, 4).unwrap(), expected);
}

#[test]
fn mercury_waterfilling_beats_a_fine_grid() {
    for (h1, h2, db) in [
        (0.9, 0.1, 10.37),
        (0.66, 0.33, 5.0),
        (0.66, 0.33, 12.0),
        (1.0, 0.99, 0.0),
        (0.7, 0.2, -8.0),
    ] {
        let p = db_to_linear(db);
        let mw = mercury_waterfill(h1, h2, p).unwrap();
        let best_grid = (0..=10_000)
            .map(|i| sum_mi(h1, h2, p, f64::from(i) / 10_000.0))
            .fold(f64::MIN, f64::max);
        assert!(
            mw.allocation.objective_value >= best_grid - 1e-9,
            "({h1}, {h2}, {db})"
        );
        assert!(mw.allocation.objective_value - best_grid < 1e-6);
        assert!(
            mw.kkt_residuals.iter().all(|&r| r < 1e-8),
            "{:?}",
            mw.kkt_residuals
        );
    }
}

#[test]
fn second_channel_activates_where_the_grid_says() {
    let (h1, h2) = (0.66, 0.33);
    let active = |p: f64| mercury_waterfill(h1, h2, p).unwrap().allocation.p2 > 0.0;
    let (mut lo, mut hi) = (db_to_linear(-10.0), db_to_linear(20.0));
    assert!(!active(lo) && active(hi));
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        if active(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let solver_db = 10.0 * hi.log10();

    // Oracle: first grid power at which moving a sliver of power off the
    // good channel raises the MI sum.
    let grid_db: Vec<f64> = (0..2000)
        .map(|i| -10.0 + 30.0 * f64::from(i) / 1999.0)
        .collect();
    let first = grid_db
        .iter()
        .position(|&db| {
            let p = db_to_linear(db);
            sum_mi(h1, h2, p, 1.0 - 1e-6) > sum_mi(h1, h2, p, 1.0)
        })
        .unwrap();
    let step = grid_db[1] - grid_db[0];
    assert!(
        solver_db > grid_db[first - 1] - 1e-3 && solver_db <= grid_db[first] + 1e-3,
        "solver {solver_db} vs grid cell ({}, {}] step {step}",
        grid_db[first - 1],
        grid_db[first]
    );
}

#[test]
fn shannon_limit_matches_two_dimensional_grid() {
    let (h1, h2) = (0.66, 0.33);
    let rhos: Vec<f64> = (0..=1000).map(|i| f64::from(i) / 1000.0).collect();
    let best_rate = |db: f64| {
        let p = db_to_linear(db);
        rhos.iter()
            .map(|&r| 0.5 * sum_mi(h1, h2, p, r))
            .fold(f64::MIN, f64::max)
    };
    let coarse = (0..=200)
        .map(|i| -5.0 + 0.1 * f64::from(i))
        .find(|&db| best_rate(db) >= 0.5)
        .unwrap();
    let fine = (0..=100)
        .map(|i| coarse - 0.1 + 0.001 * f64::from(i))
        .find(|&db| best_rate(db) >= 0.5)
        .unwrap();
    let got = shannon_limit_power(h1, h2, 0.5).unwrap();
    assert!((got - fine).abs() < 0.05, "{got} vs grid {fine}");
}

#[test]
fn llr_moments_match_monte_carlo() {
    let (h, p): (f64, f64) = (0.7, 2.5);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples: Vec<f64> = (0..1_000_000)
        .map(|_| channel_llr(h * p.sqrt() + rng.sample::<f64, _>(StandardNormal), h, p))
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
    let (mu, v) = (2.0 * h * h * p, 4.0 * h * h * p);
    assert!((mean - mu).abs() < 3.0 * (v / n).sqrt(), "{mean} vs {mu}");
    assert!((var - v).abs() < 3.0 * v * (2.0 / n).sqrt(), "{var} vs {v}");
}

/// Bitwise long division of the augmented message, with a non-zero initial
/// register folded into its first `width` bits.
fn crc_long_division(bits: &[u8], width: usize, poly: u64, init: u64) -> Vec<u8> {
    let mut m: Vec<u8> = bits.to_vec();
    m.extend(std::iter::repeat_n(0, width));
    for (i, b) in m.iter_mut().take(width).enumerate() {
        *b ^= ((init >> (width - 1 - i)) & 1) as u8;
    }
    let g: Vec<u8> = std::iter::once(1)
        .chain((0..width).rev().map(|i| ((poly >> i) & 1) as u8))
        .collect();
    for i in 0..bits.len() {
        if m[i] == 1 {
            for (j, &gj) in g.iter().enumerate() {
                m[i + j] ^= gj;
            }
        }
    }
    m[bits.len()..].to_vec()
}

#[test]
fn crc_of_zeros_with_nonzero_init() {
    let spec = CrcSpec {
        init: 0xF_FFFF,
        ..CrcSpec::default()
    };
    let zeros = vec![0u8; 44];
    let check = spec.check_bits(&zeros);
    assert_eq!(
        check,
        crc_long_division(&zeros, 20, spec.polynomial, spec.init)
    );
    let pinned: u64 = check.iter().fold(0, |acc, &b| acc << 1 | u64::from(b));
    assert_eq!(pinned, 0x0_1F80);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let len = rng.random_range(20..300);
        let msg: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
        let init = rng.random_range(0..1u64 << 20);
        let s = CrcSpec {
            init,
            ..CrcSpec::default()
        };
        assert_eq!(
            s.check_bits(&msg),
            crc_long_division(&msg, 20, s.polynomial, init)
        );
    }
}

#[test]
fn simulated_sc_fer_tracks_the_estimate_at_n1024() {
    let base = PolarProblem::new(0.9, 0.1, 1.0, 10, 512, MappingKind::Sorted).unwrap();
    let db = required_power_db(&base, SplitRule::FerOptimal, 1e-2, 101, (0.0, 20.0), 1e-3).unwrap();
    let problem = base.with_power(db_to_linear(db)).unwrap();
    let opt = optimize_power_fer(&problem, 101).unwrap();
    let design = design_split(&problem, opt.rho).unwrap();
    let spec = CodeSpec::new(10, 512, &design.frozen, MappingKind::Sorted).unwrap();
    for genie in [false, true] {
        let cfg = SimConfig {
            h1: 0.9,
            h2: 0.1,
            p_avg: problem.p_avg,
            p1: design.p1,
            p2: design.p2,
            decoder: DecoderConfig::sc(),
            stop: StopRule {
                max_frames: 200_000,
                target_frame_errors: 200,
            },
            seed: 6,
            genie,
        };
        let report = simulate(&spec, &cfg).unwrap();
        let ratio = report.fer / design.fer;
        assert!(
            (1.0 / 3.0..=3.0).contains(&ratio),
            "genie {genie}: {} vs {}",
            report.fer,
            design.fer
        );
    }
}

#[test]
fn list_decoding_dominates_sc_at_n128() {
    let base = PolarProblem::new(0.9, 0.1, 1.0, 7, 64, MappingKind::Sorted).unwrap();
    for db in [6.0, 7.5, 9.0] {
        let problem = base.with_power(db_to_linear(db)).unwrap();
        let design =
            design_split(&problem, optimize_power_fer(&problem, 101).unwrap().rho).unwrap();
        let spec = CodeSpec::new(7, 64, &design.frozen, MappingKind::Sorted).unwrap();
        let errors = |decoder| {
            let cfg = SimConfig {
                h1: 0.9,
                h2: 0.1,
                p_avg: problem.p_avg,
                p1: design.p1,
                p2: design.p2,
                decoder,
                stop: StopRule {
                    max_frames: 100_000,
                    target_frame_errors: u64::MAX,
                },
                seed: 7,
                genie: false,
            };
            simulate(&spec, &cfg).unwrap().frame_errors
        };
        let (sc, scl) = (
            errors(DecoderConfig::sc()),
            errors(DecoderConfig::scl(8, None)),
        );
        assert!(scl <= sc, "{db} dB: SCL {scl} vs SC {sc}");
    }
}

/// Common random numbers across list sizes. A larger list may only lose a
/// frame that a smaller one decodes when its output is strictly more likely
/// than the transmitted codeword.
#[test]
fn fer_is_non_increasing_in_list_size() {
    let problem =
        PolarProblem::new(0.9, 0.1, db_to_linear(9.5), 6, 32, MappingKind::Alternating).unwrap();
    let design = design_split(&problem, 0.7).unwrap();
    let spec = CodeSpec::new(6, 32, &design.frozen, MappingKind::Alternating).unwrap();
    let amplitude = [0.9 * design.p1.sqrt(), 0.1 * design.p2.sqrt()];
    let lists = [1, 2, 4, 8, 16];
    let mut errors = [0u64; 5];
    let mut mismatch = [0u64; 4];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20_000 {
        let u: Vec<u8> = (0..64)
            .map(|i| {
                if spec.is_frozen(i) {
                    0
                } else {
                    rng.random_range(0..2)
                }
            })
            .collect();
        let c = encode(&u, 6).unwrap();
        let llr: Vec<f64> = (0..64)
            .map(|j| {
                let a =
                    amplitude[usize::from(MappingKind::Alternating.link_of(6, j) == Link::Second)];
                let y = a * (1.0 - 2.0 * f64::from(c[j])) + rng.sample::<f64, _>(StandardNormal);
                2.0 * a * y
            })
            .collect();
        let cost = |v: &[u8]| -> f64 {
            let x = encode(v, 6).unwrap();
            x.iter()
                .zip(&llr)
                .map(|(&b, &l)| (-(1.0 - 2.0 * f64::from(b)) * l).exp().ln_1p())
                .sum()
        };
        let outs: Vec<Vec<u8>> = lists
            .iter()
            .map(|&l| scl_decode(&llr, &spec, l, None).unwrap().u_hat)
            .collect();
        let ok: Vec<bool> = outs.iter().map(|o| *o == u).collect();
        for (i, &good) in ok.iter().enumerate() {
            errors[i] += u64::from(!good);
        }
        for i in 0..4 {
            if ok[i] && !ok[i + 1] {
                assert!(
                    cost(&outs[i + 1]) < cost(&u),
                    "list {} lost a frame to a less likely path",
                    lists[i + 1]
                );
                mismatch[i] += 1;
            }
        }
    }
    for i in 0..4 {
        assert!(errors[i + 1] <= errors[i] + mismatch[i], "{errors:?}");
    }
    assert!(errors[4] < errors[0], "{errors:?}");
}

#[test]
fn high_power_is_error_free() {
    let p = db_to_linear(30.0);
    let de = de_ga(
        MappingKind::Sorted,
        7,
        biawgn_mi(0.9, p).unwrap(),
        biawgn_mi(0.1, p).unwrap(),
    )
    .unwrap();
    let spec = CodeSpec::from_design(&de, 64, MappingKind::Sorted).unwrap();
    let cfg = SimConfig {
        h1: 0.9,
        h2: 0.1,
        p_avg: p,
        p1: p,
        p2: p,
        decoder: DecoderConfig::sc(),
        stop: StopRule {
            max_frames: 10_000,
            target_frame_errors: 1,
        },
        seed: 9,
        genie: false,
    };
    let report = simulate(&spec, &cfg).unwrap();
    assert_eq!((report.frames, report.frame_errors), (10_000, 0));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let problem =
        PolarProblem::new(0.9, 0.1, db_to_linear(8.0), 8, 128, MappingKind::Sorted).unwrap();
    let design = design_split(&problem, 0.75).unwrap();
    let spec = CodeSpec::new(8, 128, &design.frozen, MappingKind::Sorted).unwrap();
    let cfg = SimConfig {
        h1: 0.9,
        h2: 0.1,
        p_avg: problem.p_avg,
        p1: design.p1,
        p2: design.p2,
        decoder: DecoderConfig::scl(
            4,
            Some(CrcSpec {
                width: 8,
                polynomial: 0x07,
                ..CrcSpec::default()
            }),
        ),
        stop: StopRule {
            max_frames: 3_000,
            target_frame_errors: 25,
        },
        seed: 10,
        genie: false,
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate(&spec, &cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(4));
}
