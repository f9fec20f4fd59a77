//! The subcommands. Data and output paths go to `out`; progress and
//! diagnostics go to stderr.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use parpolar::allocation::{
    db_to_linear, design_split, linear_to_db, mercury_waterfill, na_rate, optimize_power_fer,
    optimize_power_unfrozen_mi, shannon_limit_power, sweep_table, Allocation, AllocationMethod,
    PolarProblem, SplitDesign,
};
use parpolar::channel::{
    biawgn_mi_exact, info_density_moments, j_func, j_inv, ChannelPair, MiValue,
};
use parpolar::codec::{encode, sc_decode, simulate, CrcSpec, FerSweepRow, SimConfig, SimReport};
use parpolar::construction::{de_from_sigmas, CodeSpec, DeResult, Link};
use parpolar::output::{json_with_schema, write_csv};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn problem_at(cfg: &ExperimentConfig, db: f64) -> Result<PolarProblem> {
    Ok(PolarProblem::new(
        cfg.scenario.h1,
        cfg.scenario.h2,
        db_to_linear(db),
        cfg.code.n,
        cfg.code.k,
        cfg.code.mapping,
    )?)
}

/// Split chosen by the configured allocation method.
fn choose_split(cfg: &ExperimentConfig, problem: &PolarProblem) -> Result<Allocation> {
    let grid = cfg.allocation.grid_points;
    Ok(match cfg.allocation.method {
        AllocationMethod::MercuryWaterfilling => {
            mercury_waterfill(problem.h1, problem.h2, problem.p_avg)?.allocation
        }
        AllocationMethod::FerOptimal => optimize_power_fer(problem, grid)?.allocation,
        AllocationMethod::UnfrozenMiOptimal => {
            optimize_power_unfrozen_mi(problem, grid)?.allocation
        }
        AllocationMethod::Manual => {
            Allocation::manual(problem.p_avg, cfg.allocation.rho.unwrap_or(0.5))?
        }
    })
}

fn code_for(problem: &PolarProblem, design: &SplitDesign) -> Result<CodeSpec> {
    Ok(CodeSpec::new(
        problem.n,
        problem.k,
        &design.frozen,
        problem.mapping,
    )?)
}

fn de_for(problem: &PolarProblem, design: &SplitDesign) -> Result<DeResult> {
    let cp = ChannelPair::new(problem.h1, problem.h2, design.p1, design.p2, problem.p_avg)?;
    let (s1, s2) = cp.llr_sigmas();
    Ok(de_from_sigmas(problem.mapping, problem.n, s1, s2)?)
}

fn config_comment(cfg: &ExperimentConfig) -> Vec<String> {
    vec![format!(
        "config={}",
        serde_json::to_string(cfg).expect("config serialises")
    )]
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok((path, BufWriter::new(file)))
}

fn csv_file<T: Serialize>(cfg: &ExperimentConfig, name: &str, rows: &[T]) -> Result<PathBuf> {
    let (path, mut w) = create(&cfg.output, name)?;
    write_csv(&mut w, rows, &config_comment(cfg))?;
    w.flush()?;
    Ok(path)
}

fn json_file<T: Serialize>(cfg: &ExperimentConfig, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut w) = create(&cfg.output, name)?;
    writeln!(w, "{}", json_with_schema(value)?)?;
    w.flush()?;
    Ok(path)
}

fn print_paths(out: &mut dyn Write, paths: &[PathBuf]) -> Result<()> {
    for p in paths {
        writeln!(out, "{}", p.display())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BitRow {
    index: usize,
    link: &'static str,
    sigma: f64,
    mi: f64,
    pe: f64,
    frozen: bool,
}

#[derive(Serialize)]
struct DesignFile<'a> {
    config: &'a ExperimentConfig,
    p_avg_db: f64,
    allocation: Allocation,
    rho: f64,
    estimated_fer: f64,
    unfrozen_mi: f64,
    frozen_mi: f64,
    code_spec: String,
}

/// Frozen set for the configured power and split; writes the code, a
/// per-bit table and a summary.
pub fn design(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let db = cfg.single_power_db()?;
    let problem = problem_at(cfg, db)?;
    let allocation = choose_split(cfg, &problem)?;
    let rho = allocation.rho();
    let design = design_split(&problem, rho)?;
    let spec = code_for(&problem, &design)?;
    let de = de_for(&problem, &design)?;

    let reference = if cfg.allocation.method == AllocationMethod::MercuryWaterfilling {
        (
            "fer_optimal",
            optimize_power_fer(&problem, cfg.allocation.grid_points)?.rho,
        )
    } else {
        (
            "mercury_waterfilling",
            mercury_waterfill(problem.h1, problem.h2, problem.p_avg)?
                .allocation
                .rho(),
        )
    };
    let other = design_split(&problem, reference.1)?;
    let differing = symmetric_difference(&design.frozen, &other.frozen);
    eprintln!(
        "frozen set at rho = {rho:.6} differs from the {} design (rho = {:.6}) in {differing} positions",
        reference.0, reference.1
    );

    let rows: Vec<BitRow> = (0..spec.len())
        .map(|i| BitRow {
            index: i,
            link: match problem.mapping.link_of(problem.n, i) {
                Link::First => "first",
                Link::Second => "second",
            },
            sigma: de.bit_sigma[i],
            mi: de.bit_mi[i],
            pe: de.bit_pe[i],
            frozen: spec.is_frozen(i),
        })
        .collect();
    let (spec_path, mut w) = create(&cfg.output, "code_spec.json")?;
    writeln!(w, "{}", spec.to_json())?;
    w.flush()?;
    let bits_path = csv_file(cfg, "bits.csv", &rows)?;
    let summary = DesignFile {
        config: cfg,
        p_avg_db: db,
        allocation,
        rho,
        estimated_fer: design.fer,
        unfrozen_mi: design.unfrozen_mi,
        frozen_mi: design.frozen_mi,
        code_spec: "code_spec.json".into(),
    };
    let summary_path = json_file(cfg, "design.json", &summary)?;
    print_paths(out, &[spec_path, bits_path, summary_path])
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> usize {
    let only_a = a.iter().filter(|x| b.binary_search(x).is_err()).count();
    let only_b = b.iter().filter(|x| a.binary_search(x).is_err()).count();
    only_a + only_b
}

#[derive(Serialize)]
struct AllocateFile<'a> {
    config: &'a ExperimentConfig,
    p_avg_db: f64,
    mercury_waterfilling: parpolar::allocation::MercuryWaterfill,
    fer_optimal: Allocation,
    unfrozen_mi_optimal: Allocation,
    fer_at_mercury_waterfilling: f64,
    fer_ratio: f64,
}

#[derive(Serialize)]
struct PowerRow {
    p_avg_db: f64,
    mercury_rho: f64,
    p1: f64,
    p2: f64,
    mi1: f64,
    mi2: f64,
    mi_avg: f64,
    method_rho: f64,
    fer_estimate: f64,
}

/// At a single power: the `ρ` sweep table with all three optimal splits.
/// Over a power sweep: the mercury/waterfilling allocation and the split of
/// the configured method at every power.
pub fn allocate(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    if let Some(db) = cfg.power.p_avg_db {
        let problem = problem_at(cfg, db)?;
        let table = sweep_table(
            &problem,
            cfg.allocation.grid_points,
            cfg.allocation.na_target_fer,
        )?;
        let fer_mwf = table
            .marked("mercury_waterfilling")
            .map_or(f64::NAN, |r| r.fer_estimate);
        let fer_opt = table.fer_optimal.objective_value;
        let ratio = fer_mwf / fer_opt;
        let mw = table.mercury.allocation;
        writeln!(
            out,
            "mercury_waterfilling rho={:.6} p1={:.6} p2={:.6} fer={fer_mwf:.6e}",
            mw.rho(),
            mw.p1,
            mw.p2
        )?;
        let fo = table.fer_optimal;
        writeln!(
            out,
            "fer_optimal rho={:.6} p1={:.6} p2={:.6} fer={fer_opt:.6e}",
            fo.rho(),
            fo.p1,
            fo.p2
        )?;
        let mo = table.unfrozen_mi_optimal;
        writeln!(
            out,
            "unfrozen_mi_optimal rho={:.6} p1={:.6} p2={:.6}",
            mo.rho(),
            mo.p1,
            mo.p2
        )?;
        writeln!(out, "fer_ratio={ratio:.6e}")?;
        let csv = csv_file(cfg, "sweep.csv", &table.rows)?;
        let summary = AllocateFile {
            config: cfg,
            p_avg_db: db,
            mercury_waterfilling: table.mercury,
            fer_optimal: fo,
            unfrozen_mi_optimal: mo,
            fer_at_mercury_waterfilling: fer_mwf,
            fer_ratio: ratio,
        };
        let json = json_file(cfg, "allocation.json", &summary)?;
        return print_paths(out, &[csv, json]);
    }

    let mut rows = Vec::new();
    for db in cfg.power_points() {
        let problem = problem_at(cfg, db)?;
        let mw = mercury_waterfill(problem.h1, problem.h2, problem.p_avg)?.allocation;
        let chosen = choose_split(cfg, &problem)?;
        let fer = design_split(&problem, chosen.rho())?.fer;
        let (g1, g2) = (problem.h1 * problem.h1, problem.h2 * problem.h2);
        let (mi1, mi2) = (biawgn_mi_exact(g1 * mw.p1), biawgn_mi_exact(g2 * mw.p2));
        eprintln!(
            "{db:.3} dB: mercury/waterfilling rho {:.4}, selected rho {:.4}",
            mw.rho(),
            chosen.rho()
        );
        rows.push(PowerRow {
            p_avg_db: db,
            mercury_rho: mw.rho(),
            p1: mw.p1,
            p2: mw.p2,
            mi1,
            mi2,
            mi_avg: 0.5 * (mi1 + mi2),
            method_rho: chosen.rho(),
            fer_estimate: fer,
        });
    }
    let csv = csv_file(cfg, "allocation_sweep.csv", &rows)?;
    print_paths(out, &[csv])
}

#[derive(Serialize)]
struct SimPoint {
    p_avg_db: f64,
    rho: f64,
    estimated_fer: f64,
    report: SimReport,
}

#[derive(Serialize)]
struct SimulateFile<'a> {
    config: &'a ExperimentConfig,
    points: Vec<SimPoint>,
}

#[derive(Serialize)]
struct PerBitRow {
    p_avg_db: f64,
    index: usize,
    frames: u64,
    errors: u64,
    simulated_pe: f64,
    predicted_pe: f64,
}

/// Monte-Carlo FER at each power, re-designing split and frozen set per point.
pub fn simulate_cmd(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let decoder = cfg.decoder_config()?;
    let mut points = Vec::new();
    let mut rows = Vec::new();
    let mut per_bit = Vec::new();
    for db in cfg.power_points() {
        let problem = problem_at(cfg, db)?;
        let allocation = choose_split(cfg, &problem)?;
        let design = design_split(&problem, allocation.rho())?;
        let spec = code_for(&problem, &design)?;
        let sim = SimConfig {
            h1: problem.h1,
            h2: problem.h2,
            p_avg: problem.p_avg,
            p1: design.p1,
            p2: design.p2,
            decoder,
            stop: cfg.stop_rule(),
            seed: cfg.sim.seed,
            genie: cfg.sim.genie,
        };
        let report = simulate(&spec, &sim)?;
        eprintln!(
            "{db:.3} dB: rho {:.4}, FER {:.3e} ({} / {} frames), estimate {:.3e}",
            design.rho, report.fer, report.frame_errors, report.frames, design.fer
        );
        if let Some(counts) = &report.per_bit_errors {
            let de = de_for(&problem, &design)?;
            for i in spec.info_positions() {
                per_bit.push(PerBitRow {
                    p_avg_db: db,
                    index: i,
                    frames: report.frames,
                    errors: counts[i],
                    simulated_pe: counts[i] as f64 / report.frames as f64,
                    predicted_pe: de.bit_pe[i],
                });
            }
        }
        rows.push(FerSweepRow::from_report(db, &report));
        points.push(SimPoint {
            p_avg_db: db,
            rho: design.rho,
            estimated_fer: design.fer,
            report,
        });
    }
    let mut paths = vec![csv_file(cfg, "fer_sweep.csv", &rows)?];
    if cfg.sim.genie {
        paths.push(csv_file(cfg, "per_bit.csv", &per_bit)?);
    }
    paths.push(json_file(
        cfg,
        "reports.json",
        &SimulateFile {
            config: cfg,
            points,
        },
    )?);
    print_paths(out, &paths)
}

#[derive(Serialize)]
struct NaRow {
    p_avg_db: f64,
    rho: f64,
    capacity: f64,
    dispersion: f64,
    na_rate: f64,
}

/// Normal-approximation rate at the configured split for each power, plus
/// the Shannon limit of the code rate.
pub fn na(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let n_uses = 1u64 << cfg.code.n;
    let mut rows = Vec::new();
    for db in cfg.power_points() {
        let problem = problem_at(cfg, db)?;
        let allocation = choose_split(cfg, &problem)?;
        let cp = allocation.channel_pair(problem.h1, problem.h2)?;
        let (capacity, dispersion) = info_density_moments(&cp);
        let rate = na_rate(&cp, n_uses, cfg.allocation.na_target_fer)?;
        rows.push(NaRow {
            p_avg_db: db,
            rho: allocation.rho(),
            capacity,
            dispersion,
            na_rate: rate,
        });
    }
    let code_rate = cfg.code.k as f64 / n_uses as f64;
    if code_rate > 0.0 && code_rate < 1.0 {
        let limit = shannon_limit_power(cfg.scenario.h1, cfg.scenario.h2, code_rate)?;
        writeln!(out, "shannon_limit_db={limit:.6} rate={code_rate}")?;
    }
    let csv = csv_file(cfg, "na.csv", &rows)?;
    print_paths(out, &[csv])
}

/// Quick internal consistency checks; fails with a numerical error.
pub fn selftest(out: &mut dyn Write) -> Result<()> {
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool, out: &mut dyn Write| -> Result<()> {
        writeln!(out, "{} {name}", if ok { "PASS" } else { "FAIL" })?;
        if !ok {
            failures.push(name.to_owned());
        }
        Ok(())
    };

    let roundtrip = (1..1000).all(|i| {
        let v = f64::from(i) / 1000.0;
        MiValue::new(v)
            .and_then(j_inv)
            .and_then(j_func)
            .is_ok_and(|back| (back.get() - v).abs() < 1e-6)
    });
    check("j_roundtrip", roundtrip, out)?;

    let limit = shannon_limit_power(0.9, 0.1, 0.5)?;
    check("shannon_limit", (limit - 7.37).abs() < 0.05, out)?;

    let mw = mercury_waterfill(0.9, 0.1, db_to_linear(10.37))?;
    check(
        "kkt_residuals",
        mw.kkt_residuals.iter().all(|&r| r < 1e-8),
        out,
    )?;

    let u: Vec<u8> = (0..64).map(|i| u8::from(i % 3 == 1)).collect();
    let c = encode(&u, 6)?;
    check("encoder_involution", encode(&c, 6)? == u, out)?;

    let spec = CodeSpec::new(6, 64, &[], parpolar::construction::MappingKind::Sorted)?;
    let llr: Vec<f64> = c.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
    check(
        "sc_noiseless",
        sc_decode(&llr, &spec, None)?.u_hat == u,
        out,
    )?;

    let bits: Vec<u8> = b"123456789"
        .iter()
        .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1))
        .collect();
    let xmodem = CrcSpec {
        width: 16,
        polynomial: 0x1021,
        ..CrcSpec::default()
    };
    check("crc_check_value", xmodem.checksum(&bits) == 0x31C3, out)?;

    writeln!(
        out,
        "p_avg_db_check={:.3}",
        linear_to_db(db_to_linear(10.37))
    )?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "self-test failed: {}",
            failures.join(", ")
        )))
    }
}
