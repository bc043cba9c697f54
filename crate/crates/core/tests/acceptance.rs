//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero when any fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use clinshift::data::{load_dataset, Dataset};
use clinshift::eval::{average_precision, evaluate_baseline, BaselineConfig};
use clinshift::infotheory::{raw, DiscreteColumn, DiscreteMatrix};
use clinshift::rng::{derive_indexed, rng_from_seed};
use clinshift::scenarios::*;
use clinshift::sieve::{compute_remainder, fit_landscape, fit_layer, layer_from_factor, permutations, SieveConfig};
use clinshift::synth::{generate, ChannelLayout, SignalInteraction, SynthConfig};
use clinshift::transforms::{apply_transforms, flip_labels, missing_measurement_channels, Side, TransformSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn rng_for(label: &str, i: u64) -> clinshift::rng::SeededRng {
    rng_from_seed(derive_indexed(0xacce, label, i))
}

fn random_matrix(rng: &mut impl Rng, n: usize, cards: &[u32]) -> DiscreteMatrix {
    let columns = cards
        .iter()
        .map(|&k| DiscreteColumn::new((0..n).map(|_| rng.random_range(0..k)).collect(), k).unwrap())
        .collect();
    DiscreteMatrix::from_columns(columns).unwrap()
}

fn with_z(m: &DiscreteMatrix, z: &DiscreteColumn) -> DiscreteMatrix {
    m.with_column("z", z.clone()).unwrap()
}

// 1. tc_reduction against Σ I(X_i;Z) − I(X;Z), all built from raw entropies.
fn tc_identity() -> Outcome {
    let t = Instant::now();
    let mut worst_gap: f64 = 0.0;
    let mut min_pre_clamp = f64::INFINITY;
    for i in 0..200 {
        let mut rng = rng_for("tc-identity", i);
        let n = rng.random_range(1..=64);
        let d = rng.random_range(1..=6);
        let cards: Vec<u32> = (0..d).map(|_| rng.random_range(1..=4)).collect();
        let m = random_matrix(&mut rng, n, &cards);
        let kz = rng.random_range(1..=4);
        let z = DiscreteColumn::new((0..n).map(|_| rng.random_range(0..kz)).collect(), kz).unwrap();

        let h_x = raw::joint_entropy(&m).unwrap();
        let h_z = raw::entropy(&z).unwrap();
        let h_xz = raw::joint_entropy(&with_z(&m, &z)).unwrap();
        let i_xz = h_x + h_z - h_xz;
        let mut sum_i = 0.0;
        let mut quantities = vec![h_x, h_z, h_xz, i_xz];
        for col in m.columns() {
            let mi = raw::mutual_information(col, &z).unwrap();
            quantities.push(raw::entropy(col).unwrap());
            quantities.push(mi);
            sum_i += mi;
        }
        quantities.push(raw::total_correlation(&m).unwrap());
        quantities.push(raw::conditional_total_correlation(&m, &z).unwrap());
        let red = raw::tc_reduction(&m, &z).unwrap();
        worst_gap = worst_gap.max((red - (sum_i - i_xz)).abs());
        min_pre_clamp = quantities.into_iter().fold(min_pre_clamp, f64::min);
    }
    let elapsed = t.elapsed();
    Outcome::new(
        worst_gap <= 1e-9 && min_pre_clamp >= -1e-12 && elapsed < Duration::from_secs(5),
        format!("200 matrices, max gap {worst_gap:.2e}, min pre-clamp {min_pre_clamp:.2e}, {elapsed:.2?}"),
    )
}

// 2. fit_layer against exhaustive assignment search.
fn sieve_brute_force() -> Outcome {
    let t = Instant::now();
    let results: Vec<(bool, bool)> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for("sieve-oracle", i);
            let n = rng.random_range(2..=12);
            let d = rng.random_range(2..=4);
            let m = random_matrix(&mut rng, n, &vec![2; d]);
            let mut best = f64::NEG_INFINITY;
            for code in 0u32..(1 << n) {
                let z = DiscreteColumn::new((0..n).map(|r| (code >> r) & 1).collect(), 2).unwrap();
                best = best.max(raw::tc_reduction(&m, &z).unwrap());
            }
            let layer = fit_layer(&m, 2, i, 20, 200).unwrap();
            let found = layer.objective;
            ((found - best).abs() <= 1e-9, found <= best + 1e-9)
        })
        .collect();
    let matched = results.iter().filter(|r| r.0).count();
    let never_above = results.iter().all(|r| r.1);
    let elapsed = t.elapsed();
    Outcome::new(
        matched >= 95 && never_above && elapsed < Duration::from_secs(60),
        format!("{matched}/100 optimal, never above optimum: {never_above}, {elapsed:.2?}"),
    )
}

// 3. Remainders are invertible given Z and minimize I(X̄_i;Z) over all
// per-state relabelings.
fn remainder_contract() -> Outcome {
    let t = Instant::now();
    let mut fixtures = 0;
    let mut failures = Vec::new();
    for i in 0..60u64 {
        let mut rng = rng_for("remainder", i);
        let n = rng.random_range(4..=40);
        let d = rng.random_range(1..=5);
        let c = rng.random_range(2..=4);
        let m = random_matrix(&mut rng, n, &vec![2; d]);
        let layer = if i % 2 == 0 {
            fit_layer(&m, c, i, 3, 50).unwrap()
        } else {
            let z = DiscreteColumn::new((0..n).map(|_| rng.random_range(0..c)).collect(), c).unwrap();
            layer_from_factor(&m, z).unwrap()
        };
        let rem = compute_remainder(&m, &layer).unwrap();
        let z = &layer.factor;
        for (j, x) in m.columns().iter().enumerate() {
            fixtures += 1;
            let xbar = rem.column(j);
            // H(X | X̄, Z) = 0 exactly: each (x̄, z) cell holds one x value.
            let mut cell: HashMap<(u32, u32), u32> = HashMap::new();
            let functional = x
                .values()
                .iter()
                .zip(xbar.values())
                .zip(z.values())
                .all(|((&xv, &bv), &zv)| *cell.entry((bv, zv)).or_insert(xv) == xv);
            if !functional {
                failures.push(format!("fixture {i} column {j}: X not recoverable"));
            }
            let chosen = raw::mutual_information(xbar, z).unwrap();
            let perms = permutations(2);
            let mut best = f64::INFINITY;
            for code in 0..perms.len().pow(c) {
                let choice: Vec<&Vec<u32>> = (0..c)
                    .map(|s| &perms[code / perms.len().pow(s) % perms.len()])
                    .collect();
                let vals = x
                    .values()
                    .iter()
                    .zip(z.values())
                    .map(|(&xv, &zv)| choice[zv as usize][xv as usize]);
                let cand = DiscreteColumn::new(vals.collect(), 2).unwrap();
                best = best.min(raw::mutual_information(&cand, z).unwrap());
            }
            if chosen > best + 1e-12 {
                failures.push(format!("fixture {i} column {j}: I {chosen} > min {best}"));
            }
        }
    }
    let elapsed = t.elapsed();
    Outcome::new(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!(
            "{fixtures} columns, {} violations {:?}, {elapsed:.2?}",
            failures.len(),
            failures.first()
        ),
    )
}

fn purity(seed: u64) -> f64 {
    let cfg = SynthConfig {
        seed,
        ..SynthConfig::default()
    };
    let (ds, manifest) = generate(&cfg).unwrap();
    let sc = SieveConfig {
        seed,
        ..SieveConfig::default()
    };
    let (_, land) = fit_landscape(&ds.label_matrix(), 3, &sc).unwrap();
    let n_groups = cfg.groups.len();
    let mut hits = 0;
    for k in 0..3 {
        let mut counts = vec![0usize; n_groups];
        for d in land.cluster_members(k) {
            counts[manifest.planted_clusters[&d]] += 1;
        }
        hits += counts.into_iter().max().unwrap_or(0);
    }
    hits as f64 / ds.n_diseases() as f64
}

// 4. Landscape recovery on the default generator.
fn landscape_recovery() -> Outcome {
    let t = Instant::now();
    let purities: Vec<f64> = (0..10).map(purity).collect();
    let good = purities.iter().filter(|&&p| p >= 0.95).count();
    let elapsed = t.elapsed();
    Outcome::new(
        good >= 9 && elapsed < Duration::from_secs(60),
        format!(
            "purity >= 0.95 on {good}/10 seeds (min {:.3}), {elapsed:.2?}",
            purities.iter().cloned().fold(1.0, f64::min)
        ),
    )
}

/// AP by thresholding at every distinct score, highest first.
fn ap_oracle(scores: &[f64], labels: &[u8]) -> f64 {
    let total_pos = labels.iter().filter(|&&y| y == 1).count() as f64;
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    for t in thresholds {
        let (mut tp, mut predicted) = (0.0, 0.0);
        for (&s, &y) in scores.iter().zip(labels) {
            if s >= t {
                predicted += 1.0;
                tp += y as f64;
            }
        }
        let recall = tp / total_pos;
        ap += (recall - prev_recall) * (tp / predicted);
        prev_recall = recall;
    }
    ap
}

// 5. AP oracle, all-ties, monotone invariance.
fn ap_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ties_exact = true;
    let mut monotone_gap: f64 = 0.0;
    for i in 0..500 {
        let mut rng = rng_for("ap-oracle", i);
        let n = rng.random_range(2..=60);
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let forced = rng.random_range(0..n);
        labels[forced] = 1;
        let levels = rng.random_range(1..=20) as f64;
        let scores: Vec<f64> = (0..n)
            .map(|_| (rng.random_range(0.0..levels)).floor() / levels)
            .collect();
        let ap = average_precision(&scores, &labels).unwrap();
        worst = worst.max((ap - ap_oracle(&scores, &labels)).abs());

        let tied = vec![0.5; n];
        let prevalence = labels.iter().filter(|&&y| y == 1).count() as f64 / n as f64;
        ties_exact &= average_precision(&tied, &labels).unwrap() == prevalence;

        for f in [|s: f64| 3.0 * s - 7.0, |s: f64| s.exp(), |s: f64| (s + 0.1).powi(3)] {
            let mapped: Vec<f64> = scores.iter().map(|&s| f(s)).collect();
            monotone_gap = monotone_gap.max((average_precision(&mapped, &labels).unwrap() - ap).abs());
        }
    }
    Outcome::new(
        worst <= 1e-9 && ties_exact && monotone_gap <= 1e-12,
        format!(
            "500 instances, max oracle gap {worst:.2e}, all-ties exact: {ties_exact}, monotone gap {monotone_gap:.2e}"
        ),
    )
}

fn default_specs(seed: u64, cfg: &SynthConfig) -> Vec<ScenarioSpec> {
    let cluster = |d: &str| ClusterRef::Containing { containing: d.into() };
    let g = &cfg.groups;
    let flip = seed.is_multiple_of(2);
    vec![
        ScenarioKind::AgeSplit(AgeParams {
            threshold: 60,
            direction: if flip {
                AgeDirection::OlderToYounger
            } else {
                AgeDirection::YoungerToOlder
            },
            source_cluster: cluster(&g[0].diseases[0]),
        }),
        ScenarioKind::GenderSplit(GenderParams {
            direction: if flip {
                GenderDirection::MaleToFemale
            } else {
                GenderDirection::FemaleToMale
            },
            source_cluster: cluster(&g[1].diseases[0]),
        }),
        ScenarioKind::RaceSplit(RaceParams {
            direction: if flip {
                RaceDirection::MajorityToMinority
            } else {
                RaceDirection::MinorityToMajority
            },
            majority: default_majority_races(),
            minority: default_minority_races(),
            source_cluster: cluster(&g[2].diseases[0]),
        }),
        ScenarioKind::NovelDisease(NovelParams {
            source_cluster: cluster(&g[0].diseases[0]),
            novel_cluster: cluster(&g[1].diseases[0]),
        }),
        ScenarioKind::DualToSingle(DiseaseSetParams {
            set_a: g[0].diseases.clone(),
            set_b: g[1].diseases.clone(),
        }),
        ScenarioKind::SingleToDual(DiseaseSetParams {
            set_a: g[1].diseases.clone(),
            set_b: g[2].diseases.clone(),
        }),
    ]
    .into_iter()
    .map(|k| ScenarioSpec::new(k, seed))
    .collect()
}

fn read_task_labels(path: &Path) -> Vec<u8> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(|r| r.unwrap()[1].parse::<u8>().unwrap()).collect()
}

// 6. Every kind, 20 seeds, prevalence re-read from the written label files.
fn balance_suite() -> Outcome {
    let t = Instant::now();
    let failures: Vec<String> = (0..20u64)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let cfg = SynthConfig {
                seed,
                ..SynthConfig::default()
            };
            let (ds, _) = generate(&cfg).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let mut out = Vec::new();
            for spec in default_specs(seed, &cfg) {
                let name = spec.kind.name();
                let pair = match build_scenario(&ds, &spec) {
                    Ok(p) => p,
                    Err(e) => {
                        out.push(format!("seed {seed} {name}: {e}"));
                        continue;
                    }
                };
                let path = dir.path().join(name);
                save_pair(&pair, &path).unwrap();
                for side in ["source", "target"] {
                    let labels = read_task_labels(&path.join(side).join("task_labels.csv"));
                    let frac = labels.iter().filter(|&&y| y == 1).count() as f64 / labels.len() as f64;
                    if (frac - 0.6).abs() > 0.02 + 1e-12 {
                        out.push(format!("seed {seed} {name} {side}: {frac:.4}"));
                    }
                }
            }
            out
        })
        .collect();
    Outcome::new(
        failures.is_empty(),
        format!(
            "6 kinds x 20 seeds, {} out of band {:?}, {:.2?}",
            failures.len(),
            failures.first(),
            t.elapsed()
        ),
    )
}

// 7. Flip counts within 3σ; p = 0 and p = 1 exact.
fn flip_calibration() -> Outcome {
    let n = 1000;
    let mut violations = Vec::new();
    let mut exact = true;
    for seed in 0..100u64 {
        let mut rng = rng_for("flip-labels", seed);
        let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        for p in [0.1, 0.2] {
            let (flipped, idx) = flip_labels(&labels, p, seed).unwrap();
            let changed = labels.iter().zip(&flipped).filter(|(a, b)| a != b).count();
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            if changed != idx.len() || (changed as f64 - n as f64 * p).abs() > 3.0 * sigma {
                violations.push(format!(
                    "seed {seed} p={p}: {changed} vs 3 sigma band {:.1}..{:.1}",
                    n as f64 * p - 3.0 * sigma,
                    n as f64 * p + 3.0 * sigma
                ));
            }
        }
        exact &= flip_labels(&labels, 0.0, seed).unwrap().0 == labels;
        let complement: Vec<u8> = labels.iter().map(|&y| 1 - y).collect();
        exact &= flip_labels(&labels, 1.0, seed).unwrap().0 == complement;
    }
    Outcome::new(
        violations.is_empty() && exact,
        format!(
            "{} of 200 draws outside 3 sigma {violations:?}, p=0 identity and p=1 complement: {exact}",
            violations.len()
        ),
    )
}

fn weighted(pair: &SourceTargetPair, bc: &BaselineConfig) -> f64 {
    evaluate_baseline(pair, bc).unwrap().weighted_auprc
}

fn channel_names(ds: &Dataset, range: std::ops::Range<usize>) -> Vec<String> {
    ds.channels[range].iter().map(|c| c.name.clone()).collect()
}

struct Directional {
    flip_ok: bool,
    shift_ok: bool,
    noise_delta: f64,
    signal_gap: f64,
}

fn directional_seed(seed: u64) -> Directional {
    let bc = BaselineConfig::default();
    let cfg = SynthConfig {
        seed,
        ..SynthConfig::default()
    };
    let (ds, _) = generate(&cfg).unwrap();
    let anchor = ClusterRef::Containing {
        containing: cfg.groups[0].diseases[0].clone(),
    };
    let control = ScenarioSpec::new(
        ScenarioKind::NovelDisease(NovelParams {
            source_cluster: anchor.clone(),
            novel_cluster: anchor,
        }),
        seed,
    );
    let pair = build_scenario(&ds, &control).unwrap();
    let base = weighted(&pair, &bc);
    let with = |specs: &[TransformSpec]| {
        let mut p = pair.clone();
        apply_transforms(&mut p, specs).unwrap();
        weighted(&p, &bc)
    };
    let f10 = with(&[TransformSpec::label_flip(0.1)]);
    let f20 = with(&[TransformSpec::label_flip(0.2)]);
    let n_signal = cfg.diseases().len();
    let noise = with(&[TransformSpec::mask_channels(channel_names(
        &ds,
        n_signal..ds.n_channels(),
    ))]);
    let signal = with(&[TransformSpec::mask_channels(channel_names(&ds, 0..n_signal)).with_side(Side::Target)]);

    let mut icfg = cfg.clone();
    icfg.interactions.push(SignalInteraction {
        groups: vec![0, 1],
        signal_scale: 0.0,
    });
    let (ids, _) = generate(&icfg).unwrap();
    let s2d = ScenarioSpec::new(
        ScenarioKind::SingleToDual(DiseaseSetParams {
            set_a: icfg.groups[0].diseases.clone(),
            set_b: icfg.groups[1].diseases.clone(),
        }),
        seed,
    );
    let shifted = weighted(&build_scenario(&ids, &s2d).unwrap(), &bc);
    let in_dist = weighted(&build_control(&ids, &s2d).unwrap(), &bc);
    Directional {
        flip_ok: f20 <= f10,
        shift_ok: in_dist >= shifted,
        noise_delta: (noise - base).abs(),
        signal_gap: (signal - pair.target.prevalence()).abs(),
    }
}

// 8. Directional findings on synthetic data.
fn directional() -> Outcome {
    let t = Instant::now();
    let runs: Vec<Directional> = (0..10u64).into_par_iter().map(directional_seed).collect();
    let a = runs.iter().filter(|r| r.flip_ok).count();
    let b = runs.iter().filter(|r| r.shift_ok).count();
    let c = runs
        .iter()
        .filter(|r| r.noise_delta < 0.05 && r.signal_gap <= 0.05)
        .count();
    let max_noise = runs.iter().map(|r| r.noise_delta).fold(0.0, f64::max);
    let max_gap = runs.iter().map(|r| r.signal_gap).fold(0.0, f64::max);
    let elapsed = t.elapsed();
    Outcome::new(
        a >= 8 && b >= 8 && c == 10 && elapsed < Duration::from_secs(300),
        format!(
            "(a) flips {a}/10, (b) control >= shift {b}/10, (c) {c}/10 (max noise delta {max_noise:.4}, max signal gap {max_gap:.4}), {elapsed:.2?}"
        ),
    )
}

fn run_pipeline(dir: &Path) -> Result<(), String> {
    let exe = env!("CARGO_BIN_EXE_clinshift");
    std::fs::write(
        dir.join("spec.json"),
        r#"{"kind":"single_to_dual","params":{"set_a":["coronary_atherosclerosis","congestive_heart_failure"],"set_b":["pneumonia","copd"]},"seed":11,"transforms":[{"kind":"label_flip","params":{"p":0.1}}]}"#,
    )
    .map_err(|e| e.to_string())?;
    let steps: [&[&str]; 4] = [
        &["synth", "--out", "data", "--seed", "11", "--records", "2000"],
        &[
            "landscape",
            "--dataset",
            "data",
            "--out",
            "landscape",
            "--format",
            "both",
            "--seed",
            "11",
        ],
        &["scenario", "--dataset", "data", "--spec", "spec.json", "--out", "pair"],
        &[
            "evaluate",
            "--pair",
            "pair",
            "--baseline",
            "--report",
            "report.json",
            "--runs-csv",
            "runs.csv",
            "--save-predictions",
            "preds.csv",
        ],
    ];
    for args in steps {
        let out = Command::new(exe)
            .args(args)
            .current_dir(dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
    }
    Ok(())
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

// 9. Two CLI runs of the full pipeline are byte-identical.
fn determinism() -> Outcome {
    let runs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for r in &runs {
        if let Err(e) = run_pipeline(r.path()) {
            return Outcome::new(false, format!("pipeline failed: {e}"));
        }
    }
    let (a, b) = (tree(runs[0].path()), tree(runs[1].path()));
    let names: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    let differing: Vec<&&String> = names.iter().filter(|n| a.get(**n) != b.get(**n)).collect();
    let has_outputs = [
        "report.json",
        "landscape.dot",
        "pair/provenance.json",
        "data/synth_manifest.json",
    ]
    .iter()
    .all(|f| a.contains_key(*f));
    Outcome::new(
        differing.is_empty() && has_outputs,
        format!(
            "{} files compared, {} differ {:?}, expected outputs present: {has_outputs}",
            names.len(),
            differing.len(),
            differing.first()
        ),
    )
}

// 10. Masking the missing-measurement set leaves 41 of 76 channels.
fn masking_arithmetic() -> Outcome {
    let cfg = SynthConfig {
        n_records: 200,
        channel_layout: ChannelLayout::Mimic76,
        ..SynthConfig::default()
    };
    let (ds, _) = generate(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    clinshift::data::save_dataset(&ds, dir.path()).unwrap();
    let reloaded = load_dataset(dir.path()).unwrap();
    let names = missing_measurement_channels(&reloaded.channels);
    let masked = clinshift::transforms::mask_channels(&reloaded, &names).unwrap();
    let leaked = masked
        .records
        .iter()
        .flat_map(|r| &r.events)
        .filter(|e| masked.channels[e.channel].masked)
        .count();
    let (before, after) = (reloaded.valid_channel_count(), masked.valid_channel_count());
    Outcome::new(
        before == 76 && names.len() == 35 && after == 41 && leaked == 0,
        format!(
            "{before} -> {after} valid channels ({} masked), {leaked} events left on masked channels",
            names.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("TC identity", tc_identity),
        ("sieve brute-force oracle", sieve_brute_force),
        ("remainder contract", remainder_contract),
        ("landscape recovery", landscape_recovery),
        ("AP oracle", ap_suite),
        ("balance", balance_suite),
        ("flip calibration", flip_calibration),
        ("directional findings", directional),
        ("CLI determinism", determinism),
        ("76 -> 41 masking", masking_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{status}] {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
