//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Reference values are computed here from
//! closed forms, independently of the library.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fanin_core::constants::PHI0;
use fanin_core::fanin::{point_activity_fraction, tree_activity_fraction, BiasPoint};
use fanin_core::inductance::{
    applied_flux_collection, design_ldi2_collection, design_no_collection, ldi2_collection_asymptote,
    ldi2_no_collection_shared_ic, sfq_coupling, sfq_inductance, threshold_fraction_circuit, vary_ic_no_collection,
    washer_segment, CollectionLoopDesign, NoCollectionDesign,
};
use fanin_core::squid::{find_threshold_flux, sweep_response, SimConfig, SquidParams};
use fanin_core::tree::{build_tree, min_active_synapses, SearchMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;
const BIN: &str = env!("CARGO_BIN_EXE_fanin");

/// `(3π + 2)/(2π)`, the flux-per-activity prefactor.
fn prefactor() -> f64 {
    (3.0 * PI + 2.0) / (2.0 * PI)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }
}

fn c1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let f7 = point_activity_fraction(BiasPoint::new(0.7).unwrap());
    let f9 = point_activity_fraction(BiasPoint::new(0.9).unwrap());
    let elapsed = start.elapsed();
    o.check((f7 - prefactor() * 0.3).abs() < 1e-12, format!("f(0.7) = {f7:.6}"));
    o.check((f9 - prefactor() * 0.1).abs() < 1e-12, format!("f(0.9) = {f9:.6}"));
    o.check(
        (f7 - 0.55).abs() <= 0.005,
        format!("|f(0.7) - 55%| = {:.2} pp", (f7 - 0.55).abs() * 100.0),
    );
    o.check(
        (f9 - 0.18).abs() <= 0.005,
        format!("|f(0.9) - 18%| = {:.2} pp", (f9 - 0.18).abs() * 100.0),
    );
    o.check(elapsed < Duration::from_millis(1), format!("{elapsed:?}"));
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::new();
    let at = |b: f64, h: u32| tree_activity_fraction(BiasPoint::new(b).unwrap(), h);
    let f75 = at(0.7, 5);
    let f93 = at(0.9, 3);
    o.check(
        (f75 - (prefactor() * 0.3).powi(5)).abs() < 1e-12,
        "f(0.7, 5) matches f(0.7)^5",
    );
    o.check((0.045..=0.052).contains(&f75), format!("f(0.7, 5) = {f75:.5}"));
    o.check(f93 < 0.01, format!("f(0.9, 3) = {f93:.5}"));
    // At b = 1 every depth needs zero activity, so strict decrease is only
    // possible below the endpoint; the endpoint itself must give zeros.
    let mut bad = Vec::new();
    for i in 0..450 {
        let b = 0.55 + 0.45 * i as f64 / 450.0;
        for h in 1..5 {
            if at(b, h + 1).partial_cmp(&at(b, h)) != Some(std::cmp::Ordering::Less) {
                bad.push(format!("b = {b}, H = {h}"));
            }
        }
    }
    o.check(
        bad.is_empty(),
        format!("strict decrease in H on 450 biases in [0.55, 1) {bad:?}"),
    );
    o.check((1..=5).all(|h| at(1.0, h) == 0.0), "zero activity for every H at b = 1");
    o
}

fn c3() -> Outcome {
    let mut o = Outcome::new();
    let cfg = SimConfig::default();
    for bias in [0.5, 0.7, 0.9] {
        let params = SquidParams::<f64>::reference(bias).unwrap();
        let start = Instant::now();
        let curve = sweep_response(&params, 0.0, 2.0, 201, &cfg).unwrap();
        let elapsed = start.elapsed();
        let r: Vec<f64> = curve.samples.iter().map(|s| s.1).collect();
        let drop = (0..50).map(|i| r[i] - r[i + 1]).fold(0.0, f64::max);
        let period = (0..=100).map(|i| (r[i] - r[i + 100]).abs()).fold(0.0, f64::max);
        let mirror = (0..=50).map(|i| (r[i] - r[100 - i]).abs()).fold(0.0, f64::max);
        o.check(drop <= 1e-6, format!("b = {bias}: largest drop on [0, 1/2] {drop:.1e}"));
        o.check(period <= 1e-4, format!("b = {bias}: period deviation {period:.1e}"));
        o.check(mirror <= 1e-4, format!("b = {bias}: mirror deviation {mirror:.1e}"));
        o.check(
            elapsed <= Duration::from_secs(120),
            format!("b = {bias}: sweep {:.1} s", elapsed.as_secs_f64()),
        );
    }
    let params = SquidParams::<f64>::reference(0.7).unwrap();
    let threshold = find_threshold_flux(&params, 1e-4, &cfg).unwrap();
    let analytic = (3.0 * PI + 2.0) / (4.0 * PI) * 0.3;
    let off = (threshold - analytic) / analytic;
    o.check(
        off.abs() <= 0.25,
        format!(
            "threshold(0.7) = {threshold:.4} vs L_tot(Ic - Ib) = {analytic:.4} ({:+.1}%, limit 25%)",
            off * 100.0
        ),
    );
    o
}

fn c4() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_flux, mut worst_hand, mut worst_threshold) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=128u64);
        let d = CollectionLoopDesign {
            ic: rng.gen_range(50.0..=500.0) * 1e-6,
            n,
            l_dc1: rng.gen_range(1.0..100.0) * 1e-12,
            alpha: rng.gen_range(0.0..=0.2),
            l_dc3: rng.gen_range(10.0..1000.0) * 1e-12,
            k1: rng.gen_range(0.3..=0.9),
            k2: rng.gen_range(0.3..=0.9),
            l_di1: 1e-9,
            l_di2: 0.0,
            gamma: rng.gen_range(0.5..2.0),
            phi_max: 0.5,
        }
        .with_designed_l_di2()
        .unwrap();
        let saturated = vec![d.i_sat(); n as usize];
        worst_flux = worst_flux.max(rel(applied_flux_collection(&d, &saturated).unwrap(), 0.5));

        // Loop equations written out longhand.
        let l_dr = PHI0 / (2.0 * d.ic);
        let m_in = d.k1 * (d.l_di2 * d.l_dc1).sqrt();
        let m_out = d.k2 * (d.l_dc3 * l_dr).sqrt();
        let i_dc = n as f64 * m_in * d.i_sat() / (n as f64 * d.l_dc1 + (1.0 + d.alpha) * d.l_dc3);
        worst_hand = worst_hand.max(rel(m_out * i_dc / PHI0, 0.5));

        for b in [0.55, 0.7, 0.8, 0.9, 0.99] {
            let circuit = threshold_fraction_circuit(&d, b).unwrap();
            worst_threshold = worst_threshold.max((circuit - prefactor() * (1.0 - b)).abs());
        }
    }
    o.check(worst_flux <= 1e-12, format!("round trip worst {worst_flux:.1e}"));
    o.check(worst_hand <= 1e-12, format!("longhand flux worst {worst_hand:.1e}"));
    o.check(
        worst_threshold <= 1e-9,
        format!("threshold law worst {worst_threshold:.1e}"),
    );
    o
}

fn c5() -> Outcome {
    let mut o = Outcome::new();
    let base = CollectionLoopDesign::<f64>::reference(2).unwrap();
    let l = |n| design_ldi2_collection(&CollectionLoopDesign { n, ..base }).unwrap();
    let ns: Vec<u64> = (2..=1000).chain([10_000, 100_000, 1_000_000]).collect();
    let decreasing = ns.windows(2).all(|w| l(w[1]) < l(w[0]));
    o.check(
        decreasing,
        format!("strictly decreasing over {} fan-in values", ns.len()),
    );
    // (1/L^dr)(Φmax/(k1 k2 Isat))² L^dc1/L^dc3 with L^dr = Φ0/(2 Ic).
    let asymptote = (0.5 * PHI0 / (0.25 * 300e-6)).powi(2) * (10.0 / 100.0) / (PHI0 / (2.0 * 300e-6));
    o.check(
        rel(ldi2_collection_asymptote(&base).unwrap(), asymptote) < 1e-12,
        format!("asymptote {:.4} pH", asymptote * 1e12),
    );
    let far = l(1_000_000);
    o.check(
        rel(far, asymptote) < 1e-3,
        format!("n = 1e6 off by {:.2e}", rel(far, asymptote)),
    );
    let level = sfq_inductance(300e-6);
    o.check(
        rel(level, PHI0 / 300e-6) < 1e-15 && (level * 1e12 - 6.89).abs() < 0.005,
        format!("SFQ line {:.3} pH", level * 1e12),
    );
    o
}

fn c6(dir: &Path) -> Outcome {
    let mut o = Outcome::new();
    let mut worst = 0.0_f64;
    for n in (1..=200).chain([1000, 10_000]) {
        for k in [0.1, 0.3, 0.5, 0.9, 1.0] {
            for ic in [50e-6, 300e-6, 500e-6] {
                let d = NoCollectionDesign {
                    n,
                    k,
                    ic_dr: ic,
                    ic_di: ic,
                    l_dr1: washer_segment(n, ic).unwrap(),
                    sfq_mode: false,
                };
                let general = design_no_collection(&d, 0.5).unwrap();
                let closed = ldi2_no_collection_shared_ic(n, k, ic);
                worst = worst.max(rel(general, closed));
                worst = worst.max(rel(closed, PHI0 / (2.0 * n as f64 * k * k * ic)));
            }
        }
    }
    o.check(worst <= 1e-12, format!("general vs closed form worst {worst:.1e}"));

    let mut worst = 0.0_f64;
    for n in 1..=10_000u64 {
        for ic in [50e-6, 300e-6] {
            let k: f64 = sfq_coupling(n).unwrap();
            worst = worst.max(rel(ldi2_no_collection_shared_ic(n, k, ic), PHI0 / ic));
        }
    }
    o.check(worst <= 1e-12, format!("SFQ coupling n in [1, 1e4] worst {worst:.1e}"));

    let d = NoCollectionDesign {
        n: 4,
        k: 0.5,
        ic_dr: 300e-6,
        ic_di: 100e-6,
        l_dr1: washer_segment(4, 300e-6).unwrap(),
        sfq_mode: true,
    };
    let r = vary_ic_no_collection(&d).unwrap();
    o.check(
        r.ic_di == d.ic_dr,
        format!("vary_ic n = 4, k = 0.5: ic_di = {} uA", r.ic_di * 1e6),
    );

    let report = dir.join("vary_ic.report.json");
    let status = Command::new(BIN)
        .args([
            "design", "--mode", "vary_ic", "--sfq", "--n", "4", "--k", "0.5", "--report",
        ])
        .arg(&report)
        .arg("-o")
        .arg(dir.join("vary_ic.csv"))
        .status()
        .unwrap();
    let doc: serde_json::Value = std::fs::read(&report)
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok())
        .unwrap_or_default();
    let ratio = doc["sfq_consistency"]["rows"][0]["ratio"].as_f64();
    o.check(
        status.success() && ratio == Some(2.0),
        format!("consistency report emitted, ratio {ratio:?}"),
    );
    o
}

fn c7() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut cases = 0;
    for (n, h) in [(2u64, 2u32), (2, 3), (3, 2), (4, 2)] {
        for p in 1..=n {
            // Middle of the band of fractions that round up to p inputs.
            let f = (p as f64 - 0.5) / n as f64;
            let bias = 1.0 - f / prefactor();
            let tree = build_tree(n, h, bias).unwrap();
            let found = min_active_synapses(&tree, SearchMode::Exhaustive).map(|m| m.count as u64);
            o.check(
                found.as_ref().ok() == Some(&p.pow(h)),
                format!("n = {n}, H = {h}, p = {p}: {found:?}"),
            );
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    o.check(
        elapsed < Duration::from_secs(60),
        format!("{cases} cases in {:.2} s", elapsed.as_secs_f64()),
    );
    o
}

fn c8(dir: &Path) -> Outcome {
    let mut o = Outcome::new();
    let runs: &[(&str, &[&str])] = &[
        ("response.csv", &["response", "--points", "41"]),
        ("response.json", &["response", "--points", "41", "--format", "json"]),
        ("activity.csv", &["activity"]),
        (
            "activity_int.json",
            &["activity", "--integer", "--fan-in", "22", "--format", "json"],
        ),
        ("design.csv", &["design"]),
        ("design_sfq.json", &["design", "--mode", "sfq", "--format", "json"]),
        ("design_nc.csv", &["design", "--mode", "no_collection"]),
        ("design_vary.csv", &["design", "--mode", "vary_ic", "--sfq"]),
        ("tree.json", &["tree-verify", "2", "3", "0.7"]),
        (
            "tree_c.json",
            &["tree-verify", "3", "2", "0.8", "--mode", "constructive", "--snapshot"],
        ),
        ("tree_d.json", &["tree-verify", "2", "3", "0.7", "--mode", "dynamical"]),
    ];
    for (file, args) in runs {
        let mut outputs = Vec::new();
        let mut codes = Vec::new();
        for round in 0..2 {
            // Same arguments each round, including the relative output path.
            let cwd = dir.join(format!("round{round}"));
            std::fs::create_dir_all(&cwd).unwrap();
            let status = Command::new(BIN)
                .current_dir(&cwd)
                .args(*args)
                .args(["-o", file])
                .status()
                .unwrap();
            codes.push(status.code());
            let mut bytes = std::fs::read(cwd.join(file)).unwrap_or_default();
            if let Ok(extra) = std::fs::read(cwd.join(format!("{file}.report.json"))) {
                bytes.extend(extra);
            }
            outputs.push(bytes);
        }
        let same = !outputs[0].is_empty() && outputs[0] == outputs[1] && codes[0] == codes[1];
        o.check(same, format!("{} byte-identical", args.join(" ")));
        if *file == "tree.json" {
            let doc: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap_or_default();
            o.check(
                codes[0] == Some(0) && doc["agree"] == true,
                format!("tree-verify 2 3 0.7 exit {:?}, agree {}", codes[0], doc["agree"]),
            );
        }
    }
    o
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<Criterion> = vec![
        ("point-neuron thresholds", Box::new(c1)),
        ("tree thresholds", Box::new(c2)),
        ("SQUID response properties", Box::new(c3)),
        ("collection-loop constraint", Box::new(c4)),
        ("DI output coil versus fan-in", Box::new(c5)),
        ("no-collection family", Box::new(|| c6(dir.path()))),
        ("brute-force tree oracle", Box::new(c7)),
        ("CLI determinism", Box::new(|| c8(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if o.failures.is_empty() {
            println!("criterion {}: PASS  {name}: {}", i + 1, o.notes.join("; "));
        } else {
            failed += 1;
            println!("criterion {}: FAIL  {name}: {}", i + 1, o.failures.join("; "));
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
