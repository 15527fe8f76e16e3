//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use retina_core::io::manifest::{manifest_from_json, manifest_to_json};
use retina_core::io::npy::{decode_npy, encode_npy};
use retina_core::oracle::{ks_critical_value, ks_uniform_statistic};
use retina_core::rng::Stream;
use retina_core::selfcheck::{self, CheckResult, Fault};
use retina_core::synthetic::{label_agreement, labeled_bank, SyntheticConfig};
use retina_core::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn from_check(r: CheckResult, budget_ms: Option<f64>) -> Outcome {
    match budget_ms {
        Some(b) if r.elapsed_ms >= b => outcome(false, format!("{} (took {:.0} ms, budget {b} ms)", r.detail, r.elapsed_ms)),
        _ => outcome(r.passed, format!("{} in {:.1} ms", r.detail, r.elapsed_ms)),
    }
}

fn zero_crossing() -> Outcome {
    from_check(selfcheck::zero_crossing_law(Fault::None), Some(1000.0))
}

fn balance_and_symmetry() -> Outcome {
    let start = Instant::now();
    let b = selfcheck::balance(1000, 1, Fault::None);
    let s = selfcheck::dihedral_symmetry(1000, 2, Fault::None);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    outcome(
        b.passed && s.passed && ms < 1000.0,
        format!("{}; {}; {ms:.0} ms total", b.detail, s.detail),
    )
}

fn mapping() -> Outcome {
    from_check(selfcheck::rodieck_mapping(20, 100, 3), None)
}

fn sampler() -> Outcome {
    let config = SamplerConfig::new(2024, 9);
    let bank = match sample_bank(&config, 10_000) {
        Ok(b) => b,
        Err(e) => return outcome(false, e.to_string()),
    };
    let m = &bank.manifest;
    let on = m.polarities.iter().filter(|p| **p == Polarity::OnCenter).count() as f64 / 1e4;
    let d = ks_uniform_statistic(&m.gammas, config.gamma_min, config.gamma_max);
    let crit = ks_critical_value(10_000, 0.01);
    let bytes = || {
        let bank = sample_bank(&config, 10_000).unwrap();
        let npy = encode_npy(&ArrayFile::from_kernels(&bank.kernels, Dtype::F32).unwrap()).unwrap();
        (npy, manifest_to_json(&bank.manifest).unwrap())
    };
    let identical = bytes() == bytes();
    outcome(
        (on - 0.5).abs() <= 0.02 && d < crit && identical,
        format!("on fraction {on:.4}, KS D = {d:.5} (critical {crit:.5}), identical bytes: {identical}"),
    )
}

fn kmeans_oracle() -> Outcome {
    let opt = selfcheck::kmeans_optimum(100, 50, 4);
    let descent = selfcheck::kmeans_descent(50, 5);
    outcome(opt.passed && descent.passed, format!("{}; {}", opt.detail, descent.detail))
}

fn synthetic_recovery() -> Outcome {
    let start = Instant::now();
    let (kernels, truth) = match labeled_bank(&SyntheticConfig::new(7, 100, 0.1, 17)) {
        Ok(x) => x,
        Err(e) => return outcome(false, e.to_string()),
    };
    let n = kernels.len();
    let set = KernelSet::new(kernels, "synthetic").unwrap();
    let report = match analyze(&set, &KMeansConfig::with_seed(0)) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let agreement = label_agreement(&report.assignments, &report.labels, &truth);
    let one_each = [ClusterLabel::OnCenter, ClusterLabel::OffCenter, ClusterLabel::Other]
        .iter()
        .all(|l| report.labels.iter().filter(|x| *x == l).count() == 1);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        agreement >= 0.95 && one_each && secs < 10.0,
        format!("{n} kernels, agreement {agreement:.4}, one cluster per label: {one_each}, {secs:.2} s"),
    )
}

fn random_array(stream: &mut Stream) -> ArrayFile {
    let rank = 1 + stream.below(4);
    let shape: Vec<usize> = (0..rank).map(|_| 1 + stream.below(6)).collect();
    let len = shape.iter().product();
    let data = if stream.coin() {
        let mut v: Vec<f32> = (0..len).map(|_| f32::from_bits(stream.next_u64() as u32)).collect();
        // quiet NaN with a random sign and payload
        v[0] = f32::from_bits(0x7fc0_0000 | (stream.next_u64() as u32 & 0x803f_ffff));
        ArrayData::F32(v)
    } else {
        let mut v: Vec<f64> = (0..len).map(|_| f64::from_bits(stream.next_u64())).collect();
        v[0] = f64::from_bits(0x7ff8_0000_0000_0000 | (stream.next_u64() & 0x8007_ffff_ffff_ffff));
        ArrayData::F64(v)
    };
    ArrayFile::new(shape, data).unwrap()
}

fn bits(data: &ArrayData) -> Vec<u64> {
    match data {
        ArrayData::F32(v) => v.iter().map(|x| x.to_bits() as u64).collect(),
        ArrayData::F64(v) => v.iter().map(|x| x.to_bits()).collect(),
    }
}

fn random_manifest(stream: &mut Stream) -> BankManifest {
    let lo = stream.uniform(0.01, 0.4);
    let config = SamplerConfig {
        gamma_min: lo,
        gamma_max: stream.uniform(lo + 0.05, 0.95),
        polarity_mode: [PolarityMode::Both, PolarityMode::OnOnly, PolarityMode::OffOnly][stream.below(3)],
        ..SamplerConfig::new(stream.next_u64(), 5 + 2 * stream.below(3))
    };
    let layers = [LayerSpec::new(format!("layer.{}", stream.below(100)), 1 + stream.below(40), config.kernel_size)];
    let mut bank = bank_for_layers(&config, &layers).unwrap().remove(0);
    if stream.coin() {
        bank.manifest.layer_name = None;
    }
    bank.manifest
}

fn format_round_trips() -> Outcome {
    let mut stream = Stream::new(31);
    let mut nan_payloads = 0;
    for i in 0..50 {
        let array = random_array(&mut stream);
        let decoded = match encode_npy(&array).and_then(|b| decode_npy(&b)) {
            Ok(a) => a,
            Err(e) => return outcome(false, format!("tensor {i}: {e}")),
        };
        if decoded.shape() != array.shape() || bits(decoded.data()) != bits(array.data()) {
            return outcome(false, format!("tensor {i} changed in round trip"));
        }
        nan_payloads += match array.data() {
            ArrayData::F32(v) => v.iter().filter(|x| x.is_nan()).count(),
            ArrayData::F64(v) => v.iter().filter(|x| x.is_nan()).count(),
        };
    }
    for i in 0..50 {
        let manifest = random_manifest(&mut stream);
        match manifest_to_json(&manifest).and_then(|t| manifest_from_json(&t)) {
            Ok(back) if back == manifest => {}
            Ok(_) => return outcome(false, format!("manifest {i} changed in round trip")),
            Err(e) => return outcome(false, format!("manifest {i}: {e}")),
        }
    }
    outcome(true, format!("50 tensors ({nan_payloads} NaN payloads) and 50 manifests bit-exact"))
}

fn cli_selfcheck() -> Outcome {
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_retina"))
            .arg("selfcheck")
            .args(extra)
            .output()
            .map(|o| o.status.code())
    };
    match (run(&[]), run(&["--inject-fault", "tampered-sigma"])) {
        (Ok(clean), Ok(faulty)) => outcome(
            clean == Some(0) && faulty == Some(1),
            format!("clean exit {clean:?}, tampered-sigma exit {faulty:?}"),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("zero-crossing law", zero_crossing),
        ("balance and dihedral symmetry", balance_and_symmetry),
        ("rodieck mapping", mapping),
        ("sampler distribution and determinism", sampler),
        ("k-means against exhaustive optimum", kmeans_oracle),
        ("synthetic recovery", synthetic_recovery),
        ("format round-trips", format_round_trips),
        ("cli selfcheck and fault injection", cli_selfcheck),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.passed {
            failures += 1;
        }
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
