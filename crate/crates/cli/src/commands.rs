use std::path::{Path, PathBuf};

use serde_json::json;

use retina_core::bank::LayerSpec;
use retina_core::io::{
    self, read_array, read_proportions, write_array, write_manifest, write_proportions, write_report, Colormap,
    Normalize,
};
use retina_core::rng::GENERATOR_NAME;
use retina_core::selfcheck::{run_all, Fault};
use retina_core::{
    analyze, bank_for_layers, proportion_table, sample_bank, ArrayFile, ClusterReport, Dtype, KMeansConfig, Kernel,
    KernelBank, KernelSet, PolarityMode, RenderSpec, SamplerConfig,
};

use crate::config::{self, FileConfig};
use crate::error::{code, CliError, CliResult};
use crate::{AnalyzeArgs, Cli, Command, GenerateArgs, RenderArgs, SelfcheckArgs};

pub fn run(cli: Cli) -> CliResult<u8> {
    let file = config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(args) => generate(args, file).map(|_| 0),
        Command::Analyze(args) => analyze_cmd(args, file).map(|_| 0),
        Command::Render(args) => render(args, file).map(|_| 0),
        Command::Selfcheck(args) => selfcheck(args),
    }
}

fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(format!("missing required --{flag}")))
}

fn sidecar_path(primary: &Path) -> PathBuf {
    let mut name = primary.file_name().unwrap_or_default().to_os_string();
    name.push(".run.json");
    primary.with_file_name(name)
}

/// Records the fully resolved configuration next to the primary output.
fn write_sidecar(primary: &Path, command: &str, resolved: serde_json::Value) -> CliResult<()> {
    let record = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "generator": GENERATOR_NAME,
        "resolved": resolved,
    });
    let mut text = serde_json::to_string_pretty(&record).expect("json values serialize");
    text.push('\n');
    io::write_atomic(&sidecar_path(primary), text.as_bytes())?;
    Ok(())
}

fn parse_dtype(s: &str) -> CliResult<Dtype> {
    match s {
        "f32" => Ok(Dtype::F32),
        "f64" => Ok(Dtype::F64),
        other => Err(CliError::usage(format!("--dtype must be f32 or f64, got {other:?}"))),
    }
}

fn layer_file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

fn write_bank(bank: &KernelBank, dtype: Dtype, out: &Path, manifest: &Path) -> CliResult<()> {
    write_array(out, &ArrayFile::from_kernels(&bank.kernels, dtype)?)?;
    write_manifest(manifest, &bank.manifest)?;
    Ok(())
}

fn generate(args: GenerateArgs, file: FileConfig) -> CliResult<()> {
    let f = file.generate;
    let seed = config::resolve_seed(args.seed, f.seed)?;
    let polarity = args.polarity.or(f.polarity).unwrap_or_else(|| "both".into());
    let polarity_mode = PolarityMode::parse(&polarity)?;
    let dtype_name = args.dtype.or(f.dtype).unwrap_or_else(|| "f32".into());
    let dtype = parse_dtype(&dtype_name)?;
    let defaults = SamplerConfig::new(seed, 0);
    let gamma_min = args.gamma_min.or(f.gamma_min).unwrap_or(defaults.gamma_min);
    let gamma_max = args.gamma_max.or(f.gamma_max).unwrap_or(defaults.gamma_max);
    let base = json!({
        "seed": seed.to_string(),
        "gamma_min": gamma_min,
        "gamma_max": gamma_max,
        "polarity": polarity_mode.as_str(),
        "dtype": dtype_name,
    });

    if let Some(layers_path) = args.layers.or(f.layers) {
        let out_dir = required(args.out_dir.or(f.out_dir), "out-dir")?;
        let text = std::fs::read_to_string(&layers_path)
            .map_err(|e| CliError::new(code::BAD_INPUT, format!("{}: {e}", layers_path.display())))?;
        let layers: Vec<LayerSpec> = serde_json::from_str(&text)
            .map_err(|e| CliError::new(code::BAD_INPUT, format!("{}: {e}", layers_path.display())))?;
        let config = SamplerConfig {
            seed,
            gamma_min,
            gamma_max,
            polarity_mode,
            kernel_size: layers.first().map_or(3, |l| l.kernel_size),
        };
        let banks = bank_for_layers(&config, &layers)?;
        std::fs::create_dir_all(&out_dir).map_err(retina_core::Error::from)?;
        let mut index = Vec::with_capacity(banks.len());
        for (layer, bank) in layers.iter().zip(&banks) {
            let stem = layer_file_stem(&layer.name);
            let (npy, manifest) = (format!("{stem}.npy"), format!("{stem}.json"));
            write_bank(bank, dtype, &out_dir.join(&npy), &out_dir.join(&manifest))?;
            index.push(json!({
                "layer": layer.name,
                "shape": [layer.channels, 1, layer.kernel_size, layer.kernel_size],
                "file": npy,
                "manifest": manifest,
            }));
        }
        let index_path = out_dir.join("index.json");
        let mut text = serde_json::to_string_pretty(&index).expect("json values serialize");
        text.push('\n');
        io::write_atomic(&index_path, text.as_bytes())?;
        let mut resolved = base;
        resolved["layers"] = json!(layers);
        resolved["out_dir"] = json!(out_dir);
        return write_sidecar(&index_path, "generate", resolved);
    }

    let size = required(args.size.or(f.size), "size")?;
    let channels = required(args.channels.or(f.channels), "channels")?;
    let out = required(args.out.or(f.out), "out")?;
    let manifest = args.manifest.or(f.manifest).unwrap_or_else(|| out.with_extension("json"));
    let config = SamplerConfig {
        seed,
        gamma_min,
        gamma_max,
        polarity_mode,
        kernel_size: size,
    };
    let bank = sample_bank(&config, channels)?;
    write_bank(&bank, dtype, &out, &manifest)?;
    let mut resolved = base;
    resolved["size"] = json!(size);
    resolved["channels"] = json!(channels);
    resolved["out"] = json!(out);
    resolved["manifest"] = json!(manifest);
    write_sidecar(&out, "generate", resolved)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "kernels".into(), |s| s.to_string_lossy().into_owned())
}

fn load_kernels(path: &Path) -> CliResult<Vec<Kernel>> {
    let array = read_array(path).map_err(|e| CliError::input(path, e))?;
    array.to_kernels().map_err(|e| CliError::input(path, e))
}

fn analyze_cmd(args: AnalyzeArgs, file: FileConfig) -> CliResult<()> {
    let f = file.analyze;
    let inputs = if args.inputs.is_empty() { f.inputs.unwrap_or_default() } else { args.inputs };
    if inputs.is_empty() {
        return Err(CliError::usage("missing required --in"));
    }
    let report_path = required(args.report.or(f.report), "report")?;
    let csv_path = required(args.csv.or(f.csv), "csv")?;
    let defaults = KMeansConfig::default();
    let kconfig = KMeansConfig {
        k: args.k.or(f.k).unwrap_or(defaults.k),
        restarts: args.restarts.or(f.restarts).unwrap_or(defaults.restarts),
        max_iters: args.max_iters.or(f.max_iters).unwrap_or(defaults.max_iters),
        tol: args.tol.or(f.tol).unwrap_or(defaults.tol),
        seed: config::resolve_seed(args.seed, f.seed)?,
    };
    kconfig.validate()?;
    let per_layer = args.per_layer || f.per_layer.unwrap_or(false);
    let tag = args.tag.or(f.tag);

    let mut reports: Vec<(String, ClusterReport)> = Vec::new();
    if per_layer {
        for path in &inputs {
            let set = KernelSet::new(load_kernels(path)?, stem(path)).map_err(|e| CliError::input(path, e))?;
            let report = analyze(&set, &kconfig).map_err(|e| CliError::input(path, e))?;
            reports.push((stem(path), report));
        }
    } else {
        let mut kernels = Vec::new();
        for path in &inputs {
            kernels.extend(load_kernels(path)?);
        }
        let source = if inputs.len() == 1 { stem(&inputs[0]) } else { "pooled".into() };
        let set = KernelSet::new(kernels, source.clone()).map_err(|e| CliError::input(&inputs[0], e))?;
        let report = analyze(&set, &kconfig).map_err(|e| CliError::input(&inputs[0], e))?;
        reports.push((tag.clone().unwrap_or(source), report));
    }

    if per_layer {
        let all: Vec<&ClusterReport> = reports.iter().map(|(_, r)| r).collect();
        let mut text = serde_json::to_string_pretty(&all).expect("reports serialize");
        text.push('\n');
        io::write_atomic(&report_path, text.as_bytes())?;
    } else {
        write_report(&report_path, &reports[0].1)?;
    }
    write_proportions(&csv_path, &proportion_table(&reports))?;
    write_sidecar(
        &report_path,
        "analyze",
        json!({
            "in": inputs,
            "k": kconfig.k,
            "restarts": kconfig.restarts,
            "max_iters": kconfig.max_iters,
            "tol": kconfig.tol,
            "seed": kconfig.seed.to_string(),
            "per_layer": per_layer,
            "tag": tag,
            "report": report_path,
            "csv": csv_path,
        }),
    )
}

fn parse_colormap(s: &str) -> CliResult<Colormap> {
    match s {
        "diverging" => Ok(Colormap::Diverging),
        "gray" | "grey" => Ok(Colormap::Gray),
        other => Err(CliError::usage(format!("--colormap must be diverging or gray, got {other:?}"))),
    }
}

fn parse_normalize(s: &str) -> CliResult<Normalize> {
    match s {
        "per-kernel" => Ok(Normalize::PerKernel),
        "global" => Ok(Normalize::Global),
        other => Err(CliError::usage(format!("--normalize must be per-kernel or global, got {other:?}"))),
    }
}

/// Reads a single report or a per-layer list of reports.
fn load_reports(path: &Path) -> CliResult<Vec<ClusterReport>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e.into()))?;
    let bad = |e: serde_json::Error| CliError::new(code::BAD_INPUT, format!("{}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    if value.is_array() {
        serde_json::from_value(value).map_err(bad)
    } else {
        serde_json::from_value(value).map(|r| vec![r]).map_err(bad)
    }
}

/// Cluster averages live in [0, 1]; shift each so its mid-range maps to white.
fn centered_averages(reports: &[ClusterReport]) -> CliResult<Vec<Kernel>> {
    let mut kernels = Vec::new();
    for report in reports {
        for avg in report.cluster_average_kernels()? {
            let (lo, hi) = avg
                .weights()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
            let mid = 0.5 * (lo + hi);
            kernels.push(Kernel::new(avg.size(), avg.weights().iter().map(|v| v - mid).collect())?);
        }
    }
    Ok(kernels)
}

fn render(args: RenderArgs, file: FileConfig) -> CliResult<()> {
    let f = file.render;
    let grid = args.grid.or(f.grid);
    let hist = args.hist.or(f.hist);
    if grid.is_none() && hist.is_none() {
        return Err(CliError::usage("nothing to do: give --grid and/or --hist"));
    }
    let defaults = RenderSpec::default();
    let colormap_name = args.colormap.or(f.colormap).unwrap_or_else(|| "diverging".into());
    let normalize_name = args.normalize.or(f.normalize).unwrap_or_else(|| "per-kernel".into());
    let spec = RenderSpec {
        columns: args.columns.or(f.columns).unwrap_or(defaults.columns),
        cell_px: args.cell.or(f.cell).unwrap_or(defaults.cell_px),
        colormap: parse_colormap(&colormap_name)?,
        normalize: parse_normalize(&normalize_name)?,
    };
    let input = args.input.or(f.input);
    let report = args.report.or(f.report);
    let proportions = args.proportions.or(f.proportions);

    if let Some(grid) = &grid {
        let kernels = match (&input, &report) {
            (Some(path), _) => load_kernels(path)?,
            (None, Some(path)) => centered_averages(&load_reports(path)?)?,
            (None, None) => return Err(CliError::usage("--grid needs --in or --report")),
        };
        if kernels.iter().any(|k| k.size() != kernels[0].size()) {
            return Err(CliError::new(code::BAD_INPUT, "kernels of mixed sizes cannot share a grid"));
        }
        if spec.columns == 0 || spec.cell_px < kernels[0].size() {
            return Err(CliError::usage(format!(
                "--columns must be positive and --cell at least the kernel size {}",
                kernels[0].size()
            )));
        }
        io::render_kernel_grid(&kernels, &spec, grid)?;
    }
    if let Some(hist) = &hist {
        let path = required(proportions.clone(), "proportions")?;
        let rows = read_proportions(&path).map_err(|e| CliError::input(&path, e))?;
        if rows.is_empty() {
            return Err(CliError::new(code::BAD_INPUT, format!("{}: no rows", path.display())));
        }
        io::render_histogram(&rows, hist)?;
    }
    let primary = grid.as_ref().or(hist.as_ref()).expect("checked above");
    write_sidecar(
        primary,
        "render",
        json!({
            "in": input,
            "report": report,
            "grid": grid,
            "columns": spec.columns,
            "cell": spec.cell_px,
            "colormap": colormap_name,
            "normalize": normalize_name,
            "proportions": proportions,
            "hist": hist,
        }),
    )
}

fn selfcheck(args: SelfcheckArgs) -> CliResult<u8> {
    let fault = match args.inject_fault.as_deref() {
        None => Fault::None,
        Some("tampered-sigma") => Fault::TamperedSigma,
        Some(other) => return Err(CliError::usage(format!("unknown fault {other:?}"))),
    };
    let results = run_all(fault);
    let all_passed = results.iter().all(|r| r.passed);
    if args.json {
        let out = json!({ "passed": all_passed, "checks": results });
        println!("{}", serde_json::to_string_pretty(&out).expect("results serialize"));
    } else {
        for r in &results {
            println!(
                "{:<4}  {:<32} {:>9.1} ms  {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.elapsed_ms,
                r.detail
            );
        }
    }
    for r in results.iter().filter(|r| !r.passed) {
        eprintln!("retina: selfcheck failed: {}", r.name);
    }
    Ok(if all_passed { 0 } else { code::FAILURE })
}
