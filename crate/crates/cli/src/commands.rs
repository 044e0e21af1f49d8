use maskopt::seed::derive_seed;
use maskopt::selection::SweepGrid;
use maskopt::signal::io::read_image;
use maskopt::{
    add_noise_all, bound_noiseless, bound_noisy, count_feasible, estimate_residual, greedy_optimize,
    greedy_optimize_noisy, make_phantom, parametric_sweep, select_best, ComplexImage, CostFunction,
    Denoiser, GreedyConfig, MaskFile, NoiseModel, PerformanceMeasure, PhantomKind, SamplingPattern,
    SubsetFamily,
};
use serde_json::json;

use crate::data::{load_dir, manifest_path, read_mask, save_image, timestamp, write_json, write_text};
use crate::error::{CliError, Result};
use crate::{BoundArgs, DenoiserChoice, EvaluateArgs, GreedyArgs, PhantomArgs, PhantomChoice, SelectArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn phantom(a: &PhantomArgs) -> Result<()> {
    let kind = match a.kind {
        PhantomChoice::WaveletSparse => PhantomKind::WaveletSparse,
        PhantomChoice::PiecewiseConstant => PhantomKind::PiecewiseConstant {
            rectangles: a.rectangles,
        },
    };
    // validate before touching the filesystem
    make_phantom(kind, a.rows, a.cols, a.sparsity, a.seed)?;
    std::fs::create_dir_all(&a.out_dir).map_err(CliError::io(&a.out_dir))?;

    let mut files = Vec::with_capacity(a.count);
    for j in 0..a.count {
        let seed = derive_seed(a.seed, 0, j as u64);
        let img = make_phantom(kind, a.rows, a.cols, a.sparsity, seed)?;
        let name = format!("phantom_{j:04}.cmrimg");
        save_image(&a.out_dir.join(&name), &img)?;
        files.push(json!({ "file": name, "seed": seed }));
    }
    write_json(
        &a.out_dir.join("manifest.json"),
        &json!({
            "command": "phantom",
            "version": VERSION,
            "kind": kind,
            "rows": a.rows,
            "cols": a.cols,
            "count": a.count,
            "sparsity": a.sparsity,
            "seed": a.seed,
            "files": files,
            "timestamp": timestamp(a.timestamp),
        }),
    )
}

fn denoiser_for(choice: DenoiserChoice, sigma: f64) -> Denoiser {
    match choice {
        DenoiserChoice::Identity => Denoiser::Identity,
        DenoiserChoice::Wavelet => Denoiser::wavelet_for_sigma(sigma),
    }
}

pub fn greedy(a: &GreedyArgs) -> Result<()> {
    let data = load_dir(&a.train_dir)?;
    let (rows, cols) = data.images[0].shape();
    let family = SubsetFamily::new(rows, cols, a.family)?;
    let budget = a.budget.points(&family);
    let mut cfg = GreedyConfig::new(a.decoder.config()?, a.metric, family, budget).with_workers(a.workers.count());
    cfg.record_candidates = a.record_candidates;

    let noisy_regime = a.noise_sigma > 0.0 || a.denoiser.is_some();
    let (pattern, trace, denoiser) = if noisy_regime {
        let model = NoiseModel::new(a.noise_sigma, a.noise_seed)?;
        let noisy = add_noise_all(&data.images, &model)?;
        let denoiser = denoiser_for(a.denoiser.unwrap_or(DenoiserChoice::Wavelet), a.noise_sigma);
        let (p, t) = greedy_optimize_noisy(&cfg, &noisy, &denoiser)?;
        (p, t, Some(denoiser))
    } else {
        let (p, t) = greedy_optimize(&cfg, &data.images)?;
        (p, t, None)
    };

    write_text(&a.out_mask, &(MaskFile::from_pattern(&pattern, budget).to_json()? + "\n"))?;
    write_text(&a.out_trace, &trace.to_jsonl()?)?;
    write_json(
        &manifest_path(&a.out_mask),
        &json!({
            "command": "greedy",
            "version": VERSION,
            "train_dir": a.train_dir,
            "train_files": data.files,
            "regime": if noisy_regime { "noisy" } else { "noiseless" },
            "noise_sigma": a.noise_sigma,
            "noise_seed": a.noise_seed,
            "denoiser": denoiser,
            "decoder": cfg.decoder,
            "metric": cfg.metric,
            "family": a.family,
            "budget": budget,
            "initial_performance": trace.initial_performance,
            "final_performance": trace.records.last().map(|r| r.performance),
            "final_cost": pattern.cost(),
            "trace_file": a.out_trace,
            "timestamp": timestamp(a.timestamp),
        }),
    )
}

pub fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let (_, pattern) = read_mask(&a.mask)?;
    let data = load_dir(&a.test_dir)?;
    if data.images[0].shape() != pattern.shape() {
        return Err(CliError::Data(format!(
            "mask shape {:?} does not match test images {:?}",
            pattern.shape(),
            data.images[0].shape()
        )));
    }
    let metrics = if a.metrics.is_empty() {
        vec![PerformanceMeasure::psnr(), PerformanceMeasure::ssim(), PerformanceMeasure::NormalizedSq]
    } else {
        a.metrics.clone()
    };
    let decoder = a.decoder.config()?;

    let mut table: Vec<Vec<f64>> = Vec::with_capacity(data.images.len());
    for x in &data.images {
        let b = maskopt::subsample(&maskopt::fft2_unitary(x), &pattern)?;
        let recon = maskopt::decode(&decoder, &pattern, &b)?;
        table.push(metrics.iter().map(|m| m.evaluate(x, &recon)).collect::<maskopt::Result<_>>()?);
    }
    let means: Vec<f64> = (0..metrics.len())
        .map(|c| table.iter().map(|row| row[c]).sum::<f64>() / table.len() as f64)
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["file".to_string()];
    header.extend(metrics.iter().map(|m| m.name().to_string()));
    w.write_record(&header)?;
    for (file, row) in data.files.iter().zip(&table) {
        let mut rec = vec![file.clone()];
        rec.extend(row.iter().map(|v| format!("{v:?}")));
        w.write_record(&rec)?;
    }
    let mut rec = vec!["mean".to_string()];
    rec.extend(means.iter().map(|v| format!("{v:?}")));
    w.write_record(&rec)?;
    let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    write_text(&a.out_csv, &String::from_utf8_lossy(&bytes))?;
    write_json(
        &manifest_path(&a.out_csv),
        &json!({
            "command": "evaluate",
            "version": VERSION,
            "mask": a.mask,
            "test_dir": a.test_dir,
            "test_files": data.files,
            "decoder": decoder,
            "metrics": metrics,
            "timestamp": timestamp(a.timestamp),
        }),
    )
}

fn parse_center(s: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Usage(format!("invalid center `{s}` (expected DXxDY, e.g. 0x4)"));
    let (dx, dy) = s.split_once('x').ok_or_else(bad)?;
    Ok((dx.trim().parse().map_err(|_| bad())?, dy.trim().parse().map_err(|_| bad())?))
}

pub fn select(a: &SelectArgs) -> Result<()> {
    let data = load_dir(&a.train_dir)?;
    let decoder = a.decoder.config()?;
    let workers = a.workers.count();
    let report_path = a.report.clone().unwrap_or_else(|| {
        let mut name = a.out.file_name().unwrap_or_default().to_os_string();
        name.push(".csv");
        a.out.with_file_name(name)
    });

    let (winner, budget, csv_text, source) = if let Some(generator) = a.generator {
        let (rows, cols) = data.images[0].shape();
        let family = SubsetFamily::new(rows, cols, a.family)?;
        let budget = a
            .budget
            .ok_or_else(|| CliError::Usage("--budget is required with --generator".into()))?
            .points(&family);
        let reference = a
            .reference
            .as_deref()
            .map(|p| read_image(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))))
            .transpose()?;
        let grid = SweepGrid {
            generator,
            centers: a.centers.iter().map(|c| parse_center(c)).collect::<Result<_>>()?,
            degrees: a.degrees.clone(),
            seeds: a.seeds.clone(),
            reference,
        };
        let (winner, report) = parametric_sweep(&grid, family, budget, &data.images, &decoder, &a.metric, workers)?;
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        let source = json!({
            "generator": generator.as_str(),
            "centers": grid.centers,
            "degrees": grid.degrees,
            "seeds": grid.seeds,
            "reference": a.reference,
            "skipped": report.skipped,
        });
        (winner, budget, String::from_utf8_lossy(&buf).into_owned(), source)
    } else {
        let masks = a
            .mask_list
            .iter()
            .map(|p| read_mask(p))
            .collect::<Result<Vec<(MaskFile, SamplingPattern)>>>()?;
        let patterns: Vec<SamplingPattern> = masks.iter().map(|(_, p)| p.clone()).collect();
        for p in &patterns {
            if p.shape() != data.images[0].shape() {
                return Err(CliError::Data(format!(
                    "candidate shape {:?} does not match training images {:?}",
                    p.shape(),
                    data.images[0].shape()
                )));
            }
        }
        let sel = select_best(&patterns, &data.images, &decoder, &a.metric, workers)?;
        let mut order: Vec<usize> = (0..patterns.len()).collect();
        order.sort_by(|&x, &y| sel.scores[y].total_cmp(&sel.scores[x]).then(x.cmp(&y)));
        let mut rank = vec![0; patterns.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r + 1;
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["candidate_id", "file", "mean_score", "rank"])?;
        for (i, path) in a.mask_list.iter().enumerate() {
            w.write_record([
                i.to_string(),
                path.display().to_string(),
                format!("{:?}", sel.scores[i]),
                rank[i].to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
        let budget = masks[sel.winner].0.budget;
        let source = json!({ "mask_list": a.mask_list });
        (patterns[sel.winner].clone(), budget, String::from_utf8_lossy(&bytes).into_owned(), source)
    };

    write_text(&a.out, &(MaskFile::from_pattern(&winner, budget).to_json()? + "\n"))?;
    write_text(&report_path, &csv_text)?;
    write_json(
        &manifest_path(&a.out),
        &json!({
            "command": "select",
            "version": VERSION,
            "train_dir": a.train_dir,
            "train_files": data.files,
            "candidates": source,
            "decoder": decoder,
            "metric": a.metric,
            "family": a.family,
            "budget": budget,
            "report": report_path,
            "timestamp": timestamp(a.timestamp),
        }),
    )
}

fn parse_shape(s: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Usage(format!("invalid shape `{s}` (expected ROWSxCOLS)"));
    let (r, c) = s.split_once('x').ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

pub fn bound(a: &BoundArgs) -> Result<()> {
    let (rows, cols) = parse_shape(&a.shape)?;
    let family = SubsetFamily::new(rows, cols, a.family)?;
    let budget = a.budget.points(&family);
    let count = count_feasible(&family, CostFunction::Cardinality, budget as i64)?;
    let base = bound_noiseless(a.m, &count, a.delta)?;
    let mut out = json!({
        "log_A": count.log_cardinality,
        "feasible_set": count.description,
        "m": a.m,
        "delta": a.delta,
        "bound": base,
    });
    if let Some(sigma) = a.sigma {
        let model = NoiseModel::new(sigma, a.noise_seed)?;
        let denoiser = denoiser_for(a.denoiser, sigma);
        // residual of the denoiser on pure noise
        let residual = estimate_residual(&denoiser, &model, &ComplexImage::zeros(rows, cols), a.trials)?;
        let noisy = bound_noisy(a.m, &count, a.delta, a.lipschitz, residual.mean)?;
        out["sigma"] = json!(sigma);
        out["denoiser"] = json!(denoiser);
        out["L"] = json!(a.lipschitz);
        out["residual"] = json!(residual.mean);
        out["residual_std_error"] = json!(residual.std_error);
        out["trials"] = json!(a.trials);
        out["noisy_bound"] = json!(noisy);
    }
    println!("{}", serde_json::to_string(&out)?);
    Ok(())
}
