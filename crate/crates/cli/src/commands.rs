//! Subcommand bodies. Each returns the bytes of its primary output so the
//! caller decides where they go (file or stdout) and tests can compare them
//! directly.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use maclip::io::{fmt_sig, quantize, read_scores, scores_to_string};
use maclip::{
    evaluate, read_embeddings, read_mos, read_prompts, score_matrix, score_with_similarities, similarity_scores,
    EmbeddingMatrix, Error, EvalOptions, EvalReport, FixedWeights, Mode, MosTable, PromptPair, QualityRecord,
    ScoreConfig,
};

use crate::args::{AblateArgs, EvalArgs, PlotArgs, ScoreArgs, SortKey, SweepArgs};

/// Primary output of a subcommand plus what went into it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: String,
    pub config: Option<ScoreConfig>,
    pub inputs: Vec<(&'static str, PathBuf)>,
}

/// Largest number of λ values a grid may expand to.
pub const MAX_GRID_POINTS: usize = 100_000;

fn load_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    let m = read_embeddings(path).with_context(|| format!("reading embeddings {}", path.display()))?;
    info!("{}: {} rows, D={}", path.display(), m.len(), m.dim());
    Ok(m)
}

fn load_prompts(path: Option<&Path>) -> Result<Option<PromptPair>> {
    path.map(|p| read_prompts(p).with_context(|| format!("reading prompts {}", p.display())))
        .transpose()
}

fn load_mos(path: &Path) -> Result<MosTable> {
    read_mos(path).with_context(|| format!("reading MOS {}", path.display()))
}

fn load_scores(path: &Path) -> Result<Vec<QualityRecord>> {
    read_scores(path).with_context(|| format!("reading scores {}", path.display()))
}

/// Rounds every float of a record to what its CSV text would parse back to,
/// so in-memory evaluation agrees bit-for-bit with `score` followed by `eval`.
pub fn quantize_record(r: &QualityRecord) -> QualityRecord {
    QualityRecord {
        id: r.id.clone(),
        q_sim: r.q_sim.map(quantize),
        q_mag: quantize(r.q_mag),
        w_sim: quantize(r.w_sim),
        w_mag: quantize(r.w_mag),
        q: quantize(r.q),
        degenerate: r.degenerate,
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

fn opt_sig(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn score(args: &ScoreArgs) -> Result<Outcome> {
    let config = args.config.resolve()?;
    if config.mode.needs_prompts() && args.prompts.is_none() {
        return Err(Error::PromptsRequired { mode: config.mode.as_str() }.into());
    }
    let images = load_embeddings(&args.embeddings)?;
    let prompts = load_prompts(args.prompts.as_deref())?;
    let records = score_matrix(&images, prompts.as_ref(), &config, args.jobs)?;
    let degenerate = records.iter().filter(|r| r.degenerate).count();
    if degenerate > 0 {
        warn!("{degenerate} rows have a near-constant magnitude profile");
    }
    let mut inputs = vec![("embeddings", args.embeddings.clone())];
    if let Some(p) = &args.prompts {
        inputs.push(("prompts", p.clone()));
    }
    Ok(Outcome {
        body: scores_to_string(&records),
        config: Some(config),
        inputs,
    })
}

pub fn report_json(report: &EvalReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&report.rounded())?;
    s.push('\n');
    Ok(s)
}

pub fn eval(args: &EvalArgs) -> Result<Outcome> {
    let config = args.config.resolve()?;
    let records = load_scores(&args.scores)?;
    let mos = load_mos(&args.mos)?;
    let report = evaluate(
        &records,
        &mos,
        &EvalOptions {
            logistic: args.logistic,
            config,
        },
    )?;
    for w in &report.warnings {
        warn!("{w}");
    }
    Ok(Outcome {
        body: report_json(&report)?,
        config: Some(config),
        inputs: vec![("scores", args.scores.clone()), ("mos", args.mos.clone())],
    })
}

/// Expands `START:STOP:STEP` into an inclusive list of λ values.
///
/// Points are computed as `start + k·step` and snapped to 12 decimals so
/// `0:2:0.1` yields exactly `0.3` rather than `0.30000000000000004`.
pub fn parse_grid(grid: &str) -> maclip::Result<Vec<f64>> {
    let bad = |why: &str| Error::InvalidConfig(format!("invalid grid {grid:?}: {why}"));
    let parts: Vec<&str> = grid.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(bad("expected START:STOP:STEP"));
    };
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let (Some(start), Some(stop), Some(step)) = (num(start), num(stop), num(step)) else {
        return Err(bad("bounds and step must be finite numbers"));
    };
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("stop is below start"));
    }
    let span = (stop - start) / step;
    if span >= MAX_GRID_POINTS as f64 {
        return Err(bad("too many grid points"));
    }
    let n = (span + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Evaluates one configuration against MOS exactly as `score | eval` would.
fn evaluate_config(
    images: &EmbeddingMatrix,
    sims: Option<&[f64]>,
    mos: &MosTable,
    config: ScoreConfig,
    logistic: bool,
    jobs: Option<usize>,
) -> Result<EvalReport> {
    let records: Vec<QualityRecord> = score_with_similarities(images, sims, &config, jobs)?
        .iter()
        .map(quantize_record)
        .collect();
    let report = evaluate(&records, mos, &EvalOptions { logistic, config })?;
    Ok(report.rounded())
}

pub fn sweep_lambda(args: &SweepArgs) -> Result<Outcome> {
    let config = args.config.resolve()?;
    let grid = parse_grid(&args.grid)?;
    if config.mode.needs_prompts() && args.prompts.is_none() {
        return Err(Error::PromptsRequired { mode: config.mode.as_str() }.into());
    }
    let images = load_embeddings(&args.embeddings)?;
    let prompts = load_prompts(args.prompts.as_deref())?;
    let mos = load_mos(&args.mos)?;
    let sims = prompts
        .as_ref()
        .map(|p| similarity_scores(&images, p, &config, args.jobs))
        .transpose()?;

    let mut w = csv_writer();
    w.write_record(["lambda", "srcc", "plcc_raw"])?;
    for &lambda in &grid {
        let report = evaluate_config(&images, sims.as_deref(), &mos, config.with_lambda(lambda), false, args.jobs)
            .with_context(|| format!("lambda = {lambda}"))?;
        info!("lambda {lambda}: srcc {}", report.srcc);
        w.write_record([fmt_sig(lambda), fmt_sig(report.srcc), fmt_sig(report.plcc_raw)])?;
    }
    let mut inputs = vec![("embeddings", args.embeddings.clone())];
    if let Some(p) = &args.prompts {
        inputs.push(("prompts", p.clone()));
    }
    inputs.push(("mos", args.mos.clone()));
    Ok(Outcome {
        body: finish(w)?,
        config: Some(config),
        inputs,
    })
}

/// The configurations compared by `ablate`, in output order.
pub fn ablation_grid(base: &ScoreConfig) -> Vec<(String, ScoreConfig)> {
    let mut rows: Vec<(String, ScoreConfig)> = [Mode::Sim, Mode::Mag, Mode::L1, Mode::L2, Mode::Fused]
        .into_iter()
        .map(|m| (m.as_str().to_string(), base.with_mode(m)))
        .collect();
    for (a, b) in [(0.8, 0.2), (0.2, 0.8), (0.5, 0.5)] {
        let mut c = base.with_mode(Mode::Fixed);
        c.fixed_weights = FixedWeights { w_sim: a, w_mag: b };
        rows.push((format!("fixed-{a}-{b}"), c));
    }
    rows
}

pub fn ablate(args: &AblateArgs) -> Result<Outcome> {
    let config = args.config.resolve()?;
    let images = load_embeddings(&args.embeddings)?;
    let prompts = read_prompts(&args.prompts).with_context(|| format!("reading prompts {}", args.prompts.display()))?;
    let mos = load_mos(&args.mos)?;
    let sims = similarity_scores(&images, &prompts, &config, args.jobs)?;

    let mut w = csv_writer();
    let mut header = vec!["config", "srcc", "plcc_raw"];
    if args.logistic {
        header.push("plcc_logistic");
    }
    w.write_record(&header)?;
    for (name, c) in ablation_grid(&config) {
        let report = evaluate_config(&images, Some(&sims), &mos, c, args.logistic, args.jobs)
            .with_context(|| format!("ablation row {name}"))?;
        for warning in &report.warnings {
            warn!("{name}: {warning}");
        }
        let mut row = vec![name, fmt_sig(report.srcc), fmt_sig(report.plcc_raw)];
        if args.logistic {
            row.push(opt_sig(report.plcc_logistic));
        }
        w.write_record(&row)?;
    }
    Ok(Outcome {
        body: finish(w)?,
        config: Some(config),
        inputs: vec![
            ("embeddings", args.embeddings.clone()),
            ("prompts", args.prompts.clone()),
            ("mos", args.mos.clone()),
        ],
    })
}

pub fn plot_data(args: &PlotArgs) -> Result<Outcome> {
    let records = load_scores(&args.scores)?;
    let mos = load_mos(&args.mos)?;
    let mut rows: Vec<(&QualityRecord, f64)> =
        records.iter().filter_map(|r| mos.get(&r.id).map(|m| (r, m))).collect();
    if rows.is_empty() {
        warn!("no image id appears in both {} and {}", args.scores.display(), args.mos.display());
    }
    match args.sort {
        Some(SortKey::Id) => rows.sort_by(|a, b| a.0.id.cmp(&b.0.id)),
        Some(SortKey::Mos) => rows.sort_by(|a, b| a.1.total_cmp(&b.1)),
        Some(SortKey::Q) => rows.sort_by(|a, b| a.0.q.total_cmp(&b.0.q)),
        None => {}
    }
    let mut w = csv_writer();
    w.write_record(["image_id", "mos", "q_sim", "q"])?;
    for (r, m) in rows {
        w.write_record([r.id.clone(), fmt_sig(m), opt_sig(r.q_sim), fmt_sig(r.q)])?;
    }
    Ok(Outcome {
        body: finish(w)?,
        config: None,
        inputs: vec![("scores", args.scores.clone()), ("mos", args.mos.clone())],
    })
}
