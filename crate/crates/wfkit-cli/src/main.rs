//! `wfkit`: one executable exposing every toolkit operation as a
//! subcommand. Exit codes: 0 on success, 1 on validation errors (invalid
//! wireframes, mismatched datasets, bad flags), 2 on I/O errors (missing or
//! corrupt files). Identical inputs, flags, and seed produce byte-identical
//! output files.

mod args;
mod eval;
mod report;

use args::{Cli, Command, EvalCommand};
use clap::error::ErrorKind;
use clap::Parser;
use report::{hash_file, hash_json_dir, InputHash, RunReport};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;
use wfkit::io::{format_sig6, IoError};
use wfkit::junction_codec::{decode_topk, encode, JunctionMaps};
use wfkit::loi_pool::{loi_pool_forward, LoiConfig};
use wfkit::model::{Point2, ScoredLine, Wireframe, CANONICAL_EXTENT};
use wfkit::postprocess::{resolve_overlaps, OverlapConfig};
use wfkit::sampler::{sample_dynamic, sample_static, static_negatives, LabeledLine};
use wfkit::synth::{degrade, gen_scene, DegradeSpec, Layout, SceneSpec};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    pub fn from_io_error(path: &Path, e: IoError) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

struct Outcome {
    inputs: Vec<InputHash>,
    config: BTreeMap<String, String>,
    metrics: BTreeMap<String, f64>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { inputs: Vec::new(), config: BTreeMap::new(), metrics: BTreeMap::new() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let started = Instant::now();
    let command_name = command_name(&cli.command);
    match dispatch(&cli) {
        Ok(outcome) => {
            if let Some(path) = &cli.json_report {
                let report = RunReport {
                    command: command_name,
                    inputs: outcome.inputs,
                    config: outcome.config,
                    metrics: outcome.metrics,
                    wall_time_s: started.elapsed().as_secs_f64(),
                };
                if let Err(e) = report::write_report(&report, path) {
                    eprintln!("error: cannot write report {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Encode { .. } => "encode",
        Command::Decode { .. } => "decode",
        Command::Sample { .. } => "sample",
        Command::Loipool { .. } => "loipool",
        Command::Eval(EvalCommand::Sap { .. }) => "eval sap",
        Command::Eval(EvalCommand::Jmap { .. }) => "eval jmap",
        Command::Eval(EvalCommand::Aph { .. }) => "eval aph",
        Command::Postprocess { .. } => "postprocess",
        Command::Synth { .. } => "synth",
        Command::Degrade { .. } => "degrade",
    }
    .to_string()
}

fn read_valid_wireframe(path: &Path) -> Result<Wireframe, CliError> {
    let w = wfkit::io::read_wireframe(path).map_err(|e| CliError::from_io_error(path, e))?;
    let violations = w.validate();
    if !violations.is_empty() {
        let detail: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Validation(format!(
            "{}: invalid wireframe: {}",
            path.display(),
            detail.join("; ")
        )));
    }
    Ok(w)
}

fn write_wireframe(w: &Wireframe, path: &Path) -> Result<(), CliError> {
    wfkit::io::write_wireframe(w, path).map_err(|e| CliError::from_io_error(path, e))
}

fn hash_input(path: &Path) -> Result<InputHash, CliError> {
    hash_file(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn hash_dir_input(path: &Path) -> Result<InputHash, CliError> {
    hash_json_dir(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Rebuilds a wireframe from scored lines, deduplicating exactly
/// coincident endpoints.
fn wireframe_from_lines(width: f64, height: f64, lines: &[ScoredLine]) -> Wireframe {
    let mut junctions: Vec<Point2> = Vec::new();
    let mut index: std::collections::HashMap<(u64, u64), usize> = std::collections::HashMap::new();
    let mut intern = |p: Point2| -> usize {
        let key = (p.x.to_bits(), p.y.to_bits());
        *index.entry(key).or_insert_with(|| {
            junctions.push(p);
            junctions.len() - 1
        })
    };
    let mut edges = Vec::new();
    let mut scores = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for line in lines {
        let i = intern(line.p1);
        let j = intern(line.p2);
        if i == j {
            continue;
        }
        let pair = if i < j { (i, j) } else { (j, i) };
        if seen.insert(pair) {
            edges.push(pair);
            scores.push(line.score);
        }
    }
    Wireframe::new(width, height, junctions, edges).with_line_scores(scores)
}

#[derive(Serialize)]
struct SampleDoc {
    p1: [f64; 2],
    p2: [f64; 2],
    label: wfkit::sampler::Label,
    origin: wfkit::sampler::Origin,
}

fn write_samples(samples: &[LabeledLine], path: &Path) -> Result<(), CliError> {
    let docs: Vec<SampleDoc> = samples
        .iter()
        .map(|s| SampleDoc {
            p1: [s.line.p1.x, s.line.p1.y],
            p2: [s.line.p2.x, s.line.p2.y],
            label: s.label,
            origin: s.origin,
        })
        .collect();
    let mut body = serde_json::to_string_pretty(&docs).expect("sample serialization");
    body.push('\n');
    std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_pr_csv(
    curves: &[(String, wfkit::pr::PRCurve)],
    path: &Path,
) -> Result<(), CliError> {
    wfkit::io::write_pr_csv(curves, path).map_err(|e| CliError::from_io_error(path, e))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Encode { input, bins, out_j, out_o } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_input(input)?);
            outcome.config.insert("bins".into(), format!("{}x{}", bins.0, bins.1));
            let w = read_valid_wireframe(input)?;
            let maps = encode(&w, *bins).map_err(|e| CliError::Validation(e.to_string()))?;
            wfkit::io::write_tensor(&maps.j.into(), out_j)
                .map_err(|e| CliError::from_io_error(out_j, e))?;
            wfkit::io::write_tensor(&maps.o.into(), out_o)
                .map_err(|e| CliError::from_io_error(out_o, e))?;
            Ok(outcome)
        }
        Command::Decode { j, o, k, out } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_input(j)?);
            outcome.inputs.push(hash_input(o)?);
            outcome.config.insert("k".into(), k.to_string());
            let j_grid = wfkit::io::read_tensor(j)
                .map_err(|e| CliError::from_io_error(j, e))?
                .into_grid2()
                .ok_or_else(|| {
                    CliError::Validation(format!("{}: expected a rank-2 likelihood grid", j.display()))
                })?;
            let o_grid = wfkit::io::read_tensor(o)
                .map_err(|e| CliError::from_io_error(o, e))?
                .into_grid3()
                .ok_or_else(|| {
                    CliError::Validation(format!("{}: expected a rank-3 offset grid", o.display()))
                })?;
            let maps = JunctionMaps { j: j_grid, o: o_grid };
            if !maps.is_consistent() {
                return Err(CliError::Validation(
                    "likelihood and offset grids have mismatched shapes".into(),
                ));
            }
            let bins_w = maps.j.width() as f64;
            let bins_h = maps.j.height() as f64;
            let decoded = decode_topk(&maps, *k);
            let mut w = Wireframe::new(
                bins_w,
                bins_h,
                decoded.iter().map(|s| s.p).collect(),
                vec![],
            );
            w.junction_scores = Some(decoded.iter().map(|s| s.score).collect());
            write_wireframe(&w, out)?;
            Ok(outcome)
        }
        Command::Sample { gt, pred, seed, out, sampler } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_input(gt)?);
            if let Some(p) = pred {
                outcome.inputs.push(hash_input(p)?);
            }
            outcome.config.insert("seed".into(), seed.to_string());
            outcome.config.insert("eta".into(), sampler.eta.to_string());
            let cfg = sampler.to_config();
            cfg.validate().map_err(|e| CliError::Validation(e.to_string()))?;
            let gt_w = read_valid_wireframe(gt)?.rescaled(CANONICAL_EXTENT, CANONICAL_EXTENT);
            let mut samples = sample_static(&gt_w, &cfg, *seed);
            if let Some(pred_path) = pred {
                let pred_w = read_valid_wireframe(pred_path)?
                    .rescaled(CANONICAL_EXTENT, CANONICAL_EXTENT);
                let pred_junctions: Vec<_> = pred_w
                    .junctions
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| wfkit::junction_codec::ScoredJunction {
                        p,
                        score: pred_w.junction_scores.as_ref().map_or(1.0, |s| s[i]),
                    })
                    .collect();
                let pool = static_negatives(&gt_w, &cfg);
                samples.extend(sample_dynamic(&pred_junctions, &gt_w, &pool, &cfg, *seed));
            }
            write_samples(&samples, out)?;
            Ok(outcome)
        }
        Command::Loipool { fm, line, np, stride } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_input(fm)?);
            outcome.config.insert("np".into(), np.to_string());
            outcome.config.insert("stride".into(), stride.to_string());
            if line.len() != 4 {
                return Err(CliError::Validation(format!(
                    "--line needs x1,y1,x2,y2 (got {} values)",
                    line.len()
                )));
            }
            let cfg = LoiConfig { n_points: *np, pool_stride: *stride };
            cfg.validate().map_err(|e| CliError::Validation(e.to_string()))?;
            let map = wfkit::io::read_tensor(fm)
                .map_err(|e| CliError::from_io_error(fm, e))?
                .into_grid3()
                .ok_or_else(|| {
                    CliError::Validation(format!("{}: expected a rank-3 feature map", fm.display()))
                })?;
            let segment = (Point2::new(line[0], line[1]), Point2::new(line[2], line[3]));
            let feature = loi_pool_forward(&map, segment, &cfg);
            let rendered: Vec<String> = feature.values.iter().map(|&v| format_sig6(v)).collect();
            println!("{}", rendered.join(" "));
            Ok(outcome)
        }
        Command::Eval(eval_cmd) => run_eval(eval_cmd, cli.threads),
        Command::Postprocess { input, out, eta_s } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_input(input)?);
            outcome.config.insert("eta_s".into(), eta_s.to_string());
            if eta_s.is_nan() || *eta_s <= 0.0 {
                return Err(CliError::Validation("eta-s must be positive".into()));
            }
            let w = read_valid_wireframe(input)?;
            let lines = w.to_scored_lines().expect("validated");
            let kept = resolve_overlaps(&lines, (w.width, w.height), &OverlapConfig { eta_s: *eta_s });
            let cleaned = wireframe_from_lines(w.width, w.height, &kept);
            write_wireframe(&cleaned, out)?;
            Ok(outcome)
        }
        Command::Synth { seed, layout, junctions, lines, min_length, out } => {
            let mut outcome = Outcome::new();
            outcome.config.insert("seed".into(), seed.to_string());
            outcome.config.insert("junctions".into(), junctions.to_string());
            outcome.config.insert("min_length".into(), min_length.to_string());
            let layout: Layout = (*layout).into();
            let n_lines = lines.unwrap_or_else(|| default_line_count(layout, *junctions));
            outcome.config.insert("lines".into(), n_lines.to_string());
            let spec = SceneSpec {
                seed: *seed,
                n_junctions: *junctions,
                n_lines,
                min_length: *min_length,
                layout,
            };
            let scene = gen_scene(&spec).map_err(|e| CliError::Validation(e.to_string()))?;
            write_wireframe(&scene, out)?;
            Ok(outcome)
        }
        Command::Degrade { mode, input, param, seed, out } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_input(input)?);
            outcome.config.insert("param".into(), param.to_string());
            outcome.config.insert("seed".into(), seed.to_string());
            let spec = DegradeSpec { mode: (*mode).into(), param: *param };
            spec.validate().map_err(|e| CliError::Validation(e.to_string()))?;
            let w = read_valid_wireframe(input)?;
            write_wireframe(&degrade(&w, &spec, *seed), out)?;
            Ok(outcome)
        }
    }
}

fn default_line_count(layout: Layout, junctions: usize) -> usize {
    match layout {
        Layout::Grid => {
            let side = (junctions as f64).sqrt().round() as usize;
            2 * side * side.saturating_sub(1)
        }
        Layout::Boxes => junctions,
        Layout::Random => (2 * junctions).min(junctions.saturating_mul(junctions.saturating_sub(1)) / 2),
    }
}

fn run_eval(cmd: &EvalCommand, threads: Option<usize>) -> Result<Outcome, CliError> {
    let pool = eval::thread_pool(threads)?;
    match cmd {
        EvalCommand::Sap { theta, gt, pred, pr_out } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_dir_input(gt)?);
            outcome.inputs.push(hash_dir_input(pred)?);
            outcome.config.insert(
                "theta".into(),
                theta.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
            );
            let images = eval::load_pairs(gt, pred)?;
            let curves = eval::eval_sap(&images, theta, &pool)?;
            for (t, curve) in &curves {
                println!("sAP@{t} = {}", format_sig6(curve.ap));
                outcome.metrics.insert(format!("sAP@{t}"), curve.ap);
            }
            if let Some(path) = pr_out {
                let labeled: Vec<(String, wfkit::pr::PRCurve)> =
                    curves.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
                write_pr_csv(&labeled, path)?;
            }
            Ok(outcome)
        }
        EvalCommand::Jmap { tau, gt, pred, pr_out } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_dir_input(gt)?);
            outcome.inputs.push(hash_dir_input(pred)?);
            outcome.config.insert(
                "tau".into(),
                tau.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
            );
            let images = eval::load_pairs(gt, pred)?;
            let (curves, mean) = eval::eval_jmap(&images, tau, &pool)?;
            for (t, curve) in &curves {
                println!("APJ@{t} = {}", format_sig6(curve.ap));
                outcome.metrics.insert(format!("APJ@{t}"), curve.ap);
            }
            println!("mAPJ = {}", format_sig6(mean));
            outcome.metrics.insert("mAPJ".into(), mean);
            if let Some(path) = pr_out {
                let mut labeled: Vec<(String, wfkit::pr::PRCurve)> =
                    curves.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
                // The mean is reported as a point-free summary entry.
                labeled.push((
                    "mean".to_string(),
                    wfkit::pr::PRCurve { points: vec![], ap: mean },
                ));
                write_pr_csv(&labeled, path)?;
            }
            Ok(outcome)
        }
        EvalCommand::Aph { gt, pred, resolution, tolerance, pr_out } => {
            let mut outcome = Outcome::new();
            outcome.inputs.push(hash_dir_input(gt)?);
            outcome.inputs.push(hash_dir_input(pred)?);
            outcome.config.insert("resolution".into(), resolution.to_string());
            let mut cfg = wfkit::metrics_heatmap::HeatmapEvalConfig::for_resolution(*resolution);
            if let Some(t) = tolerance {
                cfg.tolerance = *t;
            }
            outcome.config.insert("tolerance".into(), cfg.tolerance.to_string());
            let images = eval::load_pairs(gt, pred)?;
            let scores = eval::eval_aph(&images, &cfg, &pool)?;
            println!("APH = {}", format_sig6(scores.ap_h));
            println!("FH = {}", format_sig6(scores.f_h));
            outcome.metrics.insert("APH".into(), scores.ap_h);
            outcome.metrics.insert("FH".into(), scores.f_h);
            if let Some(path) = pr_out {
                write_pr_csv(&[("aph".to_string(), scores.curve.clone())], path)?;
                // The best F-score rides along as a trailing comment.
                use std::io::Write;
                let mut file = std::fs::OpenOptions::new()
                    .append(true)
                    .open(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                writeln!(file, "# fh F={}", format_sig6(scores.f_h))
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(outcome)
        }
    }
}
