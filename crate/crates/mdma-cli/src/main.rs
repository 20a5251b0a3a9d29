//! `mdma`: build block-structured attention masks, run masked attention,
//! extract and propagate object masks, and score synthetic scenes.
//!
//! Exit codes: 0 on success, 2 on usage errors (unknown flags, missing
//! required arguments), 1 on validation or runtime errors. Diagnostics go to
//! standard error; data goes only to files named by flags or to standard
//! output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mdma_kit::attention::{masked_attention, MaskMode, ProjectedTokens};
use mdma_kit::config::{self, PartialConfig, RunConfig};
use mdma_kit::dmem::{extract_training_mask, TextQuerySelection};
use mdma_kit::harness::metrics::{flow_fidelity_tracks, mask_iou};
use mdma_kit::harness::scenario::FlowField;
use mdma_kit::harness::simulate::simulate;
use mdma_kit::io::{read_tensor, write_tensor};
use mdma_kit::layout::{
    mask_tracks_from_tensor, mask_tracks_to_tensor, SpatialMask, TokenLayout,
};
use mdma_kit::mask::{assemble, AssembleOptions, Phase};
use mdma_kit::pgm::{grayscale, mask_overlay, write_pgm};
use mdma_kit::rmpm::{
    dynamic_update, mask_difference, propagate_all, DynamicState, FeatureSequence, MaskTrack,
};
use mdma_kit::tensor::{BinaryMatrix, Tensor};

#[derive(Parser)]
#[command(
    name = "mdma",
    version,
    about = "Block-structured attention masks, mask propagation, and scene metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the dense attention mask for a token layout and object masks
    BuildMask(BuildMaskArgs),
    /// Run masked multi-head attention over projected Q/K/V tokens
    Attend(AttendArgs),
    /// Extract per-frame object masks from text-to-video attention
    ExtractTrainMask(ExtractArgs),
    /// Propagate first-frame object masks through a feature sequence
    Propagate(PropagateArgs),
    /// Generate a synthetic scene, track its objects, and report scores
    Simulate(SimulateArgs),
    /// Score mask tracks against a reference (overlap and motion fidelity)
    Metrics(MetricsArgs),
    /// Render a tensor slice as a grayscale PGM image
    Render(RenderArgs),
    /// Print the tool version
    Version,
}

/// Settings shared by every subcommand: an optional JSON config file whose
/// values fill in for absent flags (flags always win; `MDMA_SEED` fills the
/// seed when neither flag nor file sets it).
#[derive(Args)]
struct Common {
    /// JSON config file with default values for the flags of this command
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

impl Common {
    fn resolve(&self, flags: PartialConfig) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => Some(
                PartialConfig::load(path)
                    .with_context(|| format!("reading config {}", path.display()))?,
            ),
            None => None,
        };
        let env = match std::env::var_os("MDMA_SEED") {
            None => None,
            Some(raw) => {
                let s = raw.to_str().context("MDMA_SEED is not valid UTF-8")?;
                config::seed_from_env(Some(s))?
            }
        };
        Ok(config::resolve(&flags, file.as_ref(), env)?)
    }
}

#[derive(Args)]
struct BuildMaskArgs {
    /// Token layout JSON file
    #[arg(long, value_name = "FILE")]
    layout: PathBuf,
    /// Object mask tracks, a [objects, frames, grid_h, grid_w] tensor
    #[arg(long, value_name = "FILE")]
    masks: PathBuf,
    /// Phase to build for: training or inference
    #[arg(long, value_name = "PHASE")]
    mode: Phase,
    /// Output path for the dense [tokens, tokens] mask tensor
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also render the dense mask as a grayscale PGM
    #[arg(long, value_name = "FILE")]
    render: Option<PathBuf>,
    /// Inference only: build the video-to-video block as a literal identity
    #[arg(long)]
    literal_identity_v2v: bool,
    /// Inference only: zero text-to-video rows for non-motion text
    #[arg(long)]
    literal_t2v: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct AttendArgs {
    /// Projected tokens, a [3, heads, tokens, dim] Q/K/V tensor
    #[arg(long, value_name = "FILE")]
    tokens: PathBuf,
    /// Dense binary attention mask, a [tokens, tokens] tensor
    #[arg(long, value_name = "FILE")]
    mask: PathBuf,
    /// Masking rule: neg_inf, mul_logits, or mul_probs
    #[arg(long, value_name = "MODE")]
    mode: Option<MaskMode>,
    /// Output path for the [heads, tokens, dim] attention output
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ExtractArgs {
    /// Projected tokens, a [3, heads, tokens, dim] Q/K/V tensor
    #[arg(long, value_name = "FILE")]
    tokens: PathBuf,
    /// Comma-separated text token indices standing in for the object
    #[arg(long, value_name = "LIST")]
    select: String,
    /// Token layout JSON file
    #[arg(long, value_name = "FILE")]
    layout: PathBuf,
    /// Object the selection describes (bounds-checked against the layout)
    #[arg(long, default_value_t = 0)]
    object: usize,
    /// Output path for the [1, frames, grid_h, grid_w] mask tensor
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PropagateArgs {
    /// Feature sequence, a [frames, grid_h, grid_w, channels] tensor
    #[arg(long, value_name = "FILE", required_unless_present = "dynamic", conflicts_with = "dynamic")]
    features: Option<PathBuf>,
    /// First-frame object masks: [objects, grid_h, grid_w] or [objects, 1, grid_h, grid_w]
    #[arg(long, value_name = "FILE")]
    first_masks: PathBuf,
    /// Anchor window capacity
    #[arg(long)]
    window: Option<usize>,
    /// Re-propagate per denoising step, freezing once masks settle
    #[arg(long, requires = "schedule")]
    dynamic: bool,
    /// Freeze threshold on the fraction of changed mask cells
    #[arg(long)]
    alpha: Option<f64>,
    /// JSON array of per-step feature tensor paths (resolved relative to
    /// this file), one entry per denoising step
    #[arg(long, value_name = "FILE")]
    schedule: Option<PathBuf>,
    /// Worker threads for independent objects
    #[arg(long)]
    jobs: Option<usize>,
    /// Output path for the [objects, frames, grid_h, grid_w] track tensor
    #[arg(long, value_name = "FILE", required_unless_present = "dynamic")]
    out: Option<PathBuf>,
    /// Dynamic mode: write a JSON report of freezes and propagation calls
    #[arg(long, value_name = "FILE", requires = "dynamic")]
    report: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of objects
    #[arg(long)]
    objects: Option<usize>,
    /// Number of frames
    #[arg(long)]
    frames: Option<usize>,
    /// Latent grid as HxW, e.g. 16x16
    #[arg(long, value_name = "HxW")]
    grid: Option<String>,
    /// Number of denoising steps
    #[arg(long)]
    steps: Option<usize>,
    /// Freeze threshold on the fraction of changed mask cells
    #[arg(long)]
    alpha: Option<f64>,
    /// Anchor window capacity
    #[arg(long)]
    window: Option<usize>,
    /// Masking rule for the isolation probe: neg_inf, mul_logits, mul_probs
    #[arg(long, value_name = "MODE")]
    mode: Option<MaskMode>,
    /// Feature channels per cell
    #[arg(long)]
    channels: Option<usize>,
    /// 1-based step at which additive noise first reaches zero
    #[arg(long)]
    convergence_step: Option<usize>,
    /// Noise scale at the first step
    #[arg(long)]
    noise_sigma: Option<f32>,
    /// Attention heads in the probe fixture
    #[arg(long)]
    heads: Option<usize>,
    /// Head dimension in the probe fixture
    #[arg(long)]
    head_dim: Option<usize>,
    /// Worker threads for independent objects
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the JSON report here instead of standard output
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Write per-object, per-frame PGM overlays of truth vs tracked masks
    #[arg(long, value_name = "DIR")]
    render_dir: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct MetricsArgs {
    /// Mask tracks to score, a [objects, frames, grid_h, grid_w] tensor
    #[arg(long, value_name = "FILE")]
    tracks: PathBuf,
    /// Reference mask tracks of the same shape
    #[arg(long, value_name = "FILE")]
    tracks_ref: PathBuf,
    /// Flow fields for --tracks, a [frames-1, grid_h, grid_w, 2] tensor
    #[arg(long, value_name = "FILE", requires = "flows_ref")]
    flows: Option<PathBuf>,
    /// Flow fields for --tracks-ref, same shape as --flows
    #[arg(long, value_name = "FILE", requires = "flows")]
    flows_ref: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RenderArgs {
    /// Tensor to render (2-D directly; pick slices of 3-D/4-D tensors)
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Frame index for 3-D [frames, h, w] and 4-D [objects, frames, h, w]
    #[arg(long)]
    frame: Option<usize>,
    /// Object index for 4-D [objects, frames, h, w]
    #[arg(long)]
    object: Option<usize>,
    /// Output PGM path
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::BuildMask(args) => build_mask(args),
        Command::Attend(args) => attend(args),
        Command::ExtractTrainMask(args) => extract(args),
        Command::Propagate(args) => propagate(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Metrics(args) => metrics(args),
        Command::Render(args) => render(args),
        Command::Version => {
            println!("{}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn read_layout(path: &Path) -> Result<TokenLayout> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading layout {}", path.display()))?;
    TokenLayout::from_json(&text).with_context(|| format!("parsing layout {}", path.display()))
}

fn read_tensor_at(path: &Path) -> Result<Tensor> {
    read_tensor(path).with_context(|| format!("reading tensor {}", path.display()))
}

fn write_tensor_at(path: &Path, tensor: &Tensor) -> Result<()> {
    write_tensor(path, tensor).with_context(|| format!("writing tensor {}", path.display()))
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing report {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn build_mask(args: BuildMaskArgs) -> Result<()> {
    let resolved = args.common.resolve(PartialConfig {
        literal_identity_v2v: args.literal_identity_v2v.then_some(true),
        literal_t2v: args.literal_t2v.then_some(true),
        ..Default::default()
    })?;
    let layout = read_layout(&args.layout)?;
    let tracks = mask_tracks_from_tensor(&read_tensor_at(&args.masks)?)?;
    let mask = assemble(
        &layout,
        &tracks,
        args.mode,
        AssembleOptions {
            literal_identity_v2v: resolved.literal_identity_v2v,
            literal_t2v: resolved.literal_t2v,
        },
    )?;
    let dense = mask.dense_tensor()?;
    write_tensor_at(&args.out, &dense)?;
    if let Some(render_path) = &args.render {
        let total = layout.total();
        write_pgm(render_path, total, total, &grayscale(dense.data()))
            .with_context(|| format!("writing render {}", render_path.display()))?;
    }
    Ok(())
}

fn attend(args: AttendArgs) -> Result<()> {
    let resolved = args.common.resolve(PartialConfig {
        mode: args.mode,
        ..Default::default()
    })?;
    let tokens = ProjectedTokens::from_tensor(&read_tensor_at(&args.tokens)?)?;
    let mask_tensor = read_tensor_at(&args.mask)?;
    let dims = mask_tensor.dims().to_vec();
    if dims.len() != 2 {
        bail!("mask tensor must be 2-D [tokens, tokens], got {dims:?}");
    }
    let mask = BinaryMatrix::from_f32(dims[0], dims[1], mask_tensor.data())?;
    let out = masked_attention(&tokens, &mask, resolved.mode)?;
    write_tensor_at(&args.out, &out)
}

fn extract(args: ExtractArgs) -> Result<()> {
    args.common.resolve(PartialConfig::default())?;
    let layout = read_layout(&args.layout)?;
    let tokens = ProjectedTokens::from_tensor(&read_tensor_at(&args.tokens)?)?;
    let indices = args
        .select
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .with_context(|| format!("bad --select entry {part:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let selection = TextQuerySelection::new(args.object, indices);
    let masks = extract_training_mask(&tokens, &selection, &layout)?;
    write_tensor_at(&args.out, &mask_tracks_to_tensor(&[masks])?)
}

/// Reads first-frame masks from a `[objects, grid_h, grid_w]` tensor or a
/// single-frame `[objects, 1, grid_h, grid_w]` track tensor.
fn read_first_masks(path: &Path) -> Result<Vec<SpatialMask>> {
    let tensor = read_tensor_at(path)?;
    let dims = tensor.dims().to_vec();
    let tracks = match dims.len() {
        3 => {
            let reshaped = Tensor::new(
                vec![dims[0], 1, dims[1], dims[2]],
                tensor.data().to_vec(),
            )?;
            mask_tracks_from_tensor(&reshaped)?
        }
        4 if dims[1] == 1 => mask_tracks_from_tensor(&tensor)?,
        _ => bail!(
            "first masks must be [objects, grid_h, grid_w] or [objects, 1, grid_h, grid_w], got {dims:?}"
        ),
    };
    Ok(tracks.into_iter().map(|mut t| t.remove(0)).collect())
}

fn read_features(path: &Path) -> Result<FeatureSequence> {
    Ok(FeatureSequence::from_tensor(&read_tensor_at(path)?)?)
}

#[derive(Serialize)]
struct DynamicStepReport {
    step: usize,
    frozen: bool,
    propagation_call: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    mask_difference: Option<f64>,
}

#[derive(Serialize)]
struct DynamicReport {
    version: String,
    window: usize,
    alpha: f64,
    steps: Vec<DynamicStepReport>,
    frozen_step: Option<usize>,
    propagation_calls: usize,
}

fn propagate(args: PropagateArgs) -> Result<()> {
    let resolved = args.common.resolve(PartialConfig {
        window: args.window,
        alpha: args.alpha,
        jobs: args.jobs,
        ..Default::default()
    })?;
    let first_masks = read_first_masks(&args.first_masks)?;

    if !args.dynamic {
        let features = read_features(args.features.as_deref().expect("required by clap"))?;
        let tracks = propagate_all(&features, &first_masks, resolved.window, resolved.jobs)?;
        let lists: Vec<Vec<SpatialMask>> = tracks.into_iter().map(|t| t.masks).collect();
        return write_tensor_at(
            args.out.as_deref().expect("required by clap"),
            &mask_tracks_to_tensor(&lists)?,
        );
    }

    let schedule_path = args.schedule.as_deref().expect("required by clap");
    let schedule_text = std::fs::read_to_string(schedule_path)
        .with_context(|| format!("reading schedule {}", schedule_path.display()))?;
    let entries: Vec<PathBuf> = serde_json::from_str(&schedule_text)
        .with_context(|| format!("parsing schedule {}", schedule_path.display()))?;
    if entries.is_empty() {
        bail!("schedule lists no steps");
    }
    let base = schedule_path.parent().unwrap_or(Path::new(""));

    let mut state = DynamicState::new(resolved.alpha)?;
    let mut steps = Vec::with_capacity(entries.len());
    let mut previous: Option<Vec<MaskTrack>> = None;
    let mut tracks: Vec<MaskTrack> = Vec::new();
    for (step, entry) in entries.iter().enumerate() {
        let features = read_features(&base.join(entry))?;
        let frozen_before = state.frozen();
        let calls_before = state.propagation_calls();
        tracks = dynamic_update(
            &mut state,
            step,
            &features,
            &first_masks,
            resolved.window,
            resolved.jobs,
        )?;
        let propagation_call = state.propagation_calls() > calls_before;
        let difference = match (&previous, propagation_call) {
            (Some(prev), true) => Some(mask_difference(prev, &tracks)?),
            _ => None,
        };
        steps.push(DynamicStepReport {
            step: step + 1,
            frozen: frozen_before,
            propagation_call,
            mask_difference: difference,
        });
        previous = Some(tracks.clone());
    }

    if let Some(out) = &args.out {
        let lists: Vec<Vec<SpatialMask>> = tracks.into_iter().map(|t| t.masks).collect();
        write_tensor_at(out, &mask_tracks_to_tensor(&lists)?)?;
    }
    if args.report.is_some() {
        let report = DynamicReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            window: resolved.window,
            alpha: resolved.alpha,
            steps,
            frozen_step: state.frozen_step().map(|s| s + 1),
            propagation_calls: state.propagation_calls(),
        };
        write_json(args.report.as_deref(), &report)?;
    }
    Ok(())
}

fn parse_grid(raw: &str) -> Result<(usize, usize)> {
    let (h, w) = raw
        .split_once('x')
        .with_context(|| format!("grid must look like 16x16, got {raw:?}"))?;
    Ok((
        h.trim().parse().with_context(|| format!("bad grid height in {raw:?}"))?,
        w.trim().parse().with_context(|| format!("bad grid width in {raw:?}"))?,
    ))
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let grid = args.grid.as_deref().map(parse_grid).transpose()?;
    let resolved = args.common.resolve(PartialConfig {
        seed: args.seed,
        window: args.window,
        alpha: args.alpha,
        mode: args.mode,
        grid_h: grid.map(|g| g.0),
        grid_w: grid.map(|g| g.1),
        frames: args.frames,
        steps: args.steps,
        objects: args.objects,
        channels: args.channels,
        convergence_step: args.convergence_step,
        noise_sigma: args.noise_sigma,
        heads: args.heads,
        head_dim: args.head_dim,
        jobs: args.jobs,
        ..Default::default()
    })?;
    let sim = simulate(&resolved)?;
    write_json(args.report.as_deref(), &sim.report)?;

    if let Some(dir) = &args.render_dir {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating render dir {}", dir.display()))?;
        for (k, track) in sim.final_tracks.iter().enumerate() {
            for (l, mask) in track.masks.iter().enumerate() {
                let truth = &sim.scenario.gt_masks[k].masks[l].grid;
                let pixels = mask_overlay(truth, &mask.grid)?;
                let path = dir.join(format!("object{k}_frame{l:02}.pgm"));
                write_pgm(&path, truth.cols(), truth.rows(), &pixels)
                    .with_context(|| format!("writing render {}", path.display()))?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MetricsReport {
    /// Per-object, per-frame overlap of tracks against the reference.
    iou: Vec<Vec<f64>>,
    /// Per-object overlap averaged over frames.
    mean_iou: Vec<f64>,
    /// Per-object motion fidelity; present when flows are supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    flow_fidelity: Option<Vec<f64>>,
}

fn flows_from_tensor(tensor: &Tensor) -> Result<Vec<FlowField>> {
    let dims = tensor.dims().to_vec();
    if dims.len() != 4 || dims[3] != 2 {
        bail!("flow tensor must be [transitions, grid_h, grid_w, 2], got {dims:?}");
    }
    let stride = dims[1] * dims[2] * 2;
    (0..dims[0])
        .map(|l| {
            let slice = Tensor::new(
                vec![dims[1], dims[2], 2],
                tensor.data()[l * stride..(l + 1) * stride].to_vec(),
            )?;
            Ok(FlowField::from_tensor(&slice)?)
        })
        .collect()
}

fn metrics(args: MetricsArgs) -> Result<()> {
    args.common.resolve(PartialConfig::default())?;
    let tracks = mask_tracks_from_tensor(&read_tensor_at(&args.tracks)?)?;
    let reference = mask_tracks_from_tensor(&read_tensor_at(&args.tracks_ref)?)?;
    if tracks.len() != reference.len() {
        bail!(
            "track sets have different object counts: {} vs {}",
            tracks.len(),
            reference.len()
        );
    }

    let mut iou = Vec::with_capacity(tracks.len());
    let mut mean_iou = Vec::with_capacity(tracks.len());
    for (track, ref_track) in tracks.iter().zip(&reference) {
        if track.len() != ref_track.len() {
            bail!(
                "tracks have different frame counts: {} vs {}",
                track.len(),
                ref_track.len()
            );
        }
        let mut per_frame = Vec::with_capacity(track.len());
        for (mask, ref_mask) in track.iter().zip(ref_track) {
            per_frame.push(mask_iou(mask, ref_mask)?);
        }
        mean_iou.push(per_frame.iter().sum::<f64>() / per_frame.len() as f64);
        iou.push(per_frame);
    }

    let flow_fidelity = match (&args.flows, &args.flows_ref) {
        (Some(flows_path), Some(ref_path)) => {
            let flows = flows_from_tensor(&read_tensor_at(flows_path)?)?;
            let ref_flows = flows_from_tensor(&read_tensor_at(ref_path)?)?;
            let mut out = Vec::with_capacity(tracks.len());
            for (track, ref_track) in tracks.iter().zip(&reference) {
                out.push(flow_fidelity_tracks(&flows, track, &ref_flows, ref_track)?);
            }
            Some(out)
        }
        _ => None,
    };

    write_json(
        None,
        &MetricsReport {
            iou,
            mean_iou,
            flow_fidelity,
        },
    )
}

fn render(args: RenderArgs) -> Result<()> {
    args.common.resolve(PartialConfig::default())?;
    let tensor = read_tensor_at(&args.input)?;
    let dims = tensor.dims().to_vec();
    let (h, w, values): (usize, usize, &[f32]) = match dims.len() {
        2 => (dims[0], dims[1], tensor.data()),
        3 => {
            let frame = args
                .frame
                .context("3-D tensors need --frame to pick a slice")?;
            if frame >= dims[0] {
                bail!("--frame {frame} out of range for {} frames", dims[0]);
            }
            let cells = dims[1] * dims[2];
            (
                dims[1],
                dims[2],
                &tensor.data()[frame * cells..(frame + 1) * cells],
            )
        }
        4 => {
            let object = args
                .object
                .context("4-D tensors need --object to pick a slice")?;
            let frame = args
                .frame
                .context("4-D tensors need --frame to pick a slice")?;
            if object >= dims[0] {
                bail!("--object {object} out of range for {} objects", dims[0]);
            }
            if frame >= dims[1] {
                bail!("--frame {frame} out of range for {} frames", dims[1]);
            }
            let cells = dims[2] * dims[3];
            let start = (object * dims[1] + frame) * cells;
            (dims[2], dims[3], &tensor.data()[start..start + cells])
        }
        _ => bail!("render expects a 2-D, 3-D, or 4-D tensor, got {dims:?}"),
    };
    write_pgm(&args.out, w, h, &grayscale(values))
        .with_context(|| format!("writing render {}", args.out.display()))
}
