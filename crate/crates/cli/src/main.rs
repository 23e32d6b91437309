use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use pareanim_cli::service::{serve, ServiceState};
use pareanim_cli::{
    exit_code, fit_points, load_config, load_reference, load_schema, resolve_image_ref, FitRequest,
};
use pareanim_core::io::{
    parse_annotation, parse_landmarks, AnnotationDoc, LandmarkSequenceDoc, MetricsReport, PipelineConfig,
};
use pareanim_core::pipeline::{measure_pipeline, run_pipeline, write_outputs, RunOptions};
use pareanim_core::shape::{BoundarySchema, ReferenceFace};
use pareanim_core::warp::Image;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "pareanim",
    version,
    about = "Animate pareidolia faces from human landmark sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit every branch of an annotation and print controls and residuals.
    Fit {
        annotation: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Synthesize one frame per landmark frame and write a metrics report.
    Animate {
        #[command(flatten)]
        run: RunArgs,
        /// Output directory for frames and metrics.json.
        #[arg(long)]
        out: PathBuf,
        /// Also write forward and inverse flow files here.
        #[arg(long, value_name = "DIR")]
        dump_flow: Option<PathBuf>,
        /// Also write the intermediate pyramid levels.
        #[arg(long)]
        keep_levels: bool,
    },
    /// Compute the metrics report without synthesizing frames.
    Metrics {
        #[command(flatten)]
        run: RunArgs,
        /// Report path; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the local HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory that annotation image paths are resolved against.
        #[arg(long, default_value = ".")]
        image_root: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    annotation: PathBuf,
    #[arg(long)]
    landmarks: PathBuf,
    /// Pareidolia image; defaults to the annotation's image_ref next to the annotation.
    #[arg(long)]
    image: Option<PathBuf>,
    /// Record failing frames and continue with the rest.
    #[arg(long)]
    keep_going: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Pipeline configuration file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Boundary schema file; defaults to the 68-landmark layout.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Reference face file; defaults to the bundled neutral face.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct ConfigOverrides {
    #[arg(long, alias = "decay_kind")]
    decay_kind: Option<String>,
    #[arg(long, alias = "omega_min")]
    omega_min: Option<f64>,
    #[arg(long, alias = "omega_max")]
    omega_max: Option<f64>,
    #[arg(long, alias = "fit_order")]
    fit_order: Option<usize>,
    #[arg(long, alias = "fit_segments")]
    fit_segments: Option<usize>,
    #[arg(long, alias = "samples_per_branch")]
    samples_per_branch: Option<usize>,
    #[arg(long, alias = "pyramid_depth")]
    pyramid_depth: Option<usize>,
    #[arg(long, alias = "eps_den")]
    eps_den: Option<f64>,
    #[arg(long, alias = "d_tol")]
    d_tol: Option<f64>,
    #[arg(long, alias = "w_min")]
    w_min: Option<f64>,
    #[arg(long, alias = "m_eps")]
    m_eps: Option<f64>,
    #[arg(long, alias = "max_step")]
    max_step: Option<usize>,
    #[arg(long, alias = "metric_bins")]
    metric_bins: Option<usize>,
    #[arg(long, alias = "boundary_samples")]
    boundary_samples: Option<usize>,
}

impl ConfigOverrides {
    fn apply(&self, cfg: &mut PipelineConfig) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    cfg.$f = v.clone();
                }
            )*};
        }
        set!(
            decay_kind,
            omega_min,
            omega_max,
            fit_order,
            fit_segments,
            samples_per_branch,
            pyramid_depth,
            eps_den,
            d_tol,
            w_min,
            m_eps,
            max_step,
            metric_bins,
            boundary_samples
        );
    }
}

struct Inputs {
    cfg: PipelineConfig,
    schema: BoundarySchema,
    reference: ReferenceFace,
}

fn load_inputs(common: &CommonArgs) -> anyhow::Result<Inputs> {
    let mut cfg = load_config(common.config.as_deref())?;
    common.overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(Inputs {
        cfg,
        schema: load_schema(common.schema.as_deref())?,
        reference: load_reference(common.reference.as_deref())?,
    })
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

struct Run {
    inputs: Inputs,
    annotation: AnnotationDoc,
    landmarks: LandmarkSequenceDoc,
    image: Image,
}

fn load_run(args: &RunArgs) -> anyhow::Result<Run> {
    let inputs = load_inputs(&args.common)?;
    let annotation = parse_annotation(&read(&args.annotation)?, &inputs.schema)?;
    let landmarks = parse_landmarks(&read(&args.landmarks)?)?;
    let image_path = match &args.image {
        Some(p) => p.clone(),
        None => {
            let dir = args.annotation.parent().unwrap_or(Path::new("."));
            resolve_image_ref(dir, &annotation.image_ref)?
        }
    };
    let image = Image::load(&image_path).with_context(|| format!("loading {}", image_path.display()))?;
    Ok(Run {
        inputs,
        annotation,
        landmarks,
        image,
    })
}

#[derive(Serialize)]
struct BranchFit {
    role: String,
    #[serde(flatten)]
    fit: pareanim_cli::FitResponse,
}

/// Runs one subcommand; `Ok(false)` means some frames failed under `--keep-going`.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Fit { annotation, common } => {
            let inputs = load_inputs(&common)?;
            let doc = parse_annotation(&read(&annotation)?, &inputs.schema)?;
            let fits = doc
                .branches
                .iter()
                .map(|b| {
                    let req = FitRequest {
                        points: b.points.clone(),
                        n_controls: b.n_controls,
                    };
                    Ok(BranchFit {
                        role: b.role.clone(),
                        fit: fit_points(&req, inputs.cfg.fit_segments)?,
                    })
                })
                .collect::<pareanim_core::Result<Vec<_>>>()?;
            println!("{}", serde_json::to_string_pretty(&fits)?);
        }
        Command::Animate {
            run,
            out,
            dump_flow,
            keep_levels,
        } => {
            let r = load_run(&run)?;
            let opts = RunOptions {
                keep_going: run.keep_going,
                keep_levels,
            };
            let output = run_pipeline(
                &r.inputs.cfg,
                &r.inputs.schema,
                &r.annotation,
                &r.landmarks,
                &r.inputs.reference,
                r.image,
                opts,
            )?;
            write_outputs(&output, &out, dump_flow.as_deref())?;
            log::info!("wrote {} frames to {}", output.frames.len(), out.display());
            return Ok(report_failures(&output.report));
        }
        Command::Metrics { run, out } => {
            let r = load_run(&run)?;
            let report = measure_pipeline(
                &r.inputs.cfg,
                &r.inputs.schema,
                &r.annotation,
                &r.landmarks,
                &r.inputs.reference,
                r.image,
                run.keep_going,
            )?;
            match out {
                Some(p) => {
                    fs::write(&p, report.to_json()).with_context(|| format!("writing {}", p.display()))?
                }
                None => println!("{}", report.to_json()),
            }
            return Ok(report_failures(&report));
        }
        Command::Serve {
            port,
            host,
            image_root,
            common,
        } => {
            let inputs = load_inputs(&common)?;
            let state = ServiceState {
                config: inputs.cfg,
                schema: inputs.schema,
                reference: inputs.reference,
                image_root,
            };
            tokio::runtime::Runtime::new()?.block_on(serve(state, SocketAddr::new(host, port)))?;
        }
    }
    Ok(true)
}

/// Prints skipped frames; true when every frame succeeded.
fn report_failures(report: &MetricsReport) -> bool {
    for d in &report.diagnostics {
        eprintln!("frame {} failed in stage `{}`: {}", d.frame, d.stage, d.message);
    }
    report.diagnostics.is_empty()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
