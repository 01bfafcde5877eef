use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cdef_core::frame::{FB_SIZE, UNIT_SIZE};
use cdef_core::search::Metric;
use cdef_core::sidecar::{skip_map_from_bytes, Sidecar};
use cdef_core::vectors::golden_vectors;
use cdef_core::{search_frame_directions, SkipMap};
use cdef_tool::bench::run_bench;
use cdef_tool::degrade::degrade;
use cdef_tool::metrics::frame_psnr;
use cdef_tool::pipeline::{run_decode, run_search, with_threads, SearchOptions};
use cdef_tool::testimage::{natural_image, DEFAULT_SEED};
use cdef_tool::y4m::{read_y4m_file, write_y4m_file, Y4mStream};

#[derive(Parser)]
#[command(name = "cdef", version, about = "Constrained directional enhancement filter tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the per-unit direction map as CSV.
    Analyze {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Search presets, filter, and write the sidecar and statistics.
    Search(SearchArgs),
    /// Filter a decoded stream with the parameters in a sidecar.
    Filter {
        decoded: PathBuf,
        sidecar: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        skip_map: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Quantize 8×8 DCT blocks with a uniform step.
    Degrade {
        input: PathBuf,
        #[arg(long)]
        qstep: f64,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Per-frame, per-plane PSNR between two streams.
    Psnr {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time each stage on the synthetic test image.
    Bench {
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long, default_value_t = 40.0)]
        qstep: f64,
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        fast: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the conformance vectors into a directory.
    Vectors {
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the synthetic test image.
    Synth {
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Cdef,
    Sse,
}

#[derive(Args)]
struct SearchArgs {
    source: PathBuf,
    /// Decoded stream; synthesized from the source with `--qstep` when absent.
    decoded: Option<PathBuf>,
    #[arg(long)]
    qstep: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Luma damping in 3..=6; derived from `--qstep` by default.
    #[arg(long)]
    damping: Option<u8>,
    #[arg(long, value_enum, default_value_t = MetricArg::Cdef)]
    metric: MetricArg,
    #[arg(long, default_value_t = 8, value_parser = parse_presets_max)]
    presets_max: usize,
    /// Reduced candidate set.
    #[arg(long)]
    fast: bool,
    #[arg(long, default_value_t = 4)]
    refine_passes: usize,
    #[arg(long)]
    skip_map: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Filtered stream.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Statistics CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_presets_max(s: &str) -> std::result::Result<usize, String> {
    match s.parse() {
        Ok(n @ (1 | 2 | 4 | 8)) => Ok(n),
        _ => Err(format!("{s:?} is not one of 1, 2, 4, 8")),
    }
}

fn read_stream(path: &Path) -> Result<Y4mStream> {
    read_y4m_file(path).with_context(|| format!("reading {}", path.display()))
}

fn write_stream(stream: &Y4mStream, path: &Path) -> Result<()> {
    write_y4m_file(stream, path).with_context(|| format!("writing {}", path.display()))
}

fn read_skip_map(path: Option<&Path>) -> Result<Option<SkipMap>> {
    path.map(|p| {
        let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
        skip_map_from_bytes(&bytes).with_context(|| format!("parsing {}", p.display()))
    })
    .transpose()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn analyze(input: &Path, out: Option<&Path>, threads: Option<usize>) -> Result<()> {
    let stream = read_stream(input)?;
    let mut csv = String::from("frame,fb_row,fb_col,unit_row,unit_col,d,contrast\n");
    for (i, frame) in stream.frames().enumerate() {
        let dirs = with_threads(threads, || search_frame_directions(frame.luma()))?;
        for r in 0..dirs.grid.unit_rows {
            for c in 0..dirs.grid.unit_cols {
                let d = dirs.get(r, c);
                let per_fb = FB_SIZE / UNIT_SIZE;
                csv.push_str(&format!(
                    "{i},{},{},{r},{c},{},{}\n",
                    r / per_fb,
                    c / per_fb,
                    d.direction,
                    d.contrast
                ));
            }
        }
    }
    emit(out, &csv)
}

fn search(args: &SearchArgs) -> Result<()> {
    let source = read_stream(&args.source)?;
    let decoded = match (&args.decoded, args.qstep) {
        (Some(p), _) => read_stream(p)?,
        (None, Some(q)) => {
            if q < 1.0 {
                bail!("--qstep must be >= 1");
            }
            let frames = with_threads(args.threads, || source.frames().map(|f| degrade(f, q)).collect())?;
            source.with_frames(frames)?
        }
        (None, None) => bail!("give a decoded stream or --qstep"),
    };
    let options = SearchOptions {
        q_step: args.qstep,
        lambda: args.lambda,
        damping: args.damping,
        max_presets: args.presets_max,
        metric: match args.metric {
            MetricArg::Cdef => Metric::CdefDist,
            MetricArg::Sse => Metric::Sse,
        },
        fast: args.fast,
        refine_passes: args.refine_passes,
    };
    let config = options.config()?;
    let skip = read_skip_map(args.skip_map.as_deref())?;
    let run = with_threads(args.threads, || run_search(&source, &decoded, skip.as_ref(), &config))??;
    if let Some(p) = &args.output {
        write_stream(&run.filtered, p)?;
    }
    if let Some(p) = &args.sidecar {
        std::fs::write(p, run.sidecar.to_bytes()).with_context(|| format!("writing {}", p.display()))?;
    }
    emit(args.out.as_deref(), &run.report.to_csv())
}

fn filter(decoded: &Path, sidecar: &Path, output: &Path, skip_map: Option<&Path>, threads: Option<usize>) -> Result<()> {
    let stream = read_stream(decoded)?;
    let bytes = std::fs::read(sidecar).with_context(|| format!("reading {}", sidecar.display()))?;
    let sidecar = Sidecar::from_bytes(&bytes).with_context(|| format!("parsing {}", sidecar.display()))?;
    let skip = read_skip_map(skip_map)?;
    let filtered = with_threads(threads, || run_decode(&stream, &sidecar, skip.as_ref()))??;
    write_stream(&filtered, output)
}

fn psnr(a: &Path, b: &Path, out: Option<&Path>) -> Result<()> {
    let (a, b) = (read_stream(a)?, read_stream(b)?);
    if a.frames.len() != b.frames.len() {
        bail!("frame counts differ: {} vs {}", a.frames.len(), b.frames.len());
    }
    let mut csv = String::from("frame,plane,mse,psnr\n");
    for (i, (fa, fb)) in a.frames().zip(b.frames()).enumerate() {
        let (planes, all) = frame_psnr(fa, fb)?;
        let names = ["y", "u", "v"];
        for (name, p) in names.iter().zip(&planes).chain(std::iter::once((&"all", &all))) {
            csv.push_str(&format!("{i},{name},{:.6},{p}\n", p.mse));
        }
    }
    emit(out, &csv)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Analyze { input, out, threads } => analyze(&input, out.as_deref(), threads),
        Command::Search(args) => search(&args),
        Command::Filter {
            decoded,
            sidecar,
            output,
            skip_map,
            threads,
        } => filter(&decoded, &sidecar, &output, skip_map.as_deref(), threads),
        Command::Degrade {
            input,
            qstep,
            output,
            threads,
        } => {
            if qstep < 1.0 {
                bail!("--qstep must be >= 1");
            }
            let stream = read_stream(&input)?;
            let frames = with_threads(threads, || stream.frames().map(|f| degrade(f, qstep)).collect())?;
            write_stream(&stream.with_frames(frames)?, &output)
        }
        Command::Psnr { a, b, out } => psnr(&a, &b, out.as_deref()),
        Command::Bench {
            size,
            qstep,
            runs,
            seed,
            fast,
            threads,
            out,
        } => {
            let config = SearchOptions {
                q_step: Some(qstep),
                fast,
                ..Default::default()
            }
            .config()?;
            let rows = with_threads(threads, || run_bench(size, qstep, seed, runs, &config))??;
            let mut csv = String::from("stage,best_ms,mean_ms\n");
            for r in rows {
                csv.push_str(&format!(
                    "{},{:.3},{:.3}\n",
                    r.stage,
                    r.best.as_secs_f64() * 1e3,
                    r.mean.as_secs_f64() * 1e3
                ));
            }
            emit(out.as_deref(), &csv)
        }
        Command::Vectors { out } => {
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for (name, contents) in golden_vectors() {
                let path = out.join(name);
                std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        }
        Command::Synth {
            output,
            width,
            height,
            seed,
        } => {
            if width == 0 || height == 0 {
                bail!("dimensions must be positive");
            }
            write_stream(&Y4mStream::from_frames(vec![natural_image(width, height, seed)])?, &output)
        }
    }
}
