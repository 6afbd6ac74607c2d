use clap::{Args, Parser, Subcommand};
use polygreen::cli::{run, RunConfig, Tau0, EXIT_ERROR, EXIT_OK};
use polygreen::giraud::EnvelopeSpec;
use polygreen::parametrix::ErrorSpectrum;
use polygreen::report::Format;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "polygreen", version, about = "Green's functions of (Δ+α)^k on R^n and flat tori")]
struct Cli {
    /// JSON run configuration; flags on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    group: Option<Group>,
}

#[derive(Subcommand)]
enum Group {
    /// Euclidean kernels.
    Kernel {
        #[command(subcommand)]
        cmd: KernelCmd,
    },
    /// Envelope calculus.
    Giraud {
        #[command(subcommand)]
        cmd: GiraudCmd,
    },
    /// Lattice sums on the flat torus.
    Torus {
        #[command(subcommand)]
        cmd: TorusCmd,
    },
    /// Parametrix construction.
    Parametrix {
        #[command(subcommand)]
        cmd: ParametrixCmd,
    },
    /// Mass in dimension n = 2k+1.
    Mass {
        #[command(subcommand)]
        cmd: MassCmd,
    },
}

#[derive(Subcommand)]
enum KernelCmd {
    /// G_α(r).
    Eval(Flags),
    /// Near-diagonal remainder sweep against η.
    Asym(Flags),
    /// l-th radial derivative.
    Deriv(Flags),
}

#[derive(Subcommand)]
enum GiraudCmd {
    /// Compose two JSON envelopes.
    Compose(Flags),
    /// Fit the constant of a composed Green's envelope.
    Certify(Flags),
}

#[derive(Subcommand)]
enum TorusCmd {
    /// G(x, y) by lattice summation.
    Green(Flags),
    /// Representation formula on the grid.
    Verify(Flags),
    /// Symmetry and positivity at random pairs.
    Scan(Flags),
}

#[derive(Subcommand)]
enum ParametrixCmd {
    /// Build the parametrix and compare with the lattice sum.
    Run(Flags),
}

#[derive(Subcommand)]
enum MassCmd {
    /// μ over a list of α.
    Sweep(Flags),
}

#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    /// Order of the second kernel (giraud certify).
    #[arg(long)]
    k2: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Torus side length.
    #[arg(long = "L")]
    length: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Cutoff radius or "auto".
    #[arg(long, value_parser = parse_tau0)]
    tau0: Option<Tau0>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    lattice_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    /// Derivative order.
    #[arg(long)]
    order: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    y: Option<Vec<f64>>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    d_min: Option<f64>,
    #[arg(long)]
    d_max: Option<f64>,
    /// Envelope as inline JSON or a path to a JSON file.
    #[arg(long, value_parser = parse_envelope)]
    first: Option<EnvelopeSpec>,
    #[arg(long, value_parser = parse_envelope)]
    second: Option<EnvelopeSpec>,
    /// Use the α-free composition rule.
    #[arg(long)]
    euclid: bool,
    /// Parametrix spectra: radial (folded) or grid.
    #[arg(long, value_parser = parse_spectra)]
    spectra: Option<ErrorSpectrum>,
    /// Bands folded onto the grid with radial spectra.
    #[arg(long)]
    band_images: Option<usize>,
    /// Aliasing threshold, or "none" to record without enforcing.
    #[arg(long, value_parser = parse_aliasing)]
    aliasing_tol: Option<f64>,
    /// Directory for TFLD dumps of the parametrix fields.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Where to write the counterexample on verification failure.
    #[arg(long)]
    counterexample: Option<PathBuf>,
    /// Output path, or "csv" / "json" for standard output.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

fn parse_tau0(s: &str) -> Result<Tau0, String> {
    s.parse().map_err(|e: polygreen::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: polygreen::Error| e.to_string())
}

fn parse_spectra(s: &str) -> Result<ErrorSpectrum, String> {
    match s {
        "radial" => Ok(ErrorSpectrum::Radial),
        "grid" => Ok(ErrorSpectrum::Grid),
        _ => Err(format!("expected radial or grid, got {s:?}")),
    }
}

fn parse_aliasing(s: &str) -> Result<f64, String> {
    if s == "none" {
        return Ok(-1.0);
    }
    s.parse().map_err(|_| format!("expected a number or \"none\", got {s:?}"))
}

fn parse_envelope(s: &str) -> Result<EnvelopeSpec, String> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| format!("{s}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

impl Flags {
    fn into_config(self, command: &str) -> RunConfig {
        RunConfig {
            command: Some(command.to_string()),
            n: self.n,
            k: self.k,
            k2: self.k2,
            alpha: self.alpha,
            alphas: self.alphas,
            length: self.length,
            grid: self.grid,
            tau0: self.tau0,
            epsilon: self.epsilon,
            tol: self.tol,
            lattice_tol: self.lattice_tol,
            seed: self.seed,
            pairs: self.pairs,
            r: self.r,
            order: self.order,
            x: self.x,
            y: self.y,
            points: self.points,
            t_min: self.t_min,
            t_max: self.t_max,
            d_min: self.d_min,
            d_max: self.d_max,
            first: self.first,
            second: self.second,
            euclid: self.euclid.then_some(true),
            spectra: self.spectra,
            band_images: self.band_images,
            aliasing_tol: self.aliasing_tol,
            dump: self.dump,
            counterexample: self.counterexample,
            out: self.out,
            format: self.format,
        }
    }
}

fn flags_of(group: Group) -> (&'static str, Flags) {
    match group {
        Group::Kernel { cmd: KernelCmd::Eval(f) } => ("kernel eval", f),
        Group::Kernel { cmd: KernelCmd::Asym(f) } => ("kernel asym", f),
        Group::Kernel { cmd: KernelCmd::Deriv(f) } => ("kernel deriv", f),
        Group::Giraud { cmd: GiraudCmd::Compose(f) } => ("giraud compose", f),
        Group::Giraud { cmd: GiraudCmd::Certify(f) } => ("giraud certify", f),
        Group::Torus { cmd: TorusCmd::Green(f) } => ("torus green", f),
        Group::Torus { cmd: TorusCmd::Verify(f) } => ("torus verify", f),
        Group::Torus { cmd: TorusCmd::Scan(f) } => ("torus scan", f),
        Group::Parametrix { cmd: ParametrixCmd::Run(f) } => ("parametrix run", f),
        Group::Mass { cmd: MassCmd::Sweep(f) } => ("mass sweep", f),
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("POLYGREEN_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| format!("POLYGREEN_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("POLYGREEN_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("polygreen: {e}");
        std::process::exit(EXIT_ERROR);
    }
    let base = match &cli.config {
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| polygreen::Error::Io(format!("{}: {e}", path.display())))
            .and_then(|t| RunConfig::from_json(&t))
        {
            Ok(c) => c,
            Err(e) => {
                eprintln!("polygreen: {e}");
                std::process::exit(EXIT_ERROR);
            }
        },
        None => RunConfig::default(),
    };
    let config = match cli.group {
        Some(g) => {
            let (name, flags) = flags_of(g);
            base.layered(flags.into_config(name))
        }
        None => base,
    };
    if config.command.is_none() {
        eprintln!("polygreen: no command given; see --help");
        std::process::exit(EXIT_ERROR);
    }
    let code = run(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
