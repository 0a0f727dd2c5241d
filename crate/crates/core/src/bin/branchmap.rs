use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use branchmap::field::{
    generate_ensemble, generate_periodic_series, generate_split_series, parse_key_values, write_sf2, Connectivity,
    Direction, EnsembleSpec, PeriodicSpec, ScalarField2D, SplitSpec,
};
use branchmap::pipeline::{
    cluster_order, compute_distance, compute_mapping, compute_matrix, format_value, load_tree, track_features,
    DistanceKind, TreeOptions,
};
use branchmap::trees::{format_mt, MergeTree};
use branchmap::{Aggregation, BaseMetric, CostModel};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "branchmap", version, about = "Branch mapping distances between merge trees of scalar fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the merge tree of a field and write it as MT text.
    Tree {
        field: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Distance between two trees or fields.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        distance: DistanceArgs,
        /// Write the optimal branch mapping as JSON.
        #[arg(long)]
        mapping: Option<PathBuf>,
    },
    /// Pairwise distance matrix of a directory or list of members.
    Matrix {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        distance: DistanceArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Order::Input)]
        order: Order,
        /// Write a grayscale PGM heatmap of the (ordered) matrix.
        #[arg(long)]
        heatmap: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Follow leaves through a time series of trees or fields.
    Track {
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        distance: DistanceArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset as member_<k>.sf2 files.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        members: Option<usize>,
        #[arg(long)]
        outlier_index: Option<usize>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long)]
        period: Option<usize>,
        #[arg(long)]
        variation: Option<f64>,
        /// File of `key = value` generator parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Generator parameter override, applied after --config.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },
}

#[derive(Args)]
struct TreeArgs {
    #[arg(long, default_value = "max", value_parser = parse_from_str::<Direction>)]
    direction: Direction,
    #[arg(long, default_value = "8", value_parser = parse_from_str::<Connectivity>)]
    connectivity: Connectivity,
    /// Persistence simplification threshold.
    #[arg(long, default_value_t = 0.0)]
    simplify: f64,
}

impl TreeArgs {
    fn options(&self) -> TreeOptions {
        TreeOptions { direction: self.direction, connectivity: self.connectivity, simplify: self.simplify }
    }
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long, default_value = "branch", value_parser = parse_from_str::<DistanceKind>)]
    distance: DistanceKind,
    #[arg(long, default_value = "birth-persistence", value_parser = parse_from_str::<BaseMetric>)]
    metric: BaseMetric,
    #[arg(long, default_value = "sum", value_parser = parse_from_str::<Aggregation>)]
    mode: Aggregation,
}

impl DistanceArgs {
    fn cost(&self) -> CostModel {
        CostModel::new(self.metric, self.mode)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Input,
    Cluster,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Peaks,
    Outlier,
    Periodic,
    Split,
}

fn parse_from_str<T: std::str::FromStr<Err = branchmap::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: branchmap::Error| e.to_string())
}

enum Failure {
    Usage(String),
    Data(branchmap::Error),
}

impl From<branchmap::Error> for Failure {
    fn from(e: branchmap::Error) -> Self {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Tree { field, tree, out } => {
            let t = load_tree(&field, &tree.options())?;
            emit(out.as_deref(), &format_mt(&t))?;
        }
        Command::Dist { a, b, tree, distance, mapping } => {
            if mapping.is_some() && !distance.distance.has_mapping() {
                return Err(Failure::Usage(format!("--mapping needs a branch distance, not '{}'", distance.distance)));
            }
            let t1 = load_tree(&a, &tree.options())?;
            let t2 = load_tree(&b, &tree.options())?;
            let d = match mapping {
                Some(path) => {
                    let (d, m) = compute_mapping(distance.distance, &t1, &t2, distance.cost())?;
                    emit(Some(&path), &m.to_json(&t1, &t2)?)?;
                    d
                }
                None => compute_distance(distance.distance, &t1, &t2, distance.cost())?,
            };
            println!("{}", format_value(d));
        }
        Command::Matrix { inputs, tree, distance, out, order, heatmap, jobs } => {
            let files = expand_inputs(&inputs)?;
            if files.len() < 2 {
                return Err(Failure::Usage(format!("a matrix needs at least 2 members, got {}", files.len())));
            }
            let (trees, labels) = load_all(&files, &tree.options())?;
            let mut matrix = compute_matrix(&trees, labels, distance.distance, distance.cost(), jobs)?;
            if let Order::Cluster = order {
                matrix = matrix.permuted(&cluster_order(&matrix));
            }
            match out {
                Some(path) => matrix.save_csv(&path)?,
                None => matrix.write_csv(std::io::stdout().lock())?,
            }
            if let Some(path) = heatmap {
                matrix.save_pgm(&path)?;
            }
        }
        Command::Track { inputs, tree, distance, out } => {
            if !distance.distance.has_mapping() {
                return Err(Failure::Usage(format!("tracking needs a branch distance, not '{}'", distance.distance)));
            }
            let (trees, _) = load_all(&inputs, &tree.options())?;
            let tracking = track_features(&trees, distance.distance, distance.cost())?;
            emit(out.as_deref(), &tracking.to_json()?)?;
        }
        Command::Gen { kind, out, seed, members, outlier_index, length, period, variation, config, sets } => {
            let mut params: Vec<(String, String)> = Vec::new();
            if let Some(path) = &config {
                let text = fs::read_to_string(path).map_err(|e| branchmap::Error::io(path, e))?;
                params.extend(parse_key_values(&text, path)?);
            }
            let flags = [
                ("seed", seed.map(|v| v.to_string())),
                ("members", members.map(|v| v.to_string())),
                ("outlier_index", outlier_index.map(|v| v.to_string())),
                ("length", length.map(|v| v.to_string())),
                ("period", period.map(|v| v.to_string())),
                ("variation", variation.map(|v| v.to_string())),
            ];
            params.extend(flags.into_iter().filter_map(|(k, v)| Some((k.to_string(), v?))));
            for s in &sets {
                let (k, v) = s
                    .split_once('=')
                    .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got '{s}'")))?;
                params.push((k.trim().to_string(), v.trim().to_string()));
            }
            let fields = generate(kind, &params)?;
            fs::create_dir_all(&out).map_err(|e| branchmap::Error::io(&out, e))?;
            for (k, f) in fields.iter().enumerate() {
                write_sf2(f, &out.join(format!("member_{k}.sf2")))?;
            }
            eprintln!("wrote {} fields to {}", fields.len(), out.display());
        }
    }
    Ok(())
}

fn generate(kind: GenKind, params: &[(String, String)]) -> Result<Vec<ScalarField2D>, Failure> {
    let usage = |e: branchmap::Error| Failure::Usage(e.to_string());
    let get = |key: &str| params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let seed: u64 = get("seed").map(|s| s.parse()).transpose().map_err(|_| Failure::Usage("bad seed".into()))?.unwrap_or(0);
    let fields = match kind {
        GenKind::Peaks | GenKind::Outlier => {
            let mut spec = match kind {
                GenKind::Peaks => EnsembleSpec::peaks(20, seed),
                _ => EnsembleSpec::outlier(20, 7, seed),
            };
            for (k, v) in params {
                spec.set(k, v).map_err(usage)?;
            }
            generate_ensemble(&spec)
        }
        GenKind::Periodic => {
            let mut spec = PeriodicSpec::new(225, 75, seed);
            for (k, v) in params {
                spec.set(k, v).map_err(usage)?;
            }
            generate_periodic_series(&spec)
        }
        GenKind::Split => {
            let mut spec = SplitSpec::default();
            for (k, v) in params.iter().filter(|(k, _)| k != "seed") {
                spec.set(k, v).map_err(usage)?;
            }
            generate_split_series(&spec)
        }
    };
    fields.map_err(usage)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| branchmap::Error::io(p, e).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Files named on the command line, with directories replaced by their `.sf2` and `.mt`
/// files in natural name order.
fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .map_err(|e| branchmap::Error::io(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("sf2" | "mt")))
                .collect();
            found.sort_by_key(|p| natural_key(p));
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn natural_key(path: &Path) -> (String, u64, String) {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = path.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let digits = stem.len() - stem.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (prefix, number) = stem.split_at(stem.len() - digits);
    (prefix.to_string(), number.parse().unwrap_or(0), name)
}

fn load_all(files: &[PathBuf], options: &TreeOptions) -> Result<(Vec<MergeTree>, Vec<String>), Failure> {
    let mut trees = Vec::with_capacity(files.len());
    let mut labels = Vec::with_capacity(files.len());
    for f in files {
        trees.push(load_tree(f, options)?);
        labels.push(f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    }
    Ok((trees, labels))
}
