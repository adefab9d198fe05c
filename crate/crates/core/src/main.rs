use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use itermap::curves::{count_curve_points, decomposition_check, CurveRecord};
use itermap::dynamics::{
    check_precondition, image_size, moment_w, orbit_of_zero, zero_count_identity, PolyMap,
};
use itermap::graphs::{enumerate_complete_proper, enumerate_trees, IterGraph};
use itermap::lab::verify::{run_plan, VerifyPlan};
use itermap::lab::{
    collision_stats, graph_sweep, sweep_theorem, write_records, CoefficientPolicy, LabError, OutputFormat,
    RunMetadata, SweepConfig,
};
use itermap::recur::{mu_sequence, u_tree_bound, u_value};
use itermap::scalar::{rational_to_decimal, rational_to_f64};

/// Levels above this are computed in double precision only.
const EXACT_MU_LEVELS: usize = 16;

#[derive(Parser)]
#[command(name = "itermap", version, about = "Iterates of A x^d + C over prime fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct MapArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long = "A", default_value_t = 1)]
    a: u64,
    #[arg(long = "C", default_value_t = 1)]
    c: u64,
}

impl MapArgs {
    fn map(&self) -> Result<PolyMap, LabError> {
        Ok(PolyMap::new(self.p, self.d, self.a, self.c)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    All,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Theorem,
    Collision,
    Graph,
}

#[derive(Subcommand)]
enum Command {
    /// Tail and cycle length of the orbit of 0.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        /// Also report whether N iterates stay before the first collision.
        #[arg(long = "N")]
        n: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Size of the image of the N-th iterate against mu_N p.
    Image {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Preimage moments W(N, j) for j <= k and the zero-count identity.
    Moments {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[command(flatten)]
        output: Output,
    },
    /// mu_r and q_r = 1/mu_r for r <= R.
    Mu {
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        output: Output,
    },
    /// U(r, k), the number of complete proper graphs, and its tree bound.
    Ucount {
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, allow_negative_numbers = true)]
        r: i32,
        #[arg(long)]
        k: u32,
        /// Also count by exhaustive enumeration.
        #[arg(long)]
        enumerate: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Print complete proper graphs (or trees) in canonical text, one per line.
    EnumGraphs {
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, allow_negative_numbers = true)]
        r: i32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trees: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projective point counts on the variety of each graph.
    Curves {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// A single graph in canonical text; default is every complete
        /// proper (N-1, k, d)-graph.
        #[arg(long)]
        graph: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the union of graph varieties with the equal-iterates variety.
    Decomp {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep over primes and coefficient pairs.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepKind::Theorem)]
        kind: SweepKind,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        #[arg(long)]
        p_min: u64,
        #[arg(long)]
        p_max: u64,
        #[arg(long, default_value_t = 20)]
        per_prime: usize,
        #[arg(long, value_enum, default_value_t = Policy::Random)]
        policy: Policy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        require_precondition: bool,
        /// Fail when the depth-N_0 image bound is violated at p at or above this.
        #[arg(long)]
        assert_threshold: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the cross-module checks and write a JSON manifest.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, LabError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| LabError::Io(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn plain_metadata() -> RunMetadata {
    RunMetadata { seed: None, generator: "none".into(), log_base: "e".into(), version: env!("CARGO_PKG_VERSION").into() }
}

#[derive(Serialize)]
struct NoSummary {}

fn emit<R: Serialize>(output: &Output, records: &[R]) -> Result<(), LabError> {
    write_records(sink(&output.out)?, output.format.into(), &plain_metadata(), &NoSummary {}, records)
}

#[derive(Serialize)]
struct OrbitRow {
    p: u64,
    d: u32,
    #[serde(rename = "A")]
    a: u64,
    #[serde(rename = "C")]
    c: u64,
    tail_len: u64,
    cycle_len: u64,
    collision_index: u64,
    #[serde(rename = "N")]
    n: Option<usize>,
    precondition: Option<bool>,
}

#[derive(Serialize)]
struct ImageRow {
    p: u64,
    d: u32,
    #[serde(rename = "A")]
    a: u64,
    #[serde(rename = "C")]
    c: u64,
    #[serde(rename = "N")]
    n: usize,
    image_size: u64,
    mu_p: String,
    norm_err: f64,
    precondition: bool,
}

#[derive(Serialize)]
struct MomentRow {
    #[serde(rename = "N")]
    n: usize,
    k: u32,
    w: String,
}

#[derive(Serialize)]
struct MomentReport {
    moments: Vec<MomentRow>,
    zero_count: u64,
    zero_count_via_q: String,
    identity_holds: bool,
}

#[derive(Serialize)]
struct MuRow {
    r: usize,
    mu: Option<String>,
    mu_f64: f64,
    q_f64: f64,
    /// mu_r (d-1) r / 2
    ratio: f64,
    q_bound_holds: bool,
}

#[derive(Serialize)]
struct UcountRow {
    d: u32,
    r: i32,
    k: u32,
    u: String,
    tree_bound: String,
    enumerated: Option<usize>,
}

fn run(cli: Cli) -> Result<i32, LabError> {
    match cli.command {
        Command::Orbit { map, n, output } => {
            let f = map.map()?;
            let o = orbit_of_zero(&f);
            let row = OrbitRow {
                p: f.p(),
                d: f.d(),
                a: f.params.a,
                c: f.params.c,
                tail_len: o.tail_len,
                cycle_len: o.cycle_len,
                collision_index: o.collision_index(),
                n,
                precondition: n.map(|n| check_precondition(&f, n)),
            };
            emit(&output, &[row])?;
        }
        Command::Image { map, n, output } => {
            let f = map.map()?;
            let mu = mu_sequence::<BigRational>(f.d(), n).values.pop().unwrap();
            let mu_p = &mu * BigRational::from_integer(f.p().into());
            let image = image_size(&f, n);
            let diff = BigRational::from_integer(image.into()) - &mu_p;
            let row = ImageRow {
                p: f.p(),
                d: f.d(),
                a: f.params.a,
                c: f.params.c,
                n,
                image_size: image,
                mu_p: rational_to_decimal(&mu_p, itermap::lab::MU_P_DIGITS),
                norm_err: rational_to_f64(&diff) / (f.p() as f64).sqrt(),
                precondition: check_precondition(&f, n),
            };
            emit(&output, &[row])?;
        }
        Command::Moments { map, n, k, output } => {
            let f = map.map()?;
            let moments = (0..=k).map(|j| MomentRow { n, k: j, w: moment_w(&f, n, j).to_string() }).collect();
            let id = zero_count_identity(&f, n).map_err(|e| LabError::Budget(e.to_string()))?;
            let report = MomentReport {
                moments,
                zero_count: id.direct,
                zero_count_via_q: id.via_q.to_string(),
                identity_holds: id.holds(),
            };
            match output.format {
                Format::Json => emit(&output, &[&report])?,
                Format::Csv => emit(&output, &report.moments)?,
            }
            if !report.identity_holds {
                return Err(LabError::Check("zero-count identity".into()));
            }
        }
        Command::Mu { d, r, output } => {
            if d < 2 {
                return Err(LabError::Config(format!("d = {d} must be at least 2")));
            }
            let exact = mu_sequence::<BigRational>(d, r.min(EXACT_MU_LEVELS));
            let float = mu_sequence::<f64>(d, r);
            let slope = (d as f64 - 1.0) / 2.0;
            let rows: Vec<MuRow> = float
                .values
                .iter()
                .enumerate()
                .map(|(i, &m)| MuRow {
                    r: i,
                    mu: exact.values.get(i).map(|e| e.to_string()),
                    mu_f64: m,
                    q_f64: 1.0 / m,
                    ratio: m * slope * i as f64,
                    q_bound_holds: match exact.values.get(i) {
                        Some(e) => {
                            let q = BigRational::from_integer(1.into()) / e;
                            q >= BigRational::new((d as i64 - 1).into(), 2.into())
                                * BigRational::from_integer((i as i64).into())
                                + BigRational::from_integer(1.into())
                        }
                        None => 1.0 / m >= slope * i as f64 + 1.0,
                    },
                })
                .collect();
            let ok = rows.iter().all(|row| row.q_bound_holds);
            emit(&output, &rows)?;
            if !ok {
                return Err(LabError::Check("q_r lower bound".into()));
            }
        }
        Command::Ucount { d, r, k, enumerate, output } => {
            let u = u_value(d, r, k).map_err(|e| LabError::Budget(e.to_string()))?;
            let enumerated = if enumerate { Some(enumerate_complete_proper(r, k as usize, d)?.len()) } else { None };
            let row = UcountRow {
                d,
                r,
                k,
                u: u.to_string(),
                tree_bound: u_tree_bound(d, r, k).to_string(),
                enumerated,
            };
            let mismatch = enumerated.is_some_and(|n| u != n.into());
            emit(&output, &[row])?;
            if mismatch {
                return Err(LabError::Check("enumeration count differs from U".into()));
            }
        }
        Command::EnumGraphs { d, r, k, trees, out } => {
            let graphs = if trees { enumerate_trees(r, k, d)? } else { enumerate_complete_proper(r, k, d)? };
            let mut w = sink(&out)?;
            for g in &graphs {
                writeln!(w, "{g}").map_err(|e| LabError::Io(e.to_string()))?;
            }
            w.flush().map_err(|e| LabError::Io(e.to_string()))?;
        }
        Command::Curves { map, n, k, graph, output } => {
            let f = map.map()?;
            let graphs = match graph {
                Some(text) => {
                    let g: IterGraph = text.parse().map_err(|e: itermap::graphs::GraphError| LabError::Config(e.to_string()))?;
                    vec![g]
                }
                None => enumerate_complete_proper(n as i32 - 1, k, f.d())?,
            };
            let mut rows = Vec::new();
            for g in &graphs {
                rows.push(CurveRecord::new(&f, n, g, count_curve_points(&f, g)?));
            }
            emit(&output, &rows)?;
        }
        Command::Decomp { map, n, k, output } => {
            let f = map.map()?;
            let report = decomposition_check(&f, n, k)?;
            emit(&output, &[&report])?;
            if !report.passed() {
                return Err(LabError::Check("decomposition".into()));
            }
        }
        Command::Sweep {
            kind,
            d,
            n,
            p_min,
            p_max,
            per_prime,
            policy,
            seed,
            require_precondition,
            assert_threshold,
            output,
        } => {
            let cfg = SweepConfig {
                d,
                n,
                p_min,
                p_max,
                per_prime,
                policy: match policy {
                    Policy::All => CoefficientPolicy::AllPairs,
                    Policy::Random => CoefficientPolicy::Random { seed },
                },
                require_precondition,
                assert_threshold,
            };
            let meta = cfg.metadata();
            let fmt = output.format.into();
            match kind {
                SweepKind::Theorem => {
                    let (records, summary) = sweep_theorem(&cfg)?;
                    for p in &summary.skipped_primes {
                        eprintln!("skipped p = {p}: d does not divide p - 1");
                    }
                    write_records(sink(&output.out)?, fmt, &meta, &summary, &records)?;
                }
                SweepKind::Collision => {
                    let (records, summary) = collision_stats(&cfg)?;
                    write_records(sink(&output.out)?, fmt, &meta, &summary, &records)?;
                }
                SweepKind::Graph => {
                    let (records, summary) = graph_sweep(&cfg)?;
                    write_records(sink(&output.out)?, fmt, &meta, &summary, &records)?;
                    if summary.asserted_failures > 0 {
                        return Err(LabError::Check(format!(
                            "{} instances above the threshold exceed the depth-N_0 image bound",
                            summary.asserted_failures
                        )));
                    }
                }
            }
        }
        Command::Verify { out } => {
            let manifest = run_plan(&VerifyPlan::desk());
            let mut w = sink(&out)?;
            serde_json::to_writer_pretty(&mut w, &manifest).map_err(|e| LabError::Io(e.to_string()))?;
            writeln!(w).map_err(|e| LabError::Io(e.to_string()))?;
            w.flush().map_err(|e| LabError::Io(e.to_string()))?;
            for c in manifest.failures() {
                eprintln!("FAILED {}: {}", c.name, c.detail);
            }
            return Ok(manifest.exit_code());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
