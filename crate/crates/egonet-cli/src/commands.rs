//! Subcommand implementations.
//!
//! Every command that writes files also writes a [`RunManifest`] beside
//! them; every randomized command takes an explicit `--seed` (no wall-clock
//! defaults). Output CSVs are byte-identical across re-runs of the same
//! manifest.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};

use egonet::ego::{parse_dyad_csv, write_dyad_csv, EgoDataset};
use egonet::graph::{configuration_graph, read_edge_list, write_edge_list};
use egonet::hub::{hub_proportion_by_rank, hub_trend_test, permutation_null_band, write_hub_prop_csv};
use egonet::paradox::{
    decile_contact_curves, paradox_prevalence, rank1_comparison, rank_degree_summary,
    write_decile_curves_csv, write_rank_summary_csv, write_zipf_csv, zipf_fit, Aggregator,
};
use egonet::sim::{run_ensemble, write_epidemic_csv, SeedNode};
use egonet::synth::{
    read_degree_histogram, sample_degree_sequence, synth_ego_dataset, DegreeSpec, SynthParams,
    PAPER_SCALE_NODES,
};
use egonet::OutbreakConfig;

use crate::manifest::{manifest_path_beside, RunManifest};

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a dyad CSV and report invariant violations
    Validate(ValidateArgs),
    /// Paradox prevalence, rank-degree summaries, and decile curves
    Stats(StatsArgs),
    /// Hub-alter proportions with the permutation null band
    Hub(HubArgs),
    /// Power-law fit of contact volume against alter rank
    Zipf(ZipfArgs),
    /// Generate a synthetic dyad dataset
    Synth(SynthArgs),
    /// Generate a configuration-model graph
    Graph(GraphArgs),
    /// Run an SI outbreak ensemble on a graph
    Simulate(SimulateArgs),
    /// Aggregate previously emitted CSVs into one summary table
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Input dyad CSV
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Directory for rank_summary.csv and decile_curves.csv
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    /// Highest alter rank to summarize (default: highest rank present)
    #[arg(long = "max-rank")]
    pub max_rank: Option<u32>,
    /// Contact-volume bins per decile
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Average log10(alter outdegree) instead of raw degrees in decile curves
    #[arg(long)]
    pub log10: bool,
}

#[derive(Args, Debug)]
pub struct HubArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Minimum available alters for an ego to count
    #[arg(long = "min-available", default_value_t = 5)]
    pub min_available: usize,
    /// Null-model permutations
    #[arg(long, default_value_t = 1000)]
    pub perms: usize,
    #[arg(long)]
    pub seed: u64,
    /// Central mass of the null band
    #[arg(long, default_value_t = 0.95)]
    pub coverage: f64,
    /// Permutations for the Spearman trend test
    #[arg(long = "trend-perms", default_value_t = 10_000)]
    pub trend_perms: usize,
}

#[derive(Args, Debug)]
pub struct ZipfArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Ignore ranks with fewer dyads than this
    #[arg(long = "min-dyads", default_value_t = 1)]
    pub min_dyads: usize,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub egos: usize,
    #[arg(long)]
    pub alters: usize,
    /// Rank-volume decay exponent
    #[arg(long, default_value_t = 1.2)]
    pub zipf: f64,
    /// Rank-degree coupling in [0,1]
    #[arg(long, default_value_t = 0.0)]
    pub coupling: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Contact volume at rank 1
    #[arg(long = "base-volume", default_value_t = 1000.0)]
    pub base_volume: f64,
    /// Probability an alter outdegree is masked unavailable
    #[arg(long = "frac-unavailable", default_value_t = 0.0)]
    pub frac_unavailable: f64,
    /// Lognormal location of the degree model
    #[arg(long, default_value_t = 5.0644, conflicts_with = "hist")]
    pub mu: f64,
    /// Lognormal scale of the degree model
    #[arg(long, default_value_t = 0.6776, conflicts_with = "hist")]
    pub sigma: f64,
    /// degree,probability CSV overriding the lognormal degree model
    #[arg(long)]
    pub hist: Option<PathBuf>,
    #[arg(long = "min-degree", default_value_t = 1)]
    pub min_degree: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum GraphPreset {
    /// 88,137 nodes with a lognormal degree model targeting ≈ 8.77M edges
    PaperScale,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5.0644, conflicts_with_all = ["hist", "preset"])]
    pub mu: f64,
    #[arg(long, default_value_t = 0.6776, conflicts_with_all = ["hist", "preset"])]
    pub sigma: f64,
    #[arg(long, conflicts_with = "preset")]
    pub hist: Option<PathBuf>,
    #[arg(long = "min-degree", default_value_t = 1)]
    pub min_degree: usize,
    /// Keep self-loops and parallel edges from the stub matching
    #[arg(long = "no-simplify")]
    pub no_simplify: bool,
    #[arg(long, value_enum)]
    pub preset: Option<GraphPreset>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Edge-list file
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    /// Probability an attempt uses rank-dependent transmission
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long)]
    pub seed: u64,
    /// Fixed seed node (default: uniform random per replicate)
    #[arg(long = "seed-node")]
    pub seed_node: Option<usize>,
    /// Let rank-regime probabilities exceed 1 instead of capping
    #[arg(long = "no-clip")]
    pub no_clip: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Directory holding previously emitted CSVs
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Validate(a) => cmd_validate(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Hub(a) => cmd_hub(a),
        Command::Zipf(a) => cmd_zipf(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Graph(a) => cmd_graph(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn load_dataset(path: &Path) -> Result<(EgoDataset, egonet::ego::ValidationReport)> {
    let file =
        File::open(path).with_context(|| format!("opening dataset `{}`", path.display()))?;
    Ok(parse_dyad_csv(BufReader::new(file))?)
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let (_, report) = load_dataset(&args.input)?;
    println!(
        "egos={} dyads={} dyads_with_degree={} violations={}",
        report.n_egos,
        report.n_dyads,
        report.n_dyads_with_degree,
        report.violations.len()
    );
    if !report.is_clean() {
        for v in &report.violations {
            eprintln!("violation: ego {}: {}", v.ego_id, v.description);
        }
        bail!("{} invariant violations", report.violations.len());
    }
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let (ds, _) = load_dataset(&args.input)?;
    let max_rank = match args.max_rank {
        Some(r) => r,
        None => ds
            .egos
            .iter()
            .flat_map(|e| e.alters.iter().map(|a| a.rank))
            .max()
            .context("dataset has no dyads")?,
    };

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating `{}`", args.out_dir.display()))?;

    let summary = rank_degree_summary::<f64>(&ds, max_rank);
    write_csv(&args.out_dir.join("rank_summary.csv"), |w| {
        write_rank_summary_csv(&summary, w)
    })?;

    let curves = decile_contact_curves::<f64>(&ds, args.log10, args.bins)?;
    write_csv(&args.out_dir.join("decile_curves.csv"), |w| {
        write_decile_curves_csv(&curves, w)
    })?;

    for (name, agg) in [("mean", Aggregator::Mean), ("median", Aggregator::Median)] {
        println!(
            "prevalence_{name}={}",
            paradox_prevalence::<f64>(&ds, agg)?
        );
    }
    let r1 = rank1_comparison::<f64>(&ds)?;
    println!(
        "rank1: fraction_lower={} ego_mean={} alter1_mean={} ego_median={} alter1_median={}",
        r1.fraction_lower, r1.ego_mean, r1.alter1_mean, r1.ego_median, r1.alter1_median
    );
    match &r1.wilcoxon {
        Ok(t) => println!(
            "rank1 wilcoxon: statistic={} p={} n={} method={}",
            t.statistic,
            t.p_value,
            t.n,
            t.method.as_str()
        ),
        Err(e) => println!("rank1 wilcoxon: unavailable ({e})"),
    }

    let mut m = RunManifest::new("stats");
    m.param("in", args.input.display())
        .param("out-dir", args.out_dir.display())
        .param("max-rank", max_rank)
        .param("bins", args.bins)
        .flag("log10", args.log10);
    m.digest_input("in", &args.input)?;
    m.write_to(&args.out_dir.join("manifest.txt"))
}

fn cmd_hub(args: HubArgs) -> Result<()> {
    let (ds, _) = load_dataset(&args.input)?;
    let curve = hub_proportion_by_rank::<f64>(&ds, args.min_available)?;
    let band = permutation_null_band::<f64>(
        &ds,
        args.perms,
        args.seed,
        args.coverage,
        args.min_available,
    )?;
    write_csv(&args.out, |w| {
        write_hub_prop_csv(&curve, &band, w).map_err(io_other)
    })?;
    println!("eligible_egos={} ranks={}", curve.n_eligible, curve.points.len());

    // The trend test draws from its own stream: master seed + 1.
    match hub_trend_test(&curve, args.trend_perms, args.seed.wrapping_add(1)) {
        Ok(t) => println!(
            "trend: rho={} p={} n={} perms={}",
            t.statistic, t.p_value, t.n, args.trend_perms
        ),
        Err(e) => println!("trend: unavailable ({e})"),
    }

    let mut m = RunManifest::new("hub");
    m.seed(args.seed)
        .param("in", args.input.display())
        .param("out", args.out.display())
        .param("min-available", args.min_available)
        .param("perms", args.perms)
        .param("coverage", args.coverage)
        .param("trend-perms", args.trend_perms);
    m.digest_input("in", &args.input)?;
    m.write_to(&manifest_path_beside(&args.out))
}

fn cmd_zipf(args: ZipfArgs) -> Result<()> {
    let (ds, _) = load_dataset(&args.input)?;
    let fit = zipf_fit::<f64>(&ds, args.min_dyads)?;
    write_csv(&args.out, |w| write_zipf_csv(&fit, w))?;
    println!(
        "exponent={} r_squared={} ranks_used={}",
        fit.exponent, fit.r_squared, fit.ranks_used
    );

    let mut m = RunManifest::new("zipf");
    m.param("in", args.input.display())
        .param("out", args.out.display())
        .param("min-dyads", args.min_dyads);
    m.digest_input("in", &args.input)?;
    m.write_to(&manifest_path_beside(&args.out))
}

fn degree_spec_from(hist: &Option<PathBuf>, mu: f64, sigma: f64) -> Result<DegreeSpec> {
    match hist {
        Some(path) => {
            let file = File::open(path)
                .with_context(|| format!("opening histogram `{}`", path.display()))?;
            Ok(DegreeSpec::Histogram {
                entries: read_degree_histogram(BufReader::new(file))?,
            })
        }
        None => Ok(DegreeSpec::LogNormal { mu, sigma }),
    }
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let params = SynthParams {
        n_egos: args.egos,
        alters_per_ego: args.alters,
        zipf_exponent: args.zipf,
        base_volume: args.base_volume,
        coupling: args.coupling,
        degree_spec: degree_spec_from(&args.hist, args.mu, args.sigma)?,
        min_degree: args.min_degree,
        fraction_unavailable: args.frac_unavailable,
    };
    let ds = synth_ego_dataset(&params, args.seed)?;
    write_csv(&args.out, |w| write_dyad_csv(&ds, w).map_err(io_other))?;
    println!("egos={} dyads={}", ds.egos.len(), ds.n_dyads());

    let mut m = RunManifest::new("synth");
    m.seed(args.seed)
        .param("egos", args.egos)
        .param("alters", args.alters)
        .param("zipf", args.zipf)
        .param("coupling", args.coupling)
        .param("out", args.out.display())
        .param("base-volume", args.base_volume)
        .param("frac-unavailable", args.frac_unavailable)
        .param("min-degree", args.min_degree);
    match &args.hist {
        Some(path) => {
            m.param("hist", path.display());
            m.digest_input("hist", path)?;
        }
        None => {
            m.param("mu", args.mu).param("sigma", args.sigma);
        }
    }
    m.write_to(&manifest_path_beside(&args.out))
}

fn cmd_graph(args: GraphArgs) -> Result<()> {
    let (nodes, spec) = match args.preset {
        Some(GraphPreset::PaperScale) => (PAPER_SCALE_NODES, DegreeSpec::paper_scale()),
        None => (
            args.nodes.context("--nodes is required without --preset")?,
            degree_spec_from(&args.hist, args.mu, args.sigma)?,
        ),
    };
    let seq = sample_degree_sequence(&spec, nodes, args.min_degree, args.seed)?;
    let graph = configuration_graph(&seq.degrees, args.seed, !args.no_simplify)?;
    write_csv(&args.out, |w| write_edge_list(&graph, w))?;
    println!(
        "nodes={} edges={} requested_stubs={}",
        graph.n_nodes(),
        graph.n_edges(),
        seq.sum()
    );

    let mut m = RunManifest::new("graph");
    m.seed(args.seed)
        .param("out", args.out.display())
        .param("min-degree", args.min_degree)
        .flag("no-simplify", args.no_simplify);
    match args.preset {
        Some(GraphPreset::PaperScale) => {
            m.param("preset", "paper-scale");
        }
        None => {
            m.param("nodes", nodes);
            match &args.hist {
                Some(path) => {
                    m.param("hist", path.display());
                    m.digest_input("hist", path)?;
                }
                None => {
                    m.param("mu", args.mu).param("sigma", args.sigma);
                }
            }
        }
    }
    m.write_to(&manifest_path_beside(&args.out))
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let file = File::open(&args.graph)
        .with_context(|| format!("opening graph `{}`", args.graph.display()))?;
    let graph = read_edge_list(BufReader::new(file))?;
    let config = OutbreakConfig {
        beta: args.beta,
        p_mix: args.p,
        steps: args.steps,
        replicates: args.replicates,
        seed_node: match args.seed_node {
            Some(node) => SeedNode::Fixed(node),
            None => SeedNode::UniformRandom,
        },
        master_seed: args.seed,
        clip: !args.no_clip,
    };
    let result = run_ensemble(&graph, &config)?;
    write_csv(&args.out, |w| write_epidemic_csv(&result, args.p, w))?;
    println!(
        "final_mean_total={} clipped_attempts={}",
        result.final_mean_total(),
        result.clipped_attempts.iter().sum::<u64>()
    );

    let mut m = RunManifest::new("simulate");
    m.seed(args.seed)
        .param("graph", args.graph.display())
        .param("beta", args.beta)
        .param("p", args.p)
        .param("steps", args.steps)
        .param("replicates", args.replicates)
        .param("out", args.out.display())
        .flag("no-clip", args.no_clip)
        .param_opt("seed-node", args.seed_node);
    m.digest_input("graph", &args.graph)?;
    m.write_to(&manifest_path_beside(&args.out))
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let mut rows: Vec<(String, String, String)> = Vec::new();
    let push = |rows: &mut Vec<(String, String, String)>, src: &str, key: &str, value: String| {
        rows.push((src.to_string(), key.to_string(), value));
    };

    let zipf = args.dir.join("zipf.csv");
    if zipf.exists() {
        let text = fs::read_to_string(&zipf)?;
        if let Some(fields) = text.lines().nth(1).map(|l| l.split(',').collect::<Vec<_>>()) {
            if fields.len() == 4 {
                push(&mut rows, "zipf", "exponent", fields[0].to_string());
                push(&mut rows, "zipf", "r_squared", fields[2].to_string());
                push(&mut rows, "zipf", "ranks_used", fields[3].to_string());
            }
        }
    }

    let rank_summary = args.dir.join("rank_summary.csv");
    if rank_summary.exists() {
        let text = fs::read_to_string(&rank_summary)?;
        let data_rows: Vec<&str> = text.lines().skip(1).collect();
        push(&mut rows, "rank_summary", "n_ranks", data_rows.len().to_string());
        if let Some(first) = data_rows.first() {
            let fields: Vec<&str> = first.split(',').collect();
            if fields.len() == 6 {
                push(&mut rows, "rank_summary", "rank1_median_k", fields[3].to_string());
            }
        }
    }

    let hub = args.dir.join("hub_prop.csv");
    if hub.exists() {
        let text = fs::read_to_string(&hub)?;
        let mut n_ranks = 0usize;
        let mut below = 0usize;
        let mut above = 0usize;
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                continue;
            }
            let (prop, lo, hi) = (parse_f64(f[3]), parse_f64(f[5]), parse_f64(f[6]));
            n_ranks += 1;
            if prop < lo {
                below += 1;
            }
            if prop > hi {
                above += 1;
            }
        }
        push(&mut rows, "hub", "n_ranks", n_ranks.to_string());
        push(&mut rows, "hub", "ranks_below_null", below.to_string());
        push(&mut rows, "hub", "ranks_above_null", above.to_string());
    }

    let epidemic = args.dir.join("epidemic.csv");
    if epidemic.exists() {
        let text = fs::read_to_string(&epidemic)?;
        // Last row per p_mix is the final step.
        let mut finals: Vec<(String, String)> = Vec::new();
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                continue;
            }
            match finals.iter_mut().find(|(p, _)| p == f[0]) {
                Some(entry) => entry.1 = f[2].to_string(),
                None => finals.push((f[0].to_string(), f[2].to_string())),
            }
        }
        for (p, total) in finals {
            push(&mut rows, "epidemic", &format!("final_mean_total[p={p}]"), total);
        }
    }

    if rows.is_empty() {
        bail!("no known CSVs found in `{}`", args.dir.display());
    }
    write_csv(&args.out, |w| {
        use std::io::Write;
        writeln!(w, "source,key,value")?;
        for (s, k, v) in &rows {
            writeln!(w, "{s},{k},{v}")?;
        }
        Ok(())
    })?;
    println!("summary_rows={}", rows.len());

    let mut m = RunManifest::new("report");
    m.param("dir", args.dir.display())
        .param("out", args.out.display());
    m.write_to(&manifest_path_beside(&args.out))
}

fn parse_f64(s: &str) -> f64 {
    s.parse().unwrap_or(f64::NAN)
}

fn io_other(err: egonet::Error) -> std::io::Error {
    std::io::Error::other(err)
}

fn write_csv<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file =
        File::create(path).with_context(|| format!("creating `{}`", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w).with_context(|| format!("writing `{}`", path.display()))?;
    use std::io::Write;
    w.flush()?;
    Ok(())
}
