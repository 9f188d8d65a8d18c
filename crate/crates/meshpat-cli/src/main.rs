//! Command-line front end: classification runs, individual coincidence
//! proofs with replayable traces, avoidance counting, and the binary /
//! anchored / force-discovery predicates.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use meshpat::classify::{self, PipelineMethod};
use meshpat::enumerate::{self, Basis, Pattern};
use meshpat::force::ForcedPattern;
use meshpat::mesh::Square;
use meshpat::prover::{
    self, lemma_tsa1, lemma_tsa2, search_forces, shadeable_units, shading_lemma_square,
    simultaneous_shading, SearchBudget, Unit,
};
use meshpat::{Force, MeshPattern, Permutation, Verdict};

#[derive(Parser)]
#[command(name = "meshpat", version, about = "Mesh pattern toolkit")]
struct Cli {
    /// Worker threads (also read from MESHPAT_JOBS; 0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify all shadings of one underlying word by coincidence
    Classify(ClassifyArgs),
    /// Prove that containment of one pattern implies another
    Prove(ProveArgs),
    /// Count the permutations avoiding every basis pattern
    CountAv(CountAvArgs),
    /// Decide whether a pattern occurs at most once in any permutation
    Binary(BinaryArgs),
    /// Decide whether every point chains to a boundary-anchored point
    Anchored(AnchoredArgs),
    /// Find a force that makes a pattern binary
    FindForce(FindForceArgs),
    /// List the occurrences of a pattern in a host permutation
    Occ(OccArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Underlying classical pattern, e.g. 12 or 132
    #[arg(long)]
    underlying: String,
    /// Largest host size for the experimental fingerprints
    /// (default: 3, 5 or 8 for words of size 1, 2 or 3)
    #[arg(long)]
    maxn: Option<usize>,
    /// Shading-algorithm depth schedule, e.g. 1,2
    #[arg(long, default_value = "1,2")]
    depths: String,
    /// Methods to run, in order
    #[arg(long, default_value = "sl,tsa1,ssl,tsa2,sa")]
    methods: String,
    /// Largest force size the shading-algorithm stage searches
    #[arg(long)]
    max_force: Option<usize>,
    /// Output directory for class, report and witness files
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProveArgs {
    /// Source pattern in word:mesh-int form
    #[arg(long)]
    p: Option<String>,
    /// Target pattern over the same word
    #[arg(long)]
    q: Option<String>,
    /// Force, e.g. 1:R or 2:U,3:D
    #[arg(long)]
    force: Option<String>,
    /// Recursion depth for the shading algorithm
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Proof method
    #[arg(long, default_value = "sa", value_parser = ["sl", "tsa1", "ssl", "tsa2", "sa"])]
    method: String,
    /// Largest force size searched when no force is given
    #[arg(long)]
    max_force: Option<usize>,
    /// Write the trace to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verify a previously saved trace instead of proving
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct CountAvArgs {
    /// Comma-separated basis patterns (classical words or word:mesh-int)
    #[arg(long)]
    basis: String,
    #[arg(long, default_value_t = 8)]
    maxn: usize,
}

#[derive(Args)]
struct BinaryArgs {
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    force: Option<String>,
    /// Restrict hosts to the avoidance class of this basis
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Args)]
struct AnchoredArgs {
    #[arg(long)]
    pattern: String,
}

#[derive(Args)]
struct FindForceArgs {
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Args)]
struct OccArgs {
    /// Host permutation
    #[arg(long)]
    host: String,
    #[arg(long)]
    pattern: String,
    /// Count maximal-strength occurrences with respect to this force
    #[arg(long)]
    force: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = if cli.jobs > 0 {
        cli.jobs
    } else {
        std::env::var("MESHPAT_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    };
    if jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot configure {jobs} workers: {e}");
            return ExitCode::FAILURE;
        }
    }
    let run = match cli.command {
        Command::Classify(args) => run_classify(args),
        Command::Prove(args) => run_prove(args),
        Command::CountAv(args) => run_count_av(args),
        Command::Binary(args) => run_binary(args),
        Command::Anchored(args) => run_anchored(args),
        Command::FindForce(args) => run_find_force(args),
        Command::Occ(args) => run_occ(args),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn parse_pattern(text: &str) -> Result<MeshPattern> {
    text.parse::<MeshPattern>()
        .with_context(|| format!("invalid pattern {text:?}"))
}

fn parse_force(text: &str) -> Result<Force> {
    text.parse::<Force>()
        .with_context(|| format!("invalid force {text:?}"))
}

fn parse_basis(text: &str) -> Result<Basis> {
    let patterns = text
        .split(',')
        .map(parse_pattern)
        .collect::<Result<Vec<_>>>()?;
    Basis::new(patterns).map_err(|e| anyhow!("invalid basis: {e}"))
}

fn default_maxn(size: usize) -> usize {
    // experimentally sufficient bounds for small sizes; larger words cap
    // at desk scale
    match size {
        0 => 1,
        1 => 3,
        2 => 5,
        _ => 8,
    }
}

fn run_classify(args: ClassifyArgs) -> Result<()> {
    let underlying: Permutation = args
        .underlying
        .parse()
        .with_context(|| format!("invalid word {:?}", args.underlying))?;
    if underlying.is_empty() {
        bail!("the empty pattern is excluded from classification");
    }
    let maxn = args.maxn.unwrap_or_else(|| default_maxn(underlying.len()));
    let depths = args
        .depths
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("bad depth {s:?}"))
                .and_then(|d| {
                    if d == 0 {
                        Err(anyhow!("depths must be positive"))
                    } else {
                        Ok(d)
                    }
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let methods = args
        .methods
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| PipelineMethod::parse(s.trim()).map_err(|e| anyhow!("{e}")))
        .collect::<Result<Vec<_>>>()?;
    let max_force = args.max_force.unwrap_or_else(|| underlying.len().min(3));

    let full_bound = (underlying.len() + 1) * (underlying.len() + 1) + underlying.len();
    if maxn < full_bound {
        eprintln!(
            "note: fingerprints use hosts up to size {maxn}; the conjectured \
             exact bound for size {} is {full_bound}, so experimental classes \
             are provisional",
            underlying.len()
        );
    }

    let run = classify::run_pipeline(&underlying, maxn, &methods, &depths, max_force)
        .map_err(|e| anyhow!("{e}"))?;
    print!("{}", run.report.to_tsv());
    println!();
    print!("{}", run.report.histogram_tsv());
    println!();
    println!(
        "classes\t{}\npatterns\t{}\nall_resolved\t{}",
        run.report.num_classes, run.report.num_patterns, run.report.all_resolved
    );

    if let Some(dir) = args.out {
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let classes: Vec<_> = run.graphs.iter().map(|g| g.class.clone()).collect();
        classify::save_results(&dir.join("classes.txt"), &classes)?;
        fs::write(dir.join("report.tsv"), run.report.to_tsv())?;
        fs::write(dir.join("histogram.tsv"), run.report.histogram_tsv())?;
        classify::write_witnesses(&dir.join("witnesses.tsv"), &classes, maxn, 300)
            .map_err(|e| anyhow!("{e}"))?;
        println!("written\t{}", dir.display());
    }
    Ok(())
}

fn run_prove(args: ProveArgs) -> Result<()> {
    if let Some(path) = args.replay {
        let text = fs::read_to_string(&path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let result = prover::parse_trace_text(&text).map_err(|e| anyhow!("{e}"))?;
        prover::verify(&result).map_err(|e| anyhow!("trace does not replay: {e}"))?;
        println!(
            "replayed\t{}\t{} => {}\tverdict {}",
            result.method,
            result.source,
            result.target,
            verdict_str(result.verdict)
        );
        return Ok(());
    }

    let p = parse_pattern(args.p.as_deref().ok_or_else(|| anyhow!("--p is required"))?)?;
    let q = parse_pattern(args.q.as_deref().ok_or_else(|| anyhow!("--q is required"))?)?;
    if p.pattern() != q.pattern() {
        bail!("patterns must share the underlying word");
    }
    let added: Vec<Square> = q.mask_to_squares(q.shading_difference(&p));
    let force = args.force.as_deref().map(parse_force).transpose()?;

    let result = match args.method.as_str() {
        "sl" | "tsa1" => {
            let [square] = added[..] else {
                bail!(
                    "--method {} proves one extra square; got {}",
                    args.method,
                    added.len()
                )
            };
            if args.method == "sl" {
                shading_lemma_square(&p, square).map_err(|e| anyhow!("{e}"))?
            } else {
                lemma_tsa1(&p, square).map_err(|e| anyhow!("{e}"))?
            }
        }
        "ssl" => prove_ssl(&p, &added)?,
        "tsa2" => {
            let force = force.ok_or_else(|| anyhow!("--method tsa2 needs --force"))?;
            lemma_tsa2(&p, &force, &added).map_err(|e| anyhow!("{e}"))?
        }
        "sa" => match force {
            Some(force) => prover::shading_algorithm(&p, &q, &force, args.depth)
                .map_err(|e| anyhow!("{e}"))?,
            None => search_forces(
                &p,
                &q,
                SearchBudget {
                    max_depth: args.depth,
                    max_force_size: args.max_force.unwrap_or_else(|| p.size().min(3)),
                },
            )
            .map_err(|e| anyhow!("{e}"))?,
        },
        other => bail!("unknown method {other:?}"),
    };

    prover::verify(&result).map_err(|e| anyhow!("internal trace check failed: {e}"))?;
    let text = prover::trace_text(&result);
    print!("{text}");
    if let Some(path) = args.out {
        fs::write(&path, &text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

/// Searches the shadeable-unit combinations for one whose union is exactly
/// the requested square set.
fn prove_ssl(p: &MeshPattern, added: &[Square]) -> Result<meshpat::ProofResult> {
    let want = p.with_squares(added).map_err(|e| anyhow!("{e}"))?;
    let per_point: Vec<(usize, Vec<Unit>)> = (1..=p.size())
        .map(|g| shadeable_units(p, g).map(|u| (g, u)))
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("{e}"))?;

    fn rec(
        p: &MeshPattern,
        want: &MeshPattern,
        per_point: &[(usize, Vec<Unit>)],
        at: usize,
        picks: &mut Vec<(usize, Unit)>,
    ) -> Option<Vec<(usize, Unit)>> {
        if at == per_point.len() {
            let squares: Vec<Square> = picks.iter().flat_map(|(_, u)| u.squares()).collect();
            let got = p.with_squares(&squares).ok()?;
            return (got == *want).then(|| picks.clone());
        }
        if let Some(found) = rec(p, want, per_point, at + 1, picks) {
            return Some(found);
        }
        let (g, ref units) = per_point[at];
        for &u in units {
            picks.push((g, u));
            let found = rec(p, want, per_point, at + 1, picks);
            picks.pop();
            if let Some(found) = found {
                return Some(found);
            }
        }
        None
    }

    let mut picks: Vec<(usize, Unit)> = Vec::new();
    match rec(p, &want, &per_point, 0, &mut picks) {
        Some(picks) => simultaneous_shading(p, &picks).map_err(|e| anyhow!("{e}")),
        None => Ok(meshpat::ProofResult {
            verdict: Verdict::Failure,
            method: meshpat::Method::Ssl,
            source: p.clone(),
            target: want,
            coincidence: false,
            trace: None,
        }),
    }
}

fn run_count_av(args: CountAvArgs) -> Result<()> {
    let basis = parse_basis(&args.basis)?;
    let counts = enumerate::count_av(&basis, args.maxn);
    println!("n\tcount");
    for (n, c) in counts.iter().enumerate() {
        println!("{n}\t{c}");
    }
    Ok(())
}

fn pattern_arg(pattern: &str, force: Option<&str>) -> Result<Pattern> {
    let mesh = parse_pattern(pattern)?;
    Ok(match force {
        Some(f) => Pattern::Forced(
            ForcedPattern::new(mesh, parse_force(f)?).map_err(|e| anyhow!("{e}"))?,
        ),
        None => Pattern::Mesh(mesh),
    })
}

fn run_binary(args: BinaryArgs) -> Result<()> {
    let pattern = pattern_arg(&args.pattern, args.force.as_deref())?;
    let basis = args.basis.as_deref().map(parse_basis).transpose()?;
    let (binary, witness) = enumerate::is_binary(&pattern, basis.as_ref());
    match witness {
        Some(w) => println!("binary\tfalse\twitness\t{w}"),
        None => {
            debug_assert!(binary);
            println!("binary\ttrue");
        }
    }
    Ok(())
}

fn run_anchored(args: AnchoredArgs) -> Result<()> {
    let pattern = parse_pattern(&args.pattern)?;
    let (anchored, chain) = enumerate::is_anchored(&pattern);
    println!("anchored\t{anchored}");
    for (i, next) in chain.iter().enumerate() {
        let link = match next {
            Some(n) if *n == i + 1 => "boundary".to_string(),
            Some(n) => format!("point {n}"),
            None => "unanchored".to_string(),
        };
        println!("point\t{}\t{link}", i + 1);
    }
    Ok(())
}

fn run_find_force(args: FindForceArgs) -> Result<()> {
    let pattern = parse_pattern(&args.pattern)?;
    let basis = args.basis.as_deref().map(parse_basis).transpose()?;
    let force =
        enumerate::find_binary_force(&pattern, basis.as_ref()).map_err(|e| anyhow!("{e}"))?;
    println!("force\t{force}");
    Ok(())
}

fn run_occ(args: OccArgs) -> Result<()> {
    let host: Permutation = args
        .host
        .parse()
        .with_context(|| format!("invalid host {:?}", args.host))?;
    let pattern = pattern_arg(&args.pattern, args.force.as_deref())?;
    let occs = pattern.occurrences(&host);
    for occ in &occs {
        let letters: Vec<String> = occ.letters(&host).iter().map(|v| v.to_string()).collect();
        println!("{}\t{}", occ, letters.join(","));
    }
    println!("count\t{}", occs.len());
    Ok(())
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Success => "success",
        Verdict::Failure => "failure",
    }
}
