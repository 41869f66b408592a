use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hlw_core::colorings::{
    h_set, levels_coloring, levels_property_check, pairing_coloring, pairing_property_check, random_coloring,
    zdensity_coloring, SplittingAssignment,
};
use hlw_core::game::{play, StrategyId};
use hlw_core::ideals::{
    column_profile, density_profile, interval_count, max_antichain_weight, minimal_elements, phi, phi_bar_profile,
    summable_weight, Comparison, DensityMode, NatSet,
};
use hlw_core::katetov::{
    builtin_witness, check_morphism, fin_to_z_one_point_mutation, parse_morphism, parse_presentation, BUILTIN_NAMES,
};
use hlw_core::search::{brute_force_max, search_best, verify_certificate, zdensity_exhaustive, Mode, SearchBudget};
use hlw_core::{frac_string, text, Error};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Serialize)]
#[command(name = "hlw", version, about = "Finite checks around the Halpern–Läuchli property on 2^<ω")]
struct Cli {
    /// Print human-readable tables to standard error.
    #[arg(long, global = true)]
    #[serde(skip)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Levels on which a coloring is constant on a tree.
    Hset(HsetArgs),
    /// Build the density construction and check every band identity.
    Zdensity(ZdensityArgs),
    /// Largest uniformly monochromatic level set of a perfect subtree.
    Search(SearchArgs),
    /// Largest level set whose levels are each monochromatic.
    SearchLevels(SearchArgs),
    /// Pairing coloring and its disjointness property.
    Pairing(PairingArgs),
    /// Splitting-levels coloring and its bichromatic property.
    Levels(LevelsArgs),
    /// Exact statistics of a natural, grid or node set.
    Profile(ProfileArgs),
    /// Play the evasion game and profile player II's set.
    Game(GameArgs),
    /// Check a Katětov morphism at finite scale.
    Katetov(KatetovArgs),
}

#[derive(Args, Serialize)]
struct HsetArgs {
    #[arg(long)]
    coloring: PathBuf,
    #[arg(long)]
    tree: PathBuf,
}

#[derive(Args, Serialize)]
struct ZdensityArgs {
    /// Number of bands.
    #[arg(long = "nmax", default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=4))]
    n_max: u8,
}

#[derive(Args, Serialize)]
struct SearchArgs {
    /// Coloring file; without it a seeded random coloring is used.
    #[arg(long)]
    coloring: Option<PathBuf>,
    /// Depth of the random coloring.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=20))]
    depth: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Height of the embedded perfect tree.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=12))]
    height: u8,
    #[arg(long, default_value_t = 1)]
    min_levels: usize,
    #[arg(long, default_value_t = 50_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..=256))]
    workers: u16,
    /// Cross-check against exhaustive enumeration.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Serialize)]
struct PairingArgs {
    /// Base levels of the matchings.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    base: Vec<usize>,
    /// Matchings kept per base level.
    #[arg(long, default_value_t = 1000)]
    cap: usize,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(2..=12))]
    depth: u8,
}

#[derive(Args, Serialize)]
struct LevelsArgs {
    /// Domain: all strings of at most this length.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(0..=8))]
    max_len: u8,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=20))]
    depth: u8,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CmpArg {
    AtLeast,
    MoreThan,
}

#[derive(Args, Serialize)]
#[command(group(ArgGroup::new("input").required(true).args(["natset", "gridset", "nodeset"])))]
struct ProfileArgs {
    #[arg(long)]
    natset: Option<PathBuf>,
    #[arg(long)]
    gridset: Option<PathBuf>,
    #[arg(long)]
    nodeset: Option<PathBuf>,
    /// Interval length for the interval count.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    interval_len: u64,
    #[arg(long, default_value_t = 2)]
    threshold: u64,
    #[arg(long, value_enum, default_value_t = CmpArg::AtLeast)]
    cmp: CmpArg,
}

#[derive(Args, Serialize)]
struct GameArgs {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u16).range(1..=1024))]
    horizon: u16,
    #[arg(long, default_value = "tree-builder")]
    player_one: String,
    #[arg(long, default_value = "min-legal-increasing")]
    player_two: String,
    /// Moves and answers live in [0, window).
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..=1 << 20))]
    window: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
#[command(group(ArgGroup::new("which").required(true).args(["builtin", "mutation", "morphism", "list"])))]
struct KatetovArgs {
    /// A registered witness.
    #[arg(long)]
    builtin: Option<String>,
    /// The one-point mutation of fin_to_z_identity.
    #[arg(long)]
    mutation: bool,
    /// Morphism file, checked against --source and --target.
    #[arg(long, requires_all = ["source", "target"])]
    morphism: Option<PathBuf>,
    /// Presentation of the ideal pulled back.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Presentation of the ideal receiving preimages.
    #[arg(long)]
    target: Option<PathBuf>,
    /// List builtin witnesses.
    #[arg(long)]
    list: bool,
}

struct Outcome {
    pass: bool,
    seed: Option<u64>,
    result: Value,
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::NotFound(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn run(cmd: &Command, verbose: bool) -> Result<Outcome, Error> {
    match cmd {
        Command::Hset(a) => {
            let c = text::parse_coloring(&read(&a.coloring)?)?;
            let t = text::parse_tree(&read(&a.tree)?)?;
            let levels = h_set(&c, &t)?;
            if verbose {
                eprintln!("H_c(p) = {:?}", levels.members());
            }
            Ok(Outcome {
                pass: true,
                seed: None,
                result: json!({ "depth": c.depth(), "levels": levels.members() }),
            })
        }
        Command::Zdensity(a) => {
            let inst = zdensity_coloring(usize::from(a.n_max))?;
            let report = zdensity_exhaustive(&inst)?;
            let bijections: Vec<Value> = (1..=inst.n_max)
                .map(|n| {
                    let table: BTreeMap<String, u64> = inst
                        .assignment_table(n)
                        .into_iter()
                        .map(|(l, v)| (l.to_string(), v))
                        .collect();
                    json!({ "band": n, "bijective": inst.is_bijection(n), "table": table })
                })
                .collect();
            let bijective = (1..=inst.n_max).all(|n| inst.is_bijection(n));
            if verbose {
                eprintln!("{:>4} {:>12} {:>8} {:>6}", "band", "selection", "expected", "actual");
                for c in &report.checks {
                    eprintln!("{:>4} {:>12} {:>8} {:>6}", c.band, format!("{:?}", c.selection), c.expected, c.actual);
                }
            }
            Ok(Outcome {
                pass: report.all_pass && bijective && inst.host_width_ok(),
                seed: None,
                result: json!({
                    "depth": inst.depth(),
                    "band_checks": report.checks,
                    "all_pass": report.all_pass,
                    "bijections": bijections,
                    "host_width_ok": inst.host_width_ok(),
                }),
            })
        }
        Command::Search(a) => search(a, Mode::Uniform, verbose),
        Command::SearchLevels(a) => search(a, Mode::ByLevels, verbose),
        Command::Pairing(a) => {
            let base: BTreeSet<usize> = a.base.iter().copied().collect();
            let (c, system) = pairing_coloring(&base, a.cap, usize::from(a.depth))?;
            let check = pairing_property_check(&c, &system)?;
            if verbose {
                for (i, (x, set)) in system.matchings.iter().zip(&system.level_sets).enumerate() {
                    eprintln!("x_{i}: level {} A = {:?}", x.level, set.members());
                }
                eprintln!("trees checked {}, violations {}", check.trees_checked, check.violation_count);
            }
            Ok(Outcome {
                pass: check.pass,
                seed: None,
                result: json!({ "system": system, "check": check }),
            })
        }
        Command::Levels(a) => {
            let depth = usize::from(a.depth);
            let domain = SplittingAssignment::all_strings_up_to(usize::from(a.max_len));
            let assignment = SplittingAssignment::residue(domain, depth)?;
            let c = levels_coloring(&assignment, depth)?;
            let check = levels_property_check(&c, &assignment)?;
            let sets: BTreeMap<String, Vec<usize>> = assignment
                .domain()
                .iter()
                .zip(assignment.sets())
                .map(|(t, s)| (t.token(), s.members().to_vec()))
                .collect();
            if verbose {
                for (t, s) in &sets {
                    eprintln!("S({t}) = {s:?}");
                }
            }
            Ok(Outcome {
                pass: check.pass,
                seed: None,
                result: json!({ "splitting": sets, "check": check }),
            })
        }
        Command::Profile(a) => profile(a, verbose),
        Command::Game(a) => {
            let s1 = StrategyId::parse(&a.player_one)?;
            let s2 = StrategyId::parse(&a.player_two)?;
            let t = play(usize::from(a.horizon), &s1, &s2, a.window, a.seed)?;
            let k = NatSet::new(a.window, t.outcome.iter().copied())?;
            if verbose {
                for (i, r) in t.rounds.iter().enumerate() {
                    eprintln!("round {i:>3}: |I| = {:>6}, k = {}", r.move_i.len(), r.k);
                }
            }
            Ok(Outcome {
                pass: true,
                seed: Some(a.seed),
                result: json!({
                    "transcript": t,
                    "k_profile": {
                        "dyadic_density": density_profile(&k, DensityMode::Dyadic).to_strings(),
                        "summable_weight": frac_string(&summable_weight(&k)),
                    },
                }),
            })
        }
        Command::Katetov(a) => katetov(a, verbose),
    }
}

fn search(a: &SearchArgs, mode: Mode, verbose: bool) -> Result<Outcome, Error> {
    let (c, seed) = match &a.coloring {
        Some(path) => (text::parse_coloring(&read(path)?)?, None),
        None => (random_coloring(usize::from(a.depth), a.seed)?, Some(a.seed)),
    };
    let budget = SearchBudget {
        height: usize::from(a.height),
        min_levels: a.min_levels,
        node_budget: a.budget,
        workers: usize::from(a.workers),
    };
    let out = search_best(&c, &budget, mode)?;
    let verified = verify_certificate(&c, &out.certificate)?;
    let mut result = json!({
        "m": out.m,
        "complete": out.complete,
        "meets_min": out.meets_min,
        "explored": out.explored,
        "certificate": out.certificate.to_record(),
        "verified": verified,
    });
    let mut pass = verified;
    if a.oracle {
        let oracle = brute_force_max(&c, &budget, mode)?;
        let agree = oracle.m == out.m;
        pass &= agree;
        result["oracle"] = json!({
            "m": oracle.m,
            "certificate": oracle.certificate.to_record(),
            "agree": agree,
        });
    }
    if verbose {
        let r = out.certificate.to_record();
        eprintln!("m = {}", out.m);
        eprintln!("split nodes: {:?}", r.split_nodes);
        eprintln!("leaf images: {:?}", r.leaf_images);
        eprintln!("levels:      {:?}", r.levels);
    }
    Ok(Outcome {
        pass,
        seed,
        result,
    })
}

fn profile(a: &ProfileArgs, verbose: bool) -> Result<Outcome, Error> {
    let result = if let Some(path) = &a.natset {
        let set = text::parse_natset(&read(path)?)?;
        let cmp = match a.cmp {
            CmpArg::AtLeast => Comparison::AtLeast,
            CmpArg::MoreThan => Comparison::MoreThan,
        };
        let dyadic = density_profile(&set, DensityMode::Dyadic).to_strings();
        if verbose {
            for (n, d) in dyadic.iter().enumerate() {
                eprintln!("window {n:>2}: {d}");
            }
        }
        json!({
            "kind": "natset",
            "bound": set.bound(),
            "size": set.len(),
            "dyadic_density": dyadic,
            "natural_density": density_profile(&set, DensityMode::Natural).to_strings(),
            "summable_weight": frac_string(&summable_weight(&set)),
            "interval_count": interval_count(&set, a.interval_len, a.threshold, cmp)?,
        })
    } else if let Some(path) = &a.gridset {
        let set = text::parse_gridset(&read(path)?)?;
        let columns = column_profile(&set);
        if verbose {
            for (c, k) in columns.iter().enumerate() {
                eprintln!("column {c:>3}: {k}");
            }
        }
        json!({ "kind": "gridset", "bound": set.bound(), "columns": columns })
    } else {
        let path = a.nodeset.as_ref().expect("clap enforces one input");
        let set = text::parse_nodeset(&read(path)?)?;
        let bar = phi_bar_profile(&set, set.depth())?;
        if verbose {
            for (n, v) in bar.iter().enumerate() {
                eprintln!("phi(a \\ 2^<{n}) = {}", frac_string(v));
            }
        }
        json!({
            "kind": "nodeset",
            "depth": set.depth(),
            "size": set.len(),
            "minimal_elements": minimal_elements(&set).nodes().iter().map(|s| s.token()).collect::<Vec<_>>(),
            "phi": frac_string(&phi(&set)),
            "max_antichain_weight": frac_string(&max_antichain_weight(&set)),
            "phi_bar_profile": bar.iter().map(frac_string).collect::<Vec<_>>(),
        })
    };
    Ok(Outcome {
        pass: true,
        seed: None,
        result,
    })
}

fn katetov(a: &KatetovArgs, verbose: bool) -> Result<Outcome, Error> {
    if a.list {
        return Ok(Outcome {
            pass: true,
            seed: None,
            result: json!({ "builtins": BUILTIN_NAMES }),
        });
    }
    let (f, source, target) = if let Some(name) = &a.builtin {
        builtin_witness(name)?
    } else if a.mutation {
        fin_to_z_one_point_mutation()?
    } else {
        let source = parse_presentation(&read(a.source.as_ref().expect("required by clap"))?)?;
        let target = parse_presentation(&read(a.target.as_ref().expect("required by clap"))?)?;
        let path = a.morphism.as_ref().expect("checked by the group");
        let f = parse_morphism(&read(path)?, target.ground, source.ground)?;
        (f, source, target)
    };
    let report = check_morphism(&f, &source, &target)?;
    if verbose {
        eprintln!("{} generators, {} violations", report.generators_checked, report.violations.len());
        for v in &report.violations {
            eprintln!("generator {}: {}", v.generator, v.value);
        }
    }
    Ok(Outcome {
        pass: report.pass,
        seed: None,
        result: to_value(&report),
    })
}

/// Property failures exit 1; malformed input and bad arguments exit 2.
fn error_code(e: &Error) -> u8 {
    match e {
        Error::Protocol(_) | Error::Invariant(_) | Error::Construction(_) | Error::Budget(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = to_value(&cli.command);
    match run(&cli.command, cli.verbose) {
        Ok(out) => {
            let report = json!({
                "tool": "hlw",
                "version": VERSION,
                "config": config,
                "seed": out.seed,
                "pass": out.pass,
                "result": out.result,
            });
            let body = serde_json::to_string_pretty(&report).expect("report serializes");
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(io::stdout().lock(), "{body}");
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("hlw: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
