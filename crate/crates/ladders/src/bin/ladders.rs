use clap::{Args, Parser, Subcommand};
use ladders::club;
use ladders::cohen;
use ladders::diamond;
use ladders::extension;
use ladders::gen;
use ladders::io as lio;
use ladders::rho;
use ladders::Report;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit status: 0 run completed (verdicts are printed, see --strict),
/// 1 strict-mode verdict failure, 2 parse error, 3 precondition violation,
/// 4 internal invariant breach.
#[derive(Parser)]
#[command(name = "ladders", version, about = "Finite lattice and ladder toolkit")]
struct Cli {
    /// Exit nonzero when any printed verdict fails
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run order/lattice/ladder/breadth checks on a poset document
    Check(CheckArgs),
    /// Extend a lattice by a cofinal copy of a subset
    Extend(ExtendArgs),
    /// Table operations for the level-indexed order
    #[command(subcommand)]
    Rho(RhoCmd),
    /// Staged breadth-2 ladder construction
    #[command(subcommand)]
    Club(ClubCmd),
    /// Staged tree-labelled ladder construction
    #[command(subcommand)]
    Diamond(DiamondCmd),
    /// Ideal families, conditions, and candidate sets
    #[command(subcommand)]
    Cohen(CohenCmd),
    /// Re-export a poset document (canonical JSON or DOT)
    Export(ExportArgs),
    /// Run the full acceptance suite
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    /// Check the n-ladder property for this bound
    #[arg(long)]
    ladder: Option<usize>,
    /// Compute the breadth
    #[arg(long)]
    breadth: bool,
    /// Check that the listed elements form an ideal (comma separated)
    #[arg(long)]
    ideal: Option<String>,
}

#[derive(Args)]
struct ExtendArgs {
    file: PathBuf,
    /// The cofinal meet-subsemilattice, comma separated
    #[arg(long)]
    subset: String,
    /// Ladder parameter n
    #[arg(long)]
    ladder: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RhoCmd {
    /// Check the table axioms and report the lower-finiteness profile
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        finiteness_bound: u32,
    },
    /// Build a table from a seeded family via the inductive construction
    Build {
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        window: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the non-maximality witness set for a threshold function
    Witness {
        file: PathBuf,
        /// Non-decreasing values, comma separated
        #[arg(long)]
        f: String,
        /// Box as levels,window,mmax (defaults to the table with f headroom)
        #[arg(long)]
        r#box: Option<String>,
    },
    /// Materialize a box as a core poset document
    ExportBox {
        file: PathBuf,
        #[arg(long, short = 'A')]
        levels: u32,
        #[arg(long, short = 'N')]
        window: u32,
        #[arg(long, short = 'M')]
        mmax: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ClubCmd {
    /// Build a staged state and run the stage checks
    Build {
        /// Number of built stages (defaults to the schedule length)
        #[arg(long)]
        stages: Option<usize>,
        /// Widths of the built stages, comma separated
        #[arg(long)]
        width_schedule: String,
        /// Base level width (defaults to four times the first stage width)
        #[arg(long)]
        base_width: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict stage chains to one parity bit
        #[arg(long)]
        target_parity: Option<u8>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write a DOT rendering of the order
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DiamondCmd {
    /// Build a state with the given successor stages
    Build {
        #[arg(long)]
        stages: u32,
        #[arg(long)]
        width: u32,
        /// Accepted for interface symmetry; the construction is deterministic
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write DOT renderings of the order and the tree
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Re-check a serialized state
    Check { file: PathBuf },
    /// Emit the branch union through a leaf as a poset document
    Branch {
        file: PathBuf,
        #[arg(long)]
        leaf: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CohenCmd {
    /// Validate an ideal family document
    Validate { file: PathBuf },
    /// Compute the candidate set of a condition
    Cp { family: PathBuf, condition: PathBuf },
    /// Run the density step above an element
    Density {
        family: PathBuf,
        /// Starting condition (defaults to the empty condition)
        #[arg(long)]
        condition: Option<PathBuf>,
        #[arg(long)]
        x: String,
    },
    /// Check the union of a compatible set of conditions
    Filter { family: PathBuf, conditions: PathBuf },
}

#[derive(Args)]
struct ExportArgs {
    file: PathBuf,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Run a single criterion by number
    #[arg(long)]
    only: Option<usize>,
}

enum AppError {
    Parse(String),
    Precondition(String),
    Internal(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Parse(_) => 2,
            AppError::Precondition(_) => 3,
            AppError::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Parse(m) | AppError::Precondition(m) | AppError::Internal(m) => m,
        }
    }
}

fn parse_err(e: impl std::fmt::Display) -> AppError {
    AppError::Parse(e.to_string())
}

fn pre_err(e: impl std::fmt::Display) -> AppError {
    AppError::Precondition(e.to_string())
}

fn read_file(path: &PathBuf) -> Result<String, AppError> {
    std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), AppError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| AppError::Internal(format!("{}: {e}", p.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn load_poset(path: &PathBuf) -> Result<ladders::FinitePoset, AppError> {
    lio::poset_from_json(&read_file(path)?).map_err(parse_err)
}

fn load_rho(path: &PathBuf) -> Result<rho::RhoTable, AppError> {
    let doc: rho::RhoDoc = serde_json::from_str(&read_file(path)?).map_err(parse_err)?;
    doc.to_table().map_err(parse_err)
}

fn parse_subset(p: &ladders::FinitePoset, csv: &str) -> Result<ladders::bits::Bits, AppError> {
    let mut bits = ladders::bits::Bits::new(p.len());
    for id in csv.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i = p
            .index(id)
            .ok_or_else(|| pre_err(format!("unknown element `{id}`")))?;
        bits.set(i);
    }
    Ok(bits)
}

fn parse_u32_list(csv: &str) -> Result<Vec<u32>, AppError> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| parse_err(format!("bad number `{s}`"))))
        .collect()
}

/// Tracks printed verdicts so --strict can flip the exit status.
struct Verdicts {
    any_fail: bool,
}

impl Verdicts {
    fn new() -> Verdicts {
        Verdicts { any_fail: false }
    }

    fn show(&mut self, label: &str, rep: &Report) {
        if !rep.passed() {
            self.any_fail = true;
        }
        println!("{label}: {rep}");
    }
}

fn run(cli: Cli) -> Result<bool, AppError> {
    let mut verdicts = Verdicts::new();
    match cli.command {
        Command::Check(args) => {
            let p = load_poset(&args.file)?;
            verdicts.show("valid-poset", &p.validate());
            verdicts.show("lattice", &p.is_lattice());
            if let Some(n) = args.ladder {
                verdicts.show(&format!("{n}-ladder"), &p.is_n_ladder(n));
            }
            if args.breadth {
                match p.breadth() {
                    Ok(b) => println!("breadth: {b}"),
                    Err(e) => return Err(pre_err(e)),
                }
            }
            if let Some(ideal) = &args.ideal {
                let bits = parse_subset(&p, ideal)?;
                verdicts.show("ideal", &p.is_ideal(&bits));
                verdicts.show("proper-ideal", &p.is_proper_ideal(&bits));
            }
        }
        Command::Extend(args) => {
            let p = load_poset(&args.file)?;
            let subset = parse_subset(&p, &args.subset)?;
            let (ext, res) =
                extension::extend_by_cofinal_copy(&p, &subset, args.ladder).map_err(pre_err)?;
            let out = serde_json::json!({
                "extended": lio::canonical_doc(&ext),
                "embedded_ideal": res.embedded_ideal,
                "new_elements": res.new_elements,
            });
            write_output(&args.output, &serde_json::to_string_pretty(&out).unwrap())?;
        }
        Command::Rho(cmd) => match cmd {
            RhoCmd::Check {
                file,
                finiteness_bound,
            } => {
                let t = load_rho(&file)?;
                verdicts.show("rho-axioms", &t.check_axioms());
                verdicts.show(
                    "lower-finiteness",
                    &t.check_lower_finiteness(finiteness_bound),
                );
            }
            RhoCmd::Build {
                levels,
                window,
                seed,
                output,
            } => {
                let mut rng = gen::substream(seed, "rho-f-family");
                let family: Vec<Vec<u32>> = (0..levels)
                    .map(|_| gen::random_nondecreasing(&mut rng, window as usize, 5))
                    .collect();
                let t = rho::build_rho(levels, window, &family, &rho::BuildChoices::default())
                    .map_err(pre_err)?;
                if !t.check_axioms().passed() {
                    return Err(AppError::Internal(
                        "built table fails its own axioms".to_string(),
                    ));
                }
                write_output(&output, &serde_json::to_string_pretty(&t.to_doc()).unwrap())?;
            }
            RhoCmd::Witness { file, f, r#box } => {
                let t = load_rho(&file)?;
                let f = parse_u32_list(&f)?;
                let kbox = match r#box {
                    Some(b) => {
                        let v = parse_u32_list(&b)?;
                        if v.len() != 3 {
                            return Err(parse_err("box must be levels,window,mmax"));
                        }
                        rho::KBox::new(v[0], v[1], v[2])
                    }
                    None => rho::KBox::new(
                        t.levels(),
                        t.window().min(f.len() as u32),
                        f.iter().copied().max().unwrap_or(0) + 2,
                    ),
                };
                let rep = rho::nonmax_witness(&t, &f, &kbox).map_err(pre_err)?;
                verdicts.show("nonmax-witness", &rep);
            }
            RhoCmd::ExportBox {
                file,
                levels,
                window,
                mmax,
                output,
            } => {
                let t = load_rho(&file)?;
                let (p, _) = t
                    .materialize(&rho::KBox::new(levels, window, mmax))
                    .map_err(pre_err)?;
                write_output(&output, &lio::poset_to_json(&p))?;
            }
        },
        Command::Club(ClubCmd::Build {
            stages,
            width_schedule,
            base_width,
            seed,
            target_parity,
            output,
            dot,
        }) => {
            let widths = parse_u32_list(&width_schedule)?;
            if let Some(stages) = stages {
                if stages != widths.len() {
                    return Err(parse_err(format!(
                        "--stages {stages} does not match schedule of length {}",
                        widths.len()
                    )));
                }
            }
            let state = club::build(&widths, base_width, seed, target_parity).map_err(pre_err)?;
            // artifacts land before any verdict prints
            let out = serde_json::json!({
                "state": state.to_doc(),
            });
            write_output(&output, &serde_json::to_string_pretty(&out).unwrap())?;
            if let Some(dot_path) = dot {
                std::fs::write(&dot_path, lio::export_dot(state.poset()))
                    .map_err(|e| AppError::Internal(e.to_string()))?;
            }
            verdicts.show("stage-properties", &state.check_stage_properties());
            verdicts.show("breadth-2", &state.check_breadth2());
        }
        Command::Diamond(cmd) => match cmd {
            DiamondCmd::Build {
                stages,
                width,
                seed: _,
                output,
                dot,
            } => {
                let state = diamond::build(stages, width).map_err(pre_err)?;
                write_output(
                    &output,
                    &serde_json::to_string_pretty(&state.to_doc()).unwrap(),
                )?;
                if let Some(dot_path) = dot {
                    let mut text = lio::export_dot(state.poset());
                    text.push_str(&tree_dot(&state));
                    std::fs::write(&dot_path, text)
                        .map_err(|e| AppError::Internal(e.to_string()))?;
                }
                verdicts.show("properties", &state.check_properties());
                verdicts.show("lower-cover-profile", &state.lower_cover_profile());
            }
            DiamondCmd::Check { file } => {
                let doc: diamond::DiamondDoc =
                    serde_json::from_str(&read_file(&file)?).map_err(parse_err)?;
                let state = diamond::DiamondState::from_doc(&doc).map_err(parse_err)?;
                verdicts.show("properties", &state.check_properties());
                verdicts.show("lower-cover-profile", &state.lower_cover_profile());
                for node in state.nodes() {
                    verdicts.show(
                        &format!("labels-{node}"),
                        &state.gamma_ladder_check(node),
                    );
                }
            }
            DiamondCmd::Branch { file, leaf, output } => {
                let doc: diamond::DiamondDoc =
                    serde_json::from_str(&read_file(&file)?).map_err(parse_err)?;
                let state = diamond::DiamondState::from_doc(&doc).map_err(parse_err)?;
                let leaf: diamond::Node = leaf.parse().map_err(parse_err)?;
                verdicts.show("branch", &state.branch_check(leaf));
                let union = state.branch_union(leaf);
                let bits =
                    ladders::bits::Bits::from_indices(state.poset().len(), union.iter().copied());
                let (sub, _) = state.poset().restrict(&bits);
                write_output(&output, &lio::poset_to_json(&sub))?;
            }
        },
        Command::Cohen(cmd) => match cmd {
            CohenCmd::Validate { file } => {
                let doc: cohen::FamilyDoc =
                    serde_json::from_str(&read_file(&file)?).map_err(parse_err)?;
                let fam = cohen::IdealFamily::from_doc(&doc).map_err(parse_err)?;
                verdicts.show("family", &fam.validate());
            }
            CohenCmd::Cp { family, condition } => {
                let fam = load_family(&family)?;
                let cond = load_condition(&condition, &fam)?;
                let c = cohen::c_of(&fam, &cond).map_err(pre_err)?;
                let mut ids: Vec<&str> = c.iter_ones().map(|i| fam.base().id(i)).collect();
                ids.sort_unstable();
                println!("{}", serde_json::to_string_pretty(&ids).unwrap());
            }
            CohenCmd::Density { family, condition, x } => {
                let fam = load_family(&family)?;
                let cond = match condition {
                    Some(path) => load_condition(&path, &fam)?,
                    None => cohen::Condition::empty(),
                };
                let xi = fam
                    .base()
                    .index(&x)
                    .ok_or_else(|| pre_err(format!("unknown element `{x}`")))?;
                let (q, y) = cohen::density_extend(&fam, &cond, xi).map_err(pre_err)?;
                let out = serde_json::json!({
                    "condition": q.to_doc(&fam),
                    "y": fam.base().id(y),
                });
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            }
            CohenCmd::Filter { family, conditions } => {
                let fam = load_family(&family)?;
                let docs: Vec<cohen::ConditionDoc> = serde_json::from_str::<serde_json::Value>(
                    &read_file(&conditions)?,
                )
                .map_err(parse_err)
                .and_then(|v| {
                    serde_json::from_value(v["conditions"].clone()).map_err(parse_err)
                })?;
                let conds: Vec<cohen::Condition> = docs
                    .iter()
                    .map(|d| cohen::Condition::from_doc(d, &fam))
                    .collect::<Result<_, _>>()
                    .map_err(pre_err)?;
                let rep = cohen::filter_union_checks(&fam, &conds).map_err(pre_err)?;
                verdicts.show("filter-union", &rep);
            }
        },
        Command::Export(args) => {
            let p = load_poset(&args.file)?;
            match args.format.as_str() {
                "json" => write_output(&args.output, &lio::poset_to_json(&p))?,
                "dot" => write_output(&args.output, &lio::export_dot(&p))?,
                other => return Err(parse_err(format!("unknown format `{other}`"))),
            }
        }
        Command::Selftest(args) => {
            let outcomes = match args.only {
                None => ladders::acceptance::run_all(),
                Some(n) => {
                    let all = ladders::acceptance::run_all();
                    let found: Vec<_> = all.into_iter().filter(|o| o.id == n).collect();
                    if found.is_empty() {
                        return Err(parse_err(format!("no criterion {n}")));
                    }
                    found
                }
            };
            for o in &outcomes {
                println!("{}", o.line());
                if !o.passed {
                    verdicts.any_fail = true;
                    println!("  {}", o.detail);
                }
            }
        }
    }
    Ok(verdicts.any_fail)
}

fn load_family(path: &PathBuf) -> Result<cohen::IdealFamily, AppError> {
    let doc: cohen::FamilyDoc = serde_json::from_str(&read_file(path)?).map_err(parse_err)?;
    cohen::IdealFamily::from_doc(&doc).map_err(parse_err)
}

fn load_condition(path: &PathBuf, fam: &cohen::IdealFamily) -> Result<cohen::Condition, AppError> {
    let doc: cohen::ConditionDoc = serde_json::from_str(&read_file(path)?).map_err(parse_err)?;
    cohen::Condition::from_doc(&doc, fam).map_err(pre_err)
}

fn tree_dot(state: &diamond::DiamondState) -> String {
    let mut out = String::from("digraph tree {\n  rankdir=BT;\n  node [shape=box];\n");
    for node in state.nodes() {
        out.push_str(&format!("  \"{node}\";\n"));
        if let Some(parent) = state.parent(node) {
            out.push_str(&format!("  \"{parent}\" -> \"{node}\";\n"));
        }
    }
    out.push_str("}\n");
    out
}

fn main() -> ExitCode {
    // behave like a normal unix tool when the read end of a pipe closes
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let strict = cli.strict;
    match run(cli) {
        Ok(any_fail) => {
            if any_fail && strict {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
