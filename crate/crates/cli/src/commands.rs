//! Subcommands. Each returns a serializable report; `main` prints it and
//! turns errors into exit codes.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hnntree::bass_serre::{expand_ball, find_generic_element, stabilization_sequence};
use hnntree::cyclic::{
    check_axioms, closure, search_invariant_order_with, Axiom, ChainInstance, ClosureOutcome, CyclicOrder, Rule,
    SearchMode, TraceStep, Triple, Verdict,
};
use hnntree::hnn::{validate_group, GroupData};
use hnntree::linalg::classify_matrix;
use serde::{Deserialize, Serialize};

use crate::config::{load_group, read_file, RunConfig};
use crate::demo::{run_demo, DemoReport};
use crate::error::CliError;
use crate::json::{
    from_str, matrix_from_json, parse_word_text, to_zvec, ClassificationJson, CoarseJob, CyclicOrderJson, GroupJson,
    GroupSummary, Int, MatrixFile, PermsJson, Rat, StabilizationJson, WordJson,
};
use crate::output::{emit, Format};
use crate::selftest::{self, SelftestOptions, SelftestReport};

#[derive(Debug, Parser)]
#[command(name = "hnntree", version, about = "Exact computations on HNN extensions of Z^n and their Bass-Serre trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for the report file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a rational matrix: orthogonal conjugacy, order, minimal polynomial.
    Classify { file: PathBuf },
    /// Group files.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Normal forms of words.
    #[command(subcommand)]
    Word(WordCommand),
    /// Balls in the Bass-Serre tree.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Coarse separation in finite metric models.
    #[command(subcommand)]
    Coarse(CoarseCommand),
    /// Cyclic orders and invariant-order search.
    #[command(subcommand)]
    Order(OrderCommand),
    /// Run the full pipeline from a config file.
    Demo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Run every module's invariant suite.
    Selftest {
        /// Also validate this group file.
        #[arg(long)]
        group: Option<PathBuf>,
        /// Add a relation violating asymmetry to the cyclic-order suite.
        #[arg(long)]
        inject_asymmetry: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum GroupCommand {
    Validate { file: PathBuf },
}

#[derive(Debug, Args)]
pub struct WordArgs {
    #[arg(long)]
    pub group: PathBuf,
    /// A word such as `[1,0] t [0,3] t^-1`.
    #[arg(long, allow_hyphen_values = true)]
    pub word: String,
}

#[derive(Debug, Subcommand)]
pub enum WordCommand {
    Normalize(WordArgs),
    Invert(WordArgs),
}

#[derive(Debug, Subcommand)]
pub enum TreeCommand {
    Expand {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        radius: usize,
    },
    /// Act by a word on the ball around the base vertex.
    Act {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long, allow_hyphen_values = true)]
        element: String,
    },
    /// Orders `n_i` of an element of `Z^n` modulo the ball stabilizers.
    Stabilize {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Comma-separated coordinates; the most generic candidate when absent.
        #[arg(long, allow_hyphen_values = true)]
        element: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CoarseCommand {
    Analyze { job: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Preserve,
    Respect,
}

#[derive(Debug, Subcommand)]
pub enum OrderCommand {
    /// Check the four axioms on a relation.
    Check { file: PathBuf },
    /// Search for a cyclic order invariant under the given permutations.
    Solve {
        #[arg(long)]
        perms: PathBuf,
        #[arg(long, value_enum, default_value = "respect")]
        mode: ModeArg,
    },
    /// Close the chain `[x_i, x_i+1, z]` and report the derived triples.
    ReplayChain {
        #[arg(long)]
        length: usize,
        /// Also assert `x_i` inside `(z, x_1)`.
        #[arg(long)]
        recurrence: Option<usize>,
    },
}

/// Runs a command and writes its report. Returns the process exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Demo { config, radius, depth } => {
            let mut cfg = RunConfig::load(config)?;
            if let Some(r) = radius {
                if *r > cfg.radius_cap {
                    return Err(CliError::Precondition(format!("radius {r} exceeds radius_cap {}", cfg.radius_cap)));
                }
                cfg.radius = *r;
                if depth.is_none() {
                    cfg.depth = *r;
                }
            }
            if let Some(d) = depth {
                if *d == 0 {
                    return Err(CliError::Precondition("depth must be positive".into()));
                }
                cfg.depth = *d;
            }
            let format = cli.format.unwrap_or(cfg.format);
            let out = cli.out.clone().or_else(|| cfg.out_dir.clone());
            let report: DemoReport = run_demo(&cfg)?;
            write(&report, format, out.as_deref(), "demo")?;
            Ok(0)
        }
        Command::Selftest { group, inject_asymmetry } => {
            let report: SelftestReport =
                selftest::run(&SelftestOptions { group: group.clone(), inject_asymmetry: *inject_asymmetry });
            write(&report, cli.format.unwrap_or_default(), cli.out.as_deref(), "selftest")?;
            if report.passed {
                Ok(0)
            } else {
                let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.suite.as_str()).collect();
                Err(CliError::stage("selftest", format!("failing suites: {}", failed.join(", "))))
            }
        }
        cmd => {
            let (value, name) = run_simple(cmd)?;
            write(&value, cli.format.unwrap_or_default(), cli.out.as_deref(), name)?;
            Ok(0)
        }
    }
}

fn write<T: Serialize>(value: &T, format: Format, dir: Option<&Path>, name: &str) -> Result<(), CliError> {
    match dir {
        None => emit(value, format, None),
        Some(d) => {
            std::fs::create_dir_all(d).map_err(|e| CliError::stage("write", format!("{}: {e}", d.display())))?;
            let ext = match format {
                Format::Json => "json",
                Format::Text => "txt",
            };
            emit(value, format, Some(&d.join(format!("{name}.{ext}"))))
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::stage("render", e))
}

fn run_simple(cmd: &Command) -> Result<(serde_json::Value, &'static str), CliError> {
    match cmd {
        Command::Classify { file } => Ok((to_value(&classify(file)?)?, "classify")),
        Command::Group(GroupCommand::Validate { file }) => Ok((to_value(&validate(file)?)?, "group")),
        Command::Word(w) => Ok((to_value(&word(w)?)?, "word")),
        Command::Tree(t) => tree(t).map(|v| (v, "tree")),
        Command::Coarse(CoarseCommand::Analyze { job }) => Ok((to_value(&coarse(job)?)?, "coarse")),
        Command::Order(o) => order(o).map(|v| (v, "order")),
        Command::Demo { .. } | Command::Selftest { .. } => unreachable!("handled by execute"),
    }
}

pub fn classify(file: &Path) -> Result<ClassificationJson, CliError> {
    let m: MatrixFile = from_str(&read_file(file)?, &file.display().to_string())?;
    let a = matrix_from_json(m.rows())?;
    let c = classify_matrix(&a).map_err(|e| CliError::Precondition(e.to_string()))?;
    Ok(ClassificationJson::from(&c))
}

/// Validates a group given in memory, with a failed check as a precondition error.
pub fn group_from_json(g: &GroupJson) -> Result<GroupData, CliError> {
    let a = matrix_from_json(&g.a)?;
    validate_group(g.n, a, &g.generators()?).map_err(|e| CliError::Precondition(e.to_string()))
}

fn load(path: &Path) -> Result<GroupData, CliError> {
    group_from_json(&load_group(path)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub group: GroupSummary,
    pub classification: ClassificationJson,
}

pub fn validate(file: &Path) -> Result<ValidationReport, CliError> {
    let g = load(file)?;
    Ok(ValidationReport { group: GroupSummary::from(&g), classification: ClassificationJson::from(g.classification()) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordReport {
    pub input: String,
    pub result: WordJson,
    pub text: String,
    pub t_length: usize,
}

pub fn word(cmd: &WordCommand) -> Result<WordReport, CliError> {
    let (WordCommand::Normalize(a) | WordCommand::Invert(a)) = cmd;
    let g = load(&a.group)?;
    let w = parse_word_text(&a.word, g.dim())?;
    let nf = g.normalize(&w).map_err(|e| CliError::Precondition(e.to_string()))?;
    let nf = match cmd {
        WordCommand::Normalize(_) => nf,
        WordCommand::Invert(_) => g.invert(&nf),
    };
    Ok(WordReport {
        input: w.to_string(),
        result: WordJson::from(nf.as_word()),
        text: nf.to_string(),
        t_length: nf.t_length(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandReport {
    pub radius: usize,
    pub degree: usize,
    pub vertices: usize,
    pub edges: usize,
    pub sphere_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActReport {
    pub element: String,
    pub radius: usize,
    pub fixes_pointwise: bool,
    pub moved: usize,
    /// Image of each ball vertex, `null` when it leaves the ball.
    pub images: Vec<Option<usize>>,
}

fn check_radius(g: &GroupData, radius: usize) -> Result<(), CliError> {
    let degree = {
        use num_traits::ToPrimitive;
        (g.index_prime() + g.index_doubleprime()).to_u64().unwrap_or(u64::MAX)
    };
    let size = crate::demo::estimated_ball_size(degree, radius);
    if size > hnntree::coarse::POINT_CAP as u64 {
        return Err(CliError::Precondition(format!("ball of radius {radius} would have {size} vertices")));
    }
    Ok(())
}

fn tree(cmd: &TreeCommand) -> Result<serde_json::Value, CliError> {
    match cmd {
        TreeCommand::Expand { group, radius } => {
            let g = load(group)?;
            check_radius(&g, *radius)?;
            let ball = expand_ball(&g, *radius);
            to_value(&ExpandReport {
                radius: *radius,
                degree: ball.neighbors(0).len(),
                vertices: ball.len(),
                edges: ball.edge_count(),
                sphere_sizes: ball.sphere_sizes(),
            })
        }
        TreeCommand::Act { group, radius, element } => {
            let g = load(group)?;
            check_radius(&g, *radius)?;
            let w = g
                .normalize(&parse_word_text(element, g.dim())?)
                .map_err(|e| CliError::Precondition(e.to_string()))?;
            let ball = expand_ball(&g, *radius);
            let images = ball.act_indices(&w);
            let moved = images.iter().enumerate().filter(|(i, im)| **im != Some(*i)).count();
            to_value(&ActReport {
                element: w.to_string(),
                radius: *radius,
                fixes_pointwise: moved == 0,
                moved,
                images,
            })
        }
        TreeCommand::Stabilize { group, depth, element } => {
            let g = load(group)?;
            if *depth == 0 {
                return Err(CliError::Precondition("depth must be positive".into()));
            }
            let report = match element {
                Some(text) => {
                    let coords: Vec<Int> = text
                        .split(',')
                        .map(|x| x.trim().parse::<i64>().map(Int::Small))
                        .collect::<Result<_, _>>()
                        .map_err(|_| CliError::Parse(format!("element {text:?}: expected comma-separated integers")))?;
                    let a = to_zvec(&coords)?;
                    if a.len() != g.dim() {
                        return Err(CliError::Precondition(format!("element has {} coordinates, group has {}", a.len(), g.dim())));
                    }
                    stabilization_sequence(&g, &a, *depth)
                }
                None => find_generic_element(&g, *depth).report,
            };
            to_value(&StabilizationJson::from(&report))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseComponentReport {
    pub points: Vec<usize>,
    pub depth: Option<Rat>,
    pub deep: bool,
    pub profile: Option<Vec<Option<Int>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseReport {
    pub subset_size: usize,
    pub r: Rat,
    pub s: Rat,
    pub r_deep: Rat,
    pub space_s_connected: bool,
    pub deep_count: usize,
    pub class_dimension: usize,
    pub components: Vec<CoarseComponentReport>,
}

pub fn coarse(job: &Path) -> Result<CoarseReport, CliError> {
    let job: CoarseJob = from_str(&read_file(job)?, &job.display().to_string())?;
    let x = job.space.build()?;
    let subset = job.subset.resolve(&job.space)?;
    let (r, s) = (job.r.to_rational()?, job.s.to_rational()?);
    let r_deep = job.r_deep.as_ref().map(Rat::to_rational).transpose()?;
    let pre = |e: hnntree::coarse::CoarseError| CliError::Precondition(e.to_string());
    let sep = x.separation_analysis(&subset, &r, &s, r_deep).map_err(pre)?;
    let mut components = Vec::new();
    for c in &sep.components {
        let profile = match job.profile_max {
            Some(k) => Some(
                x.coarse_complement_profile(&c.points, &subset, k)
                    .map_err(pre)?
                    .iter()
                    .map(|p| match p {
                        hnntree::coarse::Profile::Bounded(v) => Some(Int::from(v)),
                        hnntree::coarse::Profile::Unbounded => None,
                    })
                    .collect(),
            ),
            None => None,
        };
        components.push(CoarseComponentReport {
            points: c.points.clone(),
            depth: c.depth.as_ref().map(Rat::from),
            deep: c.deep,
            profile,
        });
    }
    Ok(CoarseReport {
        subset_size: subset.len(),
        r: Rat::from(&sep.r),
        s: Rat::from(&sep.s),
        r_deep: Rat::from(&sep.r_deep),
        space_s_connected: sep.space_s_connected,
        deep_count: sep.deep_count,
        class_dimension: sep.class_dimension,
        components,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOrderReport {
    pub is_cyclic_order: bool,
    pub violated_axiom: Option<String>,
    pub witness: Vec<Triple>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: String,
    pub satisfiable: bool,
    pub order: Option<CyclicOrderJson>,
    pub arrangement: Option<Vec<usize>>,
    pub signs: Option<Vec<String>>,
    pub nodes_explored: u64,
    pub sign_vectors_tried: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub triple: Triple,
    pub rule: String,
    pub from: Vec<usize>,
}

impl From<&TraceStep> for StepJson {
    fn from(s: &TraceStep) -> Self {
        let (rule, from) = match s.rule {
            Rule::Asserted => ("asserted", vec![]),
            Rule::Cyclic(p) => ("cyclic", vec![p]),
            Rule::Transitive(p, q) => ("transitive", vec![p, q]),
        };
        StepJson { triple: s.triple, rule: rule.into(), from }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub length: usize,
    /// Index of `z`; `x_i` is point `i`.
    pub z: usize,
    pub consistent: bool,
    /// `[x_1, x_i, z]` with the trace step deriving it.
    pub derived: Vec<(Triple, Option<usize>)>,
    pub clash: Option<(Triple, Triple)>,
    pub trace: Vec<StepJson>,
}

fn order(cmd: &OrderCommand) -> Result<serde_json::Value, CliError> {
    match cmd {
        OrderCommand::Check { file } => {
            let o: CyclicOrderJson = from_str(&read_file(file)?, &file.display().to_string())?;
            let rel = o.relation()?;
            let report = match check_axioms(&rel) {
                Ok(()) => CheckOrderReport { is_cyclic_order: true, violated_axiom: None, witness: vec![] },
                Err(v) => CheckOrderReport {
                    is_cyclic_order: false,
                    violated_axiom: Some(
                        match v.axiom {
                            Axiom::Cyclicity => "cyclicity",
                            Axiom::Asymmetry => "asymmetry",
                            Axiom::Connectedness => "connectedness",
                            Axiom::Transitivity => "transitivity",
                        }
                        .into(),
                    ),
                    witness: v.triples,
                },
            };
            to_value(&report)
        }
        OrderCommand::Solve { perms, mode } => {
            let p: PermsJson = from_str(&read_file(perms)?, &perms.display().to_string())?;
            let cs = p.constraints()?;
            let m = match mode {
                ModeArg::Preserve => SearchMode::PreserveOnly,
                ModeArg::Respect => SearchMode::Respect,
            };
            let res = search_invariant_order_with(&cs, &p.generators, m)
                .map_err(|e| CliError::Precondition(e.to_string()))?;
            let witness: Option<&CyclicOrder> = match &res.verdict {
                Verdict::Satisfiable(o) => Some(o),
                Verdict::Unsatisfiable { .. } => None,
            };
            to_value(&SolveReport {
                mode: format!("{mode:?}").to_lowercase(),
                satisfiable: witness.is_some(),
                order: witness.map(CyclicOrderJson::from),
                arrangement: witness.map(CyclicOrder::arrangement),
                signs: res.signs.as_ref().map(|s| s.iter().map(|t| format!("{t:?}").to_lowercase()).collect()),
                nodes_explored: res.nodes_explored,
                sign_vectors_tried: res.sign_vectors_tried,
            })
        }
        OrderCommand::ReplayChain { length, recurrence } => to_value(&replay_chain(*length, *recurrence)?),
    }
}

pub fn replay_chain(length: usize, recurrence: Option<usize>) -> Result<ReplayReport, CliError> {
    let pre = |e: hnntree::cyclic::CyclicError| CliError::Precondition(e.to_string());
    let mut inst = ChainInstance::new(length).map_err(pre)?.with_side_condition();
    if let Some(i) = recurrence {
        if !(2..=length).contains(&i) {
            return Err(CliError::Precondition(format!("recurrence index must lie in 2..={length}")));
        }
        inst = inst.with_recurrence(i).map_err(pre)?;
    }
    Ok(match closure(&inst.constraints) {
        ClosureOutcome::Closed(c) => ReplayReport {
            length,
            z: inst.z,
            consistent: true,
            derived: inst.expected_consequences().into_iter().map(|t| (t, c.step_of(t))).collect(),
            clash: None,
            trace: c.trace.iter().map(StepJson::from).collect(),
        },
        ClosureOutcome::Inconsistent(inc) => ReplayReport {
            length,
            z: inst.z,
            consistent: false,
            derived: vec![],
            clash: Some(inc.clash_triples()),
            trace: inc.trace.iter().map(StepJson::from).collect(),
        },
    })
}
