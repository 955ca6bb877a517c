//! Command-line surface. Every command prints a JSON report on stdout and a
//! one-line summary on stderr.
//!
//! Exit statuses: 0 when a question is answered "yes" or a value was
//! computed, 1 for a "no", 2 for usage, input, or precondition errors, and 3
//! when a search budget or size cap was exceeded.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::adoption::{self, Method};
use crate::contraction::{self, Verdict};
use crate::document;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::generate::{self, Gadget, RandomSpec};
use crate::levels;
use crate::network::{Network, ProductId, ReductionTrace};
use crate::oracle::{self, FinalSet, SearchOptions, StepMode, DEFAULT_BUDGET};
use crate::rational::{self, Rational};
use crate::spread;
use crate::transform::{self, TransformMap, DEFAULT_AUX_CAP};

#[derive(Debug, Parser)]
#[command(name = "adoptnet", version, about = "Multi-product threshold diffusion on weighted digraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ProductArg {
    /// Product name as declared in the document.
    #[arg(long)]
    pub product: String,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Maximum number of states the exhaustive search may visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Explore with simultaneous multi-node steps instead of single adoptions.
    #[arg(long)]
    pub multi_step: bool,
    /// Expand the search frontier on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            budget: self.budget,
            steps: if self.multi_step { StepMode::Multi } else { StepMode::Single },
            execution: if self.sequential { Execution::Sequential } else { Execution::default() },
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level certificate for a product's thresholds on the network's graph.
    WellStructured {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArg,
    },
    /// Can every node end up adopting the product?
    Reachable {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArg,
    },
    /// Must every node end up adopting the product?
    Unavoidable {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArg,
    },
    /// Does the network have exactly one final network?
    UniqueOutcome { file: PathBuf },
    /// Adoption questions about one node: 1 = adopts something in every
    /// final network, 2 = adopts the product in every final network,
    /// 3 = adopts something in some final network, 4 = adopts the product
    /// in some final network.
    Adoption {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        variant: u8,
        file: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long)]
        product: Option<String>,
        /// Allow exponential-time exhaustive search where no polynomial
        /// algorithm applies.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Largest number of adopters of the product over all final networks.
    MaxSpread {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArg,
    },
    /// Smallest number of adopters of the product over all final networks.
    MinSpread {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArg,
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Exhaustive exploration of final networks.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Rewrite into an equitable network with product-independent thresholds.
    #[command(subcommand)]
    Transform(TransformCommand),
    /// Generate networks.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// List every final network in canonical order.
    Enumerate {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Is there a final network in which every node adopted?
    Final {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Fewest adopters of the product over all final networks.
    Min {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArg,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TransformKind {
    General,
    Equitable,
}

#[derive(Debug, Subcommand)]
pub enum TransformCommand {
    /// Subset transformation; works on any network, may grow exponentially.
    General {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_AUX_CAP)]
        aux_cap: usize,
        /// Write the transformed document here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Per-product transformation for equitable networks.
    Equitable {
        file: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Transform, then compare final networks on both sides exhaustively.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        via: TransformKind,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// PARTITION items as comma-separated num/den rationals.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// FINAL gadget.
    Final {
        #[command(flatten)]
        partition: PartitionArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// ADOPTION 1 gadget.
    Adoption1 {
        #[command(flatten)]
        partition: PartitionArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// ADOPTION 2 gadget.
    Adoption2 {
        #[command(flatten)]
        partition: PartitionArgs,
        #[arg(long, default_value = "1/8")]
        eps: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// MIN-ADOPTION gadget.
    Min {
        #[command(flatten)]
        partition: PartitionArgs,
        #[arg(long, default_value = "1/8")]
        eps: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Four-node network with two final networks.
    Switch {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Seeded random network.
    Random {
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value_t = 2)]
        products: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long)]
        equitable: bool,
        #[arg(long, default_value = "1/4")]
        theta_min: String,
        #[arg(long, default_value = "1/1")]
        theta_max: String,
        #[arg(long, default_value_t = 4)]
        theta_denominator: i64,
        #[arg(long)]
        product_independent: bool,
        #[arg(long, default_value_t = 0.3)]
        adopted_fraction: f64,
        #[arg(long)]
        isolated_adopted: bool,
        /// Undecided nodes offer every product.
        #[arg(long)]
        offer_all: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub summary: String,
}

impl Outcome {
    fn answer(report: Value, yes: bool, summary: String) -> Self {
        Outcome {
            code: if yes { 0 } else { 1 },
            report,
            summary,
        }
    }

    fn computed(report: Value, summary: String) -> Self {
        Outcome {
            code: 0,
            report,
            summary,
        }
    }

    pub fn from_error(command: &str, err: &Error) -> Self {
        let kind = match err {
            Error::Argument(_) => "argument",
            Error::Reduction { .. } => "reduction",
            Error::Precondition(_) => "precondition",
            Error::Budget { .. } => "budget",
            Error::SizeCap(_) => "size-cap",
            Error::Syntax { .. } => "syntax",
            Error::Semantic { .. } => "semantic",
        };
        Outcome {
            code: if err.is_resource() { 3 } else { 2 },
            report: json!({
                "command": command,
                "error": { "kind": kind, "message": err.to_string() },
            }),
            summary: format!("error: {err}"),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Loaded {
    net: Network,
    input: Value,
}

fn load(path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::argument(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::argument(format!("{} is not UTF-8", path.display())))?;
    let net = document::parse(&text)?;
    Ok(Loaded {
        net,
        input: json!({ "path": path.display().to_string(), "sha256": sha256_hex(&bytes) }),
    })
}

fn product(net: &Network, name: &str) -> Result<ProductId> {
    net.product_id(name)
        .ok_or_else(|| Error::argument(format!("unknown product `{name}`")))
}

fn availability_json(net: &Network) -> Value {
    let names = net.product_names();
    Value::Array(
        (0..net.node_count())
            .map(|i| match net.adopted(i) {
                Some(t) => json!(names[t.0]),
                None => {
                    let set: Vec<&str> = net.availability(i).iter().map(|t| names[t.0].as_str()).collect();
                    json!(set)
                }
            })
            .collect(),
    )
}

fn trace_json(net: &Network, trace: &ReductionTrace) -> Value {
    let names = net.product_names();
    Value::Array(
        trace
            .steps()
            .iter()
            .map(|step| {
                Value::Array(
                    step.iter()
                        .map(|e| json!({ "node": e.node, "product": names[e.product.0] }))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn verdict_json(net: &Network, verdict: &Verdict) -> Value {
    let name = |t: &ProductId| net.product_name(*t).to_string();
    match verdict {
        Verdict::UniqueOutcome => json!({ "kind": "UniqueOutcome" }),
        Verdict::AmbivalentMultiAdopt { node, products } => json!({
            "kind": "AmbivalentMultiAdopt",
            "node": node,
            "products": products.iter().map(name).collect::<Vec<_>>(),
        }),
        Verdict::AmbivalentSwitch { node, from, to } => json!({
            "kind": "AmbivalentSwitch",
            "node": node,
            "from": name(from),
            "to": name(to),
        }),
    }
}

fn method_json(method: Method) -> Value {
    serde_json::to_value(method).expect("serializable")
}

fn require_exhaustive(exhaustive: bool, what: &str) -> Result<()> {
    if exhaustive {
        Ok(())
    } else {
        Err(Error::argument(format!(
            "{what} has no polynomial algorithm here; pass --exhaustive to run the exponential search"
        )))
    }
}

fn final_set_json(fs: &FinalSet) -> Value {
    json!({
        "reachable_states": fs.reachable_count(),
        "count": fs.len(),
        "finals": fs.finals().iter().map(availability_json).collect::<Vec<_>>(),
    })
}

fn emit_document(net: &Network, output: Option<&Path>) -> Result<Value> {
    let text = document::serialize(net);
    if let Some(path) = output {
        std::fs::write(path, &text)
            .map_err(|e| Error::argument(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(json!({
        "path": output.map(|p| p.display().to_string()),
        "sha256": sha256_hex(text.as_bytes()),
        "nodes": net.node_count(),
        "edges": net.graph().edge_count(),
        "document": text,
    }))
}

fn parse_rational(text: &str) -> Result<Rational> {
    rational::parse(text).map_err(|e| Error::argument(format!("`{text}`: {e}")))
}

fn parse_partition(args: &PartitionArgs) -> Result<Vec<Rational>> {
    args.a.iter().map(|s| parse_rational(s.trim())).collect()
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::WellStructured { .. } => "well-structured",
        Command::Reachable { .. } => "reachable",
        Command::Unavoidable { .. } => "unavoidable",
        Command::UniqueOutcome { .. } => "unique-outcome",
        Command::Adoption { .. } => "adoption",
        Command::MaxSpread { .. } => "max-spread",
        Command::MinSpread { .. } => "min-spread",
        Command::Oracle(OracleCommand::Enumerate { .. }) => "oracle enumerate",
        Command::Oracle(OracleCommand::Final { .. }) => "oracle final",
        Command::Oracle(OracleCommand::Min { .. }) => "oracle min",
        Command::Transform(TransformCommand::General { .. }) => "transform general",
        Command::Transform(TransformCommand::Equitable { .. }) => "transform equitable",
        Command::Transform(TransformCommand::Check { .. }) => "transform check",
        Command::Gen(GenCommand::Final { .. }) => "gen final",
        Command::Gen(GenCommand::Adoption1 { .. }) => "gen adoption1",
        Command::Gen(GenCommand::Adoption2 { .. }) => "gen adoption2",
        Command::Gen(GenCommand::Min { .. }) => "gen min",
        Command::Gen(GenCommand::Switch { .. }) => "gen switch",
        Command::Gen(GenCommand::Random { .. }) => "gen random",
    }
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    match execute(&cli.command) {
        Ok(mut outcome) => {
            if let Value::Object(map) = &mut outcome.report {
                map.insert("command".into(), json!(name));
            }
            outcome
        }
        Err(err) => Outcome::from_error(name, &err),
    }
}

/// Parses `args` (including the program name) and runs the command. Usage
/// errors map to exit status 2 with clap's message as the summary.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            Outcome {
                code,
                report: json!({ "error": { "kind": "usage", "message": e.to_string() } }),
                summary: e.to_string(),
            }
        }
    }
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::WellStructured { file, product: p } => {
            let Loaded { net, input } = load(file)?;
            let t = product(&net, &p.product)?;
            let thresholds = net.thresholds_for(t).ok_or_else(|| {
                Error::precondition(format!("product `{}` is not available at every node", p.product))
            })?;
            let cert = levels::check_well_structured(net.graph(), &thresholds)?;
            let yes = cert.is_some();
            let report = json!({
                "input": input,
                "product": p.product,
                "well_structured": yes,
                "levels": cert.as_ref().map(|c| c.levels().to_vec()),
                "reason": (!yes).then_some("some node can never collect its threshold from lower levels"),
            });
            Ok(Outcome::answer(report, yes, format!("well-structured for {}: {yes}", p.product)))
        }
        Command::Reachable { file, product: p } => {
            let Loaded { net, input } = load(file)?;
            let t = product(&net, &p.product)?;
            let witness = spread::reachability_witness(&net, t)?;
            let yes = witness.is_some();
            let reason = if yes {
                None
            } else if net.thresholds_for(t).is_none() {
                Some(format!("some node cannot adopt `{}` at all", p.product))
            } else {
                Some("the graph without edges into current adopters is not well-structured".to_string())
            };
            let report = json!({
                "input": input,
                "product": p.product,
                "reachable": yes,
                "witness": witness.as_ref().map(|w| trace_json(&net, w)),
                "reason": reason,
            });
            Ok(Outcome::answer(report, yes, format!("all-{} network reachable: {yes}", p.product)))
        }
        Command::Unavoidable { file, product: p } => {
            let Loaded { net, input } = load(file)?;
            let t = product(&net, &p.product)?;
            let yes = spread::is_unavoidable_all(&net, t)?;
            let undecided = (0..net.node_count())
                .find(|&i| !net.graph().has_neighbours(i) && net.adopted(i) != Some(t));
            let reason = match (yes, undecided) {
                (true, _) => None,
                (false, Some(i)) => Some(format!(
                    "node {i} has no neighbours and has not adopted `{}`",
                    p.product
                )),
                (false, None) => Some(format!("the all-{} network is not reachable", p.product)),
            };
            let witness = if yes { spread::reachability_witness(&net, t)? } else { None };
            let report = json!({
                "input": input,
                "product": p.product,
                "unavoidable": yes,
                "witness": witness.as_ref().map(|w| trace_json(&net, w)),
                "reason": reason,
            });
            Ok(Outcome::answer(report, yes, format!("all-{} network unavoidable: {yes}", p.product)))
        }
        Command::UniqueOutcome { file } => {
            let Loaded { net, input } = load(file)?;
            let res = contraction::contraction_sequence(&net);
            let yes = res.verdict.is_unique();
            let report = json!({
                "input": input,
                "unique": yes,
                "verdict": verdict_json(&net, &res.verdict),
                "trace": trace_json(&net, &res.trace),
                "terminal": availability_json(&res.terminal),
            });
            let summary = match &res.verdict {
                Verdict::UniqueOutcome => "unique outcome".to_string(),
                Verdict::AmbivalentMultiAdopt { node, .. } => {
                    format!("not unique: node {node} can adopt two products")
                }
                Verdict::AmbivalentSwitch { node, from, to } => format!(
                    "not unique: node {node} adopted {} but could switch to {}",
                    net.product_name(*from),
                    net.product_name(*to)
                ),
            };
            Ok(Outcome::answer(report, yes, summary))
        }
        Command::Adoption {
            variant,
            file,
            node,
            product: p,
            exhaustive,
            search,
        } => {
            let Loaded { net, input } = load(file)?;
            net.check_node(*node)?;
            let t = match (variant, p) {
                (2 | 4, Some(name)) => Some(product(&net, name)?),
                (2 | 4, None) => return Err(Error::argument(format!("adoption {variant} needs --product"))),
                (_, Some(_)) => return Err(Error::argument(format!("adoption {variant} takes no --product"))),
                _ => None,
            };
            let opts = search.options();
            let (yes, method, witness) = match variant {
                1 => {
                    require_exhaustive(*exhaustive, "adoption 1")?;
                    let fs = oracle::enumerate_with(&net, &opts)?;
                    let yes = fs.always_adopts_some(*node);
                    let counter = fs.finals().iter().find(|f| f.adopted(*node).is_none()).cloned();
                    (yes, Method::ExhaustiveFallback, counter)
                }
                2 => {
                    let t = t.expect("checked");
                    if net.product_count() == 2 {
                        let yes = adoption::adoption2_two_products(&net, *node, t)?;
                        (yes, Method::Polynomial, None)
                    } else {
                        require_exhaustive(*exhaustive, "adoption 2 with more than two products")?;
                        let fs = oracle::enumerate_with(&net, &opts)?;
                        let counter = fs.finals().iter().find(|f| f.adopted(*node) != Some(t)).cloned();
                        (counter.is_none(), Method::ExhaustiveFallback, counter)
                    }
                }
                3 => {
                    let yes = adoption::adoption3_possible_some(&net, *node)?;
                    let witness = match net.availability(*node).iter().find(|&t| {
                        adoption::adoption4_possible_given(&net, *node, t).unwrap_or(false)
                    }) {
                        Some(t) => Some(adoption::max_adoption(&net, t)?.witness),
                        None => None,
                    };
                    (yes, Method::Polynomial, witness)
                }
                _ => {
                    let t = t.expect("checked");
                    let yes = adoption::adoption4_possible_given(&net, *node, t)?;
                    let witness = if yes { Some(adoption::max_adoption(&net, t)?.witness) } else { None };
                    (yes, Method::Polynomial, witness)
                }
            };
            let report = json!({
                "input": input,
                "variant": variant,
                "node": node,
                "product": p,
                "answer": yes,
                "method": method_json(method),
                "final_network": witness.as_ref().map(availability_json),
            });
            Ok(Outcome::answer(report, yes, format!("adoption {variant} for node {node}: {yes}")))
        }
        Command::MaxSpread { file, product: p } => {
            let Loaded { net, input } = load(file)?;
            let t = product(&net, &p.product)?;
            let spread = adoption::max_adoption(&net, t)?;
            let report = json!({
                "input": input,
                "product": p.product,
                "max_adopters": spread.count,
                "method": method_json(Method::Polynomial),
                "final_network": availability_json(&spread.witness),
            });
            Ok(Outcome::computed(report, format!("max {} adopters: {}", p.product, spread.count)))
        }
        Command::MinSpread {
            file,
            product: p,
            exhaustive,
            search,
        } => {
            let Loaded { net, input } = load(file)?;
            let t = product(&net, &p.product)?;
            let (count, method, witness) = if net.product_count() == 2 {
                let s = adoption::min_adoption_two_products(&net, t)?;
                (s.count, Method::Polynomial, s.witness)
            } else {
                require_exhaustive(*exhaustive, "min-spread with more than two products")?;
                let fs = oracle::enumerate_with(&net, &search.options())?;
                let best = fs
                    .finals()
                    .iter()
                    .min_by_key(|f| f.adopter_count(t))
                    .expect("a final network exists")
                    .clone();
                (best.adopter_count(t), Method::ExhaustiveFallback, best)
            };
            let report = json!({
                "input": input,
                "product": p.product,
                "min_adopters": count,
                "method": method_json(method),
                "final_network": availability_json(&witness),
            });
            Ok(Outcome::computed(report, format!("min {} adopters: {count}", p.product)))
        }
        Command::Oracle(cmd) => oracle_command(cmd),
        Command::Transform(cmd) => transform_command(cmd),
        Command::Gen(cmd) => gen_command(cmd),
    }
}

fn oracle_command(cmd: &OracleCommand) -> Result<Outcome> {
    match cmd {
        OracleCommand::Enumerate { file, search } => {
            let Loaded { net, input } = load(file)?;
            let fs = oracle::enumerate_with(&net, &search.options())?;
            let summary = format!("{} final networks", fs.len());
            Ok(Outcome::computed(json!({ "input": input, "final_set": final_set_json(&fs) }), summary))
        }
        OracleCommand::Final { file, search } => {
            let Loaded { net, input } = load(file)?;
            let fs = oracle::enumerate_with(&net, &search.options())?;
            let witness = fs.some_all_adopted();
            let yes = witness.is_some();
            let report = json!({
                "input": input,
                "all_adopted_final_exists": yes,
                "final_network": witness.map(availability_json),
                "reason": (!yes).then_some("every final network leaves some node without a product"),
            });
            Ok(Outcome::answer(report, yes, format!("all-adopted final network exists: {yes}")))
        }
        OracleCommand::Min { file, product: p, search } => {
            let Loaded { net, input } = load(file)?;
            let t = product(&net, &p.product)?;
            let fs = oracle::enumerate_with(&net, &search.options())?;
            let best = fs
                .finals()
                .iter()
                .min_by_key(|f| f.adopter_count(t))
                .expect("a final network exists");
            let count = best.adopter_count(t);
            let report = json!({
                "input": input,
                "product": p.product,
                "min_adopters": count,
                "final_network": availability_json(best),
            });
            Ok(Outcome::computed(report, format!("min {} adopters: {count}", p.product)))
        }
    }
}

fn transform_json(map: &TransformMap) -> Value {
    serde_json::to_value(map).expect("serializable")
}

fn transform_command(cmd: &TransformCommand) -> Result<Outcome> {
    match cmd {
        TransformCommand::General { file, aux_cap, output } => {
            let Loaded { net, input } = load(file)?;
            let (out, map) = transform::transform_general_with_cap(&net, *aux_cap)?;
            let summary = format!("added {} auxiliary nodes", map.aux.len());
            let report = json!({ "input": input, "map": transform_json(&map), "output": emit_document(&out, output.as_deref())? });
            Ok(Outcome::computed(report, summary))
        }
        TransformCommand::Equitable { file, output } => {
            let Loaded { net, input } = load(file)?;
            let (out, map) = transform::transform_equitable(&net)?;
            let summary = format!("added {} auxiliary nodes", map.aux.len());
            let report = json!({ "input": input, "map": transform_json(&map), "output": emit_document(&out, output.as_deref())? });
            Ok(Outcome::computed(report, summary))
        }
        TransformCommand::Check { file, via, search } => {
            let Loaded { net, input } = load(file)?;
            let (out, map) = match via {
                TransformKind::General => transform::transform_general(&net)?,
                TransformKind::Equitable => transform::transform_equitable(&net)?,
            };
            let c = transform::compare_finals(&net, &out, &map, &search.options())?;
            let yes = c.holds();
            let report = json!({
                "input": input,
                "via": format!("{via:?}").to_lowercase(),
                "corresponds": yes,
                "details": serde_json::to_value(&c).expect("serializable"),
            });
            Ok(Outcome::answer(report, yes, format!("final networks correspond: {yes}")))
        }
    }
}

fn gadget_report(params: Value, gadget: &Gadget, output: Option<&Path>) -> Result<Outcome> {
    let doc = emit_document(&gadget.network, output)?;
    let summary = format!("{} nodes, designated node {}", gadget.network.node_count(), gadget.designated);
    Ok(Outcome::computed(
        json!({ "parameters": params, "designated": gadget.designated, "output": doc }),
        summary,
    ))
}

fn params_json(params: Value) -> Value {
    let text = serde_json::to_string(&params).expect("serializable");
    json!({ "values": params, "sha256": sha256_hex(text.as_bytes()) })
}

fn gen_command(cmd: &GenCommand) -> Result<Outcome> {
    match cmd {
        GenCommand::Final { partition, output } => {
            let a = parse_partition(partition)?;
            let net = generate::gen_final_gadget(&a)?;
            let doc = emit_document(&net, output.as_deref())?;
            let summary = format!("{} nodes", net.node_count());
            Ok(Outcome::computed(
                json!({ "parameters": params_json(json!({ "a": partition.a })), "output": doc }),
                summary,
            ))
        }
        GenCommand::Adoption1 { partition, output } => {
            let g = generate::gen_adoption1_gadget(&parse_partition(partition)?)?;
            gadget_report(params_json(json!({ "a": partition.a })), &g, output.as_deref())
        }
        GenCommand::Adoption2 { partition, eps, output } => {
            let g = generate::gen_adoption2_gadget(&parse_partition(partition)?, parse_rational(eps)?)?;
            gadget_report(params_json(json!({ "a": partition.a, "eps": eps })), &g, output.as_deref())
        }
        GenCommand::Min { partition, eps, m, output } => {
            let g = generate::gen_min_adoption_gadget(&parse_partition(partition)?, parse_rational(eps)?, *m)?;
            gadget_report(
                params_json(json!({ "a": partition.a, "eps": eps, "m": m })),
                &g,
                output.as_deref(),
            )
        }
        GenCommand::Switch { output } => {
            let net = generate::gen_switch_witness();
            let doc = emit_document(&net, output.as_deref())?;
            Ok(Outcome::computed(
                json!({ "parameters": params_json(json!({})), "output": doc }),
                "4 nodes".to_string(),
            ))
        }
        GenCommand::Random {
            nodes,
            products,
            density,
            equitable,
            theta_min,
            theta_max,
            theta_denominator,
            product_independent,
            adopted_fraction,
            isolated_adopted,
            offer_all,
            seed,
            output,
        } => {
            let spec = RandomSpec {
                nodes: *nodes,
                products: *products,
                density: *density,
                equitable: *equitable,
                threshold_min: parse_rational(theta_min)?,
                threshold_max: parse_rational(theta_max)?,
                threshold_denominator: *theta_denominator,
                product_independent: *product_independent,
                adopted_fraction: *adopted_fraction,
                isolated_adopted: *isolated_adopted,
                offer_all: *offer_all,
                seed_product: None,
                seed: *seed,
            };
            let net = generate::gen_random(&spec)?;
            let doc = emit_document(&net, output.as_deref())?;
            let params = json!({
                "nodes": nodes,
                "products": products,
                "density": density,
                "equitable": equitable,
                "theta_min": rational::format(&spec.threshold_min),
                "theta_max": rational::format(&spec.threshold_max),
                "theta_denominator": theta_denominator,
                "product_independent": product_independent,
                "adopted_fraction": adopted_fraction,
                "isolated_adopted": isolated_adopted,
                "offer_all": offer_all,
                "seed": seed,
            });
            let summary = format!("{} nodes, {} edges", net.node_count(), net.graph().edge_count());
            Ok(Outcome::computed(json!({ "parameters": params_json(params), "output": doc }), summary))
        }
    }
}
