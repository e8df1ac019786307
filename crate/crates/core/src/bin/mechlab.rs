use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use mechlab::error::Error;
use mechlab::eval::{buyer_choice, canonical_det_price, canonical_general_price, TieRule};
use mechlab::lattice::{check_det, check_sym, finite_cover, supermod_majorant_det, supermod_majorant_sym, LatticeProperty};
use mechlab::model::{parse_dist, parse_menu, parse_pricing, Allocation, BundlingPartition, SymPricing, Valuation};
use mechlab::monotone::{check_det_monotonic, Scope};
use mechlab::optimize::{self, Mode, RevenueResult, DEFAULT_CAP};
use mechlab::quad::QuadSpec;
use mechlab::rat::Rat;
use mechlab::scenarios::{list_scenarios, run_scenario, Params};

#[derive(Parser)]
#[command(name = "mechlab", version, about = "Exact revenue and monotonicity computations for multi-good mechanisms")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration cap for deterministic searches.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal revenue over all mechanisms (exact LP).
    Rev(Input),
    /// Separate selling revenue.
    Srev(Input),
    /// Grand-bundle revenue.
    Brev(Input),
    /// Same price for every good.
    Symsrev(Input),
    /// One price per block of a partition, e.g. "1|2,3".
    Prev {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        partition: String,
    },
    /// Optimal deterministic revenue.
    Drev {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        supermodular: bool,
    },
    /// Optimal symmetric deterministic revenue.
    Symdrev {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        supermodular: bool,
    },
    /// Payment-monotone relaxation on the atoms.
    Monrev {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        no_augment: bool,
    },
    /// Allocation-monotone relaxation on the atoms.
    Amonrev {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        no_augment: bool,
    },
    /// Buyer's choice from a menu at a valuation.
    Eval {
        #[arg(long)]
        menu: String,
        /// Comma-separated coordinates, e.g. "1,23/10".
        #[arg(long)]
        x: String,
        /// seller | buyer | tie | index
        #[arg(long, default_value = "tie")]
        rule: TieRule,
    },
    /// Canonical price of an allocation, or the canonical deterministic pricing.
    Canonical {
        #[arg(long)]
        menu: String,
        #[arg(long, conflicts_with = "det")]
        g: Option<String>,
        #[arg(long)]
        det: bool,
    },
    /// Lattice property of a deterministic pricing.
    Check {
        #[arg(long)]
        pricing: String,
        #[arg(long)]
        property: LatticeProperty,
    },
    /// Minimal supermodular majorant of a pricing.
    Majorant {
        #[command(flatten)]
        input: Input,
        /// Read levels p(0..k) as a JSON array of rationals instead.
        #[arg(long)]
        symmetric: bool,
    },
    /// Monotonicity of a deterministic pricing with witness or certificates.
    Monotone {
        #[arg(long)]
        pricing: String,
    },
    /// Screens and evaluation of a quadratic mechanism.
    Quad {
        #[arg(long)]
        spec: String,
    },
    /// Run one named scenario, or all of them.
    Repro {
        id: Option<String>,
        #[arg(long, conflicts_with = "id")]
        all: bool,
        /// Override a scenario parameter, e.g. --param M=100.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
    /// List scenarios.
    List,
}

#[derive(clap::Args)]
struct Input {
    /// JSON input file, or - for stdin.
    #[arg(long)]
    input: String,
}

enum Failure {
    Expectation,
    Input(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &str) -> Result<String, Failure> {
    let mut s = String::new();
    let r = if path == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    r.map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    Ok(s)
}

fn parse_coords(s: &str) -> Result<Vec<Rat>, Failure> {
    s.split(',').map(|c| c.trim().parse::<Rat>().map_err(|e| Failure::Input(e.to_string()))).collect()
}

fn emit(json_mode: bool, value: Value, text: String) {
    if json_mode {
        println!("{value}");
    } else {
        println!("{text}");
    }
}

fn emit_revenue(json_mode: bool, r: &RevenueResult) {
    let j = r.to_json();
    let text = format!("{}\nwitness: {}", r.value, j["witness"]);
    emit(json_mode, j, text);
}

fn run(cli: Cli) -> Outcome {
    let js = cli.json;
    let dist = |i: &Input| -> Result<_, Failure> { Ok(parse_dist(&read(&i.input)?)?) };
    match cli.command {
        Command::Rev(i) => emit_revenue(js, &optimize::lp_rev(&dist(&i)?)?),
        Command::Srev(i) => emit_revenue(js, &optimize::srev(&dist(&i)?)?),
        Command::Brev(i) => emit_revenue(js, &optimize::brev(&dist(&i)?)?),
        Command::Symsrev(i) => emit_revenue(js, &optimize::symsrev(&dist(&i)?)?),
        Command::Prev { input, partition } => {
            let d = dist(&input)?;
            let pi = BundlingPartition::parse(d.k(), &partition)?;
            emit_revenue(js, &optimize::partition_rev(&d, &pi)?)
        }
        Command::Drev { input, supermodular } => {
            let mode = if supermodular { Mode::Supermodular } else { Mode::General };
            emit_revenue(js, &optimize::drev(&dist(&input)?, mode, cli.cap)?)
        }
        Command::Symdrev { input, supermodular } => {
            let mode = if supermodular { Mode::Supermodular } else { Mode::General };
            emit_revenue(js, &optimize::symdrev(&dist(&input)?, mode, cli.cap)?)
        }
        Command::Monrev { input, no_augment } => emit_revenue(js, &optimize::monrev_relaxed(&dist(&input)?, !no_augment)?),
        Command::Amonrev { input, no_augment } => {
            emit_revenue(js, &optimize::amonrev_relaxed(&dist(&input)?, !no_augment)?)
        }
        Command::Eval { menu, x, rule } => {
            let menu = parse_menu(&read(&menu)?)?;
            let x = Valuation::new(parse_coords(&x)?)?;
            let c = buyer_choice(&menu, &x, rule)?;
            let q: Vec<String> = c.alloc().0.iter().map(Rat::to_string).collect();
            let j = json!({
                "index": c.index,
                "q": q,
                "s": c.payment().to_string(),
                "payoff": c.payoff.to_string(),
                "tie_set": c.tie_set,
            });
            let text = format!("entry {}: q = ({}), pays {}, payoff {}", c.index, q.join(", "), c.payment(), c.payoff);
            emit(js, j, text);
        }
        Command::Canonical { menu, g, det } => {
            let menu = parse_menu(&read(&menu)?)?;
            if let Some(g) = g {
                let p = canonical_general_price(&menu, &Allocation::new(parse_coords(&g)?)?)?;
                emit(js, json!({ "price": p.to_string() }), p.to_string());
            } else if det {
                let p = canonical_det_price(&menu)?;
                emit(js, p.to_json(), p.to_json_string());
            } else {
                return Err(Failure::Input("canonical needs --g or --det".into()));
            }
        }
        Command::Check { pricing, property } => {
            let p = parse_pricing(&read(&pricing)?)?;
            let v = check_det(&p, property, None);
            emit(js, v.to_json(), v.to_json().to_string());
        }
        Command::Majorant { input, symmetric } => {
            let text = read(&input.input)?;
            if symmetric {
                let levels: Vec<Rat> = serde_json::from_str(&text).map_err(Error::from)?;
                let p = SymPricing::from_finite(levels)?;
                let q = supermod_majorant_sym(&p)?;
                let j = json!({ "levels": q.to_json(), "supermodular": check_sym(&q).holds });
                emit(js, j.clone(), j.to_string());
            } else {
                let p = finite_cover(&parse_pricing(&text)?);
                let q = supermod_majorant_det(&p)?;
                emit(js, q.to_json(), q.to_json_string());
            }
        }
        Command::Monotone { pricing } => {
            let p = parse_pricing(&read(&pricing)?)?;
            let v = check_det_monotonic(&p, &Scope::Range)?;
            emit(js, v.to_json(), v.to_json().to_string());
        }
        Command::Quad { spec } => {
            let s = QuadSpec::parse(&read(&spec)?)?;
            let screens = s.screens();
            let inv: Vec<Vec<String>> = s.a_inv().iter().map(|r| r.iter().map(Rat::to_string).collect()).collect();
            let j = json!({ "spec": s.to_json(), "A_inv": inv, "screens": screens.to_json() });
            emit(js, j.clone(), serde_json::to_string_pretty(&j).expect("json"));
        }
        Command::Repro { id, all, params } => {
            let mut p = Params::new();
            for kv in params {
                let (k, v) =
                    kv.split_once('=').ok_or_else(|| Failure::Input(format!("--param expects NAME=VALUE, got {kv}")))?;
                p.insert(k.to_string(), v.to_string());
            }
            if let Some(seed) = cli.seed {
                p.insert("seed".into(), seed.to_string());
            }
            let ids: Vec<&str> = match (&id, all) {
                (Some(id), false) => vec![id.as_str()],
                (None, true) => list_scenarios().iter().map(|s| s.id).collect(),
                _ => return Err(Failure::Input("repro needs a scenario id or --all".into())),
            };
            let mut ok = true;
            for id in ids {
                // Under --all, parameters apply only to scenarios that declare them.
                let info = list_scenarios().iter().find(|s| s.id == id);
                let own: Params = match info {
                    Some(info) if all => p.iter().filter(|(k, _)| info.params.iter().any(|(n, _)| n == k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
                    _ => p.clone(),
                };
                let r = run_scenario(id, &own)?;
                ok &= r.passed();
                emit(js, r.to_json(), r.render_text());
            }
            if !ok {
                return Err(Failure::Expectation);
            }
        }
        Command::List => {
            let items: Vec<Value> = list_scenarios()
                .iter()
                .map(|s| json!({ "id": s.id, "description": s.description, "source": s.source }))
                .collect();
            let text = list_scenarios().iter().map(|s| format!("{:<26} {}", s.id, s.description)).collect::<Vec<_>>().join("\n");
            emit(js, Value::Array(items), text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Expectation) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
