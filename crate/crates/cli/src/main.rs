use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use stator_core::analysis::{default_crossings, default_grid, generate_curve, plan_for_xi};
use stator_core::multiparty::{run_multiparty_protocol, MultipartyMode, MultipartySpec};
use stator_core::protocol::{
    deterministic_config, fpt_config, optimal_alpha, params_from_nb, run_general_protocol,
    run_improved_protocol, smallxi_config, GateSpec, ProtocolReport, DEFAULT_B, TARGET_LABELS,
};
use stator_core::report::{branches_csv, curve_csv, RunReport};
use stator_core::rng::{SplitMix64, DEFAULT_SEED};
use stator_core::verify;
use stator_core::{PauliAxis, StateVector};

#[derive(Parser, Debug)]
#[command(
    name = "stator",
    version,
    about = "Probabilistic nonlocal gates from one shared entangled state"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uniform resource; every outcome succeeds.
    Deterministic(Common),
    /// Fidelity-targeted resource (`--F`).
    Fpt(Common),
    /// Small-angle resource, optionally with `--alpha`.
    Smallxi(Common),
    /// POVM-assisted technique with parameters `--n`, `--b`.
    Improved(Common),
    /// Cost curves of the improved technique against FPT.
    Curves(Common),
    /// Cheapest technique for a gate angle.
    Plan(Common),
    /// N-party gate through a quasi-GHZ resource.
    Multiparty(Common),
    /// Run every verification check.
    VerifyAll(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Gate angle ξ in (0, π/4].
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Target fidelity for the FPT resource.
    #[arg(long = "F")]
    f_target: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of partners for the multiparty run.
    #[arg(long = "N")]
    parties: Option<usize>,
    /// Axis as `x,y,z` components or one of `x`, `y`, `z`.
    #[arg(long, value_parser = parse_axis)]
    axis_a: Option<PauliAxis>,
    #[arg(long, value_parser = parse_axis)]
    axis_b: Option<PauliAxis>,
    /// Charlie's axis; including it adds Charlie's target to the gate.
    #[arg(long, value_parser = parse_axis)]
    axis_c: Option<PauliAxis>,
    /// Computational basis index, or `random` for a seeded random state.
    #[arg(long, default_value = "random")]
    target: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn parse_axis(s: &str) -> Result<PauliAxis, String> {
    match s {
        "x" | "X" => return Ok(PauliAxis::X),
        "y" | "Y" => return Ok(PauliAxis::Y),
        "z" | "Z" => return Ok(PauliAxis::Z),
        _ => {}
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad axis component {p:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    let [x, y, z] = parts[..] else {
        return Err(format!("axis needs three components, got {}", parts.len()));
    };
    PauliAxis::new(x, y, z).map_err(|e| e.to_string())
}

/// A failed run: `code` is the process exit status.
struct Failure {
    code: u8,
    message: String,
}

fn bad(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<stator_core::Error> for Failure {
    fn from(e: stator_core::Error) -> Self {
        bad(e.to_string())
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| bad(format!("missing required flag --{flag}")))
}

fn target_state(c: &Common, labels: &[&str]) -> Result<StateVector, Failure> {
    if c.target == "random" {
        return Ok(SplitMix64::new(c.seed).random_state(labels));
    }
    let index: usize = c.target.parse().map_err(|_| {
        bad(format!(
            "--target must be an index or `random`, got {:?}",
            c.target
        ))
    })?;
    Ok(StateVector::basis_state(labels, index)?)
}

fn gate(c: &Common) -> Result<GateSpec, Failure> {
    Ok(GateSpec::new(
        require(c.xi, "xi")?,
        c.axis_a.unwrap_or_default(),
        c.axis_b.unwrap_or_default(),
    )?)
}

fn axis_json(axis: &PauliAxis) -> Value {
    json!(axis.components())
}

fn base_params(c: &Common, g: &GateSpec) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("xi".into(), json!(g.xi));
    m.insert("axis_a".into(), axis_json(&g.axis_a));
    m.insert("axis_b".into(), axis_json(&g.axis_b));
    m.insert("target".into(), json!(c.target));
    m.insert("seed".into(), json!(c.seed));
    m
}

fn protocol_output(
    command: &str,
    params: serde_json::Map<String, Value>,
    report: &ProtocolReport,
    format: Format,
) -> Result<String, Failure> {
    match format {
        Format::Csv => Ok(branches_csv(report)),
        Format::Json => {
            let doc = RunReport::new(command, Value::Object(params), report);
            to_json(&serde_json::to_value(doc).map_err(|e| bad(e.to_string()))?)
        }
    }
}

fn to_json(value: &Value) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| bad(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Runs a command and returns the text to write plus the exit status.
fn dispatch(command: &Command) -> Result<(String, u8, Common), Failure> {
    let (name, c) = match command {
        Command::Deterministic(c) => ("deterministic", c),
        Command::Fpt(c) => ("fpt", c),
        Command::Smallxi(c) => ("smallxi", c),
        Command::Improved(c) => ("improved", c),
        Command::Curves(c) => ("curves", c),
        Command::Plan(c) => ("plan", c),
        Command::Multiparty(c) => ("multiparty", c),
        Command::VerifyAll(c) => ("verify-all", c),
    };
    let format = c.format.unwrap_or(match name {
        "plan" | "verify-all" => Format::Json,
        _ => Format::Csv,
    });

    let text = match name {
        "deterministic" => {
            let g = gate(c)?;
            let (spec, angles) = deterministic_config(&g);
            let report =
                run_general_protocol(&spec, &angles, &g, &target_state(c, &TARGET_LABELS)?)?;
            protocol_output(name, base_params(c, &g), &report, format)?
        }
        "fpt" => {
            let g = gate(c)?;
            let f = require(c.f_target, "F")?;
            let (spec, angles) = fpt_config(&g, f)?;
            let report =
                run_general_protocol(&spec, &angles, &g, &target_state(c, &TARGET_LABELS)?)?;
            let mut p = base_params(c, &g);
            p.insert("F_target".into(), json!(f));
            protocol_output(name, p, &report, format)?
        }
        "smallxi" => {
            let g = gate(c)?;
            let alpha = match c.alpha {
                Some(a) => a,
                None => optimal_alpha(&g)?,
            };
            let (spec, angles) = smallxi_config(&g, alpha)?;
            let report =
                run_general_protocol(&spec, &angles, &g, &target_state(c, &TARGET_LABELS)?)?;
            let mut p = base_params(c, &g);
            p.insert("alpha".into(), json!(alpha));
            protocol_output(name, p, &report, format)?
        }
        "improved" => {
            let g = gate(c)?;
            let (n, b) = (require(c.n, "n")?, c.b.unwrap_or(DEFAULT_B));
            let params = params_from_nb(n, b, g.xi)?;
            let report = run_improved_protocol(&params, &g, &target_state(c, &TARGET_LABELS)?)?;
            let mut p = base_params(c, &g);
            p.insert("n".into(), json!(n));
            p.insert("b".into(), json!(b));
            protocol_output(name, p, &report, format)?
        }
        "curves" => {
            let b = c.b.unwrap_or(DEFAULT_B);
            let curve = generate_curve(b, &default_grid())?;
            for s in &curve.skipped {
                eprintln!("warning: skipped n = {}: {}", s.n, s.reason);
            }
            match format {
                Format::Csv => curve_csv(&curve.points),
                Format::Json => to_json(&json!({
                    "command": name,
                    "params": { "b": b },
                    "points": curve.points,
                    "skipped": curve.skipped,
                    "diagnostics": curve.diagnostics,
                    "crossings": default_crossings(b)?,
                }))?,
            }
        }
        "plan" => {
            let xi = require(c.xi, "xi")?;
            let b = c.b.unwrap_or(DEFAULT_B);
            let plan = plan_for_xi(xi, b)?;
            let mut v = serde_json::to_value(plan).map_err(|e| bad(e.to_string()))?;
            match format {
                Format::Json => {
                    v["command"] = json!(name);
                    v["params"] = json!({ "xi": xi, "b": b });
                    to_json(&v)?
                }
                Format::Csv => {
                    let get = |k: &str| {
                        v.get(k)
                            .and_then(Value::as_f64)
                            .map(stator_core::report::fixed6)
                    };
                    let cell = |k: &str| get(k).unwrap_or_default();
                    format!(
                        "technique,xi,n,E,F\n{},{},{},{},{}\n",
                        v["technique"].as_str().unwrap_or_default(),
                        cell("xi"),
                        cell("n"),
                        get("E0").or_else(|| get("E")).unwrap_or_default(),
                        cell("F"),
                    )
                }
            }
        }
        "multiparty" => {
            let xi = require(c.xi, "xi")?;
            let parties = c.parties.unwrap_or(2);
            let axis = c.axis_a.unwrap_or_default();
            let g = GateSpec::new(xi, axis, axis)?;
            let (mode, resource, mut p) = match (c.n, c.f_target) {
                (Some(n), _) => {
                    let b = c.b.unwrap_or(DEFAULT_B);
                    let params = params_from_nb(n, b, xi)?;
                    let mut p = serde_json::Map::new();
                    p.insert("mode".into(), json!("improved"));
                    p.insert("n".into(), json!(n));
                    p.insert("b".into(), json!(b));
                    (MultipartyMode::Improved(params), params.resource(), p)
                }
                (None, Some(f)) => {
                    let (r, angles) = fpt_config(&g, f)?;
                    let mut p = serde_json::Map::new();
                    p.insert("mode".into(), json!("fpt"));
                    p.insert("F_target".into(), json!(f));
                    (MultipartyMode::General(angles), r, p)
                }
                (None, None) => {
                    let (r, angles) = deterministic_config(&g);
                    let mut p = serde_json::Map::new();
                    p.insert("mode".into(), json!("deterministic"));
                    (MultipartyMode::General(angles), r, p)
                }
            };
            let spec = MultipartySpec::new(resource, vec![axis; parties], c.axis_c)?;
            let labels = spec.target_labels();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let report = run_multiparty_protocol(&spec, xi, &mode, &target_state(c, &refs)?)?;
            p.insert("xi".into(), json!(xi));
            p.insert("N".into(), json!(parties));
            p.insert("axis".into(), axis_json(&axis));
            p.insert(
                "axis_c".into(),
                c.axis_c.as_ref().map_or(Value::Null, axis_json),
            );
            p.insert("target".into(), json!(c.target));
            p.insert("seed".into(), json!(c.seed));
            protocol_output(name, p, &report, format)?
        }
        "verify-all" => {
            let results = verify::run_all();
            let passed = verify::all_passed(&results);
            let text = match format {
                Format::Json => {
                    to_json(&json!({ "command": name, "passed": passed, "checks": results }))?
                }
                Format::Csv => {
                    let mut s = String::new();
                    for r in &results {
                        s.push_str(&r.line());
                        s.push('\n');
                    }
                    s
                }
            };
            return Ok((text, if passed { 0 } else { 1 }, c.clone()));
        }
        _ => unreachable!("every subcommand is named above"),
    };
    Ok((text, 0, c.clone()))
}

fn write_output(text: &str, output: Option<&PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| bad(format!("cannot write {}: {e}", path.display())))
        }
        None => match io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                Err(bad(format!("cannot write to stdout: {e}")))
            }
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli.command)
        .and_then(|(text, code, c)| write_output(&text, c.output.as_ref()).map(|_| code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
