use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use equires_core::catalog::{self, REPLAY_NAMES};
use equires_core::driver::{center_text, Driver, DriverConfig};
use equires_core::io::{self, Input, TraceLevel};
use equires_core::CoreError;

mod goldens;

#[derive(Parser)]
#[command(name = "equires", version, about = "Resolution and equiresolution of basic objects over Q[eps]/(eps^m)")]
struct Cli {
    /// Override the nilpotency order m of the input.
    #[arg(long = "m", global = true)]
    m: Option<usize>,
    /// Largest ambient dimension the driver accepts.
    #[arg(long, global = true, default_value_t = equires_core::driver::MAX_DIM)]
    max_dim: usize,
    /// Transcript verbosity: none, steps or full.
    #[arg(long, global = true, default_value = "steps")]
    trace: TraceLevel,
    /// Write the JSON report to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the singular locus.
    Sing { input: PathBuf },
    /// Print the next algorithmic center.
    Center { input: PathBuf },
    /// Perform one algorithmic blow-up and print the transform.
    Step { input: PathBuf },
    /// Resolve the fiber over Q.
    Resolve { input: PathBuf },
    /// Check how far the fiber resolution lifts over A (the default command).
    Equires { input: PathBuf },
    /// Principalize an ideal given as an idtriple.
    Principalize { input: PathBuf },
    /// Embedded resolution of a hypersurface.
    Embedded { input: PathBuf },
    /// Recompute a built-in example and diff it against its golden report.
    Replay { name: String },
}

const SUBCOMMANDS: [&str; 9] = ["sing", "center", "step", "resolve", "equires", "principalize", "embedded", "replay", "help"];
const VALUED_FLAGS: [&str; 4] = ["--m", "--max-dim", "--trace", "--out"];

/// Inserts `equires` when the first positional argument is not a subcommand.
fn with_default_command(mut args: Vec<String>) -> Vec<String> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if VALUED_FLAGS.contains(&a.as_str()) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            if !SUBCOMMANDS.contains(&a.as_str()) {
                args.insert(i, "equires".into());
            }
            break;
        }
    }
    args
}

/// What a command produced: the JSON report, the transcript and the exit code.
struct Outcome {
    report: Json,
    text: String,
    code: u8,
}

fn exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::Parse { .. }
        | CoreError::BadInput(_)
        | CoreError::UnknownVariable(_)
        | CoreError::UnsupportedCenter(_)
        | CoreError::NotACoordinateChange(_) => 4,
        CoreError::AlgorithmStuck(_) | CoreError::GuardExceeded(_) | CoreError::A3Breach(_) => 3,
        _ => 1,
    }
}

fn load(path: &Path, m: Option<usize>) -> Result<Input, CoreError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::BadInput(format!("cannot read {}: {e}", path.display())))?;
    io::parse_input(&text, m)
}

fn sing(input: &Input) -> Outcome {
    let b = input.object();
    let parts: Vec<Json> = b
        .singular_locus()
        .into_iter()
        .map(|p| {
            let ring = b.pair.chart(&p.chart).expect("parts name charts").ring(1);
            json!({ "chart": p.chart, "ideal": equires_core::driver::ideal_text(&p.ideal, &ring), "empty": p.empty })
        })
        .collect();
    let report = io::envelope("sing", json!({ "sing": parts, "sing_empty": b.sing_is_empty() }));
    Outcome { report, text: io::sing_text(&b) + "\n", code: 0 }
}

fn center(input: &Input, cfg: &DriverConfig, execute: bool) -> Result<Outcome, CoreError> {
    let command = if execute { "step" } else { "center" };
    let mut d = Driver::new(input.object(), cfg.clone())?;
    let Some(plan) = d.plan()? else {
        let report = io::envelope(command, json!({ "center": null, "sing_empty": true }));
        return Ok(Outcome { report, text: "Sing = ∅\n".into(), code: 0 });
    };
    let text = center_text(d.object(), &plan.center);
    let mut body = json!({
        "kind": plan.kind.name(),
        "value": io::value_json(&plan.value),
        "center": text,
        "trace": plan.trace,
        "pending": plan.pending,
    });
    let mut lines = vec![format!("{} center {} value {}", plan.kind.name(), text.join("; "), plan.value.display())];
    if let Some((clause, detail)) = &plan.failure {
        body["failure"] = json!({ "clause": clause.to_string(), "detail": detail });
        lines.push(format!("failure: {clause} ({detail})"));
        return Ok(Outcome { report: io::envelope(command, body), text: lines.join("\n") + "\n", code: 2 });
    }
    if execute {
        d.execute(&plan)?;
        body["object"] = io::object_json(d.object());
        lines.push(d.object().display().trim_end().to_string());
        lines.push(io::sing_text(d.object()));
    }
    Ok(Outcome { report: io::envelope(command, body), text: lines.join("\n") + "\n", code: 0 })
}

fn replay_highlights(name: &str, r: &Json) -> Vec<String> {
    let s = |v: &Json| match v {
        Json::String(s) => s.clone(),
        other => other.to_string(),
    };
    let eq = &r["equires"];
    let equires = format!("e = {}, ell = {}, failure: {}", eq["e"], eq["ell"], s(&eq["failure"]["clause"]));
    match name {
        "ex4_2" => vec![
            format!("fiber order at the origin = {}", r["fiber_order_at_origin"]),
            format!("nu(I, V(x,y)) = {} (fiber {})", r["verdict"]["nu"], r["verdict"]["nu_fiber"]),
            equires,
        ],
        "ex_nohay" => vec![equires],
        "ex4_6" => vec![
            format!("pre-equivalent on the probe: {}", r["pre_equivalent_on_probe"]),
            format!("fibers pre-equivalent on the probe: {}", r["fibers_pre_equivalent_on_probe"]),
        ],
        "ex6_9" | "ex6_10" => {
            let mut v = Vec::new();
            if let Some(d) = r.get("delta") {
                v.push(format!("Delta = {}", s(d)));
            }
            v.push(format!("B_Z = {}", s(&r["B_Z"])));
            v.push(format!(
                "{}: B-permissible {} (nu {} vs {}), B_Z-permissible {}",
                s(&r["center"]),
                r["for_B"]["permissible"],
                r["for_B"]["nu"],
                r["for_B"]["nu_fiber"],
                r["for_B_Z"]["permissible"]
            ));
            v
        }
        "ex8_6" => vec![
            format!("Delta = {}, H = {}, C(H, Z) = {}", s(&r["delta"]), s(&r["H"]), s(&r["coefficient_ideal"])),
            format!("selected lambda: {}", r["selected_lambdas"]),
            format!("e = {}, ell = {}, centers {}", eq["e"], eq["ell"], eq["centers"]),
        ],
        _ => Vec::new(),
    }
}

fn replay(name: &str, cfg: &DriverConfig) -> anyhow::Result<Outcome> {
    if !REPLAY_NAMES.contains(&name) {
        return Err(CoreError::BadInput(format!("unknown example `{name}` (known: {})", REPLAY_NAMES.join(", "))).into());
    }
    let report = catalog::replay(name, cfg)?;
    let produced = io::to_text(&report);
    let golden = goldens::load(name)?;
    let mut lines = replay_highlights(name, &report["report"]);
    let code = match goldens::first_difference(&golden, &produced) {
        None => {
            lines.push(format!("golden {name}: match"));
            0
        }
        Some((line, want, got)) => {
            lines.push(format!("golden {name}: mismatch at line {line}"));
            lines.push(format!("  golden:   {want}"));
            lines.push(format!("  produced: {got}"));
            1
        }
    };
    Ok(Outcome { report, text: lines.join("\n") + "\n", code })
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = DriverConfig { max_dim: cli.max_dim, ..DriverConfig::default() };
    let level = cli.trace;
    let input = |p: &Path| load(p, cli.m);
    Ok(match &cli.command {
        Command::Sing { input: p } => sing(&input(p)?),
        Command::Center { input: p } => center(&input(p)?, &cfg, false)?,
        Command::Step { input: p } => center(&input(p)?, &cfg, true)?,
        Command::Resolve { input: p } => {
            let r = equires_core::resolve_fiber(&input(p)?.object(), &cfg)?;
            Outcome { report: io::envelope("resolve", io::run_json(&r)), text: io::run_text(&r, level), code: 0 }
        }
        Command::Equires { input: p } => {
            let r = equires_core::equiresolve(&input(p)?.object(), &cfg)?;
            let code = if r.equisolvable() { 0 } else { 2 };
            Outcome { report: io::envelope("equires", io::equires_json(&r)), text: io::equires_text(&r, level), code }
        }
        Command::Principalize { input: p } => {
            let Input::Triple(t) = input(p)? else {
                return Err(CoreError::BadInput("principalize expects an idtriple input".into()).into());
            };
            let r = equires_core::principalize(&t, &cfg)?;
            let code = if r.equisolvable() { 0 } else { 2 };
            Outcome { report: io::envelope("principalize", io::equires_json(&r)), text: io::equires_text(&r, level), code }
        }
        Command::Embedded { input: p } => {
            let Input::Embedded(x) = input(p)? else {
                return Err(CoreError::BadInput("embedded expects an embedded input".into()).into());
            };
            let r = equires_core::resolve_embedded(&x, &cfg)?;
            let code = if r.failure.is_none() { 0 } else { 2 };
            Outcome { report: io::envelope("embedded", io::embedded_json(&r)), text: io::embedded_text(&r, level), code }
        }
        Command::Replay { name } => replay(name, &cfg)?,
    })
}

fn input_path(c: &Command) -> Option<&Path> {
    match c {
        Command::Sing { input }
        | Command::Center { input }
        | Command::Step { input }
        | Command::Resolve { input }
        | Command::Equires { input }
        | Command::Principalize { input }
        | Command::Embedded { input } => Some(input),
        Command::Replay { .. } => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(with_default_command(std::env::args().collect()));
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if let Some(path) = &cli.out {
                let written = std::fs::write(path, io::to_text(&out.report))
                    .with_context(|| format!("cannot write {}", path.display()));
                if let Err(e) = written {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            let core = e.downcast_ref::<CoreError>();
            match (core, input_path(&cli.command)) {
                (Some(CoreError::Parse { msg, line, column }), Some(p)) => {
                    eprintln!("{}:{line}:{column}: {msg}", p.display())
                }
                _ => eprintln!("error: {e:#}"),
            }
            ExitCode::from(core.map_or(1, exit_code))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn bare_paths_default_to_equires() {
        assert_eq!(with_default_command(args("equires ex.json")), args("equires equires ex.json"));
        assert_eq!(with_default_command(args("equires --m 3 ex.json")), args("equires --m 3 equires ex.json"));
        assert_eq!(with_default_command(args("equires sing ex.json")), args("equires sing ex.json"));
        assert_eq!(with_default_command(args("equires --trace full replay ex4_2")), args("equires --trace full replay ex4_2"));
    }
}
