use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mucheck_core::{
    parse_model, parse_pattern, parse_theory, satisfies, CarrierSet, CheckOptions, Context, Diagnostic, ElemVar,
    EvalOptions, Evaluator, FiniteModel, LfpMode, SetVar, Theory, Valuation,
};

#[derive(Parser)]
#[command(name = "mucheck", version, about = "Check matching mu-logic theories against finite models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lfp {
    /// Kleene iteration from the empty set
    Iterate,
    /// Intersection of all pre-fixpoints
    Prefix,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Least-fixpoint engine
    #[arg(long, value_enum, default_value = "iterate")]
    lfp: Lfp,
    /// Largest carrier the prefix engine enumerates subsets of
    #[arg(long, default_value_t = 20)]
    prefix_cap: usize,
    /// Warn about argument tuples missing from the model file
    #[arg(long)]
    lint_totality: bool,
}

impl EvalArgs {
    fn options(&self) -> EvalOptions {
        let lfp = match self.lfp {
            Lfp::Iterate => LfpMode::Iterate,
            Lfp::Prefix => LfpMode::Prefix,
        };
        EvalOptions { lfp, prefix_cap: self.prefix_cap }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a theory file
    Check {
        theory: PathBuf,
        /// Treat non-positive fixpoints as errors
        #[arg(long)]
        strict_positivity: bool,
    },
    /// Evaluate a pattern in a model
    Eval {
        theory: PathBuf,
        model: PathBuf,
        pattern: String,
        /// Element variable binding, `x:Sort=elem`
        #[arg(short = 'v', value_name = "x:Sort=elem")]
        elem: Vec<String>,
        /// Set variable binding, `X:Sort={e1,e2}`
        #[arg(short = 'V', value_name = "X:Sort={..}")]
        set: Vec<String>,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Check that a model satisfies the axioms of a theory
    Satisfies {
        theory: PathBuf,
        model: PathBuf,
        /// Check only the axiom with this label (repeatable)
        #[arg(long = "axiom", value_name = "LABEL")]
        axioms: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        /// Largest number of valuations enumerated per axiom
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
        #[command(flatten)]
        eval: EvalArgs,
    },
}

/// Exit status: 1 for checking failures, 2 for unreadable input.
enum Failure {
    Check,
    Io,
}

impl From<Failure> for ExitCode {
    fn from(f: Failure) -> ExitCode {
        match f {
            Failure::Check => ExitCode::from(1),
            Failure::Io => ExitCode::from(2),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { theory, strict_positivity } => cmd_check(&theory, strict_positivity),
        Command::Eval { theory, model, pattern, elem, set, eval } => {
            cmd_eval(&theory, &model, &pattern, &elem, &set, &eval)
        }
        Command::Satisfies { theory, model, axioms, report, cap, eval } => {
            cmd_satisfies(&theory, &model, &axioms, report, cap, &eval)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        Failure::Io
    })
}

fn report(origin: &str, diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{origin}:{d}");
    }
}

fn load_theory(path: &Path) -> Result<Theory, Failure> {
    let text = read(path)?;
    let origin = path.display().to_string();
    match parse_theory(&text) {
        Ok(parsed) => {
            report(&origin, &parsed.warnings);
            Ok(parsed.value)
        }
        Err(diags) => {
            report(&origin, &diags);
            Err(Failure::Check)
        }
    }
}

fn load_model(path: &Path, theory: &Theory, lint: bool) -> Result<FiniteModel, Failure> {
    let text = read(path)?;
    let origin = path.display().to_string();
    match parse_model(&text, theory, lint) {
        Ok(parsed) => {
            report(&origin, &parsed.warnings);
            Ok(parsed.value)
        }
        Err(diags) => {
            report(&origin, &diags);
            Err(Failure::Check)
        }
    }
}

fn cmd_check(path: &Path, strict_positivity: bool) -> Result<(), Failure> {
    let text = read(path)?;
    let origin = path.display().to_string();
    let parsed = match parse_theory(&text) {
        Ok(p) => p,
        Err(diags) => {
            report(&origin, &diags);
            return Err(Failure::Check);
        }
    };
    report(&origin, &parsed.warnings);
    let t = &parsed.value;
    let non_positive = parsed.warnings.iter().filter(|d| d.code == "non-positive-mu").count();
    if strict_positivity && non_positive > 0 {
        eprintln!("error: {non_positive} non-positive fixpoint(s) rejected by --strict-positivity");
        return Err(Failure::Check);
    }
    println!(
        "{origin}: ok ({} sorts, {} symbols, {} axioms)",
        t.signature().sort_count(),
        t.signature().symbol_count(),
        t.axioms().len()
    );
    Ok(())
}

/// Split `name:Sort=value`, accepting a leading `#` on set variables.
fn split_binding(text: &str) -> Option<(&str, &str, &str)> {
    let (lhs, value) = text.split_once('=')?;
    let (name, sort) = lhs.trim().trim_start_matches('#').split_once(':')?;
    Some((name.trim(), sort.trim(), value.trim()))
}

fn bindings(model: &FiniteModel, elem: &[String], set: &[String]) -> Result<Valuation, String> {
    let sig = model.signature();
    let mut rho = Valuation::new();
    let sort_of = |name: &str| sig.sort(name).ok_or_else(|| format!("unknown sort `{name}`"));
    for b in elem {
        let (name, sort, value) =
            split_binding(b).ok_or_else(|| format!("malformed binding `{b}`, expected x:Sort=elem"))?;
        let s = sort_of(sort)?;
        let e = model.elem(s, value).ok_or_else(|| format!("`{value}` is not an element of `{sort}`"))?;
        rho.set_evar(&ElemVar::new(name, s), e).map_err(|e| e.to_string())?;
    }
    for b in set {
        let (name, sort, value) =
            split_binding(b).ok_or_else(|| format!("malformed binding `{b}`, expected X:Sort={{e1,e2}}"))?;
        let s = sort_of(sort)?;
        let inner = value
            .strip_prefix('{')
            .and_then(|v| v.strip_suffix('}'))
            .ok_or_else(|| format!("set value `{value}` must be written {{e1,e2}}"))?;
        let mut acc = CarrierSet::empty(s, model.carrier_size(s));
        for label in inner.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            let e = model.elem(s, label).ok_or_else(|| format!("`{label}` is not an element of `{sort}`"))?;
            acc.insert(e);
        }
        rho.set_svar(&SetVar::new(name, s), acc).map_err(|e| e.to_string())?;
    }
    Ok(rho)
}

fn cmd_eval(
    theory: &Path,
    model: &Path,
    pattern: &str,
    elem: &[String],
    set: &[String],
    args: &EvalArgs,
) -> Result<(), Failure> {
    let t = load_theory(theory)?;
    let m = load_model(model, &t, args.lint_totality)?;
    let p = match parse_pattern(pattern, t.signature(), &Context::empty(), &Context::empty()) {
        Ok(parsed) => {
            report("<pattern>", &parsed.warnings);
            parsed.value
        }
        Err(diags) => {
            report("<pattern>", &diags);
            return Err(Failure::Check);
        }
    };
    let rho = bindings(&m, elem, set).map_err(|msg| {
        eprintln!("error: {msg}");
        Failure::Check
    })?;
    let mut ev = Evaluator::new(&m, args.options());
    let result = ev.eval(&rho, &p);
    for w in ev.warnings() {
        eprintln!("warning: {w}");
    }
    match result {
        Ok(set) => {
            println!("{}", m.format_set(&set));
            Ok(())
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(Failure::Check)
        }
    }
}

fn cmd_satisfies(
    theory: &Path,
    model: &Path,
    axioms: &[String],
    format: ReportFormat,
    cap: u64,
    args: &EvalArgs,
) -> Result<(), Failure> {
    let t = load_theory(theory)?;
    let m = load_model(model, &t, args.lint_totality)?;
    for label in axioms {
        if t.axiom(label).is_none() {
            eprintln!("error: no axiom labeled `{label}`");
            return Err(Failure::Check);
        }
    }
    let options = CheckOptions { eval: args.options(), state_cap: cap };
    let filter = (!axioms.is_empty()).then_some(axioms);
    let r = satisfies(&m, &t, &options, filter);
    match format {
        ReportFormat::Text => print!("{}", r.to_text(&m)),
        ReportFormat::Json => println!("{:#}", r.to_json(&m)),
    }
    if r.all_satisfied() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
