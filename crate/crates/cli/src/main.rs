//! `cwb`: command-line front end for checking congruence identities, finding
//! Maltsev term chains and comparing measured spectra with closed-form bounds.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cwb_core::constructions::{self, consistency_report, formulas, Report, ReportOptions, Status};
use cwb_core::free::{build_free, FreeOptions, DEFAULT_FREE_CAP};
use cwb_core::identity::catalog::{self, Params};
use cwb_core::identity::concrete::DEFAULT_ENUM_SIZE;
use cwb_core::identity::spectrum::{spectrum_range, DEFAULT_SPECTRUM_CAP};
use cwb_core::identity::{check_concrete, parse_identity, pw_check, ConcreteOptions, Identity, SpectrumOptions, SpectrumValue};
use cwb_core::terms::{search_day, search_gumm, search_jonsson, Search};
use cwb_core::{all_congruences, corpus, parse_algebra, Error, FiniteAlgebra};

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "cwb", version, about = "Congruence identities and Maltsev terms over finite algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Bound on free-algebra elements times |A|^generators.
    #[arg(long, default_value_t = DEFAULT_FREE_CAP, value_parser = positive, global = true)]
    free_cap: usize,
    /// Universes up to this size get every reflexive admissible relation.
    #[arg(long, default_value_t = DEFAULT_ENUM_SIZE, global = true)]
    enum_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Algebra summaries.
    Alg {
        #[command(subcommand)]
        command: AlgCommand,
    },
    /// Builds the free algebra on `g` generators.
    Free {
        file: String,
        #[arg(short = 'g', long)]
        generators: usize,
        /// Print a term for every element.
        #[arg(long)]
        witnesses: bool,
    },
    /// Searches for a shortest chain of Maltsev terms.
    Terms {
        file: String,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Largest scheme parameter tried.
        #[arg(long, default_value_t = 16)]
        max: usize,
    },
    /// Checks one identity.
    Check {
        file: String,
        /// Catalog entry name.
        #[arg(long, conflicts_with = "idl", required_unless_present = "idl")]
        identity: Option<String>,
        /// File holding an identity in the relational expression language.
        #[arg(long)]
        idl: Option<String>,
        /// Value of the symbolic count.
        #[arg(long)]
        k: Option<usize>,
        /// Checking mode; defaults to `pw` for congruence-only identities.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Catalog parameter, as `name=value`.
        #[arg(long = "param", value_parser = param_pair)]
        params: Vec<(String, usize)>,
    },
    /// Least `k` for a catalog family over a range of its first parameter.
    Spectrum {
        file: String,
        #[arg(long)]
        family: String,
        #[arg(long)]
        m_from: usize,
        #[arg(long)]
        m_to: usize,
        #[arg(long, default_value_t = DEFAULT_SPECTRUM_CAP)]
        cap: usize,
        /// Other catalog parameters, as `name=value`.
        #[arg(long = "param", value_parser = param_pair)]
        params: Vec<(String, usize)>,
    },
    /// Evaluates a closed-form bound.
    Bounds(BoundsArgs),
    /// Measures term counts and spectra and checks every bound against them.
    Verify {
        #[arg(required = true)]
        files: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SPECTRUM_CAP)]
        cap: usize,
        /// Day spectra are measured for m up to this value.
        #[arg(long, default_value_t = 7)]
        max_m: usize,
    },
}

#[derive(Subcommand, Debug)]
enum AlgCommand {
    /// Size, operations and congruence count.
    Info { file: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Day,
    Gumm,
    Jonsson,
    Alvin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pw,
    Concrete,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Formula name; omit to list all formulas.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
}

impl BoundsArgs {
    fn params(&self) -> Params {
        [
            ("r", self.r),
            ("q", self.q),
            ("n", self.n),
            ("p", self.p),
            ("h", self.h),
            ("i", self.i),
            ("m", self.m),
            ("s", self.s),
            ("t", self.t),
            ("k", self.k),
            ("l", self.l),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.map(|v| (name.to_string(), v)))
        .collect()
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn param_pair(s: &str) -> Result<(String, usize), String> {
    let (name, value) = s.split_once('=').ok_or("expected name=value")?;
    let value = value.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((name.trim().to_string(), value))
}

/// What a subcommand produced: text and JSON renderings plus an exit code.
struct Outcome {
    text: String,
    json: Value,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(out) => {
            match cli.global.format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap() { EXIT_CAP } else { EXIT_USAGE })
        }
    }
}

/// Reads an `.alg` file, falling back to the bundled algebra of that name.
fn load(name: &str) -> Result<FiniteAlgebra, Error> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {name}: {e}")))?;
        return parse_algebra(&text);
    }
    let stem = name.strip_suffix(".alg").unwrap_or(name);
    corpus::by_name(stem).ok_or_else(|| {
        let known: Vec<_> = corpus::ALL.iter().map(|(n, _)| *n).collect();
        Error::InvalidArgument(format!(
            "no file `{name}` and no bundled algebra of that name (bundled: {})",
            known.join(", ")
        ))
    })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let g = &cli.global;
    let free = FreeOptions {
        cap_entries: g.free_cap,
        ..FreeOptions::default()
    };
    let spectrum_opts = SpectrumOptions {
        free,
        concrete: ConcreteOptions {
            enum_size: g.enum_size,
            ..ConcreteOptions::default()
        },
    };
    match &cli.command {
        Command::Alg {
            command: AlgCommand::Info { file },
        } => alg_info(&load(file)?),
        Command::Free {
            file,
            generators,
            witnesses,
        } => free_cmd(&load(file)?, *generators, *witnesses, free),
        Command::Terms { file, scheme, max } => terms(&load(file)?, *scheme, *max, free),
        Command::Check {
            file,
            identity,
            idl,
            k,
            mode,
            params,
        } => {
            let id = match (identity, idl) {
                (Some(name), _) => catalog::instantiate(name, &params.iter().cloned().collect())?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::InvalidArgument(format!("cannot read {path}: {e}")))?;
                    parse_identity(&text)?
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            check(&load(file)?, &id, *k, *mode, &spectrum_opts)
        }
        Command::Spectrum {
            file,
            family,
            m_from,
            m_to,
            cap,
            params,
        } => {
            let fixed: Params = params.iter().cloned().collect();
            spectrum_cmd(&load(file)?, family, *m_from..=*m_to, &fixed, *cap, &spectrum_opts)
        }
        Command::Bounds(args) => bounds(args),
        Command::Verify { files, cap, max_m } => {
            let algs = files.iter().map(|f| load(f)).collect::<Result<Vec<_>, _>>()?;
            let opts = ReportOptions {
                spectrum: spectrum_opts,
                spectrum_cap: *cap,
                max_m: *max_m,
                ..ReportOptions::default()
            };
            verify(&algs, &opts)
        }
    }
}

fn alg_info(alg: &FiniteAlgebra) -> Result<Outcome, Error> {
    let congruences = all_congruences(alg, alg.size().max(1))?.len();
    let ops: Vec<Value> = alg
        .signature()
        .ops()
        .iter()
        .map(|(n, a)| json!({ "name": n, "arity": a }))
        .collect();
    let op_text: Vec<String> = alg.signature().ops().iter().map(|(n, a)| format!("{n}/{a}")).collect();
    Ok(Outcome {
        text: format!(
            "algebra {}\nsize {}\noperations {}\nidempotent {}\ncongruences {}\n",
            alg.name(),
            alg.size(),
            op_text.join(" "),
            alg.is_idempotent(),
            congruences
        ),
        json: json!({
            "algebra": alg.name(),
            "size": alg.size(),
            "operations": ops,
            "idempotent": alg.is_idempotent(),
            "congruences": congruences,
        }),
        code: EXIT_OK,
    })
}

fn free_cmd(alg: &FiniteAlgebra, g: usize, witnesses: bool, opts: FreeOptions) -> Result<Outcome, Error> {
    let f = build_free(alg, g, opts)?;
    let mut text = format!("free algebra on {g} generators over {}: {} elements\n", alg.name(), f.len());
    let mut json = json!({ "algebra": alg.name(), "generators": g, "elements": f.len() });
    if witnesses {
        let terms = (0..f.len())
            .map(|e| f.term_of(e).map(|t| t.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        for (e, t) in terms.iter().enumerate() {
            text.push_str(&format!("{e}\t{t}\n"));
        }
        json["witnesses"] = json!(terms);
    }
    Ok(Outcome { text, json, code: EXIT_OK })
}

fn terms(alg: &FiniteAlgebra, scheme: SchemeArg, max: usize, opts: FreeOptions) -> Result<Outcome, Error> {
    let search = match scheme {
        SchemeArg::Day => search_day(alg, max, opts)?,
        SchemeArg::Gumm => search_gumm(alg, max, opts)?,
        SchemeArg::Jonsson => search_jonsson(alg, max, false, opts)?,
        SchemeArg::Alvin => search_jonsson(alg, max, true, opts)?,
    };
    let name = format!("{scheme:?}").to_lowercase();
    Ok(match search {
        Search::Found(f) => {
            let mut text = format!(
                "{}: {} ({} terms, free algebra of size {})\n",
                alg.name(),
                f.chain.scheme,
                f.chain.terms.len(),
                f.free_size
            );
            for (i, t) in f.chain.terms.iter().enumerate() {
                text.push_str(&format!("  t{i} = {t}\n"));
            }
            Outcome {
                text,
                json: json!({ "algebra": alg.name(), "scheme": name, "result": "found", "found": f }),
                code: EXIT_OK,
            }
        }
        Search::NoneUpTo(n) => Outcome {
            text: format!("{}: no {name} chain with parameter up to {n}\n", alg.name()),
            json: json!({ "algebra": alg.name(), "scheme": name, "result": "none up to", "max": n }),
            code: EXIT_CAP,
        },
        Search::Never => Outcome {
            text: format!("{}: no {name} chain exists\n", alg.name()),
            json: json!({ "algebra": alg.name(), "scheme": name, "result": "never" }),
            code: EXIT_REFUTED,
        },
    })
}

fn check(
    alg: &FiniteAlgebra,
    id: &Identity,
    k: Option<usize>,
    mode: Option<Mode>,
    opts: &SpectrumOptions,
) -> Result<Outcome, Error> {
    let mode = mode.unwrap_or(if id.congruence_only() { Mode::Pw } else { Mode::Concrete });
    let (holds, verdict, detail) = match mode {
        Mode::Pw => {
            let v = pw_check(alg, id, k, opts.free)?;
            let detail = format!("{} generators, free algebra of size {}", v.nodes, v.free_size);
            (v.holds, serde_json::to_value(&v).expect("serializable"), detail)
        }
        Mode::Concrete => {
            let v = check_concrete(alg, id, k, &opts.concrete)?;
            let mut detail = format!("{} assignments examined", v.examined);
            if let Some(c) = &v.counterexample {
                let env: Vec<String> = c
                    .env
                    .iter()
                    .map(|(n, r)| format!("{n}={}", r.to_row_strings().join("/")))
                    .collect();
                detail.push_str(&format!("; pair {:?} fails under {}", c.pair, env.join(" ")));
            }
            (v.holds, serde_json::to_value(&v).expect("serializable"), detail)
        }
    };
    let mode_name = format!("{mode:?}").to_lowercase();
    let k_text = k.map(|k| format!(" with k={k}")).unwrap_or_default();
    Ok(Outcome {
        text: format!(
            "{} on {}{k_text}: {} ({mode_name}; {detail})\n",
            id.name,
            alg.name(),
            if holds { "holds" } else { "refuted" }
        ),
        json: json!({
            "algebra": alg.name(),
            "identity": id.name,
            "text": id.to_string(),
            "k": k,
            "mode": mode_name,
            "holds": holds,
            "verdict": verdict,
        }),
        code: if holds { EXIT_OK } else { EXIT_REFUTED },
    })
}

fn spectrum_cmd(
    alg: &FiniteAlgebra,
    family: &str,
    range: std::ops::RangeInclusive<usize>,
    fixed: &Params,
    cap: usize,
    opts: &SpectrumOptions,
) -> Result<Outcome, Error> {
    let entry = catalog::lookup(family)?;
    let (param, _) = entry
        .params
        .first()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no parameter to range over", entry.name)))?;
    let results = spectrum_range(alg, entry.name, param, range.clone(), fixed, cap, opts);
    let mut text = format!("{} spectrum of {} (cap {cap})\n", entry.name, alg.name());
    let mut rows = Vec::new();
    let mut code = EXIT_OK;
    for (v, r) in range.zip(results) {
        match r {
            Ok(s) => {
                if matches!(s.value, SpectrumValue::ExceedsCap(_)) {
                    code = EXIT_CAP;
                }
                text.push_str(&format!("  {param}={v}\t{}\t{:?}\n", s.value, s.level).to_lowercase());
                rows.push(serde_json::to_value(&s).expect("serializable"));
            }
            Err(e) if e.is_cap() => {
                code = EXIT_CAP;
                text.push_str(&format!("  {param}={v}\t{e}\n"));
                let mut params = fixed.clone();
                params.insert(param.to_string(), v);
                rows.push(json!({ "family": entry.name, "params": params, "error": e.to_string() }));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome {
        text,
        json: json!({ "algebra": alg.name(), "family": entry.name, "cap": cap, "results": rows }),
        code,
    })
}

fn bounds(args: &BoundsArgs) -> Result<Outcome, Error> {
    let Some(name) = &args.name else {
        let mut text = String::new();
        let mut list = Vec::new();
        for f in formulas() {
            text.push_str(&format!("{:<9} ({})  {}\n", f.name, f.params.join(","), f.summary));
            list.push(json!({ "name": f.name, "params": f.params, "summary": f.summary }));
        }
        return Ok(Outcome {
            text,
            json: json!(list),
            code: EXIT_OK,
        });
    };
    let params = args.params();
    let formula = constructions::lookup_bound(name)?;
    let claim = formula.eval(&params)?;
    let given: Vec<String> = params.iter().map(|(n, v)| format!("{n}={v}")).collect();
    let text = match claim.lhs {
        Some(z) => format!("{} ({}): z={z} w={}\n", formula.name, given.join(" "), claim.rhs),
        None => format!("{} ({}): w={}\n", formula.name, given.join(" "), claim.rhs),
    };
    Ok(Outcome {
        text,
        json: json!({ "name": formula.name, "params": params, "claim": claim }),
        code: EXIT_OK,
    })
}

fn report_text(r: &Report) -> String {
    let opt = |v: Option<usize>| v.map_or("none".to_string(), |v| v.to_string());
    let mut text = format!("{}: Day k={} Gumm n={}\n", r.algebra, opt(r.day_k), opt(r.gumm_n));
    for s in &r.spectra {
        let params: Vec<String> = s.params.iter().map(|(n, v)| format!("{n}={v}")).collect();
        text.push_str(&format!("  {}({}) = {}\n", s.family, params.join(","), s.value));
    }
    for b in &r.bounds {
        let params: Vec<String> = b.params.iter().map(|(n, v)| format!("{n}={v}")).collect();
        let claimed = b.claimed.map_or("-".to_string(), |c| c.to_string());
        let name = format!("{}({})", b.name, params.join(","));
        text.push_str(&format!(
            "  {:<14} {name:<18} {:<34} claimed {claimed:<9} measured {}\n",
            b.status.to_string(),
            b.target,
            b.measured
        ));
    }
    text.push_str(&format!(
        "  {} pass, {} fail, {} unchecked, {} not applicable\n",
        r.count(Status::Pass),
        r.count(Status::Fail),
        r.count(Status::Unchecked),
        r.count(Status::NotApplicable)
    ));
    text
}

fn verify(algs: &[FiniteAlgebra], opts: &ReportOptions) -> Result<Outcome, Error> {
    let reports = algs
        .iter()
        .map(|a| consistency_report(a, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let text = reports.iter().map(report_text).collect::<Vec<_>>().join("\n");
    let passed = reports.iter().all(Report::passed);
    let json = if reports.len() == 1 {
        serde_json::to_value(&reports[0])
    } else {
        serde_json::to_value(&reports)
    }
    .expect("serializable");
    Ok(Outcome {
        text,
        json,
        code: if passed { EXIT_OK } else { EXIT_REFUTED },
    })
}
