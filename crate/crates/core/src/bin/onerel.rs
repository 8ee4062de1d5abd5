use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use onerel::crash_simulator::{common_period, default_schedules, simulate, verify_at_least_two_crashes, CrashError};
use onerel::klyachko_strata::{build_two_variable_word, kernel_canonical_form, lemma2_decompose, stratum_membership};
use onerel::rational::{format_rational, int, parse_rational, Rational};
use onerel::report::{to_value, RunReport};
use onerel::sphere_complex::{
    check_csl, detect_type2, generate_random, load_complex, to_json, validate_sphere, RelatorSet, SphereComplex,
};
use onerel::surjectivity_analyzer::{
    amenable_shape, analyze_corroborated, analyze_in, certificate_verdict, normal_closure_search, order_evidence,
    verify_certificate, Evidence, Presentation, SearchBounds, ShapeRegistry,
};
use onerel::word_algebra::{
    coefficients, conjugacy_canonical, cyclic_reduce, exponent_sum, is_conjugate_to_gt, parse_word, t_shape, Alphabet,
    BaseWord, Generator, MixedWord, TShape,
};

#[derive(Parser)]
#[command(
    name = "onerel",
    version,
    about = "One-relator extensions of free groups: words, strata, sphere diagrams, crash flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct WordArgs {
    /// Word over a..z (no t) with uppercase inverses and t/T for the stable letter.
    #[arg(long)]
    word: String,
    /// Rank of the free base group; defaults to the smallest rank covering the word.
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Surjectivity verdict for G -> G*<t>/<<w>>.
    Analyze {
        #[command(flatten)]
        word: WordArgs,
        /// Attach a bounded normal-closure search with this conjugator length.
        #[arg(long)]
        conj_len: Option<usize>,
        #[arg(long, default_value_t = 3)]
        products: usize,
        /// Attach a quotient certificate search up to this degree.
        #[arg(long, default_value_t = 0)]
        max_degree: usize,
    },
    /// Stratum decomposition of an exponent-one word.
    Decompose {
        #[command(flatten)]
        word: WordArgs,
    },
    /// t-shape, coefficients and canonical forms of a word.
    Shape {
        #[command(flatten)]
        word: WordArgs,
    },
    /// Checks a sphere complex file.
    Validate {
        #[arg(long)]
        complex: PathBuf,
        /// The relator w0 the faces should read.
        #[arg(long)]
        word: Option<String>,
        /// Images of generators, e.g. "a=d,b=e".
        #[arg(long)]
        phi: Option<String>,
        /// Comma-separated elements h giving relators t^-1 h t (h phi)^-1.
        #[arg(long)]
        h: Option<String>,
    },
    /// Runs car schedules on a sphere complex; one JSON event per line.
    Simulate {
        #[arg(long)]
        complex: PathBuf,
        /// Rational horizon such as 12 or 7/2; defaults to twice the common period.
        #[arg(long)]
        horizon: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Searches finite permutation quotients for a non-surjectivity certificate.
    Certify {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value_t = 5)]
        max_degree: usize,
        /// Also report orders of the image of this element.
        #[arg(long)]
        order_of: Option<String>,
    },
    /// Bounded search of the normal closure for an element of given t-shape.
    SearchKernel {
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value = "(1)")]
        target_shape: String,
        #[arg(long, default_value_t = 3)]
        conj_len: usize,
        #[arg(long, default_value_t = 3)]
        products: usize,
    },
    /// Writes a seeded random sphere complex.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
}

/// Failure classes with their exit codes.
enum Failure {
    Input(String),
    Contract(String),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<CrashError> for Failure {
    fn from(e: CrashError) -> Self {
        match e {
            CrashError::Complex(_) | CrashError::CornerCount { .. } | CrashError::FaceType { .. } => Failure::input(e),
            other => Failure::Contract(other.to_string()),
        }
    }
}

type Outcome = Result<(Vec<String>, String), Failure>;

fn word_alphabet(text: &str, rank: Option<usize>) -> Result<Alphabet, Failure> {
    if let Some(rank) = rank {
        return Alphabet::of_rank(rank).map_err(Failure::input);
    }
    let needed = text
        .chars()
        .filter(|c| c.is_ascii_alphabetic() && !c.eq_ignore_ascii_case(&'t'))
        .map(|c| c.to_ascii_lowercase())
        .max();
    let rank = match needed {
        Some(c) => ('a'..=c).filter(|&x| x != 't').count(),
        None => 1,
    };
    Alphabet::of_rank(rank).map_err(Failure::input)
}

fn read_word(args: &WordArgs) -> Result<(MixedWord, Alphabet), Failure> {
    let alphabet = word_alphabet(&args.word, args.rank)?;
    let w = parse_word(&args.word, &alphabet).map_err(Failure::input)?;
    Ok((w, alphabet))
}

fn parse_shape(text: &str) -> Result<TShape, Failure> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let exps: Vec<i64> = inner
        .split(',')
        .map(|s| s.trim().trim_start_matches('+').parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Input(format!("invalid t-shape '{text}'")))?;
    TShape::new(exps).ok_or_else(|| Failure::Input(format!("t-shape '{text}' has a zero exponent")))
}

fn cmd_analyze(args: &WordArgs, conj_len: Option<usize>, products: usize, max_degree: usize) -> Outcome {
    let (w, alphabet) = read_word(args)?;
    let verdict = match conj_len {
        Some(conj_len) => analyze_corroborated(&w, &alphabet, SearchBounds { conj_len, products }, max_degree)
            .map_err(Failure::input)?,
        None => analyze_in(&w, &alphabet).map_err(Failure::input)?,
    };
    if let Evidence::Collapse(c) = &verdict.evidence {
        if !c.verified {
            return Err(Failure::Contract(format!("collapse t -> {} failed to verify", c.t_image)));
        }
    }
    let summary = format!("{w}: {:?} ({:?})", verdict.status, verdict.reason);
    let report = RunReport::new("analyze")
        .input("word", w.to_string())
        .input("rank", alphabet.rank())
        .input("conj_len", conj_len)
        .input("products", products)
        .input("max_degree", max_degree)
        .with_output(&verdict);
    Ok((vec![report.to_pretty()], summary))
}

fn cmd_decompose(args: &WordArgs) -> Outcome {
    let (w, alphabet) = read_word(args)?;
    let d = lemma2_decompose(&w).map_err(Failure::input)?;
    if !d.verify(&w) {
        return Err(Failure::Contract(format!("decomposition of {w} failed its own checks")));
    }
    let params = d.params();
    let pairs: Vec<_> = d
        .pairs
        .iter()
        .map(|(b, a)| json!({"b": b.to_string(), "a": a.to_string(), "b_flags": stratum_membership(b, params), "a_flags": stratum_membership(a, params)}))
        .collect();
    let two_var = build_two_variable_word(&d);
    let output = json!({
        "m": d.m,
        "pairs": pairs,
        "c": d.c.to_string(),
        "c_flags": stratum_membership(&d.c, params),
        "conjugator": d.conjugator.to_string(),
        "reassembled": d.reassemble().to_string(),
        "two_variable_word": two_var.to_string(),
        "verified": true,
    });
    let summary = format!("{w}: m = {}, {} pair(s), c = {}", d.m, d.pairs.len(), d.c);
    let report =
        RunReport::new("decompose").input("word", w.to_string()).input("rank", alphabet.rank()).with_output(output);
    Ok((vec![report.to_pretty()], summary))
}

fn cmd_shape(args: &WordArgs) -> Outcome {
    let (w, alphabet) = read_word(args)?;
    let shape = t_shape(&w);
    let reduction = cyclic_reduce(&w);
    let reduced_shape = t_shape(&reduction.reduced);
    let gt = is_conjugate_to_gt(&w);
    let ex = exponent_sum(&w);
    let kernel = (ex == 0).then(|| kernel_canonical_form(&w).ok()).flatten().map(|k| k.to_string());
    let output = json!({
        "word": w.to_string(),
        "t_shape": shape.to_string(),
        "exponent_sum": ex,
        "coefficients": coefficients(&w).iter().map(BaseWord::to_string).collect::<Vec<_>>(),
        "cyclic_reduction": reduction.reduced.to_string(),
        "cyclic_conjugator": reduction.conjugator.to_string(),
        "conjugacy_canonical": conjugacy_canonical(&w).to_string(),
        "cyclic_t_shape": reduced_shape.to_string(),
        "amenable": amenable_shape(&reduced_shape, &ShapeRegistry::new()),
        "gt_form": gt.map(|(g, s)| json!({"coefficient": g.to_string(), "sign": s})),
        "kernel_form": kernel,
    });
    let summary = format!("{w}: t-shape {shape}, ex = {ex}");
    let report =
        RunReport::new("shape").input("word", w.to_string()).input("rank", alphabet.rank()).with_output(output);
    Ok((vec![report.to_pretty()], summary))
}

fn relator_set(word: &str, phi: Option<&str>, h: Option<&str>) -> Result<RelatorSet, Failure> {
    let alphabet = Alphabet::of_rank(25).map_err(Failure::input)?;
    let w0 = parse_word(word, &alphabet).map_err(Failure::input)?;
    let mut images = BTreeMap::new();
    for entry in phi.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (g, image) =
            entry.split_once('=').ok_or_else(|| Failure::Input(format!("phi entry '{entry}' lacks '='")))?;
        let mut chars = g.trim().chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(Failure::Input(format!("phi entry '{entry}' must map a single generator")));
        };
        let g = Generator::new(c).map_err(Failure::input)?;
        images.insert(g, BaseWord::parse(image.trim(), &alphabet).map_err(Failure::input)?);
    }
    let hs: Vec<BaseWord> = h
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| BaseWord::parse(s, &alphabet))
        .collect::<Result<_, _>>()
        .map_err(Failure::input)?;
    RelatorSet::with_phi(w0, images, &hs, 1).map_err(Failure::input)
}

fn load(path: &PathBuf) -> Result<SphereComplex, Failure> {
    load_complex(path).map_err(Failure::input)
}

fn cmd_validate(path: &PathBuf, word: Option<&str>, phi: Option<&str>, h: Option<&str>) -> Outcome {
    let complex = load(path)?;
    let validation = validate_sphere(&complex).map_err(Failure::input)?;
    let mut output = json!({ "validation": validation });
    let mut summary = format!("{complex}: chi = {}, sphere {}", validation.euler_characteristic, validation.passed());
    match word {
        Some(word) if validation.passed() => {
            let relators = relator_set(word, phi, h)?;
            let csl = check_csl(&complex, &relators).map_err(Failure::input)?;
            summary.push_str(&format!(", properties {}", if csl.all_passed() { "all pass" } else { "fail" }));
            output["csl"] = to_value(&csl);
        }
        None if validation.passed() => {
            output["type2"] =
                to_value(detect_type2(&complex, &RelatorSet::new(MixedWord::t())).map_err(Failure::input)?);
        }
        _ => {}
    }
    let report = RunReport::new("validate")
        .input("complex", path.display().to_string())
        .input("word", word)
        .input("phi", phi)
        .input("h", h)
        .with_output(output);
    Ok((vec![report.to_pretty()], summary))
}

fn cmd_simulate(path: &PathBuf, horizon: Option<&str>, seed: u64) -> Outcome {
    let complex = load(path)?;
    let validation = validate_sphere(&complex).map_err(Failure::input)?;
    if !validation.passed() {
        return Err(Failure::Input(format!("not a sphere subdivision: {}", validation.problems.join("; "))));
    }
    let schedules = default_schedules(&complex, seed)?;
    let period = common_period(&schedules);
    let horizon: Rational = match horizon {
        Some(text) => parse_rational(text).ok_or_else(|| Failure::Input(format!("invalid horizon '{text}'")))?,
        None => period * int(2),
    };
    let (events, check) = if horizon >= period * int(2) {
        let check = verify_at_least_two_crashes(&complex, &schedules, &horizon)?;
        (check.events.clone(), Some(check))
    } else {
        (simulate(&complex, &schedules, &horizon)?, None)
    };
    let mut lines: Vec<String> = events.iter().map(|e| serde_json::to_string(e).expect("plain data")).collect();
    let complete = events.iter().filter(|e| e.complete).count();
    let output = json!({
        "schedules": schedules,
        "common_period": format_rational(&period),
        "events": events.len(),
        "complete_events": complete,
        "at_least_two": check.as_ref().map(|c| c.at_least_two),
        "complete_in_period": check.as_ref().map(|c| c.complete_in_period),
    });
    let report = RunReport::new("simulate")
        .input("complex", path.display().to_string())
        .input("horizon", format_rational(&horizon))
        .input("seed", seed)
        .with_output(output);
    lines.push(report.to_line());
    let summary = format!("{} events, {complete} complete, horizon {}", events.len(), format_rational(&horizon));
    Ok((lines, summary))
}

fn cmd_certify(args: &WordArgs, max_degree: usize, order_of: Option<&str>) -> Outcome {
    let (w, alphabet) = read_word(args)?;
    let pres = Presentation::one_relator(alphabet.clone(), &w).map_err(Failure::input)?;
    let verdict = certificate_verdict(&pres, max_degree).map_err(Failure::input)?;
    if let Evidence::Certificate { certificate: Some(cert), .. } = &verdict.evidence {
        if !verify_certificate(&pres, cert) {
            return Err(Failure::Contract("certificate failed independent verification".into()));
        }
    }
    let orders = match order_of {
        Some(x) => {
            let x = parse_word(x, &alphabet).map_err(Failure::input)?;
            Some(order_evidence(&x, &pres, max_degree).map_err(Failure::input)?)
        }
        None => None,
    };
    let summary = format!("{w}: {:?} up to degree {max_degree}", verdict.status);
    let report = RunReport::new("certify")
        .input("word", w.to_string())
        .input("rank", alphabet.rank())
        .input("max_degree", max_degree)
        .input("order_of", order_of)
        .with_output(json!({"verdict": verdict, "order_evidence": orders}));
    Ok((vec![report.to_pretty()], summary))
}

fn cmd_search(args: &WordArgs, shape: &str, conj_len: usize, products: usize) -> Outcome {
    let (w, alphabet) = read_word(args)?;
    let target = parse_shape(shape)?;
    let bounds = SearchBounds { conj_len, products };
    let found = normal_closure_search(&w, &alphabet, &target, bounds).map_err(Failure::input)?;
    let summary = match &found {
        Some(f) => format!("{w}: found {} from {} factor(s)", f.element, f.factors.len()),
        None => format!("{w}: nothing of shape {target} within bounds ({conj_len}, {products})"),
    };
    let report = RunReport::new("search-kernel")
        .input("word", w.to_string())
        .input("rank", alphabet.rank())
        .input("target_shape", target.to_string())
        .input("conj_len", conj_len)
        .input("products", products)
        .with_output(json!({ "found": found }));
    Ok((vec![report.to_pretty()], summary))
}

fn cmd_generate(seed: u64, size: usize) -> Outcome {
    let complex = generate_random(seed, size);
    let summary = format!("{complex} from seed {seed}");
    Ok((vec![to_json(&complex).trim_end().to_string()], summary))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Analyze { word, conj_len, products, max_degree } => {
            cmd_analyze(word, *conj_len, *products, *max_degree)
        }
        Command::Decompose { word } => cmd_decompose(word),
        Command::Shape { word } => cmd_shape(word),
        Command::Validate { complex, word, phi, h } => {
            cmd_validate(complex, word.as_deref(), phi.as_deref(), h.as_deref())
        }
        Command::Simulate { complex, horizon, seed } => cmd_simulate(complex, horizon.as_deref(), *seed),
        Command::Certify { word, max_degree, order_of } => cmd_certify(word, *max_degree, order_of.as_deref()),
        Command::SearchKernel { word, target_shape, conj_len, products } => {
            cmd_search(word, target_shape, *conj_len, *products)
        }
        Command::Generate { seed, size } => cmd_generate(*seed, *size),
    };
    match outcome {
        Ok((lines, summary)) => {
            let mut out = std::io::stdout().lock();
            for line in lines {
                // A closed pipe (e.g. `| head`) is not an error.
                if writeln!(out, "{line}").is_err() {
                    return ExitCode::SUCCESS;
                }
            }
            eprintln!("{summary} [{:.3}s]", started.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Contract(msg)) => {
            eprintln!("contract violation: {msg}");
            ExitCode::from(3)
        }
    }
}
