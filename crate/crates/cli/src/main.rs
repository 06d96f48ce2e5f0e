mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use vhom::burau::{burau_reduced, burau_unreduced, circle_supremum, lk_matrix, torus_supremum};
use vhom::catalog::QuotientCatalog;
use vhom::detect::{
    classify_witnesses, conjugacy_separation, faithfulness_witness, non_inner_witness, Witness,
    DEFAULT_POWER_BOUND, OBSTRUCTION,
};
use vhom::expansion::{finite_type_expansion, Tower};
use vhom::numerics::dilatation_root;
use vhom::quotient::DEFAULT_MAX_ORDER;
use vhom::rep::verify_chevalley_weil;
use vhom::{BraidWord, EndoMap, Word};

use report::{json_report, Cache, Failure, Output, EXIT_INPUT, EXIT_NOT_FOUND, EXIT_OK};

const DILATATION_SLACK: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "vhom", version)]
#[command(about = "Homology of finite covers, finite-quotient witnesses and Burau / Lawrence-Krammer suprema")]
struct Cli {
    /// Quotient catalog (JSON); defaults to the shipped catalog
    #[arg(long, global = true, env = "VH_CATALOG")]
    catalog: Option<PathBuf>,

    /// Reject catalog quotients above this order
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for catalog scans and mesh evaluation
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Reuse results stored here, keyed by arguments and catalog contents
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix of a lifted automorphism on H1 of a catalog cover
    CoverAct {
        #[arg(long)]
        quotient: String,
        /// Generator images, e.g. "a->ab, b->b" (a' is the inverse of a)
        #[arg(long)]
        map: String,
    },
    /// Search the catalog for a witness
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Spectral-radius supremum of the Burau or Lawrence-Krammer matrix
    Burau(BurauArgs),
    /// Check the deck-group character of every catalog cover
    Chevalley,
    /// Finite-type expansion of a word along a tower of catalog quotients
    Expand {
        word: String,
        /// Comma separated quotient names, shallowest first
        #[arg(long, default_value = "Z2^2,Z2^2/2")]
        tower: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Nontrivial action on H1 of a cover
    Faithful(MapArgs),
    /// Action differing from every deck transformation
    Noninner(MapArgs),
    /// Quotient in which two words are not conjugate
    Separate {
        w1: String,
        w2: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Reduction obstructions for powers of a map
    Classify {
        #[command(flatten)]
        map: MapArgs,
        /// Comma separated candidate words
        #[arg(long)]
        candidates: String,
        /// Comma separated peripheral words
        #[arg(long, default_value = "")]
        peripheral: String,
        #[arg(long, default_value_t = DEFAULT_POWER_BOUND)]
        power_bound: usize,
    },
}

#[derive(Args)]
struct MapArgs {
    /// Generator images, e.g. "a->b, b->a"
    #[arg(long)]
    map: String,
    #[arg(long, default_value_t = 2)]
    rank: usize,
}

#[derive(Args)]
struct BurauArgs {
    /// Whitespace separated signed Artin generators, e.g. "1 2 -3"
    #[arg(allow_hyphen_values = true)]
    braid: String,
    #[arg(long)]
    strands: Option<usize>,
    /// Sample count per circle; 2048 on the circle and 256 on the torus by default
    #[arg(long)]
    mesh: Option<usize>,
    #[arg(long, conflicts_with = "lk")]
    reduced: bool,
    /// Lawrence-Krammer matrix, square root of the torus supremum
    #[arg(long)]
    lk: bool,
    /// Ascending integer coefficients of the dilatation polynomial
    #[arg(long, allow_hyphen_values = true)]
    dilatation_poly: Option<String>,
    /// Write the per-sample TSV here
    #[arg(long)]
    samples: Option<PathBuf>,
}

struct Context {
    catalog: Option<QuotientCatalog>,
    catalog_error: Option<Failure>,
    format: Format,
}

impl Context {
    fn catalog(&mut self) -> Result<&QuotientCatalog, Failure> {
        if let Some(e) = self.catalog_error.take() {
            return Err(e);
        }
        Ok(self.catalog.as_ref().expect("catalog loaded"))
    }
}

fn parse_map(s: &str, rank: usize) -> Result<EndoMap, Failure> {
    Ok(EndoMap::parse(s, rank)?)
}

fn parse_automorphism(s: &str, rank: usize) -> Result<EndoMap, Failure> {
    Ok(parse_map(s, rank)?.invert()?)
}

fn parse_words(s: &str, rank: usize) -> Result<Vec<Word>, Failure> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| Ok(Word::parse(p, rank)?)).collect()
}

fn cover_act(ctx: &mut Context, quotient: &str, map: &str) -> Result<Output, Failure> {
    let format = ctx.format;
    let cat = ctx.catalog()?;
    let entry = cat.get(quotient).ok_or_else(|| Failure::input(format!("no quotient named {quotient:?}")))?;
    let q = entry.quotient();
    let f = parse_map(map, q.rank())?;
    let c = entry.cover()?;
    let m = c.induced_automorphism(&f)?;
    let action = if m.is_identity() { "trivial action" } else { "nontrivial" };
    let stdout = match format {
        Format::Json => json_report(
            "cover-act",
            json!({
                "quotient": q.name(),
                "order": q.order(),
                "h1_rank": c.rank(),
                "automorphism": f.to_string(),
                "action": action,
                "matrix": m.rows(),
            }),
        ),
        Format::Tsv | Format::Text => {
            let sep = if format == Format::Tsv { "\t" } else { " " };
            let mut s = format!("# {} on {} (H1 rank {}): {action}\n", f, q.name(), c.rank());
            for row in m.rows() {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                s.push_str(&cells.join(sep));
                s.push('\n');
            }
            s
        }
    };
    Ok(Output { code: EXIT_OK, stdout })
}

fn witness_output(ctx: &mut Context, command: &str, w: &Witness) -> Result<Output, Failure> {
    let format = ctx.format;
    let replayed = w.replay(ctx.catalog()?)?;
    let code = if w.found() { EXIT_OK } else { EXIT_NOT_FOUND };
    let stdout = match format {
        Format::Json => json_report(command, json!({ "witness": w, "replay_verified": replayed })),
        Format::Tsv | Format::Text => match &w.quotient {
            Some(q) => format!("{:?} witness in {q}: {}\n", w.kind, w.note),
            None => format!("catalog exhausted: {}\n", w.note),
        },
    };
    Ok(Output { code, stdout })
}

fn witness(ctx: &mut Context, cmd: &WitnessCommand) -> Result<Output, Failure> {
    match cmd {
        WitnessCommand::Faithful(m) => {
            let f = parse_automorphism(&m.map, m.rank)?;
            let w = faithfulness_witness(&f, ctx.catalog()?)?;
            witness_output(ctx, "witness faithful", &w)
        }
        WitnessCommand::Noninner(m) => {
            let f = parse_automorphism(&m.map, m.rank)?;
            let w = non_inner_witness(&f, ctx.catalog()?)?;
            witness_output(ctx, "witness noninner", &w)
        }
        WitnessCommand::Separate { w1, w2, rank } => {
            let (a, b) = (Word::parse(w1, *rank)?, Word::parse(w2, *rank)?);
            let w = conjugacy_separation(&a, &b, ctx.catalog()?)?;
            witness_output(ctx, "witness separate", &w)
        }
        WitnessCommand::Classify { map, candidates, peripheral, power_bound } => {
            let f = parse_automorphism(&map.map, map.rank)?;
            let cands = parse_words(candidates, map.rank)?;
            if cands.is_empty() {
                return Err(Failure::input("at least one candidate word is needed"));
            }
            let periph = parse_words(peripheral, map.rank)?;
            let format = ctx.format;
            let r = classify_witnesses(&f, &cands, &periph, ctx.catalog()?, *power_bound)?;
            let found = r.candidates.iter().any(|c| c.powers.iter().any(|p| p.outcome == OBSTRUCTION));
            let stdout = match format {
                Format::Json => json_report("witness classify", &r),
                Format::Tsv | Format::Text => {
                    let mut s = String::new();
                    for c in &r.candidates {
                        for p in &c.powers {
                            s.push_str(&format!(
                                "{}\t{}\t{}\t{}\n",
                                c.candidate,
                                p.power,
                                p.outcome,
                                p.quotient.as_deref().unwrap_or("-")
                            ));
                        }
                    }
                    s
                }
            };
            Ok(Output { code: if found { EXIT_OK } else { EXIT_NOT_FOUND }, stdout })
        }
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<i64>, Failure> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::input(format!("bad coefficient {t:?}"))))
        .collect()
}

fn burau(ctx: &Context, a: &BurauArgs) -> Result<Output, Failure> {
    let beta = BraidWord::parse(&a.braid, a.strands)?;
    let (representation, s) = if a.lk {
        ("lawrence-krammer", torus_supremum(&lk_matrix(&beta), a.mesh.unwrap_or(256))?)
    } else if a.reduced {
        ("reduced-burau", circle_supremum(&burau_reduced(&beta), a.mesh.unwrap_or(2048))?)
    } else {
        ("unreduced-burau", circle_supremum(&burau_unreduced(&beta), a.mesh.unwrap_or(2048))?)
    };
    if let Some(path) = &a.samples {
        std::fs::write(path, s.samples_tsv())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut code = EXIT_OK;
    let mut dilatation = None;
    if let Some(p) = &a.dilatation_poly {
        let root = dilatation_root(&parse_coeffs(p)?)?;
        if s.sup > root + DILATATION_SLACK {
            eprintln!("supremum {} exceeds the dilatation {}", s.sup, root);
            code = EXIT_NOT_FOUND;
        }
        dilatation = Some(json!({ "root": root, "gap": root - s.sup }));
    }
    let stdout = match ctx.format {
        Format::Json => json_report(
            "burau",
            json!({
                "braid": beta.to_string(),
                "strands": beta.strands(),
                "representation": representation,
                "supremum": s,
                "dilatation": dilatation,
            }),
        ),
        Format::Tsv => s.samples_tsv(),
        Format::Text => {
            let mut out = format!(
                "{representation} of [{beta}]: sup {} over mesh {} ({}x{} matrix)\n",
                report::fmt_float(s.sup),
                s.mesh,
                s.matrix_dim,
                s.matrix_dim
            );
            if let Some(d) = &dilatation {
                out.push_str(&format!(
                    "dilatation {} gap {}\n",
                    report::fmt_float(d["root"].as_f64().unwrap()),
                    report::fmt_float(d["gap"].as_f64().unwrap())
                ));
            }
            out
        }
    };
    Ok(Output { code, stdout })
}

#[derive(Serialize)]
struct ChevalleyRow {
    quotient: String,
    order: usize,
    h1_rank: usize,
    holds: bool,
    identity_value: i64,
    regular_copies: i64,
    trivial_copies: i64,
    trivial_inner: String,
    regular_inner: String,
}

fn chevalley(ctx: &mut Context) -> Result<Output, Failure> {
    let format = ctx.format;
    let cat = ctx.catalog()?;
    if cat.is_empty() {
        eprintln!("warning: catalog is empty; nothing to check");
    }
    let mut rows = Vec::with_capacity(cat.len());
    for e in cat.entries() {
        let r = verify_chevalley_weil(e.cover()?);
        rows.push(ChevalleyRow {
            quotient: e.name().to_string(),
            order: r.order,
            h1_rank: r.h1_rank,
            holds: r.holds,
            identity_value: r.character.values[0],
            regular_copies: r.regular_copies,
            trivial_copies: r.trivial_copies,
            trivial_inner: r.trivial_inner.to_string(),
            regular_inner: r.regular_inner.to_string(),
        });
    }
    let all = rows.iter().all(|r| r.holds);
    let stdout = match format {
        Format::Json => json_report("chevalley", json!({ "quotients": rows, "all_pass": all })),
        Format::Tsv | Format::Text => {
            let mut s = String::from("quotient\torder\th1_rank\tchi(1)\tregular\ttrivial\tholds\n");
            for r in &rows {
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    r.quotient, r.order, r.h1_rank, r.identity_value, r.regular_copies, r.trivial_copies, r.holds
                ));
            }
            s
        }
    };
    Ok(Output { code: if all { EXIT_OK } else { EXIT_NOT_FOUND }, stdout })
}

fn expand(ctx: &mut Context, word: &str, tower: &str, rank: usize) -> Result<Output, Failure> {
    let format = ctx.format;
    let w = Word::parse(word, rank)?;
    let names: Vec<&str> = tower.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let t = Tower::from_catalog(ctx.catalog()?, &names)?;
    let e = finite_type_expansion(&w, &t)?;
    let stdout = match format {
        Format::Json => json_report("expand", &e),
        Format::Tsv | Format::Text => {
            let mut s = format!("{}\tabelianization\t{:?}\n", e.word, e.abelianization);
            for l in &e.levels {
                s.push_str(&format!("{}\t{}\t{:?}\n", l.quotient, l.transversal, l.entry));
            }
            s
        }
    };
    Ok(Output { code: EXIT_OK, stdout })
}

fn run(cli: &Cli, ctx: &mut Context) -> Result<Output, Failure> {
    match &cli.command {
        Command::CoverAct { quotient, map } => cover_act(ctx, quotient, map),
        Command::Witness(w) => witness(ctx, w),
        Command::Burau(a) => burau(ctx, a),
        Command::Chevalley => chevalley(ctx),
        Command::Expand { word, tower, rank } => expand(ctx, word, tower, *rank),
    }
}

fn load_catalog(cli: &Cli) -> (Result<QuotientCatalog, Failure>, String) {
    match &cli.catalog {
        Some(p) => {
            let text = std::fs::read_to_string(p).unwrap_or_default();
            let cat = QuotientCatalog::load_with(p, cli.max_order).map_err(Failure::from);
            (cat, text)
        }
        None => {
            let text = QuotientCatalog::shipped_json().to_string();
            let cat = QuotientCatalog::from_json_with(&text, cli.max_order).map_err(Failure::from);
            (cat, text)
        }
    }
}

/// Arguments that determine the output, for the cache key.
fn cache_args(cli: &Cli) -> Vec<String> {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    // the catalog enters the key through its contents, threads never change output
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if a == "--jobs" || a == "--cache-dir" || a == "--catalog" {
            args.drain(i..(i + 2).min(args.len()));
        } else if a.starts_with("--jobs=") || a.starts_with("--cache-dir=") || a.starts_with("--catalog=") {
            args.remove(i);
        } else {
            i += 1;
        }
    }
    args.push(format!("max-order={}", cli.max_order));
    args
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be positive");
        return ExitCode::from(EXIT_INPUT);
    }
    rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global().expect("thread pool starts once");

    let (catalog, catalog_text) = load_catalog(&cli);
    // a cache hit would skip writing the samples file
    let cacheable = !matches!(&cli.command, Command::Burau(a) if a.samples.is_some());
    let cache = cli.cache_dir.as_ref().filter(|_| cacheable).map(|d| Cache::new(d, &cache_args(&cli), &catalog_text));
    if let Some(hit) = cache.as_ref().and_then(Cache::get) {
        print!("{}", hit.stdout);
        return ExitCode::from(hit.code);
    }
    let (catalog, catalog_error) = match catalog {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e)),
    };
    let mut ctx = Context { catalog, catalog_error, format: cli.format };
    match run(&cli, &mut ctx) {
        Ok(out) => {
            if let Some(c) = &cache {
                if let Err(e) = c.put(&out) {
                    eprintln!("warning: could not write cache: {e}");
                }
            }
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
