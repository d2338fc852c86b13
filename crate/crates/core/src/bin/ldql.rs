use clap::{Args, Parser, Subcommand, ValueEnum};
use ldql::executor::{exec_query_traced, ExecError, HttpBackend, LookupService, DEFAULT_HTTP_TIMEOUT};
use ldql::lang::{
    parse_query_with, rewrite_union_normal_form_with, LdqlQuery, Lpe, ParseError, ParseOptions, DEFAULT_NODE_GUARD,
};
use ldql::rdf::{load_web, Uri, WebOfLinkedData};
use ldql::reference::{eval_nautilod, eval_pp_ctxt, eval_reach};
use ldql::safeness::is_websafe_syntactic;
use ldql::semantics::eval_query;
use ldql::sparql::{GraphPattern, SolutionSet};
use ldql::translators::{
    parse_nautilod, parse_pp_pattern, translate_nautilod, translate_pp, translate_reachability, ReachCriterion,
};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

const EXIT_RUNTIME: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NOT_CERTIFIED: u8 = 3;
const EXIT_NON_ENUMERABLE: u8 = 4;

#[derive(Parser)]
#[command(name = "ldql", version, about = "Link path queries over a Web of Linked Data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a query and print its canonical form.
    Parse(QueryArgs),
    /// Decide the syntactic Web-safeness condition.
    Analyze(AnalyzeArgs),
    /// Evaluate against a fixture Web with the full-Web semantics.
    Eval(EvalArgs),
    /// Execute a certified query by dereferencing URIs.
    Exec(ExecArgs),
    /// Translate a property path pattern, NautiLOD expression or SPARQL pattern into LDQL.
    Translate(TranslateArgs),
    /// Evaluate a property path pattern, NautiLOD expression or SPARQL pattern with its own semantics.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Args)]
struct QueryArgs {
    /// Query text.
    #[arg(short = 'q', long = "query", conflicts_with = "file")]
    query: Option<String>,
    /// File holding the query text.
    #[arg(required_unless_present = "query")]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    query: QueryArgs,
    /// Abort once the UNION normal form exceeds this many query nodes.
    #[arg(long, default_value_t = DEFAULT_NODE_GUARD)]
    guard: usize,
}

#[derive(Args)]
struct SeedArgs {
    /// A seed URI; repeat for several, omit for the empty set.
    #[arg(long = "seed")]
    seeds: Vec<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    query: QueryArgs,
    /// Fixture Web file.
    #[arg(short = 'w', long = "web")]
    web: PathBuf,
    #[command(flatten)]
    seeds: SeedArgs,
}

#[derive(Args)]
struct ExecArgs {
    #[command(flatten)]
    query: QueryArgs,
    /// Fixture Web file.
    #[arg(short = 'w', long = "web", required_unless_present = "http", conflicts_with = "http")]
    web: Option<PathBuf>,
    /// Dereference URIs over HTTP(S).
    #[arg(long)]
    http: bool,
    #[command(flatten)]
    seeds: SeedArgs,
    /// Print a lookup summary on stderr.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = DEFAULT_NODE_GUARD)]
    guard: usize,
    /// HTTP timeout in seconds.
    #[arg(long, default_value_t = DEFAULT_HTTP_TIMEOUT.as_secs_f64())]
    timeout: f64,
    /// Minimum delay between requests to one host, in milliseconds.
    #[arg(long)]
    delay: Option<u64>,
}

#[derive(Clone, Copy)]
enum Formalism {
    Pp,
    Nautilod,
    Reach(ReachCriterion),
}

fn formalism(s: &str) -> Result<Formalism, String> {
    match s {
        "pp" => Ok(Formalism::Pp),
        "nautilod" => Ok(Formalism::Nautilod),
        _ => match s.strip_prefix("reach:") {
            Some(c) => c.parse().map(Formalism::Reach),
            None => Err(format!("unknown formalism `{s}`; expected pp, nautilod or reach:all|none|match")),
        },
    }
}

#[derive(Args)]
struct TranslateArgs {
    /// pp, nautilod, reach:all, reach:none or reach:match.
    #[arg(long = "from", value_parser = formalism)]
    from: Formalism,
    /// Source expression.
    #[arg(short = 'p', long = "pattern")]
    pattern: String,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "from", value_parser = formalism)]
    from: Formalism,
    #[arg(short = 'p', long = "pattern")]
    pattern: String,
    #[arg(short = 'w', long = "web")]
    web: PathBuf,
    /// Start URIs for NautiLOD, seeds for reachability; ignored for pp.
    #[command(flatten)]
    seeds: SeedArgs,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn runtime(message: impl ToString) -> Self {
        Failure { code: EXIT_RUNTIME, message: message.to_string() }
    }

    fn parse(message: impl ToString) -> Self {
        Failure { code: EXIT_PARSE, message: message.to_string() }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::parse(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Parse(a) => cmd_parse(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Exec(a) => cmd_exec(&a),
        Command::Translate(a) => cmd_translate(&a),
        Command::Oracle(a) => cmd_oracle(&a),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_query(a: &QueryArgs) -> Result<LdqlQuery, Failure> {
    let text = match (&a.query, &a.file) {
        (Some(q), _) => q.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?
        }
        (None, None) => unreachable!("clap requires a query"),
    };
    // Generated variables are accepted so that `translate` output can be fed back in.
    Ok(parse_query_with(&text, ParseOptions { allow_reserved: true })?)
}

fn read_web(path: &PathBuf) -> Result<WebOfLinkedData, Failure> {
    load_web(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn seeds(a: &SeedArgs) -> BTreeSet<Uri> {
    a.seeds.iter().map(|s| Uri::new(s.trim_start_matches('<').trim_end_matches('>'))).collect()
}

fn print_solutions(s: &SolutionSet) {
    for line in s.to_lines() {
        println!("{line}");
    }
}

fn cmd_parse(a: &QueryArgs) -> Result<(), Failure> {
    let q = read_query(a)?;
    match a.format {
        Format::Text => println!("{q}"),
        Format::Structured => println!("{}", serde_json::to_string_pretty(&query_json(&q)).expect("JSON value")),
    }
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<(), Failure> {
    let q = read_query(&a.query)?;
    rewrite_union_normal_form_with(&q, a.guard).map_err(Failure::runtime)?;
    let report = is_websafe_syntactic(&q).map_err(Failure::runtime)?;
    match a.query.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Structured => println!("{}", report.to_json()),
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<(), Failure> {
    let q = read_query(&a.query)?;
    let w = read_web(&a.web)?;
    let out = eval_query(&q, &w, &seeds(&a.seeds))
        .map_err(|e| Failure { code: EXIT_NON_ENUMERABLE, message: e.to_string() })?;
    print_solutions(&out);
    Ok(())
}

fn cmd_exec(a: &ExecArgs) -> Result<(), Failure> {
    let q = read_query(&a.query)?;
    rewrite_union_normal_form_with(&q, a.guard).map_err(Failure::runtime)?;
    let lk = if a.http {
        let timeout = Duration::try_from_secs_f64(a.timeout).map_err(Failure::runtime)?;
        let backend = HttpBackend::new(timeout, a.delay.map(Duration::from_millis)).map_err(Failure::runtime)?;
        LookupService::new(backend)
    } else {
        LookupService::fixture(read_web(a.web.as_ref().expect("clap requires --web or --http"))?)
    };
    match exec_query_traced(&q, &seeds(&a.seeds), &lk) {
        Ok((out, trace)) => {
            print_solutions(&out);
            if a.trace {
                eprint!("{}", trace.to_text());
            }
            Ok(())
        }
        Err(e @ ExecError::NotCertified(_)) => Err(Failure { code: EXIT_NOT_CERTIFIED, message: e.to_string() }),
        Err(e) => Err(Failure::runtime(e)),
    }
}

fn cmd_translate(a: &TranslateArgs) -> Result<(), Failure> {
    let q = match a.from {
        Formalism::Pp => translate_pp(&parse_pp_pattern(&a.pattern)?),
        Formalism::Nautilod => translate_nautilod(&parse_nautilod(&a.pattern)?),
        Formalism::Reach(c) => translate_reachability(c, &ldql::lang::parse_pattern(&a.pattern)?),
    };
    match a.format {
        Format::Text => println!("{q}"),
        Format::Structured => println!("{}", serde_json::to_string_pretty(&query_json(&q)).expect("JSON value")),
    }
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> Result<(), Failure> {
    let w = read_web(&a.web)?;
    let s = seeds(&a.seeds);
    match a.from {
        Formalism::Pp => print_solutions(&eval_pp_ctxt(&parse_pp_pattern(&a.pattern)?, &w)),
        Formalism::Nautilod => {
            let n = parse_nautilod(&a.pattern)?;
            for u in &s {
                for t in eval_nautilod(&n, &w, u) {
                    println!("{u} {t}");
                }
            }
        }
        Formalism::Reach(c) => print_solutions(&eval_reach(&ldql::lang::parse_pattern(&a.pattern)?, c, &s, &w)),
    }
    Ok(())
}

fn query_json(q: &LdqlQuery) -> Value {
    match q {
        LdqlQuery::Basic(l, p) => json!({ "basic": { "lpe": lpe_json(l), "pattern": pattern_json(p) } }),
        LdqlQuery::SeedUris(us, q) => {
            json!({ "seed": { "uris": us.iter().map(|u| u.to_string()).collect::<Vec<_>>(), "query": query_json(q) } })
        }
        LdqlQuery::SeedVar(v, q) => json!({ "seed": { "var": v.to_string(), "query": query_json(q) } }),
        LdqlQuery::And(a, b) => json!({ "and": [query_json(a), query_json(b)] }),
        LdqlQuery::Union(a, b) => json!({ "union": [query_json(a), query_json(b)] }),
        LdqlQuery::Project(vs, q) => {
            json!({ "project": { "vars": vs.iter().map(|v| v.to_string()).collect::<Vec<_>>(), "query": query_json(q) } })
        }
    }
}

fn lpe_json(l: &Lpe) -> Value {
    match l {
        Lpe::Epsilon => json!("eps"),
        Lpe::Pattern(lp) => json!({ "link": lp.to_string() }),
        Lpe::Concat(a, b) => json!({ "concat": [lpe_json(a), lpe_json(b)] }),
        Lpe::Alt(a, b) => json!({ "alt": [lpe_json(a), lpe_json(b)] }),
        Lpe::Star(a) => json!({ "star": lpe_json(a) }),
        Lpe::Test(a) => json!({ "test": lpe_json(a) }),
        Lpe::NavSub(v, q) => json!({ "nav": { "var": v.to_string(), "query": query_json(q) } }),
    }
}

fn pattern_json(p: &GraphPattern) -> Value {
    match p {
        GraphPattern::Bgp(tps) => json!({ "bgp": tps.iter().map(|t| t.to_string()).collect::<Vec<_>>() }),
        GraphPattern::And(a, b) => json!({ "and": [pattern_json(a), pattern_json(b)] }),
        GraphPattern::Opt(a, b) => json!({ "opt": [pattern_json(a), pattern_json(b)] }),
        GraphPattern::Union(a, b) => json!({ "union": [pattern_json(a), pattern_json(b)] }),
        GraphPattern::Filter(a, e) => json!({ "filter": { "pattern": pattern_json(a), "expr": e.to_string() } }),
        GraphPattern::Graph(g, a) => json!({ "graph": { "target": g.to_string(), "pattern": pattern_json(a) } }),
        GraphPattern::Bind(a, e, v) => {
            json!({ "bind": { "pattern": pattern_json(a), "expr": e.to_string(), "var": v.to_string() } })
        }
    }
}
