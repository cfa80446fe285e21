//! Command-line front end.
//!
//! Exit status: 0 on success, 2 on usage errors (bad flags, unparsable
//! input), 1 on domain errors such as an unsupported mode.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;

use crate::census::{self, Counter, LadderSpec, Ordering, Target};
use crate::error::{Error, Result};
use crate::format_ratio;
use crate::heights::{self, RaisingDatum, RaisingFunction};
use crate::kummer::{self, KummerClass, Mode};
use crate::malle;

#[derive(Parser, Debug)]
#[command(name = "stacky", version, about = "Kummer discriminants, heights, Malle invariants and torsor counts over Q")]
pub struct Cli {
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// key=value defaults; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Malle's a and b invariants of a permutation group.
    #[command(subcommand)]
    Malle(MalleCmd),
    /// Discriminant and irreducibility of Q[t]/(t^n - a).
    #[command(subcommand)]
    Kummer(KummerCmd),
    /// Heights of a Kummer class.
    Height(HeightArgs),
    /// Twisted sectors of B mu_n with the index raising function.
    Sectors {
        #[arg(long)]
        n: u64,
    },
    /// The threshold exponent 2/(n - n/r), optionally with a witness family.
    #[command(name = "eszb-a")]
    EszbA {
        #[arg(long)]
        n: u64,
        /// Evaluate D_{a'} on the first K witness primes at this a'.
        #[arg(long, value_name = "A_PRIME", requires = "k")]
        witness: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Count torsors along a geometric ladder of bounds.
    Census(CensusArgs),
    /// Fit exponents to a `B,count` ladder.
    Fit {
        /// CSV file, or `-` for standard input.
        #[arg(long = "in", value_name = "FILE")]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum MalleCmd {
    A(GroupArgs),
    B(GroupArgs),
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// `preset:NAME[:n]` or cycles like `(1 2 3)(4 5); (1 4); deg=6`.
    #[arg(long)]
    group: String,
    /// `Q`, `Q(zeta_d)` or `units:m:g1,g2,...`.
    #[arg(long)]
    field: Option<String>,
}

#[derive(Subcommand, Debug)]
enum KummerCmd {
    Disc(ClassArgs),
    Irred(ClassArgs),
}

#[derive(Args, Debug)]
struct ClassArgs {
    #[arg(long)]
    n: u64,
    /// Integer or rational `p/q`.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// exact | tame | interval
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HeightKind {
    Eszb,
    Darda,
    Raising,
}

#[derive(Args, Debug)]
struct HeightArgs {
    #[arg(value_enum)]
    kind: HeightKind,
    #[command(flatten)]
    class: ClassArgs,
    /// Sector weights `c(1),...,c(n-1)` for `raising`; default is the
    /// local discriminant exponent.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// `mu:N` or `cyclic:N`.
    #[arg(long)]
    target: String,
    /// T (all torsors) or M (fields).
    #[arg(long)]
    counter: Option<String>,
    #[arg(long = "Bmax", alias = "bmax")]
    bmax: Option<f64>,
    #[arg(long = "B0", alias = "b0")]
    b0: Option<f64>,
    /// exact | tame | darda
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Ladder CSV destination; `-` writes it to standard output.
    #[arg(long)]
    out: Option<String>,
}

/// Parsed `key=value` lines; `#` starts a comment.
#[derive(Debug, Default)]
struct Config(HashMap<String, String>);

impl Config {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", i + 1)))?;
            map.insert(k.trim().to_ascii_lowercase(), v.trim().trim_matches('"').to_string());
        }
        Ok(Self(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|_| Error::Parse(format!("config {key}={v}: invalid value"))))
            .transpose()
    }

    fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

struct Ctx<'w> {
    json: bool,
    config: Config,
    out: &'w mut dyn Write,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(&mut self, value: &T, human: impl FnOnce() -> String) -> Result<()> {
        let text = if self.json {
            serde_json::to_string(value).map_err(|e| Error::Parse(e.to_string()))?
        } else {
            human()
        };
        match writeln!(self.out, "{text}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r.map_err(io_err),
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Unsupported(format!("i/o: {e}"))
}

fn parse_class(args: &ClassArgs) -> Result<KummerClass> {
    let (num, den) = kummer::parse_rational(&args.a)?;
    kummer::canonical(&num, &den, args.n)
}

fn mode(args: &ClassArgs, cfg: &Config, default: Mode) -> Result<Mode> {
    match &args.mode {
        Some(m) => m.parse(),
        None => Ok(cfg.get("mode")?.unwrap_or(default)),
    }
}

fn default_mode(n: u64) -> Mode {
    if n <= 3 {
        Mode::Exact
    } else {
        Mode::Interval
    }
}

fn run_malle(ctx: &mut Ctx, cmd: &MalleCmd) -> Result<()> {
    match cmd {
        MalleCmd::A(g) => {
            let group = malle::parse_group(&g.group)?;
            let a = malle::a_invariant(&group)?;
            ctx.emit(&json!({ "a": format_ratio(&a) }), || format_ratio(&a))
        }
        MalleCmd::B(g) => {
            let group = malle::parse_group(&g.group)?;
            let field = match &g.field {
                Some(f) => Some(f.clone()),
                None => ctx.config.get("field")?,
            };
            let (modulus, field) = malle::parse_field(field.as_deref().unwrap_or("Q"))?;
            let sig = malle::signature_for(&group, modulus, &field)?;
            let inv = malle::invariants(&group, &sig)?;
            ctx.emit(&inv, || inv.b.to_string())
        }
    }
}

fn run_kummer(ctx: &mut Ctx, cmd: &KummerCmd) -> Result<()> {
    match cmd {
        KummerCmd::Disc(args) => {
            let cls = parse_class(args)?;
            let m = mode(args, &ctx.config, default_mode(args.n))?;
            let d = kummer::discriminant(&cls, m)?;
            let payload = json!({ "class": cls, "discriminant": d });
            ctx.emit(&payload, || match &d.value {
                kummer::DiscValue::Exact(v) => v.to_string(),
                kummer::DiscValue::Interval { lo, hi } => format!("[{lo}, {hi}]"),
            })
        }
        KummerCmd::Irred(args) => {
            let cls = parse_class(args)?;
            let irr = kummer::is_irreducible(&cls);
            ctx.emit(&json!({ "class": cls, "irreducible": irr }), || irr.to_string())
        }
    }
}

fn parse_weight(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::Parse(format!("weight {s:?}: expected a nonnegative rational"));
    match s.trim().split_once('/') {
        Some((p, q)) => {
            let (p, q): (u64, u64) = (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
            if q == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(p, q))
        }
        None => Ok(Ratio::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn run_height(ctx: &mut Ctx, args: &HeightArgs) -> Result<()> {
    let cls = parse_class(&args.class)?;
    let m = mode(&args.class, &ctx.config, default_mode(args.class.n))?;
    let h = match args.kind {
        HeightKind::Eszb => heights::eszb_height(&cls, m)?,
        HeightKind::Darda => heights::darda_global(&cls, m)?,
        HeightKind::Raising => {
            let datum = match &args.weights {
                None => RaisingDatum::Discriminant,
                Some(ws) => {
                    let ws = ws.iter().map(|w| parse_weight(w)).collect::<Result<Vec<_>>>()?;
                    RaisingDatum::Sector(RaisingFunction::new(cls.n(), ws)?)
                }
            };
            heights::raising_height(&cls, &datum, m)?
        }
    };
    ctx.emit(&h, || match h.log_upper {
        Some(hi) => format!("log height in [{}, {}]", h.log_value, hi),
        None => format!("log height = {}", h.log_value),
    })
}

fn run_sectors(ctx: &mut Ctx, n: u64) -> Result<()> {
    let table = heights::sectors(n)?;
    let (a_c, b_c) = heights::abc_invariants(&heights::index_raising_function(n))?;
    let payload = json!({
        "n": n,
        "min_index": table.min_index(),
        "a_c": format_ratio(&a_c),
        "b_c": b_c,
        "minimal_sectors": table.minimal_sectors(),
        "sectors": table.entries.iter().map(|&(j, c)| json!({ "j": j, "index": c })).collect::<Vec<_>>(),
    });
    ctx.emit(&payload, || {
        let mut s = String::from("j  index\n");
        for &(j, c) in &table.entries {
            s.push_str(&format!("{j:<2} {c}\n"));
        }
        s.push_str(&format!("a(c) = {}, b(c) = {b_c}", format_ratio(&a_c)));
        s
    })
}

fn run_eszb_a(ctx: &mut Ctx, n: u64, witness: Option<f64>, k: Option<usize>) -> Result<()> {
    let a = heights::a_eszb_closed(n)?;
    match (witness, k) {
        (Some(ap), Some(k)) => {
            let d = heights::a_eszb_witness(n, ap, k)?;
            let payload = json!({
                "n": n,
                "a_eszb": format_ratio(&a),
                "a_prime": ap,
                "k": k,
                "d_aprime": d,
                "wild_bound": heights::wild_bound(n),
            });
            ctx.emit(&payload, || format!("a_eszb = {}; D_a'({ap}) on {k} witness primes = {d}", format_ratio(&a)))
        }
        _ => ctx.emit(&json!({ "n": n, "a_eszb": format_ratio(&a) }), || format_ratio(&a)),
    }
}

fn default_jobs(cfg: &Config) -> Result<usize> {
    if let Some(j) = cfg.get("jobs")? {
        return Ok(j);
    }
    match std::env::var("STACKY_JOBS") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("STACKY_JOBS={v}: expected an integer"))),
        Err(_) => Ok(0),
    }
}

fn run_census(ctx: &mut Ctx, args: &CensusArgs) -> Result<()> {
    let cfg = &ctx.config;
    let target: Target = args.target.parse()?;
    let counter = match &args.counter {
        Some(c) => c.parse()?,
        None => cfg.get::<String>("counter")?.map_or(Ok(Counter::M), |c| c.parse())?,
    };
    let ordering = match &args.order {
        Some(o) => o.parse()?,
        None => match cfg.get::<String>("order")? {
            Some(o) => o.parse()?,
            None if target.n() <= 3 => Ordering::DiscExact,
            None => Ordering::DiscTame,
        },
    };
    let mut spec = LadderSpec::new(target, counter, ordering);
    if let Some(b0) = cfg.pick(args.b0, "b0")? {
        spec.b0 = b0;
    }
    if let Some(bmax) = cfg.pick(args.bmax, "bmax")? {
        spec = spec.with_bmax(bmax)?;
    }
    spec.jobs = match args.jobs {
        Some(j) => j,
        None => default_jobs(cfg)?,
    };
    let ladder = census::count(&spec)?;
    let out = match &args.out {
        Some(o) => Some(o.clone()),
        None => cfg.get("out")?,
    };
    if out.as_deref() == Some("-") {
        return census::write_csv(&ladder.points, &mut *ctx.out);
    }
    if let Some(path) = out {
        let file = fs::File::create(&path).map_err(io_err)?;
        census::write_csv(&ladder.points, file)?;
    }
    let pred = census::predicted_exponents(target, ordering)?;
    let constant = census::empirical_constant(&ladder, &pred);
    let note = match (target, ordering.disc_kind(target.n())) {
        (Target::Mu(_), census::DiscKind::Tame) => {
            Some("ordered by tame discriminant; wild primes change counts by a bounded factor only")
        }
        _ => None,
    };
    let payload = json!({
        "ladder": ladder,
        "prediction": pred,
        "empirical_constant": constant,
        "note": note,
    });
    ctx.emit(&payload, || {
        let mut s = format!("target {target}, counter {counter:?}, ordering {ordering:?}\n");
        for &(b, c) in &ladder.points {
            s.push_str(&format!("{b:>14} {c:>12}\n"));
        }
        s.push_str(&format!(
            "predicted a = {}, b = {}; count / (B^a (log B)^(b-1)) at top = {}",
            format_ratio(&pred.a),
            pred.b,
            constant.map_or("n/a".into(), |c| format!("{c:.6}"))
        ));
        if let Some(n) = note {
            s.push_str(&format!("\nnote: {n}"));
        }
        s
    })
}

fn run_fit(ctx: &mut Ctx, input: &str) -> Result<()> {
    let points = if input == "-" {
        census::read_csv(std::io::stdin().lock())?
    } else {
        census::read_csv(fs::File::open(input).map_err(|e| Error::Parse(format!("{input}: {e}")))?)?
    };
    let r = census::fit_points(&points)?;
    ctx.emit(&r, || {
        format!(
            "alpha = {:.6}\nbeta = {:.6}\ngamma = {:.6}\nresidual_rms = {:.3e}\nwindow = {}..{}",
            r.alpha, r.beta, r.gamma, r.residual_rms, r.window.0, r.window.1
        )
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::UnknownPreset(_) | Error::InvalidPermutation(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let result = Config::load(cli.config.as_ref()).and_then(|config| {
        let json = cli.json || config.get::<bool>("json")?.unwrap_or(false);
        let mut ctx = Ctx { json, config, out };
        match &cli.command {
            Command::Malle(m) => run_malle(&mut ctx, m),
            Command::Kummer(k) => run_kummer(&mut ctx, k),
            Command::Height(h) => run_height(&mut ctx, h),
            Command::Sectors { n } => run_sectors(&mut ctx, *n),
            Command::EszbA { n, witness, k } => run_eszb_a(&mut ctx, *n, *witness, *k),
            Command::Census(c) => run_census(&mut ctx, c),
            Command::Fit { input } => run_fit(&mut ctx, input),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
