use clap::{Parser, Subcommand};
use msing::amod::{band_name, BandKind, FPModule};
use msing::config::{Format, RunConfig};
use msing::ext::{check_exact, lin_check, minimal_resolution, LinConfig, Verdict};
use msing::ops::{bp, parse_op, Steenrod};
use msing::registry::Registry;
use msing::singer::{LElem, SingerLarge, SingerSmall};
use msing::{dualalg::Tag, render, Error};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "msing", about = "Motivic Steenrod algebra, Singer constructions and Ext over A(n)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// flat key = value file; flags override its entries
    #[arg(long, global = true)]
    config: Option<String>,
    #[arg(long, global = true)]
    prime: Option<String>,
    /// trivial, complex or real
    #[arg(long, global = true)]
    profile: Option<String>,
    #[arg(long, global = true)]
    envelope: Option<String>,
    /// e.g. s=0..4,ts=0..8
    #[arg(long, global = true)]
    window: Option<String>,
    #[arg(long, global = true)]
    module: Option<String>,
    #[arg(long = "max-deg", global = true)]
    max_deg: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    /// json, svg or txt
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites
    Verify {
        #[arg(long)]
        suite: Option<String>,
    },
    /// Ext chart of a module or tower
    Chart {
        /// minimal-resolution, cobar or total-complex
        #[arg(long)]
        mode: Option<String>,
    },
    /// Act on an element of a Singer construction
    Singer {
        /// small or large
        #[arg(long)]
        construction: Option<String>,
        #[arg(long)]
        op: Option<String>,
        #[arg(long)]
        element: Option<String>,
    },
    /// Minimal resolution as JSON
    Resolve,
    /// Residue Ext-equivalence check
    Lin {
        /// largest band half-width searched
        #[arg(long = "k-max")]
        k_max: Option<String>,
        /// replace the residue by the zero map
        #[arg(long = "zero-map")]
        zero_map: bool,
    },
}

enum Fail {
    Usage(String),
    Run(String, u8),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        match e {
            Error::Parse(_) | Error::Profile(_) | Error::Unsupported(_) => Fail::Usage(e.to_string()),
            Error::Inconclusive(_) => Fail::Run(e.to_string(), 2),
            _ => Fail::Run(e.to_string(), 1),
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig, Fail> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{path}: {e}")))?;
            RunConfig::from_text(&text)?
        }
        None => RunConfig::default(),
    };
    let mut flags: Vec<(&str, Option<String>)> = vec![
        ("prime", cli.prime.clone()),
        ("profile", cli.profile.clone()),
        ("envelope", cli.envelope.clone()),
        ("window", cli.window.clone()),
        ("module", cli.module.clone()),
        ("max-deg", cli.max_deg.clone()),
        ("out", cli.out.clone()),
        ("format", cli.format.clone()),
    ];
    match &cli.cmd {
        Cmd::Verify { suite } => flags.push(("suite", suite.clone())),
        Cmd::Chart { mode } => flags.push(("mode", mode.clone())),
        Cmd::Singer { construction, op, element } => {
            flags.push(("construction", construction.clone()));
            flags.push(("op", op.clone()));
            flags.push(("element", element.clone()));
        }
        Cmd::Resolve => {}
        Cmd::Lin { k_max, zero_map } => {
            flags.push(("k-max", k_max.clone()));
            if *zero_map {
                flags.push(("zero-map", Some("true".into())));
            }
        }
    }
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    Ok(cfg)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Fail> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Fail::Run(format!("{path}: {e}"), 1)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

fn cmd_verify(cfg: &RunConfig) -> Result<u8, Fail> {
    let profile = cfg.profile()?;
    let reg = Registry::standard();
    let suites: Vec<_> = match &cfg.suite {
        Some(name) => {
            let s = reg.suite(name).ok_or_else(|| Fail::Usage(format!("unknown suite '{name}'")))?;
            if !s.supports(&profile) {
                return Err(Fail::Usage(format!("suite '{name}' does not apply to {profile}")));
            }
            vec![s]
        }
        None => reg.suites().filter(|s| s.supports(&profile)).collect(),
    };
    let mut all_ok = true;
    let mut out = Vec::new();
    let mut txt = String::new();
    for s in suites {
        for r in s.run(profile, cfg.max_deg) {
            all_ok &= r.ok();
            txt.push_str(&format!("{} {}/{} {} cases\n", if r.ok() { "PASS" } else { "FAIL" }, s.name(), r.name, r.cases));
            for f in r.failures.iter().take(5) {
                txt.push_str(&format!("  {f}\n"));
            }
            out.push(json!({"suite": s.name(), "name": r.name, "cases": r.cases, "ok": r.ok(), "failures": r.failures.iter().take(20).collect::<Vec<_>>()}));
        }
    }
    let v = json!({"prime": profile.prime, "profile": profile.kind.name(), "max_deg": cfg.max_deg, "ok": all_ok, "reports": out});
    emit(cfg, &if cfg.format == Format::Txt { txt } else { pretty(&v) })?;
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_chart(cfg: &RunConfig) -> Result<u8, Fail> {
    let profile = cfg.profile()?;
    let st = Steenrod::new(profile);
    let reg = Registry::standard();
    let strat = reg.strategy(&cfg.mode).ok_or_else(|| Fail::Usage(format!("unknown mode '{}' (have {})", cfg.mode, reg.strategy_names().join(", "))))?;
    let chart = strat.chart(&reg, &st, &cfg.module, cfg.envelope, &cfg.window)?;
    let mut v = chart.to_json();
    v["module"] = json!(cfg.module);
    v["mode"] = json!(cfg.mode);
    let text = match cfg.format {
        Format::Json => pretty(&v),
        Format::Svg => render::svg(&v),
        Format::Txt => render::text(&v),
    };
    emit(cfg, &text)?;
    Ok(0)
}

/// `uv^k|g`, `v^-1|g`, `u|g`, `1|g`, optionally prefixed by S.
fn parse_large(rm: &SingerLarge, base: &FPModule, s: &str) -> Result<LElem, Error> {
    let bad = || Error::Parse(format!("bad element '{s}'"));
    let (left, g) = s.split_once('|').ok_or_else(bad)?;
    let j = base.find_name(g.trim()).ok_or_else(bad)?;
    let left = left.trim().strip_prefix('S').unwrap_or(left.trim());
    for i in 0..2u8 {
        for k in -1000..=1000 {
            if band_name(BandKind::Bmu, i, k) == left {
                return Ok(rm.elem(i, k as i64, j));
            }
        }
    }
    Err(bad())
}

fn cmd_singer(cfg: &RunConfig) -> Result<u8, Fail> {
    let profile = cfg.profile()?;
    let st = Steenrod::new(profile);
    let reg = Registry::standard();
    let n = cfg.envelope.max(1);
    let base = reg.module(&st, n, &cfg.module)?;
    let op_s = cfg.op.clone().ok_or_else(|| Fail::Usage("--op is required".into()))?;
    let el = cfg.element.clone().ok_or_else(|| Fail::Usage("--element is required".into()))?;
    let op = parse_op(&st, &op_s, Tag::An(n))?;
    let (result, eval) = match cfg.construction.as_str() {
        "small" => {
            let rs = SingerSmall::new(&st, &base)?;
            let (b, g) = el.split_once('|').ok_or_else(|| Fail::Usage(format!("bad element '{el}'")))?;
            let j = base.find_name(g.trim()).ok_or_else(|| Fail::Usage(format!("no generator '{g}'")))?;
            let b = parse_op(&st, b, Tag::Bn(n))?;
            let x = rs.stabilize(&b, &msing::amod::mvec_gen(j))?;
            let y = rs.act(&op, &x, n)?;
            (rs.fmt(&y), base.fmt(&rs.eval_small(&y)?))
        }
        "large" => {
            let rm = SingerLarge::new(&st, &base)?;
            let x = parse_large(&rm, &base, &el)?;
            let mut y = LElem::new();
            for (&(m, h), &c) in &op.terms {
                let (e, r) = ((m.e & 1) as u8, m.r[0]);
                if !h.is_one() || bp(st.p, e, r) != m {
                    return Err(Fail::Usage("the large construction takes sums of beta^e P^r".into()));
                }
                for (k, v) in rm.act_bp(e, r as i64, &x)? {
                    let t = y.entry(k).or_insert(0);
                    *t = st.f.add(*t, st.f.mul(c, v));
                }
            }
            y.retain(|_, c| *c != 0);
            (rm.fmt(&y), base.fmt(&rm.eval_large(&y)?))
        }
        c => return Err(Fail::Usage(format!("unknown construction '{c}'"))),
    };
    let text = match cfg.format {
        Format::Json => pretty(&json!({"construction": cfg.construction, "module": cfg.module, "op": op_s, "element": el, "result": result, "eval": eval})),
        _ => format!("{result}\n"),
    };
    emit(cfg, &text)?;
    Ok(0)
}

fn cmd_resolve(cfg: &RunConfig) -> Result<u8, Fail> {
    let profile = cfg.profile()?;
    let st = Steenrod::new(profile);
    let reg = Registry::standard();
    let m = reg.module(&st, cfg.envelope, &cfg.module)?;
    let res = minimal_resolution(&st, &m, cfg.envelope, cfg.window.s_max, cfg.window.t_max())?;
    let exact = check_exact(&res, &cfg.window);
    let mut v = res.cx.to_json();
    v["module"] = json!(cfg.module);
    v["t_max"] = json!(cfg.window.t_max());
    v["exact"] = json!(exact.is_ok());
    emit(cfg, &pretty(&v))?;
    Ok(if exact.is_ok() { 0 } else { 1 })
}

fn cmd_lin(cfg: &RunConfig) -> Result<u8, Fail> {
    let profile = cfg.profile()?;
    let mut lc = LinConfig::new(cfg.window);
    lc.k_max = cfg.k_max;
    lc.zero_map = cfg.zero_map;
    let rep = lin_check(profile, &lc)?;
    let mut v = rep.to_json();
    v["prime"] = json!(profile.prime);
    v["profile"] = json!(profile.kind.name());
    let text = match cfg.format {
        Format::Json => pretty(&v),
        _ => {
            let mut s = match &rep.verdict {
                Verdict::Iso => "ISO".to_string(),
                Verdict::Fail(s, t, u, why) => format!("FAIL at ({s},{t},{u}): {why}"),
                Verdict::Inconclusive(why) => format!("INCONCLUSIVE axis={}: {why}", rep.axis.unwrap_or("?")),
            };
            if let Some((n, k)) = rep.witness {
                s.push_str(&format!(" witness n={n} K={k}"));
            }
            s + "\n"
        }
    };
    emit(cfg, &text)?;
    Ok(rep.verdict.exit_code() as u8)
}

fn run(cli: &Cli) -> Result<u8, Fail> {
    if let Ok(t) = std::env::var("MSING_THREADS") {
        if t.parse::<usize>().map_or(true, |t| t == 0) {
            return Err(Fail::Usage(format!("MSING_THREADS must be a positive integer, got '{t}'")));
        }
    }
    let cfg = config(cli)?;
    match cli.cmd {
        Cmd::Verify { .. } => cmd_verify(&cfg),
        Cmd::Chart { .. } => cmd_chart(&cfg),
        Cmd::Singer { .. } => cmd_singer(&cfg),
        Cmd::Resolve => cmd_resolve(&cfg),
        Cmd::Lin { .. } => cmd_lin(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(c) => ExitCode::from(c),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Fail::Run(m, c)) => {
            eprintln!("error: {m}");
            ExitCode::from(c)
        }
    }
}
