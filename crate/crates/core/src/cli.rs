//! The `starweyl` command line.

use std::f64::consts::PI;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::context::{make_expression_parameter, Context, ExpressionParameter, KSpec, Preset};
use crate::error::{Error, Result};
use crate::gauss::GaussElement;
use crate::holonomy::{self, DetourPolicy, ScanTarget, SpecialParams, Vertex, WordItem};
use crate::intertwine::{self, BranchPath};
use crate::json::{self, Operand};
use crate::quadexp::{self, CrossTerm, PolarTarget, QuadM1, Sign, VacuumNormalization};
use crate::star::{self, Side};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "starweyl", version, about = "K-ordered expressions of the Weyl algebra")]
pub struct Cli {
    /// Number of degrees of freedom.
    #[arg(long, global = true, default_value_t = 1)]
    pub m: usize,
    /// Planck constant ℏ > 0.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,
    /// Expression parameter: weyl, normal, antinormal, unit, @file.json or an
    /// inline JSON matrix.
    #[arg(long, global = true, default_value = "normal")]
    pub k: String,
    /// Use the special expression parameter with these `a,b,rho`.
    #[arg(long, global = true, value_name = "A,B,RHO")]
    pub special: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Numerical tolerance.
    #[arg(long, global = true, env = "STARWEYL_TOL", hide = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StarExpKind {
    /// `e_*^{(t/iℏ)Σ C_ij ũ_i∘ṽ_j}`, needs --c
    Crossed,
    /// `e_*^{(t/ℏ)(aũ²+bṽ²+2c ũ·ṽ)}` at normal ordering, needs --q
    QuadNormal,
    /// `e_*^{t(aũ²+bṽ²+2cũṽ)}` at Weyl ordering, needs --q
    QuadWeyl,
    /// Vacuum `2e^{±H/iℏ}` at Weyl ordering, needs --q with c²−ab = 1
    Vacuum,
    /// Polar element ε₀₀, needs --polar
    Polar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    Pairs,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Ccw,
    Cw,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Clifford,
    Oracle,
    Spin,
    Anomaly,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Star product of two operands under K.
    Product {
        /// Term list, Gaussian element, linear exponential `{"a":…, "s":…, "c":…}`
        /// or polar element `{"polar": k | "total" | [vector]}`.
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Closed-form star exponentials, expressed at K.
    StarExp {
        #[arg(long, value_enum)]
        kind: StarExpKind,
        /// Parameter t as a number or `[re, im]`.
        #[arg(long, default_value = "1")]
        t: String,
        /// m×m matrix C as JSON.
        #[arg(long)]
        c: Option<String>,
        /// `[a, b, c]` as JSON complex numbers.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value = "star")]
        cross: Cross,
        #[arg(long, value_enum, default_value = "plus")]
        sign: VacSign,
        /// 1-based index, `total`, or a JSON unit vector.
        #[arg(long)]
        polar: Option<String>,
        /// Path in t (PathSpec JSON) for quad-normal.
        #[arg(long)]
        tpath: Option<String>,
    },
    /// Re-express an operand given at --k under --to.
    Intertwine {
        #[arg(long)]
        to: String,
        #[arg(long)]
        operand: String,
        /// K-space path (PathSpec JSON with row-major K points).
        #[arg(long)]
        path: Option<String>,
    },
    /// Transport a Gaussian element along a K-space path.
    Transport {
        #[arg(long)]
        operand: String,
        #[arg(long)]
        kpath: String,
    },
    /// Singular parameters of crossed exponentials under the special K (CSV).
    ScanSingularities {
        #[arg(long, value_enum, default_value = "pairs")]
        target: ScanKind,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 2.0 * PI)]
        hi: f64,
    },
    /// Path-connecting product of polar elements and segments on a vertex.
    PathProduct {
        /// JSON list of 1-based polar indices and `{"segment": [...]}` items.
        #[arg(long)]
        word: String,
        /// JSON list of 0/1 flags or 0/π entries.
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long, value_enum, default_value = "ccw")]
        detour: Policy,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Random draws for the oracle suite.
        #[arg(long, default_value_t = 30)]
        draws: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Cross {
    Star,
    Circ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VacSign {
    Plus,
    Minus,
}

/// Process exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::StepLimit(_) | Error::NoConvergence(_) => 1,
        Error::SingularIntertwiner(_) | Error::BranchObstruction(_) | Error::SingularExpression(_) => 3,
        Error::Parse(_)
        | Error::InvalidParams(_)
        | Error::NonSymmetric(_)
        | Error::NotUnit(_)
        | Error::NotInGroup(_)
        | Error::Dimension(_)
        | Error::Unsupported(_) => 2,
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => match write_output(&cli, &text) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn write_output(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()
        }
    }
}

fn context(cli: &Cli) -> Result<Context> {
    let mut ctx = Context::new(cli.m)?.with_hbar(cli.hbar)?;
    if let Some(t) = cli.tol {
        ctx = ctx.with_tol(t)?;
    }
    Ok(ctx)
}

fn special_params(cli: &Cli) -> Result<Option<SpecialParams>> {
    let Some(s) = &cli.special else { return Ok(None) };
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("--special: bad number {x:?}"))))
        .collect::<Result<_>>()?;
    if parts.len() != 3 {
        return Err(Error::Parse("--special expects a,b,rho".into()));
    }
    SpecialParams::new(parts[0], parts[1], parts[2], cli.m).map(Some)
}

/// `weyl|normal|antinormal|unit`, `@file.json` or an inline JSON matrix.
pub fn parse_k(ctx: &Context, spec: &str) -> Result<ExpressionParameter> {
    let preset = match spec {
        "weyl" => Some(Preset::Weyl),
        "normal" => Some(Preset::Normal),
        "antinormal" => Some(Preset::Antinormal),
        "unit" => Some(Preset::Unit),
        _ => None,
    };
    if let Some(p) = preset {
        return make_expression_parameter(ctx, KSpec::Preset(p));
    }
    let text = match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?,
        None => spec.to_string(),
    };
    let m = json::matrix_from_json(&json::parse(&text)?)?;
    make_expression_parameter(ctx, KSpec::Matrix(m))
}

fn the_k(cli: &Cli, ctx: &Context) -> Result<ExpressionParameter> {
    match special_params(cli)? {
        Some(p) => holonomy::build_special_k(ctx, &p),
        None => parse_k(ctx, &cli.k),
    }
}

fn read_json(text: &str) -> Result<Value> {
    match text.strip_prefix('@') {
        Some(path) => json::parse(&std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?),
        None => json::parse(text),
    }
}

fn parse_polar(ctx: &Context, v: &Value) -> Result<PolarTarget> {
    match v {
        Value::String(s) if s == "total" => Ok(PolarTarget::Total),
        Value::Number(n) => {
            let k = n.as_u64().filter(|&k| k >= 1).ok_or_else(|| Error::Parse("polar index is 1-based".into()))?;
            if k as usize > ctx.m {
                return Err(Error::Dimension(format!("polar index {k} out of range for m = {}", ctx.m)));
            }
            Ok(PolarTarget::Index(k as usize - 1))
        }
        Value::Array(_) => Ok(PolarTarget::Vector(json::vector_from_json(v)?)),
        _ => Err(Error::Parse("polar must be an index, \"total\" or a vector".into())),
    }
}

fn operand(ctx: &Context, k: &ExpressionParameter, text: &str) -> Result<Operand> {
    let v = read_json(text)?;
    if let Some(p) = v.get("polar") {
        let target = parse_polar(ctx, p)?;
        return Ok(Operand::Gauss(quadexp::polar_element(ctx, k, &target, BranchPath::Principal)?));
    }
    let op = json::operand_from_json(&v, ctx.n())?;
    if let Operand::Gauss(g) = &op {
        if g.m() != ctx.m {
            return Err(Error::Dimension(format!("Gaussian element with m = {} for m = {}", g.m(), ctx.m)));
        }
    }
    Ok(op)
}

fn branch_meta(g: &GaussElement) -> Map<String, Value> {
    let mut m = Map::new();
    if let Some(g) = g.as_gauss() {
        m.insert("branch".into(), json::branch_to_json(&g.branch));
    }
    m
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn execute(cli: &Cli) -> Result<(String, i32)> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::Product { lhs, rhs } => {
            let k = the_k(cli, &ctx)?;
            let a = operand(&ctx, &k, lhs)?;
            let b = operand(&ctx, &k, rhs)?;
            let (result, meta) = match (a, b) {
                (Operand::Poly(f), Operand::Poly(g)) => (json::poly_to_json(&star::star_poly(&ctx, &k, &f, &g)?), Map::new()),
                (Operand::Poly(p), Operand::Gauss(g)) => {
                    let r = star::star_poly_gauss(&ctx, &k, &p, &g, Side::Left)?;
                    (json::gauss_to_json(&r), branch_meta(&r))
                }
                (Operand::Gauss(g), Operand::Poly(p)) => {
                    let r = star::star_poly_gauss(&ctx, &k, &p, &g, Side::Right)?;
                    (json::gauss_to_json(&r), branch_meta(&r))
                }
                (Operand::Gauss(g1), Operand::Gauss(g2)) => {
                    let r = quadexp::gauss_product(&ctx, &k, &g1, &g2)?;
                    (json::gauss_to_json(&r), branch_meta(&r))
                }
                (Operand::Linear(e1), Operand::Linear(e2)) => {
                    if e1.a.len() != ctx.n() || e2.a.len() != ctx.n() {
                        return Err(Error::Dimension("linear exponentials must have 2m entries".into()));
                    }
                    let e = star::linear_exp_product(&ctx, &e1, &e2);
                    let expr = GaussElement::from(star::k_expression_linear(&ctx, &k, &e));
                    (json!({"linear": json::linear_to_json(&e), "expression": json::gauss_to_json(&expr)}), Map::new())
                }
                _ => return Err(Error::Unsupported("this combination of operands".into())),
            };
            Ok((pretty(&json::with_meta(result, k.k(), ctx.hbar, meta)), 0))
        }
        Command::StarExp { kind, t, c, q, cross, sign, polar, tpath } => {
            let k = the_k(cli, &ctx)?;
            let t = json::complex_from_json(&json::parse(t)?)?;
            fn need<'a>(o: &'a Option<String>, name: &str) -> Result<&'a str> {
                o.as_deref().ok_or_else(|| Error::Parse(format!("--kind needs --{name}")))
            }
            let parse_q = |s: &str| -> Result<QuadM1> {
                let v = read_json(s)?;
                let a = v.as_array().filter(|a| a.len() == 3).ok_or_else(|| Error::Parse("--q expects [a, b, c]".into()))?;
                Ok(QuadM1::new(json::complex_from_json(&a[0])?, json::complex_from_json(&a[1])?, json::complex_from_json(&a[2])?))
            };
            let (g, at): (GaussElement, ExpressionParameter) = match kind {
                StarExpKind::Crossed => {
                    let cm = json::matrix_from_json(&read_json(need(c, "c")?)?)?;
                    if cm.nrows() != ctx.m || cm.ncols() != ctx.m {
                        return Err(Error::Dimension(format!("C must be {0}x{0}", ctx.m)));
                    }
                    (quadexp::star_exp_crossed(&ctx, &cm, t).into(), ExpressionParameter::normal(ctx.m))
                }
                StarExpKind::QuadNormal => {
                    let qq = parse_q(need(q, "q")?)?;
                    let cross = match cross {
                        Cross::Star => CrossTerm::Star,
                        Cross::Circ => CrossTerm::Circ,
                    };
                    let tp = tpath.as_deref().map(|s| read_json(s).and_then(|v| json::path_from_json(&v))).transpose()?;
                    let g = quadexp::star_exp_quad_m1_normal_with(&ctx, &qq, t, cross, tp.as_ref())?;
                    (g.into(), ExpressionParameter::normal(1))
                }
                StarExpKind::QuadWeyl => {
                    let qq = parse_q(need(q, "q")?)?;
                    (quadexp::star_exp_quad_m1_weyl(&ctx, &qq, t)?.into(), ExpressionParameter::weyl(1))
                }
                StarExpKind::Vacuum => {
                    let qq = parse_q(need(q, "q")?)?;
                    let s = match sign {
                        VacSign::Plus => Sign::Plus,
                        VacSign::Minus => Sign::Minus,
                    };
                    (quadexp::vacuum(&ctx, s, &qq, VacuumNormalization::Limit)?, ExpressionParameter::weyl(1))
                }
                StarExpKind::Polar => {
                    let arg = need(polar, "polar")?;
                    let v = json::parse(arg).unwrap_or_else(|_| Value::String(arg.to_string()));
                    let target = parse_polar(&ctx, &v)?;
                    (quadexp::polar_element(&ctx, &k, &target, BranchPath::Principal)?, k.clone())
                }
            };
            let out = if at.k() == k.k() {
                g
            } else {
                intertwine::intertwine_gauss(&ctx, &at, &k, &g, BranchPath::Principal)?
            };
            let meta = branch_meta(&out);
            Ok((pretty(&json::with_meta(json::gauss_to_json(&out), k.k(), ctx.hbar, meta)), 0))
        }
        Command::Intertwine { to, operand: text, path } => {
            let k = the_k(cli, &ctx)?;
            let k2 = parse_k(&ctx, to)?;
            let op = operand(&ctx, &k, text)?;
            let path = path.as_deref().map(|s| read_json(s).and_then(|v| json::path_from_json(&v))).transpose()?;
            let branch = match &path {
                Some(p) => BranchPath::Path(p),
                None => BranchPath::Principal,
            };
            let (result, meta) = match op {
                Operand::Poly(f) => (json::poly_to_json(&intertwine::intertwine_poly(&ctx, &k, &k2, &f)?), Map::new()),
                Operand::Gauss(g) => {
                    let r = intertwine::intertwine_gauss(&ctx, &k, &k2, &g, branch)?;
                    (json::gauss_to_json(&r), branch_meta(&r))
                }
                Operand::Linear(_) => return Err(Error::Unsupported("intertwine a linear exponential's expression instead".into())),
            };
            Ok((pretty(&json::with_meta(result, k2.k(), ctx.hbar, meta)), 0))
        }
        Command::Transport { operand: text, kpath } => {
            let k = the_k(cli, &ctx)?;
            let path = json::path_from_json(&read_json(kpath)?)?;
            let g = match operand(&ctx, &k, text)? {
                Operand::Gauss(g) => g,
                _ => return Err(Error::Unsupported("transport needs a Gaussian element".into())),
            };
            let r = intertwine::transport_gauss(&ctx, &g, &path)?;
            let kend = intertwine::k_from_point(path.end())?;
            let meta = branch_meta(&r);
            Ok((pretty(&json::with_meta(json::gauss_to_json(&r), &kend, ctx.hbar, meta)), 0))
        }
        Command::ScanSingularities { target, lo, hi } => {
            let p = special_params(cli)?.ok_or_else(|| Error::InvalidParams("scan-singularities needs --special a,b,rho".into()))?;
            let m = ctx.m;
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(["k", "l", "ell", "t_re", "t_im", "factor_abs"]).map_err(csv_err)?;
            let targets: Vec<ScanTarget> = match target {
                ScanKind::Pairs => (0..m).flat_map(|a| ((a + 1)..m).map(move |b| ScanTarget::Pair(a, b))).collect(),
                ScanKind::Single => (0..m).map(ScanTarget::Single).collect(),
            };
            for tg in targets {
                let avoid: Vec<usize> = match tg {
                    ScanTarget::Single(a) => vec![a],
                    ScanTarget::Pair(a, b) => vec![a, b],
                };
                let free: Vec<usize> = (0..m).filter(|i| !avoid.contains(i)).collect();
                for mask in 0..(1usize << free.len()) {
                    let mut bits = vec![false; m];
                    for (j, &i) in free.iter().enumerate() {
                        bits[i] = mask & (1 << j) != 0;
                    }
                    let v = Vertex::from_bits(&bits);
                    for s in holonomy::find_singularities(&ctx, &p, tg, &v, (*lo, *hi))? {
                        let (kk, ll) = match tg {
                            ScanTarget::Single(a) => ((a + 1).to_string(), String::new()),
                            ScanTarget::Pair(a, b) => ((a + 1).to_string(), (b + 1).to_string()),
                        };
                        w.write_record([
                            kk,
                            ll,
                            v.index().to_string(),
                            format!("{:.12}", s.t.re),
                            format!("{:.12}", s.t.im),
                            format!("{:.6e}", s.det_abs),
                        ])
                        .map_err(csv_err)?;
                    }
                }
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            Ok((String::from_utf8(bytes).expect("utf8"), 0))
        }
        Command::PathProduct { word, vertex, detour } => {
            let k = the_k(cli, &ctx)?;
            let items = parse_word(&ctx, &read_json(word)?)?;
            let base = match vertex {
                Some(v) => parse_vertex(&ctx, &read_json(v)?)?,
                None => Vertex::origin(ctx.m),
            };
            let policy = match detour {
                Policy::Ccw => DetourPolicy::Ccw,
                Policy::Cw => DetourPolicy::Cw,
                Policy::Explicit => DetourPolicy::Explicit,
            };
            let r = holonomy::path_product(&ctx, &k, &base, &items, policy)?;
            let mut meta = branch_meta(&r.value);
            meta.insert("path".into(), json::path_to_json(&r.path));
            meta.insert("sheet".into(), json!(r.sheet));
            Ok((pretty(&json::with_meta(json::gauss_to_json(&r.value), k.k(), ctx.hbar, meta)), 0))
        }
        Command::Verify { suite, draws } => {
            let report = match suite {
                Suite::Clifford => {
                    let k = the_k(cli, &ctx)?;
                    verify::suite_clifford(&ctx, &k, cli.seed)?
                }
                Suite::Oracle => verify::suite_oracle(ctx.hbar, cli.seed, *draws)?,
                Suite::Spin => verify::suite_spin(ctx.m.max(2), cli.seed)?,
                Suite::Anomaly => verify::suite_anomaly(ctx.m, ctx.hbar, cli.seed)?,
            };
            let code = if report.pass { 0 } else { 1 };
            Ok((pretty(&serde_json::to_value(&report).expect("report")), code))
        }
    }
}

fn parse_word(ctx: &Context, v: &Value) -> Result<Vec<WordItem>> {
    let items = v.as_array().ok_or_else(|| Error::Parse("word must be a JSON list".into()))?;
    items
        .iter()
        .map(|it| match it {
            Value::Number(n) => {
                let k = n.as_u64().filter(|&k| k >= 1).ok_or_else(|| Error::Parse("polar index is 1-based".into()))?;
                if k as usize > ctx.m {
                    return Err(Error::Dimension(format!("polar index {k} out of range for m = {}", ctx.m)));
                }
                Ok(WordItem::Polar(k as usize - 1))
            }
            Value::Object(o) => {
                let seg = o.get("segment").ok_or_else(|| Error::Parse("word item object needs \"segment\"".into()))?;
                let d: Vec<Complex64> = json::vector_from_json(seg)?.iter().copied().collect();
                Ok(WordItem::Segment(d))
            }
            _ => Err(Error::Parse("word items are indices or {\"segment\": [...]}".into())),
        })
        .collect()
}

fn parse_vertex(ctx: &Context, v: &Value) -> Result<Vertex> {
    let a = v.as_array().ok_or_else(|| Error::Parse("vertex must be a JSON list".into()))?;
    if a.len() != ctx.m {
        return Err(Error::Dimension(format!("vertex of length {} for m = {}", a.len(), ctx.m)));
    }
    let xs: Vec<f64> = a.iter().map(|x| x.as_f64().ok_or_else(|| Error::Parse("vertex entries are numbers".into()))).collect::<Result<_>>()?;
    if xs.iter().all(|&x| x == 0.0 || x == 1.0) {
        Ok(Vertex::from_bits(&xs.iter().map(|&x| x == 1.0).collect::<Vec<_>>()))
    } else {
        Vertex::from_deltas(&xs)
    }
}
