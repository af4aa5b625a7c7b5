//! Command-line front end: parse p-adic literals, dispatch the library
//! commands, and emit JSON or human-readable reports.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use so3p::decompose::{
    compose, counterexample, decompose, feasibility, second_solution, two_adic_counterexample,
    AxisOrder, DecomposeOutcome, Feasibility,
};
use so3p::padic::{hilbert_symbol, parse_literal, SquareClass};
use so3p::projection::{enumerate_closure, enumerate_products, enumerate_so2_mod, FiniteGroupReport};
use so3p::quad_form::DiagonalForm;
use so3p::so2::{Mat2, So2Group, So2Point};
use so3p::so3::{identity_mat, Mat3, So3Group};
use so3p::{Error, PadicContext, PadicNumber};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "so3p", version, about = "Exact arithmetic in p-adic rotation groups")]
struct Cli {
    /// Working precision in p-adic digits
    #[arg(long, global = true, default_value_t = 48)]
    precision: u32,
    /// Guard digits absorbed by tolerance checks
    #[arg(long, global = true, default_value_t = 8)]
    guard: u32,
    /// Seed for randomized commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration budget (elements scanned / products formed)
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants and equivalence class of a diagonal quadratic form
    Classify {
        #[arg(long)]
        p: u64,
        /// Coefficients, ';'-separated p-adic literals or integers
        #[arg(long)]
        form: String,
    },
    /// Hilbert symbol (a, b) over Q_p
    Hilbert {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Circle group of a definite binary form
    So2 {
        #[command(subcommand)]
        cmd: So2Cmd,
    },
    /// Rotation group of the definite ternary form
    So3 {
        #[command(subcommand)]
        cmd: So3Cmd,
    },
    /// Factor a rotation into three axis rotations
    Decompose {
        #[arg(long)]
        p: u64,
        /// Axis order, e.g. zyx or xyx
        #[arg(long)]
        order: String,
        /// 9 row-major literals ';'-separated, a file path, 'I', or '-' for stdin
        #[arg(long)]
        matrix: String,
    },
    /// Whether a rotation factors in a given axis order
    Feasibility {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        order: Option<String>,
        #[arg(long, default_value_t = false)]
        all_orders: bool,
    },
    /// A rotation with no factorization in the requested axis order
    Counterexample {
        #[arg(long)]
        p: Option<u64>,
        /// xzy, euler-xyx, euler-xzx, euler-yxy, euler-yzy, euler-zxz, euler-zyz, or p2
        #[arg(long)]
        kind: String,
        /// Also report feasibility witnesses in all 12 axis orders
        #[arg(long, default_value_t = false)]
        verify: bool,
    },
    /// Finite quotient of the rotation group mod p^k
    Enumerate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        /// so2 or so3
        #[arg(long, default_value = "so3")]
        group: String,
        /// Square-class label for so2 (1, u, p, up; or signed integer for p = 2)
        #[arg(long)]
        kappa: Option<String>,
    },
}

#[derive(Subcommand)]
enum So2Cmd {
    /// Product of two circle points
    Compose {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        kappa: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        tau: String,
    },
    /// Rotation matrix of a circle point
    Matrix {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        kappa: String,
        #[arg(long)]
        sigma: String,
    },
}

#[derive(Subcommand)]
enum So3Cmd {
    /// Membership test: preserves the form with determinant one
    Member {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        matrix: String,
    },
    /// Fixed axis and rotation angle of a member
    Axis {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        matrix: String,
    },
    /// Rotation about a given axis by a given circle point
    Rotate {
        #[arg(long)]
        p: u64,
        /// Axis vector: three ';'-separated literals
        #[arg(long)]
        axis: String,
        #[arg(long)]
        sigma: String,
    },
    /// Pseudorandom members, deterministic in --seed
    Random {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::PrecisionExhausted => Failure {
                code: 3,
                msg: "precision exhausted; retry with a larger --precision".into(),
            },
            Error::Parse { pos, msg } => Failure {
                code: 1,
                msg: format!("parse error at position {pos}: {msg}"),
            },
            other => Failure {
                code: 1,
                msg: other.to_string(),
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn context(cli: &Cli, p: u64) -> Result<PadicContext, Failure> {
    if cli.guard >= cli.precision {
        return Err(Failure::input("--guard must be smaller than --precision"));
    }
    Ok(PadicContext::new(p, cli.precision, cli.guard)?)
}

// ---------------------------------------------------------------------------
// input parsing
// ---------------------------------------------------------------------------

/// Split on `sep`, but not inside the `<d0,d1,...>`-style digit groups or
/// parenthesized precision markers of full literals.
fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out.into_iter()
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn parse_point(ctx: &PadicContext, s: &str) -> Result<So2Point, Failure> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(So2Point::Infinity);
    }
    if let Some(colon) = s.find(':') {
        let num = parse_literal(ctx, &s[..colon])?;
        let den = parse_literal(ctx, &s[colon + 1..])?;
        return match (num.is_zero(), den.is_zero()) {
            (true, true) => Err(Failure::input("point 0:0 is not projective")),
            (false, true) => Ok(So2Point::Infinity),
            _ => Ok(So2Point::Finite(num.div(&den)?)),
        };
    }
    Ok(So2Point::Finite(parse_literal(ctx, s)?))
}

fn point_string(pt: &So2Point) -> String {
    match pt {
        So2Point::Infinity => "inf".to_string(),
        So2Point::Finite(s) => format!("{s}:1"),
    }
}

fn matrix_source(spec: &str) -> Result<String, Failure> {
    if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
        return Ok(buf);
    }
    let path = std::path::Path::new(spec);
    if path.is_file() {
        return std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {spec}: {e}")));
    }
    Ok(spec.to_string())
}

fn parse_matrix(ctx: &PadicContext, spec: &str) -> Result<Mat3, Failure> {
    let text = matrix_source(spec)?;
    let trimmed = text.trim();
    if trimmed == "I" {
        return Ok(identity_mat(ctx));
    }
    let entries: Vec<String> = trimmed
        .lines()
        .flat_map(|l| {
            if l.contains(';') {
                split_top_level(l, ';')
            } else if l.trim().is_empty() {
                vec![]
            } else {
                vec![l.trim().to_string()]
            }
        })
        .collect();
    if entries.len() != 9 {
        return Err(Failure::input(format!(
            "expected 9 row-major matrix entries, found {}",
            entries.len()
        )));
    }
    let mut m = identity_mat(ctx);
    for (idx, tok) in entries.iter().enumerate() {
        m[idx / 3][idx % 3] = parse_literal(ctx, tok)?;
    }
    Ok(m)
}

fn parse_kappa(p: u64, label: &str) -> Result<SquareClass, Failure> {
    SquareClass::all(p)
        .into_iter()
        .find(|c| c.label() == label.trim())
        .ok_or_else(|| {
            let labels: Vec<String> = SquareClass::all(p).iter().map(|c| c.label()).collect();
            Failure::input(format!(
                "unknown square class '{label}' for p = {p}; expected one of {}",
                labels.join(", ")
            ))
        })
}

fn parse_order(s: &str) -> Result<AxisOrder, Failure> {
    Ok(AxisOrder::parse(s)?)
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

fn mat3_strings(m: &Mat3) -> Vec<Vec<String>> {
    m.iter()
        .map(|row| row.iter().map(|e| e.to_string()).collect())
        .collect()
}

fn mat2_strings(m: &Mat2) -> Vec<Vec<String>> {
    m.iter()
        .map(|row| row.iter().map(|e| e.to_string()).collect())
        .collect()
}

fn print_matrix_text(rows: &[Vec<String>]) {
    for row in rows {
        println!("{}", row.join(" ; "));
    }
}

fn emit(cli: &Cli, mut value: Value, text: impl FnOnce()) -> Result<u8, Failure> {
    match cli.format {
        Format::Json => {
            value["schema_version"] = json!(SCHEMA_VERSION);
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
        Format::Text => text(),
        Format::Csv => {
            return Err(Failure::input(
                "--format csv is only available for the enumerate command",
            ))
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.cmd {
        Cmd::Classify { p, form } => cmd_classify(cli, *p, form),
        Cmd::Hilbert { p, a, b } => cmd_hilbert(cli, *p, a, b),
        Cmd::So2 { cmd } => match cmd {
            So2Cmd::Compose { p, kappa, sigma, tau } => cmd_so2_compose(cli, *p, kappa, sigma, tau),
            So2Cmd::Matrix { p, kappa, sigma } => cmd_so2_matrix(cli, *p, kappa, sigma),
        },
        Cmd::So3 { cmd } => match cmd {
            So3Cmd::Member { p, matrix } => cmd_so3_member(cli, *p, matrix),
            So3Cmd::Axis { p, matrix } => cmd_so3_axis(cli, *p, matrix),
            So3Cmd::Rotate { p, axis, sigma } => cmd_so3_rotate(cli, *p, axis, sigma),
            So3Cmd::Random { p, count } => cmd_so3_random(cli, *p, *count),
        },
        Cmd::Decompose { p, order, matrix } => cmd_decompose(cli, *p, order, matrix),
        Cmd::Feasibility {
            p,
            matrix,
            order,
            all_orders,
        } => cmd_feasibility(cli, *p, matrix, order.as_deref(), *all_orders),
        Cmd::Counterexample { p, kind, verify } => cmd_counterexample(cli, *p, kind, *verify),
        Cmd::Enumerate { p, k, group, kappa } => {
            cmd_enumerate(cli, *p, *k, group, kappa.as_deref())
        }
    }
}

fn cmd_classify(cli: &Cli, p: u64, form: &str) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let coeffs: Result<Vec<PadicNumber>, Error> = split_top_level(form, ';')
        .iter()
        .map(|t| parse_literal(&ctx, t))
        .collect();
    let coeffs = coeffs?;
    if coeffs.is_empty() {
        return Err(Failure::input("the form needs at least one coefficient"));
    }
    let f = DiagonalForm::new(ctx, coeffs)?;
    let disc = f.discriminant_class()?;
    let hasse = f.hasse_invariant()?;
    let definite = f.is_definite()?;
    let kappa = if f.rank() == 2 && definite {
        Some(disc.label())
    } else {
        None
    };
    emit(
        cli,
        json!({
            "p": p,
            "rank": f.rank(),
            "disc_class": disc.label(),
            "hasse": hasse,
            "definite": definite,
            "kappa": kappa,
        }),
        || {
            println!("rank: {}", f.rank());
            println!("disc_class: {}", disc.label());
            println!("hasse: {hasse}");
            println!("definite: {definite}");
            if let Some(k) = &kappa {
                println!("kappa: {k}");
            }
        },
    )
}

fn cmd_hilbert(cli: &Cli, p: u64, a: &str, b: &str) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let av = parse_literal(&ctx, a)?;
    let bv = parse_literal(&ctx, b)?;
    let sym = hilbert_symbol(&ctx, &av, &bv)?;
    emit(
        cli,
        json!({ "p": p, "a": av.to_string(), "b": bv.to_string(), "symbol": sym }),
        || println!("({av}, {bv})_{p} = {sym}"),
    )
}

fn cmd_so2_compose(cli: &Cli, p: u64, kappa: &str, sigma: &str, tau: &str) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let circle = So2Group::new(ctx, parse_kappa(p, kappa)?)?;
    let s = parse_point(&ctx, sigma)?;
    let t = parse_point(&ctx, tau)?;
    let out = circle.compose(&s, &t)?;
    emit(
        cli,
        json!({
            "p": p,
            "kappa": kappa,
            "sigma": point_string(&s),
            "tau": point_string(&t),
            "product": point_string(&out),
        }),
        || println!("{}", point_string(&out)),
    )
}

fn cmd_so2_matrix(cli: &Cli, p: u64, kappa: &str, sigma: &str) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let circle = So2Group::new(ctx, parse_kappa(p, kappa)?)?;
    let s = parse_point(&ctx, sigma)?;
    let m = circle.matrix(&s)?;
    let rows = mat2_strings(&m);
    emit(
        cli,
        json!({ "p": p, "kappa": kappa, "sigma": point_string(&s), "matrix": rows }),
        || print_matrix_text(&rows),
    )
}

fn cmd_so3_member(cli: &Cli, p: u64, matrix: &str) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let g = So3Group::new(ctx);
    let m = parse_matrix(&ctx, matrix)?;
    let member = g.is_member(&m);
    emit(cli, json!({ "p": p, "member": member }), || {
        println!("member: {member}")
    })
}

fn cmd_so3_axis(cli: &Cli, p: u64, matrix: &str) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let g = So3Group::new(ctx);
    let m = parse_matrix(&ctx, matrix)?;
    if !g.is_member(&m) {
        return Err(Failure::input("the matrix is not in the rotation group"));
    }
    let (axis, angle) = g.axis_angle(&m)?;
    let axis_strs: Vec<String> = axis.iter().map(|e| e.to_string()).collect();
    emit(
        cli,
        json!({ "p": p, "axis": axis_strs, "angle": point_string(&angle) }),
        || {
            println!("axis: {}", axis_strs.join(" ; "));
            println!("angle: {}", point_string(&angle));
        },
    )
}

fn cmd_so3_rotate(cli: &Cli, p: u64, axis: &str, sigma: &str) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let g = So3Group::new(ctx);
    let comps = split_top_level(axis, ';');
    let comps = if comps.len() == 1 {
        split_top_level(axis, ',')
    } else {
        comps
    };
    if comps.len() != 3 {
        return Err(Failure::input("the axis needs exactly 3 components"));
    }
    let mut n = [ctx.zero(), ctx.zero(), ctx.zero()];
    for (i, t) in comps.iter().enumerate() {
        n[i] = parse_literal(&ctx, t)?;
    }
    let s = parse_point(&ctx, sigma)?;
    let m = g.rotation_about(&n, &s)?;
    let rows = mat3_strings(&m);
    emit(
        cli,
        json!({ "p": p, "sigma": point_string(&s), "matrix": rows }),
        || print_matrix_text(&rows),
    )
}

fn cmd_so3_random(cli: &Cli, p: u64, count: usize) -> Result<u8, Failure> {
    use rand::SeedableRng;
    let ctx = context(cli, p)?;
    let g = So3Group::new(ctx);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
    let mats: Vec<Vec<Vec<String>>> = (0..count)
        .map(|_| mat3_strings(&g.random_element(&mut rng)))
        .collect();
    emit(
        cli,
        json!({ "p": p, "seed": cli.seed, "matrices": mats }),
        || {
            for (i, rows) in mats.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print_matrix_text(rows);
            }
        },
    )
}

/// Valuation floor of the entrywise difference between the input and the
/// recomposed product; at least precision - guard on success.
fn residual_valuation(_ctx: &PadicContext, a: &Mat3, b: &Mat3) -> Option<i64> {
    let mut min: Option<i64> = None;
    for i in 0..3 {
        for j in 0..3 {
            let d = a[i][j].sub_lossy(&b[i][j]);
            if let Some(v) = d.valuation() {
                min = Some(min.map_or(v, |m: i64| m.min(v)));
            }
        }
    }
    min
}

fn cmd_decompose(cli: &Cli, p: u64, order: &str, matrix: &str) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let g = So3Group::new(ctx);
    let order = parse_order(order)?;
    let m = parse_matrix(&ctx, matrix)?;
    if !g.is_member(&m) {
        return Err(Failure::input("the matrix is not in the rotation group"));
    }
    match decompose(&g, &m, &order)? {
        DecomposeOutcome::Solutions(sols) => {
            let twin = second_solution(&g, &order, &sols[0])?;
            let residuals: Vec<Option<i64>> = sols
                .iter()
                .map(|s| {
                    let rebuilt = compose(&g, &order, s)?;
                    Ok(residual_valuation(&ctx, &m, &rebuilt))
                })
                .collect::<Result<_, Error>>()?;
            let params: Vec<Vec<String>> = sols
                .iter()
                .map(|s| s.iter().map(point_string).collect())
                .collect();
            let twin_strs: Vec<String> = twin.iter().map(point_string).collect();
            emit(
                cli,
                json!({
                    "p": p,
                    "order": order.label(),
                    "solutions": params,
                    "twin_of_first": twin_strs,
                    "residual_valuations": residuals,
                }),
                || {
                    for (i, s) in params.iter().enumerate() {
                        let res = residuals[i]
                            .map(|v| format!("residual valuation >= {v}"))
                            .unwrap_or_else(|| "residual exactly zero".to_string());
                        println!("solution {}: {} ({res})", i + 1, s.join("  "));
                    }
                    println!("twin of first: {}", twin_strs.join("  "));
                },
            )
        }
        DecomposeOutcome::Infeasible { witness } => {
            match cli.format {
                Format::Json => {
                    let v = json!({
                        "schema_version": SCHEMA_VERSION,
                        "p": p,
                        "order": order.label(),
                        "feasible": false,
                        "witness": witness.to_string(),
                    });
                    println!("{}", serde_json::to_string_pretty(&v).unwrap());
                }
                Format::Text => {
                    println!("infeasible: the middle-step square {witness} is a non-square");
                }
                Format::Csv => {
                    return Err(Failure::input(
                        "--format csv is only available for the enumerate command",
                    ))
                }
            }
            Ok(2)
        }
    }
}

fn order_report(
    g: &So3Group,
    m: &Mat3,
    order: &AxisOrder,
) -> Result<(bool, Option<String>), Error> {
    match feasibility(g, m, order)? {
        Feasibility::Feasible => Ok((true, None)),
        Feasibility::Infeasible { witness } => Ok((false, Some(witness.to_string()))),
    }
}

fn cmd_feasibility(
    cli: &Cli,
    p: u64,
    matrix: &str,
    order: Option<&str>,
    all_orders: bool,
) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    let g = So3Group::new(ctx);
    let m = parse_matrix(&ctx, matrix)?;
    if !g.is_member(&m) {
        return Err(Failure::input("the matrix is not in the rotation group"));
    }
    if all_orders {
        let mut rows = Vec::new();
        for o in AxisOrder::all() {
            let (feasible, witness) = order_report(&g, &m, &o)?;
            rows.push((o.label(), feasible, witness));
        }
        let items: Vec<Value> = rows
            .iter()
            .map(|(l, f, w)| json!({ "order": l, "feasible": f, "witness": w }))
            .collect();
        emit(cli, json!({ "p": p, "orders": items }), || {
            for (l, f, w) in &rows {
                match w {
                    Some(w) => println!("{l}: infeasible (witness {w})"),
                    None => {
                        let _ = f;
                        println!("{l}: feasible");
                    }
                }
            }
        })
    } else {
        let o = parse_order(order.ok_or_else(|| {
            Failure::input("pass --order <axes> or --all-orders")
        })?)?;
        let (feasible, witness) = order_report(&g, &m, &o)?;
        emit(
            cli,
            json!({ "p": p, "order": o.label(), "feasible": feasible, "witness": witness }),
            || match &witness {
                Some(w) => println!("{}: infeasible (witness {w})", o.label()),
                None => println!("{}: feasible", o.label()),
            },
        )?;
        Ok(if feasible { 0 } else { 2 })
    }
}

fn cmd_counterexample(cli: &Cli, p: Option<u64>, kind: &str, verify: bool) -> Result<u8, Failure> {
    let kind = kind.trim().to_ascii_lowercase();
    let (ctx, target, m, witness): (PadicContext, String, Mat3, Option<PadicNumber>) =
        if kind == "p2" {
            if let Some(p) = p {
                if p != 2 {
                    return Err(Failure::input("--kind p2 requires p = 2"));
                }
            }
            let ctx = context(cli, 2)?;
            let m = two_adic_counterexample(&ctx)?;
            (ctx, "all".to_string(), m, None)
        } else {
            let p = p.ok_or_else(|| Failure::input("--p is required for this kind"))?;
            let order_label = kind.strip_prefix("euler-").unwrap_or(&kind);
            let order = parse_order(order_label)?;
            if !kind.starts_with("euler-") && kind != "xzy" && kind != "yzx" {
                return Err(Failure::input(
                    "expected --kind xzy, yzx, euler-<axes>, or p2",
                ));
            }
            let ctx = context(cli, p)?;
            let g = So3Group::new(ctx);
            match counterexample(&g, &order) {
                Ok((m, w)) => (ctx, order.label(), m, Some(w)),
                Err(Error::NoSuchForm) => {
                    return Err(Failure::input(format!(
                        "every rotation factors in the {order_label} order for p = {p}",
                    )))
                }
                Err(e) => return Err(e.into()),
            }
        };
    let g = So3Group::new(ctx);
    let rows = mat3_strings(&m);
    let mut verification: Vec<(String, bool, Option<String>)> = Vec::new();
    if verify {
        for o in AxisOrder::all() {
            let (feasible, w) = order_report(&g, &m, &o)?;
            verification.push((o.label(), feasible, w));
        }
    }
    let v_items: Vec<Value> = verification
        .iter()
        .map(|(l, f, w)| json!({ "order": l, "feasible": f, "witness": w }))
        .collect();
    emit(
        cli,
        json!({
            "p": ctx.p(),
            "kind": kind,
            "target_order": target,
            "matrix": rows,
            "witness": witness.as_ref().map(|w| w.to_string()),
            "verification": if verify { Some(v_items) } else { None },
        }),
        || {
            print_matrix_text(&rows);
            if let Some(w) = &witness {
                println!("witness ({target}): {w}");
            }
            for (l, f, w) in &verification {
                match w {
                    Some(w) => println!("{l}: infeasible (witness {w})"),
                    None => {
                        let _ = f;
                        println!("{l}: feasible");
                    }
                }
            }
        },
    )
}

fn emit_report(cli: &Cli, p: u64, k: u32, report: &FiniteGroupReport, method: &str) {
    match cli.format {
        Format::Json => {
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "p": p,
                "k": k,
                "order": report.order,
                "closed": report.closed,
                "max_elt_order": report.max_element_order,
                "method": method,
            });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
        Format::Csv => {
            println!("p,k,order,closed,max_elt_order,method");
            println!(
                "{p},{k},{},{},{},{method}",
                report.order,
                report.closed,
                report
                    .max_element_order
                    .map(|o| o.to_string())
                    .unwrap_or_default(),
            );
        }
        Format::Text => {
            println!("p = {p}, k = {k}");
            println!("order: {}", report.order);
            println!("closed: {}", report.closed);
            if let Some(o) = report.max_element_order {
                println!("max element order: {o}");
            }
            println!("method: {method}");
        }
    }
}

fn cmd_enumerate(
    cli: &Cli,
    p: u64,
    k: u32,
    group: &str,
    kappa: Option<&str>,
) -> Result<u8, Failure> {
    let ctx = context(cli, p)?;
    match group {
        "so2" => {
            let kappa_label = kappa.ok_or_else(|| Failure::input("--kappa is required for so2"))?;
            let kappa = parse_kappa(p, kappa_label)?;
            let (report, _) = enumerate_so2_mod(&ctx, kappa, k, cli.budget)?;
            emit_report(cli, p, k, &report, "both-branches");
            Ok(0)
        }
        "so3" => {
            let g = So3Group::new(ctx);
            let (set, method) = if p == 2 {
                (
                    enumerate_closure(&g, k, cli.budget)?,
                    "bfs-closure (generated subgroup, lower bound)",
                )
            } else {
                (enumerate_products(&g, k, cli.budget)?, "triple-product")
            };
            let report = FiniteGroupReport {
                order: set.len(),
                closed: true,
                generators_used: "axis rotations, both branches".to_string(),
                max_element_order: None,
            };
            emit_report(cli, p, k, &report, method);
            Ok(0)
        }
        other => Err(Failure::input(format!(
            "unknown group '{other}'; expected so2 or so3"
        ))),
    }
}
