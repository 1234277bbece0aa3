//! The `galkinlab` command line.
//!
//! Every subcommand prints plain text, one datum per line, so outputs can
//! be captured in golden files; `--json` mirrors the same data as JSON.
//! Exit status is 0 exactly when the operation succeeded and, where one
//! applies, the verification passed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::abelian::{
    canonicalize, count_pointed_groups, data_to_pointed_group, enumerate_pointed_groups,
    verify_bijection, GeneralPointedGroup, GroupShape, PointedGroup,
};
use crate::knots::{builtin_knot, count_colorings, parse_diagram};
use crate::partitions::{a000712, Partition, SequenceKind, StrictSequence};
use crate::quandle::{galkin, is_quandle, parse_table_any, quandle_from_str, quandle_iso, Verdict};

#[derive(Parser)]
#[command(
    name = "galkinlab",
    about = "Galkin quandles, pointed abelian groups, and knot colorings",
    version
)]
struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    /// Sum |I(e_1,...,e_k)| over the shapes of order q^n.
    Eq31,
    /// The convolution sum p(m) p(n-m).
    Convolution,
    /// Both, with a nonzero exit on disagreement.
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Number of pointed abelian group classes of order q^n.
    Count {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "eq31")]
        method: CountMethod,
    },
    /// List one `<shape> <index sequence>` line per class of order q^n.
    Enumerate {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
    },
    /// Build the Galkin quandle of a pointed group and write its table.
    Galkin {
        /// `q=2;1,2` shape form, or comma-separated cyclic orders (`6,2`).
        #[arg(long)]
        shape: String,
        /// Point: block form `1;1` for shapes, comma form `5,1` for orders.
        #[arg(long, default_value = "")]
        point: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
    /// Check the quandle axioms of a table file.
    Check {
        #[arg(long)]
        table: String,
    },
    /// Search for an isomorphism between two quandle tables.
    Iso {
        #[arg(long)]
        table1: String,
        #[arg(long)]
        table2: String,
    },
    /// Count quandle colorings of a knot diagram.
    Color {
        /// Builtin name: unknot, trefoil, trefoil_alt, figure_eight.
        #[arg(long, conflicts_with = "diagram")]
        knot: Option<String>,
        /// Diagram file in the crossing-list format.
        #[arg(long)]
        diagram: Option<String>,
        #[arg(long)]
        table: String,
    },
    /// Canonical index sequence of a pointed q-group.
    Canon {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value = "")]
        point: String,
    },
    /// Verify the data bijection at weight n, or demo one datum.
    Bijection {
        #[arg(long, required_unless_present = "x")]
        n: Option<u32>,
        /// Positive strict sequence, e.g. `1,3,5`.
        #[arg(long, requires = "y", requires = "lambda")]
        x: Option<String>,
        /// Nonnegative strict sequence, e.g. `1,2,4`.
        #[arg(long)]
        y: Option<String>,
        /// Partition in decreasing form, e.g. `2,1,1`.
        #[arg(long)]
        lambda: Option<String>,
    },
}

/// Entry point used by `main`; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(output) => {
            print!("{}", output.text);
            if output.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

struct Output {
    text: String,
    ok: bool,
}

fn ok(text: String) -> Result<Output, String> {
    Ok(Output { text, ok: true })
}

fn run(cli: &Cli) -> Result<Output, String> {
    match &cli.command {
        Command::Count { n, method } => cmd_count(*n, *method, cli.json),
        Command::Enumerate { q, n } => cmd_enumerate(*q, *n, cli.json),
        Command::Galkin { shape, point, out } => {
            cmd_galkin(shape, point, out.as_deref(), cli.json)
        }
        Command::Check { table } => cmd_check(table, cli.json),
        Command::Iso { table1, table2 } => cmd_iso(table1, table2, cli.json),
        Command::Color {
            knot,
            diagram,
            table,
        } => cmd_color(knot.as_deref(), diagram.as_deref(), table, cli.json),
        Command::Canon { shape, point } => cmd_canon(shape, point, cli.json),
        Command::Bijection { n, x, y, lambda } => {
            match (x, y, lambda) {
                (Some(x), Some(y), Some(lambda)) => cmd_bijection_demo(x, y, lambda, cli.json),
                (None, None, None) => {
                    let n = n.ok_or("--n is required without demo data")?;
                    cmd_bijection_verify(n, cli.json)
                }
                _ => Err("--x, --y and --lambda must be given together".into()),
            }
        }
    }
}

fn json_count(v: u128) -> serde_json::Value {
    match u64::try_from(v) {
        Ok(small) => small.into(),
        Err(_) => v.to_string().into(),
    }
}

fn cmd_count(n: u32, method: CountMethod, as_json: bool) -> Result<Output, String> {
    let (eq31, conv) = match method {
        CountMethod::Eq31 => (Some(count_pointed_groups(n)), None),
        CountMethod::Convolution => (None, Some(a000712(n))),
        CountMethod::Both => (Some(count_pointed_groups(n)), Some(a000712(n))),
    };
    let matches = match (eq31, conv) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    };
    let text = if as_json {
        let mut obj = serde_json::Map::new();
        obj.insert("n".into(), n.into());
        if let Some(a) = eq31 {
            obj.insert("eq31".into(), json_count(a));
        }
        if let Some(b) = conv {
            obj.insert("convolution".into(), json_count(b));
        }
        if eq31.is_some() && conv.is_some() {
            obj.insert("match".into(), matches.into());
        }
        format!("{}\n", serde_json::Value::Object(obj))
    } else {
        let values: Vec<String> = [eq31, conv]
            .into_iter()
            .flatten()
            .map(|v| v.to_string())
            .collect();
        format!("{}\n", values.join(" "))
    };
    Ok(Output { text, ok: matches })
}

fn cmd_enumerate(q: u64, n: u32, as_json: bool) -> Result<Output, String> {
    let classes = enumerate_pointed_groups(q, n).map_err(|e| e.to_string())?;
    if as_json {
        let entries: Vec<serde_json::Value> = classes
            .iter()
            .map(|(shape, seq)| {
                json!({
                    "shape": shape.to_string(),
                    "index_sequence": seq.to_string(),
                })
            })
            .collect();
        let value = json!({
            "q": q,
            "n": n,
            "count": classes.len(),
            "classes": entries,
        });
        return ok(format!("{value}\n"));
    }
    let mut text = String::new();
    for (shape, seq) in &classes {
        writeln!(text, "{shape} {seq}").unwrap();
    }
    ok(text)
}

/// Accepts a pointed group either as a q-group shape (`q=2;1,2` plus a
/// block-form point `1;1`) or as cyclic orders (`6,2` plus a comma-form
/// point `5,1`).
fn parse_general_group(shape: &str, point: &str) -> Result<GeneralPointedGroup, String> {
    if shape.trim_start().starts_with("q=") {
        let parsed: GroupShape = shape.parse().map_err(|e| format!("{e}"))?;
        let element = parsed.parse_element(point).map_err(|e| format!("{e}"))?;
        let mut orders = Vec::new();
        let mut coords = Vec::new();
        for (b, &(_, mult)) in parsed.blocks().iter().enumerate() {
            for j in 0..mult as usize {
                orders.push(parsed.modulus(b));
                coords.push(element.coords()[b][j]);
            }
        }
        return GeneralPointedGroup::new(orders, coords).map_err(|e| format!("{e}"));
    }
    let orders = if shape.trim().is_empty() {
        Vec::new()
    } else {
        shape
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| format!("cannot parse orders `{shape}`"))?
    };
    let point = if point.trim().is_empty() {
        vec![0; orders.len()]
    } else {
        point
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| format!("cannot parse point `{point}`"))?
    };
    GeneralPointedGroup::new(orders, point).map_err(|e| format!("{e}"))
}

fn cmd_galkin(
    shape: &str,
    point: &str,
    out: Option<&str>,
    as_json: bool,
) -> Result<Output, String> {
    let group = parse_general_group(shape, point)?;
    let q = galkin(&group).map_err(|e| format!("{e}"))?;
    let body = if as_json { q.to_json() + "\n" } else { q.to_text() };
    match out {
        Some(path) => {
            fs::write(path, body).map_err(|e| format!("cannot write {path}: {e}"))?;
            ok(String::new())
        }
        None => ok(body),
    }
}

fn load_table_rows(path: &str) -> Result<Vec<Vec<usize>>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let (rows, _) = parse_table_any(&text).map_err(|e| format!("{path}: {e}"))?;
    Ok(rows)
}

fn cmd_check(table: &str, as_json: bool) -> Result<Output, String> {
    let rows = load_table_rows(table)?;
    let verdict = is_quandle(&rows).map_err(|e| format!("{table}: {e}"))?;
    match verdict {
        Verdict::Pass => {
            let text = if as_json {
                format!("{}\n", json!({"verdict": "pass"}))
            } else {
                "pass\n".to_string()
            };
            ok(text)
        }
        Verdict::Fail(v) => {
            let text = if as_json {
                format!("{}\n", json!({"verdict": "fail", "violation": v.to_string()}))
            } else {
                format!("fail {v}\n")
            };
            Ok(Output { text, ok: false })
        }
    }
}

fn cmd_iso(table1: &str, table2: &str, as_json: bool) -> Result<Output, String> {
    let text1 = fs::read_to_string(table1).map_err(|e| format!("cannot read {table1}: {e}"))?;
    let text2 = fs::read_to_string(table2).map_err(|e| format!("cannot read {table2}: {e}"))?;
    let q1 = quandle_from_str(&text1).map_err(|e| format!("{table1}: {e}"))?;
    let q2 = quandle_from_str(&text2).map_err(|e| format!("{table2}: {e}"))?;
    match quandle_iso(&q1, &q2) {
        Some(h) => {
            let text = if as_json {
                format!("{}\n", json!({ "isomorphism": h }))
            } else {
                let images: Vec<String> = h.iter().map(usize::to_string).collect();
                format!("{}\n", images.join(" "))
            };
            ok(text)
        }
        None => {
            let text = if as_json {
                format!("{}\n", json!({ "isomorphism": null }))
            } else {
                "none\n".to_string()
            };
            Ok(Output { text, ok: false })
        }
    }
}

fn cmd_color(
    knot: Option<&str>,
    diagram: Option<&str>,
    table: &str,
    as_json: bool,
) -> Result<Output, String> {
    let d = match (knot, diagram) {
        (Some(name), None) => builtin_knot(name).map_err(|e| format!("{e}"))?,
        (None, Some(path)) => {
            let text =
                fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            parse_diagram(&text).map_err(|e| format!("{path}: {e}"))?
        }
        _ => return Err("exactly one of --knot or --diagram is required".into()),
    };
    let text = fs::read_to_string(table).map_err(|e| format!("cannot read {table}: {e}"))?;
    let q = quandle_from_str(&text).map_err(|e| format!("{table}: {e}"))?;
    let report = count_colorings(&d, &q);
    let text = if as_json {
        format!(
            "{}\n",
            json!({
                "count": json_count(report.count),
                "quandle_size": report.quandle_size,
                "diagram": report.diagram,
            })
        )
    } else {
        format!("{}\n", report.count)
    };
    ok(text)
}

fn cmd_canon(shape: &str, point: &str, as_json: bool) -> Result<Output, String> {
    let parsed: GroupShape = shape.parse().map_err(|e| format!("{e}"))?;
    let element = parsed.parse_element(point).map_err(|e| format!("{e}"))?;
    let pointed = PointedGroup::new(parsed, element).map_err(|e| format!("{e}"))?;
    let seq = canonicalize(&pointed);
    let text = if as_json {
        format!("{}\n", json!({ "index_sequence": seq.to_string() }))
    } else {
        format!("{seq}\n")
    };
    ok(text)
}

fn cmd_bijection_verify(n: u32, as_json: bool) -> Result<Output, String> {
    match verify_bijection(n) {
        Ok(count) => {
            let text = if as_json {
                format!("{}\n", json!({"n": n, "count": json_count(count), "ok": true}))
            } else {
                format!("OK {count}\n")
            };
            ok(text)
        }
        Err(failure) => {
            let text = if as_json {
                format!("{}\n", json!({"n": n, "ok": false, "failure": failure}))
            } else {
                format!("FAIL {failure}\n")
            };
            Ok(Output { text, ok: false })
        }
    }
}

fn tuple(values: &[impl ToString]) -> String {
    let inner: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("({})", inner.join(","))
}

fn subscripted(letter: &str, k: usize) -> String {
    if k == 0 {
        return format!("({letter})");
    }
    let names: Vec<String> = (1..=k).map(|i| format!("{letter}{i}")).collect();
    format!("({})", names.join(","))
}

fn cmd_bijection_demo(x: &str, y: &str, lambda: &str, as_json: bool) -> Result<Output, String> {
    let x = StrictSequence::parse(x, SequenceKind::Positive).map_err(|e| format!("--x: {e}"))?;
    let y =
        StrictSequence::parse(y, SequenceKind::Nonnegative).map_err(|e| format!("--y: {e}"))?;
    let lambda: Partition = lambda.parse().map_err(|e| format!("--lambda: {e}"))?;

    let (blocks, seq) = data_to_pointed_group(&x, &y, &lambda).map_err(|e| format!("{e}"))?;

    let mut mu: Vec<u32> = lambda.parts().to_vec();
    mu.extend(x.values().iter().zip(y.values()).map(|(&a, &b)| a + b));
    mu.sort_unstable();
    let mut lambda_ascending: Vec<u32> = lambda.parts().to_vec();
    lambda_ascending.reverse();
    let exponents: Vec<u32> = blocks.iter().map(|&(e, _)| e).collect();
    let multiplicities: Vec<u32> = blocks.iter().map(|&(_, m)| m).collect();
    let indices: Vec<usize> = seq.pairs().iter().map(|&(i, _)| i).collect();
    let shifted: Vec<u32> = seq.pairs().iter().map(|&(_, f)| f).collect();
    let unshifted: Vec<u32> = x.values().to_vec();
    let n: u64 = x.total() + y.total() + lambda.weight();

    if as_json {
        let value = json!({
            "n": n,
            "x": x.values(),
            "y": y.values(),
            "lambda": lambda_ascending,
            "mu": mu,
            "exponents": exponents,
            "multiplicities": multiplicities,
            "indices": indices,
            "f_shifted": shifted,
            "f_unshifted": unshifted,
            "note": "index sequences here use f_s = x_s - 1, keeping every f_s within 0 <= f_s <= e_{i_s} - 1",
        });
        return ok(format!("{value}\n"));
    }

    let k = blocks.len();
    let l = seq.len();
    let mut text = String::new();
    writeln!(text, "n = {n}").unwrap();
    writeln!(text, "x = {}", tuple(x.values())).unwrap();
    writeln!(text, "y = {}", tuple(y.values())).unwrap();
    writeln!(text, "λ = {}", tuple(&lambda_ascending)).unwrap();
    writeln!(text, "μ = {}", tuple(&mu)).unwrap();
    writeln!(text, "{} = {}", subscripted("e", k), tuple(&exponents)).unwrap();
    writeln!(text, "{} = {}", subscripted("n", k), tuple(&multiplicities)).unwrap();
    writeln!(text, "{} = {}", subscripted("i", l), tuple(&indices)).unwrap();
    writeln!(text, "f = {}  [f_s = x_s - 1]", tuple(&shifted)).unwrap();
    writeln!(text, "f = {}  [unshifted alternative f_s = x_s]", tuple(&unshifted)).unwrap();
    writeln!(
        text,
        "note: index sequences here use f_s = x_s - 1, keeping every f_s within 0 <= f_s <= e_(i_s) - 1"
    )
    .unwrap();
    ok(text)
}
