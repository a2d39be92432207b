//! Rendering of command results as JSON, TSV or indented text.

use std::fmt::Write as _;

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Pretty,
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Tsv => {
            let mut out = String::new();
            flatten("", v, &mut out);
            out
        }
        Format::Pretty => {
            let mut out = String::new();
            outline(v, 0, &mut out);
            out
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".to_string(),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// One `path<TAB>value` line per leaf, paths joined with dots.
fn flatten(path: &str, v: &Value, out: &mut String) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        leaf => {
            let _ = writeln!(out, "{path}\t{}", scalar(leaf));
        }
    }
}

/// Arrays of scalars print inline; arrays of such arrays print one row per
/// line, right-aligned, so matrices read as matrices.
fn outline(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    _ if is_scalar(x) => {
                        let _ = writeln!(out, "{pad}{k}: {}", scalar(x));
                    }
                    Value::Array(xs) if xs.iter().all(is_scalar) => {
                        let _ = writeln!(out, "{pad}{k}: {}", inline(xs));
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}:");
                        outline(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(xs) if is_matrix(xs) => {
            let width = xs
                .iter()
                .flat_map(|r| r.as_array().into_iter().flatten())
                .map(|x| scalar(x).chars().count())
                .max()
                .unwrap_or(0);
            for r in xs {
                let cells: Vec<String> = r
                    .as_array()
                    .into_iter()
                    .flatten()
                    .map(|x| format!("{:>width$}", scalar(x)))
                    .collect();
                let _ = writeln!(out, "{pad}[ {} ]", cells.join(" "));
            }
        }
        Value::Array(xs) => {
            for x in xs {
                if is_scalar(x) {
                    let _ = writeln!(out, "{pad}- {}", scalar(x));
                } else if let Value::Array(ys) = x {
                    if ys.iter().all(is_scalar) {
                        let _ = writeln!(out, "{pad}- {}", inline(ys));
                    } else {
                        let _ = writeln!(out, "{pad}-");
                        outline(x, depth + 1, out);
                    }
                } else {
                    let _ = writeln!(out, "{pad}-");
                    outline(x, depth + 1, out);
                }
            }
        }
        leaf => {
            let _ = writeln!(out, "{pad}{}", scalar(leaf));
        }
    }
}

fn inline(xs: &[Value]) -> String {
    let cells: Vec<String> = xs.iter().map(scalar).collect();
    format!("[{}]", cells.join(", "))
}

fn is_matrix(xs: &[Value]) -> bool {
    !xs.is_empty()
        && xs
            .iter()
            .all(|r| matches!(r, Value::Array(ys) if !ys.is_empty() && ys.iter().all(|y| y.is_number() || y.is_string())))
}
