use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INCONSISTENT: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug, Serialize)]
pub struct Envelope<'a> {
    pub subcommand: &'a str,
    pub input: Value,
    pub result: Value,
    pub elapsed_ms: u128,
    pub version: &'static str,
}

/// JSON number when it fits, decimal string otherwise.
pub fn big(x: &BigInt) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

pub fn emit(env: &Envelope<'_>, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(env).expect("envelope serializes"));
        return;
    }
    let mut out = String::new();
    write_value(&mut out, &env.result, 0);
    print!("{out}");
    eprintln!("{} finished in {} ms", env.subcommand, env.elapsed_ms);
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| x.is_number() || x.is_boolean()) => {
            Some(a.iter().filter_map(scalar).collect::<Vec<_>>().join(", "))
        }
        _ => None,
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_value(out, x, indent + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_value(out, x, indent + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
