mod args;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};
use sidon_core::random_model::config_hash;

use args::{Cli, Format};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let hash = config_hash(&json!({ "command": &cli.command, "seed": cli.seed }));
    let (code, text) = match run::dispatch(&cli.command, cli.seed) {
        Ok(out) => {
            let text = match (cli.format, out.csv) {
                (Format::Csv, Some(csv)) => csv,
                (Format::Csv, None) => generic_csv(&out.payload),
                (Format::Json, _) => render(json!({ "status": "ok", "payload": out.payload, "config_hash": hash })),
            };
            (0, text)
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            let payload = json!({ "kind": e.kind(), "message": e.to_string() });
            (1, render(json!({ "status": "error", "payload": payload, "config_hash": hash })))
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

fn render(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json renders") + "\n"
}

/// `key,value` rows for payloads without a natural table.
fn generic_csv(payload: &Value) -> String {
    let mut s = String::from("key,value\n");
    match payload {
        Value::Object(map) => {
            for (k, v) in map {
                s.push_str(&format!("{k},{}\n", csv_cell(v)));
            }
        }
        other => s.push_str(&format!("value,{}\n", csv_cell(other))),
    }
    s
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(_) | Value::Bool(_) | Value::Null => v.to_string(),
        _ => format!("\"{}\"", v.to_string().replace('"', "\"\"")),
    }
}
